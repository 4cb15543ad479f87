//! Serialization helpers shared by report types.
//!
//! Rationals are written exactly as `p/q` strings. Irrational reals are written as an outward
//! rounded enclosure `[lo, hi]`.

use std::fmt::Display;

use serde::Serializer;

use crate::arith::{Rational, Real};

/// Bits of precision used when a report renders an irrational real.
pub const REPORT_BITS: u32 = 128;
/// Significant digits of rendered enclosures.
pub const REPORT_DIGITS: usize = 25;

pub fn ser_display<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn ser_display_vec<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub fn ser_display_vec_vec<T: Display, S: Serializer>(v: &[Vec<T>], s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = v.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
    serde::Serialize::serialize(&rows, s)
}

pub fn ser_option_display<T: Display, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.collect_str(x),
        None => s.serialize_none(),
    }
}

/// Renders a real: the exact rational when known, otherwise an enclosure.
pub fn render_real(r: &Real) -> String {
    match r.exact() {
        Some(q) => q.to_string(),
        None => match r.enclosure(REPORT_BITS) {
            Ok(e) => e.to_decimal(REPORT_DIGITS),
            Err(e) => format!("undecided: {e}"),
        },
    }
}

pub fn ser_real<S: Serializer>(r: &Real, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&render_real(r))
}

pub fn ser_rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}
