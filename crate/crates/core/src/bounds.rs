//! Calculators for the explicit bounds on numbers of subspaces and solutions.
//!
//! All logarithms are natural. Values above `2^1024` are reported by their binary logarithm,
//! and doubly exponential values by an iterated binary logarithm.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::arith::enclosure::{log2_estimate, pow_rational};
use crate::arith::real::ln_ratio;
use crate::arith::{int, Power, Rational, Real, RealEnclosure};
use crate::error::{Error, Result};

/// Values whose binary logarithm exceeds this are reported in log form.
pub const LOG_FORM_THRESHOLD: i64 = 1024;

const DIGITS: usize = 25;

/// A bound value, either directly or through its (iterated) binary logarithm.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundValue {
    Exact(Rational),
    Enclosure(RealEnclosure),
    /// `log₂ |value|`; `negative` records the sign of the value.
    Log2 { log2: RealEnclosure, negative: bool },
    /// `log₂ log₂ value`.
    Log2Log2(RealEnclosure),
}

impl BoundValue {
    pub fn form(&self) -> &'static str {
        match self {
            BoundValue::Exact(_) => "exact",
            BoundValue::Enclosure(_) => "enclosure",
            BoundValue::Log2 { .. } => "log2",
            BoundValue::Log2Log2(_) => "log2log2",
        }
    }

    /// `log₂ log₂` of the value as an enclosure, for cross-form comparison of positive values above 2.
    pub fn log2log2(&self, bits: u32) -> Result<RealEnclosure> {
        let log2 = |e: &RealEnclosure| -> Result<RealEnclosure> {
            let ln2 = crate::arith::enclosure::ln_rational(&int(2), bits + 16);
            e.ln(bits + 16).and_then(|l| l.div(&ln2)).ok_or_else(|| Error::InvalidInput("log of a nonpositive bound".into()))
        };
        match self {
            BoundValue::Exact(r) => log2(&log2(&RealEnclosure::exact(r.clone()))?),
            BoundValue::Enclosure(e) => log2(&log2(e)?),
            BoundValue::Log2 { log2: l, negative: false } => log2(l),
            BoundValue::Log2 { negative: true, .. } => Err(Error::InvalidInput("negative bound".into())),
            BoundValue::Log2Log2(e) => Ok(e.clone()),
        }
    }

    /// `log₂` of the value, when it is not doubly exponential.
    pub fn log2(&self, bits: u32) -> Result<RealEnclosure> {
        let ln2 = crate::arith::enclosure::ln_rational(&int(2), bits + 16);
        let direct = |e: &RealEnclosure| e.ln(bits + 16).and_then(|l| l.div(&ln2)).ok_or_else(|| Error::InvalidInput("log of a nonpositive bound".into()));
        match self {
            BoundValue::Exact(r) => direct(&RealEnclosure::exact(r.clone())),
            BoundValue::Enclosure(e) => direct(e),
            BoundValue::Log2 { log2, negative: false } => Ok(log2.clone()),
            _ => Err(Error::InvalidInput("bound has no single-log form".into())),
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Exact(r) => write!(f, "{r}"),
            BoundValue::Enclosure(e) => f.write_str(&e.to_decimal(DIGITS)),
            BoundValue::Log2 { log2, negative } => {
                write!(f, "{}2^{}", if *negative { "-" } else { "" }, log2.to_decimal(DIGITS))
            }
            BoundValue::Log2Log2(e) => write!(f, "2^2^{}", e.to_decimal(DIGITS)),
        }
    }
}

impl Serialize for BoundValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BoundValue", 3)?;
        st.serialize_field("form", self.form())?;
        match self {
            BoundValue::Exact(r) => st.serialize_field("value", &r.to_string())?,
            BoundValue::Enclosure(e) => st.serialize_field("value", &e.to_decimal(DIGITS))?,
            BoundValue::Log2 { log2, .. } => st.serialize_field("value", &log2.to_decimal(DIGITS))?,
            BoundValue::Log2Log2(e) => st.serialize_field("value", &e.to_decimal(DIGITS))?,
        }
        let negative = matches!(self, BoundValue::Log2 { negative: true, .. });
        st.serialize_field("negative", &negative)?;
        st.end()
    }
}

/// A named bound with its inputs.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub value: BoundValue,
    pub inputs: BTreeMap<String, String>,
    /// Set when a logarithmic factor is not positive, which happens only on degenerate inputs
    /// outside the implicit range of the formula. The raw value is still reported.
    pub out_of_range: bool,
}

/// A product `rational · ∏ factors` of a positive rational and real factors.
pub(crate) struct Product {
    rational: Rational,
    factors: Vec<Real>,
}

impl Product {
    pub(crate) fn new(rational: Rational) -> Product {
        Product { rational, factors: Vec::new() }
    }

    pub(crate) fn times(mut self, f: Real) -> Product {
        match f.exact() {
            Some(r) => self.rational *= r,
            None => self.factors.push(f),
        }
        self
    }

    fn to_real(&self) -> Real {
        self.factors.iter().fold(Real::rational(self.rational.clone()), |acc, f| acc.mul(f))
    }

    /// Evaluates in direct or log form; the flag reports a nonpositive factor.
    pub(crate) fn evaluate(&self, bits: u32) -> Result<(BoundValue, bool)> {
        let mut signs = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            signs.push(f.cmp_rational(&Rational::zero())?);
        }
        let out_of_range = signs.iter().any(|s| s.is_le()) || !self.rational.is_positive();
        let negative = (signs.iter().filter(|s| s.is_lt()).count() % 2 == 1) != self.rational.is_negative();
        let magnitude_log2 = log2_estimate(&self.rational)
            + self
                .factors
                .iter()
                .map(|f| f.enclosure(32).map(|e| log2_estimate(&e.upper().abs().max(e.lower().abs()))))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .sum::<i64>();
        if magnitude_log2 <= LOG_FORM_THRESHOLD || signs.iter().any(|s| s.is_eq()) || self.rational.is_zero() {
            return Ok(match self.to_real() {
                r if r.exact().is_some() => (BoundValue::Exact(r.exact().cloned().unwrap_or_default()), out_of_range),
                r => (BoundValue::Enclosure(r.enclosure(bits)?), out_of_range),
            });
        }
        let ln2 = Real::ln_of(&int(2))?;
        let mut log2 = Real::ln_of(&self.rational.abs())?.div(&ln2);
        for f in &self.factors {
            let abs = if f.cmp_rational(&Rational::zero())?.is_lt() { f.neg() } else { f.clone() };
            log2 = log2.add(&abs.ln().div(&ln2));
        }
        Ok((BoundValue::Log2 { log2: log2.enclosure(bits)?, negative }, out_of_range))
    }
}

fn check_n_delta(n: u32, delta: &Rational) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("n = {n} must be at least 2")));
    }
    check_delta(delta)
}

pub(crate) fn check_delta(delta: &Rational) -> Result<()> {
    if !delta.is_positive() || *delta > Rational::one() {
        return Err(Error::InvalidInput(format!("delta = {delta} must lie in (0, 1]")));
    }
    Ok(())
}

fn at_least_one(name: &str, x: &Rational) -> Result<()> {
    if *x < Rational::one() {
        return Err(Error::InvalidInput(format!("{name} = {x} must be at least 1")));
    }
    Ok(())
}

fn inputs(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn pow_int(base: i64, e: u32) -> Rational {
    Rational::from_integer(BigInt::from(base).pow(e))
}

fn report(name: &str, product: Product, bits: u32, ins: BTreeMap<String, String>) -> Result<BoundReport> {
    let (value, out_of_range) = product.evaluate(bits)?;
    Ok(BoundReport { name: name.to_string(), value, inputs: ins, out_of_range })
}

/// `10⁹·2^{2n}·n^{14}·δ⁻³·log(3δ⁻¹RD)·log(δ⁻¹·log 3RD)`: subspaces containing the large solutions.
pub fn theorem21_bound(n: u32, delta: &Rational, r: &Rational, d: &Rational, bits: u32) -> Result<BoundReport> {
    check_n_delta(n, delta)?;
    at_least_one("R", r)?;
    at_least_one("D", d)?;
    let rd = r * d;
    let inv = delta.recip();
    let c = pow_int(10, 9) * pow_int(2, 2 * n) * pow_int(n as i64, 14) * pow_rational(&inv, 3);
    let l1 = Real::ln_of(&(int(3) * &inv * &rd))?;
    let l2 = Real::ln_of(&(int(3) * &rd))?.scale(&inv).ln();
    let p = Product::new(c).times(l1).times(l2);
    report("theorem_2_1", p, bits, inputs(&[("n", n.to_string()), ("delta", delta.to_string()), ("R", r.to_string()), ("D", d.to_string())]))
}

/// `4^{(n+9)²}·δ^{-n-4}·log(2RD)·log log(2RD)`: subspaces containing solutions above the threshold.
pub fn theorem_b_bound(n: u32, delta: &Rational, r: &Rational, d: &Rational, bits: u32) -> Result<BoundReport> {
    check_n_delta(n, delta)?;
    at_least_one("R", r)?;
    at_least_one("D", d)?;
    let rd2 = int(2) * r * d;
    let c = pow_int(4, (n + 9) * (n + 9)) * pow_rational(&delta.recip(), n as i64 + 4);
    let l = Real::ln_of(&rd2)?;
    let ll = l.ln();
    let p = Product::new(c).times(l).times(ll);
    report("theorem_b", p, bits, inputs(&[("n", n.to_string()), ("delta", delta.to_string()), ("R", r.to_string()), ("D", d.to_string())]))
}

/// The height threshold `max(2H, n^{2n/δ})` above which the subspace count applies.
pub fn theorem_b_threshold(n: u32, delta: &Rational, h: &Rational) -> Result<Threshold> {
    check_n_delta(n, delta)?;
    Threshold::new(int(2) * h, n, delta)
}

/// The height threshold `max(H, n^{2n/δ})` separating large from small solutions.
pub fn large_threshold(n: u32, delta: &Rational, h: &Rational) -> Result<Threshold> {
    check_n_delta(n, delta)?;
    Threshold::new(h.clone(), n, delta)
}

/// `max(a, n^{2n/δ})` kept symbolically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Threshold {
    pub rational: Rational,
    pub power: Power,
}

impl Threshold {
    fn new(rational: Rational, n: u32, delta: &Rational) -> Result<Threshold> {
        let power = Power::new(int(n as i64), int(2 * n as i64) / delta)?;
        Ok(Threshold { rational, power })
    }

    /// Certified `x >= max(rational, power)`.
    pub fn is_reached_by(&self, x: &Rational) -> Result<bool> {
        Ok(*x >= self.rational && self.power.cmp_rational(x)?.is_le())
    }

    /// Exact value when the power is rational, else `None`.
    pub fn exact(&self) -> Option<Rational> {
        self.power.exact().map(|p| p.max(self.rational.clone()))
    }
}

/// `2^{2^{27nδ⁻²}}`, reported as `log₂ log₂ = 27nδ⁻²`.
pub fn schmidt89_bound(n: u32, delta: &Rational) -> Result<BoundReport> {
    check_n_delta(n, delta)?;
    let ll = int(27 * n as i64) / (delta * delta);
    Ok(BoundReport {
        name: "schmidt_1989".into(),
        value: BoundValue::Log2Log2(RealEnclosure::exact(ll)),
        inputs: inputs(&[("n", n.to_string()), ("delta", delta.to_string())]),
        out_of_range: false,
    })
}

/// The interval-result constants `m` and `ω`.
#[derive(Clone, Debug, Serialize)]
pub struct Theorem31Constants {
    #[serde(serialize_with = "crate::report::ser_display")]
    pub m: BigInt,
    #[serde(serialize_with = "crate::report::ser_real")]
    pub omega: Real,
}

/// `m = [10⁸·2^{2n}·n^{14}·δ⁻²·log(3δ⁻¹RD)]` and `ω = 3nδ⁻¹·log(3RD)`.
pub fn theorem31_constants(n: u32, delta: &Rational, r: &Rational, d: &Rational) -> Result<Theorem31Constants> {
    check_n_delta(n, delta)?;
    at_least_one("R", r)?;
    at_least_one("D", d)?;
    let inv = delta.recip();
    let c = pow_int(10, 8) * pow_int(2, 2 * n) * pow_int(n as i64, 14) * &inv * &inv;
    let m = Real::ln_of(&(int(3) * &inv * r * d))?.scale(&c).floor()?;
    let omega = Real::ln_of(&(int(3) * r * d))?.scale(&(int(3 * n as i64) * &inv));
    Ok(Theorem31Constants { m, omega })
}

/// `m·(1 + [log ω / log(1 + δ/2n)]) + 1`: windows plus one for the exceptional subspace.
pub fn theorem21_window_total(m: &BigInt, omega: &Real, n: u32, delta: &Rational) -> Result<BigInt> {
    check_n_delta(n, delta)?;
    if omega.cmp_rational(&Rational::one())?.is_le() {
        return Err(Error::InvalidInput("omega must exceed 1".into()));
    }
    let base = Rational::one() + delta / int(2 * n as i64);
    let ratio = match omega.exact() {
        Some(w) => ln_ratio(w, &base)?,
        None => omega.ln().div(&Real::ln_of(&base)?),
    };
    Ok(m * (BigInt::one() + ratio.floor()?) + BigInt::one())
}

/// The window total composed with the interval-result constants.
pub fn theorem21_window_total_for(n: u32, delta: &Rational, r: &Rational, d: &Rational) -> Result<BigInt> {
    let c = theorem31_constants(n, delta, r, d)?;
    theorem21_window_total(&c.m, &c.omega, n, delta)
}

/// Small-solution bounds: the general form `δ⁻¹((10³n)^{nd} + 4n·log log 4H)` and the form
/// `δ⁻¹(10^{3n} + 4n·log log 4H)` valid over ℚ.
#[derive(Clone, Debug, Serialize)]
pub struct SmallBound {
    pub general: BoundReport,
    pub rational_field: BoundReport,
}

pub fn small_bound(n: u32, d: u32, delta: &Rational, h: &Rational, bits: u32) -> Result<SmallBound> {
    check_n_delta(n, delta)?;
    at_least_one("H", h)?;
    if d == 0 {
        return Err(Error::InvalidInput("field degree d must be at least 1".into()));
    }
    let inv = delta.recip();
    let lll = Real::ln_of(&(int(4) * h))?.ln().scale(&int(4 * n as i64));
    let general_head = Rational::from_integer(BigInt::from(1000u32 * n).pow(n * d));
    let q_head = pow_int(10, 3 * n);
    let make = |name: &str, head: Rational| -> Result<BoundReport> {
        let value = Real::rational(head).add(&lll);
        let p = Product::new(inv.clone()).times(value);
        report(name, p, bits, inputs(&[("n", n.to_string()), ("d", d.to_string()), ("delta", delta.to_string()), ("H", h.to_string())]))
    };
    Ok(SmallBound { general: make("theorem_2_2", general_head)?, rational_field: make("theorem_2_2_rational", q_head)? })
}

/// Rows of the comparison table printed by the command line.
pub fn comparison_table(n: u32, delta: &Rational, r: &Rational, d: &Rational, h: &Rational, bits: u32) -> Result<Vec<BoundReport>> {
    let small = small_bound(n, 1, delta, h, bits)?;
    let c = theorem31_constants(n, delta, r, d)?;
    let total = theorem21_window_total(&c.m, &c.omega, n, delta)?;
    let ins = inputs(&[("n", n.to_string()), ("delta", delta.to_string()), ("R", r.to_string()), ("D", d.to_string())]);
    Ok(vec![
        theorem21_bound(n, delta, r, d, bits)?,
        theorem_b_bound(n, delta, r, d, bits)?,
        schmidt89_bound(n, delta)?,
        BoundReport {
            name: "theorem_3_1_window_total".into(),
            value: BoundValue::Exact(Rational::from_integer(total)),
            inputs: ins,
            out_of_range: false,
        },
        small.rational_field,
    ])
}
