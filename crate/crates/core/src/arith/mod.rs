//! Exact rationals, places of ℚ, absolute values, heights and certified real arithmetic.

pub mod algebraic;
pub mod complex_roots;
pub mod enclosure;
pub mod field;
pub mod poly;
pub mod primes;
pub mod real;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub use algebraic::AlgebraicReal;
pub use enclosure::RealEnclosure;
pub use field::{NfElem, NumberField};
pub use real::{precision_cap, set_precision_cap, Power, Real};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A place of ℚ: the archimedean place or a prime.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinity,
    Prime(BigInt),
}

impl Place {
    /// The finite place attached to `p`; fails unless `p` is prime.
    pub fn prime(p: BigInt) -> Result<Place> {
        if primes::is_prime(&p) {
            Ok(Place::Prime(p))
        } else {
            Err(Error::InvalidInput(format!("{p} is not prime")))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinity)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => f.write_str("inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `p`-adic order of a nonzero rational.
pub fn ord_p(x: &Rational, p: &BigInt) -> i64 {
    primes::valuation(x.numer(), p) as i64 - primes::valuation(x.denom(), p) as i64
}

/// The normalized absolute value `|x|_v`, with `|p|_p = 1/p`.
pub fn abs_value(x: &Rational, v: &Place) -> Rational {
    match v {
        Place::Infinity => x.abs(),
        Place::Prime(_) if x.is_zero() => Rational::zero(),
        Place::Prime(p) => enclosure::pow_rational(&Rational::from_integer(p.clone()), -ord_p(x, p)),
    }
}

/// Places at which `x` has nontrivial absolute value, together with ∞.
pub fn support(x: &Rational) -> Vec<Place> {
    let mut primes: Vec<BigInt> = primes::factor(x.numer())
        .into_iter()
        .chain(primes::factor(x.denom()))
        .map(|(p, _)| p)
        .collect();
    primes.sort();
    primes.dedup();
    std::iter::once(Place::Infinity).chain(primes.into_iter().map(Place::Prime)).collect()
}

/// Product of `|x|_v` over ∞ and every prime dividing the numerator or denominator.
pub fn product_formula_check(x: &Rational) -> Result<Rational> {
    if x.is_zero() {
        return Err(Error::InvalidInput("product formula needs a nonzero rational".into()));
    }
    Ok(support(x).iter().map(|v| abs_value(x, v)).product())
}

/// `∏_v max(1, |x_1|_v, …, |x_n|_v)`.
pub fn height_vector(x: &[Rational]) -> Rational {
    let mut places = vec![Place::Infinity];
    for c in x.iter().filter(|c| !c.is_zero()) {
        places.extend(support(c).into_iter().skip(1));
    }
    places.sort();
    places.dedup();
    places
        .iter()
        .map(|v| x.iter().map(|c| abs_value(c, v)).fold(Rational::one(), |m, a| m.max(a)))
        .product()
}

/// Height of an integer vector, which is its max norm.
pub fn height_integer_vector(x: &[BigInt]) -> BigInt {
    max_norm(x).max(BigInt::one())
}

pub fn max_norm(x: &[BigInt]) -> BigInt {
    x.iter().map(|c| c.abs()).max().unwrap_or_default()
}

/// `max(|x|, |y|)` for a rational in lowest terms `x/y`.
pub fn height_rational(x: &Rational) -> BigInt {
    x.numer().abs().max(x.denom().clone())
}

pub fn gcd_all(x: &[BigInt]) -> BigInt {
    x.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Certified `|L(x)|_v` for a linear form with coefficients in a number field.
///
/// At finite places the coefficients must be rational. The result is exact whenever `L(x)`
/// is rational, otherwise an enclosure of width at most `2^-bits`.
pub fn eval_linear_form(coeffs: &[NfElem], x: &[BigInt], v: &Place, bits: u32) -> Result<RealEnclosure> {
    if coeffs.len() != x.len() {
        return Err(Error::InvalidInput("form and vector lengths differ".into()));
    }
    let value = NfElem::dot_integer(coeffs, x);
    match v {
        Place::Prime(_) => match value.as_rational() {
            Some(r) => Ok(RealEnclosure::exact(abs_value(&r, v))),
            None => Err(Error::InvalidInput("irrational coefficient at a finite place".into())),
        },
        Place::Infinity => value.abs_enclosure_width(bits),
    }
}
