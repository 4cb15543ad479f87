//! Lazily refinable real numbers with certified comparison, floor and ceiling.

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::enclosure::{ln_rational, RealEnclosure};
use super::primes::factor;
use super::Rational;
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION_CAP: u32 = 4096;
const START_PRECISION: u32 = 64;

static PRECISION_CAP: AtomicU32 = AtomicU32::new(0);

/// Bit cap for adaptive refinement. Defaults to `SUBSPACE_LAB_PRECISION_CAP` or 4096.
pub fn precision_cap() -> u32 {
    match PRECISION_CAP.load(AtomicOrdering::Relaxed) {
        0 => {
            let cap = std::env::var("SUBSPACE_LAB_PRECISION_CAP")
                .ok()
                .and_then(|s| s.trim().parse::<u32>().ok())
                .filter(|&c| c >= START_PRECISION)
                .unwrap_or(DEFAULT_PRECISION_CAP);
            PRECISION_CAP.store(cap, AtomicOrdering::Relaxed);
            cap
        }
        cap => cap,
    }
}

pub fn set_precision_cap(cap: u32) {
    PRECISION_CAP.store(cap.max(START_PRECISION), AtomicOrdering::Relaxed);
}

fn ladder_from(start: u32) -> impl Iterator<Item = u32> {
    let stop = precision_cap().max(start);
    std::iter::successors(Some(start), move |&p| (p < stop).then(|| (p * 2).min(stop)))
}

/// Precisions tried by adaptive loops: 64, 128, … up to the cap.
pub fn precision_ladder() -> impl Iterator<Item = u32> {
    let cap = precision_cap();
    std::iter::successors(Some(START_PRECISION), move |&p| (p < cap).then(|| (p * 2).min(cap)))
}

type Evaluator = dyn Fn(u32) -> Result<RealEnclosure> + Send + Sync;

/// A real number given by an evaluator returning enclosures at any requested precision.
///
/// Exact rational values are kept symbolically so that arithmetic on them stays exact.
#[derive(Clone)]
pub struct Real {
    exact: Option<Rational>,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) => write!(f, "Real({r})"),
            None => match self.enclosure(64) {
                Ok(e) => write!(f, "Real({e})"),
                Err(_) => f.write_str("Real(?)"),
            },
        }
    }
}

impl From<Rational> for Real {
    fn from(r: Rational) -> Real {
        Real::rational(r)
    }
}

impl Real {
    pub fn rational(r: Rational) -> Real {
        let e = RealEnclosure::exact(r.clone());
        Real { exact: Some(r), eval: Arc::new(move |_| Ok(e.clone())) }
    }

    pub fn integer(n: i64) -> Real {
        Real::rational(Rational::from_integer(BigInt::from(n)))
    }

    /// Wraps an evaluator. It must return enclosures whose width tends to zero as the
    /// precision grows.
    pub fn from_fn(f: impl Fn(u32) -> Result<RealEnclosure> + Send + Sync + 'static) -> Real {
        Real { exact: None, eval: Arc::new(f) }
    }

    pub fn exact(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    pub fn enclosure(&self, precision: u32) -> Result<RealEnclosure> {
        (self.eval)(precision)
    }

    /// Natural logarithm of a positive rational.
    pub fn ln_of(x: &Rational) -> Result<Real> {
        if !x.is_positive() {
            return Err(Error::InvalidInput(format!("logarithm of nonpositive {x}")));
        }
        if x.is_one() {
            return Ok(Real::integer(0));
        }
        let x = x.clone();
        Ok(Real::from_fn(move |p| Ok(ln_rational(&x, p))))
    }

    fn map2(&self, other: &Real, op: fn(&RealEnclosure, &RealEnclosure) -> RealEnclosure) -> Real {
        let (a, b) = (self.clone(), other.clone());
        Real::from_fn(move |p| Ok(op(&a.enclosure(p + 2)?, &b.enclosure(p + 2)?)))
    }

    pub fn add(&self, other: &Real) -> Real {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Real::rational(a + b),
            _ => self.map2(other, |x, y| x.add(y)),
        }
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Real {
        if let Some(a) = &self.exact {
            return Real::rational(-a);
        }
        let a = self.clone();
        Real::from_fn(move |p| Ok(a.enclosure(p)?.neg()))
    }

    pub fn mul(&self, other: &Real) -> Real {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Real::rational(a * b),
            (Some(a), _) | (_, Some(a)) if a.is_zero() => Real::integer(0),
            _ => {
                let (a, b) = (self.clone(), other.clone());
                Real::from_fn(move |p| {
                    // scale the working precision by the magnitude of the factors
                    let x0 = a.enclosure(32)?;
                    let y0 = b.enclosure(32)?;
                    let extra = magnitude_bits(&x0).max(magnitude_bits(&y0));
                    let x = a.enclosure(p + 8 + extra)?;
                    let y = b.enclosure(p + 8 + extra)?;
                    Ok(x.mul(&y))
                })
            }
        }
    }

    pub fn scale(&self, r: &Rational) -> Real {
        self.mul(&Real::rational(r.clone()))
    }

    /// Reciprocal. Evaluation fails until the enclosure excludes zero.
    pub fn recip(&self) -> Real {
        if let Some(a) = &self.exact {
            if !a.is_zero() {
                return Real::rational(a.recip());
            }
        }
        let a = self.clone();
        Real::from_fn(move |p| {
            for q in ladder_from(p) {
                let x = a.enclosure(q + 8)?;
                if let Some(r) = x.recip() {
                    let extra = magnitude_bits(&r);
                    return Ok(a.enclosure(q + 8 + 2 * extra)?.recip().unwrap_or(r));
                }
            }
            Err(Error::Undecided { cap: precision_cap() })
        })
    }

    pub fn div(&self, other: &Real) -> Real {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) if !b.is_zero() => Real::rational(a / b),
            _ => self.mul(&other.recip()),
        }
    }

    pub fn ln(&self) -> Real {
        if let Some(a) = &self.exact {
            if let Ok(r) = Real::ln_of(a) {
                return r;
            }
        }
        let a = self.clone();
        Real::from_fn(move |p| {
            for q in ladder_from(p) {
                let x = a.enclosure(q + 8)?;
                if x.lower().is_positive() {
                    let extra = magnitude_bits(&x.recip().unwrap_or(x.clone()));
                    let x = a.enclosure(q + 8 + extra)?;
                    return x.ln(p + 8).ok_or(Error::Undecided { cap: precision_cap() });
                }
            }
            Err(Error::Undecided { cap: precision_cap() })
        })
    }

    pub fn powi(&self, k: i64) -> Real {
        if let Some(a) = &self.exact {
            if k >= 0 || !a.is_zero() {
                return Real::rational(super::enclosure::pow_rational(a, k));
            }
        }
        if k < 0 {
            return self.powi(-k).recip();
        }
        let a = self.clone();
        Real::from_fn(move |p| {
            let x0 = a.enclosure(32)?;
            let extra = magnitude_bits(&x0) * k.unsigned_abs().min(1 << 20) as u32 + 64 - (k.unsigned_abs().leading_zeros());
            a.enclosure(p + 8 + extra)?.powi(k).ok_or(Error::Undecided { cap: p })
        })
    }

    /// Principal `k`-th root of a nonnegative real.
    pub fn root(&self, k: u32) -> Real {
        if let Some(a) = &self.exact {
            if let Some(r) = super::enclosure::exact_root(a, k) {
                return Real::rational(r);
            }
        }
        let a = self.clone();
        Real::from_fn(move |p| {
            let x = a.enclosure(p * k + 8)?;
            let x = if x.lower().is_negative() && !x.upper().is_negative() {
                RealEnclosure::new(Rational::zero(), x.upper().clone(), x.precision())
            } else {
                x
            };
            x.root(k, p + 8).ok_or_else(|| Error::InvalidInput("root of a negative number".into()))
        })
    }

    pub fn max(&self, other: &Real) -> Real {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Real::rational(a.clone().max(b.clone())),
            _ => self.map2(other, |x, y| x.max(y)),
        }
    }

    pub fn min(&self, other: &Real) -> Real {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Real::rational(a.clone().min(b.clone())),
            _ => self.map2(other, |x, y| x.min(y)),
        }
    }

    /// Certified comparison, refining up to the precision cap.
    ///
    /// Two reals that are equal but not both exact cannot be told apart by enclosures, so
    /// such ties end in [`Error::Undecided`].
    pub fn cmp(&self, other: &Real) -> Result<Ordering> {
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            return Ok(a.cmp(b));
        }
        let diff = self.sub(other);
        for p in precision_ladder() {
            match diff.enclosure(p) {
                Ok(e) => {
                    if let Some(o) = e.certain_cmp_rational(&Rational::zero()) {
                        return Ok(o);
                    }
                }
                Err(Error::Undecided { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::Undecided { cap: precision_cap() })
    }

    pub fn cmp_rational(&self, r: &Rational) -> Result<Ordering> {
        self.cmp(&Real::rational(r.clone()))
    }

    pub fn floor(&self) -> Result<BigInt> {
        if let Some(a) = &self.exact {
            return Ok(a.floor().to_integer());
        }
        for p in precision_ladder() {
            let e = match self.enclosure(p) {
                Ok(e) => e,
                Err(Error::Undecided { .. }) => continue,
                Err(e) => return Err(e),
            };
            let lo = e.lower().floor().to_integer();
            let hi = e.upper().floor().to_integer();
            if lo == hi && !(e.upper().is_integer() && e.lower() < e.upper()) {
                return Ok(lo);
            }
        }
        Err(Error::Undecided { cap: precision_cap() })
    }

    pub fn ceil(&self) -> Result<BigInt> {
        Ok(-self.neg().floor()?)
    }

    /// An enclosure whose width is at most `2^-bits`, refining as needed.
    pub fn enclosure_width(&self, bits: u32) -> Result<RealEnclosure> {
        let target = Rational::new(BigInt::one(), BigInt::one() << bits as usize);
        let mut last = None;
        for p in precision_ladder().map(|p| p.max(bits + 8)) {
            let e = self.enclosure(p)?;
            if e.width() <= target {
                return Ok(e);
            }
            last = Some(e);
        }
        last.ok_or(Error::Undecided { cap: precision_cap() })
    }
}

/// Bits needed to represent the integer part of the largest endpoint magnitude.
pub(crate) fn magnitude_bits(e: &RealEnclosure) -> u32 {
    let m = e.lower().abs().max(e.upper().abs());
    let b = super::enclosure::log2_estimate(&m);
    b.clamp(0, 1 << 16) as u32
}

/// The real number `base^exponent` for a positive rational base and a rational exponent.
///
/// Comparisons between powers never guess: equality is decided exactly from prime
/// factorizations, and unequal values are separated by certified logarithms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Power {
    pub base: Rational,
    pub exponent: Rational,
}

impl Power {
    pub fn new(base: Rational, exponent: Rational) -> Result<Power> {
        if !base.is_positive() {
            return Err(Error::InvalidInput(format!("power base {base} must be positive")));
        }
        Ok(Power { base, exponent })
    }

    pub fn rational(x: Rational) -> Result<Power> {
        Power::new(x, Rational::one())
    }

    /// Exact value when it is rational.
    pub fn exact(&self) -> Option<Rational> {
        if self.exponent.is_integer() {
            let k = i64::try_from(self.exponent.to_integer()).ok()?;
            if k.unsigned_abs() > 1 << 16 {
                return None;
            }
            return Some(super::enclosure::pow_rational(&self.base, k));
        }
        let q = u32::try_from(self.exponent.denom()).ok()?;
        let root = super::enclosure::exact_root(&self.base, q)?;
        Power::new(root, Rational::from_integer(self.exponent.numer().clone())).ok()?.exact()
    }

    pub fn ln(&self) -> Result<Real> {
        Ok(Real::ln_of(&self.base)?.scale(&self.exponent))
    }

    pub fn to_real(&self) -> Result<Real> {
        if let Some(r) = self.exact() {
            return Ok(Real::rational(r));
        }
        let this = self.clone();
        Ok(Real::from_fn(move |p| {
            // exp is not available, so take a root of an integer power
            let q = u32::try_from(this.exponent.denom()).map_err(|_| Error::InvalidInput("exponent denominator too large".into()))?;
            let k = i64::try_from(this.exponent.numer()).map_err(|_| Error::InvalidInput("exponent numerator too large".into()))?;
            let bits = super::enclosure::log2_estimate(&this.base).unsigned_abs() * k.unsigned_abs() / q as u64;
            let base = RealEnclosure::exact(this.base.clone()).powi(k).ok_or(Error::Undecided { cap: p })?;
            base.root(q, p + 8 + bits.min(1 << 20) as u32).ok_or(Error::Undecided { cap: p })
        }))
    }

    /// Certified ordering of two powers.
    pub fn cmp(&self, other: &Power) -> Result<Ordering> {
        if let (Some(a), Some(b)) = (self.exact(), other.exact()) {
            return Ok(a.cmp(&b));
        }
        let (a, b) = (self.ln()?, other.ln()?);
        for bits in [64, 256] {
            if let Some(o) = a.enclosure(bits)?.certain_cmp(&b.enclosure(bits)?) {
                return Ok(o);
            }
        }
        // factoring is only reached when the logarithms agree to 256 bits
        if powers_equal(self, other) {
            return Ok(Ordering::Equal);
        }
        a.cmp(&b)
    }

    pub fn cmp_rational(&self, x: &Rational) -> Result<Ordering> {
        if !x.is_positive() {
            return Ok(Ordering::Greater);
        }
        self.cmp(&Power::rational(x.clone())?)
    }
}

impl fmt::Display for Power {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact() {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "{}^({})", self.base, self.exponent),
        }
    }
}

/// Exponent vector of a positive rational over its prime support.
fn prime_exponents(x: &Rational) -> Vec<(BigInt, i64)> {
    let mut out: Vec<(BigInt, i64)> = factor(x.numer()).into_iter().map(|(p, e)| (p, e as i64)).collect();
    out.extend(factor(x.denom()).into_iter().map(|(p, e)| (p, -(e as i64))));
    out.sort();
    out
}

fn powers_equal(a: &Power, b: &Power) -> bool {
    let ea = prime_exponents(&a.base);
    let eb = prime_exponents(&b.base);
    let mut primes: Vec<&BigInt> = ea.iter().chain(eb.iter()).map(|(p, _)| p).collect();
    primes.sort();
    primes.dedup();
    let get = |v: &[(BigInt, i64)], p: &BigInt| v.iter().find(|(q, _)| q == p).map_or(0, |(_, e)| *e);
    primes.into_iter().all(|p| {
        Rational::from_integer(BigInt::from(get(&ea, p))) * &a.exponent
            == Rational::from_integer(BigInt::from(get(&eb, p))) * &b.exponent
    })
}

/// The exact value of `ln a / ln b` when it is rational.
///
/// `ln a / ln b = r` holds iff the prime exponent vectors satisfy `e(a) = r·e(b)`.
pub fn log_ratio(a: &Rational, b: &Rational) -> Option<Rational> {
    if !a.is_positive() || !b.is_positive() || b.is_one() {
        return None;
    }
    let ea = prime_exponents(a);
    let eb = prime_exponents(b);
    let (p0, e0) = eb.iter().find(|(_, e)| *e != 0)?;
    let get = |v: &[(BigInt, i64)], p: &BigInt| v.iter().find(|(q, _)| q == p).map_or(0, |(_, e)| *e);
    let r = Rational::new(BigInt::from(get(&ea, p0)), BigInt::from(*e0));
    let proportional = ea.iter().chain(eb.iter()).all(|(p, _)| {
        Rational::from_integer(BigInt::from(get(&ea, p))) == &r * Rational::from_integer(BigInt::from(get(&eb, p)))
    });
    proportional.then_some(r)
}

/// `ln a / ln b` as a certified real, exact when rational.
pub fn ln_ratio(a: &Rational, b: &Rational) -> Result<Real> {
    if let Some(r) = log_ratio(a, b) {
        return Ok(Real::rational(r));
    }
    if a.is_one() {
        return Ok(Real::integer(0));
    }
    Ok(Real::ln_of(a)?.div(&Real::ln_of(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn floors_of_logs() {
        // 25600 ln 4 = 35489.03...
        let m = Real::ln_of(&int(4)).unwrap().scale(&int(25600));
        assert_eq!(m.floor().unwrap(), BigInt::from(35489));
        assert_eq!(Real::rational(rat(-3, 2)).floor().unwrap(), BigInt::from(-2));
        assert_eq!(Real::rational(rat(-3, 2)).ceil().unwrap(), BigInt::from(-1));
    }

    #[test]
    fn log_ratios_detect_rational_values() {
        assert_eq!(log_ratio(&rat(9, 4), &rat(3, 2)), Some(int(2)));
        assert_eq!(log_ratio(&int(8), &int(4)), Some(rat(3, 2)));
        assert_eq!(log_ratio(&int(6), &int(2)), None);
        assert_eq!(log_ratio(&int(1), &int(5)), Some(int(0)));
    }

    #[test]
    fn power_comparisons() {
        let a = Power::new(int(4), rat(1, 2)).unwrap();
        assert_eq!(a.exact(), Some(int(2)));
        assert_eq!(a.cmp_rational(&int(2)).unwrap(), Ordering::Equal);
        let b = Power::new(int(2), rat(3, 2)).unwrap();
        let c = Power::new(int(8), rat(1, 2)).unwrap();
        assert_eq!(b.cmp(&c).unwrap(), Ordering::Equal);
        let d = Power::new(int(3), rat(12, 1)).unwrap();
        assert_eq!(d.cmp_rational(&int(531440)).unwrap(), Ordering::Greater);
        let e = Power::new(int(2), rat(1, 3)).unwrap();
        assert_eq!(e.cmp_rational(&rat(126, 100)).unwrap(), Ordering::Less);
        let r = e.to_real().unwrap().enclosure(80).unwrap();
        let cube = |x: &Rational| x * x * x;
        assert!(cube(r.lower()) <= int(2) && int(2) <= cube(r.upper()));
        assert!(r.width() < rat(1, 1 << 40));
    }

    #[test]
    fn tie_between_irrationals_is_undecided() {
        let a = Real::ln_of(&int(2)).unwrap();
        let b = Real::ln_of(&int(4)).unwrap().scale(&rat(1, 2));
        assert!(matches!(a.cmp(&b), Err(Error::Undecided { .. })));
    }
}
