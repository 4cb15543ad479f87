//! Real algebraic numbers given by a minimal polynomial and an isolating interval.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::complex_roots::mahler_measure;
use super::enclosure::RealEnclosure;
use super::poly::{self, eval_int_at, irreducibility, primitive_part, IntPoly, Irreducibility};
use super::real::Real;
use super::Rational;
use crate::error::{Error, Result};

/// A real root of an irreducible integer polynomial, singled out by an isolating interval.
///
/// The minimal polynomial is primitive with positive leading coefficient. The interval
/// `[lo, hi]` contains exactly one real root; for irrational numbers neither endpoint is a root.
/// Clones share a cache of the tightest interval computed so far.
#[derive(Clone)]
pub struct AlgebraicReal {
    minpoly: IntPoly,
    interval: Arc<RwLock<(Rational, Rational)>>,
}

impl PartialEq for AlgebraicReal {
    fn eq(&self, other: &Self) -> bool {
        if self.minpoly != other.minpoly {
            return false;
        }
        if Arc::ptr_eq(&self.interval, &other.interval) {
            return true;
        }
        let (a, b) = self.bounds();
        let (c, d) = other.bounds();
        // isolating intervals of the same polynomial either overlap on the same root or are disjoint
        a.max(c) <= b.min(d)
    }
}

impl Eq for AlgebraicReal {}

impl fmt::Debug for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.bounds();
        let coeffs: Vec<String> = self.minpoly.iter().map(|c| c.to_string()).collect();
        write!(f, "poly = [{}]; interval = [{lo}, {hi}]", coeffs.join(", "))
    }
}

impl AlgebraicReal {
    /// Validates and normalizes a polynomial and a closed interval holding exactly one of its roots.
    pub fn new(poly: IntPoly, lo: Rational, hi: Rational) -> Result<AlgebraicReal> {
        if lo > hi {
            return Err(Error::InvalidInput(format!("interval [{lo}, {hi}] is empty")));
        }
        let mut poly = poly;
        poly::trim_int(&mut poly);
        if poly.len() < 2 {
            return Err(Error::InvalidInput("polynomial must have degree at least 1".into()));
        }
        let minpoly = primitive_part(&poly::to_rat(&poly));
        match irreducibility(&minpoly) {
            Irreducibility::Irreducible => {}
            Irreducibility::Reducible => {
                return Err(Error::InvalidInput(format!("polynomial {minpoly:?} is reducible over Q")))
            }
            Irreducibility::Unknown => {
                return Err(Error::InvalidInput(format!(
                    "irreducibility of {minpoly:?} could not be certified by modular factor degrees"
                )))
            }
        }
        if minpoly.len() == 2 {
            let root = Rational::new(-minpoly[0].clone(), minpoly[1].clone());
            if root < lo || root > hi {
                return Err(Error::InvalidInput(format!("interval [{lo}, {hi}] misses the root {root}")));
            }
            return Ok(AlgebraicReal { minpoly, interval: Arc::new(RwLock::new((root.clone(), root))) });
        }
        let seq = poly::sturm_sequence(&poly::to_rat(&minpoly));
        // roots are irrational, so the closed and half-open counts agree
        let count = poly::count_roots(&seq, &lo, &hi);
        if count != 1 {
            return Err(Error::InvalidInput(format!(
                "interval [{lo}, {hi}] contains {count} roots of the polynomial, expected exactly 1"
            )));
        }
        Ok(AlgebraicReal { minpoly, interval: Arc::new(RwLock::new((lo, hi))) })
    }

    pub fn from_rational(r: &Rational) -> AlgebraicReal {
        let minpoly = vec![-r.numer().clone(), r.denom().clone()];
        AlgebraicReal { minpoly, interval: Arc::new(RwLock::new((r.clone(), r.clone()))) }
    }

    /// The real `k`-th root of a positive integer `m` that is not a perfect power.
    pub fn real_root_of(m: i64, k: u32) -> Result<AlgebraicReal> {
        let mut p = vec![BigInt::zero(); k as usize + 1];
        p[0] = BigInt::from(-m);
        p[k as usize] = BigInt::one();
        AlgebraicReal::new(p, Rational::zero(), Rational::from_integer(BigInt::from(m.max(1))))
    }

    pub fn minpoly(&self) -> &IntPoly {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn leading_coefficient(&self) -> &BigInt {
        self.minpoly.last().expect("nonconstant")
    }

    pub fn as_rational(&self) -> Option<Rational> {
        (self.degree() == 1).then(|| Rational::new(-self.minpoly[0].clone(), self.minpoly[1].clone()))
    }

    /// Current isolating interval.
    pub fn bounds(&self) -> (Rational, Rational) {
        self.interval.read().expect("interval lock").clone()
    }

    /// Narrows the cached interval to width at most `2^-bits` by bisection.
    pub fn refine(&self, bits: u32) -> (Rational, Rational) {
        let target = Rational::new(BigInt::one(), BigInt::one() << bits as usize);
        let (mut lo, mut hi) = self.bounds();
        if hi.clone() - &lo <= target {
            return (lo, hi);
        }
        let lo_sign = eval_int_at(&self.minpoly, &lo).is_positive();
        let two = Rational::from_integer(BigInt::from(2));
        while &hi - &lo > target {
            let mid = (&lo + &hi) / &two;
            let v = eval_int_at(&self.minpoly, &mid);
            if v.is_positive() == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut cache = self.interval.write().expect("interval lock");
        if &hi - &lo < &cache.1 - &cache.0 {
            *cache = (lo.clone(), hi.clone());
        }
        (lo, hi)
    }

    /// Enclosure of width at most `2^-bits`.
    pub fn enclosure(&self, bits: u32) -> RealEnclosure {
        let (lo, hi) = self.refine(bits);
        RealEnclosure::new(lo, hi, bits)
    }

    pub fn to_real(&self) -> Real {
        if let Some(r) = self.as_rational() {
            return Real::rational(r);
        }
        let this = self.clone();
        Real::from_fn(move |p| Ok(this.enclosure(p)))
    }

    /// Certified comparison with a rational. Never undecided for irrational values.
    pub fn cmp_rational(&self, x: &Rational) -> Ordering {
        if let Some(r) = self.as_rational() {
            return r.cmp(x);
        }
        let (lo, hi) = self.bounds();
        if *x < lo {
            return Ordering::Greater;
        }
        if *x > hi {
            return Ordering::Less;
        }
        // x lies in the interval: the root sits on the side where the sign changes
        let fx = eval_int_at(&self.minpoly, x);
        let flo = eval_int_at(&self.minpoly, &lo);
        if fx.is_positive() == flo.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    /// `H(ξ) = (a·∏ max(1, |ξ^(i)|))^(1/d)`, the absolute multiplicative height.
    pub fn height(&self) -> Result<Real> {
        if let Some(r) = self.as_rational() {
            return Ok(Real::rational(Rational::from_integer(super::height_rational(&r))));
        }
        Ok(mahler_measure(&self.minpoly)?.root(self.degree() as u32))
    }
}

/// Certified enclosure of `H(ξ)` of width at most `2^-bits`.
pub fn height_algebraic(xi: &AlgebraicReal, bits: u32) -> Result<RealEnclosure> {
    xi.height()?.enclosure_width(bits)
}

/// Parses `poly = [c0, c1, ..., cd]; interval = [lo, hi]`.
pub fn parse_algebraic_real(text: &str) -> Result<AlgebraicReal> {
    let mut poly = None;
    let mut interval = None;
    for part in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected `key = [...]`, found `{part}`")))?;
        let value = value.trim();
        let inner = value
            .strip_prefix('[')
            .and_then(|v| v.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected a bracketed list, found `{value}`")))?;
        let items: Vec<&str> = inner.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        match key.trim() {
            "poly" => {
                let coeffs = items
                    .iter()
                    .map(|s| s.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer coefficient `{s}`"))))
                    .collect::<Result<Vec<_>>>()?;
                poly = Some(coeffs);
            }
            "interval" => {
                if items.len() != 2 {
                    return Err(Error::Parse("interval needs exactly two endpoints".into()));
                }
                interval = Some((crate::config::parse_rational(items[0])?, crate::config::parse_rational(items[1])?));
            }
            other => return Err(Error::Parse(format!("unknown key `{other}`"))),
        }
    }
    let poly = poly.ok_or_else(|| Error::Parse("missing `poly`".into()))?;
    let (lo, hi) = interval.ok_or_else(|| Error::Parse("missing `interval`".into()))?;
    AlgebraicReal::new(poly, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn ip(c: &[i64]) -> IntPoly {
        c.iter().map(|&k| BigInt::from(k)).collect()
    }

    #[test]
    fn parses_and_validates() {
        let s = parse_algebraic_real("poly=[-2,0,1];interval=[1,2]").unwrap();
        assert_eq!(s.degree(), 2);
        assert!(parse_algebraic_real("poly=[-2,0,1];interval=[-2,2]").is_err());
        assert!(parse_algebraic_real("poly=[-2,0,1]").is_err());
        assert!(parse_algebraic_real("poly=[-4,0,1];interval=[1,3]").is_err());
        let half = parse_algebraic_real("poly = [-3, 2]; interval = [1, 2]").unwrap();
        assert_eq!(half.as_rational(), Some(rat(3, 2)));
        // normalization: content removed and leading coefficient made positive
        let n = AlgebraicReal::new(ip(&[4, 0, -2]), int(1), int(2)).unwrap();
        assert_eq!(n.minpoly(), &ip(&[-2, 0, 1]));
    }

    #[test]
    fn heights() {
        assert_eq!(AlgebraicReal::from_rational(&rat(3, 2)).height().unwrap().exact(), Some(&int(3)));
        let sqrt2 = AlgebraicReal::new(ip(&[-2, 0, 1]), int(1), int(2)).unwrap();
        let h = height_algebraic(&sqrt2, 60).unwrap();
        assert!(h.lower() * h.lower() <= int(2) && int(2) <= h.upper() * h.upper());
        let phi = AlgebraicReal::new(ip(&[-1, -1, 1]), int(1), int(2)).unwrap();
        let h = height_algebraic(&phi, 60).unwrap();
        // H(φ)^2 = φ = 1.6180339887...
        let sq_lo = h.lower() * h.lower();
        let sq_hi = h.upper() * h.upper();
        assert!(sq_lo < rat(16180339888, 10_000_000_000) && sq_hi > rat(16180339887, 10_000_000_000));
    }

    #[test]
    fn refinement_and_comparison() {
        let c = AlgebraicReal::real_root_of(2, 3).unwrap();
        let e = c.enclosure(50);
        assert!(e.width() <= rat(1, 1 << 50));
        assert_eq!(c.cmp_rational(&rat(126, 100)), Ordering::Less);
        assert_eq!(c.cmp_rational(&rat(125, 100)), Ordering::Greater);
        assert_eq!(c.clone(), c);
    }
}
