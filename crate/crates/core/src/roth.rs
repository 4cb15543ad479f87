//! Rational approximations `|ξ - α| <= H(α)^(-2-δ)` to a real algebraic number: search,
//! size classes, the gap principle and the associated counting constants.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::enclosure::pow_rat;
use crate::arith::real::ln_ratio;
use crate::arith::real::precision_ladder;
use crate::arith::{height_rational, int, precision_cap, AlgebraicReal, NfElem, NumberField, Power, Rational, Real, RealEnclosure};
use crate::bounds::{check_delta, BoundReport, Product};
use crate::error::{Error, Result};
use crate::report::{ser_display, ser_rational};

/// Position of a rational approximation relative to `ξ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Above,
    Below,
}

/// Large solutions have height at least the threshold of their problem, small ones lie below it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeClass {
    Large,
    Small,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RothSolution {
    #[serde(serialize_with = "ser_rational")]
    pub alpha: Rational,
    #[serde(serialize_with = "ser_display")]
    pub height: BigInt,
    pub side: Side,
    /// Enclosure of `H(α)^(-2-δ) - |ξ - α|`.
    #[serde(serialize_with = "ser_display")]
    pub margin: RealEnclosure,
}

/// The window `Q <= H(α) < Q^exponent` on one side of `ξ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapWindow {
    #[serde(serialize_with = "ser_rational")]
    pub q: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub exponent: Rational,
    pub side: Side,
}

/// Two solutions sharing a gap window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapViolation {
    #[serde(serialize_with = "ser_rational")]
    pub first: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub second: Rational,
    pub window: GapWindow,
}

const MARGIN_BITS: u32 = 128;
const SCREEN_BITS: u32 = 96;

/// Exact membership test for one fixed `ξ` and `δ`.
pub struct RothChecker {
    xi: AlgebraicReal,
    theta: NfElem,
    delta: Rational,
    /// `δ = p/q`
    p: u32,
    q: u32,
    screen: (Rational, Rational),
}

impl RothChecker {
    pub fn new(xi: &AlgebraicReal, delta: &Rational) -> Result<RothChecker> {
        check_delta(delta)?;
        if xi.degree() < 2 {
            return Err(Error::InvalidInput(format!("xi = {} must be irrational", xi.as_rational().unwrap_or_default())));
        }
        let p = delta.numer().to_u32().ok_or_else(|| Error::InvalidInput("delta numerator too large".into()))?;
        let q = delta.denom().to_u32().ok_or_else(|| Error::InvalidInput("delta denominator too large".into()))?;
        let field = NumberField::new(xi.clone());
        Ok(RothChecker {
            xi: xi.clone(),
            theta: NfElem::generator(&field),
            delta: delta.clone(),
            p,
            q,
            screen: xi.refine(SCREEN_BITS),
        })
    }

    pub fn xi(&self) -> &AlgebraicReal {
        &self.xi
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn field(&self) -> &Arc<NumberField> {
        self.theta.field().expect("generator lies in its field")
    }

    /// Certified `|ξ - α|^q · H^(2q+p)` compared with 1.
    fn compare(&self, alpha: &Rational, h: &BigInt) -> Result<Ordering> {
        let scale = Rational::from_integer(h.pow(2 * self.q + self.p));
        let (lo, hi) = &self.screen;
        let (near, far) = if alpha < lo {
            (lo - alpha, hi - alpha)
        } else if alpha > hi {
            (alpha - hi, alpha - lo)
        } else {
            (Rational::zero(), (alpha - lo).max(hi - alpha))
        };
        let one = Rational::one();
        if pow_rat(&near, self.q) * &scale > one {
            return Ok(Ordering::Greater);
        }
        if pow_rat(&far, self.q) * &scale < one {
            return Ok(Ordering::Less);
        }
        let diff = self.theta.sub(&NfElem::rational(alpha.clone()));
        let lhs = diff.pow(self.q).scale(&scale);
        // even powers are nonnegative; odd ones take the sign of ξ - α
        let lhs = if self.q % 2 == 1 && diff.signum()? == Ordering::Less { lhs.neg() } else { lhs };
        lhs.cmp_rational(&one)
    }

    /// Whether `α` satisfies `|ξ - α| <= H(α)^(-2-δ)`.
    pub fn is_solution(&self, alpha: &Rational) -> Result<bool> {
        Ok(self.compare(alpha, &height_rational(alpha))?.is_le())
    }

    pub fn side(&self, alpha: &Rational) -> Side {
        match self.xi.cmp_rational(alpha) {
            Ordering::Less => Side::Above,
            _ => Side::Below,
        }
    }

    /// Enclosure of `H(α)^(-2-δ) - |ξ - α|` of width about `2^-bits`.
    pub fn margin(&self, alpha: &Rational, bits: u32) -> Result<RealEnclosure> {
        let h = Rational::from_integer(height_rational(alpha));
        let bound = Power::new(h, -(int(2) + &self.delta))?.to_real()?;
        let dist = self.xi.to_real().sub(&Real::rational(alpha.clone()));
        let dist = if self.side(alpha) == Side::Above { dist.neg() } else { dist };
        bound.sub(&dist).enclosure(bits)
    }

    fn solution(&self, alpha: Rational) -> Result<RothSolution> {
        Ok(RothSolution {
            height: height_rational(&alpha),
            side: self.side(&alpha),
            margin: self.margin(&alpha, MARGIN_BITS)?,
            alpha,
        })
    }
}

/// Whether `α` satisfies `|ξ - α| <= H(α)^(-2-δ)`.
pub fn is_solution(xi: &AlgebraicReal, alpha: &Rational, delta: &Rational) -> Result<bool> {
    RothChecker::new(xi, delta)?.is_solution(alpha)
}

/// All `α` with `H(α) <= B` satisfying `|ξ - α| <= H(α)^(-2-δ)`, sorted by height then value.
///
/// Every denominator `y <= B` is scanned. A solution `x/y` satisfies `|x - yξ| <= y^(-1-δ) <= 1`,
/// so only the integers `x` within distance 1 of `yξ` need a certified test.
pub fn scan_roth(xi: &AlgebraicReal, delta: &Rational, max_height: &BigInt) -> Result<Vec<RothSolution>> {
    let checker = RothChecker::new(xi, delta)?;
    if max_height < &BigInt::one() {
        return Ok(Vec::new());
    }
    let b = max_height.to_u64().ok_or_else(|| Error::InvalidInput("height bound too large to scan".into()))?;
    let (lo, hi) = checker.screen.clone();
    let found: Vec<Vec<Rational>> = (1..=b)
        .into_par_iter()
        .map(|y| -> Result<Vec<Rational>> {
            let yr = Rational::from_integer(BigInt::from(y));
            let first = (&yr * &lo - Rational::one()).ceil().to_integer();
            let last = (&yr * &hi + Rational::one()).floor().to_integer();
            let mut out = Vec::new();
            let mut x = first;
            while x <= last {
                if x.abs() <= *max_height && x.gcd(&BigInt::from(y)).is_one() {
                    let alpha = Rational::new(x.clone(), BigInt::from(y));
                    if checker.is_solution(&alpha)? {
                        out.push(alpha);
                    }
                }
                x += 1;
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut solutions = found
        .into_iter()
        .flatten()
        .map(|a| checker.solution(a))
        .collect::<Result<Vec<_>>>()?;
    solutions.sort_by(|a, b| a.height.cmp(&b.height).then_with(|| a.alpha.cmp(&b.alpha)));
    Ok(solutions)
}

/// Large iff `H(α) >= max(H(ξ), 2)`, decided as `H(α)^d >= M(ξ)` with `M` the Mahler measure.
pub fn classify_solution(s: &RothSolution, xi: &AlgebraicReal) -> Result<SizeClass> {
    classify_height(&s.height, xi)
}

pub fn classify_height(h: &BigInt, xi: &AlgebraicReal) -> Result<SizeClass> {
    if *h < BigInt::from(2) {
        return Ok(SizeClass::Small);
    }
    let d = xi.degree() as u32;
    let hd = Rational::from_integer(h.pow(d));
    let m = crate::arith::complex_roots::mahler_measure(xi.minpoly())?;
    Ok(match m.cmp_rational(&hd)? {
        Ordering::Greater => SizeClass::Small,
        _ => SizeClass::Large,
    })
}

/// Every pair of solutions on one side of `ξ` lying in a common window `Q <= H < Q^(1+δ/2)`
/// with `Q >= 2`.
///
/// Such a `Q` exists iff `H(α₁) >= 2` and `H(α₂) < H(α₁)^(1+δ/2)`, taking `Q = H(α₁)`.
pub fn audit_gap_principle(solutions: &[RothSolution], delta: &Rational) -> Result<Vec<GapViolation>> {
    let exponent = Rational::one() + delta / int(2);
    let mut sorted: Vec<&RothSolution> = solutions.iter().collect();
    sorted.sort_by(|a, b| a.side.cmp(&b.side).then(a.height.cmp(&b.height)).then(a.alpha.cmp(&b.alpha)));
    let two = BigInt::from(2);
    let mut out = Vec::new();
    for (i, s1) in sorted.iter().enumerate() {
        if s1.height < two {
            continue;
        }
        let reach = Power::new(Rational::from_integer(s1.height.clone()), exponent.clone())?;
        for s2 in &sorted[i + 1..] {
            if s2.side != s1.side || reach.cmp_rational(&Rational::from_integer(s2.height.clone()))?.is_le() {
                break;
            }
            out.push(GapViolation {
                first: s1.alpha.clone(),
                second: s2.alpha.clone(),
                window: GapWindow { q: Rational::from_integer(s1.height.clone()), exponent: exponent.clone(), side: s1.side },
            });
        }
    }
    Ok(out)
}

/// `⌈1 + 2·log E / log(1 + δ/2)⌉`, the number of solutions with heights in `[Q, Q^E)`.
pub fn window_count(e: &Rational, delta: &Rational) -> Result<BigInt> {
    check_delta(delta)?;
    if *e <= Rational::one() {
        return Err(Error::InvalidInput(format!("E = {e} must exceed 1")));
    }
    let ratio = ln_ratio(e, &(Rational::one() + delta / int(2)))?;
    Real::integer(1).add(&ratio.scale(&int(2))).ceil()
}

#[derive(Clone, Debug, Serialize)]
pub struct RothBounds {
    pub large_bound: BoundReport,
    pub small_bound: BoundReport,
    #[serde(serialize_with = "ser_display")]
    pub m: BigInt,
    #[serde(serialize_with = "ser_rational")]
    pub omega: Rational,
    /// `log C`; absent when `C = 0`, which happens for `d = 1`.
    #[serde(serialize_with = "crate::report::ser_option_display")]
    pub c_log: Option<RealEnclosure>,
}

/// Counting constants for an algebraic number of degree `d` and height `H(ξ)`:
/// `2²⁵δ⁻³ log 2d · log(δ⁻¹ log 2d)` large solutions, `10δ⁻¹ log log max(H(ξ), 4)` small ones,
/// `m = 1 + [25600δ⁻² log 2d]`, `ω = 162m²δ⁻¹` and
/// `log C` with `C = 3m·binom(d,2)·δ⁻¹·(240m²δ⁻¹)^m·log 36H(ξ)`.
pub fn roth_bounds(d: u32, delta: &Rational, h_xi: &Real, bits: u32) -> Result<RothBounds> {
    check_delta(delta)?;
    if d == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let inv = delta.recip();
    let ins = |extra: &[(&str, String)]| {
        let mut m: std::collections::BTreeMap<String, String> =
            [("d".to_string(), d.to_string()), ("delta".to_string(), delta.to_string())].into_iter().collect();
        m.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
        m
    };
    let log2d = Real::ln_of(&int(2 * d as i64))?;
    let large = Product::new(int(1 << 25) * &inv * &inv * &inv).times(log2d.clone()).times(log2d.scale(&inv).ln());
    let (value, out_of_range) = large.evaluate(bits)?;
    let large_bound = BoundReport { name: "roth_large".into(), value, inputs: ins(&[]), out_of_range };

    let h4 = h_xi.max(&Real::integer(4));
    let small = Product::new(int(10) * &inv).times(h4.ln().ln());
    let (value, out_of_range) = small.evaluate(bits)?;
    let small_bound = BoundReport {
        name: "roth_small".into(),
        value,
        inputs: ins(&[("H_xi", crate::report::render_real(h_xi))]),
        out_of_range,
    };

    let m = BigInt::one() + log2d.scale(&(int(25600) * &inv * &inv)).floor()?;
    let mr = Rational::from_integer(m.clone());
    let omega = int(162) * &mr * &mr * &inv;
    let binom = Rational::from_integer(BigInt::from(d as u64 * (d as u64).saturating_sub(1) / 2));
    let c_log = if binom.is_zero() {
        None
    } else {
        let head = Real::ln_of(&(int(3) * &mr * &binom * &inv))?;
        let tail = Real::ln_of(&(int(240) * &mr * &mr * &inv))?.scale(&mr);
        let last = h_xi.scale(&int(36)).ln().ln();
        Some(head.add(&tail).add(&last).enclosure(bits)?)
    };
    Ok(RothBounds { large_bound, small_bound, m, omega, c_log })
}

/// Convergents `p/q` of the continued fraction of `ξ` with `q <= max_den`.
///
/// Each partial quotient is certified: the isolating interval is refined until the
/// complete quotient is known to lie strictly between consecutive integers.
pub fn convergents(xi: &AlgebraicReal, max_den: &BigInt) -> Result<Vec<Rational>> {
    if xi.degree() < 2 {
        return Err(Error::InvalidInput("continued fractions are computed for irrational numbers".into()));
    }
    for bits in precision_ladder() {
        let (lo, hi) = xi.refine(bits);
        if let Some(out) = convergents_from_interval(lo, hi, max_den) {
            return Ok(out);
        }
    }
    Err(Error::Undecided { cap: precision_cap() })
}

/// `None` when the interval is too wide to fix all needed partial quotients.
fn convergents_from_interval(lo: Rational, hi: Rational, max_den: &BigInt) -> Option<Vec<Rational>> {
    let (mut l, mut u) = (lo, hi);
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    let mut out = Vec::new();
    loop {
        // the complete quotient is irrational and lies in [l, u]
        let a = l.floor().to_integer();
        if u > Rational::from_integer(&a + 1) {
            return None;
        }
        let p = &a * &p0 + &p1;
        let q = &a * &q0 + &q1;
        if q > *max_den {
            return Some(out);
        }
        out.push(Rational::new(p.clone(), q.clone()));
        (p1, q1, p0, q0) = (p0, q0, p, q);
        let al = Rational::from_integer(a);
        if l == al {
            return None;
        }
        (l, u) = ((u - &al).recip(), (l - &al).recip());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn sqrt2() -> AlgebraicReal {
        crate::arith::algebraic::parse_algebraic_real("poly=[-2,0,1];interval=[1,2]").unwrap()
    }

    #[test]
    fn height_one_solutions() {
        let s = scan_roth(&sqrt2(), &int(1), &BigInt::one()).unwrap();
        let alphas: Vec<Rational> = s.iter().map(|s| s.alpha.clone()).collect();
        assert_eq!(alphas, vec![int(1)]);
        assert_eq!(s[0].side, Side::Below);
        assert!(scan_roth(&sqrt2(), &int(1), &BigInt::zero()).unwrap().is_empty());
    }

    #[test]
    fn exact_boundary_is_a_solution() {
        // ξ = 1/2 + √2/8 gives |ξ - 1/2| = 2^(-5/2) = H(1/2)^(-2-1/2)
        let xi = crate::arith::algebraic::parse_algebraic_real("poly=[7,-32,32];interval=[1/2,1]").unwrap();
        let c = RothChecker::new(&xi, &rat(1, 2)).unwrap();
        assert_eq!(c.compare(&rat(1, 2), &BigInt::from(2)).unwrap(), Ordering::Equal);
        assert!(c.is_solution(&rat(1, 2)).unwrap());
    }

    #[test]
    fn classification() {
        let s = sqrt2();
        assert_eq!(classify_height(&BigInt::one(), &s).unwrap(), SizeClass::Small);
        assert_eq!(classify_height(&BigInt::from(2), &s).unwrap(), SizeClass::Large);
        // x^2 - 5x + 1: M = 4.79..., H = 2.19...
        let xi = crate::arith::algebraic::parse_algebraic_real("poly=[1,-5,1];interval=[4,5]").unwrap();
        assert_eq!(classify_height(&BigInt::from(2), &xi).unwrap(), SizeClass::Small);
        assert_eq!(classify_height(&BigInt::from(3), &xi).unwrap(), SizeClass::Large);
    }

    #[test]
    fn gap_audit_flags_constructed_pair() {
        let mk = |a: Rational| RothSolution {
            height: height_rational(&a),
            side: Side::Below,
            margin: RealEnclosure::exact(Rational::zero()),
            alpha: a,
        };
        let v = audit_gap_principle(&[mk(rat(4, 3)), mk(rat(5, 4))], &int(1)).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].window.q, int(4));
        assert!(audit_gap_principle(&[mk(rat(7, 5))], &int(1)).unwrap().is_empty());
        // 4^(3/2) = 8 is not below 8
        assert!(audit_gap_principle(&[mk(rat(4, 3)), mk(rat(8, 7))], &int(1)).unwrap().is_empty());
    }

    #[test]
    fn window_counts() {
        assert_eq!(window_count(&rat(3, 2), &int(1)).unwrap(), BigInt::from(3));
        assert_eq!(window_count(&rat(9, 4), &int(1)).unwrap(), BigInt::from(5));
        assert_eq!(window_count(&rat(1_000_001, 1_000_000), &int(1)).unwrap(), BigInt::from(2));
    }

    #[test]
    fn roth_constants() {
        let b = roth_bounds(2, &int(1), &Real::integer(2), 128).unwrap();
        assert_eq!(b.m, BigInt::from(35490));
        assert_eq!(b.omega, int(162) * int(35490) * int(35490));
        let small = match &b.small_bound.value {
            crate::bounds::BoundValue::Enclosure(e) => e.midpoint().to_f64().unwrap(),
            v => panic!("unexpected {v:?}"),
        };
        assert!((small - 10.0 * 4f64.ln().ln()).abs() < 1e-12);
        assert!(b.c_log.is_some());
        assert!(roth_bounds(1, &int(1), &Real::integer(2), 64).unwrap().c_log.is_none());
    }

    #[test]
    fn sqrt2_convergents() {
        let c = convergents(&sqrt2(), &BigInt::from(100)).unwrap();
        let expect = [rat(1, 1), rat(3, 2), rat(7, 5), rat(17, 12), rat(41, 29), rat(99, 70)];
        assert_eq!(c, expect);
    }
}
