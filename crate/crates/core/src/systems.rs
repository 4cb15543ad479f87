//! Systems `|L_i^(v)(x)|_v <= C_v·H(x)^(c_iv)` over the rationals: validation of the technical
//! conditions, certified membership, and complete enumeration of integer solutions in a box.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::enclosure::pow_rational;
use crate::arith::{abs_value, eval_linear_form, max_norm, NfElem, NumberField, Place, Rational, RealEnclosure};
use crate::bounds::{large_threshold, Threshold};
use crate::error::{Error, Result, Violation, ViolationKind};
use crate::linalg::det;
use crate::report::{ser_display, ser_display_vec};
use crate::roth::SizeClass;

/// The forms, exponents and constant attached to one place.
#[derive(Clone, Debug)]
pub struct PlaceBlock {
    pub place: Place,
    pub forms: Vec<Vec<NfElem>>,
    pub exponents: Vec<Rational>,
    pub constant: Rational,
}

/// Bounds on coefficient heights `H`, coefficient degrees `D` and the number `R` of distinct forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemMeta {
    #[serde(serialize_with = "ser_display")]
    pub h: Rational,
    pub d: u32,
    pub r: u32,
}

#[derive(Clone, Debug)]
pub struct FormSystem {
    pub n: usize,
    pub delta: Rational,
    /// Field generated over ℚ by the coefficients, when any is irrational.
    pub field: Option<Arc<NumberField>>,
    pub blocks: Vec<PlaceBlock>,
    pub meta: SystemMeta,
}

impl FormSystem {
    /// Builds a system. Missing metadata defaults to the smallest admissible values: `H` is the
    /// ceiling of the largest coefficient height, `D` the largest coefficient degree and `R` the
    /// number of distinct forms.
    pub fn new(
        n: usize,
        delta: Rational,
        field: Option<Arc<NumberField>>,
        blocks: Vec<PlaceBlock>,
        meta: Option<SystemMeta>,
    ) -> Result<FormSystem> {
        let meta = match meta {
            Some(m) => m,
            None => default_meta(&blocks)?,
        };
        Ok(FormSystem { n, delta, field, blocks, meta })
    }

    pub fn places(&self) -> Vec<Place> {
        self.blocks.iter().map(|b| b.place.clone()).collect()
    }

    pub fn block(&self, place: &Place) -> Option<&PlaceBlock> {
        self.blocks.iter().find(|b| &b.place == place)
    }

    /// `max(H, n^(2n/δ))`, the least height of a large solution.
    pub fn large_threshold(&self) -> Result<Threshold> {
        large_threshold(self.n as u32, &self.delta, &self.meta.h)
    }

    /// The system with `δ` replaced; exponents are left untouched.
    pub fn with_delta(&self, delta: Rational) -> FormSystem {
        FormSystem { delta, ..self.clone() }
    }
}

fn default_meta(blocks: &[PlaceBlock]) -> Result<SystemMeta> {
    let mut h = Rational::one();
    let mut d = 1u32;
    for c in blocks.iter().flat_map(|b| b.forms.iter().flatten()) {
        h = h.max(Rational::from_integer(c.height()?.ceil()?));
        d = d.max(c.degree() as u32);
    }
    Ok(SystemMeta { h, d, r: distinct_forms(blocks) as u32 })
}

fn distinct_forms(blocks: &[PlaceBlock]) -> usize {
    let set: BTreeSet<Vec<Vec<Rational>>> = blocks
        .iter()
        .flat_map(|b| b.forms.iter())
        .map(|f| f.iter().map(|c| c.coefficients().to_vec()).collect())
        .collect();
    set.len()
}

fn violation(condition: ViolationKind, detail: String) -> Violation {
    Violation { condition, detail }
}

/// `s(v)`: 1 at the infinite place and 0 at primes.
pub fn s_of(place: &Place) -> Rational {
    if place.is_infinite() {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// Every violated technical condition; empty means the system is admissible.
pub fn validate_system(sys: &FormSystem) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    let n = sys.n;
    if n < 2 {
        out.push(violation(ViolationKind::Shape, format!("dimension {n} must be at least 2")));
    }
    if !sys.delta.is_positive() || sys.delta > Rational::one() {
        out.push(violation(ViolationKind::DeltaRange, format!("delta = {} must lie in (0, 1]", sys.delta)));
    }
    if sys.block(&Place::Infinity).is_none() {
        out.push(violation(ViolationKind::MissingInfinitePlace, "the infinite place must be present".into()));
    }
    let mut seen = BTreeSet::new();
    for b in &sys.blocks {
        if !seen.insert(b.place.clone()) {
            out.push(violation(ViolationKind::DuplicatePlace, format!("place {} appears twice", b.place)));
        }
    }
    let mut shape_ok = true;
    for b in &sys.blocks {
        if b.forms.len() != n || b.forms.iter().any(|f| f.len() != n) || b.exponents.len() != n {
            out.push(violation(
                ViolationKind::Shape,
                format!("place {} needs {n} forms with {n} coefficients and {n} exponents", b.place),
            ));
            shape_ok = false;
        }
        if !b.constant.is_positive() {
            out.push(violation(ViolationKind::ConstantProduct, format!("constant at {} must be positive", b.place)));
        }
    }
    if !shape_ok || n == 0 {
        return Ok(out);
    }
    let h_pow = |deg: usize| pow_rational(&sys.meta.h, deg as i64);
    for b in &sys.blocks {
        for (i, form) in b.forms.iter().enumerate() {
            for (j, c) in form.iter().enumerate() {
                if !b.place.is_infinite() && c.as_rational().is_none() {
                    out.push(violation(
                        ViolationKind::IrrationalFiniteCoefficient,
                        format!("coefficient ({i}, {j}) at {} is irrational", b.place),
                    ));
                    continue;
                }
                let deg = c.degree();
                if deg as u32 > sys.meta.d {
                    out.push(violation(ViolationKind::CoefficientDegree, format!("coefficient {c} has degree {deg} > D = {}", sys.meta.d)));
                }
                // H(α) <= H  iff  M(α) <= H^deg
                let m = crate::arith::complex_roots::mahler_measure(&c.minimal_polynomial())?;
                if m.cmp_rational(&h_pow(deg))? == Ordering::Greater {
                    out.push(violation(ViolationKind::CoefficientHeight, format!("coefficient {c} has height above H = {}", sys.meta.h)));
                }
            }
        }
    }
    let distinct = distinct_forms(&sys.blocks);
    if distinct as u32 > sys.meta.r {
        out.push(violation(ViolationKind::DistinctForms, format!("{distinct} distinct forms exceed R = {}", sys.meta.r)));
    }
    for b in &sys.blocks {
        let s = s_of(&b.place);
        let max = b.exponents.iter().max().cloned().unwrap_or_default();
        if max != s {
            out.push(violation(ViolationKind::MaxExponent, format!("max exponent at {} is {max}, expected {s}", b.place)));
        }
    }
    let total: Rational = sys.blocks.iter().flat_map(|b| b.exponents.iter()).sum();
    if total > -sys.delta.clone() {
        out.push(violation(ViolationKind::ExponentSum, format!("exponent sum {total} exceeds -delta = {}", -sys.delta.clone())));
    }
    // (∏ C_v)^n <= ∏ |det_v|_v
    let mut dets = NfElem::one();
    let mut dependent = false;
    for b in &sys.blocks {
        let d = det(&b.forms);
        if d.is_zero() {
            out.push(violation(ViolationKind::DependentForms, format!("forms at {} are linearly dependent", b.place)));
            dependent = true;
            continue;
        }
        dets = match &b.place {
            Place::Infinity => dets.mul(&d.abs()?),
            p => dets.scale(&abs_value(&d.as_rational().unwrap_or_default(), p)),
        };
    }
    let c_prod: Rational = sys.blocks.iter().map(|b| b.constant.clone()).product();
    if !dependent && c_prod.is_positive() && dets.cmp_rational(&pow_rational(&c_prod, n as i64))? == Ordering::Less {
        out.push(violation(
            ViolationKind::ConstantProduct,
            format!("product of constants {c_prod} exceeds the n-th root of the determinant product"),
        ));
    }
    Ok(out)
}

/// Fails with [`Error::InvalidSystem`] unless every condition holds.
pub fn ensure_valid(sys: &FormSystem) -> Result<()> {
    let v = validate_system(sys)?;
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidSystem(v))
    }
}

/// `|L(x)|_v` at one place and form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormValue {
    #[serde(serialize_with = "ser_display")]
    pub place: Place,
    pub index: usize,
    #[serde(serialize_with = "ser_display")]
    pub value: RealEnclosure,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionRecord {
    #[serde(serialize_with = "ser_display_vec")]
    pub x: Vec<BigInt>,
    #[serde(serialize_with = "ser_display")]
    pub height: BigInt,
    pub values: Vec<FormValue>,
    pub size_class: SizeClass,
}

/// A candidate whose membership could not be decided within the precision cap.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryCandidate {
    #[serde(serialize_with = "ser_display_vec")]
    pub x: Vec<BigInt>,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Enumeration {
    #[serde(serialize_with = "ser_display")]
    pub bound: BigInt,
    pub solutions: Vec<SolutionRecord>,
    pub boundary: Vec<BoundaryCandidate>,
}

/// `|value|_v <= C·H^c`, decided exactly as `|value|_v^b <= C^b·H^a` for `c = a/b`.
fn form_holds(value: &NfElem, place: &Place, constant: &Rational, exponent: &Rational, h: &BigInt) -> Result<bool> {
    let b = exponent.denom().to_u32().ok_or_else(|| Error::InvalidInput("exponent denominator too large".into()))?;
    let a = exponent.numer().to_i64().ok_or_else(|| Error::InvalidInput("exponent numerator too large".into()))?;
    let rhs = pow_rational(constant, b as i64) * pow_rational(&Rational::from_integer(h.clone()), a);
    if let Some(r) = value.as_rational() {
        return Ok(pow_rational(&abs_value(&r, place), b as i64) <= rhs);
    }
    if !place.is_infinite() {
        return Err(Error::InvalidInput("irrational value at a finite place".into()));
    }
    let e = value.enclosure(64);
    let (l, u) = (e.lower().abs(), e.upper().abs());
    let straddles = e.lower().is_negative() != e.upper().is_negative() || e.lower().is_zero() || e.upper().is_zero();
    let near = if straddles { Rational::zero() } else { l.clone().min(u.clone()) };
    if pow_rational(&near, b as i64) > rhs {
        return Ok(false);
    }
    if pow_rational(&l.max(u), b as i64) < rhs {
        return Ok(true);
    }
    let abs = value.abs()?;
    Ok(abs.pow(b).cmp_rational(&rhs)? != Ordering::Greater)
}

/// Certified membership of `x` in the solution set, with `H(x)` the max norm.
pub fn is_solution(sys: &FormSystem, x: &[BigInt]) -> Result<bool> {
    if x.len() != sys.n || x.iter().all(Zero::is_zero) {
        return Ok(false);
    }
    let h = max_norm(x);
    for b in &sys.blocks {
        for (form, c) in b.forms.iter().zip(&b.exponents) {
            if !form_holds(&NfElem::dot_integer(form, x), &b.place, &b.constant, c, &h)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Large iff `H(x) >= max(H, n^(2n/δ))`.
pub fn classify_size(rec: &SolutionRecord, sys: &FormSystem) -> Result<SizeClass> {
    classify_height(&rec.height, sys)
}

pub fn classify_height(h: &BigInt, sys: &FormSystem) -> Result<SizeClass> {
    Ok(if sys.large_threshold()?.is_reached_by(&Rational::from_integer(h.clone()))? {
        SizeClass::Large
    } else {
        SizeClass::Small
    })
}

/// Builds the record of a verified solution.
pub fn solution_record(sys: &FormSystem, x: Vec<BigInt>) -> Result<SolutionRecord> {
    let height = max_norm(&x);
    let mut values = Vec::new();
    for b in &sys.blocks {
        for (i, form) in b.forms.iter().enumerate() {
            values.push(FormValue { place: b.place.clone(), index: i, value: eval_linear_form(form, &x, &b.place, 64)? });
        }
    }
    let size_class = classify_height(&height, sys)?;
    Ok(SolutionRecord { x, height, values, size_class })
}

/// Fixed-point enclosures of the tightest archimedean form, used to solve for one coordinate.
struct Pruner {
    pivot: usize,
    lo: Vec<BigInt>,
    hi: Vec<BigInt>,
    /// `C·B^max(c, 0)·2^SHIFT`, an upper bound for `|L(x)|·2^SHIFT` on solutions in the box.
    reach: Rational,
    /// `(C·2^SHIFT)^b` and `(a, b)` for the exponent `c = a/b` of the tightest form.
    scaled_constant: Rational,
    exponent: (i64, u32),
}

const SHIFT: u32 = 64;

impl Pruner {
    fn new(sys: &FormSystem, bound: &BigInt) -> Option<Pruner> {
        let b = sys.block(&Place::Infinity)?;
        let (idx, c) = b.exponents.iter().enumerate().min_by(|a, b| a.1.cmp(b.1))?;
        let form = &b.forms[idx];
        let scale = Rational::from_integer(BigInt::one() << SHIFT);
        let encs: Vec<RealEnclosure> = form.iter().map(|a| a.enclosure(SHIFT + 8)).collect();
        let lo: Vec<BigInt> = encs.iter().map(|e| (e.lower() * &scale).floor().to_integer()).collect();
        let hi: Vec<BigInt> = encs.iter().map(|e| (e.upper() * &scale).ceil().to_integer()).collect();
        let pivot = (0..form.len())
            .filter(|&j| lo[j].is_positive() || hi[j].is_negative())
            .max_by_key(|&j| lo[j].abs().min(hi[j].abs()))?;
        let growth = if c.is_positive() {
            pow_rational(&Rational::from_integer(bound.clone()), c.ceil().to_integer().to_i64()?)
        } else {
            Rational::one()
        };
        let exponent = (c.numer().to_i64()?, c.denom().to_u32()?);
        let scaled_constant = pow_rational(&(&b.constant * &scale), exponent.1 as i64);
        Some(Pruner { pivot, lo, hi, reach: &b.constant * growth * scale, scaled_constant, exponent })
    }

    /// False when the tightest form certainly exceeds `C·H(x)^c` at `x`.
    fn screen(&self, x: &[BigInt], h: &BigInt) -> bool {
        let (mut v_lo, mut v_hi) = (BigInt::zero(), BigInt::zero());
        for (j, xj) in x.iter().enumerate() {
            let (a, b) = (xj * &self.lo[j], xj * &self.hi[j]);
            if a <= b {
                v_lo += a;
                v_hi += b;
            } else {
                v_lo += b;
                v_hi += a;
            }
        }
        let near = if v_lo.is_positive() {
            v_lo
        } else if v_hi.is_negative() {
            -v_hi
        } else {
            return true;
        };
        let (a, b) = self.exponent;
        let lhs = pow_rational(&Rational::from_integer(near), b as i64) * pow_rational(&Rational::from_integer(h.clone()), -a);
        lhs <= self.scaled_constant
    }

    /// Range of the pivot coordinate compatible with the other coordinates of `x`.
    fn pivot_range(&self, x: &[BigInt]) -> (BigInt, BigInt) {
        let (mut r_lo, mut r_hi) = (BigInt::zero(), BigInt::zero());
        for (j, xj) in x.iter().enumerate() {
            if j == self.pivot || xj.is_zero() {
                continue;
            }
            let (a, b) = (xj * &self.lo[j], xj * &self.hi[j]);
            if a <= b {
                r_lo += a;
                r_hi += b;
            } else {
                r_lo += b;
                r_hi += a;
            }
        }
        let n_lo = -self.reach.clone() - Rational::from_integer(r_hi);
        let n_hi = self.reach.clone() - Rational::from_integer(r_lo);
        let (a, b) = (Rational::from_integer(self.lo[self.pivot].clone()), Rational::from_integer(self.hi[self.pivot].clone()));
        let q = [&n_lo / &a, &n_lo / &b, &n_hi / &a, &n_hi / &b];
        let min = q.iter().min().cloned().unwrap_or_default();
        let max = q.iter().max().cloned().unwrap_or_default();
        (min.floor().to_integer(), max.ceil().to_integer())
    }
}

fn is_canonical(x: &[BigInt]) -> bool {
    x.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_positive())
}

/// All nonzero integer `x` with first nonzero coordinate positive and `‖x‖ <= B` solving the
/// system, in order of height then coordinates.
///
/// The box is scanned over all coordinates but one; the remaining coordinate is confined by
/// the tightest archimedean inequality. Candidates whose membership stays undecided at the
/// precision cap are listed as boundary cases instead of solutions.
pub fn enumerate_solutions(sys: &FormSystem, bound: &BigInt) -> Result<Enumeration> {
    ensure_valid(sys)?;
    let mut out = Enumeration { bound: bound.clone(), solutions: Vec::new(), boundary: Vec::new() };
    if *bound < BigInt::one() {
        return Ok(out);
    }
    let b = bound.to_i64().ok_or_else(|| Error::InvalidInput("height bound too large to scan".into()))?;
    let n = sys.n;
    let pruner = Pruner::new(sys, bound);
    let pivot = pruner.as_ref().map_or(n - 1, |p| p.pivot);
    let free: Vec<usize> = (0..n).filter(|&j| j != pivot).collect();
    let slabs: Vec<(Vec<SolutionRecord>, Vec<BoundaryCandidate>)> = (-b..=b)
        .into_par_iter()
        .map(|first| -> Result<(Vec<SolutionRecord>, Vec<BoundaryCandidate>)> {
            let mut sols = Vec::new();
            let mut edge = Vec::new();
            let mut x = vec![BigInt::zero(); n];
            x[free[0]] = BigInt::from(first);
            let mut rest = vec![-b; free.len() - 1];
            loop {
                for (k, &j) in free[1..].iter().enumerate() {
                    x[j] = BigInt::from(rest[k]);
                }
                let (lo, hi) = match &pruner {
                    Some(p) => {
                        let (lo, hi) = p.pivot_range(&x);
                        (lo.max(BigInt::from(-b)), hi.min(BigInt::from(b)))
                    }
                    None => (BigInt::from(-b), BigInt::from(b)),
                };
                let mut t = lo;
                while t <= hi {
                    x[pivot] = t.clone();
                    if is_canonical(&x) && pruner.as_ref().is_none_or(|p| p.screen(&x, &max_norm(&x))) {
                        match is_solution(sys, &x) {
                            Ok(true) => sols.push(solution_record(sys, x.clone())?),
                            Ok(false) => {}
                            Err(e @ Error::Undecided { .. }) => {
                                edge.push(BoundaryCandidate { x: x.clone(), reason: e.to_string() })
                            }
                            Err(e) => return Err(e),
                        }
                    }
                    t += 1;
                }
                // odometer over the remaining free coordinates
                let mut k = 0;
                while k < rest.len() && rest[k] == b {
                    rest[k] = -b;
                    k += 1;
                }
                if k == rest.len() {
                    break;
                }
                rest[k] += 1;
            }
            Ok((sols, edge))
        })
        .collect::<Result<_>>()?;
    for (s, e) in slabs {
        out.solutions.extend(s);
        out.boundary.extend(e);
    }
    out.solutions.sort_by(|a, b| a.height.cmp(&b.height).then_with(|| a.x.cmp(&b.x)));
    out.boundary.sort_by(|a, b| max_norm(&a.x).cmp(&max_norm(&b.x)).then_with(|| a.x.cmp(&b.x)));
    Ok(out)
}
