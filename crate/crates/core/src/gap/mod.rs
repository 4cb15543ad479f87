//! Gap principles: solutions in a height window `[Q, Q^(1+δ/2n))` beyond `n^(2n/δ)` lie in one
//! proper subspace, and solutions in `[Q, 2Q^(1+δ/2n))` split into boundedly many classes each
//! spanning a proper subspace.

pub mod cover;
pub mod intervals;
pub mod partition;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::enclosure::pow_rational;
use crate::arith::{abs_value, int, NfElem, Place, Power, Rational, Real};
use crate::error::{Error, Result};
use crate::linalg::{det, det_integer, to_rational_rows, Subspace};
use crate::report::{ser_display, ser_rational};
use crate::systems::{FormSystem, SolutionRecord};

pub use crate::bounds::{small_bound, SmallBound};
pub use cover::{subspace_cover, CoverReport, Pullback};
pub use intervals::{covering_intervals, Coverings, Window};
pub use partition::{
    class_count_bound, parse_partition_parameter, partition_assign, verify_class_determinant, ClassCounts, Grid,
    PartitionClass, PartitionParameter,
};

/// Most `n`-tuples whose determinant is recomputed when certifying a span.
pub const CERTIFY_LIMIT: usize = 2000;

/// Recomputes `det(x_1, …, x_n) = 0` for up to [`CERTIFY_LIMIT`] tuples in lexicographic order
/// and returns how many were checked.
pub fn certify_dependent(vectors: &[Vec<BigInt>], n: usize) -> Result<usize> {
    let mut checked = 0;
    for t in cover::combinations(vectors.len(), n).take(CERTIFY_LIMIT) {
        let rows: Vec<Vec<BigInt>> = t.iter().map(|&i| vectors[i].clone()).collect();
        if !det_integer(&rows).is_zero() {
            return Err(Error::Violation(format!("vectors {t:?} of one cluster have nonzero determinant")));
        }
        checked += 1;
    }
    Ok(checked)
}

fn span_of(n: usize, vectors: &[Vec<BigInt>]) -> Subspace {
    Subspace::span(n, &to_rational_rows(vectors))
}

/// `∏_v C_vⁿ / |det(L_1^(v), …, L_n^(v))|_v`.
pub fn determinant_factor(sys: &FormSystem) -> Result<Real> {
    let mut out = Real::integer(1);
    for b in &sys.blocks {
        let d = det(&b.forms);
        if d.is_zero() {
            return Err(Error::InvalidInput(format!("forms at {} are linearly dependent", b.place)));
        }
        let abs = match &b.place {
            Place::Infinity => d.abs()?.to_real(),
            p => Real::rational(abs_value(&d.as_rational().unwrap_or_default(), p)),
        };
        out = out.mul(&Real::rational(pow_rational(&b.constant, sys.n as i64))).div(&abs);
    }
    Ok(out)
}

fn exponent_total(sys: &FormSystem) -> Rational {
    sys.blocks.iter().flat_map(|b| b.exponents.iter()).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowReport {
    #[serde(serialize_with = "ser_rational")]
    pub q: Rational,
    /// `Q^(1+δ/2n)`.
    #[serde(serialize_with = "ser_display")]
    pub upper: Power,
    /// Whether `Q >= n^(2n/δ)`, where a proper span is guaranteed.
    pub threshold_met: bool,
    #[serde(serialize_with = "crate::report::ser_display_vec_vec")]
    pub members: Vec<Vec<BigInt>>,
    pub subspace: Subspace,
    pub certified_tuples: usize,
    /// `n^(n/2)·∏_v(C_vⁿ/Δ_v)·Q^(δ/2 + Σc)`, which must be below 1 past the threshold.
    pub chain_bound: Option<String>,
}

/// The solutions with `Q <= H(x) < Q^(1+δ/2n)` and their span.
///
/// Past `Q >= n^(2n/δ)` a full span, or a determinant chain bound of at least 1, is reported as
/// [`Error::Violation`]. Below the threshold the span is reported as is.
pub fn window_subspace(sys: &FormSystem, solutions: &[SolutionRecord], q: &Rational) -> Result<WindowReport> {
    let n = sys.n;
    if *q < Rational::one() {
        return Err(Error::InvalidInput("Q must be at least 1".into()));
    }
    let upper = Power::new(q.clone(), Rational::one() + &sys.delta / int(2 * n as i64))?;
    let threshold = Power::new(int(n as i64), int(2 * n as i64) / &sys.delta)?;
    let threshold_met = threshold.cmp_rational(q)? != Ordering::Greater;
    let mut members = Vec::new();
    for s in solutions {
        let h = Rational::from_integer(s.height.clone());
        if h >= *q && upper.cmp_rational(&h)? == Ordering::Greater {
            members.push(s.x.clone());
        }
    }
    let subspace = span_of(n, &members);
    let mut chain_bound = None;
    if threshold_met {
        let chain = Power::new(int(n as i64), Rational::new(BigInt::from(n), BigInt::from(2)))?
            .to_real()?
            .mul(&determinant_factor(sys)?)
            .mul(&Power::new(q.clone(), &sys.delta / int(2) + exponent_total(sys))?.to_real()?);
        if chain.cmp_rational(&Rational::one())? != Ordering::Less {
            return Err(Error::Violation(format!("determinant chain bound {} is not below 1", crate::report::render_real(&chain))));
        }
        chain_bound = Some(crate::report::render_real(&chain));
        if subspace.is_full() {
            return Err(Error::Violation(format!("{} solutions in the window starting at {q} span the whole space", members.len())));
        }
    }
    let certified_tuples = if subspace.is_full() { 0 } else { certify_dependent(&members, n)? };
    Ok(WindowReport { q: q.clone(), upper, threshold_met, members, subspace, certified_tuples, chain_bound })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassSpan {
    #[serde(serialize_with = "ser_display")]
    pub class: PartitionClass,
    #[serde(serialize_with = "crate::report::ser_display_vec_vec")]
    pub members: Vec<Vec<BigInt>>,
    pub subspace: Subspace,
    pub certified_tuples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SmallClassReport {
    #[serde(serialize_with = "ser_rational")]
    pub q: Rational,
    pub grid: Grid,
    pub classes: Vec<ClassSpan>,
    /// `200ⁿ`.
    #[serde(serialize_with = "ser_display")]
    pub class_bound: BigInt,
}

/// Groups the solutions with `Q <= H(x) < 2Q^(1+δ/2n)` by the class of
/// `φ(x) = (Q^(-c_i)·L_i(x))_i` at the infinite place, with `M = (9/2)^(n/2)`, and spans each
/// class. A full span is reported as [`Error::Violation`].
pub fn small_solution_classes(sys: &FormSystem, solutions: &[SolutionRecord], q: &Rational) -> Result<SmallClassReport> {
    let n = sys.n;
    if *q < Rational::one() {
        return Err(Error::InvalidInput("Q must be at least 1".into()));
    }
    let inf = sys.block(&Place::Infinity).ok_or_else(|| Error::InvalidInput("the infinite place is missing".into()))?;
    let grid = Grid::new(n, &PartitionParameter::for_small_solutions(n))?;
    let upper = Power::new(q.clone(), Rational::one() + &sys.delta / int(2 * n as i64))?;
    let mut members = Vec::new();
    for s in solutions {
        let h = Rational::from_integer(s.height.clone());
        if h >= *q && upper.cmp_rational(&(h / int(2)))? == Ordering::Greater {
            members.push(s.x.clone());
        }
    }
    let classes: Vec<PartitionClass> = members
        .par_iter()
        .map(|x| {
            let values: Vec<NfElem> = inf.forms.iter().map(|f| NfElem::dot_integer(f, x)).collect();
            let ratio = |j: usize, i: usize| -> Result<partition::Ratio> {
                let r = values[j].div(&values[i]).ok_or_else(|| Error::Internal("division by a zero form value".into()))?;
                let p = Power::new(q.clone(), &inf.exponents[i] - &inf.exponents[j])?;
                Ok(match p.exact() {
                    Some(e) => partition::Ratio::Exact(r.scale(&e)),
                    None => partition::Ratio::Approx(r.to_real().mul(&p.to_real()?)),
                })
            };
            grid.assign_real(|i| values[i].is_zero(), ratio)
        })
        .collect::<Result<_>>()?;
    let mut groups: BTreeMap<PartitionClass, Vec<Vec<BigInt>>> = BTreeMap::new();
    for (c, x) in classes.into_iter().zip(members) {
        groups.entry(c).or_default().push(x);
    }
    let mut out = Vec::with_capacity(groups.len());
    for (class, members) in groups {
        let subspace = span_of(n, &members);
        if subspace.is_full() {
            return Err(Error::Violation(format!("class {class} spans the whole space")));
        }
        let certified_tuples = certify_dependent(&members, n)?;
        out.push(ClassSpan { class, members, subspace, certified_tuples });
    }
    Ok(SmallClassReport { q: q.clone(), grid, classes: out, class_bound: BigInt::from(200).pow(n as u32) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::systems::{enumerate_solutions, PlaceBlock};

    /// `|x_1| <= H(x)`, `|x_2| <= H(x)^(-1-δ)`: every `(k, 0)` is a solution.
    fn line_system(delta: Rational) -> FormSystem {
        let block = PlaceBlock {
            place: Place::Infinity,
            forms: vec![vec![NfElem::integer(1), NfElem::integer(0)], vec![NfElem::integer(0), NfElem::integer(1)]],
            exponents: vec![int(1), -(int(1) + &delta)],
            constant: int(1),
        };
        FormSystem::new(2, delta, None, vec![block], None).unwrap()
    }

    #[test]
    fn windows_past_threshold() {
        let sys = line_system(int(1));
        let r = window_subspace(&sys, &[], &int(16)).unwrap();
        assert!(r.subspace.is_zero() && r.threshold_met);
        let sols = enumerate_solutions(&sys, &BigInt::from(300)).unwrap().solutions;
        for q in [16, 17, 30, 100] {
            let r = window_subspace(&sys, &sols, &int(q)).unwrap();
            assert_eq!(r.subspace, Subspace::kernel(2, &[vec![int(0), int(1)]]), "window at {q}");
            assert!(r.members.len() > 1 && r.certified_tuples > 0);
            assert!(r.chain_bound.is_some());
        }
        // 16^(5/4) = 32
        assert_eq!(window_subspace(&sys, &sols, &int(16)).unwrap().members.len(), 16);
        let below = window_subspace(&sys, &sols, &int(2)).unwrap();
        assert!(!below.threshold_met && below.chain_bound.is_none() && below.members.len() == 1);
    }

    #[test]
    fn small_classes_are_proper() {
        let sys = line_system(rat(1, 2));
        let sols = enumerate_solutions(&sys, &BigInt::from(200)).unwrap().solutions;
        for q in [1, 2, 3, 5, 12] {
            let r = small_solution_classes(&sys, &sols, &int(q)).unwrap();
            assert!(!r.classes.is_empty());
            assert!(r.classes.iter().all(|c| c.subspace.dim() <= 1));
        }
        assert!(small_solution_classes(&sys, &[], &int(1)).unwrap().classes.is_empty());
    }
}
