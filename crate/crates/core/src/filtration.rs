//! Slopes of subspaces with respect to a system, the exceptional subspace `U₀`, and the cubic
//! example relating solution counts to lower bounds for `|ξ - α|`.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::enclosure::pow_rational;
use crate::arith::{gcd_all, height_rational, int, max_norm, AlgebraicReal, NfElem, NumberField, Place, Power, Rational, Real};
use crate::error::{Error, Result};
use crate::linalg::{self, lll_reduce, rank, Subspace, SubspaceOver};
use crate::report::ser_rational;
use crate::systems::{self, FormSystem, PlaceBlock, SolutionRecord};

/// Default cap on the number of subspaces produced by [`vojta_closure`].
pub const DEFAULT_CLOSURE_CAP: usize = 10_000;

/// `ν_v(U)`: the least exponent sum over `dim U` forms at `v` that are independent on `U`.
///
/// Forms sorted by exponent are taken greedily while they raise the rank on `U`; for a matroid
/// this yields a minimum-weight basis.
pub fn nu_v(u: &Subspace, block: &PlaceBlock) -> Result<Rational> {
    if u.is_zero() {
        return Ok(Rational::zero());
    }
    let basis: Vec<Vec<NfElem>> = u.basis().iter().map(|r| r.iter().cloned().map(NfElem::rational).collect()).collect();
    let restrict = |form: &[NfElem]| -> Vec<NfElem> {
        basis.iter().map(|b| form.iter().zip(b).fold(NfElem::zero(), |acc, (c, x)| acc.add(&c.mul(x)))).collect()
    };
    let mut order: Vec<usize> = (0..block.forms.len()).collect();
    order.sort_by(|&a, &b| block.exponents[a].cmp(&block.exponents[b]).then(a.cmp(&b)));
    let mut chosen: Vec<Vec<NfElem>> = Vec::new();
    let mut total = Rational::zero();
    for i in order {
        if chosen.len() == u.dim() {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(restrict(&block.forms[i]));
        if rank(&trial) > chosen.len() {
            chosen = trial;
            total += &block.exponents[i];
        }
    }
    if chosen.len() < u.dim() {
        return Err(Error::Internal(format!("forms at {} are dependent on a subspace of dimension {}", block.place, u.dim())));
    }
    Ok(total)
}

/// `ν(U) = Σ_v ν_v(U)`.
pub fn nu(u: &Subspace, sys: &FormSystem) -> Result<Rational> {
    sys.blocks.iter().map(|b| nu_v(u, b)).sum()
}

/// `μ(U) = (ν(ℚⁿ) - ν(U)) / (n - dim U)` for a proper subspace.
pub fn mu(u: &Subspace, sys: &FormSystem) -> Result<Rational> {
    if u.is_full() {
        return Err(Error::InvalidInput("slope is defined for proper subspaces only".into()));
    }
    let full = nu(&Subspace::full(sys.n), sys)?;
    Ok((full - nu(u, sys)?) / int((sys.n - u.dim()) as i64))
}

/// Closure of a family of subspaces under sum and intersection, in discovery order.
pub fn vojta_closure<S: linalg::Scalar + Ord>(inputs: &[SubspaceOver<S>], cap: usize) -> Result<Vec<SubspaceOver<S>>> {
    let mut seen: BTreeSet<SubspaceOver<S>> = BTreeSet::new();
    let mut all: Vec<SubspaceOver<S>> = Vec::new();
    for s in inputs {
        if seen.insert(s.clone()) {
            all.push(s.clone());
        }
    }
    // pairs (i, j) with j < done are already combined
    let mut done = 0;
    while done < all.len() {
        let j = done;
        for i in 0..=j {
            for new in [all[i].sum(&all[j]), all[i].intersect(&all[j])] {
                if seen.insert(new.clone()) {
                    all.push(new);
                    if all.len() > cap {
                        return Err(Error::ClosureCap { cap });
                    }
                }
            }
        }
        done += 1;
    }
    Ok(all)
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateSlope {
    pub subspace: Subspace,
    #[serde(serialize_with = "ser_rational")]
    pub nu: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub mu: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiltrationReport {
    pub candidates: Vec<CandidateSlope>,
    #[serde(serialize_with = "ser_rational")]
    pub mu0: Rational,
    pub minimizers: Vec<Subspace>,
    pub u0: Subspace,
    pub semistable: bool,
    /// Set when the subspaces of least `ν` differ from those of least `μ`.
    pub nu_minimizers_differ: bool,
    /// Failed consistency checks; empty on a sound computation.
    pub diagnostics: Vec<String>,
}

/// The proper rational candidates: rational parts of the closure of the form kernels, closed
/// again under sum and intersection over ℚ, together with `(0)`.
pub fn candidate_subspaces(sys: &FormSystem, cap: usize) -> Result<Vec<Subspace>> {
    let n = sys.n;
    let kernels: Vec<SubspaceOver<NfElem>> = sys
        .blocks
        .iter()
        .flat_map(|b| b.forms.iter())
        .map(|f| SubspaceOver::kernel(n, std::slice::from_ref(f)))
        .collect();
    let closure = vojta_closure(&kernels, cap)?;
    let mut rational: Vec<Subspace> = vec![Subspace::zero(n)];
    rational.extend(closure.iter().map(|w| w.rational_part()));
    let mut out: Vec<Subspace> = vojta_closure(&rational, cap)?.into_iter().filter(|u| !u.is_full()).collect();
    out.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Computes `U₀` as the intersection of the candidates of least slope `μ₀`.
pub fn exceptional_subspace(sys: &FormSystem) -> Result<FiltrationReport> {
    exceptional_subspace_with_cap(sys, DEFAULT_CLOSURE_CAP)
}

pub fn exceptional_subspace_with_cap(sys: &FormSystem, cap: usize) -> Result<FiltrationReport> {
    systems::ensure_valid(sys)?;
    let n = sys.n;
    let full_nu = nu(&Subspace::full(n), sys)?;
    let candidates: Vec<CandidateSlope> = candidate_subspaces(sys, cap)?
        .into_par_iter()
        .map(|u| {
            let v = nu(&u, sys)?;
            let m = (&full_nu - &v) / int((n - u.dim()) as i64);
            Ok(CandidateSlope { subspace: u, nu: v, mu: m })
        })
        .collect::<Result<_>>()?;
    let mu0 = candidates.iter().map(|c| c.mu.clone()).min().ok_or_else(|| Error::Internal("no candidates".into()))?;
    let minimizers: Vec<Subspace> = candidates.iter().filter(|c| c.mu == mu0).map(|c| c.subspace.clone()).collect();
    let u0 = minimizers.iter().skip(1).fold(minimizers[0].clone(), |acc, u| acc.intersect(u));
    let mut diagnostics = Vec::new();
    let mu_u0 = mu(&u0, sys)?;
    if mu_u0 != mu0 {
        diagnostics.push(format!("slope of the intersection of minimizers is {mu_u0}, expected {mu0}"));
    }
    for c in &candidates {
        if c.mu < mu0 || (c.mu == mu0 && !u0.is_subspace_of(&c.subspace)) {
            diagnostics.push(format!("candidate of dimension {} breaks minimality or containment", c.subspace.dim()));
        }
    }
    let nu0 = candidates.iter().map(|c| c.nu.clone()).min().unwrap_or_default();
    let nu_min: BTreeSet<&Subspace> = candidates.iter().filter(|c| c.nu == nu0).map(|c| &c.subspace).collect();
    let mu_min: BTreeSet<&Subspace> = minimizers.iter().collect();
    Ok(FiltrationReport {
        semistable: u0.is_zero(),
        nu_minimizers_differ: nu_min != mu_min,
        candidates,
        mu0,
        minimizers,
        u0,
        diagnostics,
    })
}

/// Whether an LLL-reduced integer basis of `U₀` has coordinates of height at most
/// `(√n·H)^(4ⁿ)`, checked as `max|c|² <= (n·H²)^(4ⁿ)`.
pub fn check_u0_height(u0: &Subspace, sys: &FormSystem) -> Result<bool> {
    if u0.is_zero() {
        return Ok(true);
    }
    let reduced = lll_reduce(&u0.integer_basis());
    let largest = reduced.iter().map(|v| max_norm(v)).max().unwrap_or_default();
    let sq = Rational::from_integer(&largest * &largest);
    let base = int(sys.n as i64) * &sys.meta.h * &sys.meta.h;
    let exponent = BigInt::from(4).pow(sys.n as u32);
    Ok(Power::new(base, Rational::from_integer(exponent))?.cmp_rational(&sq)? != Ordering::Less)
}

/// For `U₀` cut out by equations `Σ_{j∈I} x_j = 0` over pairwise disjoint index sets, returns
/// the sets; `None` when `U₀` has another shape.
pub fn unit_sum_partition(u0: &Subspace) -> Option<Vec<Vec<usize>>> {
    let n = u0.ambient_dim();
    let eqs = Subspace::span(n, &u0.annihilator());
    // coordinates sharing an equation are merged
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for row in eqs.basis() {
        let support: Vec<usize> = (0..n).filter(|&j| !row[j].is_zero()).collect();
        for w in support.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let touched: BTreeSet<usize> = eqs.basis().iter().flat_map(|r| (0..n).filter(|&j| !r[j].is_zero())).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for j in touched {
        let root = find(&mut parent, j);
        match groups.iter_mut().find(|g| find(&mut parent, g[0]) == root) {
            Some(g) => g.push(j),
            None => groups.push(vec![j]),
        }
    }
    let indicators: Vec<Vec<Rational>> =
        groups.iter().map(|g| (0..n).map(|j| if g.contains(&j) { Rational::one() } else { Rational::zero() }).collect()).collect();
    (Subspace::span(n, &indicators) == eqs).then_some(groups)
}

/// `|x₁ + x₂ξ + x₃ξ²| <= H(x)^(-2-δ)` with the trivial inequalities `|x₂|, |x₃| <= H(x)`.
pub fn cubic_system(xi: &AlgebraicReal, delta: &Rational) -> Result<FormSystem> {
    if xi.degree() < 3 {
        return Err(Error::InvalidInput("xi must have degree at least 3".into()));
    }
    let field = NumberField::new(xi.clone());
    let t = NfElem::generator(&field);
    let (zero, one) = (NfElem::zero(), NfElem::one());
    let block = PlaceBlock {
        place: Place::Infinity,
        forms: vec![vec![one.clone(), t.clone(), t.mul(&t)], vec![zero.clone(), one.clone(), zero.clone()], vec![zero.clone(), zero, one]],
        exponents: vec![-(int(2) + delta), int(1), int(1)],
        constant: int(1),
    };
    FormSystem::new(3, delta.clone(), Some(field), vec![block], None)
}

/// `(1 + |ξ|)·|ξ - α|` as an element of `ℚ(ξ)`.
fn cubic_gap(xi: &AlgebraicReal, alpha: &Rational) -> Result<NfElem> {
    let t = NfElem::generator(&NumberField::new(xi.clone()));
    let diff = t.sub(&NfElem::rational(alpha.clone())).abs()?;
    Ok(NfElem::one().add(&t.abs()?).mul(&diff))
}

fn delta_parts(delta: &Rational) -> Result<(u32, u32)> {
    let p = delta.numer().to_u32().ok_or_else(|| Error::InvalidInput("delta numerator too large".into()))?;
    let q = delta.denom().to_u32().ok_or_else(|| Error::InvalidInput("delta denominator too large".into()))?;
    Ok((p, q))
}

/// Vectors `x` with `x₁ + x₂X + x₃X² = (u + X)(r - sX)` for `α = r/s` and each `u` in the range
/// with `max(1, |u|) <= (2^(2+δ)(1+|ξ|)·|ξ-α|·H(α)^(3+δ))^(-1/(3+δ))`.
///
/// Each vector is primitive and solves the cubic system; both facts are re-checked and a
/// failure is reported as a violation.
pub fn cubic_solutions_from_u(
    xi: &AlgebraicReal,
    delta: &Rational,
    alpha: &Rational,
    u_range: std::ops::RangeInclusive<i64>,
) -> Result<Vec<SolutionRecord>> {
    let sys = cubic_system(xi, delta)?;
    let (p, q) = delta_parts(delta)?;
    let (r, s) = (alpha.numer().clone(), alpha.denom().clone());
    let h = height_rational(alpha);
    let gap = cubic_gap(xi, alpha)?;
    let mut out = Vec::new();
    for u in u_range {
        let m = BigInt::from(u.unsigned_abs().max(1));
        // ((1+|ξ|)|ξ-α|·mH)^q · (2mH)^(2q+p) <= 1
        let mh = Rational::from_integer(&m * &h);
        let scale = pow_rational(&mh, q as i64) * pow_rational(&(int(2) * &mh), (2 * q + p) as i64);
        if gap.pow(q).scale(&scale).cmp_rational(&Rational::one())? == Ordering::Greater {
            continue;
        }
        let u = BigInt::from(u);
        let mut x = vec![&u * &r, &r - &u * &s, -s.clone()];
        if !gcd_all(&x).is_one() {
            return Err(Error::Violation(format!("constructed vector {x:?} is not primitive")));
        }
        if x.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
            x.iter_mut().for_each(|c| *c = -c.clone());
        }
        if !systems::is_solution(&sys, &x)? {
            return Err(Error::Violation(format!("constructed vector {x:?} does not solve the cubic system")));
        }
        out.push(systems::solution_record(&sys, x)?);
    }
    Ok(out)
}

/// The lower bound `|ξ - α| >= 2^(-2-δ)(1+|ξ|)^(-1)·N^(-3-δ)·H(α)^(-3-δ)` implied by a count `N`
/// of cubic-system solutions.
#[derive(Clone, Debug)]
pub struct RothLowerBound {
    pub xi: AlgebraicReal,
    pub delta: Rational,
    pub count: BigInt,
}

pub fn roth_lower_bound_from_count(xi: &AlgebraicReal, delta: &Rational, count: &BigInt) -> Result<RothLowerBound> {
    if *count < BigInt::one() {
        return Err(Error::InvalidInput("solution count must be at least 1".into()));
    }
    delta_parts(delta)?;
    Ok(RothLowerBound { xi: xi.clone(), delta: delta.clone(), count: count.clone() })
}

impl RothLowerBound {
    /// The bound at height `H(α) = h`.
    pub fn at(&self, h: &Rational) -> Result<Real> {
        let e = int(3) + &self.delta;
        let factor = Power::new(int(2), -(int(2) + &self.delta))?.to_real()?;
        let nh = Power::new(Rational::from_integer(self.count.clone()) * h, -e)?.to_real()?;
        let one_plus = Real::integer(1).add(&self.xi.to_real().max(&self.xi.to_real().neg()));
        Ok(factor.mul(&nh).div(&one_plus))
    }

    /// Certified `|ξ - α|` at least the bound at `H(α)`.
    pub fn holds_for(&self, alpha: &Rational) -> Result<bool> {
        let (p, q) = delta_parts(&self.delta)?;
        let nh = Rational::from_integer(&self.count * height_rational(alpha));
        // ((1+|ξ|)|ξ-α|)^q · 2^(2q+p) · (N·H)^(3q+p) >= 1
        let scale = pow_rational(&int(2), (2 * q + p) as i64) * pow_rational(&nh, (3 * q + p) as i64);
        let lhs = cubic_gap(&self.xi, alpha)?.pow(q).scale(&scale);
        Ok(lhs.cmp_rational(&Rational::one())? != Ordering::Less)
    }
}
