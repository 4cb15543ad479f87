//! Covering a set of rational points with bounded `n`-fold determinants by proper subspaces,
//! through the pullback to integer coordinates on the lattice they generate.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::enclosure::pow_rational;
use crate::arith::{abs_value, int, support, Place, Power, Rational, Real};
use crate::error::{Error, Result};
use crate::linalg::{det, hermite_normal_form, rref, Subspace};
use crate::report::{ser_display, ser_rational, ser_real};

/// Most `n`-subsets examined when checking determinant bounds.
pub const MAX_TUPLES: usize = 2_000_000;

/// Index `r`-subsets of `0..k` in lexicographic order.
pub fn combinations(k: usize, r: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = (r <= k).then(|| (0..r).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        let mut i = r;
        current = loop {
            if i == 0 {
                break None;
            }
            i -= 1;
            if next[i] < k - r + i {
                next[i] += 1;
                for j in i + 1..r {
                    next[j] = next[j - 1] + 1;
                }
                break Some(next);
            }
        };
        Some(out)
    })
}

pub fn binomial(k: usize, r: usize) -> BigInt {
    if r > k {
        return BigInt::zero();
    }
    (0..r).fold(BigInt::one(), |acc, i| acc * BigInt::from(k - i) / BigInt::from(i + 1))
}

/// The lattice generated by the points, with a basis and the integer coordinates of each point.
#[derive(Clone, Debug, Serialize)]
pub struct Pullback {
    #[serde(serialize_with = "ser_matrix")]
    pub basis: Vec<Vec<Rational>>,
    /// `|det|` of the basis, equal to `∏_p D_p^(-1)` over the local maxima.
    #[serde(serialize_with = "ser_rational")]
    pub determinant: Rational,
    #[serde(serialize_with = "ser_int_matrix")]
    pub coordinates: Vec<Vec<BigInt>>,
    /// Largest `|det|` of `n` pulled-back points.
    #[serde(serialize_with = "ser_display")]
    pub max_pulled_det: BigInt,
}

fn ser_matrix<S: serde::Serializer>(m: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
    serde::Serialize::serialize(&rows, s)
}

fn ser_int_matrix<S: serde::Serializer>(m: &[Vec<BigInt>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
    serde::Serialize::serialize(&rows, s)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub cover: Vec<Subspace>,
    /// `100ⁿ·D^(1/(n-1))` with `D = ∏ D_v`.
    #[serde(serialize_with = "ser_real")]
    pub bound: Real,
    pub within_bound: bool,
    /// `max |det|_v` over `n`-tuples, for ∞ and every prime where some determinant is not a unit.
    #[serde(serialize_with = "ser_place_map")]
    pub local_maxima: BTreeMap<Place, Rational>,
    /// Absent when the points span a proper subspace.
    pub pullback: Option<Pullback>,
}

fn ser_place_map<S: serde::Serializer>(m: &BTreeMap<Place, Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let out: BTreeMap<String, String> = m.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    serde::Serialize::serialize(&out, s)
}

/// Solves `u·Z = x` for square invertible `Z`.
fn coordinates_in(z: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    let n = z.len();
    let aug: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| z[j][i].clone()).chain(std::iter::once(x[i].clone())).collect()).collect();
    let (r, _) = rref(&aug);
    r.iter().map(|row| row[n].clone()).collect()
}

/// Covers `points ⊂ ℚⁿ` by proper subspaces, given `|det(x_1, …, x_n)|_v <= D_v` for every
/// place in `bounds` and `|det|_v <= 1` elsewhere.
///
/// The points are first pulled back to integer coordinates on the lattice they generate; that
/// lattice coincides with the intersection of the local modules spanned by determinant
/// maximizing tuples, which is re-checked. The cover itself is built greedily from hyperplanes
/// spanned by `n - 1` of the points.
pub fn subspace_cover(points: &[Vec<Rational>], bounds: &BTreeMap<Place, Rational>) -> Result<CoverReport> {
    let n = points.first().map(|p| p.len()).ok_or_else(|| Error::InvalidInput("no points".into()))?;
    if n < 2 || points.iter().any(|p| p.len() != n) {
        return Err(Error::InvalidInput("points must share a dimension of at least 2".into()));
    }
    if bounds.values().any(|d| !d.is_positive()) {
        return Err(Error::InvalidInput("every D_v must be positive".into()));
    }
    let d_total: Rational = bounds.values().product();
    let bound = Power::new(d_total.clone(), Rational::new(BigInt::one(), BigInt::from(n - 1)))?.to_real()?.scale(&pow_rational(&int(100), n as i64));
    let span = Subspace::span(n, points);
    let tuples = binomial(points.len(), n);
    if tuples > BigInt::from(MAX_TUPLES) {
        return Err(Error::InvalidInput(format!("{tuples} determinant tuples exceed the limit {MAX_TUPLES}")));
    }
    let idx: Vec<Vec<usize>> = combinations(points.len(), n).collect();
    let dets: Vec<Rational> = idx.par_iter().map(|t| det(&t.iter().map(|&i| points[i].clone()).collect::<Vec<_>>())).collect();
    let places: BTreeSet<Place> = dets.iter().filter(|d| !d.is_zero()).flat_map(support).collect();
    let mut local_maxima: BTreeMap<Place, (Rational, usize)> = BTreeMap::new();
    for v in places {
        let limit = bounds.get(&v).cloned().unwrap_or_else(Rational::one);
        let mut best = (Rational::zero(), 0);
        for (k, d) in dets.iter().enumerate() {
            let a = abs_value(d, &v);
            if a > limit {
                return Err(Error::InvalidInput(format!("|det|_{v} = {a} exceeds D_{v} = {limit} for points {:?}", idx[k])));
            }
            if a > best.0 {
                best = (a, k);
            }
        }
        local_maxima.insert(v, best);
    }
    if !span.is_full() {
        let cover = if span.is_zero() { vec![] } else { vec![span] };
        return finish(cover, bound, local_maxima, None);
    }
    // every point lies in the Z_p-module of a maximizing tuple
    for (v, (_, k)) in &local_maxima {
        if v.is_infinite() {
            continue;
        }
        let y: Vec<Vec<Rational>> = idx[*k].iter().map(|&i| points[i].clone()).collect();
        for x in points {
            if coordinates_in(&y, x).iter().any(|u| abs_value(u, v) > Rational::one()) {
                return Err(Error::Internal(format!("point outside the local module at {v}")));
            }
        }
    }
    let pullback = pull_back(points, &local_maxima)?;
    let d_inf = bounds.get(&Place::Infinity).cloned().unwrap_or_else(Rational::one);
    if Rational::from_integer(pullback.max_pulled_det.clone()) > &d_inf / &pullback.determinant {
        return Err(Error::Internal("pulled-back determinant exceeds D_inf / lattice determinant".into()));
    }
    let cover = greedy_cover(points)?;
    finish(cover, bound, local_maxima, Some(pullback))
}

fn finish(cover: Vec<Subspace>, bound: Real, maxima: BTreeMap<Place, (Rational, usize)>, pullback: Option<Pullback>) -> Result<CoverReport> {
    let within_bound = bound.cmp_rational(&int(cover.len() as i64))? != Ordering::Less;
    Ok(CoverReport { cover, bound, within_bound, local_maxima: maxima.into_iter().map(|(v, (d, _))| (v, d)).collect(), pullback })
}

fn pull_back(points: &[Vec<Rational>], maxima: &BTreeMap<Place, (Rational, usize)>) -> Result<Pullback> {
    let n = points[0].len();
    let l = points.iter().flatten().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let lr = Rational::from_integer(l.clone());
    let scaled: Vec<Vec<BigInt>> = points.iter().map(|p| p.iter().map(|c| (c * &lr).to_integer()).collect()).collect();
    let basis: Vec<Vec<Rational>> = hermite_normal_form(&scaled).into_iter().map(|r| r.into_iter().map(|c| Rational::new(c, l.clone())).collect()).collect();
    if basis.len() != n {
        return Err(Error::Internal("lattice of full-rank points has wrong rank".into()));
    }
    let determinant = det(&basis).abs();
    let expected: Rational = maxima.iter().filter(|(v, _)| !v.is_infinite()).map(|(_, (d, _))| d.recip()).product();
    if determinant != expected {
        return Err(Error::Internal(format!("lattice determinant {determinant} differs from the product of local maxima {expected}")));
    }
    let mut coordinates = Vec::with_capacity(points.len());
    for x in points {
        let u = coordinates_in(&basis, x);
        if u.iter().any(|c| !c.is_integer()) {
            return Err(Error::Internal("pulled-back point is not integral".into()));
        }
        coordinates.push(u.into_iter().map(|c| c.to_integer()).collect::<Vec<BigInt>>());
    }
    let max_pulled_det = combinations(points.len(), n)
        .par_bridge()
        .map(|t| crate::linalg::det_integer(&t.iter().map(|&i| coordinates[i].clone()).collect::<Vec<_>>()).abs())
        .max()
        .unwrap_or_default();
    Ok(Pullback { basis, determinant, coordinates, max_pulled_det })
}

/// Repeatedly takes the hyperplane through `n - 1` of the points that contains the most points
/// not yet covered; ties go to the first hyperplane in lexicographic order of its spanning set.
fn greedy_cover(points: &[Vec<Rational>]) -> Result<Vec<Subspace>> {
    let n = points[0].len();
    let count = binomial(points.len(), n - 1);
    if count > BigInt::from(MAX_TUPLES) {
        return Err(Error::InvalidInput(format!("{count} candidate hyperplanes exceed the limit {MAX_TUPLES}")));
    }
    let mut seen = BTreeSet::new();
    let mut planes: Vec<(Subspace, Vec<usize>)> = Vec::new();
    for t in combinations(points.len(), n - 1) {
        let rows: Vec<Vec<Rational>> = t.iter().map(|&i| points[i].clone()).collect();
        let h = Subspace::span(n, &rows);
        if h.dim() == n - 1 && seen.insert(h.clone()) {
            let members = (0..points.len()).filter(|&i| h.contains(&points[i])).collect();
            planes.push((h, members));
        }
    }
    let mut covered = vec![false; points.len()];
    let mut cover = Vec::new();
    while covered.iter().any(|c| !c) {
        let best = planes
            .iter()
            .enumerate()
            .map(|(k, (_, m))| (m.iter().filter(|&&i| !covered[i]).count(), std::cmp::Reverse(k)))
            .max()
            .filter(|(c, _)| *c > 0)
            .ok_or_else(|| Error::Internal("no hyperplane covers the remaining points".into()))?;
        let (h, members) = &planes[best.1 .0];
        members.iter().for_each(|&i| covered[i] = true);
        cover.push(h.clone());
    }
    Ok(cover)
}
