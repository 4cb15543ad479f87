//! A partition of `ℂⁿ` into boundedly many classes on which `n`-fold determinants are small
//! relative to the product of the max-norms.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::enclosure::pow_rational;
use crate::arith::{int, NfElem, Power, Rational, Real};
use crate::error::{Error, Result};
use crate::linalg::{det, ComplexRational};

/// The parameter `M >= 1`, stored through `M²` so that `M = (9/2)^(n/2)` stays exact.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartitionParameter {
    m_squared: Rational,
}

impl PartitionParameter {
    pub fn from_m(m: Rational) -> Result<Self> {
        if !m.is_positive() {
            return Err(Error::InvalidInput("M must be positive".into()));
        }
        Self::from_square(&m * &m)
    }

    pub fn from_square(m_squared: Rational) -> Result<Self> {
        if m_squared < Rational::one() {
            return Err(Error::InvalidInput(format!("M² = {m_squared} must be at least 1")));
        }
        Ok(PartitionParameter { m_squared })
    }

    /// `M = (9/2)^(n/2)`.
    pub fn for_small_solutions(n: usize) -> Self {
        PartitionParameter { m_squared: pow_rational(&Rational::new(9.into(), 2.into()), n as i64) }
    }

    pub fn square(&self) -> &Rational {
        &self.m_squared
    }

    pub fn to_real(&self) -> Result<Real> {
        Power::new(self.m_squared.clone(), Rational::new(1.into(), 2.into()))?.to_real()
    }
}

impl fmt::Display for PartitionParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match crate::arith::enclosure::exact_root(&self.m_squared, 2) {
            Some(m) => write!(f, "{m}"),
            None => write!(f, "sqrt({})", self.m_squared),
        }
    }
}

impl Serialize for PartitionParameter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses `M` given as a rational `r` or as `sqrt(r)`.
pub fn parse_partition_parameter(text: &str) -> Result<PartitionParameter> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        return PartitionParameter::from_square(crate::config::parse_rational(inner)?);
    }
    PartitionParameter::from_m(crate::config::parse_rational(t)?)
}

/// A class: the first index `i` of maximal modulus (1-based) and the subcube indices of
/// `w = (Re z_j, Im z_j : j ≠ i)` where `z = y / y_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PartitionClass {
    pub n: usize,
    pub max_index: usize,
    pub cube: Vec<u64>,
}

impl fmt::Display for PartitionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cube: Vec<String> = self.cube.iter().map(|k| k.to_string()).collect();
        write!(f, "({}, [{}])", self.max_index, cube.join(","))
    }
}

/// The subdivision of `[-1, 1]` used on every axis.
///
/// `k_hat` is a rational with `k_hat^(2n-2) >= M²·nⁿ`, and `[-1, 1]` is cut into `divisions`
/// half-open pieces of length `2 / divisions <= (√2·k_hat)^(-1)` plus the point `{1}`.
#[derive(Clone, Debug, Serialize)]
pub struct Grid {
    pub n: usize,
    pub m: PartitionParameter,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub k_hat: Rational,
    pub divisions: u64,
}

impl Grid {
    pub fn new(n: usize, m: &PartitionParameter) -> Result<Grid> {
        if n < 2 {
            return Err(Error::InvalidInput("dimension must be at least 2".into()));
        }
        let target = m.square() * pow_rational(&int(n as i64), n as i64);
        let e = 2 * (n as i64 - 1);
        let k = Power::new(target.clone(), Rational::new(BigInt::one(), BigInt::from(e)))?.to_real()?;
        let scale = BigInt::from(1u32 << 10);
        let upper = k.enclosure(64)?.upper().clone();
        let mut k_hat = Rational::new((upper * Rational::from_integer(scale.clone())).ceil().to_integer(), scale.clone());
        while pow_rational(&k_hat, e) < target {
            k_hat += Rational::new(BigInt::one(), scale.clone());
        }
        // least d with d² >= 8·k_hat²
        let t = int(8) * &k_hat * &k_hat;
        let mut d = t.ceil().to_integer().sqrt();
        while Rational::from_integer(&d * &d) < t {
            d += 1;
        }
        let divisions = d.to_u64().filter(|&d| d < 1 << 31).ok_or_else(|| Error::InvalidInput("M is too large for the grid".into()))?;
        Ok(Grid { n, m: m.clone(), k_hat, divisions })
    }

    /// Cells per axis, counting the point `{1}`.
    pub fn axis_count(&self) -> u64 {
        self.divisions + 1
    }

    /// `n·axis_count^(2n-2)`.
    pub fn class_count(&self) -> BigInt {
        BigInt::from(self.n) * BigInt::from(self.axis_count()).pow(2 * (self.n as u32 - 1))
    }

    /// Index of `w ∈ [-1, 1]`: `⌊(w + 1)·divisions / 2⌋`.
    pub fn cell(&self, w: &Rational) -> u64 {
        let k = ((w + Rational::one()) * Rational::new(BigInt::from(self.divisions), BigInt::from(2))).floor().to_integer();
        k.to_u64().unwrap_or(0).min(self.divisions)
    }

    /// The class of `y ∈ ℂⁿ`; exact for complex rational input.
    pub fn assign(&self, y: &[ComplexRational]) -> Result<PartitionClass> {
        if y.len() != self.n {
            return Err(Error::InvalidInput(format!("vector has length {}, expected {}", y.len(), self.n)));
        }
        let modulus: Vec<Rational> = y.iter().map(|c| c.norm_sqr()).collect();
        let mut i = 0;
        for j in 1..self.n {
            if modulus[j] > modulus[i] {
                i = j;
            }
        }
        if modulus[i].is_zero() {
            return Ok(PartitionClass { n: self.n, max_index: 1, cube: vec![self.cell(&Rational::zero()); 2 * self.n - 2] });
        }
        let yi = y[i].clone();
        let mut cube = Vec::with_capacity(2 * self.n - 2);
        for (j, c) in y.iter().enumerate() {
            if j != i {
                let z = c.clone() / yi.clone();
                cube.push(self.cell(&z.re));
                cube.push(self.cell(&z.im));
            }
        }
        Ok(PartitionClass { n: self.n, max_index: i + 1, cube })
    }

    /// The class of the real vector `y`, given through ratios: `ratio(j, i)` returns `y_j / y_i`
    /// for `y_i ≠ 0` and `is_zero(i)` tells whether `y_i = 0`.
    pub(crate) fn assign_real(&self, is_zero: impl Fn(usize) -> bool, ratio: impl Fn(usize, usize) -> Result<Ratio>) -> Result<PartitionClass> {
        let mut i = 0;
        for j in 1..self.n {
            if is_zero(j) {
                continue;
            }
            if is_zero(i) || ratio(j, i)?.abs_cmp_one()? == Ordering::Greater {
                i = j;
            }
        }
        let mid = self.cell(&Rational::zero());
        if is_zero(i) {
            return Ok(PartitionClass { n: self.n, max_index: 1, cube: vec![mid; 2 * self.n - 2] });
        }
        let half = Rational::new(BigInt::from(self.divisions), BigInt::from(2));
        let mut cube = Vec::with_capacity(2 * self.n - 2);
        for j in (0..self.n).filter(|&j| j != i) {
            let k = if is_zero(j) { mid } else { ratio(j, i)?.shifted_floor(&half)?.to_u64().unwrap_or(0).min(self.divisions) };
            cube.push(k);
            cube.push(mid);
        }
        Ok(PartitionClass { n: self.n, max_index: i + 1, cube })
    }
}

/// A real ratio `y_j / y_i`, exact when it lies in `ℚ(θ)`.
pub(crate) enum Ratio {
    Exact(NfElem),
    Approx(Real),
}

impl Ratio {
    fn abs_cmp_one(&self) -> Result<Ordering> {
        match self {
            Ratio::Exact(e) => e.abs()?.cmp_rational(&Rational::one()),
            Ratio::Approx(r) => r.max(&r.neg()).cmp_rational(&Rational::one()),
        }
    }

    /// `⌊(w + 1)·h⌋`.
    fn shifted_floor(&self, h: &Rational) -> Result<BigInt> {
        match self {
            Ratio::Exact(e) => nf_floor(&e.add(&NfElem::one()).scale(h)),
            Ratio::Approx(r) => r.add(&Real::integer(1)).scale(h).floor(),
        }
    }
}

/// Exact floor of a real element of `ℚ(θ)`.
pub fn nf_floor(e: &NfElem) -> Result<BigInt> {
    if let Some(r) = e.as_rational() {
        return Ok(r.floor().to_integer());
    }
    let mut k = e.enclosure(64).lower().floor().to_integer();
    while e.cmp_rational(&Rational::from_integer(&k + 1))? != Ordering::Less {
        k += 1;
    }
    while e.cmp_rational(&Rational::from_integer(k.clone()))? == Ordering::Less {
        k -= 1;
    }
    Ok(k)
}

pub fn partition_assign(y: &[ComplexRational], m: &PartitionParameter) -> Result<PartitionClass> {
    Grid::new(y.len(), m)?.assign(y)
}

/// Whether `|det(y_1, …, y_n)| <= M^(-1)·‖y_1‖⋯‖y_n‖`, decided exactly on squares.
///
/// All vectors must share one class.
pub fn verify_class_determinant(samples: &[Vec<ComplexRational>], m: &PartitionParameter) -> Result<bool> {
    let n = samples.len();
    if n == 0 || samples.iter().any(|y| y.len() != n) {
        return Err(Error::InvalidInput("expected n vectors of length n".into()));
    }
    let grid = Grid::new(n, m)?;
    let class = grid.assign(&samples[0])?;
    for y in &samples[1..] {
        if grid.assign(y)? != class {
            return Err(Error::InvalidInput("samples lie in different classes".into()));
        }
    }
    let d = det(samples).norm_sqr();
    let norms: Rational = samples.iter().map(|y| y.iter().map(|c| c.norm_sqr()).max().unwrap_or_default()).product();
    Ok(d * m.square() <= norms)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassCounts {
    /// `(20n)ⁿ·M²`.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub lemma_bound: Rational,
    /// `(90n)^(nd)`.
    #[serde(serialize_with = "crate::report::ser_display")]
    pub general_bound: BigInt,
    /// `200ⁿ`, valid over ℚ.
    #[serde(serialize_with = "crate::report::ser_display")]
    pub rational_bound: BigInt,
    /// `n·(divisions + 1)^(2n-2)` for the implemented grid.
    #[serde(serialize_with = "crate::report::ser_display")]
    pub grid_count: BigInt,
}

pub fn class_count_bound(n: usize, m: &PartitionParameter, d: u32) -> Result<ClassCounts> {
    if d == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let grid = Grid::new(n, m)?;
    Ok(ClassCounts {
        lemma_bound: pow_rational(&int(20 * n as i64), n as i64) * m.square(),
        general_bound: BigInt::from(90 * n).pow(n as u32 * d),
        rational_bound: BigInt::from(200).pow(n as u32),
        grid_count: grid.class_count(),
    })
}
