//! Certified isolation of the complex roots of a squarefree integer polynomial, and the
//! Mahler measure built on it.
//!
//! Approximations come from Aberth iteration in `f64`, refined by Weierstrass steps in exact
//! dyadic arithmetic. Smith's theorem certifies them: every root lies in some disk
//! `|z - z_i| <= d·|W_i|` with `W_i = f(z_i) / (a·∏_{j≠i}(z_i - z_j))`, and pairwise disjoint
//! disks each hold exactly one root.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::enclosure::{round_down, RealEnclosure};
use super::poly::{trim_int, IntPoly};
use super::real::{precision_cap, Real};
use super::Rational;
use crate::error::{Error, Result};

pub type ComplexRational = Complex<Rational>;

const MAX_ROUNDS: usize = 64;

/// Root approximations with certified disjoint inclusion disks.
#[derive(Clone, Debug)]
pub struct CertifiedRoots {
    pub centers: Vec<ComplexRational>,
    /// Upper bounds for the disk radii.
    pub radii: Vec<Rational>,
}

impl CertifiedRoots {
    /// Enclosures of `|root_i|`.
    pub fn moduli(&self, bits: u32) -> Vec<RealEnclosure> {
        self.centers
            .iter()
            .zip(&self.radii)
            .map(|(z, r)| {
                let m = RealEnclosure::exact(z.norm_sqr()).root(2, bits + 8).expect("nonnegative");
                let lo = (m.lower() - r).max(Rational::zero());
                RealEnclosure::new(lo, m.upper() + r, bits)
            })
            .collect()
    }
}

fn to_f64(c: &BigInt) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

fn aberth(coeffs: &[f64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let radius = coeffs[..d]
        .iter()
        .enumerate()
        .map(|(k, c)| (c / lead).abs().powf(1.0 / (d - k) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3)
        * 1.1;
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / d as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn from_f64(z: Complex64) -> ComplexRational {
    let conv = |x: f64| Rational::from_float(x).unwrap_or_else(Rational::zero);
    Complex::new(conv(z.re), conv(z.im))
}

fn eval_complex(f: &[BigInt], z: &ComplexRational) -> ComplexRational {
    let mut acc = Complex::new(Rational::zero(), Rational::zero());
    for c in f.iter().rev() {
        acc = acc * z + Complex::new(Rational::from_integer(c.clone()), Rational::zero());
    }
    acc
}

fn weierstrass(f: &[BigInt], z: &[ComplexRational]) -> Option<Vec<ComplexRational>> {
    let lead = Rational::from_integer(f.last().cloned().unwrap_or_default());
    (0..z.len())
        .map(|i| {
            let mut den = Complex::new(lead.clone(), Rational::zero());
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    den *= &z[i] - zj;
                }
            }
            if den.is_zero() {
                return None;
            }
            Some(eval_complex(f, &z[i]) / den)
        })
        .collect()
}

fn sqrt_upper(x: &Rational, bits: u32) -> Rational {
    RealEnclosure::exact(x.clone()).root(2, bits).expect("nonnegative").upper().clone()
}

fn disjoint(centers: &[ComplexRational], radii: &[Rational]) -> bool {
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let gap = (&centers[i] - &centers[j]).norm_sqr();
            let reach = &radii[i] + &radii[j];
            if gap <= &reach * &reach {
                return false;
            }
        }
    }
    true
}

fn round_complex(z: &ComplexRational, bits: u32) -> ComplexRational {
    Complex::new(round_down(&z.re, bits), round_down(&z.im, bits))
}

/// Certified disks of radius at most `2^-bits` around all roots of a squarefree polynomial.
pub fn isolate_complex_roots(f: &IntPoly, bits: u32) -> Result<CertifiedRoots> {
    let mut f = f.clone();
    trim_int(&mut f);
    let d = f.len().saturating_sub(1);
    if d == 0 {
        return Ok(CertifiedRoots { centers: Vec::new(), radii: Vec::new() });
    }
    let cf: Vec<f64> = f.iter().map(to_f64).collect();
    let mut z: Vec<ComplexRational> = if cf.iter().all(|c| c.is_finite()) {
        aberth(&cf).into_iter().map(from_f64).collect()
    } else {
        (0..d)
            .map(|k| Complex::new(Rational::new(BigInt::from(k as i64 + 1), BigInt::from(3)), Rational::new(BigInt::from(2), BigInt::from(5 + k as i64))))
            .collect()
    };
    let target = Rational::new(BigInt::one(), BigInt::one() << bits as usize);
    let dd = Rational::from_integer(BigInt::from(d));
    let cap = precision_cap();
    let mut work = 64u32;
    for _ in 0..MAX_ROUNDS {
        let Some(w) = weierstrass(&f, &z) else {
            // coincident approximations: perturb and retry
            for (k, zk) in z.iter_mut().enumerate() {
                zk.re += Rational::new(BigInt::from(k as i64 + 1), BigInt::from(977));
            }
            continue;
        };
        let radii: Vec<Rational> = w.iter().map(|wi| &dd * sqrt_upper(&wi.norm_sqr(), work + 8)).collect();
        if radii.iter().all(|r| *r <= target) && disjoint(&z, &radii) {
            return Ok(CertifiedRoots { centers: z, radii });
        }
        work = (work * 2).min(bits.max(64) * 2 + 64);
        if work > 2 * cap + 128 {
            break;
        }
        z = z.iter().zip(&w).map(|(zi, wi)| round_complex(&(zi - wi), work)).collect();
    }
    Err(Error::Undecided { cap })
}

fn mahler_from_roots(f: &[BigInt], roots: &CertifiedRoots, bits: u32) -> (RealEnclosure, Option<Rational>) {
    let lead = Rational::from_integer(f.last().cloned().unwrap_or_default().abs());
    let moduli = roots.moduli(bits);
    let one = Rational::one();
    if moduli.iter().all(|m| *m.lower() > one) {
        let c0 = Rational::from_integer(f[0].abs());
        return (RealEnclosure::exact(c0.clone()), Some(c0));
    }
    if moduli.iter().all(|m| *m.upper() < one) {
        return (RealEnclosure::exact(lead.clone()), Some(lead));
    }
    let one_enc = RealEnclosure::exact(one);
    let product = moduli.iter().fold(RealEnclosure::exact(lead), |acc, m| acc.mul(&m.max(&one_enc)));
    (product, None)
}

/// Mahler measure `a·∏ max(1, |root_i|)` of a squarefree integer polynomial.
///
/// The value is exact when every root lies strictly outside the unit circle (it is `|f(0)|`)
/// or strictly inside it (it is the leading coefficient).
pub fn mahler_measure(f: &IntPoly) -> Result<Real> {
    let mut f = f.clone();
    trim_int(&mut f);
    if f.is_empty() {
        return Err(Error::InvalidInput("Mahler measure of the zero polynomial".into()));
    }
    let first = isolate_complex_roots(&f, 32)?;
    if let (_, Some(m)) = mahler_from_roots(&f, &first, 32) {
        return Ok(Real::rational(m));
    }
    Ok(Real::from_fn(move |p| {
        let roots = isolate_complex_roots(&f, p + 8)?;
        Ok(mahler_from_roots(&f, &roots, p + 8).0)
    }))
}
