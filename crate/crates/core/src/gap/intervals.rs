//! The two families of height windows covering `[1, max(2H, n^(2n/δ)))`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::arith::{int, Power, Rational, Real};
use crate::bounds::check_delta;
use crate::error::{Error, Result};
use crate::report::{render_real, ser_display, ser_real};

/// The window `[lo, hi)`; consecutive windows of a family share endpoints.
#[derive(Clone, Debug, Serialize)]
pub struct Window {
    pub h: usize,
    #[serde(serialize_with = "ser_display")]
    pub lo: Power,
    #[serde(serialize_with = "ser_display")]
    pub hi: Power,
    /// `log₂ lo` and `log₂ hi`, exact or as enclosures.
    pub lo_log2: String,
    pub hi_log2: String,
}

impl Window {
    fn new(h: usize, lo: Power, hi: Power) -> Result<Window> {
        Ok(Window { h, lo_log2: log2_text(&lo)?, hi_log2: log2_text(&hi)?, lo, hi })
    }

    pub fn contains(&self, y: &Rational) -> Result<bool> {
        Ok(self.lo.cmp_rational(y)? != Ordering::Greater && self.hi.cmp_rational(y)? == Ordering::Greater)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Coverings {
    /// `max(2H, n^(2n/δ))`, the right end of `I₁`.
    #[serde(serialize_with = "ser_display")]
    pub i1_end: Power,
    pub i1_windows: Vec<Window>,
    pub a: usize,
    /// `4nδ⁻¹·log log 4H`.
    #[serde(serialize_with = "ser_real")]
    pub a_bound: Real,
    pub a_within_bound: bool,
    /// `n^(2n/δ)`, the right end of `I₂`.
    #[serde(serialize_with = "ser_display")]
    pub i2_end: Power,
    pub i2_windows: Vec<Window>,
    pub b: usize,
    /// `4nδ⁻¹·log(3 log n)`.
    #[serde(serialize_with = "ser_real")]
    pub b_bound: Real,
    pub b_within_bound: bool,
}

impl Coverings {
    /// Binary search on the increasing left ends; the windows telescope.
    fn locate(windows: &[Window], y: &Rational) -> Result<Option<usize>> {
        let (mut lo, mut hi) = (0, windows.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if windows[mid].lo.cmp_rational(y)? == Ordering::Greater {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        match lo.checked_sub(1) {
            Some(k) if windows[k].contains(y)? => Ok(Some(windows[k].h)),
            _ => Ok(None),
        }
    }

    /// The window of `I₁`'s family containing `y`.
    pub fn locate_i1(&self, y: &Rational) -> Result<Option<usize>> {
        Self::locate(&self.i1_windows, y)
    }

    pub fn locate_i2(&self, y: &Rational) -> Result<Option<usize>> {
        Self::locate(&self.i2_windows, y)
    }
}

/// Windows `[Q_h, Q_h^(1+δ/2n))` with `Q_h = (n^(2n/δ))^((1+δ/2n)^h)` for `h < A` and
/// `[Q_h, 2Q_h^(1+δ/2n))` with `Q_h = 2^(γ_h)`, `γ_h = (2n/δ)((1+δ/2n)^h - 1)` for `h < B`.
///
/// `A - 1` and `B - 1` are found as the largest `h` whose window starts inside the interval,
/// which equals the closed forms with the integer part; the comparisons are exact.
pub fn covering_intervals(n: u32, delta: &Rational, h: &Rational) -> Result<Coverings> {
    check_delta(delta)?;
    if n < 2 {
        return Err(Error::InvalidInput("dimension must be at least 2".into()));
    }
    if *h < Rational::one() {
        return Err(Error::InvalidInput("H must be at least 1".into()));
    }
    let nr = int(n as i64);
    let e0 = int(2 * n as i64) / delta;
    let ratio = Rational::one() + delta / int(2 * n as i64);
    let threshold = Power::new(nr.clone(), e0.clone())?;
    let two_h = int(2) * h;
    let i1_end = if threshold.cmp_rational(&two_h)? == Ordering::Less { Power::rational(two_h)? } else { threshold.clone() };

    let q1 = |k: usize| Power::new(nr.clone(), &e0 * pow(&ratio, k));
    let mut a = 1;
    while q1(a)?.cmp(&i1_end)? != Ordering::Greater {
        a += 1;
    }
    let i1_windows = (0..a).map(|k| Window::new(k, q1(k)?, q1(k + 1)?)).collect::<Result<Vec<_>>>()?;

    let q2 = |k: usize| Power::new(int(2), &e0 * (pow(&ratio, k) - Rational::one()));
    let mut b = 1;
    while q2(b)?.cmp(&threshold)? != Ordering::Greater {
        b += 1;
    }
    let i2_windows = (0..b).map(|k| Window::new(k, q2(k)?, q2(k + 1)?)).collect::<Result<Vec<_>>>()?;

    let scale = int(4 * n as i64) / delta;
    let a_bound = Real::ln_of(&(int(4) * h))?.ln().scale(&scale);
    let b_bound = Real::ln_of(&nr)?.scale(&int(3)).ln().scale(&scale);
    Ok(Coverings {
        a_within_bound: a_bound.cmp_rational(&int(a as i64))? != Ordering::Less,
        b_within_bound: b_bound.cmp_rational(&int(b as i64))? != Ordering::Less,
        i1_end,
        i1_windows,
        a,
        a_bound,
        i2_end: threshold,
        i2_windows,
        b,
        b_bound,
    })
}

fn log2_text(p: &Power) -> Result<String> {
    Ok(render_real(&crate::arith::real::ln_ratio(&p.base, &int(2))?.scale(&p.exponent)))
}

fn pow(r: &Rational, k: usize) -> Rational {
    crate::arith::enclosure::pow_rational(r, k as i64)
}

/// `A` from its closed form, `1 + ⌊log(log X / log n^(2n/δ)) / log(1 + δ/2n)⌋` with
/// `X = max(2H, n^(2n/δ))`, evaluated by certified floor.
pub fn closed_form_a(n: u32, delta: &Rational, h: &Rational) -> Result<BigInt> {
    let nr = int(n as i64);
    let e0 = int(2 * n as i64) / delta;
    let ratio = Rational::one() + delta / int(2 * n as i64);
    let log_t = Real::ln_of(&nr)?.scale(&e0);
    let two_h = int(2) * h;
    if Power::new(nr, e0)?.cmp_rational(&two_h)? != Ordering::Less {
        return Ok(BigInt::one());
    }
    Ok(Real::ln_of(&two_h)?.div(&log_t).ln().div(&Real::ln_of(&ratio)?).floor()? + 1)
}

/// `B = 1 + ⌊log(1 + log n / log 2) / log(1 + δ/2n)⌋` by certified floor.
pub fn closed_form_b(n: u32, delta: &Rational) -> Result<BigInt> {
    let ratio = Rational::one() + delta / int(2 * n as i64);
    let inner = Real::integer(1).add(&crate::arith::real::ln_ratio(&int(n as i64), &int(2))?);
    Ok(inner.ln().div(&Real::ln_of(&ratio)?).floor()? + 1)
}
