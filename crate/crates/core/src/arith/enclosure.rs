//! Rational interval enclosures of real numbers with outward rounding.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// A closed interval `[lower, upper]` with rational endpoints known to contain a real number.
///
/// `precision` records the number of significant bits the enclosure was computed for. An
/// enclosure with `lower == upper` is exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RealEnclosure {
    lower: Rational,
    upper: Rational,
    precision: u32,
}

impl RealEnclosure {
    pub fn new(lower: Rational, upper: Rational, precision: u32) -> Self {
        assert!(lower <= upper, "enclosure endpoints out of order");
        RealEnclosure { lower, upper, precision }
    }

    pub fn exact(value: Rational) -> Self {
        RealEnclosure { lower: value.clone(), upper: value, precision: u32::MAX }
    }

    pub fn lower(&self) -> &Rational {
        &self.lower
    }

    pub fn upper(&self) -> &Rational {
        &self.upper
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn exact_value(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.lower)
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lower + &self.upper) / Rational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    /// True when `self` lies inside `other`.
    pub fn is_within(&self, other: &RealEnclosure) -> bool {
        other.lower <= self.lower && self.upper <= other.upper
    }

    /// Intersection of two enclosures of the same number.
    pub fn intersect(&self, other: &RealEnclosure) -> Option<RealEnclosure> {
        let lo = self.lower.clone().max(other.lower.clone());
        let hi = self.upper.clone().min(other.upper.clone());
        (lo <= hi).then(|| RealEnclosure::new(lo, hi, self.precision.max(other.precision)))
    }

    /// Certified ordering against another enclosure; `None` if they overlap.
    pub fn certain_cmp(&self, other: &RealEnclosure) -> Option<Ordering> {
        if self.upper < other.lower {
            Some(Ordering::Less)
        } else if self.lower > other.upper {
            Some(Ordering::Greater)
        } else if self.is_exact() && other.is_exact() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn certain_cmp_rational(&self, x: &Rational) -> Option<Ordering> {
        self.certain_cmp(&RealEnclosure::exact(x.clone()))
    }

    fn combined_precision(&self, other: &RealEnclosure) -> u32 {
        self.precision.min(other.precision)
    }

    fn rounded(lower: Rational, upper: Rational, precision: u32) -> RealEnclosure {
        if lower == upper || precision == u32::MAX {
            return RealEnclosure { lower, upper, precision };
        }
        RealEnclosure {
            lower: round_down(&lower, precision),
            upper: round_up(&upper, precision),
            precision,
        }
    }

    pub fn neg(&self) -> RealEnclosure {
        RealEnclosure { lower: -&self.upper, upper: -&self.lower, precision: self.precision }
    }

    pub fn add(&self, other: &RealEnclosure) -> RealEnclosure {
        Self::rounded(
            &self.lower + &other.lower,
            &self.upper + &other.upper,
            self.combined_precision(other),
        )
    }

    pub fn sub(&self, other: &RealEnclosure) -> RealEnclosure {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RealEnclosure) -> RealEnclosure {
        let products = [
            &self.lower * &other.lower,
            &self.lower * &other.upper,
            &self.upper * &other.lower,
            &self.upper * &other.upper,
        ];
        let lo = products.iter().min().cloned().unwrap_or_default();
        let hi = products.iter().max().cloned().unwrap_or_default();
        Self::rounded(lo, hi, self.combined_precision(other))
    }

    /// Reciprocal; `None` when the enclosure contains zero.
    pub fn recip(&self) -> Option<RealEnclosure> {
        if self.contains(&Rational::zero()) {
            return None;
        }
        Some(Self::rounded(self.upper.recip(), self.lower.recip(), self.precision))
    }

    pub fn div(&self, other: &RealEnclosure) -> Option<RealEnclosure> {
        other.recip().map(|r| self.mul(&r))
    }

    pub fn abs(&self) -> RealEnclosure {
        if self.lower.is_negative() && self.upper.is_positive() {
            let hi = self.upper.clone().max(-&self.lower);
            RealEnclosure { lower: Rational::zero(), upper: hi, precision: self.precision }
        } else if self.upper.is_positive() || self.upper.is_zero() && self.lower.is_zero() {
            self.clone()
        } else {
            self.neg()
        }
    }

    pub fn max(&self, other: &RealEnclosure) -> RealEnclosure {
        RealEnclosure {
            lower: self.lower.clone().max(other.lower.clone()),
            upper: self.upper.clone().max(other.upper.clone()),
            precision: self.combined_precision(other),
        }
    }

    pub fn min(&self, other: &RealEnclosure) -> RealEnclosure {
        RealEnclosure {
            lower: self.lower.clone().min(other.lower.clone()),
            upper: self.upper.clone().min(other.upper.clone()),
            precision: self.combined_precision(other),
        }
    }

    pub fn powi(&self, k: i64) -> Option<RealEnclosure> {
        if k < 0 {
            return self.powi(-k)?.recip();
        }
        let k = k as u32;
        if k == 0 {
            return Some(RealEnclosure::exact(Rational::one()));
        }
        let (lo, hi) = if !self.lower.is_negative() {
            (pow_rat(&self.lower, k), pow_rat(&self.upper, k))
        } else if !self.upper.is_positive() {
            let a = pow_rat(&self.upper, k);
            let b = pow_rat(&self.lower, k);
            if k.is_multiple_of(2) {
                (a, b)
            } else {
                (b, a)
            }
        } else if k.is_multiple_of(2) {
            let m = self.upper.clone().max(-&self.lower);
            (Rational::zero(), pow_rat(&m, k))
        } else {
            (pow_rat(&self.lower, k), pow_rat(&self.upper, k))
        };
        Some(Self::rounded(lo, hi, self.precision))
    }

    /// Principal `k`-th root; requires a nonnegative enclosure.
    pub fn root(&self, k: u32, precision: u32) -> Option<RealEnclosure> {
        if self.lower.is_negative() || k == 0 {
            return None;
        }
        let precision = precision.min(self.precision);
        let lo = root_bound(&self.lower, k, precision, false);
        let hi = root_bound(&self.upper, k, precision, true);
        Some(RealEnclosure { lower: lo, upper: hi, precision })
    }

    /// Natural logarithm; requires a positive enclosure.
    pub fn ln(&self, precision: u32) -> Option<RealEnclosure> {
        if !self.lower.is_positive() {
            return None;
        }
        let precision = precision.min(self.precision);
        let lo = ln_rational(&self.lower, precision);
        if self.is_exact() {
            return Some(lo);
        }
        let hi = ln_rational(&self.upper, precision);
        Some(RealEnclosure { lower: lo.lower, upper: hi.upper, precision })
    }

    /// Outward decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        if let Some(v) = self.exact_value() {
            if v.is_integer() {
                return v.to_integer().to_string();
            }
        }
        format!("[{}, {}]", decimal_floor(&self.lower, digits), decimal_ceil(&self.upper, digits))
    }
}

impl fmt::Display for RealEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact_value() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str(&self.to_decimal(20)),
        }
    }
}

pub(crate) fn pow_rat(x: &Rational, k: u32) -> Rational {
    Rational::new_raw(x.numer().pow(k), x.denom().pow(k))
}

/// Integer power of a rational, negative exponents allowed for nonzero `x`.
pub fn pow_rational(x: &Rational, k: i64) -> Rational {
    let p = pow_rat(x, k.unsigned_abs() as u32);
    if k < 0 {
        p.recip()
    } else {
        p
    }
}

/// Approximate `floor(log2 |x|)`, exact to within one.
pub fn log2_estimate(x: &Rational) -> i64 {
    if x.is_zero() {
        return 0;
    }
    x.numer().bits() as i64 - x.denom().bits() as i64
}

fn scale_pow2(x: &Rational, shift: i64) -> Rational {
    if shift >= 0 {
        x * Rational::from_integer(BigInt::one() << shift as usize)
    } else {
        x / Rational::from_integer(BigInt::one() << (-shift) as usize)
    }
}

fn pow2(shift: i64) -> Rational {
    scale_pow2(&Rational::one(), shift)
}

/// Largest dyadic with `precision` significant bits that is `<= x`.
pub fn round_down(x: &Rational, precision: u32) -> Rational {
    if x.is_zero() || x.denom().is_one() && x.numer().bits() <= precision as u64 {
        return x.clone();
    }
    let frac_bits = precision as i64 - log2_estimate(x);
    let scaled = scale_pow2(x, frac_bits).floor().to_integer();
    scale_pow2(&Rational::from_integer(scaled), -frac_bits)
}

/// Smallest dyadic with `precision` significant bits that is `>= x`.
pub fn round_up(x: &Rational, precision: u32) -> Rational {
    -round_down(&-x, precision)
}

fn root_bound(x: &Rational, k: u32, precision: u32, upper: bool) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    let e = log2_estimate(x) / k as i64;
    let frac_bits = (precision as i64 + 4 - e).max(0);
    let scaled = scale_pow2(x, frac_bits * k as i64);
    let root = if upper {
        let c = scaled.ceil().to_integer();
        let r = c.nth_root(k);
        if r.pow(k) < c {
            r + 1
        } else {
            r
        }
    } else {
        scaled.floor().to_integer().nth_root(k)
    };
    scale_pow2(&Rational::from_integer(root), -frac_bits)
}

/// Exact `k`-th root of a nonnegative rational when it is rational.
pub fn exact_root(x: &Rational, k: u32) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().nth_root(k);
    let d = x.denom().nth_root(k);
    (n.pow(k) == *x.numer() && d.pow(k) == *x.denom()).then(|| Rational::new(n, d))
}

/// Computes `2^w * atanh(z)` for `|z| <= 1/3` with an error bound in units of `2^-w`.
fn atanh_scaled(z: &Rational, w: u32) -> (BigInt, BigInt) {
    let scaled_z = (z.numer() << w as usize).div_floor(z.denom());
    let unit = BigInt::one() << w as usize;
    let z2 = (&scaled_z * &scaled_z) >> w as usize;
    let mut power = scaled_z.clone();
    let mut sum = scaled_z;
    let mut k: u64 = 1;
    while !power.is_zero() {
        // truncating division so that negative terms also reach zero
        power = &power * &z2 / &unit;
        sum += &power / BigInt::from(2 * k + 1);
        k += 1;
    }
    (sum, BigInt::from(4 * k + 16))
}

/// Certified enclosure of `ln x` for rational `x > 0`.
pub fn ln_rational(x: &Rational, precision: u32) -> RealEnclosure {
    assert!(x.is_positive(), "logarithm of a nonpositive number");
    if x.is_one() {
        return RealEnclosure::exact(Rational::zero());
    }
    let k = log2_estimate(x);
    let m = scale_pow2(x, -k);
    let w = precision + 32 + (64 - k.unsigned_abs().leading_zeros());
    let one = Rational::one();
    let z = (&m - &one) / (&m + &one);
    let (lm, em) = atanh_scaled(&z, w);
    let (mut value, mut err) = (lm * 2, em * 2);
    if k != 0 {
        let (l2, e2) = atanh_scaled(&Rational::new(BigInt::one(), BigInt::from(3)), w);
        value += l2 * 2 * k;
        err += e2 * 2 * k.abs();
    }
    let scale = pow2(-(w as i64));
    let lo = Rational::from_integer(&value - &err) * &scale;
    let hi = Rational::from_integer(&value + &err) * &scale;
    RealEnclosure::new(lo, hi, precision)
}

fn decimal_exponent(x: &Rational) -> i64 {
    // floor(log10 |x|) via a bit-length estimate corrected by exact comparison
    let ax = x.abs();
    let mut e = ((log2_estimate(&ax) as f64) * std::f64::consts::LOG10_2).floor() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    let p10 = |k: i64| pow_rational(&ten, k);
    while p10(e) > ax {
        e -= 1;
    }
    while p10(e + 1) <= ax {
        e += 1;
    }
    e
}

fn decimal_round(x: &Rational, digits: usize, up: bool) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let e = decimal_exponent(x);
    let ten = Rational::from_integer(BigInt::from(10));
    let scaled = x * pow_rational(&ten, digits as i64 - 1 - e);
    let m = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let (sign, mag) = match m.sign() {
        Sign::Minus => ("-", (-m).to_string()),
        _ => ("", m.to_string()),
    };
    // rounding may carry into an extra digit
    let e = e + (mag.len() as i64 - digits as i64);
    let (head, tail) = mag.split_at(1);
    let tail = tail.trim_end_matches('0');
    if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}

pub fn decimal_floor(x: &Rational, digits: usize) -> String {
    decimal_round(x, digits, false)
}

pub fn decimal_ceil(x: &Rational, digits: usize) -> String {
    decimal_round(x, digits, true)
}
