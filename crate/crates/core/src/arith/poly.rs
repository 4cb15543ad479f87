//! Dense univariate polynomials over ℤ, ℚ and small prime fields.
//!
//! Coefficient vectors are stored constant term first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::enclosure::RealEnclosure;
use super::primes::small_primes;
use super::Rational;

pub type IntPoly = Vec<BigInt>;
pub type RatPoly = Vec<Rational>;

pub fn trim_int(p: &mut IntPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn trim_rat(p: &mut RatPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Degree of a trimmed polynomial; the zero polynomial has no degree.
pub fn degree<T>(p: &[T]) -> Option<usize> {
    p.len().checked_sub(1)
}

pub fn to_rat(p: &[BigInt]) -> RatPoly {
    p.iter().cloned().map(Rational::from_integer).collect()
}

pub fn content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Primitive integer polynomial with positive leading coefficient proportional to `p`.
pub fn primitive_part(p: &RatPoly) -> IntPoly {
    let mut p = p.clone();
    trim_rat(&mut p);
    if p.is_empty() {
        return Vec::new();
    }
    let lcm = p.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let mut ints: IntPoly = p.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let g = content(&ints);
    let sign = if ints.last().is_some_and(|c| c.is_negative()) { -BigInt::one() } else { BigInt::one() };
    for c in ints.iter_mut() {
        *c = &*c / &g * &sign;
    }
    ints
}

pub fn eval_rat(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

pub fn eval_int_at(p: &[BigInt], x: &Rational) -> Rational {
    // Homogenized Horner to keep one division at the end.
    let (n, d) = (x.numer(), x.denom());
    let deg = p.len().saturating_sub(1);
    let mut acc = BigInt::zero();
    let mut dpow = BigInt::one();
    for c in p.iter().rev() {
        acc = acc * n + c * &dpow;
        dpow *= d;
    }
    let denom = d.pow(deg as u32);
    Rational::new(acc, denom)
}

pub fn eval_enclosure(p: &[Rational], x: &RealEnclosure) -> RealEnclosure {
    let mut acc = RealEnclosure::exact(Rational::zero());
    for c in p.iter().rev() {
        acc = acc.mul(x).add(&RealEnclosure::exact(c.clone()));
    }
    acc
}

pub fn derivative_rat(p: &[Rational]) -> RatPoly {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
        .collect()
}

pub fn add_rat(a: &[Rational], b: &[Rational]) -> RatPoly {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (k, c) in a.iter().enumerate() {
        out[k] += c;
    }
    for (k, c) in b.iter().enumerate() {
        out[k] += c;
    }
    trim_rat(&mut out);
    out
}

pub fn scale_rat(a: &[Rational], s: &Rational) -> RatPoly {
    let mut out: RatPoly = a.iter().map(|c| c * s).collect();
    trim_rat(&mut out);
    out
}

pub fn sub_rat(a: &[Rational], b: &[Rational]) -> RatPoly {
    add_rat(a, &scale_rat(b, &-Rational::one()))
}

pub fn mul_rat(a: &[Rational], b: &[Rational]) -> RatPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim_rat(&mut out);
    out
}

/// Euclidean division; `b` must be nonzero.
pub fn divrem_rat(a: &[Rational], b: &[Rational]) -> (RatPoly, RatPoly) {
    let mut b = b.to_vec();
    trim_rat(&mut b);
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r = a.to_vec();
    trim_rat(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = b[db].clone();
    let mut q = vec![Rational::zero(); r.len() - db];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let coef = r[r.len() - 1].clone() / &lead;
        for (k, c) in b.iter().enumerate() {
            r[shift + k] -= &coef * c;
        }
        q[shift] = coef;
        r.pop();
        trim_rat(&mut r);
    }
    trim_rat(&mut q);
    (q, r)
}

pub fn rem_rat(a: &[Rational], b: &[Rational]) -> RatPoly {
    divrem_rat(a, b).1
}

/// Monic gcd over ℚ.
pub fn gcd_rat(a: &[Rational], b: &[Rational]) -> RatPoly {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim_rat(&mut x);
    trim_rat(&mut y);
    while !y.is_empty() {
        let r = rem_rat(&x, &y);
        x = y;
        y = r;
    }
    make_monic(&x)
}

pub fn make_monic(p: &[Rational]) -> RatPoly {
    match p.last() {
        None => Vec::new(),
        Some(l) => {
            let inv = l.recip();
            p.iter().map(|c| c * &inv).collect()
        }
    }
}

/// Extended Euclid: returns `(g, s)` with `s*a ≡ g (mod m)`, `g` monic.
pub fn gcdext_rat(a: &[Rational], m: &[Rational]) -> (RatPoly, RatPoly) {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    trim_rat(&mut r0);
    trim_rat(&mut r1);
    let (mut s0, mut s1): (RatPoly, RatPoly) = (Vec::new(), vec![Rational::one()]);
    while !r1.is_empty() {
        let (q, r) = divrem_rat(&r0, &r1);
        let s = sub_rat(&s0, &mul_rat(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    let lead = r0.last().cloned().unwrap_or_else(Rational::one).recip();
    (scale_rat(&r0, &lead), scale_rat(&s0, &lead))
}

pub fn squarefree_part(p: &[Rational]) -> RatPoly {
    let g = gcd_rat(p, &derivative_rat(p));
    make_monic(&divrem_rat(p, &g).0)
}

/// Sturm sequence of a squarefree polynomial.
pub fn sturm_sequence(p: &[Rational]) -> Vec<RatPoly> {
    let mut seq = vec![p.to_vec(), derivative_rat(p)];
    loop {
        let k = seq.len();
        if seq[k - 1].is_empty() {
            seq.pop();
            break;
        }
        let r = rem_rat(&seq[k - 2], &seq[k - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(scale_rat(&r, &-Rational::one()));
    }
    seq
}

fn sign_changes(seq: &[RatPoly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let v = eval_rat(p, x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots in the half-open interval `(a, b]`.
pub fn count_roots(seq: &[RatPoly], a: &Rational, b: &Rational) -> usize {
    sign_changes(seq, a).saturating_sub(sign_changes(seq, b))
}

/// Cauchy bound: every complex root has modulus below the returned value.
pub fn root_bound(p: &[Rational]) -> Rational {
    let lead = p.last().expect("nonzero polynomial").abs();
    let m = p[..p.len() - 1].iter().map(|c| c.abs()).max().unwrap_or_default();
    Rational::one() + m / lead
}

/// Isolating intervals `(lo, hi]` for all real roots of a squarefree polynomial, in increasing order.
pub fn isolate_real_roots(p: &[Rational]) -> Vec<(Rational, Rational)> {
    let seq = sturm_sequence(p);
    let b = root_bound(p);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        match count_roots(&seq, &lo, &hi) {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) / Rational::from_integer(BigInt::from(2));
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    out.sort();
    out
}

/// Rational roots of an integer polynomial, by the rational root theorem.
pub fn rational_roots(p: &[BigInt]) -> Vec<Rational> {
    let mut p = p.to_vec();
    trim_int(&mut p);
    let mut roots = Vec::new();
    if p.len() < 2 {
        return roots;
    }
    if p[0].is_zero() {
        roots.push(Rational::zero());
        let k = p.iter().position(|c| !c.is_zero()).unwrap_or(0);
        p.drain(..k);
        if p.len() < 2 {
            return roots;
        }
    }
    let lead = p.last().cloned().unwrap_or_default();
    let nums = divisors(&p[0]);
    let dens = divisors(&lead);
    for a in &nums {
        for b in &dens {
            for s in [BigInt::one(), -BigInt::one()] {
                let x = Rational::new(a * &s, b.clone());
                if eval_int_at(&p, &x).is_zero() && !roots.contains(&x) {
                    roots.push(x);
                }
            }
        }
    }
    roots.sort();
    roots
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let f = super::primes::factor(n);
    let mut out = vec![BigInt::one()];
    for (p, e) in f {
        let mut next = Vec::new();
        for d in &out {
            let mut q = d.clone();
            for _ in 0..=e {
                next.push(q.clone());
                q *= &p;
            }
        }
        out = next;
    }
    out
}

/// Outcome of an irreducibility test over ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible,
    Reducible,
    Unknown,
}

/// Tests irreducibility of a primitive integer polynomial.
///
/// Degrees 1 to 3 are decided by the rational root test. Higher degrees use factor-degree
/// patterns modulo small primes: the degrees that a rational factor could have must be subset
/// sums of the degree pattern modulo every good prime.
pub fn irreducibility(p: &[BigInt]) -> Irreducibility {
    let mut p = p.to_vec();
    trim_int(&mut p);
    let d = match degree(&p) {
        None | Some(0) => return Irreducibility::Reducible,
        Some(d) => d,
    };
    if d == 1 {
        return if content(&p).is_one() { Irreducibility::Irreducible } else { Irreducibility::Reducible };
    }
    if !content(&p).is_one() || !rational_roots(&p).is_empty() {
        return Irreducibility::Reducible;
    }
    if d <= 3 {
        return Irreducibility::Irreducible;
    }
    let rp = to_rat(&p);
    if degree(&gcd_rat(&rp, &derivative_rat(&rp))).unwrap_or(0) > 0 {
        return Irreducibility::Reducible;
    }
    let mut possible: Vec<bool> = (0..=d).map(|k| k > 0 && k < d).collect();
    let mut good_primes = 0;
    for q in small_primes(60).into_iter().skip(1) {
        let Some(pattern) = degree_pattern_mod(&p, q) else { continue };
        good_primes += 1;
        let sums = subset_sums(&pattern, d);
        for k in 1..d {
            possible[k] &= sums[k];
        }
        if !possible.iter().any(|&b| b) {
            return Irreducibility::Irreducible;
        }
        if good_primes >= 40 {
            break;
        }
    }
    Irreducibility::Unknown
}

fn subset_sums(parts: &[usize], d: usize) -> Vec<bool> {
    let mut reach = vec![false; d + 1];
    reach[0] = true;
    for &m in parts {
        for k in (m..=d).rev() {
            if reach[k - m] {
                reach[k] = true;
            }
        }
    }
    reach
}

type Fp = Vec<u64>;

fn fp_trim(p: &mut Fp) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn fp_mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn fp_powmod(mut a: u64, mut e: u64, q: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = fp_mulmod(r, a, q);
        }
        a = fp_mulmod(a, a, q);
        e >>= 1;
    }
    r
}

fn fp_inv(a: u64, q: u64) -> u64 {
    fp_powmod(a, q - 2, q)
}

fn fp_rem(a: &Fp, b: &Fp, q: u64) -> Fp {
    let mut r = a.clone();
    fp_trim(&mut r);
    let db = b.len() - 1;
    let inv = fp_inv(b[db], q);
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let coef = fp_mulmod(r[r.len() - 1], inv, q);
        for (k, c) in b.iter().enumerate() {
            let t = fp_mulmod(coef, *c, q);
            r[shift + k] = (r[shift + k] + q - t) % q;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_divexact(a: &Fp, b: &Fp, q: u64) -> Fp {
    let mut r = a.clone();
    let db = b.len() - 1;
    let inv = fp_inv(b[db], q);
    let mut out = vec![0u64; r.len().saturating_sub(db)];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let coef = fp_mulmod(r[r.len() - 1], inv, q);
        out[shift] = coef;
        for (k, c) in b.iter().enumerate() {
            let t = fp_mulmod(coef, *c, q);
            r[shift + k] = (r[shift + k] + q - t) % q;
        }
        r.pop();
    }
    fp_trim(&mut out);
    out
}

fn fp_mul(a: &Fp, b: &Fp, q: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + fp_mulmod(*x, *y, q)) % q;
        }
    }
    fp_trim(&mut out);
    out
}

fn fp_gcd(a: &Fp, b: &Fp, q: u64) -> Fp {
    let (mut x, mut y) = (a.clone(), b.clone());
    fp_trim(&mut x);
    fp_trim(&mut y);
    while !y.is_empty() {
        let r = fp_rem(&x, &y, q);
        x = y;
        y = r;
    }
    x
}

fn fp_powmod_poly(base: &Fp, mut e: u64, m: &Fp, q: u64) -> Fp {
    let mut result: Fp = vec![1];
    let mut b = fp_rem(base, m, q);
    while e > 0 {
        if e & 1 == 1 {
            result = fp_rem(&fp_mul(&result, &b, q), m, q);
        }
        b = fp_rem(&fp_mul(&b, &b, q), m, q);
        e >>= 1;
    }
    result
}

/// Degrees of the irreducible factors of `p` modulo `q`, or `None` if `q` is a bad prime.
fn degree_pattern_mod(p: &[BigInt], q: u64) -> Option<Vec<usize>> {
    let qb = BigInt::from(q);
    let mut f: Fp = p.iter().map(|c| c.mod_floor(&qb).to_u64().unwrap_or(0)).collect();
    if f.last() == Some(&0) {
        return None;
    }
    let df: Fp = f.iter().enumerate().skip(1).map(|(k, c)| fp_mulmod(*c, k as u64 % q, q)).collect();
    if fp_gcd(&f, &df, q).len() != 1 {
        return None;
    }
    let x: Fp = vec![0, 1];
    let mut h = x.clone();
    let mut pattern = Vec::new();
    let mut i = 1;
    while f.len() > 2 * i {
        h = fp_powmod_poly(&h, q, &f, q);
        let mut hx = h.clone();
        hx.resize(hx.len().max(2), 0);
        hx[1] = (hx[1] + q - 1) % q;
        fp_trim(&mut hx);
        let g = fp_gcd(&hx, &f, q);
        let dg = g.len() - 1;
        if dg > 0 {
            pattern.extend(std::iter::repeat_n(i, dg / i));
            f = fp_divexact(&f, &g, q);
            h = fp_rem(&h, &f, q);
        }
        i += 1;
    }
    if f.len() > 1 {
        pattern.push(f.len() - 1);
    }
    Some(pattern)
}
