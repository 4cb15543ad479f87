//! Arithmetic in a real number field `ℚ(θ)` generated by one real algebraic number.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::algebraic::AlgebraicReal;
use super::complex_roots::mahler_measure;
use super::enclosure::RealEnclosure;
use super::poly::{self, RatPoly};
use super::real::{magnitude_bits, precision_cap, precision_ladder, Real};
use super::Rational;
use crate::error::{Error, Result};

/// The field `ℚ(θ)` with a distinguished real embedding.
#[derive(Debug)]
pub struct NumberField {
    generator: AlgebraicReal,
    modulus: RatPoly,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.generator == other.generator
    }
}

impl NumberField {
    pub fn new(generator: AlgebraicReal) -> Arc<NumberField> {
        let modulus = poly::make_monic(&poly::to_rat(generator.minpoly()));
        Arc::new(NumberField { generator, modulus })
    }

    pub fn generator(&self) -> &AlgebraicReal {
        &self.generator
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }
}

/// An element of `ℚ(θ)`, stored as a polynomial in `θ` of degree below `[ℚ(θ):ℚ]`.
///
/// Elements without a field are plain rationals and combine with elements of any field.
#[derive(Clone, Debug)]
pub struct NfElem {
    field: Option<Arc<NumberField>>,
    coeffs: RatPoly,
}

impl PartialEq for NfElem {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for NfElem {}

impl PartialOrd for NfElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NfElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.len().cmp(&other.coeffs.len()).then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl std::hash::Hash for NfElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl From<Rational> for NfElem {
    fn from(r: Rational) -> NfElem {
        NfElem::rational(r)
    }
}

fn join(a: &Option<Arc<NumberField>>, b: &Option<Arc<NumberField>>) -> Option<Arc<NumberField>> {
    match (a, b) {
        (Some(x), Some(y)) => {
            assert!(Arc::ptr_eq(x, y) || x == y, "elements of different number fields");
            Some(x.clone())
        }
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    }
}

impl NfElem {
    pub fn rational(r: Rational) -> NfElem {
        let mut coeffs = vec![r];
        poly::trim_rat(&mut coeffs);
        NfElem { field: None, coeffs }
    }

    pub fn integer(n: i64) -> NfElem {
        NfElem::rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> NfElem {
        NfElem { field: None, coeffs: Vec::new() }
    }

    pub fn one() -> NfElem {
        NfElem::integer(1)
    }

    /// The generator `θ` itself.
    pub fn generator(field: &Arc<NumberField>) -> NfElem {
        NfElem::from_poly(field.clone(), vec![Rational::zero(), Rational::one()])
    }

    /// The element `p(θ)`.
    pub fn from_poly(field: Arc<NumberField>, p: RatPoly) -> NfElem {
        let coeffs = poly::rem_rat(&p, &field.modulus);
        if coeffs.len() <= 1 {
            return NfElem { field: None, coeffs };
        }
        NfElem { field: Some(field), coeffs }
    }

    fn build(field: Option<Arc<NumberField>>, p: RatPoly) -> NfElem {
        match field {
            Some(f) => NfElem::from_poly(f, p),
            None => {
                let mut p = p;
                poly::trim_rat(&mut p);
                NfElem { field: None, coeffs: p }
            }
        }
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.field.as_ref()
    }

    /// Coefficients of the representing polynomial in `θ`, constant term first.
    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &NfElem) -> NfElem {
        NfElem::build(join(&self.field, &other.field), poly::add_rat(&self.coeffs, &other.coeffs))
    }

    pub fn sub(&self, other: &NfElem) -> NfElem {
        NfElem::build(join(&self.field, &other.field), poly::sub_rat(&self.coeffs, &other.coeffs))
    }

    pub fn neg(&self) -> NfElem {
        NfElem { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &NfElem) -> NfElem {
        NfElem::build(join(&self.field, &other.field), poly::mul_rat(&self.coeffs, &other.coeffs))
    }

    pub fn scale(&self, r: &Rational) -> NfElem {
        NfElem::build(self.field.clone(), poly::scale_rat(&self.coeffs, r))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<NfElem> {
        if self.is_zero() {
            return None;
        }
        match &self.field {
            None => Some(NfElem::rational(self.coeffs[0].recip())),
            Some(f) => {
                let (g, s) = poly::gcdext_rat(&self.coeffs, &f.modulus);
                debug_assert_eq!(g.len(), 1, "modulus is irreducible");
                Some(NfElem::from_poly(f.clone(), s))
            }
        }
    }

    pub fn div(&self, other: &NfElem) -> Option<NfElem> {
        other.inv().map(|i| self.mul(&i))
    }

    pub fn pow(&self, k: u32) -> NfElem {
        let mut result = NfElem::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        result
    }

    /// `Σ c_i x_i` for integer `x`.
    pub fn dot_integer(coeffs: &[NfElem], x: &[BigInt]) -> NfElem {
        coeffs
            .iter()
            .zip(x)
            .filter(|(_, xi)| !xi.is_zero())
            .fold(NfElem::zero(), |acc, (c, xi)| acc.add(&c.scale(&Rational::from_integer(xi.clone()))))
    }

    /// Enclosure of the real value, computed from a `θ` enclosure of width `2^-(bits+guard)`.
    pub fn enclosure(&self, bits: u32) -> RealEnclosure {
        match (&self.field, self.as_rational()) {
            (_, Some(r)) => RealEnclosure::exact(r),
            (Some(f), None) => {
                let theta = f.generator.enclosure(8);
                let guard = magnitude_bits(&theta) * self.coeffs.len() as u32
                    + self
                        .coeffs
                        .iter()
                        .map(|c| super::enclosure::log2_estimate(c).max(0) as u32)
                        .max()
                        .unwrap_or(0)
                    + 8
                    + self.coeffs.len() as u32;
                let theta = f.generator.enclosure(bits + guard);
                poly::eval_enclosure(&self.coeffs, &theta)
            }
            (None, None) => unreachable!("rational elements have at most one coefficient"),
        }
    }

    pub fn to_real(&self) -> Real {
        if let Some(r) = self.as_rational() {
            return Real::rational(r);
        }
        let this = self.clone();
        Real::from_fn(move |p| Ok(this.enclosure(p)))
    }

    /// Certified sign. Nonzero elements are always separated from zero eventually.
    pub fn signum(&self) -> Result<Ordering> {
        if let Some(r) = self.as_rational() {
            return Ok(r.cmp(&Rational::zero()));
        }
        for p in precision_ladder() {
            if let Some(o) = self.enclosure(p).certain_cmp_rational(&Rational::zero()) {
                return Ok(o);
            }
        }
        Err(Error::Undecided { cap: precision_cap() })
    }

    pub fn cmp_rational(&self, r: &Rational) -> Result<Ordering> {
        self.sub(&NfElem::rational(r.clone())).signum()
    }

    pub fn abs(&self) -> Result<NfElem> {
        Ok(if self.signum()? == Ordering::Less { self.neg() } else { self.clone() })
    }

    /// Enclosure of `|self|` with width at most `2^-bits`; exact for rational values.
    pub fn abs_enclosure_width(&self, bits: u32) -> Result<RealEnclosure> {
        if let Some(r) = self.as_rational() {
            return Ok(RealEnclosure::exact(r.abs()));
        }
        let sign = self.signum()?;
        let e = self.to_real().enclosure_width(bits)?;
        Ok(if sign == Ordering::Less { e.neg() } else { e })
    }

    /// Primitive integer minimal polynomial, from the squarefree part of the characteristic
    /// polynomial of multiplication by the element.
    pub fn minimal_polynomial(&self) -> Vec<BigInt> {
        let Some(f) = &self.field else {
            let r = self.as_rational().unwrap_or_default();
            return poly::primitive_part(&vec![-r, Rational::one()]);
        };
        let d = f.degree();
        let mut matrix = vec![vec![Rational::zero(); d]; d];
        for j in 0..d {
            let mut basis = vec![Rational::zero(); j + 1];
            basis[j] = Rational::one();
            let col = poly::rem_rat(&poly::mul_rat(&self.coeffs, &basis), &f.modulus);
            for (i, c) in col.into_iter().enumerate() {
                matrix[i][j] = c;
            }
        }
        let charpoly = faddeev_leverrier(&matrix);
        poly::primitive_part(&poly::squarefree_part(&charpoly))
    }

    pub fn degree(&self) -> usize {
        self.minimal_polynomial().len() - 1
    }

    /// Absolute height of the element.
    pub fn height(&self) -> Result<Real> {
        if let Some(r) = self.as_rational() {
            return Ok(Real::rational(Rational::from_integer(super::height_rational(&r))));
        }
        let m = self.minimal_polynomial();
        let d = (m.len() - 1) as u32;
        Ok(mahler_measure(&m)?.root(d))
    }
}

/// Characteristic polynomial `det(X·I - A)`, constant term first.
pub fn faddeev_leverrier(a: &[Vec<Rational>]) -> RatPoly {
    let n = a.len();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut m = vec![vec![Rational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1}·I
        let mut next = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Rational::zero();
                for l in 0..n {
                    s += &a[i][l] * &m[l][j];
                }
                if i == j {
                    s += &coeffs[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut trace = Rational::zero();
        for i in 0..n {
            for l in 0..n {
                trace += &a[i][l] * &m[l][i];
            }
        }
        coeffs[n - k] = -trace / Rational::from_integer(BigInt::from(k));
    }
    coeffs
}

impl fmt::Display for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    f.write_str("theta")?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parses an arithmetic expression in rationals and the generator `theta`.
///
/// Supports `+ - * /`, integer powers `^k`, parentheses, integers, and decimals.
pub fn parse_nf_expression(text: &str, field: Option<&Arc<NumberField>>) -> Result<NfElem> {
    parse_nf_expression_with(text, field, &[])
}

/// As [`parse_nf_expression`], with named rational constants.
pub fn parse_nf_expression_with(text: &str, field: Option<&Arc<NumberField>>, vars: &[(&str, Rational)]) -> Result<NfElem> {
    let tokens = tokenize(text)?;
    let mut parser = ExprParser { tokens, pos: 0, field, vars };
    let value = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse(format!("unexpected trailing input in `{text}`")));
    }
    Ok(value)
}

const MAX_LITERAL_BITS: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token::Num(crate::config::parse_rational(&s)?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    field: Option<&'a Arc<NumberField>>,
    vars: &'a [(&'a str, Rational)],
}

impl ExprParser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<NfElem> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<NfElem> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' {
                acc.mul(&rhs)
            } else {
                acc.div(&rhs).ok_or_else(|| Error::Parse("division by zero".into()))?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<NfElem> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<NfElem> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let Some(Token::Num(k)) = self.tokens.get(self.pos).cloned() else {
                return Err(Error::Parse("exponent must be a nonnegative integer".into()));
            };
            self.pos += 1;
            let k = u32::try_from(k.to_integer())
                .ok()
                .filter(|_| k.is_integer() && k <= Rational::from_integer(BigInt::from(1 << 12)))
                .ok_or_else(|| Error::Parse(format!("bad exponent {k}")))?;
            let value = base.pow(k);
            if value.coefficients().iter().any(|c| c.numer().bits() + c.denom().bits() > MAX_LITERAL_BITS) {
                return Err(Error::Parse("expression value too large".into()));
            }
            return Ok(value);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<NfElem> {
        let token = self.tokens.get(self.pos).cloned().ok_or_else(|| Error::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        match token {
            Token::Num(r) => Ok(NfElem::rational(r)),
            Token::Ident(name) if name == "theta" => match self.field {
                Some(f) => Ok(NfElem::generator(f)),
                None => Err(Error::Parse("`theta` used but no generator is defined".into())),
            },
            Token::Ident(name) => match self.vars.iter().find(|(k, _)| *k == name) {
                Some((_, v)) => Ok(NfElem::rational(v.clone())),
                None => Err(Error::Parse(format!("unknown identifier `{name}`"))),
            },
            Token::Op('(') => {
                let v = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                self.pos += 1;
                Ok(v)
            }
            Token::Op(c) => Err(Error::Parse(format!("unexpected `{c}`"))),
        }
    }
}
