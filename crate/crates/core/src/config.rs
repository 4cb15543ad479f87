//! Text formats: rationals, form-system files and vector files.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Deserialize;

use crate::arith::algebraic::parse_algebraic_real;
use crate::arith::complex_roots::ComplexRational;
use crate::arith::field::parse_nf_expression_with;
use crate::arith::{NumberField, Place, Rational};
use crate::error::{Error, Result};
use crate::systems::{FormSystem, PlaceBlock};

/// Parses `a`, `a/b` or a decimal such as `-1.25`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("bad rational `{text}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{text}`")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = BigInt::from(10).pow(frac.len() as u32);
        let r = Rational::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    Ok(Rational::from_integer(s.parse().map_err(|_| bad())?))
}

/// A number written either as a TOML integer or as a string holding an expression.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Text(String),
}

impl Entry {
    fn text(&self) -> String {
        match self {
            Entry::Int(k) => k.to_string(),
            Entry::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    n: usize,
    delta: Entry,
    generator: Option<String>,
    meta: Option<MetaFile>,
    places: Vec<PlaceFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetaFile {
    #[serde(rename = "H")]
    h: Option<Entry>,
    #[serde(rename = "D")]
    d: Option<u32>,
    #[serde(rename = "R")]
    r: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaceFile {
    place: Entry,
    constant: Entry,
    exponents: Vec<Entry>,
    forms: Vec<Vec<Entry>>,
}

fn parse_place(text: &str) -> Result<Place> {
    match text.trim() {
        "inf" | "infinity" => Ok(Place::Infinity),
        p => Place::prime(p.parse().map_err(|_| Error::Parse(format!("bad place `{p}`")))?),
    }
}

/// Parses a form-system file.
///
/// ```toml
/// n = 2
/// delta = "1"
/// generator = "poly = [-2, 0, 1]; interval = [1, 2]"
///
/// [[places]]
/// place = "inf"
/// constant = 1
/// exponents = ["-1 - delta", 1]
/// forms = [["1", "-theta"], [0, 1]]
/// ```
///
/// Coefficients are expressions in `theta`, the root given by `generator`. Exponents may use
/// `delta`. The optional `[meta]` table sets `H`, `D` and `R`; missing values take the smallest
/// admissible defaults.
pub fn parse_form_system(text: &str) -> Result<FormSystem> {
    let file: SystemFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let delta = parse_rational(&file.delta.text())?;
    let field = match &file.generator {
        Some(g) => Some(NumberField::new(parse_algebraic_real(g)?)),
        None => None,
    };
    let vars = [("delta", delta.clone())];
    let rational = |e: &Entry, what: &str| -> Result<Rational> {
        parse_nf_expression_with(&e.text(), None, &vars)?
            .as_rational()
            .ok_or_else(|| Error::Parse(format!("{what} must be rational")))
    };
    let mut blocks = Vec::with_capacity(file.places.len());
    for p in &file.places {
        let forms = p
            .forms
            .iter()
            .map(|f| f.iter().map(|c| parse_nf_expression_with(&c.text(), field.as_ref(), &vars)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        blocks.push(PlaceBlock {
            place: parse_place(&p.place.text())?,
            forms,
            exponents: p.exponents.iter().map(|e| rational(e, "exponent")).collect::<Result<_>>()?,
            constant: rational(&p.constant, "constant")?,
        });
    }
    let mut sys = FormSystem::new(file.n, delta, field, blocks, None)?;
    if let Some(m) = file.meta {
        if let Some(h) = m.h {
            sys.meta.h = rational(&h, "H")?;
        }
        if let Some(d) = m.d {
            sys.meta.d = d;
        }
        if let Some(r) = m.r {
            sys.meta.r = r;
        }
    }
    Ok(sys)
}

/// Parses one vector per line. Entries are separated by whitespace or commas and written as
/// `re` or `re:im` with rational parts. Blank lines and text after `#` are ignored.
pub fn parse_vector_file(text: &str) -> Result<Vec<Vec<ComplexRational>>> {
    let mut out: Vec<Vec<ComplexRational>> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|entry| {
                let (re, im) = entry.split_once(':').unwrap_or((entry, "0"));
                Ok(ComplexRational::new(parse_rational(re)?, parse_rational(im)?))
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", k + 1)))?;
        if let Some(first) = out.first() {
            if first.len() != v.len() {
                return Err(Error::Parse(format!("line {}: expected {} entries, found {}", k + 1, first.len(), v.len())));
            }
        }
        out.push(v);
    }
    Ok(out)
}
