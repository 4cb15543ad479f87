//! Exact linear algebra over ℚ, over a number field `ℚ(θ)` and over `ℚ(i)`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{NfElem, Rational};

/// Field operations needed by Gaussian elimination.
pub trait Scalar: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
}

impl Scalar for NfElem {
    fn zero() -> Self {
        NfElem::zero()
    }
    fn one() -> Self {
        NfElem::one()
    }
    fn is_zero(&self) -> bool {
        NfElem::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        NfElem::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        NfElem::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        NfElem::mul(self, other)
    }
    fn neg(&self) -> Self {
        NfElem::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        NfElem::inv(self)
    }
}

pub type ComplexRational = Complex<Rational>;

impl Scalar for ComplexRational {
    fn zero() -> Self {
        Complex::new(<Rational as Zero>::zero(), <Rational as Zero>::zero())
    }
    fn one() -> Self {
        Complex::new(<Rational as One>::one(), <Rational as Zero>::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn inv(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            return None;
        }
        let n = self.norm_sqr();
        Some(Complex::new(&self.re / &n, -&self.im / &n))
    }
}

/// Reduced row echelon form with zero rows removed, and the pivot columns.
pub fn rref<S: Scalar>(rows: &[Vec<S>]) -> (Vec<Vec<S>>, Vec<usize>) {
    let mut m: Vec<Vec<S>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        m[r] = m[r].iter().map(|x| x.mul(&inv)).collect();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let (head, tail) = if i < r { let (a, b) = m.split_at_mut(r); (&mut a[i], &b[0]) } else { let (a, b) = m.split_at_mut(i); (&mut b[0], &a[r]) };
                for (x, y) in head.iter_mut().zip(tail.iter()) {
                    *x = x.sub(&f.mul(y));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    rref(rows).0.len()
}

/// Determinant of a square matrix by fraction-based elimination.
pub fn det<S: Scalar>(rows: &[Vec<S>]) -> S {
    let n = rows.len();
    let mut m = rows.to_vec();
    let mut d = S::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return S::zero() };
        if p != c {
            m.swap(p, c);
            d = d.neg();
        }
        d = d.mul(&m[c][c]);
        let inv = m[c][c].inv().expect("nonzero pivot");
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].mul(&inv);
            for j in c..n {
                let t = f.mul(&m[c][j]);
                m[i][j] = m[i][j].sub(&t);
            }
        }
    }
    d
}

/// Basis of `{x : rows·x = 0}` for a matrix with `ncols` columns.
pub fn nullspace<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> Vec<Vec<S>> {
    let (r, pivots) = rref(rows);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); ncols];
            v[f] = S::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = row[f].neg();
            }
            v
        })
        .collect()
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

/// A linear subspace of `Sⁿ`, stored by the reduced row echelon form of a basis.
///
/// The representation is canonical, so equal subspaces compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubspaceOver<S> {
    n: usize,
    basis: Vec<Vec<S>>,
}

pub type Subspace = SubspaceOver<Rational>;

impl<S: Scalar> SubspaceOver<S> {
    pub fn span(n: usize, vectors: &[Vec<S>]) -> Self {
        assert!(vectors.iter().all(|v| v.len() == n), "vector length must equal the dimension");
        SubspaceOver { n, basis: rref(vectors).0 }
    }

    pub fn zero(n: usize) -> Self {
        SubspaceOver { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        let id: Vec<Vec<S>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
            .collect();
        SubspaceOver { n, basis: id }
    }

    /// Common zero set of linear forms given by coefficient rows.
    pub fn kernel(n: usize, forms: &[Vec<S>]) -> Self {
        SubspaceOver::span(n, &nullspace(forms, n))
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<S>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.n
    }

    pub fn contains(&self, v: &[S]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        rank(&rows) == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    /// Linear forms whose common kernel is this subspace.
    pub fn annihilator(&self) -> Vec<Vec<S>> {
        nullspace(&self.basis, self.n)
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        SubspaceOver::span(self.n, &rows)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut eqs = self.annihilator();
        eqs.extend(other.annihilator());
        SubspaceOver::kernel(self.n, &eqs)
    }
}

impl SubspaceOver<NfElem> {
    /// `U ∩ ℚⁿ`: each defining equation splits into one rational equation per power of `θ`.
    pub fn rational_part(&self) -> Subspace {
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for eq in self.annihilator() {
            let width = eq.iter().map(|c| c.coefficients().len()).max().unwrap_or(0);
            for k in 0..width {
                rows.push(eq.iter().map(|c| c.coefficients().get(k).cloned().unwrap_or_default()).collect());
            }
        }
        Subspace::kernel(self.n, &rows)
    }

    pub fn from_rational(u: &Subspace) -> Self {
        let rows: Vec<Vec<NfElem>> = u.basis.iter().map(|r| r.iter().cloned().map(NfElem::rational).collect()).collect();
        SubspaceOver { n: u.n, basis: rows }
    }
}

impl Subspace {
    /// Basis of primitive integer vectors proportional to the canonical basis rows.
    pub fn integer_basis(&self) -> Vec<Vec<BigInt>> {
        self.basis.iter().map(|r| primitive_integer_vector(r)).collect()
    }
}

impl Serialize for Subspace {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        use serde::ser::SerializeStruct;
        let rows: Vec<Vec<String>> = self.basis.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
        let mut st = s.serialize_struct("Subspace", 3)?;
        st.serialize_field("ambient_dim", &self.n)?;
        st.serialize_field("dim", &self.basis.len())?;
        st.serialize_field("basis", &rows)?;
        st.end()
    }
}

/// The primitive integer vector on the line through a nonzero rational vector, with the same
/// direction.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = v.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &g).collect()
}

pub fn to_rational_rows(rows: &[Vec<BigInt>]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.iter().cloned().map(Rational::from_integer).collect()).collect()
}

/// Exact determinant of an integer matrix.
pub fn det_integer(rows: &[Vec<BigInt>]) -> BigInt {
    det(&to_rational_rows(rows)).to_integer()
}

/// LLL reduction (parameter 3/4) of linearly independent integer vectors.
pub fn lll_reduce(basis: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut b: Vec<Vec<BigInt>> = basis.to_vec();
    let k_max = b.len();
    if k_max <= 1 {
        return b;
    }
    let gram_schmidt = |b: &[Vec<BigInt>]| -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>, Vec<Rational>) {
        let m = b.len();
        let mut star: Vec<Vec<Rational>> = Vec::with_capacity(m);
        let mut mu = vec![vec![<Rational as Zero>::zero(); m]; m];
        let mut norms = Vec::with_capacity(m);
        for i in 0..m {
            let mut v: Vec<Rational> = b[i].iter().cloned().map(Rational::from_integer).collect();
            for j in 0..i {
                let num = b[i].iter().zip(&star[j]).fold(<Rational as Zero>::zero(), |a, (p, q)| a + Rational::from_integer(p.clone()) * q);
                mu[i][j] = num / &norms[j];
                for (x, y) in v.iter_mut().zip(&star[j]) {
                    *x -= &mu[i][j] * y;
                }
            }
            norms.push(dot(&v, &v));
            star.push(v);
        }
        (star, mu, norms)
    };
    let three_quarters = Rational::new(BigInt::from(3), BigInt::from(4));
    let mut k = 1;
    let (_, mut mu, mut norms) = gram_schmidt(&b);
    while k < k_max {
        for j in (0..k).rev() {
            let q = mu[k][j].round().to_integer();
            if !q.is_zero() {
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &q * y;
                }
                let (_, m2, n2) = gram_schmidt(&b);
                mu = m2;
                norms = n2;
            }
        }
        let lhs = &norms[k];
        let rhs = (&three_quarters - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            let (_, m2, n2) = gram_schmidt(&b);
            mu = m2;
            norms = n2;
            k = (k - 1).max(1);
        }
    }
    b
}

/// Hermite normal form (row style, upper triangular, positive pivots) of the lattice spanned
/// by integer rows. Zero rows are dropped.
pub fn hermite_normal_form(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|c| !c.is_zero())).cloned().collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        if r >= m.len() {
            break;
        }
        // Euclid on column c below row r
        loop {
            let nonzero: Vec<usize> = (r..m.len()).filter(|&i| !m[i][c].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let p = *nonzero.iter().min_by_key(|&&i| m[i][c].abs()).expect("nonempty");
            m.swap(r, p);
            let mut done = true;
            for i in r + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[r][c]);
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[r][c].is_zero() {
            continue;
        }
        if m[r][c].is_negative() {
            for x in m[r].iter_mut() {
                *x = -x.clone();
            }
        }
        let pivot_row = m[r].clone();
        for i in 0..r {
            let q = m[i][c].div_floor(&pivot_row[c]);
            if !q.is_zero() {
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
            }
        }
        r += 1;
    }
    m.retain(|row| row.iter().any(|c| !c.is_zero()));
    m
}
