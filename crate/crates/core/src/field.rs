//! Exact scalars over Q and F_p, and dense matrices over them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Kind {
    Rationals,
    Prime(u64),
}

/// The ground field. Prime fields are checked for primality on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec(Kind);

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    pub fn rationals() -> Self {
        FieldSpec(Kind::Rationals)
    }

    /// F_p for a prime `p < 2^32`.
    pub fn prime(p: u64) -> Result<Self> {
        if p >= 1 << 32 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec(Kind::Prime(p)))
    }

    pub fn is_rationals(&self) -> bool {
        matches!(self.0, Kind::Rationals)
    }

    /// The characteristic (0 for Q).
    pub fn characteristic(&self) -> u64 {
        match self.0 {
            Kind::Rationals => 0,
            Kind::Prime(p) => p,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self.0 {
            Kind::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            Kind::Prime(p) => Scalar::Residue {
                value: n.rem_euclid(p as i64) as u64,
                modulus: p,
            },
        }
    }

    /// Embeds `num/den` into the field.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Scalar> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self.0 {
            Kind::Rationals => Ok(Scalar::Rational(BigRational::new(num.clone(), den.clone()))),
            Kind::Prime(p) => {
                let m = BigInt::from(p);
                let reduce = |x: &BigInt| -> u64 {
                    let r = ((x % &m) + &m) % &m;
                    r.try_into().unwrap()
                };
                let n = Scalar::Residue { value: reduce(num), modulus: p };
                let d = Scalar::Residue { value: reduce(den), modulus: p };
                Ok(&n * &d.inv()?)
            }
        }
    }

    /// Number of elements, `None` for Q.
    pub fn size(&self) -> Option<u64> {
        match self.0 {
            Kind::Rationals => None,
            Kind::Prime(p) => Some(p),
        }
    }

    /// The `i`-th element in a fixed enumeration. Over Q: 0, 1, -1, 2, -2, ...
    pub fn element(&self, i: u64) -> Scalar {
        match self.0 {
            Kind::Rationals => {
                let v = (i as i64 + 1) / 2;
                self.from_i64(if i % 2 == 1 { v } else { -v })
            }
            Kind::Prime(p) => Scalar::Residue { value: i % p, modulus: p },
        }
    }

    pub fn contains(&self, s: &Scalar) -> bool {
        s.field() == *self
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Kind::Rationals => write!(f, "Q"),
            Kind::Prime(p) => write!(f, "F{p}"),
        }
    }
}

/// An exact field element. Rationals are kept in lowest terms (guaranteed by
/// `BigRational`); residues lie in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec(Kind::Rationals),
            Scalar::Residue { modulus, .. } => FieldSpec(Kind::Prime(*modulus)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    fn same_field(&self, other: &Scalar) -> Result<()> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.field().to_string(), other.field().to_string()))
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        self.same_field(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Residue { value: a, modulus: p }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue { value: (a + b) % p, modulus: *p }
            }
            _ => unreachable!(),
        })
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.same_field(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Residue { value: a, modulus: p }, Scalar::Residue { value: b, .. }) => Scalar::Residue {
                value: ((*a as u128 * *b as u128) % *p as u128) as u64,
                modulus: *p,
            },
            _ => unreachable!(),
        })
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: mod_pow(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        self.same_field(other)?;
        self.checked_mul(&other.inv()?)
    }

    /// The integer value, when the scalar is a rational integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        match self {
            Scalar::Rational(r) if r.is_integer() => Some(r.to_integer()),
            Scalar::Residue { value, .. } => Some(BigInt::from(*value)),
            _ => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Rational(r) if r.is_negative())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

// Operator forms panic on mixed fields; that is always a programming error
// inside the crate, since every structure carries a single FieldSpec.
impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.checked_add(rhs).expect("scalar field mismatch")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.checked_mul(rhs).expect("scalar field mismatch")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

/// `acc += a * b` without an intermediate clone of `acc`.
pub fn add_mul(acc: &mut Scalar, a: &Scalar, b: &Scalar) {
    if a.is_zero() || b.is_zero() {
        return;
    }
    match (acc, a, b) {
        (Scalar::Rational(s), Scalar::Rational(x), Scalar::Rational(y)) => *s += x * y,
        (Scalar::Residue { value: s, modulus: p }, Scalar::Residue { value: x, .. }, Scalar::Residue { value: y, .. }) => {
            *s = ((*s as u128 + *x as u128 * *y as u128) % *p as u128) as u64;
        }
        _ => panic!("scalar field mismatch"),
    }
}

/// Dense row-major matrix over a single field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Solution set of `A X = B`: one particular solution (free variables set to
/// zero) and a basis of the null space of `A` in reduced echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSolution {
    pub particular: Matrix,
    pub nullspace: Vec<Vec<Scalar>>,
}

impl Matrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    /// Builds a matrix from rows; all entries must lie in `field`.
    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            for s in row {
                if !field.contains(&s) {
                    return Err(Error::FieldMismatch(field.to_string(), s.field().to_string()));
                }
                data.push(s);
            }
        }
        Ok(Matrix { field, rows: r, cols: c, data })
    }

    pub fn from_i64(field: FieldSpec, rows: &[&[i64]]) -> Self {
        let v = rows.iter().map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect();
        Self::from_rows(field, v).expect("well-formed integer matrix")
    }

    /// A column vector.
    pub fn column(field: FieldSpec, v: Vec<Scalar>) -> Self {
        let n = v.len();
        Matrix { field, rows: n, cols: 1, data: v }
    }

    pub fn from_columns(field: FieldSpec, rows: usize, cols: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, s) in c.iter().enumerate() {
                m.data[i * m.cols + j] = s.clone();
            }
        }
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| {
                let v = self.get(i, j);
                if i == j { v.is_one() } else { v.is_zero() }
            }))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.to_string(), other.field.to_string()));
        }
        let mut out = Self::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    add_mul(&mut out.data[idx], a, other.get(k, j));
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length");
        let mut out = vec![self.field.zero(); self.rows];
        for i in 0..self.rows {
            for (j, x) in v.iter().enumerate() {
                add_mul(&mut out[i], self.get(i, j), x);
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.checked_add(b)).collect::<Result<_>>()?;
        Ok(Matrix { field: self.field, rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.scale(&self.field.from_i64(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Reduced row echelon form and pivot columns (left-to-right).
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self.get(r, c).inv().expect("nonzero pivot");
            for j in c..self.cols {
                let idx = r * self.cols + j;
                self.data[idx] = &self.data[idx] * &inv;
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c).clone();
                if factor.is_zero() {
                    continue;
                }
                let neg = -&factor;
                for j in c..self.cols {
                    let pv = self.data[r * self.cols + j].clone();
                    add_mul(&mut self.data[i * self.cols + j], &neg, &pv);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : A x = 0}`, rows in reduced echelon form.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let mut is_pivot = vec![None; self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(i);
        }
        for free in 0..self.cols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -r.get(i, free);
            }
            basis.push(v);
        }
        if basis.is_empty() {
            return basis;
        }
        let (e, piv) = Matrix::from_rows(self.field, basis).expect("consistent rows").rref();
        (0..piv.len()).map(|i| e.row(i).to_vec()).collect()
    }

    /// Solves `A X = B`. Returns `None` when the system is inconsistent.
    pub fn solve(&self, b: &Matrix) -> Result<Option<LinearSolution>> {
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch("right-hand side rows".into()));
        }
        if self.field != b.field {
            return Err(Error::FieldMismatch(self.field.to_string(), b.field.to_string()));
        }
        let n = self.cols;
        let mut aug = Self::zeros(self.field, self.rows, n + b.cols);
        for i in 0..self.rows {
            for j in 0..n {
                aug.data[i * (n + b.cols) + j] = self.get(i, j).clone();
            }
            for j in 0..b.cols {
                aug.data[i * (n + b.cols) + n + j] = b.get(i, j).clone();
            }
        }
        let pivots = aug.rref_in_place();
        if pivots.iter().any(|&c| c >= n) {
            return Ok(None);
        }
        let mut particular = Self::zeros(self.field, n, b.cols);
        for (i, &c) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                particular.data[c * b.cols + j] = aug.get(i, n + j).clone();
            }
        }
        Ok(Some(LinearSolution { particular, nullspace: self.nullspace() }))
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let sol = self.solve(&Self::identity(self.field, self.rows)).ok()??;
        if sol.nullspace.is_empty() {
            Some(sol.particular)
        } else {
            None
        }
    }

    pub fn det(&self) -> Result<Scalar> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let mut m = self.clone();
        let n = self.rows;
        let mut det = self.field.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(self.field.zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -&det;
            }
            let pv = m.get(c, c).clone();
            det = &det * &pv;
            let inv = pv.inv()?;
            for i in c + 1..n {
                let f = m.get(i, c) * &inv;
                if f.is_zero() {
                    continue;
                }
                let neg = -&f;
                for j in c..n {
                    let v = m.get(c, j).clone();
                    add_mul(&mut m.data[i * n + j], &neg, &v);
                }
            }
        }
        Ok(det)
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data })
    }
}

/// Reduces `v` modulo the row space of an RREF matrix with the given pivots.
pub fn reduce_mod(v: &mut [Scalar], rref_rows: &[Vec<Scalar>], pivots: &[usize]) {
    for (row, &p) in rref_rows.iter().zip(pivots) {
        if v[p].is_zero() {
            continue;
        }
        let f = -&v[p];
        for (x, r) in v.iter_mut().zip(row) {
            add_mul(x, &f, r);
        }
    }
}

/// Row-reduced basis of the span of `vectors`, with pivots.
pub fn span_basis(field: FieldSpec, vectors: Vec<Vec<Scalar>>) -> (Vec<Vec<Scalar>>, Vec<usize>) {
    if vectors.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let m = Matrix::from_rows(field, vectors).expect("consistent rows");
    let (r, piv) = m.rref();
    ((0..piv.len()).map(|i| r.row(i).to_vec()).collect(), piv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        FieldSpec::rationals().from_ratio(&BigInt::from(n), &BigInt::from(d)).unwrap()
    }

    #[test]
    fn inverse_mod_five() {
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(f5.from_i64(2).inv().unwrap(), f5.from_i64(3));
    }

    #[test]
    fn rational_sum() {
        assert_eq!(&q(1, 2) + &q(1, 3), q(5, 6));
        assert_eq!(q(2, 4).to_string(), "1/2");
        assert_eq!(q(-6, -3).to_string(), "2");
    }

    #[test]
    fn zero_absorbs() {
        let f = FieldSpec::rationals();
        assert!((&f.zero() * &q(7, 3)).is_zero());
    }

    #[test]
    fn errors() {
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(f5.zero().inv(), Err(Error::DivisionByZero));
        assert!(matches!(f5.one().checked_add(&q(1, 1)), Err(Error::FieldMismatch(..))));
        assert_eq!(FieldSpec::prime(6), Err(Error::NotPrime(6)));
    }

    #[test]
    fn solve_identity() {
        let f = FieldSpec::rationals();
        let a = Matrix::identity(f, 3);
        let b = Matrix::from_i64(f, &[&[1], &[0], &[0]]);
        let s = a.solve(&b).unwrap().unwrap();
        assert_eq!(s.particular, b);
        assert!(s.nullspace.is_empty());
    }

    #[test]
    fn nullspace_of_row() {
        let f = FieldSpec::rationals();
        let a = Matrix::from_i64(f, &[&[1, 1]]);
        let s = a.solve(&Matrix::from_i64(f, &[&[0]])).unwrap().unwrap();
        assert_eq!(s.nullspace, vec![vec![f.from_i64(1), f.from_i64(-1)]]);
    }

    #[test]
    fn solve_mod_five() {
        let f5 = FieldSpec::prime(5).unwrap();
        let s = Matrix::from_i64(f5, &[&[2]]).solve(&Matrix::from_i64(f5, &[&[1]])).unwrap().unwrap();
        assert_eq!(s.particular.get(0, 0), &f5.from_i64(3));
    }

    #[test]
    fn inconsistent() {
        let f = FieldSpec::rationals();
        let a = Matrix::from_i64(f, &[&[1, 1], &[1, 1]]);
        let b = Matrix::from_i64(f, &[&[0], &[1]]);
        assert!(a.solve(&b).unwrap().is_none());
    }

    #[test]
    fn determinant() {
        let f = FieldSpec::rationals();
        let a = Matrix::from_i64(f, &[&[1, 0, 0], &[0, 1, -1], &[0, 1, 0]]);
        assert_eq!(a.det().unwrap(), f.one());
        assert_eq!(a.inverse().unwrap().mul(&a).unwrap(), Matrix::identity(f, 3));
    }
}
