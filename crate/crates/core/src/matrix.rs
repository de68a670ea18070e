//! Dense square complex matrices and the numerical meaning of "equals zero".
//!
//! [`CMatrix`] wraps an `nalgebra` dense matrix and enforces squareness and
//! finiteness at construction. Arithmetic through the `std::ops` traits panics
//! on a dimension mismatch, the same contract `nalgebra` uses; the `checked_*`
//! methods return [`Error::DimensionMismatch`] instead and are what the public
//! tuple and transform entry points call on user input.
//!
//! Exchange format: a JSON array of rows, each row an array of `[re, im]`
//! pairs.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Mixed absolute/relative zero test: `‖M‖_F <= abs_eps + rel_eps * scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub rel_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_eps: 1e-10,
            rel_eps: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64, rel_eps: f64) -> Result<Self> {
        if !(abs_eps >= 0.0 && rel_eps >= 0.0) {
            return Err(invalid(format!(
                "tolerances must be non-negative, got abs={abs_eps} rel={rel_eps}"
            )));
        }
        Ok(Self { abs_eps, rel_eps })
    }

    /// Same relative and absolute epsilon.
    pub fn uniform(eps: f64) -> Result<Self> {
        Self::new(eps, eps)
    }

    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs_eps + self.rel_eps * scale
    }

    pub fn accepts(&self, norm: f64, scale: f64) -> bool {
        norm <= self.threshold(scale)
    }
}

/// A dense `n × n` complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct CMatrix(DMatrix<C64>);

impl CMatrix {
    /// Builds a matrix from rows; rejects ragged, non-square, empty or
    /// non-finite input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(invalid("matrix must have dimension >= 1"));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} entries, expected {n} (matrices are square)",
                r.len()
            )));
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::from_dmatrix(m)
    }

    /// Builds a matrix from real rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        Ok(Self(m))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(n > 0, "matrix dimension must be >= 1");
        Self(DMatrix::from_fn(n, n, f))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be >= 1");
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be >= 1");
        Self(DMatrix::zeros(n, n))
    }

    pub fn scalar(n: usize, c: C64) -> Self {
        Self::identity(n).scale(c)
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        Self::from_fn(entries.len(), |i, j| if i == j { entries[i] } else { ZERO })
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    fn check_same_dim(&self, other: &Self, op: &str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{op}: {}x{0} vs {}x{1}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "add")?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "sub")?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "mul")?;
        Ok(self * other)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self(&self.0 * C64::new(c, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// Entrywise complex conjugate; this is `C M C` for the standard-basis
    /// conjugation `C`.
    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    /// Kronecker product; block `(i, j)` of the result is `self[i, j] * other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.dim());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn fro_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value. Diagnostics only; defects are measured in the
    /// Frobenius norm.
    pub fn op_norm_estimate(&self) -> f64 {
        self.0
            .clone()
            .singular_values()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    /// Ratio of extreme singular values (infinite for a singular matrix).
    pub fn condition_estimate(&self) -> f64 {
        let sv = self.0.clone().singular_values();
        let max = sv.iter().copied().fold(0.0, f64::max);
        let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Inverse; fails with the condition estimate when the matrix is
    /// numerically singular (condition above `1e14`).
    pub fn inverse(&self) -> Result<Self> {
        let condition = self.condition_estimate();
        if !(condition < 1e14) {
            return Err(Error::SingularMatrix {
                index: None,
                condition,
            });
        }
        self.0
            .clone()
            .try_inverse()
            .map(Self)
            .ok_or(Error::SingularMatrix {
                index: None,
                condition,
            })
    }

    pub fn is_zero(&self, tol: &Tolerance, scale: f64) -> bool {
        tol.accepts(self.fro_norm(), scale)
    }

    /// Column-stacked vectorization as an `n² × 1` matrix.
    pub fn vec(&self) -> DMatrix<C64> {
        let n = self.dim();
        DMatrix::from_iterator(n * n, 1, self.0.iter().copied())
    }

    /// Inverse of [`CMatrix::vec`].
    pub fn unvec(v: &DMatrix<C64>) -> Result<Self> {
        let len = v.len();
        let n = (len as f64).sqrt().round() as usize;
        if n * n != len || n == 0 {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {len} is not a square matrix"
            )));
        }
        Ok(Self(DMatrix::from_column_slice(n, n, v.as_slice())))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMatrix{:?}", self.rows())
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|z| format_complex(*z)).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub fn format_complex(z: C64) -> String {
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    match (re == 0.0, im == 0.0) {
        (_, true) => format!("{re}"),
        (true, false) => format!("{im}i"),
        _ if im < 0.0 => format!("{re}-{}i", -im),
        _ => format!("{re}+{im}i"),
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a> $trait<&'a CMatrix> for &'a CMatrix {
            type Output = CMatrix;
            fn $method(self, rhs: &'a CMatrix) -> CMatrix {
                assert_eq!(self.dim(), rhs.dim(), "matrix dimension mismatch");
                CMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $trait<CMatrix> for CMatrix {
            type Output = CMatrix;
            fn $method(self, rhs: CMatrix) -> CMatrix {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.dim(), rhs.dim(), "matrix dimension mismatch");
        self.0 += &rhs.0;
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix(-&self.0)
    }
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let rows: Vec<Vec<C64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        CMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn adjoint_of_mixing_unitary() {
        let u = CMatrix::from_rows(&[vec![ZERO, ONE], vec![I, ZERO]]).unwrap();
        let expected = CMatrix::from_rows(&[vec![ZERO, -I], vec![ONE, ZERO]]).unwrap();
        assert_eq!(u.adjoint(), expected);
        assert_eq!(u.adjoint().adjoint(), u);
        assert!((&u.adjoint() * &u - CMatrix::identity(2)).fro_norm() < 1e-15);
    }

    #[test]
    fn kron_of_identities() {
        assert_eq!(CMatrix::identity(2).kron(&CMatrix::identity(2)), CMatrix::identity(4));
    }

    #[test]
    fn kron_block_layout() {
        let a = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let k = a.kron(&b);
        assert_eq!(k.dim(), 4);
        // block (0, 1) is 2 * b
        assert_eq!(k.get(0, 3), c(2.0, 0.0));
        assert_eq!(k.get(1, 2), c(2.0, 0.0));
        // block (1, 0) is 3 * b
        assert_eq!(k.get(2, 1), c(3.0, 0.0));
        assert_eq!(k.get(2, 0), ZERO);
    }

    #[test]
    fn inverse_of_scaled_identity() {
        let m = CMatrix::scalar(2, c(1.0 / 2f64.sqrt(), 0.0));
        let inv = m.inverse().unwrap();
        let expected = CMatrix::scalar(2, c(2f64.sqrt(), 0.0));
        assert!((&inv - &expected).fro_norm() < 1e-14);
    }

    #[test]
    fn singular_inverse_reports_condition() {
        let m = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        match m.inverse() {
            Err(Error::SingularMatrix { condition, .. }) => assert!(condition > 1e14),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn is_zero_policy() {
        let tol = Tolerance::default();
        assert!(CMatrix::zeros(3).is_zero(&tol, 0.0));
        assert!(CMatrix::scalar(2, c(1e-12, 0.0)).is_zero(&tol, 1.0));
        assert!(!CMatrix::identity(2).is_zero(&tol, 1.0));
        // relative part kicks in with scale
        assert!(CMatrix::scalar(2, c(1e-7, 0.0)).is_zero(&tol, 100.0));
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(CMatrix::from_rows(&[]).is_err());
        assert!(CMatrix::from_rows(&[vec![ONE, ONE]]).is_err());
        assert!(CMatrix::from_real_rows(&[vec![f64::NAN]]).is_err());
        assert!(Tolerance::new(-1.0, 0.0).is_err());
        let a = CMatrix::identity(2);
        let b = CMatrix::identity(3);
        assert!(matches!(a.checked_mul(&b), Err(Error::DimensionMismatch(_))));
        assert!(a.checked_add(&b).is_err());
    }

    #[test]
    fn vec_is_column_stacking() {
        let a = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let v = a.vec();
        let got: Vec<f64> = v.iter().map(|z| z.re).collect();
        assert_eq!(got, vec![1.0, 3.0, 2.0, 4.0]);
        assert_eq!(CMatrix::unvec(&v).unwrap(), a);
    }

    #[test]
    fn json_literal_round_trip() {
        let m = CMatrix::from_rows(&[vec![c(1.0, 0.5), ZERO], vec![I, c(-2.0, 0.0)]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[1.0,0.5],[0.0,0.0]],[[0.0,1.0],[-2.0,0.0]]]");
        let back: CMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<CMatrix>("[[[1,0],[0,0]]]").is_err());
    }

    #[test]
    fn conj_and_norms() {
        let m = CMatrix::scalar(2, I);
        assert_eq!(m.conj(), CMatrix::scalar(2, -I));
        assert_eq!(m.conj().conj(), m);
        assert!((CMatrix::identity(2).fro_norm() - 2f64.sqrt()).abs() < 1e-15);
        assert!((CMatrix::identity(3).op_norm_estimate() - 1.0).abs() < 1e-12);
    }
}
