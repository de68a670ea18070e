//! Kronecker lifts of the transforms, used as an independent oracle.
//!
//! With column-stacking `vec`, `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::check_shapes;
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, C64};
use crate::multiindex::binomial_f64;
use crate::tuples::OperatorTuple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuperopKind {
    /// `Σ_i B_iᵀ ⊗ A_i`, the lift of `X ↦ Σ_i A_i X B_i`.
    Sigma,
    /// `I ⊗ ΣA`, the lift of `X ↦ (ΣA) X`.
    LeftSum,
    /// `(ΣB)ᵀ ⊗ I`, the lift of `X ↦ X (ΣB)`.
    RightSum,
}

/// The `n² × n²` matrix of the chosen map.
pub fn superop_matrix(a: &OperatorTuple, b: &OperatorTuple, kind: SuperopKind) -> Result<CMatrix> {
    if a.d() != b.d() || a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "superop_matrix: tuples of shape ({}, {}) and ({}, {})",
            a.d(),
            a.dim(),
            b.d(),
            b.dim()
        )));
    }
    let id = CMatrix::identity(a.dim());
    Ok(match kind {
        SuperopKind::Sigma => {
            let mut acc = CMatrix::zeros(a.dim() * a.dim());
            for (ai, bi) in a.iter().zip(b.iter()) {
                acc += &bi.transpose().kron(ai);
            }
            acc
        }
        SuperopKind::LeftSum => id.kron(&a.sum_matrix()),
        SuperopKind::RightSum => b.sum_matrix().transpose().kron(&id),
    })
}

fn apply(m: &CMatrix, v: &DMatrix<C64>) -> DMatrix<C64> {
    m.as_dmatrix() * v
}

/// `Σ^j(X)` through the lifted matrix.
pub fn sigma_superop_power(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix, j: u32) -> Result<CMatrix> {
    check_shapes(a, b, x)?;
    let s = superop_matrix(a, b, SuperopKind::Sigma)?;
    let mut v = x.vec();
    for _ in 0..j {
        v = apply(&s, &v);
    }
    CMatrix::unvec(&v)
}

/// `(I - Σ̂)^m vec(X)`, formed as a matrix power before touching `X`.
pub fn triangle_superop(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix, m: u32) -> Result<CMatrix> {
    check_shapes(a, b, x)?;
    let s = superop_matrix(a, b, SuperopKind::Sigma)?;
    let n2 = s.dim();
    let op = &CMatrix::identity(n2) - &s;
    CMatrix::unvec(&apply(&op.pow(m), &x.vec()))
}

/// `(L̂ - R̂)^n vec(X)`, expanded binomially in the commuting lifts.
pub fn delta_superop(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix, n: u32) -> Result<CMatrix> {
    check_shapes(a, b, x)?;
    let l = superop_matrix(a, b, SuperopKind::LeftSum)?;
    let r = superop_matrix(a, b, SuperopKind::RightSum)?;
    let mut op = CMatrix::zeros(l.dim());
    for j in 0..=n {
        let c = binomial_f64(n as u64, j as u64);
        let signed = if j % 2 == 0 { c } else { -c };
        op += &(&l.pow(n - j) * &r.pow(j)).scale_real(signed);
    }
    CMatrix::unvec(&apply(&op, &x.vec()))
}
