//! Degree classification of pairs of tuples.
//!
//! A defect counts as zero when its Frobenius norm is at most
//! `abs_eps + rel_eps · scale`, where `scale` is the sum of the norms of the
//! terms in its binomial expansion (see [`crate::transforms`]).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::matrix::{CMatrix, Tolerance};
use crate::transforms::{delta_profile, delta_scaled, isosym_scaled, triangle_profile, triangle_scaled, Defect};
use crate::tuples::{adjoint_tuple, OperatorTuple};

pub const DEFAULT_K_MAX: u32 = 12;

pub fn is_isometric(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix, m: u32, tol: &Tolerance) -> Result<bool> {
    Ok(triangle_scaled(a, b, x, m)?.is_zero(tol))
}

pub fn is_symmetric(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix, n: u32, tol: &Tolerance) -> Result<bool> {
    Ok(delta_scaled(a, b, x, n)?.is_zero(tol))
}

pub fn is_isosymmetric(
    a: &OperatorTuple,
    b: &OperatorTuple,
    x: &CMatrix,
    m: u32,
    n: u32,
    tol: &Tolerance,
) -> Result<bool> {
    Ok(isosym_scaled(a, b, x, m, n)?.is_zero(tol))
}

/// Defect norms by degree with minimal vanishing degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectProfile {
    pub k_max: u32,
    /// `‖Δ^k(X)‖_F` for `k = 0..=k_max`.
    pub triangle_norms: Vec<f64>,
    pub triangle_scales: Vec<f64>,
    /// `‖δ^k(X)‖_F` for `k = 0..=k_max`.
    pub delta_norms: Vec<f64>,
    pub delta_scales: Vec<f64>,
    pub min_isometry_degree: Option<u32>,
    pub min_symmetry_degree: Option<u32>,
    /// Degrees above the minimum whose defect is not zero. Exact arithmetic
    /// makes the pass-set upward closed, so anything listed here is a
    /// tolerance artefact.
    pub isometry_anomalies: Vec<u32>,
    pub symmetry_anomalies: Vec<u32>,
}

impl DefectProfile {
    pub fn anomaly_count(&self) -> usize {
        self.isometry_anomalies.len() + self.symmetry_anomalies.len()
    }
}

fn scan(defects: &[Defect], tol: &Tolerance) -> (Option<u32>, Vec<u32>) {
    let pass: Vec<bool> = defects.iter().map(|d| d.is_zero(tol)).collect();
    let min = pass.iter().position(|&p| p).map(|k| k as u32);
    let anomalies = match min {
        Some(k0) => (k0 as usize..pass.len())
            .filter(|&k| !pass[k])
            .map(|k| k as u32)
            .collect(),
        None => Vec::new(),
    };
    (min, anomalies)
}

pub fn defect_profile(
    a: &OperatorTuple,
    b: &OperatorTuple,
    x: &CMatrix,
    k_max: u32,
    tol: &Tolerance,
) -> Result<DefectProfile> {
    if k_max == 0 {
        return Err(invalid("k_max must be >= 1"));
    }
    let tri = triangle_profile(a, b, x, k_max)?;
    let del = delta_profile(a, b, x, k_max)?;
    let (min_iso, iso_anom) = scan(&tri, tol);
    let (min_sym, sym_anom) = scan(&del, tol);
    Ok(DefectProfile {
        k_max,
        triangle_norms: tri.iter().map(Defect::norm).collect(),
        triangle_scales: tri.iter().map(|d| d.scale).collect(),
        delta_norms: del.iter().map(Defect::norm).collect(),
        delta_scales: del.iter().map(|d| d.scale).collect(),
        min_isometry_degree: min_iso,
        min_symmetry_degree: min_sym,
        isometry_anomalies: iso_anom,
        symmetry_anomalies: sym_anom,
    })
}

/// Least `k <= k_max` with `Δ^k(X) = 0`.
pub fn min_isometry_degree(
    a: &OperatorTuple,
    b: &OperatorTuple,
    x: &CMatrix,
    k_max: u32,
    tol: &Tolerance,
) -> Result<Option<u32>> {
    Ok(scan(&triangle_profile(a, b, x, k_max)?, tol).0)
}

/// Least `k <= k_max` with `δ^k(X) = 0`.
pub fn min_symmetry_degree(
    a: &OperatorTuple,
    b: &OperatorTuple,
    x: &CMatrix,
    k_max: u32,
    tol: &Tolerance,
) -> Result<Option<u32>> {
    Ok(scan(&delta_profile(a, b, x, k_max)?, tol).0)
}

/// Outcome of the spherical reduction check on a tuple `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalReport {
    /// `‖Δ²_{A*,A}(I)‖_F`.
    pub degree_two_defect: f64,
    /// `‖Δ¹_{A*,A}(I)‖_F = ‖I - Σ A_i* A_i‖_F`.
    pub degree_one_defect: f64,
    pub degree_one_scale: f64,
    /// Condition estimate of `Σ A_i* A_i`.
    pub condition: f64,
    /// Whether `(A*, A)` is `(I, 1)`-isometric.
    pub spherical_isometry: bool,
}

/// For a tuple with `(A*, A)` `(I, 2)`-isometric and `Σ A_i* A_i`
/// invertible, reports whether `(A*, A)` is already `(I, 1)`-isometric.
pub fn spherical_reduction_check(a: &OperatorTuple, tol: &Tolerance) -> Result<SphericalReport> {
    let star = adjoint_tuple(a);
    let id = CMatrix::identity(a.dim());
    let two = triangle_scaled(&star, a, &id, 2)?;
    if !two.is_zero(tol) {
        return Err(invalid(format!(
            "(A*, A) is not (I,2)-isometric: ‖Δ²(I)‖_F = {:.3e}",
            two.norm()
        )));
    }
    let gram = star
        .iter()
        .zip(a.iter())
        .fold(CMatrix::zeros(a.dim()), |acc, (s, t)| &acc + &(s * t));
    let condition = gram.condition_estimate();
    if !(condition < 1e12) {
        return Err(invalid(format!(
            "Σ A_i* A_i is numerically singular (condition {condition:.3e})"
        )));
    }
    let one = triangle_scaled(&star, a, &id, 1)?;
    Ok(SphericalReport {
        degree_two_defect: two.norm(),
        degree_one_defect: one.norm(),
        degree_one_scale: one.scale,
        condition,
        spherical_isometry: one.is_zero(tol),
    })
}
