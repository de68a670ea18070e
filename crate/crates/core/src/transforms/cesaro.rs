//! Normalized powers `Σ^t(X) / C(t, m-1)` against `Δ^{m-1}(X)`.

use super::{sigma_unchecked, triangle, triangle_scaled};
use crate::error::{invalid, Result};
use crate::matrix::{CMatrix, Tolerance};
use crate::multiindex::binomial_f64;
use crate::tuples::OperatorTuple;

/// Returns `(t, e_t)` for `t = m..=t_max`, where
/// `e_t = ‖Σ^t(X) / C(t, m-1) - Δ^{m-1}(X)‖_F`.
///
/// The pair must be `(X, m)`-isometric under `tol`; the error carries the
/// defect norm otherwise.
pub fn cesaro_estimate(
    a: &OperatorTuple,
    b: &OperatorTuple,
    x: &CMatrix,
    m: u32,
    t_max: u32,
    tol: &Tolerance,
) -> Result<Vec<(u32, f64)>> {
    if m == 0 {
        return Err(invalid("cesaro_estimate needs m >= 1"));
    }
    if t_max < m {
        return Err(invalid(format!("t_max = {t_max} is below m = {m}")));
    }
    let defect = triangle_scaled(a, b, x, m)?;
    if !defect.is_zero(tol) {
        return Err(invalid(format!(
            "pair is not (X,{m})-isometric: ‖Δ^{m}(X)‖_F = {:.3e} (scale {:.3e})",
            defect.norm(),
            defect.scale
        )));
    }
    let limit = triangle(a, b, x, m - 1)?;
    let mut power = x.clone();
    for _ in 0..m {
        power = sigma_unchecked(a, b, &power);
    }
    let mut out = Vec::with_capacity((t_max - m + 1) as usize);
    for t in m..=t_max {
        if t > m {
            power = sigma_unchecked(a, b, &power);
        }
        let c = binomial_f64(t as u64, (m - 1) as u64);
        let e = (&power.scale_real(1.0 / c) - &limit).fro_norm();
        out.push((t, e));
    }
    Ok(out)
}
