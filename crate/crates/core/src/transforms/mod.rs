//! The defect transforms `Δ` and `δ`.
//!
//! Every defect is a signed binomial sum of matrices. Alongside the value the
//! `*_scaled` variants return the unsigned sum of the term norms, which is the
//! scale handed to [`Tolerance`]: it is the magnitude that floating-point
//! cancellation actually has to beat.

mod cesaro;
mod superop;

pub use cesaro::cesaro_estimate;
pub use superop::{delta_superop, sigma_superop_power, superop_matrix, triangle_superop, SuperopKind};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Tolerance};
use crate::multiindex::{binomial_f64, compositions, multinomial};
use crate::tuples::{require_commuting, CommutePolicy, OperatorTuple};

/// Evaluation strategy for `Σ^j(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaMode {
    /// Apply `Σ` `j` times.
    #[default]
    Iterate,
    /// Multinomial expansion `Σ_{|α|=j} (j!/α!) A^α X B^α`; needs commuting tuples.
    Expand,
}

/// Cap on `j · log2(d)` for [`SigmaMode::Expand`].
pub const EXPAND_BUDGET: f64 = 20.0;

/// A defect value together with the scale used to decide whether it is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Defect {
    pub value: CMatrix,
    pub scale: f64,
}

impl Defect {
    pub fn norm(&self) -> f64 {
        self.value.fro_norm()
    }

    pub fn is_zero(&self, tol: &Tolerance) -> bool {
        self.value.is_zero(tol, self.scale)
    }

    /// `‖value‖ / (abs_eps + rel_eps · scale)`; at most 1 means zero.
    pub fn ratio(&self, tol: &Tolerance) -> f64 {
        let t = tol.threshold(self.scale);
        if t > 0.0 {
            self.norm() / t
        } else if self.norm() == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

pub(crate) fn check_shapes(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix) -> Result<()> {
    if a.d() != b.d() {
        return Err(Error::DimensionMismatch(format!(
            "tuples have d = {} and d = {}",
            a.d(),
            b.d()
        )));
    }
    if a.dim() != x.dim() || b.dim() != x.dim() {
        return Err(Error::DimensionMismatch(format!(
            "tuple dimensions {} and {} against X of dimension {}",
            a.dim(),
            b.dim(),
            x.dim()
        )));
    }
    Ok(())
}

pub(crate) fn sigma_unchecked(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix) -> CMatrix {
    let mut acc = CMatrix::zeros(x.dim());
    for (ai, bi) in a.iter().zip(b.iter()) {
        acc += &(&(ai * x) * bi);
    }
    acc
}

/// `Σ_i A_i X B_i`.
pub fn sigma_apply(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix) -> Result<CMatrix> {
    check_shapes(a, b, x)?;
    Ok(sigma_unchecked(a, b, x))
}

/// `Σ^0(X), ..., Σ^k(X)` by iteration.
pub fn sigma_iterates(
    a: &OperatorTuple,
    b: &OperatorTuple,
    x: &CMatrix,
    k: u32,
) -> Result<Vec<CMatrix>> {
    check_shapes(a, b, x)?;
    let mut out = Vec::with_capacity(k as usize + 1);
    out.push(x.clone());
    for j in 0..k as usize {
        out.push(sigma_unchecked(a, b, &out[j]));
    }
    Ok(out)
}

/// `Σ^j(X)`.
pub fn sigma_power(
    a: &OperatorTuple,
    b: &OperatorTuple,
    x: &CMatrix,
    j: u32,
    mode: SigmaMode,
) -> Result<CMatrix> {
    check_shapes(a, b, x)?;
    match mode {
        SigmaMode::Iterate => {
            let mut acc = x.clone();
            for _ in 0..j {
                acc = sigma_unchecked(a, b, &acc);
            }
            Ok(acc)
        }
        SigmaMode::Expand => {
            let cost = j as f64 * (a.d() as f64).log2();
            if cost > EXPAND_BUDGET {
                return Err(Error::BudgetExceeded(format!(
                    "expansion with j = {j}, d = {} has j·log2(d) = {cost:.1} > {EXPAND_BUDGET}",
                    a.d()
                )));
            }
            let tol = Tolerance::default();
            require_commuting(a, &tol, CommutePolicy::Strict, "sigma_power expand, left tuple")?;
            require_commuting(b, &tol, CommutePolicy::Strict, "sigma_power expand, right tuple")?;
            let mut acc = CMatrix::zeros(x.dim());
            for alpha in compositions(a.d(), j)? {
                let w = multinomial(j, &alpha)? as f64;
                let left = a.monomial(alpha.entries())?;
                let right = b.monomial(alpha.entries())?;
                acc += &(&(&left * x) * &right).scale_real(w);
            }
            Ok(acc)
        }
    }
}

fn signed_binomial_sum(terms: &[CMatrix], m: u32) -> Defect {
    let mut value = CMatrix::zeros(terms[0].dim());
    let mut scale = 0.0;
    for (j, t) in terms.iter().enumerate().take(m as usize + 1) {
        let c = binomial_f64(m as u64, j as u64);
        let signed = if j % 2 == 0 { c } else { -c };
        value += &t.scale_real(signed);
        scale += c * t.fro_norm();
    }
    Defect { value, scale }
}

/// `Δ^m(X)` with its term-norm scale.
pub fn triangle_scaled(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix, m: u32) -> Result<Defect> {
    let iterates = sigma_iterates(a, b, x, m)?;
    Ok(signed_binomial_sum(&iterates, m))
}

/// `Δ^m(X) = Σ_j (-1)^j C(m, j) Σ^j(X)`.
pub fn triangle(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix, m: u32) -> Result<CMatrix> {
    triangle_scaled(a, b, x, m).map(|d| d.value)
}

/// `Δ^m(X)` as `m` applications of `X ↦ X - Σ(X)`.
pub fn triangle_repeated(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix, m: u32) -> Result<CMatrix> {
    check_shapes(a, b, x)?;
    let mut acc = x.clone();
    for _ in 0..m {
        acc = &acc - &sigma_unchecked(a, b, &acc);
    }
    Ok(acc)
}

/// The terms `(ΣA)^{n-k} X (ΣB)^k`, `k = 0..n`.
fn delta_terms(sa: &CMatrix, sb: &CMatrix, x: &CMatrix, n: u32) -> Vec<CMatrix> {
    let n = n as usize;
    let mut left = vec![x.clone()];
    for p in 0..n {
        left.push(sa * &left[p]);
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut right = CMatrix::identity(x.dim());
    for k in 0..=n {
        out.push(&left[n - k] * &right);
        right = &right * sb;
    }
    out
}

/// `δ^n(X)` with its term-norm scale.
pub fn delta_scaled(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix, n: u32) -> Result<Defect> {
    check_shapes(a, b, x)?;
    let terms = delta_terms(&a.sum_matrix(), &b.sum_matrix(), x, n);
    Ok(signed_binomial_sum(&terms, n))
}

/// `δ^n(X) = Σ_j (-1)^j C(n, j) (ΣA)^{n-j} X (ΣB)^j`.
pub fn delta(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix, n: u32) -> Result<CMatrix> {
    delta_scaled(a, b, x, n).map(|d| d.value)
}

/// `δ^n(X)` as `n` applications of `X ↦ (ΣA) X - X (ΣB)`.
pub fn delta_repeated(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix, n: u32) -> Result<CMatrix> {
    check_shapes(a, b, x)?;
    let (sa, sb) = (a.sum_matrix(), b.sum_matrix());
    let mut acc = x.clone();
    for _ in 0..n {
        acc = &(&sa * &acc) - &(&acc * &sb);
    }
    Ok(acc)
}

/// `Δ^m(δ^n(X))` with scale `Σ_{j,k} C(m,j) C(n,k) ‖Σ^j((ΣA)^{n-k} X (ΣB)^k)‖`.
pub fn isosym_scaled(
    a: &OperatorTuple,
    b: &OperatorTuple,
    x: &CMatrix,
    m: u32,
    n: u32,
) -> Result<Defect> {
    mixed_isosym_scaled((a, b), (a, b), x, m, n)
}

/// `Δ^m(δ^n(X))`.
pub fn isosym_defect(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix, m: u32, n: u32) -> Result<CMatrix> {
    isosym_scaled(a, b, x, m, n).map(|d| d.value)
}

/// `δ^n(Δ^m(X))`, the composition in the other order.
pub fn isosym_defect_swapped(
    a: &OperatorTuple,
    b: &OperatorTuple,
    x: &CMatrix,
    m: u32,
    n: u32,
) -> Result<CMatrix> {
    let inner = triangle(a, b, x, m)?;
    delta(a, b, &inner, n)
}

/// `Δ^m_{A,B}(δ^n_{C,D}(X))` for two different pairs, as needed when a
/// hypothesis mixes the transforms of two tuples.
pub fn mixed_isosym_scaled(
    tri: (&OperatorTuple, &OperatorTuple),
    del: (&OperatorTuple, &OperatorTuple),
    x: &CMatrix,
    m: u32,
    n: u32,
) -> Result<Defect> {
    check_shapes(tri.0, tri.1, x)?;
    check_shapes(del.0, del.1, x)?;
    let terms = delta_terms(&del.0.sum_matrix(), &del.1.sum_matrix(), x, n);
    let mut value = CMatrix::zeros(x.dim());
    let mut scale = 0.0;
    for (k, t) in terms.iter().enumerate() {
        let ck = binomial_f64(n as u64, k as u64);
        let inner = signed_binomial_sum(&sigma_iterates(tri.0, tri.1, t, m)?, m);
        let signed = if k % 2 == 0 { ck } else { -ck };
        value += &inner.value.scale_real(signed);
        scale += ck * inner.scale;
    }
    Ok(Defect { value, scale })
}

/// Scale `‖X‖ (1 + ‖ΣA‖)^k (1 + ‖ΣB‖)^k` from norms of the inputs alone.
///
/// Kept for diagnostics. It grows much faster than the term-norm scale and
/// stops separating genuinely non-zero defects from rounding noise at
/// moderate degrees.
pub fn norm_product_scale(a: &OperatorTuple, b: &OperatorTuple, x: &CMatrix, k: u32) -> f64 {
    let sa = a.sum_matrix().fro_norm();
    let sb = b.sum_matrix().fro_norm();
    x.fro_norm() * (1.0 + sa).powi(k as i32) * (1.0 + sb).powi(k as i32)
}

/// All `Δ^k(X)`, `k = 0..=k_max`, sharing one set of iterates.
pub fn triangle_profile(
    a: &OperatorTuple,
    b: &OperatorTuple,
    x: &CMatrix,
    k_max: u32,
) -> Result<Vec<Defect>> {
    let iterates = sigma_iterates(a, b, x, k_max)?;
    Ok((0..=k_max).map(|k| signed_binomial_sum(&iterates, k)).collect())
}

/// All `δ^k(X)`, `k = 0..=k_max`.
pub fn delta_profile(
    a: &OperatorTuple,
    b: &OperatorTuple,
    x: &CMatrix,
    k_max: u32,
) -> Result<Vec<Defect>> {
    check_shapes(a, b, x)?;
    let (sa, sb) = (a.sum_matrix(), b.sum_matrix());
    let kk = k_max as usize;
    let mut left = vec![x.clone()];
    for p in 0..kk {
        left.push(&sa * &left[p]);
    }
    let mut right = vec![CMatrix::identity(x.dim())];
    for q in 0..kk {
        right.push(&right[q] * &sb);
    }
    Ok((0..=kk)
        .map(|k| {
            let terms: Vec<CMatrix> = (0..=k).map(|j| &left[k - j] * &right[j]).collect();
            signed_binomial_sum(&terms, k as u32)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }
    use crate::generators::paper_example_mixing;
    use crate::matrix::{I, ONE, ZERO};
    use crate::tuples::scalar_tuple;

    fn half_root() -> OperatorTuple {
        scalar_tuple(c(0.5f64.sqrt(), 0.0), 2, 2).unwrap()
    }

    fn jordan() -> CMatrix {
        CMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap()
    }

    fn star_pair(t: &CMatrix) -> (OperatorTuple, OperatorTuple) {
        (OperatorTuple::single(t.adjoint()), OperatorTuple::single(t.clone()))
    }

    #[test]
    fn sigma_examples() {
        let a = half_root();
        let i2 = CMatrix::identity(2);
        assert!((sigma_apply(&a, &a, &i2).unwrap() - i2.clone()).fro_norm() < 1e-15);
        let r2 = scalar_tuple(c(2f64.sqrt(), 0.0), 2, 2).unwrap();
        let four = CMatrix::scalar(2, c(4.0, 0.0));
        assert!((sigma_apply(&r2, &r2, &i2).unwrap() - four).fro_norm() < 1e-14);
        let t = jordan();
        let x = CMatrix::from_rows(&[vec![ONE, I], vec![ZERO, ONE]]).unwrap();
        let (a1, b1) = (OperatorTuple::single(t.clone()), OperatorTuple::single(t.adjoint()));
        assert_eq!(sigma_apply(&a1, &b1, &x).unwrap(), &(&t * &x) * &t.adjoint());
        assert!(sigma_apply(&a1, &half_root(), &x).is_err());
    }

    #[test]
    fn sigma_power_modes() {
        let a = half_root();
        let i2 = CMatrix::identity(2);
        assert_eq!(sigma_power(&a, &a, &i2, 0, SigmaMode::Iterate).unwrap(), i2);
        for mode in [SigmaMode::Iterate, SigmaMode::Expand] {
            let s = sigma_power(&a, &a, &i2, 2, mode).unwrap();
            assert!((s - i2.clone()).fro_norm() < 1e-14);
        }
        let big = scalar_tuple(ONE, 4, 2).unwrap();
        assert!(matches!(
            sigma_power(&big, &big, &i2, 11, SigmaMode::Expand),
            Err(Error::BudgetExceeded(_))
        ));
        let e = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let nc = OperatorTuple::new(vec![e.clone(), e.transpose()]).unwrap();
        assert!(matches!(
            sigma_power(&nc, &nc, &i2, 2, SigmaMode::Expand),
            Err(Error::NonCommuting(_))
        ));
        assert!(sigma_power(&nc, &nc, &i2, 2, SigmaMode::Iterate).is_ok());
    }

    #[test]
    fn triangle_examples() {
        let a = half_root();
        let i2 = CMatrix::identity(2);
        assert!(triangle(&a, &a, &i2, 1).unwrap().fro_norm() < 1e-15);
        assert_eq!(triangle(&a, &a, &i2, 0).unwrap(), i2);

        let (t, a0, _, s) = paper_example_mixing();
        let (ts, tt) = star_pair(&t);
        assert!(triangle(&ts, &tt, &a0, 2).unwrap().fro_norm() < 1e-12);
        let (ss, st) = star_pair(&s);
        let expected = CMatrix::from_rows(&[
            vec![c(-1.0, 0.0), c(-1.0, -1.0)],
            vec![c(-1.0, 1.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let got = triangle(&ss, &st, &a0, 2).unwrap();
        assert!((got - expected).fro_norm() < 1e-12);
    }

    #[test]
    fn delta_examples() {
        let (ts, tt) = star_pair(&jordan());
        let i2 = CMatrix::identity(2);
        assert!(delta(&ts, &tt, &i2, 3).unwrap().fro_norm() < 1e-13);
        let d2 = delta(&ts, &tt, &i2, 2).unwrap();
        let expected = CMatrix::from_real_rows(&[vec![0.0, 0.0], vec![0.0, -2.0]]).unwrap();
        assert!((d2 - expected).fro_norm() < 1e-13);
        let same = OperatorTuple::single(jordan());
        assert!(delta(&same, &same, &i2, 1).unwrap().fro_norm() == 0.0);
        assert_eq!(delta(&ts, &tt, &i2, 0).unwrap(), i2);
    }

    #[test]
    fn repeated_application_matches_binomial_sum() {
        let (ts, tt) = star_pair(&jordan());
        let x = CMatrix::from_rows(&[vec![ONE, I], vec![c(2.0, -1.0), ZERO]]).unwrap();
        for k in 0..6 {
            let a = triangle(&ts, &tt, &x, k).unwrap();
            let b = triangle_repeated(&ts, &tt, &x, k).unwrap();
            assert!((a - b).fro_norm() < 1e-9);
            let a = delta(&ts, &tt, &x, k).unwrap();
            let b = delta_repeated(&ts, &tt, &x, k).unwrap();
            assert!((a - b).fro_norm() < 1e-9);
        }
    }

    #[test]
    fn isosym_reduces_at_zero_degrees() {
        let (ts, tt) = star_pair(&jordan());
        let x = CMatrix::from_rows(&[vec![ONE, I], vec![c(2.0, -1.0), ZERO]]).unwrap();
        let a = isosym_defect(&ts, &tt, &x, 0, 2).unwrap();
        assert!((a - delta(&ts, &tt, &x, 2).unwrap()).fro_norm() < 1e-12);
        let b = isosym_defect(&ts, &tt, &x, 2, 0).unwrap();
        assert!((b - triangle(&ts, &tt, &x, 2).unwrap()).fro_norm() < 1e-12);
        let p = isosym_defect(&ts, &tt, &x, 2, 2).unwrap();
        let q = isosym_defect_swapped(&ts, &tt, &x, 2, 2).unwrap();
        assert!((p - q).fro_norm() < 1e-10);
    }

    #[test]
    fn profiles_match_single_evaluations() {
        let (ts, tt) = star_pair(&jordan());
        let x = CMatrix::identity(2);
        let tp = triangle_profile(&ts, &tt, &x, 6).unwrap();
        let dp = delta_profile(&ts, &tt, &x, 6).unwrap();
        for k in 0..=6u32 {
            let t = triangle_scaled(&ts, &tt, &x, k).unwrap();
            assert!((&tp[k as usize].value - &t.value).fro_norm() < 1e-12);
            assert!((tp[k as usize].scale - t.scale).abs() < 1e-9);
            let d = delta_scaled(&ts, &tt, &x, k).unwrap();
            assert!((&dp[k as usize].value - &d.value).fro_norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_tuple_defect_and_scale() {
        let r2 = scalar_tuple(c(2f64.sqrt(), 0.0), 2, 2).unwrap();
        let i2 = CMatrix::identity(2);
        for m in 1..=6u32 {
            let d = triangle_scaled(&r2, &r2, &i2, m).unwrap();
            let expected = CMatrix::scalar(2, c((-3f64).powi(m as i32), 0.0));
            assert!((&d.value - &expected).fro_norm() <= 1e-9 * expected.fro_norm());
            // term norms are C(m,j) 4^j √2, summing to 5^m √2
            assert!((d.scale - 5f64.powi(m as i32) * 2f64.sqrt()).abs() < 1e-9 * d.scale);
            assert!(!d.is_zero(&Tolerance::default()));
        }
    }

    #[test]
    fn mixed_reduces_to_isosym_for_one_pair() {
        let (ts, tt) = star_pair(&jordan());
        let x = CMatrix::identity(2);
        let a = mixed_isosym_scaled((&ts, &tt), (&ts, &tt), &x, 2, 1).unwrap();
        let b = isosym_scaled(&ts, &tt, &x, 2, 1).unwrap();
        assert_eq!(a, b);
    }
}
