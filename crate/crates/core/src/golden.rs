//! Reproduction of the two worked examples: a single Jordan block under the
//! weight `A₀ = diag(0, 1)` before and after mixing by a unitary, and the
//! scalar tuple `(I/√2, I/√2)` with its square and inverse.
//!
//! Expected values live in `golden/paper_examples.json`, embedded at build
//! time. [`GoldenFile::load`] reads a replacement so a damaged file can be
//! detected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{paper_example_mixing, paper_example_squares};
use crate::matrix::{CMatrix, C64};
use crate::transforms::{triangle, triangle_scaled};
use crate::tuples::{adjoint_tuple, inverse_tuple, mix_by_unitary, power_tuple, OperatorTuple, PowerConvention};
use crate::Tolerance;

pub const EMBEDDED: &str = include_str!("../golden/paper_examples.json");

/// Entrywise limit for exact golden matrices.
pub const ENTRY_EPS: f64 = 1e-12;
/// Relative limit for the scalar power laws.
pub const POWER_REL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingValues {
    pub t: CMatrix,
    pub a0: CMatrix,
    pub u: CMatrix,
    pub s: CMatrix,
    pub s_star_a0_s: CMatrix,
    pub s_star2_a0_s2: CMatrix,
    pub triangle2_t: CMatrix,
    pub triangle2_s: CMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquaresValues {
    pub base: OperatorTuple,
    pub inverse: OperatorTuple,
    /// `Δ^m(I) = inverse_ratio^m · I` for the inverse tuple.
    pub inverse_ratio: f64,
    /// `Δ^m(I) = componentwise_ratio^m · I` for the componentwise square.
    pub componentwise_ratio: f64,
    pub max_degree: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenFile {
    pub mixing: MixingValues,
    pub squares: SquaresValues,
}

impl GoldenFile {
    pub fn embedded() -> Self {
        Self::from_json(EMBEDDED).expect("embedded golden file parses")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("golden file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// One golden comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenCheck {
    pub name: String,
    pub passed: bool,
    /// Largest deviation found, in the units of `limit`.
    pub deviation: f64,
    pub limit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<CMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<CMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenReport {
    pub checks: Vec<GoldenCheck>,
}

impl GoldenReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &GoldenCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.dim() != b.dim() {
        return f64::INFINITY;
    }
    (a - b).max_abs()
}

fn matrix_check(name: &str, expected: &CMatrix, actual: CMatrix, limit: f64) -> GoldenCheck {
    let deviation = entry_diff(expected, &actual);
    GoldenCheck {
        name: name.to_string(),
        passed: deviation <= limit,
        deviation,
        limit,
        expected: Some(expected.clone()),
        actual: Some(actual),
        note: None,
    }
}

fn tuple_diff(a: &OperatorTuple, b: &OperatorTuple) -> f64 {
    if a.d() != b.d() || a.dim() != b.dim() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| entry_diff(x, y)).fold(0.0, f64::max)
}

fn scalar_check(name: &str, passed: bool, deviation: f64, limit: f64, note: Option<String>) -> GoldenCheck {
    GoldenCheck {
        name: name.to_string(),
        passed,
        deviation,
        limit,
        expected: None,
        actual: None,
        note,
    }
}

/// Worst relative deviation of `Δ^m_{A,A}(I)` from `ratio^m · I` over
/// `m = 1..=max_degree`.
fn power_law(a: &OperatorTuple, ratio: f64, max_degree: u32) -> Result<f64> {
    let id = CMatrix::identity(a.dim());
    let mut worst: f64 = 0.0;
    for m in 1..=max_degree {
        let got = triangle(a, a, &id, m)?;
        let want = CMatrix::scalar(a.dim(), C64::new(ratio.powi(m as i32), 0.0));
        worst = worst.max((&got - &want).fro_norm() / want.fro_norm());
    }
    Ok(worst)
}

/// Recompute every value and compare it with `golden`.
pub fn run_golden(golden: &GoldenFile) -> Result<GoldenReport> {
    let mut checks = Vec::new();
    let g = &golden.mixing;
    let (t, a0, u, s) = paper_example_mixing();
    checks.push(matrix_check("mixing: T", &g.t, t.clone(), ENTRY_EPS));
    checks.push(matrix_check("mixing: A0", &g.a0, a0.clone(), ENTRY_EPS));
    checks.push(matrix_check("mixing: U", &g.u, u.clone(), ENTRY_EPS));
    checks.push(matrix_check("mixing: S = U T", &g.s, s.clone(), ENTRY_EPS));
    let s_star = s.adjoint();
    let once = &(&s_star * &a0) * &s;
    let twice = &(&s_star * &once) * &s;
    checks.push(matrix_check("mixing: S* A0 S", &g.s_star_a0_s, once, ENTRY_EPS));
    checks.push(matrix_check("mixing: S*^2 A0 S^2", &g.s_star2_a0_s2, twice, ENTRY_EPS));
    let (ta, tb) = (OperatorTuple::single(t.adjoint()), OperatorTuple::single(t.clone()));
    checks.push(matrix_check(
        "mixing: Δ²_{T*,T}(A0) = 0",
        &g.triangle2_t,
        triangle(&ta, &tb, &a0, 2)?,
        ENTRY_EPS,
    ));
    let (sa, sb) = (OperatorTuple::single(s_star), OperatorTuple::single(s));
    let tri_s = triangle(&sa, &sb, &a0, 2)?;
    let mut c = matrix_check("mixing: Δ²_{S*,S}(A0)", &g.triangle2_s, tri_s.clone(), ENTRY_EPS);
    if tri_s.fro_norm() <= 1.0 {
        c.passed = false;
        c.note = Some(format!("expected norm > 1, got {:.3e}", tri_s.fro_norm()));
    } else {
        c.note = Some(format!("norm {:.6} > 1, so the mixed pair is not (A0,2)-isometric", tri_s.fro_norm()));
    }
    checks.push(c);

    let pair = OperatorTuple::new(vec![t.clone(), a0.clone()])?;
    let mixed = mix_by_unitary(&u, &pair, &Tolerance::default())?;
    let id = CMatrix::identity(2);
    let mut worst: f64 = 0.0;
    for m in 1..=3 {
        let lhs = triangle(&adjoint_tuple(&mixed), &mixed, &id, m)?;
        let rhs = triangle(&adjoint_tuple(&pair), &pair, &id, m)?;
        worst = worst.max(entry_diff(&lhs, &rhs));
    }
    checks.push(scalar_check(
        "mixing: Δ^m_{S*,S}(I) = Δ^m_{T*,T}(I) for (T, A0) mixed by U, m = 1..3",
        worst <= ENTRY_EPS * 10.0,
        worst,
        ENTRY_EPS * 10.0,
        None,
    ));

    let q = &golden.squares;
    let (base, _) = paper_example_squares();
    let dev = tuple_diff(&q.base, &base);
    checks.push(scalar_check("squares: base tuple", dev <= ENTRY_EPS, dev, ENTRY_EPS, None));
    let id = CMatrix::identity(2);
    let one = triangle_scaled(&base, &base, &id, 1)?.norm();
    checks.push(scalar_check(
        "squares: base tuple is (I,1)-isometric",
        one <= ENTRY_EPS,
        one,
        ENTRY_EPS,
        None,
    ));
    let inv = inverse_tuple(&base)?;
    let dev = tuple_diff(&q.inverse, &inv);
    checks.push(scalar_check("squares: inverse tuple", dev <= ENTRY_EPS, dev, ENTRY_EPS, None));
    let dev = power_law(&inv, q.inverse_ratio, q.max_degree)?;
    checks.push(scalar_check(
        &format!("squares: inverse Δ^m(I) = ({})^m I, m = 1..{}", q.inverse_ratio, q.max_degree),
        dev <= POWER_REL_EPS,
        dev,
        POWER_REL_EPS,
        None,
    ));
    let word = power_tuple(&base, 2, PowerConvention::Word)?;
    let word_one = triangle_scaled(&word, &word, &id, 1)?.norm();
    checks.push(scalar_check(
        "squares: word square (A1², A1A2, A2A1, A2²) has Δ¹(I) = 0",
        word_one <= ENTRY_EPS,
        word_one,
        ENTRY_EPS,
        Some(
            "the four-word square is (I,1)-isometric, so the claim that the square is never \
             m-isometric holds only for the componentwise square"
                .to_string(),
        ),
    ));
    let comp = power_tuple(&base, 2, PowerConvention::Componentwise)?;
    let dev = power_law(&comp, q.componentwise_ratio, q.max_degree)?;
    checks.push(scalar_check(
        &format!(
            "squares: componentwise square Δ^m(I) = ({})^m I, m = 1..{}",
            q.componentwise_ratio, q.max_degree
        ),
        dev <= POWER_REL_EPS,
        dev,
        POWER_REL_EPS,
        None,
    ));
    Ok(GoldenReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_file_reproduces() {
        let report = run_golden(&GoldenFile::embedded()).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{}: deviation {:e}", c.name, c.deviation);
        }
        assert_eq!(report.checks.len(), 15);
    }

    #[test]
    fn damaged_file_is_caught() {
        let mut g = GoldenFile::embedded();
        g.mixing.s_star_a0_s = CMatrix::identity(2);
        let report = run_golden(&g).unwrap();
        assert!(!report.all_passed());
        let bad: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
        assert_eq!(bad, vec!["mixing: S* A0 S".to_string()]);
        assert!(GoldenFile::from_json("{}").is_err());
    }
}
