use crate::classify::min_symmetry_degree;
use crate::error::{invalid, Result};
use crate::generators::*;
use crate::golden::{run_golden, GoldenFile};
use crate::matrix::{CMatrix, Tolerance};
use crate::multiindex::binomial_f64;
use crate::transforms::{
    cesaro_estimate, delta_scaled, isosym_scaled, mixed_isosym_scaled, sigma_iterates, superop_matrix,
    triangle_profile, triangle_scaled, Defect, SuperopKind,
};
use crate::tuples::{
    adjoint_tuple, commutes_cross, commutes_within, conj_tuple, max_commutator_cross, max_commutator_within,
    nilpotency_order, product_tuple, sum_tuple, tensor_tuple, CommutePolicy, OperatorTuple,
};

use super::{degree_scan, DegreeScan, Outcome, TrialResult};

/// Settings shared by all checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub tol: Tolerance,
    /// Last Cesàro index for the limit check.
    pub t_max: u32,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            t_max: 1000,
        }
    }
}

/// Condition estimate above which `Σ̂` counts as singular.
pub const SINGULAR_CONDITION: f64 = 1e8;

fn finish(
    conclusions: &[(String, Defect)],
    bound: Vec<u32>,
    scan: Option<(&DegreeScan, u32)>,
    nontrivial: bool,
    notes: Vec<String>,
    tol: &Tolerance,
) -> TrialResult {
    let failing: Vec<&str> = conclusions
        .iter()
        .filter(|(_, d)| !d.is_zero(tol))
        .map(|(n, _)| n.as_str())
        .collect();
    let defect_norm = conclusions.iter().map(|(_, d)| d.norm()).fold(0.0, f64::max);
    let ratio = conclusions.iter().map(|(_, d)| d.ratio(tol)).fold(0.0, f64::max);
    let anomalies = scan.map(|(s, _)| s.anomalies.clone()).unwrap_or_default();
    let (outcome, reason) = if !failing.is_empty() {
        (Outcome::Counterexample, Some(format!("conclusion fails: {}", failing.join(", "))))
    } else if !anomalies.is_empty() {
        (
            Outcome::Anomaly,
            Some(format!("pass-set not upward closed: failing degrees {anomalies:?}")),
        )
    } else {
        (Outcome::Pass, None)
    };
    TrialResult {
        outcome,
        reason,
        defect_norm,
        ratio,
        bound,
        empirical_degree: scan.and_then(|(s, _)| s.min),
        sharp: match scan {
            Some((s, b)) if nontrivial => s.sharp_at(b),
            _ => None,
        },
        scan_norms: scan.map(|(s, _)| s.norms.clone()).unwrap_or_default(),
        notes,
    }
}

fn hypothesis(name: &str, d: &Defect, tol: &Tolerance) -> Option<TrialResult> {
    if d.is_zero(tol) {
        None
    } else {
        Some(TrialResult::skipped(format!(
            "hypothesis {name} fails: norm {:.3e}, ratio {:.3e}",
            d.norm(),
            d.ratio(tol)
        )))
    }
}

fn within(t: &OperatorTuple, name: &str, tol: &Tolerance) -> Option<TrialResult> {
    if commutes_within(t, tol) {
        None
    } else {
        Some(TrialResult::skipped(format!(
            "hypothesis {name} commuting fails: commutator norm {:.3e}",
            max_commutator_within(t).0
        )))
    }
}

fn cross(s: &OperatorTuple, t: &OperatorTuple, name: &str, tol: &Tolerance) -> Result<Option<TrialResult>> {
    Ok(if commutes_cross(s, t, tol)? {
        None
    } else {
        Some(TrialResult::skipped(format!(
            "hypothesis {name} fails: commutator norm {:.3e}",
            max_commutator_cross(s, t)?.0
        )))
    })
}

macro_rules! guard {
    ($e:expr) => {
        if let Some(skip) = $e {
            return Ok(skip);
        }
    };
}

/// Cesàro limit of the normalized powers and the invertible-`Σ` clause.
///
/// Passes when `e_{t_max} ≤ 5·max_j ‖Δ^j(X)‖·(m-1)/t_max` (plus the zero
/// threshold) and, whenever `Σ̂` is numerically invertible, `Δ^{m-1}(X)`
/// vanishes.
pub fn check_pro01(b: &Pro01Bundle, t_max: u32, tol: &Tolerance) -> Result<TrialResult> {
    if b.m == 0 {
        return Err(invalid("the limit check needs m >= 1"));
    }
    if t_max < b.m {
        return Err(invalid(format!("t_max = {t_max} is below m = {}", b.m)));
    }
    let profile = triangle_profile(&b.a, &b.b, &b.x, b.m + 2)?;
    guard!(hypothesis("Δ^m(X) = 0", &profile[b.m as usize], tol));
    let errors = cesaro_estimate(&b.a, &b.b, &b.x, b.m, t_max, tol)?;
    let e_last = errors.last().map(|&(_, e)| e).unwrap_or(0.0);
    let largest = profile[..b.m as usize].iter().map(Defect::norm).fold(0.0, f64::max);
    let limit = 5.0 * largest * (b.m - 1) as f64 / t_max as f64 + tol.threshold(largest);
    let below = &profile[b.m as usize - 1];
    let cond = superop_matrix(&b.a, &b.b, SuperopKind::Sigma)?.condition_estimate();
    let invertible = cond < SINGULAR_CONDITION;
    let mut notes = vec![format!("e_{t_max} = {e_last:.3e}, limit {limit:.3e}"), format!("cond(Σ̂) = {cond:.3e}")];
    let mut failing = Vec::new();
    if e_last > limit {
        failing.push(format!("Cesàro error {e_last:.3e} above {limit:.3e}"));
    }
    if invertible && !below.is_zero(tol) {
        failing.push(format!(
            "Σ̂ invertible but ‖Δ^{{m-1}}(X)‖ = {:.3e}",
            below.norm()
        ));
    }
    if !invertible {
        notes.push("Σ̂ singular: invertibility clause not applicable".to_string());
    }
    let scan = degree_scan(b.m + 2, tol, |k| Ok(profile[k as usize].clone()))?;
    let mut r = finish(&[], vec![b.m - 1], Some((&scan, b.m)), false, notes, tol);
    r.defect_norm = if invertible { below.norm() } else { e_last };
    r.ratio = if invertible { below.ratio(tol) } else { e_last / limit.max(f64::MIN_POSITIVE) };
    if !failing.is_empty() {
        r.outcome = Outcome::Counterexample;
        r.reason = Some(format!("conclusion fails: {}", failing.join("; ")));
    }
    Ok(r)
}

fn tuple_residual(a: &OperatorTuple, b: &OperatorTuple) -> Result<f64> {
    if a.d() != b.d() || a.dim() != b.dim() {
        return Err(invalid("family members must match the limit in shape"));
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| (x - y).fro_norm()).fold(0.0, f64::max))
}

/// Norm limits of pairs satisfying `Δ^{m1}(δ^{m2}(X)) = 0` satisfy it too.
pub fn check_pro02(b: &Pro02Bundle, tol: &Tolerance) -> Result<TrialResult> {
    if b.members.is_empty() {
        return Err(invalid("a family needs at least one member"));
    }
    for (k, mb) in b.members.iter().enumerate() {
        let d = isosym_scaled(&mb.a, &mb.b, &b.x, b.m1, b.m2)?;
        guard!(hypothesis(&format!("member {k} identity"), &d, tol));
    }
    let residuals = b
        .members
        .iter()
        .map(|mb| Ok(tuple_residual(&mb.a, &b.limit_a)?.max(tuple_residual(&mb.b, &b.limit_b)?)))
        .collect::<Result<Vec<f64>>>()?;
    let first = residuals[0];
    let last = *residuals.last().expect("non-empty");
    if last > 1e-12 && last > 0.05 * first {
        return Err(invalid(format!(
            "family does not converge in norm: residual {first:.3e} -> {last:.3e}"
        )));
    }
    let d = isosym_scaled(&b.limit_a, &b.limit_b, &b.x, b.m1, b.m2)?;
    let slack = last * (b.m1 + b.m2) as f64 * d.scale;
    let limit = tol.threshold(d.scale) + slack;
    let scan = degree_scan(b.m1 + 2, tol, |k| isosym_scaled(&b.limit_a, &b.limit_b, &b.x, k, b.m2))?;
    let mut r = finish(
        &[],
        vec![b.m1, b.m2],
        Some((&scan, b.m1)),
        false,
        vec![format!("final residual {last:.3e}, slack {slack:.3e}")],
        tol,
    );
    r.defect_norm = d.norm();
    r.ratio = d.norm() / limit.max(f64::MIN_POSITIVE);
    if d.norm() > limit {
        r.outcome = Outcome::Counterexample;
        r.reason = Some(format!("conclusion fails: limit defect {:.3e} above {limit:.3e}", d.norm()));
    }
    Ok(r)
}

/// `Σ_j C(m,j) (d-2)^{m-j} A_d^j X B_d^j`, with the sum of term norms as scale.
fn reduced_power(ad: &CMatrix, bd: &CMatrix, x: &CMatrix, m: u32, d: usize) -> Result<Defect> {
    let single = (OperatorTuple::single(ad.clone()), OperatorTuple::single(bd.clone()));
    let iterates = sigma_iterates(&single.0, &single.1, x, m)?;
    let shift = d as f64 - 2.0;
    let mut value = CMatrix::zeros(x.dim());
    let mut scale = 0.0;
    for (j, term) in iterates.iter().enumerate() {
        let c = binomial_f64(m as u64, j as u64) * shift.powi((m as usize - j) as i32);
        value += &term.scale_real(c);
        scale += c.abs() * term.fro_norm();
    }
    Ok(Defect { value, scale })
}

/// Reduction to the last pair at one degree `m`.
pub fn check_pro03(b: &Pro03Bundle, m: u32, tol: &Tolerance) -> Result<TrialResult> {
    let d = b.a.d();
    if d < 2 || b.b.d() != d {
        return Err(invalid("the reduction needs two tuples of equal length d >= 2"));
    }
    guard!(within(&b.a, "A", tol));
    guard!(within(&b.b, "B", tol));
    for i in 0..d - 1 {
        let (ai, bi) = (OperatorTuple::single(b.a.get(i).clone()), OperatorTuple::single(b.b.get(i).clone()));
        let h = match b.part {
            ReductionPart::Isometric => triangle_scaled(&ai, &bi, &b.x, 1)?,
            ReductionPart::Symmetric => delta_scaled(&ai, &bi, &b.x, 1)?,
        };
        guard!(hypothesis(&format!("pair {i} of degree 1"), &h, tol));
    }
    let (ad, bd) = (b.a.get(d - 1), b.b.get(d - 1));
    let (lhs, rhs, identity) = match b.part {
        ReductionPart::Isometric => {
            let lhs = triangle_scaled(&b.a, &b.b, &b.x, m)?;
            let rhs = reduced_power(ad, bd, &b.x, m, d)?;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let id = (&lhs.value - &rhs.value.scale_real(sign)).fro_norm();
            (lhs, rhs, id)
        }
        ReductionPart::Symmetric => {
            let lhs = delta_scaled(&b.a, &b.b, &b.x, m)?;
            let rhs = delta_scaled(
                &OperatorTuple::single(ad.clone()),
                &OperatorTuple::single(bd.clone()),
                &b.x,
                m,
            )?;
            let id = (&lhs.value - &rhs.value).fro_norm();
            (lhs, rhs, id)
        }
    };
    let (zl, zr) = (lhs.is_zero(tol), rhs.is_zero(tol));
    let notes = vec![
        format!("m = {m}: full side zero {zl}, reduced side zero {zr}"),
        format!("identity residual {identity:.3e}"),
    ];
    let mut r = finish(&[], vec![m], None, false, notes, tol);
    // Both sides agree up to sign, so the identity residual is the defect.
    r.defect_norm = identity;
    r.ratio = identity / tol.threshold(lhs.scale.max(rhs.scale));
    if zl != zr {
        r.outcome = Outcome::Counterexample;
        r.reason = Some(format!(
            "conclusion fails: at m = {m} the full side is zero = {zl} but the reduced side is zero = {zr}"
        ));
    }
    Ok(r)
}

/// [`check_pro03`] for every `m` in `1..=m_max`; the first failure wins.
pub fn check_pro03_all(b: &Pro03Bundle, tol: &Tolerance) -> Result<TrialResult> {
    let mut last = None;
    for m in 1..=b.m_max.max(1) {
        let r = check_pro03(b, m, tol)?;
        if r.outcome != Outcome::Pass {
            return Ok(r);
        }
        last = Some(r);
    }
    let mut r = last.expect("m_max >= 1");
    r.bound = vec![b.m_max.max(1)];
    Ok(r)
}

/// `(I,2)`-symmetric `(A*, A)` forces `Σ A_i` self-adjoint.
pub fn check_pro04(a: &OperatorTuple, tol: &Tolerance) -> Result<TrialResult> {
    guard!(within(a, "A", tol));
    let star = adjoint_tuple(a);
    let id = CMatrix::identity(a.dim());
    guard!(hypothesis("δ²_{A*,A}(I) = 0", &delta_scaled(&star, a, &id, 2)?, tol));
    let s = a.sum_matrix();
    let residual = Defect {
        value: &s - &s.adjoint(),
        scale: 2.0 * s.fro_norm(),
    };
    let empirical = min_symmetry_degree(&star, a, &id, 3, tol)?;
    let mut r = finish(&[("ΣA self-adjoint".to_string(), residual)], vec![1], None, false, Vec::new(), tol);
    r.empirical_degree = empirical;
    Ok(r)
}

/// `δ^m_{A*,A}(I) = 0` for even `m` forces `δ^{m-1}_{A*,A}(I) = 0`.
pub fn check_pro5(a: &OperatorTuple, m: u32, tol: &Tolerance) -> Result<TrialResult> {
    if m == 0 || m % 2 != 0 {
        return Err(invalid(format!("the even-degree check needs a positive even m, got {m}")));
    }
    guard!(within(a, "A", tol));
    let star = adjoint_tuple(a);
    let id = CMatrix::identity(a.dim());
    guard!(hypothesis("δ^m_{A*,A}(I) = 0", &delta_scaled(&star, a, &id, m)?, tol));
    let conclusion = delta_scaled(&star, a, &id, m - 1)?;
    let scan = degree_scan(m + 2, tol, |k| delta_scaled(&star, a, &id, k))?;
    Ok(finish(
        &[("δ^{m-1}(I) = 0".to_string(), conclusion)],
        vec![m - 1],
        Some((&scan, m - 1)),
        false,
        Vec::new(),
        tol,
    ))
}

fn order_of(n: &OperatorTuple, name: &str, tol: &Tolerance) -> Result<std::result::Result<u32, TrialResult>> {
    Ok(
        match nilpotency_order(n, n.dim() as u32 + 1, tol, CommutePolicy::Lax)? {
            Some(k) => Ok(k),
            None => Err(TrialResult::skipped(format!("hypothesis {name} nilpotent fails"))),
        },
    )
}

macro_rules! order {
    ($e:expr) => {
        match $e? {
            Ok(k) => k,
            Err(skip) => return Ok(skip),
        }
    };
}

/// Nilpotent perturbations raise both degrees by at most `n1 + n2 - 2`.
pub fn check_thm05(b: &Thm05Bundle, tol: &Tolerance) -> Result<TrialResult> {
    for (t, name) in [(&b.a, "A"), (&b.b, "B"), (&b.n1, "N1"), (&b.n2, "N2")] {
        guard!(within(t, name, tol));
    }
    guard!(cross(&b.a, &b.n1, "[A, N1] = 0", tol)?);
    guard!(cross(&b.b, &b.n2, "[B, N2] = 0", tol)?);
    let n1 = order!(order_of(&b.n1, "N1", tol));
    let n2 = order!(order_of(&b.n2, "N2", tol));
    guard!(hypothesis(
        "Δ^{m1}(δ^{m2}(X)) = 0",
        &isosym_scaled(&b.a, &b.b, &b.x, b.m1, b.m2)?,
        tol
    ));
    let (pa, pb) = (sum_tuple(&b.a, &b.n1)?, sum_tuple(&b.b, &b.n2)?);
    let t1 = b.m1 + n1 + n2 - 2;
    let t2 = b.m2 + n1 + n2 - 2;
    let conclusion = isosym_scaled(&pa, &pb, &b.x, t1, t2)?;
    let scan = degree_scan(t1 + 2, tol, |k| isosym_scaled(&pa, &pb, &b.x, k, t2))?;
    Ok(finish(
        &[("Δ^{t1}(δ^{t2}(X)) = 0".to_string(), conclusion)],
        vec![t1, t2],
        Some((&scan, t1)),
        n1 + n2 >= 3,
        vec![format!("nilpotency orders n1 = {n1}, n2 = {n2}")],
        tol,
    ))
}

/// The three implications for two base pairs sharing the perturbations.
pub fn check_cor05(b: &Cor05Bundle, tol: &Tolerance) -> Result<TrialResult> {
    for (t, name) in [
        (&b.a1, "A1"),
        (&b.b1, "B1"),
        (&b.a2, "A2"),
        (&b.b2, "B2"),
        (&b.n1, "N1"),
        (&b.n2, "N2"),
    ] {
        guard!(within(t, name, tol));
    }
    guard!(cross(&b.a1, &b.n1, "[A1, N1] = 0", tol)?);
    guard!(cross(&b.a2, &b.n1, "[A2, N1] = 0", tol)?);
    guard!(cross(&b.b1, &b.n2, "[B1, N2] = 0", tol)?);
    guard!(cross(&b.b2, &b.n2, "[B2, N2] = 0", tol)?);
    guard!(cross(&b.a1, &b.a2, "[A1, A2] = 0", tol)?);
    guard!(cross(&b.b1, &b.b2, "[B1, B2] = 0", tol)?);
    if b.iso.is_none() && b.sym.is_none() && b.mixed.is_none() {
        return Ok(TrialResult::skipped("hypothesis none: no implication applies"));
    }
    let n1 = order!(order_of(&b.n1, "N1", tol));
    let n2 = order!(order_of(&b.n2, "N2", tol));
    let lift = n1 + n2 - 2;
    let (p1, q1) = (sum_tuple(&b.a1, &b.n1)?, sum_tuple(&b.b1, &b.n2)?);
    let (p2, q2) = (sum_tuple(&b.a2, &b.n1)?, sum_tuple(&b.b2, &b.n2)?);
    let mut conclusions = Vec::new();
    let mut bound = Vec::new();
    let mut scan = None;
    if let Some(m1) = b.iso {
        guard!(hypothesis("Δ^{m1}_{A1,B1}(X) = 0", &triangle_scaled(&b.a1, &b.b1, &b.x, m1)?, tol));
        let t = m1 + lift;
        conclusions.push(("Δ^{t} perturbed".to_string(), triangle_scaled(&p1, &q1, &b.x, t)?));
        bound.push(t);
        scan = Some((degree_scan(t + 2, tol, |k| triangle_scaled(&p1, &q1, &b.x, k))?, t));
    }
    if let Some(m2) = b.sym {
        guard!(hypothesis("δ^{m2}_{A2,B2}(X) = 0", &delta_scaled(&b.a2, &b.b2, &b.x, m2)?, tol));
        let t = m2 + lift;
        conclusions.push(("δ^{t} perturbed".to_string(), delta_scaled(&p2, &q2, &b.x, t)?));
        bound.push(t);
        if scan.is_none() {
            scan = Some((degree_scan(t + 2, tol, |k| delta_scaled(&p2, &q2, &b.x, k))?, t));
        }
    }
    if let Some((m1, m2)) = b.mixed {
        guard!(hypothesis(
            "Δ^{m1}_{A1,B1}(δ^{m2}_{A2,B2}(X)) = 0",
            &mixed_isosym_scaled((&b.a1, &b.b1), (&b.a2, &b.b2), &b.x, m1, m2)?,
            tol
        ));
        let (t1, t2) = (m1 + lift, m2 + lift);
        conclusions.push((
            "mixed Δ^{t1}(δ^{t2}) perturbed".to_string(),
            mixed_isosym_scaled((&p1, &q1), (&p2, &q2), &b.x, t1, t2)?,
        ));
        bound.extend([t1, t2]);
        if scan.is_none() {
            scan = Some((
                degree_scan(t1 + 2, tol, |k| mixed_isosym_scaled((&p1, &q1), (&p2, &q2), &b.x, k, t2))?,
                t1,
            ));
        }
    }
    Ok(finish(
        &conclusions,
        bound,
        scan.as_ref().map(|(s, t)| (s, *t)),
        n1 + n2 >= 3,
        vec![format!("nilpotency orders n1 = {n1}, n2 = {n2}")],
        tol,
    ))
}

/// Adjoint specialization: `(T* + N, T + N)` with one nilpotent tuple.
pub fn check_cor050(b: &Cor050Bundle, tol: &Tolerance) -> Result<TrialResult> {
    let star = adjoint_tuple(&b.t);
    guard!(within(&b.t, "T", tol));
    guard!(within(&b.n, "N", tol));
    guard!(cross(&b.t, &b.n, "[T, N] = 0", tol)?);
    guard!(cross(&star, &b.n, "[T*, N] = 0", tol)?);
    let n = order!(order_of(&b.n, "N", tol));
    guard!(hypothesis(
        "Δ^{m1}(δ^{m2}(X)) = 0",
        &isosym_scaled(&star, &b.t, &b.x, b.m1, b.m2)?,
        tol
    ));
    let (pa, pb) = (sum_tuple(&star, &b.n)?, sum_tuple(&b.t, &b.n)?);
    let (t1, t2) = (b.m1 + 2 * n - 2, b.m2 + 2 * n - 2);
    let conclusion = isosym_scaled(&pa, &pb, &b.x, t1, t2)?;
    let scan = degree_scan(t1 + 2, tol, |k| isosym_scaled(&pa, &pb, &b.x, k, t2))?;
    Ok(finish(
        &[("Δ^{t1}(δ^{t2}(X)) = 0".to_string(), conclusion)],
        vec![t1, t2],
        Some((&scan, t1)),
        n >= 2,
        vec![format!("nilpotency order n = {n}")],
        tol,
    ))
}

/// Products `(SA, TB)` at degrees `(m+r-1, n+s-1)`.
pub fn check_thm06(b: &Thm06Bundle, tol: &Tolerance) -> Result<TrialResult> {
    let ProductDegrees { m, n, r, s } = b.degrees;
    if m == 0 || n == 0 || r == 0 || s == 0 {
        return Err(invalid("product degrees must be positive"));
    }
    for (t, name) in [(&b.a, "A"), (&b.b, "B"), (&b.s, "S"), (&b.t, "T")] {
        guard!(within(t, name, tol));
    }
    guard!(cross(&b.a, &b.s, "[A, S] = 0", tol)?);
    guard!(cross(&b.b, &b.t, "[B, T] = 0", tol)?);
    let ab = (&b.a, &b.b);
    let st = (&b.s, &b.t);
    guard!(hypothesis("Δ^m_{A,B}(δ^n_{A,B}(X)) = 0", &mixed_isosym_scaled(ab, ab, &b.x, m, n)?, tol));
    guard!(hypothesis("Δ^r_{S,T}(δ^s_{S,T}(X)) = 0", &mixed_isosym_scaled(st, st, &b.x, r, s)?, tol));
    guard!(hypothesis("Δ^r_{S,T}(δ^n_{S,T}(X)) = 0", &mixed_isosym_scaled(st, st, &b.x, r, n)?, tol));
    guard!(hypothesis("Δ^m_{A,B}(δ^s_{A,B}(X)) = 0", &mixed_isosym_scaled(ab, ab, &b.x, m, s)?, tol));
    let c1 = mixed_isosym_scaled(st, ab, &b.x, r, n)?.is_zero(tol);
    let c2 = mixed_isosym_scaled(ab, st, &b.x, m, s)?.is_zero(tol);
    let bs = max_commutator_cross(&b.b, &b.s)?.0;
    let notes = vec![
        format!("cross conditions: Δ^r_{{S,T}}(δ^n_{{A,B}}(X)) = 0 is {c1}, Δ^m_{{A,B}}(δ^s_{{S,T}}(X)) = 0 is {c2}"),
        format!("[B, S] residual {bs:.3e}"),
    ];
    let (p, q) = (product_tuple(&b.s, &b.a)?, product_tuple(&b.t, &b.b)?);
    let (t1, t2) = (m + r - 1, n + s - 1);
    let conclusion = isosym_scaled(&p, &q, &b.x, t1, t2)?;
    let scan = degree_scan(t1 + 2, tol, |k| isosym_scaled(&p, &q, &b.x, k, t2))?;
    Ok(finish(
        &[("Δ^{m+r-1}(δ^{n+s-1}(X)) = 0".to_string(), conclusion)],
        vec![t1, t2],
        Some((&scan, t1)),
        true,
        notes,
        tol,
    ))
}

/// Shared body of the product corollaries. `single_first` requires `A`
/// and `B` to be single operators.
pub fn check_product(b: &ProductBundle, single_first: bool, tol: &Tolerance) -> Result<TrialResult> {
    if single_first && (b.a.d() != 1 || b.b.d() != 1) {
        return Err(invalid("this corollary needs single operators A and B"));
    }
    for (t, name) in [(&b.a, "A"), (&b.b, "B"), (&b.s, "S"), (&b.t, "T")] {
        guard!(within(t, name, tol));
    }
    guard!(cross(&b.a, &b.s, "[A, S] = 0", tol)?);
    guard!(cross(&b.b, &b.t, "[B, T] = 0", tol)?);
    product_degrees_check((&b.a, &b.b), (&b.s, &b.t), &b.x, b.iso, b.sym, tol, Vec::new())
}

fn product_degrees_check(
    ab: (&OperatorTuple, &OperatorTuple),
    st: (&OperatorTuple, &OperatorTuple),
    x: &CMatrix,
    iso: Option<(u32, u32)>,
    sym: Option<(u32, u32)>,
    tol: &Tolerance,
    notes: Vec<String>,
) -> Result<TrialResult> {
    if iso.is_none() && sym.is_none() {
        return Ok(TrialResult::skipped("hypothesis none: no implication applies"));
    }
    let (p, q) = (product_tuple(st.0, ab.0)?, product_tuple(st.1, ab.1)?);
    let mut conclusions = Vec::new();
    let mut bound = Vec::new();
    let mut scan = None;
    if let Some((m, n)) = iso {
        guard!(hypothesis("Δ^m_{A,B}(X) = 0", &triangle_scaled(ab.0, ab.1, x, m)?, tol));
        guard!(hypothesis("Δ^n_{S,T}(X) = 0", &triangle_scaled(st.0, st.1, x, n)?, tol));
        let t = m + n - 1;
        conclusions.push(("Δ^{m+n-1} product".to_string(), triangle_scaled(&p, &q, x, t)?));
        bound.push(t);
        scan = Some((degree_scan(t + 2, tol, |k| triangle_scaled(&p, &q, x, k))?, t));
    }
    if let Some((m, n)) = sym {
        guard!(hypothesis("δ^m_{A,B}(X) = 0", &delta_scaled(ab.0, ab.1, x, m)?, tol));
        guard!(hypothesis("δ^n_{S,T}(X) = 0", &delta_scaled(st.0, st.1, x, n)?, tol));
        let t = m + n - 1;
        conclusions.push(("δ^{m+n-1} product".to_string(), delta_scaled(&p, &q, x, t)?));
        bound.push(t);
        if scan.is_none() {
            scan = Some((degree_scan(t + 2, tol, |k| delta_scaled(&p, &q, x, k))?, t));
        }
    }
    Ok(finish(
        &conclusions,
        bound,
        scan.as_ref().map(|(s, t)| (s, *t)),
        true,
        notes,
        tol,
    ))
}

/// Product corollary for all component tuples.
pub fn check_cor06(b: &ProductBundle, tol: &Tolerance) -> Result<TrialResult> {
    check_product(b, false, tol)
}

/// Product corollary with single operators `A`, `B`.
pub fn check_cor062(b: &ProductBundle, tol: &Tolerance) -> Result<TrialResult> {
    check_product(b, true, tol)
}

/// Conjugation corollary: pairs `(S*, CSC)` and `(T*, CTC)` and their product
/// `(S*T*, C S T C)`.
pub fn check_cor061(b: &Cor061Bundle, tol: &Tolerance) -> Result<TrialResult> {
    guard!(within(&b.s, "S", tol));
    guard!(within(&b.t, "T", tol));
    guard!(cross(&b.s, &b.t, "[S, T] = 0", tol)?);
    let (s_star, s_conj) = (adjoint_tuple(&b.s), conj_tuple(&b.s));
    let (t_star, t_conj) = (adjoint_tuple(&b.t), conj_tuple(&b.t));
    guard!(cross(&s_star, &t_conj, "[S*, CTC] = 0", tol)?);
    product_degrees_check((&t_star, &t_conj), (&s_star, &s_conj), &b.x, b.iso.map(|(m, n)| (n, m)), b.sym.map(|(m, n)| (n, m)), tol, Vec::new())
}

/// Tensor products at `𝕀 = I ⊗ I`.
pub fn check_thm07(b: &Thm07Bundle, tol: &Tolerance) -> Result<TrialResult> {
    for (t, name) in [(&b.a, "A"), (&b.b, "B"), (&b.s, "S"), (&b.t, "T")] {
        guard!(within(t, name, tol));
    }
    if b.a.dim() != b.b.dim() || b.s.dim() != b.t.dim() || b.a.d() != b.b.d() || b.s.d() != b.t.d() {
        return Err(invalid("tensor factors must pair tuples of equal shape"));
    }
    let ia = CMatrix::identity(b.a.dim());
    let is = CMatrix::identity(b.s.dim());
    let (p, q) = (tensor_tuple(&b.a, &b.s), tensor_tuple(&b.b, &b.t));
    let big = CMatrix::identity(p.dim());
    match b.hypotheses {
        TensorHypotheses::I { iso, sym } => {
            if iso.is_none() && sym.is_none() {
                return Ok(TrialResult::skipped("hypothesis none: no implication applies"));
            }
            let mut conclusions = Vec::new();
            let mut bound = Vec::new();
            let mut scan = None;
            if let Some((m, n)) = iso {
                guard!(hypothesis("Δ^m_{A,B}(I) = 0", &triangle_scaled(&b.a, &b.b, &ia, m)?, tol));
                guard!(hypothesis("Δ^n_{S,T}(I) = 0", &triangle_scaled(&b.s, &b.t, &is, n)?, tol));
                let t = m + n - 1;
                conclusions.push(("Δ^{m+n-1} tensor".to_string(), triangle_scaled(&p, &q, &big, t)?));
                bound.push(t);
                scan = Some((degree_scan(t + 2, tol, |k| triangle_scaled(&p, &q, &big, k))?, t));
            }
            if let Some((m, n)) = sym {
                guard!(hypothesis("δ^m_{A,B}(I) = 0", &delta_scaled(&b.a, &b.b, &ia, m)?, tol));
                guard!(hypothesis("δ^n_{S,T}(I) = 0", &delta_scaled(&b.s, &b.t, &is, n)?, tol));
                let t = m + n - 1;
                conclusions.push(("δ^{m+n-1} tensor".to_string(), delta_scaled(&p, &q, &big, t)?));
                bound.push(t);
                if scan.is_none() {
                    scan = Some((degree_scan(t + 2, tol, |k| delta_scaled(&p, &q, &big, k))?, t));
                }
            }
            Ok(finish(
                &conclusions,
                bound,
                scan.as_ref().map(|(s, t)| (s, *t)),
                true,
                vec!["variant (i)".to_string()],
                tol,
            ))
        }
        TensorHypotheses::Ii { degrees } => {
            let ProductDegrees { m, n, r, s } = degrees;
            if m == 0 || n == 0 || r == 0 || s == 0 {
                return Err(invalid("tensor degrees must be positive"));
            }
            guard!(hypothesis("Δ^m(δ^n_{A,B}(I)) = 0", &isosym_scaled(&b.a, &b.b, &ia, m, n)?, tol));
            guard!(hypothesis("Δ^r_{S,T}(I) = 0", &triangle_scaled(&b.s, &b.t, &is, r)?, tol));
            guard!(hypothesis("δ^s_{S,T}(I) = 0", &delta_scaled(&b.s, &b.t, &is, s)?, tol));
            let (t1, t2) = (m + r - 1, n + s - 1);
            let conclusion = isosym_scaled(&p, &q, &big, t1, t2)?;
            let scan = degree_scan(t1 + 2, tol, |k| isosym_scaled(&p, &q, &big, k, t2))?;
            Ok(finish(
                &[("Δ^{m+r-1}(δ^{n+s-1}(𝕀)) = 0".to_string(), conclusion)],
                vec![t1, t2],
                Some((&scan, t1)),
                true,
                vec!["variant (ii)".to_string()],
                tol,
            ))
        }
    }
}

/// Golden reproduction of the worked examples as a single trial.
pub fn check_golden(golden: &GoldenFile) -> Result<TrialResult> {
    let report = run_golden(golden)?;
    let worst = report
        .checks
        .iter()
        .map(|c| c.deviation / c.limit)
        .fold(0.0, f64::max);
    let failing: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
    let mut r = finish(&[], Vec::new(), None, false, Vec::new(), &Tolerance::default());
    r.ratio = worst;
    if !failing.is_empty() {
        r.outcome = Outcome::Counterexample;
        r.reason = Some(format!("golden mismatch: {}", failing.join(", ")));
    }
    Ok(r)
}

/// Dispatch on the bundle's profile.
pub fn check_bundle(bundle: &Bundle, opts: &CheckOptions) -> Result<TrialResult> {
    let tol = &opts.tol;
    match bundle {
        Bundle::Pro01(b) => check_pro01(b, opts.t_max, tol),
        Bundle::Pro02(b) => check_pro02(b, tol),
        Bundle::Pro03(b) => check_pro03_all(b, tol),
        Bundle::Pro04(b) => check_pro04(&b.a, tol),
        Bundle::Pro5(b) => check_pro5(&b.a, b.m, tol),
        Bundle::Thm05(b) => check_thm05(b, tol),
        Bundle::Cor05(b) => check_cor05(b, tol),
        Bundle::Cor050(b) => check_cor050(b, tol),
        Bundle::Thm06(b) => check_thm06(b, tol),
        Bundle::Cor06(b) => check_cor06(b, tol),
        Bundle::Cor061(b) => check_cor061(b, tol),
        Bundle::Cor062(b) => check_cor062(b, tol),
        Bundle::Thm07(b) => check_thm07(b, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{C64, ONE, ZERO};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn jordan() -> CMatrix {
        CMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn pro01_unimodular_and_jordan() {
        let u = OperatorTuple::single(CMatrix::scalar(2, C64::from_polar(1.0, 0.4)));
        let b = Pro01Bundle {
            a: adjoint_tuple(&u),
            b: u.clone(),
            x: CMatrix::identity(2),
            m: 2,
        };
        let r = check_pro01(&b, 200, &tol()).unwrap();
        assert_eq!(r.outcome, Outcome::Pass, "{r:?}");
        let at_one = Pro01Bundle { m: 1, ..b.clone() };
        let r = check_pro01(&at_one, 200, &tol()).unwrap();
        assert_eq!(r.outcome, Outcome::Counterexample);
        let t = jordan();
        let jb = Pro01Bundle {
            a: OperatorTuple::single(t.adjoint()),
            b: OperatorTuple::single(t),
            x: CMatrix::identity(2),
            m: 3,
        };
        let r = check_pro01(&jb, 1000, &tol()).unwrap();
        assert_eq!(r.outcome, Outcome::Counterexample);
        assert!(r.reason.unwrap().contains("Σ̂ invertible"));
        let jb4 = Pro01Bundle { m: 4, ..jb.clone() };
        assert_eq!(check_pro01(&jb4, 1000, &tol()).unwrap().outcome, Outcome::Pass);
        let not_iso = Pro01Bundle { m: 2, ..jb };
        assert_eq!(check_pro01(&not_iso, 1000, &tol()).unwrap().outcome, Outcome::Skipped);
        assert!(check_pro01(&Pro01Bundle { m: 0, ..b.clone() }, 10, &tol()).is_err());
        assert!(check_pro01(&b, 1, &tol()).is_err());
    }

    #[test]
    fn pro01_singular_sigma_is_not_applicable() {
        let t = CMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, ZERO]]).unwrap();
        let b = Pro01Bundle {
            a: OperatorTuple::single(t.adjoint()),
            b: OperatorTuple::single(t.clone()),
            x: t,
            m: 1,
        };
        let r = check_pro01(&b, 100, &tol()).unwrap();
        assert_eq!(r.outcome, Outcome::Pass, "{r:?}");
        assert!(r.notes.iter().any(|n| n.contains("not applicable")));
    }

    #[test]
    fn pro02_families() {
        let r = check_pro02(&jordan_family(), &tol()).unwrap();
        assert_eq!(r.outcome, Outcome::Pass, "{r:?}");
        let r = check_pro02(&drifting_family(), &tol()).unwrap();
        assert_eq!(r.outcome, Outcome::Skipped);
        let mut fam = jordan_family();
        fam.members.reverse();
        assert!(check_pro02(&fam, &tol()).is_err());
        let mut constant = jordan_family();
        for m in constant.members.iter_mut() {
            m.a = constant.limit_a.clone();
            m.b = constant.limit_b.clone();
        }
        assert_eq!(check_pro02(&constant, &tol()).unwrap().outcome, Outcome::Pass);
    }

    #[test]
    fn pro03_shapes() {
        let one = OperatorTuple::single(CMatrix::identity(2));
        let b = Pro03Bundle {
            a: one.clone(),
            b: one,
            x: CMatrix::identity(2),
            part: ReductionPart::Isometric,
            m_max: 2,
            vanishing: false,
        };
        assert!(check_pro03(&b, 1, &tol()).is_err());
    }

    #[test]
    fn pro04_and_pro5_examples() {
        let h = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, -1.0]]).unwrap();
        let a = OperatorTuple::new(vec![h.clone(), h.scale_real(0.5)]).unwrap();
        assert_eq!(check_pro04(&a, &tol()).unwrap().outcome, Outcome::Pass);
        let j = OperatorTuple::single(jordan());
        assert_eq!(check_pro04(&j, &tol()).unwrap().outcome, Outcome::Skipped);
        assert_eq!(check_pro5(&j, 4, &tol()).unwrap().outcome, Outcome::Pass);
        assert_eq!(check_pro5(&a, 2, &tol()).unwrap().outcome, Outcome::Pass);
        assert!(check_pro5(&a, 3, &tol()).is_err());
    }

    #[test]
    fn thm05_identity_plus_nilpotent() {
        let i = OperatorTuple::single(CMatrix::identity(2));
        let n = OperatorTuple::single(shift_seed(2, 2));
        let b = Thm05Bundle {
            a: i.clone(),
            b: i,
            n1: n.clone(),
            n2: n.clone(),
            x: CMatrix::identity(2),
            m1: 1,
            m2: 1,
        };
        let mut b = b;
        b.n1 = adjoint_tuple(&n);
        let r = check_thm05(&b, &tol()).unwrap();
        assert_eq!(r.outcome, Outcome::Pass, "{r:?}");
        assert_eq!(r.bound, vec![3, 3]);
        let zero = OperatorTuple::single(CMatrix::zeros(2));
        let trivial = Thm05Bundle {
            n1: zero.clone(),
            n2: zero,
            ..b
        };
        let r = check_thm05(&trivial, &tol()).unwrap();
        assert_eq!(r.bound, vec![1, 1]);
        assert_eq!(r.sharp, None);
    }

    #[test]
    fn thm06_needs_cross_conditions() {
        let r = check_thm06(&product_without_cross_conditions(), &tol()).unwrap();
        assert_eq!(r.outcome, Outcome::Counterexample);
        assert!(r.notes[0].contains("is false"));
    }

    #[test]
    fn cor06_jordan_pairs() {
        let t = jordan();
        let a = OperatorTuple::single(t.adjoint());
        let b = OperatorTuple::single(t);
        let bundle = ProductBundle {
            a: a.clone(),
            b: b.clone(),
            s: a,
            t: b,
            x: CMatrix::identity(2),
            iso: Some((3, 3)),
            sym: Some((3, 3)),
        };
        let r = check_cor06(&bundle, &tol()).unwrap();
        assert_eq!(r.outcome, Outcome::Pass, "{r:?}");
        assert_eq!(r.bound, vec![5, 5]);
        assert_eq!(check_cor062(&bundle, &tol()).unwrap().outcome, Outcome::Pass);
    }

    #[test]
    fn cor061_real_diagonal_and_noncommuting() {
        let s = OperatorTuple::single(CMatrix::identity(2));
        let b = Cor061Bundle {
            s: s.clone(),
            t: s,
            x: CMatrix::identity(2),
            iso: Some((1, 1)),
            sym: Some((1, 1)),
        };
        assert_eq!(check_cor061(&b, &tol()).unwrap().outcome, Outcome::Pass);
        let bad = Cor061Bundle {
            s: OperatorTuple::single(shift_seed(2, 2)),
            t: OperatorTuple::single(shift_seed(2, 2).transpose()),
            ..b
        };
        assert_eq!(check_cor061(&bad, &tol()).unwrap().outcome, Outcome::Skipped);
    }

    #[test]
    fn thm07_jordan_tensor() {
        let t = jordan();
        let a = OperatorTuple::single(t.adjoint());
        let b = OperatorTuple::single(t);
        let bundle = Thm07Bundle {
            a: a.clone(),
            b: b.clone(),
            s: a,
            t: b,
            hypotheses: TensorHypotheses::I {
                iso: Some((3, 3)),
                sym: None,
            },
        };
        let r = check_thm07(&bundle, &tol()).unwrap();
        assert_eq!(r.outcome, Outcome::Pass, "{r:?}");
        assert_eq!(r.bound, vec![5]);
    }

    #[test]
    fn golden_trial() {
        assert_eq!(check_golden(&GoldenFile::embedded()).unwrap().outcome, Outcome::Pass);
    }

    #[test]
    fn every_profile_checks() {
        for p in Profile::ALL {
            for seed in 0..4 {
                let bundle = random_instance(p, seed).unwrap();
                let r = check_bundle(&bundle, &CheckOptions::default()).unwrap();
                if p != Profile::Pro01 {
                    assert_ne!(r.outcome, Outcome::Counterexample, "{p} seed {seed}: {r:?}");
                }
            }
        }
    }
}
