//! Operator d-tuples and the constructions built from them.
//!
//! Commutativity is a checked predicate rather than a construction invariant:
//! floating-point input is never exactly commuting, so callers choose a
//! [`CommutePolicy`] at use sites.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::matrix::{CMatrix, Tolerance, C64, ZERO};
use crate::multiindex::compositions;

/// An ordered, non-empty list of square matrices of one common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTuple {
    components: Vec<CMatrix>,
}

/// How `power_tuple` lists the t-th power of a tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerConvention {
    /// All `d^t` index words of length `t`, lexicographic.
    #[default]
    Word,
    /// `(A_1^t, ..., A_d^t)`.
    Componentwise,
}

/// What to do with a tuple that fails a commutativity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommutePolicy {
    #[default]
    Strict,
    /// Proceed; the caller records the residual as a warning.
    Lax,
}

impl OperatorTuple {
    pub fn new(components: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(invalid("a tuple needs at least one component"));
        };
        let n = first.dim();
        if let Some((i, c)) = components.iter().enumerate().find(|(_, c)| c.dim() != n) {
            return Err(Error::DimensionMismatch(format!(
                "component {i} has dimension {}, expected {n}",
                c.dim()
            )));
        }
        Ok(Self { components })
    }

    pub fn single(m: CMatrix) -> Self {
        Self {
            components: vec![m],
        }
    }

    pub fn d(&self) -> usize {
        self.components.len()
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn components(&self) -> &[CMatrix] {
        &self.components
    }

    pub fn get(&self, i: usize) -> &CMatrix {
        &self.components[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CMatrix> {
        self.components.iter()
    }

    pub fn into_components(self) -> Vec<CMatrix> {
        self.components
    }

    /// `A_1 + ... + A_d`.
    pub fn sum_matrix(&self) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim());
        for c in &self.components {
            acc += c;
        }
        acc
    }

    /// Monomial `A^α = A_1^{α_1} ... A_d^{α_d}`.
    pub fn monomial(&self, alpha: &[u32]) -> Result<CMatrix> {
        if alpha.len() != self.d() {
            return Err(Error::DimensionMismatch(format!(
                "multi-index of length {} for a {}-tuple",
                alpha.len(),
                self.d()
            )));
        }
        let mut acc = CMatrix::identity(self.dim());
        for (c, &a) in self.components.iter().zip(alpha) {
            if a > 0 {
                acc = &acc * &c.pow(a);
            }
        }
        Ok(acc)
    }

    pub fn map(&self, f: impl FnMut(&CMatrix) -> CMatrix) -> Self {
        Self {
            components: self.components.iter().map(f).collect(),
        }
    }

    /// Largest component Frobenius norm.
    pub fn max_norm(&self) -> f64 {
        self.components.iter().map(CMatrix::fro_norm).fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct TupleRepr {
    dim: usize,
    d: usize,
    components: Vec<CMatrix>,
}

impl Serialize for OperatorTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TupleRepr {
            dim: self.dim(),
            d: self.d(),
            components: self.components.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorTuple {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = TupleRepr::deserialize(de)?;
        if r.components.len() != r.d {
            return Err(D::Error::custom(format!(
                "declared d = {} but {} components given",
                r.d,
                r.components.len()
            )));
        }
        let t = OperatorTuple::new(r.components).map_err(D::Error::custom)?;
        if t.dim() != r.dim {
            return Err(D::Error::custom(format!(
                "declared dim = {} but components are {}x{}",
                r.dim,
                t.dim(),
                t.dim()
            )));
        }
        Ok(t)
    }
}

fn commutator_residual(x: &CMatrix, y: &CMatrix) -> (f64, f64) {
    let c = &(x * y) - &(y * x);
    (c.fro_norm(), x.fro_norm() * y.fro_norm())
}

/// Largest commutator norm among the components of `t`, with the scale
/// `‖A_i‖‖A_j‖` of the offending pair.
pub fn max_commutator_within(t: &OperatorTuple) -> (f64, f64) {
    let mut worst = (0.0, 0.0);
    for i in 0..t.d() {
        for j in (i + 1)..t.d() {
            let r = commutator_residual(t.get(i), t.get(j));
            if r.0 > worst.0 {
                worst = r;
            }
        }
    }
    worst
}

pub fn commutes_within(t: &OperatorTuple, tol: &Tolerance) -> bool {
    (0..t.d()).all(|i| {
        ((i + 1)..t.d()).all(|j| {
            let (r, s) = commutator_residual(t.get(i), t.get(j));
            tol.accepts(r, s)
        })
    })
}

/// Largest cross commutator `[S_i, T_j]`, as `(norm, scale)`.
pub fn max_commutator_cross(s: &OperatorTuple, t: &OperatorTuple) -> Result<(f64, f64)> {
    check_dims(s, t, "cross commutator")?;
    let mut worst = (0.0, 0.0);
    for x in s.iter() {
        for y in t.iter() {
            let r = commutator_residual(x, y);
            if r.0 > worst.0 {
                worst = r;
            }
        }
    }
    Ok(worst)
}

pub fn commutes_cross(s: &OperatorTuple, t: &OperatorTuple, tol: &Tolerance) -> Result<bool> {
    check_dims(s, t, "cross commutator")?;
    Ok(s.iter().all(|x| {
        t.iter().all(|y| {
            let (r, sc) = commutator_residual(x, y);
            tol.accepts(r, sc)
        })
    }))
}

/// Applies `policy` to a commutativity check of `t`.
pub fn require_commuting(
    t: &OperatorTuple,
    tol: &Tolerance,
    policy: CommutePolicy,
    what: &str,
) -> Result<()> {
    if policy == CommutePolicy::Strict && !commutes_within(t, tol) {
        let (r, _) = max_commutator_within(t);
        return Err(Error::NonCommuting(format!(
            "{what}: largest commutator norm {r:.3e}"
        )));
    }
    Ok(())
}

fn check_dims(a: &OperatorTuple, b: &OperatorTuple, op: &str) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{op}: matrix dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// `(A_1 + N_1, ..., A_d + N_d)`.
pub fn sum_tuple(a: &OperatorTuple, n: &OperatorTuple) -> Result<OperatorTuple> {
    check_dims(a, n, "sum_tuple")?;
    if a.d() != n.d() {
        return Err(Error::DimensionMismatch(format!(
            "sum_tuple: d = {} vs {}",
            a.d(),
            n.d()
        )));
    }
    OperatorTuple::new(a.iter().zip(n.iter()).map(|(x, y)| x + y).collect())
}

/// All products `S_j A_i`, `j` outer and `i` inner.
pub fn product_tuple(s: &OperatorTuple, a: &OperatorTuple) -> Result<OperatorTuple> {
    check_dims(s, a, "product_tuple")?;
    let mut out = Vec::with_capacity(s.d() * a.d());
    for sj in s.iter() {
        for ai in a.iter() {
            out.push(sj * ai);
        }
    }
    OperatorTuple::new(out)
}

/// The t-th power of a tuple under the given convention.
pub fn power_tuple(a: &OperatorTuple, t: u32, conv: PowerConvention) -> Result<OperatorTuple> {
    if t == 0 {
        return Err(invalid("power_tuple needs t >= 1"));
    }
    match conv {
        PowerConvention::Componentwise => Ok(a.map(|c| c.pow(t))),
        PowerConvention::Word => {
            let mut words = a.components.clone();
            for _ in 1..t {
                let mut next = Vec::with_capacity(words.len() * a.d());
                for w in &words {
                    for c in a.iter() {
                        next.push(w * c);
                    }
                }
                words = next;
            }
            OperatorTuple::new(words)
        }
    }
}

pub fn inverse_tuple(a: &OperatorTuple) -> Result<OperatorTuple> {
    let inv = a
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.inverse().map_err(|e| match e {
                Error::SingularMatrix { condition, .. } => Error::SingularMatrix {
                    index: Some(i),
                    condition,
                },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    OperatorTuple::new(inv)
}

pub fn adjoint_tuple(a: &OperatorTuple) -> OperatorTuple {
    a.map(CMatrix::adjoint)
}

/// `(C A_1 C, ..., C A_d C)` for the standard-basis conjugation `C`.
pub fn conj_tuple(a: &OperatorTuple) -> OperatorTuple {
    a.map(CMatrix::conj)
}

pub fn scalar_tuple(c: C64, d: usize, n: usize) -> Result<OperatorTuple> {
    if d == 0 || n == 0 {
        return Err(invalid("scalar_tuple needs d >= 1 and n >= 1"));
    }
    OperatorTuple::new(vec![CMatrix::scalar(n, c); d])
}

/// All Kronecker products `A_i ⊗ B_j`, `i` outer and `j` inner.
pub fn tensor_tuple(a: &OperatorTuple, b: &OperatorTuple) -> OperatorTuple {
    let mut out = Vec::with_capacity(a.d() * b.d());
    for ai in a.iter() {
        for bj in b.iter() {
            out.push(ai.kron(bj));
        }
    }
    OperatorTuple { components: out }
}

/// `S_j = Σ_i U[j,i] T_i` for a unitary `d × d` matrix `U`.
pub fn mix_by_unitary(u: &CMatrix, t: &OperatorTuple, tol: &Tolerance) -> Result<OperatorTuple> {
    let d = t.d();
    if u.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "mixing matrix is {}x{0} but the tuple has d = {d}",
            u.dim()
        )));
    }
    let residual = (&(&u.adjoint() * u) - &CMatrix::identity(d)).fro_norm();
    if !tol.accepts(residual, d as f64) {
        return Err(invalid(format!(
            "mixing matrix is not unitary: ‖U*U - I‖_F = {residual:.3e}"
        )));
    }
    let n = t.dim();
    let out = (0..d)
        .map(|j| {
            let mut acc = CMatrix::zeros(n);
            for (i, ti) in t.iter().enumerate() {
                let w = u.get(j, i);
                if w != ZERO {
                    acc += &ti.scale(w);
                }
            }
            acc
        })
        .collect();
    OperatorTuple::new(out)
}

/// Least `n <= max_order` such that every monomial of order `n` vanishes.
pub fn nilpotency_order(
    t: &OperatorTuple,
    max_order: u32,
    tol: &Tolerance,
    policy: CommutePolicy,
) -> Result<Option<u32>> {
    if max_order == 0 {
        return Err(invalid("max_order must be >= 1"));
    }
    require_commuting(t, tol, policy, "nilpotency_order")?;
    let norms: Vec<f64> = t.iter().map(CMatrix::fro_norm).collect();
    for n in 1..=max_order {
        let mut all_zero = true;
        for alpha in compositions(t.d(), n)? {
            let word = t.monomial(alpha.entries())?;
            let scale: f64 = norms
                .iter()
                .zip(alpha.entries())
                .map(|(nm, &a)| nm.powi(a as i32))
                .product();
            if !word.is_zero(tol, scale) {
                all_zero = false;
                break;
            }
        }
        if all_zero {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{I, ONE};

    fn r(rows: &[&[f64]]) -> CMatrix {
        CMatrix::from_real_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn half_root_tuple() -> OperatorTuple {
        scalar_tuple(C64::new(0.5f64.sqrt(), 0.0), 2, 2).unwrap()
    }

    fn shift(n: usize) -> CMatrix {
        CMatrix::from_fn(n, |i, j| if j == i + 1 { ONE } else { ZERO })
    }

    #[test]
    fn commutation_predicates() {
        let tol = Tolerance::default();
        assert!(commutes_within(&half_root_tuple(), &tol));
        let j = CMatrix::identity(3) + shift(3);
        let t = OperatorTuple::new(vec![j.clone(), j.pow(2)]).unwrap();
        assert!(commutes_within(&t, &tol));
        let e = r(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let f = r(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let bad = OperatorTuple::new(vec![e.clone(), f.clone()]).unwrap();
        assert!(!commutes_within(&bad, &tol));
        let (res, _) = max_commutator_within(&bad);
        assert!((res - 2f64.sqrt()).abs() < 1e-14);
        let s = OperatorTuple::single(e);
        let tt = OperatorTuple::single(f);
        assert!(!commutes_cross(&s, &tt, &tol).unwrap());
        assert!(commutes_cross(&t, &t, &tol).unwrap());
        assert!(commutes_cross(&scalar_tuple(I, 3, 2).unwrap(), &s, &tol).unwrap());
        assert!(commutes_cross(&t, &s, &tol).is_err());
    }

    #[test]
    fn sums_and_products() {
        let n = r(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let a = OperatorTuple::single(CMatrix::identity(2));
        let s = sum_tuple(&a, &OperatorTuple::single(n)).unwrap();
        assert_eq!(s.get(0), &r(&[&[1.0, 1.0], &[0.0, 1.0]]));
        let two = scalar_tuple(C64::new(2.0, 0.0), 1, 2).unwrap();
        assert!(sum_tuple(&two, &half_root_tuple()).is_err());

        let pair = OperatorTuple::new(vec![
            CMatrix::scalar(2, C64::new(3.0, 0.0)),
            CMatrix::scalar(2, C64::new(5.0, 0.0)),
        ])
        .unwrap();
        let p = product_tuple(&two, &pair).unwrap();
        assert_eq!(p.components(), &[CMatrix::scalar(2, C64::new(6.0, 0.0)), CMatrix::scalar(2, C64::new(10.0, 0.0))]);
        let id = OperatorTuple::single(CMatrix::identity(2));
        assert_eq!(product_tuple(&id, &pair).unwrap(), pair);
        assert_eq!(product_tuple(&pair, &pair).unwrap().d(), 4);
    }

    #[test]
    fn product_order_is_outer_s() {
        let s = OperatorTuple::new(vec![CMatrix::diagonal(&[ONE, ZERO]), CMatrix::diagonal(&[ZERO, ONE])]).unwrap();
        let a = OperatorTuple::new(vec![
            CMatrix::scalar(2, C64::new(2.0, 0.0)),
            CMatrix::scalar(2, C64::new(3.0, 0.0)),
        ])
        .unwrap();
        let p = product_tuple(&s, &a).unwrap();
        assert_eq!(p.get(1), &CMatrix::diagonal(&[C64::new(3.0, 0.0), ZERO]));
        assert_eq!(p.get(2), &CMatrix::diagonal(&[ZERO, C64::new(2.0, 0.0)]));
    }

    #[test]
    fn powers() {
        let a = half_root_tuple();
        let w = power_tuple(&a, 2, PowerConvention::Word).unwrap();
        assert_eq!(w.d(), 4);
        for c in w.iter() {
            assert!((c - &CMatrix::scalar(2, C64::new(0.5, 0.0))).fro_norm() < 1e-15);
        }
        let c = power_tuple(&a, 2, PowerConvention::Componentwise).unwrap();
        assert_eq!(c.d(), 2);
        assert_eq!(power_tuple(&a, 1, PowerConvention::Word).unwrap(), a);
        assert_eq!(power_tuple(&a, 3, PowerConvention::Word).unwrap().d(), 8);
        assert!(power_tuple(&a, 0, PowerConvention::Word).is_err());

        // word order: A1A1, A1A2, A2A1, A2A2
        let e = r(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let f = r(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let t = OperatorTuple::new(vec![e.clone(), f.clone()]).unwrap();
        let w = power_tuple(&t, 2, PowerConvention::Word).unwrap();
        assert_eq!(w.get(1), &(&e * &f));
        assert_eq!(w.get(2), &(&f * &e));
    }

    #[test]
    fn inverse_adjoint_scalar() {
        let inv = inverse_tuple(&half_root_tuple()).unwrap();
        for c in inv.iter() {
            assert!((c - &CMatrix::scalar(2, C64::new(2f64.sqrt(), 0.0))).fro_norm() < 1e-14);
        }
        let sing = OperatorTuple::new(vec![CMatrix::identity(2), CMatrix::zeros(2)]).unwrap();
        assert!(matches!(
            inverse_tuple(&sing),
            Err(Error::SingularMatrix { index: Some(1), .. })
        ));
        let h = OperatorTuple::single(r(&[&[1.0, 2.0], &[2.0, -1.0]]));
        assert_eq!(adjoint_tuple(&h), h);
        let s = scalar_tuple(ONE, 3, 2).unwrap();
        assert!(s.iter().all(|c| c == &CMatrix::identity(2)));
    }

    #[test]
    fn tensors() {
        let t = tensor_tuple(
            &OperatorTuple::single(CMatrix::identity(2)),
            &OperatorTuple::single(CMatrix::identity(2)),
        );
        assert_eq!(t.get(0), &CMatrix::identity(4));
        let a = scalar_tuple(ONE, 2, 2).unwrap();
        let b = scalar_tuple(ONE, 3, 3).unwrap();
        let t = tensor_tuple(&a, &b);
        assert_eq!((t.d(), t.dim()), (6, 6));
    }

    #[test]
    fn mixing() {
        let tol = Tolerance::default();
        let t = OperatorTuple::new(vec![CMatrix::identity(2), shift(2)]).unwrap();
        assert_eq!(mix_by_unitary(&CMatrix::identity(2), &t, &tol).unwrap(), t);
        let swap = r(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let s = mix_by_unitary(&swap, &t, &tol).unwrap();
        assert_eq!(s.get(0), t.get(1));
        assert_eq!(s.get(1), t.get(0));
        let u = CMatrix::from_rows(&[vec![ZERO, ONE], vec![I, ZERO]]).unwrap();
        let single = OperatorTuple::single(CMatrix::identity(2));
        assert!(mix_by_unitary(&u, &single, &tol).is_err());
        let not_unitary = r(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(mix_by_unitary(&not_unitary, &t, &tol).is_err());
    }

    #[test]
    fn nilpotency() {
        let tol = Tolerance::default();
        let strict = CommutePolicy::Strict;
        let n2 = OperatorTuple::single(shift(2));
        assert_eq!(nilpotency_order(&n2, 5, &tol, strict).unwrap(), Some(2));
        let z = scalar_tuple(ZERO, 2, 3).unwrap();
        assert_eq!(nilpotency_order(&z, 5, &tol, strict).unwrap(), Some(1));
        let s3 = shift(3);
        // N·N² = 0, but the order-2 word N₁² = N² does not vanish.
        let t = OperatorTuple::new(vec![s3.clone(), s3.pow(2)]).unwrap();
        assert_eq!(nilpotency_order(&t, 5, &tol, strict).unwrap(), Some(3));
        let t = OperatorTuple::new(vec![s3.pow(2), s3.pow(2)]).unwrap();
        assert_eq!(nilpotency_order(&t, 5, &tol, strict).unwrap(), Some(2));
        let single = OperatorTuple::single(s3);
        assert_eq!(nilpotency_order(&single, 2, &tol, strict).unwrap(), None);
        assert_eq!(nilpotency_order(&single, 3, &tol, strict).unwrap(), Some(3));
        let bad = OperatorTuple::new(vec![shift(2), shift(2).transpose()]).unwrap();
        assert!(matches!(
            nilpotency_order(&bad, 3, &tol, strict),
            Err(Error::NonCommuting(_))
        ));
        assert!(nilpotency_order(&bad, 3, &tol, CommutePolicy::Lax).is_ok());
    }

    #[test]
    fn tuple_json_round_trip() {
        let t = OperatorTuple::new(vec![CMatrix::identity(2), shift(2)]).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.starts_with("{\"dim\":2,\"d\":2,"));
        let back: OperatorTuple = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let wrong_d = s.replace("\"d\":2", "\"d\":3");
        assert!(serde_json::from_str::<OperatorTuple>(&wrong_d).is_err());
    }
}
