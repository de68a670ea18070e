//! Seeded bundle factories, one per theorem profile.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use super::bundles::*;
use super::{
    cgauss, nilpotent_from_rng, poly_eval, random_hermitian, random_matrix, rgauss, rng_from, shift_seed,
    block_shift, unit_vector, zero_const_poly, MAX_ATTEMPTS,
};
use crate::classify::{min_isometry_degree, min_symmetry_degree};
use crate::error::{invalid, Error, Result};
use crate::matrix::{CMatrix, Tolerance, C64, ONE, ZERO};
use crate::transforms::{isosym_scaled, mixed_isosym_scaled};
use crate::tuples::{adjoint_tuple, conj_tuple, nilpotency_order, CommutePolicy, OperatorTuple};

/// Named instance families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Profile {
    Pro01,
    Pro02,
    Pro03,
    Pro04,
    Pro5,
    Thm05,
    Cor05,
    Cor050,
    Thm06,
    Cor06,
    Cor061,
    Cor062,
    Thm07,
}

impl Profile {
    pub const ALL: [Profile; 13] = [
        Profile::Pro01,
        Profile::Pro02,
        Profile::Pro03,
        Profile::Pro04,
        Profile::Pro5,
        Profile::Thm05,
        Profile::Cor05,
        Profile::Cor050,
        Profile::Thm06,
        Profile::Cor06,
        Profile::Cor061,
        Profile::Cor062,
        Profile::Thm07,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Profile::Pro01 => "pro01",
            Profile::Pro02 => "pro02",
            Profile::Pro03 => "pro03",
            Profile::Pro04 => "pro04",
            Profile::Pro5 => "pro5",
            Profile::Thm05 => "thm05",
            Profile::Cor05 => "cor05",
            Profile::Cor050 => "cor050",
            Profile::Thm06 => "thm06",
            Profile::Cor06 => "cor06",
            Profile::Cor061 => "cor061",
            Profile::Cor062 => "cor062",
            Profile::Thm07 => "thm07",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "pro02-family" {
            return Ok(Profile::Pro02);
        }
        Profile::ALL
            .iter()
            .copied()
            .find(|p| p.id() == s)
            .ok_or_else(|| invalid(format!("unknown profile '{s}'")))
    }
}

/// Seeded bundle for `profile`. The same seed always gives the same bundle.
pub fn random_instance(profile: Profile, rng_seed: u64) -> Result<Bundle> {
    let mut rng = rng_from(rng_seed);
    let r = &mut rng;
    Ok(match profile {
        Profile::Pro01 => Bundle::Pro01(gen_pro01(r)?),
        Profile::Pro02 => Bundle::Pro02(gen_pro02(r)?),
        Profile::Pro03 => Bundle::Pro03(gen_pro03(r)?),
        Profile::Pro04 => Bundle::Pro04(gen_pro04(r)?),
        Profile::Pro5 => Bundle::Pro5(gen_pro5(r)?),
        Profile::Thm05 => Bundle::Thm05(gen_thm05(r)?),
        Profile::Cor05 => Bundle::Cor05(gen_cor05(r)?),
        Profile::Cor050 => Bundle::Cor050(gen_cor050(r)?),
        Profile::Thm06 => Bundle::Thm06(gen_thm06(r)?),
        Profile::Cor06 => Bundle::Cor06(gen_product(r, false)?),
        Profile::Cor061 => Bundle::Cor061(gen_cor061(r)?),
        Profile::Cor062 => Bundle::Cor062(gen_product(r, true)?),
        Profile::Thm07 => Bundle::Thm07(gen_thm07(r)?),
    })
}

/// Random commuting pair `(A, B)` with `X`: every `A_i` is a polynomial in one
/// random matrix and every `B_i` in another. Dimension `1..=max_n`, tuple
/// length `1..=max_d`.
pub fn random_commuting_instance(
    rng_seed: u64,
    max_n: usize,
    max_d: usize,
) -> Result<(OperatorTuple, OperatorTuple, CMatrix)> {
    if max_n == 0 || max_d == 0 {
        return Err(invalid("random_commuting_instance needs max_n >= 1 and max_d >= 1"));
    }
    let mut rng = rng_from(rng_seed);
    let n = rng.random_range(1..=max_n);
    let d = rng.random_range(1..=max_d);
    let side = |rng: &mut _| -> Result<OperatorTuple> {
        let m = random_matrix(rng, n);
        let m = m.scale_real(1.0 / m.fro_norm().max(1e-12));
        let polys: Vec<Vec<C64>> = (0..d)
            .map(|_| (0..3).map(|_| cgauss(rng) * 0.6).collect())
            .collect();
        super::commuting_from_seed(&m, &polys)
    };
    let a = side(&mut rng)?;
    let b = side(&mut rng)?;
    let x = random_matrix(&mut rng, n);
    Ok((a, b, x))
}

fn failure(reason: &str) -> Error {
    Error::GenerationFailure {
        attempts: MAX_ATTEMPTS,
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flavour {
    /// `Σ a_i b_i = 1`.
    Iso,
    /// `Σ a_i = Σ b_i`.
    Sym,
    Both,
}

fn random_flavour<R: Rng>(rng: &mut R) -> Flavour {
    match rng.random_range(0..3) {
        0 => Flavour::Iso,
        1 => Flavour::Sym,
        _ => Flavour::Both,
    }
}

/// Scalar weights `(a, b)` meeting the constraint of `flavour`, or `None`
/// when the draw is badly conditioned.
fn flavoured_scalars<R: Rng>(rng: &mut R, d: usize, flavour: Flavour) -> Option<(Vec<C64>, Vec<C64>)> {
    if d == 1 && flavour == Flavour::Both {
        let s = if rng.random_bool(0.5) { ONE } else { -ONE };
        return Some((vec![s], vec![s]));
    }
    let a: Vec<C64> = (0..d).map(|_| cgauss(rng)).collect();
    let mut b: Vec<C64> = (0..d).map(|_| cgauss(rng)).collect();
    let dot: C64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let gap: C64 = a.iter().sum::<C64>() - b.iter().sum::<C64>();
    match flavour {
        Flavour::Iso => {
            let k = (0..d).max_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm()))?;
            if a[k].norm() < 0.2 {
                return None;
            }
            b[k] += (ONE - dot) / a[k];
        }
        Flavour::Sym => b[d - 1] += gap,
        Flavour::Both => {
            let (p, q) = (d - 2, d - 1);
            let det = a[q] - a[p];
            if det.norm() < 0.2 {
                return None;
            }
            let y = (ONE - dot - a[p] * gap) / det;
            b[p] += gap - y;
            b[q] += y;
        }
    }
    if a.iter().chain(&b).any(|z| z.norm() > 4.0) {
        return None;
    }
    Some((a, b))
}

/// `(s_i I + c_i P)` with the nilpotent part present only when `nil` is set.
fn scalar_plus<R: Rng>(rng: &mut R, scalars: &[C64], p: &CMatrix, nil: bool) -> Result<OperatorTuple> {
    let n = p.dim();
    OperatorTuple::new(
        scalars
            .iter()
            .map(|&s| {
                let base = CMatrix::scalar(n, s);
                if nil {
                    &base + &p.scale(cgauss(rng))
                } else {
                    base
                }
            })
            .collect(),
    )
}

/// A pair `(A, B)` of the given flavour: scalar weights plus nilpotent parts
/// in `pa` (left) and `pb` (right) on randomly chosen sides.
fn flavoured_pair<R: Rng>(
    rng: &mut R,
    d: usize,
    flavour: Flavour,
    pa: &CMatrix,
    pb: &CMatrix,
) -> Result<Option<(OperatorTuple, OperatorTuple)>> {
    let Some((sa, sb)) = flavoured_scalars(rng, d, flavour) else {
        return Ok(None);
    };
    let side = rng.random_range(0..4);
    let a = scalar_plus(rng, &sa, pa, side == 1 || side == 3)?;
    let b = scalar_plus(rng, &sb, pb, side == 2 || side == 3)?;
    Ok(Some((a, b)))
}

/// `M ⊕ 0_r`.
fn pad_zero(m: &CMatrix, r: usize) -> CMatrix {
    let k = m.dim();
    CMatrix::from_fn(k + r, |i, j| if i < k && j < k { m.get(i, j) } else { ZERO })
}

fn gen_pro01<R: Rng>(rng: &mut R) -> Result<Pro01Bundle> {
    let tol = Tolerance::default();
    for _ in 0..MAX_ATTEMPTS {
        let q = rng.random_range(1..=3usize);
        let pad = if rng.random_bool(0.25) { rng.random_range(1..=2usize) } else { 0 };
        let lambda = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        let nu = poly_eval(&shift_seed(q, q), &zero_const_poly(rng, q));
        let t1 = &CMatrix::scalar(q, lambda) + &nu;
        let t = pad_zero(&t1, pad);
        let x = pad_zero(&CMatrix::identity(q), pad);
        let d = rng.random_range(1..=3usize);
        let w = unit_vector(rng, d);
        let comps: Vec<CMatrix> = w.iter().map(|&wi| t.scale(wi)).collect();
        let b = OperatorTuple::new(comps)?;
        let a = adjoint_tuple(&b);
        let want = (2 * q - 1) as u32;
        if min_isometry_degree(&a, &b, &x, want + 1, &tol)? != Some(want) {
            continue;
        }
        let m = want + rng.random_range(0..=1u32);
        return Ok(Pro01Bundle { a, b, x, m });
    }
    Err(failure("no Jordan-type isometric pair validated"))
}

/// Family members use the parameters `1/k` for these `k`.
const FAMILY_STEPS: [u32; 11] = [1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024];

fn gen_pro02<R: Rng>(rng: &mut R) -> Result<Pro02Bundle> {
    let tol = Tolerance::default();
    for _ in 0..MAX_ATTEMPTS {
        let n = rng.random_range(2..=4usize);
        let d = rng.random_range(1..=2usize);
        let iso = rng.random_bool(0.5);
        let flavour = if iso { Flavour::Iso } else { Flavour::Sym };
        let Some((sa, sb)) = flavoured_scalars(rng, d, flavour) else {
            continue;
        };
        let p = shift_seed(n, 2).transpose();
        let alpha: Vec<C64> = (0..d).map(|_| cgauss(rng)).collect();
        let eta: Vec<C64> = (0..d).map(|_| cgauss(rng)).collect();
        let build = |eps: f64| -> Result<OperatorTuple> {
            OperatorTuple::new(
                (0..d)
                    .map(|i| &CMatrix::scalar(n, sa[i]) + &p.scale(alpha[i] + eta[i] * eps))
                    .collect(),
            )
        };
        let b = OperatorTuple::new(sb.iter().map(|&s| CMatrix::scalar(n, s)).collect())?;
        let limit_a = build(0.0)?;
        let members = FAMILY_STEPS
            .iter()
            .map(|&k| {
                Ok(FamilyMember {
                    a: build(1.0 / k as f64)?,
                    b: b.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let x = random_matrix(rng, n);
        let other = rng.random_range(1..=2u32);
        let (identity, m1, m2) = if iso {
            (FamilyIdentity::Isometric, 2, other)
        } else {
            (FamilyIdentity::Symmetric, other, 2)
        };
        let ok = members
            .iter()
            .map(|mb| (&mb.a, &mb.b))
            .chain(std::iter::once((&limit_a, &b)))
            .map(|(ma, mb)| isosym_scaled(ma, mb, &x, m1, m2).map(|dft| dft.is_zero(&tol)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .all(|z| z);
        if !ok {
            continue;
        }
        return Ok(Pro02Bundle {
            members,
            limit_a,
            limit_b: b,
            x,
            identity,
            m1,
            m2,
        });
    }
    Err(failure("no convergent family validated"))
}

/// `T_k = [[1, 1 + 1/k], [0, 1]]` for `k` in the family steps, converging
/// to the Jordan block; every member is 3-isometric and 3-symmetric.
pub fn jordan_family() -> Pro02Bundle {
    let jordan = |c: f64| CMatrix::from_real_rows(&[vec![1.0, c], vec![0.0, 1.0]]).expect("fixed shape");
    let members = FAMILY_STEPS
        .iter()
        .map(|&k| {
            let t = jordan(1.0 + 1.0 / k as f64);
            FamilyMember {
                a: OperatorTuple::single(t.adjoint()),
                b: OperatorTuple::single(t),
            }
        })
        .collect();
    let t = jordan(1.0);
    Pro02Bundle {
        members,
        limit_a: OperatorTuple::single(t.adjoint()),
        limit_b: OperatorTuple::single(t),
        x: CMatrix::identity(2),
        identity: FamilyIdentity::Isometric,
        m1: 3,
        m2: 0,
    }
}

/// Scalar pairs `(a_k I, I)` with `a_k = 1 + 1/k`: `Δ¹` does not vanish for
/// any member, so the family fails its own hypothesis.
pub fn drifting_family() -> Pro02Bundle {
    let members = FAMILY_STEPS
        .iter()
        .map(|&k| FamilyMember {
            a: OperatorTuple::single(CMatrix::scalar(2, C64::new(1.0 + 1.0 / k as f64, 0.0))),
            b: OperatorTuple::single(CMatrix::identity(2)),
        })
        .collect();
    Pro02Bundle {
        members,
        limit_a: OperatorTuple::single(CMatrix::identity(2)),
        limit_b: OperatorTuple::single(CMatrix::identity(2)),
        x: CMatrix::identity(2),
        identity: FamilyIdentity::Isometric,
        m1: 1,
        m2: 0,
    }
}

/// `u I + p(N)` with `|u| >= 0.5`, invertible.
fn invertible_poly<R: Rng>(rng: &mut R, nil: &CMatrix, len: usize) -> CMatrix {
    let mut u = cgauss(rng);
    if u.norm() < 0.5 {
        u = u / u.norm().max(1e-12) * 0.5;
    }
    &CMatrix::scalar(nil.dim(), u) + &poly_eval(nil, &zero_const_poly(rng, len))
}

fn gen_pro03<R: Rng>(rng: &mut R) -> Result<Pro03Bundle> {
    for _ in 0..MAX_ATTEMPTS {
        let n = rng.random_range(2..=4usize);
        let d = rng.random_range(2..=4usize);
        let q = rng.random_range(1..=n);
        let nil = shift_seed(n, q);
        let part = if rng.random_bool(0.5) {
            ReductionPart::Isometric
        } else {
            ReductionPart::Symmetric
        };
        let vanishing = rng.random_bool(0.5);
        let mut a = Vec::with_capacity(d);
        let mut b = Vec::with_capacity(d);
        for _ in 0..d - 1 {
            let ai = invertible_poly(rng, &nil, q);
            let bi = match part {
                ReductionPart::Isometric => match ai.inverse() {
                    Ok(inv) => inv,
                    Err(_) => continue,
                },
                ReductionPart::Symmetric => ai.clone(),
            };
            a.push(ai);
            b.push(bi);
        }
        if a.len() != d - 1 {
            continue;
        }
        let ad = invertible_poly(rng, &nil, q);
        let nu = poly_eval(&nil, &zero_const_poly(rng, q));
        let bd = match (part, vanishing) {
            (ReductionPart::Isometric, true) => {
                let Ok(inv) = ad.inverse() else { continue };
                &inv * &(&CMatrix::scalar(n, C64::new(-(d as f64 - 2.0), 0.0)) + &nu)
            }
            (ReductionPart::Symmetric, true) => &ad + &nu,
            (_, false) => invertible_poly(rng, &nil, q),
        };
        a.push(ad);
        b.push(bd);
        let x = invertible_poly(rng, &nil, q);
        return Ok(Pro03Bundle {
            a: OperatorTuple::new(a)?,
            b: OperatorTuple::new(b)?,
            x,
            part,
            m_max: 4,
            vanishing,
        });
    }
    Err(failure("no invertible reduction bundle drawn"))
}

/// Random complex polynomials `p_1..p_d` of degree `< len` whose sum is
/// `target`.
fn polys_summing_to<R: Rng>(rng: &mut R, d: usize, len: usize, target: &[C64]) -> Vec<Vec<C64>> {
    let mut polys: Vec<Vec<C64>> = (0..d - 1)
        .map(|_| (0..len).map(|_| cgauss(rng) * 0.5).collect())
        .collect();
    let mut last: Vec<C64> = (0..len).map(|k| target.get(k).copied().unwrap_or(ZERO)).collect();
    for p in &polys {
        for (l, c) in last.iter_mut().zip(p) {
            *l -= c;
        }
    }
    polys.push(last);
    polys
}

fn gen_pro04<R: Rng>(rng: &mut R) -> Result<Pro04Bundle> {
    let d = rng.random_range(1..=3usize);
    if rng.random_bool(0.25) {
        let n = rng.random_range(2..=4usize);
        let q = rng.random_range(2..=n);
        let s = &CMatrix::scalar(n, C64::new(rgauss(rng), 0.0)) + &shift_seed(n, q).scale(cgauss(rng));
        let weights = polys_summing_to(rng, d, 1, &[ONE]);
        let a = OperatorTuple::new(weights.iter().map(|w| s.scale(w[0])).collect())?;
        return Ok(Pro04Bundle { a });
    }
    let n = rng.random_range(1..=4usize);
    let h = random_hermitian(rng, n);
    let target: Vec<C64> = (0..3).map(|_| C64::new(rgauss(rng) * 0.7, 0.0)).collect();
    let polys = polys_summing_to(rng, d, 3, &target);
    Ok(Pro04Bundle {
        a: super::commuting_from_seed(&h, &polys)?,
    })
}

fn gen_pro5<R: Rng>(rng: &mut R) -> Result<Pro5Bundle> {
    let m = if rng.random_bool(0.5) { 2 } else { 4 };
    let d = rng.random_range(1..=3usize);
    let t = if m == 2 && !rng.random_bool(0.2) {
        let n = rng.random_range(1..=4usize);
        random_hermitian(rng, n)
    } else {
        let blocks = rng.random_range(1..=3usize);
        let mut sizes: Vec<usize> = (0..blocks).map(|_| rng.random_range(1..=2usize)).collect();
        if rng.random_bool(0.2) {
            sizes[0] = 3;
        }
        let shift = block_shift(&sizes);
        let n = shift.dim();
        let mut diag = Vec::with_capacity(n);
        for &s in &sizes {
            let h = rgauss(rng);
            diag.extend(std::iter::repeat_n(C64::new(h, 0.0), s));
        }
        let c = cgauss(rng);
        &CMatrix::diagonal(&diag) + &shift.scale(c)
    };
    let polys = polys_summing_to(rng, d, 3, &[ZERO, ONE]);
    Ok(Pro5Bundle {
        a: super::commuting_from_seed(&t, &polys)?,
        m,
    })
}

fn gen_thm05<R: Rng>(rng: &mut R) -> Result<Thm05Bundle> {
    let tol = Tolerance::default();
    for _ in 0..MAX_ATTEMPTS {
        let n = rng.random_range(3..=6usize);
        let d = rng.random_range(1..=3usize);
        let qa = rng.random_range(1..=3usize);
        let qb = rng.random_range(1..=3usize);
        let seed_a = shift_seed(n, qa).transpose();
        let seed_b = shift_seed(n, qb);
        let pa = seed_a.pow(qa.div_ceil(2) as u32);
        let pb = seed_b.pow(qb.div_ceil(2) as u32);
        let flavour = random_flavour(rng);
        let Some((a, b)) = flavoured_pair(rng, d, flavour, &pa, &pb)? else {
            continue;
        };
        let x = random_matrix(rng, n);
        let n1 = nilpotent_from_rng(rng, n, d, qa as u32, true)?;
        let n2 = nilpotent_from_rng(rng, n, d, qb as u32, false)?;
        let mut m2_order = [1u32, 2];
        m2_order.shuffle(rng);
        let mut found = None;
        'search: for m2 in m2_order {
            for m1 in 1..=2u32 {
                if isosym_scaled(&a, &b, &x, m1, m2)?.is_zero(&tol) {
                    found = Some((m1, m2));
                    break 'search;
                }
            }
        }
        let Some((m1, m2)) = found else { continue };
        return Ok(Thm05Bundle { a, b, n1, n2, x, m1, m2 });
    }
    Err(failure("no isosymmetric base pair of degree <= 2 found"))
}

fn gen_cor05<R: Rng>(rng: &mut R) -> Result<Cor05Bundle> {
    let tol = Tolerance::default();
    for _ in 0..MAX_ATTEMPTS {
        let n = rng.random_range(3..=5usize);
        let d = rng.random_range(1..=2usize);
        let qa = rng.random_range(1..=3usize);
        let qb = rng.random_range(1..=3usize);
        let seed_a = shift_seed(n, qa).transpose();
        let seed_b = shift_seed(n, qb);
        let pa = seed_a.pow(qa.div_ceil(2) as u32);
        let pb = seed_b.pow(qb.div_ceil(2) as u32);
        let f1 = random_flavour(rng);
        let f2 = random_flavour(rng);
        let Some((a1, b1)) = flavoured_pair(rng, d, f1, &pa, &pb)? else {
            continue;
        };
        let Some((a2, b2)) = flavoured_pair(rng, d, f2, &pa, &pb)? else {
            continue;
        };
        let x = random_matrix(rng, n);
        let iso = min_isometry_degree(&a1, &b1, &x, 3, &tol)?.filter(|&k| k >= 1);
        let sym = min_symmetry_degree(&a2, &b2, &x, 3, &tol)?.filter(|&k| k >= 1);
        let mut mixed = None;
        'search: for total in 2..=6u32 {
            for m1 in 1..total {
                let m2 = total - m1;
                if m1 > 3 || m2 > 3 {
                    continue;
                }
                if mixed_isosym_scaled((&a1, &b1), (&a2, &b2), &x, m1, m2)?.is_zero(&tol) {
                    mixed = Some((m1, m2));
                    break 'search;
                }
            }
        }
        if iso.is_none() && sym.is_none() && mixed.is_none() {
            continue;
        }
        let n1 = nilpotent_from_rng(rng, n, d, qa as u32, true)?;
        let n2 = nilpotent_from_rng(rng, n, d, qb as u32, false)?;
        return Ok(Cor05Bundle {
            a1,
            b1,
            a2,
            b2,
            n1,
            n2,
            x,
            iso,
            sym,
            mixed,
        });
    }
    Err(failure("no base pairs with a vanishing defect found"))
}

fn gen_cor050<R: Rng>(rng: &mut R) -> Result<Cor050Bundle> {
    let tol = Tolerance::default();
    for _ in 0..MAX_ATTEMPTS {
        let blocks = rng.random_range(1..=3usize);
        let sizes: Vec<usize> = (0..blocks).map(|_| rng.random_range(1..=3usize)).collect();
        let n: usize = sizes.iter().sum();
        if n > 6 {
            continue;
        }
        let d = rng.random_range(1..=3usize);
        let real_sums = rng.random_bool(0.5);
        let mut weights: Vec<Vec<C64>> = vec![Vec::with_capacity(n); d];
        let mut block_of = Vec::with_capacity(n);
        for (k, &s) in sizes.iter().enumerate() {
            let mut v = unit_vector(rng, d);
            if real_sums {
                let total: C64 = v.iter().sum();
                if total.norm() > 1e-6 {
                    let phase = C64::from_polar(1.0, -total.arg());
                    v.iter_mut().for_each(|z| *z *= phase);
                }
            }
            for _ in 0..s {
                for (i, w) in weights.iter_mut().enumerate() {
                    w.push(v[i]);
                }
                block_of.push(k);
            }
        }
        let t = OperatorTuple::new(weights.iter().map(|w| CMatrix::diagonal(w)).collect())?;
        let shift = block_shift(&sizes);
        let max_size = *sizes.iter().max().expect("non-empty");
        let nil = OperatorTuple::new(
            (0..d)
                .map(|_| {
                    let m = poly_eval(&shift, &zero_const_poly(rng, max_size));
                    let nrm = m.fro_norm();
                    if nrm > 0.0 {
                        m.scale_real(1.0 / nrm)
                    } else {
                        m
                    }
                })
                .collect(),
        )?;
        if nilpotency_order(&nil, max_size as u32 + 1, &tol, CommutePolicy::Strict)? != Some(max_size as u32) {
            continue;
        }
        let x = CMatrix::from_fn(n, |i, j| if block_of[i] == block_of[j] { cgauss(rng) } else { ZERO });
        let m2 = rng.random_range(1..=2u32);
        let star = adjoint_tuple(&t);
        if !isosym_scaled(&star, &t, &x, 1, m2)?.is_zero(&tol) {
            continue;
        }
        return Ok(Cor050Bundle { t, n: nil, x, m1: 1, m2 });
    }
    Err(failure("no block-scalar adjoint pair validated"))
}

/// Whether a `Δ^a_{P}(δ^b_{Q}(X))` defect vanishes, for `a, b` in `0..=k`.
fn vanishing_table(
    tri: (&OperatorTuple, &OperatorTuple),
    del: (&OperatorTuple, &OperatorTuple),
    x: &CMatrix,
    k: u32,
    tol: &Tolerance,
) -> Result<Vec<Vec<bool>>> {
    (0..=k)
        .map(|a| {
            (0..=k)
                .map(|b| mixed_isosym_scaled(tri, del, x, a, b).map(|dft| dft.is_zero(tol)))
                .collect()
        })
        .collect()
}

/// Least `(m, n, r, s)` in `1..=k` (by sum, then lexicographic) meeting every
/// hypothesis of the product theorem, cross conditions included.
fn product_degrees(
    ab: (&OperatorTuple, &OperatorTuple),
    st: (&OperatorTuple, &OperatorTuple),
    x: &CMatrix,
    k: u32,
    tol: &Tolerance,
) -> Result<Option<ProductDegrees>> {
    let iso_ab = vanishing_table(ab, ab, x, k, tol)?;
    let iso_st = vanishing_table(st, st, x, k, tol)?;
    let st_ab = vanishing_table(st, ab, x, k, tol)?;
    let ab_st = vanishing_table(ab, st, x, k, tol)?;
    let mut best: Option<(u32, ProductDegrees)> = None;
    for m in 1..=k {
        for n in 1..=k {
            for r in 1..=k {
                for s in 1..=k {
                    let (mu, nu, ru, su) = (m as usize, n as usize, r as usize, s as usize);
                    let ok = iso_ab[mu][nu]
                        && iso_st[ru][su]
                        && iso_st[ru][nu]
                        && iso_ab[mu][su]
                        && st_ab[ru][nu]
                        && ab_st[mu][su];
                    let total = m + n + r + s;
                    if ok && best.as_ref().is_none_or(|(b, _)| total < *b) {
                        best = Some((total, ProductDegrees { m, n, r, s }));
                    }
                }
            }
        }
    }
    Ok(best.map(|(_, d)| d))
}

struct ProductDraw {
    a: OperatorTuple,
    b: OperatorTuple,
    s: OperatorTuple,
    t: OperatorTuple,
    x: CMatrix,
}

/// `A, S` polynomials in a lower shift and `B, T` in an upper shift, so that
/// `[A,S] = [B,T] = 0`.
fn product_draw<R: Rng>(rng: &mut R, single_first: bool) -> Result<Option<ProductDraw>> {
    let n = rng.random_range(2..=5usize);
    let d1 = if single_first { 1 } else { rng.random_range(1..=2usize) };
    let d2 = rng.random_range(1..=2usize);
    let qa = rng.random_range(1..=2usize);
    let qb = rng.random_range(1..=2usize);
    let pa = shift_seed(n, qa).transpose();
    let pb = shift_seed(n, qb);
    let f1 = random_flavour(rng);
    let f2 = random_flavour(rng);
    let Some((a, b)) = flavoured_pair(rng, d1, f1, &pa, &pb)? else {
        return Ok(None);
    };
    let Some((s, t)) = flavoured_pair(rng, d2, f2, &pa, &pb)? else {
        return Ok(None);
    };
    let x = random_matrix(rng, n);
    Ok(Some(ProductDraw { a, b, s, t, x }))
}

fn gen_thm06<R: Rng>(rng: &mut R) -> Result<Thm06Bundle> {
    let tol = Tolerance::default();
    for _ in 0..MAX_ATTEMPTS {
        let Some(p) = product_draw(rng, false)? else { continue };
        let Some(degrees) = product_degrees((&p.a, &p.b), (&p.s, &p.t), &p.x, 4, &tol)? else {
            continue;
        };
        return Ok(Thm06Bundle {
            a: p.a,
            b: p.b,
            s: p.s,
            t: p.t,
            x: p.x,
            degrees,
        });
    }
    Err(failure("no product bundle satisfying all hypotheses found"))
}

/// Minimal degrees of two pairs at `x`, present only when both exist.
fn paired_degrees(
    first: (&OperatorTuple, &OperatorTuple),
    second: (&OperatorTuple, &OperatorTuple),
    x: &CMatrix,
    k: u32,
    tol: &Tolerance,
) -> Result<(Option<(u32, u32)>, Option<(u32, u32)>)> {
    let pos = |v: Option<u32>| v.filter(|&k| k >= 1);
    let iso = pos(min_isometry_degree(first.0, first.1, x, k, tol)?)
        .zip(pos(min_isometry_degree(second.0, second.1, x, k, tol)?));
    let sym = pos(min_symmetry_degree(first.0, first.1, x, k, tol)?)
        .zip(pos(min_symmetry_degree(second.0, second.1, x, k, tol)?));
    Ok((iso, sym))
}

fn gen_product<R: Rng>(rng: &mut R, single_first: bool) -> Result<ProductBundle> {
    let tol = Tolerance::default();
    for _ in 0..MAX_ATTEMPTS {
        let Some(p) = product_draw(rng, single_first)? else { continue };
        let (iso, sym) = paired_degrees((&p.a, &p.b), (&p.s, &p.t), &p.x, 4, &tol)?;
        if iso.is_none() && sym.is_none() {
            continue;
        }
        return Ok(ProductBundle {
            a: p.a,
            b: p.b,
            s: p.s,
            t: p.t,
            x: p.x,
            iso,
            sym,
        });
    }
    Err(failure("no product pairs with vanishing defects found"))
}

/// `v vᵀ` with `v = (1, i)`: complex symmetric with square zero.
fn isotropic_block() -> CMatrix {
    let i = crate::matrix::I;
    CMatrix::from_rows(&[vec![ONE, i], vec![i, -ONE]]).expect("fixed shape")
}

fn gen_cor061<R: Rng>(rng: &mut R) -> Result<Cor061Bundle> {
    let tol = Tolerance::default();
    for _ in 0..MAX_ATTEMPTS {
        let d = rng.random_range(1..=2usize);
        let (s, t, x) = if rng.random_bool(0.25) {
            let n = rng.random_range(1..=4usize);
            let diag_tuple = |rng: &mut R| -> Result<OperatorTuple> {
                let cols: Vec<Vec<f64>> = (0..n)
                    .map(|_| {
                        let v: Vec<f64> = (0..d).map(|_| rgauss(rng)).collect();
                        let nrm = v.iter().map(|z| z * z).sum::<f64>().sqrt().max(1e-9);
                        v.into_iter().map(|z| z / nrm).collect()
                    })
                    .collect();
                OperatorTuple::new(
                    (0..d)
                        .map(|i| CMatrix::diagonal(&cols.iter().map(|c| C64::new(c[i], 0.0)).collect::<Vec<_>>()))
                        .collect(),
                )
            };
            let s = diag_tuple(rng)?;
            let t = diag_tuple(rng)?;
            let x = CMatrix::diagonal(&(0..n).map(|_| cgauss(rng)).collect::<Vec<_>>());
            (s, t, x)
        } else {
            let n = rng.random_range(2..=4usize);
            let k = isotropic_block();
            let kk = if n == 4 && rng.random_bool(0.5) {
                CMatrix::from_fn(4, |i, j| if i / 2 == j / 2 { k.get(i % 2, j % 2) } else { ZERO })
            } else {
                pad_zero(&k, n - 2)
            };
            let side = |rng: &mut R| -> Result<OperatorTuple> {
                let mut s0: Vec<C64> = (0..d).map(|_| cgauss(rng)).collect();
                if rng.random_bool(0.6) {
                    let norm2: C64 = s0.iter().map(|z| z * z).sum();
                    if norm2.norm() < 0.1 {
                        return Err(failure("degenerate weights"));
                    }
                    let root = norm2.sqrt();
                    s0.iter_mut().for_each(|z| *z /= root);
                }
                let mut s1: Vec<C64> = (0..d).map(|_| cgauss(rng)).collect();
                if rng.random_bool(0.3) {
                    let total: C64 = s1.iter().sum();
                    s1[d - 1] -= total;
                }
                OperatorTuple::new(
                    s0.iter()
                        .zip(&s1)
                        .map(|(&a, &b)| &CMatrix::scalar(n, a) + &kk.scale(b))
                        .collect(),
                )
            };
            let (Ok(s), Ok(t)) = (side(rng), side(rng)) else { continue };
            (s, t, random_matrix(rng, n))
        };
        let (iso, sym) = paired_degrees(
            (&adjoint_tuple(&s), &conj_tuple(&s)),
            (&adjoint_tuple(&t), &conj_tuple(&t)),
            &x,
            4,
            &tol,
        )?;
        if iso.is_none() && sym.is_none() {
            continue;
        }
        return Ok(Cor061Bundle { s, t, x, iso, sym });
    }
    Err(failure("no conjugation bundle with vanishing defects found"))
}

fn tensor_factor_pair<R: Rng>(
    rng: &mut R,
    flavour: Flavour,
) -> Result<Option<(OperatorTuple, OperatorTuple)>> {
    let n = rng.random_range(1..=3usize);
    let d = rng.random_range(1..=2usize);
    let qa = rng.random_range(1..=n.min(2));
    let qb = rng.random_range(1..=n.min(2));
    let pa = shift_seed(n, qa).transpose();
    let pb = shift_seed(n, qb);
    flavoured_pair(rng, d, flavour, &pa, &pb)
}

fn gen_thm07<R: Rng>(rng: &mut R) -> Result<Thm07Bundle> {
    let tol = Tolerance::default();
    for _ in 0..MAX_ATTEMPTS {
        if rng.random_bool(0.5) {
            let f1 = random_flavour(rng);
            let f2 = random_flavour(rng);
            let Some((a, b)) = tensor_factor_pair(rng, f1)? else { continue };
            let Some((s, t)) = tensor_factor_pair(rng, f2)? else { continue };
            let ia = CMatrix::identity(a.dim());
            let is = CMatrix::identity(s.dim());
            let pos = |v: Option<u32>| v.filter(|&k| k >= 1);
            let iso = pos(min_isometry_degree(&a, &b, &ia, 4, &tol)?)
                .zip(pos(min_isometry_degree(&s, &t, &is, 4, &tol)?));
            let sym = pos(min_symmetry_degree(&a, &b, &ia, 4, &tol)?)
                .zip(pos(min_symmetry_degree(&s, &t, &is, 4, &tol)?));
            if iso.is_none() && sym.is_none() {
                continue;
            }
            return Ok(Thm07Bundle {
                a,
                b,
                s,
                t,
                hypotheses: TensorHypotheses::I { iso, sym },
            });
        }
        let f1 = random_flavour(rng);
        let Some((a, b)) = tensor_factor_pair(rng, f1)? else { continue };
        let Some((s, t)) = tensor_factor_pair(rng, Flavour::Both)? else { continue };
        let ia = CMatrix::identity(a.dim());
        let is = CMatrix::identity(s.dim());
        let mut mn = None;
        'search: for total in 2..=6u32 {
            for m in 1..total {
                let n = total - m;
                if m > 3 || n > 3 {
                    continue;
                }
                if isosym_scaled(&a, &b, &ia, m, n)?.is_zero(&tol) {
                    mn = Some((m, n));
                    break 'search;
                }
            }
        }
        let Some((m, n)) = mn else { continue };
        let r = min_isometry_degree(&s, &t, &is, 4, &tol)?.filter(|&k| k >= 1);
        let sd = min_symmetry_degree(&s, &t, &is, 4, &tol)?.filter(|&k| k >= 1);
        let (Some(r), Some(sd)) = (r, sd) else { continue };
        return Ok(Thm07Bundle {
            a,
            b,
            s,
            t,
            hypotheses: TensorHypotheses::Ii {
                degrees: ProductDegrees { m, n, r, s: sd },
            },
        });
    }
    Err(failure("no tensor bundle with vanishing defects found"))
}

/// Scalar pairs that satisfy the four stated hypotheses of the product
/// theorem at `m = n = r = s = 1`, with `[A,S] = [B,T] = 0`, but whose
/// product pair has no vanishing isosymmetric defect at any degree: `A = B =
/// (2)` is `1`-symmetric, `S = (2)`, `T = (1/2)` is `1`-isometric.
pub fn product_without_cross_conditions() -> Thm06Bundle {
    let sc = |v: f64| OperatorTuple::single(CMatrix::scalar(2, C64::new(v, 0.0)));
    Thm06Bundle {
        a: sc(2.0),
        b: sc(2.0),
        s: sc(2.0),
        t: sc(0.5),
        x: CMatrix::identity(2),
        degrees: ProductDegrees { m: 1, n: 1, r: 1, s: 1 },
    }
}
