//! Instance factories.
//!
//! Every random commuting family is a set of polynomials in a single seed
//! matrix, which makes commutativity exact up to rounding. Randomness comes
//! from a `ChaCha8Rng` seeded with `seed_from_u64`, so a seed pins the
//! instance bit for bit.

mod bundles;
mod profiles;

pub use bundles::*;
pub use profiles::{
    drifting_family, jordan_family, product_without_cross_conditions, random_commuting_instance, random_instance,
    Profile,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::classify::{min_isometry_degree, min_symmetry_degree};
use crate::error::{invalid, Error, Result};
use crate::matrix::{CMatrix, Tolerance, C64, I, ONE, ZERO};
use crate::tuples::{nilpotency_order, scalar_tuple, CommutePolicy, OperatorTuple};

/// Draw attempts before a factory gives up.
pub const MAX_ATTEMPTS: usize = 64;

pub(crate) fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Gaussian with unit expected modulus squared.
pub(crate) fn cgauss<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn rgauss<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub(crate) fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, |_, _| cgauss(rng))
}

/// Random Hermitian matrix with Frobenius norm 1.
pub(crate) fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let g = random_matrix(rng, n);
    let h = &g + &g.adjoint();
    let nrm = h.fro_norm();
    h.scale_real(1.0 / nrm)
}

/// Unit vector in `C^d`.
pub(crate) fn unit_vector<R: Rng>(rng: &mut R, d: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d).map(|_| cgauss(rng)).collect();
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-3 {
            return v.into_iter().map(|z| z / nrm).collect();
        }
    }
}

/// Upper shift of size `q` padded with zeros to dimension `n`: `J_q ⊕ 0`.
pub fn shift_seed(n: usize, q: usize) -> CMatrix {
    CMatrix::from_fn(n, |i, j| if j == i + 1 && j < q { ONE } else { ZERO })
}

/// Block-diagonal sum of upper shifts of the given sizes.
pub fn block_shift(sizes: &[usize]) -> CMatrix {
    let n: usize = sizes.iter().sum();
    let mut ends = Vec::new();
    let mut acc = 0;
    for &s in sizes {
        acc += s;
        ends.push(acc);
    }
    CMatrix::from_fn(n, |i, j| {
        if j == i + 1 && !ends.contains(&j) {
            ONE
        } else {
            ZERO
        }
    })
}

/// `c_0 I + c_1 M + c_2 M² + ...` by Horner's rule.
pub fn poly_eval(m: &CMatrix, coeffs: &[C64]) -> CMatrix {
    let n = m.dim();
    let mut acc = CMatrix::zeros(n);
    for &c in coeffs.iter().rev() {
        acc = &(&acc * m) + &CMatrix::scalar(n, c);
    }
    acc
}

/// Random polynomial of degree `< len` with zero constant term and a linear
/// coefficient bounded away from zero.
pub(crate) fn zero_const_poly<R: Rng>(rng: &mut R, len: usize) -> Vec<C64> {
    let mut p = vec![ZERO; len.max(1)];
    for (k, c) in p.iter_mut().enumerate().skip(1) {
        *c = cgauss(rng);
        if k == 1 && c.norm() < 0.3 {
            *c = *c / c.norm().max(1e-12) * 0.3;
        }
    }
    p
}

/// `(p_1(M), ..., p_d(M))`.
pub fn commuting_from_seed(seed_matrix: &CMatrix, polys: &[Vec<C64>]) -> Result<OperatorTuple> {
    if polys.is_empty() {
        return Err(invalid("commuting_from_seed needs at least one polynomial"));
    }
    OperatorTuple::new(polys.iter().map(|p| poly_eval(seed_matrix, p)).collect())
}

/// Commuting nilpotent `d`-tuple of exact order `target_order` at dimension
/// `n`, built from zero-constant polynomials in `J_k ⊕ 0`, `k = target_order`.
pub fn nilpotent_commuting(n: usize, d: usize, target_order: u32, rng_seed: u64) -> Result<OperatorTuple> {
    let mut rng = rng_from(rng_seed);
    nilpotent_from_rng(&mut rng, n, d, target_order, false)
}

pub(crate) fn nilpotent_from_rng<R: Rng>(
    rng: &mut R,
    n: usize,
    d: usize,
    target_order: u32,
    lower: bool,
) -> Result<OperatorTuple> {
    if n == 0 || d == 0 {
        return Err(invalid("nilpotent_commuting needs n >= 1 and d >= 1"));
    }
    let q = target_order as usize;
    if q == 0 || q > n {
        return Err(invalid(format!(
            "a commuting nilpotent tuple of order {target_order} does not fit in dimension {n}"
        )));
    }
    let mut seed = shift_seed(n, q);
    if lower {
        seed = seed.transpose();
    }
    let tol = Tolerance::default();
    for _ in 0..MAX_ATTEMPTS {
        let comps: Vec<CMatrix> = (0..d)
            .map(|_| {
                let m = poly_eval(&seed, &zero_const_poly(rng, q));
                let nrm = m.fro_norm();
                if nrm > 0.0 {
                    m.scale_real(1.0 / nrm)
                } else {
                    m
                }
            })
            .collect();
        let t = OperatorTuple::new(comps)?;
        if nilpotency_order(&t, target_order + 1, &tol, CommutePolicy::Strict)? == Some(target_order) {
            return Ok(t);
        }
    }
    Err(Error::GenerationFailure {
        attempts: MAX_ATTEMPTS,
        reason: format!("no tuple of nilpotency order {target_order} found"),
    })
}

fn jordan(lambda: C64, k: usize) -> CMatrix {
    &CMatrix::scalar(k, lambda) + &shift_seed(k, k)
}

/// `λ I_k + N_k` for real `λ`; `(T*, T)` is `(I, 2k-1)`-symmetric and no less.
pub fn jordan_symmetric(lambda: f64, k: usize) -> Result<CMatrix> {
    if k == 0 {
        return Err(invalid("Jordan block size must be >= 1"));
    }
    if !lambda.is_finite() {
        return Err(invalid("lambda must be finite"));
    }
    let t = jordan(C64::new(lambda, 0.0), k);
    validate_jordan(&t, k, false)?;
    Ok(t)
}

/// `λ I_k + N_k` for `|λ| = 1`; `(T*, T)` is `(I, 2k-1)`-isometric and no less.
pub fn jordan_isometric(lambda: C64, k: usize) -> Result<CMatrix> {
    if k == 0 {
        return Err(invalid("Jordan block size must be >= 1"));
    }
    if (lambda.norm() - 1.0).abs() > 1e-12 {
        return Err(invalid(format!(
            "isometric Jordan factory needs |lambda| = 1, got {}",
            lambda.norm()
        )));
    }
    let t = jordan(lambda, k);
    validate_jordan(&t, k, true)?;
    Ok(t)
}

fn validate_jordan(t: &CMatrix, k: usize, isometric: bool) -> Result<()> {
    let (a, b) = (OperatorTuple::single(t.adjoint()), OperatorTuple::single(t.clone()));
    let x = CMatrix::identity(k);
    let want = (2 * k - 1) as u32;
    let tol = Tolerance::default();
    let got = if isometric {
        min_isometry_degree(&a, &b, &x, want + 1, &tol)?
    } else {
        min_symmetry_degree(&a, &b, &x, want + 1, &tol)?
    };
    if got != Some(want) {
        return Err(Error::GenerationFailure {
            attempts: 1,
            reason: format!("Jordan block of size {k} validated at degree {got:?}, expected {want}"),
        });
    }
    Ok(())
}

/// `A = B = (I/√2, I/√2)` on `C²`.
pub fn paper_example_squares() -> (OperatorTuple, OperatorTuple) {
    let a = scalar_tuple(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0), 2, 2)
        .expect("fixed shape");
    (a.clone(), a)
}

/// `(T, A₀, U, S)` with `T = [[1,1],[0,1]]`, `A₀ = diag(0,1)`,
/// `U = [[0,1],[i,0]]` and `S = U T`.
pub fn paper_example_mixing() -> (CMatrix, CMatrix, CMatrix, CMatrix) {
    let t = CMatrix::from_rows(&[vec![ONE, ONE], vec![ZERO, ONE]]).expect("fixed shape");
    let a0 = CMatrix::diagonal(&[ZERO, ONE]);
    let u = CMatrix::from_rows(&[vec![ZERO, ONE], vec![I, ZERO]]).expect("fixed shape");
    let s = &u * &t;
    (t, a0, u, s)
}

/// `C X C` for the standard-basis conjugation `C`: entrywise conjugate.
pub fn conjugation_apply(x: &CMatrix) -> CMatrix {
    x.conj()
}
