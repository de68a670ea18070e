//! Multi-indices and exact binomial / multinomial coefficients.
//!
//! Coefficients are exact integers: binomials are `u64` (exact through
//! `C(67, 33)`), multinomials are `u128` (exact for every `j <= 30`, `d <= 6`,
//! and well beyond). Requests that would overflow return [`Error::Overflow`]
//! instead of losing precision.

use crate::error::{invalid, Error, Result};

/// A multi-index `α = (α_1, …, α_d)` of non-negative integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(invalid("multi-index must have length >= 1"));
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|α|`, the sum of the entries.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `α! = Π α_i!`.
    pub fn factorial(&self) -> Result<u64> {
        self.0.iter().try_fold(1u64, |acc, &a| {
            let f = factorial(a)?;
            acc.checked_mul(f)
                .ok_or_else(|| Error::Overflow(format!("{:?}!", self.0)))
        })
    }
}

fn factorial(n: u32) -> Result<u64> {
    (1..=u64::from(n)).try_fold(1u64, |acc, k| {
        acc.checked_mul(k)
            .ok_or_else(|| Error::Overflow(format!("{n}!")))
    })
}

/// All multi-indices of length `d` and order `j`, in lexicographically
/// descending order. There are `C(j+d-1, d-1)` of them.
pub fn compositions(d: usize, j: u32) -> Result<Vec<MultiIndex>> {
    if d == 0 {
        return Err(invalid("compositions: d must be >= 1"));
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; d];
    fill(&mut current, 0, j, &mut out);
    Ok(out)
}

fn fill(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for first in (0..=remaining).rev() {
        current[pos] = first;
        fill(current, pos + 1, remaining - first, out);
    }
}

/// `j! / α!`, computed as a product of binomials so intermediate values stay
/// as small as the result allows.
pub fn multinomial(j: u32, alpha: &MultiIndex) -> Result<u128> {
    if alpha.order() != j {
        return Err(invalid(format!(
            "multinomial: order of {:?} is {}, expected {j}",
            alpha.entries(),
            alpha.order()
        )));
    }
    let mut remaining = u64::from(j);
    let mut acc = 1u128;
    for &a in alpha.entries() {
        let c = u128::from(binomial(remaining, u64::from(a))?);
        acc = acc
            .checked_mul(c)
            .ok_or_else(|| Error::Overflow(format!("{j}!/{:?}!", alpha.entries())))?;
        remaining -= u64::from(a);
    }
    Ok(acc)
}

/// `C(m, j)`, zero when `j > m`.
pub fn binomial(m: u64, j: u64) -> Result<u64> {
    if j > m {
        return Ok(0);
    }
    let j = j.min(m - j);
    let mut acc: u128 = 1;
    for i in 0..j {
        // acc * (m - i) / (i + 1) is exact at every step
        acc = acc * u128::from(m - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return Err(Error::Overflow(format!("C({m},{j})")));
        }
    }
    Ok(acc as u64)
}

/// `C(m, j)` as a float; used where only a ratio is needed and `m` may be large.
pub fn binomial_f64(m: u64, j: u64) -> f64 {
    if j > m {
        return 0.0;
    }
    let j = j.min(m - j);
    (0..j).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}
