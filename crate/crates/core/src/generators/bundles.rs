//! Serializable theorem input bundles.

use serde::{Deserialize, Serialize};

use crate::matrix::CMatrix;
use crate::tuples::OperatorTuple;

/// An `(X, m)`-isometric pair for the Cesàro limit check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pro01Bundle {
    pub a: OperatorTuple,
    pub b: OperatorTuple,
    pub x: CMatrix,
    pub m: u32,
}

/// Which defect identity every member of a convergent family satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyIdentity {
    /// `Δ^{m1}(X) = 0` for every member.
    Isometric,
    /// `δ^{m2}(X) = 0` for every member.
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub a: OperatorTuple,
    pub b: OperatorTuple,
}

/// A sequence of pairs converging in norm to `(limit_a, limit_b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pro02Bundle {
    pub members: Vec<FamilyMember>,
    pub limit_a: OperatorTuple,
    pub limit_b: OperatorTuple,
    pub x: CMatrix,
    pub identity: FamilyIdentity,
    pub m1: u32,
    pub m2: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionPart {
    /// First `d-1` pairs are `(X,1)`-isometric.
    Isometric,
    /// First `d-1` pairs are `(X,1)`-symmetric.
    Symmetric,
}

/// Input for the reduction to the last component pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pro03Bundle {
    pub a: OperatorTuple,
    pub b: OperatorTuple,
    pub x: CMatrix,
    pub part: ReductionPart,
    /// The equivalence is checked for every `m` in `1..=m_max`.
    pub m_max: u32,
    /// Whether the last pair was built so that its side of the equivalence
    /// vanishes at some degree.
    pub vanishing: bool,
}

/// A tuple `A` whose pair `(A*, A)` is a candidate for `(I,2)`-symmetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pro04Bundle {
    pub a: OperatorTuple,
}

/// A tuple `A` and an even degree `m` with `(A*, A)` a candidate for
/// `(I,m)`-symmetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pro5Bundle {
    pub a: OperatorTuple,
    pub m: u32,
}

/// Base pair with `Δ^{m1}(δ^{m2}(X)) = 0` and nilpotent perturbations
/// `N1` (commuting with `A`) and `N2` (commuting with `B`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm05Bundle {
    pub a: OperatorTuple,
    pub b: OperatorTuple,
    pub n1: OperatorTuple,
    pub n2: OperatorTuple,
    pub x: CMatrix,
    pub m1: u32,
    pub m2: u32,
}

/// Two base pairs sharing the nilpotent perturbations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cor05Bundle {
    pub a1: OperatorTuple,
    pub b1: OperatorTuple,
    pub a2: OperatorTuple,
    pub b2: OperatorTuple,
    pub n1: OperatorTuple,
    pub n2: OperatorTuple,
    pub x: CMatrix,
    /// `m1` with `Δ^{m1}_{A1,B1}(X) = 0`, when one was found.
    pub iso: Option<u32>,
    /// `m2` with `δ^{m2}_{A2,B2}(X) = 0`.
    pub sym: Option<u32>,
    /// `(m1, m2)` with `Δ^{m1}_{A1,B1}(δ^{m2}_{A2,B2}(X)) = 0`.
    pub mixed: Option<(u32, u32)>,
}

/// Adjoint specialization: left tuple `T* + N`, right tuple `T + N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cor050Bundle {
    pub t: OperatorTuple,
    pub n: OperatorTuple,
    pub x: CMatrix,
    pub m1: u32,
    pub m2: u32,
}

/// Degrees `(m, n, r, s)` of the product theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductDegrees {
    pub m: u32,
    pub n: u32,
    pub r: u32,
    pub s: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm06Bundle {
    pub a: OperatorTuple,
    pub b: OperatorTuple,
    pub s: OperatorTuple,
    pub t: OperatorTuple,
    pub x: CMatrix,
    pub degrees: ProductDegrees,
}

/// Pairs `(A, B)` and `(S, T)` for the two product implications; `iso` and
/// `sym` hold the degrees of `(A,B)` and `(S,T)` when both exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductBundle {
    pub a: OperatorTuple,
    pub b: OperatorTuple,
    pub s: OperatorTuple,
    pub t: OperatorTuple,
    pub x: CMatrix,
    pub iso: Option<(u32, u32)>,
    pub sym: Option<(u32, u32)>,
}

/// Tuples `S`, `T` for the conjugation corollary; degrees refer to the pairs
/// `(S*, CSC)` and `(T*, CTC)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cor061Bundle {
    pub s: OperatorTuple,
    pub t: OperatorTuple,
    pub x: CMatrix,
    pub iso: Option<(u32, u32)>,
    pub sym: Option<(u32, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum TensorHypotheses {
    /// `Δ^m_{A,B}(I) = Δ^n_{S,T}(I) = 0` and/or the `δ` analogue.
    I {
        iso: Option<(u32, u32)>,
        sym: Option<(u32, u32)>,
    },
    /// `Δ^m(δ^n_{A,B}(I)) = Δ^r_{S,T}(I) = δ^s_{S,T}(I) = 0`.
    Ii { degrees: ProductDegrees },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm07Bundle {
    pub a: OperatorTuple,
    pub b: OperatorTuple,
    pub s: OperatorTuple,
    pub t: OperatorTuple,
    pub hypotheses: TensorHypotheses,
}

/// A generated input for one of the randomized theorem checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", content = "data", rename_all = "snake_case")]
pub enum Bundle {
    Pro01(Pro01Bundle),
    Pro02(Pro02Bundle),
    Pro03(Pro03Bundle),
    Pro04(Pro04Bundle),
    Pro5(Pro5Bundle),
    Thm05(Thm05Bundle),
    Cor05(Cor05Bundle),
    Cor050(Cor050Bundle),
    Thm06(Thm06Bundle),
    Cor06(ProductBundle),
    Cor061(Cor061Bundle),
    Cor062(ProductBundle),
    Thm07(Thm07Bundle),
}
