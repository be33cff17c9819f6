//! Linear maps on `M_m` (`m = n₁⋯n_k`) that send rank-one tensor products
//! `A₁ ⊗ ⋯ ⊗ A_k` to rank-one matrices.
//!
//! The crate provides, at desk scale:
//!
//! - [`tensor`]: the structural operators on dense complex matrices —
//!   Kronecker products, the row-major `vec` stacking, partial transposes
//!   `PT₁`/`PT₂`, realignments `R₁`/`R₂`/`R`, tensor-factor permutations,
//!   and numerical rank.
//! - [`subspaces`]: kernel bases, a multi-start search for decomposable
//!   (product) vectors inside a subspace, completely entangled subspaces and
//!   their maximal dimension, and synthesis of factor matrices whose kernel
//!   avoids all nonzero product vectors.
//! - [`forms`]: the canonical partition form of a rank-one preserver,
//!   `A₁⊗⋯⊗A_k ↦ M (⊗_{P₁} A_i ⊗ ⊗_{P₂} A_iᵀ ⊗ ⊗_{P₃} vec(A_i) ⊗ ⊗_{P₄} vecᵀ(A_i)) Nᵀ`,
//!   together with the 16-form bipartite catalog expressed through partial
//!   transposes and realignments.
//! - [`verify`]: probabilistic verification that a given vec-action matrix
//!   preserves rank-one tensor products, plus the rank-bound and
//!   nonsingular-image side conditions.
//! - [`recover`]: structure recovery — given a verified preserver, find the
//!   partition and the factor matrices `(M, N)` up to the reciprocal scalar
//!   gauge `(M, N) ↦ (λM, N/λ)`.
//!
//! All randomized routines take an explicit seed and derive one independent
//! substream per start/trial, so results are identical whether the crate is
//! built with the default `parallel` feature (rayon) or without it.

pub mod error;
pub mod forms;
pub mod matrix;
pub mod recover;
pub mod rng;
pub mod subspaces;
pub mod tensor;
pub mod verify;

pub(crate) mod exec;
pub(crate) mod numeric;

pub use error::Error;
pub use matrix::{ComplexMatrix, DimsProfile, RankOneProduct};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
