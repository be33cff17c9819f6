//! Structure recovery: given a verified rank-one preserver `Φ`, find the
//! partition `(P₁,P₂,P₃,P₄)` and factor matrices `(M, N)` up to the scalar
//! gauge `(M, N) ↦ (λM, N/λ)`.
//!
//! Classification probes how outputs move. For a generic rank-one product,
//! outputs factor as `(Mu)(Nv)ᵀ`; perturbing `xᵢ` (resp. `yᵢ`) alone moves
//! the output's column space when the factor feeds `u` and the row space
//! when it feeds `v`:
//!
//! | xᵢ moves | yᵢ moves | class |
//! |----------|----------|-------|
//! | columns  | rows     | P₁    |
//! | rows     | columns  | P₂    |
//! | columns  | columns  | P₃    |
//! | rows     | rows     | P₄    |
//!
//! Factor extraction regroups `Ψ = Φ·Π⁻¹ = M ⊗ N` and reads `(M, N)` off the
//! top singular pair of the block realignment of `Ψ`, which is exactly
//! `vec(M)·vecᵀ(N)` for Kronecker products.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::Error;
use crate::forms::{assemble_phi, routing_permutation, AssembleOptions, Partition, PreserverMap};
use crate::matrix::{ComplexMatrix, DimsProfile, RankOneProduct};
use crate::numeric;
use crate::rng;
use crate::tensor::{numerical_rank, realign_blocks, unvec};
use crate::Result;

/// Recovery controls.
#[derive(Debug, Clone)]
pub struct RecoverOptions {
    pub seed: u64,
    /// Base points for the majority vote.
    pub bases: usize,
    /// `σ₂/σ₁` above this on the regrouped map means "not a Kronecker
    /// product".
    pub sigma_tol: f64,
}

impl Default for RecoverOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            bases: 5,
            sigma_tol: 1e-6,
        }
    }
}

/// Output of [`recover_factors`].
#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub partition: Partition,
    pub m: ComplexMatrix,
    pub n: ComplexMatrix,
    /// The scalar gauge left undetermined by the map.
    pub scalar_note: &'static str,
    /// Max entrywise deviation of the reassembled Φ from the input Φ.
    pub residual: f64,
}

const SCALAR_NOTE: &str = "(M, N) and (λM, N/λ) assemble to the same map for every λ ≠ 0";

fn random_factors(dims: &DimsProfile, gen: &mut impl rand::Rng) -> Vec<Vec<Complex64>> {
    dims.factors()
        .iter()
        .map(|&n| rng::random_unit_vector(gen, n))
        .collect()
}

/// Column space moves iff `rank([O₁ | O₂]) = 2` for rank-one outputs; row
/// space likewise on the vertical stack.
fn movement(o1: &ComplexMatrix, o2: &ComplexMatrix) -> Result<(bool, bool)> {
    let col = numerical_rank(&o1.hstack(o2)?, None)? == 2;
    let row = numerical_rank(&o1.vstack(o2)?, None)? == 2;
    Ok((col, row))
}

fn apply_factored(
    map: &PreserverMap,
    dims: &DimsProfile,
    xs: &[Vec<Complex64>],
    ys: &[Vec<Complex64>],
) -> Result<ComplexMatrix> {
    let product = RankOneProduct::new(dims.clone(), xs.to_vec(), ys.to_vec())?;
    map.apply(&product.realize())
}

/// Classifies every factor index into its partition class by majority vote
/// over several random base points.
pub fn classify_subsystems(map: &PreserverMap, opts: &RecoverOptions) -> Result<Partition> {
    let dims = map.dims().clone();
    let k = dims.k();
    let mut votes: Vec<Vec<usize>> = vec![Vec::new(); k];

    for base in 0..opts.bases {
        let mut gen = rng::substream(opts.seed, 0xBA5E ^ base as u64);
        let xs = random_factors(&dims, &mut gen);
        let ys = random_factors(&dims, &mut gen);
        let o_base = apply_factored(map, &dims, &xs, &ys)?;
        if numerical_rank(&o_base, None)? != 1 {
            // not behaving like a preserver at this base point
            continue;
        }
        for i in 0..k {
            let mut xs_p = xs.clone();
            xs_p[i] = rng::random_unit_vector(&mut gen, dims.factors()[i]);
            let o_x = apply_factored(map, &dims, &xs_p, &ys)?;
            let (x_col, x_row) = movement(&o_base, &o_x)?;

            let mut ys_p = ys.clone();
            ys_p[i] = rng::random_unit_vector(&mut gen, dims.factors()[i]);
            let o_y = apply_factored(map, &dims, &xs, &ys_p)?;
            let (y_col, y_row) = movement(&o_base, &o_y)?;

            let class = match ((x_col, x_row), (y_col, y_row)) {
                ((true, false), (false, true)) => 1,
                ((false, true), (true, false)) => 2,
                ((true, false), (true, false)) => 3,
                ((false, true), (false, true)) => 4,
                _ => continue, // degenerate movement; drop this vote
            };
            votes[i].push(class);
        }
    }

    let mut sets: [BTreeSet<usize>; 4] = Default::default();
    let needed = opts.bases / 2 + 1;
    for (i, vote) in votes.iter().enumerate() {
        let mut counts = [0usize; 4];
        for &v in vote {
            counts[v - 1] += 1;
        }
        let (best, &count) = counts
            .iter()
            .enumerate()
            .max_by_key(|(_, &c)| c)
            .expect("four classes");
        if count < needed {
            return Err(Error::AmbiguousStructure(format!(
                "factor {} got {:?} votes across {} bases",
                i + 1,
                counts,
                opts.bases
            )));
        }
        sets[best].insert(i + 1);
    }
    Partition::new(
        k,
        sets[0].clone(),
        sets[1].clone(),
        sets[2].clone(),
        sets[3].clone(),
    )
}

/// Extracts `(M, N)` for a known partition: regroups `Ψ = Φ·Π⁻¹`, realigns it
/// into the `(m·d₁) × (m·d₂)` matrix whose rank-one factorization is
/// `vec(M)·vecᵀ(N)`, and takes the top singular pair. The gauge is fixed by
/// scaling M's largest-magnitude entry to exactly 1.
pub fn recover_factors(map: &PreserverMap, partition: &Partition) -> Result<RecoveryResult> {
    let dims = map.dims().clone();
    let m = dims.m();
    let ((_, d1), (_, d2)) = partition.factor_shapes(&dims);

    let routing = routing_permutation(&dims, partition);
    let psi = routing.inverse().apply_right(map.phi())?;
    let rearranged = realign_blocks(&psi, (m, d1), (m, d2))?;

    let parts = numeric::svd(&rearranged)?;
    let sigma1 = parts.singular.first().copied().unwrap_or(0.0);
    if sigma1 <= 0.0 {
        return Err(Error::NotKronecker {
            ratio: 1.0,
            tol: 1e-6,
        });
    }
    let sigma2 = parts.singular.get(1).copied().unwrap_or(0.0);
    let ratio = sigma2 / sigma1;
    if ratio > 1e-6 {
        return Err(Error::NotKronecker { ratio, tol: 1e-6 });
    }

    let a = &parts.u_cols[0];
    let b = &parts.v_cols[0];
    let (j_max, a_max) = a
        .iter()
        .enumerate()
        .max_by(|(_, x), (_, y)| x.norm().partial_cmp(&y.norm()).unwrap())
        .expect("nonzero top vector");
    let a_max = *a_max;
    let vec_m: Vec<Complex64> = a.iter().map(|z| z / a_max).collect();
    debug_assert!((vec_m[j_max] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    let vec_n: Vec<Complex64> = b.iter().map(|z| z.conj() * sigma1 * a_max).collect();

    let m_factor = unvec(&vec_m, m, d1)?;
    let n_factor = unvec(&vec_n, m, d2)?;

    let reassembled = assemble_phi(
        &dims,
        partition,
        &m_factor,
        &n_factor,
        &AssembleOptions::lenient(),
    )?;
    let residual = reassembled.phi().max_abs_diff(map.phi());

    Ok(RecoveryResult {
        partition: partition.clone(),
        m: m_factor,
        n: n_factor,
        scalar_note: SCALAR_NOTE,
        residual,
    })
}

/// Full recovery: classify the partition, then extract the factors.
pub fn recover(map: &PreserverMap, opts: &RecoverOptions) -> Result<RecoveryResult> {
    let partition = classify_subsystems(map, opts)?;
    recover_factors(map, &partition)
}
