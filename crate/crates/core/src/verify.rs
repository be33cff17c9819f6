//! Probabilistic verification of the rank-one preserver property, plus the
//! rank-bound and nonsingular-image side conditions.
//!
//! A `Pass` is evidence, not proof: the checks sample random rank-one
//! products and sweep every elementary tensor (and rank-one-structured
//! two-dimensional families). Deterministic confidence comes from the
//! recovery round trip — recover the structure and compare the reassembled
//! canonical form against the input exactly.

use num_complex::Complex64;

use crate::exec;
use crate::forms::{Partition, PreserverMap};
use crate::matrix::{ComplexMatrix, DimsProfile, RankOneProduct};
use crate::numeric;
use crate::rng;
use crate::tensor::numerical_rank;
use crate::Result;

/// Verdict of [`is_rank_one_preserver`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyVerdict {
    Pass,
    Fail,
}

/// A failing input, kept in factored form so the failure re-verifies from
/// scratch.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub product: RankOneProduct,
    /// Numerical rank of the output at the reporting tolerance.
    pub output_rank: usize,
}

/// Report of [`is_rank_one_preserver`].
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub verdict: VerifyVerdict,
    /// Number of random trials (the deterministic sweeps run in addition).
    pub trials: usize,
    pub counterexample: Option<Counterexample>,
    /// Largest σ₂/σ₁ ratio observed over all outputs.
    pub max_second_singular: f64,
}

/// Verification controls.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    /// Outputs count as rank one when σ₂ ≤ tol · σ₁.
    pub tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            trials: 200,
            seed: 0,
            tol: 1e-8,
        }
    }
}

impl VerifyOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

enum TrialOutcome {
    Ok { ratio: f64 },
    Bad { product: RankOneProduct },
}

/// σ₂/σ₁ of the output, or `None` when the output is numerically zero.
fn output_ratio(map: &PreserverMap, product: &RankOneProduct) -> Result<Option<f64>> {
    let out = map.apply(&product.realize())?;
    let s = numeric::singular_values(&out)?;
    let s1 = s.first().copied().unwrap_or(0.0);
    let zero_floor = 1e-12 * (1.0 + map.phi().max_abs_entry());
    if s1 <= zero_floor {
        return Ok(None);
    }
    Ok(Some(s.get(1).copied().unwrap_or(0.0) / s1))
}

fn check_product(map: &PreserverMap, product: RankOneProduct, tol: f64) -> Result<TrialOutcome> {
    match output_ratio(map, &product)? {
        Some(ratio) if ratio <= tol => Ok(TrialOutcome::Ok { ratio }),
        _ => Ok(TrialOutcome::Bad { product }),
    }
}

fn basis_vector(n: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[i] = Complex64::new(1.0, 0.0);
    v
}

fn two_dim_vector(n: usize, a: usize, b: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let w = std::f64::consts::FRAC_1_SQRT_2;
    v[a] = Complex64::new(w, 0.0);
    v[b] = Complex64::new(w, 0.0);
    v
}

/// Deterministic inputs: every elementary product `⊗ E_{iₜjₜ}`, plus, per
/// factor slot, products whose `xᵢ` (resp. `yᵢ`) ranges over two-dimensional
/// `eₐ + e_b` families while the other factors stay elementary.
fn deterministic_products(dims: &DimsProfile) -> Vec<RankOneProduct> {
    let k = dims.k();
    let mut out = Vec::new();

    // full elementary sweep via an odometer over ((i₁,j₁),…,(i_k,j_k))
    let mut counters = vec![(0usize, 0usize); k];
    'sweep: loop {
        let xs: Vec<Vec<Complex64>> = (0..k)
            .map(|t| basis_vector(dims.factors()[t], counters[t].0))
            .collect();
        let ys: Vec<Vec<Complex64>> = (0..k)
            .map(|t| basis_vector(dims.factors()[t], counters[t].1))
            .collect();
        out.push(RankOneProduct::new(dims.clone(), xs, ys).expect("elementary factors nonzero"));

        let mut t = k;
        while t > 0 {
            let n = dims.factors()[t - 1];
            let (ref mut i, ref mut j) = counters[t - 1];
            *j += 1;
            if *j == n {
                *j = 0;
                *i += 1;
                if *i == n {
                    *i = 0;
                    t -= 1;
                    continue;
                }
            }
            continue 'sweep;
        }
        break;
    }

    // two-dimensional families per slot
    for slot in 0..k {
        let n = dims.factors()[slot];
        for a in 0..n {
            for b in (a + 1)..n {
                for c in 0..n {
                    for (x_slot, y_slot) in [
                        (two_dim_vector(n, a, b), basis_vector(n, c)),
                        (basis_vector(n, c), two_dim_vector(n, a, b)),
                    ] {
                        let xs: Vec<Vec<Complex64>> = (0..k)
                            .map(|t| {
                                if t == slot {
                                    x_slot.clone()
                                } else {
                                    basis_vector(dims.factors()[t], 0)
                                }
                            })
                            .collect();
                        let ys: Vec<Vec<Complex64>> = (0..k)
                            .map(|t| {
                                if t == slot {
                                    y_slot.clone()
                                } else {
                                    basis_vector(dims.factors()[t], 0)
                                }
                            })
                            .collect();
                        out.push(
                            RankOneProduct::new(dims.clone(), xs, ys)
                                .expect("family factors nonzero"),
                        );
                    }
                }
            }
        }
    }
    out
}

fn random_product(dims: &DimsProfile, seed: u64, trial: u64) -> RankOneProduct {
    let mut gen = rng::substream(seed, trial);
    let xs: Vec<Vec<Complex64>> = dims
        .factors()
        .iter()
        .map(|&n| rng::random_unit_vector(&mut gen, n))
        .collect();
    let ys: Vec<Vec<Complex64>> = dims
        .factors()
        .iter()
        .map(|&n| rng::random_unit_vector(&mut gen, n))
        .collect();
    RankOneProduct::new(dims.clone(), xs, ys).expect("unit factors nonzero")
}

/// Samples `trials` random rank-one products plus the deterministic sweep and
/// checks that every output has rank one: nonzero with `σ₂ ≤ tol · σ₁`.
/// `Fail` carries a counterexample that re-verifies independently.
pub fn is_rank_one_preserver(
    map: &PreserverMap,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let dims = map.dims().clone();
    let deterministic = deterministic_products(&dims);
    let det_count = deterministic.len();
    let total = det_count + opts.trials;

    let outcomes = exec::map_indices(total, |idx| {
        let product = if idx < det_count {
            deterministic[idx].clone()
        } else {
            random_product(&dims, opts.seed, (idx - det_count) as u64)
        };
        check_product(map, product, opts.tol)
    });

    let mut max_ratio = 0.0f64;
    let mut failure: Option<RankOneProduct> = None;
    for outcome in outcomes {
        match outcome? {
            TrialOutcome::Ok { ratio } => max_ratio = max_ratio.max(ratio),
            TrialOutcome::Bad { product } => {
                if failure.is_none() {
                    failure = Some(product);
                }
            }
        }
    }

    let counterexample = match failure {
        None => None,
        Some(product) => {
            let out = map.apply(&product.realize())?;
            let output_rank = numerical_rank(&out, None)?;
            Some(Counterexample {
                product,
                output_rank,
            })
        }
    };
    Ok(VerificationReport {
        verdict: if counterexample.is_none() {
            VerifyVerdict::Pass
        } else {
            VerifyVerdict::Fail
        },
        trials: opts.trials,
        counterexample,
        max_second_singular: max_ratio,
    })
}

/// Output-rank bound of the partition form on full inputs:
/// `rank(φ(X₁⊗⋯⊗X_k)) ≤ ∏_{j∈P₁∪P₂} rank(X_j)` (the vec'd factors each
/// contribute rank one).
pub fn rank_bound(p: &Partition, input_ranks: &[usize]) -> Result<usize> {
    if input_ranks.len() != p.k() {
        return Err(crate::error::Error::DimensionMismatch(format!(
            "{} ranks for k = {}",
            input_ranks.len(),
            p.k()
        )));
    }
    let mut bound = 1usize;
    for &i in p.set(1).iter().chain(p.set(2)) {
        bound *= input_ranks[i - 1];
    }
    Ok(bound)
}

/// Samples random full-rank factor tuples `X₁⊗⋯⊗X_k` and reports whether any
/// image is numerically nonsingular; true on first success.
pub fn admits_nonsingular_image(map: &PreserverMap, trials: usize, seed: u64) -> Result<bool> {
    let dims = map.dims();
    let m = dims.m();
    for trial in 0..trials {
        let mut gen = rng::substream(seed, trial as u64);
        let mut input = ComplexMatrix::identity(1);
        let mut all_full_rank = true;
        for &n in dims.factors() {
            let x = rng::random_matrix(&mut gen, n, n);
            if numerical_rank(&x, None)? < n {
                all_full_rank = false;
                break;
            }
            input = crate::tensor::kron(&input, &x);
        }
        if !all_full_rank {
            continue;
        }
        let out = map.apply(&input)?;
        if numerical_rank(&out, None)? == m {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{assemble_phi, AssembleOptions, Partition};
    use crate::tensor::{factor_permutation, vec_mat};
    use std::collections::BTreeSet;

    fn set(ixs: &[usize]) -> BTreeSet<usize> {
        ixs.iter().cloned().collect()
    }

    fn identity_map(dims: &DimsProfile) -> PreserverMap {
        let m2 = dims.m() * dims.m();
        PreserverMap::from_phi(dims.clone(), ComplexMatrix::identity(m2)).unwrap()
    }

    /// vec-action of A ↦ A + Aᵀ: I plus the commutation permutation.
    fn symmetrizer_map(m: usize, dims: DimsProfile) -> PreserverMap {
        let swap = factor_permutation(&[m, m], &[1, 0]).unwrap();
        let phi = ComplexMatrix::identity(m * m)
            .add(&swap.to_matrix())
            .unwrap();
        PreserverMap::from_phi(dims, phi).unwrap()
    }

    #[test]
    fn identity_passes() {
        let dims = DimsProfile::new(vec![2, 2]).unwrap();
        let report =
            is_rank_one_preserver(&identity_map(&dims), &VerifyOptions::default()).unwrap();
        assert_eq!(report.verdict, VerifyVerdict::Pass);
        assert!(report.max_second_singular < 1e-10);
    }

    #[test]
    fn symmetrizer_fails_with_reverifiable_counterexample() {
        // xyᵀ + yxᵀ has rank 2 for independent x, y; already caught on the
        // elementary sweep (E₁₂ ↦ E₁₂ + E₂₁)
        let dims = DimsProfile::new(vec![2, 2]).unwrap();
        let map = symmetrizer_map(4, dims);
        let report = is_rank_one_preserver(&map, &VerifyOptions::default()).unwrap();
        assert_eq!(report.verdict, VerifyVerdict::Fail);
        let ce = report.counterexample.expect("Fail carries a counterexample");
        assert_ne!(ce.output_rank, 1);
        // recheck from scratch
        let out = map.apply(&ce.product.realize()).unwrap();
        assert_ne!(numerical_rank(&out, None).unwrap(), 1);
    }

    #[test]
    fn assembled_map_passes() {
        let dims = DimsProfile::new(vec![2, 2]).unwrap();
        let p = Partition::new(2, set(&[1]), set(&[]), set(&[2]), set(&[])).unwrap();
        let (ms, ns) = p.factor_shapes(&dims);
        let search = crate::subspaces::SearchOptions::default();
        let m =
            crate::subspaces::synthesize_kernel_clear(ms.0, &p.u_factor_dims(&dims), 7, &search)
                .unwrap();
        let n =
            crate::subspaces::synthesize_kernel_clear(ns.0, &p.v_factor_dims(&dims), 8, &search)
                .unwrap();
        let map = assemble_phi(&dims, &p, &m, &n, &AssembleOptions::default()).unwrap();
        let report = is_rank_one_preserver(&map, &VerifyOptions::default()).unwrap();
        assert_eq!(report.verdict, VerifyVerdict::Pass);
    }

    #[test]
    fn rank_bound_examples() {
        let k3 = Partition::new(3, set(&[1, 2, 3]), set(&[]), set(&[]), set(&[])).unwrap();
        assert_eq!(rank_bound(&k3, &[2, 3, 2]).unwrap(), 12);

        let vec_class = Partition::new(3, set(&[]), set(&[]), set(&[1, 2, 3]), set(&[])).unwrap();
        assert_eq!(rank_bound(&vec_class, &[2, 3, 2]).unwrap(), 1);

        let mixed = Partition::new(2, set(&[1]), set(&[]), set(&[2]), set(&[])).unwrap();
        assert_eq!(rank_bound(&mixed, &[2, 3]).unwrap(), 2);

        assert!(rank_bound(&mixed, &[2]).is_err());
    }

    #[test]
    fn nonsingular_image_identity_true() {
        let dims = DimsProfile::new(vec![2, 2]).unwrap();
        assert!(admits_nonsingular_image(&identity_map(&dims), 8, 0).unwrap());
    }

    #[test]
    fn nonsingular_image_false_for_vec_class() {
        // all outputs of the P₃ = K class have rank ≤ 1 < m
        let dims = DimsProfile::new(vec![2, 2]).unwrap();
        let p = Partition::new(2, set(&[]), set(&[]), set(&[1, 2]), set(&[])).unwrap();
        let mut gen = rng::substream(40, 0);
        let m = rng::random_matrix(&mut gen, 4, 16);
        let n = rng::random_matrix(&mut gen, 4, 1);
        let map = assemble_phi(&dims, &p, &m, &n, &AssembleOptions::lenient()).unwrap();
        assert!(!admits_nonsingular_image(&map, 8, 1).unwrap());
    }

    #[test]
    fn deterministic_sweep_covers_elementary_basis() {
        let dims = DimsProfile::new(vec![2, 3]).unwrap();
        let products = deterministic_products(&dims);
        // the m² elementary products come first and hit every entry once
        let m2 = 36;
        let mut seen = std::collections::BTreeSet::new();
        for p in products.iter().take(m2) {
            let v = vec_mat(&p.realize());
            let hot: Vec<usize> = v
                .iter()
                .enumerate()
                .filter(|(_, z)| z.norm() > 0.5)
                .map(|(i, _)| i)
                .collect();
            assert_eq!(hot.len(), 1);
            seen.insert(hot[0]);
        }
        assert_eq!(seen.len(), m2);
    }
}
