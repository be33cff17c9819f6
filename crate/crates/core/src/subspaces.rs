//! Subspace arithmetic and kernel conditions.
//!
//! The central question answered here: does a subspace `S ⊆ ℂ^{p₁⋯p_r}`
//! contain a nonzero decomposable vector `v₁ ⊗ ⋯ ⊗ v_r`? Equivalently, does
//! `Ker(M)` avoid every nonzero product vector? The search minimizes
//! `‖M(v₁⊗⋯⊗v_r)‖` over unit factors by cyclic single-factor updates: with
//! all but the j-th factor fixed, the objective is `‖B_j v_j‖` for an
//! explicit matrix `B_j`, minimized by its smallest right singular vector.
//! The problem is nonconvex, so the search is multi-start; a `Found` verdict
//! is certified by its residual while `NoneFound` is heuristic.
//!
//! Also here: the maximal completely entangled subspace dimension
//! `∏pᵢ − Σpᵢ + r − 1`, the bipartite construction realizing it, the
//! existence predicate for factor matrices, and randomized synthesis of such
//! matrices.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::Error;
use crate::exec;
use crate::matrix::{vecops, ComplexMatrix, DimsProfile};
use crate::numeric;
use crate::rng;
use crate::Result;

/// A subspace of ℂ^d held as an orthonormal basis (possibly empty).
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Complex64>>,
}

impl Subspace {
    /// Wraps vectors that must already be orthonormal to 1e−10.
    pub fn from_orthonormal(basis: Vec<Vec<Complex64>>, ambient_dim: usize) -> Result<Self> {
        for v in &basis {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch(
                    "basis vector length differs from ambient dimension".into(),
                ));
            }
        }
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (vecops::inner(a, b) - Complex64::new(expect, 0.0)).norm() > 1e-10 {
                    return Err(Error::DimensionMismatch(
                        "basis is not orthonormal to 1e-10".into(),
                    ));
                }
            }
        }
        Ok(Self { ambient_dim, basis })
    }

    /// Orthonormalizes a spanning set, dropping dependent vectors.
    pub fn from_spanning(vectors: &[Vec<Complex64>], ambient_dim: usize) -> Result<Self> {
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch(
                    "spanning vector length differs from ambient dimension".into(),
                ));
            }
        }
        let basis = numeric::orthonormalize(vectors, 1e-10);
        Ok(Self { ambient_dim, basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    /// Basis vectors as the columns of an `ambient × dim` matrix.
    pub fn basis_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.ambient_dim, self.basis.len(), |r, c| self.basis[c][r])
    }

    /// Orthogonal projector onto the subspace, `B Bᴴ`.
    pub fn projector(&self) -> ComplexMatrix {
        let b = self.basis_matrix();
        b.mul(&b.adjoint()).expect("shape by construction")
    }

    /// Orthogonal projector onto the complement, `I − B Bᴴ`.
    pub fn complement_projector(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.ambient_dim)
            .sub(&self.projector())
            .expect("shape by construction")
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        let comp = numeric::complete_orthonormal(&self.basis, self.ambient_dim);
        Subspace {
            ambient_dim: self.ambient_dim,
            basis: comp,
        }
    }

    /// Norm of the component of `v` outside the subspace.
    pub fn residual_outside(&self, v: &[Complex64]) -> f64 {
        let mut w = v.to_vec();
        for b in &self.basis {
            let coeff = vecops::inner(b, &w);
            vecops::axpy(&mut w, -coeff, b);
        }
        vecops::norm(&w)
    }
}

/// Orthonormal basis of `Ker(M)`, the complement of the singular directions
/// with `σ > tol`.
pub fn kernel_basis(m: &ComplexMatrix, tol: Option<f64>) -> Result<Subspace> {
    let parts = numeric::svd(m)?;
    let sigma_max = parts.singular.first().copied().unwrap_or(0.0);
    let tol = tol.unwrap_or_else(|| numeric::default_rank_tol(m.rows(), m.cols(), sigma_max));
    let row_space: Vec<Vec<Complex64>> = parts
        .singular
        .iter()
        .zip(&parts.v_cols)
        .filter(|(s, _)| **s > tol)
        .map(|(_, v)| v.clone())
        .collect();
    let kernel = numeric::complete_orthonormal(&row_space, m.cols());
    Subspace::from_orthonormal(kernel, m.cols())
}

/// Tuning for the multi-start alternating minimization.
#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub starts: usize,
    pub max_sweeps: usize,
    pub conv_tol: f64,
    pub seed: u64,
    /// A witness certifies `Found` when its residual is below this.
    pub found_tol: f64,
    /// `NoneFound` is reported when the best value stays above this.
    pub none_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            starts: 64,
            max_sweeps: 200,
            conv_tol: 1e-12,
            seed: 0,
            found_tol: 1e-8,
            none_tol: 1e-6,
        }
    }
}

impl SearchOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Outcome of [`min_product_norm`].
#[derive(Debug, Clone)]
pub struct MinProductResult {
    /// Best value of `‖M(v₁⊗⋯⊗v_r)‖` found.
    pub value: f64,
    /// Unit factors attaining it.
    pub factors: Vec<Vec<Complex64>>,
    /// Total sweeps across all starts.
    pub sweeps: usize,
}

/// Smallest right singular vector; for a matrix wider than its row count the
/// thin SVD misses the null space, so take any complement direction (σ = 0).
fn smallest_right_singular(b: &ComplexMatrix) -> Result<(f64, Vec<Complex64>)> {
    let parts = numeric::svd(b)?;
    if b.cols() > parts.singular.len() {
        let comp = numeric::complete_orthonormal(&parts.v_cols, b.cols());
        return Ok((0.0, comp.into_iter().next().expect("complement nonempty")));
    }
    let last = parts.singular.len() - 1;
    Ok((parts.singular[last], parts.v_cols[last].clone()))
}

fn product_value(m: &ComplexMatrix, factors: &[Vec<Complex64>]) -> f64 {
    let slices: Vec<&[Complex64]> = factors.iter().map(|f| f.as_slice()).collect();
    let w = vecops::kron_list(&slices);
    vecops::norm(&m.matvec(&w).expect("shape checked by caller"))
}

struct StartOutcome {
    value: f64,
    factors: Vec<Vec<Complex64>>,
    sweeps: usize,
}

fn run_start(
    m: &ComplexMatrix,
    dims: &[usize],
    opts: &SearchOptions,
    start: usize,
) -> Result<StartOutcome> {
    let mut gen = rng::substream(opts.seed, start as u64);
    let r = dims.len();
    let mut factors: Vec<Vec<Complex64>> = dims
        .iter()
        .map(|&p| rng::random_unit_vector(&mut gen, p))
        .collect();
    // product of dims strictly after position j
    let right_sizes: Vec<usize> = {
        let mut sizes = vec![1usize; r];
        for j in (0..r.saturating_sub(1)).rev() {
            sizes[j] = sizes[j + 1] * dims[j + 1];
        }
        sizes
    };

    let mut obj = product_value(m, &factors);
    let mut sweeps = 0usize;
    for _ in 0..opts.max_sweeps {
        sweeps += 1;
        for j in 0..r {
            let p_j = dims[j];
            let left: Vec<&[Complex64]> = factors[..j].iter().map(|f| f.as_slice()).collect();
            let right: Vec<&[Complex64]> = factors[j + 1..].iter().map(|f| f.as_slice()).collect();
            let lv = vecops::kron_list(&left);
            let rv = vecops::kron_list(&right);
            let rlen = right_sizes[j];
            debug_assert_eq!(rv.len(), rlen);

            // B[row, t] = Σ_{a,b} M[row, (a·p_j + t)·rlen + b] · lv[a] · rv[b]
            let mut b = ComplexMatrix::zeros(m.rows(), p_j);
            for row in 0..m.rows() {
                for (a, &la) in lv.iter().enumerate() {
                    if la == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for t in 0..p_j {
                        let base = (a * p_j + t) * rlen;
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (bi, &rb) in rv.iter().enumerate() {
                            acc += m.get(row, base + bi) * rb;
                        }
                        b.set(row, t, b.get(row, t) + la * acc);
                    }
                }
            }
            let (_, v) = smallest_right_singular(&b)?;
            factors[j] = v;
        }
        let new_obj = product_value(m, &factors);
        let delta = obj - new_obj;
        obj = new_obj;
        if obj < 1e-13 || (sweeps > 1 && delta < opts.conv_tol) {
            break;
        }
    }
    Ok(StartOutcome {
        value: obj,
        factors,
        sweeps,
    })
}

/// Approximately minimizes `‖M(v₁⊗⋯⊗v_r)‖₂` over unit factors `vᵢ ∈ ℂ^{pᵢ}`
/// by seeded multi-start alternating minimization. Each start draws from its
/// own substream, so the result is identical with or without `parallel`.
pub fn min_product_norm(
    m: &ComplexMatrix,
    dims: &[usize],
    opts: &SearchOptions,
) -> Result<MinProductResult> {
    if dims.is_empty() {
        return Err(Error::DimensionMismatch(
            "min_product_norm needs at least one factor".into(),
        ));
    }
    let total: usize = dims.iter().product();
    if m.cols() != total {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} columns but factor dims multiply to {total}",
            m.cols()
        )));
    }
    let outcomes = exec::map_indices(opts.starts, |s| run_start(m, dims, opts, s));
    let mut best: Option<StartOutcome> = None;
    let mut total_sweeps = 0usize;
    for out in outcomes {
        let out = out?;
        total_sweeps += out.sweeps;
        let better = match &best {
            None => true,
            Some(b) => out.value < b.value,
        };
        if better {
            best = Some(out);
        }
    }
    let best = best.ok_or_else(|| Error::NumericalFailure("search ran zero starts".into()))?;
    Ok(MinProductResult {
        value: best.value,
        factors: best.factors,
        sweeps: total_sweeps,
    })
}

/// Verdict of the decomposable-vector search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchVerdict {
    /// A product vector inside the subspace was found and certified by its
    /// residual.
    Found,
    /// No product vector surfaced; heuristic, not a proof.
    NoneFound,
}

/// Report of [`contains_decomposable`].
#[derive(Debug, Clone)]
pub struct DecomposableSearchReport {
    pub verdict: SearchVerdict,
    /// Unit factors of the found product vector.
    pub witness: Option<Vec<Vec<Complex64>>>,
    /// Best objective value seen (`‖proj_{S⊥}(⊗v)‖` at the minimizer).
    pub min_value: f64,
    pub starts: usize,
    pub iterations: usize,
}

/// Searches `S` for a nonzero decomposable vector of shape `p₁ ⊗ ⋯ ⊗ p_r` by
/// minimizing the component of `v₁⊗⋯⊗v_r` outside `S`.
pub fn contains_decomposable(
    s: &Subspace,
    dims: &[usize],
    opts: &SearchOptions,
) -> Result<DecomposableSearchReport> {
    let total: usize = dims.iter().product();
    if total != s.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspace lives in ℂ^{} but factor dims multiply to {total}",
            s.ambient_dim()
        )));
    }
    let outside = s.complement_projector();
    let result = min_product_norm(&outside, dims, opts)?;

    // independent residual recompute for the certificate
    let slices: Vec<&[Complex64]> = result.factors.iter().map(|f| f.as_slice()).collect();
    let w = vecops::kron_list(&slices);
    let residual = s.residual_outside(&w);

    let found = residual < opts.found_tol;
    Ok(DecomposableSearchReport {
        verdict: if found {
            SearchVerdict::Found
        } else {
            SearchVerdict::NoneFound
        },
        witness: found.then(|| result.factors.clone()),
        min_value: result.value,
        starts: opts.starts,
        iterations: result.sweeps,
    })
}

/// Maximum dimension of a completely entangled subspace of
/// `ℂ^{p₁} ⊗ ⋯ ⊗ ℂ^{p_r}`: `∏pᵢ − Σpᵢ + r − 1`.
pub fn ces_max_dim(dims: &[usize]) -> usize {
    let prod: i64 = dims.iter().map(|&p| p as i64).product();
    let sum: i64 = dims.iter().map(|&p| p as i64).sum();
    let d = prod - sum + dims.len() as i64 - 1;
    debug_assert!(d >= 0);
    d.max(0) as usize
}

/// Maximal completely entangled subspace of `ℂ^p ⊗ ℂ^q`: the orthogonal
/// complement of `span{ u(t) ⊗ w(t) : t ∈ T }` with `u(t) = (1, t, …, t^{p−1})`,
/// `w(t) = (1, t, …, t^{q−1})`, and `T` a set of `p+q−1` distinct reals.
///
/// If a product `a ⊗ b` were orthogonal to every spanning vector, the
/// polynomial `(Σᵢ aᵢ tⁱ)(Σⱼ bⱼ tʲ)` of degree ≤ p+q−2 would vanish at all
/// p+q−1 nodes, forcing `a = 0` or `b = 0`; so the complement is completely
/// entangled and its dimension `pq − (p+q−1)` matches [`ces_max_dim`].
pub fn ces_construct(p: usize, q: usize) -> Result<Subspace> {
    if p < 2 || q < 2 {
        return Err(Error::DimensionMismatch(
            "ces_construct needs p, q ≥ 2".into(),
        ));
    }
    let count = p + q - 1;
    // nodes 0, 1, −1, 2, −2, … scaled to unit magnitude
    let mut nodes = Vec::with_capacity(count);
    for i in 0..count {
        let t = if i == 0 {
            0.0
        } else {
            let mag = i.div_ceil(2) as f64;
            if i % 2 == 1 {
                mag
            } else {
                -mag
            }
        };
        nodes.push(t);
    }
    let scale = nodes.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    for t in nodes.iter_mut() {
        *t /= scale;
    }

    let moments = |t: f64, len: usize| -> Vec<Complex64> {
        let mut v = Vec::with_capacity(len);
        let mut acc = 1.0;
        for _ in 0..len {
            v.push(Complex64::new(acc, 0.0));
            acc *= t;
        }
        v
    };
    let spanning: Vec<Vec<Complex64>> = nodes
        .iter()
        .map(|&t| vecops::kron_pair(&moments(t, p), &moments(t, q)))
        .collect();
    let span = numeric::orthonormalize(&spanning, 1e-10);
    if span.len() != count {
        return Err(Error::NumericalFailure(format!(
            "Vandermonde span collapsed: got {} of {count} directions",
            span.len()
        )));
    }
    let basis = numeric::complete_orthonormal(&span, p * q);
    Subspace::from_orthonormal(basis, p * q)
}

fn validate_index_set(set: &BTreeSet<usize>, k: usize) -> Result<()> {
    for &i in set {
        if i == 0 || i > k {
            return Err(Error::InvalidIndexSet(format!("index {i} outside 1..={k}")));
        }
    }
    Ok(())
}

/// Factor dimensions of the product space
/// `⊗_{i∈K₁} ℂ^{nᵢ} ⊗ ⊗_{j∈K₂} ℂ^{nⱼ}` (ascending within each set).
pub fn kset_product_dims(
    dims: &DimsProfile,
    k1: &BTreeSet<usize>,
    k2: &BTreeSet<usize>,
) -> Result<Vec<usize>> {
    validate_index_set(k1, dims.k())?;
    validate_index_set(k2, dims.k())?;
    let mut out = Vec::with_capacity(k1.len() + k2.len());
    out.extend(k1.iter().map(|&i| dims.n(i)));
    out.extend(k2.iter().map(|&j| dims.n(j)));
    Ok(out)
}

/// Existence of an `m × ∏dᵢ` matrix whose kernel avoids every nonzero
/// decomposable vector of `ℂ^{d₁} ⊗ ⋯ ⊗ ℂ^{d_r}`: full column rank when
/// `m ≥ ∏dᵢ`, otherwise the dimension count `m ≥ Σ(dᵢ−1) + 1`.
pub fn exists_for_product_dims(m: usize, factor_dims: &[usize]) -> bool {
    let prod: usize = factor_dims.iter().product();
    if m >= prod {
        return true;
    }
    let need: usize = factor_dims.iter().map(|&d| d - 1).sum::<usize>() + 1;
    m >= need
}

/// Whether an `m × m₁m₂` matrix `M` with
/// `Ker(M) ∩ (⊗_{K₁}ℂ^{nᵢ} ⊗ ⊗_{K₂}ℂ^{nⱼ}) = {0}` exists. For `k = 2` this
/// fails exactly when `K₁ = K₂ = {1,2}` and `2 ∈ {n₁,n₂}`.
pub fn kernel_condition_exists(
    dims: &DimsProfile,
    k1: &BTreeSet<usize>,
    k2: &BTreeSet<usize>,
) -> Result<bool> {
    let factor_dims = kset_product_dims(dims, k1, k2)?;
    Ok(exists_for_product_dims(dims.m(), &factor_dims))
}

/// Draws a random `rows × ∏dᵢ` matrix whose kernel passes the decomposable
/// checker. A full-column-rank draw suffices when `rows ≥ ∏dᵢ`; otherwise
/// full-row-rank candidates are screened by [`min_product_norm`] with a
/// bounded retry budget.
pub fn synthesize_kernel_clear(
    rows: usize,
    factor_dims: &[usize],
    seed: u64,
    opts: &SearchOptions,
) -> Result<ComplexMatrix> {
    const ATTEMPTS: usize = 32;
    if !exists_for_product_dims(rows, factor_dims) {
        return Err(Error::Nonexistent(format!(
            "no {rows} × {} matrix clears products of shape {:?}",
            factor_dims.iter().product::<usize>(),
            factor_dims
        )));
    }
    let prod: usize = factor_dims.iter().product();
    for attempt in 0..ATTEMPTS {
        let mut gen = rng::substream(seed, 0xC0FFEE ^ attempt as u64);
        let candidate = rng::random_matrix(&mut gen, rows, prod);
        if rows >= prod {
            if crate::tensor::numerical_rank(&candidate, None)? == prod {
                return Ok(candidate);
            }
            continue;
        }
        if crate::tensor::numerical_rank(&candidate, None)? < rows {
            continue;
        }
        let mut inner = opts.clone();
        inner.seed = seed.wrapping_add(attempt as u64 + 1);
        let result = min_product_norm(&candidate, factor_dims, &inner)?;
        if result.value > opts.none_tol {
            return Ok(candidate);
        }
    }
    Err(Error::SynthesisFailed { attempts: ATTEMPTS })
}

/// Constructive counterpart of [`kernel_condition_exists`]: an `m × m₁m₂`
/// matrix whose kernel avoids the `(K₁, K₂)`-shaped product vectors.
pub fn construct_factor_matrix(
    dims: &DimsProfile,
    k1: &BTreeSet<usize>,
    k2: &BTreeSet<usize>,
    seed: u64,
) -> Result<ComplexMatrix> {
    let factor_dims = kset_product_dims(dims, k1, k2)?;
    if !exists_for_product_dims(dims.m(), &factor_dims) {
        return Err(Error::Nonexistent(format!(
            "k = 2, 2 ∈ {{n₁, n₂}}, K₁ = K₂ = K: no valid matrix for dims {:?}",
            dims.factors()
        )));
    }
    synthesize_kernel_clear(dims.m(), &factor_dims, seed, &SearchOptions::default())
}
