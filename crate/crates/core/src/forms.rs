//! Canonical forms of rank-one preservers.
//!
//! A linear map `φ` on `M_m` sends every rank-one product `A₁ ⊗ ⋯ ⊗ A_k` to
//! a rank-one matrix exactly when, for some partition `{P₁,P₂,P₃,P₄}` of
//! `{1,…,k}` and factor matrices `M` (m × p₁p₂p₃²), `N` (m × p₁p₂p₄²)
//! passing the kernel conditions,
//!
//! ```text
//! φ(A₁⊗⋯⊗A_k) = M (⊗_{P₁} Aᵢ ⊗ ⊗_{P₂} Aᵢᵀ ⊗ ⊗_{P₃} vec(Aᵢ) ⊗ ⊗_{P₄} vecᵀ(Aᵢ)) Nᵀ.
//! ```
//!
//! On factored inputs `Aᵢ = xᵢyᵢᵀ` the middle term is the outer product
//! `u vᵀ` of
//!
//! ```text
//! u = ⊗_{P₁} xᵢ ⊗ ⊗_{P₂} yᵢ ⊗ ⊗_{P₃} (xᵢ ⊗ yᵢ),
//! v = ⊗_{P₁} yᵢ ⊗ ⊗_{P₂} xᵢ ⊗ ⊗_{P₄} (xᵢ ⊗ yᵢ),
//! ```
//!
//! so the vec-action matrix factors as `Φ = (M ⊗ N) · Π` with `Π` the fixed
//! factor permutation routing each `xᵢ, yᵢ` slot of `vec(A)` to its side.
//! The equivalent description through subsets `(K₁, K₂)` uses
//! `K₁ = P₁ ∪ P₃`, `K₂ = P₂ ∪ P₃`.
//!
//! For `k = 2` the same maps are catalogued through partial transposes and
//! realignments: `A ↦ ψ_T(M · ψ_R∘ψ_P(A) · Nᵀ)` with `ψ_P ∈ {Id, PT₁, PT₂}`,
//! `ψ_R ∈ {Id, R₁, R₂, R, vec}`, `ψ_T ∈ {Id, ᵀ}` — 16 distinct forms after
//! the permutational-similarity identifications, one per `(K₁, K₂)` pair.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::Error;
use crate::matrix::{vecops, ComplexMatrix, DimsProfile, RankOneProduct};
use crate::rng;
use crate::subspaces::{min_product_norm, SearchOptions};
use crate::tensor::{
    factor_permutation, kron, partial_transpose, realign, unvec, vec_mat, PermMatrix, Realign,
    System,
};
use crate::Result;

/// Four disjoint index sets covering `{1,…,k}` (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    k: usize,
    sets: [BTreeSet<usize>; 4],
}

impl Partition {
    pub fn new(
        k: usize,
        p1: BTreeSet<usize>,
        p2: BTreeSet<usize>,
        p3: BTreeSet<usize>,
        p4: BTreeSet<usize>,
    ) -> Result<Self> {
        let sets = [p1, p2, p3, p4];
        let mut seen = BTreeSet::new();
        for set in &sets {
            for &i in set {
                if i == 0 || i > k {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} outside 1..={k}"
                    )));
                }
                if !seen.insert(i) {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} appears in more than one class"
                    )));
                }
            }
        }
        if seen.len() != k {
            return Err(Error::InvalidPartition(format!(
                "classes cover {} of {k} indices",
                seen.len()
            )));
        }
        Ok(Self { k, sets })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Class `ℓ ∈ {1,2,3,4}` as a set of 1-based indices.
    pub fn set(&self, ell: usize) -> &BTreeSet<usize> {
        &self.sets[ell - 1]
    }

    /// Which class the 1-based index `i` belongs to.
    pub fn class_of(&self, i: usize) -> usize {
        for ell in 1..=4 {
            if self.sets[ell - 1].contains(&i) {
                return ell;
            }
        }
        unreachable!("partition covers all indices")
    }

    /// `p_ℓ = ∏_{i∈P_ℓ} nᵢ` (1 for the empty class).
    pub fn p_products(&self, dims: &DimsProfile) -> [usize; 4] {
        let mut out = [1usize; 4];
        for ell in 0..4 {
            out[ell] = self.sets[ell].iter().map(|&i| dims.n(i)).product();
        }
        out
    }

    /// Factor dimensions of the `u`-side product space:
    /// `[P₁: nᵢ][P₂: nᵢ][P₃: nᵢ, nᵢ]`.
    pub fn u_factor_dims(&self, dims: &DimsProfile) -> Vec<usize> {
        let mut out = Vec::new();
        out.extend(self.sets[0].iter().map(|&i| dims.n(i)));
        out.extend(self.sets[1].iter().map(|&i| dims.n(i)));
        for &i in &self.sets[2] {
            out.push(dims.n(i));
            out.push(dims.n(i));
        }
        out
    }

    /// Factor dimensions of the `v`-side product space:
    /// `[P₁: nᵢ][P₂: nᵢ][P₄: nᵢ, nᵢ]`.
    pub fn v_factor_dims(&self, dims: &DimsProfile) -> Vec<usize> {
        let mut out = Vec::new();
        out.extend(self.sets[0].iter().map(|&i| dims.n(i)));
        out.extend(self.sets[1].iter().map(|&i| dims.n(i)));
        for &i in &self.sets[3] {
            out.push(dims.n(i));
            out.push(dims.n(i));
        }
        out
    }

    /// Required shapes of the factor matrices: `(m × p₁p₂p₃², m × p₁p₂p₄²)`.
    pub fn factor_shapes(&self, dims: &DimsProfile) -> ((usize, usize), (usize, usize)) {
        let [p1, p2, p3, p4] = self.p_products(dims);
        let m = dims.m();
        ((m, p1 * p2 * p3 * p3), (m, p1 * p2 * p4 * p4))
    }
}

/// The subsets `(K₁, K₂)` of `{1,…,k}`; overlap allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KSetPair {
    k: usize,
    k1: BTreeSet<usize>,
    k2: BTreeSet<usize>,
}

impl KSetPair {
    pub fn new(k: usize, k1: BTreeSet<usize>, k2: BTreeSet<usize>) -> Result<Self> {
        for set in [&k1, &k2] {
            for &i in set {
                if i == 0 || i > k {
                    return Err(Error::InvalidIndexSet(format!(
                        "index {i} outside 1..={k}"
                    )));
                }
            }
        }
        Ok(Self { k, k1, k2 })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn k1(&self) -> &BTreeSet<usize> {
        &self.k1
    }

    pub fn k2(&self) -> &BTreeSet<usize> {
        &self.k2
    }

    /// `m₁ = ∏_{i∈K₁} nᵢ` (1 when empty).
    pub fn m1(&self, dims: &DimsProfile) -> usize {
        self.k1.iter().map(|&i| dims.n(i)).product()
    }

    /// `m₂ = ∏_{i∈K₂} nᵢ` (1 when empty).
    pub fn m2(&self, dims: &DimsProfile) -> usize {
        self.k2.iter().map(|&i| dims.n(i)).product()
    }
}

/// `K₁ = P₁ ∪ P₃`, `K₂ = P₂ ∪ P₃`.
pub fn partition_to_ksets(p: &Partition) -> KSetPair {
    let k1: BTreeSet<usize> = p.set(1).union(p.set(3)).cloned().collect();
    let k2: BTreeSet<usize> = p.set(2).union(p.set(3)).cloned().collect();
    KSetPair::new(p.k(), k1, k2).expect("indices validated by the partition")
}

/// `P₁ = K₁∖K₂`, `P₂ = K₂∖K₁`, `P₃ = K₁∩K₂`, `P₄ = K∖(K₁∪K₂)`.
pub fn ksets_to_partition(ks: &KSetPair) -> Partition {
    let p1: BTreeSet<usize> = ks.k1().difference(ks.k2()).cloned().collect();
    let p2: BTreeSet<usize> = ks.k2().difference(ks.k1()).cloned().collect();
    let p3: BTreeSet<usize> = ks.k1().intersection(ks.k2()).cloned().collect();
    let p4: BTreeSet<usize> = (1..=ks.k())
        .filter(|i| !ks.k1().contains(i) && !ks.k2().contains(i))
        .collect();
    Partition::new(ks.k(), p1, p2, p3, p4).expect("classes are disjoint by construction")
}

/// Structured origin of an assembled preserver.
#[derive(Debug, Clone)]
pub struct MapOrigin {
    pub partition: Partition,
    pub m: ComplexMatrix,
    pub n: ComplexMatrix,
}

/// A linear map on `M_m` held as its vec-action matrix:
/// `vec(φ(A)) = Φ · vec(A)`.
#[derive(Debug, Clone)]
pub struct PreserverMap {
    dims: DimsProfile,
    phi: ComplexMatrix,
    origin: Option<MapOrigin>,
}

impl PreserverMap {
    /// Wraps a raw m²×m² vec-action matrix.
    pub fn from_phi(dims: DimsProfile, phi: ComplexMatrix) -> Result<Self> {
        let m2 = dims.m() * dims.m();
        if phi.rows() != m2 || phi.cols() != m2 {
            return Err(Error::DimensionMismatch(format!(
                "vec-action matrix must be {m2}x{m2}, got {}x{}",
                phi.rows(),
                phi.cols()
            )));
        }
        Ok(Self {
            dims,
            phi,
            origin: None,
        })
    }

    pub fn dims(&self) -> &DimsProfile {
        &self.dims
    }

    pub fn phi(&self) -> &ComplexMatrix {
        &self.phi
    }

    pub fn origin(&self) -> Option<&MapOrigin> {
        self.origin.as_ref()
    }

    /// `unvec(Φ · vec(A))`.
    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let m = self.dims.m();
        if a.rows() != m || a.cols() != m {
            return Err(Error::DimensionMismatch(format!(
                "input must be {m}x{m}, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let out = self.phi.matvec(&vec_mat(a))?;
        unvec(&out, m, m)
    }

    /// Factored application `(Mu)(Nv)ᵀ` through the structured origin,
    /// avoiding the dense Φ; falls back to [`PreserverMap::apply`] when no
    /// origin is attached.
    pub fn apply_to_product(&self, p: &RankOneProduct) -> Result<ComplexMatrix> {
        let Some(origin) = &self.origin else {
            return self.apply(&p.realize());
        };
        if p.dims() != &self.dims {
            return Err(Error::DimensionMismatch(
                "product dims differ from map dims".into(),
            ));
        }
        let u = side_vector(&origin.partition, p, Side::U);
        let v = side_vector(&origin.partition, p, Side::V);
        let mu = origin.m.matvec(&u)?;
        let nv = origin.n.matvec(&v)?;
        Ok(ComplexMatrix::from_fn(mu.len(), nv.len(), |r, c| {
            mu[r] * nv[c]
        }))
    }
}

/// Alias for [`PreserverMap::apply`].
pub fn apply_map(map: &PreserverMap, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    map.apply(a)
}

enum Side {
    U,
    V,
}

fn side_vector(p: &Partition, product: &RankOneProduct, side: Side) -> Vec<Complex64> {
    let xs = product.x_factors();
    let ys = product.y_factors();
    let mut pieces: Vec<&[Complex64]> = Vec::new();
    match side {
        Side::U => {
            for &i in p.set(1) {
                pieces.push(&xs[i - 1]);
            }
            for &i in p.set(2) {
                pieces.push(&ys[i - 1]);
            }
            for &i in p.set(3) {
                pieces.push(&xs[i - 1]);
                pieces.push(&ys[i - 1]);
            }
        }
        Side::V => {
            for &i in p.set(1) {
                pieces.push(&ys[i - 1]);
            }
            for &i in p.set(2) {
                pieces.push(&xs[i - 1]);
            }
            for &i in p.set(4) {
                pieces.push(&xs[i - 1]);
                pieces.push(&ys[i - 1]);
            }
        }
    }
    vecops::kron_list(&pieces)
}

/// The fixed permutation `Π` with `Π · vec(A₁⊗⋯⊗A_k) = u ⊗ v` on rank-one
/// factors; equals the composition of the partition routing with the inverse
/// grouping permutation.
pub fn routing_permutation(dims: &DimsProfile, p: &Partition) -> PermMatrix {
    let k = dims.k();
    let mut source_dims = Vec::with_capacity(2 * k);
    source_dims.extend_from_slice(dims.factors());
    source_dims.extend_from_slice(dims.factors());
    // source slot i-1 carries xᵢ, slot k+i-1 carries yᵢ
    let mut dest_src: Vec<usize> = Vec::with_capacity(2 * k);
    for &i in p.set(1) {
        dest_src.push(i - 1);
    }
    for &i in p.set(2) {
        dest_src.push(k + i - 1);
    }
    for &i in p.set(3) {
        dest_src.push(i - 1);
        dest_src.push(k + i - 1);
    }
    for &i in p.set(1) {
        dest_src.push(k + i - 1);
    }
    for &i in p.set(2) {
        dest_src.push(i - 1);
    }
    for &i in p.set(4) {
        dest_src.push(i - 1);
        dest_src.push(k + i - 1);
    }
    let mut perm = vec![0usize; 2 * k];
    for (dest, &src) in dest_src.iter().enumerate() {
        perm[src] = dest;
    }
    factor_permutation(&source_dims, &perm).expect("routing is a bijection")
}

/// Assembly controls; `strict` runs the kernel-condition checker on both
/// factor matrices and is the default.
#[derive(Debug, Clone)]
pub struct AssembleOptions {
    pub strict: bool,
    pub search: SearchOptions,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        Self {
            strict: true,
            search: SearchOptions::default(),
        }
    }
}

impl AssembleOptions {
    /// Skips the kernel-condition check; deliberately invalid factors then
    /// produce counterexample fixtures for the verifier.
    pub fn lenient() -> Self {
        Self {
            strict: false,
            ..Self::default()
        }
    }
}

fn check_kernel_clear(
    label: &str,
    mat: &ComplexMatrix,
    factor_dims: &[usize],
    search: &SearchOptions,
) -> Result<()> {
    if factor_dims.is_empty() {
        if mat.frobenius_norm() < 1e-12 {
            return Err(Error::InvalidFactors(format!("{label} is the zero matrix")));
        }
        return Ok(());
    }
    let result = min_product_norm(mat, factor_dims, search)?;
    if result.value <= search.none_tol {
        return Err(Error::InvalidFactors(format!(
            "Ker({label}) meets a product vector (min value {:.3e})",
            result.value
        )));
    }
    Ok(())
}

/// Assembles the vec-action matrix `Φ = (M ⊗ N) · Π` of the partition form
/// and re-verifies it against direct evaluation on 20 random elementary
/// tensors before returning.
pub fn assemble_phi(
    dims: &DimsProfile,
    partition: &Partition,
    m_factor: &ComplexMatrix,
    n_factor: &ComplexMatrix,
    opts: &AssembleOptions,
) -> Result<PreserverMap> {
    if partition.k() != dims.k() {
        return Err(Error::InvalidPartition(format!(
            "partition over {} indices but dims profile has k = {}",
            partition.k(),
            dims.k()
        )));
    }
    let (m_shape, n_shape) = partition.factor_shapes(dims);
    if (m_factor.rows(), m_factor.cols()) != m_shape {
        return Err(Error::DimensionMismatch(format!(
            "M must be {}x{}, got {}x{}",
            m_shape.0,
            m_shape.1,
            m_factor.rows(),
            m_factor.cols()
        )));
    }
    if (n_factor.rows(), n_factor.cols()) != n_shape {
        return Err(Error::DimensionMismatch(format!(
            "N must be {}x{}, got {}x{}",
            n_shape.0,
            n_shape.1,
            n_factor.rows(),
            n_factor.cols()
        )));
    }
    if opts.strict {
        check_kernel_clear("M", m_factor, &partition.u_factor_dims(dims), &opts.search)?;
        check_kernel_clear("N", n_factor, &partition.v_factor_dims(dims), &opts.search)?;
    }

    let routing = routing_permutation(dims, partition);
    let phi = routing.apply_right(&kron(m_factor, n_factor))?;

    let map = PreserverMap {
        dims: dims.clone(),
        phi,
        origin: Some(MapOrigin {
            partition: partition.clone(),
            m: m_factor.clone(),
            n: n_factor.clone(),
        }),
    };
    verify_origin_on_elementary(&map, 20)?;
    Ok(map)
}

/// Direct evaluation of the partition form on one elementary tensor
/// `⊗ E_{iₜjₜ}`: builds the middle Kronecker factor piece by piece and
/// sandwiches it between `M` and `Nᵀ`.
fn eval_partition_form_elementary(
    dims: &DimsProfile,
    partition: &Partition,
    m_factor: &ComplexMatrix,
    n_factor: &ComplexMatrix,
    idx: &[(usize, usize)],
) -> Result<ComplexMatrix> {
    let elementary = |t: usize| {
        let n = dims.n(t);
        let (i, j) = idx[t - 1];
        let mut e = ComplexMatrix::zeros(n, n);
        e.set(i, j, Complex64::new(1.0, 0.0));
        e
    };
    let mut pieces: Vec<ComplexMatrix> = Vec::new();
    for &i in partition.set(1) {
        pieces.push(elementary(i));
    }
    for &i in partition.set(2) {
        pieces.push(elementary(i).transpose());
    }
    for &i in partition.set(3) {
        pieces.push(ComplexMatrix::column(&vec_mat(&elementary(i))));
    }
    for &i in partition.set(4) {
        pieces.push(ComplexMatrix::row(&vec_mat(&elementary(i))));
    }
    let refs: Vec<&ComplexMatrix> = pieces.iter().collect();
    let middle = crate::tensor::kron_list(&refs);
    m_factor.mul(&middle)?.mul(&n_factor.transpose())
}

fn verify_origin_on_elementary(map: &PreserverMap, samples: usize) -> Result<()> {
    let origin = map.origin.as_ref().expect("called on assembled maps");
    let dims = &map.dims;
    let mut gen = rng::substream(0xEB11, 0);
    use rand::Rng;
    for _ in 0..samples {
        let idx: Vec<(usize, usize)> = dims
            .factors()
            .iter()
            .map(|&n| (gen.gen_range(0..n), gen.gen_range(0..n)))
            .collect();
        let direct =
            eval_partition_form_elementary(dims, &origin.partition, &origin.m, &origin.n, &idx)?;

        let mut a = ComplexMatrix::identity(1);
        for (t, &n) in dims.factors().iter().enumerate() {
            let mut e = ComplexMatrix::zeros(n, n);
            e.set(idx[t].0, idx[t].1, Complex64::new(1.0, 0.0));
            a = kron(&a, &e);
        }
        let via_phi = map.apply(&a)?;
        let scale = 1.0 + direct.max_abs_entry();
        if via_phi.max_abs_diff(&direct) > 1e-10 * scale {
            return Err(Error::NumericalFailure(
                "assembled Φ disagrees with direct evaluation on an elementary tensor".into(),
            ));
        }
    }
    Ok(())
}

/// `ψ_P` choices of the bipartite catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiP {
    Id,
    Pt1,
    Pt2,
}

/// `ψ_R` choices of the bipartite catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiR {
    Id,
    R1,
    R2,
    R,
    Vec,
}

/// `ψ_T` choices of the bipartite catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiT {
    Id,
    Transpose,
}

/// One bipartite form `A ↦ ψ_T(M · ψ_R∘ψ_P(A) · Nᵀ)` with concrete factors.
#[derive(Debug, Clone)]
pub struct BipartiteForm {
    pub psi_p: PsiP,
    pub psi_r: PsiR,
    pub psi_t: PsiT,
    pub m: ComplexMatrix,
    pub n: ComplexMatrix,
}

/// Catalog row: one of the 16 composite forms with its shape and kernel
/// requirements.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub psi_p: PsiP,
    pub psi_r: PsiR,
    pub psi_t: PsiT,
    /// Which kernel case (1)–(5) governs the factors; determined by `ψ_R`.
    pub kernel_case: u8,
    pub m_shape: (usize, usize),
    pub n_shape: (usize, usize),
    /// Product-space factor dims that `Ker(M)` must avoid.
    pub m_factor_dims: Vec<usize>,
    /// Product-space factor dims that `Ker(N)` must avoid.
    pub n_factor_dims: Vec<usize>,
    /// False only for the vec-based forms when `2 ∈ {n₁, n₂}`.
    pub exists: bool,
    /// The `(K₁, K₂)` pair whose partition form is permutation-equivalent.
    pub ksets: KSetPair,
}

fn inner_shape(n1: usize, n2: usize, psi_r: PsiR) -> (usize, usize) {
    let m = n1 * n2;
    match psi_r {
        PsiR::Id => (m, m),
        PsiR::R1 => (n1 * n1 * n2, n2),
        PsiR::R2 => (n1 * n2 * n2, n1),
        PsiR::R => (n1 * n1, n2 * n2),
        PsiR::Vec => (m * m, 1),
    }
}

fn case_factor_dims(n1: usize, n2: usize, psi_r: PsiR) -> (Vec<usize>, Vec<usize>) {
    match psi_r {
        PsiR::Id => (vec![n1, n2], vec![n1, n2]),
        PsiR::R => (vec![n1, n1], vec![n2, n2]),
        PsiR::R1 => (vec![n1, n1, n2], vec![n2]),
        PsiR::R2 => (vec![n1, n2, n2], vec![n1]),
        PsiR::Vec => (vec![n1, n1, n2, n2], vec![1]),
    }
}

/// Enumerates the 16 composite forms for `M_{n₁n₂}`, with the
/// permutational-similarity identifications already applied. The two
/// vec-based forms are flagged nonexistent when `2 ∈ {n₁, n₂}`.
pub fn bipartite_catalog(n1: usize, n2: usize) -> Result<Vec<CatalogEntry>> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::DimensionMismatch("catalog needs n₁, n₂ ≥ 2".into()));
    }
    let m = n1 * n2;
    let spec: [(PsiP, PsiR, PsiT, &[usize], &[usize]); 16] = [
        (PsiP::Id, PsiR::Id, PsiT::Id, &[1, 2], &[]),
        (PsiP::Id, PsiR::Id, PsiT::Transpose, &[], &[1, 2]),
        (PsiP::Pt1, PsiR::Id, PsiT::Id, &[2], &[1]),
        (PsiP::Pt2, PsiR::Id, PsiT::Id, &[1], &[2]),
        (PsiP::Id, PsiR::R1, PsiT::Id, &[1, 2], &[1]),
        (PsiP::Id, PsiR::R1, PsiT::Transpose, &[], &[2]),
        (PsiP::Pt2, PsiR::R1, PsiT::Id, &[1], &[1, 2]),
        (PsiP::Pt2, PsiR::R1, PsiT::Transpose, &[2], &[]),
        (PsiP::Id, PsiR::R2, PsiT::Id, &[1, 2], &[2]),
        (PsiP::Id, PsiR::R2, PsiT::Transpose, &[], &[1]),
        (PsiP::Pt1, PsiR::R2, PsiT::Id, &[2], &[1, 2]),
        (PsiP::Pt1, PsiR::R2, PsiT::Transpose, &[1], &[]),
        (PsiP::Id, PsiR::R, PsiT::Id, &[1], &[1]),
        (PsiP::Id, PsiR::R, PsiT::Transpose, &[2], &[2]),
        (PsiP::Id, PsiR::Vec, PsiT::Id, &[1, 2], &[1, 2]),
        (PsiP::Id, PsiR::Vec, PsiT::Transpose, &[], &[]),
    ];
    let mut out = Vec::with_capacity(16);
    for (psi_p, psi_r, psi_t, k1, k2) in spec {
        let (rows_inner, cols_inner) = inner_shape(n1, n2, psi_r);
        let (m_dims, n_dims) = case_factor_dims(n1, n2, psi_r);
        let kernel_case = match psi_r {
            PsiR::Id => 1,
            PsiR::R => 2,
            PsiR::R1 => 3,
            PsiR::R2 => 4,
            PsiR::Vec => 5,
        };
        out.push(CatalogEntry {
            psi_p,
            psi_r,
            psi_t,
            kernel_case,
            m_shape: (m, rows_inner),
            n_shape: (m, cols_inner),
            m_factor_dims: m_dims,
            n_factor_dims: n_dims,
            exists: !(psi_r == PsiR::Vec && (n1 == 2 || n2 == 2)),
            ksets: KSetPair::new(2, k1.iter().cloned().collect(), k2.iter().cloned().collect())?,
        });
    }
    Ok(out)
}

fn apply_psi_p(a: &ComplexMatrix, mn: (usize, usize), psi_p: PsiP) -> Result<ComplexMatrix> {
    match psi_p {
        PsiP::Id => Ok(a.clone()),
        PsiP::Pt1 => partial_transpose(a, mn, System::First),
        PsiP::Pt2 => partial_transpose(a, mn, System::Second),
    }
}

fn apply_psi_r(a: &ComplexMatrix, mn: (usize, usize), psi_r: PsiR) -> Result<ComplexMatrix> {
    match psi_r {
        PsiR::Id => Ok(a.clone()),
        PsiR::R1 => realign(a, mn, Realign::R1),
        PsiR::R2 => realign(a, mn, Realign::R2),
        PsiR::R => realign(a, mn, Realign::R),
        PsiR::Vec => Ok(ComplexMatrix::column(&vec_mat(a))),
    }
}

/// Vec-action matrix of `A ↦ ψ_T(M · ψ_R∘ψ_P(A) · Nᵀ)`, built column by
/// column over the elementary basis of `M_{n₁n₂}`.
pub fn assemble_bipartite(form: &BipartiteForm, n1: usize, n2: usize) -> Result<PreserverMap> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::DimensionMismatch("bipartite needs n₁, n₂ ≥ 2".into()));
    }
    if form.psi_r == PsiR::Vec && (n1 == 2 || n2 == 2) {
        return Err(Error::Nonexistent(
            "vec-based forms need 2 ∉ {n₁, n₂}".into(),
        ));
    }
    let m = n1 * n2;
    let (rows_inner, cols_inner) = inner_shape(n1, n2, form.psi_r);
    if (form.m.rows(), form.m.cols()) != (m, rows_inner) {
        return Err(Error::DimensionMismatch(format!(
            "M must be {m}x{rows_inner}, got {}x{}",
            form.m.rows(),
            form.m.cols()
        )));
    }
    if (form.n.rows(), form.n.cols()) != (m, cols_inner) {
        return Err(Error::DimensionMismatch(format!(
            "N must be {m}x{cols_inner}, got {}x{}",
            form.n.rows(),
            form.n.cols()
        )));
    }

    let nt = form.n.transpose();
    let mut phi = ComplexMatrix::zeros(m * m, m * m);
    for col in 0..m * m {
        let mut basis = ComplexMatrix::zeros(m, m);
        basis.set(col / m, col % m, Complex64::new(1.0, 0.0));
        let inner = apply_psi_r(&apply_psi_p(&basis, (n1, n2), form.psi_p)?, (n1, n2), form.psi_r)?;
        let mut out = form.m.mul(&inner)?.mul(&nt)?;
        if form.psi_t == PsiT::Transpose {
            out = out.transpose();
        }
        let v = vec_mat(&out);
        for (row, z) in v.into_iter().enumerate() {
            phi.set(row, col, z);
        }
    }
    PreserverMap::from_phi(DimsProfile::new(vec![n1, n2])?, phi)
}

/// Random factor matrices valid for a catalog entry: each side is drawn by
/// the kernel-clearing synthesizer over the entry's product-space dims.
pub fn catalog_random_factors(
    entry: &CatalogEntry,
    seed: u64,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !entry.exists {
        return Err(Error::Nonexistent(
            "form does not exist for these dimensions".into(),
        ));
    }
    let opts = SearchOptions::default();
    let m = crate::subspaces::synthesize_kernel_clear(
        entry.m_shape.0,
        &entry.m_factor_dims,
        seed,
        &opts,
    )?;
    let n = crate::subspaces::synthesize_kernel_clear(
        entry.n_shape.0,
        &entry.n_factor_dims,
        seed.wrapping_add(0x5EED),
        &opts,
    )?;
    debug_assert_eq!((m.rows(), m.cols()), entry.m_shape);
    debug_assert_eq!((n.rows(), n.cols()), entry.n_shape);
    Ok((m, n))
}
