//! Structural operators on dense complex matrices: Kronecker products, the
//! row-major `vec` stacking, partial transposes, realignments, tensor-factor
//! permutations, and numerical rank.
//!
//! Conventions, used consistently across the crate:
//!
//! - `vec` stacks rows left-to-right, top-to-bottom, so `vec(xyᵀ) = x ⊗ y`
//!   and `vec(M U Nᵀ) = (M ⊗ N) vec(U)`.
//! - A matrix `X ∈ M_{mn}` is viewed as an m×m grid of n×n blocks `X_{ij}`,
//!   i.e. `X = Σ E_{ij} ⊗ X_{ij}`. Partial transposes act per block index:
//!   `X^{PT₁} = Σ E_{ji} ⊗ X_{ij}`, `X^{PT₂} = Σ E_{ij} ⊗ X_{ij}ᵀ`.
//! - Realignments rearrange the same blocks:
//!   `X^{R₁} = Σ vec(E_{ij}) ⊗ X_{ij}` (shape m²n × n),
//!   `X^{R₂} = Σ E_{ij} ⊗ vec(X_{ij})` (shape mn² × m),
//!   `X^{R} = Σ vec(E_{ij}) ⊗ vecᵀ(X_{ij})` (shape m² × n²).
//!
//! Permutation matrices are kept as index maps and applied as gathers; a
//! dense view is available through [`PermMatrix::to_matrix`].

use num_complex::Complex64;

use crate::error::Error;
use crate::matrix::{ComplexMatrix, DimsProfile};
use crate::numeric;
use crate::Result;

/// `A ⊗ B = [a_{ij} B]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let s = a.get(i, j);
            if s == Complex64::new(0.0, 0.0) {
                continue;
            }
            for r in 0..b.rows() {
                for c in 0..b.cols() {
                    out.set(i * b.rows() + r, j * b.cols() + c, s * b.get(r, c));
                }
            }
        }
    }
    out
}

/// Left fold of [`kron`]; the empty list yields the 1×1 matrix `[1]` so that
/// empty tensor factors (`p_ℓ = 1`) compose uniformly.
pub fn kron_list(mats: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut out = ComplexMatrix::new(1, 1, vec![Complex64::new(1.0, 0.0)]).unwrap();
    for m in mats {
        out = kron(&out, m);
    }
    out
}

/// Row-major stacking: `vec(A) = (a₁₁, a₁₂, …, a₁ₙ, a₂₁, …)ᵀ`.
pub fn vec_mat(a: &ComplexMatrix) -> Vec<Complex64> {
    a.data().to_vec()
}

/// Inverse of [`vec_mat`].
pub fn unvec(v: &[Complex64], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if v.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "unvec: vector of length {} into {}x{}",
            v.len(),
            rows,
            cols
        )));
    }
    ComplexMatrix::new(rows, cols, v.to_vec())
}

fn check_bipartite(x: &ComplexMatrix, m: usize, n: usize) -> Result<()> {
    if x.rows() != m * n || x.cols() != m * n {
        return Err(Error::DimensionMismatch(format!(
            "expected {0}x{0} matrix for block shape ({m}, {n}), got {1}x{2}",
            m * n,
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

/// Which system of the bipartite split a partial transpose acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    First,
    Second,
}

/// Partial transpose of `X ∈ M_{mn}` on the chosen system.
///
/// On products, `PT₁(X₁⊗X₂) = X₁ᵀ⊗X₂` and `PT₂(X₁⊗X₂) = X₁⊗X₂ᵀ`.
pub fn partial_transpose(
    x: &ComplexMatrix,
    mn: (usize, usize),
    system: System,
) -> Result<ComplexMatrix> {
    let (m, n) = mn;
    check_bipartite(x, m, n)?;
    let out = match system {
        System::First => ComplexMatrix::from_fn(m * n, m * n, |row, col| {
            let (i, r) = (row / n, row % n);
            let (j, s) = (col / n, col % n);
            x.get(j * n + r, i * n + s)
        }),
        System::Second => ComplexMatrix::from_fn(m * n, m * n, |row, col| {
            let (i, r) = (row / n, row % n);
            let (j, s) = (col / n, col % n);
            x.get(i * n + s, j * n + r)
        }),
    };
    Ok(out)
}

/// Realignment variant of a bipartite matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Realign {
    R1,
    R2,
    R,
}

/// Realigned matrix of `X ∈ M_{mn}`.
///
/// Shapes: `R₁ : m²n × n`, `R₂ : mn² × m`, `R : m² × n²`. On products
/// `X = X₁⊗X₂` these become `vec(X₁)⊗X₂`, `X₁⊗vec(X₂)`, and
/// `vec(X₁)·vecᵀ(X₂)`.
pub fn realign(x: &ComplexMatrix, mn: (usize, usize), variant: Realign) -> Result<ComplexMatrix> {
    let (m, n) = mn;
    check_bipartite(x, m, n)?;
    let out = match variant {
        Realign::R1 => ComplexMatrix::from_fn(m * m * n, n, |row, s| {
            let (ij, r) = (row / n, row % n);
            let (i, j) = (ij / m, ij % m);
            x.get(i * n + r, j * n + s)
        }),
        Realign::R2 => ComplexMatrix::from_fn(m * n * n, m, |row, j| {
            let (i, rs) = (row / (n * n), row % (n * n));
            let (r, s) = (rs / n, rs % n);
            x.get(i * n + r, j * n + s)
        }),
        Realign::R => realign_blocks(x, (m, m), (n, n))?,
    };
    Ok(out)
}

/// Block realignment for a general `(R_o·R_i) × (C_o·C_i)` matrix viewed as an
/// `R_o × C_o` grid of `R_i × C_i` blocks: output entry `((i,j), (r,s))` is
/// `X[(i,r), (j,s)]`, so `Y = A ⊗ B` realigns to `vec(A)·vecᵀ(B)`.
///
/// The square case `outer = (m,m)`, `inner = (n,n)` is exactly the `R`
/// realignment; the rectangular case drives the nearest-Kronecker
/// factorization used in structure recovery.
pub fn realign_blocks(
    x: &ComplexMatrix,
    outer: (usize, usize),
    inner: (usize, usize),
) -> Result<ComplexMatrix> {
    let (ro, co) = outer;
    let (ri, ci) = inner;
    if x.rows() != ro * ri || x.cols() != co * ci {
        return Err(Error::DimensionMismatch(format!(
            "realign_blocks: {}x{} does not split as ({ro}·{ri})x({co}·{ci})",
            x.rows(),
            x.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(ro * co, ri * ci, |row, col| {
        let (i, j) = (row / co, row % co);
        let (r, s) = (col / ci, col % ci);
        x.get(i * ri + r, j * ci + s)
    }))
}

/// Number of singular values above `tol`; the default cutoff is
/// `max(rows, cols) · ε · σ_max`.
pub fn numerical_rank(a: &ComplexMatrix, tol: Option<f64>) -> Result<usize> {
    let s = numeric::singular_values(a)?;
    Ok(numeric::rank_from_singular(&s, a.rows(), a.cols(), tol))
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut st = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        st[i] = st[i + 1] * dims[i + 1];
    }
    st
}

fn decode(mut idx: usize, dims: &[usize], st: &[usize]) -> Vec<usize> {
    let mut digits = Vec::with_capacity(dims.len());
    for &s in st {
        digits.push(idx / s);
        idx %= s;
    }
    digits
}

/// Permutation matrix kept as an index map; `apply` is an O(d) gather.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermMatrix {
    /// `src_of_dest[d]` is the source index feeding output slot `d`:
    /// `(Π x)[d] = x[src_of_dest[d]]`.
    src_of_dest: Vec<usize>,
}

impl PermMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            src_of_dest: (0..n).collect(),
        }
    }

    pub(crate) fn from_src_map(src_of_dest: Vec<usize>) -> Self {
        Self { src_of_dest }
    }

    pub fn dim(&self) -> usize {
        self.src_of_dest.len()
    }

    pub fn apply_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.src_of_dest.iter().map(|&s| x[s]).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0usize; self.src_of_dest.len()];
        for (d, &s) in self.src_of_dest.iter().enumerate() {
            inv[s] = d;
        }
        Self { src_of_dest: inv }
    }

    /// `Π · X` (row gather).
    pub fn apply_left(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim() {
            return Err(Error::DimensionMismatch("permutation row gather".into()));
        }
        Ok(ComplexMatrix::from_fn(x.rows(), x.cols(), |r, c| {
            x.get(self.src_of_dest[r], c)
        }))
    }

    /// `X · Π` (column gather).
    pub fn apply_right(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.cols() != self.dim() {
            return Err(Error::DimensionMismatch("permutation column gather".into()));
        }
        let dst = self.inverse();
        Ok(ComplexMatrix::from_fn(x.rows(), x.cols(), |r, c| {
            x.get(r, dst.src_of_dest[c])
        }))
    }

    /// `self ∘ other` as matrices: `(self · other) x = self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        let src: Vec<usize> = self
            .src_of_dest
            .iter()
            .map(|&d| other.src_of_dest[d])
            .collect();
        Self { src_of_dest: src }
    }

    /// Dense 0/1 matrix view.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (d, &s) in self.src_of_dest.iter().enumerate() {
            m.set(d, s, Complex64::new(1.0, 0.0));
        }
        m
    }
}

/// Permutation matrix `Π` on `ℂ^{d₁⋯d_r}` with
/// `Π(v₁ ⊗ ⋯ ⊗ v_r) = v_{σ⁻¹(1)} ⊗ ⋯ ⊗ v_{σ⁻¹(r)}`, where `σ = perm` maps
/// each source factor position to its destination position (0-based).
pub fn factor_permutation(dims: &[usize], perm: &[usize]) -> Result<PermMatrix> {
    let r = dims.len();
    if perm.len() != r {
        return Err(Error::InvalidPermutation(format!(
            "permutation length {} for {} factors",
            perm.len(),
            r
        )));
    }
    let mut seen = vec![false; r];
    for &p in perm {
        if p >= r || seen[p] {
            return Err(Error::InvalidPermutation(
                "not a bijection on factor positions".into(),
            ));
        }
        seen[p] = true;
    }
    // slot_src[s] = source factor landing in output slot s
    let mut slot_src = vec![0usize; r];
    for (src, &dst) in perm.iter().enumerate() {
        slot_src[dst] = src;
    }
    let out_dims: Vec<usize> = slot_src.iter().map(|&s| dims[s]).collect();
    let in_strides = strides(dims);
    let out_strides = strides(&out_dims);
    let total: usize = dims.iter().product();

    let mut src_of_dest = vec![0usize; total];
    for (d, slot) in src_of_dest.iter_mut().enumerate() {
        let digits = decode(d, &out_dims, &out_strides);
        let mut src = 0usize;
        for (s, &digit) in digits.iter().enumerate() {
            src += digit * in_strides[slot_src[s]];
        }
        *slot = src;
    }
    Ok(PermMatrix::from_src_map(src_of_dest))
}

/// The m²×m² permutation `Π₀` with
/// `Π₀ · (⊗ᵢ (xᵢ ⊗ yᵢ)) = vec(⊗ᵢ xᵢyᵢᵀ) = (⊗ᵢ xᵢ) ⊗ (⊗ᵢ yᵢ)`.
pub fn grouping_permutation(dims: &DimsProfile) -> PermMatrix {
    let k = dims.k();
    let mut interleaved = Vec::with_capacity(2 * k);
    for &n in dims.factors() {
        interleaved.push(n);
        interleaved.push(n);
    }
    // source slot 2t = x_{t+1}, 2t+1 = y_{t+1}; destination: x's first, then y's
    let mut perm = vec![0usize; 2 * k];
    for t in 0..k {
        perm[2 * t] = t;
        perm[2 * t + 1] = k + t;
    }
    factor_permutation(&interleaved, &perm).expect("grouping permutation is a bijection")
}

/// Solves `lhs(A) = P · rhs(A) · Q` for fixed permutation matrices `P, Q`
/// when both maps are entry rearrangements of `A` (each elementary input
/// `E_{uv}` maps to a single-entry output with the same value). Probes the
/// full elementary basis, factors the position correspondence, and validates
/// on random inputs before returning.
pub fn solve_permutation_pair<L, R>(
    in_shape: (usize, usize),
    lhs: L,
    rhs: R,
) -> Option<(PermMatrix, PermMatrix)>
where
    L: Fn(&ComplexMatrix) -> ComplexMatrix,
    R: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    let (rows, cols) = in_shape;
    let probe = ComplexMatrix::zeros(rows, cols);
    let (lr, lc) = {
        let out = lhs(&probe);
        (out.rows(), out.cols())
    };
    let single_entry = |m: &ComplexMatrix| -> Option<(usize, usize, Complex64)> {
        let mut found = None;
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let z = m.get(r, c);
                if z.norm() > 1e-12 {
                    if found.is_some() {
                        return None;
                    }
                    found = Some((r, c, z));
                }
            }
        }
        found
    };

    let mut row_map: Vec<Option<usize>> = vec![None; lr]; // rhs row -> lhs row
    let mut col_map: Vec<Option<usize>> = vec![None; lc]; // rhs col -> lhs col
    for u in 0..rows {
        for v in 0..cols {
            let mut e = ComplexMatrix::zeros(rows, cols);
            e.set(u, v, Complex64::new(1.0, 0.0));
            let lo = lhs(&e);
            let ro = rhs(&e);
            if (lo.rows(), lo.cols()) != (ro.rows(), ro.cols()) {
                return None;
            }
            let (la, lb, lz) = single_entry(&lo)?;
            let (ra, rb, rz) = single_entry(&ro)?;
            if (lz - rz).norm() > 1e-12 {
                return None;
            }
            match row_map[ra] {
                None => row_map[ra] = Some(la),
                Some(prev) if prev == la => {}
                Some(_) => return None,
            }
            match col_map[rb] {
                None => col_map[rb] = Some(lb),
                Some(prev) if prev == lb => {}
                Some(_) => return None,
            }
        }
    }
    let row_map: Vec<usize> = row_map.into_iter().collect::<Option<Vec<_>>>()?;
    let col_map: Vec<usize> = col_map.into_iter().collect::<Option<Vec<_>>>()?;

    // P routes rhs row r to lhs row row_map[r]: (P X)[row_map[r], :] = X[r, :]
    let mut p_src = vec![usize::MAX; lr];
    for (r, &dest) in row_map.iter().enumerate() {
        if p_src[dest] != usize::MAX {
            return None;
        }
        p_src[dest] = r;
    }
    let mut q_dst = vec![usize::MAX; lc]; // (X Q)[:, col_map[c]] = X[:, c]
    for (c, &dest) in col_map.iter().enumerate() {
        if q_dst[dest] != usize::MAX {
            return None;
        }
        q_dst[dest] = c;
    }
    let p = PermMatrix::from_src_map(p_src);
    let q = PermMatrix::from_src_map(q_dst).inverse();

    // validate on random inputs
    let mut rng = crate::rng::substream(0x70_51, 0);
    for _ in 0..3 {
        let a = crate::rng::random_matrix(&mut rng, rows, cols);
        let lo = lhs(&a);
        let ro = rhs(&a);
        let pr = p.apply_left(&ro).ok()?;
        let prq = q.apply_right(&pr).ok()?;
        if lo.max_abs_diff(&prq) > 1e-10 {
            return None;
        }
    }
    Some((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::vecops;
    use crate::rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn kron_identity_and_scalar() {
        let i2 = ComplexMatrix::identity(2);
        let i3 = ComplexMatrix::identity(3);
        assert!(kron(&i2, &i3).max_abs_diff(&ComplexMatrix::identity(6)) < 1e-15);

        let two = ComplexMatrix::new(1, 1, vec![c(2.0)]).unwrap();
        let mut r = rng::substream(1, 0);
        let b = rng::random_matrix(&mut r, 3, 2);
        assert!(kron(&two, &b).max_abs_diff(&b.scale(c(2.0))) < 1e-15);
    }

    #[test]
    fn kron_direct_expansion() {
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let expect = ComplexMatrix::from_real_rows(&[
            vec![0.0, 1.0, 0.0, 2.0],
            vec![1.0, 0.0, 2.0, 0.0],
            vec![0.0, 3.0, 0.0, 4.0],
            vec![3.0, 0.0, 4.0, 0.0],
        ])
        .unwrap();
        assert!(kron(&a, &b).max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn kron_list_conventions() {
        let one = ComplexMatrix::new(1, 1, vec![c(1.0)]).unwrap();
        assert!(kron_list(&[]).max_abs_diff(&one) < 1e-15);

        let mut r = rng::substream(2, 0);
        let a = rng::random_matrix(&mut r, 2, 2);
        assert!(kron_list(&[&a]).max_abs_diff(&a) < 1e-15);

        let b = rng::random_matrix(&mut r, 2, 3);
        let cm = rng::random_matrix(&mut r, 3, 2);
        let left = kron_list(&[&a, &b, &cm]);
        let right = kron(&kron(&a, &b), &cm);
        assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn vec_is_row_major() {
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let v = vec_mat(&a);
        assert_eq!(v, vec![c(1.0), c(2.0), c(3.0), c(4.0)]);
        assert!(unvec(&v, 2, 2).unwrap().max_abs_diff(&a) < 1e-15);
        assert!(unvec(&v, 4, 2).is_err());
    }

    #[test]
    fn vec_of_outer_product_is_kron() {
        // x = e₁, y = e₂: vec(xyᵀ) = (0,1,0,0) = x ⊗ y
        let x = vec![c(1.0), c(0.0)];
        let y = vec![c(0.0), c(1.0)];
        let a = ComplexMatrix::from_fn(2, 2, |r, cc| x[r] * y[cc]);
        assert_eq!(vec_mat(&a), vecops::kron_pair(&x, &y));
    }

    #[test]
    fn partial_transpose_identities() {
        let i6 = ComplexMatrix::identity(6);
        assert!(
            partial_transpose(&i6, (2, 3), System::First)
                .unwrap()
                .max_abs_diff(&i6)
                < 1e-15
        );

        let mut r = rng::substream(3, 0);
        let x = rng::random_matrix(&mut r, 6, 6);
        let pt1 = partial_transpose(&x, (2, 3), System::First).unwrap();
        let back = partial_transpose(&pt1, (2, 3), System::First).unwrap();
        assert!(back.max_abs_diff(&x) < 1e-15);

        // (X^{PT₁})ᵀ = X^{PT₂}
        let pt2 = partial_transpose(&x, (2, 3), System::Second).unwrap();
        assert!(pt1.transpose().max_abs_diff(&pt2) < 1e-15);
    }

    #[test]
    fn operators_on_kron_products() {
        let mut r = rng::substream(4, 0);
        for _ in 0..10 {
            let x1 = rng::random_matrix(&mut r, 2, 2);
            let x2 = rng::random_matrix(&mut r, 3, 3);
            let x = kron(&x1, &x2);

            let pt1 = partial_transpose(&x, (2, 3), System::First).unwrap();
            assert!(pt1.max_abs_diff(&kron(&x1.transpose(), &x2)) < 1e-12);

            let pt2 = partial_transpose(&x, (2, 3), System::Second).unwrap();
            assert!(pt2.max_abs_diff(&kron(&x1, &x2.transpose())) < 1e-12);

            let r1 = realign(&x, (2, 3), Realign::R1).unwrap();
            let vx1 = ComplexMatrix::column(&vec_mat(&x1));
            assert!(r1.max_abs_diff(&kron(&vx1, &x2)) < 1e-12);

            let r2 = realign(&x, (2, 3), Realign::R2).unwrap();
            let vx2 = ComplexMatrix::column(&vec_mat(&x2));
            assert!(r2.max_abs_diff(&kron(&x1, &vx2)) < 1e-12);

            let rr = realign(&x, (2, 3), Realign::R).unwrap();
            let vx2t = ComplexMatrix::row(&vec_mat(&x2));
            assert!(rr.max_abs_diff(&vx1.mul(&vx2t).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn realign_shapes_and_single_entry() {
        let mut r = rng::substream(5, 0);
        let x = rng::random_matrix(&mut r, 6, 6);
        let rr = realign(&x, (2, 3), Realign::R).unwrap();
        assert_eq!((rr.rows(), rr.cols()), (4, 9));
        assert_eq!(
            {
                let r1 = realign(&x, (2, 3), Realign::R1).unwrap();
                (r1.rows(), r1.cols())
            },
            (12, 3)
        );
        assert_eq!(
            {
                let r2 = realign(&x, (2, 3), Realign::R2).unwrap();
                (r2.rows(), r2.cols())
            },
            (18, 2)
        );

        // (m,n) = (2,2), X = E₁₁⊗E₁₁: X^R has a single 1 at (0,0)
        let mut e = ComplexMatrix::zeros(4, 4);
        e.set(0, 0, c(1.0));
        let er = realign(&e, (2, 2), Realign::R).unwrap();
        let mut expect = ComplexMatrix::zeros(4, 4);
        expect.set(0, 0, c(1.0));
        assert!(er.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn rank_basics() {
        assert_eq!(numerical_rank(&ComplexMatrix::identity(5), None).unwrap(), 5);
        let mut r = rng::substream(6, 0);
        let x = rng::random_unit_vector(&mut r, 4);
        let y = rng::random_unit_vector(&mut r, 4);
        let outer = ComplexMatrix::from_fn(4, 4, |a, b| x[a] * y[b]);
        assert_eq!(numerical_rank(&outer, None).unwrap(), 1);
    }

    #[test]
    fn factor_permutation_identity_and_swap() {
        let id = factor_permutation(&[2, 3], &[0, 1]).unwrap();
        assert!(id.to_matrix().max_abs_diff(&ComplexMatrix::identity(6)) < 1e-15);

        // dims (2,2), swap: Π(x⊗y) = y⊗x on all standard basis pairs
        let swap = factor_permutation(&[2, 2], &[1, 0]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let mut x = vec![c(0.0); 2];
                let mut y = vec![c(0.0); 2];
                x[a] = c(1.0);
                y[b] = c(1.0);
                let lhs = swap.apply_vec(&vecops::kron_pair(&x, &y));
                assert_eq!(lhs, vecops::kron_pair(&y, &x));
            }
        }
        assert!(factor_permutation(&[2, 2], &[0, 0]).is_err());
        assert!(factor_permutation(&[2, 2], &[0]).is_err());
    }

    #[test]
    fn factor_permutation_group_action() {
        fn dims_after(dims: &[usize], perm: &[usize]) -> Vec<usize> {
            let mut out = vec![0usize; dims.len()];
            for (src, &dst) in perm.iter().enumerate() {
                out[dst] = dims[src];
            }
            out
        }
        let dims = [2usize, 3, 2];
        let tau = [1usize, 2, 0];
        let sigma = [2usize, 0, 1];
        let comp: Vec<usize> = (0..3).map(|i| sigma[tau[i]]).collect();
        // σ acts on the factor layout produced by τ
        let p_sigma = factor_permutation(&dims_after(&dims, &tau), &sigma).unwrap();
        let p_tau = factor_permutation(&dims, &tau).unwrap();
        let p_comp = factor_permutation(&dims, &comp).unwrap();
        assert_eq!(p_comp, p_sigma.compose(&p_tau));
    }

    #[test]
    fn factor_permutation_is_orthogonal_01() {
        let p = factor_permutation(&[2, 3, 2], &[2, 0, 1]).unwrap();
        let m = p.to_matrix();
        let prod = m.mul(&m.transpose()).unwrap();
        assert!(prod.max_abs_diff(&ComplexMatrix::identity(12)) < 1e-15);
        for z in m.data() {
            assert!(z.norm() < 1e-15 || (z - c(1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn grouping_permutation_k1_is_identity() {
        let dims = DimsProfile::new(vec![3]).unwrap();
        let p = grouping_permutation(&dims);
        assert!(p.to_matrix().max_abs_diff(&ComplexMatrix::identity(9)) < 1e-15);
    }

    #[test]
    fn grouping_permutation_groups_factors() {
        let dims = DimsProfile::new(vec![2, 2]).unwrap();
        let p = grouping_permutation(&dims);
        let mut r = rng::substream(7, 0);
        for _ in 0..5 {
            let x1 = rng::random_vector(&mut r, 2);
            let y1 = rng::random_vector(&mut r, 2);
            let x2 = rng::random_vector(&mut r, 2);
            let y2 = rng::random_vector(&mut r, 2);
            let interleaved = vecops::kron_list(&[&x1, &y1, &x2, &y2]);
            let lhs = p.apply_vec(&interleaved);

            let a1 = ComplexMatrix::from_fn(2, 2, |a, b| x1[a] * y1[b]);
            let a2 = ComplexMatrix::from_fn(2, 2, |a, b| x2[a] * y2[b]);
            let rhs = vec_mat(&kron(&a1, &a2));
            for (l, rr) in lhs.iter().zip(&rhs) {
                assert!((l - rr).norm() < 1e-12);
            }
        }
        // orthogonality
        let m = p.to_matrix();
        assert!(
            m.mul(&m.transpose())
                .unwrap()
                .max_abs_diff(&ComplexMatrix::identity(16))
                < 1e-15
        );
    }

    #[test]
    fn permutation_similarity_pt_realign() {
        // (A^{PT₁})^{R₁} = P · A^{R₁} · Q for fixed permutations P, Q
        let mn = (2usize, 3usize);
        let d = mn.0 * mn.1;
        let pair = solve_permutation_pair(
            (d, d),
            |a| {
                let pt = partial_transpose(a, mn, System::First).unwrap();
                realign(&pt, mn, Realign::R1).unwrap()
            },
            |a| realign(a, mn, Realign::R1).unwrap(),
        );
        let (p, q) = pair.expect("permutational similarity must exist");
        let mut r = rng::substream(8, 0);
        let a = rng::random_matrix(&mut r, d, d);
        let lhs = realign(
            &partial_transpose(&a, mn, System::First).unwrap(),
            mn,
            Realign::R1,
        )
        .unwrap();
        let rhs = q
            .apply_right(&p.apply_left(&realign(&a, mn, Realign::R1).unwrap()).unwrap())
            .unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }
}
