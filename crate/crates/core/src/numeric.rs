//! SVD-based kernels, backed by nalgebra's pure-Rust decompositions.
//!
//! Everything here is internal plumbing; the public surface goes through
//! `tensor::numerical_rank`, `subspaces::kernel_basis`, and the recovery
//! code. Singular values are always returned in descending order and right
//! singular vectors satisfy `A v = σ u`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Error;
use crate::matrix::{vecops, ComplexMatrix};
use crate::Result;

pub(crate) struct SvdParts {
    pub singular: Vec<f64>,
    pub u_cols: Vec<Vec<Complex64>>,
    pub v_cols: Vec<Vec<Complex64>>,
}

fn to_na(a: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_iterator(a.rows(), a.cols(), a.data().iter().cloned())
}

pub(crate) fn svd(a: &ComplexMatrix) -> Result<SvdParts> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(SvdParts {
            singular: vec![],
            u_cols: vec![],
            v_cols: vec![],
        });
    }
    let svd = to_na(a)
        .try_svd(true, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let r = svd.singular_values.len();

    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[j]
            .partial_cmp(&svd.singular_values[i])
            .unwrap()
    });

    let mut singular = Vec::with_capacity(r);
    let mut u_cols = Vec::with_capacity(r);
    let mut v_cols = Vec::with_capacity(r);
    for &i in &order {
        singular.push(svd.singular_values[i]);
        u_cols.push(u.column(i).iter().cloned().collect());
        // rows of v_t are vᵢᴴ
        v_cols.push(v_t.row(i).iter().map(|z| z.conj()).collect());
    }
    Ok(SvdParts {
        singular,
        u_cols,
        v_cols,
    })
}

pub(crate) fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(vec![]);
    }
    let sv = to_na(a)
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let mut s: Vec<f64> = sv.singular_values.iter().cloned().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(s)
}

/// `max(rows, cols) · ε · σ_max`, the standard numerical-rank cutoff.
pub(crate) fn default_rank_tol(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

pub(crate) fn rank_from_singular(singular: &[f64], rows: usize, cols: usize, tol: Option<f64>) -> usize {
    let sigma_max = singular.first().copied().unwrap_or(0.0);
    let tol = tol.unwrap_or_else(|| default_rank_tol(rows, cols, sigma_max));
    singular.iter().filter(|&&s| s > tol).count()
}

/// Modified Gram-Schmidt with one re-orthogonalization pass; vectors whose
/// residual drops below `drop_tol` are discarded.
pub(crate) fn orthonormalize(vectors: &[Vec<Complex64>], drop_tol: f64) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let coeff = vecops::inner(b, &w);
                vecops::axpy(&mut w, -coeff, b);
            }
        }
        let n = vecops::norm(&w);
        if n > drop_tol {
            for z in w.iter_mut() {
                *z /= n;
            }
            basis.push(w);
        }
    }
    basis
}

/// Extends an orthonormal set to a full orthonormal basis of ℂ^ambient and
/// returns only the new vectors (an orthonormal basis of the complement).
pub(crate) fn complete_orthonormal(
    basis: &[Vec<Complex64>],
    ambient: usize,
) -> Vec<Vec<Complex64>> {
    let mut complement: Vec<Vec<Complex64>> = Vec::new();
    for i in 0..ambient {
        if basis.len() + complement.len() >= ambient {
            break;
        }
        let mut w = vec![Complex64::new(0.0, 0.0); ambient];
        w[i] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in basis.iter().chain(complement.iter()) {
                let coeff = vecops::inner(b, &w);
                vecops::axpy(&mut w, -coeff, b);
            }
        }
        let n = vecops::norm(&w);
        if n > 1e-8 {
            for z in w.iter_mut() {
                *z /= n;
            }
            complement.push(w);
        }
    }
    complement
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svd_reconstructs_random_matrix() {
        let mut rng = crate::rng::substream(11, 0);
        let a = crate::rng::random_matrix(&mut rng, 4, 3);
        let parts = svd(&a).unwrap();
        // A = Σ σᵢ uᵢ vᵢᴴ
        let mut recon = ComplexMatrix::zeros(4, 3);
        for (i, s) in parts.singular.iter().enumerate() {
            for r in 0..4 {
                for c in 0..3 {
                    let add = parts.u_cols[i][r] * parts.v_cols[i][c].conj() * s;
                    recon.set(r, c, recon.get(r, c) + add);
                }
            }
        }
        assert!(a.max_abs_diff(&recon) < 1e-10);
        // descending order
        for w in parts.singular.windows(2) {
            assert!(w[0] >= w[1]);
        }
        // A v = σ u on the top pair
        let av = a.matvec(&parts.v_cols[0]).unwrap();
        for r in 0..4 {
            assert!((av[r] - parts.u_cols[0][r] * parts.singular[0]).norm() < 1e-10);
        }
    }

    #[test]
    fn complement_completion_is_orthonormal() {
        let mut rng = crate::rng::substream(5, 0);
        let raw: Vec<Vec<Complex64>> = (0..2).map(|_| crate::rng::random_vector(&mut rng, 5)).collect();
        let basis = orthonormalize(&raw, 1e-10);
        assert_eq!(basis.len(), 2);
        let comp = complete_orthonormal(&basis, 5);
        assert_eq!(comp.len(), 3);
        let all: Vec<&Vec<Complex64>> = basis.iter().chain(comp.iter()).collect();
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let ip = vecops::inner(a, b);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - Complex64::new(expect, 0.0)).norm() < 1e-10);
            }
        }
    }
}
