//! Dense complex matrices in row-major storage, the dimension profile
//! `(n₁,…,n_k)`, and rank-one tensor products `x₁y₁ᵀ ⊗ ⋯ ⊗ x_ky_kᵀ`.

use num_complex::Complex64;

use crate::error::Error;
use crate::Result;

/// Dense complex matrix, entries stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf and
    /// mismatched entry counts.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        for (idx, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    row: idx / cols.max(1),
                    col: idx % cols.max(1),
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a real matrix from nested row slices.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::new(r, c, data)
    }

    /// Column vector from a slice.
    pub fn column(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Row vector from a slice.
    pub fn row(v: &[Complex64]) -> Self {
        Self {
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, z: Complex64) {
        self.data[r * self.cols + c] = z;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "add: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "mul: {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matvec: {}x{} by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            out[r] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        Ok(out)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack: row counts differ".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        Ok(out)
    }

    /// Vertical concatenation `[self; other]`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack: col counts differ".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Vector helpers shared by the tensor and search code.
pub mod vecops {
    use super::Complex64;

    pub fn norm(v: &[Complex64]) -> f64 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨a, b⟩ = aᴴ b.
    pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }

    pub fn normalize(v: &mut [Complex64]) {
        let n = norm(v);
        if n > 0.0 {
            for z in v.iter_mut() {
                *z /= n;
            }
        }
    }

    pub fn kron_pair(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for x in a {
            for y in b {
                out.push(x * y);
            }
        }
        out
    }

    /// `v₁ ⊗ ⋯ ⊗ v_r`; the empty list yields the scalar `[1]`.
    pub fn kron_list(vs: &[&[Complex64]]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(1.0, 0.0)];
        for v in vs {
            out = kron_pair(&out, v);
        }
        out
    }

    pub fn axpy(y: &mut [Complex64], alpha: Complex64, x: &[Complex64]) {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += alpha * xi;
        }
    }
}

/// The tuple `(n₁,…,n_k)` with `m = ∏ nᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimsProfile {
    factors: Vec<usize>,
}

impl DimsProfile {
    /// Every factor must be ≥ 2; `k = 1` is accepted.
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::DimensionMismatch("dims profile needs k ≥ 1".into()));
        }
        if let Some(&bad) = factors.iter().find(|&&n| n < 2) {
            return Err(Error::DimensionMismatch(format!(
                "dims profile factor {bad} < 2"
            )));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn k(&self) -> usize {
        self.factors.len()
    }

    /// `m = ∏ nᵢ`.
    pub fn m(&self) -> usize {
        self.factors.iter().product()
    }

    /// Factor dimension at 1-based position `i`.
    pub fn n(&self, i: usize) -> usize {
        self.factors[i - 1]
    }
}

/// A rank-one tensor product `x₁y₁ᵀ ⊗ ⋯ ⊗ x_ky_kᵀ`, kept in factored form.
#[derive(Debug, Clone)]
pub struct RankOneProduct {
    dims: DimsProfile,
    x_factors: Vec<Vec<Complex64>>,
    y_factors: Vec<Vec<Complex64>>,
}

impl RankOneProduct {
    pub fn new(
        dims: DimsProfile,
        x_factors: Vec<Vec<Complex64>>,
        y_factors: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        if x_factors.len() != dims.k() || y_factors.len() != dims.k() {
            return Err(Error::DimensionMismatch(
                "factor count does not match dims profile".into(),
            ));
        }
        for (i, (x, y)) in x_factors.iter().zip(&y_factors).enumerate() {
            let n = dims.factors()[i];
            if x.len() != n || y.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "factor {} must have length {n}",
                    i + 1
                )));
            }
            if vecops::norm(x) == 0.0 || vecops::norm(y) == 0.0 {
                return Err(Error::DimensionMismatch(format!(
                    "factor {} is zero; rank-one products need nonzero factors",
                    i + 1
                )));
            }
        }
        Ok(Self {
            dims,
            x_factors,
            y_factors,
        })
    }

    pub fn dims(&self) -> &DimsProfile {
        &self.dims
    }

    pub fn x_factors(&self) -> &[Vec<Complex64>] {
        &self.x_factors
    }

    pub fn y_factors(&self) -> &[Vec<Complex64>] {
        &self.y_factors
    }

    /// `(⊗ᵢ xᵢ)(⊗ᵢ yᵢ)ᵀ` as a dense m×m matrix.
    pub fn realize(&self) -> ComplexMatrix {
        let xs: Vec<&[Complex64]> = self.x_factors.iter().map(|v| v.as_slice()).collect();
        let ys: Vec<&[Complex64]> = self.y_factors.iter().map(|v| v.as_slice()).collect();
        let x = vecops::kron_list(&xs);
        let y = vecops::kron_list(&ys);
        ComplexMatrix::from_fn(x.len(), y.len(), |r, c| x[r] * y[c])
    }

    /// `vec` of the realized matrix, i.e. `(⊗ᵢ xᵢ) ⊗ (⊗ᵢ yᵢ)`.
    pub fn vec_realized(&self) -> Vec<Complex64> {
        let xs: Vec<&[Complex64]> = self.x_factors.iter().map(|v| v.as_slice()).collect();
        let ys: Vec<&[Complex64]> = self.y_factors.iter().map(|v| v.as_slice()).collect();
        vecops::kron_pair(&vecops::kron_list(&xs), &vecops::kron_list(&ys))
    }
}
