use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::CoreError;

/// Absolute entrywise comparison tolerance used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eps: f64,
}

impl Tolerance {
    pub fn new(eps: f64) -> Self {
        Tolerance { eps }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps: 1e-9 }
    }
}

/// Dense complex matrix, row-major: entry (i, j) lives at `data[i * cols + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, CoreError> {
        if data.len() != rows * cols {
            return Err(CoreError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
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
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Column vector (n x 1) with a single 1 at `index`.
    pub fn basis_column(n: usize, index: usize) -> Self {
        let mut m = Self::zeros(n, 1);
        m.data[index] = Complex64::new(1.0, 0.0);
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, CoreError> {
        if self.cols != other.rows {
            return Err(CoreError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let row_k = k * other.cols;
                let row_i = i * other.cols;
                for j in 0..other.cols {
                    out.data[row_i + j] += a * other.data[row_k + j];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, CoreError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, CoreError> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &ComplexMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexMatrix, CoreError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(CoreError::DimensionMismatch(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, c: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| c * v).collect(),
        }
    }

    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn dagger(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>, CoreError> {
        if v.len() != self.cols {
            return Err(CoreError::DimensionMismatch(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let row = i * self.cols;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.data[row + j] * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference; the residual measure used everywhere.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        debug_assert_eq!(self.rows, other.rows);
        debug_assert_eq!(self.cols, other.cols);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v.norm_sqr()).sum())
    }

    /// Index of the entry with the largest magnitude (first one on ties).
    pub fn argmax_abs(&self) -> (usize, usize) {
        let mut best = 0usize;
        let mut best_val = -1.0;
        for (idx, v) in self.data.iter().enumerate() {
            let n = v.norm();
            if n > best_val {
                best_val = n;
                best = idx;
            }
        }
        (best / self.cols, best % self.cols)
    }

    /// Entrywise check of A^dag A = I.
    pub fn is_unitary(&self, tol: &Tolerance) -> bool {
        if !self.is_square() {
            return false;
        }
        let gram = self.dagger().mul(self).expect("square product");
        gram.max_abs_diff(&ComplexMatrix::identity(self.rows)) <= tol.eps
    }

    pub fn is_hermitian(&self, tol: &Tolerance) -> bool {
        self.is_square() && self.max_abs_diff(&self.dagger()) <= tol.eps
    }
}

/// Kronecker product; block (i1, j1) of the result is `a[i1,j1] * b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i1 in 0..a.rows {
        for j1 in 0..a.cols {
            let av = a.get(i1, j1);
            if av.norm_sqr() == 0.0 {
                continue;
            }
            for i2 in 0..b.rows {
                for j2 in 0..b.cols {
                    out.set(i1 * b.rows + i2, j1 * b.cols + j2, av * b.get(i2, j2));
                }
            }
        }
    }
    out
}

/// Partial trace of a density operator over the subsystems NOT listed in
/// `keep`. `dims` gives the factor dimensions in tensor order; the kept
/// factors stay in their original relative order.
pub fn partial_trace(
    rho: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix, CoreError> {
    let total: usize = dims.iter().product();
    if rho.rows != total || rho.cols != total {
        return Err(CoreError::DimensionMismatch(format!(
            "density operator is {}x{}, subsystem dims multiply to {total}",
            rho.rows, rho.cols
        )));
    }
    let n = dims.len();
    if keep.iter().any(|&k| k >= n) {
        return Err(CoreError::InvalidInput(format!(
            "keep index out of range for {n} subsystems"
        )));
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() {
        return Err(CoreError::InvalidInput("duplicate keep index".into()));
    }
    let traced: Vec<usize> = (0..n).filter(|s| !sorted.contains(s)).collect();

    let kept_dim: usize = sorted.iter().map(|&s| dims[s]).product();
    let traced_dim: usize = traced.iter().map(|&s| dims[s]).product();

    // Strides of each subsystem index inside the flat tensor index.
    let mut strides = vec![1usize; n];
    for s in (0..n.saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * dims[s + 1];
    }

    let flat = |multi_kept: usize, multi_traced: usize| -> usize {
        let mut idx = 0;
        let mut rem = multi_kept;
        for &s in sorted.iter().rev() {
            let d = dims[s];
            idx += (rem % d) * strides[s];
            rem /= d;
        }
        let mut rem_t = multi_traced;
        for &s in traced.iter().rev() {
            let d = dims[s];
            idx += (rem_t % d) * strides[s];
            rem_t /= d;
        }
        idx
    };

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for i in 0..kept_dim {
        for j in 0..kept_dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..traced_dim {
                let row = flat(i, t);
                let col = flat(j, t);
                acc += rho.get(row, col);
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::{bell_state, pauli_x, pauli_z, BellIndex};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_of_clock_operators_multiplies_phases() {
        // Z_3 = diag(1, w, w^2); (Z x Z)[(1,1),(1,1)] = w * w = w^2.
        let z = pauli_z(3);
        let zz = kron(&z, &z);
        let w2 = Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI * 2.0 / 3.0);
        assert!((zz.get(4, 4) - w2).norm() < 1e-12);
        assert_eq!(zz.rows, 9);
    }

    #[test]
    fn kron_against_direct_index_formula() {
        // Independent brute-force oracle: (A x B)[(i1 i2),(j1 j2)] = A[i1,j1] B[i2,j2].
        let a = ComplexMatrix::from_fn(2, 3, |i, j| c(i as f64 + 0.5, j as f64));
        let b = ComplexMatrix::from_fn(3, 2, |i, j| c(j as f64 - 1.0, i as f64 * 0.25));
        let k = kron(&a, &b);
        for i1 in 0..2 {
            for i2 in 0..3 {
                for j1 in 0..3 {
                    for j2 in 0..2 {
                        let expect = a.get(i1, j1) * b.get(i2, j2);
                        assert_eq!(k.get(i1 * 3 + i2, j1 * 2 + j2), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn partial_trace_of_maximally_entangled_state_is_maximally_mixed() {
        let psi = bell_state(&BellIndex { n: 0, m: 0, dim: 3 }).unwrap();
        let rho = psi.to_density();
        let reduced = partial_trace(&rho, &[3, 3], &[0]).unwrap();
        let third = ComplexMatrix::identity(3).scale(c(1.0 / 3.0, 0.0));
        assert!(reduced.max_abs_diff(&third) < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace_and_order() {
        // rho = |0><0| x |1><1| on 2 x 3: keeping subsystem 1 must give |1><1|.
        let a = ComplexMatrix::basis_column(2, 0);
        let b = ComplexMatrix::basis_column(3, 1);
        let rho_a = a.mul(&a.dagger()).unwrap();
        let rho_b = b.mul(&b.dagger()).unwrap();
        let rho = kron(&rho_a, &rho_b);
        let kept = partial_trace(&rho, &[2, 3], &[1]).unwrap();
        assert!(kept.max_abs_diff(&rho_b) < 1e-12);
        assert!((kept.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let rho = ComplexMatrix::identity(5);
        assert!(matches!(
            partial_trace(&rho, &[2, 3], &[0]),
            Err(CoreError::DimensionMismatch(_))
        ));
        let rho = ComplexMatrix::identity(6);
        assert!(partial_trace(&rho, &[2, 3], &[2]).is_err());
        assert!(partial_trace(&rho, &[2, 3], &[0, 0]).is_err());
    }

    #[test]
    fn shift_operator_is_unitary_scaled_identity_is_not() {
        let tol = Tolerance::default();
        assert!(pauli_x(5).is_unitary(&tol));
        let mut nearly = ComplexMatrix::identity(2);
        nearly.set(1, 1, c(0.999999, 0.0));
        assert!(!nearly.is_unitary(&tol));
        // A rectangular matrix is never unitary here.
        assert!(!ComplexMatrix::zeros(2, 3).is_unitary(&tol));
    }

    #[test]
    fn dagger_and_trace_basics() {
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 2.0), c(0.0, 1.0), c(3.0, 0.0), c(0.0, -4.0)])
            .unwrap();
        let d = m.dagger();
        assert_eq!(d.get(0, 0), c(1.0, -2.0));
        assert_eq!(d.get(0, 1), c(3.0, 0.0));
        assert_eq!(d.get(1, 0), c(0.0, -1.0));
        assert_eq!(m.trace(), c(1.0, -2.0));
    }

    #[test]
    fn mul_rejects_mismatched_shapes() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.mul(&b), Err(CoreError::DimensionMismatch(_))));
    }

    #[test]
    fn tolerance_default_is_nano() {
        assert_eq!(Tolerance::default().eps, 1e-9);
    }

    #[test]
    fn argmax_abs_finds_dominant_entry() {
        let mut m = ComplexMatrix::zeros(3, 3);
        m.set(2, 1, c(0.0, -7.0));
        assert_eq!(m.argmax_abs(), (2, 1));
    }
}
