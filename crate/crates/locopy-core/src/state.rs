use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::CoreError;
use crate::matrix::{ComplexMatrix, Tolerance};

/// Pure state of a bipartite system, stored as the flat amplitude vector of
/// H_A (x) H_B with index `i * dim_b + j` for |i>|j>.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    pub dim_a: usize,
    pub dim_b: usize,
    pub amplitudes: Vec<Complex64>,
}

impl BipartiteState {
    /// Builds a state and checks normalization against the given tolerance.
    pub fn new(
        dim_a: usize,
        dim_b: usize,
        amplitudes: Vec<Complex64>,
        tol: &Tolerance,
    ) -> Result<Self, CoreError> {
        if amplitudes.len() != dim_a * dim_b {
            return Err(CoreError::DimensionMismatch(format!(
                "{dim_a}x{dim_b} state needs {} amplitudes, got {}",
                dim_a * dim_b,
                amplitudes.len()
            )));
        }
        let state = BipartiteState {
            dim_a,
            dim_b,
            amplitudes,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > tol.eps {
            return Err(CoreError::InvalidInput(format!(
                "state norm {norm} is not 1 within {}",
                tol.eps
            )));
        }
        Ok(state)
    }

    /// Builds a state, rescaling the amplitudes to unit norm.
    pub fn normalized(
        dim_a: usize,
        dim_b: usize,
        mut amplitudes: Vec<Complex64>,
    ) -> Result<Self, CoreError> {
        if amplitudes.len() != dim_a * dim_b {
            return Err(CoreError::DimensionMismatch(format!(
                "{dim_a}x{dim_b} state needs {} amplitudes, got {}",
                dim_a * dim_b,
                amplitudes.len()
            )));
        }
        let norm = libm::sqrt(amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>());
        if norm == 0.0 {
            return Err(CoreError::InvalidInput("cannot normalize the zero vector".into()));
        }
        for a in amplitudes.iter_mut() {
            *a /= norm;
        }
        Ok(BipartiteState {
            dim_a,
            dim_b,
            amplitudes,
        })
    }

    /// Reads the state out of its D_A x D_B coefficient matrix
    /// (|psi> = sum_ij C[i,j] |i>|j>), rescaling to unit norm.
    pub fn from_coefficient_matrix(c: &ComplexMatrix) -> Result<Self, CoreError> {
        Self::normalized(c.rows, c.cols, c.data.clone())
    }

    /// The D_A x D_B matrix C with |psi> = sum_ij C[i,j] |i>|j>.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.dim_a,
            cols: self.dim_b,
            data: self.amplitudes.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    /// Amplitude on the product basis vector `|i>|j>`.
    pub fn amplitude(&self, i: usize, j: usize) -> Complex64 {
        self.amplitudes[i * self.dim_b + j]
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>())
    }

    /// <self|other>.
    pub fn inner(&self, other: &BipartiteState) -> Result<Complex64, CoreError> {
        if self.dim_a != other.dim_a || self.dim_b != other.dim_b {
            return Err(CoreError::DimensionMismatch(format!(
                "{}x{} state vs {}x{} state",
                self.dim_a, self.dim_b, other.dim_a, other.dim_b
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |psi><psi| as a dense matrix.
    pub fn to_density(&self) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |i, j| {
            self.amplitudes[i] * self.amplitudes[j].conj()
        })
    }

    /// Applies `op_a (x) op_b` without renormalizing; the image stays
    /// normalized whenever both factors are unitary.
    pub fn apply_local(
        &self,
        op_a: &ComplexMatrix,
        op_b: &ComplexMatrix,
    ) -> Result<BipartiteState, CoreError> {
        if op_a.cols != self.dim_a || op_b.cols != self.dim_b {
            return Err(CoreError::DimensionMismatch(
                "local operator shape does not match state".into(),
            ));
        }
        let c = self.coefficient_matrix();
        // (A x B)|psi>  <=>  A C B^T on coefficient matrices.
        let out = op_a.mul(&c)?.mul(&op_b.transpose())?;
        Ok(BipartiteState {
            dim_a: op_a.rows,
            dim_b: op_b.rows,
            amplitudes: out.data,
        })
    }
}

/// <psi| rho |psi> for a pure state against a density operator.
pub fn fidelity_pure(psi: &BipartiteState, rho: &ComplexMatrix) -> Result<f64, CoreError> {
    let n = psi.dim();
    if rho.rows != n || rho.cols != n {
        return Err(CoreError::DimensionMismatch(format!(
            "state dimension {n} vs operator {}x{}",
            rho.rows, rho.cols
        )));
    }
    let image = rho.mul_vec(&psi.amplitudes)?;
    let value: Complex64 = psi
        .amplitudes
        .iter()
        .zip(image.iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(value.re)
}

/// Squared overlap |<a|b>|^2 of two pure states.
pub fn overlap_sqr(a: &BipartiteState, b: &BipartiteState) -> Result<f64, CoreError> {
    Ok(a.inner(b)?.norm_sqr())
}
