use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::copier::CopiedSet;
use crate::error::CoreError;
use crate::matrix::{ComplexMatrix, Tolerance};
use crate::state::BipartiteState;

/// Primitive D-th root of unity, w = exp(+2 pi i / D).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseRoot {
    pub dim: usize,
    pub value: Complex64,
}

impl PhaseRoot {
    pub fn new(dim: usize) -> Self {
        PhaseRoot {
            dim,
            value: Complex64::from_polar(1.0, 2.0 * PI / dim as f64),
        }
    }

    /// w^k, reduced mod dim so huge exponents stay accurate.
    pub fn pow(&self, k: i64) -> Complex64 {
        let d = self.dim as i64;
        let k = k.rem_euclid(d);
        Complex64::from_polar(1.0, 2.0 * PI * k as f64 / self.dim as f64)
    }
}

/// Label (n, m) of a canonical maximally entangled state
/// (Z^n X^m (x) I) |Psi_00> at local dimension `dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BellIndex {
    pub n: usize,
    pub m: usize,
    pub dim: usize,
}

impl BellIndex {
    pub fn new(n: usize, m: usize, dim: usize) -> Result<Self, CoreError> {
        let index = Self { n, m, dim };
        index.validate()?;
        Ok(index)
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if self.dim < 2 {
            return Err(CoreError::InvalidInput(format!(
                "local dimension must be at least 2, got {}",
                self.dim
            )));
        }
        if self.n >= self.dim || self.m >= self.dim {
            return Err(CoreError::InvalidInput(format!(
                "index ({}, {}) out of range for dimension {}",
                self.n, self.m, self.dim
            )));
        }
        Ok(())
    }
}

/// Clock operator Z = sum_k w^k |k><k|.
pub fn pauli_z(dim: usize) -> ComplexMatrix {
    let w = PhaseRoot::new(dim);
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            w.pow(i as i64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Shift operator X = sum_k |k><k + 1 mod D|, so X|k> = |k - 1 mod D>.
pub fn pauli_x(dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        if j == (i + 1) % dim {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Z^n X^m without repeated multiplication:
/// (Z^n X^m)[k, l] = w^{n k} delta_{l, k + m mod D}.
pub fn weyl_op(n: usize, m: usize, dim: usize) -> ComplexMatrix {
    let w = PhaseRoot::new(dim);
    ComplexMatrix::from_fn(dim, dim, |k, l| {
        if l == (k + m) % dim {
            w.pow((n * k) as i64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Canonical maximally entangled state (Z^n X^m (x) I)|Psi_00| with
/// |Psi_00> = (1/sqrt(D)) sum_k |k>|k>.
pub fn bell_state(index: &BellIndex) -> Result<BipartiteState, CoreError> {
    index.validate()?;
    let d = index.dim;
    let u = weyl_op(index.n, index.m, d);
    let scale = 1.0 / libm::sqrt(d as f64);
    // Coefficient matrix of (U (x) I)|Psi_00> is U / sqrt(D).
    let mut amplitudes = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            amplitudes.push(u.get(i, j) * scale);
        }
    }
    Ok(BipartiteState {
        dim_a: d,
        dim_b: d,
        amplitudes,
    })
}

/// The clock-power copied set {Z^j : j in exponents}. Exponents must be
/// distinct mod D; each names one orthogonal maximally entangled state.
pub fn clock_power_set(dim: usize, exponents: &[usize]) -> Result<CopiedSet, CoreError> {
    if dim < 2 {
        return Err(CoreError::InvalidInput("local dimension must be at least 2".into()));
    }
    if exponents.is_empty() {
        return Err(CoreError::InvalidInput("empty exponent list".into()));
    }
    let mut seen = alloc::vec![false; dim];
    for &j in exponents {
        let jm = j % dim;
        if seen[jm] {
            return Err(CoreError::InvalidInput(format!(
                "duplicate exponent {j} (mod {dim})"
            )));
        }
        seen[jm] = true;
    }
    let unitaries = exponents
        .iter()
        .map(|&j| weyl_op(j % dim, 0, dim))
        .collect::<Vec<_>>();
    CopiedSet::new(unitaries, &Tolerance::default())
}

/// Copied set built from canonical state labels: {Z^n X^m : (n, m) given}.
pub fn weyl_set(dim: usize, indices: &[(usize, usize)]) -> Result<CopiedSet, CoreError> {
    if indices.is_empty() {
        return Err(CoreError::InvalidInput("empty index list".into()));
    }
    let mut ops = Vec::with_capacity(indices.len());
    for &(n, m) in indices {
        BellIndex::new(n, m, dim)?;
        ops.push(weyl_op(n, m, dim));
    }
    CopiedSet::new(ops, &Tolerance::default())
}
