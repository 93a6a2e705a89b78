//! Dense decompositions sized for this crate: local dimensions stay below
//! ten, so cyclic Jacobi iterations beat any external solver dependency and
//! keep the crate allocator-only. One-sided Jacobi is used for the SVD
//! because it resolves tiny singular values accurately, which is what the
//! nullspace rank cut relies on.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CoreError;
use crate::matrix::ComplexMatrix;

/// Singular values below RANK_CUT x (largest singular value) count as zero.
pub const RANK_CUT: f64 = 1e-8;

const JACOBI_SWEEPS: usize = 64;

pub fn vec_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(a: &[Complex64]) -> f64 {
    libm::sqrt(a.iter().map(|x| x.norm_sqr()).sum::<f64>())
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns eigenvalues in ascending order with matching
/// eigenvector columns.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix), CoreError> {
    if !h.is_square() {
        return Err(CoreError::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows, h.cols
        )));
    }
    let n = h.rows;
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = h.max_abs().max(1.0);
    let target = 1e-14 * scale;

    for _ in 0..JACOBI_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.get(p, q).norm());
            }
        }
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let mag = apq.norm();
                if mag <= target * 1e-2 {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let phi = apq.arg();
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                let e_minus = Complex64::from_polar(1.0, -phi);

                // G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]; A <- G^dag A G.
                let gpp = Complex64::new(c, 0.0);
                let gpq = Complex64::new(s, 0.0);
                let gqp = e_minus * -s;
                let gqq = e_minus * c;

                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * gpp + akq * gqp);
                    a.set(k, q, akp * gpq + akq * gqq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, gpp.conj() * apk + gqp.conj() * aqk);
                    a.set(q, k, gpq.conj() * apk + gqq.conj() * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * gpp + vkq * gqp);
                    v.set(k, q, vkp * gpq + vkq * gqq);
                }
            }
        }
    }

    let mut final_off = 0.0f64;
    for p in 0..n {
        for q in (p + 1)..n {
            final_off = final_off.max(a.get(p, q).norm());
        }
    }
    if final_off > 1e-10 * scale {
        return Err(CoreError::ConvergenceFailure(format!(
            "Jacobi eigensolver stalled at off-diagonal {final_off:.3e}"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).expect("finite eigenvalues"));
    let sorted_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let sorted_v = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok((sorted_vals, sorted_v))
}

/// Singular value decomposition M = U diag(sigma) V^dag with sigma sorted
/// descending. Computed by one-sided Jacobi on the columns; U columns for
/// vanished singular values are filled by basis completion so U is always
/// a full orthonormal square when M is square or tall.
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

pub fn svd(m: &ComplexMatrix) -> Result<Svd, CoreError> {
    let rows = m.rows;
    let cols = m.cols;
    if rows == 0 || cols == 0 {
        return Err(CoreError::DimensionMismatch("empty matrix".into()));
    }
    // Columns as owned vectors.
    let mut w: Vec<Vec<Complex64>> = (0..cols)
        .map(|j| (0..rows).map(|i| m.get(i, j)).collect())
        .collect();
    let mut v = ComplexMatrix::identity(cols);
    let scale = m.max_abs().max(1e-300);
    let conv = 1e-15;

    let mut converged = false;
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in (i + 1)..cols {
                let alpha = w[i].iter().map(|x| x.norm_sqr()).sum::<f64>();
                let beta = w[j].iter().map(|x| x.norm_sqr()).sum::<f64>();
                let gamma = vec_inner(&w[i], &w[j]);
                let mag = gamma.norm();
                if mag <= conv * libm::sqrt(alpha * beta) + 1e-30 * scale * scale {
                    continue;
                }
                rotated = true;
                let phi = gamma.arg();
                let tau = (beta - alpha) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                let e_minus = Complex64::from_polar(1.0, -phi);
                let gq = e_minus * s;
                let gqq = e_minus * c;

                for k in 0..rows {
                    let wi = w[i][k];
                    let wj = w[j][k];
                    w[i][k] = wi * c - wj * gq;
                    w[j][k] = wi * s + wj * gqq;
                }
                for k in 0..cols {
                    let vi = v.get(k, i);
                    let vj = v.get(k, j);
                    v.set(k, i, vi * c - vj * gq);
                    v.set(k, j, vi * s + vj * gqq);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        // One clean sweep without rotations is the convergence witness; a
        // final near-orthogonality check still accepts slow-tail cases.
        for i in 0..cols {
            for j in (i + 1)..cols {
                let gamma = vec_inner(&w[i], &w[j]).norm();
                let ni = vec_norm(&w[i]);
                let nj = vec_norm(&w[j]);
                if gamma > 1e-10 * (ni * nj).max(scale * scale * 1e-12) {
                    return Err(CoreError::ConvergenceFailure(
                        "one-sided Jacobi SVD did not orthogonalize".into(),
                    ));
                }
            }
        }
    }

    let mut sigma: Vec<f64> = w.iter().map(|col| vec_norm(col)).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).expect("finite singular values"));
    let sigma_sorted: Vec<f64> = order.iter().map(|&i| sigma[i]).collect();
    sigma = sigma_sorted;
    let v_sorted = ComplexMatrix::from_fn(cols, cols, |i, j| v.get(i, order[j]));

    // Left vectors: normalized nonzero columns, then completion to a square
    // orthonormal matrix so downstream polar projection always has full rank.
    let cut = sigma.first().copied().unwrap_or(0.0) * 1e-13;
    let mut u_cols: Vec<Vec<Complex64>> = Vec::new();
    for (slot, &src) in order.iter().enumerate() {
        if slot >= rows {
            break;
        }
        if sigma[slot] > cut && sigma[slot] > 0.0 {
            let col = &w[src];
            u_cols.push(col.iter().map(|x| x / sigma[slot]).collect());
        }
    }
    let u_total = complete_orthonormal_basis(&u_cols, rows);
    let u_mat = ComplexMatrix::from_fn(rows, rows, |i, j| u_total[j][i]);

    Ok(Svd {
        u: u_mat,
        sigma,
        v: v_sorted,
    })
}

/// Extends a set of orthonormal vectors to a full orthonormal basis of C^n
/// using re-orthogonalized Gram-Schmidt over the standard basis.
pub fn complete_orthonormal_basis(existing: &[Vec<Complex64>], n: usize) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = existing.to_vec();
    let mut candidate_idx = 0usize;
    while basis.len() < n && candidate_idx < 2 * n {
        let mut cand = vec![Complex64::new(0.0, 0.0); n];
        cand[candidate_idx % n] = Complex64::new(1.0, 0.0);
        for _pass in 0..2 {
            for b in &basis {
                let overlap = vec_inner(b, &cand);
                for k in 0..n {
                    cand[k] -= overlap * b[k];
                }
            }
        }
        let norm = vec_norm(&cand);
        if norm > 1e-6 {
            for c in cand.iter_mut() {
                *c /= norm;
            }
            basis.push(cand);
        }
        candidate_idx += 1;
    }
    basis
}

/// Orthonormal basis of the joint nullspace of the given maps (all sharing
/// a column count): right singular vectors of the row-stacked system whose
/// singular values fall below RANK_CUT relative to the largest.
pub fn common_nullspace(maps: &[&ComplexMatrix]) -> Result<Vec<Vec<Complex64>>, CoreError> {
    if maps.is_empty() {
        return Err(CoreError::InvalidInput("no maps given".into()));
    }
    let cols = maps[0].cols;
    if maps.iter().any(|m| m.cols != cols) {
        return Err(CoreError::DimensionMismatch(
            "maps must share their column count".into(),
        ));
    }
    let total_rows: usize = maps.iter().map(|m| m.rows).sum();
    let mut stacked = ComplexMatrix::zeros(total_rows, cols);
    let mut offset = 0;
    for m in maps {
        for i in 0..m.rows {
            for j in 0..cols {
                stacked.set(offset + i, j, m.get(i, j));
            }
        }
        offset += m.rows;
    }
    let dec = svd(&stacked)?;
    let sigma_max = dec.sigma.first().copied().unwrap_or(0.0);
    let mut null = Vec::new();
    for (k, &s) in dec.sigma.iter().enumerate() {
        let is_zero = if sigma_max > 0.0 {
            s < RANK_CUT * sigma_max
        } else {
            true
        };
        if is_zero {
            null.push((0..cols).map(|i| dec.v.get(i, k)).collect());
        }
    }
    Ok(null)
}

/// Nearest unitary to a square matrix: replace every singular value by 1.
pub fn polar_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix, CoreError> {
    if !m.is_square() {
        return Err(CoreError::DimensionMismatch("polar projection needs a square matrix".into()));
    }
    let dec = svd(m)?;
    // U V^dag, with U already completed to a square orthonormal matrix.
    dec.u.mul(&dec.v.dagger())
}

/// Joint eigenbasis of a family of commuting normal operators. A random
/// real combination of their Hermitian and anti-Hermitian parts splits the
/// joint eigenspaces; clusters that stay degenerate are refined recursively
/// with fresh coefficients. Returns the basis and each operator's diagonal.
pub fn simultaneous_diagonalize(
    ops: &[&ComplexMatrix],
    seed: u64,
) -> Result<(ComplexMatrix, Vec<Vec<Complex64>>), CoreError> {
    if ops.is_empty() {
        return Err(CoreError::InvalidInput("no operators given".into()));
    }
    let n = ops[0].rows;
    if ops.iter().any(|o| !o.is_square() || o.rows != n) {
        return Err(CoreError::DimensionMismatch(
            "operators must be square with a shared dimension".into(),
        ));
    }
    let scale = ops.iter().map(|o| o.max_abs()).fold(1.0f64, f64::max);
    let basis = diagonalize_rec(ops, seed, 0)?;

    // The recursion guarantees the basis columns are orthonormal; verify the
    // operators actually became diagonal (they do not for non-commuting input).
    let mut diags = Vec::with_capacity(ops.len());
    for op in ops {
        let transformed = basis.dagger().mul(op)?.mul(&basis)?;
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(transformed.get(i, j).norm());
                }
            }
        }
        if off > 1e-8 * scale {
            return Err(CoreError::ConvergenceFailure(format!(
                "operators are not simultaneously diagonalizable (residual {off:.3e})"
            )));
        }
        diags.push((0..n).map(|i| transformed.get(i, i)).collect());
    }
    Ok((basis, diags))
}

fn diagonalize_rec(
    ops: &[&ComplexMatrix],
    seed: u64,
    depth: usize,
) -> Result<ComplexMatrix, CoreError> {
    let n = ops[0].rows;
    if n == 1 {
        return Ok(ComplexMatrix::identity(1));
    }
    if depth > 16 {
        return Err(CoreError::ConvergenceFailure(
            "eigenspace refinement exceeded the depth limit".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (depth as u64).wrapping_mul(0x9e3779b97f4a7c15));
    let mut h = ComplexMatrix::zeros(n, n);
    for op in ops {
        let a: f64 = rng.gen_range(0.25..1.0);
        let b: f64 = rng.gen_range(0.25..1.0);
        let dag = op.dagger();
        for i in 0..n {
            for j in 0..n {
                let u = op.get(i, j);
                let ud = dag.get(i, j);
                let re_part = (u + ud) * 0.5;
                let im_part = (u - ud) * Complex64::new(0.0, -0.5);
                let cur = h.get(i, j);
                h.set(i, j, cur + re_part * a + im_part * b);
            }
        }
    }
    let (vals, vecs) = hermitian_eigen(&h)?;

    // Cluster eigenvalues by gap.
    let spread = vals
        .iter()
        .map(|v| v.abs())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let gap = 1e-6 * spread;
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut start = 0usize;
    for i in 1..=n {
        if i == n || vals[i] - vals[i - 1] > gap {
            clusters.push((start, i));
            start = i;
        }
    }

    let mut basis = vecs;
    let mut next_child = 1u64;
    for &(lo, hi) in &clusters {
        let k = hi - lo;
        if k <= 1 {
            continue;
        }
        // Restrict every operator to the cluster and check diagonality there.
        let sub_cols = ComplexMatrix::from_fn(n, k, |i, j| basis.get(i, lo + j));
        let mut subs = Vec::with_capacity(ops.len());
        let mut needs_refine = false;
        for op in ops {
            let restricted = sub_cols.dagger().mul(op)?.mul(&sub_cols)?;
            for i in 0..k {
                for j in 0..k {
                    if i != j && restricted.get(i, j).norm() > 1e-10 * spread {
                        needs_refine = true;
                    }
                }
            }
            subs.push(restricted);
        }
        if !needs_refine {
            continue;
        }
        let sub_refs: Vec<&ComplexMatrix> = subs.iter().collect();
        let child = diagonalize_rec(&sub_refs, seed.wrapping_add(next_child * 0xc2b2), depth + 1)?;
        next_child += 1;
        let rotated = sub_cols.mul(&child)?;
        for i in 0..n {
            for j in 0..k {
                basis.set(i, lo + j, rotated.get(i, j));
            }
        }
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{kron, Tolerance};
    use crate::weyl::{pauli_x, pauli_z};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigen_of_real_symmetric_two_by_two() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let h = ComplexMatrix::new(2, 2, vec![c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)])
            .unwrap();
        let (vals, vecs) = hermitian_eigen(&h).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        let tol = Tolerance::default();
        assert!(vecs.is_unitary(&tol));
        // Residual check H v = lambda v.
        for k in 0..2 {
            let v: Vec<Complex64> = (0..2).map(|i| vecs.get(i, k)).collect();
            let hv = h.mul_vec(&v).unwrap();
            for i in 0..2 {
                assert!((hv[i] - v[i] * vals[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn eigen_of_complex_hermitian() {
        // [[1, i],[-i, 1]] has eigenvalues 0 and 2.
        let h = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)])
            .unwrap();
        let (vals, vecs) = hermitian_eigen(&h).unwrap();
        assert!((vals[0] - 0.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        for k in 0..2 {
            let v: Vec<Complex64> = (0..2).map(|i| vecs.get(i, k)).collect();
            let hv = h.mul_vec(&v).unwrap();
            for i in 0..2 {
                assert!((hv[i] - v[i] * vals[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn eigen_handles_unequal_diagonal_entries() {
        // [[1,2],[2,5]] has eigenvalues 3 -+ 2*sqrt(2); the rotation angle
        // here is not 45 degrees, which catches sign mistakes the symmetric
        // cases above cannot see.
        let h = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(5.0, 0.0)])
            .unwrap();
        let (vals, vecs) = hermitian_eigen(&h).unwrap();
        let root = 2.0 * libm::sqrt(2.0);
        assert!((vals[0] - (3.0 - root)).abs() < 1e-12);
        assert!((vals[1] - (3.0 + root)).abs() < 1e-12);
        for k in 0..2 {
            let v: Vec<Complex64> = (0..2).map(|i| vecs.get(i, k)).collect();
            let hv = h.mul_vec(&v).unwrap();
            for i in 0..2 {
                assert!((hv[i] - v[i] * vals[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn eigen_reconstructs_a_dense_hermitian_matrix() {
        // Pseudo-random Hermitian 5x5 built from a fixed generator matrix.
        let n = 5;
        let g = ComplexMatrix::from_fn(n, n, |i, j| {
            c(
                ((i * n + j) as f64 * 0.73).sin(),
                ((i * 2 + j * 7) as f64 * 0.41).cos(),
            )
        });
        let h = g.add(&g.dagger()).unwrap();
        let (vals, vecs) = hermitian_eigen(&h).unwrap();
        assert!(vecs.is_unitary(&Tolerance::default()));
        let mut rebuilt = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let add = vecs.get(i, k) * vals[k] * vecs.get(j, k).conj();
                    let cur = rebuilt.get(i, j);
                    rebuilt.set(i, j, cur + add);
                }
            }
        }
        assert!(rebuilt.max_abs_diff(&h) < 1e-10);
        assert!(vals.windows(2).all(|w| w[0] <= w[1] + 1e-12));
    }

    #[test]
    fn eigen_rejects_rectangular() {
        assert!(hermitian_eigen(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn svd_reconstructs_and_is_orthonormal() {
        // Fixed complex 4x3 matrix; check M = U diag(sigma) V^dag.
        let m = ComplexMatrix::from_fn(4, 3, |i, j| {
            c(
                ((i * 3 + j) as f64 * 0.37).sin(),
                ((i + 2 * j) as f64 * 0.91).cos() * 0.5,
            )
        });
        let dec = svd(&m).unwrap();
        let tol = Tolerance::default();
        assert!(dec.u.is_unitary(&tol));
        assert!(dec.v.is_unitary(&tol));
        let mut rebuilt = ComplexMatrix::zeros(4, 3);
        for k in 0..3 {
            for i in 0..4 {
                for j in 0..3 {
                    let add = dec.u.get(i, k) * dec.sigma[k] * dec.v.get(j, k).conj();
                    let cur = rebuilt.get(i, j);
                    rebuilt.set(i, j, cur + add);
                }
            }
        }
        assert!(rebuilt.max_abs_diff(&m) < 1e-10);
        assert!(dec.sigma.windows(2).all(|w| w[0] >= w[1] - 1e-15));
    }

    #[test]
    fn svd_of_diagonal_sorts_singular_values() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c([3.0, 0.0, 1.0][i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let dec = svd(&m).unwrap();
        assert!((dec.sigma[0] - 3.0).abs() < 1e-12);
        assert!((dec.sigma[1] - 1.0).abs() < 1e-12);
        assert!(dec.sigma[2].abs() < 1e-12);
    }

    #[test]
    fn nullspace_of_rank_one_projector() {
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let null = common_nullspace(&[&m]).unwrap();
        assert_eq!(null.len(), 1);
        assert!(null[0][0].norm() < 1e-10);
        assert!((null[0][1].norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn joint_nullspace_can_be_empty() {
        let m1 = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let m2 = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        assert!(common_nullspace(&[&m1, &m2]).unwrap().is_empty());
    }

    #[test]
    fn nullspace_of_zero_map_is_everything() {
        let z = ComplexMatrix::zeros(3, 3);
        let null = common_nullspace(&[&z]).unwrap();
        assert_eq!(null.len(), 3);
    }

    #[test]
    fn nullspace_rejects_mixed_column_counts() {
        let a = ComplexMatrix::zeros(2, 2);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(common_nullspace(&[&a, &b]).is_err());
    }

    #[test]
    fn polar_projection_recovers_permutation() {
        // [[0, 2],[3, 0]] is a scaled swap; its nearest unitary is the swap.
        let m = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let u = polar_unitary(&m).unwrap();
        let swap = pauli_x(2);
        assert!(u.max_abs_diff(&swap) < 1e-10);
    }

    #[test]
    fn simultaneous_diagonalization_of_commuting_pair() {
        let z = pauli_z(3);
        let z2 = z.mul(&z).unwrap();
        let (basis, diags) = simultaneous_diagonalize(&[&z, &z2], 7).unwrap();
        let tol = Tolerance::default();
        assert!(basis.is_unitary(&tol));
        // Diagonal of the second operator is the square of the first.
        for k in 0..3 {
            assert!((diags[0][k] * diags[0][k] - diags[1][k]).norm() < 1e-9);
        }
    }

    #[test]
    fn simultaneous_diagonalization_splits_tensor_factors() {
        let a = kron(&pauli_z(2), &ComplexMatrix::identity(2));
        let b = kron(&ComplexMatrix::identity(2), &pauli_x(2));
        let (basis, diags) = simultaneous_diagonalize(&[&a, &b], 11).unwrap();
        let tol = Tolerance::default();
        assert!(basis.is_unitary(&tol));
        for d in &diags {
            for v in d {
                assert!((v.norm() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn simultaneous_diagonalization_rejects_non_commuting() {
        let z = pauli_z(2);
        let x = pauli_x(2);
        assert!(matches!(
            simultaneous_diagonalize(&[&z, &x], 3),
            Err(CoreError::ConvergenceFailure(_))
        ));
    }

    #[test]
    fn basis_completion_fills_out_the_space() {
        let first = vec![vec![c(1.0, 0.0) / c(2.0f64.sqrt(), 0.0), c(1.0, 0.0) / c(2.0f64.sqrt(), 0.0)]];
        let full = complete_orthonormal_basis(&first, 2);
        assert_eq!(full.len(), 2);
        assert!(vec_inner(&full[0], &full[1]).norm() < 1e-12);
        assert!((vec_norm(&full[1]) - 1.0).abs() < 1e-12);
    }
}
