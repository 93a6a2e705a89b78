//! Copier machines for families of maximally entangled two-qudit states.
//!
//! A family is encoded by the unitaries that rotate the canonical maximally
//! entangled state into its members. A copier is a two-qudit unitary `A`
//! satisfying `A (T (x) I) A^dag = phase * (T (x) T)` for every quotient `T`
//! of family members; applied on one side together with its entrywise
//! conjugate on the other side, it turns `state (x) blank` into
//! `state (x) state` exactly.
//!
//! [`solve_copier`] searches for such a machine: it enumerates the finitely
//! many unphysical per-member phase choices, prunes with spectrum and trace
//! obstructions that any copier forces, and then projects a random element
//! of the intertwining solution space onto the unitary group. Every returned
//! machine is re-verified against the family, so a `Found` outcome is a
//! checked certificate rather than a heuristic guess.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CoreError;
use crate::linalg::{common_nullspace, polar_unitary, simultaneous_diagonalize};
use crate::matrix::{kron, ComplexMatrix, Tolerance};
use crate::state::BipartiteState;
use crate::weyl::BellIndex;

/// Relative tolerance for the algebraic pruning filters. These are
/// necessary-condition checks, so a loose threshold only costs time in the
/// verified solve stage, never correctness.
const FILTER_EPS: f64 = 1e-6;

/// A family of unitaries defining maximally entangled states to be copied.
///
/// Every operator must be square, unitary, and share one dimension.
#[derive(Clone, Debug)]
pub struct CopiedSet {
    dim: usize,
    ops: Vec<ComplexMatrix>,
}

impl CopiedSet {
    pub fn new(ops: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<Self, CoreError> {
        if ops.is_empty() {
            return Err(CoreError::InvalidInput("a copied family needs at least one member".into()));
        }
        let dim = ops[0].rows;
        if dim < 2 {
            return Err(CoreError::InvalidInput("local dimension must be at least 2".into()));
        }
        for (j, op) in ops.iter().enumerate() {
            if !op.is_square() || op.rows != dim {
                return Err(CoreError::DimensionMismatch(format!(
                    "member {j} is {}x{}, expected {dim}x{dim}",
                    op.rows, op.cols
                )));
            }
            if !op.is_unitary(tol) {
                return Err(CoreError::InvalidInput(format!("member {j} is not unitary")));
            }
        }
        Ok(Self { dim, ops })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn op(&self, j: usize) -> &ComplexMatrix {
        &self.ops[j]
    }
}

/// Pairwise orthogonality of the encoded states: `Tr(U_j^dag U_k)` must
/// vanish for distinct members. Returns the largest deviation scaled by the
/// dimension, so values at machine precision mean an orthonormal family.
pub fn orthogonality_residual(set: &CopiedSet) -> f64 {
    let d = set.dim() as f64;
    let mut worst = 0.0f64;
    for j in 0..set.len() {
        for k in 0..set.len() {
            let tr = set.op(j).dagger().mul(set.op(k)).expect("validated dims").trace();
            let target = if j == k {
                Complex64::new(d, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((tr - target).norm() / d);
        }
    }
    worst
}

pub fn check_orthogonality(set: &CopiedSet, tol: &Tolerance) -> bool {
    orthogonality_residual(set) <= tol.eps
}

/// Quotient form of a family: divides every member by the first, so the
/// returned family starts with the identity. Copying the original states
/// and copying the quotient states are the same problem, because the two
/// families differ by one fixed local rotation.
pub fn reduce_to_fundamental(set: &CopiedSet) -> Result<CopiedSet, CoreError> {
    let anchor = set.op(0).dagger();
    let ops = set
        .ops()
        .iter()
        .map(|u| u.mul(&anchor).expect("validated dims"))
        .collect();
    // Members of a validated set are unitary, so the quotients are too; a
    // generous tolerance here only guards against accumulated roundoff.
    CopiedSet::new(ops, &Tolerance { eps: 1e-7 })
}

/// Outcome of testing a specific machine against a family.
#[derive(Clone, Debug)]
pub struct ConditionReport {
    /// True when every quotient satisfies the copier equation within
    /// ten times the working tolerance.
    pub satisfied: bool,
    /// Largest entrywise deviation across all member pairs.
    pub max_residual: f64,
    /// Fitted phase angle per member (first member pinned to zero). The
    /// copier equation only determines members up to these phases.
    pub phases: Vec<f64>,
}

/// Tests `A (T_jk (x) I) A^dag = e^{i(phi_j - phi_k)} (T_jk (x) T_jk)` for
/// every member quotient `T_jk = U_j U_k^dag`, fitting the per-member
/// phases from the data. The machine must be a unitary on two qudits.
pub fn check_copier_condition(
    a: &ComplexMatrix,
    set: &CopiedSet,
    tol: &Tolerance,
) -> Result<ConditionReport, CoreError> {
    let d = set.dim();
    if a.rows != d * d || a.cols != d * d {
        return Err(CoreError::DimensionMismatch(format!(
            "machine must be {0}x{0} for local dimension {d}, got {1}x{2}",
            d * d,
            a.rows,
            a.cols
        )));
    }
    if !a.is_unitary(&Tolerance { eps: 1e-7 }) {
        return Err(CoreError::InvalidInput("machine is not unitary".into()));
    }
    let fundamental = reduce_to_fundamental(set)?;
    let a_dag = a.dagger();
    let eye = ComplexMatrix::identity(d);

    // Fit one phase per member from the quotient against the first member.
    let mut phase_factors = vec![Complex64::new(1.0, 0.0); set.len()];
    let mut max_residual = 0.0f64;
    for j in 0..set.len() {
        let t = fundamental.op(j);
        let lhs = a.mul(&kron(t, &eye))?.mul(&a_dag)?;
        let rhs = kron(t, t);
        let (bi, bj) = rhs.argmax_abs();
        let pivot = rhs.get(bi, bj);
        let measured = lhs.get(bi, bj);
        let factor = if measured.norm() > 1e-12 && pivot.norm() > 1e-12 {
            let raw = measured / pivot;
            raw / raw.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        phase_factors[j] = factor;
        max_residual = max_residual.max(lhs.max_abs_diff(&rhs.scale(factor)));
    }

    // Cross-check every remaining pair against the fitted phases; a phase
    // assignment that only works against the first member is not a copier.
    for j in 0..set.len() {
        for k in 0..set.len() {
            if j == k || k == 0 {
                continue;
            }
            let t = set.op(j).mul(&set.op(k).dagger())?;
            let lhs = a.mul(&kron(&t, &eye))?.mul(&a_dag)?;
            let rhs = kron(&t, &t).scale(phase_factors[j] * phase_factors[k].conj());
            max_residual = max_residual.max(lhs.max_abs_diff(&rhs));
        }
    }

    Ok(ConditionReport {
        satisfied: max_residual <= 10.0 * tol.eps,
        max_residual,
        phases: phase_factors.iter().map(|f| f.arg()).collect(),
    })
}

/// A verified copier machine together with the blank state it consumes.
#[derive(Clone, Debug)]
pub struct CopierCertificate {
    /// The two-qudit unitary applied on the sender side; the receiver side
    /// applies its entrywise conjugate.
    pub a: ComplexMatrix,
    /// Blank resource state fed into the second qudit pair.
    pub blank: BipartiteState,
    /// Residual of the copier equation over all member pairs.
    pub residual: f64,
    /// Fitted per-member phase angles.
    pub phases: Vec<f64>,
}

/// Why no copier was found, with the strongest structural evidence seen.
#[derive(Clone, Debug)]
pub struct NoCopierEvidence {
    pub reason: String,
    /// Largest intertwining solution-space dimension encountered across all
    /// phase assignments (zero when an obstruction fired before solving).
    pub max_nullspace_dim: usize,
}

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Found(CopierCertificate),
    NotCopiable(NoCopierEvidence),
}

/// Searches for a copier machine for the family.
///
/// The search is exact up to the verified tolerance: member phases are
/// unphysical, so each member is rescaled by every inverse eigenvalue in
/// turn (a copier forces eigenvalue 1 on each rescaled member). Assignments
/// surviving the spectrum and trace obstructions go to the solver, which
/// parameterizes all intertwiners in a joint eigenbasis (or, for families
/// that do not commute, through a dense vectorized nullspace), draws
/// `attempts` random elements, projects each onto the unitary group, and
/// accepts only machines that re-verify via [`check_copier_condition`].
pub fn solve_copier(
    set: &CopiedSet,
    tol: &Tolerance,
    attempts: usize,
    seed: u64,
) -> Result<SolveOutcome, CoreError> {
    let d = set.dim();
    let fundamental = reduce_to_fundamental(set)?;
    let n = fundamental.len();
    let attempts = attempts.max(1);

    // Trivial family: only the anchor member, copied by doing nothing.
    if n == 1 {
        let a = ComplexMatrix::identity(d * d);
        let report = check_copier_condition(&a, set, tol)?;
        return Ok(SolveOutcome::Found(CopierCertificate {
            a,
            blank: canonical_blank(d)?,
            residual: report.max_residual,
            phases: report.phases,
        }));
    }

    // Phase-free obstruction: group commutators are invariant under member
    // rescaling, and any copier forces their traces into {0, dim}.
    for j in 1..n {
        for k in (j + 1)..n {
            let tj = fundamental.op(j);
            let tk = fundamental.op(k);
            let w = tj.mul(tk)?.mul(&tj.dagger())?.mul(&tk.dagger())?;
            if !trace_is_flat(&w, d) {
                return Ok(SolveOutcome::NotCopiable(NoCopierEvidence {
                    reason: format!(
                        "commutator of members {j} and {k} has trace {:.4}{:+.4}i, which no copier admits",
                        w.trace().re,
                        w.trace().im
                    ),
                    max_nullspace_dim: 0,
                }));
            }
        }
    }

    // Eigenvalues of each nontrivial member, computed once; rescaling only
    // moves eigenvalues, never eigenvectors.
    let tail: Vec<&ComplexMatrix> = (1..n).map(|j| fundamental.op(j)).collect();
    let mut member_eigs: Vec<Vec<Complex64>> = Vec::with_capacity(n - 1);
    for (idx, t) in tail.iter().enumerate() {
        let (_, diags) = simultaneous_diagonalize(&[t], seed.wrapping_add(idx as u64 + 1))?;
        member_eigs.push(diags[0].clone());
    }

    // Candidate rescalings per member: the inverse of each distinct
    // eigenvalue, pre-filtered by the product-spectrum obstruction.
    let mut candidates: Vec<Vec<Complex64>> = Vec::with_capacity(n - 1);
    for eigs in &member_eigs {
        let mut distinct: Vec<Complex64> = Vec::new();
        for e in eigs {
            if !distinct.iter().any(|x| (x - e).norm() < FILTER_EPS) {
                distinct.push(*e);
            }
        }
        let mut ok: Vec<Complex64> = Vec::new();
        for lambda in &distinct {
            let c = lambda.conj() / lambda.norm().max(1e-12);
            let scaled: Vec<Complex64> = eigs.iter().map(|e| e * c).collect();
            if product_spectrum_matches(&scaled) {
                ok.push(c);
            }
        }
        if ok.is_empty() {
            return Ok(SolveOutcome::NotCopiable(NoCopierEvidence {
                reason: "a member's spectrum admits no rescaling with matching product spectrum"
                    .into(),
                max_nullspace_dim: 0,
            }));
        }
        candidates.push(ok);
    }

    // Joint eigenbasis when the quotient family commutes; otherwise fall
    // back to the dense vectorized intertwiner system per assignment.
    let joint = simultaneous_diagonalize(&tail, seed.wrapping_mul(0x9e37).wrapping_add(17)).ok();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_null_dim = 0usize;
    let mut combo = vec![0usize; n - 1];
    loop {
        let scales: Vec<Complex64> = combo.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
        if word_traces_flat(&tail, &scales, d) {
            let solved = match &joint {
                Some((basis, diags)) => solve_in_eigenbasis(
                    set, basis, diags, &scales, d, tol, attempts, &mut rng, &mut max_null_dim,
                )?,
                None => solve_dense(set, &tail, &scales, d, tol, attempts, &mut rng, &mut max_null_dim)?,
            };
            if let Some(cert) = solved {
                return Ok(SolveOutcome::Found(cert));
            }
        }
        // Odometer over all phase assignments.
        let mut pos = 0usize;
        loop {
            if pos == combo.len() {
                return Ok(SolveOutcome::NotCopiable(NoCopierEvidence {
                    reason: "no member phase assignment admits a unitary intertwiner".into(),
                    max_nullspace_dim: max_null_dim,
                }));
            }
            combo[pos] += 1;
            if combo[pos] < candidates[pos].len() {
                break;
            }
            combo[pos] = 0;
            pos += 1;
        }
    }
}

fn canonical_blank(d: usize) -> Result<BipartiteState, CoreError> {
    crate::weyl::bell_state(&BellIndex::new(0, 0, d)?)
}

/// True when the trace is within tolerance of 0 or of the dimension, the
/// only values a copier leaves available to words in the copied family.
fn trace_is_flat(w: &ComplexMatrix, d: usize) -> bool {
    let tr = w.trace();
    let dd = d as f64;
    let dist = tr.norm().min((tr - Complex64::new(dd, 0.0)).norm());
    dist <= FILTER_EPS * dd
}

/// Multiset test: the spectrum of `T (x) I` must match the spectrum of
/// `T (x) T`, i.e. each eigenvalue (with multiplicity dim) must be matched
/// by the pairwise eigenvalue products.
fn product_spectrum_matches(eigs: &[Complex64]) -> bool {
    let d = eigs.len();
    let mut left: Vec<Complex64> = Vec::with_capacity(d * d);
    let mut right: Vec<Complex64> = Vec::with_capacity(d * d);
    for e in eigs {
        for f in eigs {
            left.push(*e * Complex64::new(1.0, 0.0));
            right.push(e * f);
        }
    }
    // `left` holds each eigenvalue d times because the inner loop runs d
    // times; the values pushed are independent of `f` by construction.
    let mut used = vec![false; right.len()];
    for l in &left {
        let mut matched = false;
        for (k, r) in right.iter().enumerate() {
            if !used[k] && (l - r).norm() < FILTER_EPS {
                used[k] = true;
                matched = true;
                break;
            }
        }
        if !matched {
            return false;
        }
    }
    true
}

/// Trace obstruction over short words in the rescaled members: single
/// members, ordered pairwise products, and pairwise quotients.
fn word_traces_flat(tail: &[&ComplexMatrix], scales: &[Complex64], d: usize) -> bool {
    let n = tail.len();
    for j in 0..n {
        let w = tail[j].scale(scales[j]);
        if !trace_is_flat(&w, d) {
            return false;
        }
        for k in 0..n {
            let prod = tail[j].mul(tail[k]).expect("validated dims");
            if !trace_is_flat(&prod.scale(scales[j] * scales[k]), d) {
                return false;
            }
            if j != k {
                let quot = tail[j].mul(&tail[k].dagger()).expect("validated dims");
                if !trace_is_flat(&quot.scale(scales[j] * scales[k].conj()), d) {
                    return false;
                }
            }
        }
    }
    true
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen();
    let r = libm::sqrt(-2.0 * libm::log(u1));
    let angle = 2.0 * core::f64::consts::PI * u2;
    Complex64::new(r * libm::cos(angle), r * libm::sin(angle))
}

/// Intertwiner search in a joint eigenbasis. Writing every member as
/// `V diag(d_j) V^dag`, the copier equation pins the machine's matrix
/// element at row pair (p,q), column pair (r,s) to zero unless
/// `d_j[r] = d_j[p] d_j[q]` for every member; the second column index `s`
/// is unconstrained. A random fill of the free entries followed by polar
/// projection yields a unitary solution whenever one exists.
#[allow(clippy::too_many_arguments)]
fn solve_in_eigenbasis(
    set: &CopiedSet,
    basis: &ComplexMatrix,
    diags: &[Vec<Complex64>],
    scales: &[Complex64],
    d: usize,
    tol: &Tolerance,
    attempts: usize,
    rng: &mut ChaCha8Rng,
    max_null_dim: &mut usize,
) -> Result<Option<CopierCertificate>, CoreError> {
    let mut allowed: Vec<Vec<usize>> = Vec::with_capacity(d * d);
    let mut covered = vec![false; d];
    for p in 0..d {
        for q in 0..d {
            let mut rs = Vec::new();
            for r in 0..d {
                let fits = diags.iter().zip(scales).all(|(dj, c)| {
                    let target = (dj[p] * c) * (dj[q] * c);
                    (dj[r] * c - target).norm() < FILTER_EPS
                });
                if fits {
                    rs.push(r);
                    covered[r] = true;
                }
            }
            allowed.push(rs);
        }
    }
    let dim_estimate: usize = allowed.iter().map(|rs| rs.len() * d).sum();
    *max_null_dim = (*max_null_dim).max(dim_estimate);
    if allowed.iter().any(|rs| rs.is_empty()) || covered.iter().any(|c| !c) {
        return Ok(None);
    }

    let eye = ComplexMatrix::identity(d);
    let left = kron(basis, basis);
    let right_dag = kron(basis, &eye).dagger();
    for _ in 0..attempts {
        let mut a_eig = ComplexMatrix::zeros(d * d, d * d);
        for p in 0..d {
            for q in 0..d {
                for &r in &allowed[p * d + q] {
                    for s in 0..d {
                        a_eig.set(p * d + q, r * d + s, gaussian(rng));
                    }
                }
            }
        }
        let unit = match polar_unitary(&a_eig) {
            Ok(u) => u,
            Err(_) => continue,
        };
        let a = left.mul(&unit)?.mul(&right_dag)?;
        let report = check_copier_condition(&a, set, tol)?;
        if report.satisfied {
            return Ok(Some(CopierCertificate {
                a,
                blank: canonical_blank(d)?,
                residual: report.max_residual,
                phases: report.phases,
            }));
        }
    }
    Ok(None)
}

/// Dense fallback for families whose quotients do not commute but pass the
/// trace obstructions: vectorize `(T~ (x) T~) X = X (T~ (x) I)` for all
/// members and intersect the nullspaces.
#[allow(clippy::too_many_arguments)]
fn solve_dense(
    set: &CopiedSet,
    tail: &[&ComplexMatrix],
    scales: &[Complex64],
    d: usize,
    tol: &Tolerance,
    attempts: usize,
    rng: &mut ChaCha8Rng,
    max_null_dim: &mut usize,
) -> Result<Option<CopierCertificate>, CoreError> {
    let dd = d * d;
    let eye_local = ComplexMatrix::identity(d);
    let eye_big = ComplexMatrix::identity(dd);
    let mut maps = Vec::with_capacity(tail.len());
    for (t, c) in tail.iter().zip(scales) {
        let scaled = t.scale(*c);
        let lhs = kron(&kron(&scaled, &scaled), &eye_big);
        let rhs = kron(&eye_big, &kron(&scaled, &eye_local).transpose());
        maps.push(lhs.sub(&rhs)?);
    }
    let map_refs: Vec<&ComplexMatrix> = maps.iter().collect();
    let null = common_nullspace(&map_refs)?;
    *max_null_dim = (*max_null_dim).max(null.len());
    if null.is_empty() {
        return Ok(None);
    }
    for _ in 0..attempts {
        let mut flat = vec![Complex64::new(0.0, 0.0); dd * dd];
        for basis_vec in &null {
            let w = gaussian(rng);
            for (slot, value) in flat.iter_mut().zip(basis_vec) {
                *slot += w * value;
            }
        }
        let a0 = ComplexMatrix::new(dd, dd, flat)?;
        let unit = match polar_unitary(&a0) {
            Ok(u) => u,
            Err(_) => continue,
        };
        let report = check_copier_condition(&unit, set, tol)?;
        if report.satisfied {
            return Ok(Some(CopierCertificate {
                a: unit,
                blank: canonical_blank(d)?,
                residual: report.max_residual,
                phases: report.phases,
            }));
        }
    }
    Ok(None)
}

/// Structured machine family: `A = sum_{a,b,c} xi^a_{b,c} |a-c>|c><a|<b|`
/// (index arithmetic modulo the dimension). Each fixed-`a` slice, read as a
/// matrix from `b` to `c`, must be unitary; that makes `A` itself unitary,
/// and every such machine copies the full clock family.
#[derive(Clone, Debug)]
pub struct XiTensor {
    dim: usize,
    /// slices[a] holds the matrix with entry (c, b) = xi^a_{b,c}.
    slices: Vec<ComplexMatrix>,
}

impl XiTensor {
    /// The controlled-subtract machine: `xi^a_{b,c} = delta_{b,c}`, sending
    /// `|a>|b>` to `|a-b>|b>`.
    pub fn delta(dim: usize) -> Self {
        Self {
            dim,
            slices: (0..dim).map(|_| ComplexMatrix::identity(dim)).collect(),
        }
    }

    /// Slices set to the discrete Fourier matrix; a genuinely complex member
    /// of the family, useful as a second reference machine.
    pub fn fourier(dim: usize) -> Self {
        let root = crate::weyl::PhaseRoot::new(dim);
        let norm = 1.0 / libm::sqrt(dim as f64);
        let f = ComplexMatrix::from_fn(dim, dim, |c, b| root.pow((c * b) as i64) * norm);
        Self {
            dim,
            slices: (0..dim).map(|_| f.clone()).collect(),
        }
    }

    pub fn from_slices(slices: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<Self, CoreError> {
        if slices.is_empty() {
            return Err(CoreError::InvalidInput("need one slice per basis label".into()));
        }
        let dim = slices.len();
        for (a, s) in slices.iter().enumerate() {
            if s.rows != dim || s.cols != dim {
                return Err(CoreError::DimensionMismatch(format!(
                    "slice {a} is {}x{}, expected {dim}x{dim}",
                    s.rows, s.cols
                )));
            }
            if !s.is_unitary(tol) {
                return Err(CoreError::InvalidInput(format!("slice {a} is not unitary")));
            }
        }
        Ok(Self { dim, slices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficient `xi^a_{b,c}`.
    pub fn get(&self, a: usize, b: usize, c: usize) -> Complex64 {
        self.slices[a].get(c, b)
    }
}

/// Materializes the machine encoded by a coefficient tensor as a
/// `dim^2 x dim^2` unitary on the composite index `a*dim + b`.
pub fn build_copier(xi: &XiTensor) -> ComplexMatrix {
    let d = xi.dim();
    let mut a_mat = ComplexMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let row = ((a + d - c) % d) * d + c;
                let col = a * d + b;
                let cur = a_mat.get(row, col);
                a_mat.set(row, col, cur + xi.get(a, b, c));
            }
        }
    }
    a_mat
}

/// Applies a two-wire operator to wires `w1`, `w2` (0-based, row-major
/// strides) of a four-wire pure state with uniform local dimension.
fn apply_two_wire_op(state: &mut [Complex64], op: &ComplexMatrix, d: usize, w1: usize, w2: usize) {
    let strides = [d * d * d, d * d, d, 1];
    let others: Vec<usize> = (0..4).filter(|w| *w != w1 && *w != w2).collect();
    let mut gathered = vec![Complex64::new(0.0, 0.0); d * d];
    for o1 in 0..d {
        for o2 in 0..d {
            let base = o1 * strides[others[0]] + o2 * strides[others[1]];
            for x1 in 0..d {
                for x2 in 0..d {
                    gathered[x1 * d + x2] = state[base + x1 * strides[w1] + x2 * strides[w2]];
                }
            }
            let image = op.mul_vec(&gathered).expect("operator matches wire pair");
            for x1 in 0..d {
                for x2 in 0..d {
                    state[base + x1 * strides[w1] + x2 * strides[w2]] = image[x1 * d + x2];
                }
            }
        }
    }
}

/// Runs the copying protocol wire by wire and reports the squared overlap
/// with the ideal double copy for every member.
///
/// Wires: 0 and 1 carry the state to copy (sender and receiver half), 2 and
/// 3 carry the blank. The machine acts on wires (0,2); its entrywise
/// conjugate acts on wires (1,3). The family is reduced to quotient form
/// first, matching the machines produced by [`solve_copier`].
pub fn simulate_copy(
    a: &ComplexMatrix,
    set: &CopiedSet,
    blank: &BipartiteState,
) -> Result<Vec<f64>, CoreError> {
    let d = set.dim();
    if a.rows != d * d || a.cols != d * d {
        return Err(CoreError::DimensionMismatch(format!(
            "machine must be {0}x{0} for local dimension {d}",
            d * d
        )));
    }
    if blank.dim_a != d || blank.dim_b != d {
        return Err(CoreError::DimensionMismatch(
            "blank must be a two-qudit state of the family dimension".into(),
        ));
    }
    let fundamental = reduce_to_fundamental(set)?;
    let a_conj = a.conj();
    let norm = 1.0 / libm::sqrt(d as f64);
    let mut fidelities = Vec::with_capacity(set.len());
    for j in 0..set.len() {
        let t = fundamental.op(j);
        // state[i0,i1,i2,i3] = member[i0,i1] * blank[i2,i3].
        let mut state = vec![Complex64::new(0.0, 0.0); d * d * d * d];
        for i0 in 0..d {
            for i1 in 0..d {
                let amp = t.get(i0, i1) * norm;
                if amp.norm() == 0.0 {
                    continue;
                }
                for i2 in 0..d {
                    for i3 in 0..d {
                        state[i0 * d * d * d + i1 * d * d + i2 * d + i3] =
                            amp * blank.amplitude(i2, i3);
                    }
                }
            }
        }
        apply_two_wire_op(&mut state, a, d, 0, 2);
        apply_two_wire_op(&mut state, &a_conj, d, 1, 3);
        // Ideal output: the member on wires (0,1) and again on wires (2,3).
        let mut overlap = Complex64::new(0.0, 0.0);
        for i0 in 0..d {
            for i1 in 0..d {
                let first = t.get(i0, i1) * norm;
                if first.norm() == 0.0 {
                    continue;
                }
                for i2 in 0..d {
                    for i3 in 0..d {
                        let target = first * t.get(i2, i3) * norm;
                        overlap += target.conj()
                            * state[i0 * d * d * d + i1 * d * d + i2 * d + i3];
                    }
                }
            }
        }
        fidelities.push(overlap.norm_sqr());
    }
    Ok(fidelities)
}
