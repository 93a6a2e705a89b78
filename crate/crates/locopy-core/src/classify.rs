//! Structural classification of copiable families and shared Schmidt
//! decompositions.
//!
//! A family of maximally entangled states is copiable exactly when, after
//! dividing out the first member, the remaining unitaries become clock
//! powers in one shared eigenbasis (member phases are unphysical and are
//! searched over). [`classify_copiable`] reconstructs that basis and the
//! exponent of every member, or reports why none exists. The companion
//! checks work on the state side: [`ssd_canonical`] decides the index-line
//! condition for canonical families and backs every positive answer with a
//! verified pair of shared Schmidt bases, and [`ssd_general`] attempts the
//! same witness for arbitrary maximally entangled states.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::copier::{reduce_to_fundamental, CopiedSet, XiTensor};
use crate::error::CoreError;
use crate::linalg::simultaneous_diagonalize;
use crate::matrix::{ComplexMatrix, Tolerance};
use crate::state::BipartiteState;
use crate::weyl::{weyl_op, BellIndex, PhaseRoot};

/// Eigenvalue matching tolerance for the structural searches. Loose on
/// purpose: every positive answer is re-verified at working precision.
const MATCH_EPS: f64 = 1e-6;

/// Residual bound a reconstructed witness or basis must meet to count as
/// verified.
const VERIFY_EPS: f64 = 1e-8;

/// Cap on label-assignment combinations in the degenerate-spectrum search.
const SEARCH_BUDGET: usize = 20_000;

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    /// True when the spectrum consists of all M-th roots of unity for some
    /// M dividing the dimension, each with multiplicity dim/M.
    pub holds: bool,
    /// The matching root order M, when one exists.
    pub order: Option<usize>,
}

/// Literal spectrum test on a unitary: no rescaling is applied, the
/// eigenvalues themselves must form a full set of M-th roots of unity with
/// uniform multiplicity. Clock powers pass; generic unitaries do not.
pub fn spectrum_condition(u: &ComplexMatrix, tol: &Tolerance) -> Result<SpectrumReport, CoreError> {
    if !u.is_square() {
        return Err(CoreError::DimensionMismatch("spectrum test needs a square matrix".into()));
    }
    if !u.is_unitary(&Tolerance { eps: tol.eps.max(1e-9) * 100.0 }) {
        return Err(CoreError::InvalidInput("spectrum test needs a unitary matrix".into()));
    }
    let d = u.rows;
    let (_, diags) = simultaneous_diagonalize(&[u], 0x5eed)?;
    let eigs = &diags[0];
    for m in 1..=d {
        if d % m != 0 {
            continue;
        }
        let root = PhaseRoot::new(m);
        let mut template = Vec::with_capacity(d);
        for k in 0..m {
            for _ in 0..(d / m) {
                template.push(root.pow(k as i64));
            }
        }
        if multiset_matches(eigs, &template) {
            return Ok(SpectrumReport {
                holds: true,
                order: Some(m),
            });
        }
    }
    Ok(SpectrumReport {
        holds: false,
        order: None,
    })
}

fn multiset_matches(a: &[Complex64], b: &[Complex64]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    for x in a {
        let mut matched = false;
        for (k, y) in b.iter().enumerate() {
            if !used[k] && (x - y).norm() < MATCH_EPS {
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

#[derive(Clone, Debug)]
pub struct ClassificationVerdict {
    pub copiable: bool,
    /// Joint eigenbasis in which every reduced member is a clock power,
    /// relabeled so the exponent pattern is literal.
    pub basis: Option<ComplexMatrix>,
    /// Clock exponent of each reduced member (first member always 0).
    pub exponents: Option<Vec<usize>>,
    pub reason: String,
    /// Set on negative verdicts whose supporting argument is only a proof
    /// at prime dimension, and on budget-limited searches.
    pub caveat: Option<String>,
}

/// Decides whether the family is a relabeled, rephased clock-power family,
/// which is the structure copiable families must have. Positive verdicts
/// come with the reconstructed basis and exponents, verified to
/// [`VERIFY_EPS`]; negative verdicts explain the obstruction.
pub fn classify_copiable(
    set: &CopiedSet,
    tol: &Tolerance,
    seed: u64,
) -> Result<ClassificationVerdict, CoreError> {
    let verify_eps = VERIFY_EPS.max(10.0 * tol.eps);
    let d = set.dim();
    let fundamental = reduce_to_fundamental(set)?;
    let n = fundamental.len();
    if n == 1 {
        return Ok(ClassificationVerdict {
            copiable: true,
            basis: Some(ComplexMatrix::identity(d)),
            exponents: Some(vec![0]),
            reason: "single-member family; any basis works".into(),
            caveat: None,
        });
    }

    let tail: Vec<&ComplexMatrix> = (1..n).map(|j| fundamental.op(j)).collect();
    let joint = match simultaneous_diagonalize(&tail, seed) {
        Ok(j) => j,
        Err(CoreError::ConvergenceFailure(_)) => {
            return Ok(ClassificationVerdict {
                copiable: false,
                basis: None,
                exponents: None,
                reason: "reduced members do not commute, so no shared eigenbasis exists".into(),
                caveat: composite_caveat(d),
            });
        }
        Err(e) => return Err(e),
    };
    let (basis, tail_diags) = joint;

    // Diagonals for all members including the leading identity.
    let mut diags: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    diags.push(vec![Complex64::new(1.0, 0.0); d]);
    diags.extend(tail_diags);

    // Fast path: a member with d distinct eigenvalues pins the labeling up
    // to the choice of which position carries label 0.
    let full_idx = diags.iter().position(|dj| {
        let mut distinct: Vec<Complex64> = Vec::new();
        for e in dj {
            if !distinct.iter().any(|x| (x - e).norm() < MATCH_EPS) {
                distinct.push(*e);
            }
        }
        distinct.len() == d
    });

    let assignment = match full_idx {
        Some(g) => label_by_generator(&diags, g, d),
        None => label_by_search(&diags, d),
    };

    let (labels, exponents) = match assignment {
        Ok(Some(a)) => a,
        Ok(None) => {
            return Ok(ClassificationVerdict {
                copiable: false,
                basis: None,
                exponents: None,
                reason: "no phase and label assignment turns the members into clock powers".into(),
                caveat: composite_caveat(d),
            });
        }
        Err(budget) => {
            return Ok(ClassificationVerdict {
                copiable: false,
                basis: None,
                exponents: None,
                reason: format!("label search budget of {budget} assignments exhausted"),
                caveat: Some("the search stopped early; this verdict is not exhaustive".into()),
            });
        }
    };

    // Permute basis columns so position p carries label labels[p].
    let mut w = ComplexMatrix::zeros(d, d);
    for p in 0..d {
        for i in 0..d {
            w.set(i, labels[p], basis.get(i, p));
        }
    }

    // Verification: every reduced member must equal a clock power in the
    // relabeled basis, up to one overall phase fitted per member.
    let root = PhaseRoot::new(d);
    let mut residual = 0.0f64;
    for (j, s) in exponents.iter().enumerate() {
        let m = w.dagger().mul(fundamental.op(j))?.mul(&w)?;
        let phase = {
            let raw = m.get(0, 0);
            if raw.norm() > 1e-12 {
                raw / raw.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        };
        let expected = ComplexMatrix::from_fn(d, d, |i, k| {
            if i == k {
                root.pow((*s * i) as i64) * phase
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        residual = residual.max(m.max_abs_diff(&expected));
    }
    if residual > verify_eps {
        return Ok(ClassificationVerdict {
            copiable: false,
            basis: None,
            exponents: None,
            reason: format!(
                "candidate labeling failed verification with residual {residual:.3e}"
            ),
            caveat: composite_caveat(d),
        });
    }

    Ok(ClassificationVerdict {
        copiable: true,
        basis: Some(w),
        exponents: Some(exponents),
        reason: "members are clock powers in the returned basis".into(),
        caveat: None,
    })
}

fn composite_caveat(d: usize) -> Option<String> {
    if is_prime(d) {
        None
    } else {
        Some(
            "composite local dimension: the structural argument behind negative verdicts is only a proof at prime dimension"
                .into(),
        )
    }
}

fn is_prime(d: usize) -> bool {
    if d < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= d {
        if d % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

type Labeling = (Vec<usize>, Vec<usize>);

/// Labeling driven by a full-spectrum member `g`: choosing which position
/// carries label 0 fixes everything else, giving at most `d` candidates.
fn label_by_generator(
    diags: &[Vec<Complex64>],
    g: usize,
    d: usize,
) -> Result<Option<Labeling>, usize> {
    let root = PhaseRoot::new(d);
    'positions: for p0 in 0..d {
        let cg = diags[g][p0].conj();
        let mut labels = vec![0usize; d];
        let mut taken = vec![false; d];
        for p in 0..d {
            let v = cg * diags[g][p];
            let Some(k) = root_index(v, d) else {
                continue 'positions;
            };
            if taken[k] {
                continue 'positions;
            }
            taken[k] = true;
            labels[p] = k;
        }
        // Position carrying label 1, used to read off each exponent.
        let p1 = labels.iter().position(|&k| k == 1).expect("full labeling");
        let mut exponents = Vec::with_capacity(diags.len());
        let mut all_fit = true;
        for dj in diags {
            let cj = dj[p0].conj();
            let Some(s) = root_index(cj * dj[p1], d) else {
                all_fit = false;
                break;
            };
            for p in 0..d {
                let expect = root.pow((s * labels[p]) as i64);
                if (cj * dj[p] - expect).norm() > MATCH_EPS {
                    all_fit = false;
                    break;
                }
            }
            if !all_fit {
                break;
            }
            exponents.push(s);
        }
        if all_fit {
            return Ok(Some((labels, exponents)));
        }
    }
    Ok(None)
}

/// Fallback for families whose members all have degenerate spectra: per
/// member, enumerate (rescaling, exponent) pairs consistent with its
/// spectrum, then find one position-to-label bijection compatible with all
/// members at once.
fn label_by_search(diags: &[Vec<Complex64>], d: usize) -> Result<Option<Labeling>, usize> {
    let root = PhaseRoot::new(d);
    // Candidate (scale, exponent, allowed labels per position) per member;
    // the leading identity member is pinned to exponent 0.
    struct Candidate {
        exponent: usize,
        allowed: Vec<Vec<usize>>,
    }
    let mut per_member: Vec<Vec<Candidate>> = Vec::with_capacity(diags.len());
    for (j, dj) in diags.iter().enumerate() {
        let mut distinct: Vec<Complex64> = Vec::new();
        for e in dj {
            if !distinct.iter().any(|x| (x - e).norm() < MATCH_EPS) {
                distinct.push(*e);
            }
        }
        let mut cands = Vec::new();
        let exponent_range: Vec<usize> = if j == 0 { vec![0] } else { (0..d).collect() };
        for lambda in &distinct {
            let c = lambda.conj();
            for &s in &exponent_range {
                let template: Vec<Complex64> = (0..d).map(|k| root.pow((s * k) as i64)).collect();
                let scaled: Vec<Complex64> = dj.iter().map(|e| c * e).collect();
                if !multiset_matches(&scaled, &template) {
                    continue;
                }
                let allowed: Vec<Vec<usize>> = scaled
                    .iter()
                    .map(|v| {
                        (0..d)
                            .filter(|&k| (v - root.pow((s * k) as i64)).norm() < MATCH_EPS)
                            .collect()
                    })
                    .collect();
                cands.push(Candidate {
                    exponent: s,
                    allowed,
                });
            }
        }
        if cands.is_empty() {
            return Ok(None);
        }
        per_member.push(cands);
    }

    let total: usize = per_member.iter().map(|c| c.len()).try_fold(1usize, |acc, k| {
        acc.checked_mul(k).filter(|v| *v <= SEARCH_BUDGET)
    }).ok_or(SEARCH_BUDGET)?;
    let _ = total;

    let mut combo = vec![0usize; per_member.len()];
    loop {
        // Intersect allowed labels across members, then match positions to
        // labels one-to-one.
        let mut allowed: Vec<Vec<usize>> = (0..d).map(|_| (0..d).collect()).collect();
        for (j, &ci) in combo.iter().enumerate() {
            let cand = &per_member[j][ci];
            for p in 0..d {
                allowed[p].retain(|k| cand.allowed[p].contains(k));
            }
        }
        if allowed.iter().all(|a| !a.is_empty()) {
            if let Some(labels) = perfect_matching(&allowed, d) {
                let exponents = combo
                    .iter()
                    .enumerate()
                    .map(|(j, &ci)| per_member[j][ci].exponent)
                    .collect();
                return Ok(Some((labels, exponents)));
            }
        }
        let mut pos = 0usize;
        loop {
            if pos == combo.len() {
                return Ok(None);
            }
            combo[pos] += 1;
            if combo[pos] < per_member[pos].len() {
                break;
            }
            combo[pos] = 0;
            pos += 1;
        }
    }
}

fn root_index(v: Complex64, d: usize) -> Option<usize> {
    let root = PhaseRoot::new(d);
    let angle = v.arg();
    let k = libm::round(angle * d as f64 / (2.0 * core::f64::consts::PI)) as i64;
    let k = k.rem_euclid(d as i64) as usize;
    if (v - root.pow(k as i64)).norm() < MATCH_EPS {
        Some(k)
    } else {
        None
    }
}

/// Backtracking bijection search: assign each position a label from its
/// allowed list without reuse.
fn perfect_matching(allowed: &[Vec<usize>], d: usize) -> Option<Vec<usize>> {
    fn go(
        order: &[usize],
        allowed: &[Vec<usize>],
        taken: &mut [bool],
        labels: &mut [usize],
        depth: usize,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let p = order[depth];
        for &k in &allowed[p] {
            if !taken[k] {
                taken[k] = true;
                labels[p] = k;
                if go(order, allowed, taken, labels, depth + 1) {
                    return true;
                }
                taken[k] = false;
            }
        }
        false
    }
    // Most-constrained positions first keeps the tree small.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by_key(|&p| allowed[p].len());
    let mut taken = vec![false; d];
    let mut labels = vec![0usize; d];
    if go(&order, allowed, &mut taken, &mut labels, 0) {
        Some(labels)
    } else {
        None
    }
}

#[derive(Clone, Debug)]
pub struct DiagonalityReport {
    /// True when the unit-phase copier equations hold entrywise for the
    /// given machine coefficients.
    pub satisfies: bool,
    pub is_diagonal: bool,
    pub max_violation: f64,
    pub max_off_diagonal: f64,
}

/// Entrywise test of the copier equations for a structured machine: with
/// `Xi^{A,A'} = M^A (M^{A'})^dag` built from the machine slices, a copied
/// operator must satisfy
/// `Xi^{u+v, r+s}[v, s] * U[u+v, r+s] = U[u, r] * U[v, s]`
/// for all indices (sums mod dim). The equations force every solution
/// except the zero matrix to be diagonal; this function measures how far a
/// given matrix is from satisfying them, at unit phase. Arbitrary matrices
/// are accepted so the forcing claim itself can be tested.
pub fn verify_diagonality(
    u: &ComplexMatrix,
    xi: &XiTensor,
    tol: &Tolerance,
) -> Result<DiagonalityReport, CoreError> {
    let d = xi.dim();
    if u.rows != d || u.cols != d {
        return Err(CoreError::DimensionMismatch(format!(
            "matrix is {}x{}, machine expects {d}x{d}",
            u.rows, u.cols
        )));
    }

    // Xi[a][a'] with entry (v, s) = sum_b xi^a_{b,v} conj(xi^{a'}_{b,s}).
    let mut xi_products: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(d);
    for a in 0..d {
        let mut row = Vec::with_capacity(d);
        for a2 in 0..d {
            let m = ComplexMatrix::from_fn(d, d, |v, s| {
                (0..d).map(|b| xi.get(a, b, v) * xi.get(a2, b, s).conj()).sum()
            });
            row.push(m);
        }
        xi_products.push(row);
    }

    let mut max_violation = 0.0f64;
    for uu in 0..d {
        for v in 0..d {
            for r in 0..d {
                for s in 0..d {
                    let a = (uu + v) % d;
                    let a2 = (r + s) % d;
                    let lhs = xi_products[a][a2].get(v, s) * u.get(a, a2);
                    let rhs = u.get(uu, r) * u.get(v, s);
                    max_violation = max_violation.max((lhs - rhs).norm());
                }
            }
        }
    }

    let mut max_off = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                max_off = max_off.max(u.get(i, j).norm());
            }
        }
    }

    Ok(DiagonalityReport {
        satisfies: max_violation <= 10.0 * tol.eps,
        is_diagonal: max_off <= 10.0 * tol.eps,
        max_violation,
        max_off_diagonal: max_off,
    })
}

/// A verified pair of shared Schmidt bases for a family of maximally
/// entangled states: every member equals
/// `sum_k coefficients[member][k] / sqrt(d) |e_k>|f_k>` with unit-modulus
/// coefficients.
#[derive(Clone, Debug)]
pub struct SchmidtWitness {
    pub basis_e: ComplexMatrix,
    pub basis_f: ComplexMatrix,
    pub coefficients: Vec<Vec<Complex64>>,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct SsdCanonicalReport {
    /// First (p, q, r) with p*n + q*m = r mod dim across all labels, if any.
    pub condition_triple: Option<(usize, usize, usize)>,
    /// (f, g) with m = f*n + g mod dim for all labels, when q is invertible.
    pub line_params: Option<(usize, usize)>,
    /// True when a shared-basis witness was constructed and checked.
    pub verified: bool,
    pub witness: Option<SchmidtWitness>,
    pub caveat: Option<String>,
}

/// Index-line test for canonical maximally entangled states: the labels
/// (n, m) must satisfy one linear relation p*n + q*m = r mod dim. Every
/// positive answer is backed by an explicit shared Schmidt pair; at
/// composite dimension the relation can hold while no shared pair exists,
/// which is reported as unverified with a caveat.
pub fn ssd_canonical(
    dim: usize,
    indices: &[(usize, usize)],
    tol: &Tolerance,
) -> Result<SsdCanonicalReport, CoreError> {
    if indices.is_empty() {
        return Err(CoreError::InvalidInput("empty index list".into()));
    }
    let mut seen = vec![false; dim * dim];
    for &(n, m) in indices {
        BellIndex::new(n, m, dim)?;
        if seen[n * dim + m] {
            return Err(CoreError::InvalidInput(format!("duplicate label ({n}, {m})")));
        }
        seen[n * dim + m] = true;
    }

    let mut triple = None;
    'outer: for p in 0..dim {
        for q in 0..dim {
            if p == 0 && q == 0 {
                continue;
            }
            let r0 = (p * indices[0].0 + q * indices[0].1) % dim;
            if indices.iter().all(|&(n, m)| (p * n + q * m) % dim == r0) {
                triple = Some((p, q, r0));
                break 'outer;
            }
        }
    }

    let Some((p, q, r)) = triple else {
        return Ok(SsdCanonicalReport {
            condition_triple: None,
            line_params: None,
            verified: false,
            witness: None,
            caveat: None,
        });
    };

    let line_params = mod_inverse(q, dim).map(|qi| (((dim - p) % dim * qi) % dim, (r * qi) % dim));

    // Witness attempt: shared row basis from the member quotients, shared
    // column basis from the first member.
    let coeff_mats: Vec<ComplexMatrix> = indices
        .iter()
        .map(|&(n, m)| weyl_op(n, m, dim).scale(Complex64::new(1.0 / libm::sqrt(dim as f64), 0.0)))
        .collect();
    let witness = witness_from_quotients(&coeff_mats, dim, 0xD1A6, tol);

    match witness {
        Some(w) => Ok(SsdCanonicalReport {
            condition_triple: Some((p, q, r)),
            line_params,
            verified: true,
            witness: Some(w),
            caveat: None,
        }),
        None => Ok(SsdCanonicalReport {
            condition_triple: Some((p, q, r)),
            line_params,
            verified: false,
            witness: None,
            caveat: Some(
                "the index relation holds but no shared Schmidt pair verified; at composite dimension the relation alone does not decide"
                    .into(),
            ),
        }),
    }
}

fn mod_inverse(a: usize, modulus: usize) -> Option<usize> {
    if modulus <= 1 {
        return None;
    }
    let (mut old_r, mut r) = (a as i64, modulus as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(modulus as i64) as usize)
}

#[derive(Clone, Debug)]
pub struct SsdGeneralReport {
    pub holds: bool,
    pub witness: Option<SchmidtWitness>,
    pub reason: String,
}

/// Shared Schmidt decomposition test for arbitrary maximally entangled
/// states: diagonalizes the member quotients in one basis and verifies the
/// resulting witness. Deterministic for a fixed seed.
pub fn ssd_general(
    states: &[BipartiteState],
    tol: &Tolerance,
    seed: u64,
) -> Result<SsdGeneralReport, CoreError> {
    if states.is_empty() {
        return Err(CoreError::InvalidInput("no states given".into()));
    }
    let d = states[0].dim_a;
    for (i, st) in states.iter().enumerate() {
        if st.dim_a != d || st.dim_b != d {
            return Err(CoreError::DimensionMismatch(format!(
                "state {i} has local dimensions {}x{}, expected {d}x{d}",
                st.dim_a, st.dim_b
            )));
        }
        let scaled = st.coefficient_matrix().scale(Complex64::new(libm::sqrt(d as f64), 0.0));
        if !scaled.is_unitary(&Tolerance { eps: 1e-7 }) {
            return Err(CoreError::InvalidInput(format!(
                "state {i} is not maximally entangled"
            )));
        }
    }

    let coeff_mats: Vec<ComplexMatrix> = states.iter().map(|s| s.coefficient_matrix()).collect();
    for attempt in 0..3u64 {
        if let Some(w) = witness_from_quotients(&coeff_mats, d, seed.wrapping_add(attempt), tol) {
            return Ok(SsdGeneralReport {
                holds: true,
                witness: Some(w),
                reason: "all members share the returned Schmidt bases".into(),
            });
        }
    }
    Ok(SsdGeneralReport {
        holds: false,
        witness: None,
        reason: "member quotients admit no shared eigenbasis, so no common Schmidt pair exists"
            .into(),
    })
}

/// Shared-basis witness: row basis E from simultaneously diagonalizing the
/// quotients `d * C_a C_0^dag`, column basis F read off the first member,
/// then every member re-checked against `C_a = E D_a F^T`.
fn witness_from_quotients(
    coeff_mats: &[ComplexMatrix],
    d: usize,
    seed: u64,
    tol: &Tolerance,
) -> Option<SchmidtWitness> {
    let accept_eps = (VERIFY_EPS * 10.0).max(100.0 * tol.eps);
    let sqrt_d = libm::sqrt(d as f64);
    let basis_e = if coeff_mats.len() == 1 {
        // Single member: any eigenbasis of its quotient (the identity)
        // works; use the computational basis.
        ComplexMatrix::identity(d)
    } else {
        let anchor_dag = coeff_mats[0].dagger();
        let quotients: Vec<ComplexMatrix> = coeff_mats[1..]
            .iter()
            .map(|c| c.mul(&anchor_dag).expect("validated dims").scale(Complex64::new(d as f64, 0.0)))
            .collect();
        let refs: Vec<&ComplexMatrix> = quotients.iter().collect();
        match simultaneous_diagonalize(&refs, seed) {
            Ok((basis, _)) => basis,
            Err(_) => return None,
        }
    };

    // F^T = sqrt(d) * E^dag C_0, valid when its rows are orthonormal.
    let s0 = basis_e.dagger().mul(&coeff_mats[0]).ok()?;
    let f_t = s0.scale(Complex64::new(sqrt_d, 0.0));
    let basis_f = f_t.transpose();
    if !basis_f.is_unitary(&Tolerance { eps: 1e-7 }) {
        return None;
    }

    let f_conj = basis_f.conj();
    let mut coefficients = Vec::with_capacity(coeff_mats.len());
    let mut residual = 0.0f64;
    for c in coeff_mats {
        let diag = basis_e.dagger().mul(c).ok()?.mul(&f_conj).ok()?;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    residual = residual.max(diag.get(i, j).norm() * sqrt_d);
                }
            }
        }
        let mut row = Vec::with_capacity(d);
        for k in 0..d {
            let v = diag.get(k, k) * sqrt_d;
            residual = residual.max((v.norm() - 1.0).abs());
            row.push(v);
        }
        coefficients.push(row);
    }
    if residual > accept_eps {
        return None;
    }
    Some(SchmidtWitness {
        basis_e,
        basis_f,
        coefficients,
        residual,
    })
}
