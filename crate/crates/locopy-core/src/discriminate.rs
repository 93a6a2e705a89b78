//! One-way local discrimination of maximally entangled states and the
//! separable-measurement bound that limits it.
//!
//! Two tools live here. [`povm_bound_check`] verifies, for measurements
//! built from local product terms, that no element can respond to a
//! maximally entangled state with more than `Tr(M)/dim` probability; that
//! bound is what caps the number of perfectly distinguishable states at the
//! local dimension. [`build_transfer_channel`] and its simulators implement
//! the sender-measures-then-receiver-corrects protocol that reduces
//! discrimination of a family with a shared Schmidt pair to a local
//! measurement on the receiver side. The channel constructor exposes two
//! index conventions for the sender's measurement family, because the two
//! appear interchangeably in transcriptions and only one of them resolves
//! the identity beyond dimension 2.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::ssd_canonical;
use crate::error::CoreError;
use crate::linalg::{hermitian_eigen, polar_unitary};
use crate::matrix::{kron, ComplexMatrix, Tolerance};
use crate::state::{fidelity_pure, BipartiteState};
use crate::weyl::PhaseRoot;

/// Measurement whose elements are sums of local product terms, so
/// separability holds by construction rather than by claim.
#[derive(Clone, Debug)]
pub struct SeparablePovm {
    dim: usize,
    /// elements[i] is a list of (sender factor, receiver factor) pairs;
    /// the element operator is the sum of their tensor products.
    elements: Vec<Vec<(ComplexMatrix, ComplexMatrix)>>,
}

impl SeparablePovm {
    /// Validates every factor as Hermitian positive semidefinite and the
    /// element sum as a resolution of the identity.
    pub fn from_product_terms(
        dim: usize,
        elements: Vec<Vec<(ComplexMatrix, ComplexMatrix)>>,
        tol: &Tolerance,
    ) -> Result<Self, CoreError> {
        if elements.is_empty() {
            return Err(CoreError::InvalidInput("a measurement needs at least one element".into()));
        }
        for (i, terms) in elements.iter().enumerate() {
            for (t, (a, b)) in terms.iter().enumerate() {
                for (side, m) in [("sender", a), ("receiver", b)] {
                    if m.rows != dim || m.cols != dim {
                        return Err(CoreError::DimensionMismatch(format!(
                            "element {i}, term {t}: {side} factor is {}x{}, expected {dim}x{dim}",
                            m.rows, m.cols
                        )));
                    }
                    if !m.is_hermitian(&Tolerance { eps: 1e-8 }) {
                        return Err(CoreError::InvalidInput(format!(
                            "element {i}, term {t}: {side} factor is not Hermitian"
                        )));
                    }
                    let (vals, _) = hermitian_eigen(m)?;
                    if vals.iter().any(|v| *v < -1e-8) {
                        return Err(CoreError::InvalidInput(format!(
                            "element {i}, term {t}: {side} factor has a negative eigenvalue"
                        )));
                    }
                }
            }
        }
        let povm = Self { dim, elements };
        let residual = povm.completeness_residual();
        if residual > (100.0 * tol.eps).max(1e-8) {
            return Err(CoreError::CompletenessFailure {
                residual,
                context: "measurement elements do not sum to the identity".into(),
            });
        }
        Ok(povm)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Element operator on the joint space, materialized from its terms.
    pub fn element(&self, i: usize) -> ComplexMatrix {
        let dd = self.dim * self.dim;
        let mut sum = ComplexMatrix::zeros(dd, dd);
        for (a, b) in &self.elements[i] {
            sum = sum.add(&kron(a, b)).expect("validated dims");
        }
        sum
    }

    pub fn completeness_residual(&self) -> f64 {
        let dd = self.dim * self.dim;
        let mut total = ComplexMatrix::zeros(dd, dd);
        for i in 0..self.elements.len() {
            total = total.add(&self.element(i)).expect("validated dims");
        }
        total.max_abs_diff(&ComplexMatrix::identity(dd))
    }
}

/// Random complete separable measurement: mixtures of product basis
/// measurements. Each of `basis_count` rounds draws one local basis pair
/// and a weight; the weighted rank-one product projectors are dealt into
/// `element_count` buckets. The bucket sums form the elements, and the
/// total is the identity by construction.
pub fn random_local_mixture_povm(
    dim: usize,
    basis_count: usize,
    element_count: usize,
    seed: u64,
) -> Result<SeparablePovm, CoreError> {
    if dim < 2 || basis_count == 0 || element_count == 0 {
        return Err(CoreError::InvalidInput(
            "need dimension >= 2 and at least one basis and element".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw_weights: Vec<f64> = (0..basis_count).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = raw_weights.iter().sum();
    for w in raw_weights.iter_mut() {
        *w /= total;
    }

    let mut elements: Vec<Vec<(ComplexMatrix, ComplexMatrix)>> = vec![Vec::new(); element_count];
    for &w in &raw_weights {
        let u = random_unitary(dim, &mut rng)?;
        let v = random_unitary(dim, &mut rng)?;
        for k in 0..dim {
            for l in 0..dim {
                let pa = projector_on_column(&u, k).scale(Complex64::new(w, 0.0));
                let pb = projector_on_column(&v, l);
                let bucket = rng.gen_range(0..element_count);
                elements[bucket].push((pa, pb));
            }
        }
    }
    elements.retain(|terms| !terms.is_empty());
    SeparablePovm::from_product_terms(dim, elements, &Tolerance::default())
}

fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> Result<ComplexMatrix, CoreError> {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        let u1: f64 = rng.gen_range(1e-12..1.0);
        let u2: f64 = rng.gen();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let angle = 2.0 * core::f64::consts::PI * u2;
        Complex64::new(r * libm::cos(angle), r * libm::sin(angle))
    });
    polar_unitary(&g)
}

fn projector_on_column(u: &ComplexMatrix, k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(u.rows, u.rows, |i, j| u.get(i, k) * u.get(j, k).conj())
}

#[derive(Clone, Debug)]
pub struct PovmBoundReport {
    pub completeness_residual: f64,
    /// slack[i][j] = Tr(M_i)/dim - <state_j| M_i |state_j>; the bound says
    /// every entry is nonnegative.
    pub slack: Vec<Vec<f64>>,
    pub max_violation: f64,
    pub bound_holds: bool,
}

/// Checks the separable-measurement response bound against the given
/// maximally entangled states. States failing the maximal-entanglement
/// precondition are rejected, because the bound does not apply to them.
pub fn povm_bound_check(
    povm: &SeparablePovm,
    states: &[BipartiteState],
    tol: &Tolerance,
) -> Result<PovmBoundReport, CoreError> {
    if states.is_empty() {
        return Err(CoreError::InvalidInput("no states given".into()));
    }
    let d = povm.dim();
    for (j, st) in states.iter().enumerate() {
        if st.dim_a != d || st.dim_b != d {
            return Err(CoreError::DimensionMismatch(format!(
                "state {j} has local dimensions {}x{}, measurement expects {d}x{d}",
                st.dim_a, st.dim_b
            )));
        }
        let scaled = st.coefficient_matrix().scale(Complex64::new(libm::sqrt(d as f64), 0.0));
        if !scaled.is_unitary(&Tolerance { eps: 1e-8 }) {
            return Err(CoreError::InvalidInput(format!(
                "state {j} is not maximally entangled, the bound does not apply"
            )));
        }
    }

    let mut slack = Vec::with_capacity(povm.len());
    let mut max_violation = 0.0f64;
    for i in 0..povm.len() {
        let m = povm.element(i);
        let cap = m.trace().re / d as f64;
        let mut row = Vec::with_capacity(states.len());
        for st in states {
            let response = fidelity_pure(st, &m)?;
            let s = cap - response;
            max_violation = max_violation.max(-s);
            row.push(s);
        }
        slack.push(row);
    }
    Ok(PovmBoundReport {
        completeness_residual: povm.completeness_residual(),
        slack,
        max_violation: max_violation.max(0.0),
        bound_holds: max_violation <= 10.0 * tol.eps,
    })
}

/// Index convention for the sender's measurement family in the transfer
/// protocol. `ChiM` is the sender ket `sum_k w^{mk} |e_k> / sqrt(d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransferConvention {
    /// Measurement operators `|chi_m><chi_{-m}|`, transcribing the summand
    /// index as printed. Beyond dimension 2 these do not resolve the
    /// identity: they sum to the index-flip permutation instead.
    Literal,
    /// Measurement operators `|chi_m><chi_m|`: the bra carries the
    /// conjugated coefficients, giving a genuine projective measurement.
    ConjugatedBra,
}

/// Channel in operator-sum form. Completeness is validated on construction.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    pub input_dim: usize,
    pub output_dim: usize,
    pub ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(
        ops: Vec<ComplexMatrix>,
        input_dim: usize,
        output_dim: usize,
        tol: &Tolerance,
    ) -> Result<Self, CoreError> {
        if ops.is_empty() {
            return Err(CoreError::InvalidInput("a channel needs at least one operator".into()));
        }
        let mut sum = ComplexMatrix::zeros(input_dim, input_dim);
        for (m, f) in ops.iter().enumerate() {
            if f.rows != output_dim || f.cols != input_dim {
                return Err(CoreError::DimensionMismatch(format!(
                    "operator {m} is {}x{}, expected {output_dim}x{input_dim}",
                    f.rows, f.cols
                )));
            }
            sum = sum.add(&f.dagger().mul(f)?)?;
        }
        let residual = sum.max_abs_diff(&ComplexMatrix::identity(input_dim));
        if residual > (100.0 * tol.eps).max(1e-8) {
            return Err(CoreError::CompletenessFailure {
                residual,
                context: "operator-sum completeness failed".into(),
            });
        }
        Ok(Self {
            input_dim,
            output_dim,
            ops,
        })
    }

    /// Applies the channel to a density operator.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix, CoreError> {
        if rho.rows != self.input_dim || rho.cols != self.input_dim {
            return Err(CoreError::DimensionMismatch(format!(
                "density operator is {}x{}, channel expects {0}x{0}",
                rho.rows, rho.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.output_dim, self.output_dim);
        for f in &self.ops {
            out = out.add(&f.mul(rho)?.mul(&f.dagger())?)?;
        }
        Ok(out)
    }
}

/// Builds the transfer channel for states sharing the Schmidt pair
/// (basis_e on the sender, basis_f on the receiver).
///
/// The sender measures the family `chi_m`; on outcome m the receiver undoes
/// the resulting phase twist with `sum_k w^{mk} |f_k><f_k|` and coherently
/// rewrites `|f_k>` into `|e_k>|f_k>` on its two qudits. One Kraus operator
/// per outcome maps the shared pair (sender qudit x receiver qudit) to the
/// receiver's two qudits.
///
/// With the literal convention beyond dimension 2 the sender's operators
/// fail to resolve the identity; the constructor refuses with the residual
/// instead of building an unphysical protocol.
pub fn build_transfer_channel(
    dim: usize,
    basis_e: &ComplexMatrix,
    basis_f: &ComplexMatrix,
    convention: TransferConvention,
    tol: &Tolerance,
) -> Result<KrausChannel, CoreError> {
    if dim < 2 {
        return Err(CoreError::InvalidInput("local dimension must be at least 2".into()));
    }
    let unitary_tol = Tolerance { eps: 1e-7 };
    for (name, b) in [("sender basis", basis_e), ("receiver basis", basis_f)] {
        if b.rows != dim || b.cols != dim {
            return Err(CoreError::DimensionMismatch(format!(
                "{name} is {}x{}, expected {dim}x{dim}",
                b.rows, b.cols
            )));
        }
        if !b.is_unitary(&unitary_tol) {
            return Err(CoreError::InvalidInput(format!("{name} is not unitary")));
        }
    }

    let root = PhaseRoot::new(dim);
    let chi = sender_kets(dim, basis_e);

    // Measurement operators per convention, and their completeness.
    let mut meas_sum = ComplexMatrix::zeros(dim, dim);
    let mut bras: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for m in 0..dim {
        let bra_ket = match convention {
            TransferConvention::ConjugatedBra => &chi[m],
            TransferConvention::Literal => &chi[(dim - m % dim) % dim],
        };
        let bra: Vec<Complex64> = bra_ket.iter().map(|c| c.conj()).collect();
        for i in 0..dim {
            for j in 0..dim {
                let cur = meas_sum.get(i, j);
                meas_sum.set(i, j, cur + chi[m][i] * bra[j]);
            }
        }
        bras.push(bra);
    }
    let meas_residual = meas_sum.max_abs_diff(&ComplexMatrix::identity(dim));
    if meas_residual > (100.0 * tol.eps).max(1e-8) {
        return Err(CoreError::CompletenessFailure {
            residual: meas_residual,
            context: "sender measurement operators do not resolve the identity".into(),
        });
    }

    // Receiver isometry |f_k> -> |e_k>|f_k> shared by all outcomes.
    let mut rewrite = ComplexMatrix::zeros(dim * dim, dim);
    for k in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                let cur = rewrite.get(i * dim + j, k);
                rewrite.set(
                    i * dim + j,
                    k,
                    cur + basis_e.get(i, k) * basis_f.get(j, k),
                );
            }
        }
    }
    let rewrite = {
        // Columns of `rewrite` map |k> (f-basis coordinates) to the pair;
        // compose with f-basis analysis to act on computational input.
        rewrite.mul(&basis_f.dagger())?
    };

    let mut ops = Vec::with_capacity(dim);
    for m in 0..dim {
        // Phase correction on the receiver qudit.
        let twist = ComplexMatrix::from_fn(dim, dim, |i, j| {
            (0..dim)
                .map(|k| {
                    basis_f.get(i, k) * root.pow((m * k) as i64) * basis_f.get(j, k).conj()
                })
                .sum()
        });
        let corrected = rewrite.mul(&twist)?;
        // F_m = (rewrite . twist) . (<bra_m| (x) I).
        let mut f_op = ComplexMatrix::zeros(dim * dim, dim * dim);
        for out_row in 0..dim * dim {
            for b1 in 0..dim {
                let base = corrected.get(out_row, b1);
                if base.norm() == 0.0 {
                    continue;
                }
                for a in 0..dim {
                    let cur = f_op.get(out_row, a * dim + b1);
                    f_op.set(out_row, a * dim + b1, cur + base * bras[m][a]);
                }
            }
        }
        ops.push(f_op);
    }
    KrausChannel::new(ops, dim * dim, dim * dim, tol)
}

/// Sender measurement kets `chi_m = sum_k w^{mk} |e_k> / sqrt(dim)` in
/// computational coordinates.
fn sender_kets(dim: usize, basis_e: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    let root = PhaseRoot::new(dim);
    let norm = 1.0 / libm::sqrt(dim as f64);
    (0..dim)
        .map(|m| {
            (0..dim)
                .map(|a| {
                    (0..dim)
                        .map(|k| root.pow((m * k) as i64) * basis_e.get(a, k) * norm)
                        .sum()
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct TransferReport {
    /// Squared overlap between the receiver's two-qudit output (averaged
    /// over outcomes) and the ideal relocated state.
    pub fidelity: f64,
    pub outcome_probabilities: Vec<f64>,
    /// How far the sender's post-protocol state (the outcome-weighted
    /// mixture of its measurement kets) sits from the flat state I/dim.
    pub sender_state_residual: f64,
}

/// Runs the transfer protocol on the state with the given unit-modulus
/// Schmidt coefficients and reports the relocation fidelity.
pub fn simulate_transfer(
    dim: usize,
    basis_e: &ComplexMatrix,
    basis_f: &ComplexMatrix,
    coefficients: &[Complex64],
    convention: TransferConvention,
    tol: &Tolerance,
) -> Result<TransferReport, CoreError> {
    if coefficients.len() != dim {
        return Err(CoreError::DimensionMismatch(format!(
            "need {dim} coefficients, got {}",
            coefficients.len()
        )));
    }
    if coefficients.iter().any(|b| (b.norm() - 1.0).abs() > 1e-7) {
        return Err(CoreError::InvalidInput(
            "coefficients must have unit modulus for a maximally entangled state".into(),
        ));
    }
    let channel = build_transfer_channel(dim, basis_e, basis_f, convention, tol)?;

    let state = shared_state_vector(dim, basis_e, basis_f, coefficients);
    let mut fidelity = 0.0f64;
    let mut probabilities = Vec::with_capacity(dim);
    for f in &channel.ops {
        let image = f.mul_vec(&state)?;
        let p: f64 = image.iter().map(|c| c.norm_sqr()).sum();
        probabilities.push(p);
        // Target in receiver coordinates is numerically the same vector.
        let overlap: Complex64 = state.iter().zip(&image).map(|(t, v)| t.conj() * v).sum();
        fidelity += overlap.norm_sqr();
    }

    // The sender collapses onto chi_m with probability p_m; the protocol
    // leaves it in the corresponding mixture.
    let chi = sender_kets(dim, basis_e);
    let mut sender = ComplexMatrix::zeros(dim, dim);
    for (m, &p) in probabilities.iter().enumerate() {
        for i in 0..dim {
            for j in 0..dim {
                let cur = sender.get(i, j);
                sender.set(i, j, cur + chi[m][i] * chi[m][j].conj() * p);
            }
        }
    }
    let flat = ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0));
    let sender_state_residual = sender.max_abs_diff(&flat);

    Ok(TransferReport {
        fidelity,
        outcome_probabilities: probabilities,
        sender_state_residual,
    })
}

fn shared_state_vector(
    dim: usize,
    basis_e: &ComplexMatrix,
    basis_f: &ComplexMatrix,
    coefficients: &[Complex64],
) -> Vec<Complex64> {
    let norm = 1.0 / libm::sqrt(dim as f64);
    let mut state = vec![Complex64::new(0.0, 0.0); dim * dim];
    for k in 0..dim {
        for a in 0..dim {
            for b in 0..dim {
                state[a * dim + b] +=
                    coefficients[k] * basis_e.get(a, k) * basis_f.get(b, k) * norm;
            }
        }
    }
    state
}

#[derive(Clone, Debug)]
pub struct DiscriminationReport {
    /// s_matrix[sent][decoded]: probability that the receiver's final
    /// measurement lands on target `decoded` when member `sent` was shared.
    pub s_matrix: Vec<Vec<f64>>,
    pub perfect: bool,
    pub reason: String,
}

/// Full one-way discrimination of a canonical family: checks the shared
/// Schmidt precondition, transfers each member to the receiver, and decodes
/// with the projective measurement on the relocated targets. Families
/// without a verified shared pair are reported as not discriminable this
/// way rather than simulated incorrectly.
pub fn simulate_discrimination(
    dim: usize,
    indices: &[(usize, usize)],
    tol: &Tolerance,
) -> Result<DiscriminationReport, CoreError> {
    let ssd = ssd_canonical(dim, indices, tol)?;
    let Some(witness) = ssd.witness else {
        let reason = match ssd.condition_triple {
            Some(t) => format!(
                "index relation {t:?} holds but no shared Schmidt pair verified; the one-way protocol is unavailable"
            ),
            None => "labels satisfy no index relation, so the family has no shared Schmidt pair".into(),
        };
        return Ok(DiscriminationReport {
            s_matrix: Vec::new(),
            perfect: false,
            reason,
        });
    };

    let channel = build_transfer_channel(
        dim,
        &witness.basis_e,
        &witness.basis_f,
        TransferConvention::ConjugatedBra,
        tol,
    )?;

    let n = indices.len();
    let targets: Vec<Vec<Complex64>> = (0..n)
        .map(|beta| {
            shared_state_vector(dim, &witness.basis_e, &witness.basis_f, &witness.coefficients[beta])
        })
        .collect();

    let mut s_matrix = vec![vec![0.0f64; n]; n];
    for alpha in 0..n {
        let input = shared_state_vector(
            dim,
            &witness.basis_e,
            &witness.basis_f,
            &witness.coefficients[alpha],
        );
        for f in &channel.ops {
            let image = f.mul_vec(&input)?;
            for beta in 0..n {
                let overlap: Complex64 = targets[beta]
                    .iter()
                    .zip(&image)
                    .map(|(t, v)| t.conj() * v)
                    .sum();
                s_matrix[alpha][beta] += overlap.norm_sqr();
            }
        }
    }

    let mut max_dev = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let expect = if a == b { 1.0 } else { 0.0 };
            max_dev = max_dev.max((s_matrix[a][b] - expect).abs());
        }
    }
    let perfect = max_dev <= 1e-8;
    Ok(DiscriminationReport {
        s_matrix,
        perfect,
        reason: if perfect {
            "every member decodes onto its own target".into()
        } else {
            format!("largest deviation from perfect decoding is {max_dev:.3e}")
        },
    })
}
