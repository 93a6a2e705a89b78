//! Acceptance gate for the library: eight end-to-end criteria, one test
//! each. Every test prints exactly one verdict line of the form
//! `[acceptance N] PASS|FAIL - detail` before asserting, so a plain test
//! run doubles as a report.
//!
//! Criterion 8 contains a sub-assertion that cannot hold: at local
//! dimension 2 the literal and conjugated measurement conventions produce
//! identical operators (indices k and -k coincide mod 2), so the literal
//! convention cannot fail completeness there. The test checks it anyway and
//! reports the honest failure rather than weakening the assertion.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use locopy_core::classify::{
    classify_copiable, spectrum_condition, ssd_canonical, verify_diagonality, SchmidtWitness,
};
use locopy_core::copier::{
    build_copier, reduce_to_fundamental, simulate_copy, solve_copier, SolveOutcome, XiTensor,
};
use locopy_core::discriminate::{
    build_transfer_channel, povm_bound_check, random_local_mixture_povm, simulate_discrimination,
    simulate_transfer, SeparablePovm, TransferConvention,
};
use locopy_core::error::CoreError;
use locopy_core::linalg::{polar_unitary, simultaneous_diagonalize};
use locopy_core::weyl::{bell_state, clock_power_set, pauli_x, pauli_z, weyl_set, BellIndex, PhaseRoot};
use locopy_core::{ComplexMatrix, Tolerance};

fn verdict(n: usize, pass: bool, detail: &str) {
    println!("[acceptance {n}] {} - {detail}", if pass { "PASS" } else { "FAIL" });
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn all_labels(dim: usize) -> Vec<(usize, usize)> {
    let mut labels = Vec::new();
    for n in 0..dim {
        for m in 0..dim {
            labels.push((n, m));
        }
    }
    labels
}

fn subsets_up_to(labels: &[(usize, usize)], max_size: usize) -> Vec<Vec<(usize, usize)>> {
    let n = labels.len();
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size > max_size {
            continue;
        }
        out.push(
            labels
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, l)| *l)
                .collect(),
        );
    }
    out
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let angle = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * angle.cos(), r * angle.sin())
}

fn random_matrix(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| gaussian(rng))
}

fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    polar_unitary(&random_matrix(dim, rng)).expect("generic matrix has full rank")
}

fn random_xi(dim: usize, rng: &mut ChaCha8Rng) -> XiTensor {
    let slices: Vec<ComplexMatrix> = (0..dim).map(|_| random_unitary(dim, rng)).collect();
    XiTensor::from_slices(slices, &tol()).expect("unitary slices")
}

/// Criterion 1: the machine built from the delta tensor copies the full
/// clock-power family exactly at dimensions 2, 3, 5 and 7, under the
/// standard entangled blank, in under ten seconds total.
#[test]
fn acceptance_1_delta_machine_copies_clock_families() {
    let start = Instant::now();
    let mut worst = 1.0f64;
    for dim in [2usize, 3, 5, 7] {
        let machine = build_copier(&XiTensor::delta(dim));
        let exponents: Vec<usize> = (0..dim).collect();
        let set = clock_power_set(dim, &exponents).unwrap();
        let blank = bell_state(&BellIndex::new(0, 0, dim).unwrap()).unwrap();
        let fidelities = simulate_copy(&machine, &set, &blank).unwrap();
        for f in fidelities {
            worst = worst.min(f);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst >= 1.0 - 1e-9 && elapsed < 10.0;
    verdict(
        1,
        pass,
        &format!("worst clock-power copy fidelity {worst:.12} over dims 2,3,5,7 in {elapsed:.2} s (need >= 1-1e-9, < 10 s)"),
    );
    assert!(pass);
}

/// Criterion 2: over every canonical subset (sizes 1-3 at dimension 2,
/// sizes 1-4 at dimension 3) the structural classifier and the machine
/// solver agree; copiable sets never exceed the local dimension and their
/// reduced members are clock powers in the classifier's basis.
#[test]
fn acceptance_2_classifier_agrees_with_solver_on_all_subsets() {
    let start = Instant::now();
    let mut checked = 0usize;
    let mut copiable_count = 0usize;
    let mut failures: Vec<String> = Vec::new();

    for (dim, max_size) in [(2usize, 3usize), (3, 4)] {
        let root = PhaseRoot::new(dim);
        for labels in subsets_up_to(&all_labels(dim), max_size) {
            checked += 1;
            let set = weyl_set(dim, &labels).unwrap();
            let solved = matches!(
                solve_copier(&set, &tol(), 16, 0xACCE).unwrap(),
                SolveOutcome::Found(_)
            );
            let classified = classify_copiable(&set, &tol(), 0xACCE).unwrap();
            if solved != classified.copiable {
                failures.push(format!(
                    "dim {dim} {labels:?}: solver {solved} vs classifier {}",
                    classified.copiable
                ));
                continue;
            }
            if !classified.copiable {
                continue;
            }
            copiable_count += 1;
            if labels.len() > dim {
                failures.push(format!("dim {dim} {labels:?}: copiable set larger than dim"));
                continue;
            }
            // The classifier's basis must turn every reduced member into a
            // clock power with the reported exponent, up to one phase.
            let basis = classified.basis.as_ref().unwrap();
            let exponents = classified.exponents.as_ref().unwrap();
            let fundamental = reduce_to_fundamental(&set).unwrap();
            for (j, &e) in exponents.iter().enumerate() {
                let m = basis.dagger().mul(fundamental.op(j)).unwrap().mul(basis).unwrap();
                let phase = m.get(0, 0);
                if (phase.norm() - 1.0).abs() > 1e-8 {
                    failures.push(format!("dim {dim} {labels:?}: member {j} basis fit broke"));
                    break;
                }
                let mut dev = 0.0f64;
                for a in 0..dim {
                    for b in 0..dim {
                        let expect = if a == b {
                            phase * root.pow((e * a) as i64)
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        dev = dev.max((m.get(a, b) - expect).norm());
                    }
                }
                if dev > 1e-8 {
                    failures.push(format!(
                        "dim {dim} {labels:?}: member {j} deviates {dev:.3e} from clock pattern"
                    ));
                    break;
                }
            }
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && checked == 14 + 255 && elapsed < 300.0;
    verdict(
        2,
        pass,
        &format!(
            "{checked} subsets, {copiable_count} copiable, {} disagreements in {elapsed:.2} s (need 0, < 300 s)",
            failures.len()
        ),
    );
    assert!(pass, "{failures:?}");
}

/// Criterion 3: the literal spectrum test accepts clock operators and
/// rejects the qubit clock-shift product, and after absorbing one overall
/// phase it decides copiability of every two-member canonical subset in
/// agreement with the solver.
#[test]
fn acceptance_3_spectrum_test_matches_solver_on_pairs() {
    let mut pass = true;
    let mut notes: Vec<String> = Vec::new();

    for dim in [2usize, 3, 5, 7] {
        let report = spectrum_condition(&pauli_z(dim), &tol()).unwrap();
        if !report.holds || report.order != Some(dim) {
            pass = false;
            notes.push(format!("clock spectrum rejected at dim {dim}"));
        }
    }
    let zx = pauli_z(2).mul(&pauli_x(2)).unwrap();
    let zx_report = spectrum_condition(&zx, &tol()).unwrap();
    if zx_report.holds {
        pass = false;
        notes.push("qubit clock-shift product accepted literally".into());
    }

    let mut pairs = 0usize;
    let mut disagreements = 0usize;
    for dim in [2usize, 3] {
        for labels in subsets_up_to(&all_labels(dim), 2) {
            if labels.len() != 2 {
                continue;
            }
            pairs += 1;
            let set = weyl_set(dim, &labels).unwrap();
            let t = reduce_to_fundamental(&set).unwrap().op(1).clone();
            let solved = matches!(
                solve_copier(&set, &tol(), 16, 0x5EC3),
                Ok(SolveOutcome::Found(_))
            );
            // Distinct eigenvalues of the quotient are the only phases that
            // can bring 1 into the rescaled spectrum.
            let (_, diags) = simultaneous_diagonalize(&[&t], 0x3A11).unwrap();
            let mut candidates: Vec<Complex64> = Vec::new();
            for v in &diags[0] {
                let unit = v / v.norm();
                if candidates.iter().all(|c| (c - unit).norm() > 1e-6) {
                    candidates.push(unit);
                }
            }
            let spectral = candidates.iter().any(|lambda| {
                let rescaled = t.scale(lambda.conj());
                spectrum_condition(&rescaled, &tol()).map(|r| r.holds).unwrap_or(false)
            });
            if spectral != solved {
                disagreements += 1;
                notes.push(format!("dim {dim} {labels:?}: spectrum {spectral} vs solver {solved}"));
            }
        }
    }
    pass = pass && disagreements == 0;
    verdict(
        3,
        pass,
        &format!("clock spectra accepted, qubit clock-shift rejected, {pairs} pairs cross-checked with {disagreements} disagreements"),
    );
    assert!(pass, "{notes:?}");
}

/// Criterion 4: randomized trials of the diagonality equations. Whatever
/// unitary satisfies them under a random slice-unitary machine must be
/// diagonal (zero counterexamples in 1000 trials per dimension), and the
/// constructive clock-phase family satisfies them for every exponent.
#[test]
fn acceptance_4_diagonality_equations_force_diagonal_solutions() {
    let start = Instant::now();
    let check_tol = Tolerance { eps: 1e-9 };
    let mut counterexamples = 0usize;
    let mut constructive_failures = 0usize;

    for dim in [2usize, 3, 5] {
        let mut rng = ChaCha8Rng::seed_from_u64(0xD1A6 + dim as u64);
        for trial in 0..1000usize {
            let xi = random_xi(dim, &mut rng);
            let u = if trial % 2 == 0 {
                random_matrix(dim, &mut rng)
            } else {
                ComplexMatrix::from_fn(dim, dim, |i, j| {
                    if i == j {
                        let angle: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
                        Complex64::from_polar(1.0, angle)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            };
            let report = verify_diagonality(&u, &xi, &check_tol).unwrap();
            if report.satisfies && u.max_abs() > 1e-12 && !report.is_diagonal {
                counterexamples += 1;
            }
        }

        let root = PhaseRoot::new(dim);
        for n in 0..dim {
            let xi = random_xi(dim, &mut rng);
            let u = ComplexMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    root.pow((n * i) as i64)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let report = verify_diagonality(&u, &xi, &check_tol).unwrap();
            if !(report.satisfies && report.is_diagonal) {
                constructive_failures += 1;
            }
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    let pass = counterexamples == 0 && constructive_failures == 0 && elapsed < 60.0;
    verdict(
        4,
        pass,
        &format!("3000 randomized trials: {counterexamples} counterexamples, {constructive_failures} constructive failures in {elapsed:.2} s (need 0, 0, < 60 s)"),
    );
    assert!(pass);
}

/// Criterion 5: 500 random separable measurements never let a maximally
/// entangled state respond above trace/dim, and the rank-one product
/// projector against the standard entangled state saturates the bound.
#[test]
fn acceptance_5_separable_bound_holds_and_is_tight() {
    let mut worst_violation = 0.0f64;
    let mut run = 0usize;
    for dim in [2usize, 3] {
        let states: Vec<_> = all_labels(dim)
            .into_iter()
            .map(|(n, m)| bell_state(&BellIndex::new(n, m, dim).unwrap()).unwrap())
            .collect();
        for i in 0..250usize {
            let seed = 0xB0B ^ ((dim as u64) << 32) ^ i as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Term budget: bases * dim^2 product projectors, at most 50.
            let max_bases = 50 / (dim * dim);
            let bases = rng.gen_range(1..=max_bases);
            let elements = rng.gen_range(2..=6);
            let povm = random_local_mixture_povm(dim, bases, elements, seed).unwrap();
            let report = povm_bound_check(&povm, &states, &tol()).unwrap();
            worst_violation = worst_violation.max(report.max_violation);
            run += 1;
        }
    }

    // Tight case: the element |0><0| x |0><0| responds to the standard
    // entangled state with exactly its cap 1/dim.
    let dim = 2usize;
    let e00 = ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i == 0 && j == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut rest = Vec::new();
    for k in 0..dim {
        for l in 0..dim {
            if k == 0 && l == 0 {
                continue;
            }
            let pk = ComplexMatrix::from_fn(dim, dim, |i, j| {
                if i == k && j == k { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
            });
            let pl = ComplexMatrix::from_fn(dim, dim, |i, j| {
                if i == l && j == l { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
            });
            rest.push((pk, pl));
        }
    }
    let tight_povm =
        SeparablePovm::from_product_terms(dim, vec![vec![(e00.clone(), e00)], rest], &tol()).unwrap();
    let psi = bell_state(&BellIndex::new(0, 0, dim).unwrap()).unwrap();
    let tight_report = povm_bound_check(&tight_povm, &[psi], &tol()).unwrap();
    let tight_slack = tight_report.slack[0][0].abs();

    let pass = run == 500 && worst_violation <= 1e-9 && tight_slack <= 1e-12;
    verdict(
        5,
        pass,
        &format!("{run} random separable measurements, worst violation {worst_violation:.3e} (need <= 1e-9), tight-case slack {tight_slack:.3e} (need <= 1e-12)"),
    );
    assert!(pass);
}

/// Criterion 6: every canonical subset with a verified shared Schmidt pair
/// (from the criterion-2 enumeration, plus the diagonal five-member family
/// at dimension 5) is discriminated perfectly by the one-way protocol, the
/// channel is complete to 1e-10, and the sender is left in the flat state.
#[test]
fn acceptance_6_one_way_protocol_discriminates_every_ssd_family() {
    let start = Instant::now();
    let mut families = 0usize;
    let mut failures: Vec<String> = Vec::new();

    let mut jobs: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    for (dim, max_size) in [(2usize, 3usize), (3, 4)] {
        for labels in subsets_up_to(&all_labels(dim), max_size) {
            jobs.push((dim, labels));
        }
    }
    jobs.push((5, (0..5).map(|n| (n, n)).collect()));

    for (dim, labels) in jobs {
        let ssd = ssd_canonical(dim, &labels, &tol()).unwrap();
        let Some(witness) = ssd.witness else { continue };
        families += 1;

        let report = simulate_discrimination(dim, &labels, &tol()).unwrap();
        let mut s_dev = 0.0f64;
        for (a, row) in report.s_matrix.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                let expect = if a == b { 1.0 } else { 0.0 };
                s_dev = s_dev.max((v - expect).abs());
            }
        }
        if !report.perfect || s_dev > 1e-9 {
            failures.push(format!("dim {dim} {labels:?}: success matrix off by {s_dev:.3e}"));
        }

        let channel = build_transfer_channel(
            dim,
            &witness.basis_e,
            &witness.basis_f,
            TransferConvention::ConjugatedBra,
            &tol(),
        )
        .unwrap();
        let mut sum = ComplexMatrix::zeros(dim * dim, dim * dim);
        for f in &channel.ops {
            sum = sum.add(&f.dagger().mul(f).unwrap()).unwrap();
        }
        let completeness = sum.max_abs_diff(&ComplexMatrix::identity(dim * dim));
        if completeness > 1e-10 {
            failures.push(format!("dim {dim} {labels:?}: channel completeness {completeness:.3e}"));
        }

        for (alpha, row) in witness.coefficients.iter().enumerate() {
            let transfer = simulate_transfer(
                dim,
                &witness.basis_e,
                &witness.basis_f,
                row,
                TransferConvention::ConjugatedBra,
                &tol(),
            )
            .unwrap();
            if transfer.sender_state_residual > 1e-9 {
                failures.push(format!(
                    "dim {dim} {labels:?} member {alpha}: sender residue {:.3e}",
                    transfer.sender_state_residual
                ));
            }
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && families > 0 && elapsed < 30.0;
    verdict(
        6,
        pass,
        &format!("{families} shared-Schmidt families discriminated perfectly in {elapsed:.2} s, {} failures (need 0, < 30 s)", failures.len()),
    );
    assert!(pass, "{failures:?}");
}

/// Criterion 7: at prime dimensions 2 and 3, copiability of a canonical
/// subset is equivalent to having a verified shared Schmidt pair whose
/// coefficient rows are clock-phase patterns with distinct exponents.
#[test]
fn acceptance_7_copiable_iff_shared_schmidt_clock_patterns() {
    let mut checked = 0usize;
    let mut disagreements: Vec<String> = Vec::new();

    for (dim, max_size) in [(2usize, 3usize), (3, 4)] {
        for labels in subsets_up_to(&all_labels(dim), max_size) {
            checked += 1;
            let set = weyl_set(dim, &labels).unwrap();
            let copiable = matches!(
                solve_copier(&set, &tol(), 16, 0xE0_7).unwrap(),
                SolveOutcome::Found(_)
            );
            let ssd = ssd_canonical(dim, &labels, &tol()).unwrap();
            let normal_form = ssd
                .witness
                .as_ref()
                .map(|w| clock_pattern_exponents(w, dim).is_some())
                .unwrap_or(false);
            if copiable != normal_form {
                disagreements.push(format!(
                    "dim {dim} {labels:?}: copiable {copiable} vs clock-patterned shared pair {normal_form}"
                ));
            }
        }
    }

    let pass = disagreements.is_empty();
    verdict(
        7,
        pass,
        &format!("{checked} subsets at prime dims 2 and 3, {} equivalence violations (need 0)", disagreements.len()),
    );
    assert!(pass, "{disagreements:?}");
}

/// Fits each witness coefficient row as `phase * w^{n k}` and returns the
/// exponents when every row fits and the exponents are pairwise distinct.
fn clock_pattern_exponents(witness: &SchmidtWitness, dim: usize) -> Option<Vec<usize>> {
    let root = PhaseRoot::new(dim);
    let mut exponents = Vec::with_capacity(witness.coefficients.len());
    for row in &witness.coefficients {
        if row.len() != dim {
            return None;
        }
        let fit = (0..dim).find(|&n| {
            (0..dim).all(|k| {
                let expect = row[0] * root.pow((n * k) as i64);
                (row[k] - expect).norm() <= 1e-7
            })
        })?;
        if exponents.contains(&fit) {
            return None;
        }
        exponents.push(fit);
    }
    Some(exponents)
}

/// Criterion 8: the conjugated-bra measurement convention yields a complete
/// channel at dimensions 2, 3 and 5, while the literal index transcription
/// must fail completeness with residual above 0.1 at every one of those
/// dimensions. The dimension-2 half of the literal claim contradicts
/// arithmetic (both conventions give the same operators mod 2), so this
/// test reports that sub-case as the honest failure it is.
#[test]
fn acceptance_8_measurement_index_convention_adjudication() {
    let mut notes: Vec<String> = Vec::new();
    let mut conjugated_ok = true;
    let mut literal_failed_everywhere = true;

    for dim in [2usize, 3, 5] {
        let eye = ComplexMatrix::identity(dim);

        match build_transfer_channel(dim, &eye, &eye, TransferConvention::ConjugatedBra, &tol()) {
            Ok(channel) => {
                let mut sum = ComplexMatrix::zeros(dim * dim, dim * dim);
                for f in &channel.ops {
                    sum = sum.add(&f.dagger().mul(f).unwrap()).unwrap();
                }
                let residual = sum.max_abs_diff(&ComplexMatrix::identity(dim * dim));
                if residual > 1e-10 {
                    conjugated_ok = false;
                    notes.push(format!("dim {dim}: conjugated channel residual {residual:.3e}"));
                }
            }
            Err(e) => {
                conjugated_ok = false;
                notes.push(format!("dim {dim}: conjugated convention rejected: {e:?}"));
            }
        }

        match build_transfer_channel(dim, &eye, &eye, TransferConvention::Literal, &tol()) {
            Err(CoreError::CompletenessFailure { residual, .. }) => {
                if residual <= 0.1 {
                    literal_failed_everywhere = false;
                    notes.push(format!("dim {dim}: literal residual {residual:.3e} not above 0.1"));
                }
            }
            Ok(_) => {
                literal_failed_everywhere = false;
                notes.push(format!(
                    "dim {dim}: literal convention built a valid channel; at this dimension indices k and -k coincide mod {dim}, so the literal operators equal the conjugated ones and completeness cannot fail"
                ));
            }
            Err(e) => {
                literal_failed_everywhere = false;
                notes.push(format!("dim {dim}: literal convention failed differently: {e:?}"));
            }
        }
    }

    let pass = conjugated_ok && literal_failed_everywhere;
    verdict(
        8,
        pass,
        &format!(
            "conjugated convention complete at dims 2,3,5: {conjugated_ok}; literal convention rejected at every dim: {literal_failed_everywhere}{}",
            if notes.is_empty() { String::new() } else { format!(" [{}]", notes.join("; ")) }
        ),
    );
    assert!(pass, "{notes:?}");
}
