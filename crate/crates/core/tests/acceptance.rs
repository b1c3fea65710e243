//! Acceptance suite: one test per criterion, each printing a pass line
//! with the measured values (run with `--nocapture` to see them).

use std::time::Instant;

use qent_core::schmidt::decohere;
use qent_core::three_qubit::class_fixture;
use qent_core::von_neumann_entropy;
use qent_core::{
    classify, compact_decomposition, entanglement_pure, entanglement_pure_sampled,
    enumerate_orderings, enumerate_orderings_lazy, haar_random_density, haar_random_state,
    haar_random_unitary, make_named_state, nested_entropy,
    relative_entropy_of_entanglement_estimate, roof_minimize, standard_form, verify_constraint,
    verify_membership, wootters_ef, ClassLabel, LogBase, NamedState, Ordering, ReeConfig,
    RoofConfig, SubsystemLayout,
};

const BITS: LogBase = LogBase::Two;

#[test]
fn acceptance_01_ghz_value_and_runtime() {
    let ghz = make_named_state(NamedState::Ghz);
    // warm-up outside the timed call
    let _ = entanglement_pure(&ghz, BITS).unwrap();
    let t0 = Instant::now();
    let result = entanglement_pure(&ghz, BITS).unwrap();
    let elapsed = t0.elapsed();
    let delta = (result.value - 1.0).abs();
    assert!(
        delta <= 1e-9,
        "E^c(GHZ) = {} (delta {delta:.3e})",
        result.value
    );
    assert!(
        elapsed.as_millis() < 10,
        "E^c(GHZ) took {:?}, budget 10 ms",
        elapsed
    );
    println!(
        "acceptance 1 PASS: E^c(GHZ) = {:.12} bits (delta {delta:.2e}), {} us",
        result.value,
        elapsed.as_micros()
    );
}

#[test]
fn acceptance_02_maximal_state_value_and_symmetry() {
    let eq8 = make_named_state(NamedState::Eq8Max);
    let result = entanglement_pure(&eq8, BITS).unwrap();
    let delta = (result.value - 2.0).abs();
    assert!(delta <= 1e-9, "E^c = {} (delta {delta:.3e})", result.value);

    let entropies: Vec<f64> = result.per_ordering.iter().map(|(_, s)| *s).collect();
    assert_eq!(entropies.len(), 3);
    let mut max_spread: f64 = 0.0;
    for i in 0..entropies.len() {
        for j in i + 1..entropies.len() {
            max_spread = max_spread.max((entropies[i] - entropies[j]).abs());
        }
    }
    assert!(
        max_spread <= 1e-10,
        "ordering entropies differ by {max_spread:.3e}"
    );

    // nested split: one bit at the root plus one conditional bit below
    let tree = compact_decomposition(&eq8, &result.argmin_ordering).unwrap();
    let nested = nested_entropy(&tree, BITS);
    assert_eq!(nested.per_level.len(), 2);
    let root_delta = (nested.per_level[0] - 1.0).abs();
    let cond_delta = (nested.per_level[1] - 1.0).abs();
    assert!(root_delta <= 1e-9, "root term {}", nested.per_level[0]);
    assert!(
        cond_delta <= 1e-9,
        "conditional term {}",
        nested.per_level[1]
    );
    println!(
        "acceptance 2 PASS: E^c = {:.12} bits, ordering spread {max_spread:.2e}, split {:.12} + {:.12}",
        result.value, nested.per_level[0], nested.per_level[1]
    );
}

#[test]
fn acceptance_03_product_and_w_values() {
    let product = entanglement_pure(&make_named_state(NamedState::Product), BITS).unwrap();
    assert!(
        product.value.abs() <= 1e-12,
        "E^c(product) = {}",
        product.value
    );
    // oracle: two sequential Schmidt steps give branch weights (2/3, 1/3)
    // and a Bell pair inside the 2/3 branch, so the leaf distribution is
    // uniform over three terms.
    let expected_w = 3.0f64.log2();
    let w = entanglement_pure(&make_named_state(NamedState::W), BITS).unwrap();
    let delta = (w.value - expected_w).abs();
    assert!(delta <= 1e-9, "E^c(W) = {} (delta {delta:.3e})", w.value);
    println!(
        "acceptance 3 PASS: E^c(product) = {:.2e}, E^c(W) = {:.12} (log2 3 delta {delta:.2e})",
        product.value, w.value
    );
}

#[test]
fn acceptance_04_bipartite_reduction() {
    let dim_pairs: [(usize, usize); 6] = [(2, 2), (2, 3), (2, 4), (3, 3), (3, 4), (4, 4)];
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..1000u64 {
        let (da, db) = dim_pairs[(i as usize) % dim_pairs.len()];
        let layout = SubsystemLayout::with_default_labels(vec![da, db]).unwrap();
        let psi = haar_random_state(&layout, 40_000 + i);
        let ec = entanglement_pure(&psi, BITS).unwrap().value;
        let marginal_entropy = von_neumann_entropy(&psi.marginals().marginals[0], BITS);
        worst = worst.max((ec - marginal_entropy).abs());
    }
    let elapsed = t0.elapsed();
    assert!(worst <= 1e-9, "worst |E^c - S(rho_A)| = {worst:.3e}");
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "bipartite suite took {:?}, budget 5 s",
        elapsed
    );
    println!(
        "acceptance 4 PASS: 1000 bipartite states, worst deviation {worst:.2e}, {:.2} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn acceptance_05_membership_suite() {
    let mut worst_marginal: f64 = 0.0;
    let mut worst_contrast: f64 = 0.0;
    let mut worst_additivity: f64 = 0.0;
    let mut checked = 0usize;
    for n in [3usize, 4] {
        let layout = SubsystemLayout::qubits(n);
        let orderings = enumerate_orderings(&layout).unwrap();
        for i in 0..250u64 {
            let psi = haar_random_state(&layout, 50_000 + 1000 * n as u64 + i);
            let rho = psi.to_density();
            for o in &orderings {
                let tree = compact_decomposition(&psi, o).unwrap();
                let sigma = decohere(&tree);
                let report = verify_membership(&rho, &sigma, BITS).unwrap();
                worst_marginal = worst_marginal.max(report.marginal_residual);
                worst_contrast = worst_contrast.max(report.contrast_line_residual);
                worst_additivity = worst_additivity.max(report.additivity_residual);
                checked += 1;
            }
        }
    }
    assert!(
        worst_marginal <= 1e-8,
        "marginal residual {worst_marginal:.3e}"
    );
    assert!(
        worst_contrast <= 1e-8,
        "contrast residual {worst_contrast:.3e}"
    );
    assert!(
        worst_additivity <= 1e-8,
        "additivity residual {worst_additivity:.3e}"
    );
    println!(
        "acceptance 5 PASS: {checked} memberships, residuals marginal {worst_marginal:.2e} / contrast {worst_contrast:.2e} / additivity {worst_additivity:.2e}"
    );
}

#[test]
fn acceptance_06_bound_suite() {
    let mut worst_excess = f64::NEG_INFINITY;
    let mut three_qubit_max: f64 = 0.0;
    for n in [2usize, 3, 4, 5] {
        let layout = SubsystemLayout::qubits(n);
        let bound = (n - 1) as f64; // (N-1) log2(2) bits
        for i in 0..100u64 {
            let psi = haar_random_state(&layout, 60_000 + 1000 * n as u64 + i);
            let ec = entanglement_pure(&psi, BITS).unwrap().value;
            assert!(ec >= 0.0, "negative entanglement {ec}");
            assert!(
                ec <= bound + 1e-9,
                "N = {n}: E^c = {ec} exceeds bound {bound}"
            );
            worst_excess = worst_excess.max(ec - bound);
            if n == 3 {
                three_qubit_max = three_qubit_max.max(ec);
            }
        }
    }
    assert!(three_qubit_max <= 2.0 + 1e-9);
    println!(
        "acceptance 6 PASS: bounds hold for N in 2..=5 (closest approach {worst_excess:.3} bits), three-qubit max {three_qubit_max:.6} <= 2"
    );
}

#[test]
fn acceptance_07_local_unitary_invariance() {
    let mut worst: f64 = 0.0;
    for trial in 0..200u64 {
        let n = if trial % 4 == 3 { 4 } else { 3 };
        let layout = SubsystemLayout::qubits(n);
        let psi = haar_random_state(&layout, 70_000 + trial);
        let unitaries: Vec<_> = (0..n)
            .map(|k| haar_random_unitary(2, 71_000 + trial * 8 + k as u64))
            .collect();
        let rotated = psi.apply_local_unitaries(&unitaries).unwrap();
        let a = entanglement_pure(&psi, BITS).unwrap().value;
        let b = entanglement_pure(&rotated, BITS).unwrap().value;
        worst = worst.max((a - b).abs());
    }
    assert!(worst <= 1e-8, "worst |delta E^c| = {worst:.3e}");
    println!("acceptance 7 PASS: 200 local-unitary trials, worst |delta E^c| = {worst:.2e}");
}

#[test]
fn acceptance_08_standard_form_suite() {
    let layout = SubsystemLayout::qubits(3);
    let mut worst_fidelity_gap: f64 = 0.0;
    let mut worst_quotient: f64 = 0.0;
    let mut singular = 0usize;
    for i in 0..500u64 {
        let psi = haar_random_state(&layout, 80_000 + i);
        let sf = standard_form(&psi).unwrap();
        let mapped = psi.apply_local_unitaries(&sf.local_unitaries).unwrap();
        let fid = mapped.fidelity(&sf.reconstruct_standard(&layout));
        worst_fidelity_gap = worst_fidelity_gap.max(1.0 - fid);
        let report = verify_constraint(&sf);
        match report.quotient_residual {
            Some(q) => worst_quotient = worst_quotient.max(q),
            None => singular += 1,
        }
    }
    assert!(
        worst_fidelity_gap <= 1e-9,
        "worst fidelity gap {worst_fidelity_gap:.3e}"
    );
    assert!(
        worst_quotient <= 1e-8,
        "worst residual {worst_quotient:.3e}"
    );

    let fixtures = [
        (ClassLabel::I, class_fixture(ClassLabel::I)),
        (ClassLabel::II, class_fixture(ClassLabel::II)),
        (ClassLabel::IIIa, class_fixture(ClassLabel::IIIa)),
        (ClassLabel::IIIb, class_fixture(ClassLabel::IIIb)),
        (ClassLabel::IIIc, class_fixture(ClassLabel::IIIc)),
    ];
    for (expected, state) in &fixtures {
        let c = classify(state).unwrap();
        assert_eq!(
            c.label, *expected,
            "fixture for {expected} classified as {} (ranks {:?}, n_ms {})",
            c.label, c.marginal_ranks, c.n_ms
        );
    }
    println!(
        "acceptance 8 PASS: 500 standard forms (fidelity gap {worst_fidelity_gap:.2e}, constraint {worst_quotient:.2e}, {singular} singular), 5/5 fixtures classified"
    );
}

#[test]
fn acceptance_09_two_qubit_roof_oracle() {
    let layout = SubsystemLayout::qubits(2);
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        let rho = haar_random_density(&layout, 2, 90_000 + i).unwrap();
        let oracle = wootters_ef(&rho, BITS).unwrap();
        let config = RoofConfig {
            ensemble_size: Some(4),
            restarts: 32,
            max_iters: 250,
            seed: 91_000 + i,
            tol: 1e-9,
        };
        let roof = roof_minimize(&rho, &config, BITS).unwrap();
        let delta = (roof.value - oracle).abs();
        worst = worst.max(delta);
        assert!(
            delta <= 5e-3,
            "state {i}: roof {} vs oracle {oracle} (delta {delta:.3e})",
            roof.value
        );
    }
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() < 300.0,
        "roof oracle suite took {:?}, budget 5 min",
        elapsed
    );
    println!(
        "acceptance 9 PASS: 50 rank-2 densities, worst |roof - oracle| = {worst:.2e}, {:.1} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn acceptance_10_relative_entropy_consistency() {
    let layout = SubsystemLayout::qubits(3);
    let mut worst_gap = f64::NEG_INFINITY;
    for i in 0..50u64 {
        let psi = haar_random_state(&layout, 100_000 + i);
        let ec = entanglement_pure(&psi, BITS).unwrap().value;
        let config = ReeConfig {
            num_products: None,
            restarts: 4,
            max_iters: 40,
            seed: 101_000 + i,
            tol: 1e-9,
        };
        let estimate =
            relative_entropy_of_entanglement_estimate(&psi.to_density(), &config, BITS).unwrap();
        let gap = estimate.value - ec;
        worst_gap = worst_gap.max(gap);
        assert!(
            gap <= 1e-9,
            "state {i}: estimate {} exceeds E^c {ec}",
            estimate.value
        );
    }
    println!(
        "acceptance 10 PASS: 50 states, E_R estimate <= E^c (largest estimate - E^c = {worst_gap:.2e})"
    );
}

#[test]
fn acceptance_11_ten_qubit_scale() {
    let layout = SubsystemLayout::qubits(10);
    let psi = haar_random_state(&layout, 110_000);
    let sample: Vec<Ordering> = enumerate_orderings_lazy(&layout)
        .unwrap()
        .take(24)
        .collect();
    assert_eq!(sample.len(), 24);
    let t0 = Instant::now();
    let result = entanglement_pure_sampled(&psi, &sample, BITS).unwrap();
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "10-qubit sample took {:?}, budget 10 s",
        elapsed
    );
    assert!(result.value >= 0.0 && result.value <= 9.0 + 1e-9);
    println!(
        "acceptance 11 PASS: 10-qubit state over 24 orderings in {:.2} s, sampled E^c = {:.6} bits",
        elapsed.as_secs_f64(),
        result.value
    );
}
