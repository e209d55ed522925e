//! Pipeline-level invariants of the synthesis construction: exact
//! conditioned proportionality at every iteration count, mass
//! accounting, phase alignment for real tables, distribution round
//! trips, and the search-equivalence of indicator tables.

use num_complex::Complex64;
use qsample::amplify;
use qsample::oracle;
use qsample::synth::{self, AmplitudeSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn conditioned_output_is_proportional_to_f_at_every_eta() {
    let mut rng = ChaCha8Rng::seed_from_u64(601);
    for _ in 0..10 {
        let spec = AmplitudeSpec::from_amplitudes(oracle::random_amplitudes(4, &mut rng))
            .unwrap();
        let target = spec.target_distribution();
        for eta in 0..=6 {
            let result = synth::synthesize(&spec, Some(eta)).unwrap();
            assert!(
                result.conditioned_state_error <= 1e-10,
                "eta {eta}: state error {}",
                result.conditioned_state_error
            );
            for (x, (&got, &want)) in result
                .conditioned_distribution
                .iter()
                .zip(&target)
                .enumerate()
            {
                assert!(
                    (got - want).abs() <= 1e-10,
                    "eta {eta}, x {x}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn ancilla_masses_account_for_everything() {
    let mut rng = ChaCha8Rng::seed_from_u64(602);
    for _ in 0..10 {
        let spec = AmplitudeSpec::from_amplitudes(oracle::random_amplitudes(5, &mut rng))
            .unwrap();
        let result = synth::synthesize(&spec, None).unwrap();
        let split = result.final_state.split_ancilla().unwrap();
        assert!(
            (result.success_probability + split.one_mass() - 1.0).abs() <= 1e-12,
            "masses sum to {}",
            result.success_probability + split.one_mass()
        );
        let total: f64 = result.conditioned_distribution.iter().sum();
        assert!((total - 1.0).abs() <= 1e-12, "conditioned sums to {total}");
        assert!(
            (result.success_probability - result.plan.predicted_success).abs() <= 1e-10
        );
    }
}

#[test]
fn real_nonnegative_tables_need_only_a_global_phase() {
    let mut rng = ChaCha8Rng::seed_from_u64(603);
    for _ in 0..10 {
        let table: Vec<f64> = (0..16).map(|_| rng.gen::<f64>()).collect();
        let spec = AmplitudeSpec::from_probabilities(table).unwrap();
        let result = synth::synthesize(&spec, None).unwrap();

        // Remove the best global phase, then every amplitude on the
        // support must be real non-negative up to 1e-10 radians.
        let split = result.final_state.split_ancilla().unwrap();
        let scale = split.zero_mass().sqrt();
        let reference: Complex64 = spec
            .values()
            .iter()
            .zip(&split.zero)
            .map(|(f, a)| f.conj() * (a / scale))
            .sum();
        let phase = reference / reference.norm();
        for (f, a) in spec.values().iter().zip(&split.zero) {
            if f.norm() < 1e-6 {
                continue;
            }
            let aligned = (a / scale) * phase.conj();
            let spread = aligned.im.atan2(aligned.re).abs();
            assert!(spread <= 1e-10, "phase spread {spread}");
            assert!(aligned.re >= -1e-12);
        }
    }
}

#[test]
fn probability_specs_round_trip_through_synthesis() {
    let mut rng = ChaCha8Rng::seed_from_u64(604);
    for _ in 0..5 {
        let table: Vec<f64> = (0..32).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = table.iter().sum();
        let spec = AmplitudeSpec::from_probabilities(table.clone()).unwrap();
        let result = synth::synthesize(&spec, None).unwrap();
        for (x, &p) in table.iter().enumerate() {
            let want = p / total;
            let got = result.conditioned_distribution[x];
            assert!(
                (got - want).abs() <= 1e-10,
                "x {x}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn indicator_tables_reproduce_the_multi_target_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(605);
    let n = 8usize;
    let size = 1usize << n;
    for &k in &[1usize, 4, 16] {
        let points: Vec<usize> = rand::seq::index::sample(&mut rng, size, k).iter().collect();
        let mut table = vec![Complex64::new(0.0, 0.0); size];
        for &p in &points {
            table[p] = Complex64::new(1.0, 0.0);
        }
        let spec = AmplitudeSpec::from_amplitudes(table).unwrap();
        let result = synth::synthesize(&spec, None).unwrap();

        // Same iteration count as a k-solution search with u = sqrt(k/N).
        let search_plan = amplify::plan((k as f64 / size as f64).sqrt()).unwrap();
        assert_eq!(result.plan.eta, search_plan.eta, "k = {k}");

        // Conditioned on the ancilla, uniform over the k points.
        let split = result.final_state.split_ancilla().unwrap();
        let scale = split.zero_mass().sqrt();
        let magnitudes: Vec<f64> = points
            .iter()
            .map(|&p| (split.zero[p] / scale).norm())
            .collect();
        let max = magnitudes.iter().cloned().fold(0.0, f64::max);
        let min = magnitudes.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max - min <= 1e-10, "k = {k}: spread {}", max - min);
        for (x, amp) in split.zero.iter().enumerate() {
            if !points.contains(&x) {
                assert!((amp / scale).norm() <= 1e-10, "off-support mass at {x}");
            }
        }
    }
}

#[test]
fn adaptive_consumption_matches_the_exact_round_probabilities() {
    // Exact per-round success for the N = 256 single-point table, under
    // the default schedule: once a round's success reaches 1/2, the
    // failure probability keeps halving (or better) every round after.
    let mut table = vec![0.0f64; 256];
    table[137] = 1.0;
    let spec = AmplitudeSpec::from_probabilities(table).unwrap();
    let schedule = synth::RuntimeSchedule::default_for(&spec);

    let theta = (spec.sum_sq() / 256.0).sqrt().asin();
    let success = |eta: usize| ((2 * eta + 1) as f64 * theta).sin().powi(2);

    let mut first_half_round = None;
    let mut failure = 1.0f64;
    for round in 1..=schedule.max_rounds() {
        let s = success(schedule.eta(round));
        failure *= 1.0 - s;
        if first_half_round.is_none() && s >= 0.5 {
            first_half_round = Some(round);
        }
        if let Some(r0) = first_half_round {
            let budget = 0.5f64.powi((round - r0 + 1) as i32);
            assert!(
                failure <= budget,
                "round {round}: failure {failure} above 2^-{}",
                round - r0 + 1
            );
        }
    }
    let r0 = first_half_round.expect("the capped rounds exceed success 1/2");
    assert!(r0 <= 5, "the schedule reaches success 1/2 by round {r0}");
}
