//! Property tests for the state and gate layers: norm preservation,
//! involutions, inversion round trips, and pairing identities.

use num_complex::Complex64;
use proptest::prelude::*;
use qsample::gates::{
    apply_cond_rot, apply_cond_rot_adjoint, apply_m, apply_phase_flip, apply_reflection,
    apply_wh, PhaseMask,
};
use qsample::oracle;
use qsample::synth::AmplitudeSpec;
use qsample::{BasisIndex, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn max_dev(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn arb_state(qubits: usize) -> impl Strategy<Value = StateVector> {
    let dim = 1usize << qubits;
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter_map("norm too small", |pairs| {
            let amps: Vec<Complex64> = pairs
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-3 {
                return None;
            }
            let amps = amps.into_iter().map(|a| a / norm).collect();
            Some(StateVector::from_amplitudes(amps).expect("normalized by construction"))
        })
}

/// Bounded amplitude tables including the |f| = 0 and |f| = 1 boundary.
fn arb_table(register_qubits: usize) -> impl Strategy<Value = Vec<Complex64>> {
    let entry = prop_oneof![
        1 => Just(Complex64::new(0.0, 0.0)),
        1 => Just(Complex64::new(1.0, 0.0)),
        1 => (0.0f64..std::f64::consts::TAU).prop_map(|t| Complex64::from_polar(1.0, t)),
        3 => (0.0f64..1.0, 0.0f64..std::f64::consts::TAU)
            .prop_map(|(r2, t)| Complex64::from_polar(r2.sqrt(), t)),
    ];
    prop::collection::vec(entry, 1usize << register_qubits).prop_filter(
        "all-zero table",
        |t| t.iter().any(|v| v.norm_sqr() > 0.0),
    )
}

proptest! {
    #[test]
    fn m_preserves_norm_and_is_an_involution(state in arb_state(3), qubit in 0usize..3) {
        let original = state.clone();
        let mut s = state;
        apply_m(&mut s, qubit).unwrap();
        prop_assert!((s.norm_sq() - 1.0).abs() <= 1e-12);
        apply_m(&mut s, qubit).unwrap();
        prop_assert!(max_dev(&s, &original) <= 1e-12);
    }

    #[test]
    fn wh_is_an_involution(state in arb_state(3)) {
        let original = state.clone();
        let mut s = state;
        apply_wh(&mut s, &[0, 1, 2]).unwrap();
        prop_assert!((s.norm_sq() - 1.0).abs() <= 1e-12);
        apply_wh(&mut s, &[0, 1, 2]).unwrap();
        prop_assert!(max_dev(&s, &original) <= 1e-13);
    }

    #[test]
    fn phase_flip_preserves_magnitudes_bit_exactly(
        state in arb_state(4),
        marked in prop::collection::btree_set(0usize..16, 0..16),
    ) {
        let before: Vec<f64> = state.probabilities();
        let mut s = state;
        apply_phase_flip(&mut s, &PhaseMask::from_indices(marked.clone())).unwrap();
        for (p, q) in before.iter().zip(s.probabilities()) {
            prop_assert_eq!(*p, q);
        }
        // Involution, bit-exactly.
        let mid = s.clone();
        apply_phase_flip(&mut s, &PhaseMask::from_indices(marked.clone())).unwrap();
        apply_phase_flip(&mut s, &PhaseMask::from_indices(marked)).unwrap();
        prop_assert_eq!(s.amplitudes(), mid.amplitudes());
    }

    #[test]
    fn reflection_is_an_involution(state in arb_state(3), axis in arb_state(3)) {
        let original = state.clone();
        let mut s = state;
        apply_reflection(&mut s, &axis).unwrap();
        prop_assert!((s.norm_sq() - 1.0).abs() <= 1e-12);
        apply_reflection(&mut s, &axis).unwrap();
        prop_assert!(max_dev(&s, &original) <= 1e-12);
    }

    #[test]
    fn cond_rot_round_trips_through_its_adjoint(
        state in arb_state(4),
        table in arb_table(3),
    ) {
        let spec = AmplitudeSpec::from_amplitudes(table).unwrap();
        let original = state.clone();
        let mut s = state;
        apply_cond_rot(&mut s, &spec).unwrap();
        prop_assert!((s.norm_sq() - 1.0).abs() <= 1e-12);
        apply_cond_rot_adjoint(&mut s, &spec).unwrap();
        prop_assert!(max_dev(&s, &original) <= 1e-12);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric(a in arb_state(3), b in arb_state(3)) {
        let ab = a.inner_product(&b).unwrap();
        let ba = b.inner_product(&a).unwrap();
        prop_assert!((ab - ba.conj()).norm() <= 1e-14);
    }

    #[test]
    fn probability_mass_of_everything_is_the_squared_norm(state in arb_state(4)) {
        let all: std::collections::BTreeSet<_> = (0..16).map(BasisIndex::new).collect();
        let mass = state.probability_mass(&all).unwrap();
        prop_assert!((mass - state.norm_sq()).abs() <= 1e-12);
    }

    #[test]
    fn split_ancilla_concatenates_back_bit_exactly(state in arb_state(4)) {
        let split = state.split_ancilla().unwrap();
        prop_assert!((split.zero_mass() + split.one_mass() - 1.0).abs() <= 1e-10);
        let mut rebuilt = split.zero.clone();
        rebuilt.extend_from_slice(&split.one);
        prop_assert_eq!(rebuilt.as_slice(), state.amplitudes());
    }

    #[test]
    fn random_programs_invert_cleanly(seed in any::<u64>(), qubits in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let program = oracle::random_program(qubits, &mut rng);
        let original = oracle::random_state(qubits, &mut rng).unwrap();
        let mut s = original.clone();
        program.apply(&mut s).unwrap();
        prop_assert!((s.norm_sq() - 1.0).abs() <= 1e-12);
        program.apply_inverse(&mut s).unwrap();
        prop_assert!(max_dev(&s, &original) <= 1e-12);
    }

    #[test]
    fn sampling_is_deterministic_per_seed(state in arb_state(3), seed in any::<u64>()) {
        let a = qsample::sampler::measure_shots(&state, 257, seed).unwrap();
        let b = qsample::sampler::measure_shots(&state, 257, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let total: u64 = a.values().sum();
        prop_assert_eq!(total, 257);
    }

    #[test]
    fn tv_distance_is_symmetric_and_detects_equality(
        p in prop::collection::vec(0.0f64..1.0, 8),
        q in prop::collection::vec(0.0f64..1.0, 8),
    ) {
        let norm = |v: &[f64]| -> Vec<f64> {
            let s: f64 = v.iter().sum::<f64>().max(1e-9);
            v.iter().map(|x| x / s).collect()
        };
        let p = norm(&p);
        let q = norm(&q);
        let d_pq = qsample::sampler::tv_distance(&p, &q);
        let d_qp = qsample::sampler::tv_distance(&q, &p);
        prop_assert_eq!(d_pq, d_qp);
        prop_assert!(d_pq >= 0.0 && d_pq <= 1.0 + 1e-12);
        prop_assert_eq!(qsample::sampler::tv_distance(&p, &p), 0.0);
        if d_pq == 0.0 {
            for (a, b) in p.iter().zip(&q) {
                prop_assert_eq!(a, b);
            }
        }
    }
}

/// Every gate kind, rendered dense, is unitary to 1e-12.
#[test]
fn every_gate_kind_is_unitary_in_dense_form() {
    use qsample::gates::{GateStep, UnitaryProgram};
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let qubits = 4;
    let axis = oracle::random_state(qubits, &mut rng).unwrap();
    let spec = AmplitudeSpec::from_amplitudes(oracle::random_amplitudes(qubits - 1, &mut rng))
        .unwrap();
    let kinds = vec![
        GateStep::M { qubit: 2 },
        GateStep::WalshHadamard {
            qubits: vec![0, 1, 2, 3],
        },
        GateStep::PhaseFlip {
            mask: PhaseMask::from_indices([1, 7, 9]),
        },
        GateStep::Reflect { axis },
        GateStep::CondRot {
            spec: spec.clone(),
            adjoint: false,
        },
        GateStep::CondRot {
            spec,
            adjoint: true,
        },
    ];
    for step in kinds {
        let label = format!("{step:?}");
        let program = UnitaryProgram::new(qubits, vec![step]).unwrap();
        let dense = oracle::dense_of_program(&program).unwrap();
        let defect = dense.unitarity_defect();
        assert!(defect <= 1e-12, "{label}: defect {defect}");
    }
}
