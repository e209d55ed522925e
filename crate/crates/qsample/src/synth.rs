//! Synthesis of a register superposition proportional to a bounded
//! amplitude table `f`.
//!
//! For `N = 2^n` values with `|f(x)| <= 1`, place an ancilla above the
//! `n` register qubits and build `U = U2 U1` where `U1` is the
//! Walsh-Hadamard transform of the register and `U2` the conditional
//! rotation that sends `|0,x>` to `f(x)|0,x> + sqrt(1-|f(x)|^2)|1,x>`.
//! With source `|0,0...0>` and the ancilla-0 half as the target set, the
//! matrix element from the source to target `(0,x)` is `f(x)/sqrt(N)`,
//! so the total overlap is `u = sqrt(sum|f|^2 / N)` and the planned
//! iteration count is about `(pi/4) sqrt(N / sum|f|^2)`.
//!
//! After any number of amplification steps and the final application of
//! `U`, the ancilla-0 component is exactly proportional to
//! `sum_x f(x)|0,x>`: the evolution never leaves `span{|s>, w}`, and
//! both `U|s>` and `U w` have ancilla-0 parts proportional to that
//! vector. Measuring the ancilla as 0 therefore heralds the desired
//! superposition, with probability `sin^2((2 eta + 1) asin(u))`.

use num_complex::Complex64;

use crate::amplify::{self, AmplificationPlan, SourceSpec, TargetSpec};
use crate::error::{Error, Result};
use crate::gates::{GateStep, PhaseMask, UnitaryProgram, EXPLICIT_MASK_LIMIT};
use crate::sampler;
use crate::statevec::{StateVector, MAX_QUBITS};

/// Whether a spec was given as raw amplitudes or as probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecOrigin {
    RawAmplitudes,
    Probabilities,
}

/// A bounded complex amplitude table over `N = 2^n` register values.
///
/// Inputs whose length is not a power of two are zero-padded up to the
/// next one and the original length is recorded. Magnitudes in
/// `(1, 1 + 1e-12]` are treated as serialization noise and clamped back
/// to the unit circle; anything larger is refused.
#[derive(Debug, Clone)]
pub struct AmplitudeSpec {
    register_qubits: usize,
    values: Vec<Complex64>,
    origin: SpecOrigin,
    sum_sq: f64,
    padded_from: Option<usize>,
}

impl AmplitudeSpec {
    /// Build a spec from raw complex amplitudes.
    pub fn from_amplitudes(values: Vec<Complex64>) -> Result<Self> {
        Self::build(values, SpecOrigin::RawAmplitudes)
    }

    /// Build a spec from a table of desired probabilities, rescaled so
    /// the largest amplitude is exactly 1: `f(x) = sqrt(p(x) / max p)`.
    /// This is the scaling that minimizes the iteration count.
    pub fn from_probabilities(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::DegenerateSpec);
        }
        let mut max = 0.0f64;
        for (index, &p) in probabilities.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFiniteValue { index });
            }
            if p < 0.0 {
                return Err(Error::NegativeProbability { index, value: p });
            }
            max = max.max(p);
        }
        if max == 0.0 {
            return Err(Error::DegenerateSpec);
        }
        let values = probabilities
            .iter()
            .map(|&p| Complex64::new((p / max).sqrt(), 0.0))
            .collect();
        Self::build(values, SpecOrigin::Probabilities)
    }

    fn build(mut values: Vec<Complex64>, origin: SpecOrigin) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DegenerateSpec);
        }
        for (index, value) in values.iter_mut().enumerate() {
            if !value.re.is_finite() || !value.im.is_finite() {
                return Err(Error::NonFiniteValue { index });
            }
            let magnitude = value.norm();
            if magnitude > 1.0 + 1e-12 {
                return Err(Error::AmplitudeTooLarge { index, magnitude });
            }
            if magnitude > 1.0 {
                *value /= magnitude;
            }
        }
        let padded_from = if values.len().is_power_of_two() {
            None
        } else {
            let original = values.len();
            values.resize(original.next_power_of_two(), Complex64::new(0.0, 0.0));
            Some(original)
        };
        let sum_sq: f64 = values.iter().map(|v| v.norm_sqr()).sum();
        if sum_sq == 0.0 {
            return Err(Error::DegenerateSpec);
        }
        Ok(Self {
            register_qubits: values.len().trailing_zeros() as usize,
            values,
            origin,
            sum_sq,
            padded_from,
        })
    }

    /// Register width `n`.
    pub fn register_qubits(&self) -> usize {
        self.register_qubits
    }

    /// Table size `N = 2^n` (after padding). Never zero.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, x: usize) -> Complex64 {
        self.values[x]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn origin(&self) -> SpecOrigin {
        self.origin
    }

    /// Cached `sum |f(x)|^2`, always positive.
    pub fn sum_sq(&self) -> f64 {
        self.sum_sq
    }

    /// Original input length when zero padding was applied.
    pub fn padded_from(&self) -> Option<usize> {
        self.padded_from
    }

    /// The distribution `|f|^2 / sum|f|^2` this spec induces.
    pub fn target_distribution(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| v.norm_sqr() / self.sum_sq)
            .collect()
    }
}

/// Outcome of one synthesis run.
#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub plan: AmplificationPlan,
    /// `U Q^eta |s>` over `n + 1` qubits (ancilla highest).
    pub final_state: StateVector,
    /// Probability of observing the ancilla in 0.
    pub success_probability: f64,
    /// Register distribution conditioned on ancilla 0; sums to 1.
    pub conditioned_distribution: Vec<f64>,
    /// Max deviation of the normalized ancilla-0 amplitudes from the
    /// best single complex multiple of `f`.
    pub conditioned_state_error: f64,
}

/// Assemble the synthesis program for `f`: `U1` (Walsh-Hadamard on the
/// register qubits) followed by `U2` (the conditional rotation), with
/// source `|0,0...0>` and the ancilla-0 half as targets.
pub fn build_program(
    spec: &AmplitudeSpec,
) -> Result<(UnitaryProgram, SourceSpec, TargetSpec)> {
    let n = spec.register_qubits();
    let qubits = n + 1;
    if qubits > MAX_QUBITS {
        return Err(Error::RegisterTooLarge {
            qubits,
            max: MAX_QUBITS,
        });
    }
    let program = UnitaryProgram::new(
        qubits,
        vec![
            GateStep::WalshHadamard {
                qubits: (0..n).collect(),
            },
            GateStep::CondRot {
                spec: spec.clone(),
                adjoint: false,
            },
        ],
    )?;
    let source = SourceSpec::basis(0);
    let half = spec.len();
    let targets = if half <= EXPLICIT_MASK_LIMIT {
        TargetSpec::from_indices(0..half)?
    } else {
        TargetSpec::from_mask(PhaseMask::predicate("ancilla-0", move |i| {
            i.value() < half
        }))
    };
    Ok((program, source, targets))
}

/// Run the full pipeline: plan from the measured overlap (unless `eta`
/// is overridden), amplify, and condition on the ancilla.
pub fn synthesize(spec: &AmplitudeSpec, eta_override: Option<usize>) -> Result<SynthesisResult> {
    let (program, source, targets) = build_program(spec)?;
    let u = amplify::overlap_u(&program, &source, &targets)?;
    let plan = amplify::plan(u)?;
    let eta = eta_override.unwrap_or(plan.eta);
    let final_state = amplify::run(&program, &source, &targets, eta)?;

    let split = final_state.split_ancilla()?;
    let mass = split.zero_mass();
    if mass == 0.0 {
        return Err(Error::EmptySample);
    }
    let success_probability = mass.clamp(0.0, 1.0);
    let conditioned_distribution: Vec<f64> =
        split.zero.iter().map(|a| a.norm_sqr() / mass).collect();

    // Best least-squares multiple of f for the normalized ancilla-0
    // amplitudes; exact proportionality drives the error to rounding.
    let scale = mass.sqrt();
    let numerator: Complex64 = spec
        .values()
        .iter()
        .zip(&split.zero)
        .map(|(f, a)| f.conj() * (a / scale))
        .sum();
    let c = numerator / spec.sum_sq();
    let conditioned_state_error = spec
        .values()
        .iter()
        .zip(&split.zero)
        .map(|(f, a)| (a / scale - c * f).norm())
        .fold(0.0, f64::max);

    Ok(SynthesisResult {
        plan,
        final_state,
        success_probability,
        conditioned_distribution,
        conditioned_state_error,
    })
}

/// Default number of measure-and-retry rounds.
pub const DEFAULT_MAX_ROUNDS: usize = 64;

/// Runtime schedule for synthesis when `sum |f|^2` is unknown.
///
/// Round 1 runs zero iterations (one application of `U` alone); round
/// `j >= 2` runs `min(2^(j-1) - 1, cap)` iterations, doubling the
/// runtime until it reaches `cap = ceil(pi/4 sqrt(N))`, the planned
/// count for the worst case `sum|f|^2 = max|f|^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuntimeSchedule {
    max_rounds: usize,
    iteration_cap: usize,
}

impl RuntimeSchedule {
    pub fn new(max_rounds: usize, iteration_cap: usize) -> Self {
        Self {
            max_rounds,
            iteration_cap,
        }
    }

    /// The default schedule for a table of `N = 2^n` values.
    pub fn default_for(spec: &AmplitudeSpec) -> Self {
        let cap = (std::f64::consts::FRAC_PI_4 * (spec.len() as f64).sqrt()).ceil() as usize;
        Self::new(DEFAULT_MAX_ROUNDS, cap)
    }

    pub fn with_max_rounds(self, max_rounds: usize) -> Self {
        Self { max_rounds, ..self }
    }

    /// Iteration count for 1-based round `j`.
    pub fn eta(&self, round: usize) -> usize {
        if round <= 1 {
            return 0;
        }
        let exponent = (round - 1).min(63) as u32;
        let doubling = (1u64 << exponent) - 1;
        doubling.min(self.iteration_cap as u64) as usize
    }

    pub fn max_rounds(&self) -> usize {
        self.max_rounds
    }

    pub fn iteration_cap(&self) -> usize {
        self.iteration_cap
    }
}

/// Result of the adaptive protocol: the accepting round's synthesis
/// (with the state collapsed onto ancilla 0), the number of rounds, and
/// the total iterations consumed across all rounds.
#[derive(Debug, Clone)]
pub struct AdaptiveRun {
    pub result: SynthesisResult,
    pub rounds: usize,
    pub total_iterations: usize,
}

/// Synthesize without consulting `sum |f|^2`: run the schedule's
/// iteration counts round by round, measure the ancilla once per round
/// with a seeded sampler, and stop at the first observed 0.
///
/// A round that measures 1 discards its work and the system is
/// re-prepared from `|s>`. On success the returned state is the
/// post-measurement collapse: the ancilla-0 component renormalized, the
/// ancilla-1 half zeroed. Expected total iterations scale as
/// `sqrt(N / sum|f|^2)`.
pub fn adaptive_synthesize(
    spec: &AmplitudeSpec,
    seed: u64,
    schedule: &RuntimeSchedule,
) -> Result<AdaptiveRun> {
    let n = spec.register_qubits();
    let half = spec.len();
    let mut total_iterations = 0usize;
    for round in 1..=schedule.max_rounds() {
        let eta = schedule.eta(round);
        let result = synthesize(spec, Some(eta))?;
        total_iterations += eta;

        let counts =
            sampler::measure_shots(&result.final_state, 1, sampler::derive_seed(seed, round as u64))?;
        let (&observed, _) = counts.iter().next().expect("one shot yields one count");
        let ancilla = observed.value() >> n;
        if ancilla == 0 {
            let split = result.final_state.split_ancilla()?;
            let mass = split.zero_mass().sqrt();
            let mut amps: Vec<Complex64> = split.zero.iter().map(|a| a / mass).collect();
            amps.resize(2 * half, Complex64::new(0.0, 0.0));
            let collapsed = StateVector::from_amplitudes(amps)?;
            return Ok(AdaptiveRun {
                result: SynthesisResult {
                    final_state: collapsed,
                    ..result
                },
                rounds: round,
                total_iterations,
            });
        }
    }
    Err(Error::AdaptiveExhausted {
        rounds: schedule.max_rounds(),
        total_iterations,
    })
}
