//! Generalized amplitude amplification with arbitrary unitaries.
//!
//! Given a unitary program `U`, a source state `|s>`, and a non-empty set
//! of target basis states `t`, one amplification step is the composite
//!
//! ```text
//! Q = -I_s U^-1 I_t U
//! ```
//!
//! applied right to left: `U` first, then selective phase inversion of
//! the targets, then `U^-1`, then reflection about the source, then a
//! global sign. Writing `U_ts = <t|U|s>` and
//!
//! ```text
//! u = sqrt(sum_t |U_ts|^2),        w = sum_t U_ts U^-1|t>,
//! ```
//!
//! the action of `Q` closes exactly on the two-dimensional complex space
//! spanned by `|s>` and `w`:
//!
//! ```text
//! Q |s>    = (1 - 4u^2) |s> + 2u (w/u)
//! Q (w/u)  =      -2u   |s> +  1 (w/u)
//! ```
//!
//! so in the `(|s>, w/u)` pair `Q` is the real 2x2 matrix
//! `[[1-4u^2, -2u], [2u, 1]]` with eigenvalues `exp(+-2i asin(u))`, and
//! `eta` iterations followed by one application of `U` leave probability
//! `sin^2((2 eta + 1) asin(u))` on the targets. These identities are
//! exact for complex `U_ts` as well; [`subspace_analysis`] measures them
//! directly on a concrete instance, and the `oracle` module cross-checks
//! everything against dense matrices.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::{apply_phase_flip, apply_reflection, PhaseMask, UnitaryProgram};
use crate::statevec::{BasisIndex, StateVector};

/// Residual tolerance below which the span `{|s>, w}` is treated as
/// one-dimensional (`u` numerically 1).
const COLLINEAR_TOL: f64 = 1e-8;

/// The non-empty set of target basis states.
#[derive(Debug, Clone)]
pub struct TargetSpec {
    mask: PhaseMask,
}

impl TargetSpec {
    /// Explicit target set. Fails on an empty iterator.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mask = PhaseMask::from_indices(indices);
        match &mask {
            PhaseMask::Explicit(set) if set.is_empty() => Err(Error::EmptyTargets),
            _ => Ok(Self { mask }),
        }
    }

    /// Predicate-backed target set for registers too wide for an
    /// explicit set. Emptiness cannot be checked up front; a mask that
    /// marks nothing surfaces later as a degenerate overlap.
    pub fn from_mask(mask: PhaseMask) -> Self {
        Self { mask }
    }

    pub fn contains(&self, index: BasisIndex) -> bool {
        self.mask.contains(index)
    }

    pub fn phase_mask(&self) -> &PhaseMask {
        &self.mask
    }
}

/// The source state: either a basis state or an arbitrary normalized
/// superposition. For a basis source the reflection `I - 2|s><s|` is a
/// plain phase flip; for an arbitrary source it is dense but still never
/// materialized as a matrix.
#[derive(Debug, Clone)]
pub enum SourceSpec {
    Basis(BasisIndex),
    Arbitrary(StateVector),
}

impl SourceSpec {
    pub fn basis(index: usize) -> Self {
        Self::Basis(BasisIndex::new(index))
    }

    /// An arbitrary source state, required to be normalized within `1e-10`.
    pub fn arbitrary(state: StateVector) -> Result<Self> {
        let norm_sq = state.norm_sq();
        if !((norm_sq.sqrt() - 1.0).abs() <= 1e-10) {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self::Arbitrary(state))
    }

    /// Materialize the source as a state vector of width `qubits`.
    pub fn state(&self, qubits: usize) -> Result<StateVector> {
        match self {
            Self::Basis(index) => StateVector::basis(qubits, *index),
            Self::Arbitrary(state) => {
                if state.qubits() != qubits {
                    return Err(Error::WidthMismatch {
                        left: state.qubits(),
                        right: qubits,
                    });
                }
                Ok(state.clone())
            }
        }
    }
}

/// How many amplification steps to run and what they achieve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationPlan {
    /// Total source-target overlap `u = sqrt(sum_t |U_ts|^2)`, in `(0, 1]`.
    pub u: f64,
    /// Rotation half-angle `asin(u)`.
    pub theta: f64,
    /// Iteration count: the non-negative integer that brings
    /// `(2 eta + 1) theta` closest to `pi/2`, ties toward fewer steps.
    pub eta: usize,
    /// `sin^2((2 eta + 1) theta)`.
    pub predicted_success: f64,
}

/// The measured 2x2 restriction of `Q` to `span{|s>, w}`.
#[derive(Debug, Clone)]
pub struct SubspaceAnalysis {
    pub u: f64,
    /// Coefficients of `Q|s>` (first column) and `Q(w/u)` (second
    /// column) in the non-orthogonal `(|s>, w/u)` pair.
    pub two_by_two: [[Complex64; 2]; 2],
    /// Eigenvalues of the 2x2 map, positive-imaginary-part first.
    pub eigenvalues: [Complex64; 2],
    /// Norm of the component of `Q|s>` outside `span{|s>, w}`.
    pub residual_s: f64,
    /// Norm of the component of `Q(w/u)` outside `span{|s>, w}`.
    pub residual_w: f64,
}

/// Total overlap `u = sqrt(sum_t |<t|U|s>|^2)`, computed by applying the
/// program to the source state and summing the marked probability mass.
///
/// Zero overlap is refused: amplification cannot rotate out of nothing.
pub fn overlap_u(program: &UnitaryProgram, source: &SourceSpec, targets: &TargetSpec) -> Result<f64> {
    let mut state = source.state(program.qubits())?;
    program.apply(&mut state)?;
    let mass: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| targets.contains(BasisIndex::new(*i)))
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let u = mass.sqrt().min(1.0);
    if u == 0.0 {
        return Err(Error::DegenerateOverlap);
    }
    Ok(u)
}

/// Build the [`AmplificationPlan`] for overlap `u`.
///
/// Success after `j` iterations is `sin^2((2j + 1) theta)`, which peaks
/// whenever the accumulated angle meets an odd multiple of `pi/2`. The
/// planned `eta` is the integer closest to `pi/(4 theta) - 1/2`, i.e.
/// the count whose angle lands nearest the first peak; exact ties round
/// down because both neighbors succeed equally well and fewer steps are
/// cheaper. For `u << 1` this is the familiar `pi/(4u)` step count,
/// within one iteration.
pub fn plan(u: f64) -> Result<AmplificationPlan> {
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::InvalidOverlap { u });
    }
    let theta = u.asin();
    let x = PI / (4.0 * theta) - 0.5;
    let eta = if x <= 0.0 {
        0
    } else {
        let floor = x.floor();
        let rounded = if x - floor > 0.5 { floor + 1.0 } else { floor };
        rounded as usize
    };
    let predicted_success = ((2 * eta + 1) as f64 * theta).sin().powi(2).clamp(0.0, 1.0);
    Ok(AmplificationPlan {
        u,
        theta,
        eta,
        predicted_success,
    })
}

/// One amplification step `Q = -I_s U^-1 I_t U`, in place.
pub fn apply_q(
    state: &mut StateVector,
    program: &UnitaryProgram,
    source: &SourceSpec,
    targets: &TargetSpec,
) -> Result<()> {
    program.apply(state)?;
    apply_phase_flip(state, targets.phase_mask())?;
    program.apply_inverse(state)?;
    match source {
        SourceSpec::Basis(index) => {
            let dim = state.dim();
            if index.value() >= dim {
                return Err(Error::IndexOutOfRange {
                    index: index.value(),
                    dim,
                });
            }
            let amps = state.amps_mut();
            amps[index.value()] = -amps[index.value()];
        }
        SourceSpec::Arbitrary(axis) => apply_reflection(state, axis)?,
    }
    for a in state.amps_mut() {
        *a = -*a;
    }
    Ok(())
}

/// Run `eta` amplification steps from the source and finish with one
/// application of `U`, returning `U Q^eta |s>`.
pub fn run(
    program: &UnitaryProgram,
    source: &SourceSpec,
    targets: &TargetSpec,
    eta: usize,
) -> Result<StateVector> {
    let mut state = source.state(program.qubits())?;
    for _ in 0..eta {
        apply_q(&mut state, program, source, targets)?;
    }
    program.apply(&mut state)?;
    Ok(state)
}

/// Eigenvalues of a complex 2x2 matrix by the closed-form quadratic,
/// positive-imaginary-part first.
pub fn eigenvalues_2x2(matrix: &[[Complex64; 2]; 2]) -> [Complex64; 2] {
    let trace = matrix[0][0] + matrix[1][1];
    let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
    let disc = (trace * trace - 4.0 * det).sqrt();
    let a = (trace + disc) * 0.5;
    let b = (trace - disc) * 0.5;
    if a.im >= b.im {
        [a, b]
    } else {
        [b, a]
    }
}

/// Construct `w = sum_t U_ts U^-1|t>` explicitly, apply `Q` to `|s>` and
/// to `w/u`, and report the induced 2x2 map, its eigenvalues, and the
/// residual norms outside `span{|s>, w}`.
///
/// Residuals are measured against an orthonormal pair built from
/// `{|s>, w}` by a single projection step; the pair itself is
/// non-orthogonal (`<s|w> = u^2`), so the reported coefficients are
/// converted back to `(|s>, w/u)` coordinates afterwards. When `u` is
/// numerically 1 the span collapses to the source line and the canonical
/// matrix `[[1-4u^2, -2u], [2u, 1]]` is reported directly.
pub fn subspace_analysis(
    program: &UnitaryProgram,
    source: &SourceSpec,
    targets: &TargetSpec,
) -> Result<SubspaceAnalysis> {
    let qubits = program.qubits();
    let s = source.state(qubits)?;

    // Forward image of the source, and the target components U_ts.
    let mut u_s = s.clone();
    program.apply(&mut u_s)?;
    let dim = u_s.dim();
    let mut projected = vec![Complex64::new(0.0, 0.0); dim];
    let mut mass = 0.0;
    for i in 0..dim {
        if targets.contains(BasisIndex::new(i)) {
            let a = u_s.amplitudes()[i];
            mass += a.norm_sqr();
            projected[i] = a;
        }
    }
    let u = mass.sqrt().min(1.0);
    if u == 0.0 {
        return Err(Error::DegenerateOverlap);
    }

    // w/u = U^-1 (sum_t U_ts |t>) / u, a normalized vector.
    for a in &mut projected {
        *a /= u;
    }
    let mut w_hat = StateVector::from_amplitudes(projected)?;
    program.apply_inverse(&mut w_hat)?;

    let mut q_s = s.clone();
    apply_q(&mut q_s, program, source, targets)?;
    let mut q_w = w_hat.clone();
    apply_q(&mut q_w, program, source, targets)?;

    // Orthonormal pair: e1 = |s>, e2 = (w/u - <s|w/u> |s>) normalized.
    let overlap_sw = s.inner_product(&w_hat)?;
    let mut e2_raw: Vec<Complex64> = w_hat
        .amplitudes()
        .iter()
        .zip(s.amplitudes())
        .map(|(w, sv)| w - overlap_sw * sv)
        .collect();
    let e2_norm = e2_raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();

    let project = |v: &StateVector, e2: Option<&[Complex64]>| -> Result<(Complex64, Complex64, f64)> {
        let c1 = s.inner_product(v)?;
        let c2 = match e2 {
            Some(e2) => e2
                .iter()
                .zip(v.amplitudes())
                .map(|(a, b)| a.conj() * b)
                .sum(),
            None => Complex64::new(0.0, 0.0),
        };
        let mut residual_sq = 0.0;
        for i in 0..v.dim() {
            let mut r = v.amplitudes()[i] - c1 * s.amplitudes()[i];
            if let Some(e2) = e2 {
                r -= c2 * e2[i];
            }
            residual_sq += r.norm_sqr();
        }
        Ok((c1, c2, residual_sq.max(0.0).sqrt()))
    };

    if e2_norm < COLLINEAR_TOL {
        // u ~ 1: w/u coincides with |s> and the invariant space is a line.
        let (_, _, residual_s) = project(&q_s, None)?;
        let (_, _, residual_w) = project(&q_w, None)?;
        let two_by_two = canonical_two_by_two(u);
        let eigenvalues = eigenvalues_2x2(&two_by_two);
        return Ok(SubspaceAnalysis {
            u,
            two_by_two,
            eigenvalues,
            residual_s,
            residual_w,
        });
    }

    for a in &mut e2_raw {
        *a /= e2_norm;
    }
    let (s1, s2, residual_s) = project(&q_s, Some(&e2_raw))?;
    let (w1, w2, residual_w) = project(&q_w, Some(&e2_raw))?;

    // Convert from the orthonormal pair back to (|s>, w/u): a vector
    // a e1 + b e2 has w/u-coefficient b / |e2_raw| and s-coefficient
    // a - b <s|w/u> / |e2_raw|.
    let to_pair = |a: Complex64, b: Complex64| -> [Complex64; 2] {
        let wu = b / e2_norm;
        [a - wu * overlap_sw, wu]
    };
    let col_s = to_pair(s1, s2);
    let col_w = to_pair(w1, w2);
    let two_by_two = [[col_s[0], col_w[0]], [col_s[1], col_w[1]]];
    let eigenvalues = eigenvalues_2x2(&two_by_two);

    Ok(SubspaceAnalysis {
        u,
        two_by_two,
        eigenvalues,
        residual_s,
        residual_w,
    })
}

fn canonical_two_by_two(u: f64) -> [[Complex64; 2]; 2] {
    [
        [
            Complex64::new(1.0 - 4.0 * u * u, 0.0),
            Complex64::new(-2.0 * u, 0.0),
        ],
        [Complex64::new(2.0 * u, 0.0), Complex64::new(1.0, 0.0)],
    ]
}
