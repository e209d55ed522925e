//! Primitive unitaries and invertible gate programs.
//!
//! The building blocks are the single-qubit transform `M`, the
//! Walsh-Hadamard transform `W` (that is, `M` on each qubit of a set),
//! selective phase inversion of a marked set of basis states, reflection
//! about an arbitrary state `I - 2|s><s|`, and the conditional rotation
//! that loads a bounded amplitude table `f` onto an ancilla:
//!
//! ```text
//! M = 1/sqrt(2) * [[1,  1],
//!                  [1, -1]]
//!
//! |0,x>  ->  f(x)|0,x> + sqrt(1 - |f(x)|^2)|1,x>
//! ```
//!
//! `M`, `W`, phase flips, and reflections are involutions. The
//! conditional rotation is inverted by the per-`x` conjugate-transpose
//! block, which is again a conditional rotation (with `f` conjugated),
//! so every [`UnitaryProgram`] can be inverted step by step without ever
//! materializing a matrix.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::statevec::{BasisIndex, StateVector};
use crate::synth::AmplitudeSpec;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Tolerance on the norm of a reflection axis.
const AXIS_NORM_TOL: f64 = 1e-10;

/// Marked-set representation for selective phase inversion.
///
/// Explicit sorted index sets are exhaustively checkable and are used up
/// to `2^20` states; beyond that a predicate callback avoids storing the
/// set. Both forms must flip exactly the same amplitudes.
#[derive(Clone)]
pub enum PhaseMask {
    Explicit(BTreeSet<BasisIndex>),
    Predicate {
        id: String,
        predicate: Arc<dyn Fn(BasisIndex) -> bool + Send + Sync>,
    },
}

/// Index count above which constructors prefer the predicate form.
pub const EXPLICIT_MASK_LIMIT: usize = 1 << 20;

impl PhaseMask {
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Self::Explicit(indices.into_iter().map(BasisIndex::new).collect())
    }

    pub fn predicate<F>(id: impl Into<String>, predicate: F) -> Self
    where
        F: Fn(BasisIndex) -> bool + Send + Sync + 'static,
    {
        Self::Predicate {
            id: id.into(),
            predicate: Arc::new(predicate),
        }
    }

    pub fn contains(&self, index: BasisIndex) -> bool {
        match self {
            Self::Explicit(set) => set.contains(&index),
            Self::Predicate { predicate, .. } => predicate(index),
        }
    }

    /// Largest explicit index plus one, if this mask is explicit.
    fn explicit_bound(&self) -> Option<usize> {
        match self {
            Self::Explicit(set) => set.iter().next_back().map(|i| i.value() + 1),
            Self::Predicate { .. } => None,
        }
    }
}

impl fmt::Debug for PhaseMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Explicit(set) => f.debug_tuple("Explicit").field(set).finish(),
            Self::Predicate { id, .. } => f.debug_struct("Predicate").field("id", id).finish(),
        }
    }
}

/// One invertible step of a [`UnitaryProgram`].
#[derive(Debug, Clone)]
pub enum GateStep {
    /// `M` on a single qubit.
    M { qubit: usize },
    /// Walsh-Hadamard transform: `M` on each listed qubit in sequence.
    WalshHadamard { qubits: Vec<usize> },
    /// Selective phase inversion of the marked basis states.
    PhaseFlip { mask: PhaseMask },
    /// Reflection `I - 2|axis><axis|` about a normalized state.
    Reflect { axis: StateVector },
    /// Conditional rotation loading `spec` onto the ancilla qubit.
    /// `adjoint` selects the inverse (conjugate-transpose) block.
    CondRot { spec: AmplitudeSpec, adjoint: bool },
}

impl GateStep {
    /// The inverse step, which is always of the same kind.
    pub fn inverse(&self) -> GateStep {
        match self {
            Self::CondRot { spec, adjoint } => Self::CondRot {
                spec: spec.clone(),
                adjoint: !adjoint,
            },
            other => other.clone(),
        }
    }

    /// Apply this step to `state` in place.
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        match self {
            Self::M { qubit } => apply_m(state, *qubit),
            Self::WalshHadamard { qubits } => apply_wh(state, qubits),
            Self::PhaseFlip { mask } => apply_phase_flip(state, mask),
            Self::Reflect { axis } => apply_reflection(state, axis),
            Self::CondRot { spec, adjoint } => cond_rot(state, spec, *adjoint),
        }
    }

    fn validate(&self, qubits: usize) -> Result<()> {
        let dim = 1usize << qubits;
        match self {
            Self::M { qubit } => {
                if *qubit >= qubits {
                    return Err(Error::QubitOutOfRange {
                        qubit: *qubit,
                        qubits,
                    });
                }
            }
            Self::WalshHadamard { qubits: qs } => {
                check_distinct_qubits(qs, qubits)?;
            }
            Self::PhaseFlip { mask } => {
                if let Some(bound) = mask.explicit_bound() {
                    if bound > dim {
                        return Err(Error::IndexOutOfRange {
                            index: bound - 1,
                            dim,
                        });
                    }
                }
            }
            Self::Reflect { axis } => {
                if axis.qubits() != qubits {
                    return Err(Error::WidthMismatch {
                        left: axis.qubits(),
                        right: qubits,
                    });
                }
                check_axis_norm(axis)?;
            }
            Self::CondRot { spec, .. } => {
                if spec.register_qubits() + 1 != qubits {
                    return Err(Error::WidthMismatch {
                        left: spec.register_qubits() + 1,
                        right: qubits,
                    });
                }
            }
        }
        Ok(())
    }
}

/// An ordered, invertible sequence of gate steps over a fixed register
/// width. Applying the program and then its inverse returns any state to
/// itself up to floating rounding.
#[derive(Debug, Clone)]
pub struct UnitaryProgram {
    qubits: usize,
    steps: Vec<GateStep>,
}

impl UnitaryProgram {
    /// Build a program, validating every step against the register width.
    pub fn new(qubits: usize, steps: Vec<GateStep>) -> Result<Self> {
        for step in &steps {
            step.validate(qubits)?;
        }
        Ok(Self { qubits, steps })
    }

    /// The empty program, which acts as the identity.
    pub fn identity(qubits: usize) -> Self {
        Self {
            qubits,
            steps: Vec::new(),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn steps(&self) -> &[GateStep] {
        &self.steps
    }

    /// Apply the steps in order.
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        self.check_width(state)?;
        for step in &self.steps {
            step.apply(state)?;
        }
        Ok(())
    }

    /// Apply the inverted steps in reverse order.
    pub fn apply_inverse(&self, state: &mut StateVector) -> Result<()> {
        self.check_width(state)?;
        for step in self.steps.iter().rev() {
            match step {
                GateStep::CondRot { spec, adjoint } => cond_rot(state, spec, !adjoint)?,
                other => other.apply(state)?,
            }
        }
        Ok(())
    }

    /// The reversed program of inverted steps.
    pub fn inverse(&self) -> UnitaryProgram {
        Self {
            qubits: self.qubits,
            steps: self.steps.iter().rev().map(GateStep::inverse).collect(),
        }
    }

    fn check_width(&self, state: &StateVector) -> Result<()> {
        if state.qubits() != self.qubits {
            return Err(Error::WidthMismatch {
                left: state.qubits(),
                right: self.qubits,
            });
        }
        Ok(())
    }
}

fn check_distinct_qubits(qs: &[usize], qubits: usize) -> Result<()> {
    let mut seen = 0u64;
    for &q in qs {
        if q >= qubits {
            return Err(Error::QubitOutOfRange { qubit: q, qubits });
        }
        let bit = 1u64 << q;
        if seen & bit != 0 {
            return Err(Error::DuplicateQubit { qubit: q });
        }
        seen |= bit;
    }
    Ok(())
}

fn check_axis_norm(axis: &StateVector) -> Result<()> {
    let norm_sq = axis.norm_sq();
    if !((norm_sq.sqrt() - 1.0).abs() <= AXIS_NORM_TOL) {
        return Err(Error::NotNormalized { norm_sq });
    }
    Ok(())
}

/// Apply `M` to one qubit: each amplitude pair `(a0, a1)` differing only
/// in bit `qubit` becomes `((a0 + a1)/sqrt(2), (a0 - a1)/sqrt(2))`.
pub fn apply_m(state: &mut StateVector, qubit: usize) -> Result<()> {
    let m = state.qubits();
    if qubit >= m {
        return Err(Error::QubitOutOfRange { qubit, qubits: m });
    }
    let amps = state.amps_mut();
    let stride = 1usize << qubit;
    let dim = amps.len();
    let mut base = 0;
    while base < dim {
        for i in base..base + stride {
            let j = i + stride;
            let a0 = amps[i];
            let a1 = amps[j];
            amps[i] = (a0 + a1) * FRAC_1_SQRT_2;
            amps[j] = (a0 - a1) * FRAC_1_SQRT_2;
        }
        base += stride << 1;
    }
    Ok(())
}

/// Walsh-Hadamard transform: `M` applied to each listed qubit in
/// sequence. The qubit set must be duplicate-free.
pub fn apply_wh(state: &mut StateVector, qubits: &[usize]) -> Result<()> {
    check_distinct_qubits(qubits, state.qubits())?;
    for &q in qubits {
        apply_m(state, q)?;
    }
    Ok(())
}

/// Selective phase inversion: negate the amplitude of every marked basis
/// state. Probabilities are untouched.
pub fn apply_phase_flip(state: &mut StateVector, mask: &PhaseMask) -> Result<()> {
    let dim = state.dim();
    match mask {
        PhaseMask::Explicit(set) => {
            if let Some(last) = set.iter().next_back() {
                if last.value() >= dim {
                    return Err(Error::IndexOutOfRange {
                        index: last.value(),
                        dim,
                    });
                }
            }
            let amps = state.amps_mut();
            for index in set {
                amps[index.value()] = -amps[index.value()];
            }
        }
        PhaseMask::Predicate { predicate, .. } => {
            let amps = state.amps_mut();
            for (i, amp) in amps.iter_mut().enumerate() {
                if predicate(BasisIndex::new(i)) {
                    *amp = -*amp;
                }
            }
        }
    }
    Ok(())
}

/// Reflection about `axis`: `state - 2 <axis|state> axis`.
///
/// The axis norm must be within `1e-10` of one and is renormalized
/// internally, so composed states that carry rounding drift are accepted.
pub fn apply_reflection(state: &mut StateVector, axis: &StateVector) -> Result<()> {
    if axis.qubits() != state.qubits() {
        return Err(Error::WidthMismatch {
            left: axis.qubits(),
            right: state.qubits(),
        });
    }
    check_axis_norm(axis)?;
    let norm_sq = axis.norm_sq();
    let ip: Complex64 = axis
        .amplitudes()
        .iter()
        .zip(state.amplitudes())
        .map(|(a, s)| a.conj() * s)
        .sum();
    let factor = ip * (2.0 / norm_sq);
    let amps = state.amps_mut();
    for (s, a) in amps.iter_mut().zip(axis.amplitudes()) {
        *s -= factor * a;
    }
    Ok(())
}

/// Conditional rotation of the ancilla (the most-significant qubit)
/// against the amplitude table `spec`.
///
/// For each register value `x`, the 2x2 block on `(|0,x>, |1,x>)` is
///
/// ```text
/// [[ f(x),        g(x)     ],       g(x) = sqrt(1 - |f(x)|^2)
///  [ g(x),  -conj(f(x))    ]]
/// ```
///
/// so `|0,x> -> f(x)|0,x> + g(x)|1,x>`. The completion of the second
/// column keeps each block exactly unitary for complex `f` and reduces
/// to a plain rotation when `f` is real.
pub fn apply_cond_rot(state: &mut StateVector, spec: &AmplitudeSpec) -> Result<()> {
    cond_rot(state, spec, false)
}

/// Inverse of [`apply_cond_rot`]: the per-`x` conjugate-transpose block,
/// which equals the forward rotation built from `conj(f)`.
pub fn apply_cond_rot_adjoint(state: &mut StateVector, spec: &AmplitudeSpec) -> Result<()> {
    cond_rot(state, spec, true)
}

fn cond_rot(state: &mut StateVector, spec: &AmplitudeSpec, adjoint: bool) -> Result<()> {
    let m = state.qubits();
    if m == 0 || spec.register_qubits() != m - 1 {
        return Err(Error::WidthMismatch {
            left: spec.register_qubits() + 1,
            right: m,
        });
    }
    let half = state.dim() >> 1;
    let amps = state.amps_mut();
    for x in 0..half {
        let mut f = spec.value(x);
        if adjoint {
            f = f.conj();
        }
        // |f| <= 1 is enforced by the AmplitudeSpec constructor; the max
        // guards against 1 - |f|^2 rounding to a tiny negative.
        let g = (1.0 - f.norm_sqr()).max(0.0).sqrt();
        let a0 = amps[x];
        let a1 = amps[half + x];
        amps[x] = f * a0 + g * a1;
        amps[half + x] = g * a0 - f.conj() * a1;
    }
    Ok(())
}
