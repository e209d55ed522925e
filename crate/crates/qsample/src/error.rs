//! Error type shared by all modules of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when building states, programs, plans,
/// syntheses, or samples.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for a {qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, qubits: usize },

    #[error("duplicate qubit index {qubit} in gate qubit set")]
    DuplicateQubit { qubit: usize },

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },

    #[error("amplitude array length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },

    #[error("state is not normalized: |amplitudes|^2 sums to {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("register of {qubits} qubits exceeds the {max}-qubit cap")]
    RegisterTooLarge { qubits: usize, max: usize },

    #[error("dense materialization of {qubits} qubits exceeds the {max}-qubit cap")]
    DenseCapExceeded { qubits: usize, max: usize },

    #[error("cannot split an ancilla from an empty register")]
    NoAncilla,

    #[error("amplitude {index} has magnitude {magnitude}, which exceeds 1")]
    AmplitudeTooLarge { index: usize, magnitude: f64 },

    #[error("probability {index} is negative ({value})")]
    NegativeProbability { index: usize, value: f64 },

    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },

    #[error("amplitude table is empty or all-zero")]
    DegenerateSpec,

    #[error("empty target set")]
    EmptyTargets,

    #[error("source state has no overlap with the target set under this program")]
    DegenerateOverlap,

    #[error("overlap u = {u} lies outside (0, 1]")]
    InvalidOverlap { u: f64 },

    #[error("shot count must be at least 1")]
    NoShots,

    #[error("no accepted samples: the ancilla was never observed in 0")]
    EmptySample,

    #[error("target values do not form a distribution (sum = {sum})")]
    NotADistribution { sum: f64 },

    #[error("adaptive protocol exhausted {rounds} rounds after {total_iterations} iterations")]
    AdaptiveExhausted {
        rounds: usize,
        total_iterations: usize,
    },
}
