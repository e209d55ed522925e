//! Dense state-vector simulation of generalized quantum search,
//! superposition synthesis, and seeded measurement sampling.
//!
//! The crate is organized around one operator and one construction:
//!
//! * **Generalized search.** For any unitary program `U`, source state
//!   `|s>`, and target set `t`, the composite `Q = -I_s U^-1 I_t U`
//!   rotates the state inside an exactly invariant two-dimensional
//!   subspace by `2 asin(u)` per step, where
//!   `u = sqrt(sum_t |<t|U|s>|^2)`. The [`amplify`] module builds `Q`,
//!   plans iteration counts, and measures the 2x2 restriction directly.
//! * **State-vector engineering.** Given any table `f` of `N = 2^n`
//!   complex values with `|f| <= 1`, the [`synth`] module assembles a
//!   program whose amplified output carries the register superposition
//!   proportional to `f` behind an ancilla qubit reading 0, in about
//!   `(pi/4) sqrt(N / sum|f|^2)` steps. Measuring that output samples an
//!   arbitrary classical distribution; the [`sampler`] module does so
//!   reproducibly from a 64-bit seed.
//!
//! The [`oracle`] module cross-checks every strided kernel against dense
//! matrices at small widths. The `qsample` CLI (its own crate) exposes
//! the pipeline over JSON spec files.
//!
//! ```
//! use qsample::synth::{self, AmplitudeSpec};
//!
//! // A distribution on four points, prepared and conditioned exactly.
//! let spec = AmplitudeSpec::from_probabilities(vec![0.5, 0.25, 0.125, 0.125])?;
//! let result = synth::synthesize(&spec, None)?;
//! assert!(result.success_probability > 0.5);
//! let expected = [0.5, 0.25, 0.125, 0.125];
//! for (got, want) in result.conditioned_distribution.iter().zip(expected) {
//!     assert!((got - want).abs() < 1e-10);
//! }
//! # Ok::<(), qsample::Error>(())
//! ```

pub mod amplify;
mod error;
pub mod gates;
pub mod oracle;
pub mod sampler;
pub mod statevec;
pub mod synth;

pub use error::{Error, Result};
pub use statevec::{AncillaSplit, BasisIndex, StateVector, MAX_QUBITS};

// The guide chapters double as doctests so that every snippet in the
// book keeps compiling against the current API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states-and-gates.md")]
    mod states_and_gates {}
    #[doc = include_str!("../../../book/src/generalized-search.md")]
    mod generalized_search {}
    #[doc = include_str!("../../../book/src/engineering-superpositions.md")]
    mod engineering_superpositions {}
    #[doc = include_str!("../../../book/src/unknown-normalization.md")]
    mod unknown_normalization {}
    #[doc = include_str!("../../../book/src/measurement-and-sampling.md")]
    mod measurement_and_sampling {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
