//! Dense complex state vectors over an `m`-qubit register.
//!
//! A register of `m` qubits spans `2^m` basis states; the state of the
//! register is a length-`2^m` array of complex amplitudes whose squared
//! magnitudes sum to one. Basis index `i` encodes qubit `k` as bit `k`
//! of `i`, so the highest-order bit belongs to the highest-numbered
//! qubit. When a register carries an ancilla (see [`crate::synth`]),
//! the ancilla is by convention that most-significant qubit, which makes
//! [`StateVector::split_ancilla`] a contiguous split of the amplitude
//! array: index `a * 2^n + x` holds ancilla bit `a` and register value `x`.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cap on register width. `2^26` complex doubles is about 1 GiB,
/// which is the largest state this library will allocate unless a caller
/// raises the cap explicitly via [`StateVector::basis_capped`].
pub const MAX_QUBITS: usize = 26;

/// Label of a single basis state of some register.
///
/// The invariant `value < 2^m` is checked wherever an index meets a
/// concrete register, not at construction, since an index on its own
/// does not know its register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(usize);

impl BasisIndex {
    pub const fn new(value: usize) -> Self {
        Self(value)
    }

    pub const fn value(self) -> usize {
        self.0
    }
}

impl From<usize> for BasisIndex {
    fn from(value: usize) -> Self {
        Self(value)
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The two unnormalized halves of a state with an ancilla qubit.
///
/// `zero` holds the amplitudes of basis states whose ancilla bit is 0,
/// `one` those with ancilla bit 1. Neither half is renormalized; their
/// squared norms sum to the squared norm of the original state, and
/// concatenating `zero` then `one` reproduces the original amplitude
/// array bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct AncillaSplit {
    pub zero: Vec<Complex64>,
    pub one: Vec<Complex64>,
}

impl AncillaSplit {
    /// Squared norm of the ancilla-0 component.
    pub fn zero_mass(&self) -> f64 {
        self.zero.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Squared norm of the ancilla-1 component.
    pub fn one_mass(&self) -> f64 {
        self.one.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Dense complex amplitude vector of an `m`-qubit register.
///
/// Constructors produce normalized states (squared norm within `1e-10`
/// of one) and every gate in [`crate::gates`] preserves the norm, so a
/// `StateVector` can always be treated as a unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros basis state `|0...0>`.
    pub fn zero(qubits: usize) -> Result<Self> {
        Self::basis(qubits, BasisIndex::new(0))
    }

    /// Basis state `|i>`: amplitude 1 at `index`, 0 elsewhere.
    ///
    /// A zero-qubit register is allowed and has the single amplitude 1.
    pub fn basis(qubits: usize, index: BasisIndex) -> Result<Self> {
        Self::basis_capped(qubits, index, MAX_QUBITS)
    }

    /// Like [`StateVector::basis`] with an explicit width cap, for callers
    /// that deliberately want more (or less) than [`MAX_QUBITS`].
    pub fn basis_capped(qubits: usize, index: BasisIndex, max_qubits: usize) -> Result<Self> {
        if qubits > max_qubits {
            return Err(Error::RegisterTooLarge {
                qubits,
                max: max_qubits,
            });
        }
        let dim = 1usize << qubits;
        if index.value() >= dim {
            return Err(Error::IndexOutOfRange {
                index: index.value(),
                dim,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index.value()] = Complex64::new(1.0, 0.0);
        Ok(Self { qubits, amps })
    }

    /// Wrap an amplitude array as a state. The length must be a power of
    /// two and the squared norm must be within `1e-10` of one.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo { len: amps.len() });
        }
        let qubits = amps.len().trailing_zeros() as usize;
        let state = Self { qubits, amps };
        let norm_sq = state.norm_sq();
        if !((norm_sq.sqrt() - 1.0).abs() <= 1e-10) {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(state)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Number of basis states, `2^m`.
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Squared norm, i.e. the total probability mass.
    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability of each basis state, `|a_i|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Dirac pairing `<self|other> = sum conj(a_j) * b_j`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if self.qubits != other.qubits {
            return Err(Error::WidthMismatch {
                left: self.qubits,
                right: other.qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Total probability mass on a set of basis states.
    pub fn probability_mass(&self, marked: &BTreeSet<BasisIndex>) -> Result<f64> {
        let dim = self.dim();
        for &index in marked {
            if index.value() >= dim {
                return Err(Error::IndexOutOfRange {
                    index: index.value(),
                    dim,
                });
            }
        }
        Ok(marked
            .iter()
            .map(|i| self.amps[i.value()].norm_sqr())
            .sum())
    }

    /// Split off the ancilla (the most-significant qubit) into the two
    /// unnormalized half-length components.
    pub fn split_ancilla(&self) -> Result<AncillaSplit> {
        if self.qubits == 0 {
            return Err(Error::NoAncilla);
        }
        let half = self.dim() >> 1;
        Ok(AncillaSplit {
            zero: self.amps[..half].to_vec(),
            one: self.amps[half..].to_vec(),
        })
    }
}
