//! Brute-force dense-matrix reference for cross-checking the strided
//! kernels.
//!
//! Any program (or the composite `Q`) can be materialized column by
//! column as an explicit `2^m x 2^m` matrix for small `m`, then checked
//! for unitarity and compared entry by entry against the in-place
//! application path. No general eigensolver is shipped: spectral claims
//! live in the two-dimensional invariant subspace, where the
//! characteristic polynomial is quadratic (see
//! [`crate::amplify::eigenvalues_2x2`]), and on the full matrix only
//! norm preservation on random vectors is asserted.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::amplify::{apply_q, SourceSpec, TargetSpec};
use crate::error::{Error, Result};
use crate::gates::{GateStep, PhaseMask, UnitaryProgram};
use crate::statevec::{BasisIndex, StateVector};
use crate::synth::AmplitudeSpec;

/// Default width cap for dense materialization (64 x 64 at most).
pub const DENSE_QUBIT_CAP: usize = 6;

/// A dense complex matrix over `2^m` basis states, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseUnitary {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseUnitary {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| {
                (0..self.dim)
                    .map(|c| self.get(r, c) * v[c])
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let mut out = Self {
            dim: self.dim,
            data: vec![Complex64::new(0.0, 0.0); self.dim * self.dim],
        };
        for r in 0..self.dim {
            for k in 0..self.dim {
                let a = self.get(r, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..self.dim {
                    let v = out.get(r, c) + a * rhs.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.set(r, c, self.get(c, r).conj());
            }
        }
        out
    }

    pub fn negated(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }

    /// Max-norm of `M^dagger M - I`; zero for an exact unitary.
    pub fn unitarity_defect(&self) -> f64 {
        let product = self.adjoint().matmul(self);
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let expected = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((product.get(r, c) - Complex64::new(expected, 0.0)).norm());
            }
        }
        worst
    }

    pub fn max_entry_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_cap(qubits: usize, cap: usize) -> Result<()> {
    if qubits > cap {
        return Err(Error::DenseCapExceeded { qubits, max: cap });
    }
    Ok(())
}

/// Materialize a program: column `i` is the program applied to `|i>`.
pub fn dense_of_program(program: &UnitaryProgram) -> Result<DenseUnitary> {
    dense_of_program_with_cap(program, DENSE_QUBIT_CAP)
}

pub fn dense_of_program_with_cap(program: &UnitaryProgram, cap: usize) -> Result<DenseUnitary> {
    check_cap(program.qubits(), cap)?;
    let dim = 1usize << program.qubits();
    let mut out = DenseUnitary::identity(dim);
    for col in 0..dim {
        let mut state = StateVector::basis(program.qubits(), BasisIndex::new(col))?;
        program.apply(&mut state)?;
        for row in 0..dim {
            out.set(row, col, state.amplitudes()[row]);
        }
    }
    Ok(out)
}

/// Materialize `Q = -R_s P^dagger F_t P` as an explicit matrix product.
pub fn dense_q(
    program: &UnitaryProgram,
    source: &SourceSpec,
    targets: &TargetSpec,
) -> Result<DenseUnitary> {
    dense_q_with_cap(program, source, targets, DENSE_QUBIT_CAP)
}

pub fn dense_q_with_cap(
    program: &UnitaryProgram,
    source: &SourceSpec,
    targets: &TargetSpec,
    cap: usize,
) -> Result<DenseUnitary> {
    check_cap(program.qubits(), cap)?;
    let dim = 1usize << program.qubits();
    let p = dense_of_program_with_cap(program, cap)?;

    let mut flip = DenseUnitary::identity(dim);
    for i in 0..dim {
        if targets.contains(BasisIndex::new(i)) {
            flip.set(i, i, Complex64::new(-1.0, 0.0));
        }
    }

    let s = source.state(program.qubits())?;
    let mut reflect = DenseUnitary::identity(dim);
    for r in 0..dim {
        for c in 0..dim {
            let outer = s.amplitudes()[r] * s.amplitudes()[c].conj();
            let v = reflect.get(r, c) - 2.0 * outer;
            reflect.set(r, c, v);
        }
    }

    Ok(reflect
        .matmul(&p.adjoint())
        .matmul(&flip)
        .matmul(&p)
        .negated())
}

/// Compare strided application of the program against the dense
/// matrix-vector product on seeded random states; returns the largest
/// amplitude deviation seen.
pub fn equivalence_check(program: &UnitaryProgram, trials: usize, seed: u64) -> Result<f64> {
    let dense = dense_of_program(program)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let state = random_state(program.qubits(), &mut rng)?;
        let expected = dense.mul_vec(state.amplitudes());
        let mut actual = state;
        program.apply(&mut actual)?;
        for (a, e) in actual.amplitudes().iter().zip(&expected) {
            worst = worst.max((a - e).norm());
        }
    }
    Ok(worst)
}

/// Largest deviation of `|M v|` from 1 over seeded random unit vectors.
/// For a unitary this is rounding noise, which places every eigenvalue
/// on the unit circle without an eigensolve.
pub fn norm_preservation_defect(matrix: &DenseUnitary, trials: usize, seed: u64) -> f64 {
    let qubits = matrix.dim().trailing_zeros() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let v = random_state(qubits, &mut rng).expect("dense dims stay under the cap");
        let image = matrix.mul_vec(v.amplitudes());
        let norm: f64 = image.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max((norm - 1.0).abs());
    }
    worst
}

/// A Gaussian random state, normalized.
pub fn random_state<R: Rng>(qubits: usize, rng: &mut R) -> Result<StateVector> {
    let dim = 1usize << qubits;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(amps)
}

/// A random bounded amplitude table: each entry uniform on the closed
/// unit disc.
pub fn random_amplitudes<R: Rng>(register_qubits: usize, rng: &mut R) -> Vec<Complex64> {
    (0..1usize << register_qubits)
        .map(|_| {
            let radius = rng.gen::<f64>().sqrt();
            let angle = rng.gen::<f64>() * std::f64::consts::TAU;
            Complex64::from_polar(radius, angle)
        })
        .collect()
}

/// A random short program over every gate kind, for randomized suites.
pub fn random_program<R: Rng>(qubits: usize, rng: &mut R) -> UnitaryProgram {
    if qubits == 0 {
        return UnitaryProgram::identity(0);
    }
    let dim = 1usize << qubits;
    let count = rng.gen_range(1..=4);
    let mut steps = Vec::with_capacity(count);
    for _ in 0..count {
        let step = match rng.gen_range(0..5) {
            0 => GateStep::M {
                qubit: rng.gen_range(0..qubits),
            },
            1 => {
                let mut set: Vec<usize> = (0..qubits).filter(|_| rng.gen_bool(0.5)).collect();
                if set.is_empty() {
                    set.push(rng.gen_range(0..qubits));
                }
                GateStep::WalshHadamard { qubits: set }
            }
            2 => {
                let marked_count = rng.gen_range(1..=dim.min(8));
                let marked = rand::seq::index::sample(rng, dim, marked_count);
                GateStep::PhaseFlip {
                    mask: PhaseMask::from_indices(marked.iter()),
                }
            }
            3 => GateStep::Reflect {
                axis: random_state(qubits, rng).expect("random axes are normalized"),
            },
            _ => GateStep::CondRot {
                spec: AmplitudeSpec::from_amplitudes(random_amplitudes(qubits - 1, rng))
                    .expect("disc samples are bounded"),
                adjoint: rng.gen_bool(0.5),
            },
        };
        steps.push(step);
    }
    UnitaryProgram::new(qubits, steps).expect("generated steps fit the register")
}

/// Column-by-column agreement of [`dense_q`] with [`apply_q`].
pub fn dense_q_application_defect(
    program: &UnitaryProgram,
    source: &SourceSpec,
    targets: &TargetSpec,
) -> Result<f64> {
    let dense = dense_q(program, source, targets)?;
    let dim = dense.dim();
    let mut worst = 0.0f64;
    for col in 0..dim {
        let mut state = StateVector::basis(program.qubits(), BasisIndex::new(col))?;
        apply_q(&mut state, program, source, targets)?;
        for row in 0..dim {
            worst = worst.max((state.amplitudes()[row] - dense.get(row, col)).norm());
        }
    }
    Ok(worst)
}
