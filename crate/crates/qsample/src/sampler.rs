//! Seeded measurement sampling and distribution comparison.
//!
//! Shots are drawn by inverse-CDF lookup over the cumulative probability
//! array, using a ChaCha8 stream derived from the caller's 64-bit seed.
//! Determinism is per implementation: identical `(state, shots, seed)`
//! triples always produce identical counts here, but no cross-library
//! bit compatibility is promised. Shots are organized in fixed-size
//! shards with one derived sub-stream each, so the counts do not depend
//! on how many workers a future parallel driver assigns per shard.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amplify::AmplificationPlan;
use crate::error::{Error, Result};
use crate::statevec::{BasisIndex, StateVector};

/// Name of the pseudo-random stream, recorded in reports.
pub const RNG_NAME: &str = "chacha8";

/// Shots per derived sub-stream.
const SHARD_SIZE: u64 = 1 << 16;

fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&shard.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// SplitMix64 mix, used to derive per-round seeds for the adaptive
/// protocol from a master seed.
pub(crate) fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draw `shots` independent basis indices from `|a_i|^2`.
///
/// The cumulative array is built with compensated summation and its last
/// entry forced to exactly 1 before inversion, so no draw can fall out
/// of range.
pub fn measure_shots(
    state: &StateVector,
    shots: u64,
    seed: u64,
) -> Result<BTreeMap<BasisIndex, u64>> {
    if shots == 0 {
        return Err(Error::NoShots);
    }
    let norm_sq = state.norm_sq();
    if !((norm_sq.sqrt() - 1.0).abs() <= 1e-10) {
        return Err(Error::NotNormalized { norm_sq });
    }

    // Kahan-compensated cumulative probabilities.
    let mut cdf = Vec::with_capacity(state.dim());
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    for a in state.amplitudes() {
        let y = a.norm_sqr() - compensation;
        let t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
        cdf.push(sum);
    }
    *cdf.last_mut().expect("states are never empty") = 1.0;

    let mut counts: BTreeMap<BasisIndex, u64> = BTreeMap::new();
    let mut remaining = shots;
    let mut shard = 0u64;
    while remaining > 0 {
        let in_shard = remaining.min(SHARD_SIZE);
        let mut rng = shard_rng(seed, shard);
        for _ in 0..in_shard {
            let x: f64 = rng.gen();
            let index = cdf.partition_point(|&c| c <= x);
            *counts.entry(BasisIndex::new(index)).or_insert(0) += 1;
        }
        remaining -= in_shard;
        shard += 1;
    }
    Ok(counts)
}

/// Keep the shots whose ancilla (most-significant) bit is 0, re-indexed
/// to register values, together with the accepted total.
pub fn condition_on_ancilla(
    counts: &BTreeMap<BasisIndex, u64>,
    register_qubits: usize,
) -> Result<(BTreeMap<BasisIndex, u64>, u64)> {
    let half = 1usize << register_qubits;
    let dim = half << 1;
    let mut conditioned = BTreeMap::new();
    let mut accepted = 0u64;
    for (&index, &count) in counts {
        if index.value() >= dim {
            return Err(Error::IndexOutOfRange {
                index: index.value(),
                dim,
            });
        }
        if index.value() < half {
            // Ancilla 0: the register value is the index itself under
            // the most-significant-ancilla convention.
            conditioned.insert(index, count);
            accepted += count;
        }
    }
    Ok((conditioned, accepted))
}

/// Total variation distance between two distributions on the same support.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "distributions must share a support");
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Distance statistics of an empirical sample against a target
/// distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceStats {
    pub tv_distance: f64,
    /// Pearson statistic over bins with expected count >= 5; smaller
    /// bins are pooled into one. Infinite when observations land where
    /// the pooled expectation is zero.
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
}

/// Compare conditioned counts against a target distribution.
pub fn compare(conditioned: &BTreeMap<BasisIndex, u64>, target: &[f64]) -> Result<DistanceStats> {
    let accepted: u64 = conditioned.values().sum();
    if accepted == 0 {
        return Err(Error::EmptySample);
    }
    for (index, &t) in target.iter().enumerate() {
        if !t.is_finite() {
            return Err(Error::NonFiniteValue { index });
        }
        if t < 0.0 {
            return Err(Error::NegativeProbability { index, value: t });
        }
    }
    let total: f64 = target.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotADistribution { sum: total });
    }
    if let Some(&last) = conditioned.keys().next_back() {
        if last.value() >= target.len() {
            return Err(Error::IndexOutOfRange {
                index: last.value(),
                dim: target.len(),
            });
        }
    }

    let mut empirical = vec![0.0f64; target.len()];
    for (&index, &count) in conditioned {
        empirical[index.value()] = count as f64 / accepted as f64;
    }
    let tv = tv_distance(&empirical, target);

    let mut chi_square = 0.0f64;
    let mut kept = 0usize;
    let mut pooled_observed = 0.0f64;
    let mut pooled_expected = 0.0f64;
    for (x, &t) in target.iter().enumerate() {
        let expected = accepted as f64 * t;
        let observed = empirical[x] * accepted as f64;
        if expected >= 5.0 {
            let d = observed - expected;
            chi_square += d * d / expected;
            kept += 1;
        } else {
            pooled_observed += observed;
            pooled_expected += expected;
        }
    }
    let mut bins = kept;
    if pooled_expected > 0.0 {
        let d = pooled_observed - pooled_expected;
        chi_square += d * d / pooled_expected;
        bins += 1;
    } else if pooled_observed > 0.0 {
        chi_square = f64::INFINITY;
        bins += 1;
    }

    Ok(DistanceStats {
        tv_distance: tv,
        chi_square,
        degrees_of_freedom: bins.saturating_sub(1),
    })
}

/// One full sampling pass over a synthesized state: measure, condition
/// on the ancilla, and compare against the target distribution.
///
/// With zero accepted shots the report is still produced, with `stats`
/// absent; callers decide whether that is an error.
#[derive(Debug, Clone)]
pub struct SampleReport {
    pub shots: u64,
    pub seed: u64,
    pub counts: BTreeMap<BasisIndex, u64>,
    pub conditioned_counts: BTreeMap<BasisIndex, u64>,
    pub accepted: u64,
    pub stats: Option<DistanceStats>,
    pub plan: AmplificationPlan,
    pub rng: &'static str,
}

pub fn sample_report(
    final_state: &StateVector,
    plan: AmplificationPlan,
    target: &[f64],
    shots: u64,
    seed: u64,
) -> Result<SampleReport> {
    if final_state.qubits() == 0 {
        return Err(Error::NoAncilla);
    }
    let register_qubits = final_state.qubits() - 1;
    let half = 1usize << register_qubits;
    if target.len() != half {
        return Err(Error::WidthMismatch {
            left: target.len(),
            right: half,
        });
    }
    let counts = measure_shots(final_state, shots, seed)?;
    let (conditioned_counts, accepted) = condition_on_ancilla(&counts, register_qubits)?;
    let stats = if accepted == 0 {
        None
    } else {
        Some(compare(&conditioned_counts, target)?)
    };
    Ok(SampleReport {
        shots,
        seed,
        counts,
        conditioned_counts,
        accepted,
        stats,
        plan,
        rng: RNG_NAME,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn point_mass_yields_all_shots_on_one_index() {
        let state = StateVector::basis(2, BasisIndex::new(3)).unwrap();
        let counts = measure_shots(&state, 1000, 99).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(counts[&BasisIndex::new(3)], 1000);
    }

    #[test]
    fn identical_seeds_give_bit_identical_counts() {
        let amps = vec![Complex64::new(0.5, 0.0); 4];
        let state = StateVector::from_amplitudes(amps).unwrap();
        let a = measure_shots(&state, 4321, 7).unwrap();
        let b = measure_shots(&state, 4321, 7).unwrap();
        assert_eq!(a, b);
        let c = measure_shots(&state, 4321, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sharding_is_stable_across_the_shard_boundary() {
        // Totals split across shards must agree with the per-shard draws:
        // the first SHARD_SIZE shots of a long run equal a short run.
        let amps = vec![Complex64::new(0.5, 0.0); 4];
        let state = StateVector::from_amplitudes(amps).unwrap();
        let long = measure_shots(&state, SHARD_SIZE + 17, 5).unwrap();
        let head = measure_shots(&state, SHARD_SIZE, 5).unwrap();
        let total_long: u64 = long.values().sum();
        let total_head: u64 = head.values().sum();
        assert_eq!(total_long, SHARD_SIZE + 17);
        assert_eq!(total_head, SHARD_SIZE);
        for (index, count) in &head {
            assert!(long[index] >= *count);
        }
    }

    #[test]
    fn measure_rejects_bad_inputs() {
        let state = StateVector::zero(1).unwrap();
        assert_eq!(measure_shots(&state, 0, 1).unwrap_err(), Error::NoShots);

        let mut bad = state.clone();
        bad.amps_mut()[0] = Complex64::new(0.5, 0.0);
        assert!(matches!(
            measure_shots(&bad, 10, 1).unwrap_err(),
            Error::NotNormalized { .. }
        ));
    }

    #[test]
    fn conditioning_keeps_only_ancilla_zero() {
        let mut counts = BTreeMap::new();
        counts.insert(BasisIndex::new(0), 5);
        counts.insert(BasisIndex::new(4), 7); // ancilla 1 for n = 2
        let (conditioned, accepted) = condition_on_ancilla(&counts, 2).unwrap();
        assert_eq!(accepted, 5);
        assert_eq!(conditioned.len(), 1);
        assert_eq!(conditioned[&BasisIndex::new(0)], 5);

        // All mass on ancilla 1: empty conditioned set.
        let mut counts = BTreeMap::new();
        counts.insert(BasisIndex::new(5), 3);
        counts.insert(BasisIndex::new(7), 2);
        let (conditioned, accepted) = condition_on_ancilla(&counts, 2).unwrap();
        assert!(conditioned.is_empty());
        assert_eq!(accepted, 0);

        // Mixed synthetic counts.
        let mut counts = BTreeMap::new();
        for (i, c) in [(0, 1), (1, 2), (3, 3), (4, 10), (6, 20)] {
            counts.insert(BasisIndex::new(i), c);
        }
        let (_, accepted) = condition_on_ancilla(&counts, 2).unwrap();
        assert_eq!(accepted, 6);

        let mut counts = BTreeMap::new();
        counts.insert(BasisIndex::new(8), 1);
        assert!(condition_on_ancilla(&counts, 2).is_err());
    }

    #[test]
    fn compare_examples() {
        // Empirical equal to target: tv = 0.
        let mut counts = BTreeMap::new();
        counts.insert(BasisIndex::new(0), 50);
        counts.insert(BasisIndex::new(1), 50);
        let stats = compare(&counts, &[0.5, 0.5]).unwrap();
        assert_eq!(stats.tv_distance, 0.0);
        assert!(stats.chi_square.abs() < 1e-12);
        assert_eq!(stats.degrees_of_freedom, 1);

        // Point mass vs uniform on 4: tv = 3/4.
        let mut counts = BTreeMap::new();
        counts.insert(BasisIndex::new(2), 100);
        let stats = compare(&counts, &[0.25; 4]).unwrap();
        assert!((stats.tv_distance - 0.75).abs() < 1e-12);

        // Empty sample refused.
        let counts = BTreeMap::new();
        assert_eq!(compare(&counts, &[1.0]).unwrap_err(), Error::EmptySample);

        // Target that does not sum to one refused.
        let mut counts = BTreeMap::new();
        counts.insert(BasisIndex::new(0), 1);
        assert!(matches!(
            compare(&counts, &[0.7, 0.7]).unwrap_err(),
            Error::NotADistribution { .. }
        ));
    }

    #[test]
    fn chi_square_pools_small_bins() {
        // Ten accepted shots against a distribution with a thin tail:
        // the single fat bin stays, the tail pools into the second bin.
        let mut counts = BTreeMap::new();
        counts.insert(BasisIndex::new(0), 9);
        counts.insert(BasisIndex::new(3), 1);
        let stats = compare(&counts, &[0.9, 0.05, 0.03, 0.02]).unwrap();
        assert_eq!(stats.degrees_of_freedom, 1);
        assert!(stats.chi_square.is_finite());
    }

    #[test]
    fn tv_distance_is_symmetric_and_zero_iff_equal() {
        let p = [0.25, 0.5, 0.25, 0.0];
        let q = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(tv_distance(&p, &q), tv_distance(&q, &p));
        assert_eq!(tv_distance(&p, &p), 0.0);
        assert!(tv_distance(&p, &q) > 0.0);
    }
}
