//! Readout-noise channel: per-qubit confusion probabilities with a
//! crosstalk inflation factor.
//!
//! Measuring `m` qubits simultaneously inflates each qubit's flip
//! probabilities by `1 + chi·(m−1)`; with the default `chi = 0.26` a second
//! simultaneous measurement makes errors 1.26x more likely. The channel is
//! the tensor product of per-qubit 2x2 confusion matrices and is applied to
//! PMFs analytically.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::pmf::Pmf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Probability of reading 1 when the qubit is 0 (isolated measurement).
    pub p01: f64,
    /// Probability of reading 0 when the qubit is 1 (isolated measurement).
    pub p10: f64,
    /// Fractional error inflation per additional simultaneously measured qubit.
    pub crosstalk_chi: f64,
    /// Global noise multiplier for noise-scale sweeps.
    pub scale: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            p01: 0.04,
            p10: 0.04,
            crosstalk_chi: 0.26,
            scale: 1.0,
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel {
            p01: 0.0,
            p10: 0.0,
            crosstalk_chi: 0.0,
            scale: 0.0,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn is_noiseless(&self) -> bool {
        self.scale == 0.0 || (self.p01 == 0.0 && self.p10 == 0.0)
    }

    /// Effective flip probabilities for a register of `m` simultaneously
    /// measured qubits, clamped to [0, 0.5].
    pub fn effective_flips(&self, m: usize) -> (f64, f64) {
        if m == 0 {
            return (0.0, 0.0);
        }
        let inflation = 1.0 + self.crosstalk_chi * (m as f64 - 1.0);
        let clamp = |p: f64| (self.scale * p * inflation).clamp(0.0, 0.5);
        (clamp(self.p01), clamp(self.p10))
    }
}

/// Push a PMF through the readout channel. The register size `m` is the
/// PMF's own width, so smaller subsets see less crosstalk inflation.
/// Preserves total probability and is linear in the input.
pub fn apply_readout_noise(pmf: &Pmf, noise: &NoiseModel) -> Pmf {
    let m = pmf.width();
    let (e01, e10) = noise.effective_flips(m);
    if e01 == 0.0 && e10 == 0.0 {
        return pmf.clone();
    }

    let mut probs: BTreeMap<u64, f64> = pmf.iter().map(|(&k, &p)| (k, p)).collect();
    for i in 0..m {
        let bit = 1u64 << (m - 1 - i);
        let mut next: BTreeMap<u64, f64> = BTreeMap::new();
        for (&key, &p) in &probs {
            if key & bit == 0 {
                *next.entry(key).or_insert(0.0) += p * (1.0 - e01);
                *next.entry(key | bit).or_insert(0.0) += p * e01;
            } else {
                *next.entry(key).or_insert(0.0) += p * (1.0 - e10);
                *next.entry(key & !bit).or_insert(0.0) += p * e10;
            }
        }
        probs = next;
    }
    Pmf::from_parts(pmf.qubit_labels().to_vec(), probs)
}
