//! Dense statevector simulation of the hardware-efficient ansatz.
//!
//! The ansatz applies, per repetition block, an RY and an RZ rotation on
//! every qubit followed by a CX entanglement pattern, and closes with a final
//! rotation layer without a trailing entangler; `2·Q·(reps+1)` parameters in
//! total. Measurement in a Pauli basis is a per-qubit basis change (X: H,
//! Y: S† then H, Z: nothing) followed by a computational-basis readout.
//!
//! Bit ordering convention, used everywhere: bitstring position `i`
//! corresponds to `qubit_labels[i]`, and qubit 0 is the leftmost character.
//! For the full register this means qubit `q` occupies amplitude-index bit
//! `Q-1-q`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::pauli::{MeasurementBasis, Pauli};
use crate::pmf::Pmf;
use crate::{Result, MAX_QUBITS};

/// CX connectivity pattern of the ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entanglement {
    /// CX on every ordered pair (i, j) with i < j.
    Full,
    /// CX on neighbours (i, i+1).
    Linear,
    /// Linear plus the closing pair (Q-1, 0).
    Circular,
}

impl std::str::FromStr for Entanglement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Entanglement::Full),
            "linear" => Ok(Entanglement::Linear),
            "circular" => Ok(Entanglement::Circular),
            other => Err(Error::InvalidConfig(format!(
                "unknown entanglement {other:?} (expected full, linear, or circular)"
            ))),
        }
    }
}

/// Shape of the hardware-efficient ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub qubit_count: usize,
    pub reps: usize,
    pub entanglement: Entanglement,
}

impl AnsatzSpec {
    pub fn new(qubit_count: usize, reps: usize, entanglement: Entanglement) -> Result<Self> {
        if qubit_count == 0 {
            return Err(Error::ZeroQubits);
        }
        if qubit_count > MAX_QUBITS {
            return Err(Error::QubitCapExceeded(qubit_count, MAX_QUBITS));
        }
        Ok(AnsatzSpec {
            qubit_count,
            reps,
            entanglement,
        })
    }

    /// Two rotation angles per qubit per layer; `reps+1` layers.
    pub fn parameter_count(&self) -> usize {
        2 * self.qubit_count * (self.reps + 1)
    }

    /// CX (control, target) pairs of one entanglement block.
    pub fn entangler_pairs(&self) -> Vec<(usize, usize)> {
        let q = self.qubit_count;
        if q < 2 {
            return Vec::new();
        }
        match self.entanglement {
            Entanglement::Full => {
                let mut pairs = Vec::new();
                for i in 0..q {
                    for j in i + 1..q {
                        pairs.push((i, j));
                    }
                }
                pairs
            }
            Entanglement::Linear => (0..q - 1).map(|i| (i, i + 1)).collect(),
            Entanglement::Circular => {
                let mut pairs: Vec<(usize, usize)> = (0..q - 1).map(|i| (i, i + 1)).collect();
                if q > 2 || pairs.last() != Some(&(q - 1, 0)) {
                    pairs.push((q - 1, 0));
                }
                pairs
            }
        }
    }
}

/// Dense state over `2^Q` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    qubit_count: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// The |0...0> state.
    pub fn zero(qubit_count: usize) -> Result<Self> {
        if qubit_count == 0 {
            return Err(Error::ZeroQubits);
        }
        if qubit_count > MAX_QUBITS {
            return Err(Error::QubitCapExceeded(qubit_count, MAX_QUBITS));
        }
        let mut amps = vec![Complex64::ZERO; 1 << qubit_count];
        amps[0] = Complex64::ONE;
        Ok(Statevector { qubit_count, amps })
    }

    pub fn from_amplitudes(qubit_count: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << qubit_count {
            return Err(Error::InvalidConfig(format!(
                "expected {} amplitudes, got {}",
                1usize << qubit_count,
                amps.len()
            )));
        }
        Ok(Statevector { qubit_count, amps })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn qubit_bit(&self, qubit: usize) -> usize {
        self.qubit_count - 1 - qubit
    }

    fn apply_single(&mut self, qubit: usize, m: [[Complex64; 2]; 2]) {
        let mask = 1usize << self.qubit_bit(qubit);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let a = self.amps[i];
                let b = self.amps[j];
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[j] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    pub fn ry(&mut self, qubit: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        self.apply_single(
            qubit,
            [
                [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
            ],
        );
    }

    pub fn rz(&mut self, qubit: usize, theta: f64) {
        let mask = 1usize << self.qubit_bit(qubit);
        let phase0 = Complex64::from_polar(1.0, -theta / 2.0);
        let phase1 = Complex64::from_polar(1.0, theta / 2.0);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            *amp *= if i & mask == 0 { phase0 } else { phase1 };
        }
    }

    pub fn h(&mut self, qubit: usize) {
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_single(qubit, [[r, r], [r, -r]]);
    }

    /// S-dagger: diag(1, -i).
    pub fn sdg(&mut self, qubit: usize) {
        let mask = 1usize << self.qubit_bit(qubit);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask != 0 {
                *amp *= Complex64::new(0.0, -1.0);
            }
        }
    }

    pub fn cx(&mut self, control: usize, target: usize) {
        let cmask = 1usize << self.qubit_bit(control);
        let tmask = 1usize << self.qubit_bit(target);
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
    }
}

/// Build the ansatz state for the given rotation angles (radians).
///
/// Parameter layout: for each layer, `Q` RY angles (qubit order) followed by
/// `Q` RZ angles. Each of the first `reps` layers is followed by the
/// entanglement block; the final layer is not.
pub fn build_state(spec: &AnsatzSpec, params: &[f64]) -> Result<Statevector> {
    if params.len() != spec.parameter_count() {
        return Err(Error::ParameterCount {
            expected: spec.parameter_count(),
            got: params.len(),
        });
    }
    let q = spec.qubit_count;
    let mut state = Statevector::zero(q)?;
    let pairs = spec.entangler_pairs();
    for layer in 0..=spec.reps {
        let base = 2 * q * layer;
        for qubit in 0..q {
            state.ry(qubit, params[base + qubit]);
        }
        for qubit in 0..q {
            state.rz(qubit, params[base + q + qubit]);
        }
        if layer < spec.reps {
            for &(c, t) in &pairs {
                state.cx(c, t);
            }
        }
    }
    debug_assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
    Ok(state)
}

/// Exact measurement PMF of `state` in `basis`, marginalized onto the
/// basis's non-identity qubits.
pub fn ideal_pmf(state: &Statevector, basis: &MeasurementBasis) -> Result<Pmf> {
    let q = state.qubit_count();
    if basis.string().len() != q {
        return Err(Error::LengthMismatch {
            left: basis.string().len(),
            right: q,
        });
    }

    let mut rotated = state.clone();
    for (qubit, &letter) in basis.string().letters().iter().enumerate() {
        match letter {
            Pauli::X => rotated.h(qubit),
            Pauli::Y => {
                rotated.sdg(qubit);
                rotated.h(qubit);
            }
            Pauli::Z | Pauli::I => {}
        }
    }

    let labels = basis.measured_qubits();
    let width = labels.len();
    let mut probs: BTreeMap<u64, f64> = BTreeMap::new();
    for (idx, amp) in rotated.amps.iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let mut key = 0u64;
        for (i, &qubit) in labels.iter().enumerate() {
            let bit = (idx >> (q - 1 - qubit) & 1) as u64;
            key |= bit << (width - 1 - i);
        }
        *probs.entry(key).or_insert(0.0) += p;
    }
    if probs.is_empty() {
        probs.insert(0, 1.0);
    }
    Ok(Pmf::from_parts(labels, probs))
}

/// Empirical PMF from `shots` seeded draws; deterministic given the seed.
pub fn sample_pmf(pmf: &Pmf, shots: u64, seed: u64) -> Pmf {
    assert!(shots >= 1, "shots must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_pmf_with(pmf, shots, &mut rng)
}

/// As [`sample_pmf`] but drawing from a caller-owned generator stream.
pub fn sample_pmf_with<R: Rng>(pmf: &Pmf, shots: u64, rng: &mut R) -> Pmf {
    let entries: Vec<(u64, f64)> = pmf.iter().map(|(&k, &p)| (k, p)).collect();
    let mut cumulative = Vec::with_capacity(entries.len());
    let mut acc = 0.0;
    for &(_, p) in &entries {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;

    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.random_range(0.0..total);
        let idx = cumulative
            .partition_point(|&c| c <= u)
            .min(entries.len() - 1);
        *counts.entry(entries[idx].0).or_insert(0) += 1;
    }
    let probs: BTreeMap<u64, f64> = counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / shots as f64))
        .collect();
    Pmf::from_parts(pmf.qubit_labels().to_vec(), probs)
}
