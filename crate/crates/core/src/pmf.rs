//! Sparse probability mass functions over measured-qubit bitstrings.
//!
//! A [`Pmf`] carries the ordered list of qubits it is defined over and a
//! sparse map from outcomes to probabilities. Outcomes are packed into `u64`
//! keys big-endian in label order: bit `width-1-i` of a key is the outcome of
//! `qubit_labels[i]`, so qubit `labels[0]` is the leftmost character of the
//! printed bitstring.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::Result;

const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    qubit_labels: Vec<usize>,
    probs: BTreeMap<u64, f64>,
}

impl Pmf {
    /// Build from raw outcome/probability pairs, validating non-negativity
    /// and unit total mass (within 1e-9). Zero-probability entries are
    /// dropped from the sparse support.
    pub fn new(qubit_labels: Vec<usize>, probs: BTreeMap<u64, f64>) -> Result<Self> {
        let mut sum = 0.0;
        for &p in probs.values() {
            if p < 0.0 || !p.is_finite() {
                return Err(Error::InvalidPmf(p));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidPmf(sum));
        }
        let mut pmf = Pmf {
            qubit_labels,
            probs,
        };
        pmf.probs.retain(|_, p| *p > 0.0);
        Ok(pmf)
    }

    /// Unvalidated constructor for internal transformations that preserve
    /// the PMF laws by construction.
    pub(crate) fn from_parts(qubit_labels: Vec<usize>, mut probs: BTreeMap<u64, f64>) -> Self {
        probs.retain(|_, p| *p > 0.0);
        Pmf {
            qubit_labels,
            probs,
        }
    }

    /// Point mass on a single outcome.
    pub fn point(qubit_labels: Vec<usize>, outcome: u64) -> Self {
        let mut probs = BTreeMap::new();
        probs.insert(outcome, 1.0);
        Pmf {
            qubit_labels,
            probs,
        }
    }

    /// Build from bitstring keys such as `("01", 0.5)`.
    pub fn from_bitstring_probs(qubit_labels: Vec<usize>, entries: &[(&str, f64)]) -> Result<Self> {
        let width = qubit_labels.len();
        let mut probs = BTreeMap::new();
        for (bits, p) in entries {
            if bits.len() != width {
                return Err(Error::LabelMismatch {
                    expected: qubit_labels.clone(),
                    got: vec![bits.len()],
                });
            }
            let mut key = 0u64;
            for c in bits.chars() {
                key = (key << 1)
                    | match c {
                        '0' => 0,
                        '1' => 1,
                        _ => return Err(Error::InvalidPmf(f64::NAN)),
                    };
            }
            *probs.entry(key).or_insert(0.0) += p;
        }
        Pmf::new(qubit_labels, probs)
    }

    pub fn qubit_labels(&self) -> &[usize] {
        &self.qubit_labels
    }

    /// Number of measured qubits (bitstring width).
    pub fn width(&self) -> usize {
        self.qubit_labels.len()
    }

    /// Nonzero support size.
    pub fn support_len(&self) -> usize {
        self.probs.len()
    }

    pub fn prob(&self, outcome: u64) -> f64 {
        self.probs.get(&outcome).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u64, &f64)> {
        self.probs.iter()
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn bitstring(&self, outcome: u64) -> String {
        let w = self.width();
        (0..w)
            .map(|i| {
                if outcome >> (w - 1 - i) & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }

    /// Positions (within this PMF's label list) of the given qubits.
    /// Errors if any qubit is not measured by this PMF.
    pub fn label_positions(&self, qubits: &[usize]) -> Result<Vec<usize>> {
        qubits
            .iter()
            .map(|q| {
                self.qubit_labels
                    .iter()
                    .position(|l| l == q)
                    .ok_or_else(|| Error::LocalNotInGlobal {
                        local: qubits.to_vec(),
                        global: self.qubit_labels.clone(),
                    })
            })
            .collect()
    }

    /// Project an outcome of this PMF onto the sub-register given by
    /// `positions` (indices into this PMF's labels, in output order).
    pub fn project_key(&self, key: u64, positions: &[usize]) -> u64 {
        let w = self.width();
        let sub_w = positions.len();
        let mut out = 0u64;
        for (i, &pos) in positions.iter().enumerate() {
            let bit = key >> (w - 1 - pos) & 1;
            out |= bit << (sub_w - 1 - i);
        }
        out
    }

    /// Marginal PMF over a subset of this PMF's qubits.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Pmf> {
        let positions = self.label_positions(qubits)?;
        let mut probs: BTreeMap<u64, f64> = BTreeMap::new();
        for (&key, &p) in &self.probs {
            *probs
                .entry(self.project_key(key, &positions))
                .or_insert(0.0) += p;
        }
        Ok(Pmf::from_parts(qubits.to_vec(), probs))
    }

    /// Total-variation distance: half the L1 difference. Both PMFs must be
    /// over the same qubit labels.
    pub fn tv_distance(&self, other: &Pmf) -> Result<f64> {
        if self.qubit_labels != other.qubit_labels {
            return Err(Error::LabelMismatch {
                expected: self.qubit_labels.clone(),
                got: other.qubit_labels.clone(),
            });
        }
        let mut l1 = 0.0;
        for (&k, &p) in &self.probs {
            l1 += (p - other.prob(k)).abs();
        }
        for (&k, &q) in &other.probs {
            if !self.probs.contains_key(&k) {
                l1 += q;
            }
        }
        Ok(0.5 * l1)
    }

    /// Rescale so the total mass is exactly 1.
    pub fn normalized(mut self) -> Pmf {
        let total = self.total_mass();
        if total > 0.0 {
            for p in self.probs.values_mut() {
                *p /= total;
            }
        }
        self
    }
}
