//! Measurement subset planning and circuit cost accounting.
//!
//! JigSaw mitigates measurement error by running, next to each full (global)
//! circuit, small subset circuits that each measure only `m` qubits. It
//! generates the subsets per measurement basis, so their count grows with
//! the number of bases. The planner here instead generates subsets from the
//! raw Hamiltonian terms, before commutation, and then eliminates dominated
//! subsets: subset A is dominated by B when every (qubit, letter) pair of A
//! also appears in B, in which case B's local PMF already contains A's
//! information as a marginal.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::pauli::{group_into_bases, Hamiltonian, MeasurementBasis, Pauli, PauliString};
use crate::Result;

/// A partial-measurement circuit: which qubits are measured and in which
/// single-qubit bases. Unmeasured positions are omitted; `qubits` is
/// ascending and `bases` carries no `I`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Subset {
    pub qubits: Vec<usize>,
    pub bases: Vec<Pauli>,
}

impl Subset {
    pub fn new(qubits: Vec<usize>, bases: Vec<Pauli>) -> Self {
        debug_assert_eq!(qubits.len(), bases.len());
        debug_assert!(qubits.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(bases.iter().all(|&b| b != Pauli::I));
        Subset { qubits, bases }
    }

    pub fn size(&self) -> usize {
        self.qubits.len()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.qubits.iter().copied().zip(self.bases.iter().copied())
    }

    /// True when every (qubit, letter) pair of `self` appears in `other`.
    pub fn dominated_by(&self, other: &Subset) -> bool {
        self.pairs().all(|(q, b)| {
            other
                .qubits
                .binary_search(&q)
                .map(|i| other.bases[i] == b)
                .unwrap_or(false)
        })
    }

    /// True when the basis measures every subset qubit in the same letter,
    /// i.e. the subset's local PMF is a marginal of the basis's global PMF.
    pub fn agrees_with(&self, basis: &MeasurementBasis) -> bool {
        self.pairs()
            .all(|(q, b)| q < basis.string().len() && basis.string().letter(q) == b)
    }

    /// The subset written as a full-width string with `I` elsewhere.
    pub fn as_string(&self, width: usize) -> PauliString {
        let mut letters = vec![Pauli::I; width];
        for (q, b) in self.pairs() {
            letters[q] = b;
        }
        PauliString::new(letters)
    }
}

impl std::fmt::Display for Subset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let pairs: Vec<String> = self
            .pairs()
            .map(|(q, b)| format!("{}{}", b.to_char(), q))
            .collect();
        write!(f, "{}", pairs.join(" "))
    }
}

/// Spatial measurement plan: the commuted global bases plus the reduced
/// subset pool shared by all of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    pub global_bases: Vec<MeasurementBasis>,
    pub subsets: Vec<Subset>,
    pub subset_size: usize,
}

/// Per-iteration circuit counts of the three strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub baseline_per_iter: u64,
    pub jigsaw_per_iter: u64,
    pub varsaw_subsets_per_iter: u64,
    pub varsaw_global_per_iter: u64,
}

impl CostReport {
    /// Amortized VarSaw cost: subsets every iteration plus the global
    /// fraction.
    pub fn varsaw_amortized_per_iter(&self) -> u64 {
        self.varsaw_subsets_per_iter + self.varsaw_global_per_iter
    }
}

/// Subsets from contiguous windows of `m` qubits slid across `basis`.
///
/// One subset per window, in window order, with `I` positions dropped;
/// windows that are entirely `I` produce nothing. No deduplication happens
/// here: repeated windows are counted the way the raw JigSaw cost counts
/// them.
pub fn sliding_window_subsets(basis: &MeasurementBasis, m: usize) -> Result<Vec<Subset>> {
    let q = basis.string().len();
    if m == 0 || m > q {
        return Err(Error::BadSubsetSize { m, qubits: q });
    }
    let letters = basis.string().letters();
    let mut out = Vec::new();
    for start in 0..=(q - m) {
        let mut qubits = Vec::new();
        let mut bases = Vec::new();
        for (offset, &letter) in letters[start..start + m].iter().enumerate() {
            if letter != Pauli::I {
                qubits.push(start + offset);
                bases.push(letter);
            }
        }
        if !qubits.is_empty() {
            out.push(Subset::new(qubits, bases));
        }
    }
    Ok(out)
}

/// All-pairs alternative to the sliding window: one subset per qubit
/// combination of size `m` (used for subset-size sweeps).
pub fn all_pairs_subsets(basis: &MeasurementBasis, m: usize) -> Result<Vec<Subset>> {
    let q = basis.string().len();
    if m == 0 || m > q {
        return Err(Error::BadSubsetSize { m, qubits: q });
    }
    let letters = basis.string().letters();
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..m).collect();
    loop {
        let mut qubits = Vec::new();
        let mut bases = Vec::new();
        for &i in &combo {
            if letters[i] != Pauli::I {
                qubits.push(i);
                bases.push(letters[i]);
            }
        }
        if !qubits.is_empty() {
            out.push(Subset::new(qubits, bases));
        }
        // next combination in lexicographic order
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if combo[i] != i + q - m {
                break;
            }
        }
        combo[i] += 1;
        for j in i + 1..m {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// Window generator selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowMode {
    Sliding,
    AllPairs,
}

impl std::str::FromStr for WindowMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sliding" => Ok(WindowMode::Sliding),
            "allpairs" | "all-pairs" | "all_pairs" => Ok(WindowMode::AllPairs),
            other => Err(Error::InvalidConfig(format!(
                "unknown window mode {other:?} (expected sliding or allpairs)"
            ))),
        }
    }
}

/// The raw JigSaw subset list: windows over every group basis, concatenated
/// with no deduplication or reduction. Its length is the JigSaw subset cost.
pub fn jigsaw_plan(groups: &[MeasurementBasis], m: usize) -> Result<Vec<Subset>> {
    let mut out = Vec::new();
    for basis in groups {
        out.extend(sliding_window_subsets(basis, m)?);
    }
    Ok(out)
}

/// Keep only undominated subsets.
///
/// Order: sort by descending measured-qubit count, then lexicographically;
/// sweep once, keeping any subset not dominated by an already-kept one.
/// Every input subset is dominated by some output subset, the output is
/// duplicate-free, and the result is deterministic.
pub fn reduce_subsets(subsets: &[Subset]) -> Vec<Subset> {
    let mut ordered: Vec<&Subset> = subsets.iter().collect();
    ordered.sort_by(|a, b| {
        b.size()
            .cmp(&a.size())
            .then_with(|| a.qubits.cmp(&b.qubits))
            .then_with(|| a.bases.cmp(&b.bases))
    });

    let mut kept: Vec<Subset> = Vec::new();
    for cand in ordered {
        if !kept.iter().any(|k| cand.dominated_by(k)) {
            kept.push(cand.clone());
        }
    }
    kept
}

/// Build the full spatial plan for a Hamiltonian.
///
/// Subsets are generated from the raw terms (before any commutation) and
/// reduced; global bases come from qubit-wise grouping. Generating from raw
/// terms rather than the tightened group bases exposes the most redundancy.
pub fn varsaw_plan(h: &Hamiltonian, m: usize) -> Result<MeasurementPlan> {
    varsaw_plan_with(h, m, WindowMode::Sliding)
}

pub fn varsaw_plan_with(h: &Hamiltonian, m: usize, mode: WindowMode) -> Result<MeasurementPlan> {
    let mut raw = Vec::new();
    for term in &h.terms {
        let basis = MeasurementBasis(term.string.clone());
        let windows = match mode {
            WindowMode::Sliding => sliding_window_subsets(&basis, m)?,
            WindowMode::AllPairs => all_pairs_subsets(&basis, m)?,
        };
        raw.extend(windows);
    }
    let subsets = reduce_subsets(&raw);
    let global_bases = group_into_bases(h).into_iter().map(|(b, _)| b).collect();
    let plan = MeasurementPlan {
        global_bases,
        subsets,
        subset_size: m,
    };
    debug_assert!(plan_covers_bases(&plan));
    Ok(plan)
}

/// Coverage soundness: every measured (qubit, letter) pair of every global
/// basis appears in at least one plan subset. This is what guarantees each
/// global circuit has local mitigation data for all of its qubits.
pub fn plan_covers_bases(plan: &MeasurementPlan) -> bool {
    plan.global_bases.iter().all(|basis| {
        basis
            .string()
            .letters()
            .iter()
            .enumerate()
            .all(|(q, &letter)| {
                letter == Pauli::I
                    || plan.subsets.iter().any(|s| {
                        s.qubits
                            .binary_search(&q)
                            .map(|i| s.bases[i] == letter)
                            .unwrap_or(false)
                    })
            })
    })
}

/// Per-iteration circuit counts for a plan, a JigSaw subset count, and a
/// global execution fraction `k_frac` in [0, 1].
pub fn cost_report(
    plan: &MeasurementPlan,
    jigsaw_subset_count: u64,
    k_frac: f64,
) -> Result<CostReport> {
    if !(0.0..=1.0).contains(&k_frac) {
        return Err(Error::BadFraction(k_frac));
    }
    let baseline = plan.global_bases.len() as u64;
    Ok(CostReport {
        baseline_per_iter: baseline,
        jigsaw_per_iter: baseline + jigsaw_subset_count,
        varsaw_subsets_per_iter: plan.subsets.len() as u64,
        varsaw_global_per_iter: (k_frac * baseline as f64).round() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::random_hamiltonian;

    fn basis(s: &str) -> MeasurementBasis {
        MeasurementBasis(s.parse().unwrap())
    }

    fn subset(pairs: &[(usize, Pauli)]) -> Subset {
        Subset::new(
            pairs.iter().map(|&(q, _)| q).collect(),
            pairs.iter().map(|&(_, b)| b).collect(),
        )
    }

    #[test]
    fn sliding_windows_of_full_basis() {
        let subs = sliding_window_subsets(&basis("ZZZZ"), 2).unwrap();
        assert_eq!(subs.len(), 3);
        assert_eq!(subs[0], subset(&[(0, Pauli::Z), (1, Pauli::Z)]));
        assert_eq!(subs[1], subset(&[(1, Pauli::Z), (2, Pauli::Z)]));
        assert_eq!(subs[2], subset(&[(2, Pauli::Z), (3, Pauli::Z)]));
    }

    #[test]
    fn sliding_windows_skip_all_identity() {
        assert!(sliding_window_subsets(&basis("IIII"), 2)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn sliding_windows_keep_raw_duplicates() {
        // Windows (X,I), (I,Z), (Z,I): raw count 3 with a repeated {Z2}.
        let subs = sliding_window_subsets(&basis("XIZI"), 2).unwrap();
        assert_eq!(subs.len(), 3);
        assert_eq!(subs[0], subset(&[(0, Pauli::X)]));
        assert_eq!(subs[1], subset(&[(2, Pauli::Z)]));
        assert_eq!(subs[2], subset(&[(2, Pauli::Z)]));
        assert_eq!(reduce_subsets(&subs).len(), 2);
    }

    #[test]
    fn window_size_validation() {
        assert!(matches!(
            sliding_window_subsets(&basis("ZZ"), 3),
            Err(Error::BadSubsetSize { m: 3, qubits: 2 })
        ));
        assert!(sliding_window_subsets(&basis("ZZ"), 0).is_err());
    }

    #[test]
    fn jigsaw_counts_raw_windows() {
        let bases: Vec<MeasurementBasis> = ["ZZZZ", "XXXX", "ZXZX", "XZXZ", "ZXXZ", "XXZZ", "ZZXX"]
            .iter()
            .map(|s| basis(s))
            .collect();
        assert_eq!(jigsaw_plan(&bases, 2).unwrap().len(), 21);
        assert_eq!(jigsaw_plan(&[basis("ZZ")], 2).unwrap().len(), 1);
    }

    #[test]
    fn reduction_drops_dominated_and_duplicate_subsets() {
        let a = subset(&[(1, Pauli::Z)]);
        let b = subset(&[(0, Pauli::Z), (1, Pauli::Z)]);
        assert_eq!(reduce_subsets(&[a.clone(), b.clone()]), vec![b.clone()]);
        assert_eq!(reduce_subsets(&[b.clone(), b.clone()]), vec![b.clone()]);
        // Same qubit, different letters: both survive.
        let c = subset(&[(1, Pauli::X)]);
        assert_eq!(reduce_subsets(&[a.clone(), c.clone()]).len(), 2);
    }

    #[test]
    fn reduction_is_idempotent_and_shrinking() {
        let h = random_hamiltonian(6, 30, 2).unwrap();
        let raw: Vec<Subset> = h
            .terms
            .iter()
            .flat_map(|t| sliding_window_subsets(&MeasurementBasis(t.string.clone()), 2).unwrap())
            .collect();
        let once = reduce_subsets(&raw);
        assert!(once.len() <= raw.len());
        let twice = reduce_subsets(&once);
        assert_eq!(once, twice);
        for s in &raw {
            assert!(once.iter().any(|k| s.dominated_by(k)));
        }
    }

    /// Brute-force domination closure: the distinct subsets that are not
    /// strictly dominated by any other input subset.
    fn domination_closure_oracle(subsets: &[Subset]) -> Vec<Subset> {
        let mut distinct: Vec<Subset> = Vec::new();
        for s in subsets {
            if !distinct.contains(s) {
                distinct.push(s.clone());
            }
        }
        let maximal: Vec<Subset> = distinct
            .iter()
            .filter(|s| !distinct.iter().any(|t| *s != t && s.dominated_by(t)))
            .cloned()
            .collect();
        maximal
    }

    #[test]
    fn greedy_reduction_matches_brute_force_closure() {
        for seed in 0..20 {
            let h = random_hamiltonian(5, 12, seed).unwrap();
            let raw: Vec<Subset> = h
                .terms
                .iter()
                .flat_map(|t| {
                    sliding_window_subsets(&MeasurementBasis(t.string.clone()), 2).unwrap()
                })
                .collect();
            let mut greedy = reduce_subsets(&raw);
            let mut oracle = domination_closure_oracle(&raw);
            greedy.sort();
            oracle.sort();
            assert_eq!(greedy, oracle, "seed {seed}");
        }
    }

    #[test]
    fn varsaw_plan_on_conflicting_pair() {
        let h = Hamiltonian::parse_terms(2, &[("ZZ", 1.0), ("XX", 1.0)]).unwrap();
        let plan = varsaw_plan(&h, 2).unwrap();
        assert_eq!(plan.subsets.len(), 2);
        assert_eq!(plan.global_bases.len(), 2);
        assert!(plan_covers_bases(&plan));
    }

    #[test]
    fn varsaw_plan_all_two_qubit_paulis() {
        // All 15 non-identity 2-qubit strings reduce to the 9 full pairs.
        let mut terms = Vec::new();
        let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        for &a in &letters {
            for &b in &letters {
                let s = PauliString::new(vec![a, b]);
                if !s.is_identity() {
                    terms.push(crate::pauli::PauliTerm::new(s, 1.0));
                }
            }
        }
        assert_eq!(terms.len(), 15);
        let h = Hamiltonian::new(2, terms).unwrap();
        let plan = varsaw_plan(&h, 2).unwrap();
        assert_eq!(plan.subsets.len(), 9);
        assert!(plan.subsets.iter().all(|s| s.size() == 2));
    }

    #[test]
    fn plan_subsets_respect_size_cap() {
        let h = random_hamiltonian(8, 40, 4).unwrap();
        let plan = varsaw_plan(&h, 2).unwrap();
        assert!(plan.subsets.iter().all(|s| s.size() <= 2));
        assert!(plan_covers_bases(&plan));
    }

    #[test]
    fn all_pairs_mode_generates_combinations() {
        let subs = all_pairs_subsets(&basis("ZZZ"), 2).unwrap();
        assert_eq!(subs.len(), 3); // {0,1}, {0,2}, {1,2}
        assert_eq!(subs[1], subset(&[(0, Pauli::Z), (2, Pauli::Z)]));
    }

    #[test]
    fn cost_report_arithmetic() {
        let h = random_hamiltonian(6, 30, 7).unwrap();
        let plan = varsaw_plan(&h, 2).unwrap();
        let jig = jigsaw_plan(&plan.global_bases, 2).unwrap().len() as u64;

        let full = cost_report(&plan, jig, 1.0).unwrap();
        assert_eq!(
            full.varsaw_amortized_per_iter(),
            full.baseline_per_iter + full.varsaw_subsets_per_iter
        );
        let none = cost_report(&plan, jig, 0.0).unwrap();
        assert_eq!(
            none.varsaw_amortized_per_iter(),
            none.varsaw_subsets_per_iter
        );
        assert!(full.jigsaw_per_iter >= full.baseline_per_iter);
        assert!(cost_report(&plan, jig, 1.5).is_err());
    }

    #[test]
    fn jigsaw_windows_are_pairwise_covered_by_plan() {
        // Coverage soundness: every (qubit, letter) pair of every JigSaw
        // window appears in some reduced plan subset, so no global basis
        // loses local mitigation data to the reduction.
        for q in [4usize, 6, 8, 10, 12] {
            for seed in 0..5 {
                let h = random_hamiltonian(q, 5 * q, seed).unwrap();
                let plan = varsaw_plan(&h, 2).unwrap();
                let jig = jigsaw_plan(&plan.global_bases, 2).unwrap();
                for window in &jig {
                    for (qubit, b) in window.pairs() {
                        assert!(
                            plan.subsets.iter().any(|s| s
                                .qubits
                                .binary_search(&qubit)
                                .map(|i| s.bases[i] == b)
                                .unwrap_or(false)),
                            "q={q} seed={seed}: pair ({qubit}, {b:?}) uncovered"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn reduction_ratio_grows_with_term_count() {
        // With Q fixed, more terms mean more redundancy: the mean
        // jigsaw/varsaw ratio over 20 seeds must not decrease as P grows.
        let q = 8;
        let mut means = Vec::new();
        for p in [20usize, 40, 80, 160] {
            let mut total = 0.0;
            for seed in 0..20u64 {
                let h = random_hamiltonian(q, p, seed).unwrap();
                let plan = varsaw_plan(&h, 2).unwrap();
                let jig = jigsaw_plan(&plan.global_bases, 2).unwrap();
                total += jig.len() as f64 / plan.subsets.len() as f64;
            }
            means.push(total / 20.0);
        }
        assert!(
            means.windows(2).all(|w| w[1] >= w[0]),
            "mean ratios not monotone: {means:?}"
        );
    }
}
