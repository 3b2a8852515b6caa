//! Pauli strings, Hamiltonians, and qubit-wise commutation.
//!
//! A Hamiltonian is a weighted sum of Pauli strings over the alphabet
//! {I, X, Y, Z}. Two strings commute qubit-wise when at every position the
//! letters are equal or at least one of them is `I`; such strings can be
//! measured by a single circuit whose basis is the letter-wise union of the
//! strings. Grouping terms this way is what makes the baseline VQE cost
//! proportional to the number of bases instead of the number of terms.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::pmf::Pmf;
use crate::Result;

/// Single-qubit Pauli letter. `I` marks an unmeasured / identity position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' | 'i' => Ok(Pauli::I),
            'X' | 'x' => Ok(Pauli::X),
            'Y' | 'y' => Ok(Pauli::Y),
            'Z' | 'z' => Ok(Pauli::Z),
            other => Err(Error::InvalidPauliChar(other)),
        }
    }
}

/// A fixed-length word over {I, X, Y, Z}; one term of a Hamiltonian or a
/// measurement basis, depending on context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        PauliString(letters)
    }

    /// All-identity string of the given length.
    pub fn identity(len: usize) -> Self {
        PauliString(vec![Pauli::I; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    pub fn letter(&self, pos: usize) -> Pauli {
        self.0[pos]
    }

    /// Number of non-identity positions.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Positions carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(Pauli::from_char)
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A weighted Pauli string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    #[serde(rename = "pauli")]
    pub string: PauliString,
    #[serde(rename = "coeff")]
    pub coefficient: f64,
}

impl PauliTerm {
    pub fn new(string: PauliString, coefficient: f64) -> Self {
        PauliTerm {
            string,
            coefficient,
        }
    }

    /// Parse a term from its text form, e.g. `("IZZX", -0.5)`.
    pub fn parse(s: &str, coefficient: f64) -> Result<Self> {
        Ok(PauliTerm::new(s.parse()?, coefficient))
    }
}

/// A measurement basis: the letter each qubit is measured in (`I` = not
/// measured). A basis covers a term when it agrees with the term on every
/// non-identity position of the term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MeasurementBasis(pub PauliString);

impl MeasurementBasis {
    pub fn string(&self) -> &PauliString {
        &self.0
    }

    /// Qubits this basis actually measures, ascending.
    pub fn measured_qubits(&self) -> Vec<usize> {
        self.0.support()
    }

    pub fn covers(&self, term: &PauliString) -> bool {
        qubit_wise_covers(&self.0, term)
    }
}

impl fmt::Display for MeasurementBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A Hamiltonian over `qubit_count` qubits. Duplicate strings passed to the
/// constructor are merged by summing coefficients; zero-coefficient terms are
/// retained since they still cost measurement circuits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian {
    #[serde(rename = "qubits")]
    pub qubit_count: usize,
    pub terms: Vec<PauliTerm>,
}

impl Hamiltonian {
    pub fn new(qubit_count: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if qubit_count == 0 {
            return Err(Error::ZeroQubits);
        }
        if terms.is_empty() {
            return Err(Error::EmptyHamiltonian);
        }
        let mut merged: Vec<PauliTerm> = Vec::new();
        let mut index: BTreeMap<PauliString, usize> = BTreeMap::new();
        for term in terms {
            if term.string.len() != qubit_count {
                return Err(Error::TermLength {
                    term: term.string.to_string(),
                    len: term.string.len(),
                    expected: qubit_count,
                });
            }
            match index.get(&term.string) {
                Some(&i) => merged[i].coefficient += term.coefficient,
                None => {
                    index.insert(term.string.clone(), merged.len());
                    merged.push(term);
                }
            }
        }
        Ok(Hamiltonian {
            qubit_count,
            terms: merged,
        })
    }

    /// Build from `(string, coefficient)` text pairs.
    pub fn parse_terms(qubit_count: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|(s, c)| PauliTerm::parse(s, *c))
            .collect::<Result<Vec<_>>>()?;
        Hamiltonian::new(qubit_count, terms)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Serialize to the canonical JSON interchange form.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("hamiltonian serializes")
    }

    /// Parse the canonical JSON interchange form and validate it.
    pub fn from_json(json: &str) -> Result<Self> {
        let raw: Hamiltonian =
            serde_json::from_str(json).map_err(|e| Error::InvalidHamiltonian(e.to_string()))?;
        Hamiltonian::new(raw.qubit_count, raw.terms)
    }
}

/// True iff at every position the letters are equal or at least one is `I`.
pub fn qubit_wise_commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.letters()
        .iter()
        .zip(b.letters())
        .all(|(&x, &y)| x == y || x == Pauli::I || y == Pauli::I))
}

/// True iff `basis` agrees with `target` on every non-identity position of
/// `target`. This is the (reflexive) cover partial order on strings.
pub fn qubit_wise_covers(basis: &PauliString, target: &PauliString) -> bool {
    basis.len() == target.len()
        && basis
            .letters()
            .iter()
            .zip(target.letters())
            .all(|(&b, &t)| t == Pauli::I || b == t)
}

/// All strings over `alphabet ∪ {I}` (other than `target` itself) that cover
/// `target`, in lexicographic order with `I < X < Y < Z`.
pub fn commuting_parents(target: &PauliString, alphabet: &[Pauli]) -> Vec<PauliString> {
    let mut letters: Vec<Pauli> = alphabet
        .iter()
        .copied()
        .filter(|&p| p != Pauli::I)
        .collect();
    letters.sort_unstable();
    letters.dedup();

    // Per-position candidates, each list already in lexicographic order.
    let choices: Vec<Vec<Pauli>> = target
        .letters()
        .iter()
        .map(|&t| {
            if t == Pauli::I {
                let mut c = vec![Pauli::I];
                c.extend_from_slice(&letters);
                c
            } else {
                vec![t]
            }
        })
        .collect();

    let mut out = Vec::new();
    let mut current = vec![Pauli::I; target.len()];
    fill_product(&choices, 0, &mut current, &mut out);
    out.retain(|s| s != target);
    out
}

fn fill_product(
    choices: &[Vec<Pauli>],
    pos: usize,
    current: &mut Vec<Pauli>,
    out: &mut Vec<PauliString>,
) {
    if pos == choices.len() {
        out.push(PauliString::new(current.clone()));
        return;
    }
    for &p in &choices[pos] {
        current[pos] = p;
        fill_product(choices, pos + 1, current, out);
    }
}

/// Group Hamiltonian terms into shared measurement bases.
///
/// Greedy scheme: terms are visited in order of descending weight (stable on
/// ties); each group is seeded by the first ungrouped term and absorbs every
/// later ungrouped term that qubit-wise commutes with the group's running
/// basis, tightening `I` positions as terms are absorbed. Every term index
/// appears in exactly one group and is covered by that group's basis.
pub fn group_into_bases(h: &Hamiltonian) -> Vec<(MeasurementBasis, Vec<usize>)> {
    let n = h.terms.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(h.terms[i].string.weight()));

    let mut grouped = vec![false; n];
    let mut groups: Vec<(MeasurementBasis, Vec<usize>)> = Vec::new();

    for (seed_pos, &seed) in order.iter().enumerate() {
        if grouped[seed] {
            continue;
        }
        grouped[seed] = true;
        let mut basis: Vec<Pauli> = h.terms[seed].string.letters().to_vec();
        let mut members = vec![seed];

        for &cand in &order[seed_pos + 1..] {
            if grouped[cand] {
                continue;
            }
            let letters = h.terms[cand].string.letters();
            let compatible = basis
                .iter()
                .zip(letters)
                .all(|(&b, &t)| b == t || b == Pauli::I || t == Pauli::I);
            if compatible {
                grouped[cand] = true;
                for (b, &t) in basis.iter_mut().zip(letters) {
                    if *b == Pauli::I && t != Pauli::I {
                        *b = t;
                    }
                }
                members.push(cand);
            }
        }

        members.sort_unstable();
        groups.push((MeasurementBasis(PauliString::new(basis)), members));
    }
    groups
}

/// Expectation value of `term` under a PMF measured in `measured_basis`.
///
/// The PMF must be over exactly the basis's measured qubits, in ascending
/// qubit order. Returns `Σ_x p(x) · (−1)^parity(x restricted to the term's
/// non-identity positions)`, a value in `[-1, 1]`.
pub fn expectation_from_pmf(
    pmf: &Pmf,
    term: &PauliTerm,
    measured_basis: &MeasurementBasis,
) -> Result<f64> {
    if !measured_basis.covers(&term.string) {
        return Err(Error::BasisDoesNotCover {
            basis: measured_basis.to_string(),
            term: term.string.to_string(),
        });
    }
    let labels = measured_basis.measured_qubits();
    if pmf.qubit_labels() != labels.as_slice() {
        return Err(Error::LabelMismatch {
            expected: labels,
            got: pmf.qubit_labels().to_vec(),
        });
    }

    // Bit positions (within the PMF keys) of the term's non-identity qubits.
    let width = pmf.width();
    let mut mask: u64 = 0;
    for (i, &q) in labels.iter().enumerate() {
        if term.string.letter(q) != Pauli::I {
            mask |= 1 << (width - 1 - i);
        }
    }

    let mut value = 0.0;
    for (&key, &p) in pmf.iter() {
        let parity = (key & mask).count_ones() & 1;
        value += if parity == 0 { p } else { -p };
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        let s = ps("IXYZ");
        assert_eq!(s.to_string(), "IXYZ");
        assert_eq!(s.weight(), 3);
        assert_eq!(s.support(), vec![1, 2, 3]);
        assert!(ps("IIII").is_identity());
        assert!(matches!(
            "IXQZ".parse::<PauliString>(),
            Err(Error::InvalidPauliChar('Q'))
        ));
    }

    #[test]
    fn commutation_examples() {
        assert!(qubit_wise_commutes(&ps("III"), &ps("XZY")).unwrap());
        assert!(qubit_wise_commutes(&ps("IZZ"), &ps("ZZZ")).unwrap());
        assert!(!qubit_wise_commutes(&ps("XZZ"), &ps("ZZZ")).unwrap());
        assert!(matches!(
            qubit_wise_commutes(&ps("XZ"), &ps("XZZ")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn commutation_is_symmetric_and_reflexive() {
        let strings = ["IXYZ", "ZZII", "IIII", "YYXX", "ZIXI"];
        for a in &strings {
            assert!(qubit_wise_commutes(&ps(a), &ps(a)).unwrap());
            for b in &strings {
                assert_eq!(
                    qubit_wise_commutes(&ps(a), &ps(b)).unwrap(),
                    qubit_wise_commutes(&ps(b), &ps(a)).unwrap()
                );
            }
        }
    }

    #[test]
    fn cover_is_a_partial_order() {
        // All 27 strings over {I, X, Z} of length 3.
        let all = all_strings(3, &[Pauli::X, Pauli::Z]);
        for a in &all {
            assert!(qubit_wise_covers(a, a));
            for b in &all {
                if qubit_wise_covers(a, b) && qubit_wise_covers(b, a) {
                    assert_eq!(a, b);
                }
                for c in &all {
                    if qubit_wise_covers(a, b) && qubit_wise_covers(b, c) {
                        assert!(qubit_wise_covers(a, c));
                    }
                }
            }
        }
    }

    fn all_strings(len: usize, alphabet: &[Pauli]) -> Vec<PauliString> {
        let mut letters = vec![Pauli::I];
        letters.extend_from_slice(alphabet);
        let mut out: Vec<Vec<Pauli>> = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    letters.iter().map(move |&l| {
                        let mut next = prefix.clone();
                        next.push(l);
                        next
                    })
                })
                .collect();
        }
        out.into_iter().map(PauliString::new).collect()
    }

    #[test]
    fn parent_counts_match_brute_force() {
        // Independent oracle: count strict covers by enumeration.
        let all = all_strings(3, &[Pauli::X, Pauli::Z]);
        for target in &all {
            let brute: Vec<&PauliString> = all
                .iter()
                .filter(|s| *s != target && qubit_wise_covers(s, target))
                .collect();
            let parents = commuting_parents(target, &[Pauli::X, Pauli::Z]);
            assert_eq!(parents.len(), brute.len(), "target {target}");
        }
        assert_eq!(
            commuting_parents(&ps("III"), &[Pauli::X, Pauli::Z]).len(),
            26
        );
        assert_eq!(
            commuting_parents(&ps("IIZ"), &[Pauli::X, Pauli::Z]).len(),
            8
        );
        assert_eq!(
            commuting_parents(&ps("IZZ"), &[Pauli::X, Pauli::Z]).len(),
            2
        );
        assert_eq!(
            commuting_parents(&ps("ZZZ"), &[Pauli::X, Pauli::Z]).len(),
            0
        );
    }

    #[test]
    fn parents_are_sorted_and_exclude_target() {
        let parents = commuting_parents(&ps("IIZ"), &[Pauli::X, Pauli::Z]);
        let mut sorted = parents.clone();
        sorted.sort();
        assert_eq!(parents, sorted);
        assert!(!parents.contains(&ps("IIZ")));
        assert_eq!(parents[0], ps("IXZ"));
    }

    #[test]
    fn duplicate_terms_merge_and_zero_coeffs_survive() {
        let h = Hamiltonian::parse_terms(2, &[("ZZ", 0.5), ("ZZ", 0.25), ("XX", 0.0)]).unwrap();
        assert_eq!(h.num_terms(), 2);
        assert_eq!(h.terms[0].coefficient, 0.75);
        assert_eq!(h.terms[1].coefficient, 0.0);
    }

    #[test]
    fn grouping_example_from_commuting_chain() {
        let h = Hamiltonian::parse_terms(3, &[("ZZZ", 1.0), ("IZI", 0.3), ("IZZ", -0.2)]).unwrap();
        let groups = group_into_bases(&h);
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].0.to_string(), "ZZZ");
        assert_eq!(groups[0].1, vec![0, 1, 2]);
    }

    #[test]
    fn grouping_splits_conflicting_terms() {
        let h = Hamiltonian::parse_terms(2, &[("ZZ", 1.0), ("XX", 1.0)]).unwrap();
        let groups = group_into_bases(&h);
        assert_eq!(groups.len(), 2);
    }

    #[test]
    fn grouping_partitions_and_covers() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        for _ in 0..50 {
            let q = rng.random_range(2..=6);
            let n_terms = rng.random_range(1..=12);
            let mut terms = Vec::new();
            for _ in 0..n_terms {
                let s: Vec<Pauli> = (0..q).map(|_| letters[rng.random_range(0..4)]).collect();
                terms.push(PauliTerm::new(PauliString::new(s), 1.0));
            }
            let h = match Hamiltonian::new(q, terms) {
                Ok(h) => h,
                Err(_) => continue,
            };
            let groups = group_into_bases(&h);

            let mut seen = vec![0usize; h.num_terms()];
            for (basis, members) in &groups {
                for &i in members {
                    seen[i] += 1;
                    assert!(basis.covers(&h.terms[i].string));
                }
                // No two members of a group may fail to commute qubit-wise.
                for &i in members {
                    for &j in members {
                        assert!(
                            qubit_wise_commutes(&h.terms[i].string, &h.terms[j].string).unwrap()
                        );
                    }
                }
            }
            assert!(seen.iter().all(|&c| c == 1));
            assert!(groups.len() <= h.num_terms());
        }
    }

    #[test]
    fn group_count_is_bracketed_by_conflict_structure() {
        use rand::{Rng, SeedableRng};
        // Upper bound: one group per term. Lower bound: terms that pairwise
        // fail to commute can never share a group, so any greedily collected
        // pairwise-conflicting set bounds the group count from below.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        for _ in 0..30 {
            let mut terms = Vec::new();
            while terms.len() < 10 {
                let s: Vec<Pauli> = (0..4).map(|_| letters[rng.random_range(0..4)]).collect();
                let string = PauliString::new(s);
                if !terms.iter().any(|t: &PauliTerm| t.string == string) {
                    terms.push(PauliTerm::new(string, 1.0));
                }
            }
            let h = Hamiltonian::new(4, terms).unwrap();

            let mut conflicting: Vec<&PauliString> = Vec::new();
            for term in &h.terms {
                if conflicting
                    .iter()
                    .all(|c| !qubit_wise_commutes(c, &term.string).unwrap())
                {
                    conflicting.push(&term.string);
                }
            }

            let groups = group_into_bases(&h);
            assert!(groups.len() <= h.num_terms());
            assert!(groups.len() >= conflicting.len());
        }
    }

    #[test]
    fn expectation_examples() {
        let basis = MeasurementBasis(ps("ZZ"));
        let pmf = Pmf::from_bitstring_probs(vec![0, 1], &[("00", 0.5), ("11", 0.5)]).unwrap();
        let zz = PauliTerm::parse("ZZ", 1.0).unwrap();
        let zi = PauliTerm::parse("ZI", 1.0).unwrap();
        assert_eq!(expectation_from_pmf(&pmf, &zz, &basis).unwrap(), 1.0);
        assert_eq!(expectation_from_pmf(&pmf, &zi, &basis).unwrap(), 0.0);

        let pmf01 = Pmf::from_bitstring_probs(vec![0, 1], &[("01", 1.0)]).unwrap();
        assert_eq!(expectation_from_pmf(&pmf01, &zz, &basis).unwrap(), -1.0);

        let xx = PauliTerm::parse("XX", 1.0).unwrap();
        assert!(matches!(
            expectation_from_pmf(&pmf, &xx, &basis),
            Err(Error::BasisDoesNotCover { .. })
        ));
    }

    #[test]
    fn hamiltonian_json_round_trip() {
        let h = Hamiltonian::parse_terms(4, &[("IZZX", -0.5), ("ZZII", 1.25)]).unwrap();
        let json = h.to_json();
        let back = Hamiltonian::from_json(&json).unwrap();
        assert_eq!(h, back);
        assert!(json.contains("\"IZZX\""));
    }

    #[test]
    fn hamiltonian_rejects_bad_input() {
        assert!(matches!(
            Hamiltonian::parse_terms(3, &[("ZZ", 1.0)]),
            Err(Error::TermLength { .. })
        ));
        assert!(matches!(
            Hamiltonian::new(3, vec![]),
            Err(Error::EmptyHamiltonian)
        ));
        assert!(Hamiltonian::from_json("{\"qubits\": 2}").is_err());
    }
}
