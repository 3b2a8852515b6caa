//! Built-in Hamiltonian generators for experiments and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pauli::{Hamiltonian, Pauli, PauliString, PauliTerm};
use crate::Result;

/// Transverse-field Ising model on an open chain, qubit 0 leftmost:
/// `H = -J * sum_i Z_i Z_{i+1} - h * sum_i X_i`.
pub fn tfim(qubits: usize, coupling_j: f64, field_h: f64) -> Result<Hamiltonian> {
    let mut terms = Vec::new();
    for i in 0..qubits.saturating_sub(1) {
        let mut letters = vec![Pauli::I; qubits];
        letters[i] = Pauli::Z;
        letters[i + 1] = Pauli::Z;
        terms.push(PauliTerm::new(PauliString::new(letters), -coupling_j));
    }
    for i in 0..qubits {
        let mut letters = vec![Pauli::I; qubits];
        letters[i] = Pauli::X;
        terms.push(PauliTerm::new(PauliString::new(letters), -field_h));
    }
    Hamiltonian::new(qubits, terms)
}

/// Random Hamiltonian with `num_terms` distinct strings: letters i.i.d.
/// uniform over {I, X, Y, Z} with all-identity strings rejected (and
/// duplicates redrawn), coefficients uniform in [-1, 1].
pub fn random_hamiltonian(qubits: usize, num_terms: usize, seed: u64) -> Result<Hamiltonian> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let mut seen = std::collections::BTreeSet::new();
    let mut terms = Vec::with_capacity(num_terms);
    while terms.len() < num_terms {
        let s: Vec<Pauli> = (0..qubits)
            .map(|_| letters[rng.random_range(0..4)])
            .collect();
        let string = PauliString::new(s);
        if string.is_identity() || !seen.insert(string.clone()) {
            continue;
        }
        let coeff = rng.random_range(-1.0..1.0);
        terms.push(PauliTerm::new(string, coeff));
    }
    Hamiltonian::new(qubits, terms)
}

/// Term count used in the scaling experiments: `max(1, round(0.01 * Q^4))`.
pub fn scaling_term_count(qubits: usize) -> usize {
    let p = 0.01 * (qubits as f64).powi(4);
    (p.round() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::group_into_bases;

    #[test]
    fn tfim_structure() {
        let h = tfim(5, 1.0, 1.0).unwrap();
        assert_eq!(h.qubit_count, 5);
        assert_eq!(h.num_terms(), 9); // 4 ZZ bonds + 5 X fields
        assert_eq!(h.terms[0].string.to_string(), "ZZIII");
        assert_eq!(h.terms[0].coefficient, -1.0);
        assert_eq!(h.terms[8].string.to_string(), "IIIIX");

        // Qubit-wise grouping collapses TFIM to a ZZ-chain basis and an X basis.
        let groups = group_into_bases(&h);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].0.to_string(), "ZZZZZ");
        assert_eq!(groups[1].0.to_string(), "XXXXX");
    }

    #[test]
    fn random_hamiltonian_is_deterministic_and_distinct() {
        let a = random_hamiltonian(6, 40, 9).unwrap();
        let b = random_hamiltonian(6, 40, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.num_terms(), 40);
        let c = random_hamiltonian(6, 40, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn scaling_term_counts() {
        assert_eq!(scaling_term_count(4), 3);
        assert_eq!(scaling_term_count(8), 41);
        assert_eq!(scaling_term_count(12), 207);
        assert_eq!(scaling_term_count(20), 1600);
    }
}
