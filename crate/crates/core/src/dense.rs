//! Dense-matrix oracles, independent of the PMF-based measurement pipeline.
//!
//! Everything here works on explicit matrices or direct Pauli action on
//! amplitudes, providing reference values for tests and reference ground
//! energies for experiments: exact expectation values, dense Hamiltonian
//! matrices, eigenvalue extremes, and a gate-matrix-chain evaluation of the
//! ansatz. None of it goes through grouping, PMFs, or the noise channel.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::Error;
use crate::pauli::{Hamiltonian, Pauli};
use crate::sim::{AnsatzSpec, Statevector};
use crate::Result;

/// Largest register for which explicit `2^Q x 2^Q` matrices are built.
pub const MAX_DENSE_QUBITS: usize = 10;

/// Exact `<psi|H|psi>` by direct Pauli action on the amplitudes.
pub fn expectation(h: &Hamiltonian, state: &Statevector) -> Result<f64> {
    if h.qubit_count != state.qubit_count() {
        return Err(Error::LengthMismatch {
            left: h.qubit_count,
            right: state.qubit_count(),
        });
    }
    let q = h.qubit_count;
    let amps = state.amplitudes();
    let mut energy = 0.0;
    for term in &h.terms {
        if term.coefficient == 0.0 {
            continue;
        }
        let mut flip_mask = 0usize;
        for (qubit, &letter) in term.string.letters().iter().enumerate() {
            if letter == Pauli::X || letter == Pauli::Y {
                flip_mask |= 1 << (q - 1 - qubit);
            }
        }
        let mut value = Complex64::ZERO;
        for (idx, &amp) in amps.iter().enumerate() {
            if amp == Complex64::ZERO {
                continue;
            }
            let mut phase = Complex64::ONE;
            for (qubit, &letter) in term.string.letters().iter().enumerate() {
                let bit = idx >> (q - 1 - qubit) & 1;
                match letter {
                    Pauli::I | Pauli::X => {}
                    Pauli::Y => {
                        phase *= if bit == 0 {
                            Complex64::new(0.0, 1.0)
                        } else {
                            Complex64::new(0.0, -1.0)
                        };
                    }
                    Pauli::Z => {
                        if bit == 1 {
                            phase = -phase;
                        }
                    }
                }
            }
            value += amps[idx ^ flip_mask].conj() * phase * amp;
        }
        energy += term.coefficient * value.re;
    }
    Ok(energy)
}

/// Explicit Hamiltonian matrix; qubit 0 owns the most significant bit.
pub fn hamiltonian_matrix(h: &Hamiltonian) -> Result<DMatrix<Complex64>> {
    let q = h.qubit_count;
    if q > MAX_DENSE_QUBITS {
        return Err(Error::QubitCapExceeded(q, MAX_DENSE_QUBITS));
    }
    let dim = 1usize << q;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for term in &h.terms {
        let mut flip_mask = 0usize;
        for (qubit, &letter) in term.string.letters().iter().enumerate() {
            if letter == Pauli::X || letter == Pauli::Y {
                flip_mask |= 1 << (q - 1 - qubit);
            }
        }
        for col in 0..dim {
            let mut phase = Complex64::ONE;
            for (qubit, &letter) in term.string.letters().iter().enumerate() {
                let bit = col >> (q - 1 - qubit) & 1;
                match letter {
                    Pauli::I | Pauli::X => {}
                    Pauli::Y => {
                        phase *= if bit == 0 {
                            Complex64::new(0.0, 1.0)
                        } else {
                            Complex64::new(0.0, -1.0)
                        };
                    }
                    Pauli::Z => {
                        if bit == 1 {
                            phase = -phase;
                        }
                    }
                }
            }
            m[(col ^ flip_mask, col)] += phase * Complex64::new(term.coefficient, 0.0);
        }
    }
    Ok(m)
}

/// Smallest eigenvalue of the Hamiltonian.
pub fn ground_energy(h: &Hamiltonian) -> Result<f64> {
    let (lo, _) = eigenvalue_extremes(h)?;
    Ok(lo)
}

/// (min, max) eigenvalues; their difference is the spectral range used to
/// normalize energy tolerances.
pub fn eigenvalue_extremes(h: &Hamiltonian) -> Result<(f64, f64)> {
    let m = hamiltonian_matrix(h)?;
    let eigen = m.symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in eigen.eigenvalues.iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

pub fn spectral_range(h: &Hamiltonian) -> Result<f64> {
    let (lo, hi) = eigenvalue_extremes(h)?;
    Ok(hi - lo)
}

fn embed_single(q: usize, qubits: usize, gate: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let left = DMatrix::<Complex64>::identity(1 << q, 1 << q);
    let right = DMatrix::<Complex64>::identity(1 << (qubits - 1 - q), 1 << (qubits - 1 - q));
    left.kronecker(gate).kronecker(&right)
}

fn embed_cx(control: usize, target: usize, qubits: usize) -> DMatrix<Complex64> {
    let dim = 1usize << qubits;
    let cmask = 1usize << (qubits - 1 - control);
    let tmask = 1usize << (qubits - 1 - target);
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let row = if col & cmask != 0 { col ^ tmask } else { col };
        m[(row, col)] = Complex64::ONE;
    }
    m
}

/// Ansatz state computed as an explicit matrix chain applied to |0...0>.
/// Independent of the in-place statevector gate kernels.
pub fn ansatz_state_dense(spec: &AnsatzSpec, params: &[f64]) -> Result<DVector<Complex64>> {
    let q = spec.qubit_count;
    if q > MAX_DENSE_QUBITS {
        return Err(Error::QubitCapExceeded(q, MAX_DENSE_QUBITS));
    }
    if params.len() != spec.parameter_count() {
        return Err(Error::ParameterCount {
            expected: spec.parameter_count(),
            got: params.len(),
        });
    }
    let dim = 1usize << q;
    let mut state = DVector::<Complex64>::zeros(dim);
    state[0] = Complex64::ONE;

    let ry = |theta: f64| {
        let (s, c) = (theta / 2.0).sin_cos();
        DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(c, 0.0),
                Complex64::new(-s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(c, 0.0),
            ],
        )
    };
    let rz = |theta: f64| {
        DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::from_polar(1.0, -theta / 2.0),
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::from_polar(1.0, theta / 2.0),
            ],
        )
    };

    let pairs = spec.entangler_pairs();
    for layer in 0..=spec.reps {
        let base = 2 * q * layer;
        for qubit in 0..q {
            state = embed_single(qubit, q, &ry(params[base + qubit])) * state;
        }
        for qubit in 0..q {
            state = embed_single(qubit, q, &rz(params[base + q + qubit])) * state;
        }
        if layer < spec.reps {
            for &(c, t) in &pairs {
                state = embed_cx(c, t, q) * state;
            }
        }
    }
    Ok(state)
}
