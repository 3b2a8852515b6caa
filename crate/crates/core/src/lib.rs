//! Measurement-error-mitigated VQE simulation toolkit.
//!
//! This crate implements the full pipeline for studying application-tailored
//! measurement error mitigation in variational quantum eigensolvers:
//!
//! - [`pauli`]: Pauli strings, Hamiltonians, qubit-wise commutation, and
//!   grouping of terms into shared measurement bases.
//! - [`plan`]: sliding-window measurement subsets, redundancy-eliminating
//!   subset reduction, and per-iteration circuit cost accounting for the
//!   baseline / JigSaw / VarSaw strategies.
//! - [`sim`]: dense statevector simulation of a hardware-efficient ansatz,
//!   measurement PMFs, and shot sampling.
//! - [`noise`]: per-qubit readout confusion channel with a measurement
//!   crosstalk factor.
//! - [`mitigation`]: Bayesian reconstruction of a full-register PMF from a
//!   global PMF and low-error local (subset) PMFs.
//! - [`engine`]: the VQE loop with SPSA tuning and the feedback-controlled
//!   sparse execution of global circuits.
//! - [`cli`]: the `varsaw` command line entry points.
//!
//! The [`dense`] module holds independent dense-matrix oracles (exact
//! expectation values and ground energies) used for verification and for
//! reference energies in experiments.

pub mod cli;
pub mod dense;
pub mod engine;
pub mod error;
pub mod mitigation;
pub mod noise;
pub mod pauli;
pub mod plan;
pub mod pmf;
pub mod sim;
pub mod spsa;
pub mod synth;

pub use error::Error;
pub use pauli::{Hamiltonian, MeasurementBasis, Pauli, PauliString, PauliTerm};
pub use plan::{CostReport, MeasurementPlan, Subset};
pub use pmf::Pmf;
pub use sim::{AnsatzSpec, Entanglement, Statevector};

/// Hard cap on dense simulation size (`2^Q` amplitudes are stored).
pub const MAX_QUBITS: usize = 20;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
