//! Python bindings: Hamiltonians, measurement planning, Bayesian
//! reconstruction, and the VQE loop.
//!
//! PMFs cross the boundary as `(labels, {bitstring: probability})` pairs
//! with qubit `labels[i]` at bitstring position `i`.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use varsaw_core::engine::{self, Budget, ExecMode, KPolicy, Mode, VqaConfig};
use varsaw_core::mitigation::{self, LocalResult};
use varsaw_core::noise::NoiseModel;
use varsaw_core::pauli::{self, MeasurementBasis, Pauli, PauliString};
use varsaw_core::plan::{self, Subset, WindowMode};
use varsaw_core::pmf::Pmf;
use varsaw_core::sim::AnsatzSpec;
use varsaw_core::spsa::SpsaConfig;
use varsaw_core::synth;

fn to_py_err(err: varsaw_core::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_string(s: &str) -> PyResult<PauliString> {
    s.parse().map_err(to_py_err)
}

fn pmf_from_py(labels: Vec<usize>, probs: BTreeMap<String, f64>) -> PyResult<Pmf> {
    let width = labels.len();
    let mut map = BTreeMap::new();
    for (bits, p) in probs {
        if bits.len() != width || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(PyValueError::new_err(format!(
                "bitstring {bits:?} does not match {width} labels"
            )));
        }
        let key = u64::from_str_radix(&bits, 2).expect("validated binary string");
        *map.entry(key).or_insert(0.0) += p;
    }
    Pmf::new(labels, map).map_err(to_py_err)
}

fn pmf_to_py(pmf: &Pmf) -> BTreeMap<String, f64> {
    pmf.iter().map(|(&k, &p)| (pmf.bitstring(k), p)).collect()
}

/// A weighted sum of Pauli strings.
#[pyclass(name = "Hamiltonian", from_py_object)]
#[derive(Clone)]
struct PyHamiltonian {
    inner: pauli::Hamiltonian,
}

#[pymethods]
impl PyHamiltonian {
    /// Build from `(pauli_string, coefficient)` pairs.
    #[new]
    fn new(qubit_count: usize, terms: Vec<(String, f64)>) -> PyResult<Self> {
        let terms = terms
            .into_iter()
            .map(|(s, c)| Ok(pauli::PauliTerm::new(parse_string(&s)?, c)))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyHamiltonian {
            inner: pauli::Hamiltonian::new(qubit_count, terms).map_err(to_py_err)?,
        })
    }

    /// Transverse-field Ising chain `-J sum Z_i Z_{i+1} - h sum X_i`.
    #[staticmethod]
    #[pyo3(signature = (qubits, coupling_j=1.0, field_h=1.0))]
    fn tfim(qubits: usize, coupling_j: f64, field_h: f64) -> PyResult<Self> {
        Ok(PyHamiltonian {
            inner: synth::tfim(qubits, coupling_j, field_h).map_err(to_py_err)?,
        })
    }

    /// Random Hamiltonian with distinct strings and uniform coefficients.
    #[staticmethod]
    fn random(qubits: usize, num_terms: usize, seed: u64) -> PyResult<Self> {
        Ok(PyHamiltonian {
            inner: synth::random_hamiltonian(qubits, num_terms, seed).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyHamiltonian {
            inner: pauli::Hamiltonian::from_json(text).map_err(to_py_err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn qubit_count(&self) -> usize {
        self.inner.qubit_count
    }

    #[getter]
    fn num_terms(&self) -> usize {
        self.inner.num_terms()
    }

    fn terms(&self) -> Vec<(String, f64)> {
        self.inner
            .terms
            .iter()
            .map(|t| (t.string.to_string(), t.coefficient))
            .collect()
    }

    /// Qubit-wise commutation groups: `(basis, term_indices)` pairs.
    fn group_bases(&self) -> Vec<(String, Vec<usize>)> {
        pauli::group_into_bases(&self.inner)
            .into_iter()
            .map(|(b, members)| (b.to_string(), members))
            .collect()
    }

    /// Smallest eigenvalue via dense diagonalization (up to 10 qubits).
    fn ground_energy(&self) -> PyResult<f64> {
        varsaw_core::dense::ground_energy(&self.inner).map_err(to_py_err)
    }

    fn spectral_range(&self) -> PyResult<f64> {
        varsaw_core::dense::spectral_range(&self.inner).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Hamiltonian(qubits={}, terms={})",
            self.inner.qubit_count,
            self.inner.num_terms()
        )
    }
}

/// The spatial measurement plan: commuted global bases plus reduced subsets.
#[pyclass(name = "MeasurementPlan")]
struct PyMeasurementPlan {
    inner: plan::MeasurementPlan,
    jigsaw_subset_count: u64,
}

#[pymethods]
impl PyMeasurementPlan {
    #[getter]
    fn global_bases(&self) -> Vec<String> {
        self.inner
            .global_bases
            .iter()
            .map(|b| b.to_string())
            .collect()
    }

    /// Subsets as `(qubits, bases)` pairs.
    #[getter]
    fn subsets(&self) -> Vec<(Vec<usize>, String)> {
        self.inner
            .subsets
            .iter()
            .map(|s| {
                (
                    s.qubits.clone(),
                    s.bases.iter().map(|b| b.to_char()).collect(),
                )
            })
            .collect()
    }

    #[getter]
    fn subset_size(&self) -> usize {
        self.inner.subset_size
    }

    #[getter]
    fn jigsaw_subset_count(&self) -> u64 {
        self.jigsaw_subset_count
    }

    /// Per-iteration circuit counts at the given global execution fraction.
    #[pyo3(signature = (k_frac=0.01))]
    fn cost_report(&self, k_frac: f64) -> PyResult<BTreeMap<String, u64>> {
        let cost =
            plan::cost_report(&self.inner, self.jigsaw_subset_count, k_frac).map_err(to_py_err)?;
        Ok(BTreeMap::from([
            ("baseline_per_iter".to_string(), cost.baseline_per_iter),
            ("jigsaw_per_iter".to_string(), cost.jigsaw_per_iter),
            (
                "varsaw_subsets_per_iter".to_string(),
                cost.varsaw_subsets_per_iter,
            ),
            (
                "varsaw_global_per_iter".to_string(),
                cost.varsaw_global_per_iter,
            ),
            (
                "varsaw_amortized_per_iter".to_string(),
                cost.varsaw_amortized_per_iter(),
            ),
        ]))
    }

    fn __repr__(&self) -> String {
        format!(
            "MeasurementPlan(bases={}, subsets={}, m={})",
            self.inner.global_bases.len(),
            self.inner.subsets.len(),
            self.inner.subset_size
        )
    }
}

/// True iff the strings agree at every position up to identities.
#[pyfunction]
fn qubit_wise_commutes(a: &str, b: &str) -> PyResult<bool> {
    pauli::qubit_wise_commutes(&parse_string(a)?, &parse_string(b)?).map_err(to_py_err)
}

/// All strings over `alphabet + I` (excluding `target`) covering `target`.
#[pyfunction]
#[pyo3(signature = (target, alphabet="XYZ"))]
fn commuting_parents(target: &str, alphabet: &str) -> PyResult<Vec<String>> {
    let letters = parse_string(alphabet)?;
    Ok(
        pauli::commuting_parents(&parse_string(target)?, letters.letters())
            .into_iter()
            .map(|s| s.to_string())
            .collect(),
    )
}

/// Build the measurement plan for a Hamiltonian.
#[pyfunction]
#[pyo3(signature = (hamiltonian, subset_size=2, window="sliding"))]
fn make_plan(
    hamiltonian: &PyHamiltonian,
    subset_size: usize,
    window: &str,
) -> PyResult<PyMeasurementPlan> {
    let mode: WindowMode = window.parse().map_err(to_py_err)?;
    let inner = plan::varsaw_plan_with(&hamiltonian.inner, subset_size, mode).map_err(to_py_err)?;
    let jigsaw = plan::jigsaw_plan(&inner.global_bases, subset_size).map_err(to_py_err)?;
    Ok(PyMeasurementPlan {
        inner,
        jigsaw_subset_count: jigsaw.len() as u64,
    })
}

/// One Bayesian update of a global PMF against a local marginal.
#[pyfunction]
fn bayesian_update(
    global_labels: Vec<usize>,
    global_probs: BTreeMap<String, f64>,
    local_labels: Vec<usize>,
    local_probs: BTreeMap<String, f64>,
) -> PyResult<BTreeMap<String, f64>> {
    let global = pmf_from_py(global_labels, global_probs)?;
    let width = local_labels.len();
    let local_pmf = pmf_from_py(local_labels.clone(), local_probs)?;
    let subset = Subset::new(local_labels, vec![Pauli::Z; width]);
    let local = LocalResult::new(subset, local_pmf).map_err(to_py_err)?;
    let out = mitigation::bayesian_update(&global, &local).map_err(to_py_err)?;
    Ok(pmf_to_py(&out))
}

/// Sequential reconstruction of a global PMF from locals given as
/// `(qubits, {bitstring: probability})` pairs.
#[pyfunction]
fn reconstruct(
    global_labels: Vec<usize>,
    global_probs: BTreeMap<String, f64>,
    locals: Vec<(Vec<usize>, BTreeMap<String, f64>)>,
) -> PyResult<BTreeMap<String, f64>> {
    let global = pmf_from_py(global_labels, global_probs)?;
    let locals = locals
        .into_iter()
        .map(|(qubits, probs)| {
            let width = qubits.len();
            let pmf = pmf_from_py(qubits.clone(), probs)?;
            LocalResult::new(Subset::new(qubits, vec![Pauli::Z; width]), pmf).map_err(to_py_err)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let out = mitigation::reconstruct(&global, &locals).map_err(to_py_err)?;
    Ok(pmf_to_py(&out))
}

/// Expectation of a Pauli term under a PMF measured in `basis`.
#[pyfunction]
fn expectation_from_pmf(
    labels: Vec<usize>,
    probs: BTreeMap<String, f64>,
    term: &str,
    basis: &str,
) -> PyResult<f64> {
    let pmf = pmf_from_py(labels, probs)?;
    let term = pauli::PauliTerm::new(parse_string(term)?, 1.0);
    let basis = MeasurementBasis(parse_string(basis)?);
    pauli::expectation_from_pmf(&pmf, &term, &basis).map_err(to_py_err)
}

/// Run the VQE loop; returns a summary dict including the trace rows.
#[pyfunction]
#[pyo3(signature = (
    hamiltonian, mode="varsaw", budget_iters=None, budget_circuits=None, seed=0,
    reps=2, entanglement="full", p01=0.04, p10=0.04, chi=0.26, scale=1.0,
    exec_mode="analytic", shots=8192, subset_size=2, window="sliding",
    fixed_k=None, k_init=2, k_min=1, k_max=128, init_spread=0.5,
    spsa_a=None, spsa_c=0.2, spsa_alpha=0.602, spsa_gamma=0.101,
))]
#[allow(clippy::too_many_arguments)]
fn run_vqa(
    py: Python<'_>,
    hamiltonian: &PyHamiltonian,
    mode: &str,
    budget_iters: Option<u64>,
    budget_circuits: Option<u64>,
    seed: u64,
    reps: usize,
    entanglement: &str,
    p01: f64,
    p10: f64,
    chi: f64,
    scale: f64,
    exec_mode: &str,
    shots: u64,
    subset_size: usize,
    window: &str,
    fixed_k: Option<u64>,
    k_init: u64,
    k_min: u64,
    k_max: u64,
    init_spread: f64,
    spsa_a: Option<f64>,
    spsa_c: f64,
    spsa_alpha: f64,
    spsa_gamma: f64,
) -> PyResult<Py<PyAny>> {
    let budget = match (budget_iters, budget_circuits) {
        (Some(i), None) => Budget::Iterations(i),
        (None, Some(c)) => Budget::Circuits(c),
        _ => {
            return Err(PyValueError::new_err(
                "set exactly one of budget_iters / budget_circuits",
            ))
        }
    };
    let mode: Mode = mode.parse().map_err(to_py_err)?;
    let ansatz = AnsatzSpec::new(
        hamiltonian.inner.qubit_count,
        reps,
        entanglement.parse().map_err(to_py_err)?,
    )
    .map_err(to_py_err)?;
    let cfg = VqaConfig {
        ansatz,
        mode,
        budget,
        spsa: SpsaConfig {
            a: spsa_a,
            c: spsa_c,
            alpha: spsa_alpha,
            gamma: spsa_gamma,
            max_iterations: budget_iters.unwrap_or(0),
            seed,
        },
        noise: NoiseModel {
            p01,
            p10,
            crosstalk_chi: chi,
            scale,
        },
        exec_mode: exec_mode.parse::<ExecMode>().map_err(to_py_err)?,
        shots,
        subset_size,
        window_mode: window.parse::<WindowMode>().map_err(to_py_err)?,
        k_policy: match fixed_k {
            Some(k) => KPolicy::Fixed(k),
            None => KPolicy::Adaptive {
                k_init,
                k_min,
                k_max,
            },
        },
        init_spread,
        seed,
    };
    let trace = engine::run_vqa(&hamiltonian.inner, &cfg).map_err(to_py_err)?;

    let rows: Vec<Py<PyAny>> = trace
        .records
        .iter()
        .map(|r| {
            let row = pyo3::types::PyDict::new(py);
            row.set_item("iter", r.iteration)?;
            row.set_item("energy", r.energy)?;
            row.set_item("circuits_cum", r.circuits_cumulative)?;
            row.set_item("k", r.k)?;
            row.set_item("global", r.global_executed)?;
            Ok(row.into_any().unbind())
        })
        .collect::<PyResult<_>>()?;

    let summary = pyo3::types::PyDict::new(py);
    summary.set_item("mode", trace.mode.to_string())?;
    summary.set_item("seed", trace.seed)?;
    summary.set_item("iterations_completed", trace.iterations_completed())?;
    summary.set_item("final_energy", trace.final_energy())?;
    summary.set_item("best_energy", trace.best_energy())?;
    summary.set_item("total_circuits", trace.total_circuits)?;
    summary.set_item("aborted_steps", trace.aborted_steps)?;
    summary.set_item("trace", rows)?;
    Ok(summary.into_any().unbind())
}

#[pymodule]
fn varsaw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("MAX_QUBITS", varsaw_core::MAX_QUBITS)?;
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyMeasurementPlan>()?;
    m.add_function(wrap_pyfunction!(qubit_wise_commutes, m)?)?;
    m.add_function(wrap_pyfunction!(commuting_parents, m)?)?;
    m.add_function(wrap_pyfunction!(make_plan, m)?)?;
    m.add_function(wrap_pyfunction!(bayesian_update, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(expectation_from_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(run_vqa, m)?)?;
    Ok(())
}
