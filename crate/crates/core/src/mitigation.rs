//! Bayesian reconstruction of a full-register PMF from a global PMF and
//! local (subset) PMFs.
//!
//! Each update redistributes a local outcome's probability across the full
//! bitstrings consistent with it, weighted by the global PMF's relative
//! probabilities. The output marginal over the subset's qubits equals the
//! local PMF exactly, so each update is self-normalizing.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::pauli::MeasurementBasis;
use crate::plan::Subset;
use crate::pmf::Pmf;
use crate::Result;

/// The outcome of executing one subset circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalResult {
    pub subset: Subset,
    pub pmf: Pmf,
}

impl LocalResult {
    pub fn new(subset: Subset, pmf: Pmf) -> Result<Self> {
        if pmf.qubit_labels() != subset.qubits.as_slice() {
            return Err(Error::LabelMismatch {
                expected: subset.qubits.clone(),
                got: pmf.qubit_labels().to_vec(),
            });
        }
        Ok(LocalResult { subset, pmf })
    }
}

/// One Bayesian update of `global` against a local marginal.
///
/// For each full outcome x with subset restriction s:
/// `out(x) = local(s) * global(x) / M(s)` where `M` is the global's marginal
/// over the subset. When `M(s) = 0` but `local(s) > 0`, the local mass is
/// spread uniformly over all full outcomes consistent with s.
pub fn bayesian_update(global: &Pmf, local: &LocalResult) -> Result<Pmf> {
    let positions = global.label_positions(&local.subset.qubits)?;
    // Same summation order as the output marginal, so the fixed point is
    // bitwise exact.
    let global_marginal = global.marginal(&local.subset.qubits)?;

    let width = global.width();
    let mut out: BTreeMap<u64, f64> = BTreeMap::new();

    for (&x, &p_global) in global.iter() {
        let s = global.project_key(x, &positions);
        let p_local = local.pmf.prob(s);
        if p_local == 0.0 {
            continue;
        }
        let mass = global_marginal.prob(s);
        // Ratio first: at the fixed point (local == marginal) the ratio is
        // exactly 1 and the update is bitwise identity.
        out.insert(x, (p_local / mass) * p_global);
    }

    // Zero-mass fallback: local outcomes the global never saw.
    let free_positions: Vec<usize> = (0..width).filter(|i| !positions.contains(i)).collect();
    for (&s, &p_local) in local.pmf.iter() {
        if p_local == 0.0 || global_marginal.prob(s) > 0.0 {
            continue;
        }
        let completions = 1u64 << free_positions.len();
        let share = p_local / completions as f64;
        let sub_w = positions.len();
        for filler in 0..completions {
            let mut x = 0u64;
            for (i, &pos) in positions.iter().enumerate() {
                let bit = s >> (sub_w - 1 - i) & 1;
                x |= bit << (width - 1 - pos);
            }
            for (j, &pos) in free_positions.iter().enumerate() {
                let bit = filler >> j & 1;
                x |= bit << (width - 1 - pos);
            }
            *out.entry(x).or_insert(0.0) += share;
        }
    }

    Ok(Pmf::from_parts(global.qubit_labels().to_vec(), out))
}

/// Deterministic processing order for locals: ascending lowest qubit index,
/// ties broken by qubit list then bases.
pub fn sort_locals(locals: &mut [LocalResult]) {
    locals.sort_by(|a, b| {
        let a_min = a.subset.qubits.first().copied().unwrap_or(usize::MAX);
        let b_min = b.subset.qubits.first().copied().unwrap_or(usize::MAX);
        a_min
            .cmp(&b_min)
            .then_with(|| a.subset.qubits.cmp(&b.subset.qubits))
            .then_with(|| a.subset.bases.cmp(&b.subset.bases))
    });
}

/// Apply [`bayesian_update`] over all locals in deterministic order.
pub fn reconstruct(global: &Pmf, locals: &[LocalResult]) -> Result<Pmf> {
    let mut ordered = locals.to_vec();
    sort_locals(&mut ordered);
    let mut current = global.clone();
    for local in &ordered {
        current = bayesian_update(&current, local)?;
    }
    Ok(current)
}

/// Supplies circuit executions (with whatever noise or sampling the caller
/// models) to [`run_mitigated_group`], and accounts each execution.
pub trait CircuitSource {
    /// Full-register PMF for a measurement basis. Charges one circuit.
    fn global_pmf(&mut self, basis: &MeasurementBasis) -> Pmf;

    /// Local PMF for a subset. Returns the PMF and whether a circuit was
    /// actually executed now (false when served from the per-iteration
    /// cache, so shared subsets are charged once per iteration).
    fn subset_pmf(&mut self, subset: &Subset) -> (Pmf, bool);
}

/// Produce one group's mitigated PMF.
///
/// Executes every plan subset whose bases agree with the group basis on the
/// subset's qubits, takes the global PMF either from `prior` (no circuit
/// charged) or from a fresh execution, and reconstructs. Returns the
/// mitigated PMF and the number of circuits charged by this call. With no
/// compatible subsets the global (or prior) is returned unmodified.
pub fn run_mitigated_group<S: CircuitSource>(
    source: &mut S,
    basis: &MeasurementBasis,
    plan_subsets: &[Subset],
    prior: Option<&Pmf>,
) -> Result<(Pmf, u64)> {
    let mut circuits = 0u64;
    let compatible: Vec<&Subset> = plan_subsets
        .iter()
        .filter(|s| s.agrees_with(basis))
        .collect();

    let global = match prior {
        Some(p) => p.clone(),
        None => {
            circuits += 1;
            source.global_pmf(basis)
        }
    };
    if compatible.is_empty() {
        return Ok((global, circuits));
    }

    let mut locals = Vec::with_capacity(compatible.len());
    for subset in compatible {
        let (pmf, executed) = source.subset_pmf(subset);
        if executed {
            circuits += 1;
        }
        locals.push(LocalResult::new(subset.clone(), pmf)?);
    }
    Ok((reconstruct(&global, &locals)?, circuits))
}
