//! The end-to-end VQE loop: per-iteration measurement execution under one of
//! the mitigation strategies, SPSA parameter tuning, and the temporal
//! controller that decides how sparsely the global circuits run.
//!
//! Per iteration the optimizer probes the objective twice (at perturbed
//! parameters) and the accepted parameters are evaluated once more for the
//! trace. Probes evaluate exactly the way the accepted evaluation would,
//! but leave the controller state untouched; the controller advances once
//! per accepted iteration. On a scheduled global iteration the energy is
//! computed both with fresh globals and with the cached priors: if the
//! fresh-global energy is lower, the sparsity window shrinks, otherwise it
//! grows (ties favor sparsity). Fresh mitigated results refresh the cached
//! priors either way, since those circuits are already spent.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::mitigation::{reconstruct, run_mitigated_group, CircuitSource, LocalResult};
use crate::noise::{apply_readout_noise, NoiseModel};
use crate::pauli::{expectation_from_pmf, group_into_bases, Hamiltonian, MeasurementBasis};
use crate::plan::{sliding_window_subsets, varsaw_plan_with, MeasurementPlan, Subset, WindowMode};
use crate::pmf::Pmf;
use crate::sim::{build_state, ideal_pmf, sample_pmf_with, AnsatzSpec, Statevector};
use crate::spsa::{Spsa, SpsaConfig};
use crate::Result;

/// Measurement strategy of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Noise-free reference: global circuits only.
    Ideal,
    /// Noisy global circuits, no mitigation.
    Baseline,
    /// Fresh global plus per-basis window subsets, every group, every
    /// evaluation.
    Jigsaw,
    /// Reduced shared subsets with selectively executed globals.
    Varsaw,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Ideal => "ideal",
            Mode::Baseline => "baseline",
            Mode::Jigsaw => "jigsaw",
            Mode::Varsaw => "varsaw",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ideal" => Ok(Mode::Ideal),
            "baseline" => Ok(Mode::Baseline),
            "jigsaw" => Ok(Mode::Jigsaw),
            "varsaw" => Ok(Mode::Varsaw),
            other => Err(Error::InvalidConfig(format!(
                "unknown mode {other:?} (expected ideal, baseline, jigsaw, or varsaw)"
            ))),
        }
    }
}

/// Exact PMFs or finite-shot sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecMode {
    Analytic,
    Sampled,
}

impl std::str::FromStr for ExecMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(ExecMode::Analytic),
            "sampled" => Ok(ExecMode::Sampled),
            other => Err(Error::InvalidConfig(format!(
                "unknown execution mode {other:?} (expected analytic or sampled)"
            ))),
        }
    }
}

/// Stopping rule: exactly one of the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Budget {
    Iterations(u64),
    Circuits(u64),
}

/// Global-execution sparsity policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KPolicy {
    /// Hill-climbing window, halved/doubled within [k_min, k_max].
    Adaptive { k_init: u64, k_min: u64, k_max: u64 },
    /// Constant window; 1 reproduces no-sparsity, a huge value with one
    /// initial global reproduces max-sparsity.
    Fixed(u64),
}

impl Default for KPolicy {
    fn default() -> Self {
        KPolicy::Adaptive {
            k_init: 2,
            k_min: 1,
            k_max: 128,
        }
    }
}

/// Executes circuits for one run: owns the prepared state, the noise model,
/// the per-evaluation subset cache, and the audit counter of simulator
/// invocations.
pub struct Executor {
    noise: NoiseModel,
    exec_mode: ExecMode,
    shots: u64,
    sample_rng: ChaCha8Rng,
    state: Option<Statevector>,
    subset_cache: BTreeMap<Subset, Pmf>,
    executed: u64,
}

impl Executor {
    pub fn new(noise: NoiseModel, exec_mode: ExecMode, shots: u64, seed: u64) -> Self {
        Executor {
            noise,
            exec_mode,
            shots,
            sample_rng: ChaCha8Rng::seed_from_u64(seed),
            state: None,
            subset_cache: BTreeMap::new(),
            executed: 0,
        }
    }

    /// Prepare the ansatz state for a fresh parameter vector. Clears the
    /// subset cache: results are only shared within one evaluation.
    pub fn prepare(&mut self, spec: &AnsatzSpec, params: &[f64]) -> Result<()> {
        self.state = Some(build_state(spec, params)?);
        self.subset_cache.clear();
        Ok(())
    }

    /// Total simulator invocations so far (the audit counter).
    pub fn circuits_executed(&self) -> u64 {
        self.executed
    }

    fn state(&self) -> &Statevector {
        self.state.as_ref().expect("executor prepared before use")
    }

    fn execute(&mut self, basis: &MeasurementBasis) -> Pmf {
        self.executed += 1;
        let pmf = ideal_pmf(self.state(), basis).expect("basis length matches register");
        let noisy = apply_readout_noise(&pmf, &self.noise);
        match self.exec_mode {
            ExecMode::Analytic => noisy,
            ExecMode::Sampled => sample_pmf_with(&noisy, self.shots, &mut self.sample_rng),
        }
    }

    /// Execute a raw subset circuit without consulting the shared cache
    /// (JigSaw runs its windows per basis, duplicates included).
    fn execute_subset_uncached(&mut self, subset: &Subset, width: usize) -> Pmf {
        self.execute(&MeasurementBasis(subset.as_string(width)))
    }
}

impl CircuitSource for Executor {
    fn global_pmf(&mut self, basis: &MeasurementBasis) -> Pmf {
        self.execute(basis)
    }

    fn subset_pmf(&mut self, subset: &Subset) -> (Pmf, bool) {
        if let Some(pmf) = self.subset_cache.get(subset) {
            return (pmf.clone(), false);
        }
        let width = self.state().qubit_count();
        let pmf = self.execute_subset_uncached(subset, width);
        self.subset_cache.insert(subset.clone(), pmf.clone());
        (pmf, true)
    }
}

/// Where the varsaw evaluation takes its global distributions from.
#[derive(Clone, Copy)]
pub enum GlobalSource<'a> {
    Fresh,
    Priors(&'a BTreeMap<usize, Pmf>),
}

/// One full objective evaluation.
pub struct EnergyBreakdown {
    pub energy: f64,
    pub circuits: u64,
    /// Per-group PMFs the energy was computed from, in group order.
    pub group_pmfs: Vec<Pmf>,
}

/// Evaluate the Hamiltonian energy for the prepared state according to the
/// measurement strategy. Circuits are charged onto `exec`'s audit counter;
/// the returned count is what this call charged.
pub fn evaluate_energy(
    h: &Hamiltonian,
    groups: &[(MeasurementBasis, Vec<usize>)],
    plan: &MeasurementPlan,
    mode: Mode,
    globals: GlobalSource<'_>,
    exec: &mut Executor,
) -> Result<EnergyBreakdown> {
    let before = exec.circuits_executed();
    let width = h.qubit_count;
    let mut energy = 0.0;
    let mut group_pmfs = Vec::with_capacity(groups.len());

    for (group_idx, (basis, members)) in groups.iter().enumerate() {
        let pmf = match mode {
            Mode::Ideal | Mode::Baseline => exec.global_pmf(basis),
            Mode::Jigsaw => {
                let global = exec.global_pmf(basis);
                let windows = sliding_window_subsets(basis, plan.subset_size)?;
                let mut locals = Vec::with_capacity(windows.len());
                for w in windows {
                    let pmf = exec.execute_subset_uncached(&w, width);
                    locals.push(LocalResult::new(w, pmf)?);
                }
                reconstruct(&global, &locals)?
            }
            Mode::Varsaw => {
                let prior = match globals {
                    GlobalSource::Fresh => None,
                    GlobalSource::Priors(priors) => priors.get(&group_idx),
                };
                let (pmf, _) = run_mitigated_group(exec, basis, &plan.subsets, prior)?;
                pmf
            }
        };

        for &term_idx in members {
            let term = &h.terms[term_idx];
            if term.coefficient != 0.0 {
                energy += term.coefficient * expectation_from_pmf(&pmf, term, basis)?;
            }
        }
        group_pmfs.push(pmf);
    }

    Ok(EnergyBreakdown {
        energy,
        circuits: exec.circuits_executed() - before,
        group_pmfs,
    })
}

/// State of the selective-global controller.
#[derive(Debug, Clone)]
pub struct SparsityController {
    pub k: u64,
    pub k_min: u64,
    pub k_max: u64,
    pub adaptive: bool,
    pub cached_priors: BTreeMap<usize, Pmf>,
    pub last_global_iteration: Option<u64>,
}

impl SparsityController {
    pub fn new(policy: KPolicy) -> Self {
        match policy {
            KPolicy::Adaptive {
                k_init,
                k_min,
                k_max,
            } => SparsityController {
                k: k_init.clamp(k_min, k_max),
                k_min,
                k_max,
                adaptive: true,
                cached_priors: BTreeMap::new(),
                last_global_iteration: None,
            },
            KPolicy::Fixed(k) => SparsityController {
                k: k.max(1),
                k_min: k.max(1),
                k_max: k.max(1),
                adaptive: false,
                cached_priors: BTreeMap::new(),
                last_global_iteration: None,
            },
        }
    }

    /// Is `iteration` due for a global execution? Always true before the
    /// first global.
    pub fn scheduled(&self, iteration: u64) -> bool {
        match self.last_global_iteration {
            None => true,
            Some(last) => iteration - last >= self.k,
        }
    }

    /// Record mitigated results of a non-global iteration: they become the
    /// priors the next iteration chains from.
    pub fn chain_priors(&mut self, group_pmfs: Vec<Pmf>) {
        self.cached_priors = group_pmfs.into_iter().enumerate().collect();
    }

    /// Hill-climbing decision on a scheduled global iteration. Compares the
    /// fresh-global energy (a) against the prior-based energy (b); lower
    /// fresh energy shrinks k, otherwise k grows (a tie favors sparsity).
    /// The fresh mitigated results always refresh the cached priors.
    /// Returns the adopted energy.
    pub fn step(
        &mut self,
        iteration: u64,
        fresh_energy: f64,
        fresh_pmfs: Vec<Pmf>,
        prior_energy: f64,
    ) -> f64 {
        let adopted = if fresh_energy < prior_energy {
            self.k = (self.k / 2).max(self.k_min);
            fresh_energy
        } else {
            self.k = self.k.saturating_mul(2).min(self.k_max);
            prior_energy
        };
        self.cached_priors = fresh_pmfs.into_iter().enumerate().collect();
        self.last_global_iteration = Some(iteration);
        adopted
    }

    /// A scheduled global iteration without comparison (fixed policy or the
    /// very first global).
    pub fn adopt_fresh(&mut self, iteration: u64, fresh_pmfs: Vec<Pmf>) {
        self.cached_priors = fresh_pmfs.into_iter().enumerate().collect();
        self.last_global_iteration = Some(iteration);
    }
}

/// One trace row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: u64,
    pub params_digest: u64,
    pub energy: f64,
    pub circuits_cumulative: u64,
    pub k: u64,
    pub global_executed: bool,
    pub aborted_step: bool,
}

/// Full record of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqaTrace {
    pub mode: Mode,
    pub seed: u64,
    pub records: Vec<TraceRecord>,
    pub final_params: Vec<f64>,
    pub total_circuits: u64,
    pub aborted_steps: u64,
}

impl VqaTrace {
    pub fn final_energy(&self) -> f64 {
        self.records.last().map(|r| r.energy).unwrap_or(f64::NAN)
    }

    pub fn best_energy(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.energy)
            .fold(f64::INFINITY, f64::min)
    }

    /// Iterations completed after the initial evaluation.
    pub fn iterations_completed(&self) -> u64 {
        self.records.last().map(|r| r.iteration).unwrap_or(0)
    }
}

/// Everything a run needs besides the Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqaConfig {
    pub ansatz: AnsatzSpec,
    pub mode: Mode,
    pub budget: Budget,
    pub spsa: SpsaConfig,
    pub noise: NoiseModel,
    pub exec_mode: ExecMode,
    pub shots: u64,
    pub subset_size: usize,
    pub window_mode: WindowMode,
    pub k_policy: KPolicy,
    /// Initial parameters are drawn uniformly from [-init_spread, init_spread].
    pub init_spread: f64,
    pub seed: u64,
}

impl VqaConfig {
    pub fn new(ansatz: AnsatzSpec, mode: Mode, budget: Budget, seed: u64) -> Self {
        VqaConfig {
            ansatz,
            mode,
            budget,
            spsa: SpsaConfig {
                seed,
                ..SpsaConfig::default()
            },
            noise: NoiseModel::default(),
            exec_mode: ExecMode::Analytic,
            shots: 8192,
            subset_size: 2,
            window_mode: WindowMode::Sliding,
            k_policy: KPolicy::default(),
            init_spread: DEFAULT_INIT_SPREAD,
            seed,
        }
    }
}

/// Default half-width of the uniform initial-parameter distribution. Small
/// initial angles keep the ansatz near |0...0> where the landscape is tame.
pub const DEFAULT_INIT_SPREAD: f64 = 0.5;

// Independent seed streams derived from the run seed.
const PARAM_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;
const SAMPLE_STREAM: u64 = 0x6a09_e667_f3bc_c909;

fn initial_parameters(spec: &AnsatzSpec, spread: f64, seed: u64) -> Vec<f64> {
    let spread = spread.clamp(f64::MIN_POSITIVE, PI);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ PARAM_STREAM);
    (0..spec.parameter_count())
        .map(|_| rng.random_range(-spread..spread))
        .collect()
}

fn params_digest(params: &[f64]) -> u64 {
    // FNV-1a over the raw parameter bits.
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for p in params {
        for byte in p.to_bits().to_le_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    hash
}

/// Run the full loop. The spatial plan is built once up front; the SPSA
/// loop then alternates probe evaluations and an accepted evaluation per
/// iteration until the budget is exhausted (a started iteration always
/// finishes). Fully reproducible from the seed.
pub fn run_vqa(h: &Hamiltonian, cfg: &VqaConfig) -> Result<VqaTrace> {
    if h.qubit_count != cfg.ansatz.qubit_count {
        return Err(Error::LengthMismatch {
            left: h.qubit_count,
            right: cfg.ansatz.qubit_count,
        });
    }
    let plan = varsaw_plan_with(h, cfg.subset_size, cfg.window_mode)?;
    let groups = group_into_bases(h);

    let noise = match cfg.mode {
        Mode::Ideal => NoiseModel::noiseless(),
        _ => cfg.noise,
    };
    let mut exec = Executor::new(noise, cfg.exec_mode, cfg.shots, cfg.seed ^ SAMPLE_STREAM);
    let mut spsa = Spsa::new(SpsaConfig {
        seed: cfg.seed,
        ..cfg.spsa
    })?;
    let mut controller = SparsityController::new(cfg.k_policy);

    let mut params = initial_parameters(&cfg.ansatz, cfg.init_spread, cfg.seed);
    let mut records = Vec::new();
    let mut aborted_steps = 0;

    // Initial evaluation at iteration 0: globals are always fresh here.
    exec.prepare(&cfg.ansatz, &params)?;
    let first = evaluate_energy(h, &groups, &plan, cfg.mode, GlobalSource::Fresh, &mut exec)?;
    if cfg.mode == Mode::Varsaw {
        controller.adopt_fresh(0, first.group_pmfs);
    }
    records.push(TraceRecord {
        iteration: 0,
        params_digest: params_digest(&params),
        energy: first.energy,
        circuits_cumulative: exec.circuits_executed(),
        k: controller.k,
        global_executed: true,
        aborted_step: false,
    });

    let mut iteration: u64 = 0;
    loop {
        match cfg.budget {
            Budget::Iterations(max) => {
                if iteration >= max {
                    break;
                }
            }
            Budget::Circuits(max) => {
                if exec.circuits_executed() >= max {
                    break;
                }
            }
        }
        iteration += 1;

        let scheduled = match cfg.mode {
            Mode::Varsaw => controller.scheduled(iteration),
            _ => true,
        };

        // SPSA probes evaluate the same way this iteration's accepted
        // evaluation will, but leave the controller untouched.
        let probe_priors: Option<BTreeMap<usize, Pmf>> = if scheduled {
            None
        } else {
            Some(controller.cached_priors.clone())
        };
        let step = {
            let objective = |p: &[f64]| -> f64 {
                let r = (|| -> Result<f64> {
                    exec.prepare(&cfg.ansatz, p)?;
                    let source = match &probe_priors {
                        None => GlobalSource::Fresh,
                        Some(map) => GlobalSource::Priors(map),
                    };
                    Ok(evaluate_energy(h, &groups, &plan, cfg.mode, source, &mut exec)?.energy)
                })();
                r.unwrap_or(f64::NAN)
            };
            spsa.step(&params, objective, iteration - 1)
        };
        if step.aborted {
            aborted_steps += 1;
        } else {
            params = step.params;
        }

        // Accepted evaluation; the controller advances here.
        exec.prepare(&cfg.ansatz, &params)?;
        let (energy, global_executed) = match cfg.mode {
            Mode::Varsaw => {
                if scheduled {
                    let fresh = evaluate_energy(
                        h,
                        &groups,
                        &plan,
                        cfg.mode,
                        GlobalSource::Fresh,
                        &mut exec,
                    )?;
                    if controller.adaptive && !controller.cached_priors.is_empty() {
                        let priors = controller.cached_priors.clone();
                        let with_prior = evaluate_energy(
                            h,
                            &groups,
                            &plan,
                            cfg.mode,
                            GlobalSource::Priors(&priors),
                            &mut exec,
                        )?;
                        let adopted = controller.step(
                            iteration,
                            fresh.energy,
                            fresh.group_pmfs,
                            with_prior.energy,
                        );
                        (adopted, true)
                    } else {
                        let energy = fresh.energy;
                        controller.adopt_fresh(iteration, fresh.group_pmfs);
                        (energy, true)
                    }
                } else {
                    let priors = controller.cached_priors.clone();
                    let out = evaluate_energy(
                        h,
                        &groups,
                        &plan,
                        cfg.mode,
                        GlobalSource::Priors(&priors),
                        &mut exec,
                    )?;
                    controller.chain_priors(out.group_pmfs);
                    (out.energy, false)
                }
            }
            _ => {
                let out =
                    evaluate_energy(h, &groups, &plan, cfg.mode, GlobalSource::Fresh, &mut exec)?;
                (out.energy, true)
            }
        };

        records.push(TraceRecord {
            iteration,
            params_digest: params_digest(&params),
            energy,
            circuits_cumulative: exec.circuits_executed(),
            k: controller.k,
            global_executed,
            aborted_step: step.aborted,
        });
    }

    // Audit: the cumulative column must equal the executor's own counter.
    debug_assert_eq!(
        records.last().map(|r| r.circuits_cumulative),
        Some(exec.circuits_executed())
    );

    Ok(VqaTrace {
        mode: cfg.mode,
        seed: cfg.seed,
        records,
        final_params: params,
        total_circuits: exec.circuits_executed(),
        aborted_steps,
    })
}
