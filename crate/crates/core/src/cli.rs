//! Command-line entry points: `plan`, `run`, `sweep`, `sweep-cost`, and
//! `compare`.
//!
//! Configuration is a flat JSON document; every key can be overridden by a
//! command-line flag of the same name. Exit codes: 0 success, 2 usage or
//! configuration problems, 3 invalid input data, 4 resource limits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::engine::{run_vqa, Budget, ExecMode, KPolicy, Mode, VqaConfig, VqaTrace};
use crate::error::Error;
use crate::noise::NoiseModel;
use crate::pauli::Hamiltonian;
use crate::plan::{
    cost_report, jigsaw_plan, varsaw_plan_with, CostReport, MeasurementPlan, WindowMode,
};
use crate::sim::AnsatzSpec;
use crate::spsa::SpsaConfig;
use crate::synth::{random_hamiltonian, scaling_term_count, tfim};
use crate::MAX_QUBITS;

/// Process exit classes.
#[derive(Debug)]
pub enum CliError {
    /// Usage or configuration problem (exit 2).
    Usage(String),
    /// Invalid input data (exit 3).
    Input(String),
    /// Resource limit (exit 4).
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Resource(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Resource(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match &err {
            Error::QubitCapExceeded(..) => CliError::Resource(err.to_string()),
            Error::InvalidHamiltonian(_)
            | Error::EmptyHamiltonian
            | Error::ZeroQubits
            | Error::InvalidPauliChar(_)
            | Error::TermLength { .. } => CliError::Input(err.to_string()),
            _ => CliError::Usage(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Usage(format!("io error: {err}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn default_hamiltonian() -> String {
    "tfim:4:1.0:1.0".to_string()
}
fn default_reps() -> usize {
    2
}
fn default_entanglement() -> String {
    "full".to_string()
}
fn default_mode() -> String {
    "varsaw".to_string()
}
fn default_p01() -> f64 {
    0.04
}
fn default_p10() -> f64 {
    0.04
}
fn default_chi() -> f64 {
    0.26
}
fn default_scale() -> f64 {
    1.0
}
fn default_shots() -> u64 {
    8192
}
fn default_exec() -> String {
    "analytic".to_string()
}
fn default_spsa_c() -> f64 {
    0.2
}
fn default_spsa_alpha() -> f64 {
    0.602
}
fn default_spsa_gamma() -> f64 {
    0.101
}
fn default_out() -> String {
    "out".to_string()
}
fn default_subset_size() -> usize {
    2
}
fn default_window() -> String {
    "sliding".to_string()
}
fn default_k_init() -> u64 {
    2
}
fn default_k_min() -> u64 {
    1
}
fn default_k_max() -> u64 {
    128
}
fn default_k_frac() -> f64 {
    0.01
}
fn default_modes() -> String {
    "baseline,jigsaw,varsaw".to_string()
}

/// The flat run configuration. Field names are both the JSON keys and the
/// command-line flag names.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Hamiltonian file path or builtin spec `tfim:Q:J:h` / `random:Q:P:seed`.
    pub hamiltonian: String,
    pub reps: usize,
    pub entanglement: String,
    pub mode: String,
    pub p01: f64,
    pub p10: f64,
    pub chi: f64,
    pub scale: f64,
    pub shots: u64,
    pub exec: String,
    pub budget_circuits: Option<u64>,
    pub budget_iters: Option<u64>,
    pub spsa_a: Option<f64>,
    pub spsa_c: f64,
    pub spsa_alpha: f64,
    pub spsa_gamma: f64,
    pub seed: u64,
    pub out: String,
    pub subset_size: usize,
    pub window: String,
    pub k_init: u64,
    pub k_min: u64,
    pub k_max: u64,
    pub k_frac: f64,
    pub init_spread: f64,
    /// Comma-separated modes used by sweeps and compare.
    pub modes: String,
    /// Comma-separated grid values for sweeps (meaning depends on the axis).
    pub grid: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            hamiltonian: default_hamiltonian(),
            reps: default_reps(),
            entanglement: default_entanglement(),
            mode: default_mode(),
            p01: default_p01(),
            p10: default_p10(),
            chi: default_chi(),
            scale: default_scale(),
            shots: default_shots(),
            exec: default_exec(),
            budget_circuits: None,
            budget_iters: None,
            spsa_a: None,
            spsa_c: default_spsa_c(),
            spsa_alpha: default_spsa_alpha(),
            spsa_gamma: default_spsa_gamma(),
            seed: 0,
            out: default_out(),
            subset_size: default_subset_size(),
            window: default_window(),
            k_init: default_k_init(),
            k_min: default_k_min(),
            k_max: default_k_max(),
            k_frac: default_k_frac(),
            init_spread: crate::engine::DEFAULT_INIT_SPREAD,
            modes: default_modes(),
            grid: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Validate cross-field constraints before any simulation starts.
    pub fn validate(&self) -> CliResult<()> {
        self.mode.parse::<Mode>().map_err(CliError::from)?;
        self.exec.parse::<ExecMode>().map_err(CliError::from)?;
        self.window.parse::<WindowMode>().map_err(CliError::from)?;
        self.entanglement
            .parse::<crate::sim::Entanglement>()
            .map_err(CliError::from)?;
        if self.subset_size == 0 {
            return Err(CliError::Usage("subset_size must be at least 1".into()));
        }
        if self.k_min == 0 || self.k_min > self.k_max {
            return Err(CliError::Usage(format!(
                "invalid sparsity bounds: k_min={} k_max={}",
                self.k_min, self.k_max
            )));
        }
        if !(0.0..=1.0).contains(&self.k_frac) {
            return Err(CliError::Usage(format!(
                "k_frac must lie in [0,1], got {}",
                self.k_frac
            )));
        }
        if self.shots == 0 && self.exec == "sampled" {
            return Err(CliError::Usage("sampled execution needs shots >= 1".into()));
        }
        self.spsa_config().validate().map_err(CliError::from)?;
        Ok(())
    }

    /// Exactly one budget kind must be set for `run`/`compare`/energy sweeps.
    pub fn budget(&self) -> CliResult<Budget> {
        match (self.budget_iters, self.budget_circuits) {
            (Some(i), None) => Ok(Budget::Iterations(i)),
            (None, Some(c)) => Ok(Budget::Circuits(c)),
            (None, None) => Err(CliError::Usage(
                "set exactly one of budget_iters / budget_circuits".into(),
            )),
            (Some(_), Some(_)) => Err(CliError::Usage(
                "budget_iters and budget_circuits are mutually exclusive".into(),
            )),
        }
    }

    pub fn noise(&self) -> NoiseModel {
        NoiseModel {
            p01: self.p01,
            p10: self.p10,
            crosstalk_chi: self.chi,
            scale: self.scale,
        }
    }

    pub fn spsa_config(&self) -> SpsaConfig {
        SpsaConfig {
            a: self.spsa_a,
            c: self.spsa_c,
            alpha: self.spsa_alpha,
            gamma: self.spsa_gamma,
            max_iterations: self.budget_iters.unwrap_or(0),
            seed: self.seed,
        }
    }

    pub fn k_policy(&self) -> KPolicy {
        KPolicy::Adaptive {
            k_init: self.k_init,
            k_min: self.k_min,
            k_max: self.k_max,
        }
    }

    pub fn mode_list(&self) -> CliResult<Vec<Mode>> {
        let mut modes = Vec::new();
        for part in self.modes.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            modes.push(part.parse::<Mode>().map_err(CliError::from)?);
        }
        if modes.is_empty() {
            return Err(CliError::Usage("modes list is empty".into()));
        }
        Ok(modes)
    }

    pub fn vqa_config(&self, h: &Hamiltonian, mode: Mode, seed: u64) -> CliResult<VqaConfig> {
        let ansatz = AnsatzSpec::new(
            h.qubit_count,
            self.reps,
            self.entanglement.parse().map_err(CliError::from)?,
        )
        .map_err(CliError::from)?;
        Ok(VqaConfig {
            ansatz,
            mode,
            budget: self.budget()?,
            spsa: SpsaConfig {
                seed,
                ..self.spsa_config()
            },
            noise: self.noise(),
            exec_mode: self.exec.parse().map_err(CliError::from)?,
            shots: self.shots,
            subset_size: self.subset_size,
            window_mode: self.window.parse().map_err(CliError::from)?,
            k_policy: self.k_policy(),
            init_spread: self.init_spread,
            seed,
        })
    }
}

/// Resolve the `hamiltonian` key: builtin generator spec or JSON file path.
pub fn build_hamiltonian(spec: &str) -> CliResult<Hamiltonian> {
    if let Some(rest) = spec.strip_prefix("tfim:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Usage(format!(
                "builtin tfim spec must be tfim:Q:J:h, got {spec:?}"
            )));
        }
        let q: usize = parse_field(parts[0], "tfim qubit count")?;
        let j: f64 = parse_field(parts[1], "tfim coupling J")?;
        let h: f64 = parse_field(parts[2], "tfim field h")?;
        check_qubit_cap(q)?;
        return tfim(q, j, h).map_err(CliError::from);
    }
    if let Some(rest) = spec.strip_prefix("random:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Usage(format!(
                "builtin random spec must be random:Q:P:seed, got {spec:?}"
            )));
        }
        let q: usize = parse_field(parts[0], "random qubit count")?;
        let p: usize = parse_field(parts[1], "random term count")?;
        let seed: u64 = parse_field(parts[2], "random seed")?;
        check_qubit_cap(q)?;
        return random_hamiltonian(q, p, seed).map_err(CliError::from);
    }

    let text = std::fs::read_to_string(spec)
        .map_err(|e| CliError::Usage(format!("cannot read hamiltonian {spec:?}: {e}")))?;
    let h = Hamiltonian::from_json(&text).map_err(|e| CliError::Input(e.to_string()))?;
    check_qubit_cap(h.qubit_count)?;
    Ok(h)
}

fn parse_field<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<T> {
    s.parse()
        .map_err(|_| CliError::Usage(format!("cannot parse {what} from {s:?}")))
}

fn check_qubit_cap(q: usize) -> CliResult<()> {
    if q > MAX_QUBITS {
        return Err(CliError::Resource(
            Error::QubitCapExceeded(q, MAX_QUBITS).to_string(),
        ));
    }
    Ok(())
}

/// Serialized `plan` output.
#[derive(Debug, Serialize, Deserialize)]
pub struct PlanOutput {
    pub qubits: usize,
    pub terms: usize,
    pub subset_size: usize,
    pub global_bases: Vec<String>,
    pub subsets: Vec<PlanSubset>,
    pub jigsaw_subset_count: u64,
    pub cost: CostReport,
    pub varsaw_amortized_per_iter: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PlanSubset {
    pub qubits: Vec<usize>,
    pub bases: String,
}

pub fn make_plan_output(
    h: &Hamiltonian,
    cfg: &RunConfig,
) -> CliResult<(MeasurementPlan, PlanOutput)> {
    let window: WindowMode = cfg.window.parse().map_err(CliError::from)?;
    let plan = varsaw_plan_with(h, cfg.subset_size, window).map_err(CliError::from)?;
    let jigsaw = jigsaw_plan(&plan.global_bases, cfg.subset_size).map_err(CliError::from)?;
    let cost = cost_report(&plan, jigsaw.len() as u64, cfg.k_frac).map_err(CliError::from)?;
    let output = PlanOutput {
        qubits: h.qubit_count,
        terms: h.num_terms(),
        subset_size: plan.subset_size,
        global_bases: plan.global_bases.iter().map(|b| b.to_string()).collect(),
        subsets: plan
            .subsets
            .iter()
            .map(|s| PlanSubset {
                qubits: s.qubits.clone(),
                bases: s.bases.iter().map(|b| b.to_char()).collect(),
            })
            .collect(),
        jigsaw_subset_count: jigsaw.len() as u64,
        cost,
        varsaw_amortized_per_iter: cost.varsaw_amortized_per_iter(),
    };
    Ok((plan, output))
}

fn ensure_out_dir(cfg: &RunConfig) -> CliResult<PathBuf> {
    let dir = PathBuf::from(&cfg.out);
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// `plan`: emit the measurement plan and cost comparison as JSON.
pub fn cmd_plan(cfg: &RunConfig) -> CliResult<()> {
    cfg.validate()?;
    let h = build_hamiltonian(&cfg.hamiltonian)?;
    let (_, output) = make_plan_output(&h, cfg)?;
    let dir = ensure_out_dir(cfg)?;
    let path = dir.join("plan.json");
    std::fs::write(
        &path,
        serde_json::to_string_pretty(&output).expect("plan serializes"),
    )?;
    println!(
        "plan: {} qubits, {} terms -> {} bases, {} subsets (jigsaw {}); wrote {}",
        output.qubits,
        output.terms,
        output.global_bases.len(),
        output.subsets.len(),
        output.jigsaw_subset_count,
        path.display()
    );
    Ok(())
}

/// Render a trace as the canonical CSV.
pub fn trace_csv(trace: &VqaTrace) -> String {
    let mut out = String::from("iter,energy,circuits_cum,k,global,mode,seed\n");
    for r in &trace.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.iteration,
            r.energy,
            r.circuits_cumulative,
            r.k,
            r.global_executed,
            trace.mode,
            trace.seed
        )
        .expect("string write");
    }
    out
}

/// Summary payload written next to each trace.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub mode: String,
    pub seed: u64,
    pub iterations_completed: u64,
    pub final_energy: f64,
    pub best_energy: f64,
    pub total_circuits: u64,
    pub aborted_steps: u64,
}

impl RunSummary {
    pub fn from_trace(trace: &VqaTrace) -> Self {
        RunSummary {
            mode: trace.mode.to_string(),
            seed: trace.seed,
            iterations_completed: trace.iterations_completed(),
            final_energy: trace.final_energy(),
            best_energy: trace.best_energy(),
            total_circuits: trace.total_circuits,
            aborted_steps: trace.aborted_steps,
        }
    }
}

pub fn execute_run(cfg: &RunConfig, mode: Mode) -> CliResult<VqaTrace> {
    let h = build_hamiltonian(&cfg.hamiltonian)?;
    let vqa = cfg.vqa_config(&h, mode, cfg.seed)?;
    run_vqa(&h, &vqa).map_err(CliError::from)
}

/// `run`: execute one VQE run and write trace CSV plus summary JSON.
pub fn cmd_run(cfg: &RunConfig) -> CliResult<()> {
    cfg.validate()?;
    let mode: Mode = cfg.mode.parse().map_err(CliError::from)?;
    let trace = execute_run(cfg, mode)?;
    let dir = ensure_out_dir(cfg)?;

    let csv_path = dir.join("trace.csv");
    std::fs::write(&csv_path, trace_csv(&trace))?;
    let summary = RunSummary::from_trace(&trace);
    let summary_path = dir.join("summary.json");
    std::fs::write(
        &summary_path,
        serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )?;
    println!(
        "run: mode={} seed={} iterations={} final_energy={} circuits={}",
        summary.mode,
        summary.seed,
        summary.iterations_completed,
        summary.final_energy,
        summary.total_circuits
    );
    Ok(())
}

/// `compare`: run every configured mode under the same budget and seed and
/// write one combined CSV plus per-mode traces.
pub fn cmd_compare(cfg: &RunConfig) -> CliResult<()> {
    cfg.validate()?;
    let modes = cfg.mode_list()?;
    let dir = ensure_out_dir(cfg)?;
    let mut combined = String::from("mode,iter,energy,circuits_cum,k,global,seed\n");
    let mut summaries = Vec::new();
    for mode in modes {
        let trace = execute_run(cfg, mode)?;
        std::fs::write(dir.join(format!("trace_{mode}.csv")), trace_csv(&trace))?;
        for r in &trace.records {
            writeln!(
                combined,
                "{},{},{},{},{},{},{}",
                mode,
                r.iteration,
                r.energy,
                r.circuits_cumulative,
                r.k,
                r.global_executed,
                trace.seed
            )
            .expect("string write");
        }
        summaries.push(RunSummary::from_trace(&trace));
    }
    std::fs::write(dir.join("comparison.csv"), combined)?;
    std::fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&summaries).expect("summaries serialize"),
    )?;
    for s in &summaries {
        println!(
            "compare: mode={} iterations={} final_energy={} circuits={}",
            s.mode, s.iterations_completed, s.final_energy, s.total_circuits
        );
    }
    Ok(())
}

/// Sweep axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    NoiseScale,
    SubsetSize,
    Qubits,
}

impl std::str::FromStr for SweepAxis {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.to_ascii_lowercase().as_str() {
            "noise_scale" | "noise-scale" | "scale" => Ok(SweepAxis::NoiseScale),
            "subset_size" | "subset-size" | "m" => Ok(SweepAxis::SubsetSize),
            "q" | "qubits" => Ok(SweepAxis::Qubits),
            other => Err(CliError::Usage(format!(
                "unknown sweep axis {other:?} (expected noise_scale, subset_size, or q)"
            ))),
        }
    }
}

fn parse_grid<T: std::str::FromStr>(text: &str) -> CliResult<Vec<T>> {
    let mut values = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        values.push(
            part.parse::<T>()
                .map_err(|_| CliError::Usage(format!("bad grid value {part:?}")))?,
        );
    }
    if values.is_empty() {
        return Err(CliError::Usage("sweep grid is empty".into()));
    }
    Ok(values)
}

/// `sweep --axis noise_scale`: final energy per mode at each noise scale.
fn sweep_noise_scale(cfg: &RunConfig, dir: &Path) -> CliResult<PathBuf> {
    let grid: Vec<f64> = match &cfg.grid {
        Some(g) => parse_grid(g)?,
        None => vec![0.05, 0.1, 0.5, 1.0, 3.0, 5.0],
    };
    let modes = cfg.mode_list()?;
    let mut csv = String::from("noise_scale");
    for m in &modes {
        write!(csv, ",final_energy_{m},circuits_{m},iters_{m}").expect("string write");
    }
    csv.push('\n');
    for &scale in &grid {
        let mut point = cfg.clone();
        point.scale = scale;
        write!(csv, "{scale}").expect("string write");
        for &mode in &modes {
            let trace = execute_run(&point, mode)?;
            write!(
                csv,
                ",{},{},{}",
                trace.final_energy(),
                trace.total_circuits,
                trace.iterations_completed()
            )
            .expect("string write");
        }
        csv.push('\n');
    }
    let path = dir.join("sweep_noise_scale.csv");
    std::fs::write(&path, csv)?;
    Ok(path)
}

/// `sweep --axis subset_size`: planner circuit counts per window size.
fn sweep_subset_size(cfg: &RunConfig, dir: &Path) -> CliResult<PathBuf> {
    let grid: Vec<usize> = match &cfg.grid {
        Some(g) => parse_grid(g)?,
        None => vec![2, 3, 4, 5],
    };
    let h = build_hamiltonian(&cfg.hamiltonian)?;
    let mut csv = String::from("m,P,baseline,jigsaw,varsaw_subsets,varsaw_amortized\n");
    for &m in &grid {
        let mut point = cfg.clone();
        point.subset_size = m;
        let (_, out) = make_plan_output(&h, &point)?;
        writeln!(
            csv,
            "{m},{},{},{},{},{}",
            out.terms,
            out.cost.baseline_per_iter,
            out.cost.jigsaw_per_iter,
            out.cost.varsaw_subsets_per_iter,
            out.varsaw_amortized_per_iter
        )
        .expect("string write");
    }
    let path = dir.join("sweep_subset_size.csv");
    std::fs::write(&path, csv)?;
    Ok(path)
}

/// Cost-only qubit sweep over synthetic Hamiltonians with `P = 0.01 Q^4`.
fn sweep_qubits(cfg: &RunConfig, dir: &Path) -> CliResult<PathBuf> {
    let grid: Vec<usize> = match &cfg.grid {
        Some(g) => parse_grid(g)?,
        None => vec![4, 8, 12, 16, 20],
    };
    let mut csv = String::from("Q,P,baseline,jigsaw,varsaw_subsets,varsaw_amortized\n");
    for &q in &grid {
        check_qubit_cap(q)?;
        let p = scaling_term_count(q);
        let h = random_hamiltonian(q, p, cfg.seed).map_err(CliError::from)?;
        let (_, out) = make_plan_output(&h, cfg)?;
        writeln!(
            csv,
            "{q},{p},{},{},{},{}",
            out.cost.baseline_per_iter,
            out.cost.jigsaw_per_iter,
            out.cost.varsaw_subsets_per_iter,
            out.varsaw_amortized_per_iter
        )
        .expect("string write");
    }
    let path = dir.join("sweep_cost.csv");
    std::fs::write(&path, csv)?;
    Ok(path)
}

/// `sweep`: dispatch on the axis.
pub fn cmd_sweep(cfg: &RunConfig, axis: SweepAxis) -> CliResult<()> {
    cfg.validate()?;
    let dir = ensure_out_dir(cfg)?;
    let path = match axis {
        SweepAxis::NoiseScale => sweep_noise_scale(cfg, &dir)?,
        SweepAxis::SubsetSize => sweep_subset_size(cfg, &dir)?,
        SweepAxis::Qubits => sweep_qubits(cfg, &dir)?,
    };
    println!("sweep: wrote {}", path.display());
    Ok(())
}

/// `sweep-cost`: the qubit-scaling cost table.
pub fn cmd_sweep_cost(cfg: &RunConfig) -> CliResult<()> {
    cfg.validate()?;
    let dir = ensure_out_dir(cfg)?;
    let path = sweep_qubits(cfg, &dir)?;
    println!("sweep-cost: wrote {}", path.display());
    Ok(())
}

#[derive(Debug, Parser)]
#[command(
    name = "varsaw",
    about = "Measurement-error-mitigated VQE simulation and cost analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit the measurement plan and circuit cost report.
    Plan(CommonArgs),
    /// Run one VQE optimization and write its trace.
    Run(CommonArgs),
    /// Run a parameter sweep along an axis.
    Sweep(SweepArgs),
    /// Cost-only qubit scaling table (same as `sweep --axis q`).
    SweepCost(CommonArgs),
    /// Run all configured modes under one budget and emit a comparison.
    Compare(CommonArgs),
}

#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// Flat JSON config file; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Hamiltonian path or builtin spec (tfim:Q:J:h | random:Q:P:seed).
    #[arg(long)]
    pub hamiltonian: Option<String>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub entanglement: Option<String>,
    /// ideal | baseline | jigsaw | varsaw
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub p01: Option<f64>,
    #[arg(long)]
    pub p10: Option<f64>,
    #[arg(long)]
    pub chi: Option<f64>,
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long)]
    pub shots: Option<u64>,
    /// analytic | sampled
    #[arg(long)]
    pub exec: Option<String>,
    #[arg(long)]
    pub budget_circuits: Option<u64>,
    #[arg(long)]
    pub budget_iters: Option<u64>,
    #[arg(long)]
    pub spsa_a: Option<f64>,
    #[arg(long)]
    pub spsa_c: Option<f64>,
    #[arg(long)]
    pub spsa_alpha: Option<f64>,
    #[arg(long)]
    pub spsa_gamma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub subset_size: Option<usize>,
    /// sliding | allpairs
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long)]
    pub k_init: Option<u64>,
    #[arg(long)]
    pub k_min: Option<u64>,
    #[arg(long)]
    pub k_max: Option<u64>,
    #[arg(long)]
    pub k_frac: Option<f64>,
    #[arg(long)]
    pub init_spread: Option<f64>,
    /// Comma-separated mode list for sweep/compare.
    #[arg(long)]
    pub modes: Option<String>,
    /// Comma-separated sweep grid values.
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// noise_scale | subset_size | q
    #[arg(long)]
    pub axis: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

impl CommonArgs {
    /// File config (when given) overridden by any explicitly passed flags.
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! merge {
            ($($field:ident),* $(,)?) => {
                $(if let Some(v) = &self.$field { cfg.$field = v.clone(); })*
            };
        }
        merge!(
            hamiltonian,
            reps,
            entanglement,
            mode,
            p01,
            p10,
            chi,
            scale,
            shots,
            exec,
            spsa_c,
            spsa_alpha,
            spsa_gamma,
            seed,
            out,
            subset_size,
            window,
            k_init,
            k_min,
            k_max,
            k_frac,
            init_spread,
            modes,
        );
        if self.budget_circuits.is_some() {
            cfg.budget_circuits = self.budget_circuits;
            cfg.budget_iters = None;
        }
        if self.budget_iters.is_some() {
            cfg.budget_iters = self.budget_iters;
            cfg.budget_circuits = None;
        }
        if self.spsa_a.is_some() {
            cfg.spsa_a = self.spsa_a;
        }
        if self.grid.is_some() {
            cfg.grid = self.grid.clone();
        }
        Ok(cfg)
    }
}

/// Parse arguments and dispatch; returns the process exit code.
pub fn main_entry<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version on stdout with exit 0.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Plan(args) => args.resolve().and_then(|cfg| cmd_plan(&cfg)),
        Command::Run(args) => args.resolve().and_then(|cfg| cmd_run(&cfg)),
        Command::Sweep(args) => args
            .common
            .resolve()
            .and_then(|cfg| args.axis.parse().and_then(|axis| cmd_sweep(&cfg, axis))),
        Command::SweepCost(args) => args.resolve().and_then(|cfg| cmd_sweep_cost(&cfg)),
        Command::Compare(args) => args.resolve().and_then(|cfg| cmd_compare(&cfg)),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    }
}
