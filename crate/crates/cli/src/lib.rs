//! `vibrest` command-line frontend: sizing tables, Hamiltonian assembly,
//! qubit encoding, Trotter/QPE resource estimates and layering statistics.

pub mod config;
mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use vibrest_core::encoding::{binary_qubits_fractional, locality_stats, qubit_count, EncodingSpec, DEFAULT_CUTOFF};
use vibrest_core::layering::{depth_ratio_with, LayeringStrategy, DEFAULT_RUNS};
use vibrest_core::scaling::{alpha_bounds_with, crude_result, ScalingOptions, DEFAULT_BUDGET};
use vibrest_core::vibrational::{build_second_quantized, count_terms, polyyne_modes, BuildOptions};
use vibrest_core::{costing, io, BoundConvention, EncodingKind, QpeConfig};

use config::{ApproachChoice, FileConfig};
pub use report::*;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{context}{err}")]
    Core {
        context: String,
        err: vibrest_core::Error,
    },
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn core_in(path: &Path) -> impl FnOnce(vibrest_core::Error) -> CliError + '_ {
        move |err| CliError::Core {
            context: format!("{}: ", path.display()),
            err,
        }
    }

    /// 0 success, 1 other failures, 2 usage, 3 invalid input, 4 resource limit.
    pub fn exit_code(&self) -> i32 {
        use vibrest_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Core { err, .. } => match err {
                E::Argument(_) => 2,
                E::Validation(_) | E::Parse { .. } | E::Dimension { .. } | E::Degenerate(_) => 3,
                E::ResourceLimit { .. } => 4,
            },
            CliError::Io { .. } | CliError::Other(_) => 1,
        }
    }
}

impl From<vibrest_core::Error> for CliError {
    fn from(err: vibrest_core::Error) -> Self {
        CliError::Core {
            context: String::new(),
            err,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "vibrest", version, about = "Resource estimates for phase estimation of vibrational spectra")]
pub struct Cli {
    /// TOML file with default option values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the primary output here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "VIBREST_WORKERS")]
    pub workers: Option<usize>,
    /// Include wall-clock timings in reports
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Term and qubit counts of L-mode Hamiltonians
    Count(CountArgs),
    /// Second-quantized Hamiltonian from a potential file
    Build(BuildArgs),
    /// Qubit Hamiltonian from a second-quantized file
    Encode(EncodeArgs),
    /// Commutator bounds, Trotter steps and gate counts for a Pauli file
    Estimate(EstimateArgs),
    /// Greedy layering statistics for a Pauli file
    Layers(LayersArgs),
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// Polyyne chain lengths; L = 6n + 1 modes
    #[arg(long = "triple-bonds", value_delimiter = ',')]
    pub triple_bonds: Vec<i64>,
    /// Mode counts L
    #[arg(long, value_delimiter = ',')]
    pub modes: Vec<usize>,
    /// Modals per mode d
    #[arg(long, value_delimiter = ',', required = true)]
    pub modals: Vec<usize>,
    /// Truncation order D
    #[arg(long, default_value_t = 3)]
    pub truncation: usize,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    pub input: PathBuf,
    /// Drop integrals with |c| <= cutoff (default 0)
    #[arg(long)]
    pub cutoff: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub encoding: Option<EncodingKind>,
    /// Drop Pauli terms with |c| <= cutoff (default 1e-8)
    #[arg(long)]
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConventionArg {
    Unscaled,
    Rigorous,
}

impl From<ConventionArg> for BoundConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Unscaled => BoundConvention::Unscaled,
            ConventionArg::Rigorous => BoundConvention::Rigorous,
        }
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    pub input: PathBuf,
    /// Product-formula order p
    #[arg(long)]
    pub order: Option<usize>,
    /// Target accuracy in cm^-1
    #[arg(long = "epsilon-nu")]
    pub epsilon_nu: Option<f64>,
    /// Split threshold; repeat for a schedule, `inf` allowed
    #[arg(long, value_delimiter = ',')]
    pub tol: Vec<f64>,
    /// A, B or both
    #[arg(long)]
    pub approach: Option<ApproachChoice>,
    /// Constant in front of the Trotter step formula
    #[arg(long)]
    pub prefactor: Option<f64>,
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    /// Refine the two-small cross term of the second-order bound
    #[arg(long = "extra-level")]
    pub extra_level: bool,
    /// Parity-check budget per exact enumeration
    #[arg(long)]
    pub budget: Option<u64>,
    /// Layering runs used for the depth estimate
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Skip layering; depth equals gate count
    #[arg(long = "no-layering")]
    pub no_layering: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyArg {
    Scan,
    FirstFit,
}

#[derive(Debug, Args)]
pub struct LayersArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "scan")]
    pub strategy: StrategyArg,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Writes `text` to `path`, or stdout when absent.
fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn resolve_format(cli: &Cli, file: &FileConfig) -> Result<OutputFormat, CliError> {
    if let Some(f) = cli.format {
        return Ok(f);
    }
    match file.format.as_deref() {
        None => Ok(OutputFormat::Table),
        Some(s) => OutputFormat::from_str(s, true).map_err(|_| CliError::Config(format!("unknown format '{s}'"))),
    }
}

/// Runs the parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => config::load(p)?,
        None => FileConfig::default(),
    };
    let workers = cli.workers.or(file.workers);
    if let Some(n) = workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be >= 1".into()));
        }
        // a pool may already exist when run() is called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let format = resolve_format(&cli, &file)?;
    let out = cli.output.as_deref();
    match &cli.command {
        Command::Count(a) => cmd_count(a, format, out),
        Command::Build(a) => cmd_build(a, &file, format, out),
        Command::Encode(a) => cmd_encode(a, &file, format, out),
        Command::Estimate(a) => cmd_estimate(a, &file, format, out, cli.timing),
        Command::Layers(a) => cmd_layers(a, &file, format, out),
    }
}

/// Rows of the sizing table for every requested (L, d) pair.
pub fn count_rows(a: &CountArgs) -> Result<Vec<CountRow>, CliError> {
    if a.triple_bonds.is_empty() && a.modes.is_empty() {
        return Err(CliError::Usage("give --triple-bonds or --modes".into()));
    }
    let mut systems: Vec<(Option<i64>, usize)> = Vec::new();
    for &n in &a.triple_bonds {
        systems.push((Some(n), polyyne_modes(n)?));
    }
    systems.extend(a.modes.iter().map(|&l| (None, l)));
    let mut rows = Vec::new();
    for &(bonds, l) in &systems {
        for &d in &a.modals {
            let n_terms = count_terms(l, d, a.truncation)?;
            let unary = qubit_count(&EncodingSpec::new(EncodingKind::Unary, l, d));
            let binary = qubit_count(&EncodingSpec::new(EncodingKind::Binary, l, d));
            let fractional = binary_qubits_fractional(l, d);
            let note = (fractional != binary).then(|| {
                format!(
                    "binary uses ceil(log2 {d}) qubits per mode ({binary}); packing all modes into round(L log2 d) qubits would give {fractional}"
                )
            });
            rows.push(CountRow {
                family: if bonds.is_some() { "polyyne" } else { "modes" }.into(),
                triple_bonds: bonds,
                modes: l,
                modals: d,
                truncation: a.truncation,
                n_terms,
                unary_qubits: unary,
                binary_qubits: binary,
                binary_qubits_fractional: fractional,
                note,
            });
        }
    }
    Ok(rows)
}

fn cmd_count(a: &CountArgs, format: OutputFormat, out: Option<&Path>) -> Result<(), CliError> {
    let rows = count_rows(a)?;
    let text = match format {
        OutputFormat::Json => to_json(&CountReport {
            schema_version: io::SCHEMA_VERSION,
            command: "count",
            rows,
        }),
        OutputFormat::Csv => to_csv(&rows)?,
        OutputFormat::Table => count_table(&rows),
    };
    emit(&text, out)
}

fn cmd_build(a: &BuildArgs, file: &FileConfig, format: OutputFormat, out: Option<&Path>) -> Result<(), CliError> {
    let cutoff = a.cutoff.or(file.build_cutoff).unwrap_or(0.0);
    let (problem, pes) = io::read_pes(&read(&a.input)?).map_err(CliError::core_in(&a.input))?;
    let sq = build_second_quantized(&problem, &pes, BuildOptions { cutoff }).map_err(CliError::core_in(&a.input))?;
    let summary = BuildSummary {
        schema_version: io::SCHEMA_VERSION,
        command: "build",
        config: BuildConfig {
            input: a.input.display().to_string(),
            cutoff,
        },
        n_modes: sq.n_modes,
        modals: sq.modals,
        n_terms: sq.terms.len(),
        max_abs_coeff: sq.max_abs_coeff(),
        constant: sq.constant,
        coupling_order: sq.coupling_order(),
    };
    write_artifact(&io::write_sq(&sq), out, &summary.render(format)?)
}

/// Artifact to `out` with the summary on stdout, or artifact on stdout and
/// summary on stderr.
fn write_artifact(artifact: &str, out: Option<&Path>, summary: &str) -> Result<(), CliError> {
    match out {
        Some(p) => {
            emit(artifact, Some(p))?;
            print!("{summary}");
        }
        None => {
            print!("{artifact}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn cmd_encode(a: &EncodeArgs, file: &FileConfig, format: OutputFormat, out: Option<&Path>) -> Result<(), CliError> {
    let kind = a.encoding.or(file.encoding).unwrap_or(EncodingKind::Unary);
    let cutoff = a.cutoff.or(file.cutoff).unwrap_or(DEFAULT_CUTOFF);
    let sq = io::read_sq(&read(&a.input)?).map_err(CliError::core_in(&a.input))?;
    let spec = EncodingSpec::new(kind, sq.n_modes, sq.modals).with_cutoff(cutoff);
    let mut h = vibrest_core::encode(&sq, &spec).map_err(CliError::core_in(&a.input))?;
    h.meta.source = a.input.file_stem().map(|s| s.to_string_lossy().into_owned());
    let loc = locality_stats(&h);
    let summary = EncodeSummary {
        schema_version: io::SCHEMA_VERSION,
        command: "encode",
        config: EncodeConfig {
            input: a.input.display().to_string(),
            encoding: kind,
            cutoff,
        },
        n_qubits: h.n_qubits,
        n_terms: h.len(),
        beta: costing::norm_beta(&h),
        max_weight: loc.max_weight,
        mean_weight: loc.mean_weight,
        locality: loc.histogram,
    };
    write_artifact(&io::write_pauli(&h), out, &summary.render(format)?)
}

/// Thresholds at which about 64, 256 and 1024 terms count as big, followed by
/// 0 when the whole Hamiltonian is small enough to enumerate.
pub fn default_tol_schedule(h: &vibrest_core::WeightedPauliHamiltonian) -> Vec<f64> {
    let mut mags: Vec<f64> = h.terms.iter().map(|t| t.coeff.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut tols: Vec<f64> = [64usize, 256, 1024]
        .iter()
        .filter(|&&k| k < mags.len())
        .map(|&k| mags[k])
        .collect();
    if mags.len() <= 1024 {
        tols.push(0.0);
    }
    tols.dedup();
    tols
}

fn cmd_estimate(
    a: &EstimateArgs,
    file: &FileConfig,
    format: OutputFormat,
    out: Option<&Path>,
    timing: bool,
) -> Result<(), CliError> {
    let h = io::read_pauli(&read(&a.input)?).map_err(CliError::core_in(&a.input))?;
    let convention = match (a.convention, file.convention.as_deref()) {
        (Some(c), _) => c,
        (None, Some(s)) => {
            ConventionArg::from_str(s, true).map_err(|_| CliError::Config(format!("unknown convention '{s}'")))?
        }
        (None, None) => ConventionArg::Unscaled,
    };
    let tols = if !a.tol.is_empty() {
        a.tol.clone()
    } else if let Some(t) = &file.tol {
        t.clone()
    } else {
        default_tol_schedule(&h)
    };
    if tols.iter().any(|t| t.is_nan() || *t < 0.0) {
        return Err(CliError::Usage("tolerances must be >= 0".into()));
    }
    if tols.windows(2).any(|w| w[0] < w[1]) {
        return Err(CliError::Usage("tolerance schedule must be descending".into()));
    }
    let cfg = EstimateConfig {
        input: a.input.display().to_string(),
        order: a.order.or(file.order).unwrap_or(2),
        epsilon_nu: a.epsilon_nu.or(file.epsilon_nu).unwrap_or(1.0),
        tol: tols.iter().map(|&t| TolValue(t)).collect(),
        approach: a.approach.or(file.approach).unwrap_or(ApproachChoice::Both),
        prefactor: a.prefactor.or(file.prefactor).unwrap_or(1.0),
        convention,
        extra_level: a.extra_level,
        budget: a.budget.or(file.budget).unwrap_or(DEFAULT_BUDGET),
        layering: !a.no_layering,
        runs: a.runs.or(file.runs).unwrap_or(DEFAULT_RUNS),
        seed: a.seed.or(file.seed).unwrap_or(0),
    };
    let report = estimate(&h, &cfg, timing)?;
    let text = match format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => to_csv(&report.csv_rows())?,
        OutputFormat::Table => report.table(),
    };
    emit(&text, out)
}

/// Full estimate pipeline on an already loaded Hamiltonian.
pub fn estimate(
    h: &vibrest_core::WeightedPauliHamiltonian,
    cfg: &EstimateConfig,
    timing: bool,
) -> Result<EstimateReport, CliError> {
    if h.is_empty() {
        return Err(vibrest_core::Error::Degenerate("Pauli file has no terms".into()).into());
    }
    let opts = ScalingOptions {
        budget: cfg.budget,
        convention: cfg.convention.into(),
        extra_level: cfg.extra_level,
        ..Default::default()
    };
    let mut trajectory = Vec::new();
    for t in &cfg.tol {
        trajectory.push(alpha_bounds_with(h, cfg.order, t.0, &opts)?);
    }
    let crude = crude_result(h, cfg.order, cfg.convention.into());
    let chosen = trajectory
        .iter()
        .min_by(|x, y| x.upper.total_cmp(&y.upper))
        .cloned()
        .unwrap_or_else(|| crude.clone());

    let layering = if cfg.layering {
        Some(depth_ratio_with(h, cfg.runs, cfg.seed, LayeringStrategy::Scan)?)
    } else {
        None
    };
    let mut budgets = Vec::new();
    let mut comparison = Vec::new();
    for approach in cfg.approach.approaches() {
        let q = QpeConfig {
            epsilon_nu: cfg.epsilon_nu,
            p: cfg.order,
            approach,
            prefactor: cfg.prefactor,
            layering_ratio: layering.as_ref().map(|l| l.mean_ratio),
        };
        let split = costing::qpe_budget(h, &chosen, &q)?;
        let rough = costing::qpe_budget(h, &crude, &q)?;
        comparison.push(Comparison {
            approach,
            r_split: split.r_total,
            r_crude: rough.r_total,
            ratio: rough.r_total as f64 / split.r_total as f64,
        });
        budgets.push(BudgetEntry {
            bound: "split",
            report: split,
        });
        budgets.push(BudgetEntry {
            bound: "crude",
            report: rough,
        });
    }
    let approach_ratio = match (
        budgets.iter().find(|b| b.bound == "split" && b.report.approach == vibrest_core::Approach::A),
        budgets.iter().find(|b| b.bound == "split" && b.report.approach == vibrest_core::Approach::B),
    ) {
        (Some(x), Some(y)) => Some(costing::approach_ratio(&x.report, &y.report)),
        _ => None,
    };
    Ok(EstimateReport {
        schema_version: io::SCHEMA_VERSION,
        command: "estimate",
        config: cfg.clone(),
        input: InputSummary {
            n_terms: h.len(),
            n_qubits: h.n_qubits,
            beta: costing::norm_beta(h),
            encoding: h.meta.encoding,
            n_modes: h.meta.n_modes,
            modals: h.meta.modals,
            source: h.meta.source.clone(),
        },
        trajectory: trajectory.into_iter().map(|r| ScalingRecord::new(r, timing)).collect(),
        chosen: ScalingRecord::new(chosen, timing),
        crude: ScalingRecord::new(crude, timing),
        layering: layering.map(LayeringSummary::from),
        budgets,
        comparison,
        approach_ratio,
    })
}

fn cmd_layers(a: &LayersArgs, file: &FileConfig, format: OutputFormat, out: Option<&Path>) -> Result<(), CliError> {
    let h = io::read_pauli(&read(&a.input)?).map_err(CliError::core_in(&a.input))?;
    let runs = a.runs.or(file.runs).unwrap_or(DEFAULT_RUNS);
    let seed = a.seed.or(file.seed).unwrap_or(0);
    let strategy = match a.strategy {
        StrategyArg::Scan => LayeringStrategy::Scan,
        StrategyArg::FirstFit => LayeringStrategy::FirstFit,
    };
    let stats = depth_ratio_with(&h, runs, seed, strategy)?;
    let report = LayersReport {
        schema_version: io::SCHEMA_VERSION,
        command: "layers",
        config: LayersConfig {
            input: a.input.display().to_string(),
            runs,
            seed,
            strategy: a.strategy,
        },
        stats,
    };
    let text = match format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => to_csv(&[LayersRow::from(&report)])?,
        OutputFormat::Table => report.table(),
    };
    emit(&text, out)
}
