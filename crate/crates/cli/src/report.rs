//! Report records and their table, CSV and JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Serialize, Serializer};
use vibrest_core::costing::ResourceReport;
use vibrest_core::layering::LayeringStats;
use vibrest_core::{Approach, EncodingKind, ScalingResult};

use crate::config::ApproachChoice;
use crate::{CliError, ConventionArg, OutputFormat, StrategyArg};

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Other(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Other(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Other(e.to_string()))
}

/// A tolerance that serializes `∞` as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolValue(pub f64);

impl Serialize for TolValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl std::fmt::Display for TolValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{:e}", self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountRow {
    pub family: String,
    pub triple_bonds: Option<i64>,
    pub modes: usize,
    pub modals: usize,
    pub truncation: usize,
    pub n_terms: u128,
    pub unary_qubits: usize,
    pub binary_qubits: usize,
    pub binary_qubits_fractional: usize,
    pub note: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct CountReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub rows: Vec<CountRow>,
}

pub fn count_table(rows: &[CountRow]) -> String {
    let mut s = format!(
        "{:>8} {:>6} {:>4} {:>3} {:>16} {:>8} {:>8}\n",
        "bonds", "L", "d", "D", "N_H", "unary", "binary"
    );
    for r in rows {
        let bonds = r.triple_bonds.map_or("-".to_string(), |b| b.to_string());
        let _ = writeln!(
            s,
            "{:>8} {:>6} {:>4} {:>3} {:>16} {:>8} {:>8}",
            bonds, r.modes, r.modals, r.truncation, r.n_terms, r.unary_qubits, r.binary_qubits
        );
    }
    for r in rows.iter().filter(|r| r.note.is_some()) {
        let _ = writeln!(s, "note (L={}, d={}): {}", r.modes, r.modals, r.note.as_deref().unwrap_or(""));
    }
    s
}

fn key_values(pairs: &[(&str, String)]) -> String {
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    pairs.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct BuildConfig {
    pub input: String,
    pub cutoff: f64,
}

#[derive(Debug, Serialize)]
pub struct BuildSummary {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: BuildConfig,
    pub n_modes: usize,
    pub modals: usize,
    pub n_terms: usize,
    pub max_abs_coeff: f64,
    pub constant: f64,
    pub coupling_order: usize,
}

#[derive(Serialize)]
struct BuildRow<'a> {
    input: &'a str,
    cutoff: f64,
    n_modes: usize,
    modals: usize,
    n_terms: usize,
    max_abs_coeff: f64,
    constant: f64,
    coupling_order: usize,
}

impl BuildSummary {
    pub fn render(&self, format: OutputFormat) -> Result<String, CliError> {
        Ok(match format {
            OutputFormat::Json => to_json(self),
            OutputFormat::Csv => to_csv(&[BuildRow {
                input: &self.config.input,
                cutoff: self.config.cutoff,
                n_modes: self.n_modes,
                modals: self.modals,
                n_terms: self.n_terms,
                max_abs_coeff: self.max_abs_coeff,
                constant: self.constant,
                coupling_order: self.coupling_order,
            }])?,
            OutputFormat::Table => key_values(&[
                ("input", self.config.input.clone()),
                ("cutoff", format!("{:e}", self.config.cutoff)),
                ("modes", self.n_modes.to_string()),
                ("modals", self.modals.to_string()),
                ("terms", self.n_terms.to_string()),
                ("max |coeff| (cm^-1)", format!("{:.6e}", self.max_abs_coeff)),
                ("constant (cm^-1)", format!("{:.6e}", self.constant)),
                ("coupling order", self.coupling_order.to_string()),
            ]),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EncodeConfig {
    pub input: String,
    pub encoding: EncodingKind,
    pub cutoff: f64,
}

#[derive(Debug, Serialize)]
pub struct EncodeSummary {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: EncodeConfig,
    pub n_qubits: usize,
    pub n_terms: usize,
    pub beta: f64,
    pub max_weight: usize,
    pub mean_weight: f64,
    /// weight → number of terms
    pub locality: BTreeMap<usize, usize>,
}

#[derive(Serialize)]
struct EncodeRow<'a> {
    input: &'a str,
    encoding: EncodingKind,
    cutoff: f64,
    n_qubits: usize,
    n_terms: usize,
    beta: f64,
    max_weight: usize,
    mean_weight: f64,
    locality: String,
}

fn histogram_text(h: &BTreeMap<usize, usize>) -> String {
    h.iter().map(|(w, c)| format!("{w}:{c}")).collect::<Vec<_>>().join(" ")
}

impl EncodeSummary {
    pub fn render(&self, format: OutputFormat) -> Result<String, CliError> {
        Ok(match format {
            OutputFormat::Json => to_json(self),
            OutputFormat::Csv => to_csv(&[EncodeRow {
                input: &self.config.input,
                encoding: self.config.encoding,
                cutoff: self.config.cutoff,
                n_qubits: self.n_qubits,
                n_terms: self.n_terms,
                beta: self.beta,
                max_weight: self.max_weight,
                mean_weight: self.mean_weight,
                locality: histogram_text(&self.locality),
            }])?,
            OutputFormat::Table => key_values(&[
                ("input", self.config.input.clone()),
                ("encoding", self.config.encoding.to_string()),
                ("cutoff", format!("{:e}", self.config.cutoff)),
                ("qubits", self.n_qubits.to_string()),
                ("terms", self.n_terms.to_string()),
                ("beta (cm^-1)", format!("{:.6e}", self.beta)),
                ("max weight", self.max_weight.to_string()),
                ("mean weight", format!("{:.3}", self.mean_weight)),
                ("weight:count", histogram_text(&self.locality)),
            ]),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateConfig {
    pub input: String,
    pub order: usize,
    pub epsilon_nu: f64,
    pub tol: Vec<TolValue>,
    pub approach: ApproachChoice,
    pub prefactor: f64,
    pub convention: ConventionArg,
    pub extra_level: bool,
    pub budget: u64,
    pub layering: bool,
    pub runs: usize,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct InputSummary {
    pub n_terms: usize,
    pub n_qubits: usize,
    pub beta: f64,
    pub encoding: Option<EncodingKind>,
    pub n_modes: Option<usize>,
    pub modals: Option<usize>,
    pub source: Option<String>,
}

/// A scaling result whose timing is only serialized on request, so reports
/// are reproducible byte for byte.
#[derive(Debug, Serialize)]
pub struct ScalingRecord {
    #[serde(skip)]
    pub result: ScalingResult,
    #[serde(flatten)]
    fields: serde_json::Map<String, serde_json::Value>,
}

impl ScalingRecord {
    pub fn new(result: ScalingResult, timing: bool) -> Self {
        let mut fields = match serde_json::to_value(&result) {
            Ok(serde_json::Value::Object(m)) => m,
            _ => unreachable!("scaling results serialize to objects"),
        };
        if !timing {
            fields.remove("wall_time_s");
        }
        ScalingRecord { result, fields }
    }
}

#[derive(Debug, Serialize)]
pub struct LayeringSummary {
    pub runs: usize,
    pub seed: u64,
    pub mean_ratio: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub std_ratio: f64,
}

impl From<LayeringStats> for LayeringSummary {
    fn from(s: LayeringStats) -> Self {
        LayeringSummary {
            runs: s.runs,
            seed: s.seed,
            mean_ratio: s.mean_ratio,
            min_ratio: s.min_ratio,
            max_ratio: s.max_ratio,
            std_ratio: s.std_ratio,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BudgetEntry {
    pub bound: &'static str,
    pub report: ResourceReport,
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub approach: Approach,
    pub r_split: u128,
    pub r_crude: u128,
    pub ratio: f64,
}

#[derive(Debug, Serialize)]
pub struct EstimateReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: EstimateConfig,
    pub input: InputSummary,
    pub trajectory: Vec<ScalingRecord>,
    pub chosen: ScalingRecord,
    pub crude: ScalingRecord,
    pub layering: Option<LayeringSummary>,
    pub budgets: Vec<BudgetEntry>,
    pub comparison: Vec<Comparison>,
    /// `R_total(A) / R_total(B)` for the split bound when both approaches ran.
    pub approach_ratio: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct EstimateRow {
    pub molecule: String,
    pub modals: Option<usize>,
    pub p: usize,
    pub approach: Approach,
    pub bound_mode: &'static str,
    pub tol: TolValue,
    pub alpha_upper: f64,
    pub beta: f64,
    pub n_ancilla: u32,
    pub r_total: u128,
    pub gates_total: u128,
    pub depth_estimate: u128,
}

impl EstimateReport {
    pub fn split_report(&self, approach: Approach) -> Option<&ResourceReport> {
        self.budgets
            .iter()
            .find(|b| b.bound == "split" && b.report.approach == approach)
            .map(|b| &b.report)
    }

    pub fn crude_report(&self, approach: Approach) -> Option<&ResourceReport> {
        self.budgets
            .iter()
            .find(|b| b.bound == "crude" && b.report.approach == approach)
            .map(|b| &b.report)
    }

    pub fn csv_rows(&self) -> Vec<EstimateRow> {
        let molecule = self.input.source.clone().unwrap_or_else(|| self.config.input.clone());
        self.budgets
            .iter()
            .map(|b| {
                let tol = if b.bound == "split" {
                    self.chosen.result.tol
                } else {
                    f64::INFINITY
                };
                EstimateRow {
                    molecule: molecule.clone(),
                    modals: self.input.modals,
                    p: b.report.p,
                    approach: b.report.approach,
                    bound_mode: b.bound,
                    tol: TolValue(tol),
                    alpha_upper: b.report.alpha_upper,
                    beta: b.report.beta,
                    n_ancilla: b.report.n_ancilla,
                    r_total: b.report.r_total,
                    gates_total: b.report.gates_total,
                    depth_estimate: b.report.depth_estimate,
                }
            })
            .collect()
    }

    pub fn table(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "input {}: {} terms on {} qubits, beta = {:.6e} cm^-1",
            c.input, self.input.n_terms, self.input.n_qubits, self.input.beta
        );
        let _ = writeln!(
            s,
            "p = {}, eps_nu = {} cm^-1, prefactor = {}, convention = {:?}, seed = {}",
            c.order, c.epsilon_nu, c.prefactor, c.convention, c.seed
        );
        let _ = writeln!(s, "\ncommutator scaling trajectory");
        let _ = writeln!(
            s,
            "{:>12} {:>8} {:>8} {:>14} {:>14} {:>14}",
            "tol", "|big|", "|small|", "lower", "upper", "tuples"
        );
        for r in self.trajectory.iter().map(|r| &r.result).chain(std::iter::once(&self.crude.result)) {
            let _ = writeln!(
                s,
                "{:>12} {:>8} {:>8} {:>14.6e} {:>14.6e} {:>14}",
                TolValue(r.tol).to_string(),
                r.n_big,
                r.n_small,
                r.lower,
                r.upper,
                r.tuples_evaluated
            );
        }
        let _ = writeln!(
            s,
            "tightest upper bound: {:.6e} at tol {}",
            self.chosen.result.upper,
            TolValue(self.chosen.result.tol)
        );
        if let Some(l) = &self.layering {
            let _ = writeln!(
                s,
                "layering ratio over {} runs: mean {:.4}, min {:.4}, max {:.4}, std {:.4}",
                l.runs, l.mean_ratio, l.min_ratio, l.max_ratio, l.std_ratio
            );
        }
        let _ = writeln!(s, "\nresources");
        let _ = writeln!(
            s,
            "{:>8} {:>6} {:>4} {:>12} {:>14} {:>18} {:>18}",
            "approach", "bound", "n", "alpha(H~)", "R_total", "gates", "depth"
        );
        for b in &self.budgets {
            let r = &b.report;
            let _ = writeln!(
                s,
                "{:>8} {:>6} {:>4} {:>12.4e} {:>14} {:>18} {:>18}",
                r.approach.to_string(),
                b.bound,
                r.n_ancilla,
                r.alpha_scaled,
                r.r_total,
                r.gates_total,
                r.depth_estimate
            );
        }
        for cmp in &self.comparison {
            let _ = writeln!(
                s,
                "approach {}: R_crude / R_split = {:.4}",
                cmp.approach, cmp.ratio
            );
        }
        if let Some(r) = self.approach_ratio {
            let _ = writeln!(s, "R_total(A) / R_total(B) = {r:.4e}");
        }
        if let Some(b) = self.budgets.first() {
            let _ = writeln!(s, "\nassumptions");
            for a in &b.report.assumptions {
                let _ = writeln!(s, "  - {a}");
            }
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LayersConfig {
    pub input: String,
    pub runs: usize,
    pub seed: u64,
    pub strategy: StrategyArg,
}

#[derive(Debug, Serialize)]
pub struct LayersReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: LayersConfig,
    pub stats: LayeringStats,
}

#[derive(Debug, Serialize)]
pub struct LayersRow {
    pub input: String,
    pub strategy: StrategyArg,
    pub n_terms: usize,
    pub runs: usize,
    pub seed: u64,
    pub mean_ratio: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub std_ratio: f64,
}

impl From<&LayersReport> for LayersRow {
    fn from(r: &LayersReport) -> Self {
        LayersRow {
            input: r.config.input.clone(),
            strategy: r.config.strategy,
            n_terms: r.stats.n_terms,
            runs: r.stats.runs,
            seed: r.stats.seed,
            mean_ratio: r.stats.mean_ratio,
            min_ratio: r.stats.min_ratio,
            max_ratio: r.stats.max_ratio,
            std_ratio: r.stats.std_ratio,
        }
    }
}

impl LayersReport {
    pub fn table(&self) -> String {
        let st = &self.stats;
        key_values(&[
            ("input", self.config.input.clone()),
            ("strategy", format!("{:?}", self.config.strategy)),
            ("terms", st.n_terms.to_string()),
            ("runs", st.runs.to_string()),
            ("seed", st.seed.to_string()),
            ("mean ratio", format!("{:.6}", st.mean_ratio)),
            ("min ratio", format!("{:.6}", st.min_ratio)),
            ("max ratio", format!("{:.6}", st.max_ratio)),
            ("std ratio", format!("{:.6}", st.std_ratio)),
        ])
    }
}
