//! File formats: JSON for potentials and second-quantized Hamiltonians, a
//! line-oriented text format for Pauli Hamiltonians.
//!
//! Pauli files start with `# key=value` header lines followed by one term per
//! line, `<coefficient> <string>`, qubit 0 leftmost:
//!
//! ```text
//! # schema_version=1
//! # n_qubits=4
//! # encoding=unary
//! 2.5e-1 XXII
//! -1.25e0 ZIII
//! ```

use serde::{Deserialize, Serialize};

use crate::encoding::{Provenance, WeightedPauliHamiltonian};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, WeightedPauli};
use crate::vibrational::{PesTerm, SecondQuantizedHamiltonian, SqTerm, VibProblem};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PesFile {
    schema_version: u32,
    n_modes: usize,
    truncation_order: usize,
    modals: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modals_per_mode: Option<Vec<usize>>,
    omegas_cm1: Vec<f64>,
    terms: Vec<PesTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SqFile {
    schema_version: u32,
    n_modes: usize,
    modals: usize,
    #[serde(default)]
    constant_cm1: f64,
    terms: Vec<SqTerm>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        message: e.to_string(),
    }
}

fn check_version(found: u32) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(Error::validation(format!(
            "unsupported schema_version {found}, expected {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

/// Parses and validates a potential file.
pub fn read_pes(text: &str) -> Result<(VibProblem, Vec<PesTerm>)> {
    let f: PesFile = serde_json::from_str(text).map_err(json_error)?;
    check_version(f.schema_version)?;
    let problem = VibProblem {
        n_modes: f.n_modes,
        truncation_order: f.truncation_order,
        modals: f.modals,
        omegas: f.omegas_cm1,
        modals_per_mode: f.modals_per_mode,
    };
    problem.validate()?;
    Ok((problem, f.terms))
}

pub fn write_pes(problem: &VibProblem, terms: &[PesTerm]) -> String {
    let f = PesFile {
        schema_version: SCHEMA_VERSION,
        n_modes: problem.n_modes,
        truncation_order: problem.truncation_order,
        modals: problem.modals,
        modals_per_mode: problem.modals_per_mode.clone(),
        omegas_cm1: problem.omegas.clone(),
        terms: terms.to_vec(),
    };
    serde_json::to_string_pretty(&f).expect("plain data serializes")
}

pub fn read_sq(text: &str) -> Result<SecondQuantizedHamiltonian> {
    let f: SqFile = serde_json::from_str(text).map_err(json_error)?;
    check_version(f.schema_version)?;
    let sq = SecondQuantizedHamiltonian {
        n_modes: f.n_modes,
        modals: f.modals,
        constant: f.constant_cm1,
        terms: f.terms,
    };
    sq.validate()?;
    Ok(sq)
}

pub fn write_sq(sq: &SecondQuantizedHamiltonian) -> String {
    let f = SqFile {
        schema_version: SCHEMA_VERSION,
        n_modes: sq.n_modes,
        modals: sq.modals,
        constant_cm1: sq.constant,
        terms: sq.terms.clone(),
    };
    serde_json::to_string_pretty(&f).expect("plain data serializes")
}

/// Text form of a Pauli Hamiltonian; coefficients are written in shortest
/// round-trip form so reading back is exact.
pub fn write_pauli(h: &WeightedPauliHamiltonian) -> String {
    let mut out = format!("# schema_version={SCHEMA_VERSION}\n# n_qubits={}\n", h.n_qubits);
    let m = &h.meta;
    if let Some(e) = m.encoding {
        out += &format!("# encoding={e}\n");
    }
    if let Some(v) = m.n_modes {
        out += &format!("# n_modes={v}\n");
    }
    if let Some(v) = m.modals {
        out += &format!("# modals={v}\n");
    }
    if let Some(v) = m.cutoff {
        out += &format!("# cutoff={v:e}\n");
    }
    if let Some(v) = &m.source {
        out += &format!("# source={}\n", v.replace('\n', " "));
    }
    for t in &h.terms {
        out += &format!("{:e} {}\n", t.coeff, t.pauli);
    }
    out
}

pub fn read_pauli(text: &str) -> Result<WeightedPauliHamiltonian> {
    let mut meta = Provenance::default();
    let mut n_qubits: Option<usize> = None;
    let mut version: Option<u32> = None;
    let mut terms = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let perr = |message: String| Error::Parse { line: line_no, message };
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            let Some((key, value)) = header.split_once('=') else {
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<usize>().map_err(|e| perr(format!("{key}: {e}")));
            match key {
                "schema_version" => version = Some(value.parse().map_err(|e| perr(format!("{key}: {e}")))?),
                "n_qubits" => n_qubits = Some(num(value)?),
                "n_modes" => meta.n_modes = Some(num(value)?),
                "modals" => meta.modals = Some(num(value)?),
                "encoding" => meta.encoding = Some(value.parse().map_err(|e: Error| perr(e.to_string()))?),
                "cutoff" => meta.cutoff = Some(value.parse().map_err(|e| perr(format!("{key}: {e}")))?),
                "source" => meta.source = Some(value.to_string()),
                _ => {}
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(c), Some(p), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(perr(format!("expected '<coefficient> <pauli>', got {line:?}")));
        };
        let coeff: f64 = c.parse().map_err(|e| perr(format!("bad coefficient {c:?}: {e}")))?;
        let pauli: PauliString = p.parse().map_err(|e: Error| perr(e.to_string()))?;
        if let Some(n) = n_qubits {
            if pauli.n_qubits() != n {
                return Err(perr(format!("string has {} qubits, header says {n}", pauli.n_qubits())));
            }
        }
        lines.push(line_no);
        terms.push(WeightedPauli::new(coeff, pauli));
    }
    match version {
        Some(v) => check_version(v)?,
        None => return Err(Error::Parse { line: 1, message: "missing schema_version header".into() }),
    }
    let n = match (n_qubits, terms.first()) {
        (Some(n), _) => n,
        (None, Some(t)) => t.pauli.n_qubits(),
        (None, None) => return Err(Error::Parse { line: 1, message: "missing n_qubits header".into() }),
    };
    for (t, &line) in terms.iter().zip(&lines) {
        if t.pauli.n_qubits() != n {
            return Err(Error::Parse { line, message: format!("string width differs from {n}") });
        }
    }
    WeightedPauliHamiltonian::new(n, terms, meta)
}
