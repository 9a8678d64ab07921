//! Optional TOML configuration. Values here sit between command-line flags
//! and built-in defaults.

use std::path::Path;

use serde::Deserialize;
use vibrest_core::{Approach, EncodingKind};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub encoding: Option<EncodingKind>,
    pub cutoff: Option<f64>,
    pub build_cutoff: Option<f64>,
    pub order: Option<usize>,
    pub epsilon_nu: Option<f64>,
    pub tol: Option<Vec<f64>>,
    pub approach: Option<ApproachChoice>,
    pub prefactor: Option<f64>,
    pub convention: Option<String>,
    pub budget: Option<u64>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, serde::Serialize)]
pub enum ApproachChoice {
    A,
    B,
    #[serde(alias = "both")]
    Both,
}

impl ApproachChoice {
    pub fn approaches(self) -> Vec<Approach> {
        match self {
            ApproachChoice::A => vec![Approach::A],
            ApproachChoice::B => vec![Approach::B],
            ApproachChoice::Both => vec![Approach::A, Approach::B],
        }
    }
}

impl std::str::FromStr for ApproachChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "A" | "a" => Ok(ApproachChoice::A),
            "B" | "b" => Ok(ApproachChoice::B),
            "both" | "AB" => Ok(ApproachChoice::Both),
            _ => Err(format!("unknown approach '{s}', expected A, B or both")),
        }
    }
}

pub fn load(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
