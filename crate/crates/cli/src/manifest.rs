//! The normalized description of one run. Every report embeds the manifest
//! it was produced from, and `replay` executes a manifest directly.

use std::path::PathBuf;

use coherence_bounds::admissible::RNG_NAME;
use coherence_bounds::tolerances::{Tolerances, SEARCH_GUARD};
use coherence_bounds::FamilyDescriptor;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Validate,
    Coherence,
    Verify,
    Search,
    Generate,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<FamilyDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_m: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_n: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub eta: f64,
    pub tol_hyp: f64,
    pub tol_fp: f64,
    pub tol_cert: f64,
    pub tol_rank: f64,
    pub guard: usize,
    pub parallel: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    pub format: OutputFormat,
}

impl Default for Parameters {
    fn default() -> Self {
        let t = Tolerances::default();
        Self {
            eta: t.eta,
            tol_hyp: t.hypothesis,
            tol_fp: t.fixed_point,
            tol_cert: t.cert,
            tol_rank: t.rank,
            guard: SEARCH_GUARD,
            parallel: true,
            trials: None,
            format: OutputFormat::Json,
        }
    }
}

impl Parameters {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            eta: self.eta,
            hypothesis: self.tol_hyp,
            fixed_point: self.tol_fp,
            cert: self.tol_cert,
            rank: self.tol_rank,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Command,
    pub inputs: Inputs,
    pub parameters: Parameters,
    pub tool_version: String,
    pub rng: String,
}

impl RunManifest {
    pub fn new(command: Command, inputs: Inputs, parameters: Parameters) -> Self {
        Self {
            command,
            inputs,
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            rng: RNG_NAME.to_string(),
        }
    }
}
