//! Job files: named expression trees plus command parameters.

use std::collections::BTreeMap;
use std::path::Path;

use clap::ValueEnum;
use periodist_core::Node;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_WINDOW: u64 = 50;
pub const DEFAULT_DIM: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckGrowth,
    CoronaCheck,
    BezoutSolve,
    BezoutVerify,
    Reduce,
    Approx,
    Gap,
    Qdemo,
    FourierCoeffs,
    FourierSynth,
    Pair,
    ExpDemo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckGrowth => "check-growth",
            Command::CoronaCheck => "corona-check",
            Command::BezoutSolve => "bezout-solve",
            Command::BezoutVerify => "bezout-verify",
            Command::Reduce => "reduce",
            Command::Approx => "approx",
            Command::Gap => "gap",
            Command::Qdemo => "qdemo",
            Command::FourierCoeffs => "fourier-coeffs",
            Command::FourierSynth => "fourier-synth",
            Command::Pair => "pair",
            Command::ExpDemo => "exp-demo",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    /// When present it must agree with the command given on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<u64>,
    #[serde(default)]
    pub inputs: BTreeMap<String, Node>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Input names of the family `a₁, …, a_N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<String>>,
    /// Input names of the cofactors `b₁, …, b_N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cofactors: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    /// Name of a single input sequence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    /// Name of a rapidly decreasing test sequence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<String>,
    /// Seminorm order reported alongside a pairing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    /// Rows are the period vectors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<f64>>>,
    /// Grid size per axis.
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Row-major `[re, im]` samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 2]>>,
    /// Little-endian `f64` pairs, row-major; relative to the job file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_file: Option<String>,
    /// Sparse coefficients keyed by `"m1,m2,…"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<BTreeMap<String, [f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
}

/// Parses a job file, reporting the field path and position of any error.
pub fn parse_spec(text: &str, origin: &Path) -> Result<JobSpec, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec = serde_path_to_error::deserialize(de).map_err(|e| {
        // the inner message already carries line and column
        CliError::Input(format!("{}: at `{}`: {}", origin.display(), e.path(), e.inner()))
    })?;
    Ok(spec)
}
