//! TOML run configuration. Matrices are row-major lists of rows, each entry
//! a `[re, im]` pair.

use std::path::Path;

use avwiretap::codebook::SecrecyMode;
use avwiretap::rates::LeakageMode;
use avwiretap::{ComplexMat, Convention, MainChannel};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub convention: Option<Convention>,
    pub output: Option<String>,
    pub rate: Option<RateSection>,
    pub region: Option<RegionSection>,
    pub simulate: Option<SimulateSection>,
    pub verify: Option<VerifySection>,
    pub schedule: Option<ScheduleSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSection {
    pub h: MatrixSpec,
    pub n_e: usize,
    /// Power budgets; defaults to `10^3 .. 10^6`.
    pub pbar: Option<Vec<f64>>,
    #[serde(default)]
    pub eps_p: f64,
    #[serde(default)]
    pub leakage: LeakageMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Mac,
    Bc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSection {
    pub kind: RegionKind,
    pub h1: MatrixSpec,
    pub h2: MatrixSpec,
    pub n_e: usize,
    pub pbar: f64,
    /// Time-sharing fractions for the MAC; defaults to 101 points in (0, 1].
    pub alpha: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    /// `[I | 0]` at every channel use.
    #[default]
    Selector,
    /// Independent Haar-random canonical states.
    Haar,
}

fn default_samples() -> usize {
    20_000
}

fn default_trials() -> usize {
    2_000
}

fn default_max_codewords() -> usize {
    1 << 14
}

fn default_max_n() -> usize {
    32
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub h: MatrixSpec,
    pub n_e: usize,
    pub pbar: f64,
    #[serde(default)]
    pub eps_p: f64,
    pub n: Vec<usize>,
    pub delta_n: f64,
    #[serde(default)]
    pub delta_prime: f64,
    #[serde(default = "strong")]
    pub mode: SecrecyMode,
    #[serde(default)]
    pub trace: TraceKind,
    /// Leakage estimator samples.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Decoding-error trials.
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_max_codewords")]
    pub max_codewords: usize,
    #[serde(default = "default_max_n")]
    pub max_n: usize,
}

fn strong() -> SecrecyMode {
    SecrecyMode::Strong
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub n_t: usize,
    pub n_e: usize,
    /// Raw eavesdropper matrix for the whiteness check, used as given. A
    /// non-canonical matrix makes that check fail.
    pub eve: Option<MatrixSpec>,
    pub samples: usize,
    pub union_eps_prime: f64,
    pub union_n: Vec<u64>,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            n_t: 2,
            n_e: 1,
            eve: None,
            samples: 20_000,
            union_eps_prime: 0.01,
            union_n: (0..=6).map(|k| 1500 + 250 * k).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentFit {
    pub n: Vec<usize>,
    pub d: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GallagerInputs {
    pub h: MatrixSpec,
    pub pbar: f64,
    #[serde(default)]
    pub eps_p: f64,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub eps_prime: f64,
    pub n: Vec<u64>,
    pub n_t: usize,
    pub n_e: usize,
    /// Resolvability exponent, or a fit of `ln d̂'` against `n`.
    pub c_prime: Option<f64>,
    pub c_prime_fit: Option<ExponentFit>,
    /// Information-density tail exponent, or `delta` for its Chernoff floor.
    pub alpha_eps: Option<f64>,
    pub delta: Option<f64>,
    /// Truncation exponent, or `eps_p` to compute it.
    pub alpha_eps_p: Option<f64>,
    pub eps_p: Option<f64>,
    /// Error exponent, or channel inputs for the Gallager exponent.
    pub e_val: Option<f64>,
    pub gallager: Option<GallagerInputs>,
    #[serde(default = "one")]
    pub r0: f64,
    /// `(P, eps)` for the perturbation flag.
    pub radii: Option<[f64; 2]>,
}

fn one() -> f64 {
    1.0
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))
    }

    pub fn convention(&self) -> Convention {
        self.convention.unwrap_or_default()
    }

    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Config("a seed is required (--seed, WIRETAP_SEED or `seed` in the config)".into()))
    }

    /// Hex SHA-256 of the effective configuration, excluding the output path.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut canon = self.clone();
        canon.output = None;
        let text = toml::to_string(&canon).expect("config serializes");
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

pub fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref()
        .ok_or_else(|| CliError::Config(format!("config has no [{name}] section")))
}

pub fn matrix(spec: &MatrixSpec, what: &str) -> Result<ComplexMat, CliError> {
    let rows: Vec<Vec<Complex64>> = spec
        .iter()
        .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    ComplexMat::from_rows(&rows).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

pub fn channel(spec: &MatrixSpec, what: &str) -> Result<MainChannel, CliError> {
    MainChannel::new(matrix(spec, what)?).map_err(|e| CliError::Config(format!("{what}: {e}")))
}
