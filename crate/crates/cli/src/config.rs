//! Run configuration: a TOML file with `[model]`, `[disorder]`, `[etrate]`
//! and `[run]` sections. Unknown keys are errors.
//!
//! ```toml
//! [model]                 # template for every solve; see hjc::ModelParams
//! n_molecules = 4
//! lambda_e = 1.0
//! omega_rabi = 2.0
//! delta_e = 0.0
//! gauge = "paper"         # or "real"
//! [model.trunc]
//! m_sym_max = 6
//! m_nonsym_max = 2
//! # m_total_max = 8
//!
//! [disorder]              # disorder-ensemble only
//! sigma = 0.5
//! n_realizations = 200
//! axis = "vary_rabi"      # Ω_e = ratio·σ; "vary_sigma" keeps Ω_e and sets σ = Ω_e/ratio
//!
//! [etrate]                # et-rate only; see hjc::etrate::ETParams
//! lambda_d = 1.4142135623730951
//! lambda_a = -1.4142135623730951
//! lineshape = "gaussian"  # or "lorentzian"
//!
//! [run]
//! seed = 0
//! n_values = [2, 3, 4]            # p0-sweep: N axis
//! omega_rabi_values = [2.0, 4.0]  # p0-sweep: one curve per Ω_e
//! ratios = [1.0, 10.0]            # disorder-ensemble: Ω_e/σ points
//! molecule_counts = [1.0, 1e4]    # et-rate fig3a: N axis
//! delta_e_values = [0.0, 0.02]    # et-rate fig3a: one curve per ΔE
//! lambda_ratios = [-2.0, 2.0]     # et-rate fig3b: λ_D/λ_A axis
//! ```
//!
//! All energies are in units of ω_v.

use std::path::Path;

use hjc::disorder::RatioAxis;
use hjc::etrate::ETParams;
use hjc::ModelParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: Option<ModelParams>,
    pub disorder: Option<DisorderSection>,
    pub etrate: Option<ETParams>,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSection {
    pub sigma: f64,
    pub n_realizations: usize,
    #[serde(default)]
    pub axis: RatioAxis,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub seed: u64,
    pub threads: Option<usize>,
    #[serde(default = "RunSection::default_dense_threshold")]
    pub dense_threshold: usize,
    #[serde(default = "RunSection::default_tol")]
    pub tol: f64,
    #[serde(default = "RunSection::default_max_iter")]
    pub max_iter: usize,
    /// Eigenpairs requested per solve (the spectrum subcommand uses `n_levels`).
    #[serde(default = "RunSection::default_n_pairs")]
    pub n_pairs: usize,
    #[serde(default = "RunSection::default_n_levels")]
    pub n_levels: usize,
    pub mode: Option<String>,
    #[serde(default)]
    pub n_values: Vec<usize>,
    #[serde(default)]
    pub omega_rabi_values: Vec<f64>,
    #[serde(default)]
    pub ratios: Vec<f64>,
    #[serde(default)]
    pub dump_realizations: bool,
    #[serde(default)]
    pub molecule_counts: Vec<f64>,
    #[serde(default)]
    pub delta_e_values: Vec<f64>,
    #[serde(default)]
    pub lambda_ratios: Vec<f64>,
}

impl RunSection {
    fn default_dense_threshold() -> usize {
        hjc::solver::DEFAULT_DENSE_THRESHOLD
    }
    fn default_tol() -> f64 {
        1e-9
    }
    fn default_max_iter() -> usize {
        20_000
    }
    fn default_n_pairs() -> usize {
        2
    }
    fn default_n_levels() -> usize {
        8
    }
}

impl Default for RunSection {
    fn default() -> Self {
        toml::from_str("").expect("empty run section")
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn model(&self) -> Result<&ModelParams, String> {
        self.model.as_ref().ok_or_else(|| "missing [model] section".to_string())
    }

    pub fn disorder(&self) -> Result<&DisorderSection, String> {
        self.disorder.as_ref().ok_or_else(|| "missing [disorder] section".to_string())
    }

    pub fn etrate(&self) -> Result<&ETParams, String> {
        self.etrate.as_ref().ok_or_else(|| "missing [etrate] section".to_string())
    }
}
