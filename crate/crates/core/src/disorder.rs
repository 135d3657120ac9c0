//! Gaussian site-energy disorder and ensemble statistics of `P₀`.
//!
//! Realization `r` of a spec with seed `s` draws from a ChaCha8 generator
//! seeded with `s` on stream `r`. The first N normal variates are the site
//! detunings; the next `u64` seeds the eigensolver. Any realization can
//! therefore be regenerated alone, and the ensemble does not depend on
//! scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Detunings;
use crate::model::ModelParams;
use crate::polaron::{compute_p0, p0_bound, P0Result};
use crate::solver::SolverOptions;

pub const PERCENTILES: [f64; 5] = [5.0, 25.0, 50.0, 75.0, 95.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    /// Standard deviation of Δ_e(r_i), units of ω_v.
    pub sigma: f64,
    pub n_realizations: usize,
    pub seed: u64,
}

impl DisorderSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::Parameter(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if self.n_realizations == 0 {
            return Err(Error::Parameter("n_realizations must be >= 1".into()));
        }
        Ok(())
    }
}

fn realization_rng(spec: &DisorderSpec, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    rng
}

/// N independent draws from `Normal(0, σ²)` for one realization.
pub fn sample_detunings(spec: &DisorderSpec, realization_index: usize, n_sites: usize) -> Result<Detunings> {
    Ok(sample_realization(spec, realization_index, n_sites)?.0)
}

fn sample_realization(spec: &DisorderSpec, index: usize, n_sites: usize) -> Result<(Detunings, u64)> {
    spec.validate()?;
    if index >= spec.n_realizations {
        return Err(Error::Parameter(format!(
            "realization index {index} out of range 0..{}",
            spec.n_realizations
        )));
    }
    let normal = Normal::new(0.0, spec.sigma).map_err(|e| Error::Parameter(e.to_string()))?;
    let mut rng = realization_rng(spec, index);
    let d: Vec<f64> = (0..n_sites).map(|_| normal.sample(&mut rng)).collect();
    let solver_seed = rng.gen::<u64>();
    Ok((Detunings(d), solver_seed))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub sigma: f64,
    pub omega_rabi: f64,
    pub n_ok: usize,
    pub n_failed: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub std: f64,
    /// Values at [`PERCENTILES`], linear interpolation between order statistics.
    pub percentiles: [f64; 5],
    pub bound: f64,
    pub max_residual: f64,
    /// Per-realization P₀ in realization order; failed realizations are NaN.
    pub samples: Option<Vec<f64>>,
}

impl EnsembleStats {
    pub fn spread_90(&self) -> f64 {
        self.percentiles[4] - self.percentiles[0]
    }

    pub fn std_error(&self) -> f64 {
        self.std / (self.n_ok as f64).sqrt()
    }
}

/// Percentile with linear interpolation on sorted data (`p` in percent).
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = p / 100.0 * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Runs one disorder realization; site energies are `delta_e + draw`.
pub fn realization_p0(
    params: &ModelParams,
    spec: &DisorderSpec,
    index: usize,
    opts: &SolverOptions,
) -> Result<P0Result> {
    let (mut d, solver_seed) = sample_realization(spec, index, params.n_molecules)?;
    d.0.iter_mut().for_each(|x| *x += params.delta_e);
    let o = SolverOptions {
        seed: solver_seed,
        ..opts.clone()
    };
    compute_p0(params, Some(&d), &o)
}

/// `P₀` over all realizations. Statistics use the successful ones as long
/// as at most 1% failed.
pub fn ensemble_p0(
    params: &ModelParams,
    spec: &DisorderSpec,
    opts: &SolverOptions,
    keep_samples: bool,
) -> Result<EnsembleStats> {
    spec.validate()?;
    params.validate()?;
    let results: Vec<Result<P0Result>> = (0..spec.n_realizations)
        .into_par_iter()
        .map(|i| realization_p0(params, spec, i, opts))
        .collect();

    let n_failed = results.iter().filter(|r| r.is_err()).count();
    if n_failed * 100 > spec.n_realizations {
        return Err(Error::EnsembleFailures {
            failed: n_failed,
            total: spec.n_realizations,
        });
    }
    let ok: Vec<&P0Result> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    let values: Vec<f64> = ok.iter().map(|r| r.p0).collect();
    let n_ok = values.len();
    let mean = values.iter().sum::<f64>() / n_ok as f64;
    let var = if n_ok > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n_ok - 1) as f64
    } else {
        0.0
    };
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let mut percentiles = [0.0; 5];
    for (slot, p) in percentiles.iter_mut().zip(PERCENTILES) {
        *slot = percentile_sorted(&sorted, p);
    }
    let samples = keep_samples.then(|| {
        results
            .iter()
            .map(|r| r.as_ref().map_or(f64::NAN, |x| x.p0))
            .collect()
    });

    Ok(EnsembleStats {
        sigma: spec.sigma,
        omega_rabi: params.omega_rabi,
        n_ok,
        n_failed,
        min: sorted[0],
        max: sorted[n_ok - 1],
        mean,
        std: var.sqrt(),
        percentiles,
        bound: p0_bound(params.lambda_e, params.n_molecules),
        max_residual: ok.iter().map(|r| r.residual).fold(0.0, f64::max),
        samples,
    })
}

/// Which quantity moves along an `Ω_e/σ` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioAxis {
    /// σ fixed, Ω_e = ratio · σ.
    #[default]
    VaryRabi,
    /// Ω_e fixed, σ = Ω_e / ratio.
    VarySigma,
}

/// Parameters for one point of an `Ω_e/σ` sweep.
pub fn ratio_point(
    template: &ModelParams,
    spec: &DisorderSpec,
    axis: RatioAxis,
    ratio: f64,
) -> Result<(ModelParams, DisorderSpec)> {
    if !(ratio > 0.0) {
        return Err(Error::Parameter(format!("Ω_e/σ must be positive, got {ratio}")));
    }
    let mut p = template.clone();
    let mut s = *spec;
    match axis {
        RatioAxis::VaryRabi => p.omega_rabi = ratio * spec.sigma,
        RatioAxis::VarySigma => s.sigma = template.omega_rabi / ratio,
    }
    Ok((p, s))
}
