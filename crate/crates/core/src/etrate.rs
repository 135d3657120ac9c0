//! Non-adiabatic electron-transfer rates in free space and in a cavity.
//!
//! Both environments use the golden-rule channel sum
//!
//! ```text
//! k = 2πV² Σ_{m_D, m_A} η_{m_D}(T) · FC(m_D, m_A; λ) · L(ΔE + (m_D − m_A) ω_v + s, γ_v)
//! ```
//!
//! Free space uses `λ = λ_D − λ_A` and `s = 0`. In the cavity the donor is
//! the upper dressed state `|+; m̃⟩`, which is a model rather than a closed
//! result: each molecule carries electronic weight `1/(2N)` (total ½),
//! the donor displacement along the local mode is `λ_D/(2N)`, so
//! `λ = λ_D/(2N) − λ_A`, and `s = ω_v λ_D²/(4N)` is the residual collective
//! Stokes shift (optional). For `N → ∞` at zero temperature and `ΔE = 0`
//! the ratio tends to `½ exp(λ_D² − 2λ_Dλ_A)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum_ops::{boltzmann_weights, fc_factor};

/// Normalized Lorentzian `(1/π) γ / (δ² + γ²)`.
pub fn lineshape(delta: f64, gamma: f64) -> f64 {
    gamma / (PI * (delta * delta + gamma * gamma))
}

/// Normalized Gaussian with the same peak value `1/(πγ)` as the Lorentzian
/// of width `γ`, i.e. standard deviation `γ √(π/2)`.
pub fn gaussian_lineshape(delta: f64, gamma: f64) -> f64 {
    let s2 = gamma * gamma * PI / 2.0;
    (-delta * delta / (2.0 * s2)).exp() / (PI * gamma)
}

/// Functional form of the Franck–Condon weighted lineshape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lineshape {
    /// Lorentzian tails let far off-resonant channels with large
    /// Franck–Condon factors dominate when `|λ_D − λ_A|` is large.
    Lorentzian,
    /// Same peak value as the Lorentzian but with negligible tails: only
    /// vibronically resonant channels contribute.
    #[default]
    Gaussian,
}

impl Lineshape {
    pub fn eval(self, delta: f64, gamma: f64) -> f64 {
        match self {
            Lineshape::Lorentzian => lineshape(delta, gamma),
            Lineshape::Gaussian => gaussian_lineshape(delta, gamma),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ETParams {
    pub lambda_d: f64,
    pub lambda_a: f64,
    #[serde(default = "ETParams::default_omega_v")]
    pub omega_v: f64,
    #[serde(default = "ETParams::default_gamma_v")]
    pub gamma_v: f64,
    #[serde(default = "ETParams::default_kbt")]
    pub kbt: f64,
    /// Coherent donor–acceptor coupling V.
    #[serde(default = "ETParams::default_v_coh")]
    pub v_coh: f64,
    /// Driving force ΔE of the 0-0 channel, equal in both environments.
    #[serde(default)]
    pub delta_e_drive: f64,
    #[serde(default = "ETParams::default_n")]
    pub n_molecules: f64,
    #[serde(default = "ETParams::default_m_max")]
    pub m_max: u32,
    #[serde(default = "ETParams::default_true")]
    pub include_stokes_shift: bool,
    #[serde(default)]
    pub lineshape: Lineshape,
}

impl ETParams {
    fn default_omega_v() -> f64 {
        1.0
    }
    fn default_gamma_v() -> f64 {
        0.01
    }
    fn default_kbt() -> f64 {
        0.1
    }
    fn default_v_coh() -> f64 {
        0.001
    }
    fn default_n() -> f64 {
        1.0
    }
    fn default_m_max() -> u32 {
        8
    }
    fn default_true() -> bool {
        true
    }

    pub fn new(lambda_d: f64, lambda_a: f64) -> Self {
        Self {
            lambda_d,
            lambda_a,
            omega_v: 1.0,
            gamma_v: 0.01,
            kbt: 0.1,
            v_coh: 0.001,
            delta_e_drive: 0.0,
            n_molecules: 1.0,
            m_max: 8,
            include_stokes_shift: true,
            lineshape: Lineshape::default(),
        }
    }

    pub fn with_n(mut self, n: f64) -> Self {
        self.n_molecules = n;
        self
    }

    pub fn with_drive(mut self, delta_e: f64) -> Self {
        self.delta_e_drive = delta_e;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_v > 0.0) {
            return Err(Error::Parameter(format!("omega_v must be positive, got {}", self.omega_v)));
        }
        if !(self.gamma_v > 0.0) {
            return Err(Error::Parameter(format!("gamma_v must be positive, got {}", self.gamma_v)));
        }
        if !(self.kbt >= 0.0) {
            return Err(Error::Parameter(format!("kbt must be >= 0, got {}", self.kbt)));
        }
        if !(self.n_molecules >= 1.0) {
            return Err(Error::Parameter(format!(
                "n_molecules must be >= 1, got {}",
                self.n_molecules
            )));
        }
        for (name, v) in [
            ("lambda_d", self.lambda_d),
            ("lambda_a", self.lambda_a),
            ("v_coh", self.v_coh),
            ("delta_e_drive", self.delta_e_drive),
        ] {
            if !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be finite")));
            }
        }
        if self.v_coh.abs() / self.omega_v > 0.1 {
            log::warn!(
                "V/ω_v = {:.3} is outside the non-adiabatic regime V ≪ ω_v",
                self.v_coh.abs() / self.omega_v
            );
        }
        Ok(())
    }

    /// Collective Stokes shift `ω_v λ_D² / 4N` of the dressed donor.
    pub fn stokes_shift(&self) -> f64 {
        self.omega_v * self.lambda_d * self.lambda_d / (4.0 * self.n_molecules)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Environment {
    Free,
    Cavity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub m_d: u32,
    pub m_a: u32,
    pub fc: f64,
    pub weight: f64,
    pub lineshape: f64,
    /// Contribution to `rate`, prefactors included.
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    /// `k` in units of ω_v (with `2πV²` applied).
    pub rate: f64,
    /// `k / 2πV²`.
    pub reduced_rate: f64,
    pub channels: Vec<Channel>,
    pub environment: Environment,
    pub lineshape: Lineshape,
    pub include_stokes_shift: bool,
}

fn channel_sum(
    p: &ETParams,
    lambda_rel: f64,
    polariton_weight: f64,
    shift: f64,
    environment: Environment,
) -> RateResult {
    let prefactor = 2.0 * PI * p.v_coh * p.v_coh;
    let eta = boltzmann_weights(p.kbt, p.omega_v, p.m_max);
    let mut channels = Vec::with_capacity(eta.len() * eta.len());
    let mut reduced = 0.0;
    for (m_d, &w) in eta.iter().enumerate() {
        for m_a in 0..=p.m_max {
            let m_d = m_d as u32;
            let fc = fc_factor(m_d, m_a, lambda_rel);
            let delta = p.delta_e_drive + (m_d as f64 - m_a as f64) * p.omega_v + shift;
            let ls = p.lineshape.eval(delta, p.gamma_v);
            let c = polariton_weight * w * fc * ls;
            reduced += c;
            channels.push(Channel {
                m_d,
                m_a,
                fc,
                weight: w,
                lineshape: ls,
                contribution: prefactor * c,
            });
        }
    }
    RateResult {
        rate: prefactor * reduced,
        reduced_rate: reduced,
        channels,
        environment,
        lineshape: p.lineshape,
        include_stokes_shift: p.include_stokes_shift,
    }
}

/// Free-space rate `k₀`.
pub fn et_rate_free(p: &ETParams) -> Result<RateResult> {
    p.validate()?;
    Ok(channel_sum(p, p.lambda_d - p.lambda_a, 1.0, 0.0, Environment::Free))
}

/// Rate from the upper dressed donor state of an N-molecule ensemble.
pub fn et_rate_cavity(p: &ETParams) -> Result<RateResult> {
    p.validate()?;
    let lambda_rel = p.lambda_d / (2.0 * p.n_molecules) - p.lambda_a;
    let shift = if p.include_stokes_shift { p.stokes_shift() } else { 0.0 };
    Ok(channel_sum(p, lambda_rel, 0.5, shift, Environment::Cavity))
}

/// Large-N, zero-temperature resonant ratio `½ exp(λ_D² − 2λ_Dλ_A)`.
pub fn eq7_ratio(lambda_d: f64, lambda_a: f64) -> f64 {
    0.5 * (lambda_d * lambda_d - 2.0 * lambda_d * lambda_a).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateAxis {
    /// Number of molecules.
    N,
    /// λ_D/λ_A with λ_A taken from the template.
    LambdaRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub axis_value: f64,
    pub delta_e: f64,
    pub n_molecules: f64,
    pub lambda_d: f64,
    pub lambda_a: f64,
    pub k_et: f64,
    pub k0: f64,
    pub ratio: f64,
    pub eq7_ratio: f64,
    pub k_et_no_stokes: f64,
    pub ratio_no_stokes: f64,
}

fn rate_row(template: &ETParams, axis: RateAxis, value: f64, delta_e: f64) -> Result<RateRow> {
    let mut p = template.clone();
    p.delta_e_drive = delta_e;
    match axis {
        RateAxis::N => p.n_molecules = value,
        RateAxis::LambdaRatio => p.lambda_d = value * template.lambda_a,
    }
    let k0 = et_rate_free(&p)?.rate;
    let k_et = et_rate_cavity(&ETParams {
        include_stokes_shift: true,
        ..p.clone()
    })?
    .rate;
    let k_plain = et_rate_cavity(&ETParams {
        include_stokes_shift: false,
        ..p.clone()
    })?
    .rate;
    Ok(RateRow {
        axis_value: value,
        delta_e,
        n_molecules: p.n_molecules,
        lambda_d: p.lambda_d,
        lambda_a: p.lambda_a,
        k_et,
        k0,
        ratio: k_et / k0,
        eq7_ratio: eq7_ratio(p.lambda_d, p.lambda_a),
        k_et_no_stokes: k_plain,
        ratio_no_stokes: k_plain / k0,
    })
}

/// One row per `(value, ΔE)` pair, ordered by value then ΔE.
pub fn sweep_ratio(
    template: &ETParams,
    axis: RateAxis,
    values: &[f64],
    delta_e_values: &[f64],
) -> Result<Vec<RateRow>> {
    let points: Vec<(f64, f64)> = values
        .iter()
        .flat_map(|&v| delta_e_values.iter().map(move |&d| (v, d)))
        .collect();
    points
        .par_iter()
        .map(|&(v, d)| rate_row(template, axis, v, d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn lorentzian_examples() {
        let g = 0.01;
        assert_relative_eq!(lineshape(0.0, g), 1.0 / (PI * g), max_relative = 1e-15);
        assert_relative_eq!(lineshape(g, g), 0.5 * lineshape(0.0, g), max_relative = 1e-15);
    }

    #[test]
    fn lorentzian_quadrature() {
        // Composite Simpson over ±100γ; the analytic mass outside is 2/π·atan(1/100) ≈ 0.0064.
        let g = 0.3;
        let steps = 200_000;
        let (a, b) = (-100.0 * g, 100.0 * g);
        let h = (b - a) / steps as f64;
        let mut s = lineshape(a, g) + lineshape(b, g);
        for i in 1..steps {
            let x = a + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * lineshape(x, g);
        }
        let integral = s * h / 3.0;
        assert!((integral - 1.0).abs() <= 1e-2, "{integral}");
    }

    #[test]
    fn gaussian_is_normalized_with_lorentzian_peak() {
        let g = 0.02;
        assert_relative_eq!(gaussian_lineshape(0.0, g), lineshape(0.0, g), max_relative = 1e-15);
        let steps = 100_000;
        let (a, b) = (-20.0 * g, 20.0 * g);
        let h = (b - a) / steps as f64;
        let mut s = gaussian_lineshape(a, g) + gaussian_lineshape(b, g);
        for i in 1..steps {
            let x = a + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * gaussian_lineshape(x, g);
        }
        assert!((s * h / 3.0 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_temperature_resonant_free_rate() {
        let mut p = ETParams::new(SQRT2, -SQRT2);
        p.kbt = 0.0;
        let k0 = et_rate_free(&p).unwrap();
        let closed = 2.0 * PI * p.v_coh.powi(2) * (-8f64).exp() / (PI * p.gamma_v);
        assert!((k0.rate / closed - 1.0).abs() <= 1e-3);
        let sum: f64 = k0.channels.iter().map(|c| c.contribution).sum();
        assert_relative_eq!(sum, k0.rate, max_relative = 1e-12);
    }

    #[test]
    fn equal_displacements_free_rate() {
        for shape in [Lineshape::Lorentzian, Lineshape::Gaussian] {
            let mut p = ETParams::new(0.7, 0.7);
            p.kbt = 0.0;
            p.lineshape = shape;
            let k0 = et_rate_free(&p).unwrap();
            let expect = 2.0 * PI * p.v_coh.powi(2) / (PI * p.gamma_v);
            assert_relative_eq!(k0.rate, expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn lorentzian_off_resonant_suppression() {
        let mut p = ETParams::new(0.5, 0.5);
        p.kbt = 0.0;
        p.lineshape = Lineshape::Lorentzian;
        let on = et_rate_free(&p).unwrap().rate;
        let off = et_rate_free(&p.clone().with_drive(0.5)).unwrap().rate;
        let expect = (p.gamma_v / 0.5).powi(2);
        assert!((off / on / expect - 1.0).abs() < 1e-3, "{}", off / on / expect);
    }

    #[test]
    fn eq7_examples() {
        assert_eq!(eq7_ratio(0.0, 0.0), 0.5);
        assert_relative_eq!(eq7_ratio(SQRT2, -SQRT2), 0.5 * 6f64.exp(), max_relative = 1e-14);
        assert!((eq7_ratio(SQRT2, -SQRT2) - 201.71).abs() < 0.01);
        assert!((eq7_ratio(SQRT2, SQRT2) - 0.0677).abs() < 1e-4);
    }

    #[test]
    fn cavity_rate_large_n_matches_eq7() {
        let mut p = ETParams::new(SQRT2, -SQRT2).with_n(1e6);
        p.kbt = 0.0;
        let r = et_rate_cavity(&p).unwrap().rate / et_rate_free(&p).unwrap().rate;
        assert!((r / eq7_ratio(SQRT2, -SQRT2) - 1.0).abs() < 1e-3, "{r}");
        assert!((r - 201.7).abs() < 0.3);
    }

    #[test]
    fn same_direction_shift_suppresses() {
        let mut p = ETParams::new(1.1, 1.1).with_n(1e6);
        p.kbt = 0.0;
        let r = et_rate_cavity(&p).unwrap().rate / et_rate_free(&p).unwrap().rate;
        assert!(r < 1.0);
        assert_relative_eq!(r, 0.5 * (-1.21f64).exp(), max_relative = 1e-3);
    }

    #[test]
    fn rates_nonnegative_and_sign_symmetric() {
        for (ld, la) in [(1.0, -0.5), (2.0, 1.5), (-0.3, 0.9)] {
            for n in [1.0, 7.0, 1e3] {
                let p = ETParams::new(ld, la).with_n(n).with_drive(0.013);
                let q = ETParams::new(-ld, -la).with_n(n).with_drive(0.013);
                let (f1, f2) = (et_rate_free(&p).unwrap().rate, et_rate_free(&q).unwrap().rate);
                let (c1, c2) = (et_rate_cavity(&p).unwrap().rate, et_rate_cavity(&q).unwrap().rate);
                assert!(f1 >= 0.0 && c1 >= 0.0);
                assert_relative_eq!(f1, f2, max_relative = 1e-12);
                assert_relative_eq!(c1, c2, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn free_rate_depends_only_on_relative_shift() {
        let p = ETParams::new(1.0, 0.0).with_n(5.0);
        let q = ETParams::new(2.0, 1.0).with_n(5.0);
        assert_relative_eq!(
            et_rate_free(&p).unwrap().rate,
            et_rate_free(&q).unwrap().rate,
            max_relative = 1e-12
        );
        let c1 = et_rate_cavity(&p).unwrap().rate;
        let c2 = et_rate_cavity(&q).unwrap().rate;
        assert!((c1 - c2).abs() > 1e-3 * c1.max(c2));
    }

    #[test]
    fn channel_sum_converges_in_m_max() {
        for (ld, la) in [(SQRT2, -SQRT2), (SQRT2, SQRT2), (0.5, -1.0)] {
            let base = ETParams::new(ld, la).with_n(100.0);
            let big = ETParams { m_max: 12, ..base.clone() };
            for f in [et_rate_free, et_rate_cavity] {
                let a = f(&base).unwrap().rate;
                let b = f(&big).unwrap().rate;
                assert!((a / b - 1.0).abs() <= 1e-6, "λ=({ld},{la}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn invalid_params() {
        let mut p = ETParams::new(1.0, 0.0);
        p.gamma_v = 0.0;
        assert!(et_rate_free(&p).is_err());
        let p = ETParams::new(1.0, 0.0).with_n(0.5);
        assert!(et_rate_cavity(&p).is_err());
    }

    #[test]
    fn sweep_shapes() {
        let t = ETParams::new(SQRT2, -SQRT2);
        let rows = sweep_ratio(&t, RateAxis::N, &[10.0], &[0.0]).unwrap();
        assert_eq!(rows.len(), 1);
        let rows = sweep_ratio(&t, RateAxis::N, &[10.0, 100.0], &[0.0, 0.02, 0.05]).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!((rows[4].axis_value, rows[4].delta_e), (100.0, 0.02));
        let rows = sweep_ratio(&ETParams::new(0.0, SQRT2), RateAxis::LambdaRatio, &[-1.0], &[0.0]).unwrap();
        assert_relative_eq!(rows[0].lambda_d, -SQRT2);
    }
}
