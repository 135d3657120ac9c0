//! Polaron decoupling: cavity-dressed vibronic states and the overlap metric
//! `P₀ = |⟨Φ₀|ψ₋; m = 0⟩|²` between the exact lowest polariton `|Φ₀⟩` and the
//! undisplaced lower dressed state.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{build_hjc_on, cavity_element, Detunings};
use crate::model::{Basis, CavityGauge, Electronic, ModelParams};
use crate::quantum_ops::displacement_element;
use crate::solver::{lowest_eigenpairs_with, SolverOptions};

/// Eigenvalues closer than this to the lowest one are treated as degenerate.
const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Normalized eigenvectors `(lower, upper)` of `[[a, c], [c*, d]]`, each as
/// `(component on the first state, component on the second)`, with the
/// second component real and non-negative.
fn two_level_eigenvectors(a: f64, d: f64, c: Complex64) -> [(Complex64, Complex64); 2] {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    if c.norm() == 0.0 {
        return if a <= d {
            [(one, zero), (zero, one)]
        } else {
            [(zero, one), (one, zero)]
        };
    }
    let mean = 0.5 * (a + d);
    let half = (0.25 * (a - d) * (a - d) + c.norm_sqr()).sqrt();
    let mut out = [(zero, zero); 2];
    for (slot, e) in out.iter_mut().zip([mean - half, mean + half]) {
        // (H − e) x = 0  ⇒  x ∝ (c, e − a)
        let x0 = c;
        let x1 = Complex64::new(e - a, 0.0);
        let nrm = (x0.norm_sqr() + x1.norm_sqr()).sqrt();
        let (mut x0, mut x1) = (x0 / nrm, x1 / nrm);
        if x1.norm() > 0.0 {
            let phase = x1.conj() / x1.norm();
            x0 *= phase;
            x1 *= phase;
        } else {
            let phase = x0.conj() / x0.norm();
            x0 *= phase;
        }
        *slot = (x0, x1);
    }
    out
}

/// `(⟨G,1|ψ±⟩, ⟨α₀,0|ψ±⟩)`: eigenvectors of the vibration-free cavity block
/// `[[0, c], [c*, Δ_e]]` of the Hamiltonian. For a vanishing coupling at
/// resonance the limit of a small positive coupling is used.
pub fn polariton_components(params: &ModelParams, branch: Branch) -> (Complex64, Complex64) {
    let mut c = cavity_element(params);
    if c.norm() == 0.0 && params.delta_e == 0.0 {
        c = match params.gauge {
            CavityGauge::Paper => Complex64::new(0.0, 1.0),
            CavityGauge::Real => Complex64::new(1.0, 0.0),
        };
    }
    let [lower, upper] = two_level_eigenvectors(0.0, params.delta_e, c);
    match branch {
        Branch::Minus => lower,
        Branch::Plus => upper,
    }
}

/// `|±; m̃⟩ = |ψ±⟩ ⊗ D†(λ_e / 2√N)|m_sym⟩ ⊗ |0…0⟩` in basis order. The
/// symmetric-mode displacement is truncated at the basis caps.
pub fn dressed_state_vector(params: &ModelParams, branch: Branch, m_sym: u32) -> Result<Vec<Complex64>> {
    let basis = Basis::new(params)?;
    dressed_state_on(&basis, params, branch, m_sym)
}

pub fn dressed_state_on(
    basis: &Basis,
    params: &ModelParams,
    branch: Branch,
    m_sym: u32,
) -> Result<Vec<Complex64>> {
    let n = params.n_molecules;
    let trunc = basis.trunc();
    let sym_cap = trunc.m_total_max.map_or(trunc.m_sym_max, |t| t.min(trunc.m_sym_max));
    if m_sym > sym_cap {
        return Err(Error::Domain(format!(
            "symmetric-mode level {m_sym} exceeds truncation {sym_cap}"
        )));
    }
    let (photon, exciton) = polariton_components(params, branch);
    let shift = params.lambda_e / (2.0 * (n as f64).sqrt());
    let mut v = vec![Complex64::new(0.0, 0.0); basis.dim()];
    let mut ph = vec![0u32; n];
    for j in 0..=sym_cap {
        // ⟨j|D†(μ)|m⟩ = ⟨j|D(−μ)|m⟩
        let amp = displacement_element(j, m_sym, -shift);
        ph[0] = j;
        let rank = basis.phonon_rank_unchecked(&ph);
        v[basis.compose(Electronic::Ground, rank)] = photon * amp;
        v[basis.compose(Electronic::Excited(0), rank)] = exciton * amp;
    }
    Ok(v)
}

/// Dressed energy `±√N Ω_e/2 + ω_v m_sym + ω_v Σ m_ν'`, with κ(m̃) ≈ m̃ and
/// the O(1/N) Stokes shift dropped.
pub fn dressed_energy(params: &ModelParams, branch: Branch, m_sym: u32, nonsym: &[u32]) -> f64 {
    let nonsym_total: u32 = nonsym.iter().sum();
    branch.sign() * params.collective_coupling()
        + params.omega_v * (m_sym as f64 + nonsym_total as f64)
}

/// Upper bound `exp(−λ_e² / 4N)` on `P₀`.
pub fn p0_bound(lambda_e: f64, n_molecules: usize) -> f64 {
    (-lambda_e * lambda_e / (4.0 * n_molecules as f64)).exp()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct P0Result {
    pub p0: f64,
    pub bound: f64,
    pub params: ModelParams,
    pub ground_energy: f64,
    pub residual: f64,
    pub dim: usize,
    pub iterations: usize,
    /// Size of the returned degenerate ground space the overlap was taken over.
    pub degeneracy: usize,
}

fn is_degenerate(e0: f64, e: f64) -> bool {
    (e - e0).abs() <= DEGENERACY_TOL * e0.abs().max(1.0)
}

/// Solves for the lowest eigenstate and returns `P₀` against the
/// `λ_e = 0` lower dressed state. A degenerate ground space contributes the
/// largest squared overlap attainable within it (the squared norm of the
/// target's projection onto the returned degenerate vectors).
pub fn compute_p0(
    params: &ModelParams,
    detunings: Option<&Detunings>,
    opts: &SolverOptions,
) -> Result<P0Result> {
    let basis = Basis::new(params)?;
    let h = build_hjc_on(&basis, params, detunings)?;
    let mut o = opts.clone();
    o.n_pairs = o.n_pairs.max(1).min(basis.dim());
    let mut eig = lowest_eigenpairs_with(&h, &o)?;
    // Widen the request until the degenerate ground space is complete.
    while o.n_pairs < basis.dim() && is_degenerate(eig.eigenvalues[0], eig.eigenvalues[o.n_pairs - 1]) {
        o.n_pairs = (2 * o.n_pairs).min(basis.dim());
        eig = lowest_eigenpairs_with(&h, &o)?;
    }

    let mut target_params = params.clone();
    target_params.lambda_e = 0.0;
    let target = dressed_state_on(&basis, &target_params, Branch::Minus, 0)?;

    let e0 = eig.eigenvalues[0];
    let mut p0 = 0.0;
    let mut degeneracy = 0;
    let mut residual: f64 = 0.0;
    for ((e, v), r) in eig.eigenvalues.iter().zip(&eig.eigenvectors).zip(&eig.residuals) {
        if !is_degenerate(e0, *e) {
            continue;
        }
        let ov: Complex64 = target.iter().zip(v).map(|(t, x)| t.conj() * x).sum();
        p0 += ov.norm_sqr();
        degeneracy += 1;
        residual = residual.max(*r);
    }
    Ok(P0Result {
        p0: p0.min(1.0),
        bound: p0_bound(params.lambda_e, params.n_molecules),
        params: params.clone(),
        ground_energy: e0,
        residual,
        dim: basis.dim(),
        iterations: eig.iterations,
        degeneracy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum P0Axis {
    N,
    OmegaRabi,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct P0Row {
    pub value: f64,
    pub result: std::result::Result<P0Result, String>,
}

fn point_params(template: &ModelParams, axis: P0Axis, value: f64) -> Result<ModelParams> {
    let mut p = template.clone();
    match axis {
        P0Axis::N => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(Error::Parameter(format!("N must be a positive integer, got {value}")));
            }
            p.n_molecules = value as usize;
        }
        P0Axis::OmegaRabi => p.omega_rabi = value,
    }
    Ok(p)
}

/// Independent `compute_p0` runs along one axis. Failures are recorded per
/// row and do not stop the sweep.
pub fn sweep_p0(template: &ModelParams, axis: P0Axis, values: &[f64], opts: &SolverOptions) -> Vec<P0Row> {
    values
        .par_iter()
        .map(|&value| P0Row {
            value,
            result: point_params(template, axis, value)
                .and_then(|p| compute_p0(&p, None, opts))
                .map_err(|e| e.to_string()),
        })
        .collect()
}

/// One level of the analytic dressed spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedLevel {
    pub branch: Branch,
    pub m_sym: u32,
    pub nonsym_total: u32,
    pub energy: f64,
}

/// Analytic dressed levels reachable within the truncation, ascending.
pub fn dressed_levels(params: &ModelParams) -> Vec<DressedLevel> {
    let n = params.n_molecules as u32;
    let trunc = params.trunc;
    let nonsym_max = (n - 1) * trunc.m_nonsym_max;
    let mut out = Vec::new();
    for branch in [Branch::Minus, Branch::Plus] {
        for m_sym in 0..=trunc.m_sym_max {
            for nonsym_total in 0..=nonsym_max {
                if let Some(t) = trunc.m_total_max {
                    if m_sym + nonsym_total > t {
                        continue;
                    }
                }
                out.push(DressedLevel {
                    branch,
                    m_sym,
                    nonsym_total,
                    energy: dressed_energy(params, branch, m_sym, &[nonsym_total]),
                });
            }
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub eigenvalue: f64,
    pub residual: f64,
    pub nearest: DressedLevel,
    pub deviation: f64,
}

/// Low-lying numerical eigenvalues next to the nearest analytic dressed level.
pub fn compare_spectrum(params: &ModelParams, opts: &SolverOptions) -> Result<Vec<SpectrumRow>> {
    let h = build_hjc_on(&Basis::new(params)?, params, None)?;
    let eig = lowest_eigenpairs_with(&h, opts)?;
    let levels = dressed_levels(params);
    Ok(eig
        .eigenvalues
        .iter()
        .zip(&eig.residuals)
        .enumerate()
        .map(|(index, (&e, &r))| {
            let nearest = *levels
                .iter()
                .min_by(|a, b| (a.energy - e).abs().total_cmp(&(b.energy - e).abs()))
                .expect("at least one dressed level");
            SpectrumRow {
                index,
                eigenvalue: e,
                residual: r,
                nearest,
                deviation: e - nearest.energy,
            }
        })
        .collect())
}
