//! Holstein–Jaynes–Cummings Hamiltonian in the plane-wave `(k, q)` basis.
//!
//! With `u_{ki} = e^{ikr_i}/√N`, `c_{qi} = e^{iqr_i}/√N` and `r_i = i`, the
//! site-local vibronic coupling `λω_v Σ_i |e_i⟩⟨e_i|(b_i + b_i†)` becomes
//!
//! ```text
//! (λ ω_v / √N) Σ_{k,q} |k+q⟩⟨k| (b_q + b_{−q}†)
//! ```
//!
//! so electronic plus phonon momentum is conserved modulo N. The cavity
//! photon only couples to the symmetric excitation `|k = 0⟩`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Basis, CavityGauge, Electronic, ModelParams};
use crate::sparse::{HermitianBuilder, SparseHermitian};

/// Site energies Δ_e(r_i) of the excited state relative to the cavity, one
/// per molecule. When given, they replace the uniform `delta_e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detunings(pub Vec<f64>);

impl Detunings {
    pub fn uniform(n: usize, value: f64) -> Self {
        Self(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `⟨k|Σ_i Δ_i |e_i⟩⟨e_i| |k'⟩ = (1/N) Σ_i Δ_i e^{−i(k−k')r_i}`, row-major N×N.
    pub fn momentum_block(&self) -> Vec<Complex64> {
        let n = self.0.len();
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for k in 0..n {
            for kp in 0..n {
                let dk = (k as i64 - kp as i64).rem_euclid(n as i64) as f64;
                let s: Complex64 = self
                    .0
                    .iter()
                    .enumerate()
                    .map(|(i, &d)| Complex64::from_polar(d, -2.0 * PI * dk * i as f64 / n as f64))
                    .sum();
                m[k * n + kp] = s / n as f64;
            }
        }
        m
    }
}

/// `⟨G, n_cav = 1|H|α₀, n_cav = 0⟩` for the chosen gauge.
pub fn cavity_element(params: &ModelParams) -> Complex64 {
    let g = params.collective_coupling();
    match params.gauge {
        CavityGauge::Paper => Complex64::new(0.0, g),
        CavityGauge::Real => Complex64::new(g, 0.0),
    }
}

/// Assembles the HJC Hamiltonian on the truncated one-excitation basis.
/// Matrix elements that leave the truncation are dropped.
pub fn build_hjc(params: &ModelParams, detunings: Option<&Detunings>) -> Result<SparseHermitian> {
    let basis = Basis::new(params)?;
    build_hjc_on(&basis, params, detunings)
}

pub fn build_hjc_on(
    basis: &Basis,
    params: &ModelParams,
    detunings: Option<&Detunings>,
) -> Result<SparseHermitian> {
    let n = params.n_molecules;
    if let Some(d) = detunings {
        if d.len() != n {
            return Err(Error::Length {
                expected: n,
                got: d.len(),
            });
        }
        if d.0.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("non-finite detuning".into()));
        }
    }
    let trunc = basis.trunc();
    let omega_v = params.omega_v;
    let stokes = omega_v * params.huang_rhys();
    let vib = params.lambda_e * omega_v / (n as f64).sqrt();
    let cavity = cavity_element(params);
    let electronic = detunings.map(Detunings::momentum_block);

    let mut b = HermitianBuilder::new(basis.dim());
    let mut ph = vec![0u32; n];

    for p in 0..basis.phonon_count() {
        basis.phonons_of_rank(p, &mut ph);
        let total: u32 = ph.iter().sum();
        let e_ph = omega_v * total as f64;

        let g_idx = basis.compose(Electronic::Ground, p);
        b.add_diag(g_idx, e_ph);
        b.add(g_idx, basis.compose(Electronic::Excited(0), p), cavity);

        for k in 0..n {
            let ket = basis.compose(Electronic::Excited(k), p);
            match &electronic {
                None => b.add_diag(ket, e_ph + stokes + params.delta_e),
                Some(block) => {
                    b.add_diag(ket, e_ph + stokes + block[k * n + k].re);
                    for kp in k + 1..n {
                        let v = block[k * n + kp];
                        if v != Complex64::new(0.0, 0.0) {
                            b.add(ket, basis.compose(Electronic::Excited(kp), p), v);
                        }
                    }
                }
            }

            if vib == 0.0 {
                continue;
            }
            for q in 0..n {
                let k_out = (k + q) % n;
                // b_q: absorb a phonon of momentum q.
                if ph[q] > 0 {
                    let amp = vib * (ph[q] as f64).sqrt();
                    ph[q] -= 1;
                    let bra = basis.compose(Electronic::Excited(k_out), basis.phonon_rank_unchecked(&ph));
                    ph[q] += 1;
                    if bra < ket {
                        b.add(bra, ket, Complex64::new(amp, 0.0));
                    }
                }
                // b_{−q}†: emit a phonon of momentum −q.
                let mq = (n - q) % n;
                let room = ph[mq] < trunc.cap(mq) && trunc.m_total_max.is_none_or(|t| total < t);
                if room {
                    let amp = vib * (ph[mq] as f64 + 1.0).sqrt();
                    ph[mq] += 1;
                    let bra = basis.compose(Electronic::Excited(k_out), basis.phonon_rank_unchecked(&ph));
                    ph[mq] -= 1;
                    if bra < ket {
                        b.add(bra, ket, Complex64::new(amp, 0.0));
                    }
                }
            }
        }
    }
    Ok(b.build())
}

/// Which electronic manifold a projector selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Manifold {
    /// Permutation-symmetric `{|G⟩, |α₀⟩}` with any photon and phonon content.
    P,
    /// Orthogonal complement, `Excited(k ≠ 0)`.
    Q,
}

/// Diagonal projector in the basis. Because `|G⟩` and `|α₀⟩` are sectors 0
/// and 1, `P` covers exactly the first `2 × phonon_count` indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Projector {
    pub manifold: Manifold,
    split: usize,
    dim: usize,
}

impl Projector {
    pub fn new(basis: &Basis, manifold: Manifold) -> Self {
        Self {
            manifold,
            split: 2 * basis.phonon_count(),
            dim: basis.dim(),
        }
    }

    #[inline]
    pub fn contains(&self, index: usize) -> bool {
        match self.manifold {
            Manifold::P => index < self.split,
            Manifold::Q => index >= self.split && index < self.dim,
        }
    }

    /// Rank of the projector.
    pub fn trace(&self) -> usize {
        match self.manifold {
            Manifold::P => self.split,
            Manifold::Q => self.dim - self.split,
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::Length {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(v.iter()
            .enumerate()
            .map(|(i, &x)| if self.contains(i) { x } else { Complex64::new(0.0, 0.0) })
            .collect())
    }
}

pub fn projector_p(params: &ModelParams) -> Result<Projector> {
    Ok(Projector::new(&Basis::new(params)?, Manifold::P))
}

pub fn projector_q(params: &ModelParams) -> Result<Projector> {
    Ok(Projector::new(&Basis::new(params)?, Manifold::Q))
}

/// Frobenius norm of `rows · H · cols`.
pub fn block_norm(h: &SparseHermitian, rows: &Projector, cols: &Projector) -> f64 {
    let mut s = 0.0;
    for (i, &d) in h.diagonal().iter().enumerate() {
        if rows.contains(i) && cols.contains(i) {
            s += d * d;
        }
    }
    for (r, c, v) in h.upper_entries() {
        if rows.contains(r) && cols.contains(c) {
            s += v.norm_sqr();
        }
        if rows.contains(c) && cols.contains(r) {
            s += v.norm_sqr();
        }
    }
    s.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BasisIndex, BasisState, Truncation};

    #[test]
    fn momentum_block_uniform_is_diagonal() {
        let d = Detunings::uniform(5, 0.7);
        let m = d.momentum_block();
        for k in 0..5 {
            for kp in 0..5 {
                let expect = if k == kp { 0.7 } else { 0.0 };
                assert!((m[k * 5 + kp] - Complex64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn momentum_block_is_hermitian_with_mean_diagonal() {
        let d = Detunings(vec![0.3, -1.2, 0.5, 2.0]);
        let m = d.momentum_block();
        for k in 0..4 {
            assert!((m[k * 4 + k].re - 0.4).abs() < 1e-14);
            for kp in 0..4 {
                assert!((m[k * 4 + kp] - m[kp * 4 + k].conj()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn detuning_length_checked() {
        let p = ModelParams::new(3, 1.0, 1.0).with_trunc(Truncation::new(1, 1));
        assert!(matches!(
            build_hjc(&p, Some(&Detunings(vec![0.0; 2]))),
            Err(Error::Length { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn cavity_entry_and_symmetric_vibronic_strength() {
        let p = ModelParams::new(4, 0.8, 2.0).with_trunc(Truncation::new(2, 1));
        let basis = Basis::new(&p).unwrap();
        let h = build_hjc(&p, None).unwrap();
        let g0 = basis.index_of(&BasisState::new(Electronic::Ground, vec![0; 4])).unwrap().0;
        let e0 = basis.index_of(&BasisState::new(Electronic::Excited(0), vec![0; 4])).unwrap().0;
        assert_eq!(h.get(g0, e0), Complex64::new(0.0, 2.0));
        let e0_one = basis
            .index_of(&BasisState::new(Electronic::Excited(0), vec![1, 0, 0, 0]))
            .unwrap()
            .0;
        assert!((h.get(e0, e0_one).re - 0.8 / 2.0).abs() < 1e-15);
        assert!((h.diagonal()[e0] - 0.64).abs() < 1e-15);
        assert!((h.diagonal()[e0_one] - 1.64).abs() < 1e-15);
    }

    #[test]
    fn projectors_partition_the_basis() {
        let p = ModelParams::new(3, 1.0, 1.0).with_trunc(Truncation::new(2, 1));
        let basis = Basis::new(&p).unwrap();
        let pp = projector_p(&p).unwrap();
        let qq = projector_q(&p).unwrap();
        assert_eq!(pp.trace(), 2 * basis.phonon_count());
        assert_eq!(pp.trace() + qq.trace(), basis.dim());
        for i in 0..basis.dim() {
            let s = basis.state_of(BasisIndex(i)).unwrap();
            assert_eq!(pp.contains(i), s.electronic.is_symmetric());
            assert_ne!(pp.contains(i), qq.contains(i));
        }
    }
}
