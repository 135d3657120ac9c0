//! Model parameters and the truncated one-excitation basis.
//!
//! Energies are measured in units of the vibrational frequency `omega_v`
//! unless stated otherwise. Electronic excitations and phonons are labelled
//! by integer momenta `j = 0..N-1` on a ring of unit spacing, i.e. the
//! physical momentum is `2πj/N`; label 0 is the permutation-symmetric mode.
//!
//! # Basis ordering
//!
//! The basis is ordered lexicographically by
//! `(electronic sector, phonon occupation vector)`:
//!
//! * sector 0 is `|G⟩ ⊗ |n_cav = 1⟩`,
//! * sector `1 + k` is `|Excited(k)⟩ ⊗ |n_cav = 0⟩` for `k = 0..N-1`,
//! * within a sector, phonon vectors are ordered lexicographically with
//!   `phonons[0]` (the symmetric mode) most significant.
//!
//! The global index is `sector * phonon_count + phonon_rank`. This ordering
//! is frozen: serialized eigenvectors depend on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-mode and total phonon caps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    /// Maximum quanta in the symmetric mode `q = 0`.
    #[serde(default = "Truncation::default_sym")]
    pub m_sym_max: u32,
    /// Maximum quanta in each mode `q != 0`.
    #[serde(default = "Truncation::default_nonsym")]
    pub m_nonsym_max: u32,
    /// Optional cap on the total number of phonons.
    #[serde(default)]
    pub m_total_max: Option<u32>,
}

impl Truncation {
    fn default_sym() -> u32 {
        6
    }

    fn default_nonsym() -> u32 {
        2
    }

    pub fn new(m_sym_max: u32, m_nonsym_max: u32) -> Self {
        Self {
            m_sym_max,
            m_nonsym_max,
            m_total_max: None,
        }
    }

    /// Caps every mode at `total` and the phonon sum at `total`. This space is
    /// invariant under any unitary mixing of the phonon modes, so it is the
    /// same space in the site and momentum representations.
    pub fn total_only(total: u32) -> Self {
        Self {
            m_sym_max: total,
            m_nonsym_max: total,
            m_total_max: Some(total),
        }
    }

    pub fn with_total(mut self, total: u32) -> Self {
        self.m_total_max = Some(total);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_sym_max < self.m_nonsym_max {
            return Err(Error::Parameter(format!(
                "m_sym_max ({}) must be >= m_nonsym_max ({})",
                self.m_sym_max, self.m_nonsym_max
            )));
        }
        Ok(())
    }

    /// Cap for phonon mode `q`.
    #[inline]
    pub fn cap(&self, q: usize) -> u32 {
        if q == 0 {
            self.m_sym_max
        } else {
            self.m_nonsym_max
        }
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self::new(Self::default_sym(), Self::default_nonsym())
    }
}

/// Phase convention of the cavity coupling.
///
/// `Paper` keeps `-i√N(Ω/2)(|α₀⟩⟨G|a − |G⟩⟨α₀|a†)`. `Real` applies the gauge
/// `a → i a`, which makes every matrix element real. Spectra and squared
/// overlaps are identical in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CavityGauge {
    #[default]
    Paper,
    Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub n_molecules: usize,
    #[serde(default = "ModelParams::default_omega_v")]
    pub omega_v: f64,
    /// Dimensionless displacement λ_e; the Huang–Rhys factor is λ_e².
    #[serde(default)]
    pub lambda_e: f64,
    /// Single-molecule Rabi frequency Ω_e.
    #[serde(default)]
    pub omega_rabi: f64,
    /// Detuning Δ_e = ω_e − ω_cav from the 0-0 line.
    #[serde(default)]
    pub delta_e: f64,
    #[serde(default = "ModelParams::default_n_cav_max")]
    pub n_cav_max: u32,
    #[serde(default)]
    pub trunc: Truncation,
    #[serde(default)]
    pub gauge: CavityGauge,
}

impl ModelParams {
    fn default_omega_v() -> f64 {
        1.0
    }

    fn default_n_cav_max() -> u32 {
        1
    }

    pub fn new(n_molecules: usize, lambda_e: f64, omega_rabi: f64) -> Self {
        Self {
            n_molecules,
            omega_v: 1.0,
            lambda_e,
            omega_rabi,
            delta_e: 0.0,
            n_cav_max: 1,
            trunc: Truncation::default(),
            gauge: CavityGauge::Paper,
        }
    }

    /// Sets λ_e from a mass-weighted equilibrium shift `q0` of the excited
    /// potential; the sign of the displacement follows `q0`.
    pub fn with_shift(mut self, q0: f64) -> Result<Self> {
        let hr = huang_rhys_from_shift(self.omega_v, q0)?;
        self.lambda_e = hr.sqrt().copysign(q0);
        Ok(self)
    }

    pub fn with_trunc(mut self, trunc: Truncation) -> Self {
        self.trunc = trunc;
        self
    }

    pub fn with_delta_e(mut self, delta_e: f64) -> Self {
        self.delta_e = delta_e;
        self
    }

    pub fn with_gauge(mut self, gauge: CavityGauge) -> Self {
        self.gauge = gauge;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_molecules == 0 {
            return Err(Error::Parameter("n_molecules must be >= 1".into()));
        }
        if !(self.omega_v > 0.0) || !self.omega_v.is_finite() {
            return Err(Error::Parameter(format!(
                "omega_v must be positive, got {}",
                self.omega_v
            )));
        }
        for (name, v) in [
            ("lambda_e", self.lambda_e),
            ("omega_rabi", self.omega_rabi),
            ("delta_e", self.delta_e),
        ] {
            if !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be finite")));
            }
        }
        if self.n_cav_max != 1 {
            return Err(Error::Parameter(format!(
                "n_cav_max must be 1 (one-excitation sector), got {}",
                self.n_cav_max
            )));
        }
        self.trunc.validate()
    }

    /// Huang–Rhys factor λ_e².
    pub fn huang_rhys(&self) -> f64 {
        self.lambda_e * self.lambda_e
    }

    /// Detuning of the vertical transition, Δ = Δ_e + ω_v λ_e².
    pub fn detuning(&self) -> f64 {
        self.delta_e + self.omega_v * self.huang_rhys()
    }

    /// Collective half splitting √N Ω_e / 2.
    pub fn collective_coupling(&self) -> f64 {
        (self.n_molecules as f64).sqrt() * self.omega_rabi / 2.0
    }
}

/// Huang–Rhys factor λ² = (ω_v / 2) q0² of a harmonic potential displaced by
/// the mass-weighted shift `q0`.
pub fn huang_rhys_from_shift(omega_v: f64, q0: f64) -> Result<f64> {
    if !(omega_v > 0.0) {
        return Err(Error::Parameter(format!(
            "omega_v must be positive, got {omega_v}"
        )));
    }
    Ok(0.5 * omega_v * q0 * q0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Electronic {
    /// All molecules in `|g⟩`; the photon carries the excitation.
    Ground,
    /// Collective excitation with momentum label `k`.
    Excited(usize),
}

impl Electronic {
    #[inline]
    pub fn sector(self) -> usize {
        match self {
            Electronic::Ground => 0,
            Electronic::Excited(k) => k + 1,
        }
    }

    #[inline]
    pub fn from_sector(sector: usize) -> Self {
        if sector == 0 {
            Electronic::Ground
        } else {
            Electronic::Excited(sector - 1)
        }
    }

    /// Member of the permutation-symmetric manifold `{|G⟩, |α₀⟩}`.
    #[inline]
    pub fn is_symmetric(self) -> bool {
        matches!(self, Electronic::Ground | Electronic::Excited(0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub cavity_occ: u8,
    pub electronic: Electronic,
    pub phonons: Vec<u32>,
}

impl BasisState {
    pub fn new(electronic: Electronic, phonons: Vec<u32>) -> Self {
        let cavity_occ = match electronic {
            Electronic::Ground => 1,
            Electronic::Excited(_) => 0,
        };
        Self {
            cavity_occ,
            electronic,
            phonons,
        }
    }

    pub fn total_phonons(&self) -> u32 {
        self.phonons.iter().sum()
    }

    /// Total crystal momentum label (electronic plus phonon) modulo N.
    pub fn total_momentum(&self) -> usize {
        let n = self.phonons.len();
        let k = match self.electronic {
            Electronic::Ground => 0,
            Electronic::Excited(k) => k,
        };
        let q: usize = self
            .phonons
            .iter()
            .enumerate()
            .map(|(q, &m)| q * m as usize)
            .sum();
        (k + q) % n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(pub usize);

/// Bijective map between basis states and dense indices.
#[derive(Debug, Clone)]
pub struct Basis {
    n: usize,
    trunc: Truncation,
    phonon_count: usize,
    dim: usize,
    ranker: PhononRanker,
}

#[derive(Debug, Clone)]
enum PhononRanker {
    /// Product space: plain mixed radix, `strides[q]` is the place value of mode `q`.
    MixedRadix { strides: Vec<usize> },
    /// Total-capped space: `completions[pos][b]` counts admissible tails over
    /// modes `pos..N` whose sum is at most `b`.
    Capped {
        total: u32,
        completions: Vec<Vec<usize>>,
    },
}

impl Basis {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let n = params.n_molecules;
        let trunc = params.trunc;
        let max_sum = trunc.m_sym_max as u64 + (n as u64 - 1) * trunc.m_nonsym_max as u64;
        let effective_total = trunc.m_total_max.filter(|&t| (t as u64) < max_sum);

        let limit = usize::MAX as u128;
        let overflow = |dim: u128| Error::Size { dim, limit };

        let (phonon_count, ranker) = match effective_total {
            None => {
                let mut count: u128 = 1;
                let mut strides = vec![0usize; n];
                for q in (0..n).rev() {
                    if count > limit {
                        return Err(overflow(count * (n as u128 + 1)));
                    }
                    strides[q] = count as usize;
                    count *= trunc.cap(q) as u128 + 1;
                }
                if count * (n as u128 + 1) > limit {
                    return Err(overflow(count * (n as u128 + 1)));
                }
                (count as usize, PhononRanker::MixedRadix { strides })
            }
            Some(total) => {
                let budget = total as usize;
                let mut completions = vec![vec![0u128; budget + 1]; n + 1];
                completions[n].iter_mut().for_each(|c| *c = 1);
                for pos in (0..n).rev() {
                    let cap = trunc.cap(pos) as usize;
                    for b in 0..=budget {
                        let s: u128 = (0..=cap.min(b)).map(|v| completions[pos + 1][b - v]).sum();
                        completions[pos][b] = s;
                    }
                }
                let count = completions[0][budget];
                if count * (n as u128 + 1) > limit {
                    return Err(overflow(count * (n as u128 + 1)));
                }
                let completions = completions
                    .into_iter()
                    .map(|row| row.into_iter().map(|c| c as usize).collect())
                    .collect();
                (
                    count as usize,
                    PhononRanker::Capped {
                        total,
                        completions,
                    },
                )
            }
        };

        Ok(Self {
            n,
            trunc,
            phonon_count,
            dim: phonon_count * (n + 1),
            ranker,
        })
    }

    pub fn n_molecules(&self) -> usize {
        self.n
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of admissible phonon occupation vectors.
    pub fn phonon_count(&self) -> usize {
        self.phonon_count
    }

    fn check_phonons(&self, phonons: &[u32]) -> Result<()> {
        if phonons.len() != self.n {
            return Err(Error::Domain(format!(
                "phonon vector has length {}, expected {}",
                phonons.len(),
                self.n
            )));
        }
        for (q, &m) in phonons.iter().enumerate() {
            if m > self.trunc.cap(q) {
                return Err(Error::Domain(format!(
                    "phonon mode {q} holds {m} quanta, cap is {}",
                    self.trunc.cap(q)
                )));
            }
        }
        if let Some(t) = self.trunc.m_total_max {
            let s: u32 = phonons.iter().sum();
            if s > t {
                return Err(Error::Domain(format!(
                    "total phonon number {s} exceeds cap {t}"
                )));
            }
        }
        Ok(())
    }

    /// Rank of an admissible phonon vector within a sector.
    pub fn phonon_rank(&self, phonons: &[u32]) -> Result<usize> {
        self.check_phonons(phonons)?;
        Ok(self.phonon_rank_unchecked(phonons))
    }

    #[inline]
    pub(crate) fn phonon_rank_unchecked(&self, phonons: &[u32]) -> usize {
        match &self.ranker {
            PhononRanker::MixedRadix { strides } => phonons
                .iter()
                .zip(strides)
                .map(|(&m, &s)| m as usize * s)
                .sum(),
            PhononRanker::Capped { total, completions } => {
                let mut budget = *total as usize;
                let mut rank = 0;
                for (pos, &m) in phonons.iter().enumerate() {
                    for v in 0..m as usize {
                        rank += completions[pos + 1][budget - v];
                    }
                    budget -= m as usize;
                }
                rank
            }
        }
    }

    /// Inverse of [`Basis::phonon_rank`]; writes into `out` (length N).
    pub(crate) fn phonons_of_rank(&self, mut rank: usize, out: &mut [u32]) {
        match &self.ranker {
            PhononRanker::MixedRadix { strides } => {
                for (slot, &s) in out.iter_mut().zip(strides) {
                    *slot = (rank / s) as u32;
                    rank %= s;
                }
            }
            PhononRanker::Capped { total, completions } => {
                let mut budget = *total as usize;
                for (pos, slot) in out.iter_mut().enumerate() {
                    let cap = self.trunc.cap(pos) as usize;
                    let mut v = 0;
                    while v < cap.min(budget) && rank >= completions[pos + 1][budget - v] {
                        rank -= completions[pos + 1][budget - v];
                        v += 1;
                    }
                    *slot = v as u32;
                    budget -= v;
                }
            }
        }
    }

    pub fn index_of(&self, state: &BasisState) -> Result<BasisIndex> {
        let expected_cav = match state.electronic {
            Electronic::Ground => 1,
            Electronic::Excited(k) => {
                if k >= self.n {
                    return Err(Error::Domain(format!(
                        "momentum label {k} out of range 0..{}",
                        self.n
                    )));
                }
                0
            }
        };
        if state.cavity_occ != expected_cav {
            return Err(Error::Domain(format!(
                "state {:?} with cavity occupation {} is outside the one-excitation sector",
                state.electronic, state.cavity_occ
            )));
        }
        let rank = self.phonon_rank(&state.phonons)?;
        Ok(BasisIndex(
            state.electronic.sector() * self.phonon_count + rank,
        ))
    }

    pub fn state_of(&self, index: BasisIndex) -> Result<BasisState> {
        if index.0 >= self.dim {
            return Err(Error::Domain(format!(
                "index {} out of range 0..{}",
                index.0, self.dim
            )));
        }
        let sector = index.0 / self.phonon_count;
        let mut phonons = vec![0; self.n];
        self.phonons_of_rank(index.0 % self.phonon_count, &mut phonons);
        Ok(BasisState::new(Electronic::from_sector(sector), phonons))
    }

    /// Index of the state with the given electronic part and phonon rank.
    #[inline]
    pub fn compose(&self, electronic: Electronic, phonon_rank: usize) -> usize {
        electronic.sector() * self.phonon_count + phonon_rank
    }

    /// Splits an index into (electronic part, phonon rank).
    #[inline]
    pub fn split(&self, index: usize) -> (Electronic, usize) {
        (
            Electronic::from_sector(index / self.phonon_count),
            index % self.phonon_count,
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = BasisState> + '_ {
        (0..self.dim).map(move |i| self.state_of(BasisIndex(i)).expect("index in range"))
    }
}

/// All basis states in index order.
pub fn enumerate_basis(params: &ModelParams) -> Result<Vec<BasisState>> {
    let basis = Basis::new(params)?;
    Ok(basis.iter().collect())
}
