//! Harmonic-oscillator kernels.
//!
//! The displacement operator is `D(λ) = exp[λ(b† − b)]` with real λ, so
//! `D(λ)† b D(λ) = b + λ` and `D(λ)|0⟩` is the coherent state `|λ⟩`.

/// Associated Laguerre polynomial `L_n^{(alpha)}(x)` by the three-term
/// recurrence in `n`.
pub fn laguerre(n: u32, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `⟨m|D(λ)|n⟩`.
///
/// For `m ≥ n` this is `e^{−λ²/2} √(n!/m!) λ^{m−n} L_n^{(m−n)}(λ²)`; the
/// `m < n` case follows from `⟨m|D(λ)|n⟩ = (−1)^{m−n} ⟨n|D(λ)|m⟩`.
pub fn displacement_element(m: u32, n: u32, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if m == n { 1.0 } else { 0.0 };
    }
    if m < n {
        let sign = if (n - m).is_multiple_of(2) { 1.0 } else { -1.0 };
        return sign * displacement_element(n, m, lambda);
    }
    let x = lambda * lambda;
    // √(n!/m!) λ^{m−n} as a running product keeps intermediate values bounded.
    let mut prefactor = (-0.5 * x).exp();
    for j in (n + 1)..=m {
        prefactor *= lambda / (j as f64).sqrt();
    }
    prefactor * laguerre(n, (m - n) as f64, x)
}

/// Franck–Condon factor `|⟨m|D(λ_rel)|n⟩|²` between vibrational levels of two
/// oscillators whose equilibria differ by the relative displacement `λ_rel`.
pub fn fc_factor(m: u32, n: u32, lambda_rel: f64) -> f64 {
    let d = displacement_element(m, n, lambda_rel);
    d * d
}

/// Thermal populations `η_m ∝ exp(−m ω_v / k_B T)` for `m = 0..=m_max`.
pub fn boltzmann_weights(kbt: f64, omega_v: f64, m_max: u32) -> Vec<f64> {
    let len = m_max as usize + 1;
    if kbt <= 0.0 {
        let mut w = vec![0.0; len];
        w[0] = 1.0;
        return w;
    }
    let beta = omega_v / kbt;
    let raw: Vec<f64> = (0..len).map(|m| (-beta * m as f64).exp()).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / z).collect()
}

/// Column `n` of the displacement matrix, `⟨m|D(λ)|n⟩` for `m = 0..=m_max`.
pub fn displaced_column(n: u32, lambda: f64, m_max: u32) -> Vec<f64> {
    (0..=m_max)
        .map(|m| displacement_element(m, n, lambda))
        .collect()
}
