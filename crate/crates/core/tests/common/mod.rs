#![allow(dead_code)]

use faer::{Mat, Side};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn random_vector(dim: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Ascending eigenvalues of a row-major dense Hermitian matrix.
pub fn dense_eigenvalues(dim: usize, rows: &[Complex64]) -> Vec<f64> {
    let m = Mat::from_fn(dim, dim, |r, col| rows[r * dim + col]);
    let eig = m.self_adjoint_eigen(Side::Lower).expect("eigendecomposition");
    let s = eig.S();
    let mut v: Vec<f64> = (0..dim).map(|i| s[i].re).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Phonon occupation vectors over `sites` modes with total at most `total`.
pub fn occupations(sites: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, sites: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == sites {
            out.push(prefix.clone());
            return;
        }
        for n in 0..=left {
            prefix.push(n);
            rec(prefix, sites, left - n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), sites, total, &mut out);
    out
}

/// Site-basis Holstein model of independent molecules: excitation on site
/// `i` with local modes, `H = Σ_i (e_i + ω λ²)|i⟩⟨i| + ω Σ_j n_j + λω Σ_i |i⟩⟨i|(b_i + b_i†)`,
/// truncated at `total` phonons. Returns `(dim, row-major matrix)`.
pub fn site_holstein(site_energies: &[f64], lambda: f64, omega: f64, total: u32) -> (usize, Vec<Complex64>) {
    let n = site_energies.len();
    let occ = occupations(n, total);
    let index = |site: usize, v: &[u32]| site * occ.len() + occ.iter().position(|o| o == v).unwrap();
    let dim = n * occ.len();
    let mut h = vec![c(0.0, 0.0); dim * dim];
    for site in 0..n {
        for v in &occ {
            let i = index(site, v);
            let phon: u32 = v.iter().sum();
            h[i * dim + i] += c(site_energies[site] + omega * lambda * lambda + omega * phon as f64, 0.0);
            if phon < total {
                let mut up = v.clone();
                up[site] += 1;
                let j = index(site, &up);
                let amp = lambda * omega * (up[site] as f64).sqrt();
                h[i * dim + j] += c(amp, 0.0);
                h[j * dim + i] += c(amp, 0.0);
            }
        }
    }
    (dim, h)
}

/// `exp(A)` for a small real matrix by scaling and squaring a Taylor series.
pub fn expm(a: &[f64], n: usize) -> Vec<f64> {
    let norm = a.iter().map(|x| x.abs()).fold(0.0, f64::max) * n as f64;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 0.5f64.powi(squarings as i32);
    let a: Vec<f64> = a.iter().map(|x| x * scale).collect();
    let mul = |x: &[f64], y: &[f64]| {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let xik = x[i * n + k];
                if xik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    z[i * n + j] += xik * y[k * n + j];
                }
            }
        }
        z
    };
    let mut result = vec![0.0; n * n];
    let mut term = vec![0.0; n * n];
    for i in 0..n {
        result[i * n + i] = 1.0;
        term[i * n + i] = 1.0;
    }
    for k in 1..40 {
        term = mul(&term, &a);
        term.iter_mut().for_each(|x| *x /= k as f64);
        result.iter_mut().zip(&term).for_each(|(r, t)| *r += t);
    }
    for _ in 0..squarings {
        result = mul(&result, &result);
    }
    result
}

/// Matrix of `D(λ) = exp[λ(b† − b)]` on a Fock space of `levels` states.
pub fn displacement_matrix(lambda: f64, levels: usize) -> Vec<f64> {
    let mut a = vec![0.0; levels * levels];
    for n in 0..levels - 1 {
        let s = ((n + 1) as f64).sqrt() * lambda;
        a[(n + 1) * levels + n] = s; // b†
        a[n * levels + n + 1] = -s; // −b
    }
    expm(&a, levels)
}
