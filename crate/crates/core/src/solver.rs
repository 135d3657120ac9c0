//! Lowest eigenpairs of a [`SparseHermitian`].
//!
//! Small problems go to a dense Hermitian eigensolver. Larger ones use a
//! thick-restart Krylov iteration: the Krylov basis is orthogonalized in
//! full (classical Gram–Schmidt, two passes), the projected matrix is
//! diagonalized densely, and on restart the wanted Ritz vectors plus the
//! current residual direction seed the next cycle. Vector kernels run
//! serially and the matvec sums each row in a fixed order, so results do
//! not depend on the thread count.
//!
//! A single start vector only sees one copy of an exactly degenerate
//! eigenvalue; use the dense path when whole degenerate spaces are needed.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::diag::Diag;
use faer::{Mat, Par};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::SparseHermitian;

pub const DEFAULT_DENSE_THRESHOLD: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dense,
    Krylov,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverOptions {
    pub n_pairs: usize,
    /// Residual tolerance on `‖Hv − Ev‖` for unit `v`.
    pub tol: f64,
    /// Maximum number of matrix-vector products.
    pub max_iter: usize,
    pub seed: u64,
    pub dense_threshold: usize,
    /// Krylov basis size per cycle; `None` picks `max(2·n_pairs + 20, 40)`.
    pub krylov_dim: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            n_pairs: 1,
            tol: 1e-9,
            max_iter: 20_000,
            seed: 0,
            dense_threshold: DEFAULT_DENSE_THRESHOLD,
            krylov_dim: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<Complex64>>,
    pub residuals: Vec<f64>,
    /// Matrix-vector products used (0 for the dense path).
    pub iterations: usize,
    pub converged: bool,
    pub method: Method,
    pub seed: u64,
}

impl EigenResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// The `n_pairs` algebraically smallest eigenpairs with the default dense
/// threshold.
pub fn lowest_eigenpairs(
    h: &SparseHermitian,
    n_pairs: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<EigenResult> {
    lowest_eigenpairs_with(
        h,
        &SolverOptions {
            n_pairs,
            tol,
            max_iter,
            seed,
            ..SolverOptions::default()
        },
    )
}

pub fn lowest_eigenpairs_with(h: &SparseHermitian, opts: &SolverOptions) -> Result<EigenResult> {
    if opts.n_pairs == 0 {
        return Err(Error::Parameter("n_pairs must be >= 1".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {}", opts.tol)));
    }
    if h.dim() == 0 {
        return Err(Error::Parameter("empty matrix".into()));
    }
    if opts.n_pairs > h.dim() {
        return Err(Error::Parameter(format!(
            "requested {} eigenpairs of a {}-dimensional matrix",
            opts.n_pairs,
            h.dim()
        )));
    }
    if h.dim() <= opts.dense_threshold {
        dense(h, opts)
    } else {
        krylov(h, opts)
    }
}

#[inline]
fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

#[inline]
fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn residual_norm(h: &SparseHermitian, v: &[Complex64], theta: f64) -> Result<f64> {
    let hv = h.apply(v)?;
    Ok(hv
        .iter()
        .zip(v)
        .map(|(a, b)| (a - b * theta).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Eigen-decomposition of a small dense Hermitian matrix, ascending.
/// Only the lower triangle of `m` is read. Runs sequentially so results do
/// not depend on the thread pool.
fn sorted_eigen(m: &Mat<Complex64>) -> Result<(Vec<f64>, Mat<Complex64>)> {
    let n = m.nrows();
    let mut s = Diag::<Complex64>::zeros(n);
    let mut u = Mat::<Complex64>::zeros(n, n);
    let scratch = evd::self_adjoint_evd_scratch::<Complex64>(n, ComputeEigenvectors::Yes, Par::Seq, Default::default());
    evd::self_adjoint_evd(
        m.as_ref(),
        s.as_mut(),
        Some(u.as_mut()),
        Par::Seq,
        MemStack::new(&mut MemBuffer::new(scratch)),
        Default::default(),
    )
    .map_err(|e| Error::Domain(format!("dense eigendecomposition failed: {e:?}")))?;
    let s = s.column_vector();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
    let values = order.iter().map(|&i| s[i].re).collect();
    let vectors = Mat::from_fn(n, n, |r, c| u[(r, order[c])]);
    Ok((values, vectors))
}

fn dense(h: &SparseHermitian, opts: &SolverOptions) -> Result<EigenResult> {
    let n = h.dim();
    let d = h.to_dense();
    let m = Mat::from_fn(n, n, |r, c| d[r * n + c]);
    let (values, vectors) = sorted_eigen(&m)?;
    let mut eigenvalues = Vec::with_capacity(opts.n_pairs);
    let mut eigenvectors = Vec::with_capacity(opts.n_pairs);
    let mut residuals = Vec::with_capacity(opts.n_pairs);
    for i in 0..opts.n_pairs {
        let v: Vec<Complex64> = (0..n).map(|r| vectors[(r, i)]).collect();
        residuals.push(residual_norm(h, &v, values[i])?);
        eigenvalues.push(values[i]);
        eigenvectors.push(v);
    }
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if worst > opts.tol {
        return Err(Error::NotConverged {
            iterations: 0,
            best_residual: worst,
            tol: opts.tol,
        });
    }
    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
        residuals,
        iterations: 0,
        converged: true,
        method: Method::Dense,
        seed: opts.seed,
    })
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

/// Orthogonalizes `w` against `basis` twice; returns the coefficients removed.
fn orthogonalize(basis: &[Vec<Complex64>], w: &mut [Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.len()];
    for _ in 0..2 {
        let c: Vec<Complex64> = basis.iter().map(|v| dot(v, w)).collect();
        for (v, ci) in basis.iter().zip(&c) {
            axpy(-ci, v, w);
        }
        for (acc, ci) in coeffs.iter_mut().zip(c) {
            *acc += ci;
        }
    }
    coeffs
}

fn krylov(h: &SparseHermitian, opts: &SolverOptions) -> Result<EigenResult> {
    let dim = h.dim();
    let nev = opts.n_pairs;
    let m = opts
        .krylov_dim
        .unwrap_or((2 * nev + 20).max(40))
        .max(nev + 2)
        .min(dim);
    let keep_target = (nev + (m - nev) / 2).min(m.saturating_sub(2)).max(nev.min(m - 1));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
    basis.push(random_unit(dim, &mut rng));
    let mut proj = Mat::<Complex64>::zeros(m, m);
    let mut filled = 0usize;
    let mut matvecs = 0usize;
    let mut best = f64::INFINITY;
    let scale = h.frobenius_norm().max(1.0);

    loop {
        // Extend the Krylov basis to m vectors.
        let mut tail = Vec::new();
        while filled < m {
            let j = filled;
            let mut w = h.apply(&basis[j])?;
            matvecs += 1;
            let c = orthogonalize(&basis, &mut w);
            for (i, ci) in c.iter().enumerate().take(j + 1) {
                proj[(i, j)] = *ci;
                proj[(j, i)] = ci.conj();
            }
            proj[(j, j)] = Complex64::new(proj[(j, j)].re, 0.0);
            filled += 1;
            if filled == m {
                tail = w;
                break;
            }
            let beta = norm(&w);
            if beta <= 1e-12 * scale {
                // Invariant subspace: continue from a fresh orthogonal direction.
                let mut fresh = random_unit(dim, &mut rng);
                orthogonalize(&basis, &mut fresh);
                let nf = norm(&fresh);
                fresh.iter_mut().for_each(|x| *x /= nf);
                basis.push(fresh);
            } else {
                w.iter_mut().for_each(|x| *x /= beta);
                basis.push(w);
            }
        }
        let beta_tail = if filled == dim { 0.0 } else { norm(&tail) };

        let (theta, s) = sorted_eigen(&proj)?;
        let estimates: Vec<f64> = (0..nev).map(|i| beta_tail * s[(m - 1, i)].norm()).collect();
        let worst = estimates.iter().cloned().fold(0.0, f64::max);
        best = best.min(worst);

        let ritz = |i: usize| -> Vec<Complex64> {
            let mut y = vec![Complex64::new(0.0, 0.0); dim];
            for (j, v) in basis.iter().enumerate().take(m) {
                axpy(s[(j, i)], v, &mut y);
            }
            y
        };

        if worst <= opts.tol {
            let mut vectors = Vec::with_capacity(nev);
            let mut residuals = Vec::with_capacity(nev);
            for i in 0..nev {
                let mut y = ritz(i);
                let ny = norm(&y);
                y.iter_mut().for_each(|x| *x /= ny);
                residuals.push(residual_norm(h, &y, theta[i])?);
                matvecs += 1;
                vectors.push(y);
            }
            let true_worst = residuals.iter().cloned().fold(0.0, f64::max);
            best = best.min(true_worst);
            if true_worst <= opts.tol {
                return Ok(EigenResult {
                    eigenvalues: theta[..nev].to_vec(),
                    eigenvectors: vectors,
                    residuals,
                    iterations: matvecs,
                    converged: true,
                    method: Method::Krylov,
                    seed: opts.seed,
                });
            }
        }

        if matvecs >= opts.max_iter {
            return Err(Error::NotConverged {
                iterations: matvecs,
                best_residual: best,
                tol: opts.tol,
            });
        }

        // Thick restart: wanted Ritz vectors plus the normalized residual.
        let keep = keep_target;
        let mut next: Vec<Vec<Complex64>> = (0..keep).map(ritz).collect();
        let mut f = if beta_tail > 1e-14 * scale {
            tail
        } else {
            random_unit(dim, &mut rng)
        };
        orthogonalize(&next, &mut f);
        let nf = norm(&f);
        f.iter_mut().for_each(|x| *x /= nf);
        next.push(f);
        basis = next;
        proj.fill(Complex64::new(0.0, 0.0));
        for (i, &t) in theta.iter().enumerate().take(keep) {
            proj[(i, i)] = Complex64::new(t, 0.0);
        }
        filled = keep;
    }
}
