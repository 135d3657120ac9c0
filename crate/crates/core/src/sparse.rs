//! Compressed sparse Hermitian matrices.
//!
//! Only the diagonal and the strict upper triangle are stored (CSR). The
//! lower triangle is the conjugate transpose of the stored part and is
//! reached through a per-row list of source positions, so every row of
//! `H·v` can be formed independently. Rows are summed in a fixed order,
//! which makes the product bit-identical for any thread count.

use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Rows per parallel work item in [`SparseHermitian::apply`].
const ROW_CHUNK: usize = 4096;

#[derive(Debug, Clone)]
pub struct SparseHermitian {
    dim: usize,
    diag: Vec<f64>,
    upper_ptr: Vec<usize>,
    upper_col: Vec<usize>,
    upper_val: Vec<Complex64>,
    // Row i of the strict lower triangle: columns and the positions of the
    // mirrored upper entries.
    lower_ptr: Vec<usize>,
    lower_col: Vec<usize>,
    lower_src: Vec<usize>,
}

/// Accumulates `⟨row|H|col⟩` entries with `row <= col`.
#[derive(Debug, Clone)]
pub struct HermitianBuilder {
    dim: usize,
    diag: Vec<f64>,
    triplets: Vec<(usize, usize, Complex64)>,
}

impl HermitianBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            diag: vec![0.0; dim],
            triplets: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_diag(&mut self, i: usize, v: f64) {
        self.diag[i] += v;
    }

    /// Adds `⟨row|H|col⟩ = v` (and implicitly its Hermitian mirror). Diagonal
    /// entries keep only the real part.
    pub fn add(&mut self, row: usize, col: usize, v: Complex64) {
        use std::cmp::Ordering::*;
        match row.cmp(&col) {
            Equal => self.diag[row] += v.re,
            Less => self.triplets.push((row, col, v)),
            Greater => self.triplets.push((col, row, v.conj())),
        }
    }

    pub fn build(mut self) -> SparseHermitian {
        self.triplets.sort_unstable_by_key(|t| (t.0, t.1));
        let mut upper_ptr = vec![0usize; self.dim + 1];
        let mut upper_col = Vec::with_capacity(self.triplets.len());
        let mut upper_val: Vec<Complex64> = Vec::with_capacity(self.triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.triplets {
            if last == Some((r, c)) {
                *upper_val.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            upper_ptr[r + 1] += 1;
            upper_col.push(c);
            upper_val.push(v);
        }
        for i in 0..self.dim {
            upper_ptr[i + 1] += upper_ptr[i];
        }

        let mut lower_ptr = vec![0usize; self.dim + 1];
        for &c in &upper_col {
            lower_ptr[c + 1] += 1;
        }
        for i in 0..self.dim {
            lower_ptr[i + 1] += lower_ptr[i];
        }
        let mut fill = lower_ptr.clone();
        let mut lower_col = vec![0usize; upper_col.len()];
        let mut lower_src = vec![0usize; upper_col.len()];
        for r in 0..self.dim {
            for pos in upper_ptr[r]..upper_ptr[r + 1] {
                let c = upper_col[pos];
                lower_col[fill[c]] = r;
                lower_src[fill[c]] = pos;
                fill[c] += 1;
            }
        }

        SparseHermitian {
            dim: self.dim,
            diag: self.diag,
            upper_ptr,
            upper_col,
            upper_val,
            lower_ptr,
            lower_col,
            lower_src,
        }
    }
}

impl SparseHermitian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored entries: diagonal plus strict upper triangle.
    pub fn nnz(&self) -> usize {
        self.dim + self.upper_val.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Stored entries per row (diagonal plus upper).
    pub fn row_extent(&self, row: usize) -> usize {
        1 + self.upper_ptr[row + 1] - self.upper_ptr[row]
    }

    /// Strict upper-triangle entries `(row, col, ⟨row|H|col⟩)` in row-major order.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.upper_ptr[r]..self.upper_ptr[r + 1])
                .map(move |p| (r, self.upper_col[p], self.upper_val[p]))
        })
    }

    /// `⟨row|H|col⟩` for any pair, zero when not stored.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        if row == col {
            return Complex64::new(self.diag[row], 0.0);
        }
        let (r, c, conj) = if row < col {
            (row, col, false)
        } else {
            (col, row, true)
        };
        let cols = &self.upper_col[self.upper_ptr[r]..self.upper_ptr[r + 1]];
        match cols.binary_search(&c) {
            Ok(k) => {
                let v = self.upper_val[self.upper_ptr[r] + k];
                if conj {
                    v.conj()
                } else {
                    v
                }
            }
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    #[inline]
    fn row_product(&self, i: usize, x: &[Complex64]) -> Complex64 {
        let mut acc = x[i] * self.diag[i];
        for p in self.upper_ptr[i]..self.upper_ptr[i + 1] {
            acc += self.upper_val[p] * x[self.upper_col[p]];
        }
        for p in self.lower_ptr[i]..self.lower_ptr[i + 1] {
            acc += self.upper_val[self.lower_src[p]].conj() * x[self.lower_col[p]];
        }
        acc
    }

    /// `y = H x`.
    pub fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Length {
                expected: self.dim,
                got: x.len(),
            });
        }
        if y.len() != self.dim {
            return Err(Error::Length {
                expected: self.dim,
                got: y.len(),
            });
        }
        if self.dim <= ROW_CHUNK {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = self.row_product(i, x);
            }
        } else {
            y.par_chunks_mut(ROW_CHUNK)
                .enumerate()
                .for_each(|(chunk, ys)| {
                    let base = chunk * ROW_CHUNK;
                    for (off, yi) in ys.iter_mut().enumerate() {
                        *yi = self.row_product(base + off, x);
                    }
                });
        }
        Ok(())
    }

    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply_into(x, &mut y)?;
        Ok(y)
    }

    /// `⟨x|H|x⟩`.
    pub fn expectation(&self, x: &[Complex64]) -> Result<Complex64> {
        let hx = self.apply(x)?;
        Ok(x.iter().zip(&hx).map(|(a, b)| a.conj() * b).sum())
    }

    /// Frobenius norm of the full (Hermitian-completed) matrix.
    pub fn frobenius_norm(&self) -> f64 {
        let d: f64 = self.diag.iter().map(|v| v * v).sum();
        let u: f64 = self.upper_val.iter().map(|v| v.norm_sqr()).sum();
        (d + 2.0 * u).sqrt()
    }

    /// Row-major dense copy of the full matrix.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.dim;
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            m[i * n + i] = Complex64::new(self.diag[i], 0.0);
        }
        for (r, c, v) in self.upper_entries() {
            m[r * n + c] = v;
            m[c * n + r] = v.conj();
        }
        m
    }

    /// Writes the little-endian dump:
    ///
    /// ```text
    /// u64 dim
    /// u64 nnz                       (diagonal + strict upper entries)
    /// nnz × { u64 row, u64 col, f64 re, f64 im }   row <= col, row-major
    /// ```
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.dim as u64).to_le_bytes())?;
        w.write_all(&(self.nnz() as u64).to_le_bytes())?;
        let mut emit = |r: usize, c: usize, v: Complex64| -> std::io::Result<()> {
            w.write_all(&(r as u64).to_le_bytes())?;
            w.write_all(&(c as u64).to_le_bytes())?;
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())
        };
        for r in 0..self.dim {
            emit(r, r, Complex64::new(self.diag[r], 0.0))?;
            for p in self.upper_ptr[r]..self.upper_ptr[r + 1] {
                emit(r, self.upper_col[p], self.upper_val[p])?;
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut b8 = [0u8; 8];
        let mut read_u64 = |r: &mut R| -> Result<u64> {
            r.read_exact(&mut b8)?;
            Ok(u64::from_le_bytes(b8))
        };
        let dim = read_u64(&mut r)? as usize;
        let nnz = read_u64(&mut r)? as usize;
        let mut builder = HermitianBuilder::new(dim);
        for _ in 0..nnz {
            let row = read_u64(&mut r)? as usize;
            let col = read_u64(&mut r)? as usize;
            let re = f64::from_bits(read_u64(&mut r)?);
            let im = f64::from_bits(read_u64(&mut r)?);
            if row >= dim || col >= dim || row > col {
                return Err(Error::Io(format!(
                    "malformed entry ({row}, {col}) for dimension {dim}"
                )));
            }
            builder.add(row, col, Complex64::new(re, im));
        }
        Ok(builder.build())
    }
}
