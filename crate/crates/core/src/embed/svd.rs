//! Randomized truncated SVD over compressed sparse rows.
//!
//! Range finding with Gaussian test vectors, oversampling and subspace
//! (power) iterations, followed by an exact SVD of the small projected
//! matrix. Iteration stops once the Ritz singular values settle, but never
//! before `min_power_iters`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::par::*;

use super::PpmiMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Rows of `(column, value)`; entries within a row must be sorted and unique.
    pub fn from_rows(ncols: usize, rows: &[Vec<(u32, f64)>]) -> Self {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in rows {
            for &(c, v) in row {
                debug_assert!((c as usize) < ncols);
                indices.push(c);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            nrows: rows.len(),
            ncols,
            indptr,
            indices,
            values,
        }
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let rows: Vec<Vec<(u32, f64)>> = (0..m.nrows())
            .map(|i| {
                (0..m.ncols())
                    .filter(|&j| m[(i, j)] != 0.0)
                    .map(|j| (j as u32, m[(i, j)]))
                    .collect()
            })
            .collect();
        Self::from_rows(m.ncols(), &rows)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                m[(i, self.indices[k] as usize)] = self.values[k];
            }
        }
        m
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.indices {
            counts[c as usize + 1] += 1;
        }
        for i in 0..self.ncols {
            counts[i + 1] += counts[i];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0u32; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.nrows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                let c = self.indices[k] as usize;
                let slot = next[c];
                indices[slot] = i as u32;
                values[slot] = self.values[k];
                next[c] += 1;
            }
        }
        CsrMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            indptr,
            indices,
            values,
        }
    }

    /// `self * x` for a dense column-major `x`.
    pub fn mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(self.ncols, x.nrows(), "inner dimensions differ");
        let k = x.ncols();
        // Row-major copy of x so each output row reads contiguous memory.
        let x_rows: Vec<f64> = x.transpose().as_slice().to_vec();
        let mut out = vec![0.0; self.nrows * k];
        if k > 0 {
            out.par_chunks_mut(k).enumerate().for_each(|(i, row)| {
                for p in self.indptr[i]..self.indptr[i + 1] {
                    let v = self.values[p];
                    let src = &x_rows[self.indices[p] as usize * k..][..k];
                    for (o, s) in row.iter_mut().zip(src) {
                        *o += v * s;
                    }
                }
            });
        }
        DMatrix::from_row_slice(self.nrows, k, &out)
    }
}

impl From<&PpmiMatrix> for CsrMatrix {
    fn from(m: &PpmiMatrix) -> Self {
        CsrMatrix::from_rows(m.vocab_size(), m.rows())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvdOptions {
    pub oversample: usize,
    pub min_power_iters: usize,
    pub max_power_iters: usize,
    /// Relative change in Ritz singular values below which iteration stops.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SvdOptions {
    fn default() -> Self {
        SvdOptions {
            oversample: 10,
            min_power_iters: 4,
            max_power_iters: 200,
            tolerance: 1e-13,
            seed: 0,
        }
    }
}

impl SvdOptions {
    pub fn with_seed(seed: u64) -> Self {
        SvdOptions {
            seed,
            ..Self::default()
        }
    }
}

/// Rank-`k` factors `A ~ U diag(s) V^T`, singular values descending.
#[derive(Clone, Debug, PartialEq)]
pub struct SvdFactors {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
    pub power_iters: usize,
}

fn orthonormal_basis(y: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = y.qr();
    (qr.q(), qr.r())
}

fn ritz_values(r: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = r.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn settled(prev: &[f64], next: &[f64], rank: usize, tol: f64) -> bool {
    let scale = next.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    prev.iter()
        .zip(next)
        .take(rank)
        .all(|(a, b)| (a - b).abs() <= tol * scale.max(b.abs()))
}

pub fn randomized_svd(a: &CsrMatrix, rank: usize, opts: &SvdOptions) -> Result<SvdFactors> {
    let max_rank = a.nrows().min(a.ncols());
    if rank == 0 || rank > max_rank {
        return Err(Error::InvalidDimension {
            dim: rank,
            max: max_rank,
        });
    }
    let samples = (rank + opts.oversample).min(max_rank);
    let at = a.transpose();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let omega = DMatrix::from_fn(a.ncols(), samples, |_, _| {
        let x: f64 = StandardNormal.sample(&mut rng);
        x
    });
    let (mut q, r) = orthonormal_basis(a.mul_dense(&omega));
    let mut ritz = ritz_values(&r);

    let mut iters = 0;
    while iters < opts.max_power_iters {
        let (z, _) = orthonormal_basis(at.mul_dense(&q));
        let (q_next, r) = orthonormal_basis(a.mul_dense(&z));
        q = q_next;
        iters += 1;
        let next = ritz_values(&r);
        let done = iters >= opts.min_power_iters && settled(&ritz, &next, rank, opts.tolerance);
        ritz = next;
        if done {
            break;
        }
    }

    // B = Q^T A is samples x ncols; factor its transpose A^T Q instead so the
    // thin SVD has the tall shape.
    let bt = at.mul_dense(&q);
    let svd = bt.svd(true, true);
    let v_full = svd.u.expect("u requested");
    let w_full = svd.v_t.expect("v_t requested").transpose();
    let s_full = svd.singular_values;

    let mut order: Vec<usize> = (0..s_full.len()).collect();
    order.sort_by(|&i, &j| s_full[j].total_cmp(&s_full[i]).then(i.cmp(&j)));
    order.truncate(rank);

    let u_small = DMatrix::from_fn(w_full.nrows(), rank, |i, j| w_full[(i, order[j])]);
    let mut u = &q * u_small;
    let mut v = DMatrix::from_fn(v_full.nrows(), rank, |i, j| v_full[(i, order[j])]);
    let singular_values: Vec<f64> = order.iter().map(|&i| s_full[i]).collect();

    fix_signs(&mut u, &mut v);
    Ok(SvdFactors {
        u,
        singular_values,
        v,
        power_iters: iters,
    })
}

/// Flips each singular vector pair so the largest-magnitude entry of the
/// left vector is non-negative (first index wins ties).
pub fn fix_signs(u: &mut DMatrix<f64>, v: &mut DMatrix<f64>) {
    for j in 0..u.ncols() {
        let mut best = 0usize;
        for i in 1..u.nrows() {
            if u[(i, j)].abs() > u[(best, j)].abs() {
                best = i;
            }
        }
        if u.nrows() > 0 && u[(best, j)] < 0.0 {
            u.column_mut(j).neg_mut();
            v.column_mut(j).neg_mut();
        }
    }
}
