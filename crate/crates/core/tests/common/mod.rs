//! Reference implementations used as test oracles. They share no code with
//! the library: plain nested vectors, straightforward loops.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense PPMI straight from the definition.
pub fn dense_ppmi(counts: &[Vec<u64>], alpha: f64) -> Dense {
    let n = counts.len();
    let total: f64 = counts.iter().flatten().map(|&c| c as f64).sum();
    let row: Vec<f64> = counts.iter().map(|r| r.iter().map(|&c| c as f64).sum()).collect();
    let col: Vec<f64> = (0..n).map(|j| counts.iter().map(|r| r[j] as f64).sum()).collect();
    let col_alpha: Vec<f64> = col.iter().map(|c| c.powf(alpha)).collect();
    let col_alpha_total: f64 = col_alpha.iter().sum();
    let mut out = vec![vec![0.0; n]; n];
    for w in 0..n {
        for c in 0..n {
            if counts[w][c] == 0 {
                continue;
            }
            let pwc = counts[w][c] as f64 / total;
            let pw = row[w] / total;
            let pc = col_alpha[c] / col_alpha_total;
            out[w][c] = (pwc / (pw * pc)).ln().max(0.0);
        }
    }
    out
}

/// Random square count matrix with roughly `density` non-zero cells.
pub fn random_counts<R: Rng>(rng: &mut R, n: usize, density: f64) -> Vec<Vec<u64>> {
    let mut m = vec![vec![0u64; n]; n];
    for row in m.iter_mut() {
        for cell in row.iter_mut() {
            if rng.random::<f64>() < density {
                *cell = rng.random_range(1..50);
            }
        }
    }
    if m.iter().flatten().all(|&c| c == 0) {
        m[0][n - 1] = 1;
    }
    m
}

/// Random sparse matrix with non-negative entries, like a PPMI matrix.
pub fn random_sparse<R: Rng>(rng: &mut R, rows: usize, cols: usize, density: f64) -> Dense {
    let mut m = vec![vec![0.0; cols]; rows];
    for row in m.iter_mut() {
        for cell in row.iter_mut() {
            if rng.random::<f64>() < density {
                *cell = rng.random_range(0.01..4.0);
            }
        }
    }
    m[0][0] += 1.0;
    m
}

pub struct JacobiSvd {
    /// Descending.
    pub singular_values: Vec<f64>,
    /// Columns are left singular vectors, same order.
    pub u: Dense,
    pub v: Dense,
}

/// One-sided Jacobi SVD of an `m x n` matrix with `m >= n`.
pub fn jacobi_svd(a: &Dense) -> JacobiSvd {
    let m = a.len();
    let n = a[0].len();
    assert!(m >= n, "oracle expects a tall matrix");
    let mut w = a.clone();
    let mut v: Dense = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for row in &w {
                    alpha += row[p] * row[p];
                    beta += row[q] * row[q];
                    gamma += row[p] * row[q];
                }
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for row in w.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
                for row in v.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| w.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let u = (0..m)
        .map(|i| order.iter().map(|&j| if norms[j] > 0.0 { w[i][j] / norms[j] } else { 0.0 }).collect())
        .collect();
    let v = (0..n).map(|i| order.iter().map(|&j| v[i][j]).collect()).collect();
    JacobiSvd {
        singular_values: order.iter().map(|&j| norms[j]).collect(),
        u,
        v,
    }
}

/// Singular values of any matrix (transposes wide input).
pub fn singular_values(a: &Dense) -> Vec<f64> {
    if a.len() >= a[0].len() {
        jacobi_svd(a).singular_values
    } else {
        jacobi_svd(&transpose(a)).singular_values
    }
}

pub fn transpose(a: &Dense) -> Dense {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn frobenius(a: &Dense) -> f64 {
    a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn cosine64(u: &[f32], v: &[f32]) -> f64 {
    let mut uv = 0.0;
    let mut uu = 0.0;
    let mut vv = 0.0;
    for (&a, &b) in u.iter().zip(v) {
        let (a, b) = (f64::from(a), f64::from(b));
        uv += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        0.0
    } else {
        uv / (uu.sqrt() * vv.sqrt())
    }
}

/// Induced VAD by direct evaluation of the weighted mean over seeds given as
/// `(vector, [v, a, d])`; `None` when no seed has positive similarity.
pub fn weighted_vad(target: &[f32], seeds: &[(&[f32], [f64; 3])], min_sim: f64) -> Option<[f64; 3]> {
    let mut out = [0.0; 3];
    for (dim, slot) in out.iter_mut().enumerate() {
        let mut num = 0.0;
        let mut den = 0.0;
        for (vec, vad) in seeds {
            let sim = cosine64(target, vec);
            if sim > min_sim && sim > 0.0 {
                num += sim * vad[dim];
                den += sim;
            }
        }
        if den == 0.0 {
            return None;
        }
        *slot = num / den;
    }
    Some(out)
}

/// Ordered window pairs by direct scan of each document.
pub fn brute_force_pairs(docs: &[Vec<String>], known: &dyn Fn(&str) -> bool, window: usize) -> std::collections::BTreeMap<(String, String), u64> {
    let mut out = std::collections::BTreeMap::new();
    for doc in docs {
        for i in 0..doc.len() {
            for j in 0..doc.len() {
                let dist = i.abs_diff(j);
                if dist == 0 || dist > window || !known(&doc[i]) || !known(&doc[j]) {
                    continue;
                }
                *out.entry((doc[i].clone(), doc[j].clone())).or_insert(0) += 1;
            }
        }
    }
    out
}
