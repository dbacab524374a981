use crate::cooc::SparseCooc;
use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.75;

/// Positive PMI values stored as sparse rows sorted by context id.
#[derive(Clone, Debug, PartialEq)]
pub struct PpmiMatrix {
    vocab_size: usize,
    alpha: f64,
    rows: Vec<Vec<(u32, f64)>>,
}

impl PpmiMatrix {
    pub fn from_rows(vocab_size: usize, alpha: f64, mut rows: Vec<Vec<(u32, f64)>>) -> Result<Self> {
        if rows.len() != vocab_size {
            return Err(Error::Consistency(format!(
                "{} rows for vocabulary of {vocab_size}",
                rows.len()
            )));
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|e| e.0);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Consistency("duplicate context in PPMI row".into()));
            }
            if row
                .iter()
                .any(|&(c, v)| c as usize >= vocab_size || !(v > 0.0) || !v.is_finite())
            {
                return Err(Error::Consistency(
                    "PPMI entries must be finite, positive and in range".into(),
                ));
            }
        }
        Ok(PpmiMatrix {
            vocab_size,
            alpha,
            rows,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn row(&self, id: u32) -> &[(u32, f64)] {
        &self.rows[id as usize]
    }

    pub fn rows(&self) -> &[Vec<(u32, f64)>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, row: u32, col: u32) -> f64 {
        let row = &self.rows[row as usize];
        row.binary_search_by_key(&col, |e| e.0)
            .map(|i| row[i].1)
            .unwrap_or(0.0)
    }
}

/// PPMI with context distribution smoothing:
/// `max(0, log(P(w,c) / (P(w) * P_alpha(c))))`, where `P_alpha(c)` raises the
/// context marginals to `alpha` before normalizing. Non-positive entries are
/// dropped.
pub fn ppmi(cooc: &SparseCooc, alpha: f64) -> Result<PpmiMatrix> {
    if cooc.total_pairs() == 0 {
        return Err(Error::EmptyMatrix);
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidConfig(format!("alpha {alpha} outside (0, 1]")));
    }
    let n = cooc.vocab_size();
    let total = cooc.total_pairs() as f64;

    let mut row_sums = vec![0u64; n];
    let mut col_sums = vec![0u64; n];
    for &(w, c, k) in cooc.triples() {
        row_sums[w as usize] += k;
        col_sums[c as usize] += k;
    }
    let smoothed: Vec<f64> = col_sums.iter().map(|&c| (c as f64).powf(alpha)).collect();
    let smoothed_total: f64 = smoothed.iter().sum();

    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for &(w, c, k) in cooc.triples() {
        let joint = k as f64 / total;
        let p_w = row_sums[w as usize] as f64 / total;
        let p_c = smoothed[c as usize] / smoothed_total;
        let pmi = (joint / (p_w * p_c)).ln();
        if pmi > 0.0 {
            rows[w as usize].push((c, pmi));
        }
    }
    Ok(PpmiMatrix {
        vocab_size: n,
        alpha,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abab_is_log_two() {
        let cooc = SparseCooc::from_triples(2, vec![(0, 1, 3), (1, 0, 3)]).unwrap();
        let m = ppmi(&cooc, 1.0).unwrap();
        assert!((m.get(0, 1) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((m.get(1, 0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(m.get(0, 0), 0.0);
    }

    #[test]
    fn independence_is_elided() {
        let cooc = SparseCooc::from_triples(2, vec![(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)]).unwrap();
        let m = ppmi(&cooc, 1.0).unwrap();
        assert_eq!(m.nnz(), 0);
    }

    #[test]
    fn empty_and_bad_alpha() {
        let empty = SparseCooc::from_triples(3, vec![]).unwrap();
        assert!(matches!(ppmi(&empty, 0.75), Err(Error::EmptyMatrix)));
        let cooc = SparseCooc::from_triples(2, vec![(0, 1, 1), (1, 0, 1)]).unwrap();
        assert!(ppmi(&cooc, 0.0).is_err());
        assert!(ppmi(&cooc, 1.5).is_err());
    }

    #[test]
    fn from_rows_validates() {
        assert!(PpmiMatrix::from_rows(2, 1.0, vec![vec![(1, -1.0)], vec![]]).is_err());
        assert!(PpmiMatrix::from_rows(2, 1.0, vec![vec![(2, 1.0)], vec![]]).is_err());
        assert!(PpmiMatrix::from_rows(2, 1.0, vec![vec![]]).is_err());
    }
}
