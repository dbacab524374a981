mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use semtrail::cooc::SparseCooc;
use semtrail::corpus::Vocabulary;
use semtrail::embed::{
    all_top_k, cosine, ppmi, randomized_svd, top_k_similar, truncated_svd, CsrMatrix, EmbeddingModel, SvdOptions,
};

fn to_cooc(counts: &[Vec<u64>]) -> SparseCooc {
    let mut triples = Vec::new();
    for (i, row) in counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0 {
                triples.push((i as u32, j as u32, c));
            }
        }
    }
    SparseCooc::from_triples(counts.len(), triples).unwrap()
}

fn csr(m: &Dense) -> CsrMatrix {
    let rows: Vec<Vec<(u32, f64)>> = m
        .iter()
        .map(|r| r.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(j, &x)| (j as u32, x)).collect())
        .collect();
    CsrMatrix::from_rows(m[0].len(), &rows)
}

fn words(n: usize) -> Vocabulary {
    Vocabulary::from_parts((0..n).map(|i| format!("w{i:03}")).collect(), vec![1; n], 1)
}

fn max_identity_deviation(m: &DMatrix<f64>) -> f64 {
    let g = m.transpose() * m;
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

#[test]
fn ppmi_matches_dense_oracle_on_8x8() {
    let mut r = rng(8);
    for _ in 0..20 {
        let counts = random_counts(&mut r, 8, 0.6);
        let sparse = ppmi(&to_cooc(&counts), 0.75).unwrap();
        let dense = dense_ppmi(&counts, 0.75);
        for (i, row) in dense.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert!((sparse.get(i as u32, j as u32) - x).abs() <= 1e-12);
            }
        }
    }
}

proptest! {
    #[test]
    fn ppmi_entries_positive_and_match_oracle(seed in any::<u64>(), n in 1usize..=12, density in 0.1f64..1.0, alpha in 0.1f64..=1.0) {
        let counts = random_counts(&mut rng(seed), n, density);
        let sparse = ppmi(&to_cooc(&counts), alpha).unwrap();
        let dense = dense_ppmi(&counts, alpha);
        for (i, row) in sparse.rows().iter().enumerate() {
            for &(j, x) in row {
                prop_assert!(x > 0.0);
                prop_assert!((j as usize) < n);
                prop_assert!((x - dense[i][j as usize]).abs() <= 1e-12);
            }
        }
        let nnz = dense.iter().flatten().filter(|&&x| x > 0.0).count();
        prop_assert_eq!(sparse.nnz(), nnz);
    }
}

#[test]
fn svd_matches_jacobi_oracle() {
    let mut r = rng(20);
    let m = random_sparse(&mut r, 20, 20, 0.3);
    let oracle = jacobi_svd(&m);
    let full = randomized_svd(&csr(&m), 20, &SvdOptions::with_seed(3)).unwrap();

    // Reconstruction from the rank-20 factors.
    let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(full.singular_values.clone()));
    let rec = &full.u * s * full.v.transpose();
    let diff: Dense = (0..20).map(|i| (0..20).map(|j| rec[(i, j)] - m[i][j]).collect()).collect();
    assert!(frobenius(&diff) / frobenius(&m) <= 1e-6);
    for (a, b) in full.singular_values.iter().zip(&oracle.singular_values) {
        assert!((a - b).abs() <= 1e-6 * b.max(1e-300), "{a} vs {b}");
    }

    let top5 = randomized_svd(&csr(&m), 5, &SvdOptions::with_seed(3)).unwrap();
    for (a, b) in top5.singular_values.iter().zip(&oracle.singular_values) {
        assert!((a - b).abs() / b <= 1e-6, "{a} vs {b}");
    }
    assert!(max_identity_deviation(&top5.u) <= 1e-8);
    assert!(max_identity_deviation(&top5.v) <= 1e-8);
}

#[test]
fn diagonal_vectors_with_full_weight() {
    let m = vec![vec![3.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 1.0]];
    let rows: Vec<Vec<(u32, f64)>> = m
        .iter()
        .map(|r| r.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(j, &x)| (j as u32, x)).collect())
        .collect();
    let p = semtrail::embed::PpmiMatrix::from_rows(3, 1.0, rows).unwrap();
    let model = truncated_svd(&p, words(3), 0, 3, 1.0, &SvdOptions::with_seed(1)).unwrap();
    for (i, expected) in [3.0f32, 2.0, 1.0].iter().enumerate() {
        let v = model.vector(i as u32);
        for (j, &x) in v.iter().enumerate() {
            if i == j {
                assert!((x - expected).abs() < 1e-5);
            } else {
                assert!(x.abs() < 1e-5);
            }
        }
    }
}

#[test]
fn same_seed_gives_identical_bits() {
    let m = random_sparse(&mut rng(40), 40, 40, 0.2);
    let a = randomized_svd(&csr(&m), 7, &SvdOptions::with_seed(9)).unwrap();
    let b = randomized_svd(&csr(&m), 7, &SvdOptions::with_seed(9)).unwrap();
    let bits = |x: &DMatrix<f64>| x.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.u), bits(&b.u));
    assert_eq!(bits(&a.v), bits(&b.v));
    assert_eq!(a.singular_values, b.singular_values);
}

#[test]
fn half_weight_dot_products_on_symmetric_input() {
    // For symmetric PSD M = Q diag(l) Q^T, rows of U diag(s)^0.5 have M's
    // entries as their dot products.
    let mut r = rng(55);
    let n = 8;
    let b = random_sparse(&mut r, n, n, 0.6);
    let m: Dense = (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| b[i][k] * b[j][k]).sum()).collect())
        .collect();
    let f = randomized_svd(&csr(&m), n, &SvdOptions::with_seed(2)).unwrap();
    let w: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f.u[(i, j)] * f.singular_values[j].sqrt()).collect())
        .collect();
    for i in 0..n {
        for j in 0..n {
            let dot: f64 = (0..n).map(|k| w[i][k] * w[j][k]).sum();
            assert!((dot - m[i][j]).abs() <= 1e-8 * frobenius(&m), "({i},{j}) {dot} vs {}", m[i][j]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn svd_factors_are_orthonormal(seed in any::<u64>(), rows in 2usize..30, cols in 2usize..30, frac in 0.1f64..=1.0) {
        let m = random_sparse(&mut rng(seed), rows, cols, 0.3);
        let d = ((rows.min(cols) as f64 * frac).ceil() as usize).max(1);
        let f = randomized_svd(&csr(&m), d, &SvdOptions::with_seed(seed)).unwrap();
        let oracle = singular_values(&m);
        for (a, b) in f.singular_values.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-6 * b.max(oracle[0] * 1e-6));
        }
        // Zero singular values leave their vectors unconstrained in length.
        let positive = f.singular_values.iter().filter(|&&s| s > oracle[0] * 1e-10).count();
        let u = f.u.columns(0, positive).into_owned();
        let v = f.v.columns(0, positive).into_owned();
        prop_assert!(max_identity_deviation(&u) <= 1e-8);
        prop_assert!(max_identity_deviation(&v) <= 1e-8);
    }

    #[test]
    fn cosine_symmetric_and_scale_invariant(u in prop::collection::vec(-10.0f32..10.0, 6), v in prop::collection::vec(-10.0f32..10.0, 6), a in 0.01f32..100.0) {
        let c = cosine(&u, &v).unwrap();
        prop_assert_eq!(c, cosine(&v, &u).unwrap());
        prop_assert!((-1.0..=1.0).contains(&c));
        let scaled: Vec<f32> = u.iter().map(|x| x * a).collect();
        prop_assert!((cosine(&scaled, &v).unwrap() - c).abs() < 1e-5);
    }
}

fn random_model(seed: u64, n: usize, dim: usize) -> EmbeddingModel {
    let mut r = rng(seed);
    let vectors = (0..n * dim).map(|_| r.random_range(-1.0f32..1.0)).collect();
    EmbeddingModel::new(0, words(n), dim, vectors).unwrap()
}

#[test]
fn top_k_matches_exhaustive_scan() {
    let model = random_model(50, 50, 8);
    for id in 0..50u32 {
        let w = model.vocab().word(id).to_string();
        let mut scan: Vec<(String, f64)> = (0..50u32)
            .filter(|&j| j != id)
            .map(|j| (model.vocab().word(j).to_string(), cosine64(model.vector(id), model.vector(j))))
            .collect();
        scan.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        scan.truncate(5);
        let got = top_k_similar(&w, &model, 5, true).unwrap();
        let names = |l: &[(String, f64)]| l.iter().map(|x| x.0.clone()).collect::<Vec<_>>();
        assert_eq!(names(&got), names(&scan));
        for (g, s) in got.iter().zip(&scan) {
            assert!((g.1 - s.1).abs() < 1e-12);
        }
    }
}

#[test]
fn top_k_edge_cases() {
    let model = EmbeddingModel::new(0, words(3), 2, vec![1.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
    assert_eq!(top_k_similar("w000", &model, 1, true).unwrap(), vec![("w001".to_string(), 1.0)]);
    assert_eq!(top_k_similar("w000", &model, 10, true).unwrap().len(), 2);
    assert_eq!(top_k_similar("w000", &model, 10, false).unwrap().len(), 3);
    assert!(top_k_similar("nope", &model, 1, true).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]
    #[test]
    fn ranking_invariant_under_rescaling(seed in any::<u64>(), scale in 0.001f32..1000.0) {
        let model = random_model(seed, 20, 4);
        let scaled = EmbeddingModel::new(0, words(20), 4, model.vectors().iter().map(|x| x * scale).collect()).unwrap();
        let ids = |m: &EmbeddingModel| all_top_k(m, 5).into_iter().map(|l| l.into_iter().map(|e| e.0).collect::<Vec<_>>()).collect::<Vec<_>>();
        // f32 rounding may swap near-ties, so compare neighbor sets whose
        // cosines are separated from their rank neighbors.
        let a = all_top_k(&model, 6);
        let b = ids(&scaled);
        for (la, lb) in a.iter().zip(&b) {
            for r in 0..5 {
                let gap = (la[r].1 - la[r + 1].1).abs().min(if r > 0 { (la[r - 1].1 - la[r].1).abs() } else { 1.0 });
                if gap > 1e-5 {
                    prop_assert_eq!(la[r].0, lb[r]);
                }
            }
        }
    }
}
