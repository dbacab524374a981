use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tower::ServiceExt;

use semtrail::corpus::{Language, LemmaTable, TimeSlice, Vocabulary};
use semtrail::embed::{all_top_k, top_k_similar, EmbeddingModel};
use semtrail::emotion::{zscale_series, VadScore};
use semtrail::store::{CorpusInfo, CorpusParams, ModelStore, SliceArtifacts};
use semtrail_server::api::router;

const WORDS: &[&str] = &["heart", "love", "joy", "pain", "fear", "table", "stone"];

fn info(id: &str) -> CorpusInfo {
    CorpusInfo {
        corpus_id: id.into(),
        language: Language::English,
        params: CorpusParams {
            window: 4,
            min_count: 1,
            dim: 4,
            alpha: 0.75,
            eig_weight: 0.0,
            svd_seed: 0,
            top_k: 3,
            contexts_k: 3,
            min_seed_sim: 0.0,
        },
    }
}

fn slice(slice_id: u32, year: i32, words: &[&str], tokens: u64, seed: u64) -> (SliceArtifacts, EmbeddingModel) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab = Vocabulary::from_parts(words.iter().map(|w| w.to_string()).collect(), vec![1; words.len()], 1);
    let vectors: Vec<f32> = (0..words.len() * 4).map(|_| rng.random_range(-1.0..1.0)).collect();
    let model = EmbeddingModel::new(slice_id, vocab, 4, vectors).unwrap();
    let n = words.len() as u32;
    let contexts = (0..n)
        .map(|i| vec![((i + 1) % n, 2.5), ((i + 2) % n, 1.25), ((i + 3) % n, 0.5)])
        .collect();
    let emotions: BTreeMap<u32, VadScore> = (0..n)
        .map(|i| (i, VadScore::new(rng.random_range(1.0..9.0), rng.random_range(1.0..9.0), rng.random_range(1.0..9.0))))
        .collect();
    let ts = TimeSlice {
        slice_id,
        label_year: year,
        start_year: year,
        end_year: year + 9,
        token_count: tokens,
    };
    let top = all_top_k(&model, 3);
    (SliceArtifacts::from_model(ts, &model, emotions, top, contexts), model)
}

fn store_with(corpora: &[&str], years: &[i32]) -> ModelStore {
    let mut store = ModelStore::new();
    for (c, id) in corpora.iter().enumerate() {
        store.register_corpus(info(id), LemmaTable::default()).unwrap();
        for (i, &y) in years.iter().enumerate() {
            let (art, _) = slice(i as u32, y, WORDS, 100, (c * 10 + i) as u64);
            store.write_slice(id, art).unwrap();
        }
    }
    store
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    let resp = app.clone().oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn ys(curve: &Value) -> Vec<f64> {
    curve["points"].as_array().unwrap().iter().map(|p| p["y"].as_f64().unwrap()).collect()
}

#[tokio::test]
async fn corpora_listing() {
    let (_, empty) = get(&router(Arc::new(ModelStore::new()), None), "/api/corpora").await;
    assert_eq!(empty, Value::Array(vec![]));

    let app = router(Arc::new(store_with(&["zeta", "alpha"], &[1850, 1860, 1870])), None);
    let (status, body) = get(&app, "/api/corpora").await;
    assert_eq!(status, StatusCode::OK);
    let ids: Vec<&str> = body.as_array().unwrap().iter().map(|c| c["corpus_id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["alpha", "zeta"]);
    let labels: Vec<i64> = body[0]["slices"].as_array().unwrap().iter().map(|s| s["label"].as_i64().unwrap()).collect();
    assert_eq!(labels, [1850, 1860, 1870]);
}

#[tokio::test]
async fn self_similarity_is_one_and_unknown_word2_is_named() {
    let app = router(Arc::new(store_with(&["demo"], &[1850, 1860])), None);
    let (_, body) = get(&app, "/api/similarity?corpus=demo&word1=heart&word2=Heart").await;
    assert!(ys(&body["curves"][0]).iter().all(|&y| (y - 1.0).abs() < 1e-12));
    let (status, body) = get(&app, "/api/similarity?corpus=demo&word1=heart&word2=unicorn").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["word"], "unicorn");
    assert_eq!(body["error"], "UnknownWord");
    let (status, body) = get(&app, "/api/emotion?corpus=nope&word=heart").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["corpus"], "nope");
}

#[tokio::test]
async fn single_slice_zscored_is_zero_and_raw_stays_in_range() {
    let app = router(Arc::new(store_with(&["demo"], &[1850])), None);
    let (_, z) = get(&app, "/api/emotion?corpus=demo&word=joy&scale=zscored").await;
    for c in z["curves"].as_array().unwrap() {
        assert_eq!(ys(c), [0.0]);
    }
    let (_, raw) = get(&app, "/api/emotion?corpus=demo&word=joy").await;
    assert_eq!(raw["meta"]["scale"], "raw");
    for c in raw["curves"].as_array().unwrap() {
        assert!(ys(c).iter().all(|y| (1.0..=9.0).contains(y)));
    }
}

#[tokio::test]
async fn zscored_composes_with_raw() {
    let app = router(Arc::new(store_with(&["demo"], &[1850, 1860, 1870])), None);
    let (_, raw) = get(&app, "/api/emotion?corpus=demo&word=pain&scale=raw").await;
    let (_, z) = get(&app, "/api/emotion?corpus=demo&word=pain&scale=zscored").await;
    for d in 0..3 {
        let expect = zscale_series(&ys(&raw["curves"][d]));
        for (a, b) in expect.iter().zip(ys(&z["curves"][d])) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
    let (status, _) = get(&app, "/api/emotion?corpus=demo&word=pain&scale=log").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn frequency_is_count_over_tokens() {
    let mut store = ModelStore::new();
    store.register_corpus(info("tiny"), LemmaTable::default()).unwrap();
    store.write_slice("tiny", slice(0, 1900, WORDS, 100, 1).0).unwrap();
    let app = router(Arc::new(store), None);
    let (_, body) = get(&app, "/api/frequency?corpus=tiny&word=stone").await;
    assert_eq!(ys(&body["curves"][0]), [0.01]);
    assert_eq!(body["curves"][0]["points"][0]["x"], 1900);
}

#[tokio::test]
async fn mostsimilar_k1_is_the_top_neighbor() {
    let (art, model) = slice(0, 1900, WORDS, 100, 9);
    let mut store = ModelStore::new();
    store.register_corpus(info("one"), LemmaTable::default()).unwrap();
    store.write_slice("one", art).unwrap();
    let app = router(Arc::new(store), None);
    let (_, body) = get(&app, "/api/mostsimilar?corpus=one&word=fear&k=1").await;
    let top = top_k_similar("fear", &model, 1, true).unwrap();
    let ranked = body["ranked"].as_array().unwrap();
    assert_eq!(ranked.len(), 1);
    assert_eq!(ranked[0]["word"], top[0].0.as_str());
    assert!((ranked[0]["score"].as_f64().unwrap() - top[0].1).abs() < 1e-12);
    let (status, _) = get(&app, "/api/mostsimilar?corpus=one&word=fear&k=0").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn typicalcontext_matches_table_rows() {
    let store = store_with(&["demo"], &[1850, 1860]);
    let mut expected = Vec::new();
    for s in store.corpus("demo").unwrap().slices.values() {
        let id = s.vocab.id("love").unwrap() as usize;
        for &(ctx, score) in s.contexts[id].iter().take(2) {
            expected.push((s.slice.label_year as i64, s.vocab.word(ctx).to_string(), score));
        }
    }
    let app = router(Arc::new(store), None);
    let (_, body) = get(&app, "/api/typicalcontext?corpus=demo&word=love&k=2").await;
    let mut got = Vec::new();
    for l in body["contexts"].as_array().unwrap() {
        for r in l["items"].as_array().unwrap() {
            got.push((l["x"].as_i64().unwrap(), r["word"].as_str().unwrap().to_string(), r["score"].as_f64().unwrap()));
        }
    }
    assert_eq!(got, expected);
}

#[tokio::test]
async fn missing_parameter_is_bad_request() {
    let app = router(Arc::new(store_with(&["demo"], &[1850])), None);
    let (status, body) = get(&app, "/api/similarity?corpus=demo&word1=heart").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["message"].as_str().unwrap().contains("word2"));
}

// ------------------------------------------------------------------ CLI

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_semtrail")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn saved(dir: &Path, store: &ModelStore) -> String {
    let path = dir.join("s.store");
    store.save(&path).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn build_with_empty_manifest_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("manifest.toml"),
        "corpus_id = \"empty\"\nlanguage = \"english\"\ndocuments = []\n[slicing]\nmode = \"fixed_span\"\nspan_years = 10\n",
    )
    .unwrap();
    fs::write(dir.path().join("seeds.csv"), "word,valence,arousal,dominance\njoy,8,5,7\n").unwrap();
    fs::write(
        dir.path().join("config.toml"),
        "manifest = \"manifest.toml\"\nseeds = \"seeds.csv\"\nstore = \"out.store\"\n",
    )
    .unwrap();
    let (code, _, err) = cli(&["build", "--config", dir.path().join("config.toml").to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("EmptyCorpus"), "{err}");
    assert!(!dir.path().join("out.store").exists());
}

#[test]
fn query_rows_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let store = saved(dir.path(), &store_with(&["demo"], &[1850, 1860]));

    let (code, out, _) = cli(&["query", "--store", &store, "similarity", "heart", "heart"]);
    assert_eq!(code, 0);
    assert_eq!(out, "1850\t1\n1860\t1\n");

    let (code, out, _) = cli(&["query", "--store", &store, "emotion", "joy"]);
    assert_eq!(code, 0);
    assert!(out.lines().all(|l| l.split('\t').count() == 4));

    let (code, _, err) = cli(&["query", "--store", &store, "frequency", "unicorn"]);
    assert_eq!(code, 1);
    assert!(err.contains("UnknownWord"));
    let (code, _, _) = cli(&["query", "--store", &store, "--corpus", "nope", "frequency", "heart"]);
    assert_eq!(code, 2);
    let missing = dir.path().join("missing.store");
    let (code, _, _) = cli(&["query", "--store", missing.to_str().unwrap(), "frequency", "heart"]);
    assert_eq!(code, 2);
}

#[test]
fn single_seed_store_reports_the_seed_rating() {
    // A one-seed lexicon: every induced word carries exactly that rating.
    let mut store = ModelStore::new();
    store.register_corpus(info("toy"), LemmaTable::default()).unwrap();
    let (mut art, _) = slice(0, 1900, WORDS, 100, 3);
    art.emotions = (0..WORDS.len() as u32).map(|i| (i, VadScore::new(7.25, 3.5, 5.0))).collect();
    store.write_slice("toy", art).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = saved(dir.path(), &store);
    let (code, out, _) = cli(&["query", "--store", &path, "emotion", "joy"]);
    assert_eq!(code, 0);
    assert_eq!(out, "1900\t7.25\t3.5\t5\n");
}

#[test]
fn export_import_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let original = store_with(&["demo"], &[1850, 1860]);
    let store = saved(dir.path(), &original);
    let tables = dir.path().join("tables");
    let (code, _, err) = cli(&["export", "--store", &store, tables.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let back = dir.path().join("back.store");
    let (code, _, err) = cli(&["import", "--store", back.to_str().unwrap(), tables.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(ModelStore::load(&back).unwrap(), original);
}
