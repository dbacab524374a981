//! Hot stages timed on one synthetic slice.
//!
//! With the `parallel` feature each stage runs twice: inside a one-thread
//! rayon pool and inside the default pool. Without it (`--no-default-features`)
//! only the sequential path exists and is timed as `serial`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use semtrail::cooc::count_cooccurrences;
use semtrail::corpus::{build_vocabulary, Tokenizer};
use semtrail::embed::{all_top_k, ppmi, truncated_svd, SvdOptions};
use semtrail::synth::{drift_corpus, DriftSpec};

struct Fixture {
    docs: Vec<Vec<String>>,
    vocab: semtrail::corpus::Vocabulary,
}

fn fixture() -> Fixture {
    let corpus = drift_corpus(&DriftSpec::new(vec![1900], 60_000));
    let tok = Tokenizer::default();
    let docs: Vec<Vec<String>> = corpus.documents.iter().map(|(_, text)| tok.tokenize(&text.to_lowercase())).collect();
    let vocab = build_vocabulary(docs.iter().flatten().map(String::as_str), 3).unwrap();
    Fixture { docs, vocab }
}

#[cfg(feature = "parallel")]
fn modes() -> Vec<(String, Option<rayon::ThreadPool>)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    let n = all.current_num_threads();
    let mut modes = vec![("rayon-1".to_string(), Some(one))];
    // On a single-core host the default pool is the one-thread pool.
    if n > 1 {
        modes.push((format!("rayon-{n}"), Some(all)));
    }
    modes
}

#[cfg(not(feature = "parallel"))]
fn modes() -> Vec<(String, Option<()>)> {
    vec![("serial".into(), None)]
}

#[cfg(feature = "parallel")]
fn run<R: Send>(pool: &Option<rayon::ThreadPool>, f: impl FnOnce() -> R + Send) -> R {
    pool.as_ref().expect("pool").install(f)
}

#[cfg(not(feature = "parallel"))]
fn run<R>(_: &Option<()>, f: impl FnOnce() -> R) -> R {
    f()
}

fn stages(c: &mut Criterion) {
    let fx = fixture();
    let doc_refs: Vec<&[String]> = fx.docs.iter().map(Vec::as_slice).collect();
    let cooc = count_cooccurrences(&doc_refs, &fx.vocab, 4);
    let matrix = ppmi(&cooc, 0.75).unwrap();
    let opts = SvdOptions::with_seed(42);
    let model = truncated_svd(&matrix, fx.vocab.clone(), 0, 100, 0.0, &opts).unwrap();

    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    for (name, pool) in modes() {
        group.bench_with_input(BenchmarkId::new("cooc", &name), &pool, |b, pool| {
            b.iter(|| run(pool, || count_cooccurrences(&doc_refs, &fx.vocab, 4)))
        });
        group.bench_with_input(BenchmarkId::new("svd_d100", &name), &pool, |b, pool| {
            b.iter(|| run(pool, || truncated_svd(&matrix, fx.vocab.clone(), 0, 100, 0.0, &opts).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("all_top_k", &name), &pool, |b, pool| {
            b.iter(|| run(pool, || all_top_k(&model, 10)))
        });
    }
    group.finish();
}

criterion_group!(benches, stages);
criterion_main!(benches);
