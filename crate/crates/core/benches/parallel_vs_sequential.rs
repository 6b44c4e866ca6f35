use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sbs_core::graph::{build_graph_with, prune, GraphConfig};
use sbs_core::metrics::connectivity_with;
use sbs_core::textprep::{detect_ngrams_with, PrepConfig, Token, TokenStream};
use sbs_core::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

/// Short documents over a skewed vocabulary, roughly tweet-sized.
fn documents(n_docs: usize, vocab: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_docs)
        .map(|_| {
            let len = rng.gen_range(8..20);
            (0..len)
                .map(|_| {
                    // squaring a uniform draw favours low ids
                    let u: f64 = rng.gen();
                    format!("w{}", (u * u * vocab as f64) as usize)
                })
                .collect()
        })
        .collect()
}

fn streams(docs: &[Vec<String>]) -> Vec<TokenStream> {
    docs.iter()
        .enumerate()
        .map(|(i, words)| TokenStream {
            doc_id: i.to_string(),
            tokens: words
                .iter()
                .map(|w| Token {
                    term: w.clone(),
                    start: 0,
                    end: 0,
                })
                .collect(),
        })
        .collect()
}

fn bench_build(c: &mut Criterion) {
    let s = streams(&documents(20_000, 3_000, 1));
    let cfg = GraphConfig::default();
    let mut group = c.benchmark_group("build_graph");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| build_graph_with(&s, &cfg, exec))
        });
    }
    group.finish();
}

fn bench_connectivity(c: &mut Criterion) {
    let s = streams(&documents(3_000, 800, 2));
    let cfg = GraphConfig::default();
    let g = prune(&build_graph_with(&s, &cfg, Execution::Parallel), &cfg);
    let mut group = c.benchmark_group("connectivity");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| connectivity_with(&g, exec))
        });
    }
    group.finish();
}

fn bench_ngrams(c: &mut Criterion) {
    let docs = documents(20_000, 3_000, 3);
    let cfg = PrepConfig::english();
    let mut group = c.benchmark_group("detect_ngrams");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| detect_ngrams_with(&docs, &cfg, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_build, bench_connectivity, bench_ngrams);
criterion_main!(benches);
