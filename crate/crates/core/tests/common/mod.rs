#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbs_core::graph::{CooccurrenceGraph, Node};
use sbs_core::pipeline::RunConfig;

/// `(id, group, text)` rows as JSONL; every document gets its own author.
pub fn write_corpus(dir: &Path, rows: &[(String, &str, &str)]) -> PathBuf {
    let path = dir.join("corpus.jsonl");
    let body: String = rows
        .iter()
        .map(|(id, group, text)| {
            serde_json::json!({"id": id, "text": text, "author_id": format!("u{id}"), "group": group})
                .to_string()
                + "\n"
        })
        .collect();
    fs::write(&path, body).unwrap();
    path
}

/// Orientation "alpha" is three times as frequent as "beta", has more
/// distinct neighbours, and is the only bridge between a nature topic and
/// a finance topic. "beta" sits inside the nature topic.
pub fn dominance_rows() -> Vec<(String, &'static str, &'static str)> {
    let mut rows = Vec::new();
    let mut push = |n: usize, text: &'static str| {
        for _ in 0..n {
            let i = rows.len();
            let group = if i % 2 == 0 { "north" } else { "south" };
            rows.push((format!("d{i:03}"), group, text));
        }
    };
    push(6, "alpha river mountain forest");
    push(6, "alpha market invest profit");
    push(4, "beta river valley");
    push(2, "splendid river, lovely valley");
    push(2, "terrible market crash");
    push(1, "quiet evening");
    rows
}

pub fn dominance_config(dir: &Path) -> RunConfig {
    fs::write(
        dir.join("lexicon.csv"),
        "term,valence\nsplendid,0.8\nlovely,0.6\nterrible,-0.9\n",
    )
    .unwrap();
    let text = serde_json::json!({
        "prep": {"language": "english", "ngram_max": 1},
        "clusters": [
            {"orientation": "Alpha", "keywords": ["alpha"]},
            {"orientation": "Beta", "keywords": ["beta"]}
        ],
        "lexicon": "lexicon.csv"
    });
    let path = dir.join("config.json");
    fs::write(&path, text.to_string()).unwrap();
    RunConfig::load(&path).unwrap()
}

/// Every file under `dir`, keyed by relative path. The manifest's timing
/// block is dropped because it is the one field allowed to differ.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
                continue;
            }
            let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
            let mut bytes = fs::read(&p).unwrap();
            if rel == "manifest.json" {
                let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
                v.as_object_mut().unwrap().remove("timings_ms");
                bytes = serde_json::to_vec(&v).unwrap();
            }
            out.insert(rel, bytes);
        }
    }
    out
}

/// Random undirected graph with `n` nodes, edge probability `p` and
/// weights in `1..=max_w`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64, max_w: u64) -> CooccurrenceGraph {
    let nodes: Vec<Node> = (0..n).map(|i| Node::term(format!("n{i:02}"))).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(p) {
                edges.push((nodes[i].clone(), nodes[j].clone(), rng.gen_range(1..=max_w)));
            }
        }
    }
    CooccurrenceGraph::from_edges(nodes, edges)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
