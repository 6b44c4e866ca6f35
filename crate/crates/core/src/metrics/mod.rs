//! The three score components: prevalence, diversity and connectivity.
//!
//! Diversity is distinctiveness centrality,
//!
//! ```text
//! D(i) = sum over neighbors j of w(i,j) * log10((N - 1) / deg(j))
//! ```
//!
//! with `deg` the unweighted degree and `N` the node count. Connectivity is
//! unnormalized weighted betweenness with edge length `1 / w`, computed with
//! Brandes' accumulation over Dijkstra shortest-path DAGs. Each unordered
//! `(s, t)` pair is counted once.
//!
//! [`oracle`] holds independent brute-force versions of both graph metrics.

pub mod oracle;

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{ConceptCluster, CooccurrenceGraph, Node};
use crate::report::fmt_fixed;
use crate::textprep::TokenStream;

/// Token occurrence counts over a set of streams.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TermCounts(HashMap<String, u64>);

impl TermCounts {
    pub fn from_streams(streams: &[TokenStream]) -> Self {
        let mut map = HashMap::new();
        for s in streams {
            for t in s.terms() {
                *map.entry(t.to_string()).or_insert(0) += 1;
            }
        }
        TermCounts(map)
    }

    pub fn get(&self, term: &str) -> u64 {
        self.0.get(term).copied().unwrap_or(0)
    }

    pub fn cluster(&self, cluster: &ConceptCluster) -> u64 {
        cluster.keywords.iter().map(|k| self.get(k)).sum()
    }
}

/// Occurrences of `term`, counting every token (not every document).
pub fn prevalence(streams: &[TokenStream], term: &str) -> u64 {
    streams
        .iter()
        .flat_map(|s| s.terms())
        .filter(|t| *t == term)
        .count() as u64
}

pub fn cluster_prevalence(streams: &[TokenStream], cluster: &ConceptCluster) -> u64 {
    cluster
        .keywords
        .iter()
        .map(|k| prevalence(streams, k))
        .sum()
}

/// Distinctiveness centrality of every node, in node order.
pub fn diversity(g: &CooccurrenceGraph) -> Vec<f64> {
    let n = g.node_count();
    if n < 2 {
        return vec![0.0; n];
    }
    let adj = g.adjacency();
    let span = (n - 1) as f64;
    let penalty: Vec<f64> = adj
        .iter()
        .map(|nb| {
            if nb.is_empty() {
                0.0
            } else {
                (span / nb.len() as f64).log10()
            }
        })
        .collect();
    adj.iter()
        .map(|nb| {
            nb.iter()
                .fold(0.0, |acc, &(j, w)| acc + w as f64 * penalty[j])
        })
        .collect()
}

pub fn diversity_of(g: &CooccurrenceGraph, node: &Node) -> f64 {
    g.node_index(node).map_or(0.0, |i| diversity(g)[i])
}

pub fn connectivity(g: &CooccurrenceGraph) -> Vec<f64> {
    connectivity_with(g, Execution::default())
}

pub fn connectivity_of(g: &CooccurrenceGraph, node: &Node) -> f64 {
    g.node_index(node).map_or(0.0, |i| connectivity(g)[i])
}

// Relative tolerance when comparing path lengths. Sums of k reciprocals
// carry at most ~k ulps of error, far below this.
const REL_TOL: f64 = 1e-13;

#[derive(Clone, Copy, PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl Ord for Dist {
    // reversed so BinaryHeap pops the smallest distance
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0)
    }
}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Scratch buffers for one single-source pass, reused across sources.
struct Workspace {
    dist: Vec<f64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    settled: Vec<bool>,
    preds: Vec<Vec<usize>>,
    order: Vec<usize>,
    touched: Vec<usize>,
    heap: BinaryHeap<(Dist, usize)>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            dist: vec![f64::INFINITY; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            settled: vec![false; n],
            preds: vec![Vec::new(); n],
            order: Vec::new(),
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v] = f64::INFINITY;
            self.sigma[v] = 0.0;
            self.delta[v] = 0.0;
            self.settled[v] = false;
            self.preds[v].clear();
        }
        self.touched.clear();
        self.order.clear();
        self.heap.clear();
    }

    /// Dijkstra from `s` recording geodesic counts and predecessors, then
    /// back-propagation of dependencies into `acc`.
    fn accumulate(&mut self, s: usize, adj: &[Vec<(usize, f64)>], acc: &mut [f64]) {
        self.reset();
        self.dist[s] = 0.0;
        self.sigma[s] = 1.0;
        self.touched.push(s);
        self.heap.push((Dist(0.0), s));

        while let Some((Dist(d), v)) = self.heap.pop() {
            if self.settled[v] || d > self.dist[v] {
                continue;
            }
            self.settled[v] = true;
            self.order.push(v);
            for &(w, len) in &adj[v] {
                if self.settled[w] {
                    continue;
                }
                let alt = self.dist[v] + len;
                let cur = self.dist[w];
                let tol = REL_TOL * alt;
                if cur.is_infinite() || alt < cur - tol {
                    if cur.is_infinite() {
                        self.touched.push(w);
                    }
                    self.dist[w] = alt;
                    self.sigma[w] = self.sigma[v];
                    self.preds[w].clear();
                    self.preds[w].push(v);
                    self.heap.push((Dist(alt), w));
                } else if (alt - cur).abs() <= tol {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push(v);
                }
            }
        }

        while let Some(w) = self.order.pop() {
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for &v in &self.preds[w] {
                self.delta[v] += self.sigma[v] * coeff;
            }
            if w != s {
                acc[w] += self.delta[w];
            }
        }
    }
}

/// Weighted betweenness of every node, in node order.
///
/// Sources are split into chunks whose size depends only on the node
/// count; chunk sums are added in chunk order, so the result is the same
/// bit pattern on every thread count and on the sequential path.
pub fn connectivity_with(g: &CooccurrenceGraph, exec: Execution) -> Vec<f64> {
    let n = g.node_count();
    let adj: Vec<Vec<(usize, f64)>> = g
        .adjacency()
        .into_iter()
        .map(|nb| nb.into_iter().map(|(j, w)| (j, 1.0 / w as f64)).collect())
        .collect();
    let sources: Vec<usize> = (0..n).filter(|&v| !adj[v].is_empty()).collect();
    let chunk = n.div_ceil(64).max(16);

    let partials = exec.map_chunks(&sources, chunk, |chunk| {
        let mut ws = Workspace::new(n);
        let mut acc = vec![0.0; n];
        for &s in chunk {
            ws.accumulate(s, &adj, &mut acc);
        }
        acc
    });

    let mut bc = vec![0.0; n];
    for part in partials {
        for (b, p) in bc.iter_mut().zip(part) {
            *b += p;
        }
    }
    for (v, b) in bc.iter_mut().enumerate() {
        // each unordered pair was seen from both ends; leaves and isolated
        // nodes never sit inside a geodesic
        *b = if adj[v].len() <= 1 { 0.0 } else { *b / 2.0 };
    }
    bc
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentScores {
    pub node: Node,
    pub prevalence: u64,
    pub diversity: f64,
    pub connectivity: f64,
}

/// Raw components for every node of a merged graph. Term prevalence comes
/// from the token streams, so pruning never changes it; a concept's
/// prevalence is the sum over its keywords.
pub fn component_scores(
    g: &CooccurrenceGraph,
    counts: &TermCounts,
    clusters: &[ConceptCluster],
    exec: Execution,
) -> Vec<ComponentScores> {
    let by_name: HashMap<&str, &ConceptCluster> = clusters
        .iter()
        .map(|c| (c.orientation.as_str(), c))
        .collect();
    let div = diversity(g);
    let con = connectivity_with(g, exec);
    g.nodes()
        .iter()
        .enumerate()
        .map(|(i, node)| {
            let prevalence = if node.is_concept {
                by_name
                    .get(node.label.as_str())
                    .map_or(0, |c| counts.cluster(c))
            } else {
                counts.get(&node.label)
            };
            ComponentScores {
                node: node.clone(),
                prevalence,
                diversity: div[i],
                connectivity: con[i],
            }
        })
        .collect()
}

/// `group,node,prevalence,diversity,connectivity`, reals to 6 decimals.
pub fn write_components_csv<'a, I>(rows: I, w: impl Write) -> Result<()>
where
    I: IntoIterator<Item = (&'a str, &'a ComponentScores)>,
{
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["group", "node", "prevalence", "diversity", "connectivity"])?;
    for (group, s) in rows {
        wtr.write_record([
            group,
            s.node.label.as_str(),
            &s.prevalence.to_string(),
            &fmt_fixed(s.diversity, 6),
            &fmt_fixed(s.connectivity, 6),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<components csv>", e))?;
    Ok(())
}
