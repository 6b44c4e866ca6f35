//! Word co-occurrence graphs: construction, pruning and concept merging.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::textprep::TokenStream;

/// A graph node: a stemmed term, or a merged concept standing for a
/// cluster of terms. Concepts and terms live in separate namespaces, so an
/// orientation may share its name with a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Node {
    // field order gives the sort order: terms first, then concepts
    pub is_concept: bool,
    pub label: String,
}

impl Node {
    pub fn term(label: impl Into<String>) -> Self {
        Node {
            label: label.into(),
            is_concept: false,
        }
    }

    pub fn concept(label: impl Into<String>) -> Self {
        Node {
            label: label.into(),
            is_concept: true,
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// How repeated co-occurrences inside one document are counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairCounting {
    /// Every position pair inside the window adds one.
    #[default]
    PositionPair,
    /// A pair adds at most one per document.
    Document,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphConfig {
    /// Tokens co-occur when both fit in `window` consecutive positions.
    pub window: usize,
    pub prune_min_weight: u64,
    pub counting: PairCounting,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            window: 7,
            prune_min_weight: 2,
            counting: PairCounting::PositionPair,
        }
    }
}

impl GraphConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::config("window must be at least 2"));
        }
        if self.prune_min_weight < 1 {
            return Err(Error::config("prune_min_weight must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptCluster {
    pub orientation: String,
    /// Stemmed terms (n-grams joined with `_`).
    pub keywords: BTreeSet<String>,
}

impl ConceptCluster {
    pub fn new<I, S>(orientation: &str, keywords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ConceptCluster {
            orientation: orientation.to_string(),
            keywords: keywords.into_iter().map(Into::into).collect(),
        }
    }
}

/// Checks that clusters are non-empty, uniquely named and pairwise disjoint.
pub fn validate_clusters(clusters: &[ConceptCluster]) -> Result<()> {
    let mut owner: HashMap<&str, &str> = HashMap::new();
    let mut names = HashSet::new();
    for c in clusters {
        if c.orientation.trim().is_empty() {
            return Err(Error::config(
                "concept cluster with an empty orientation name",
            ));
        }
        if !names.insert(c.orientation.as_str()) {
            return Err(Error::config(format!(
                "duplicate orientation {:?}",
                c.orientation
            )));
        }
        if c.keywords.is_empty() {
            return Err(Error::config(format!(
                "orientation {:?} has no keywords",
                c.orientation
            )));
        }
        for k in &c.keywords {
            if let Some(first) = owner.insert(k.as_str(), c.orientation.as_str()) {
                return Err(Error::OverlappingClusters {
                    first: first.to_string(),
                    second: c.orientation.clone(),
                    keyword: k.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Undirected graph with positive integer weights. Nodes are kept sorted;
/// edges are stored once as `(lo, hi)` index pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CooccurrenceGraph {
    nodes: Vec<Node>,
    index: HashMap<Node, usize>,
    edges: BTreeMap<(usize, usize), u64>,
}

impl CooccurrenceGraph {
    /// Build from explicit nodes and weighted edges. Edge endpoints are added
    /// as nodes when missing; parallel edges accumulate and self-loops are
    /// ignored.
    pub fn from_edges<N, E>(nodes: N, edges: E) -> Self
    where
        N: IntoIterator<Item = Node>,
        E: IntoIterator<Item = (Node, Node, u64)>,
    {
        let edges: Vec<(Node, Node, u64)> = edges.into_iter().collect();
        let mut set: BTreeSet<Node> = nodes.into_iter().collect();
        for (a, b, _) in &edges {
            set.insert(a.clone());
            set.insert(b.clone());
        }
        let mut g = CooccurrenceGraph::with_nodes(set);
        for (a, b, w) in edges {
            if a == b || w == 0 {
                continue;
            }
            let key = ordered(g.index[&a], g.index[&b]);
            *g.edges.entry(key).or_insert(0) += w;
        }
        g
    }

    fn with_nodes(set: BTreeSet<Node>) -> Self {
        let nodes: Vec<Node> = set.into_iter().collect();
        let index = nodes
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, n)| (n, i))
            .collect();
        CooccurrenceGraph {
            nodes,
            index,
            edges: BTreeMap::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_index(&self, node: &Node) -> Option<usize> {
        self.index.get(node).copied()
    }

    /// Edges as `(lo, hi, weight)` node indices, in index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.edges.iter().map(|(&(a, b), &w)| (a, b, w))
    }

    pub fn weight(&self, a: &Node, b: &Node) -> u64 {
        match (self.node_index(a), self.node_index(b)) {
            (Some(i), Some(j)) if i != j => self.edges.get(&ordered(i, j)).copied().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Neighbor lists sorted by index.
    pub fn adjacency(&self) -> Vec<Vec<(usize, u64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (&(a, b), &w) in &self.edges {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn write_edges_csv(&self, w: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["source", "target", "weight"])?;
        for (a, b, weight) in self.edges() {
            wtr.write_record([
                self.nodes[a].label.as_str(),
                self.nodes[b].label.as_str(),
                &weight.to_string(),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<edge csv>", e))?;
        Ok(())
    }

    pub fn write_nodes_csv(&self, w: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["term", "is_concept"])?;
        for n in &self.nodes {
            wtr.write_record([
                n.label.as_str(),
                if n.is_concept { "true" } else { "false" },
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<node csv>", e))?;
        Ok(())
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn build_graph(streams: &[TokenStream], cfg: &GraphConfig) -> CooccurrenceGraph {
    build_graph_with(streams, cfg, Execution::default())
}

/// Every token becomes a node. Two tokens of the same document at distance
/// `1..window` add to their edge; equal terms never link.
pub fn build_graph_with(
    streams: &[TokenStream],
    cfg: &GraphConfig,
    exec: Execution,
) -> CooccurrenceGraph {
    let terms: BTreeSet<Node> = streams
        .iter()
        .flat_map(|s| s.terms())
        .map(Node::term)
        .collect();
    let mut g = CooccurrenceGraph::with_nodes(terms);
    let span = cfg.window.max(2) - 1;

    let partials = exec.map_chunks(streams, 128, |chunk| {
        let mut counts: HashMap<(usize, usize), u64> = HashMap::new();
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        for stream in chunk {
            let ids: Vec<usize> = stream.terms().map(|t| g.index[&Node::term(t)]).collect();
            seen.clear();
            for i in 0..ids.len() {
                for j in (i + 1)..ids.len().min(i + span + 1) {
                    if ids[i] == ids[j] {
                        continue;
                    }
                    let key = ordered(ids[i], ids[j]);
                    if cfg.counting == PairCounting::Document && !seen.insert(key) {
                        continue;
                    }
                    *counts.entry(key).or_insert(0) += 1;
                }
            }
        }
        counts
    });

    for part in partials {
        for (k, w) in part {
            *g.edges.entry(k).or_insert(0) += w;
        }
    }
    g
}

/// Remove edges lighter than `prune_min_weight`. Nodes are all kept, even
/// when left isolated.
pub fn prune(g: &CooccurrenceGraph, cfg: &GraphConfig) -> CooccurrenceGraph {
    let mut out = g.clone();
    out.edges.retain(|_, w| *w >= cfg.prune_min_weight);
    out
}

/// Replace each cluster's member terms by one concept node. Weights towards
/// a shared neighbor add up, edges inside a cluster disappear, and edges
/// between clusters become concept-concept edges. Every cluster gets its
/// node even when none of its keywords occur.
pub fn merge_clusters(
    g: &CooccurrenceGraph,
    clusters: &[ConceptCluster],
) -> Result<CooccurrenceGraph> {
    validate_clusters(clusters)?;
    let owner: HashMap<&str, &str> = clusters
        .iter()
        .flat_map(|c| {
            c.keywords
                .iter()
                .map(move |k| (k.as_str(), c.orientation.as_str()))
        })
        .collect();
    let target = |n: &Node| -> Node {
        match owner.get(n.label.as_str()) {
            Some(o) if !n.is_concept => Node::concept(*o),
            _ => n.clone(),
        }
    };

    let mut set: BTreeSet<Node> = g.nodes.iter().map(target).collect();
    set.extend(
        clusters
            .iter()
            .map(|c| Node::concept(c.orientation.as_str())),
    );
    let mut out = CooccurrenceGraph::with_nodes(set);
    let remap: Vec<usize> = g.nodes.iter().map(|n| out.index[&target(n)]).collect();
    for (&(a, b), &w) in &g.edges {
        let (a, b) = (remap[a], remap[b]);
        if a != b {
            *out.edges.entry(ordered(a, b)).or_insert(0) += w;
        }
    }
    Ok(out)
}
