//! Brute-force reference implementations used to check the fast metrics.
//!
//! Both work straight from the edge list and share no code with the
//! adjacency-based versions. Betweenness enumerates every simple path with
//! exact rational lengths, so ties are decided without rounding.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{CooccurrenceGraph, Node};

/// Largest graph the path enumeration accepts.
pub const MAX_ORACLE_NODES: usize = 14;

pub fn brute_force_diversity(g: &CooccurrenceGraph) -> BTreeMap<Node, f64> {
    let nodes = g.nodes();
    let n = nodes.len();
    let mut degree = vec![0usize; n];
    for (a, b, _) in g.edges() {
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut out: BTreeMap<Node, f64> = nodes.iter().map(|v| (v.clone(), 0.0)).collect();
    if n < 2 {
        return out;
    }
    for (i, node) in nodes.iter().enumerate() {
        let mut total = 0.0;
        for (a, b, w) in g.edges() {
            let other = if a == i {
                b
            } else if b == i {
                a
            } else {
                continue;
            };
            total += w as f64 * ((n - 1) as f64 / degree[other] as f64).log10();
        }
        out.insert(node.clone(), total);
    }
    out
}

struct Search<'a> {
    adj: &'a [Vec<(usize, BigRational)>],
    best: Vec<Option<BigRational>>,
    count: Vec<u64>,
    // through[t][v]: shortest s-t paths (found so far) with v strictly inside
    through: Vec<Vec<u64>>,
    on_path: Vec<bool>,
    path: Vec<usize>,
}

impl Search<'_> {
    fn extend(&mut self, u: usize, len: &BigRational) {
        for (v, step) in self.adj[u].iter() {
            let v = *v;
            if self.on_path[v] {
                continue;
            }
            let next = len + step;
            match &self.best[v] {
                Some(b) if next > *b => continue,
                Some(b) if next == *b => self.count[v] += 1,
                _ => {
                    self.best[v] = Some(next.clone());
                    self.count[v] = 1;
                    self.through[v].iter_mut().for_each(|c| *c = 0);
                }
            }
            // interior = path minus the source
            for &x in &self.path[1..] {
                self.through[v][x] += 1;
            }
            self.on_path[v] = true;
            self.path.push(v);
            self.extend(v, &next);
            self.path.pop();
            self.on_path[v] = false;
        }
    }
}

/// Betweenness by enumerating all simple paths from every source. A partial
/// path is abandoned once it is longer than the best known path to its
/// endpoint; no shortest path is lost that way because every prefix of a
/// geodesic is itself a geodesic.
pub fn brute_force_betweenness(g: &CooccurrenceGraph) -> Result<BTreeMap<Node, f64>> {
    let n = g.node_count();
    if n > MAX_ORACLE_NODES {
        return Err(Error::GraphTooLarge {
            nodes: n,
            max: MAX_ORACLE_NODES,
        });
    }
    let mut adj: Vec<Vec<(usize, BigRational)>> = vec![Vec::new(); n];
    for (a, b, w) in g.edges() {
        let len = BigRational::new(BigInt::from(1), BigInt::from(w));
        adj[a].push((b, len.clone()));
        adj[b].push((a, len));
    }

    let mut total = vec![BigRational::zero(); n];
    for s in 0..n {
        let mut search = Search {
            adj: &adj,
            best: vec![None; n],
            count: vec![0; n],
            through: vec![vec![0; n]; n],
            on_path: vec![false; n],
            path: vec![s],
        };
        search.on_path[s] = true;
        search.best[s] = Some(BigRational::zero());
        search.extend(s, &BigRational::zero());
        for t in (s + 1)..n {
            if search.count[t] == 0 {
                continue;
            }
            let paths = BigInt::from(search.count[t]);
            for (acc, &through) in total.iter_mut().zip(&search.through[t]) {
                if through > 0 {
                    *acc += BigRational::new(BigInt::from(through), paths.clone());
                }
            }
        }
    }

    Ok(g.nodes()
        .iter()
        .zip(total)
        .map(|(node, b)| (node.clone(), b.to_f64().unwrap_or(f64::NAN)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Node {
        Node::term(s)
    }

    #[test]
    fn path_graph_values() {
        let g = CooccurrenceGraph::from_edges(
            [],
            [
                (t("a"), t("b"), 1),
                (t("b"), t("c"), 1),
                (t("c"), t("d"), 1),
            ],
        );
        let bc = brute_force_betweenness(&g).unwrap();
        assert_eq!(bc[&t("a")], 0.0);
        assert_eq!(bc[&t("b")], 2.0);
        assert_eq!(bc[&t("c")], 2.0);
        assert_eq!(bc[&t("d")], 0.0);
    }

    #[test]
    fn triangle_detour() {
        let g = CooccurrenceGraph::from_edges(
            [],
            [
                (t("A"), t("B"), 1),
                (t("B"), t("C"), 4),
                (t("A"), t("C"), 4),
            ],
        );
        let bc = brute_force_betweenness(&g).unwrap();
        assert_eq!(bc[&t("C")], 1.0);
        assert_eq!(bc[&t("A")], 0.0);
    }

    #[test]
    fn disconnected_pair() {
        let g = CooccurrenceGraph::from_edges([t("x"), t("y")], []);
        let bc = brute_force_betweenness(&g).unwrap();
        assert_eq!(bc.values().copied().collect::<Vec<_>>(), [0.0, 0.0]);
    }

    #[test]
    fn size_guard() {
        let nodes: Vec<Node> = (0..15).map(|i| t(&format!("n{i}"))).collect();
        let g = CooccurrenceGraph::from_edges(nodes, []);
        assert!(matches!(
            brute_force_betweenness(&g),
            Err(Error::GraphTooLarge { nodes: 15, .. })
        ));
    }

    #[test]
    fn diversity_oracle_edge_cases() {
        assert!(brute_force_diversity(&CooccurrenceGraph::default()).is_empty());
        let single = CooccurrenceGraph::from_edges([t("x")], []);
        assert_eq!(brute_force_diversity(&single)[&t("x")], 0.0);
        let g = CooccurrenceGraph::from_edges(
            [],
            [
                (t("A"), t("B"), 2),
                (t("A"), t("C"), 3),
                (t("C"), t("D"), 2),
            ],
        );
        let d = brute_force_diversity(&g);
        assert!((d[&t("A")] - 1.482_516_286_6).abs() < 1e-10);
    }
}
