//! Train/test splitting for node labels and edges.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::rng::seeded_rng;

/// Labeled-node split: `train` is the labeled set the sampler and the
/// label-based relations may see.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelSplit {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

impl LabelSplit {
    /// Split that exposes every node as training (used when labels are not
    /// the prediction target, e.g. label relations under link prediction).
    pub fn full(n: usize, seed: u64) -> Self {
        Self {
            train: (0..n).collect(),
            test: Vec::new(),
            seed,
        }
    }
}

/// Edge split for link prediction: train edges plus held-out positive and
/// sampled negative (non-edge) test pairs, `|neg| = |pos|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSplit {
    pub train_edges: Vec<(usize, usize)>,
    pub test_pos: Vec<(usize, usize)>,
    pub test_neg: Vec<(usize, usize)>,
    pub seed: u64,
}

fn round_count(fraction: f64, total: usize) -> usize {
    (fraction * total as f64).round() as usize
}

/// Uniform seeded label split with `round(fraction * n)` training nodes,
/// adjusted so every observed class keeps at least one training node when
/// the budget allows.
pub fn split_labels(g: &Graph, train_fraction: f64, seed: u64) -> Result<LabelSplit> {
    let labels = g
        .labels()
        .ok_or_else(|| Error::invalid("split_labels: graph has no labels"))?;
    if !(0.0 < train_fraction && train_fraction < 1.0) {
        return Err(Error::invalid("train_fraction must be in (0, 1)"));
    }
    let n = g.n();
    let k = round_count(train_fraction, n);
    if k == 0 {
        return Err(Error::invalid("empty train side"));
    }
    if k >= n {
        return Err(Error::invalid("empty test side"));
    }
    let mut rng = seeded_rng(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut train: Vec<usize> = order[..k].to_vec();
    let mut test: Vec<usize> = order[k..].to_vec();

    // Resample classes that ended up with no training representative:
    // swap in a random node of the missing class for a random train node
    // whose class still has at least two members.
    let mut observed: Vec<usize> = labels.to_vec();
    observed.sort_unstable();
    observed.dedup();
    let class_of = |u: usize| labels[u];
    for &c in &observed {
        if train.iter().any(|&u| class_of(u) == c) {
            continue;
        }
        let candidates: Vec<usize> = test.iter().copied().filter(|&u| class_of(u) == c).collect();
        let mut counts = std::collections::HashMap::new();
        for &u in &train {
            *counts.entry(class_of(u)).or_insert(0usize) += 1;
        }
        let donors: Vec<usize> = train
            .iter()
            .copied()
            .filter(|&u| counts[&class_of(u)] >= 2)
            .collect();
        if candidates.is_empty() || donors.is_empty() {
            continue; // budget too small to cover this class
        }
        let incoming = candidates[rng.random_range(0..candidates.len())];
        let outgoing = donors[rng.random_range(0..donors.len())];
        train.retain(|&u| u != outgoing);
        train.push(incoming);
        test.retain(|&u| u != incoming);
        test.push(outgoing);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(LabelSplit { train, test, seed })
}

/// Seeded edge split: shuffle the undirected edges, take
/// `round(fraction * |E|)` for training, hold the rest out as test
/// positives, and sample an equal number of distinct non-edges as test
/// negatives.
pub fn split_edges(g: &Graph, train_fraction: f64, seed: u64) -> Result<EdgeSplit> {
    if g.num_edges() < 2 {
        return Err(Error::invalid("split_edges: graph needs at least 2 edges"));
    }
    if !(0.0 < train_fraction && train_fraction < 1.0) {
        return Err(Error::invalid("train_fraction must be in (0, 1)"));
    }
    let mut edges = g.edges();
    let e = edges.len();
    let k = round_count(train_fraction, e);
    if k == 0 {
        return Err(Error::invalid("empty train side"));
    }
    if k >= e {
        return Err(Error::invalid("empty test side"));
    }
    let mut rng = seeded_rng(seed);
    edges.shuffle(&mut rng);
    let mut train_edges: Vec<(usize, usize)> = edges[..k].to_vec();
    let mut test_pos: Vec<(usize, usize)> = edges[k..].to_vec();
    train_edges.sort_unstable();
    test_pos.sort_unstable();

    let n = g.n();
    let need = test_pos.len();
    let possible_non_edges = n * (n - 1) / 2 - e;
    if possible_non_edges < need {
        return Err(Error::invalid(format!(
            "graph too dense: {possible_non_edges} non-edges available, {need} needed"
        )));
    }
    let mut chosen = HashSet::new();
    let mut test_neg = Vec::with_capacity(need);
    while test_neg.len() < need {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b {
            continue;
        }
        let pair = (a.min(b), a.max(b));
        if g.has_edge(pair.0, pair.1) || !chosen.insert(pair) {
            continue;
        }
        test_neg.push(pair);
    }
    test_neg.sort_unstable();
    Ok(EdgeSplit {
        train_edges,
        test_pos,
        test_neg,
        seed,
    })
}

impl EdgeSplit {
    /// Nodes incident to at least one training edge, ascending.
    pub fn train_nodes(&self) -> Vec<usize> {
        let mut nodes: Vec<usize> = self
            .train_edges
            .iter()
            .flat_map(|&(u, v)| [u, v])
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn labeled_graph(n: usize, classes: usize) -> Graph {
        let x = Array2::zeros((n, 2));
        let y: Vec<usize> = (0..n).map(|u| u % classes).collect();
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|u| (u, u + 1)).collect();
        Graph::new(&edges, x, Some(y)).unwrap()
    }

    #[test]
    fn label_split_sizes() {
        let g = labeled_graph(10, 1);
        let s = split_labels(&g, 0.1, 3).unwrap();
        assert_eq!(s.train.len(), 1);
        assert_eq!(s.test.len(), 9);
    }

    #[test]
    fn label_split_deterministic() {
        let g = labeled_graph(30, 3);
        let a = split_labels(&g, 0.3, 7).unwrap();
        let b = split_labels(&g, 0.3, 7).unwrap();
        assert_eq!(a, b);
        let c = split_labels(&g, 0.3, 8).unwrap();
        assert_ne!(a.train, c.train);
    }

    #[test]
    fn label_split_rejects_degenerate_fractions() {
        let g = labeled_graph(10, 2);
        assert!(split_labels(&g, 0.999, 1).is_err());
        assert!(split_labels(&g, 0.01, 1).is_err());
    }

    #[test]
    fn label_split_covers_every_class_when_budget_allows() {
        let g = labeled_graph(40, 4);
        let s = split_labels(&g, 0.2, 11).unwrap();
        let labels = g.labels().unwrap();
        for c in 0..4 {
            assert!(
                s.train.iter().any(|&u| labels[u] == c),
                "class {c} missing from train"
            );
        }
        assert_eq!(s.train.len(), 8);
    }

    #[test]
    fn label_split_partitions_nodes() {
        let g = labeled_graph(25, 5);
        let s = split_labels(&g, 0.4, 5).unwrap();
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..25).collect::<Vec<_>>());
    }

    fn path_graph(n: usize) -> Graph {
        let x = Array2::zeros((n, 1));
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|u| (u, u + 1)).collect();
        Graph::new(&edges, x, None).unwrap()
    }

    #[test]
    fn edge_split_sizes_and_disjointness() {
        let g = path_graph(11); // 10 edges
        let s = split_edges(&g, 0.6, 9).unwrap();
        assert_eq!(s.train_edges.len(), 6);
        assert_eq!(s.test_pos.len(), 4);
        assert_eq!(s.test_neg.len(), 4);
        for e in &s.test_pos {
            assert!(!s.train_edges.contains(e));
        }
        for &(u, v) in &s.test_neg {
            assert!(!g.has_edge(u, v), "negative ({u},{v}) is an edge");
        }
    }

    #[test]
    fn edge_split_deterministic() {
        let g = path_graph(20);
        assert_eq!(split_edges(&g, 0.6, 4).unwrap(), split_edges(&g, 0.6, 4).unwrap());
    }

    #[test]
    fn edge_split_dense_graph_error() {
        // Complete graph on 4 nodes: zero non-edges.
        let x = Array2::zeros((4, 1));
        let edges: Vec<(usize, usize)> = (0..4)
            .flat_map(|u| ((u + 1)..4).map(move |v| (u, v)))
            .collect();
        let g = Graph::new(&edges, x, None).unwrap();
        assert!(split_edges(&g, 0.5, 1).is_err());
    }

    #[test]
    fn edge_split_train_nodes() {
        let g = path_graph(5);
        let s = EdgeSplit {
            train_edges: vec![(0, 1), (3, 4)],
            test_pos: vec![],
            test_neg: vec![],
            seed: 0,
        };
        let _ = &g;
        assert_eq!(s.train_nodes(), vec![0, 1, 3, 4]);
    }
}
