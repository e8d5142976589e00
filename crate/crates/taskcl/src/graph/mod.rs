//! Graph data model, file formats, and train/test splitting.

pub mod csr;
pub mod io;
mod split;

use ndarray::Array2;

use crate::error::{Error, Result};
pub use csr::{spmm, CsrMatrix};
pub use split::{split_edges, split_labels, EdgeSplit, LabelSplit};

/// Undirected attributed graph, optionally node-labeled.
///
/// Edges are stored symmetrically in a CSR adjacency without self-loops;
/// self-loops are injected only where a formula calls for `A + I`.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    adj: CsrMatrix,
    attrs: Array2<f64>,
    labels: Option<Vec<usize>>,
    class_count: usize,
    name: String,
}

impl Graph {
    /// Validate and build a graph. The edge list may contain duplicates,
    /// both orientations, and self-loops; it is deduplicated, symmetrized,
    /// and self-loops are dropped. Node count comes from the attribute rows.
    pub fn new(
        edges: &[(usize, usize)],
        attrs: Array2<f64>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = attrs.nrows();
        if n == 0 {
            return Err(Error::invalid("graph must have at least one node"));
        }
        if attrs.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("attributes contain non-finite values"));
        }
        let mut neighbor_sets: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "endpoint out of range: edge ({u}, {v}) with n = {n}"
                )));
            }
            if u == v {
                continue;
            }
            neighbor_sets[u].push(v);
            neighbor_sets[v].push(u);
        }
        for set in &mut neighbor_sets {
            set.sort_unstable();
            set.dedup();
        }
        let adj = CsrMatrix::from_rows(
            n,
            neighbor_sets
                .into_iter()
                .map(|ns| ns.into_iter().map(|v| (v, 1.0)).collect())
                .collect(),
        )?;
        let class_count = match &labels {
            Some(y) => {
                if y.len() != n {
                    return Err(Error::invalid(format!(
                        "label count {} != node count {n}",
                        y.len()
                    )));
                }
                y.iter().max().map_or(0, |m| m + 1)
            }
            None => 0,
        };
        Ok(Self {
            n,
            adj,
            attrs,
            labels,
            class_count,
            name: String::from("graph"),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Node count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Attribute dimension.
    pub fn attr_dim(&self) -> usize {
        self.attrs.ncols()
    }

    /// Undirected edge count.
    pub fn num_edges(&self) -> usize {
        self.adj.nnz() / 2
    }

    pub fn attrs(&self) -> &Array2<f64> {
        &self.attrs
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn adjacency(&self) -> &CsrMatrix {
        &self.adj
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        self.adj.row_indices(u)
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj.row_indices(u).len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.row_indices(u).binary_search(&v).is_ok()
    }

    /// Canonical `(u, v)` with `u < v` edge list, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for u in 0..self.n {
            for &v in self.adj.row_indices(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Replace the label vector (used by the label-perturbation study).
    pub fn with_labels(&self, labels: Vec<usize>) -> Result<Self> {
        let mut g = self.clone();
        if labels.len() != self.n {
            return Err(Error::invalid("label count != node count"));
        }
        g.class_count = labels.iter().max().map_or(0, |m| m + 1).max(self.class_count);
        g.labels = Some(labels);
        Ok(g)
    }

    /// Same nodes and attributes, edges restricted to `edges`
    /// (the training graph of a link-prediction split).
    pub fn with_edges(&self, edges: &[(usize, usize)]) -> Result<Self> {
        let g = Graph::new(edges, self.attrs.clone(), self.labels.clone())?;
        Ok(g.with_name(self.name.clone()))
    }

    /// Symmetrically normalized adjacency with self-loops,
    /// `D^{-1/2} (A + I) D^{-1/2}`.
    ///
    /// Every entry lies in `(0, 1]`; an isolated node contributes the single
    /// entry 1 at its diagonal.
    pub fn normalized_adjacency(&self) -> CsrMatrix {
        let inv_sqrt: Vec<f64> = (0..self.n)
            .map(|u| 1.0 / ((self.degree(u) + 1) as f64).sqrt())
            .collect();
        let mut rows = Vec::with_capacity(self.n);
        for u in 0..self.n {
            let neigh = self.adj.row_indices(u);
            let mut entries = Vec::with_capacity(neigh.len() + 1);
            let mut placed_diag = false;
            for &v in neigh {
                if !placed_diag && v > u {
                    entries.push((u, inv_sqrt[u] * inv_sqrt[u]));
                    placed_diag = true;
                }
                entries.push((v, inv_sqrt[u] * inv_sqrt[v]));
            }
            if !placed_diag {
                entries.push((u, inv_sqrt[u] * inv_sqrt[u]));
            }
            rows.push(entries);
        }
        CsrMatrix::from_rows(self.n, rows).expect("normalized adjacency is well-formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn triangle() -> Graph {
        let x = Array2::zeros((3, 2));
        Graph::new(&[(0, 1), (1, 2), (2, 0)], x, None).unwrap()
    }

    #[test]
    fn duplicate_and_reversed_edges_collapse() {
        let x = Array2::zeros((2, 1));
        let g = Graph::new(&[(0, 1), (1, 0), (0, 1)], x, None).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
    }

    #[test]
    fn self_loops_dropped() {
        let x = Array2::zeros((2, 1));
        let g = Graph::new(&[(0, 0), (0, 1)], x, None).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert!(!g.has_edge(0, 0));
    }

    #[test]
    fn out_of_range_endpoint_rejected() {
        let x = Array2::zeros((3, 1));
        let err = Graph::new(&[(0, 5)], x, None).unwrap_err();
        assert!(err.to_string().contains("endpoint out of range"));
    }

    #[test]
    fn normalized_adjacency_isolated_nodes() {
        let x = Array2::zeros((2, 1));
        let g = Graph::new(&[], x, None).unwrap();
        let a = g.normalized_adjacency();
        assert_eq!(a.get(0, 0), 1.0);
        assert_eq!(a.get(1, 1), 1.0);
        assert_eq!(a.get(0, 1), 0.0);
    }

    #[test]
    fn normalized_adjacency_single_edge() {
        let x = Array2::zeros((2, 1));
        let g = Graph::new(&[(0, 1)], x, None).unwrap();
        let a = g.normalized_adjacency();
        for (u, v) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!((a.get(u, v) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn normalized_adjacency_triangle() {
        let a = triangle().normalized_adjacency();
        for u in 0..3 {
            for v in 0..3 {
                assert!((a.get(u, v) - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn normalized_adjacency_symmetric_and_row_stochasticish() {
        // Row sums of D^{-1/2}(A+I)D^{-1/2} are not 1 in general, but the
        // matrix must be exactly symmetric.
        let x = Array2::zeros((4, 1));
        let g = Graph::new(&[(0, 1), (1, 2), (2, 3), (0, 2)], x, None).unwrap();
        let a = g.normalized_adjacency();
        for u in 0..4 {
            for v in 0..4 {
                assert_eq!(a.get(u, v), a.get(v, u));
            }
        }
    }
}
