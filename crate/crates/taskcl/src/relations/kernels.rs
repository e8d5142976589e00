//! The nine similarity kernels.
//!
//! All kernels map into `[0, 1]`. Cosine-based kernels clamp negative
//! cosines to 0 to respect that codomain (vacuous for nonnegative
//! attributes). Label-based kernels see training labels only.
//!
//! Topology similarity is a self-contained substitute definition: the
//! mutual information between the two nodes' neighborhood-membership
//! indicator variables, normalized by the smaller marginal entropy, and
//! restricted to pairs within two hops. It is 1 on identical nonempty
//! proper neighborhoods and 0 on independent ones.

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{RelationId, SimMatrix, SimMode};
use crate::error::{Error, Result};
use crate::graph::{CsrMatrix, Graph, LabelSplit};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PageRankParams {
    pub alpha: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        Self {
            alpha: 0.85,
            tol: 1e-8,
            max_iter: 200,
        }
    }
}

/// Sorted row supports: each node with itself and its neighbors.
fn a_plus_i_support(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.n())
        .map(|u| {
            let neigh = g.neighbors(u);
            let mut row = Vec::with_capacity(neigh.len() + 1);
            let pos = neigh.partition_point(|&v| v < u);
            row.extend_from_slice(&neigh[..pos]);
            row.push(u);
            row.extend_from_slice(&neigh[pos..]);
            row
        })
        .collect()
}

/// Sorted row supports: all pairs within two hops, including the diagonal.
fn two_hop_support(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.n())
        .into_par_iter()
        .map(|u| {
            let mut row = vec![u];
            row.extend_from_slice(g.neighbors(u));
            for &w in g.neighbors(u) {
                row.extend_from_slice(g.neighbors(w));
            }
            row.sort_unstable();
            row.dedup();
            row
        })
        .collect()
}

/// Assemble a sparse similarity matrix over per-row supports.
fn sparse_over_support<F>(
    relation: RelationId,
    n: usize,
    support: &[Vec<usize>],
    value: F,
) -> SimMatrix
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let rows: Vec<Vec<(usize, f64)>> = support
        .par_iter()
        .enumerate()
        .map(|(u, cols)| cols.iter().map(|&v| (v, value(u, v))).collect())
        .collect();
    let csr = CsrMatrix::from_rows(n, rows).expect("support rows are sorted");
    SimMatrix::from_csr(relation, csr)
}

fn dense_over_all<F>(relation: RelationId, n: usize, value: F) -> SimMatrix
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let mut m = Array2::<f64>::zeros((n, n));
    m.axis_iter_mut(ndarray::Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(u, mut row)| {
            for (v, slot) in row.iter_mut().enumerate() {
                *slot = value(u, v);
            }
        });
    SimMatrix::from_dense(relation, m)
}

/// Normalized adjacency weight on each link: `D^{-1/2}(A+I)D^{-1/2}[u,v]`.
pub fn link_sim(g: &Graph, mode: SimMode) -> SimMatrix {
    let a = g.normalized_adjacency();
    let sim = SimMatrix::from_csr(RelationId::Link, a);
    match mode {
        SimMode::Sparse => sim,
        SimMode::Dense => SimMatrix::from_dense(RelationId::Link, sim.to_dense()),
    }
}

/// Per-node personalized PageRank by power iteration: row `u` holds the
/// stationary vector of `pi = alpha * P * pi + (1 - alpha) * e_u`, with
/// `P = A D^{-1}` and dangling nodes given a self-transition.
pub fn pagerank_sim(g: &Graph, params: &PageRankParams, mode: SimMode) -> SimMatrix {
    let n = g.n();
    let alpha = params.alpha;
    let inv_deg: Vec<f64> = (0..n)
        .map(|u| {
            let d = g.degree(u);
            if d == 0 {
                0.0
            } else {
                1.0 / d as f64
            }
        })
        .collect();

    let solve_row = |u: usize| -> (Vec<f64>, bool) {
        let mut pi = vec![0.0f64; n];
        pi[u] = 1.0;
        let mut next = vec![0.0f64; n];
        for _ in 0..params.max_iter {
            next.fill(0.0);
            for (w, &mass) in pi.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                let neigh = g.neighbors(w);
                if neigh.is_empty() {
                    next[w] += alpha * mass;
                } else {
                    let share = alpha * mass * inv_deg[w];
                    for &v in neigh {
                        next[v] += share;
                    }
                }
            }
            next[u] += 1.0 - alpha;
            let residual: f64 = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
            std::mem::swap(&mut pi, &mut next);
            if residual < params.tol {
                return (pi, true);
            }
        }
        (pi, false)
    };

    let rows: Vec<(Vec<f64>, bool)> = (0..n).into_par_iter().map(solve_row).collect();
    let converged = rows.iter().all(|(_, ok)| *ok);

    let sim = match mode {
        SimMode::Dense => {
            let mut m = Array2::<f64>::zeros((n, n));
            for (u, (pi, _)) in rows.iter().enumerate() {
                m.row_mut(u).iter_mut().zip(pi).for_each(|(s, &v)| *s = v);
            }
            SimMatrix::from_dense(RelationId::PageRank, m)
        }
        SimMode::Sparse => {
            let support = a_plus_i_support(g);
            let entries: Vec<Vec<(usize, f64)>> = support
                .iter()
                .enumerate()
                .map(|(u, cols)| cols.iter().map(|&v| (v, rows[u].0[v])).collect())
                .collect();
            let csr = CsrMatrix::from_rows(n, entries).expect("support rows sorted");
            SimMatrix::from_csr(RelationId::PageRank, csr)
        }
    };
    sim.with_converged(converged)
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                k += 1;
                i += 1;
                j += 1;
            }
        }
    }
    k
}

/// Common-neighbor similarity `|N_u ∩ N_v| / (|N_u| * |N_v|)`, zero for
/// pairs more than two hops apart. Only `k = 1` neighborhoods are supported.
pub fn jaccard_sim(g: &Graph, k: usize, mode: SimMode) -> Result<SimMatrix> {
    if k != 1 {
        return Err(Error::invalid("jaccard_sim: only k = 1 is supported"));
    }
    let value = |u: usize, v: usize| -> f64 {
        let (nu, nv) = (g.neighbors(u), g.neighbors(v));
        if nu.is_empty() || nv.is_empty() {
            return 0.0;
        }
        let common = intersection_size(nu, nv) as f64;
        (common / (nu.len() as f64 * nv.len() as f64)).clamp(0.0, 1.0)
    };
    Ok(match mode {
        SimMode::Sparse => {
            let support = two_hop_support(g);
            sparse_over_support(RelationId::JaccardSim, g.n(), &support, value)
        }
        SimMode::Dense => dense_over_all(RelationId::JaccardSim, g.n(), value),
    })
}

fn binary_entropy(k: usize, n: usize) -> f64 {
    if k == 0 || k >= n {
        return 0.0;
    }
    let p = k as f64 / n as f64;
    -(p * p.ln() + (1.0 - p) * (1.0 - p).ln())
}

fn mi_term(nij: usize, row: usize, col: usize, n: usize) -> f64 {
    if nij == 0 {
        return 0.0;
    }
    let nij = nij as f64;
    let n = n as f64;
    (nij / n) * ((nij * n) / (row as f64 * col as f64)).ln()
}

/// Min-entropy-normalized mutual information of the two neighborhood
/// indicator variables over all `n` nodes.
fn neighborhood_nmi(n: usize, a: usize, b: usize, n11: usize) -> f64 {
    let h_min = binary_entropy(a, n).min(binary_entropy(b, n));
    if h_min <= 0.0 {
        return 0.0;
    }
    let n10 = a - n11;
    let n01 = b - n11;
    let n00 = (n + n11) - a - b; // |union| <= n keeps this nonnegative
    let mi = mi_term(n11, a, b, n)
        + mi_term(n10, a, n - b, n)
        + mi_term(n01, n - a, b, n)
        + mi_term(n00, n - a, n - b, n);
    (mi / h_min).clamp(0.0, 1.0)
}

/// Topology similarity: normalized mutual information between neighborhood
/// memberships, defined over pairs within two hops and zero elsewhere.
pub fn topology_sim(g: &Graph, mode: SimMode) -> SimMatrix {
    let n = g.n();
    let support = two_hop_support(g);
    let value = |u: usize, v: usize| -> f64 {
        let (nu, nv) = (g.neighbors(u), g.neighbors(v));
        neighborhood_nmi(n, nu.len(), nv.len(), intersection_size(nu, nv))
    };
    match mode {
        SimMode::Sparse => sparse_over_support(RelationId::TopologySim, n, &support, value),
        SimMode::Dense => {
            // Same support restriction; pairs outside two hops are defined 0.
            let mut m = Array2::<f64>::zeros((n, n));
            for (u, cols) in support.iter().enumerate() {
                for &v in cols {
                    m[(u, v)] = value(u, v);
                }
            }
            SimMatrix::from_dense(RelationId::TopologySim, m)
        }
    }
}

fn bfs_distances(g: &Graph, src: usize, dist: &mut [i64]) {
    dist.fill(-1);
    dist[src] = 0;
    let mut frontier = vec![src];
    let mut next = Vec::new();
    let mut d = 0i64;
    while !frontier.is_empty() {
        d += 1;
        next.clear();
        for &u in &frontier {
            for &v in g.neighbors(u) {
                if dist[v] < 0 {
                    dist[v] = d;
                    next.push(v);
                }
            }
        }
        std::mem::swap(&mut frontier, &mut next);
    }
}

/// Shortest-path similarity `(diam - d(u,v) + 1) / diam`, clamped to 1 on
/// the diagonal, zero for disconnected pairs. Always dense.
pub fn graph_distance_sim(g: &Graph) -> SimMatrix {
    let n = g.n();
    let diameter: i64 = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut dist = vec![-1i64; n];
            bfs_distances(g, u, &mut dist);
            dist.iter().copied().max().unwrap_or(0)
        })
        .max()
        .unwrap_or(0);
    if diameter <= 0 {
        // No edges: only the diagonal is similar.
        let mut m = Array2::<f64>::zeros((n, n));
        m.diag_mut().fill(1.0);
        return SimMatrix::from_dense(RelationId::GraphDistance, m);
    }
    let diam = diameter as f64;
    let mut m = Array2::<f64>::zeros((n, n));
    m.axis_iter_mut(ndarray::Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(u, mut row)| {
            let mut dist = vec![-1i64; n];
            bfs_distances(g, u, &mut dist);
            for (v, slot) in row.iter_mut().enumerate() {
                *slot = match dist[v] {
                    d if d < 0 => 0.0,
                    d => ((diam - d as f64 + 1.0) / diam).min(1.0),
                };
            }
        });
    SimMatrix::from_dense(RelationId::GraphDistance, m)
}

fn l1_normalize_rows(mut m: Array2<f64>) -> Array2<f64> {
    for mut row in m.rows_mut() {
        let s: f64 = row.iter().map(|v| v.abs()).sum();
        if s > 0.0 {
            row.mapv_inplace(|v| v / s);
        }
    }
    m
}

fn l2_normalize_rows(mut m: Array2<f64>) -> Array2<f64> {
    for mut row in m.rows_mut() {
        let s: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if s > 0.0 {
            row.mapv_inplace(|v| v / s);
        }
    }
    m
}

/// Cosine of profile rows, clamped to `[0, 1]`; zero rows score 0.
/// Sparse mode restricts to the edges-with-self support.
fn cosine_sim(relation: RelationId, g: &Graph, profiles: &Array2<f64>, mode: SimMode) -> SimMatrix {
    let normalized = l2_normalize_rows(profiles.clone());
    match mode {
        SimMode::Dense => {
            let mut c = normalized.dot(&normalized.t());
            c.mapv_inplace(|v| v.clamp(0.0, 1.0));
            SimMatrix::from_dense(relation, c)
        }
        SimMode::Sparse => {
            let support = a_plus_i_support(g);
            let value = |u: usize, v: usize| -> f64 {
                normalized
                    .row(u)
                    .iter()
                    .zip(normalized.row(v))
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    .clamp(0.0, 1.0)
            };
            sparse_over_support(relation, g.n(), &support, value)
        }
    }
}

/// Cosine similarity of raw node attributes.
pub fn attr_sim(g: &Graph, mode: SimMode) -> SimMatrix {
    cosine_sim(RelationId::AttrSim, g, g.attrs(), mode)
}

fn repeated_spmm(a: &CsrMatrix, m: Array2<f64>, k: usize) -> Result<Array2<f64>> {
    let mut out = m;
    for _ in 0..k {
        out = a.spmm(&out.view())?;
    }
    Ok(out)
}

/// Cosine similarity of the L1-normalized k-hop neighbor attribute
/// aggregate `Normalize(A^k X)`.
pub fn attr_dist_sim(g: &Graph, k: usize, mode: SimMode) -> Result<SimMatrix> {
    if k == 0 {
        return Err(Error::invalid("attr_dist_sim: k must be >= 1"));
    }
    let profile = l1_normalize_rows(repeated_spmm(g.adjacency(), g.attrs().clone(), k)?);
    Ok(cosine_sim(RelationId::AttrDist1, g, &profile, mode))
}

fn train_one_hot(g: &Graph, labels_on: &LabelSplit) -> Result<Array2<f64>> {
    let y = g
        .labels()
        .ok_or_else(|| Error::invalid("relation requires labels"))?;
    let c = g.class_count();
    let mut m = Array2::<f64>::zeros((g.n(), c));
    for &u in &labels_on.train {
        m[(u, y[u])] = 1.0;
    }
    Ok(m)
}

/// Cosine similarity of the L1-normalized k-hop neighbor label distribution
/// `Normalize(A^k Y)`, with `Y` one-hot over training labels only.
pub fn label_dist_sim(
    g: &Graph,
    labels_on: &LabelSplit,
    k: usize,
    mode: SimMode,
) -> Result<SimMatrix> {
    if k == 0 {
        return Err(Error::invalid("label_dist_sim: k must be >= 1"));
    }
    let y = train_one_hot(g, labels_on)?;
    let profile = l1_normalize_rows(repeated_spmm(g.adjacency(), y, k)?);
    Ok(cosine_sim(RelationId::LabelDist2, g, &profile, mode))
}

/// Cosine similarity of `Normalize(S * Y)` where `S` is the attribute
/// distribution similarity matrix and `Y` is one-hot over training labels.
pub fn attr_label_dist_sim(
    g: &Graph,
    labels_on: &LabelSplit,
    attr_dist: &SimMatrix,
    mode: SimMode,
) -> Result<SimMatrix> {
    if attr_dist.relation() != RelationId::AttrDist1 {
        return Err(Error::invalid(
            "attr_label_dist_sim expects the attr-dist1 matrix",
        ));
    }
    if attr_dist.n() != g.n() {
        return Err(Error::invalid("attr_label_dist_sim: size mismatch"));
    }
    let y = train_one_hot(g, labels_on)?;
    let profile = l1_normalize_rows(attr_dist.dot_dense(&y)?);
    Ok(cosine_sim(RelationId::AttrLabelDist, g, &profile, mode))
}
