//! Semantic-relation similarity matrices and per-node thresholds.
//!
//! Each relation assigns every node pair a similarity in `[0, 1]`. Matrices
//! are stored sparse (only the pairs the kernel can make nonzero, or an
//! edge-restricted support for the inherently dense kernels) or dense.
//! Sparse is the pipeline default; dense mode exists for oracle testing and
//! for small graphs where the threshold population should include zeros.

pub mod io;
pub mod kernels;
mod threshold;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CsrMatrix, Graph, LabelSplit};
pub use kernels::PageRankParams;
pub use threshold::{per_node_threshold, ThresholdVector};

/// The nine semantic relations, in tie-breaking order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum RelationId {
    Link,
    PageRank,
    JaccardSim,
    TopologySim,
    GraphDistance,
    AttrSim,
    AttrDist1,
    LabelDist2,
    AttrLabelDist,
}

impl RelationId {
    pub const ALL: [RelationId; 9] = [
        RelationId::Link,
        RelationId::PageRank,
        RelationId::JaccardSim,
        RelationId::TopologySim,
        RelationId::GraphDistance,
        RelationId::AttrSim,
        RelationId::AttrDist1,
        RelationId::LabelDist2,
        RelationId::AttrLabelDist,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationId::Link => "link",
            RelationId::PageRank => "pagerank",
            RelationId::JaccardSim => "jaccard",
            RelationId::TopologySim => "topology",
            RelationId::GraphDistance => "graph-distance",
            RelationId::AttrSim => "attr-sim",
            RelationId::AttrDist1 => "attr-dist1",
            RelationId::LabelDist2 => "label-dist2",
            RelationId::AttrLabelDist => "attr-label-dist",
        }
    }

    /// Relations computed from training labels.
    pub fn needs_labels(self) -> bool {
        matches!(self, RelationId::LabelDist2 | RelationId::AttrLabelDist)
    }

    /// Stable index used in binary formats.
    pub fn index(self) -> u8 {
        Self::ALL.iter().position(|&r| r == self).unwrap() as u8
    }

    pub fn from_index(i: u8) -> Option<Self> {
        Self::ALL.get(i as usize).copied()
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown relation {s:?}")))
    }
}

/// Parse a comma-separated relation list; `all` expands to the nine.
pub fn parse_relation_list(s: &str) -> Result<Vec<RelationId>> {
    if s.trim() == "all" {
        return Ok(RelationId::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        let r: RelationId = part.trim().parse()?;
        if !out.contains(&r) {
            out.push(r);
        }
    }
    if out.is_empty() {
        return Err(Error::invalid("empty relation list"));
    }
    Ok(out)
}

/// Storage mode for inherently dense kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    /// Restrict to sparse supports (edges with self, or two-hop pairs).
    Sparse,
    /// Full `n x n` values.
    Dense,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimStorage {
    Sparse(CsrMatrix),
    Dense(Array2<f64>),
}

/// One relation's pairwise similarity values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimMatrix {
    relation: RelationId,
    storage: SimStorage,
    /// False when an iterative kernel hit its iteration cap.
    converged: bool,
}

impl SimMatrix {
    pub fn from_csr(relation: RelationId, m: CsrMatrix) -> Self {
        debug_assert_eq!(m.rows(), m.cols());
        Self {
            relation,
            storage: SimStorage::Sparse(m),
            converged: true,
        }
    }

    pub fn from_dense(relation: RelationId, m: Array2<f64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self {
            relation,
            storage: SimStorage::Dense(m),
            converged: true,
        }
    }

    pub(crate) fn with_converged(mut self, converged: bool) -> Self {
        self.converged = converged;
        self
    }

    pub fn relation(&self) -> RelationId {
        self.relation
    }

    pub fn n(&self) -> usize {
        match &self.storage {
            SimStorage::Sparse(m) => m.rows(),
            SimStorage::Dense(m) => m.nrows(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, SimStorage::Sparse(_))
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn storage(&self) -> &SimStorage {
        &self.storage
    }

    /// Similarity of a pair; unstored sparse entries read as 0.
    pub fn get(&self, u: usize, v: usize) -> f64 {
        match &self.storage {
            SimStorage::Sparse(m) => m.get(u, v),
            SimStorage::Dense(m) => m[(u, v)],
        }
    }

    /// Stored entries of one row as `(column, value)`, ascending column.
    /// Dense rows yield all `n` entries.
    pub fn stored_row(&self, u: usize) -> StoredRow<'_> {
        match &self.storage {
            SimStorage::Sparse(m) => {
                let (idx, val) = m.row(u);
                StoredRow::Sparse { idx, val, pos: 0 }
            }
            SimStorage::Dense(m) => StoredRow::Dense {
                row: m.row(u),
                pos: 0,
            },
        }
    }

    /// Number of stored entries.
    pub fn stored_len(&self) -> usize {
        match &self.storage {
            SimStorage::Sparse(m) => m.nnz(),
            SimStorage::Dense(m) => m.len(),
        }
    }

    /// Min and max over stored entries (0, 0) when nothing is stored.
    pub fn value_range(&self) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut any = false;
        let mut update = |v: f64| {
            any = true;
            min = min.min(v);
            max = max.max(v);
        };
        match &self.storage {
            SimStorage::Sparse(m) => m.values().iter().copied().for_each(&mut update),
            SimStorage::Dense(m) => m.iter().copied().for_each(&mut update),
        }
        if any {
            (min, max)
        } else {
            (0.0, 0.0)
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        match &self.storage {
            SimStorage::Sparse(m) => m.to_dense(),
            SimStorage::Dense(m) => m.clone(),
        }
    }

    /// `self * b` for dense `b` (used by the attribute-label kernel).
    pub fn dot_dense(&self, b: &Array2<f64>) -> Result<Array2<f64>> {
        match &self.storage {
            SimStorage::Sparse(m) => m.spmm(&b.view()),
            SimStorage::Dense(m) => {
                if m.ncols() != b.nrows() {
                    return Err(Error::invalid("dot_dense: dimension mismatch"));
                }
                Ok(m.dot(b))
            }
        }
    }

    /// Check the `[0, 1]` / finiteness invariant over stored entries.
    pub fn validate(&self) -> Result<()> {
        let bad = |v: &f64| !v.is_finite() || *v < 0.0 || *v > 1.0;
        let any_bad = match &self.storage {
            SimStorage::Sparse(m) => m.values().iter().any(bad),
            SimStorage::Dense(m) => m.iter().any(bad),
        };
        if any_bad {
            return Err(Error::Numeric(format!(
                "similarity out of [0,1] for relation {}",
                self.relation
            )));
        }
        Ok(())
    }
}

/// Iterator over one row's stored entries.
pub enum StoredRow<'a> {
    Sparse {
        idx: &'a [usize],
        val: &'a [f64],
        pos: usize,
    },
    Dense {
        row: ndarray::ArrayView1<'a, f64>,
        pos: usize,
    },
}

impl Iterator for StoredRow<'_> {
    type Item = (usize, f64);

    fn next(&mut self) -> Option<(usize, f64)> {
        match self {
            StoredRow::Sparse { idx, val, pos } => {
                if *pos < idx.len() {
                    let item = (idx[*pos], val[*pos]);
                    *pos += 1;
                    Some(item)
                } else {
                    None
                }
            }
            StoredRow::Dense { row, pos } => {
                if *pos < row.len() {
                    let item = (*pos, row[*pos]);
                    *pos += 1;
                    Some(item)
                } else {
                    None
                }
            }
        }
    }
}

/// Kernel parameters and storage mode for a relation computation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RelationConfig {
    pub mode: SimMode,
    pub percentile: f64,
    pub pagerank: PageRankParams,
    pub attr_dist_k: usize,
    pub label_dist_k: usize,
}

impl Default for RelationConfig {
    fn default() -> Self {
        Self {
            mode: SimMode::Sparse,
            percentile: 99.0,
            pagerank: PageRankParams::default(),
            attr_dist_k: 1,
            label_dist_k: 2,
        }
    }
}

/// A set of computed relations with their per-node thresholds.
#[derive(Debug, Clone, Default)]
pub struct RelationSet {
    sims: BTreeMap<RelationId, SimMatrix>,
    thresholds: BTreeMap<RelationId, ThresholdVector>,
}

impl RelationSet {
    pub fn insert(&mut self, sim: SimMatrix, thresholds: ThresholdVector) {
        debug_assert_eq!(sim.relation(), thresholds.relation());
        self.thresholds.insert(sim.relation(), thresholds);
        self.sims.insert(sim.relation(), sim);
    }

    pub fn ids(&self) -> Vec<RelationId> {
        self.sims.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.sims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sims.is_empty()
    }

    pub fn sim(&self, r: RelationId) -> Result<&SimMatrix> {
        self.sims
            .get(&r)
            .ok_or_else(|| Error::invalid(format!("relation {r} not computed")))
    }

    pub fn thresholds(&self, r: RelationId) -> Result<&ThresholdVector> {
        self.thresholds
            .get(&r)
            .ok_or_else(|| Error::invalid(format!("thresholds for {r} not computed")))
    }

    pub fn n(&self) -> usize {
        self.sims.values().next().map_or(0, |s| s.n())
    }
}

/// Compute one relation's similarity matrix.
pub fn compute_sim(
    g: &Graph,
    relation: RelationId,
    labels_on: Option<&LabelSplit>,
    cfg: &RelationConfig,
) -> Result<SimMatrix> {
    let need_split = || {
        labels_on.ok_or_else(|| {
            Error::invalid(format!("relation {relation} requires labels"))
        })
    };
    match relation {
        RelationId::Link => Ok(kernels::link_sim(g, cfg.mode)),
        RelationId::PageRank => Ok(kernels::pagerank_sim(g, &cfg.pagerank, cfg.mode)),
        RelationId::JaccardSim => kernels::jaccard_sim(g, 1, cfg.mode),
        RelationId::TopologySim => Ok(kernels::topology_sim(g, cfg.mode)),
        RelationId::GraphDistance => Ok(kernels::graph_distance_sim(g)),
        RelationId::AttrSim => Ok(kernels::attr_sim(g, cfg.mode)),
        RelationId::AttrDist1 => kernels::attr_dist_sim(g, cfg.attr_dist_k, cfg.mode),
        RelationId::LabelDist2 => {
            kernels::label_dist_sim(g, need_split()?, cfg.label_dist_k, cfg.mode)
        }
        RelationId::AttrLabelDist => {
            let attr_dist = kernels::attr_dist_sim(g, cfg.attr_dist_k, cfg.mode)?;
            kernels::attr_label_dist_sim(g, need_split()?, &attr_dist, cfg.mode)
        }
    }
}

/// Compute a set of relations plus their thresholds.
///
/// `labels_on` restricts label-based relations to training labels; pass
/// [`LabelSplit::full`] when labels are not the prediction target.
pub fn compute_relations(
    g: &Graph,
    relations: &[RelationId],
    labels_on: Option<&LabelSplit>,
    cfg: &RelationConfig,
) -> Result<RelationSet> {
    let mut set = RelationSet::default();
    // AttrLabelDist reuses AttrDist1 when both are requested.
    let mut attr_dist_cache: Option<SimMatrix> = None;
    for &r in relations {
        let sim = match r {
            RelationId::AttrDist1 => {
                let s = kernels::attr_dist_sim(g, cfg.attr_dist_k, cfg.mode)?;
                attr_dist_cache = Some(s.clone());
                s
            }
            RelationId::AttrLabelDist => {
                let split = labels_on.ok_or_else(|| {
                    Error::invalid(format!("relation {r} requires labels"))
                })?;
                let attr_dist = match &attr_dist_cache {
                    Some(s) => s.clone(),
                    None => kernels::attr_dist_sim(g, cfg.attr_dist_k, cfg.mode)?,
                };
                kernels::attr_label_dist_sim(g, split, &attr_dist, cfg.mode)?
            }
            _ => compute_sim(g, r, labels_on, cfg)?,
        };
        sim.validate()?;
        let thr = per_node_threshold(&sim, cfg.percentile)?;
        set.insert(sim, thr);
    }
    Ok(set)
}
