//! Per-node decision thresholds.

use serde::{Deserialize, Serialize};

use super::{RelationId, SimMatrix, SimStorage};
use crate::error::{Error, Result};

/// Per-node similarity cutoffs for one relation: a stump fires on `(u, v)`
/// when `s(u, v) >= values[u]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdVector {
    relation: RelationId,
    values: Vec<f64>,
    percentile: f64,
}

impl ThresholdVector {
    pub fn new(relation: RelationId, values: Vec<f64>, percentile: f64) -> Self {
        Self {
            relation,
            values,
            percentile,
        }
    }

    pub fn relation(&self) -> RelationId {
        self.relation
    }

    pub fn percentile(&self) -> f64 {
        self.percentile
    }

    pub fn get(&self, u: usize) -> f64 {
        self.values[u]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Nearest-rank percentile: the `ceil(p/100 * N)`-th smallest value.
fn nearest_rank(sorted: &[f64], percentile: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let n = sorted.len();
    let rank = ((percentile / 100.0) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Per-node nearest-rank percentile of each row's value population.
///
/// Dense rows use all `n` values including zeros; sparse rows use the stored
/// nonzeros only. A sparse row with no nonzeros gets threshold 1.0, so the
/// node never fires on that relation.
pub fn per_node_threshold(s: &SimMatrix, percentile: f64) -> Result<ThresholdVector> {
    if !(0.0 < percentile && percentile < 100.0) {
        return Err(Error::invalid("percentile must be in (0, 100)"));
    }
    let n = s.n();
    let mut values = Vec::with_capacity(n);
    let mut buf: Vec<f64> = Vec::new();
    for u in 0..n {
        buf.clear();
        match s.storage() {
            SimStorage::Dense(m) => buf.extend(m.row(u).iter().copied()),
            SimStorage::Sparse(_) => {
                buf.extend(s.stored_row(u).map(|(_, v)| v).filter(|&v| v != 0.0))
            }
        }
        if buf.is_empty() {
            values.push(1.0);
            continue;
        }
        buf.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        values.push(nearest_rank(&buf, percentile));
    }
    Ok(ThresholdVector::new(s.relation(), values, percentile))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CsrMatrix;
    use ndarray::Array2;

    #[test]
    fn constant_row_threshold_is_the_constant() {
        let m = Array2::from_elem((3, 3), 0.4);
        let s = SimMatrix::from_dense(RelationId::AttrSim, m);
        let t = per_node_threshold(&s, 99.0).unwrap();
        for u in 0..3 {
            assert_eq!(t.get(u), 0.4);
        }
    }

    #[test]
    fn nearest_rank_hand_case() {
        // Row values {0.1 * i : i = 1..=100}; 99th percentile is the 99th
        // smallest, 9.9. (Threshold math only; not a similarity row.)
        let vals: Vec<f64> = (1..=100).map(|i| 0.1 * i as f64).collect();
        assert!((nearest_rank(&vals, 99.0) - 9.9).abs() < 1e-12);
        assert!((nearest_rank(&vals, 50.0) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn empty_sparse_row_never_fires() {
        let m = CsrMatrix::from_rows(2, vec![vec![], vec![(0, 0.5)]]).unwrap();
        let s = SimMatrix::from_csr(RelationId::Link, m);
        let t = per_node_threshold(&s, 99.0).unwrap();
        assert_eq!(t.get(0), 1.0);
        assert_eq!(t.get(1), 0.5);
    }

    #[test]
    fn sparse_population_skips_stored_zeros() {
        let m = CsrMatrix::from_rows(1, vec![vec![(0, 0.0)]]).unwrap();
        let s = SimMatrix::from_csr(RelationId::JaccardSim, m);
        let t = per_node_threshold(&s, 99.0).unwrap();
        assert_eq!(t.get(0), 1.0);
    }

    #[test]
    fn percentile_bounds_checked() {
        let s = SimMatrix::from_dense(RelationId::AttrSim, Array2::zeros((1, 1)));
        assert!(per_node_threshold(&s, 0.0).is_err());
        assert!(per_node_threshold(&s, 100.0).is_err());
    }
}
