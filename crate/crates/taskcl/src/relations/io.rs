//! Similarity cache files.
//!
//! One file per relation, `<relation>.sim`. Sparse matrices use the `TCLS`
//! CSR binary (magic, u64 n, u64 nnz, u64 offsets, u64 indices, f64
//! values); dense matrices reuse the `TCLM` dense format. Both are
//! little-endian and self-describing via the magic.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{RelationId, SimMatrix, SimStorage};
use crate::error::{Error, Result};
use crate::graph::io::{read_dense_matrix, write_dense_matrix, DENSE_MAGIC};
use crate::graph::CsrMatrix;

pub const SPARSE_MAGIC: &[u8; 4] = b"TCLS";

pub fn write_sim_file(path: &Path, sim: &SimMatrix) -> Result<()> {
    match sim.storage() {
        SimStorage::Dense(m) => write_dense_matrix(path, m),
        SimStorage::Sparse(m) => write_csr(path, m),
    }
}

pub fn read_sim_file(path: &Path, relation: RelationId) -> Result<SimMatrix> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut magic = [0u8; 4];
    file.read_exact(&mut magic).map_err(|e| Error::io(path, e))?;
    drop(file);
    if &magic == SPARSE_MAGIC {
        Ok(SimMatrix::from_csr(relation, read_csr(path)?))
    } else if &magic == DENSE_MAGIC {
        Ok(SimMatrix::from_dense(relation, read_dense_matrix(path)?))
    } else {
        Err(Error::data(path, 0, "not a similarity file"))
    }
}

fn write_csr(path: &Path, m: &CsrMatrix) -> Result<()> {
    if m.rows() != m.cols() {
        return Err(Error::invalid("similarity matrices are square"));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    w.write_all(SPARSE_MAGIC).map_err(io)?;
    w.write_u64::<LittleEndian>(m.rows() as u64).map_err(io)?;
    w.write_u64::<LittleEndian>(m.nnz() as u64).map_err(io)?;
    for &o in m.offsets() {
        w.write_u64::<LittleEndian>(o as u64).map_err(io)?;
    }
    for &i in m.indices() {
        w.write_u64::<LittleEndian>(i as u64).map_err(io)?;
    }
    for &v in m.values() {
        w.write_f64::<LittleEndian>(v).map_err(io)?;
    }
    w.flush().map_err(io)
}

fn read_csr(path: &Path) -> Result<CsrMatrix> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|e| Error::io(path, e))?;
    if &magic != SPARSE_MAGIC {
        return Err(Error::data(path, 0, "not a TCLS file"));
    }
    let truncated = |_| Error::data(path, 0, "truncated TCLS file");
    let n = r.read_u64::<LittleEndian>().map_err(truncated)? as usize;
    let nnz = r.read_u64::<LittleEndian>().map_err(truncated)? as usize;
    let mut offsets = vec![0u64; n + 1];
    r.read_u64_into::<LittleEndian>(&mut offsets).map_err(truncated)?;
    let mut indices = vec![0u64; nnz];
    r.read_u64_into::<LittleEndian>(&mut indices).map_err(truncated)?;
    let mut values = vec![0.0f64; nnz];
    r.read_f64_into::<LittleEndian>(&mut values).map_err(truncated)?;
    CsrMatrix::new(
        n,
        n,
        offsets.into_iter().map(|v| v as usize).collect(),
        indices.into_iter().map(|v| v as usize).collect(),
        values,
    )
    .map_err(|e| Error::data(path, 0, format!("invalid TCLS payload: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use tempfile::TempDir;

    #[test]
    fn sparse_round_trip() {
        let tmp = TempDir::new().unwrap();
        let m = CsrMatrix::from_rows(
            3,
            vec![vec![(0, 1.0), (2, 0.25)], vec![], vec![(1, 0.5)]],
        )
        .unwrap();
        let sim = SimMatrix::from_csr(RelationId::JaccardSim, m);
        let p = tmp.path().join("jaccard.sim");
        write_sim_file(&p, &sim).unwrap();
        let back = read_sim_file(&p, RelationId::JaccardSim).unwrap();
        assert_eq!(back, sim);
    }

    #[test]
    fn dense_round_trip() {
        let tmp = TempDir::new().unwrap();
        let sim = SimMatrix::from_dense(
            RelationId::GraphDistance,
            array![[1.0, 0.5], [0.5, 1.0]],
        );
        let p = tmp.path().join("graph-distance.sim");
        write_sim_file(&p, &sim).unwrap();
        assert_eq!(read_sim_file(&p, RelationId::GraphDistance).unwrap(), sim);
    }

    #[test]
    fn truncated_file_is_an_error() {
        let tmp = TempDir::new().unwrap();
        let p = tmp.path().join("bad.sim");
        std::fs::write(&p, b"TCLS\x03\x00\x00").unwrap();
        assert!(read_sim_file(&p, RelationId::Link).is_err());
    }
}
