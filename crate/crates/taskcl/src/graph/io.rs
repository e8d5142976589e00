//! Dataset files: manifest, edge list, attributes, labels, splits.
//!
//! Formats:
//! - manifest: JSON object `{name, edges, features, labels?}`; relative
//!   paths resolve against the manifest's directory;
//! - edge list: UTF-8 text, one `u v` pair of 0-based integers per line,
//!   `#` comments allowed;
//! - attributes: CSV (`n` rows, `m` decimal columns) or binary `TCLM`
//!   (magic, u64 rows, u64 cols, little-endian f64 row-major);
//! - labels: text, `node_id label_id` per line, one line per node.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{EdgeSplit, Graph, LabelSplit};
use crate::error::{Error, Result};

pub const DENSE_MAGIC: &[u8; 4] = b"TCLM";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: String,
    pub edges: PathBuf,
    pub features: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<PathBuf>,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Load a graph from a manifest file.
pub fn load_graph(manifest_path: &Path) -> Result<Graph> {
    let raw = fs::read_to_string(manifest_path)
        .map_err(|e| Error::io(manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&raw)
        .map_err(|e| Error::data(manifest_path, 0, format!("bad manifest: {e}")))?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));

    let attrs = read_attributes(&resolve(base, &manifest.features))?;
    let n = attrs.nrows();
    let edges = read_edge_list(&resolve(base, &manifest.edges), n)?;
    let labels = match &manifest.labels {
        Some(p) => Some(read_labels(&resolve(base, p), n)?),
        None => None,
    };
    Ok(Graph::new(&edges, attrs, labels)?.with_name(manifest.name))
}

/// Write a graph (edge list, TCLM attributes, labels, manifest) into `dir`;
/// returns the manifest path.
pub fn save_graph(g: &Graph, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let edges_path = dir.join("edges.txt");
    let mut w = BufWriter::new(File::create(&edges_path).map_err(|e| Error::io(&edges_path, e))?);
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}").map_err(|e| Error::io(&edges_path, e))?;
    }
    w.flush().map_err(|e| Error::io(&edges_path, e))?;

    let feat_path = dir.join("features.bin");
    write_dense_matrix(&feat_path, g.attrs())?;

    let mut manifest = Manifest {
        name: g.name().to_string(),
        edges: PathBuf::from("edges.txt"),
        features: PathBuf::from("features.bin"),
        labels: None,
    };
    if let Some(y) = g.labels() {
        let label_path = dir.join("labels.txt");
        let mut w =
            BufWriter::new(File::create(&label_path).map_err(|e| Error::io(&label_path, e))?);
        for (u, c) in y.iter().enumerate() {
            writeln!(w, "{u} {c}").map_err(|e| Error::io(&label_path, e))?;
        }
        w.flush().map_err(|e| Error::io(&label_path, e))?;
        manifest.labels = Some(PathBuf::from("labels.txt"));
    }
    let manifest_path = dir.join("manifest.json");
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&manifest_path, body).map_err(|e| Error::io(&manifest_path, e))?;
    Ok(manifest_path)
}

fn read_edge_list(path: &Path, n: usize) -> Result<Vec<(usize, usize)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut edges = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut parts = body.split_whitespace();
        let (u, v) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::data(
                    path,
                    lineno,
                    format!("expected 'u v', got {body:?}"),
                ))
            }
        };
        let u: usize = u
            .parse()
            .map_err(|_| Error::data(path, lineno, format!("bad node id {u:?}")))?;
        let v: usize = v
            .parse()
            .map_err(|_| Error::data(path, lineno, format!("bad node id {v:?}")))?;
        if u >= n || v >= n {
            return Err(Error::data(
                path,
                lineno,
                format!("endpoint out of range: ({u}, {v}) with n = {n}"),
            ));
        }
        edges.push((u, v));
    }
    Ok(edges)
}

fn read_labels(path: &Path, n: usize) -> Result<Vec<usize>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut labels: Vec<Option<usize>> = vec![None; n];
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut parts = body.split_whitespace();
        let (u, c) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::data(
                    path,
                    lineno,
                    format!("expected 'node_id label_id', got {body:?}"),
                ))
            }
        };
        let u: usize = u
            .parse()
            .map_err(|_| Error::data(path, lineno, format!("bad node id {u:?}")))?;
        let c: usize = c
            .parse()
            .map_err(|_| Error::data(path, lineno, format!("bad label {c:?}")))?;
        if u >= n {
            return Err(Error::data(path, lineno, format!("node id {u} >= n = {n}")));
        }
        if labels[u].replace(c).is_some() {
            return Err(Error::data(path, lineno, format!("duplicate label for node {u}")));
        }
    }
    let mut out = Vec::with_capacity(n);
    for (u, l) in labels.into_iter().enumerate() {
        match l {
            Some(c) => out.push(c),
            None => return Err(Error::data(path, 0, format!("node {u} has no label"))),
        }
    }
    Ok(out)
}

/// Attributes: binary `TCLM` when the file starts with the magic, CSV text
/// otherwise.
pub fn read_attributes(path: &Path) -> Result<Array2<f64>> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut magic = [0u8; 4];
    let is_binary = match file.read_exact(&mut magic) {
        Ok(()) => &magic == DENSE_MAGIC,
        Err(_) => false,
    };
    drop(file);
    if is_binary {
        read_dense_matrix(path)
    } else {
        read_csv_matrix(path)
    }
}

fn read_csv_matrix(path: &Path) -> Result<Array2<f64>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::data(path, lineno, format!("bad number {cell:?}")))
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::data(
                    path,
                    lineno,
                    format!("ragged row: {} columns, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::data(path, 0, "attribute file is empty"));
    }
    let (n, m) = (rows.len(), rows[0].len());
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Array2::from_shape_vec((n, m), flat)
        .map_err(|e| Error::data(path, 0, format!("shape error: {e}")))
}

/// Read a `TCLM` dense matrix.
pub fn read_dense_matrix(path: &Path) -> Result<Array2<f64>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|e| Error::io(path, e))?;
    if &magic != DENSE_MAGIC {
        return Err(Error::data(path, 0, "not a TCLM matrix file"));
    }
    let rows = r.read_u64::<LittleEndian>().map_err(|e| Error::io(path, e))? as usize;
    let cols = r.read_u64::<LittleEndian>().map_err(|e| Error::io(path, e))? as usize;
    let mut flat = vec![0.0f64; rows * cols];
    r.read_f64_into::<LittleEndian>(&mut flat)
        .map_err(|_| Error::data(path, 0, "truncated TCLM matrix file"))?;
    Array2::from_shape_vec((rows, cols), flat)
        .map_err(|e| Error::data(path, 0, format!("shape error: {e}")))
}

/// Write a dense matrix in `TCLM` format.
pub fn write_dense_matrix(path: &Path, m: &Array2<f64>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(DENSE_MAGIC).map_err(|e| Error::io(path, e))?;
    w.write_u64::<LittleEndian>(m.nrows() as u64)
        .map_err(|e| Error::io(path, e))?;
    w.write_u64::<LittleEndian>(m.ncols() as u64)
        .map_err(|e| Error::io(path, e))?;
    for &v in m.iter() {
        w.write_f64::<LittleEndian>(v).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// A saved label or edge split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SplitFile {
    Labels(LabelSplit),
    Edges(EdgeSplit),
}

pub fn save_split(path: &Path, split: &SplitFile) -> Result<()> {
    let body = serde_json::to_string_pretty(split).expect("split serializes");
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

pub fn load_split(path: &Path) -> Result<SplitFile> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&raw).map_err(|e| Error::data(path, 0, format!("bad split file: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use tempfile::TempDir;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn triangle_manifest_loads() {
        let tmp = TempDir::new().unwrap();
        write(tmp.path(), "edges.txt", "0 1\n1 2\n2 0\n# comment\n");
        write(tmp.path(), "feat.csv", "1.0,0.0\n0.0,1.0\n0.5,0.5\n");
        let manifest = write(
            tmp.path(),
            "manifest.json",
            r#"{"name":"tri","edges":"edges.txt","features":"feat.csv"}"#,
        );
        let g = load_graph(&manifest).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.attr_dim(), 2);
        assert_eq!(g.name(), "tri");
    }

    #[test]
    fn reversed_duplicate_edge_collapses() {
        let tmp = TempDir::new().unwrap();
        write(tmp.path(), "edges.txt", "0 1\n1 0\n");
        write(tmp.path(), "feat.csv", "1.0\n2.0\n");
        let manifest = write(
            tmp.path(),
            "manifest.json",
            r#"{"name":"pair","edges":"edges.txt","features":"feat.csv"}"#,
        );
        let g = load_graph(&manifest).unwrap();
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn endpoint_out_of_range_names_file_and_line() {
        let tmp = TempDir::new().unwrap();
        write(tmp.path(), "edges.txt", "0 1\n0 5\n");
        write(tmp.path(), "feat.csv", "1.0\n2.0\n3.0\n");
        let manifest = write(
            tmp.path(),
            "manifest.json",
            r#"{"name":"bad","edges":"edges.txt","features":"feat.csv"}"#,
        );
        let err = load_graph(&manifest).unwrap_err().to_string();
        assert!(err.contains("edges.txt:2"), "got: {err}");
        assert!(err.contains("out of range"), "got: {err}");
    }

    #[test]
    fn label_value_and_coverage_checks() {
        let tmp = TempDir::new().unwrap();
        write(tmp.path(), "edges.txt", "0 1\n");
        write(tmp.path(), "feat.csv", "1.0\n2.0\n");
        write(tmp.path(), "labels.txt", "0 1\n"); // node 1 missing
        let manifest = write(
            tmp.path(),
            "manifest.json",
            r#"{"name":"l","edges":"edges.txt","features":"feat.csv","labels":"labels.txt"}"#,
        );
        let err = load_graph(&manifest).unwrap_err().to_string();
        assert!(err.contains("has no label"), "got: {err}");
    }

    #[test]
    fn unknown_manifest_keys_rejected() {
        let tmp = TempDir::new().unwrap();
        write(tmp.path(), "edges.txt", "0 1\n");
        write(tmp.path(), "feat.csv", "1.0\n2.0\n");
        let manifest = write(
            tmp.path(),
            "manifest.json",
            r#"{"name":"x","edges":"edges.txt","features":"feat.csv","extra":1}"#,
        );
        assert!(load_graph(&manifest).is_err());
    }

    #[test]
    fn dense_matrix_round_trip() {
        let tmp = TempDir::new().unwrap();
        let m = array![[1.5, -2.0], [0.0, 3.25]];
        let p = tmp.path().join("m.bin");
        write_dense_matrix(&p, &m).unwrap();
        assert_eq!(read_dense_matrix(&p).unwrap(), m);
        // and the sniffer picks the binary branch
        assert_eq!(read_attributes(&p).unwrap(), m);
    }

    #[test]
    fn graph_save_load_round_trip() {
        let tmp = TempDir::new().unwrap();
        let x = array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]];
        let g = Graph::new(&[(0, 1), (1, 2)], x, Some(vec![0, 1, 1]))
            .unwrap()
            .with_name("rt");
        let manifest = save_graph(&g, tmp.path()).unwrap();
        let h = load_graph(&manifest).unwrap();
        assert_eq!(h.n(), g.n());
        assert_eq!(h.edges(), g.edges());
        assert_eq!(h.attrs(), g.attrs());
        assert_eq!(h.labels(), g.labels());
        assert_eq!(h.class_count(), g.class_count());
        assert_eq!(h.name(), "rt");
    }

    #[test]
    fn split_file_round_trip() {
        let tmp = TempDir::new().unwrap();
        let p = tmp.path().join("split.json");
        let s = SplitFile::Labels(LabelSplit {
            train: vec![0, 2],
            test: vec![1, 3],
            seed: 9,
        });
        save_split(&p, &s).unwrap();
        assert_eq!(load_split(&p).unwrap(), s);
    }
}
