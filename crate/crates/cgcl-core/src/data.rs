//! TUDataset-format parsing and binary persistence.
//!
//! Text inputs per dataset `NAME` in one directory:
//! `NAME_A.txt` (comma-separated 1-based global edge pairs),
//! `NAME_graph_indicator.txt` (1-based graph id per node line),
//! `NAME_graph_labels.txt`, optional `NAME_node_labels.txt`.
//!
//! Binary caches use little-endian fixed layouts:
//! embeddings `CGEM`: magic, version u32, fingerprint u64, rows u64,
//! cols u64, then per column a u32 length + UTF-8 schema name, then
//! row-major f64 values. Checkpoints `CGCK`: magic, version u32,
//! fingerprint u64, dims d/h/p as u64, then w1, b1, w2, b2, w3, b3
//! row-major f64.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::graph::Graph;
use crate::train::EncoderParams;
use crate::{Error, Result};

const EMBED_MAGIC: &[u8; 4] = b"CGEM";
const CHECKPOINT_MAGIC: &[u8; 4] = b"CGCK";
const FORMAT_VERSION: u32 = 1;

/// A parsed benchmark: every graph labeled, labels remapped to 0..C−1.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub graphs: Vec<Graph>,
    pub n_classes: usize,
    /// Self-loop lines dropped during parsing.
    pub self_loops_dropped: usize,
    /// Duplicate or reciprocal edge lines collapsed.
    pub duplicate_edges_collapsed: usize,
}

impl Dataset {
    pub fn labels(&self) -> Vec<usize> {
        self.graphs
            .iter()
            .map(|g| g.graph_label.expect("parsed graphs are labeled") as usize)
            .collect()
    }

    pub fn mean_nodes(&self) -> f64 {
        self.graphs.iter().map(|g| g.n()).sum::<usize>() as f64 / self.graphs.len() as f64
    }

    pub fn mean_edges(&self) -> f64 {
        self.graphs.iter().map(|g| g.num_edges()).sum::<usize>() as f64
            / self.graphs.len() as f64
    }

    pub fn node_range(&self) -> (usize, usize) {
        let min = self.graphs.iter().map(|g| g.n()).min().unwrap_or(0);
        let max = self.graphs.iter().map(|g| g.n()).max().unwrap_or(0);
        (min, max)
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Ok(text
        .lines()
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .collect())
}

fn parse_int(token: &str, file: &Path, line: usize) -> Result<i64> {
    token.trim().parse::<i64>().map_err(|_| Error::Parse {
        file: file.display().to_string(),
        line,
        msg: format!("non-integer token '{}'", token.trim()),
    })
}

/// Parses a TUDataset directory. 1-based file ids become dense 0-based ids
/// per graph; reciprocal edge lines collapse to one undirected edge;
/// self-loops are dropped and counted.
pub fn parse_tudataset(dir: &Path, name: &str) -> Result<Dataset> {
    let file = |suffix: &str| -> PathBuf { dir.join(format!("{name}_{suffix}.txt")) };

    let indicator_path = file("graph_indicator");
    let indicator = read_lines(&indicator_path)?;
    let mut graph_of_node = Vec::with_capacity(indicator.len());
    for (i, line) in indicator.iter().enumerate() {
        let gid = parse_int(line, &indicator_path, i + 1)?;
        if gid < 1 {
            return Err(Error::Parse {
                file: indicator_path.display().to_string(),
                line: i + 1,
                msg: format!("graph id {gid} is not positive"),
            });
        }
        graph_of_node.push((gid - 1) as usize);
    }
    let n_graphs = graph_of_node.iter().max().map(|&g| g + 1).unwrap_or(0);
    if n_graphs == 0 {
        return Err(Error::Parse {
            file: indicator_path.display().to_string(),
            line: 0,
            msg: "empty graph indicator".into(),
        });
    }

    // Global 1-based node id -> (graph, local 0-based id).
    let mut local_id = Vec::with_capacity(graph_of_node.len());
    let mut nodes_per_graph = vec![0usize; n_graphs];
    for &g in &graph_of_node {
        local_id.push(nodes_per_graph[g] as u32);
        nodes_per_graph[g] += 1;
    }

    let labels_path = file("graph_labels");
    let label_lines = read_lines(&labels_path)?;
    if label_lines.len() != n_graphs {
        return Err(Error::Parse {
            file: labels_path.display().to_string(),
            line: label_lines.len(),
            msg: format!(
                "{} graph labels for {} graphs",
                label_lines.len(),
                n_graphs
            ),
        });
    }
    let raw_labels: Vec<i64> = label_lines
        .iter()
        .enumerate()
        .map(|(i, l)| parse_int(l, &labels_path, i + 1))
        .collect::<Result<_>>()?;
    let mut distinct: Vec<i64> = raw_labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let remap = |raw: i64| distinct.binary_search(&raw).unwrap() as i64;

    let mut graphs: Vec<Graph> = nodes_per_graph.iter().map(|&n| Graph::new(n)).collect();
    for (g, label) in graphs.iter_mut().zip(&raw_labels) {
        g.graph_label = Some(remap(*label));
    }

    let node_labels_path = file("node_labels");
    if node_labels_path.exists() {
        let lines = read_lines(&node_labels_path)?;
        if lines.len() != graph_of_node.len() {
            return Err(Error::Parse {
                file: node_labels_path.display().to_string(),
                line: lines.len(),
                msg: format!(
                    "{} node labels for {} nodes",
                    lines.len(),
                    graph_of_node.len()
                ),
            });
        }
        for g in graphs.iter_mut() {
            g.node_labels = Some(Vec::new());
        }
        for (i, line) in lines.iter().enumerate() {
            let v = parse_int(line, &node_labels_path, i + 1)?;
            graphs[graph_of_node[i]]
                .node_labels
                .as_mut()
                .unwrap()
                .push(v);
        }
    }

    let edges_path = file("A");
    let edge_lines = read_lines(&edges_path)?;
    let mut self_loops = 0usize;
    let mut duplicates = 0usize;
    for (i, line) in edge_lines.iter().enumerate() {
        let mut parts = line.split(',');
        let (u_tok, v_tok) = match (parts.next(), parts.next()) {
            (Some(u), Some(v)) => (u, v),
            _ => {
                return Err(Error::Parse {
                    file: edges_path.display().to_string(),
                    line: i + 1,
                    msg: format!("expected 'u, v', got '{line}'"),
                })
            }
        };
        let u = parse_int(u_tok, &edges_path, i + 1)?;
        let v = parse_int(v_tok, &edges_path, i + 1)?;
        let max_id = graph_of_node.len() as i64;
        if u < 1 || v < 1 || u > max_id || v > max_id {
            return Err(Error::Parse {
                file: edges_path.display().to_string(),
                line: i + 1,
                msg: format!("node id out of range in edge ({u}, {v})"),
            });
        }
        let (u, v) = ((u - 1) as usize, (v - 1) as usize);
        if graph_of_node[u] != graph_of_node[v] {
            return Err(Error::Parse {
                file: edges_path.display().to_string(),
                line: i + 1,
                msg: format!(
                    "edge ({}, {}) crosses graphs {} and {}",
                    u + 1,
                    v + 1,
                    graph_of_node[u] + 1,
                    graph_of_node[v] + 1
                ),
            });
        }
        if u == v {
            self_loops += 1;
            continue;
        }
        let g = &mut graphs[graph_of_node[u]];
        let (lu, lv) = (local_id[u], local_id[v]);
        if g.has_edge(lu, lv) {
            duplicates += 1;
        } else {
            g.add_edge(lu, lv).expect("validated edge");
        }
    }

    Ok(Dataset {
        name: name.to_string(),
        graphs,
        n_classes: distinct.len(),
        self_loops_dropped: self_loops,
        duplicate_edges_collapsed: duplicates,
    })
}

fn put_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(buf: &mut Vec<u8>, v: u64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn put_f64s(buf: &mut Vec<u8>, values: impl Iterator<Item = f64>) {
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
    path: String,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(Error::FormatMismatch(format!(
                "{}: truncated at byte {}",
                self.path, self.pos
            )));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

fn check_header(r: &mut Reader, magic: &[u8; 4]) -> Result<u64> {
    let found = r.take(4)?;
    if found != magic {
        return Err(Error::FormatMismatch(format!(
            "{}: bad magic {:?}",
            r.path, found
        )));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::FormatMismatch(format!(
            "{}: version {} unsupported (expected {})",
            r.path, version, FORMAT_VERSION
        )));
    }
    r.u64() // fingerprint
}

/// Serialized embedding matrix with schema and config fingerprint.
pub fn save_embeddings(
    path: &Path,
    schema: &[String],
    matrix: &DMatrix<f64>,
    fingerprint: u64,
) -> Result<()> {
    if schema.is_empty() {
        return Err(Error::FormatMismatch("empty schema".into()));
    }
    if schema.len() != matrix.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "{} schema names for {} columns",
            schema.len(),
            matrix.ncols()
        )));
    }
    let mut buf = Vec::new();
    buf.extend_from_slice(EMBED_MAGIC);
    put_u32(&mut buf, FORMAT_VERSION);
    put_u64(&mut buf, fingerprint);
    put_u64(&mut buf, matrix.nrows() as u64);
    put_u64(&mut buf, matrix.ncols() as u64);
    for name in schema {
        put_u32(&mut buf, name.len() as u32);
        buf.extend_from_slice(name.as_bytes());
    }
    for i in 0..matrix.nrows() {
        put_f64s(&mut buf, matrix.row(i).iter().cloned());
    }
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(&buf).map_err(|e| io_err(path, e))
}

pub struct EmbeddingFile {
    pub schema: Vec<String>,
    pub matrix: DMatrix<f64>,
    pub fingerprint: u64,
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingFile> {
    let mut data = Vec::new();
    fs::File::open(path)
        .map_err(|e| io_err(path, e))?
        .read_to_end(&mut data)
        .map_err(|e| io_err(path, e))?;
    let mut r = Reader {
        data: &data,
        pos: 0,
        path: path.display().to_string(),
    };
    let fingerprint = check_header(&mut r, EMBED_MAGIC)?;
    let rows = r.u64()? as usize;
    let cols = r.u64()? as usize;
    let mut schema = Vec::with_capacity(cols);
    for _ in 0..cols {
        let len = r.u32()? as usize;
        let bytes = r.take(len)?;
        schema.push(String::from_utf8(bytes.to_vec()).map_err(|_| {
            Error::FormatMismatch(format!("{}: schema name not UTF-8", path.display()))
        })?);
    }
    let mut matrix = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            matrix[(i, j)] = r.f64()?;
        }
    }
    Ok(EmbeddingFile {
        schema,
        matrix,
        fingerprint,
    })
}

/// Serialized encoder parameters with shape metadata.
pub fn save_checkpoint(path: &Path, params: &EncoderParams, fingerprint: u64) -> Result<()> {
    let (d, h, p) = (params.input_dim(), params.hidden_dim(), params.proj_dim());
    let mut buf = Vec::new();
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    put_u32(&mut buf, FORMAT_VERSION);
    put_u64(&mut buf, fingerprint);
    put_u64(&mut buf, d as u64);
    put_u64(&mut buf, h as u64);
    put_u64(&mut buf, p as u64);
    // Row-major per matrix, in layer order.
    for m in [&params.w1, &params.w2, &params.w3] {
        for i in 0..m.nrows() {
            put_f64s(&mut buf, m.row(i).iter().cloned());
        }
    }
    put_f64s(&mut buf, params.b1.iter().cloned());
    put_f64s(&mut buf, params.b2.iter().cloned());
    put_f64s(&mut buf, params.b3.iter().cloned());
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(&buf).map_err(|e| io_err(path, e))
}

pub struct CheckpointFile {
    pub params: EncoderParams,
    pub fingerprint: u64,
}

pub fn load_checkpoint(path: &Path) -> Result<CheckpointFile> {
    let mut data = Vec::new();
    fs::File::open(path)
        .map_err(|e| io_err(path, e))?
        .read_to_end(&mut data)
        .map_err(|e| io_err(path, e))?;
    let mut r = Reader {
        data: &data,
        pos: 0,
        path: path.display().to_string(),
    };
    let fingerprint = check_header(&mut r, CHECKPOINT_MAGIC)?;
    let d = r.u64()? as usize;
    let h = r.u64()? as usize;
    let p = r.u64()? as usize;
    let mut params = EncoderParams::zeros(d, h, p);
    for m in [&mut params.w1, &mut params.w2, &mut params.w3] {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                m[(i, j)] = r.f64()?;
            }
        }
    }
    for v in [&mut params.b1, &mut params.b2, &mut params.b3] {
        for i in 0..v.len() {
            v[i] = r.f64()?;
        }
    }
    Ok(CheckpointFile {
        params,
        fingerprint,
    })
}

/// Writes an augmented dataset back out in TUDataset text format.
pub fn write_tudataset(dir: &Path, name: &str, dataset: &Dataset) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut a = String::new();
    let mut indicator = String::new();
    let mut labels = String::new();
    let mut node_labels = String::new();
    let mut have_node_labels = true;
    let mut offset = 1usize; // 1-based global ids

    for (gi, g) in dataset.graphs.iter().enumerate() {
        for v in 0..g.n() {
            indicator.push_str(&format!("{}\n", gi + 1));
            match &g.node_labels {
                Some(nl) => node_labels.push_str(&format!("{}\n", nl[v])),
                None => have_node_labels = false,
            }
        }
        for (u, v) in g.edges() {
            let (gu, gv) = (offset + u as usize, offset + v as usize);
            a.push_str(&format!("{gu}, {gv}\n{gv}, {gu}\n"));
        }
        labels.push_str(&format!("{}\n", g.graph_label.unwrap_or(0)));
        offset += g.n();
    }

    let write = |suffix: &str, content: &str| -> Result<()> {
        let path = dir.join(format!("{name}_{suffix}.txt"));
        fs::write(&path, content).map_err(|e| io_err(&path, e))
    };
    write("A", &a)?;
    write("graph_indicator", &indicator)?;
    write("graph_labels", &labels)?;
    if have_node_labels {
        write("node_labels", &node_labels)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from;
    use rand::Rng;

    fn fixture_dir() -> tempfile::TempDir {
        // Two graphs: K2 and K3, reciprocal edge lines, labels -1/1,
        // node labels present.
        let dir = tempfile::tempdir().unwrap();
        let w = |name: &str, content: &str| {
            fs::write(dir.path().join(name), content).unwrap();
        };
        w("TINY_A.txt", "1, 2\n2, 1\n3, 4\n4, 3\n3, 5\n5, 3\n4, 5\n5, 4\n");
        w("TINY_graph_indicator.txt", "1\n1\n2\n2\n2\n");
        w("TINY_graph_labels.txt", "-1\n1\n");
        w("TINY_node_labels.txt", "0\n1\n0\n1\n2\n");
        dir
    }

    #[test]
    fn parse_golden_fixture() {
        let dir = fixture_dir();
        let ds = parse_tudataset(dir.path(), "TINY").unwrap();
        assert_eq!(ds.graphs.len(), 2);
        assert_eq!(ds.n_classes, 2);
        assert_eq!(ds.graphs[0].n(), 2);
        assert_eq!(ds.graphs[0].edges(), vec![(0, 1)]);
        assert_eq!(ds.graphs[1].n(), 3);
        assert_eq!(ds.graphs[1].edges(), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(ds.labels(), vec![0, 1]);
        assert_eq!(ds.graphs[1].node_labels.as_ref().unwrap(), &vec![0, 1, 2]);
        assert_eq!(ds.duplicate_edges_collapsed, 4); // reciprocal lines
        assert_eq!(ds.self_loops_dropped, 0);
    }

    #[test]
    fn parse_idempotent() {
        let dir = fixture_dir();
        let a = parse_tudataset(dir.path(), "TINY").unwrap();
        let b = parse_tudataset(dir.path(), "TINY").unwrap();
        assert_eq!(a.graphs, b.graphs);
    }

    #[test]
    fn parse_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            parse_tudataset(dir.path(), "NOPE"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn parse_cross_graph_edge_rejected() {
        let dir = fixture_dir();
        fs::write(dir.path().join("TINY_A.txt"), "1, 3\n").unwrap();
        let err = parse_tudataset(dir.path(), "TINY").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_non_integer_reports_line() {
        let dir = fixture_dir();
        fs::write(dir.path().join("TINY_A.txt"), "1, 2\nx, 1\n").unwrap();
        match parse_tudataset(dir.path(), "TINY").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_self_loop_dropped() {
        let dir = fixture_dir();
        fs::write(dir.path().join("TINY_A.txt"), "1, 1\n1, 2\n").unwrap();
        let ds = parse_tudataset(dir.path(), "TINY").unwrap();
        assert_eq!(ds.self_loops_dropped, 1);
        assert_eq!(ds.graphs[0].num_edges(), 1);
    }

    #[test]
    fn embeddings_roundtrip_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.bin");
        let mut rng = rng_from(5);
        let m = DMatrix::from_fn(7, 3, |_, _| rng.gen_range(-10.0..10.0));
        let schema = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        save_embeddings(&path, &schema, &m, 0xabcd).unwrap();
        let loaded = load_embeddings(&path).unwrap();
        assert_eq!(loaded.fingerprint, 0xabcd);
        assert_eq!(loaded.schema, schema);
        for (x, y) in m.iter().zip(loaded.matrix.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn embeddings_empty_schema_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.bin");
        let m = DMatrix::<f64>::zeros(2, 0);
        assert!(save_embeddings(&path, &[], &m, 0).is_err());
    }

    #[test]
    fn embeddings_corrupt_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.bin");
        let m = DMatrix::<f64>::zeros(2, 1);
        save_embeddings(&path, &["x".into()], &m, 1).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[5] ^= 0xff; // version field
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            load_embeddings(&path),
            Err(Error::FormatMismatch(_))
        ));
    }

    #[test]
    fn embeddings_truncated() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.bin");
        let m = DMatrix::<f64>::zeros(4, 2);
        save_embeddings(&path, &["x".into(), "y".into()], &m, 1).unwrap();
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 5]).unwrap();
        assert!(matches!(
            load_embeddings(&path),
            Err(Error::FormatMismatch(_))
        ));
    }

    #[test]
    fn checkpoint_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.bin");
        let params = crate::train::init_params(5, 4, 3, 99);
        save_checkpoint(&path, &params, 7).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        assert_eq!(loaded.fingerprint, 7);
        assert_eq!(loaded.params, params);
    }

    #[test]
    fn tudataset_roundtrip_through_writer() {
        let dir = fixture_dir();
        let ds = parse_tudataset(dir.path(), "TINY").unwrap();
        let out = tempfile::tempdir().unwrap();
        write_tudataset(out.path(), "COPY", &ds).unwrap();
        let back = parse_tudataset(out.path(), "COPY").unwrap();
        assert_eq!(back.graphs.len(), ds.graphs.len());
        for (a, b) in ds.graphs.iter().zip(&back.graphs) {
            assert_eq!(a.edges(), b.edges());
            assert_eq!(a.node_labels, b.node_labels);
        }
        assert_eq!(back.labels(), ds.labels());
    }
}
