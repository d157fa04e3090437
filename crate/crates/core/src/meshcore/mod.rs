//! Mesh and graph representations, bandwidth metrics and descriptor streams.

use std::io::Read;
use std::path::Path;

use thiserror::Error;

pub mod descriptor;
pub mod gmsh;
mod graph;
mod labeling;
pub mod trimesh;

pub use descriptor::{DescriptorConfig, DescriptorStream, Precision};
pub use gmsh::{load_gmsh, parse_gmsh, TagMap};
pub use graph::Graph;
pub use labeling::{c_bw, classical_bandwidth, serial_bandwidth, Labeling, SerialProfile};
pub use trimesh::{BoundaryKind, FaceLink, TriMesh};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported mesh format: {0}")]
    UnsupportedFormat(String),
    #[error("unsupported element type {0}")]
    UnsupportedElement(i64),
    #[error("boundary edge ({0}, {1}) has no boundary tag")]
    UntaggedBoundary(usize, usize),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("invalid labeling: {0}")]
    InvalidLabeling(String),
    #[error("labeling has {labeling} entries but the graph has {graph} vertices")]
    SizeMismatch { graph: usize, labeling: usize },
    #[error("index {index} does not fit in {width} bits")]
    IndexOverflow { index: u64, width: u8 },
    #[error("descriptor stream: {0}")]
    Descriptor(String),
}

/// Reads a text file, gunzipping it when the name ends in `.gz`.
pub(crate) fn read_text(path: &Path) -> Result<String, MeshError> {
    let raw = std::fs::read(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        let mut text = String::new();
        flate2::read::GzDecoder::new(raw.as_slice()).read_to_string(&mut text)?;
        Ok(text)
    } else {
        String::from_utf8(raw).map_err(|e| MeshError::Parse { line: 0, msg: e.to_string() })
    }
}

/// Edge-list text: first line `n m`, then `m` lines `u v` with 0-based ids.
pub fn parse_edge_list(text: &str) -> Result<Graph, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let pair = |line: usize, l: &str| -> Result<(usize, usize), MeshError> {
        let mut it = l.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
            _ => Err(MeshError::Parse { line, msg: format!("expected two integers, found {l:?}") }),
        }
    };
    let (line, head) = lines.next().ok_or(MeshError::Parse { line: 1, msg: "empty edge list".into() })?;
    let (n, m) = pair(line, head)?;
    let edges = lines.map(|(line, l)| pair(line, l)).collect::<Result<Vec<_>, _>>()?;
    if edges.len() != m {
        return Err(MeshError::Parse { line, msg: format!("header announces {m} edges, found {}", edges.len()) });
    }
    Graph::from_edges(n, &edges)
}

pub fn edge_list_text(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.num_edges());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph, MeshError> {
    parse_edge_list(&read_text(path.as_ref())?)
}
