//! Descriptor streams read serially by the Memory unit.
//!
//! Layout (all little-endian):
//!
//! ```text
//! header   : "MSDS" | version u8 | index_width u8 | value_bytes u8 | values_per_node u8
//!            | node_count u32 | connectivity_count u32 | element_count u32
//!            | memory_depth u32 (0 = untranslated labels)
//! nodes    : node_count * values_per_node IEEE-754 values (f32 or f64)
//! conn     : connectivity_count u32 words, bit 31 = start of row,
//!            low `index_width` bits = translated local index
//! elements : element_count * (n_x, n_y, |n| as IEEE-754, left u16, right u16)
//! ```
//!
//! Rows follow node order. A node without neighbors is encoded as a single
//! start-of-row word whose index field is all ones. The right index of a
//! boundary face is `0x8000 | boundary code`.

use super::trimesh::FaceLink;
use super::{Graph, Labeling, MeshError, TriMesh};

const MAGIC: &[u8; 4] = b"MSDS";
const VERSION: u8 = 1;
const ROW_START: u32 = 1 << 31;
pub const BOUNDARY_FLAG: u16 = 0x8000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Single,
    Double,
}

impl Precision {
    pub fn bytes(self) -> usize {
        match self {
            Precision::Single => 4,
            Precision::Double => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DescriptorConfig {
    /// Width of the translated index field, 8..=32 bits.
    pub index_width: u8,
    pub precision: Precision,
    pub values_per_node: u8,
    /// Depth of the circular node buffer. Translated indices are `label % depth`;
    /// `None` keeps the plain label.
    pub memory_depth: Option<usize>,
}

impl Default for DescriptorConfig {
    fn default() -> Self {
        DescriptorConfig { index_width: 24, precision: Precision::Double, values_per_node: 7, memory_depth: None }
    }
}

impl DescriptorConfig {
    fn index_mask(&self) -> u32 {
        if self.index_width >= 32 {
            u32::MAX
        } else {
            (1u32 << self.index_width) - 1
        }
    }

    /// Largest usable translated index; the all-ones value marks an empty row.
    pub fn max_index(&self) -> u64 {
        let field_max = if self.index_width >= 31 { (1u64 << 31) - 1 } else { (1u64 << self.index_width) - 1 };
        field_max - 1
    }

    fn validate(&self) -> Result<(), MeshError> {
        if !(8..=32).contains(&self.index_width) {
            return Err(MeshError::Descriptor(format!("index width {} outside 8..=32", self.index_width)));
        }
        if self.memory_depth == Some(0) {
            return Err(MeshError::Descriptor("memory depth must be positive".into()));
        }
        Ok(())
    }

    /// Fails when labels up to `labels` cannot be addressed with this width.
    pub fn check_capacity(&self, labels: usize) -> Result<(), MeshError> {
        self.validate()?;
        let largest = match self.memory_depth {
            Some(depth) => depth.min(labels + 1) as u64 - 1,
            None => labels as u64,
        };
        if largest > self.max_index() {
            return Err(MeshError::IndexOverflow { index: largest, width: self.index_width });
        }
        Ok(())
    }

    fn translate(&self, label: usize) -> u32 {
        match self.memory_depth {
            Some(depth) => (label % depth) as u32,
            None => label as u32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectivityRecord {
    pub index: u32,
    pub row_start: bool,
}

impl ConnectivityRecord {
    pub fn is_empty_row(&self, cfg: &DescriptorConfig) -> bool {
        self.row_start && self.index == cfg.index_mask() & !ROW_START
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementRecord {
    pub normal: [f64; 2],
    pub length: f64,
    pub left: u16,
    pub right: u16,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorStream {
    pub config: DescriptorConfig,
    /// `node_count * values_per_node` values in node order.
    pub nodes: Vec<f64>,
    pub connectivity: Vec<ConnectivityRecord>,
    pub elements: Vec<ElementRecord>,
}

impl DescriptorStream {
    /// Connectivity rows for `g` in label order, without node or element data.
    pub fn connectivity_rows(
        g: &Graph,
        f: &Labeling,
        cfg: &DescriptorConfig,
    ) -> Result<Vec<ConnectivityRecord>, MeshError> {
        f.check_for(g)?;
        cfg.check_capacity(g.n())?;
        let empty = cfg.index_mask() & !ROW_START;
        let mut out = Vec::with_capacity(2 * g.num_edges() + g.n());
        for v in f.order() {
            let mut labels: Vec<usize> = g.neighbors(v).iter().map(|&w| f.label(w)).collect();
            labels.sort_unstable();
            if labels.is_empty() {
                out.push(ConnectivityRecord { index: empty, row_start: true });
            }
            for (k, l) in labels.into_iter().enumerate() {
                out.push(ConnectivityRecord { index: cfg.translate(l), row_start: k == 0 });
            }
        }
        Ok(out)
    }

    /// Stream for a cell-centered mesh. `node_values` holds `values_per_node`
    /// values per triangle, indexed by triangle id (not by label).
    pub fn from_mesh(
        mesh: &TriMesh,
        f: &Labeling,
        node_values: &[f64],
        cfg: DescriptorConfig,
    ) -> Result<Self, MeshError> {
        let per = cfg.values_per_node as usize;
        let n = mesh.num_triangles();
        if node_values.len() != n * per {
            return Err(MeshError::Descriptor(format!(
                "expected {} node values, got {}",
                n * per,
                node_values.len()
            )));
        }
        let g = mesh.dual_graph();
        let connectivity = Self::connectivity_rows(&g, f, &cfg)?;
        let order = f.order();
        let mut nodes = Vec::with_capacity(n * per);
        let mut elements = Vec::with_capacity(3 * n);
        for &t in &order {
            nodes.extend_from_slice(&node_values[t * per..(t + 1) * per]);
            // neighborhood slot k + 1 holds the k-th connectivity entry of the row
            let mut row: Vec<usize> = g.neighbors(t).to_vec();
            row.sort_by_key(|&w| f.label(w));
            for (k, link) in mesh.links(t).iter().enumerate() {
                let sn = mesh.scaled_normal(t, k);
                let length = sn[0].hypot(sn[1]);
                let right = match link {
                    FaceLink::Interior(o) => 1 + row.iter().position(|w| w == o).expect("neighbor in row") as u16,
                    FaceLink::Boundary(kind) => BOUNDARY_FLAG | kind.code(),
                };
                elements.push(ElementRecord { normal: [sn[0] / length, sn[1] / length], length, left: 0, right });
            }
        }
        Ok(DescriptorStream { config: cfg, nodes, connectivity, elements })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len() / self.config.values_per_node.max(1) as usize
    }

    pub fn encode(&self) -> Vec<u8> {
        let cfg = &self.config;
        let vb = cfg.precision.bytes();
        let mut out = Vec::with_capacity(
            24 + self.nodes.len() * vb + self.connectivity.len() * 4 + self.elements.len() * (3 * vb + 4),
        );
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&[VERSION, cfg.index_width, vb as u8, cfg.values_per_node]);
        out.extend_from_slice(&(self.node_count() as u32).to_le_bytes());
        out.extend_from_slice(&(self.connectivity.len() as u32).to_le_bytes());
        out.extend_from_slice(&(self.elements.len() as u32).to_le_bytes());
        out.extend_from_slice(&(cfg.memory_depth.unwrap_or(0) as u32).to_le_bytes());
        let put = |out: &mut Vec<u8>, x: f64| match cfg.precision {
            Precision::Single => out.extend_from_slice(&(x as f32).to_le_bytes()),
            Precision::Double => out.extend_from_slice(&x.to_le_bytes()),
        };
        for &x in &self.nodes {
            put(&mut out, x);
        }
        for c in &self.connectivity {
            let word = (c.index & cfg.index_mask() & !ROW_START) | if c.row_start { ROW_START } else { 0 };
            out.extend_from_slice(&word.to_le_bytes());
        }
        for e in &self.elements {
            put(&mut out, e.normal[0]);
            put(&mut out, e.normal[1]);
            put(&mut out, e.length);
            out.extend_from_slice(&e.left.to_le_bytes());
            out.extend_from_slice(&e.right.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, MeshError> {
        let bad = |m: &str| MeshError::Descriptor(m.to_string());
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4).ok_or_else(|| bad("truncated header"))? != MAGIC {
            return Err(bad("bad magic"));
        }
        let head = r.take(4).ok_or_else(|| bad("truncated header"))?;
        if head[0] != VERSION {
            return Err(bad("unsupported version"));
        }
        let precision = match head[2] {
            4 => Precision::Single,
            8 => Precision::Double,
            _ => return Err(bad("bad value width")),
        };
        let n_nodes = r.u32().ok_or_else(|| bad("truncated header"))? as usize;
        let n_conn = r.u32().ok_or_else(|| bad("truncated header"))? as usize;
        let n_elem = r.u32().ok_or_else(|| bad("truncated header"))? as usize;
        let depth = r.u32().ok_or_else(|| bad("truncated header"))? as usize;
        let config = DescriptorConfig {
            index_width: head[1],
            precision,
            values_per_node: head[3],
            memory_depth: (depth > 0).then_some(depth),
        };
        config.validate()?;
        let mut nodes = Vec::with_capacity(n_nodes * head[3] as usize);
        for _ in 0..n_nodes * head[3] as usize {
            nodes.push(r.value(precision).ok_or_else(|| bad("truncated node data"))?);
        }
        let mut connectivity = Vec::with_capacity(n_conn);
        for _ in 0..n_conn {
            let w = r.u32().ok_or_else(|| bad("truncated connectivity"))?;
            connectivity.push(ConnectivityRecord { index: w & config.index_mask() & !ROW_START, row_start: w & ROW_START != 0 });
        }
        let mut elements = Vec::with_capacity(n_elem);
        for _ in 0..n_elem {
            let short = || bad("truncated element data");
            let nx = r.value(precision).ok_or_else(short)?;
            let ny = r.value(precision).ok_or_else(short)?;
            let length = r.value(precision).ok_or_else(short)?;
            let left = r.u16().ok_or_else(short)?;
            let right = r.u16().ok_or_else(short)?;
            elements.push(ElementRecord { normal: [nx, ny], length, left, right });
        }
        if r.pos != bytes.len() {
            return Err(bad("trailing bytes"));
        }
        Ok(DescriptorStream { config, nodes, connectivity, elements })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let s = self.bytes.get(self.pos..self.pos + n)?;
        self.pos += n;
        Some(s)
    }
    fn u16(&mut self) -> Option<u16> {
        Some(u16::from_le_bytes(self.take(2)?.try_into().ok()?))
    }
    fn u32(&mut self) -> Option<u32> {
        Some(u32::from_le_bytes(self.take(4)?.try_into().ok()?))
    }
    fn value(&mut self, p: Precision) -> Option<f64> {
        match p {
            Precision::Single => Some(f32::from_le_bytes(self.take(4)?.try_into().ok()?) as f64),
            Precision::Double => Some(f64::from_le_bytes(self.take(8)?.try_into().ok()?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::meshcore::trimesh::{rectangle, BoundaryKind};

    #[test]
    fn single_triangle_stream() {
        let mut tags = HashMap::new();
        tags.insert((0, 1), BoundaryKind::Wall);
        tags.insert((1, 2), BoundaryKind::Outflow);
        tags.insert((0, 2), BoundaryKind::Inflow);
        let mesh = TriMesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], &tags).unwrap();
        let cfg = DescriptorConfig { values_per_node: 1, ..Default::default() };
        let s = DescriptorStream::from_mesh(&mesh, &Labeling::identity(1), &[0.5], cfg).unwrap();
        assert_eq!(s.node_count(), 1);
        assert_eq!(s.elements.len(), 3);
        assert!(s.elements.iter().all(|e| e.right & BOUNDARY_FLAG != 0));
        assert_eq!(s.connectivity.len(), 1);
        assert!(s.connectivity[0].row_start && s.connectivity[0].is_empty_row(&cfg));
        assert_eq!(DescriptorStream::decode(&s.encode()).unwrap(), s);
    }

    #[test]
    fn node_eight_row() {
        // node 8 (vertex 7) is adjacent to nodes 9, 13 and 14
        let mut edges = vec![(7, 8), (7, 12), (7, 13)];
        edges.extend((0..6).map(|v| (v, v + 1)));
        edges.extend((8..13).map(|v| (v, v + 1)));
        let g = Graph::from_edges(14, &edges).unwrap();
        let rows = DescriptorStream::connectivity_rows(&g, &Labeling::identity(14), &DescriptorConfig::default()).unwrap();
        let starts: Vec<usize> = rows.iter().enumerate().filter(|(_, r)| r.row_start).map(|(i, _)| i).collect();
        assert_eq!(starts.len(), 14);
        let row8: Vec<_> = rows[starts[7]..starts[8]].to_vec();
        assert_eq!(row8.iter().map(|r| r.index).collect::<Vec<_>>(), vec![9, 13, 14]);
        assert!(row8[0].row_start && !row8[1].row_start && !row8[2].row_start);
    }

    #[test]
    fn width_overflow() {
        let cfg = DescriptorConfig::default();
        assert!(cfg.check_capacity((1 << 24) - 2).is_ok());
        assert!(matches!(cfg.check_capacity((1 << 24) + 1), Err(MeshError::IndexOverflow { .. })));
        let narrow = DescriptorConfig { index_width: 8, ..Default::default() };
        let g = Graph::path(257);
        assert!(DescriptorStream::connectivity_rows(&g, &Labeling::identity(257), &narrow).is_err());
        // a circular buffer of depth 64 fits any mesh size
        let wrapped = DescriptorConfig { memory_depth: Some(64), ..narrow };
        let rows = DescriptorStream::connectivity_rows(&g, &Labeling::identity(257), &wrapped).unwrap();
        assert!(rows.iter().all(|r| r.index < 64));
    }

    #[test]
    fn mesh_stream_round_trip_single_precision() {
        let mesh = rectangle(3, 2, 1.0, 1.0, [BoundaryKind::Inflow, BoundaryKind::Outflow, BoundaryKind::Wall, BoundaryKind::Wall]);
        let n = mesh.num_triangles();
        let values: Vec<f64> = (0..n * 2).map(|i| i as f64 * 0.25).collect();
        let cfg = DescriptorConfig { precision: Precision::Single, values_per_node: 2, ..Default::default() };
        let f = Labeling::from_order(&(0..n).rev().collect::<Vec<_>>()).unwrap();
        let s = DescriptorStream::from_mesh(&mesh, &f, &values, cfg).unwrap();
        assert_eq!(s.nodes[0], values[(n - 1) * 2]);
        let bytes = s.encode();
        assert_eq!(bytes.len(), 24 + n * 2 * 4 + s.connectivity.len() * 4 + 3 * n * 16);
        let back = DescriptorStream::decode(&bytes).unwrap();
        assert_eq!(back.nodes, s.nodes);
        assert_eq!(back.connectivity, s.connectivity);
        for (a, b) in back.elements.iter().zip(&s.elements) {
            assert!((a.normal[0] - b.normal[0]).abs() < 1e-7 && (a.length - b.length).abs() < 1e-7);
            assert_eq!((a.left, a.right), (b.left, b.right));
        }
        assert_eq!(back.encode(), bytes);
        assert!(DescriptorStream::decode(&bytes[..bytes.len() - 1]).is_err());
    }
}
