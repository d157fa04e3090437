//! Reader for Gmsh MSH 2.2 ASCII files holding 2D triangle meshes.
//!
//! Only `$MeshFormat`, `$Nodes` and `$Elements` are interpreted; other sections
//! are skipped. Element type 1 (2-node line) carries boundary tags, type 2
//! (3-node triangle) builds the mesh and type 15 (point) is ignored.

use std::collections::HashMap;
use std::path::Path;

use super::trimesh::{BoundaryKind, TriMesh};
use super::MeshError;

/// Physical-tag to boundary-kind table.
#[derive(Debug, Clone)]
pub struct TagMap(pub HashMap<i64, BoundaryKind>);

impl Default for TagMap {
    /// 1 = inflow, 2 = outflow, 3 = wall.
    fn default() -> Self {
        TagMap(HashMap::from([
            (1, BoundaryKind::Inflow),
            (2, BoundaryKind::Outflow),
            (3, BoundaryKind::Wall),
        ]))
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<&'a str, MeshError> {
        for (i, l) in self.inner.by_ref() {
            self.line = i + 1;
            let l = l.trim();
            if !l.is_empty() {
                return Ok(l);
            }
        }
        Err(MeshError::Parse { line: self.line, msg: "unexpected end of file".into() })
    }

    fn err(&self, msg: impl Into<String>) -> MeshError {
        MeshError::Parse { line: self.line, msg: msg.into() }
    }

    fn expect(&mut self, tag: &str) -> Result<(), MeshError> {
        let l = self.next_line()?;
        if l != tag {
            return Err(self.err(format!("expected {tag}, found {l:?}")));
        }
        Ok(())
    }

    fn numbers<T: std::str::FromStr>(&self, l: &str) -> Result<Vec<T>, MeshError> {
        l.split_whitespace()
            .map(|t| t.parse::<T>().map_err(|_| self.err(format!("bad number {t:?}"))))
            .collect()
    }
}

pub fn parse_gmsh(text: &str, tags: &TagMap) -> Result<TriMesh, MeshError> {
    let mut lines = Lines { inner: text.lines().enumerate(), line: 0 };
    let mut node_index: HashMap<i64, usize> = HashMap::new();
    let mut vertices: Vec<[f64; 2]> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut boundary: HashMap<(usize, usize), BoundaryKind> = HashMap::new();
    let mut seen_format = false;
    let mut pending_lines: Vec<(i64, [i64; 2], usize)> = Vec::new();

    loop {
        let header = match lines.next_line() {
            Ok(l) => l,
            Err(_) if seen_format => break,
            Err(e) => return Err(e),
        };
        match header {
            "$MeshFormat" => {
                let l = lines.next_line()?;
                let fields: Vec<&str> = l.split_whitespace().collect();
                if fields.len() < 3 || !fields[0].starts_with("2.2") {
                    return Err(MeshError::UnsupportedFormat(l.to_string()));
                }
                if fields[1] != "0" {
                    return Err(MeshError::UnsupportedFormat("binary MSH is not supported".into()));
                }
                lines.expect("$EndMeshFormat")?;
                seen_format = true;
            }
            "$Nodes" => {
                let count: usize = lines.next_line()?.parse().map_err(|_| lines.err("bad node count"))?;
                for _ in 0..count {
                    let l = lines.next_line()?;
                    let mut it = l.split_whitespace();
                    let id: i64 = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| lines.err("bad node id"))?;
                    let xy: Vec<f64> = lines.numbers(&it.collect::<Vec<_>>().join(" "))?;
                    if xy.len() < 2 {
                        return Err(lines.err("node needs coordinates"));
                    }
                    node_index.insert(id, vertices.len());
                    vertices.push([xy[0], xy[1]]);
                }
                lines.expect("$EndNodes")?;
            }
            "$Elements" => {
                let count: usize = lines.next_line()?.parse().map_err(|_| lines.err("bad element count"))?;
                for _ in 0..count {
                    let l = lines.next_line()?;
                    let f: Vec<i64> = lines.numbers(l)?;
                    if f.len() < 3 {
                        return Err(lines.err("truncated element"));
                    }
                    let (ty, ntags) = (f[1], f[2] as usize);
                    let nodes = f.get(3 + ntags..).ok_or_else(|| lines.err("truncated element tags"))?;
                    let physical = if ntags > 0 { f[3] } else { 0 };
                    match (ty, nodes.len()) {
                        (2, 3) => {
                            let mut tri = [0; 3];
                            for (k, id) in nodes.iter().enumerate() {
                                tri[k] = *node_index.get(id).ok_or_else(|| lines.err(format!("unknown node {id}")))?;
                            }
                            triangles.push(tri);
                        }
                        (1, 2) => pending_lines.push((physical, [nodes[0], nodes[1]], lines.line)),
                        (15, 1) => {}
                        (1 | 2 | 15, _) => return Err(lines.err("wrong node count for element")),
                        (other, _) => return Err(MeshError::UnsupportedElement(other)),
                    }
                }
                lines.expect("$EndElements")?;
            }
            other if other.starts_with("$End") => return Err(lines.err(format!("stray {other}"))),
            other if other.starts_with('$') => {
                let end = format!("$End{}", &other[1..]);
                while lines.next_line()? != end {}
            }
            other => return Err(lines.err(format!("unexpected line {other:?}"))),
        }
    }

    for (physical, ends, line) in pending_lines {
        let kind = tags
            .0
            .get(&physical)
            .copied()
            .ok_or(MeshError::Parse { line, msg: format!("physical tag {physical} has no boundary kind") })?;
        let a = node_index[&ends[0]];
        let b = node_index[&ends[1]];
        boundary.insert((a.min(b), a.max(b)), kind);
    }
    if triangles.is_empty() {
        return Err(MeshError::InvalidMesh("no triangle elements".into()));
    }
    TriMesh::new(vertices, triangles, &boundary)
}

/// Loads an MSH 2.2 file; a `.gz` suffix is decompressed transparently.
pub fn load_gmsh(path: impl AsRef<Path>, tags: &TagMap) -> Result<TriMesh, MeshError> {
    parse_gmsh(&super::read_text(path.as_ref())?, tags)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_TRIANGLE: &str = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n\
$Elements\n4\n1 1 2 3 1 1 2\n2 1 2 3 1 2 3\n3 1 2 1 1 3 1\n4 2 2 10 1 1 2 3\n$EndElements\n";

    #[test]
    fn single_triangle() {
        let mesh = parse_gmsh(ONE_TRIANGLE, &TagMap::default()).unwrap();
        assert_eq!(mesh.num_triangles(), 1);
        assert!((mesh.area(0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quadrilateral_is_unsupported() {
        let text = ONE_TRIANGLE.replace("4 2 2 10 1 1 2 3", "4 3 2 10 1 1 2 3 3");
        assert!(matches!(parse_gmsh(&text, &TagMap::default()), Err(MeshError::UnsupportedElement(3))));
    }

    #[test]
    fn missing_boundary_tag_is_rejected() {
        let text = ONE_TRIANGLE
            .replace("$Elements\n4\n", "$Elements\n3\n")
            .replace("3 1 2 1 1 3 1\n", "");
        assert!(matches!(parse_gmsh(&text, &TagMap::default()), Err(MeshError::UntaggedBoundary(..))));
    }

    #[test]
    fn other_versions_are_rejected() {
        let text = ONE_TRIANGLE.replace("2.2 0 8", "4.1 0 8");
        assert!(matches!(parse_gmsh(&text, &TagMap::default()), Err(MeshError::UnsupportedFormat(_))));
        assert!(parse_gmsh("$Nodes\n1\n", &TagMap::default()).is_err());
    }
}
