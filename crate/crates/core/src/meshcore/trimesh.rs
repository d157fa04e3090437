use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Graph, MeshError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Inflow,
    Outflow,
    Wall,
}

impl BoundaryKind {
    pub fn code(self) -> u16 {
        match self {
            BoundaryKind::Inflow => 1,
            BoundaryKind::Outflow => 2,
            BoundaryKind::Wall => 3,
        }
    }

    pub fn from_code(code: u16) -> Option<Self> {
        match code {
            1 => Some(BoundaryKind::Inflow),
            2 => Some(BoundaryKind::Outflow),
            3 => Some(BoundaryKind::Wall),
            _ => None,
        }
    }
}

/// What lies across one face of a triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceLink {
    Interior(usize),
    Boundary(BoundaryKind),
}

/// 2D triangle mesh with tagged boundary edges.
///
/// Triangles are stored counter-clockwise. Face `k` of a triangle is the edge
/// from its vertex `k` to vertex `(k + 1) % 3`.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    links: Vec<[FaceLink; 3]>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn signed_area(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
}

impl TriMesh {
    /// Validates and orients a mesh. `boundary` tags edges (unordered vertex pairs)
    /// that belong to exactly one triangle.
    pub fn new(
        vertices: Vec<[f64; 2]>,
        mut triangles: Vec<[usize; 3]>,
        boundary: &HashMap<(usize, usize), BoundaryKind>,
    ) -> Result<Self, MeshError> {
        for (t, tri) in triangles.iter_mut().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(MeshError::InvalidMesh(format!("triangle {t} references a missing vertex")));
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if area == 0.0 || !area.is_finite() {
                return Err(MeshError::InvalidMesh(format!("triangle {t} is degenerate")));
            }
            if area < 0.0 {
                tri.swap(1, 2);
            }
        }

        let mut owners: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                owners.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_default().push((t, k));
            }
        }

        let mut links = vec![[FaceLink::Boundary(BoundaryKind::Wall); 3]; triangles.len()];
        for (key, faces) in &owners {
            match faces.as_slice() {
                [(t, k)] => {
                    let kind = boundary.get(key).copied().ok_or(MeshError::UntaggedBoundary(key.0, key.1))?;
                    links[*t][*k] = FaceLink::Boundary(kind);
                }
                [(t0, k0), (t1, k1)] => {
                    links[*t0][*k0] = FaceLink::Interior(*t1);
                    links[*t1][*k1] = FaceLink::Interior(*t0);
                }
                _ => {
                    return Err(MeshError::InvalidMesh(format!(
                        "edge ({}, {}) is shared by {} triangles",
                        key.0,
                        key.1,
                        faces.len()
                    )))
                }
            }
        }
        Ok(TriMesh { vertices, triangles, links })
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn links(&self, t: usize) -> &[FaceLink; 3] {
        &self.links[t]
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        signed_area(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn centroid(&self, t: usize) -> [f64; 2] {
        let [a, b, c] = self.triangles[t].map(|v| self.vertices[v]);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Outward normal of face `k` scaled by the face length.
    pub fn scaled_normal(&self, t: usize, k: usize) -> [f64; 2] {
        let tri = self.triangles[t];
        let p = self.vertices[tri[k]];
        let q = self.vertices[tri[(k + 1) % 3]];
        // counter-clockwise: outward normal is the edge vector rotated by -90 degrees
        [q[1] - p[1], -(q[0] - p[0])]
    }

    /// Dual graph: one vertex per triangle, an edge per shared face.
    pub fn dual_graph(&self) -> Graph {
        let lists: Vec<Vec<usize>> = self
            .links
            .iter()
            .map(|faces| {
                let mut l: Vec<usize> = faces
                    .iter()
                    .filter_map(|f| match f {
                        FaceLink::Interior(o) => Some(*o),
                        FaceLink::Boundary(_) => None,
                    })
                    .collect();
                l.sort_unstable();
                l
            })
            .collect();
        Graph::from_adjacency(&lists).expect("mesh adjacency is symmetric")
    }

    /// Copy of the mesh with triangles stored in label order (triangle `t` moves
    /// to index `f(t) - 1`).
    pub fn renumbered(&self, f: &super::Labeling) -> Result<TriMesh, MeshError> {
        if f.len() != self.num_triangles() {
            return Err(MeshError::SizeMismatch { graph: self.num_triangles(), labeling: f.len() });
        }
        let order = f.order();
        let triangles = order.iter().map(|&t| self.triangles[t]).collect();
        let links = order
            .iter()
            .map(|&t| {
                self.links[t].map(|l| match l {
                    FaceLink::Interior(o) => FaceLink::Interior(f.label(o) - 1),
                    b => b,
                })
            })
            .collect();
        Ok(TriMesh { vertices: self.vertices.clone(), triangles, links })
    }
}

/// Structured triangulation of the rectangle `[0, width] x [0, height]` with
/// `nx * ny` cells, each split along its diagonal into two triangles.
///
/// `tag` chooses the boundary kind for each side: left, right, bottom, top.
pub fn rectangle(nx: usize, ny: usize, width: f64, height: f64, tag: [BoundaryKind; 4]) -> TriMesh {
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([width * i as f64 / nx as f64, height * j as f64 / ny as f64]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    let mut boundary = HashMap::new();
    for j in 0..ny {
        boundary.insert(edge_key(idx(0, j), idx(0, j + 1)), tag[0]);
        boundary.insert(edge_key(idx(nx, j), idx(nx, j + 1)), tag[1]);
    }
    for i in 0..nx {
        boundary.insert(edge_key(idx(i, 0), idx(i + 1, 0)), tag[2]);
        boundary.insert(edge_key(idx(i, ny), idx(i + 1, ny)), tag[3]);
    }
    TriMesh::new(vertices, triangles, &boundary).expect("structured rectangle is valid")
}
