#![allow(dead_code)]

use std::collections::HashMap;

use meshstream::meshcore::{BoundaryKind, Graph, TriMesh};
use meshstream::Labeling;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Straight from the definitions: for the vertex at position i, E(i) is the
/// largest label adjacent to any position `<= i` and S(i) the smallest label
/// adjacent to any position `>= i`. Every vertex counts as its own neighbor
/// when it has none.
pub fn literal_sbw(g: &Graph, f: &Labeling) -> usize {
    let n = g.n();
    let nbr_labels = |v: usize| -> Vec<usize> {
        let l: Vec<usize> = g.neighbors(v).iter().map(|&w| f.label(w)).collect();
        if l.is_empty() {
            vec![f.label(v)]
        } else {
            l
        }
    };
    let mut best = 0;
    for i in 1..=n {
        let mut e = 0;
        let mut s = usize::MAX;
        for v in 0..n {
            let labels = nbr_labels(v);
            if f.label(v) <= i {
                e = e.max(*labels.iter().max().unwrap());
            }
            if f.label(v) >= i {
                s = s.min(*labels.iter().min().unwrap());
            }
        }
        best = best.max(e.saturating_sub(s));
    }
    best
}

pub fn literal_bw(g: &Graph, f: &Labeling) -> usize {
    let mut best = 0;
    for u in 0..g.n() {
        for v in 0..g.n() {
            if g.has_edge(u, v) {
                best = best.max(f.label(u).abs_diff(f.label(v)));
            }
        }
    }
    best
}

/// Minimum of [`literal_sbw`] over every permutation (Heap's algorithm).
pub fn brute_force_min_sbw(g: &Graph) -> usize {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    let mut best = literal_sbw(g, &Labeling::from_order(&order).unwrap());
    let mut c = vec![0; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            best = best.min(literal_sbw(g, &Labeling::from_order(&order).unwrap()));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// Any simple graph on `1..=max_n` vertices.
pub fn any_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let m = pairs.len();
        proptest::collection::vec(any::<bool>(), m).prop_map(move |keep| {
            let edges: Vec<(usize, usize)> = pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e).collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

/// Connected graph from a seed: a random spanning tree with bounded degree
/// plus `extra` random chords that respect the same degree cap.
pub fn connected_graph(n: usize, extra: usize, max_deg: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut deg = vec![0; n];
    let mut edges = Vec::new();
    for i in 1..n {
        let v = order[i];
        let open: Vec<usize> = order[..i].iter().copied().filter(|&u| deg[u] < max_deg).collect();
        let u = open[rng.gen_range(0..open.len())];
        deg[u] += 1;
        deg[v] += 1;
        edges.push((u, v));
    }
    for _ in 0..extra * 4 {
        if edges.len() >= n - 1 + extra {
            break;
        }
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && deg[u] < max_deg && deg[v] < max_deg && !edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u)) {
            deg[u] += 1;
            deg[v] += 1;
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

pub fn connected(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n, 0usize..40, 3usize..6, any::<u64>()).prop_map(|(n, extra, d, seed)| connected_graph(n, extra, d, seed))
}

pub fn permutation(n: usize, seed: u64) -> Labeling {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Labeling::from_order(&order).unwrap()
}

/// Graph and a random labeling of it.
pub fn labeled(max_n: usize) -> impl Strategy<Value = (Graph, Labeling)> {
    (any_graph(max_n), any::<u64>()).prop_map(|(g, seed)| {
        let f = permutation(g.n(), seed);
        (g, f)
    })
}

/// Jittered grid with a random diagonal in every cell and one kind on every boundary edge.
pub fn jittered_mesh(nx: usize, ny: usize, seed: u64, kind: BoundaryKind) -> TriMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            let interior = i > 0 && i < nx && j > 0 && j < ny;
            let (dx, dy) = if interior { (rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)) } else { (0.0, 0.0) };
            vertices.push([i as f64 + dx, j as f64 + dy]);
        }
    }
    let mut triangles = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            if rng.gen_bool(0.5) {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    let mut boundary = HashMap::new();
    let mut tag = |u: usize, v: usize| {
        boundary.insert((u.min(v), u.max(v)), kind);
    };
    for i in 0..nx {
        tag(idx(i, 0), idx(i + 1, 0));
        tag(idx(i, ny), idx(i + 1, ny));
    }
    for j in 0..ny {
        tag(idx(0, j), idx(0, j + 1));
        tag(idx(nx, j), idx(nx, j + 1));
    }
    TriMesh::new(vertices, triangles, &boundary).unwrap()
}
