use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{DataFlowGraph, PipegenError, VertexKind};

pub const DEFAULT_IO_LIMIT: usize = 10;
pub const DEFAULT_BAND_ROWS: usize = 2;

/// Rectangle `levels x x_range` (half-open) of the positioned graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: usize,
    pub band: usize,
    pub levels: (usize, usize),
    pub x_range: (usize, usize),
    pub members: Vec<usize>,
    /// Vertices outside the cluster whose values it reads.
    pub inputs: Vec<usize>,
    /// Members whose values leave the cluster, including graph outputs.
    pub outputs: Vec<usize>,
}

impl Cluster {
    pub fn io(&self) -> usize {
        self.inputs.len() + self.outputs.len()
    }
}

/// A value crossing a cluster boundary; `from` is `None` for graph inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FifoEdge {
    pub net: usize,
    pub from: Option<usize>,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterPlan {
    pub graph: DataFlowGraph,
    pub clusters: Vec<Cluster>,
    pub io_limit: usize,
    pub band_rows: usize,
}

/// Distinct nets crossing the boundary of `members`: external sources read,
/// members read from outside, and graph outputs written.
fn boundary(g: &DataFlowGraph, cons: &[Vec<usize>], inside: &[bool], members: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut ins = BTreeSet::new();
    let mut outs = BTreeSet::new();
    for &v in members {
        for &a in &g.vertices[v].args {
            if !inside[a] {
                ins.insert(a);
            }
        }
        let external = cons[v].iter().any(|&w| !inside[w]);
        if external || matches!(g.vertices[v].kind, VertexKind::Output { .. }) {
            outs.insert(v);
        }
    }
    (ins.into_iter().collect(), outs.into_iter().collect())
}

fn io_of(g: &DataFlowGraph, cons: &[Vec<usize>], mark: &mut [bool], members: &[usize]) -> usize {
    for &v in members {
        mark[v] = true;
    }
    let (i, o) = boundary(g, cons, mark, members);
    for &v in members {
        mark[v] = false;
    }
    i.len() + o.len()
}

/// Greedy rectangular clustering of a positioned, leveled graph.
///
/// Levels are grouped into bands of `band_rows`. Inside a band the scan starts
/// at the left edge and takes the widest column range whose I/O stays within
/// `io_limit`, then continues right of it. Graph inputs stay outside clusters.
pub fn cluster_rectangles(g: &DataFlowGraph, io_limit: usize, band_rows: usize) -> Result<ClusterPlan, PipegenError> {
    if band_rows == 0 {
        return Err(PipegenError::InvalidPlan("band_rows must be at least 1".into()));
    }
    let mut g = g.clone();
    let cons = g.consumers();
    let mut mark = vec![false; g.len()];
    let levels = g.levels();
    // an operator and its output ports share a cell, so no cluster can be smaller
    let cell = |g: &DataFlowGraph, row: &[usize], x: usize| -> Vec<usize> {
        row.iter().copied().filter(|&v| g.vertices[v].x == x && !g.vertices[v].is_input()).collect()
    };
    for row in &levels {
        for &v in row {
            let c = cell(&g, row, g.vertices[v].x);
            if c.first() == Some(&v) {
                let io = io_of(&g, &cons, &mut mark, &c);
                if io > io_limit {
                    return Err(PipegenError::VertexIo { vertex: v, io, limit: io_limit });
                }
            }
        }
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut push = |g: &mut DataFlowGraph, band: usize, lv: (usize, usize), xr: (usize, usize), members: Vec<usize>, mark: &mut [bool]| {
        for &v in &members {
            mark[v] = true;
        }
        let (inputs, outputs) = boundary(g, &cons, mark, &members);
        for &v in &members {
            mark[v] = false;
            g.vertices[v].cluster = Some(clusters.len());
        }
        clusters.push(Cluster { id: clusters.len(), band, levels: lv, x_range: xr, members, inputs, outputs });
    };
    for (band, lo) in (0..levels.len()).step_by(band_rows).enumerate() {
        let hi = (lo + band_rows).min(levels.len());
        let rows = &levels[lo..hi];
        let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
        let members_of = |g: &DataFlowGraph, x0: usize, x1: usize| -> Vec<usize> {
            rows.iter()
                .flat_map(|r| r.iter().copied())
                .filter(|&v| !g.vertices[v].is_input() && (x0..x1).contains(&g.vertices[v].x))
                .collect()
        };
        let mut x0 = 0;
        while x0 < width {
            let mut best = None;
            for x1 in x0 + 1..=width {
                let m = members_of(&g, x0, x1);
                if io_of(&g, &cons, &mut mark, &m) <= io_limit {
                    best = Some(x1);
                }
            }
            match best {
                Some(x1) => {
                    let m = members_of(&g, x0, x1);
                    if !m.is_empty() {
                        push(&mut g, band, (lo, hi), (x0, x1), m, &mut mark);
                    }
                    x0 = x1;
                }
                None => {
                    // the column is too busy as a whole: one cluster per row
                    for (r, row) in rows.iter().enumerate() {
                        let m = cell(&g, row, x0);
                        if !m.is_empty() {
                            push(&mut g, band, (lo + r, lo + r + 1), (x0, x0 + 1), m, &mut mark);
                        }
                    }
                    x0 += 1;
                }
            }
        }
    }
    Ok(ClusterPlan { graph: g, clusters, io_limit, band_rows })
}

impl ClusterPlan {
    /// Number of clusters for each I/O count.
    pub fn io_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for c in &self.clusters {
            *h.entry(c.io()).or_default() += 1;
        }
        h
    }

    /// Every (net, consuming cluster) pair that needs a FIFO.
    pub fn fifo_edges(&self) -> Vec<FifoEdge> {
        let mut out = BTreeSet::new();
        for c in &self.clusters {
            for &net in &c.inputs {
                out.insert((net, self.graph.vertices[net].cluster, c.id));
            }
        }
        out.into_iter().map(|(net, from, to)| FifoEdge { net, from, to }).collect()
    }

    /// Checks that clusters are disjoint, cover every non-input vertex, hold
    /// exactly the vertices of their rectangle, and respect the I/O limit.
    pub fn validate(&self) -> Result<(), PipegenError> {
        let bad = |m: String| Err(PipegenError::InvalidPlan(m));
        let g = &self.graph;
        let cons = g.consumers();
        let mut owner = vec![None; g.len()];
        for (i, c) in self.clusters.iter().enumerate() {
            if c.id != i {
                return bad(format!("cluster {i} has id {}", c.id));
            }
            let band_lo = c.band * self.band_rows;
            if c.levels.0 < band_lo || c.levels.1 > band_lo + self.band_rows || c.levels.0 >= c.levels.1 {
                return bad(format!("cluster {i} leaves its band"));
            }
            let mut expect: Vec<usize> = (0..g.len())
                .filter(|&v| {
                    let vx = &g.vertices[v];
                    !vx.is_input()
                        && (c.levels.0..c.levels.1).contains(&vx.level)
                        && (c.x_range.0..c.x_range.1).contains(&vx.x)
                })
                .collect();
            let mut got = c.members.clone();
            got.sort();
            expect.sort();
            if got != expect {
                return bad(format!("cluster {i} is not a full rectangle"));
            }
            for &v in &c.members {
                if owner[v].is_some() {
                    return bad(format!("vertex {v} is in two clusters"));
                }
                owner[v] = Some(i);
                if g.vertices[v].cluster != Some(i) {
                    return bad(format!("vertex {v} does not record cluster {i}"));
                }
            }
            let mut inside = vec![false; g.len()];
            for &v in &c.members {
                inside[v] = true;
            }
            let (ins, outs) = boundary(g, &cons, &inside, &c.members);
            if ins != c.inputs || outs != c.outputs {
                return bad(format!("cluster {i} has stale I/O lists"));
            }
            if c.io() > self.io_limit {
                return bad(format!("cluster {i} needs {} I/O, limit is {}", c.io(), self.io_limit));
            }
        }
        for (v, vx) in g.vertices.iter().enumerate() {
            if vx.is_input() != owner[v].is_none() {
                return bad(format!("vertex {v} is not covered correctly"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::{level_and_insert_delays, order_horizontally, parse_equations, Latencies};
    use super::*;

    fn plan(text: &str, limit: usize) -> ClusterPlan {
        let mut g = level_and_insert_delays(&parse_equations(text).unwrap(), &Latencies::default()).unwrap();
        order_horizontally(&mut g, 42, 4);
        let p = cluster_rectangles(&g, limit, DEFAULT_BAND_ROWS).unwrap();
        p.validate().unwrap();
        p
    }

    #[test]
    fn small_graph_is_one_cluster() {
        let p = plan("y = a + b", 10);
        assert_eq!(p.clusters.len(), 1);
        assert_eq!(p.clusters[0].inputs.len(), 2);
        assert_eq!(p.clusters[0].outputs.len(), 1);
        assert_eq!(p.fifo_edges().len(), 2);
    }

    #[test]
    fn wide_band_splits() {
        let text: String = (0..12).map(|i| format!("y{i} = a{i} + b{i}\n")).collect();
        let p = plan(&text, 10);
        let first_band = p.clusters.iter().filter(|c| c.band == 0).count();
        assert!(first_band >= 2, "{first_band}");
        assert!(p.clusters.iter().all(|c| c.io() <= 10));
    }

    #[test]
    fn vertex_over_limit_rejected() {
        let mut g = level_and_insert_delays(&parse_equations("y = a + b").unwrap(), &Latencies::default()).unwrap();
        order_horizontally(&mut g, 42, 1);
        assert!(matches!(cluster_rectangles(&g, 2, 2), Err(PipegenError::VertexIo { io: 3, .. })));
    }

    #[test]
    fn busy_column_keeps_output_ports_with_their_operator() {
        let text = "t0 = abs(-(abs(a)))\nt1 = (sqrt(abs(a)) + c)\nt2 = (sqrt(abs(sqrt(abs(c)))) + (b + a))\noutput t0\n";
        let mut g = level_and_insert_delays(&parse_equations(text).unwrap(), &Latencies::default()).unwrap();
        order_horizontally(&mut g, 14008091550692518, 3);
        let p = cluster_rectangles(&g, 4, 2).unwrap();
        p.validate().unwrap();
        assert!(p.clusters.iter().any(|c| c.levels.1 - c.levels.0 == 1));
        assert!(p.graph.vertices.iter().all(|v| v.is_input() || v.cluster.is_some()));
    }

    #[test]
    fn validate_catches_tampering() {
        let mut p = plan("t = a * b\ny = t + c\nz = t - c", 4);
        assert!(p.clusters.len() > 1);
        p.clusters[0].members.pop();
        assert!(p.validate().is_err());
    }

    #[test]
    fn histogram_counts_clusters() {
        let p = plan("t = a * b\ny = t + c\nz = sqrt(t) - c / a", 5);
        assert_eq!(p.io_histogram().values().sum::<usize>(), p.clusters.len());
    }
}
