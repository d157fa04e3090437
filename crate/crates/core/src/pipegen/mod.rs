//! Arithmetic-unit planner: equations to a leveled dataflow graph, horizontal
//! ordering, and I/O-limited rectangular clusters.

mod cluster;
mod eval;
mod level;
mod order;
mod parse;
mod plan;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cluster::{cluster_rectangles, Cluster, ClusterPlan, FifoEdge, DEFAULT_BAND_ROWS, DEFAULT_IO_LIMIT};
pub use eval::{evaluate, evaluate_clustered};
pub use level::{check_leveled, level_and_insert_delays, Latencies};
pub use order::{objective, order_horizontally, OrderReport};
pub use parse::parse_equations;
pub use plan::{emit_plan, load_plan, render_svg};

#[derive(Debug, Error)]
pub enum PipegenError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}, column {col}: {name:?} is used before its definition")]
    UseBeforeDef { line: usize, col: usize, name: String },
    #[error("line {line}: {name:?} is assigned twice")]
    Redefinition { line: usize, name: String },
    #[error("dependency cycle through {0}")]
    Cycle(String),
    #[error("no value for input {0:?}")]
    MissingInput(String),
    #[error("vertex {vertex} alone needs {io} I/O, limit is {limit}")]
    VertexIo { vertex: usize, io: usize, limit: usize },
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("latency file line {line}: {msg}")]
    Latency { line: usize, msg: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
    Abs,
}

impl Op {
    pub fn arity(self) -> usize {
        match self {
            Op::Sqrt | Op::Abs => 1,
            _ => 2,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::Mul => "*",
            Op::Div => "/",
            Op::Sqrt => "sqrt",
            Op::Abs => "abs",
        }
    }

    pub fn apply(self, a: &[f64]) -> f64 {
        match self {
            Op::Add => a[0] + a[1],
            Op::Sub => a[0] - a[1],
            Op::Mul => a[0] * a[1],
            Op::Div => a[0] / a[1],
            Op::Sqrt => a[0].sqrt(),
            Op::Abs => a[0].abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VertexKind {
    Input { name: String },
    Constant { value: f64 },
    Operator { op: Op },
    /// Shift register of `cycles` stages.
    Delay { cycles: u64 },
    Output { name: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub kind: VertexKind,
    /// Operand vertices in order.
    pub args: Vec<usize>,
    pub level: usize,
    pub x: usize,
    /// Cycle at which the result is available.
    pub ready: u64,
    pub cluster: Option<usize>,
}

impl Vertex {
    fn new(kind: VertexKind, args: Vec<usize>) -> Self {
        Vertex { kind, args, level: 0, x: 0, ready: 0, cluster: None }
    }

    pub fn is_input(&self) -> bool {
        matches!(self.kind, VertexKind::Input { .. })
    }

    pub fn is_delay(&self) -> bool {
        matches!(self.kind, VertexKind::Delay { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DataFlowGraph {
    pub vertices: Vec<Vertex>,
}

impl DataFlowGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `(from, to, operand slot)` for every edge.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.vertices.iter().enumerate().flat_map(|(v, vx)| vx.args.iter().enumerate().map(move |(s, &a)| (a, v, s)))
    }

    pub fn consumers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for (a, v, _) in self.edges() {
            out[a].push(v);
        }
        out
    }

    pub fn inputs(&self) -> Vec<&str> {
        self.vertices
            .iter()
            .filter_map(|v| match &v.kind {
                VertexKind::Input { name } => Some(name.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn outputs(&self) -> Vec<&str> {
        self.vertices
            .iter()
            .filter_map(|v| match &v.kind {
                VertexKind::Output { name } => Some(name.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn count_ops(&self) -> usize {
        self.vertices.iter().filter(|v| matches!(v.kind, VertexKind::Operator { .. })).count()
    }

    pub fn count_delays(&self) -> usize {
        self.vertices.iter().filter(|v| v.is_delay()).count()
    }

    pub fn depth(&self) -> u64 {
        self.vertices.iter().map(|v| v.ready).max().unwrap_or(0)
    }

    pub fn num_levels(&self) -> usize {
        self.vertices.iter().map(|v| v.level + 1).max().unwrap_or(0)
    }

    /// Vertex ids of each level, sorted by `x`.
    pub fn levels(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_levels()];
        for (i, v) in self.vertices.iter().enumerate() {
            out[v.level].push(i);
        }
        for l in &mut out {
            l.sort_by_key(|&v| (self.vertices[v].x, v));
        }
        out
    }

    /// Topological order; fails on a cycle.
    pub fn topo_order(&self) -> Result<Vec<usize>, PipegenError> {
        let n = self.len();
        let mut indeg: Vec<usize> = self.vertices.iter().map(|v| v.args.len()).collect();
        for (a, _, _) in self.edges() {
            if a >= n {
                return Err(PipegenError::InvalidPlan(format!("edge from unknown vertex {a}")));
            }
        }
        let cons = self.consumers();
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        queue.reverse();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop() {
            order.push(v);
            for &c in &cons[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push(c);
                }
            }
        }
        if order.len() < n {
            let v = (0..n).find(|&v| indeg[v] > 0).unwrap();
            return Err(PipegenError::Cycle(format!("vertex {v}")));
        }
        Ok(order)
    }
}
