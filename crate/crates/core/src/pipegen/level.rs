use serde::{Deserialize, Serialize};

use super::{DataFlowGraph, Op, PipegenError, Vertex, VertexKind};

/// Pipeline depth of each operator in clock cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Latencies {
    pub add: u64,
    pub sub: u64,
    pub mul: u64,
    pub div: u64,
    pub sqrt: u64,
    pub abs: u64,
}

impl Default for Latencies {
    fn default() -> Self {
        Latencies { add: 12, sub: 12, mul: 8, div: 28, sqrt: 28, abs: 2 }
    }
}

impl Latencies {
    pub fn of(&self, op: Op) -> u64 {
        match op {
            Op::Add => self.add,
            Op::Sub => self.sub,
            Op::Mul => self.mul,
            Op::Div => self.div,
            Op::Sqrt => self.sqrt,
            Op::Abs => self.abs,
        }
    }

    fn vertex(&self, v: &Vertex) -> u64 {
        match v.kind {
            VertexKind::Operator { op } => self.of(op),
            VertexKind::Delay { cycles } => cycles,
            _ => 0,
        }
    }

    /// `op = cycles` lines overriding the defaults; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self, PipegenError> {
        let mut lat = Latencies::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| PipegenError::Latency { line: i + 1, msg: msg.to_string() };
            let (k, v) = line.split_once('=').ok_or_else(|| err("expected op = cycles"))?;
            let v: u64 = v.trim().parse().map_err(|_| err("cycles must be a positive integer"))?;
            if v == 0 {
                return Err(err("cycles must be a positive integer"));
            }
            match k.trim() {
                "add" => lat.add = v,
                "sub" => lat.sub = v,
                "mul" => lat.mul = v,
                "div" => lat.div = v,
                "sqrt" => lat.sqrt = v,
                "abs" => lat.abs = v,
                other => return Err(err(&format!("unknown operator {other:?}"))),
            }
        }
        Ok(lat)
    }
}

/// Assigns ready times and levels, and puts one delay vertex on every operator
/// input edge whose endpoints are not on adjacent levels or not aligned in time.
///
/// Operators start when their slowest operand is ready; a delay on an edge
/// holds the value for exactly the difference. A constant feeds one operator
/// and sits directly above it. An output port shares the level of the value
/// it writes. Existing delays are removed first.
pub fn level_and_insert_delays(g: &DataFlowGraph, lat: &Latencies) -> Result<DataFlowGraph, PipegenError> {
    g.topo_order()?;
    let mut h = strip_delays(g);
    let order = h.topo_order()?;
    let n = h.len();
    let is_const = |h: &DataFlowGraph, v: usize| matches!(h.vertices[v].kind, VertexKind::Constant { .. });

    let mut start = vec![0u64; n];
    let mut level = vec![0usize; n];
    for &v in &order {
        let vx = &h.vertices[v];
        let timed: Vec<usize> = vx.args.iter().copied().filter(|&a| !is_const(&h, a)).collect();
        let s = timed.iter().map(|&a| h.vertices[a].ready).max().unwrap_or(0);
        start[v] = s;
        level[v] = match vx.kind {
            VertexKind::Input { .. } | VertexKind::Constant { .. } => 0,
            VertexKind::Output { .. } => vx.args.iter().map(|&a| level[a]).max().unwrap_or(0),
            _ => timed.iter().map(|&a| level[a] + 1 + usize::from(h.vertices[a].ready < s)).max().unwrap_or(1).max(1),
        };
        h.vertices[v].ready = s + lat.vertex(vx);
        h.vertices[v].level = level[v];
    }
    for v in 0..n {
        if matches!(h.vertices[v].kind, VertexKind::Operator { .. }) {
            for a in h.vertices[v].args.clone() {
                if is_const(&h, a) {
                    h.vertices[a].level = level[v] - 1;
                    h.vertices[a].ready = start[v];
                }
            }
        }
    }
    for v in 0..n {
        if matches!(h.vertices[v].kind, VertexKind::Output { .. }) {
            continue;
        }
        for slot in 0..h.vertices[v].args.len() {
            let a = h.vertices[v].args[slot];
            let (ready, lvl) = (h.vertices[a].ready, h.vertices[a].level);
            if lvl + 1 == level[v] && ready == start[v] {
                continue;
            }
            let mut d = Vertex::new(VertexKind::Delay { cycles: start[v] - ready }, vec![a]);
            d.level = level[v] - 1;
            d.ready = start[v];
            h.vertices.push(d);
            h.vertices[v].args[slot] = h.len() - 1;
        }
    }
    for v in &mut h.vertices {
        v.x = 0;
        v.cluster = None;
    }
    Ok(h)
}

fn strip_delays(g: &DataFlowGraph) -> DataFlowGraph {
    let resolve = |mut a: usize| {
        while g.vertices[a].is_delay() {
            a = g.vertices[a].args[0];
        }
        a
    };
    let keep: Vec<usize> = (0..g.len()).filter(|&v| !g.vertices[v].is_delay()).collect();
    let mut new_id = vec![usize::MAX; g.len()];
    for (i, &v) in keep.iter().enumerate() {
        new_id[v] = i;
    }
    DataFlowGraph {
        vertices: keep
            .iter()
            .map(|&v| {
                let vx = &g.vertices[v];
                Vertex::new(vx.kind.clone(), vx.args.iter().map(|&a| new_id[resolve(a)]).collect())
            })
            .collect(),
    }
}

/// Checks the leveled form: operands of operators sit exactly one level up and
/// are ready when the operator starts, outputs share their operand's level,
/// and each delay has one operand and one consumer and spans the timing gap
/// it covers.
pub fn check_leveled(g: &DataFlowGraph, lat: &Latencies) -> Result<(), String> {
    let cons = g.consumers();
    for (v, vx) in g.vertices.iter().enumerate() {
        let start = vx.ready - lat.vertex(vx).min(vx.ready);
        match vx.kind {
            VertexKind::Operator { op } if vx.args.len() != op.arity() => {
                return Err(format!("vertex {v} has {} operands", vx.args.len()));
            }
            VertexKind::Delay { cycles } => {
                if vx.args.len() != 1 || cons[v].len() != 1 {
                    return Err(format!("delay {v} must have one operand and one consumer"));
                }
                let a = &g.vertices[vx.args[0]];
                if a.ready + cycles != vx.ready || a.level >= vx.level {
                    return Err(format!("delay {v} does not match its operand"));
                }
                continue;
            }
            VertexKind::Output { .. } => {
                let ok = vx.args.len() == 1 && {
                    let a = &g.vertices[vx.args[0]];
                    a.level == vx.level && a.ready == vx.ready
                };
                if !ok {
                    return Err(format!("output {v} must sit beside its single operand"));
                }
                continue;
            }
            VertexKind::Input { .. } | VertexKind::Constant { .. } => {
                if !vx.args.is_empty() {
                    return Err(format!("vertex {v} is a source with operands"));
                }
                continue;
            }
            VertexKind::Operator { .. } => {}
        }
        for &a in &vx.args {
            let ax = &g.vertices[a];
            if ax.level + 1 != vx.level {
                return Err(format!("operand {a} of {v} is on level {}, expected {}", ax.level, vx.level - 1));
            }
            if ax.ready != start && !matches!(ax.kind, VertexKind::Constant { .. }) {
                return Err(format!("operand {a} of {v} is ready at {}, consumer starts at {start}", ax.ready));
            }
        }
    }
    Ok(())
}
