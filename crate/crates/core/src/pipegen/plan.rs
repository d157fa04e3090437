use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Cluster, ClusterPlan, DataFlowGraph, PipegenError, Vertex, VertexKind};

#[derive(Serialize, Deserialize)]
struct PlanFile {
    format: String,
    io_limit: usize,
    band_rows: usize,
    depth: u64,
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
    clusters: Vec<Cluster>,
}

#[derive(Serialize, Deserialize)]
struct VertexRecord {
    id: usize,
    #[serde(flatten)]
    kind: VertexKind,
    level: usize,
    x: usize,
    ready: u64,
    cluster: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    from: usize,
    to: usize,
    operand: usize,
    /// Shift-register stages on this edge; nonzero only out of a delay vertex.
    delay: u64,
}

const FORMAT: &str = "meshstream-plan/1";

/// JSON form of a plan.
pub fn emit_plan(plan: &ClusterPlan) -> Result<String, PipegenError> {
    let g = &plan.graph;
    let file = PlanFile {
        format: FORMAT.into(),
        io_limit: plan.io_limit,
        band_rows: plan.band_rows,
        depth: g.depth(),
        vertices: g
            .vertices
            .iter()
            .enumerate()
            .map(|(id, v)| VertexRecord { id, kind: v.kind.clone(), level: v.level, x: v.x, ready: v.ready, cluster: v.cluster })
            .collect(),
        edges: g
            .edges()
            .map(|(from, to, operand)| EdgeRecord {
                from,
                to,
                operand,
                delay: match g.vertices[from].kind {
                    VertexKind::Delay { cycles } => cycles,
                    _ => 0,
                },
            })
            .collect(),
        clusters: plan.clusters.clone(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Reads a plan written by [`emit_plan`] and checks its invariants.
pub fn load_plan(text: &str) -> Result<ClusterPlan, PipegenError> {
    let file: PlanFile = serde_json::from_str(text)?;
    let bad = |m: String| PipegenError::InvalidPlan(m);
    if file.format != FORMAT {
        return Err(bad(format!("unknown format {:?}", file.format)));
    }
    let n = file.vertices.len();
    let mut vertices = Vec::with_capacity(n);
    for (i, r) in file.vertices.into_iter().enumerate() {
        if r.id != i {
            return Err(bad(format!("vertex {i} has id {}", r.id)));
        }
        vertices.push(Vertex { kind: r.kind, args: Vec::new(), level: r.level, x: r.x, ready: r.ready, cluster: r.cluster });
    }
    let mut slots: Vec<Vec<Option<usize>>> = vec![Vec::new(); n];
    for e in &file.edges {
        if e.from >= n || e.to >= n {
            return Err(bad(format!("edge {}->{} out of range", e.from, e.to)));
        }
        let s = &mut slots[e.to];
        if s.len() <= e.operand {
            s.resize(e.operand + 1, None);
        }
        if s[e.operand].replace(e.from).is_some() {
            return Err(bad(format!("operand {} of {} given twice", e.operand, e.to)));
        }
        let expected = match vertices[e.from].kind {
            VertexKind::Delay { cycles } => cycles,
            _ => 0,
        };
        if e.delay != expected {
            return Err(bad(format!("edge {}->{} has delay {}, vertex says {expected}", e.from, e.to, e.delay)));
        }
    }
    for (v, s) in slots.into_iter().enumerate() {
        vertices[v].args = s.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| bad(format!("vertex {v} misses an operand")))?;
    }
    let graph = DataFlowGraph { vertices };
    graph.topo_order()?;
    if graph.depth() != file.depth {
        return Err(bad("depth does not match the vertices".into()));
    }
    let plan = ClusterPlan { graph, clusters: file.clusters, io_limit: file.io_limit, band_rows: file.band_rows };
    plan.validate()?;
    Ok(plan)
}

/// Leveled graph with cluster rectangles; levels run top to bottom.
pub fn render_svg(plan: &ClusterPlan) -> String {
    let g = &plan.graph;
    let (dx, dy, pad) = (36.0, 48.0, 24.0);
    let width = g.levels().iter().map(|l| l.len()).max().unwrap_or(1) as f64 * dx + 2.0 * pad;
    let height = g.num_levels().max(1) as f64 * dy + 2.0 * pad;
    let pos = |v: usize| {
        let vx = &g.vertices[v];
        // output ports are drawn just below the value they write
        let port = if matches!(vx.kind, VertexKind::Output { .. }) { 0.4 } else { 0.0 };
        (pad + dx * (vx.x as f64 + 0.5), pad + dy * (vx.level as f64 + 0.5 + port))
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" font-family="monospace" font-size="9">"#);
    for c in &plan.clusters {
        let (x0, y0) = (pad + dx * c.x_range.0 as f64 + 2.0, pad + dy * c.levels.0 as f64 + 2.0);
        let (w, h) = (dx * (c.x_range.1 - c.x_range.0) as f64 - 4.0, dy * (c.levels.1 - c.levels.0) as f64 - 4.0);
        let _ = writeln!(s, r##"<rect x="{x0:.1}" y="{y0:.1}" width="{w:.1}" height="{h:.1}" fill="#eef4ff" stroke="#4a6fb5"/>"##);
        let _ = writeln!(s, r##"<text x="{:.1}" y="{:.1}" fill="#4a6fb5">c{} io{}</text>"##, x0 + 2.0, y0 + 9.0, c.id, c.io());
    }
    for (a, b, _) in g.edges() {
        let ((x1, y1), (x2, y2)) = (pos(a), pos(b));
        let _ = writeln!(s, r##"<line x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="#888"/>"##);
    }
    for (v, vx) in g.vertices.iter().enumerate() {
        let (x, y) = pos(v);
        let (label, fill) = match &vx.kind {
            VertexKind::Input { name } => (name.clone(), "#d8f0d8"),
            VertexKind::Constant { value } => (format!("{value}"), "#f0f0f0"),
            VertexKind::Operator { op } => (op.symbol().to_string(), "#ffffff"),
            VertexKind::Delay { cycles } => (format!("z{cycles}"), "#fff3d0"),
            VertexKind::Output { name } => (name.clone(), "#f6d8d8"),
        };
        let _ = writeln!(s, r##"<circle cx="{x:.1}" cy="{y:.1}" r="11" fill="{fill}" stroke="#333"/>"##);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, y + 3.0, escape(&label));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
