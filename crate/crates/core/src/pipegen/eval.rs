use std::collections::{BTreeMap, HashMap};

use super::{ClusterPlan, DataFlowGraph, PipegenError, VertexKind};

fn source_value(kind: &VertexKind, inputs: &BTreeMap<String, f64>) -> Result<Option<f64>, PipegenError> {
    Ok(match kind {
        VertexKind::Input { name } => Some(*inputs.get(name).ok_or_else(|| PipegenError::MissingInput(name.clone()))?),
        VertexKind::Constant { value } => Some(*value),
        _ => None,
    })
}

fn fire(kind: &VertexKind, args: &[f64]) -> f64 {
    match kind {
        VertexKind::Operator { op } => op.apply(args),
        _ => args[0],
    }
}

/// Output values of the graph for one input vector.
pub fn evaluate(g: &DataFlowGraph, inputs: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>, PipegenError> {
    let mut val = vec![0.0; g.len()];
    let mut out = BTreeMap::new();
    for v in g.topo_order()? {
        let vx = &g.vertices[v];
        val[v] = match source_value(&vx.kind, inputs)? {
            Some(x) => x,
            None => fire(&vx.kind, &vx.args.iter().map(|&a| val[a]).collect::<Vec<_>>()),
        };
        if let VertexKind::Output { name } = &vx.kind {
            out.insert(name.clone(), val[v]);
        }
    }
    Ok(out)
}

/// Evaluates the plan as communicating clusters.
///
/// A cluster only sees its own results, graph inputs, and values delivered
/// through FIFOs, one per cut net and consuming cluster. Clusters are polled
/// round-robin and fire whatever vertices they can until all have fired.
pub fn evaluate_clustered(plan: &ClusterPlan, inputs: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>, PipegenError> {
    let g = &plan.graph;
    let cons = g.consumers();
    let mut local: Vec<HashMap<usize, f64>> = vec![HashMap::new(); plan.clusters.len()];
    let mut fifo: HashMap<(usize, usize), f64> = HashMap::new();
    let mut pending: Vec<Vec<usize>> = plan
        .clusters
        .iter()
        .map(|c| {
            let mut m = c.members.clone();
            m.sort_by_key(|&v| (g.vertices[v].level, g.vertices[v].x));
            m
        })
        .collect();
    let mut out = BTreeMap::new();
    loop {
        let mut progress = false;
        for c in 0..plan.clusters.len() {
            let mut still = Vec::new();
            for &v in &pending[c] {
                let vx = &g.vertices[v];
                let value = match source_value(&vx.kind, inputs)? {
                    Some(x) => Some(x),
                    None => {
                        let args: Option<Vec<f64>> = vx
                            .args
                            .iter()
                            .map(|&a| {
                                if g.vertices[a].cluster == Some(c) {
                                    local[c].get(&a).copied()
                                } else if let VertexKind::Input { name } = &g.vertices[a].kind {
                                    inputs.get(name).copied()
                                } else {
                                    fifo.get(&(c, a)).copied()
                                }
                            })
                            .collect();
                        args.map(|a| fire(&vx.kind, &a))
                    }
                };
                let Some(x) = value else {
                    still.push(v);
                    continue;
                };
                if let VertexKind::Input { name } = &vx.kind {
                    return Err(PipegenError::InvalidPlan(format!("input {name:?} placed in cluster {c}")));
                }
                progress = true;
                local[c].insert(v, x);
                for &w in &cons[v] {
                    match g.vertices[w].cluster {
                        Some(d) if d != c => {
                            fifo.insert((d, v), x);
                        }
                        _ => {}
                    }
                }
                if let VertexKind::Output { name } = &vx.kind {
                    out.insert(name.clone(), x);
                }
            }
            pending[c] = still;
        }
        if pending.iter().all(|p| p.is_empty()) {
            break;
        }
        if !progress {
            let missing = g.inputs().into_iter().find(|n| !inputs.contains_key(*n));
            return Err(match missing {
                Some(n) => PipegenError::MissingInput(n.to_string()),
                None => PipegenError::InvalidPlan("clusters deadlock".into()),
            });
        }
    }
    Ok(out)
}
