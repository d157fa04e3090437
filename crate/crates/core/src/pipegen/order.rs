use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DataFlowGraph, VertexKind};

const SWEEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    /// Objective of the best barycenter layout, before swapping.
    pub barycenter: f64,
    pub refined: f64,
    pub swaps: usize,
}

/// Sum over edges of the squared horizontal distance between the endpoints.
pub fn objective(g: &DataFlowGraph) -> f64 {
    g.edges()
        .map(|(a, b, _)| {
            let d = g.vertices[a].x as f64 - g.vertices[b].x as f64;
            d * d
        })
        .sum()
}

fn is_output(g: &DataFlowGraph, v: usize) -> bool {
    matches!(g.vertices[v].kind, VertexKind::Output { .. })
}

/// Adjacency without output ports, which always sit on their operand.
fn neighbors(g: &DataFlowGraph) -> Vec<Vec<usize>> {
    let mut nb = vec![Vec::new(); g.len()];
    for (a, b, _) in g.edges() {
        if !is_output(g, b) {
            nb[a].push(b);
            nb[b].push(a);
        }
    }
    nb
}

fn set_positions(g: &mut DataFlowGraph, levels: &[Vec<usize>]) {
    for l in levels {
        for (x, &v) in l.iter().enumerate() {
            g.vertices[v].x = x;
        }
    }
    sync_outputs(g);
}

/// Places every output port on the column of the value it writes.
pub(crate) fn sync_outputs(g: &mut DataFlowGraph) {
    for v in 0..g.len() {
        if is_output(g, v) {
            g.vertices[v].x = g.vertices[g.vertices[v].args[0]].x;
        }
    }
}

/// Alternating down and up barycenter sweeps; returns the best layout seen.
fn barycenter(g: &mut DataFlowGraph, nb: &[Vec<usize>], mut levels: Vec<Vec<usize>>) -> (Vec<Vec<usize>>, f64) {
    set_positions(g, &levels);
    let mut best = (levels.clone(), objective(g));
    let depth = levels.len();
    for sweep in 0..2 * SWEEPS {
        let down = sweep % 2 == 0;
        let range: Vec<usize> = if down { (1..depth).collect() } else { (0..depth.saturating_sub(1)).rev().collect() };
        for l in range {
            let key = |v: usize| {
                let side: Vec<f64> = nb[v]
                    .iter()
                    .filter(|&&w| if down { g.vertices[w].level < l } else { g.vertices[w].level > l })
                    .map(|&w| g.vertices[w].x as f64)
                    .collect();
                if side.is_empty() {
                    g.vertices[v].x as f64
                } else {
                    side.iter().sum::<f64>() / side.len() as f64
                }
            };
            let mut keyed: Vec<(f64, usize)> = levels[l].iter().map(|&v| (key(v), v)).collect();
            keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            levels[l] = keyed.into_iter().map(|k| k.1).collect();
            set_positions(g, &levels[l..=l]);
        }
        let obj = objective(g);
        if obj < best.1 {
            best = (levels.clone(), obj);
        }
    }
    (best.0, best.1)
}

/// Assigns `x` positions within each level. Output ports take the column of
/// their operand and are not ordered themselves.
///
/// Runs barycenter sweeps from the parse order and from `restarts - 1` random
/// permutations, keeps the best, then applies improving pairwise swaps within
/// levels until none is left.
pub fn order_horizontally(g: &mut DataFlowGraph, seed: u64, restarts: usize) -> OrderReport {
    let nb = neighbors(g);
    let mut levels = vec![Vec::new(); g.num_levels()];
    for v in 0..g.len() {
        if !is_output(g, v) {
            levels[g.vertices[v].level].push(v);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<Vec<usize>>, f64)> = None;
    for r in 0..restarts.max(1) {
        let mut init = levels.clone();
        if r > 0 {
            for l in &mut init {
                l.shuffle(&mut rng);
            }
        }
        let run = barycenter(g, &nb, init);
        if best.as_ref().is_none_or(|b| run.1 < b.1) {
            best = Some(run);
        }
    }
    let (mut levels, start) = best.unwrap();
    set_positions(g, &levels);

    let mut swaps = 0;
    loop {
        let mut improved = false;
        for level in &mut levels {
            for i in 0..level.len() {
                for j in i + 1..level.len() {
                    let (a, b) = (level[i], level[j]);
                    let (xa, xb) = (g.vertices[a].x as f64, g.vertices[b].x as f64);
                    // same-level neighbors may include the partner
                    let at = |w: usize, swapped: bool| -> f64 {
                        match (swapped, w) {
                            (true, w) if w == a => xb,
                            (true, w) if w == b => xa,
                            _ => g.vertices[w].x as f64,
                        }
                    };
                    let cost = |swapped: bool| -> f64 {
                        [a, b]
                            .iter()
                            .flat_map(|&v| nb[v].iter().map(move |&w| (v, w)))
                            .map(|(v, w)| {
                                let d = at(v, swapped) - at(w, swapped);
                                d * d
                            })
                            .sum()
                    };
                    let delta = cost(true) - cost(false);
                    if delta < -1e-9 {
                        level.swap(i, j);
                        g.vertices[a].x = j;
                        g.vertices[b].x = i;
                        sync_outputs(g);
                        swaps += 1;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    OrderReport { barycenter: start, refined: objective(g), swaps }
}
