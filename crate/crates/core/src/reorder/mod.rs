//! Bandwidth-reducing labelings: GPS, AM1 and an exact oracle for tiny graphs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::meshcore::{Graph, Labeling};

pub mod am1;
mod exact;
mod gps;
mod level;

pub use am1::{Part, StepLog};
pub use level::LevelStructure;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReorderError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("exact search supports at most {max} vertices, graph has {n}")]
    TooLarge { n: usize, max: usize },
}

/// Endpoints of a pseudo-diameter of the component holding a minimum-degree vertex.
pub fn pseudo_diameter(g: &Graph) -> Result<(usize, usize), ReorderError> {
    level::pseudo_diameter(g).ok_or(ReorderError::EmptyGraph)
}

/// Pseudo-diameter endpoint AM1 starts from: the one of lower degree.
pub(crate) fn am1_start(g: &Graph) -> usize {
    let (a, b) = level::pseudo_diameter(g).expect("non-empty graph");
    if g.degree(b) < g.degree(a) {
        b
    } else {
        a
    }
}

/// Labels each connected component in turn, largest first.
fn per_component(g: &Graph, mut order_of: impl FnMut(&Graph) -> Vec<usize>) -> Result<Labeling, ReorderError> {
    if g.is_empty() {
        return Err(ReorderError::EmptyGraph);
    }
    let mut order = Vec::with_capacity(g.n());
    for comp in g.connected_components() {
        let (sub, map) = g.induced_subgraph(&comp);
        order.extend(order_of(&sub).into_iter().map(|v| map[v]));
    }
    Ok(Labeling::from_order(&order).expect("component orders cover every vertex once"))
}

pub fn gps_reorder(g: &Graph) -> Result<Labeling, ReorderError> {
    per_component(g, gps::gps_order)
}

/// How AM1 maintains importance values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Am1Mode {
    #[default]
    Incremental,
    /// Recompute everything per step; quadratic, for cross-checking.
    Naive,
}

pub fn am1_reorder(g: &Graph, seed: u64) -> Result<Labeling, ReorderError> {
    am1_reorder_with(g, seed, Am1Mode::Incremental)
}

pub fn am1_reorder_with(g: &Graph, seed: u64, mode: Am1Mode) -> Result<Labeling, ReorderError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    per_component(g, |sub| {
        let start = am1_start(sub);
        match mode {
            Am1Mode::Incremental => am1::grow_full(sub, start, &mut rng, None),
            Am1Mode::Naive => am1::grow_full_naive(sub, start, &mut rng),
        }
    })
}

/// AM1 plus the per-step construction log of every component, in labeling order.
pub fn am1_reorder_logged(g: &Graph, seed: u64) -> Result<(Labeling, Vec<StepLog>), ReorderError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = Vec::new();
    let f = per_component(g, |sub| am1::grow_full(sub, am1_start(sub), &mut rng, Some(&mut log)))?;
    Ok((f, log))
}

/// Minimum serial bandwidth over all labelings, found by branch and bound.
pub fn exact_min_sbw(g: &Graph) -> Result<(Labeling, usize), ReorderError> {
    exact_with(g, true)
}

/// Same as [`exact_min_sbw`]; `prune = false` scores every permutation.
pub fn exact_with(g: &Graph, prune: bool) -> Result<(Labeling, usize), ReorderError> {
    if g.n() > exact::MAX_EXACT_N {
        return Err(ReorderError::TooLarge { n: g.n(), max: exact::MAX_EXACT_N });
    }
    let (order, best) = exact::search(g, prune);
    Ok((Labeling::from_order(&order).unwrap(), best))
}
