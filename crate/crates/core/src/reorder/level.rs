use crate::meshcore::Graph;

/// Rooted level structure: level `k` holds the vertices at distance `k` from the root.
#[derive(Debug, Clone)]
pub struct LevelStructure {
    pub root: usize,
    /// Level of each vertex, `usize::MAX` if unreachable from the root.
    pub level_of: Vec<usize>,
    pub levels: Vec<Vec<usize>>,
}

impl LevelStructure {
    pub fn rooted(g: &Graph, root: usize) -> Self {
        let level_of = g.bfs_distances(root);
        let depth = level_of.iter().filter(|&&d| d != usize::MAX).max().map_or(0, |&d| d + 1);
        let mut levels = vec![Vec::new(); depth];
        for (v, &d) in level_of.iter().enumerate() {
            if d != usize::MAX {
                levels[d].push(v);
            }
        }
        LevelStructure { root, level_of, levels }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn width(&self) -> usize {
        self.levels.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Endpoints of a pseudo-diameter of the component containing a minimum-degree
/// vertex, found with the GPS iteration. `None` for an empty graph.
///
/// Starting from a minimum-degree vertex, the last level of its rooted level
/// structure is scanned in increasing degree (one candidate per distinct degree).
/// A candidate with a deeper level structure becomes the new start; otherwise the
/// candidate with the narrowest level structure is the other endpoint.
pub fn pseudo_diameter(g: &Graph) -> Option<(usize, usize)> {
    let start = (0..g.n()).min_by_key(|&v| (g.degree(v), v))?;
    Some(pseudo_diameter_from(g, start))
}

pub(crate) fn pseudo_diameter_from(g: &Graph, start: usize) -> (usize, usize) {
    let mut v = start;
    let mut lv = LevelStructure::rooted(g, v);
    'outer: loop {
        let mut last = lv.levels.last().cloned().unwrap_or_default();
        last.sort_by_key(|&w| (g.degree(w), w));
        last.dedup_by_key(|w| g.degree(*w));
        let mut best: Option<(usize, usize)> = None;
        for &u in &last {
            if u == v {
                continue;
            }
            let lu = LevelStructure::rooted(g, u);
            if lu.depth() > lv.depth() {
                v = u;
                lv = lu;
                continue 'outer;
            }
            let w = lu.width();
            if best.is_none_or(|(_, bw)| w < bw) {
                best = Some((u, w));
            }
        }
        return (v, best.map_or(v, |(u, _)| u));
    }
}
