use std::fmt::Write as _;
use std::path::Path;

use super::{Graph, MeshError};

/// Bijection from vertex ids `0..n` onto labels `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    labels: Vec<usize>,
}

impl Labeling {
    /// Wraps a vertex -> label table, checking that it is a bijection onto `1..=n`.
    pub fn new(labels: Vec<usize>) -> Result<Self, MeshError> {
        let n = labels.len();
        let mut seen = vec![false; n];
        for (v, &l) in labels.iter().enumerate() {
            if l == 0 || l > n || seen[l - 1] {
                return Err(MeshError::InvalidLabeling(format!(
                    "vertex {v} has label {l}, expected a permutation of 1..={n}"
                )));
            }
            seen[l - 1] = true;
        }
        Ok(Labeling { labels })
    }

    /// Labeling in which `order[k]` receives label `k + 1`.
    pub fn from_order(order: &[usize]) -> Result<Self, MeshError> {
        let n = order.len();
        let mut labels = vec![0; n];
        for (k, &v) in order.iter().enumerate() {
            if v >= n || labels[v] != 0 {
                return Err(MeshError::InvalidLabeling(format!(
                    "order entry {k} = {v} is out of range or repeated"
                )));
            }
            labels[v] = k + 1;
        }
        Ok(Labeling { labels })
    }

    pub fn identity(n: usize) -> Self {
        Labeling { labels: (1..=n).collect() }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Vertices in label order.
    pub fn order(&self) -> Vec<usize> {
        let mut order = vec![0; self.len()];
        for (v, &l) in self.labels.iter().enumerate() {
            order[l - 1] = v;
        }
        order
    }

    /// Labeling `n + 1 - f(v)`.
    pub fn reversed(&self) -> Self {
        let n = self.len();
        Labeling { labels: self.labels.iter().map(|&l| n + 1 - l).collect() }
    }

    /// Text form: line `k` holds the label of vertex `k`.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 7);
        for l in &self.labels {
            writeln!(out, "{l}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, MeshError> {
        let labels = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .enumerate()
            .map(|(i, l)| {
                l.parse::<usize>()
                    .map_err(|e| MeshError::Parse { line: i + 1, msg: format!("bad label {l:?}: {e}") })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Labeling::new(labels)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, MeshError> {
        Self::from_text(&super::read_text(path.as_ref())?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), MeshError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub(crate) fn check_for(&self, g: &Graph) -> Result<(), MeshError> {
        if self.len() != g.n() {
            return Err(MeshError::SizeMismatch { graph: g.n(), labeling: self.len() });
        }
        Ok(())
    }
}

/// `B_f(G)`: maximum label distance across any edge.
pub fn classical_bandwidth(g: &Graph, f: &Labeling) -> Result<usize, MeshError> {
    f.check_for(g)?;
    Ok(g.edges().map(|(u, v)| f.label(u).abs_diff(f.label(v))).max().unwrap_or(0))
}

/// Window size implied by the classical bandwidth, `2 B_f(G) + 1`.
pub fn c_bw(classical: usize) -> usize {
    2 * classical + 1
}

/// Per-position quantities behind the serial bandwidth, indexed by label - 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SerialProfile {
    /// Lowest neighbor label of the vertex at each position.
    pub s: Vec<usize>,
    /// Highest neighbor label of the vertex at each position.
    pub e: Vec<usize>,
    /// Suffix minimum of `s`.
    pub suffix_min: Vec<usize>,
    /// Prefix maximum of `e`.
    pub prefix_max: Vec<usize>,
}

impl SerialProfile {
    pub fn new(g: &Graph, f: &Labeling) -> Result<Self, MeshError> {
        f.check_for(g)?;
        let n = g.n();
        let mut s = vec![0; n];
        let mut e = vec![0; n];
        for v in 0..n {
            let i = f.label(v);
            let labels = g.neighbors(v).iter().map(|&w| f.label(w));
            // isolated vertices keep a self window
            s[i - 1] = labels.clone().min().unwrap_or(i);
            e[i - 1] = labels.max().unwrap_or(i);
        }
        let mut suffix_min = s.clone();
        for i in (0..n.saturating_sub(1)).rev() {
            suffix_min[i] = suffix_min[i].min(suffix_min[i + 1]);
        }
        let mut prefix_max = e.clone();
        for i in 1..n {
            prefix_max[i] = prefix_max[i].max(prefix_max[i - 1]);
        }
        Ok(SerialProfile { s, e, suffix_min, prefix_max })
    }

    /// `E(i) - S(i)` for each position (saturating, so a window never goes negative).
    pub fn spans(&self) -> impl Iterator<Item = usize> + '_ {
        self.prefix_max.iter().zip(&self.suffix_min).map(|(&e, &s)| e.saturating_sub(s))
    }

    pub fn serial_bandwidth(&self) -> usize {
        self.spans().max().unwrap_or(0)
    }
}

/// Serial bandwidth `S_BW = max_i (E(i) - S(i))`: the on-chip window, minus one,
/// that keeps every neighbor of the node being processed resident while nodes
/// stream in label order.
pub fn serial_bandwidth(g: &Graph, f: &Labeling) -> Result<usize, MeshError> {
    Ok(SerialProfile::new(g, f)?.serial_bandwidth())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_metrics() {
        let g = Graph::path(5);
        let f = Labeling::identity(5);
        assert_eq!(classical_bandwidth(&g, &f).unwrap(), 1);
        assert_eq!(serial_bandwidth(&g, &f).unwrap(), 2);
        let p = SerialProfile::new(&g, &f).unwrap();
        // interior positions: S(i) = i - 1, E(i) = i + 1
        assert_eq!(p.suffix_min[2], 2);
        assert_eq!(p.prefix_max[2], 4);
        assert_eq!(c_bw(1), 3);
    }

    #[test]
    fn complete_graph_metrics_are_forced() {
        let g = Graph::complete(4);
        for order in [[0, 1, 2, 3], [3, 1, 0, 2], [2, 0, 3, 1]] {
            let f = Labeling::from_order(&order).unwrap();
            assert_eq!(classical_bandwidth(&g, &f).unwrap(), 3);
            assert_eq!(serial_bandwidth(&g, &f).unwrap(), 3);
        }
    }

    #[test]
    fn isolated_vertices_use_self_window() {
        let g = Graph::from_edges(3, &[]).unwrap();
        assert_eq!(serial_bandwidth(&g, &Labeling::identity(3)).unwrap(), 0);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let g = Graph::path(3);
        assert!(matches!(
            serial_bandwidth(&g, &Labeling::identity(4)),
            Err(MeshError::SizeMismatch { .. })
        ));
        assert!(classical_bandwidth(&g, &Labeling::identity(2)).is_err());
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Labeling::new(vec![1, 1, 2]).is_err());
        assert!(Labeling::new(vec![0, 1, 2]).is_err());
        assert!(Labeling::from_order(&[0, 0]).is_err());
        let f = Labeling::from_order(&[2, 0, 1]).unwrap();
        assert_eq!(f.labels(), &[2, 3, 1]);
        assert_eq!(f.order(), vec![2, 0, 1]);
        assert_eq!(Labeling::from_text(&f.to_text()).unwrap(), f);
    }
}
