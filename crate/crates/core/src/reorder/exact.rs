//! Exhaustive minimum serial bandwidth for tiny graphs.

use crate::meshcore::{serial_bandwidth, Graph, Labeling};

pub(crate) const MAX_EXACT_N: usize = 10;

/// Returns an optimal vertex order and its serial bandwidth.
///
/// With `prune` the search cuts every prefix whose lower bound cannot beat the
/// incumbent; without it all `n!` orders are scored.
pub(crate) fn search(g: &Graph, prune: bool) -> (Vec<usize>, usize) {
    let n = g.n();
    let mut st = Search {
        g,
        prune,
        label: vec![0; n],
        order: Vec::with_capacity(n),
        best: usize::MAX,
        best_order: (0..n).collect(),
    };
    if prune {
        st.best = serial_bandwidth(g, &Labeling::identity(n)).unwrap();
    }
    st.dfs();
    if st.best == usize::MAX {
        st.best = 0;
    }
    (st.best_order, st.best)
}

struct Search<'g> {
    g: &'g Graph,
    prune: bool,
    /// vertex -> label, 0 while unassigned
    label: Vec<usize>,
    order: Vec<usize>,
    best: usize,
    best_order: Vec<usize>,
}

impl Search<'_> {
    fn dfs(&mut self) {
        let n = self.g.n();
        let m = self.order.len();
        if m == n {
            let f = Labeling::from_order(&self.order).unwrap();
            let sbw = serial_bandwidth(self.g, &f).unwrap();
            if sbw < self.best {
                self.best = sbw;
                self.best_order.clone_from(&self.order);
            }
            return;
        }
        if self.prune && m > 0 && self.lower_bound() >= self.best {
            return;
        }
        for v in 0..n {
            if self.label[v] == 0 {
                self.label[v] = m + 1;
                self.order.push(v);
                self.dfs();
                self.order.pop();
                self.label[v] = 0;
            }
        }
    }

    /// Lower bound on `max_i E(i) - S(i)` over every completion of the prefix.
    fn lower_bound(&self) -> usize {
        let g = self.g;
        let m = self.order.len();
        let mut seen = vec![false; g.n()];
        let mut union = 0;
        let mut e_max = 0;
        let mut e_lb = Vec::with_capacity(m);
        // s of the prefix members, known when they have an assigned neighbor
        let mut s_known = Vec::with_capacity(m);
        for (i, &v) in self.order.iter().enumerate() {
            let mut lo = usize::MAX;
            if g.degree(v) == 0 {
                e_max = e_max.max(i + 1);
                lo = i + 1;
            }
            for &w in g.neighbors(v) {
                let lw = self.label[w];
                if lw == 0 {
                    if !seen[w] {
                        seen[w] = true;
                        union += 1;
                    }
                } else {
                    e_max = e_max.max(lw);
                    lo = lo.min(lw);
                }
            }
            e_lb.push(if union > 0 { e_max.max(m + union) } else { e_max });
            s_known.push(lo);
        }
        let mut bound = 0;
        let mut s_ub = usize::MAX;
        for i in (0..m).rev() {
            s_ub = s_ub.min(s_known[i]);
            if s_ub != usize::MAX {
                bound = bound.max(e_lb[i].saturating_sub(s_ub));
            }
        }
        bound
    }
}
