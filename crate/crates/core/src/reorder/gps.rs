//! Gibbs-Poole-Stockmeyer labeling of a connected graph.

use super::level::{pseudo_diameter_from, LevelStructure};
use crate::meshcore::Graph;

/// Vertex order produced by GPS on a connected graph (`order[k]` gets label `k + 1`).
pub(crate) fn gps_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    if n == 0 {
        return Vec::new();
    }
    let start = (0..n).min_by_key(|&v| (g.degree(v), v)).unwrap();
    let (mut v, mut u) = pseudo_diameter_from(g, start);
    let lv = LevelStructure::rooted(g, v);
    let lu = LevelStructure::rooted(g, u);
    let k = lv.depth();
    debug_assert_eq!(lu.depth(), k);

    let level = merge_levels(g, &lv, &lu);

    // number from the endpoint of smaller degree
    let level: Vec<usize> = if g.degree(u) < g.degree(v) {
        std::mem::swap(&mut v, &mut u);
        level.iter().map(|&l| k - 1 - l).collect()
    } else {
        level
    };

    let mut members = vec![Vec::new(); k];
    for w in 0..n {
        members[level[w]].push(w);
    }
    for m in &mut members {
        m.sort_by_key(|&w| (g.degree(w), w));
    }

    let mut numbered = vec![false; n];
    let mut order = Vec::with_capacity(n);
    // per level: vertices numbered so far, in numbering order
    let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); k];
    let push = |w: usize, numbered: &mut Vec<bool>, by_level: &mut Vec<Vec<usize>>, order: &mut Vec<usize>| {
        numbered[w] = true;
        by_level[level[w]].push(w);
        order.push(w);
    };
    push(v, &mut numbered, &mut by_level, &mut order);

    let mut scratch = Vec::new();
    for i in 0..k {
        let mut cursor = 0;
        loop {
            while cursor < by_level[i].len() {
                let w = by_level[i][cursor];
                cursor += 1;
                scratch.clear();
                scratch.extend(g.neighbors(w).iter().copied().filter(|&x| !numbered[x] && level[x] == i));
                scratch.sort_by_key(|&x| (g.degree(x), x));
                for &x in &scratch {
                    push(x, &mut numbered, &mut by_level, &mut order);
                }
            }
            match members[i].iter().copied().find(|&x| !numbered[x]) {
                Some(x) => push(x, &mut numbered, &mut by_level, &mut order),
                None => break,
            }
        }
        if i + 1 < k {
            for idx in 0..by_level[i].len() {
                let w = by_level[i][idx];
                scratch.clear();
                scratch.extend(g.neighbors(w).iter().copied().filter(|&x| !numbered[x] && level[x] == i + 1));
                scratch.sort_by_key(|&x| (g.degree(x), x));
                for &x in &scratch {
                    push(x, &mut numbered, &mut by_level, &mut order);
                }
            }
        }
    }
    debug_assert_eq!(order.len(), n);
    order
}

/// Combines the level structures rooted at both pseudo-diameter endpoints into
/// one of small width.
fn merge_levels(g: &Graph, lv: &LevelStructure, lu: &LevelStructure) -> Vec<usize> {
    let n = g.n();
    let k = lv.depth();
    let from_v = |w: usize| lv.level_of[w];
    let from_u = |w: usize| k - 1 - lu.level_of[w];

    let mut level = vec![usize::MAX; n];
    let mut count = vec![0usize; k];
    for w in 0..n {
        if from_v(w) == from_u(w) {
            level[w] = from_v(w);
            count[level[w]] += 1;
        }
    }

    // components of the vertices whose two candidate levels disagree
    let mut comp_of = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for root in 0..n {
        if level[root] != usize::MAX || comp_of[root] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut comp = vec![root];
        comp_of[root] = id;
        let mut head = 0;
        while head < comp.len() {
            let w = comp[head];
            head += 1;
            for &x in g.neighbors(w) {
                if level[x] == usize::MAX && comp_of[x] == usize::MAX {
                    comp_of[x] = id;
                    comp.push(x);
                }
            }
        }
        comps.push(comp);
    }
    comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));

    let v_narrower = lv.width() <= lu.width();
    let mut add = vec![0usize; k];
    for comp in &comps {
        let widest = |pick: &dyn Fn(usize) -> usize, add: &mut Vec<usize>| {
            add.iter_mut().for_each(|a| *a = 0);
            for &w in comp {
                add[pick(w)] += 1;
            }
            (0..k).filter(|&i| add[i] > 0).map(|i| count[i] + add[i]).max().unwrap_or(0)
        };
        let h = widest(&from_v, &mut add);
        let l = widest(&from_u, &mut add);
        let use_v = h < l || (h == l && v_narrower);
        for &w in comp {
            level[w] = if use_v { from_v(w) } else { from_u(w) };
            count[level[w]] += 1;
        }
    }
    level
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshcore::{classical_bandwidth, Labeling};

    #[test]
    fn exact_on_paths() {
        for n in 1..12 {
            let g = Graph::path(n);
            let f = Labeling::from_order(&gps_order(&g)).unwrap();
            assert_eq!(classical_bandwidth(&g, &f).unwrap(), usize::from(n > 1));
        }
    }

    #[test]
    fn grid_bandwidth_is_near_side_length() {
        let g = Graph::grid(8, 8);
        let f = Labeling::from_order(&gps_order(&g)).unwrap();
        assert!(classical_bandwidth(&g, &f).unwrap() <= 9);
    }
}
