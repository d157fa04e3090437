//! AM1 ("Amoeba1"): constructive serial-bandwidth labeling.
//!
//! A part `P` grows one vertex at a time. For member `i` (1-based local index):
//!
//! * `s(i)` is the distance back to its lowest-indexed neighbor in `P` (0 when
//!   that neighbor would be `i` itself or later),
//! * `u(i)` is the set of its neighbors outside `P`,
//! * `I` is the first member with non-empty `u`,
//! * `imp(i) = (n - i) + |u(i)| + s(i)` for `i >= I` and `0` below `I`.
//!
//! The next vertex is the element of `u(I)` whose most important in-part
//! neighbor (other than `node(I)`) is most important overall.

use std::collections::BinaryHeap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::meshcore::Graph;

/// Snapshot taken after every insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepLog {
    /// Part size after the insertion.
    pub size: usize,
    /// First open index after the insertion (`size + 1` when nothing is open).
    pub first_open: usize,
    /// `imp(I)` after the insertion, 0 when nothing is open.
    pub imp_first_open: usize,
    /// Largest `imp(k)` over `I <= k <= n`, when tracked.
    pub max_imp: Option<usize>,
}

/// A growing AM1 part over a host graph.
///
/// Vertices outside `eligible` never join. Vertices flagged in `executed`
/// may join as ghosts: their `u` is empty and their importance is zero.
pub struct Part<'g> {
    g: &'g Graph,
    eligible: Option<&'g [bool]>,
    executed: Option<&'g [bool]>,
    /// vertex -> local index (1-based), 0 when outside the part
    local: Vec<usize>,
    members: Vec<usize>,
    s: Vec<usize>,
    open: Vec<usize>,
    ghost: Vec<bool>,
    first_open: usize,
    heap: Option<BinaryHeap<(i64, usize)>>,
}

impl<'g> Part<'g> {
    pub fn new(g: &'g Graph, eligible: Option<&'g [bool]>, executed: Option<&'g [bool]>, track_max: bool) -> Self {
        Part {
            g,
            eligible,
            executed,
            local: vec![0; g.n()],
            members: Vec::new(),
            s: Vec::new(),
            open: Vec::new(),
            ghost: Vec::new(),
            first_open: 1,
            heap: track_max.then(BinaryHeap::new),
        }
    }

    #[inline]
    fn is_eligible(&self, v: usize) -> bool {
        self.eligible.is_none_or(|e| e[v])
    }

    #[inline]
    fn is_executed(&self, v: usize) -> bool {
        self.executed.is_some_and(|e| e[v])
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.local[v] != 0
    }

    /// Local index of `v`, if it is a member.
    pub fn index_of(&self, v: usize) -> Option<usize> {
        (self.local[v] != 0).then_some(self.local[v])
    }

    /// `I`: first index whose `u` is non-empty, `len() + 1` if none is.
    pub fn first_open(&self) -> usize {
        self.first_open
    }

    pub fn member(&self, i: usize) -> usize {
        self.members[i - 1]
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn is_ghost(&self, i: usize) -> bool {
        self.ghost[i - 1]
    }

    pub fn s(&self, i: usize) -> usize {
        self.s[i - 1]
    }

    /// `|u(i)|`.
    pub fn open_count(&self, i: usize) -> usize {
        self.open[i - 1]
    }

    /// `u(i)` in increasing vertex id.
    pub fn uncovered(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let ghost = self.ghost[i - 1];
        self.g
            .neighbors(self.member(i))
            .iter()
            .copied()
            .filter(move |&w| !ghost && self.local[w] == 0 && self.is_eligible(w))
    }

    pub fn imp(&self, i: usize) -> usize {
        if i < self.first_open || self.ghost[i - 1] {
            0
        } else {
            self.len() - i + self.open[i - 1] + self.s[i - 1]
        }
    }

    fn key(&self, i: usize) -> i64 {
        (self.open[i - 1] + self.s[i - 1]) as i64 - i as i64
    }

    /// `max_{I <= k <= n} imp(k)`; requires `track_max`.
    pub fn max_open_imp(&mut self) -> Option<usize> {
        let n = self.len() as i64;
        let first = self.first_open;
        loop {
            let &(key, i) = self.heap.as_ref()?.peek()?;
            if i < first || self.ghost[i - 1] || key != self.key(i) {
                self.heap.as_mut().unwrap().pop();
                continue;
            }
            return Some((n + key) as usize);
        }
    }

    /// Appends `v` with index `len() + 1`.
    pub fn insert(&mut self, v: usize) {
        debug_assert!(self.local[v] == 0 && self.is_eligible(v));
        let idx = self.members.len() + 1;
        self.local[v] = idx;
        self.members.push(v);
        let ghost = self.is_executed(v);
        let mut lowest = idx;
        let mut open = 0;
        for &w in self.g.neighbors(v) {
            let lw = self.local[w];
            if lw != 0 && lw != idx {
                lowest = lowest.min(lw);
                if !self.ghost[lw - 1] {
                    self.open[lw - 1] -= 1;
                    if let Some(h) = self.heap.as_mut() {
                        h.push(((self.open[lw - 1] + self.s[lw - 1]) as i64 - lw as i64, lw));
                    }
                }
            } else if lw == 0 && !ghost && self.is_eligible(w) {
                open += 1;
            }
        }
        self.s.push(idx - lowest);
        self.open.push(open);
        self.ghost.push(ghost);
        if !ghost {
            if let Some(h) = self.heap.as_mut() {
                h.push(((open + idx - lowest) as i64 - idx as i64, idx));
            }
        }
        while self.first_open <= self.members.len()
            && (self.ghost[self.first_open - 1] || self.open[self.first_open - 1] == 0)
        {
            self.first_open += 1;
        }
    }

    /// Picks the next vertex from `u(I)`, or `None` when every member is covered.
    pub fn choose_candidate(&self, rng: &mut ChaCha8Rng) -> Option<usize> {
        let first = self.first_open;
        if first > self.len() {
            return None;
        }
        let node_first = self.member(first);
        let pool: Vec<usize> = self.uncovered(first).collect();
        let mut candidate = pool[rng.gen_range(0..pool.len())];
        let mut global_max = 0;
        for &k in &pool {
            let mut local_max = 0;
            for &l in self.g.neighbors(k) {
                if l != node_first && self.local[l] != 0 {
                    local_max = local_max.max(self.imp(self.local[l]));
                }
            }
            if local_max > global_max {
                candidate = k;
                global_max = local_max;
            }
        }
        Some(candidate)
    }

    pub fn log(&mut self) -> StepLog {
        let first_open = self.first_open;
        let imp_first_open = if first_open <= self.len() { self.imp(first_open) } else { 0 };
        let max_imp = if self.heap.is_some() { Some(self.max_open_imp().unwrap_or(0)) } else { None };
        StepLog { size: self.len(), first_open, imp_first_open, max_imp }
    }
}

/// Grows a part from `start` until its component is exhausted.
pub(crate) fn grow_full(g: &Graph, start: usize, rng: &mut ChaCha8Rng, mut log: Option<&mut Vec<StepLog>>) -> Vec<usize> {
    let mut part = Part::new(g, None, None, log.is_some());
    part.insert(start);
    if let Some(l) = log.as_deref_mut() {
        l.push(part.log());
    }
    while let Some(v) = part.choose_candidate(rng) {
        part.insert(v);
        if let Some(l) = log.as_deref_mut() {
            l.push(part.log());
        }
    }
    part.members().to_vec()
}

/// Reference implementation that recomputes `s`, `u`, `I` and `imp` from
/// scratch at every step. Quadratic; test use only.
pub(crate) fn grow_full_naive(g: &Graph, start: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut members = vec![start];
    loop {
        let n = members.len();
        let mut local = vec![0usize; g.n()];
        for (i, &v) in members.iter().enumerate() {
            local[v] = i + 1;
        }
        let u: Vec<Vec<usize>> =
            members.iter().map(|&v| g.neighbors(v).iter().copied().filter(|&w| local[w] == 0).collect()).collect();
        let s: Vec<usize> = members
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let lowest = g.neighbors(v).iter().filter(|&&w| local[w] != 0).map(|&w| local[w]).min();
                (i + 1) - lowest.unwrap_or(i + 1).min(i + 1)
            })
            .collect();
        let Some(first) = (1..=n).find(|&i| !u[i - 1].is_empty()) else {
            return members;
        };
        let imp = |i: usize| if i < first { 0 } else { n - i + u[i - 1].len() + s[i - 1] };
        let pool = &u[first - 1];
        let mut candidate = pool[rng.gen_range(0..pool.len())];
        let mut global_max = 0;
        for &k in pool {
            let local_max = g
                .neighbors(k)
                .iter()
                .filter(|&&l| local[l] != 0 && l != members[first - 1])
                .map(|&l| imp(local[l]))
                .max()
                .unwrap_or(0);
            if local_max > global_max {
                candidate = k;
                global_max = local_max;
            }
        }
        members.push(candidate);
    }
}
