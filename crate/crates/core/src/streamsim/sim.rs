use serde::{Deserialize, Serialize};

use super::SimError;
use crate::accesspattern::AccessPattern;
use crate::meshcore::{Graph, Labeling};

/// Memory unit and neighborhood memory configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryConfig {
    /// Node slots in the circular buffer.
    pub capacity: usize,
    /// Slots in the neighborhood memory; must hold a node and all its neighbors.
    pub neighborhood_capacity: usize,
    /// Stall cycles charged when a required node is not resident.
    pub miss_penalty: u64,
    /// Bytes per node record read from off-chip memory.
    pub record_bytes: usize,
    /// Bytes written back per update.
    pub result_bytes: usize,
    /// Keep a per-update trace in the report.
    pub trace: bool,
}

impl MemoryConfig {
    pub fn with_capacity(capacity: usize) -> Self {
        MemoryConfig { capacity, ..Default::default() }
    }
}

impl Default for MemoryConfig {
    fn default() -> Self {
        MemoryConfig {
            capacity: 1024,
            neighborhood_capacity: 64,
            miss_penalty: 16,
            record_bytes: 56,
            result_bytes: 32,
            trace: false,
        }
    }
}

/// Input stream for the simulator.
#[derive(Debug, Clone, Copy)]
pub enum StreamSource<'a> {
    /// Every vertex once, in label order, all executed.
    Labeling(&'a Labeling),
    Pattern(&'a AccessPattern),
}

impl StreamSource<'_> {
    pub(crate) fn entries(&self) -> Vec<(usize, bool)> {
        match self {
            StreamSource::Labeling(f) => f.order().into_iter().map(|v| (v, true)).collect(),
            StreamSource::Pattern(p) => p.entries.iter().map(|e| (e.vertex, e.ex)).collect(),
        }
    }
}

/// A required node that was not resident when its stencil was issued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissEvent {
    /// Stream position of the executed entry.
    pub position: usize,
    pub vertex: usize,
    pub missing: usize,
}

/// What happened around one update.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepTrace {
    pub position: usize,
    pub vertex: usize,
    /// Stream positions loaded before this update, `[from, to)`.
    pub loaded: (usize, usize),
    /// Stream positions overwritten by those loads, `[from, to)`.
    pub evicted: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimReport {
    pub entries: usize,
    pub updates: usize,
    pub capacity: usize,
    pub misses: usize,
    /// Node records streamed into the memory unit.
    pub loads: usize,
    /// Off-chip bytes read: streamed records plus side fetches on misses.
    pub bytes_in: u64,
    pub bytes_out: u64,
    pub cycles: u64,
    pub peak_occupancy: usize,
    /// First few misses, for diagnostics.
    pub first_misses: Vec<MissEvent>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<StepTrace>>,
}

impl SimReport {
    pub const CSV_HEADER: &'static str =
        "entries,updates,capacity,misses,loads,bytes_in,bytes_out,cycles,peak_occupancy";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.entries,
            self.updates,
            self.capacity,
            self.misses,
            self.loads,
            self.bytes_in,
            self.bytes_out,
            self.cycles,
            self.peak_occupancy
        )
    }
}

const KEPT_MISSES: usize = 16;

/// Replays a stream through a circular buffer of `mem.capacity` node slots.
///
/// The buffer prefetches until half full. Before each update it keeps loading
/// entries in order, up to the point where the updated entry itself would be
/// overwritten, until the node and all its neighbors sit in the last `capacity`
/// loaded entries. If no such point exists it loads through the next occurrence
/// of every needed node, again stopping where the updated entry would be
/// overwritten; every node not resident then counts as a miss, stalls the
/// update for `miss_penalty` cycles and is fetched on the side.
pub fn simulate_stream(g: &Graph, src: StreamSource, mem: &MemoryConfig) -> Result<SimReport, SimError> {
    let entries = src.entries();
    if let StreamSource::Labeling(f) = src {
        if f.len() != g.n() {
            return Err(SimError::SizeMismatch { graph: g.n(), stream: f.len() });
        }
    }
    if mem.capacity == 0 {
        return Err(SimError::ZeroCapacity);
    }
    let mut misses = Vec::new();
    let mut report = run(g, &entries, mem, Fallback::Reach, &mut misses)?;
    report.misses = misses.len();
    misses.truncate(KEPT_MISSES);
    report.first_misses = misses;
    Ok(report)
}

/// Positions of every vertex in the stream, as CSR.
pub(crate) struct Occurrences {
    offsets: Vec<usize>,
    positions: Vec<usize>,
}

impl Occurrences {
    pub(crate) fn new(n: usize, entries: &[(usize, bool)]) -> Self {
        let mut offsets = vec![0; n + 1];
        for &(v, _) in entries {
            offsets[v + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut positions = vec![0; entries.len()];
        for (p, &(v, _)) in entries.iter().enumerate() {
            positions[fill[v]] = p;
            fill[v] += 1;
        }
        Occurrences { offsets, positions }
    }

    fn of(&self, v: usize) -> &[usize] {
        &self.positions[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Whether `v` occurs in `[lo, hi)`.
    fn any_in(&self, v: usize, lo: usize, hi: usize) -> bool {
        let occ = self.of(v);
        let k = occ.partition_point(|&q| q < lo);
        k < occ.len() && occ[k] < hi
    }

    /// Occurrences of `v` in `[lo, hi)`.
    fn within(&self, v: usize, lo: usize, hi: usize) -> &[usize] {
        let occ = self.of(v);
        let a = occ.partition_point(|&q| q < lo);
        let b = occ.partition_point(|&q| q < hi);
        &occ[a..b]
    }
}

/// Smallest window end `h` in `[before, last]` whose window `[h - cap, h)`
/// holds an occurrence of every node in `needed`.
fn feasible_end(occ: &Occurrences, needed: &[usize], before: usize, last: usize, cap: usize) -> Option<usize> {
    let fits = |h: usize| needed.iter().all(|&x| occ.any_in(x, h.saturating_sub(cap), h));
    if fits(before) {
        return Some(before);
    }
    // the window only changes membership when an occurrence enters it
    let mut ends: Vec<usize> = needed.iter().flat_map(|&x| occ.within(x, before, last)).map(|&q| q + 1).collect();
    ends.sort_unstable();
    ends.into_iter().find(|&h| fits(h))
}

/// Fallback when no window fits: load through the next occurrence of every
/// needed node, stopping at `last`. For single-occurrence streams the window
/// at each step then only grows with capacity.
fn reach(occ: &Occurrences, needed: &[usize], before: usize, last: usize) -> usize {
    needed
        .iter()
        .filter_map(|&x| {
            let o = occ.of(x);
            o.get(o.partition_point(|&q| q < before)).map(|&q| q + 1)
        })
        .fold(before, usize::max)
        .min(last)
        .max(before)
}

/// What the buffer does when no window end keeps a whole stencil resident.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Fallback {
    /// Load through the next occurrence of every needed node.
    Reach,
    /// Load nothing, so only the entry at fault is reported.
    Hold,
}

pub(crate) fn run(
    g: &Graph,
    entries: &[(usize, bool)],
    mem: &MemoryConfig,
    fallback: Fallback,
    misses: &mut Vec<MissEvent>,
) -> Result<SimReport, SimError> {
    let n = g.n();
    if let Some(&(v, _)) = entries.iter().find(|&&(v, _)| v >= n) {
        return Err(SimError::UnknownVertex { vertex: v, n });
    }
    let cap = mem.capacity;
    let len = entries.len();
    let occ = Occurrences::new(n, entries);
    let mut hi = (cap / 2).min(len);
    let mut loads = hi;
    let mut cycles = hi as u64;
    let mut updates = 0;
    let mut side_fetches = 0u64;
    let mut trace = mem.trace.then(Vec::new);
    let mut needed = Vec::new();

    for (p, &(v, ex)) in entries.iter().enumerate() {
        if !ex {
            continue;
        }
        let nbrs = g.neighbors(v);
        if nbrs.len() + 1 > mem.neighborhood_capacity {
            return Err(SimError::NeighborhoodOverflow {
                vertex: v,
                needed: nbrs.len() + 1,
                capacity: mem.neighborhood_capacity,
            });
        }
        needed.clear();
        needed.push(v);
        needed.extend_from_slice(nbrs);
        let before = hi.max(p + 1).min(len);
        // never move past the point where the executing entry itself is evicted
        let last = (p + cap).min(len);
        let new_hi = feasible_end(&occ, &needed, before, last, cap).unwrap_or_else(|| match fallback {
            Fallback::Reach => reach(&occ, &needed, before, last),
            Fallback::Hold => before,
        });
        let lo = new_hi.saturating_sub(cap);
        let mut missed = 0u64;
        for &x in &needed {
            if !occ.any_in(x, lo, new_hi) {
                misses.push(MissEvent { position: p, vertex: v, missing: x });
                missed += 1;
            }
        }
        let fresh = new_hi - hi;
        if let Some(t) = trace.as_mut() {
            t.push(StepTrace {
                position: p,
                vertex: v,
                loaded: (hi, new_hi),
                evicted: (hi.saturating_sub(cap), lo),
            });
        }
        loads += fresh;
        side_fetches += missed;
        cycles += (fresh as u64).max(nbrs.len().max(1) as u64) + missed * mem.miss_penalty;
        hi = new_hi;
        updates += 1;
    }
    cycles += (len - hi) as u64;
    loads += len - hi;

    Ok(SimReport {
        entries: len,
        updates,
        capacity: cap,
        misses: 0,
        loads,
        bytes_in: (loads as u64 + side_fetches) * mem.record_bytes as u64,
        bytes_out: updates as u64 * mem.result_bytes as u64,
        cycles,
        peak_occupancy: hi.min(cap),
        first_misses: Vec::new(),
        trace,
    })
}

#[cfg(test)]
/// Explicit window of stream positions, scanned linearly.
pub(crate) fn naive_misses(g: &Graph, entries: &[(usize, bool)], cap: usize) -> usize {
    use std::collections::VecDeque;
    let mut window: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    let load = |window: &mut VecDeque<usize>, next: &mut usize| {
        window.push_back(*next);
        if window.len() > cap {
            window.pop_front();
        }
        *next += 1;
    };
    while next < (cap / 2).min(entries.len()) {
        load(&mut window, &mut next);
    }
    let mut misses = 0;
    for (p, &(v, ex)) in entries.iter().enumerate() {
        if !ex {
            continue;
        }
        while next <= p {
            load(&mut window, &mut next);
        }
        let needed: Vec<usize> = std::iter::once(v).chain(g.neighbors(v).iter().copied()).collect();
        let resident = |w: &VecDeque<usize>, x: usize| w.iter().any(|&q| entries[q].0 == x);
        // try successive window ends until every node is resident
        let (mut w, mut nx) = (window.clone(), next);
        loop {
            if needed.iter().all(|&x| resident(&w, x)) {
                window = w;
                next = nx;
                break;
            }
            if nx >= entries.len() || nx >= p + cap {
                // nothing fits: load through the next occurrence of each needed node
                let target = needed
                    .iter()
                    .filter_map(|&x| (next..entries.len()).find(|&q| entries[q].0 == x).map(|q| q + 1))
                    .max()
                    .unwrap_or(next)
                    .min(p + cap)
                    .min(entries.len());
                while next < target {
                    load(&mut window, &mut next);
                }
                break;
            }
            load(&mut w, &mut nx);
        }
        misses += needed.iter().filter(|&&x| !resident(&window, x)).count();
    }
    misses
}
