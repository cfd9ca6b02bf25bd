//! Fixed-size clique search over bitset adjacency, and a Bron–Kerbosch
//! search for the clique number.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, Ordering};

use crate::bitset;
use crate::graph::CompatibilityGraph;

/// Receives the cliques found under one root, in increasing lexicographic
/// order of their id tuples. The final member is delivered as a bitset of
/// candidates so counting never has to walk the last level.
pub(crate) trait Sink {
    /// `prefix` holds the first `size - 1` members; every set bit of `last`
    /// completes a clique.
    fn leaves(&mut self, prefix: &[u32], last: &[u64]) -> ControlFlow<()>;
}

pub(crate) struct Counter(pub u64);

impl Sink for Counter {
    #[inline]
    fn leaves(&mut self, _prefix: &[u32], last: &[u64]) -> ControlFlow<()> {
        self.0 += bitset::count(last) as u64;
        ControlFlow::Continue(())
    }
}

/// Collects flat id records of `size` entries each.
pub(crate) struct Collector<'a> {
    pub out: &'a mut Vec<u32>,
    pub limit: usize,
    pub overflow: bool,
}

impl Sink for Collector<'_> {
    fn leaves(&mut self, prefix: &[u32], last: &[u64]) -> ControlFlow<()> {
        for v in bitset::ones(last) {
            if self.out.len() + prefix.len() + 1 > self.limit {
                self.overflow = true;
                return ControlFlow::Break(());
            }
            self.out.extend_from_slice(prefix);
            self.out.push(v as u32);
        }
        ControlFlow::Continue(())
    }
}

/// Stops at the clique with the given position in enumeration order.
pub(crate) struct Selector {
    pub remaining: u64,
    pub found: Option<Vec<u32>>,
}

impl Sink for Selector {
    fn leaves(&mut self, prefix: &[u32], last: &[u64]) -> ControlFlow<()> {
        let c = bitset::count(last) as u64;
        if self.remaining >= c {
            self.remaining -= c;
            return ControlFlow::Continue(());
        }
        let v = bitset::ones(last)
            .nth(self.remaining as usize)
            .expect("index within block");
        let mut clique = prefix.to_vec();
        clique.push(v as u32);
        self.found = Some(clique);
        ControlFlow::Break(())
    }
}

/// Per-worker scratch space: one candidate bitset per depth.
pub(crate) struct Scratch {
    words: usize,
    levels: Vec<u64>,
    prefix: Vec<u32>,
}

impl Scratch {
    pub fn new(g: &CompatibilityGraph, size: usize) -> Self {
        Scratch {
            words: g.words(),
            levels: vec![0u64; g.words() * size.max(1)],
            prefix: Vec::with_capacity(size),
        }
    }
}

/// Visits every clique of exactly `size` vertices whose smallest id is `root`.
pub(crate) fn search_root<S: Sink>(
    g: &CompatibilityGraph,
    root: usize,
    size: usize,
    scratch: &mut Scratch,
    cancel: Option<&AtomicBool>,
    sink: &mut S,
) -> ControlFlow<()> {
    debug_assert!(size >= 1);
    let w = scratch.words;
    scratch.prefix.clear();
    if size == 1 {
        let mut only = vec![0u64; w];
        bitset::set(&mut only, root);
        return sink.leaves(&[], &only);
    }
    scratch.prefix.push(root as u32);
    let level0 = &mut scratch.levels[..w];
    level0.copy_from_slice(g.neighbors(root));
    bitset::clear_through(level0, root);
    if bitset::count(level0) < size - 1 {
        return ControlFlow::Continue(());
    }
    extend(
        g,
        size,
        w,
        &mut scratch.levels,
        &mut scratch.prefix,
        cancel,
        sink,
    )
}

/// `levels[..w]` holds the candidates extending `prefix`; deeper levels
/// follow it.
fn extend<S: Sink>(
    g: &CompatibilityGraph,
    size: usize,
    w: usize,
    levels: &mut [u64],
    prefix: &mut Vec<u32>,
    cancel: Option<&AtomicBool>,
    sink: &mut S,
) -> ControlFlow<()> {
    let need = size - prefix.len();
    let (cand, deeper) = levels.split_at_mut(w);
    if need == 1 {
        return sink.leaves(prefix, cand);
    }
    if prefix.len() == 1 {
        if let Some(flag) = cancel {
            if flag.load(Ordering::Relaxed) {
                return ControlFlow::Break(());
            }
        }
    }
    let mut left = bitset::count(cand);
    for v in bitset::ones(cand) {
        if left < need {
            break;
        }
        left -= 1;
        let next = &mut deeper[..w];
        if bitset::and_into(next, cand, g.neighbors(v)) + 1 < need {
            continue;
        }
        bitset::clear_through(next, v);
        if bitset::count(next) + 1 < need {
            continue;
        }
        prefix.push(v as u32);
        let flow = extend(g, size, w, deeper, prefix, cancel, sink);
        prefix.pop();
        flow?;
    }
    ControlFlow::Continue(())
}

/// Size of the largest clique, by Bron–Kerbosch with a max-degree pivot and
/// the usual `|R| + |P| <= best` cut-off.
pub(crate) fn clique_number(g: &CompatibilityGraph) -> usize {
    let v = g.vertex_count();
    if v == 0 {
        return 0;
    }
    let w = g.words();
    let mut p = vec![0u64; w];
    for i in 0..v {
        bitset::set(&mut p, i);
    }
    let x = vec![0u64; w];
    let mut best = 0;
    bk(g, 0, p, x, &mut best);
    best
}

fn bk(g: &CompatibilityGraph, r: usize, p: Vec<u64>, mut x: Vec<u64>, best: &mut usize) {
    let pc = bitset::count(&p);
    if pc == 0 {
        if bitset::count(&x) == 0 && r > *best {
            *best = r;
        }
        return;
    }
    if r + pc <= *best {
        return;
    }
    let w = p.len();
    let mut scratch = vec![0u64; w];
    let pivot = bitset::ones(&p)
        .chain(bitset::ones(&x))
        .max_by_key(|&u| bitset::and_into(&mut scratch, &p, g.neighbors(u)))
        .expect("P nonempty");
    let mut p = p;
    let branch: Vec<usize> = bitset::ones(&p)
        .filter(|&u| !g.adjacent(pivot, u))
        .collect();
    for u in branch {
        let mut np = vec![0u64; w];
        let mut nx = vec![0u64; w];
        bitset::and_into(&mut np, &p, g.neighbors(u));
        bitset::and_into(&mut nx, &x, g.neighbors(u));
        bk(g, r + 1, np, nx, best);
        bitset::clear(&mut p, u);
        bitset::set(&mut x, u);
        if r + bitset::count(&p) <= *best {
            return;
        }
    }
}
