//! Maximum clique enumeration, exact counting, and uniform selection.
//!
//! Cliques are reported as strictly increasing id tuples, in lexicographic
//! order of those tuples. The search is rooted at each vertex in turn (the
//! root is the smallest member), so the position of any clique in the global
//! order is the sum of the counts of earlier roots plus its position under its
//! own root. Parallel runs split the roots across workers and reassemble the
//! per-root results in root order, which keeps both counts and indexing
//! identical to a serial run.

mod search;
pub mod store;

use std::ops::ControlFlow;
use std::path::PathBuf;
use std::sync::atomic::AtomicBool;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::CompatibilityGraph;
use crate::perm::Permutation;
use crate::rng::DesignRng;

use search::{search_root, Collector, Counter, Scratch, Selector};

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions<'a> {
    pub parallel: bool,
    /// Largest number of vertex ids held in memory by [`enumerate_maximum_cliques`].
    pub max_stored_ids: usize,
    /// Polled between top-level branches; setting it aborts with `Interrupted`.
    pub cancel: Option<&'a AtomicBool>,
}

impl Default for SearchOptions<'_> {
    fn default() -> Self {
        SearchOptions {
            parallel: true,
            max_stored_ids: 64 << 20,
            cancel: None,
        }
    }
}

#[derive(Clone, Debug)]
enum Storage {
    /// Flat records of `clique_size` ids.
    Memory(Vec<u32>),
    /// Nothing stored; cliques are regenerated from their root on demand.
    Streamed,
    /// Fixed-width record file written by [`store::write_clique_store`].
    Disk(PathBuf),
}

/// All maximum cliques of a graph, or a handle that can regenerate them.
#[derive(Clone, Debug)]
pub struct CliqueSet<'g> {
    graph: &'g CompatibilityGraph,
    clique_size: usize,
    max_size: usize,
    count: u64,
    root_counts: Vec<u64>,
    storage: Storage,
}

impl<'g> CliqueSet<'g> {
    pub fn graph(&self) -> &'g CompatibilityGraph {
        self.graph
    }

    /// Size of the cliques held (the requested target when one was given).
    pub fn clique_size(&self) -> usize {
        self.clique_size
    }

    /// The graph's true clique number. Differs from `clique_size` only when a
    /// target was requested that no clique reaches.
    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Enumeration order is the lexicographic order of sorted id tuples,
    /// independent of thread count.
    pub fn is_deterministic_order(&self) -> bool {
        true
    }

    pub fn root_counts(&self) -> &[u64] {
        &self.root_counts
    }

    /// Id tuple of the clique at `index` in enumeration order.
    pub fn get(&self, index: u64) -> Result<Vec<usize>> {
        if index >= self.count {
            return Err(Error::EmptyCliqueSet);
        }
        if self.clique_size == 0 {
            return Ok(Vec::new());
        }
        let ids = match &self.storage {
            Storage::Memory(flat) => {
                let s = self.clique_size;
                let at = index as usize * s;
                flat[at..at + s].to_vec()
            }
            Storage::Disk(path) => store::read_record(path, index)?,
            Storage::Streamed => {
                let mut rest = index;
                let mut root = 0;
                while rest >= self.root_counts[root] {
                    rest -= self.root_counts[root];
                    root += 1;
                }
                let mut sel = Selector {
                    remaining: rest,
                    found: None,
                };
                let mut scratch = Scratch::new(self.graph, self.clique_size);
                let _ = search_root(
                    self.graph,
                    root,
                    self.clique_size,
                    &mut scratch,
                    None,
                    &mut sel,
                );
                sel.found.expect("root count covers index")
            }
        };
        Ok(ids.into_iter().map(|v| v as usize).collect())
    }

    /// All cliques in enumeration order. Regenerates them for streamed sets.
    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.count).map(move |i| self.get(i).expect("index in range"))
    }

    /// Draws a clique index uniformly from `0..count` and resolves it.
    pub fn select_with(&self, rng: &mut DesignRng) -> Result<(u64, OrderedClique)> {
        if self.count == 0 {
            return Err(Error::EmptyCliqueSet);
        }
        let index = rng.below(self.count);
        let ids = self.get(index)?;
        Ok((index, OrderedClique::from_ids(self.graph, &ids)))
    }
}

/// Clique members as permutations, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedClique {
    ids: Vec<usize>,
    members: Vec<Permutation>,
}

impl OrderedClique {
    pub fn from_ids(g: &CompatibilityGraph, ids: &[usize]) -> Self {
        let mut pairs: Vec<(Permutation, usize)> = ids
            .iter()
            .map(|&i| (g.vertex_set().get(i).clone(), i))
            .collect();
        pairs.sort();
        OrderedClique {
            ids: pairs.iter().map(|(_, i)| *i).collect(),
            members: pairs.into_iter().map(|(p, _)| p).collect(),
        }
    }

    /// A clique given directly by its permutations, e.g. one printed in a
    /// worked example.
    pub fn from_members(mut members: Vec<Permutation>) -> Self {
        members.sort();
        OrderedClique {
            ids: Vec::new(),
            members,
        }
    }

    /// Vertex ids in the source graph; empty when built from permutations.
    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn members(&self) -> &[Permutation] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Clique number of `g` (Bron–Kerbosch with pivoting).
pub fn maximum_clique_size(g: &CompatibilityGraph) -> usize {
    search::clique_number(g)
}

fn resolve_size(g: &CompatibilityGraph, target: Option<usize>) -> usize {
    match target {
        Some(t) => t,
        None => maximum_clique_size(g),
    }
}

fn for_each_root<T, F>(g: &CompatibilityGraph, size: usize, opts: &SearchOptions, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut Scratch) -> T + Sync,
{
    let roots = 0..g.vertex_count();
    if opts.parallel {
        roots
            .into_par_iter()
            .map_init(|| Scratch::new(g, size), |scratch, r| f(r, scratch))
            .collect()
    } else {
        let mut scratch = Scratch::new(g, size);
        roots.map(|r| f(r, &mut scratch)).collect()
    }
}

fn check_cancel(opts: &SearchOptions, found: u64) -> Result<()> {
    if opts
        .cancel
        .is_some_and(|c| c.load(std::sync::atomic::Ordering::Relaxed))
    {
        return Err(Error::Interrupted { found });
    }
    Ok(())
}

/// Per-root clique counts for cliques of exactly `size` vertices.
fn count_by_root(g: &CompatibilityGraph, size: usize, opts: &SearchOptions) -> Result<Vec<u64>> {
    if size == 0 {
        return Ok(vec![0; g.vertex_count()]);
    }
    let counts = for_each_root(g, size, opts, |root, scratch| {
        let mut c = Counter(0);
        let _ = search_root(g, root, size, scratch, opts.cancel, &mut c);
        c.0
    });
    check_cancel(opts, counts.iter().sum())?;
    Ok(counts)
}

/// Number of maximum cliques, without storing any. With `target` the search
/// is fixed-depth at that size; for design graphs pass `n - 1`.
pub fn count_maximum_cliques(
    g: &CompatibilityGraph,
    target: Option<usize>,
    opts: &SearchOptions,
) -> Result<u64> {
    let size = resolve_size(g, target);
    if size == 0 {
        return Ok(1);
    }
    Ok(count_by_root(g, size, opts)?.iter().sum())
}

/// A [`CliqueSet`] that keeps only per-root counts; [`CliqueSet::get`] re-runs
/// the search under a single root. Suited to sets too large to hold.
pub fn streamed_maximum_cliques<'g>(
    g: &'g CompatibilityGraph,
    target: Option<usize>,
    opts: &SearchOptions,
) -> Result<CliqueSet<'g>> {
    let size = resolve_size(g, target);
    let root_counts = count_by_root(g, size, opts)?;
    finish(g, size, target, root_counts, Storage::Streamed)
}

/// Every maximum clique, held in memory.
///
/// If `target` is given and no clique of that size exists, the result is
/// empty and [`CliqueSet::max_size`] reports the actual clique number.
pub fn enumerate_maximum_cliques<'g>(
    g: &'g CompatibilityGraph,
    target: Option<usize>,
    opts: &SearchOptions,
) -> Result<CliqueSet<'g>> {
    let size = resolve_size(g, target);
    if size == 0 {
        return finish(
            g,
            0,
            target,
            vec![0; g.vertex_count()],
            Storage::Memory(Vec::new()),
        );
    }
    let parts = for_each_root(g, size, opts, |root, scratch| {
        let mut out = Vec::new();
        let mut sink = Collector {
            out: &mut out,
            limit: opts.max_stored_ids,
            overflow: false,
        };
        let _ = search_root(g, root, size, scratch, opts.cancel, &mut sink);
        let overflow = sink.overflow;
        (out, overflow)
    });
    let found: u64 = parts.iter().map(|(v, _)| (v.len() / size) as u64).sum();
    check_cancel(opts, found)?;
    let total_ids: usize = parts.iter().map(|(v, _)| v.len()).sum();
    if parts.iter().any(|(_, o)| *o) || total_ids > opts.max_stored_ids {
        return Err(Error::StorageExceeded(format!(
            "more than {} vertex ids; use the streamed or on-disk clique set",
            opts.max_stored_ids
        )));
    }
    let root_counts = parts.iter().map(|(v, _)| (v.len() / size) as u64).collect();
    let mut flat = Vec::with_capacity(total_ids);
    for (v, _) in parts {
        flat.extend(v);
    }
    finish(g, size, target, root_counts, Storage::Memory(flat))
}

fn finish<'g>(
    g: &'g CompatibilityGraph,
    size: usize,
    target: Option<usize>,
    root_counts: Vec<u64>,
    storage: Storage,
) -> Result<CliqueSet<'g>> {
    // the empty clique is the only clique of size 0
    let count: u64 = if size == 0 {
        1
    } else {
        root_counts.iter().sum()
    };
    let max_size = if count == 0 && target.is_some() {
        maximum_clique_size(g)
    } else {
        size
    };
    Ok(CliqueSet {
        graph: g,
        clique_size: size,
        max_size,
        count,
        root_counts,
        storage,
    })
}

/// Uniformly random maximum clique, drawn on stream 0 of `seed`.
pub fn select_uniform_clique(cs: &CliqueSet, seed: u64) -> Result<OrderedClique> {
    let mut rng = DesignRng::new(seed, 0);
    cs.select_with(&mut rng).map(|(_, c)| c)
}

/// Visits each maximum clique of size `size` in enumeration order until the
/// callback breaks. Serial.
pub fn for_each_clique<F>(g: &CompatibilityGraph, size: usize, mut f: F) -> Result<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    struct Each<'f, F>(&'f mut F, Vec<usize>);
    impl<F: FnMut(&[usize]) -> ControlFlow<()>> search::Sink for Each<'_, F> {
        fn leaves(&mut self, prefix: &[u32], last: &[u64]) -> ControlFlow<()> {
            for v in crate::bitset::ones(last) {
                self.1.clear();
                self.1.extend(prefix.iter().map(|&x| x as usize));
                self.1.push(v);
                (self.0)(&self.1)?;
            }
            ControlFlow::Continue(())
        }
    }
    if size == 0 {
        let _ = f(&[]);
        return Ok(());
    }
    let mut scratch = Scratch::new(g, size);
    let mut each = Each(&mut f, Vec::with_capacity(size));
    for root in 0..g.vertex_count() {
        if search_root(g, root, size, &mut scratch, None, &mut each).is_break() {
            break;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derange::{enumerate_derangements, enumerate_sudoku_derangements};
    use crate::graph::build_graph;
    use crate::Limits;

    fn latin(n: usize) -> CompatibilityGraph {
        build_graph(
            enumerate_derangements(n, &Limits::default()).unwrap(),
            &Limits::default(),
        )
        .unwrap()
    }

    fn serial() -> SearchOptions<'static> {
        SearchOptions {
            parallel: false,
            ..SearchOptions::default()
        }
    }

    /// All vertex triples, checked pairwise through the permutations.
    fn brute_force_triangles(g: &CompatibilityGraph) -> Vec<Vec<usize>> {
        let v = g.vertex_set().vertices();
        let mut out = Vec::new();
        for a in 0..v.len() {
            for b in a + 1..v.len() {
                for c in b + 1..v.len() {
                    if v[a].is_disjoint(&v[b]).unwrap()
                        && v[a].is_disjoint(&v[c]).unwrap()
                        && v[b].is_disjoint(&v[c]).unwrap()
                    {
                        out.push(vec![a, b, c]);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn order_four_matches_triple_brute_force() {
        let g = latin(4);
        assert_eq!(g.vertex_count(), 9);
        let cs = enumerate_maximum_cliques(&g, Some(3), &serial()).unwrap();
        assert_eq!(cs.count(), 4);
        assert_eq!(cs.iter().collect::<Vec<_>>(), brute_force_triangles(&g));
        assert_eq!(maximum_clique_size(&g), 3);
    }

    #[test]
    fn empty_graph_has_the_empty_clique() {
        let g = latin(1);
        assert_eq!(g.vertex_count(), 0);
        let cs = enumerate_maximum_cliques(&g, None, &serial()).unwrap();
        assert_eq!((cs.clique_size(), cs.count()), (0, 1));
        assert_eq!(cs.get(0).unwrap(), Vec::<usize>::new());
        assert_eq!(count_maximum_cliques(&g, Some(0), &serial()).unwrap(), 1);
    }

    #[test]
    fn order_three_whole_graph() {
        let g = latin(3);
        assert_eq!(count_maximum_cliques(&g, Some(2), &serial()).unwrap(), 1);
        assert_eq!(count_maximum_cliques(&g, None, &serial()).unwrap(), 1);
    }

    #[test]
    fn order_five_fifty_six() {
        let g = latin(5);
        let cs = enumerate_maximum_cliques(&g, Some(4), &SearchOptions::default()).unwrap();
        assert_eq!(cs.count(), 56);
        assert_eq!(cs.clique_size(), 4);
        let unknown = enumerate_maximum_cliques(&g, None, &serial()).unwrap();
        assert_eq!(unknown.count(), 56);
        assert_eq!(unknown.clique_size(), 4);
        let v = g.vertex_set().vertices();
        let all: Vec<Vec<usize>> = cs.iter().collect();
        for c in &all {
            for i in 0..c.len() {
                for j in i + 1..c.len() {
                    assert!(c[i] < c[j]);
                    assert!(v[c[i]].is_disjoint(&v[c[j]]).unwrap());
                }
            }
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn missing_target_reports_true_maximum() {
        let g = latin(5);
        let cs = enumerate_maximum_cliques(&g, Some(5), &serial()).unwrap();
        assert_eq!(cs.count(), 0);
        assert_eq!(cs.max_size(), 4);
        assert!(matches!(
            select_uniform_clique(&cs, 1),
            Err(Error::EmptyCliqueSet)
        ));
    }

    #[test]
    fn sudoku_order_four_three_cliques() {
        let g = build_graph(
            enumerate_sudoku_derangements(2, &Limits::default()).unwrap(),
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(g.vertex_count(), 7);
        let cs = enumerate_maximum_cliques(&g, None, &serial()).unwrap();
        assert_eq!((cs.clique_size(), cs.count()), (3, 3));
    }

    #[test]
    fn streamed_get_matches_memory() {
        let g = latin(5);
        let mem = enumerate_maximum_cliques(&g, Some(4), &serial()).unwrap();
        let streamed = streamed_maximum_cliques(&g, Some(4), &SearchOptions::default()).unwrap();
        assert_eq!(mem.root_counts(), streamed.root_counts());
        for i in 0..mem.count() {
            assert_eq!(mem.get(i).unwrap(), streamed.get(i).unwrap());
        }
        assert!(streamed.get(56).is_err());
    }

    #[test]
    fn storage_budget() {
        let g = latin(5);
        let opts = SearchOptions {
            max_stored_ids: 100,
            ..serial()
        };
        assert!(matches!(
            enumerate_maximum_cliques(&g, Some(4), &opts),
            Err(Error::StorageExceeded(_))
        ));
    }

    #[test]
    fn cancellation_reports_interrupted() {
        let g = latin(5);
        let flag = AtomicBool::new(true);
        let opts = SearchOptions {
            cancel: Some(&flag),
            ..serial()
        };
        assert!(matches!(
            count_maximum_cliques(&g, Some(4), &opts),
            Err(Error::Interrupted { .. })
        ));
    }

    #[test]
    fn single_clique_selected_for_any_seed() {
        let g = latin(3);
        let cs = enumerate_maximum_cliques(&g, Some(2), &serial()).unwrap();
        for seed in 0..5 {
            let c = select_uniform_clique(&cs, seed).unwrap();
            assert_eq!(c.ids(), &[0, 1]);
        }
    }

    #[test]
    fn worked_clique_is_among_the_fifty_six() {
        let g = latin(5);
        let cs = enumerate_maximum_cliques(&g, Some(4), &serial()).unwrap();
        let members: Vec<Permutation> = [
            [2, 5, 4, 3, 1],
            [3, 4, 5, 1, 2],
            [4, 1, 2, 5, 3],
            [5, 3, 1, 2, 4],
        ]
        .iter()
        .map(|p| Permutation::from_one_based(p).unwrap())
        .collect();
        let ids: Vec<usize> = members
            .iter()
            .map(|m| g.vertex_set().id_of(m).unwrap())
            .collect();
        assert!(cs.iter().any(|c| c == ids));
        // 1-based positions in lexicographic order of all 44 derangements
        assert_eq!(
            ids.iter().map(|i| i + 1).collect::<Vec<_>>(),
            vec![11, 17, 23, 37]
        );
    }

    #[test]
    fn for_each_clique_visits_in_order() {
        let g = latin(5);
        let mut seen = Vec::new();
        for_each_clique(&g, 4, |c| {
            seen.push(c.to_vec());
            ControlFlow::Continue(())
        })
        .unwrap();
        let cs = enumerate_maximum_cliques(&g, Some(4), &serial()).unwrap();
        assert_eq!(seen, cs.iter().collect::<Vec<_>>());
    }
}
