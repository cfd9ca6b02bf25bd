//! The disjointness graph over a [`VertexSet`], random induced subgraphs, and
//! DIMACS / edge-list / DOT interchange.

use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::bitset;
use crate::derange::VertexSet;
use crate::error::{Error, Result};
use crate::rng::{DesignRng, SUBGRAPH_STREAM};
use crate::Limits;

/// Dense bitset adjacency: row `i` is `adj[i*words..(i+1)*words]`.
///
/// Memory is `V² / 8` bytes, which is why [`build_graph`] refuses vertex sets
/// above [`Limits::max_dense_vertices`] (20,000 by default, about 50 MB).
#[derive(Clone, Debug)]
pub struct CompatibilityGraph {
    vertices: VertexSet,
    words: usize,
    adj: Vec<u64>,
    edge_count: u64,
}

impl CompatibilityGraph {
    pub fn vertex_set(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u64] {
        &self.adj[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        bitset::get(self.neighbors(i), j)
    }

    pub fn degree(&self, i: usize) -> usize {
        bitset::count(self.neighbors(i))
    }

    /// Edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |i| {
            bitset::ones(self.neighbors(i))
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Graph on the vertices with the given (increasing) ids, with adjacency
    /// copied from this graph.
    fn induced(&self, ids: &[usize]) -> CompatibilityGraph {
        let k = ids.len();
        let words = bitset::words_for(k);
        let mut adj = vec![0u64; k * words];
        adj.par_chunks_mut(words.max(1))
            .take(k)
            .enumerate()
            .for_each(|(a, row)| {
                let parent = self.neighbors(ids[a]);
                for (b, &id) in ids.iter().enumerate() {
                    if bitset::get(parent, id) {
                        bitset::set(row, b);
                    }
                }
            });
        let edge_count = bitset::count(&adj) as u64 / 2;
        CompatibilityGraph {
            vertices: self.vertices.select(ids),
            words,
            adj,
            edge_count,
        }
    }
}

/// Joins every pair of disjoint vertices.
///
/// Vertex `i`'s non-neighbours are the union, over positions `r`, of the
/// vertices sharing `i`'s value at `r`; those unions are built from one bitset
/// per (position, value) pair.
pub fn build_graph(vs: VertexSet, limits: &Limits) -> Result<CompatibilityGraph> {
    let v = vs.len();
    if v > limits.max_dense_vertices {
        return Err(Error::MemoryBudgetExceeded(format!(
            "{v} vertices exceed the dense adjacency limit of {} (would need {} MB); \
             use a random subgraph instead",
            limits.max_dense_vertices,
            (v as u128 * v as u128 / 8) >> 20
        )));
    }
    let n = vs.order();
    let words = bitset::words_for(v);
    if v == 0 {
        return Ok(CompatibilityGraph {
            vertices: vs,
            words,
            adj: Vec::new(),
            edge_count: 0,
        });
    }
    let mut by_value = vec![0u64; n * n * words];
    for (id, perm) in vs.vertices().iter().enumerate() {
        for r in 0..n {
            let slot = (r * n + perm.at(r)) * words;
            bitset::set(&mut by_value[slot..slot + words], id);
        }
    }
    let tail_mask = match v % 64 {
        0 => !0u64,
        b => (1u64 << b) - 1,
    };
    let mut adj = vec![0u64; v * words];
    adj.par_chunks_mut(words).enumerate().for_each(|(id, row)| {
        row.fill(!0u64);
        let perm = vs.get(id);
        for r in 0..n {
            let slot = (r * n + perm.at(r)) * words;
            for (x, m) in row.iter_mut().zip(&by_value[slot..slot + words]) {
                *x &= !m;
            }
        }
        row[words - 1] &= tail_mask;
    });
    let edge_count = bitset::count(&adj) as u64 / 2;
    Ok(CompatibilityGraph {
        vertices: vs,
        words,
        adj,
        edge_count,
    })
}

/// Which parent vertices a random induced subgraph kept. Designs sampled from
/// such a subgraph are not uniformly distributed.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SubgraphSample {
    pub parent_vertices: usize,
    pub k: usize,
    pub selected_ids: Vec<usize>,
    pub seed: u64,
    /// Redraw number; attempt `a` uses stream `SUBGRAPH_STREAM - a`.
    #[serde(default)]
    pub attempt: u32,
    pub uniform: bool,
}

impl SubgraphSample {
    /// Draws `k` of `parent_vertices` ids by partial Fisher–Yates on the
    /// dedicated subgraph stream of `seed`.
    pub fn draw(parent_vertices: usize, k: usize, seed: u64) -> Result<Self> {
        Self::draw_attempt(parent_vertices, k, seed, 0)
    }

    /// A fresh selection for when an earlier one held no clique of the
    /// wanted size. Attempts count down from the subgraph stream, far from
    /// the per-design streams that count up from zero.
    pub fn draw_attempt(parent_vertices: usize, k: usize, seed: u64, attempt: u32) -> Result<Self> {
        if k == 0 || k > parent_vertices {
            return Err(Error::InvalidK {
                k,
                vertices: parent_vertices,
            });
        }
        let stream = SUBGRAPH_STREAM - u64::from(attempt);
        let selected_ids = DesignRng::new(seed, stream).subset(parent_vertices, k);
        Ok(SubgraphSample {
            parent_vertices,
            k,
            selected_ids,
            seed,
            attempt,
            uniform: false,
        })
    }
}

pub fn induced_subgraph(
    g: &CompatibilityGraph,
    k: usize,
    seed: u64,
) -> Result<(SubgraphSample, CompatibilityGraph)> {
    let sample = SubgraphSample::draw(g.vertex_count(), k, seed)?;
    let sub = g.induced(&sample.selected_ids);
    Ok((sample, sub))
}

/// Same selection as [`induced_subgraph`], but builds the subgraph straight
/// from the vertex set so the parent graph never has to fit in memory.
pub fn induced_subgraph_of_vertices(
    vs: &VertexSet,
    k: usize,
    seed: u64,
    limits: &Limits,
) -> Result<(SubgraphSample, CompatibilityGraph)> {
    let sample = SubgraphSample::draw(vs.len(), k, seed)?;
    let sub = build_graph(vs.select(&sample.selected_ids), limits)?;
    Ok((sample, sub))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    /// `p edge V E` then `e i j`, 1-based, `i < j`.
    Dimacs,
    /// `i j` per line, 0-based, `i < j`.
    EdgeList,
    Dot,
}

pub fn export_graph<W: Write>(g: &CompatibilityGraph, format: GraphFormat, mut w: W) -> Result<()> {
    match format {
        GraphFormat::Dimacs => {
            writeln!(
                w,
                "c {} compatibility graph, order {}",
                g.vertices.kind(),
                g.vertices.order()
            )?;
            writeln!(w, "p edge {} {}", g.vertex_count(), g.edge_count)?;
            for (i, j) in g.edges() {
                writeln!(w, "e {} {}", i + 1, j + 1)?;
            }
        }
        GraphFormat::EdgeList => {
            for (i, j) in g.edges() {
                writeln!(w, "{i} {j}")?;
            }
        }
        GraphFormat::Dot => {
            writeln!(w, "graph G {{")?;
            for (i, p) in g.vertices.vertices().iter().enumerate() {
                writeln!(w, "  {i} [label=\"{p}\"];")?;
            }
            for (i, j) in g.edges() {
                writeln!(w, "  {i} -- {j};")?;
            }
            writeln!(w, "}}")?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Edges read back from an interchange file, 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeFile {
    pub vertices: Option<usize>,
    pub edges: Vec<(usize, usize)>,
}

pub fn read_dimacs<R: BufRead>(r: R) -> Result<EdgeFile> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let mut tok = line.split_whitespace();
        let bad = || Error::Parse(format!("line {}: {line:?}", lineno + 1));
        match tok.next() {
            None | Some("c") => {}
            Some("p") => {
                if header.is_some() || tok.next() != Some("edge") {
                    return Err(bad());
                }
                let v = tok.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
                let e = tok.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
                header = Some((v, e));
            }
            Some("e") => {
                let (v, _) = header.ok_or_else(bad)?;
                let i: usize = tok.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
                let j: usize = tok.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
                if i == 0 || j == 0 || i >= j || j > v {
                    return Err(bad());
                }
                edges.push((i - 1, j - 1));
            }
            Some(_) => return Err(bad()),
        }
    }
    let (v, e) = header.ok_or_else(|| Error::Parse("missing `p edge` line".into()))?;
    if edges.len() != e {
        return Err(Error::Parse(format!(
            "header declares {e} edges, found {}",
            edges.len()
        )));
    }
    Ok(EdgeFile {
        vertices: Some(v),
        edges,
    })
}

pub fn read_edge_list<R: BufRead>(r: R) -> Result<EdgeFile> {
    let mut edges = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("line {}: {line:?}", lineno + 1)))?;
        match nums[..] {
            [i, j] => edges.push((i, j)),
            _ => return Err(Error::Parse(format!("line {}: {line:?}", lineno + 1))),
        }
    }
    Ok(EdgeFile {
        vertices: None,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derange::{enumerate_derangements, enumerate_sudoku_derangements};

    fn latin(n: usize) -> CompatibilityGraph {
        build_graph(
            enumerate_derangements(n, &Limits::default()).unwrap(),
            &Limits::default(),
        )
        .unwrap()
    }

    fn naive_edges(vs: &VertexSet) -> u64 {
        let v = vs.vertices();
        let mut e = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i].is_disjoint(&v[j]).unwrap() {
                    e += 1;
                }
            }
        }
        e
    }

    #[test]
    fn order_five_counts() {
        let g = latin(5);
        assert_eq!(g.vertex_count(), 44);
        assert_eq!(g.edge_count(), 276);
    }

    #[test]
    fn order_two_is_single_vertex() {
        let g = latin(2);
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
        let mut out = Vec::new();
        export_graph(&g, GraphFormat::Dimacs, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.lines().any(|l| l == "p edge 1 0"));
        assert!(!text.lines().any(|l| l.starts_with("e ")));
    }

    #[test]
    fn bitset_path_matches_naive_double_loop() {
        for n in 2..=5 {
            let g = latin(n);
            assert_eq!(g.edge_count(), naive_edges(g.vertex_set()), "n={n}");
            for i in 0..g.vertex_count() {
                assert!(!g.adjacent(i, i));
                for j in 0..g.vertex_count() {
                    assert_eq!(g.adjacent(i, j), g.adjacent(j, i));
                }
            }
            let degree_sum: usize = (0..g.vertex_count()).map(|i| g.degree(i)).sum();
            assert_eq!(degree_sum as u64, 2 * g.edge_count());
        }
        let s = build_graph(
            enumerate_sudoku_derangements(2, &Limits::default()).unwrap(),
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(s.edge_count(), naive_edges(s.vertex_set()));
    }

    #[test]
    fn dense_budget() {
        let tight = Limits {
            max_dense_vertices: 40,
            ..Limits::default()
        };
        let vs = enumerate_derangements(5, &Limits::default()).unwrap();
        assert!(matches!(
            build_graph(vs, &tight),
            Err(Error::MemoryBudgetExceeded(_))
        ));
    }

    #[test]
    fn subgraph_edges() {
        let g = latin(5);
        let (s, full) = induced_subgraph(&g, 44, 3).unwrap();
        assert_eq!(s.selected_ids, (0..44).collect::<Vec<_>>());
        assert_eq!(
            full.edges().collect::<Vec<_>>(),
            g.edges().collect::<Vec<_>>()
        );
        let (_, one) = induced_subgraph(&g, 1, 3).unwrap();
        assert_eq!(one.edge_count(), 0);
        assert!(matches!(
            induced_subgraph(&g, 0, 3),
            Err(Error::InvalidK { .. })
        ));
        assert!(matches!(
            induced_subgraph(&g, 45, 3),
            Err(Error::InvalidK { .. })
        ));
    }

    #[test]
    fn subgraph_routes_agree() {
        let g = latin(5);
        let (sa, a) = induced_subgraph(&g, 20, 11).unwrap();
        let (sb, b) =
            induced_subgraph_of_vertices(g.vertex_set(), 20, 11, &Limits::default()).unwrap();
        assert_eq!(sa, sb);
        assert!(!sa.uniform);
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
        assert_eq!(a.edge_count(), naive_edges(a.vertex_set()));
    }

    #[test]
    fn dimacs_round_trip() {
        let g = latin(5);
        let mut out = Vec::new();
        export_graph(&g, GraphFormat::Dimacs, &mut out).unwrap();
        let text = String::from_utf8(out.clone()).unwrap();
        assert!(text.lines().any(|l| l == "p edge 44 276"));
        let back = read_dimacs(&out[..]).unwrap();
        assert_eq!(back.vertices, Some(44));
        assert_eq!(back.edges, g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = latin(5);
        let mut out = Vec::new();
        export_graph(&g, GraphFormat::EdgeList, &mut out).unwrap();
        let back = read_edge_list(&out[..]).unwrap();
        assert_eq!(back.edges.len() as u64, g.edge_count());
    }

    #[test]
    fn dimacs_rejects_malformed() {
        assert!(read_dimacs(&b"e 1 2\n"[..]).is_err());
        assert!(read_dimacs(&b"p edge 3 1\ne 2 1\n"[..]).is_err());
        assert!(read_dimacs(&b"p edge 3 2\ne 1 2\n"[..]).is_err());
        assert!(read_dimacs(&b"p edge 3 1\ne 1 4\n"[..]).is_err());
    }

    #[test]
    fn dot_lists_every_vertex() {
        let g = latin(3);
        let mut out = Vec::new();
        export_graph(&g, GraphFormat::Dot, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("graph G {"));
        assert!(text.contains("0 -- 1;"));
        assert!(text.contains("label=\"(2, 3, 1)\""));
    }
}
