//! The sampling pipeline: clique draw, symbol relabelling, then column (Latin)
//! or band/stack (Sudoku) moves.
//!
//! Design `i` of a run with seed `s` draws everything from stream `i` of
//! [`DesignRng::new(s, i)`](crate::rng::DesignRng), in this order:
//!
//! 1. clique index, uniform in `0..count`;
//! 2. labels for symbols `2..n`, Fisher–Yates over `n - 1` items;
//! 3. Latin: column order, Fisher–Yates over `n` items. Sudoku: one
//!    Fisher–Yates over `p` items per band (top to bottom), then one per stack
//!    (left to right).

use serde::{Deserialize, Serialize};

use super::{
    assemble_latin, assemble_sudoku, permute_bands_stacks, permute_columns,
    randomize_columns_latin, randomize_sudoku_geometry, randomize_symbols, relabel_symbols,
    BandStackMoves, Design,
};
use crate::clique::{CliqueSet, OrderedClique};
use crate::derange::DesignKind;
use crate::error::{Error, Result};
use crate::graph::SubgraphSample;
use crate::perm::Permutation;
use crate::rng::DesignRng;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Geometry {
    Columns { columns: Vec<usize> },
    BandsStacks(BandStackMoves),
}

/// Everything needed to rebuild a sampled design without the graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleTrace {
    pub kind: DesignKind,
    pub n: usize,
    pub seed: u64,
    /// Stream number, i.e. the position of the design in its run.
    pub index: u64,
    pub clique_index: u64,
    /// 1-based vertex numbers of the clique in the full vertex set.
    pub clique_vertices: Vec<usize>,
    /// Clique members, 1-based, lexicographically sorted.
    pub clique: Vec<Vec<usize>>,
    /// New labels for symbols `2..n`.
    pub symbols: Vec<usize>,
    pub geometry: Geometry,
    /// False when the clique came from a random subgraph.
    pub uniform: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgraph_k: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub design: Design,
    pub trace: SampleTrace,
}

/// Draws designs from the maximum cliques of a (sub)graph.
pub struct Sampler<'g> {
    cliques: CliqueSet<'g>,
    subgraph: Option<SubgraphSample>,
    seed: u64,
}

impl<'g> Sampler<'g> {
    /// `cliques` must hold cliques of size `n - 1`; pass the subgraph record
    /// when the graph is a random induced subgraph.
    pub fn new(
        cliques: CliqueSet<'g>,
        subgraph: Option<SubgraphSample>,
        seed: u64,
    ) -> Result<Self> {
        let n = cliques.graph().vertex_set().order();
        if n == 0 {
            return Err(Error::InvalidOrder("designs need order at least 1".into()));
        }
        if cliques.is_empty() {
            return Err(Error::EmptyCliqueSet);
        }
        if cliques.clique_size() + 1 != n {
            return Err(Error::WrongCliqueSize {
                expected: n - 1,
                got: cliques.clique_size(),
            });
        }
        Ok(Sampler {
            cliques,
            subgraph,
            seed,
        })
    }

    pub fn cliques(&self) -> &CliqueSet<'g> {
        &self.cliques
    }

    pub fn is_uniform(&self) -> bool {
        self.subgraph.is_none()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sample(&self, index: u64) -> Result<Sample> {
        let mut rng = DesignRng::new(self.seed, index);
        let (clique_index, clique) = self.cliques.select_with(&mut rng)?;
        self.finish(rng, index, clique_index, clique)
    }

    /// Like [`Sampler::sample`] but with the clique fixed instead of drawn.
    /// The remaining draws still come from stream `index`, after the clique
    /// draw is consumed, so only step 1 differs from an unbiased sample.
    pub fn sample_with_clique(&self, index: u64, clique_index: u64) -> Result<Sample> {
        let mut rng = DesignRng::new(self.seed, index);
        let _ = rng.below(self.cliques.count());
        let ids = self.cliques.get(clique_index)?;
        let clique = OrderedClique::from_ids(self.cliques.graph(), &ids);
        self.finish(rng, index, clique_index, clique)
    }

    fn finish(
        &self,
        mut rng: DesignRng,
        index: u64,
        clique_index: u64,
        clique: OrderedClique,
    ) -> Result<Sample> {
        let vs = self.cliques.graph().vertex_set();
        let n = vs.order();
        let base = match vs.kind() {
            DesignKind::Latin => Design::Latin(assemble_latin(&clique, n)?),
            DesignKind::Sudoku => {
                let p = vs.partition().expect("sudoku vertex set has boxes").p();
                Design::Sudoku(assemble_sudoku(&clique, p)?)
            }
        };
        let (relabelled, symbols) = randomize_symbols(&base, &mut rng);
        let (design, geometry) = match relabelled {
            Design::Latin(sq) => {
                let (out, columns) = randomize_columns_latin(&sq, &mut rng);
                (Design::Latin(out), Geometry::Columns { columns })
            }
            Design::Sudoku(s) => {
                let (out, moves) = randomize_sudoku_geometry(&s, &mut rng);
                (Design::Sudoku(out), Geometry::BandsStacks(moves))
            }
        };
        let clique_vertices = clique
            .ids()
            .iter()
            .map(|&i| match &self.subgraph {
                Some(s) => s.selected_ids[i] + 1,
                None => i + 1,
            })
            .collect();
        let trace = SampleTrace {
            kind: vs.kind(),
            n,
            seed: self.seed,
            index,
            clique_index,
            clique_vertices,
            clique: clique.members().iter().map(|m| m.one_based()).collect(),
            symbols,
            geometry,
            uniform: self.subgraph.is_none(),
            subgraph_k: self.subgraph.as_ref().map(|s| s.k),
        };
        Ok(Sample { design, trace })
    }
}

/// Rebuilds the design a trace describes.
pub fn replay(trace: &SampleTrace) -> Result<Design> {
    let members = trace
        .clique
        .iter()
        .map(|m| Permutation::from_one_based(m))
        .collect::<Result<Vec<_>>>()?;
    let clique = OrderedClique::from_members(members);
    let base = match trace.kind {
        DesignKind::Latin => Design::Latin(assemble_latin(&clique, trace.n)?),
        DesignKind::Sudoku => {
            let p = crate::perm::BoxPartition::from_order(trace.n)?.p();
            Design::Sudoku(assemble_sudoku(&clique, p)?)
        }
    };
    let relabelled = relabel_symbols(&base, &trace.symbols)?;
    match (relabelled, &trace.geometry) {
        (Design::Latin(sq), Geometry::Columns { columns }) => {
            Ok(Design::Latin(permute_columns(&sq, columns)?))
        }
        (Design::Sudoku(s), Geometry::BandsStacks(moves)) => {
            Ok(Design::Sudoku(permute_bands_stacks(&s, moves)?))
        }
        _ => Err(Error::Parse(
            "trace geometry does not match its kind".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clique::{enumerate_maximum_cliques, SearchOptions};
    use crate::derange::{enumerate_derangements, enumerate_sudoku_derangements};
    use crate::graph::{build_graph, induced_subgraph};
    use crate::Limits;

    #[test]
    fn latin_samples_replay() {
        let g = build_graph(
            enumerate_derangements(5, &Limits::default()).unwrap(),
            &Limits::default(),
        )
        .unwrap();
        let cs = enumerate_maximum_cliques(&g, Some(4), &SearchOptions::default()).unwrap();
        let s = Sampler::new(cs, None, 42).unwrap();
        for i in 0..20 {
            let a = s.sample(i).unwrap();
            assert!(a.design.grid().is_latin());
            assert!(a.trace.uniform);
            assert_eq!(replay(&a.trace).unwrap(), a.design);
            assert_eq!(s.sample(i).unwrap(), a);
        }
        assert_ne!(s.sample(0).unwrap().design, s.sample(1).unwrap().design);
    }

    #[test]
    fn sudoku_samples_replay() {
        let g = build_graph(
            enumerate_sudoku_derangements(2, &Limits::default()).unwrap(),
            &Limits::default(),
        )
        .unwrap();
        let cs = enumerate_maximum_cliques(&g, Some(3), &SearchOptions::default()).unwrap();
        let s = Sampler::new(cs, None, 7).unwrap();
        for i in 0..20 {
            let a = s.sample(i).unwrap();
            let part = a.design.partition().unwrap();
            assert!(a.design.grid().is_sudoku(part));
            assert_eq!(replay(&a.trace).unwrap(), a.design);
        }
    }

    #[test]
    fn subgraph_samples_are_flagged() {
        let g = build_graph(
            enumerate_derangements(5, &Limits::default()).unwrap(),
            &Limits::default(),
        )
        .unwrap();
        let (sub, sg) = induced_subgraph(&g, 30, 1).unwrap();
        let cs = enumerate_maximum_cliques(&sg, Some(4), &SearchOptions::default()).unwrap();
        if cs.is_empty() {
            return;
        }
        let s = Sampler::new(cs, Some(sub.clone()), 1).unwrap();
        let a = s.sample(0).unwrap();
        assert!(!a.trace.uniform);
        assert_eq!(a.trace.subgraph_k, Some(30));
        // vertex numbers refer to the parent graph
        for (v, m) in a.trace.clique_vertices.iter().zip(&a.trace.clique) {
            assert_eq!(g.vertex_set().get(v - 1).one_based(), *m);
        }
    }

    #[test]
    fn wrong_size_clique_set_rejected() {
        let g = build_graph(
            enumerate_derangements(5, &Limits::default()).unwrap(),
            &Limits::default(),
        )
        .unwrap();
        let cs = enumerate_maximum_cliques(&g, Some(3), &SearchOptions::default()).unwrap();
        assert!(matches!(
            Sampler::new(cs, None, 0),
            Err(Error::WrongCliqueSize { .. })
        ));
    }
}
