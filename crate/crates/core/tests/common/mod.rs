#![allow(dead_code)]

use cliquedesign::assembler::{assemble_latin, assemble_sudoku, expand_class, Design};
use cliquedesign::clique::{enumerate_maximum_cliques, OrderedClique, SearchOptions};
use cliquedesign::derange::{enumerate_derangements, enumerate_sudoku_derangements};
use cliquedesign::graph::{build_graph, CompatibilityGraph};
use cliquedesign::Limits;

pub fn latin_graph(n: usize) -> CompatibilityGraph {
    let limits = Limits::default();
    build_graph(enumerate_derangements(n, &limits).unwrap(), &limits).unwrap()
}

pub fn sudoku_graph(p: usize) -> CompatibilityGraph {
    let limits = Limits::default();
    build_graph(enumerate_sudoku_derangements(p, &limits).unwrap(), &limits).unwrap()
}

/// Every design reachable from every maximum clique under every symbol
/// relabelling and every geometric move the sampler can draw.
pub fn pipeline_population(g: &CompatibilityGraph) -> Vec<Vec<u8>> {
    let vs = g.vertex_set();
    let n = vs.order();
    let cs = enumerate_maximum_cliques(g, Some(n - 1), &SearchOptions::default()).unwrap();
    let mut out = Vec::new();
    for ids in cs.iter() {
        let clique = OrderedClique::from_ids(g, &ids);
        let reduced = match vs.partition() {
            None => Design::Latin(assemble_latin(&clique, n).unwrap()),
            Some(part) => Design::Sudoku(assemble_sudoku(&clique, part.p()).unwrap()),
        };
        out.extend(
            expand_class(&reduced)
                .into_iter()
                .map(|g| g.cells().to_vec()),
        );
    }
    out
}
