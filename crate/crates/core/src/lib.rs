//! Uniformly random Latin squares and Sudoku designs via maximum cliques of
//! derangement-disjointness graphs.
//!
//! A Latin square of order `n` whose symbol-1 cells form the identity matrix
//! is the same thing as a set of `n - 1` pairwise disjoint derangements, i.e. a
//! maximum clique of the graph joining disjoint derangements. Drawing such a
//! clique uniformly, then a uniform relabelling of symbols `2..n` and a
//! uniform column permutation, yields a uniform Latin square. Sudoku grids work
//! the same way with S-permutations (one cell per box), the base permutation
//! [`perm::sigma0`] in place of the identity, and row/column moves restricted
//! to bands and stacks.

pub mod assembler;
pub mod bitset;
pub mod clique;
pub mod derange;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod perm;
pub mod rng;

pub use error::{Error, Result};

/// Resource budgets. Defaults can be overridden from the environment with
/// [`Limits::from_env`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest vertex set the enumerators will materialize.
    pub max_vertex_set: usize,
    /// Largest graph stored as a dense bitset adjacency matrix.
    pub max_dense_vertices: usize,
}

pub const ENV_MAX_VERTEX_SET: &str = "CLIQUEDESIGN_MAX_VERTEX_SET";
pub const ENV_MAX_DENSE_VERTICES: &str = "CLIQUEDESIGN_MAX_DENSE_VERTICES";

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vertex_set: 2_000_000,
            max_dense_vertices: 20_000,
        }
    }
}

impl Limits {
    /// Defaults, overridden by `CLIQUEDESIGN_MAX_VERTEX_SET` and
    /// `CLIQUEDESIGN_MAX_DENSE_VERTICES` when set to an integer.
    pub fn from_env() -> Result<Self> {
        let mut l = Limits::default();
        for (name, slot) in [
            (ENV_MAX_VERTEX_SET, &mut l.max_vertex_set),
            (ENV_MAX_DENSE_VERTICES, &mut l.max_dense_vertices),
        ] {
            if let Ok(v) = std::env::var(name) {
                *slot = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("{name}={v:?} is not an integer")))?;
            }
        }
        Ok(l)
    }
}
