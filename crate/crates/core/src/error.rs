use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("invalid order: {0}")]
    InvalidOrder(String),

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("not a permutation matrix: {0}")]
    NotAPermutationMatrix(String),

    #[error("order too large: {0}")]
    OrderTooLarge(String),

    #[error("memory budget exceeded: {0}")]
    MemoryBudgetExceeded(String),

    #[error("invalid subgraph size k={k} for a graph with {vertices} vertices")]
    InvalidK { k: usize, vertices: usize },

    #[error("clique storage budget exceeded: {0}")]
    StorageExceeded(String),

    #[error("clique enumeration interrupted after {found} cliques; partial output is invalid")]
    Interrupted { found: u64 },

    #[error("clique set is empty")]
    EmptyCliqueSet,

    #[error("clique member {0} is not disjoint from the identity")]
    NotDisjointFromIdentity(String),

    #[error("wrong clique size: expected {expected}, got {got}")]
    WrongCliqueSize { expected: usize, got: usize },

    #[error("clique member {0} is not a Sudoku-derangement")]
    NotSudokuDerangement(String),

    #[error("clique members {0} and {1} are not disjoint")]
    NotDisjoint(String, String),

    #[error("population too large: {0}")]
    PopulationTooLarge(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
