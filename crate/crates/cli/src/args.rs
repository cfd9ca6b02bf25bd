use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cliquedesign::assembler::format::GridFormat;
use cliquedesign::derange::DesignKind;
use cliquedesign::graph::GraphFormat;

#[derive(Debug, Parser)]
#[command(
    name = "cliquedesign",
    version,
    about = "Random Latin squares and Sudoku grids from maximum cliques of derangement graphs",
    after_help = "Budgets: CLIQUEDESIGN_MAX_VERTEX_SET (default 2000000) and \
                  CLIQUEDESIGN_MAX_DENSE_VERTICES (default 20000).\n\
                  Exit status: 0 ok, 1 verification failure, 2 usage, 3 resource limit or interrupt."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample random designs
    Generate(GenerateArgs),
    /// Build the compatibility graph and export it
    Graph(GraphArgs),
    /// Count maximum cliques and the designs they stand for
    Count(CountArgs),
    /// Check that every grid in a file is a valid design
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Latin,
    Sudoku,
}

impl From<Kind> for DesignKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Latin => DesignKind::Latin,
            Kind::Sudoku => DesignKind::Sudoku,
        }
    }
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    pub kind: Kind,
    /// Order n of the square (for sudoku, n = p²)
    #[arg(long, short = 'n')]
    pub order: Option<usize>,
    /// Box side of a sudoku grid
    #[arg(long)]
    pub p: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OutFormat {
    Text,
    Json,
    Csv,
}

impl From<OutFormat> for GridFormat {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Text => GridFormat::Text,
            OutFormat::Json => GridFormat::Json,
            OutFormat::Csv => GridFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ExportFormat {
    Dimacs,
    Edges,
    Dot,
}

impl From<ExportFormat> for GraphFormat {
    fn from(f: ExportFormat) -> Self {
        match f {
            ExportFormat::Dimacs => GraphFormat::Dimacs,
            ExportFormat::Edges => GraphFormat::EdgeList,
            ExportFormat::Dot => GraphFormat::Dot,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    /// Seed for all random choices; drawn from the clock and reported if absent
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of designs to emit
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    /// Work on a random induced subgraph with this many vertices (not uniform)
    #[arg(long)]
    pub subgraph_k: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutFormat::Text)]
    pub format: OutFormat,
    /// Write designs here instead of standard output
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    /// Maximum cliques of the full graph, from `count --store` or a text list
    /// of 1-based vertex ids
    #[arg(long, conflicts_with = "subgraph_k")]
    pub cliques_from: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    #[arg(long, value_enum, default_value_t = ExportFormat::Dimacs)]
    pub format: ExportFormat,
    /// Graph file; standard output if absent
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    /// Also write the vertex permutations, one per line, 1-based
    #[arg(long)]
    pub vertices: Option<PathBuf>,
    /// Export a random induced subgraph with this many vertices
    #[arg(long)]
    pub subgraph_k: Option<usize>,
    #[arg(long, default_value_t = 0, requires = "subgraph_k")]
    pub seed: u64,
    /// Also report the maximum clique size and the number of maximum cliques
    #[arg(long)]
    pub cliques: bool,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    /// Search on one thread
    #[arg(long)]
    pub serial: bool,
    /// Print the report as JSON
    #[arg(long)]
    pub json: bool,
    /// Also write the cliques to a binary store usable by `generate --cliques-from`
    #[arg(long)]
    pub store: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Grid file in text, JSON or CSV form; `-` for standard input
    pub path: PathBuf,
    /// Kind to check when the file does not say
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    /// Box side for sudoku grids when the file does not say
    #[arg(long)]
    pub p: Option<usize>,
}
