mod args;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use cliquedesign::assembler::format::{read_grids, write_samples};
use cliquedesign::assembler::sampler::Sampler;
use cliquedesign::assembler::total_design_count;
use cliquedesign::clique::store::{open_clique_store, read_clique_list, write_clique_store, MAGIC};
use cliquedesign::clique::{
    count_maximum_cliques, maximum_clique_size, streamed_maximum_cliques, CliqueSet, SearchOptions,
};
use cliquedesign::derange::{
    enumerate_derangements, enumerate_sudoku_derangements, DesignKind, VertexSet,
};
use cliquedesign::graph::{build_graph, export_graph, CompatibilityGraph, SubgraphSample};
use cliquedesign::perm::BoxPartition;
use cliquedesign::{Error, Limits, Result};
use num_bigint::BigUint;

use args::{Cli, Command, CountArgs, DesignArgs, GenerateArgs, GraphArgs, VerifyArgs};

static CANCEL: AtomicBool = AtomicBool::new(false);

/// Fresh subgraphs tried before giving up on finding an `(n-1)`-clique.
const MAX_SUBGRAPH_ATTEMPTS: u32 = 100;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = ctrlc::set_handler(|| CANCEL.store(true, Ordering::SeqCst));
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Graph(a) => graph(a),
        Command::Count(a) => count(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cliquedesign: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Verification(_) => 1,
        Error::OrderTooLarge(_)
        | Error::MemoryBudgetExceeded(_)
        | Error::StorageExceeded(_)
        | Error::Interrupted { .. }
        | Error::PopulationTooLarge(_) => 3,
        Error::Io(io)
            if !matches!(
                io.kind(),
                io::ErrorKind::NotFound
                    | io::ErrorKind::PermissionDenied
                    | io::ErrorKind::InvalidInput
            ) =>
        {
            3
        }
        _ => 2,
    }
}

fn search_options(serial: bool) -> SearchOptions<'static> {
    SearchOptions {
        parallel: !serial,
        cancel: Some(&CANCEL),
        ..SearchOptions::default()
    }
}

/// Resolves `--order`/`--p` into the kind's vertex set.
fn vertex_set(d: &DesignArgs, limits: &Limits) -> Result<VertexSet> {
    match d.kind {
        args::Kind::Latin => {
            if d.p.is_some() {
                return Err(Error::InvalidArgument("--p only applies to sudoku".into()));
            }
            let n = d
                .order
                .ok_or_else(|| Error::InvalidArgument("latin needs --order".into()))?;
            enumerate_derangements(n, limits)
        }
        args::Kind::Sudoku => {
            let p = match (d.p, d.order) {
                (Some(p), None) => p,
                (None, Some(n)) => BoxPartition::from_order(n)?.p(),
                (Some(p), Some(n)) if p * p == n => p,
                (Some(p), Some(n)) => {
                    return Err(Error::InvalidArgument(format!(
                        "--order {n} is not --p {p} squared"
                    )))
                }
                (None, None) => return Err(Error::InvalidArgument("sudoku needs --p".into())),
            };
            enumerate_sudoku_derangements(p, limits)
        }
    }
}

/// Draws induced subgraphs until one has a clique of size `n - 1`.
fn subgraph_with_design(
    vs: &VertexSet,
    k: usize,
    seed: u64,
    limits: &Limits,
) -> Result<(SubgraphSample, CompatibilityGraph)> {
    let target = vs.order().saturating_sub(1);
    for attempt in 0..MAX_SUBGRAPH_ATTEMPTS {
        let sample = SubgraphSample::draw_attempt(vs.len(), k, seed, attempt)?;
        let sub = build_graph(vs.select(&sample.selected_ids), limits)?;
        if count_maximum_cliques(&sub, Some(target), &search_options(false))? > 0 {
            return Ok((sample, sub));
        }
        eprintln!(
            "subgraph attempt {attempt}: largest clique has {} vertices, need {target}; redrawing",
            maximum_clique_size(&sub)
        );
    }
    Err(Error::InvalidArgument(format!(
        "no clique of size {target} in {MAX_SUBGRAPH_ATTEMPTS} random subgraphs of {k} vertices"
    )))
}

fn load_cliques<'g>(g: &'g CompatibilityGraph, path: &Path) -> Result<CliqueSet<'g>> {
    let mut magic = [0u8; 8];
    let is_store = File::open(path)?.read_exact(&mut magic).is_ok() && &magic == MAGIC;
    if is_store {
        open_clique_store(g, path)
    } else {
        read_clique_list(g, BufReader::new(File::open(path)?))
    }
}

fn clock_seed() -> u64 {
    let t = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    t ^ (u64::from(std::process::id()) << 32)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn generate(a: GenerateArgs) -> Result<()> {
    let limits = Limits::from_env()?;
    let vs = vertex_set(&a.design, &limits)?;
    let seed = a.seed.unwrap_or_else(|| {
        let s = clock_seed();
        eprintln!("seed: {s}");
        s
    });
    let n = vs.order();
    let target = Some(n.saturating_sub(1));

    let (subgraph, g) = match a.subgraph_k {
        Some(k) => {
            let (s, g) = subgraph_with_design(&vs, k, seed, &limits)?;
            (Some(s), g)
        }
        None => (None, build_graph(vs, &limits)?),
    };
    let cliques = match &a.cliques_from {
        Some(path) => load_cliques(&g, path)?,
        None => streamed_maximum_cliques(&g, target, &search_options(false))?,
    };
    if let Some(s) = &subgraph {
        eprintln!(
            "subgraph: {} of {} vertices, {} edges, {} maximum cliques of size {}; output is not uniform",
            s.k,
            s.parent_vertices,
            g.edge_count(),
            cliques.count(),
            cliques.max_size()
        );
    }
    let sampler = Sampler::new(cliques, subgraph, seed)?;
    let samples = (0..a.count)
        .map(|i| sampler.sample(i))
        .collect::<Result<Vec<_>>>()?;
    write_samples(&samples, a.format.into(), output(a.output.as_deref())?)
}

fn graph(a: GraphArgs) -> Result<()> {
    let limits = Limits::from_env()?;
    let vs = vertex_set(&a.design, &limits)?;
    let g = match a.subgraph_k {
        Some(k) => {
            let sample = SubgraphSample::draw(vs.len(), k, a.seed)?;
            build_graph(vs.select(&sample.selected_ids), &limits)?
        }
        None => build_graph(vs, &limits)?,
    };
    if let Some(path) = &a.vertices {
        g.vertex_set()
            .write_text(BufWriter::new(File::create(path)?))?;
    }
    export_graph(&g, a.format.into(), output(a.output.as_deref())?)?;

    let mut summary = format!(
        "vertices: {}\nedges: {}\n",
        g.vertex_count(),
        g.edge_count()
    );
    if a.cliques {
        let size = maximum_clique_size(&g);
        let count = count_maximum_cliques(&g, Some(size), &search_options(false))?;
        summary += &format!("maximum clique size: {size}\nmaximum cliques: {count}\n");
    }
    if a.output.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

fn count(a: CountArgs) -> Result<()> {
    let limits = Limits::from_env()?;
    let vs = vertex_set(&a.design, &limits)?;
    let kind = vs.kind();
    let n = vs.order();
    let g = build_graph(vs, &limits)?;
    let target = Some(n.saturating_sub(1));
    let opts = search_options(a.serial);
    let cliques = match &a.store {
        Some(path) => write_clique_store(&g, target, path, None, &opts)?.count(),
        None => count_maximum_cliques(&g, target, &opts)?,
    };
    let total = total_design_count(kind, n, &BigUint::from(cliques))?;
    let p = g.vertex_set().partition().map(|b| b.p());

    if a.json {
        let report = serde_json::json!({
            "kind": kind,
            "n": n,
            "p": p,
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "clique_size": n.saturating_sub(1),
            "maximum_cliques": cliques,
            "reduced_designs": cliques,
            "total_designs": total.to_string(),
        });
        println!("{report}");
    } else {
        println!("kind: {kind}");
        println!("order: {n}");
        if let Some(p) = p {
            println!("box side: {p}");
        }
        println!("vertices: {}", g.vertex_count());
        println!("edges: {}", g.edge_count());
        println!("clique size: {}", n.saturating_sub(1));
        println!("maximum cliques: {cliques}");
        println!("reduced designs: {cliques}");
        println!("total designs: {total}");
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<()> {
    let mut text = String::new();
    if a.path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text)?;
    } else {
        File::open(&a.path)?.read_to_string(&mut text)?;
    }
    let grids = read_grids(&text)?;
    if grids.is_empty() {
        return Err(Error::Parse(format!("no grids in {}", a.path.display())));
    }
    let mut non_uniform = 0;
    for g in &grids {
        let kind = g
            .kind
            .or(a.kind.map(Into::into))
            .unwrap_or(DesignKind::Latin);
        let violation = match kind {
            DesignKind::Latin => g.grid.latin_violation(),
            DesignKind::Sudoku => {
                let part = match g.p.or(a.p) {
                    Some(p) => BoxPartition::new(p)?,
                    None => BoxPartition::from_order(g.grid.n())?,
                };
                g.grid.sudoku_violation(part)
            }
        };
        if let Some(v) = violation {
            return Err(Error::Verification(format!(
                "{}: {}: not a {kind} design: {v}",
                a.path.display(),
                g.label
            )));
        }
        if g.uniform == Some(false) {
            non_uniform += 1;
        }
    }
    let noun = if grids.len() == 1 {
        "design"
    } else {
        "designs"
    };
    print!("{}: {} valid {noun}", a.path.display(), grids.len());
    if non_uniform > 0 {
        print!(" ({non_uniform} marked not uniform)");
    }
    println!();
    Ok(())
}
