use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;

use hecsolve::bench::{format_table, run_benchmark, write_csv, BenchConfig, MatrixSource};
use hecsolve::{PrecondKind, SolverConfig, WidthPolicy};

/// Times preconditioned GMRES with one worker and with N workers.
#[derive(Parser, Debug)]
#[command(name = "bench")]
struct Args {
    /// poisson:NX,NY,NZ or mm:PATH
    #[arg(long)]
    matrix: MatrixSource,

    /// bilu0 | bilut:P,TOL | biluk:K | ras (repeatable)
    #[arg(long, required = true, num_args = 1..)]
    precond: Vec<PrecondKind>,

    /// Number of blocks / subdomains (repeatable)
    #[arg(long, required = true, num_args = 1..)]
    blocks: Vec<usize>,

    /// Overlap rounds, used by ras only
    #[arg(long, default_value_t = 1)]
    overlap: usize,

    #[arg(long, default_value_t = 4)]
    workers: usize,

    #[arg(long, default_value_t = 20)]
    restart: usize,

    #[arg(long, default_value_t = 1e-6)]
    tol: f64,

    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,

    /// ELL width: `auto` or a fixed number of slots
    #[arg(long, default_value = "auto")]
    width: String,

    #[arg(long, default_value_t = 3)]
    repeats: usize,

    /// CSV output path
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_width(s: &str) -> Result<WidthPolicy> {
    if s == "auto" {
        return Ok(WidthPolicy::Auto);
    }
    Ok(WidthPolicy::Fixed(s.parse().with_context(|| format!("bad --width `{s}`"))?))
}

fn run(args: Args) -> Result<()> {
    if args.workers == 0 {
        bail!("--workers must be at least 1");
    }
    let width = parse_width(&args.width)?;
    let a = args.matrix.load().context("loading matrix")?;
    eprintln!("matrix: n = {}, nnz = {}", a.n_rows(), a.nnz());

    let solver = SolverConfig {
        restart: args.restart,
        max_iters: args.max_iters,
        rel_tol: args.tol,
        abs_tol: 0.0,
    };
    let mut rows = Vec::new();
    for &kind in &args.precond {
        for &blocks in &args.blocks {
            let overlap = if kind.allows_overlap() { args.overlap } else { 0 };
            let mut cfg = BenchConfig::new(kind, blocks, args.workers).with_overlap(overlap).with_width(width);
            cfg.solver = solver;
            cfg.repeats = args.repeats;
            let row = run_benchmark(&a, &cfg).with_context(|| format!("{kind} with {blocks} blocks"))?;
            eprintln!(
                "{kind} blocks={blocks}: {} iterations, residual {:.3e}, max |x-1| {:.3e}",
                row.iterations, row.final_relative_residual, row.max_error
            );
            rows.push(row);
        }
    }

    print!("{}", format_table(&rows));
    if let Some(path) = &args.out {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(&rows, BufWriter::new(file))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
