//! Benchmark harness: setup and solve with one worker and with `W` workers,
//! reported as rows shaped like the classic "Pre / Blocks / CPU / parallel /
//! speedup" tables.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::formats::{CsrMatrix, WidthPolicy};
use crate::generate::poisson7;
use crate::krylov::{gmres, SolverConfig, SolveReport};
use crate::mm::read_matrix_market;
use crate::precond::{BlockPreconditioner, PrecondConfig, PrecondKind};

pub const CSV_HEADER: &str =
    "pre,blocks,solve_cpu_s,solve_par_s,solve_speedup,pre_cpu_s,pre_par_s,pre_speedup,iters,converged";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixSource {
    Poisson { nx: usize, ny: usize, nz: usize },
    MatrixMarket(PathBuf),
}

impl MatrixSource {
    pub fn load(&self) -> Result<CsrMatrix> {
        match self {
            MatrixSource::Poisson { nx, ny, nz } => poisson7(*nx, *ny, *nz),
            MatrixSource::MatrixMarket(path) => read_matrix_market(path),
        }
    }
}

impl FromStr for MatrixSource {
    type Err = Error;

    /// `poisson:NX,NY,NZ` or `mm:PATH`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("matrix source `{s}` is not poisson:NX,NY,NZ or mm:PATH"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "poisson" => {
                let dims: Vec<usize> = rest
                    .split(',')
                    .map(|d| d.trim().parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad())?;
                match dims[..] {
                    [nx, ny, nz] if nx > 0 && ny > 0 && nz > 0 => Ok(MatrixSource::Poisson { nx, ny, nz }),
                    _ => Err(bad()),
                }
            }
            "mm" if !rest.is_empty() => Ok(MatrixSource::MatrixMarket(PathBuf::from(rest))),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub precond: PrecondConfig,
    pub workers: usize,
    pub solver: SolverConfig,
    /// Timed repetitions; the median is reported.
    pub repeats: usize,
}

impl BenchConfig {
    pub fn new(kind: PrecondKind, blocks: usize, workers: usize) -> Self {
        Self {
            precond: PrecondConfig::new(kind, blocks),
            workers,
            solver: SolverConfig::default(),
            repeats: 3,
        }
    }

    pub fn with_overlap(mut self, overlap: usize) -> Self {
        self.precond.overlap = overlap;
        self
    }

    pub fn with_width(mut self, width: WidthPolicy) -> Self {
        self.precond.width = width;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub preconditioner: String,
    pub blocks: usize,
    pub solve_seconds_serial: f64,
    pub solve_seconds_parallel: f64,
    pub solve_speedup: f64,
    /// One preconditioner application (both triangular solves).
    pub precond_seconds_serial: f64,
    pub precond_seconds_parallel: f64,
    pub precond_speedup: f64,
    pub iterations: usize,
    pub converged: bool,
    pub setup_seconds: f64,
    pub final_relative_residual: f64,
    /// `max_i |x_i - 1|` against the known solution.
    pub max_error: f64,
    pub levels_lower: usize,
    pub levels_upper: usize,
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{:.6},{:.6},{:.3},{:.6},{:.6},{:.3},{},{}",
            self.preconditioner,
            self.blocks,
            self.solve_seconds_serial,
            self.solve_seconds_parallel,
            self.solve_speedup,
            self.precond_seconds_serial,
            self.precond_seconds_parallel,
            self.precond_speedup,
            self.iterations,
            self.converged
        )
    }
}

pub fn write_csv(rows: &[BenchRow], mut w: impl Write) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.csv_line())?;
    }
    Ok(())
}

pub fn format_table(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:>7} {:>11} {:>11} {:>8} {:>11} {:>11} {:>8} {:>6} {:>5} {:>10} {:>9}",
        "Pre", "Blocks", "Solve 1T(s)", "Solve NT(s)", "Speedup", "Pre 1T(s)", "Pre NT(s)", "Speedup", "Iters", "Conv",
        "Setup(s)", "Levels"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<16} {:>7} {:>11.4} {:>11.4} {:>8.2} {:>11.6} {:>11.6} {:>8.2} {:>6} {:>5} {:>10.4} {:>4}/{:<4}",
            r.preconditioner,
            r.blocks,
            r.solve_seconds_serial,
            r.solve_seconds_parallel,
            r.solve_speedup,
            r.precond_seconds_serial,
            r.precond_seconds_parallel,
            r.precond_speedup,
            r.iterations,
            if r.converged { "yes" } else { "no" },
            r.setup_seconds,
            r.levels_lower,
            r.levels_upper
        );
    }
    out
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn speedup(serial: f64, parallel: f64) -> f64 {
    serial.max(1e-9) / parallel.max(1e-9)
}

struct Timed {
    solve_seconds: f64,
    precond_seconds: f64,
    x: Vec<f64>,
    report: SolveReport,
}

fn timed_run(a: &CsrMatrix, b: &[f64], m: &BlockPreconditioner, cfg: &BenchConfig, workers: usize) -> Result<Timed> {
    let repeats = cfg.repeats.max(1);
    let mut apply_times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let t = Instant::now();
        m.apply(b, workers)?;
        apply_times.push(t.elapsed().as_secs_f64());
    }
    let mut solve_times = Vec::with_capacity(repeats);
    let mut last = None;
    for _ in 0..repeats {
        let (x, report) = gmres(a, b, Some(m), &cfg.solver, workers)?;
        solve_times.push(report.solve_seconds);
        last = Some((x, report));
    }
    let (x, report) = last.expect("at least one repeat");
    Ok(Timed { solve_seconds: median(solve_times), precond_seconds: median(apply_times), x, report })
}

/// Benchmarks one preconditioner on `a` with right-hand side `A 1`.
///
/// Setup and solve run with one worker and with `cfg.workers`; the two runs
/// must agree bitwise (iterations, residual and solution), otherwise
/// [`Error::Nondeterministic`] is returned. Non-convergence is reported in
/// the row, not as an error.
pub fn run_benchmark(a: &CsrMatrix, cfg: &BenchConfig) -> Result<BenchRow> {
    if cfg.workers == 0 {
        return Err(Error::InvalidArgument("workers must be at least 1".into()));
    }
    let ones = vec![1.0; a.n_cols()];
    let b = a.spmv(&ones)?;

    let mut setup_times = Vec::new();
    let mut precond = None;
    for _ in 0..cfg.repeats.max(1) {
        let t = Instant::now();
        let m = BlockPreconditioner::build(a, &cfg.precond)?;
        setup_times.push(t.elapsed().as_secs_f64());
        precond = Some(m);
    }
    let m = precond.expect("at least one repeat");

    let serial = timed_run(a, &b, &m, cfg, 1)?;
    let parallel = timed_run(a, &b, &m, cfg, cfg.workers)?;

    if serial.report.iterations != parallel.report.iterations {
        return Err(Error::Nondeterministic(format!(
            "iterations {} (1 worker) vs {} ({} workers)",
            serial.report.iterations, parallel.report.iterations, cfg.workers
        )));
    }
    if serial.report.final_relative_residual.to_bits() != parallel.report.final_relative_residual.to_bits()
        || serial.x.iter().zip(&parallel.x).any(|(p, q)| p.to_bits() != q.to_bits())
    {
        return Err(Error::Nondeterministic("solutions differ bitwise".into()));
    }

    let max_error = serial.x.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    Ok(BenchRow {
        preconditioner: cfg.precond.kind.label().to_string(),
        blocks: cfg.precond.blocks,
        solve_seconds_serial: serial.solve_seconds,
        solve_seconds_parallel: parallel.solve_seconds,
        solve_speedup: speedup(serial.solve_seconds, parallel.solve_seconds),
        precond_seconds_serial: serial.precond_seconds,
        precond_seconds_parallel: parallel.precond_seconds,
        precond_speedup: speedup(serial.precond_seconds, parallel.precond_seconds),
        iterations: serial.report.iterations,
        converged: serial.report.converged,
        setup_seconds: median(setup_times),
        final_relative_residual: serial.report.final_relative_residual,
        max_error,
        levels_lower: m.solver().lower().nlev(),
        levels_upper: m.solver().upper().nlev(),
    })
}
