//! Solve a 3D Poisson system with restarted GMRES and a block preconditioner.
use hecsolve::{gmres, BlockPreconditioner, PrecondConfig, PrecondKind, SolverConfig};

fn main() -> hecsolve::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let a = hecsolve::generate::poisson7(n, n, n)?;
    let b = a.spmv(&vec![1.0; a.n_rows()])?;
    let cfg = SolverConfig::default();

    let (_, plain) = gmres(&a, &b, None, &cfg, 2)?;
    println!("no preconditioner: {} iterations", plain.iterations);

    for kind in [PrecondKind::Bilu0, PrecondKind::Ras] {
        let pc = PrecondConfig::new(kind, 16).with_overlap(if kind.allows_overlap() { 1 } else { 0 });
        let m = BlockPreconditioner::build(&a, &pc)?;
        let (x, rep) = gmres(&a, &b, Some(&m), &cfg, 2)?;
        let err = x.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        println!(
            "{kind}: converged {} in {} iterations ({} restarts), residual {:.2e}, max error {err:.2e}",
            rep.converged, rep.iterations, rep.restarts, rep.final_relative_residual
        );
    }
    Ok(())
}
