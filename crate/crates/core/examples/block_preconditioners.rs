//! Partition a Poisson matrix and build block ILU and RAS preconditioners.
use hecsolve::{extend_overlap, partition_graph, BlockPreconditioner, PrecondConfig, PrecondKind};

fn main() -> hecsolve::Result<()> {
    let a = hecsolve::generate::poisson7(12, 12, 12)?;
    let part = partition_graph(&a, 8)?;
    let sizes: Vec<usize> = part.parts().iter().map(Vec::len).collect();
    println!("8 parts, sizes {sizes:?}");
    let ext: Vec<usize> = extend_overlap(&a, &part, 1).iter().map(Vec::len).collect();
    println!("with overlap 1: {ext:?}");

    let r: Vec<f64> = (0..a.n_rows()).map(|i| ((i * 37) % 11) as f64).collect();
    let kinds = [
        PrecondConfig::new(PrecondKind::Bilu0, 8),
        PrecondConfig::new(PrecondKind::Biluk { level: 1 }, 8),
        PrecondConfig::new(PrecondKind::Bilut { p: 7, tol: 0.1 }, 8),
        PrecondConfig::new(PrecondKind::Ras, 8).with_overlap(1),
    ];
    for cfg in kinds {
        let m = BlockPreconditioner::build(&a, &cfg)?;
        let z = m.apply(&r, 2)?;
        let az = a.spmv(&z)?;
        let rel = az.iter().zip(&r).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt()
            / r.iter().map(|v| v * v).sum::<f64>().sqrt();
        println!(
            "{:<14} levels L/U {:>3}/{:<3} ||A M^-1 r - r|| / ||r|| = {rel:.3}",
            cfg.kind.to_string(),
            m.solver().lower().nlev(),
            m.solver().upper().nlev()
        );
    }
    Ok(())
}
