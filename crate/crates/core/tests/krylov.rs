mod common;

use hecsolve::generate::poisson7;
use hecsolve::{gmres, BlockPreconditioner, CsrMatrix, PrecondConfig, PrecondKind, Preconditioner, SolverConfig};

#[test]
fn unpreconditioned_tridiagonal() {
    let a = common::tridiag(100);
    let b: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
    let cfg = SolverConfig { rel_tol: 1e-10, max_iters: 50_000, ..Default::default() };
    let (x, rep) = gmres(&a, &b, None, &cfg, 1).unwrap();
    assert!(rep.converged);
    let rel = common::residual_norm(&a, &x, &b) / common::norm2(&b);
    assert!(rel <= 1e-10);
    assert!((rep.final_relative_residual - rel).abs() <= 1e-8 * rel.max(1e-300) + 1e-300);
}

#[test]
fn exact_preconditioner_converges_in_one_step() {
    let a = common::tridiag(64);
    let m = BlockPreconditioner::build(&a, &PrecondConfig::new(PrecondKind::Bilu0, 1)).unwrap();
    let b = a.spmv(&vec![1.0; 64]).unwrap();
    let cfg = SolverConfig { rel_tol: 1e-10, ..Default::default() };
    let (x, rep) = gmres(&a, &b, Some(&m), &cfg, 2).unwrap();
    assert!(rep.converged);
    assert_eq!(rep.iterations, 1);
    assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-10));
}

#[test]
fn residual_history_is_monotone_within_cycles() {
    let a = poisson7(12, 12, 12).unwrap();
    let b = a.spmv(&vec![1.0; a.n_rows()]).unwrap();
    for m in [
        None,
        Some(BlockPreconditioner::build(&a, &PrecondConfig::new(PrecondKind::Ras, 8).with_overlap(1)).unwrap()),
    ] {
        let cfg = SolverConfig { rel_tol: 1e-9, ..Default::default() };
        let (x, rep) = gmres(&a, &b, m.as_ref().map(|p| p as &dyn Preconditioner), &cfg, 2).unwrap();
        assert!(rep.converged);
        for cycle in &rep.residual_history {
            for w in cycle.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
        }
        let rel = common::residual_norm(&a, &x, &b) / common::norm2(&b);
        assert!((rep.final_relative_residual - rel).abs() <= 1e-8 * rel);
        assert_eq!(rep.iterations, rep.residual_history.iter().map(Vec::len).sum::<usize>());
    }
}

#[test]
fn preconditioning_reduces_iterations() {
    let a = poisson7(14, 14, 14).unwrap();
    let b = a.spmv(&vec![1.0; a.n_rows()]).unwrap();
    let cfg = SolverConfig::default();
    let (_, plain) = gmres(&a, &b, None, &cfg, 1).unwrap();
    let m = BlockPreconditioner::build(&a, &PrecondConfig::new(PrecondKind::Bilu0, 4)).unwrap();
    let (_, pre) = gmres(&a, &b, Some(&m), &cfg, 1).unwrap();
    assert!(plain.converged && pre.converged);
    assert!(pre.iterations < plain.iterations);
}

#[test]
fn identity_system() {
    let b = vec![2.0, -1.0, 0.5, 4.0];
    let (x, rep) = gmres(&CsrMatrix::identity(4), &b, None, &SolverConfig::default(), 1).unwrap();
    assert_eq!(rep.iterations, 1);
    assert!(x.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-15));
}
