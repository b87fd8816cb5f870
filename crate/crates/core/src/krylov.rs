//! Restarted GMRES with right preconditioning.
//!
//! Arnoldi uses modified Gram-Schmidt and the small least-squares problem is
//! kept triangular with Givens rotations. With right preconditioning the
//! rotated residual estimate tracks the true residual of `A x = b`, which is
//! recomputed explicitly before convergence is declared.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::formats::CsrMatrix;
use crate::precond::Preconditioner;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub restart: usize,
    /// Cap on the total number of inner (Arnoldi) iterations.
    pub max_iters: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { restart: 20, max_iters: 10_000, rel_tol: 1e-6, abs_tol: 0.0 }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if self.restart == 0 {
            return Err(Error::InvalidArgument("restart length must be at least 1".into()));
        }
        if [self.rel_tol, self.abs_tol].iter().any(|t| t.is_nan() || *t < 0.0) {
            return Err(Error::InvalidArgument("tolerances must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub converged: bool,
    /// Inner iterations across all restart cycles.
    pub iterations: usize,
    pub restarts: usize,
    /// `||b - A x||_2 / ||b||_2`, recomputed from the returned `x`.
    pub final_relative_residual: f64,
    /// Preconditioner construction time; filled in by callers that build one.
    pub setup_seconds: f64,
    pub solve_seconds: f64,
    /// Rotated residual estimate after each inner iteration, per cycle.
    pub residual_history: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn residual(a: &CsrMatrix, b: &[f64], x: &[f64], workers: usize) -> Result<Vec<f64>> {
    let mut r = vec![0.0; b.len()];
    a.spmv_into(x, &mut r, workers)?;
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    Ok(r)
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else if a == 0.0 {
        (0.0, 1.0)
    } else {
        let h = a.hypot(b);
        (a / h, b / h)
    }
}

/// Solves `A x = b` from a zero initial guess with GMRES(`cfg.restart`),
/// stopping once `||b - A x||_2 <= max(rel_tol ||b||_2, abs_tol)`.
///
/// Running out of iterations is not an error: the report has
/// `converged == false` and `x` is the last iterate.
pub fn gmres(
    a: &CsrMatrix,
    b: &[f64],
    precond: Option<&dyn Preconditioner>,
    cfg: &SolverConfig,
    workers: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    cfg.validate()?;
    if !a.is_square() {
        return Err(Error::NotSquare { n_rows: a.n_rows(), n_cols: a.n_cols() });
    }
    let n = a.n_rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    if let Some(m) = precond {
        if m.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.n() });
        }
    }

    let start = Instant::now();
    let apply_m = |v: &[f64]| -> Result<Vec<f64>> {
        match precond {
            Some(m) => m.apply(v, workers),
            None => Ok(v.to_vec()),
        }
    };

    let bnorm = norm2(b);
    let target = (cfg.rel_tol * bnorm).max(cfg.abs_tol);
    let rel = |rnorm: f64| if bnorm > 0.0 { rnorm / bnorm } else { rnorm };
    let m = cfg.restart;

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut rnorm = bnorm;
    let mut iterations = 0;
    let mut restarts = 0;
    let mut history = Vec::new();
    let mut converged = rnorm <= target;

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    // column-major Hessenberg, column j has j + 2 entries
    let mut h: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut cs = vec![0.0; m];
    let mut sn = vec![0.0; m];
    let mut g = vec![0.0; m + 1];
    let mut w = vec![0.0; n];

    while !converged && iterations < cfg.max_iters {
        basis.clear();
        h.clear();
        g.iter_mut().for_each(|v| *v = 0.0);
        g[0] = rnorm;
        basis.push(r.iter().map(|v| v / rnorm).collect());
        let mut cycle = Vec::new();
        let mut steps = 0;

        while steps < m && iterations < cfg.max_iters {
            let j = steps;
            let z = apply_m(&basis[j])?;
            a.spmv_into(&z, &mut w, workers)?;

            let mut col = vec![0.0; j + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(&w, v);
                col[i] = hij;
                axpy(-hij, v, &mut w);
            }
            let wnorm = norm2(&w);
            col[j + 1] = wnorm;

            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let (c, s) = givens(col[j], col[j + 1]);
            cs[j] = c;
            sn[j] = s;
            col[j] = c * col[j] + s * col[j + 1];
            col[j + 1] = 0.0;
            g[j + 1] = -s * g[j];
            g[j] *= c;
            h.push(col);

            steps += 1;
            iterations += 1;
            let estimate = g[j + 1].abs();
            cycle.push(rel(estimate));

            // an invariant Krylov space means the solution is in reach
            let breakdown = wnorm <= f64::EPSILON * bnorm.max(f64::MIN_POSITIVE);
            if estimate <= target || breakdown {
                break;
            }
            basis.push(w.iter().map(|v| v / wnorm).collect());
        }

        // back substitution for the cycle's coefficients
        let mut y = vec![0.0; steps];
        for i in (0..steps).rev() {
            let mut s = g[i];
            for k in i + 1..steps {
                s -= h[k][i] * y[k];
            }
            y[i] = s / h[i][i];
        }
        let mut update = vec![0.0; n];
        for (k, yk) in y.iter().enumerate() {
            axpy(*yk, &basis[k], &mut update);
        }
        let dx = apply_m(&update)?;
        axpy(1.0, &dx, &mut x);

        r = residual(a, b, &x, workers)?;
        rnorm = norm2(&r);
        converged = rnorm <= target;
        history.push(cycle);
        if !converged {
            restarts += 1;
            if rnorm == 0.0 || !rnorm.is_finite() {
                break;
            }
        }
    }

    let report = SolveReport {
        converged,
        iterations,
        restarts,
        final_relative_residual: rel(rnorm),
        setup_seconds: 0.0,
        solve_seconds: start.elapsed().as_secs_f64(),
        residual_history: history,
    };
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triples(n, n, &t).unwrap()
    }

    #[test]
    fn identity_in_one_step() {
        let b = [1.0, -2.0, 3.0];
        let (x, rep) = gmres(&CsrMatrix::identity(3), &b, None, &SolverConfig::default(), 1).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
        for (xi, bi) in x.iter().zip(b) {
            assert!((xi - bi).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_rhs_needs_no_iterations() {
        let (x, rep) = gmres(&tridiag(5), &[0.0; 5], None, &SolverConfig::default(), 1).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 0);
        assert_eq!(x, vec![0.0; 5]);
    }

    #[test]
    fn tridiagonal_unpreconditioned() {
        let a = tridiag(100);
        let b: Vec<f64> = (0..100).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
        let cfg = SolverConfig { rel_tol: 1e-10, max_iters: 100_000, ..Default::default() };
        let (x, rep) = gmres(&a, &b, None, &cfg, 1).unwrap();
        assert!(rep.converged);
        let r = residual(&a, &b, &x, 1).unwrap();
        assert!(norm2(&r) / norm2(&b) <= 1e-10);
        for cycle in &rep.residual_history {
            for w in cycle.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn max_iters_reports_unconverged() {
        let a = tridiag(200);
        let b = vec![1.0; 200];
        let cfg = SolverConfig { restart: 5, max_iters: 7, rel_tol: 1e-12, abs_tol: 0.0 };
        let (_, rep) = gmres(&a, &b, None, &cfg, 1).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 7);
        assert_eq!(rep.residual_history.len(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        let a = tridiag(3);
        assert!(gmres(&a, &[1.0], None, &SolverConfig::default(), 1).is_err());
        let cfg = SolverConfig { restart: 0, ..Default::default() };
        assert!(gmres(&a, &[1.0; 3], None, &cfg, 1).is_err());
    }
}
