//! Level-parallel sparse triangular solves on a preprocessed HEC matrix.
//!
//! Preprocessing computes the level schedule, reorders the factor level by
//! level and converts it to HEC with the diagonal as the last CSR entry of
//! every row. Upper factors are reversed (`i -> n-1-i` on rows and columns)
//! into lower form first, so one solver handles both.
//!
//! Solving runs the levels in order with a barrier in between. Rows of a
//! level are split into contiguous chunks, one per worker. Every row is
//! computed by the same code regardless of the worker count, so results are
//! bitwise reproducible.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Barrier;
use std::thread;

use crate::error::{Error, Result};
use crate::formats::{CsrMatrix, HecMatrix, WidthPolicy};
use crate::level::{reorder_by_schedule, reorder_matrix, LevelSchedule};
use crate::par::chunk_bounds;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleKind {
    Lower,
    Upper,
}

/// Index reversal `i -> n-1-i`. It is its own inverse.
pub fn reversal_map(n: usize) -> Vec<usize> {
    (0..n).rev().collect()
}

/// A triangular factor ready for repeated level-parallel solves.
#[derive(Debug, Clone)]
pub struct PreparedTriangular {
    kind: TriangleKind,
    hec: HecMatrix,
    schedule: LevelSchedule,
    /// original unknown -> row of `hec` (schedule perm, composed with the
    /// reversal for upper factors)
    position: Vec<usize>,
}

impl PreparedTriangular {
    /// Prepares `L x = b`. `l` must be lower triangular with a nonzero
    /// diagonal in every row.
    pub fn lower(l: &CsrMatrix, width: WidthPolicy) -> Result<Self> {
        check_diagonal(l, TriangleKind::Lower)?;
        let schedule = LevelSchedule::for_matrix(l)?;
        let reordered = reorder_by_schedule(l, &schedule)?;
        let hec = HecMatrix::from_csr(&reordered, true, width)?;
        let position = schedule.perm().to_vec();
        Ok(Self { kind: TriangleKind::Lower, hec, schedule, position })
    }

    /// Prepares `U x = b` by reversing `u` into a lower-triangular matrix
    /// and preparing that.
    pub fn upper(u: &CsrMatrix, width: WidthPolicy) -> Result<Self> {
        check_diagonal(u, TriangleKind::Upper)?;
        let t = reversal_map(u.n_rows());
        let reversed = reorder_matrix(u, &t, &t)?;
        let mut p = Self::lower(&reversed, width)?;
        p.kind = TriangleKind::Upper;
        let perm = p.schedule.perm();
        p.position = t.iter().map(|&ti| perm[ti]).collect();
        Ok(p)
    }

    pub fn kind(&self) -> TriangleKind {
        self.kind
    }

    pub fn reversal_applied(&self) -> bool {
        self.kind == TriangleKind::Upper
    }

    pub fn n(&self) -> usize {
        self.hec.n_rows()
    }

    /// The reordered lower-triangular matrix in HEC form.
    pub fn hec(&self) -> &HecMatrix {
        &self.hec
    }

    pub fn schedule(&self) -> &LevelSchedule {
        &self.schedule
    }

    pub fn nlev(&self) -> usize {
        self.schedule.nlev()
    }

    /// Solves for `x` in the original numbering.
    pub fn solve(&self, b: &[f64], workers: usize) -> Result<Vec<f64>> {
        let n = self.n();
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: b.len() });
        }
        let mut bp = vec![0.0; n];
        for (i, &p) in self.position.iter().enumerate() {
            bp[p] = b[i];
        }
        let xp = self.solve_reordered(&bp, workers);
        Ok(self.position.iter().map(|&p| xp[p]).collect())
    }

    /// Solves the reordered system `L' x' = b'` directly.
    pub fn solve_reordered(&self, bp: &[f64], workers: usize) -> Vec<f64> {
        let n = self.n();
        let workers = workers.max(1);
        let x: Vec<AtomicU64> = (0..n).map(|_| AtomicU64::new(0)).collect();
        let barrier = Barrier::new(workers);

        let run = |w: usize| {
            for k in 0..self.schedule.nlev() {
                let level = self.schedule.level_range(k);
                let (s, e) = chunk_bounds(level.len(), workers, w);
                for r in level.start + s..level.start + e {
                    let v = self.solve_row(r, bp[r], |c| f64::from_bits(x[c].load(Ordering::Relaxed)));
                    x[r].store(v.to_bits(), Ordering::Relaxed);
                }
                // the barrier orders this level's writes before the next level's reads
                barrier.wait();
            }
        };
        thread::scope(|scope| {
            for w in 1..workers {
                let run = &run;
                scope.spawn(move || run(w));
            }
            run(0);
        });
        x.into_iter().map(|a| f64::from_bits(a.into_inner())).collect()
    }

    #[inline]
    fn solve_row(&self, r: usize, rhs: f64, x: impl Fn(usize) -> f64) -> f64 {
        let ell = self.hec.ell();
        let mut sum = rhs;
        for k in 0..ell.row_lens()[r] {
            let (c, v) = ell.slot(r, k);
            sum -= v * x(c);
        }
        let (cols, vals) = self.hec.csr().row(r);
        let last = cols.len() - 1;
        for k in 0..last {
            sum -= vals[k] * x(cols[k]);
        }
        sum / vals[last]
    }

    /// Replays the level loop with a shadow array recording the level in
    /// which each unknown is written, and counts reads of unknowns that were
    /// not written in a strictly earlier level. Zero for a valid schedule.
    pub fn level_violations(&self) -> usize {
        let n = self.n();
        let mut written: Vec<Option<usize>> = vec![None; n];
        let mut violations = 0;
        for k in 0..self.schedule.nlev() {
            let level = self.schedule.level_range(k);
            for r in level.clone() {
                let (cols, _) = self.hec.csr().row(r);
                if cols.last() != Some(&r) {
                    violations += 1;
                }
                let ell = self.hec.ell();
                let reads = (0..ell.row_lens()[r])
                    .map(|s| ell.slot(r, s).0)
                    .chain(cols[..cols.len().saturating_sub(1)].iter().copied());
                for c in reads {
                    if !matches!(written[c], Some(lev) if lev < k) {
                        violations += 1;
                    }
                }
            }
            for r in level {
                if written[r].is_some() {
                    violations += 1;
                }
                written[r] = Some(k);
            }
        }
        violations + written.iter().filter(|w| w.is_none()).count()
    }
}

fn check_diagonal(a: &CsrMatrix, kind: TriangleKind) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare { n_rows: a.n_rows(), n_cols: a.n_cols() });
    }
    match kind {
        TriangleKind::Lower => a.check_lower_triangular()?,
        TriangleKind::Upper => a.check_upper_triangular()?,
    }
    for i in 0..a.n_rows() {
        match a.get(i, i) {
            Some(d) if d != 0.0 => {}
            _ => return Err(Error::MissingDiagonal { row: i }),
        }
    }
    Ok(())
}

/// Row-by-row forward substitution in ascending row order.
pub fn serial_forward_solve(l: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    check_diagonal(l, TriangleKind::Lower)?;
    if b.len() != l.n_rows() {
        return Err(Error::DimensionMismatch { expected: l.n_rows(), found: b.len() });
    }
    let mut x = vec![0.0; b.len()];
    for i in 0..b.len() {
        let (cols, vals) = l.row(i);
        let mut sum = b[i];
        let mut diag = 0.0;
        for (&c, &v) in cols.iter().zip(vals) {
            if c == i {
                diag = v;
            } else {
                sum -= v * x[c];
            }
        }
        x[i] = sum / diag;
    }
    Ok(x)
}

/// Row-by-row backward substitution in descending row order.
pub fn serial_backward_solve(u: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    check_diagonal(u, TriangleKind::Upper)?;
    if b.len() != u.n_rows() {
        return Err(Error::DimensionMismatch { expected: u.n_rows(), found: b.len() });
    }
    let mut x = vec![0.0; b.len()];
    for i in (0..b.len()).rev() {
        let (cols, vals) = u.row(i);
        let mut sum = b[i];
        let mut diag = 0.0;
        for (&c, &v) in cols.iter().zip(vals) {
            if c == i {
                diag = v;
            } else {
                sum -= v * x[c];
            }
        }
        x[i] = sum / diag;
    }
    Ok(x)
}

/// A prepared `L U` pair: `apply(r)` solves `L y = r`, then `U z = y`.
#[derive(Debug, Clone)]
pub struct LuSolver {
    lower: PreparedTriangular,
    upper: PreparedTriangular,
}

impl LuSolver {
    pub fn new(l: &CsrMatrix, u: &CsrMatrix, width: WidthPolicy) -> Result<Self> {
        Ok(Self {
            lower: PreparedTriangular::lower(l, width)?,
            upper: PreparedTriangular::upper(u, width)?,
        })
    }

    pub fn lower(&self) -> &PreparedTriangular {
        &self.lower
    }

    pub fn upper(&self) -> &PreparedTriangular {
        &self.upper
    }

    pub fn n(&self) -> usize {
        self.lower.n()
    }

    pub fn apply(&self, r: &[f64], workers: usize) -> Result<Vec<f64>> {
        let y = self.lower.solve(r, workers)?;
        self.upper.solve(&y, workers)
    }
}
