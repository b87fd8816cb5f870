//! Incomplete LU factorizations: ILU(0), level-of-fill ILU(k), and the
//! dual-threshold ILUT(p, tol). None of them pivot; a zero pivot is an error.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::error::{Error, Result};
use crate::formats::{CsrMatrix, WidthPolicy};
use crate::trisolve::LuSolver;

/// `L` has an explicit unit diagonal; `U` holds the pivots.
#[derive(Debug, Clone, PartialEq)]
pub struct IluFactors {
    pub l: CsrMatrix,
    pub u: CsrMatrix,
}

impl IluFactors {
    pub fn n(&self) -> usize {
        self.l.n_rows()
    }

    /// Prepares both factors for level-parallel solves.
    pub fn solver(&self, width: WidthPolicy) -> Result<LuSolver> {
        LuSolver::new(&self.l, &self.u, width)
    }
}

fn check_square(a: &CsrMatrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare { n_rows: a.n_rows(), n_cols: a.n_cols() })
    }
}

/// ILU(0): Gaussian elimination (IKJ order) restricted to the pattern of `a`.
pub fn ilu0(a: &CsrMatrix) -> Result<IluFactors> {
    check_square(a)?;
    factor_on_pattern(a)
}

/// ILU(k). Original entries have fill level 0; an update through pivot `p`
/// creates level `lev(i,p) + lev(p,j) + 1`, and entries above `k` are never
/// formed. The numeric phase is exactly ILU(0) on the enlarged pattern.
pub fn ilu_k(a: &CsrMatrix, k: usize) -> Result<IluFactors> {
    check_square(a)?;
    let n = a.n_rows();
    // (col, level) of the strictly upper part of each processed row
    let mut upper_levels: Vec<Vec<(usize, usize)>> = Vec::with_capacity(n);
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let mut cols = Vec::with_capacity(a.nnz());
    let mut vals = Vec::with_capacity(a.nnz());

    for i in 0..n {
        let (acols, avals) = a.row(i);
        let mut row: BTreeMap<usize, usize> = acols.iter().map(|&c| (c, 0)).collect();
        let mut cursor = 0;
        while let Some((&p, &lev_ip)) = row.range(cursor..).next() {
            if p >= i {
                break;
            }
            for &(j, lev_pj) in &upper_levels[p] {
                let lev = lev_ip + lev_pj + 1;
                if lev <= k {
                    row.entry(j).and_modify(|l| *l = (*l).min(lev)).or_insert(lev);
                }
            }
            cursor = p + 1;
        }

        upper_levels.push(row.range(i + 1..).map(|(&c, &l)| (c, l)).collect());
        let mut ak = 0;
        for &c in row.keys() {
            cols.push(c);
            if ak < acols.len() && acols[ak] == c {
                vals.push(avals[ak]);
                ak += 1;
            } else {
                vals.push(0.0);
            }
        }
        offsets.push(cols.len());
    }
    let pattern = CsrMatrix::from_parts_unchecked(n, n, offsets, cols, vals);
    factor_on_pattern(&pattern)
}

fn factor_on_pattern(a: &CsrMatrix) -> Result<IluFactors> {
    let n = a.n_rows();
    let offsets = a.row_offsets();
    let cols = a.col_indices();
    let mut lu = a.values().to_vec();

    let mut diag = vec![0usize; n];
    for i in 0..n {
        let (rc, _) = a.row(i);
        match rc.binary_search(&i) {
            Ok(k) => diag[i] = offsets[i] + k,
            Err(_) => return Err(Error::ZeroPivot { row: i }),
        }
    }

    let mut pos = vec![usize::MAX; n];
    for i in 0..n {
        let (start, end) = (offsets[i], offsets[i + 1]);
        for kk in start..end {
            pos[cols[kk]] = kk;
        }
        for kk in start..diag[i] {
            let p = cols[kk];
            let m = lu[kk] / lu[diag[p]];
            lu[kk] = m;
            for jj in diag[p] + 1..offsets[p + 1] {
                let slot = pos[cols[jj]];
                if slot != usize::MAX {
                    lu[slot] -= m * lu[jj];
                }
            }
        }
        for kk in start..end {
            pos[cols[kk]] = usize::MAX;
        }
        if lu[diag[i]] == 0.0 || !lu[diag[i]].is_finite() {
            return Err(Error::ZeroPivot { row: i });
        }
    }

    let mut l_off = vec![0];
    let mut l_cols = Vec::new();
    let mut l_vals = Vec::new();
    let mut u_off = vec![0];
    let mut u_cols = Vec::new();
    let mut u_vals = Vec::new();
    for i in 0..n {
        for kk in offsets[i]..diag[i] {
            l_cols.push(cols[kk]);
            l_vals.push(lu[kk]);
        }
        l_cols.push(i);
        l_vals.push(1.0);
        l_off.push(l_cols.len());
        for kk in diag[i]..offsets[i + 1] {
            u_cols.push(cols[kk]);
            u_vals.push(lu[kk]);
        }
        u_off.push(u_cols.len());
    }
    Ok(IluFactors {
        l: CsrMatrix::from_parts_unchecked(n, n, l_off, l_cols, l_vals),
        u: CsrMatrix::from_parts_unchecked(n, n, u_off, u_cols, u_vals),
    })
}

/// ILUT(p, tol).
///
/// Row `i` is eliminated in a dense work row. Any multiplier or final entry
/// with magnitude below `tol * ||a_i||_2` is dropped, then at most `p`
/// largest-magnitude entries are kept in each of the L and U parts. The
/// diagonal is always kept.
pub fn ilut(a: &CsrMatrix, p: usize, tol: f64) -> Result<IluFactors> {
    check_square(a)?;
    if p == 0 {
        return Err(Error::InvalidArgument("ILUT fill bound p must be at least 1".into()));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidArgument(format!("ILUT tolerance must be >= 0, got {tol}")));
    }
    let n = a.n_rows();
    let mut l_off = vec![0];
    let mut l_cols = Vec::new();
    let mut l_vals = Vec::new();
    let mut u_off = vec![0];
    let mut u_cols: Vec<usize> = Vec::new();
    let mut u_vals: Vec<f64> = Vec::new();

    let mut w = vec![0.0; n];
    let mut present = vec![false; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut pending: BinaryHeap<Reverse<usize>> = BinaryHeap::new();

    for i in 0..n {
        let (acols, avals) = a.row(i);
        let tau = tol * avals.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (&c, &v) in acols.iter().zip(avals) {
            w[c] = v;
            present[c] = true;
            touched.push(c);
            if c < i {
                pending.push(Reverse(c));
            }
        }

        let mut lower: Vec<(usize, f64)> = Vec::new();
        while let Some(Reverse(k)) = pending.pop() {
            let diag_pos = u_off[k];
            let m = w[k] / u_vals[diag_pos];
            w[k] = 0.0;
            if m.abs() < tau {
                continue;
            }
            lower.push((k, m));
            for jj in diag_pos + 1..u_off[k + 1] {
                let j = u_cols[jj];
                if !present[j] {
                    present[j] = true;
                    touched.push(j);
                    w[j] = 0.0;
                    if j < i {
                        pending.push(Reverse(j));
                    }
                }
                w[j] -= m * u_vals[jj];
            }
        }

        let pivot = if present[i] { w[i] } else { 0.0 };
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::ZeroPivot { row: i });
        }
        let mut upper: Vec<(usize, f64)> = touched
            .iter()
            .filter(|&&c| c > i)
            .map(|&c| (c, w[c]))
            .filter(|&(_, v)| v.abs() >= tau)
            .collect();

        keep_largest(&mut lower, p);
        keep_largest(&mut upper, p);

        for (c, v) in lower {
            l_cols.push(c);
            l_vals.push(v);
        }
        l_cols.push(i);
        l_vals.push(1.0);
        l_off.push(l_cols.len());

        u_cols.push(i);
        u_vals.push(pivot);
        for (c, v) in upper {
            u_cols.push(c);
            u_vals.push(v);
        }
        u_off.push(u_cols.len());

        for &c in &touched {
            w[c] = 0.0;
            present[c] = false;
        }
        touched.clear();
    }
    Ok(IluFactors {
        l: CsrMatrix::from_parts_unchecked(n, n, l_off, l_cols, l_vals),
        u: CsrMatrix::from_parts_unchecked(n, n, u_off, u_cols, u_vals),
    })
}

/// Keeps the `p` largest-magnitude entries (ties go to the lower column),
/// returned in ascending column order.
fn keep_largest(entries: &mut Vec<(usize, f64)>, p: usize) {
    if entries.len() > p {
        entries.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
        entries.truncate(p);
    }
    entries.sort_unstable_by_key(|e| e.0);
}
