//! Level scheduling of lower-triangular systems.
//!
//! Row `i` depends on every row `j < i` with a stored entry `L[i, j]`. Its
//! level is one more than the deepest level it depends on, so rows sharing
//! a level can be solved concurrently once all earlier levels are done.
//! Rows are then renumbered level by level, keeping ascending original
//! order inside a level, which makes each level a contiguous row block.

use crate::error::{Error, Result};
use crate::formats::CsrMatrix;

/// Level of every row of `l` (1-based: independent rows are level 1).
///
/// Only the sparsity pattern matters; the diagonal is not a dependency.
pub fn compute_levels(l: &CsrMatrix) -> Result<Vec<usize>> {
    if !l.is_square() {
        return Err(Error::NotSquare { n_rows: l.n_rows(), n_cols: l.n_cols() });
    }
    l.check_lower_triangular()?;
    let n = l.n_rows();
    let mut levels = vec![0usize; n];
    for i in 0..n {
        let (cols, _) = l.row(i);
        let deepest = cols
            .iter()
            .take_while(|&&c| c < i)
            .map(|&c| levels[c])
            .max()
            .unwrap_or(0);
        levels[i] = deepest + 1;
    }
    Ok(levels)
}

/// Level-order renumbering of the unknowns of a triangular system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSchedule {
    level_of: Vec<usize>,
    perm: Vec<usize>,
    inv_perm: Vec<usize>,
    level_starts: Vec<usize>,
}

impl LevelSchedule {
    /// Builds the schedule from per-row levels, which must cover `1..=nlev`
    /// without gaps.
    pub fn from_levels(levels: &[usize]) -> Result<Self> {
        let n = levels.len();
        let nlev = levels.iter().copied().max().unwrap_or(0);
        let mut counts = vec![0usize; nlev + 1];
        for &l in levels {
            if l == 0 {
                return Err(Error::LevelGap { missing: 0 });
            }
            counts[l] += 1;
        }
        if let Some(missing) = (1..=nlev).find(|&k| counts[k] == 0) {
            return Err(Error::LevelGap { missing });
        }

        // level_starts[k] = rows in levels 1..=k, i.e. start of 0-based level k
        let mut level_starts = vec![0usize; nlev + 1];
        for k in 0..nlev {
            level_starts[k + 1] = level_starts[k] + counts[k + 1];
        }
        let mut next = level_starts.clone();
        let mut perm = vec![0usize; n];
        let mut inv_perm = vec![0usize; n];
        for (i, &l) in levels.iter().enumerate() {
            let slot = next[l - 1];
            perm[i] = slot;
            inv_perm[slot] = i;
            next[l - 1] += 1;
        }
        Ok(Self { level_of: levels.to_vec(), perm, inv_perm, level_starts })
    }

    /// Convenience: `from_levels(compute_levels(l))`.
    pub fn for_matrix(l: &CsrMatrix) -> Result<Self> {
        Self::from_levels(&compute_levels(l)?)
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn nlev(&self) -> usize {
        self.level_starts.len() - 1
    }

    /// 1-based level of each original row.
    pub fn level_of(&self) -> &[usize] {
        &self.level_of
    }

    /// Original index to reordered index.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Reordered index to original index.
    pub fn inv_perm(&self) -> &[usize] {
        &self.inv_perm
    }

    /// Start row of each level in the reordered matrix, plus a final `n`.
    pub fn level_starts(&self) -> &[usize] {
        &self.level_starts
    }

    /// Reordered row range of 0-based level `k`.
    pub fn level_range(&self, k: usize) -> std::ops::Range<usize> {
        self.level_starts[k]..self.level_starts[k + 1]
    }

    /// Number of rows in each level.
    pub fn level_sizes(&self) -> Vec<usize> {
        self.level_starts.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Symmetric permutation `result[perm[i], perm[j]] = a[i, j]`, with every
/// output row re-sorted by column.
pub fn reorder_matrix(a: &CsrMatrix, perm: &[usize], inv_perm: &[usize]) -> Result<CsrMatrix> {
    let n = a.n_rows();
    if !a.is_square() {
        return Err(Error::NotSquare { n_rows: n, n_cols: a.n_cols() });
    }
    if perm.len() != n || inv_perm.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: perm.len() });
    }
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let mut cols = Vec::with_capacity(a.nnz());
    let mut vals = Vec::with_capacity(a.nnz());
    let mut scratch: Vec<(usize, f64)> = Vec::new();
    for &old in inv_perm {
        let (rc, rv) = a.row(old);
        scratch.clear();
        scratch.extend(rc.iter().zip(rv).map(|(&c, &v)| (perm[c], v)));
        scratch.sort_unstable_by_key(|e| e.0);
        for &(c, v) in &scratch {
            cols.push(c);
            vals.push(v);
        }
        offsets.push(cols.len());
    }
    Ok(CsrMatrix::from_parts_unchecked(n, n, offsets, cols, vals))
}

/// Reorders `l` by its schedule.
pub fn reorder_by_schedule(l: &CsrMatrix, s: &LevelSchedule) -> Result<CsrMatrix> {
    reorder_matrix(l, s.perm(), s.inv_perm())
}

/// Scatter: `out[perm[i]] = v[i]`.
pub fn permute_vector(v: &[f64], perm: &[usize]) -> Result<Vec<f64>> {
    if v.len() != perm.len() {
        return Err(Error::DimensionMismatch { expected: perm.len(), found: v.len() });
    }
    let mut out = vec![0.0; v.len()];
    for (i, &p) in perm.iter().enumerate() {
        out[p] = v[i];
    }
    Ok(out)
}

/// Gather, the inverse of [`permute_vector`]: `out[i] = v[perm[i]]`.
pub fn unpermute_vector(v: &[f64], perm: &[usize]) -> Result<Vec<f64>> {
    if v.len() != perm.len() {
        return Err(Error::DimensionMismatch { expected: perm.len(), found: v.len() });
    }
    Ok(perm.iter().map(|&p| v[p]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lower(n: usize, entries: &[(usize, usize)]) -> CsrMatrix {
        let mut t: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        t.extend(entries.iter().map(|&(i, j)| (i, j, 1.0)));
        CsrMatrix::from_triples(n, n, &t).unwrap()
    }

    #[test]
    fn levels_diagonal_and_bidiagonal() {
        assert_eq!(compute_levels(&CsrMatrix::identity(3)).unwrap(), vec![1, 1, 1]);
        assert_eq!(compute_levels(&lower(3, &[(1, 0), (2, 1)])).unwrap(), vec![1, 2, 3]);
        assert_eq!(compute_levels(&lower(3, &[(2, 0)])).unwrap(), vec![1, 1, 2]);
    }

    #[test]
    fn levels_reject_upper_entries() {
        let a = CsrMatrix::from_triples(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)]).unwrap();
        assert!(matches!(compute_levels(&a), Err(Error::NotTriangular { .. })));
    }

    #[test]
    fn schedule_examples() {
        let s = LevelSchedule::from_levels(&[1, 1, 2]).unwrap();
        assert_eq!(s.perm(), &[0, 1, 2]);
        assert_eq!(s.level_starts(), &[0, 2, 3]);

        let s = LevelSchedule::from_levels(&[1, 2, 1]).unwrap();
        assert_eq!(s.perm(), &[0, 2, 1]);
        assert_eq!(s.level_starts(), &[0, 2, 3]);
        assert_eq!(s.inv_perm(), &[0, 2, 1]);

        let s = LevelSchedule::from_levels(&[3, 2, 1]).unwrap();
        assert_eq!(s.perm(), &[2, 1, 0]);
        assert_eq!(s.level_starts(), &[0, 1, 2, 3]);
        assert_eq!(s.nlev(), 3);
    }

    #[test]
    fn schedule_rejects_gaps() {
        assert_eq!(LevelSchedule::from_levels(&[1, 3]), Err(Error::LevelGap { missing: 2 }));
        assert_eq!(LevelSchedule::from_levels(&[0, 1]), Err(Error::LevelGap { missing: 0 }));
        let empty = LevelSchedule::from_levels(&[]).unwrap();
        assert_eq!(empty.nlev(), 0);
        assert_eq!(empty.level_starts(), &[0]);
    }

    #[test]
    fn reorder_with_identity_schedule_is_noop() {
        let l = lower(3, &[(1, 0), (2, 1)]);
        let s = LevelSchedule::for_matrix(&l).unwrap();
        assert_eq!(s.perm(), &[0, 1, 2]);
        assert_eq!(reorder_by_schedule(&l, &s).unwrap(), l);
    }

    #[test]
    fn reorder_moves_entries() {
        // levels [1,2,1]: row 2 moves ahead of row 1
        let l = CsrMatrix::from_triples(
            3,
            3,
            &[(0, 0, 1.0), (1, 0, 2.0), (1, 1, 3.0), (2, 2, 4.0)],
        )
        .unwrap();
        let s = LevelSchedule::for_matrix(&l).unwrap();
        assert_eq!(s.perm(), &[0, 2, 1]);
        let r = reorder_by_schedule(&l, &s).unwrap();
        assert_eq!(r.get(1, 1), Some(4.0));
        assert_eq!(r.get(2, 0), Some(2.0));
        assert_eq!(r.get(2, 2), Some(3.0));
        r.check_lower_triangular().unwrap();
    }

    #[test]
    fn permute_examples() {
        assert_eq!(permute_vector(&[10.0, 20.0, 30.0], &[0, 2, 1]).unwrap(), vec![10.0, 30.0, 20.0]);
        assert_eq!(permute_vector(&[1.0, 2.0], &[0, 1]).unwrap(), vec![1.0, 2.0]);
        assert!(permute_vector(&[1.0], &[0, 1]).is_err());
        let p = [2, 0, 1];
        let v = [1.0, 2.0, 3.0];
        assert_eq!(unpermute_vector(&permute_vector(&v, &p).unwrap(), &p).unwrap(), v);
    }

    #[test]
    fn dense_lower_has_n_levels() {
        let mut e = Vec::new();
        for i in 0..5 {
            for j in 0..i {
                e.push((i, j));
            }
        }
        let s = LevelSchedule::for_matrix(&lower(5, &e)).unwrap();
        assert_eq!(s.nlev(), 5);
    }
}
