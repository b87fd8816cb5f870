//! Sparse storage: canonical CSR, column-major ELL, and the hybrid ELL+CSR
//! (HEC) layout used by the triangular solver.
//!
//! All types are immutable once built. Indexing is 0-based everywhere.

use crate::error::{Error, Result};
use crate::par;

/// Compressed sparse row matrix with strictly ascending columns in every row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a canonical CSR matrix from `(row, col, value)` triples in any
    /// order. Duplicate coordinates are rejected rather than summed.
    pub fn from_triples(n_rows: usize, n_cols: usize, triples: &[(usize, usize, f64)]) -> Result<Self> {
        for &(row, col, _) in triples {
            if row >= n_rows || col >= n_cols {
                return Err(Error::IndexOutOfRange { row, col, n_rows, n_cols });
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triples.to_vec();
        sorted.sort_unstable_by_key(|&(r, c, _)| (r, c));
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::DuplicateEntry { row: w[0].0, col: w[0].1 });
            }
        }

        let mut row_offsets = vec![0usize; n_rows + 1];
        for &(r, _, _) in &sorted {
            row_offsets[r + 1] += 1;
        }
        for i in 0..n_rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        let col_indices = sorted.iter().map(|t| t.1).collect();
        let values = sorted.iter().map(|t| t.2).collect();
        Ok(Self { n_rows, n_cols, row_offsets, col_indices, values })
    }

    /// Wraps raw CSR arrays after checking every structural invariant.
    pub fn from_parts(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1 {
            return Err(Error::MalformedCsr(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                n_rows + 1
            )));
        }
        if row_offsets[0] != 0 {
            return Err(Error::MalformedCsr("row_offsets[0] must be 0".into()));
        }
        if col_indices.len() != values.len() || row_offsets[n_rows] != col_indices.len() {
            return Err(Error::MalformedCsr(format!(
                "nnz mismatch: offsets end at {}, {} columns, {} values",
                row_offsets[n_rows],
                col_indices.len(),
                values.len()
            )));
        }
        for i in 0..n_rows {
            let (start, end) = (row_offsets[i], row_offsets[i + 1]);
            if start > end {
                return Err(Error::MalformedCsr(format!("row_offsets decreases at row {i}")));
            }
            let cols = &col_indices[start..end];
            for (k, &c) in cols.iter().enumerate() {
                if c >= n_cols {
                    return Err(Error::IndexOutOfRange { row: i, col: c, n_rows, n_cols });
                }
                if k > 0 && cols[k - 1] >= c {
                    if cols[k - 1] == c {
                        return Err(Error::DuplicateEntry { row: i, col: c });
                    }
                    return Err(Error::MalformedCsr(format!("row {i} is not sorted by column")));
                }
            }
        }
        Ok(Self { n_rows, n_cols, row_offsets, col_indices, values })
    }

    pub(crate) fn from_parts_unchecked(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(row_offsets.len(), n_rows + 1);
        debug_assert_eq!(col_indices.len(), values.len());
        Self { n_rows, n_cols, row_offsets, col_indices, values }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[s..e], &self.values[s..e])
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_offsets[i + 1] - self.row_offsets[i]
    }

    /// Stored value at `(i, j)`, if the entry is part of the pattern.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|k| vals[k])
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn to_triples(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            out.extend(cols.iter().zip(vals).map(|(&c, &v)| (i, c, v)));
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let row_offsets = counts.clone();
        let mut next = counts;
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let dst = next[c];
                col_indices[dst] = i;
                values[dst] = v;
                next[c] += 1;
            }
        }
        Self::from_parts_unchecked(self.n_cols, self.n_rows, row_offsets, col_indices, values)
    }

    /// Fails with the first entry above the diagonal, if any.
    pub fn check_lower_triangular(&self) -> Result<()> {
        for i in 0..self.n_rows {
            let (cols, _) = self.row(i);
            if let Some(&c) = cols.last() {
                if c > i {
                    return Err(Error::NotTriangular { row: i, col: c, expected: "lower" });
                }
            }
        }
        Ok(())
    }

    /// Fails with the first entry below the diagonal, if any.
    pub fn check_upper_triangular(&self) -> Result<()> {
        for i in 0..self.n_rows {
            let (cols, _) = self.row(i);
            if let Some(&c) = cols.first() {
                if c < i {
                    return Err(Error::NotTriangular { row: i, col: c, expected: "upper" });
                }
            }
        }
        Ok(())
    }

    /// `y = A x`, accumulating each row in ascending column order.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n_rows];
        self.spmv_into(x, &mut y, 1)?;
        Ok(y)
    }

    /// Row-parallel `y = A x`. Rows are split into contiguous chunks, one per
    /// worker; the result does not depend on `workers`.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64], workers: usize) -> Result<()> {
        if x.len() != self.n_cols {
            return Err(Error::DimensionMismatch { expected: self.n_cols, found: x.len() });
        }
        if y.len() != self.n_rows {
            return Err(Error::DimensionMismatch { expected: self.n_rows, found: y.len() });
        }
        par::for_each_chunk(y, workers, |start, out| {
            for (k, yi) in out.iter_mut().enumerate() {
                let (cols, vals) = self.row(start + k);
                let mut sum = 0.0;
                for (&c, &v) in cols.iter().zip(vals) {
                    sum += v * x[c];
                }
                *yi = sum;
            }
        });
        Ok(())
    }
}

/// How wide the ELL block of a HEC matrix is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WidthPolicy {
    Fixed(usize),
    /// Median over rows of the number of entries eligible for the ELL block.
    #[default]
    Auto,
}

impl WidthPolicy {
    fn resolve(self, eligible: &[usize], max_eligible: usize) -> usize {
        match self {
            WidthPolicy::Fixed(w) => w,
            WidthPolicy::Auto => {
                if eligible.is_empty() {
                    return 0;
                }
                let mut sorted = eligible.to_vec();
                sorted.sort_unstable();
                // lower median
                sorted[(sorted.len() - 1) / 2].min(max_eligible)
            }
        }
    }
}

/// Fixed-width ELLPACK block stored column-major: slot `k` of row `i` lives
/// at `k * n_rows + i`.
///
/// Padding slots hold value `0.0` and the row's own index as column.
#[derive(Debug, Clone, PartialEq)]
pub struct EllMatrix {
    n_rows: usize,
    width: usize,
    row_lens: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl EllMatrix {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of non-padding slots in each row.
    pub fn row_lens(&self) -> &[usize] {
        &self.row_lens
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn slot(&self, row: usize, k: usize) -> (usize, f64) {
        let idx = k * self.n_rows + row;
        (self.col_indices[idx], self.values[idx])
    }
}

/// Hybrid ELL + CSR matrix. Logical row `i` is the ELL row followed by the
/// CSR row; together they are strictly ascending in column.
#[derive(Debug, Clone, PartialEq)]
pub struct HecMatrix {
    ell: EllMatrix,
    csr: CsrMatrix,
    n_rows: usize,
    n_cols: usize,
}

impl HecMatrix {
    /// Splits `a` into an ELL block holding the leading entries of each row
    /// and a CSR block holding the rest.
    ///
    /// With `triangular` set, `a` must be lower triangular with a nonzero
    /// diagonal as the last entry of every row; the diagonal is kept out of
    /// the ELL block so every CSR row ends with it.
    pub fn from_csr(a: &CsrMatrix, triangular: bool, policy: WidthPolicy) -> Result<Self> {
        let n = a.n_rows();
        let reserved = usize::from(triangular);
        if triangular {
            if !a.is_square() {
                return Err(Error::NotSquare { n_rows: a.n_rows(), n_cols: a.n_cols() });
            }
            a.check_lower_triangular()?;
            for i in 0..n {
                let (cols, vals) = a.row(i);
                match (cols.last(), vals.last()) {
                    (Some(&c), Some(&v)) if c == i && v != 0.0 => {}
                    _ => return Err(Error::MissingDiagonal { row: i }),
                }
            }
        }

        let eligible: Vec<usize> = (0..n).map(|i| a.row_nnz(i) - reserved).collect();
        let max_eligible = eligible.iter().copied().max().unwrap_or(0);
        let width = policy.resolve(&eligible, max_eligible);

        let mut row_lens = vec![0usize; n];
        let mut ell_cols = vec![0usize; width * n];
        let mut ell_vals = vec![0.0; width * n];
        for k in 0..width {
            for i in 0..n {
                ell_cols[k * n + i] = i;
            }
        }
        let mut csr_offsets = Vec::with_capacity(n + 1);
        csr_offsets.push(0);
        let mut csr_cols = Vec::new();
        let mut csr_vals = Vec::new();
        for i in 0..n {
            let (cols, vals) = a.row(i);
            let in_ell = width.min(eligible[i]);
            row_lens[i] = in_ell;
            for k in 0..in_ell {
                ell_cols[k * n + i] = cols[k];
                ell_vals[k * n + i] = vals[k];
            }
            csr_cols.extend_from_slice(&cols[in_ell..]);
            csr_vals.extend_from_slice(&vals[in_ell..]);
            csr_offsets.push(csr_cols.len());
        }

        Ok(Self {
            ell: EllMatrix { n_rows: n, width, row_lens, col_indices: ell_cols, values: ell_vals },
            csr: CsrMatrix::from_parts_unchecked(n, a.n_cols(), csr_offsets, csr_cols, csr_vals),
            n_rows: n,
            n_cols: a.n_cols(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn ell(&self) -> &EllMatrix {
        &self.ell
    }

    pub fn csr(&self) -> &CsrMatrix {
        &self.csr
    }

    pub fn nnz(&self) -> usize {
        self.ell.row_lens.iter().sum::<usize>() + self.csr.nnz()
    }

    /// Logical entries of row `i`, ELL part first.
    pub fn row_entries(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (cols, vals) = self.csr.row(i);
        (0..self.ell.row_lens[i])
            .map(move |k| self.ell.slot(i, k))
            .chain(cols.iter().copied().zip(vals.iter().copied()))
    }

    pub fn to_triples(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n_rows)
            .flat_map(|i| self.row_entries(i).map(move |(c, v)| (i, c, v)))
            .collect()
    }

    pub fn to_csr(&self) -> CsrMatrix {
        let mut offsets = Vec::with_capacity(self.n_rows + 1);
        offsets.push(0);
        let mut cols = Vec::with_capacity(self.nnz());
        let mut vals = Vec::with_capacity(self.nnz());
        for i in 0..self.n_rows {
            for (c, v) in self.row_entries(i) {
                cols.push(c);
                vals.push(v);
            }
            offsets.push(cols.len());
        }
        CsrMatrix::from_parts_unchecked(self.n_rows, self.n_cols, offsets, cols, vals)
    }

    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n_rows];
        self.spmv_into(x, &mut y, 1)?;
        Ok(y)
    }

    /// Same accumulation order as [`CsrMatrix::spmv_into`] on the source
    /// matrix, so results agree bitwise.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64], workers: usize) -> Result<()> {
        if x.len() != self.n_cols {
            return Err(Error::DimensionMismatch { expected: self.n_cols, found: x.len() });
        }
        if y.len() != self.n_rows {
            return Err(Error::DimensionMismatch { expected: self.n_rows, found: y.len() });
        }
        par::for_each_chunk(y, workers, |start, out| {
            for (k, yi) in out.iter_mut().enumerate() {
                let mut sum = 0.0;
                for (c, v) in self.row_entries(start + k) {
                    sum += v * x[c];
                }
                *yi = sum;
            }
        });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triples_identity() {
        let a = CsrMatrix::from_triples(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert_eq!(a.row_offsets(), &[0, 1, 2]);
        assert_eq!(a, CsrMatrix::identity(2));
    }

    #[test]
    fn triples_are_sorted() {
        let a = CsrMatrix::from_triples(2, 2, &[(1, 0, 3.0), (0, 0, 2.0), (1, 1, 4.0)]).unwrap();
        assert_eq!(a.row(0), (&[0usize][..], &[2.0][..]));
        assert_eq!(a.row(1), (&[0usize, 1][..], &[3.0, 4.0][..]));
    }

    #[test]
    fn triples_errors() {
        assert!(matches!(
            CsrMatrix::from_triples(2, 2, &[(0, 5, 1.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert_eq!(
            CsrMatrix::from_triples(2, 2, &[(0, 1, 1.0), (0, 1, 2.0)]),
            Err(Error::DuplicateEntry { row: 0, col: 1 })
        );
    }

    #[test]
    fn from_parts_rejects_unsorted() {
        assert!(CsrMatrix::from_parts(1, 3, vec![0, 2], vec![2, 1], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::from_parts(1, 3, vec![1, 2], vec![2], vec![1.0]).is_err());
    }

    #[test]
    fn hec_identity_has_empty_ell() {
        let h = HecMatrix::from_csr(&CsrMatrix::identity(3), true, WidthPolicy::Auto).unwrap();
        assert_eq!(h.ell().width(), 0);
        assert_eq!(h.csr().nnz(), 3);
        let h = HecMatrix::from_csr(&CsrMatrix::identity(3), true, WidthPolicy::Fixed(4)).unwrap();
        assert_eq!(h.ell().width(), 4);
        assert_eq!(h.ell().row_lens(), &[0, 0, 0]);
        assert_eq!(h.csr().nnz(), 3);
    }

    #[test]
    fn hec_bidiagonal_fixed_one() {
        let l = CsrMatrix::from_triples(
            3,
            3,
            &[(0, 0, 1.0), (1, 0, 1.0), (1, 1, 1.0), (2, 1, 1.0), (2, 2, 1.0)],
        )
        .unwrap();
        let h = HecMatrix::from_csr(&l, true, WidthPolicy::Fixed(1)).unwrap();
        let ell = h.ell();
        assert_eq!(ell.width(), 1);
        assert_eq!(ell.row_lens(), &[0, 1, 1]);
        // row 0 padded with its own index and zero
        assert_eq!(ell.slot(0, 0), (0, 0.0));
        assert_eq!(ell.slot(1, 0), (0, 1.0));
        assert_eq!(ell.slot(2, 0), (1, 1.0));
        for i in 0..3 {
            assert_eq!(h.csr().row(i).0, &[i]);
        }
    }

    #[test]
    fn hec_general_mode_allows_empty_csr_rows() {
        let a = CsrMatrix::from_triples(2, 2, &[(0, 0, 1.0), (1, 0, 2.0), (1, 1, 3.0)]).unwrap();
        let h = HecMatrix::from_csr(&a, false, WidthPolicy::Fixed(2)).unwrap();
        assert_eq!(h.csr().nnz(), 0);
        assert_eq!(h.ell().row_lens(), &[1, 2]);
        assert_eq!(h.to_csr(), a);
    }

    #[test]
    fn hec_missing_diagonal() {
        let a = CsrMatrix::from_triples(2, 2, &[(0, 0, 1.0), (1, 0, 2.0)]).unwrap();
        assert_eq!(
            HecMatrix::from_csr(&a, true, WidthPolicy::Auto),
            Err(Error::MissingDiagonal { row: 1 })
        );
        let z = CsrMatrix::from_triples(2, 2, &[(0, 0, 1.0), (1, 1, 0.0)]).unwrap();
        assert!(HecMatrix::from_csr(&z, true, WidthPolicy::Auto).is_err());
        let up = CsrMatrix::from_triples(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)]).unwrap();
        assert!(matches!(
            HecMatrix::from_csr(&up, true, WidthPolicy::Auto),
            Err(Error::NotTriangular { .. })
        ));
    }

    #[test]
    fn auto_width_is_lower_median() {
        // eligible counts 0,1,2,3 -> lower median 1
        let mut t = Vec::new();
        for i in 0..4 {
            for j in 0..=i {
                t.push((i, j, 1.0));
            }
        }
        let l = CsrMatrix::from_triples(4, 4, &t).unwrap();
        let h = HecMatrix::from_csr(&l, true, WidthPolicy::Auto).unwrap();
        assert_eq!(h.ell().width(), 1);
    }

    #[test]
    fn spmv_small() {
        let a = CsrMatrix::from_triples(2, 2, &[(0, 0, 2.0), (1, 0, 1.0), (1, 1, 4.0)]).unwrap();
        assert_eq!(a.spmv(&[1.0, 1.0]).unwrap(), vec![2.0, 5.0]);
        assert_eq!(CsrMatrix::identity(2).spmv(&[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
        assert_eq!(a.spmv(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(a.spmv(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn spmv_hec_padding_is_inert() {
        let z = CsrMatrix::zeros(3, 3);
        let h = HecMatrix::from_csr(&z, false, WidthPolicy::Fixed(2)).unwrap();
        assert_eq!(h.ell().width(), 2);
        assert!(h.ell().values().iter().all(|&v| v == 0.0));
        assert_eq!(h.spmv(&[1.0, -2.0, 3.0]).unwrap(), vec![0.0; 3]);

        let a = CsrMatrix::from_triples(3, 3, &[(0, 0, 1.0), (0, 2, 1.0), (2, 1, 5.0)]).unwrap();
        let h = HecMatrix::from_csr(&a, false, WidthPolicy::Fixed(2)).unwrap();
        assert_eq!(h.ell().width(), 2);
        for k in 0..2 {
            let (c, v) = h.ell().slot(1, k);
            assert_eq!((c, v), (1, 0.0));
        }
        let x = [f64::NAN, 2.0, 3.0];
        let y = h.spmv(&[1.0, f64::INFINITY, 3.0]).unwrap();
        assert_eq!(y[1], 0.0);
        assert!(h.spmv(&x).unwrap()[1] == 0.0);
    }

    #[test]
    fn transpose_roundtrip() {
        let a = CsrMatrix::from_triples(2, 3, &[(0, 2, 1.0), (1, 0, 2.0), (1, 2, 3.0)]).unwrap();
        let t = a.transpose();
        assert_eq!(t.n_rows(), 3);
        assert_eq!(t.get(2, 1), Some(3.0));
        assert_eq!(t.transpose(), a);
    }
}
