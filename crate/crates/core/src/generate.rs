use crate::error::{Error, Result};
use crate::formats::CsrMatrix;

/// 7-point finite-difference Laplacian on an `nx x ny x nz` grid with
/// Dirichlet truncation: 6 on the diagonal, -1 for each existing axis
/// neighbor. Unknown `(i, j, k)` has index `i + nx * (j + ny * k)`.
pub fn poisson7(nx: usize, ny: usize, nz: usize) -> Result<CsrMatrix> {
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(Error::InvalidArgument(format!("grid {nx}x{ny}x{nz} has an empty axis")));
    }
    let n = nx
        .checked_mul(ny)
        .and_then(|v| v.checked_mul(nz))
        .filter(|&n| n.checked_mul(7).is_some())
        .ok_or_else(|| Error::InvalidArgument(format!("grid {nx}x{ny}x{nz} overflows the index range")))?;
    let nnz = poisson7_nnz(nx, ny, nz);
    let (sx, sy) = (nx, nx * ny);

    let mut offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(nnz);
    let mut vals = Vec::with_capacity(nnz);
    offsets.push(0);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let row = i + sx * j + sy * k;
                if k > 0 {
                    cols.push(row - sy);
                    vals.push(-1.0);
                }
                if j > 0 {
                    cols.push(row - sx);
                    vals.push(-1.0);
                }
                if i > 0 {
                    cols.push(row - 1);
                    vals.push(-1.0);
                }
                cols.push(row);
                vals.push(6.0);
                if i + 1 < nx {
                    cols.push(row + 1);
                    vals.push(-1.0);
                }
                if j + 1 < ny {
                    cols.push(row + sx);
                    vals.push(-1.0);
                }
                if k + 1 < nz {
                    cols.push(row + sy);
                    vals.push(-1.0);
                }
                offsets.push(cols.len());
            }
        }
    }
    debug_assert_eq!(cols.len(), nnz);
    Ok(CsrMatrix::from_parts_unchecked(n, n, offsets, cols, vals))
}

/// Closed form `7n - 2(nx ny + ny nz + nx nz)`.
pub fn poisson7_nnz(nx: usize, ny: usize, nz: usize) -> usize {
    7 * nx * ny * nz - 2 * (nx * ny + ny * nz + nx * nz)
}
