#![allow(dead_code)]

use hecsolve::CsrMatrix;
use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::Rng;

/// Random lower-triangular matrix: row `i` gets `round(density * i)`
/// distinct strict-lower entries in [-1, 1] and a diagonal that dominates
/// the row, with random sign.
pub fn random_lower(rng: &mut StdRng, n: usize, density: f64) -> CsrMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        let k = ((density * i as f64).round() as usize).min(i);
        let mut off = 0.0;
        if k > 0 {
            for j in sample(rng, i, k).into_iter() {
                let v: f64 = rng.gen_range(-1.0..1.0);
                off += v.abs();
                t.push((i, j, v));
            }
        }
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        t.push((i, i, sign * (1.0 + off + rng.gen_range(0.0..1.0))));
    }
    CsrMatrix::from_triples(n, n, &t).unwrap()
}

pub fn random_upper(rng: &mut StdRng, n: usize, density: f64) -> CsrMatrix {
    // transpose of a lower matrix has the same row-dominance only in columns,
    // so rebuild per row instead
    let mut t = Vec::new();
    for i in 0..n {
        let avail = n - 1 - i;
        let k = ((density * avail as f64).round() as usize).min(avail);
        let mut off = 0.0;
        if k > 0 {
            for j in sample(rng, avail, k).into_iter() {
                let v: f64 = rng.gen_range(-1.0..1.0);
                off += v.abs();
                t.push((i, i + 1 + j, v));
            }
        }
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        t.push((i, i, sign * (1.0 + off + rng.gen_range(0.0..1.0))));
    }
    CsrMatrix::from_triples(n, n, &t).unwrap()
}

/// Random square matrix with off-diagonal density `density` and a strictly
/// dominant positive diagonal.
pub fn random_diag_dominant(rng: &mut StdRng, n: usize, density: f64) -> CsrMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        let mut off = 0.0;
        for j in 0..n {
            if j != i && rng.gen_bool(density) {
                let v: f64 = rng.gen_range(-1.0..1.0);
                off += v.abs();
                t.push((i, j, v));
            }
        }
        t.push((i, i, 1.0 + off + rng.gen_range(0.0..1.0)));
    }
    CsrMatrix::from_triples(n, n, &t).unwrap()
}

pub fn dense_pattern_matrix(rng: &mut StdRng, n: usize) -> CsrMatrix {
    random_diag_dominant(rng, n, 1.0)
}

pub fn random_vec(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn to_dense(a: &CsrMatrix) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; a.n_cols()]; a.n_rows()];
    for (i, j, v) in a.to_triples() {
        d[i][j] = v;
    }
    d
}

/// Doolittle LU without pivoting on a dense copy; returns (L, U).
pub fn dense_lu(a: &CsrMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = a.n_rows();
    let mut m = to_dense(a);
    for k in 0..n {
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            m[i][k] = f;
            let (top, bottom) = m.split_at_mut(i);
            for (dst, src) in bottom[0][k + 1..].iter_mut().zip(&top[k][k + 1..]) {
                *dst -= f * src;
            }
        }
    }
    let mut l = vec![vec![0.0; n]; n];
    let mut u = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if j < i {
                l[i][j] = m[i][j];
            } else {
                u[i][j] = m[i][j];
            }
        }
        l[i][i] = 1.0;
    }
    (l, u)
}

pub fn dense_matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b[0].len();
    let mut c = vec![vec![0.0; m]; n];
    for i in 0..n {
        for k in 0..b.len() {
            if a[i][k] != 0.0 {
                for j in 0..m {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

pub fn rel_inf_err(x: &[f64], reference: &[f64]) -> f64 {
    let num = x.iter().zip(reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let den = reference.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

pub fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

pub fn tridiag(n: usize) -> CsrMatrix {
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

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn residual_norm(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.spmv(x).unwrap();
    norm2(&ax.iter().zip(b).map(|(p, q)| q - p).collect::<Vec<_>>())
}
