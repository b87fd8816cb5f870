//! Scoped-thread helpers shared by the row-parallel kernels.

use std::thread;

/// Splits `len` items into `workers` contiguous ranges of near-equal size.
pub(crate) fn chunk_bounds(len: usize, workers: usize, w: usize) -> (usize, usize) {
    let workers = workers.max(1);
    let base = len / workers;
    let extra = len % workers;
    let start = w * base + w.min(extra);
    let end = start + base + usize::from(w < extra);
    (start, end)
}

/// Runs `f(start, chunk)` over contiguous chunks of `out`, one per worker.
/// The calling thread handles the first chunk, so `workers == 1` spawns
/// nothing but executes the same closure.
pub(crate) fn for_each_chunk<F>(out: &mut [f64], workers: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    let workers = workers.max(1).min(out.len().max(1));
    let len = out.len();
    let mut chunks = Vec::with_capacity(workers);
    let mut rest = out;
    for w in 0..workers {
        let (s, e) = chunk_bounds(len, workers, w);
        let (head, tail) = rest.split_at_mut(e - s);
        chunks.push((s, head));
        rest = tail;
    }
    let mut iter = chunks.into_iter();
    let first = iter.next();
    thread::scope(|scope| {
        for (s, chunk) in iter {
            let f = &f;
            scope.spawn(move || f(s, chunk));
        }
        if let Some((s, chunk)) = first {
            f(s, chunk);
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_cover_range() {
        for len in [0, 1, 7, 64, 65] {
            for workers in [1, 2, 3, 8] {
                let mut next = 0;
                for w in 0..workers {
                    let (s, e) = chunk_bounds(len, workers, w);
                    assert_eq!(s, next);
                    assert!(e >= s);
                    next = e;
                }
                assert_eq!(next, len);
            }
        }
    }

    #[test]
    fn chunks_see_global_offsets() {
        let mut v = vec![0.0; 10];
        for_each_chunk(&mut v, 3, |start, c| {
            for (k, x) in c.iter_mut().enumerate() {
                *x = (start + k) as f64;
            }
        });
        assert_eq!(v, (0..10).map(|i| i as f64).collect::<Vec<_>>());
    }
}
