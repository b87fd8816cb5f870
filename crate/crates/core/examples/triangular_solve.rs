//! Level-parallel forward and backward solves, checked against plain substitution.
use hecsolve::{serial_backward_solve, serial_forward_solve, PreparedTriangular, WidthPolicy};

fn main() -> hecsolve::Result<()> {
    let a = hecsolve::generate::poisson7(16, 16, 16)?;
    let f = hecsolve::ilu0(&a)?;
    let b: Vec<f64> = (0..a.n_rows()).map(|i| (i % 7) as f64 - 3.0).collect();

    let lower = PreparedTriangular::lower(&f.l, WidthPolicy::Auto)?;
    let upper = PreparedTriangular::upper(&f.u, WidthPolicy::Auto)?;
    println!("lower: {} levels, upper: {} levels", lower.nlev(), upper.nlev());

    let y = lower.solve(&b, 4)?;
    let x = upper.solve(&y, 4)?;

    let y_ref = serial_forward_solve(&f.l, &b)?;
    let x_ref = serial_backward_solve(&f.u, &y_ref)?;
    let err = x.iter().zip(&x_ref).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    println!("max |x - x_serial| = {err:e}");

    // same bits for any worker count
    for w in [1, 2, 3] {
        let xw = upper.solve(&lower.solve(&b, w)?, w)?;
        assert!(xw.iter().zip(&x).all(|(p, q)| p.to_bits() == q.to_bits()));
    }
    assert_eq!(lower.level_violations(), 0);
    assert_eq!(upper.level_violations(), 0);
    println!("bitwise identical across 1..=4 workers");
    Ok(())
}
