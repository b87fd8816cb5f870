//! ILU(0), ILU(k) and ILUT(p, tol) on the same matrix.
use hecsolve::{ilu0, ilu_k, ilut, CsrMatrix, IluFactors};

fn residual_norm(a: &CsrMatrix, f: &IluFactors) -> f64 {
    // ||A - LU||_F over the pattern of A
    let mut s = 0.0;
    for (i, j, v) in a.to_triples() {
        let (lc, lv) = f.l.row(i);
        let lu: f64 = lc.iter().zip(lv).filter_map(|(&k, &l)| f.u.get(k, j).map(|u| l * u)).sum();
        s += (v - lu) * (v - lu);
    }
    s.sqrt()
}

fn main() -> hecsolve::Result<()> {
    let a = hecsolve::generate::poisson7(8, 8, 8)?;
    println!("A: n = {}, nnz = {}", a.n_rows(), a.nnz());

    let report = |name: String, f: IluFactors| {
        println!(
            "{name:<14} nnz(L) = {:>5}  nnz(U) = {:>5}  ||A - LU|| on pattern = {:.3e}",
            f.l.nnz(),
            f.u.nnz(),
            residual_norm(&a, &f)
        );
    };
    report("ILU(0)".into(), ilu0(&a)?);
    for k in 1..=3 {
        report(format!("ILU({k})"), ilu_k(&a, k)?);
    }
    for (p, tol) in [(3, 0.1), (7, 0.1), (7, 0.01), (20, 1e-4)] {
        report(format!("ILUT({p}, {tol})"), ilut(&a, p, tol)?);
    }

    let singular = CsrMatrix::from_triples(2, 2, &[(0, 0, 0.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)])?;
    println!("zero pivot: {}", ilu0(&singular).unwrap_err());
    Ok(())
}
