//! Store a lower-triangular matrix in the hybrid ELL + CSR layout and multiply.
use hecsolve::{CsrMatrix, HecMatrix, WidthPolicy};

fn main() -> hecsolve::Result<()> {
    let l = CsrMatrix::from_triples(
        4,
        4,
        &[(0, 0, 2.0), (1, 0, 1.0), (1, 1, 3.0), (2, 2, 1.0), (3, 0, -1.0), (3, 1, 0.5), (3, 2, 2.0), (3, 3, 4.0)],
    )?;

    for policy in [WidthPolicy::Auto, WidthPolicy::Fixed(0), WidthPolicy::Fixed(2)] {
        let h = HecMatrix::from_csr(&l, true, policy)?;
        println!(
            "{policy:?}: ell width {}, ell slots {}, csr nnz {}",
            h.ell().width(),
            h.ell().values().len(),
            h.csr().nnz()
        );
        // diagonal always sits last in the csr part
        for i in 0..4 {
            let (c, _) = h.csr().row(i);
            assert_eq!(c.last(), Some(&i));
        }
        assert_eq!(h.to_csr(), l);
    }

    let x = [1.0, 2.0, 3.0, 4.0];
    let h = HecMatrix::from_csr(&l, false, WidthPolicy::Auto)?;
    println!("L x = {:?}", h.spmv(&x)?);
    Ok(())
}
