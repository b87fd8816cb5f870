//! Read and write Matrix Market coordinate files.
use hecsolve::mm::{format_matrix_market, parse_matrix_market, read_matrix_market, write_matrix_market};

const SYMMETRIC: &str = "%%MatrixMarket matrix coordinate real symmetric
% 1D Laplacian
3 3 5
1 1 2.0
2 1 -1.0
2 2 2.0
3 2 -1.0
3 3 2.0
";

fn main() -> hecsolve::Result<()> {
    let a = parse_matrix_market(SYMMETRIC.as_bytes())?;
    println!("expanded symmetric file: {} rows, {} entries", a.n_rows(), a.nnz());

    let mut out = Vec::new();
    format_matrix_market(&a, &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));

    let path = std::env::temp_dir().join("hecsolve_example.mtx");
    write_matrix_market(&a, &path)?;
    assert_eq!(read_matrix_market(&path)?, a);
    std::fs::remove_file(&path)?;
    println!("round trip through {} ok", path.display());
    Ok(())
}
