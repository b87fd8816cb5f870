//! Compute levels of a lower-triangular matrix and reorder it level by level.
use hecsolve::level::reorder_by_schedule;
use hecsolve::{compute_levels, CsrMatrix, LevelSchedule};

fn main() -> hecsolve::Result<()> {
    // rows 0 and 2 are independent, 1 needs 0, 3 needs 1 and 2
    let l = CsrMatrix::from_triples(
        4,
        4,
        &[(0, 0, 1.0), (1, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0), (3, 1, 1.0), (3, 2, 1.0), (3, 3, 1.0)],
    )?;
    println!("levels: {:?}", compute_levels(&l)?);

    let s = LevelSchedule::for_matrix(&l)?;
    println!("perm: {:?}", s.perm());
    println!("level starts: {:?}", s.level_starts());
    for k in 0..s.nlev() {
        let rows: Vec<usize> = s.level_range(k).map(|r| s.inv_perm()[r]).collect();
        println!("level {}: original rows {rows:?}", k + 1);
    }

    let r = reorder_by_schedule(&l, &s)?;
    r.check_lower_triangular()?;
    println!("reordered: {:?}", r.to_triples());

    let poisson = hecsolve::generate::poisson7(10, 10, 10)?;
    let f = hecsolve::ilu0(&poisson)?;
    let sl = LevelSchedule::for_matrix(&f.l)?;
    println!("ILU(0) of a 10^3 Poisson matrix: {} rows in {} levels", sl.n(), sl.nlev());
    Ok(())
}
