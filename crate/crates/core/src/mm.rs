//! MatrixMarket coordinate files (`real` or `integer`, `general` or
//! `symmetric`). Indices in the file are 1-based.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::formats::CsrMatrix;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    parse_matrix_market(BufReader::new(File::open(path)?))
}

pub fn parse_matrix_market(reader: impl Read) -> Result<CsrMatrix> {
    let mut lines = BufReader::new(reader).lines().enumerate();

    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, "expected `%%MatrixMarket matrix coordinate <field> <symmetry>`"));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported format `{}`", tokens[2])));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(parse_err(1, format!("unsupported field `{}`", tokens[3])));
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(1, format!("unsupported symmetry `{other}`"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triples = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut next_usize = |what: &str| -> Result<usize> {
            fields
                .next()
                .ok_or_else(|| parse_err(lineno, format!("missing {what}")))?
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad {what}")))
        };
        match size {
            None => {
                let rows = next_usize("row count")?;
                let cols = next_usize("column count")?;
                let nnz = next_usize("entry count")?;
                if symmetric && rows != cols {
                    return Err(parse_err(lineno, "symmetric matrix must be square"));
                }
                size = Some((rows, cols, nnz));
                triples.reserve(if symmetric { 2 * nnz } else { nnz });
            }
            Some((rows, cols, _)) => {
                let i = next_usize("row index")?;
                let j = next_usize("column index")?;
                let v: f64 = fields
                    .next()
                    .ok_or_else(|| parse_err(lineno, "missing value"))?
                    .parse()
                    .map_err(|_| parse_err(lineno, "bad value"))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(Error::IndexOutOfRange { row: i, col: j, n_rows: rows, n_cols: cols });
                }
                let (i, j) = (i - 1, j - 1);
                if symmetric && j > i {
                    return Err(parse_err(lineno, "symmetric files must store the lower triangle"));
                }
                triples.push((i, j, v));
                if symmetric && i != j {
                    triples.push((j, i, v));
                }
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    let stored = if symmetric {
        triples.iter().filter(|t| t.0 >= t.1).count()
    } else {
        triples.len()
    };
    if stored != nnz {
        return Err(parse_err(1, format!("size line announces {nnz} entries, found {stored}")));
    }
    CsrMatrix::from_triples(rows, cols, &triples)
}

/// Writes `a` as a `general` coordinate file. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_matrix_market(a: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    format_matrix_market(a, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn format_matrix_market(a: &CsrMatrix, mut w: impl Write) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.n_rows(), a.n_cols(), a.nnz())?;
    for i in 0..a.n_rows() {
        let (cols, vals) = a.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            writeln!(w, "{} {} {:e}", i + 1, c + 1, v)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_file() {
        let text = "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 2\n1 1 1.0\n2 2 1\n";
        assert_eq!(parse_matrix_market(text.as_bytes()).unwrap(), CsrMatrix::identity(2));
    }

    #[test]
    fn symmetric_expands() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 4\n2 1 -1\n2 2 4\n";
        let a = parse_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(a.nnz(), 4);
        assert_eq!(a.get(0, 1), Some(-1.0));
    }

    #[test]
    fn malformed_inputs() {
        let cases = [
            "",
            "%%MatrixMarket matrix array real general\n1 1\n1\n",
            "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 2\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 1\n",
        ];
        for c in cases {
            assert!(parse_matrix_market(c.as_bytes()).is_err(), "accepted: {c:?}");
        }
    }

    #[test]
    fn roundtrip_exact_values() {
        let a = CsrMatrix::from_triples(
            2,
            3,
            &[(0, 2, 0.1), (1, 0, -1.0 / 3.0), (1, 1, 1e-300), (1, 2, 6.02e23)],
        )
        .unwrap();
        let mut buf = Vec::new();
        format_matrix_market(&a, &mut buf).unwrap();
        assert_eq!(parse_matrix_market(buf.as_slice()).unwrap(), a);
    }
}
