//! Matrix Market coordinate format (`real general`, 1-based indices).

use super::{CsrMatrix, LinearOperator};
use crate::error::{Error, Result};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

pub fn read<R: Read>(reader: R) -> Result<CsrMatrix> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty Matrix Market file".into()))??;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5
        || tokens[0] != "%%matrixmarket"
        || tokens[1] != "matrix"
        || tokens[2] != "coordinate"
        || tokens[3] != "real"
        || tokens[4] != "general"
    {
        return Err(Error::Parse(format!(
            "unsupported Matrix Market header {header:?}, expected {HEADER:?}"
        )));
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let mut it = line.split_whitespace();
        let mut next_usize = |what: &str| -> Result<usize> {
            it.next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing {what}", lineno + 2)))?
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("line {}: bad {what}: {e}", lineno + 2)))
        };
        match size {
            None => {
                let rows = next_usize("row count")?;
                let cols = next_usize("column count")?;
                let nnz = next_usize("entry count")?;
                size = Some((rows, cols, nnz));
                triplets.reserve(nnz);
            }
            Some((rows, cols, _)) => {
                let r = next_usize("row index")?;
                let c = next_usize("column index")?;
                let v: f64 = it
                    .next()
                    .ok_or_else(|| Error::Parse(format!("line {}: missing value", lineno + 2)))?
                    .parse()
                    .map_err(|e| Error::Parse(format!("line {}: bad value: {e}", lineno + 2)))?;
                if r == 0 || c == 0 || r > rows || c > cols {
                    return Err(Error::Parse(format!(
                        "line {}: index ({r}, {c}) outside 1..={rows} x 1..={cols}",
                        lineno + 2
                    )));
                }
                triplets.push((r - 1, c - 1, v));
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| Error::Parse("missing size line".into()))?;
    if triplets.len() != nnz {
        return Err(Error::Parse(format!(
            "expected {nnz} entries, found {}",
            triplets.len()
        )));
    }
    CsrMatrix::from_triplets(rows, cols, &triplets)
}

pub fn write<W: Write>(m: &CsrMatrix, mut w: W) -> Result<()> {
    writeln!(w, "{HEADER}")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (r, c, v) in m.triplets() {
        // shortest round-trip representation
        writeln!(w, "{} {} {:?}", r + 1, c + 1, v)?;
    }
    Ok(())
}

pub fn read_file(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    let f = std::fs::File::open(path)
        .map_err(|e| Error::Io(e).context(format!("opening {}", path.display())))?;
    read(f).map_err(|e| e.context(format!("reading {}", path.display())))
}

pub fn write_file(m: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write(m, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_one_based_entries() {
        let text = "%%MatrixMarket matrix coordinate real general\n% comment\n2 3 3\n1 1 1.5\n2 3 -2\n1 2 4e-1\n";
        let m = read(text.as_bytes()).unwrap();
        assert_eq!(m.shape(), (2, 3));
        assert_eq!(m.triplets(), vec![(0, 0, 1.5), (0, 1, 0.4), (1, 2, -2.0)]);
    }

    #[test]
    fn rejects_bad_header_and_indices() {
        assert!(read("%%MatrixMarket matrix array real general\n1 1\n1\n".as_bytes()).is_err());
        assert!(read(format!("{HEADER}\n2 2 1\n0 1 1.0\n").as_bytes()).is_err());
        assert!(read(format!("{HEADER}\n2 2 2\n1 1 1.0\n").as_bytes()).is_err());
    }

    #[test]
    fn write_then_read_reproduces_products() {
        let m = CsrMatrix::from_triplets(3, 4, &[(0, 3, 0.1), (1, 1, 1.0 / 3.0), (2, 0, -7.25e-9)]).unwrap();
        let mut buf = Vec::new();
        write(&m, &mut buf).unwrap();
        let back = read(buf.as_slice()).unwrap();
        let x = [0.3, -1.1, 2.0, 1e5];
        assert_eq!(back.apply(&x), m.apply(&x));
        assert_eq!(back, m);
    }
}
