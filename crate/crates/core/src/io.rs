//! Text formats: Matrix Market coordinate files for [`SparseMatrix`] and a
//! plain dense array format for [`BlockVector`].
//!
//! The dense format is a header line `n k` followed by `n` lines of `k`
//! whitespace-separated decimals. Values are written in shortest
//! round-trip form, so write → read is lossless.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{BlockVector, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

/// Reads a real (or integer) coordinate Matrix Market matrix.
///
/// `symmetric` files store the lower triangle and are mirrored; `general`
/// files must already be symmetric.
pub fn read_matrix_market(reader: impl BufRead) -> Result<SparseMatrix> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty file"))?;
    let header = header?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::parse(1, "missing %%MatrixMarket matrix header"));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::parse(
            1,
            format!("unsupported format '{}'", tokens[2]),
        ));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(Error::parse(
            1,
            format!("unsupported field '{}'", tokens[3]),
        ));
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(Error::parse(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut triplets = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(Error::parse(lineno, "expected 'rows cols entries'"));
                }
                let rows = parse_usize(fields[0], lineno)?;
                let cols = parse_usize(fields[1], lineno)?;
                let nnz = parse_usize(fields[2], lineno)?;
                if rows != cols {
                    return Err(Error::parse(
                        lineno,
                        format!("matrix is {rows}x{cols}, not square"),
                    ));
                }
                size = Some((rows, nnz));
                triplets.reserve(2 * nnz);
            }
            Some((n, _)) => {
                if fields.len() != 3 {
                    return Err(Error::parse(lineno, "expected 'row col value'"));
                }
                let r = parse_usize(fields[0], lineno)?;
                let c = parse_usize(fields[1], lineno)?;
                if r == 0 || c == 0 || r > n || c > n {
                    return Err(Error::parse(
                        lineno,
                        format!("index ({r}, {c}) out of range"),
                    ));
                }
                let v: f64 = fields[2]
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad value '{}'", fields[2])))?;
                let (r, c) = (r - 1, c - 1);
                if symmetry == Symmetry::Symmetric {
                    if c > r {
                        return Err(Error::parse(lineno, "symmetric file stores an upper entry"));
                    }
                    if r != c {
                        triplets.push((c, r, v));
                    }
                }
                triplets.push((r, c, v));
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| Error::parse(1, "missing size line"))?;
    let stored = match symmetry {
        Symmetry::General => triplets.len(),
        Symmetry::Symmetric => triplets.iter().filter(|t| t.0 >= t.1).count(),
    };
    if stored != nnz {
        return Err(Error::parse(
            1,
            format!("size line announces {nnz} entries, file has {stored}"),
        ));
    }
    SparseMatrix::from_triplets(n, &triplets)
}

/// Writes `a` as a symmetric coordinate file (lower triangle only).
pub fn write_matrix_market(a: &SparseMatrix, mut w: impl Write) -> Result<()> {
    let lower = (0..a.n())
        .map(|r| a.row(r).0.iter().filter(|&&c| c <= r).count())
        .sum::<usize>();
    writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(w, "{} {} {}", a.n(), a.n(), lower)?;
    for r in 0..a.n() {
        let (cols, vals) = a.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            if c <= r {
                writeln!(w, "{} {} {}", r + 1, c + 1, v)?;
            }
        }
    }
    Ok(())
}

pub fn read_block_vector(reader: impl BufRead) -> Result<BlockVector> {
    let mut header: Option<(usize, usize)> = None;
    let mut data = Vec::new();
    let mut rows = 0;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(Error::parse(lineno, "expected header 'n k'"));
                }
                let n = parse_usize(fields[0], lineno)?;
                let k = parse_usize(fields[1], lineno)?;
                data.reserve(n * k);
                header = Some((n, k));
            }
            Some((n, k)) => {
                if rows == n {
                    return Err(Error::parse(lineno, format!("more than {n} rows")));
                }
                if fields.len() != k {
                    return Err(Error::parse(
                        lineno,
                        format!("expected {k} values, found {}", fields.len()),
                    ));
                }
                for f in fields {
                    let v: f64 = f
                        .parse()
                        .map_err(|_| Error::parse(lineno, format!("bad value '{f}'")))?;
                    data.push(v);
                }
                rows += 1;
            }
        }
    }
    let (n, k) = header.ok_or_else(|| Error::parse(1, "missing header"))?;
    if rows != n {
        return Err(Error::parse(
            rows + 1,
            format!("expected {n} rows, found {rows}"),
        ));
    }
    BlockVector::from_vec(n, k, data)
}

pub fn write_block_vector(x: &BlockVector, mut w: impl Write) -> Result<()> {
    writeln!(w, "{} {}", x.n(), x.k())?;
    for row in x.rows().take(x.n()) {
        let mut first = true;
        for v in row {
            if !first {
                w.write_all(b" ")?;
            }
            write!(w, "{v}")?;
            first = false;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    read_matrix_market(BufReader::new(File::open(path)?))
}

pub fn save_matrix_market(a: &SparseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix_market(a, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_block_vector(path: impl AsRef<Path>) -> Result<BlockVector> {
    read_block_vector(BufReader::new(File::open(path)?))
}

pub fn save_block_vector(x: &BlockVector, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_block_vector(x, &mut w)?;
    w.flush()?;
    Ok(())
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("expected a non-negative integer, got '{s}'")))
}
