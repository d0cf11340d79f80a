//! Matrix Market readers and writers.
//!
//! Reading accepts `array` (dense, column-major values) and `coordinate`
//! (1-based sparse triples, materialized dense) formats with `real` or
//! `integer` fields and `general` or `symmetric` symmetry (symmetric only
//! for coordinate files). Vectors are Matrix Market files with one
//! dimension equal to 1, or plain whitespace-separated text.
//!
//! Writing always emits `array real general` with 17 significant digits,
//! so a write/read round trip reproduces every entry exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use renk_core::DenseMatrix;

use crate::fmt_f64;

/// Parse failure with the 1-based line number it was detected on.
#[derive(Debug, thiserror::Error)]
pub enum MmError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed header: {msg}")]
    MalformedHeader {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{path}:{line}: malformed entry: {msg}")]
    MalformedEntry {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{path}: declared {expected} entries but found {found}")]
    EntryCountMismatch {
        path: String,
        expected: usize,
        found: usize,
    },
    #[error("{path}:{line}: index ({i}, {j}) out of bounds for {m}x{n} matrix")]
    IndexOutOfBounds {
        path: String,
        line: usize,
        i: usize,
        j: usize,
        m: usize,
        n: usize,
    },
    #[error("{path}:{line}: duplicate entry for ({i}, {j})")]
    DuplicateEntry {
        path: String,
        line: usize,
        i: usize,
        j: usize,
    },
    #[error("{path}: expected a vector (one dimension equal to 1), got {m}x{n}")]
    NotAVector { path: String, m: usize, n: usize },
}

impl MmError {
    pub fn category(&self) -> &'static str {
        match self {
            MmError::Io { .. } => "io",
            MmError::MalformedHeader { .. } => "malformed-header",
            MmError::MalformedEntry { .. } => "malformed-entry",
            MmError::EntryCountMismatch { .. } => "entry-count-mismatch",
            MmError::IndexOutOfBounds { .. } => "index-out-of-bounds",
            MmError::DuplicateEntry { .. } => "duplicate-entry",
            MmError::NotAVector { .. } => "not-a-vector",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

struct Reader {
    path: String,
    lines: std::iter::Enumerate<std::io::Lines<BufReader<File>>>,
}

impl Reader {
    fn open(path: &Path) -> Result<Self, MmError> {
        let file = File::open(path).map_err(|source| MmError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Reader {
            path: path.display().to_string(),
            lines: BufReader::new(file).lines().enumerate(),
        })
    }

    fn io_err(&self, source: std::io::Error) -> MmError {
        MmError::Io {
            path: self.path.clone(),
            source,
        }
    }

    /// Next line verbatim, as (1-based line number, text).
    fn next_raw(&mut self) -> Result<Option<(usize, String)>, MmError> {
        match self.lines.next() {
            None => Ok(None),
            Some((idx, line)) => {
                let line = line.map_err(|e| self.io_err(e))?;
                Ok(Some((idx + 1, line)))
            }
        }
    }

    /// Next line that is neither blank nor a `%` comment.
    fn next_data(&mut self) -> Result<Option<(usize, String)>, MmError> {
        while let Some((lineno, line)) = self.next_raw()? {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('%') {
                continue;
            }
            return Ok(Some((lineno, line)));
        }
        Ok(None)
    }
}

fn parse_banner(path: &str, lineno: usize, line: &str) -> Result<(Layout, Symmetry), MmError> {
    let bad = |msg: String| MmError::MalformedHeader {
        path: path.to_string(),
        line: lineno,
        msg,
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "%%MatrixMarket" {
        return Err(bad("expected '%%MatrixMarket matrix <format> <field> <symmetry>'".into()));
    }
    if fields[1] != "matrix" {
        return Err(bad(format!("unsupported object '{}'", fields[1])));
    }
    let layout = match fields[2] {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(bad(format!("unsupported format '{other}'"))),
    };
    match fields[3] {
        "real" | "integer" => {}
        other => return Err(bad(format!("unsupported field '{other}' (need real or integer)"))),
    }
    let symmetry = match fields[4] {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(bad(format!("unsupported symmetry '{other}'"))),
    };
    if layout == Layout::Array && symmetry == Symmetry::Symmetric {
        return Err(bad("symmetric array files are not supported".into()));
    }
    Ok((layout, symmetry))
}

fn parse_usize(path: &str, lineno: usize, token: &str, what: &str) -> Result<usize, MmError> {
    token.parse().map_err(|_| MmError::MalformedEntry {
        path: path.to_string(),
        line: lineno,
        msg: format!("cannot parse {what} from '{token}'"),
    })
}

fn parse_f64(path: &str, lineno: usize, token: &str) -> Result<f64, MmError> {
    token.parse().map_err(|_| MmError::MalformedEntry {
        path: path.to_string(),
        line: lineno,
        msg: format!("cannot parse value from '{token}'"),
    })
}

/// Read a dense matrix from a Matrix Market file.
pub fn read_matrix_market(path: &Path) -> Result<DenseMatrix, MmError> {
    let mut reader = Reader::open(path)?;
    let p = reader.path.clone();
    let (lineno, banner) = reader
        .next_raw()?
        .ok_or_else(|| MmError::MalformedHeader {
            path: p.clone(),
            line: 1,
            msg: "empty file".into(),
        })?;
    let (layout, symmetry) = parse_banner(&p, lineno, &banner)?;

    let (lineno, size_line) = reader.next_data()?.ok_or_else(|| MmError::MalformedHeader {
        path: p.clone(),
        line: lineno,
        msg: "missing size line".into(),
    })?;
    let tokens: Vec<&str> = size_line.split_whitespace().collect();
    let expect_tokens = if layout == Layout::Array { 2 } else { 3 };
    if tokens.len() != expect_tokens {
        return Err(MmError::MalformedEntry {
            path: p,
            line: lineno,
            msg: format!("size line needs {expect_tokens} fields, got {}", tokens.len()),
        });
    }
    let m = parse_usize(&p, lineno, tokens[0], "row count")?;
    let n = parse_usize(&p, lineno, tokens[1], "column count")?;
    if m == 0 || n == 0 {
        return Err(MmError::MalformedEntry {
            path: p,
            line: lineno,
            msg: format!("dimensions must be positive, got {m}x{n}"),
        });
    }

    match layout {
        Layout::Array => read_array_body(reader, m, n),
        Layout::Coordinate => {
            let nnz = parse_usize(&p, lineno, tokens[2], "entry count")?;
            read_coordinate_body(reader, m, n, nnz, symmetry)
        }
    }
}

fn read_array_body(mut reader: Reader, m: usize, n: usize) -> Result<DenseMatrix, MmError> {
    let p = reader.path.clone();
    // array format stores values column by column
    let mut data = vec![0.0; m * n];
    let mut count = 0usize;
    while let Some((lineno, line)) = reader.next_data()? {
        for token in line.split_whitespace() {
            if count >= m * n {
                return Err(MmError::EntryCountMismatch {
                    path: p,
                    expected: m * n,
                    found: count + 1,
                });
            }
            let value = parse_f64(&p, lineno, token)?;
            let (i, j) = (count % m, count / m);
            data[i * n + j] = value;
            count += 1;
        }
    }
    if count != m * n {
        return Err(MmError::EntryCountMismatch {
            path: p,
            expected: m * n,
            found: count,
        });
    }
    Ok(DenseMatrix::from_vec(m, n, data))
}

fn read_coordinate_body(
    mut reader: Reader,
    m: usize,
    n: usize,
    nnz: usize,
    symmetry: Symmetry,
) -> Result<DenseMatrix, MmError> {
    let p = reader.path.clone();
    if symmetry == Symmetry::Symmetric && m != n {
        return Err(MmError::MalformedHeader {
            path: p,
            line: 1,
            msg: format!("symmetric matrix must be square, got {m}x{n}"),
        });
    }
    let mut data = vec![0.0; m * n];
    let mut seen = vec![false; m * n];
    let mut count = 0usize;
    while let Some((lineno, line)) = reader.next_data()? {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(MmError::MalformedEntry {
                path: p,
                line: lineno,
                msg: format!("coordinate entry needs 'i j value', got {} fields", tokens.len()),
            });
        }
        count += 1;
        if count > nnz {
            return Err(MmError::EntryCountMismatch {
                path: p,
                expected: nnz,
                found: count,
            });
        }
        let i = parse_usize(&p, lineno, tokens[0], "row index")?;
        let j = parse_usize(&p, lineno, tokens[1], "column index")?;
        let value = parse_f64(&p, lineno, tokens[2])?;
        if i == 0 || i > m || j == 0 || j > n {
            return Err(MmError::IndexOutOfBounds {
                path: p,
                line: lineno,
                i,
                j,
                m,
                n,
            });
        }
        let (i, j) = (i - 1, j - 1);
        if seen[i * n + j] {
            return Err(MmError::DuplicateEntry {
                path: p,
                line: lineno,
                i: i + 1,
                j: j + 1,
            });
        }
        seen[i * n + j] = true;
        data[i * n + j] = value;
        if symmetry == Symmetry::Symmetric && i != j {
            seen[j * n + i] = true;
            data[j * n + i] = value;
        }
    }
    if count != nnz {
        return Err(MmError::EntryCountMismatch {
            path: p,
            expected: nnz,
            found: count,
        });
    }
    Ok(DenseMatrix::from_vec(m, n, data))
}

/// Read a vector: a Matrix Market file with one dimension equal to 1, or a
/// plain text file of whitespace-separated numbers (`%` comment lines are
/// skipped).
pub fn read_vector(path: &Path) -> Result<Vec<f64>, MmError> {
    let looks_like_mm = {
        let mut reader = Reader::open(path)?;
        matches!(reader.next_raw()?, Some((_, line)) if line.starts_with("%%MatrixMarket"))
    };
    if looks_like_mm {
        let a = read_matrix_market(path)?;
        let (m, n) = (a.nrows(), a.ncols());
        if m != 1 && n != 1 {
            return Err(MmError::NotAVector {
                path: path.display().to_string(),
                m,
                n,
            });
        }
        return Ok(a.entries().to_vec());
    }

    let mut reader = Reader::open(path)?;
    let p = reader.path.clone();
    let mut out = Vec::new();
    while let Some((lineno, line)) = reader.next_data()? {
        for token in line.split_whitespace() {
            out.push(parse_f64(&p, lineno, token)?);
        }
    }
    if out.is_empty() {
        return Err(MmError::MalformedEntry {
            path: p,
            line: 1,
            msg: "no values found".into(),
        });
    }
    Ok(out)
}

fn create(path: &Path) -> Result<BufWriter<File>, MmError> {
    let file = File::create(path).map_err(|source| MmError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(BufWriter::new(file))
}

fn finish(path: &Path, result: std::io::Result<()>) -> Result<(), MmError> {
    result.map_err(|source| MmError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Write a dense matrix in `array real general` format (column-major
/// values, full double precision).
pub fn write_matrix_market(path: &Path, a: &DenseMatrix) -> Result<(), MmError> {
    let mut w = create(path)?;
    let res = (|| {
        writeln!(w, "%%MatrixMarket matrix array real general")?;
        writeln!(w, "{} {}", a.nrows(), a.ncols())?;
        for j in 0..a.ncols() {
            for i in 0..a.nrows() {
                writeln!(w, "{}", fmt_f64(a.get(i, j)))?;
            }
        }
        w.flush()
    })();
    finish(path, res)
}

/// Write a vector as an m-by-1 `array` Matrix Market file.
pub fn write_vector(path: &Path, v: &[f64]) -> Result<(), MmError> {
    let mut w = create(path)?;
    let res = (|| {
        writeln!(w, "%%MatrixMarket matrix array real general")?;
        writeln!(w, "{} 1", v.len())?;
        for value in v {
            writeln!(w, "{}", fmt_f64(*value))?;
        }
        w.flush()
    })();
    finish(path, res)
}
