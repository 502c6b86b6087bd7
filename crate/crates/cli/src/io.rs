//! Dense CSV and Matrix Market reading and writing.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array2, ArrayView2};
use nmf_merge::DataMatrix;

use crate::error::{io_err, CliError, CliResult};

pub fn read_matrix(path: &Path) -> CliResult<DataMatrix> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_matrix(&text)
}

/// Parses Matrix Market when the text starts with the `%%MatrixMarket`
/// banner, comma-separated rows otherwise.
pub fn parse_matrix(text: &str) -> CliResult<DataMatrix> {
    let values = if text.trim_start().starts_with("%%MatrixMarket") { parse_matrix_market(text)? } else { parse_csv(text)? };
    if let Some(((i, j), &v)) = values.indexed_iter().find(|(_, v)| **v < 0.0) {
        return Err(CliError::Negative { row: i + 1, col: j + 1, value: v });
    }
    Ok(DataMatrix::new(values)?)
}

fn number(token: &str, line: usize) -> CliResult<f64> {
    let v: f64 = token
        .trim()
        .parse()
        .map_err(|_| CliError::Format { line, message: format!("not a number: {:?}", token.trim()) })?;
    if !v.is_finite() {
        return Err(CliError::Format { line, message: format!("non-finite value {v}") });
    }
    Ok(v)
}

fn index(token: &str, line: usize, what: &str) -> CliResult<usize> {
    token.trim().parse().map_err(|_| CliError::Format { line, message: format!("invalid {what}: {:?}", token.trim()) })
}

fn parse_csv(text: &str) -> CliResult<Array2<f64>> {
    let mut header: Option<(usize, usize)> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut first_content = true;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if first_content && trimmed.starts_with('#') {
            first_content = false;
            let dims: Vec<&str> = trimmed[1..].split_whitespace().collect();
            if dims.len() != 2 {
                return Err(CliError::Format { line, message: "header must read \"# m n\"".into() });
            }
            header = Some((index(dims[0], line, "row count")?, index(dims[1], line, "column count")?));
            continue;
        }
        first_content = false;
        let row = trimmed.split(',').map(|t| number(t, line)).collect::<CliResult<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CliError::Format {
                    line,
                    message: format!("expected {} values, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if m == 0 {
        return Err(CliError::Format { line: 1, message: "no data rows".into() });
    }
    if let Some((hm, hn)) = header {
        if (hm, hn) != (m, n) {
            return Err(CliError::Format { line: 1, message: format!("header says {hm}x{hn}, data is {m}x{n}") });
        }
    }
    Ok(Array2::from_shape_vec((m, n), rows.concat()).expect("rows have equal length"))
}

fn parse_matrix_market(text: &str) -> CliResult<Array2<f64>> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    let (_, banner) = lines.next().expect("banner checked by caller");
    let fields: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() != 5 || fields[1] != "matrix" {
        return Err(CliError::Format { line: 1, message: format!("unsupported banner {banner:?}") });
    }
    let coordinate = match fields[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(CliError::Format { line: 1, message: format!("unknown layout {other:?}") }),
    };
    let pattern = match fields[3].as_str() {
        "real" | "integer" | "double" => false,
        "pattern" if coordinate => true,
        other => return Err(CliError::Format { line: 1, message: format!("unsupported field {other:?}") }),
    };
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(CliError::Format { line: 1, message: format!("unsupported symmetry {other:?}") }),
    };

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (size_line, size) = body.next().ok_or(CliError::Format { line: 1, message: "missing size line".into() })?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    let expected = if coordinate { 3 } else { 2 };
    if dims.len() != expected {
        return Err(CliError::Format { line: size_line, message: format!("size line needs {expected} integers") });
    }
    let m = index(dims[0], size_line, "row count")?;
    let n = index(dims[1], size_line, "column count")?;
    let mut a = Array2::zeros((m, n));

    if coordinate {
        let nnz = index(dims[2], size_line, "entry count")?;
        let mut seen = 0;
        for (line, entry) in body {
            let t: Vec<&str> = entry.split_whitespace().collect();
            if t.len() != if pattern { 2 } else { 3 } {
                return Err(CliError::Format { line, message: format!("malformed entry {entry:?}") });
            }
            let i = index(t[0], line, "row index")?;
            let j = index(t[1], line, "column index")?;
            if i == 0 || j == 0 || i > m || j > n {
                return Err(CliError::Format { line, message: format!("index ({i}, {j}) outside {m}x{n}") });
            }
            let v = if pattern { 1.0 } else { number(t[2], line)? };
            if v < 0.0 {
                return Err(CliError::Negative { row: i, col: j, value: v });
            }
            a[[i - 1, j - 1]] = v;
            if symmetric {
                a[[j - 1, i - 1]] = v;
            }
            seen += 1;
        }
        if seen != nnz {
            return Err(CliError::Format { line: size_line, message: format!("declared {nnz} entries, found {seen}") });
        }
    } else {
        // Column-major; symmetric arrays list the lower triangle only.
        let cells: Vec<(usize, usize)> = if symmetric {
            (0..n).flat_map(|j| (j..m).map(move |i| (i, j))).collect()
        } else {
            (0..n).flat_map(|j| (0..m).map(move |i| (i, j))).collect()
        };
        let mut next = cells.into_iter();
        for (line, entry) in body {
            for token in entry.split_whitespace() {
                let (i, j) = next.next().ok_or(CliError::Format { line, message: "too many values".into() })?;
                let v = number(token, line)?;
                if v < 0.0 {
                    return Err(CliError::Negative { row: i + 1, col: j + 1, value: v });
                }
                a[[i, j]] = v;
                if symmetric {
                    a[[j, i]] = v;
                }
            }
        }
        if next.next().is_some() {
            return Err(CliError::Format { line: size_line, message: "fewer values than the declared size".into() });
        }
    }
    Ok(a)
}

pub fn format_csv(a: ArrayView2<'_, f64>) -> String {
    let mut out = format!("# {} {}\n", a.nrows(), a.ncols());
    for row in a.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn format_matrix_market(a: ArrayView2<'_, f64>) -> String {
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{} {}", a.nrows(), a.ncols());
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let _ = writeln!(out, "{}", a[[i, j]]);
        }
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, text).map_err(io_err(path))
}
