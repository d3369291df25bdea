//! Plain-text matrices: one row per line, entries separated by whitespace,
//! `#` starts a comment.

use std::path::Path;

use nalgebra::DMatrix;

use crate::error::CliError;

pub fn parse(text: &str) -> Result<DMatrix<f64>, String> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| format!("line {}: `{t}`: {e}", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(format!("line {}: expected {} entries, found {}", i + 1, first.len(), row.len()));
            }
        }
        rows.push(row);
    }
    from_rows(&rows)
}

pub fn from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, String> {
    let Some(first) = rows.first() else {
        return Err("matrix has no rows".into());
    };
    if first.is_empty() {
        return Err("matrix has no columns".into());
    }
    if let Some(i) = rows.iter().position(|r| r.len() != first.len()) {
        return Err(format!("row {} has {} entries, expected {}", i + 1, rows[i].len(), first.len()));
    }
    Ok(DMatrix::from_fn(rows.len(), first.len(), |i, j| rows[i][j]))
}

pub fn read_file(path: &Path) -> Result<DMatrix<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments() {
        let m = parse("# 2x3\n1 2 3\n\n  4 5 6e-1  # tail\n").unwrap();
        assert_eq!(m.shape(), (2, 3));
        assert_eq!(m[(1, 2)], 0.6);
    }

    #[test]
    fn ragged_rows_name_the_line() {
        let err = parse("1 2\n3\n").unwrap_err();
        assert!(err.starts_with("line 2"), "{err}");
        assert!(parse("1 x").unwrap_err().contains("line 1"));
        assert!(parse("# nothing\n").is_err());
    }
}
