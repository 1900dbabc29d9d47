//! Point-set CSV files: a header `x1,…,xd`, then one point per row.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::point_set::PointSet;

/// 17 significant digits, enough to read back the identical `f64`.
pub fn format_coord(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn header(d: usize) -> String {
    (1..=d).map(|j| format!("x{j}")).collect::<Vec<_>>().join(",")
}

pub fn points_to_csv(set: &PointSet) -> String {
    let mut out = header(set.dim());
    out.push('\n');
    for row in set.rows() {
        for (j, &x) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", format_coord(x));
        }
        out.push('\n');
    }
    out
}

pub fn write_points(path: &Path, set: &PointSet) -> Result<()> {
    write_file(path, points_to_csv(set).as_bytes())
}

/// Writes `bytes`, creating missing parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn read_points(path: &Path) -> Result<PointSet> {
    parse_points(&std::fs::read_to_string(path)?, path)
}

/// Parses CSV text; `path` only labels diagnostics. Line numbers count the
/// header as line 1.
pub fn parse_points(text: &str, path: &Path) -> Result<PointSet> {
    let fail = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (head_line, head) = lines.next().ok_or_else(|| fail(1, "missing header `x1,…,xd`".into()))?;
    let names: Vec<&str> = head.split(',').map(str::trim).collect();
    let d = names.len();
    if names.iter().enumerate().any(|(j, name)| *name != format!("x{}", j + 1)) {
        return Err(fail(head_line, format!("header must be `{}`, found `{head}`", header(d))));
    }
    let mut coords = Vec::new();
    for (line, text) in lines {
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        if fields.len() != d {
            return Err(fail(line, format!("{} values, expected {d}", fields.len())));
        }
        for (j, field) in fields.iter().enumerate() {
            let x: f64 = field
                .parse()
                .map_err(|_| fail(line, format!("column x{}: `{field}` is not a number", j + 1)))?;
            if !(0.0..=1.0).contains(&x) {
                return Err(fail(line, format!("column x{}: {x} is outside [0, 1]", j + 1)));
            }
            coords.push(x);
        }
    }
    if coords.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    PointSet::new(d, coords)
}
