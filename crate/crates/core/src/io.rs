//! File formats: edge lists, numeric CSV, key-value configs, atomic writes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::model::{Intercepts, Link, SignedNetwork};
use crate::optimizer::FitConfig;
use crate::{Error, Result};

pub const EDGE_HEADER: &str = "i\tj\tsign";

/// Lossless text form of a double (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Reads a whole input file. A missing or unreadable input counts as a
/// parse error (line 0), not an I/O error.
pub fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| parse_err(path, 0, e.to_string()))
}

/// Writes `contents` to a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn format_edges(y: &SignedNetwork) -> String {
    let mut out = String::from(EDGE_HEADER);
    out.push('\n');
    for (i, j, s) in y.edges() {
        let _ = writeln!(out, "{i}\t{j}\t{s}");
    }
    out
}

/// Parses an edge list. Node count is `n` if given, else one past the
/// largest id seen. Records may list a pair in either order but only once.
pub fn parse_edges(text: &str, n: Option<usize>, path: &Path) -> Result<SignedNetwork> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == EDGE_HEADER => {}
        Some((_, h)) => return Err(parse_err(path, 1, format!("expected header `i<TAB>j<TAB>sign`, got `{h}`"))),
        None => return Err(parse_err(path, 1, "empty file")),
    }
    let mut records = Vec::new();
    let mut top = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(path, lineno, format!("expected 3 tab-separated fields, got {}", fields.len())));
        }
        let node = |s: &str| s.parse::<usize>().map_err(|e| parse_err(path, lineno, format!("bad node id `{s}`: {e}")));
        let (i, j) = (node(fields[0])?, node(fields[1])?);
        let sign = match fields[2] {
            "1" | "+1" => 1i8,
            "-1" => -1,
            other => return Err(parse_err(path, lineno, format!("sign must be -1 or 1, got `{other}`"))),
        };
        if i == j {
            return Err(parse_err(path, lineno, format!("self-edge on node {i}")));
        }
        top = top.max(i).max(j);
        records.push((lineno, i, j, sign));
    }
    let n = match n {
        Some(n) => n,
        None if records.is_empty() => 0,
        None => top + 1,
    };
    let mut entries = vec![0i8; n * n];
    for &(lineno, i, j, s) in &records {
        if i >= n || j >= n {
            return Err(parse_err(path, lineno, format!("node id out of range for n = {n}")));
        }
        if entries[i * n + j] != 0 {
            return Err(parse_err(path, lineno, format!("duplicate record for pair ({i}, {j})")));
        }
        entries[i * n + j] = s;
        entries[j * n + i] = s;
    }
    SignedNetwork::from_dense(n, entries)
}

pub fn read_edges(path: &Path, n: Option<usize>) -> Result<SignedNetwork> {
    parse_edges(&read_input(path)?, n, path)
}

/// Matrix as CSV with a header row `prefix1,prefix2,...`.
pub fn format_matrix(x: &DMatrix<f64>, prefix: &str) -> String {
    let mut out = (1..=x.ncols()).map(|c| format!("{prefix}{c}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for i in 0..x.nrows() {
        let row: Vec<String> = (0..x.ncols()).map(|c| fmt_f64(x[(i, c)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Inverse of [`format_matrix`]. A matrix with no columns is written as an
/// empty header plus blank lines, so `nrows` comes from the caller.
pub fn parse_matrix(text: &str, nrows: Option<usize>, path: &Path) -> Result<DMatrix<f64>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let k = if header.trim().is_empty() { 0 } else { header.split(',').count() };
    let mut data = Vec::new();
    let mut rows = 0;
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        if k == 0 {
            rows += 1;
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != k {
            return Err(parse_err(path, lineno, format!("expected {k} fields, got {}", fields.len())));
        }
        for f in fields {
            let v = f.trim().parse::<f64>().map_err(|e| parse_err(path, lineno, format!("bad number `{f}`: {e}")))?;
            data.push(v);
        }
        rows += 1;
    }
    let rows = nrows.unwrap_or(rows);
    if data.len() != rows * k {
        return Err(parse_err(path, 0, format!("expected {rows} rows of {k} values")));
    }
    Ok(DMatrix::from_row_slice(rows, k, &data))
}

pub fn read_matrix(path: &Path, nrows: Option<usize>) -> Result<DMatrix<f64>> {
    parse_matrix(&read_input(path)?, nrows, path)
}

/// Fit settings read from a config file. `link` is not part of
/// [`FitConfig`] but lives in the same file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub fit: FitConfig,
    pub link: Link,
}

/// Parses `key = value` lines (`#` starts a comment) over the defaults.
/// Keys are the [`FitConfig`] field names, the intercept fields
/// `d0 d1 delta c1 c2`, and `link`.
pub fn parse_config(text: &str, path: &Path) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(path, lineno, format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |e: String| parse_err(path, lineno, format!("bad value for `{key}`: {e}"));
        let float = || value.parse::<f64>().map_err(|e| bad(e.to_string()));
        let count = || value.parse::<usize>().map_err(|e| bad(e.to_string()));
        let f = &mut cfg.fit;
        match key {
            "k1" => f.k1 = count()?,
            "k2" => f.k2 = count()?,
            "c" => f.c = float()?,
            "kappa" => f.kappa = float()?,
            "a_n" => f.a_n = float()?,
            "xi1" => f.xi1 = Some(float()?),
            "xi2" => f.xi2 = Some(float()?),
            "xi3" => f.xi3 = Some(float()?),
            "xi4" => f.xi4 = Some(float()?),
            "max_iter" => f.max_iter = count()?,
            "tol" => f.tol = float()?,
            "learn_intercepts" => f.learn_intercepts = value.parse().map_err(|e: std::str::ParseBoolError| bad(e.to_string()))?,
            "seed" => f.seed = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            "init" => f.init = value.parse().map_err(|e: Error| bad(e.to_string()))?,
            "max_halvings" => f.max_halvings = count()?,
            "d0" => f.intercepts.d0 = float()?,
            "d1" => f.intercepts.d1 = float()?,
            "delta" => f.intercepts.delta = float()?,
            "c1" => f.intercepts.c1 = float()?,
            "c2" => f.intercepts.c2 = float()?,
            "link" => cfg.link = value.parse().map_err(|e: Error| bad(e.to_string()))?,
            other => return Err(parse_err(path, lineno, format!("unknown key `{other}`"))),
        }
    }
    cfg.fit.validate().map_err(|e| parse_err(path, 0, e.to_string()))?;
    Ok(cfg)
}

/// Inverse of [`parse_config`]; every key is written.
pub fn format_config(cfg: &RunConfig) -> String {
    let f = &cfg.fit;
    let d: &Intercepts = &f.intercepts;
    let mut out = String::new();
    let _ = writeln!(out, "k1 = {}", f.k1);
    let _ = writeln!(out, "k2 = {}", f.k2);
    let _ = writeln!(out, "c = {}", f.c);
    let _ = writeln!(out, "kappa = {}", f.kappa);
    let _ = writeln!(out, "a_n = {}", f.a_n);
    for (key, xi) in [("xi1", f.xi1), ("xi2", f.xi2), ("xi3", f.xi3), ("xi4", f.xi4)] {
        if let Some(v) = xi {
            let _ = writeln!(out, "{key} = {v}");
        }
    }
    let _ = writeln!(out, "max_iter = {}", f.max_iter);
    let _ = writeln!(out, "tol = {}", f.tol);
    let _ = writeln!(out, "learn_intercepts = {}", f.learn_intercepts);
    let _ = writeln!(out, "seed = {}", f.seed);
    let _ = writeln!(out, "init = {}", f.init);
    let _ = writeln!(out, "max_halvings = {}", f.max_halvings);
    let _ = writeln!(out, "d0 = {}", d.d0);
    let _ = writeln!(out, "d1 = {}", d.d1);
    let _ = writeln!(out, "delta = {}", d.delta);
    let _ = writeln!(out, "c1 = {}", d.c1);
    let _ = writeln!(out, "c2 = {}", d.c2);
    let _ = writeln!(out, "link = {}", cfg.link);
    out
}

pub fn read_config(path: &Path) -> Result<RunConfig> {
    parse_config(&read_input(path)?, path)
}
