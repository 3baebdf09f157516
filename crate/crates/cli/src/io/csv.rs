//! Comma-separated numeric tables with fixed headers.
//!
//! Writers emit 17 significant digits (`{:.16e}`) so reading a file back
//! reproduces every double bit-exactly. Readers validate the header shape
//! and report failures with 1-based line numbers; value-level invariants are
//! enforced by the core types and surface as validation errors naming the
//! offending line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use credal_core::metrics::SweepRow;
use credal_core::{
    BoxCredalSet, LabeledLogits, LogitMatrix, ProbabilityInterval, ProbabilityVector,
};

use crate::error::AppError;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn read_lines(path: &Path) -> Result<Vec<String>, AppError> {
    let text = fs::read_to_string(path).map_err(AppError::io(path))?;
    Ok(text.lines().map(|l| l.trim_end_matches('\r').to_string()).collect())
}

fn split_row(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

/// Checks `cells` is exactly `prefix_1..prefix_k`; `k` inferred from length.
fn expect_indexed_header(
    path: &Path,
    cells: &[&str],
    prefix: &str,
) -> Result<usize, AppError> {
    if cells.is_empty() || cells.iter().any(|c| c.is_empty()) {
        return Err(AppError::parse(path, 1, "empty header column"));
    }
    for (i, cell) in cells.iter().enumerate() {
        let want = format!("{prefix}_{}", i + 1);
        if *cell != want {
            return Err(AppError::parse(
                path,
                1,
                format!("expected header column {:?}, found {:?}", want, cell),
            ));
        }
    }
    Ok(cells.len())
}

fn parse_cell(path: &Path, line_no: usize, cell: &str, what: &str) -> Result<f64, AppError> {
    cell.parse::<f64>()
        .map_err(|_| AppError::parse(path, line_no, format!("bad {what} value {cell:?}")))
}

fn expect_width(
    path: &Path,
    line_no: usize,
    cells: &[&str],
    want: usize,
) -> Result<(), AppError> {
    if cells.len() != want {
        return Err(AppError::parse(
            path,
            line_no,
            format!("expected {want} columns, found {}", cells.len()),
        ));
    }
    Ok(())
}

fn core_err_at(path: &Path, line_no: usize, e: credal_core::Error) -> AppError {
    AppError::parse(path, line_no, e.to_string())
}

/// Logit rows under a `z_1,...,z_K` header; a trailing `y` column is
/// rejected here (labeled data goes through `read_labeled_logits`).
pub fn read_logits(path: &Path) -> Result<LogitMatrix, AppError> {
    let lines = read_lines(path);
    let lines = lines?;
    if lines.is_empty() {
        return Err(AppError::parse(path, 1, "empty file"));
    }
    let header = split_row(&lines[0]);
    let k = expect_indexed_header(path, &header, "z")?;
    let mut data = Vec::new();
    let mut rows = 0usize;
    for (i, line) in lines.iter().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let cells = split_row(line);
        expect_width(path, i + 1, &cells, k)?;
        for cell in &cells {
            data.push(parse_cell(path, i + 1, cell, "logit")?);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(AppError::parse(path, 1, "no data rows"));
    }
    LogitMatrix::new(data, k).map_err(AppError::from)
}

/// Logit rows plus 1-based labels under a `z_1,...,z_K,y` header.
pub fn read_labeled_logits(path: &Path) -> Result<LabeledLogits, AppError> {
    let lines = read_lines(path)?;
    if lines.is_empty() {
        return Err(AppError::parse(path, 1, "empty file"));
    }
    let header = split_row(&lines[0]);
    if header.last() != Some(&"y") {
        return Err(AppError::parse(path, 1, "expected final header column \"y\""));
    }
    let k = expect_indexed_header(path, &header[..header.len() - 1], "z")?;
    let mut data = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in lines.iter().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let cells = split_row(line);
        expect_width(path, i + 1, &cells, k + 1)?;
        for cell in &cells[..k] {
            data.push(parse_cell(path, i + 1, cell, "logit")?);
        }
        let y: usize = cells[k].parse().map_err(|_| {
            AppError::parse(path, i + 1, format!("bad label {:?}", cells[k]))
        })?;
        if y == 0 || y > k {
            return Err(AppError::parse(
                path,
                i + 1,
                format!("label {y} outside 1..={k}"),
            ));
        }
        labels.push(y - 1);
    }
    if labels.is_empty() {
        return Err(AppError::parse(path, 1, "no data rows"));
    }
    let logits = LogitMatrix::new(data, k)?;
    LabeledLogits::new(logits, labels).map_err(AppError::from)
}

/// Distribution rows under a `p_1,...,p_K` header. With `renormalize` every
/// row is divided by its sum before validation.
pub fn read_distributions(
    path: &Path,
    renormalize: bool,
) -> Result<Vec<ProbabilityVector>, AppError> {
    let lines = read_lines(path)?;
    if lines.is_empty() {
        return Err(AppError::parse(path, 1, "empty file"));
    }
    let header = split_row(&lines[0]);
    let k = expect_indexed_header(path, &header, "p")?;
    let mut out = Vec::new();
    for (i, line) in lines.iter().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let cells = split_row(line);
        expect_width(path, i + 1, &cells, k)?;
        let mut p = Vec::with_capacity(k);
        for cell in &cells {
            p.push(parse_cell(path, i + 1, cell, "probability")?);
        }
        if renormalize {
            let s: f64 = p.iter().sum();
            if s.is_nan() || s <= 0.0 || s.is_infinite() {
                return Err(AppError::parse(
                    path,
                    i + 1,
                    format!("row sum {s} cannot be renormalized"),
                ));
            }
            for x in &mut p {
                *x /= s;
            }
        }
        out.push(ProbabilityVector::new(p).map_err(|e| core_err_at(path, i + 1, e))?);
    }
    if out.is_empty() {
        return Err(AppError::parse(path, 1, "no data rows"));
    }
    Ok(out)
}

/// Interval rows under an interleaved `l_1,u_1,...,l_K,u_K` header.
pub fn read_boxes(path: &Path) -> Result<Vec<BoxCredalSet>, AppError> {
    let lines = read_lines(path)?;
    if lines.is_empty() {
        return Err(AppError::parse(path, 1, "empty file"));
    }
    let header = split_row(&lines[0]);
    if header.len() < 2 || !header.len().is_multiple_of(2) {
        return Err(AppError::parse(path, 1, "box header needs l_k,u_k pairs"));
    }
    let k = header.len() / 2;
    for i in 0..k {
        let (wl, wu) = (format!("l_{}", i + 1), format!("u_{}", i + 1));
        if header[2 * i] != wl || header[2 * i + 1] != wu {
            return Err(AppError::parse(
                path,
                1,
                format!("expected header columns {wl:?},{wu:?}"),
            ));
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines.iter().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let cells = split_row(line);
        expect_width(path, i + 1, &cells, 2 * k)?;
        let mut ivs = Vec::with_capacity(k);
        for j in 0..k {
            let lo = parse_cell(path, i + 1, cells[2 * j], "lower bound")?;
            let hi = parse_cell(path, i + 1, cells[2 * j + 1], "upper bound")?;
            ivs.push(
                ProbabilityInterval::new(lo, hi).map_err(|e| core_err_at(path, i + 1, e))?,
            );
        }
        out.push(BoxCredalSet::new(ivs).map_err(|e| core_err_at(path, i + 1, e))?);
    }
    if out.is_empty() {
        return Err(AppError::parse(path, 1, "no data rows"));
    }
    Ok(out)
}

fn write_text(path: &Path, text: &str) -> Result<(), AppError> {
    fs::write(path, text).map_err(AppError::io(path))
}

fn indexed_header(prefix: &str, k: usize) -> String {
    (1..=k).map(|i| format!("{prefix}_{i}")).collect::<Vec<_>>().join(",")
}

pub fn write_logits(path: &Path, m: &LogitMatrix) -> Result<(), AppError> {
    let mut s = indexed_header("z", m.n_classes());
    s.push('\n');
    for row in m.rows_iter() {
        push_row(&mut s, row.iter().copied());
    }
    write_text(path, &s)
}

pub fn write_labeled_logits(path: &Path, d: &LabeledLogits) -> Result<(), AppError> {
    let mut s = indexed_header("z", d.n_classes());
    s.push_str(",y\n");
    for (row, &y) in d.logits().rows_iter().zip(d.labels()) {
        for x in row {
            let _ = write!(s, "{},", fmt_f64(*x));
        }
        let _ = writeln!(s, "{}", y + 1);
    }
    write_text(path, &s)
}

pub fn write_distributions(path: &Path, ps: &[ProbabilityVector]) -> Result<(), AppError> {
    let k = ps.first().map_or(0, ProbabilityVector::len);
    let mut s = indexed_header("p", k);
    s.push('\n');
    for p in ps {
        push_row(&mut s, p.as_slice().iter().copied());
    }
    write_text(path, &s)
}

pub fn write_boxes(path: &Path, boxes: &[BoxCredalSet]) -> Result<(), AppError> {
    let k = boxes.first().map_or(0, BoxCredalSet::n_classes);
    let mut s = (1..=k)
        .map(|i| format!("l_{i},u_{i}"))
        .collect::<Vec<_>>()
        .join(",");
    s.push('\n');
    for b in boxes {
        let cells = (0..k).flat_map(|j| [b.lower(j), b.upper(j)]);
        push_row(&mut s, cells);
    }
    write_text(path, &s)
}

/// Per-instance uncertainty decomposition: `au,eu,tu` (eu is the selected
/// measure; au/tu are always the entropy extrema).
pub fn write_uncertainty(path: &Path, rows: &[(f64, f64, f64)]) -> Result<(), AppError> {
    let mut s = String::from("au,eu,tu\n");
    for &(au, eu, tu) in rows {
        push_row(&mut s, [au, eu, tu]);
    }
    write_text(path, &s)
}

/// Selected pool indices, 0-based, one per line under an `index` header.
pub fn write_indices(path: &Path, idx: &[usize]) -> Result<(), AppError> {
    let mut s = String::from("index\n");
    for i in idx {
        let _ = writeln!(s, "{i}");
    }
    write_text(path, &s)
}

/// Sweep rows as `alpha,coverage,efficiency,auroc`; absent metrics stay
/// empty cells.
pub fn write_pareto(path: &Path, rows: &[SweepRow]) -> Result<(), AppError> {
    let mut s = String::from("alpha,coverage,efficiency,auroc\n");
    for r in rows {
        let cov = r.coverage.map(fmt_f64).unwrap_or_default();
        let auroc = r.auroc.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(s, "{},{cov},{},{auroc}", fmt_f64(r.alpha), fmt_f64(r.efficiency));
    }
    write_text(path, &s)
}

fn push_row(s: &mut String, cells: impl IntoIterator<Item = f64>) {
    let mut first = true;
    for x in cells {
        if !first {
            s.push(',');
        }
        let _ = write!(s, "{}", fmt_f64(x));
        first = false;
    }
    s.push('\n');
}
