//! Dataset loaders (LIBSVM, CSV), dataset export and atomic file writes.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};
use sgevp_core::Dataset;

use crate::error::{CliError, CliResult};

/// Positive labels become +1, everything else −1, so 0/1 files load as well.
fn sign_label(raw: f64) -> f64 {
    if raw > 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn dataset_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "data".into())
}

/// Reads `label idx:val …` lines with 1-based indices. Missing entries are
/// zero. `features` fixes the width; otherwise the largest index seen is used.
pub fn load_libsvm(path: &Path, features: Option<usize>) -> CliResult<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_libsvm(&text, path, features)
}

pub fn parse_libsvm(text: &str, path: &Path, features: Option<usize>) -> CliResult<Dataset> {
    let parse_err = |line: usize, message: String| CliError::Parse { path: path.to_path_buf(), line, message };
    let mut rows: Vec<BTreeMap<usize, f64>> = Vec::new();
    let mut labels = Vec::new();
    let mut width = 0;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().unwrap_or_default();
        let label: f64 = label_tok.parse().map_err(|_| parse_err(line, format!("bad label {label_tok:?}")))?;
        let mut row = BTreeMap::new();
        for tok in tokens {
            let (idx, val) = tok.split_once(':').ok_or_else(|| parse_err(line, format!("expected idx:val, got {tok:?}")))?;
            let idx: usize = idx.parse().map_err(|_| parse_err(line, format!("bad index in {tok:?}")))?;
            let val: f64 = val.parse().map_err(|_| parse_err(line, format!("bad value in {tok:?}")))?;
            if idx == 0 {
                return Err(parse_err(line, "indices are 1-based".into()));
            }
            if features.is_some_and(|d| idx > d) {
                return Err(parse_err(line, format!("index {idx} exceeds {} features", features.unwrap_or(0))));
            }
            if !val.is_finite() {
                return Err(parse_err(line, format!("non-finite value in {tok:?}")));
            }
            if row.insert(idx - 1, val).is_some() {
                return Err(parse_err(line, format!("index {idx} repeated")));
            }
            width = width.max(idx);
        }
        rows.push(row);
        labels.push(sign_label(label));
    }
    if rows.is_empty() {
        return Err(CliError::EmptyFile(path.to_path_buf()));
    }
    let cols = features.unwrap_or(width).max(1);
    let mut dense = vec![0.0; rows.len() * cols];
    for (r, row) in rows.iter().enumerate() {
        for (&j, &v) in row {
            dense[r * cols + j] = v;
        }
    }
    Ok(Dataset::new(dataset_name(path), rows.len(), cols, dense, Some(labels))?)
}

/// Reads a comma-separated file with a header row. With `labeled` the last
/// column holds the class label.
pub fn load_csv(path: &Path, labeled: bool) -> CliResult<Dataset> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_csv(&bytes, path, labeled)
}

pub fn parse_csv(bytes: &[u8], path: &Path, labeled: bool) -> CliResult<Dataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(bytes);
    let parse_err = |line: usize, message: String| CliError::Parse { path: path.to_path_buf(), line, message };
    let header_len = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.len();
    let cols = if labeled { header_len.saturating_sub(1) } else { header_len };
    if cols == 0 {
        return Err(parse_err(1, "header declares no feature columns".into()));
    }
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| parse_err(line, format!("column {}: bad number {field:?}", j + 1)))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("column {}: non-finite value", j + 1)));
            }
            if labeled && j == cols {
                labels.push(sign_label(v));
            } else {
                features.push(v);
            }
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(CliError::EmptyFile(path.to_path_buf()));
    }
    Ok(Dataset::new(dataset_name(path), rows, cols, features, labeled.then_some(labels))?)
}

/// CSV rendering with a `x1..xd[,label]` header; floats use the shortest
/// representation that reads back exactly.
pub fn dataset_csv(data: &Dataset) -> Vec<u8> {
    let mut out = Vec::new();
    let mut header: Vec<String> = (1..=data.cols()).map(|j| format!("x{j}")).collect();
    if data.labels().is_some() {
        header.push("label".into());
    }
    writeln!(out, "{}", header.join(",")).expect("write to Vec");
    for i in 0..data.rows() {
        let mut fields: Vec<String> = data.row(i).iter().map(|v| v.to_string()).collect();
        if let Some(y) = data.labels() {
            fields.push(y[i].to_string());
        }
        writeln!(out, "{}", fields.join(",")).expect("write to Vec");
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
