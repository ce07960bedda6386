//! Feature CSV files and atomic output writes.
//!
//! Feature CSV: header `label,<feature>,...` (normally `label,P1,...,P10`),
//! one row per frame, floats in shortest round-trip form.

use std::io::{self, Write};
use std::path::Path;

use crate::dataset::LabeledFeatureSet;

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Builds CSV text from a header and rows of already formatted fields.
pub fn csv_text<I, R, S>(header: &[&str], rows: I) -> io::Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

pub fn features_csv(set: &LabeledFeatureSet) -> io::Result<Vec<u8>> {
    let mut header = vec!["label"];
    header.extend(set.feature_names().iter().map(String::as_str));
    csv_text(
        &header,
        set.rows().zip(set.labels()).map(|(row, label)| {
            std::iter::once(label.to_string()).chain(row.iter().map(|&v| fmt_f64(v)))
        }),
    )
}

pub fn write_features_csv(path: &Path, set: &LabeledFeatureSet) -> io::Result<()> {
    write_atomic(path, &features_csv(set)?)
}

fn invalid(msg: String) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg)
}

pub fn parse_features_csv(text: &[u8]) -> io::Result<LabeledFeatureSet> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text);
    let header = r.headers()?.clone();
    if header.get(0) != Some("label") || header.len() < 2 {
        return Err(invalid("feature CSV must start with `label` followed by feature columns".into()));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let label = rec[0]
            .trim()
            .parse::<u32>()
            .map_err(|_| invalid(format!("line {line}: bad label {:?}", &rec[0])))?;
        let row = rec
            .iter()
            .skip(1)
            .map(|f| f.trim().parse::<f64>().map_err(|_| invalid(format!("line {line}: bad number {f:?}"))))
            .collect::<io::Result<Vec<f64>>>()?;
        labels.push(label);
        rows.push(row);
    }
    LabeledFeatureSet::new(names, rows, labels).map_err(|e| invalid(e.to_string()))
}

pub fn read_features_csv(path: &Path) -> io::Result<LabeledFeatureSet> {
    let bytes = std::fs::read(path).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    parse_features_csv(&bytes).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}
