use std::io::Write;
use std::path::Path;

use dsqs_core::phase_space::GridExport;

use crate::commands::CliError;

/// Writes bytes to stdout, or to a file through a sibling temp file and a
/// rename so readers never observe a partial artifact.
pub fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match output {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(parent) if !parent.as_os_str().is_empty() => parent,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
            Ok(())
        }
    }
}

pub fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut body = serde_json::to_vec_pretty(value)?;
    body.push(b'\n');
    Ok(body)
}

fn finish_csv(writer: csv::Writer<Vec<u8>>) -> Vec<u8> {
    writer.into_inner().expect("in-memory csv flush")
}

/// Grid rows in storage order with explicit coordinate column names
/// (mu,nu for distributions, eta,xi for characteristic-domain tables).
pub fn grid_csv_bytes(
    export: &GridExport,
    coords: (&str, &str),
) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([coords.0, coords.1, "re", "im"])?;
    for (a, b, re, im) in export.labeled_rows()? {
        w.serialize((a, b, re, im))?;
    }
    Ok(finish_csv(w))
}

pub fn scan_csv_bytes(rows: &[dsqs_core::entropy::ScanPoint]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "s",
        "E_joint",
        "E_Q",
        "E_R",
        "E_cond_Q",
        "E_cond_R",
        "correlation",
    ])?;
    for p in rows {
        w.serialize((
            p.s,
            p.e_joint,
            p.e_q,
            p.e_r,
            p.e_cond_q,
            p.e_cond_r,
            p.correlation,
        ))?;
    }
    Ok(finish_csv(w))
}

pub fn rows_csv_bytes<R: serde::Serialize>(
    header: &[&str],
    rows: impl IntoIterator<Item = R>,
) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    Ok(finish_csv(w))
}
