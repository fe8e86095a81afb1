use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::error::CliError;

/// Float formatting with 17 significant digits, enough to round-trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<R>(path: &Path, header: &[&str], rows: R) -> Result<(), CliError>
where
    R: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_series(path: &Path, times: &[f64], values: &[f64]) -> Result<(), CliError> {
    write_csv(path, &["t", "value"], times.iter().zip(values).map(|(t, v)| vec![fmt_f64(*t), fmt_f64(*v)]))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(File::create(path)?, value)?;
    Ok(())
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes `<output>.meta.json` describing how `output` was produced.
pub fn write_sidecar<C: Serialize>(
    output: &Path,
    command: &str,
    config: &C,
    frequency_unit: f64,
    extra: serde_json::Value,
) -> Result<(), CliError> {
    let meta = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "units": {
            "frequency_unit": frequency_unit,
            "time": "Omega * t, Omega = |omega1| (or |omega2| when omega1 = 0)",
            "energy": "E / Omega",
        },
        "results": extra,
    });
    write_json(&sidecar_path(output), &meta)
}
