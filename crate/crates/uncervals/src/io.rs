//! CSV and JSON file formats.
//!
//! Datasets are CSV files with header `l,u,x1,...,xp`; an infinite upper
//! endpoint is written as the literal `inf`. Floats are written in Rust's
//! shortest round-trip form, so a save followed by a load is bit-exact.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use uncervals_core::simgen::CensorKind;
use uncervals_core::{Dataset, IntervalObservation, PredictionSet};

use crate::error::{CliError, Result};

/// Round-trip text form of a float; `inf` and `-inf` for infinities.
pub fn fmt_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

pub fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("cannot parse {s:?} as a number"))?;
    if v.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(v)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| CliError::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    create_raw(path).map_err(|e| CliError::io(path, e))
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(reader)
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.position() {
        Some(p) => CliError::Parse { path: path.into(), row: p.line() as usize, message: e.to_string() },
        None => CliError::format(path, e),
    }
}

/// Parses a dataset; `row` in errors is the 1-based data row.
pub fn parse_dataset<R: Read>(reader: R, path: &Path) -> Result<Dataset> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() < 2 || &header[0] != "l" || &header[1] != "u" {
        return Err(CliError::format(path, "header must start with `l,u`"));
    }
    let dim = header.len() - 2;
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| csv_error(path, e))?;
        if record.len() != header.len() {
            return Err(CliError::Parse {
                path: path.into(),
                row,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let mut values = Vec::with_capacity(record.len());
        for field in record.iter() {
            values.push(parse_f64(field).map_err(|message| CliError::Parse { path: path.into(), row, message })?);
        }
        let obs = IntervalObservation { l: values[0], u: values[1], x: values[2..].to_vec() };
        obs.validate(row)?;
        rows.push(obs);
    }
    Ok(Dataset::with_dim(rows, dim)?)
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    parse_dataset(open(path)?, path)
}

fn covariate_header(dim: usize) -> Vec<String> {
    (1..=dim).map(|k| format!("x{k}")).collect()
}

pub fn write_dataset_to<W: Write>(out: W, data: &Dataset) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["l".to_string(), "u".to_string()];
    header.extend(covariate_header(data.covariate_dim()));
    w.write_record(&header)?;
    for o in data.observations() {
        let mut rec = vec![fmt_f64(o.l), fmt_f64(o.u)];
        rec.extend(o.x.iter().map(|v| fmt_f64(*v)));
        w.write_record(&rec)?;
    }
    w.flush()
}

pub fn write_dataset(path: &Path, data: &Dataset) -> Result<()> {
    write_dataset_to(create(path)?, data).map_err(|e| CliError::io(path, e))
}

/// Covariate table: any header, one numeric column per coordinate.
pub fn read_covariates(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv_reader(open(path)?);
    let header: Vec<String> = rdr.headers().map_err(|e| csv_error(path, e))?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| csv_error(path, e))?;
        if record.len() != header.len() {
            return Err(CliError::Parse {
                path: path.into(),
                row,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let x = record
            .iter()
            .map(|f| parse_f64(f).map_err(|message| CliError::Parse { path: path.into(), row, message }))
            .collect::<Result<Vec<f64>>>()?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Parse { path: path.into(), row, message: "covariates must be finite".into() });
        }
        rows.push(x);
    }
    Ok((header, rows))
}

/// Prediction table: covariates followed by `lpb`, or by `lo,hi` when
/// `two_sided`.
pub fn write_predictions(path: &Path, header: &[String], sets: &[PredictionSet], two_sided: bool) -> Result<()> {
    let run = || -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(create_raw(path)?);
        let mut head = header.to_vec();
        if two_sided {
            head.extend(["lo".to_string(), "hi".to_string()]);
        } else {
            head.push("lpb".to_string());
        }
        w.write_record(&head)?;
        for s in sets {
            let mut rec: Vec<String> = s.x.iter().map(|v| fmt_f64(*v)).collect();
            rec.push(fmt_f64(s.lo));
            if two_sided {
                rec.push(fmt_f64(s.hi));
            }
            w.write_record(&rec)?;
        }
        w.flush()
    };
    run().map_err(|e| CliError::io(path, e))
}

fn create_raw(path: &Path) -> std::io::Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    File::create(path).map(BufWriter::new)
}

/// Sidecar with the latent time and censoring type of every simulated row.
pub fn write_true_times(path: &Path, times: &[f64], kinds: &[CensorKind]) -> Result<()> {
    let run = || -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(create_raw(path)?);
        w.write_record(["t", "censoring"])?;
        for (t, k) in times.iter().zip(kinds) {
            let kind = match k {
                CensorKind::Left => "left",
                CensorKind::Interval => "interval",
                CensorKind::Right => "right",
            };
            w.write_record([fmt_f64(*t).as_str(), kind])?;
        }
        w.flush()
    };
    run().map_err(|e| CliError::io(path, e))
}

/// Writes named columns of equal length.
pub fn write_columns(path: &Path, columns: &[(&str, Vec<String>)]) -> Result<()> {
    let run = || -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(create_raw(path)?);
        w.write_record(columns.iter().map(|(name, _)| *name))?;
        let rows = columns.first().map_or(0, |(_, c)| c.len());
        for i in 0..rows {
            w.write_record(columns.iter().map(|(_, c)| c[i].as_str()))?;
        }
        w.flush()
    };
    run().map_err(|e| CliError::io(path, e))
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(to_json_string(value).as_bytes()).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::format(path, e))
}

/// Reads a JSON or TOML configuration file (by extension) as a JSON value.
pub fn read_config_file(path: &Path) -> Result<serde_json::Value> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text).map_err(|e| CliError::io(path, e))?;
    let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    if is_toml {
        let table: toml::Table = toml::from_str(&text).map_err(|e| CliError::format(path, e))?;
        serde_json::to_value(table).map_err(|e| CliError::format(path, e))
    } else {
        serde_json::from_str(&text).map_err(|e| CliError::format(path, e))
    }
}
