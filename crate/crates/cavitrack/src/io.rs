//! CSV and JSON file formats.
//!
//! Floating-point CSV fields are written with 17 significant digits so that
//! every value reads back bit-identical.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use cavitrack_core::{EnsembleRecord, FitParams, FitResult, TemperatureEstimate, TransitTrace};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const TRACE_HEADER: [&str; 3] = ["t_s", "expected_T", "counts"];
pub const ENSEMBLE_HEADER: [&str; 3] = ["v0_mps", "t_arr_ms", "v_arr_mps"];

/// Full-precision scientific notation.
pub fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// Destination for an output: a file, or stdout when no path is given.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::io(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn display_path(path: Option<&Path>) -> PathBuf {
    path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf)
}

pub fn write_csv<I>(path: Option<&Path>, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let shown = display_path(path);
    let io_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => CliError::io(&shown, e),
        other => CliError::format(&shown, format!("{other:?}")),
    };
    let mut w = csv::Writer::from_writer(open_output(path)?);
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|e| CliError::io(&shown, e))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let line = e.position().map(|p| p.line());
    match (e.into_kind(), line) {
        (csv::ErrorKind::Io(e), _) => CliError::io(path, e),
        (csv::ErrorKind::Deserialize { err, .. }, Some(line)) => {
            CliError::format(path, format!("line {line}: {err}"))
        }
        (kind, Some(line)) => CliError::format(path, format!("line {line}: {kind:?}")),
        (kind, None) => CliError::format(path, format!("{kind:?}")),
    }
}

fn reader(path: &Path) -> Result<csv::Reader<File>, CliError> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(f))
}

fn check_header(path: &Path, r: &mut csv::Reader<File>, expected: &[&str]) -> Result<(), CliError> {
    let header = r.headers().map_err(|e| csv_error(path, e))?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(CliError::format(
            path,
            format!("line 1: expected header `{}`", expected.join(",")),
        ));
    }
    Ok(())
}

pub fn write_trace(path: Option<&Path>, trace: &TransitTrace) -> Result<(), CliError> {
    let rows = (0..trace.len()).map(|i| {
        vec![
            sci(trace.t[i]),
            sci(trace.expected_t[i]),
            trace.counts.get(i).map(u64::to_string).unwrap_or_default(),
        ]
    });
    write_csv(path, &TRACE_HEADER, rows)
}

#[derive(Deserialize)]
struct TraceRow {
    t_s: f64,
    #[serde(rename = "expected_T")]
    expected_t: f64,
    counts: Option<u64>,
}

/// Reads a trace. The counts column must be filled on every row or on none.
pub fn read_trace(path: &Path) -> Result<TransitTrace, CliError> {
    let mut r = reader(path)?;
    check_header(path, &mut r, &TRACE_HEADER)?;
    let mut trace = TransitTrace::default();
    let mut counted = None;
    for row in r.deserialize::<TraceRow>() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = trace.len() + 2;
        match (counted, row.counts) {
            (None, _) => counted = Some(row.counts.is_some()),
            (Some(had), now) if had != now.is_some() => {
                return Err(CliError::format(
                    path,
                    format!("line {line}: counts must be given on every row or on none"),
                ))
            }
            _ => {}
        }
        trace.t.push(row.t_s);
        trace.expected_t.push(row.expected_t);
        trace.counts.extend(row.counts);
    }
    trace.validate()?;
    Ok(trace)
}

pub fn write_ensemble(path: Option<&Path>, records: &[EnsembleRecord]) -> Result<(), CliError> {
    let rows = records
        .iter()
        .map(|r| vec![sci(r.v0), sci(r.t_arr), sci(r.v_arr)]);
    write_csv(path, &ENSEMBLE_HEADER, rows)
}

#[derive(Deserialize)]
struct EnsembleRow {
    v0_mps: f64,
    t_arr_ms: f64,
    v_arr_mps: f64,
}

pub fn read_ensemble(path: &Path) -> Result<Vec<EnsembleRecord>, CliError> {
    let mut r = reader(path)?;
    check_header(path, &mut r, &ENSEMBLE_HEADER)?;
    r.deserialize::<EnsembleRow>()
        .map(|row| {
            let row = row.map_err(|e| csv_error(path, e))?;
            Ok(EnsembleRecord {
                v0: row.v0_mps,
                t_arr: row.t_arr_ms,
                v_arr: row.v_arr_mps,
            })
        })
        .collect()
}

/// `FitResult` as stored on disk. Uncertainties are `null` when the Fisher
/// matrix could not be inverted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub y_off_um: f64,
    pub v_mps: f64,
    pub t_c_s: f64,
    pub sigma_y_um: Option<f64>,
    pub sigma_v_mps: Option<f64>,
    pub sigma_tc_s: Option<f64>,
    pub log_lik: f64,
    pub mirror_log_lik: f64,
    pub converged: bool,
    pub n_evals: usize,
}

impl From<&FitResult> for FitRecord {
    fn from(f: &FitResult) -> Self {
        let finite = |v: f64| v.is_finite().then_some(v);
        FitRecord {
            y_off_um: f.params.y_off,
            v_mps: f.params.v,
            t_c_s: f.params.t_c,
            sigma_y_um: finite(f.sigma.y_off),
            sigma_v_mps: finite(f.sigma.v),
            sigma_tc_s: finite(f.sigma.t_c),
            log_lik: f.log_lik,
            mirror_log_lik: f.mirror_log_lik,
            converged: f.converged,
            n_evals: f.n_evals,
        }
    }
}

impl FitRecord {
    pub fn params(&self) -> FitParams {
        FitParams {
            y_off: self.y_off_um,
            v: self.v_mps,
            t_c: self.t_c_s,
        }
    }
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    let shown = display_path(path);
    let mut w = open_output(path)?;
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| CliError::format(&shown, e.to_string()))?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(&shown, e))
}

pub fn read_fit(path: &Path) -> Result<FitRecord, CliError> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::format(path, e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureRecord {
    pub temperature_k: f64,
    pub sigma_t_k: f64,
    pub n_used: usize,
    pub v_min_mps: f64,
    pub t_min_ms: f64,
}

impl From<&TemperatureEstimate> for TemperatureRecord {
    fn from(t: &TemperatureEstimate) -> Self {
        TemperatureRecord {
            temperature_k: t.temperature,
            sigma_t_k: t.sigma_t,
            n_used: t.n_used,
            v_min_mps: t.v_min,
            t_min_ms: t.t_min,
        }
    }
}

#[derive(Deserialize)]
struct ArrivalRow {
    file: String,
    t_arr_ms: f64,
}

/// `file,t_arr_ms` rows mapping fit-result file names to arrival times
/// after release.
pub fn read_arrivals(path: &Path) -> Result<BTreeMap<String, f64>, CliError> {
    let mut r = reader(path)?;
    check_header(path, &mut r, &["file", "t_arr_ms"])?;
    let mut map = BTreeMap::new();
    for row in r.deserialize::<ArrivalRow>() {
        let row = row.map_err(|e| csv_error(path, e))?;
        map.insert(row.file, row.t_arr_ms);
    }
    Ok(map)
}

/// Regular files in `dir` with the given extension, sorted by name.
pub fn list_files(dir: &Path, extension: &str) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == extension) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}
