//! CSV/JSON reading and atomic output.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};
use snv_core::fitting::DataSeries;
use snv_core::numerics::FitResult;

use crate::error::CliError;

/// Significant digits of every serialized number.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// `%.9g`-style formatting: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros removed.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `v` rounded to [`SIGNIFICANT_DIGITS`].
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() {
        return v;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v).parse().expect("round trip")
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub enum Cell {
    Num(f64),
    Text(String),
}

pub fn csv_bytes(header: &[&str], rows: &[Vec<Cell>]) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| CliError::Io { path: "<csv buffer>".into(), source: e.into() };
    writer.write_record(header).map_err(io_err)?;
    for row in rows {
        let fields: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(v) => format_number(*v),
                Cell::Text(t) => t.clone(),
            })
            .collect();
        writer.write_record(&fields).map_err(io_err)?;
    }
    writer.into_inner().map_err(|e| CliError::Io { path: "<csv buffer>".into(), source: e.into_error() })
}

/// Required columns, then optional ones (`None` when absent from the header).
pub type Columns = (Vec<Vec<f64>>, Vec<Option<Vec<f64>>>);

/// Reads the named numeric columns; comment lines start with `#`.
pub fn read_columns(path: &Path, required: &[&str], optional: &[&str]) -> Result<Columns, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(file);
    let headers = match reader.headers() {
        Ok(h) if !h.is_empty() && !(h.len() == 1 && h[0].is_empty()) => h.clone(),
        Ok(_) => return Err(CliError::EmptyFile(path.display().to_string())),
        Err(e) => return Err(csv_error(path, e)),
    };
    let find = |name: &str| headers.iter().position(|h| h == name);
    let req_idx: Vec<usize> = required
        .iter()
        .map(|n| find(n).ok_or_else(|| CliError::MissingColumn((*n).to_string())))
        .collect::<Result<_, _>>()?;
    let opt_idx: Vec<Option<usize>> = optional.iter().map(|n| find(n)).collect();

    let mut req_cols = vec![Vec::new(); required.len()];
    let mut opt_cols: Vec<Option<Vec<f64>>> = opt_idx.iter().map(|i| i.map(|_| Vec::new())).collect();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let parse = |idx: usize, name: &str| -> Result<f64, CliError> {
            record
                .get(idx)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| CliError::BadNumber { line, column: name.to_string() })
        };
        for (k, &idx) in req_idx.iter().enumerate() {
            req_cols[k].push(parse(idx, required[k])?);
        }
        for (k, idx) in opt_idx.iter().enumerate() {
            if let (Some(idx), Some(col)) = (idx, opt_cols[k].as_mut()) {
                col.push(parse(*idx, optional[k])?);
            }
        }
    }
    if req_cols.first().is_none_or(|c| c.is_empty()) {
        return Err(CliError::EmptyFile(path.display().to_string()));
    }
    Ok((req_cols, opt_cols))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    if let Some(pos) = e.position() {
        return CliError::BadNumber { line: pos.line(), column: "<row>".into() };
    }
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Io { path: path.display().to_string(), source: std::io::Error::other(format!("{other:?}")) },
    }
}

/// Loads `x`, `y` and, when present, the `<y>_err` uncertainty column.
pub fn load_series_csv(path: &Path, x: &str, y: &str) -> Result<DataSeries, CliError> {
    let err_name = format!("{y}_err");
    let (mut req, mut opt) = read_columns(path, &[x, y], &[err_name.as_str()])?;
    let ys = req.pop().expect("two columns");
    let xs = req.pop().expect("two columns");
    Ok(DataSeries::with_errors(xs, ys, opt.pop().flatten())?)
}

/// Header of a CSV file, ignoring comment lines.
pub fn read_header(path: &Path) -> Result<Vec<String>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers().map_err(|e| csv_error(path, e))?;
    Ok(headers.iter().map(str::to_string).collect())
}

/// `{name: {value, std_error}, ..., residual_norm, converged}` plus extras.
pub fn fit_json(names: &[String], fit: &FitResult, extras: &[(&str, f64)]) -> Value {
    let mut map = Map::new();
    for ((name, value), err) in names.iter().zip(&fit.params).zip(&fit.std_errors) {
        map.insert(name.clone(), json!({ "value": round_sig(*value), "std_error": round_sig(*err) }));
    }
    for (name, value) in extras {
        map.insert((*name).to_string(), json!(round_sig(*value)));
    }
    map.insert("residual_norm".into(), json!(round_sig(fit.residual_norm)));
    map.insert("converged".into(), json!(fit.converged));
    Value::Object(map)
}
