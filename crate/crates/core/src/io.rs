//! CSV readers and writers for every on-disk format.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64` exactly.

use std::io::{Read, Write};

use crate::adversary::TraceRow;
use crate::error::{Error, Result};
use crate::experiments::{ReturnRecord, ReturnsTable, RiskSweepRecord};
use crate::point_process::PointConfiguration;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(field: &str, record: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|e| Error::Parse { record, message: format!("{field:?}: {e}") })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse { record, message: format!("non-finite value {field:?}") })
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input)
}

fn dim_header(prefix: &str, dim: usize) -> impl Iterator<Item = String> + '_ {
    (1..=dim).map(move |k| format!("{prefix}_{k}"))
}

fn expect_columns(headers: &csv::StringRecord, prefix: &str, skip: usize) -> Result<usize> {
    let dim = headers.len().saturating_sub(skip);
    if dim == 0 {
        return Err(Error::Parse { record: 0, message: "no data columns".into() });
    }
    for (k, (got, want)) in headers.iter().skip(skip).zip(dim_header(prefix, dim)).enumerate() {
        if got != want {
            return Err(Error::Parse {
                record: 0,
                message: format!("column {} is {got:?}, expected {want:?}", k + skip + 1),
            });
        }
    }
    Ok(dim)
}

/// Samples CSV with header `dim_1,…,dim_d`.
pub fn read_samples<R: Read>(input: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = reader(input);
    let dim = expect_columns(rdr.headers()?, "dim", 0)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != dim {
            return Err(Error::Parse { record: i + 1, message: format!("expected {dim} fields") });
        }
        out.push(rec.iter().map(|f| parse_f64(f, i + 1)).collect::<Result<Vec<_>>>()?);
    }
    Ok(out)
}

pub fn write_samples<W: Write>(out: W, samples: &[Vec<f64>], dim: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(dim_header("dim", dim))?;
    for x in samples {
        if x.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: x.len() });
        }
        w.write_record(x.iter().map(|v| fmt_f64(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Configurations CSV with header `replication,n,a,y_1,…,y_d`, one atom per
/// row; atoms of a replication are contiguous and numbered from 0.
pub fn read_configurations<R: Read>(input: R) -> Result<Vec<PointConfiguration>> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().take(3).ne(["replication", "n", "a"]) {
        return Err(Error::Parse { record: 0, message: "header must start with replication,n,a".into() });
    }
    let dim = expect_columns(&headers, "y", 3)?;
    let mut out = Vec::new();
    let mut current: Option<(u64, Vec<f64>, Vec<f64>)> = None;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 1;
        if rec.len() != dim + 3 {
            return Err(Error::Parse { record: line, message: format!("expected {} fields", dim + 3) });
        }
        let parse_int = |f: &str| {
            f.parse::<u64>().map_err(|e| Error::Parse { record: line, message: format!("{f:?}: {e}") })
        };
        let rep = parse_int(&rec[0])?;
        let n = parse_int(&rec[1])?;
        let a = parse_f64(&rec[2], line)?;
        let y = rec.iter().skip(3).map(|f| parse_f64(f, line)).collect::<Result<Vec<_>>>()?;
        match &mut current {
            Some((r, arrivals, marks)) if *r == rep => {
                if n != arrivals.len() as u64 {
                    return Err(Error::Parse { record: line, message: "atoms out of order".into() });
                }
                arrivals.push(a);
                marks.extend(y);
            }
            _ => {
                if let Some((_, arrivals, marks)) = current.take() {
                    out.push(PointConfiguration::new(dim, arrivals, marks)?);
                }
                if n != 0 {
                    return Err(Error::Parse { record: line, message: "replication must start at atom 0".into() });
                }
                current = Some((rep, vec![a], y));
            }
        }
    }
    if let Some((_, arrivals, marks)) = current {
        out.push(PointConfiguration::new(dim, arrivals, marks)?);
    }
    Ok(out)
}

pub fn write_configurations<W: Write>(out: W, configurations: &[PointConfiguration]) -> Result<()> {
    let dim = configurations.first().map_or(0, PointConfiguration::dim);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["replication", "n", "a"].into_iter().map(String::from).chain(dim_header("y", dim)))?;
    for (r, cfg) in configurations.iter().enumerate() {
        if cfg.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: cfg.dim() });
        }
        for (n, (a, y)) in cfg.atoms().enumerate() {
            let mut row = vec![r.to_string(), n.to_string(), fmt_f64(a)];
            row.extend(y.iter().map(|v| fmt_f64(*v)));
            w.write_record(row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Raw returns CSV with header `date,company,industry,return`.
pub fn read_returns<R: Read>(input: R) -> Result<Vec<ReturnRecord>> {
    let mut rdr = reader(input);
    if rdr.headers()?.iter().ne(["date", "company", "industry", "return"]) {
        return Err(Error::Parse { record: 0, message: "header must be date,company,industry,return".into() });
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 4 {
            return Err(Error::Parse { record: i + 1, message: "expected 4 fields".into() });
        }
        out.push(ReturnRecord {
            date: rec[0].to_string(),
            company: rec[1].to_string(),
            industry: rec[2].to_string(),
            value: parse_f64(&rec[3], i + 1)?,
        });
    }
    Ok(out)
}

pub fn write_returns<W: Write>(out: W, records: &[ReturnRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "company", "industry", "return"])?;
    for r in records {
        w.write_record([r.date.as_str(), &r.company, &r.industry, &fmt_f64(r.value)])?;
    }
    w.flush()?;
    Ok(())
}

/// Table CSV with header `date,<label>…`.
pub fn write_table<W: Write>(out: W, table: &ReturnsTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once("date").chain(table.labels.iter().map(String::as_str)))?;
    for (date, row) in table.dates.iter().zip(&table.rows) {
        w.write_record(std::iter::once(date.clone()).chain(row.iter().map(|v| fmt_f64(*v))))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table<R: Read>(input: R) -> Result<ReturnsTable> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    if headers.get(0) != Some("date") || headers.len() < 2 {
        return Err(Error::Parse { record: 0, message: "header must be date,<labels>".into() });
    }
    let labels: Vec<String> = headers.iter().skip(1).map(String::from).collect();
    let mut dates = Vec::new();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != labels.len() + 1 {
            return Err(Error::Parse { record: i + 1, message: "ragged row".into() });
        }
        dates.push(rec[0].to_string());
        rows.push(rec.iter().skip(1).map(|f| parse_f64(f, i + 1)).collect::<Result<Vec<_>>>()?);
    }
    ReturnsTable::new(labels, dates, rows)
}

/// Trace CSV with header `k,lambda,R,risk`.
pub fn write_trace<W: Write>(out: W, trace: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "lambda", "R", "risk"])?;
    for row in trace {
        w.write_record([row.k.to_string(), fmt_f64(row.lambda), fmt_f64(row.inner), fmt_f64(row.risk)])?;
    }
    w.flush()?;
    Ok(())
}

/// Sweep CSV with header `delta,mode,robust_risk,true_risk,error,seed,replications`.
pub fn write_sweep<W: Write>(out: W, records: &[RiskSweepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["delta", "mode", "robust_risk", "true_risk", "error", "seed", "replications"])?;
    for r in records {
        w.write_record([
            fmt_f64(r.delta),
            r.mode.name().to_string(),
            fmt_f64(r.robust_risk),
            fmt_f64(r.true_risk),
            fmt_f64(r.error),
            r.seed.to_string(),
            r.replications.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
