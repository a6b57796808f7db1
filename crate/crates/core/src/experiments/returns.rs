use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One row of the raw per-company returns file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnRecord {
    pub date: String,
    pub company: String,
    pub industry: String,
    #[serde(rename = "return")]
    pub value: f64,
}

/// Rectangular table of returns: one row per period, one column per label.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsTable {
    pub labels: Vec<String>,
    pub dates: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Periods dropped during ingestion because some column had no value.
    pub dropped_rows: usize,
}

impl ReturnsTable {
    pub fn new(labels: Vec<String>, dates: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if dates.len() != rows.len() {
            return Err(Error::DimensionMismatch { expected: rows.len(), got: dates.len() });
        }
        for row in &rows {
            if row.len() != labels.len() {
                return Err(Error::DimensionMismatch { expected: labels.len(), got: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("table values must be finite".into()));
            }
        }
        Ok(Self { labels, dates, rows, dropped_rows: 0 })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

/// Block length in trading periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockLength {
    Weekly,
    Annual,
    Periods(usize),
}

impl BlockLength {
    pub const TRADING_DAYS_PER_WEEK: usize = 5;
    pub const TRADING_DAYS_PER_YEAR: usize = 252;

    pub fn periods(self) -> usize {
        match self {
            BlockLength::Weekly => Self::TRADING_DAYS_PER_WEEK,
            BlockLength::Annual => Self::TRADING_DAYS_PER_YEAR,
            BlockLength::Periods(n) => n,
        }
    }
}

impl FromStr for BlockLength {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weekly" => Ok(BlockLength::Weekly),
            "annual" => Ok(BlockLength::Annual),
            other => other
                .parse::<usize>()
                .ok()
                .filter(|n| *n > 0)
                .map(BlockLength::Periods)
                .ok_or_else(|| Error::InvalidInput(format!("bad block length {other:?}"))),
        }
    }
}

/// Average company returns within each industry, per date.
///
/// Columns are industries in lexicographic order and rows are dates in
/// lexicographic order (ISO dates sort chronologically), so the output does
/// not depend on the order of the input records. Dates on which some
/// industry has no observation are dropped and counted.
pub fn industry_average(records: &[ReturnRecord]) -> Result<ReturnsTable> {
    if records.is_empty() {
        return Err(Error::Empty("return records"));
    }
    let mut label_of: BTreeMap<&str, &str> = BTreeMap::new();
    let mut unlabeled = BTreeSet::new();
    let mut conflicting = BTreeSet::new();
    for r in records {
        let industry = r.industry.trim();
        if industry.is_empty() {
            unlabeled.insert(r.company.clone());
            continue;
        }
        if !r.value.is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite return for {} on {}",
                r.company, r.date
            )));
        }
        match label_of.insert(r.company.as_str(), industry) {
            Some(prev) if prev != industry => {
                conflicting.insert(r.company.clone());
            }
            _ => {}
        }
    }
    if !unlabeled.is_empty() {
        return Err(Error::UnlabeledCompanies(unlabeled.into_iter().collect()));
    }
    if !conflicting.is_empty() {
        return Err(Error::InvalidInput(format!(
            "companies with more than one industry label: {}",
            conflicting.into_iter().collect::<Vec<_>>().join(", ")
        )));
    }
    let industries: Vec<&str> =
        label_of.values().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let column: BTreeMap<&str, usize> = industries.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut by_date: BTreeMap<&str, Vec<(f64, usize)>> = BTreeMap::new();
    for r in records {
        let cell = &mut by_date
            .entry(r.date.as_str())
            .or_insert_with(|| vec![(0.0, 0); industries.len()])[column[r.industry.trim()]];
        cell.0 += r.value;
        cell.1 += 1;
    }
    let mut dates = Vec::new();
    let mut rows = Vec::new();
    let mut dropped = 0;
    for (date, cells) in by_date {
        if cells.iter().any(|c| c.1 == 0) {
            dropped += 1;
            continue;
        }
        dates.push(date.to_string());
        rows.push(cells.iter().map(|(s, n)| s / *n as f64).collect());
    }
    let mut table =
        ReturnsTable::new(industries.into_iter().map(str::to_string).collect(), dates, rows)?;
    table.dropped_rows = dropped;
    Ok(table)
}

/// Componentwise maxima over consecutive blocks of `block` rows; a trailing
/// partial block is dropped. Each output row carries its block's last date.
pub fn block_maxima(table: &ReturnsTable, block: usize) -> Result<ReturnsTable> {
    if block == 0 {
        return Err(Error::InvalidInput("block length must be at least 1".into()));
    }
    if block > table.len() {
        return Err(Error::InvalidInput(format!(
            "block length {block} exceeds the {} available rows",
            table.len()
        )));
    }
    let blocks = table.len() / block;
    let mut dates = Vec::with_capacity(blocks);
    let mut rows = Vec::with_capacity(blocks);
    for j in 0..blocks {
        let span = &table.rows[j * block..(j + 1) * block];
        let mut m = vec![f64::NEG_INFINITY; table.dim()];
        for row in span {
            for (mk, v) in m.iter_mut().zip(row) {
                *mk = mk.max(*v);
            }
        }
        dates.push(table.dates[(j + 1) * block - 1].clone());
        rows.push(m);
    }
    ReturnsTable::new(table.labels.clone(), dates, rows)
}

/// Per-column empirical-rank transform to unit Fréchet,
/// `x ↦ -1 / ln(rank / (n + 1))`; ties are ranked in row order.
pub fn standardize_frechet(table: &ReturnsTable) -> Result<ReturnsTable> {
    if table.is_empty() {
        return Err(Error::Empty("returns table"));
    }
    let n = table.len();
    let mut rows = vec![vec![0.0; table.dim()]; n];
    for k in 0..table.dim() {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| table.rows[a][k].total_cmp(&table.rows[b][k]));
        for (rank, &i) in order.iter().enumerate() {
            rows[i][k] = -1.0 / ((rank + 1) as f64 / (n + 1) as f64).ln();
        }
    }
    ReturnsTable::new(table.labels.clone(), table.dates.clone(), rows)
}
