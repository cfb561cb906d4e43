//! Price and sector loading, log-returns, and binned probability estimates.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closing prices, one row per stock, one column per trading day.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceMatrix {
    stocks: Vec<String>,
    days: Vec<String>,
    prices: Vec<Vec<f64>>,
}

impl PriceMatrix {
    /// Validates shape and positivity. Requires at least 2 stocks and 3 days.
    pub fn new(stocks: Vec<String>, days: Vec<String>, prices: Vec<Vec<f64>>) -> Result<Self> {
        if stocks.len() != prices.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} stock names but {} price rows",
                stocks.len(),
                prices.len()
            )));
        }
        if stocks.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "{} stock(s); at least 2 required",
                stocks.len()
            )));
        }
        if days.len() < 3 {
            return Err(Error::InsufficientData(format!(
                "{} trading day(s); at least 3 required",
                days.len()
            )));
        }
        for (stock, row) in stocks.iter().zip(&prices) {
            if row.len() != days.len() {
                return Err(Error::ShapeMismatch(format!(
                    "stock {stock} has {} prices for {} days",
                    row.len(),
                    days.len()
                )));
            }
            for (day, &value) in days.iter().zip(row) {
                if !value.is_finite() || value <= 0.0 {
                    return Err(Error::NonPositivePrice {
                        stock: stock.clone(),
                        day: day.clone(),
                        value,
                    });
                }
            }
        }
        Ok(Self {
            stocks,
            days,
            prices,
        })
    }

    pub fn stocks(&self) -> &[String] {
        &self.stocks
    }

    pub fn days(&self) -> &[String] {
        &self.days
    }

    /// Price series of stock `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.prices[i]
    }

    pub fn n_stocks(&self) -> usize {
        self.stocks.len()
    }

    pub fn n_days(&self) -> usize {
        self.days.len()
    }

    /// Keeps only the listed stocks, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            indices.iter().map(|&i| self.stocks[i].clone()).collect(),
            self.days.clone(),
            indices.iter().map(|&i| self.prices[i].clone()).collect(),
        )
    }

    /// Writes the wide layout: `day,STOCK1,STOCK2,...`.
    pub fn write_wide(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
        let mut header = vec!["day".to_string()];
        header.extend(self.stocks.iter().cloned());
        w.write_record(&header).map_err(|e| csv_io(path, e))?;
        for (t, day) in self.days.iter().enumerate() {
            let mut row = vec![day.clone()];
            row.extend(self.prices.iter().map(|p| format!("{:.16e}", p[t])));
            w.write_record(&row).map_err(|e| csv_io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Log-returns, one row of length `m - 1` per stock.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnMatrix {
    stocks: Vec<String>,
    returns: Vec<Vec<f64>>,
}

impl ReturnMatrix {
    pub fn new(stocks: Vec<String>, returns: Vec<Vec<f64>>) -> Result<Self> {
        if stocks.len() != returns.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} stock names but {} return rows",
                stocks.len(),
                returns.len()
            )));
        }
        if let Some(first) = returns.first() {
            if returns.iter().any(|r| r.len() != first.len()) {
                return Err(Error::ShapeMismatch("ragged return rows".into()));
            }
        }
        Ok(Self { stocks, returns })
    }

    pub fn stocks(&self) -> &[String] {
        &self.stocks
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.returns[i]
    }

    pub fn n_stocks(&self) -> usize {
        self.stocks.len()
    }

    pub fn n_returns(&self) -> usize {
        self.returns.first().map_or(0, Vec::len)
    }
}

/// On-disk price layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriceFormat {
    /// `day,STOCK1,STOCK2,...`
    Wide,
    /// `day,stock,close`
    Long,
}

impl FromStr for PriceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wide" => Ok(Self::Wide),
            "long" => Ok(Self::Long),
            other => Err(Error::InvalidArgument(format!(
                "unknown price format `{other}`"
            ))),
        }
    }
}

/// Result of loading a price file: the validated matrix plus the stocks
/// dropped for having gaps.
#[derive(Debug, Clone)]
pub struct PriceLoad {
    pub prices: PriceMatrix,
    pub dropped: Vec<String>,
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: e.to_string(),
    }
}

fn parse_price(path: &Path, line: u64, cell: &str) -> Result<Option<f64>> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse::<f64>().map(Some).map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("cannot parse `{cell}` as a price"),
    })
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                message: format!("{other:?}"),
            },
        })
}

/// Loads a price table. Stocks with any missing day are dropped and listed in
/// [`PriceLoad::dropped`].
pub fn load_price_table(path: &Path, format: PriceFormat) -> Result<PriceLoad> {
    let (stocks, days, cells) = match format {
        PriceFormat::Wide => read_wide(path)?,
        PriceFormat::Long => read_long(path)?,
    };

    let mut kept_stocks = Vec::new();
    let mut kept_rows = Vec::new();
    let mut dropped = Vec::new();
    for (stock, row) in stocks.into_iter().zip(cells) {
        match row.into_iter().collect::<Option<Vec<f64>>>() {
            Some(prices) => {
                kept_stocks.push(stock);
                kept_rows.push(prices);
            }
            None => {
                log::warn!("dropping stock {stock}: missing prices on some days");
                dropped.push(stock);
            }
        }
    }
    if kept_stocks.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} stock(s) traded on every day; at least 2 required",
            kept_stocks.len()
        )));
    }
    Ok(PriceLoad {
        prices: PriceMatrix::new(kept_stocks, days, kept_rows)?,
        dropped,
    })
}

type RawTable = (Vec<String>, Vec<String>, Vec<Vec<Option<f64>>>);

fn read_wide(path: &Path) -> Result<RawTable> {
    let mut rdr = open_reader(path)?;
    let header = rdr.headers().map_err(|e| csv_io(path, e))?.clone();
    if header.len() < 2 || header.get(0) != Some("day") {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "expected header `day,STOCK1,STOCK2,...`".into(),
        });
    }
    let stocks: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut days = Vec::new();
    let mut cells: Vec<Vec<Option<f64>>> = vec![Vec::new(); stocks.len()];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_io(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        days.push(rec[0].to_string());
        for (col, cell) in rec.iter().skip(1).enumerate() {
            cells[col].push(parse_price(path, line, cell)?);
        }
    }
    Ok((stocks, days, cells))
}

fn read_long(path: &Path) -> Result<RawTable> {
    let mut rdr = open_reader(path)?;
    let header = rdr.headers().map_err(|e| csv_io(path, e))?.clone();
    if header.iter().collect::<Vec<_>>() != ["day", "stock", "close"] {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "expected header `day,stock,close`".into(),
        });
    }
    let mut days: Vec<String> = Vec::new();
    let mut day_index: HashMap<String, usize> = HashMap::new();
    let mut stocks: Vec<String> = Vec::new();
    let mut stock_index: HashMap<String, usize> = HashMap::new();
    let mut values: HashMap<(usize, usize), Option<f64>> = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_io(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let d = *day_index.entry(rec[0].to_string()).or_insert_with(|| {
            days.push(rec[0].to_string());
            days.len() - 1
        });
        let s = *stock_index.entry(rec[1].to_string()).or_insert_with(|| {
            stocks.push(rec[1].to_string());
            stocks.len() - 1
        });
        let price = parse_price(path, line, &rec[2])?;
        if values.insert((s, d), price).is_some() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("duplicate entry for stock {} on day {}", &rec[1], &rec[0]),
            });
        }
    }
    let cells = (0..stocks.len())
        .map(|s| {
            (0..days.len())
                .map(|d| values.get(&(s, d)).copied().flatten())
                .collect()
        })
        .collect();
    Ok((stocks, days, cells))
}

/// `R_it = ln(P_it / P_i(t-1))` for `t = 2..m`.
pub fn log_returns(prices: &PriceMatrix) -> ReturnMatrix {
    let returns = prices
        .prices
        .iter()
        .map(|row| row.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
        .collect();
    ReturnMatrix {
        stocks: prices.stocks.clone(),
        returns,
    }
}

/// How a return series is cut into `q` bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Binning {
    /// Equal-frequency bins over the sorted values.
    #[default]
    Quantile,
    /// Equal-width bins over `[min, max]`.
    Width,
}

impl FromStr for Binning {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantile" => Ok(Self::Quantile),
            "width" => Ok(Self::Width),
            other => Err(Error::InvalidArgument(format!("unknown binning `{other}`"))),
        }
    }
}

impl fmt::Display for Binning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Quantile => "quantile",
            Self::Width => "width",
        })
    }
}

/// Bin label per observation plus per-bin counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinAssignment {
    q: usize,
    labels: Vec<usize>,
    counts: Vec<usize>,
}

impl BinAssignment {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Equal-frequency binning of `series` into `q` bins.
///
/// Values are stably sorted (ties keep time order) and cut into contiguous
/// groups; the first `len % q` groups hold one extra value.
pub fn bin_series(series: &[f64], q: usize) -> Result<BinAssignment> {
    bin_series_with(series, q, Binning::Quantile)
}

pub fn bin_series_with(series: &[f64], q: usize, binning: Binning) -> Result<BinAssignment> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!(
            "q must be at least 2, got {q}"
        )));
    }
    if series.len() < q {
        return Err(Error::TooFewObservations {
            len: series.len(),
            q,
        });
    }
    let len = series.len();
    let mut labels = vec![0usize; len];
    match binning {
        Binning::Quantile => {
            let mut order: Vec<usize> = (0..len).collect();
            order.sort_by(|&a, &b| series[a].total_cmp(&series[b]));
            let base = len / q;
            let extra = len % q;
            let mut pos = 0;
            for bin in 0..q {
                let size = base + usize::from(bin < extra);
                for &t in &order[pos..pos + size] {
                    labels[t] = bin;
                }
                pos += size;
            }
        }
        Binning::Width => {
            let lo = series.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let width = (hi - lo) / q as f64;
            if width > 0.0 {
                for (label, &x) in labels.iter_mut().zip(series) {
                    *label = (((x - lo) / width).floor() as usize).min(q - 1);
                }
            }
        }
    }
    let mut counts = vec![0usize; q];
    for &l in &labels {
        counts[l] += 1;
    }
    Ok(BinAssignment { q, labels, counts })
}

/// Probability vector over `q` bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    p: Vec<f64>,
}

impl Distribution {
    /// Checks non-negativity and unit mass (within 1e-12).
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.iter().any(|&x| x.is_nan() || x < 0.0) {
            return Err(Error::InvalidArgument("negative probability".into()));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { p })
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }
}

/// `p_a = f_a / sum(f)`.
pub fn marginal_distribution(bins: &BinAssignment) -> Distribution {
    let total: usize = bins.counts.iter().sum();
    Distribution {
        p: bins
            .counts
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect(),
    }
}

/// Joint probabilities on a `q x q` grid, row-major (`p[a * q + b]`).
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    q: usize,
    p: Vec<f64>,
}

impl JointDistribution {
    pub fn new(q: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != q * q {
            return Err(Error::ShapeMismatch(format!(
                "joint distribution needs {} cells, got {}",
                q * q,
                p.len()
            )));
        }
        Distribution::new(p.clone())?;
        Ok(Self { q, p })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.q + b]
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    /// Row sums (the first variable's marginal).
    pub fn row_marginal(&self) -> Vec<f64> {
        self.p.chunks(self.q).map(|r| r.iter().sum()).collect()
    }

    /// Column sums (the second variable's marginal).
    pub fn col_marginal(&self) -> Vec<f64> {
        (0..self.q)
            .map(|b| (0..self.q).map(|a| self.get(a, b)).sum())
            .collect()
    }
}

/// Joint bin-pair frequencies of two aligned series.
pub fn joint_histogram(a: &BinAssignment, b: &BinAssignment) -> Result<JointDistribution> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "series lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.q != b.q {
        return Err(Error::ShapeMismatch(format!(
            "bin counts differ: {} vs {}",
            a.q, b.q
        )));
    }
    let q = a.q;
    let mut counts = vec![0usize; q * q];
    for (&x, &y) in a.labels.iter().zip(&b.labels) {
        counts[x * q + y] += 1;
    }
    let len = a.len() as f64;
    Ok(JointDistribution {
        q,
        p: counts.into_iter().map(|c| c as f64 / len).collect(),
    })
}

/// Benchmark classification: stock identifier to sector name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SectorTable {
    sectors: BTreeMap<String, String>,
}

impl SectorTable {
    pub fn new(sectors: BTreeMap<String, String>) -> Self {
        Self { sectors }
    }

    pub fn from_pairs<I, S, T>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        Self {
            sectors: pairs
                .into_iter()
                .map(|(s, t)| (s.into(), t.into()))
                .collect(),
        }
    }

    pub fn sector(&self, stock: &str) -> Option<&str> {
        self.sectors.get(stock).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    /// Sector names for `stocks`, in order; fails on the first unmapped stock.
    pub fn labels_for(&self, stocks: &[String]) -> Result<Vec<String>> {
        stocks
            .iter()
            .map(|s| {
                self.sector(s)
                    .map(str::to_string)
                    .ok_or_else(|| Error::MissingSector(s.clone()))
            })
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.sectors.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Reads `stock,sector`.
    pub fn load(path: &Path) -> Result<Self> {
        let mut rdr = open_reader(path)?;
        let header = rdr.headers().map_err(|e| csv_io(path, e))?.clone();
        if header.iter().collect::<Vec<_>>() != ["stock", "sector"] {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                message: "expected header `stock,sector`".into(),
            });
        }
        let mut sectors = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| csv_io(path, e))?;
            let line = rec.position().map_or(0, |p| p.line());
            if sectors
                .insert(rec[0].to_string(), rec[1].to_string())
                .is_some()
            {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("stock {} listed twice", &rec[0]),
                });
            }
        }
        Ok(Self { sectors })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
        w.write_record(["stock", "sector"])
            .map_err(|e| csv_io(path, e))?;
        for (stock, sector) in &self.sectors {
            w.write_record([stock, sector])
                .map_err(|e| csv_io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}
