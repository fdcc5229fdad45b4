//! Price series: loading, slicing, synthesis and CSV output.
//!
//! Every series is addressed by a plain 0-based trading-day index. A series
//! may start at a non-zero index (e.g. after [`PriceSeries::slice`]); calendar
//! dates, when present, are carried as labels only.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Ordered closing prices indexed by trading day.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    values: Vec<f64>,
    start_index: usize,
    labels: Option<Vec<String>>,
}

impl PriceSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_start(values, 0)
    }

    pub fn with_start(values: Vec<f64>, start_index: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        for (offset, &value) in values.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::NonPositivePrice {
                    index: start_index + offset,
                    value,
                });
            }
        }
        Ok(PriceSeries {
            values,
            start_index,
            labels: None,
        })
    }

    /// Attaches calendar-date labels, one per sample.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                actual: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn start_index(&self) -> usize {
        self.start_index
    }

    /// Trading-day index of the last sample.
    pub fn end_index(&self) -> usize {
        self.start_index + self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a series holds at least one sample.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        index >= self.start_index && index <= self.end_index()
    }

    /// Price at an absolute trading-day index.
    pub fn get(&self, index: usize) -> Option<f64> {
        index
            .checked_sub(self.start_index)
            .and_then(|offset| self.values.get(offset).copied())
    }

    pub fn price(&self, index: usize) -> Result<f64> {
        self.get(index).ok_or(Error::OutOfRange {
            from: index,
            to: index,
            first: self.start_index,
            last: self.end_index(),
        })
    }

    /// Inclusive sub-series `[from, to]`; the result starts at `from`.
    pub fn slice(&self, from: usize, to: usize) -> Result<PriceSeries> {
        if from > to || !self.contains(from) || !self.contains(to) {
            return Err(Error::OutOfRange {
                from,
                to,
                first: self.start_index,
                last: self.end_index(),
            });
        }
        let lo = from - self.start_index;
        let hi = to - self.start_index;
        Ok(PriceSeries {
            values: self.values[lo..=hi].to_vec(),
            start_index: from,
            labels: self.labels.as_ref().map(|l| l[lo..=hi].to_vec()),
        })
    }

    /// Writes `index,price[,date]` rows, prices at 6 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        crate::export::series_table(self).write_csv(writer)
    }
}

/// Column chosen either by header name or by 0-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Name(String),
    Position(usize),
}

impl std::str::FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    /// All-digit strings select by position, anything else by name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(pos) => ColumnSelector::Position(pos),
            Err(_) => ColumnSelector::Name(s.to_string()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub column: ColumnSelector,
    pub date_column: Option<ColumnSelector>,
    pub has_header: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            column: ColumnSelector::Name("price".to_string()),
            date_column: None,
            has_header: true,
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<PriceSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, options)
}

/// Parses a price series from CSV text. Row numbers in errors are 1-based
/// file line numbers. Blank lines before the last data row are rejected.
pub fn read_csv<R: Read>(mut reader: R, options: &CsvOptions) -> Result<PriceSeries> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;

    // The csv reader skips blank lines without counting them.
    let lines: Vec<&str> = text.lines().collect();
    let last_content = lines.iter().rposition(|l| !l.trim().is_empty());
    if let Some(last) = last_content {
        if let Some(blank) = lines[..last].iter().position(|l| l.trim().is_empty()) {
            return Err(Error::BadRow {
                row: blank + 1,
                reason: "blank row".to_string(),
            });
        }
    }

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(options.has_header)
        .flexible(true)
        .from_reader(text.as_bytes());

    let resolve = |selector: &ColumnSelector, headers: Option<&csv::StringRecord>| -> Result<usize> {
        match selector {
            ColumnSelector::Position(pos) => Ok(*pos),
            ColumnSelector::Name(name) => headers
                .and_then(|h| h.iter().position(|field| field.trim() == name))
                .ok_or_else(|| Error::param("column", format!("no column named `{name}`"))),
        }
    };

    let headers = if options.has_header {
        Some(rdr.headers()?.clone())
    } else {
        None
    };
    let price_col = resolve(&options.column, headers.as_ref())?;
    let date_col = options
        .date_column
        .as_ref()
        .map(|sel| resolve(sel, headers.as_ref()))
        .transpose()?;

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line() as usize);

        let field = record.get(price_col).ok_or_else(|| Error::BadRow {
            row,
            reason: format!("missing column {price_col}"),
        })?;
        let value: f64 = field.trim().parse().map_err(|_| Error::BadRow {
            row,
            reason: format!("cannot parse `{field}` as a price"),
        })?;
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::BadRow {
                row,
                reason: format!("price {value} is not positive"),
            });
        }
        values.push(value);

        if let Some(col) = date_col {
            let label = record.get(col).ok_or_else(|| Error::BadRow {
                row,
                reason: format!("missing date column {col}"),
            })?;
            labels.push(label.trim().to_string());
        }
    }

    let series = PriceSeries::new(values)?;
    if date_col.is_some() {
        series.with_labels(labels)
    } else {
        Ok(series)
    }
}

/// Generates `length` samples of an autoregressive process plus white
/// Gaussian noise, shifted by `offset`:
///
/// `z(t) = sum_j coeffs[j] * z(t-1-j) + noise_std * eps(t)`, `price(t) = z(t) + offset`
///
/// The recursion starts from a zero history. Stability of the AR polynomial
/// is the caller's concern. Output is a pure function of the arguments.
pub fn synth_ar(
    order_coeffs: &[f64],
    noise_std: f64,
    length: usize,
    seed: u64,
    offset: f64,
) -> Result<PriceSeries> {
    if length < 1 {
        return Err(Error::param("length", "must be at least 1"));
    }
    if !noise_std.is_finite() || noise_std < 0.0 {
        return Err(Error::param("noise_std", "must be finite and >= 0"));
    }
    if !offset.is_finite() || order_coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("synth_ar arguments"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state: Vec<f64> = Vec::with_capacity(length);
    let mut values = Vec::with_capacity(length);
    for t in 0..length {
        let ar: f64 = order_coeffs
            .iter()
            .enumerate()
            .filter(|(j, _)| *j < t)
            .map(|(j, c)| c * state[t - 1 - j])
            .sum();
        let eps: f64 = StandardNormal.sample(&mut rng);
        let z = ar + noise_std * eps;
        let value = z + offset;
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::NonPositivePrice { index: t, value });
        }
        state.push(z);
        values.push(value);
    }
    PriceSeries::new(values)
}

/// Formats `x` with `digits` significant digits, trailing zeros trimmed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = digits as i32 - 1 - exponent;
    if decimals <= 0 {
        let scale = 10f64.powi(-decimals);
        return format!("{:.0}", (x / scale).round() * scale);
    }
    let s = format!("{:.*}", decimals as usize, x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}
