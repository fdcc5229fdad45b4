//! Plot-ready tables for every result type.
//!
//! A [`Table`] holds already-formatted cells, so its CSV and JSON renderings
//! carry identical values. Empty cells become JSON `null`.

use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::error::Result;
use crate::predictor::PredictionTrace;
use crate::strategy::{RowOutcome, TableRow};
use crate::sweep::CorrelationSurface;
use crate::timeseries::{format_significant, PriceSeries};

/// Marker written in the `profit_pct` column of a table row without a trade.
pub const NO_TRADE: &str = "no_trade";
/// Marker written in the `profit_pct` column of a row whose computation failed.
pub const FAILED: &str = "failed";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Array of objects keyed by column name, in column order.
    pub fn to_json(&self) -> Value {
        let records = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .cloned()
                    .zip(row.iter().map(|cell| json_cell(cell)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(records)
    }

    pub fn write_json<W: Write>(&self, mut writer: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut writer, &self.to_json())?;
        writeln!(writer)?;
        Ok(())
    }
}

fn json_cell(cell: &str) -> Value {
    if cell.is_empty() {
        return Value::Null;
    }
    if let Ok(i) = cell.parse::<i64>() {
        return Value::Number(i.into());
    }
    if let Some(n) = cell.parse::<f64>().ok().and_then(Number::from_f64) {
        return Value::Number(n);
    }
    Value::String(cell.to_string())
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// `index,price[,date]`, prices at 6 significant digits.
pub fn series_table(series: &PriceSeries) -> Table {
    let mut table = match series.labels() {
        Some(_) => Table::new(["index", "price", "date"]),
        None => Table::new(["index", "price"]),
    };
    for (offset, &value) in series.values().iter().enumerate() {
        let mut row = vec![
            (series.start_index() + offset).to_string(),
            format_significant(value, 6),
        ];
        if let Some(labels) = series.labels() {
            row.push(labels[offset].clone());
        }
        table.rows.push(row);
    }
    table
}

/// `index,desired,predicted,error`.
pub fn trace_table(trace: &PredictionTrace) -> Table {
    let mut table = Table::new(["index", "desired", "predicted", "error"]);
    for (j, index) in trace.indices().enumerate() {
        table.rows.push(vec![
            index.to_string(),
            num(trace.desired[j]),
            num(trace.predicted[j]),
            num(trace.error[j]),
        ]);
    }
    table
}

/// `index,w0,w1,...` for each weight snapshot.
pub fn snapshots_table(trace: &PredictionTrace) -> Table {
    let width = trace.weight_snapshots.first().map_or(0, |(_, w)| w.len());
    let mut table = Table::new(std::iter::once("index".to_string()).chain((0..width).map(|i| format!("w{i}"))));
    for (index, weights) in &trace.weight_snapshots {
        let mut row = vec![index.to_string()];
        row.extend(weights.iter().map(|&w| num(w)));
        table.rows.push(row);
    }
    table
}

/// `index,predicted` for future days.
pub fn forecast_table(forecast: &[(usize, f64)]) -> Table {
    let mut table = Table::new(["index", "predicted"]);
    for &(index, y) in forecast {
        table.rows.push(vec![index.to_string(), num(y)]);
    }
    table
}

/// Long form `n,l,correlation`; undefined cells are empty.
pub fn surface_table(surface: &CorrelationSurface) -> Table {
    let mut table = Table::new(["n", "l", "correlation"]);
    for (n, l, r) in surface.cells() {
        table.rows.push(vec![n.to_string(), l.to_string(), opt(r)]);
    }
    table
}

/// `<axis>,max_correlation`, with `axis` either `n` or `l`.
pub fn profile_table(axis: &str, profile: &[(usize, Option<f64>)]) -> Table {
    let mut table = Table::new([axis, "max_correlation"]);
    for &(v, r) in profile {
        table.rows.push(vec![v.to_string(), opt(r)]);
    }
    table
}

/// `n,l,buy_index,sell_index,buy_price,sell_price,profit_pct`, profit at
/// 2 decimals. Rows without a trade carry [`NO_TRADE`] or [`FAILED`] in the
/// profit column and leave the trade fields empty.
pub fn backtest_table(rows: &[TableRow]) -> Table {
    let mut table = Table::new([
        "n",
        "l",
        "buy_index",
        "sell_index",
        "buy_price",
        "sell_price",
        "profit_pct",
    ]);
    for row in rows {
        let mut cells = vec![row.n_coeffs.to_string(), row.window.to_string()];
        match &row.outcome {
            RowOutcome::Traded(r) => cells.extend([
                r.plan.buy_index.to_string(),
                r.plan.sell_index.to_string(),
                num(r.buy_price),
                num(r.sell_price),
                format!("{:.2}", r.profit_pct),
            ]),
            RowOutcome::NoTrade => {
                cells.extend(std::iter::repeat_n(String::new(), 4));
                cells.push(NO_TRADE.to_string());
            }
            RowOutcome::Failed(_) => {
                cells.extend(std::iter::repeat_n(String::new(), 4));
                cells.push(FAILED.to_string());
            }
        }
        table.rows.push(cells);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::{BacktestResult, TradePlan};

    #[test]
    fn backtest_rows() {
        let rows = vec![
            TableRow {
                n_coeffs: 80,
                window: 16,
                outcome: RowOutcome::Traded(BacktestResult {
                    plan: TradePlan {
                        buy_index: 2476,
                        sell_index: 2486,
                        source: None,
                    },
                    buy_price: 37.86,
                    sell_price: 41.05,
                    profit_pct: crate::strategy::profit_pct(37.86, 41.05),
                }),
            },
            TableRow {
                n_coeffs: 60,
                window: 20,
                outcome: RowOutcome::NoTrade,
            },
        ];
        let table = backtest_table(&rows);
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,l,buy_index,sell_index,buy_price,sell_price,profit_pct\n\
             80,16,2476,2486,37.86,41.05,8.43\n\
             60,20,,,,,no_trade\n"
        );
        let json = table.to_json();
        assert_eq!(json[0]["profit_pct"], serde_json::json!(8.43));
        assert_eq!(json[1]["buy_price"], Value::Null);
        assert_eq!(json[1]["profit_pct"], serde_json::json!("no_trade"));
    }

    #[test]
    fn surface_long_form() {
        let surface = CorrelationSurface {
            n_values: vec![5, 10],
            l_values: vec![1],
            values: vec![vec![Some(0.5)], vec![None]],
        };
        let table = surface_table(&surface);
        assert_eq!(table.rows, vec![vec!["5", "1", "0.5"], vec!["10", "1", ""]]);
        let json = table.to_json();
        let keys: Vec<&String> = json[0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["n", "l", "correlation"]);
    }

    #[test]
    fn snapshot_header() {
        let trace = PredictionTrace {
            first_index: 3,
            desired: vec![1.0],
            predicted: vec![0.5],
            error: vec![0.5],
            weight_snapshots: vec![(3, vec![0.25, -1.5])],
        };
        assert_eq!(snapshots_table(&trace).header, ["index", "w0", "w1"]);
        assert_eq!(trace_table(&trace).rows[0], ["3", "1", "0.5", "0.5"]);
    }
}
