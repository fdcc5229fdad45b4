//! Buy-then-sell trade planning on a forecast, and backtesting against the
//! actual prices.
//!
//! The rule is one long round trip per forecast segment: buy at the lowest
//! forecast price, sell at the highest forecast price strictly after it.
//! Ties resolve to the earliest day. No costs, no position sizing.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::predictor::{forecast_future, PredictorConfig};
use crate::timeseries::PriceSeries;

/// Last trading day used for training when reproducing the design table.
pub const TABLE_ANCHOR: usize = 2472;

/// `(N, L)` rows of the design table.
pub const TABLE_ROWS: [(usize, usize); 9] = [
    (60, 20),
    (65, 19),
    (70, 18),
    (75, 17),
    (80, 16),
    (85, 15),
    (90, 16),
    (95, 17),
    (100, 18),
];

/// Forecast run a plan was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanSource {
    pub n_coeffs: usize,
    pub window: usize,
    pub lambda: f64,
    pub eval_from: usize,
    pub eval_to: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradePlan {
    pub buy_index: usize,
    pub sell_index: usize,
    pub source: Option<PlanSource>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TradeDecision {
    Trade(TradePlan),
    /// The forecast minimum is its last day; nothing to sell into.
    NoTrade,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacktestResult {
    pub plan: TradePlan,
    pub buy_price: f64,
    pub sell_price: f64,
    /// Full precision; round only for display.
    pub profit_pct: f64,
}

pub fn profit_pct(buy_price: f64, sell_price: f64) -> f64 {
    100.0 * (sell_price - buy_price) / buy_price
}

pub fn plan_trade(forecast: &[(usize, f64)]) -> Result<TradeDecision> {
    if forecast.len() < 2 {
        return Err(Error::param("forecast", "needs at least two days"));
    }
    if forecast.iter().any(|(_, p)| !p.is_finite()) {
        return Err(Error::NonFinite("forecast"));
    }

    let mut buy = 0;
    for (i, &(_, price)) in forecast.iter().enumerate() {
        if price < forecast[buy].1 {
            buy = i;
        }
    }
    if buy + 1 == forecast.len() {
        return Ok(TradeDecision::NoTrade);
    }
    let mut sell = buy + 1;
    for (i, &(_, price)) in forecast.iter().enumerate().skip(buy + 2) {
        if price > forecast[sell].1 {
            sell = i;
        }
    }
    Ok(TradeDecision::Trade(TradePlan {
        buy_index: forecast[buy].0,
        sell_index: forecast[sell].0,
        source: None,
    }))
}

pub fn backtest(plan: &TradePlan, actual: &PriceSeries) -> Result<BacktestResult> {
    if plan.buy_index >= plan.sell_index {
        return Err(Error::param("plan", "buy_index must precede sell_index"));
    }
    let buy_price = actual.price(plan.buy_index)?;
    let sell_price = actual.price(plan.sell_index)?;
    Ok(BacktestResult {
        plan: *plan,
        buy_price,
        sell_price,
        profit_pct: profit_pct(buy_price, sell_price),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowOutcome {
    Traded(BacktestResult),
    NoTrade,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub n_coeffs: usize,
    pub window: usize,
    pub outcome: RowOutcome,
}

/// Trains on `series` through `anchor`, forecasts the next `L` days, plans
/// the trade and backtests it on `series`.
pub fn trade_at(series: &PriceSeries, config: &PredictorConfig, anchor: usize) -> Result<Option<BacktestResult>> {
    let training = series.slice(series.start_index(), anchor)?;
    let forecast = forecast_future(&training, config)?;
    match plan_trade(&forecast)? {
        TradeDecision::NoTrade => Ok(None),
        TradeDecision::Trade(mut plan) => {
            plan.source = Some(PlanSource {
                n_coeffs: config.n_coeffs,
                window: config.window,
                lambda: config.lambda,
                eval_from: anchor + 1,
                eval_to: anchor + config.window,
            });
            backtest(&plan, series).map(Some)
        }
    }
}

/// One row per `(N, L)` pair, in input order. Row failures are recorded in
/// the row rather than aborting the table.
pub fn table_sweep(
    series: &PriceSeries,
    rows: &[(usize, usize)],
    lambda: f64,
    delta: f64,
    forecast_anchor: usize,
) -> Vec<TableRow> {
    rows.par_iter()
        .map(|&(n, l)| {
            let config = PredictorConfig::new(n, l, lambda).with_delta(delta);
            let outcome = match trade_at(series, &config, forecast_anchor) {
                Ok(Some(result)) => RowOutcome::Traded(result),
                Ok(None) => RowOutcome::NoTrade,
                Err(e) => RowOutcome::Failed(e.to_string()),
            };
            TableRow {
                n_coeffs: n,
                window: l,
                outcome,
            }
        })
        .collect()
}
