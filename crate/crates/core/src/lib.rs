//! Adaptive FIR prediction of price series with an exponentially-weighted
//! recursive least-squares (RLS) engine.
//!
//! The crate is organised bottom-up:
//!
//! * [`timeseries`] loads, slices and synthesizes [`PriceSeries`] values.
//! * [`rls_core`] holds the recursive update, the direct batch solution of the
//!   weighted normal equations and the weighted objective.
//! * [`predictor`] frames a series as an L-step-ahead prediction problem.
//! * [`sweep`] scores predictors by Pearson correlation over an `(N, L)` grid.
//! * [`strategy`] turns a forecast into a buy/sell plan and backtests it.
//! * [`export`] renders every result as a CSV or JSON table.

pub mod error;
pub mod export;
pub mod predictor;
pub mod rls_core;
pub mod strategy;
pub mod sweep;
pub mod timeseries;

pub use error::{Error, Result};
pub use predictor::{forecast_future, run_prediction, PredictionTrace, PredictorConfig};
pub use rls_core::{batch_solve, objective, FilterState, RegressionSample, UpdateOutput};
pub use strategy::{backtest, plan_trade, table_sweep, BacktestResult, TradeDecision, TradePlan};
pub use sweep::{correlation, profile_by_l, profile_by_n, sweep_surface, CorrelationSurface, SweepConfig};
pub use timeseries::{load_csv, synth_ar, ColumnSelector, CsvOptions, PriceSeries};
