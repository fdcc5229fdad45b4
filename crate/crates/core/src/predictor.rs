//! L-step-ahead FIR prediction of a price series.
//!
//! The filter input at day `k` is the tapped delay line of raw prices delayed
//! by the prediction window `L`, most recent first:
//!
//! ```text
//! x(k) = [s(k-L), s(k-L-1), ..., s(k-L-N+1)],   d(k) = s(k)
//! ```
//!
//! so `y(k)` estimates the price `L` days after the newest sample it reads.
//! Days before `N - 1 + L` produce no prediction.

use crate::error::{Error, Result};
use crate::rls_core::{FilterState, DEFAULT_DELTA};
use crate::timeseries::PriceSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictorConfig {
    pub n_coeffs: usize,
    /// Prediction window in trading days.
    pub window: usize,
    pub lambda: f64,
    pub delta: f64,
    /// Take a weight snapshot every this many updates; 0 disables snapshots.
    pub snapshot_stride: usize,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        PredictorConfig {
            n_coeffs: 100,
            window: 16,
            lambda: 0.98,
            delta: DEFAULT_DELTA,
            snapshot_stride: 0,
        }
    }
}

impl PredictorConfig {
    pub fn new(n_coeffs: usize, window: usize, lambda: f64) -> Self {
        PredictorConfig {
            n_coeffs,
            window,
            lambda,
            ..Default::default()
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_coeffs < 1 {
            return Err(Error::param("n_coeffs", "must be at least 1"));
        }
        if self.window < 1 {
            return Err(Error::param("window", "must be at least 1"));
        }
        // Range checks for lambda and delta live with the filter.
        FilterState::new(1, self.lambda, self.delta).map(|_| ())
    }

    /// Minimum series length accepted by [`run_prediction`].
    pub fn min_series_len(&self) -> usize {
        self.n_coeffs + self.window + 1
    }

    fn check_series(&self, series: &PriceSeries) -> Result<()> {
        self.validate()?;
        if series.len() < self.min_series_len() {
            return Err(Error::SeriesTooShort {
                needed: self.min_series_len(),
                actual: series.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionTrace {
    /// Trading-day index of the first prediction.
    pub first_index: usize,
    pub desired: Vec<f64>,
    pub predicted: Vec<f64>,
    pub error: Vec<f64>,
    pub weight_snapshots: Vec<(usize, Vec<f64>)>,
}

impl PredictionTrace {
    pub fn len(&self) -> usize {
        self.desired.len()
    }

    pub fn is_empty(&self) -> bool {
        self.desired.is_empty()
    }

    pub fn last_index(&self) -> usize {
        self.first_index + self.len() - 1
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.first_index..self.first_index + self.len()
    }

    /// `(predicted, desired)` over the inclusive index range `[from, to]`.
    pub fn window(&self, from: usize, to: usize) -> Result<(&[f64], &[f64])> {
        if self.is_empty() || from > to || from < self.first_index || to > self.last_index() {
            return Err(Error::OutOfRange {
                from,
                to,
                first: self.first_index,
                last: self.first_index + self.len().saturating_sub(1),
            });
        }
        let lo = from - self.first_index;
        let hi = to - self.first_index;
        Ok((&self.predicted[lo..=hi], &self.desired[lo..=hi]))
    }
}

/// Tap vector of `n` prices ending at `newest` (absolute index), most recent
/// first.
pub fn tap_input(series: &PriceSeries, newest: usize, n: usize) -> Result<Vec<f64>> {
    let start = series.start_index();
    if newest + 1 < start + n || !series.contains(newest) {
        return Err(Error::OutOfRange {
            from: (newest + 1).saturating_sub(n),
            to: newest,
            first: start,
            last: series.end_index(),
        });
    }
    let hi = newest - start;
    Ok(series.values()[hi + 1 - n..=hi].iter().rev().copied().collect())
}

/// Runs the adaptive predictor over the whole series and returns the trace
/// together with the final filter state.
pub fn train(series: &PriceSeries, config: &PredictorConfig) -> Result<(PredictionTrace, FilterState)> {
    config.check_series(series)?;
    let n = config.n_coeffs;
    let l = config.window;
    let values = series.values();
    let first_local = n - 1 + l;

    let mut state = FilterState::new(n, config.lambda, config.delta)?;
    let count = values.len() - first_local;
    let mut trace = PredictionTrace {
        first_index: series.start_index() + first_local,
        desired: Vec::with_capacity(count),
        predicted: Vec::with_capacity(count),
        error: Vec::with_capacity(count),
        weight_snapshots: Vec::new(),
    };

    let mut input = vec![0.0; n];
    for k in first_local..values.len() {
        let newest = k - l;
        for (tap, slot) in input.iter_mut().enumerate() {
            *slot = values[newest - tap];
        }
        let out = state.update(&input, values[k])?;
        trace.desired.push(values[k]);
        trace.predicted.push(out.output);
        trace.error.push(out.prior_error);

        if config.snapshot_stride > 0 && state.samples_seen() % config.snapshot_stride == 0 {
            trace
                .weight_snapshots
                .push((series.start_index() + k, state.weights().to_vec()));
        }
    }
    Ok((trace, state))
}

pub fn run_prediction(series: &PriceSeries, config: &PredictorConfig) -> Result<PredictionTrace> {
    train(series, config).map(|(trace, _)| trace)
}

/// Trains over the full series, then predicts the `L` days after the last
/// observed day with the final weights held fixed. The forecast for day
/// `t + j` reads only the `N` prices ending at `t - L + j`.
pub fn forecast_future(series: &PriceSeries, config: &PredictorConfig) -> Result<Vec<(usize, f64)>> {
    let (_, state) = train(series, config)?;
    let last = series.end_index();
    (1..=config.window)
        .map(|j| {
            let input = tap_input(series, last - config.window + j, config.n_coeffs)?;
            Ok((last + j, state.output(&input)?))
        })
        .collect()
}
