//! Correlation-based predictor design over a grid of filter lengths `N` and
//! prediction windows `L`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::predictor::{run_prediction, PredictorConfig};
use crate::rls_core::DEFAULT_DELTA;
use crate::timeseries::PriceSeries;

/// Sample Pearson correlation of two equal-length sequences.
pub fn correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::param("correlation", "needs at least two samples"));
    }
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let (mut cov, mut var_a, mut var_b) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let da = x - mean_a;
        let db = y - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    let r = cov / (var_a.sqrt() * var_b.sqrt());
    if !r.is_finite() {
        return Err(Error::UndefinedCorrelation);
    }
    Ok(r.clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub l_values: Vec<usize>,
    pub lambda: f64,
    pub delta: f64,
    pub eval_from: usize,
    pub eval_to: usize,
}

impl SweepConfig {
    /// `N` in 5..=100 step 5, `L` in 1..=30, `lambda = 0.98`.
    pub fn default_grid(eval_from: usize, eval_to: usize) -> Self {
        SweepConfig {
            n_values: (5..=100).step_by(5).collect(),
            l_values: (1..=30).collect(),
            lambda: 0.98,
            delta: DEFAULT_DELTA,
            eval_from,
            eval_to,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn ascending(name: &'static str, v: &[usize]) -> Result<()> {
            if v.is_empty() {
                return Err(Error::param(name, "must not be empty"));
            }
            if v.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::param(name, "must be strictly ascending"));
            }
            if v[0] == 0 {
                return Err(Error::param(name, "values must be at least 1"));
            }
            Ok(())
        }
        ascending("n_values", &self.n_values)?;
        ascending("l_values", &self.l_values)?;
        if self.eval_from >= self.eval_to {
            return Err(Error::param("eval_from", "must be less than eval_to"));
        }
        PredictorConfig::new(1, 1, self.lambda)
            .with_delta(self.delta)
            .validate()
    }

    /// Checks every grid cell against the series before any work starts.
    fn check_cells(&self, series: &PriceSeries) -> Result<()> {
        if !series.contains(self.eval_from) || !series.contains(self.eval_to) {
            return Err(Error::OutOfRange {
                from: self.eval_from,
                to: self.eval_to,
                first: series.start_index(),
                last: series.end_index(),
            });
        }
        for &n in &self.n_values {
            for &l in &self.l_values {
                let cfg = self.predictor(n, l);
                let first_prediction = series.start_index() + n - 1 + l;
                if series.len() < cfg.min_series_len() {
                    return Err(Error::SweepCell {
                        n,
                        l,
                        reason: format!(
                            "series has {} samples, needs N + L + 1 = {}",
                            series.len(),
                            cfg.min_series_len()
                        ),
                    });
                }
                if first_prediction > self.eval_from {
                    return Err(Error::SweepCell {
                        n,
                        l,
                        reason: format!(
                            "first prediction at day {first_prediction} is after eval_from {}",
                            self.eval_from
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    fn predictor(&self, n: usize, l: usize) -> PredictorConfig {
        PredictorConfig::new(n, l, self.lambda).with_delta(self.delta)
    }
}

/// Grid of correlations; `None` marks an undefined cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSurface {
    pub n_values: Vec<usize>,
    pub l_values: Vec<usize>,
    /// Row-major: `values[i][j]` belongs to `(n_values[i], l_values[j])`.
    pub values: Vec<Vec<Option<f64>>>,
}

impl CorrelationSurface {
    pub fn get(&self, n: usize, l: usize) -> Option<f64> {
        let i = self.n_values.iter().position(|&v| v == n)?;
        let j = self.l_values.iter().position(|&v| v == l)?;
        self.values[i][j]
    }

    /// Long-form `(n, l, r)` cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, Option<f64>)> + '_ {
        self.n_values.iter().enumerate().flat_map(move |(i, &n)| {
            self.l_values
                .iter()
                .enumerate()
                .map(move |(j, &l)| (n, l, self.values[i][j]))
        })
    }
}

fn cell_correlation(series: &PriceSeries, config: &SweepConfig, n: usize, l: usize) -> Result<Option<f64>> {
    let trace = run_prediction(series, &config.predictor(n, l)).map_err(|e| Error::SweepCell {
        n,
        l,
        reason: e.to_string(),
    })?;
    let (predicted, desired) = trace.window(config.eval_from, config.eval_to)?;
    match correlation(predicted, desired) {
        Ok(r) => Ok(Some(r)),
        Err(Error::UndefinedCorrelation) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Correlation between predicted and actual prices over the evaluation
/// window for every `(N, L)` cell. Cells run in parallel on the current rayon
/// pool; the result does not depend on evaluation order.
pub fn sweep_surface(series: &PriceSeries, config: &SweepConfig) -> Result<CorrelationSurface> {
    config.validate()?;
    config.check_cells(series)?;

    let pairs: Vec<(usize, usize)> = config
        .n_values
        .iter()
        .flat_map(|&n| config.l_values.iter().map(move |&l| (n, l)))
        .collect();
    let flat: Vec<Option<f64>> = pairs
        .par_iter()
        .map(|&(n, l)| cell_correlation(series, config, n, l))
        .collect::<Result<_>>()?;

    let width = config.l_values.len();
    Ok(CorrelationSurface {
        n_values: config.n_values.clone(),
        l_values: config.l_values.clone(),
        values: flat.chunks(width).map(<[_]>::to_vec).collect(),
    })
}

fn max_defined(cells: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    cells.flatten().reduce(f64::max)
}

/// Per-`N` maximum over `L` (side profile of the surface).
pub fn profile_by_n(surface: &CorrelationSurface) -> Vec<(usize, Option<f64>)> {
    surface
        .n_values
        .iter()
        .zip(&surface.values)
        .map(|(&n, row)| (n, max_defined(row.iter().copied())))
        .collect()
}

/// Per-`L` maximum over `N` (front profile of the surface).
pub fn profile_by_l(surface: &CorrelationSurface) -> Vec<(usize, Option<f64>)> {
    surface
        .l_values
        .iter()
        .enumerate()
        .map(|(j, &l)| (l, max_defined(surface.values.iter().map(|row| row[j]))))
        .collect()
}
