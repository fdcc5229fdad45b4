//! Exponentially-weighted least squares.
//!
//! [`FilterState::update`] is the O(N²) recursion; [`batch_solve`] solves the
//! same weighted normal equations directly and serves as its oracle.
//!
//! With `P(-1) = I / delta`, after samples `0..=k` the recursion holds
//!
//! ```text
//! R(k) = sum_i lambda^(k-i) x(i) x(i)^T + lambda^(k+1) delta I
//! p(k) = sum_i lambda^(k-i) x(i) d(i)
//! w(k) = R(k)^-1 p(k),   P(k) = R(k)^-1
//! ```

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const DEFAULT_DELTA: f64 = 0.01;

/// One regression pair: tap input `x(i)` and desired response `d(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSample {
    pub input: Vec<f64>,
    pub desired: f64,
}

impl RegressionSample {
    pub fn new(input: Vec<f64>, desired: f64) -> Self {
        RegressionSample { input, desired }
    }
}

/// Filter output and a priori error for one update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateOutput {
    pub output: f64,
    /// `desired - output`, computed with the pre-update weights.
    pub prior_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    weights: DVector<f64>,
    inv_corr: DMatrix<f64>,
    lambda: f64,
    delta: f64,
    samples_seen: usize,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::param("lambda", format!("{lambda} not in (0, 1)")))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::param("delta", format!("{delta} must be > 0")))
    }
}

impl FilterState {
    /// Zero weights and `inv_corr = I / delta`.
    pub fn new(n_coeffs: usize, lambda: f64, delta: f64) -> Result<Self> {
        if n_coeffs < 1 {
            return Err(Error::param("n_coeffs", "must be at least 1"));
        }
        check_lambda(lambda)?;
        check_delta(delta)?;
        Ok(FilterState {
            weights: DVector::zeros(n_coeffs),
            inv_corr: DMatrix::identity(n_coeffs, n_coeffs) / delta,
            lambda,
            delta,
            samples_seen: 0,
        })
    }

    pub fn n_coeffs(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        self.weights.as_slice()
    }

    pub fn inv_corr(&self) -> &DMatrix<f64> {
        &self.inv_corr
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn samples_seen(&self) -> usize {
        self.samples_seen
    }

    /// Filter output `w^T x` for the current weights, without adapting.
    pub fn output(&self, input: &[f64]) -> Result<f64> {
        self.check_input(input)?;
        Ok(dot(self.weights.as_slice(), input))
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.n_coeffs() {
            return Err(Error::DimensionMismatch {
                expected: self.n_coeffs(),
                actual: input.len(),
            });
        }
        if input.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("filter input"));
        }
        Ok(())
    }

    /// One RLS step. Returns the a priori output and error.
    pub fn update(&mut self, input: &[f64], desired: f64) -> Result<UpdateOutput> {
        self.check_input(input)?;
        if !desired.is_finite() {
            return Err(Error::NonFinite("desired response"));
        }
        let n = self.n_coeffs();
        let x = DVector::from_column_slice(input);

        let output = dot(self.weights.as_slice(), input);
        let prior_error = desired - output;

        // P is symmetric, so x^T P == (P x)^T.
        let px = &self.inv_corr * &x;
        let denom = self.lambda + x.dot(&px);
        let gain = &px / denom;

        self.weights.axpy(prior_error, &gain, 1.0);
        self.inv_corr.ger(-1.0, &gain, &px, 1.0);
        self.inv_corr /= self.lambda;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (self.inv_corr[(i, j)] + self.inv_corr[(j, i)]) / 2.0;
                self.inv_corr[(i, j)] = avg;
                self.inv_corr[(j, i)] = avg;
            }
        }
        self.samples_seen += 1;

        Ok(UpdateOutput {
            output,
            prior_error,
        })
    }

    pub fn update_sample(&mut self, sample: &RegressionSample) -> Result<UpdateOutput> {
        self.update(&sample.input, sample.desired)
    }
}

pub fn init_filter(n_coeffs: usize, lambda: f64, delta: f64) -> Result<FilterState> {
    FilterState::new(n_coeffs, lambda, delta)
}

/// Value-passing form of [`FilterState::update`].
pub fn rls_update(
    mut state: FilterState,
    sample: &RegressionSample,
) -> Result<(FilterState, UpdateOutput)> {
    let out = state.update_sample(sample)?;
    Ok((state, out))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn history_dim(history: &[RegressionSample]) -> Result<usize> {
    let first = history
        .first()
        .ok_or_else(|| Error::param("history", "must not be empty"))?;
    let n = first.input.len();
    for sample in history {
        if sample.input.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: sample.input.len(),
            });
        }
    }
    Ok(n)
}

/// Solves the regularized weighted normal equations directly:
///
/// `(sum_i lambda^(k-i) x x^T + lambda^(k+1) delta I) w = sum_i lambda^(k-i) x d`
///
/// `lambda` may equal 1 here (unweighted least squares).
pub fn batch_solve(history: &[RegressionSample], lambda: f64, delta: f64) -> Result<Vec<f64>> {
    let n = history_dim(history)?;
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::param("lambda", format!("{lambda} not in (0, 1]")));
    }
    check_delta(delta)?;

    let k = history.len() - 1;
    let mut corr = DMatrix::<f64>::zeros(n, n);
    let mut cross = DVector::<f64>::zeros(n);
    for (i, sample) in history.iter().enumerate() {
        let weight = lambda.powi((k - i) as i32);
        let x = DVector::from_column_slice(&sample.input);
        corr.ger(weight, &x, &x, 1.0);
        cross.axpy(weight * sample.desired, &x, 1.0);
    }
    let reg = lambda.powi(history.len() as i32) * delta;
    for i in 0..n {
        corr[(i, i)] += reg;
    }

    let solution = match corr.clone().cholesky() {
        Some(chol) => chol.solve(&cross),
        None => corr.lu().solve(&cross).ok_or(Error::Singular)?,
    };
    if solution.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(solution.as_slice().to_vec())
}

/// Weighted squared error `sum_i lambda^(k-i) (d(i) - x(i)^T w)^2`.
pub fn objective(history: &[RegressionSample], weights: &[f64], lambda: f64) -> Result<f64> {
    if history.is_empty() {
        return Ok(0.0);
    }
    let n = history_dim(history)?;
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: weights.len(),
        });
    }
    let k = history.len() - 1;
    Ok(history
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let e = s.desired - dot(&s.input, weights);
            lambda.powi((k - i) as i32) * e * e
        })
        .sum())
}

/// [`objective`] plus the initialization penalty `lambda^(k+1) delta |w|^2`,
/// the exact function minimized by [`batch_solve`].
pub fn regularized_objective(
    history: &[RegressionSample],
    weights: &[f64],
    lambda: f64,
    delta: f64,
) -> Result<f64> {
    let base = objective(history, weights, lambda)?;
    let penalty = lambda.powi(history.len() as i32) * delta * dot(weights, weights);
    Ok(base + penalty)
}
