//! Minimum-variance portfolio weights and the rolling-window backtest.
//!
//! The weights minimize `wᵀΣ̂w` under the budget constraint `wᵀ1 = 1`, with
//! the closed form `w = Σ̂⁻¹1 / (1ᵀΣ̂⁻¹1)` evaluated through a Cholesky
//! solve (never an explicit inverse — conditioning of `Σ̂` is the whole
//! point) and renormalized so the budget holds to rounding.
//!
//! The backtest walks the return history one period at a time: at step `t`
//! the covariance is estimated from the most recent `window` rows, weights
//! are formed, and the realized return is `wᵀx_t`. Monthly mean, standard
//! deviation and their ratio are reported ×100; a zero standard deviation
//! reports a `+∞` Sharpe sentinel with a warning.

use serde::{Deserialize, Serialize};

use crate::cv::{cross_validate, CvSpec};
use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::pilot::DataMatrix;
use crate::pipeline::{estimate_from_pilot, EstimatorSpec, PilotSpec};
use crate::scalar::{real, real_of, Scalar};

/// Closed-form minimum-variance weights of a positive definite estimate.
pub fn min_variance_weights<F: Scalar>(sigma_hat: &SymmetricMatrix<F>) -> Result<Vec<F>> {
    let factor = sigma_hat.cholesky()?;
    let ones = vec![F::one(); sigma_hat.dim()];
    let raw = factor.solve(&ones);
    let total: F = raw.iter().copied().sum();
    // 1ᵀΣ̂⁻¹1 > 0 for positive definite Σ̂.
    let weights: Vec<F> = raw.into_iter().map(|w| w / total).collect();
    Ok(weights)
}

/// Covariance recipe of a backtest: the pilot alone (`estimator: None`,
/// the sample-covariance baseline when paired with the sample pilot) or a
/// full constrained estimator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(
    serialize = "F: Scalar + serde::Serialize",
    deserialize = "F: Scalar + serde::de::Deserialize<'de>"
))]
pub struct BacktestConfig<F> {
    /// Rolling estimation window length (the experiment uses 120 months).
    pub window: usize,
    pub pilot: PilotSpec<F>,
    pub estimator: Option<EstimatorSpec<F>>,
    /// Tune (λ, constraint) by cross-validation on the first window, then
    /// hold them fixed for every step.
    pub tune_first_window: Option<CvSpec<F>>,
}

/// Backtest output; all percentages are ×100.
#[derive(Debug, Clone)]
pub struct BacktestResult<F> {
    pub step_returns: Vec<F>,
    /// Steps whose estimation failed, with the reason.
    pub skipped: Vec<(usize, String)>,
    pub mean_pct: F,
    pub sd_pct: F,
    pub sharpe_pct: F,
    /// `(λ, constraint)` chosen by first-window tuning, when enabled.
    pub tuned: Option<(F, F)>,
    pub warnings: Vec<String>,
}

/// Runs the rolling-window backtest over a `T×p` return history.
pub fn backtest<F: Scalar>(returns: &DataMatrix<F>, config: &BacktestConfig<F>) -> Result<BacktestResult<F>> {
    let t_total = returns.n();
    if config.window < 2 {
        return Err(Error::InvalidInput("window must hold at least two observations".into()));
    }
    if t_total < config.window + 1 {
        return Err(Error::InvalidInput(format!(
            "need at least window+1 = {} rows, got {t_total}",
            config.window + 1
        )));
    }

    let mut warnings = Vec::new();
    let mut estimator = config.estimator;
    let mut tuned = None;
    if let (Some(cv), Some(est)) = (&config.tune_first_window, &mut estimator) {
        let first: Vec<usize> = (0..config.window).collect();
        let window_data = returns.select_rows(&first)?;
        match cross_validate(&window_data, &config.pilot, est, cv) {
            Ok(out) => {
                est.lambda = out.lambda_hat;
                est.kind = est.kind.with_constraint(out.kappa_hat);
                tuned = Some((out.lambda_hat, out.kappa_hat));
            }
            Err(e) => warnings.push(format!("first-window tuning failed, keeping template: {e}")),
        }
    }

    let mut step_returns = Vec::new();
    let mut skipped = Vec::new();
    for t in config.window..t_total {
        let idx: Vec<usize> = (t - config.window..t).collect();
        let outcome = (|| -> Result<F> {
            let window_data = returns.select_rows(&idx)?;
            let pilot = config.pilot.build(&window_data)?;
            let estimate = match &estimator {
                Some(est) => estimate_from_pilot(&pilot, window_data.n(), est)?.estimate,
                None => pilot.sigma,
            };
            let w = min_variance_weights(&estimate)?;
            Ok(w.iter().zip(returns.row(t)).map(|(&wi, &xi)| wi * xi).sum())
        })();
        match outcome {
            Ok(u) => step_returns.push(u),
            Err(e) => skipped.push((t, e.to_string())),
        }
    }
    if step_returns.is_empty() {
        return Err(Error::SolverFailure("every backtest step failed".into()));
    }

    let m = real_of::<F>(step_returns.len());
    let mean: F = step_returns.iter().copied().sum::<F>() / m;
    let sd = if step_returns.len() < 2 {
        F::zero()
    } else {
        (step_returns.iter().map(|&u| (u - mean) * (u - mean)).sum::<F>()
            / (m - F::one()))
        .sqrt()
    };
    let hundred = real::<F>(100.0);
    let sharpe_pct = if sd == F::zero() {
        warnings.push("zero standard deviation: Sharpe reported as +infinity".into());
        F::infinity()
    } else {
        hundred * mean / sd
    };
    Ok(BacktestResult {
        step_returns,
        skipped,
        mean_pct: hundred * mean,
        sd_pct: hundred * sd,
        sharpe_pct,
        tuned,
        warnings,
    })
}
