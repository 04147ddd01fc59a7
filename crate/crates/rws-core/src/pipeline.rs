//! End-to-end estimator recipes: observation matrix → pilot → thresholded
//! warm start → constrained solve.
//!
//! The solver protocol mirrors the estimation procedure used throughout the
//! benchmark harness: the thresholded pilot is the warm start and, when it
//! already satisfies the spectral constraint, it is accepted as the final
//! estimate outright (`accept_feasible_start`). The weighted variants derive
//! their penalty weights here: `arws1` uses `|Σ̃|` entrywise, `arws2` uses
//! `(|thresholded Σ̃| + 1/n)⁻¹`.

use serde::{Deserialize, Serialize};

use crate::admm::{solve, SolveResult, SolverConfig, Variant};
use crate::error::Result;
use crate::matrix::SymmetricMatrix;
use crate::pilot::{
    huber_pilot, mom_pilot_opts, rank_pilot_opts, sample_covariance, DataMatrix, HuberTuning,
    PilotEstimate, PilotMethod, DEFAULT_FISHER_CONSTANT,
};
use crate::scalar::{real, real_of, Scalar};
use crate::threshold::rate_estimate;

/// Pilot construction recipe.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct PilotSpec<F> {
    pub method: PilotMethod,
    /// Fisher consistency constant for the rank pilot's MAD scales.
    pub fisher_constant: F,
    pub huber: HuberTuning<F>,
    /// Group count for the median-of-means pilot.
    pub mom_groups: usize,
    pub mom_shuffle_seed: Option<u64>,
    /// Replace zero MAD scales by a tiny floor instead of erroring.
    pub allow_degenerate_scale: bool,
}

impl<F: Scalar> Default for PilotSpec<F> {
    fn default() -> Self {
        Self {
            method: PilotMethod::Huber,
            fisher_constant: real(DEFAULT_FISHER_CONSTANT),
            huber: HuberTuning::default(),
            mom_groups: 10,
            mom_shuffle_seed: None,
            allow_degenerate_scale: false,
        }
    }
}

impl<F: Scalar> PilotSpec<F> {
    pub fn with_method(method: PilotMethod) -> Self {
        Self { method, ..Self::default() }
    }

    pub fn build(&self, x: &DataMatrix<F>) -> Result<PilotEstimate<F>> {
        match self.method {
            PilotMethod::Sample => sample_covariance(x),
            PilotMethod::Rank => {
                rank_pilot_opts(x, self.fisher_constant, self.allow_degenerate_scale)
            }
            PilotMethod::Huber => huber_pilot(x, self.huber),
            PilotMethod::MedianOfMeans => mom_pilot_opts(x, self.mom_groups, self.mom_shuffle_seed),
        }
    }
}

/// Estimator family of an end-to-end run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind<F> {
    /// The pilot itself (sample-covariance baseline when paired with the
    /// sample pilot).
    Sam,
    /// Thresholded pilot, no constraint.
    Rate,
    Rws { kappa: F },
    /// Weighted penalty, `W = |Σ̃|`.
    Arws1 { kappa: F },
    /// Weighted penalty, `W_ij = (|thresholded Σ̃_ij| + 1/n)⁻¹`.
    Arws2 { kappa: F },
    Rpde { tau: F },
    /// Correlation model with pinned unit diagonal.
    Corr { kappa: F },
}

impl<F: Scalar> EstimatorKind<F> {
    /// Same family with the constraint level replaced (κ or τ depending on
    /// the variant); `Sam`/`Rate` are unchanged.
    pub fn with_constraint(self, c: F) -> Self {
        match self {
            EstimatorKind::Sam => EstimatorKind::Sam,
            EstimatorKind::Rate => EstimatorKind::Rate,
            EstimatorKind::Rws { .. } => EstimatorKind::Rws { kappa: c },
            EstimatorKind::Arws1 { .. } => EstimatorKind::Arws1 { kappa: c },
            EstimatorKind::Arws2 { .. } => EstimatorKind::Arws2 { kappa: c },
            EstimatorKind::Rpde { .. } => EstimatorKind::Rpde { tau: c },
            EstimatorKind::Corr { .. } => EstimatorKind::Corr { kappa: c },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Sam => "sam",
            EstimatorKind::Rate => "rate",
            EstimatorKind::Rws { .. } => "rws",
            EstimatorKind::Arws1 { .. } => "arws1",
            EstimatorKind::Arws2 { .. } => "arws2",
            EstimatorKind::Rpde { .. } => "rpde",
            EstimatorKind::Corr { .. } => "corr",
        }
    }
}

/// Full recipe: estimator family plus solver knobs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EstimatorSpec<F> {
    pub kind: EstimatorKind<F>,
    pub lambda: F,
    pub mu: F,
    pub epsilon: F,
    pub max_iters: usize,
    /// Accept the warm start untouched when it already satisfies the
    /// constraint.
    pub accept_feasible_start: bool,
    /// Use the thresholded pilot as the starting point.
    pub use_rate_warm_start: bool,
}

impl<F: Scalar> EstimatorSpec<F> {
    pub fn new(kind: EstimatorKind<F>, lambda: F) -> Self {
        Self {
            kind,
            lambda,
            mu: F::one(),
            epsilon: real(1e-6),
            max_iters: 5000,
            accept_feasible_start: true,
            use_rate_warm_start: true,
        }
    }

    pub fn with_lambda(mut self, lambda: F) -> Self {
        self.lambda = lambda;
        self
    }
}

/// Result of an end-to-end estimation.
#[derive(Debug, Clone)]
pub struct EstimateOutcome<F> {
    pub estimate: SymmetricMatrix<F>,
    /// Solver details for the constrained variants; `None` for `Sam`/`Rate`.
    pub solve: Option<SolveResult<F>>,
}

/// Runs the estimator from a prebuilt pilot (`n` is the sample count the
/// pilot was built from, needed by the adaptive thresholds).
pub fn estimate_from_pilot<F: Scalar>(
    pilot: &PilotEstimate<F>,
    n: usize,
    spec: &EstimatorSpec<F>,
) -> Result<EstimateOutcome<F>> {
    match spec.kind {
        EstimatorKind::Sam => Ok(EstimateOutcome { estimate: pilot.sigma.clone(), solve: None }),
        EstimatorKind::Rate => Ok(EstimateOutcome {
            estimate: rate_estimate(pilot, spec.lambda, n)?,
            solve: None,
        }),
        kind => {
            let variant = match kind {
                EstimatorKind::Rws { kappa } => Variant::Rws { kappa },
                EstimatorKind::Arws1 { kappa } | EstimatorKind::Arws2 { kappa } => {
                    Variant::Arws { kappa }
                }
                EstimatorKind::Rpde { tau } => Variant::Rpde { tau },
                EstimatorKind::Corr { kappa } => Variant::Correlation { kappa },
                EstimatorKind::Sam | EstimatorKind::Rate => unreachable!(),
            };
            // The thresholded pilot: warm start and, for arws2, the weight
            // source. Skipped when the pilot's scales cannot support
            // adaptive thresholds.
            let rate = rate_estimate(pilot, spec.lambda, n).ok();
            let mut config = SolverConfig::new(spec.lambda, variant);
            config.mu = spec.mu;
            config.epsilon = spec.epsilon;
            config.max_iters = spec.max_iters;
            config.accept_feasible_pilot = spec.accept_feasible_start;
            if spec.use_rate_warm_start {
                config.warm_start = rate.clone();
            }
            match kind {
                EstimatorKind::Arws1 { .. } => {
                    let p = pilot.sigma.dim();
                    config.weights = Some(SymmetricMatrix::from_fn(p, |i, j| {
                        pilot.sigma.get(i, j).abs()
                    }));
                }
                EstimatorKind::Arws2 { .. } => {
                    let p = pilot.sigma.dim();
                    let inv_n = F::one() / real_of::<F>(n);
                    let base = rate.clone().unwrap_or_else(|| pilot.sigma.clone());
                    config.weights = Some(SymmetricMatrix::from_fn(p, |i, j| {
                        F::one() / (base.get(i, j).abs() + inv_n)
                    }));
                }
                _ => {}
            }
            let result = solve(&pilot.sigma, &config, None)?;
            Ok(EstimateOutcome { estimate: result.estimate.clone(), solve: Some(result) })
        }
    }
}

/// Convenience wrapper: builds the pilot from data, then estimates.
pub fn estimate_from_data<F: Scalar>(
    x: &DataMatrix<F>,
    pilot_spec: &PilotSpec<F>,
    spec: &EstimatorSpec<F>,
) -> Result<(PilotEstimate<F>, EstimateOutcome<F>)> {
    let pilot = pilot_spec.build(x)?;
    let outcome = estimate_from_pilot(&pilot, x.n(), spec)?;
    Ok((pilot, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::condition_number;

    fn pseudo_data(n: usize, p: usize, seed: u64) -> DataMatrix<f64> {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z = z ^ (z >> 31);
            (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        DataMatrix::new((0..n).map(|_| (0..p).map(|_| next()).collect()).collect()).unwrap()
    }

    #[test]
    fn sam_returns_pilot_and_rate_thresholds() {
        let x = pseudo_data(30, 5, 1);
        let pilot_spec = PilotSpec::with_method(PilotMethod::Sample);
        let (pilot, sam) =
            estimate_from_data(&x, &pilot_spec, &EstimatorSpec::new(EstimatorKind::Sam, 0.3)).unwrap();
        assert_eq!(sam.estimate.as_slice(), pilot.sigma.as_slice());

        let (_, rate) =
            estimate_from_data(&x, &pilot_spec, &EstimatorSpec::new(EstimatorKind::Rate, 5.0)).unwrap();
        // Heavy threshold kills every off-diagonal entry.
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert_eq!(rate.estimate.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn rws_pipeline_produces_feasible_estimate() {
        let x = pseudo_data(20, 8, 3);
        let pilot_spec = PilotSpec::with_method(PilotMethod::Sample);
        let spec = EstimatorSpec::new(EstimatorKind::Rws { kappa: 10.0 }, 0.05);
        let (_, outcome) = estimate_from_data(&x, &pilot_spec, &spec).unwrap();
        let cond = condition_number(&outcome.estimate).unwrap();
        assert!(cond <= 10.0 * (1.0 + 1e-6));
    }

    #[test]
    fn weighted_kinds_build_their_weights() {
        let x = pseudo_data(25, 6, 9);
        let pilot_spec = PilotSpec::with_method(PilotMethod::Sample);
        for kind in [EstimatorKind::Arws1 { kappa: 100.0 }, EstimatorKind::Arws2 { kappa: 100.0 }] {
            let spec = EstimatorSpec::new(kind, 0.05);
            let (_, outcome) = estimate_from_data(&x, &pilot_spec, &spec).unwrap();
            assert!(outcome.solve.is_some());
            assert!(condition_number(&outcome.estimate).unwrap() <= 100.0 * (1.0 + 1e-6));
        }
    }

    #[test]
    fn feasible_warm_start_short_circuits() {
        // A near-identity sample pilot thresholds to a well-conditioned
        // matrix, which the protocol accepts outright (zero iterations).
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| (0..3).map(|j| ((i * (j + 3) + j) % 11) as f64 / 11.0).collect())
            .collect();
        let x = DataMatrix::new(rows).unwrap();
        let pilot_spec = PilotSpec::with_method(PilotMethod::Sample);
        let spec = EstimatorSpec::new(EstimatorKind::Rws { kappa: 1e6 }, 1.0);
        let (pilot, outcome) = estimate_from_data(&x, &pilot_spec, &spec).unwrap();
        let solve = outcome.solve.unwrap();
        assert_eq!(solve.iterations, 0);
        let rate = rate_estimate(&pilot, 1.0, 40).unwrap();
        assert_eq!(outcome.estimate.as_slice(), rate.as_slice());
    }

    #[test]
    fn with_constraint_swaps_levels() {
        let k: EstimatorKind<f64> = EstimatorKind::Rws { kappa: 1.0 };
        assert_eq!(k.with_constraint(5.0), EstimatorKind::Rws { kappa: 5.0 });
        let k: EstimatorKind<f64> = EstimatorKind::Rpde { tau: 1.0 };
        assert_eq!(k.with_constraint(0.1), EstimatorKind::Rpde { tau: 0.1 });
        let k: EstimatorKind<f64> = EstimatorKind::Rate;
        assert_eq!(k.with_constraint(9.0), EstimatorKind::Rate);
    }
}
