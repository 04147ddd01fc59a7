//! Grid-search cross-validation for the sparsity level λ and the constraint
//! level (κ, or τ for the floor variant).
//!
//! "N-fold" here is N independent random splits, not partition folds: each
//! split holds out a quarter of the rows, the estimator is fitted on the
//! rest at every grid point, and the summed squared Frobenius distance to
//! the held-out pilot is the score. Ties go to the smaller λ, then the
//! smaller constraint value.
//!
//! Per-split RNG streams are derived from `(seed, split index)`, and the
//! grid is evaluated with an order-preserving parallel map, so results never
//! depend on thread count or scheduling.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pilot::{DataMatrix, PilotEstimate};
use crate::pipeline::{estimate_from_pilot, EstimatorKind, EstimatorSpec, PilotSpec};
use crate::scalar::{real, Scalar};

/// Cross-validation layout and grids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvSpec<F> {
    /// Number of random splits.
    pub n_splits: usize,
    /// Fraction of rows used for training (train size is the ceiling).
    pub train_fraction: f64,
    pub lambda_grid: Vec<F>,
    /// Constraint grid: κ values for condition-capped variants (all ≥ 1),
    /// τ values for the floor variant (> 0). A singleton keeps the level
    /// fixed while λ is tuned.
    pub kappa_grid: Vec<F>,
    pub seed: u64,
}

impl<F: Scalar> Default for CvSpec<F> {
    fn default() -> Self {
        Self {
            n_splits: 5,
            train_fraction: 0.75,
            lambda_grid: lambda_grid_linear(),
            kappa_grid: vec![real(1e3), real(1e4), real(1e5)],
            seed: 0,
        }
    }
}

/// The reference λ grid: `0.01` to `0.96` in steps of `0.05`.
pub fn lambda_grid_linear<F: Scalar>() -> Vec<F> {
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let v = 0.01 + 0.05 * f64::from(k);
        if v > 1.0 {
            break;
        }
        grid.push(real::<F>(v));
        k += 1;
    }
    grid
}

/// `count` logarithmically spaced λ values over `[0.01, 1]`.
pub fn lambda_grid_log<F: Scalar>(count: usize) -> Vec<F> {
    assert!(count >= 2);
    let (lo, hi) = (0.01f64.ln(), 0.0f64);
    (0..count)
        .map(|i| real::<F>((lo + (hi - lo) * i as f64 / (count - 1) as f64).exp()))
        .collect()
}

/// One grid entry of the score table.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CvScore<F> {
    pub lambda: F,
    pub kappa: F,
    /// Summed squared Frobenius distance over the splits; infinite when the
    /// estimator failed on some split at this grid point.
    pub score: F,
}

/// Cross-validation outcome: the winning pair plus the full score table.
#[derive(Debug, Clone)]
pub struct CvOutcome<F> {
    pub lambda_hat: F,
    pub kappa_hat: F,
    pub table: Vec<CvScore<F>>,
    pub warnings: Vec<String>,
    /// Splits whose pilots were built successfully.
    pub splits_used: usize,
}

fn split_indices(n: usize, train: usize, rng: &mut ChaCha12Rng) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let mut train_idx = idx[..train].to_vec();
    let mut test_idx = idx[train..].to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    (train_idx, test_idx)
}

/// Runs the grid search. The estimator template's λ and constraint level are
/// replaced by each grid pair; everything else (solver knobs, warm-start
/// policy) is kept.
pub fn cross_validate<F: Scalar>(
    x: &DataMatrix<F>,
    pilot_spec: &PilotSpec<F>,
    template: &EstimatorSpec<F>,
    spec: &CvSpec<F>,
) -> Result<CvOutcome<F>> {
    if x.n() < 8 {
        return Err(Error::InsufficientData { needed: 8, got: x.n() });
    }
    if spec.lambda_grid.is_empty() || spec.kappa_grid.is_empty() {
        return Err(Error::InvalidInput("cross-validation grids must be nonempty".into()));
    }
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::InvalidInput("train fraction must lie in (0, 1)".into()));
    }
    if spec.n_splits == 0 {
        return Err(Error::InvalidInput("need at least one split".into()));
    }
    for grid in [&spec.lambda_grid, &spec.kappa_grid] {
        if grid.windows(2).any(|w| w[0] >= w[1]) && grid.len() > 1 {
            return Err(Error::InvalidInput("grids must be strictly ascending".into()));
        }
    }
    let needs_kappa = !matches!(template.kind, EstimatorKind::Sam | EstimatorKind::Rate);
    if matches!(
        template.kind,
        EstimatorKind::Rws { .. }
            | EstimatorKind::Arws1 { .. }
            | EstimatorKind::Arws2 { .. }
            | EstimatorKind::Corr { .. }
    ) && spec.kappa_grid.iter().any(|&k| k < F::one())
    {
        return Err(Error::InvalidInput("condition-number grid values must be ≥ 1".into()));
    }

    let n = x.n();
    let n_train = ((spec.train_fraction * n as f64).ceil() as usize).min(n - 1).max(1);

    let mut warnings = Vec::new();
    let mut splits: Vec<(PilotEstimate<F>, usize, PilotEstimate<F>)> = Vec::new();
    for s in 0..spec.n_splits {
        let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
        rng.set_stream(s as u64);
        let (train_idx, test_idx) = split_indices(n, n_train, &mut rng);
        let train = match x.select_rows(&train_idx) {
            Ok(t) => t,
            Err(e) => {
                warnings.push(format!("split {s}: train selection failed: {e}"));
                continue;
            }
        };
        let test = match x.select_rows(&test_idx) {
            Ok(t) => t,
            Err(e) => {
                warnings.push(format!("split {s}: test selection failed: {e}"));
                continue;
            }
        };
        let pilot_train = match pilot_spec.build(&train) {
            Ok(p) => p,
            Err(e) => {
                warnings.push(format!("split {s}: train pilot failed: {e}"));
                continue;
            }
        };
        let pilot_test = match pilot_spec.build(&test) {
            Ok(p) => p,
            Err(e) => {
                warnings.push(format!("split {s}: test pilot failed: {e}"));
                continue;
            }
        };
        splits.push((pilot_train, train.n(), pilot_test));
    }
    if splits.is_empty() {
        return Err(Error::CvFailure(format!(
            "all {} splits failed: {}",
            spec.n_splits,
            warnings.join("; ")
        )));
    }

    let grid: Vec<(F, F)> = spec
        .lambda_grid
        .iter()
        .flat_map(|&l| spec.kappa_grid.iter().map(move |&k| (l, k)))
        .collect();
    let scores: Vec<F> = grid
        .par_iter()
        .map(|&(lambda, kappa)| {
            let run = EstimatorSpec {
                kind: if needs_kappa { template.kind.with_constraint(kappa) } else { template.kind },
                lambda,
                ..*template
            };
            let mut total = F::zero();
            for (pilot_train, n_train, pilot_test) in &splits {
                match estimate_from_pilot(pilot_train, *n_train, &run) {
                    Ok(outcome) => {
                        let d = outcome.estimate.frobenius_distance(&pilot_test.sigma);
                        total += d * d;
                    }
                    Err(_) => return F::infinity(),
                }
            }
            total
        })
        .collect();

    let mut best = 0usize;
    for (i, &s) in scores.iter().enumerate() {
        if s < scores[best] {
            best = i;
        }
    }
    if scores[best].is_infinite() {
        return Err(Error::CvFailure("every grid point failed".into()));
    }
    let table = grid
        .iter()
        .zip(&scores)
        .map(|(&(lambda, kappa), &score)| CvScore { lambda, kappa, score })
        .collect();
    Ok(CvOutcome {
        lambda_hat: grid[best].0,
        kappa_hat: grid[best].1,
        table,
        warnings,
        splits_used: splits.len(),
    })
}
