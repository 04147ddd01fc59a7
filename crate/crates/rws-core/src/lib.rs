//! Robust, well-conditioned sparse covariance estimation.
//!
//! The crate estimates a high-dimensional covariance matrix in three stages:
//!
//! 1. a robust **pilot** estimate built from pairwise statistics
//!    ([`pilot`]: rank/Kendall-tau, adaptive Huber, median-of-means, or the
//!    plain sample covariance),
//! 2. entry-adaptive **soft-thresholding** of the pilot ([`threshold`]),
//! 3. an alternating-direction solver ([`admm`]) that returns the nearest
//!    sparse matrix whose condition number is capped by `κ` (or whose
//!    eigenvalues are floored at `τ`), via the eigenvalue projection in
//!    [`projection`].
//!
//! Around the estimator sit a grid-search cross-validation tuner ([`cv`]),
//! synthetic scenario generators ([`synth`]), an error-metric benchmark
//! harness ([`metrics`]) and two downstream consumers: linear discriminant
//! analysis ([`lda`]) and minimum-variance portfolio backtesting
//! ([`portfolio`]).
//!
//! All numeric kernels are generic over [`scalar::Scalar`] (`f32`/`f64`);
//! the aliases below fix `f64`, which is what the CLI and the documented
//! tolerances use.

pub mod admm;
pub mod cv;
pub mod error;
pub mod io;
pub mod lda;
pub mod matrix;
pub mod metrics;
pub mod pilot;
pub mod pipeline;
pub mod portfolio;
pub mod projection;
pub mod scalar;
pub mod synth;
pub mod threshold;

pub use error::{Error, Result};
pub use matrix::{
    condition_number, is_positive_definite, matrix_norms, Cholesky, EigenDecomposition,
    MatrixNorms, SymmetricMatrix,
};

pub use pilot::{
    huber_pilot, mom_pilot, rank_pilot, sample_covariance, DataMatrix, HuberTuning, PilotEstimate,
    PilotMethod,
};
pub use admm::{mu_search, objective, solve, AdmmState, FixedEntries, MuSearch, SolveResult, SolverConfig, Variant};
pub use cv::{cross_validate, CvOutcome, CvSpec};
pub use pipeline::{estimate_from_data, estimate_from_pilot, EstimatorKind, EstimatorSpec, PilotSpec};
pub use lda::{class_centered, lda_fit, lda_fit_predict, LdaModel, LdaPrediction};
pub use portfolio::{backtest, min_variance_weights, BacktestConfig, BacktestResult};
pub use metrics::{compute_metrics, run_benchmark, BenchReport, BenchSpec, MetricsRow};
pub use synth::{sample, sample_rep, true_covariance, Distribution2, ScenarioSpec, Structure};
pub use projection::{project_cond, project_floor, project_interval, CondProjectionResult};
pub use threshold::{rate_estimate, rate_thresholds, soft_threshold, ThresholdMatrix};

/// `f64` symmetric matrix — the default working type.
pub type SymMat = matrix::SymmetricMatrix<f64>;
/// `f32` symmetric matrix.
pub type SymMat32 = matrix::SymmetricMatrix<f32>;
/// `f64` observation matrix.
pub type DataMat = pilot::DataMatrix<f64>;
/// `f32` observation matrix.
pub type DataMat32 = pilot::DataMatrix<f32>;
