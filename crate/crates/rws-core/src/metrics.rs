//! Error metrics against a known truth, and the repeated-simulation
//! benchmark runner that reproduces the comparison tables at configurable
//! scale.
//!
//! False selection loss counts, over all `p²` entries, the false positives
//! (`truth_ij = 0` but `|est_ij| > zero_tol`) plus false negatives
//! (`truth_ij ≠ 0` but `|est_ij| ≤ zero_tol`); it is reported both as a raw
//! fraction and ×100, since published tables mix the two conventions.
//!
//! The benchmark draws `reps` datasets on independent RNG streams, runs each
//! configured estimator, and aggregates mean/sd per metric plus the
//! percentage of positive definite estimates. λ (and κ for the capped
//! variants) can be fixed, cross-validated once on a dedicated calibration
//! draw, or re-tuned on every repetition.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cv::{cross_validate, lambda_grid_linear, CvSpec};
use crate::error::{Error, Result};
use crate::matrix::{condition_number, is_positive_definite, matrix_norms, SymmetricMatrix};
use crate::pilot::PilotMethod;
use crate::pipeline::{estimate_from_pilot, EstimatorKind, EstimatorSpec, PilotSpec};
use crate::scalar::{real_of, Scalar};
use crate::synth::{sample_rep, true_covariance, Distribution2, ScenarioSpec};

/// Default zero tolerance for sparsity counting.
pub const DEFAULT_ZERO_TOL: f64 = 1e-8;

/// Metrics of one estimate against the truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsRow<F> {
    pub estimator: String,
    /// `‖Σ̂ − Σ*‖₂`.
    pub spec_err: F,
    /// `‖Σ̂ − Σ*‖_F`.
    pub frob_err: F,
    /// `(FP + FN)/p²`.
    pub fsl_fraction: F,
    /// `100·(FP + FN)/p²`.
    pub fsl_percent: F,
    pub pd: bool,
    /// Condition number of the estimate (`∞` when not positive definite).
    pub cond: F,
    /// Entries with `|est_ij| > zero_tol`.
    pub nonzeros: usize,
}

/// Computes every metric column for one estimate.
pub fn compute_metrics<F: Scalar>(
    estimator: &str,
    estimate: &SymmetricMatrix<F>,
    truth: &SymmetricMatrix<F>,
    zero_tol: F,
) -> Result<MetricsRow<F>> {
    if estimate.dim() != truth.dim() {
        return Err(Error::InvalidInput("estimate and truth dimensions differ".into()));
    }
    if zero_tol < F::zero() {
        return Err(Error::InvalidInput("zero tolerance must be nonnegative".into()));
    }
    let p = truth.dim();
    let diff = estimate.sub(truth);
    let norms = matrix_norms(&diff)?;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for i in 0..p {
        for j in 0..p {
            let t_zero = truth.get(i, j) == F::zero();
            let e_zero = estimate.get(i, j).abs() <= zero_tol;
            match (t_zero, e_zero) {
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                _ => {}
            }
        }
    }
    let fsl_fraction = real_of::<F>(fp + fn_) / real_of::<F>(p * p);
    Ok(MetricsRow {
        estimator: estimator.to_string(),
        spec_err: norms.spectral,
        frob_err: norms.frobenius,
        fsl_fraction,
        fsl_percent: fsl_fraction * real_of::<F>(100),
        pd: is_positive_definite(estimate, F::zero())?,
        cond: condition_number(estimate)?,
        nonzeros: estimate.count_nonzeros(zero_tol),
    })
}

/// Estimator identifiers accepted by the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorName {
    Sam,
    Rate,
    Rpde,
    Rws,
    Arws1,
    Arws2,
}

impl EstimatorName {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorName::Sam => "sam",
            EstimatorName::Rate => "rate",
            EstimatorName::Rpde => "rpde",
            EstimatorName::Rws => "rws",
            EstimatorName::Arws1 => "arws1",
            EstimatorName::Arws2 => "arws2",
        }
    }

    fn kind(&self, kappa: f64, tau: f64) -> EstimatorKind<f64> {
        match self {
            EstimatorName::Sam => EstimatorKind::Sam,
            EstimatorName::Rate => EstimatorKind::Rate,
            EstimatorName::Rpde => EstimatorKind::Rpde { tau },
            EstimatorName::Rws => EstimatorKind::Rws { kappa },
            EstimatorName::Arws1 => EstimatorKind::Arws1 { kappa },
            EstimatorName::Arws2 => EstimatorKind::Arws2 { kappa },
        }
    }
}

/// Pilot choice; `Auto` follows the experiment protocol (sample covariance
/// for normal data, the Huber pilot otherwise).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PilotChoice {
    #[default]
    Auto,
    Sample,
    Rank,
    Huber,
    MedianOfMeans,
}

impl PilotChoice {
    pub fn resolve(&self, distribution: Distribution2) -> PilotMethod {
        match self {
            PilotChoice::Auto => {
                if distribution == Distribution2::Normal {
                    PilotMethod::Sample
                } else {
                    PilotMethod::Huber
                }
            }
            PilotChoice::Sample => PilotMethod::Sample,
            PilotChoice::Rank => PilotMethod::Rank,
            PilotChoice::Huber => PilotMethod::Huber,
            PilotChoice::MedianOfMeans => PilotMethod::MedianOfMeans,
        }
    }
}

/// λ selection rule for the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TuningRule {
    /// One λ for every estimator and repetition.
    Fixed { lambda: f64 },
    /// Grid-search CV per estimator on a dedicated calibration repetition
    /// (stream `reps`), reused across evaluation repetitions.
    CvOnce,
    /// Grid-search CV per estimator on every repetition's data.
    CvEachRep,
}

fn default_kappa() -> f64 {
    1e3
}
fn default_tau() -> f64 {
    1e-4
}
fn default_tuning() -> TuningRule {
    TuningRule::CvOnce
}
fn default_cv_splits() -> usize {
    5
}
fn default_mu() -> f64 {
    1.0
}
fn default_epsilon() -> f64 {
    1e-6
}
fn default_max_iters() -> usize {
    5000
}
fn default_zero_tol() -> f64 {
    DEFAULT_ZERO_TOL
}
fn default_estimators() -> Vec<EstimatorName> {
    vec![
        EstimatorName::Sam,
        EstimatorName::Rate,
        EstimatorName::Rpde,
        EstimatorName::Rws,
        EstimatorName::Arws1,
        EstimatorName::Arws2,
    ]
}

/// Full benchmark description (the `bench` JSON schema).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchSpec {
    pub scenario: ScenarioSpec,
    #[serde(default)]
    pub pilot: PilotChoice,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorName>,
    /// Condition cap for the capped variants (overridden by CV when
    /// `kappa_grid` is given).
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Eigenvalue floor for the floor variant.
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_tuning")]
    pub tuning: TuningRule,
    /// λ grid for the CV rules; the reference linear grid when absent.
    #[serde(default)]
    pub lambda_grid: Option<Vec<f64>>,
    /// κ grid for the CV rules; `[kappa]` when absent.
    #[serde(default)]
    pub kappa_grid: Option<Vec<f64>>,
    #[serde(default = "default_cv_splits")]
    pub cv_splits: usize,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_zero_tol")]
    pub zero_tol: f64,
}

/// Mean or standard deviation of each metric column.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct MetricsAggregate {
    pub spec_err: f64,
    pub frob_err: f64,
    pub fsl_fraction: f64,
    pub fsl_percent: f64,
    /// Condition number aggregated over positive definite repetitions only.
    pub cond: f64,
    pub nonzeros: f64,
}

/// Per-estimator benchmark summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimatorSummary {
    pub name: String,
    /// λ used (mean over repetitions under per-rep CV).
    pub lambda: f64,
    /// κ or τ used (mean over repetitions under per-rep CV).
    pub constraint: f64,
    pub reps_used: usize,
    pub pd_percent: f64,
    pub mean: MetricsAggregate,
    pub sd: MetricsAggregate,
}

/// Benchmark output: per-estimator summaries plus truth-side facts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub spec: BenchSpec,
    pub truth_min_eigenvalue: f64,
    pub truth_cond: f64,
    pub truth_zeros: usize,
    pub summaries: Vec<EstimatorSummary>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
struct Tuned {
    lambda: f64,
    constraint: f64,
}

fn cv_for(
    name: EstimatorName,
    spec: &BenchSpec,
    x: &crate::pilot::DataMatrix<f64>,
    pilot_spec: &PilotSpec<f64>,
) -> Result<Tuned> {
    let lambda_grid = spec.lambda_grid.clone().unwrap_or_else(lambda_grid_linear);
    let kappa_grid = match name {
        EstimatorName::Rws | EstimatorName::Arws1 | EstimatorName::Arws2 => {
            spec.kappa_grid.clone().unwrap_or_else(|| vec![spec.kappa])
        }
        EstimatorName::Rpde => vec![spec.tau],
        EstimatorName::Rate | EstimatorName::Sam => vec![1.0],
    };
    let cv = CvSpec {
        n_splits: spec.cv_splits,
        train_fraction: 0.75,
        lambda_grid,
        kappa_grid,
        seed: spec.scenario.seed,
    };
    let template = EstimatorSpec {
        kind: name.kind(spec.kappa, spec.tau),
        lambda: 0.0,
        mu: spec.mu,
        epsilon: spec.epsilon,
        max_iters: spec.max_iters,
        accept_feasible_start: true,
        use_rate_warm_start: true,
    };
    let out = cross_validate(x, pilot_spec, &template, &cv)?;
    Ok(Tuned { lambda: out.lambda_hat, constraint: out.kappa_hat })
}

/// Runs the repeated-simulation benchmark described by `spec`.
pub fn run_benchmark(spec: &BenchSpec) -> Result<BenchReport> {
    spec.scenario.validate()?;
    if spec.estimators.is_empty() {
        return Err(Error::InvalidInput("benchmark needs at least one estimator".into()));
    }
    let scenario = spec.scenario;
    let truth: SymmetricMatrix<f64> = true_covariance(&scenario)?;
    let truth_eig = truth.sym_eig()?;
    let truth_zeros = truth.as_slice().iter().filter(|&&v| v == 0.0).count();
    let method = spec.pilot.resolve(scenario.distribution);
    let pilot_spec = PilotSpec::with_method(method);

    // Calibration pass.
    let mut failures: Vec<String> = Vec::new();
    let calibrated: Vec<Option<Tuned>> = match spec.tuning {
        TuningRule::Fixed { lambda } => spec
            .estimators
            .iter()
            .map(|name| {
                let constraint = match name {
                    EstimatorName::Rpde => spec.tau,
                    _ => spec.kappa,
                };
                Some(Tuned { lambda, constraint })
            })
            .collect(),
        TuningRule::CvOnce => {
            let calib = sample_rep(&scenario, &truth, scenario.reps)?;
            spec.estimators
                .iter()
                .map(|&name| {
                    if name == EstimatorName::Sam {
                        return Some(Tuned { lambda: 0.0, constraint: 0.0 });
                    }
                    match cv_for(name, spec, &calib, &pilot_spec) {
                        Ok(t) => Some(t),
                        Err(e) => {
                            failures.push(format!("calibration cv for {}: {e}", name.as_str()));
                            None
                        }
                    }
                })
                .collect()
        }
        TuningRule::CvEachRep => vec![None; spec.estimators.len()],
    };

    // Evaluation repetitions on independent streams.
    type RepOutcome = Vec<std::result::Result<(MetricsRow<f64>, f64, f64), String>>;
    let reps: Vec<RepOutcome> = (0..scenario.reps)
        .into_par_iter()
        .map(|rep| {
            let run_one = |name: EstimatorName,
                           slot: &Option<Tuned>|
             -> std::result::Result<(MetricsRow<f64>, f64, f64), String> {
                let x = sample_rep(&scenario, &truth, rep).map_err(|e| e.to_string())?;
                let pilot = pilot_spec.build(&x).map_err(|e| e.to_string())?;
                let tuned = match (spec.tuning, slot) {
                    (TuningRule::CvEachRep, _) => {
                        if name == EstimatorName::Sam {
                            Tuned { lambda: 0.0, constraint: 0.0 }
                        } else {
                            cv_for(name, spec, &x, &pilot_spec).map_err(|e| e.to_string())?
                        }
                    }
                    (_, Some(t)) => Tuned { lambda: t.lambda, constraint: t.constraint },
                    (_, None) => return Err("calibration failed".into()),
                };
                let kind = match name {
                    EstimatorName::Rpde => name.kind(spec.kappa, tuned.constraint),
                    _ => name.kind(tuned.constraint, spec.tau),
                };
                let est_spec = EstimatorSpec {
                    kind,
                    lambda: tuned.lambda,
                    mu: spec.mu,
                    epsilon: spec.epsilon,
                    max_iters: spec.max_iters,
                    accept_feasible_start: true,
                    use_rate_warm_start: true,
                };
                let outcome =
                    estimate_from_pilot(&pilot, x.n(), &est_spec).map_err(|e| e.to_string())?;
                let row = compute_metrics(name.as_str(), &outcome.estimate, &truth, spec.zero_tol)
                    .map_err(|e| e.to_string())?;
                Ok((row, tuned.lambda, tuned.constraint))
            };
            spec.estimators
                .iter()
                .zip(&calibrated)
                .map(|(&name, slot)| run_one(name, slot))
                .collect()
        })
        .collect();

    // Aggregation in fixed order.
    let mut summaries = Vec::with_capacity(spec.estimators.len());
    for (e_idx, &name) in spec.estimators.iter().enumerate() {
        let mut rows: Vec<&MetricsRow<f64>> = Vec::new();
        let mut lambdas = Vec::new();
        let mut constraints = Vec::new();
        for (rep, outcomes) in reps.iter().enumerate() {
            match &outcomes[e_idx] {
                Ok((row, lambda, constraint)) => {
                    rows.push(row);
                    lambdas.push(*lambda);
                    constraints.push(*constraint);
                }
                Err(msg) => failures.push(format!("rep {rep}, {}: {msg}", name.as_str())),
            }
        }
        let m = rows.len();
        if m == 0 {
            summaries.push(EstimatorSummary {
                name: name.as_str().to_string(),
                lambda: f64::NAN,
                constraint: f64::NAN,
                reps_used: 0,
                pd_percent: 0.0,
                mean: MetricsAggregate::default(),
                sd: MetricsAggregate::default(),
            });
            continue;
        }
        let mean_of = |f: &dyn Fn(&MetricsRow<f64>) -> f64| -> f64 {
            rows.iter().map(|r| f(r)).sum::<f64>() / m as f64
        };
        let sd_of = |f: &dyn Fn(&MetricsRow<f64>) -> f64, mean: f64| -> f64 {
            if m < 2 {
                0.0
            } else {
                (rows.iter().map(|r| (f(r) - mean).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt()
            }
        };
        let pd_rows: Vec<&&MetricsRow<f64>> = rows.iter().filter(|r| r.pd).collect();
        let cond_mean = if pd_rows.is_empty() {
            f64::NAN
        } else {
            pd_rows.iter().map(|r| r.cond).sum::<f64>() / pd_rows.len() as f64
        };
        let cond_sd = if pd_rows.len() < 2 {
            0.0
        } else {
            (pd_rows.iter().map(|r| (r.cond - cond_mean).powi(2)).sum::<f64>()
                / (pd_rows.len() - 1) as f64)
                .sqrt()
        };
        let specs: MetricsAggregate = MetricsAggregate {
            spec_err: mean_of(&|r| r.spec_err),
            frob_err: mean_of(&|r| r.frob_err),
            fsl_fraction: mean_of(&|r| r.fsl_fraction),
            fsl_percent: mean_of(&|r| r.fsl_percent),
            cond: cond_mean,
            nonzeros: mean_of(&|r| r.nonzeros as f64),
        };
        let sds = MetricsAggregate {
            spec_err: sd_of(&|r| r.spec_err, specs.spec_err),
            frob_err: sd_of(&|r| r.frob_err, specs.frob_err),
            fsl_fraction: sd_of(&|r| r.fsl_fraction, specs.fsl_fraction),
            fsl_percent: sd_of(&|r| r.fsl_percent, specs.fsl_percent),
            cond: cond_sd,
            nonzeros: sd_of(&|r| r.nonzeros as f64, specs.nonzeros),
        };
        summaries.push(EstimatorSummary {
            name: name.as_str().to_string(),
            lambda: lambdas.iter().sum::<f64>() / m as f64,
            constraint: constraints.iter().sum::<f64>() / m as f64,
            reps_used: m,
            pd_percent: 100.0 * pd_rows.len() as f64 / m as f64,
            mean: specs,
            sd: sds,
        });
    }

    Ok(BenchReport {
        spec: spec.clone(),
        truth_min_eigenvalue: truth_eig.min_eigenvalue(),
        truth_cond: if truth_eig.min_eigenvalue() > 0.0 {
            truth_eig.max_eigenvalue() / truth_eig.min_eigenvalue()
        } else {
            f64::INFINITY
        },
        truth_zeros,
        summaries,
        failures,
    })
}

/// Raw-number CSV: one metric per row, one estimator per column.
pub fn render_csv(report: &BenchReport) -> String {
    let mut out = String::new();
    out.push_str("metric");
    for s in &report.summaries {
        out.push(',');
        out.push_str(&s.name);
    }
    out.push('\n');
    let rows: Vec<(&str, Box<dyn Fn(&EstimatorSummary) -> f64>)> = vec![
        ("spec_mean", Box::new(|s| s.mean.spec_err)),
        ("spec_sd", Box::new(|s| s.sd.spec_err)),
        ("frob_mean", Box::new(|s| s.mean.frob_err)),
        ("frob_sd", Box::new(|s| s.sd.frob_err)),
        ("fsl_percent_mean", Box::new(|s| s.mean.fsl_percent)),
        ("fsl_percent_sd", Box::new(|s| s.sd.fsl_percent)),
        ("fsl_fraction_mean", Box::new(|s| s.mean.fsl_fraction)),
        ("fsl_fraction_sd", Box::new(|s| s.sd.fsl_fraction)),
        ("pd_percent", Box::new(|s| s.pd_percent)),
        ("cond_mean", Box::new(|s| s.mean.cond)),
        ("nonzeros_mean", Box::new(|s| s.mean.nonzeros)),
        ("lambda", Box::new(|s| s.lambda)),
        ("constraint", Box::new(|s| s.constraint)),
    ];
    for (name, f) in rows {
        out.push_str(name);
        for s in &report.summaries {
            out.push(',');
            out.push_str(&crate::io::format_float(f(s)));
        }
        out.push('\n');
    }
    out
}

/// Markdown table in `mean(sd)` form, mirroring the published layout.
pub fn render_markdown(report: &BenchReport) -> String {
    let mut out = String::new();
    out.push_str("| metric |");
    for s in &report.summaries {
        out.push_str(&format!(" {} |", s.name));
    }
    out.push_str("\n|---|");
    for _ in &report.summaries {
        out.push_str("---|");
    }
    out.push('\n');
    let fmt = |m: f64, s: f64| format!("{m:.2}({s:.2})");
    for (label, get) in [
        ("Spec", Box::new(|s: &EstimatorSummary| (s.mean.spec_err, s.sd.spec_err))
            as Box<dyn Fn(&EstimatorSummary) -> (f64, f64)>),
        ("Frob", Box::new(|s: &EstimatorSummary| (s.mean.frob_err, s.sd.frob_err))),
        ("FSL", Box::new(|s: &EstimatorSummary| (s.mean.fsl_percent, s.sd.fsl_percent))),
    ] {
        out.push_str(&format!("| {label} |"));
        for s in &report.summaries {
            let (m, sd) = get(s);
            out.push_str(&format!(" {} |", fmt(m, sd)));
        }
        out.push('\n');
    }
    out.push_str("| PD |");
    for s in &report.summaries {
        out.push_str(&format!(" {:.0} |", s.pd_percent));
    }
    out.push('\n');
    out
}
