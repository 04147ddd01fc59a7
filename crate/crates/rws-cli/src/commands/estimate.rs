//! `rws estimate` — observations in, covariance estimate out.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::json;

use rws_core::admm::mu_grid;
use rws_core::matrix::condition_number;
use rws_core::pilot::PilotEstimate;
use rws_core::pipeline::{estimate_from_pilot, EstimatorKind, EstimatorSpec};
use rws_core::{io, Error, Result};

use crate::commands::{Global, PilotFlags};
use crate::report::{default_report_path, json_float, ReportBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Rws,
    Arws1,
    Arws2,
    Rpde,
    Corr,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Observation CSV (n rows × p columns, optional header).
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub pilot: PilotFlags,
    #[arg(long, value_enum, default_value_t = VariantArg::Rws)]
    pub variant: VariantArg,
    /// Sparsity level λ.
    #[arg(long)]
    pub lambda: f64,
    /// Condition-number cap (rws/arws1/arws2/corr).
    #[arg(long, default_value_t = 1e3)]
    pub kappa: f64,
    /// Eigenvalue floor (rpde).
    #[arg(long, default_value_t = 1e-4)]
    pub tau: f64,
    /// Augmented-Lagrangian penalty μ.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Search μ over the reference grid instead of using --mu.
    #[arg(long, default_value_t = false)]
    pub mu_search: bool,
    /// Stopping tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    /// Start from the raw pilot instead of its thresholded version.
    #[arg(long, default_value_t = false)]
    pub no_warm_start: bool,
    /// Always run the solver, even when the warm start is already feasible.
    #[arg(long, default_value_t = false)]
    pub no_accept_feasible: bool,
    /// Output matrix CSV (a JSON report is written next to it).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &EstimateArgs, global: &Global) -> Result<i32> {
    let data = io::read_data_csv::<f64>(&args.input)?;
    let pilot_spec = args.pilot.spec(global.seed);
    let mut pilot = pilot_spec.build(&data)?;
    if args.variant == VariantArg::Corr {
        pilot = to_correlation(&pilot)?;
    }

    let kind = match args.variant {
        VariantArg::Rws => EstimatorKind::Rws { kappa: args.kappa },
        VariantArg::Arws1 => EstimatorKind::Arws1 { kappa: args.kappa },
        VariantArg::Arws2 => EstimatorKind::Arws2 { kappa: args.kappa },
        VariantArg::Rpde => EstimatorKind::Rpde { tau: args.tau },
        VariantArg::Corr => EstimatorKind::Corr { kappa: args.kappa },
    };
    let mut spec = EstimatorSpec::new(kind, args.lambda);
    spec.mu = args.mu;
    spec.epsilon = args.epsilon;
    spec.max_iters = args.max_iters;
    spec.accept_feasible_start = !args.no_accept_feasible;
    spec.use_rate_warm_start = !args.no_warm_start;

    let mut report = ReportBuilder::new(
        "estimate",
        json!({
            "input": args.input.display().to_string(),
            "variant": format!("{:?}", args.variant).to_lowercase(),
            "lambda": args.lambda,
            "kappa": args.kappa,
            "tau": args.tau,
            "mu": args.mu,
            "mu_search": args.mu_search,
            "epsilon": args.epsilon,
            "max_iters": args.max_iters,
        }),
        global.seed,
        global.threads,
    );

    let mut mu_used = args.mu;
    let mut mu_runs = Vec::new();
    let outcome = if args.mu_search {
        // Re-run the estimate for each grid μ through the same recipe.
        let grid = mu_grid::<f64>();
        let mut best: Option<(f64, rws_core::pipeline::EstimateOutcome<f64>, usize)> = None;
        for &mu in &grid {
            let mut s = spec;
            s.mu = mu;
            let out = estimate_from_pilot(&pilot, data.n(), &s)?;
            let iters = out.solve.as_ref().map_or(0, |r| r.iterations);
            let converged = out.solve.as_ref().is_none_or(|r| r.converged);
            mu_runs.push(json!({"mu": mu, "iterations": iters, "converged": converged}));
            let better = best.as_ref().is_none_or(|(_, _, bi)| iters < *bi);
            if better {
                best = Some((mu, out, iters));
            }
        }
        let (mu, out, _) = best.expect("grid is nonempty");
        mu_used = mu;
        out
    } else {
        spec.mu = args.mu;
        estimate_from_pilot(&pilot, data.n(), &spec)?
    };

    io::write_matrix_csv(&args.out, &outcome.estimate)?;
    report.add_output(&args.out);

    let eig = outcome.estimate.sym_eig()?;
    let cond = condition_number(&outcome.estimate)?;
    let (iterations, converged, objective) = match &outcome.solve {
        Some(r) => (r.iterations, r.converged, r.objective),
        None => (0, true, f64::NAN),
    };
    let result = json!({
        "n": data.n(),
        "p": data.p(),
        "iterations": iterations,
        "converged": converged,
        "objective": json_float(objective),
        "cond": json_float(cond),
        "min_eigenvalue": json_float(eig.min_eigenvalue()),
        "nonzeros": outcome.estimate.count_nonzeros(rws_core::metrics::DEFAULT_ZERO_TOL),
        "mu_used": mu_used,
        "mu_runs": mu_runs,
    });
    let report_path = default_report_path(&args.out);
    report.write(result, &report_path)?;

    if global.strict && !converged {
        eprintln!("error: solver did not converge within {} iterations", args.max_iters);
        return Ok(3);
    }
    if !converged {
        eprintln!("warning: solver did not converge within {} iterations", args.max_iters);
    }
    Ok(0)
}

/// Rescales a covariance pilot to its correlation matrix.
fn to_correlation(pilot: &PilotEstimate<f64>) -> Result<PilotEstimate<f64>> {
    let p = pilot.sigma.dim();
    if pilot.diag_scale.iter().any(|&d| d <= 0.0) {
        return Err(Error::InvalidInput(
            "correlation model needs strictly positive pilot diagonal scales".into(),
        ));
    }
    let d: Vec<f64> = pilot.diag_scale.iter().map(|&v| v.sqrt()).collect();
    let sigma = rws_core::SymmetricMatrix::from_fn(p, |i, j| {
        if i == j {
            1.0
        } else {
            pilot.sigma.get(i, j) / (d[i] * d[j])
        }
    });
    Ok(PilotEstimate {
        sigma,
        diag_scale: vec![1.0; p],
        method: pilot.method,
        params: pilot.params.clone(),
    })
}
