//! `rws portfolio` — rolling-window minimum-variance backtest.

use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use rws_core::cv::{lambda_grid_linear, CvSpec};
use rws_core::pipeline::{EstimatorKind, EstimatorSpec};
use rws_core::portfolio::{backtest, BacktestConfig};
use rws_core::{io, Result};

use crate::commands::estimate::VariantArg;
use crate::commands::{parse_grid, Global, PilotFlags};
use crate::report::{default_report_path, json_float, ReportBuilder};

#[derive(Debug, Args)]
pub struct PortfolioArgs {
    /// Returns CSV: first column date string, one column per asset.
    #[arg(long)]
    pub returns: PathBuf,
    /// Rolling estimation window (months).
    #[arg(long, default_value_t = 120)]
    pub window: usize,
    #[command(flatten)]
    pub pilot: PilotFlags,
    /// Covariance estimator; omit for the raw pilot (sample baseline).
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1e4)]
    pub kappa: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tau: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    /// Tune (λ, constraint) by five-fold CV on the first window.
    #[arg(long, default_value_t = false)]
    pub tune: bool,
    /// λ grid for --tune (comma separated; default linear reference grid).
    #[arg(long)]
    pub lambda_grid: Option<String>,
    /// Constraint grid for --tune (default 1e3,1e4,1e5; τ grid for rpde).
    #[arg(long)]
    pub kappa_grid: Option<String>,
    /// Monthly out-of-sample returns CSV (report JSON lands next to it).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &PortfolioArgs, global: &Global) -> Result<i32> {
    let table = io::read_returns_csv::<f64>(&args.returns)?;

    let estimator = args.variant.map(|v| {
        let kind = match v {
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
        spec
    });
    let tune_first_window = if args.tune {
        let lambda_grid = match &args.lambda_grid {
            Some(t) => parse_grid(t)?,
            None => lambda_grid_linear(),
        };
        let kappa_grid = match &args.kappa_grid {
            Some(t) => parse_grid(t)?,
            None => match args.variant {
                Some(VariantArg::Rpde) => vec![1e-4],
                _ => vec![1e3, 1e4, 1e5],
            },
        };
        Some(CvSpec { n_splits: 5, train_fraction: 0.75, lambda_grid, kappa_grid, seed: global.seed })
    } else {
        None
    };
    let config = BacktestConfig {
        window: args.window,
        pilot: args.pilot.spec(global.seed),
        estimator,
        tune_first_window,
    };

    let mut report = ReportBuilder::new(
        "portfolio",
        json!({
            "returns": args.returns.display().to_string(),
            "window": args.window,
            "variant": args.variant.map(|v| format!("{v:?}").to_lowercase()),
            "lambda": args.lambda,
            "kappa": args.kappa,
            "tau": args.tau,
            "tune": args.tune,
        }),
        global.seed,
        global.threads,
    );

    let out = backtest(&table.returns, &config)?;

    let mut csv = String::from("date,return\n");
    for (k, u) in out.step_returns.iter().enumerate() {
        let date = table
            .dates
            .get(args.window + k)
            .cloned()
            .unwrap_or_else(|| (args.window + k).to_string());
        csv.push_str(&format!("{date},{}\n", io::format_float(*u)));
    }
    std::fs::write(&args.out, csv)?;
    report.add_output(&args.out);

    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    for (step, why) in &out.skipped {
        eprintln!("warning: step {step} skipped: {why}");
    }
    let result = json!({
        "steps": out.step_returns.len(),
        "skipped": out.skipped.len(),
        "mean_pct": json_float(out.mean_pct),
        "sd_pct": json_float(out.sd_pct),
        "sharpe_pct": json_float(out.sharpe_pct),
        "tuned": out.tuned.map(|(l, k)| json!({"lambda": l, "constraint": k})),
        "warnings": out.warnings,
    });
    report.write(result, &default_report_path(&args.out))?;
    Ok(0)
}
