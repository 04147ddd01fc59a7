//! `rws tune` — grid-search cross-validation for (λ, κ).

use std::io::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use rws_core::cv::{cross_validate, lambda_grid_linear, lambda_grid_log, CvSpec};
use rws_core::pipeline::{EstimatorKind, EstimatorSpec};
use rws_core::{io, Result};

use crate::commands::estimate::VariantArg;
use crate::commands::{parse_grid, Global, PilotFlags};
use crate::report::{default_report_path, json_float, ReportBuilder};

#[derive(Debug, Args)]
pub struct TuneArgs {
    /// Observation CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub pilot: PilotFlags,
    #[arg(long, value_enum, default_value_t = VariantArg::Rws)]
    pub variant: VariantArg,
    /// Comma-separated λ grid (default: the linear reference grid
    /// 0.01,0.06,…,0.96).
    #[arg(long)]
    pub lambda_grid: Option<String>,
    /// Use a log-spaced λ grid with this many points instead.
    #[arg(long, conflicts_with = "lambda_grid")]
    pub lambda_grid_log: Option<usize>,
    /// Comma-separated constraint grid (κ, or τ for rpde). Default
    /// 1e3,1e4,1e5.
    #[arg(long)]
    pub kappa_grid: Option<String>,
    /// Number of random splits.
    #[arg(long, default_value_t = 5)]
    pub splits: usize,
    #[arg(long, default_value_t = 0.75)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    /// Score table CSV output (the JSON report lands next to it).
    #[arg(long)]
    pub out_table: PathBuf,
}

pub fn run(args: &TuneArgs, global: &Global) -> Result<i32> {
    let data = io::read_data_csv::<f64>(&args.input)?;
    let pilot_spec = args.pilot.spec(global.seed);

    let lambda_grid = match (&args.lambda_grid, args.lambda_grid_log) {
        (Some(text), _) => parse_grid(text)?,
        (None, Some(count)) => lambda_grid_log(count),
        (None, None) => lambda_grid_linear(),
    };
    let kappa_grid = match &args.kappa_grid {
        Some(text) => parse_grid(text)?,
        None => match args.variant {
            VariantArg::Rpde => vec![1e-4],
            _ => vec![1e3, 1e4, 1e5],
        },
    };
    let cv = CvSpec {
        n_splits: args.splits,
        train_fraction: args.train_fraction,
        lambda_grid,
        kappa_grid,
        seed: global.seed,
    };
    let kind = match args.variant {
        VariantArg::Rws => EstimatorKind::Rws { kappa: 1.0 },
        VariantArg::Arws1 => EstimatorKind::Arws1 { kappa: 1.0 },
        VariantArg::Arws2 => EstimatorKind::Arws2 { kappa: 1.0 },
        VariantArg::Rpde => EstimatorKind::Rpde { tau: 1.0 },
        VariantArg::Corr => EstimatorKind::Corr { kappa: 1.0 },
    };
    let mut template = EstimatorSpec::new(kind, 0.0);
    template.mu = args.mu;
    template.epsilon = args.epsilon;
    template.max_iters = args.max_iters;

    let mut report = ReportBuilder::new(
        "tune",
        json!({
            "input": args.input.display().to_string(),
            "variant": format!("{:?}", args.variant).to_lowercase(),
            "splits": args.splits,
            "train_fraction": args.train_fraction,
            "lambda_grid": cv.lambda_grid,
            "kappa_grid": cv.kappa_grid,
        }),
        global.seed,
        global.threads,
    );

    let out = cross_validate(&data, &pilot_spec, &template, &cv)?;

    let mut table = String::from("lambda,kappa,score\n");
    for row in &out.table {
        table.push_str(&format!(
            "{},{},{}\n",
            io::format_float(row.lambda),
            io::format_float(row.kappa),
            io::format_float(row.score)
        ));
    }
    let mut f = std::fs::File::create(&args.out_table)?;
    f.write_all(table.as_bytes())?;
    report.add_output(&args.out_table);

    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    let result = json!({
        "lambda_hat": out.lambda_hat,
        "kappa_hat": out.kappa_hat,
        "splits_used": out.splits_used,
        "grid_points": out.table.len(),
        "best_score": json_float(
            out.table
                .iter()
                .find(|r| r.lambda == out.lambda_hat && r.kappa == out.kappa_hat)
                .map_or(f64::NAN, |r| r.score)
        ),
        "warnings": out.warnings,
    });
    report.write(result, &default_report_path(&args.out_table))?;
    Ok(0)
}
