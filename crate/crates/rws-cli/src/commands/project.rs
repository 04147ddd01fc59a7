//! `rws project` — spectral projections of a symmetric matrix.

use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use rws_core::projection::{project_cond, project_floor, project_interval};
use rws_core::{io, Error, Result};

use crate::commands::Global;
use crate::report::{default_report_path, json_float, ReportBuilder};

#[derive(Debug, Args)]
pub struct ProjectArgs {
    /// Square matrix CSV (symmetrized on read).
    #[arg(long)]
    pub input: PathBuf,
    /// Project onto {Y ⪰ 0, Cond(Y) ≤ κ}.
    #[arg(long, conflicts_with_all = ["tau", "tau1", "tau2"])]
    pub kappa: Option<f64>,
    /// Project onto {Y ⪰ τI}.
    #[arg(long, conflicts_with_all = ["tau1", "tau2"])]
    pub tau: Option<f64>,
    /// Lower eigenvalue bound of the interval projection.
    #[arg(long, requires = "tau2")]
    pub tau1: Option<f64>,
    /// Upper eigenvalue bound of the interval projection.
    #[arg(long, requires = "tau1")]
    pub tau2: Option<f64>,
    /// Output matrix CSV (a JSON sidecar is written next to it).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &ProjectArgs, global: &Global) -> Result<i32> {
    let input = io::read_matrix_csv::<f64>(&args.input)?;
    let mut report = ReportBuilder::new(
        "project",
        json!({
            "input": args.input.display().to_string(),
            "kappa": args.kappa,
            "tau": args.tau,
            "tau1": args.tau1,
            "tau2": args.tau2,
        }),
        global.seed,
        global.threads,
    );

    let result = match (args.kappa, args.tau, args.tau1, args.tau2) {
        (Some(kappa), None, None, None) => {
            let r = project_cond(&input, kappa)?;
            io::write_matrix_csv(&args.out, &r.projected)?;
            json!({
                "projection": "cond",
                "kappa": kappa,
                "nu_star": json_float(r.nu_star),
                "alpha_star": r.alpha_star,
                "beta_star": r.beta_star,
                "clipped_low": r.clipped_low,
                "clipped_high": r.clipped_high,
                "unchanged": r.unchanged,
            })
        }
        (None, Some(tau), None, None) => {
            let projected = project_floor(&input, tau)?;
            let unchanged = projected.as_slice() == input.as_slice();
            io::write_matrix_csv(&args.out, &projected)?;
            json!({"projection": "floor", "tau": tau, "unchanged": unchanged})
        }
        (None, None, Some(tau1), Some(tau2)) => {
            let projected = project_interval(&input, tau1, tau2)?;
            let unchanged = projected.as_slice() == input.as_slice();
            io::write_matrix_csv(&args.out, &projected)?;
            json!({"projection": "interval", "tau1": tau1, "tau2": tau2, "unchanged": unchanged})
        }
        _ => {
            return Err(Error::InvalidInput(
                "choose exactly one of --kappa, --tau, or --tau1 with --tau2".into(),
            ))
        }
    };
    report.add_output(&args.out);
    report.write(result, &default_report_path(&args.out))?;
    Ok(0)
}
