//! `rws bench` — repeated-simulation estimator comparison from a JSON spec.

use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use rws_core::metrics::{render_csv, render_markdown, run_benchmark, BenchSpec};
use rws_core::Result;

use crate::commands::Global;
use crate::report::{json_float, ReportBuilder};

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Benchmark spec JSON (see the README for the schema).
    #[arg(long)]
    pub spec: PathBuf,
    /// Results CSV (raw numbers, one metric per row).
    #[arg(long)]
    pub out_csv: PathBuf,
    /// Rendered mean(sd) markdown table.
    #[arg(long)]
    pub out_md: Option<PathBuf>,
    /// Override the scenario seed from the global --seed flag.
    #[arg(long, default_value_t = false)]
    pub seed_from_cli: bool,
}

pub fn run(args: &BenchArgs, global: &Global) -> Result<i32> {
    let text = std::fs::read_to_string(&args.spec)?;
    let mut spec: BenchSpec = serde_json::from_str(&text)
        .map_err(|e| rws_core::Error::InvalidInput(format!("bench spec json: {e}")))?;
    if args.seed_from_cli {
        spec.scenario.seed = global.seed;
    }

    let mut report = ReportBuilder::new(
        "bench",
        serde_json::to_value(&spec).expect("spec serializes"),
        global.seed,
        global.threads,
    );

    let bench = run_benchmark(&spec)?;
    std::fs::write(&args.out_csv, render_csv(&bench))?;
    report.add_output(&args.out_csv);
    if let Some(md) = &args.out_md {
        std::fs::write(md, render_markdown(&bench))?;
        report.add_output(md);
    }
    for failure in &bench.failures {
        eprintln!("warning: {failure}");
    }

    let result = json!({
        "truth_min_eigenvalue": json_float(bench.truth_min_eigenvalue),
        "truth_cond": json_float(bench.truth_cond),
        "truth_zeros": bench.truth_zeros,
        "summaries": bench.summaries,
        "failures": bench.failures,
    });
    report.write(result, &crate::report::default_report_path(&args.out_csv))?;
    if global.strict && !bench.failures.is_empty() {
        return Ok(3);
    }
    Ok(0)
}
