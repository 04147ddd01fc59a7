//! `rws lda` — two-class discrimination with a plug-in covariance estimate.
//!
//! Train and test CSVs carry the class label (0/1) in their last column.
//! The covariance is estimated from class-centered training residuals with
//! the same estimator recipes as `estimate`.

use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use rws_core::lda::{class_centered, lda_fit_predict};
use rws_core::pilot::DataMatrix;
use rws_core::pipeline::{estimate_from_pilot, EstimatorKind, EstimatorSpec};
use rws_core::{io, Error, Result};

use crate::commands::estimate::VariantArg;
use crate::commands::{Global, PilotFlags};
use crate::report::{default_report_path, json_float, ReportBuilder};

#[derive(Debug, Args)]
pub struct LdaArgs {
    /// Training CSV: n rows × (p features + final 0/1 label column).
    #[arg(long)]
    pub train: PathBuf,
    /// Test CSV with the same layout.
    #[arg(long)]
    pub test: PathBuf,
    #[command(flatten)]
    pub pilot: PilotFlags,
    #[arg(long, value_enum, default_value_t = VariantArg::Rws)]
    pub variant: VariantArg,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1e3)]
    pub kappa: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tau: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    /// Predicted-labels CSV output (report JSON lands next to it).
    #[arg(long)]
    pub out: PathBuf,
}

fn split_labels(data: &DataMatrix<f64>) -> Result<(DataMatrix<f64>, Vec<u8>)> {
    let p = data.p();
    if p < 2 {
        return Err(Error::InvalidInput("need at least one feature column plus the label".into()));
    }
    let mut rows = Vec::with_capacity(data.n());
    let mut labels = Vec::with_capacity(data.n());
    for i in 0..data.n() {
        let row = data.row(i);
        let label = row[p - 1];
        if label != 0.0 && label != 1.0 {
            return Err(Error::InvalidInput(format!(
                "labels must be 0 or 1, found {label} in row {}",
                i + 1
            )));
        }
        labels.push(label as u8);
        rows.push(row[..p - 1].to_vec());
    }
    Ok((DataMatrix::new(rows)?, labels))
}

pub fn run(args: &LdaArgs, global: &Global) -> Result<i32> {
    let (train_x, train_y) = split_labels(&io::read_data_csv::<f64>(&args.train)?)?;
    let (test_x, test_y) = split_labels(&io::read_data_csv::<f64>(&args.test)?)?;

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

    let mut report = ReportBuilder::new(
        "lda",
        json!({
            "train": args.train.display().to_string(),
            "test": args.test.display().to_string(),
            "variant": format!("{:?}", args.variant).to_lowercase(),
            "lambda": args.lambda,
            "kappa": args.kappa,
            "tau": args.tau,
        }),
        global.seed,
        global.threads,
    );

    let centered = class_centered(&train_x, &train_y)?;
    let pilot = args.pilot.spec(global.seed).build(&centered)?;
    let outcome = estimate_from_pilot(&pilot, centered.n(), &spec)?;
    let prediction = lda_fit_predict(&train_x, &train_y, &test_x, &test_y, &outcome.estimate)?;

    let mut labels_csv = String::from("predicted\n");
    for l in &prediction.labels {
        labels_csv.push_str(&format!("{l}\n"));
    }
    std::fs::write(&args.out, labels_csv)?;
    report.add_output(&args.out);

    let converged = outcome.solve.as_ref().is_none_or(|r| r.converged);
    let result = json!({
        "error_rate": prediction.error_rate,
        "test_size": test_x.n(),
        "train_size": train_x.n(),
        "estimator_converged": converged,
        "estimate_cond": json_float(rws_core::matrix::condition_number(&outcome.estimate)?),
    });
    report.write(result, &default_report_path(&args.out))?;
    if global.strict && !converged {
        return Ok(3);
    }
    Ok(0)
}
