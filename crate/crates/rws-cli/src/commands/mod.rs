//! Subcommand implementations. Each `run` returns the process exit code on
//! success; errors map to exit codes in `main`.

pub mod bench;
pub mod estimate;
pub mod lda;
pub mod portfolio;
pub mod project;
pub mod simulate;
pub mod tune;

use clap::ValueEnum;
use rws_core::pilot::{HuberTuning, PilotMethod};
use rws_core::pipeline::PilotSpec;
use rws_core::{Error, Result};

/// Global flags shared by every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct Global {
    pub seed: u64,
    pub threads: usize,
    pub strict: bool,
}

/// Pilot estimator choice on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PilotArg {
    Sample,
    Rank,
    Huber,
    Mom,
}

impl PilotArg {
    pub fn method(self) -> PilotMethod {
        match self {
            PilotArg::Sample => PilotMethod::Sample,
            PilotArg::Rank => PilotMethod::Rank,
            PilotArg::Huber => PilotMethod::Huber,
            PilotArg::Mom => PilotMethod::MedianOfMeans,
        }
    }
}

/// Shared pilot flags.
#[derive(Debug, Clone, clap::Args)]
pub struct PilotFlags {
    /// Pilot estimator.
    #[arg(long, value_enum, default_value_t = PilotArg::Huber)]
    pub pilot: PilotArg,
    /// Adaptive Huber constant c in H = c·sd·sqrt(n/ln p).
    #[arg(long, default_value_t = 1.0)]
    pub huber_c: f64,
    /// Fixed Huber parameter H shared by every entry (overrides --huber-c).
    #[arg(long)]
    pub huber_h: Option<f64>,
    /// Group count for the median-of-means pilot.
    #[arg(long, default_value_t = 10)]
    pub mom_groups: usize,
    /// Shuffle observations (seeded from --seed) before median-of-means
    /// grouping.
    #[arg(long, default_value_t = false)]
    pub mom_shuffle: bool,
    /// Fisher consistency constant for the rank pilot's MAD scales.
    #[arg(long, default_value_t = rws_core::pilot::DEFAULT_FISHER_CONSTANT)]
    pub fisher_constant: f64,
    /// Replace zero MAD scales with a tiny floor instead of failing.
    #[arg(long, default_value_t = false)]
    pub allow_degenerate_scale: bool,
}

impl PilotFlags {
    pub fn spec(&self, seed: u64) -> PilotSpec<f64> {
        PilotSpec {
            method: self.pilot.method(),
            fisher_constant: self.fisher_constant,
            huber: match self.huber_h {
                Some(h) => HuberTuning::Fixed { h },
                None => HuberTuning::Adaptive { c: self.huber_c },
            },
            mom_groups: self.mom_groups,
            mom_shuffle_seed: self.mom_shuffle.then_some(seed),
            allow_degenerate_scale: self.allow_degenerate_scale,
        }
    }
}

/// Parses a comma-separated list of reals.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("not a number in grid: {t:?}")))
        })
        .collect()
}
