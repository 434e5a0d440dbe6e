//! Experiment runner for horolab-core: configured runs, CSV and JSON reports.

pub mod bc;
pub mod config;
pub mod counting;
pub mod dioph;
pub mod geom;
pub mod report;
pub mod spiral;

use config::{Experiment, RunConfig};
use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabError {
    /// 2 for bad input, 3 for an exhausted budget, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Invalid(_) => 2,
            LabError::Budget(_) => 3,
            LabError::Io(_) => 1,
        }
    }
}

/// Runs a validated configuration.
pub fn run(cfg: &RunConfig) -> Result<Report, LabError> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::SpiralLoglaw => spiral::spiral_loglaw(cfg),
        Experiment::SpiralKhintchine => spiral::spiral_khintchine(cfg),
        Experiment::Dioph => dioph::dioph(cfg),
        Experiment::ApproxPoint => spiral::approx_point(cfg),
        Experiment::CosetCount => counting::coset_count(cfg),
        Experiment::MeasureBand => counting::measure_band(cfg),
        Experiment::BcRun => bc::bc_run(cfg),
        Experiment::GeomValidate => geom::geom_validate(cfg),
    }
}
