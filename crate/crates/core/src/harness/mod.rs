//! Experiment harness: configuration, multi-seed runs, regret aggregation,
//! CSV and SVG output, paired comparisons and the validation report.

pub mod config;
pub mod csv;
mod output;
mod run;
pub mod svg;
pub mod validate;

use std::path::Path;

pub use config::{ConfigMap, FeatureChoice, RunConfig};
pub use output::{comparison_rows, write_comparison, write_experiment};
pub use run::{execute, run_single, Experiment, RegretCurve, RoundRecord, RunHistory};

use crate::error::{Error, Result};
use crate::policy::Algorithm;

/// Runs every seed of `config` and writes the run files into its output
/// directory.
pub fn run_experiment(config: &RunConfig) -> Result<Experiment> {
    let experiment = execute(config)?;
    write_experiment(&experiment, &config.output_dir)?;
    Ok(experiment)
}

/// Checks that `configs` describe a paired comparison: same environment
/// and the same seed list.
pub fn check_paired(configs: &[RunConfig]) -> Result<()> {
    let Some(first) = configs.first() else {
        return Err(Error::Config("nothing to compare".into()));
    };
    for c in &configs[1..] {
        if c.environment != first.environment {
            return Err(Error::Config("compared configs use different environments".into()));
        }
        if c.seeds != first.seeds {
            return Err(Error::Config("compared configs use different seed lists".into()));
        }
    }
    Ok(())
}

/// Runs `configs` on their shared environment and seeds. Each one's files go
/// to `<dir>/<algorithm>/`; `compare.csv` and `compare.svg` go to `dir`.
pub fn compare(configs: &[RunConfig], dir: &Path) -> Result<Vec<Experiment>> {
    check_paired(configs)?;
    let mut experiments = Vec::with_capacity(configs.len());
    for c in configs {
        let experiment = execute(c)?;
        write_experiment(&experiment, &dir.join(c.algorithm.name()))?;
        experiments.push(experiment);
    }
    write_comparison(&experiments, dir)?;
    Ok(experiments)
}

/// One config per algorithm, otherwise identical to `base`.
pub fn algorithm_variants(base: &RunConfig, algorithms: &[Algorithm]) -> Vec<RunConfig> {
    algorithms
        .iter()
        .map(|&a| {
            let mut c = base.clone();
            c.algorithm = a;
            c
        })
        .collect()
}
