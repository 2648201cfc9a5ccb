use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;

use super::csv::{compare_csv, curve_csv, run_csv};
use super::run::{Experiment, RunHistory};
use super::svg::{self, Series};

fn models_csv(run: &RunHistory) -> String {
    let p = run.models.first().map_or(0, |(theta, _)| theta.len());
    let mut s = String::from("epoch,gamma");
    for j in 0..p {
        let _ = write!(s, ",coef_{j}");
    }
    s.push('\n');
    for (m, (theta, gamma)) in run.models.iter().enumerate() {
        let _ = write!(s, "{},{}", m + 1, gamma);
        for v in theta {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

/// Writes `run_<seed>.csv`, `models_<seed>.csv`, `curve.csv`, `curve.svg`
/// and the resolved `config.txt` into `dir`.
pub fn write_experiment(experiment: &Experiment, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for run in &experiment.runs {
        fs::write(dir.join(format!("run_{}.csv", run.seed)), run_csv(run))?;
        fs::write(dir.join(format!("models_{}.csv", run.seed)), models_csv(run))?;
    }
    let curve = &experiment.curve;
    fs::write(dir.join("curve.csv"), curve_csv(curve))?;
    let title = format!(
        "{} on {} ({} seeds)",
        experiment.config.algorithm,
        experiment.config.environment.scenario,
        experiment.runs.len()
    );
    let label = experiment.config.algorithm.name();
    let chart = svg::render(
        &title,
        &[Series {
            label,
            mean: &curve.mean,
            std: Some(&curve.std),
        }],
    );
    fs::write(dir.join("curve.svg"), chart)?;
    fs::write(dir.join("config.txt"), experiment.config.to_text())?;
    Ok(())
}

/// `(name, final mean, final std, ratio to the first experiment)` rows.
pub fn comparison_rows(experiments: &[Experiment]) -> Vec<(String, f64, f64, f64)> {
    let base = experiments.first().map_or(0.0, |e| e.curve.final_mean());
    experiments
        .iter()
        .map(|e| {
            let mean = e.curve.final_mean();
            let ratio = if mean == base { 1.0 } else { mean / base };
            (e.config.algorithm.name().to_string(), mean, e.curve.final_std(), ratio)
        })
        .collect()
}

/// Writes `compare.csv` and the overlaid `compare.svg` into `dir`.
pub fn write_comparison(experiments: &[Experiment], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("compare.csv"), compare_csv(&comparison_rows(experiments)))?;
    let series: Vec<Series<'_>> = experiments
        .iter()
        .map(|e| Series {
            label: e.config.algorithm.name(),
            mean: &e.curve.mean,
            std: Some(&e.curve.std),
        })
        .collect();
    let title = experiments.first().map_or_else(String::new, |e| {
        format!("{} ({} seeds)", e.config.environment.scenario, e.runs.len())
    });
    fs::write(dir.join("compare.svg"), svg::render(&title, &series))?;
    Ok(())
}
