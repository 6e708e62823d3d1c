use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use maj3lab_core::bounds::{bound_row, BoundInput, BoundRow};
use maj3lab_core::stats::{run_single_trial, run_trials};
use maj3lab_core::{ExperimentConfig, TrialRecord};

use crate::config::render_config;
use crate::output::{
    instance_name, trial_rows_text, write_bounds_csv, write_sweep_csv, write_trials_csv, RunManifest,
};

/// Files written by `sweep`.
#[derive(Debug, Clone)]
pub struct SweepOutputs {
    pub sweep_csv: PathBuf,
    pub trials_csv: PathBuf,
    pub bounds_csv: PathBuf,
    pub manifest: PathBuf,
}

pub fn bound_rows(n_grid: &[f64], d: f64, delta: f64) -> Result<Vec<BoundRow>> {
    if n_grid.is_empty() {
        bail!("bounds: n grid is empty");
    }
    n_grid
        .iter()
        .map(|&n| Ok(bound_row(BoundInput::new(n, d, delta)?)?))
        .collect()
}

pub fn cmd_bounds(n_grid: &[f64], d: f64, delta: f64, out: &Path) -> Result<PathBuf> {
    let rows = bound_rows(n_grid, d, delta)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join("bounds.csv");
    write_bounds_csv(&path, &rows)?;
    let grid: Vec<String> = n_grid.iter().map(|n| format!("{n:?}")).collect();
    let mut manifest = RunManifest::new(
        "bounds",
        format!("n_grid = {}\nd = {d:?}\ndelta = {delta:?}\n", grid.join(",")),
    );
    manifest.outputs.push(path.clone());
    manifest.write(out)?;
    Ok(path)
}

pub fn cmd_sweep(config: &ExperimentConfig, out: &Path, workers: usize) -> Result<SweepOutputs> {
    let result = run_trials(config, workers)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let stem = format!("{}_{}", instance_name(config.instance), config.learner.kind.name());

    let sweep_csv = out.join(format!("sweep_{stem}.csv"));
    write_sweep_csv(&sweep_csv, config, &result.stats)?;
    let trials_csv = out.join(format!("trials_{stem}.csv"));
    write_trials_csv(&trials_csv, result.records.iter().flatten())?;

    let totals: Vec<f64> = result.stats.iter().map(|s| s.n_total as f64).collect();
    let bounds_csv = out.join(format!("bounds_{stem}.csv"));
    write_bounds_csv(&bounds_csv, &bound_rows(&totals, config.d as f64, config.delta)?)?;

    let mut manifest = RunManifest::new("sweep", render_config(config));
    manifest.outputs = vec![sweep_csv.clone(), trials_csv.clone(), bounds_csv.clone()];
    let manifest = manifest.write(out)?;
    Ok(SweepOutputs {
        sweep_csv,
        trials_csv,
        bounds_csv,
        manifest,
    })
}

/// Recomputes trials from the config alone; `trial = None` replays them all.
pub fn replay(config: &ExperimentConfig, n: usize, trial: Option<usize>) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    if !config.n_grid.contains(&n) {
        bail!("n = {n} is not on the config grid {:?}", config.n_grid);
    }
    let trials: Vec<usize> = match trial {
        Some(t) if t >= config.trials => bail!("trial {t} out of range (config has {})", config.trials),
        Some(t) => vec![t],
        None => (0..config.trials).collect(),
    };
    trials
        .into_iter()
        .map(|t| Ok(run_single_trial(config, n, t)?))
        .collect()
}

/// Replayed rows in the per-trial CSV format.
pub fn cmd_replay(config: &ExperimentConfig, n: usize, trial: Option<usize>) -> Result<String> {
    trial_rows_text(&replay(config, n, trial)?)
}
