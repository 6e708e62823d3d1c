use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use maj3lab_cli::commands::{cmd_bounds, cmd_replay, cmd_sweep};
use maj3lab_cli::config::load_config;
use maj3lab_cli::output::RunManifest;
use maj3lab_cli::resolve_workers;
use maj3lab_cli::verify::{run_verify, Scale, VerifyOptions, VERIFY_SEED};

#[derive(Parser)]
#[command(name = "maj3lab", version, about = "Majority-of-three ERM simulations")]
struct Cli {
    /// Worker threads; affects speed only, never results.
    #[arg(long, global = true, env = "MAJ3LAB_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config's trials and write sweep, per-trial and bound CSVs.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides `master_seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write the bound shapes over an n grid.
    Bounds {
        /// Comma-separated sample sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        n_grid: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute trials of a sweep from its config and print them as CSV rows.
    Replay {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: usize,
        /// A single trial index; all trials when omitted.
        #[arg(long)]
        trial: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        scale: ScaleArg,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for the suite's CSVs and report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<bool> {
    let workers = resolve_workers(cli.workers);
    match cli.command {
        Command::Sweep { config, out, seed } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            let outputs = cmd_sweep(&cfg, &out, workers)?;
            println!("{}", outputs.sweep_csv.display());
            println!("{}", outputs.trials_csv.display());
            println!("{}", outputs.bounds_csv.display());
            println!("{}", outputs.manifest.display());
        }
        Command::Bounds { n_grid, d, delta, out } => {
            println!("{}", cmd_bounds(&n_grid, d, delta, &out)?.display());
        }
        Command::Replay { config, n, trial, seed } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            print!("{}", cmd_replay(&cfg, n, trial)?);
        }
        Command::Verify { scale, seed, out } => {
            let scale = match scale {
                ScaleArg::Quick => Scale::Quick,
                ScaleArg::Full => Scale::Full,
            };
            let mut opts = VerifyOptions::new(scale, workers);
            opts.master_seed = seed.unwrap_or(VERIFY_SEED);
            opts.out_dir = out.clone();
            let report = run_verify(&opts);
            let text = report.render();
            print!("{text}");
            if let Some(dir) = out {
                std::fs::write(dir.join("report.txt"), &text)?;
                let mut manifest = RunManifest::new(
                    "verify",
                    format!("scale = {scale:?}\nmaster_seed = {}\n", opts.master_seed),
                );
                let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.file_name().is_some_and(|n| n != "manifest.txt"))
                    .collect();
                files.sort();
                manifest.outputs = files;
                manifest.write(&dir)?;
            }
            return Ok(report.all_passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
