//! CSV writers and the run manifest.
//!
//! Every CSV starts with a `# schema: <name>/<version>` comment line.
//! Floats are written with 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use maj3lab_core::bounds::BoundRow;
use maj3lab_core::stats::CouponEstimates;
use maj3lab_core::{DomainKind, ErrorStats, ExperimentConfig, TrialRecord};

pub const SCHEMA_VERSION: u32 = 1;

pub const SWEEP_COLUMNS: &[&str] = &[
    "n", "d", "delta", "learner", "erm", "C", "trials", "mean_err", "q_level", "q_value", "ratio_dn",
    "ratio_dlog", "ratio_dloglog", "master_seed",
];

pub const TRIAL_COLUMNS: &[&str] = &[
    "n", "trial", "seed", "error", "l1_sizes", "l2_sizes", "voter_errors", "pairwise_joint",
];

pub const BOUNDS_COLUMNS: &[&str] = &["n", "d", "delta", "erm", "optimal", "simon", "thm2", "uniform_convergence"];

pub const COUPON_COLUMNS: &[&str] = &[
    "m", "d", "C", "trials", "seed", "e1", "e2", "e1_and_e2", "y_ge_m", "p_e1", "p_e2", "p_e2_given_e1",
    "p_y_ge_m",
];

/// 17 significant digits, round-trip exact for `f64`.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn joined<T>(xs: &[T], f: impl Fn(&T) -> String) -> String {
    xs.iter().map(f).collect::<Vec<_>>().join(";")
}

pub fn instance_name(kind: DomainKind) -> &'static str {
    match kind {
        DomainKind::Interval => "interval",
        DomainKind::Finite => "finite",
    }
}

fn open_csv(path: &Path, schema: &str, columns: &[&str]) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "# schema: {schema}/{SCHEMA_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    Ok(w)
}

pub fn sweep_rows(config: &ExperimentConfig, stats: &[ErrorStats]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for s in stats {
        for &(level, value) in &s.quantiles {
            rows.push(vec![
                s.n.to_string(),
                config.d.to_string(),
                float(config.delta),
                config.learner.kind.name(),
                config.learner.erm.to_string(),
                float(config.c),
                s.trials.to_string(),
                float(s.mean),
                float(level),
                float(value),
                float(s.ratio_dn),
                float(s.ratio_dlog),
                float(s.ratio_dloglog),
                config.master_seed.to_string(),
            ]);
        }
    }
    rows
}

pub fn write_sweep_csv(path: &Path, config: &ExperimentConfig, stats: &[ErrorStats]) -> Result<()> {
    let mut w = open_csv(path, "maj3lab-sweep", SWEEP_COLUMNS)?;
    for row in sweep_rows(config, stats) {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn trial_row(r: &TrialRecord) -> Vec<String> {
    vec![
        r.n.to_string(),
        r.trial_index.to_string(),
        r.seed.to_string(),
        float(r.error),
        joined(&r.aux.l1_sizes, ToString::to_string),
        joined(&r.aux.l2_sizes, ToString::to_string),
        joined(&r.aux.voter_errors, |x| float(*x)),
        joined(&r.aux.pairwise_joint, |x| float(*x)),
    ]
}

pub fn write_trials_csv<'a>(path: &Path, records: impl IntoIterator<Item = &'a TrialRecord>) -> Result<()> {
    let mut w = open_csv(path, "maj3lab-trials", TRIAL_COLUMNS)?;
    for r in records {
        w.write_record(trial_row(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Trial rows as CSV text without the schema line or header.
pub fn trial_rows_text<'a>(records: impl IntoIterator<Item = &'a TrialRecord>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.write_record(trial_row(r))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn write_bounds_csv(path: &Path, rows: &[BoundRow]) -> Result<()> {
    let mut w = open_csv(path, "maj3lab-bounds", BOUNDS_COLUMNS)?;
    for r in rows {
        w.write_record([
            float(r.input.n),
            float(r.input.d),
            float(r.input.delta),
            float(r.erm),
            float(r.optimal),
            float(r.simon),
            float(r.thm2),
            float(r.uniform_convergence),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coupon_csv(path: &Path, rows: &[(usize, usize, f64, u64, CouponEstimates)]) -> Result<()> {
    let mut w = open_csv(path, "maj3lab-coupon", COUPON_COLUMNS)?;
    for (m, d, c, seed, e) in rows {
        w.write_record([
            m.to_string(),
            d.to_string(),
            float(*c),
            e.trials.to_string(),
            seed.to_string(),
            e.e1.to_string(),
            e.e2.to_string(),
            e.e1_and_e2.to_string(),
            e.y_ge_m.to_string(),
            float(e.p_hat_e1()),
            float(e.p_hat_e2()),
            float(e.p_hat_e2_given_e1()),
            float(e.p_hat_y_ge_m()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Plain-text record of one command invocation and the files it wrote.
#[derive(Debug, Clone, Default)]
pub struct RunManifest {
    pub command: String,
    pub config_echo: String,
    pub outputs: Vec<PathBuf>,
    pub started: u64,
    pub finished: u64,
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl RunManifest {
    pub fn new(command: &str, config_echo: String) -> Self {
        Self {
            command: command.to_string(),
            config_echo,
            outputs: Vec::new(),
            started: unix_now(),
            finished: 0,
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "maj3lab {}\ncommand: {}\nschema_version: {SCHEMA_VERSION}\nstarted_unix: {}\nfinished_unix: {}\n",
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.started,
            self.finished
        );
        s.push_str("outputs:\n");
        for p in &self.outputs {
            s.push_str(&format!("  {}\n", p.display()));
        }
        s.push_str("config:\n");
        for line in self.config_echo.lines() {
            s.push_str(&format!("  {line}\n"));
        }
        s
    }

    /// Stamps the finish time and writes `manifest.txt` into `dir`.
    pub fn write(mut self, dir: &Path) -> Result<PathBuf> {
        self.finished = unix_now();
        let path = dir.join("manifest.txt");
        std::fs::write(&path, self.render()).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 0.0, 4.6041e-4, f64::MIN_POSITIVE] {
            let s = float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(float(0.5), "5.0000000000000000e-1");
        assert_eq!(float(f64::NAN), "NaN");
    }

    #[test]
    fn csv_starts_with_schema_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.csv");
        write_bounds_csv(&path, &[]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# schema: maj3lab-bounds/1"));
        assert_eq!(lines.next(), Some("n,d,delta,erm,optimal,simon,thm2,uniform_convergence"));
    }

    #[test]
    fn manifest_lists_outputs() {
        let mut m = RunManifest::new("sweep", "d = 1\n".into());
        m.outputs.push(PathBuf::from("a.csv"));
        let text = m.render();
        assert!(text.contains("command: sweep"));
        assert!(text.contains("  a.csv\n"));
        assert!(text.contains("  d = 1\n"));
    }
}
