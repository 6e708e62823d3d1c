//! The acceptance suite behind `maj3lab verify`.
//!
//! Every criterion runs even when an earlier one fails. A criterion fails if
//! its property check fails, if it returns an error, or if it overruns its
//! wall-clock budget.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{ensure, Result};
use maj3lab_core::erms::build_partition;
use maj3lab_core::evaluation::{exact_error, monte_carlo_error};
use maj3lab_core::geometry::{majority3, IntervalSet};
use maj3lab_core::instances::{IntervalHardInstance, DEFAULT_C};
use maj3lab_core::stats::{
    binomial, coupon_collector_sim, quantile, run_trials, scaling_ratios, splitmix64, trial_rng, CouponEstimates,
};
use maj3lab_core::{
    DomainKind, ErmKind, ErrorStats, ExperimentConfig, ExperimentResult, Hypothesis, Instance, LearnerKind,
    LearnerSpec, NBasis,
};
use rand::Rng;
use rayon::prelude::*;

use crate::output::{float, write_coupon_csv, write_sweep_csv};

/// Center of the criterion 2 band for `ratio_dlog`, from the pilot run.
pub const RATIO_DLOG_CENTER: f64 = 0.5;
/// Upper bound on the Maj3 `ratio_dn` for criterion 3, from the pilot run.
pub const MAJ3_RATIO_DN_MAX: f64 = 1.0;
/// Lower bound on the 1/3-quantile of the Simon `ratio_dloglog`, from the pilot run.
pub const SIMON_DLOGLOG_Q13_MIN: f64 = 0.175;
/// Default master seed of the suite.
pub const VERIFY_SEED: u64 = 20_240_611;

const FLOOR_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Quick,
    Full,
}

impl Scale {
    fn pick(self, quick: usize, full: usize) -> usize {
        match self {
            Scale::Quick => quick,
            Scale::Full => full,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub scale: Scale,
    pub workers: usize,
    pub master_seed: u64,
    pub out_dir: Option<PathBuf>,
    /// Criteria to run, 1 through 9.
    pub criteria: Vec<u8>,
}

impl VerifyOptions {
    pub fn new(scale: Scale, workers: usize) -> Self {
        Self {
            scale,
            workers,
            master_seed: VERIFY_SEED,
            out_dir: None,
            criteria: (1..=9).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub measured: String,
    pub tolerance: String,
    pub details: Vec<String>,
    pub elapsed: Duration,
    pub budget: Duration,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub scale: Scale,
    pub outcomes: Vec<CriterionOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn status_line(o: &CriterionOutcome) -> String {
        format!(
            "criterion {} {}: {} ({:.1} s of {} s)",
            o.id,
            if o.passed { "PASS" } else { "FAIL" },
            o.title,
            o.elapsed.as_secs_f64(),
            o.budget.as_secs()
        )
    }

    pub fn render(&self) -> String {
        let mut s = format!("verify scale: {:?}\n", self.scale);
        for o in &self.outcomes {
            let _ = writeln!(s, "{}", Self::status_line(o));
            let _ = writeln!(s, "    measured:  {}", o.measured);
            let _ = writeln!(s, "    tolerance: {}", o.tolerance);
            for d in &o.details {
                let _ = writeln!(s, "    {d}");
            }
        }
        let passed = self.outcomes.iter().filter(|o| o.passed).count();
        let _ = writeln!(s, "{passed}/{} criteria passed", self.outcomes.len());
        s
    }
}

struct Check {
    passed: bool,
    measured: String,
    tolerance: String,
    details: Vec<String>,
}

struct Ctx<'a> {
    opts: &'a VerifyOptions,
}

impl Ctx<'_> {
    fn seed(&self, id: u8) -> u64 {
        splitmix64(self.opts.master_seed ^ u64::from(id))
    }

    fn out(&self, name: &str) -> Option<PathBuf> {
        self.opts.out_dir.as_ref().map(|d| d.join(name))
    }

    fn run(&self, config: &ExperimentConfig, csv: &str) -> Result<ExperimentResult> {
        let res = run_trials(config, self.opts.workers)?;
        if let Some(path) = self.out(csv) {
            write_sweep_csv(&path, config, &res.stats)?;
        }
        Ok(res)
    }

    fn config(&self, id: u8, instance: DomainKind, kind: LearnerKind, erm: ErmKind, grid: &[usize], trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            instance,
            learner: LearnerSpec { kind, erm },
            n_grid: grid.to_vec(),
            n_basis: NBasis::Piece,
            d: 1,
            delta: 0.1,
            c: DEFAULT_C,
            trials,
            master_seed: self.seed(id),
            quantile_levels: vec![],
        }
    }
}

type CriterionFn = fn(&Ctx<'_>) -> Result<Check>;

const CRITERIA: &[(u8, &str, u64, CriterionFn)] = &[
    (1, "exact set algebra", 30, c1_set_algebra),
    (2, "single bad ERM grows like d ln(n/d)/n", 300, c2_single_growth),
    (3, "Maj3 is O(d/n) in expectation", 600, c3_maj3_rate),
    (4, "E1 and |L1| = d frequencies", 180, c4_events),
    (5, "Simon prefix error floor", 600, c5_simon_floor),
    (6, "Maj3 beats Simon prefix", 600, c6_maj3_vs_simon),
    (7, "Y >= m concentration", 60, c7_y_concentration),
    (8, "high-probability quantile diagnostics", 600, c8_quantiles),
    (9, "oracles and determinism", 180, c9_oracles_determinism),
];

pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    if let Some(dir) = &opts.out_dir {
        let _ = std::fs::create_dir_all(dir);
    }
    let ctx = Ctx { opts };
    let mut outcomes = Vec::new();
    for &(id, title, budget, f) in CRITERIA {
        if !opts.criteria.contains(&id) {
            continue;
        }
        let budget = Duration::from_secs(budget);
        let start = Instant::now();
        let result = f(&ctx);
        let elapsed = start.elapsed();
        let outcome = match result {
            Ok(check) => {
                let mut details = check.details;
                let in_budget = elapsed <= budget;
                if !in_budget {
                    details.push(format!("over budget: {:.1} s", elapsed.as_secs_f64()));
                }
                CriterionOutcome {
                    id,
                    title,
                    passed: check.passed && in_budget,
                    measured: check.measured,
                    tolerance: check.tolerance,
                    details,
                    elapsed,
                    budget,
                }
            }
            Err(e) => CriterionOutcome {
                id,
                title,
                passed: false,
                measured: format!("error: {e:#}"),
                tolerance: String::new(),
                details: vec![],
                elapsed,
                budget,
            },
        };
        outcomes.push(outcome);
    }
    VerifyReport {
        scale: opts.scale,
        outcomes,
    }
}

fn random_set<R: Rng>(rng: &mut R) -> IntervalSet {
    let k = rng.random_range(0..=6);
    let raw: Vec<(f64, f64)> = (0..k)
        .map(|_| {
            let a: f64 = rng.random();
            let b: f64 = rng.random();
            if a < b { (a, b) } else { (b, a) }
        })
        .filter(|(a, b)| a < b)
        .collect();
    IntervalSet::normalize(raw).expect("random pairs are valid")
}

/// Adds `weight` to `diff` over the indices of sorted `points` inside `set`.
fn mark(points: &[f64], set: &IntervalSet, diff: &mut [i32]) {
    for iv in set.intervals() {
        let from = points.partition_point(|&x| x <= iv.lo());
        let to = points.partition_point(|&x| x <= iv.hi());
        diff[from] += 1;
        diff[to] -= 1;
    }
}

#[derive(Default, Clone, Copy)]
struct AlgebraTally {
    pointwise_mismatch: u64,
    ie_max: f64,
    ineq_violations: u64,
}

fn c1_set_algebra(ctx: &Ctx<'_>) -> Result<Check> {
    let triples = ctx.opts.scale.pick(1_000, 10_000);
    let npoints = ctx.opts.scale.pick(10_000, 100_000);
    let seed = ctx.seed(1);
    let mut rng = trial_rng(seed, 0, 0);
    let mut points: Vec<f64> = (0..npoints).map(|_| 1.0 - rng.random::<f64>()).collect();
    points.sort_by(f64::total_cmp);

    let tally = (0..triples)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, 1, t as u64);
            let (a, b, c) = (random_set(&mut rng), random_set(&mut rng), random_set(&mut rng));
            let maj = majority3(&a, &b, &c);

            let mut votes = vec![0i32; points.len() + 1];
            for s in [&a, &b, &c] {
                mark(&points, s, &mut votes);
            }
            let mut inside = vec![0i32; points.len() + 1];
            mark(&points, &maj, &mut inside);
            let (mut v, mut m, mut mismatch) = (0i32, 0i32, 0u64);
            for i in 0..points.len() {
                v += votes[i];
                m += inside[i];
                if (v >= 2) != (m >= 1) {
                    mismatch += 1;
                }
            }

            let (ab, ac, bc) = (a.intersect(&b), a.intersect(&c), b.intersect(&c));
            let abc = ab.intersect(&c);
            let pair_ie = (a.union(&b).measure() - (a.measure() + b.measure() - ab.measure())).abs();
            let triple_ie = (a.union(&b).union(&c).measure()
                - (a.measure() + b.measure() + c.measure() - ab.measure() - ac.measure() - bc.measure()
                    + abc.measure()))
                .abs();
            let pairwise = ab.measure() + ac.measure() + bc.measure();
            AlgebraTally {
                pointwise_mismatch: mismatch,
                ie_max: pair_ie.max(triple_ie),
                ineq_violations: u64::from(maj.measure() > pairwise + FLOOR_SLACK),
            }
        })
        .reduce(AlgebraTally::default, |x, y| AlgebraTally {
            pointwise_mismatch: x.pointwise_mismatch + y.pointwise_mismatch,
            ie_max: x.ie_max.max(y.ie_max),
            ineq_violations: x.ineq_violations + y.ineq_violations,
        });

    Ok(Check {
        passed: tally.pointwise_mismatch == 0 && tally.ie_max <= 1e-12 && tally.ineq_violations == 0,
        measured: format!(
            "{triples} triples x {npoints} points: {} pointwise mismatches, max inclusion-exclusion gap {:.3e}, {} inequality violations",
            tally.pointwise_mismatch, tally.ie_max, tally.ineq_violations
        ),
        tolerance: "0 mismatches, gap <= 1e-12, 0 violations".into(),
        details: vec![],
    })
}

const GROWTH_GRID: [usize; 4] = [300, 1000, 3000, 10000];

fn c2_config(ctx: &Ctx<'_>) -> ExperimentConfig {
    let trials = ctx.opts.scale.pick(500, 5000);
    ctx.config(2, DomainKind::Finite, LearnerKind::Single, ErmKind::MaxOnes, &GROWTH_GRID, trials)
}

fn fmt_list(xs: impl IntoIterator<Item = f64>) -> String {
    xs.into_iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
}

fn c2_single_growth(ctx: &Ctx<'_>) -> Result<Check> {
    let res = ctx.run(&c2_config(ctx), "c2_single_finite.csv")?;
    let dn: Vec<f64> = res.stats.iter().map(|s| s.ratio_dn).collect();
    let dlog: Vec<f64> = res.stats.iter().map(|s| s.ratio_dlog).collect();
    let increasing = dn.windows(2).all(|w| w[1] > w[0]);
    let at_1000 = dlog[1];
    let in_band = dlog.iter().all(|&r| r >= at_1000 / 2.0 && r <= at_1000 * 2.0);
    let near_center = (at_1000 / RATIO_DLOG_CENTER).log2().abs() <= 1.0;
    Ok(Check {
        passed: increasing && in_band && near_center,
        measured: format!("ratio_dn [{}], ratio_dlog [{}]", fmt_list(dn), fmt_list(dlog.clone())),
        tolerance: format!(
            "ratio_dn strictly increasing; ratio_dlog within x2 of its n=1000 value, which lies within x2 of the pilot center {RATIO_DLOG_CENTER}"
        ),
        details: vec![],
    })
}

fn c3_maj3_rate(ctx: &Ctx<'_>) -> Result<Check> {
    let trials = ctx.opts.scale.pick(500, 5000);
    let cfg = ctx.config(3, DomainKind::Finite, LearnerKind::Maj3Disjoint, ErmKind::MaxOnes, &GROWTH_GRID, trials);
    let maj = ctx.run(&cfg, "c3_maj3_finite.csv")?;
    let single = run_trials(&c2_config(ctx), ctx.opts.workers)?;

    let dn: Vec<f64> = maj.stats.iter().map(|s| s.ratio_dn).collect();
    let se: Vec<f64> = maj.stats.iter().map(|s| s.std_err * s.n_total as f64).collect();
    let non_increasing = (1..dn.len() - 1).all(|i| dn[i + 1] <= dn[i] + 3.0 * (se[i].powi(2) + se[i + 1].powi(2)).sqrt());
    let bounded = dn.iter().all(|&r| r <= MAJ3_RATIO_DN_MAX);
    let rel: Vec<f64> = maj
        .stats
        .iter()
        .zip(&single.stats)
        .map(|(m, s)| m.ratio_dn / s.ratio_dn)
        .collect();
    let falling = rel.windows(2).all(|w| w[1] < w[0]);
    Ok(Check {
        passed: non_increasing && bounded && falling,
        measured: format!(
            "maj3 ratio_dn [{}] (3-sigma [{}]); maj3/single ratio_dn [{}]",
            fmt_list(dn),
            fmt_list(se.iter().map(|s| 3.0 * s)),
            fmt_list(rel)
        ),
        tolerance: format!(
            "ratio_dn non-increasing after the first grid point up to 3 sigma, <= {MAJ3_RATIO_DN_MAX}; maj3/single strictly falling"
        ),
        details: vec![],
    })
}

fn coupon(ctx: &Ctx<'_>, id: u8, trials: usize, csv: &str) -> Result<CouponEstimates> {
    let seed = ctx.seed(id);
    let est = coupon_collector_sim(600, 1, DEFAULT_C, trials, seed)?;
    if let Some(path) = ctx.out(csv) {
        write_coupon_csv(&path, &[(600, 1, DEFAULT_C, seed, est)])?;
    }
    Ok(est)
}

fn c4_events(ctx: &Ctx<'_>) -> Result<Check> {
    let est = coupon(ctx, 4, ctx.opts.scale.pick(500, 2000), "c4_coupon.csv")?;
    let (p1, s1) = binomial(est.e1, est.trials);
    let (p2, s2) = binomial(est.e2, est.trials);
    let root = (2.0f64 / 3.0).sqrt();
    let total_prob = est.p_hat_e2_given_e1() * p1 <= p2 + 3.0 * s2;
    Ok(Check {
        passed: p1 >= root - 3.0 * s1 && p2 >= 2.0 / 3.0 - 3.0 * s2 && total_prob,
        measured: format!(
            "P(E1) = {p1:.4} (sigma {s1:.4}), P(|L1| = d) = {p2:.4} (sigma {s2:.4}), P(E2 | E1) = {:.4}, C = {DEFAULT_C}",
            est.p_hat_e2_given_e1()
        ),
        tolerance: format!("P(E1) >= {root:.4} - 3 sigma, P(|L1| = d) >= 0.6667 - 3 sigma"),
        details: vec![],
    })
}

fn c5_simon_floor(ctx: &Ctx<'_>) -> Result<Check> {
    let trials = ctx.opts.scale.pick(300, 2000);
    let grid = [600, 2000, 6000];
    let cfg = ctx.config(5, DomainKind::Interval, LearnerKind::SimonPrefix, ErmKind::Adversarial, &grid, trials);
    let res = ctx.run(&cfg, "c5_simon_interval.csv")?;
    let d = cfg.d;
    let mut violations = 0;
    let mut checked = 0;
    let mut q13 = Vec::new();
    for (s, recs) in res.stats.iter().zip(&res.records) {
        let scheme = build_partition(2 * s.n, d, cfg.c)?;
        let floor = d as f64 / (scheme.m1 * scheme.m2) as f64;
        for r in recs {
            ensure!(r.aux.l1_sizes.len() == 3, "missing index sets in trial {}", r.trial_index);
            if r.aux.l1_sizes[1] == d {
                checked += 1;
                if r.error < floor * (1.0 - FLOOR_SLACK) {
                    violations += 1;
                }
            }
        }
        let mut ratios: Vec<f64> = recs.iter().map(|r| scaling_ratios(r.error, s.n_total, d).2).collect();
        ratios.sort_by(f64::total_cmp);
        q13.push(quantile(&ratios, 1.0 / 3.0)?);
    }
    Ok(Check {
        passed: violations == 0 && checked > 0 && q13.iter().all(|&q| q >= SIMON_DLOGLOG_Q13_MIN),
        measured: format!(
            "{violations} floor violations in {checked} trials with |L1| = d; 1/3-quantile of ratio_dloglog [{}]",
            fmt_list(q13)
        ),
        tolerance: format!("0 violations; quantile >= {SIMON_DLOGLOG_Q13_MIN} at every t"),
        details: vec![],
    })
}

fn c6_maj3_vs_simon(ctx: &Ctx<'_>) -> Result<Check> {
    let trials = ctx.opts.scale.pick(300, 2000);
    let maj = ctx.config(6, DomainKind::Interval, LearnerKind::Maj3Disjoint, ErmKind::Adversarial, &[6000], trials);
    let simon = ExperimentConfig {
        learner: LearnerSpec {
            kind: LearnerKind::SimonPrefix,
            erm: ErmKind::Adversarial,
        },
        ..maj.clone()
    };
    let m = &ctx.run(&maj, "c6_maj3_interval.csv")?.stats[0];
    let s = &ctx.run(&simon, "c6_simon_interval.csv")?.stats[0];
    let (m_hi, s_lo) = (m.mean + 3.0 * m.std_err, s.mean - 3.0 * s.std_err);
    Ok(Check {
        passed: m_hi < s_lo,
        measured: format!(
            "maj3 {:.4e} +- {:.2e}, simon {:.4e} +- {:.2e} (3 sigma)",
            m.mean,
            3.0 * m.std_err,
            s.mean,
            3.0 * s.std_err
        ),
        tolerance: "maj3 mean + 3 sigma < simon mean - 3 sigma".into(),
        details: vec![],
    })
}

fn c7_y_concentration(ctx: &Ctx<'_>) -> Result<Check> {
    let est = coupon(ctx, 7, ctx.opts.scale.pick(1000, 5000), "c7_coupon.csv")?;
    let (p, s) = binomial(est.y_ge_m, est.trials);
    let root = (2.0f64 / 3.0).sqrt();
    Ok(Check {
        passed: p >= root - 3.0 * s,
        measured: format!("P(Y >= m) = {p:.4} (sigma {s:.4}) over {} trials, C = {DEFAULT_C}", est.trials),
        tolerance: format!("P(Y >= m) >= {root:.4} - 3 sigma"),
        details: vec![],
    })
}

fn q_at(s: &ErrorStats, level: f64) -> f64 {
    s.quantiles
        .iter()
        .find(|(l, _)| (l - level).abs() < 1e-12)
        .map(|q| q.1)
        .unwrap_or(f64::NAN)
}

fn c8_quantiles(ctx: &Ctx<'_>) -> Result<Check> {
    let trials = ctx.opts.scale.pick(1000, 10000);
    let mut cfg = ctx.config(8, DomainKind::Finite, LearnerKind::Maj3Disjoint, ErmKind::MaxOnes, &[1000, 3000], trials);
    cfg.delta = 0.01;
    cfg.quantile_levels = vec![0.9, 0.99];
    let res = ctx.run(&cfg, "c8_maj3_quantiles.csv")?;
    let mut passed = true;
    let mut details = vec!["t      delta  quantile*n    quantile/mean".to_string()];
    let mut measured = Vec::new();
    for s in &res.stats {
        let (q90, q99) = (q_at(s, 0.9), q_at(s, 0.99));
        let n = s.n_total as f64;
        for (delta, q) in [(0.1, q90), (0.01, q99)] {
            details.push(format!("{:<6} {delta:<6} {:<13.6e} {:.4}", s.n, q * n, q / s.mean));
        }
        let monotone = q99 * n >= q90 * n;
        let ratio_grows = q99 / s.mean > q90 / s.mean;
        passed &= monotone && ratio_grows;
        measured.push(format!(
            "t={}: q*n {:.3e} -> {:.3e}, q/mean {:.3} -> {:.3}",
            s.n,
            q90 * n,
            q99 * n,
            q90 / s.mean,
            q99 / s.mean
        ));
    }
    Ok(Check {
        passed,
        measured: measured.join("; "),
        tolerance: "quantile*n non-decreasing in ln(1/delta); quantile/mean larger at delta = 0.01 than at 0.1".into(),
        details,
    })
}

fn random_hypothesis<R: Rng>(rng: &mut R) -> Hypothesis {
    loop {
        let s = random_set(rng);
        if !s.is_empty() {
            return Hypothesis::Interval(s);
        }
    }
}

fn csv_bytes(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            files.insert(name, std::fs::read(&path)?);
        }
    }
    Ok(files)
}

fn c9_oracles_determinism(ctx: &Ctx<'_>) -> Result<Check> {
    let seed = ctx.seed(9);
    let inst = Instance::Interval(IntervalHardInstance::new(1, DEFAULT_C)?);
    let sizes = [1_000usize, 10_000, 100_000];
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for h in 0..100u64 {
        let hyp = random_hypothesis(&mut trial_rng(seed, 0, h));
        let p = exact_error(&hyp, &inst)?;
        for &s in &sizes {
            let mc = monte_carlo_error(&hyp, &inst, s, &mut trial_rng(seed, s as u64, h))?.value;
            let sigma = (p * (1.0 - p) / s as f64).sqrt();
            let z = if sigma > 0.0 { (mc - p).abs() / sigma } else if mc == p { 0.0 } else { f64::INFINITY };
            worst = worst.max(z);
            if z > 4.0 {
                violations += 1;
            }
            rows.push([h.to_string(), s.to_string(), float(p), float(mc)]);
        }
    }
    if let Some(path) = ctx.out("c9_monte_carlo.csv") {
        let file = std::fs::File::create(&path)?;
        let mut out = std::io::BufWriter::new(file);
        std::io::Write::write_all(&mut out, format!("# schema: maj3lab-montecarlo/{}\n", crate::output::SCHEMA_VERSION).as_bytes())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["hypothesis", "samples", "exact", "monte_carlo"])?;
        for r in &rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }

    let mut identical = true;
    let mut detail = String::new();
    let dirs = [tempfile::tempdir()?, tempfile::tempdir()?];
    let mut snapshots = Vec::new();
    for (dir, workers) in dirs.iter().zip([1usize, 8]) {
        let opts = VerifyOptions {
            scale: Scale::Quick,
            workers,
            master_seed: ctx.opts.master_seed,
            out_dir: Some(dir.path().to_path_buf()),
            criteria: (1..=8).collect(),
        };
        run_verify(&opts);
        snapshots.push(csv_bytes(dir.path())?);
    }
    let (a, b) = (&snapshots[0], &snapshots[1]);
    if a.is_empty() || a.keys().ne(b.keys()) {
        identical = false;
        let _ = write!(detail, "file sets differ: {:?} vs {:?}", a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
    }
    for (name, bytes) in a {
        if b.get(name) != Some(bytes) {
            identical = false;
            let _ = write!(detail, "{name} differs; ");
        }
    }
    Ok(Check {
        passed: violations == 0 && identical,
        measured: format!(
            "{violations} of {} Monte Carlo estimates outside 4 sigma (max |z| = {worst:.2}); {} quick-scale CSVs {} under workers 1 and 8 {detail}",
            rows.len(),
            a.len(),
            if identical { "byte-identical" } else { "NOT identical" }
        ),
        tolerance: "all |z| <= 4; all CSVs byte-identical".into(),
        details: vec![],
    })
}
