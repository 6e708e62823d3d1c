//! Seeded trial runner, aggregate statistics and the coupon-collector simulator.
//!
//! # Seeds
//!
//! Every trial owns a `ChaCha8Rng` seeded through `rand`'s `seed_from_u64`
//! with
//!
//! ```text
//! trial_seed(master, n, trial) =
//!     splitmix64(splitmix64(splitmix64(master) ^ n) ^ trial)
//! ```
//!
//! where `n` is the grid value (not the total sample size), all arithmetic is
//! wrapping on `u64`, and
//!
//! ```text
//! splitmix64(x):
//!     z = x + 0x9E3779B97F4A7C15
//!     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!     return z ^ (z >> 31)
//! ```
//!
//! A trial draws the full training sample first and then hands the same
//! generator to the learner (only bagging consumes it).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::erms::{build_partition, grid_cell, select_indices, PartitionScheme};
use crate::error::{Error, Result};
use crate::evaluation::{exact_error, joint_error};
use crate::instances::{DomainKind, FiniteHardInstance, Instance, IntervalHardInstance};
use crate::learners::LearnerSpec;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(master_seed: u64, n: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ n) ^ trial)
}

pub fn trial_rng(master_seed: u64, n: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master_seed, n, trial))
}

/// How grid values translate into training-set sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NBasis {
    /// Grid values are piece sizes `t`; the learner sees `pieces * t` points.
    Piece,
    /// Grid values are total sample sizes.
    Total,
}

impl NBasis {
    pub fn name(&self) -> &'static str {
        match self {
            NBasis::Piece => "piece",
            NBasis::Total => "total",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub instance: DomainKind,
    pub learner: LearnerSpec,
    pub n_grid: Vec<usize>,
    pub n_basis: NBasis,
    pub d: usize,
    pub delta: f64,
    pub c: f64,
    pub trials: usize,
    pub master_seed: u64,
    /// Quantile levels; empty means `[1 - delta]`.
    pub quantile_levels: Vec<f64>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_grid.is_empty() {
            return bad("n_grid must be nonempty".into());
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("n_grid must be strictly ascending: {:?}", self.n_grid));
        }
        if self.n_grid[0] == 0 {
            return bad("n_grid values must be positive".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.d == 0 {
            return bad("d must be at least 1".into());
        }
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return bad(format!("delta = {} must lie in (0, 1/2]", self.delta));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad(format!("C = {} must be positive", self.c));
        }
        if let Some(l) = self.quantile_levels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            return bad(format!("quantile level {l} must lie in (0, 1)"));
        }
        self.learner.kind.validate()?;
        if !self.learner.erm.supports(self.instance) {
            return Err(Error::DomainMismatch(format!(
                "ERM {} is not defined on the {:?} domain",
                self.learner.erm, self.instance
            )));
        }
        Ok(())
    }

    pub fn levels(&self) -> Vec<f64> {
        if self.quantile_levels.is_empty() {
            vec![1.0 - self.delta]
        } else {
            self.quantile_levels.clone()
        }
    }

    /// Piece size and total training size for a grid value.
    pub fn sizes(&self, n: usize) -> Result<(usize, usize)> {
        let pieces = self.learner.kind.pieces();
        match self.n_basis {
            NBasis::Piece => Ok((n, n * pieces)),
            NBasis::Total => {
                if n % pieces != 0 {
                    return Err(Error::IndivisibleSample { len: n, pieces });
                }
                Ok((n / pieces, n))
            }
        }
    }

    /// The instance used at grid value `n`; the finite domain is sized from the
    /// piece size.
    pub fn instance_for(&self, n: usize) -> Result<Instance> {
        let (piece, _) = self.sizes(n)?;
        Ok(match self.instance {
            DomainKind::Finite => Instance::Finite(FiniteHardInstance::for_sample_size(piece, self.d)?),
            DomainKind::Interval => Instance::Interval(IntervalHardInstance::new(self.d, self.c)?),
        })
    }
}

/// Per-voter diagnostics.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrialAux {
    pub l1_sizes: Vec<usize>,
    pub l2_sizes: Vec<usize>,
    pub voter_errors: Vec<f64>,
    /// Joint errors of voter pairs `(0,1), (0,2), .., (1,2), ..`.
    pub pairwise_joint: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub n: usize,
    pub seed: u64,
    pub error: f64,
    pub aux: TrialAux,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorStats {
    pub n: usize,
    pub n_total: usize,
    pub trials: usize,
    pub mean: f64,
    pub std_err: f64,
    /// `(level, value)` pairs.
    pub quantiles: Vec<(f64, f64)>,
    pub ratio_dn: f64,
    pub ratio_dlog: f64,
    pub ratio_dloglog: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub stats: Vec<ErrorStats>,
    pub records: Vec<Vec<TrialRecord>>,
}

/// Scaling ratios of `value` at total size `n`; NaN unless `n/d > e`.
pub fn scaling_ratios(value: f64, n: usize, d: usize) -> (f64, f64, f64) {
    let x = n as f64 / d as f64;
    let dn = value * x;
    if x <= std::f64::consts::E {
        return (dn, f64::NAN, f64::NAN);
    }
    (dn, dn / x.ln(), dn / x.ln().ln())
}

/// One trial, recomputable from the config alone.
pub fn run_single_trial(config: &ExperimentConfig, n: usize, trial: usize) -> Result<TrialRecord> {
    let wrap = |e: Error| Error::Trial {
        n,
        trial,
        source: Box::new(e),
    };
    let (_, total) = config.sizes(n).map_err(wrap)?;
    let instance = config.instance_for(n).map_err(wrap)?;
    let seed = trial_seed(config.master_seed, n as u64, trial as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = instance.draw_sample(total, &mut rng);
    let out = config.learner.fit(sample.view(), &instance, &mut rng).map_err(wrap)?;
    let error = exact_error(&out.hypothesis, &instance).map_err(wrap)?;

    let mut aux = TrialAux::default();
    for f in &out.voters {
        if let Some(sel) = &f.selection {
            aux.l1_sizes.push(sel.l1.len());
            aux.l2_sizes.push(sel.l2.len());
        }
        aux.voter_errors.push(exact_error(&f.hypothesis, &instance).map_err(wrap)?);
    }
    for a in 0..out.voters.len() {
        for b in a + 1..out.voters.len() {
            let j = joint_error(&out.voters[a].hypothesis, &out.voters[b].hypothesis, &instance);
            aux.pairwise_joint.push(j.map_err(wrap)?);
        }
    }
    Ok(TrialRecord {
        trial_index: trial,
        n,
        seed,
        error,
        aux,
    })
}

fn summarize(config: &ExperimentConfig, n: usize, records: &[TrialRecord]) -> Result<ErrorStats> {
    let (_, n_total) = config.sizes(n)?;
    let errs: Vec<f64> = records.iter().map(|r| r.error).collect();
    let t = errs.len() as f64;
    let mean = errs.iter().sum::<f64>() / t;
    let var = if errs.len() > 1 {
        errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (t - 1.0)
    } else {
        0.0
    };
    let mut sorted = errs;
    sorted.sort_by(f64::total_cmp);
    let quantiles = config
        .levels()
        .into_iter()
        .map(|l| Ok((l, quantile(&sorted, l)?)))
        .collect::<Result<Vec<_>>>()?;
    let (ratio_dn, ratio_dlog, ratio_dloglog) = scaling_ratios(mean, n_total, config.d);
    Ok(ErrorStats {
        n,
        n_total,
        trials: records.len(),
        mean,
        std_err: (var / t).sqrt(),
        quantiles,
        ratio_dn,
        ratio_dlog,
        ratio_dloglog,
    })
}

/// Runs every trial at every grid value on a pool of `workers` threads.
/// The result does not depend on `workers`.
pub fn run_trials(config: &ExperimentConfig, workers: usize) -> Result<ExperimentResult> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let mut stats = Vec::with_capacity(config.n_grid.len());
    let mut records = Vec::with_capacity(config.n_grid.len());
    for &n in &config.n_grid {
        let results: Vec<Result<TrialRecord>> = pool.install(|| {
            (0..config.trials)
                .into_par_iter()
                .map(|trial| run_single_trial(config, n, trial))
                .collect()
        });
        let recs = results.into_iter().collect::<Result<Vec<_>>>()?;
        stats.push(summarize(config, n, &recs)?);
        records.push(recs);
    }
    Ok(ExperimentResult { stats, records })
}

/// Nearest-rank quantile of ascending `sorted` data: the order statistic at
/// 1-based rank `ceil(level * len)`.
pub fn quantile(sorted: &[f64], level: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyData);
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!("quantile level {level} must lie in (0, 1)")));
    }
    let len = sorted.len();
    let r = level * len as f64;
    // 0.9 * 10 evaluates to 9.000000000000002; snap such products back.
    let rank = if (r - r.round()).abs() < 1e-9 * len as f64 {
        r.round()
    } else {
        r.ceil()
    };
    let rank = (rank as usize).clamp(1, len);
    Ok(sorted[rank - 1])
}

/// Frequencies from the coupon-collector simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouponEstimates {
    pub trials: usize,
    /// `|L2(S1)| = d` for a size-`m` sample `S1`.
    pub e1: usize,
    /// `|L1(S1, S2)| = d` for the size-`2m` sample `(S1, S2)`.
    pub e2: usize,
    pub e1_and_e2: usize,
    /// `Y >= m`, `Y` the draws needed to cover `m2 d - d` of the fine cells
    /// inside `d` coarse cells at size `2m`.
    pub y_ge_m: usize,
}

/// Frequency with its binomial standard error.
pub fn binomial(count: usize, trials: usize) -> (f64, f64) {
    let p = count as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

impl CouponEstimates {
    pub fn p_hat_e1(&self) -> f64 {
        binomial(self.e1, self.trials).0
    }

    pub fn p_hat_e2(&self) -> f64 {
        binomial(self.e2, self.trials).0
    }

    /// NaN when `E1` never occurred.
    pub fn p_hat_e2_given_e1(&self) -> f64 {
        self.e1_and_e2 as f64 / self.e1 as f64
    }

    pub fn p_hat_y_ge_m(&self) -> f64 {
        binomial(self.y_ge_m, self.trials).0
    }
}

fn coupon_trial(m: usize, scheme_m: &PartitionScheme, scheme_2m: &PartitionScheme, rng: &mut ChaCha8Rng) -> (bool, bool, bool) {
    let d = scheme_m.d;
    let points: Vec<f64> = (0..2 * m).map(|_| crate::instances::draw_unit(rng)).collect();
    let e1 = select_indices(&points[..m], scheme_m).l2.len() == d;
    let e2 = select_indices(&points, scheme_2m).l1.len() == d;

    // Y >= m iff fewer than m2 d - d cells are covered after m - 1 draws.
    let (m1, m2) = (scheme_2m.m1, scheme_2m.m2);
    let target = m2 * d - d;
    let fine_cells = scheme_2m.fine_cells();
    let mut hit = vec![false; d * m2];
    let mut covered = 0;
    for _ in 0..m - 1 {
        let x = crate::instances::draw_unit(rng);
        if grid_cell(x, m1) <= d {
            let f = grid_cell(x, fine_cells) - 1;
            if !hit[f] {
                hit[f] = true;
                covered += 1;
            }
        }
    }
    (e1, e2, covered < target)
}

pub fn coupon_collector_sim(m: usize, d: usize, c: f64, trials: usize, seed: u64) -> Result<CouponEstimates> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let scheme_m = build_partition(m, d, c)?;
    let scheme_2m = build_partition(2 * m, d, c)?;
    let outcomes: Vec<(bool, bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| coupon_trial(m, &scheme_m, &scheme_2m, &mut trial_rng(seed, m as u64, t as u64)))
        .collect();
    let count = |f: fn(&(bool, bool, bool)) -> bool| outcomes.iter().filter(|o| f(o)).count();
    Ok(CouponEstimates {
        trials,
        e1: count(|o| o.0),
        e2: count(|o| o.1),
        e1_and_e2: count(|o| o.0 && o.1),
        y_ge_m: count(|o| o.2),
    })
}

/// One candidate's certification outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotRow {
    pub c: f64,
    /// `None` when the partition precondition fails at this `C`.
    pub estimates: Option<CouponEstimates>,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PilotReport {
    pub selected: f64,
    pub rows: Vec<PilotRow>,
}

/// `p - 3 sigma >= sqrt(2/3)`.
pub fn certifies(count: usize, trials: usize) -> bool {
    let (p, s) = binomial(count, trials);
    p - 3.0 * s >= (2.0f64 / 3.0).sqrt()
}

/// Smallest candidate `C` whose simulated `E1` and `Y >= m` frequencies both
/// clear `sqrt(2/3)` with a three-sigma margin.
pub fn pilot_select_c(m_ref: usize, d_ref: usize, candidates: &[f64], trials: usize, seed: u64) -> Result<PilotReport> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidate constants given".into()));
    }
    if candidates.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("candidates must be strictly ascending".into()));
    }
    let mut rows = Vec::with_capacity(candidates.len());
    for &c in candidates {
        let row = match coupon_collector_sim(m_ref, d_ref, c, trials, seed) {
            Ok(est) => PilotRow {
                c,
                passes: certifies(est.e1, est.trials) && certifies(est.y_ge_m, est.trials),
                estimates: Some(est),
            },
            Err(Error::PartitionPrecondition(_)) => PilotRow {
                c,
                estimates: None,
                passes: false,
            },
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    match rows.iter().find(|r| r.passes) {
        Some(r) => Ok(PilotReport { selected: r.c, rows }),
        None => Err(Error::NoCandidatePasses(
            rows.iter()
                .map(|r| match &r.estimates {
                    Some(e) => format!("C={}: E1={:.4}, Y>=m={:.4}", r.c, e.p_hat_e1(), e.p_hat_y_ge_m()),
                    None => format!("C={}: precondition fails", r.c),
                })
                .collect::<Vec<_>>()
                .join("; "),
        )),
    }
}
