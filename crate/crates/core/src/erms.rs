//! Empirical risk minimizers for the two hard instances.
//!
//! All of them map a labeled sample to a hypothesis consistent with it. The
//! "bad" ones ([`adversarial_interval_erm`], [`max_ones_erm`]) pick, among the
//! consistent hypotheses, ones that put as much mass as possible on label 1;
//! every arbitrary choice is pinned by a smallest-index rule so fits are
//! deterministic.

use std::fmt;

use bitvec::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{self, IntervalSet};
use crate::instances::{
    DomainKind, DomainPoint, FiniteHardInstance, Instance, PointsRef, SampleView,
};

/// Indicator of a subset of the finite domain `{1..N}`; bit `i - 1` is point `i`.
pub type FiniteIndicator = BitVec<u64, Lsb0>;

/// A binary function on one of the two domains.
#[derive(Debug, Clone, PartialEq)]
pub enum Hypothesis {
    Interval(IntervalSet),
    Finite(FiniteIndicator),
}

impl Hypothesis {
    pub fn zero_for(instance: &Instance) -> Self {
        match instance {
            Instance::Interval(_) => Hypothesis::Interval(IntervalSet::empty()),
            Instance::Finite(f) => Hypothesis::Finite(bitvec![u64, Lsb0; 0; f.domain_size()]),
        }
    }

    pub fn kind(&self) -> DomainKind {
        match self {
            Hypothesis::Interval(_) => DomainKind::Interval,
            Hypothesis::Finite(_) => DomainKind::Finite,
        }
    }

    pub fn eval(&self, x: DomainPoint) -> Result<bool> {
        match (self, x) {
            (Hypothesis::Interval(s), DomainPoint::Real(x)) => s.contains(x),
            (Hypothesis::Finite(bits), DomainPoint::Index(i)) => {
                if i == 0 || i as usize > bits.len() {
                    return Err(Error::IndexOutOfRange {
                        index: i,
                        domain_size: bits.len(),
                    });
                }
                Ok(bits[i as usize - 1])
            }
            _ => Err(Error::DomainMismatch(format!(
                "{:?} hypothesis evaluated at {x:?}",
                self.kind()
            ))),
        }
    }

    /// Number of ones (finite) or member intervals (interval).
    pub fn size(&self) -> usize {
        match self {
            Hypothesis::Interval(s) => s.len(),
            Hypothesis::Finite(bits) => bits.count_ones(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Hypothesis::Interval(s) => s.is_empty(),
            Hypothesis::Finite(bits) => bits.not_any(),
        }
    }

    /// Pointwise strict majority (more than half of the voters).
    pub fn majority(voters: &[&Hypothesis]) -> Result<Hypothesis> {
        let first = voters
            .first()
            .ok_or_else(|| Error::InvalidParameter("majority of zero voters".into()))?;
        match first {
            Hypothesis::Interval(_) => {
                let sets = voters
                    .iter()
                    .map(|h| match h {
                        Hypothesis::Interval(s) => Ok(s),
                        _ => Err(mixed_voters()),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Hypothesis::Interval(geometry::majority(&sets)))
            }
            Hypothesis::Finite(f) => {
                let bits = voters
                    .iter()
                    .map(|h| match h {
                        Hypothesis::Finite(b) if b.len() == f.len() => Ok(b),
                        _ => Err(mixed_voters()),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Hypothesis::Finite(finite_majority(&bits)))
            }
        }
    }
}

fn mixed_voters() -> Error {
    Error::DomainMismatch("majority over hypotheses of different domains".into())
}

fn finite_majority(voters: &[&FiniteIndicator]) -> FiniteIndicator {
    let len = voters[0].len();
    if let [a, b, c] = voters {
        let ab = (*a).clone() & &**b;
        let ac = (*a).clone() & &**c;
        let bc = (*b).clone() & &**c;
        return ab | ac | bc;
    }
    let need = voters.len() / 2 + 1;
    let mut counts = vec![0usize; len];
    for v in voters {
        for i in v.iter_ones() {
            counts[i] += 1;
        }
    }
    counts.into_iter().map(|c| c >= need).collect()
}

/// Grid sizes `(m1, m2, m3)` of the adversarial interval ERM at training size `m`.
///
/// Cells are implicit: `I_i = ((i-1)/m1, i/m1]`, `I_(i,j)` is the `j`-th of
/// `m2` equal pieces of `I_i` (the cell `(i-1)*m2 + j` of a grid with
/// `m1*m2` cells), and `J_k = ((k-1)/m3, k/m3]`. Endpoints are computed as
/// `index as f64 / cells as f64`, so coinciding rationals are bit-equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionScheme {
    pub m: usize,
    pub d: usize,
    pub c: f64,
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
}

impl PartitionScheme {
    /// A scheme with explicit grid sizes, bypassing the formulas.
    pub fn with_counts(m: usize, d: usize, m1: usize, m2: usize, m3: usize) -> Result<Self> {
        if d == 0 || m1 == 0 || m2 == 0 || m3 == 0 {
            return Err(Error::InvalidParameter(
                "grid sizes and d must be positive".into(),
            ));
        }
        Ok(Self {
            m,
            d,
            c: f64::NAN,
            m1,
            m2,
            m3,
        })
    }

    pub fn fine_cells(&self) -> usize {
        self.m1 * self.m2
    }

    /// Length of one subinterval `I_(i,j)`.
    pub fn fine_width(&self) -> f64 {
        1.0 / self.fine_cells() as f64
    }

    pub fn coarse_interval(&self, i: usize) -> (f64, f64) {
        grid_interval(i, self.m1)
    }

    pub fn fine_interval(&self, i: usize, j: usize) -> (f64, f64) {
        grid_interval((i - 1) * self.m2 + j, self.fine_cells())
    }

    pub fn j_interval(&self, k: usize) -> (f64, f64) {
        grid_interval(k, self.m3)
    }
}

/// `ceil(C m / ln(C m / d))`.
fn coarse_count(m: usize, d: usize, c: f64) -> usize {
    let cm = c * m as f64;
    (cm / (cm / d as f64).ln()).ceil() as usize
}

pub fn build_partition(m: usize, d: usize, c: f64) -> Result<PartitionScheme> {
    if d == 0 {
        return Err(Error::PartitionPrecondition("d >= 1 required".into()));
    }
    if m < 2 {
        return Err(Error::PartitionPrecondition(format!("m >= 2 required (m = {m})")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::PartitionPrecondition(format!("C > 0 required (C = {c})")));
    }
    let ratio = c * m as f64 / d as f64;
    if ratio <= std::f64::consts::E {
        return Err(Error::PartitionPrecondition(format!(
            "C*m/d > e required so that ln(ln(C*m/d)) > 0 (C*m/d = {ratio})"
        )));
    }
    let m1 = coarse_count(m, d, c);
    let m2 = (4.0 * c * m as f64 / (m1 as f64 * ratio.ln().ln())).ceil() as usize;
    // J_k(m) is the coarse grid at size 2m by construction.
    let m3 = coarse_count(2 * m, d, c);
    Ok(PartitionScheme { m, d, c, m1, m2, m3 })
}

fn grid_interval(index: usize, cells: usize) -> (f64, f64) {
    ((index - 1) as f64 / cells as f64, index as f64 / cells as f64)
}

/// 1-based cell of `x` in `((i-1)/cells, i/cells]`, consistent with the
/// floating-point endpoints of [`grid_interval`].
pub fn grid_cell(x: f64, cells: usize) -> usize {
    let n = cells as f64;
    let mut i = ((x * n).ceil() as usize).clamp(1, cells);
    while i > 1 && x <= (i - 1) as f64 / n {
        i -= 1;
    }
    while i < cells && x > i as f64 / n {
        i += 1;
    }
    i
}

/// The index sets `L1` (pairs `(i, j)`) and `L2` (indices `k`), 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexSelection {
    pub l1: Vec<(usize, usize)>,
    pub l2: Vec<usize>,
}

/// Output of the adversarial interval ERM with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversarialFit {
    pub hypothesis: IntervalSet,
    pub selection: IndexSelection,
    pub scheme: PartitionScheme,
}

/// Computes `L1` and `L2` for all-zero-labeled points against `scheme`.
pub fn select_indices(points: &[f64], scheme: &PartitionScheme) -> IndexSelection {
    let m = points.len();
    let d = scheme.d;
    let (first, second) = points.split_at(m / 2);

    let mut coarse_hit = vec![false; scheme.m1];
    for &x in first {
        coarse_hit[grid_cell(x, scheme.m1) - 1] = true;
    }
    let chosen: Vec<usize> = (1..=scheme.m1)
        .filter(|&i| !coarse_hit[i - 1])
        .take(d)
        .collect();

    // fine occupancy only inside the chosen coarse cells
    let mut fine_hit = vec![false; chosen.len() * scheme.m2];
    if !chosen.is_empty() {
        let fine_cells = scheme.fine_cells();
        for &x in second {
            let i = grid_cell(x, scheme.m1);
            if let Ok(slot) = chosen.binary_search(&i) {
                let j = grid_cell(x, fine_cells) - (i - 1) * scheme.m2;
                fine_hit[slot * scheme.m2 + j - 1] = true;
            }
        }
    }
    let l1 = chosen
        .iter()
        .enumerate()
        .flat_map(|(slot, &i)| (1..=scheme.m2).map(move |j| (slot, i, j)))
        .filter(|&(slot, _, j)| !fine_hit[slot * scheme.m2 + j - 1])
        .map(|(_, i, j)| (i, j))
        .take(d)
        .collect();

    let mut j_hit = vec![false; scheme.m3];
    for &x in points {
        j_hit[grid_cell(x, scheme.m3) - 1] = true;
    }
    let l2 = (1..=scheme.m3).filter(|&k| !j_hit[k - 1]).take(d).collect();

    IndexSelection { l1, l2 }
}

/// Indicator of the chosen subintervals and J-cells.
pub fn selection_set(selection: &IndexSelection, scheme: &PartitionScheme) -> IntervalSet {
    let raw = selection
        .l1
        .iter()
        .map(|&(i, j)| scheme.fine_interval(i, j))
        .chain(selection.l2.iter().map(|&k| scheme.j_interval(k)));
    IntervalSet::normalize(raw).expect("grid intervals are valid")
}

/// The adversarial interval ERM at training size `|sample|`.
pub fn adversarial_interval_erm(sample: SampleView<'_>, d: usize, c: f64) -> Result<AdversarialFit> {
    let scheme = build_partition(sample.len(), d, c)?;
    adversarial_interval_erm_with_scheme(sample, &scheme)
}

/// The adversarial interval ERM against a fixed scheme.
pub fn adversarial_interval_erm_with_scheme(
    sample: SampleView<'_>,
    scheme: &PartitionScheme,
) -> Result<AdversarialFit> {
    let PointsRef::Real(points) = sample.points() else {
        return Err(Error::DomainMismatch(
            "adversarial interval ERM needs points in (0, 1]".into(),
        ));
    };
    if sample.has_positive_label() {
        let hypothesis = interval_fallback(points, sample.labels(), scheme.d)?;
        return Ok(AdversarialFit {
            hypothesis,
            selection: IndexSelection::default(),
            scheme: *scheme,
        });
    }
    let selection = select_indices(points, scheme);
    let hypothesis = selection_set(&selection, scheme);
    Ok(AdversarialFit {
        hypothesis,
        selection,
        scheme: *scheme,
    })
}

/// Consistent fallback for samples with 1-labels: one snapped interval
/// `(prev_float(a), b]` per run of 1-labeled points (in sorted order) with no
/// 0-labeled point between them. Fails beyond `2d` runs.
fn interval_fallback(points: &[f64], labels: &[bool], d: usize) -> Result<IntervalSet> {
    let mut order: Vec<(f64, bool)> = points.iter().copied().zip(labels.iter().copied()).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    if let Some(w) = order.windows(2).find(|w| w[0].0 == w[1].0 && w[0].1 != w[1].1) {
        return Err(Error::NoConsistentHypothesis(format!(
            "point {} carries both labels",
            w[0].0
        )));
    }
    let mut runs: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for (x, label) in order {
        match (label, open.as_mut()) {
            (true, Some(run)) => run.1 = x,
            (true, None) => open = Some((x, x)),
            (false, _) => runs.extend(open.take()),
        }
    }
    runs.extend(open);
    if runs.len() > 2 * d {
        return Err(Error::NoConsistentHypothesis(format!(
            "{} runs of 1-labels exceed the 2d = {} interval budget",
            runs.len(),
            2 * d
        )));
    }
    IntervalSet::normalize(runs.into_iter().map(|(a, b)| (a.next_down().max(0.0), b)))
}

/// Ones at the `d` smallest indices not present in the sample.
pub fn max_ones_erm(sample: SampleView<'_>, instance: &FiniteHardInstance) -> Result<FiniteIndicator> {
    let PointsRef::Finite(points) = sample.points() else {
        return Err(Error::DomainMismatch("max-ones ERM needs finite-domain points".into()));
    };
    let size = instance.domain_size();
    let mut seen = bitvec![u64, Lsb0; 0; size];
    for &p in points {
        if p == 0 || p as usize > size {
            return Err(Error::IndexOutOfRange {
                index: p,
                domain_size: size,
            });
        }
        seen.set(p as usize - 1, true);
    }
    if sample.has_positive_label() {
        return finite_fallback(points, sample.labels(), instance);
    }
    let mut out = bitvec![u64, Lsb0; 0; size];
    for i in seen.iter_zeros().take(instance.d()) {
        out.set(i, true);
    }
    Ok(out)
}

fn finite_fallback(
    points: &[u32],
    labels: &[bool],
    instance: &FiniteHardInstance,
) -> Result<FiniteIndicator> {
    let size = instance.domain_size();
    let mut ones = bitvec![u64, Lsb0; 0; size];
    let mut zeros = bitvec![u64, Lsb0; 0; size];
    for (&p, &label) in points.iter().zip(labels) {
        if label {
            ones.set(p as usize - 1, true);
        } else {
            zeros.set(p as usize - 1, true);
        }
    }
    if (ones.clone() & &zeros).any() {
        return Err(Error::NoConsistentHypothesis("a point carries both labels".into()));
    }
    if ones.count_ones() > instance.d() {
        return Err(Error::NoConsistentHypothesis(format!(
            "{} distinct 1-labeled points exceed d = {}",
            ones.count_ones(),
            instance.d()
        )));
    }
    Ok(ones)
}

/// The all-zeros hypothesis on the instance's domain.
pub fn zero_erm(sample: SampleView<'_>, instance: &Instance) -> Result<Hypothesis> {
    if sample.kind() != instance.kind() {
        return Err(Error::DomainMismatch("sample and instance domains differ".into()));
    }
    if sample.has_positive_label() {
        return Err(Error::NoConsistentHypothesis(
            "the zero ERM cannot fit 1-labels".into(),
        ));
    }
    Ok(Hypothesis::zero_for(instance))
}

/// Which ERM to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErmKind {
    Zero,
    MaxOnes,
    Adversarial,
}

impl ErmKind {
    pub fn name(&self) -> &'static str {
        match self {
            ErmKind::Zero => "zero",
            ErmKind::MaxOnes => "max_ones",
            ErmKind::Adversarial => "adversarial",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "zero" => Some(ErmKind::Zero),
            "max_ones" => Some(ErmKind::MaxOnes),
            "adversarial" => Some(ErmKind::Adversarial),
            _ => None,
        }
    }

    /// Whether this ERM is defined on the given domain.
    pub fn supports(&self, kind: DomainKind) -> bool {
        match self {
            ErmKind::Zero => true,
            ErmKind::MaxOnes => kind == DomainKind::Finite,
            ErmKind::Adversarial => kind == DomainKind::Interval,
        }
    }

    pub fn fit(&self, sample: SampleView<'_>, instance: &Instance) -> Result<Fit> {
        match (self, instance) {
            (ErmKind::Zero, _) => Ok(Fit::plain(zero_erm(sample, instance)?)),
            (ErmKind::MaxOnes, Instance::Finite(f)) => {
                Ok(Fit::plain(Hypothesis::Finite(max_ones_erm(sample, f)?)))
            }
            (ErmKind::Adversarial, Instance::Interval(inst)) => {
                let fit = adversarial_interval_erm(sample, inst.d(), inst.c())?;
                Ok(Fit {
                    hypothesis: Hypothesis::Interval(fit.hypothesis),
                    selection: Some(fit.selection),
                    scheme: Some(fit.scheme),
                })
            }
            _ => Err(Error::DomainMismatch(format!(
                "ERM {} is not defined on the {:?} domain",
                self.name(),
                instance.kind()
            ))),
        }
    }
}

impl fmt::Display for ErmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One ERM output plus the adversarial ERM's index sets when available.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub hypothesis: Hypothesis,
    pub selection: Option<IndexSelection>,
    pub scheme: Option<PartitionScheme>,
}

impl Fit {
    fn plain(hypothesis: Hypothesis) -> Self {
        Self {
            hypothesis,
            selection: None,
            scheme: None,
        }
    }
}
