//! Hard instances: domains, the uniform distribution, the all-zeros target,
//! and i.i.d. sample generation.
//!
//! Two constructions are provided:
//!
//! * [`FiniteHardInstance`]: uniform distribution over `{1..N}`, class of all
//!   functions with at most `d` ones. A max-ones ERM on this instance errs on
//!   the order of `d ln(n/d) / n`.
//! * [`IntervalHardInstance`]: uniform distribution on (0, 1], class of unions
//!   of at most `2d` half-open intervals (VC dimension `4d`; not checked at
//!   runtime), paired with the grid-based adversarial ERM in [`crate::erms`].

use std::ops::Range;

use rand::Rng;

use crate::error::{Error, Result};

/// Domain-size multiplier for the finite hard instance.
///
/// The number of uncovered points after `n` uniform draws from `N` points is
/// about `N (d/n)^(1/scale)` when `N = scale * n / ln(n/d)`. For `scale = 1`
/// that is below one, so the bad ERM rarely has anything to pick; `scale = 2`
/// leaves order `sqrt(n d) / ln(n/d)` uncovered points and keeps the error at
/// `d / N`.
pub const DOMAIN_SCALE: f64 = 2.0;

/// Shipped construction constant for the interval instance, the smallest power
/// of two certified by [`crate::stats::pilot_select_c`] at `m = 600, d = 1`.
pub const DEFAULT_C: f64 = 1.0;

/// `max(d + 1, ceil(DOMAIN_SCALE * n / max(1, ln(n/d))))`.
pub fn finite_domain_size(n: usize, d: usize) -> Result<usize> {
    finite_domain_size_scaled(n, d, DOMAIN_SCALE)
}

/// Domain size with an explicit multiplier; the log is floored at 1 so the
/// size is nondecreasing in `n`.
pub fn finite_domain_size_scaled(n: usize, d: usize, scale: f64) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    if n < 2 * d {
        return Err(Error::InvalidParameter(format!(
            "finite instance needs n >= 2d (n = {n}, d = {d})"
        )));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("domain scale {scale} must be positive")));
    }
    let log = (n as f64 / d as f64).ln().max(1.0);
    let size = (scale * n as f64 / log).ceil() as usize;
    Ok(size.max(d + 1))
}

/// A point of either domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainPoint {
    /// A real in (0, 1].
    Real(f64),
    /// A 1-based index into `{1..N}`.
    Index(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Interval,
    Finite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteHardInstance {
    domain_size: usize,
    d: usize,
}

impl FiniteHardInstance {
    pub fn new(domain_size: usize, d: usize) -> Result<Self> {
        if d == 0 || d > domain_size || domain_size > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "finite instance needs 1 <= d <= N (N = {domain_size}, d = {d})"
            )));
        }
        Ok(Self { domain_size, d })
    }

    /// The instance sized for ERMs trained on `n` points.
    pub fn for_sample_size(n: usize, d: usize) -> Result<Self> {
        Self::new(finite_domain_size(n, d)?, d)
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalHardInstance {
    d: usize,
    c: f64,
}

impl IntervalHardInstance {
    pub fn new(d: usize, c: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("d must be at least 1".into()));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("C = {c} must be positive")));
        }
        Ok(Self { d, c })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// Either hard instance. The target is the all-zeros function in both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Instance {
    Finite(FiniteHardInstance),
    Interval(IntervalHardInstance),
}

impl Instance {
    pub fn kind(&self) -> DomainKind {
        match self {
            Instance::Finite(_) => DomainKind::Finite,
            Instance::Interval(_) => DomainKind::Interval,
        }
    }

    pub fn d(&self) -> usize {
        match self {
            Instance::Finite(f) => f.d(),
            Instance::Interval(i) => i.d(),
        }
    }

    pub fn target(&self, _x: DomainPoint) -> bool {
        false
    }

    /// One draw from the instance's uniform distribution.
    pub fn draw_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DomainPoint {
        match self {
            Instance::Finite(f) => DomainPoint::Index(draw_index(f.domain_size, rng)),
            Instance::Interval(_) => DomainPoint::Real(draw_unit(rng)),
        }
    }

    /// `n` i.i.d. uniform draws labeled by the all-zeros target.
    pub fn draw_sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Sample {
        let points = match self {
            Instance::Finite(f) => {
                Points::Finite((0..n).map(|_| draw_index(f.domain_size, rng)).collect())
            }
            Instance::Interval(_) => Points::Real((0..n).map(|_| draw_unit(rng)).collect()),
        };
        Sample {
            points,
            labels: vec![false; n],
        }
    }
}

/// Uniform on (0, 1]: `1 - u` for `u` uniform on the 53-bit grid of [0, 1).
pub(crate) fn draw_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

pub(crate) fn draw_index<R: Rng + ?Sized>(domain_size: usize, rng: &mut R) -> u32 {
    rng.random_range(1..=domain_size as u32)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Points {
    Real(Vec<f64>),
    Finite(Vec<u32>),
}

/// A labeled training sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    points: Points,
    labels: Vec<bool>,
}

impl Sample {
    pub fn new(points: Points, labels: Vec<bool>) -> Result<Self> {
        let len = match &points {
            Points::Real(p) => p.len(),
            Points::Finite(p) => p.len(),
        };
        if len != labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{len} points but {} labels",
                labels.len()
            )));
        }
        if let Points::Real(p) = &points {
            if let Some(&x) = p.iter().find(|x| !(**x > 0.0 && **x <= 1.0)) {
                return Err(Error::PointOutOfRange(x));
            }
        }
        Ok(Self { points, labels })
    }

    /// Points in (0, 1] labeled by the zero target.
    pub fn zero_labeled_reals(points: Vec<f64>) -> Result<Self> {
        let n = points.len();
        Self::new(Points::Real(points), vec![false; n])
    }

    pub fn zero_labeled_indices(points: Vec<u32>) -> Self {
        let n = points.len();
        Self {
            points: Points::Finite(points),
            labels: vec![false; n],
        }
    }

    pub fn points(&self) -> &Points {
        &self.points
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn view(&self) -> SampleView<'_> {
        let points = match &self.points {
            Points::Real(p) => PointsRef::Real(p),
            Points::Finite(p) => PointsRef::Finite(p),
        };
        SampleView {
            points,
            labels: &self.labels,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointsRef<'a> {
    Real(&'a [f64]),
    Finite(&'a [u32]),
}

/// Borrowed, contiguous slice of a [`Sample`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleView<'a> {
    points: PointsRef<'a>,
    labels: &'a [bool],
}

impl<'a> SampleView<'a> {
    pub fn points(&self) -> PointsRef<'a> {
        self.points
    }

    pub fn labels(&self) -> &'a [bool] {
        self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn kind(&self) -> DomainKind {
        match self.points {
            PointsRef::Real(_) => DomainKind::Interval,
            PointsRef::Finite(_) => DomainKind::Finite,
        }
    }

    pub fn slice(&self, range: Range<usize>) -> SampleView<'a> {
        let points = match self.points {
            PointsRef::Real(p) => PointsRef::Real(&p[range.clone()]),
            PointsRef::Finite(p) => PointsRef::Finite(&p[range.clone()]),
        };
        SampleView {
            points,
            labels: &self.labels[range],
        }
    }

    pub fn has_positive_label(&self) -> bool {
        self.labels.iter().any(|&l| l)
    }

    pub fn to_owned_sample(&self) -> Sample {
        let points = match self.points {
            PointsRef::Real(p) => Points::Real(p.to_vec()),
            PointsRef::Finite(p) => Points::Finite(p.to_vec()),
        };
        Sample {
            points,
            labels: self.labels.to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn domain_size_examples_at_unit_scale() {
        // ceil(1000 / ln 1000) = ceil(144.76)
        assert_eq!(finite_domain_size_scaled(1000, 1, 1.0).unwrap(), 145);
        // ln 2 < 1 is floored: max(3, ceil(4 / 1))
        assert_eq!(finite_domain_size_scaled(4, 2, 1.0).unwrap(), 4);
    }

    #[test]
    fn domain_size_shipped_scale() {
        assert_eq!(finite_domain_size(1000, 1).unwrap(), 290);
        assert_eq!(finite_domain_size(300, 1).unwrap(), 106);
        assert_eq!(finite_domain_size(10_000, 1).unwrap(), 2172);
    }

    #[test]
    fn domain_size_rejects_small_n() {
        assert!(finite_domain_size(3, 2).is_err());
        assert!(finite_domain_size(10, 0).is_err());
    }

    #[test]
    fn domain_size_is_monotone() {
        for d in [1usize, 3, 10, 50] {
            let mut prev = 0;
            let mut n = 2 * d;
            while n <= 1_000_000 {
                let size = finite_domain_size(n, d).unwrap();
                assert!(size >= prev, "d = {d}, n = {n}: {size} < {prev}");
                assert!(size > d);
                prev = size;
                n += if n < 10_000 { 1 } else { 97 };
            }
        }
    }

    #[test]
    fn draw_sample_is_reproducible() {
        let inst = Instance::Interval(IntervalHardInstance::new(1, 1.0).unwrap());
        let a = inst.draw_sample(100, &mut ChaCha8Rng::seed_from_u64(3));
        let b = inst.draw_sample(100, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        assert!(a.labels().iter().all(|&l| !l));
    }

    #[test]
    fn finite_draws_stay_in_domain() {
        let inst = Instance::Finite(FiniteHardInstance::new(7, 2).unwrap());
        let s = inst.draw_sample(5000, &mut ChaCha8Rng::seed_from_u64(1));
        let Points::Finite(p) = s.points() else { panic!() };
        assert!(p.iter().all(|&i| (1..=7).contains(&i)));
        assert!((1..=7).all(|i| p.contains(&i)));
    }

    #[test]
    fn uniform_mean_is_near_half() {
        let inst = Instance::Interval(IntervalHardInstance::new(1, 1.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 2500;
        for _ in 0..20 {
            let s = inst.draw_sample(n, &mut rng);
            let Points::Real(p) = s.points() else { panic!() };
            assert!(p.iter().all(|&x| x > 0.0 && x <= 1.0));
            let mean = p.iter().sum::<f64>() / n as f64;
            assert!((mean - 0.5).abs() < 4.0 / (n as f64).sqrt());
        }
    }

    #[test]
    fn sample_view_slices() {
        let s = Sample::zero_labeled_reals(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let v = s.view().slice(1..3);
        assert_eq!(v.points(), PointsRef::Real(&[0.2, 0.3]));
        assert_eq!(v.len(), 2);
        assert!(Sample::zero_labeled_reals(vec![0.0]).is_err());
    }
}
