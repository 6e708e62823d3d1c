//! Error functionals under the uniform distribution and the all-zeros target.
//!
//! With the zero target the error region of a hypothesis is its support, so
//! the exact error is the Lebesgue measure of the support (interval domain)
//! or the fraction of ones (finite domain).

use rand::Rng;

use crate::erms::{ErmKind, Hypothesis};
use crate::error::{Error, Result};
use crate::geometry::IntervalSet;
use crate::instances::{DomainPoint, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMethod {
    Exact,
    MonteCarlo { samples: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub value: f64,
    pub method: ErrorMethod,
}

fn check_domain(h: &Hypothesis, instance: &Instance) -> Result<()> {
    match (h, instance) {
        (Hypothesis::Interval(_), Instance::Interval(_)) => Ok(()),
        (Hypothesis::Finite(bits), Instance::Finite(f)) if bits.len() == f.domain_size() => Ok(()),
        _ => Err(Error::DomainMismatch(format!(
            "{:?} hypothesis on a {:?} instance",
            h.kind(),
            instance.kind()
        ))),
    }
}

/// `err_P(h)` for the uniform `P` and zero target.
pub fn exact_error(h: &Hypothesis, instance: &Instance) -> Result<f64> {
    check_domain(h, instance)?;
    Ok(match h {
        Hypothesis::Interval(s) => s.measure(),
        Hypothesis::Finite(bits) => bits.count_ones() as f64 / bits.len() as f64,
    })
}

/// Probability that both hypotheses err on the same draw.
pub fn joint_error(h1: &Hypothesis, h2: &Hypothesis, instance: &Instance) -> Result<f64> {
    check_domain(h1, instance)?;
    check_domain(h2, instance)?;
    Ok(match (h1, h2) {
        (Hypothesis::Interval(a), Hypothesis::Interval(b)) => a.intersect(b).measure(),
        (Hypothesis::Finite(a), Hypothesis::Finite(b)) => {
            (a.clone() & b).count_ones() as f64 / a.len() as f64
        }
        _ => unreachable!("domains checked above"),
    })
}

/// Error under the uniform distribution conditioned on `region`.
pub fn conditional_error(h: &Hypothesis, region: &IntervalSet, instance: &Instance) -> Result<f64> {
    check_domain(h, instance)?;
    let Hypothesis::Interval(support) = h else {
        return Err(Error::DomainMismatch(
            "conditional error needs an interval hypothesis".into(),
        ));
    };
    let mass = region.measure();
    if mass <= 0.0 {
        return Err(Error::ZeroMassRegion);
    }
    Ok(support.intersect(region).measure() / mass)
}

/// Fraction of `samples` fresh test draws on which `h` disagrees with the target.
pub fn monte_carlo_error<R: Rng + ?Sized>(
    h: &Hypothesis,
    instance: &Instance,
    samples: usize,
    rng: &mut R,
) -> Result<ErrorReport> {
    check_domain(h, instance)?;
    if samples == 0 {
        return Err(Error::InvalidParameter("monte carlo needs at least one sample".into()));
    }
    let mut wrong = 0usize;
    for _ in 0..samples {
        let x = instance.draw_point(rng);
        if h.eval(x)? != instance.target(x) {
            wrong += 1;
        }
    }
    Ok(ErrorReport {
        value: wrong as f64 / samples as f64,
        method: ErrorMethod::MonteCarlo { samples },
    })
}

/// Unbiased estimate of `p_x`: the chance that the ERM trained on a fresh
/// `n`-sample misclassifies `x`.
pub fn estimate_pointwise_mistake_prob<R: Rng + ?Sized>(
    x: DomainPoint,
    instance: &Instance,
    erm: ErmKind,
    n: usize,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let mut wrong = 0usize;
    for _ in 0..trials {
        let sample = instance.draw_sample(n, rng);
        let fit = erm.fit(sample.view(), instance)?;
        if fit.hypothesis.eval(x)? != instance.target(x) {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{FiniteHardInstance, IntervalHardInstance};
    use bitvec::prelude::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn interval_inst() -> Instance {
        Instance::Interval(IntervalHardInstance::new(1, 1.0).unwrap())
    }

    fn iv(raw: &[(f64, f64)]) -> Hypothesis {
        Hypothesis::Interval(IntervalSet::normalize(raw.iter().copied()).unwrap())
    }

    #[test]
    fn exact_error_basics() {
        let inst = interval_inst();
        assert_eq!(exact_error(&iv(&[]), &inst).unwrap(), 0.0);
        let h = iv(&[(0.1, 0.13), (0.5, 0.54)]);
        assert!((exact_error(&h, &inst).unwrap() - 0.07).abs() < 1e-15);

        let fin = Instance::Finite(FiniteHardInstance::new(30, 3).unwrap());
        let mut bits = bitvec![u64, Lsb0; 0; 30];
        for i in [2, 7, 29] {
            bits.set(i, true);
        }
        assert!((exact_error(&Hypothesis::Finite(bits), &fin).unwrap() - 0.1).abs() < 1e-15);
        assert!(exact_error(&h, &fin).is_err());
    }

    #[test]
    fn joint_error_basics() {
        let inst = interval_inst();
        let h = iv(&[(0.1, 0.3)]);
        assert_eq!(joint_error(&h, &h, &inst).unwrap(), exact_error(&h, &inst).unwrap());
        assert_eq!(joint_error(&h, &iv(&[(0.3, 0.9)]), &inst).unwrap(), 0.0);
    }

    #[test]
    fn conditional_error_basics() {
        let inst = interval_inst();
        let h = iv(&[(0.1, 0.3)]);
        let full = IntervalSet::full();
        assert_eq!(conditional_error(&h, &full, &inst).unwrap(), exact_error(&h, &inst).unwrap());
        let r = IntervalSet::normalize([(0.0, 0.5)]).unwrap();
        let c = conditional_error(&h, &r, &inst).unwrap();
        assert!((c - 0.2 / 0.5).abs() < 1e-15);
        assert_eq!(
            conditional_error(&h, &IntervalSet::empty(), &inst),
            Err(Error::ZeroMassRegion)
        );
    }

    #[test]
    fn monte_carlo_empty_hypothesis_is_zero() {
        let inst = interval_inst();
        let r = monte_carlo_error(&iv(&[]), &inst, 1000, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.method, ErrorMethod::MonteCarlo { samples: 1000 });
        let a = monte_carlo_error(&iv(&[(0.2, 0.6)]), &inst, 500, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = monte_carlo_error(&iv(&[(0.2, 0.6)]), &inst, 500, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn monte_carlo_converges_to_exact() {
        let inst = interval_inst();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for samples in [1_000usize, 10_000, 100_000] {
            for _ in 0..20 {
                let lo: f64 = rng.random_range(0.0..0.5);
                let h = iv(&[(lo, lo + rng.random_range(0.01..0.5))]);
                let p = exact_error(&h, &inst).unwrap();
                let mc = monte_carlo_error(&h, &inst, samples, &mut rng).unwrap().value;
                let sigma = (p * (1.0 - p) / samples as f64).sqrt();
                assert!((mc - p).abs() <= 4.0 * sigma, "p = {p}, mc = {mc}");
            }
        }
    }

    #[test]
    fn pointwise_mistake_prob_ranges() {
        let inst = interval_inst();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z = estimate_pointwise_mistake_prob(DomainPoint::Real(0.3), &inst, ErmKind::Zero, 50, 50, &mut rng).unwrap();
        assert_eq!(z, 0.0);
        let fin = Instance::Finite(FiniteHardInstance::new(20, 2).unwrap());
        let p = estimate_pointwise_mistake_prob(DomainPoint::Index(1), &fin, ErmKind::MaxOnes, 30, 200, &mut rng).unwrap();
        assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn pointwise_average_matches_expected_error() {
        // Fubini: the average of p_x over the domain equals E[err].
        let fin_inst = FiniteHardInstance::new(12, 2).unwrap();
        let inst = Instance::Finite(fin_inst);
        let (n, trials) = (20, 20_000);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let avg_px: f64 = (1..=12u32)
            .map(|i| {
                estimate_pointwise_mistake_prob(DomainPoint::Index(i), &inst, ErmKind::MaxOnes, n, trials, &mut rng)
                    .unwrap()
            })
            .sum::<f64>()
            / 12.0;
        let mean_err: f64 = (0..trials)
            .map(|_| {
                let s = inst.draw_sample(n, &mut rng);
                let h = ErmKind::MaxOnes.fit(s.view(), &inst).unwrap().hypothesis;
                exact_error(&h, &inst).unwrap()
            })
            .sum::<f64>()
            / trials as f64;
        assert!((avg_px - mean_err).abs() < 0.01, "{avg_px} vs {mean_err}");
    }

    fn arb_set() -> impl Strategy<Value = IntervalSet> {
        prop::collection::vec((0.0f64..1.0, 0.001f64..0.3), 0..5).prop_map(|raw| {
            IntervalSet::normalize(raw.into_iter().map(|(lo, w)| (lo, (lo + w).min(1.0)))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn joint_error_is_measure_of_intersection(a in arb_set(), b in arb_set()) {
            let inst = interval_inst();
            let j = joint_error(&Hypothesis::Interval(a.clone()), &Hypothesis::Interval(b.clone()), &inst).unwrap();
            prop_assert_eq!(j, a.intersect(&b).measure());
        }

        #[test]
        fn total_probability_over_partition(a in arb_set(), cuts in prop::collection::vec(0.01f64..0.99, 1..6)) {
            let inst = interval_inst();
            let h = Hypothesis::Interval(a);
            let mut edges = cuts;
            edges.push(0.0);
            edges.push(1.0);
            edges.sort_by(f64::total_cmp);
            edges.dedup();
            let total: f64 = edges.windows(2).map(|w| {
                let r = IntervalSet::normalize([(w[0], w[1])]).unwrap();
                r.measure() * conditional_error(&h, &r, &inst).unwrap()
            }).sum();
            prop_assert!((total - exact_error(&h, &inst).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn conditional_of_conditional(a in arb_set(), r in arb_set(), b in arb_set()) {
            // (P_R)_B = P_{R ∩ B}
            let inst = interval_inst();
            let rb = r.intersect(&b);
            prop_assume!(rb.measure() > 1e-9);
            let h = Hypothesis::Interval(a.clone());
            let direct = conditional_error(&h, &rb, &inst).unwrap();
            // P_R(h ∩ B) / P_R(B)
            let p_r = |s: &IntervalSet| s.intersect(&r).measure() / r.measure();
            let composed = p_r(&a.intersect(&b)) / p_r(&b);
            prop_assert!((direct - composed).abs() < 1e-9);
        }

        #[test]
        fn contained_support_scales(lo in 0.0f64..0.4, w in 0.01f64..0.2) {
            let inst = interval_inst();
            let h = iv(&[(lo, lo + w)]);
            let r = IntervalSet::normalize([(0.0, 0.7)]).unwrap();
            let c = conditional_error(&h, &r, &inst).unwrap();
            prop_assert!((c - exact_error(&h, &inst).unwrap() / r.measure()).abs() < 1e-12);
        }
    }
}
