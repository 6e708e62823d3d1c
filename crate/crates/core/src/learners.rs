//! Aggregation schemes built from a single ERM.
//!
//! Pieces are contiguous blocks of the input sample in order: piece `p` of
//! `k` covers indices `p*t .. (p+1)*t` with `t = len / k`. The Simon prefix
//! learner trains on the nested prefixes of length `t`, `2t` and `3t`.

use std::fmt;

use rand::Rng;

use crate::erms::{ErmKind, Fit, Hypothesis};
use crate::error::{Error, Result};
use crate::instances::{Instance, Points, Sample, SampleView};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnerKind {
    Single,
    Maj3Disjoint,
    SimonPrefix,
    MajKDisjoint { k: usize },
    Bagging { bags: usize, bag_size: Option<usize> },
}

impl LearnerKind {
    pub fn name(&self) -> String {
        match self {
            LearnerKind::Single => "single".into(),
            LearnerKind::Maj3Disjoint => "maj3".into(),
            LearnerKind::SimonPrefix => "simon".into(),
            LearnerKind::MajKDisjoint { k } => format!("maj{k}"),
            LearnerKind::Bagging { bags, .. } => format!("bagging{bags}"),
        }
    }

    /// How many pieces of size `t` make up the learner's training sample.
    pub fn pieces(&self) -> usize {
        match self {
            LearnerKind::Single | LearnerKind::Bagging { .. } => 1,
            LearnerKind::Maj3Disjoint | LearnerKind::SimonPrefix => 3,
            LearnerKind::MajKDisjoint { k } => *k,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LearnerKind::MajKDisjoint { k } if k % 2 == 0 || k == 0 => Err(
                Error::InvalidParameter(format!("maj_k needs odd k, got {k}")),
            ),
            LearnerKind::Bagging { bags, .. } if bags % 2 == 0 => Err(Error::InvalidParameter(
                format!("bagging needs an odd number of bags, got {bags}"),
            )),
            LearnerKind::Bagging {
                bag_size: Some(0), ..
            } => Err(Error::InvalidParameter("bag_size must be positive".into())),
            _ => Ok(()),
        }
    }
}

/// A learner: aggregation scheme plus the ERM it runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LearnerSpec {
    pub kind: LearnerKind,
    pub erm: ErmKind,
}

impl fmt::Display for LearnerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.kind.name(), self.erm)
    }
}

/// The combined hypothesis together with every voter's fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerOutput {
    pub hypothesis: Hypothesis,
    pub voters: Vec<Fit>,
}

impl LearnerSpec {
    pub fn new(kind: LearnerKind, erm: ErmKind) -> Result<Self> {
        kind.validate()?;
        Ok(Self { kind, erm })
    }

    /// Runs the learner. `rng` is only consumed by bagging.
    pub fn fit<R: Rng + ?Sized>(
        &self,
        sample: SampleView<'_>,
        instance: &Instance,
        rng: &mut R,
    ) -> Result<LearnerOutput> {
        match self.kind {
            LearnerKind::Single => learn_single(sample, self.erm, instance),
            LearnerKind::Maj3Disjoint => learn_maj3_disjoint(sample, self.erm, instance),
            LearnerKind::SimonPrefix => learn_simon_prefix(sample, self.erm, instance),
            LearnerKind::MajKDisjoint { k } => learn_maj_k_disjoint(sample, self.erm, instance, k),
            LearnerKind::Bagging { bags, bag_size } => learn_bagging(
                sample,
                self.erm,
                instance,
                bags,
                bag_size.unwrap_or(sample.len()),
                rng,
            ),
        }
    }
}

pub fn learn_single(sample: SampleView<'_>, erm: ErmKind, instance: &Instance) -> Result<LearnerOutput> {
    if sample.is_empty() {
        return Err(Error::InvalidParameter("single ERM needs a nonempty sample".into()));
    }
    let fit = erm.fit(sample, instance)?;
    Ok(LearnerOutput {
        hypothesis: fit.hypothesis.clone(),
        voters: vec![fit],
    })
}

fn piece_len(len: usize, pieces: usize) -> Result<usize> {
    if len % pieces != 0 {
        return Err(Error::IndivisibleSample { len, pieces });
    }
    Ok(len / pieces)
}

fn vote(voters: Vec<Fit>) -> Result<LearnerOutput> {
    let refs: Vec<&Hypothesis> = voters.iter().map(|f| &f.hypothesis).collect();
    let hypothesis = Hypothesis::majority(&refs)?;
    Ok(LearnerOutput { hypothesis, voters })
}

/// Majority of the ERM trained on each of three disjoint thirds.
pub fn learn_maj3_disjoint(
    sample: SampleView<'_>,
    erm: ErmKind,
    instance: &Instance,
) -> Result<LearnerOutput> {
    learn_maj_k_disjoint(sample, erm, instance, 3)
}

/// Majority of the ERM trained on the first third, two thirds and everything.
pub fn learn_simon_prefix(
    sample: SampleView<'_>,
    erm: ErmKind,
    instance: &Instance,
) -> Result<LearnerOutput> {
    let t = piece_len(sample.len(), 3)?;
    let voters = (1..=3)
        .map(|p| erm.fit(sample.slice(0..p * t), instance))
        .collect::<Result<Vec<_>>>()?;
    vote(voters)
}

/// Majority of the ERM trained on each of `k` disjoint contiguous pieces.
pub fn learn_maj_k_disjoint(
    sample: SampleView<'_>,
    erm: ErmKind,
    instance: &Instance,
    k: usize,
) -> Result<LearnerOutput> {
    LearnerKind::MajKDisjoint { k }.validate()?;
    let t = piece_len(sample.len(), k)?;
    let voters = (0..k)
        .map(|p| erm.fit(sample.slice(p * t..(p + 1) * t), instance))
        .collect::<Result<Vec<_>>>()?;
    vote(voters)
}

/// Majority of the ERM trained on `bags` resamples (with replacement).
pub fn learn_bagging<R: Rng + ?Sized>(
    sample: SampleView<'_>,
    erm: ErmKind,
    instance: &Instance,
    bags: usize,
    bag_size: usize,
    rng: &mut R,
) -> Result<LearnerOutput> {
    LearnerKind::Bagging {
        bags,
        bag_size: Some(bag_size),
    }
    .validate()?;
    if sample.is_empty() {
        return Err(Error::InvalidParameter("bagging needs a nonempty sample".into()));
    }
    let owned = sample.to_owned_sample();
    let voters = (0..bags)
        .map(|_| {
            let picks: Vec<usize> = (0..bag_size).map(|_| rng.random_range(0..owned.len())).collect();
            let bag = resample(&owned, &picks);
            erm.fit(bag.view(), instance)
        })
        .collect::<Result<Vec<_>>>()?;
    vote(voters)
}

fn resample(sample: &Sample, picks: &[usize]) -> Sample {
    let points = match sample.points() {
        Points::Real(p) => Points::Real(picks.iter().map(|&i| p[i]).collect()),
        Points::Finite(p) => Points::Finite(picks.iter().map(|&i| p[i]).collect()),
    };
    let labels = picks.iter().map(|&i| sample.labels()[i]).collect();
    Sample::new(points, labels).expect("resampled points come from a valid sample")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erms::build_partition;
    use crate::geometry::majority3;
    use crate::instances::{FiniteHardInstance, IntervalHardInstance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn interval(d: usize, c: f64) -> Instance {
        Instance::Interval(IntervalHardInstance::new(d, c).unwrap())
    }

    fn interval_support(h: &Hypothesis) -> &crate::geometry::IntervalSet {
        match h {
            Hypothesis::Interval(s) => s,
            _ => panic!("expected interval hypothesis"),
        }
    }

    #[test]
    fn single_zero_is_empty() {
        let inst = interval(1, 1.0);
        let s = inst.draw_sample(30, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(learn_single(s.view(), ErmKind::Zero, &inst).unwrap().hypothesis.is_zero());
    }

    #[test]
    fn maj3_rejects_indivisible() {
        let inst = interval(1, 1.0);
        let s = inst.draw_sample(31, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(
            learn_maj3_disjoint(s.view(), ErmKind::Zero, &inst),
            Err(Error::IndivisibleSample { len: 31, pieces: 3 })
        ));
        assert!(learn_simon_prefix(s.view(), ErmKind::Zero, &inst).is_err());
    }

    #[test]
    fn maj3_of_identical_pieces_is_the_piece_fit() {
        let inst = interval(1, 1.0);
        let piece = inst.draw_sample(200, &mut ChaCha8Rng::seed_from_u64(9));
        let crate::instances::Points::Real(p) = piece.points() else { unreachable!() };
        let tripled = Sample::zero_labeled_reals(p.iter().chain(p).chain(p).copied().collect()).unwrap();
        let out = learn_maj3_disjoint(tripled.view(), ErmKind::Adversarial, &inst).unwrap();
        let single = learn_single(piece.view(), ErmKind::Adversarial, &inst).unwrap();
        assert_eq!(out.hypothesis, single.hypothesis);
    }

    #[test]
    fn maj3_error_region_is_majority_of_supports() {
        let inst = interval(2, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let s = inst.draw_sample(90, &mut rng);
            let out = learn_maj3_disjoint(s.view(), ErmKind::Adversarial, &inst).unwrap();
            let sup: Vec<_> = out.voters.iter().map(|f| interval_support(&f.hypothesis)).collect();
            let m = majority3(sup[0], sup[1], sup[2]);
            assert_eq!(interval_support(&out.hypothesis), &m);
            let pairwise = sup[0].intersect(sup[1]).measure()
                + sup[0].intersect(sup[2]).measure()
                + sup[1].intersect(sup[2]).measure();
            assert!(m.measure() <= pairwise + 1e-15);
        }
    }

    #[test]
    fn maj_k_one_and_three() {
        let inst = interval(1, 1.0);
        let s = inst.draw_sample(300, &mut ChaCha8Rng::seed_from_u64(12));
        let k1 = learn_maj_k_disjoint(s.view(), ErmKind::Adversarial, &inst, 1).unwrap();
        assert_eq!(k1.hypothesis, learn_single(s.view(), ErmKind::Adversarial, &inst).unwrap().hypothesis);
        let k3 = learn_maj_k_disjoint(s.view(), ErmKind::Adversarial, &inst, 3).unwrap();
        assert_eq!(k3, learn_maj3_disjoint(s.view(), ErmKind::Adversarial, &inst).unwrap());
        assert!(learn_maj_k_disjoint(s.view(), ErmKind::Zero, &inst, 2).is_err());
    }

    #[test]
    fn maj_k_finite_matches_pointwise_vote() {
        let fin = FiniteHardInstance::new(40, 3).unwrap();
        let inst = Instance::Finite(fin);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let s = inst.draw_sample(5 * 30, &mut rng);
            let out = learn_maj_k_disjoint(s.view(), ErmKind::MaxOnes, &inst, 5).unwrap();
            let Hypothesis::Finite(bits) = &out.hypothesis else { unreachable!() };
            for i in 1..=40u32 {
                let votes = out
                    .voters
                    .iter()
                    .filter(|f| f.hypothesis.eval(crate::instances::DomainPoint::Index(i)).unwrap())
                    .count();
                assert_eq!(bits[i as usize - 1], votes >= 3);
            }
        }
    }

    #[test]
    fn simon_prefix_uses_nested_prefixes() {
        let inst = interval(1, 1.0);
        let s = inst.draw_sample(600, &mut ChaCha8Rng::seed_from_u64(8));
        let out = learn_simon_prefix(s.view(), ErmKind::Adversarial, &inst).unwrap();
        let ms: Vec<usize> = out.voters.iter().map(|f| f.scheme.unwrap().m).collect();
        assert_eq!(ms, vec![200, 400, 600]);
        for (p, voter) in out.voters.iter().enumerate() {
            let direct = ErmKind::Adversarial.fit(s.view().slice(0..(p + 1) * 200), &inst).unwrap();
            assert_eq!(&direct, voter);
        }
        assert!(learn_simon_prefix(s.view(), ErmKind::Zero, &inst).unwrap().hypothesis.is_zero());
    }

    #[test]
    fn simon_error_floor_when_l1_is_full() {
        let (d, c, t) = (1, 1.0, 300);
        let inst = interval(d, c);
        let scheme = build_partition(2 * t, d, c).unwrap();
        let floor = d as f64 / (scheme.m1 * scheme.m2) as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let mut checked = 0;
        for _ in 0..300 {
            let s = inst.draw_sample(3 * t, &mut rng);
            let out = learn_simon_prefix(s.view(), ErmKind::Adversarial, &inst).unwrap();
            let l1 = out.voters[1].selection.as_ref().unwrap().l1.len();
            let err = interval_support(&out.hypothesis).measure();
            assert!(err >= l1 as f64 / (scheme.m1 * scheme.m2) as f64 * (1.0 - 1e-12));
            if l1 == d {
                checked += 1;
                assert!(err >= floor * (1.0 - 1e-12));
            }
        }
        assert!(checked > 200);
    }

    #[test]
    fn bagging_rules() {
        let inst = interval(1, 1.0);
        let s = inst.draw_sample(100, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(learn_bagging(s.view(), ErmKind::Zero, &inst, 2, 100, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
        let z = learn_bagging(s.view(), ErmKind::Zero, &inst, 5, 100, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(z.hypothesis.is_zero());
        let a = learn_bagging(s.view(), ErmKind::Adversarial, &inst, 3, 100, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
        let b = learn_bagging(s.view(), ErmKind::Adversarial, &inst, 3, 100, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
        assert_eq!(a, b);
        let one = learn_bagging(s.view(), ErmKind::Adversarial, &inst, 1, 100, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
        assert_eq!(one.voters.len(), 1);
        assert_eq!(one.hypothesis, one.voters[0].hypothesis);
    }
}
