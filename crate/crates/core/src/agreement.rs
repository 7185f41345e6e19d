//! Observed, chance, and chance-corrected token-level F1, and task difficulty.
//!
//! Token-level F1 is `2a / (a1 + a2)` where `a` counts tokens covered by both
//! annotations. With fixed profiles the denominator is constant, so the
//! expected F1 under random placement only needs `E[a]`, which is the sum over
//! tokens of the product of each annotator's coverage probability (annotators
//! are independent; one annotator's segments never share a token under the
//! non-overlapping model, and under the overlapping model coverage is summed
//! per segment pair).

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::annotation::PlacedAnnotation;
use crate::combinatorics::{
    location_distribution_with, overlapping_location_distribution, DistributionMode,
    DistributionOptions, LocationDistribution, SegmentProfile, SequenceSpec, DEFAULT_EXACT_LIMIT,
};
use crate::count::{ln_falling_factorial, ratio_to_f64, stable_sum};
use crate::error::{Error, Result};

/// Random annotation model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Segments of one annotator may share tokens; each start is independent and uniform.
    Overlapping,
    /// Segments of one annotator are disjoint; all placements equally likely.
    #[default]
    NonOverlapping,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Overlapping => "overlapping",
            Model::NonOverlapping => "non-overlapping",
        }
    }
}

/// Provenance of a chance estimate, ordered from most to least exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComputationMode {
    #[default]
    Exact,
    LogSpace,
    UniformApproximation,
    MonteCarlo,
}

impl ComputationMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ComputationMode::Exact => "exact",
            ComputationMode::LogSpace => "log-space",
            ComputationMode::UniformApproximation => "uniform-approximation",
            ComputationMode::MonteCarlo => "monte-carlo",
        }
    }

    fn of(mode: DistributionMode) -> Self {
        match mode {
            DistributionMode::Exact | DistributionMode::Overlapping | DistributionMode::Custom => {
                ComputationMode::Exact
            }
            DistributionMode::LogSpace => ComputationMode::LogSpace,
            DistributionMode::UniformApproximation => ComputationMode::UniformApproximation,
        }
    }
}

/// Model and arithmetic used for chance estimates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ChanceOptions {
    pub model: Model,
    pub distribution: DistributionOptions,
}

impl ChanceOptions {
    pub fn new(model: Model) -> Self {
        ChanceOptions {
            model,
            ..Default::default()
        }
    }

    /// Exact arithmetic without the uniform approximation.
    pub fn exact(model: Model) -> Self {
        ChanceOptions {
            model,
            distribution: DistributionOptions::exact(),
        }
    }
}

/// Which reading of the single-gold difficulty to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DifficultyReading {
    /// Two independent randomizations of the gold profile.
    #[default]
    Symmetric,
    /// The gold annotation held fixed against one randomization of its profile.
    FixedGold,
}

/// Observed, chance and corrected agreement for one comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub observed_f1: f64,
    pub chance_f1: f64,
    /// `None` when chance agreement is 1 and the correction is undefined.
    pub corrected_f1: Option<f64>,
    pub difficulty: Option<f64>,
    pub model: Model,
    pub mode: ComputationMode,
}

/// Token-level F1 between two annotations of the same sequence; 1 when both are empty.
pub fn token_f1(ann1: &PlacedAnnotation, ann2: &PlacedAnnotation) -> Result<f64> {
    check_same_len(ann1.seq_len(), ann2.seq_len())?;
    let denom = ann1.covered() + ann2.covered();
    if denom == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * ann1.intersection(ann2) as f64 / denom as f64)
}

fn check_same_len(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::SequenceMismatch { left, right });
    }
    Ok(())
}

/// Expected number of tokens shared by two independently placed segments.
pub fn expected_pair_overlap(dist1: &LocationDistribution, dist2: &LocationDistribution) -> Result<f64> {
    check_same_len(dist1.seq_len(), dist2.seq_len())?;
    let (c1, c2) = (dist1.coverage(), dist2.coverage());
    Ok(stable_sum(c1.iter().zip(&c2).map(|(x, y)| x * y)))
}

/// Per-token probability that a random annotation with a given profile covers
/// the token, summed over segments.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCoverage {
    seq_len: usize,
    total_length: usize,
    values: CoverageValues,
    mode: ComputationMode,
}

#[derive(Debug, Clone, PartialEq)]
enum CoverageValues {
    Exact { numerators: Vec<BigUint>, denominator: BigUint },
    Float(Vec<f64>),
}

impl ProfileCoverage {
    pub fn compute(seq: SequenceSpec, profile: &SegmentProfile, options: &ChanceOptions) -> Result<Self> {
        if options.model == Model::NonOverlapping && !profile.is_feasible(seq) {
            return Err(Error::Infeasible {
                total: profile.total(),
                n: seq.len(),
            });
        }
        // Segments with equal length have identical marginals.
        let mut by_length: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for (j, &len) in profile.lengths().iter().enumerate() {
            by_length.entry(len).or_insert((j + 1, 0)).1 += 1;
        }
        let mut dists = Vec::with_capacity(by_length.len());
        for &(index, multiplicity) in by_length.values() {
            let dist = match options.model {
                Model::NonOverlapping => {
                    location_distribution_with(seq, profile, index, &options.distribution)?
                }
                Model::Overlapping => overlapping_location_distribution(seq, profile, index)?,
            };
            dists.push((dist, multiplicity));
        }
        let mode = dists
            .iter()
            .map(|(d, _)| ComputationMode::of(d.mode()))
            .max()
            .unwrap_or_default();
        let values = if dists.iter().all(|(d, _)| d.exact().is_some()) {
            let denominator = dists
                .iter()
                .fold(BigUint::one(), |acc, (d, _)| acc.lcm(&d.exact().unwrap().total.0));
            let mut numerators = vec![BigUint::zero(); seq.len()];
            for (d, mult) in &dists {
                let scale = &denominator / &d.exact().unwrap().total.0 * *mult as u64;
                for (acc, c) in numerators.iter_mut().zip(d.exact_coverage().unwrap()) {
                    *acc += c * &scale;
                }
            }
            CoverageValues::Exact { numerators, denominator }
        } else {
            let mut acc = vec![0.0; seq.len()];
            for (d, mult) in &dists {
                for (a, c) in acc.iter_mut().zip(d.coverage()) {
                    *a += c * *mult as f64;
                }
            }
            CoverageValues::Float(acc)
        };
        Ok(ProfileCoverage {
            seq_len: seq.len(),
            total_length: profile.total(),
            values,
            mode,
        })
    }

    pub fn total_length(&self) -> usize {
        self.total_length
    }

    pub fn mode(&self) -> ComputationMode {
        self.mode
    }

    /// Coverage as floats, one entry per token.
    pub fn values(&self) -> Vec<f64> {
        match &self.values {
            CoverageValues::Exact { numerators, denominator } => {
                numerators.iter().map(|x| ratio_to_f64(x, denominator)).collect()
            }
            CoverageValues::Float(v) => v.clone(),
        }
    }

    /// Expected intersection with another profile's random annotation.
    pub fn expected_intersection(&self, other: &ProfileCoverage) -> Result<f64> {
        check_same_len(self.seq_len, other.seq_len)?;
        Ok(self.weighted_dot(other, 1))
    }

    /// `scale * E[a]` with a single final rounding in the exact case.
    fn weighted_dot(&self, other: &ProfileCoverage, divisor: usize) -> f64 {
        match (&self.values, &other.values) {
            (
                CoverageValues::Exact { numerators: n1, denominator: d1 },
                CoverageValues::Exact { numerators: n2, denominator: d2 },
            ) => {
                let num: BigUint = n1.iter().zip(n2).map(|(x, y)| x * y).sum();
                ratio_to_f64(&num, &(d1 * d2 * divisor as u64))
            }
            _ => {
                let (c1, c2) = (self.values(), other.values());
                stable_sum(c1.iter().zip(&c2).map(|(x, y)| x * y)) / divisor as f64
            }
        }
    }

    /// Expected F1 against another profile's random annotation.
    pub fn chance_f1(&self, other: &ProfileCoverage) -> Result<f64> {
        check_same_len(self.seq_len, other.seq_len)?;
        let denom = self.total_length + other.total_length;
        if denom == 0 {
            return Ok(1.0);
        }
        if self.total_length == 0 || other.total_length == 0 {
            return Ok(0.0);
        }
        // 2 E[a] / (a1 + a2)
        Ok(2.0 * self.weighted_dot(other, denom))
    }

    /// Expected intersection with a fixed annotation.
    pub fn expected_intersection_fixed(&self, fixed: &PlacedAnnotation) -> Result<f64> {
        check_same_len(self.seq_len, fixed.seq_len())?;
        let mask = fixed.mask();
        match &self.values {
            CoverageValues::Exact { numerators, denominator } => {
                let num: BigUint = numerators
                    .iter()
                    .zip(&mask)
                    .filter(|(_, &m)| m)
                    .map(|(x, _)| x)
                    .sum();
                Ok(ratio_to_f64(&num, denominator))
            }
            CoverageValues::Float(v) => Ok(stable_sum(v.iter().zip(&mask).filter(|(_, &m)| m).map(|(x, _)| *x))),
        }
    }
}

/// Chance estimate with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChanceEstimate {
    pub chance_f1: f64,
    pub expected_intersection: f64,
    pub mode: ComputationMode,
}

/// Expected F1 between two independent random annotations with the given profiles.
pub fn chance_f1(
    seq: SequenceSpec,
    profile1: &SegmentProfile,
    profile2: &SegmentProfile,
    model: Model,
) -> Result<f64> {
    Ok(chance_f1_with(seq, profile1, profile2, &ChanceOptions::new(model))?.chance_f1)
}

pub fn chance_f1_with(
    seq: SequenceSpec,
    profile1: &SegmentProfile,
    profile2: &SegmentProfile,
    options: &ChanceOptions,
) -> Result<ChanceEstimate> {
    let c1 = ProfileCoverage::compute(seq, profile1, options)?;
    let c2 = if profile1 == profile2 {
        c1.clone()
    } else {
        ProfileCoverage::compute(seq, profile2, options)?
    };
    Ok(ChanceEstimate {
        chance_f1: c1.chance_f1(&c2)?,
        expected_intersection: c1.expected_intersection(&c2)?,
        mode: c1.mode.max(c2.mode),
    })
}

/// Kappa-style correction `(observed - chance) / (1 - chance)`; may be negative.
pub fn corrected_f1(observed: f64, chance: f64) -> Result<f64> {
    if chance >= 1.0 {
        return Err(Error::DegenerateChance);
    }
    Ok((observed - chance) / (1.0 - chance))
}

/// Task difficulty: one minus the average chance agreement over all ordered
/// pairs of profiles (a single profile is paired with itself).
pub fn difficulty(seq: SequenceSpec, profiles: &[SegmentProfile], model: Model) -> Result<f64> {
    difficulty_with(seq, profiles, &ChanceOptions::new(model))
}

pub fn difficulty_with(seq: SequenceSpec, profiles: &[SegmentProfile], options: &ChanceOptions) -> Result<f64> {
    if profiles.is_empty() {
        return Err(Error::NoProfiles);
    }
    let coverages = profiles
        .iter()
        .map(|p| ProfileCoverage::compute(seq, p, options))
        .collect::<Result<Vec<_>>>()?;
    let v = coverages.len();
    let mut terms = Vec::with_capacity(v * v);
    for c1 in &coverages {
        for c2 in &coverages {
            terms.push(c1.chance_f1(c2)?);
        }
    }
    Ok(1.0 - stable_sum(terms) / (v * v) as f64)
}

/// Difficulty under the fixed-gold reading: one minus the expected F1 of the
/// gold annotation against one random annotation with the gold profile.
pub fn difficulty_against_fixed(gold: &PlacedAnnotation, options: &ChanceOptions) -> Result<f64> {
    if gold.is_empty() {
        return Ok(0.0);
    }
    let coverage = ProfileCoverage::compute(gold.seq(), &gold.profile(), options)?;
    let expected = coverage.expected_intersection_fixed(gold)?;
    Ok(1.0 - expected / gold.covered() as f64)
}

/// Probability that two independent random annotations share no token:
/// `π(n-a1-a2+k1+k2, k1+k2) / π(n-a1+k1, k1) / π(n-a2+k2, k2)`.
pub fn zero_agreement_probability(seq: SequenceSpec, profile1: &SegmentProfile, profile2: &SegmentProfile) -> f64 {
    let n = seq.len();
    let (a1, a2) = (profile1.total(), profile2.total());
    let (k1, k2) = (profile1.k() as u64, profile2.k() as u64);
    if a1 + a2 > n {
        return 0.0;
    }
    let joint = (n - a1 - a2) as u64 + k1 + k2;
    let s1 = (n - a1) as u64 + k1;
    let s2 = (n - a2) as u64 + k2;
    if s1.max(s2) as usize <= DEFAULT_EXACT_LIMIT {
        use crate::count::falling_factorial;
        let num = falling_factorial(joint, k1 + k2);
        let den = falling_factorial(s1, k1) * falling_factorial(s2, k2);
        num.ratio(&den)
    } else {
        (ln_falling_factorial(joint, k1 + k2) - ln_falling_factorial(s1, k1) - ln_falling_factorial(s2, k2)).exp()
    }
}

/// Full report for two annotations of one sequence. The first annotation
/// plays the gold role for the difficulty value.
pub fn evaluate_pair(
    gold: &PlacedAnnotation,
    other: &PlacedAnnotation,
    options: &ChanceOptions,
) -> Result<AgreementReport> {
    let observed = token_f1(gold, other)?;
    let seq = gold.seq();
    let (p1, p2) = (gold.profile(), other.profile());
    let c1 = ProfileCoverage::compute(seq, &p1, options)?;
    let c2 = ProfileCoverage::compute(seq, &p2, options)?;
    let chance = c1.chance_f1(&c2)?;
    let self_chance = c1.chance_f1(&c1)?;
    Ok(AgreementReport {
        observed_f1: observed,
        chance_f1: chance,
        corrected_f1: corrected_f1(observed, chance).ok(),
        difficulty: Some(1.0 - self_chance),
        model: options.model,
        mode: c1.mode.max(c2.mode),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::Span;
    use crate::combinatorics::location_distribution;

    fn seq(n: usize) -> SequenceSpec {
        SequenceSpec::new(n).unwrap()
    }

    fn prof(l: &[usize]) -> SegmentProfile {
        SegmentProfile::new(l.to_vec()).unwrap()
    }

    fn ann(n: usize, spans: &[(usize, usize)]) -> PlacedAnnotation {
        PlacedAnnotation::new(seq(n), spans.iter().map(|&(s, l)| Span::new(s, l)).collect()).unwrap()
    }

    /// Direct double sum over both start indices.
    fn naive_pair_overlap(d1: &LocationDistribution, d2: &LocationDistribution) -> f64 {
        let mut acc = 0.0;
        for l1 in 1..=d1.support_len() {
            for l2 in 1..=d2.support_len() {
                let ov = Span::new(l1, d1.segment_length()).overlap(&Span::new(l2, d2.segment_length()));
                acc += d1.prob(l1) * d2.prob(l2) * ov as f64;
            }
        }
        acc
    }

    #[test]
    fn token_f1_examples() {
        let a = ann(20, &[(4, 2), (9, 3), (15, 4)]);
        let b = ann(20, &[(3, 3), (9, 4), (15, 5)]);
        assert!((token_f1(&a, &b).unwrap() - 0.8571).abs() < 5e-5);
        assert_eq!(token_f1(&a, &a).unwrap(), 1.0);
        let e = PlacedAnnotation::empty(seq(20));
        assert_eq!(token_f1(&e, &e).unwrap(), 1.0);
        assert_eq!(token_f1(&a, &e).unwrap(), 0.0);
        assert_eq!(
            token_f1(&a, &PlacedAnnotation::empty(seq(21))),
            Err(Error::SequenceMismatch { left: 20, right: 21 })
        );
    }

    #[test]
    fn pair_overlap_examples() {
        let u = LocationDistribution::from_probs(seq(10), 1, vec![0.1; 10]).unwrap();
        assert!((expected_pair_overlap(&u, &u).unwrap() - 0.1).abs() < 1e-15);

        let p1 = LocationDistribution::point_mass(seq(10), 3, 1).unwrap();
        let p2 = LocationDistribution::point_mass(seq(10), 3, 2).unwrap();
        assert_eq!(expected_pair_overlap(&p1, &p2).unwrap(), 2.0);

        let d9 = location_distribution(seq(20), &prof(&[9]), 1).unwrap();
        let d12 = location_distribution(seq(20), &prof(&[12]), 1).unwrap();
        let e = expected_pair_overlap(&d9, &d12).unwrap();
        assert!((e - naive_pair_overlap(&d9, &d12)).abs() < 1e-12);
        // chance_f1 = 2 E / 21
        assert!((2.0 * e / 21.0 - 0.6455).abs() < 5e-5);

        let other = LocationDistribution::point_mass(seq(11), 3, 1).unwrap();
        assert!(expected_pair_overlap(&p1, &other).is_err());
    }

    #[test]
    fn pair_overlap_matches_double_sum() {
        let p = prof(&[1, 5, 10, 15]);
        let q = prof(&[3, 7]);
        for i in 1..=4 {
            for j in 1..=2 {
                let d1 = location_distribution(seq(60), &p, i).unwrap();
                let d2 = location_distribution(seq(60), &q, j).unwrap();
                let fast = expected_pair_overlap(&d1, &d2).unwrap();
                assert!((fast - naive_pair_overlap(&d1, &d2)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chance_examples_from_tables() {
        let nm = Model::NonOverlapping;
        let c = chance_f1(seq(20), &prof(&[2, 3, 4]), &prof(&[3, 4, 5]), nm).unwrap();
        assert!((c - 0.5335).abs() < 5e-5, "{c}");
        let c = chance_f1(seq(30), &prof(&[2, 3, 4]), &prof(&[3, 4, 5]), nm).unwrap();
        assert!((c - 0.3544).abs() < 5e-5, "{c}");
        let c = chance_f1(seq(20), &prof(&[3]), &prof(&[4]), nm).unwrap();
        assert!((c - 0.1830).abs() < 5e-5, "{c}");
    }

    #[test]
    fn chance_empty_conventions() {
        let e = SegmentProfile::empty();
        let m = Model::NonOverlapping;
        assert_eq!(chance_f1(seq(5), &e, &e, m).unwrap(), 1.0);
        assert_eq!(chance_f1(seq(5), &e, &prof(&[2]), m).unwrap(), 0.0);
        assert_eq!(chance_f1(seq(5), &prof(&[2]), &e, m).unwrap(), 0.0);
        assert_eq!(
            chance_f1(seq(4), &prof(&[3, 3]), &prof(&[1]), m),
            Err(Error::Infeasible { total: 6, n: 4 })
        );
        // The overlapping model tolerates a > n as long as each segment fits.
        assert!(chance_f1(seq(4), &prof(&[3, 3]), &prof(&[1]), Model::Overlapping).is_ok());
    }

    #[test]
    fn models_agree_for_single_segments() {
        for n in [5, 13, 40] {
            let a = chance_f1(seq(n), &prof(&[3]), &prof(&[4]), Model::NonOverlapping).unwrap();
            let b = chance_f1(seq(n), &prof(&[3]), &prof(&[4]), Model::Overlapping).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn corrected_examples() {
        // Inputs are 4-decimal roundings, so the outputs only match to ~1e-4.
        assert!((corrected_f1(0.8571, 0.5335).unwrap() - 0.6938).abs() < 5e-4);
        assert!((corrected_f1(0.6808, 0.5437).unwrap() - 0.3005).abs() < 5e-4);
        assert_eq!(corrected_f1(0.42, 0.0).unwrap(), 0.42);
        assert!(corrected_f1(0.1, 0.5).unwrap() < 0.0);
        assert_eq!(corrected_f1(1.0, 1.0), Err(Error::DegenerateChance));
    }

    #[test]
    fn difficulty_examples() {
        let m = Model::NonOverlapping;
        let p = prof(&[2, 3, 4]);
        let single = difficulty(seq(20), std::slice::from_ref(&p), m).unwrap();
        let self_chance = chance_f1(seq(20), &p, &p, m).unwrap();
        assert_eq!(single, 1.0 - self_chance);
        let double = difficulty(seq(20), &[p.clone(), p.clone()], m).unwrap();
        assert!((single - double).abs() < 1e-15);
        assert!(difficulty(seq(10), &[prof(&[10])], m).unwrap().abs() < 1e-15);
        assert_eq!(difficulty(seq(10), &[], m), Err(Error::NoProfiles));
    }

    #[test]
    fn fixed_gold_difficulty_for_single_segment_matches_symmetric() {
        // With k = 1 both readings average over a uniform start.
        let gold = ann(20, &[(5, 3)]);
        let opts = ChanceOptions::exact(Model::NonOverlapping);
        let fixed = difficulty_against_fixed(&gold, &opts).unwrap();
        // Fixed gold at 5..7: expected overlap with a uniform length-3 segment.
        let d = location_distribution(seq(20), &prof(&[3]), 1).unwrap();
        let g = LocationDistribution::point_mass(seq(20), 3, 5).unwrap();
        let expected = 1.0 - expected_pair_overlap(&g, &d).unwrap() / 3.0;
        assert!((fixed - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_agreement_examples() {
        let p = zero_agreement_probability(seq(2), &prof(&[1]), &prof(&[1]));
        assert_eq!(p, 0.5);
        assert_eq!(zero_agreement_probability(seq(4), &prof(&[3]), &prof(&[2])), 0.0);
        let xs: Vec<f64> = [20, 200, 2000, 20000]
            .iter()
            .map(|&n| zero_agreement_probability(seq(n), &prof(&[2, 3]), &prof(&[3])))
            .collect();
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert!(xs[3] < 1.0 && xs[3] > 0.999);
    }

    #[test]
    fn evaluate_pair_reports_sim1() {
        let a = ann(20, &[(4, 2), (9, 3), (15, 4)]);
        let b = ann(20, &[(3, 3), (9, 4), (15, 5)]);
        let r = evaluate_pair(&a, &b, &ChanceOptions::default()).unwrap();
        assert!((r.observed_f1 - 0.8571).abs() < 5e-5);
        assert!((r.chance_f1 - 0.5335).abs() < 5e-5);
        assert!((r.corrected_f1.unwrap() - 0.6938).abs() < 5e-5);
        assert_eq!(r.mode, ComputationMode::Exact);
    }
}
