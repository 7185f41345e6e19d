//! Counting random non-overlapping span placements and the marginal
//! placement distribution of each span.
//!
//! A profile of `k` segments with lengths `a_1..a_k` (total `a`) on a
//! sequence of `n` tokens has `π(n-a+k, k)` equally likely placements,
//! segments being distinguishable. Fixing segment `i` at start `l` splits the
//! remaining segments into a left group of `m` segments and a right group of
//! `k-m-1`; the count only depends on `m` and the total length `s` of the
//! left group, so the sum over subsets collapses into a table indexed by
//! `(m, s)`.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::count::{
    binomial_signed, factorial_big, falling_factorial, falling_factorial_signed, stable_sum,
    BigCount, LnFactorials,
};
use crate::error::{Error, Result};

/// Default size bound (`n - a + k`) above which automatic arithmetic uses
/// log space instead of exact integers.
pub const DEFAULT_EXACT_LIMIT: usize = 2000;

/// Default threshold for the uniform approximation.
pub const DEFAULT_ALPHA: f64 = 0.99;

/// A token sequence of length `n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SequenceSpec {
    n: usize,
}

impl SequenceSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySequence);
        }
        Ok(SequenceSpec { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The ordered segment lengths one annotator used on one sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SegmentProfile {
    lengths: Vec<usize>,
}

impl SegmentProfile {
    pub fn new(lengths: Vec<usize>) -> Result<Self> {
        if let Some(index) = lengths.iter().position(|&x| x == 0) {
            return Err(Error::ZeroLengthSegment { index: index + 1 });
        }
        Ok(SegmentProfile { lengths })
    }

    pub fn empty() -> Self {
        SegmentProfile { lengths: Vec::new() }
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Number of segments.
    pub fn k(&self) -> usize {
        self.lengths.len()
    }

    /// Total annotated length.
    pub fn total(&self) -> usize {
        self.lengths.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    /// Length of segment `i` (1-based).
    pub fn length(&self, i: usize) -> Result<usize> {
        self.check_index(i)?;
        Ok(self.lengths[i - 1])
    }

    pub fn is_feasible(&self, seq: SequenceSpec) -> bool {
        self.total() <= seq.len()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.k() {
            return Err(Error::SegmentIndex { index: i, k: self.k() });
        }
        Ok(())
    }

    fn check_feasible(&self, seq: SequenceSpec) -> Result<()> {
        if !self.is_feasible(seq) {
            return Err(Error::Infeasible {
                total: self.total(),
                n: seq.len(),
            });
        }
        Ok(())
    }

    /// Size of the compressed slot space, `n - a + k`.
    pub(crate) fn slots(&self, seq: SequenceSpec) -> usize {
        seq.len() + self.k() - self.total()
    }
}

/// Number of placements of the whole profile, `π(n-a+k, k)`.
pub fn total_configurations(seq: SequenceSpec, profile: &SegmentProfile) -> BigCount {
    if !profile.is_feasible(seq) {
        return BigCount::zero();
    }
    falling_factorial(profile.slots(seq) as u64, profile.k() as u64)
}

/// `counts[m][s]`: number of size-`m` subsets of the lengths other than the
/// excluded segment whose lengths sum to `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetLengthTable {
    counts: Vec<Vec<BigCount>>,
}

impl SubsetLengthTable {
    /// Largest subset size (`k - 1`).
    pub fn max_size(&self) -> usize {
        self.counts.len() - 1
    }

    /// Largest subset total (`a - a_i`).
    pub fn max_total(&self) -> usize {
        self.counts[0].len() - 1
    }

    pub fn get(&self, m: usize, s: usize) -> &BigCount {
        &self.counts[m][s]
    }

    pub fn rows(&self) -> &[Vec<BigCount>] {
        &self.counts
    }

    /// Sum of every entry; always `2^(k-1)`.
    pub fn grand_total(&self) -> BigCount {
        self.counts.iter().flatten().sum()
    }
}

/// Subset-sum counting table over the lengths other than segment `excluded` (1-based).
pub fn subset_length_table(profile: &SegmentProfile, excluded: usize) -> Result<SubsetLengthTable> {
    profile.check_index(excluded)?;
    let others = other_lengths(profile, excluded);
    let width = others.iter().sum::<usize>() + 1;
    let mut counts = vec![vec![BigUint::zero(); width]; others.len() + 1];
    counts[0][0] = BigUint::from(1u32);
    for (seen, &len) in others.iter().enumerate() {
        for m in (0..=seen).rev() {
            for s in (0..width - len).rev() {
                if !counts[m][s].is_zero() {
                    let v = counts[m][s].clone();
                    counts[m + 1][s + len] += v;
                }
            }
        }
    }
    Ok(SubsetLengthTable {
        counts: counts
            .into_iter()
            .map(|row| row.into_iter().map(BigCount).collect())
            .collect(),
    })
}

fn other_lengths(profile: &SegmentProfile, excluded: usize) -> Vec<usize> {
    profile
        .lengths()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j + 1 != excluded)
        .map(|(_, &x)| x)
        .collect()
}

/// Log-space subset table: `ln counts[m][s]`, `-inf` for empty cells.
fn ln_subset_table(others: &[usize]) -> Vec<Vec<f64>> {
    let width = others.iter().sum::<usize>() + 1;
    let mut table = vec![vec![f64::NEG_INFINITY; width]; others.len() + 1];
    table[0][0] = 0.0;
    for (seen, &len) in others.iter().enumerate() {
        for m in (0..=seen).rev() {
            for s in (0..width - len).rev() {
                let v = table[m][s];
                if v > f64::NEG_INFINITY {
                    let cell = &mut table[m + 1][s + len];
                    *cell = ln_add(*cell, v);
                }
            }
        }
    }
    table
}

fn ln_add(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Shared per-segment quantities for evaluating the placement formula.
struct Placement<'a> {
    n: i64,
    k: i64,
    total: i64,
    profile: &'a SegmentProfile,
    index: usize,
}

impl<'a> Placement<'a> {
    fn new(seq: SequenceSpec, profile: &'a SegmentProfile, index: usize) -> Result<Self> {
        profile.check_index(index)?;
        profile.check_feasible(seq)?;
        Ok(Placement {
            n: seq.len() as i64,
            k: profile.k() as i64,
            total: profile.total() as i64,
            profile,
            index,
        })
    }

    fn length(&self) -> usize {
        self.profile.lengths()[self.index - 1]
    }

    fn support(&self) -> usize {
        self.n as usize - self.length() + 1
    }

    /// Number of free tokens left of the fixed segment minus the left group.
    fn left_free(&self, l: i64, s: i64) -> i64 {
        l - 1 - s
    }

    /// Number of free tokens right of the fixed segment minus the right group.
    fn right_free(&self, l: i64, s: i64) -> i64 {
        self.n - l - self.total + s + 1
    }
}

struct ExactEvaluator<'a> {
    placement: Placement<'a>,
    table: SubsetLengthTable,
    factorials: Vec<BigUint>,
}

impl<'a> ExactEvaluator<'a> {
    fn new(seq: SequenceSpec, profile: &'a SegmentProfile, index: usize) -> Result<Self> {
        let placement = Placement::new(seq, profile, index)?;
        let table = subset_length_table(profile, index)?;
        let factorials = (0..profile.k() as u64).map(factorial_big).collect();
        Ok(ExactEvaluator {
            placement,
            table,
            factorials,
        })
    }

    fn count(&self, l: usize) -> BigUint {
        let p = &self.placement;
        let l = l as i64;
        let mut acc = BigUint::zero();
        for (m, row) in self.table.rows().iter().enumerate() {
            let mi = m as i64;
            for (s, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let si = s as i64;
                let left = p.left_free(l, si);
                let right = p.right_free(l, si);
                if left < 0 || right < 0 {
                    continue;
                }
                // m! * C(left + m, m) orders the left group and spreads its gaps;
                // π(right + k-m-1, k-m-1) does the same on the right.
                let ways_left = binomial_signed(left + mi, mi);
                let ways_right = falling_factorial_signed(right + p.k - mi - 1, p.k - mi - 1);
                acc += c.as_biguint() * &self.factorials[m] * ways_left * ways_right;
            }
        }
        acc
    }
}

struct LogEvaluator<'a> {
    placement: Placement<'a>,
    table: Vec<Vec<f64>>,
    lnf: LnFactorials,
    ln_total: f64,
}

impl<'a> LogEvaluator<'a> {
    fn new(seq: SequenceSpec, profile: &'a SegmentProfile, index: usize) -> Result<Self> {
        let placement = Placement::new(seq, profile, index)?;
        let table = ln_subset_table(&other_lengths(profile, index));
        let lnf = LnFactorials::new(seq.len() + profile.k() + 1);
        let ln_total = lnf.ln_falling(profile.slots(seq) as i64, profile.k() as i64);
        Ok(LogEvaluator {
            placement,
            table,
            lnf,
            ln_total,
        })
    }

    fn probability(&self, l: usize) -> f64 {
        let p = &self.placement;
        let l = l as i64;
        let mut terms = Vec::new();
        for (m, row) in self.table.iter().enumerate() {
            let mi = m as i64;
            for (s, &c) in row.iter().enumerate() {
                if c == f64::NEG_INFINITY {
                    continue;
                }
                let si = s as i64;
                let left = p.left_free(l, si);
                let right = p.right_free(l, si);
                if left < 0 || right < 0 {
                    continue;
                }
                let ln_term = c
                    + self.lnf.ln_factorial(m)
                    + self.lnf.ln_binomial(left + mi, mi)
                    + self.lnf.ln_falling(right + p.k - mi - 1, p.k - mi - 1)
                    - self.ln_total;
                terms.push(ln_term.exp());
            }
        }
        stable_sum(terms)
    }
}

/// `Π(ST_i = l)`: placements of the whole profile with segment `i` starting at `l`.
pub fn location_count(
    seq: SequenceSpec,
    profile: &SegmentProfile,
    i: usize,
    l: usize,
) -> Result<BigCount> {
    let eval = ExactEvaluator::new(seq, profile, i)?;
    let max = eval.placement.support();
    if l == 0 || l > max {
        return Err(Error::StartOutOfSupport { start: l, max });
    }
    Ok(BigCount(eval.count(l)))
}

/// Start-index range (inclusive, 1-based) on which segment `i`'s placement
/// probability is constant, clamped to the support. `None` when empty.
pub fn flat_region(seq: SequenceSpec, profile: &SegmentProfile, i: usize) -> Result<Option<(usize, usize)>> {
    let len = profile.length(i)?;
    profile.check_feasible(seq)?;
    let (n, a, k) = (seq.len() as i64, profile.total() as i64, profile.k() as i64);
    let lo = (a - len as i64 - k + 2).max(1);
    let hi = (n - a + k).min(n - len as i64 + 1);
    Ok((lo <= hi).then_some((lo as usize, hi as usize)))
}

/// How a distribution was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistributionMode {
    /// Exact integer counts.
    Exact,
    /// Non-overlapping formula evaluated in log space.
    LogSpace,
    /// Uniform stand-in for a nearly flat non-overlapping distribution.
    UniformApproximation,
    /// Closed-form uniform distribution of the overlapping model.
    Overlapping,
    /// Supplied directly by the caller.
    Custom,
}

/// Exact per-start counts with their common denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMass {
    pub counts: Vec<BigCount>,
    pub total: BigCount,
}

/// Marginal distribution of one segment's start index.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationDistribution {
    segment_index: usize,
    segment_length: usize,
    seq_len: usize,
    probs: Vec<f64>,
    exact: Option<ExactMass>,
    flat_region: Option<(usize, usize)>,
    mode: DistributionMode,
}

impl LocationDistribution {
    /// Builds a distribution from caller-supplied probabilities over starts `1..=n-len+1`.
    pub fn from_probs(seq: SequenceSpec, segment_length: usize, probs: Vec<f64>) -> Result<Self> {
        if segment_length == 0 {
            return Err(Error::ZeroLengthSegment { index: 1 });
        }
        if segment_length > seq.len() {
            return Err(Error::SegmentTooLong {
                length: segment_length,
                n: seq.len(),
            });
        }
        let support = seq.len() - segment_length + 1;
        if probs.len() != support {
            return Err(Error::InvalidDistribution(format!(
                "expected {support} probabilities, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::InvalidDistribution("negative or NaN probability".into()));
        }
        let sum = stable_sum(probs.iter().copied());
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {sum}")));
        }
        Ok(LocationDistribution {
            segment_index: 1,
            segment_length,
            seq_len: seq.len(),
            probs,
            exact: None,
            flat_region: None,
            mode: DistributionMode::Custom,
        })
    }

    /// All mass on start `l`.
    pub fn point_mass(seq: SequenceSpec, segment_length: usize, l: usize) -> Result<Self> {
        let support = seq.len().checked_sub(segment_length).map(|x| x + 1).unwrap_or(0);
        if l == 0 || l > support {
            return Err(Error::StartOutOfSupport { start: l, max: support });
        }
        let mut probs = vec![0.0; support];
        probs[l - 1] = 1.0;
        Self::from_probs(seq, segment_length, probs)
    }

    fn uniform(seq: SequenceSpec, index: usize, length: usize, mode: DistributionMode) -> Self {
        let support = seq.len() - length + 1;
        LocationDistribution {
            segment_index: index,
            segment_length: length,
            seq_len: seq.len(),
            probs: vec![1.0 / support as f64; support],
            exact: Some(ExactMass {
                counts: vec![BigCount::one(); support],
                total: BigCount::from(support as u64),
            }),
            flat_region: Some((1, support)),
            mode,
        }
    }

    pub fn segment_index(&self) -> usize {
        self.segment_index
    }

    pub fn segment_length(&self) -> usize {
        self.segment_length
    }

    pub fn seq_len(&self) -> usize {
        self.seq_len
    }

    /// Number of feasible starts, `n - a_i + 1`.
    pub fn support_len(&self) -> usize {
        self.probs.len()
    }

    /// Probabilities indexed by `start - 1`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `p(ST_i = l)` for a 1-based start; 0 outside the support.
    pub fn prob(&self, l: usize) -> f64 {
        if l == 0 {
            return 0.0;
        }
        self.probs.get(l - 1).copied().unwrap_or(0.0)
    }

    pub fn exact(&self) -> Option<&ExactMass> {
        self.exact.as_ref()
    }

    pub fn flat_region(&self) -> Option<(usize, usize)> {
        self.flat_region
    }

    pub fn mode(&self) -> DistributionMode {
        self.mode
    }

    /// Probability that each token (index `t-1`) is covered by this segment.
    pub fn coverage(&self) -> Vec<f64> {
        window_sums(&self.probs, self.segment_length, self.seq_len, 0.0, |a, b| a + b, |a, b| a - b)
    }

    /// Exact coverage counts over the distribution's denominator.
    pub fn exact_coverage(&self) -> Option<Vec<BigUint>> {
        let mass = self.exact.as_ref()?;
        let counts: Vec<BigUint> = mass.counts.iter().map(|c| c.0.clone()).collect();
        Some(window_sums(
            &counts,
            self.segment_length,
            self.seq_len,
            BigUint::zero(),
            |a, b| a + b,
            |a, b| a - b,
        ))
    }

    /// Same distribution with the support reversed (start `l` maps to `n - a_i + 2 - l`).
    pub fn mirrored(&self) -> Self {
        let mut out = self.clone();
        out.probs.reverse();
        if let Some(mass) = out.exact.as_mut() {
            mass.counts.reverse();
        }
        let support = self.support_len();
        out.flat_region = self.flat_region.map(|(lo, hi)| (support + 1 - hi, support + 1 - lo));
        out
    }
}

/// Sliding-window sums: entry `t` sums starts `max(1, t-len+1)..=min(t, support)`.
fn window_sums<T: Clone>(
    mass: &[T],
    len: usize,
    n: usize,
    zero: T,
    add: impl Fn(&T, &T) -> T,
    sub: impl Fn(&T, &T) -> T,
) -> Vec<T> {
    let mut out = Vec::with_capacity(n);
    let mut window = zero;
    for t in 1..=n {
        if let Some(v) = mass.get(t - 1) {
            window = add(&window, v);
        }
        if t > len {
            if let Some(v) = mass.get(t - len - 1) {
                window = sub(&window, v);
            }
        }
        out.push(window.clone());
    }
    out
}

/// Arithmetic used for non-overlapping distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Arithmetic {
    /// Exact integers while `n - a + k <= exact_limit`, log space above.
    Auto { exact_limit: usize },
    Exact,
    Log,
}

impl Default for Arithmetic {
    fn default() -> Self {
        Arithmetic::Auto {
            exact_limit: DEFAULT_EXACT_LIMIT,
        }
    }
}

impl Arithmetic {
    fn use_exact(&self, seq: SequenceSpec, profile: &SegmentProfile) -> bool {
        match *self {
            Arithmetic::Exact => true,
            Arithmetic::Log => false,
            Arithmetic::Auto { exact_limit } => profile.slots(seq) <= exact_limit,
        }
    }
}

/// Options for computing a non-overlapping distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionOptions {
    pub arithmetic: Arithmetic,
    /// Substitute a uniform distribution when the approximation test passes at this threshold.
    pub approx_alpha: Option<f64>,
}

impl Default for DistributionOptions {
    fn default() -> Self {
        DistributionOptions {
            arithmetic: Arithmetic::default(),
            approx_alpha: Some(DEFAULT_ALPHA),
        }
    }
}

impl DistributionOptions {
    /// Exact integer arithmetic, never approximating.
    pub fn exact() -> Self {
        DistributionOptions {
            arithmetic: Arithmetic::Exact,
            approx_alpha: None,
        }
    }
}

/// Exact placement distribution of segment `i` under the non-overlapping model.
pub fn location_distribution(
    seq: SequenceSpec,
    profile: &SegmentProfile,
    i: usize,
) -> Result<LocationDistribution> {
    location_distribution_with(seq, profile, i, &DistributionOptions::exact())
}

/// Placement distribution of segment `i` with configurable arithmetic and approximation.
pub fn location_distribution_with(
    seq: SequenceSpec,
    profile: &SegmentProfile,
    i: usize,
    options: &DistributionOptions,
) -> Result<LocationDistribution> {
    if profile.is_empty() {
        return Err(Error::EmptyProfile);
    }
    profile.check_index(i)?;
    profile.check_feasible(seq)?;
    if let Some(alpha) = options.approx_alpha {
        if uniform_approx_applicable(seq, profile, i, alpha)? {
            let len = profile.length(i)?;
            return Ok(LocationDistribution::uniform(
                seq,
                i,
                len,
                DistributionMode::UniformApproximation,
            ));
        }
    }
    if options.arithmetic.use_exact(seq, profile) {
        exact_distribution(seq, profile, i)
    } else {
        log_distribution(seq, profile, i)
    }
}

/// Starts whose values must be evaluated: everything outside the flat
/// region plus one representative inside it.
fn evaluation_plan(support: usize, flat: Option<(usize, usize)>) -> (Vec<usize>, Option<usize>) {
    match flat {
        Some((lo, hi)) => {
            let outside = (1..lo).chain(hi + 1..=support).collect();
            (outside, Some(lo))
        }
        None => ((1..=support).collect(), None),
    }
}

fn exact_distribution(seq: SequenceSpec, profile: &SegmentProfile, i: usize) -> Result<LocationDistribution> {
    let eval = ExactEvaluator::new(seq, profile, i)?;
    let support = eval.placement.support();
    let flat = flat_region(seq, profile, i)?;
    let (outside, representative) = evaluation_plan(support, flat);
    let mut counts = vec![BigUint::zero(); support];
    for l in outside {
        counts[l - 1] = eval.count(l);
    }
    if let (Some((lo, hi)), Some(rep)) = (flat, representative) {
        let value = eval.count(rep);
        for slot in &mut counts[lo - 1..hi] {
            *slot = value.clone();
        }
    }
    let total = total_configurations(seq, profile);
    let probs = counts.iter().map(|c| crate::count::ratio_to_f64(c, &total.0)).collect();
    Ok(LocationDistribution {
        segment_index: i,
        segment_length: profile.length(i)?,
        seq_len: seq.len(),
        probs,
        exact: Some(ExactMass {
            counts: counts.into_iter().map(BigCount).collect(),
            total,
        }),
        flat_region: flat,
        mode: DistributionMode::Exact,
    })
}

fn log_distribution(seq: SequenceSpec, profile: &SegmentProfile, i: usize) -> Result<LocationDistribution> {
    let eval = LogEvaluator::new(seq, profile, i)?;
    let support = eval.placement.support();
    let flat = flat_region(seq, profile, i)?;
    let (outside, representative) = evaluation_plan(support, flat);
    let mut probs = vec![0.0; support];
    for l in outside {
        probs[l - 1] = eval.probability(l);
    }
    if let (Some((lo, hi)), Some(rep)) = (flat, representative) {
        let value = eval.probability(rep);
        probs[lo - 1..hi].fill(value);
    }
    Ok(LocationDistribution {
        segment_index: i,
        segment_length: profile.length(i)?,
        seq_len: seq.len(),
        probs,
        exact: None,
        flat_region: flat,
        mode: DistributionMode::LogSpace,
    })
}

/// Placement distribution under the overlapping model: uniform over `1..=n-a_i+1`.
pub fn overlapping_location_distribution(
    seq: SequenceSpec,
    profile: &SegmentProfile,
    i: usize,
) -> Result<LocationDistribution> {
    let len = profile.length(i)?;
    if len > seq.len() {
        return Err(Error::SegmentTooLong { length: len, n: seq.len() });
    }
    Ok(LocationDistribution::uniform(seq, i, len, DistributionMode::Overlapping))
}

/// Whether `(n-a+k)/(n-a_i+1) > alpha`, i.e. segment `i`'s distribution is
/// close enough to uniform to replace it.
pub fn uniform_approx_applicable(
    seq: SequenceSpec,
    profile: &SegmentProfile,
    i: usize,
    alpha: f64,
) -> Result<bool> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let len = profile.length(i)?;
    profile.check_feasible(seq)?;
    let ratio = profile.slots(seq) as f64 / (seq.len() - len + 1) as f64;
    Ok(ratio > alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(n: usize) -> SequenceSpec {
        SequenceSpec::new(n).unwrap()
    }

    fn prof(l: &[usize]) -> SegmentProfile {
        SegmentProfile::new(l.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(SequenceSpec::new(0), Err(Error::EmptySequence));
        assert_eq!(
            SegmentProfile::new(vec![2, 0]),
            Err(Error::ZeroLengthSegment { index: 2 })
        );
    }

    #[test]
    fn total_configuration_examples() {
        assert_eq!(total_configurations(seq(7), &prof(&[3, 1])), BigCount::from(20));
        assert_eq!(total_configurations(seq(20), &prof(&[9])), BigCount::from(12));
        assert_eq!(total_configurations(seq(4), &prof(&[3, 3])), BigCount::zero());
        assert_eq!(total_configurations(seq(4), &SegmentProfile::empty()), BigCount::one());
    }

    #[test]
    fn subset_table_examples() {
        let t = subset_length_table(&prof(&[3, 1]), 1).unwrap();
        assert_eq!(t.get(0, 0), &BigCount::one());
        assert_eq!(t.get(1, 1), &BigCount::one());
        assert_eq!(t.get(0, 1), &BigCount::zero());

        let t = subset_length_table(&prof(&[2, 3, 4]), 2).unwrap();
        assert_eq!(t.get(0, 0), &BigCount::one());
        assert_eq!(t.get(1, 2), &BigCount::one());
        assert_eq!(t.get(1, 4), &BigCount::one());
        assert_eq!(t.get(2, 6), &BigCount::one());
        assert_eq!(t.grand_total(), BigCount::from(4));

        let t = subset_length_table(&prof(&[5]), 1).unwrap();
        assert_eq!(t.max_size(), 0);
        assert_eq!(t.max_total(), 0);
        assert_eq!(t.grand_total(), BigCount::one());

        assert_eq!(
            subset_length_table(&prof(&[5]), 2),
            Err(Error::SegmentIndex { index: 2, k: 1 })
        );
    }

    #[test]
    fn location_count_examples() {
        assert_eq!(location_count(seq(7), &prof(&[3, 1]), 1, 1).unwrap(), BigCount::from(4));
        assert_eq!(location_count(seq(7), &prof(&[3, 1]), 1, 3).unwrap(), BigCount::from(4));
        for l in 1..=8 {
            assert_eq!(location_count(seq(12), &prof(&[5]), 1, l).unwrap(), BigCount::one());
        }
        assert_eq!(
            location_count(seq(7), &prof(&[3, 1]), 1, 6),
            Err(Error::StartOutOfSupport { start: 6, max: 5 })
        );
        assert_eq!(
            location_count(seq(7), &prof(&[3, 1]), 1, 0),
            Err(Error::StartOutOfSupport { start: 0, max: 5 })
        );
    }

    #[test]
    fn distribution_examples() {
        let d = location_distribution(seq(7), &prof(&[3, 1]), 1).unwrap();
        assert_eq!(d.flat_region(), Some((1, 5)));
        for &p in d.probs() {
            assert!((p - 0.2).abs() < 1e-15);
        }
        let d = location_distribution(seq(12), &prof(&[5]), 1).unwrap();
        assert_eq!(d.support_len(), 8);
        assert!(d.probs().iter().all(|&p| p == 0.125));
        assert_eq!(d.mode(), DistributionMode::Exact);
    }

    #[test]
    fn distribution_errors() {
        assert_eq!(
            location_distribution(seq(4), &prof(&[3, 3]), 1),
            Err(Error::Infeasible { total: 6, n: 4 })
        );
        assert_eq!(
            location_distribution(seq(4), &SegmentProfile::empty(), 1),
            Err(Error::EmptyProfile)
        );
    }

    #[test]
    fn full_tiling_support() {
        // a = n: segment 1 of [2,3] on n=5 can only start at 1 or 4.
        let d = location_distribution(seq(5), &prof(&[2, 3]), 1).unwrap();
        assert_eq!(d.probs(), &[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(d.flat_region(), None);
    }

    #[test]
    fn overlapping_examples() {
        let d = overlapping_location_distribution(seq(20), &prof(&[5]), 1).unwrap();
        assert!(d.probs().iter().all(|&p| p == 1.0 / 16.0));
        let d = overlapping_location_distribution(seq(7), &prof(&[7]), 1).unwrap();
        assert_eq!(d.probs(), &[1.0]);
        let d = overlapping_location_distribution(seq(100), &prof(&[1]), 1).unwrap();
        assert!(d.probs().iter().all(|&p| p == 0.01));
        assert_eq!(
            overlapping_location_distribution(seq(4), &prof(&[5]), 1),
            Err(Error::SegmentTooLong { length: 5, n: 4 })
        );
    }

    #[test]
    fn uniform_approx_examples() {
        assert!(uniform_approx_applicable(seq(10000), &prof(&[3, 4]), 1, 0.99).unwrap());
        assert!(!uniform_approx_applicable(seq(20), &prof(&[2, 3, 4]), 1, 0.99).unwrap());
        assert!(uniform_approx_applicable(seq(50), &prof(&[5]), 1, 0.99).unwrap());
        assert_eq!(
            uniform_approx_applicable(seq(50), &prof(&[5]), 1, 1.0),
            Err(Error::InvalidAlpha(1.0))
        );
        assert!(uniform_approx_applicable(seq(50), &prof(&[5]), 1, 0.0).is_err());
    }

    #[test]
    fn approx_option_switches_mode() {
        let opts = DistributionOptions::default();
        let d = location_distribution_with(seq(10000), &prof(&[3, 4]), 1, &opts).unwrap();
        assert_eq!(d.mode(), DistributionMode::UniformApproximation);
        let d = location_distribution_with(seq(20), &prof(&[2, 3, 4]), 1, &opts).unwrap();
        assert_eq!(d.mode(), DistributionMode::Exact);
    }

    #[test]
    fn log_mode_matches_exact_on_four_segment_profile() {
        let p = prof(&[1, 5, 10, 15]);
        let log_opts = DistributionOptions {
            arithmetic: Arithmetic::Log,
            approx_alpha: None,
        };
        for i in 1..=4 {
            let exact = location_distribution(seq(100), &p, i).unwrap();
            let log = location_distribution_with(seq(100), &p, i, &log_opts).unwrap();
            assert_eq!(log.mode(), DistributionMode::LogSpace);
            for (a, b) in exact.probs().iter().zip(log.probs()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn auto_arithmetic_threshold() {
        let p = prof(&[2, 3]);
        let small = Arithmetic::Auto { exact_limit: 10 };
        assert!(small.use_exact(seq(8), &p));
        assert!(!small.use_exact(seq(20), &p));
    }

    #[test]
    fn coverage_sums_to_length() {
        let d = location_distribution(seq(30), &prof(&[2, 7, 4]), 2).unwrap();
        let cov = d.coverage();
        assert_eq!(cov.len(), 30);
        assert!((stable_sum(cov.iter().copied()) - 7.0).abs() < 1e-12);
        let exact = d.exact_coverage().unwrap();
        let total: BigUint = exact.iter().sum();
        assert_eq!(total, &d.exact().unwrap().total.0 * 7u32);
    }
}
