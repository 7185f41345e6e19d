//! Ground truth for the analytic formulas: exhaustive enumeration of every
//! placement for small instances, and an exactly uniform sampler for Monte
//! Carlo estimates.
//!
//! A placement of `k` distinguishable segments with total length `a` on `n`
//! tokens corresponds to a choice of `k` positions out of `n - a + k` slots
//! (each segment collapsed to one slot) together with an ordering of the
//! segments. Both the enumerator and the sampler walk this bijection, so
//! neither depends on the counting code in [`crate::combinatorics`].

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotation::{PlacedAnnotation, Span};
use crate::combinatorics::{total_configurations, SegmentProfile, SequenceSpec};
use crate::count::NeumaierSum;
use crate::error::{Error, Result};

/// Default cap on the number of configurations (or configuration pairs) visited.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Identifier of the generator behind every Monte Carlo estimate.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Independent generator streams per estimate. Fixed, so results do not
/// depend on the number of worker threads.
const MC_STREAMS: u64 = 64;

/// One placement: `starts[j]` is the 1-based start of segment `j + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub starts: Vec<usize>,
    lengths: Vec<usize>,
    seq_len: usize,
}

impl Configuration {
    pub fn to_annotation(&self) -> PlacedAnnotation {
        let spans = self
            .starts
            .iter()
            .zip(&self.lengths)
            .map(|(&s, &l)| Span::new(s, l))
            .collect();
        PlacedAnnotation::new(SequenceSpec::new(self.seq_len).unwrap(), spans)
            .expect("decoded placements are disjoint")
    }

    fn bits(&self) -> Bitset {
        let mut b = Bitset::new(self.seq_len);
        for (&s, &l) in self.starts.iter().zip(&self.lengths) {
            for t in s - 1..s - 1 + l {
                b.set(t);
            }
        }
        b
    }
}

/// Maps sorted 0-based slot positions and a segment order to segment starts.
fn decode(slots: &[usize], order: &[usize], lengths: &[usize], seq_len: usize) -> Configuration {
    let mut starts = vec![0; lengths.len()];
    let mut shift = 0;
    for (&slot, &seg) in slots.iter().zip(order) {
        starts[seg] = slot + shift + 1;
        shift += lengths[seg] - 1;
    }
    Configuration {
        starts,
        lengths: lengths.to_vec(),
        seq_len,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Bitset(Vec<u64>);

impl Bitset {
    fn new(n: usize) -> Self {
        Bitset(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, t: usize) {
        self.0[t / 64] |= 1 << (t % 64);
    }

    fn and_count(&self, other: &Bitset) -> u64 {
        self.0.iter().zip(&other.0).map(|(x, y)| (x & y).count_ones() as u64).sum()
    }
}

/// Stream over every placement of a profile, each exactly once.
pub struct ConfigurationIter {
    lengths: Vec<usize>,
    seq_len: usize,
    slots: usize,
    combo: Vec<usize>,
    order: Vec<usize>,
    done: bool,
}

impl Iterator for ConfigurationIter {
    type Item = Configuration;

    fn next(&mut self) -> Option<Configuration> {
        if self.done {
            return None;
        }
        let item = decode(&self.combo, &self.order, &self.lengths, self.seq_len);
        if !next_permutation(&mut self.order) {
            self.order.sort_unstable();
            if !next_combination(&mut self.combo, self.slots) {
                self.done = true;
            }
        }
        Some(item)
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

/// Every non-overlapping placement of the profile's distinguishable segments.
///
/// Infeasible profiles yield an empty stream; the empty profile yields the
/// single empty placement.
pub fn enumerate_configurations(
    seq: SequenceSpec,
    profile: &SegmentProfile,
    budget: u64,
) -> Result<ConfigurationIter> {
    let total = total_configurations(seq, profile);
    if total.to_u64().is_none_or(|t| t > budget) {
        return Err(Error::BudgetExceeded {
            required: total.to_string(),
            budget,
        });
    }
    let k = profile.k();
    let feasible = profile.is_feasible(seq);
    let slots = if feasible { profile.slots(seq) } else { 0 };
    Ok(ConfigurationIter {
        lengths: profile.lengths().to_vec(),
        seq_len: seq.len(),
        slots,
        combo: (0..k).collect(),
        order: (0..k).collect(),
        done: !feasible,
    })
}

/// Average token-level F1 over the full cross product of both profiles'
/// placements.
pub fn exact_expected_f1(
    seq: SequenceSpec,
    profile1: &SegmentProfile,
    profile2: &SegmentProfile,
    budget: u64,
) -> Result<f64> {
    for p in [profile1, profile2] {
        if !p.is_feasible(seq) {
            return Err(Error::Infeasible { total: p.total(), n: seq.len() });
        }
    }
    let (t1, t2) = (total_configurations(seq, profile1), total_configurations(seq, profile2));
    let pairs = t1.clone() * t2.clone();
    if pairs.to_u64().is_none_or(|p| p > budget) {
        return Err(Error::BudgetExceeded {
            required: pairs.to_string(),
            budget,
        });
    }
    let denom = profile1.total() + profile2.total();
    if denom == 0 {
        return Ok(1.0);
    }
    let masks1: Vec<Bitset> = enumerate_configurations(seq, profile1, budget)?.map(|c| c.bits()).collect();
    let masks2: Vec<Bitset> = enumerate_configurations(seq, profile2, budget)?.map(|c| c.bits()).collect();
    let shared: u64 = masks1
        .par_iter()
        .map(|m1| masks2.iter().map(|m2| m1.and_count(m2)).sum::<u64>())
        .sum();
    // Every pair has the same F1 denominator, so the mean is one division.
    let num = 2 * shared as u128;
    let den = masks1.len() as u128 * masks2.len() as u128 * denom as u128;
    Ok(num as f64 / den as f64)
}

/// A uniformly random placement of the profile.
pub fn sample_configuration<R: Rng + ?Sized>(
    seq: SequenceSpec,
    profile: &SegmentProfile,
    rng: &mut R,
) -> Result<Configuration> {
    if !profile.is_feasible(seq) {
        return Err(Error::Infeasible {
            total: profile.total(),
            n: seq.len(),
        });
    }
    let k = profile.k();
    let mut slots = index::sample(rng, profile.slots(seq), k).into_vec();
    slots.sort_unstable();
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    Ok(decode(&slots, &order, profile.lengths(), seq.len()))
}

/// Generator for stream `stream` of a seeded estimate.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Monte Carlo estimate of a mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`.
    pub standard_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub rng: String,
}

fn stream_sizes(samples: u64) -> impl Iterator<Item = (u64, u64)> {
    let base = samples / MC_STREAMS;
    let extra = samples % MC_STREAMS;
    (0..MC_STREAMS)
        .map(move |s| (s, base + u64::from(s < extra)))
        .filter(|&(_, size)| size > 0)
}

/// Mean token-level F1 over independently sampled placement pairs.
pub fn mc_expected_f1(
    seq: SequenceSpec,
    profile1: &SegmentProfile,
    profile2: &SegmentProfile,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if samples < 2 {
        return Err(Error::TooFewSamples { min: 2, got: samples });
    }
    for p in [profile1, profile2] {
        if !p.is_feasible(seq) {
            return Err(Error::Infeasible { total: p.total(), n: seq.len() });
        }
    }
    let denom = (profile1.total() + profile2.total()) as f64;
    let streams: Vec<(u64, u64)> = stream_sizes(samples).collect();
    let partials: Vec<(NeumaierSum, NeumaierSum)> = streams
        .par_iter()
        .map(|&(stream, size)| {
            let mut rng = stream_rng(seed, stream);
            let (mut sum, mut sq) = (NeumaierSum::default(), NeumaierSum::default());
            for _ in 0..size {
                let a = sample_configuration(seq, profile1, &mut rng).unwrap().bits();
                let b = sample_configuration(seq, profile2, &mut rng).unwrap().bits();
                let f1 = if denom == 0.0 {
                    1.0
                } else {
                    2.0 * a.and_count(&b) as f64 / denom
                };
                sum.add(f1);
                sq.add(f1 * f1);
            }
            (sum, sq)
        })
        .collect();
    let (mut sum, mut sq) = (NeumaierSum::default(), NeumaierSum::default());
    for (s, q) in &partials {
        sum.add(s.value());
        sq.add(q.value());
    }
    let count = samples as f64;
    let mean = sum.value() / count;
    let variance = ((sq.value() - count * mean * mean) / (count - 1.0)).max(0.0);
    Ok(McEstimate {
        mean,
        standard_error: (variance / count).sqrt(),
        samples,
        seed,
        rng: RNG_ALGORITHM.to_string(),
    })
}

/// Normalized histogram of segment `i`'s start over `samples` random placements.
pub fn empirical_location_distribution(
    seq: SequenceSpec,
    profile: &SegmentProfile,
    i: usize,
    samples: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    if samples < 1 {
        return Err(Error::TooFewSamples { min: 1, got: samples });
    }
    let len = profile.length(i)?;
    let support = seq.len().checked_sub(len).map(|x| x + 1).ok_or(Error::SegmentTooLong {
        length: len,
        n: seq.len(),
    })?;
    let streams: Vec<(u64, u64)> = stream_sizes(samples).collect();
    let partials = streams
        .par_iter()
        .map(|&(stream, size)| {
            let mut rng = stream_rng(seed, stream);
            let mut hist = vec![0u64; support];
            for _ in 0..size {
                let c = sample_configuration(seq, profile, &mut rng)?;
                hist[c.starts[i - 1] - 1] += 1;
            }
            Ok(hist)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut hist = vec![0u64; support];
    for part in partials {
        for (h, p) in hist.iter_mut().zip(part) {
            *h += p;
        }
    }
    Ok(hist.into_iter().map(|h| h as f64 / samples as f64).collect())
}
