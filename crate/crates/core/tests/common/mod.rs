#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spanchance::corpus::{CorpusDocument, Sentence};
use spanchance::{PlacedAnnotation, SegmentProfile, SequenceSpec, Span};

pub fn seq(n: usize) -> SequenceSpec {
    SequenceSpec::new(n).unwrap()
}

pub fn prof(lengths: &[usize]) -> SegmentProfile {
    SegmentProfile::new(lengths.to_vec()).unwrap()
}

pub fn placed(n: usize, spans: &[(usize, usize)]) -> PlacedAnnotation {
    PlacedAnnotation::new(seq(n), spans.iter().map(|&(s, l)| Span::new(s, l)).collect()).unwrap()
}

/// Every tuple of 1-based starts, one per segment in profile order, whose
/// segments are pairwise disjoint. Plain nested search, independent of the
/// crate's own enumerator.
pub fn brute_force_placements(n: usize, lengths: &[usize]) -> Vec<Vec<usize>> {
    fn go(n: usize, lengths: &[usize], used: &mut Vec<bool>, starts: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let j = starts.len();
        if j == lengths.len() {
            out.push(starts.clone());
            return;
        }
        let len = lengths[j];
        if len > n {
            return;
        }
        for s in 1..=n - len + 1 {
            let range = s - 1..s - 1 + len;
            if used[range.clone()].iter().any(|&u| u) {
                continue;
            }
            used[range.clone()].iter_mut().for_each(|u| *u = true);
            starts.push(s);
            go(n, lengths, used, starts, out);
            starts.pop();
            used[range].iter_mut().for_each(|u| *u = false);
        }
    }
    let mut out = Vec::new();
    go(n, lengths, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

/// Random profile of `1..=max_k` segments with lengths `1..=max_len` that fits in `n`.
pub fn random_profile(rng: &mut impl Rng, n: usize, max_k: usize, max_len: usize) -> Vec<usize> {
    loop {
        let k = rng.random_range(1..=max_k);
        let lengths: Vec<usize> = (0..k).map(|_| rng.random_range(1..=max_len)).collect();
        if lengths.iter().sum::<usize>() <= n {
            return lengths;
        }
    }
}

pub const LABELS: [&str; 4] = ["LOC", "MISC", "ORG", "PER"];
/// Rough entity-type frequencies of English newswire NER test data.
const LABEL_WEIGHTS: [f64; 4] = [0.295, 0.124, 0.294, 0.287];
const ENTITY_LENGTH_WEIGHTS: [f64; 5] = [0.62, 0.28, 0.07, 0.02, 0.01];
const ENTITIES_PER_SENTENCE: [f64; 7] = [0.21, 0.30, 0.24, 0.13, 0.07, 0.03, 0.02];

fn pick(rng: &mut impl Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    weights.len() - 1
}

fn sentence_length(rng: &mut impl Rng) -> usize {
    match rng.random_range(0..10) {
        0..=1 => rng.random_range(1..=6),
        2..=7 => rng.random_range(7..=22),
        _ => rng.random_range(23..=50),
    }
}

fn free(mask: &[bool], start: usize, len: usize) -> bool {
    start >= 1 && start + len - 1 <= mask.len() && mask[start - 1..start - 1 + len].iter().all(|&m| !m)
}

fn mark(mask: &mut [bool], start: usize, len: usize) {
    mask[start - 1..start - 1 + len].iter_mut().for_each(|m| *m = true);
}

fn build_sentence(tokens: Vec<String>, spans: BTreeMap<String, Vec<Span>>) -> Sentence {
    let n = tokens.len();
    let typed_spans = spans
        .into_iter()
        .filter(|(_, v)| !v.is_empty())
        .map(|(label, v)| (label, PlacedAnnotation::new(seq(n), v).unwrap()))
        .collect();
    Sentence { tokens, typed_spans }
}

/// Synthetic gold corpus with newswire-like sentence lengths and entity
/// statistics, split into documents of 20 sentences.
pub fn synthetic_gold(sentences: usize, seed: u64) -> Vec<CorpusDocument> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all = Vec::with_capacity(sentences);
    for _ in 0..sentences {
        let n = sentence_length(&mut rng);
        let tokens = (0..n).map(|t| format!("w{t}")).collect();
        let mut mask = vec![false; n];
        let mut spans: BTreeMap<String, Vec<Span>> = BTreeMap::new();
        for _ in 0..pick(&mut rng, &ENTITIES_PER_SENTENCE) {
            let len = 1 + pick(&mut rng, &ENTITY_LENGTH_WEIGHTS);
            let label = LABELS[pick(&mut rng, &LABEL_WEIGHTS)];
            for _ in 0..10 {
                if len > n {
                    break;
                }
                let start = rng.random_range(1..=n - len + 1);
                if free(&mask, start, len) {
                    mark(&mut mask, start, len);
                    spans.entry(label.to_string()).or_default().push(Span::new(start, len));
                    break;
                }
            }
        }
        all.push(build_sentence(tokens, spans));
    }
    into_documents(all)
}

fn into_documents(sentences: Vec<Sentence>) -> Vec<CorpusDocument> {
    sentences
        .chunks(20)
        .enumerate()
        .map(|(i, chunk)| CorpusDocument {
            id: format!("doc{i}"),
            sentences: chunk.to_vec(),
        })
        .collect()
}

/// Error rates of a synthetic system.
#[derive(Debug, Clone, Copy)]
pub struct ErrorRates {
    pub miss: f64,
    pub boundary: f64,
    pub relabel: f64,
    pub spurious: f64,
}

impl ErrorRates {
    pub const fn new(miss: f64, boundary: f64, relabel: f64, spurious: f64) -> Self {
        ErrorRates {
            miss,
            boundary,
            relabel,
            spurious,
        }
    }
}

/// A system output derived from gold; `rates(i)` gives the error rates for sentence `i`.
pub fn synthetic_system(
    gold: &[CorpusDocument],
    seed: u64,
    rates: impl Fn(usize) -> ErrorRates,
) -> Vec<CorpusDocument> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sentences = gold.iter().flat_map(|d| d.sentences.iter());
    let mut out = Vec::new();
    for (i, s) in sentences.enumerate() {
        let r = rates(i);
        let n = s.len();
        let mut mask = vec![false; n];
        let mut spans: BTreeMap<String, Vec<Span>> = BTreeMap::new();
        let mut kept = Vec::new();
        for (label, ann) in &s.typed_spans {
            for span in ann.spans() {
                if rng.random_bool(r.miss) {
                    continue;
                }
                let label = if rng.random_bool(r.relabel) {
                    LABELS[rng.random_range(0..LABELS.len())]
                } else {
                    label.as_str()
                };
                kept.push((label.to_string(), *span));
                mark(&mut mask, span.start, span.length);
            }
        }
        for (label, mut span) in kept {
            if rng.random_bool(r.boundary) {
                if span.length > 1 && rng.random_bool(0.5) {
                    mask[span.end() - 2] = false;
                    span.length -= 1;
                } else if span.end() <= n && !mask[span.end() - 1] {
                    mask[span.end() - 1] = true;
                    span.length += 1;
                }
            }
            spans.entry(label).or_default().push(span);
        }
        if rng.random_bool(r.spurious) {
            let start = rng.random_range(1..=n);
            if free(&mask, start, 1) {
                let label = LABELS[rng.random_range(0..LABELS.len())];
                spans.entry(label.to_string()).or_default().push(Span::new(start, 1));
            }
        }
        out.push(build_sentence(s.tokens.clone(), spans));
    }
    into_documents(out)
}
