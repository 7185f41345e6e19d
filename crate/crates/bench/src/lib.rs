//! Fixtures shared by the benchmarks.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spanchance::corpus::{CorpusDocument, Sentence};
use spanchance::{PlacedAnnotation, SequenceSpec, Span};

const LABELS: [&str; 4] = ["LOC", "MISC", "ORG", "PER"];

fn random_sentence(rng: &mut ChaCha8Rng, n: usize, entities: usize) -> BTreeMap<String, Vec<Span>> {
    let mut used = vec![false; n];
    let mut spans: BTreeMap<String, Vec<Span>> = BTreeMap::new();
    for _ in 0..entities {
        let len = rng.random_range(1..=3).min(n);
        let start = rng.random_range(1..=n - len + 1);
        if used[start - 1..start - 1 + len].iter().any(|&u| u) {
            continue;
        }
        used[start - 1..start - 1 + len].iter_mut().for_each(|u| *u = true);
        let label = LABELS[rng.random_range(0..LABELS.len())];
        spans.entry(label.to_string()).or_default().push(Span::new(start, len));
    }
    spans
}

fn sentence(n: usize, spans: BTreeMap<String, Vec<Span>>) -> Sentence {
    let seq = SequenceSpec::new(n).unwrap();
    Sentence {
        tokens: (0..n).map(|t| format!("t{t}")).collect(),
        typed_spans: spans
            .into_iter()
            .map(|(label, v)| (label, PlacedAnnotation::new(seq, v).unwrap()))
            .collect(),
    }
}

/// Gold and system corpora of `sentences` sentences with newswire-like sizes.
/// The system is an independent random annotation of the same tokens.
pub fn corpus_pair(sentences: usize, seed: u64) -> (Vec<CorpusDocument>, Vec<CorpusDocument>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut gold, mut system) = (Vec::new(), Vec::new());
    for _ in 0..sentences {
        let n = rng.random_range(4..=40);
        let k = rng.random_range(0..=4);
        gold.push(sentence(n, random_sentence(&mut rng, n, k)));
        system.push(sentence(n, random_sentence(&mut rng, n, k)));
    }
    let wrap = |s: Vec<Sentence>| vec![CorpusDocument { id: "bench".into(), sentences: s }];
    (wrap(gold), wrap(system))
}
