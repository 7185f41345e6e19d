//! Corpus-level evaluation: per-sentence, per-entity-type cells pooled into
//! micro-averaged observed, chance and corrected F1, plus partitioning of
//! sentences by chance level.

mod conll;
mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use conll::{
    decode_tags, emit_iob2, parse_conll, parse_conll_str, spans_from_iob2, write_conll, ConllError,
    ParseOptions, TagScheme,
};
pub use report::{emit_report, OutputFormat, Report, CSV_HEADER};

use crate::agreement::{corrected_f1, AgreementReport, ChanceOptions, ComputationMode, ProfileCoverage};
use crate::annotation::PlacedAnnotation;
use crate::combinatorics::SequenceSpec;
use crate::count::stable_sum;
use crate::error::{Error, Result};

/// Default chance-level threshold separating easy and hard sentences.
pub const DEFAULT_PARTITION_THRESHOLD: f64 = 0.825;

/// A tokenized sentence with its spans grouped by entity type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub tokens: Vec<String>,
    /// Only types with at least one span appear.
    pub typed_spans: BTreeMap<String, PlacedAnnotation>,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn seq(&self) -> SequenceSpec {
        SequenceSpec::new(self.tokens.len()).expect("sentences are nonempty")
    }

    /// Spans of one type, empty if the type is absent.
    pub fn annotation(&self, label: &str) -> PlacedAnnotation {
        self.typed_spans
            .get(label)
            .cloned()
            .unwrap_or_else(|| PlacedAnnotation::empty(self.seq()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDocument {
    pub id: String,
    pub sentences: Vec<Sentence>,
}

/// All sentences of a corpus in document order; the position is the sentence id.
pub fn flatten(documents: &[CorpusDocument]) -> Vec<&Sentence> {
    documents.iter().flat_map(|d| d.sentences.iter()).collect()
}

/// Statistics of one (sentence, entity type) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub sentence: usize,
    pub label: String,
    pub tokens: usize,
    /// Tokens covered by both gold and system.
    pub intersection: usize,
    pub gold_length: usize,
    pub system_length: usize,
    /// Expected intersection of random gold-profile and system-profile annotations.
    pub expected_intersection: f64,
    /// Expected intersection of two random gold-profile annotations.
    pub gold_self_expected: f64,
    pub mode: ComputationMode,
}

/// Per-cell statistics of a gold/system comparison.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AggregateStats {
    pub cells: Vec<CellStats>,
}

/// Pooled totals over a set of cells.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Totals {
    pub intersection: usize,
    pub gold_length: usize,
    pub system_length: usize,
    pub expected_intersection: f64,
    pub gold_self_expected: f64,
    pub mode: ComputationMode,
    pub cells: usize,
}

impl Totals {
    fn of<'a>(cells: impl Iterator<Item = &'a CellStats> + Clone) -> Totals {
        Totals {
            intersection: cells.clone().map(|c| c.intersection).sum(),
            gold_length: cells.clone().map(|c| c.gold_length).sum(),
            system_length: cells.clone().map(|c| c.system_length).sum(),
            expected_intersection: stable_sum(cells.clone().map(|c| c.expected_intersection)),
            gold_self_expected: stable_sum(cells.clone().map(|c| c.gold_self_expected)),
            mode: cells.clone().map(|c| c.mode).max().unwrap_or_default(),
            cells: cells.count(),
        }
    }

    fn report(&self, options: &ChanceOptions) -> AgreementReport {
        let denom = (self.gold_length + self.system_length) as f64;
        let (observed, chance) = if denom == 0.0 {
            (1.0, 1.0)
        } else {
            (
                2.0 * self.intersection as f64 / denom,
                2.0 * self.expected_intersection / denom,
            )
        };
        let difficulty = if self.gold_length == 0 {
            0.0
        } else {
            1.0 - self.gold_self_expected / self.gold_length as f64
        };
        AgreementReport {
            observed_f1: observed,
            chance_f1: chance,
            corrected_f1: corrected_f1(observed, chance).ok(),
            difficulty: Some(difficulty),
            model: options.model,
            mode: self.mode,
        }
    }
}

impl AggregateStats {
    pub fn totals(&self) -> Totals {
        Totals::of(self.cells.iter())
    }

    pub fn labels(&self) -> BTreeSet<&str> {
        self.cells.iter().map(|c| c.label.as_str()).collect()
    }

    /// Keeps only cells of the given sentences.
    pub fn restrict(&self, sentences: &[usize]) -> AggregateStats {
        let keep: BTreeSet<usize> = sentences.iter().copied().collect();
        AggregateStats {
            cells: self.cells.iter().filter(|c| keep.contains(&c.sentence)).cloned().collect(),
        }
    }

    /// Micro-averaged report over every cell, with per-type rows.
    pub fn report(&self, options: &ChanceOptions) -> CorpusReport {
        let per_type = self
            .labels()
            .into_iter()
            .map(|label| {
                let totals = Totals::of(self.cells.iter().filter(|c| c.label == label));
                (label.to_string(), totals.report(options))
            })
            .collect();
        CorpusReport {
            overall: self.totals().report(options),
            per_type,
            runtime_seconds: 0.0,
        }
    }
}

/// Micro-averaged comparison of a system against gold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub overall: AgreementReport,
    pub per_type: BTreeMap<String, AgreementReport>,
    pub runtime_seconds: f64,
}

fn check_alignment(gold: &[&Sentence], system: &[&Sentence]) -> Result<()> {
    for (index, (g, s)) in gold.iter().zip(system).enumerate() {
        if g.len() != s.len() {
            return Err(Error::Misaligned {
                index,
                reason: format!("gold has {} tokens, system has {}", g.len(), s.len()),
            });
        }
    }
    if gold.len() != system.len() {
        return Err(Error::Misaligned {
            index: gold.len().min(system.len()),
            reason: format!("gold has {} sentences, system has {}", gold.len(), system.len()),
        });
    }
    Ok(())
}

fn sentence_cells(index: usize, gold: &Sentence, system: &Sentence, options: &ChanceOptions) -> Result<Vec<CellStats>> {
    let labels: BTreeSet<&String> = gold.typed_spans.keys().chain(system.typed_spans.keys()).collect();
    let seq = gold.seq();
    labels
        .into_iter()
        .map(|label| {
            let (g, s) = (gold.annotation(label), system.annotation(label));
            let gold_cov = ProfileCoverage::compute(seq, &g.profile(), options)?;
            let sys_cov = ProfileCoverage::compute(seq, &s.profile(), options)?;
            Ok(CellStats {
                sentence: index,
                label: label.clone(),
                tokens: seq.len(),
                intersection: g.intersection(&s),
                gold_length: g.covered(),
                system_length: s.covered(),
                expected_intersection: gold_cov.expected_intersection(&sys_cov)?,
                gold_self_expected: gold_cov.expected_intersection(&gold_cov)?,
                mode: gold_cov.mode().max(sys_cov.mode()),
            })
        })
        .collect()
}

/// Per-cell statistics for aligned gold and system corpora. Sentences are
/// processed in parallel; cells come back in sentence order, so pooled sums
/// do not depend on the worker count.
pub fn aggregate_stats(
    gold: &[CorpusDocument],
    system: &[CorpusDocument],
    options: &ChanceOptions,
) -> Result<AggregateStats> {
    let (g, s) = (flatten(gold), flatten(system));
    check_alignment(&g, &s)?;
    let per_sentence = g
        .par_iter()
        .zip(s.par_iter())
        .enumerate()
        .map(|(i, (g, s))| sentence_cells(i, g, s, options))
        .collect::<Result<Vec<_>>>()?;
    Ok(AggregateStats {
        cells: per_sentence.into_iter().flatten().collect(),
    })
}

/// Micro-averaged observed, chance and corrected F1 over all sentence/type cells.
pub fn micro_average_report(
    gold: &[CorpusDocument],
    system: &[CorpusDocument],
    options: &ChanceOptions,
) -> Result<CorpusReport> {
    let start = Instant::now();
    let stats = aggregate_stats(gold, system, options)?;
    let mut report = stats.report(options);
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Sentences split by chance level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub threshold: f64,
    /// Sentences with chance level above the threshold (easier by chance).
    pub subset1: Vec<usize>,
    /// Sentences at or below the threshold.
    pub subset2: Vec<usize>,
    /// Chance level of every sentence, indexed by sentence id.
    pub chance_levels: Vec<f64>,
}

/// Self chance level of a sentence's gold annotation, pooled over types; 1
/// for a sentence without entities.
pub fn sentence_chance_level(sentence: &Sentence, options: &ChanceOptions) -> Result<f64> {
    let seq = sentence.seq();
    let mut expected = Vec::new();
    let mut length = 0;
    for ann in sentence.typed_spans.values() {
        let cov = ProfileCoverage::compute(seq, &ann.profile(), options)?;
        expected.push(cov.expected_intersection(&cov)?);
        length += ann.covered();
    }
    if length == 0 {
        return Ok(1.0);
    }
    Ok(stable_sum(expected) / length as f64)
}

/// Splits gold sentences into `chance > threshold` and `chance <= threshold`.
pub fn partition_by_difficulty(
    gold: &[CorpusDocument],
    threshold: f64,
    options: &ChanceOptions,
) -> Result<Partition> {
    let sentences = flatten(gold);
    let chance_levels = sentences
        .par_iter()
        .map(|s| sentence_chance_level(s, options))
        .collect::<Result<Vec<_>>>()?;
    let (mut subset1, mut subset2) = (Vec::new(), Vec::new());
    for (i, &c) in chance_levels.iter().enumerate() {
        if c > threshold {
            subset1.push(i);
        } else {
            subset2.push(i);
        }
    }
    Ok(Partition {
        threshold,
        subset1,
        subset2,
        chance_levels,
    })
}

/// 1-based competition ranks, highest score first (ties share the best rank).
pub fn rank_descending(scores: &[f64]) -> Vec<usize> {
    scores
        .iter()
        .map(|&x| 1 + scores.iter().filter(|&&y| y > x).count())
        .collect()
}

/// Pairs `(i, j)` with `i < j` whose strict order differs between two score lists.
pub fn ranking_changes(before: &[f64], after: &[f64]) -> Vec<(usize, usize)> {
    assert_eq!(before.len(), after.len(), "score lists must align");
    let mut out = Vec::new();
    for i in 0..before.len() {
        for j in i + 1..before.len() {
            let b = before[i].partial_cmp(&before[j]);
            let a = after[i].partial_cmp(&after[j]);
            if b != a {
                out.push((i, j));
            }
        }
    }
    out
}
