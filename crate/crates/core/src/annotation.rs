//! Concrete span annotations on a token sequence.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{SegmentProfile, SequenceSpec};
use crate::error::{Error, Result};

/// A contiguous run of tokens: 1-based start and positive length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub length: usize,
}

impl Span {
    pub fn new(start: usize, length: usize) -> Self {
        Span { start, length }
    }

    /// One past the last covered token.
    pub fn end(&self) -> usize {
        self.start + self.length
    }

    pub fn overlap(&self, other: &Span) -> usize {
        self.end().min(other.end()).saturating_sub(self.start.max(other.start))
    }
}

/// Sorted, non-overlapping spans on a sequence of known length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlacedAnnotation {
    seq_len: usize,
    spans: Vec<Span>,
}

impl PlacedAnnotation {
    /// Validates bounds and disjointness; spans may be given in any order.
    pub fn new(seq: SequenceSpec, mut spans: Vec<Span>) -> Result<Self> {
        let n = seq.len();
        for s in &spans {
            if s.start == 0 || s.length == 0 || s.end() > n + 1 {
                return Err(Error::SpanOutOfBounds {
                    start: s.start,
                    length: s.length,
                    n,
                });
            }
        }
        spans.sort();
        for w in spans.windows(2) {
            if w[1].start < w[0].end() {
                return Err(Error::OverlappingSpans {
                    start1: w[0].start,
                    length1: w[0].length,
                    start2: w[1].start,
                    length2: w[1].length,
                });
            }
        }
        Ok(PlacedAnnotation { seq_len: n, spans })
    }

    pub fn empty(seq: SequenceSpec) -> Self {
        PlacedAnnotation {
            seq_len: seq.len(),
            spans: Vec::new(),
        }
    }

    /// Decodes a 0/1 token mask (each maximal run of 1s is one span).
    pub fn from_mask(mask: &[bool]) -> Result<Self> {
        let seq = SequenceSpec::new(mask.len())?;
        let mut spans = Vec::new();
        let mut start = None;
        for (t, &on) in mask.iter().enumerate() {
            match (on, start) {
                (true, None) => start = Some(t + 1),
                (false, Some(s)) => {
                    spans.push(Span::new(s, t + 1 - s));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            spans.push(Span::new(s, mask.len() + 1 - s));
        }
        Self::new(seq, spans)
    }

    pub fn seq(&self) -> SequenceSpec {
        SequenceSpec::new(self.seq_len).expect("validated on construction")
    }

    pub fn seq_len(&self) -> usize {
        self.seq_len
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    /// Number of covered tokens.
    pub fn covered(&self) -> usize {
        self.spans.iter().map(|s| s.length).sum()
    }

    /// Segment lengths in span order.
    pub fn profile(&self) -> SegmentProfile {
        SegmentProfile::new(self.spans.iter().map(|s| s.length).collect())
            .expect("span lengths are positive")
    }

    /// Token coverage mask of length `n`.
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.seq_len];
        for s in &self.spans {
            mask[s.start - 1..s.end() - 1].fill(true);
        }
        mask
    }

    /// Number of tokens covered by both annotations (merge walk over sorted spans).
    pub fn intersection(&self, other: &PlacedAnnotation) -> usize {
        let (mut i, mut j, mut acc) = (0, 0, 0);
        while i < self.spans.len() && j < other.spans.len() {
            let (x, y) = (&self.spans[i], &other.spans[j]);
            acc += x.overlap(y);
            if x.end() <= y.end() {
                i += 1;
            } else {
                j += 1;
            }
        }
        acc
    }
}
