//! CoNLL column-format reader and BIO span decoding.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use thiserror::Error;

use super::{CorpusDocument, Sentence};
use crate::annotation::{PlacedAnnotation, Span};
use crate::combinatorics::SequenceSpec;

const DOCSTART: &str = "-DOCSTART-";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConllError {
    #[error("input contains no tokens")]
    EmptyInput,

    #[error("line {line}: expected {expected} columns, found {found}")]
    ColumnCount { line: usize, expected: usize, found: usize },

    #[error("line {line}: a token line needs at least two columns")]
    TooFewColumns { line: usize },

    #[error("line {line}: tag column {column} out of range")]
    TagColumn { line: usize, column: usize },

    #[error("line {line}: unknown tag {tag:?}")]
    InvalidTag { line: usize, tag: String },

    #[error("line {line}: {tag:?} does not continue an entity of the same type")]
    DanglingInside { line: usize, tag: String },

    #[error("read failure at line {line}: {message}")]
    Read { line: usize, message: String },
}

/// Tagging convention of the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TagScheme {
    /// `I-` may open an entity; `B-` only separates adjacent entities of one type.
    Iob1,
    /// Every entity opens with `B-`.
    #[default]
    Iob2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseOptions {
    pub scheme: TagScheme,
    /// Reject IOB2 inputs whose entities open with `I-` instead of repairing them.
    pub strict: bool,
    /// 0-based column holding the tag; defaults to the last column.
    pub tag_column: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tag {
    Outside,
    Begin(String),
    Inside(String),
}

fn parse_tag(raw: &str, line: usize) -> Result<Tag, ConllError> {
    if raw == "O" {
        return Ok(Tag::Outside);
    }
    let invalid = || ConllError::InvalidTag {
        line,
        tag: raw.to_string(),
    };
    let (prefix, label) = raw.split_once('-').ok_or_else(invalid)?;
    if label.is_empty() {
        return Err(invalid());
    }
    match prefix {
        "B" => Ok(Tag::Begin(label.to_string())),
        "I" => Ok(Tag::Inside(label.to_string())),
        _ => Err(invalid()),
    }
}

/// Rewrites tags so every entity opens with `B-`.
///
/// `lines` gives the source line of each tag for error messages.
fn normalize_to_iob2(
    tags: &[String],
    lines: &[usize],
    options: &ParseOptions,
) -> Result<Vec<String>, ConllError> {
    let mut out = Vec::with_capacity(tags.len());
    let mut current: Option<String> = None;
    for (raw, &line) in tags.iter().zip(lines) {
        match parse_tag(raw, line)? {
            Tag::Outside => {
                current = None;
                out.push("O".to_string());
            }
            Tag::Begin(label) => {
                out.push(format!("B-{label}"));
                current = Some(label);
            }
            Tag::Inside(label) => {
                if current.as_deref() == Some(label.as_str()) {
                    out.push(format!("I-{label}"));
                } else {
                    if options.scheme == TagScheme::Iob2 {
                        if options.strict {
                            return Err(ConllError::DanglingInside { line, tag: raw.clone() });
                        }
                        log::warn!("line {line}: repairing dangling {raw} to B-{label}");
                    }
                    out.push(format!("B-{label}"));
                    current = Some(label);
                }
            }
        }
    }
    Ok(out)
}

/// Decodes IOB2 tags into per-type spans.
pub fn spans_from_iob2(tags: &[String]) -> BTreeMap<String, Vec<Span>> {
    let mut out: BTreeMap<String, Vec<Span>> = BTreeMap::new();
    let mut open: Option<(String, usize)> = None;
    let close = |open: &mut Option<(String, usize)>, end: usize, out: &mut BTreeMap<String, Vec<Span>>| {
        if let Some((label, start)) = open.take() {
            out.entry(label).or_default().push(Span::new(start, end - start));
        }
    };
    for (t, tag) in tags.iter().enumerate() {
        let pos = t + 1;
        if let Some(label) = tag.strip_prefix("I-") {
            if open.as_ref().is_some_and(|(l, _)| l == label) {
                continue;
            }
            close(&mut open, pos, &mut out);
            open = Some((label.to_string(), pos));
        } else if let Some(label) = tag.strip_prefix("B-") {
            close(&mut open, pos, &mut out);
            open = Some((label.to_string(), pos));
        } else {
            close(&mut open, pos, &mut out);
        }
    }
    close(&mut open, tags.len() + 1, &mut out);
    out
}

/// Normalizes raw tags and decodes them into per-type spans.
pub fn decode_tags(tags: &[String], options: &ParseOptions) -> Result<BTreeMap<String, Vec<Span>>, ConllError> {
    let lines: Vec<usize> = (1..=tags.len()).collect();
    Ok(spans_from_iob2(&normalize_to_iob2(tags, &lines, options)?))
}

/// IOB2 tags for a sentence's spans.
pub fn emit_iob2(sentence: &Sentence) -> Vec<String> {
    let mut tags = vec!["O".to_string(); sentence.len()];
    for (label, ann) in &sentence.typed_spans {
        for s in ann.spans() {
            tags[s.start - 1] = format!("B-{label}");
            for tag in &mut tags[s.start..s.end() - 1] {
                *tag = format!("I-{label}");
            }
        }
    }
    tags
}

/// Writes documents back out as two-column `token tag` CoNLL text in IOB2.
pub fn write_conll<W: Write>(documents: &[CorpusDocument], mut out: W) -> std::io::Result<()> {
    for doc in documents {
        writeln!(out, "{DOCSTART} O")?;
        writeln!(out)?;
        for sentence in &doc.sentences {
            for (token, tag) in sentence.tokens.iter().zip(emit_iob2(sentence)) {
                writeln!(out, "{token} {tag}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

struct Builder<'o> {
    options: &'o ParseOptions,
    documents: Vec<CorpusDocument>,
    tokens: Vec<String>,
    tags: Vec<String>,
    lines: Vec<usize>,
    columns: Option<usize>,
    saw_token: bool,
}

impl<'o> Builder<'o> {
    fn start_document(&mut self) {
        let id = format!("doc-{}", self.documents.len() + 1);
        self.documents.push(CorpusDocument { id, sentences: Vec::new() });
    }

    fn finish_sentence(&mut self) -> Result<(), ConllError> {
        if self.tokens.is_empty() {
            return Ok(());
        }
        let tags = normalize_to_iob2(&self.tags, &self.lines, self.options)?;
        let seq = SequenceSpec::new(self.tokens.len()).expect("sentence is nonempty");
        let typed_spans = spans_from_iob2(&tags)
            .into_iter()
            .map(|(label, spans)| {
                let ann = PlacedAnnotation::new(seq, spans).expect("BIO spans are disjoint and in bounds");
                (label, ann)
            })
            .collect();
        if self.documents.is_empty() {
            self.start_document();
        }
        let sentence = Sentence {
            tokens: std::mem::take(&mut self.tokens),
            typed_spans,
        };
        self.documents.last_mut().unwrap().sentences.push(sentence);
        self.tags.clear();
        self.lines.clear();
        Ok(())
    }

    fn token_line(&mut self, line: usize, fields: &[&str]) -> Result<(), ConllError> {
        if fields.len() < 2 {
            return Err(ConllError::TooFewColumns { line });
        }
        match self.columns {
            None => self.columns = Some(fields.len()),
            Some(expected) if expected != fields.len() => {
                return Err(ConllError::ColumnCount {
                    line,
                    expected,
                    found: fields.len(),
                })
            }
            _ => {}
        }
        let column = self.options.tag_column.unwrap_or(fields.len() - 1);
        if column == 0 || column >= fields.len() {
            return Err(ConllError::TagColumn { line, column });
        }
        self.tokens.push(fields[0].to_string());
        self.tags.push(fields[column].to_string());
        self.lines.push(line);
        self.saw_token = true;
        Ok(())
    }
}

/// Reads CoNLL column text: one token per line, blank lines between
/// sentences, `-DOCSTART-` lines between documents. LF and CRLF endings are
/// both accepted.
pub fn parse_conll<R: BufRead>(reader: R, options: &ParseOptions) -> Result<Vec<CorpusDocument>, ConllError> {
    let mut b = Builder {
        options,
        documents: Vec::new(),
        tokens: Vec::new(),
        tags: Vec::new(),
        lines: Vec::new(),
        columns: None,
        saw_token: false,
    };
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| ConllError::Read {
            line: lineno,
            message: e.to_string(),
        })?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            b.finish_sentence()?;
        } else if fields[0] == DOCSTART {
            b.finish_sentence()?;
            b.start_document();
        } else {
            b.token_line(lineno, &fields)?;
        }
    }
    b.finish_sentence()?;
    if !b.saw_token {
        return Err(ConllError::EmptyInput);
    }
    Ok(b.documents)
}

/// Convenience wrapper over an in-memory string.
pub fn parse_conll_str(text: &str, options: &ParseOptions) -> Result<Vec<CorpusDocument>, ConllError> {
    parse_conll(text.as_bytes(), options)
}
