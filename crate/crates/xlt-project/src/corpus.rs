//! Data model for sentences, BIO tags, spans, alignments and logits, plus
//! readers/writers for the on-disk formats (CoNLL TSV, Pharaoh alignments,
//! logits JSONL).
//!
//! All types are immutable values after construction. Readers and writers are
//! pure functions of bytes; `read_conll(write_conll(c)) == c` byte-for-byte.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {msg}")]
    ParseLine { line: usize, msg: String },
    #[error("sentence {sentence}: orphan I-tag at token {token} violates BIO in strict mode")]
    BioViolation { sentence: usize, token: usize },
    #[error("line {line}, column {column}: expected alignment link \"i-j\", got {found:?}")]
    AlignmentParse {
        line: usize,
        column: usize,
        found: String,
    },
    #[error("logits record {record}: {msg}")]
    LogitRecord { record: usize, msg: String },
    #[error("logits input is missing the {{\"labels\": [...]}} header line")]
    MissingLogitHeader,
    #[error("overlapping spans: ({0}, {1}..={2}) and ({3}, {4}..={5})")]
    OverlappingSpans(String, usize, usize, String, usize, usize),
    #[error("invalid tag {tag:?}: {msg}")]
    InvalidTag { tag: String, msg: String },
    #[error("sentence has {tokens} tokens but {tags} tags")]
    LengthMismatch { tokens: usize, tags: usize },
    #[error("invalid label vocabulary: {0}")]
    InvalidVocabulary(String),
}

/// A pre-tokenized sentence. Token indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sentence {
    pub tokens: Vec<String>,
}

impl Sentence {
    pub fn new(tokens: Vec<String>) -> Self {
        Sentence { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Sentence {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Sentence::new(iter.into_iter().map(Into::into).collect())
    }
}

/// A BIO tag: `O`, `B-<type>` or `I-<type>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Outside,
    Begin(String),
    Inside(String),
}

impl Tag {
    pub fn entity_type(&self) -> Option<&str> {
        match self {
            Tag::Outside => None,
            Tag::Begin(t) | Tag::Inside(t) => Some(t),
        }
    }
}

impl FromStr for Tag {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: &str| CorpusError::InvalidTag {
            tag: s.to_string(),
            msg: msg.to_string(),
        };
        if s == "O" {
            return Ok(Tag::Outside);
        }
        let (prefix, ty) = match s.split_once('-') {
            Some(p) => p,
            None => return Err(bad("expected \"O\", \"B-<type>\" or \"I-<type>\"")),
        };
        if ty.is_empty() {
            return Err(bad("empty entity type"));
        }
        if ty.chars().any(char::is_whitespace) {
            return Err(bad("entity type contains whitespace"));
        }
        match prefix {
            "B" => Ok(Tag::Begin(ty.to_string())),
            "I" => Ok(Tag::Inside(ty.to_string())),
            _ => Err(bad("prefix must be B or I")),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Outside => f.write_str("O"),
            Tag::Begin(t) => write!(f, "B-{t}"),
            Tag::Inside(t) => write!(f, "I-{t}"),
        }
    }
}

/// A sentence together with one BIO tag per token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSentence {
    pub sentence: Sentence,
    pub tags: Vec<Tag>,
}

impl LabeledSentence {
    pub fn new(sentence: Sentence, tags: Vec<Tag>) -> Result<Self, CorpusError> {
        if sentence.len() != tags.len() {
            return Err(CorpusError::LengthMismatch {
                tokens: sentence.len(),
                tags: tags.len(),
            });
        }
        Ok(LabeledSentence { sentence, tags })
    }

    pub fn len(&self) -> usize {
        self.sentence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentence.is_empty()
    }
}

/// A contiguous labeled span; `start` and `end` are inclusive token indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledSpan {
    pub entity_type: String,
    pub start: usize,
    pub end: usize,
}

impl LabeledSpan {
    pub fn new(entity_type: impl Into<String>, start: usize, end: usize) -> Self {
        LabeledSpan {
            entity_type: entity_type.into(),
            start,
            end,
        }
    }

    pub fn is_single_token(&self) -> bool {
        self.start == self.end
    }
}

/// A word alignment: a set of 0-based (source index, target index) links.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Alignment {
    pub links: BTreeSet<(usize, usize)>,
}

impl Alignment {
    pub fn new(links: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Alignment {
            links: links.into_iter().collect(),
        }
    }

    /// Identity alignment over `len` tokens.
    pub fn identity(len: usize) -> Self {
        Alignment::new((0..len).map(|i| (i, i)))
    }

    pub fn contains(&self, src: usize, tgt: usize) -> bool {
        self.links.contains(&(src, tgt))
    }
}

/// The target-side token index set induced by an alignment for one span.
/// Always non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSpan {
    indices: BTreeSet<usize>,
}

impl CandidateSpan {
    /// Returns `None` for an empty index set.
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Option<Self> {
        let indices: BTreeSet<usize> = indices.into_iter().collect();
        if indices.is_empty() {
            None
        } else {
            Some(CandidateSpan { indices })
        }
    }

    pub fn indices(&self) -> &BTreeSet<usize> {
        &self.indices
    }

    pub fn first(&self) -> usize {
        *self.indices.iter().next().expect("non-empty by invariant")
    }

    pub fn last(&self) -> usize {
        *self.indices.iter().last().expect("non-empty by invariant")
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Ordered list of distinct tag strings; defines logit dimensions and the
/// argmax tie-break order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelVocabulary {
    labels: Vec<String>,
}

impl LabelVocabulary {
    pub fn new(labels: Vec<String>) -> Result<Self, CorpusError> {
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(CorpusError::InvalidVocabulary(format!(
                    "duplicate label {l:?}"
                )));
            }
            l.parse::<Tag>().map_err(|e| {
                CorpusError::InvalidVocabulary(format!("label {l:?} is not a valid tag: {e}"))
            })?;
        }
        if !seen.contains("O") {
            return Err(CorpusError::InvalidVocabulary(
                "vocabulary must contain \"O\"".to_string(),
            ));
        }
        Ok(LabelVocabulary { labels })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn tag_at(&self, index: usize) -> Tag {
        self.labels[index].parse().expect("validated on construction")
    }
}

/// Per-token class-logit vectors over a shared [`LabelVocabulary`].
///
/// Generic over the scalar type; `crate::LogitSentence` fixes it to `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitSentenceOf<T> {
    pub tokens: Sentence,
    pub logits: Vec<Vec<T>>,
}

impl<T> LogitSentenceOf<T> {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// How to treat BIO violations on read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadMode {
    /// Reject any orphan I-tag. Default for gold/train data.
    Strict,
    /// Rewrite each orphan `I-X` to `B-X`. Default for model predictions.
    Repair,
}

/// Index of the first token violating the BIO scheme, if any.
pub fn bio_violation(tags: &[Tag]) -> Option<usize> {
    for (i, tag) in tags.iter().enumerate() {
        if let Tag::Inside(ty) = tag {
            let ok = i > 0
                && match &tags[i - 1] {
                    Tag::Begin(p) | Tag::Inside(p) => p == ty,
                    Tag::Outside => false,
                };
            if !ok {
                return Some(i);
            }
        }
    }
    None
}

/// Rewrites each orphan `I-X` to `B-X`, preserving the type. Idempotent.
pub fn repair_bio(tags: &[Tag]) -> Vec<Tag> {
    let mut out: Vec<Tag> = Vec::with_capacity(tags.len());
    for (i, tag) in tags.iter().enumerate() {
        match tag {
            Tag::Inside(ty) => {
                let ok = i > 0 && out[i - 1].entity_type() == Some(ty.as_str());
                if ok {
                    out.push(tag.clone());
                } else {
                    out.push(Tag::Begin(ty.clone()));
                }
            }
            other => out.push(other.clone()),
        }
    }
    out
}

/// Reads a two-column CoNLL TSV corpus: `token<TAB>tag` lines, blank line
/// between sentences. With `multi_column`, takes the first and last
/// tab-separated columns of each line instead (CoNLL-2003 style files).
pub fn read_conll_columns(
    bytes: &[u8],
    mode: ReadMode,
    multi_column: bool,
) -> Result<Vec<LabeledSentence>, CorpusError> {
    let text = std::str::from_utf8(bytes).map_err(|e| CorpusError::ParseLine {
        line: 0,
        msg: format!("input is not valid UTF-8: {e}"),
    })?;
    let mut sentences = Vec::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut tags: Vec<Tag> = Vec::new();

    let mut flush = |tokens: &mut Vec<String>, tags: &mut Vec<Tag>| -> Result<(), CorpusError> {
        if tokens.is_empty() {
            return Ok(());
        }
        let sentence_index = sentences.len();
        match mode {
            ReadMode::Strict => {
                if let Some(token) = bio_violation(tags) {
                    return Err(CorpusError::BioViolation {
                        sentence: sentence_index,
                        token,
                    });
                }
            }
            ReadMode::Repair => {
                *tags = repair_bio(tags);
            }
        }
        sentences.push(LabeledSentence {
            sentence: Sentence::new(std::mem::take(tokens)),
            tags: std::mem::take(tags),
        });
        Ok(())
    };

    for (lineno, line) in text.lines().enumerate() {
        let line_display = lineno + 1;
        if line.is_empty() {
            flush(&mut tokens, &mut tags)?;
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let (token, tag) = if multi_column {
            (cols[0], *cols.last().expect("split yields at least one"))
        } else {
            if cols.len() != 2 {
                return Err(CorpusError::ParseLine {
                    line: line_display,
                    msg: format!("expected 2 tab-separated columns, got {}", cols.len()),
                });
            }
            (cols[0], cols[1])
        };
        if token.is_empty() {
            return Err(CorpusError::ParseLine {
                line: line_display,
                msg: "empty token".to_string(),
            });
        }
        let tag: Tag = tag.parse().map_err(|e| CorpusError::ParseLine {
            line: line_display,
            msg: format!("{e}"),
        })?;
        tokens.push(token.to_string());
        tags.push(tag);
    }
    flush(&mut tokens, &mut tags)?;
    Ok(sentences)
}

pub fn read_conll(bytes: &[u8], mode: ReadMode) -> Result<Vec<LabeledSentence>, CorpusError> {
    read_conll_columns(bytes, mode, false)
}

/// Serializes a corpus as two-column CoNLL TSV; inverse of [`read_conll`].
pub fn write_conll(sentences: &[LabeledSentence]) -> Vec<u8> {
    let mut out = String::new();
    for sentence in sentences {
        for (token, tag) in sentence.sentence.tokens.iter().zip(&sentence.tags) {
            out.push_str(token);
            out.push('\t');
            out.push_str(&tag.to_string());
            out.push('\n');
        }
        out.push('\n');
    }
    out.into_bytes()
}

/// Reads Pharaoh-format alignments: one line per sentence pair, space
/// separated `i-j` links, 0-based. Duplicates are collapsed.
pub fn read_alignments(bytes: &[u8]) -> Result<Vec<Alignment>, CorpusError> {
    let text = std::str::from_utf8(bytes).map_err(|e| CorpusError::ParseLine {
        line: 0,
        msg: format!("input is not valid UTF-8: {e}"),
    })?;
    let mut alignments = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut links = BTreeSet::new();
        for (colno, token) in line.split_whitespace().enumerate() {
            // strict /[0-9]+-[0-9]+/: no signs, no extra separators
            let parsed = token.split_once('-').and_then(|(i, j)| {
                let digits =
                    |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
                if !digits(i) || !digits(j) {
                    return None;
                }
                Some((i.parse().ok()?, j.parse().ok()?))
            });
            match parsed {
                Some(link) => {
                    links.insert(link);
                }
                None => {
                    return Err(CorpusError::AlignmentParse {
                        line: lineno + 1,
                        column: colno + 1,
                        found: token.to_string(),
                    })
                }
            }
        }
        alignments.push(Alignment { links });
    }
    Ok(alignments)
}

/// Serializes alignments in Pharaoh format; inverse of [`read_alignments`]
/// up to link ordering (links are written in ascending order).
pub fn write_alignments(alignments: &[Alignment]) -> Vec<u8> {
    let mut out = String::new();
    for alignment in alignments {
        let mut first = true;
        for (i, j) in &alignment.links {
            if !first {
                out.push(' ');
            }
            out.push_str(&format!("{i}-{j}"));
            first = false;
        }
        out.push('\n');
    }
    out.into_bytes()
}

#[derive(Serialize, Deserialize)]
struct LogitHeader {
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct LogitRecord {
    tokens: Vec<String>,
    logits: Vec<Vec<f64>>,
}

/// Reads logits JSONL: a `{"labels": [...]}` header line followed by one
/// `{"tokens": [...], "logits": [[...], ...]}` record per sentence.
pub fn read_logits(
    bytes: &[u8],
) -> Result<(LabelVocabulary, Vec<LogitSentenceOf<f64>>), CorpusError> {
    let text = std::str::from_utf8(bytes).map_err(|e| CorpusError::ParseLine {
        line: 0,
        msg: format!("input is not valid UTF-8: {e}"),
    })?;
    let mut lines = text.lines();
    let header = lines.next().ok_or(CorpusError::MissingLogitHeader)?;
    let header: LogitHeader =
        serde_json::from_str(header).map_err(|_| CorpusError::MissingLogitHeader)?;
    let vocabulary = LabelVocabulary::new(header.labels)?;

    let mut sentences = Vec::new();
    for (record_index, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let record: LogitRecord =
            serde_json::from_str(line).map_err(|e| CorpusError::LogitRecord {
                record: record_index,
                msg: format!("{e}"),
            })?;
        if record.tokens.len() != record.logits.len() {
            return Err(CorpusError::LogitRecord {
                record: record_index,
                msg: format!(
                    "{} tokens but {} logit vectors",
                    record.tokens.len(),
                    record.logits.len()
                ),
            });
        }
        for (i, vector) in record.logits.iter().enumerate() {
            if vector.len() != vocabulary.len() {
                return Err(CorpusError::LogitRecord {
                    record: record_index,
                    msg: format!(
                        "token {i}: vector has {} dimensions, vocabulary has {}",
                        vector.len(),
                        vocabulary.len()
                    ),
                });
            }
            if let Some(bad) = vector.iter().find(|v| !v.is_finite()) {
                return Err(CorpusError::LogitRecord {
                    record: record_index,
                    msg: format!("token {i}: non-finite logit {bad}"),
                });
            }
        }
        sentences.push(LogitSentenceOf {
            tokens: Sentence::new(record.tokens),
            logits: record.logits,
        });
    }
    Ok((vocabulary, sentences))
}

/// Inverse of [`read_logits`].
pub fn write_logits(vocabulary: &LabelVocabulary, sentences: &[LogitSentenceOf<f64>]) -> Vec<u8> {
    let mut out = String::new();
    let header = LogitHeader {
        labels: vocabulary.labels().to_vec(),
    };
    out.push_str(&serde_json::to_string(&header).expect("header serializes"));
    out.push('\n');
    for sentence in sentences {
        let record = LogitRecord {
            tokens: sentence.tokens.tokens.clone(),
            logits: sentence.logits.clone(),
        };
        out.push_str(&serde_json::to_string(&record).expect("record serializes"));
        out.push('\n');
    }
    out.into_bytes()
}

/// Decodes a BIO-valid tag sequence into maximal labeled spans, sorted by
/// start. A span starts at each `B-X` and extends through consecutive `I-X`
/// of the same type.
pub fn extract_spans(sentence: &LabeledSentence) -> Vec<LabeledSpan> {
    let mut spans = Vec::new();
    let mut open: Option<LabeledSpan> = None;
    for (i, tag) in sentence.tags.iter().enumerate() {
        match tag {
            Tag::Begin(ty) => {
                if let Some(span) = open.take() {
                    spans.push(span);
                }
                open = Some(LabeledSpan::new(ty.clone(), i, i));
            }
            Tag::Inside(ty) => match open.as_mut() {
                Some(span) if span.entity_type == *ty => span.end = i,
                _ => {
                    // tolerated on repaired input this cannot happen; treat as start
                    if let Some(span) = open.take() {
                        spans.push(span);
                    }
                    open = Some(LabeledSpan::new(ty.clone(), i, i));
                }
            },
            Tag::Outside => {
                if let Some(span) = open.take() {
                    spans.push(span);
                }
            }
        }
    }
    if let Some(span) = open.take() {
        spans.push(span);
    }
    spans
}

/// Encodes disjoint spans as a BIO tag sequence of length `length`; inverse
/// of [`extract_spans`]. Untouched positions get `O`.
pub fn encode_spans(length: usize, spans: &[LabeledSpan]) -> Result<Vec<Tag>, CorpusError> {
    let mut sorted: Vec<&LabeledSpan> = spans.iter().collect();
    sorted.sort_by_key(|s| (s.start, s.end));
    let mut tags = vec![Tag::Outside; length];
    let mut previous: Option<&LabeledSpan> = None;
    for span in sorted {
        assert!(
            span.start <= span.end && span.end < length,
            "span {span:?} out of bounds for length {length}"
        );
        if let Some(prev) = previous {
            if span.start <= prev.end {
                return Err(CorpusError::OverlappingSpans(
                    prev.entity_type.clone(),
                    prev.start,
                    prev.end,
                    span.entity_type.clone(),
                    span.start,
                    span.end,
                ));
            }
        }
        tags[span.start] = Tag::Begin(span.entity_type.clone());
        for tag in tags.iter_mut().take(span.end + 1).skip(span.start + 1) {
            *tag = Tag::Inside(span.entity_type.clone());
        }
        previous = Some(span);
    }
    Ok(tags)
}
