//! Span-based label projection along word alignments: candidate-span
//! induction, the first/last mapping rule, the naive per-token baseline,
//! alignment-quality filters with translate-train vs translate-test
//! semantics, and whole-corpus drivers with diagnostics.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{
    extract_spans, repair_bio, Alignment, CandidateSpan, LabeledSentence, LabeledSpan, Sentence,
    Tag,
};

#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error("alignment link ({src}, {tgt}) out of bounds for {src_len} source and {tgt_len} target tokens")]
    LinkOutOfBounds {
        src: usize,
        tgt: usize,
        src_len: usize,
        tgt_len: usize,
    },
    #[error("corpus length mismatch: {sources} sources, {targets} targets, {alignments} alignments")]
    CorpusLengthMismatch {
        sources: usize,
        targets: usize,
        alignments: usize,
    },
    #[error("filter {filter} is only valid for direction {direction}")]
    IncompatibleFilter {
        filter: &'static str,
        direction: &'static str,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Train,
    Test,
}

/// Which alignment-quality filters are active. All-false is NO-FILT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct FilterSet {
    pub comp_src: bool,
    pub comp_tgt: bool,
    pub comp_ins: bool,
    pub rstr_tgt: bool,
}

impl FilterSet {
    pub const NO_FILT: FilterSet = FilterSet {
        comp_src: false,
        comp_tgt: false,
        comp_ins: false,
        rstr_tgt: false,
    };

    /// comp-ins is train-only, rstr-tgt is test-only.
    pub fn check_direction(&self, direction: Direction) -> Result<(), ProjectionError> {
        if self.comp_ins && direction == Direction::Test {
            return Err(ProjectionError::IncompatibleFilter {
                filter: "comp-ins",
                direction: "train",
            });
        }
        if self.rstr_tgt && direction == Direction::Train {
            return Err(ProjectionError::IncompatibleFilter {
                filter: "rstr-tgt",
                direction: "test",
            });
        }
        Ok(())
    }

    fn has_per_span_filter(&self) -> bool {
        self.comp_src || self.comp_tgt
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpanStatus {
    Projected,
    FilteredSrc,
    FilteredTgt,
    FilteredIns,
    Unaligned,
    Conflict,
}

/// Per-source-span outcome record. `target_range` is the inclusive range of
/// target positions actually written, present only for projected spans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanReport {
    pub span: LabeledSpan,
    pub candidate: Option<CandidateSpan>,
    pub status: SpanStatus,
    pub target_range: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionOutcome {
    /// Absent exactly when a TRAIN instance was discarded.
    pub projected: Option<LabeledSentence>,
    pub span_reports: Vec<SpanReport>,
    pub instance_kept: bool,
    /// TRAIN instance discarded by the instance-level COMP-INS check.
    pub filtered_ins: bool,
    /// Spans silently omitted under TRAIN without per-span filters.
    pub omitted_span_warnings: usize,
}

/// Target indices aligned to any source token of `span`; `None` when the
/// span is entirely unaligned.
pub fn candidate_span(
    span: &LabeledSpan,
    alignment: &Alignment,
    tgt_len: usize,
) -> Option<CandidateSpan> {
    CandidateSpan::new(
        alignment
            .links
            .iter()
            .filter(|(i, j)| *i >= span.start && *i <= span.end && *j < tgt_len)
            .map(|&(_, j)| j),
    )
}

/// The first/last mapping rule: B-tag on the candidate's first position,
/// I-tags on every position through the last, gaps filled so the projected
/// span is continuous.
pub fn span_map(span: &LabeledSpan, cand: &CandidateSpan) -> Vec<(usize, Tag)> {
    let first = cand.first();
    let last = cand.last();
    let mut out = Vec::with_capacity(last - first + 1);
    out.push((first, Tag::Begin(span.entity_type.clone())));
    for j in first + 1..=last {
        out.push((j, Tag::Inside(span.entity_type.clone())));
    }
    out
}

/// RSTR-TGT narrowing: a single-token source span maps only to the
/// candidate's first position.
pub fn apply_rstr_tgt(span: &LabeledSpan, cand: &CandidateSpan) -> Vec<(usize, Tag)> {
    debug_assert!(
        span.is_single_token(),
        "rstr-tgt narrowing only applies to single-token spans"
    );
    vec![(cand.first(), Tag::Begin(span.entity_type.clone()))]
}

/// COMP-SRC: every source token of the span has at least one alignment link.
pub fn check_comp_src(span: &LabeledSpan, alignment: &Alignment) -> bool {
    (span.start..=span.end).all(|i| alignment.links.iter().any(|&(s, _)| s == i))
}

/// COMP-TGT: the candidate indices form a contiguous run.
pub fn check_comp_tgt(cand: &CandidateSpan) -> bool {
    cand.len() == cand.last() - cand.first() + 1
}

/// COMP-INS: the entity-type multisets of source and projected spans match.
pub fn check_comp_ins(src_spans: &[LabeledSpan], projected_spans: &[LabeledSpan]) -> bool {
    let types = |spans: &[LabeledSpan]| {
        let mut t: Vec<String> = spans.iter().map(|s| s.entity_type.clone()).collect();
        t.sort();
        t
    };
    types(src_spans) == types(projected_spans)
}

/// Per-token baseline: each target token takes the tag of the lowest-index
/// source token aligned to it, then the sequence is BIO-repaired.
pub fn naive_project(
    src: &LabeledSentence,
    alignment: &Alignment,
    target: &Sentence,
) -> Result<LabeledSentence, ProjectionError> {
    check_links(alignment, src.len(), target.len())?;
    let mut tags = vec![Tag::Outside; target.len()];
    for (j, tag) in tags.iter_mut().enumerate() {
        let source = alignment
            .links
            .iter()
            .filter(|&&(_, t)| t == j)
            .map(|&(s, _)| s)
            .min();
        if let Some(s) = source {
            *tag = src.tags[s].clone();
        }
    }
    Ok(LabeledSentence::new(target.clone(), repair_bio(&tags))
        .expect("tags constructed at target length"))
}

fn check_links(
    alignment: &Alignment,
    src_len: usize,
    tgt_len: usize,
) -> Result<(), ProjectionError> {
    for &(s, t) in &alignment.links {
        if s >= src_len || t >= tgt_len {
            return Err(ProjectionError::LinkOutOfBounds {
                src: s,
                tgt: t,
                src_len,
                tgt_len,
            });
        }
    }
    Ok(())
}

/// Projects one instance.
///
/// Spans are processed in source start order. Checks run on the raw
/// candidate set in fixed order: unaligned, COMP-SRC, COMP-TGT; RSTR-TGT
/// narrowing applies after the checks pass. A span whose target range
/// overlaps an already-written range is dropped (first span wins).
///
/// TRAIN with any per-span filter active: a single failing span discards the
/// instance. TRAIN without per-span filters: failing spans are omitted with
/// a warning; the instance is discarded only when it has spans and none
/// could be projected. COMP-INS runs last, on the realized output. TEST:
/// failing spans leave their tokens "O"; output is always present.
pub fn project_instance(
    src: &LabeledSentence,
    tgt: &Sentence,
    alignment: &Alignment,
    direction: Direction,
    filters: &FilterSet,
) -> Result<ProjectionOutcome, ProjectionError> {
    filters.check_direction(direction)?;
    check_links(alignment, src.len(), tgt.len())?;

    let src_spans = extract_spans(src);
    let mut tags = vec![Tag::Outside; tgt.len()];
    let mut occupied = vec![false; tgt.len()];
    let mut reports: Vec<SpanReport> = Vec::with_capacity(src_spans.len());

    for span in &src_spans {
        let candidate = candidate_span(span, alignment, tgt.len());
        let mut report = SpanReport {
            span: span.clone(),
            candidate: candidate.clone(),
            status: SpanStatus::Projected,
            target_range: None,
        };
        let cand = match candidate {
            Some(c) => c,
            None => {
                report.status = SpanStatus::Unaligned;
                reports.push(report);
                continue;
            }
        };
        if filters.comp_src && !check_comp_src(span, alignment) {
            report.status = SpanStatus::FilteredSrc;
            reports.push(report);
            continue;
        }
        if filters.comp_tgt && !check_comp_tgt(&cand) {
            report.status = SpanStatus::FilteredTgt;
            reports.push(report);
            continue;
        }
        let mapping = if filters.rstr_tgt && span.is_single_token() {
            apply_rstr_tgt(span, &cand)
        } else {
            span_map(span, &cand)
        };
        if mapping.iter().any(|&(j, _)| occupied[j]) {
            report.status = SpanStatus::Conflict;
            reports.push(report);
            continue;
        }
        let first = mapping.first().expect("mapping non-empty").0;
        let last = mapping.last().expect("mapping non-empty").0;
        for (j, tag) in mapping {
            occupied[j] = true;
            tags[j] = tag;
        }
        report.target_range = Some((first, last));
        reports.push(report);
    }

    let projected_count = reports
        .iter()
        .filter(|r| r.status == SpanStatus::Projected)
        .count();
    let failed_count = reports.len() - projected_count;

    let mut kept = true;
    let mut filtered_ins = false;
    let mut omitted = 0;
    if direction == Direction::Train {
        if filters.has_per_span_filter() {
            kept = failed_count == 0;
        } else if !src_spans.is_empty() && projected_count == 0 {
            kept = false;
        } else {
            omitted = failed_count;
        }
        if kept && filters.comp_ins {
            let output = LabeledSentence::new(tgt.clone(), tags.clone())
                .expect("tags constructed at target length");
            if !check_comp_ins(&src_spans, &extract_spans(&output)) {
                kept = false;
                filtered_ins = true;
            }
        }
    }

    let projected = match direction {
        Direction::Train if !kept => None,
        _ => Some(
            LabeledSentence::new(tgt.clone(), tags).expect("tags constructed at target length"),
        ),
    };

    Ok(ProjectionOutcome {
        projected,
        span_reports: reports,
        instance_kept: match direction {
            Direction::Train => kept,
            Direction::Test => true,
        },
        filtered_ins,
        omitted_span_warnings: omitted,
    })
}

/// Corpus-level counters in the style of the recovered-instance and
/// mapped-span diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusDiagnostics {
    pub direction: &'static str,
    pub total_instances: usize,
    pub kept_instances: usize,
    /// kept / total; absent for an empty corpus. TRAIN only.
    pub recovered_rate: Option<f64>,
    pub projected_spans: usize,
    /// Projected span count under NO-FILT on the same inputs. TEST only.
    pub no_filt_projected_spans: Option<usize>,
    /// projected_spans / no_filt_projected_spans; absent when the
    /// denominator is zero. TEST only. Can exceed 1.0: filters can prevent
    /// interference between spans of the same instance.
    pub mapped_span_fraction: Option<f64>,
    pub unaligned_spans: usize,
    pub filtered_src_spans: usize,
    pub filtered_tgt_spans: usize,
    pub conflict_spans: usize,
    pub filtered_ins_instances: usize,
    pub omitted_span_warnings: usize,
}

/// Projects a corpus instance-by-instance, in input order.
pub fn project_corpus(
    sources: &[LabeledSentence],
    targets: &[Sentence],
    alignments: &[Alignment],
    direction: Direction,
    filters: &FilterSet,
) -> Result<(Vec<ProjectionOutcome>, CorpusDiagnostics), ProjectionError> {
    if sources.len() != targets.len() || sources.len() != alignments.len() {
        return Err(ProjectionError::CorpusLengthMismatch {
            sources: sources.len(),
            targets: targets.len(),
            alignments: alignments.len(),
        });
    }
    filters.check_direction(direction)?;

    // instances are independent; process in parallel, emit in input order,
    // surface the first error by input index
    let results: Vec<Result<ProjectionOutcome, ProjectionError>> = (0..sources.len())
        .into_par_iter()
        .map(|i| project_instance(&sources[i], &targets[i], &alignments[i], direction, filters))
        .collect();
    let mut outcomes = Vec::with_capacity(sources.len());
    for result in results {
        outcomes.push(result?);
    }

    let count_status = |status: SpanStatus| {
        outcomes
            .iter()
            .flat_map(|o| &o.span_reports)
            .filter(|r| r.status == status)
            .count()
    };
    let total = outcomes.len();
    let kept = outcomes.iter().filter(|o| o.instance_kept).count();
    let projected_spans = count_status(SpanStatus::Projected);

    let (no_filt_projected_spans, mapped_span_fraction) = if direction == Direction::Test {
        let mut baseline = 0usize;
        for ((src, tgt), alignment) in sources.iter().zip(targets).zip(alignments) {
            let outcome =
                project_instance(src, tgt, alignment, direction, &FilterSet::NO_FILT)?;
            baseline += outcome
                .span_reports
                .iter()
                .filter(|r| r.status == SpanStatus::Projected)
                .count();
        }
        let fraction = if baseline > 0 {
            Some(projected_spans as f64 / baseline as f64)
        } else {
            None
        };
        (Some(baseline), fraction)
    } else {
        (None, None)
    };

    let diagnostics = CorpusDiagnostics {
        direction: match direction {
            Direction::Train => "train",
            Direction::Test => "test",
        },
        total_instances: total,
        kept_instances: kept,
        recovered_rate: match direction {
            Direction::Train if total > 0 => Some(kept as f64 / total as f64),
            _ => None,
        },
        projected_spans,
        no_filt_projected_spans,
        mapped_span_fraction,
        unaligned_spans: count_status(SpanStatus::Unaligned),
        filtered_src_spans: count_status(SpanStatus::FilteredSrc),
        filtered_tgt_spans: count_status(SpanStatus::FilteredTgt),
        conflict_spans: count_status(SpanStatus::Conflict),
        filtered_ins_instances: outcomes.iter().filter(|o| o.filtered_ins).count(),
        omitted_span_warnings: outcomes.iter().map(|o| o.omitted_span_warnings).sum(),
    };
    Ok((outcomes, diagnostics))
}

/// Convenience wrapper used by tests: project and re-encode as spans.
pub fn projected_spans(outcome: &ProjectionOutcome) -> Vec<LabeledSpan> {
    outcome
        .projected
        .as_ref()
        .map(extract_spans)
        .unwrap_or_default()
}
