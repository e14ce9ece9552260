//! Span-level precision/recall/F1 with exact-boundary matching and
//! repair-then-decode semantics, plus text/JSON report rendering.

use std::collections::BTreeMap;

use num_traits::{Float, FromPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{extract_spans, repair_bio, LabeledSentence};

#[derive(Debug, Error)]
pub enum EvaluateError {
    #[error("corpus length mismatch: {gold} gold sentences, {pred} predicted")]
    CorpusLengthMismatch { gold: usize, pred: usize },
    #[error("sentence {sentence}: {gold} gold tokens, {pred} predicted")]
    TokenCountMismatch {
        sentence: usize,
        gold: usize,
        pred: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsOf<T> {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

impl<T: Float + FromPrimitive> MetricsOf<T> {
    fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        // 0/0 is defined as 0 throughout
        let ratio = |n: usize, d: usize| {
            if d == 0 {
                T::zero()
            } else {
                T::from_usize(n).unwrap() / T::from_usize(d).unwrap()
            }
        };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let two = T::one() + T::one();
        let f1 = if precision + recall == T::zero() {
            T::zero()
        } else {
            two * precision * recall / (precision + recall)
        };
        MetricsOf {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReportOf<T> {
    pub per_type: BTreeMap<String, MetricsOf<T>>,
    pub micro: MetricsOf<T>,
    pub sentences: usize,
    pub tokens: usize,
}

/// Span-level F1 over a corpus.
///
/// Both sides are BIO-repaired before decoding. A predicted span is a true
/// positive iff a gold span of the same sentence has the identical
/// (type, start, end) triple; each gold span matches at most one prediction.
pub fn span_f1<T: Float + FromPrimitive>(
    gold: &[LabeledSentence],
    pred: &[LabeledSentence],
) -> Result<EvalReportOf<T>, EvaluateError> {
    if gold.len() != pred.len() {
        return Err(EvaluateError::CorpusLengthMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut counts: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    let mut tokens = 0usize;
    for (index, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(EvaluateError::TokenCountMismatch {
                sentence: index,
                gold: g.len(),
                pred: p.len(),
            });
        }
        tokens += g.len();
        let decode = |s: &LabeledSentence| {
            let repaired = LabeledSentence::new(s.sentence.clone(), repair_bio(&s.tags))
                .expect("repair preserves length");
            extract_spans(&repaired)
        };
        let gold_spans = decode(g);
        let mut matched = vec![false; gold_spans.len()];
        for span in decode(p) {
            let hit = gold_spans
                .iter()
                .enumerate()
                .position(|(i, gs)| !matched[i] && *gs == span);
            let entry = counts.entry(span.entity_type.clone()).or_default();
            match hit {
                Some(i) => {
                    matched[i] = true;
                    entry.0 += 1;
                }
                None => entry.1 += 1,
            }
        }
        for (i, span) in gold_spans.iter().enumerate() {
            if !matched[i] {
                counts.entry(span.entity_type.clone()).or_default().2 += 1;
            }
        }
    }

    let per_type: BTreeMap<String, MetricsOf<T>> = counts
        .iter()
        .map(|(ty, &(tp, fp, fn_))| (ty.clone(), MetricsOf::from_counts(tp, fp, fn_)))
        .collect();
    let (tp, fp, fn_) = counts
        .values()
        .fold((0, 0, 0), |(a, b, c), &(x, y, z)| (a + x, b + y, c + z));
    Ok(EvalReportOf {
        per_type,
        micro: MetricsOf::from_counts(tp, fp, fn_),
        sentences: gold.len(),
        tokens,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

/// Renders a report as a fixed-width text table or stable-key-ordered JSON.
pub fn render_report(report: &EvalReportOf<f64>, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        ReportFormat::Text => {
            let mut out = String::new();
            out.push_str(&format!(
                "{:<12} {:>6} {:>6} {:>6} {:>10} {:>10} {:>10}\n",
                "type", "tp", "fp", "fn", "precision", "recall", "f1"
            ));
            let row = |name: &str, m: &MetricsOf<f64>| {
                format!(
                    "{:<12} {:>6} {:>6} {:>6} {:>10.4} {:>10.4} {:>10.4}\n",
                    name, m.tp, m.fp, m.fn_, m.precision, m.recall, m.f1
                )
            };
            for (ty, metrics) in &report.per_type {
                out.push_str(&row(ty, metrics));
            }
            out.push_str(&row("micro", &report.micro));
            out.push_str(&format!(
                "sentences: {}  tokens: {}\n",
                report.sentences, report.tokens
            ));
            out.into_bytes()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Sentence, Tag};

    fn labeled(tag_strs: &[&str]) -> LabeledSentence {
        let tokens: Vec<String> = (0..tag_strs.len()).map(|i| format!("t{i}")).collect();
        let tags: Vec<Tag> = tag_strs.iter().map(|s| s.parse().unwrap()).collect();
        LabeledSentence::new(Sentence::new(tokens), tags).unwrap()
    }

    fn report(gold: &[&[&str]], pred: &[&[&str]]) -> EvalReportOf<f64> {
        let gold: Vec<_> = gold.iter().map(|t| labeled(t)).collect();
        let pred: Vec<_> = pred.iter().map(|t| labeled(t)).collect();
        span_f1(&gold, &pred).unwrap()
    }

    #[test]
    fn perfect_match() {
        let r = report(
            &[&["B-PER", "I-PER", "O", "B-LOC"]],
            &[&["B-PER", "I-PER", "O", "B-LOC"]],
        );
        assert_eq!(r.micro.f1, 1.0);
        for metrics in r.per_type.values() {
            assert_eq!(metrics.precision, 1.0);
            assert_eq!(metrics.recall, 1.0);
            assert_eq!(metrics.f1, 1.0);
        }
    }

    #[test]
    fn half_right() {
        // gold 2 spans; pred has 1 of them plus 1 spurious
        let r = report(
            &[&["B-X", "O", "B-X", "O"]],
            &[&["B-X", "O", "O", "B-X"]],
        );
        assert_eq!(r.micro.precision, 0.5);
        assert_eq!(r.micro.recall, 0.5);
        assert_eq!(r.micro.f1, 0.5);
    }

    #[test]
    fn boundary_off_by_one_is_fp_and_fn() {
        let r = report(&[&["B-X", "I-X", "O"]], &[&["B-X", "I-X", "I-X"]]);
        let m = &r.per_type["X"];
        assert_eq!((m.tp, m.fp, m.fn_), (0, 1, 1));
        assert_eq!(m.f1, 0.0);
    }

    #[test]
    fn empty_corpus() {
        let r = report(&[], &[]);
        assert_eq!(r.sentences, 0);
        assert_eq!(r.micro.f1, 0.0);
    }

    #[test]
    fn length_mismatch_names_sentence() {
        let gold = vec![labeled(&["O", "O"])];
        let pred = vec![labeled(&["O"])];
        let err = span_f1::<f64>(&gold, &pred).unwrap_err();
        assert!(matches!(
            err,
            EvaluateError::TokenCountMismatch { sentence: 0, .. }
        ));
    }

    #[test]
    fn swapping_gold_and_pred_swaps_precision_and_recall() {
        let a = &[&["B-X", "O", "B-Y", "O"][..]];
        let b = &[&["B-X", "I-X", "O", "B-Y"][..]];
        let forward = report(a, b);
        let backward = report(b, a);
        assert_eq!(forward.micro.precision, backward.micro.recall);
        assert_eq!(forward.micro.recall, backward.micro.precision);
        assert_eq!(forward.micro.f1, backward.micro.f1);
        assert_eq!(forward.micro.fp, backward.micro.fn_);
        assert_eq!(forward.micro.fn_, backward.micro.fp);
    }

    #[test]
    fn pred_is_repaired_before_decoding() {
        // orphan I-X in the prediction decodes as B-X after repair
        let r = report(&[&["B-X", "O"]], &[&["I-X", "O"]]);
        assert_eq!(r.micro.f1, 1.0);
    }

    #[test]
    fn text_report_has_per_type_and_micro_rows() {
        let r = report(&[&["B-X", "O"]], &[&["B-X", "O"]]);
        let text = String::from_utf8(render_report(&r, ReportFormat::Text)).unwrap();
        assert!(text.contains("X "));
        assert!(text.contains("micro"));
    }

    #[test]
    fn json_report_roundtrips() {
        let r = report(&[&["B-X", "O"]], &[&["O", "B-X"]]);
        let json = render_report(&r, ReportFormat::Json);
        let value: serde_json::Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(value["micro"]["tp"], 0);
        assert_eq!(value["micro"]["fp"], 1);
        assert_eq!(value["micro"]["fn_"], 1);
    }
}
