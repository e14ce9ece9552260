//! Translate-train / translate-test logit ensembling.
//!
//! The translate-test stream predicts over the translated source sentence;
//! its per-token logits are projected onto the original target sentence
//! along the word alignment (reusing the span-projection semantics), then
//! averaged with the translate-train logits. Tokens without a projected
//! vector fall back to the translate-train stream alone.
//!
//! All numeric code is generic over the scalar; `f64` aliases live at the
//! crate root.

use std::collections::BTreeMap;

use num_traits::Float;
use thiserror::Error;

use crate::corpus::{
    extract_spans, repair_bio, Alignment, LabelVocabulary, LabeledSentence, LogitSentenceOf,
    Sentence,
};
use crate::projection::{
    project_instance, Direction, FilterSet, ProjectionError, SpanStatus,
};

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("label vocabularies differ: {left:?} vs {right:?}")]
    VocabularyMismatch { left: Vec<String>, right: Vec<String> },
    #[error("logit sentence has {actual} tokens, expected {expected}")]
    TokenCountMismatch { expected: usize, actual: usize },
    #[error("logit vector for token {token} has {actual} dimensions, vocabulary has {expected}")]
    DimensionMismatch {
        token: usize,
        expected: usize,
        actual: usize,
    },
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

/// Whether to average raw logits or softmax probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnsembleSpace {
    #[default]
    Logits,
    Probs,
}

/// One target-sentence ensembling problem. Both streams share `vocabulary`.
#[derive(Debug, Clone)]
pub struct EnsembleInputOf<T> {
    /// Translate-train logits over the original target sentence T.
    pub train_logits: LogitSentenceOf<T>,
    /// Translate-test logits over the translated source sentence S-hat.
    pub test_logits: LogitSentenceOf<T>,
    /// Alignment from S-hat to T.
    pub alignment: Alignment,
    pub vocabulary: LabelVocabulary,
}

/// Both logit streams must share one vocabulary, order included.
pub fn check_vocabulary_match(
    left: &LabelVocabulary,
    right: &LabelVocabulary,
) -> Result<(), EnsembleError> {
    if left != right {
        return Err(EnsembleError::VocabularyMismatch {
            left: left.labels().to_vec(),
            right: right.labels().to_vec(),
        });
    }
    Ok(())
}

/// Index of the maximal element; ties break to the lowest index.
pub fn argmax<T: Float>(vector: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in vector.iter().enumerate().skip(1) {
        if *v > vector[best] {
            best = i;
        }
    }
    best
}

/// BIO-repaired argmax decoding of a logit stream.
pub fn decode_argmax<T: Float>(
    logits: &LogitSentenceOf<T>,
    vocabulary: &LabelVocabulary,
) -> Result<LabeledSentence, EnsembleError> {
    let mut tags = Vec::with_capacity(logits.len());
    for (token, vector) in logits.logits.iter().enumerate() {
        if vector.len() != vocabulary.len() {
            return Err(EnsembleError::DimensionMismatch {
                token,
                expected: vocabulary.len(),
                actual: vector.len(),
            });
        }
        tags.push(vocabulary.tag_at(argmax(vector)));
    }
    Ok(LabeledSentence::new(logits.tokens.clone(), repair_bio(&tags))
        .expect("one tag per token"))
}

fn softmax<T: Float>(vector: &[T]) -> Vec<T> {
    let max = vector.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = vector.iter().map(|&v| (v - max).exp()).collect();
    let sum = exps.iter().copied().fold(T::zero(), |a, b| a + b);
    exps.into_iter().map(|e| e / sum).collect()
}

/// Projects per-token logit vectors from the translated source sentence onto
/// the target sentence, span-wise.
///
/// Spans are decoded from `predicted` (the repaired argmax of
/// `test_logits`) and projected with translate-test semantics. Within each
/// projected span the first target position receives the vector of the
/// span's first source token and every later covered position the vector of
/// the span's last source token. Tokens outside projected spans are absent.
pub fn project_logits<T: Float + Clone>(
    test_logits: &LogitSentenceOf<T>,
    predicted: &LabeledSentence,
    alignment: &Alignment,
    target: &Sentence,
    filters: &FilterSet,
) -> Result<BTreeMap<usize, Vec<T>>, EnsembleError> {
    if predicted.len() != test_logits.len() {
        return Err(EnsembleError::TokenCountMismatch {
            expected: test_logits.len(),
            actual: predicted.len(),
        });
    }
    let outcome = project_instance(predicted, target, alignment, Direction::Test, filters)?;
    let source_spans = extract_spans(predicted);
    debug_assert_eq!(source_spans.len(), outcome.span_reports.len());

    let mut map = BTreeMap::new();
    for report in &outcome.span_reports {
        if report.status != SpanStatus::Projected {
            continue;
        }
        let (first, last) = report.target_range.expect("projected spans carry a range");
        let first_vector = test_logits.logits[report.span.start].clone();
        let last_vector = test_logits.logits[report.span.end].clone();
        map.insert(first, first_vector);
        for j in first + 1..=last {
            map.insert(j, last_vector.clone());
        }
    }
    Ok(map)
}

/// Averages the two streams per target token and decodes the result.
///
/// Tokens with a projected translate-test vector take the elementwise mean
/// of both streams; all others take the translate-train vector alone. The
/// decoded tag sequence is BIO-repaired before return.
pub fn ensemble<T: Float + Clone>(
    input: &EnsembleInputOf<T>,
    filters: &FilterSet,
    space: EnsembleSpace,
) -> Result<LabeledSentence, EnsembleError> {
    let vocabulary = &input.vocabulary;
    for logits in [&input.train_logits, &input.test_logits] {
        for (token, vector) in logits.logits.iter().enumerate() {
            if vector.len() != vocabulary.len() {
                return Err(EnsembleError::DimensionMismatch {
                    token,
                    expected: vocabulary.len(),
                    actual: vector.len(),
                });
            }
        }
    }

    let predicted = decode_argmax(&input.test_logits, vocabulary)?;
    let projected = project_logits(
        &input.test_logits,
        &predicted,
        &input.alignment,
        &input.train_logits.tokens,
        filters,
    )?;

    let two = T::one() + T::one();
    let mut tags = Vec::with_capacity(input.train_logits.len());
    for (j, train_vector) in input.train_logits.logits.iter().enumerate() {
        let index = match projected.get(&j) {
            Some(test_vector) => {
                let (a, b) = match space {
                    EnsembleSpace::Logits => (train_vector.clone(), test_vector.clone()),
                    EnsembleSpace::Probs => (softmax(train_vector), softmax(test_vector)),
                };
                let averaged: Vec<T> = a
                    .iter()
                    .zip(&b)
                    .map(|(&x, &y)| (x + y) / two)
                    .collect();
                argmax(&averaged)
            }
            None => argmax(train_vector),
        };
        tags.push(vocabulary.tag_at(index));
    }
    Ok(
        LabeledSentence::new(input.train_logits.tokens.clone(), repair_bio(&tags))
            .expect("one tag per token"),
    )
}
