//! Word-alignment-based label projection for cross-lingual token
//! classification: span mapping, alignment-quality filtering,
//! pre-tokenization, translate-train/translate-test projection, logit
//! ensembling, and span-level evaluation.
//!
//! Numeric code (logits, metrics) is generic over the scalar type via
//! `num-traits`; the concrete `f64` aliases below are what most callers
//! want.

pub mod cli;
pub mod corpus;
pub mod ensemble;
pub mod evaluate;
pub mod pretokenize;
pub mod projection;
pub mod testkit;

/// Default scalar for logits and metrics.
pub type Scalar = f64;

/// Per-token class logits at the default scalar.
pub type LogitSentence = corpus::LogitSentenceOf<Scalar>;
/// One ensembling problem at the default scalar.
pub type EnsembleInput = ensemble::EnsembleInputOf<Scalar>;
/// Evaluation report at the default scalar.
pub type EvalReport = evaluate::EvalReportOf<Scalar>;
/// Per-type metrics at the default scalar.
pub type Metrics = evaluate::MetricsOf<Scalar>;

pub use corpus::{
    Alignment, CandidateSpan, CorpusError, LabelVocabulary, LabeledSentence, LabeledSpan,
    ReadMode, Sentence, Tag,
};
pub use projection::{
    CorpusDiagnostics, Direction, FilterSet, ProjectionError, ProjectionOutcome, SpanStatus,
};
