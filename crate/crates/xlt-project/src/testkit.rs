//! Independent brute-force projection oracle plus exhaustive and random
//! instance generators. Backs the `selftest` subcommand and the acceptance
//! suite.
//!
//! The oracle deliberately shares no helper code with the projection
//! module: candidate sets are found by scanning every link, continuity is
//! set equality against an integer range, filters follow their definitions
//! directly, and conflicts use an explicit occupancy array. Span decoding
//! here is its own scanner over tag strings.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::{
    Alignment, CandidateSpan, LabelVocabulary, LabeledSentence, LabeledSpan, LogitSentenceOf,
    Sentence, Tag,
};
use crate::projection::{
    project_instance, Direction, FilterSet, ProjectionOutcome, SpanReport, SpanStatus,
};

/// One small instance for the exhaustive sweep. `alignment_bits` indexes
/// the subsets of the src_len x tgt_len link grid: bit `i * tgt_len + j`
/// is the link (i, j).
#[derive(Debug, Clone)]
pub struct InstanceSpec {
    pub src_len: usize,
    pub tgt_len: usize,
    pub spans: Vec<LabeledSpan>,
    pub alignment_bits: u64,
}

impl InstanceSpec {
    pub fn materialize(&self) -> (LabeledSentence, Sentence, Alignment) {
        let tokens: Vec<String> = (0..self.src_len).map(|i| format!("s{i}")).collect();
        let mut tags = vec![Tag::Outside; self.src_len];
        for span in &self.spans {
            tags[span.start] = Tag::Begin(span.entity_type.clone());
            for tag in tags.iter_mut().take(span.end + 1).skip(span.start + 1) {
                *tag = Tag::Inside(span.entity_type.clone());
            }
        }
        let src = LabeledSentence::new(Sentence::new(tokens), tags).expect("lengths match");
        let tgt = Sentence::new((0..self.tgt_len).map(|j| format!("t{j}")).collect());
        let links = (0..self.src_len).flat_map(|i| {
            (0..self.tgt_len).filter_map(move |j| {
                if self.alignment_bits >> (i * self.tgt_len + j) & 1 == 1 {
                    Some((i, j))
                } else {
                    None
                }
            })
        });
        (src, tgt, Alignment::new(links))
    }
}

fn decode_tag_strings(tags: &[String]) -> Vec<(String, usize, usize)> {
    let mut spans = Vec::new();
    let mut i = 0;
    while i < tags.len() {
        if let Some(ty) = tags[i].strip_prefix("B-") {
            let start = i;
            let mut end = i;
            while end + 1 < tags.len() && tags[end + 1] == format!("I-{ty}") {
                end += 1;
            }
            spans.push((ty.to_string(), start, end));
            i = end + 1;
        } else {
            i += 1;
        }
    }
    spans
}

/// Brute-force reference for `project_instance`, computed by literal
/// enumeration.
pub fn oracle_project(
    src: &LabeledSentence,
    tgt: &Sentence,
    alignment: &Alignment,
    direction: Direction,
    filters: &FilterSet,
) -> ProjectionOutcome {
    let src_tags: Vec<String> = src.tags.iter().map(|t| t.to_string()).collect();
    let spans = decode_tag_strings(&src_tags);
    let tgt_len = tgt.len();

    let mut out_tags: Vec<String> = vec!["O".to_string(); tgt_len];
    let mut occupancy = vec![false; tgt_len];
    let mut reports: Vec<SpanReport> = Vec::new();

    for (ty, start, end) in &spans {
        let span = LabeledSpan::new(ty.clone(), *start, *end);
        // candidate by scanning every target position against every link
        let cand: Vec<usize> = (0..tgt_len)
            .filter(|&j| (*start..=*end).any(|i| alignment.links.contains(&(i, j))))
            .collect();
        let candidate = CandidateSpan::new(cand.iter().copied());
        let mut push = |status: SpanStatus, range: Option<(usize, usize)>| {
            reports.push(SpanReport {
                span: span.clone(),
                candidate: candidate.clone(),
                status,
                target_range: range,
            });
        };
        if cand.is_empty() {
            push(SpanStatus::Unaligned, None);
            continue;
        }
        if filters.comp_src {
            let fully_aligned =
                (*start..=*end).all(|i| (0..tgt_len).any(|j| alignment.links.contains(&(i, j))));
            if !fully_aligned {
                push(SpanStatus::FilteredSrc, None);
                continue;
            }
        }
        let lo = *cand.first().expect("non-empty");
        let hi = *cand.last().expect("non-empty");
        if filters.comp_tgt {
            let range: Vec<usize> = (lo..=hi).collect();
            if cand != range {
                push(SpanStatus::FilteredTgt, None);
                continue;
            }
        }
        let positions: Vec<usize> = if filters.rstr_tgt && start == end {
            vec![lo]
        } else {
            (lo..=hi).collect()
        };
        if positions.iter().any(|&j| occupancy[j]) {
            push(SpanStatus::Conflict, None);
            continue;
        }
        for (k, &j) in positions.iter().enumerate() {
            occupancy[j] = true;
            out_tags[j] = if k == 0 {
                format!("B-{ty}")
            } else {
                format!("I-{ty}")
            };
        }
        push(
            SpanStatus::Projected,
            Some((positions[0], *positions.last().expect("non-empty"))),
        );
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
        if filters.comp_src || filters.comp_tgt {
            kept = failed_count == 0;
        } else if !spans.is_empty() && projected_count == 0 {
            kept = false;
        } else {
            omitted = failed_count;
        }
        if kept && filters.comp_ins {
            let mut src_types: Vec<&String> = spans.iter().map(|(ty, _, _)| ty).collect();
            let out_spans = decode_tag_strings(&out_tags);
            let mut out_types: Vec<&String> = out_spans.iter().map(|(ty, _, _)| ty).collect();
            src_types.sort();
            out_types.sort();
            if src_types != out_types {
                kept = false;
                filtered_ins = true;
            }
        }
    }

    let tags: Vec<Tag> = out_tags.iter().map(|t| t.parse().expect("valid")).collect();
    let projected = if direction == Direction::Train && !kept {
        None
    } else {
        Some(LabeledSentence::new(tgt.clone(), tags).expect("lengths match"))
    };
    ProjectionOutcome {
        projected,
        span_reports: reports,
        instance_kept: direction == Direction::Test || kept,
        filtered_ins,
        omitted_span_warnings: omitted,
    }
}

/// All legal (direction, filter set) pairs.
pub fn legal_filter_combinations() -> Vec<(Direction, FilterSet)> {
    let mut combos = Vec::new();
    for comp_src in [false, true] {
        for comp_tgt in [false, true] {
            for third in [false, true] {
                combos.push((
                    Direction::Train,
                    FilterSet {
                        comp_src,
                        comp_tgt,
                        comp_ins: third,
                        rstr_tgt: false,
                    },
                ));
                combos.push((
                    Direction::Test,
                    FilterSet {
                        comp_src,
                        comp_tgt,
                        comp_ins: false,
                        rstr_tgt: third,
                    },
                ));
            }
        }
    }
    combos
}

/// Span layouts for the exhaustive sweep: every one-span labeling with one
/// type, and every disjoint two-span labeling with equal and distinct
/// types.
pub fn span_layouts(src_len: usize) -> Vec<Vec<LabeledSpan>> {
    let mut layouts = Vec::new();
    let singles: Vec<(usize, usize)> = (0..src_len)
        .flat_map(|s| (s..src_len).map(move |e| (s, e)))
        .collect();
    for &(s, e) in &singles {
        layouts.push(vec![LabeledSpan::new("X", s, e)]);
    }
    for &(s1, e1) in &singles {
        for &(s2, e2) in &singles {
            if e1 + 1 <= s2 && s2 > e1 {
                layouts.push(vec![
                    LabeledSpan::new("X", s1, e1),
                    LabeledSpan::new("X", s2, e2),
                ]);
                layouts.push(vec![
                    LabeledSpan::new("X", s1, e1),
                    LabeledSpan::new("Y", s2, e2),
                ]);
            }
        }
    }
    layouts
}

#[derive(Debug, Default, Clone)]
pub struct SweepStats {
    pub cases: u64,
    pub disagreements: u64,
    pub first_disagreement: Option<String>,
}

impl SweepStats {
    fn merge(mut self, other: SweepStats) -> SweepStats {
        self.cases += other.cases;
        self.disagreements += other.disagreements;
        if self.first_disagreement.is_none() {
            self.first_disagreement = other.first_disagreement;
        }
        self
    }
}

/// Compares `project_instance` with the oracle on every instance with
/// source and target lengths up to `max_len`, every alignment subset,
/// every one- and two-span labeling, and every legal direction/filter
/// combination. Parallelized over alignment indices.
pub fn exhaustive_sweep(max_len: usize) -> SweepStats {
    let combos = legal_filter_combinations();
    let mut stats = SweepStats::default();
    for src_len in 1..=max_len {
        for tgt_len in 1..=max_len {
            let layouts = span_layouts(src_len);
            let alignment_count: u64 = 1 << (src_len * tgt_len);
            let partial = (0..alignment_count)
                .into_par_iter()
                .map(|alignment_bits| {
                    let mut local = SweepStats::default();
                    for layout in &layouts {
                        let spec = InstanceSpec {
                            src_len,
                            tgt_len,
                            spans: layout.clone(),
                            alignment_bits,
                        };
                        let (src, tgt, alignment) = spec.materialize();
                        for (direction, filters) in &combos {
                            let actual =
                                project_instance(&src, &tgt, &alignment, *direction, filters)
                                    .expect("in-bounds by construction");
                            let expected =
                                oracle_project(&src, &tgt, &alignment, *direction, filters);
                            local.cases += 1;
                            if actual != expected {
                                local.disagreements += 1;
                                if local.first_disagreement.is_none() {
                                    local.first_disagreement = Some(format!(
                                        "src_len={src_len} tgt_len={tgt_len} spans={layout:?} \
                                         alignment_bits={alignment_bits} direction={direction:?} \
                                         filters={filters:?}\n  actual: {actual:?}\n  oracle: {expected:?}"
                                    ));
                                }
                            }
                        }
                    }
                    local
                })
                .reduce(SweepStats::default, SweepStats::merge);
            stats = stats.merge(partial);
        }
    }
    stats
}

#[derive(Debug, Default, Clone)]
pub struct MonotonicityStats {
    pub cases: u64,
    /// Spans projected under F+f whose status under F was neither
    /// Projected nor Conflict. The per-span filter decision is monotone,
    /// so this must be zero.
    pub violations: u64,
    /// Instances where the projected span set under F+f is not a subset
    /// of the set under F. Nonzero by design: filtering a span can free
    /// target tokens a later span conflicted on, which is exactly the
    /// interference the mapped-span diagnostics can report as >100%.
    pub interference_counterexamples: u64,
    pub first_violation: Option<String>,
}

impl MonotonicityStats {
    fn merge(mut self, other: MonotonicityStats) -> MonotonicityStats {
        self.cases += other.cases;
        self.violations += other.violations;
        self.interference_counterexamples += other.interference_counterexamples;
        if self.first_violation.is_none() {
            self.first_violation = other.first_violation;
        }
        self
    }
}

fn test_filter_sets() -> Vec<FilterSet> {
    let mut sets = Vec::new();
    for comp_src in [false, true] {
        for comp_tgt in [false, true] {
            for rstr_tgt in [false, true] {
                sets.push(FilterSet {
                    comp_src,
                    comp_tgt,
                    comp_ins: false,
                    rstr_tgt,
                });
            }
        }
    }
    sets
}

fn is_superset_by_one(larger: &FilterSet, smaller: &FilterSet) -> bool {
    let bits = |f: &FilterSet| {
        [f.comp_src, f.comp_tgt, f.rstr_tgt]
            .iter()
            .filter(|b| **b)
            .count()
    };
    (!smaller.comp_src || larger.comp_src)
        && (!smaller.comp_tgt || larger.comp_tgt)
        && (!smaller.rstr_tgt || larger.rstr_tgt)
        && bits(larger) == bits(smaller) + 1
}

/// Exhaustively checks translate-test filter monotonicity at the per-span
/// level: a span projected under F plus one extra filter must have been
/// projected under F already, or blocked there only by a conflict with an
/// earlier span. The naive set-subset reading of monotonicity is also
/// tallied; its counterexamples are expected and counted separately.
pub fn monotonicity_sweep(max_len: usize) -> MonotonicityStats {
    let sets = test_filter_sets();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for small in 0..sets.len() {
        for large in 0..sets.len() {
            if is_superset_by_one(&sets[large], &sets[small]) {
                pairs.push((small, large));
            }
        }
    }
    let mut stats = MonotonicityStats::default();
    for src_len in 1..=max_len {
        for tgt_len in 1..=max_len {
            let layouts = span_layouts(src_len);
            let alignment_count: u64 = 1 << (src_len * tgt_len);
            let partial = (0..alignment_count)
                .into_par_iter()
                .map(|alignment_bits| {
                    let mut local = MonotonicityStats::default();
                    for layout in &layouts {
                        let spec = InstanceSpec {
                            src_len,
                            tgt_len,
                            spans: layout.clone(),
                            alignment_bits,
                        };
                        let (src, tgt, alignment) = spec.materialize();
                        let outcomes: Vec<ProjectionOutcome> = sets
                            .iter()
                            .map(|filters| {
                                project_instance(&src, &tgt, &alignment, Direction::Test, filters)
                                    .expect("in-bounds by construction")
                            })
                            .collect();
                        for &(small, large) in &pairs {
                            local.cases += 1;
                            let small_reports = &outcomes[small].span_reports;
                            let large_reports = &outcomes[large].span_reports;
                            let mut subset = true;
                            for (before, after) in small_reports.iter().zip(large_reports) {
                                if after.status == SpanStatus::Projected {
                                    match before.status {
                                        SpanStatus::Projected => {}
                                        SpanStatus::Conflict => subset = false,
                                        _ => {
                                            local.violations += 1;
                                            if local.first_violation.is_none() {
                                                local.first_violation = Some(format!(
                                                    "spans={layout:?} bits={alignment_bits} \
                                                     F={:?} F+f={:?} span={:?} status \
                                                     {:?} -> Projected",
                                                    sets[small], sets[large], after.span,
                                                    before.status
                                                ));
                                            }
                                        }
                                    }
                                }
                            }
                            if !subset {
                                local.interference_counterexamples += 1;
                            }
                        }
                    }
                    local
                })
                .reduce(MonotonicityStats::default, MonotonicityStats::merge);
            stats = stats.merge(partial);
        }
    }
    stats
}

/// Deterministic random corpus: sentences with valid BIO labelings and
/// alignments sampled at the given link density.
pub fn gen_random_corpus(
    seed: u64,
    size: usize,
    max_len: usize,
    tag_types: &[&str],
    link_density: f64,
) -> (Vec<LabeledSentence>, Vec<Sentence>, Vec<Alignment>) {
    assert!(size > 0, "size must be positive");
    assert!(max_len > 0, "max_len must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sources = Vec::with_capacity(size);
    let mut targets = Vec::with_capacity(size);
    let mut alignments = Vec::with_capacity(size);
    for _ in 0..size {
        let src_len = rng.gen_range(1..=max_len);
        let tgt_len = rng.gen_range(1..=max_len);
        let tokens: Vec<String> = (0..src_len).map(|i| format!("s{i}")).collect();
        let mut tags = Vec::with_capacity(src_len);
        let mut i = 0;
        while i < src_len {
            if !tag_types.is_empty() && rng.gen_bool(0.4) {
                let ty = tag_types[rng.gen_range(0..tag_types.len())];
                let span_len = rng.gen_range(1..=(src_len - i).min(3));
                tags.push(Tag::Begin(ty.to_string()));
                for _ in 1..span_len {
                    tags.push(Tag::Inside(ty.to_string()));
                }
                i += span_len;
            } else {
                tags.push(Tag::Outside);
                i += 1;
            }
        }
        sources.push(
            LabeledSentence::new(Sentence::new(tokens), tags).expect("lengths match"),
        );
        targets.push(Sentence::new((0..tgt_len).map(|j| format!("t{j}")).collect()));
        let links = (0..src_len)
            .flat_map(|i| (0..tgt_len).map(move |j| (i, j)))
            .filter(|_| link_density >= 1.0 || (link_density > 0.0 && rng.gen_bool(link_density)))
            .collect::<Vec<_>>();
        alignments.push(Alignment::new(links));
    }
    (sources, targets, alignments)
}

/// Deterministic random logits over `vocabulary` for each sentence.
pub fn gen_random_logits(
    seed: u64,
    sentences: &[Sentence],
    vocabulary: &LabelVocabulary,
) -> Vec<LogitSentenceOf<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sentences
        .iter()
        .map(|sentence| LogitSentenceOf {
            tokens: sentence.clone(),
            logits: (0..sentence.len())
                .map(|_| (0..vocabulary.len()).map(|_| rng.gen_range(-4.0..4.0)).collect())
                .collect(),
        })
        .collect()
}

/// Targets mirror the source token lists; alignments are identity links.
pub fn make_identity_fixture(
    corpus: &[LabeledSentence],
) -> (Vec<LabeledSentence>, Vec<Sentence>, Vec<Alignment>) {
    let targets: Vec<Sentence> = corpus.iter().map(|s| s.sentence.clone()).collect();
    let alignments: Vec<Alignment> =
        corpus.iter().map(|s| Alignment::identity(s.len())).collect();
    (corpus.to_vec(), targets, alignments)
}

#[derive(Debug, Default, Clone)]
pub struct FuzzStats {
    pub instances: u64,
    pub bio_violations: u64,
    pub nondeterministic: u64,
}

/// Runs `count` random instances through train and test projection under
/// random legal filter sets, checking BIO validity and run-to-run
/// determinism.
pub fn fuzz_projection(seed: u64, count: usize) -> FuzzStats {
    use crate::corpus::bio_violation;
    let combos = legal_filter_combinations();
    let (sources, targets, alignments) =
        gen_random_corpus(seed, count.max(1), 6, &["PER", "LOC"], 0.4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut stats = FuzzStats::default();
    for ((src, tgt), alignment) in sources.iter().zip(&targets).zip(&alignments) {
        let (direction, filters) = combos[rng.gen_range(0..combos.len())];
        let first = project_instance(src, tgt, alignment, direction, &filters)
            .expect("in-bounds by construction");
        let second = project_instance(src, tgt, alignment, direction, &filters)
            .expect("in-bounds by construction");
        stats.instances += 1;
        if first != second {
            stats.nondeterministic += 1;
        }
        if let Some(projected) = &first.projected {
            if bio_violation(&projected.tags).is_some() {
                stats.bio_violations += 1;
            }
        }
    }
    stats
}
