//! Acceptance suite: one test per criterion, each printing a PASS line on
//! success (run with `cargo test --test acceptance -- --nocapture` to see
//! them).

use std::collections::BTreeSet;

use xlt_project::corpus::{
    bio_violation, extract_spans, read_alignments, read_conll, write_alignments, write_conll,
    Alignment, CandidateSpan, LabelVocabulary, ReadMode, Sentence,
};
use xlt_project::ensemble::{argmax, decode_argmax, ensemble, project_logits, EnsembleSpace};
use xlt_project::evaluate::span_f1;
use xlt_project::projection::{
    check_comp_tgt, project_corpus, project_instance, Direction, FilterSet, SpanStatus,
};
use xlt_project::testkit::{
    exhaustive_sweep, gen_random_corpus, gen_random_logits, legal_filter_combinations,
    make_identity_fixture, monotonicity_sweep,
};
use xlt_project::{EnsembleInput, EvalReport, LabeledSentence};

fn fixture(name: &str) -> Vec<u8> {
    std::fs::read(format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR")))
        .unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

#[test]
fn criterion_1_oracle_equivalence() {
    let stats = exhaustive_sweep(4);
    assert!(stats.cases > 40_000_000);
    assert_eq!(
        stats.disagreements, 0,
        "first disagreement: {:?}",
        stats.first_disagreement
    );
    println!(
        "PASS criterion 1: oracle equivalence on {} exhaustive cases, 0 disagreements",
        stats.cases
    );
}

#[test]
fn criterion_2_figure1_fixtures() {
    let sources = read_conll(&fixture("figure1_src.conll"), ReadMode::Strict).unwrap();
    let target_text = String::from_utf8(fixture("figure1_tgt_tokens.txt")).unwrap();
    let targets: Vec<Sentence> = target_text
        .lines()
        .map(|l| Sentence::new(l.split(' ').map(String::from).collect()))
        .collect();
    let comp_src = FilterSet {
        comp_src: true,
        ..FilterSet::NO_FILT
    };

    // case one: fully aligned spans, training instance kept
    let align1 = read_alignments(&fixture("figure1_align_case1.txt")).unwrap();
    let (outcomes, _) =
        project_corpus(&sources, &targets, &align1, Direction::Train, &comp_src).unwrap();
    assert!(outcomes[0].instance_kept);
    let projected: Vec<LabeledSentence> =
        outcomes.into_iter().filter_map(|o| o.projected).collect();
    assert_eq!(projected.len(), 1);
    assert_eq!(
        extract_spans(&projected[0]).len(),
        2,
        "case one projects both spans"
    );
    assert_eq!(
        write_conll(&projected),
        fixture("figure1_case1.golden.conll"),
        "case one bytes"
    );

    // case two: one span token unaligned, instance discarded under COMP-SRC
    let align23 = read_alignments(&fixture("figure1_align_case23.txt")).unwrap();
    let (outcomes, _) =
        project_corpus(&sources, &targets, &align23, Direction::Train, &comp_src).unwrap();
    assert!(!outcomes[0].instance_kept);
    assert_eq!(
        outcomes[0]
            .span_reports
            .iter()
            .map(|r| r.status)
            .collect::<Vec<_>>(),
        vec![SpanStatus::Projected, SpanStatus::FilteredSrc]
    );
    let projected: Vec<LabeledSentence> =
        outcomes.into_iter().filter_map(|o| o.projected).collect();
    assert_eq!(
        write_conll(&projected),
        fixture("figure1_case2.golden.conll"),
        "case two bytes (empty corpus)"
    );

    // case three: same failure in test direction gives a partial projection
    let (outcomes, _) =
        project_corpus(&sources, &targets, &align23, Direction::Test, &comp_src).unwrap();
    let projected: Vec<LabeledSentence> =
        outcomes.into_iter().filter_map(|o| o.projected).collect();
    assert_eq!(
        write_conll(&projected),
        fixture("figure1_case3.golden.conll"),
        "case three bytes"
    );
    println!("PASS criterion 2: Figure-1 style fixtures byte-match all three golden files");
}

fn fuzz_run(seed: u64) -> (Vec<u8>, u64) {
    let combos = legal_filter_combinations();
    let (sources, targets, alignments) = gen_random_corpus(seed, 10_000, 6, &["PER", "LOC"], 0.4);
    let vocabulary = LabelVocabulary::new(vec![
        "O".into(),
        "B-PER".into(),
        "I-PER".into(),
        "B-LOC".into(),
        "I-LOC".into(),
    ])
    .unwrap();
    let train_logits = gen_random_logits(seed ^ 1, &targets, &vocabulary);
    let source_sentences: Vec<Sentence> =
        sources.iter().map(|s| s.sentence.clone()).collect();
    let test_logits = gen_random_logits(seed ^ 2, &source_sentences, &vocabulary);

    let mut violations = 0u64;
    let mut outputs: Vec<LabeledSentence> = Vec::new();
    for (i, ((src, tgt), alignment)) in
        sources.iter().zip(&targets).zip(&alignments).enumerate()
    {
        let (direction, filters) = combos[i % combos.len()];
        let outcome = project_instance(src, tgt, alignment, direction, &filters).unwrap();
        if let Some(projected) = outcome.projected {
            if bio_violation(&projected.tags).is_some() {
                violations += 1;
            }
            outputs.push(projected);
        }
        let ensemble_filters = FilterSet {
            comp_src: filters.comp_src,
            comp_tgt: filters.comp_tgt,
            comp_ins: false,
            rstr_tgt: direction == Direction::Test && filters.rstr_tgt,
        };
        let input = EnsembleInput {
            train_logits: train_logits[i].clone(),
            test_logits: test_logits[i].clone(),
            alignment: alignment.clone(),
            vocabulary: vocabulary.clone(),
        };
        let combined = ensemble(&input, &ensemble_filters, EnsembleSpace::Logits).unwrap();
        if bio_violation(&combined.tags).is_some() {
            violations += 1;
        }
        outputs.push(combined);
    }
    (write_conll(&outputs), violations)
}

#[test]
fn criterion_3_bio_validity_fuzz() {
    let (bytes_a, violations_a) = fuzz_run(20_240_817);
    assert_eq!(violations_a, 0, "BIO violations in fuzz run");
    let (bytes_b, violations_b) = fuzz_run(20_240_817);
    assert_eq!(violations_b, 0);
    assert_eq!(bytes_a, bytes_b, "same seed must be byte-identical");
    println!(
        "PASS criterion 3: 10,000-instance fuzz, 0 BIO violations, rerun byte-identical ({} output bytes)",
        bytes_a.len()
    );
}

#[test]
fn criterion_4_filter_semantics() {
    // COMP-TGT <=> contiguity, all non-empty candidate subsets, tgt_len <= 6
    let mut checked = 0u32;
    for tgt_len in 1..=6u32 {
        for mask in 1u32..(1 << tgt_len) {
            let indices: Vec<usize> =
                (0..tgt_len as usize).filter(|j| mask >> j & 1 == 1).collect();
            let expected: BTreeSet<usize> =
                (indices[0]..=*indices.last().unwrap()).collect();
            let actual: BTreeSet<usize> = indices.iter().copied().collect();
            let cand = CandidateSpan::new(indices).unwrap();
            assert_eq!(check_comp_tgt(&cand), actual == expected, "mask {mask:#b}");
            checked += 1;
        }
    }

    // RSTR-TGT bound: projected single-token source spans have length 1
    let (sources, targets, alignments) = gen_random_corpus(99, 5_000, 6, &["PER", "LOC"], 0.5);
    let rstr = FilterSet {
        rstr_tgt: true,
        ..FilterSet::NO_FILT
    };
    let mut bound_checked = 0u32;
    for ((src, tgt), alignment) in sources.iter().zip(&targets).zip(&alignments) {
        let outcome = project_instance(src, tgt, alignment, Direction::Test, &rstr).unwrap();
        for report in &outcome.span_reports {
            if report.status == SpanStatus::Projected && report.span.is_single_token() {
                let (first, last) = report.target_range.unwrap();
                assert_eq!(first, last, "rstr-tgt must project to a single token");
                bound_checked += 1;
            }
        }
    }
    assert!(bound_checked > 100);

    // per-span filter monotonicity, exhaustive; set-subset counterexamples
    // exist and are exactly the conflict-interference cases
    let stats = monotonicity_sweep(4);
    assert_eq!(
        stats.violations, 0,
        "first violation: {:?}",
        stats.first_violation
    );
    assert!(
        stats.interference_counterexamples > 0,
        "interference cases are expected to exist"
    );
    println!(
        "PASS criterion 4: comp-tgt contiguity ({checked} subsets), rstr-tgt length bound \
         ({bound_checked} spans), monotonicity on {} exhaustive pairs \
         (all {} subset breaks explained by span interference)",
        stats.cases, stats.interference_counterexamples
    );
}

#[test]
fn criterion_5_ensemble_contracts() {
    let vocabulary = LabelVocabulary::new(vec![
        "O".into(),
        "B-X".into(),
        "I-X".into(),
    ])
    .unwrap();
    let (sources, targets, _) = gen_random_corpus(7, 1_000, 6, &["X"], 0.5);
    let source_sentences: Vec<Sentence> = sources.iter().map(|s| s.sentence.clone()).collect();
    let train_logits = gen_random_logits(11, &targets, &vocabulary);
    let test_logits = gen_random_logits(13, &source_sentences, &vocabulary);

    // fallback exactness: empty alignment -> empty projected map -> output
    // is exactly the train-stream argmax
    for (i, train) in train_logits.iter().enumerate() {
        let input = EnsembleInput {
            train_logits: train.clone(),
            test_logits: test_logits[i].clone(),
            alignment: Alignment::default(),
            vocabulary: vocabulary.clone(),
        };
        let out = ensemble(&input, &FilterSet::NO_FILT, EnsembleSpace::Logits).unwrap();
        let train_only = decode_argmax(train, &vocabulary).unwrap();
        assert_eq!(out, train_only, "sentence {i}");
    }

    // stream-swap commutativity with the projected map held fixed
    let mut swapped_checked = 0u32;
    for (i, train) in train_logits.iter().enumerate().take(200) {
        let alignment = Alignment::identity(test_logits[i].len().min(train.len()));
        let predicted = decode_argmax(&test_logits[i], &vocabulary).unwrap();
        let map = project_logits(
            &test_logits[i],
            &predicted,
            &alignment,
            &train.tokens,
            &FilterSet::NO_FILT,
        )
        .unwrap();
        for (j, test_vector) in &map {
            let train_vector = &train.logits[*j];
            let forward: Vec<f64> = train_vector
                .iter()
                .zip(test_vector)
                .map(|(a, b)| (a + b) / 2.0)
                .collect();
            let backward: Vec<f64> = test_vector
                .iter()
                .zip(train_vector)
                .map(|(a, b)| (a + b) / 2.0)
                .collect();
            assert_eq!(argmax(&forward), argmax(&backward));
            swapped_checked += 1;
        }
    }
    assert!(swapped_checked > 50);

    // symmetric tie fixture: average [0.5, 0.5] resolves to vocabulary
    // index 0 ("O"), deterministically
    let tie_vocabulary = LabelVocabulary::new(vec!["O".into(), "B-X".into()]).unwrap();
    let tie = EnsembleInput {
        train_logits: xlt_project::LogitSentence {
            tokens: Sentence::from_iter(["t0"]),
            logits: vec![vec![1.0, 0.0]],
        },
        test_logits: xlt_project::LogitSentence {
            tokens: Sentence::from_iter(["s0"]),
            logits: vec![vec![0.0, 1.0]],
        },
        alignment: Alignment::identity(1),
        vocabulary: tie_vocabulary,
    };
    for _ in 0..3 {
        let out = ensemble(&tie, &FilterSet::NO_FILT, EnsembleSpace::Logits).unwrap();
        assert_eq!(out.tags[0].to_string(), "O");
    }
    println!(
        "PASS criterion 5: fallback exactness (1,000 sentences), stream-swap commutativity \
         ({swapped_checked} tokens), deterministic tie-break"
    );
}

#[test]
fn criterion_6_identity_pipeline() {
    let (corpus, _, _) = gen_random_corpus(123, 500, 8, &["PER", "LOC", "ORG"], 0.5);
    let (sources, targets, alignments) = make_identity_fixture(&corpus);
    for direction in [Direction::Train, Direction::Test] {
        let (outcomes, _) =
            project_corpus(&sources, &targets, &alignments, direction, &FilterSet::NO_FILT)
                .unwrap();
        let projected: Vec<LabeledSentence> =
            outcomes.into_iter().map(|o| o.projected.unwrap()).collect();
        for (src, out) in sources.iter().zip(&projected) {
            assert_eq!(src.tags, out.tags);
        }
        let report: EvalReport = span_f1(&sources, &projected).unwrap();
        assert_eq!(report.micro.f1, 1.0, "micro-F1 must be exactly 1.0");
    }
    println!("PASS criterion 6: identity pipeline reproduces labels, micro-F1 == 1.0 exactly");
}

#[test]
fn criterion_7_metric_fixtures() {
    fn labeled(tag_strs: &[&str]) -> LabeledSentence {
        let tokens: Vec<String> = (0..tag_strs.len()).map(|i| format!("t{i}")).collect();
        let tags = tag_strs.iter().map(|s| s.parse().unwrap()).collect();
        LabeledSentence::new(Sentence::new(tokens), tags).unwrap()
    }
    let eval = |gold: &[&[&str]], pred: &[&[&str]]| -> EvalReport {
        let gold: Vec<_> = gold.iter().map(|t| labeled(t)).collect();
        let pred: Vec<_> = pred.iter().map(|t| labeled(t)).collect();
        span_f1(&gold, &pred).unwrap()
    };

    // 1: perfect match
    let r = eval(&[&["B-X", "I-X", "O"]], &[&["B-X", "I-X", "O"]]);
    assert_eq!((r.micro.precision, r.micro.recall, r.micro.f1), (1.0, 1.0, 1.0));

    // 2: one of two gold spans found plus one spurious: P=R=F1=1/2
    let r = eval(&[&["B-X", "O", "B-X", "O"]], &[&["B-X", "O", "O", "B-X"]]);
    assert_eq!((r.micro.precision, r.micro.recall, r.micro.f1), (0.5, 0.5, 0.5));

    // 3: correct type, end off by one: fp and fn, everything 0
    let r = eval(&[&["B-X", "I-X", "O"]], &[&["B-X", "I-X", "I-X"]]);
    assert_eq!((r.micro.tp, r.micro.fp, r.micro.fn_), (0, 1, 1));
    assert_eq!((r.micro.precision, r.micro.recall, r.micro.f1), (0.0, 0.0, 0.0));

    // 4: gold span found plus an extra prediction: P=1/2, R=1, F1=2/3
    let r = eval(&[&["B-X", "O", "O"]], &[&["B-X", "O", "B-X"]]);
    assert_eq!((r.micro.precision, r.micro.recall), (0.5, 1.0));
    assert_eq!(r.micro.f1, 2.0 / 3.0);

    // 5: two types; X found plus a spurious X, Y missed entirely
    let r = eval(
        &[&["B-X", "O", "B-Y", "O"]],
        &[&["B-X", "O", "O", "B-X"]],
    );
    assert_eq!((r.per_type["X"].precision, r.per_type["X"].recall), (0.5, 1.0));
    assert_eq!(r.per_type["X"].f1, 2.0 / 3.0);
    assert_eq!((r.per_type["Y"].precision, r.per_type["Y"].recall, r.per_type["Y"].f1), (0.0, 0.0, 0.0));
    assert_eq!((r.micro.precision, r.micro.recall, r.micro.f1), (0.5, 0.5, 0.5));

    println!("PASS criterion 7: 5 hand-computed metric fixtures match exactly");
}

#[test]
fn criterion_8_format_roundtrips() {
    let (sources, _, alignments) = gen_random_corpus(31, 1_000, 10, &["PER", "LOC"], 0.3);

    let bytes = write_conll(&sources);
    let reread = read_conll(&bytes, ReadMode::Strict).unwrap();
    assert_eq!(reread, sources);
    assert_eq!(write_conll(&reread), bytes, "CoNLL byte-stable");

    let bytes = write_alignments(&alignments);
    let reread = read_alignments(&bytes).unwrap();
    assert_eq!(reread, alignments);
    assert_eq!(write_alignments(&reread), bytes, "Pharaoh byte-stable");

    // malformed inputs produce the documented error classes
    use xlt_project::CorpusError;
    assert!(matches!(
        read_conll(b"one-column-only\n", ReadMode::Strict),
        Err(CorpusError::ParseLine { line: 1, .. })
    ));
    assert!(matches!(
        read_conll(b"a\tO\nb\tI-PER\n", ReadMode::Strict),
        Err(CorpusError::BioViolation { sentence: 0, .. })
    ));
    assert!(matches!(
        read_alignments(b"0-0 3_4\n"),
        Err(CorpusError::AlignmentParse { line: 1, column: 2, .. })
    ));
    println!("PASS criterion 8: 1,000-sentence CoNLL and Pharaoh roundtrips byte-stable, malformed inputs rejected");
}

#[test]
fn criterion_9_diagnostics() {
    // 10 single-span instances; 3 have one unaligned span token
    let mut sources = Vec::new();
    let mut targets = Vec::new();
    let mut alignments = Vec::new();
    for i in 0..10usize {
        sources.push(
            LabeledSentence::new(
                Sentence::from_iter(["the", "big", "city"]),
                vec![
                    "O".parse().unwrap(),
                    "B-LOC".parse().unwrap(),
                    "I-LOC".parse().unwrap(),
                ],
            )
            .unwrap(),
        );
        targets.push(Sentence::from_iter(["die", "grosse", "Stadt"]));
        // engineered COMP-SRC failure: span token 2 unaligned, span still
        // partially aligned so NO-FILT projects it
        if i < 3 {
            alignments.push(Alignment::new([(0, 0), (1, 1)]));
        } else {
            alignments.push(Alignment::new([(0, 0), (1, 1), (2, 2)]));
        }
    }
    let comp_src = FilterSet {
        comp_src: true,
        ..FilterSet::NO_FILT
    };
    let (_, train) =
        project_corpus(&sources, &targets, &alignments, Direction::Train, &comp_src).unwrap();
    assert_eq!(train.kept_instances, 7);
    assert_eq!(train.recovered_rate, Some(0.7), "recovered rate 70.0%");

    let (_, test) =
        project_corpus(&sources, &targets, &alignments, Direction::Test, &comp_src).unwrap();
    // hand-computed: NO-FILT projects all 10 spans, COMP-SRC passes 7
    assert_eq!(test.no_filt_projected_spans, Some(10));
    assert_eq!(test.projected_spans, 7);
    assert_eq!(test.mapped_span_fraction, Some(0.7));
    println!("PASS criterion 9: diagnostics report 70.0% recovered rate and 7/10 mapped-span fraction");
}
