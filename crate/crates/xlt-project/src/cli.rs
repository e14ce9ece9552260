//! Single-binary command line interface: pretokenize, project-train,
//! project-test, ensemble, evaluate, stats and selftest subcommands over
//! the formats defined in `corpus`.
//!
//! Exit codes: 0 success, 1 validation/usage error, 2 I/O or parse error.
//! Data goes to files or standard output; everything else to standard
//! error. Output files are written via a temp file and atomic rename so a
//! failing run never leaves a partial file behind.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::corpus::{
    self, read_alignments, read_conll_columns, read_logits, write_conll, Alignment,
    LabeledSentence, ReadMode, Sentence,
};
use crate::ensemble::{
    check_vocabulary_match, ensemble, EnsembleInputOf, EnsembleSpace,
};
use crate::evaluate::{render_report, span_f1, ReportFormat};
use crate::pretokenize::{pretokenize, PretokenizerMode};
use crate::projection::{project_corpus, Direction, FilterSet};
use crate::testkit::{exhaustive_sweep, fuzz_projection};

/// Validation errors exit 1, I/O and parse errors exit 2.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Io(m) => m,
        }
    }
}

impl From<corpus::CorpusError> for CliError {
    fn from(e: corpus::CorpusError) -> Self {
        CliError::Io(format!("{e}"))
    }
}

impl From<crate::projection::ProjectionError> for CliError {
    fn from(e: crate::projection::ProjectionError) -> Self {
        CliError::Validation(format!("{e}"))
    }
}

impl From<crate::evaluate::EvaluateError> for CliError {
    fn from(e: crate::evaluate::EvaluateError) -> Self {
        CliError::Validation(format!("{e}"))
    }
}

impl From<crate::ensemble::EnsembleError> for CliError {
    fn from(e: crate::ensemble::EnsembleError) -> Self {
        CliError::Validation(format!("{e}"))
    }
}

/// Fully resolved run settings. Flag values win over config-file values.
#[derive(Debug, Default, Clone)]
pub struct RunConfig {
    pub direction: Option<String>,
    pub filters: Option<String>,
    pub mode: Option<String>,
    pub pretokenizer: Option<String>,
    pub jobs: Option<usize>,
    pub space: Option<String>,
    pub format: Option<String>,
    pub paths: BTreeMap<String, PathBuf>,
}

const CONFIG_PATH_KEYS: &[&str] = &[
    "src-conll",
    "tgt-tokens",
    "tgt-conll",
    "align",
    "train-logits",
    "test-logits",
    "gold",
    "pred",
    "output",
    "diagnostics",
    "input",
];

/// Parses a flat `key=value` config file. Unknown keys are errors.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let mut config = RunConfig::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Io(format!(
                "config {} line {}: expected key=value",
                path.display(),
                lineno + 1
            ))
        })?;
        let key = key.trim();
        let value = value.trim().to_string();
        match key {
            "direction" => config.direction = Some(value),
            "filters" => config.filters = Some(value),
            "mode" => config.mode = Some(value),
            "pretokenizer" => config.pretokenizer = Some(value),
            "space" => config.space = Some(value),
            "format" => config.format = Some(value),
            "jobs" => {
                config.jobs = Some(value.parse().map_err(|_| {
                    CliError::Io(format!("config: jobs must be a positive integer, got {value:?}"))
                })?)
            }
            k if CONFIG_PATH_KEYS.contains(&k) => {
                config.paths.insert(k.to_string(), PathBuf::from(value));
            }
            other => {
                return Err(CliError::Io(format!(
                    "config {}: unknown key {other:?}",
                    path.display()
                )))
            }
        }
    }
    Ok(config)
}

/// Parses the comma-separated filter list of the CLI and validates it
/// against the direction.
pub fn parse_filters(spec: &str, direction: Direction) -> Result<FilterSet, CliError> {
    let mut filters = FilterSet::NO_FILT;
    for name in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match name {
            "none" => {}
            "comp-src" => filters.comp_src = true,
            "comp-tgt" => filters.comp_tgt = true,
            "comp-ins" => filters.comp_ins = true,
            "rstr-tgt" => filters.rstr_tgt = true,
            other => {
                return Err(CliError::Validation(format!(
                    "unknown filter {other:?}; expected comp-src, comp-tgt, comp-ins, rstr-tgt or none"
                )))
            }
        }
    }
    filters.check_direction(direction)?;
    Ok(filters)
}

#[derive(Parser, Debug)]
#[command(
    name = "xlt-project",
    about = "Word-alignment-based label projection for cross-lingual token classification",
    version
)]
struct Cli {
    /// Flat key=value config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for corpus-level parallelism.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ProjectArgs {
    /// Labeled source-side CoNLL file (gold tags for train, predictions
    /// over the translated source for test).
    #[arg(long)]
    src_conll: Option<PathBuf>,
    /// Target-side tokens, one space-joined sentence per line.
    #[arg(long, conflicts_with = "tgt_conll")]
    tgt_tokens: Option<PathBuf>,
    /// Target-side CoNLL file; only its tokens are used.
    #[arg(long)]
    tgt_conll: Option<PathBuf>,
    /// Pharaoh alignments, 0-based "i-j" links.
    #[arg(long)]
    align: Option<PathBuf>,
    /// Comma list: comp-src,comp-tgt,comp-ins,rstr-tgt or none.
    #[arg(long)]
    filters: Option<String>,
    /// Source read mode: strict or repair.
    #[arg(long)]
    mode: Option<String>,
    /// Treat the source CoNLL as multi-column; take first and last columns.
    #[arg(long)]
    multi_column: bool,
    /// Projected CoNLL output; standard output when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// JSON diagnostics sidecar.
    #[arg(long)]
    diagnostics: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Induce word boundaries, one raw sentence per input line.
    Pretokenize {
        /// ws, rule or external.
        #[arg(long)]
        mode: Option<String>,
        /// Input file; standard input when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Project gold labels onto translated training sentences.
    ProjectTrain(ProjectArgs),
    /// Project predictions from translated test sentences back.
    ProjectTest(ProjectArgs),
    /// Average translate-train and translate-test logits over the target.
    Ensemble {
        #[arg(long)]
        train_logits: Option<PathBuf>,
        #[arg(long)]
        test_logits: Option<PathBuf>,
        /// Alignment from the translated source to the target.
        #[arg(long)]
        align: Option<PathBuf>,
        /// Test-side filters: comp-src,comp-tgt,rstr-tgt or none.
        #[arg(long)]
        filters: Option<String>,
        /// logits or probs.
        #[arg(long)]
        space: Option<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Span-level precision/recall/F1.
    Evaluate {
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        pred: Option<PathBuf>,
        /// text or json.
        #[arg(long)]
        format: Option<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Recovered-instance and mapped-span diagnostics for a corpus.
    Stats {
        /// train or test.
        #[arg(long)]
        direction: Option<String>,
        #[command(flatten)]
        project: ProjectArgs,
        /// text or json.
        #[arg(long)]
        format: Option<String>,
    },
    /// Compare the projection engine with the brute-force oracle.
    Selftest {
        /// Exhaustive sweep over all small instances.
        #[arg(long)]
        exhaustive: bool,
        /// Maximum source/target length for the sweep.
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Number of random fuzz instances.
        #[arg(long)]
        fuzz: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn init_logging() {
    // XLTPROJECT_LOG controls verbosity; logging always goes to stderr
    let _ = env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("XLTPROJECT_LOG", "warn"),
    )
    .format_timestamp(None)
    .try_init();
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    let jobs = cli.jobs.or(config.jobs).unwrap_or(1);
    if jobs == 0 {
        return Err(CliError::Validation("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Validation(format!("cannot build thread pool: {e}")))?;
    pool.install(|| dispatch(cli, &config))
}

fn dispatch(cli: Cli, config: &RunConfig) -> Result<(), CliError> {
    match cli.command {
        Command::Pretokenize { mode, input, output } => {
            let mode = resolve(mode, &config.pretokenizer, "ws");
            let mode = match mode.as_str() {
                "ws" => PretokenizerMode::WsTok,
                "rule" => PretokenizerMode::RuleTok,
                "external" => PretokenizerMode::External,
                other => {
                    return Err(CliError::Validation(format!(
                        "unknown pretokenizer mode {other:?}; expected ws, rule or external"
                    )))
                }
            };
            let text = read_input(input.or_else(|| config_path(config, "input")))?;
            let text = String::from_utf8(text)
                .map_err(|e| CliError::Io(format!("input is not valid UTF-8: {e}")))?;
            let mut out = String::new();
            for (lineno, line) in text.lines().enumerate() {
                let sentence = pretokenize(line, mode).map_err(|e| {
                    CliError::Validation(format!("line {}: {e}", lineno + 1))
                })?;
                writeln!(out, "{}", sentence.tokens.join(" ")).expect("string write");
            }
            write_output(output.or_else(|| config_path(config, "output")), out.as_bytes())
        }
        Command::ProjectTrain(args) => run_projection(args, Direction::Train, config),
        Command::ProjectTest(args) => run_projection(args, Direction::Test, config),
        Command::Stats {
            direction,
            project,
            format,
        } => {
            let direction = match resolve(direction, &config.direction, "").as_str() {
                "train" => Direction::Train,
                "test" => Direction::Test,
                other => {
                    return Err(CliError::Validation(format!(
                        "stats requires --direction train|test, got {other:?}"
                    )))
                }
            };
            let format = resolve(format, &config.format, "text");
            run_stats(project, direction, config, &format)
        }
        Command::Ensemble {
            train_logits,
            test_logits,
            align,
            filters,
            space,
            output,
        } => run_ensemble(
            train_logits.or_else(|| config_path(config, "train-logits")),
            test_logits.or_else(|| config_path(config, "test-logits")),
            align.or_else(|| config_path(config, "align")),
            resolve(filters, &config.filters, "none"),
            resolve(space, &config.space, "logits"),
            output.or_else(|| config_path(config, "output")),
        ),
        Command::Evaluate {
            gold,
            pred,
            format,
            output,
        } => {
            let gold = required_path(gold.or_else(|| config_path(config, "gold")), "--gold")?;
            let pred = required_path(pred.or_else(|| config_path(config, "pred")), "--pred")?;
            let format = match resolve(format, &config.format, "text").as_str() {
                "text" => ReportFormat::Text,
                "json" => ReportFormat::Json,
                other => {
                    return Err(CliError::Validation(format!(
                        "unknown format {other:?}; expected text or json"
                    )))
                }
            };
            let gold = corpus::read_conll(&read_file(&gold)?, ReadMode::Strict)?;
            let pred = corpus::read_conll(&read_file(&pred)?, ReadMode::Repair)?;
            let report = span_f1::<f64>(&gold, &pred)?;
            write_output(
                output.or_else(|| config_path(config, "output")),
                &render_report(&report, format),
            )
        }
        Command::Selftest {
            exhaustive,
            max_len,
            fuzz,
            seed,
        } => {
            if !exhaustive && fuzz.is_none() {
                return Err(CliError::Validation(
                    "selftest requires --exhaustive and/or --fuzz N".into(),
                ));
            }
            if exhaustive {
                let stats = exhaustive_sweep(max_len);
                eprintln!(
                    "selftest exhaustive: {} cases, {} disagreements",
                    stats.cases, stats.disagreements
                );
                if stats.disagreements > 0 {
                    return Err(CliError::Validation(format!(
                        "oracle disagreement: {}",
                        stats.first_disagreement.unwrap_or_default()
                    )));
                }
            }
            if let Some(count) = fuzz {
                let stats = fuzz_projection(seed, count);
                eprintln!(
                    "selftest fuzz: {} instances, {} BIO violations, {} nondeterministic",
                    stats.instances, stats.bio_violations, stats.nondeterministic
                );
                if stats.bio_violations > 0 || stats.nondeterministic > 0 {
                    return Err(CliError::Validation("fuzz check failed".into()));
                }
            }
            Ok(())
        }
    }
}

fn resolve(flag: Option<String>, config: &Option<String>, default: &str) -> String {
    flag.or_else(|| config.clone()).unwrap_or_else(|| default.to_string())
}

fn config_path(config: &RunConfig, key: &str) -> Option<PathBuf> {
    config.paths.get(key).cloned()
}

fn required_path(path: Option<PathBuf>, flag: &str) -> Result<PathBuf, CliError> {
    path.ok_or_else(|| CliError::Validation(format!("missing required {flag}")))
}

struct ProjectionInputs {
    sources: Vec<LabeledSentence>,
    targets: Vec<Sentence>,
    alignments: Vec<Alignment>,
    filters: FilterSet,
}

fn load_projection_inputs(
    args: &ProjectArgs,
    direction: Direction,
    config: &RunConfig,
) -> Result<ProjectionInputs, CliError> {
    let src_path = required_path(
        args.src_conll.clone().or_else(|| config_path(config, "src-conll")),
        "--src-conll",
    )?;
    let align_path = required_path(
        args.align.clone().or_else(|| config_path(config, "align")),
        "--align",
    )?;
    // gold/train data defaults to strict, test-side predictions to repair
    let default_mode = match direction {
        Direction::Train => "strict",
        Direction::Test => "repair",
    };
    let mode = match resolve(args.mode.clone(), &config.mode, default_mode).as_str() {
        "strict" => ReadMode::Strict,
        "repair" => ReadMode::Repair,
        other => {
            return Err(CliError::Validation(format!(
                "unknown read mode {other:?}; expected strict or repair"
            )))
        }
    };
    let filters = parse_filters(
        &resolve(args.filters.clone(), &config.filters, "none"),
        direction,
    )?;
    let sources = read_conll_columns(&read_file(&src_path)?, mode, args.multi_column)?;

    let tgt_tokens = args
        .tgt_tokens
        .clone()
        .or_else(|| config_path(config, "tgt-tokens"));
    let tgt_conll = args
        .tgt_conll
        .clone()
        .or_else(|| config_path(config, "tgt-conll"));
    let targets: Vec<Sentence> = match (tgt_tokens, tgt_conll) {
        (Some(path), _) => {
            let text = String::from_utf8(read_file(&path)?)
                .map_err(|e| CliError::Io(format!("target tokens not valid UTF-8: {e}")))?;
            text.lines()
                .map(|line| {
                    Sentence::new(line.split(' ').filter(|t| !t.is_empty()).map(String::from).collect())
                })
                .collect()
        }
        (None, Some(path)) => corpus::read_conll(&read_file(&path)?, ReadMode::Repair)?
            .into_iter()
            .map(|s| s.sentence)
            .collect(),
        (None, None) => {
            return Err(CliError::Validation(
                "missing target side: provide --tgt-tokens or --tgt-conll".into(),
            ))
        }
    };
    let alignments = read_alignments(&read_file(&align_path)?)?;
    Ok(ProjectionInputs {
        sources,
        targets,
        alignments,
        filters,
    })
}

fn run_projection(
    args: ProjectArgs,
    direction: Direction,
    config: &RunConfig,
) -> Result<(), CliError> {
    let inputs = load_projection_inputs(&args, direction, config)?;
    let (outcomes, diagnostics) = project_corpus(
        &inputs.sources,
        &inputs.targets,
        &inputs.alignments,
        direction,
        &inputs.filters,
    )?;
    log::info!(
        "projected {} of {} instances",
        diagnostics.kept_instances,
        diagnostics.total_instances
    );
    let projected: Vec<LabeledSentence> = outcomes
        .into_iter()
        .filter_map(|o| o.projected)
        .collect();
    write_output(
        args.output.clone().or_else(|| config_path(config, "output")),
        &write_conll(&projected),
    )?;
    if let Some(path) = args
        .diagnostics
        .clone()
        .or_else(|| config_path(config, "diagnostics"))
    {
        let mut json = serde_json::to_vec_pretty(&diagnostics).expect("diagnostics serialize");
        json.push(b'\n');
        atomic_write(&path, &json)?;
    }
    Ok(())
}

fn run_stats(
    args: ProjectArgs,
    direction: Direction,
    config: &RunConfig,
    format: &str,
) -> Result<(), CliError> {
    let inputs = load_projection_inputs(&args, direction, config)?;
    let (_, diagnostics) = project_corpus(
        &inputs.sources,
        &inputs.targets,
        &inputs.alignments,
        direction,
        &inputs.filters,
    )?;
    let rendered: Vec<u8> = match format {
        "json" => {
            let mut json = serde_json::to_vec_pretty(&diagnostics).expect("diagnostics serialize");
            json.push(b'\n');
            json
        }
        "text" => {
            let mut out = String::new();
            let pct = |v: Option<f64>| match v {
                Some(v) => format!("{:.1}%", v * 100.0),
                None => "n/a".to_string(),
            };
            writeln!(out, "direction:            {}", diagnostics.direction).unwrap();
            writeln!(out, "instances:            {}", diagnostics.total_instances).unwrap();
            writeln!(out, "kept instances:       {}", diagnostics.kept_instances).unwrap();
            writeln!(out, "recovered rate:       {}", pct(diagnostics.recovered_rate)).unwrap();
            writeln!(out, "projected spans:      {}", diagnostics.projected_spans).unwrap();
            writeln!(
                out,
                "no-filt spans:        {}",
                diagnostics
                    .no_filt_projected_spans
                    .map(|v| v.to_string())
                    .unwrap_or_else(|| "n/a".to_string())
            )
            .unwrap();
            writeln!(
                out,
                "mapped span fraction: {}",
                pct(diagnostics.mapped_span_fraction)
            )
            .unwrap();
            writeln!(out, "unaligned spans:      {}", diagnostics.unaligned_spans).unwrap();
            writeln!(out, "filtered (src/tgt):   {}/{}", diagnostics.filtered_src_spans, diagnostics.filtered_tgt_spans).unwrap();
            writeln!(out, "conflict spans:       {}", diagnostics.conflict_spans).unwrap();
            writeln!(out, "filtered instances:   {}", diagnostics.filtered_ins_instances).unwrap();
            writeln!(out, "omitted span warns:   {}", diagnostics.omitted_span_warnings).unwrap();
            out.into_bytes()
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown format {other:?}; expected text or json"
            )))
        }
    };
    write_output(
        args.output.clone().or_else(|| config_path(config, "output")),
        &rendered,
    )
}

fn run_ensemble(
    train_logits: Option<PathBuf>,
    test_logits: Option<PathBuf>,
    align: Option<PathBuf>,
    filters: String,
    space: String,
    output: Option<PathBuf>,
) -> Result<(), CliError> {
    let train_path = required_path(train_logits, "--train-logits")?;
    let test_path = required_path(test_logits, "--test-logits")?;
    let align_path = required_path(align, "--align")?;
    let filters = parse_filters(&filters, Direction::Test)?;
    let space = match space.as_str() {
        "logits" => EnsembleSpace::Logits,
        "probs" => EnsembleSpace::Probs,
        other => {
            return Err(CliError::Validation(format!(
                "unknown space {other:?}; expected logits or probs"
            )))
        }
    };
    let (train_vocabulary, train) = read_logits(&read_file(&train_path)?)?;
    let (test_vocabulary, test) = read_logits(&read_file(&test_path)?)?;
    check_vocabulary_match(&train_vocabulary, &test_vocabulary)?;
    let alignments = read_alignments(&read_file(&align_path)?)?;
    if train.len() != test.len() || train.len() != alignments.len() {
        return Err(CliError::Validation(format!(
            "corpus length mismatch: {} train, {} test, {} alignments",
            train.len(),
            test.len(),
            alignments.len()
        )));
    }
    let results: Vec<Result<LabeledSentence, CliError>> = (0..train.len())
        .into_par_iter()
        .map(|i| {
            let input = EnsembleInputOf {
                train_logits: train[i].clone(),
                test_logits: test[i].clone(),
                alignment: alignments[i].clone(),
                vocabulary: train_vocabulary.clone(),
            };
            ensemble(&input, &filters, space).map_err(CliError::from)
        })
        .collect();
    let mut sentences = Vec::with_capacity(results.len());
    for result in results {
        sentences.push(result?);
    }
    write_output(output, &write_conll(&sentences))
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn read_input(path: Option<PathBuf>) -> Result<Vec<u8>, CliError> {
    match path {
        Some(path) => read_file(&path),
        None => {
            let mut buffer = Vec::new();
            std::io::stdin()
                .read_to_end(&mut buffer)
                .map_err(|e| CliError::Io(format!("cannot read standard input: {e}")))?;
            Ok(buffer)
        }
    }
}

fn write_output(path: Option<PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(path) => atomic_write(&path, bytes),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io(format!("cannot write standard output: {e}"))),
    }
}

/// Write-to-temp then rename; a failed run never leaves a partial file.
fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let directory = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::Io(format!("invalid output path {}", path.display())))?;
    let temp = {
        let mut name = file_name.to_os_string();
        name.push(format!(".tmp.{}", process::id()));
        match directory {
            Some(d) => d.join(name),
            None => PathBuf::from(name),
        }
    };
    let result = fs::write(&temp, bytes)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", temp.display())))
        .and_then(|()| {
            fs::rename(&temp, path)
                .map_err(|e| CliError::Io(format!("cannot rename into {}: {e}", path.display())))
        });
    if result.is_err() {
        let _ = fs::remove_file(&temp);
    }
    result
}
