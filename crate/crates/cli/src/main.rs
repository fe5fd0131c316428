//! `nomlab` command-line front end: each stage of the workflow as a
//! subcommand, plus `report` for the whole chain.

mod config;
mod run;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use nomlab::corpus::{
    class_stats, count_corpus, extract_lexicon, filter_classes, lexicon_to_tsv, read_lexicon, CorpusFormat,
    FrequencyTable,
};
use nomlab::eval::report::{analyze, emit_report, ReportInputs};
use nomlab::eval::{
    bases_tsv, check_probes, read_annotations, read_choices, read_jsonl, BucketBounds, ModelPredictions,
};
use nomlab::gcm::{self, default_grid, fit_sensitivity, DistanceMode, GcmConfig, GcmModel, Kernel};
use nomlab::io::bytes_digest;
use nomlab::mgl::{self, read_training_pairs, training_pairs, FeatureTable, MglConfig, MglModel, Selector};
use nomlab::morphlex::{bundled_words, parse_word, AffixInventory, DEFAULT_MAX_DEPTH};
use nomlab::noncegen::{self, generate_classes, read_nonces, read_word_list, DEFAULT_PER_LENGTH};
use nomlab::pipeline::{self, PipelineConfig, DEFAULT_FIT_QUERIES};
use nomlab::{AdjectiveClass, Error, Result, WeightMode};

use run::Run;

#[derive(Parser, Debug)]
#[command(name = "nomlab", about = "Models of English -ity/-ness nominalization", disable_version_flag = true)]
struct Cli {
    /// Print the version and the digests of the bundled data files.
    #[arg(short = 'V', long)]
    version: bool,

    /// Worker threads; all available cores by default. Results do not
    /// depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Flat `key=value` file of defaults for the subcommand's options;
    /// flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Where to write the run manifest; defaults to `<out>.manifest.json`
    /// for file outputs.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Count word tokens in plain-text or JSON Lines corpora.
    Count(CountArgs),
    /// Build the -ity/-ness lexicon from a corpus or a frequency table.
    Extract(ExtractArgs),
    /// Derivative statistics per adjective class.
    Stats(StatsArgs),
    /// Generate nonce adjectives from character-bigram chains.
    Nonce(NonceArgs),
    /// Train the minimal generalization learner.
    MglTrain(MglTrainArgs),
    /// Predict with a trained rule set.
    MglPredict(MglPredictArgs),
    /// Build a GCM exemplar store, optionally fitting the sensitivity.
    GcmTrain(GcmTrainArgs),
    /// Predict with a GCM exemplar store.
    GcmPredict(GcmPredictArgs),
    /// Analyse probe outputs and write tables and figures.
    Eval(EvalArgs),
    /// Morphological parses of words.
    Parse(ParseArgs),
    /// Run every stage on a corpus and write all outputs to one directory.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct CorpusArgs {
    /// Corpus files (`.gz` accepted).
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    corpus: Vec<PathBuf>,
    /// auto, text or jsonl.
    #[arg(long, default_value = "auto")]
    format: CorpusFormat,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Frequency table written by `count`, instead of a corpus.
    #[arg(long, conflicts_with = "corpus")]
    freq: Option<PathBuf>,
    /// Keep only these classes.
    #[arg(long, value_delimiter = ',')]
    classes: Vec<AdjectiveClass>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct NonceArgs {
    /// Word list to train the chains on; the bundled English list by
    /// default.
    #[arg(long)]
    words: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "able,ish,ive,ous")]
    classes: Vec<AdjectiveClass>,
    #[arg(long, default_value_t = DEFAULT_PER_LENGTH)]
    per_length: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Frequency table the nonces and their derivatives must be absent
    /// from.
    #[arg(long)]
    freq: Option<PathBuf>,
    /// Lexicon whose bases and derivatives also count as known.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write `base, class, d_ity, d_ness` for the probing adapter.
    #[arg(long)]
    bases_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MglTrainArgs {
    #[arg(long, required_unless_present = "pairs")]
    lexicon: Option<PathBuf>,
    /// `base, choice, weight` training pairs, instead of a lexicon.
    #[arg(long, conflicts_with = "lexicon")]
    pairs: Option<PathBuf>,
    /// Train on these classes of the lexicon only.
    #[arg(long, value_delimiter = ',')]
    classes: Vec<AdjectiveClass>,
    #[arg(long, default_value = "type")]
    mode: WeightMode,
    #[arg(long, default_value_t = mgl::DEFAULT_ALPHA)]
    alpha: f64,
    /// Character feature table for slot generalization.
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MglPredictArgs {
    /// Rule table written by `mgl-train`.
    #[arg(long)]
    model: PathBuf,
    /// Bases to predict, `form<TAB>class`.
    #[arg(long = "in")]
    input: PathBuf,
    /// confidence or reliability.
    #[arg(long, default_value = "confidence")]
    selector: Selector,
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GcmTrainArgs {
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long, value_delimiter = ',')]
    classes: Vec<AdjectiveClass>,
    /// Weighting used when fitting.
    #[arg(long, default_value = "type")]
    mode: WeightMode,
    #[arg(long, default_value_t = gcm::DEFAULT_SENSITIVITY)]
    sensitivity: f64,
    /// Choose the sensitivity by leave-one-out accuracy over the default
    /// grid.
    #[arg(long)]
    fit: bool,
    /// Held-out bases when fitting, evenly strided; all when unset.
    #[arg(long)]
    max_queries: Option<usize>,
    #[arg(long, default_value = "raw")]
    distance: DistanceMode,
    #[arg(long, default_value = "exponential")]
    kernel: Kernel,
    /// Write the fitted accuracy curve as CSV.
    #[arg(long, requires = "fit")]
    curve: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GcmPredictArgs {
    /// Exemplar store written by `gcm-train`.
    #[arg(long)]
    model: PathBuf,
    /// Bases to predict, `form<TAB>class`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "type")]
    mode: WeightMode,
    /// Overrides the sensitivity stored with the model.
    #[arg(long)]
    sensitivity: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// Upper frequency of the rare bucket.
    #[arg(long, default_value_t = BucketBounds::default().low_max)]
    low_max: u64,
    /// Lower frequency bound (exclusive) of the frequent bucket.
    #[arg(long, default_value_t = BucketBounds::default().high_min)]
    high_min: u64,
}

impl BoundArgs {
    fn bounds(&self) -> BucketBounds {
        BucketBounds { low_max: self.low_max, high_min: self.high_min }
    }
}

#[derive(Args, Debug)]
struct ProbeInputs {
    /// Probe records for attested bases (JSON Lines).
    #[arg(long)]
    probes: Option<PathBuf>,
    /// Probe records for nonce bases.
    #[arg(long)]
    nonce_probes: Option<PathBuf>,
    /// Forced-choice records.
    #[arg(long)]
    preferences: Option<PathBuf>,
    /// Human judgments, `item, annotator_id, choice`.
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Vocabulary-test records.
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[command(flatten)]
    bounds: BoundArgs,
}

impl ProbeInputs {
    fn paths(&self) -> impl Iterator<Item = &Path> {
        [&self.probes, &self.nonce_probes, &self.preferences, &self.annotations, &self.vocab]
            .into_iter()
            .flatten()
            .map(PathBuf::as_path)
    }
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Lexicon for the frequency and class analyses.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[command(flatten)]
    probes: ProbeInputs,
    /// Model predictions as `name=path`; the table needs `base` and
    /// `choice` columns.
    #[arg(long)]
    predictions: Vec<String>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ParseArgs {
    words: Vec<String>,
    /// File of words, one per line.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
    max_depth: usize,
    /// Custom inventory; needs all three lists.
    #[arg(long, requires_all = ["suffixes", "stems"])]
    prefixes: Option<PathBuf>,
    #[arg(long, requires_all = ["prefixes", "stems"])]
    suffixes: Option<PathBuf>,
    #[arg(long, requires_all = ["prefixes", "suffixes"])]
    stems: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    words: Option<PathBuf>,
    /// Further bases to predict, typically the probed nonces.
    #[arg(long)]
    nonces: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "able,ish,ive,ous")]
    classes: Vec<AdjectiveClass>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_PER_LENGTH)]
    per_length: usize,
    #[arg(long, default_value_t = mgl::DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value = "confidence")]
    selector: Selector,
    /// Fixed GCM sensitivity for both modes; fitted per mode when unset.
    #[arg(long)]
    sensitivity: Option<f64>,
    /// Held-out bases per mode when fitting; 0 uses every base.
    #[arg(long, default_value_t = DEFAULT_FIT_QUERIES)]
    fit_queries: usize,
    #[command(flatten)]
    probes: ProbeInputs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn version_text() -> String {
    let mut out = format!("nomlab {}\n", env!("CARGO_PKG_VERSION"));
    for (name, bytes) in nomlab::bundled_files() {
        out.push_str(&format!("{name} sha256:{}\n", bytes_digest(bytes)));
    }
    out
}

fn load_probes(path: Option<&Path>) -> Result<Option<Vec<nomlab::eval::ProbeRecord>>> {
    path.map(|p| {
        let records = read_jsonl(p)?;
        check_probes(&records)?;
        Ok(records)
    })
    .transpose()
}

fn restrict(lexicon: Vec<nomlab::corpus::LexiconEntry>, classes: &[AdjectiveClass]) -> Vec<nomlab::corpus::LexiconEntry> {
    if classes.is_empty() {
        lexicon
    } else {
        filter_classes(&lexicon, classes)
    }
}

fn execute(cmd: Cmd, run: &mut Run) -> Result<()> {
    match cmd {
        Cmd::Count(a) => {
            run.inputs(a.corpus.corpus.iter().map(PathBuf::as_path))?;
            require_corpus(&a.corpus)?;
            let freq = count_corpus(&a.corpus.corpus, a.corpus.format)?;
            run.output(a.out.as_deref(), &freq.to_tsv())
        }
        Cmd::Extract(a) => {
            let freq = match &a.freq {
                Some(path) => {
                    run.input(path)?;
                    FrequencyTable::read_tsv(path)?
                }
                None => {
                    run.inputs(a.corpus.corpus.iter().map(PathBuf::as_path))?;
                    require_corpus(&a.corpus)?;
                    count_corpus(&a.corpus.corpus, a.corpus.format)?
                }
            };
            let lexicon = restrict(extract_lexicon(&freq), &a.classes);
            run.output(a.out.as_deref(), &lexicon_to_tsv(&lexicon))
        }
        Cmd::Stats(a) => {
            run.input(&a.lexicon)?;
            let stats = class_stats(&read_lexicon(&a.lexicon)?)?;
            run.output(a.out.as_deref(), &stats.to_csv())
        }
        Cmd::Nonce(a) => {
            run.inputs([&a.words, &a.freq, &a.lexicon].into_iter().flatten().map(PathBuf::as_path))?;
            let words = match &a.words {
                Some(p) => read_word_list(p)?,
                None => bundled_words(),
            };
            let mut freq = match &a.freq {
                Some(p) => FrequencyTable::read_tsv(p)?,
                None => FrequencyTable::new(),
            };
            if let Some(p) = &a.lexicon {
                freq.merge(FrequencyTable::from_lexicon(&read_lexicon(p)?));
            }
            let bases = generate_classes(&words, &a.classes, a.per_length, a.seed, &freq)?;
            if let Some(p) = &a.bases_out {
                run.output(Some(p), &bases_tsv(&bases))?;
            }
            run.output(a.out.as_deref(), &noncegen::to_tsv(&bases))
        }
        Cmd::MglTrain(a) => {
            let pairs = match (&a.lexicon, &a.pairs) {
                (_, Some(p)) => {
                    run.input(p)?;
                    read_training_pairs(p)?
                }
                (Some(l), None) => {
                    run.input(l)?;
                    training_pairs(&restrict(read_lexicon(l)?, &a.classes), None)
                }
                (None, None) => return Err(Error::input("give --lexicon or --pairs")),
            };
            let features = match &a.features {
                Some(p) => {
                    run.input(p)?;
                    Some(FeatureTable::from_file(p)?)
                }
                None => None,
            };
            let model = mgl::train(&pairs, &MglConfig { mode: a.mode, alpha: a.alpha, features })?;
            run.output(a.out.as_deref(), &model.to_tsv())
        }
        Cmd::MglPredict(a) => {
            run.inputs([&a.model, &a.input].map(PathBuf::as_path))?;
            let mut model = MglModel::read_tsv(&a.model)?;
            if let Some(p) = &a.features {
                run.input(p)?;
                model = model.with_features(FeatureTable::from_file(p)?);
            }
            let bases = read_nonces(&a.input)?;
            run.output(a.out.as_deref(), &mgl::predictions_tsv(&model, &bases, a.selector)?)
        }
        Cmd::GcmTrain(a) => {
            run.input(&a.lexicon)?;
            let lexicon = restrict(read_lexicon(&a.lexicon)?, &a.classes);
            let mut config =
                GcmConfig { sensitivity: a.sensitivity, mode: a.mode, distance: a.distance, kernel: a.kernel };
            if a.fit {
                let fit = fit_sensitivity(&lexicon, config, &default_grid(), a.max_queries)?;
                config.sensitivity = fit.sensitivity;
                run.manifest.config.insert("fitted_sensitivity".into(), fit.sensitivity.to_string());
                run.manifest.config.insert("fitted_accuracy".into(), fit.accuracy.to_string());
                if let Some(p) = &a.curve {
                    let mut csv = String::from("sensitivity,accuracy\n");
                    for (c, acc) in &fit.curve {
                        csv.push_str(&format!("{c:.6},{acc:.6}\n"));
                    }
                    run.output(Some(p), &csv)?;
                }
            }
            let model = GcmModel::from_lexicon(&lexicon, config)?;
            run.output(a.out.as_deref(), &model.to_tsv())
        }
        Cmd::GcmPredict(a) => {
            run.inputs([&a.model, &a.input].map(PathBuf::as_path))?;
            let mut model = GcmModel::read_tsv(&a.model, a.mode)?;
            if let Some(c) = a.sensitivity {
                let config = GcmConfig { sensitivity: c, ..*model.config() };
                model = model.with_config(config)?;
            }
            let bases = read_nonces(&a.input)?;
            run.output(a.out.as_deref(), &gcm::predictions_tsv(&model, &bases)?)
        }
        Cmd::Eval(a) => {
            run.inputs(a.lexicon.iter().map(PathBuf::as_path).chain(a.probes.paths()))?;
            let mut models = Vec::new();
            for spec in &a.predictions {
                let (name, path) = spec
                    .split_once('=')
                    .ok_or_else(|| Error::input(format!("--predictions expects name=path, got `{spec}`")))?;
                let path = Path::new(path);
                run.input(path)?;
                models.push(ModelPredictions { name: name.to_owned(), predictions: read_choices(path)? });
            }
            let inputs = ReportInputs {
                lexicon: a.lexicon.as_deref().map(read_lexicon).transpose()?,
                seen_probes: load_probes(a.probes.probes.as_deref())?,
                nonce_probes: load_probes(a.probes.nonce_probes.as_deref())?,
                models,
                preferences: a.probes.preferences.as_deref().map(read_jsonl).transpose()?,
                annotations: a.probes.annotations.as_deref().map(read_annotations).transpose()?,
                vocab: a.probes.vocab.as_deref().map(read_jsonl).transpose()?,
                bounds: a.probes.bounds.bounds(),
            };
            let analyses = analyze(&inputs)?;
            emit_report(&analyses, &inputs, run.manifest.clone(), &a.out)?;
            Ok(())
        }
        Cmd::Parse(a) => {
            let mut words = a.words.clone();
            if let Some(p) = &a.input {
                run.input(p)?;
                words.extend(nomlab::io::read_lines(p)?.into_iter().map(|w| w.trim().to_lowercase()).filter(|w| !w.is_empty()));
            }
            if words.is_empty() {
                return Err(Error::input("no words to parse"));
            }
            let custom;
            let inventory = match (&a.prefixes, &a.suffixes, &a.stems) {
                (Some(p), Some(s), Some(t)) => {
                    run.inputs([p, s, t].map(PathBuf::as_path))?;
                    custom = AffixInventory::from_files(p, s, t)?;
                    &custom
                }
                _ => AffixInventory::bundled(),
            };
            let mut out = String::new();
            for w in &words {
                let parse = parse_word(w, inventory, a.max_depth);
                out.push_str(&serde_json::to_string(&parse).expect("parse serializes"));
                out.push('\n');
            }
            run.output(a.out.as_deref(), &out)
        }
        Cmd::Report(a) => {
            require_corpus(&a.corpus)?;
            let config = PipelineConfig {
                corpus: a.corpus.corpus.clone(),
                format: a.corpus.format,
                words: a.words.clone(),
                nonces: a.nonces.clone(),
                classes: a.classes.clone(),
                seed: a.seed,
                per_length: a.per_length,
                alpha: a.alpha,
                selector: a.selector,
                sensitivity: a.sensitivity,
                fit_queries: (a.fit_queries > 0).then_some(a.fit_queries),
                seen_probes: a.probes.probes.clone(),
                nonce_probes: a.probes.nonce_probes.clone(),
                preferences: a.probes.preferences.clone(),
                annotations: a.probes.annotations.clone(),
                vocab: a.probes.vocab.clone(),
                bounds: a.probes.bounds.bounds(),
            };
            pipeline::run(&config, run.manifest.clone(), &a.out)?;
            Ok(())
        }
    }
}

fn require_corpus(c: &CorpusArgs) -> Result<()> {
    if c.corpus.is_empty() {
        return Err(Error::input("give at least one --corpus file"));
    }
    Ok(())
}

fn out_path(cmd: &Cmd) -> Option<&Path> {
    match cmd {
        Cmd::Count(a) => a.out.as_deref(),
        Cmd::Extract(a) => a.out.as_deref(),
        Cmd::Stats(a) => a.out.as_deref(),
        Cmd::Nonce(a) => a.out.as_deref(),
        Cmd::MglTrain(a) => a.out.as_deref(),
        Cmd::MglPredict(a) => a.out.as_deref(),
        Cmd::GcmTrain(a) => a.out.as_deref(),
        Cmd::GcmPredict(a) => a.out.as_deref(),
        Cmd::Parse(a) => a.out.as_deref(),
        // these write manifest.json into their output directory
        Cmd::Eval(_) | Cmd::Report(_) => None,
    }
}

fn error_json(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": { "kind": kind, "message": message } }).to_string()
}

fn fail(err: &Error) -> ExitCode {
    let (kind, code) = if err.is_input_error() { ("input", 1) } else { ("internal", 2) };
    eprintln!("{}", error_json(kind, &err.to_string()));
    ExitCode::from(code)
}

/// Parses `argv`, folding in `--config` defaults.
fn parse_args(argv: Vec<OsString>) -> std::result::Result<(Cli, clap::ArgMatches), ParseFailure> {
    let command = Cli::command();
    let matches = command.clone().try_get_matches_from(&argv).map_err(ParseFailure::Clap)?;
    let cli = Cli::from_arg_matches(&matches).map_err(ParseFailure::Clap)?;
    let Some(path) = &cli.config else { return Ok((cli, matches)) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| ParseFailure::Lib(Error::Io { path: path.clone(), line: 0, source: e }))?;
    let entries = config::parse(&text, path).map_err(ParseFailure::Lib)?;
    let argv = config::merge(&argv, &command, &matches, &entries).map_err(ParseFailure::Lib)?;
    let matches = command.try_get_matches_from(&argv).map_err(ParseFailure::Clap)?;
    let cli = Cli::from_arg_matches(&matches).map_err(ParseFailure::Clap)?;
    Ok((cli, matches))
}

enum ParseFailure {
    Clap(clap::Error),
    Lib(Error),
}

fn main() -> ExitCode {
    let (cli, matches) = match parse_args(std::env::args_os().collect()) {
        Ok(parsed) => parsed,
        Err(ParseFailure::Clap(e)) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
        Err(ParseFailure::Lib(e)) => return fail(&e),
    };
    if cli.version {
        print!("{}", version_text());
        return ExitCode::SUCCESS;
    }
    let Some(cmd) = cli.command else {
        let _ = Cli::command().print_help();
        return ExitCode::from(1);
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(&Error::input(format!("cannot set up {n} threads: {e}")));
        }
    }
    let (name, sub_matches) = matches.subcommand().expect("a subcommand was parsed");
    let command = Cli::command();
    let sub = command.find_subcommand(name).expect("parsed subcommand exists");
    let mut run = Run::new(sub, sub_matches);
    run.manifest.config.insert("threads".into(), cli.threads.map_or("auto".into(), |n| n.to_string()));
    run.manifest_at(cli.manifest.as_deref(), out_path(&cmd));
    match execute(cmd, &mut run).and_then(|()| run.finish()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
