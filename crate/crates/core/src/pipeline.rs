//! The whole workflow on one corpus: count, extract the lexicon, generate
//! nonces, train both models in both weighting modes, predict, evaluate.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::corpus::{count_corpus, extract_lexicon, filter_classes, lexicon_to_tsv, CorpusFormat};
use crate::error::{Error, Result};
use crate::eval::report::{analyze, emit_report, Analyses, Manifest, ReportInputs};
use crate::eval::{
    bases_tsv, check_probes, read_annotations, read_jsonl, BucketBounds, ModelPredictions, Reference,
};
use crate::gcm::{self, default_grid, fit_sensitivity, GcmConfig, GcmModel};
use crate::io::{bytes_digest, file_digest, write_file};
use crate::mgl::{self, training_pairs, MglConfig, Selector, DEFAULT_ALPHA};
use crate::morphlex::{bundled_words, AdjectiveClass, Base};
use crate::noncegen::{self, generate_classes, read_nonces, read_word_list, DEFAULT_PER_LENGTH};
use crate::WeightMode;

/// Held-out bases per mode when fitting the GCM sensitivity.
pub const DEFAULT_FIT_QUERIES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus: Vec<PathBuf>,
    pub format: CorpusFormat,
    /// Word list for the nonce chains; the bundled list when absent.
    pub words: Option<PathBuf>,
    /// Further bases to predict alongside the generated ones, typically the
    /// probed nonces.
    pub nonces: Option<PathBuf>,
    /// Classes to generate nonces for and to train on.
    pub classes: Vec<AdjectiveClass>,
    pub seed: u64,
    pub per_length: usize,
    pub alpha: f64,
    pub selector: Selector,
    /// One sensitivity for both modes; fitted per mode when absent.
    pub sensitivity: Option<f64>,
    pub fit_queries: Option<usize>,
    pub seen_probes: Option<PathBuf>,
    pub nonce_probes: Option<PathBuf>,
    pub preferences: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub vocab: Option<PathBuf>,
    pub bounds: BucketBounds,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus: Vec::new(),
            format: CorpusFormat::Auto,
            words: None,
            nonces: None,
            classes: AdjectiveClass::NONCE.to_vec(),
            seed: 0,
            per_length: DEFAULT_PER_LENGTH,
            alpha: DEFAULT_ALPHA,
            selector: Selector::default(),
            sensitivity: None,
            fit_queries: Some(DEFAULT_FIT_QUERIES),
            seen_probes: None,
            nonce_probes: None,
            preferences: None,
            annotations: None,
            vocab: None,
            bounds: BucketBounds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub lexicon_size: usize,
    pub nonces: Vec<Base>,
    pub sensitivity: BTreeMap<WeightMode, f64>,
    pub analyses: Analyses,
    pub written: Vec<PathBuf>,
}

/// Column name of a model in prediction tables.
pub fn model_name(model: &str, mode: WeightMode) -> String {
    format!("{model}_{mode}")
}

struct Outputs<'a> {
    dir: &'a Path,
    manifest: &'a mut Manifest,
    written: Vec<PathBuf>,
}

impl Outputs<'_> {
    fn write(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        write_file(&path, body.as_bytes())?;
        self.manifest.outputs.insert(name.to_owned(), bytes_digest(body.as_bytes()));
        self.written.push(path);
        Ok(())
    }
}

fn record_input(manifest: &mut Manifest, path: &Path) -> Result<()> {
    manifest.inputs.insert(path.display().to_string(), file_digest(path)?);
    Ok(())
}

/// Runs every stage and writes intermediate files, tables, figures and
/// `manifest.json` into `dir`.
pub fn run(config: &PipelineConfig, mut manifest: Manifest, dir: &Path) -> Result<PipelineRun> {
    if config.corpus.is_empty() {
        return Err(Error::input("no corpus files given"));
    }
    if config.classes.is_empty() {
        return Err(Error::input("no adjective classes selected"));
    }
    let optional = [
        &config.words,
        &config.nonces,
        &config.seen_probes,
        &config.nonce_probes,
        &config.preferences,
        &config.annotations,
        &config.vocab,
    ];
    for path in config.corpus.iter().chain(optional.into_iter().flatten()) {
        record_input(&mut manifest, path)?;
    }
    let mut out = Outputs { dir, manifest: &mut manifest, written: Vec::new() };

    let freq = count_corpus(&config.corpus, config.format)?;
    out.write("frequency.tsv", &freq.to_tsv())?;
    let lexicon = extract_lexicon(&freq);
    out.write("lexicon.tsv", &lexicon_to_tsv(&lexicon))?;

    let words = match &config.words {
        Some(path) => read_word_list(path)?,
        None => bundled_words(),
    };
    let generated = generate_classes(&words, &config.classes, config.per_length, config.seed, &freq)?;
    out.write("nonces.tsv", &noncegen::to_tsv(&generated))?;
    out.write("bases.tsv", &bases_tsv(&generated))?;

    let mut targets: Vec<Base> = match &config.nonces {
        Some(path) => read_nonces(path)?,
        None => Vec::new(),
    };
    let mut seen: HashSet<String> = targets.iter().map(|b| b.form().to_owned()).collect();
    targets.extend(generated.iter().filter(|b| seen.insert(b.form().to_owned())).cloned());

    let training = filter_classes(&lexicon, &config.classes);
    if training.is_empty() {
        return Err(Error::input("the corpus yields no lexicon entries of the selected classes"));
    }
    let pairs = training_pairs(&training, None);
    let mut models = Vec::new();
    let mut sensitivity = BTreeMap::new();
    let mut curves: Vec<Vec<(f64, f64)>> = Vec::new();
    for mode in WeightMode::ALL {
        let mgl_model = mgl::train(&pairs, &MglConfig { mode, alpha: config.alpha, features: None })?;
        out.write(&format!("mgl_{mode}.tsv"), &mgl_model.to_tsv())?;
        let mut predictions = Reference::new();
        for b in &targets {
            predictions.insert(b.form().to_owned(), mgl_model.predict_with(b.form(), config.selector)?.choice);
        }
        let name = model_name("mgl", mode);
        out.write(&format!("predictions_{name}.tsv"), &mgl::predictions_tsv(&mgl_model, &targets, config.selector)?)?;
        models.push(ModelPredictions { name, predictions });
    }
    for mode in WeightMode::ALL {
        let base_config = GcmConfig { mode, ..GcmConfig::default() };
        let c = match config.sensitivity {
            Some(c) => c,
            None => {
                let fit = fit_sensitivity(&training, base_config, &default_grid(), config.fit_queries)?;
                curves.push(fit.curve);
                fit.sensitivity
            }
        };
        sensitivity.insert(mode, c);
        let gcm_model = GcmModel::from_lexicon(&training, GcmConfig { sensitivity: c, ..base_config })?;
        out.write(&format!("gcm_{mode}.tsv"), &gcm_model.to_tsv())?;
        let mut predictions = Reference::new();
        for b in &targets {
            predictions.insert(b.form().to_owned(), gcm_model.predict(b.form())?);
        }
        let name = model_name("gcm", mode);
        out.write(&format!("predictions_{name}.tsv"), &gcm::predictions_tsv(&gcm_model, &targets)?)?;
        models.push(ModelPredictions { name, predictions });
    }
    if let [type_curve, token_curve] = curves.as_slice() {
        let mut csv = String::from("sensitivity,type_accuracy,token_accuracy\n");
        for ((c, a), (_, b)) in type_curve.iter().zip(token_curve) {
            let _ = writeln!(csv, "{c:.6},{a:.6},{b:.6}");
        }
        out.write("gcm_sensitivity_fit.csv", &csv)?;
    }

    let probes = |path: &Option<PathBuf>| -> Result<_> {
        path.as_deref()
            .map(|p| {
                let records = read_jsonl(p)?;
                check_probes(&records)?;
                Ok(records)
            })
            .transpose()
    };
    let inputs = ReportInputs {
        lexicon: Some(lexicon.clone()),
        seen_probes: probes(&config.seen_probes)?,
        nonce_probes: probes(&config.nonce_probes)?,
        models,
        preferences: config.preferences.as_deref().map(read_jsonl).transpose()?,
        annotations: config.annotations.as_deref().map(read_annotations).transpose()?,
        vocab: config.vocab.as_deref().map(read_jsonl).transpose()?,
        bounds: config.bounds,
    };
    let analyses = analyze(&inputs)?;
    let mut written = out.written;
    written.extend(emit_report(&analyses, &inputs, manifest, dir)?);
    Ok(PipelineRun { lexicon_size: lexicon.len(), nonces: generated, sensitivity, analyses, written })
}
