//! Browser bindings: GCM scoring over a sensitivity range, MGL prediction
//! with the deciding rule, and nonce generation. Every method returns JSON.

use std::cell::OnceCell;
use std::io::BufReader;
use std::path::Path;

use flate2::read::GzDecoder;
use nomlab::corpus::{filter_classes, parse_lexicon, FrequencyTable, LexiconEntry};
use nomlab::gcm::{log_grid, GcmConfig, GcmModel};
use nomlab::mgl::{self, training_pairs, MglConfig, MglModel, DEFAULT_ALPHA};
use nomlab::morphlex::bundled_words;
use nomlab::noncegen::generate_classes;
use nomlab::{AdjectiveClass, Base, SuffixChoice, WeightMode};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const DEFAULT_LEXICON_GZ: &[u8] = include_bytes!("../../../fixtures/lexicon.tsv.gz");

type Out = Result<String, String>;

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn mode(name: &str) -> Result<WeightMode, String> {
    name.parse().map_err(fail)
}

fn slot(mode: WeightMode) -> usize {
    match mode {
        WeightMode::Type => 0,
        WeightMode::Token => 1,
    }
}

#[wasm_bindgen]
pub struct Demo {
    lexicon: Vec<LexiconEntry>,
    gcm: [GcmModel; 2],
    mgl: [OnceCell<MglModel>; 2],
    words: OnceCell<Vec<String>>,
}

#[wasm_bindgen]
impl Demo {
    /// Models trained on the bundled lexicon.
    #[wasm_bindgen(constructor)]
    pub fn new() -> Result<Demo, String> {
        let reader = BufReader::new(GzDecoder::new(DEFAULT_LEXICON_GZ));
        Demo::build(parse_lexicon(reader, Path::new("lexicon.tsv.gz")).map_err(fail)?)
    }

    /// Models trained on a lexicon table (`base, class, base_count,
    /// ity_count, ness_count`).
    #[wasm_bindgen(js_name = fromTsv)]
    pub fn from_tsv(text: &str) -> Result<Demo, String> {
        Demo::build(parse_lexicon(text.as_bytes(), Path::new("lexicon.tsv")).map_err(fail)?)
    }

    fn build(lexicon: Vec<LexiconEntry>) -> Result<Demo, String> {
        let lexicon = filter_classes(&lexicon, &AdjectiveClass::NONCE);
        let gcm = |mode| GcmModel::from_lexicon(&lexicon, GcmConfig { mode, ..GcmConfig::default() }).map_err(fail);
        Ok(Demo {
            gcm: [gcm(WeightMode::Type)?, gcm(WeightMode::Token)?],
            lexicon,
            mgl: [OnceCell::new(), OnceCell::new()],
            words: OnceCell::new(),
        })
    }

    #[wasm_bindgen(js_name = lexiconSize)]
    pub fn lexicon_size(&self) -> usize {
        self.lexicon.len()
    }

    /// `{p_ity, p_ness, choice, curve: [[c, p_ness], ...]}` for `query` at
    /// sensitivity `c`, with the curve over `points` log-spaced values in
    /// `[lo, hi]`.
    #[wasm_bindgen(js_name = gcmScore)]
    pub fn gcm_score(&self, query: &str, weighting: &str, c: f64, lo: f64, hi: f64, points: usize) -> Out {
        let query = query.trim().to_lowercase();
        let model = &self.gcm[slot(mode(weighting)?)];
        if !(c.is_finite() && c >= 0.0 && lo > 0.0 && hi > lo && points >= 2) {
            return Err(format!("bad sensitivity range: c={c}, [{lo}, {hi}], {points} points"));
        }
        let profile = model.profile(&query);
        let at = |c: f64| profile.score(&GcmConfig { sensitivity: c, ..*model.config() }, &query).map_err(fail);
        let score = at(c)?;
        let curve = log_grid(lo, hi, points)
            .into_iter()
            .map(|c| Ok(json!([c, at(c)?.p_ness])))
            .collect::<Result<Vec<Value>, String>>()?;
        Ok(json!({
            "query": query,
            "p_ity": score.p_ity,
            "p_ness": score.p_ness,
            "choice": score.choice().as_str(),
            "curve": curve,
        })
        .to_string())
    }

    /// `{choice, rule, best_ity, best_ness}`; the rule is the one that
    /// decides the prediction.
    #[wasm_bindgen(js_name = mglPredict)]
    pub fn mgl_predict(&self, base: &str, weighting: &str) -> Out {
        let base = base.trim().to_lowercase();
        let mode = mode(weighting)?;
        let model = match self.mgl[slot(mode)].get() {
            Some(m) => m,
            None => {
                let pairs = training_pairs(&self.lexicon, None);
                let trained = mgl::train(&pairs, &MglConfig { mode, alpha: DEFAULT_ALPHA, features: None }).map_err(fail)?;
                self.mgl[slot(mode)].get_or_init(|| trained)
            }
        };
        let p = model.predict(&base).map_err(fail)?;
        Ok(json!({
            "base": base,
            "choice": p.choice.as_str(),
            "rule": {
                "text": p.rule.to_string(),
                "output": p.rule.output.as_str(),
                "context": p.rule.context.to_string(),
                "hits": p.rule.hits,
                "scope": p.rule.scope,
                "reliability": p.rule.reliability,
                "confidence": p.rule.confidence,
            },
            "best_ity": p.best_for(SuffixChoice::Ity),
            "best_ness": p.best_for(SuffixChoice::Ness),
            "rules": model.rules().len(),
        })
        .to_string())
    }

    /// `[{base, class, d_ity, d_ness}, ...]`: nonces of one class, novel
    /// with respect to the bundled word list and the lexicon.
    pub fn nonces(&self, class: &str, per_length: usize, seed: u32) -> Out {
        let class: AdjectiveClass = class.parse().map_err(fail)?;
        if per_length == 0 || per_length > 200 {
            return Err(format!("per-length count must be in 1..=200, got {per_length}"));
        }
        let words = self.words.get_or_init(bundled_words);
        let freq = FrequencyTable::from_lexicon(&self.lexicon);
        let bases = generate_classes(words, &[class], per_length, u64::from(seed), &freq).map_err(fail)?;
        let rows: Vec<Value> = bases.iter().map(row).collect();
        Ok(Value::Array(rows).to_string())
    }
}

fn row(b: &Base) -> Value {
    json!({
        "base": b.form(),
        "class": b.class().suffix(),
        "d_ity": b.derivative(SuffixChoice::Ity),
        "d_ness": b.derivative(SuffixChoice::Ness),
    })
}
