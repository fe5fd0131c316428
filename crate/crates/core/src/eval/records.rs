use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{for_each_line, parse_error};
use crate::morphlex::{Base, SuffixChoice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptKind {
    Nominalize,
    Vocab,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub id: String,
    pub text: String,
    pub kind: PromptKind,
}

impl PromptTemplate {
    /// Substitutes `{base}` or `{word}`; templates without a slot are
    /// returned unchanged.
    pub fn fill(&self, word: &str) -> String {
        self.text.replace("{base}", word).replace("{word}", word)
    }
}

pub(crate) const BUNDLED_PROMPTS: &str = include_str!("../../data/prompts.json");

pub fn bundled_prompts() -> Vec<PromptTemplate> {
    serde_json::from_str(BUNDLED_PROMPTS).expect("bundled prompts are valid JSON")
}

pub fn read_prompts(path: &Path) -> Result<Vec<PromptTemplate>> {
    let text = std::fs::read_to_string(path).map_err(|e| crate::io::io_error(path, 0, e))?;
    let prompts: Vec<PromptTemplate> =
        serde_json::from_str(&text).map_err(|e| parse_error(path, e.line(), e.to_string()))?;
    let mut ids = HashSet::new();
    for p in &prompts {
        if !ids.insert(p.id.as_str()) {
            return Err(parse_error(path, 0, format!("duplicate prompt id `{}`", p.id)));
        }
    }
    Ok(prompts)
}

/// Log probabilities of the two derivatives of `base` under one prompt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub base: Base,
    pub prompt_id: String,
    pub logp_ity: f64,
    pub logp_ness: f64,
    pub model_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceRecord {
    pub base: Base,
    pub choice: SuffixChoice,
    pub model_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabRecord {
    pub word: String,
    pub prompt_id: String,
    pub logp: f64,
    pub frequency: u64,
    pub familiarity: f64,
    pub is_complex: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub item: Base,
    pub annotator_id: String,
    pub choice: SuffixChoice,
}

/// Per-record checks applied while reading.
pub trait Validate {
    fn validate(&self) -> std::result::Result<(), String>;
}

impl Validate for ProbeRecord {
    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.logp_ity.is_finite() && self.logp_ness.is_finite()) {
            return Err(format!("non-finite log probability for `{}`", self.base));
        }
        Ok(())
    }
}

impl Validate for PreferenceRecord {
    fn validate(&self) -> std::result::Result<(), String> {
        Ok(())
    }
}

impl Validate for VocabRecord {
    fn validate(&self) -> std::result::Result<(), String> {
        if !self.logp.is_finite() {
            return Err(format!("non-finite log probability for `{}`", self.word));
        }
        if !(1.0..=7.0).contains(&self.familiarity) {
            return Err(format!("familiarity {} of `{}` is outside 1..7", self.familiarity, self.word));
        }
        Ok(())
    }
}

/// Reads JSON Lines (optionally gzipped), validating each record.
pub fn read_jsonl<T: DeserializeOwned + Validate>(path: &Path) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for_each_line(path, |_, line| {
        if line.trim().is_empty() {
            return Ok(());
        }
        let rec: T = serde_json::from_str(line).map_err(|e| e.to_string())?;
        rec.validate()?;
        out.push(rec);
        Ok(())
    })?;
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(records: &[T]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Rejects duplicate (base, prompt, model) keys.
pub fn check_probes(records: &[ProbeRecord]) -> Result<()> {
    let mut seen = HashSet::new();
    for r in records {
        if !seen.insert((r.base.form(), r.prompt_id.as_str(), r.model_id.as_str())) {
            return Err(Error::input(format!(
                "duplicate probe record for `{}` / {} / {}",
                r.base, r.prompt_id, r.model_id
            )));
        }
    }
    Ok(())
}

const ANNOTATION_HEADER: &str = "item\tannotator_id\tchoice";

pub fn read_annotations(path: &Path) -> Result<Vec<AnnotationRecord>> {
    let mut out = Vec::new();
    let mut header_seen = false;
    for_each_line(path, |_, line| {
        if line.trim().is_empty() || line.starts_with('#') {
            return Ok(());
        }
        if !header_seen {
            header_seen = true;
            if line == ANNOTATION_HEADER {
                return Ok(());
            }
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let [item, annotator, choice] = cols[..] else {
            return Err(format!("expected 3 columns, found {}", cols.len()));
        };
        out.push(AnnotationRecord {
            item: Base::parse(item).map_err(|e| e.to_string())?,
            annotator_id: annotator.to_owned(),
            choice: choice.parse().map_err(|e: Error| e.to_string())?,
        });
        Ok(())
    })?;
    Ok(out)
}

pub fn write_annotations(records: &[AnnotationRecord]) -> String {
    let mut out = format!("{ANNOTATION_HEADER}\n");
    for r in records {
        let _ = writeln!(out, "{}\t{}\t{}", r.item, r.annotator_id, r.choice);
    }
    out
}

/// `base<TAB>class<TAB>d_ity<TAB>d_ness` for the probing adapter, which
/// takes derivative spellings from here rather than deriving them.
pub fn bases_tsv(bases: &[Base]) -> String {
    let mut out = String::from("base\tclass\td_ity\td_ness\n");
    for b in bases {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            b,
            b.class().suffix(),
            b.derivative(SuffixChoice::Ity),
            b.derivative(SuffixChoice::Ness)
        );
    }
    out
}

/// The `base` and `choice` columns of a prediction table, located by
/// header.
pub fn read_choices(path: &Path) -> Result<super::Reference> {
    let mut columns: Option<(usize, usize)> = None;
    let mut out = super::Reference::new();
    for_each_line(path, |_, line| {
        if line.trim().is_empty() || line.starts_with('#') {
            return Ok(());
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let Some((b, c)) = columns else {
            let find = |name: &str| cols.iter().position(|h| *h == name).ok_or(format!("header has no `{name}` column"));
            columns = Some((find("base")?, find("choice")?));
            return Ok(());
        };
        let (Some(base), Some(choice)) = (cols.get(b), cols.get(c)) else {
            return Err(format!("expected at least {} columns", b.max(c) + 1));
        };
        let choice: SuffixChoice = choice.parse().map_err(|e: Error| e.to_string())?;
        if out.insert((*base).to_owned(), choice).is_some() {
            return Err(format!("duplicate prediction for `{base}`"));
        }
        Ok(())
    })?;
    if columns.is_none() {
        return Err(parse_error(path, 0, "empty prediction table"));
    }
    Ok(out)
}
