//! Language-model probe analyses: derivative preferences against reference
//! labels, frequency effects on confidence, human judgments and word
//! familiarity.

mod records;
pub mod report;
pub mod svg;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::corpus::LexiconEntry;
use crate::error::{Error, Result};
use crate::morphlex::{AdjectiveClass, Base, SuffixChoice};
use crate::stats::{
    self, fleiss_kappa, gwet_ac1, mcnemar_exact, mean, pearson_r, population_std, welch_t, Correlation,
    Distribution, OlsFit, RatingMatrix, TTest,
};

pub(crate) use records::BUNDLED_PROMPTS;
pub use records::{
    bases_tsv, bundled_prompts, check_probes, read_annotations, read_choices, read_jsonl, read_prompts, write_annotations,
    write_jsonl, AnnotationRecord, Validate, PreferenceRecord, ProbeRecord, PromptKind, PromptTemplate, VocabRecord,
};

/// Reference label per base form.
pub type Reference = HashMap<String, SuffixChoice>;

/// Natural-log units per base-10 unit.
pub const LN_10: f64 = std::f64::consts::LN_10;

/// Converts a log-probability difference from nats to base 10.
pub fn nats_to_log10(delta: f64) -> f64 {
    delta / LN_10
}

/// Preferred derivative under a probe: the higher log probability, ITY on
/// exact ties.
pub fn winner(r: &ProbeRecord) -> SuffixChoice {
    if r.logp_ness > r.logp_ity {
        SuffixChoice::Ness
    } else {
        SuffixChoice::Ity
    }
}

/// The preferred derivative of every base with at least one attested
/// derivative.
pub fn preferred_reference(lexicon: &[LexiconEntry]) -> Reference {
    lexicon
        .iter()
        .filter_map(|e| e.preferred().map(|c| (e.base.form().to_owned(), c)))
        .collect()
}

/// The attested derivative of every base with exactly one attested
/// derivative.
pub fn attested_only_reference(lexicon: &[LexiconEntry]) -> Reference {
    lexicon
        .iter()
        .filter_map(|e| e.attested_only().map(|c| (e.base.form().to_owned(), c)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PromptScore {
    pub prompt_id: String,
    pub value: f64,
    pub n: usize,
}

/// Per-prompt values with their mean and population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub per_prompt: Vec<PromptScore>,
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn new(per_prompt: Vec<PromptScore>) -> Result<Summary> {
        if per_prompt.is_empty() {
            return Err(Error::input("no prompts to summarize"));
        }
        let values: Vec<f64> = per_prompt.iter().map(|p| p.value).collect();
        Ok(Summary { mean: mean(&values), std: population_std(&values), per_prompt })
    }
}

fn by_prompt<'a>(records: impl IntoIterator<Item = &'a ProbeRecord>) -> BTreeMap<&'a str, Vec<&'a ProbeRecord>> {
    let mut out: BTreeMap<&str, Vec<&ProbeRecord>> = BTreeMap::new();
    for r in records {
        out.entry(r.prompt_id.as_str()).or_default().push(r);
    }
    out
}

fn single_model(records: &[ProbeRecord]) -> Result<()> {
    let models: BTreeSet<&str> = records.iter().map(|r| r.model_id.as_str()).collect();
    if models.len() > 1 {
        return Err(Error::input(format!(
            "records mix models {:?}; filter to one model first",
            models
        )));
    }
    Ok(())
}

/// Accuracy of probe winners against `reference`, computed per prompt and
/// then averaged over prompts.
pub fn accuracy(records: &[ProbeRecord], reference: &Reference) -> Result<Summary> {
    single_model(records)?;
    let mut per_prompt = Vec::new();
    for (prompt, recs) in by_prompt(records) {
        let mut correct = 0usize;
        for r in &recs {
            let want = reference
                .get(r.base.form())
                .ok_or_else(|| Error::input(format!("no reference label for `{}`", r.base)))?;
            correct += usize::from(winner(r) == *want);
        }
        per_prompt.push(PromptScore {
            prompt_id: prompt.to_owned(),
            value: correct as f64 / recs.len() as f64,
            n: recs.len(),
        });
    }
    Summary::new(per_prompt)
}

/// Records whose base belongs to `class`.
pub fn of_class(records: &[ProbeRecord], class: AdjectiveClass) -> Vec<ProbeRecord> {
    records.iter().filter(|r| r.base.class() == class).cloned().collect()
}

/// Records whose base has a reference label.
pub fn covered(records: &[ProbeRecord], reference: &Reference) -> Vec<ProbeRecord> {
    records.iter().filter(|r| reference.contains_key(r.base.form())).cloned().collect()
}

/// Prompt-averaged accuracy for each class present in `records`.
pub fn accuracy_by_class(records: &[ProbeRecord], reference: &Reference) -> Result<BTreeMap<AdjectiveClass, Summary>> {
    let classes: BTreeSet<AdjectiveClass> = records.iter().map(|r| r.base.class()).collect();
    classes.into_iter().map(|c| Ok((c, accuracy(&of_class(records, c), reference)?))).collect()
}

/// Share of NESS among the choices of each class.
pub fn ness_ratio(predictions: impl IntoIterator<Item = (AdjectiveClass, SuffixChoice)>) -> BTreeMap<AdjectiveClass, f64> {
    let mut counts: BTreeMap<AdjectiveClass, (usize, usize)> = BTreeMap::new();
    for (class, choice) in predictions {
        let e = counts.entry(class).or_default();
        e.1 += 1;
        if choice == SuffixChoice::Ness {
            e.0 += 1;
        }
    }
    counts.into_iter().map(|(c, (ness, n))| (c, ness as f64 / n as f64)).collect()
}

/// NESS ratio of probe winners per prompt and class.
pub fn winner_ratios(records: &[ProbeRecord]) -> BTreeMap<String, BTreeMap<AdjectiveClass, f64>> {
    by_prompt(records)
        .into_iter()
        .map(|(p, recs)| (p.to_owned(), ness_ratio(recs.iter().map(|r| (r.base.class(), winner(r))))))
        .collect()
}

/// NESS ratio of the preferred derivative per class in the lexicon.
pub fn lexicon_ratios(lexicon: &[LexiconEntry]) -> BTreeMap<AdjectiveClass, f64> {
    ness_ratio(lexicon.iter().filter_map(|e| e.preferred().map(|c| (e.base.class(), c))))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioCorrelation {
    pub per_prompt: Vec<(String, Correlation)>,
    pub mean_r: f64,
    pub std_r: f64,
}

/// Pearson r between the lexicon's class-level NESS ratios and the probe
/// winners' class-level NESS ratios, per prompt.
pub fn class_ratio_correlation(records: &[ProbeRecord], lexicon: &[LexiconEntry]) -> Result<RatioCorrelation> {
    single_model(records)?;
    let train = lexicon_ratios(lexicon);
    let mut per_prompt = Vec::new();
    for (prompt, ratios) in winner_ratios(records) {
        let (x, y): (Vec<f64>, Vec<f64>) =
            ratios.iter().filter_map(|(c, r)| train.get(c).map(|t| (*t, *r))).unzip();
        per_prompt.push((prompt, pearson_r(&x, &y)?));
    }
    if per_prompt.is_empty() {
        return Err(Error::input("no probe records"));
    }
    let rs: Vec<f64> = per_prompt.iter().map(|(_, c)| c.r).collect();
    Ok(RatioCorrelation { mean_r: mean(&rs), std_r: population_std(&rs), per_prompt })
}

/// Log-probability margin of the attested over the unattested derivative.
pub fn delta(r: &ProbeRecord, attested: SuffixChoice) -> f64 {
    match attested {
        SuffixChoice::Ity => r.logp_ity - r.logp_ness,
        SuffixChoice::Ness => r.logp_ness - r.logp_ity,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanDelta {
    pub delta: f64,
    pub n: usize,
}

/// Mean margin per (class, prompt) over the bases listed in `attested`.
pub fn confidence_delta(records: &[ProbeRecord], attested: &Reference) -> BTreeMap<(AdjectiveClass, String), MeanDelta> {
    let mut sums: BTreeMap<(AdjectiveClass, String), (f64, usize)> = BTreeMap::new();
    for r in records {
        if let Some(&choice) = attested.get(r.base.form()) {
            let e = sums.entry((r.base.class(), r.prompt_id.clone())).or_default();
            e.0 += delta(r, choice);
            e.1 += 1;
        }
    }
    sums.into_iter().map(|(k, (s, n))| (k, MeanDelta { delta: s / n as f64, n })).collect()
}

/// Frequency bands of the attested derivative: low is `(0, low_max]`,
/// high is `(high_min, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BucketBounds {
    pub low_max: u64,
    pub high_min: u64,
}

impl Default for BucketBounds {
    fn default() -> Self {
        BucketBounds { low_max: 10, high_min: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketPoint {
    pub class: AdjectiveClass,
    pub prompt_id: String,
    pub delta_low: f64,
    pub delta_high: f64,
    pub n_low: usize,
    pub n_high: usize,
    /// `(delta_high − delta_low) / delta_low`, in percent.
    pub relative_increase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketAnalysis {
    pub points: Vec<BucketPoint>,
    /// Classes or points left out, with the reason.
    pub excluded: Vec<String>,
}

/// Compares mean margins of rare and frequent attested derivatives, using
/// only bases with exactly one attested derivative.
pub fn frequency_buckets(lexicon: &[LexiconEntry], records: &[ProbeRecord], bounds: BucketBounds) -> Result<BucketAnalysis> {
    single_model(records)?;
    if bounds.low_max > bounds.high_min {
        return Err(Error::input("low bucket must lie below the high bucket"));
    }
    let mut low = Reference::new();
    let mut high = Reference::new();
    for e in lexicon {
        let Some(choice) = e.attested_only() else { continue };
        let f = e.count(choice);
        if f <= bounds.low_max {
            low.insert(e.base.form().to_owned(), choice);
        } else if f > bounds.high_min {
            high.insert(e.base.form().to_owned(), choice);
        }
    }
    let d_low = confidence_delta(records, &low);
    let d_high = confidence_delta(records, &high);
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    let classes: BTreeSet<AdjectiveClass> = records.iter().map(|r| r.base.class()).collect();
    let prompts: BTreeSet<&str> = records.iter().map(|r| r.prompt_id.as_str()).collect();
    for class in classes {
        let mut missing = false;
        for &prompt in &prompts {
            let key = (class, prompt.to_owned());
            let (Some(l), Some(h)) = (d_low.get(&key), d_high.get(&key)) else {
                missing = true;
                continue;
            };
            if l.delta == 0.0 {
                excluded.push(format!("{class}/{prompt}: zero low-frequency margin"));
                continue;
            }
            points.push(BucketPoint {
                class,
                prompt_id: prompt.to_owned(),
                delta_low: l.delta,
                delta_high: h.delta,
                n_low: l.n,
                n_high: h.n,
                relative_increase: (h.delta - l.delta) / l.delta * 100.0,
            });
        }
        if missing {
            excluded.push(format!("{class}: empty frequency bucket"));
        }
    }
    Ok(BucketAnalysis { points, excluded })
}

/// Shannon entropy (bits) of each class's distribution of preferred
/// derivatives.
pub fn class_entropy(lexicon: &[LexiconEntry]) -> Result<BTreeMap<AdjectiveClass, f64>> {
    let mut counts: BTreeMap<AdjectiveClass, [f64; 2]> = BTreeMap::new();
    for e in lexicon {
        if let Some(c) = e.preferred() {
            counts.entry(e.base.class()).or_default()[c.index()] += 1.0;
        }
    }
    counts
        .into_iter()
        .map(|(c, n)| Ok((c, stats::shannon_entropy(&Distribution::from_counts(&n)?))))
        .collect()
}

/// Correlation between class entropy and relative confidence increase over
/// all (class, prompt) points.
pub fn entropy_confidence_correlation(lexicon: &[LexiconEntry], buckets: &BucketAnalysis) -> Result<Correlation> {
    let entropy = class_entropy(lexicon)?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for p in &buckets.points {
        let h = entropy
            .get(&p.class)
            .ok_or_else(|| Error::input(format!("class {} is not in the lexicon", p.class)))?;
        x.push(*h);
        y.push(p.relative_increase);
    }
    pearson_r(&x, &y)
}

/// Predictions of one model, keyed by base form.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPredictions {
    pub name: String,
    pub predictions: Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementCell {
    pub model: String,
    pub mean: f64,
    pub std: f64,
    pub best: bool,
    /// Exact McNemar p against the best model of the row, over
    /// (item, prompt) pairs.
    pub p_vs_best: Option<f64>,
    pub significantly_worse: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementRow {
    pub class: AdjectiveClass,
    pub cells: Vec<AgreementCell>,
}

pub const SIGNIFICANCE: f64 = 0.05;

/// Match between probe winners and each model's predictions, per class.
pub fn model_agreement(records: &[ProbeRecord], models: &[ModelPredictions]) -> Result<Vec<AgreementRow>> {
    single_model(records)?;
    let classes: BTreeSet<AdjectiveClass> = records.iter().map(|r| r.base.class()).collect();
    let mut rows = Vec::new();
    for class in classes {
        let recs = of_class(records, class);
        let summaries = models
            .iter()
            .map(|m| accuracy(&recs, &m.predictions))
            .collect::<Result<Vec<_>>>()?;
        let best = (0..models.len())
            .fold(None, |b: Option<usize>, i| match b {
                Some(j) if summaries[j].mean >= summaries[i].mean => Some(j),
                _ => Some(i),
            })
            .ok_or_else(|| Error::input("no models to compare"))?;
        let hits = |m: &ModelPredictions| -> Vec<bool> {
            recs.iter().map(|r| m.predictions.get(r.base.form()) == Some(&winner(r))).collect()
        };
        let best_hits = hits(&models[best]);
        let mut cells = Vec::new();
        for (i, (m, s)) in models.iter().zip(&summaries).enumerate() {
            let p = if i == best { None } else { Some(mcnemar_exact(&best_hits, &hits(m))?) };
            cells.push(AgreementCell {
                model: m.name.clone(),
                mean: s.mean,
                std: s.std,
                best: i == best,
                p_vs_best: p,
                significantly_worse: p.is_some_and(|p| p < SIGNIFICANCE) && s.mean < summaries[best].mean,
            });
        }
        rows.push(AgreementRow { class, cells });
    }
    Ok(rows)
}

/// Fraction of `items` on which `predictions` matches `reference`.
pub fn prediction_accuracy(predictions: &Reference, reference: &Reference, items: &[String]) -> Result<f64> {
    if items.is_empty() {
        return Err(Error::input("no items to score"));
    }
    let mut correct = 0;
    for item in items {
        let want = reference.get(item).ok_or_else(|| Error::input(format!("no reference label for `{item}`")))?;
        let got = predictions.get(item).ok_or_else(|| Error::input(format!("no prediction for `{item}`")))?;
        correct += usize::from(want == got);
    }
    Ok(correct as f64 / items.len() as f64)
}

/// Majority votes and vote shares from the human annotations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HumanSummary {
    pub majority: BTreeMap<Base, SuffixChoice>,
    pub item_ness_ratio: BTreeMap<Base, f64>,
    /// Items whose vote was tied and went to ITY.
    pub ties: Vec<Base>,
    pub annotator_ness_ratio: BTreeMap<String, BTreeMap<AdjectiveClass, f64>>,
}

impl HumanSummary {
    pub fn reference(&self) -> Reference {
        self.majority.iter().map(|(b, c)| (b.form().to_owned(), *c)).collect()
    }

    pub fn items_of(&self, class: AdjectiveClass) -> Vec<String> {
        self.majority.keys().filter(|b| b.class() == class).map(|b| b.form().to_owned()).collect()
    }
}

fn votes(annotations: &[AnnotationRecord]) -> BTreeMap<&Base, [u32; 2]> {
    let mut out: BTreeMap<&Base, [u32; 2]> = BTreeMap::new();
    for a in annotations {
        out.entry(&a.item).or_default()[a.choice.index()] += 1;
    }
    out
}

pub fn human_majority(annotations: &[AnnotationRecord]) -> Result<HumanSummary> {
    if annotations.is_empty() {
        return Err(Error::input("no annotations"));
    }
    let mut majority = BTreeMap::new();
    let mut item_ness_ratio = BTreeMap::new();
    let mut ties = Vec::new();
    for (item, [ity, ness]) in votes(annotations) {
        let choice = if ness > ity { SuffixChoice::Ness } else { SuffixChoice::Ity };
        if ness == ity {
            ties.push(item.clone());
        }
        majority.insert(item.clone(), choice);
        item_ness_ratio.insert(item.clone(), f64::from(ness) / f64::from(ity + ness));
    }
    let mut per: BTreeMap<&str, BTreeMap<AdjectiveClass, (u32, u32)>> = BTreeMap::new();
    for a in annotations {
        let e = per.entry(&a.annotator_id).or_default().entry(a.item.class()).or_default();
        e.1 += 1;
        if a.choice == SuffixChoice::Ness {
            e.0 += 1;
        }
    }
    let annotator_ness_ratio = per
        .into_iter()
        .map(|(id, m)| {
            (id.to_owned(), m.into_iter().map(|(c, (ness, n))| (c, f64::from(ness) / f64::from(n))).collect())
        })
        .collect();
    Ok(HumanSummary { majority, item_ness_ratio, ties, annotator_ness_ratio })
}

/// Items × {ITY, NESS} vote counts, optionally restricted to one class.
pub fn annotation_matrix(annotations: &[AnnotationRecord], class: Option<AdjectiveClass>) -> Result<RatingMatrix> {
    let rows = votes(annotations)
        .into_iter()
        .filter(|(b, _)| class.is_none_or(|c| b.class() == c))
        .map(|(_, v)| v.to_vec())
        .collect();
    RatingMatrix::new(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementStats {
    pub fleiss_kappa: f64,
    pub ac1_by_class: BTreeMap<AdjectiveClass, f64>,
    pub kappa_by_class: BTreeMap<AdjectiveClass, f64>,
}

pub fn annotator_agreement(annotations: &[AnnotationRecord]) -> Result<AgreementStats> {
    let fleiss = fleiss_kappa(&annotation_matrix(annotations, None)?)?;
    let classes: BTreeSet<AdjectiveClass> = annotations.iter().map(|a| a.item.class()).collect();
    let mut ac1_by_class = BTreeMap::new();
    let mut kappa_by_class = BTreeMap::new();
    for c in classes {
        let m = annotation_matrix(annotations, Some(c))?;
        ac1_by_class.insert(c, gwet_ac1(&m)?);
        // a class where everyone agrees has undefined kappa
        if let Ok(k) = fleiss_kappa(&m) {
            kappa_by_class.insert(c, k);
        }
    }
    Ok(AgreementStats { fleiss_kappa: fleiss, ac1_by_class, kappa_by_class })
}

/// Pearson r across annotators between their NESS rates on two classes.
pub fn annotator_class_correlation(summary: &HumanSummary, a: AdjectiveClass, b: AdjectiveClass) -> Result<Correlation> {
    let (x, y): (Vec<f64>, Vec<f64>) = summary
        .annotator_ness_ratio
        .values()
        .filter_map(|m| Some((*m.get(&a)?, *m.get(&b)?)))
        .unzip();
    pearson_r(&x, &y)
}

/// Preference records of one model as a reference map.
pub fn preference_reference(records: &[PreferenceRecord]) -> Result<Reference> {
    let mut out = Reference::new();
    for r in records {
        if out.insert(r.base.form().to_owned(), r.choice).is_some() {
            return Err(Error::input(format!("duplicate preference for `{}`", r.base)));
        }
    }
    Ok(out)
}

/// One vocabulary word with its log probability averaged over prompts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VocabWord {
    pub word: String,
    pub logp: f64,
    pub frequency: u64,
    pub familiarity: f64,
    pub is_complex: bool,
}

pub fn vocab_words(records: &[VocabRecord]) -> Result<Vec<VocabWord>> {
    let mut words: BTreeMap<&str, (VocabWord, usize)> = BTreeMap::new();
    for r in records {
        match words.get_mut(r.word.as_str()) {
            None => {
                let w = VocabWord {
                    word: r.word.clone(),
                    logp: r.logp,
                    frequency: r.frequency,
                    familiarity: r.familiarity,
                    is_complex: r.is_complex,
                };
                words.insert(&r.word, (w, 1));
            }
            Some((w, n)) => {
                if w.frequency != r.frequency || w.familiarity != r.familiarity || w.is_complex != r.is_complex {
                    return Err(Error::input(format!("inconsistent attributes for `{}` across prompts", r.word)));
                }
                w.logp += r.logp;
                *n += 1;
            }
        }
    }
    Ok(words
        .into_values()
        .map(|(mut w, n)| {
            w.logp /= n as f64;
            w
        })
        .collect())
}

pub const FAMILIARITY_MAX_FREQUENCY: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamiliarityReport {
    pub n_words: usize,
    pub n_complex: usize,
    pub n_simplex: usize,
    pub mean_frequency_complex: f64,
    pub mean_frequency_simplex: f64,
    /// Complex minus simplex, words below the frequency cut-off.
    pub familiarity_t: TTest,
    pub logp_t: TTest,
    /// Regressions on ln frequency over all words with non-zero frequency.
    pub familiarity_fit: OlsFit,
    pub logp_fit: OlsFit,
}

pub fn familiarity_analysis(records: &[VocabRecord], max_frequency: u64) -> Result<FamiliarityReport> {
    let words = vocab_words(records)?;
    let rare: Vec<&VocabWord> = words.iter().filter(|w| w.frequency < max_frequency).collect();
    let (complex, simplex): (Vec<&VocabWord>, Vec<&VocabWord>) = rare.iter().partition(|w| w.is_complex);
    let field = |ws: &[&VocabWord], f: fn(&VocabWord) -> f64| ws.iter().map(|w| f(w)).collect::<Vec<f64>>();
    let familiarity_t = welch_t(&field(&complex, |w| w.familiarity), &field(&simplex, |w| w.familiarity))?;
    let logp_t = welch_t(&field(&complex, |w| w.logp), &field(&simplex, |w| w.logp))?;
    let counted: Vec<&VocabWord> = words.iter().filter(|w| w.frequency > 0).collect();
    let ln_f = field(&counted, |w| (w.frequency as f64).ln());
    Ok(FamiliarityReport {
        n_words: words.len(),
        n_complex: complex.len(),
        n_simplex: simplex.len(),
        mean_frequency_complex: mean(&field(&complex, |w| w.frequency as f64)),
        mean_frequency_simplex: mean(&field(&simplex, |w| w.frequency as f64)),
        familiarity_t,
        logp_t,
        familiarity_fit: stats::ols(&ln_f, &field(&counted, |w| w.familiarity))?,
        logp_fit: stats::ols(&ln_f, &field(&counted, |w| w.logp))?,
    })
}

#[cfg(test)]
mod tests;
