//! Runs every analysis whose inputs are present and writes the tables,
//! figures and a manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::svg::{bar_chart, xy_chart, Series};
use super::*;
use crate::corpus::{class_stats, ClassStats};
use crate::io::{bytes_digest, write_file};
use crate::stats::lowess;

pub const HUMAN_CORRELATION_PAIRS: [(AdjectiveClass, AdjectiveClass); 2] =
    [(AdjectiveClass::Able, AdjectiveClass::Ive), (AdjectiveClass::Ive, AdjectiveClass::Ous)];

/// Loaded inputs; any of them may be absent.
#[derive(Debug, Clone, Default)]
pub struct ReportInputs {
    pub lexicon: Option<Vec<LexiconEntry>>,
    /// Probes of attested bases.
    pub seen_probes: Option<Vec<ProbeRecord>>,
    /// Probes of nonce bases.
    pub nonce_probes: Option<Vec<ProbeRecord>>,
    /// Cognitive-model predictions for the nonce bases, in column order.
    pub models: Vec<ModelPredictions>,
    pub preferences: Option<Vec<PreferenceRecord>>,
    pub annotations: Option<Vec<AnnotationRecord>>,
    pub vocab: Option<Vec<VocabRecord>>,
    pub bounds: BucketBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeenAnalysis {
    /// Records without a reference label in the lexicon.
    pub skipped_records: usize,
    pub overall: Summary,
    pub by_class: BTreeMap<AdjectiveClass, Summary>,
    pub ratio_correlation: Option<RatioCorrelation>,
    pub lexicon_ratios: BTreeMap<AdjectiveClass, f64>,
    /// Probe NESS ratio per class, averaged over prompts.
    pub probe_ratios: BTreeMap<AdjectiveClass, f64>,
    pub buckets: BucketAnalysis,
    pub entropy: BTreeMap<AdjectiveClass, f64>,
    pub entropy_correlation: Option<Correlation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonceAnalysis {
    pub agreement: Vec<AgreementRow>,
    pub model_ratios: BTreeMap<String, BTreeMap<AdjectiveClass, f64>>,
    pub probe_ratios: Option<BTreeMap<AdjectiveClass, f64>>,
}

/// Accuracy of each predictor against one reference, per class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchTable {
    pub columns: Vec<String>,
    pub rows: BTreeMap<AdjectiveClass, Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HumanAnalysis {
    pub summary: HumanSummary,
    pub agreement: AgreementStats,
    pub correlations: Vec<(AdjectiveClass, AdjectiveClass, Correlation)>,
    pub mean_item_ness_ratio: BTreeMap<AdjectiveClass, f64>,
    pub table: Option<MatchTable>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Analyses {
    pub derivative_stats: Option<ClassStats>,
    pub seen: Option<SeenAnalysis>,
    pub nonce: Option<NonceAnalysis>,
    pub human: Option<HumanAnalysis>,
    pub preference_match: Option<MatchTable>,
    pub familiarity: Option<FamiliarityReport>,
    pub warnings: Vec<String>,
}

fn mean_over_prompts(by_prompt: &BTreeMap<String, BTreeMap<AdjectiveClass, f64>>) -> BTreeMap<AdjectiveClass, f64> {
    let mut acc: BTreeMap<AdjectiveClass, Vec<f64>> = BTreeMap::new();
    for ratios in by_prompt.values() {
        for (c, r) in ratios {
            acc.entry(*c).or_default().push(*r);
        }
    }
    acc.into_iter().map(|(c, v)| (c, mean(&v))).collect()
}

fn match_table(columns: Vec<(String, Reference)>, probes: Option<&[ProbeRecord]>, reference: &Reference) -> Result<MatchTable> {
    let mut classes: BTreeMap<AdjectiveClass, Vec<String>> = BTreeMap::new();
    for item in reference.keys() {
        let Ok(base) = Base::parse(item) else { continue };
        classes.entry(base.class()).or_default().push(item.clone());
    }
    let mut names: Vec<String> = columns.iter().map(|(n, _)| n.clone()).collect();
    if probes.is_some() {
        names.push("probe".to_owned());
    }
    let mut rows = BTreeMap::new();
    for (class, mut items) in classes {
        items.sort();
        let mut cells = Vec::new();
        for (_, preds) in &columns {
            let covered: Vec<String> = items.iter().filter(|i| preds.contains_key(*i)).cloned().collect();
            cells.push(if covered.is_empty() { None } else { Some(prediction_accuracy(preds, reference, &covered)?) });
        }
        if let Some(p) = probes {
            let recs: Vec<ProbeRecord> = covered(&of_class(p, class), reference);
            cells.push(if recs.is_empty() { None } else { Some(accuracy(&recs, reference)?.mean) });
        }
        rows.insert(class, cells);
    }
    Ok(MatchTable { columns: names, rows })
}

pub fn analyze(inputs: &ReportInputs) -> Result<Analyses> {
    let mut out = Analyses::default();
    if let Some(lexicon) = &inputs.lexicon {
        out.derivative_stats = Some(class_stats(lexicon)?);
    }
    if let (Some(lexicon), Some(probes)) = (&inputs.lexicon, &inputs.seen_probes) {
        let reference = preferred_reference(lexicon);
        let recs = covered(probes, &reference);
        if recs.is_empty() {
            out.warnings.push("no seen-word probe matches a lexicon base".to_owned());
        } else {
            let ratio_correlation = match class_ratio_correlation(&recs, lexicon) {
                Ok(c) => Some(c),
                Err(e) => {
                    out.warnings.push(format!("class-ratio correlation: {e}"));
                    None
                }
            };
            let buckets = frequency_buckets(lexicon, &recs, inputs.bounds)?;
            out.warnings.extend(buckets.excluded.iter().cloned());
            let entropy_correlation = match entropy_confidence_correlation(lexicon, &buckets) {
                Ok(c) => Some(c),
                Err(e) => {
                    out.warnings.push(format!("entropy correlation: {e}"));
                    None
                }
            };
            out.seen = Some(SeenAnalysis {
                skipped_records: probes.len() - recs.len(),
                overall: accuracy(&recs, &reference)?,
                by_class: accuracy_by_class(&recs, &reference)?,
                ratio_correlation,
                lexicon_ratios: lexicon_ratios(lexicon),
                probe_ratios: mean_over_prompts(&winner_ratios(&recs)),
                buckets,
                entropy: class_entropy(lexicon)?,
                entropy_correlation,
            });
        }
    }
    if !inputs.models.is_empty() || inputs.nonce_probes.is_some() {
        let model_ratios = inputs
            .models
            .iter()
            .map(|m| {
                let preds = m.predictions.iter().filter_map(|(f, c)| Base::parse(f).ok().map(|b| (b.class(), *c)));
                (m.name.clone(), ness_ratio(preds))
            })
            .collect();
        let agreement = match &inputs.nonce_probes {
            Some(p) if !inputs.models.is_empty() => model_agreement(p, &inputs.models)?,
            _ => Vec::new(),
        };
        out.nonce = Some(NonceAnalysis {
            agreement,
            model_ratios,
            probe_ratios: inputs.nonce_probes.as_ref().map(|p| mean_over_prompts(&winner_ratios(p))),
        });
    }
    let gpt4 = inputs.preferences.as_ref().map(|p| preference_reference(p)).transpose()?;
    if let Some(annotations) = &inputs.annotations {
        let summary = human_majority(annotations)?;
        let agreement = annotator_agreement(annotations)?;
        let mut correlations = Vec::new();
        for (a, b) in HUMAN_CORRELATION_PAIRS {
            match annotator_class_correlation(&summary, a, b) {
                Ok(c) => correlations.push((a, b, c)),
                Err(e) => out.warnings.push(format!("annotator correlation {a}/{b}: {e}")),
            }
        }
        let mut per_class: BTreeMap<AdjectiveClass, Vec<f64>> = BTreeMap::new();
        for (b, r) in &summary.item_ness_ratio {
            per_class.entry(b.class()).or_default().push(*r);
        }
        let mean_item_ness_ratio = per_class.into_iter().map(|(c, v)| (c, mean(&v))).collect();
        let reference = summary.reference();
        let mut columns: Vec<(String, Reference)> =
            inputs.models.iter().map(|m| (m.name.clone(), m.predictions.clone())).collect();
        if let Some(g) = &gpt4 {
            columns.push(("preference".to_owned(), g.clone()));
        }
        let table = if columns.is_empty() && inputs.nonce_probes.is_none() {
            None
        } else {
            Some(match_table(columns, inputs.nonce_probes.as_deref(), &reference)?)
        };
        out.human = Some(HumanAnalysis { summary, agreement, correlations, mean_item_ness_ratio, table });
    }
    if let Some(g) = &gpt4 {
        if !inputs.models.is_empty() {
            let columns = inputs.models.iter().map(|m| (m.name.clone(), m.predictions.clone())).collect();
            out.preference_match = Some(match_table(columns, None, g)?);
        }
    }
    if let Some(vocab) = &inputs.vocab {
        out.familiarity = Some(familiarity_analysis(vocab, FAMILIARITY_MAX_FREQUENCY)?);
    }
    Ok(out)
}

/// Run metadata written next to the outputs.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

fn f3(v: f64) -> String {
    format!("{v:.3}")
}

fn opt3(v: Option<f64>) -> String {
    v.map(f3).unwrap_or_default()
}

fn table1_csv(nonce: &NonceAnalysis, stats: Option<&ClassStats>) -> String {
    let mut out = String::from("class,ity_types,ness_types");
    if let Some(row) = nonce.agreement.first() {
        for c in &row.cells {
            let _ = write!(out, ",{0},{0}_std,{0}_p_vs_best,{0}_best,{0}_worse", c.model);
        }
    }
    out.push('\n');
    for row in &nonce.agreement {
        let counts = stats.and_then(|s| s.row(row.class));
        let _ = write!(
            out,
            "{},{},{}",
            row.class.suffix(),
            counts.map(|r| r.ity.types.to_string()).unwrap_or_default(),
            counts.map(|r| r.ness.types.to_string()).unwrap_or_default()
        );
        for c in &row.cells {
            let _ = write!(
                out,
                ",{},{},{},{},{}",
                f3(c.mean),
                f3(c.std),
                c.p_vs_best.map(|p| format!("{p:.4}")).unwrap_or_default(),
                c.best,
                c.significantly_worse
            );
        }
        out.push('\n');
    }
    out
}

fn table2_csv(seen: &SeenAnalysis) -> String {
    let mut out = String::from("group,class,accuracy_mean,accuracy_std\n");
    let mut rows: Vec<(&AdjectiveClass, &Summary)> = seen.by_class.iter().collect();
    rows.sort_by_key(|(c, _)| (c.group(), **c));
    for (c, s) in rows {
        let _ = writeln!(out, "{},{},{},{}", c.group(), c.suffix(), f3(s.mean), f3(s.std));
    }
    let _ = writeln!(out, "all,all,{},{}", f3(seen.overall.mean), f3(seen.overall.std));
    out
}

fn match_csv(t: &MatchTable) -> String {
    let mut out = String::from("class");
    for c in &t.columns {
        let _ = write!(out, ",{c}");
    }
    out.push('\n');
    for (class, cells) in &t.rows {
        out.push_str(class.suffix());
        for v in cells {
            let _ = write!(out, ",{}", opt3(*v));
        }
        out.push('\n');
    }
    out
}

fn frequency_csv(seen: &SeenAnalysis) -> String {
    let mut out = String::from(
        "class,group,prompt,delta_low_nats,delta_high_nats,delta_low_log10,n_low,n_high,relative_increase_pct,class_entropy_bits\n",
    );
    for p in &seen.buckets.points {
        let _ = writeln!(
            out,
            "{},{},{},{:.4},{:.4},{:.4},{},{},{:.2},{:.4}",
            p.class.suffix(),
            p.class.group(),
            p.prompt_id,
            p.delta_low,
            p.delta_high,
            nats_to_log10(p.delta_low),
            p.n_low,
            p.n_high,
            p.relative_increase,
            seen.entropy.get(&p.class).copied().unwrap_or(f64::NAN)
        );
    }
    out
}

fn seen_summary_csv(seen: &SeenAnalysis) -> String {
    let mut out = String::from("statistic,value\n");
    let _ = writeln!(out, "accuracy_mean,{:.4}", seen.overall.mean);
    let _ = writeln!(out, "accuracy_std,{:.4}", seen.overall.std);
    if let Some(r) = &seen.ratio_correlation {
        let _ = writeln!(out, "class_ratio_r_mean,{:.4}", r.mean_r);
        let _ = writeln!(out, "class_ratio_r_std,{:.4}", r.std_r);
        let max_p = r.per_prompt.iter().map(|(_, c)| c.p).fold(0.0, f64::max);
        let _ = writeln!(out, "class_ratio_p_max,{max_p:.3e}");
    }
    if let Some(c) = &seen.entropy_correlation {
        let _ = writeln!(out, "entropy_r,{:.4}", c.r);
        let _ = writeln!(out, "entropy_r_squared,{:.4}", c.r_squared());
        let _ = writeln!(out, "entropy_p,{:.3e}", c.p);
    }
    let positive = seen.buckets.points.iter().filter(|p| p.relative_increase > 0.0).count();
    let _ = writeln!(out, "positive_increase_points,{positive}");
    let _ = writeln!(out, "increase_points,{}", seen.buckets.points.len());
    out
}

fn agreement_csv(h: &HumanAnalysis) -> String {
    let mut out = String::from("statistic,class,value\n");
    let _ = writeln!(out, "fleiss_kappa,all,{:.4}", h.agreement.fleiss_kappa);
    for (c, v) in &h.agreement.kappa_by_class {
        let _ = writeln!(out, "fleiss_kappa,{},{v:.4}", c.suffix());
    }
    for (c, v) in &h.agreement.ac1_by_class {
        let _ = writeln!(out, "gwet_ac1,{},{v:.4}", c.suffix());
    }
    for (c, v) in &h.mean_item_ness_ratio {
        let _ = writeln!(out, "mean_item_ness_ratio,{},{v:.4}", c.suffix());
    }
    for (a, b, r) in &h.correlations {
        let _ = writeln!(out, "annotator_correlation,{}/{},{:.4}", a.suffix(), b.suffix(), r.r);
    }
    let _ = writeln!(out, "tied_items,all,{}", h.summary.ties.len());
    out
}

fn familiarity_csv(f: &FamiliarityReport) -> String {
    let mut out = String::from("statistic,value\n");
    let rows: [(&str, f64); 18] = [
        ("n_words", f.n_words as f64),
        ("n_complex", f.n_complex as f64),
        ("n_simplex", f.n_simplex as f64),
        ("mean_frequency_complex", f.mean_frequency_complex),
        ("mean_frequency_simplex", f.mean_frequency_simplex),
        ("familiarity_t", f.familiarity_t.t),
        ("familiarity_df", f.familiarity_t.df),
        ("familiarity_p", f.familiarity_t.p),
        ("logp_t", f.logp_t.t),
        ("logp_df", f.logp_t.df),
        ("logp_p", f.logp_t.p),
        ("familiarity_r_squared", f.familiarity_fit.r_squared),
        ("familiarity_f", f.familiarity_fit.f),
        ("familiarity_slope", f.familiarity_fit.slope),
        ("logp_r_squared", f.logp_fit.r_squared),
        ("logp_f", f.logp_fit.f),
        ("logp_slope", f.logp_fit.slope),
        ("regression_n", f.logp_fit.n as f64),
    ];
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{}", if v.fract() == 0.0 && v.abs() < 1e15 { format!("{v}") } else { format!("{v:.4}") });
    }
    out
}

fn class_labels(classes: &[AdjectiveClass]) -> Vec<String> {
    classes.iter().map(|c| format!("-{}", c.suffix())).collect()
}

fn fig1(nonce: &NonceAnalysis) -> String {
    let mut classes: Vec<AdjectiveClass> = nonce.model_ratios.values().flat_map(|m| m.keys().copied()).collect();
    if let Some(p) = &nonce.probe_ratios {
        classes.extend(p.keys().copied());
    }
    classes.sort();
    classes.dedup();
    let mut series: Vec<(String, Vec<f64>)> = nonce
        .model_ratios
        .iter()
        .map(|(n, m)| (n.clone(), classes.iter().map(|c| m.get(c).copied().unwrap_or(f64::NAN)).collect()))
        .collect();
    if let Some(p) = &nonce.probe_ratios {
        series.push(("probe".to_owned(), classes.iter().map(|c| p.get(c).copied().unwrap_or(f64::NAN)).collect()));
    }
    bar_chart("Nonce adjectives: NESS ratio", "NESS ratio", &class_labels(&classes), &series, 1.0)
}

fn fig2(seen: &SeenAnalysis) -> String {
    let mut classes: Vec<AdjectiveClass> = seen.probe_ratios.keys().copied().collect();
    classes.sort_by_key(|c| (c.group(), *c));
    let pick = |m: &BTreeMap<AdjectiveClass, f64>| classes.iter().map(|c| m.get(c).copied().unwrap_or(f64::NAN)).collect();
    bar_chart(
        "Seen bases: NESS ratio",
        "NESS ratio",
        &class_labels(&classes),
        &[("corpus".to_owned(), pick(&seen.lexicon_ratios)), ("probe".to_owned(), pick(&seen.probe_ratios))],
        1.0,
    )
}

fn fig3(seen: &SeenAnalysis) -> Result<String> {
    let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for p in &seen.buckets.points {
        groups.entry(p.class.group().to_string()).or_default().push((nats_to_log10(p.delta_low), p.relative_increase));
    }
    let mut series: Vec<Series> = groups
        .into_iter()
        .map(|(name, points)| Series { name, points, markers: true, line: false })
        .collect();
    let mut pts: Vec<(f64, f64)> = seen.buckets.points.iter().map(|p| (nats_to_log10(p.delta_low), p.relative_increase)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    if pts.len() >= 3 {
        let (x, y): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
        let fit = lowess(&x, &y, crate::stats::LOWESS_DEFAULT_FRAC)?;
        series.push(Series { name: "LOWESS".to_owned(), points: x.into_iter().zip(fit).collect(), markers: false, line: true });
    }
    Ok(xy_chart(
        "Confidence on rare derivatives vs. increase on frequent ones",
        "confidence, f in (0, 10] (log10 difference)",
        "relative increase, f > 100 (%)",
        &series,
        None,
    ))
}

fn fig4(records: &[VocabRecord], human: bool) -> Result<String> {
    let words = vocab_words(records)?;
    let mut complex = Vec::new();
    let mut simplex = Vec::new();
    for w in words.iter().filter(|w| w.frequency > 0 && w.frequency < FAMILIARITY_MAX_FREQUENCY) {
        let y = if human { w.familiarity } else { w.logp };
        let p = ((w.frequency as f64).ln(), y);
        if w.is_complex { complex.push(p) } else { simplex.push(p) }
    }
    let series = [
        Series { name: "complex".to_owned(), points: complex, markers: true, line: false },
        Series { name: "simplex".to_owned(), points: simplex, markers: true, line: false },
    ];
    let (title, label) = if human { ("Familiarity: humans", "familiarity rating") } else { ("Familiarity: language model", "mean log probability") };
    Ok(xy_chart(title, "ln frequency", label, &series, None))
}

fn fig_human_ratio(h: &HumanAnalysis, probe: Option<&BTreeMap<AdjectiveClass, f64>>) -> String {
    let classes: Vec<AdjectiveClass> = h.mean_item_ness_ratio.keys().copied().collect();
    let humans = ness_ratio(h.summary.majority.iter().map(|(b, c)| (b.class(), *c)));
    let mut series = vec![("humans".to_owned(), classes.iter().map(|c| humans.get(c).copied().unwrap_or(f64::NAN)).collect())];
    if let Some(p) = probe {
        series.insert(0, ("probe".to_owned(), classes.iter().map(|c| p.get(c).copied().unwrap_or(f64::NAN)).collect()));
    }
    bar_chart("Nonce adjectives: NESS ratio of majority votes", "NESS ratio", &class_labels(&classes), &series, 1.0)
}

fn fig_base_variation(h: &HumanAnalysis) -> String {
    let classes: Vec<AdjectiveClass> = h.mean_item_ness_ratio.keys().copied().collect();
    let points = h
        .summary
        .item_ness_ratio
        .iter()
        .filter_map(|(b, r)| classes.iter().position(|c| *c == b.class()).map(|i| (i as f64, *r)))
        .collect();
    xy_chart(
        "Human NESS share per base",
        "class",
        "NESS share",
        &[Series { name: "bases".to_owned(), points, markers: true, line: false }],
        Some(&class_labels(&classes)),
    )
}

fn fig_participant_variation(h: &HumanAnalysis) -> String {
    let classes: Vec<AdjectiveClass> = h.mean_item_ness_ratio.keys().copied().collect();
    let series: Vec<Series> = h
        .summary
        .annotator_ness_ratio
        .iter()
        .map(|(id, m)| Series {
            name: id.clone(),
            points: classes.iter().enumerate().filter_map(|(i, c)| m.get(c).map(|r| (i as f64, *r))).collect(),
            markers: true,
            line: true,
        })
        .collect();
    xy_chart("NESS share per participant", "class", "NESS share", &series, Some(&class_labels(&classes)))
}

/// Rendered output files, in write order.
pub fn render(analyses: &Analyses, inputs: &ReportInputs) -> Result<Vec<(String, String)>> {
    let mut files: Vec<(String, String)> = Vec::new();
    if let Some(s) = &analyses.derivative_stats {
        files.push(("table_si_derivative_statistics.csv".into(), s.to_csv()));
    }
    if let Some(n) = &analyses.nonce {
        if !n.agreement.is_empty() {
            files.push(("table1_model_agreement.csv".into(), table1_csv(n, analyses.derivative_stats.as_ref())));
        }
        files.push(("fig1_nonce_ness_ratio.svg".into(), fig1(n)));
    }
    if let Some(s) = &analyses.seen {
        files.push(("table2_seen_accuracy.csv".into(), table2_csv(s)));
        files.push(("table_seen_summary.csv".into(), seen_summary_csv(s)));
        files.push(("table_frequency_buckets.csv".into(), frequency_csv(s)));
        files.push(("fig2_seen_ness_ratio.svg".into(), fig2(s)));
        files.push(("fig3_frequency_confidence.svg".into(), fig3(s)?));
    }
    if let Some(h) = &analyses.human {
        if let Some(t) = &h.table {
            files.push(("table3_human_agreement.csv".into(), match_csv(t)));
        }
        files.push(("table_si_annotator_agreement.csv".into(), agreement_csv(h)));
        let probe = analyses.nonce.as_ref().and_then(|n| n.probe_ratios.as_ref());
        files.push(("fig_si_human_ness_ratio.svg".into(), fig_human_ratio(h, probe)));
        files.push(("fig_si_base_variation.svg".into(), fig_base_variation(h)));
        files.push(("fig_si_participant_variation.svg".into(), fig_participant_variation(h)));
    }
    if let Some(t) = &analyses.preference_match {
        files.push(("table_si_preference_agreement.csv".into(), match_csv(t)));
    }
    if let (Some(f), Some(vocab)) = (&analyses.familiarity, &inputs.vocab) {
        files.push(("table_familiarity.csv".into(), familiarity_csv(f)));
        files.push(("fig4a_familiarity_humans.svg".into(), fig4(vocab, true)?));
        files.push(("fig4b_familiarity_model.svg".into(), fig4(vocab, false)?));
    }
    if !analyses.warnings.is_empty() {
        files.push(("warnings.txt".into(), analyses.warnings.join("\n") + "\n"));
    }
    Ok(files)
}

/// Writes every rendered file plus `manifest.json` into `dir`; returns the
/// written paths.
pub fn emit_report(analyses: &Analyses, inputs: &ReportInputs, mut manifest: Manifest, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (name, body) in render(analyses, inputs)? {
        let path = dir.join(&name);
        write_file(&path, body.as_bytes())?;
        manifest.outputs.insert(name, bytes_digest(body.as_bytes()));
        written.push(path);
    }
    let path = dir.join("manifest.json");
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_file(&path, body.as_bytes())?;
    written.push(path);
    Ok(written)
}
