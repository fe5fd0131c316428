//! Generalized Context Model: every training form is an exemplar, and a
//! query is assigned to the suffix whose exemplars it is most similar to
//! in total.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::corpus::LexiconEntry;
use crate::error::{Error, Result};
use crate::io::{for_each_line, parse_error};
use crate::morphlex::{Base, SuffixChoice};
use crate::WeightMode;

/// Sensitivity used when none is given and none is fitted.
pub const DEFAULT_SENSITIVITY: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    #[default]
    RawEdit,
    LengthNormalized,
}

impl DistanceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DistanceMode::RawEdit => "raw",
            DistanceMode::LengthNormalized => "normalized",
        }
    }
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "raw" | "raw_edit" | "raw-edit" => Ok(DistanceMode::RawEdit),
            "normalized" | "length_normalized" | "length-normalized" => Ok(DistanceMode::LengthNormalized),
            other => Err(Error::input(format!("unknown distance mode `{other}`"))),
        }
    }
}

/// Similarity as a function of distance: `exp(-c·d)` or `exp(-c·d²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    #[default]
    Exponential,
    Gaussian,
}

impl Kernel {
    pub fn as_str(self) -> &'static str {
        match self {
            Kernel::Exponential => "exponential",
            Kernel::Gaussian => "gaussian",
        }
    }

    fn exponent(self, d: f64) -> f64 {
        match self {
            Kernel::Exponential => d,
            Kernel::Gaussian => d * d,
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exponential" | "exp" => Ok(Kernel::Exponential),
            "gaussian" | "quadratic" => Ok(Kernel::Gaussian),
            other => Err(Error::input(format!("unknown kernel `{other}`"))),
        }
    }
}

/// Scoring parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GcmConfig {
    pub sensitivity: f64,
    pub mode: WeightMode,
    pub distance: DistanceMode,
    pub kernel: Kernel,
}

impl Default for GcmConfig {
    fn default() -> Self {
        GcmConfig {
            sensitivity: DEFAULT_SENSITIVITY,
            mode: WeightMode::Type,
            distance: DistanceMode::RawEdit,
            kernel: Kernel::Exponential,
        }
    }
}

impl GcmConfig {
    fn validate(&self) -> Result<()> {
        if !(self.sensitivity > 0.0 && self.sensitivity.is_finite()) {
            return Err(Error::input(format!("sensitivity must be positive, got {}", self.sensitivity)));
        }
        Ok(())
    }
}

/// A stored form with its category and raw weight (token count).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exemplar {
    pub form: String,
    pub choice: SuffixChoice,
    pub weight: f64,
}

/// One exemplar per attested derivative, weighted by its token count.
pub fn exemplars_from_lexicon(lexicon: &[LexiconEntry]) -> Vec<Exemplar> {
    lexicon
        .iter()
        .flat_map(|e| {
            e.attested().map(|(choice, count)| Exemplar {
                form: e.base.form().to_owned(),
                choice,
                weight: count as f64,
            })
        })
        .collect()
}

/// Levenshtein distance with unit costs, over characters.
pub fn levenshtein(a: &str, b: &str) -> usize {
    if a.is_ascii() && b.is_ascii() {
        if let Some(p) = Pattern::new(a.as_bytes()) {
            return p.distance(b.as_bytes());
        }
        return levenshtein_dp(a.as_bytes(), b.as_bytes());
    }
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_dp(&a, &b)
}

fn levenshtein_dp<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Bit-parallel (Myers/Hyyrö) edit distance for ASCII patterns of at most
/// 64 bytes.
struct Pattern {
    peq: [u64; 128],
    len: usize,
}

impl Pattern {
    fn new(pattern: &[u8]) -> Option<Pattern> {
        if pattern.len() > 64 || !pattern.is_ascii() {
            return None;
        }
        let mut peq = [0u64; 128];
        for (i, &c) in pattern.iter().enumerate() {
            peq[c as usize] |= 1 << i;
        }
        Some(Pattern { peq, len: pattern.len() })
    }

    fn distance(&self, text: &[u8]) -> usize {
        let m = self.len;
        if m == 0 {
            return text.len();
        }
        let last = 1u64 << (m - 1);
        let mut pv = !0u64;
        let mut mv = 0u64;
        let mut score = m;
        for &c in text {
            let eq = if c < 128 { self.peq[c as usize] } else { 0 };
            let xv = eq | mv;
            let xh = ((eq & pv).wrapping_add(pv) ^ pv) | eq;
            let mut ph = mv | !(xh | pv);
            let mut mh = pv & xh;
            if ph & last != 0 {
                score += 1;
            } else if mh & last != 0 {
                score -= 1;
            }
            ph = (ph << 1) | 1;
            mh <<= 1;
            pv = mh | !(xv | ph);
            mv = ph & xv;
        }
        score
    }
}

/// Distance under a mode; normalized distance divides by the longer length.
pub fn distance(a: &str, b: &str, mode: DistanceMode) -> f64 {
    let raw = levenshtein(a, b) as f64;
    match mode {
        DistanceMode::RawEdit => raw,
        DistanceMode::LengthNormalized => {
            let longest = a.chars().count().max(b.chars().count());
            if longest == 0 {
                0.0
            } else {
                raw / longest as f64
            }
        }
    }
}

/// Category probabilities for one query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GcmScore {
    pub p_ity: f64,
    pub p_ness: f64,
}

impl GcmScore {
    pub fn probability(&self, choice: SuffixChoice) -> f64 {
        match choice {
            SuffixChoice::Ity => self.p_ity,
            SuffixChoice::Ness => self.p_ness,
        }
    }

    /// Higher-probability suffix; ties go to ITY.
    pub fn choice(&self) -> SuffixChoice {
        if self.p_ness > self.p_ity {
            SuffixChoice::Ness
        } else {
            SuffixChoice::Ity
        }
    }
}

/// Exemplar weight mass per category, aggregated by distance from a query.
/// Scoring a profile is independent of the store size, which makes
/// sweeping the sensitivity cheap.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityProfile {
    /// `(raw edit distance, longer length) -> [ity, ness]` weight mass.
    bins: BTreeMap<(u32, u32), [f64; 2]>,
}

impl SimilarityProfile {
    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Summed similarity per category, both scaled by `exp(c·shift)`
    /// where `shift` is the smallest kernel exponent present.
    fn summed(&self, config: &GcmConfig) -> Option<[f64; 2]> {
        let points: Vec<(f64, [f64; 2])> = self
            .bins
            .iter()
            .map(|(&(raw, longest), &w)| {
                let d = match config.distance {
                    DistanceMode::RawEdit => raw as f64,
                    DistanceMode::LengthNormalized if longest == 0 => 0.0,
                    DistanceMode::LengthNormalized => raw as f64 / longest as f64,
                };
                (config.kernel.exponent(d), w)
            })
            .collect();
        let shift = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        if !shift.is_finite() {
            return None;
        }
        let mut s = [0.0; 2];
        for (e, w) in points {
            let sim = (-config.sensitivity * (e - shift)).exp();
            s[0] += w[0] * sim;
            s[1] += w[1] * sim;
        }
        Some(s)
    }

    pub fn score(&self, config: &GcmConfig, query: &str) -> Result<GcmScore> {
        let s = self
            .summed(config)
            .ok_or_else(|| Error::input("GCM model has no exemplars"))?;
        let total = s[0] + s[1];
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::DegenerateScore(query.to_owned()));
        }
        Ok(GcmScore {
            p_ity: s[0] / total,
            p_ness: s[1] / total,
        })
    }
}

/// A unique stored form with its per-category weight.
#[derive(Debug, Clone, PartialEq)]
struct StoredForm {
    form: String,
    chars: u32,
    weight: [f64; 2],
}

/// Exemplar store plus scoring parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GcmModel {
    exemplars: Vec<Exemplar>,
    forms: Vec<StoredForm>,
    config: GcmConfig,
}

impl GcmModel {
    pub fn new(exemplars: Vec<Exemplar>, config: GcmConfig) -> Result<GcmModel> {
        config.validate()?;
        if exemplars.is_empty() {
            return Err(Error::input("GCM needs at least one exemplar"));
        }
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut forms: Vec<StoredForm> = Vec::new();
        for e in &exemplars {
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(Error::input(format!("exemplar `{}` has non-positive weight {}", e.form, e.weight)));
            }
            let slot = *index.entry(e.form.as_str()).or_insert_with(|| {
                forms.push(StoredForm {
                    form: e.form.clone(),
                    chars: e.form.chars().count() as u32,
                    weight: [0.0; 2],
                });
                forms.len() - 1
            });
            forms[slot].weight[e.choice.index()] += e.weight;
        }
        Ok(GcmModel { exemplars, forms, config })
    }

    pub fn from_lexicon(lexicon: &[LexiconEntry], config: GcmConfig) -> Result<GcmModel> {
        GcmModel::new(exemplars_from_lexicon(lexicon), config)
    }

    pub fn config(&self) -> &GcmConfig {
        &self.config
    }

    pub fn with_config(mut self, config: GcmConfig) -> Result<GcmModel> {
        config.validate()?;
        self.config = config;
        Ok(self)
    }

    pub fn exemplars(&self) -> &[Exemplar] {
        &self.exemplars
    }

    fn effective(&self, f: &StoredForm) -> [f64; 2] {
        match self.config.mode {
            WeightMode::Token => f.weight,
            WeightMode::Type => f.weight.map(|w| if w > 0.0 { 1.0 } else { 0.0 }),
        }
    }

    /// Distance profile of `query` against every stored form except the
    /// form equal to `exclude`.
    fn profile_excluding(&self, query: &str, exclude: Option<&str>) -> SimilarityProfile {
        let mut bins: BTreeMap<(u32, u32), [f64; 2]> = BTreeMap::new();
        let qlen = query.chars().count() as u32;
        let pattern = if query.is_ascii() { Pattern::new(query.as_bytes()) } else { None };
        for f in &self.forms {
            if exclude == Some(f.form.as_str()) {
                continue;
            }
            let raw = match (&pattern, f.form.is_ascii()) {
                (Some(p), true) => p.distance(f.form.as_bytes()),
                _ => levenshtein(query, &f.form),
            } as u32;
            let w = self.effective(f);
            let bin = bins.entry((raw, qlen.max(f.chars))).or_insert([0.0; 2]);
            bin[0] += w[0];
            bin[1] += w[1];
        }
        SimilarityProfile { bins }
    }

    pub fn profile(&self, query: &str) -> SimilarityProfile {
        self.profile_excluding(query, None)
    }

    /// `P(γ | query)` for both suffixes.
    pub fn score(&self, query: &str) -> Result<GcmScore> {
        self.profile(query).score(&self.config, query)
    }

    pub fn predict(&self, query: &str) -> Result<SuffixChoice> {
        Ok(self.score(query)?.choice())
    }

    /// Scores many queries, in parallel when the `parallel` feature is on.
    pub fn score_many(&self, queries: &[&str]) -> Vec<Result<GcmScore>> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            queries.par_iter().map(|q| self.score(q)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            queries.iter().map(|q| self.score(q)).collect()
        }
    }

    /// TSV `form<TAB>choice<TAB>weight` with the scoring parameters in a
    /// leading comment.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# gcm sensitivity={} distance={} kernel={}",
            self.config.sensitivity, self.config.distance, self.config.kernel
        );
        out.push_str("form\tchoice\tweight\n");
        for e in &self.exemplars {
            let _ = writeln!(out, "{}\t{}\t{}", e.form, e.choice, e.weight);
        }
        out
    }

    /// Reads a store written by [`GcmModel::to_tsv`]. The weighting mode is
    /// a scoring-time choice and comes from `mode`.
    pub fn read_tsv(path: &Path, mode: WeightMode) -> Result<GcmModel> {
        let mut config = GcmConfig { mode, ..GcmConfig::default() };
        let mut exemplars = Vec::new();
        for_each_line(path, |_, line| {
            if let Some(header) = line.strip_prefix('#') {
                for kv in header.split_whitespace() {
                    let Some((k, v)) = kv.split_once('=') else { continue };
                    match k {
                        "sensitivity" => {
                            config.sensitivity = v.parse().map_err(|e| format!("bad sensitivity `{v}`: {e}"))?
                        }
                        "distance" => config.distance = v.parse().map_err(|e: Error| e.to_string())?,
                        "kernel" => config.kernel = v.parse().map_err(|e: Error| e.to_string())?,
                        _ => {}
                    }
                }
                return Ok(());
            }
            if line.trim().is_empty() || line.starts_with("form\t") {
                return Ok(());
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(format!("expected 3 columns, found {}", cols.len()));
            }
            exemplars.push(Exemplar {
                form: cols[0].to_owned(),
                choice: cols[1].parse().map_err(|e: Error| e.to_string())?,
                weight: cols[2].parse().map_err(|e| format!("bad weight `{}`: {e}", cols[2]))?,
            });
            Ok(())
        })?;
        GcmModel::new(exemplars, config).map_err(|e| match e {
            Error::Input(m) => parse_error(path, 0, m),
            other => other,
        })
    }
}

/// Prediction table `base, class, choice, p_ity, p_ness`.
pub fn predictions_tsv(model: &GcmModel, bases: &[Base]) -> Result<String> {
    let forms: Vec<&str> = bases.iter().map(Base::form).collect();
    let mut out = String::from("base\tclass\tchoice\tp_ity\tp_ness\n");
    for (b, score) in bases.iter().zip(model.score_many(&forms)) {
        let s = score?;
        let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", b.form(), b.class().suffix(), s.choice(), s.p_ity, s.p_ness);
    }
    Ok(out)
}

/// Log-spaced grid of `points` values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64))
            .collect(),
    }
}

/// Default sensitivity grid: 25 log-spaced points from 0.1 to 5.0.
pub fn default_grid() -> Vec<f64> {
    log_grid(0.1, 5.0, 25)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityFit {
    pub sensitivity: f64,
    pub accuracy: f64,
    /// `(c, leave-one-out accuracy)` for every grid point.
    pub curve: Vec<(f64, f64)>,
    pub queries: usize,
}

/// Picks the grid value maximizing leave-one-out accuracy over lexicon
/// bases (target: the more frequent derivative, ties to ITY; the held-out
/// base's own exemplars are removed). Ties go to the smaller value. With
/// `max_queries`, an evenly strided subset of bases is held out in turn.
pub fn fit_sensitivity(
    lexicon: &[LexiconEntry],
    base_config: GcmConfig,
    grid: &[f64],
    max_queries: Option<usize>,
) -> Result<SensitivityFit> {
    if grid.is_empty() {
        return Err(Error::input("empty sensitivity grid"));
    }
    if let Some(c) = grid.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
        return Err(Error::input(format!("grid value {c} is not positive")));
    }
    let has = |choice| lexicon.iter().any(|e| e.is_attested(choice));
    if !(has(SuffixChoice::Ity) && has(SuffixChoice::Ness)) {
        return Err(Error::input("sensitivity fitting needs both suffixes in the lexicon"));
    }
    let model = GcmModel::from_lexicon(lexicon, base_config)?;
    let queries: Vec<(&str, SuffixChoice)> = lexicon
        .iter()
        .filter_map(|e| e.preferred().map(|p| (e.base.form(), p)))
        .collect();
    let stride = match max_queries {
        Some(m) if m > 0 && queries.len() > m => queries.len().div_ceil(m),
        _ => 1,
    };
    let held_out: Vec<(&str, SuffixChoice)> = queries.into_iter().step_by(stride).collect();

    let profile = |q: &(&str, SuffixChoice)| (model.profile_excluding(q.0, Some(q.0)), q.1);
    #[cfg(feature = "parallel")]
    let profiles: Vec<(SimilarityProfile, SuffixChoice)> = {
        use rayon::prelude::*;
        held_out.par_iter().map(profile).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let profiles: Vec<(SimilarityProfile, SuffixChoice)> = held_out.iter().map(profile).collect();

    let mut curve = Vec::with_capacity(grid.len());
    for &c in grid {
        let config = GcmConfig { sensitivity: c, ..base_config };
        let correct = profiles
            .iter()
            .filter(|(p, target)| {
                !p.is_empty() && p.score(&config, "").is_ok_and(|s| s.choice() == *target)
            })
            .count();
        curve.push((c, correct as f64 / profiles.len() as f64));
    }
    let mut best = curve[0];
    for &(c, acc) in &curve[1..] {
        if acc > best.1 || (acc == best.1 && c < best.0) {
            best = (c, acc);
        }
    }
    Ok(SensitivityFit {
        sensitivity: best.0,
        accuracy: best.1,
        curve,
        queries: profiles.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphlex::Base;
    use proptest::prelude::*;

    fn ex(form: &str, choice: SuffixChoice, weight: f64) -> Exemplar {
        Exemplar { form: form.into(), choice, weight }
    }

    fn token(c: f64) -> GcmConfig {
        GcmConfig { sensitivity: c, mode: WeightMode::Token, ..GcmConfig::default() }
    }

    #[test]
    fn distance_examples() {
        assert_eq!(levenshtein("aa", "aa"), 0);
        assert_eq!(levenshtein("aa", "ab"), 1);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("naïve", "naive"), 1);
        assert_eq!(distance("kitten", "sitting", DistanceMode::LengthNormalized), 3.0 / 7.0);
    }

    #[test]
    fn score_examples() {
        let m = GcmModel::new(vec![ex("selfish", SuffixChoice::Ness, 1.0)], GcmConfig::default()).unwrap();
        assert_eq!(m.score("boyish").unwrap().p_ness, 1.0);

        for c in [0.1, 1.0, 5.0] {
            let m = GcmModel::new(
                vec![ex("aa", SuffixChoice::Ity, 1.0), ex("bb", SuffixChoice::Ness, 1.0)],
                token(c),
            )
            .unwrap();
            assert_eq!(m.score("ab").unwrap().p_ity, 0.5);
            assert_eq!(m.predict("ab").unwrap(), SuffixChoice::Ity);
        }

        let m = GcmModel::new(
            vec![ex("aa", SuffixChoice::Ity, 3.0), ex("bb", SuffixChoice::Ness, 1.0)],
            token(1.0),
        )
        .unwrap();
        assert!((m.score("ab").unwrap().p_ity - 0.75).abs() < 1e-15);
    }

    #[test]
    fn exact_match_dominates_at_large_c() {
        let m = GcmModel::new(
            vec![
                ex("pepulative", SuffixChoice::Ity, 1.0),
                ex("pepulatine", SuffixChoice::Ness, 1.0),
                ex("pepulatina", SuffixChoice::Ness, 1.0),
            ],
            GcmConfig { sensitivity: 50.0, ..GcmConfig::default() },
        )
        .unwrap();
        assert_eq!(m.predict("pepulative").unwrap(), SuffixChoice::Ity);
    }

    #[test]
    fn far_queries_do_not_underflow() {
        let m = GcmModel::new(
            vec![ex("a", SuffixChoice::Ity, 1.0), ex("b", SuffixChoice::Ness, 2.0)],
            token(1000.0),
        )
        .unwrap();
        let s = m.score(&"z".repeat(60)).unwrap();
        assert!((s.p_ness - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn construction_errors() {
        assert!(GcmModel::new(vec![], GcmConfig::default()).is_err());
        assert!(GcmModel::new(vec![ex("a", SuffixChoice::Ity, 0.0)], GcmConfig::default()).is_err());
        assert!(GcmModel::new(vec![ex("a", SuffixChoice::Ity, 1.0)], token(0.0)).is_err());
    }

    fn entry(form: &str, ity: u64, ness: u64) -> LexiconEntry {
        LexiconEntry { base: Base::parse(form).unwrap(), base_count: 1, ity_count: ity, ness_count: ness }
    }

    #[test]
    fn fit_on_separable_lexicon_returns_smallest() {
        let lex = vec![
            entry("kindish", 0, 3),
            entry("kindeish", 0, 1),
            entry("kindlish", 0, 2),
            entry("zyzzyvazyzzyvazyzzyvic", 4, 0),
            entry("zyzzyvazyzzyvazyzzyvaic", 2, 0),
            entry("zyzzyvazyzzyvazyzzyvoic", 1, 0),
        ];
        let grid = default_grid();
        let fit = fit_sensitivity(&lex, GcmConfig::default(), &grid, None).unwrap();
        assert_eq!(fit.accuracy, 1.0);
        assert_eq!(fit.sensitivity, grid[0]);
    }

    #[test]
    fn fit_on_symmetric_pair_is_zero() {
        let lex = vec![entry("kindish", 0, 1), entry("electric", 1, 0)];
        let grid = default_grid();
        let fit = fit_sensitivity(&lex, GcmConfig::default(), &grid, None).unwrap();
        assert_eq!(fit.accuracy, 0.0);
        assert_eq!(fit.sensitivity, grid[0]);
        assert!(fit_sensitivity(&lex, GcmConfig::default(), &[], None).is_err());
        assert!(fit_sensitivity(&lex[..1], GcmConfig::default(), &grid, None).is_err());
    }

    #[test]
    fn grid_shape() {
        let g = default_grid();
        assert_eq!(g.len(), 25);
        assert!((g[0] - 0.1).abs() < 1e-15);
        assert!((g[24] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn tsv_round_trip() {
        let m = GcmModel::new(
            vec![ex("selfish", SuffixChoice::Ness, 3.0), ex("electric", SuffixChoice::Ity, 12.0)],
            GcmConfig { sensitivity: 0.7, kernel: Kernel::Gaussian, ..GcmConfig::default() },
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gcm.tsv");
        crate::io::write_file(&path, m.to_tsv().as_bytes()).unwrap();
        let back = GcmModel::read_tsv(&path, WeightMode::Type).unwrap();
        assert_eq!(back, m);
    }

    /// Direct summation over exemplars, without aggregation or shifting.
    fn oracle(exemplars: &[Exemplar], query: &str, config: &GcmConfig) -> [f64; 2] {
        let mut s = [0.0; 2];
        for e in exemplars {
            let d = levenshtein_dp(query.as_bytes(), e.form.as_bytes()) as f64;
            let d = match config.distance {
                DistanceMode::RawEdit => d,
                DistanceMode::LengthNormalized => {
                    let l = query.len().max(e.form.len());
                    if l == 0 { 0.0 } else { d / l as f64 }
                }
            };
            let x = match config.kernel {
                Kernel::Exponential => d,
                Kernel::Gaussian => d * d,
            };
            s[e.choice.index()] += config.mode.weight(e.weight) * (-config.sensitivity * x).exp();
        }
        let t = s[0] + s[1];
        [s[0] / t, s[1] / t]
    }

    fn arb_exemplars() -> impl Strategy<Value = Vec<Exemplar>> {
        proptest::collection::vec(
            ("[a-d]{0,6}", any::<bool>(), 1u32..50).prop_map(|(form, ness, w)| Exemplar {
                form,
                choice: if ness { SuffixChoice::Ness } else { SuffixChoice::Ity },
                weight: w as f64,
            }),
            1..=8,
        )
    }

    fn arb_config() -> impl Strategy<Value = GcmConfig> {
        (0.05f64..3.0, any::<bool>(), any::<bool>(), any::<bool>()).prop_map(|(c, tok, norm, gauss)| GcmConfig {
            sensitivity: c,
            mode: if tok { WeightMode::Token } else { WeightMode::Type },
            distance: if norm { DistanceMode::LengthNormalized } else { DistanceMode::RawEdit },
            kernel: if gauss { Kernel::Gaussian } else { Kernel::Exponential },
        })
    }

    proptest! {
        #[test]
        fn myers_matches_dp(a in "[a-e]{0,70}", b in "[a-e]{0,70}") {
            prop_assert_eq!(levenshtein(&a, &b), levenshtein_dp(a.as_bytes(), b.as_bytes()));
            prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
            prop_assert_eq!(levenshtein(&a, &b) == 0, a == b);
        }

        #[test]
        fn score_matches_oracle(exs in arb_exemplars(), q in "[a-d]{0,6}", config in arb_config()) {
            // type mode counts each (form, choice) once
            let mut deduped: Vec<Exemplar> = Vec::new();
            for e in &exs {
                if config.mode == WeightMode::Type
                    && deduped.iter().any(|d| d.form == e.form && d.choice == e.choice)
                {
                    continue;
                }
                deduped.push(e.clone());
            }
            let m = GcmModel::new(exs, config).unwrap();
            let s = m.score(&q).unwrap();
            let o = oracle(&deduped, &q, &config);
            prop_assert!((s.p_ity - o[0]).abs() < 1e-9);
            prop_assert!((s.p_ness - o[1]).abs() < 1e-9);
            prop_assert!((s.p_ity + s.p_ness - 1.0).abs() < 1e-12);
        }

        #[test]
        fn token_argmax_scale_invariant(exs in arb_exemplars(), q in "[a-d]{0,6}", k in 0.01f64..100.0) {
            let m = GcmModel::new(exs.clone(), token(1.0)).unwrap();
            let scaled: Vec<Exemplar> = exs.into_iter().map(|mut e| { e.weight *= k; e }).collect();
            let m2 = GcmModel::new(scaled, token(1.0)).unwrap();
            let (a, b) = (m.score(&q).unwrap(), m2.score(&q).unwrap());
            prop_assert!((a.p_ity - b.p_ity).abs() < 1e-9);
            if (a.p_ity - a.p_ness).abs() > 1e-9 {
                prop_assert_eq!(a.choice(), b.choice());
            }
        }

        #[test]
        fn duplicate_equals_added_weight(exs in arb_exemplars(), q in "[a-d]{0,6}", w in 1u32..20) {
            let mut dup = exs.clone();
            dup.push(Exemplar { weight: w as f64, ..exs[0].clone() });
            let mut added = exs.clone();
            added[0].weight += w as f64;
            let a = GcmModel::new(dup, token(0.8)).unwrap().score(&q).unwrap();
            let b = GcmModel::new(added, token(0.8)).unwrap().score(&q).unwrap();
            prop_assert!((a.p_ity - b.p_ity).abs() < 1e-12);
        }

        #[test]
        fn weight_increase_is_monotone(exs in arb_exemplars(), q in "[a-d]{0,6}", i in 0usize..8, w in 1u32..20) {
            let i = i % exs.len();
            let choice = exs[i].choice;
            let before = GcmModel::new(exs.clone(), token(0.8)).unwrap().score(&q).unwrap();
            let mut more = exs;
            more[i].weight += w as f64;
            let after = GcmModel::new(more, token(0.8)).unwrap().score(&q).unwrap();
            prop_assert!(after.probability(choice) >= before.probability(choice) - 1e-12);
        }
    }
}
