//! Exact word-frequency counting over (possibly sharded, possibly gzipped)
//! corpora, extraction of the base/derivative lexicon and per-class
//! derivative statistics.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{for_each_line, for_each_line_in, io_error, open_reader, parse_error};
use crate::morphlex::{classify, strip_suffix, AdjectiveClass, Base, SuffixChoice};

/// Minimum length of an extracted base.
pub const MIN_BASE_LEN: usize = 5;

/// Share of the highest-frequency derivatives dropped by the trimmed mean.
pub const TRIM_FRACTION: f64 = 0.05;

/// Word → token count, plus the total number of tokens seen.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: HashMap<String, u64>,
    total_tokens: u64,
}

impl FrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(word)
    }

    pub fn add(&mut self, word: &str, n: u64) {
        if n == 0 {
            return;
        }
        match self.counts.get_mut(word) {
            Some(c) => *c += n,
            None => {
                self.counts.insert(word.to_owned(), n);
            }
        }
        self.total_tokens += n;
    }

    /// Pointwise sum.
    pub fn merge(&mut self, other: FrequencyTable) {
        if self.counts.len() < other.counts.len() {
            let mine = std::mem::replace(self, other);
            self.merge(mine);
            return;
        }
        for (word, n) in other.counts {
            *self.counts.entry(word).or_insert(0) += n;
        }
        self.total_tokens += other.total_tokens;
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(w, &n)| (w.as_str(), n))
    }

    /// Entries sorted by word.
    pub fn sorted(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_unstable();
        v
    }

    /// Table holding every base and attested derivative of a lexicon.
    pub fn from_lexicon(entries: &[LexiconEntry]) -> FrequencyTable {
        let mut table = FrequencyTable::new();
        for e in entries {
            table.add(e.base.form(), e.base_count);
            for choice in SuffixChoice::ALL {
                table.add(&e.base.derivative(choice), e.count(choice));
            }
        }
        table
    }

    /// TSV with a `word<TAB>count` header, sorted by word.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("word\tcount\n");
        for (w, n) in self.sorted() {
            let _ = writeln!(out, "{w}\t{n}");
        }
        out
    }

    pub fn read_tsv(path: &Path) -> Result<FrequencyTable> {
        let mut table = FrequencyTable::new();
        for_each_line(path, |lineno, line| {
            if line.is_empty() || (lineno == 1 && line.starts_with("word\t")) {
                return Ok(());
            }
            let (word, count) = line
                .split_once('\t')
                .ok_or_else(|| "expected `word<TAB>count`".to_owned())?;
            let count: u64 = count.trim().parse().map_err(|e| format!("bad count: {e}"))?;
            table.add(word, count);
            Ok(())
        })?;
        Ok(table)
    }
}

/// Adds every maximal run of ASCII letters in `text`, lowercased.
pub fn count_text_into(table: &mut FrequencyTable, text: &str) {
    let mut word = String::new();
    for b in text.bytes() {
        if b.is_ascii_alphabetic() {
            word.push(b.to_ascii_lowercase() as char);
        } else if !word.is_empty() {
            table.add(&word, 1);
            word.clear();
        }
    }
    if !word.is_empty() {
        table.add(&word, 1);
    }
}

pub fn count_text(text: &str) -> FrequencyTable {
    let mut table = FrequencyTable::new();
    count_text_into(&mut table, text);
    table
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusFormat {
    /// Decide from the file name: `.jsonl`/`.jsonl.gz` are JSON Lines.
    #[default]
    Auto,
    Text,
    /// One JSON object per line with a `text` field.
    JsonLines,
}

impl CorpusFormat {
    fn resolve(self, path: &Path) -> CorpusFormat {
        match self {
            CorpusFormat::Auto => {
                let name = path.to_string_lossy();
                let name = name.strip_suffix(".gz").unwrap_or(&name);
                if name.ends_with(".jsonl") || name.ends_with(".json") {
                    CorpusFormat::JsonLines
                } else {
                    CorpusFormat::Text
                }
            }
            other => other,
        }
    }
}

impl std::str::FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(CorpusFormat::Auto),
            "text" | "txt" => Ok(CorpusFormat::Text),
            "jsonl" | "json" => Ok(CorpusFormat::JsonLines),
            other => Err(Error::input(format!("unknown corpus format `{other}`"))),
        }
    }
}

#[derive(Deserialize)]
struct JsonDoc {
    text: String,
}

const BLOCK_BYTES: usize = 4 << 20;

fn count_block(lines: &[String], format: CorpusFormat, path: &Path, first_line: usize) -> Result<FrequencyTable> {
    let mut table = FrequencyTable::new();
    for (i, line) in lines.iter().enumerate() {
        match format {
            CorpusFormat::JsonLines => {
                if line.trim().is_empty() {
                    continue;
                }
                let doc: JsonDoc = serde_json::from_str(line)
                    .map_err(|e| parse_error(path, first_line + i, e.to_string()))?;
                count_text_into(&mut table, &doc.text);
            }
            _ => count_text_into(&mut table, line),
        }
    }
    Ok(table)
}

fn count_blocks(blocks: Vec<(usize, Vec<String>)>, format: CorpusFormat, path: &Path) -> Result<FrequencyTable> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        blocks
            .par_iter()
            .map(|(first, lines)| count_block(lines, format, path, *first))
            .try_reduce(FrequencyTable::new, |mut a, b| {
                a.merge(b);
                Ok(a)
            })
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut total = FrequencyTable::new();
        for (first, lines) in &blocks {
            total.merge(count_block(lines, format, path, *first)?);
        }
        Ok(total)
    }
}

/// Counts one corpus stream. Lines are grouped into blocks that are
/// counted independently and merged.
pub fn count_reader(reader: impl BufRead, path: &Path, format: CorpusFormat) -> Result<FrequencyTable> {
    let format = format.resolve(path);
    let mut total = FrequencyTable::new();
    let mut blocks: Vec<(usize, Vec<String>)> = Vec::new();
    let mut block: Vec<String> = Vec::new();
    let mut block_start = 1;
    let mut block_bytes = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_error(path, i + 1, e))?;
        block_bytes += line.len();
        block.push(line);
        if block_bytes >= BLOCK_BYTES {
            blocks.push((block_start, std::mem::take(&mut block)));
            block_start = i + 2;
            block_bytes = 0;
            if blocks.len() >= 16 {
                total.merge(count_blocks(std::mem::take(&mut blocks), format, path)?);
            }
        }
    }
    if !block.is_empty() {
        blocks.push((block_start, block));
    }
    total.merge(count_blocks(blocks, format, path)?);
    Ok(total)
}

/// Counts every file (plain, JSON Lines, optionally gzipped) and merges
/// the per-file tables.
pub fn count_corpus(paths: &[impl AsRef<Path>], format: CorpusFormat) -> Result<FrequencyTable> {
    let mut total = FrequencyTable::new();
    for path in paths {
        let path = path.as_ref();
        total.merge(count_reader(open_reader(path)?, path, format)?);
    }
    Ok(total)
}

/// A base adjective with the corpus counts of itself and both derivatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub base: Base,
    pub base_count: u64,
    pub ity_count: u64,
    pub ness_count: u64,
}

impl LexiconEntry {
    pub fn count(&self, choice: SuffixChoice) -> u64 {
        match choice {
            SuffixChoice::Ity => self.ity_count,
            SuffixChoice::Ness => self.ness_count,
        }
    }

    pub fn is_attested(&self, choice: SuffixChoice) -> bool {
        self.count(choice) > 0
    }

    /// Derivative with the higher count; ties go to ITY. `None` when
    /// neither is attested.
    pub fn preferred(&self) -> Option<SuffixChoice> {
        match (self.ity_count, self.ness_count) {
            (0, 0) => None,
            (i, n) if n > i => Some(SuffixChoice::Ness),
            _ => Some(SuffixChoice::Ity),
        }
    }

    /// The only attested derivative, if exactly one is attested.
    pub fn attested_only(&self) -> Option<SuffixChoice> {
        match (self.ity_count > 0, self.ness_count > 0) {
            (true, false) => Some(SuffixChoice::Ity),
            (false, true) => Some(SuffixChoice::Ness),
            _ => None,
        }
    }

    pub fn attested(&self) -> impl Iterator<Item = (SuffixChoice, u64)> + '_ {
        SuffixChoice::ALL
            .into_iter()
            .map(|c| (c, self.count(c)))
            .filter(|(_, n)| *n > 0)
    }
}

pub const LEXICON_HEADER: &str = "base\tclass\tbase_count\tity_count\tness_count";

/// Collects every attested -ity/-ness derivative whose base occurs in the
/// table, belongs to one of the ten classes and is at least
/// [`MIN_BASE_LEN`] letters long. No derivative frequency threshold is
/// applied. Output is sorted by base.
pub fn extract_lexicon(freq: &FrequencyTable) -> Vec<LexiconEntry> {
    let mut by_base: BTreeMap<String, LexiconEntry> = BTreeMap::new();
    for (word, count) in freq.iter() {
        if !(word.ends_with("ity") || word.ends_with("ness")) {
            continue;
        }
        if !word.bytes().all(|b| b.is_ascii_lowercase()) {
            continue;
        }
        let Some((base, choice)) = strip_suffix(word) else {
            continue;
        };
        if base.form().len() < MIN_BASE_LEN {
            continue;
        }
        let base_count = freq.get(base.form());
        if base_count == 0 {
            continue;
        }
        let entry = by_base
            .entry(base.form().to_owned())
            .or_insert_with(|| LexiconEntry {
                base: base.clone(),
                base_count,
                ity_count: 0,
                ness_count: 0,
            });
        match choice {
            SuffixChoice::Ity => entry.ity_count += count,
            SuffixChoice::Ness => entry.ness_count += count,
        }
    }
    by_base.into_values().collect()
}

pub fn lexicon_to_tsv(entries: &[LexiconEntry]) -> String {
    let mut out = String::with_capacity(entries.len() * 32);
    out.push_str(LEXICON_HEADER);
    out.push('\n');
    for e in entries {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            e.base.form(),
            e.base.class().suffix(),
            e.base_count,
            e.ity_count,
            e.ness_count
        );
    }
    out
}

pub fn read_lexicon(path: &Path) -> Result<Vec<LexiconEntry>> {
    parse_lexicon(open_reader(path)?, path)
}

/// Reads a lexicon table from `reader`; `path` only labels errors.
pub fn parse_lexicon(reader: impl BufRead, path: &Path) -> Result<Vec<LexiconEntry>> {
    let mut entries = Vec::new();
    let mut saw_header = false;
    for_each_line_in(reader, path, |lineno, line| {
        if line.trim().is_empty() {
            return Ok(());
        }
        if lineno == 1 {
            if line.trim_end() != LEXICON_HEADER {
                return Err(format!("expected header `{LEXICON_HEADER}`"));
            }
            saw_header = true;
            return Ok(());
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(format!("expected 5 columns, found {}", cols.len()));
        }
        let class: AdjectiveClass = cols[1].parse().map_err(|e: Error| e.to_string())?;
        let base = Base::new(cols[0], class).map_err(|e| e.to_string())?;
        let num = |s: &str| s.trim().parse::<u64>().map_err(|e| format!("bad count `{s}`: {e}"));
        entries.push(LexiconEntry {
            base,
            base_count: num(cols[2])?,
            ity_count: num(cols[3])?,
            ness_count: num(cols[4])?,
        });
        Ok(())
    })?;
    if !saw_header {
        return Err(parse_error(path, 1, "empty lexicon file"));
    }
    Ok(entries)
}

/// Type, token and hapax statistics for one class and suffix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ChoiceStats {
    pub types: usize,
    pub tokens: u64,
    pub hapaxes: usize,
    /// Mean token frequency per derivative type (0 without types).
    pub mean_tokens: f64,
    /// Mean after dropping the top [`TRIM_FRACTION`] of derivatives by
    /// token frequency.
    pub trimmed_mean_tokens: f64,
}

impl ChoiceStats {
    fn from_counts(mut counts: Vec<u64>) -> ChoiceStats {
        let types = counts.len();
        if types == 0 {
            return ChoiceStats::default();
        }
        counts.sort_unstable();
        let tokens: u64 = counts.iter().sum();
        let dropped = (types as f64 * TRIM_FRACTION).ceil() as usize;
        let kept = &counts[..types - dropped.min(types - 1)];
        ChoiceStats {
            types,
            tokens,
            hapaxes: counts.iter().filter(|&&c| c == 1).count(),
            mean_tokens: tokens as f64 / types as f64,
            trimmed_mean_tokens: kept.iter().sum::<u64>() as f64 / kept.len() as f64,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ClassRow {
    pub bases: usize,
    pub ity: ChoiceStats,
    pub ness: ChoiceStats,
}

impl ClassRow {
    pub fn get(&self, choice: SuffixChoice) -> &ChoiceStats {
        match choice {
            SuffixChoice::Ity => &self.ity,
            SuffixChoice::Ness => &self.ness,
        }
    }
}

/// Per-class derivative statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassStats {
    pub rows: BTreeMap<AdjectiveClass, ClassRow>,
    pub total_bases: usize,
}

impl ClassStats {
    pub fn row(&self, class: AdjectiveClass) -> Option<&ClassRow> {
        self.rows.get(&class)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "class,bases,ity_types,ness_types,ity_mean_tokens,ness_mean_tokens,ity_hapaxes,ness_hapaxes,ity_trimmed_mean,ness_trimmed_mean\n",
        );
        for (class, r) in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.1},{:.1},{},{},{:.1},{:.1}",
                class.suffix(),
                r.bases,
                r.ity.types,
                r.ness.types,
                r.ity.mean_tokens,
                r.ness.mean_tokens,
                r.ity.hapaxes,
                r.ness.hapaxes,
                r.ity.trimmed_mean_tokens,
                r.ness.trimmed_mean_tokens
            );
        }
        out
    }
}

pub fn class_stats(lexicon: &[LexiconEntry]) -> Result<ClassStats> {
    if lexicon.is_empty() {
        return Err(Error::input("class statistics need a non-empty lexicon"));
    }
    let mut counts: BTreeMap<AdjectiveClass, (usize, Vec<u64>, Vec<u64>)> = BTreeMap::new();
    for e in lexicon {
        let slot = counts.entry(e.base.class()).or_default();
        slot.0 += 1;
        if e.ity_count > 0 {
            slot.1.push(e.ity_count);
        }
        if e.ness_count > 0 {
            slot.2.push(e.ness_count);
        }
    }
    let rows = counts
        .into_iter()
        .map(|(class, (bases, ity, ness))| {
            (
                class,
                ClassRow {
                    bases,
                    ity: ChoiceStats::from_counts(ity),
                    ness: ChoiceStats::from_counts(ness),
                },
            )
        })
        .collect();
    Ok(ClassStats {
        rows,
        total_bases: lexicon.len(),
    })
}

/// Classes present in a lexicon, in canonical order.
pub fn classes_in(lexicon: &[LexiconEntry]) -> Vec<AdjectiveClass> {
    let mut seen: Vec<AdjectiveClass> = lexicon.iter().map(|e| e.base.class()).collect();
    seen.sort();
    seen.dedup();
    seen
}

/// Restricts a lexicon to the given classes.
pub fn filter_classes(lexicon: &[LexiconEntry], classes: &[AdjectiveClass]) -> Vec<LexiconEntry> {
    lexicon
        .iter()
        .filter(|e| classes.contains(&e.base.class()))
        .cloned()
        .collect()
}

/// Looks up the class of a form (helper for callers holding bare strings).
pub fn class_of(form: &str) -> Option<AdjectiveClass> {
    classify(form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(pairs: &[(&str, u64)]) -> FrequencyTable {
        let mut t = FrequencyTable::new();
        for (w, n) in pairs {
            t.add(w, *n);
        }
        t
    }

    #[test]
    fn counts_letter_runs() {
        let t = count_text("The selfishness of selfishness.");
        assert_eq!(t.get("selfishness"), 2);
        assert_eq!(t.get("the"), 1);
        assert_eq!(t.get("of"), 1);
        assert_eq!(t.total_tokens(), 4);
        assert_eq!(t.len(), 3);
        let t = count_text("naïve co-op 3rd");
        assert_eq!(t.get("na"), 1);
        assert_eq!(t.get("ve"), 1);
        assert_eq!(t.get("co"), 1);
        assert_eq!(t.get("rd"), 1);
    }

    #[test]
    fn empty_stream() {
        assert!(count_text("").is_empty());
        let t = count_reader(std::io::Cursor::new(""), Path::new("x.txt"), CorpusFormat::Text).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.total_tokens(), 0);
    }

    #[test]
    fn jsonl_reader_and_error_position() {
        let data = "{\"text\": \"Kind kindness\"}\n\n{\"text\": \"kindness\"}\n";
        let t = count_reader(std::io::Cursor::new(data), Path::new("c.jsonl"), CorpusFormat::Auto).unwrap();
        assert_eq!(t.get("kindness"), 2);
        let bad = "{\"text\": \"a\"}\nnot json\n";
        let err = count_reader(std::io::Cursor::new(bad), Path::new("c.jsonl"), CorpusFormat::Auto).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn extraction_requires_base() {
        let lex = extract_lexicon(&table(&[("selfish", 10), ("selfishness", 3)]));
        assert_eq!(lex.len(), 1);
        assert_eq!(lex[0].base.form(), "selfish");
        assert_eq!((lex[0].ity_count, lex[0].ness_count), (0, 3));
        assert!(extract_lexicon(&table(&[("selfishness", 3)])).is_empty());
    }

    #[test]
    fn extraction_filters() {
        let lex = extract_lexicon(&table(&[
            ("sensitive", 50),
            ("sensitivity", 40),
            ("sensitiveness", 2),
            ("oral", 5),
            ("orality", 9),
            ("happy", 5),
            ("happiness", 9),
            ("table", 4),
        ]));
        let forms: Vec<_> = lex.iter().map(|e| e.base.form()).collect();
        // `oral` is shorter than the base floor
        assert_eq!(forms, vec!["sensitive"]);
        assert_eq!((lex[0].ity_count, lex[0].ness_count), (40, 2));
    }

    #[test]
    fn single_entry_stats() {
        let lex = vec![LexiconEntry {
            base: Base::parse("selfish").unwrap(),
            base_count: 4,
            ity_count: 0,
            ness_count: 1,
        }];
        let s = class_stats(&lex).unwrap();
        let row = s.row(AdjectiveClass::Ish).unwrap();
        assert_eq!(row.ness.types, 1);
        assert_eq!(row.ness.hapaxes, 1);
        assert_eq!(row.ity.types, 0);
        assert!(class_stats(&[]).is_err());
    }

    #[test]
    fn trimmed_mean_drops_top_share() {
        // 20 types: ceil(5% of 20) = 1 dropped
        let mut counts = vec![1u64; 19];
        counts.push(1000);
        let s = ChoiceStats::from_counts(counts);
        assert_eq!(s.trimmed_mean_tokens, 1.0);
        assert!((s.mean_tokens - 1019.0 / 20.0).abs() < 1e-12);
    }

    #[test]
    fn lexicon_tsv_round_trip() {
        let freq = table(&[("sensitive", 5), ("sensitivity", 3), ("selfish", 2), ("selfishness", 1)]);
        let lex = extract_lexicon(&freq);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lex.tsv");
        crate::io::write_file(&path, lexicon_to_tsv(&lex).as_bytes()).unwrap();
        assert_eq!(read_lexicon(&path).unwrap(), lex);
    }

    fn arb_text() -> impl Strategy<Value = Vec<String>> {
        proptest::collection::vec("[a-zA-Z ,.]{0,40}", 0..8)
    }

    proptest! {
        #[test]
        fn sharded_counting_matches(lines in arb_text(), split in 0usize..8) {
            let split = split.min(lines.len());
            let whole = count_text(&lines.join("\n"));
            let mut a = count_text(&lines[..split].join("\n"));
            let b = count_text(&lines[split..].join("\n"));
            let mut b2 = b.clone();
            b2.merge(a.clone());
            a.merge(b);
            prop_assert_eq!(&a, &whole);
            prop_assert_eq!(&b2, &whole);
            prop_assert_eq!(extract_lexicon(&a), extract_lexicon(&whole));
        }

        #[test]
        fn merge_is_associative(x in arb_text(), y in arb_text(), z in arb_text()) {
            let (tx, ty, tz) = (count_text(&x.join(" ")), count_text(&y.join(" ")), count_text(&z.join(" ")));
            let mut left = tx.clone();
            left.merge(ty.clone());
            left.merge(tz.clone());
            let mut right = ty;
            right.merge(tz);
            let mut right2 = tx;
            right2.merge(right);
            prop_assert_eq!(left, right2);
        }

        #[test]
        fn extracted_derivatives_round_trip(stems in proptest::collection::vec("[a-z]{3,6}", 1..6)) {
            let mut t = FrequencyTable::new();
            for (i, s) in stems.iter().enumerate() {
                let base = Base::new(format!("{s}ous"), AdjectiveClass::Ous).unwrap();
                t.add(base.form(), 1 + i as u64);
                t.add(&base.derivative(SuffixChoice::Ity), 1);
                t.add(&base.derivative(SuffixChoice::Ness), 2);
            }
            for e in extract_lexicon(&t) {
                for (choice, _) in e.attested() {
                    prop_assert_eq!(strip_suffix(&e.base.derivative(choice)), Some((e.base.clone(), choice)));
                }
            }
        }
    }
}
