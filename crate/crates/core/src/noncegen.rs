//! Pseudoword generation from character-bigram chains.
//!
//! A chain is trained on real adjectives of one class. Candidates are drawn
//! left to right for the part before the suffix, the suffix is appended,
//! and a candidate is kept only if every bigram of `^word$` was seen in
//! training and neither the word nor its two derivatives occur in the
//! reference frequency table.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::FrequencyTable;
use crate::error::{Error, Result};
use crate::io::read_lines;
use crate::morphlex::{AdjectiveClass, Base, SuffixChoice};

pub const BEGIN: char = '^';
pub const END: char = '$';
pub const DEFAULT_PER_LENGTH: usize = 25;
pub const DEFAULT_MAX_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigramModel {
    counts: BTreeMap<(char, char), u64>,
    alphabet: BTreeSet<char>,
    lengths: (usize, usize),
    /// Successors of each character other than `END`, with counts.
    successors: BTreeMap<char, Vec<(char, u64)>>,
}

impl BigramModel {
    pub fn count(&self, a: char, b: char) -> u64 {
        self.counts.get(&(a, b)).copied().unwrap_or(0)
    }

    pub fn contains(&self, a: char, b: char) -> bool {
        self.counts.contains_key(&(a, b))
    }

    pub fn counts(&self) -> &BTreeMap<(char, char), u64> {
        &self.counts
    }

    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    /// The two most frequent word lengths in training, most frequent first.
    pub fn modal_lengths(&self) -> (usize, usize) {
        self.lengths
    }

    /// True when every bigram of `^word$` occurs in the model.
    pub fn accepts(&self, word: &str) -> bool {
        let chars: Vec<char> = std::iter::once(BEGIN).chain(word.chars()).chain(std::iter::once(END)).collect();
        chars.windows(2).all(|w| self.contains(w[0], w[1]))
    }
}

pub fn train_bigrams<S: AsRef<str>>(words: &[S]) -> Result<BigramModel> {
    if words.is_empty() {
        return Err(Error::input("cannot train a bigram model on an empty word list"));
    }
    let mut counts = BTreeMap::new();
    let mut alphabet = BTreeSet::new();
    let mut by_length: BTreeMap<usize, usize> = BTreeMap::new();
    for w in words {
        let w = w.as_ref();
        if w.is_empty() || w.contains([BEGIN, END]) {
            return Err(Error::input(format!("`{w}` is not a usable training word")));
        }
        *by_length.entry(w.chars().count()).or_default() += 1;
        alphabet.extend(w.chars());
        let chars: Vec<char> = std::iter::once(BEGIN).chain(w.chars()).chain(std::iter::once(END)).collect();
        for pair in chars.windows(2) {
            *counts.entry((pair[0], pair[1])).or_insert(0u64) += 1;
        }
    }
    // most frequent first, shorter on ties
    let mut ranked: Vec<(usize, usize)> = by_length.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let first = ranked[0].0;
    let second = ranked.get(1).map_or(first, |r| r.0);
    let lengths = (first.min(second), first.max(second));
    let mut successors: BTreeMap<char, Vec<(char, u64)>> = BTreeMap::new();
    for (&(a, b), &n) in &counts {
        successors.entry(a).or_default().push((b, n));
    }
    Ok(BigramModel { counts, alphabet, lengths, successors })
}

/// Trains on a class word list, rejecting words outside the class.
pub fn train_class_bigrams<S: AsRef<str>>(words: &[S], class: AdjectiveClass) -> Result<BigramModel> {
    if let Some(w) = words.iter().map(AsRef::as_ref).find(|w| !w.ends_with(class.suffix())) {
        return Err(Error::input(format!("training word `{w}` does not end in -{}", class.suffix())));
    }
    train_bigrams(words)
}

pub fn read_word_list(path: &Path) -> Result<Vec<String>> {
    Ok(read_lines(path)?.into_iter().map(|l| l.to_lowercase()).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonceSpec {
    pub class: AdjectiveClass,
    pub lengths: (usize, usize),
    pub per_length: usize,
    pub seed: u64,
    pub max_attempts: usize,
}

impl NonceSpec {
    /// Default quota at the model's modal lengths.
    pub fn for_model(model: &BigramModel, class: AdjectiveClass, seed: u64) -> NonceSpec {
        NonceSpec {
            class,
            lengths: model.modal_lengths(),
            per_length: DEFAULT_PER_LENGTH,
            seed,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }

    pub fn requested(&self) -> usize {
        self.per_length * 2
    }
}

fn sample_next(model: &BigramModel, from: char, rng: &mut ChaCha8Rng) -> Option<char> {
    let options = model.successors.get(&from)?;
    let total: u64 = options.iter().filter(|(c, _)| *c != END).map(|(_, n)| n).sum();
    if total == 0 {
        return None;
    }
    let mut pick = rng.random_range(0..total);
    for &(c, n) in options.iter().filter(|(c, _)| *c != END) {
        if pick < n {
            return Some(c);
        }
        pick -= n;
    }
    unreachable!("pick is below the total")
}

/// True when neither the form nor its derivatives occur in `freq` or
/// `known`.
pub fn is_novel(base: &Base, freq: &FrequencyTable, known: &HashSet<String>) -> bool {
    std::iter::once(base.form().to_owned())
        .chain(SuffixChoice::ALL.map(|c| base.derivative(c)))
        .all(|w| freq.get(&w) == 0 && !known.contains(&w))
}

/// Draws `per_length` novel pseudowords at each of the two lengths.
pub fn generate(
    model: &BigramModel,
    spec: &NonceSpec,
    freq: &FrequencyTable,
    known: &HashSet<String>,
) -> Result<Vec<Base>> {
    let suffix = spec.class.suffix();
    let suffix_len = suffix.chars().count();
    for len in [spec.lengths.0, spec.lengths.1] {
        if len < suffix_len + 2 {
            return Err(Error::input(format!("length {len} leaves no room before -{suffix}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out: Vec<Base> = Vec::with_capacity(spec.requested());
    let mut seen: HashSet<String> = HashSet::new();
    let mut attempts = 0usize;
    let mut word = String::new();
    for len in [spec.lengths.0, spec.lengths.1] {
        let prefix_len = len - suffix_len;
        let mut produced = 0;
        while produced < spec.per_length {
            if attempts == spec.max_attempts {
                return Err(Error::GenerationExhausted {
                    class: suffix.to_owned(),
                    produced: out.len(),
                    requested: spec.requested(),
                    attempts,
                });
            }
            attempts += 1;
            word.clear();
            let mut prev = BEGIN;
            for _ in 0..prefix_len {
                match sample_next(model, prev, &mut rng) {
                    Some(c) => {
                        word.push(c);
                        prev = c;
                    }
                    None => break,
                }
            }
            if word.chars().count() != prefix_len {
                continue;
            }
            word.push_str(suffix);
            if !model.accepts(&word) || seen.contains(&word) {
                continue;
            }
            let Ok(base) = Base::new(word.clone(), spec.class) else {
                continue;
            };
            if !is_novel(&base, freq, known) {
                continue;
            }
            seen.insert(word.clone());
            out.push(base);
            produced += 1;
        }
    }
    Ok(out)
}

/// Members of `class` in a mixed word list, long enough to serve as bases.
pub fn class_words<S: AsRef<str>>(words: &[S], class: AdjectiveClass) -> Vec<String> {
    words
        .iter()
        .map(AsRef::as_ref)
        .filter(|w| w.chars().count() >= crate::corpus::MIN_BASE_LEN && crate::morphlex::classify(w) == Some(class))
        .map(str::to_owned)
        .collect()
}

/// Nonces for several classes, each from a chain trained on that class's
/// members of `words`, at the chain's modal lengths. Class `i` of `classes`
/// draws with seed `seed + i`. Every word of `words` counts as known.
pub fn generate_classes<S: AsRef<str>>(
    words: &[S],
    classes: &[AdjectiveClass],
    per_length: usize,
    seed: u64,
    freq: &FrequencyTable,
) -> Result<Vec<Base>> {
    let known: HashSet<String> = words.iter().map(|w| w.as_ref().to_owned()).collect();
    let mut out = Vec::new();
    for (i, &class) in classes.iter().enumerate() {
        let members = class_words(words, class);
        if members.is_empty() {
            return Err(Error::input(format!("word list has no -{} adjectives", class.suffix())));
        }
        let model = train_class_bigrams(&members, class)?;
        let spec = NonceSpec { per_length, ..NonceSpec::for_model(&model, class, seed.wrapping_add(i as u64)) };
        out.extend(generate(&model, &spec, freq, &known)?);
    }
    Ok(out)
}

/// `form<TAB>class` lines.
pub fn to_tsv(bases: &[Base]) -> String {
    let mut out = String::from("form\tclass\n");
    for b in bases {
        let _ = writeln!(out, "{}\t{}", b.form(), b.class().suffix());
    }
    out
}

/// Reads `form<TAB>class` lines (header optional).
pub fn read_nonces(path: &Path) -> Result<Vec<Base>> {
    let mut out = Vec::new();
    for (i, line) in read_lines(path)?.into_iter().enumerate() {
        let mut cols = line.split('\t');
        let form = cols.next().unwrap_or_default();
        if i == 0 && form == "form" {
            continue;
        }
        let base = match cols.next() {
            Some(class) => class
                .parse::<AdjectiveClass>()
                .and_then(|c| Base::new(form, c)),
            None => Base::parse(form),
        };
        out.push(base.map_err(|e| crate::io::parse_error(path, i + 1, e.to_string()))?);
    }
    Ok(out)
}
