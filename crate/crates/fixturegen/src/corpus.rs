use std::collections::{BTreeMap, HashSet};

use nomlab::corpus::{count_text, extract_lexicon, LexiconEntry};
use nomlab::eval::ProbeRecord;
use nomlab::{AdjectiveClass, SuffixChoice};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::util::shuffled;
use crate::Checks;

pub const TARGET_BYTES: usize = 1_000_000;
const PER_NONCE_CLASS: usize = 350;
const PER_OTHER_CLASS: usize = 75;
const FILLER_VOCAB: usize = 3000;

/// Derivative counts are compressed to keep the file small; zero stays zero.
fn compress(n: u64) -> u64 {
    (n as f64).sqrt().ceil() as u64
}

fn compress_base(n: u64) -> u64 {
    (1.0 + n as f64).ln().ceil() as u64
}

/// Bases of the probe subset written into the corpus, per class, real words
/// first.
fn corpus_bases<'a>(lexicon: &'a [LexiconEntry], seen: &[ProbeRecord], real: &HashSet<&str>, rng: &mut ChaCha8Rng) -> Vec<&'a LexiconEntry> {
    let probed: HashSet<&str> = seen.iter().map(|r| r.base.form()).collect();
    let mut by_class: BTreeMap<AdjectiveClass, Vec<&LexiconEntry>> = BTreeMap::new();
    for e in lexicon.iter().filter(|e| probed.contains(e.base.form())) {
        by_class.entry(e.base.class()).or_default().push(e);
    }
    let mut out = Vec::new();
    for (class, list) in by_class {
        let quota = if AdjectiveClass::NONCE.contains(&class) { PER_NONCE_CLASS } else { PER_OTHER_CLASS };
        let mut list = shuffled(&list, rng);
        list.sort_by_key(|e| !real.contains(e.base.form()));
        out.extend(list.into_iter().take(quota));
    }
    out
}

/// Plain-text corpus carrying a sample of the lexicon with compressed
/// counts, padded with Zipf-distributed filler words.
pub fn build(lexicon: &[LexiconEntry], seen: &[ProbeRecord], words: &[String], rng: &mut ChaCha8Rng) -> (String, Vec<LexiconEntry>) {
    let real: HashSet<&str> = words.iter().map(String::as_str).collect();
    let bases = corpus_bases(lexicon, seen, &real, rng);
    let mut tokens: Vec<String> = Vec::new();
    let mut expected = Vec::new();
    for e in &bases {
        let n = compress_base(e.base_count);
        tokens.extend(std::iter::repeat_n(e.base.form().to_owned(), n as usize));
        let mut ex = LexiconEntry { base: e.base.clone(), base_count: n, ity_count: 0, ness_count: 0 };
        for choice in SuffixChoice::ALL {
            let k = compress(e.count(choice));
            tokens.extend(std::iter::repeat_n(e.base.derivative(choice), k as usize));
            match choice {
                SuffixChoice::Ity => ex.ity_count = k,
                SuffixChoice::Ness => ex.ness_count = k,
            }
        }
        expected.push(ex);
    }
    let taken: HashSet<String> =
        bases.iter().flat_map(|e| [e.base.form().to_owned(), e.base.derivative(SuffixChoice::Ity), e.base.derivative(SuffixChoice::Ness)]).collect();
    let filler: Vec<String> = shuffled(words, rng)
        .into_iter()
        .filter(|w| (2..=9).contains(&w.len()) && !w.ends_with("ity") && !w.ends_with("ness") && !taken.contains(w))
        .take(FILLER_VOCAB)
        .collect();
    let weights: Vec<f64> = (1..=filler.len()).map(|r| 1.0 / r as f64).collect();
    let wsum: f64 = weights.iter().sum();
    let mut bytes: usize = tokens.iter().map(|t| t.len() + 1).sum();
    while bytes < TARGET_BYTES {
        let mut pick = rng.random_range(0.0..wsum);
        let mut i = 0;
        while pick >= weights[i] && i + 1 < weights.len() {
            pick -= weights[i];
            i += 1;
        }
        bytes += filler[i].len() + 1;
        tokens.push(filler[i].clone());
    }
    let tokens = shuffled(&tokens, rng);
    let mut text = String::with_capacity(bytes + bytes / 10);
    let mut i = 0;
    while i < tokens.len() {
        let len = rng.random_range(8..=20).min(tokens.len() - i);
        for (j, t) in tokens[i..i + len].iter().enumerate() {
            if j == 0 {
                let mut cs = t.chars();
                if let Some(c) = cs.next() {
                    text.extend(c.to_uppercase());
                    text.push_str(cs.as_str());
                }
            } else {
                text.push(' ');
                text.push_str(t);
            }
            if j + 1 < len && rng.random_range(0..9) == 0 {
                text.push(',');
            }
        }
        text.push_str(if rng.random_range(0..12) == 0 { "?\n" } else { ".\n" });
        i += len;
    }
    expected.sort_by(|a, b| a.base.form().cmp(b.base.form()));
    (text, expected)
}

pub fn verify(text: &str, expected: &[LexiconEntry], checks: &mut Checks) {
    checks.check("corpus bytes", text.len() as f64, TARGET_BYTES as f64, 0.05 * TARGET_BYTES as f64);
    let extracted = extract_lexicon(&count_text(text));
    checks.check("corpus lexicon size", extracted.len() as f64, expected.len() as f64, 0.0);
    let same = extracted
        .iter()
        .zip(expected)
        .filter(|(a, b)| a.base == b.base && a.ity_count == b.ity_count && a.ness_count == b.ness_count && a.base_count >= b.base_count)
        .count();
    checks.check("corpus entries recovered exactly", same as f64, expected.len() as f64, 0.0);
}
