use std::collections::HashSet;

use nomlab::corpus::{ClassStats, FrequencyTable, LexiconEntry, TRIM_FRACTION};
use nomlab::morphlex::classify;
use nomlab::noncegen::{generate, train_class_bigrams, NonceSpec};
use nomlab::{AdjectiveClass, Base};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::util::{normal, shuffled};
use crate::Checks;

/// One row of the derivative statistics table: types, mean tokens per type
/// and hapaxes for each suffix, plus trimmed means where published.
pub struct SiRow {
    pub class: AdjectiveClass,
    pub ity: (usize, f64, usize),
    pub ness: (usize, f64, usize),
    pub trimmed: (Option<f64>, Option<f64>),
}

use AdjectiveClass as C;

pub const SI_TABLE: [SiRow; 10] = [
    SiRow { class: C::Able, ity: (11_081, 3937.7, 1673), ness: (1_034, 817.3, 226), trimmed: (None, None) },
    SiRow { class: C::Al, ity: (9_133, 5904.9, 2078), ness: (1_011, 172.1, 251), trimmed: (None, None) },
    SiRow { class: C::Ar, ity: (2_433, 5833.7, 451), ness: (214, 10.3, 59), trimmed: (None, None) },
    SiRow { class: C::Ed, ity: (62, 2.4, 28), ness: (4_786, 539.6, 1134), trimmed: (None, None) },
    SiRow { class: C::Ic, ity: (6_215, 4162.7, 790), ness: (617, 45.7, 175), trimmed: (None, None) },
    SiRow { class: C::Ing, ity: (2, 1.0, 2), ness: (1_600, 1104.5, 448), trimmed: (None, None) },
    SiRow { class: C::Ish, ity: (0, 0.0, 0), ness: (1_502, 397.0, 437), trimmed: (None, None) },
    SiRow { class: C::Less, ity: (3, 1.7, 1), ness: (2_020, 1159.8, 506), trimmed: (None, None) },
    SiRow { class: C::Ive, ity: (4_508, 15075.8, 626), ness: (2_438, 3252.1, 554), trimmed: (None, None) },
    SiRow { class: C::Ous, ity: (1_372, 5453.1, 325), ness: (2_450, 2420.3, 675), trimmed: (Some(15.1), Some(73.0)) },
];

pub const TOTAL_BASES: usize = 48_995;

/// Bases attested with both derivatives, per class: the surplus of derivative
/// types over bases, spread in proportion to the rarer suffix's type count.
pub fn both_attested() -> Vec<usize> {
    let types: usize = SI_TABLE.iter().map(|r| r.ity.0 + r.ness.0).sum();
    let surplus = types - TOTAL_BASES;
    let mins: Vec<usize> = SI_TABLE.iter().map(|r| r.ity.0.min(r.ness.0)).collect();
    let total_min: usize = mins.iter().sum();
    let mut out: Vec<usize> = mins.iter().map(|m| m * surplus / total_min).collect();
    // hand the rounding remainder to the classes with the most room
    let mut order: Vec<usize> = (0..out.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(mins[i] - out[i]));
    let mut left = surplus - out.iter().sum::<usize>();
    for i in order.into_iter().cycle() {
        if left == 0 {
            break;
        }
        if out[i] < mins[i] {
            out[i] += 1;
            left -= 1;
        }
    }
    out
}

/// Token counts for `types` derivatives with exactly `hapaxes` ones, total
/// `round(mean * types)`, and (when given) the published mean after dropping
/// the top 5%.
pub fn count_pool(types: usize, hapaxes: usize, mean: f64, trimmed: Option<f64>, rng: &mut ChaCha8Rng) -> Vec<u64> {
    if types == 0 {
        return Vec::new();
    }
    let total = (mean * types as f64).round() as u64;
    let top = ((types as f64 * TRIM_FRACTION).ceil() as usize).min(types - 1);
    let bulk = types - top;
    if types < 20 || hapaxes >= bulk {
        let rest = types - hapaxes;
        let mut out = vec![1u64; hapaxes];
        if rest > 0 {
            let mass = total - hapaxes as u64;
            let each = mass / rest as u64;
            assert!(each >= 2, "pool of {types} cannot have {hapaxes} hapaxes and total {total}");
            let mut extra = mass - each * rest as u64;
            for _ in 0..rest {
                let bump = u64::from(extra > 0);
                extra -= bump;
                out.push(each + bump);
            }
        }
        return out;
    }
    let multi = bulk - hapaxes;
    let floor_mean = (hapaxes + 2 * multi) as f64 / bulk as f64;
    let target = trimmed.unwrap_or(floor_mean + 0.015 * (mean - floor_mean)).max(floor_mean);
    let bulk_total = (target * bulk as f64).round() as u64;
    let extra = bulk_total - hapaxes as u64 - 2 * multi as u64;
    // heavy-tailed excess over 2, scaled to the required mass
    let weights: Vec<f64> = (0..multi).map(|_| (rng.random_range(0.0f64..1.0).max(1e-9).powf(-1.0 / 1.3) - 1.0).min(40.0)).collect();
    let (mut lo, mut hi) = (0.0, 1.0);
    let mass = |s: f64| weights.iter().map(|w| (w * s).floor() as u64).sum::<u64>();
    while mass(hi) < extra {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if mass(mid) <= extra {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut excess: Vec<u64> = weights.iter().map(|w| (w * lo).floor() as u64).collect();
    let mut short = extra - excess.iter().sum::<u64>();
    let mut i = 0;
    while short > 0 {
        excess[i % multi] += 1;
        short -= 1;
        i += 7919;
    }
    let mut out = vec![1u64; hapaxes];
    out.extend(excess.iter().map(|e| 2 + e));
    let max_bulk = *out.iter().max().expect("bulk is non-empty");
    let top_total = total - bulk_total;
    assert!(top_total >= max_bulk * top as u64, "top 5% cannot carry {top_total} tokens above {max_bulk}");
    let zipf: Vec<f64> = (1..=top).map(|j| (j as f64).powf(-1.1)).collect();
    let zsum: f64 = zipf.iter().sum();
    let spare = top_total - max_bulk * top as u64;
    let mut tops: Vec<u64> = zipf.iter().map(|z| max_bulk + (spare as f64 * z / zsum).floor() as u64).collect();
    tops[0] += top_total - tops.iter().sum::<u64>();
    out.extend(tops);
    out
}

/// Word-source forms of `class`, excluding `exclude`.
pub fn class_words(words: &[String], class: AdjectiveClass, exclude: &HashSet<String>) -> Vec<String> {
    words
        .iter()
        .filter(|w| w.len() >= nomlab::corpus::MIN_BASE_LEN && classify(w) == Some(class) && !exclude.contains(*w))
        .filter(|w| Base::new(w.as_str(), class).is_ok())
        .cloned()
        .collect()
}

/// `need` forms of `class`: real words first, then bigram pseudowords
/// trained on the real ones.
fn class_forms(
    class: AdjectiveClass,
    need: usize,
    real: &[String],
    known: &mut HashSet<String>,
    rng: &mut ChaCha8Rng,
) -> Vec<String> {
    let mut forms: Vec<String> = shuffled(real, rng).into_iter().take(need).collect();
    if forms.len() < need {
        let model = train_class_bigrams(real, class).expect("class word list is non-empty");
        let (a, b) = model.modal_lengths();
        let mut spread = 0usize;
        let mut round = 0u64;
        let empty = FrequencyTable::new();
        while forms.len() < need {
            let missing = need - forms.len();
            let short = a.saturating_sub(spread).max(class.suffix().len() + 3);
            let spec = NonceSpec {
                class,
                lengths: (short, b + spread),
                per_length: missing.div_ceil(2).min(2000),
                seed: rng.random(),
                max_attempts: 2_000_000,
            };
            if let Ok(made) = generate(&model, &spec, &empty, known) {
                for base in made {
                    if forms.len() < need {
                        known.insert(base.form().to_owned());
                        forms.push(base.form().to_owned());
                    }
                }
            }
            round += 1;
            spread = (round / 2) as usize + 1;
        }
    }
    for f in &forms {
        known.insert(f.clone());
    }
    forms
}

fn base_count(derived: u64, rng: &mut ChaCha8Rng) -> u64 {
    let scale = (2.0 + 1.2 * normal(rng)).exp();
    ((1 + derived) as f64 * scale).round().max(1.0) as u64
}

/// The full lexicon, sorted by class then form.
pub fn build(words: &[String], nonces: &[Base], rng: &mut ChaCha8Rng) -> Vec<LexiconEntry> {
    let both = both_attested();
    let nonce_forms: HashSet<String> = nonces.iter().map(|b| b.form().to_owned()).collect();
    let mut known: HashSet<String> = words.iter().cloned().collect();
    known.extend(nonce_forms.iter().cloned());
    let mut out = Vec::with_capacity(TOTAL_BASES);
    for (row, &both) in SI_TABLE.iter().zip(&both) {
        let class = row.class;
        let ity = shuffled(&count_pool(row.ity.0, row.ity.2, row.ity.1, row.trimmed.0, rng), rng);
        let ness = shuffled(&count_pool(row.ness.0, row.ness.2, row.ness.1, row.trimmed.1, rng), rng);
        let n = ity.len() + ness.len() - both;
        let real = class_words(words, class, &nonce_forms);
        let forms = class_forms(class, n, &real, &mut known, rng);
        let mut profiles: Vec<(u64, u64)> = Vec::with_capacity(n);
        profiles.extend((0..both).map(|i| (ity[i], ness[i])));
        profiles.extend(ity[both..].iter().map(|&c| (c, 0)));
        profiles.extend(ness[both..].iter().map(|&c| (0, c)));
        let profiles = shuffled(&profiles, rng);
        let mut entries: Vec<LexiconEntry> = forms
            .into_iter()
            .zip(profiles)
            .map(|(form, (i, s))| LexiconEntry {
                base: Base::new(form, class).expect("forms carry the class suffix"),
                base_count: base_count(i + s, rng),
                ity_count: i,
                ness_count: s,
            })
            .collect();
        entries.sort_by(|a, b| a.base.form().cmp(b.base.form()));
        out.extend(entries);
    }
    out
}

/// Checks class statistics against [`SI_TABLE`]: exact type and hapax counts,
/// means to the published decimal.
pub fn verify(stats: &ClassStats, checks: &mut Checks) {
    for row in &SI_TABLE {
        let got = stats.row(row.class).expect("every class is present");
        let s = row.class.suffix();
        for (choice, (types, mean, hapaxes), trimmed) in [("ity", row.ity, row.trimmed.0), ("ness", row.ness, row.trimmed.1)] {
            let c = if choice == "ity" { &got.ity } else { &got.ness };
            checks.check(&format!("{s} {choice} types"), c.types as f64, types as f64, 0.0);
            checks.check(&format!("{s} {choice} hapaxes"), c.hapaxes as f64, hapaxes as f64, 0.0);
            checks.check(&format!("{s} {choice} mean"), c.mean_tokens, mean, 0.05);
            if let Some(t) = trimmed {
                checks.check(&format!("{s} {choice} trimmed mean"), c.trimmed_mean_tokens, t, 0.05);
            }
        }
    }
}
