use std::collections::BTreeMap;

use nomlab::eval::{annotator_agreement, annotator_class_correlation, human_majority, AnnotationRecord, HumanSummary};
use nomlab::{AdjectiveClass, Base, SuffixChoice};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::util::{normals, shuffled};
use crate::Checks;

pub const RATERS_PER_ITEM: usize = 11;
pub const ANNOTATORS: usize = 2 * RATERS_PER_ITEM;

/// Per-class targets: total NESS votes over the 50 items, Gwet's AC1, and the
/// number of items with a NESS majority.
struct ClassTarget {
    class: AdjectiveClass,
    ness_votes: usize,
    ac1: f64,
    ness_majority: usize,
    k_range: (usize, usize),
}

const TARGETS: [ClassTarget; 4] = [
    ClassTarget { class: AdjectiveClass::Able, ness_votes: 97, ac1: 0.587, ness_majority: 0, k_range: (0, 5) },
    ClassTarget { class: AdjectiveClass::Ish, ness_votes: 523, ac1: 0.899, ness_majority: 50, k_range: (6, 11) },
    ClassTarget { class: AdjectiveClass::Ive, ness_votes: 219, ac1: 0.096, ness_majority: 14, k_range: (0, 11) },
    ClassTarget { class: AdjectiveClass::Ous, ness_votes: 261, ac1: 0.054, ness_majority: 22, k_range: (0, 11) },
];

/// Items whose vote split is quoted directly.
const FIXED: [(&str, usize); 2] = [("indaminous", 2), ("rebelorous", 11)];

pub const FLEISS_KAPPA: f64 = 0.335;
pub const CORRELATIONS: [(AdjectiveClass, AdjectiveClass, f64); 2] =
    [(AdjectiveClass::Able, AdjectiveClass::Ive, 0.417), (AdjectiveClass::Ive, AdjectiveClass::Ous, 0.415)];
/// Annotators preferring -ity for most -ous items (at most 12 of 25 NESS).
const OUS_ITY_LEANING: usize = 13;

fn ac1_for(n_items: usize, votes: usize, sum_sq: usize) -> f64 {
    let n = RATERS_PER_ITEM as f64;
    let pi = votes as f64 / (n_items as f64 * n);
    let pe = 2.0 * pi * (1.0 - pi);
    let agree = 2.0 * sum_sq as f64 - 2.0 * n * votes as f64 + n_items as f64 * n * (n - 1.0);
    let p_bar = agree / (n_items as f64 * n * (n - 1.0));
    (p_bar - pe) / (1.0 - pe)
}

/// Vote counts with the class's vote total, the Σk² closest to the target
/// AC1, and the required number of NESS majorities.
fn item_votes(t: &ClassTarget, fixed: &[Option<usize>], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = fixed.len();
    let (lo, hi) = t.k_range;
    let max_sq = n * hi * hi;
    // k² has the parity of k, so Σk² has the parity of the vote total
    let want_sq = (0..=max_sq)
        .filter(|q| q % 2 == t.ness_votes % 2)
        .min_by(|&a, &b| (ac1_for(n, t.ness_votes, a) - t.ac1).abs().total_cmp(&(ac1_for(n, t.ness_votes, b) - t.ac1).abs()))
        .expect("range is non-empty");
    let half = RATERS_PER_ITEM / 2;
    let cost = |k: &[usize]| {
        let sq: usize = k.iter().map(|v| v * v).sum();
        let maj = k.iter().filter(|&&v| v > half).count();
        sq.abs_diff(want_sq) + 3 * maj.abs_diff(t.ness_majority)
    };
    loop {
        let mut k: Vec<usize> = fixed.iter().map(|f| f.unwrap_or(lo)).collect();
        let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
        let mut left = t.ness_votes - k.iter().sum::<usize>();
        while left > 0 {
            let i = free[rng.random_range(0..free.len())];
            if k[i] < hi {
                k[i] += 1;
                left -= 1;
            }
        }
        let mut c = cost(&k);
        for _ in 0..200_000 {
            if c == 0 {
                return k;
            }
            let i = free[rng.random_range(0..free.len())];
            let j = free[rng.random_range(0..free.len())];
            if i == j || k[i] == hi || k[j] == lo {
                continue;
            }
            k[i] += 1;
            k[j] -= 1;
            let next = cost(&k);
            if next <= c {
                c = next;
            } else {
                k[i] -= 1;
                k[j] += 1;
            }
        }
    }
}

struct Item {
    base: Base,
    version: usize,
    voters: Vec<bool>,
}

fn annotator_id(version: usize, slot: usize) -> String {
    format!("s{:02}", version * RATERS_PER_ITEM + slot + 1)
}

fn rates(items: &[Item]) -> BTreeMap<AdjectiveClass, Vec<f64>> {
    let mut out: BTreeMap<AdjectiveClass, Vec<f64>> = BTreeMap::new();
    for it in items {
        let row = out.entry(it.base.class()).or_insert_with(|| vec![0.0; ANNOTATORS]);
        for (slot, &v) in it.voters.iter().enumerate() {
            if v {
                row[it.version * RATERS_PER_ITEM + slot] += 1.0;
            }
        }
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    nomlab::stats::pearson_r(x, y).map(|c| c.r).unwrap_or(0.0)
}

fn anneal_cost(items: &[Item]) -> f64 {
    let r = rates(items);
    let mut cost = 0.0;
    for (a, b, want) in CORRELATIONS {
        cost += (pearson(&r[&a], &r[&b]) - want).powi(2);
    }
    let ity_leaning = r[&AdjectiveClass::Ous].iter().filter(|&&c| c <= 12.0).count();
    cost + 0.01 * ity_leaning.abs_diff(OUS_ITY_LEANING) as f64
}

/// Eleven judgments per nonce from 22 annotators in two versions of the
/// questionnaire.
pub fn build(nonces: &[Base], rng: &mut ChaCha8Rng) -> Vec<AnnotationRecord> {
    let bias = normals(rng, ANNOTATORS);
    let mut items: Vec<Item> = Vec::new();
    for t in &TARGETS {
        let bases: Vec<Base> = nonces.iter().filter(|b| b.class() == t.class).cloned().collect();
        let bases = shuffled(&bases, rng);
        let fixed: Vec<Option<usize>> =
            bases.iter().map(|b| FIXED.iter().find(|(f, _)| *f == b.form()).map(|(_, k)| *k)).collect();
        let votes = item_votes(t, &fixed, rng);
        for (i, (base, k)) in bases.into_iter().zip(votes).enumerate() {
            let version = i % 2;
            // annotators with a stronger NESS bias are likelier to vote NESS
            let mut order: Vec<(f64, usize)> = (0..RATERS_PER_ITEM)
                .map(|s| (bias[version * RATERS_PER_ITEM + s] + 1.5 * crate::util::normal(rng), s))
                .collect();
            order.sort_by(|a, b| b.0.total_cmp(&a.0));
            let mut voters = vec![false; RATERS_PER_ITEM];
            for &(_, s) in order.iter().take(k) {
                voters[s] = true;
            }
            items.push(Item { base, version, voters });
        }
    }
    let mut cost = anneal_cost(&items);
    let mut temp = 1e-3;
    for step in 0..60_000 {
        if cost < 1e-7 {
            break;
        }
        let i = rng.random_range(0..items.len());
        let on: Vec<usize> = (0..RATERS_PER_ITEM).filter(|&s| items[i].voters[s]).collect();
        let off: Vec<usize> = (0..RATERS_PER_ITEM).filter(|&s| !items[i].voters[s]).collect();
        if on.is_empty() || off.is_empty() {
            continue;
        }
        let (a, b) = (on[rng.random_range(0..on.len())], off[rng.random_range(0..off.len())]);
        items[i].voters.swap(a, b);
        let next = anneal_cost(&items);
        if next <= cost || rng.random_range(0.0..1.0) < ((cost - next) / temp).exp() {
            cost = next;
        } else {
            items[i].voters.swap(a, b);
        }
        if step % 1000 == 999 {
            temp *= 0.8;
        }
    }
    let mut out = Vec::new();
    for version in 0..2 {
        for slot in 0..RATERS_PER_ITEM {
            for it in items.iter().filter(|it| it.version == version) {
                out.push(AnnotationRecord {
                    item: it.base.clone(),
                    annotator_id: annotator_id(version, slot),
                    choice: if it.voters[slot] { SuffixChoice::Ness } else { SuffixChoice::Ity },
                });
            }
        }
    }
    out
}

pub fn verify(records: &[AnnotationRecord], checks: &mut Checks) -> HumanSummary {
    let stats = annotator_agreement(records).expect("annotations are well formed");
    checks.check("annotations fleiss kappa", stats.fleiss_kappa, FLEISS_KAPPA, 0.005);
    for t in &TARGETS {
        checks.check(&format!("annotations {} AC1", t.class.suffix()), stats.ac1_by_class[&t.class], t.ac1, 0.005);
    }
    let summary = human_majority(records).expect("annotations are well formed");
    for (a, b, want) in CORRELATIONS {
        let r = annotator_class_correlation(&summary, a, b).expect("rates vary").r;
        checks.check(&format!("annotator r {}/{}", a.suffix(), b.suffix()), r, want, 0.005);
    }
    for (form, k) in FIXED {
        let base = Base::parse(form).expect("fixed items are nonces");
        let got = summary.item_ness_ratio[&base];
        checks.check(&format!("{form} NESS ratio"), got, k as f64 / RATERS_PER_ITEM as f64, 1e-9);
    }
    let ous_ity = summary.annotator_ness_ratio.values().filter(|m| m[&AdjectiveClass::Ous] < 0.5).count();
    checks.check("annotators leaning -ity on -ous", ous_ity as f64, OUS_ITY_LEANING as f64, 0.0);
    checks.check("annotation ties", summary.ties.len() as f64, 0.0, 0.0);
    summary
}
