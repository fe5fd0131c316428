use std::collections::{BTreeMap, HashSet};

use nomlab::corpus::LexiconEntry;
use nomlab::eval::{
    accuracy, accuracy_by_class, bundled_prompts, class_entropy, class_ratio_correlation, entropy_confidence_correlation,
    frequency_buckets, lexicon_ratios, preferred_reference, BucketBounds, HumanSummary, PreferenceRecord, ProbeRecord,
    PromptKind, Reference,
};
use nomlab::{AdjectiveClass, Base, SuffixChoice};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::util::{mean, normal, normals, orthogonalize, round_to, shuffled, standardize, uniform};
use crate::Checks;

pub const MODEL_ID: &str = "gpt-j";
pub const PREFERENCE_MODEL_ID: &str = "gpt-4";
pub const SEEN_SIZE: usize = 5000;

/// Seen-word accuracy per class across prompts (mean, std).
pub const CLASS_ACCURACY: [(AdjectiveClass, f64, f64); 10] = [
    (AdjectiveClass::Ed, 0.986, 0.007),
    (AdjectiveClass::Ing, 0.989, 0.014),
    (AdjectiveClass::Ish, 0.995, 0.004),
    (AdjectiveClass::Less, 0.999, 0.001),
    (AdjectiveClass::Able, 0.896, 0.082),
    (AdjectiveClass::Al, 0.884, 0.073),
    (AdjectiveClass::Ar, 0.896, 0.060),
    (AdjectiveClass::Ic, 0.867, 0.090),
    (AdjectiveClass::Ous, 0.788, 0.038),
    (AdjectiveClass::Ive, 0.842, 0.012),
];
pub const OVERALL_ACCURACY: (f64, f64) = (0.895, 0.048);
pub const RATIO_R: (f64, f64) = (0.995, 0.004);
pub const ENTROPY_R2: f64 = 0.75;

/// Agreement of the probe winners with the human majority on the nonces.
pub const NONCE_AGREEMENT: [(AdjectiveClass, f64); 4] = [
    (AdjectiveClass::Able, 0.893),
    (AdjectiveClass::Ish, 0.997),
    (AdjectiveClass::Ive, 0.632),
    (AdjectiveClass::Ous, 0.503),
];
/// The two -ish nonces the probe gets wrong, once each.
const ISH_MISSES: [&str; 2] = ["turgeish", "prienish"];
/// Items (of 50) on which the forced-choice model agrees with the majority.
pub const PREFERENCE_AGREEMENT: [(AdjectiveClass, usize); 4] = [
    (AdjectiveClass::Able, 48),
    (AdjectiveClass::Ish, 50),
    (AdjectiveClass::Ive, 22),
    (AdjectiveClass::Ous, 20),
];

fn prompt_ids() -> Vec<String> {
    bundled_prompts().into_iter().filter(|p| p.kind == PromptKind::Nominalize).map(|p| p.id).collect()
}

/// Log probabilities with `winner` ahead by `margin` nats.
fn logps(winner: SuffixChoice, margin: f64, level: f64) -> (f64, f64) {
    let hi = round_to(level, 4);
    let lo = round_to(level - margin.max(1e-3), 4);
    let lo = if lo == hi { hi - 1e-4 } else { lo };
    match winner {
        SuffixChoice::Ity => (hi, lo),
        SuffixChoice::Ness => (lo, hi),
    }
}

fn record(base: &Base, prompt: &str, winner: SuffixChoice, margin: f64, level: f64) -> ProbeRecord {
    let (logp_ity, logp_ness) = logps(winner, margin, level);
    ProbeRecord { base: base.clone(), prompt_id: prompt.to_owned(), logp_ity, logp_ness, model_id: MODEL_ID.to_owned() }
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    nomlab::stats::pearson_r(x, y).map(|c| c.r).unwrap_or(f64::NAN)
}

fn pop_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Bucket {
    Low,
    High,
}

struct SeenBase<'a> {
    entry: &'a LexiconEntry,
    preferred: SuffixChoice,
    bucket: Option<Bucket>,
    difficulty: f64,
}

fn bucket_of(e: &LexiconEntry, bounds: BucketBounds) -> Option<Bucket> {
    let choice = e.attested_only()?;
    let f = e.count(choice);
    if f <= bounds.low_max {
        Some(Bucket::Low)
    } else if f > bounds.high_min {
        Some(Bucket::High)
    } else {
        None
    }
}

/// Minimum attested-only bases per class and bucket in the probe subset.
const MIN_BUCKET: usize = 8;

/// Stratified subset: class sizes proportional to the lexicon, shifted
/// between -ed and -ous until the overall mean accuracy hits its target.
fn sample_subset<'a>(lexicon: &'a [LexiconEntry], rng: &mut ChaCha8Rng) -> BTreeMap<AdjectiveClass, Vec<&'a LexiconEntry>> {
    let bounds = BucketBounds::default();
    let mut by_class: BTreeMap<AdjectiveClass, Vec<&LexiconEntry>> = BTreeMap::new();
    for e in lexicon.iter().filter(|e| e.preferred().is_some()) {
        by_class.entry(e.base.class()).or_default().push(e);
    }
    let total: usize = by_class.values().map(Vec::len).sum();
    let mut sizes: BTreeMap<AdjectiveClass, usize> =
        by_class.iter().map(|(c, v)| (*c, (SEEN_SIZE as f64 * v.len() as f64 / total as f64).round() as usize)).collect();
    let acc: BTreeMap<AdjectiveClass, f64> = CLASS_ACCURACY.iter().map(|(c, m, _)| (*c, *m)).collect();
    let overall = |sizes: &BTreeMap<AdjectiveClass, usize>| {
        let n: usize = sizes.values().sum();
        sizes.iter().map(|(c, &k)| (acc[c] * 12.0 * k as f64).round()).sum::<f64>() / (12.0 * n as f64)
    };
    while overall(&sizes) > OVERALL_ACCURACY.0 + 2e-5 {
        *sizes.get_mut(&AdjectiveClass::Ed).expect("class present") -= 1;
        *sizes.get_mut(&AdjectiveClass::Ous).expect("class present") += 1;
    }
    let mut out = BTreeMap::new();
    for (class, pool) in by_class {
        let pool = shuffled(&pool, rng);
        let mut chosen: Vec<&LexiconEntry> = Vec::new();
        let mut taken: HashSet<&str> = HashSet::new();
        for b in [Bucket::Low, Bucket::High] {
            for e in pool.iter().filter(|e| bucket_of(e, bounds) == Some(b)).take(MIN_BUCKET) {
                chosen.push(e);
                taken.insert(e.base.form());
            }
        }
        for e in &pool {
            if chosen.len() >= sizes[&class] {
                break;
            }
            if !taken.contains(e.base.form()) {
                chosen.push(e);
            }
        }
        out.insert(class, chosen);
    }
    out
}

/// Per-class, per-prompt counts of correct records: class means exact,
/// stds close, prompts sharing a common factor so the pooled std hits its
/// target.
fn correct_counts(sizes: &BTreeMap<AdjectiveClass, usize>, prompts: usize, rng: &mut ChaCha8Rng) -> BTreeMap<AdjectiveClass, Vec<usize>> {
    let n_total: usize = sizes.values().sum();
    let pooled = |counts: &BTreeMap<AdjectiveClass, Vec<usize>>| -> Vec<f64> {
        (0..prompts).map(|p| counts.values().map(|v| v[p]).sum::<usize>() as f64 / n_total as f64).collect()
    };
    loop {
        // left-skewed: most prompts do well, a few do badly
        let skewed = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..prompts).map(|_| -(-(1.0 - rng.random_range(0.0f64..1.0)).ln())).collect() };
        let mut z = skewed(rng);
        standardize(&mut z);
        let noise: BTreeMap<AdjectiveClass, Vec<f64>> = CLASS_ACCURACY
            .iter()
            .map(|(c, _, _)| {
                let mut u = skewed(rng);
                orthogonalize(&mut u, &[&z]);
                (*c, u)
            })
            .collect();
        let build = |beta: f64| -> BTreeMap<AdjectiveClass, Vec<usize>> {
            let mut out = BTreeMap::new();
            for &(c, m, s) in &CLASS_ACCURACY {
                let n = sizes[&c];
                let acc: Vec<f64> = (0..prompts)
                    .map(|p| (m + s * (beta * z[p] + (1.0 - beta * beta).sqrt() * noise[&c][p])).clamp(0.0, 1.0))
                    .collect();
                let mut k: Vec<usize> = acc.iter().map(|a| (a * n as f64).round() as usize).collect();
                let want = (m * (prompts * n) as f64).round() as usize;
                // spread the rounding residue over the prompts furthest from their target
                while k.iter().sum::<usize>() != want {
                    let up = k.iter().sum::<usize>() < want;
                    let p = (0..prompts)
                        .filter(|&p| if up { k[p] < n } else { k[p] > 0 })
                        .max_by(|&a, &b| {
                            let gap = |p: usize| (acc[p] * n as f64 - k[p] as f64) * if up { 1.0 } else { -1.0 };
                            gap(a).total_cmp(&gap(b))
                        })
                        .expect("room to adjust");
                    if up {
                        k[p] += 1;
                    } else {
                        k[p] -= 1;
                    }
                }
                out.insert(c, k);
            }
            out
        };
        let std_at = |beta: f64| pop_std(&pooled(&build(beta)));
        let (mut lo, mut hi) = (0.0, 1.0);
        let (s_lo, s_hi) = (std_at(lo), std_at(hi));
        if !(s_lo < OVERALL_ACCURACY.1 && OVERALL_ACCURACY.1 < s_hi) {
            continue;
        }
        for _ in 0..50 {
            let mid = (lo + hi) / 2.0;
            if std_at(mid) < OVERALL_ACCURACY.1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut counts = build(lo);
        // nudge single records between prompts of large classes
        for _ in 0..10_000 {
            let s = pop_std(&pooled(&counts));
            if (s - OVERALL_ACCURACY.1).abs() < 1e-4 {
                return counts;
            }
            let acc = pooled(&counts);
            let (top, bottom) = {
                let mut order: Vec<usize> = (0..prompts).collect();
                order.sort_by(|&a, &b| acc[a].total_cmp(&acc[b]));
                (order[prompts - 1], order[0])
            };
            let class = [AdjectiveClass::Able, AdjectiveClass::Al, AdjectiveClass::Ic][rng.random_range(0..3)];
            let n = sizes[&class];
            let k = counts.get_mut(&class).expect("class present");
            if s > OVERALL_ACCURACY.1 {
                if k[top] > 0 && k[bottom] < n {
                    k[top] -= 1;
                    k[bottom] += 1;
                }
            } else if k[bottom] > 0 && k[top] < n {
                k[bottom] -= 1;
                k[top] += 1;
            }
        }
    }
}

/// Seen-word probe records.
pub fn build_seen(lexicon: &[LexiconEntry], rng: &mut ChaCha8Rng) -> Vec<ProbeRecord> {
    let prompts = prompt_ids();
    let np = prompts.len();
    let bounds = BucketBounds::default();
    let subset = sample_subset(lexicon, rng);
    let sizes: BTreeMap<AdjectiveClass, usize> = subset.iter().map(|(c, v)| (*c, v.len())).collect();
    let counts = correct_counts(&sizes, np, rng);

    let bases: BTreeMap<AdjectiveClass, Vec<SeenBase>> = subset
        .iter()
        .map(|(c, v)| {
            let list = v
                .iter()
                .map(|e| {
                    let preferred = e.preferred().expect("subset bases have a preferred derivative");
                    let f = e.count(preferred) as f64;
                    // rare derivatives are harder
                    SeenBase { entry: e, preferred, bucket: bucket_of(e, bounds), difficulty: -0.35 * (1.0 + f).ln() + normal(rng) }
                })
                .collect();
            (*c, list)
        })
        .collect();

    // class-ratio correlation target per prompt
    let mut w = loop {
        let mut w = normals(rng, np);
        standardize(&mut w);
        if w.iter().all(|x| RATIO_R.0 + RATIO_R.1 * x < 0.9995) {
            break w;
        }
    };
    standardize(&mut w);
    let train = lexicon_ratios(lexicon);
    let ness_pref: BTreeMap<AdjectiveClass, usize> =
        bases.iter().map(|(c, v)| (*c, v.iter().filter(|b| b.preferred == SuffixChoice::Ness).count())).collect();
    let split = |c: AdjectiveClass, errors: usize, lambda: f64| -> (usize, usize) {
        let pn = ness_pref[&c];
        let pi = sizes[&c] - pn;
        let mut en = ((lambda * errors as f64).round() as usize).min(pn);
        if errors - en > pi {
            en = errors - pi;
        }
        (en, errors - en)
    };
    let ratio_r = |p: usize, lambda: f64| -> f64 {
        let (x, y): (Vec<f64>, Vec<f64>) = sizes
            .keys()
            .map(|&c| {
                let (en, ei) = split(c, sizes[&c] - counts[&c][p], lambda);
                let ratio = (ness_pref[&c] - en + ei) as f64 / sizes[&c] as f64;
                (train[&c], ratio)
            })
            .unzip();
        pearson(&x, &y)
    };
    let lambdas: Vec<f64> = (0..np)
        .map(|p| {
            let want = RATIO_R.0 + RATIO_R.1 * w[p];
            (0..=2000).map(|i| i as f64 / 2000.0).min_by(|&a, &b| (ratio_r(p, a) - want).abs().total_cmp(&(ratio_r(p, b) - want).abs())).expect("grid")
        })
        .collect();

    // relative confidence increase per (class, prompt), correlated with entropy
    let entropy = class_entropy(lexicon).expect("lexicon has preferred derivatives");
    let classes: Vec<AdjectiveClass> = sizes.keys().copied().collect();
    let xs: Vec<f64> = classes.iter().flat_map(|c| std::iter::repeat_n(entropy[c], np)).collect();
    let rho = ENTROPY_R2.sqrt();
    let increase = loop {
        let mut e = normals(rng, xs.len());
        orthogonalize(&mut e, &[&xs]);
        let mut xt = xs.clone();
        standardize(&mut xt);
        let r: Vec<f64> = xt.iter().zip(&e).map(|(x, e)| 50.0 + 15.0 * (rho * x + (1.0 - rho * rho).sqrt() * e)).collect();
        if r.iter().all(|v| *v > 5.0) {
            break r;
        }
    };
    let low_base: BTreeMap<AdjectiveClass, f64> = classes.iter().map(|c| (*c, uniform(rng, 1.2, 3.0))).collect();

    let mut out = Vec::new();
    for (ci, &class) in classes.iter().enumerate() {
        let list = &bases[&class];
        for (p, prompt) in prompts.iter().enumerate() {
            let (en, ei) = split(class, sizes[&class] - counts[&class][p], lambdas[p]);
            let mut wrong = vec![false; list.len()];
            for (choice, k) in [(SuffixChoice::Ness, en), (SuffixChoice::Ity, ei)] {
                let mut ranked: Vec<(f64, usize)> = list
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| b.preferred == choice)
                    .map(|(i, b)| (b.difficulty + 0.8 * normal(rng), i))
                    .collect();
                ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
                for &(_, i) in ranked.iter().take(k) {
                    wrong[i] = true;
                }
            }
            let d_low = low_base[&class] * (1.0 + 0.15 * normal(rng)).max(0.5);
            let d_high = d_low * (1.0 + increase[ci * np + p] / 100.0);
            let prompt_level = -2.0 * p as f64 / np as f64;
            let mut margins: Vec<f64> = list.iter().map(|_| (0.4 + 0.6 * normal(rng)).exp()).collect();
            for (bucket, target) in [(Bucket::Low, d_low), (Bucket::High, d_high)] {
                let cell: Vec<usize> = (0..list.len()).filter(|&i| list[i].bucket == Some(bucket)).collect();
                let err: f64 = cell.iter().filter(|&&i| wrong[i]).map(|&i| margins[i]).sum();
                let ok: f64 = cell.iter().filter(|&&i| !wrong[i]).map(|&i| margins[i]).sum();
                assert!(ok > 0.0, "{class}/{prompt}: no correct records in a frequency bucket");
                let scale = (target * cell.len() as f64 + err) / ok;
                for &i in cell.iter().filter(|&&i| !wrong[i]) {
                    margins[i] *= scale;
                }
            }
            for (i, b) in list.iter().enumerate() {
                let win = if wrong[i] { b.preferred.other() } else { b.preferred };
                let f = b.entry.count(b.preferred) as f64;
                let level = -4.0 - 14.0 / (1.0 + 0.25 * (1.0 + f).ln()) + prompt_level - uniform(rng, 0.0, 3.0);
                out.push(record(&b.entry.base, prompt, win, margins[i], level));
            }
        }
    }
    out
}

pub fn verify_seen(lexicon: &[LexiconEntry], records: &[ProbeRecord], checks: &mut Checks) {
    let reference: Reference = preferred_reference(lexicon);
    let overall = accuracy(records, &reference).expect("records are covered");
    checks.check("seen accuracy mean", overall.mean, OVERALL_ACCURACY.0, 5e-4);
    checks.check("seen accuracy std", overall.std, OVERALL_ACCURACY.1, 5e-4);
    let by_class = accuracy_by_class(records, &reference).expect("records are covered");
    for (c, m, s) in CLASS_ACCURACY {
        checks.check(&format!("seen {c} {} accuracy mean", c.suffix()), by_class[&c].mean, m, 5e-4);
        checks.check(&format!("seen {c} {} accuracy std", c.suffix()), by_class[&c].std, s, 0.01);
    }
    let r = class_ratio_correlation(records, lexicon).expect("ratios defined");
    checks.check("class-ratio r mean", r.mean_r, RATIO_R.0, 5e-4);
    checks.check("class-ratio r std", r.std_r, RATIO_R.1, 5e-4);
    let buckets = frequency_buckets(lexicon, records, BucketBounds::default()).expect("buckets");
    checks.check("bucket points", buckets.points.len() as f64, 120.0, 0.0);
    let positive = buckets.points.iter().filter(|p| p.relative_increase > 0.0).count();
    checks.check("positive relative increases", positive as f64, buckets.points.len() as f64, 0.0);
    let corr = entropy_confidence_correlation(lexicon, &buckets).expect("correlation");
    checks.check("entropy-confidence r²", corr.r_squared(), ENTROPY_R2, 0.005);
}

/// Nonce probe records agreeing with the human majority at the target rates.
pub fn build_nonce(nonces: &[Base], human: &HumanSummary, rng: &mut ChaCha8Rng) -> Vec<ProbeRecord> {
    let prompts = prompt_ids();
    let np = prompts.len();
    let mut out = Vec::new();
    for (class, rate) in NONCE_AGREEMENT {
        let items: Vec<&Base> = nonces.iter().filter(|b| b.class() == class).collect();
        let cells = items.len() * np;
        let errors = cells - (rate * cells as f64).round() as usize;
        let prompt_bias = normals(rng, np);
        let mut wrong = vec![false; cells];
        if class == AdjectiveClass::Ish {
            assert_eq!(errors, ISH_MISSES.len());
            for (k, miss) in ISH_MISSES.iter().enumerate() {
                let i = items.iter().position(|b| b.form() == *miss).expect("listed -ish nonce");
                wrong[i * np + (3 + 5 * k) % np] = true;
            }
        } else {
            // items the annotators split on are the ones the model gets wrong more
            let mut ranked: Vec<(f64, usize)> = (0..cells)
                .map(|cell| {
                    let split = 1.0 - (human.item_ness_ratio[items[cell / np]] - 0.5).abs() * 2.0;
                    (split + 0.5 * prompt_bias[cell % np] + normal(rng), cell)
                })
                .collect();
            ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
            for &(_, cell) in ranked.iter().take(errors) {
                wrong[cell] = true;
            }
        }
        for (i, base) in items.iter().enumerate() {
            let majority = human.majority[*base];
            let level = -24.0 - uniform(rng, 0.0, 8.0);
            for (p, prompt) in prompts.iter().enumerate() {
                let win = if wrong[i * np + p] { majority.other() } else { majority };
                let margin = (0.2 + 0.7 * normal(rng)).exp();
                out.push(record(base, prompt, win, margin, level - p as f64 * 0.15 + 0.3 * normal(rng)));
            }
        }
    }
    out
}

pub fn verify_nonce(records: &[ProbeRecord], human: &HumanSummary, checks: &mut Checks) {
    let by_class = accuracy_by_class(records, &human.reference()).expect("nonces are annotated");
    for (class, rate) in NONCE_AGREEMENT {
        checks.check(&format!("nonce {} agreement with humans", class.suffix()), by_class[&class].mean, rate, 5e-4);
    }
}

/// Forced-choice preferences agreeing with the human majority on the
/// target number of items.
pub fn build_preferences(nonces: &[Base], human: &HumanSummary, rng: &mut ChaCha8Rng) -> Vec<PreferenceRecord> {
    let mut out = Vec::new();
    for (class, agree) in PREFERENCE_AGREEMENT {
        let items: Vec<&Base> = nonces.iter().filter(|b| b.class() == class).collect();
        let mut ranked: Vec<(f64, usize)> = items
            .iter()
            .enumerate()
            .map(|(i, b)| (1.0 - (human.item_ness_ratio[*b] - 0.5).abs() * 2.0 + normal(rng), i))
            .collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
        let flipped: HashSet<usize> = ranked.iter().take(items.len() - agree).map(|&(_, i)| i).collect();
        for (i, base) in items.iter().enumerate() {
            let majority = human.majority[*base];
            out.push(PreferenceRecord {
                base: (*base).clone(),
                choice: if flipped.contains(&i) { majority.other() } else { majority },
                model_id: PREFERENCE_MODEL_ID.to_owned(),
            });
        }
    }
    out
}

pub fn verify_preferences(records: &[PreferenceRecord], human: &HumanSummary, checks: &mut Checks) {
    for (class, agree) in PREFERENCE_AGREEMENT {
        let got = records.iter().filter(|r| r.base.class() == class && human.majority[&r.base] == r.choice).count();
        checks.check(&format!("preference {} agreement", class.suffix()), got as f64, agree as f64, 0.0);
    }
}
