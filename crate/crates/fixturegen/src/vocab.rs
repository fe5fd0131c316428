use nomlab::eval::{bundled_prompts, familiarity_analysis, PromptKind, VocabRecord, FAMILIARITY_MAX_FREQUENCY};
use nomlab::morphlex::{parse_word, AffixInventory, DEFAULT_MAX_DEPTH};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::util::{mean, normal, round_to, shuffled, standardize};
use crate::Checks;

pub const LOW_COMPLEX: usize = 1_005;
pub const LOW_SIMPLEX: usize = 1_830;
pub const HIGH_COMPLEX: usize = 5_494;
pub const HIGH_SIMPLEX: usize = 10_991;
/// Token totals of the rare complex and simplex words.
const LOW_TOKENS: (u64, u64) = (4_114_168, 7_841_733);

/// Welch t and df of complex minus simplex among rare words.
pub const FAMILIARITY_T: (f64, f64) = (19.2, 2120.2);
pub const LOGP_T: (f64, f64) = (-4.9, 2285.9);
/// R² of each measure regressed on ln frequency over all words.
pub const FAMILIARITY_R2: f64 = 0.368;
pub const LOGP_R2: f64 = 0.752;

/// Ratio of group variances (complex over simplex) giving Welch df `df`,
/// taking the root where the complex group is the less variable one.
fn variance_ratio(na: usize, nb: usize, df: f64) -> f64 {
    let (na, nb) = (na as f64, nb as f64);
    let df_at = |x: f64| (x + 1.0).powi(2) / (x * x / (na - 1.0) + 1.0 / (nb - 1.0));
    let (mut lo, mut hi) = (1e-9, (na - 1.0) / (nb - 1.0));
    assert!(df_at(lo) < df && df < df_at(hi), "df {df} is out of reach");
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if df_at(mid) < df {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // x is the ratio of squared standard errors
    lo * na / nb
}

fn affine_to(xs: &mut [f64], m: f64, sd: f64) {
    standardize(xs);
    let n = xs.len() as f64;
    // standardize uses the population sd; Welch uses the sample sd
    let scale = sd * ((n - 1.0) / n).sqrt();
    xs.iter_mut().for_each(|x| *x = m + scale * *x);
}

/// Rare-word values with a within-group frequency trend, transformed to the
/// group means and sample sds implied by `t`, `df` and the simplex moments.
fn rare_groups(lnf: (&[f64], &[f64]), slope: f64, noise: f64, simplex: (f64, f64), t: (f64, f64), rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let (na, nb) = (lnf.0.len(), lnf.1.len());
    let q = variance_ratio(na, nb, t.1);
    let sd_a = simplex.1 * q.sqrt();
    let se = (sd_a * sd_a / na as f64 + simplex.1 * simplex.1 / nb as f64).sqrt();
    let mean_a = simplex.0 + t.0 * se;
    let mut draw = |lnf: &[f64]| -> Vec<f64> { lnf.iter().map(|l| slope * l.max(6.0) + noise * bounded(rng)).collect() };
    let mut a = draw(lnf.0);
    let mut b = draw(lnf.1);
    affine_to(&mut a, mean_a, sd_a);
    affine_to(&mut b, simplex.0, simplex.1);
    (a, b)
}

/// Sum of three uniforms on [-1, 1]: bell-shaped but bounded.
fn bounded(rng: &mut ChaCha8Rng) -> f64 {
    (0..3).map(|_| rng.random_range(-1.0f64..1.0)).sum()
}

fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    nomlab::stats::pearson_r(x, y).map(|c| c.r * c.r).unwrap_or(0.0)
}

/// Frequent-word values `a + b·ln f + σe`, with σ bisected so that the
/// regression over all words reaches `r2`.
fn frequent(lnf_high: &[f64], lnf_low: &[f64], low: &[f64], line: (f64, f64), clamp: Option<(f64, f64)>, r2: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let e: Vec<f64> = lnf_high.iter().map(|_| normal(rng)).collect();
    let make = |sigma: f64| -> Vec<f64> {
        lnf_high
            .iter()
            .zip(&e)
            .map(|(l, e)| {
                let v = line.0 + line.1 * l + sigma * e;
                clamp.map_or(v, |(lo, hi)| v.clamp(lo, hi))
            })
            .collect()
    };
    let x: Vec<f64> = lnf_low.iter().chain(lnf_high).copied().collect();
    let fit = |sigma: f64| -> f64 {
        let y: Vec<f64> = low.iter().copied().chain(make(sigma)).collect();
        r_squared(&x, &y)
    };
    let (mut lo, mut hi) = (0.0, 20.0);
    assert!(fit(lo) > r2 && fit(hi) < r2, "R² {r2} is out of reach ({} .. {})", fit(lo), fit(hi));
    for _ in 0..100 {
        let mid = (lo + hi) / 2.0;
        if fit(mid) > r2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    make(lo)
}

/// Integer frequencies below 10,000 summing to `total`.
fn rare_frequencies(n: usize, total: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let cap = FAMILIARITY_MAX_FREQUENCY - 1;
    let u: Vec<f64> = (0..n).map(|_| rng.random_range(0.0f64..1.0)).collect();
    let at = |g: f64| -> Vec<u64> { u.iter().map(|u| ((cap as f64 * u.powf(g)).ceil() as u64).clamp(1, cap)).collect() };
    let (mut lo, mut hi) = (0.01, 20.0);
    for _ in 0..100 {
        let mid = (lo + hi) / 2.0;
        if at(mid).iter().sum::<u64>() > total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut f = at(lo);
    let mut i = 0;
    while f.iter().sum::<u64>() != total {
        let k = i % n;
        if f.iter().sum::<u64>() > total {
            if f[k] > 1 {
                f[k] -= 1;
            }
        } else if f[k] < cap {
            f[k] += 1;
        }
        i += 1;
    }
    f
}

struct Word {
    word: String,
    frequency: u64,
    complex: bool,
    familiarity: f64,
    logp: f64,
}

/// Vocabulary-test records for real words of the bundled word list.
pub fn build(words: &[String], rng: &mut ChaCha8Rng) -> Vec<VocabRecord> {
    let inventory = AffixInventory::bundled();
    let mut complex = Vec::new();
    let mut simplex = Vec::new();
    for w in shuffled(words, rng) {
        if !(4..=12).contains(&w.len()) || !w.bytes().all(|b| b.is_ascii_lowercase()) {
            continue;
        }
        let is_complex = parse_word(&w, inventory, DEFAULT_MAX_DEPTH).is_complex;
        let (list, want) = if is_complex { (&mut complex, LOW_COMPLEX + HIGH_COMPLEX) } else { (&mut simplex, LOW_SIMPLEX + HIGH_SIMPLEX) };
        if list.len() < want {
            list.push(w);
        }
        if complex.len() == LOW_COMPLEX + HIGH_COMPLEX && simplex.len() == LOW_SIMPLEX + HIGH_SIMPLEX {
            break;
        }
    }
    assert_eq!(complex.len() + simplex.len(), LOW_COMPLEX + HIGH_COMPLEX + LOW_SIMPLEX + HIGH_SIMPLEX, "word list too small");

    let f_ca = rare_frequencies(LOW_COMPLEX, LOW_TOKENS.0, rng);
    let f_sa = rare_frequencies(LOW_SIMPLEX, LOW_TOKENS.1, rng);
    let high: Vec<u64> = (0..HIGH_COMPLEX + HIGH_SIMPLEX)
        .map(|_| {
            let l = (FAMILIARITY_MAX_FREQUENCY as f64).ln() - 1.3 * (1.0 - rng.random_range(0.0f64..1.0)).ln();
            (l.min(19.0).exp().round() as u64).max(FAMILIARITY_MAX_FREQUENCY)
        })
        .collect();
    let ln = |f: &[u64]| f.iter().map(|&f| (f as f64).ln()).collect::<Vec<f64>>();
    let (l_ca, l_sa, l_high) = (ln(&f_ca), ln(&f_sa), ln(&high));

    let (fam_c, fam_s) = rare_groups((&l_ca, &l_sa), 0.3, 0.5, (3.7, 0.6), FAMILIARITY_T, rng);
    let (lp_c, lp_s) = rare_groups((&l_ca, &l_sa), 1.2, 0.9, (-15.0, 2.2), LOGP_T, rng);
    let l_low: Vec<f64> = l_ca.iter().chain(&l_sa).copied().collect();
    let fam_low: Vec<f64> = fam_c.iter().chain(&fam_s).copied().collect();
    let lp_low: Vec<f64> = lp_c.iter().chain(&lp_s).copied().collect();
    let fam_line = (mean(&fam_low) - 0.3 * mean(&l_low), 0.3);
    let fam_high = frequent(&l_high, &l_low, &fam_low, fam_line, Some((1.0, 7.0)), FAMILIARITY_R2, rng);
    let lp_line = (mean(&lp_low) - 1.2 * mean(&l_low), 1.2);
    let lp_high = frequent(&l_high, &l_low, &lp_low, lp_line, None, LOGP_R2, rng);

    let mut all: Vec<Word> = Vec::new();
    let mut push = |word: &String, frequency: u64, complex: bool, familiarity: f64, logp: f64| {
        all.push(Word { word: word.clone(), frequency, complex, familiarity, logp });
    };
    for i in 0..LOW_COMPLEX {
        push(&complex[i], f_ca[i], true, fam_c[i], lp_c[i]);
    }
    for i in 0..LOW_SIMPLEX {
        push(&simplex[i], f_sa[i], false, fam_s[i], lp_s[i]);
    }
    for i in 0..HIGH_COMPLEX + HIGH_SIMPLEX {
        let (word, is_c) = if i < HIGH_COMPLEX { (&complex[LOW_COMPLEX + i], true) } else { (&simplex[LOW_SIMPLEX + i - HIGH_COMPLEX], false) };
        push(word, high[i], is_c, fam_high[i], lp_high[i]);
    }
    all.sort_by(|a, b| a.word.cmp(&b.word));

    let prompts: Vec<String> = bundled_prompts().into_iter().filter(|p| p.kind == PromptKind::Vocab).map(|p| p.id).collect();
    let offsets: Vec<f64> = (0..prompts.len()).map(|i| -0.4 * i as f64).collect();
    let offset_mean = mean(&offsets);
    let mut out = Vec::with_capacity(all.len() * prompts.len());
    for w in &all {
        assert!((1.0..=7.0).contains(&w.familiarity), "familiarity {} of {} is out of range", w.familiarity, w.word);
        let mut jitter: Vec<f64> = prompts.iter().map(|_| 0.3 * normal(rng)).collect();
        let jm = mean(&jitter);
        jitter.iter_mut().for_each(|j| *j -= jm);
        for (p, prompt) in prompts.iter().enumerate() {
            out.push(VocabRecord {
                word: w.word.clone(),
                prompt_id: prompt.clone(),
                logp: round_to(w.logp + offsets[p] - offset_mean + jitter[p], 3),
                frequency: w.frequency,
                familiarity: round_to(w.familiarity, 2),
                is_complex: w.complex,
            });
        }
    }
    out
}

pub fn verify(records: &[VocabRecord], checks: &mut Checks) {
    let r = familiarity_analysis(records, FAMILIARITY_MAX_FREQUENCY).expect("vocab records are well formed");
    checks.check("rare complex words", r.n_complex as f64, LOW_COMPLEX as f64, 0.0);
    checks.check("rare simplex words", r.n_simplex as f64, LOW_SIMPLEX as f64, 0.0);
    checks.check("familiarity t", r.familiarity_t.t, FAMILIARITY_T.0, 0.01 * FAMILIARITY_T.0.abs());
    checks.check("familiarity df", r.familiarity_t.df, FAMILIARITY_T.1, 0.01 * FAMILIARITY_T.1);
    checks.check("logp t", r.logp_t.t, LOGP_T.0, 0.01 * LOGP_T.0.abs());
    checks.check("logp df", r.logp_t.df, LOGP_T.1, 0.01 * LOGP_T.1);
    checks.check("familiarity R²", r.familiarity_fit.r_squared, FAMILIARITY_R2, 0.005);
    checks.check("logp R²", r.logp_fit.r_squared, LOGP_R2, 0.005);
}
