use std::io::Write as _;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use super::report::{analyze, emit_report, Manifest, ReportInputs};
use super::*;

fn base(s: &str) -> Base {
    Base::parse(s).unwrap()
}

fn probe(b: &str, prompt: &str, ity: f64, ness: f64) -> ProbeRecord {
    ProbeRecord { base: base(b), prompt_id: prompt.into(), logp_ity: ity, logp_ness: ness, model_id: "m".into() }
}

fn entry(b: &str, ity: u64, ness: u64) -> LexiconEntry {
    LexiconEntry { base: base(b), base_count: 10, ity_count: ity, ness_count: ness }
}

fn refmap(pairs: &[(&str, SuffixChoice)]) -> Reference {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn ann(item: &str, who: &str, c: SuffixChoice) -> AnnotationRecord {
    AnnotationRecord { item: base(item), annotator_id: who.into(), choice: c }
}

use SuffixChoice::{Ity, Ness};

#[test]
fn winner_breaks_ties_toward_ity() {
    assert_eq!(winner(&probe("readable", "p", -1.0, -2.0)), Ity);
    assert_eq!(winner(&probe("readable", "p", -2.0, -1.0)), Ness);
    assert_eq!(winner(&probe("readable", "p", -1.0, -1.0)), Ity);
}

#[test]
fn accuracy_averages_over_prompts_not_records() {
    // p1: 1 of 1 correct, p2: 1 of 3 correct. Pooled would be 2/4.
    let r = refmap(&[("readable", Ity), ("foolish", Ness), ("boyish", Ness)]);
    let recs = vec![
        probe("readable", "p1", -1.0, -3.0),
        probe("readable", "p2", -1.0, -3.0),
        probe("foolish", "p2", -1.0, -3.0),
        probe("boyish", "p2", -1.0, -3.0),
    ];
    let s = accuracy(&recs, &r).unwrap();
    assert_abs_diff_eq!(s.mean, (1.0 + 1.0 / 3.0) / 2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(s.std, (1.0 - 1.0 / 3.0) / 2.0, epsilon = 1e-12);
    assert_eq!(s.per_prompt.iter().map(|p| p.n).collect::<Vec<_>>(), vec![1, 3]);
}

#[test]
fn accuracy_rejects_missing_labels_and_mixed_models() {
    let recs = vec![probe("readable", "p", -1.0, -2.0)];
    assert!(accuracy(&recs, &Reference::new()).is_err());
    let mut other = probe("readable", "q", -1.0, -2.0);
    other.model_id = "n".into();
    let both = vec![recs[0].clone(), other];
    assert!(accuracy(&both, &refmap(&[("readable", Ity)])).is_err());
}

#[test]
fn references_follow_lexicon_counts() {
    let lex = vec![entry("readable", 5, 1), entry("foolish", 0, 7), entry("sizable", 0, 0), entry("porous", 3, 3)];
    let p = preferred_reference(&lex);
    assert_eq!(p.get("readable"), Some(&Ity));
    assert_eq!(p.get("foolish"), Some(&Ness));
    assert!(!p.contains_key("sizable"));
    let only = attested_only_reference(&lex);
    assert_eq!(only.len(), 1);
    assert_eq!(only.get("foolish"), Some(&Ness));
}

#[test]
fn delta_favours_the_attested_form() {
    let r = probe("readable", "p", -2.0, -5.0);
    assert_abs_diff_eq!(delta(&r, Ity), 3.0);
    assert_abs_diff_eq!(delta(&r, Ness), -3.0);
    assert_abs_diff_eq!(nats_to_log10(LN_10), 1.0, epsilon = 1e-15);
}

#[test]
fn buckets_use_single_attestation_only() {
    let lex = vec![
        entry("readable", 3, 0),   // low ITY
        entry("capable", 500, 0),  // high ITY
        entry("portable", 500, 2), // both attested: ignored
        entry("sizable", 50, 0),   // between bands: ignored
    ];
    let recs = vec![
        probe("readable", "p", -1.0, -2.0),
        probe("capable", "p", -1.0, -4.0),
        probe("portable", "p", -1.0, -100.0),
        probe("sizable", "p", -1.0, -100.0),
    ];
    let b = frequency_buckets(&lex, &recs, BucketBounds::default()).unwrap();
    assert_eq!(b.points.len(), 1);
    let p = &b.points[0];
    assert_eq!((p.n_low, p.n_high), (1, 1));
    assert_abs_diff_eq!(p.delta_low, 1.0);
    assert_abs_diff_eq!(p.delta_high, 3.0);
    assert_abs_diff_eq!(p.relative_increase, 200.0);
    assert!(frequency_buckets(&lex, &recs, BucketBounds { low_max: 200, high_min: 100 }).is_err());
}

#[test]
fn buckets_report_missing_bands() {
    let lex = vec![entry("readable", 3, 0)];
    let b = frequency_buckets(&lex, &[probe("readable", "p", -1.0, -2.0)], BucketBounds::default()).unwrap();
    assert!(b.points.is_empty());
    assert_eq!(b.excluded.len(), 1);
}

#[test]
fn entropy_of_preferred_distribution() {
    let lex = vec![entry("readable", 3, 0), entry("capable", 0, 4), entry("foolish", 0, 1), entry("boyish", 0, 9)];
    let h = class_entropy(&lex).unwrap();
    assert_abs_diff_eq!(h[&AdjectiveClass::Able], 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(h[&AdjectiveClass::Ish], 0.0, epsilon = 1e-12);
}

#[test]
fn class_ratio_correlation_matches_hand_computation() {
    let lex = vec![
        entry("readable", 3, 0),
        entry("capable", 3, 0),
        entry("foolish", 0, 1),
        entry("boyish", 0, 1),
        entry("porous", 1, 0),
        entry("famous", 0, 1),
    ];
    // probe gets -able and -ish right, flips famous
    let recs = vec![
        probe("readable", "p", -1.0, -2.0),
        probe("capable", "p", -1.0, -2.0),
        probe("foolish", "p", -2.0, -1.0),
        probe("boyish", "p", -2.0, -1.0),
        probe("porous", "p", -1.0, -2.0),
        probe("famous", "p", -1.0, -2.0),
    ];
    let c = class_ratio_correlation(&recs, &lex).unwrap();
    // lexicon ratios (able, ish, ous) = (0, 1, .5); probe = (0, 1, 0)
    let x = [0.0, 1.0, 0.5];
    let y = [0.0, 1.0, 0.0];
    assert_abs_diff_eq!(c.mean_r, pearson_r(&x, &y).unwrap().r, epsilon = 1e-12);
    assert_abs_diff_eq!(c.mean_r, 0.866_025_403_784_438_6, epsilon = 1e-12);
    assert_eq!(c.std_r, 0.0);
}

#[test]
fn human_majority_with_tie() {
    let a = vec![
        ann("rebelorous", "a", Ness),
        ann("rebelorous", "b", Ness),
        ann("rebelorous", "c", Ness),
        ann("indaminous", "a", Ity),
        ann("indaminous", "b", Ness),
        ann("indaminous", "c", Ity),
        ann("prienish", "a", Ness),
        ann("prienish", "b", Ity),
    ];
    let h = human_majority(&a).unwrap();
    assert_eq!(h.majority[&base("rebelorous")], Ness);
    assert_eq!(h.majority[&base("indaminous")], Ity);
    assert_eq!(h.majority[&base("prienish")], Ity);
    assert_eq!(h.ties, vec![base("prienish")]);
    assert_abs_diff_eq!(h.item_ness_ratio[&base("indaminous")], 1.0 / 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(h.annotator_ness_ratio["b"][&AdjectiveClass::Ous], 1.0);
    assert_abs_diff_eq!(h.annotator_ness_ratio["a"][&AdjectiveClass::Ous], 0.5);
    assert_eq!(h.items_of(AdjectiveClass::Ous).len(), 2);
}

#[test]
fn annotator_agreement_matches_direct_statistics() {
    let a = vec![
        ann("rebelorous", "a", Ness),
        ann("rebelorous", "b", Ness),
        ann("indaminous", "a", Ity),
        ann("indaminous", "b", Ness),
        ann("prienish", "a", Ness),
        ann("prienish", "b", Ness),
        ann("turgeish", "a", Ness),
        ann("turgeish", "b", Ness),
    ];
    let s = annotator_agreement(&a).unwrap();
    let m = RatingMatrix::new(vec![vec![1, 1], vec![0, 2], vec![0, 2], vec![0, 2]]).unwrap();
    assert_abs_diff_eq!(s.fleiss_kappa, fleiss_kappa(&m).unwrap(), epsilon = 1e-12);
    // unanimous -ish: AC1 is 1, kappa undefined
    assert_abs_diff_eq!(s.ac1_by_class[&AdjectiveClass::Ish], 1.0, epsilon = 1e-12);
    assert!(!s.kappa_by_class.contains_key(&AdjectiveClass::Ish));
}

#[test]
fn model_agreement_flags_the_best_model() {
    let mut recs = Vec::new();
    let mut good = Reference::new();
    let mut bad = Reference::new();
    let nonces = ["adorous", "banous", "cimous", "dorous", "elous", "famous", "gamous", "hilous", "imous", "jorous", "kelous", "lumous"];
    for (i, n) in nonces.iter().enumerate() {
        for p in ["p1", "p2"] {
            recs.push(probe(n, p, -1.0, -2.0));
        }
        good.insert(n.to_string(), Ity);
        bad.insert(n.to_string(), if i < 2 { Ity } else { Ness });
    }
    let models = vec![
        ModelPredictions { name: "bad".into(), predictions: bad },
        ModelPredictions { name: "good".into(), predictions: good },
    ];
    let rows = model_agreement(&recs, &models).unwrap();
    assert_eq!(rows.len(), 1);
    let cells = &rows[0].cells;
    assert!(cells[1].best && !cells[0].best);
    assert_abs_diff_eq!(cells[1].mean, 1.0);
    assert_abs_diff_eq!(cells[0].mean, 2.0 / 12.0, epsilon = 1e-12);
    // 20 discordant pairs all one way
    assert_abs_diff_eq!(cells[0].p_vs_best.unwrap(), 2.0 * 0.5f64.powi(20), epsilon = 1e-15);
    assert!(cells[0].significantly_worse);
    assert_eq!(cells[1].p_vs_best, None);
}

#[test]
fn preference_reference_rejects_duplicates() {
    let r = PreferenceRecord { base: base("readable"), choice: Ity, model_id: "g".into() };
    assert_eq!(preference_reference(std::slice::from_ref(&r)).unwrap().len(), 1);
    assert!(preference_reference(&[r.clone(), r]).is_err());
}

fn vocab(word: &str, prompt: &str, logp: f64, f: u64, fam: f64, complex: bool) -> VocabRecord {
    VocabRecord { word: word.into(), prompt_id: prompt.into(), logp, frequency: f, familiarity: fam, is_complex: complex }
}

#[test]
fn vocab_words_average_prompts() {
    let r = vec![vocab("darkness", "v1", -4.0, 10, 6.0, true), vocab("darkness", "v2", -6.0, 10, 6.0, true)];
    let w = vocab_words(&r).unwrap();
    assert_eq!(w.len(), 1);
    assert_abs_diff_eq!(w[0].logp, -5.0);
    let bad = vec![r[0].clone(), vocab("darkness", "v2", -6.0, 11, 6.0, true)];
    assert!(vocab_words(&bad).is_err());
}

#[test]
fn familiarity_splits_by_frequency() {
    let mut r = Vec::new();
    let words = [
        ("darkness", 50u64, 6.0, true, -8.0),
        ("kindness", 80, 6.5, true, -7.0),
        ("oddity", 20, 5.0, true, -9.0),
        ("table", 60, 6.9, false, -6.0),
        ("chair", 40, 6.8, false, -6.5),
        ("stone", 30, 6.2, false, -7.5),
        ("water", 20_000, 7.0, false, -4.0),
    ];
    for (w, f, fam, c, lp) in words {
        r.push(vocab(w, "v1", lp, f, fam, c));
    }
    let rep = familiarity_analysis(&r, FAMILIARITY_MAX_FREQUENCY).unwrap();
    assert_eq!((rep.n_words, rep.n_complex, rep.n_simplex), (7, 3, 3));
    let t = welch_t(&[6.0, 6.5, 5.0], &[6.9, 6.8, 6.2]).unwrap();
    assert_abs_diff_eq!(rep.familiarity_t.t, t.t, epsilon = 1e-12);
    assert_eq!(rep.logp_fit.n, 7);
    assert_abs_diff_eq!(rep.mean_frequency_simplex, 130.0 / 3.0, epsilon = 1e-12);
}

#[test]
fn jsonl_round_trip_and_validation() {
    let recs = vec![probe("readable", "p01", -1.5, -2.25)];
    let body = write_jsonl(&recs);
    assert_eq!(
        body,
        "{\"base\":\"readable\",\"prompt_id\":\"p01\",\"logp_ity\":-1.5,\"logp_ness\":-2.25,\"model_id\":\"m\"}\n"
    );
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.jsonl");
    std::fs::write(&path, &body).unwrap();
    assert_eq!(read_jsonl::<ProbeRecord>(&path).unwrap(), recs);

    let gz = dir.path().join("p.jsonl.gz");
    let mut enc = flate2::write::GzEncoder::new(std::fs::File::create(&gz).unwrap(), flate2::Compression::default());
    enc.write_all(body.as_bytes()).unwrap();
    enc.finish().unwrap();
    assert_eq!(read_jsonl::<ProbeRecord>(&gz).unwrap(), recs);

    std::fs::write(&path, "{\"base\":\"readable\",\"prompt_id\":\"p\",\"logp_ity\":-1,\"logp_ness\":-2,\"model_id\":\"m\"}\n{\"base\":\"table\"}\n").unwrap();
    let err = read_jsonl::<ProbeRecord>(&path).unwrap_err().to_string();
    assert!(err.contains(":2"), "{err}");

    std::fs::write(&path, "{\"word\":\"dark\",\"prompt_id\":\"v\",\"logp\":-1,\"frequency\":3,\"familiarity\":9,\"is_complex\":false}\n").unwrap();
    assert!(read_jsonl::<VocabRecord>(&path).is_err());
}

#[test]
fn duplicate_probe_keys_are_rejected() {
    let r = probe("readable", "p", -1.0, -2.0);
    assert!(check_probes(std::slice::from_ref(&r)).is_ok());
    assert!(check_probes(&[r.clone(), r]).is_err());
}

#[test]
fn annotations_round_trip() {
    let a = vec![ann("indaminous", "s01", Ity), ann("prienish", "s02", Ness)];
    let body = write_annotations(&a);
    assert!(body.starts_with("item\tannotator_id\tchoice\nindaminous\ts01\tity\n"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.tsv");
    std::fs::write(&path, body).unwrap();
    assert_eq!(read_annotations(&path).unwrap(), a);
    std::fs::write(&path, "indaminous\ts01\n").unwrap();
    assert!(read_annotations(&path).is_err());
}

#[test]
fn bases_tsv_lists_both_derivatives() {
    let t = bases_tsv(&[base("readable"), base("porous"), base("foolish")]);
    assert_eq!(
        t,
        "base\tclass\td_ity\td_ness\nreadable\table\treadability\treadableness\nporous\tous\tporosity\tporousness\nfoolish\tish\tfoolishity\tfoolishness\n"
    );
}

#[test]
fn bundled_prompts_are_unique_and_fill() {
    let p = bundled_prompts();
    assert_eq!(p.iter().filter(|t| t.kind == PromptKind::Nominalize).count(), 12);
    assert_eq!(p.iter().filter(|t| t.kind == PromptKind::Vocab).count(), 4);
    let ids: BTreeSet<&str> = p.iter().map(|t| t.id.as_str()).collect();
    assert_eq!(ids.len(), p.len());
    let t = p.iter().find(|t| t.id == "p09").unwrap();
    assert_eq!(t.fill("porous"), "Adjective: porous Nominalization:");
}

fn report_inputs() -> ReportInputs {
    let lexicon = vec![
        entry("readable", 3, 0),
        entry("capable", 500, 0),
        entry("portable", 2, 0),
        entry("sizable", 300, 0),
        entry("foolish", 0, 4),
        entry("boyish", 0, 400),
        entry("childish", 0, 2),
        entry("selfish", 0, 900),
        entry("porous", 0, 5),
        entry("famous", 0, 700),
        entry("curious", 9, 0),
        entry("generous", 200, 0),
    ];
    let mut seen = Vec::new();
    for (i, e) in lexicon.iter().enumerate() {
        let c = e.preferred().unwrap();
        for p in ["p01", "p02"] {
            let margin = if e.count(c) > 100 { 3.0 } else { 1.0 } + i as f64 * 0.01;
            let (ity, ness) = if c == Ity { (-1.0, -1.0 - margin) } else { (-1.0 - margin, -1.0) };
            seen.push(probe(e.base.form(), p, ity, ness));
        }
    }
    let nonces = ["indaminous", "rebelorous", "prienish", "turgeish"];
    let mut nonce_probes = Vec::new();
    for n in nonces {
        for p in ["p01", "p02"] {
            nonce_probes.push(probe(n, p, -2.0, -1.0));
        }
    }
    let mgl = ModelPredictions { name: "mgl_type".into(), predictions: nonces.iter().map(|n| (n.to_string(), Ness)).collect() };
    let gcm = ModelPredictions {
        name: "gcm_type".into(),
        predictions: refmap(&[("indaminous", Ity), ("rebelorous", Ness), ("prienish", Ness), ("turgeish", Ness)]),
    };
    let annotations = nonces
        .iter()
        .flat_map(|n| {
            ["s1", "s2", "s3"].into_iter().enumerate().map(move |(i, s)| ann(n, s, if *n == "indaminous" && i < 2 { Ity } else { Ness }))
        })
        .collect();
    let preferences = nonces.iter().map(|n| PreferenceRecord { base: base(n), choice: Ness, model_id: "g".into() }).collect();
    let vocab = [("darkness", 50u64, 6.0, true), ("oddity", 20, 5.0, true), ("kindness", 5, 5.5, true), ("table", 60, 6.9, false), ("chair", 40, 6.8, false), ("stone", 30, 6.2, false)]
        .into_iter()
        .flat_map(|(w, f, fam, c)| ["v01", "v02"].map(|p| vocab(w, p, -(fam), f, fam, c)))
        .collect();
    ReportInputs {
        lexicon: Some(lexicon),
        seen_probes: Some(seen),
        nonce_probes: Some(nonce_probes),
        models: vec![mgl, gcm],
        preferences: Some(preferences),
        annotations: Some(annotations),
        vocab: Some(vocab),
        bounds: BucketBounds::default(),
    }
}

#[test]
fn report_is_complete_and_deterministic() {
    let inputs = report_inputs();
    let a = analyze(&inputs).unwrap();
    let seen = a.seen.as_ref().unwrap();
    assert_abs_diff_eq!(seen.overall.mean, 1.0);
    assert_eq!(seen.buckets.points.len(), 2 * 3);
    assert!(seen.buckets.points.iter().all(|p| p.relative_increase > 100.0));
    let human = a.human.as_ref().unwrap();
    let table = human.table.as_ref().unwrap();
    assert_eq!(table.columns, vec!["mgl_type", "gcm_type", "preference", "probe"]);
    assert_eq!(table.rows[&AdjectiveClass::Ous], vec![Some(0.5), Some(1.0), Some(0.5), Some(0.5)]);

    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let m = Manifest { tool: "t".into(), ..Manifest::default() };
    let w1 = emit_report(&a, &inputs, m.clone(), d1.path()).unwrap();
    let w2 = emit_report(&analyze(&inputs).unwrap(), &inputs, m, d2.path()).unwrap();
    assert_eq!(w1.len(), w2.len());
    let names: BTreeSet<String> = w1.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    for want in [
        "table_si_derivative_statistics.csv",
        "table1_model_agreement.csv",
        "table2_seen_accuracy.csv",
        "table3_human_agreement.csv",
        "table_si_preference_agreement.csv",
        "table_si_annotator_agreement.csv",
        "table_familiarity.csv",
        "fig1_nonce_ness_ratio.svg",
        "fig2_seen_ness_ratio.svg",
        "fig3_frequency_confidence.svg",
        "fig4a_familiarity_humans.svg",
        "fig4b_familiarity_model.svg",
        "manifest.json",
    ] {
        assert!(names.contains(want), "missing {want}");
    }
    for (p, q) in w1.iter().zip(&w2) {
        assert_eq!(std::fs::read(p).unwrap(), std::fs::read(q).unwrap(), "{}", p.display());
    }
    let t2 = std::fs::read_to_string(d1.path().join("table2_seen_accuracy.csv")).unwrap();
    assert!(t2.contains("R-ITY,able,1.000,0.000"), "{t2}");
}

#[test]
fn report_skips_absent_inputs() {
    let inputs = ReportInputs { lexicon: report_inputs().lexicon, ..ReportInputs::default() };
    let a = analyze(&inputs).unwrap();
    assert!(a.derivative_stats.is_some());
    assert!(a.seen.is_none() && a.human.is_none() && a.familiarity.is_none() && a.nonce.is_none());
}

fn arb_probes() -> impl Strategy<Value = Vec<ProbeRecord>> {
    let forms = ["readable", "capable", "foolish", "boyish", "porous", "famous"];
    prop::collection::vec((0usize..6, 0usize..4, -20.0f64..0.0, -20.0f64..0.0), 1..60).prop_map(move |v| {
        let mut seen = BTreeSet::new();
        v.into_iter()
            .filter(|(f, p, _, _)| seen.insert((*f, *p)))
            .map(|(f, p, a, b)| probe(forms[f], &format!("p{p}"), a, b))
            .collect()
    })
}

proptest! {
    #[test]
    fn ness_and_ity_shares_sum_to_one(recs in arb_probes()) {
        let ness = ness_ratio(recs.iter().map(|r| (r.base.class(), winner(r))));
        let flipped: Vec<ProbeRecord> = recs.iter().map(|r| ProbeRecord { logp_ity: r.logp_ness, logp_ness: r.logp_ity, ..r.clone() }).collect();
        let ity = ness_ratio(flipped.iter().map(|r| (r.base.class(), winner(r))));
        for (c, v) in &ness {
            prop_assert!((0.0..=1.0).contains(v));
            // exact ties go to ITY both ways
            let ties = recs.iter().filter(|r| r.base.class() == *c && r.logp_ity == r.logp_ness).count();
            if ties == 0 {
                prop_assert!((v + ity[c] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn delta_is_antisymmetric(a in -50.0f64..0.0, b in -50.0f64..0.0) {
        let r = probe("porous", "p", a, b);
        prop_assert_eq!(delta(&r, Ity), -delta(&r, Ness));
        prop_assert_eq!(delta(&r, Ity) > 0.0, winner(&r) == Ity && a != b);
    }

    #[test]
    fn accuracy_is_bounded_and_complementary(recs in arb_probes()) {
        let all_ity: Reference = recs.iter().map(|r| (r.base.form().to_owned(), Ity)).collect();
        let all_ness: Reference = recs.iter().map(|r| (r.base.form().to_owned(), Ness)).collect();
        let a = accuracy(&recs, &all_ity).unwrap();
        let b = accuracy(&recs, &all_ness).unwrap();
        prop_assert!((a.mean + b.mean - 1.0).abs() < 1e-12);
        prop_assert!(a.std >= 0.0 && a.per_prompt.iter().all(|p| (0.0..=1.0).contains(&p.value)));
    }

    #[test]
    fn majority_ness_ratio_agrees_with_votes(votes in prop::collection::vec((0usize..4, 0usize..7, any::<bool>()), 1..80)) {
        let items = ["indaminous", "rebelorous", "prienish", "turgeish"];
        let mut seen = BTreeSet::new();
        let a: Vec<AnnotationRecord> = votes.into_iter()
            .filter(|(i, s, _)| seen.insert((*i, *s)))
            .map(|(i, s, n)| ann(items[i], &format!("s{s}"), if n { Ness } else { Ity }))
            .collect();
        let h = human_majority(&a).unwrap();
        for (b, c) in &h.majority {
            let r = h.item_ness_ratio[b];
            prop_assert_eq!(*c == Ness, r > 0.5);
            prop_assert_eq!(h.ties.contains(b), r == 0.5);
        }
    }
}
