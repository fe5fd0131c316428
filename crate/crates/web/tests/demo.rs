use nomlab_web::Demo;
use serde_json::Value;

fn parse(out: Result<String, String>) -> Value {
    serde_json::from_str(&out.expect("call succeeds")).expect("valid JSON")
}

#[test]
fn bundled_lexicon_loads() {
    let demo = Demo::new().unwrap();
    assert!(demo.lexicon_size() > 10_000);
}

#[test]
fn gcm_curve_tracks_the_slider_value() {
    let demo = Demo::new().unwrap();
    let v = parse(demo.gcm_score("turgeish", "type", 1.0, 0.05, 20.0, 40));
    let p_ity = v["p_ity"].as_f64().unwrap();
    let p_ness = v["p_ness"].as_f64().unwrap();
    assert!((p_ity + p_ness - 1.0).abs() < 1e-12);
    assert_eq!(v["choice"], "ness");
    let curve = v["curve"].as_array().unwrap();
    assert_eq!(curve.len(), 40);
    assert!(curve.windows(2).all(|w| w[0][0].as_f64() < w[1][0].as_f64()));
    for point in curve {
        let p = point[1].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&p));
    }
    // The curve sampled at the slider value reproduces the point score.
    let at = parse(demo.gcm_score("turgeish", "type", 0.05, 0.05, 20.0, 40));
    assert!((at["p_ness"].as_f64().unwrap() - curve[0][1].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn gcm_rejects_bad_ranges() {
    let demo = Demo::new().unwrap();
    assert!(demo.gcm_score("turgeish", "type", -1.0, 0.05, 20.0, 40).is_err());
    assert!(demo.gcm_score("turgeish", "type", 1.0, 5.0, 1.0, 40).is_err());
    assert!(demo.gcm_score("turgeish", "bogus", 1.0, 0.05, 20.0, 40).is_err());
}

#[test]
fn mgl_reports_the_deciding_rule() {
    let demo = Demo::new().unwrap();
    let v = parse(demo.mgl_predict("Turgeish", "type"));
    assert_eq!(v["base"], "turgeish");
    assert_eq!(v["choice"], "ness");
    let rule = &v["rule"];
    assert_eq!(rule["output"], "ness");
    assert_eq!(rule["text"], format!("ness / {}", rule["context"].as_str().unwrap()));
    let confidence = rule["confidence"].as_f64().unwrap();
    assert_eq!(v["best_ness"].as_f64(), Some(confidence));
    assert!(rule["hits"].as_f64() <= rule["scope"].as_f64());
    assert_eq!(parse(demo.mgl_predict("zorbable", "token"))["choice"], "ity");
}

#[test]
fn nonces_are_seeded_and_of_the_requested_class() {
    let demo = Demo::new().unwrap();
    let a = parse(demo.nonces("ous", 2, 42));
    assert_eq!(a, parse(demo.nonces("ous", 2, 42)));
    let rows = a.as_array().unwrap();
    assert!(!rows.is_empty());
    for r in rows {
        let base = r["base"].as_str().unwrap();
        assert!(base.ends_with("ous"));
        assert_eq!(r["class"], "ous");
        assert_eq!(r["d_ness"], format!("{base}ness"));
        assert!(r["d_ity"].as_str().unwrap().ends_with("osity"));
    }
    assert!(demo.nonces("xyz", 2, 42).is_err());
    assert!(demo.nonces("ous", 0, 42).is_err());
}

#[test]
fn custom_lexicon_from_text() {
    let tsv = "base\tclass\tbase_count\tity_count\tness_count\n\
               selfish\tish\t10\t0\t5\nboyish\tish\t4\t0\t2\nreadable\table\t9\t6\t0\n";
    let demo = Demo::from_tsv(tsv).unwrap();
    assert_eq!(demo.lexicon_size(), 3);
    let v = parse(demo.mgl_predict("dwarfish", "type"));
    assert_eq!(v["choice"], "ness");
    assert!(Demo::from_tsv("not a lexicon\n").is_err());
}
