//! Regenerates the synthetic fixtures under `fixtures/`.
//!
//! Every file is a deterministic function of the seed and the bundled word
//! list. Each step checks its output against the target statistics with the
//! library's own analysis code and exits non-zero on a miss.

mod annotations;
mod corpus;
mod lexicon;
mod probes;
mod vocab;
mod util;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nomlab::corpus::{class_stats, lexicon_to_tsv, FrequencyTable};
use nomlab::eval::{write_annotations, write_jsonl};
use nomlab::io::read_lines;
use nomlab::noncegen::read_nonces;

use crate::util::{rng_for, write_gz, write_text};

#[derive(Parser)]
#[command(about = "Regenerate the synthetic fixture corpus")]
struct Args {
    #[arg(long, default_value = "fixtures")]
    out: PathBuf,
    /// Word source (one word per line, gzip ok).
    #[arg(long, default_value = "crates/core/data/stems.txt.gz")]
    words: PathBuf,
    #[arg(long, default_value_t = 20_240_917)]
    seed: u64,
}

/// Collects target misses.
#[derive(Default)]
pub struct Checks {
    failed: usize,
}

impl Checks {
    pub fn check(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        println!("{} {label}: {got:.4} (target {want:.4} ±{tol})", if ok { "ok  " } else { "MISS" });
        if !ok {
            self.failed += 1;
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let words: Vec<String> = read_lines(&args.words).unwrap_or_else(|e| panic!("{e}")).into_iter().map(|w| w.to_lowercase()).collect();
    let nonces = read_nonces(&args.out.join("nonces.tsv")).unwrap_or_else(|e| panic!("{e}"));
    let mut checks = Checks::default();

    let lex = lexicon::build(&words, &nonces, &mut rng_for(args.seed, "lexicon"));
    write_gz(&args.out.join("lexicon.tsv.gz"), &lexicon_to_tsv(&lex));
    write_gz(&args.out.join("frequency.tsv.gz"), &FrequencyTable::from_lexicon(&lex).to_tsv());
    let stats = class_stats(&lex).unwrap_or_else(|e| panic!("{e}"));
    checks.check("lexicon bases", lex.len() as f64, lexicon::TOTAL_BASES as f64, 0.0);
    lexicon::verify(&stats, &mut checks);
    let nonce_forms = nonces.iter().map(|b| b.form().to_owned()).collect();
    for class in nomlab::AdjectiveClass::NONCE {
        let list = lexicon::class_words(&words, class, &nonce_forms);
        write_text(&args.out.join(format!("wordlists/{}.txt", class.suffix())), &(list.join("\n") + "\n"));
    }

    let ann = annotations::build(&nonces, &mut rng_for(args.seed, "annotations"));
    write_text(&args.out.join("annotations.tsv"), &write_annotations(&ann));
    let human = annotations::verify(&ann, &mut checks);

    let nonce_probes = probes::build_nonce(&nonces, &human, &mut rng_for(args.seed, "probes_nonce"));
    write_gz(&args.out.join("probes_nonce.jsonl.gz"), &write_jsonl(&nonce_probes));
    probes::verify_nonce(&nonce_probes, &human, &mut checks);
    let prefs = probes::build_preferences(&nonces, &human, &mut rng_for(args.seed, "preferences"));
    write_text(&args.out.join("preferences_gpt4.jsonl"), &write_jsonl(&prefs));
    probes::verify_preferences(&prefs, &human, &mut checks);

    let seen = probes::build_seen(&lex, &mut rng_for(args.seed, "probes_seen"));
    write_gz(&args.out.join("probes_seen.jsonl.gz"), &write_jsonl(&seen));
    probes::verify_seen(&lex, &seen, &mut checks);

    let (text, expected) = corpus::build(&lex, &seen, &words, &mut rng_for(args.seed, "corpus"));
    write_text(&args.out.join("corpus.txt"), &text);
    corpus::verify(&text, &expected, &mut checks);

    let vocab = vocab::build(&words, &mut rng_for(args.seed, "vocab"));
    write_gz(&args.out.join("vocab.jsonl.gz"), &write_jsonl(&vocab));
    vocab::verify(&vocab, &mut checks);

    if checks.failed > 0 {
        eprintln!("{} target(s) missed", checks.failed);
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
