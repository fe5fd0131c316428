//! Rule-based and exemplar-based models of English -ity/-ness
//! nominalization, the corpus and pseudoword tooling around them, and the
//! statistics used to compare their predictions with language-model probes
//! and human judgments.

pub mod corpus;
pub mod error;
pub mod gcm;
pub mod eval;
pub mod io;
pub mod mgl;
pub mod noncegen;
pub mod morphlex;
pub mod pipeline;
pub mod stats;

pub use error::{Error, Result};
pub use morphlex::{AdjectiveClass, Base, SuffixChoice};

use std::fmt;
use std::str::FromStr;

/// Data files compiled into the library, by file name.
pub fn bundled_files() -> [(&'static str, &'static [u8]); 4] {
    [
        ("prefixes.txt", morphlex::BUNDLED_PREFIXES.as_bytes()),
        ("suffixes.txt", morphlex::BUNDLED_SUFFIXES.as_bytes()),
        ("stems.txt.gz", morphlex::BUNDLED_STEMS_GZ),
        ("prompts.json", eval::BUNDLED_PROMPTS.as_bytes()),
    ]
}

/// How training items are weighted: once per type, or by corpus token count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    #[default]
    Type,
    Token,
}

impl WeightMode {
    pub const ALL: [WeightMode; 2] = [WeightMode::Type, WeightMode::Token];

    pub fn as_str(self) -> &'static str {
        match self {
            WeightMode::Type => "type",
            WeightMode::Token => "token",
        }
    }

    /// Weight of an item seen `count` times.
    pub fn weight(self, count: f64) -> f64 {
        match self {
            WeightMode::Type => 1.0,
            WeightMode::Token => count,
        }
    }
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "type" => Ok(WeightMode::Type),
            "token" => Ok(WeightMode::Token),
            other => Err(Error::input(format!("unknown weighting mode `{other}`"))),
        }
    }
}
