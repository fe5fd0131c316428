//! Adjective classes, -ity/-ness suffixation and its inverse, and the
//! affix-stripping complexity parser.

mod parse;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use parse::{BUNDLED_PREFIXES, BUNDLED_STEMS_GZ, BUNDLED_SUFFIXES};
pub use parse::{bundled_words, parse_word, Affix, AffixInventory, AffixKind, OrthoRule, Parse, DEFAULT_MAX_DEPTH};

/// The two competing nominalizing suffixes. `Ity < Ness` is the
/// tie-breaking order used everywhere in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuffixChoice {
    Ity,
    Ness,
}

impl SuffixChoice {
    pub const ALL: [SuffixChoice; 2] = [SuffixChoice::Ity, SuffixChoice::Ness];

    pub fn as_str(self) -> &'static str {
        match self {
            SuffixChoice::Ity => "ity",
            SuffixChoice::Ness => "ness",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn other(self) -> SuffixChoice {
        match self {
            SuffixChoice::Ity => SuffixChoice::Ness,
            SuffixChoice::Ness => SuffixChoice::Ity,
        }
    }
}

impl fmt::Display for SuffixChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuffixChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().trim_start_matches('-').to_ascii_lowercase().as_str() {
            "ity" => Ok(SuffixChoice::Ity),
            "ness" => Ok(SuffixChoice::Ness),
            other => Err(Error::input(format!("unknown suffix choice `{other}`"))),
        }
    }
}

/// Regularity groups of adjective classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Group {
    RNess,
    RIty,
    VNess,
    VIty,
}

impl Group {
    pub const ALL: [Group; 4] = [Group::RNess, Group::RIty, Group::VNess, Group::VIty];

    pub fn label(self) -> &'static str {
        match self {
            Group::RNess => "R-NESS",
            Group::RIty => "R-ITY",
            Group::VNess => "V-NESS",
            Group::VIty => "V-ITY",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The ten adjective classes, identified by their word-final suffix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdjectiveClass {
    Able,
    Al,
    Ar,
    Ed,
    Ic,
    Ing,
    Ish,
    Ive,
    Less,
    Ous,
}

impl AdjectiveClass {
    pub const ALL: [AdjectiveClass; 10] = [
        AdjectiveClass::Able,
        AdjectiveClass::Al,
        AdjectiveClass::Ar,
        AdjectiveClass::Ed,
        AdjectiveClass::Ic,
        AdjectiveClass::Ing,
        AdjectiveClass::Ish,
        AdjectiveClass::Ive,
        AdjectiveClass::Less,
        AdjectiveClass::Ous,
    ];

    /// The four classes used for the nonce-word experiments.
    pub const NONCE: [AdjectiveClass; 4] = [
        AdjectiveClass::Able,
        AdjectiveClass::Ish,
        AdjectiveClass::Ive,
        AdjectiveClass::Ous,
    ];

    /// Suffix without the leading hyphen.
    pub fn suffix(self) -> &'static str {
        match self {
            AdjectiveClass::Able => "able",
            AdjectiveClass::Al => "al",
            AdjectiveClass::Ar => "ar",
            AdjectiveClass::Ed => "ed",
            AdjectiveClass::Ic => "ic",
            AdjectiveClass::Ing => "ing",
            AdjectiveClass::Ish => "ish",
            AdjectiveClass::Ive => "ive",
            AdjectiveClass::Less => "less",
            AdjectiveClass::Ous => "ous",
        }
    }

    pub fn group(self) -> Group {
        use AdjectiveClass::*;
        match self {
            Ed | Ing | Ish | Less => Group::RNess,
            Able | Al | Ar | Ic => Group::RIty,
            Ous => Group::VNess,
            Ive => Group::VIty,
        }
    }

    /// `(removed, added)` for ITY derivation: the tail of the base that is
    /// dropped and the string that replaces it.
    fn ity_rewrite(self) -> (&'static str, &'static str) {
        match self {
            AdjectiveClass::Able => ("able", "ability"),
            AdjectiveClass::Ive => ("e", "ity"),
            AdjectiveClass::Ous => ("ous", "osity"),
            _ => ("", "ity"),
        }
    }

    /// Word-final string that every derivative of this class with `choice` ends in.
    pub fn derivative_ending(self, choice: SuffixChoice) -> String {
        let suffix = self.suffix();
        match choice {
            SuffixChoice::Ness => format!("{suffix}ness"),
            SuffixChoice::Ity => {
                let (removed, added) = self.ity_rewrite();
                format!("{}{}", &suffix[..suffix.len() - removed.len()], added)
            }
        }
    }
}

impl fmt::Display for AdjectiveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "-{}", self.suffix())
    }
}

impl FromStr for AdjectiveClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().trim_start_matches('-').to_ascii_lowercase();
        AdjectiveClass::ALL
            .into_iter()
            .find(|c| c.suffix() == key)
            .ok_or_else(|| Error::input(format!("unknown adjective class `{s}`")))
    }
}

/// A base adjective together with its class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Base {
    form: String,
    class: AdjectiveClass,
}

impl Base {
    /// Validates that `form` is lowercase alphabetic, ends in the class
    /// suffix and leaves at least two characters in front of it.
    pub fn new(form: impl Into<String>, class: AdjectiveClass) -> Result<Base> {
        let form = form.into();
        if form.is_empty() || !form.bytes().all(|b| b.is_ascii_lowercase()) {
            return Err(Error::input(format!(
                "base `{form}` is not lowercase alphabetic"
            )));
        }
        let suffix = class.suffix();
        if !form.ends_with(suffix) {
            return Err(Error::input(format!("base `{form}` does not end in {class}")));
        }
        if form.len() < suffix.len() + 2 {
            return Err(Error::input(format!("base `{form}` is too short for {class}")));
        }
        Ok(Base { form, class })
    }

    /// Builds a base from a bare form by classifying it.
    pub fn parse(form: &str) -> Result<Base> {
        let class = classify(form)
            .ok_or_else(|| Error::input(format!("`{form}` matches no adjective class")))?;
        Base::new(form, class)
    }

    pub fn form(&self) -> &str {
        &self.form
    }

    pub fn class(&self) -> AdjectiveClass {
        self.class
    }

    pub fn derivative(&self, choice: SuffixChoice) -> String {
        apply_suffix(self, choice)
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.form)
    }
}

impl Serialize for Base {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.form)
    }
}

impl<'de> Deserialize<'de> for Base {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let form = String::deserialize(d)?;
        Base::parse(&form).map_err(serde::de::Error::custom)
    }
}

/// A base, a suffix choice and the resulting derivative with its corpus count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivativePair {
    pub base: Base,
    pub choice: SuffixChoice,
    pub derivative: String,
    pub token_count: u64,
}

impl DerivativePair {
    pub fn new(base: Base, choice: SuffixChoice, token_count: u64) -> Self {
        let derivative = apply_suffix(&base, choice);
        DerivativePair {
            base,
            choice,
            derivative,
            token_count,
        }
    }
}

/// Forms the derivative of `base` with `choice`.
///
/// NESS always concatenates. ITY rewrites `-able` to `-ability`, drops the
/// final `e` of `-ive`, turns `-ous` into `-osity` and concatenates for the
/// remaining classes.
pub fn apply_suffix(base: &Base, choice: SuffixChoice) -> String {
    let form = base.form();
    match choice {
        SuffixChoice::Ness => format!("{form}ness"),
        SuffixChoice::Ity => {
            let (removed, added) = base.class().ity_rewrite();
            format!("{}{}", &form[..form.len() - removed.len()], added)
        }
    }
}

/// Class whose suffix is the longest word-final match, if any.
pub fn classify(form: &str) -> Option<AdjectiveClass> {
    AdjectiveClass::ALL
        .into_iter()
        .filter(|c| form.ends_with(c.suffix()))
        .max_by_key(|c| c.suffix().len())
}

/// Inverse of [`apply_suffix`]: recovers `(base, choice)` such that
/// `apply_suffix(base, choice) == word`. The longest matching derivative
/// ending wins.
pub fn strip_suffix(word: &str) -> Option<(Base, SuffixChoice)> {
    let mut best: Option<(usize, Base, SuffixChoice)> = None;
    for class in AdjectiveClass::ALL {
        for choice in SuffixChoice::ALL {
            let ending = class.derivative_ending(choice);
            if !word.ends_with(&ending) {
                continue;
            }
            if best.as_ref().is_some_and(|(len, _, _)| *len >= ending.len()) {
                continue;
            }
            let stem = &word[..word.len() - ending.len()];
            let Ok(base) = Base::new(format!("{stem}{}", class.suffix()), class) else {
                continue;
            };
            if apply_suffix(&base, choice) == word {
                best = Some((ending.len(), base, choice));
            }
        }
    }
    best.map(|(_, base, choice)| (base, choice))
}
