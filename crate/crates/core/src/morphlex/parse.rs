//! Affix-stripping parser deciding whether a word is morphologically complex.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::io::Read;
use std::path::Path;
use std::sync::OnceLock;

use flate2::read::GzDecoder;
use serde::Serialize;

use crate::error::Result;
use crate::io::read_lines;

pub const DEFAULT_MAX_DEPTH: usize = 3;
const MIN_STEM_LEN: usize = 3;

pub(crate) const BUNDLED_PREFIXES: &str = include_str!("../../data/prefixes.txt");
pub(crate) const BUNDLED_SUFFIXES: &str = include_str!("../../data/suffixes.txt");
pub(crate) const BUNDLED_STEMS_GZ: &[u8] = include_bytes!("../../data/stems.txt.gz");

/// Prefixes, suffixes and the reference list of stems.
#[derive(Debug, Clone)]
pub struct AffixInventory {
    prefixes: Vec<String>,
    suffixes: Vec<String>,
    stems: HashSet<String>,
}

impl AffixInventory {
    pub fn new(
        prefixes: impl IntoIterator<Item = String>,
        suffixes: impl IntoIterator<Item = String>,
        stems: impl IntoIterator<Item = String>,
    ) -> Self {
        // longest affix first so the search order is stable and greedy
        let sorted = |items: BTreeSet<String>| {
            let mut v: Vec<String> = items.into_iter().collect();
            v.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
            v
        };
        let clean = |s: String| s.trim().trim_matches('-').to_ascii_lowercase();
        AffixInventory {
            prefixes: sorted(prefixes.into_iter().map(clean).filter(|s| !s.is_empty()).collect()),
            suffixes: sorted(suffixes.into_iter().map(clean).filter(|s| !s.is_empty()).collect()),
            stems: stems
                .into_iter()
                .map(clean)
                .filter(|s| !s.is_empty())
                .collect(),
        }
    }

    /// Loads the three one-entry-per-line files. Any of them may be gzip
    /// compressed (`.gz` extension).
    pub fn from_files(prefixes: &Path, suffixes: &Path, stems: &Path) -> Result<Self> {
        Ok(AffixInventory::new(
            read_lines(prefixes)?,
            read_lines(suffixes)?,
            read_lines(stems)?,
        ))
    }

    /// The inventory shipped with the crate: 46 prefixes, 44 suffixes and a
    /// public-domain English word list as stems.
    pub fn bundled() -> &'static AffixInventory {
        static INVENTORY: OnceLock<AffixInventory> = OnceLock::new();
        INVENTORY.get_or_init(|| {
            AffixInventory::new(
                BUNDLED_PREFIXES.lines().map(str::to_owned),
                BUNDLED_SUFFIXES.lines().map(str::to_owned),
                bundled_words(),
            )
        })
    }

    pub fn prefixes(&self) -> &[String] {
        &self.prefixes
    }

    pub fn suffixes(&self) -> &[String] {
        &self.suffixes
    }

    pub fn is_stem(&self, word: &str) -> bool {
        self.stems.contains(word)
    }

    pub fn stem_count(&self) -> usize {
        self.stems.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AffixKind {
    Prefix,
    Suffix,
}

/// Spelling adjustment made when a suffix attaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrthoRule {
    Plain,
    /// `hope + ing -> hoping`
    DropE,
    /// `cancel + ation -> cancellation`
    DoubleConsonant,
    /// `happy + ness -> happiness`
    YToI,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Affix {
    pub kind: AffixKind,
    pub form: String,
    pub rule: OrthoRule,
}

impl Affix {
    fn attach(&self, inner: &str) -> Option<String> {
        match self.kind {
            AffixKind::Prefix => Some(format!("{}{inner}", self.form)),
            AffixKind::Suffix => {
                let attached = match self.rule {
                    OrthoRule::Plain => format!("{inner}{}", self.form),
                    OrthoRule::DropE => format!("{}{}", inner.strip_suffix('e')?, self.form),
                    OrthoRule::DoubleConsonant => {
                        let last = inner.chars().last()?;
                        format!("{inner}{last}{}", self.form)
                    }
                    OrthoRule::YToI => format!("{}i{}", inner.strip_suffix('y')?, self.form),
                };
                Some(attached)
            }
        }
    }
}

/// The English word list shipped with the crate, one lower-case word per
/// entry.
pub fn bundled_words() -> Vec<String> {
    let mut text = String::new();
    GzDecoder::new(BUNDLED_STEMS_GZ)
        .read_to_string(&mut text)
        .expect("bundled stem list is valid gzip");
    text.lines().map(str::to_owned).collect()
}

/// Result of [`parse_word`]. `affixes` are listed innermost first, i.e. in
/// the order they attach to the stem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Parse {
    pub word: String,
    pub stem: Option<String>,
    pub affixes: Vec<Affix>,
    pub is_complex: bool,
}

impl Parse {
    /// Re-derives the word from stem and affixes. `None` for simplex parses.
    pub fn reconstruct(&self) -> Option<String> {
        let mut current = self.stem.clone()?;
        for affix in &self.affixes {
            current = affix.attach(&current)?;
        }
        Some(current)
    }
}

fn is_consonant(c: u8) -> bool {
    c.is_ascii_lowercase() && !b"aeiou".contains(&c)
}

/// Residues left by stripping `suffix` from `word`, each with the rule
/// that would reattach it.
fn suffix_residues(word: &str, suffix: &str) -> Vec<(String, OrthoRule)> {
    let Some(residue) = word.strip_suffix(suffix) else {
        return Vec::new();
    };
    let mut out = vec![(residue.to_owned(), OrthoRule::Plain)];
    out.push((format!("{residue}e"), OrthoRule::DropE));
    let bytes = residue.as_bytes();
    if bytes.len() >= 2 {
        let (a, b) = (bytes[bytes.len() - 2], bytes[bytes.len() - 1]);
        if a == b && is_consonant(b) {
            out.push((residue[..residue.len() - 1].to_owned(), OrthoRule::DoubleConsonant));
        }
    }
    if let Some(head) = residue.strip_suffix('i') {
        out.push((format!("{head}y"), OrthoRule::YToI));
    }
    out
}

/// Breadth-first affix stripping up to `max_depth` affixes. The shallowest
/// parse whose residue is a known stem of at least three letters wins.
pub fn parse_word(word: &str, inventory: &AffixInventory, max_depth: usize) -> Parse {
    let simplex = Parse {
        word: word.to_owned(),
        stem: None,
        affixes: Vec::new(),
        is_complex: false,
    };
    if !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return simplex;
    }

    // (residue, affixes stripped so far, outermost first)
    let mut queue: VecDeque<(String, Vec<Affix>)> = VecDeque::new();
    let mut seen: HashSet<String> = HashSet::new();
    queue.push_back((word.to_owned(), Vec::new()));
    seen.insert(word.to_owned());

    while let Some((residue, stripped)) = queue.pop_front() {
        if !stripped.is_empty() && residue.len() >= MIN_STEM_LEN && inventory.is_stem(&residue) {
            let mut affixes = stripped;
            affixes.reverse();
            let parse = Parse {
                word: word.to_owned(),
                stem: Some(residue),
                affixes,
                is_complex: true,
            };
            debug_assert_eq!(parse.reconstruct().as_deref(), Some(word));
            return parse;
        }
        if stripped.len() >= max_depth {
            continue;
        }
        let mut next: Vec<(String, Affix)> = Vec::new();
        for prefix in inventory.prefixes() {
            if let Some(rest) = residue.strip_prefix(prefix.as_str()) {
                next.push((
                    rest.to_owned(),
                    Affix {
                        kind: AffixKind::Prefix,
                        form: prefix.clone(),
                        rule: OrthoRule::Plain,
                    },
                ));
            }
        }
        for suffix in inventory.suffixes() {
            for (rest, rule) in suffix_residues(&residue, suffix) {
                next.push((
                    rest,
                    Affix {
                        kind: AffixKind::Suffix,
                        form: suffix.clone(),
                        rule,
                    },
                ));
            }
        }
        for (rest, affix) in next {
            if rest.len() < MIN_STEM_LEN || !seen.insert(rest.clone()) {
                continue;
            }
            // only keep residues from which the affix really reattaches
            if affix.attach(&rest).as_deref() != Some(residue.as_str()) {
                continue;
            }
            let mut path = stripped.clone();
            path.push(affix);
            queue.push_back((rest, path));
        }
    }
    simplex
}
