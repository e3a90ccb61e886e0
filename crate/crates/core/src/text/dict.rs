use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::clean::{fold, tokenize, Stopwords};
use super::entities::{CpeDictionary, Gazetteer};
use super::pos::PosLexicon;

pub const DEFAULT_GAZETTEER: &str = include_str!("../../data/gazetteer.csv");
pub const DEFAULT_CPE_DICTIONARY: &str = include_str!("../../data/cpe_dictionary.txt");
pub const DEFAULT_ALIASES: &str = include_str!("../../data/aliases.tsv");

#[derive(Debug, Error)]
#[error("{}: {message}", path.display())]
pub struct DictError {
    pub path: PathBuf,
    pub message: String,
}

/// Surface phrase → canonical individual name.
#[derive(Debug, Clone, Default)]
pub struct AliasTable(HashMap<String, String>);

fn alias_key(s: &str) -> String {
    tokenize(s).iter().map(|t| fold(t.text)).collect::<Vec<_>>().join(" ")
}

impl AliasTable {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut map = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (surface, name) = line
                .split_once('\t')
                .ok_or_else(|| format!("line {}: expected surface<TAB>name", i + 1))?;
            map.insert(alias_key(surface), name.trim().to_string());
        }
        Ok(AliasTable(map))
    }

    pub fn get(&self, surface: &str) -> Option<&str> {
        self.0.get(&alias_key(surface)).map(String::as_str)
    }

    /// Alias hit if any, otherwise CamelCase of the alphanumeric runs.
    pub fn individual_name(&self, surface: &str) -> String {
        self.get(surface)
            .map(str::to_string)
            .unwrap_or_else(|| camel_case(surface))
    }
}

/// "Google Chrome OS" → "GoogleChromeOS"; inner capitalization is kept.
pub fn camel_case(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for t in tokenize(s) {
        let mut chars = t.text.chars();
        if let Some(first) = chars.next() {
            out.extend(first.to_uppercase());
            out.push_str(chars.as_str());
        }
    }
    out
}

/// Every lookup table the text pipeline and entity model consume.
#[derive(Debug, Clone)]
pub struct Dictionaries {
    pub stopwords: Stopwords,
    pub lexicon: PosLexicon,
    pub cpe: CpeDictionary,
    pub gazetteer: Gazetteer,
    pub aliases: AliasTable,
}

impl Default for Dictionaries {
    fn default() -> Self {
        Self::bundled()
    }
}

impl Dictionaries {
    pub fn bundled() -> Self {
        Dictionaries {
            stopwords: Stopwords::bundled(),
            lexicon: PosLexicon::bundled(),
            cpe: CpeDictionary::parse(DEFAULT_CPE_DICTIONARY),
            gazetteer: Gazetteer::parse(DEFAULT_GAZETTEER).expect("bundled gazetteer parses"),
            aliases: AliasTable::parse(DEFAULT_ALIASES).expect("bundled aliases parse"),
        }
    }

    /// Bundled stopwords and lexicon with no entity dictionaries at all.
    pub fn empty_entities() -> Self {
        Dictionaries {
            cpe: CpeDictionary::default(),
            gazetteer: Gazetteer::default(),
            aliases: AliasTable::default(),
            ..Self::bundled()
        }
    }

    /// Reads `stopwords_en.txt`, `pos_lexicon.tsv`, `cpe_dictionary.txt`,
    /// `gazetteer.csv` and `aliases.tsv` from `dir`; absent files fall back
    /// to the bundled copies.
    pub fn from_dir(dir: &Path) -> Result<Self, DictError> {
        let mut d = Self::bundled();
        let read = |name: &str| -> Result<Option<(PathBuf, String)>, DictError> {
            let p = dir.join(name);
            if !p.exists() {
                return Ok(None);
            }
            fs::read_to_string(&p)
                .map(|s| Some((p.clone(), s)))
                .map_err(|e| DictError {
                    path: p,
                    message: e.to_string(),
                })
        };
        let bad = |path: PathBuf| move |message: String| DictError { path, message };
        if let Some((_, s)) = read("stopwords_en.txt")? {
            d.stopwords = Stopwords::parse(&s);
        }
        if let Some((p, s)) = read("pos_lexicon.tsv")? {
            d.lexicon = PosLexicon::parse(&s).map_err(bad(p))?;
        }
        if let Some((_, s)) = read("cpe_dictionary.txt")? {
            d.cpe = CpeDictionary::parse(&s);
        }
        if let Some((p, s)) = read("gazetteer.csv")? {
            d.gazetteer = Gazetteer::parse(&s).map_err(bad(p))?;
        }
        if let Some((p, s)) = read("aliases.tsv")? {
            d.aliases = AliasTable::parse(&s).map_err(bad(p))?;
        }
        Ok(d)
    }
}
