use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const DEFAULT_POS_LEXICON: &str = include_str!("../../data/pos_lexicon.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PosTag {
    NN,
    NNS,
    Verb,
    Adj,
    Det,
    Prep,
    Num,
    Other,
}

impl PosTag {
    pub const ALL: [PosTag; 8] = [
        PosTag::NN,
        PosTag::NNS,
        PosTag::Verb,
        PosTag::Adj,
        PosTag::Det,
        PosTag::Prep,
        PosTag::Num,
        PosTag::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::NN => "NN",
            PosTag::NNS => "NNS",
            PosTag::Verb => "VERB",
            PosTag::Adj => "ADJ",
            PosTag::Det => "DET",
            PosTag::Prep => "PREP",
            PosTag::Num => "NUM",
            PosTag::Other => "OTHER",
        }
    }

    pub fn is_noun(self) -> bool {
        matches!(self, PosTag::NN | PosTag::NNS)
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PosTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PosTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown tag {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub token: String,
    pub tag: PosTag,
}

#[derive(Debug, Clone, Default)]
pub struct PosLexicon(HashMap<String, PosTag>);

impl PosLexicon {
    /// `word<TAB>TAG` per line; `#` comments and blank lines skipped.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut map = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tag) = line
                .split_once('\t')
                .ok_or_else(|| format!("line {}: expected word<TAB>tag", i + 1))?;
            let tag = tag.trim().parse().map_err(|e| format!("line {}: {e}", i + 1))?;
            map.insert(word.trim().to_lowercase(), tag);
        }
        Ok(PosLexicon(map))
    }

    pub fn bundled() -> Self {
        Self::parse(DEFAULT_POS_LEXICON).expect("bundled lexicon parses")
    }

    pub fn get(&self, word: &str) -> Option<PosTag> {
        self.0.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tag_word(&self, surface: &str) -> PosTag {
        let w = surface.to_lowercase();
        if let Some(t) = self.get(&w) {
            return t;
        }
        if !w.is_empty() && w.chars().all(|c| c.is_ascii_digit()) {
            return PosTag::Num;
        }
        if w.ends_with("ing") || w.ends_with("ed") {
            return PosTag::Verb;
        }
        if ["ous", "ful", "able", "ible", "ive", "less"].iter().any(|s| w.ends_with(s)) {
            return PosTag::Adj;
        }
        if w.ends_with("ly") {
            return PosTag::Other;
        }
        if w.len() > 3 && w.ends_with('s') && !["ss", "us", "is"].iter().any(|s| w.ends_with(s)) {
            return match self.tag_word(&w[..w.len() - 1]) {
                PosTag::NN => PosTag::NNS,
                PosTag::Verb => PosTag::Verb,
                _ => PosTag::NN,
            };
        }
        PosTag::NN
    }
}

pub fn pos_tag<S: AsRef<str>>(tokens: &[S], lexicon: &PosLexicon) -> Vec<TaggedToken> {
    tokens
        .iter()
        .map(|t| TaggedToken {
            token: t.as_ref().to_string(),
            tag: lexicon.tag_word(t.as_ref()),
        })
        .collect()
}
