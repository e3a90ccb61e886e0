use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::clean::{fold, tokenize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntityKind {
    Org,
    Person,
    CpeProduct,
    NounFallback,
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntityKind::Org => "ORG",
            EntityKind::Person => "PERSON",
            EntityKind::CpeProduct => "CPE_PRODUCT",
            EntityKind::NounFallback => "NOUN_FALLBACK",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityLabel {
    pub surface: String,
    pub kind: EntityKind,
    /// Byte span in the source text.
    pub start: usize,
    pub end: usize,
}

/// Splits a dictionary phrase into the same folded tokens the scanner sees.
fn phrase_key(s: &str) -> Vec<String> {
    tokenize(s).iter().map(|t| fold(t.text)).filter(|t| !t.is_empty()).collect()
}

#[derive(Debug, Clone, Default)]
pub struct CpeDictionary(BTreeSet<Vec<String>>);

impl CpeDictionary {
    pub fn parse(text: &str) -> Self {
        CpeDictionary(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(phrase_key)
                .filter(|k| !k.is_empty())
                .collect(),
        )
    }

    pub fn from_products<I: IntoIterator<Item = S>, S: AsRef<str>>(items: I) -> Self {
        CpeDictionary(
            items
                .into_iter()
                .map(|s| phrase_key(s.as_ref()))
                .filter(|k| !k.is_empty())
                .collect(),
        )
    }

    pub fn insert(&mut self, product: &str) {
        let k = phrase_key(product);
        if !k.is_empty() {
            self.0.insert(k);
        }
    }

    pub fn contains_tokens(&self, tokens: &[String]) -> bool {
        self.0.contains(tokens)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn max_len(&self) -> usize {
        self.0.iter().map(Vec::len).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Gazetteer(BTreeMap<Vec<String>, EntityKind>);

impl Gazetteer {
    /// `surface,kind` rows with kind `ORG` or `PERSON`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (surface, kind) = line
                .rsplit_once(',')
                .ok_or_else(|| format!("line {}: expected surface,kind", i + 1))?;
            let kind = match kind.trim().to_ascii_uppercase().as_str() {
                "ORG" => EntityKind::Org,
                "PERSON" => EntityKind::Person,
                other => return Err(format!("line {}: unknown kind {other:?}", i + 1)),
            };
            let key = phrase_key(surface);
            if !key.is_empty() {
                map.insert(key, kind);
            }
        }
        Ok(Gazetteer(map))
    }

    pub fn insert(&mut self, surface: &str, kind: EntityKind) {
        let k = phrase_key(surface);
        if !k.is_empty() {
            self.0.insert(k, kind);
        }
    }

    pub fn get(&self, tokens: &[String]) -> Option<EntityKind> {
        self.0.get(tokens).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn max_len(&self) -> usize {
        self.0.keys().map(Vec::len).max().unwrap_or(0)
    }
}

struct Candidate {
    first: usize,
    len: usize,
    kind: EntityKind,
    source_rank: u8,
}

/// Dictionary lookup over token windows. Overlaps are resolved globally:
/// longer matches first, CPE before gazetteer, then leftmost.
pub fn recognize_entities(raw: &str, cpe: &CpeDictionary, gazetteer: &Gazetteer) -> Vec<EntityLabel> {
    let toks = tokenize(raw);
    let folded: Vec<String> = toks.iter().map(|t| fold(t.text)).collect();
    let mut cands = Vec::new();
    let max_n = cpe.max_len().max(gazetteer.max_len());
    for n in 1..=max_n.min(folded.len()) {
        for (i, w) in folded.windows(n).enumerate() {
            if cpe.contains_tokens(w) {
                cands.push(Candidate {
                    first: i,
                    len: n,
                    kind: EntityKind::CpeProduct,
                    source_rank: 0,
                });
            }
            if let Some(kind) = gazetteer.get(w) {
                cands.push(Candidate {
                    first: i,
                    len: n,
                    kind,
                    source_rank: 1,
                });
            }
        }
    }
    cands.sort_by(|a, b| {
        b.len
            .cmp(&a.len)
            .then(a.source_rank.cmp(&b.source_rank))
            .then(a.first.cmp(&b.first))
    });
    let mut taken = vec![false; folded.len()];
    let mut out = Vec::new();
    for c in cands {
        let span = c.first..c.first + c.len;
        if taken[span.clone()].iter().any(|&t| t) {
            continue;
        }
        taken[span].iter_mut().for_each(|t| *t = true);
        let start = toks[c.first].start;
        let end = toks[c.first + c.len - 1].end;
        out.push(EntityLabel {
            surface: raw[start..end].to_string(),
            kind: c.kind,
            start,
            end,
        });
    }
    out.sort_by_key(|e| e.start);
    out
}
