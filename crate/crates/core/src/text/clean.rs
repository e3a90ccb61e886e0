use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::porter;

/// Bundled English stopword list.
pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

const MAX_TOKEN_CHARS: usize = 40;

/// A maximal alphanumeric run in the source text, with its byte span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawToken<'a> {
    pub text: &'a str,
    pub start: usize,
    pub end: usize,
}

/// Splits on every non-alphanumeric character; punctuation never survives.
pub fn tokenize(raw: &str) -> Vec<RawToken<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in raw.char_indices() {
        if ch.is_alphanumeric() {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            out.push(RawToken {
                text: &raw[s..i],
                start: s,
                end: i,
            });
        }
    }
    if let Some(s) = start {
        out.push(RawToken {
            text: &raw[s..],
            start: s,
            end: raw.len(),
        });
    }
    out
}

/// Cleaned output: lowercase stemmed content tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    pub tokens: Vec<String>,
    pub source_len: usize,
}

impl TokenStream {
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    /// Space-joined rendering.
    pub fn render(&self) -> String {
        self.tokens.join(" ")
    }
}

/// A content token that survived cleaning, with both its original surface and its stem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanToken {
    pub surface: String,
    pub stem: String,
}

#[derive(Debug, Clone, Default)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// One word per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn bundled() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Drops tokens without any letter, single characters, and overlong runs (hashes, blobs).
pub fn is_nonsensical(token: &str) -> bool {
    let n = token.chars().count();
    n <= 1 || n > MAX_TOKEN_CHARS || !token.chars().any(char::is_alphabetic)
}

/// Lowercases, keeping only alphanumeric output (some case mappings emit combining marks).
pub fn fold(token: &str) -> String {
    token.to_lowercase().chars().filter(|c| c.is_alphanumeric()).collect()
}

/// Lowercase → strip punctuation → drop stopwords → drop nonsense; no stemming.
pub fn normalize<'a>(raw: &'a str, stopwords: &Stopwords) -> Vec<RawToken<'a>> {
    tokenize(raw)
        .into_iter()
        .filter(|t| {
            let lower = fold(t.text);
            !stopwords.contains(&lower) && !is_nonsensical(&lower)
        })
        .collect()
}

/// Normalized tokens paired with their stems. A stem that lands on a
/// stopword (`ises` → `is`) is dropped too.
pub fn clean_tokens(raw: &str, stopwords: &Stopwords) -> Vec<CleanToken> {
    normalize(raw, stopwords)
        .into_iter()
        .map(|t| CleanToken {
            stem: porter::stem(&fold(t.text)),
            surface: t.text.to_string(),
        })
        .filter(|t| !stopwords.contains(&t.stem))
        .collect()
}

pub fn string_clean(raw: &str, stopwords: &Stopwords) -> TokenStream {
    TokenStream {
        tokens: clean_tokens(raw, stopwords).into_iter().map(|t| t.stem).collect(),
        source_len: raw.chars().count(),
    }
}
