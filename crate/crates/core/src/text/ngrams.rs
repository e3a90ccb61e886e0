use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub type Ngram = Vec<String>;

/// Frequency tables for contiguous 2-, 3- and 4-token windows.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgramSet {
    pub bigrams: BTreeMap<Ngram, usize>,
    pub trigrams: BTreeMap<Ngram, usize>,
    pub quadgrams: BTreeMap<Ngram, usize>,
    pub total_tokens: usize,
}

impl NgramSet {
    pub fn bucket(&self, n: usize) -> Option<&BTreeMap<Ngram, usize>> {
        match n {
            2 => Some(&self.bigrams),
            3 => Some(&self.trigrams),
            4 => Some(&self.quadgrams),
            _ => None,
        }
    }

    /// Sum of frequencies in a bucket (window count).
    pub fn window_count(&self, n: usize) -> usize {
        self.bucket(n).map(|b| b.values().sum()).unwrap_or(0)
    }

    pub fn frequency(&self, ngram: &[String]) -> usize {
        self.bucket(ngram.len())
            .and_then(|b| b.get(ngram))
            .copied()
            .unwrap_or(0)
    }

    /// Adds another stream's windows; streams are not joined across boundaries.
    pub fn merge(&mut self, other: &NgramSet) {
        for (mine, theirs) in [
            (&mut self.bigrams, &other.bigrams),
            (&mut self.trigrams, &other.trigrams),
            (&mut self.quadgrams, &other.quadgrams),
        ] {
            for (k, v) in theirs {
                *mine.entry(k.clone()).or_insert(0) += v;
            }
        }
        self.total_tokens += other.total_tokens;
    }
}

pub fn extract_ngrams<S: AsRef<str>>(tokens: &[S]) -> NgramSet {
    let toks: Vec<String> = tokens.iter().map(|t| t.as_ref().to_string()).collect();
    let mut set = NgramSet {
        total_tokens: toks.len(),
        ..NgramSet::default()
    };
    for (n, bucket) in [(2, &mut set.bigrams), (3, &mut set.trigrams), (4, &mut set.quadgrams)] {
        for w in toks.windows(n) {
            *bucket.entry(w.to_vec()).or_insert(0) += 1;
        }
    }
    set
}

/// Most frequent n-grams first; ties go to lower arity, then earlier first
/// occurrence in `tokens`.
pub fn most_common<S: AsRef<str>>(tokens: &[S], set: &NgramSet) -> Vec<(Ngram, usize)> {
    let toks: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
    let mut first_seen: BTreeMap<Ngram, usize> = BTreeMap::new();
    for n in 2..=4 {
        for (i, w) in toks.windows(n).enumerate() {
            first_seen
                .entry(w.iter().map(|s| s.to_string()).collect())
                .or_insert(i);
        }
    }
    let mut all: Vec<(Ngram, usize)> = [&set.bigrams, &set.trigrams, &set.quadgrams]
        .into_iter()
        .flat_map(|b| b.iter().map(|(k, v)| (k.clone(), *v)))
        .collect();
    all.sort_by(|(a, fa), (b, fb)| {
        fb.cmp(fa)
            .then(a.len().cmp(&b.len()))
            .then_with(|| {
                let pa = first_seen.get(a).copied().unwrap_or(usize::MAX);
                let pb = first_seen.get(b).copied().unwrap_or(usize::MAX);
                pa.cmp(&pb)
            })
            .then_with(|| a.cmp(b))
    });
    all
}
