//! Collocation ranking with Dunning's log-likelihood ratio.
//!
//! Bigram statistics come from the 2×2 contingency table built over the bigram
//! windows themselves: `o11` is the pair count, row/column marginals are the
//! number of windows starting with `w1` / ending with `w2`, and `N` is the
//! total window count. Longer n-grams take the minimum over their adjacent
//! bigram links.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::ngrams::{Ngram, NgramSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollocationScore {
    pub ngram: Ngram,
    /// Log-likelihood ratio statistic (G²); the ranking key.
    pub score: f64,
    /// Pointwise mutual information in bits, for inspection only.
    pub pmi: f64,
    pub frequency: usize,
}

/// Entries of a 2×2 contingency table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contingency {
    pub o11: f64,
    pub o12: f64,
    pub o21: f64,
    pub o22: f64,
}

impl Contingency {
    pub fn from_marginals(pair: usize, first: usize, second: usize, total: usize) -> Self {
        let (n11, n1x, nx1, n) = (pair as f64, first as f64, second as f64, total as f64);
        Contingency {
            o11: n11,
            o12: n1x - n11,
            o21: nx1 - n11,
            o22: n - n1x - nx1 + n11,
        }
    }

    /// G² = 2 Σ O ln(O / E), with 0·ln 0 taken as 0.
    pub fn log_likelihood_ratio(&self) -> f64 {
        let r1 = self.o11 + self.o12;
        let r2 = self.o21 + self.o22;
        let c1 = self.o11 + self.o21;
        let c2 = self.o12 + self.o22;
        let n = r1 + r2;
        if n <= 0.0 {
            return 0.0;
        }
        let term = |o: f64, row: f64, col: f64| {
            if o <= 0.0 {
                0.0
            } else {
                o * (o * n / (row * col)).ln()
            }
        };
        let g = 2.0
            * (term(self.o11, r1, c1) + term(self.o12, r1, c2) + term(self.o21, r2, c1) + term(self.o22, r2, c2));
        // clamp tiny negative rounding residue
        g.max(0.0)
    }

    pub fn pmi(&self) -> f64 {
        let n = self.o11 + self.o12 + self.o21 + self.o22;
        let r1 = self.o11 + self.o12;
        let c1 = self.o11 + self.o21;
        (self.o11 * n / (r1 * c1)).log2()
    }
}

struct BigramStats {
    llr: HashMap<Ngram, f64>,
    pmi: HashMap<Ngram, f64>,
}

fn bigram_stats(set: &NgramSet) -> BigramStats {
    let mut first: HashMap<&str, usize> = HashMap::new();
    let mut second: HashMap<&str, usize> = HashMap::new();
    let mut total = 0usize;
    for (bg, &f) in &set.bigrams {
        *first.entry(bg[0].as_str()).or_insert(0) += f;
        *second.entry(bg[1].as_str()).or_insert(0) += f;
        total += f;
    }
    let mut llr = HashMap::new();
    let mut pmi = HashMap::new();
    for (bg, &f) in &set.bigrams {
        let t = Contingency::from_marginals(f, first[bg[0].as_str()], second[bg[1].as_str()], total);
        llr.insert(bg.clone(), t.log_likelihood_ratio());
        pmi.insert(bg.clone(), t.pmi());
    }
    BigramStats { llr, pmi }
}

fn min_over_links(ngram: &[String], table: &HashMap<Ngram, f64>) -> f64 {
    ngram
        .windows(2)
        .map(|w| table.get(w).copied().unwrap_or(0.0))
        .fold(f64::INFINITY, f64::min)
}

/// Total ranking order: score desc, frequency desc, tuple ascending.
pub fn ranking_order(a: &CollocationScore, b: &CollocationScore) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(b.frequency.cmp(&a.frequency))
        .then_with(|| a.ngram.cmp(&b.ngram))
}

/// Scores every bigram, trigram and quadgram and returns them ranked.
pub fn score_collocations(set: &NgramSet) -> Vec<CollocationScore> {
    let stats = bigram_stats(set);
    let mut out: Vec<CollocationScore> = Vec::new();
    for bucket in [&set.bigrams, &set.trigrams, &set.quadgrams] {
        for (ng, &f) in bucket {
            out.push(CollocationScore {
                ngram: ng.clone(),
                score: min_over_links(ng, &stats.llr),
                pmi: min_over_links(ng, &stats.pmi),
                frequency: f,
            });
        }
    }
    out.sort_by(ranking_order);
    out
}

/// Bigram-only scores keyed by tuple, handy for inspection.
pub fn bigram_scores(set: &NgramSet) -> BTreeMap<Ngram, f64> {
    bigram_stats(set).llr.into_iter().collect()
}
