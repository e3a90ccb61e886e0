use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::relevance::{classify_relevance, RelevanceBand};
use super::EntityError;
use crate::corpus::{CorpusSnapshot, CveId, CvssVector, CweId};
use crate::text::{string_clean, Stopwords};

pub const DEFAULT_TOP_K: usize = 5;

/// Sparse TF-IDF vector of one description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentVector {
    cve_id: CveId,
    weights: BTreeMap<String, f64>,
    norm: f64,
}

impl DocumentVector {
    /// Zero and negative weights are dropped; the norm is recomputed.
    pub fn new(cve_id: CveId, weights: BTreeMap<String, f64>) -> Self {
        let weights: BTreeMap<String, f64> = weights.into_iter().filter(|(_, w)| *w > 0.0).collect();
        let norm = weights.values().map(|w| w * w).sum::<f64>().sqrt();
        DocumentVector { cve_id, weights, norm }
    }

    pub fn cve_id(&self) -> &CveId {
        &self.cve_id
    }

    pub fn weights(&self) -> &BTreeMap<String, f64> {
        &self.weights
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn weight(&self, term: &str) -> f64 {
        self.weights.get(term).copied().unwrap_or(0.0)
    }

    /// Cosine against a query map; 0 when either side has zero norm.
    pub fn cosine(&self, query: &BTreeMap<String, f64>, query_norm: f64) -> f64 {
        if self.norm == 0.0 || query_norm == 0.0 {
            return 0.0;
        }
        let (small, large) = if query.len() <= self.weights.len() {
            (query, &self.weights)
        } else {
            (&self.weights, query)
        };
        let dot: f64 = small
            .iter()
            .filter_map(|(t, w)| large.get(t).map(|v| w * v))
            .sum();
        (dot / (self.norm * query_norm)).clamp(0.0, 1.0)
    }
}

/// Per-document data carried alongside the vector so matches can be
/// reported without the original snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentMeta {
    pub description: String,
    pub cwe_ids: Vec<CweId>,
    pub cvss_vector: Option<CvssVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatch {
    pub cve_id: CveId,
    pub similarity: f64,
    pub relevance_band: RelevanceBand,
    pub cwe_ids: Vec<CweId>,
    pub description: String,
    pub cvss_vector: Option<CvssVector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityIndex {
    pub(crate) version_tag: String,
    pub(crate) idf: BTreeMap<String, f64>,
    pub(crate) docs: Vec<DocumentVector>,
    pub(crate) meta: Vec<DocumentMeta>,
}

fn term_counts(tokens: &[String]) -> BTreeMap<String, usize> {
    let mut tf = BTreeMap::new();
    for t in tokens {
        *tf.entry(t.clone()).or_insert(0) += 1;
    }
    tf
}

impl SimilarityIndex {
    pub(crate) fn from_parts(
        version_tag: String,
        idf: BTreeMap<String, f64>,
        docs: Vec<DocumentVector>,
        meta: Vec<DocumentMeta>,
    ) -> Self {
        SimilarityIndex {
            version_tag,
            idf,
            docs,
            meta,
        }
    }

    pub fn version_tag(&self) -> &str {
        &self.version_tag
    }

    pub fn idf(&self) -> &BTreeMap<String, f64> {
        &self.idf
    }

    pub fn documents(&self) -> &[DocumentVector] {
        &self.docs
    }

    pub fn meta(&self) -> &[DocumentMeta] {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Query vector under this index's idf table. Unknown terms get weight 0.
    pub fn vectorize(&self, tokens: &[String]) -> BTreeMap<String, f64> {
        term_counts(tokens)
            .into_iter()
            .filter_map(|(t, c)| {
                let w = c as f64 * self.idf.get(&t).copied().unwrap_or(0.0);
                (w > 0.0).then_some((t, w))
            })
            .collect()
    }

    /// Multiplies every stored weight (and norm) by `factor` > 0.
    pub fn scale_weights(&mut self, factor: f64) {
        assert!(factor > 0.0, "scale factor must be positive");
        for d in &mut self.docs {
            d.weights.values_mut().for_each(|w| *w *= factor);
            d.norm *= factor;
        }
    }
}

/// TF-IDF with raw term counts and idf = ln(N / df).
pub fn build_index(snapshot: &CorpusSnapshot, stopwords: &Stopwords) -> Result<SimilarityIndex, EntityError> {
    if snapshot.is_empty() {
        return Err(EntityError::EmptyCorpus);
    }
    let n = snapshot.len() as f64;
    let counts: Vec<BTreeMap<String, usize>> = snapshot
        .cves
        .iter()
        .map(|r| term_counts(&string_clean(&r.description, stopwords).tokens))
        .collect();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for tf in &counts {
        for t in tf.keys() {
            *df.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let idf: BTreeMap<String, f64> = df
        .into_iter()
        .map(|(t, d)| (t.to_string(), (n / d as f64).ln()))
        .collect();
    let docs = snapshot
        .cves
        .iter()
        .zip(&counts)
        .map(|(r, tf)| {
            let w = tf.iter().map(|(t, &c)| (t.clone(), c as f64 * idf[t])).collect();
            DocumentVector::new(r.cve_id.clone(), w)
        })
        .collect();
    let meta = snapshot
        .cves
        .iter()
        .map(|r| DocumentMeta {
            description: r.description.clone(),
            cwe_ids: r.cwe_ids.clone(),
            cvss_vector: r.cvss_vector,
        })
        .collect();
    Ok(SimilarityIndex {
        version_tag: snapshot.version_tag.clone(),
        idf,
        docs,
        meta,
    })
}

/// Top-k by cosine similarity, ties by CVE id ascending.
pub fn rank_similar(
    query: &str,
    index: &SimilarityIndex,
    k: usize,
    stopwords: &Stopwords,
) -> Result<Vec<SimilarityMatch>, EntityError> {
    if k == 0 {
        return Err(EntityError::ZeroK);
    }
    let cleaned = string_clean(query, stopwords);
    if cleaned.is_empty() {
        return Err(EntityError::EmptyQuery);
    }
    let q = index.vectorize(&cleaned.tokens);
    let qn = q.values().map(|w| w * w).sum::<f64>().sqrt();
    let mut scored: Vec<(f64, usize)> = index
        .docs
        .iter()
        .enumerate()
        .map(|(i, d)| (d.cosine(&q, qn), i))
        .collect();
    scored.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then_with(|| index.docs[a.1].cve_id.cmp(&index.docs[b.1].cve_id))
    });
    scored
        .into_iter()
        .take(k)
        .map(|(s, i)| {
            let m = &index.meta[i];
            Ok(SimilarityMatch {
                cve_id: index.docs[i].cve_id.clone(),
                similarity: s,
                relevance_band: classify_relevance(s)?,
                cwe_ids: m.cwe_ids.clone(),
                description: m.description.clone(),
                cvss_vector: m.cvss_vector,
            })
        })
        .collect()
}
