use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::index::SimilarityMatch;
use super::EntityError;
use crate::corpus::CweId;

pub const HIGH_THRESHOLD: f64 = 0.40;
pub const MODERATE_THRESHOLD: f64 = 0.30;

/// Ordered so that `Somewhat < Moderate < High`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RelevanceBand {
    Somewhat,
    Moderate,
    High,
}

impl fmt::Display for RelevanceBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelevanceBand::Somewhat => "SOMEWHAT",
            RelevanceBand::Moderate => "MODERATE",
            RelevanceBand::High => "HIGH",
        })
    }
}

pub fn classify_relevance(similarity: f64) -> Result<RelevanceBand, EntityError> {
    if !(0.0..=1.0).contains(&similarity) {
        return Err(EntityError::SimilarityOutOfRange(similarity));
    }
    Ok(if similarity >= HIGH_THRESHOLD {
        RelevanceBand::High
    } else if similarity >= MODERATE_THRESHOLD {
        RelevanceBand::Moderate
    } else {
        RelevanceBand::Somewhat
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CweDistribution {
    pub counts: BTreeMap<CweId, usize>,
    pub similarity_sums: BTreeMap<CweId, f64>,
    /// `None` only when no match carries a CWE.
    pub modal: Option<CweId>,
}

/// Counts CWE tags across matches; the modal id wins on count, then summed
/// similarity, then the smaller id.
pub fn cwe_distribution(matches: &[SimilarityMatch]) -> CweDistribution {
    let mut counts = BTreeMap::new();
    let mut sums = BTreeMap::new();
    for m in matches {
        for &c in &m.cwe_ids {
            *counts.entry(c).or_insert(0usize) += 1;
            *sums.entry(c).or_insert(0.0) += m.similarity;
        }
    }
    let modal = counts
        .iter()
        .max_by(|(a, ca), (b, cb)| {
            ca.cmp(cb)
                .then_with(|| sums[*a].total_cmp(&sums[*b]))
                .then_with(|| b.cmp(a))
        })
        .map(|(c, _)| *c);
    CweDistribution {
        counts,
        similarity_sums: sums,
        modal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(id: &str, sim: f64, cwes: &[u32]) -> SimilarityMatch {
        SimilarityMatch {
            cve_id: id.parse().unwrap(),
            similarity: sim,
            relevance_band: classify_relevance(sim).unwrap(),
            cwe_ids: cwes.iter().map(|&n| CweId::new(n)).collect(),
            description: String::new(),
            cvss_vector: None,
        }
    }

    #[test]
    fn bands() {
        assert_eq!(classify_relevance(0.5569).unwrap(), RelevanceBand::High);
        assert_eq!(classify_relevance(0.40).unwrap(), RelevanceBand::High);
        assert_eq!(classify_relevance(0.35).unwrap(), RelevanceBand::Moderate);
        assert_eq!(classify_relevance(0.30).unwrap(), RelevanceBand::Moderate);
        assert_eq!(classify_relevance(0.2999).unwrap(), RelevanceBand::Somewhat);
        assert!(classify_relevance(1.01).is_err());
        assert!(classify_relevance(-0.1).is_err());
        assert!(classify_relevance(f64::NAN).is_err());
    }

    #[test]
    fn modal_by_count() {
        let d = cwe_distribution(&[m("CVE-2020-0001", 0.5, &[203]), m("CVE-2020-0002", 0.3, &[203])]);
        assert_eq!(d.modal, Some(CweId::new(203)));
        assert_eq!(d.counts[&CweId::new(203)], 2);
    }

    #[test]
    fn modal_tie_by_similarity_then_id() {
        let d = cwe_distribution(&[
            m("CVE-2020-0001", 0.2, &[10, 20]),
            m("CVE-2020-0002", 0.5, &[20]),
            m("CVE-2020-0003", 0.1, &[10]),
        ]);
        assert_eq!(d.modal, Some(CweId::new(20)));
        let d = cwe_distribution(&[m("CVE-2020-0001", 0.2, &[30, 10])]);
        assert_eq!(d.modal, Some(CweId::new(10)));
        assert_eq!(cwe_distribution(&[m("CVE-2020-0001", 0.2, &[])]).modal, None);
    }
}
