use std::collections::BTreeMap;

use super::SeverityError;
use crate::corpus::{CvssVector, METRIC_NAMES};
use crate::entity::SimilarityMatch;

/// Per-metric majority vote over the matches that carry a vector. A tie is
/// won by the value held by the most similar voter (earlier position on
/// equal similarity).
pub fn majority_vector(matches: &[SimilarityMatch]) -> Result<CvssVector, SeverityError> {
    let voters: Vec<(f64, usize, [char; 8])> = matches
        .iter()
        .enumerate()
        .filter_map(|(pos, m)| m.cvss_vector.map(|v| (m.similarity, pos, v.codes())))
        .collect();
    if voters.is_empty() {
        return Err(SeverityError::NoCvssEvidence);
    }
    let mut out = String::from("CVSS:3.1");
    for (k, name) in METRIC_NAMES.iter().enumerate() {
        // value -> (votes, best (similarity, -position))
        let mut tally: BTreeMap<char, (usize, f64, usize)> = BTreeMap::new();
        for &(sim, pos, codes) in &voters {
            let e = tally.entry(codes[k]).or_insert((0, f64::NEG_INFINITY, usize::MAX));
            e.0 += 1;
            if sim > e.1 || (sim == e.1 && pos < e.2) {
                e.1 = sim;
                e.2 = pos;
            }
        }
        let (code, _) = tally
            .iter()
            .max_by(|(_, a), (_, b)| {
                a.0.cmp(&b.0)
                    .then_with(|| a.1.total_cmp(&b.1))
                    .then_with(|| b.2.cmp(&a.2))
            })
            .expect("at least one voter");
        out.push_str(&format!("/{name}:{code}"));
    }
    Ok(out.parse().expect("codes come from legal vectors"))
}
