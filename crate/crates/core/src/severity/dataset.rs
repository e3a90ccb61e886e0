use sha2::{Digest, Sha256};

use super::score::{base_score, Rating};
use crate::corpus::{CorpusSnapshot, CveId, CvssVector};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledVector {
    pub cve_id: CveId,
    pub vector: CvssVector,
    pub rating: Rating,
}

/// Every record with a vector, labeled by the rating band of its base score.
pub fn labeled_vectors(snap: &CorpusSnapshot) -> Vec<LabeledVector> {
    snap.cves
        .iter()
        .filter_map(|r| {
            r.cvss_vector.map(|v| LabeledVector { cve_id: r.cve_id.clone(), vector: v, rating: base_score(&v).rating })
        })
        .collect()
}

/// Stable per-id bucket in `0..1000`.
fn bucket(id: &CveId) -> u32 {
    let d = Sha256::digest(id.to_string().as_bytes());
    u32::from_be_bytes([d[0], d[1], d[2], d[3]]) % 1000
}

/// Deterministic train/test split keyed on the CVE id, so a record lands
/// in the same half regardless of corpus order.
pub fn split_train_test(data: &[LabeledVector], test_permille: u32) -> (Vec<LabeledVector>, Vec<LabeledVector>) {
    data.iter().cloned().partition(|d| bucket(&d.cve_id) >= test_permille)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(n: u32) -> LabeledVector {
        let v: CvssVector = "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H".parse().unwrap();
        LabeledVector { cve_id: format!("CVE-2020-{n:04}").parse().unwrap(), vector: v, rating: Rating::Critical }
    }

    #[test]
    fn split_is_order_independent() {
        let data: Vec<_> = (1..200).map(lv).collect();
        let (tr, te) = split_train_test(&data, 200);
        assert_eq!(tr.len() + te.len(), data.len());
        assert!(!te.is_empty() && !tr.is_empty());
        let mut rev = data.clone();
        rev.reverse();
        let (_, te2) = split_train_test(&rev, 200);
        let mut a: Vec<_> = te.iter().map(|d| d.cve_id.to_string()).collect();
        let mut b: Vec<_> = te2.iter().map(|d| d.cve_id.to_string()).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}
