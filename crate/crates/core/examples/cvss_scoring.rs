//! Score CVSS v3.1 vectors and combine several by majority vote.
//!
//!     cargo run --example cvss_scoring -- CVSS:3.1/AV:P/AC:H/PR:N/UI:N/S:U/C:H/I:N/A:N

use hwv2w::corpus::CvssVector;
use hwv2w::entity::{classify_relevance, SimilarityMatch};
use hwv2w::severity::{base_score, majority_vector};

fn voter(sim: f64, v: &str) -> SimilarityMatch {
    SimilarityMatch {
        cve_id: "CVE-2020-0001".parse().unwrap(),
        similarity: sim,
        relevance_band: classify_relevance(sim).unwrap(),
        cwe_ids: vec![],
        description: String::new(),
        cvss_vector: Some(v.parse().unwrap()),
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let vectors = if args.is_empty() {
        vec![
            "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H".to_string(),
            "CVSS:3.1/AV:P/AC:H/PR:H/UI:R/S:U/C:L/I:N/A:N".to_string(),
            "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:C/C:H/I:H/A:H".to_string(),
        ]
    } else {
        args
    };
    for s in &vectors {
        let v: CvssVector = s.parse()?;
        let t = base_score(&v);
        println!("{v}  exploitability {:.1}  impact {:.1}  base {:.1}  {}", t.exploitability, t.impact, t.base, t.rating);
    }

    let voters = [
        voter(0.62, "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"),
        voter(0.55, "CVSS:3.1/AV:L/AC:H/PR:L/UI:N/S:U/C:H/I:N/A:N"),
        voter(0.48, "CVSS:3.1/AV:N/AC:H/PR:N/UI:R/S:C/C:L/I:N/A:N"),
        voter(0.41, "CVSS:3.1/AV:L/AC:L/PR:H/UI:R/S:U/C:H/I:L/A:N"),
        voter(0.33, "CVSS:3.1/AV:P/AC:H/PR:L/UI:N/S:C/C:N/I:L/A:H"),
    ];
    let v = majority_vector(&voters)?;
    println!("\nmajority of 5 voters: {v}  -> {}", base_score(&v).rating);
    Ok(())
}
