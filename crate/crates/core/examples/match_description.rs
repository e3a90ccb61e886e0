//! Rank corpus CVEs against a free-text description.
//!
//!     cargo run --example match_description -- "JTAG port left enabled"

use std::path::Path;

use hwv2w::entity::{build_index, cwe_distribution, rank_similar};
use hwv2w::service::pipeline;
use hwv2w::text::Stopwords;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let query = std::env::args().nth(1).unwrap_or_else(|| "electromagnetic side-channel".into());
    let (snap, _) = pipeline::ingest(&[root.join("nvd/hw_feed.json")], None, None, true)?;
    let sw = Stopwords::bundled();
    let index = build_index(&snap, &sw)?;

    let matches = rank_similar(&query, &index, 5, &sw)?;
    for m in &matches {
        println!("{:.4}  {:<9?} {}  {}", m.similarity, m.relevance_band, m.cve_id.as_str(), m.description);
    }
    let dist = cwe_distribution(&matches);
    println!("\nCWE counts: {:?}", dist.counts.iter().map(|(c, n)| format!("{c}={n}")).collect::<Vec<_>>());
    if let Some(modal) = dist.modal {
        println!("modal CWE: {modal}");
    }
    Ok(())
}
