//! Parse an NVD JSON feed plus the CWE catalog and keep the hardware subset.
//!
//!     cargo run --example ingest_feed [feed.json ...]

use std::path::{Path, PathBuf};

use hwv2w::service::pipeline;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut feeds: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    if feeds.is_empty() {
        feeds.push(root.join("nvd/hw_feed.json"));
    }
    let (snap, summary) = pipeline::ingest(&feeds, Some(&root.join("cwe_catalog.csv")), None, true)?;
    println!(
        "{} items read, {} skipped, {} hardware records, version {}",
        summary.items_read,
        summary.skipped,
        snap.cves.len(),
        snap.version_tag
    );
    for c in &snap.cves {
        let cwes: Vec<String> = c.cwe_ids.iter().map(|w| w.to_string()).collect();
        let vector = c.cvss_vector.map(|v| v.to_string()).unwrap_or_default();
        println!("{:<16} {:<10} {}", c.cve_id.as_str(), cwes.join(","), vector);
    }
    for w in summary.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
