//! Build the ontology from the fixture corpus, validate it, query it and
//! narrate the story around one exploit target.

use std::path::Path;

use hwv2w::ontology::{query_text, serialize_ntriples, stats, story, validate};
use hwv2w::service::pipeline;
use hwv2w::text::Dictionaries;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let (snap, _) = pipeline::ingest(&[root.join("nvd/hw_feed.json")], None, None, true)?;
    let (store, skipped) = pipeline::build_ontology(&snap, &Dictionaries::bundled());
    let report = validate(&store);
    println!(
        "{} individuals, {} triples, {} skipped, {} errors, {} warnings",
        store.individual_count(),
        store.triple_count(),
        skipped.len(),
        report.error_count(),
        report.warning_count()
    );
    println!("{:?}\n", stats(&store));

    let q = "SELECT ?v ?t ?i WHERE { ?v TargetsCWE CWE-276 . ?v Exploits ?t . ?t hasAttackImpact ?i }";
    for row in query_text(&store, q)?.rows {
        println!("{}", row.join("  "));
    }

    let start = std::env::args().nth(1).unwrap_or_else(|| "GoogleChromeOs".into());
    let s = story(&store, &start)?;
    println!("\nstory from {}:", s.start);
    for p in &s.paths {
        println!("  {} -Exploits-> {} -hasAttackImpact-> {}", p.vulnerability, p.target, p.impact);
    }
    for e in &s.cwe_edges {
        println!("  {} -TargetsCWE-> {}", e.from, e.to);
    }

    println!("\nN-Triples (first lines):");
    for line in serialize_ntriples(&store).lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
