//! Cleaning, n-grams, collocations, tagging and entity recognition on one
//! description, ending with the target/impact pair that feeds the ontology.

use hwv2w::corpus::{CveRecord, CweId};
use hwv2w::entity::{attack_impact, exploit_target, make_nlp_entry};
use hwv2w::text::{clean_tokens, extract_ngrams, pos_tag, recognize_entities, score_collocations, Dictionaries};

const DESCRIPTION: &str = "Samsung Galaxy S3/S4 exposes an unprotected component that allows arbitrary SMS text \
                           messages without requesting permission.";

fn main() {
    let dicts = Dictionaries::bundled();
    let text = std::env::args().nth(1).unwrap_or_else(|| DESCRIPTION.to_string());

    let toks = clean_tokens(&text, &dicts.stopwords);
    let stems: Vec<&str> = toks.iter().map(|t| t.stem.as_str()).collect();
    println!("stems: {}", stems.join(" "));

    let surfaces: Vec<String> = toks.iter().map(|t| t.surface.clone()).collect();
    let tags: Vec<String> = pos_tag(&surfaces, &dicts.lexicon).iter().map(|t| format!("{}/{:?}", t.token, t.tag)).collect();
    println!("tags:  {}", tags.join(" "));

    println!("\ntop collocations:");
    for c in score_collocations(&extract_ngrams(&stems)).iter().take(5) {
        println!("  {:<32} G2 {:>8.4}  pmi {:>6.3}  n={}", c.ngram.join(" "), c.score, c.pmi, c.frequency);
    }

    println!("\nentities:");
    for e in recognize_entities(&text, &dicts.cpe, &dicts.gazetteer) {
        println!("  {:?} {:?}", e.kind, e.surface);
    }

    let record = CveRecord {
        cve_id: "CVE-2013-4763".parse().unwrap(),
        description: text,
        published_year: 2013,
        cwe_ids: vec![CweId::new(264)],
        cvss_vector: None,
        cpe_names: vec![],
    };
    println!("\ntarget: {}", exploit_target(&record, &dicts));
    println!("impact: {}", attack_impact(&record, &dicts));
    for e in make_nlp_entry(&record, &dicts) {
        println!("{}", serde_json::to_string(&e).unwrap());
    }
}
