mod common;

use std::collections::BTreeSet;

use hwv2w::entity::NlpEntry;
use hwv2w::ontology::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::oracle::{brute_force, entry, random_store, ORACLE_QUERIES};

fn nlp_dict() -> NlpEntry {
    entry("CVE-2020-2020", "GoogleChromeOS", "SpoofingAttack", 276)
}

const CWE_276_QUERY: &str = "PREFIX hw: <https://hwv2w.example/ontology/>
SELECT ?v ?t ?i WHERE {
    ?v hw:TargetsCWE CWE-276 .
    ?v Exploits ?t .
    ?t hasAttackImpact ?i
}";

#[test]
fn assert_single_entry() {
    let mut s = TripleStore::new();
    assert_eq!(s.assert_entry(&nlp_dict()).unwrap(), 4);
    assert_eq!(s.individual_count(), 4);
    assert_eq!(s.triple_count(), 4);
    assert_eq!(s.assert_entry(&nlp_dict()).unwrap(), 0);
    assert!(s.contains(&Triple::new("GoogleChromeOS", Property::HasVulnerability, "CVE-2020-2020")));
}

#[test]
fn shared_target_counts() {
    // V1, V2 share T; distinct impacts and CWEs:
    // individuals V1 V2 T I1 I2 C1 C2 = 7; triples 4 + 4 = 8 (nothing shared).
    // Same impact and CWE instead: V1 V2 T I C = 5 individuals; the
    // (T hasAttackImpact I) triple is shared, so 7 triples.
    let mut s = TripleStore::new();
    s.assert_entry(&entry("CVE-2021-0001", "Target", "ImpactA", 1)).unwrap();
    assert_eq!(s.assert_entry(&entry("CVE-2021-0002", "Target", "ImpactB", 2)).unwrap(), 4);
    assert_eq!((s.individual_count(), s.triple_count()), (7, 8));

    let mut s = TripleStore::new();
    s.assert_entry(&entry("CVE-2021-0001", "Target", "Impact", 1)).unwrap();
    assert_eq!(s.assert_entry(&entry("CVE-2021-0002", "Target", "Impact", 1)).unwrap(), 3);
    assert_eq!((s.individual_count(), s.triple_count()), (5, 7));
}

#[test]
fn class_clash_names_both_classes() {
    let mut s = TripleStore::new();
    s.assert_entry(&nlp_dict()).unwrap();
    let err = s
        .assert_entry(&entry("CVE-2020-0001", "SpoofingAttack", "X", 1))
        .unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("AttackImpact") && msg.contains("ExploitTarget"), "{msg}");
    // nothing was written
    assert!(s.individual("CVE-2020-0001").is_none());
    let err = TripleStore::new()
        .assert_entry(&entry("CVE-2020-0001", "Same", "Same", 1))
        .unwrap_err();
    assert!(matches!(err, OntologyError::ClassClash { .. }));
}

#[test]
fn validation_rules() {
    let s = TripleStore::from_entries([&nlp_dict()]).unwrap();
    let r = validate(&s);
    assert_eq!((r.error_count(), r.warning_count()), (0, 0));
    assert!(r.accepted());

    let mut s = TripleStore::new();
    s.add_individual("CVE-2020-0001", OntClass::Vulnerability).unwrap();
    let r = validate(&s);
    assert_eq!((r.error_count(), r.warning_count()), (0, 1));
    assert!(matches!(r.violations[0], Violation::MissingCwe { .. }));

    let mut s = TripleStore::from_entries([&nlp_dict()]).unwrap();
    assert!(s
        .assert_triple(Triple::new("CWE-276", Property::Exploits, "GoogleChromeOS"))
        .is_err());
    s.insert_unchecked(Triple::new("CWE-276", Property::Exploits, "GoogleChromeOS"));
    let r = validate(&s);
    assert_eq!(r.error_count(), 1);
    assert!(matches!(r.violations[0], Violation::Domain { .. }));
    assert!(!r.accepted());

    let mut s = TripleStore::new();
    s.insert_unchecked(Triple::new("A", Property::TargetsCWE, "B"));
    assert_eq!(validate(&s).error_count(), 2);

    let mut s = TripleStore::new();
    s.add_individual("CVE-2020-0001", OntClass::Vulnerability).unwrap();
    s.add_individual("CWE-1", OntClass::Cwe).unwrap();
    s.add_individual("T", OntClass::ExploitTarget).unwrap();
    s.assert_triple(Triple::new("CVE-2020-0001", Property::TargetsCWE, "CWE-1")).unwrap();
    s.assert_triple(Triple::new("CVE-2020-0001", Property::Exploits, "T")).unwrap();
    let r = validate(&s);
    assert_eq!((r.error_count(), r.warning_count()), (0, 1));
    assert!(matches!(r.violations[0], Violation::MissingImpact { .. }));
}

#[test]
fn reference_query() {
    let s = TripleStore::from_entries([&nlp_dict()]).unwrap();
    let b = query_text(&s, CWE_276_QUERY).unwrap();
    assert_eq!(b.vars, ["v", "t", "i"]);
    assert_eq!(b.rows, vec![vec!["CVE-2020-2020", "GoogleChromeOS", "SpoofingAttack"]]);
    assert!(query_text(&TripleStore::new(), CWE_276_QUERY).unwrap().is_empty());
}

#[test]
fn twelve_cwe_276_entries() {
    let entries: Vec<_> = (0..12)
        .map(|k| entry(&format!("CVE-2022-{:04}", 100 + k), &format!("Target{}", k % 5), "PermissionAbuse", 276))
        .chain((0..4).map(|k| entry(&format!("CVE-2022-{:04}", 900 + k), "Other", "Leak", 203)))
        .collect();
    let s = TripleStore::from_entries(&entries).unwrap();
    assert_eq!(query_text(&s, CWE_276_QUERY).unwrap().len(), 12);
}

#[test]
fn unknown_constants_and_membership() {
    let s = TripleStore::from_entries([&nlp_dict()]).unwrap();
    assert!(query_text(&s, "SELECT ?v WHERE { ?v TargetsCWE CWE-9999 }").unwrap().is_empty());
    assert!(query_text(&s, "SELECT ?v WHERE { ?v frobnicates ?x }").unwrap().is_empty());
    let hit = query_text(&s, "SELECT * WHERE { CVE-2020-2020 Exploits GoogleChromeOS . ?v a Vulnerability }").unwrap();
    assert_eq!(hit.rows, vec![vec!["CVE-2020-2020"]]);
    let miss = query_text(&s, "SELECT * WHERE { CVE-2020-2020 Exploits SpoofingAttack . ?v a Vulnerability }").unwrap();
    assert!(miss.is_empty());
    let preds = query_text(&s, "SELECT ?p WHERE { GoogleChromeOS ?p ?o }").unwrap();
    assert_eq!(preds.rows, vec![vec!["hasAttackImpact"], vec!["hasVulnerability"]]);
    let classes = query_text(&s, "SELECT ?x ?c WHERE { ?x rdf:type ?c }").unwrap();
    assert_eq!(classes.len(), 4);
}

#[test]
fn stats_counting_rule() {
    let st = stats(&TripleStore::new());
    assert_eq!(
        (st.individual_count, st.class_count, st.object_property_count, st.logical_axioms),
        (0, 4, 4, 8)
    );
    let mut s = TripleStore::from_entries([&nlp_dict()]).unwrap();
    let st = stats(&s);
    assert_eq!((st.individual_count, st.logical_axioms, st.declaration_axioms), (4, 12, 12));
    assert_eq!(st.axiom_count, 24);
    s.assert_entry(&nlp_dict()).unwrap();
    assert_eq!(stats(&s), st);
    s.set_subclass("GoogleChromeOS", Some("OperatingSystem".into())).unwrap();
    assert_eq!(stats(&s).class_count, 5);
}

#[test]
fn stats_additive_over_disjoint_union() {
    let a = [entry("CVE-2021-0001", "TA", "IA", 1), entry("CVE-2021-0002", "TB", "IA", 2)];
    let b = [entry("CVE-2021-0003", "TC", "IC", 3)];
    let sa = stats(&TripleStore::from_entries(&a).unwrap());
    let sb = stats(&TripleStore::from_entries(&b).unwrap());
    let su = stats(&TripleStore::from_entries(a.iter().chain(&b)).unwrap());
    let fixed = stats(&TripleStore::new());
    assert_eq!(su.individual_count, sa.individual_count + sb.individual_count);
    assert_eq!(
        su.logical_axioms - fixed.logical_axioms,
        (sa.logical_axioms - fixed.logical_axioms) + (sb.logical_axioms - fixed.logical_axioms)
    );
}

#[test]
fn ntriples_examples() {
    let empty = serialize_ntriples(&TripleStore::new());
    assert!(empty.lines().all(|l| !l.contains("/Vulnerability/")));
    assert_eq!(empty.lines().count(), 4 + 3 * 4);
    assert_eq!(parse_ntriples(&empty).unwrap(), TripleStore::new());

    let s = TripleStore::from_entries([&nlp_dict()]).unwrap();
    let text = serialize_ntriples(&s);
    let rel = text
        .lines()
        .filter(|l| Property::ALL.iter().any(|p| l.contains(&format!("/ontology/{}>", p.name()))))
        .filter(|l| !l.contains("rdf-syntax-ns#type") && !l.contains("rdf-schema#"))
        .count();
    assert_eq!(rel, 4);
    let mut lines: Vec<&str> = text.lines().collect();
    let sorted = {
        let mut l = lines.clone();
        l.sort();
        l
    };
    assert_eq!(lines, sorted);
    assert_eq!(parse_ntriples(&text).unwrap(), s);
    lines.push("<broken");
    let err = parse_ntriples(&lines.join("\n")).unwrap_err();
    assert_eq!(err.line, lines.len());
}

#[test]
fn names_needing_escapes_round_trip() {
    let s = TripleStore::from_entries([&entry("CVE-2020-0001", "Café/Router 2", "Leak \"keys\"", 9)]).unwrap();
    assert_eq!(parse_ntriples(&serialize_ntriples(&s)).unwrap(), s);
}

#[test]
fn story_examples() {
    let s = TripleStore::from_entries([&nlp_dict()]).unwrap();
    let st = story(&s, "GoogleChromeOs").unwrap();
    assert_eq!(st.start, "GoogleChromeOS");
    assert_eq!(
        st.paths,
        vec![StoryPath {
            vulnerability: "CVE-2020-2020".into(),
            target: "GoogleChromeOS".into(),
            impact: "SpoofingAttack".into(),
        }]
    );
    assert_eq!(st.cwe_edges.len(), 1);
    assert_eq!(st.cwe_edges[0].to, "CWE-276");
    assert_eq!(st.edges.len(), 3);
    assert_eq!(st.adjacency.len(), 4);
    assert_eq!(st.adjacency["CVE-2020-2020"].edges.len(), 2);

    assert!(matches!(story(&s, "Nope"), Err(OntologyError::UnknownIndividual(_))));
    let mut s2 = s.clone();
    s2.add_individual("Lonely", OntClass::AttackImpact).unwrap();
    assert!(story(&s2, "Lonely").unwrap().paths.is_empty());

    let st = story(&s, "CWE-276").unwrap();
    assert_eq!(st.paths.len(), 1);
}

#[test]
fn story_diamond() {
    let s = TripleStore::from_entries(&[
        entry("CVE-2021-0001", "Shared", "ImpactA", 1),
        entry("CVE-2021-0002", "Shared", "ImpactB", 2),
    ])
    .unwrap();
    let st = story(&s, "Shared").unwrap();
    assert_eq!(st.paths.len(), 4);
    assert_eq!(st.cwe_edges.len(), 2);
    assert_eq!(story(&s, "ImpactA").unwrap().paths.len(), 2);
    assert_eq!(story(&s, "CVE-2021-0001").unwrap().paths.len(), 2);
}

#[test]
fn shared_snapshot_swaps_atomically() {
    let shared = SharedOntology::default();
    let before = shared.snapshot();
    shared.update(|s| s.assert_entry(&nlp_dict())).unwrap();
    assert_eq!(before.triple_count(), 0);
    assert_eq!(shared.snapshot().triple_count(), 4);
    let r = shared.update(|s| s.assert_entry(&entry("CVE-2020-0001", "SpoofingAttack", "X", 1)));
    assert!(r.is_err());
    assert_eq!(shared.snapshot().individual_count(), 4);
    std::thread::scope(|sc| {
        for k in 0..4 {
            let shared = &shared;
            sc.spawn(move || {
                for j in 0..10 {
                    let e = entry(&format!("CVE-2023-{:04}", 1000 + k * 100 + j), "T", "I", 1);
                    shared.update(|s| s.assert_entry(&e)).unwrap();
                    let snap = shared.snapshot();
                    assert!(validate(&snap).accepted());
                }
            });
        }
    });
    assert_eq!(shared.snapshot().individual_count(), 4 + 40 + 3);
}

#[test]
fn ntriples_round_trip_random_stores() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = random_store(&mut rng, 100);
        if seed % 3 == 0 {
            let t = s.individuals().find(|i| i.class == OntClass::ExploitTarget).unwrap().name.clone();
            s.set_subclass(&t, Some(format!("Kind {seed}"))).unwrap();
        }
        assert_eq!(parse_ntriples(&serialize_ntriples(&s)).unwrap(), s, "seed {seed}");
    }
}

#[test]
fn every_asserted_triple_satisfies_domain_range() {
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_store(&mut rng, 60);
        for t in s.triples() {
            assert_eq!(s.individual(&t.subject).unwrap().class, t.predicate.domain());
            assert_eq!(s.individual(&t.object).unwrap().class, t.predicate.range());
        }
        assert!(validate(&s).accepted());
    }
}

#[test]
fn query_matches_nested_loop_join() {
    for seed in 0..12u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let s = random_store(&mut rng, 250);
        assert!(s.triple_count() <= 1000);
        for text in ORACLE_QUERIES {
            let q = parse_query(text).unwrap();
            let got: BTreeSet<Vec<String>> = query(&s, &q).rows.into_iter().collect();
            assert_eq!(got, brute_force(&s, &q), "seed {seed}: {text}");
        }
    }
}

proptest! {
    #[test]
    fn reassertion_is_idempotent(ids in proptest::collection::vec((0u32..30, 0u32..5, 0u32..5, 1u32..8), 1..40)) {
        let entries: Vec<_> = ids
            .iter()
            .map(|(v, t, i, c)| entry(&format!("CVE-2020-{:04}", 1000 + v), &format!("T{t}"), &format!("I{i}"), *c))
            .collect();
        let mut s = TripleStore::from_entries(&entries).unwrap();
        let before = stats(&s);
        for e in &entries {
            prop_assert_eq!(s.assert_entry(e).unwrap(), 0);
        }
        prop_assert_eq!(stats(&s), before);
        prop_assert!(validate(&s).accepted());
    }
}
