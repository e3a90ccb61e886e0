use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::store::{OntClass, Property, TripleStore};
use super::OntologyError;

/// Vulnerability → ExploitTarget → AttackImpact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StoryPath {
    pub vulnerability: String,
    pub target: String,
    pub impact: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StoryEdge {
    pub from: String,
    pub predicate: Property,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyNode {
    pub class: OntClass,
    pub edges: Vec<AdjacencyEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyEdge {
    pub predicate: Property,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Story {
    /// The resolved start name (may differ in case from the request).
    pub start: String,
    pub paths: Vec<StoryPath>,
    /// TargetsCWE side edges of the vulnerabilities on the paths.
    pub cwe_edges: Vec<StoryEdge>,
    /// Every edge of the story, path edges first in path order.
    pub edges: Vec<StoryEdge>,
    pub adjacency: BTreeMap<String, AdjacencyNode>,
}

/// All V→T→I paths that touch `start` (or whose vulnerability targets it,
/// when `start` is a CWE), plus the CWE edges hanging off those paths.
pub fn story(store: &TripleStore, start: &str) -> Result<Story, OntologyError> {
    let ind = store
        .resolve_name(start)
        .ok_or_else(|| OntologyError::UnknownIndividual(start.to_string()))?;
    let start = ind.name.clone();
    let cwes_of = |v: &str| -> BTreeSet<String> {
        store
            .with_subject(v)
            .filter(|t| t.predicate == Property::TargetsCWE)
            .map(|t| t.object.clone())
            .collect()
    };
    let mut paths = BTreeSet::new();
    for ex in store.with_predicate(Property::Exploits) {
        for imp in store
            .with_subject(&ex.object)
            .filter(|t| t.predicate == Property::HasAttackImpact)
        {
            let touches = [&ex.subject, &ex.object, &imp.object].contains(&&start)
                || (ind.class == OntClass::Cwe && cwes_of(&ex.subject).contains(&start));
            if touches {
                paths.insert(StoryPath {
                    vulnerability: ex.subject.clone(),
                    target: ex.object.clone(),
                    impact: imp.object.clone(),
                });
            }
        }
    }
    let paths: Vec<StoryPath> = paths.into_iter().collect();
    let vulns: BTreeSet<&str> = paths.iter().map(|p| p.vulnerability.as_str()).collect();
    let cwe_edges: Vec<StoryEdge> = vulns
        .iter()
        .flat_map(|v| {
            cwes_of(v).into_iter().map(move |c| StoryEdge {
                from: v.to_string(),
                predicate: Property::TargetsCWE,
                to: c,
            })
        })
        .collect();
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for p in &paths {
        for e in [
            StoryEdge {
                from: p.vulnerability.clone(),
                predicate: Property::Exploits,
                to: p.target.clone(),
            },
            StoryEdge {
                from: p.target.clone(),
                predicate: Property::HasAttackImpact,
                to: p.impact.clone(),
            },
        ] {
            if seen.insert(e.clone()) {
                edges.push(e);
            }
        }
    }
    edges.extend(cwe_edges.iter().cloned());
    let mut adjacency: BTreeMap<String, AdjacencyNode> = BTreeMap::new();
    let class_of = |n: &str| store.individual(n).map(|i| i.class);
    for e in &edges {
        for n in [&e.from, &e.to] {
            if let Some(class) = class_of(n) {
                adjacency.entry(n.clone()).or_insert_with(|| AdjacencyNode {
                    class,
                    edges: Vec::new(),
                });
            }
        }
        if let Some(node) = adjacency.get_mut(&e.from) {
            node.edges.push(AdjacencyEdge {
                predicate: e.predicate,
                to: e.to.clone(),
            });
        }
    }
    Ok(Story {
        start,
        paths,
        cwe_edges,
        edges,
        adjacency,
    })
}
