use serde::{Deserialize, Serialize};

use super::store::{OntClass, Property, Triple, TripleStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Violation {
    Domain { triple: Triple, found: OntClass },
    Range { triple: Triple, found: OntClass },
    Dangling { triple: Triple, missing: String },
    /// A vulnerability with no TargetsCWE edge.
    MissingCwe { vulnerability: String },
    /// An exploited target with no hasAttackImpact edge.
    MissingImpact { target: String },
}

impl Violation {
    pub fn severity(&self) -> Severity {
        match self {
            Violation::MissingCwe { .. } | Violation::MissingImpact { .. } => Severity::Warning,
            _ => Severity::Error,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Violation::Domain { triple, found } => format!(
                "{triple}: subject is {found}, {} requires {}",
                triple.predicate,
                triple.predicate.domain()
            ),
            Violation::Range { triple, found } => format!(
                "{triple}: object is {found}, {} requires {}",
                triple.predicate,
                triple.predicate.range()
            ),
            Violation::Dangling { triple, missing } => format!("{triple}: {missing} is not a declared individual"),
            Violation::MissingCwe { vulnerability } => format!("{vulnerability} has no TargetsCWE link"),
            Violation::MissingImpact { target } => format!("{target} is exploited but has no hasAttackImpact link"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity() == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity() == Severity::Warning)
    }

    pub fn error_count(&self) -> usize {
        self.errors().count()
    }

    pub fn warning_count(&self) -> usize {
        self.warnings().count()
    }

    /// The store passes when there are no errors; warnings are allowed.
    pub fn accepted(&self) -> bool {
        self.error_count() == 0
    }
}

pub fn validate(store: &TripleStore) -> ValidationReport {
    let mut out = Vec::new();
    for t in store.triples() {
        let mut dangling = false;
        for name in [&t.subject, &t.object] {
            if store.individual(name).is_none() {
                dangling = true;
                out.push(Violation::Dangling {
                    triple: t.clone(),
                    missing: name.clone(),
                });
            }
        }
        if dangling {
            continue;
        }
        let s = store.individual(&t.subject).unwrap().class;
        let o = store.individual(&t.object).unwrap().class;
        if s != t.predicate.domain() {
            out.push(Violation::Domain {
                triple: t.clone(),
                found: s,
            });
        }
        if o != t.predicate.range() {
            out.push(Violation::Range {
                triple: t.clone(),
                found: o,
            });
        }
    }
    for ind in store.individuals() {
        match ind.class {
            OntClass::Vulnerability => {
                if !store.with_subject(&ind.name).any(|t| t.predicate == Property::TargetsCWE) {
                    out.push(Violation::MissingCwe {
                        vulnerability: ind.name.clone(),
                    });
                }
            }
            OntClass::ExploitTarget => {
                let exploited = store.with_object(&ind.name).any(|t| t.predicate == Property::Exploits);
                if exploited && !store.with_subject(&ind.name).any(|t| t.predicate == Property::HasAttackImpact) {
                    out.push(Violation::MissingImpact {
                        target: ind.name.clone(),
                    });
                }
            }
            _ => {}
        }
    }
    ValidationReport { violations: out }
}
