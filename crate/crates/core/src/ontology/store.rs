use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::OntologyError;
use crate::entity::NlpEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OntClass {
    Vulnerability,
    #[serde(rename = "CWE")]
    Cwe,
    AttackImpact,
    ExploitTarget,
}

impl OntClass {
    pub const ALL: [OntClass; 4] = [
        OntClass::Vulnerability,
        OntClass::Cwe,
        OntClass::AttackImpact,
        OntClass::ExploitTarget,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OntClass::Vulnerability => "Vulnerability",
            OntClass::Cwe => "CWE",
            OntClass::AttackImpact => "AttackImpact",
            OntClass::ExploitTarget => "ExploitTarget",
        }
    }
}

impl fmt::Display for OntClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OntClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OntClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown class {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Property {
    Exploits,
    #[serde(rename = "hasAttackImpact")]
    HasAttackImpact,
    TargetsCWE,
    #[serde(rename = "hasVulnerability")]
    HasVulnerability,
}

impl Property {
    pub const ALL: [Property; 4] = [
        Property::Exploits,
        Property::HasAttackImpact,
        Property::TargetsCWE,
        Property::HasVulnerability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Exploits => "Exploits",
            Property::HasAttackImpact => "hasAttackImpact",
            Property::TargetsCWE => "TargetsCWE",
            Property::HasVulnerability => "hasVulnerability",
        }
    }

    pub fn domain(self) -> OntClass {
        match self {
            Property::Exploits | Property::TargetsCWE => OntClass::Vulnerability,
            Property::HasAttackImpact | Property::HasVulnerability => OntClass::ExploitTarget,
        }
    }

    pub fn range(self) -> OntClass {
        match self {
            Property::Exploits => OntClass::ExploitTarget,
            Property::HasAttackImpact => OntClass::AttackImpact,
            Property::TargetsCWE => OntClass::Cwe,
            Property::HasVulnerability => OntClass::Vulnerability,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown property {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Individual {
    pub name: String,
    pub class: OntClass,
    /// Free-form subclass label; counted as an extra class in stats.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subclass: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub predicate: Property,
    pub object: String,
}

impl Triple {
    pub fn new(subject: impl Into<String>, predicate: Property, object: impl Into<String>) -> Self {
        Triple {
            subject: subject.into(),
            predicate,
            object: object.into(),
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}, {}>", self.subject, self.predicate, self.object)
    }
}

/// In-memory triple store with set semantics and per-position indexes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripleStore {
    individuals: BTreeMap<String, Individual>,
    triples: BTreeSet<Triple>,
    by_subject: BTreeMap<String, BTreeSet<Triple>>,
    by_object: BTreeMap<String, BTreeSet<Triple>>,
    by_predicate: BTreeMap<Property, BTreeSet<Triple>>,
}

impl TripleStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn individuals(&self) -> impl Iterator<Item = &Individual> {
        self.individuals.values()
    }

    pub fn individual(&self, name: &str) -> Option<&Individual> {
        self.individuals.get(name)
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains(t)
    }

    pub fn individual_count(&self) -> usize {
        self.individuals.len()
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty() && self.triples.is_empty()
    }

    pub fn with_subject(&self, name: &str) -> impl Iterator<Item = &Triple> {
        self.by_subject.get(name).into_iter().flatten()
    }

    pub fn with_object(&self, name: &str) -> impl Iterator<Item = &Triple> {
        self.by_object.get(name).into_iter().flatten()
    }

    pub fn with_predicate(&self, p: Property) -> impl Iterator<Item = &Triple> {
        self.by_predicate.get(&p).into_iter().flatten()
    }

    /// Distinct subclass labels in use.
    pub fn subclass_labels(&self) -> BTreeSet<&str> {
        self.individuals.values().filter_map(|i| i.subclass.as_deref()).collect()
    }

    /// Creates the individual if missing; returns whether it was new.
    pub fn add_individual(&mut self, name: &str, class: OntClass) -> Result<bool, OntologyError> {
        match self.individuals.get(name) {
            Some(i) if i.class == class => Ok(false),
            Some(i) => Err(OntologyError::ClassClash {
                name: name.to_string(),
                existing: i.class,
                requested: class,
            }),
            None => {
                self.individuals.insert(
                    name.to_string(),
                    Individual {
                        name: name.to_string(),
                        class,
                        subclass: None,
                    },
                );
                Ok(true)
            }
        }
    }

    pub fn set_subclass(&mut self, name: &str, label: Option<String>) -> Result<(), OntologyError> {
        let ind = self
            .individuals
            .get_mut(name)
            .ok_or_else(|| OntologyError::UnknownIndividual(name.to_string()))?;
        ind.subclass = label;
        Ok(())
    }

    /// Adds a triple after checking both ends exist and fit the property's
    /// domain and range. Returns whether the triple was new.
    pub fn assert_triple(&mut self, t: Triple) -> Result<bool, OntologyError> {
        for (name, want) in [(&t.subject, t.predicate.domain()), (&t.object, t.predicate.range())] {
            let ind = self
                .individuals
                .get(name)
                .ok_or_else(|| OntologyError::UnknownIndividual(name.clone()))?;
            if ind.class != want {
                return Err(OntologyError::DomainRange {
                    triple: t.to_string(),
                    individual: name.clone(),
                    expected: want,
                    found: ind.class,
                });
            }
        }
        Ok(self.insert_unchecked(t))
    }

    /// Adds a triple with no checks at all. Used by importers; run
    /// [`validate`](super::validate) afterwards.
    pub fn insert_unchecked(&mut self, t: Triple) -> bool {
        if !self.triples.insert(t.clone()) {
            return false;
        }
        self.by_subject.entry(t.subject.clone()).or_default().insert(t.clone());
        self.by_object.entry(t.object.clone()).or_default().insert(t.clone());
        self.by_predicate.entry(t.predicate).or_default().insert(t);
        true
    }

    pub fn remove_triple(&mut self, t: &Triple) -> bool {
        if !self.triples.remove(t) {
            return false;
        }
        for (map, key) in [(&mut self.by_subject, &t.subject), (&mut self.by_object, &t.object)] {
            if let Some(set) = map.get_mut(key) {
                set.remove(t);
                if set.is_empty() {
                    map.remove(key);
                }
            }
        }
        if let Some(set) = self.by_predicate.get_mut(&t.predicate) {
            set.remove(t);
        }
        true
    }

    /// Asserts the four triples of one nlp_dict entry; returns how many were new.
    /// All class checks run before anything is written.
    pub fn assert_entry(&mut self, e: &NlpEntry) -> Result<usize, OntologyError> {
        let v = e.vulnerability.as_str();
        let c = e.cwe.to_string();
        let t = e.exploit_target.as_str();
        let i = e.attack_impact.as_str();
        let wanted = [
            (v, OntClass::Vulnerability),
            (c.as_str(), OntClass::Cwe),
            (t, OntClass::ExploitTarget),
            (i, OntClass::AttackImpact),
        ];
        for (name, class) in wanted {
            if name.is_empty() {
                return Err(OntologyError::EmptyName(class));
            }
            if let Some(ind) = self.individuals.get(name) {
                if ind.class != class {
                    return Err(OntologyError::ClassClash {
                        name: name.to_string(),
                        existing: ind.class,
                        requested: class,
                    });
                }
            }
        }
        // an entry may itself bind one name to two classes
        for (a, (na, ca)) in wanted.iter().enumerate() {
            if let Some((_, cb)) = wanted[a + 1..].iter().find(|(nb, cb)| nb == na && cb != ca) {
                return Err(OntologyError::ClassClash {
                    name: na.to_string(),
                    existing: *ca,
                    requested: *cb,
                });
            }
        }
        for (name, class) in wanted {
            self.add_individual(name, class)?;
        }
        let mut added = 0;
        for triple in [
            Triple::new(v, Property::Exploits, t),
            Triple::new(t, Property::HasAttackImpact, i),
            Triple::new(v, Property::TargetsCWE, c.as_str()),
            Triple::new(t, Property::HasVulnerability, v),
        ] {
            added += usize::from(self.assert_triple(triple)?);
        }
        Ok(added)
    }

    pub fn from_entries<'a, I: IntoIterator<Item = &'a NlpEntry>>(entries: I) -> Result<Self, OntologyError> {
        let mut s = Self::new();
        for e in entries {
            s.assert_entry(e)?;
        }
        Ok(s)
    }

    /// Exact name, else the unique case-insensitive match.
    pub fn resolve_name(&self, name: &str) -> Option<&Individual> {
        if let Some(i) = self.individuals.get(name) {
            return Some(i);
        }
        let mut hits = self.individuals.values().filter(|i| i.name.eq_ignore_ascii_case(name));
        let first = hits.next()?;
        hits.next().is_none().then_some(first)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OntologyStats {
    pub axiom_count: usize,
    pub logical_axioms: usize,
    pub declaration_axioms: usize,
    pub annotation_axioms: usize,
    pub individual_count: usize,
    pub class_count: usize,
    pub object_property_count: usize,
}

/// Declarations: individuals + classes (4 plus subclass labels) + properties.
/// Logical: triples + one domain and one range axiom per property.
pub fn stats(store: &TripleStore) -> OntologyStats {
    let individual_count = store.individual_count();
    let class_count = OntClass::ALL.len() + store.subclass_labels().len();
    let object_property_count = Property::ALL.len();
    let declaration_axioms = individual_count + class_count + object_property_count;
    let logical_axioms = store.triple_count() + 2 * Property::ALL.len();
    let annotation_axioms = 0;
    OntologyStats {
        axiom_count: logical_axioms + declaration_axioms + annotation_axioms,
        logical_axioms,
        declaration_axioms,
        annotation_axioms,
        individual_count,
        class_count,
        object_property_count,
    }
}
