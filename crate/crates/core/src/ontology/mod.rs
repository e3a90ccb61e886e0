//! The four-class vulnerability ontology: a triple store with structural
//! validation, a conjunctive query language, N-Triples interchange and
//! story-path extraction.

mod ntriples;
mod query;
mod shared;
mod store;
mod story;
mod validate;

use thiserror::Error;

pub use ntriples::{individual_iri, parse_ntriples, serialize_ntriples, NTriplesError, BASE_IRI};
pub use query::{parse_query, query, query_text, BindingSet, PredicateTerm, QueryError, QueryPattern, Term, TriplePattern};
pub use shared::SharedOntology;
pub use store::{stats, Individual, OntClass, OntologyStats, Property, Triple, TripleStore};
pub use story::{story, AdjacencyEdge, AdjacencyNode, Story, StoryEdge, StoryPath};
pub use validate::{validate, Severity, ValidationReport, Violation};

#[derive(Debug, Error, PartialEq)]
pub enum OntologyError {
    #[error("{name} is already a {existing}, cannot also be a {requested}")]
    ClassClash {
        name: String,
        existing: OntClass,
        requested: OntClass,
    },
    #[error("unknown individual {0:?}")]
    UnknownIndividual(String),
    #[error("{triple}: {individual} is a {found}, expected {expected}")]
    DomainRange {
        triple: String,
        individual: String,
        expected: OntClass,
        found: OntClass,
    },
    #[error("empty {0} name")]
    EmptyName(OntClass),
}
