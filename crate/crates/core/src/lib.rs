//! Hardware vulnerability analysis: CVE/CWE ingestion, description matching,
//! an ontology of vulnerabilities and their targets and impacts, CVSS-based
//! severity prediction, and LLM-assisted mitigation advice.

pub mod corpus;
pub mod entity;
pub mod mitigation;
pub mod ontology;
pub mod service;
pub mod severity;
pub mod text;
