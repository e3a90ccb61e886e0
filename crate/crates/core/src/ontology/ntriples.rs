//! N-Triples import/export under a single fixed base IRI.
//!
//! Individuals live at `<BASE><Class>/<name>`, classes at `<BASE><Class>`
//! and properties at `<BASE><property>`. Names are percent-encoded.

use std::collections::BTreeSet;

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use thiserror::Error;

use super::store::{OntClass, Property, Triple, TripleStore};

pub const BASE_IRI: &str = "https://hwv2w.example/ontology/";
const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const RDFS_DOMAIN: &str = "http://www.w3.org/2000/01/rdf-schema#domain";
const RDFS_RANGE: &str = "http://www.w3.org/2000/01/rdf-schema#range";
const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
const OWL_OBJECT_PROPERTY: &str = "http://www.w3.org/2002/07/owl#ObjectProperty";
const SUBCLASS_LABEL: &str = "subclassLabel";

/// Everything except unreserved characters is escaped.
const NAME_ESCAPES: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'.').remove(b'~');

#[derive(Debug, Error, PartialEq, Eq)]
#[error("N-Triples line {line}: {message}")]
pub struct NTriplesError {
    pub line: usize,
    pub message: String,
}

pub fn individual_iri(class: OntClass, name: &str) -> String {
    format!("{BASE_IRI}{}/{}", class.name(), utf8_percent_encode(name, NAME_ESCAPES))
}

fn class_iri(c: OntClass) -> String {
    format!("{BASE_IRI}{}", c.name())
}

fn property_iri(p: Property) -> String {
    format!("{BASE_IRI}{}", p.name())
}

fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

pub fn serialize_ntriples(store: &TripleStore) -> String {
    let mut lines = BTreeSet::new();
    for c in OntClass::ALL {
        lines.insert(format!("<{}> <{RDF_TYPE}> <{OWL_CLASS}> .", class_iri(c)));
    }
    for p in Property::ALL {
        let iri = property_iri(p);
        lines.insert(format!("<{iri}> <{RDF_TYPE}> <{OWL_OBJECT_PROPERTY}> ."));
        lines.insert(format!("<{iri}> <{RDFS_DOMAIN}> <{}> .", class_iri(p.domain())));
        lines.insert(format!("<{iri}> <{RDFS_RANGE}> <{}> .", class_iri(p.range())));
    }
    let iri_of = |name: &str| {
        store
            .individual(name)
            .map(|i| individual_iri(i.class, name))
            .unwrap_or_else(|| format!("{BASE_IRI}_/{}", utf8_percent_encode(name, NAME_ESCAPES)))
    };
    for ind in store.individuals() {
        let iri = individual_iri(ind.class, &ind.name);
        lines.insert(format!("<{iri}> <{RDF_TYPE}> <{}> .", class_iri(ind.class)));
        if let Some(label) = &ind.subclass {
            lines.insert(format!("<{iri}> <{BASE_IRI}{SUBCLASS_LABEL}> \"{}\" .", escape_literal(label)));
        }
    }
    for t in store.triples() {
        lines.insert(format!(
            "<{}> <{}> <{}> .",
            iri_of(&t.subject),
            property_iri(t.predicate),
            iri_of(&t.object)
        ));
    }
    let mut out = String::new();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

enum Node {
    Iri(String),
    Literal(String),
}

fn parse_line(line: &str) -> Result<(String, String, Node), String> {
    let mut rest = line.trim();
    let iri = |rest: &mut &str| -> Result<String, String> {
        let r = rest.trim_start();
        let r = r.strip_prefix('<').ok_or("expected '<'")?;
        let end = r.find('>').ok_or("unterminated IRI")?;
        let v = r[..end].to_string();
        *rest = &r[end + 1..];
        Ok(v)
    };
    let s = iri(&mut rest)?;
    let p = iri(&mut rest)?;
    let r = rest.trim_start();
    let (o, r) = if let Some(body) = r.strip_prefix('"') {
        let mut lit = String::new();
        let mut chars = body.char_indices();
        let mut end = None;
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    end = Some(i + 1);
                    break;
                }
                '\\' => match chars.next().map(|(_, c)| c) {
                    Some('"') => lit.push('"'),
                    Some('\\') => lit.push('\\'),
                    Some('n') => lit.push('\n'),
                    Some('r') => lit.push('\r'),
                    Some('t') => lit.push('\t'),
                    other => return Err(format!("bad escape {other:?}")),
                },
                c => lit.push(c),
            }
        }
        let end = end.ok_or("unterminated literal")?;
        (Node::Literal(lit), &body[end..])
    } else {
        let mut r2 = r;
        let v = iri(&mut r2)?;
        (Node::Iri(v), r2)
    };
    if r.trim() != "." {
        return Err("expected '.' at end of triple".into());
    }
    Ok((s, p, o))
}

fn local(iri: &str) -> Option<&str> {
    iri.strip_prefix(BASE_IRI)
}

/// Splits `<BASE><Class>/<name>` into its class and decoded name.
fn split_individual(iri: &str) -> Result<(OntClass, String), String> {
    let rest = local(iri).ok_or_else(|| format!("IRI outside base: {iri}"))?;
    let (class, enc) = rest.split_once('/').ok_or_else(|| format!("not an individual IRI: {iri}"))?;
    let class: OntClass = class.parse()?;
    let name = percent_decode_str(enc)
        .decode_utf8()
        .map_err(|_| format!("invalid UTF-8 in {iri}"))?
        .into_owned();
    Ok((class, name))
}

pub fn parse_ntriples(text: &str) -> Result<TripleStore, NTriplesError> {
    let mut store = TripleStore::new();
    let mut triples = Vec::new();
    let mut labels = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| NTriplesError { line: i + 1, message };
        let (s, p, o) = parse_line(line).map_err(err)?;
        if p == RDF_TYPE {
            let Node::Iri(o) = o else {
                return Err(err("rdf:type object must be an IRI".into()));
            };
            if o == OWL_CLASS || o == OWL_OBJECT_PROPERTY {
                continue;
            }
            let (class, name) = split_individual(&s).map_err(err)?;
            let declared: OntClass = local(&o)
                .ok_or_else(|| err(format!("unknown class {o}")))?
                .parse()
                .map_err(err)?;
            if declared != class {
                return Err(err(format!("{name} is typed {declared} but lives under {class}")));
            }
            store.add_individual(&name, class).map_err(|e| err(e.to_string()))?;
        } else if p == RDFS_DOMAIN || p == RDFS_RANGE {
            continue;
        } else if local(&p) == Some(SUBCLASS_LABEL) {
            let Node::Literal(label) = o else {
                return Err(err("subclass label must be a literal".into()));
            };
            let (_, name) = split_individual(&s).map_err(err)?;
            labels.push((i + 1, name, label));
        } else {
            let prop: Property = local(&p)
                .ok_or_else(|| err(format!("unknown predicate {p}")))?
                .parse()
                .map_err(err)?;
            let Node::Iri(o) = o else {
                return Err(err("object must be an IRI".into()));
            };
            let name_of = |iri: &str| -> Result<String, String> {
                match local(iri).and_then(|r| r.strip_prefix("_/")) {
                    Some(enc) => Ok(percent_decode_str(enc).decode_utf8_lossy().into_owned()),
                    None => split_individual(iri).map(|(_, n)| n),
                }
            };
            let (sn, on) = (name_of(&s).map_err(err)?, name_of(&o).map_err(err)?);
            triples.push(Triple::new(sn, prop, on));
        }
    }
    for (line, name, label) in labels {
        store
            .set_subclass(&name, Some(label))
            .map_err(|e| NTriplesError {
                line,
                message: e.to_string(),
            })?;
    }
    for t in triples {
        store.insert_unchecked(t);
    }
    Ok(store)
}
