//! A small conjunctive subset of SPARQL.
//!
//! ```text
//! PREFIX hw: <https://hwv2w.example/ontology/>
//! SELECT ?v ?t ?i WHERE {
//!     ?v hw:TargetsCWE hw:CWE-276 .
//!     ?v Exploits ?t .
//!     ?t hasAttackImpact ?i
//! }
//! ```
//! Constants are individual names, property names, class names (after `a` or
//! `rdf:type`), prefixed names, or full IRIs whose last path segment is the
//! name. `DISTINCT` is accepted; rows are always distinct and sorted.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use percent_encoding::percent_decode_str;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::store::{OntClass, Property, Triple, TripleStore};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("query syntax error at line {line}, column {col}: {message}")]
pub struct QueryError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredicateTerm {
    Var(String),
    /// `a` / `rdf:type`: class membership.
    Type,
    Property(Property),
    /// A constant that names no property; matches nothing.
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriplePattern {
    pub subject: Term,
    pub predicate: PredicateTerm,
    pub object: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryPattern {
    pub select: Vec<String>,
    pub patterns: Vec<TriplePattern>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BindingSet {
    pub vars: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl BindingSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows as variable → value maps.
    pub fn maps(&self) -> Vec<BTreeMap<String, String>> {
        self.rows
            .iter()
            .map(|r| self.vars.iter().cloned().zip(r.iter().cloned()).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(String),
    Iri(String),
    Word(String),
    LBrace,
    RBrace,
    Dot,
    Star,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, QueryError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, m: &str| QueryError {
        line,
        col,
        message: m.to_string(),
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let adv = |i: &mut usize, col: &mut usize| {
            *i += 1;
            *col += 1;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                adv(&mut i, &mut col);
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    adv(&mut i, &mut col);
                }
                continue;
            }
            '{' | '}' | '.' | '*' => {
                adv(&mut i, &mut col);
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '.' => Tok::Dot,
                    _ => Tok::Star,
                };
                out.push(Spanned { tok, line: l0, col: c0 });
            }
            '<' => {
                adv(&mut i, &mut col);
                let start = i;
                while i < chars.len() && chars[i] != '>' {
                    if chars[i] == '\n' || chars[i].is_whitespace() {
                        return Err(err(l0, c0, "unterminated IRI"));
                    }
                    adv(&mut i, &mut col);
                }
                if i >= chars.len() {
                    return Err(err(l0, c0, "unterminated IRI"));
                }
                let iri: String = chars[start..i].iter().collect();
                adv(&mut i, &mut col);
                out.push(Spanned {
                    tok: Tok::Iri(iri),
                    line: l0,
                    col: c0,
                });
            }
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && !"{}.<*#".contains(chars[i]) {
                    adv(&mut i, &mut col);
                }
                let w: String = chars[start..i].iter().collect();
                let tok = if let Some(v) = w.strip_prefix('?').or_else(|| w.strip_prefix('$')) {
                    if v.is_empty() || !v.chars().all(|c| c.is_alphanumeric() || c == '_') {
                        return Err(err(l0, c0, &format!("bad variable name {w:?}")));
                    }
                    Tok::Var(v.to_string())
                } else {
                    Tok::Word(w)
                };
                out.push(Spanned { tok, line: l0, col: c0 });
            }
        }
    }
    Ok(out)
}

const WELL_KNOWN_PREFIXES: [&str; 4] = ["rdf", "rdfs", "owl", "xsd"];

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
    prefixes: BTreeSet<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|s| (s.line, s.col)).unwrap_or(self.end)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, QueryError> {
        let (line, col) = self.here();
        Err(QueryError {
            line,
            col,
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Spanned { tok: Tok::Word(w), .. }) if w.eq_ignore_ascii_case(kw))
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), QueryError> {
        if self.peek().map(|s| &s.tok) == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    /// Strips a declared or well-known prefix; `None` for `rdf:type`.
    fn local_name(&self, word: &str) -> Result<String, String> {
        if let Some((pfx, local)) = word.split_once(':') {
            if self.prefixes.contains(pfx) || WELL_KNOWN_PREFIXES.contains(&pfx) {
                return Ok(local.to_string());
            }
            return Err(format!("undeclared prefix {pfx:?}"));
        }
        Ok(word.to_string())
    }

    fn constant(&mut self, tok: &Tok) -> Result<String, String> {
        match tok {
            Tok::Iri(iri) => {
                let last = iri.rsplit(['/', '#']).next().unwrap_or(iri);
                Ok(percent_decode_str(last).decode_utf8_lossy().into_owned())
            }
            Tok::Word(w) => self.local_name(w),
            _ => Err("expected a term".into()),
        }
    }

    fn term(&mut self) -> Result<Term, QueryError> {
        let Some(s) = self.next() else {
            self.pos -= 1;
            return self.fail("expected a term");
        };
        match &s.tok {
            Tok::Var(v) => Ok(Term::Var(v.clone())),
            t @ (Tok::Iri(_) | Tok::Word(_)) => self.constant(t).map(Term::Const).map_err(|m| QueryError {
                line: s.line,
                col: s.col,
                message: m,
            }),
            _ => Err(QueryError {
                line: s.line,
                col: s.col,
                message: "expected a term".into(),
            }),
        }
    }

    fn predicate(&mut self) -> Result<PredicateTerm, QueryError> {
        if let Some(Spanned { tok: Tok::Word(w), .. }) = self.peek() {
            if w == "a" || w == "rdf:type" {
                self.pos += 1;
                return Ok(PredicateTerm::Type);
            }
        }
        if let Some(Spanned { tok: Tok::Iri(iri), .. }) = self.peek() {
            if iri.ends_with("#type") {
                self.pos += 1;
                return Ok(PredicateTerm::Type);
            }
        }
        Ok(match self.term()? {
            Term::Var(v) => PredicateTerm::Var(v),
            Term::Const(c) => match c.parse::<Property>() {
                Ok(p) => PredicateTerm::Property(p),
                Err(_) => PredicateTerm::Unknown(c),
            },
        })
    }

    fn parse(&mut self) -> Result<QueryPattern, QueryError> {
        while self.keyword("PREFIX") {
            self.pos += 1;
            let name = match self.next() {
                Some(Spanned { tok: Tok::Word(w), .. }) if w.ends_with(':') => w.trim_end_matches(':').to_string(),
                _ => {
                    self.pos -= 1;
                    return self.fail("expected prefix name ending in ':'");
                }
            };
            match self.next() {
                Some(Spanned { tok: Tok::Iri(_), .. }) => {}
                _ => {
                    self.pos -= 1;
                    return self.fail("expected <IRI> after prefix name");
                }
            }
            self.prefixes.insert(name);
        }
        if !self.keyword("SELECT") {
            return self.fail("expected SELECT");
        }
        self.pos += 1;
        if self.keyword("DISTINCT") {
            self.pos += 1;
        }
        let mut select: Vec<(String, (usize, usize))> = Vec::new();
        let mut star = false;
        loop {
            let here = self.here();
            match self.peek().map(|s| s.tok.clone()) {
                Some(Tok::Var(v)) => {
                    self.pos += 1;
                    if !select.iter().any(|(s, _)| *s == v) {
                        select.push((v, here));
                    }
                }
                Some(Tok::Star) if select.is_empty() && !star => {
                    self.pos += 1;
                    star = true;
                }
                _ => break,
            }
        }
        if select.is_empty() && !star {
            return self.fail("expected variables or '*' after SELECT");
        }
        if !self.keyword("WHERE") {
            return self.fail("expected WHERE");
        }
        self.pos += 1;
        self.expect(Tok::LBrace, "'{'")?;
        let mut patterns = Vec::new();
        loop {
            match self.peek().map(|s| &s.tok) {
                Some(Tok::RBrace) => break,
                None => return self.fail("expected '}'"),
                _ => {}
            }
            let subject = self.term()?;
            let predicate = self.predicate()?;
            let object = self.term()?;
            patterns.push(TriplePattern {
                subject,
                predicate,
                object,
            });
            match self.peek().map(|s| &s.tok) {
                Some(Tok::Dot) => self.pos += 1,
                Some(Tok::RBrace) => break,
                _ => return self.fail("expected '.' or '}'"),
            }
        }
        if patterns.is_empty() {
            return self.fail("no patterns");
        }
        self.expect(Tok::RBrace, "'}'")?;
        if self.peek().is_some() {
            return self.fail("unexpected trailing input");
        }
        let used: Vec<String> = pattern_vars(&patterns);
        if star {
            return Ok(QueryPattern { select: used, patterns });
        }
        if let Some((v, (line, col))) = select.iter().find(|(v, _)| !used.contains(v)) {
            return Err(QueryError {
                line: *line,
                col: *col,
                message: format!("selected variable ?{v} does not occur in any pattern"),
            });
        }
        Ok(QueryPattern {
            select: select.into_iter().map(|(v, _)| v).collect(),
            patterns,
        })
    }
}

/// Variables in first-appearance order.
fn pattern_vars(patterns: &[TriplePattern]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut push = |v: &String| {
        if !out.contains(v) {
            out.push(v.clone());
        }
    };
    for p in patterns {
        if let Term::Var(v) = &p.subject {
            push(v);
        }
        if let PredicateTerm::Var(v) = &p.predicate {
            push(v);
        }
        if let Term::Var(v) = &p.object {
            push(v);
        }
    }
    out
}

pub fn parse_query(text: &str) -> Result<QueryPattern, QueryError> {
    let toks = lex(text)?;
    let lines: Vec<&str> = text.split('\n').collect();
    let end = (lines.len(), lines.last().map(|l| l.chars().count() + 1).unwrap_or(1));
    Parser {
        toks,
        pos: 0,
        end,
        prefixes: BTreeSet::new(),
    }
    .parse()
}

type Bindings = HashMap<String, String>;

fn resolve<'a>(t: &'a Term, b: &'a Bindings) -> Option<&'a str> {
    match t {
        Term::Const(c) => Some(c),
        Term::Var(v) => b.get(v).map(String::as_str),
    }
}

fn bind(b: &mut Bindings, t: &Term, value: &str, added: &mut Vec<String>) -> bool {
    match t {
        Term::Const(c) => c == value,
        Term::Var(v) => match b.get(v) {
            Some(x) => x == value,
            None => {
                b.insert(v.clone(), value.to_string());
                added.push(v.clone());
                true
            }
        },
    }
}

fn boundness(p: &TriplePattern, b: &Bindings) -> usize {
    let t = |t: &Term| usize::from(resolve(t, b).is_some());
    let pr = match &p.predicate {
        PredicateTerm::Var(v) => usize::from(b.contains_key(v)),
        _ => 1,
    };
    2 * t(&p.subject) + 2 * t(&p.object) + pr
}

/// Candidate (subject, predicate, object) facts for a pattern under `b`.
fn candidates<'s>(store: &'s TripleStore, p: &TriplePattern, b: &Bindings) -> Vec<(String, String, String)> {
    match &p.predicate {
        PredicateTerm::Unknown(_) => Vec::new(),
        PredicateTerm::Type => {
            let class_name = |i: &super::store::Individual| i.class.name().to_string();
            match resolve(&p.subject, b) {
                Some(s) => store
                    .individual(s)
                    .map(|i| vec![(i.name.clone(), "type".into(), class_name(i))])
                    .unwrap_or_default(),
                None => {
                    let want = resolve(&p.object, b).and_then(|o| o.parse::<OntClass>().ok());
                    store
                        .individuals()
                        .filter(|i| want.is_none_or(|c| c == i.class))
                        .map(|i| (i.name.clone(), "type".into(), class_name(i)))
                        .collect()
                }
            }
        }
        PredicateTerm::Property(_) | PredicateTerm::Var(_) => {
            let prop = match &p.predicate {
                PredicateTerm::Property(x) => Some(*x),
                PredicateTerm::Var(v) => match b.get(v) {
                    Some(name) => match name.parse::<Property>() {
                        Ok(x) => Some(x),
                        Err(_) => return Vec::new(),
                    },
                    None => None,
                },
                _ => unreachable!(),
            };
            let it: Box<dyn Iterator<Item = &'s Triple>> = if let Some(s) = resolve(&p.subject, b) {
                Box::new(store.with_subject(s))
            } else if let Some(o) = resolve(&p.object, b) {
                Box::new(store.with_object(o))
            } else if let Some(x) = prop {
                Box::new(store.with_predicate(x))
            } else {
                Box::new(store.triples())
            };
            it.filter(|t| prop.is_none_or(|x| x == t.predicate))
                .map(|t| (t.subject.clone(), t.predicate.name().to_string(), t.object.clone()))
                .collect()
        }
    }
}

fn solve(store: &TripleStore, remaining: &mut Vec<&TriplePattern>, b: &mut Bindings, out: &mut Vec<Bindings>) {
    if remaining.is_empty() {
        out.push(b.clone());
        return;
    }
    let idx = (0..remaining.len())
        .max_by_key(|&i| (boundness(remaining[i], b), std::cmp::Reverse(i)))
        .unwrap();
    let p = remaining.remove(idx);
    for (s, pr, o) in candidates(store, p, b) {
        let mut added = Vec::new();
        let pred_ok = match &p.predicate {
            PredicateTerm::Var(v) => bind(b, &Term::Var(v.clone()), &pr, &mut added),
            _ => true,
        };
        if pred_ok && bind(b, &p.subject, &s, &mut added) && bind(b, &p.object, &o, &mut added) {
            solve(store, remaining, b, out);
        }
        for v in added {
            b.remove(&v);
        }
    }
    remaining.insert(idx, p);
}

/// Conjunctive join; rows are projected, deduplicated and sorted.
pub fn query(store: &TripleStore, q: &QueryPattern) -> BindingSet {
    let mut all = Vec::new();
    let mut remaining: Vec<&TriplePattern> = q.patterns.iter().collect();
    solve(store, &mut remaining, &mut Bindings::new(), &mut all);
    let rows: BTreeSet<Vec<String>> = all
        .into_iter()
        .map(|b| q.select.iter().map(|v| b[v].clone()).collect())
        .collect();
    BindingSet {
        vars: q.select.clone(),
        rows: rows.into_iter().collect(),
    }
}

pub fn query_text(store: &TripleStore, text: &str) -> Result<BindingSet, QueryError> {
    Ok(query(store, &parse_query(text)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const CWE_276_QUERY: &str =
        "SELECT ?v ?t ?i WHERE { ?v TargetsCWE CWE-276 . ?v Exploits ?t . ?t hasAttackImpact ?i }";

    #[test]
    fn parses_reference_query() {
        let q = parse_query(CWE_276_QUERY).unwrap();
        assert_eq!(q.select, ["v", "t", "i"]);
        assert_eq!(q.patterns.len(), 3);
        assert_eq!(q.patterns[0].object, Term::Const("CWE-276".into()));
        assert_eq!(q.patterns[0].predicate, PredicateTerm::Property(Property::TargetsCWE));
    }

    #[test]
    fn prefixes_iris_and_type() {
        let q = parse_query(
            "PREFIX hw: <https://x.example/o/>\nSELECT DISTINCT * WHERE {\n  ?v a hw:Vulnerability .\n  ?v <https://x.example/o/TargetsCWE> <https://x.example/o/CWE/CWE%2D276> .\n}",
        )
        .unwrap();
        assert_eq!(q.select, ["v"]);
        assert_eq!(q.patterns[0].predicate, PredicateTerm::Type);
        assert_eq!(q.patterns[1].object, Term::Const("CWE-276".into()));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_query("SELECT ?x WHERE { }").unwrap_err();
        assert_eq!(e.message, "no patterns");
        assert_eq!((e.line, e.col), (1, 19));
        let e = parse_query("SELECT ?x ?y WHERE { ?x Exploits ?z }").unwrap_err();
        assert_eq!((e.line, e.col), (1, 11));
        assert!(e.message.contains("?y"));
        let e = parse_query("SELECT ?x\nWHERE { ?x Exploits }").unwrap_err();
        assert_eq!((e.line, e.col), (2, 21));
        assert!(parse_query("SELECT ?x WHERE { ?x foo:bar ?y }").is_err());
        assert!(parse_query("?x WHERE { ?x a b }").is_err());
        assert!(parse_query("SELECT ?x WHERE { ?x a b ").is_err());
    }

    #[test]
    fn constant_subject_and_object_parse() {
        let q = parse_query("SELECT * WHERE { CVE-2020-2020 Exploits GoogleChromeOS . ?x a Vulnerability }").unwrap();
        assert_eq!(q.patterns[0].subject, Term::Const("CVE-2020-2020".into()));
    }
}
