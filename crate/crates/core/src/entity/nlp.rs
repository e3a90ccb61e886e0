use serde::{Deserialize, Serialize};

use crate::corpus::{CveId, CveRecord, CweId};
use crate::text::{
    clean_tokens, extract_ngrams, most_common, normalize, pos_tag, recognize_entities, score_collocations,
    CollocationScore, Dictionaries, EntityKind, PosTag,
};

pub const UNKNOWN_TARGET: &str = "unknown-target";
pub const UNSPECIFIED_IMPACT: &str = "unspecified-impact";

const SCORE_EPS: f64 = 1e-9;

/// Exploit target with the stage of the fallback chain that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetMatch {
    pub surface: String,
    /// `None` when nothing matched and the literal fallback was used.
    pub kind: Option<EntityKind>,
}

/// One ontology-bound quadruple, keyed the way the nlp_dict records are.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NlpEntry {
    #[serde(rename = "Vulnerability")]
    pub vulnerability: CveId,
    #[serde(rename = "ExploitTarget")]
    pub exploit_target: String,
    #[serde(rename = "AttackImpact")]
    pub attack_impact: String,
    #[serde(rename = "CWE")]
    pub cwe: CweId,
}

/// CPE hit → ORG → PERSON → first noun of the most frequent n-gram.
pub fn derive_exploit_target(description: &str, dicts: &Dictionaries) -> TargetMatch {
    let entities = recognize_entities(description, &dicts.cpe, &dicts.gazetteer);
    for kind in [EntityKind::CpeProduct, EntityKind::Org, EntityKind::Person] {
        if let Some(e) = entities.iter().find(|e| e.kind == kind) {
            return TargetMatch {
                surface: e.surface.clone(),
                kind: Some(kind),
            };
        }
    }
    let surfaces: Vec<&str> = normalize(description, &dicts.stopwords).iter().map(|t| t.text).collect();
    let set = extract_ngrams(&surfaces);
    let candidates = most_common(&surfaces, &set)
        .into_iter()
        .map(|(ng, _)| ng)
        .chain(surfaces.iter().map(|s| vec![s.to_string()]));
    for ngram in candidates {
        if let Some(noun) = pos_tag(&ngram, &dicts.lexicon).into_iter().find(|t| t.tag.is_noun()) {
            return TargetMatch {
                surface: noun.token,
                kind: Some(EntityKind::NounFallback),
            };
        }
    }
    TargetMatch {
        surface: UNKNOWN_TARGET.to_string(),
        kind: None,
    }
}

pub fn exploit_target(record: &CveRecord, dicts: &Dictionaries) -> String {
    derive_exploit_target(&record.description, dicts).surface
}

/// Picks the best collocation: top score (within 1e-9), then longest, then
/// most frequent, then smallest tuple.
pub fn best_collocation(ranked: &[CollocationScore]) -> Option<&CollocationScore> {
    let top = ranked.first()?.score;
    ranked
        .iter()
        .take_while(|c| top - c.score <= SCORE_EPS)
        .min_by(|a, b| {
            b.ngram
                .len()
                .cmp(&a.ngram.len())
                .then(b.frequency.cmp(&a.frequency))
                .then_with(|| a.ngram.cmp(&b.ngram))
        })
}

/// Highest-ranked collocation of the cleaned description, rendered with the
/// original surface words of its first occurrence.
pub fn derive_attack_impact(description: &str, dicts: &Dictionaries) -> String {
    let toks = clean_tokens(description, &dicts.stopwords);
    if toks.len() < 2 {
        return UNSPECIFIED_IMPACT.to_string();
    }
    let stems: Vec<&str> = toks.iter().map(|t| t.stem.as_str()).collect();
    let ranked = score_collocations(&extract_ngrams(&stems));
    let Some(best) = best_collocation(&ranked) else {
        return UNSPECIFIED_IMPACT.to_string();
    };
    let n = best.ngram.len();
    let pos = stems
        .windows(n)
        .position(|w| w.iter().zip(&best.ngram).all(|(a, b)| *a == b.as_str()))
        .expect("scored n-gram occurs in its own stream");
    let mut words: Vec<String> = toks[pos..pos + n].iter().map(|t| t.surface.clone()).collect();
    // a verb-led impact reads as a participle clause: "allows X" -> "allowing X"
    if pos_tag(&words, &dicts.lexicon)[0].tag == PosTag::Verb {
        words[0] = present_participle(&words[0]);
    }
    words.join(" ")
}

/// "allows" -> "allowing", "enables" -> "enabling", "bypasses" -> "bypassing",
/// "denies" -> "denying", "leaked" -> "leaking". No consonant doubling.
fn present_participle(verb: &str) -> String {
    let lower = verb.to_lowercase();
    if lower.ends_with("ing") {
        return verb.to_string();
    }
    let stem = if let Some(s) = lower.strip_suffix("ies") {
        format!("{s}y")
    } else if ["ses", "xes", "zes", "ches", "shes"].iter().any(|e| lower.ends_with(e)) {
        lower[..lower.len() - 2].to_string()
    } else if let Some(s) = lower.strip_suffix("ed").filter(|s| s.len() > 1) {
        s.to_string()
    } else if lower.ends_with('s') && !lower.ends_with("ss") {
        lower[..lower.len() - 1].to_string()
    } else {
        lower
    };
    let stem = match stem.strip_suffix('e') {
        Some(s) if !s.ends_with('e') && !s.is_empty() => s.to_string(),
        _ => stem,
    };
    format!("{stem}ing")
}

pub fn attack_impact(record: &CveRecord, dicts: &Dictionaries) -> String {
    derive_attack_impact(&record.description, dicts)
}

/// One entry per CWE of the record, with target and impact turned into
/// ontology individual names.
pub fn make_nlp_entry(record: &CveRecord, dicts: &Dictionaries) -> Vec<NlpEntry> {
    if record.cwe_ids.is_empty() {
        log::debug!("{} has no CWE; no ontology entry", record.cve_id);
        return Vec::new();
    }
    let target = dicts.aliases.individual_name(&exploit_target(record, dicts));
    let impact = dicts.aliases.individual_name(&attack_impact(record, dicts));
    record
        .cwe_ids
        .iter()
        .map(|&cwe| NlpEntry {
            vulnerability: record.cve_id.clone(),
            exploit_target: target.clone(),
            attack_impact: impact.clone(),
            cwe,
        })
        .collect()
}
