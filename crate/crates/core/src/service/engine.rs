use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::config::EngineConfig;
use super::pipeline::{self, ingest};
use super::EngineError;
use crate::corpus::{CorpusSnapshot, CvssVector};
use crate::entity::{build_index, cwe_distribution, load_index, rank_similar, CweDistribution, SimilarityIndex, SimilarityMatch};
use crate::mitigation::{Advisor, HttpTransport, PageCache, PageSource, PromptTemplate, ReqwestTransport};
use crate::ontology::{query_text, stats, story, BindingSet, OntClass, OntologyStats, Property, Story, TripleStore};
use crate::severity::{base_score, majority_vector, DecisionTree, Rating, ScoreTriple, SeverityError};
use crate::text::Dictionaries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub query: String,
    pub k: usize,
    pub corpus_version: String,
    /// Descending similarity.
    pub matches: Vec<SimilarityMatch>,
    pub cwe_distribution: CweDistribution,
    /// Absent when none of the matches carries a vector.
    pub predicted_vector: Option<CvssVector>,
    pub scores: Option<ScoreTriple>,
    /// Band predicted by the trained tree for `predicted_vector`.
    pub tree_rating: Option<Rating>,
    /// The exploit target most common among the matches.
    pub story_target: Option<String>,
    pub story: Option<Story>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusInfo {
    pub version_tag: String,
    pub cve_count: usize,
    pub cwe_count: Option<usize>,
    pub index_documents: usize,
    pub ontology_individuals: usize,
    pub ontology_triples: usize,
    pub tree_loaded: bool,
}

/// An immutable, fully loaded analysis state. Reloading builds a new one.
pub struct Engine {
    pub index: SimilarityIndex,
    pub ontology: Arc<TripleStore>,
    pub tree: Option<DecisionTree>,
    pub dicts: Dictionaries,
    pub k: usize,
    /// Catalog size, when the engine was built from a snapshot.
    pub cwe_count: Option<usize>,
}

impl Engine {
    pub fn new(index: SimilarityIndex, ontology: TripleStore, tree: Option<DecisionTree>, dicts: Dictionaries) -> Self {
        Engine { index, ontology: Arc::new(ontology), tree, dicts, k: 5, cwe_count: None }
    }

    /// Builds everything the config does not provide prebuilt.
    pub fn load(config: &EngineConfig) -> Result<Engine, EngineError> {
        let dicts = match &config.dictionaries {
            Some(dir) => Dictionaries::from_dir(dir).map_err(|e| EngineError::Input {
                path: e.path.clone(),
                message: e.message.clone(),
            })?,
            None => Dictionaries::bundled(),
        };
        let mut snapshot: Option<CorpusSnapshot> = None;
        let mut get_snapshot = || -> Result<CorpusSnapshot, EngineError> {
            if let Some(s) = &snapshot {
                return Ok(s.clone());
            }
            let s = match &config.snapshot {
                Some(p) if p.exists() => pipeline::load_snapshot(p)?,
                _ => {
                    if config.nvd_feeds.is_empty() {
                        return Err(EngineError::Config("no snapshot and no nvd_feeds configured".into()));
                    }
                    ingest(&config.nvd_feeds, config.cwe_catalog.as_deref(), config.hardware_ids.as_deref(), true)?.0
                }
            };
            snapshot = Some(s.clone());
            Ok(s)
        };

        let index = match &config.index {
            Some(p) if p.exists() => load_index(p).map_err(|e| pipeline::io_err(p, e))?,
            _ => build_index(&get_snapshot()?, &dicts.stopwords).map_err(EngineError::Entity)?,
        };
        let ontology = match &config.ontology {
            Some(p) if p.exists() => pipeline::load_ontology(p)?,
            _ => {
                let (store, warnings) = pipeline::build_ontology(&get_snapshot()?, &dicts);
                for w in warnings {
                    log::warn!("ontology: {w}");
                }
                store
            }
        };
        let tree = match &config.tree {
            Some(p) if p.exists() => Some(pipeline::load_tree(p)?),
            _ => match get_snapshot().and_then(|s| pipeline::train_on_snapshot(&s, config.tree_config, config.test_permille)) {
                Ok(t) => Some(t),
                Err(e) => {
                    log::warn!("no severity tree: {e}");
                    None
                }
            },
        };
        let cwe_count = snapshot.as_ref().map(|s| s.cwes.len());
        Ok(Engine { index, ontology: Arc::new(ontology), tree, dicts, k: config.k, cwe_count })
    }

    pub fn corpus_info(&self) -> CorpusInfo {
        CorpusInfo {
            version_tag: self.index.version_tag().to_string(),
            cve_count: self.index.len(),
            cwe_count: self.cwe_count,
            index_documents: self.index.len(),
            ontology_individuals: self.ontology.individual_count(),
            ontology_triples: self.ontology.triple_count(),
            tree_loaded: self.tree.is_some(),
        }
    }

    pub fn ontology_stats(&self) -> OntologyStats {
        stats(&self.ontology)
    }

    pub fn query(&self, text: &str) -> Result<BindingSet, EngineError> {
        query_text(&self.ontology, text).map_err(EngineError::Query)
    }

    /// Most frequent exploit target among the matched vulnerabilities; ties
    /// go to the target reached first in match order.
    pub fn modal_target(&self, matches: &[SimilarityMatch]) -> Option<String> {
        let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for (pos, m) in matches.iter().enumerate() {
            let vuln = m.cve_id.as_str();
            for t in self.ontology.with_subject(vuln).filter(|t| t.predicate == Property::Exploits) {
                let e = counts.entry(t.object.clone()).or_insert((0, pos));
                e.0 += 1;
            }
        }
        counts
            .into_iter()
            .max_by(|(_, (ca, pa)), (_, (cb, pb))| ca.cmp(cb).then_with(|| pb.cmp(pa)))
            .map(|(name, _)| name)
    }

    pub fn analyze(&self, description: &str, k: Option<usize>) -> Result<AnalysisReport, EngineError> {
        let k = k.unwrap_or(self.k);
        let matches = rank_similar(description, &self.index, k, &self.dicts.stopwords).map_err(EngineError::Entity)?;
        let mut warnings = Vec::new();
        let distribution = cwe_distribution(&matches);
        let predicted_vector = match majority_vector(&matches) {
            Ok(v) => Some(v),
            Err(SeverityError::NoCvssEvidence) => {
                warnings.push("no CVSS evidence among the matches".to_string());
                None
            }
            Err(e) => return Err(EngineError::Internal(e.to_string())),
        };
        let scores = predicted_vector.as_ref().map(base_score);
        let tree_rating = match (&self.tree, &predicted_vector) {
            (Some(t), Some(v)) => Some(t.predict(v)),
            _ => None,
        };
        let story_target = self.modal_target(&matches);
        let story = match &story_target {
            Some(t) => match story(&self.ontology, t) {
                Ok(s) => Some(s),
                Err(e) => {
                    warnings.push(format!("story: {e}"));
                    None
                }
            },
            None => None,
        };
        if story_target.is_none() && !matches.is_empty() {
            warnings.push("matched vulnerabilities have no exploit target in the ontology".to_string());
        }
        Ok(AnalysisReport {
            query: description.to_string(),
            k,
            corpus_version: self.index.version_tag().to_string(),
            matches,
            cwe_distribution: distribution,
            predicted_vector,
            scores,
            tree_rating,
            story_target,
            story,
            warnings,
        })
    }

    /// Individuals of one class, sorted by name.
    pub fn individuals_of(&self, class: OntClass) -> Vec<String> {
        self.ontology.individuals().filter(|i| i.class == class).map(|i| i.name.clone()).collect()
    }
}

/// Builds the mitigation advisor described by `config`, reaching the
/// network only through `transport`.
pub fn advisor_from_config(
    config: &EngineConfig,
    transport: Option<Arc<dyn HttpTransport>>,
) -> Result<Advisor, EngineError> {
    let transport: Arc<dyn HttpTransport> = match transport {
        Some(t) => t,
        None => Arc::new(
            ReqwestTransport::new(&config.llm.user_agent, config.llm.timeout())
                .map_err(|e| EngineError::Config(e.to_string()))?,
        ),
    };
    let pages = match &config.mitigation.pages_fixture_dir {
        Some(dir) => PageSource::Fixture { dir: dir.clone() },
        None => PageSource::Live {
            transport: transport.clone(),
            cache: Some(PageCache {
                dir: config.cache_dir.join("cwe-pages"),
                ttl: Duration::from_secs(config.mitigation.cache_ttl_secs),
            }),
            url_pattern: None,
        },
    };
    let template = match &config.mitigation.template {
        Some(p) => PromptTemplate::from_file(p).map_err(|e| EngineError::Config(e.to_string()))?,
        None => PromptTemplate::appendix(),
    };
    Ok(Advisor { pages, llm: config.llm.clone(), template, transport, fan_out: config.mitigation.fan_out })
}
