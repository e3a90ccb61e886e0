//! Offline build steps shared by the CLI and the engine loader.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::corpus::{
    default_hardware_ids, parse_cwe_catalog, parse_hardware_ids, parse_nvd_feed, CorpusSnapshot, CweId, FeedWarning,
};
use crate::entity::make_nlp_entry;
use crate::ontology::{parse_ntriples, serialize_ntriples, TripleStore};
use crate::severity::{labeled_vectors, one_hot, split_train_test, train_tree, DecisionTree, TreeConfig};
use crate::text::Dictionaries;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub items_read: usize,
    pub skipped: usize,
    pub kept_after_filter: usize,
    pub warnings: Vec<String>,
}

pub(crate) fn io_err(path: &Path, e: impl std::fmt::Display) -> EngineError {
    EngineError::Input { path: path.to_path_buf(), message: e.to_string() }
}

/// Parses the feeds and catalog and keeps the hardware/IoT subset.
/// `hardware_ids = None` uses the bundled id list; an empty `feeds` slice
/// yields an empty snapshot.
pub fn ingest(
    feeds: &[PathBuf],
    catalog: Option<&Path>,
    hardware_ids: Option<&Path>,
    filter: bool,
) -> Result<(CorpusSnapshot, IngestSummary), EngineError> {
    let mut summary = IngestSummary::default();
    let mut records = Vec::new();
    for path in feeds {
        let f = File::open(path).map_err(|e| io_err(path, e))?;
        let parsed = parse_nvd_feed(BufReader::new(f)).map_err(|e| io_err(path, e))?;
        summary.items_read += parsed.records.len() + parsed.skipped_no_description;
        summary.skipped += parsed.skipped_no_description;
        summary
            .warnings
            .extend(parsed.warnings.iter().map(|w: &FeedWarning| format!("{}: {w}", path.display())));
        records.extend(parsed.records);
    }
    let cwes = match catalog {
        Some(p) => {
            let f = File::open(p).map_err(|e| io_err(p, e))?;
            parse_cwe_catalog(BufReader::new(f)).map_err(|e| io_err(p, e))?
        }
        None => Vec::new(),
    };
    let (snap, report) = CorpusSnapshot::new(records, cwes);
    for id in &report.replaced_duplicates {
        summary.warnings.push(format!("duplicate {id}: later record kept"));
    }
    let snap = if filter {
        let ids: BTreeSet<CweId> = match hardware_ids {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| io_err(p, e))?;
                parse_hardware_ids(&text).map_err(|e| io_err(p, e))?
            }
            None => default_hardware_ids(),
        };
        snap.filter_hardware_iot(&ids).map_err(|e| EngineError::Internal(e.to_string()))?
    } else {
        snap
    };
    summary.kept_after_filter = snap.len();
    Ok((snap, summary))
}

pub fn save_snapshot(snap: &CorpusSnapshot, path: &Path) -> Result<(), EngineError> {
    let json = serde_json::to_string_pretty(snap).map_err(|e| EngineError::Internal(e.to_string()))?;
    fs::write(path, json).map_err(|e| io_err(path, e))
}

pub fn load_snapshot(path: &Path) -> Result<CorpusSnapshot, EngineError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_err(path, e))
}

/// Asserts every record's entries; entries that clash with what is already
/// in the store are skipped and reported.
pub fn build_ontology(snap: &CorpusSnapshot, dicts: &Dictionaries) -> (TripleStore, Vec<String>) {
    let mut store = TripleStore::new();
    let mut warnings = Vec::new();
    for record in &snap.cves {
        for entry in make_nlp_entry(record, dicts) {
            if let Err(e) = store.assert_entry(&entry) {
                warnings.push(format!("{}: {e}", record.cve_id));
            }
        }
    }
    (store, warnings)
}

pub fn save_ontology(store: &TripleStore, path: &Path) -> Result<(), EngineError> {
    fs::write(path, serialize_ntriples(store)).map_err(|e| io_err(path, e))
}

pub fn load_ontology(path: &Path) -> Result<TripleStore, EngineError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_ntriples(&text).map_err(|e| io_err(path, e))
}

/// Trains on the training half of a deterministic id-keyed split.
pub fn train_on_snapshot(
    snap: &CorpusSnapshot,
    config: TreeConfig,
    test_permille: u32,
) -> Result<DecisionTree, EngineError> {
    let (train, _) = split_train_test(&labeled_vectors(snap), test_permille);
    let vectors: Vec<_> = train.iter().map(|d| d.vector).collect();
    let labels: Vec<_> = train.iter().map(|d| d.rating).collect();
    train_tree(&one_hot(&vectors), &labels, config).map_err(|e| EngineError::Training(e.to_string()))
}

pub fn save_tree(tree: &DecisionTree, path: &Path) -> Result<(), EngineError> {
    fs::write(path, tree.to_json()).map_err(|e| io_err(path, e))
}

pub fn load_tree(path: &Path) -> Result<DecisionTree, EngineError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    DecisionTree::from_json(&text).map_err(|e| io_err(path, e))
}
