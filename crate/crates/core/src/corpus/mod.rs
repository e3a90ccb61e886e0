//! Catalog ingestion: NVD CVE feeds, the CWE hardware-view CSV, CVSS vector
//! strings, and the appendable corpus snapshot built from them.

mod cvss;
mod ids;
mod nvd;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use cvss::{
    AttackComplexity, AttackVector, CvssParseError, CvssVector, ImpactLevel, PrivilegesRequired, Scope,
    UserInteraction, METRIC_NAMES,
};
pub use ids::{CveId, CweId, IdError};
pub use nvd::{cpe_product_name, parse_nvd_bytes, parse_nvd_feed, FeedParse, FeedWarning};

/// The hardware/IoT CWE id list shipped with the crate.
pub const DEFAULT_HARDWARE_CWE_IDS: &str = include_str!("../../data/hardware_cwe_ids.txt");

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed feed at byte {offset} (item {item_index:?}): {message}")]
    Feed {
        offset: u64,
        item_index: Option<usize>,
        message: String,
    },
    #[error("CWE catalog is missing mandatory column {0:?}")]
    MissingColumn(&'static str),
    #[error("duplicate {id} in CWE catalog at rows {first_row} and {second_row}")]
    DuplicateCwe { id: CweId, first_row: u64, second_row: u64 },
    #[error("CWE catalog row {row}: {message}")]
    CatalogRow { row: u64, message: String },
    #[error("hardware CWE id list line {line}: {source}")]
    HardwareIds { line: usize, source: IdError },
    #[error("hardware CWE id set must not be empty")]
    EmptyFilter,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One parsed NVD entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CveRecord {
    pub cve_id: CveId,
    pub description: String,
    pub published_year: u16,
    pub cwe_ids: Vec<CweId>,
    pub cvss_vector: Option<CvssVector>,
    #[serde(default)]
    pub cpe_names: Vec<String>,
}

/// One row of the CWE catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CweEntry {
    pub cwe_id: CweId,
    pub name: String,
    pub description: String,
    pub catalog_url: String,
}

impl CweEntry {
    pub fn new(cwe_id: CweId, name: impl Into<String>, description: impl Into<String>) -> Self {
        CweEntry {
            cwe_id,
            name: name.into(),
            description: description.into(),
            catalog_url: cwe_id.catalog_url(),
        }
    }
}

/// Parses the CWE catalog CSV (`CWE-ID`, `Name`, `Description` columns are required).
pub fn parse_cwe_catalog<R: Read>(reader: R) -> Result<Vec<CweEntry>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &'static str| {
        headers
            .iter()
            .position(|h| h.trim().trim_start_matches('\u{feff}') == name)
            .ok_or(IngestError::MissingColumn(name))
    };
    let (id_col, name_col, desc_col) = (column("CWE-ID")?, column("Name")?, column("Description")?);

    let mut out = Vec::new();
    let mut seen: HashMap<CweId, u64> = HashMap::new();
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| record.get(i).unwrap_or("").trim().to_string();
        let cwe_id = CweId::parse_lenient(&field(id_col)).map_err(|e| IngestError::CatalogRow {
            row,
            message: e.to_string(),
        })?;
        if let Some(&first_row) = seen.get(&cwe_id) {
            return Err(IngestError::DuplicateCwe {
                id: cwe_id,
                first_row,
                second_row: row,
            });
        }
        seen.insert(cwe_id, row);
        out.push(CweEntry::new(cwe_id, field(name_col), field(desc_col)));
    }
    Ok(out)
}

/// Reads a hardware CWE id list: one id per line, `#` comments and blanks ignored.
pub fn parse_hardware_ids(text: &str) -> Result<BTreeSet<CweId>, IngestError> {
    let mut ids = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let id = CweId::parse_lenient(line).map_err(|source| IngestError::HardwareIds { line: i + 1, source })?;
        ids.insert(id);
    }
    Ok(ids)
}

pub fn default_hardware_ids() -> BTreeSet<CweId> {
    parse_hardware_ids(DEFAULT_HARDWARE_CWE_IDS).expect("bundled id list is valid")
}

/// Notes produced while assembling a snapshot.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    /// CVE → CWE references that have no catalog entry.
    pub dangling_cwe_refs: Vec<(CveId, CweId)>,
    /// Ids that appeared more than once in the input (later record kept).
    pub replaced_duplicates: Vec<CveId>,
}

/// An immutable, versioned view of the corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSnapshot {
    pub cves: Vec<CveRecord>,
    pub cwes: Vec<CweEntry>,
    pub version_tag: String,
    pub created_at: DateTime<Utc>,
    #[serde(default = "first_generation")]
    generation: u64,
}

fn first_generation() -> u64 {
    1
}

impl CorpusSnapshot {
    /// Builds a snapshot; duplicate CVE ids collapse to the last occurrence.
    pub fn new(cves: Vec<CveRecord>, cwes: Vec<CweEntry>) -> (Self, LoadReport) {
        let mut report = LoadReport::default();
        let merged = merge_records(Vec::new(), cves, &mut report.replaced_duplicates);
        let mut snap = CorpusSnapshot {
            cves: merged,
            cwes,
            version_tag: String::new(),
            created_at: Utc::now(),
            generation: 1,
        };
        snap.retag();
        report.dangling_cwe_refs = snap.dangling_cwe_refs();
        (snap, report)
    }

    pub fn with_created_at(mut self, at: DateTime<Utc>) -> Self {
        self.created_at = at;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.cves.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cves.len()
    }

    pub fn get(&self, id: &CveId) -> Option<&CveRecord> {
        self.cves.iter().find(|r| &r.cve_id == id)
    }

    pub fn cwe(&self, id: CweId) -> Option<&CweEntry> {
        self.cwes.iter().find(|c| c.cwe_id == id)
    }

    pub fn dangling_cwe_refs(&self) -> Vec<(CveId, CweId)> {
        let known: BTreeSet<CweId> = self.cwes.iter().map(|c| c.cwe_id).collect();
        self.cves
            .iter()
            .flat_map(|r| r.cwe_ids.iter().map(move |c| (r, *c)))
            .filter(|(_, c)| !known.contains(c))
            .map(|(r, c)| (r.cve_id.clone(), c))
            .collect()
    }

    /// Keeps the CVEs tagged with at least one of `hardware_ids`; catalog entries
    /// are restricted to the same set.
    pub fn filter_hardware_iot(&self, hardware_ids: &BTreeSet<CweId>) -> Result<CorpusSnapshot, IngestError> {
        if hardware_ids.is_empty() {
            return Err(IngestError::EmptyFilter);
        }
        let mut snap = CorpusSnapshot {
            cves: self
                .cves
                .iter()
                .filter(|r| r.cwe_ids.iter().any(|c| hardware_ids.contains(c)))
                .cloned()
                .collect(),
            cwes: self
                .cwes
                .iter()
                .filter(|c| hardware_ids.contains(&c.cwe_id))
                .cloned()
                .collect(),
            version_tag: String::new(),
            created_at: self.created_at,
            generation: self.generation,
        };
        snap.retag();
        Ok(snap)
    }

    /// Appends new records; an existing id is replaced in place by the newer record.
    pub fn append_new_data(&self, new_records: Vec<CveRecord>) -> CorpusSnapshot {
        let mut replaced = Vec::new();
        let cves = merge_records(self.cves.clone(), new_records, &mut replaced);
        let mut snap = CorpusSnapshot {
            cves,
            cwes: self.cwes.clone(),
            version_tag: String::new(),
            created_at: Utc::now(),
            generation: self.generation + 1,
        };
        snap.retag();
        snap
    }

    fn retag(&mut self) {
        let mut h = Sha256::new();
        for r in &self.cves {
            h.update(serde_json::to_vec(r).expect("records serialize"));
            h.update([0u8]);
        }
        for c in &self.cwes {
            h.update(serde_json::to_vec(c).expect("entries serialize"));
            h.update([1u8]);
        }
        let digest = h.finalize();
        let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        self.version_tag = format!("g{}-{}", self.generation, hex);
    }

    /// Per-CWE CVE counts, for reporting.
    pub fn cwe_counts(&self) -> BTreeMap<CweId, usize> {
        let mut counts = BTreeMap::new();
        for r in &self.cves {
            for c in &r.cwe_ids {
                *counts.entry(*c).or_insert(0) += 1;
            }
        }
        counts
    }
}

fn merge_records(mut base: Vec<CveRecord>, incoming: Vec<CveRecord>, replaced: &mut Vec<CveId>) -> Vec<CveRecord> {
    let mut pos: HashMap<CveId, usize> = base.iter().enumerate().map(|(i, r)| (r.cve_id.clone(), i)).collect();
    for r in incoming {
        match pos.get(&r.cve_id) {
            Some(&i) => {
                replaced.push(r.cve_id.clone());
                base[i] = r;
            }
            None => {
                pos.insert(r.cve_id.clone(), base.len());
                base.push(r);
            }
        }
    }
    base
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn rec(id: &str, desc: &str, cwes: &[u32]) -> CveRecord {
        CveRecord {
            cve_id: id.parse().unwrap(),
            description: desc.to_string(),
            published_year: 2020,
            cwe_ids: cwes.iter().map(|&n| CweId::new(n)).collect(),
            cvss_vector: None,
            cpe_names: vec![],
        }
    }

    #[test]
    fn catalog_rows() {
        let csv = "CWE-ID,Name,Weakness Abstraction,Description\n203,Observable Discrepancy,Base,\"The product behaves, differently\"\n";
        let entries = parse_cwe_catalog(csv.as_bytes()).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].cwe_id, CweId::new(203));
        assert_eq!(entries[0].name, "Observable Discrepancy");
        assert_eq!(entries[0].description, "The product behaves, differently");
        assert!(entries[0].catalog_url.ends_with("203.html"));
    }

    #[test]
    fn catalog_header_only_and_errors() {
        assert!(parse_cwe_catalog("CWE-ID,Name,Description\n".as_bytes()).unwrap().is_empty());
        assert!(matches!(
            parse_cwe_catalog("CWE-ID,Title,Description\n1,a,b\n".as_bytes()),
            Err(IngestError::MissingColumn("Name"))
        ));
        match parse_cwe_catalog("CWE-ID,Name,Description\n1,a,b\n2,c,d\n1,e,f\n".as_bytes()) {
            Err(IngestError::DuplicateCwe { id, first_row, second_row }) => {
                assert_eq!(id, CweId::new(1));
                assert_eq!((first_row, second_row), (2, 4));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn filter_keeps_intersecting() {
        let (snap, _) = CorpusSnapshot::new(
            vec![rec("CVE-2020-0001", "a", &[276]), rec("CVE-2020-0002", "b", &[79])],
            vec![],
        );
        let hw: BTreeSet<_> = [CweId::new(276)].into();
        let f = snap.filter_hardware_iot(&hw).unwrap();
        assert_eq!(f.cves.len(), 1);
        assert_eq!(f.cves[0].cve_id.as_str(), "CVE-2020-0001");
        assert_eq!(snap.cves.len(), 2);

        let all: BTreeSet<_> = [CweId::new(276), CweId::new(79)].into();
        assert_eq!(snap.filter_hardware_iot(&all).unwrap().cves, snap.cves);
        assert!(matches!(snap.filter_hardware_iot(&BTreeSet::new()), Err(IngestError::EmptyFilter)));
    }

    #[test]
    fn append_semantics() {
        let (snap, _) = CorpusSnapshot::new(
            vec![
                rec("CVE-2020-0001", "a", &[276]),
                rec("CVE-2020-0002", "b", &[276]),
                rec("CVE-2020-0003", "c", &[276]),
            ],
            vec![],
        );
        let grown = snap.append_new_data(vec![rec("CVE-2020-0004", "d", &[1]), rec("CVE-2020-0005", "e", &[1])]);
        assert_eq!(grown.len(), 5);

        let replaced = snap.append_new_data(vec![rec("CVE-2020-0002", "new text", &[276])]);
        assert_eq!(replaced.len(), 3);
        assert_eq!(replaced.cves[1].description, "new text");

        let same = snap.append_new_data(vec![]);
        assert_eq!(same.cves, snap.cves);
        assert_ne!(same.version_tag, snap.version_tag);
    }

    #[test]
    fn dangling_refs_reported() {
        let (snap, report) = CorpusSnapshot::new(
            vec![rec("CVE-2020-0001", "a", &[276, 203])],
            vec![CweEntry::new(CweId::new(203), "Observable Discrepancy", "")],
        );
        assert_eq!(report.dangling_cwe_refs, vec![(snap.cves[0].cve_id.clone(), CweId::new(276))]);
    }

    #[test]
    fn bundled_hardware_ids() {
        let ids = default_hardware_ids();
        assert!(ids.contains(&CweId::new(203)));
        assert!(ids.contains(&CweId::new(1231)));
        assert!(ids.len() > 100);
        assert!(parse_hardware_ids("CWE-1\nbogus\n").is_err());
    }
}
