//! Streaming reader for NVD 1.1 JSON feeds.
//!
//! Field paths consumed per entry of the top-level `CVE_Items` array:
//!
//! | record field     | feed path                                                      |
//! |------------------|----------------------------------------------------------------|
//! | `cve_id`         | `cve.CVE_data_meta.ID`                                         |
//! | `description`    | `cve.description.description_data[lang == "en"].value`         |
//! | `cwe_ids`        | `cve.problemtype.problemtype_data[*].description[*].value`     |
//! | `cvss_vector`    | `impact.baseMetricV3.cvssV3.vectorString`                      |
//! | `published_year` | `publishedDate` (first four characters), else the id year      |
//! | `cpe_names`      | `configurations.nodes[*](.children)*.cpe_match[*].cpe23Uri`    |
//!
//! Items are deserialized one at a time, so memory stays bounded by the largest
//! single item rather than the feed size.

use std::cell::Cell;
use std::fmt;
use std::io::{self, BufReader, Read};
use std::rc::Rc;

use serde::de::{self, DeserializeSeed, IgnoredAny, MapAccess, SeqAccess, Visitor};
use serde::Deserialize;

use super::{CveId, CveRecord, CvssVector, CweId, IngestError};

/// Outcome of reading one feed document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeedParse {
    pub records: Vec<CveRecord>,
    /// Items skipped because they carry no English description.
    pub skipped_no_description: usize,
    pub warnings: Vec<FeedWarning>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedWarning {
    pub item_index: usize,
    pub cve_id: String,
    pub message: String,
}

impl fmt::Display for FeedWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "item {} ({}): {}", self.item_index, self.cve_id, self.message)
    }
}

/// Parses an NVD 1.1-style feed from any reader.
pub fn parse_nvd_feed<R: Read>(reader: R) -> Result<FeedParse, IngestError> {
    let counter = Rc::new(Cell::new(0u64));
    let counting = CountingReader {
        inner: BufReader::new(reader),
        count: Rc::clone(&counter),
    };
    let item_index = Rc::new(Cell::new(None));
    let mut out = FeedParse::default();
    let mut de = serde_json::Deserializer::from_reader(counting);
    let result = FeedSeed {
        out: &mut out,
        item_index: Rc::clone(&item_index),
    }
    .deserialize(&mut de)
    .and_then(|()| de.end());
    match result {
        Ok(()) => Ok(out),
        Err(e) => Err(IngestError::Feed {
            offset: counter.get(),
            item_index: item_index.get(),
            message: e.to_string(),
        }),
    }
}

/// Convenience wrapper over an in-memory document.
pub fn parse_nvd_bytes(bytes: &[u8]) -> Result<FeedParse, IngestError> {
    parse_nvd_feed(bytes)
}

struct CountingReader<R> {
    inner: R,
    count: Rc<Cell<u64>>,
}

impl<R: Read> Read for CountingReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.count.set(self.count.get() + n as u64);
        Ok(n)
    }
}

struct FeedSeed<'a> {
    out: &'a mut FeedParse,
    item_index: Rc<Cell<Option<usize>>>,
}

impl<'de> DeserializeSeed<'de> for FeedSeed<'_> {
    type Value = ();

    fn deserialize<D: de::Deserializer<'de>>(self, deserializer: D) -> Result<(), D::Error> {
        deserializer.deserialize_map(self)
    }
}

impl<'de> Visitor<'de> for FeedSeed<'_> {
    type Value = ();

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("an NVD feed object with a CVE_Items array")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<(), A::Error> {
        let mut seen_items = false;
        while let Some(key) = map.next_key::<String>()? {
            if key == "CVE_Items" {
                map.next_value_seed(ItemsSeed {
                    out: &mut *self.out,
                    item_index: Rc::clone(&self.item_index),
                })?;
                seen_items = true;
            } else {
                map.next_value::<IgnoredAny>()?;
            }
        }
        if !seen_items {
            return Err(de::Error::missing_field("CVE_Items"));
        }
        self.item_index.set(None);
        Ok(())
    }
}

struct ItemsSeed<'a> {
    out: &'a mut FeedParse,
    item_index: Rc<Cell<Option<usize>>>,
}

impl<'de> DeserializeSeed<'de> for ItemsSeed<'_> {
    type Value = ();

    fn deserialize<D: de::Deserializer<'de>>(self, deserializer: D) -> Result<(), D::Error> {
        deserializer.deserialize_seq(self)
    }
}

impl<'de> Visitor<'de> for ItemsSeed<'_> {
    type Value = ();

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("an array of CVE items")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<(), A::Error> {
        let mut index = 0usize;
        loop {
            self.item_index.set(Some(index));
            match seq.next_element::<NvdItem>()? {
                Some(item) => convert_item(index, item, self.out),
                None => break,
            }
            index += 1;
        }
        Ok(())
    }
}

fn convert_item(index: usize, item: NvdItem, out: &mut FeedParse) {
    let raw_id = item.cve.meta.id;
    let warn = |out: &mut FeedParse, message: String| {
        out.warnings.push(FeedWarning {
            item_index: index,
            cve_id: raw_id.clone(),
            message,
        })
    };

    let cve_id: CveId = match raw_id.parse() {
        Ok(id) => id,
        Err(e) => {
            warn(out, format!("{e}; item skipped"));
            return;
        }
    };

    let description = item
        .cve
        .description
        .map(|d| d.description_data)
        .unwrap_or_default()
        .into_iter()
        .find(|d| d.lang.eq_ignore_ascii_case("en") && !d.value.trim().is_empty())
        .map(|d| d.value);
    let Some(description) = description else {
        out.skipped_no_description += 1;
        return;
    };

    let mut cwe_ids: Vec<CweId> = Vec::new();
    for pt in item.cve.problemtype.map(|p| p.problemtype_data).unwrap_or_default() {
        for d in pt.description {
            // NVD-CWE-Other / NVD-CWE-noinfo carry no catalog id
            if let Ok(id) = d.value.parse::<CweId>() {
                if !cwe_ids.contains(&id) {
                    cwe_ids.push(id);
                }
            }
        }
    }

    let cvss_vector = match item.impact.and_then(|i| i.base_metric_v3) {
        Some(m) => match m.cvss_v3.vector_string.parse::<CvssVector>() {
            Ok(v) => Some(v),
            Err(e) => {
                warn(out, format!("CVSS vector dropped: {e}"));
                None
            }
        },
        None => None,
    };

    let published_year = item
        .published_date
        .as_deref()
        .and_then(|d| d.get(..4))
        .and_then(|y| y.parse().ok())
        .unwrap_or_else(|| cve_id.year());

    let mut cpe_names = Vec::new();
    if let Some(cfg) = item.configurations {
        let mut stack: Vec<Node> = cfg.nodes;
        while let Some(node) = stack.pop() {
            for m in node.cpe_match {
                if let Some(name) = cpe_product_name(&m.cpe23_uri) {
                    if !cpe_names.contains(&name) {
                        cpe_names.push(name);
                    }
                }
            }
            stack.extend(node.children);
        }
    }
    cpe_names.sort();

    out.records.push(CveRecord {
        cve_id,
        description,
        published_year,
        cwe_ids,
        cvss_vector,
        cpe_names,
    });
}

/// `cpe:2.3:h:samsung:galaxy_s4:...` → `samsung galaxy s4`.
pub fn cpe_product_name(uri: &str) -> Option<String> {
    let mut parts = uri.split(':');
    if parts.next()? != "cpe" {
        return None;
    }
    let _version = parts.next()?;
    let _part = parts.next()?;
    let vendor = parts.next()?;
    let product = parts.next()?;
    if vendor.is_empty() || product.is_empty() || vendor == "*" || product == "*" {
        return None;
    }
    let clean = |s: &str| s.replace('\\', "").replace('_', " ");
    Some(format!("{} {}", clean(vendor), clean(product)).to_lowercase())
}

#[derive(Deserialize)]
struct NvdItem {
    cve: NvdCve,
    #[serde(default)]
    impact: Option<NvdImpact>,
    #[serde(rename = "publishedDate", default)]
    published_date: Option<String>,
    #[serde(default)]
    configurations: Option<Configurations>,
}

#[derive(Deserialize)]
struct NvdCve {
    #[serde(rename = "CVE_data_meta")]
    meta: Meta,
    #[serde(default)]
    problemtype: Option<ProblemType>,
    #[serde(default)]
    description: Option<Description>,
}

#[derive(Deserialize)]
struct Meta {
    #[serde(rename = "ID")]
    id: String,
}

#[derive(Deserialize)]
struct ProblemType {
    #[serde(default)]
    problemtype_data: Vec<ProblemTypeData>,
}

#[derive(Deserialize)]
struct ProblemTypeData {
    #[serde(default)]
    description: Vec<LangString>,
}

#[derive(Deserialize)]
struct Description {
    #[serde(default)]
    description_data: Vec<LangString>,
}

#[derive(Deserialize)]
struct LangString {
    #[serde(default)]
    lang: String,
    value: String,
}

#[derive(Deserialize)]
struct NvdImpact {
    #[serde(rename = "baseMetricV3", default)]
    base_metric_v3: Option<BaseMetricV3>,
}

#[derive(Deserialize)]
struct BaseMetricV3 {
    #[serde(rename = "cvssV3")]
    cvss_v3: CvssV3,
}

#[derive(Deserialize)]
struct CvssV3 {
    #[serde(rename = "vectorString")]
    vector_string: String,
}

#[derive(Deserialize)]
struct Configurations {
    #[serde(default)]
    nodes: Vec<Node>,
}

#[derive(Deserialize)]
struct Node {
    #[serde(default)]
    cpe_match: Vec<CpeMatch>,
    #[serde(default)]
    children: Vec<Node>,
}

#[derive(Deserialize)]
struct CpeMatch {
    #[serde(rename = "cpe23Uri")]
    cpe23_uri: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(id: &str, desc: Option<&str>, cwe: &str, vector: Option<&str>) -> String {
        let desc = match desc {
            Some(d) => format!(r#"{{"description_data":[{{"lang":"en","value":"{d}"}}]}}"#),
            None => r#"{"description_data":[]}"#.to_string(),
        };
        let impact = match vector {
            Some(v) => format!(r#","impact":{{"baseMetricV3":{{"cvssV3":{{"vectorString":"{v}"}}}}}}"#),
            None => String::new(),
        };
        format!(
            r#"{{"cve":{{"CVE_data_meta":{{"ID":"{id}"}},"problemtype":{{"problemtype_data":[{{"description":[{{"lang":"en","value":"{cwe}"}}]}}]}},"description":{desc}}}{impact},"publishedDate":"2020-04-08T18:15Z"}}"#
        )
    }

    #[test]
    fn single_item_feed() {
        let doc = format!(
            r#"{{"CVE_data_type":"CVE","CVE_Items":[{}]}}"#,
            item("CVE-2020-2020", Some("Google Chrome OS spoofing"), "CWE-276", None)
        );
        let out = parse_nvd_bytes(doc.as_bytes()).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].cwe_ids, vec![CweId::new(276)]);
        assert_eq!(out.records[0].published_year, 2020);
        assert!(out.records[0].cvss_vector.is_none());
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn empty_items() {
        let out = parse_nvd_bytes(br#"{"CVE_Items":[]}"#).unwrap();
        assert!(out.records.is_empty());
        assert!(out.warnings.is_empty());
        assert_eq!(out.skipped_no_description, 0);
    }

    #[test]
    fn missing_description_skipped_and_counted() {
        let doc = format!(
            r#"{{"CVE_Items":[{},{},{}]}}"#,
            item("CVE-2021-0001", Some("first"), "CWE-1231", None),
            item("CVE-2021-0002", None, "CWE-1231", None),
            item("CVE-2021-0003", Some("third"), "NVD-CWE-Other", None),
        );
        let out = parse_nvd_bytes(doc.as_bytes()).unwrap();
        assert_eq!(out.records.len(), 2);
        assert_eq!(out.skipped_no_description, 1);
        assert!(out.records[1].cwe_ids.is_empty());
    }

    #[test]
    fn bad_vector_is_a_record_warning() {
        let doc = format!(
            r#"{{"CVE_Items":[{}]}}"#,
            item("CVE-2021-0001", Some("x y"), "CWE-1231", Some("CVSS:3.1/AV:Q/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"))
        );
        let out = parse_nvd_bytes(doc.as_bytes()).unwrap();
        assert_eq!(out.records.len(), 1);
        assert!(out.records[0].cvss_vector.is_none());
        assert_eq!(out.warnings.len(), 1);
        assert!(out.warnings[0].message.contains("AV:Q"));
    }

    #[test]
    fn malformed_document_reports_offset_and_item() {
        let good = item("CVE-2021-0001", Some("ok"), "CWE-1231", None);
        let doc = format!(r#"{{"CVE_Items":[{good},{{"cve":{{"CVE_data_meta":{{"ID":12}}}}}}]}}"#);
        match parse_nvd_bytes(doc.as_bytes()) {
            Err(IngestError::Feed { offset, item_index, .. }) => {
                assert_eq!(item_index, Some(1));
                assert!(offset as usize > good.len());
                assert!((offset as usize) <= doc.len());
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_nvd_bytes(b"{\"nope\":1}"), Err(IngestError::Feed { .. })));
        assert!(matches!(parse_nvd_bytes(b"[1,2"), Err(IngestError::Feed { .. })));
    }

    #[test]
    fn cpe_names_from_uri() {
        assert_eq!(
            cpe_product_name("cpe:2.3:h:samsung:galaxy_s4:-:*:*:*:*:*:*:*").as_deref(),
            Some("samsung galaxy s4")
        );
        assert_eq!(cpe_product_name("cpe:2.3:o:*:*"), None);
        assert_eq!(cpe_product_name("nope"), None);
    }
}
