//! Single-file index format.
//!
//! ```text
//! "HWVW" u16:format_version str:version_tag
//! u32:n_terms  { str:term f64:idf }*
//! u32:n_docs   { str:cve_id u32:n { u32:term_idx f64:weight }*
//!                str:description u32:n_cwe { u32:cwe }* u8:has_cvss [str:cvss] }*
//! ```
//! Integers and floats are little-endian; `str` is a u32 byte length followed
//! by UTF-8.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use super::index::{DocumentMeta, DocumentVector, SimilarityIndex};
use crate::corpus::{CweId, CvssVector};

pub const INDEX_MAGIC: &[u8; 4] = b"HWVW";
pub const INDEX_FORMAT_VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum IndexFileError {
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("unsupported index format version {found} (expected {expected})")]
    UnsupportedVersion { found: u16, expected: u16 },
    #[error("index file truncated at byte {0}")]
    Truncated(usize),
    #[error("corrupt index file: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: usize) {
        let v = u32::try_from(v).expect("index section exceeds u32");
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len());
        self.0.extend_from_slice(s.as_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], IndexFileError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or(IndexFileError::Truncated(self.pos))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, IndexFileError> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16, IndexFileError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<usize, IndexFileError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }
    fn f64(&mut self) -> Result<f64, IndexFileError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn str(&mut self) -> Result<String, IndexFileError> {
        let n = self.u32()?;
        let at = self.pos;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| IndexFileError::Corrupt(format!("invalid UTF-8 at byte {at}")))
    }
}

pub fn encode_index(index: &SimilarityIndex) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(INDEX_MAGIC);
    w.u16(INDEX_FORMAT_VERSION);
    w.str(index.version_tag());
    let terms: BTreeMap<&str, usize> = index.idf().keys().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
    w.u32(index.idf().len());
    for (t, v) in index.idf() {
        w.str(t);
        w.f64(*v);
    }
    w.u32(index.len());
    for (doc, meta) in index.documents().iter().zip(index.meta()) {
        w.str(doc.cve_id().as_str());
        w.u32(doc.weights().len());
        for (t, v) in doc.weights() {
            w.u32(terms[t.as_str()]);
            w.f64(*v);
        }
        w.str(&meta.description);
        w.u32(meta.cwe_ids.len());
        for c in &meta.cwe_ids {
            w.u32(c.number() as usize);
        }
        match &meta.cvss_vector {
            Some(v) => {
                w.u8(1);
                w.str(&v.canonical_string());
            }
            None => w.u8(0),
        }
    }
    w.0
}

pub fn decode_index(bytes: &[u8]) -> Result<SimilarityIndex, IndexFileError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4).map_err(|_| IndexFileError::BadMagic)? != INDEX_MAGIC {
        return Err(IndexFileError::BadMagic);
    }
    let version = r.u16()?;
    if version != INDEX_FORMAT_VERSION {
        return Err(IndexFileError::UnsupportedVersion {
            found: version,
            expected: INDEX_FORMAT_VERSION,
        });
    }
    let version_tag = r.str()?;
    let n_terms = r.u32()?;
    let mut terms = Vec::with_capacity(n_terms.min(1 << 20));
    let mut idf = BTreeMap::new();
    for _ in 0..n_terms {
        let t = r.str()?;
        let v = r.f64()?;
        terms.push(t.clone());
        idf.insert(t, v);
    }
    let n_docs = r.u32()?;
    let mut docs = Vec::with_capacity(n_docs.min(1 << 20));
    let mut meta = Vec::with_capacity(n_docs.min(1 << 20));
    for _ in 0..n_docs {
        let id = r.str()?;
        let cve_id = id.parse().map_err(|e| IndexFileError::Corrupt(format!("{e}")))?;
        let n = r.u32()?;
        let mut weights = BTreeMap::new();
        for _ in 0..n {
            let ti = r.u32()?;
            let term = terms
                .get(ti)
                .ok_or_else(|| IndexFileError::Corrupt(format!("term index {ti} out of range")))?;
            weights.insert(term.clone(), r.f64()?);
        }
        docs.push(DocumentVector::new(cve_id, weights));
        let description = r.str()?;
        let n_cwe = r.u32()?;
        let mut cwe_ids = Vec::with_capacity(n_cwe.min(1024));
        for _ in 0..n_cwe {
            cwe_ids.push(CweId::new(r.u32()? as u32));
        }
        let cvss_vector = match r.u8()? {
            0 => None,
            1 => Some(
                r.str()?
                    .parse::<CvssVector>()
                    .map_err(|e| IndexFileError::Corrupt(e.to_string()))?,
            ),
            b => return Err(IndexFileError::Corrupt(format!("bad cvss flag {b}"))),
        };
        meta.push(DocumentMeta {
            description,
            cwe_ids,
            cvss_vector,
        });
    }
    if r.pos != bytes.len() {
        return Err(IndexFileError::Corrupt(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    Ok(SimilarityIndex::from_parts(version_tag, idf, docs, meta))
}

pub fn save_index(index: &SimilarityIndex, path: &Path) -> Result<(), IndexFileError> {
    fs::write(path, encode_index(index))?;
    Ok(())
}

pub fn load_index(path: &Path) -> Result<SimilarityIndex, IndexFileError> {
    decode_index(&fs::read(path)?)
}
