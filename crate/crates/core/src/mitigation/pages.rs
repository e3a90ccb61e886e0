use std::fs;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, SystemTime};

use super::transport::HttpTransport;
use super::MitigationError;
use crate::corpus::CweId;

/// Where CWE definition pages come from.
#[derive(Clone)]
pub enum PageSource {
    /// Committed snapshots named `CWE-<n>.html`.
    Fixture { dir: PathBuf },
    Live {
        transport: Arc<dyn HttpTransport>,
        /// On-disk cache keyed by id; entries older than `ttl` are refetched.
        cache: Option<PageCache>,
        /// Defaults to the MITRE definition URL; `{id}` is replaced by the number.
        url_pattern: Option<String>,
    },
}

#[derive(Debug, Clone)]
pub struct PageCache {
    pub dir: PathBuf,
    pub ttl: Duration,
}

impl PageCache {
    fn path(&self, cwe: CweId) -> PathBuf {
        self.dir.join(format!("{cwe}.html"))
    }

    fn read(&self, cwe: CweId) -> Option<Vec<u8>> {
        let path = self.path(cwe);
        let age = fs::metadata(&path).ok()?.modified().ok()?;
        let fresh = SystemTime::now().duration_since(age).map(|a| a <= self.ttl).unwrap_or(true);
        if fresh {
            fs::read(path).ok()
        } else {
            None
        }
    }

    fn write(&self, cwe: CweId, body: &[u8]) {
        if let Err(e) = fs::create_dir_all(&self.dir).and_then(|_| fs::write(self.path(cwe), body)) {
            log::warn!("could not cache {cwe}: {e}");
        }
    }
}

pub fn page_url(source: &PageSource, cwe: CweId) -> String {
    match source {
        PageSource::Live { url_pattern: Some(p), .. } => p.replace("{id}", &cwe.number().to_string()),
        _ => cwe.catalog_url(),
    }
}

pub fn fetch_cwe_page(source: &PageSource, cwe: CweId) -> Result<Vec<u8>, MitigationError> {
    match source {
        PageSource::Fixture { dir } => {
            let path = dir.join(format!("{cwe}.html"));
            fs::read(&path).map_err(|_| MitigationError::MissingFixture(path))
        }
        PageSource::Live { transport, cache, .. } => {
            if let Some(body) = cache.as_ref().and_then(|c| c.read(cwe)) {
                return Ok(body);
            }
            let url = page_url(source, cwe);
            let resp = transport.get(&url)?;
            match resp.status {
                200..=299 => {
                    if let Some(c) = cache {
                        c.write(cwe, &resp.body);
                    }
                    Ok(resp.body)
                }
                404 => Err(MitigationError::NotFound(cwe)),
                status => Err(MitigationError::Http { url, status }),
            }
        }
    }
}
