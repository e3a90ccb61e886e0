use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::extract::MitigationDoc;
use super::llm::{provider_for, LlmConfig};
use super::pages::{fetch_cwe_page, page_url, PageSource};
use super::prompt::{build_prompt, PromptTemplate};
use super::transport::HttpTransport;
use super::MitigationError;
use crate::corpus::CweId;

pub const DEFAULT_FAN_OUT: usize = 4;

pub struct Advisor {
    pub pages: PageSource,
    pub llm: LlmConfig,
    pub template: PromptTemplate,
    /// Used for live LLM calls.
    pub transport: Arc<dyn HttpTransport>,
    pub fan_out: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suggestion {
    pub prompt: String,
    pub response: String,
    pub source_urls: Vec<String>,
    /// Per-id problems that did not stop the run.
    pub warnings: Vec<String>,
}

impl Advisor {
    /// Fetches and extracts each id, `fan_out` at a time, keeping input order.
    pub fn collect_docs(&self, cwe_ids: &[CweId]) -> Vec<Result<MitigationDoc, MitigationError>> {
        let width = self.fan_out.max(1);
        let mut out = Vec::with_capacity(cwe_ids.len());
        for chunk in cwe_ids.chunks(width) {
            let results: Vec<_> = std::thread::scope(|s| {
                let handles: Vec<_> = chunk
                    .iter()
                    .map(|&id| s.spawn(move || fetch_cwe_page(&self.pages, id).map(|b| MitigationDoc::from_page(id, b))))
                    .collect();
                handles.into_iter().map(|h| h.join().expect("fetch thread panicked")).collect()
            });
            out.extend(results);
        }
        out
    }

    pub fn suggest(&self, cwe_ids: &[CweId], description: &str) -> Result<Suggestion, MitigationError> {
        if cwe_ids.is_empty() {
            return Err(MitigationError::NoCweIds);
        }
        let mut docs = Vec::new();
        let mut warnings = Vec::new();
        let mut failures = Vec::new();
        for (id, r) in cwe_ids.iter().zip(self.collect_docs(cwe_ids)) {
            match r {
                Ok(doc) => {
                    if let Some(w) = &doc.warning {
                        warnings.push(format!("{id}: {w}"));
                    }
                    docs.push(doc);
                }
                Err(e) => {
                    warnings.push(format!("{id}: {e}"));
                    failures.push(format!("{id}: {e}"));
                }
            }
        }
        if docs.is_empty() {
            return Err(MitigationError::AllFetchesFailed(failures));
        }
        let bundle = build_prompt(&self.template, description, &docs);
        let provider = provider_for(&self.llm, self.transport.clone());
        let response = provider
            .complete(&bundle.rendered)
            .map_err(|e| MitigationError::Llm { source: Box::new(e), prompt: bundle.rendered.clone() })?;
        Ok(Suggestion {
            prompt: bundle.rendered,
            response,
            source_urls: docs.iter().map(|d| page_url(&self.pages, d.cwe_id)).collect(),
            warnings,
        })
    }
}
