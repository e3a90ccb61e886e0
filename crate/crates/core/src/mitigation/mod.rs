//! Mitigation advice: CWE page retrieval, extraction of the potential
//! mitigations section, prompt assembly, and the completion call.

mod extract;
mod llm;
mod pages;
mod prompt;
mod suggest;
mod transport;

use std::path::PathBuf;

use thiserror::Error;

use crate::corpus::CweId;

pub use extract::{extract_potential_mitigations, Extraction, MitigationDoc, MitigationSection};
pub use llm::{
    get_llm_response, prompt_digest, provider_for, CompletionProvider, FixtureProvider, LiveProvider, LlmConfig,
    ProviderMode, DEFAULT_API_KEY_ENV, DEFAULT_ENDPOINT, DEFAULT_MODEL, FIXTURE_DEFAULT_RESPONSE,
};
pub use pages::{fetch_cwe_page, page_url, PageCache, PageSource};
pub use prompt::{build_prompt, render_block, PromptBundle, PromptTemplate};
pub use suggest::{Advisor, Suggestion, DEFAULT_FAN_OUT};
pub use transport::{HttpResponse, HttpTransport, ReqwestTransport};

#[derive(Debug, Error)]
pub enum MitigationError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("no fixture page at {}", .0.display())]
    MissingFixture(PathBuf),
    #[error("{0} not found")]
    NotFound(CweId),
    #[error("HTTP {status} from {url}")]
    Http { url: String, status: u16 },
    #[error("request to {url} failed: {message}")]
    Network { url: String, message: String },
    #[error("request to {0} timed out")]
    Timeout(String),
    #[error("authentication rejected (HTTP {0})")]
    Auth(u16),
    #[error("quota exceeded")]
    Quota,
    #[error("malformed completion response: {0}")]
    Protocol(String),
    #[error("template error: {0}")]
    Template(String),
    #[error("at least one CWE id is required")]
    NoCweIds,
    #[error("every page fetch failed: {}", .0.join("; "))]
    AllFetchesFailed(Vec<String>),
    #[error("completion failed: {source}")]
    Llm {
        source: Box<MitigationError>,
        /// Kept so the caller can retry without refetching.
        prompt: String,
    },
}

impl MitigationError {
    /// Whether trying again later might succeed.
    pub fn is_retryable(&self) -> bool {
        match self {
            MitigationError::Http { status, .. } => *status >= 500 || *status == 429,
            MitigationError::Network { .. } | MitigationError::Timeout(_) | MitigationError::Quota => true,
            MitigationError::Llm { source, .. } => source.is_retryable(),
            _ => false,
        }
    }
}
