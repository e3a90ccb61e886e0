//! Configuration, the analysis engine, the HTTP API and the CLI.

mod api;
pub mod cli;
mod config;
mod engine;
pub mod pipeline;

use std::path::PathBuf;

use thiserror::Error;

use crate::entity::EntityError;
use crate::mitigation::MitigationError;
use crate::ontology::QueryError;

pub use api::{router, serve, ApiError, AppState, MAX_K};
pub use config::{EngineConfig, MitigationSettings, API_KEY_ENV_OVERRIDE};
pub use engine::{advisor_from_config, AnalysisReport, CorpusInfo, Engine};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },
    #[error("engine is not loaded")]
    Unavailable,
    #[error(transparent)]
    Entity(EntityError),
    #[error("query error: {0}")]
    Query(QueryError),
    #[error("training failed: {0}")]
    Training(String),
    #[error(transparent)]
    Mitigation(MitigationError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl EngineError {
    /// Whether the caller (rather than the program) is at fault.
    pub fn is_user_error(&self) -> bool {
        match self {
            EngineError::Config(_)
            | EngineError::Input { .. }
            | EngineError::Entity(_)
            | EngineError::Query(_)
            | EngineError::Training(_) => true,
            EngineError::Mitigation(m) => matches!(
                m,
                MitigationError::NoCweIds
                    | MitigationError::MissingFixture(_)
                    | MitigationError::Template(_)
                    | MitigationError::Config(_)
                    | MitigationError::NotFound(_)
                    | MitigationError::AllFetchesFailed(_)
            ) || matches!(m, MitigationError::Llm { source, .. } if matches!(**source, MitigationError::Config(_))),
            EngineError::Unavailable | EngineError::Internal(_) => false,
        }
    }
}
