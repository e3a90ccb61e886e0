//! Description matching and entity derivation: exploit targets, attack
//! impacts, the TF-IDF similarity index, and relevance banding.

mod index;
mod nlp;
mod persist;
mod relevance;

use thiserror::Error;

pub use index::{
    build_index, rank_similar, DocumentMeta, DocumentVector, SimilarityIndex, SimilarityMatch, DEFAULT_TOP_K,
};
pub use nlp::{
    attack_impact, best_collocation, derive_attack_impact, derive_exploit_target, exploit_target, make_nlp_entry,
    NlpEntry, TargetMatch, UNKNOWN_TARGET, UNSPECIFIED_IMPACT,
};
pub use persist::{
    decode_index, encode_index, load_index, save_index, IndexFileError, INDEX_FORMAT_VERSION, INDEX_MAGIC,
};
pub use relevance::{
    classify_relevance, cwe_distribution, CweDistribution, RelevanceBand, HIGH_THRESHOLD, MODERATE_THRESHOLD,
};

#[derive(Debug, Error, PartialEq)]
pub enum EntityError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("query has no content terms")]
    EmptyQuery,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("similarity {0} outside [0, 1]")]
    SimilarityOutOfRange(f64),
}
