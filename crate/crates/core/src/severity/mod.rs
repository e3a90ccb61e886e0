//! Severity estimation: CVSS vector voting, base scoring, and a GINI
//! decision tree over one-hot vector features.

mod dataset;
mod metrics;
mod onehot;
mod score;
mod tree;
mod vote;

use thiserror::Error;

pub use dataset::{labeled_vectors, split_train_test, LabeledVector};
pub use metrics::{evaluate, evaluate_predictions, ClassMetrics, Evaluation};
pub use onehot::{column_layout, column_names, encode, one_hot, OneHotMatrix, N_COLUMNS};
pub use score::{base_score, exploitability_score, impact_score, iss, roundup, Rating, ScoreTriple};
pub use tree::{gini, modal_label, train_tree, DecisionTree, Node, TreeConfig, N_CLASSES};
pub use vote::majority_vector;

#[derive(Debug, Error, PartialEq)]
pub enum SeverityError {
    #[error("no CVSS evidence")]
    NoCvssEvidence,
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("{rows} feature rows but {labels} labels")]
    LabelMismatch { rows: usize, labels: usize },
    #[error("invalid tree: {0}")]
    BadTree(String),
}
