//! Qualification outcome prediction: twelve feature configurations, a
//! Gaussian Naive Bayes classifier, and repeated stratified cross-validation.

mod configs;
mod cv;
mod nb;

pub use configs::{feature_config, feature_configs, FeatureConfig, FeatureDescriptor};
pub use cv::{cross_validate, prf, stratified_folds, Confusion, EvalReport, RunMetrics};
pub use nb::{predict, train, NBModel};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ClassifyError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("feature vectors have inconsistent lengths")]
    RaggedVectors,
    #[error("model expects {expected} dimensions, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("need at least {needed} examples, got {got}")]
    TooFewExamples { needed: usize, got: usize },
    #[error("all examples share one class; nothing to separate")]
    SingleClass,
    #[error("candidate `{candidate}` has no outcome attached")]
    MissingOutcome { candidate: String },
    #[error("profiles span more than one (field, level) partition")]
    MixedPartition,
    #[error("unknown feature configuration `{0}`")]
    UnknownConfig(String),
}
