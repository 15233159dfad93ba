//! Zero-error classification of objects known only through pairwise
//! dissimilarities.
//!
//! The pipeline:
//!
//! 1. [`validate_matrix`] and [`analyze`]: check the table, estimate the
//!    cross-class gap `delta_hat`, per-class connectivity and how far the
//!    measure is from a metric.
//! 2. [`fit`]: cover each class greedily with prototypes at radius
//!    `eps < delta_hat` and pick a smoothing scale below its bound.
//! 3. [`predict_batch`]: classify test rows by the four-branch rule (with
//!    reject options), by nearest prototype, or by the sign of an
//!    exponential sum over prototype dissimilarities.
//!
//! [`synthetic`] generates parametric families with a known gap, and
//! [`verify`] turns the guarantees above into executable checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod classifier;
pub mod error;
pub mod format;
pub mod matrix;
pub mod synthetic;
pub mod verify;

pub use analysis::{
    analyze, estimate_connectivity, estimate_gap, metricity_report, neighbourhood_contains,
    MetricityReport, SeparabilityReport,
};
pub use classifier::{
    classify_1nn, classify_rules, classify_smooth, fit, greedy_cover, predict_batch, s_bound,
    smooth_score, Decision, Mode, Outcome, PrototypeModel,
};
pub use error::{Error, Result};
pub use matrix::{
    validate_matrix, Class, DissimilarityMatrix, LabeledDataset, Violation, ViolationKind,
};
