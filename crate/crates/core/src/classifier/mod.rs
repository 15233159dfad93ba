//! Finite-sample classifiers built on prototype covers.
//!
//! Three decision modes share the same prototype sets:
//! - `rules`: the four-branch neighbourhood rule with two reject outcomes,
//! - `nn`: plain nearest-prototype,
//! - `smooth`: sign of an exponential sum over prototype dissimilarities.

mod cover;
mod model;
mod rules;

pub use cover::{greedy_cover, greedy_cover_for, is_covered};
pub use model::{fit, predict_batch, Mode, PrototypeModel};
pub use rules::{
    classify_1nn, classify_rules, classify_smooth, s_bound, smooth_score, Decision, Outcome,
};
