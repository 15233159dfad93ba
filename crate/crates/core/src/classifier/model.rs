use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::cover::greedy_cover;
use super::rules::{classify_1nn, classify_rules, classify_smooth, s_bound, Decision};
use crate::analysis::estimate_gap;
use crate::error::{Error, Result};
use crate::matrix::{validate_columns, Class, DissimilarityMatrix, LabeledDataset};

/// Default cover radius as a fraction of the estimated class gap.
pub const DEFAULT_EPS_FRACTION: f64 = 0.5;

/// Default smoothing scale as a fraction of its upper bound.
pub const DEFAULT_S_FRACTION: f64 = 0.9;

/// Per-class prototype sets with the radii they were built for.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeModel {
    prototypes_a: Vec<usize>,
    prototypes_b: Vec<usize>,
    eps: f64,
    delta_hat: f64,
    s: f64,
    label_a: String,
    label_b: String,
}

impl PrototypeModel {
    /// Checks the model invariants. Prototype lists are sorted here.
    pub fn new(
        mut prototypes_a: Vec<usize>,
        mut prototypes_b: Vec<usize>,
        eps: f64,
        delta_hat: f64,
        s: f64,
        label_a: impl Into<String>,
        label_b: impl Into<String>,
    ) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::NonPositive {
                name: "eps",
                value: eps,
            });
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::NonPositive {
                name: "s",
                value: s,
            });
        }
        if !(eps < delta_hat) {
            return Err(Error::CoverRadiusTooLarge { eps, delta_hat });
        }
        if prototypes_a.is_empty() || prototypes_b.is_empty() {
            return Err(Error::NeedTwoClasses);
        }
        prototypes_a.sort_unstable();
        prototypes_b.sort_unstable();
        prototypes_a.dedup();
        prototypes_b.dedup();
        if let Some(&shared) = prototypes_a
            .iter()
            .find(|i| prototypes_b.binary_search(i).is_ok())
        {
            return Err(Error::InvalidMatrix(format!(
                "prototype {shared} assigned to both classes"
            )));
        }
        let (label_a, label_b) = (label_a.into(), label_b.into());
        if label_a == label_b {
            return Err(Error::NeedTwoClasses);
        }
        Ok(Self {
            prototypes_a,
            prototypes_b,
            eps,
            delta_hat,
            s,
            label_a,
            label_b,
        })
    }

    pub fn prototypes_a(&self) -> &[usize] {
        &self.prototypes_a
    }

    pub fn prototypes_b(&self) -> &[usize] {
        &self.prototypes_b
    }

    pub fn prototypes(&self, class: Class) -> &[usize] {
        match class {
            Class::A => &self.prototypes_a,
            Class::B => &self.prototypes_b,
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn delta_hat(&self) -> f64 {
        self.delta_hat
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn label_a(&self) -> &str {
        &self.label_a
    }

    pub fn label_b(&self) -> &str {
        &self.label_b
    }

    /// Upper bound on `s` for this model's gap, radius and prototype counts.
    pub fn s_bound(&self) -> f64 {
        // invariants already guarantee delta_hat > eps > 0 and non-empty sets
        s_bound(
            self.delta_hat,
            self.eps,
            self.prototypes_a.len(),
            self.prototypes_b.len(),
        )
        .unwrap_or(f64::NAN)
    }

    /// Same prototypes, different smoothing scale.
    pub fn with_s(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::NonPositive {
                name: "s",
                value: s,
            });
        }
        Ok(Self { s, ..self.clone() })
    }

    /// Smallest number of training columns a test matrix must have.
    pub fn min_columns(&self) -> usize {
        let last = |p: &[usize]| p.last().copied().unwrap_or(0);
        last(&self.prototypes_a).max(last(&self.prototypes_b)) + 1
    }
}

/// Builds a model from a training set.
///
/// `eps` defaults to half the estimated gap and must stay below it. `s`
/// defaults to 0.9 of its bound, or 0.9 of `delta_hat - eps` when a class
/// has a single prototype and the bound is unlimited.
pub fn fit(d: &LabeledDataset, eps: Option<f64>, s: Option<f64>) -> Result<PrototypeModel> {
    let delta_hat = estimate_gap(d)?;
    let eps = eps.unwrap_or(DEFAULT_EPS_FRACTION * delta_hat);
    if !(eps > 0.0) {
        return Err(Error::NonPositive {
            name: "eps",
            value: eps,
        });
    }
    if eps >= delta_hat {
        return Err(Error::CoverRadiusTooLarge { eps, delta_hat });
    }
    let prototypes_a = greedy_cover(d, Class::A, eps)?;
    let prototypes_b = greedy_cover(d, Class::B, eps)?;
    let s = match s {
        Some(s) => s,
        None => {
            let bound = s_bound(delta_hat, eps, prototypes_a.len(), prototypes_b.len())?;
            if bound.is_finite() {
                DEFAULT_S_FRACTION * bound
            } else {
                DEFAULT_S_FRACTION * (delta_hat - eps)
            }
        }
    };
    PrototypeModel::new(
        prototypes_a,
        prototypes_b,
        eps,
        delta_hat,
        s,
        d.label_a(),
        d.label_b(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Rules,
    Nn,
    Smooth,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Rules => "rules",
            Mode::Nn => "nn",
            Mode::Smooth => "smooth",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rules" => Ok(Mode::Rules),
            "nn" => Ok(Mode::Nn),
            "smooth" => Ok(Mode::Smooth),
            other => Err(format!(
                "unknown mode {other:?} (expected rules, nn or smooth)"
            )),
        }
    }
}

/// Classifies every row of a test × train matrix.
///
/// Only the prototype columns are read, so values in other columns never
/// influence the output and are not validated.
pub fn predict_batch(
    model: &PrototypeModel,
    test_rows: &DissimilarityMatrix,
    mode: Mode,
) -> Result<Vec<Decision>> {
    if test_rows.n_cols() < model.min_columns() {
        return Err(Error::Shape(format!(
            "test matrix has {} columns but the model indexes training object {}",
            test_rows.n_cols(),
            model.min_columns() - 1
        )));
    }
    let cols: Vec<usize> = model
        .prototypes_a
        .iter()
        .chain(&model.prototypes_b)
        .copied()
        .collect();
    if let Some(v) = validate_columns(test_rows, &cols).first() {
        return Err(Error::InvalidMatrix(v.to_string()));
    }

    let split = model.prototypes_a.len();
    (0..test_rows.n_rows())
        .into_par_iter()
        .map(|r| {
            let row = test_rows.row(r);
            let dists: Vec<f64> = cols.iter().map(|&c| row[c]).collect();
            let (to_a, to_b) = dists.split_at(split);
            match mode {
                Mode::Rules => classify_rules(to_a, to_b, model.eps),
                Mode::Nn => classify_1nn(to_a, to_b),
                Mode::Smooth => classify_smooth(to_a, to_b, model.s),
            }
        })
        .collect()
}
