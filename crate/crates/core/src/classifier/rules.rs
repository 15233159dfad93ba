use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    ClassA,
    ClassB,
    /// Far from both classes.
    RejectOutlier,
    /// Close to both classes (or an exact nearest-neighbour tie).
    RejectAmbiguous,
}

impl Outcome {
    pub const ALL: [Outcome; 4] = [
        Outcome::ClassA,
        Outcome::ClassB,
        Outcome::RejectOutlier,
        Outcome::RejectAmbiguous,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::ClassA => "class_a",
            Outcome::ClassB => "class_b",
            Outcome::RejectOutlier => "reject_outlier",
            Outcome::RejectAmbiguous => "reject_ambiguous",
        }
    }

    pub fn is_reject(self) -> bool {
        matches!(self, Outcome::RejectOutlier | Outcome::RejectAmbiguous)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Outcome::ALL
            .into_iter()
            .find(|o| o.as_str() == s)
            .ok_or_else(|| format!("unknown outcome {s:?}"))
    }
}

/// Outcome plus the quantities it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub outcome: Outcome,
    /// Smallest dissimilarity to a class-A prototype.
    pub d_a: f64,
    /// Smallest dissimilarity to a class-B prototype.
    pub d_b: f64,
    /// Exponential-sum value, smooth mode only.
    pub score: Option<f64>,
}

fn min_of(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyDistances);
    }
    Ok(xs.iter().copied().fold(f64::INFINITY, f64::min))
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

/// Four-branch neighbourhood rule, evaluated in order:
///
/// 1. nothing of either class within `eps` → reject as outlier
/// 2. nothing of class B within `eps` → class A
/// 3. nothing of class A within `eps` → class B
/// 4. both classes within `eps` → reject as ambiguous
///
/// "Within" is strict (`d < eps`).
pub fn classify_rules(
    distances_to_a: &[f64],
    distances_to_b: &[f64],
    eps: f64,
) -> Result<Decision> {
    positive("eps", eps)?;
    let d_a = min_of(distances_to_a)?;
    let d_b = min_of(distances_to_b)?;
    let outcome = if d_a >= eps && d_b >= eps {
        Outcome::RejectOutlier
    } else if d_b >= eps {
        Outcome::ClassA
    } else if d_a >= eps {
        Outcome::ClassB
    } else {
        Outcome::RejectAmbiguous
    };
    Ok(Decision {
        outcome,
        d_a,
        d_b,
        score: None,
    })
}

/// Nearest prototype wins; an exact tie is rejected as ambiguous.
pub fn classify_1nn(distances_to_a: &[f64], distances_to_b: &[f64]) -> Result<Decision> {
    let d_a = min_of(distances_to_a)?;
    let d_b = min_of(distances_to_b)?;
    let outcome = if d_a < d_b {
        Outcome::ClassA
    } else if d_a > d_b {
        Outcome::ClassB
    } else {
        Outcome::RejectAmbiguous
    };
    Ok(Decision {
        outcome,
        d_a,
        d_b,
        score: None,
    })
}

/// `f = Σ_A exp(-d/s) - Σ_B exp(-d/s)`, summed in the order given.
pub fn smooth_score(distances_to_a: &[f64], distances_to_b: &[f64], s: f64) -> Result<f64> {
    positive("s", s)?;
    if distances_to_a.is_empty() || distances_to_b.is_empty() {
        return Err(Error::EmptyDistances);
    }
    let sum = |xs: &[f64]| xs.iter().map(|&d| (-d / s).exp()).sum::<f64>();
    Ok(sum(distances_to_a) - sum(distances_to_b))
}

/// Class A when the exponential sum is strictly positive, class B otherwise
/// (a zero score goes to B). Never rejects.
pub fn classify_smooth(distances_to_a: &[f64], distances_to_b: &[f64], s: f64) -> Result<Decision> {
    let score = smooth_score(distances_to_a, distances_to_b, s)?;
    Ok(Decision {
        outcome: if score > 0.0 {
            Outcome::ClassA
        } else {
            Outcome::ClassB
        },
        d_a: min_of(distances_to_a)?,
        d_b: min_of(distances_to_b)?,
        score: Some(score),
    })
}

/// Upper limit on the smoothing scale: `(delta - eps) / ln(max(size_a, size_b))`.
///
/// Below it `exp(-eps/s) > max(size_a, size_b) * exp(-delta/s)`, so the
/// nearest prototype's term outweighs the whole opposing sum. With one
/// prototype per class the logarithm vanishes and the result is
/// `f64::INFINITY`.
pub fn s_bound(delta: f64, eps: f64, size_a: usize, size_b: usize) -> Result<f64> {
    positive("eps", eps)?;
    if !(delta > eps) {
        return Err(Error::NoMargin { delta, eps });
    }
    let largest = size_a.max(size_b);
    if size_a == 0 || size_b == 0 {
        return Err(Error::NonPositive {
            name: "prototype count",
            value: size_a.min(size_b) as f64,
        });
    }
    if largest == 1 {
        return Ok(f64::INFINITY);
    }
    Ok((delta - eps) / (largest as f64).ln())
}
