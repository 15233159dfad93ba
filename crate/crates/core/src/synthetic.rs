//! Parametric object families with a known class gap.
//!
//! Each object is generated from a short, bounded parameter vector, and the
//! dissimilarity between two objects is a continuous function of their
//! parameters. Two families are provided:
//!
//! - `box`: two parameters, class A uniform on `[0, 0.4] x [0, 1]`, class B
//!   uniform on `[0.6, 1] x [0, 1]`. With Euclidean distance on parameters
//!   the support gap is exactly 0.2.
//! - `shapes`: class A squares (side in `[0.8, 1.2]`, rotation in
//!   `[0, pi/2)`) and class B equilateral triangles (circumradius in
//!   `[0.8, 1.2]`, rotation in `[0, 2pi/3)`), compared by the modified
//!   Hausdorff distance between vertex sets. That measure is not a metric.
//!
//! # Random numbers
//!
//! All sampling goes through [`SeededRng`]: ChaCha8 (`rand_chacha`) seeded
//! with `ChaCha8Rng::seed_from_u64(seed)`, where training objects are drawn
//! from stream 0 and test objects from stream 1. A uniform draw on `[0, 1)`
//! is `(next_u64() >> 11) * 2^-53`. ChaCha output is specified bit-for-bit
//! and independent of platform endianness, so seeds are portable.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{DissimilarityMatrix, LabeledDataset};

pub const LABEL_A: &str = "A";
pub const LABEL_B: &str = "B";

/// Stream used for training objects.
pub const TRAIN_STREAM: u64 = 0;
/// Stream used for held-out test objects.
pub const TEST_STREAM: u64 = 1;

/// Deterministic uniform source. See the module docs for the exact recipe.
#[derive(Debug, Clone)]
pub struct SeededRng(ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform integer on `0..n` (n > 0), by rejection to avoid modulo bias.
    pub fn below(&mut self, n: u64) -> u64 {
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.0.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }
}

/// Axis-aligned bounds on an object's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ParamSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Shape(format!(
                "{} lower and {} upper bounds",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
            return Err(Error::Shape(format!(
                "empty parameter range {i}: [{}, {}]",
                lower[i], upper[i]
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn n_params(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Closed-box membership.
    pub fn contains(&self, params: &[f64]) -> bool {
        params.len() == self.n_params()
            && params
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&p, (&lo, &hi))| lo <= p && p <= hi)
    }

    fn sample(&self, rng: &mut SeededRng) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| rng.uniform(lo, hi))
            .collect()
    }

    /// Point at fraction `t` of each axis.
    fn at(&self, t: f64) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| lo + t * (hi - lo))
            .collect()
    }
}

pub type Point = (f64, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticObject {
    pub params: Vec<f64>,
    /// Vertex coordinates, shape family only.
    pub geometry: Option<Vec<Point>>,
    pub true_label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Box,
    Shapes,
}

impl Family {
    pub fn default_measure(self) -> Measure {
        match self {
            Family::Box => Measure::EuclideanParams,
            Family::Shapes => Measure::ModifiedHausdorff,
        }
    }

    /// Parameter boxes of class A and class B.
    pub fn param_spaces(self) -> (ParamSpace, ParamSpace) {
        let space = |lo: [f64; 2], hi: [f64; 2]| ParamSpace {
            lower: lo.to_vec(),
            upper: hi.to_vec(),
        };
        match self {
            Family::Box => (space([0.0, 0.0], [0.4, 1.0]), space([0.6, 0.0], [1.0, 1.0])),
            Family::Shapes => (
                space([0.8, 0.0], [1.2, FRAC_PI_2]),
                space([0.8, 0.0], [1.2, 2.0 * PI / 3.0]),
            ),
        }
    }

    /// Builds the class-A or class-B object for a parameter vector.
    pub fn object(self, class_a: bool, params: Vec<f64>) -> SyntheticObject {
        let geometry = match self {
            Family::Box => None,
            Family::Shapes if class_a => Some(square(params[0], params[1])),
            Family::Shapes => Some(triangle(params[0], params[1])),
        };
        SyntheticObject {
            params,
            geometry,
            true_label: if class_a { LABEL_A } else { LABEL_B }.to_owned(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Box => "box",
            Family::Shapes => "shapes",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "box" => Ok(Family::Box),
            "shapes" => Ok(Family::Shapes),
            other => Err(format!("unknown family {other:?} (expected box or shapes)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    EuclideanParams,
    ModifiedHausdorff,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::EuclideanParams => "euclidean_params",
            Measure::ModifiedHausdorff => "modified_hausdorff",
        }
    }

    pub fn between(self, x: &SyntheticObject, y: &SyntheticObject) -> Result<f64> {
        match self {
            Measure::EuclideanParams => {
                if x.params.len() != y.params.len() {
                    return Err(Error::MeasureMismatch {
                        measure: self.name(),
                        reason: "parameter vectors differ in length".into(),
                    });
                }
                Ok(x.params
                    .iter()
                    .zip(&y.params)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt())
            }
            Measure::ModifiedHausdorff => match (&x.geometry, &y.geometry) {
                (Some(p), Some(q)) => modified_hausdorff(p, q),
                _ => Err(Error::MeasureMismatch {
                    measure: self.name(),
                    reason: "objects carry no geometry".into(),
                }),
            },
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "euclidean_params" => Ok(Measure::EuclideanParams),
            "modified_hausdorff" => Ok(Measure::ModifiedHausdorff),
            other => Err(format!("unknown measure {other:?}")),
        }
    }
}

/// What to generate and how to compare it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub per_class: usize,
    pub seed: u64,
    pub measure: Measure,
}

impl FamilySpec {
    pub fn new(family: Family, per_class: usize, seed: u64) -> Self {
        Self {
            family,
            per_class,
            seed,
            measure: family.default_measure(),
        }
    }

    pub fn with_measure(self, measure: Measure) -> Self {
        Self { measure, ..self }
    }

    pub fn train_objects(&self) -> Result<Vec<SyntheticObject>> {
        generate_family(self.family, self.per_class, self.seed, TRAIN_STREAM)
    }

    pub fn test_objects(&self, per_class: usize) -> Result<Vec<SyntheticObject>> {
        generate_family(self.family, per_class, self.seed, TEST_STREAM)
    }
}

/// Class A objects first, then class B, `per_class` of each.
pub fn generate_family(
    family: Family,
    per_class: usize,
    seed: u64,
    stream: u64,
) -> Result<Vec<SyntheticObject>> {
    if per_class < 1 {
        return Err(Error::EmptyFamily);
    }
    let mut rng = SeededRng::new(seed, stream);
    let (space_a, space_b) = family.param_spaces();
    let mut out = Vec::with_capacity(2 * per_class);
    for (class_a, space) in [(true, &space_a), (false, &space_b)] {
        for _ in 0..per_class {
            out.push(family.object(class_a, space.sample(&mut rng)));
        }
    }
    Ok(out)
}

pub fn generate_box_family(per_class: usize, seed: u64) -> Result<Vec<SyntheticObject>> {
    generate_family(Family::Box, per_class, seed, TRAIN_STREAM)
}

pub fn generate_shape_family(per_class: usize, seed: u64) -> Result<Vec<SyntheticObject>> {
    generate_family(Family::Shapes, per_class, seed, TRAIN_STREAM)
}

/// Square centred at the origin. Side 1 at rotation 0 gives `(±0.5, ±0.5)`.
pub fn square(side: f64, rotation: f64) -> Vec<Point> {
    let r = side / 2f64.sqrt();
    (0..4)
        .map(|k| polar(r, rotation + FRAC_PI_4 + k as f64 * FRAC_PI_2))
        .collect()
}

/// Equilateral triangle centred at the origin with a vertex at angle `rotation`.
pub fn triangle(circumradius: f64, rotation: f64) -> Vec<Point> {
    (0..3)
        .map(|k| polar(circumradius, rotation + k as f64 * 2.0 * PI / 3.0))
        .collect()
}

fn polar(r: f64, angle: f64) -> Point {
    let (sin, cos) = angle.sin_cos();
    (r * cos, r * sin)
}

fn mean_nearest(from: &[Point], to: &[Point]) -> f64 {
    let total: f64 = from
        .iter()
        .map(|a| {
            to.iter()
                .map(|b| (a.0 - b.0).hypot(a.1 - b.1))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / from.len() as f64
}

/// Modified Hausdorff distance (Dubuisson & Jain): the larger of the two
/// directed mean-of-nearest distances.
pub fn modified_hausdorff(p: &[Point], q: &[Point]) -> Result<f64> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    Ok(mean_nearest(p, q).max(mean_nearest(q, p)))
}

/// Square training matrix plus labels. The diagonal is set to exactly 0.
pub fn build_dissimilarity(
    objects: &[SyntheticObject],
    measure: Measure,
) -> Result<LabeledDataset> {
    let n = objects.len();
    let mut values = vec![0.0; n * n];
    for (i, x) in objects.iter().enumerate() {
        for (j, y) in objects.iter().enumerate() {
            if i != j {
                values[i * n + j] = measure.between(x, y)?;
            }
        }
    }
    let labels: Vec<&str> = objects.iter().map(|o| o.true_label.as_str()).collect();
    LabeledDataset::new(DissimilarityMatrix::square(n, values)?, &labels)
}

/// Test × train matrix.
pub fn cross_dissimilarity(
    train: &[SyntheticObject],
    test: &[SyntheticObject],
    measure: Measure,
) -> Result<DissimilarityMatrix> {
    let mut values = Vec::with_capacity(train.len() * test.len());
    for x in test {
        for y in train {
            values.push(measure.between(x, y)?);
        }
    }
    DissimilarityMatrix::new(test.len(), train.len(), values)
}

/// Outcome of [`continuity_probe`].
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityProbe {
    /// Parameter-space step length at each refinement (halving).
    pub step_sizes: Vec<f64>,
    /// Largest `|D(x(t + h), y) - D(x(t), y)|` along the segment per step.
    pub max_diffs: Vec<f64>,
    /// Largest ratio between consecutive entries of `max_diffs`; at most
    /// 1 when the differences never grow as the step shrinks.
    pub max_ratio: f64,
}

impl ContinuityProbe {
    /// Differences at the finest step never exceed the step itself.
    pub fn within_step(&self) -> bool {
        self.max_diffs
            .iter()
            .zip(&self.step_sizes)
            .all(|(d, h)| *d <= *h * (1.0 + 1e-12))
    }
}

/// Largest refinement depth accepted by the probe (2^24 evaluations).
pub const MAX_PROBE_STEPS: usize = 24;

/// Probes continuity of the measure along the diagonal of the class-A
/// parameter box, from 25% to 75% of each range, against the first
/// class-A object the spec generates.
pub fn continuity_probe(spec: &FamilySpec, steps: usize) -> Result<ContinuityProbe> {
    let (space_a, _) = spec.family.param_spaces();
    let from = space_a.at(0.25);
    let to = space_a.at(0.75);
    let reference = generate_family(spec.family, 1, spec.seed, TRAIN_STREAM)?.swap_remove(0);
    continuity_probe_segment(spec, &reference, &from, &to, steps)
}

/// Walks `from -> to` with `2^k` equal steps for `k = 1..=steps` and records
/// the largest change in dissimilarity to `reference` per refinement.
pub fn continuity_probe_segment(
    spec: &FamilySpec,
    reference: &SyntheticObject,
    from: &[f64],
    to: &[f64],
    steps: usize,
) -> Result<ContinuityProbe> {
    if steps < 2 {
        return Err(Error::Probe(format!(
            "need at least 2 refinements, got {steps}"
        )));
    }
    if steps > MAX_PROBE_STEPS {
        return Err(Error::Probe(format!(
            "at most {MAX_PROBE_STEPS} refinements, got {steps}"
        )));
    }
    if from.len() != to.len() {
        return Err(Error::Probe("segment endpoints differ in dimension".into()));
    }
    let length = from
        .iter()
        .zip(to)
        .map(|(a, b)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt();
    if !(length > 0.0) {
        return Err(Error::Probe("degenerate segment".into()));
    }
    let class_a = reference.true_label == LABEL_A;
    let point =
        |t: f64| -> Vec<f64> { from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect() };

    let mut step_sizes = Vec::with_capacity(steps);
    let mut max_diffs = Vec::with_capacity(steps);
    for k in 1..=steps {
        let cells = 1usize << k;
        let mut prev = spec
            .measure
            .between(&spec.family.object(class_a, point(0.0)), reference)?;
        let mut worst = 0.0_f64;
        for j in 1..=cells {
            let t = j as f64 / cells as f64;
            let next = spec
                .measure
                .between(&spec.family.object(class_a, point(t)), reference)?;
            worst = worst.max((next - prev).abs());
            prev = next;
        }
        step_sizes.push(length / cells as f64);
        max_diffs.push(worst);
    }
    let max_ratio = max_diffs
        .windows(2)
        .map(|w| {
            if w[0] > 0.0 {
                w[1] / w[0]
            } else if w[1] > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    Ok(ContinuityProbe {
        step_sizes,
        max_diffs,
        max_ratio,
    })
}
