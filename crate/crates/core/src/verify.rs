//! Executable property suite over a synthetic family.
//!
//! Each check returns a [`PropertyResult`]; [`run_suite`] runs them all in a
//! fixed order so the first failure is reproducible.

use std::time::{Duration, Instant};

use crate::analysis::{analyze, neighbourhood_contains, SeparabilityReport};
use crate::classifier::{
    classify_1nn, classify_rules, fit, greedy_cover, is_covered, predict_batch, s_bound,
    smooth_score, Mode, Outcome, PrototypeModel,
};
use crate::error::Result;
use crate::format::{emit_matrix, emit_model, emit_separability_report, RunReport};
use crate::matrix::{Class, DissimilarityMatrix, LabeledDataset};
use crate::synthetic::{
    build_dissimilarity, continuity_probe, cross_dissimilarity, Family, FamilySpec, SeededRng,
};

/// Wall-clock budget for one generate/analyze/fit/predict pass.
pub const PIPELINE_BUDGET: Duration = Duration::from_secs(10);
/// Largest tolerated fraction of rejected test objects on the box family.
pub const MAX_REJECT_RATE: f64 = 0.01;
/// Range the estimated box-family gap must fall in.
pub const BOX_GAP_RANGE: (f64, f64) = (0.2, 0.3);
/// Fractions of the smoothing bound at which smooth and nn modes are compared.
pub const S_FRACTIONS: [f64; 3] = [0.1, 0.5, 0.9];
/// Perturbation used by the Lipschitz check.
pub const LIPSCHITZ_H: f64 = 1e-6;
pub const LIPSCHITZ_SLACK: f64 = 1e-9;

// Independent RNG streams for the randomized checks.
const STREAM_RANDOM_DATASETS: u64 = 2;
const STREAM_DOMINANCE: u64 = 3;
const STREAM_LIPSCHITZ: u64 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl PropertyResult {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub family: Family,
    pub seed: u64,
    pub per_class: usize,
    pub test_per_class: usize,
}

impl SuiteConfig {
    /// Box: 500 train and 2000 test objects per class. Shapes: 50 and 200.
    pub fn for_family(family: Family, seed: u64) -> Self {
        let (per_class, test_per_class) = match family {
            Family::Box => (500, 2000),
            Family::Shapes => (50, 200),
        };
        Self {
            family,
            seed,
            per_class,
            test_per_class,
        }
    }
}

/// Everything produced by one generate → analyze → fit → predict(rules) pass.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub train: LabeledDataset,
    pub test: DissimilarityMatrix,
    pub test_truth: Vec<String>,
    pub report: SeparabilityReport,
    pub model: PrototypeModel,
    pub run: RunReport,
    pub elapsed: Duration,
}

impl Experiment {
    pub fn run(config: &SuiteConfig) -> Result<Self> {
        let start = Instant::now();
        let spec = FamilySpec::new(config.family, config.per_class, config.seed);
        let train_objects = spec.train_objects()?;
        let test_objects = spec.test_objects(config.test_per_class)?;
        let train = build_dissimilarity(&train_objects, spec.measure)?;
        let test = cross_dissimilarity(&train_objects, &test_objects, spec.measure)?;
        let test_truth: Vec<String> = test_objects.iter().map(|o| o.true_label.clone()).collect();

        let report = analyze(&train)?;
        let model = fit(&train, None, None)?;
        let decisions = predict_batch(&model, &test, Mode::Rules)?;
        let run = RunReport::new(&model, Mode::Rules, decisions, Some(test_truth.clone()))?;
        Ok(Self {
            train,
            test,
            test_truth,
            report,
            model,
            run,
            elapsed: start.elapsed(),
        })
    }

    /// Serialized artifacts, for byte-level comparison between runs.
    pub fn artifacts(&self) -> Vec<String> {
        vec![
            emit_matrix(self.train.matrix()),
            emit_matrix(&self.test),
            emit_separability_report(&self.report),
            emit_model(&self.model),
            self.run.emit(),
        ]
    }
}

/// Runs every property for the configured family.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<PropertyResult>> {
    let exp = Experiment::run(config)?;
    let mut out = vec![
        zero_error(config, &exp),
        training_zero_error(&exp)?,
        model_cover(&exp),
        smooth_nn_equivalence(&exp)?,
    ];
    if config.family == Family::Shapes {
        out.push(PropertyResult::new(
            "non_metric_measure",
            exp.report.triangle_violation_count > 0,
            format!(
                "triangle_violation_count {}",
                exp.report.triangle_violation_count
            ),
        ));
    }
    out.push(dominance_grid(config.seed, 1000));
    out.push(random_cover_validity(config.seed, 30)?);
    out.push(gap_excludes_cross_pairs(config.seed, 100)?);
    out.push(lipschitz(&exp, config.seed, 100)?);
    out.push(continuity(config)?);
    out.push(determinism(config, &exp)?);
    Ok(out)
}

fn zero_error(config: &SuiteConfig, exp: &Experiment) -> PropertyResult {
    let errors = exp.run.error_count().unwrap_or(usize::MAX);
    let total = exp.run.decisions.len();
    let reject_rate = (total - exp.run.accepted()) as f64 / total as f64;
    let mut ok = errors == 0 && exp.elapsed < PIPELINE_BUDGET;
    if config.family == Family::Box {
        let (lo, hi) = BOX_GAP_RANGE;
        ok &= (lo..=hi).contains(&exp.report.delta_hat) && reject_rate <= MAX_REJECT_RATE;
    }
    PropertyResult::new(
        "zero_error_accepted",
        ok,
        format!(
            "delta_hat {} errors {errors} reject_rate {reject_rate:.4} runtime {:.3}s",
            exp.report.delta_hat,
            exp.elapsed.as_secs_f64()
        ),
    )
}

fn distances_to(model: &PrototypeModel, row: &[f64], class: Class) -> Vec<f64> {
    model.prototypes(class).iter().map(|&p| row[p]).collect()
}

fn training_zero_error(exp: &Experiment) -> Result<PropertyResult> {
    let m = exp.train.matrix();
    let mut wrong = 0;
    for i in 0..m.n_rows() {
        let row = m.row(i);
        let d = classify_rules(
            &distances_to(&exp.model, row, Class::A),
            &distances_to(&exp.model, row, Class::B),
            exp.model.eps(),
        )?;
        let want = match exp.train.class_of(i) {
            Class::A => Outcome::ClassA,
            Class::B => Outcome::ClassB,
        };
        wrong += usize::from(d.outcome != want);
    }
    Ok(PropertyResult::new(
        "training_zero_error",
        wrong == 0,
        format!(
            "{wrong} of {} training rows not classified as their class",
            m.n_rows()
        ),
    ))
}

fn model_cover(exp: &Experiment) -> PropertyResult {
    let ok = [Class::A, Class::B]
        .into_iter()
        .all(|c| is_covered(&exp.train, c, exp.model.prototypes(c), exp.model.eps()));
    PropertyResult::new(
        "model_cover",
        ok,
        format!(
            "|P_A| {} |P_B| {} eps {}",
            exp.model.prototypes_a().len(),
            exp.model.prototypes_b().len(),
            exp.model.eps()
        ),
    )
}

/// Test rows whose own-class prototype is inside `eps` and whose other-class
/// prototypes are all beyond `delta_hat`.
pub fn eligible_rows(exp: &Experiment) -> Vec<usize> {
    let (eps, delta) = (exp.model.eps(), exp.model.delta_hat());
    (0..exp.test.n_rows())
        .filter(|&r| {
            let row = exp.test.row(r);
            let own = if exp.test_truth[r] == exp.model.label_a() {
                Class::A
            } else {
                Class::B
            };
            let near = |c| {
                distances_to(&exp.model, row, c)
                    .into_iter()
                    .fold(f64::INFINITY, f64::min)
            };
            near(own) < eps && near(own.other()) > delta
        })
        .collect()
}

fn smooth_nn_equivalence(exp: &Experiment) -> Result<PropertyResult> {
    let bound = exp.model.s_bound();
    let base = if bound.is_finite() {
        bound
    } else {
        exp.model.delta_hat() - exp.model.eps()
    };
    let rows = eligible_rows(exp);
    let mut mismatches = 0;
    for frac in S_FRACTIONS {
        let s = frac * base;
        for &r in &rows {
            let row = exp.test.row(r);
            let (to_a, to_b) = (
                distances_to(&exp.model, row, Class::A),
                distances_to(&exp.model, row, Class::B),
            );
            let smooth = if smooth_score(&to_a, &to_b, s)? > 0.0 {
                Outcome::ClassA
            } else {
                Outcome::ClassB
            };
            mismatches += usize::from(smooth != classify_1nn(&to_a, &to_b)?.outcome);
        }
    }
    Ok(PropertyResult::new(
        "smooth_nn_equivalence",
        mismatches == 0 && !rows.is_empty(),
        format!(
            "{mismatches} mismatches over {} eligible rows x {} scales (s_bound {bound})",
            rows.len(),
            S_FRACTIONS.len()
        ),
    ))
}

/// `exp(-eps/s) > max(|P_A|, |P_B|) * exp(-delta/s)` at `s = 0.99 * bound`.
pub fn dominance_grid(seed: u64, tuples: usize) -> PropertyResult {
    let mut rng = SeededRng::new(seed, STREAM_DOMINANCE);
    let mut failures = 0;
    let mut first = String::new();
    for _ in 0..tuples {
        let delta = rng.uniform(1e-3, 10.0);
        let eps = delta * rng.uniform(0.01, 0.99);
        let na = 1 + rng.below(1000) as usize;
        let nb = 2 + rng.below(999) as usize;
        let s = 0.99 * s_bound(delta, eps, na, nb).expect("delta > eps > 0");
        let largest = na.max(nb) as f64;
        if !((-eps / s).exp() > largest * (-delta / s).exp()) {
            failures += 1;
            if first.is_empty() {
                first = format!(" first: delta {delta} eps {eps} sizes ({na},{nb})");
            }
        }
    }
    PropertyResult::new(
        "dominance_grid",
        failures == 0,
        format!("{failures} of {tuples} tuples violate dominance{first}"),
    )
}

/// Random labelled dataset with asymmetric, non-metric values in
/// `[0.01, 1)`, both classes present.
pub fn random_dataset(rng: &mut SeededRng, n: usize) -> Result<LabeledDataset> {
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                values[i * n + j] = rng.uniform(0.01, 1.0);
            }
        }
    }
    let mut labels: Vec<&str> = (0..n)
        .map(|_| if rng.below(2) == 0 { "A" } else { "B" })
        .collect();
    labels[0] = "A";
    labels[n - 1] = "B";
    LabeledDataset::new(DissimilarityMatrix::square(n, values)?, &labels)
}

fn random_cover_validity(seed: u64, datasets: usize) -> Result<PropertyResult> {
    let mut rng = SeededRng::new(seed, STREAM_RANDOM_DATASETS);
    let mut uncovered = 0;
    for _ in 0..datasets {
        let n = 2 + rng.below(59) as usize;
        let d = random_dataset(&mut rng, n)?;
        let eps = rng.uniform(0.05, 0.8);
        for class in [Class::A, Class::B] {
            let p = greedy_cover(&d, class, eps)?;
            uncovered += usize::from(!is_covered(&d, class, &p, eps));
        }
    }
    Ok(PropertyResult::new(
        "cover_validity",
        uncovered == 0,
        format!("{uncovered} uncovered classes over {datasets} random datasets"),
    ))
}

fn gap_excludes_cross_pairs(seed: u64, datasets: usize) -> Result<PropertyResult> {
    let mut rng = SeededRng::new(seed, STREAM_RANDOM_DATASETS + 100);
    let mut inside = 0;
    for _ in 0..datasets {
        let n = 2 + rng.below(39) as usize;
        let d = random_dataset(&mut rng, n)?;
        let delta = crate::analysis::estimate_gap(&d)?;
        for i in 0..n {
            for j in 0..n {
                if d.class_of(i) != d.class_of(j)
                    && neighbourhood_contains(d.matrix(), i, j, delta)?
                {
                    inside += 1;
                }
            }
        }
    }
    Ok(PropertyResult::new(
        "gap_excludes_cross_pairs",
        inside == 0,
        format!("{inside} cross-class pairs inside the gap ball over {datasets} datasets"),
    ))
}

fn lipschitz(exp: &Experiment, seed: u64, evaluations: usize) -> Result<PropertyResult> {
    let mut rng = SeededRng::new(seed, STREAM_LIPSCHITZ);
    let s = exp.model.s();
    let mut failures = 0;
    let mut worst = 0.0_f64;
    for _ in 0..evaluations {
        let r = rng.below(exp.test.n_rows() as u64) as usize;
        let row = exp.test.row(r);
        let to_a = distances_to(&exp.model, row, Class::A);
        let to_b = distances_to(&exp.model, row, Class::B);
        let mut bump = |xs: &[f64]| -> Vec<f64> {
            xs.iter()
                .map(|&x| (x + rng.uniform(-1.0, 1.0) * LIPSCHITZ_H).max(0.0))
                .collect()
        };
        let (pa, pb) = (bump(&to_a), bump(&to_b));
        let df = (smooth_score(&pa, &pb, s)? - smooth_score(&to_a, &to_b, s)?).abs();
        let limit = (to_a.len() + to_b.len()) as f64 * LIPSCHITZ_H / s + LIPSCHITZ_SLACK;
        worst = worst.max(df / limit);
        failures += usize::from(df > limit);
    }
    Ok(PropertyResult::new(
        "score_lipschitz",
        failures == 0,
        format!(
            "{failures} of {evaluations} evaluations exceed the bound (worst ratio {worst:.3})"
        ),
    ))
}

fn continuity(config: &SuiteConfig) -> Result<PropertyResult> {
    let spec = FamilySpec::new(config.family, config.per_class, config.seed);
    let probe = continuity_probe(&spec, 12)?;
    let ok = match config.family {
        Family::Box => probe.within_step(),
        Family::Shapes => probe.max_ratio <= 1.1,
    };
    Ok(PropertyResult::new(
        "continuity_probe",
        ok,
        format!(
            "finest step {:e} diff {:e} max_ratio {:.4}",
            probe.step_sizes.last().copied().unwrap_or(0.0),
            probe.max_diffs.last().copied().unwrap_or(0.0),
            probe.max_ratio
        ),
    ))
}

fn determinism(config: &SuiteConfig, exp: &Experiment) -> Result<PropertyResult> {
    let again = Experiment::run(config)?;
    let same = exp.artifacts() == again.artifacts();
    Ok(PropertyResult::new(
        "determinism",
        same,
        if same {
            "artifacts byte-identical"
        } else {
            "artifacts differ between runs"
        },
    ))
}
