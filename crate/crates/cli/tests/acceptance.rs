//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.
//!
//! Oracles here are written against raw matrices and do not reuse the
//! library's own checkers.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use gapnn::synthetic::{
    build_dissimilarity, cross_dissimilarity, Family, FamilySpec, SyntheticObject,
};
use gapnn::{
    analyze, estimate_gap, fit, greedy_cover, metricity_report, neighbourhood_contains,
    predict_batch, s_bound, smooth_score, Class, Decision, DissimilarityMatrix, LabeledDataset,
    Mode, Outcome, PrototypeModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RUNTIME_BUDGET: Duration = Duration::from_secs(10);
const BOX_GAP: (f64, f64) = (0.2, 0.3);
const MAX_REJECT_RATE: f64 = 0.01;
const S_FRACTIONS: [f64; 3] = [0.1, 0.5, 0.9];
const DOMINANCE_TUPLES: usize = 1000;
const DOMINANCE_S_FRACTION: f64 = 0.99;
const COVER_DATASETS: usize = 30;
const COVER_MAX_N: usize = 60;
const TINY_INSTANCES: usize = 10;
const TINY_MAX_N: usize = 10;
const GAP_DATASETS: usize = 100;
const LIPSCHITZ_EVALS: usize = 100;
const LIPSCHITZ_H: f64 = 1e-6;
const LIPSCHITZ_SLACK: f64 = 1e-9;

type Verdict = Result<String, String>;

struct Pipeline {
    train: LabeledDataset,
    test: DissimilarityMatrix,
    truth: Vec<String>,
    delta_hat: f64,
    triangle_violations: u64,
    model: PrototypeModel,
    decisions: Vec<Decision>,
    elapsed: Duration,
}

fn run_pipeline(family: Family, seed: u64, per_class: usize, test_per_class: usize) -> Pipeline {
    let start = Instant::now();
    let spec = FamilySpec::new(family, per_class, seed);
    let train_objects = spec.train_objects().unwrap();
    let test_objects = spec.test_objects(test_per_class).unwrap();
    let train = build_dissimilarity(&train_objects, spec.measure).unwrap();
    let test = cross_dissimilarity(&train_objects, &test_objects, spec.measure).unwrap();
    let report = analyze(&train).unwrap();
    let model = fit(&train, None, None).unwrap();
    let decisions = predict_batch(&model, &test, Mode::Rules).unwrap();
    let elapsed = start.elapsed();
    Pipeline {
        truth: test_objects.iter().map(|o| o.true_label.clone()).collect(),
        delta_hat: report.delta_hat,
        triangle_violations: report.triangle_violation_count,
        train,
        test,
        model,
        decisions,
        elapsed,
    }
}

fn brute_force_gap(d: &LabeledDataset) -> f64 {
    let m = d.matrix();
    let mut best = f64::INFINITY;
    for i in 0..d.len() {
        for j in 0..d.len() {
            if d.labels()[i] != d.labels()[j] {
                best = best.min(m.get(i, j));
            }
        }
    }
    best
}

/// (misclassified among accepted, rejected)
fn tally(p: &Pipeline) -> (usize, usize) {
    let mut wrong = 0;
    let mut rejected = 0;
    for (d, t) in p.decisions.iter().zip(&p.truth) {
        let label = match d.outcome {
            Outcome::ClassA => p.model.label_a(),
            Outcome::ClassB => p.model.label_b(),
            _ => {
                rejected += 1;
                continue;
            }
        };
        wrong += usize::from(label != t);
    }
    (wrong, rejected)
}

fn criterion_1() -> Verdict {
    let p = run_pipeline(Family::Box, 42, 500, 2000);
    let oracle = brute_force_gap(&p.train);
    let (wrong, rejected) = tally(&p);
    let reject_rate = rejected as f64 / p.decisions.len() as f64;
    let msg = format!(
        "delta_hat {:.6} (oracle {:.6}), errors {wrong}, reject rate {:.4}, runtime {:.2}s",
        p.delta_hat,
        oracle,
        reject_rate,
        p.elapsed.as_secs_f64()
    );
    let ok = p.delta_hat == oracle
        && (BOX_GAP.0..=BOX_GAP.1).contains(&p.delta_hat)
        && wrong == 0
        && reject_rate <= MAX_REJECT_RATE
        && p.elapsed < RUNTIME_BUDGET;
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn min_over(row: &[f64], cols: &[usize]) -> f64 {
    cols.iter().map(|&c| row[c]).fold(f64::INFINITY, f64::min)
}

fn criterion_2() -> Verdict {
    let p = run_pipeline(Family::Box, 42, 500, 2000);
    let (eps, delta) = (p.model.eps(), p.model.delta_hat());
    let bound = s_bound(
        delta,
        eps,
        p.model.prototypes_a().len(),
        p.model.prototypes_b().len(),
    )
    .map_err(|e| e.to_string())?;
    if !bound.is_finite() {
        return Err("s_bound is unbounded for this model".into());
    }
    let eligible: Vec<usize> = (0..p.test.n_rows())
        .filter(|&r| {
            let row = p.test.row(r);
            let (own, other) = if p.truth[r] == p.model.label_a() {
                (p.model.prototypes_a(), p.model.prototypes_b())
            } else {
                (p.model.prototypes_b(), p.model.prototypes_a())
            };
            min_over(row, own) < eps && min_over(row, other) > delta
        })
        .collect();
    if eligible.is_empty() {
        return Err("no eligible test objects".into());
    }
    let nn = predict_batch(&p.model, &p.test, Mode::Nn).unwrap();
    let mut mismatches = 0;
    for frac in S_FRACTIONS {
        let model = p.model.with_s(frac * bound).unwrap();
        let smooth = predict_batch(&model, &p.test, Mode::Smooth).unwrap();
        mismatches += eligible
            .iter()
            .filter(|&&r| smooth[r].outcome != nn[r].outcome)
            .count();
    }
    let msg = format!(
        "{mismatches} mismatches over {} eligible objects x {} scales (s_bound {bound:.6})",
        eligible.len(),
        S_FRACTIONS.len()
    );
    if mismatches == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = 0;
    for _ in 0..DOMINANCE_TUPLES {
        let delta: f64 = rng.gen_range(0.01..10.0);
        let eps = delta * rng.gen_range(0.01..0.99);
        // at least one class with two prototypes, otherwise the bound is unlimited
        let (na, nb) = loop {
            let pair = (rng.gen_range(1..=1000usize), rng.gen_range(1..=1000usize));
            if pair.0.max(pair.1) >= 2 {
                break pair;
            }
        };
        let s = DOMINANCE_S_FRACTION * s_bound(delta, eps, na, nb).unwrap();
        let largest = na.max(nb) as f64;
        if !((-eps / s).exp() > largest * (-delta / s).exp()) {
            failures += 1;
        }
    }
    let msg =
        format!("{failures} of {DOMINANCE_TUPLES} tuples violate dominance at s = 0.99 s_bound");
    if failures == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn random_dataset(rng: &mut ChaCha8Rng, n: usize) -> LabeledDataset {
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                values[i * n + j] = rng.gen_range(0.01..1.0);
            }
        }
    }
    let mut labels: Vec<&str> = (0..n)
        .map(|_| if rng.gen::<bool>() { "A" } else { "B" })
        .collect();
    labels[0] = "A";
    labels[n - 1] = "B";
    LabeledDataset::new(DissimilarityMatrix::square(n, values).unwrap(), &labels).unwrap()
}

fn members(d: &LabeledDataset, class: Class) -> Vec<usize> {
    (0..d.len()).filter(|&i| d.class_of(i) == class).collect()
}

fn uncovered(d: &LabeledDataset, class: Class, protos: &[usize], eps: f64) -> usize {
    let m = d.matrix();
    members(d, class)
        .into_iter()
        .filter(|&i| {
            !protos
                .iter()
                .any(|&p| p == i || (d.class_of(p) == class && m.get(i, p).min(m.get(p, i)) < eps))
        })
        .count()
}

fn brute_force_min_cover(d: &LabeledDataset, class: Class, eps: f64) -> usize {
    let ms = members(d, class);
    (1u32..(1 << ms.len()))
        .filter(|mask| {
            let chosen: Vec<usize> = (0..ms.len())
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| ms[b])
                .collect();
            uncovered(d, class, &chosen, eps) == 0
        })
        .map(u32::count_ones)
        .min()
        .unwrap() as usize
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut missing = 0;
    for _ in 0..COVER_DATASETS {
        let n = rng.gen_range(2..=COVER_MAX_N);
        let d = random_dataset(&mut rng, n);
        let eps = rng.gen_range(0.05..0.8);
        for class in [Class::A, Class::B] {
            let protos = greedy_cover(&d, class, eps).unwrap();
            missing += uncovered(&d, class, &protos, eps);
        }
    }
    let mut sizes = Vec::new();
    for _ in 0..TINY_INSTANCES {
        let n = rng.gen_range(2..=TINY_MAX_N);
        let d = random_dataset(&mut rng, n);
        let eps = rng.gen_range(0.1..0.6);
        for class in [Class::A, Class::B] {
            let greedy = greedy_cover(&d, class, eps).unwrap().len();
            sizes.push(format!(
                "{greedy}/{}",
                brute_force_min_cover(&d, class, eps)
            ));
        }
    }
    let msg = format!(
        "{missing} uncovered members over {COVER_DATASETS} datasets; greedy/minimum on tiny instances: {}",
        sizes.join(" ")
    );
    if missing == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut inside = 0;
    for _ in 0..GAP_DATASETS {
        let n = rng.gen_range(2..=40);
        let d = random_dataset(&mut rng, n);
        let eps = estimate_gap(&d).unwrap();
        if eps != brute_force_gap(&d) {
            return Err("estimate_gap disagrees with brute force".into());
        }
        for i in 0..n {
            for j in 0..n {
                if d.class_of(i) != d.class_of(j)
                    && neighbourhood_contains(d.matrix(), i, j, eps).unwrap()
                {
                    inside += 1;
                }
            }
        }
    }
    let msg = format!(
        "{inside} cross-class pairs inside NB(x) at eps = delta_hat over {GAP_DATASETS} datasets"
    );
    if inside == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_6() -> Verdict {
    let p = run_pipeline(Family::Shapes, 7, 50, 200);
    let (wrong, rejected) = tally(&p);
    let metric_check = metricity_report(p.train.matrix()).unwrap();
    let msg = format!(
        "triangle_violation_count {} (required > 0), errors {wrong}, rejected {rejected}/{}, runtime {:.2}s",
        p.triangle_violations,
        p.decisions.len(),
        p.elapsed.as_secs_f64()
    );
    let ok = p.triangle_violations > 0
        && metric_check.triangle_violation_count == p.triangle_violations
        && wrong == 0
        && p.elapsed < RUNTIME_BUDGET;
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = 0;
    let mut worst = 0.0_f64;
    for _ in 0..LIPSCHITZ_EVALS {
        let na = rng.gen_range(1..=30);
        let nb = rng.gen_range(1..=30);
        let a: Vec<f64> = (0..na).map(|_| rng.gen_range(0.0..2.0)).collect();
        let b: Vec<f64> = (0..nb).map(|_| rng.gen_range(0.0..2.0)).collect();
        let s = rng.gen_range(0.01..1.0);
        let mut bump = |xs: &[f64]| -> Vec<f64> {
            xs.iter()
                .map(|&x| {
                    (x + if rng.gen::<bool>() {
                        LIPSCHITZ_H
                    } else {
                        -LIPSCHITZ_H
                    })
                    .max(0.0)
                })
                .collect()
        };
        let (pa, pb) = (bump(&a), bump(&b));
        let df = (smooth_score(&pa, &pb, s).unwrap() - smooth_score(&a, &b, s).unwrap()).abs();
        let limit = (na + nb) as f64 * LIPSCHITZ_H / s + LIPSCHITZ_SLACK;
        worst = worst.max(df / limit);
        failures += usize::from(df > limit);
    }
    let msg = format!("{failures} of {LIPSCHITZ_EVALS} evaluations exceed (|P_A|+|P_B|) h/s + 1e-9 (worst ratio {worst:.3})");
    if failures == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn gapnn(args: &[&str], dir: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_gapnn"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "gapnn {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn cli_run(
    dir: &Path,
    family: &str,
    per_class: &str,
    seed: &str,
    test: &str,
) -> Result<(), String> {
    gapnn(
        &[
            "generate",
            "--family",
            family,
            "--per-class",
            per_class,
            "--seed",
            seed,
            "--out-matrix",
            "train.txt",
            "--out-labels",
            "labels.txt",
            "--test-per-class",
            test,
            "--out-test",
            "test.txt",
            "--out-test-truth",
            "truth.txt",
        ],
        dir,
    )?;
    gapnn(
        &[
            "analyze",
            "--matrix",
            "train.txt",
            "--labels",
            "labels.txt",
            "--out",
            "report.txt",
        ],
        dir,
    )?;
    gapnn(
        &[
            "fit",
            "--matrix",
            "train.txt",
            "--labels",
            "labels.txt",
            "--model",
            "model.txt",
        ],
        dir,
    )?;
    for mode in ["rules", "nn", "smooth"] {
        let out = format!("pred_{mode}.txt");
        gapnn(
            &[
                "predict",
                "--model",
                "model.txt",
                "--matrix",
                "test.txt",
                "--mode",
                mode,
                "--truth",
                "truth.txt",
                "--out",
                &out,
            ],
            dir,
        )?;
    }
    Ok(())
}

const ARTIFACTS: [&str; 9] = [
    "train.txt",
    "labels.txt",
    "test.txt",
    "truth.txt",
    "report.txt",
    "model.txt",
    "pred_rules.txt",
    "pred_nn.txt",
    "pred_smooth.txt",
];

fn criterion_8() -> Verdict {
    let mut compared = 0;
    for (family, per_class, seed, test) in
        [("box", "100", "42", "300"), ("shapes", "50", "7", "200")]
    {
        let first = tempfile::tempdir().map_err(|e| e.to_string())?;
        let second = tempfile::tempdir().map_err(|e| e.to_string())?;
        cli_run(first.path(), family, per_class, seed, test)?;
        cli_run(second.path(), family, per_class, seed, test)?;
        for name in ARTIFACTS {
            let a = std::fs::read(first.path().join(name)).map_err(|e| e.to_string())?;
            let b = std::fs::read(second.path().join(name)).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("{family}: {name} differs between runs"));
            }
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} files byte-identical across reruns (box and shapes)"
    ))
}

// Not a numbered criterion: squared Euclidean on the box family is a
// non-metric measure; the pipeline should still make no errors.
fn supplement_non_metric() -> Verdict {
    let spec = FamilySpec::new(Family::Box, 200, 11);
    let params = |objs: &[SyntheticObject]| -> Vec<Vec<f64>> {
        objs.iter().map(|o| o.params.clone()).collect()
    };
    let train = params(&spec.train_objects().unwrap());
    let test_objs = spec.test_objects(500).unwrap();
    let test = params(&test_objs);
    let sq = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let n = train.len();
    let tv: Vec<f64> = train
        .iter()
        .flat_map(|x| train.iter().map(|y| sq(x, y)))
        .collect();
    let labels: Vec<&str> = (0..n).map(|i| if i < n / 2 { "A" } else { "B" }).collect();
    let d = LabeledDataset::new(DissimilarityMatrix::square(n, tv).unwrap(), &labels).unwrap();
    let cross: Vec<f64> = test
        .iter()
        .flat_map(|x| train.iter().map(|y| sq(x, y)))
        .collect();
    let t = DissimilarityMatrix::new(test.len(), n, cross).unwrap();
    let violations = metricity_report(d.matrix())
        .unwrap()
        .triangle_violation_count;
    let model = fit(&d, None, None).unwrap();
    let decisions = predict_batch(&model, &t, Mode::Rules).unwrap();
    let wrong = decisions
        .iter()
        .zip(&test_objs)
        .filter(|(dec, o)| match dec.outcome {
            Outcome::ClassA => o.true_label != model.label_a(),
            Outcome::ClassB => o.true_label != model.label_b(),
            _ => false,
        })
        .count();
    let msg = format!(
        "squared-Euclidean box family: triangle_violation_count {violations}, errors {wrong}"
    );
    if violations > 0 && wrong == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let criteria: [(&str, &str, fn() -> Verdict); 9] = [
        ("1", "zero-error end-to-end (box)", criterion_1),
        ("2", "smooth/nn equivalence", criterion_2),
        ("3", "dominance inequality grid", criterion_3),
        ("4", "cover validity", criterion_4),
        (
            "5",
            "no cross-class pair inside NB at eps = delta_hat",
            criterion_5,
        ),
        ("6", "non-metric zero-error (shapes)", criterion_6),
        ("7", "smooth score Lipschitz bound", criterion_7),
        ("8", "determinism of CLI artifacts", criterion_8),
        (
            "s",
            "supplement: zero error under a non-metric measure",
            supplement_non_metric,
        ),
    ];
    let mut failed = Vec::new();
    for (id, name, run) in criteria {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("[PASS] criterion {id}: {name} -- {detail}"),
            Err(detail) => {
                println!("[FAIL] criterion {id}: {name} -- {detail}");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {}", failed.join(", "));
        std::process::exit(1);
    }
}
