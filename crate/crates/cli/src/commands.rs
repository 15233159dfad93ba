use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use gapnn::format::{
    emit_labels, emit_matrix, emit_model, emit_separability_report, parse_labels, parse_matrix,
    parse_model, RunReport,
};
use gapnn::synthetic::{build_dissimilarity, cross_dissimilarity, FamilySpec};
use gapnn::verify::{run_suite, SuiteConfig};
use gapnn::{analyze as analyze_dataset, estimate_gap, predict_batch, validate_matrix};
use gapnn::{DissimilarityMatrix, LabeledDataset};

use crate::{AnalyzeArgs, FitArgs, GenerateArgs, PredictArgs, VerifyArgs};

const MAX_LISTED_VIOLATIONS: usize = 20;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn read_matrix(path: &Path) -> Result<DissimilarityMatrix> {
    parse_matrix(&read(path)?).with_context(|| path.display().to_string())
}

fn read_labels(path: &Path) -> Result<Vec<String>> {
    parse_labels(&read(path)?).with_context(|| path.display().to_string())
}

fn ensure_valid(m: &DissimilarityMatrix, path: &Path) -> Result<()> {
    let violations = validate_matrix(m);
    if violations.is_empty() {
        return Ok(());
    }
    let mut msg = format!("{}: {} violation(s)", path.display(), violations.len());
    for v in violations.iter().take(MAX_LISTED_VIOLATIONS) {
        msg.push_str("\n  ");
        msg.push_str(&v.to_string());
    }
    bail!(msg)
}

fn load_training(matrix: &Path, labels: &Path) -> Result<LabeledDataset> {
    let m = read_matrix(matrix)?
        .into_training()
        .with_context(|| matrix.display().to_string())?;
    ensure_valid(&m, matrix)?;
    let labels = read_labels(labels)?;
    Ok(LabeledDataset::new(m, &labels)?)
}

pub fn analyze(args: &AnalyzeArgs) -> Result<ExitCode> {
    let d = load_training(&args.matrix, &args.labels)?;
    let text = emit_separability_report(&analyze_dataset(&d)?);
    match &args.out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn fit(args: &FitArgs) -> Result<ExitCode> {
    let d = load_training(&args.matrix, &args.labels)?;
    let eps = match (args.epsilon, args.epsilon_frac) {
        (Some(e), _) => Some(e),
        (None, Some(frac)) => Some(frac * estimate_gap(&d)?),
        (None, None) => None,
    };
    let model = gapnn::fit(&d, eps, args.s)?;
    write(&args.model, &emit_model(&model))?;
    Ok(ExitCode::SUCCESS)
}

pub fn predict(args: &PredictArgs) -> Result<ExitCode> {
    let model =
        parse_model(&read(&args.model)?).with_context(|| args.model.display().to_string())?;
    let test = read_matrix(&args.matrix)?;
    let decisions = predict_batch(&model, &test, args.mode)
        .with_context(|| args.matrix.display().to_string())?;
    let truth = args.truth.as_deref().map(read_labels).transpose()?;
    let report = RunReport::new(&model, args.mode, decisions, truth)?;
    write(&args.out, &report.emit())?;
    Ok(ExitCode::SUCCESS)
}

pub fn generate(args: &GenerateArgs) -> Result<ExitCode> {
    let mut spec = FamilySpec::new(args.family, args.per_class, args.seed);
    if let Some(m) = args.measure {
        spec = spec.with_measure(m);
    }
    let train = spec.train_objects()?;
    let d = build_dissimilarity(&train, spec.measure)?;
    write(&args.out_matrix, &emit_matrix(d.matrix()))?;
    write(&args.out_labels, &emit_labels(d.labels()))?;

    if let (Some(n), Some(out_test), Some(out_truth)) =
        (args.test_per_class, &args.out_test, &args.out_test_truth)
    {
        let test = spec.test_objects(n)?;
        let m = cross_dissimilarity(&train, &test, spec.measure)?;
        let truth: Vec<&str> = test.iter().map(|o| o.true_label.as_str()).collect();
        write(out_test, &emit_matrix(&m))?;
        write(out_truth, &emit_labels(&truth))?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn verify(args: &VerifyArgs) -> Result<ExitCode> {
    let mut config = SuiteConfig::for_family(args.family, args.seed);
    if let Some(n) = args.per_class {
        config.per_class = n;
    }
    if let Some(n) = args.test_per_class {
        config.test_per_class = n;
    }
    let results = run_suite(&config)?;
    for r in &results {
        println!(
            "{} {} {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
    }
    match results.iter().find(|r| !r.passed) {
        None => Ok(ExitCode::SUCCESS),
        Some(r) => {
            eprintln!("first violated property: {} ({})", r.name, r.detail);
            Ok(ExitCode::FAILURE)
        }
    }
}
