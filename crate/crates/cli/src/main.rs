use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use gapnn::synthetic::{Family, Measure};
use gapnn::Mode;

mod commands;

/// Zero-error classification from pairwise dissimilarities.
#[derive(Debug, Parser)]
#[command(name = "gapnn", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the class gap, per-class connectivity and metricity.
    Analyze(AnalyzeArgs),
    /// Build prototype covers and write a model file.
    Fit(FitArgs),
    /// Classify a test x train matrix with a fitted model.
    Predict(PredictArgs),
    /// Write a synthetic training set (and optionally a test set).
    Generate(GenerateArgs),
    /// Run the property suite on a synthetic family.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("radius").args(["epsilon", "epsilon_frac"])))]
pub struct FitArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// Cover radius; must be below the estimated class gap.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Cover radius as a fraction of the estimated class gap.
    #[arg(long)]
    pub epsilon_frac: Option<f64>,
    /// Smoothing scale for smooth-mode prediction.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Test x train dissimilarities.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, default_value = "rules")]
    pub mode: Mode,
    /// Ground-truth labels, one per test row.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub per_class: usize,
    #[arg(long)]
    pub seed: u64,
    /// Override the family's default measure.
    #[arg(long)]
    pub measure: Option<Measure>,
    #[arg(long)]
    pub out_matrix: PathBuf,
    #[arg(long)]
    pub out_labels: PathBuf,
    #[arg(long, requires_all = ["out_test", "out_test_truth"])]
    pub test_per_class: Option<usize>,
    #[arg(long, requires = "test_per_class")]
    pub out_test: Option<PathBuf>,
    #[arg(long, requires = "test_per_class")]
    pub out_test_truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub seed: u64,
    /// Training objects per class (default: 500 for box, 50 for shapes).
    #[arg(long)]
    pub per_class: Option<usize>,
    /// Test objects per class (default: 2000 for box, 200 for shapes).
    #[arg(long)]
    pub test_per_class: Option<usize>,
}

fn configure_threads() {
    if let Some(n) = std::env::var("GAPNN_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match cli.command {
        Command::Analyze(a) => commands::analyze(&a),
        Command::Fit(a) => commands::fit(&a),
        Command::Predict(a) => commands::predict(&a),
        Command::Generate(a) => commands::generate(&a),
        Command::Verify(a) => commands::verify(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
