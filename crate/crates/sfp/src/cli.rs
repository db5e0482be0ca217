//! The `sfp` command-line interface.
//!
//! Every randomized command requires `--seed` and is fully deterministic
//! given its flags. A JSON config file (`--config`) may supply any flag by
//! its long name; values given on the command line win.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use sfp_core::eval::{
    cv_fold_plan, default_grid, min_training_size, reparam, CvOptions, MetricReport,
    ReparamPoint, SelectionStrategy,
};
use sfp_core::gme;
use sfp_core::infer::{predict, select_features};
use sfp_core::loss::LossKind;
use sfp_core::model::objective;
use sfp_core::synth::{gen_synthetic, SyntheticKind};
use sfp_core::table::{
    fit_preprocess, transform_features, ColumnStats, ColumnType, PreprocessStats,
};
use sfp_core::train::{fit, FitConfig};
use sfp_core::{Hyperparams, Mat};

use crate::csv_io;
use crate::error::CliError;
use crate::model_file::{load_model, save_model, SavedModel};
use crate::parallel::{parallel_map, resolve_threads};
use crate::tune::tune;

#[derive(Parser)]
#[command(name = "sfp", version, about = "Supervised fuzzy partitioning")]
pub struct Cli {
    /// JSON file supplying default values for any long flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset CSV.
    Gen(GenArgs),
    /// Train a model on a labeled CSV and write the model JSON.
    Train(TrainArgs),
    /// Batch-predict a CSV with a trained model.
    Predict(PredictArgs),
    /// Cross-validate one hyperparameter setting.
    Cv(CvArgs),
    /// Grid-search hyperparameters with nested cross-validation.
    Tune(TuneArgs),
    /// Report the per-cluster feature selections of a model.
    SelectFeatures(SelectFeaturesArgs),
    /// Certify the EM/BCD equivalence on a random instance.
    GmeCheck(GmeCheckArgs),
    /// Export a dense 2-D decision grid for region plots.
    DecisionGrid(DecisionGridArgs),
}

fn parse_loss(name: &str) -> Result<LossKind, CliError> {
    match name {
        "logloss" => Ok(LossKind::Logloss),
        "logistic" => Ok(LossKind::Logistic),
        "squared-error" | "squared_error" => Ok(LossKind::SquaredError),
        other => Err(CliError::usage(format!(
            "unknown loss '{other}' (expected logloss, logistic, squared-error)"
        ))),
    }
}

/// Fills missing (null/false) fields of a parsed argument struct from a JSON
/// config object; command-line values always win.
fn overlay_config<T: Serialize + DeserializeOwned>(
    args: T,
    config: Option<&Path>,
) -> Result<T, CliError> {
    let Some(path) = config else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let cfg: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let cfg = cfg
        .as_object()
        .ok_or_else(|| CliError::data("config file must hold a JSON object"))?;
    let mut merged = serde_json::to_value(&args)?;
    let fields = merged
        .as_object_mut()
        .expect("argument structs serialize to objects");
    for (key, value) in cfg {
        let absent = matches!(
            fields.get(key.as_str()),
            None | Some(serde_json::Value::Null) | Some(serde_json::Value::Bool(false))
        );
        if absent {
            fields.insert(key.clone(), value.clone());
        }
    }
    Ok(serde_json::from_value(merged)?)
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::usage(format!("missing required flag --{flag}")))
}

/// Shared raw/primed hyperparameter flags.
#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(rename_all = "kebab-case")]
struct HyperFlags {
    /// Cluster count.
    #[arg(long)]
    k: Option<usize>,
    /// Label-contribution strength (raw form).
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Membership-entropy coefficient (raw form).
    #[arg(long)]
    gamma: Option<f64>,
    /// Weight-entropy coefficient (raw form).
    #[arg(long)]
    lambda: Option<f64>,
    /// Primed alpha in (0, 1]; primed flags win over raw ones.
    #[arg(long)]
    alpha_prime: Option<f64>,
    /// Primed gamma in (0, 1).
    #[arg(long)]
    gamma_prime: Option<f64>,
    /// Primed lambda in (0, 1).
    #[arg(long)]
    lambda_prime: Option<f64>,
}

impl HyperFlags {
    fn resolve(&self) -> Result<Hyperparams, CliError> {
        let k = require(self.k, "k")?;
        let primed = [self.alpha_prime, self.gamma_prime, self.lambda_prime];
        if primed.iter().any(Option::is_some) {
            if [self.alpha, self.gamma, self.lambda].iter().any(Option::is_some) {
                eprintln!(
                    "warning: both raw and primed hyperparameters given; primed values win"
                );
            }
            let point = ReparamPoint {
                k,
                alpha_prime: require(self.alpha_prime, "alpha-prime")?,
                gamma_prime: require(self.gamma_prime, "gamma-prime")?,
                lambda_prime: require(self.lambda_prime, "lambda-prime")?,
            };
            return reparam(&point).map_err(|e| CliError::usage(e.to_string()));
        }
        Hyperparams::new(
            k,
            require(self.alpha, "alpha")?,
            require(self.gamma, "gamma")?,
            require(self.lambda, "lambda")?,
        )
        .map_err(|e| CliError::usage(e.to_string()))
    }
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct GenArgs {
    /// One of spiral, two_circle, xor, mixture3.
    #[arg(long)]
    kind: Option<String>,
    /// Number of points.
    #[arg(long)]
    n: Option<usize>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct TrainArgs {
    /// Training CSV.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Label column name.
    #[arg(long)]
    label: Option<String>,
    /// Loss function: logloss, logistic, squared-error.
    #[arg(long, default_value = "logloss")]
    loss: String,
    #[command(flatten)]
    #[serde(flatten)]
    hyper: HyperFlags,
    /// RNG seed for initialization.
    #[arg(long)]
    seed: Option<u64>,
    /// Output model JSON path.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Iteration cap.
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    /// Center-displacement stopping tolerance.
    #[arg(long, default_value_t = 1e-6)]
    center_tol: f64,
    /// Skip imputation/encoding/standardization and train on the raw
    /// numeric columns.
    #[arg(long)]
    no_standardize: bool,
    /// Comma-separated columns to force categorical.
    #[arg(long)]
    categorical: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct PredictArgs {
    /// Model JSON from `train`.
    #[arg(long)]
    model: Option<PathBuf>,
    /// CSV of points to predict (the label column may be absent).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct CvArgs {
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    label: Option<String>,
    #[arg(long, default_value = "logloss")]
    loss: String,
    #[command(flatten)]
    #[serde(flatten)]
    hyper: HyperFlags,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 25)]
    max_iters: usize,
    /// Center-displacement stopping tolerance per fit.
    #[arg(long, default_value_t = 1e-6)]
    center_tol: f64,
    /// Worker threads (default: SFP_THREADS or all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Optional per-fold scores CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated columns to force categorical.
    #[arg(long)]
    categorical: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct TuneArgs {
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    label: Option<String>,
    #[arg(long, default_value = "logloss")]
    loss: String,
    /// Search space: reduced (250 points) or full (5000 points).
    #[arg(long, default_value = "reduced")]
    grid: String,
    /// Selection strategy: 1 raw argmax, 2 top-quantile mean, 3 smoothed
    /// argmax.
    #[arg(long, default_value_t = 3)]
    strategy: u8,
    /// Top percentage for strategy 2.
    #[arg(long, default_value_t = 20.0)]
    q_percent: f64,
    /// LOESS span for strategy 3.
    #[arg(long, default_value_t = 0.75)]
    span: f64,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 10)]
    max_iters: usize,
    /// Center-displacement stopping tolerance per tuning fit. Ranking the
    /// grid needs far less precision than a final fit.
    #[arg(long, default_value_t = 1e-3)]
    center_tol: f64,
    /// Worker threads (default: SFP_THREADS or all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Tuning report CSV (one row per grid point).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated columns to force categorical.
    #[arg(long)]
    categorical: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct SelectFeaturesArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    /// Weight-mass threshold in (0, 1].
    #[arg(long, default_value_t = 0.9)]
    threshold: f64,
    /// Optional JSON output path (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct GmeCheckArgs {
    #[arg(long, default_value_t = 30)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    p: usize,
    #[arg(long, default_value_t = 2)]
    classes: usize,
    #[arg(long, default_value_t = 10)]
    iters: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Optional JSON output path (the report always prints to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct DecisionGridArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cells per axis.
    #[arg(long, default_value_t = 200)]
    resolution: usize,
    #[arg(long, allow_negative_numbers = true)]
    x_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    y_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    y_max: Option<f64>,
}

/// Parses argv and runs the selected command.
pub fn run<I, T>(argv: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::parse_from(argv);
    let config = cli.config.as_deref();
    match cli.command {
        Command::Gen(args) => run_gen(overlay_config(args, config)?),
        Command::Train(args) => run_train(overlay_config(args, config)?),
        Command::Predict(args) => run_predict(overlay_config(args, config)?),
        Command::Cv(args) => run_cv(overlay_config(args, config)?),
        Command::Tune(args) => run_tune(overlay_config(args, config)?),
        Command::SelectFeatures(args) => run_select_features(overlay_config(args, config)?),
        Command::GmeCheck(args) => run_gme_check(overlay_config(args, config)?),
        Command::DecisionGrid(args) => run_decision_grid(overlay_config(args, config)?),
    }
}

fn hints_from_flag(categorical: Option<&str>) -> Vec<(String, ColumnType)> {
    categorical
        .map(|list| {
            list.split(',')
                .filter(|s| !s.is_empty())
                .map(|name| (name.trim().to_string(), ColumnType::Categorical))
                .collect()
        })
        .unwrap_or_default()
}

fn run_gen(args: GenArgs) -> Result<(), CliError> {
    let kind = require(args.kind, "kind")?;
    let kind = SyntheticKind::from_str(&kind).map_err(|e| CliError::usage(e.to_string()))?;
    let n = require(args.n, "n")?;
    let seed = require(args.seed, "seed")?;
    let out = require(args.out, "out")?;
    let data = gen_synthetic(kind, n, seed)?;
    csv_io::write_dataset_csv(&out, &data, "y")?;
    println!("wrote {} rows to {}", data.len(), out.display());
    Ok(())
}

fn run_train(args: TrainArgs) -> Result<(), CliError> {
    let data_path = require(args.data, "data")?;
    let label = require(args.label, "label")?;
    let loss = parse_loss(&args.loss)?;
    let hyper = args.hyper.resolve()?;
    let seed = require(args.seed, "seed")?;
    let model_path = require(args.model, "model")?;
    if !(args.center_tol > 0.0) || args.max_iters == 0 {
        return Err(CliError::usage("need --center-tol > 0 and --max-iters >= 1"));
    }

    let hints = hints_from_flag(args.categorical.as_deref());
    let table = csv_io::load_csv(&data_path, Some(&label), &hints)?;
    let (dataset, stats) = if args.no_standardize {
        (table.to_dataset_raw(loss != LossKind::SquaredError)?, None)
    } else {
        let (ds, stats) = fit_preprocess(&table, loss)?;
        for dropped in stats.dropped() {
            eprintln!("warning: dropped constant column {dropped}");
        }
        (ds, Some(stats))
    };

    let config = FitConfig {
        max_iters: args.max_iters,
        center_tol: args.center_tol,
        seed,
        record_trace: false,
    };
    let result = fit(&dataset, &hyper, loss, &config)?;
    let final_objective = objective(&dataset, &result.memberships, &result.params, &hyper)?;
    let saved = SavedModel {
        params: result.params,
        hyper,
        class_count: dataset.class_count(),
        stats,
        label_column: Some(label),
    };
    save_model(&model_path, &saved)?;
    println!(
        "trained k={} on {} rows: {} in {} iterations, objective {final_objective:.6}; model written to {}",
        hyper.k,
        dataset.len(),
        if result.converged { "converged" } else { "iteration cap reached" },
        result.iterations,
        model_path.display()
    );
    Ok(())
}

/// Hints reconstructing each training column's type from the stored stats.
fn hints_from_stats(stats: &PreprocessStats) -> Vec<(String, ColumnType)> {
    stats
        .feature_names
        .iter()
        .zip(&stats.columns)
        .map(|(name, col)| {
            let ty = match col {
                ColumnStats::Numeric { .. } => ColumnType::Numeric,
                ColumnStats::Categorical { .. } => ColumnType::Categorical,
            };
            (name.clone(), ty)
        })
        .collect()
}

fn decode_label(value: f64, stats: Option<&PreprocessStats>) -> String {
    match stats {
        Some(s) => s.label.decode(value),
        None => value.to_string(),
    }
}

fn run_predict(args: PredictArgs) -> Result<(), CliError> {
    let model_path = require(args.model, "model")?;
    let data_path = require(args.data, "data")?;
    let out = require(args.out, "out")?;
    let model = load_model(&model_path)?;

    // The label column is excluded from the features when present.
    let label = match &model.label_column {
        Some(name) if csv_io::header_contains(&data_path, name)? => Some(name.as_str()),
        _ => None,
    };
    let features: Mat = match &model.stats {
        Some(stats) => {
            let table = csv_io::load_csv(&data_path, label, &hints_from_stats(stats))?;
            transform_features(&table, stats)?
        }
        None => {
            let table = csv_io::load_csv(&data_path, label, &[])?;
            table.to_feature_matrix()?
        }
    };

    let mut rows = Vec::with_capacity(features.rows());
    for i in 0..features.rows() {
        let pred = predict(features.row(i), &model.params, &model.hyper)?;
        rows.push(csv_io::PredictionRow {
            id: i + 1,
            label: decode_label(pred.label, model.stats.as_ref()),
            class_scores: pred.class_scores.unwrap_or_default(),
            memberships: pred.memberships.into_vec(),
        });
    }
    csv_io::write_predictions_csv(&out, &rows)?;
    println!("wrote {} predictions to {}", rows.len(), out.display());
    Ok(())
}

fn print_report(report: &MetricReport) {
    println!(
        "accuracy: {:.4} ± {:.4}",
        report.accuracy.mean, report.accuracy.std
    );
    for (name, summary) in [
        ("sensitivity", &report.sensitivity),
        ("specificity", &report.specificity),
        ("auc", &report.auc),
    ] {
        if let Some(s) = summary {
            println!("{name}: {:.4} ± {:.4}", s.mean, s.std);
        }
    }
}

fn run_cv(args: CvArgs) -> Result<(), CliError> {
    let data_path = require(args.data, "data")?;
    let label = require(args.label, "label")?;
    let loss = parse_loss(&args.loss)?;
    let hyper = args.hyper.resolve()?;
    let seed = require(args.seed, "seed")?;
    let table = csv_io::load_csv(
        &data_path,
        Some(&label),
        &hints_from_flag(args.categorical.as_deref()),
    )?;
    let opts = CvOptions {
        folds: args.folds,
        repeats: args.repeats,
        seed,
        max_iters: args.max_iters,
        center_tol: args.center_tol,
    };
    let threads = resolve_threads(args.threads);
    let plan = cv_fold_plan(&table, &opts)?;
    let scores = parallel_map(&plan, threads, |unit| {
        sfp_core::eval::run_cv_fold(&table, unit, &hyper, loss, &opts)
    });
    let mut per_fold = Vec::with_capacity(scores.len());
    for s in scores {
        per_fold.push(s?);
    }
    let report = MetricReport::from_folds(per_fold)?;
    print_report(&report);
    if let Some(out) = args.out {
        csv_io::write_fold_scores_csv(&out, &report)?;
        println!("per-fold scores written to {}", out.display());
    }
    Ok(())
}

fn run_tune(args: TuneArgs) -> Result<(), CliError> {
    let data_path = require(args.data, "data")?;
    let label = require(args.label, "label")?;
    let loss = parse_loss(&args.loss)?;
    let seed = require(args.seed, "seed")?;
    let include_full = match args.grid.as_str() {
        "reduced" => false,
        "full" => true,
        other => {
            return Err(CliError::usage(format!(
                "unknown grid '{other}' (expected reduced or full)"
            )))
        }
    };
    let strategy = match args.strategy {
        1 => SelectionStrategy::RawArgmax,
        2 => SelectionStrategy::TopQuantileMean {
            q_percent: args.q_percent,
        },
        3 => SelectionStrategy::LoessArgmax { span: args.span },
        other => {
            return Err(CliError::usage(format!(
                "unknown strategy {other} (expected 1, 2, or 3)"
            )))
        }
    };
    let table = csv_io::load_csv(
        &data_path,
        Some(&label),
        &hints_from_flag(args.categorical.as_deref()),
    )?;
    let class_count = {
        let mut levels: Vec<&String> = table.labels().unwrap().iter().collect();
        levels.sort();
        levels.dedup();
        levels.len()
    };
    let opts = CvOptions {
        folds: args.folds,
        repeats: args.repeats,
        seed,
        max_iters: args.max_iters,
        center_tol: args.center_tol,
    };
    let n_train = min_training_size(&table, &opts)?;
    let grid = default_grid(n_train, class_count, include_full)?;
    let threads = resolve_threads(args.threads);
    eprintln!(
        "tuning over {} grid points ({} threads, {} folds x {} repeats)",
        grid.len(),
        threads,
        opts.folds,
        opts.repeats
    );
    let outcome = tune(&table, &grid, loss, &opts, strategy, threads)?;
    let best = outcome.best_point;
    println!(
        "best point: k={} alpha'={} gamma'={} lambda'={}",
        best.k, best.alpha_prime, best.gamma_prime, best.lambda_prime
    );
    println!(
        "hyperparameters: k={} alpha={:.6} gamma={:.6} lambda={:.6}",
        outcome.best.k, outcome.best.alpha, outcome.best.gamma, outcome.best.lambda
    );
    if let Some(out) = args.out {
        csv_io::write_tuning_report_csv(&out, &outcome.rows)?;
        println!("tuning report written to {}", out.display());
    }
    Ok(())
}

fn run_select_features(args: SelectFeaturesArgs) -> Result<(), CliError> {
    let model_path = require(args.model, "model")?;
    let model = load_model(&model_path)?;
    let selection = select_features(&model.params, args.threshold)?;
    let feature_names = model
        .stats
        .as_ref()
        .map(PreprocessStats::output_names)
        .unwrap_or_else(|| {
            (1..=model.params.feature_count())
                .map(|i| format!("x{i}"))
                .collect()
        });
    let report = serde_json::json!({
        "threshold": selection.mass_threshold,
        "per_cluster": selection.per_cluster,
        "union": selection.union,
        "feature_names": feature_names,
        "selected_names": selection
            .union
            .iter()
            .map(|&l| feature_names[l].clone())
            .collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&report)?;
    match args.out {
        Some(path) => {
            std::fs::write(&path, text + "\n")?;
            println!("feature selection written to {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct GmeReportFile<'a> {
    #[serde(rename = "max_U_gap")]
    max_u_gap: f64,
    max_param_gap: f64,
    posterior_solver_gap: f64,
    sfp_objective_gap: f64,
    loglik_trace: &'a [f64],
    #[serde(rename = "J_trace")]
    j_trace: &'a [f64],
}

fn run_gme_check(args: GmeCheckArgs) -> Result<(), CliError> {
    let seed = require(args.seed, "seed")?;
    let (data, init) = gme::gen_instance(args.n, args.k, args.p, args.classes, seed)?;
    let report = gme::certify_equivalence(&data, &init, args.iters)?;
    let file = GmeReportFile {
        max_u_gap: report.max_u_gap,
        max_param_gap: report.max_param_gap,
        posterior_solver_gap: report.posterior_solver_gap,
        sfp_objective_gap: report.sfp_objective_gap,
        loglik_trace: &report.loglik_trace,
        j_trace: &report.j_trace,
    };
    let text = serde_json::to_string_pretty(&file)?;
    println!("{text}");
    if let Some(path) = args.out {
        std::fs::write(&path, text + "\n")?;
    }
    Ok(())
}

fn run_decision_grid(args: DecisionGridArgs) -> Result<(), CliError> {
    let model_path = require(args.model, "model")?;
    let out = require(args.out, "out")?;
    if args.resolution < 2 {
        return Err(CliError::usage("--resolution must be at least 2"));
    }
    let model = load_model(&model_path)?;

    // Raw-space axes: the model must stem from exactly two numeric columns.
    let numeric_stats: Option<Vec<(f64, f64)>> = match &model.stats {
        Some(stats) => {
            let mut axes = Vec::new();
            for col in &stats.columns {
                match col {
                    ColumnStats::Numeric {
                        mean,
                        std,
                        keep: true,
                        ..
                    } => axes.push((*mean, *std)),
                    ColumnStats::Numeric { keep: false, .. } => {}
                    ColumnStats::Categorical { .. } => {
                        return Err(CliError::data(
                            "decision-grid needs a model trained on numeric columns",
                        ))
                    }
                }
            }
            Some(axes)
        }
        None => None,
    };
    let p = numeric_stats
        .as_ref()
        .map_or(model.params.feature_count(), Vec::len);
    if p != 2 {
        return Err(CliError::data(format!(
            "decision-grid needs a 2-feature model, this one has {p}"
        )));
    }

    // Default bounds: the centers mapped back to raw coordinates, padded.
    let to_raw = |j: usize, axis: usize| -> f64 {
        let v = model.params.centers.get(j, axis);
        match &numeric_stats {
            Some(axes) => v * axes[axis].1 + axes[axis].0,
            None => v,
        }
    };
    let mut bounds = [[f64::INFINITY, f64::NEG_INFINITY]; 2];
    for j in 0..model.params.cluster_count() {
        for (axis, b) in bounds.iter_mut().enumerate() {
            let v = to_raw(j, axis);
            b[0] = b[0].min(v);
            b[1] = b[1].max(v);
        }
    }
    let pad = |b: [f64; 2]| {
        let span = (b[1] - b[0]).max(1e-6);
        [b[0] - 0.3 * span, b[1] + 0.3 * span]
    };
    let xb = [
        args.x_min.unwrap_or_else(|| pad(bounds[0])[0]),
        args.x_max.unwrap_or_else(|| pad(bounds[0])[1]),
    ];
    let yb = [
        args.y_min.unwrap_or_else(|| pad(bounds[1])[0]),
        args.y_max.unwrap_or_else(|| pad(bounds[1])[1]),
    ];
    if !(xb[0] < xb[1]) || !(yb[0] < yb[1]) {
        return Err(CliError::usage("grid bounds must satisfy min < max"));
    }

    let res = args.resolution;
    let mut rows = Vec::with_capacity(res * res);
    for iy in 0..res {
        let y = yb[0] + (yb[1] - yb[0]) * iy as f64 / (res - 1) as f64;
        for ix in 0..res {
            let x = xb[0] + (xb[1] - xb[0]) * ix as f64 / (res - 1) as f64;
            let point = match &numeric_stats {
                Some(axes) => vec![
                    (x - axes[0].0) / axes[0].1,
                    (y - axes[1].0) / axes[1].1,
                ],
                None => vec![x, y],
            };
            let pred = predict(&point, &model.params, &model.hyper)?;
            rows.push((x, y, decode_label(pred.label, model.stats.as_ref())));
        }
    }
    csv_io::write_decision_grid_csv(&out, &rows)?;
    println!("wrote {}x{res} decision grid to {}", res, out.display());
    Ok(())
}
