//! Command-line front end. Every subcommand writes its outputs plus a
//! `run_info.txt` (key=value lines) into `--out-dir`.
//!
//! Exit codes: 0 success, 2 input or IO error, 3 empty result, 4 invalid
//! configuration.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::classify::model_io::{parse_forest, serialize_forest};
use crate::classify::{
    evaluate, random_grid_search, train_forest, ClassifyError, ForestParams, HyperparamGrid, LogisticParams, ModelSpec,
    TreeParams,
};
use crate::dataset::LabeledFeatureSet;
use crate::experiment::{builtin_profiles, extract_capture, simulate_capture};
use crate::explain::{explain_instance, ExplainConfig, FeatureStats};
use crate::features::{FEATURE_COUNT, FEATURE_NAMES};
use crate::io::{csv_text, fmt_f64, read_features_csv, write_atomic, write_features_csv};
use crate::rng::derive_seed;
use crate::signal::iq::{encode_iq, read_etalon, read_iq};
use crate::signal::{transnoise_etalon, SyncConfig, DEFAULT_FRAME_LEN};
use crate::stats::{histogram, pearson_matrix, significance_report};

#[derive(Debug, Parser)]
#[command(name = "caponef", version, about = "Transmitter fingerprinting from error-signal phase")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate device captures of the trans-noise etalon.
    GenDataset(GenDatasetArgs),
    /// Synchronise captures and extract P1..P10 per frame.
    Extract(ExtractArgs),
    /// Point-biserial significance, correlation matrix and histograms.
    Stats(StatsArgs),
    /// Cross-validate classifiers and save a random forest.
    TrainEval(TrainEvalArgs),
    /// Explain one prediction of a saved forest.
    Explain(ExplainArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Omit the timestamp from run_info.txt.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Args)]
pub struct GenDatasetArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of built-in device profiles to simulate.
    #[arg(long, default_value_t = 2)]
    pub devices: usize,
    /// Frames per device.
    #[arg(long, default_value_t = 15000)]
    pub frames: usize,
    #[arg(long, default_value_t = DEFAULT_FRAME_LEN)]
    pub frame_len: usize,
    /// Channel SNR in dB; omit the noise with `--no-noise`.
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    pub snr_db: f64,
    #[arg(long)]
    pub no_noise: bool,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Dataset directory (with devices.csv) or a single IQ file.
    #[arg(long)]
    pub input: PathBuf,
    /// Etalon IQ file; defaults to etalon.iq next to the input.
    #[arg(long)]
    pub etalon: Option<PathBuf>,
    /// Label for a single-file input.
    #[arg(long)]
    pub label: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_FRAME_LEN)]
    pub frame_len: usize,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Feature CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
    /// Feature subset such as `2,8,9`.
    #[arg(long)]
    pub features: Option<String>,
}

#[derive(Debug, Args)]
pub struct TrainEvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Feature CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub folds: usize,
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub min_samples_split: Option<usize>,
    /// Features tried per split; defaults to ceil(sqrt(F)).
    #[arg(long)]
    pub features_per_split: Option<usize>,
    /// Feature subset such as `2,8,9`.
    #[arg(long)]
    pub features: Option<String>,
    /// Comma-separated subset of forest,tree,knn,logistic,majority.
    #[arg(long, default_value = "forest,tree,knn,logistic,majority")]
    pub classifiers: String,
    #[arg(long, default_value_t = 5)]
    pub knn_k: usize,
    /// Run a random hyperparameter search for the forest first.
    #[arg(long)]
    pub search: bool,
    /// Grid points sampled by the search.
    #[arg(long, default_value_t = 40)]
    pub iterations: usize,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Model file written by train-eval.
    #[arg(long)]
    pub model: PathBuf,
    /// Feature CSV providing the instance and the perturbation spread.
    #[arg(long)]
    pub input: PathBuf,
    /// Zero-based data row to explain.
    #[arg(long)]
    pub row: usize,
    #[arg(long, default_value_t = 5000)]
    pub perturbations: usize,
    #[arg(long)]
    pub kernel_width: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub ridge: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Empty(String),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Empty(_) => 3,
            CliError::Config(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::InvalidParameter(_) => CliError::Config(e.to_string()),
            ClassifyError::EmptyDataset => CliError::Empty(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Parses arguments, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(4) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::GenDataset(a) => gen_dataset(&a),
        Command::Extract(a) => extract(&a),
        Command::Stats(a) => stats(&a),
        Command::TrainEval(a) => train_eval(&a),
        Command::Explain(a) => explain(&a),
    }
}

fn prepare_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))
}

fn write_out(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let p = dir.join(name);
    write_atomic(&p, bytes).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
}

fn write_run_info(common: &CommonArgs, command: &str, extra: &[(&str, String)]) -> Result<(), CliError> {
    let mut s = String::new();
    writeln!(s, "command={command}").unwrap();
    writeln!(s, "version={}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(s, "seed={}", common.seed).unwrap();
    for (k, v) in extra {
        writeln!(s, "{k}={v}").unwrap();
    }
    if !common.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        writeln!(s, "timestamp={secs}").unwrap();
    }
    write_out(&common.out_dir, "run_info.txt", s.as_bytes())
}

/// Parses a subset such as `2,8,9` or `P2,P8,P9` into column names.
pub fn parse_feature_mask(mask: &str) -> Result<Vec<String>, CliError> {
    let mut names = Vec::new();
    for part in mask.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let digits = part.strip_prefix(['P', 'p']).unwrap_or(part);
        let idx: usize = digits
            .parse()
            .map_err(|_| CliError::Config(format!("bad feature {part:?} in --features")))?;
        if !(1..=FEATURE_COUNT).contains(&idx) {
            return Err(CliError::Config(format!("feature {idx} outside 1..={FEATURE_COUNT}")));
        }
        let name = FEATURE_NAMES[idx - 1].to_string();
        if names.contains(&name) {
            return Err(CliError::Config(format!("feature {name} listed twice")));
        }
        names.push(name);
    }
    if names.is_empty() {
        return Err(CliError::Config("--features selects nothing".into()));
    }
    Ok(names)
}

fn load_features(path: &Path, mask: Option<&str>) -> Result<LabeledFeatureSet, CliError> {
    let set = read_features_csv(path)?;
    let set = match mask {
        Some(m) => set
            .select_by_name(&parse_feature_mask(m)?)
            .map_err(|e| CliError::Config(e.to_string()))?,
        None => set,
    };
    if set.is_empty() {
        return Err(CliError::Empty(format!("{} has no rows", path.display())));
    }
    Ok(set)
}

fn gen_dataset(a: &GenDatasetArgs) -> Result<(), CliError> {
    let profiles = builtin_profiles();
    if a.devices < 2 || a.devices > profiles.len() {
        return Err(CliError::Config(format!("--devices must lie in 2..={}", profiles.len())));
    }
    if a.frames == 0 {
        return Err(CliError::Config("--frames must be positive".into()));
    }
    if !a.snr_db.is_finite() {
        return Err(CliError::Config("--snr-db must be finite".into()));
    }
    let snr = (!a.no_noise).then_some(a.snr_db);
    let etalon = transnoise_etalon(0, a.frame_len).map_err(|e| CliError::Config(e.to_string()))?;
    prepare_out_dir(&a.common.out_dir)?;
    write_out(&a.common.out_dir, "etalon.iq", &encode_iq(etalon.samples()))?;

    let mut devices = Vec::new();
    let mut manifest = Vec::new();
    for (label, profile) in profiles.iter().take(a.devices).enumerate() {
        let file = format!("device_{label}.iq");
        let capture = simulate_capture(&etalon, profile, snr, a.frames, derive_seed(a.common.seed, label as u64))
            .map_err(|e| CliError::Config(e.to_string()))?;
        write_out(&a.common.out_dir, &file, &encode_iq(&capture.samples))?;
        for (i, g) in capture.gains.iter().enumerate() {
            manifest.push(vec![
                label.to_string(),
                file.clone(),
                i.to_string(),
                (capture.first_start + i * a.frame_len).to_string(),
                fmt_f64(g.re),
                fmt_f64(g.im),
            ]);
        }
        devices.push(vec![
            label.to_string(),
            file,
            a.frames.to_string(),
            capture.first_start.to_string(),
            fmt_f64(profile.gain_imbalance),
            fmt_f64(profile.quadrature_error),
            fmt_f64(profile.phase_noise_rms),
            fmt_f64(profile.cubic_nonlinearity),
            fmt_f64(profile.dc_offset.re),
            fmt_f64(profile.dc_offset.im),
            snr.map_or_else(|| "none".to_string(), fmt_f64),
        ]);
    }
    write_out(
        &a.common.out_dir,
        "devices.csv",
        &csv_text(
            &[
                "label",
                "file",
                "frames",
                "first_start",
                "gain_imbalance",
                "quadrature_error",
                "phase_noise_rms",
                "cubic_nonlinearity",
                "dc_offset_re",
                "dc_offset_im",
                "snr_db",
            ],
            devices,
        )?,
    )?;
    write_out(
        &a.common.out_dir,
        "manifest.csv",
        &csv_text(&["label", "file", "frame", "start", "channel_gain_re", "channel_gain_im"], manifest)?,
    )?;
    write_run_info(
        &a.common,
        "gen-dataset",
        &[
            ("devices", a.devices.to_string()),
            ("frames_per_device", a.frames.to_string()),
            ("frame_len", a.frame_len.to_string()),
            ("snr_db", snr.map_or_else(|| "none".to_string(), fmt_f64)),
        ],
    )
}

/// `(label, path)` pairs listed in a dataset directory's devices.csv.
fn dataset_sources(dir: &Path) -> Result<Vec<(u32, PathBuf)>, CliError> {
    let listing = dir.join("devices.csv");
    let mut r = csv::Reader::from_path(&listing).map_err(|e| CliError::Input(format!("{}: {e}", listing.display())))?;
    let headers = r.headers().map_err(|e| CliError::Input(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Input(format!("{} lacks a `{name}` column", listing.display())))
    };
    let (lc, fc) = (col("label")?, col("file")?);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::Input(e.to_string()))?;
        let label = rec[lc]
            .parse()
            .map_err(|_| CliError::Input(format!("bad label {:?} in {}", &rec[lc], listing.display())))?;
        out.push((label, dir.join(&rec[fc])));
    }
    Ok(out)
}

fn extract(a: &ExtractArgs) -> Result<(), CliError> {
    let (sources, default_etalon) = if a.input.is_dir() {
        if a.label.is_some() {
            return Err(CliError::Config("--label applies to a single-file input only".into()));
        }
        (dataset_sources(&a.input)?, a.input.join("etalon.iq"))
    } else {
        let label = a
            .label
            .ok_or_else(|| CliError::Config("--label is required for a single-file input".into()))?;
        let parent = a.input.parent().map(Path::to_path_buf).unwrap_or_default();
        (vec![(label, a.input.clone())], parent.join("etalon.iq"))
    };
    let etalon_path = a.etalon.clone().unwrap_or(default_etalon);
    let etalon = read_etalon(&etalon_path, a.frame_len)
        .map_err(|e| CliError::Input(format!("{}: {e}", etalon_path.display())))?;

    let (mut labels, mut features) = (Vec::new(), Vec::new());
    let (mut frames, mut skipped) = (0, 0);
    for (label, path) in &sources {
        let stream = read_iq(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let ex = extract_capture(&stream, &etalon, &SyncConfig::default())
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        eprintln!(
            "{}: {} frames, {} skipped as degenerate",
            path.display(),
            ex.frames,
            ex.skipped
        );
        frames += ex.frames;
        skipped += ex.skipped;
        labels.extend(std::iter::repeat(*label).take(ex.features.len()));
        features.extend(ex.features);
    }
    if features.is_empty() {
        return Err(CliError::Empty(format!("no usable frames ({skipped} of {frames} skipped)")));
    }
    let set = LabeledFeatureSet::from_features(labels, &features).map_err(|e| CliError::Input(e.to_string()))?;
    prepare_out_dir(&a.common.out_dir)?;
    write_features_csv(&a.common.out_dir.join("features.csv"), &set)?;
    write_run_info(
        &a.common,
        "extract",
        &[
            ("frame_len", a.frame_len.to_string()),
            ("frames", frames.to_string()),
            ("rows", set.len().to_string()),
            ("skipped", skipped.to_string()),
        ],
    )
}

fn opt_f64(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), fmt_f64)
}

fn stats(a: &StatsArgs) -> Result<(), CliError> {
    if a.bins == 0 {
        return Err(CliError::Config("--bins must be positive".into()));
    }
    let set = load_features(&a.input, a.features.as_deref())?;
    let report = significance_report(&set).map_err(|e| CliError::Input(e.to_string()))?;
    let matrix = pearson_matrix(&set).map_err(|e| CliError::Input(e.to_string()))?;
    prepare_out_dir(&a.common.out_dir)?;

    write_out(
        &a.common.out_dir,
        "significance.csv",
        &csv_text(
            &["feature", "pbcc", "p_value", "significant"],
            report.rows.iter().map(|r| {
                [
                    r.feature.clone(),
                    opt_f64(r.pbcc),
                    opt_f64(r.p_value),
                    r.significant.to_string(),
                ]
            }),
        )?,
    )?;

    let mut header = vec!["feature"];
    header.extend(set.feature_names().iter().map(String::as_str));
    write_out(
        &a.common.out_dir,
        "pearson.csv",
        &csv_text(
            &header,
            set.feature_names()
                .iter()
                .zip(&matrix)
                .map(|(name, row)| std::iter::once(name.clone()).chain(row.iter().map(|v| opt_f64(*v)))),
        )?,
    )?;

    for (j, name) in set.feature_names().iter().enumerate() {
        let h = histogram(&set.column(j), a.bins).map_err(|e| CliError::Input(e.to_string()))?;
        write_out(
            &a.common.out_dir,
            &format!("histogram_{name}.csv"),
            &csv_text(
                &["bin", "lower", "upper", "count"],
                h.counts
                    .iter()
                    .enumerate()
                    .map(|(i, c)| [i.to_string(), fmt_f64(h.edges[i]), fmt_f64(h.edges[i + 1]), c.to_string()]),
            )?,
        )?;
    }
    write_run_info(
        &a.common,
        "stats",
        &[
            ("rows", set.len().to_string()),
            ("bins", a.bins.to_string()),
            ("positive_label", report.positive_label.to_string()),
        ],
    )
}

fn classifier_specs(a: &TrainEvalArgs, forest: &ForestParams) -> Result<Vec<ModelSpec>, CliError> {
    let mut specs = Vec::new();
    for name in a.classifiers.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let spec = match name {
            "forest" => ModelSpec::Forest(forest.clone()),
            "tree" => ModelSpec::Tree(TreeParams {
                max_depth: a.max_depth,
                min_samples_split: a.min_samples_split.unwrap_or(2),
                features_per_split: None,
            }),
            "knn" => ModelSpec::Knn { k: a.knn_k },
            "logistic" => ModelSpec::Logistic(LogisticParams::default()),
            "majority" => ModelSpec::Majority,
            other => return Err(CliError::Config(format!("unknown classifier {other:?}"))),
        };
        if specs.contains(&spec) {
            return Err(CliError::Config(format!("classifier {name} listed twice")));
        }
        specs.push(spec);
    }
    if specs.is_empty() {
        return Err(CliError::Config("--classifiers selects nothing".into()));
    }
    Ok(specs)
}

fn train_eval(a: &TrainEvalArgs) -> Result<(), CliError> {
    if a.folds < 2 {
        return Err(CliError::Config("--folds must be at least 2".into()));
    }
    if a.trees == 0 {
        return Err(CliError::Config("--trees must be positive".into()));
    }
    let set = load_features(&a.input, a.features.as_deref())?;
    let mut forest = ForestParams {
        n_trees: a.trees,
        max_depth: a.max_depth,
        min_samples_split: a.min_samples_split.unwrap_or(2),
        features_per_split: a.features_per_split,
        bootstrap: true,
    };
    let specs = classifier_specs(a, &forest)?;
    prepare_out_dir(&a.common.out_dir)?;

    if a.search {
        let grid = HyperparamGrid {
            iterations: a.iterations,
            ..Default::default()
        };
        let result = random_grid_search(&set, &grid, a.folds, a.common.seed)?;
        write_out(
            &a.common.out_dir,
            "search.csv",
            &csv_text(
                &["trial", "n_trees", "max_depth", "min_samples_split", "features_per_split", "mean_accuracy"],
                result.trials.iter().enumerate().map(|(i, t)| {
                    [
                        i.to_string(),
                        t.params.n_trees.to_string(),
                        t.params.max_depth.map_or_else(|| "none".into(), |d| d.to_string()),
                        t.params.min_samples_split.to_string(),
                        t.params.features_per_split.map_or_else(|| "auto".into(), |d| d.to_string()),
                        fmt_f64(t.mean_accuracy),
                    ]
                }),
            )?,
        )?;
        forest = result.best;
    }

    let mut metrics = Vec::new();
    let mut confusion = Vec::new();
    let mut summary = Vec::new();
    for spec in specs {
        let spec = match spec {
            ModelSpec::Forest(_) => ModelSpec::Forest(forest.clone()),
            s => s,
        };
        let name = spec.name();
        let cv = match evaluate(&set, &spec, a.folds, a.common.seed) {
            Err(ClassifyError::NotBinary(k)) => {
                eprintln!("{name}: skipped, needs two classes but the data has {k}");
                continue;
            }
            r => r?,
        };
        for (i, acc) in cv.fold_accuracies.iter().enumerate() {
            metrics.push([name.to_string(), i.to_string(), fmt_f64(*acc)]);
        }
        metrics.push([name.to_string(), "mean".to_string(), fmt_f64(cv.mean_accuracy)]);
        for (r, row) in cv.confusion.iter().enumerate() {
            for (c, count) in row.iter().enumerate() {
                confusion.push([
                    name.to_string(),
                    cv.classes[r].to_string(),
                    cv.classes[c].to_string(),
                    count.to_string(),
                ]);
            }
        }
        summary.push((format!("accuracy_{name}"), fmt_f64(cv.mean_accuracy)));
    }
    write_out(&a.common.out_dir, "metrics.csv", &csv_text(&["classifier", "fold", "accuracy"], metrics)?)?;
    write_out(
        &a.common.out_dir,
        "confusion.csv",
        &csv_text(&["classifier", "true_label", "predicted_label", "count"], confusion)?,
    )?;

    let model = train_forest(&set, &forest, a.common.seed)?;
    write_out(&a.common.out_dir, "model.txt", serialize_forest(&model).as_bytes())?;
    let mut ranked: Vec<(usize, f64)> = model.importances.iter().copied().enumerate().collect();
    ranked.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    write_out(
        &a.common.out_dir,
        "importances.csv",
        &csv_text(
            &["feature", "importance"],
            ranked.iter().map(|(i, v)| [set.feature_names()[*i].clone(), fmt_f64(*v)]),
        )?,
    )?;

    let mut info = vec![
        ("rows", set.len().to_string()),
        ("features", set.feature_names().join(" ")),
        ("folds", a.folds.to_string()),
        ("n_trees", forest.n_trees.to_string()),
        ("max_depth", forest.max_depth.map_or_else(|| "none".into(), |d| d.to_string())),
        ("min_samples_split", forest.min_samples_split.to_string()),
        (
            "features_per_split",
            forest.resolved_features_per_split(set.n_features()).to_string(),
        ),
        ("search", a.search.to_string()),
    ];
    info.extend(summary.iter().map(|(k, v)| (k.as_str(), v.clone())));
    write_run_info(&a.common, "train-eval", &info)
}

fn explain(a: &ExplainArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.model).map_err(|e| CliError::Input(format!("{}: {e}", a.model.display())))?;
    let model = parse_forest(&text).map_err(|e| CliError::Input(format!("{}: {e}", a.model.display())))?;
    let set = read_features_csv(&a.input)?
        .select_by_name(&model.feature_names)
        .map_err(|e| CliError::Input(e.to_string()))?;
    if set.is_empty() {
        return Err(CliError::Empty(format!("{} has no rows", a.input.display())));
    }
    if a.row >= set.len() {
        return Err(CliError::Config(format!("--row {} out of range (0..{})", a.row, set.len())));
    }
    let config = ExplainConfig {
        n_perturbations: a.perturbations,
        kernel_width: a.kernel_width,
        ridge_lambda: a.ridge,
    };
    config
        .validate(set.n_features())
        .map_err(|e| CliError::Config(e.to_string()))?;
    let stats = FeatureStats::from_dataset(&set);
    let e = explain_instance(&model, set.row(a.row), set.feature_names(), &stats, &config, a.common.seed)
        .map_err(|e| CliError::Input(e.to_string()))?;
    prepare_out_dir(&a.common.out_dir)?;
    write_out(
        &a.common.out_dir,
        "explanation.csv",
        &csv_text(&["feature", "weight"], e.ranked().into_iter().map(|(n, w)| [n.to_string(), fmt_f64(w)]))?,
    )?;
    write_out(
        &a.common.out_dir,
        "explanation_summary.csv",
        &csv_text(
            &["row", "true_label", "predicted_class", "predicted_proba", "intercept", "local_fidelity", "n_perturbations", "seed"],
            [[
                a.row.to_string(),
                set.labels()[a.row].to_string(),
                e.predicted_class.to_string(),
                fmt_f64(e.predicted_proba),
                fmt_f64(e.intercept),
                fmt_f64(e.local_fidelity),
                e.n_perturbations.to_string(),
                e.seed.to_string(),
            ]],
        )?,
    )?;
    write_run_info(
        &a.common,
        "explain",
        &[
            ("row", a.row.to_string()),
            ("perturbations", a.perturbations.to_string()),
            ("kernel_width", fmt_f64(config.resolved_kernel_width(set.n_features()))),
            ("ridge", fmt_f64(a.ridge)),
        ],
    )
}
