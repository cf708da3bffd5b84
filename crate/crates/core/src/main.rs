use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wiou::benchmark::{
    default_scenes, generate_dataset, kitti_palette, read_dataset, run_benchmark, write_dataset,
    BenchmarkConfig, DatasetPair, DEFAULT_ERROR_COUNT, DEFAULT_LEVELS, DEFAULT_SEED,
};
use wiou::distance::{scene_distance_field, DistanceOptions, NormKind, Normalization};
use wiou::fmt::format_value;
use wiou::label::decode_label_image;
use wiou::metrics::{evaluate_pair, EvalConfig, DEFAULT_THETA};
use wiou::weighting::{check_alpha, export_weight_png, weight_map, ALPHA_SWEEP};
use wiou::{Connectivity, Error, LabelMap, Palette};

#[derive(Parser)]
#[command(name = "wiou", version, about = "Boundary-weighted IoU evaluation of segmentation masks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one prediction against its ground truth.
    Eval(EvalArgs),
    /// Render the weight map of a ground truth for each alpha.
    Weights(WeightsArgs),
    /// Write the synthetic 33-pair dataset.
    GenDataset(GenArgs),
    /// Run the metric comparison on a dataset.
    Benchmark(BenchArgs),
}

#[derive(Args)]
struct DistanceArgs {
    /// Distance norm.
    #[arg(long, default_value_t = NormKind::L2)]
    norm: NormKind,
    /// Pixel connectivity for instances, 4 or 8.
    #[arg(long, default_value_t = Connectivity::Four)]
    connectivity: Connectivity,
    /// Per-instance scaling: `max` divides by the instance maximum, `shifted`
    /// maps boundary pixels to 0.
    #[arg(long, value_enum, default_value_t = NormalizationArg::Max)]
    normalization: NormalizationArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizationArg {
    Max,
    Shifted,
}

impl DistanceArgs {
    fn options(&self) -> DistanceOptions {
        DistanceOptions {
            norm: self.norm,
            connectivity: self.connectivity,
            normalization: match self.normalization {
                NormalizationArg::Max => Normalization::Max,
                NormalizationArg::Shifted => Normalization::Shifted,
            },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    /// Palette JSON; defaults to the built-in street-scene palette.
    #[arg(long)]
    palette: Option<PathBuf>,
    /// Boundary importance factor, repeatable.
    #[arg(long = "alpha", default_values_t = [1.0])]
    alphas: Vec<f64>,
    /// Edge matching tolerance in pixels.
    #[arg(long, default_value_t = DEFAULT_THETA)]
    theta: f64,
    #[command(flatten)]
    distance: DistanceArgs,
    /// Report file; only the summary line is printed when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct WeightsArgs {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    palette: Option<PathBuf>,
    #[arg(long = "alpha", default_values_t = [1.0])]
    alphas: Vec<f64>,
    #[command(flatten)]
    distance: DistanceArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Dataset directory written by gen-dataset.
    #[arg(long, required_unless_present = "generate")]
    dataset: Option<PathBuf>,
    /// Generate the dataset first (into --dataset when given, else in memory).
    #[arg(long)]
    generate: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long = "alpha", default_values_t = ALPHA_SWEEP)]
    alphas: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_THETA)]
    theta: f64,
    #[command(flatten)]
    distance: DistanceArgs,
    /// Mislabeled pixels per equal-error triplet member, 0 to skip.
    #[arg(long, default_value_t = DEFAULT_ERROR_COUNT)]
    errors: usize,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

/// A one-line diagnostic and its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(message: String) -> Self {
        Self { code: 1, message }
    }

    fn validation(message: String) -> Self {
        Self { code: 2, message }
    }

    /// Classifies a library error, prefixing the file it concerns.
    fn from_error(context: Option<&Path>, e: Error) -> Self {
        let message = match context {
            Some(path) => format!("{}: {e}", path.display()),
            None => e.to_string(),
        };
        Self {
            code: if e.is_validation() { 2 } else { 1 },
            message,
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn in_file<T>(path: &Path, r: wiou::Result<T>) -> CliResult<T> {
    r.map_err(|e| Failure::from_error(Some(path), e))
}

fn plain<T>(r: wiou::Result<T>) -> CliResult<T> {
    r.map_err(|e| Failure::from_error(None, e))
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn load_palette(path: Option<&Path>) -> CliResult<Palette> {
    match path {
        None => Ok(kitti_palette()),
        Some(p) => {
            let bytes = read(p)?;
            in_file(p, Palette::from_json(&String::from_utf8_lossy(&bytes)))
        }
    }
}

fn load_map(path: &Path, palette: &Palette) -> CliResult<LabelMap> {
    let bytes = read(path)?;
    in_file(path, decode_label_image(&bytes, palette))
}

fn check_alphas(alphas: &[f64]) -> CliResult {
    alphas.iter().try_for_each(|&a| plain(check_alpha(a)))
}

fn cmd_eval(args: &EvalArgs) -> CliResult {
    let config = EvalConfig {
        alphas: args.alphas.clone(),
        theta: args.theta,
        distance: args.distance.options(),
    };
    plain(config.validate())?;
    let palette = load_palette(args.palette.as_deref())?;
    let gt = load_map(&args.gt, &palette)?;
    let pred = load_map(&args.pred, &palette)?;
    if gt.same_shape(&pred).is_err() {
        return Err(Failure::validation(format!(
            "dimension mismatch: {} is {}x{} but {} is {}x{}",
            args.gt.display(),
            gt.width(),
            gt.height(),
            args.pred.display(),
            pred.width(),
            pred.height()
        )));
    }
    let report = plain(evaluate_pair(&gt, &pred, &config))?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(out) = &args.out {
        let text = match args.format {
            Format::Json => report.to_json(),
            Format::Csv => report.to_csv(),
        };
        write(out, text.as_bytes())?;
    }
    println!("{}", report.summary_line());
    Ok(())
}

/// `weights_a<alpha>.png`
fn weight_file_name(alpha: f64) -> String {
    format!("weights_a{}.png", format_value(alpha))
}

fn cmd_weights(args: &WeightsArgs) -> CliResult {
    check_alphas(&args.alphas)?;
    let palette = load_palette(args.palette.as_deref())?;
    let gt = load_map(&args.gt, &palette)?;
    let scene = in_file(&args.gt, scene_distance_field(&gt, &args.distance.options()))?;
    for &alpha in &args.alphas {
        let wmap = plain(weight_map(&scene.field, alpha))?;
        let path = args.out.join(weight_file_name(alpha));
        write(&path, &plain(export_weight_png(&wmap))?)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn generate_into(dir: &Path, seed: u64) -> CliResult<Vec<DatasetPair>> {
    let scenes = default_scenes();
    let pairs = plain(generate_dataset(&scenes, DEFAULT_LEVELS, seed))?;
    in_file(
        dir,
        write_dataset(dir, &scenes, &pairs, &kitti_palette(), DEFAULT_LEVELS, seed),
    )?;
    Ok(pairs)
}

fn cmd_gen_dataset(args: &GenArgs) -> CliResult {
    let pairs = generate_into(&args.out, args.seed)?;
    println!("wrote {} pairs to {}", pairs.len(), args.out.display());
    Ok(())
}

fn cmd_benchmark(args: &BenchArgs) -> CliResult {
    check_alphas(&args.alphas)?;
    plain(wiou::metrics::check_theta(args.theta))?;
    let (pairs, scenes) = match (&args.dataset, args.generate) {
        (Some(dir), true) => (generate_into(dir, args.seed)?, default_scenes()),
        (None, _) => (
            plain(generate_dataset(&default_scenes(), DEFAULT_LEVELS, args.seed))?,
            default_scenes(),
        ),
        (Some(dir), false) => {
            let data = read_dataset(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
            (data.pairs, data.manifest.scenes)
        }
    };
    let config = BenchmarkConfig {
        alphas: args.alphas.clone(),
        theta: args.theta,
        distance: args.distance.options(),
        error_count: args.errors,
    };
    let result = plain(run_benchmark(&pairs, &scenes, &config))?;
    in_file(&args.out, result.write(&args.out))?;
    println!(
        "evaluated {} pairs, {} triplet members; wrote {}",
        result.per_image.len(),
        result.triplets.len(),
        args.out.display()
    );
    Ok(())
}

fn configure_threads() -> CliResult {
    let Ok(value) = std::env::var("WIOU_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| Failure::validation(format!("WIOU_THREADS: not a thread count: '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::io(format!("WIOU_THREADS: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Weights(a) => cmd_weights(a),
        Command::GenDataset(a) => cmd_gen_dataset(a),
        Command::Benchmark(a) => cmd_benchmark(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
