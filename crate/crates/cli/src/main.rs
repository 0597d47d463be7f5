//! `greed`: feature extraction, scoring, training and evaluation for the
//! GREED full-reference video quality model.

mod io;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use greed_core::bandpass::{build_packet_filters, temporal_filter, Wavelet};
use greed_core::dataset::{join_features, load_manifest, DatasetError, ManifestRow};
use greed_core::evaluation::{dump_histogram, hfr_vmaf, run_protocol, split_contents, ProtocolConfig, Sample};
use greed_core::features::{compute_features_multiscale, FeatureCache, FeatureRecord, GreedConfig, GreedFeatures, SpatialReference};
use greed_core::par;
use greed_core::regression::{default_grid, grid_search, load_model, predict, save_model, train_svr, ModelFile};
use greed_core::video_io::{FrameRate, PixelFormat};

use crate::io::{format_csv, format_text, load_pyramid, parse_printed, FingerprintMismatch, RawGeometry};

const CACHE_FILE: &str = "features.jsonl";

#[derive(Parser)]
#[command(name = "greed", version, about = "GREED full-reference video quality features and scores")]
struct Cli {
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, short = 'j', global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the feature vector of a pair, or of every pair in a manifest
    Features(FeaturesArgs),
    /// Score a distorted video against its reference with a trained model
    Score(ScoreArgs),
    /// Score a feature vector printed by `features` (file or stdin)
    Predict(PredictArgs),
    /// Grid-search hyperparameters and fit a model on a whole manifest
    Train(TrainArgs),
    /// Median correlations over repeated content-disjoint splits
    Eval(EvalArgs),
    /// Normalized histogram of one temporal band-pass response
    Histdump(HistdumpArgs),
    /// Combine a VMAF score with a GREED score
    HfrVmaf(HfrVmafArgs),
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Temporal wavelet filter (haar, db2, bior2.2)
    #[arg(long, default_value = "bior2.2")]
    wavelet: Wavelet,
    /// Spatial scales s, frames downsampled by 2^s
    #[arg(long, value_delimiter = ',', default_value = "4,5")]
    scales: Vec<u32>,
    /// Wavelet packet decomposition depth
    #[arg(long, default_value_t = 3)]
    levels: u32,
    /// Neural noise variance added to band-pass coefficients
    #[arg(long, default_value_t = 0.1)]
    noise_var: f64,
    /// Side of the square entropy patch
    #[arg(long, default_value_t = 5)]
    patch: usize,
    /// Reference entropies used by SGREED across frame rates (pseudo, averaged)
    #[arg(long, default_value = "pseudo")]
    spatial_ref: SpatialReference,
}

impl ConfigArgs {
    fn config(&self) -> Result<GreedConfig> {
        let config = GreedConfig {
            wavelet: self.wavelet,
            levels: self.levels,
            scales: self.scales.clone(),
            noise_var: self.noise_var,
            patch: self.patch,
            spatial_reference: self.spatial_ref,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args, Clone)]
struct RawArgs {
    /// Frame width of raw planar input
    #[arg(long)]
    width: Option<usize>,
    /// Frame height of raw planar input
    #[arg(long)]
    height: Option<usize>,
    /// Pixel format of raw planar input (yuv420p, yuv420p10le)
    #[arg(long, default_value = "yuv420p")]
    pix_fmt: PixelFormat,
    /// Frame rate of a raw reference, e.g. 120 or 30000/1001
    #[arg(long)]
    ref_fps: Option<FrameRate>,
    /// Frame rate of a raw distorted video
    #[arg(long)]
    dist_fps: Option<FrameRate>,
}

impl RawArgs {
    fn geometry(&self) -> RawGeometry {
        RawGeometry { width: self.width, height: self.height, format: self.pix_fmt }
    }
}

#[derive(Args, Clone)]
struct CacheArgs {
    /// Directory holding the feature cache (features.jsonl)
    #[arg(long, env = "GREED_CACHE_DIR", default_value = "greed-cache")]
    cache_dir: PathBuf,
}

impl CacheArgs {
    fn path(&self) -> PathBuf {
        self.cache_dir.join(CACHE_FILE)
    }

    fn load(&self) -> Result<FeatureCache> {
        let path = self.path();
        if !path.exists() {
            return Ok(FeatureCache::default());
        }
        Ok(FeatureCache::load(&path)?)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
struct FeaturesArgs {
    /// Reference video (Y4M, or raw with --width/--height/--ref-fps)
    #[arg(required_unless_present = "manifest", conflicts_with = "manifest")]
    reference: Option<PathBuf>,
    /// Distorted video at the reference frame rate or below
    #[arg(required_unless_present = "manifest")]
    dist: Option<PathBuf>,
    /// Process every pair of a manifest CSV into the cache instead
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Content id recorded in the cache [default: reference file stem]
    #[arg(long)]
    content_id: Option<String>,
    /// Also append the result to the feature cache
    #[arg(long)]
    cache: bool,
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    raw: RawArgs,
    #[command(flatten)]
    cache_args: CacheArgs,
}

#[derive(Args)]
struct ScoreArgs {
    reference: PathBuf,
    dist: PathBuf,
    /// Model file written by `train`
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    raw: RawArgs,
}

#[derive(Args)]
struct PredictArgs {
    /// Output of `features` for one pair; stdin when absent
    input: Option<PathBuf>,
    /// Model file written by `train`
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Manifest CSV: content_id,ref,dist,fps,tag,dmos
    #[arg(long)]
    manifest: PathBuf,
    /// Where to write the model
    #[arg(long)]
    model: PathBuf,
    /// Seed of the split used to pick hyperparameters
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    cache_args: CacheArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Manifest CSV: content_id,ref,dist,fps,tag,dmos
    #[arg(long)]
    manifest: PathBuf,
    /// Number of random train/validation/test splits
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Seed of the split sequence
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report format
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    cache_args: CacheArgs,
}

#[derive(Args)]
struct HistdumpArgs {
    /// Video whose band-pass response is histogrammed
    video: PathBuf,
    /// Temporal band k, 1 is the lowest kept band
    #[arg(long, default_value_t = 1)]
    band: usize,
    /// Spatial scale s
    #[arg(long, default_value_t = 4)]
    scale: u32,
    /// Number of bins
    #[arg(long, default_value_t = 101)]
    bins: usize,
    /// Temporal wavelet filter (haar, db2, bior2.2)
    #[arg(long, default_value = "bior2.2")]
    wavelet: Wavelet,
    /// Wavelet packet decomposition depth
    #[arg(long, default_value_t = 3)]
    levels: u32,
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    #[command(flatten)]
    raw: RawArgs,
}

#[derive(Args)]
struct HfrVmafArgs {
    /// VMAF score in [0, 100]
    #[arg(long)]
    vmaf: f64,
    /// GREED score
    #[arg(long)]
    greed: f64,
}

fn features_for(reference: &Path, dist: &Path, config: &GreedConfig, raw: &RawArgs, dist_fps: Option<FrameRate>) -> Result<GreedFeatures> {
    let r = load_pyramid(reference, &config.scales, raw.geometry(), raw.ref_fps)?;
    let d = load_pyramid(dist, &config.scales, raw.geometry(), dist_fps.or(raw.dist_fps))?;
    let (features, _) = compute_features_multiscale(&r, &d, config).with_context(|| format!("{} vs {}", reference.display(), dist.display()))?;
    Ok(features)
}

fn cmd_features(args: &FeaturesArgs) -> Result<()> {
    let config = args.config.config()?;
    if let Some(manifest) = &args.manifest {
        return features_manifest(manifest, args, &config);
    }
    let (reference, dist) = (args.reference.as_ref().expect("clap enforces"), args.dist.as_ref().expect("clap enforces"));
    let features = features_for(reference, dist, &config, &args.raw, None)?;
    let fingerprint = config.fingerprint();
    if args.cache {
        let content_id = match &args.content_id {
            Some(id) => id.clone(),
            None => reference.file_stem().map_or_else(|| "unknown".into(), |s| s.to_string_lossy().into_owned()),
        };
        let record = FeatureRecord {
            fingerprint: fingerprint.clone(),
            content_id,
            reference: reference.display().to_string(),
            dist: dist.display().to_string(),
            features: features.values.clone(),
        };
        store(&args.cache_args, record)?;
    }
    let names = GreedFeatures::names(&config);
    let out = match args.format {
        OutputFormat::Text => format_text(&fingerprint, &names, &features.values),
        OutputFormat::Csv => format_csv(&fingerprint, &names, &features.values),
    };
    print!("{out}");
    Ok(())
}

/// Appends unless the cache already holds this exact record.
fn store(cache: &CacheArgs, record: FeatureRecord) -> Result<()> {
    let existing = cache.load()?;
    if existing.get(&record.reference, &record.dist) != Some(&record) {
        FeatureCache::append(cache.path(), &record)?;
    }
    Ok(())
}

fn manifest_rows(path: &Path) -> Result<Vec<ManifestRow>> {
    load_manifest(path).map_err(|e| match e {
        DatasetError::Io { .. } => e.into(),
        other => anyhow::Error::new(other).context(path.display().to_string()),
    })
}

fn features_manifest(manifest: &Path, args: &FeaturesArgs, config: &GreedConfig) -> Result<()> {
    let rows = manifest_rows(manifest)?;
    let base = manifest.parent().unwrap_or(Path::new(""));
    let fingerprint = config.fingerprint();
    let mut cache = args.cache_args.load()?;
    let names = GreedFeatures::names(config);
    let sep = if args.format == OutputFormat::Csv { "," } else { " " };
    let mut out = ["content_id", "ref", "dist", "fingerprint"].map(String::from).to_vec();
    out.extend(names);
    println!("{}", out.join(sep));
    for row in &rows {
        let values = match cache.get(&row.reference, &row.dist).filter(|r| r.fingerprint == fingerprint) {
            Some(rec) => rec.features.clone(),
            None => {
                let dist_fps = row.fps.parse::<FrameRate>().ok();
                let features = features_for(&base.join(&row.reference), &base.join(&row.dist), config, &args.raw, dist_fps)?;
                let record = FeatureRecord {
                    fingerprint: fingerprint.clone(),
                    content_id: row.content_id.clone(),
                    reference: row.reference.clone(),
                    dist: row.dist.clone(),
                    features: features.values,
                };
                FeatureCache::append(args.cache_args.path(), &record)?;
                let values = record.features.clone();
                cache.records.push(record);
                values
            }
        };
        let mut line = vec![row.content_id.clone(), row.reference.clone(), row.dist.clone(), fingerprint.clone()];
        line.extend(values.iter().map(f64::to_string));
        println!("{}", line.join(sep));
    }
    Ok(())
}

fn checked_model(path: &Path, fingerprint: &str) -> Result<ModelFile> {
    let file = load_model(path).with_context(|| path.display().to_string())?;
    if file.fingerprint != fingerprint {
        return Err(FingerprintMismatch {
            what: format!("model {}", path.display()),
            found: file.fingerprint,
            expected: fingerprint.to_string(),
        }
        .into());
    }
    Ok(file)
}

fn cmd_score(args: &ScoreArgs) -> Result<()> {
    let config = args.config.config()?;
    let model = checked_model(&args.model, &config.fingerprint())?;
    let features = features_for(&args.reference, &args.dist, &config, &args.raw, None)?;
    println!("{}", predict(&model.model, &features.values)?);
    Ok(())
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let text = match &args.input {
        Some(path) => std::fs::read_to_string(path).with_context(|| path.display().to_string())?,
        None => std::io::read_to_string(std::io::stdin()).context("stdin")?,
    };
    let printed = parse_printed(&text)?;
    let model = checked_model(&args.model, &printed.fingerprint)?;
    println!("{}", predict(&model.model, &printed.values)?);
    Ok(())
}

fn samples(manifest: &Path, config: &GreedConfig, cache: &CacheArgs) -> Result<Vec<Sample>> {
    let rows = manifest_rows(manifest)?;
    let cache = cache.load()?;
    Ok(join_features(&rows, &cache, &config.fingerprint())?)
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let config = args.config.config()?;
    let samples = samples(&args.manifest, &config, &args.cache_args)?;
    let contents: Vec<String> = samples.iter().map(|s| s.content_id.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let split = split_contents(&contents, args.seed, 0)?;
    let fold = |ids: &[String]| -> (Vec<Vec<f64>>, Vec<f64>) {
        samples.iter().filter(|s| ids.contains(&s.content_id)).map(|s| (s.features.clone(), s.dmos)).unzip()
    };
    let (train_x, train_y) = fold(&split.train);
    let (val_x, val_y) = fold(&split.val);
    let search = grid_search(&train_x, &train_y, &val_x, &val_y, &default_grid())?;

    let (all_x, all_y): (Vec<Vec<f64>>, Vec<f64>) = samples.iter().map(|s| (s.features.clone(), s.dmos)).unzip();
    let model = train_svr(&all_x, &all_y, search.best)?;
    let support = model.support_vectors.len();
    save_model(&args.model, &ModelFile { fingerprint: config.fingerprint(), model }).with_context(|| args.model.display().to_string())?;
    let h = search.best;
    let val = search.srocc.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"));
    println!("samples {} C={} epsilon={} gamma={} val_srocc={val} support_vectors={support}", samples.len(), h.c, h.epsilon, h.gamma);
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let config = args.config.config()?;
    let samples = samples(&args.manifest, &config, &args.cache_args)?;
    let report = run_protocol(&samples, &ProtocolConfig { trials: args.trials, seed: args.seed, grid: default_grid() })?;
    match args.format {
        ReportFormat::Text => print!("{}", report.to_text()),
        ReportFormat::Json => println!("{}", report.to_json()),
    }
    Ok(())
}

fn cmd_histdump(args: &HistdumpArgs) -> Result<()> {
    let bank = build_packet_filters(args.wavelet, args.levels)?;
    if args.band == 0 || args.band > bank.len() {
        bail!("band must be in 1..={}, got {}", bank.len(), args.band);
    }
    let video = load_pyramid(&args.video, &[args.scale], args.raw.geometry(), args.raw.ref_fps.or(args.raw.dist_fps))?;
    let stack = temporal_filter(video.at(0), &bank.filters[args.band - 1]).with_context(|| args.video.display().to_string())?;
    let hist = dump_histogram(&stack, args.bins)?;
    match args.format {
        OutputFormat::Text => print!("{}", hist.to_text()),
        OutputFormat::Csv => {
            println!("center,density");
            for (c, d) in hist.centers.iter().zip(&hist.density) {
                println!("{c},{d}");
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let workers = (cli.jobs > 0).then_some(cli.jobs);
    par::with_workers(workers, || match &cli.command {
        Command::Features(a) => cmd_features(a),
        Command::Score(a) => cmd_score(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Histdump(a) => cmd_histdump(a),
        Command::HfrVmaf(a) => {
            println!("{}", hfr_vmaf(a.vmaf, a.greed)?);
            Ok(())
        }
    })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let stale = err.downcast_ref::<FingerprintMismatch>().is_some()
        || matches!(err.downcast_ref::<DatasetError>(), Some(DatasetError::Fingerprint { .. }));
    if stale {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let line = format!("{err:#}").replace('\n', " ");
            eprintln!("greed: {line}");
            ExitCode::from(exit_code(&err))
        }
    }
}
