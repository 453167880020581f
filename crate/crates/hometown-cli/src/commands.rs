//! The `hometown` command-line surface: argument parsing, dispatch, and the
//! path-free pipeline functions each subcommand wraps.
//!
//! Exit codes: 0 on success, 1 on validation errors (unreadable or malformed
//! inputs, infeasible parameters), 2 on usage errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hometown_core::distribution::{
    distances_from_home, fit_power_law_log_binned, fit_power_law_mle, histogram,
    DistributionError, HistogramScale,
};
use hometown_core::eval::{evaluate_cohort, EvalError};
use hometown_core::mst::{cut_by_threshold, cut_into_k_clusters, kruskal_mst, MstError};
use hometown_core::photo::{group_by_owner, PhotoRecord, UserDataset};
use hometown_core::predict::{predict_hometown, ClusterMode, PredictorConfig};
use hometown_core::synth::{generate_cohort, SynthError, SynthParams};
use hometown_core::GeoPoint;
use thiserror::Error;

use crate::formats::{
    parse_flickr_json, parse_homes_csv, parse_photos_csv, write_homes_csv, write_photos_csv,
    FormatError, ParseMode,
};
use crate::report::{
    build_cluster_report, build_eval_report, render_json, round_km, write_per_user_csv,
    ClusterReportJson, CoordJson, CutConfigEcho, EvalReportJson, FailureRow, FitBlock,
    FitConfigEcho, FitReportJson, HistogramJson, PredictReport, PredictionRow, PredictorEcho,
    SCHEMA_VERSION,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: FormatError },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Mst(#[from] MstError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
}

#[derive(Parser)]
#[command(
    name = "hometown",
    version,
    about = "Predict hometowns from geotagged photos by minimum-spanning-tree clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predict each user's home location from their photos
    Predict(PredictArgs),
    /// Score predictions against reported homes
    Eval(EvalArgs),
    /// Fit a power law to photo-to-home distances
    Fit(FitArgs),
    /// Generate a synthetic photo cohort
    Synth(SynthArgs),
    /// Cluster every photo in a file, ignoring owners
    Cluster(ClusterArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Photos file: CSV (photo_id,owner_id,lat,lon,taken_at) or Flickr-shaped JSON
    #[arg(long)]
    photos: PathBuf,
    /// Abort on the first malformed row instead of skipping it with a warning
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ModeArgs {
    /// Number of clusters to cut the photo tree into (default 5)
    #[arg(long, conflicts_with = "threshold_km")]
    k: Option<usize>,
    /// Instead of a fixed count, cut every tree edge longer than this many km
    #[arg(long)]
    threshold_km: Option<f64>,
}

impl ModeArgs {
    fn mode(&self) -> ClusterMode {
        match (self.k, self.threshold_km) {
            (Some(k), _) => ClusterMode::FixedK { k },
            (None, Some(d_max_km)) => ClusterMode::Threshold { d_max_km },
            (None, None) => PredictorConfig::default().mode,
        }
    }
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Optional homes CSV (owner_id,lat,lon) to report per-user error against
    #[arg(long)]
    homes: Option<PathBuf>,
    #[command(flatten)]
    mode: ModeArgs,
    /// Skip users with fewer photos than this
    #[arg(long, default_value_t = 10)]
    min_photos: usize,
    /// Where to write the JSON report
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Homes CSV (owner_id,lat,lon) providing ground truth
    #[arg(long)]
    homes: PathBuf,
    #[command(flatten)]
    mode: ModeArgs,
    /// Skip users with fewer photos than this
    #[arg(long, default_value_t = 10)]
    min_photos: usize,
    /// Error thresholds in km, ascending
    #[arg(long, value_delimiter = ',', default_value = "10,25,50,100,500")]
    thresholds: Vec<f64>,
    /// Where to write the JSON report
    #[arg(long)]
    out: PathBuf,
    /// Also write per-user errors as CSV
    #[arg(long)]
    per_user: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Homes CSV (owner_id,lat,lon); distances are measured to these
    #[arg(long)]
    homes: PathBuf,
    /// Lower cutoff for the power-law tail, in km
    #[arg(long, default_value_t = 1.0)]
    x_min_km: f64,
    /// Histogram bin count
    #[arg(long, default_value_t = 30)]
    bins: usize,
    /// Log-spaced bins plus a least-squares fit on the binned densities
    #[arg(long)]
    log: bool,
    /// Where to write the JSON report
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Number of synthetic users
    #[arg(long, default_value_t = 31)]
    users: usize,
    /// Photos generated per user
    #[arg(long, default_value_t = 685)]
    photos_per_user: usize,
    /// Power-law exponent of home photo distances
    #[arg(long, default_value_t = 2.38)]
    exponent: f64,
    /// Fraction of photos taken around home rather than while traveling
    #[arg(long, default_value_t = 0.8)]
    home_fraction: f64,
    /// Root seed; all randomness flows from it
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Where to write the photos CSV
    #[arg(long)]
    out: PathBuf,
    /// Optionally write true homes as CSV (owner_id,lat,lon)
    #[arg(long)]
    homes_out: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    mode: ModeArgs,
    /// Where to write the JSON report
    #[arg(long)]
    out: PathBuf,
}

/// Parses `argv` and runs the chosen subcommand, returning the process exit
/// code instead of exiting, so tests can drive the CLI in-process.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; they are not usage errors.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Predict(args) => cmd_predict(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Cluster(args) => cmd_cluster(args),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PhotoFormat {
    Csv,
    Json,
}

fn detect_format(path: &Path, bytes: &[u8]) -> PhotoFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => PhotoFormat::Json,
        Some(ext) if ext.eq_ignore_ascii_case("csv") => PhotoFormat::Csv,
        _ => match bytes.iter().find(|b| !b.is_ascii_whitespace()) {
            Some(b'[') | Some(b'{') => PhotoFormat::Json,
            _ => PhotoFormat::Csv,
        },
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn load_photos(input: &InputArgs) -> Result<Vec<PhotoRecord>, CliError> {
    let path = &input.photos;
    let bytes = read_file(path)?;
    let mode = if input.strict {
        ParseMode::Strict
    } else {
        ParseMode::Lenient
    };
    let (parsed, locus) = match detect_format(path, &bytes) {
        PhotoFormat::Csv => (parse_photos_csv(&bytes, mode), "row"),
        PhotoFormat::Json => (parse_flickr_json(&bytes, mode), "entry"),
    };
    let parsed = parsed.map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    for (at, reason) in &parsed.rejected {
        eprintln!(
            "warning: {}: skipped {locus} {at}: {reason}",
            path.display()
        );
    }
    Ok(parsed.records)
}

fn load_homes(path: &Path) -> Result<BTreeMap<String, GeoPoint>, CliError> {
    let bytes = read_file(path)?;
    parse_homes_csv(&bytes).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs the predictor over grouped users and shapes the outcome as a report.
pub fn predict_report_from(users: &[UserDataset], config: &PredictorConfig) -> PredictReport {
    let mut predictions = Vec::new();
    let mut failures = Vec::new();
    for user in users {
        match predict_hometown(user.photos(), config, user.reported_home()) {
            Ok(result) => predictions.push(PredictionRow {
                owner_id: String::from(user.owner_id()),
                n_photos: user.photos().len(),
                predicted_home: CoordJson::from_point(result.predicted_home),
                chosen_cluster_size: result.chosen_cluster.size,
                n_clusters: result.cluster_set.clusters.len(),
                error_km: result.error_km.map(round_km),
            }),
            Err(e) => failures.push(FailureRow {
                user_id: String::from(user.owner_id()),
                reason: e.to_string(),
            }),
        }
    }
    PredictReport {
        schema_version: SCHEMA_VERSION,
        config: PredictorEcho::from_config(config),
        n_users: users.len(),
        predictions,
        failures,
    }
}

/// Evaluates a cohort and shapes the outcome as a report.
pub fn eval_report_from(
    users: &[UserDataset],
    config: &PredictorConfig,
    thresholds: &[f64],
) -> Result<EvalReportJson, EvalError> {
    let result = evaluate_cohort(users, config, thresholds)?;
    Ok(build_eval_report(config, thresholds, &result))
}

/// Pools photo-to-home distances over every user with a home and fits them.
pub fn fit_report_from(
    users: &[UserDataset],
    x_min_km: f64,
    bins: usize,
    log: bool,
) -> Result<FitReportJson, DistributionError> {
    let mut samples = Vec::new();
    let mut n_users = 0usize;
    for user in users {
        if let Some(home) = user.reported_home() {
            samples.extend(distances_from_home(user.photos(), home));
            n_users += 1;
        }
    }
    let mle = fit_power_law_mle(&samples, x_min_km)?;

    let (hist_samples, n_zero_excluded, scale) = if log {
        let positive: Vec<f64> = samples.iter().copied().filter(|&d| d > 0.0).collect();
        let excluded = samples.len() - positive.len();
        (positive, excluded, HistogramScale::Log)
    } else {
        (samples.clone(), 0, HistogramScale::Linear)
    };
    let series = histogram(&hist_samples, bins, scale)?;
    let log_binned = if log {
        Some(FitBlock::from_fit(&fit_power_law_log_binned(
            &samples, x_min_km, bins,
        )?))
    } else {
        None
    };

    Ok(FitReportJson {
        schema_version: SCHEMA_VERSION,
        config: FitConfigEcho {
            x_min_km,
            bins,
            log,
        },
        n_users,
        n_samples: samples.len(),
        n_zero_excluded,
        mle: FitBlock::from_fit(&mle),
        log_binned,
        histogram: HistogramJson::from_series(&series),
    })
}

/// Clusters a flat point list and shapes the outcome as a report.
pub fn cluster_report_from(
    points: &[GeoPoint],
    mode: ClusterMode,
) -> Result<ClusterReportJson, MstError> {
    let mst = kruskal_mst(points)?;
    let (set, echo) = match mode {
        ClusterMode::FixedK { k } => (
            cut_into_k_clusters(points, &mst, k)?,
            CutConfigEcho {
                mode: "fixed_k",
                k: Some(k),
                threshold_km: None,
            },
        ),
        ClusterMode::Threshold { d_max_km } => (
            cut_by_threshold(points, &mst, d_max_km)?,
            CutConfigEcho {
                mode: "threshold",
                k: None,
                threshold_km: Some(d_max_km),
            },
        ),
    };
    Ok(build_cluster_report(echo, points.len(), &set))
}

/// Generates a cohort and serializes it as (photos CSV, homes CSV).
pub fn synth_outputs(params: &SynthParams, users: usize) -> Result<(String, String), SynthError> {
    let cohort = generate_cohort(params, users)?;
    let mut records = Vec::new();
    let mut homes = BTreeMap::new();
    for user in &cohort {
        records.extend(user.photos.iter().cloned());
        homes.insert(user.user_id.clone(), user.true_home);
    }
    Ok((write_photos_csv(&records), write_homes_csv(&homes)))
}

fn cmd_predict(args: PredictArgs) -> Result<(), CliError> {
    let records = load_photos(&args.input)?;
    let homes = args.homes.as_deref().map(load_homes).transpose()?;
    let users = group_by_owner(records, homes.as_ref());
    let config = PredictorConfig {
        mode: args.mode.mode(),
        min_photos: args.min_photos,
    };
    let report = predict_report_from(&users, &config);
    write_file(&args.out, &render_json(&report))?;
    println!(
        "predict: {} users, {} predicted, {} failed -> {}",
        report.n_users,
        report.predictions.len(),
        report.failures.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let records = load_photos(&args.input)?;
    let homes = load_homes(&args.homes)?;
    let users = group_by_owner(records, Some(&homes));
    let config = PredictorConfig {
        mode: args.mode.mode(),
        min_photos: args.min_photos,
    };
    let report = eval_report_from(&users, &config, &args.thresholds)?;
    write_file(&args.out, &render_json(&report))?;
    if let Some(per_user) = &args.per_user {
        write_file(per_user, &write_per_user_csv(&report))?;
    }
    let median = report
        .median_error_km
        .map_or_else(|| String::from("n/a"), |m| format!("{m} km"));
    println!(
        "eval: {} users, {} scored, {} failed, median error {} -> {}",
        report.n_users,
        report.n_ok,
        report.n_failed,
        median,
        args.out.display()
    );
    Ok(())
}

fn cmd_fit(args: FitArgs) -> Result<(), CliError> {
    let records = load_photos(&args.input)?;
    let homes = load_homes(&args.homes)?;
    let users = group_by_owner(records, Some(&homes));
    let report = fit_report_from(&users, args.x_min_km, args.bins, args.log)?;
    write_file(&args.out, &render_json(&report))?;
    println!(
        "fit: {} distances from {} users, exponent {:.4} over {} tail samples -> {}",
        report.n_samples,
        report.n_users,
        report.mle.exponent,
        report.mle.n_tail,
        args.out.display()
    );
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let params = SynthParams {
        n_photos: args.photos_per_user,
        exponent: args.exponent,
        home_fraction: args.home_fraction,
        seed: args.seed,
        ..SynthParams::default()
    };
    let (photos_csv, homes_csv) = synth_outputs(&params, args.users)?;
    write_file(&args.out, &photos_csv)?;
    if let Some(homes_out) = &args.homes_out {
        write_file(homes_out, &homes_csv)?;
    }
    println!(
        "synth: {} users x {} photos (seed {}) -> {}",
        args.users,
        args.photos_per_user,
        args.seed,
        args.out.display()
    );
    Ok(())
}

fn cmd_cluster(args: ClusterArgs) -> Result<(), CliError> {
    let records = load_photos(&args.input)?;
    let points: Vec<GeoPoint> = records.iter().map(|r| r.location).collect();
    let report = cluster_report_from(&points, args.mode.mode())?;
    write_file(&args.out, &render_json(&report))?;
    println!(
        "cluster: {} points into {} clusters -> {}",
        report.n_points,
        report.clusters.len(),
        args.out.display()
    );
    Ok(())
}
