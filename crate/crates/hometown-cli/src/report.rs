//! JSON report schema (`schema_version: 1`) and rendering.
//!
//! Every report is a single top-level object: the schema version, the echoed
//! configuration, then the payload. Coordinates are rounded to 6 decimal
//! places and distances to 3 (meter precision); fractions, exponents, and
//! likelihoods keep full precision. Rendering is byte-deterministic, so
//! identical pipeline results serialize to identical files.

use hometown_core::distribution::{HistogramScale, HistogramSeries, PowerLawFit};
use hometown_core::eval::EvalReport;
use hometown_core::mst::ClusterSet;
use hometown_core::predict::{ClusterMode, PredictorConfig};
use hometown_core::synth::SynthParams;
use hometown_core::GeoPoint;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Rounds to `dp` decimal places, canonicalizing -0.0 away.
fn round_dp(x: f64, dp: i32) -> f64 {
    let scale = 10f64.powi(dp);
    (x * scale).round() / scale + 0.0
}

pub fn round_coord(x: f64) -> f64 {
    round_dp(x, 6)
}

pub fn round_km(x: f64) -> f64 {
    round_dp(x, 3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoordJson {
    pub lat: f64,
    pub lon: f64,
}

impl CoordJson {
    pub fn from_point(p: GeoPoint) -> Self {
        CoordJson {
            lat: round_coord(p.lat_deg()),
            lon: round_coord(p.lon_deg()),
        }
    }
}

/// Echo of the clustering mode and minimum photo count used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictorEcho {
    pub mode: &'static str,
    pub k: Option<usize>,
    pub threshold_km: Option<f64>,
    pub min_photos: usize,
}

impl PredictorEcho {
    pub fn from_config(config: &PredictorConfig) -> Self {
        let (mode, k, threshold_km) = match config.mode {
            ClusterMode::FixedK { k } => ("fixed_k", Some(k), None),
            ClusterMode::Threshold { d_max_km } => ("threshold", None, Some(d_max_km)),
        };
        PredictorEcho {
            mode,
            k,
            threshold_km,
            min_photos: config.min_photos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureRow {
    pub user_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionRow {
    pub owner_id: String,
    pub n_photos: usize,
    pub predicted_home: CoordJson,
    pub chosen_cluster_size: usize,
    pub n_clusters: usize,
    /// Distance to the reported home, when one was supplied.
    pub error_km: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictReport {
    pub schema_version: u32,
    pub config: PredictorEcho,
    pub n_users: usize,
    pub predictions: Vec<PredictionRow>,
    pub failures: Vec<FailureRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalConfigEcho {
    #[serde(flatten)]
    pub predictor: PredictorEcho,
    pub thresholds_km: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub threshold_km: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfRow {
    pub error_km: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerUserRow {
    pub user_id: String,
    pub error_km: f64,
    pub n_photos: usize,
    pub chosen_cluster_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReportJson {
    pub schema_version: u32,
    pub config: EvalConfigEcho,
    pub n_users: usize,
    pub n_ok: usize,
    pub n_failed: usize,
    pub median_error_km: Option<f64>,
    pub fraction_within: Vec<ThresholdRow>,
    pub cdf: Vec<CdfRow>,
    pub per_user: Vec<PerUserRow>,
    pub failures: Vec<FailureRow>,
}

pub fn build_eval_report(
    config: &PredictorConfig,
    thresholds: &[f64],
    result: &EvalReport,
) -> EvalReportJson {
    EvalReportJson {
        schema_version: SCHEMA_VERSION,
        config: EvalConfigEcho {
            predictor: PredictorEcho::from_config(config),
            thresholds_km: thresholds.to_vec(),
        },
        n_users: result.per_user.len() + result.failures.len(),
        n_ok: result.per_user.len(),
        n_failed: result.n_failed(),
        median_error_km: result.median_error_km().map(round_km),
        fraction_within: result
            .fraction_within
            .iter()
            .map(|&(threshold_km, fraction)| ThresholdRow {
                threshold_km,
                fraction,
            })
            .collect(),
        cdf: result
            .cdf
            .iter()
            .map(|&(error_km, fraction)| CdfRow {
                error_km: round_km(error_km),
                fraction,
            })
            .collect(),
        per_user: result
            .per_user
            .iter()
            .map(|row| PerUserRow {
                user_id: row.user_id.clone(),
                error_km: round_km(row.error_km),
                n_photos: row.n_photos,
                chosen_cluster_size: row.chosen_cluster_size,
            })
            .collect(),
        failures: result
            .failures
            .iter()
            .map(|f| FailureRow {
                user_id: f.user_id.clone(),
                reason: f.reason.clone(),
            })
            .collect(),
    }
}

/// The `--per-user` CSV companion to an evaluation report.
pub fn write_per_user_csv(report: &EvalReportJson) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["user_id", "error_km", "n_photos", "chosen_cluster_size"])
        .expect("in-memory writer cannot fail");
    for row in &report.per_user {
        writer
            .write_record([
                row.user_id.as_str(),
                &row.error_km.to_string(),
                &row.n_photos.to_string(),
                &row.chosen_cluster_size.to_string(),
            ])
            .expect("in-memory writer cannot fail");
    }
    String::from_utf8(writer.into_inner().expect("in-memory writer cannot fail"))
        .expect("writer output is UTF-8")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitConfigEcho {
    pub x_min_km: f64,
    pub bins: usize,
    pub log: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitBlock {
    /// Positive convention: density ∝ d^(-exponent).
    pub exponent: f64,
    pub x_min_km: f64,
    pub n_tail: usize,
    pub log_likelihood: f64,
}

impl FitBlock {
    pub fn from_fit(fit: &PowerLawFit) -> Self {
        FitBlock {
            exponent: fit.exponent,
            x_min_km: fit.x_min_km,
            n_tail: fit.n_tail,
            log_likelihood: fit.log_likelihood,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramJson {
    pub scale: &'static str,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub densities: Vec<f64>,
}

impl HistogramJson {
    pub fn from_series(series: &HistogramSeries) -> Self {
        HistogramJson {
            scale: match series.scale {
                HistogramScale::Linear => "linear",
                HistogramScale::Log => "log",
            },
            bin_edges: series.bin_edges.iter().map(|&e| round_km(e)).collect(),
            counts: series.counts.clone(),
            densities: series.densities.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReportJson {
    pub schema_version: u32,
    pub config: FitConfigEcho,
    pub n_users: usize,
    pub n_samples: usize,
    /// Zero distances dropped before log-scale binning.
    pub n_zero_excluded: usize,
    pub mle: FitBlock,
    /// Least-squares fit on the log-binned histogram; present in log mode.
    pub log_binned: Option<FitBlock>,
    pub histogram: HistogramJson,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutConfigEcho {
    pub mode: &'static str,
    pub k: Option<usize>,
    pub threshold_km: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterRow {
    pub id: usize,
    pub size: usize,
    pub centroid: CoordJson,
    pub diameter_km: f64,
    pub member_indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeRow {
    pub i: usize,
    pub j: usize,
    pub weight_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReportJson {
    pub schema_version: u32,
    pub config: CutConfigEcho,
    pub n_points: usize,
    pub clusters: Vec<ClusterRow>,
    pub cut_edges: Vec<EdgeRow>,
}

pub fn build_cluster_report(
    config: CutConfigEcho,
    n_points: usize,
    set: &ClusterSet,
) -> ClusterReportJson {
    ClusterReportJson {
        schema_version: SCHEMA_VERSION,
        config,
        n_points,
        clusters: set
            .clusters
            .iter()
            .enumerate()
            .map(|(id, c)| ClusterRow {
                id,
                size: c.size,
                centroid: CoordJson::from_point(c.centroid),
                diameter_km: round_km(c.diameter_km),
                member_indices: c.member_indices.clone(),
            })
            .collect(),
        cut_edges: set
            .cut_edges
            .iter()
            .map(|e| EdgeRow {
                i: e.i,
                j: e.j,
                weight_km: round_km(e.weight_km),
            })
            .collect(),
    }
}

/// Echo of the generator parameters a synthetic cohort was built from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthEcho {
    pub users: usize,
    pub photos_per_user: usize,
    pub exponent: f64,
    pub home_fraction: f64,
    pub seed: u64,
}

impl SynthEcho {
    pub fn new(params: &SynthParams, users: usize) -> Self {
        SynthEcho {
            users,
            photos_per_user: params.n_photos,
            exponent: params.exponent,
            home_fraction: params.home_fraction,
            seed: params.seed,
        }
    }
}

/// Renders any report as pretty-printed JSON with a trailing newline.
pub fn render_json<T: Serialize>(report: &T) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("reports serialize infallibly");
    text.push('\n');
    text
}
