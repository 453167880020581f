//! The end-to-end predictor: cluster a user's photos, pick the cluster with
//! the most photos, and report its centroid as the estimated home.

use alloc::vec::Vec;
use core::fmt;

use crate::geo::{haversine_km, GeoPoint};
use crate::mst::{cut_by_threshold, cut_into_k_clusters, kruskal_mst, ClusterSet, ClusterStats, MstError};
use crate::photo::PhotoRecord;

/// How the MST is cut into clusters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClusterMode {
    /// Cut into exactly `k` clusters.
    FixedK { k: usize },
    /// Cut every MST edge heavier than `d_max_km`.
    Threshold { d_max_km: f64 },
}

/// Predictor configuration. Exactly one cut mode is active by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictorConfig {
    pub mode: ClusterMode,
    /// Minimum photo count required to attempt a prediction.
    pub min_photos: usize,
}

impl Default for PredictorConfig {
    /// Five clusters, at least ten photos. A handful of clusters covers the
    /// common regime of one home plus a few travel destinations; both values
    /// are configuration, not claims about any particular dataset.
    fn default() -> Self {
        PredictorConfig {
            mode: ClusterMode::FixedK { k: 5 },
            min_photos: 10,
        }
    }
}

impl PredictorConfig {
    /// Checks the mode parameter and `min_photos`.
    pub fn validate(&self) -> Result<(), PredictError> {
        if self.min_photos < 1 {
            return Err(PredictError::InvalidConfig("min_photos must be at least 1"));
        }
        match self.mode {
            ClusterMode::FixedK { k } if k < 1 => {
                Err(PredictError::InvalidConfig("k must be at least 1"))
            }
            ClusterMode::Threshold { d_max_km } if !(d_max_km.is_finite() && d_max_km > 0.0) => {
                Err(PredictError::InvalidConfig(
                    "threshold must be positive and finite",
                ))
            }
            _ => Ok(()),
        }
    }
}

/// A prediction: the chosen cluster's centroid, the full cluster set it came
/// from, and the error against ground truth when one was supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionResult {
    /// Equals `chosen_cluster.centroid`.
    pub predicted_home: GeoPoint,
    pub chosen_cluster: ClusterStats,
    pub cluster_set: ClusterSet,
    /// `haversine_km(predicted_home, truth)`; present iff truth was given.
    pub error_km: Option<f64>,
}

/// Errors from [`predict_hometown`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredictError {
    /// Fewer photos than `min_photos` (or than `k` in fixed-k mode).
    TooFewPhotos { photos: usize, required: usize },
    /// Config parameter out of range.
    InvalidConfig(&'static str),
    /// Propagated clustering or centroid failure.
    Mst(MstError),
}

impl fmt::Display for PredictError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictError::TooFewPhotos { photos, required } => {
                write!(f, "too few photos: {photos} < {required}")
            }
            PredictError::InvalidConfig(reason) => write!(f, "invalid config: {reason}"),
            PredictError::Mst(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PredictError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            PredictError::Mst(e) => Some(e),
            _ => None,
        }
    }
}

impl From<MstError> for PredictError {
    fn from(e: MstError) -> Self {
        PredictError::Mst(e)
    }
}

/// True when `a` is a strictly better home candidate than `b`: more photos,
/// then smaller diameter (a tighter cluster is the better home), then
/// lexicographically smaller centroid for totality.
fn better_candidate(a: &ClusterStats, b: &ClusterStats) -> bool {
    b.size
        .cmp(&a.size)
        .then(a.diameter_km.total_cmp(&b.diameter_km))
        .then(a.centroid.lat_deg().total_cmp(&b.centroid.lat_deg()))
        .then(a.centroid.lon_deg().total_cmp(&b.centroid.lon_deg()))
        .is_lt()
}

/// Clusters `photos` per `config`, selects the cluster with the maximum
/// photo count, and estimates the home as its spherical centroid.
///
/// Identically-located photos count individually: density means photo count,
/// not distinct places. The selection is a total order, so identical inputs
/// produce identical results.
pub fn predict_hometown(
    photos: &[PhotoRecord],
    config: &PredictorConfig,
    truth: Option<GeoPoint>,
) -> Result<PredictionResult, PredictError> {
    config.validate()?;
    let n = photos.len();
    if n < config.min_photos {
        return Err(PredictError::TooFewPhotos {
            photos: n,
            required: config.min_photos,
        });
    }
    if let ClusterMode::FixedK { k } = config.mode {
        if n < k {
            return Err(PredictError::TooFewPhotos {
                photos: n,
                required: k,
            });
        }
    }
    let points: Vec<GeoPoint> = photos.iter().map(|p| p.location).collect();
    let mst = kruskal_mst(&points)?;
    let cluster_set = match config.mode {
        ClusterMode::FixedK { k } => cut_into_k_clusters(&points, &mst, k)?,
        ClusterMode::Threshold { d_max_km } => cut_by_threshold(&points, &mst, d_max_km)?,
    };
    let mut best = 0;
    for idx in 1..cluster_set.clusters.len() {
        if better_candidate(&cluster_set.clusters[idx], &cluster_set.clusters[best]) {
            best = idx;
        }
    }
    let chosen_cluster = cluster_set.clusters[best].clone();
    let predicted_home = chosen_cluster.centroid;
    let error_km = truth.map(|t| haversine_km(predicted_home, t));
    Ok(PredictionResult {
        predicted_home,
        chosen_cluster,
        cluster_set,
        error_km,
    })
}
