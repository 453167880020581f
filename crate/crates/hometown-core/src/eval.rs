//! Batch prediction over cohorts: per-user errors, threshold fractions, and
//! an empirical error CDF for plotting.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::photo::UserDataset;
use crate::predict::{predict_hometown, PredictorConfig};

/// Sample count of the CDF embedded in an [`EvalReport`].
pub const CDF_RESOLUTION: usize = 100;

/// One successfully evaluated user.
#[derive(Debug, Clone, PartialEq)]
pub struct PerUserResult {
    pub user_id: String,
    pub error_km: f64,
    pub n_photos: usize,
    pub chosen_cluster_size: usize,
}

/// A user that could not be evaluated, with the reason; never silently
/// dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalFailure {
    pub user_id: String,
    pub reason: String,
}

/// Cohort evaluation results. Rows and failures are ordered by `user_id`;
/// fractions are taken over successful predictions only.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_user: Vec<PerUserResult>,
    /// Empirical error CDF at [`CDF_RESOLUTION`] points spanning
    /// `[0, max error]`; empty when no prediction succeeded.
    pub cdf: Vec<(f64, f64)>,
    /// `(threshold_km, fraction of successful users with error <= threshold)`
    /// per configured threshold; fractions are 0 when nothing succeeded.
    pub fraction_within: Vec<(f64, f64)>,
    pub failures: Vec<EvalFailure>,
}

impl EvalReport {
    pub fn n_failed(&self) -> usize {
        self.failures.len()
    }

    /// Median of per-user errors (mean of the middle pair for even counts);
    /// `None` when no prediction succeeded.
    pub fn median_error_km(&self) -> Option<f64> {
        if self.per_user.is_empty() {
            return None;
        }
        let mut errors: Vec<f64> = self.per_user.iter().map(|r| r.error_km).collect();
        errors.sort_by(f64::total_cmp);
        let mid = errors.len() / 2;
        Some(if errors.len() % 2 == 1 {
            errors[mid]
        } else {
            (errors[mid - 1] + errors[mid]) / 2.0
        })
    }
}

/// Errors from cohort evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalError {
    EmptyCohort,
    /// No user in the cohort has a reported home.
    NoGroundTruth,
    /// Thresholds must be positive, finite, and strictly increasing.
    InvalidThresholds,
    EmptyErrors,
    /// CDF resolution must be at least 2.
    InvalidResolution,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            EvalError::EmptyCohort => "cohort is empty",
            EvalError::NoGroundTruth => "no user has a reported home",
            EvalError::InvalidThresholds => {
                "thresholds must be positive, finite, and strictly increasing"
            }
            EvalError::EmptyErrors => "no errors to summarize",
            EvalError::InvalidResolution => "cdf resolution must be at least 2",
        };
        f.write_str(msg)
    }
}

impl core::error::Error for EvalError {}

/// Runs the predictor over every user, using each user's reported home as
/// ground truth. Users without a home or failing the predictor's
/// preconditions are recorded as failures with their reason.
pub fn evaluate_cohort(
    users: &[UserDataset],
    config: &PredictorConfig,
    thresholds: &[f64],
) -> Result<EvalReport, EvalError> {
    if users.is_empty() {
        return Err(EvalError::EmptyCohort);
    }
    let increasing = thresholds.windows(2).all(|w| w[0] < w[1]);
    if !increasing || thresholds.iter().any(|t| !t.is_finite() || *t <= 0.0) {
        return Err(EvalError::InvalidThresholds);
    }
    if users.iter().all(|u| u.reported_home().is_none()) {
        return Err(EvalError::NoGroundTruth);
    }

    let mut per_user = Vec::new();
    let mut failures = Vec::new();
    for user in users {
        let Some(home) = user.reported_home() else {
            failures.push(EvalFailure {
                user_id: String::from(user.owner_id()),
                reason: String::from("no reported home"),
            });
            continue;
        };
        match predict_hometown(user.photos(), config, Some(home)) {
            Ok(result) => per_user.push(PerUserResult {
                user_id: String::from(user.owner_id()),
                error_km: result
                    .error_km
                    .expect("error is present when truth is supplied"),
                n_photos: user.photos().len(),
                chosen_cluster_size: result.chosen_cluster.size,
            }),
            Err(e) => failures.push(EvalFailure {
                user_id: String::from(user.owner_id()),
                reason: format!("{e}"),
            }),
        }
    }
    per_user.sort_by(|a, b| a.user_id.cmp(&b.user_id));
    failures.sort_by(|a, b| a.user_id.cmp(&b.user_id));

    let errors: Vec<f64> = per_user.iter().map(|r| r.error_km).collect();
    let cdf = if errors.is_empty() {
        Vec::new()
    } else {
        error_cdf(&errors, CDF_RESOLUTION).expect("non-empty errors and resolution >= 2")
    };
    let fraction_within = thresholds
        .iter()
        .map(|&t| {
            let fraction = if errors.is_empty() {
                0.0
            } else {
                errors.iter().filter(|&&e| e <= t).count() as f64 / errors.len() as f64
            };
            (t, fraction)
        })
        .collect();

    Ok(EvalReport {
        per_user,
        cdf,
        fraction_within,
        failures,
    })
}

/// Empirical CDF of `errors` sampled at `resolution` evenly spaced points
/// spanning `[0, max error]`, right-continuous (fraction of values `<= x`).
pub fn error_cdf(errors: &[f64], resolution: usize) -> Result<Vec<(f64, f64)>, EvalError> {
    if errors.is_empty() {
        return Err(EvalError::EmptyErrors);
    }
    if resolution < 2 {
        return Err(EvalError::InvalidResolution);
    }
    let mut sorted: Vec<f64> = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let max = *sorted.last().expect("non-empty");
    let n = sorted.len() as f64;
    Ok((0..resolution)
        .map(|i| {
            let x = max * (i as f64 / (resolution - 1) as f64);
            let below = sorted.partition_point(|&e| e <= x);
            (x, below as f64 / n)
        })
        .collect())
}
