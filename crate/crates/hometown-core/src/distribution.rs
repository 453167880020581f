//! Photo-to-home distance analysis: distance extraction, density-normalized
//! histograms for plotting, and power-law exponent estimation.

use alloc::vec::Vec;
use core::fmt;

use crate::geo::{haversine_km, GeoPoint};
use crate::photo::PhotoRecord;

/// A fitted power law `density ∝ d^(-exponent)` above `x_min_km`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    /// Reported positive; the continuous MLE guarantees `exponent > 1`
    /// whenever any sample exceeds `x_min_km`. The least-squares variant can
    /// in principle dip lower on pathological data.
    pub exponent: f64,
    pub x_min_km: f64,
    /// Number of samples at or above the cutoff.
    pub n_tail: usize,
    /// Pareto log-likelihood of the tail at the fitted exponent.
    pub log_likelihood: f64,
}

/// Linear or logarithmic bin spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistogramScale {
    Linear,
    Log,
}

/// A density-normalized histogram: `sum(density * bin_width) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramSeries {
    /// Strictly increasing; one more edge than bins.
    pub bin_edges: Vec<f64>,
    /// Probability density per bin.
    pub densities: Vec<f64>,
    /// Raw counts per bin.
    pub counts: Vec<usize>,
    pub scale: HistogramScale,
}

/// Errors from fitting and histogram construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionError {
    /// `x_min` must be positive and finite.
    NonPositiveCutoff,
    /// Fewer than 2 samples strictly above `x_min`.
    InsufficientTail,
    EmptySamples,
    /// Histogram samples must be finite and non-negative.
    InvalidSample,
    /// Log-scale histograms need strictly positive samples.
    NonPositiveSampleInLogScale,
    /// `bins` must be at least 1.
    InvalidBins,
    /// Too little spread in the tail for a least-squares fit.
    DegenerateFit,
}

impl fmt::Display for DistributionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            DistributionError::NonPositiveCutoff => "x_min must be positive and finite",
            DistributionError::InsufficientTail => {
                "need at least 2 samples strictly greater than x_min"
            }
            DistributionError::EmptySamples => "no samples",
            DistributionError::InvalidSample => "samples must be finite and non-negative",
            DistributionError::NonPositiveSampleInLogScale => {
                "log-scale histogram requires strictly positive samples"
            }
            DistributionError::InvalidBins => "bin count must be at least 1",
            DistributionError::DegenerateFit => {
                "tail has too little spread for a least-squares fit"
            }
        };
        f.write_str(msg)
    }
}

impl core::error::Error for DistributionError {}

/// Distance from each photo to `home`, in kilometers, order-preserving.
pub fn distances_from_home(photos: &[PhotoRecord], home: GeoPoint) -> Vec<f64> {
    photos
        .iter()
        .map(|p| haversine_km(p.location, home))
        .collect()
}

/// Pareto log-likelihood of a tail with `n` samples and `sum_log` total
/// `ln(sample / x_min)`, evaluated at `exponent`.
fn pareto_log_likelihood(n: usize, sum_log: f64, x_min_km: f64, exponent: f64) -> f64 {
    let n = n as f64;
    n * (libm::log(exponent - 1.0) - libm::log(x_min_km)) - exponent * sum_log
}

/// Continuous maximum-likelihood power-law fit over samples `>= x_min_km`:
/// `exponent = 1 + n_tail / Σ ln(sample / x_min)`.
///
/// Samples below the cutoff are excluded (zero distances never reach the
/// logarithm); non-finite samples are treated as below-cutoff. Requires at
/// least two samples strictly above the cutoff so the denominator is
/// positive.
pub fn fit_power_law_mle(samples: &[f64], x_min_km: f64) -> Result<PowerLawFit, DistributionError> {
    if !x_min_km.is_finite() || x_min_km <= 0.0 {
        return Err(DistributionError::NonPositiveCutoff);
    }
    let mut n_tail = 0usize;
    let mut strictly_above = 0usize;
    let mut sum_log = 0.0;
    for &s in samples {
        if s >= x_min_km && s.is_finite() {
            n_tail += 1;
            if s > x_min_km {
                strictly_above += 1;
            }
            sum_log += libm::log(s / x_min_km);
        }
    }
    if strictly_above < 2 {
        return Err(DistributionError::InsufficientTail);
    }
    let exponent = 1.0 + n_tail as f64 / sum_log;
    Ok(PowerLawFit {
        exponent,
        x_min_km,
        n_tail,
        log_likelihood: pareto_log_likelihood(n_tail, sum_log, x_min_km, exponent),
    })
}

/// Least-squares power-law fit on the log-log histogram of the tail, for
/// comparison against Fig.-1-style regressions. The MLE variant is the
/// authoritative estimator; log-binned least squares is known to be biased.
pub fn fit_power_law_log_binned(
    samples: &[f64],
    x_min_km: f64,
    bins: usize,
) -> Result<PowerLawFit, DistributionError> {
    if !x_min_km.is_finite() || x_min_km <= 0.0 {
        return Err(DistributionError::NonPositiveCutoff);
    }
    if bins < 1 {
        return Err(DistributionError::InvalidBins);
    }
    let tail: Vec<f64> = samples
        .iter()
        .copied()
        .filter(|&s| s.is_finite() && s >= x_min_km)
        .collect();
    let strictly_above = tail.iter().filter(|&&s| s > x_min_km).count();
    if strictly_above < 2 {
        return Err(DistributionError::InsufficientTail);
    }
    let hist = histogram(&tail, bins, HistogramScale::Log)?;
    // Least squares of ln(density) against ln(bin center) over occupied bins.
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (b, &count) in hist.counts.iter().enumerate() {
        if count > 0 {
            let center = libm::sqrt(hist.bin_edges[b] * hist.bin_edges[b + 1]);
            xs.push(libm::log(center));
            ys.push(libm::log(hist.densities[b]));
        }
    }
    if xs.len() < 2 {
        return Err(DistributionError::DegenerateFit);
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        cov += (x - mean_x) * (y - mean_y);
        var += (x - mean_x) * (x - mean_x);
    }
    if var == 0.0 {
        return Err(DistributionError::DegenerateFit);
    }
    let exponent = -(cov / var);
    let n_tail = tail.len();
    let sum_log: f64 = tail.iter().map(|&s| libm::log(s / x_min_km)).sum();
    Ok(PowerLawFit {
        exponent,
        x_min_km,
        n_tail,
        log_likelihood: pareto_log_likelihood(n_tail, sum_log, x_min_km, exponent),
    })
}

/// Density-normalized histogram over `[min, max]` of the samples, with
/// equal-width bins (linear scale) or log-spaced bins (log scale, positive
/// samples only).
///
/// When all samples coincide the range is degenerate; the convention is
/// `[x - 0.5, x + 0.5]` for linear bins and `[x / 2, 2x]` for log bins. The
/// final bin's upper edge is inclusive.
pub fn histogram(
    samples: &[f64],
    bins: usize,
    scale: HistogramScale,
) -> Result<HistogramSeries, DistributionError> {
    if samples.is_empty() {
        return Err(DistributionError::EmptySamples);
    }
    if bins < 1 {
        return Err(DistributionError::InvalidBins);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &s in samples {
        if !s.is_finite() || s < 0.0 {
            return Err(DistributionError::InvalidSample);
        }
        if scale == HistogramScale::Log && s == 0.0 {
            return Err(DistributionError::NonPositiveSampleInLogScale);
        }
        lo = lo.min(s);
        hi = hi.max(s);
    }
    if lo == hi {
        match scale {
            HistogramScale::Linear => {
                lo -= 0.5;
                hi += 0.5;
            }
            HistogramScale::Log => {
                lo /= 2.0;
                hi *= 2.0;
            }
        }
    }
    let bin_edges: Vec<f64> = match scale {
        HistogramScale::Linear => (0..=bins)
            .map(|b| lo + (hi - lo) * b as f64 / bins as f64)
            .collect(),
        HistogramScale::Log => {
            let (log_lo, log_hi) = (libm::log(lo), libm::log(hi));
            let mut edges: Vec<f64> = (0..=bins)
                .map(|b| libm::exp(log_lo + (log_hi - log_lo) * b as f64 / bins as f64))
                .collect();
            // Pin the outer edges so rounding cannot exclude min or max.
            edges[0] = lo;
            edges[bins] = hi;
            edges
        }
    };
    let mut counts = alloc::vec![0usize; bins];
    for &s in samples {
        let guess = match scale {
            HistogramScale::Linear => ((s - lo) / (hi - lo) * bins as f64) as usize,
            HistogramScale::Log => {
                (((libm::log(s) - libm::log(lo)) / (libm::log(hi) - libm::log(lo)))
                    * bins as f64) as usize
            }
        };
        let mut b = guess.min(bins - 1);
        // Settle against the stored edges so every sample lands in exactly
        // one bin regardless of floating-point rounding in the guess.
        while b > 0 && s < bin_edges[b] {
            b -= 1;
        }
        while b + 1 < bins && s >= bin_edges[b + 1] {
            b += 1;
        }
        counts[b] += 1;
    }
    let total = samples.len() as f64;
    let densities: Vec<f64> = counts
        .iter()
        .enumerate()
        .map(|(b, &c)| c as f64 / (total * (bin_edges[b + 1] - bin_edges[b])))
        .collect();
    Ok(HistogramSeries {
        bin_edges,
        densities,
        counts,
        scale,
    })
}
