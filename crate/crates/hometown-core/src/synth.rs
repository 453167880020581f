//! Synthetic mobility cohorts: users whose photo geography mixes a
//! power-law cloud around home with a few distant travel clusters.
//!
//! Generation is bit-reproducible: each user gets an independent ChaCha8
//! stream seeded with `seed ^ user_index`, every draw site is fixed, and all
//! math goes through `libm`. The draw order per user is: home latitude,
//! home longitude, then per travel center (distance, bearing), then per
//! photo a mixture coin followed by the branch's draws (home: radial
//! distance, bearing; travel: center choice, radial distance, bearing).
//! Unit doubles take the top 53 bits of `next_u64`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::geo::{geodesic_destination, GeoPoint};
use crate::photo::PhotoRecord;

/// Parameters of the home/travel mixture model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    /// Photos per user.
    pub n_photos: usize,
    /// Probability a photo is generated around home, in `[0, 1]`.
    pub home_fraction: f64,
    /// Power-law exponent of radial jumps from home; must exceed 1.
    pub exponent: f64,
    /// Minimum home jump in km; must be positive and below `r_cap_km`.
    pub x_min_km: f64,
    /// Truncation radius of home jumps in km.
    pub r_cap_km: f64,
    /// Number of travel clusters.
    pub n_travel_clusters: usize,
    /// Radius around a travel center within which its photos fall, km.
    pub travel_spread_km: f64,
    /// Travel-center distance range from home, km.
    pub travel_min_km: f64,
    pub travel_max_km: f64,
    /// Base RNG seed; users derive independent streams from it.
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n_photos: 685,
            home_fraction: 0.8,
            exponent: 2.38,
            x_min_km: 0.5,
            r_cap_km: 50.0,
            n_travel_clusters: 3,
            travel_spread_km: 30.0,
            travel_min_km: 500.0,
            travel_max_km: 10_000.0,
            seed: 42,
        }
    }
}

/// Errors from invalid generator parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthError {
    InvalidParams(&'static str),
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::InvalidParams(reason) => write!(f, "invalid parameters: {reason}"),
        }
    }
}

impl core::error::Error for SynthError {}

impl SynthParams {
    /// Checks every invariant the generator relies on.
    pub fn validate(&self) -> Result<(), SynthError> {
        let finite = [
            self.home_fraction,
            self.exponent,
            self.x_min_km,
            self.r_cap_km,
            self.travel_spread_km,
            self.travel_min_km,
            self.travel_max_km,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(SynthError::InvalidParams("parameters must be finite"));
        }
        if !(0.0..=1.0).contains(&self.home_fraction) {
            return Err(SynthError::InvalidParams("home_fraction must be in [0, 1]"));
        }
        if self.exponent <= 1.0 {
            return Err(SynthError::InvalidParams("exponent must exceed 1"));
        }
        if self.x_min_km <= 0.0 || self.x_min_km >= self.r_cap_km {
            return Err(SynthError::InvalidParams(
                "need 0 < x_min_km < r_cap_km",
            ));
        }
        if self.travel_min_km < 0.0 || self.travel_min_km >= self.travel_max_km {
            return Err(SynthError::InvalidParams(
                "need 0 <= travel_min_km < travel_max_km",
            ));
        }
        if self.travel_spread_km < 0.0 {
            return Err(SynthError::InvalidParams(
                "travel_spread_km must be non-negative",
            ));
        }
        if self.home_fraction < 1.0 && self.n_travel_clusters == 0 {
            return Err(SynthError::InvalidParams(
                "travel photos are possible but there are no travel clusters",
            ));
        }
        Ok(())
    }
}

/// Where a synthetic photo was generated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhotoOrigin {
    Home,
    /// Index into the user's travel centers.
    Travel(usize),
}

/// A generated user with full provenance: the true home, the travel centers,
/// and each photo's origin, so tests can check support bounds and fit the
/// home-distance distribution without guessing which photos were which.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticUser {
    pub user_id: String,
    pub true_home: GeoPoint,
    pub travel_centers: Vec<GeoPoint>,
    pub photos: Vec<PhotoRecord>,
    /// Parallel to `photos`.
    pub origins: Vec<PhotoOrigin>,
}

/// A uniform double in `[0, 1)` from the top 53 bits of one `next_u64`.
fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse CDF of the Pareto density `∝ x^(-exponent)` restricted to
/// `[x_min_km, r_cap_km]`, evaluated at `u ∈ [0, 1]`: maps 0 to `x_min_km`
/// and 1 to `r_cap_km`.
pub fn truncated_pareto_quantile(u: f64, exponent: f64, x_min_km: f64, r_cap_km: f64) -> f64 {
    let one_minus = 1.0 - exponent;
    let lo = libm::pow(x_min_km, one_minus);
    let hi = libm::pow(r_cap_km, one_minus);
    libm::pow(lo - u * (lo - hi), 1.0 / one_minus)
}

/// One truncated-Pareto radial jump; deterministic given the RNG state.
pub fn sample_truncated_pareto(
    rng: &mut impl RngCore,
    exponent: f64,
    x_min_km: f64,
    r_cap_km: f64,
) -> Result<f64, SynthError> {
    if !(exponent.is_finite() && x_min_km.is_finite() && r_cap_km.is_finite()) {
        return Err(SynthError::InvalidParams("parameters must be finite"));
    }
    if exponent <= 1.0 {
        return Err(SynthError::InvalidParams("exponent must exceed 1"));
    }
    if x_min_km <= 0.0 || x_min_km >= r_cap_km {
        return Err(SynthError::InvalidParams("need 0 < x_min_km < r_cap_km"));
    }
    Ok(truncated_pareto_quantile(
        unit_f64(rng),
        exponent,
        x_min_km,
        r_cap_km,
    ))
}

/// Generates one user deterministically from `(params.seed, user_index)`.
///
/// The home is uniform by area over the sphere's latitude band
/// `[-60°, +60°]` (uniform in the sine of latitude, so polar regions are
/// not over-weighted); travel centers sit at uniform distances in
/// `[travel_min_km, travel_max_km]` and uniform bearings from home.
pub fn generate_user(params: &SynthParams, user_index: usize) -> Result<SyntheticUser, SynthError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ user_index as u64);

    let band = libm::sin(60.0_f64.to_radians());
    let sin_lat = -band + 2.0 * band * unit_f64(&mut rng);
    let lat = libm::asin(sin_lat.clamp(-1.0, 1.0)).to_degrees();
    let lon = 180.0 - 360.0 * unit_f64(&mut rng);
    let true_home = GeoPoint::new(lat, lon).expect("band latitude and wrapped longitude are valid");

    let mut travel_centers = Vec::with_capacity(params.n_travel_clusters);
    for _ in 0..params.n_travel_clusters {
        let distance = params.travel_min_km
            + (params.travel_max_km - params.travel_min_km) * unit_f64(&mut rng);
        let bearing = 360.0 * unit_f64(&mut rng);
        travel_centers.push(geodesic_destination(true_home, bearing, distance));
    }

    let user_id = format!("u{user_index:04}");
    let mut photos = Vec::with_capacity(params.n_photos);
    let mut origins = Vec::with_capacity(params.n_photos);
    for p in 0..params.n_photos {
        let coin = unit_f64(&mut rng);
        let (location, origin) = if coin < params.home_fraction {
            let radial = sample_truncated_pareto(
                &mut rng,
                params.exponent,
                params.x_min_km,
                params.r_cap_km,
            )?;
            let bearing = 360.0 * unit_f64(&mut rng);
            (
                geodesic_destination(true_home, bearing, radial),
                PhotoOrigin::Home,
            )
        } else {
            let pick = unit_f64(&mut rng) * params.n_travel_clusters as f64;
            let center = (pick as usize).min(params.n_travel_clusters - 1);
            let radial = params.travel_spread_km * unit_f64(&mut rng);
            let bearing = 360.0 * unit_f64(&mut rng);
            (
                geodesic_destination(travel_centers[center], bearing, radial),
                PhotoOrigin::Travel(center),
            )
        };
        photos.push(PhotoRecord {
            photo_id: format!("{user_id}-p{p:05}"),
            owner_id: user_id.clone(),
            location,
            taken_at: None,
        });
        origins.push(origin);
    }

    Ok(SyntheticUser {
        user_id,
        true_home,
        travel_centers,
        photos,
        origins,
    })
}

/// Generates `n_users` users with independent, order-independent streams
/// (user `i` is seeded with `seed ^ i`), so the cohort is reproducible
/// whether generated together or one user at a time.
pub fn generate_cohort(
    params: &SynthParams,
    n_users: usize,
) -> Result<Vec<SyntheticUser>, SynthError> {
    params.validate()?;
    (0..n_users).map(|i| generate_user(params, i)).collect()
}
