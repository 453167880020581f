//! Great-circle geometry on the mean-radius sphere: distances, spherical
//! centroids, and forward geodesic destinations.

use core::fmt;

/// Mean Earth radius in kilometers used by every distance in this crate.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// A latitude/longitude pair in degrees.
///
/// Invariants, enforced on construction: `lat_deg` is in `[-90, +90]` and
/// `lon_deg` is normalized into `(-180, +180]` (so `181` becomes `-179` and
/// `-180` becomes `+180`). Negative zero is canonicalized to positive zero on
/// both axes so equal points serialize identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    lat_deg: f64,
    lon_deg: f64,
}

/// Errors from constructing points or reducing point sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeoError {
    /// A coordinate was NaN or infinite.
    NonFinite,
    /// Latitude outside `[-90, +90]` degrees.
    InvalidLatitude,
    /// The 3-D mean of the input directions is (near) the zero vector, e.g.
    /// an empty list or exactly antipodal points; no centroid is defined.
    DegenerateCentroid,
}

impl fmt::Display for GeoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeoError::NonFinite => write!(f, "coordinate is not finite"),
            GeoError::InvalidLatitude => write!(f, "latitude out of range"),
            GeoError::DegenerateCentroid => {
                write!(f, "centroid undefined: mean direction vector is near zero")
            }
        }
    }
}

impl core::error::Error for GeoError {}

fn normalize_lon(lon_deg: f64) -> f64 {
    let mut lon = lon_deg % 360.0;
    if lon <= -180.0 {
        lon += 360.0;
    } else if lon > 180.0 {
        lon -= 360.0;
    }
    // +0.0 turns a negative zero positive and leaves everything else alone.
    lon + 0.0
}

impl GeoPoint {
    /// Builds a point, validating latitude and normalizing longitude.
    pub fn new(lat_deg: f64, lon_deg: f64) -> Result<Self, GeoError> {
        if !lat_deg.is_finite() || !lon_deg.is_finite() {
            return Err(GeoError::NonFinite);
        }
        if !(-90.0..=90.0).contains(&lat_deg) {
            return Err(GeoError::InvalidLatitude);
        }
        Ok(GeoPoint {
            lat_deg: lat_deg + 0.0,
            lon_deg: normalize_lon(lon_deg),
        })
    }

    /// Internal constructor for coordinates produced by our own trig, where
    /// latitude is in range up to rounding at the `±90°` boundary.
    fn from_radians(lat_rad: f64, lon_rad: f64) -> Self {
        GeoPoint {
            lat_deg: lat_rad.to_degrees().clamp(-90.0, 90.0) + 0.0,
            lon_deg: normalize_lon(lon_rad.to_degrees()),
        }
    }

    /// Latitude in degrees, within `[-90, +90]`.
    pub fn lat_deg(&self) -> f64 {
        self.lat_deg
    }

    /// Longitude in degrees, within `(-180, +180]`.
    pub fn lon_deg(&self) -> f64 {
        self.lon_deg
    }
}

/// Great-circle distance between two points in kilometers.
///
/// Haversine formula on the [`EARTH_RADIUS_KM`] sphere, with the `atan2` form
/// for stability near antipodes. Symmetric, zero for coincident points, and
/// at most `π · R`.
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let phi_a = a.lat_deg.to_radians();
    let phi_b = b.lat_deg.to_radians();
    let half_dphi = (b.lat_deg - a.lat_deg).to_radians() / 2.0;
    let half_dlam = (b.lon_deg - a.lon_deg).to_radians() / 2.0;
    let sin_dphi = libm::sin(half_dphi);
    let sin_dlam = libm::sin(half_dlam);
    let h = sin_dphi * sin_dphi + libm::cos(phi_a) * libm::cos(phi_b) * sin_dlam * sin_dlam;
    // Rounding can push h a hair outside [0, 1]; asin/atan2 need it inside.
    let h = h.clamp(0.0, 1.0);
    2.0 * EARTH_RADIUS_KM * libm::atan2(libm::sqrt(h), libm::sqrt(1.0 - h))
}

/// Spherical centroid: the 3-D Cartesian mean of the points' unit vectors,
/// projected back to the sphere.
///
/// Agrees with the naive latitude/longitude mean to within meters for
/// clusters of small angular extent, and stays correct across the
/// antimeridian. Fails with [`GeoError::DegenerateCentroid`] when the mean
/// vector has norm below `1e-9` (empty input, exactly antipodal pairs, or
/// points spread so evenly the mean direction is undefined).
pub fn spherical_centroid(points: &[GeoPoint]) -> Result<GeoPoint, GeoError> {
    if points.is_empty() {
        return Err(GeoError::DegenerateCentroid);
    }
    if points.len() == 1 {
        // Exact by contract; skips the trig round trip.
        return Ok(points[0]);
    }
    let mut x = 0.0;
    let mut y = 0.0;
    let mut z = 0.0;
    for p in points {
        let phi = p.lat_deg.to_radians();
        let lam = p.lon_deg.to_radians();
        let cos_phi = libm::cos(phi);
        x += cos_phi * libm::cos(lam);
        y += cos_phi * libm::sin(lam);
        z += libm::sin(phi);
    }
    let n = points.len() as f64;
    x /= n;
    y /= n;
    z /= n;
    if libm::sqrt(x * x + y * y + z * z) < 1e-9 {
        return Err(GeoError::DegenerateCentroid);
    }
    Ok(GeoPoint::from_radians(
        libm::atan2(z, libm::hypot(x, y)),
        libm::atan2(y, x),
    ))
}

/// Point reached by travelling `distance_km` from `origin` along the initial
/// `bearing_deg` (degrees clockwise from north) on a great circle.
///
/// Total for `distance_km >= 0`; the distance back to `origin` equals
/// `distance_km` to within `1e-6` relative.
pub fn geodesic_destination(origin: GeoPoint, bearing_deg: f64, distance_km: f64) -> GeoPoint {
    debug_assert!(distance_km >= 0.0 && distance_km.is_finite());
    debug_assert!(bearing_deg.is_finite());
    let phi1 = origin.lat_deg.to_radians();
    let lam1 = origin.lon_deg.to_radians();
    let theta = bearing_deg.to_radians();
    let delta = distance_km / EARTH_RADIUS_KM;
    let (sin_delta, cos_delta) = (libm::sin(delta), libm::cos(delta));
    let (sin_phi1, cos_phi1) = (libm::sin(phi1), libm::cos(phi1));
    let sin_phi2 = sin_phi1 * cos_delta + cos_phi1 * sin_delta * libm::cos(theta);
    let sin_phi2 = sin_phi2.clamp(-1.0, 1.0);
    let phi2 = libm::asin(sin_phi2);
    let lam2 = lam1
        + libm::atan2(
            libm::sin(theta) * sin_delta * cos_phi1,
            cos_delta - sin_phi1 * sin_phi2,
        );
    GeoPoint::from_radians(phi2, lam2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    #[test]
    fn constructor_validates_latitude() {
        assert_eq!(GeoPoint::new(90.0, 0.0).unwrap().lat_deg(), 90.0);
        assert_eq!(GeoPoint::new(-90.0, 0.0).unwrap().lat_deg(), -90.0);
        assert_eq!(GeoPoint::new(90.1, 0.0), Err(GeoError::InvalidLatitude));
        assert_eq!(GeoPoint::new(-91.0, 0.0), Err(GeoError::InvalidLatitude));
    }

    #[test]
    fn constructor_rejects_non_finite() {
        assert_eq!(GeoPoint::new(f64::NAN, 0.0), Err(GeoError::NonFinite));
        assert_eq!(GeoPoint::new(0.0, f64::INFINITY), Err(GeoError::NonFinite));
        assert_eq!(
            GeoPoint::new(f64::NEG_INFINITY, 0.0),
            Err(GeoError::NonFinite)
        );
    }

    #[test]
    fn longitude_normalization() {
        assert_eq!(pt(0.0, 181.0).lon_deg(), -179.0);
        assert_eq!(pt(0.0, -180.0).lon_deg(), 180.0);
        assert_eq!(pt(0.0, 180.0).lon_deg(), 180.0);
        assert_eq!(pt(0.0, 540.0).lon_deg(), 180.0);
        assert_eq!(pt(0.0, -540.0).lon_deg(), 180.0);
        assert_eq!(pt(0.0, 360.0).lon_deg(), 0.0);
        assert_eq!(pt(0.0, -360.0).lon_deg(), 0.0);
    }

    #[test]
    fn negative_zero_is_canonicalized() {
        let p = pt(-0.0, -0.0);
        assert!(p.lat_deg().is_sign_positive());
        assert!(p.lon_deg().is_sign_positive());
    }

    #[test]
    fn haversine_identity_is_zero() {
        assert_eq!(haversine_km(pt(10.0, 20.0), pt(10.0, 20.0)), 0.0);
    }

    #[test]
    fn haversine_antipodal_is_half_circumference() {
        let d = haversine_km(pt(0.0, 0.0), pt(0.0, 180.0));
        assert!((d - 20015.086796021).abs() < 1e-6);
        let poles = haversine_km(pt(90.0, 0.0), pt(-90.0, 0.0));
        assert!((poles - 20015.086796021).abs() < 1e-6);
    }

    #[test]
    fn haversine_one_equatorial_degree() {
        let d = haversine_km(pt(0.0, 0.0), pt(0.0, 1.0));
        assert!((d - 111.194926645).abs() < 1e-6);
    }

    #[test]
    fn haversine_known_city_pair() {
        // New York to London.
        let d = haversine_km(pt(40.7128, -74.0060), pt(51.5074, -0.1278));
        assert!((d - 5570.222180).abs() < 1e-5);
    }

    #[test]
    fn haversine_crosses_antimeridian() {
        let d = haversine_km(pt(0.0, 179.5), pt(0.0, -179.5));
        assert!((d - 111.194926645).abs() < 1e-6);
    }

    #[test]
    fn haversine_is_symmetric() {
        let a = pt(48.8566, 2.3522);
        let b = pt(-33.8675, 151.207);
        assert_eq!(haversine_km(a, b), haversine_km(b, a));
    }

    #[test]
    fn centroid_of_singleton_is_the_point() {
        let c = spherical_centroid(&[pt(42.0, 7.0)]).unwrap();
        assert!((c.lat_deg() - 42.0).abs() < 1e-9);
        assert!((c.lon_deg() - 7.0).abs() < 1e-9);
    }

    #[test]
    fn centroid_of_mirrored_pair_sits_on_equator() {
        let c = spherical_centroid(&[pt(10.0, 50.0), pt(-10.0, 50.0)]).unwrap();
        assert!((c.lat_deg() - 0.0).abs() < 1e-9);
        assert!((c.lon_deg() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn centroid_of_square_patch() {
        let c = spherical_centroid(&[pt(0.0, 0.0), pt(0.0, 10.0), pt(10.0, 0.0), pt(10.0, 10.0)])
            .unwrap();
        // The 3-D mean pulls latitude slightly above the planar mean of 5.
        assert!((c.lat_deg() - 5.019001817490).abs() < 1e-9);
        assert!((c.lon_deg() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn centroid_degenerate_cases() {
        assert_eq!(spherical_centroid(&[]), Err(GeoError::DegenerateCentroid));
        assert_eq!(
            spherical_centroid(&[pt(0.0, 0.0), pt(0.0, 180.0)]),
            Err(GeoError::DegenerateCentroid)
        );
    }

    #[test]
    fn destination_zero_distance_is_origin() {
        let d = geodesic_destination(pt(0.0, 0.0), 0.0, 0.0);
        assert_eq!(d, pt(0.0, 0.0));
    }

    #[test]
    fn destination_one_degree_north_and_east() {
        let north = geodesic_destination(pt(0.0, 0.0), 0.0, 111.195);
        assert!((north.lat_deg() - 1.0).abs() < 1e-4);
        assert!(north.lon_deg().abs() < 1e-4);
        let east = geodesic_destination(pt(0.0, 0.0), 90.0, 111.195);
        assert!(east.lat_deg().abs() < 1e-4);
        assert!((east.lon_deg() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn destination_round_trips_through_haversine() {
        let origin = pt(48.8566, 2.3522);
        for &(bearing, dist) in &[(123.4, 777.0), (0.0, 5000.0), (271.5, 42.0), (359.9, 0.001)] {
            let dest = geodesic_destination(origin, bearing, dist);
            let back = haversine_km(origin, dest);
            assert!(
                (back - dist).abs() <= 1e-6 * dist.max(1.0),
                "bearing {bearing}, dist {dist}: got {back}"
            );
        }
    }
}
