//! Core pipeline for inferring a user's home location from geotagged photos.
//!
//! The estimate works in three stages: build the minimum spanning tree of a
//! user's photo locations under great-circle distance ([`mst`]), cut it into
//! clusters and take the cluster holding the most photos ([`predict`]), and
//! report that cluster's spherical centroid as the home. Around that sit a
//! power-law model of photo-to-home distances ([`distribution`]), a synthetic
//! cohort generator reproducing that regime ([`synth`]), and a batch
//! evaluation harness ([`eval`]).
//!
//! The crate is `no_std` (with `alloc`); all floating-point math goes through
//! `libm` so results are identical across platforms. File formats and the
//! command-line frontend live in the companion `hometown-cli` crate.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod distribution;
pub mod eval;
pub mod geo;
pub mod mst;
pub mod photo;
pub mod predict;
pub mod synth;

pub use geo::GeoPoint;
