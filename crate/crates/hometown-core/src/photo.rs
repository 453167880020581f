//! Photo records, per-user datasets, and grouping of raw records by owner.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::geo::GeoPoint;

/// A capture time in seconds since the Unix epoch.
///
/// Sources without timezone information (e.g. Flickr's `datetaken`) are
/// stored as if UTC with `tz_unknown` set, rather than silently guessed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PhotoTimestamp {
    pub epoch_seconds: i64,
    pub tz_unknown: bool,
}

/// One geotagged photo.
///
/// `photo_id` and `owner_id` are expected to be non-empty; parsers enforce
/// this at the input boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotoRecord {
    pub photo_id: String,
    pub owner_id: String,
    pub location: GeoPoint,
    pub taken_at: Option<PhotoTimestamp>,
}

/// One user's photos plus optional ground-truth home.
///
/// Construction validates that every photo belongs to the owner and derives
/// the capture window, so a `UserDataset` is internally consistent by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UserDataset {
    owner_id: String,
    photos: Vec<PhotoRecord>,
    reported_home: Option<GeoPoint>,
    window: Option<(PhotoTimestamp, PhotoTimestamp)>,
}

/// Errors from assembling a [`UserDataset`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetError {
    /// A photo's `owner_id` differs from the dataset's.
    OwnerMismatch {
        expected: String,
        found: String,
        index: usize,
    },
}

impl fmt::Display for DatasetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetError::OwnerMismatch {
                expected,
                found,
                index,
            } => write!(
                f,
                "photo {index} belongs to '{found}', not dataset owner '{expected}'"
            ),
        }
    }
}

impl core::error::Error for DatasetError {}

impl UserDataset {
    /// Builds a dataset, checking ownership and deriving the capture window
    /// from whatever timestamps are present.
    pub fn new(
        owner_id: String,
        photos: Vec<PhotoRecord>,
        reported_home: Option<GeoPoint>,
    ) -> Result<Self, DatasetError> {
        for (index, photo) in photos.iter().enumerate() {
            if photo.owner_id != owner_id {
                return Err(DatasetError::OwnerMismatch {
                    expected: owner_id,
                    found: photo.owner_id.clone(),
                    index,
                });
            }
        }
        let window = derive_window(&photos);
        Ok(UserDataset {
            owner_id,
            photos,
            reported_home,
            window,
        })
    }

    pub fn owner_id(&self) -> &str {
        &self.owner_id
    }

    pub fn photos(&self) -> &[PhotoRecord] {
        &self.photos
    }

    pub fn reported_home(&self) -> Option<GeoPoint> {
        self.reported_home
    }

    /// Earliest and latest capture times over photos that have one; `None`
    /// when no photo carries a timestamp.
    pub fn window(&self) -> Option<(PhotoTimestamp, PhotoTimestamp)> {
        self.window
    }
}

fn derive_window(photos: &[PhotoRecord]) -> Option<(PhotoTimestamp, PhotoTimestamp)> {
    let mut bounds: Option<(PhotoTimestamp, PhotoTimestamp)> = None;
    for t in photos.iter().filter_map(|p| p.taken_at) {
        bounds = Some(match bounds {
            None => (t, t),
            Some((lo, hi)) => (lo.min(t), hi.max(t)),
        });
    }
    bounds
}

/// Groups records into one dataset per distinct owner, photos kept in input
/// order, datasets ordered by `owner_id`. Homes are attached from the map
/// where present.
pub fn group_by_owner(
    records: Vec<PhotoRecord>,
    homes: Option<&BTreeMap<String, GeoPoint>>,
) -> Vec<UserDataset> {
    let mut grouped: BTreeMap<String, Vec<PhotoRecord>> = BTreeMap::new();
    for record in records {
        grouped
            .entry(record.owner_id.clone())
            .or_default()
            .push(record);
    }
    grouped
        .into_iter()
        .map(|(owner_id, photos)| {
            let home = homes.and_then(|m| m.get(&owner_id).copied());
            UserDataset::new(owner_id, photos, home)
                .expect("grouping by owner cannot mix owners")
        })
        .collect()
}
