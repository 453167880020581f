//! Round-trip stability of the CSV serializers: after one normalization
//! pass (UTC folding, longitude wrapping, shortest-float printing), write
//! and parse are exact inverses.

use std::collections::BTreeMap;

use hometown_cli::formats::{
    parse_homes_csv, parse_photos_csv, write_homes_csv, write_photos_csv, ParseMode,
};
use hometown_core::photo::{PhotoRecord, PhotoTimestamp};
use hometown_core::GeoPoint;
use proptest::prelude::*;

// Includes commas and quotes so the writer's CSV escaping is exercised.
const ID_PATTERN: &str = "[a-z0-9_.@,\"-]{1,12}";

fn arb_record() -> impl Strategy<Value = PhotoRecord> {
    (
        ID_PATTERN,
        ID_PATTERN,
        -90.0f64..=90.0,
        -180.0f64..180.0,
        prop::option::of((-2_000_000_000i64..=2_000_000_000, any::<bool>())),
    )
        .prop_map(|(photo_id, owner_id, lat, lon, ts)| PhotoRecord {
            photo_id,
            owner_id,
            location: GeoPoint::new(lat, lon).unwrap(),
            taken_at: ts.map(|(epoch_seconds, tz_unknown)| PhotoTimestamp {
                epoch_seconds,
                tz_unknown,
            }),
        })
}

proptest! {
    #[test]
    fn photos_csv_round_trip_is_stable(
        records in prop::collection::vec(arb_record(), 0..=40),
    ) {
        let first = write_photos_csv(&records);
        let parsed = parse_photos_csv(first.as_bytes(), ParseMode::Strict).unwrap();
        prop_assert!(parsed.rejected.is_empty());
        let second = write_photos_csv(&parsed.records);
        prop_assert_eq!(&first, &second);

        let reparsed = parse_photos_csv(second.as_bytes(), ParseMode::Strict).unwrap();
        prop_assert_eq!(parsed.records, reparsed.records);
    }

    #[test]
    fn homes_csv_round_trip_is_stable(
        entries in prop::collection::btree_map(
            ID_PATTERN,
            (-90.0f64..=90.0, -180.0f64..180.0),
            0..=30,
        ),
    ) {
        let homes: BTreeMap<String, GeoPoint> = entries
            .into_iter()
            .map(|(owner, (lat, lon))| (owner, GeoPoint::new(lat, lon).unwrap()))
            .collect();
        let first = write_homes_csv(&homes);
        let parsed = parse_homes_csv(first.as_bytes()).unwrap();
        prop_assert_eq!(&parsed, &homes);
        prop_assert_eq!(write_homes_csv(&parsed), first);
    }
}
