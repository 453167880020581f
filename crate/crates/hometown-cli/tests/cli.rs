//! End-to-end command tests: every subcommand against temp files, exit
//! codes, and determinism of the generated artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use hometown_cli::commands::run;
use hometown_core::geo::{haversine_km, GeoPoint};
use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn cli(args: &[&str]) -> i32 {
    let mut argv = vec!["hometown"];
    argv.extend_from_slice(args);
    run(argv)
}

fn read_json(path: &Path) -> Value {
    let text = fs::read_to_string(path).expect("report file exists");
    serde_json::from_str(&text).expect("report is valid JSON")
}

fn point_of(value: &Value) -> GeoPoint {
    GeoPoint::new(
        value["lat"].as_f64().unwrap(),
        value["lon"].as_f64().unwrap(),
    )
    .unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(cli(&["--help"]), 0);
    assert_eq!(cli(&["--version"]), 0);
    for sub in ["predict", "eval", "fit", "synth", "cluster"] {
        assert_eq!(cli(&[sub, "--help"]), 0, "{sub} --help");
    }
}

#[test]
fn usage_errors_exit_two() {
    // No subcommand.
    assert_eq!(cli(&[]), 2);
    // Unknown subcommand.
    assert_eq!(cli(&["transmogrify"]), 2);
    // Missing required --out.
    let photos = fixture("seven_photos.csv");
    assert_eq!(cli(&["predict", "--photos", photos.to_str().unwrap()]), 2);
    // --k and --threshold-km conflict.
    assert_eq!(
        cli(&[
            "predict",
            "--photos",
            photos.to_str().unwrap(),
            "--k",
            "2",
            "--threshold-km",
            "10",
            "--out",
            "unused.json",
        ]),
        2
    );
    // Non-numeric value.
    assert_eq!(
        cli(&[
            "predict",
            "--photos",
            photos.to_str().unwrap(),
            "--k",
            "two",
            "--out",
            "unused.json",
        ]),
        2
    );
}

#[test]
fn validation_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out.json");

    // Missing input file.
    assert_eq!(
        cli(&[
            "predict",
            "--photos",
            "no-such-file.csv",
            "--out",
            out.to_str().unwrap(),
        ]),
        1
    );

    // k larger than the number of photos: every user fails, and an eval
    // with zero scorable users cannot build a CDF, but predict records the
    // failures and succeeds.
    let photos = fixture("seven_photos.csv");
    let homes = fixture("u1_home.csv");
    assert_eq!(
        cli(&[
            "predict",
            "--photos",
            photos.to_str().unwrap(),
            "--k",
            "50",
            "--min-photos",
            "1",
            "--out",
            out.to_str().unwrap(),
        ]),
        0
    );
    let report = read_json(&out);
    assert_eq!(report["failures"].as_array().unwrap().len(), 1);
    assert_eq!(report["predictions"].as_array().unwrap().len(), 0);

    // Unsorted thresholds.
    assert_eq!(
        cli(&[
            "eval",
            "--photos",
            photos.to_str().unwrap(),
            "--homes",
            homes.to_str().unwrap(),
            "--thresholds",
            "50,10",
            "--out",
            out.to_str().unwrap(),
        ]),
        1
    );
}

#[test]
fn strict_mode_aborts_lenient_mode_skips() {
    let dir = TempDir::new().unwrap();
    let photos = dir.path().join("photos.csv");
    fs::write(
        &photos,
        "photo_id,owner_id,lat,lon,taken_at\n\
         p1,u1,0.001,0.001,\n\
         p2,u1,91.0,0.003,\n\
         p3,u1,0.0,-0.004,\n\
         p4,u1,0.003,0.0,\n",
    )
    .unwrap();
    let out = dir.path().join("out.json");
    let base = [
        "predict",
        "--photos",
        photos.to_str().unwrap(),
        "--k",
        "1",
        "--min-photos",
        "1",
        "--out",
        out.to_str().unwrap(),
    ];

    let mut strict = base.to_vec();
    strict.push("--strict");
    assert_eq!(cli(&strict), 1);
    assert!(!out.exists(), "strict failure must not write a report");

    assert_eq!(cli(&base), 0);
    let report = read_json(&out);
    assert_eq!(report["predictions"][0]["n_photos"], 3);
}

#[test]
fn predict_on_fixture_recovers_origin() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let code = cli(&[
        "predict",
        "--photos",
        fixture("seven_photos.csv").to_str().unwrap(),
        "--homes",
        fixture("u1_home.csv").to_str().unwrap(),
        "--k",
        "2",
        "--min-photos",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);

    let report = read_json(&out);
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["config"]["mode"], "fixed_k");
    assert_eq!(report["config"]["k"], 2);
    assert_eq!(report["n_users"], 1);

    let prediction = &report["predictions"][0];
    assert_eq!(prediction["owner_id"], "u1");
    assert_eq!(prediction["n_photos"], 7);
    assert_eq!(prediction["chosen_cluster_size"], 5);
    assert_eq!(prediction["n_clusters"], 2);

    let home = point_of(&prediction["predicted_home"]);
    let origin = GeoPoint::new(0.0, 0.0).unwrap();
    assert!(haversine_km(home, origin) < 1.0);
    assert!(prediction["error_km"].as_f64().unwrap() < 1.0);
}

#[test]
fn threshold_mode_is_echoed_and_clusters() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let code = cli(&[
        "predict",
        "--photos",
        fixture("seven_photos.csv").to_str().unwrap(),
        "--threshold-km",
        "100",
        "--min-photos",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report = read_json(&out);
    assert_eq!(report["config"]["mode"], "threshold");
    assert_eq!(report["config"]["k"], Value::Null);
    assert_eq!(report["config"]["threshold_km"], 100.0);
    // The 100 km threshold separates the origin group from the (40, 40) pair.
    assert_eq!(report["predictions"][0]["chosen_cluster_size"], 5);
}

#[test]
fn predict_reads_flickr_envelope_json() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let code = cli(&[
        "predict",
        "--photos",
        fixture("flickr_envelope.json").to_str().unwrap(),
        "--k",
        "1",
        "--min-photos",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report = read_json(&out);
    assert_eq!(report["n_users"], 1);
    let prediction = &report["predictions"][0];
    assert_eq!(prediction["owner_id"], "49503078599@N01");
    assert_eq!(prediction["n_photos"], 2);
    let home = point_of(&prediction["predicted_home"]);
    let eiffel = GeoPoint::new(48.8588, 2.2938).unwrap();
    assert!(haversine_km(home, eiffel) < 1.0);
}

#[test]
fn synth_is_byte_deterministic_across_runs() {
    let dir = TempDir::new().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let homes_a = dir.path().join("a_homes.csv");
    let homes_b = dir.path().join("b_homes.csv");
    for (out, homes) in [(&out_a, &homes_a), (&out_b, &homes_b)] {
        let code = cli(&[
            "synth",
            "--users",
            "2",
            "--photos-per-user",
            "30",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
            "--homes-out",
            homes.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
    assert_eq!(fs::read(&homes_a).unwrap(), fs::read(&homes_b).unwrap());

    // A different seed must actually change the data.
    let out_c = dir.path().join("c.csv");
    let code = cli(&[
        "synth",
        "--users",
        "2",
        "--photos-per-user",
        "30",
        "--seed",
        "8",
        "--out",
        out_c.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_ne!(fs::read(&out_a).unwrap(), fs::read(&out_c).unwrap());
}

#[test]
fn synth_then_eval_round_trip() {
    let dir = TempDir::new().unwrap();
    let photos = dir.path().join("cohort.csv");
    let homes = dir.path().join("homes.csv");
    let out = dir.path().join("eval.json");
    let per_user = dir.path().join("errors.csv");

    assert_eq!(
        cli(&[
            "synth",
            "--users",
            "4",
            "--photos-per-user",
            "120",
            "--seed",
            "11",
            "--out",
            photos.to_str().unwrap(),
            "--homes-out",
            homes.to_str().unwrap(),
        ]),
        0
    );
    assert_eq!(
        cli(&[
            "eval",
            "--photos",
            photos.to_str().unwrap(),
            "--homes",
            homes.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--per-user",
            per_user.to_str().unwrap(),
        ]),
        0
    );

    let report = read_json(&out);
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["n_users"], 4);
    assert_eq!(report["n_ok"], 4);
    assert_eq!(report["n_failed"], 0);
    assert_eq!(report["config"]["thresholds_km"][2], 50.0);
    let fractions = report["fraction_within"].as_array().unwrap();
    assert_eq!(fractions.len(), 5);
    assert_eq!(fractions[4]["fraction"], 1.0);
    let cdf = report["cdf"].as_array().unwrap();
    assert_eq!(cdf.len(), 100);

    let csv_text = fs::read_to_string(&per_user).unwrap();
    let mut lines = csv_text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "user_id,error_km,n_photos,chosen_cluster_size"
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn eval_rejects_duplicate_homes() {
    let dir = TempDir::new().unwrap();
    let homes = dir.path().join("homes.csv");
    fs::write(&homes, "owner_id,lat,lon\nu1,0,0\nu1,1,1\n").unwrap();
    let out = dir.path().join("eval.json");
    let code = cli(&[
        "eval",
        "--photos",
        fixture("seven_photos.csv").to_str().unwrap(),
        "--homes",
        homes.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(!out.exists());
}

#[test]
fn cluster_reports_partition_and_cut_edges() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("clusters.json");
    let code = cli(&[
        "cluster",
        "--photos",
        fixture("seven_photos.csv").to_str().unwrap(),
        "--k",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report = read_json(&out);
    assert_eq!(report["n_points"], 7);
    let clusters = report["clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 2);
    assert_eq!(clusters[0]["size"], 5);
    assert_eq!(clusters[1]["size"], 2);
    assert_eq!(clusters[1]["member_indices"], serde_json::json!([5, 6]));
    assert_eq!(report["cut_edges"].as_array().unwrap().len(), 1);
    let cut = report["cut_edges"][0]["weight_km"].as_f64().unwrap();
    assert!(cut > 1000.0, "cut edge spans continents, got {cut} km");
}

#[test]
fn fit_reports_exponent_and_histogram() {
    let dir = TempDir::new().unwrap();
    let photos = dir.path().join("cohort.csv");
    let homes = dir.path().join("homes.csv");
    // All-home cohort: distances are pure truncated Pareto, so the MLE
    // should sit near the generating exponent of 2.38.
    assert_eq!(
        cli(&[
            "synth",
            "--users",
            "2",
            "--photos-per-user",
            "400",
            "--home-fraction",
            "1.0",
            "--seed",
            "13",
            "--out",
            photos.to_str().unwrap(),
            "--homes-out",
            homes.to_str().unwrap(),
        ]),
        0
    );

    let out = dir.path().join("fit.json");
    let code = cli(&[
        "fit",
        "--photos",
        photos.to_str().unwrap(),
        "--homes",
        homes.to_str().unwrap(),
        "--x-min-km",
        "1.0",
        "--bins",
        "24",
        "--log",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);

    let report = read_json(&out);
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["n_users"], 2);
    assert_eq!(report["n_samples"], 800);
    assert_eq!(report["n_zero_excluded"], 0);
    let exponent = report["mle"]["exponent"].as_f64().unwrap();
    assert!((2.0..=2.8).contains(&exponent), "exponent {exponent}");
    assert!(report["log_binned"]["exponent"].as_f64().is_some());
    assert_eq!(report["histogram"]["scale"], "log");
    assert_eq!(report["histogram"]["counts"].as_array().unwrap().len(), 24);

    // Linear mode drops the least-squares block.
    let out_linear = dir.path().join("fit_linear.json");
    let code = cli(&[
        "fit",
        "--photos",
        photos.to_str().unwrap(),
        "--homes",
        homes.to_str().unwrap(),
        "--out",
        out_linear.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let linear = read_json(&out_linear);
    assert_eq!(linear["log_binned"], Value::Null);
    assert_eq!(linear["histogram"]["scale"], "linear");
}

#[test]
fn repeated_runs_write_identical_reports() {
    let dir = TempDir::new().unwrap();
    let photos = fixture("seven_photos.csv");
    let homes = fixture("u1_home.csv");
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    for out in [&out_a, &out_b] {
        let code = cli(&[
            "eval",
            "--photos",
            photos.to_str().unwrap(),
            "--homes",
            homes.to_str().unwrap(),
            "--k",
            "2",
            "--min-photos",
            "5",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
}

#[test]
fn real_binary_runs_end_to_end() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("cohort.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_hometown"))
        .args([
            "synth",
            "--users",
            "1",
            "--photos-per-user",
            "10",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .expect("binary spawns");
    assert_eq!(status.code(), Some(0));
    assert!(out.exists());

    let status = Command::new(env!("CARGO_BIN_EXE_hometown"))
        .args(["predict", "--no-such-flag"])
        .status()
        .expect("binary spawns");
    assert_eq!(status.code(), Some(2));

    let status = Command::new(env!("CARGO_BIN_EXE_hometown"))
        .args([
            "predict",
            "--photos",
            "missing.csv",
            "--out",
            dir.path().join("r.json").to_str().unwrap(),
        ])
        .status()
        .expect("binary spawns");
    assert_eq!(status.code(), Some(1));
}
