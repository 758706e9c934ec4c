use sha2::{Digest, Sha256};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn sptchan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sptchan")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = sptchan(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn presets_are_deterministic_and_checksummed() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["fig3_decay", "fig2_orbits", "table_patternSS", "table_depolarising", "fig4_7_irreps"] {
        let (a, b) = (dir.path().join(format!("{preset}_a")), dir.path().join(format!("{preset}_b")));
        let start = Instant::now();
        ok(&["run-preset", preset, "--seed", "5", "--out", path(&a)]);
        assert!(start.elapsed().as_secs() < 60, "{preset} took {:?}", start.elapsed());
        ok(&["run-preset", preset, "--seed", "5", "--out", path(&b)]);
        let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["seed"], 5);
        let outputs = manifest["outputs"].as_array().unwrap();
        assert!(!outputs.is_empty());
        for o in outputs {
            let name = o["path"].as_str().unwrap();
            let bytes = fs::read(a.join(name)).unwrap();
            assert_eq!(bytes, fs::read(b.join(name)).unwrap(), "{preset}/{name} differs between runs");
            let digest: String = Sha256::digest(&bytes).iter().map(|x| format!("{x:02x}")).collect();
            assert_eq!(o["sha256"].as_str().unwrap(), digest);
            assert_eq!(o["bytes"].as_u64().unwrap() as usize, bytes.len());
        }
    }
}

#[test]
fn collision_without_force_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("orbits");
    ok(&["run-preset", "fig2_orbits", "--out", path(&out)]);
    let before = fs::read(out.join("orbits_det5.csv")).unwrap();
    let again = sptchan(&["run-preset", "fig2_orbits", "--out", path(&out)]);
    assert_eq!(again.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&again.stderr).contains("--force"));
    assert_eq!(fs::read(out.join("orbits_det5.csv")).unwrap(), before);
    ok(&["run-preset", "fig2_orbits", "--out", path(&out), "--force"]);
}

#[test]
fn validation_and_numerical_exit_codes() {
    assert_eq!(sptchan(&["run-preset", "nope"]).status.code(), Some(2));
    assert_eq!(sptchan(&["cohomology", "--n", "0", "--k", "1"]).status.code(), Some(2));
    assert_eq!(sptchan(&["classify", "--channel", "builtin:no_such", "--group", "2,2"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    ok(&["random-state", "--group", "2,2", "--k", "1", "--bond", "2", "--out", path(&state)]);
    let mut doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&state).unwrap()).unwrap();
    doc["tensor"][0][0][1] = serde_json::json!([0.7, 0.2]);
    let broken = dir.path().join("broken.json");
    fs::write(&broken, doc.to_string()).unwrap();
    let out = sptchan(&["invariant", "--state", path(&broken)]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn incomplete_channel_file_is_rejected_with_its_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    fs::write(&file, r#"{"dim": 2, "kraus": [[[[1.4142135623730951, 0], [0, 0]], [[0, 0], [1.4142135623730951, 0]]]]}"#)
        .unwrap();
    let out = sptchan(&["classify", "--channel", path(&file), "--group", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("deviation"));
}

#[test]
fn pattern_ss_table_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    ok(&["run-preset", "table_patternSS", "--out", path(&out)]);
    let rows = csv_rows(&fs::read_to_string(out.join("table_patternSS.csv")).unwrap());
    assert_eq!(rows.len(), 16);
    for r in &rows {
        let re: f64 = r[2].parse().unwrap();
        let abs: f64 = r[4].parse().unwrap();
        match (r[0].as_str(), r[1].as_str()) {
            ("e", "e") => assert!((re - 1.0).abs() < 1e-12),
            (b, e) if b == e => assert!((re + 1.0 / 9.0).abs() < 1e-12, "{b}{e}: {re}"),
            (b, e) => assert!(abs < 1e-12, "{b}{e}: {abs}"),
        }
    }
}

#[test]
fn orbit_tables_follow_multiplication_by_det() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    ok(&["run-preset", "fig2_orbits", "--out", path(&out)]);
    for det in [5usize, 3] {
        let rows = csv_rows(&fs::read_to_string(out.join(format!("orbits_det{det}.csv"))).unwrap());
        assert_eq!(rows.len(), 12);
        for r in rows {
            let k: usize = r[0].parse().unwrap();
            assert_eq!(r[1].parse::<usize>().unwrap(), det * k % 12);
            if det == 5 {
                assert_eq!(r[2], r[3], "automorphisms keep complexity");
            }
        }
    }
}

#[test]
fn exported_channel_reproduces_builtin_results() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("deph.json");
    ok(&["export-channel", "--channel", "builtin:dephasing:0.5", "--out", path(&file)]);
    assert!(dir.path().join("deph.manifest.json").exists());
    let args = |c: &str| ["timeseries", "--state", "builtin:aklt", "--channel", c, "--steps", "4"].map(String::from);
    let from_file = ok(&args(path(&file)).iter().map(String::as_str).collect::<Vec<_>>());
    let builtin = ok(&args("builtin:dephasing:0.5").iter().map(String::as_str).collect::<Vec<_>>());
    for (a, b) in csv_rows(&from_file).iter().zip(csv_rows(&builtin)) {
        let (x, y): (f64, f64) = (a[1].parse().unwrap(), b[1].parse().unwrap());
        assert!((x - y).abs() < 1e-14);
    }
    let first = csv_rows(&builtin)[0][1].parse::<f64>().unwrap();
    assert!((first + 4.0 / 9.0).abs() < 1e-12);
}

#[test]
fn random_state_round_trips_through_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("s.json");
    ok(&["random-state", "--group", "3,3", "--k", "1", "--bond", "3", "--seed", "11", "--out", path(&state)]);
    let doc: serde_json::Value = serde_json::from_str(&ok(&["invariant", "--state", path(&state)])).unwrap();
    assert_eq!(doc["matched_k"], 1);
    let pattern = ok(&["pattern", "--state", path(&state)]);
    assert!(pattern.contains("\"matched_k\":1"), "{pattern}");
}

#[test]
fn classify_reports_the_two_twist() {
    let doc: serde_json::Value =
        serde_json::from_str(&ok(&["classify", "--channel", "builtin:k_ss:2", "--group", "4,4"])).unwrap();
    assert_eq!(doc["weak"], true);
    assert_eq!(doc["twist_det"], 2);
    assert_eq!(doc["twist_matrix"], serde_json::json!([[2, 0], [0, 1]]));
}
