//! End-to-end checks of the binary: exit codes, determinism of artifacts,
//! scenario round-trips, and error reporting.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hetsim"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hetsim-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn predict_prints_the_matrix() {
    let out = bin().arg("predict").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("+3.01"), "{text}");
    assert!(text.contains("-3.01"), "{text}");
    assert!(text.contains("homodyne"), "{text}");
    // Five detector rows.
    assert_eq!(text.lines().count(), 6, "{text}");
}

#[test]
fn simulate_same_seed_is_digest_equal() {
    let dir = tmpdir("sim");
    for _ in 0..2 {
        let out = bin()
            .args([
                "simulate",
                "--duration",
                "2 ms",
                "--seed",
                "7",
                "--format",
                "bin",
            ])
            .arg("--out-dir")
            .arg(&dir)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        let text = stdout(&out);
        let name = text
            .lines()
            .find(|l| l.starts_with("wrote "))
            .unwrap()
            .trim_start_matches("wrote ")
            .to_string();
        let bytes = std::fs::read(&name).unwrap();
        let stash = dir.join(format!("run-{}.bin", bytes.len()));
        if stash.exists() {
            assert_eq!(std::fs::read(&stash).unwrap(), bytes, "runs differ");
        } else {
            std::fs::write(&stash, &bytes).unwrap();
        }
    }
}

#[test]
fn dump_scenario_round_trips_to_same_digest() {
    let dir = tmpdir("dump");
    let out = bin()
        .args([
            "nf",
            "--dump-scenario",
            "--signal-power",
            "1 nW",
            "--seed",
            "9",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc_path = dir.join("scenario.txt");
    std::fs::write(&doc_path, out.stdout).unwrap();

    let again = bin()
        .args(["nf", "--dump-scenario", "--scenario"])
        .arg(&doc_path)
        .output()
        .unwrap();
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(&doc_path).unwrap(),
        stdout(&again),
        "canonical form is not a fixed point"
    );
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = bin()
        .args(["simulate", "--frobnicate", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("frobnicate"), "{err}");
}

#[test]
fn invalid_scenario_names_the_key() {
    let dir = tmpdir("badkey");
    let path = dir.join("bad.scn");
    std::fs::write(&path, "wavelenght = 1064 nm\n").unwrap();
    let out = bin()
        .args(["simulate", "--scenario"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("wavelenght"), "{err}");
}

#[test]
fn aliasing_config_is_an_error() {
    let out = bin()
        .args(["simulate", "--sample-rate", "2 MHz"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("alias"), "{err}");
}

#[test]
fn psd_artifacts_carry_provenance_headers() {
    let dir = tmpdir("psd");
    let out = bin()
        .args([
            "psd",
            "--duration",
            "5 ms",
            "--averages",
            "2",
            "--seed",
            "3",
        ])
        .arg("--out-dir")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let csv = std::fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .find(|e| e.file_name().to_string_lossy().ends_with(".csv"))
        .expect("psd csv written");
    let text = std::fs::read_to_string(csv.path()).unwrap();
    assert!(text.starts_with("# hetsim "), "{text}");
    assert!(text.contains("# digest = "), "{text}");
    assert!(text.contains("# seed = 3"), "{text}");
}

#[test]
fn out_dir_env_var_is_honored() {
    let dir = tmpdir("envdir");
    let out = bin()
        .args(["simulate", "--duration", "2 ms"])
        .env("HETSIM_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let wrote = std::fs::read_dir(&dir).unwrap().count();
    assert!(wrote >= 1, "nothing written to HETSIM_OUT_DIR");
}

#[test]
fn calibrate_prints_the_default_gain() {
    let out = bin().arg("calibrate").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("2.616051e5"), "{text}");
}

#[test]
fn reproduce_fig6_passes_and_writes_artifacts() {
    let dir = tmpdir("fig6");
    let out = bin()
        .args(["reproduce", "fig6", "--seeds", "4"])
        .arg("--out-dir")
        .arg(&dir)
        .output()
        .unwrap();
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("PASS"), "{text}");
    assert!(dir.join("fig6.json").exists());
    assert!(dir.join("fig6-blocked-2mw.csv").exists());
}
