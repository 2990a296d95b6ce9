use std::path::Path;
use std::process::{Command, Output};

fn bdris(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdris")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL_SISO: &str = "n_ris = 4, 8\ntrials = 20\ntiming = off\nfading = rayleigh\n";

#[test]
fn siso_prints_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_SISO);
    let out = bdris(&["siso", "--config", &cfg, "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("experiment,architecture,n_ris"));
    // Divisors of 4 and 8: 3 + 4 designers.
    assert_eq!(stdout.lines().count(), 1 + 7);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.lines().any(|l| l.starts_with("PASS ")));
    assert!(!stderr.contains("FAIL "));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_SISO);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (out, threads) in [(&a, "1"), (&b, "3")] {
        let o = bdris(&["siso", "--config", &cfg, "--threads", threads, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
    }
    for file in ["siso.csv", "siso.json"] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn verify_passes_on_a_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_ris = 2, 4, 6\ntrials = 20\noracle_sizes = 2\noracle_instances = 1\n");
    let out = bdris(&["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_problems_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_ris = 4\nwidth = 3\n");
    let out = bdris(&["siso", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("width"));

    let missing = dir.path().join("nope.cfg");
    let out = bdris(&["mimo", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let cfg = write_config(dir.path(), "group_size = 3\nn_ris = 4\narchitectures = group:0\n");
    let out = bdris(&["siso", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_verb_is_rejected() {
    let out = bdris(&["plot"]);
    assert!(!out.status.success());
}
