//! End-to-end checks of the binary: exit codes, report files, determinism
//! of the on-disk artifacts.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_permucat"))
}

#[test]
fn ghat_command_passes_and_writes_report() {
    let dir = std::env::temp_dir().join("permucat-cli-test-ghat");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.json");
    let status = bin()
        .args(["ghat", "--n-max", "8", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let report = std::fs::read_to_string(&out).unwrap();
    assert!(report.contains("\"schema\": \"permucat/1\""));
    assert!(report.contains("ghat/derangement/08"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn invalid_flags_exit_with_usage_error() {
    let status = bin().args(["ghat", "--bogus-flag"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = bin().args(["no-such-command"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn windows_command_is_deterministic_across_processes() {
    let dir = std::env::temp_dir().join("permucat-cli-test-windows");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let out1 = dir.join("r1.json");
    let out2 = dir.join("r2.json");
    for (out, jobs) in [(&out1, "1"), (&out2, "2")] {
        let status = bin()
            .args(["windows", "--n", "6", "--jobs", jobs, "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    // parallelism degree must not affect the report
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn excoll_command_emits_pair_and_matrix_artifacts() {
    let dir = std::env::temp_dir().join("permucat-cli-test-excoll");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.json");
    let status = bin()
        .args(["excoll", "--n", "4", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let gram = std::fs::read_to_string(dir.join("report-gram-4.csv")).unwrap();
    assert_eq!(gram.lines().count(), 9);
    let pairs = std::fs::read_to_string(dir.join("report-pairs-4.json")).unwrap();
    assert!(pairs.contains("\"order\""));
    assert!(pairs.contains("\"vanishing\""));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn fan_cache_is_written_and_reused() {
    let dir = std::env::temp_dir().join("permucat-cli-test-cache");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.json");
    let status = bin()
        .args(["ghat", "--n-max", "4", "--cache"])
        .arg(&dir)
        .args(["--out"])
        .arg(&out)
        .env("PERMUCAT_CACHE", &dir)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.join("lm_4.json").exists());
    let first = std::fs::read(dir.join("lm_4.json")).unwrap();
    // a rerun reuses the cache and leaves the file untouched
    let status = bin()
        .args(["ghat", "--n-max", "4", "--cache"])
        .arg(&dir)
        .args(["--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(std::fs::read(dir.join("lm_4.json")).unwrap(), first);
    let _ = std::fs::remove_dir_all(&dir);
}
