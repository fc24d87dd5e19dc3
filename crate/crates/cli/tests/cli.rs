use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL_DENOISE: &str = "experiment = denoise_2d\nnz = 16\nnx = 16\nmodes = combined\nmax_iter = 5\n";

fn tiktv(args: &[&str], cwd: &Path, env: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tiktv"));
    cmd.args(args).current_dir(cwd).env_remove("TIKTV_OUT");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn successful_run_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), "small.conf", SMALL_DENOISE);
    let out = dir.path().join("res");
    let o = tiktv(&["solve", &conf, "--out", out.to_str().unwrap()], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("summary.csv").is_file());
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2);
    let leftovers: Vec<_> = fs::read_dir(&out)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with(".staging"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), "small.conf", SMALL_DENOISE);
    let out = dir.path().join("res");
    let o = tiktv(
        &["solve", &conf, "--out", out.to_str().unwrap(), "--seed", "3", "--max-iter", "2", "--mode", "tv_only", "--mode", "tikhonov_only"],
        dir.path(),
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("tv_only: 2 iterations"), "{stdout}");
    assert!(stdout.contains("tikhonov_only: 2 iterations"), "{stdout}");
    assert!(!stdout.contains("combined"), "{stdout}");
}

#[test]
fn output_root_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), "small.conf", SMALL_DENOISE);
    let root = dir.path().join("root");
    let o = tiktv(&["solve", &conf], dir.path(), &[("TIKTV_OUT", &root)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(root.join("small").join("summary.csv").is_file());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn default_output_root_is_relative() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), "small.conf", SMALL_DENOISE);
    let o = tiktv(&["solve", &conf], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("out/small/summary.csv").is_file());
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown_key.conf", "experiment = denoise_2d\nbogus = 1\n"),
        ("bad_value.conf", "experiment = denoise_2d\nmu1 = -1\n"),
        ("no_experiment.conf", "nz = 16\n"),
    ];
    for (name, text) in cases {
        let conf = write_config(dir.path(), name, text);
        let o = tiktv(&["solve", &conf, "--out", dir.path().join("r").to_str().unwrap()], dir.path(), &[]);
        assert_eq!(o.status.code(), Some(1), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let conf = write_config(dir.path(), "small.conf", SMALL_DENOISE);
    let o = tiktv(&["solve", &conf, "--mode", "nonsense"], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    let o = tiktv(&["solve", &conf, "--max-iter", "0"], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn divergence_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), "div.conf", &format!("{SMALL_DENOISE}mu1 = 1e300\n"));
    let out = dir.path().join("res");
    let o = tiktv(&["solve", &conf, "--out", out.to_str().unwrap()], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.join("summary.csv").exists());
}

#[test]
fn io_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), "small.conf", SMALL_DENOISE);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = tiktv(&["solve", &conf, "--out", blocker.join("res").to_str().unwrap()], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let missing = dir.path().join("missing.conf");
    let o = tiktv(&["solve", missing.to_str().unwrap()], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(3));
}
