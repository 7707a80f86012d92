//! Exercises the installed binary the way a shell would: argument parsing,
//! exit codes, environment handling, and on-disk results.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ckbrownian"))
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("run.conf");
    fs::write(
        &path,
        "# small damped run\n\
         m = 1.0\n\
         eta = 1.0\n\
         D = 0.5\n\
         sigma0 = 1.0\n\
         t_end = 2.0\n\
         n_steps = 400\n\
         n_paths = 60\n\
         seed = 4\n\
         probe_times = 1.0\n",
    )
    .unwrap();
    path
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn missing_config_file_exits_with_usage_code() {
    let out = bin()
        .args(["simulate", "--config", "/nonexistent/run.conf"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("cannot read"));
}

#[test]
fn malformed_config_diagnostic_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    fs::write(
        &path,
        "m = 1.0\neta = sticky\nD = 0\nsigma0 = 1\nt_end = 1\nn_steps = 100\n",
    )
    .unwrap();
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("eta"), "{err}");
}

#[test]
fn simulate_writes_the_announced_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out_dir = dir.path().join("artifacts");
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for name in ["simulate_analytic.csv", "simulate_manifest.json"] {
        assert!(stdout.contains(name), "{stdout}");
        assert!(out_dir.join(name).exists(), "{name} missing");
    }
}

#[test]
fn engine_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("x"))
        .args(["--engine", "warp"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr_of(&out).contains("unknown engine"),
        "{}",
        stderr_of(&out)
    );
}

#[test]
fn invalid_thread_count_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    for bad in ["abc", "0", "-2"] {
        let out = bin()
            .args(["ensemble", "--config"])
            .arg(&config)
            .env("CKBROWNIAN_THREADS", bad)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(2), "value {bad}");
        assert!(
            stderr_of(&out).contains("CKBROWNIAN_THREADS"),
            "value {bad}"
        );
    }
}

#[test]
fn worker_count_does_not_change_any_byte() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out_dir = dir.path().join(format!("workers_{threads}"));
        let out = bin()
            .args(["ensemble", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out_dir)
            .env("CKBROWNIAN_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
        outputs.push(out_dir);
    }
    for name in ["ensemble_analytic.csv", "ensemble_manifest.json"] {
        let a = fs::read(outputs[0].join(name)).unwrap();
        let b = fs::read(outputs[1].join(name)).unwrap();
        assert_eq!(a, b, "{name} depends on the worker count");
    }
}

#[test]
fn seed_flag_changes_the_noise_but_not_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let mut bodies = Vec::new();
    for seed in ["4", "5"] {
        let out_dir = dir.path().join(format!("seed_{seed}"));
        let out = bin()
            .args(["simulate", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out_dir)
            .args(["--seed", seed])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
        bodies.push(fs::read_to_string(out_dir.join("simulate_analytic.csv")).unwrap());
    }
    assert_ne!(bodies[0], bodies[1], "different seeds, different forces");
    let headers: Vec<&str> = bodies.iter().map(|b| b.lines().next().unwrap()).collect();
    assert_eq!(headers[0], headers[1]);
}
