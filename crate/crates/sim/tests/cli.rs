use std::path::Path;
use std::process::{Command, Output};

fn bauv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bauv"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn validate_prints_a_loadable_config() {
    let o = bauv(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let printed = String::from_utf8(o.stdout).unwrap();
    let cfg = bauv_sim::Config::from_toml_str(&printed).unwrap();
    assert_eq!(cfg, bauv_sim::Config::default());
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write(dir.path(), "typo.toml", "[guidance]\ndetla = 1.5\n");
    let o = bauv(&["validate", "--config", &typo]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("detla") && err.contains("line 2"), "{err}");

    let bad = write(dir.path(), "bad.toml", "[sim]\ndt = 1\n");
    let o = bauv(&[
        "run",
        "--config",
        &bad,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sim.dt"));

    let missing = dir.path().join("nope.toml");
    let o = bauv(&["sweep", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn run_writes_trial_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[sim]\nt_max = 1.5\n");
    let out = dir.path().join("out");
    let o = bauv(&[
        "run",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("adaptive") && stdout.contains("controlled"));
    for f in [
        "trajectory_adaptive_controlled_delta1.75.csv",
        "metrics.csv",
        "waypoints.csv",
        "trajectories_delta1.75.svg",
    ] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let traj =
        std::fs::read_to_string(out.join("trajectory_adaptive_controlled_delta1.75.csv")).unwrap();
    assert_eq!(traj.lines().count(), 1 + 151);
}

#[test]
fn sweep_respects_axes_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[sim]\nt_max = 1\n[sweep]\ndelta_multiples = [1.5, 2.0]\nguidance_modes = [\"adaptive\"]\n",
    );
    let out = dir.path().join("out");
    let o = bauv(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--jobs",
        "3",
        "--timing",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 5);
    assert!(metrics
        .lines()
        .skip(1)
        .all(|l| l.starts_with("adaptive,") && !l.ends_with(',')));
}

#[test]
fn path_writes_waypoints_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = bauv(&["path", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let wp = std::fs::read_to_string(dir.path().join("waypoints.csv")).unwrap();
    assert_eq!(wp.lines().next(), Some("index,x_m,y_m"));
    assert_eq!(wp.lines().count(), 62);
    assert_eq!(wp.lines().nth(1), Some("0,0,0"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn divergence_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[sim]\nt_max = 1\n[initial]\nu = 1e300\n",
    );
    let o = bauv(&[
        "run",
        "--config",
        &cfg,
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("aborted"));
    assert!(dir.path().join("o/metrics.csv").is_file());
}

#[test]
fn unwritable_output_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "plain", "");
    let cfg = write(dir.path(), "c.toml", "[sim]\nt_max = 0.1\n");
    let out = format!("{file}/sub");
    let o = bauv(&["run", "--config", &cfg, "--out", &out]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = bauv(&["path", "--out", &out]);
    assert_eq!(o.status.code(), Some(3));
}
