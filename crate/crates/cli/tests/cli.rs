use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nsv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsv"))
        .args(args)
        .output()
        .expect("spawn nsv")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const SMALL: &str = "[solver]\nn = 4\nalpha = 0.3\nt_final = 0.2\ndt = 1e-3\n";

#[test]
fn verify_passes_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = nsv(&["verify", "--out", dir.path().to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().all(|l| l.starts_with("PASS")));
    assert!(dir.path().join("verify.json").exists());
}

#[test]
fn run_writes_reports_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = nsv(&[
            "run",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--quiet",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty(), "quiet run printed output");
    }
    for name in [
        "energy.csv",
        "weighted.csv",
        "pressure.csv",
        "snapshot_000200.bin",
    ] {
        let x = fs::read(a.join(name)).unwrap();
        assert_eq!(x, fs::read(b.join(name)).unwrap(), "{name} differs");
    }
    let energy = fs::read_to_string(a.join("energy.csv")).unwrap();
    assert_eq!(energy.lines().count(), 202);
}

#[test]
fn seed_flag_changes_the_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let mut reports = Vec::new();
    for seed in ["1", "2"] {
        let out = dir.path().join(seed);
        let o = nsv(&[
            "run",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--seed",
            seed,
            "--format",
            "json",
        ]);
        assert!(o.status.success());
        reports.push(fs::read(out.join("energy.json")).unwrap());
    }
    assert_ne!(reports[0], reports[1]);
}

#[test]
fn bad_alpha_is_reported_with_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[solver]\nn = 4\nalpha = -1.0\nt_final = 0.2\n");
    let o = nsv(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha"));
    let o = nsv(&["run"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_check_gives_exit_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{SMALL}[diagnostics]\nenergy_tolerance = 1e-30\n"),
    );
    let o = nsv(&[
        "run",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL energy identity"));
}

#[test]
fn sweep_and_suitability_run_on_small_lattices() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "{SMALL}[sweep]\nalphas = [0.4, 0.2]\n[suitability]\ncoupling = {{ n_list = [3, 4], gamma = 0.25, c = 0.5 }}\n"
    );
    let cfg = write_config(dir.path(), &body);
    let out = dir.path().to_str().unwrap();
    let o = nsv(&["sweep", "--config", &cfg, "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let sweep = fs::read_to_string(dir.path().join("alpha_sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 3);

    let o = nsv(&["suitability", "--config", &cfg, "--out", out]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("local energy identity"), "{stdout}");
    let coupling = fs::read_to_string(dir.path().join("coupling.csv")).unwrap();
    let mut lines = coupling.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("n,alpha_n,remainder,bound,tail,ratio"));
    assert_eq!(lines.count(), 2);
    assert!(dir.path().join("local_energy.csv").exists());
    assert!(dir.path().join("tail.csv").exists());
}
