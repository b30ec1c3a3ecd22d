use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn sqkd(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sqkd"));
    cmd.args(args).env_remove("SQKD_SEED");
    if let Some(s) = env_seed {
        cmd.env("SQKD_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(text.trim_end().lines().count(), 1, "stderr: {text}");
    serde_json::from_str(text.trim()).unwrap()
}

const P1: &str = "protocol=P1 gamma1=0.9 gamma2=0.9 xi=0.1 N=3000 seed=42\n";

#[test]
fn run_twice_gives_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "p1.cfg", P1);
    let a = sqkd(&["run", "--config", &cfg, "--trials", "4"], None);
    let b = sqkd(&["run", "--config", &cfg, "--trials", "4", "--workers", "3"], None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("# seed=42\n"));
    assert!(text.contains("# defaults=p_t,exact_counts,attack\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("P1,")).count(), 4);
}

#[test]
fn out_file_matches_stdout() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "p1.cfg", P1);
    let out = dir.path().join("report.csv");
    let to_file = sqkd(
        &["run", "--config", &cfg, "--trials", "2", "--out", out.to_str().unwrap()],
        None,
    );
    assert!(to_file.status.success());
    assert!(to_file.stdout.is_empty());
    let to_stdout = sqkd(&["run", "--config", &cfg, "--trials", "2"], None);
    assert_eq!(std::fs::read(&out).unwrap(), to_stdout.stdout);
}

#[test]
fn seed_sources_in_order() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "p1.cfg", P1);
    let seed_line = |o: Output| {
        String::from_utf8(o.stdout)
            .unwrap()
            .lines()
            .find(|l| l.starts_with("# seed="))
            .unwrap()
            .to_string()
    };
    assert_eq!(
        seed_line(sqkd(&["run", "--config", &cfg, "--trials", "1"], None)),
        "# seed=42"
    );
    assert_eq!(
        seed_line(sqkd(&["run", "--config", &cfg, "--trials", "1"], Some("7"))),
        "# seed=7"
    );
    assert_eq!(
        seed_line(sqkd(
            &["run", "--config", &cfg, "--trials", "1", "--seed", "9"],
            Some("7")
        )),
        "# seed=9"
    );
}

#[test]
fn invalid_config_exits_two_with_key() {
    let dir = TempDir::new().unwrap();
    for (text, key) in [
        ("protocol=P1 gamma1=0.4 gamma2=0.9 xi=0.1 N=100", "gamma1"),
        ("protocol=P1 gamma1=0.9 gamma2=0.9 xi=0.6 N=100", "xi"),
        ("protocol=P1 gamma1=0.9 gamma2=0.9 xi=0.1 N=100 mystery=1", "mystery"),
        ("protocol=P3 kappa=10 tau=2 lambda=10 delta=-1", "delta"),
    ] {
        let cfg = write(&dir, "bad.cfg", text);
        let out = sqkd(&["run", "--config", &cfg], None);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(out.stdout.is_empty());
        assert_eq!(stderr_json(&out)["key"], key);
    }
    let out = sqkd(&["run", "--config", &write(&dir, "bad.json", "{\"protocol\": ")], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["key"], "document");
    let out = sqkd(&["run", "--config", "/definitely/not/here.cfg"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = sqkd(
        &["run", "--config", &write(&dir, "ok.cfg", P1), "--format", "xml"],
        None,
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["key"], "format");
}

#[test]
fn unwritable_output_exits_four() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "p1.cfg", P1);
    let missing = dir.path().join("no/such/dir/out.csv");
    let out = sqkd(
        &[
            "run",
            "--config",
            &cfg,
            "--trials",
            "1",
            "--out",
            missing.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_json(&out)["error"], "output");
}

#[test]
fn aborting_runs_still_succeed() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "ir.cfg",
        "protocol=P1 gamma=0.9 xi=0.1 N=5000 attack=intercept_resend attack.basis_policy=random_per_round attack.legs=both",
    );
    let out = sqkd(&["run", "--config", &cfg, "--trials", "3"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("P1,")).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.split(',').nth(8) == Some("1")));
}

#[test]
fn attack_eval_probe_grid_shape() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "probe.json",
        r#"{"protocol": "P3", "kappa": 500, "tau": 50, "lambda": 500, "delta": 0.2,
            "attack": {"name": "entangling_probe", "theta": 0}}"#,
    );
    let out = sqkd(&["attack-eval", "--config", &cfg, "--trials", "3"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("P3,theta,")).collect();
    assert_eq!(rows.len(), 15);
    assert!(text.contains("# defaults=p_t,exact_counts,seed,sweep\n"));

    let json = sqkd(
        &["attack-eval", "--config", &cfg, "--trials", "3", "--format", "json"],
        None,
    );
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 15);
    assert_eq!(v["header"]["sweep.param"], "theta");
}

#[test]
fn sweep_includes_baseline_point() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "sweep.cfg",
        "protocol=P1 gamma=0.9 xi=0.02 N=4000 seed=5\nsweep.param=gamma sweep.values=0.7,0.9,0.99\n",
    );
    let out = sqkd(&["sweep", "--config", &cfg, "--trials", "2"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("P1,gamma,")).count(), 6);
    assert_eq!(text.lines().filter(|l| l.starts_with("BASELINE,gamma,0.5,")).count(), 2);
}

#[test]
fn verify_golden_commands() {
    let ok = sqkd(&["verify-golden"], None);
    assert!(ok.status.success());
    let bundled = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/testdata/privacy_amplification.golden");
    assert!(sqkd(&["verify-golden", bundled.to_str().unwrap()], None)
        .status
        .success());

    let dir = TempDir::new().unwrap();
    let wrong = write(&dir, "wrong.golden", "ff 0 4 b0\n");
    assert_eq!(sqkd(&["verify-golden", &wrong], None).status.code(), Some(3));
    let malformed = write(&dir, "bad.golden", "ff 0 4\n");
    assert_eq!(sqkd(&["verify-golden", &malformed], None).status.code(), Some(2));
}
