use std::path::Path;
use std::process::{Command, Output};

fn levylab(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_levylab"));
    cmd.args(args).env_remove("LEVYLAB_OUT");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL_CUSTOM: &str = r#"{"scenario": "custom", "n_grid": [300], "t_grid": [500], "replicas": 300}"#;

#[test]
fn unknown_scenario_exits_2_without_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = levylab(&["run", "--scenario", "thm12", "--out", out.to_str().unwrap()], &[("LEVYLAB_OUT", dir.path())]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("unknown scenario"));
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(levylab(&["run"], &[]).status.code(), Some(2));
    assert_eq!(levylab(&["constants", "--table", "zeta"], &[]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"replicas": "many"}"#);
    let res = levylab(&["run", "--scenario", "thm1", "--config", &bad, "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(2));
    let unknown_field = write(dir.path(), "typo.json", r#"{"replica": 10}"#);
    assert_eq!(levylab(&["validate", "--config", &unknown_field, "--scenario", "thm1"], &[]).status.code(), Some(2));
}

#[test]
fn validate_names_the_violated_hypothesis() {
    let dir = tempfile::tempdir().unwrap();
    let lazy = write(
        dir.path(),
        "lazy.json",
        r#"{"scenario": "thm9", "inc_law": {"kind": "lazy_symmetric", "p_zero": 0.5}}"#,
    );
    let res = levylab(&["validate", "--config", &lazy], &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stdout).contains("thm9 assumes S is a simple symmetric RW"));

    let ok = write(dir.path(), "ok.json", r#"{"scenario": "thm5a"}"#);
    let res = levylab(&["validate", "--config", &ok], &[]);
    assert_eq!(res.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&res.stdout).contains("thm5a: ok"));

    // The command-line id wins over the one in the file.
    let res = levylab(&["validate", "--config", &lazy, "--scenario", "custom"], &[]);
    assert_eq!(res.status.code(), Some(0));
}

#[test]
fn run_rejects_invalid_configs_before_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "thm7.json",
        r#"{"inc_law": {"kind": "lazy_symmetric", "p_zero": 0.2}}"#,
    );
    let out = dir.path().join("out");
    let res = levylab(&["run", "--scenario", "thm7", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("thm7 requires S simple symmetric"));
    assert!(!out.exists());
}

#[test]
fn constants_tables_are_csv() {
    let res = levylab(&["constants", "--table", "mq"], &[]);
    assert_eq!(res.status.code(), Some(0));
    let text = String::from_utf8(res.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,m_q"));
    let row: Vec<f64> = lines.nth(2).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[0], 1.0);
    assert!((row[1] - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-14);

    for (table, header) in [("f", "alpha,r,f_alpha"), ("d", "mu,alpha,q,d"), ("F", "mu,alpha,a,F"), ("gamma", "alpha,q,gamma")] {
        let res = levylab(&["constants", "--table", table, "--mu", "3"], &[]);
        assert_eq!(res.status.code(), Some(0), "{table}");
        let text = String::from_utf8(res.stdout).unwrap();
        assert!(text.starts_with(header), "{table}");
        assert!(text.lines().count() > 5);
    }
}

#[test]
fn run_writes_reports_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "custom.json", SMALL_CUSTOM);
    let mut outputs = Vec::new();
    for (name, workers) in [("a", "1"), ("b", "3")] {
        let out = dir.path().join(name);
        let res = levylab(
            &["run", "--scenario", "custom", "--config", &cfg, "--workers", workers, "--seed", "7", "--out", out.to_str().unwrap()],
            &[],
        );
        assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
        let s = summary(&out.join("summary.json"));
        assert_eq!((s["complete"].as_bool(), s["passed"].as_bool(), s["seed"].as_u64()), (Some(true), Some(true), Some(7)));
        assert_eq!(s["config"]["workers"].as_u64(), Some(workers.parse().unwrap()));
        outputs.push(out);
    }
    for f in ["points.csv", "Y_n300_r0.csv", "X_t500_r0.csv", "trajectory.csv", "medium.csv"] {
        let a = std::fs::read(outputs[0].join(f)).unwrap();
        let b = std::fs::read(outputs[1].join(f)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{f} differs");
    }
}

#[test]
fn output_directory_defaults_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "custom.json", SMALL_CUSTOM);
    let root = dir.path().join("env-root");
    let res = levylab(&["run", "--scenario", "custom", "--config", &cfg, "--replicas", "100"], &[("LEVYLAB_OUT", &root)]);
    assert_eq!(res.status.code(), Some(0));
    let s = summary(&root.join("custom").join("summary.json"));
    assert_eq!(s["replicas"].as_u64(), Some(100));
}

#[test]
fn failing_verdicts_exit_1() {
    // With 100 replicas nothing exceeds a t at t = 1600, so the floor rate rises.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "thm8.json", r#"{"replicas": 100, "repetitions": 1}"#);
    let out = dir.path().join("out");
    let res = levylab(&["run", "--scenario", "thm8", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stdout).contains("FAIL thm8 rates_nonincreasing"));
    let s = summary(&out.join("summary.json"));
    assert_eq!((s["complete"].as_bool(), s["passed"].as_bool()), (Some(true), Some(false)));
    let verdict = s["verdicts"].as_array().unwrap().iter().find(|v| v["name"] == "rates_nonincreasing").unwrap();
    assert!(verdict["note"].as_str().unwrap().contains("no exceedance"));
}

fn summary(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}
