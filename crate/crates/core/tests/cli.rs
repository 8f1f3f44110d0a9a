use std::process::{Command, Output};

fn lampwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lampwalk"))
        .args(args)
        .env_remove("LAMPWALK_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn length_of_identity_is_zero() {
    let o = lampwalk(&["length", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn tsp_two_points() {
    let o = lampwalk(&["tsp", "--start", "1", "--points", "b,ab", "--end", "a"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "5\n");
}

#[test]
fn zero_samples_is_a_config_error() {
    let o = lampwalk(&["clt-test", "--samples", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("samples"));
}

#[test]
fn dry_run_reports_hash_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = lampwalk(&["simulate", "--dry-run", "--output", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("config_hash"));
    assert!(!out.exists());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"kind": "cocycle", "horizons": [8, 16], "samples": 4, "seed": 1, "group": {"base": "free:3"}}"#,
    )
    .unwrap();
    let o = lampwalk(&["simulate", "--config", cfg.to_str().unwrap(), "--samples", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().ends_with("seed=1"));
    assert_eq!(text.lines().count(), 2 + 2 * 2);

    std::fs::write(&cfg, r#"{"samplez": 4}"#).unwrap();
    let o = lampwalk(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("samplez"));
}

#[test]
fn files_are_identical_across_threads_and_get_a_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        let out = dir.path().join(format!("d{threads}.csv"));
        let o = lampwalk(&[
            "defect-table", "--ns", "16,32,64", "--samples", "200", "--seed", "3",
            "--threads", threads, "--output", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
        out
    };
    let (a, b) = (run("1"), run("3"));
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let text = String::from_utf8(bytes).unwrap();
    assert!(text.starts_with("# tool=lampwalk-0.1.0 config_hash="));
    assert_eq!(text.lines().nth(1), Some("n,p,moment,fit_exponent,fit_coeff,residual"));
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("d3.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["threads"], 3);
}

#[test]
fn threads_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_lampwalk"))
        .args(["simulate", "--dry-run"])
        .env("LAMPWALK_THREADS", "2")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("threads      2"));
}
