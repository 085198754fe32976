use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_esn-ituc"));
    cmd.env_remove("ITUC_OUT_DIR").env("RUST_LOG", "error");
    cmd
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(|v| v.trim().parse().unwrap()))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

const SMOKE_PLAN: &str = r#"{
  "benchmark": "mackey-glass",
  "sizes": [20, 50],
  "k_alphas": 3,
  "n_trials": 2,
  "gamma": 0.0001,
  "washout": 100,
  "eval_mode": "free-run",
  "horizon": 84,
  "base_seed": 11
}"#;

#[test]
fn generate_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let o = run(
            &["generate", "--benchmark", "henon", "--n", "1000", "--out", name],
            dir.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# benchmark=henon dt=1 seed=0\n"));
    assert_eq!(text.lines().count(), 1001);
}

#[test]
fn generate_defaults_to_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("data");
    let o = bin()
        .args(["generate", "--benchmark", "lorenz", "--n", "16384"])
        .env("ITUC_OUT_DIR", &out_dir)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(out_dir.join("lorenz.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 16384);
    assert!(rows
        .iter()
        .all(|r| r.len() == 3 && r.iter().all(|x| (0.0..=1.0).contains(x))));
}

#[test]
fn unknown_benchmark_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["generate", "--benchmark", "weather", "--n", "10"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"), "{}", stderr(&o));
    assert_eq!(run(&[], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["bounds"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn bounds_of_a_scaled_identity() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), "# 0.5 I\n0.5,0,0\n0,0.5,0\n0,0,0.5\n").unwrap();
    let o = run(&["bounds", "--matrix", "m.csv", "--alpha", "3"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(field(&text, "u_low"), 2.0);
    assert_eq!(field(&text, "u_high"), 2.0);
    assert!(text.contains("regime   NECESSARY_VIOLATED"));
    let o = run(&["bounds", "--matrix", "m.csv", "--alpha", "2"], dir.path());
    assert!(stdout(&o).contains("regime   ITUC"));
    let o = run(&["bounds", "--matrix", "m.csv", "--alpha", "1"], dir.path());
    assert!(stdout(&o).contains("regime   SUFFICIENT"));
}

#[test]
fn bounds_of_a_large_random_reservoir() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["bounds", "--random", "1000", "--seed", "7"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let ratio = field(&stdout(&o), "ratio");
    assert!((1.8..=2.2).contains(&ratio), "{ratio}");
}

#[test]
fn bounds_failures_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("zero.csv"), "0,0\n0,0\n").unwrap();
    std::fs::write(dir.path().join("bad.csv"), "1,2\n3,x\n").unwrap();
    std::fs::write(dir.path().join("rect.csv"), "1,2,3\n4,5,6\n").unwrap();
    assert_eq!(
        run(&["bounds", "--matrix", "zero.csv"], dir.path()).status.code(),
        Some(3)
    );
    let o = run(&["bounds", "--matrix", "bad.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    assert_eq!(
        run(&["bounds", "--matrix", "rect.csv"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["bounds", "--matrix", "missing.csv"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(run(&["bounds", "--random", "0"], dir.path()).status.code(), Some(1));
}

#[test]
fn train_reports_scores_and_saves_the_model() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "train",
            "--benchmark",
            "mackey-glass",
            "--size",
            "50",
            "--model-out",
            "m.json",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(field(&text, "nrmse_teacher_forced") < 0.2);
    assert!(text.contains("regime   ITUC"));
    let model = esn_ituc::esn::EsnModel::load(&dir.path().join("m.json")).unwrap();
    assert_eq!(model.config().n_s, 50);
    assert!(model.is_trained());
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("plan.json"), SMOKE_PLAN).unwrap();
    let mut outputs = Vec::new();
    for (out, workers) in [("w1", "1"), ("w8", "8"), ("again", "1")] {
        let o = run(
            &["sweep", "--plan", "plan.json", "--out", out, "--workers", workers],
            dir.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("12 trials"), "{}", stdout(&o));
        let results = std::fs::read(dir.path().join(out).join("results.csv")).unwrap();
        let surface = std::fs::read(dir.path().join(out).join("surface.csv")).unwrap();
        outputs.push((results, surface));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let text = String::from_utf8(outputs[0].0.clone()).unwrap();
    assert_eq!(text.lines().count(), 13);
    assert_eq!(String::from_utf8(outputs[0].1.clone()).unwrap().lines().count(), 7);
}

#[test]
fn invalid_plan_fails_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SMOKE_PLAN.replace("\"k_alphas\": 3", "\"k_alphas\": 1");
    std::fs::write(dir.path().join("plan.json"), bad).unwrap();
    let o = run(&["sweep", "--plan", "plan.json", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
    let o = run(&["sweep", "--plan", "plan.json", "--workers", "0"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn report_is_idempotent_and_plot_ready() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("plan.json"), SMOKE_PLAN).unwrap();
    assert!(run(&["sweep", "--plan", "plan.json", "--out", "out"], dir.path())
        .status
        .success());
    let sweep_surface = std::fs::read(dir.path().join("out/surface.csv")).unwrap();
    let files = ["surface.csv", "nrmse_matrix.txt", "mmds_matrix.txt"];
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        let o = run(&["report", "--results", "out"], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
        snapshots.push(files.map(|f| std::fs::read(dir.path().join("out").join(f)).unwrap()));
    }
    assert_eq!(snapshots[0], snapshots[1]);
    assert_eq!(snapshots[0][0], sweep_surface);
    let matrix = String::from_utf8(snapshots[0][1].clone()).unwrap();
    let lines: Vec<&str> = matrix.lines().collect();
    assert_eq!(lines[0], "3 1 2 3");
    assert!(lines[1].starts_with("20 ") && lines[2].starts_with("50 "));
    assert_eq!(lines.len(), 3);
}

#[test]
fn report_names_malformed_rows() {
    let dir = tempfile::tempdir().unwrap();
    let text = "benchmark,n_s,size_index,alpha_index,trial,seed,alpha,eta,rho,nrmse,mmds,status\n\
                mso,20,1,1,1,5,0.1,2,1,0.5,3,ok\n\
                mso,20,1,2,1,5,0.1,2,1,0.5,3,maybe\n";
    std::fs::write(dir.path().join("r.csv"), text).unwrap();
    let o = run(&["report", "--results", "r.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn report_marks_failed_cells_missing() {
    let dir = tempfile::tempdir().unwrap();
    let text = "benchmark,n_s,size_index,alpha_index,trial,seed,alpha,eta,rho,nrmse,mmds,status\n\
                mso,20,1,1,1,5,0.1,2,1,0.5,3,ok\n\
                mso,20,1,2,1,5,NaN,2,1,NaN,NaN,non-converged\n";
    std::fs::write(dir.path().join("r.csv"), text).unwrap();
    let o = run(&["report", "--results", "r.csv", "--out", "rep"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"));
    let surface = std::fs::read_to_string(dir.path().join("rep/surface.csv")).unwrap();
    assert!(surface.contains("20,2,NaN,NaN,0"), "{surface}");
}
