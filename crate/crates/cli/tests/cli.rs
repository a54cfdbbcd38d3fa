use heatutm::problem::SolutionField;
use heatutm_cli::csvio::{read_field_csv, write_field_csv};
use heatutm_cli::report::RunReport;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn heatutm(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatutm"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn report(out: &Path) -> RunReport {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.json");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn reruns_are_byte_identical_outside_timings() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let config = configs().join("eigen_decay.json");
    for out in [&a, &b] {
        let o = heatutm(&["solve-linear", "--seed", "7"], &config, out);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ra, rb) = (report(&a), report(&b));
    assert_eq!(ra.hashed, rb.hashed);
    assert_eq!(ra.hash, rb.hash);
    assert_eq!(ra.hashed.provenance.seed, 7);
    for f in ["field.csv", "components_halfline.csv", "components_reduced.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn eigen_decay_field_matches_the_tabulated_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = heatutm(&["solve-linear"], &configs().join("eigen_decay.json"), dir.path());
    assert!(o.status.success());
    let field = read_field_csv(&dir.path().join("field.csv"), true).unwrap();
    let i = field.x_grid.iter().position(|&x| (x - 0.5).abs() < 1e-12).unwrap();
    let j = field.t_grid.iter().position(|&t| (t - 0.1).abs() < 1e-12).unwrap();
    assert!((field.at(i, j) - 0.37273).abs() < 1e-4, "{}", field.at(i, j));
    assert!((field.at(i, j) - (-std::f64::consts::PI.powi(2) / 10.0).exp()).abs() < 1e-7);
}

#[test]
fn field_csv_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let mut field = SolutionField::zeros(vec![0.0, 0.5, 1.0], vec![0.0, 0.1], true);
    field.values = vec![vec![-0.0, 1e-300, std::f64::consts::PI], vec![0.1 + 0.2, -7.25e12, 5e-324]];
    field.sync_traces();
    write_field_csv(&path, &field).unwrap();
    let back = read_field_csv(&path, true).unwrap();
    assert_eq!(back.values, field.values);
    assert_eq!(back.x_grid, field.x_grid);
    assert_eq!(back.t_grid, field.t_grid);
    assert_eq!(back.right_trace, field.right_trace);
}

#[test]
fn lifespan_prints_the_smooth_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = heatutm(&["lifespan"], &configs().join("lifespan.json"), dir.path());
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with("0.0017361"), "{stdout}");
}

#[test]
fn parse_errors_point_at_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "{\n  \"grid\": { \"n_x\": 11,\n    \"n_t\": oops }\n}\n");
    let o = heatutm(&["solve-linear"], &config, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert!(stderr.contains("run.json:3:"), "{stderr}");
}

#[test]
fn validation_errors_point_at_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("eigen_decay.json"))
        .unwrap()
        .replace("\"horizon\": 0.5", "\"horizon\": 1.5");
    let line = text.lines().position(|l| l.contains("horizon")).unwrap() + 1;
    let config = write_config(dir.path(), &text);
    let o = heatutm(&["solve-linear"], &config, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert!(stderr.contains(&format!("run.json:{line}:")), "{stderr}");
    assert!(stderr.contains("horizon"), "{stderr}");
}

#[test]
fn failed_reference_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("eigen_decay.json"))
        .unwrap()
        .replace("\"tolerance\": 1e-6", "\"tolerance\": 1e-15");
    let config = write_config(dir.path(), &text);
    let out = dir.path().join("out");
    let o = heatutm(&["solve-linear"], &config, &out);
    assert_eq!(o.status.code(), Some(1));
    let r = report(&out);
    assert!(r.hashed.checks.iter().any(|c| c.name == "reference_error" && !c.passed));
}

#[test]
fn small_data_picard_converges() {
    let dir = tempfile::tempdir().unwrap();
    let o = heatutm(&["solve-rd"], &configs().join("picard_interval.json"), dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    assert_eq!(r.hashed.results["outcome"], "converged");
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("iteration,iterate_norm,difference_norm,ratio"));
}

#[test]
fn past_the_lifespan_needs_an_override() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("picard_interval.json"))
        .unwrap()
        .replace("\"scale\": 0.01", "\"scale\": 3.0")
        .replace("\"n_x\": 21, \"n_t\": 11", "\"n_x\": 6, \"n_t\": 3")
        .replace("\"h0\"", "\"tol\": { \"max_iter\": 4 },\n    \"h0\"");
    let config = write_config(dir.path(), &text);
    let o = heatutm(&["solve-rd"], &config, &dir.path().join("refused"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("lifespan"));

    let forced = text.replacen('{', "{\n  \"override_lifespan\": true,", 1);
    let config = write_config(dir.path(), &forced);
    let out = dir.path().join("forced");
    let o = heatutm(&["solve-rd"], &config, &out);
    let r = report(&out);
    assert!(out.join("trace.csv").exists());
    assert_eq!(o.status.code() == Some(0), r.passed());
}

#[test]
fn verify_subset_passes() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "{ \"criteria\": [9, 11] }");
    let o = heatutm(&["verify"], &config, &dir.path().join("out"));
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 2, "{stdout}");
}

#[test]
fn norms_and_audit_run_on_their_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = heatutm(&["norms"], &configs().join("norms.json"), &dir.path().join("n"));
    assert!(o.status.success());
    let r = report(&dir.path().join("n"));
    assert!(r.hashed.results["data_norm"].as_f64().unwrap() > 0.0);

    let config = write_config(dir.path(), "{ \"audit\": [\"Zero\", { \"PureTime\": { \"s\": 0.25 } }], \"laplace\": { \"count\": 4 } }");
    let out = dir.path().join("a");
    let o = heatutm(&["audit", "--seed", "3"], &config, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(report(&out).hashed.checks.len(), 3);
}
