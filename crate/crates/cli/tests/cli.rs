use std::path::Path;
use std::process::{Command, Output};

fn geomgan(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geomgan"))
        .args(args)
        .current_dir(cwd)
        .env_remove("GEOMGAN_SEED")
        .output()
        .expect("binary runs")
}

fn ok(o: &Output) {
    assert!(o.status.success(), "exit {:?}\nstderr: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
}

const SPEC: &str = r#"{
  "components": [
    {"mean": [0, 0], "cov_diag": [0.5, 0.5], "frequency": 0.3},
    {"mean": [5, 0], "cov_diag": [0.5, 0.5], "frequency": 0.7}
  ],
  "total_n": 200,
  "seed": 4
}"#;

const SMALL_AE: &str = r#"{"hidden_dims": [8, 2, 8], "epochs": 5}"#;

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn single_domain_pipeline(dir: &Path, out: &str) {
    ok(&geomgan(&["simulate", "--config", "spec.json", "--out", &format!("{out}/sim")], dir));
    let data = format!("{out}/sim/data.csv");
    ok(&geomgan(&["train-ae", "--config", "ae.json", "--data", &data, "--label-column", "label", "--seed", "3", "--out", &format!("{out}/ae")], dir));
    let manifold = format!("{out}/ae/manifold.gmae");
    ok(&geomgan(&["partition", "--data", &data, "--manifold", &manifold, "--label-column", "label", "--out", &format!("{out}/part")], dir));
    ok(&geomgan(
        &[
            "train-gan", "--config", "gan.json", "--data", &data, "--manifold", &manifold, "--partition", &format!("{out}/part"),
            "--label-column", "label", "--seed", "3", "--out", &format!("{out}/gan"),
        ],
        dir,
    ));
}

#[test]
fn pipeline_writes_manifests_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write(dir, "spec.json", SPEC);
    write(dir, "ae.json", SMALL_AE);
    write(dir, "gan.json", r#"{"epochs": 3, "n_generate": 20, "gan": {"generator_hidden": [8], "discriminator_hidden": [8], "batch_size": 50}}"#);
    single_domain_pipeline(dir, "a");
    single_domain_pipeline(dir, "b");
    for stage in ["sim", "ae", "part", "gan"] {
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.join(format!("a/{stage}/manifest.json"))).unwrap()).unwrap();
        assert!(!manifest["outputs"].as_object().unwrap().is_empty(), "{stage}");
        assert!(manifest["config_hash"].as_str().unwrap().len() == 64);
    }
    for f in ["ae/manifold.gmae", "part/partition.csv", "part/weights.csv", "gan/generator.gmgn", "gan/discriminator.gmgn", "gan/train_log.csv"] {
        assert_eq!(std::fs::read(dir.join("a").join(f)).unwrap(), std::fs::read(dir.join("b").join(f)).unwrap(), "{f}");
    }
    let weights = std::fs::read_to_string(dir.join("a/part/weights.csv")).unwrap();
    assert_eq!(weights.lines().count(), 201);
}

#[test]
fn unknown_config_key_exits_1_and_names_key() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write(dir, "spec.json", SPEC);
    ok(&geomgan(&["simulate", "--config", "spec.json", "--out", "sim"], dir));
    write(dir, "bad.json", r#"{"epochs": 2, "not_a_field": true}"#);
    let o = geomgan(&["train-ae", "--config", "bad.json", "--data", "sim/data.csv", "--out", "ae", "--json-errors"], dir);
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("not_a_field"), "{stderr}");
    let json_line = stderr.lines().find(|l| l.starts_with('{')).expect("json error line");
    let v: serde_json::Value = serde_json::from_str(json_line).unwrap();
    assert_eq!(v["exit_code"], 1);
    assert_eq!(v["kind"], "config");
}

#[test]
fn missing_input_and_bad_usage_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let o = geomgan(&["train-ae", "--data", "nope.csv", "--out", "x"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    let o = geomgan(&["reproduce", "no-such-scenario", "--out", "x"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn corrupt_model_is_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write(dir, "spec.json", SPEC);
    ok(&geomgan(&["simulate", "--config", "spec.json", "--out", "sim"], dir));
    std::fs::write(dir.join("manifold.gmae"), b"junk").unwrap();
    let o = geomgan(&["partition", "--data", "sim/data.csv", "--manifold", "manifold.gmae", "--label-column", "label", "--out", "p"], dir);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn help_documents_config_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let o = geomgan(&["train-mgm", "--help"], tmp.path());
    ok(&o);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("Config defaults"), "{text}");
    assert!(text.contains("\"residual_generators\": true"), "{text}");
}

#[test]
fn mgm_train_map_eval_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write(dir, "spec.json", SPEC);
    ok(&geomgan(&["simulate", "--config", "spec.json", "--seed", "1", "--out", "x"], dir));
    ok(&geomgan(&["simulate", "--config", "spec.json", "--seed", "2", "--out", "y"], dir));
    write(
        dir,
        "mgm.json",
        &format!(r#"{{"autoencoder": {SMALL_AE}, "partition": {{"k_max": 4}}, "epochs": 2, "mgm": {{"generator_hidden": [8], "discriminator_hidden": [8], "batch_size": 50}}}}"#),
    );
    ok(&geomgan(
        &["train-mgm", "--config", "mgm.json", "--domain-x", "x/data.csv", "--domain-y", "y/data.csv", "--label-column", "label", "--out", "m"],
        dir,
    ));
    assert!(dir.join("m/model/gen_xy.gmgn").exists());
    ok(&geomgan(&["map", "--model", "m/model", "--data", "x/data.csv", "--label-column", "label", "--out", "mapped"], dir));
    let mapped = std::fs::read_to_string(dir.join("mapped/mapped.csv")).unwrap();
    assert_eq!(mapped.lines().count(), 201);
    write(dir, "eval.json", r#"{"r2_population": 0, "kde_grid": {"x_range": [-3, 8], "y_range": [-3, 3], "resolution": 10}}"#);
    ok(&geomgan(
        &["eval", "--config", "eval.json", "--model", "m/model", "--domain-x", "x/data.csv", "--domain-y", "y/data.csv", "--out", "ev"],
        dir,
    ));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("ev/report.json")).unwrap()).unwrap();
    let f = report["domains"]["model/x_to_y"]["macro_f"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&f));
    assert!(dir.join("ev/kde_x_to_y.csv").exists());
    assert!(report["r_squared"]["population_0/x_to_y"]["after"].is_number());
}

#[test]
fn reproduce_gaussian_alignment_reports_four_variants() {
    let tmp = tempfile::tempdir().unwrap();
    let o = geomgan(&["reproduce", "gaussian-alignment", "--seed", "0", "--out", "run"], tmp.path());
    ok(&o);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("run/report.json")).unwrap()).unwrap();
    for variant in ["mgm", "gan", "cycle_gan", "random_weights"] {
        for dir in ["x_to_y", "y_to_x"] {
            assert!(report["domains"][format!("{variant}/{dir}")]["macro_f"].is_number(), "{variant}/{dir}");
        }
    }
    assert!(tmp.path().join("run/manifest.json").exists());
}
