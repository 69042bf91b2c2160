use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ecoopt(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecoopt"))
        .args(args)
        .args(["--no-timestamp", "--threads", "1", "--out"])
        .arg(out)
        .env_remove("ECOOPT_SEED")
        .output()
        .unwrap()
}

#[test]
fn optimize_reports_the_corner_value() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ecoopt(&["optimize"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("optimize.json")).unwrap()).unwrap();
    let f = json["solver"]["objective_value"].as_f64().unwrap();
    assert!((f - 2.946730).abs() < 1e-6, "{f}");
    assert_eq!(json["agreement"], serde_json::Value::Bool(true));
}

#[test]
fn invalid_weights_are_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ecoopt(&["optimize", "--weights", "0.5,0.5,0.5"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("plain-file");
    fs::write(&file, b"x").unwrap();
    let o = ecoopt(&["optimize"], &file.join("sub"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_data_directory_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope");
    let o = ecoopt(
        &["experiment", "compare", "--data", missing.to_str().unwrap()],
        &tmp.path().join("out"),
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn generated_csv_feeds_experiments() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    assert!(ecoopt(&["gen-data", "--all", "--seed", "7"], &data).status.success());
    for name in ["manifest.json", "sustainability.csv"] {
        assert!(data.join(name).exists(), "{name}");
    }
    let o = ecoopt(
        &["experiment", "sectors", "--data", data.to_str().unwrap()],
        &tmp.path().join("out"),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(tmp.path().join("out/experiment-sectors.md").exists());
}
