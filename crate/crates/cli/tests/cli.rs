use std::path::Path;
use std::process::{Command, Output};

fn corrnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn synth(dir: &Path) {
    let out = corrnet(&[
        "synth",
        "--n",
        "20",
        "--sectors",
        "4",
        "--days",
        "300",
        "--seed",
        "2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn synth_then_build() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    let prices = dir.path().join("prices.csv");
    let out_dir = dir.path().join("nets");
    let out = corrnet(&[
        "build",
        "--input",
        prices.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("pmfg: 20 vertices, 54 edges"), "{stdout}");
    for file in ["similarity.csv", "network_pd.csv", "network_pmfg.csv"] {
        assert!(out_dir.join(file).is_file(), "{file}");
    }
}

#[test]
fn analyze_with_config() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    let config = dir.path().join("exp.toml");
    std::fs::write(&config, "louvain_orders = 3\nseed = 5\n").unwrap();
    let out_dir = dir.path().join("run");
    let out = corrnet(&[
        "analyze",
        "louvain",
        "--input",
        dir.path().join("prices.csv").to_str().unwrap(),
        "--sectors",
        dir.path().join("sectors.csv").to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("reports/louvain_ari.json").is_file());
    assert!(!out_dir.join("reports/nsc_ari_sweep.json").exists());
}

#[test]
fn validation_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "q = 1\n").unwrap();
    let out = corrnet(&[
        "run",
        "--input",
        dir.path().join("prices.csv").to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("run").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = corrnet(&[
        "synth",
        "--n",
        "3",
        "--sectors",
        "5",
        "--out",
        dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_is_not_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = corrnet(&[
        "build",
        "--input",
        dir.path().join("absent.csv").to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}
