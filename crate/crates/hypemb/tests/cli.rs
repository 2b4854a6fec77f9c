use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn hypemb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypemb")).args(args).output().unwrap()
}

fn with_config(command: &str, config: &str, extra: &[&str]) -> Output {
    let path = configs().join(config);
    let mut args = vec![command, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    hypemb(&args)
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn small_geometry_run_passes() {
    let out = with_config("verify-geometry", "fp_ab.json", &["--radius", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["command"], "verify-geometry");
    assert_eq!(r["pass"], true);
}

#[test]
fn theta_on_empty_tuple_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tuples.json");
    std::fs::write(&input, "[]").unwrap();
    let out = with_config("theta", "z2_t_volume.json", &["--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"], Value::Array(vec![]));
}

#[test]
fn theta_on_a_factor_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tuples.json");
    std::fs::write(&input, r#"[[[], [[0, [2, 0]]], [[0, [0, 3]]]]]"#).unwrap();
    let out = with_config("theta", "z2_t_volume.json", &["--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["results"].as_array().unwrap().len(), 1);
    // relative distances are all 1 in infinity mode, so the triangle is not
    // small and Θ returns the signed area 6/2
    assert_eq!(r["results"][0]["value"], "3/1");
}

#[test]
fn remark_cup_rows() {
    let out = with_config("remark-cup", "z2_t.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[2]["n"], 3);
    assert_eq!(rows[2]["cup_an_1_bn"], "-9/1");
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"model": {"factors": []}}"#).unwrap();
    let out = hypemb(&["verify-geometry", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = hypemb(&["verify-geometry", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // theta without tuples is a configuration problem
    let out = with_config("theta", "z2_t_volume.json", &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let csv = dir.path().join(format!("{name}.csv"));
        let o = with_config(
            "bbf-check",
            "fp_ab_word.json",
            &["--radius", "2", "--seed", "3", "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap()],
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        (std::fs::read(out).unwrap(), std::fs::read(csv).unwrap())
    };
    assert_eq!(run("a"), run("b"));
    let out = dir.path().join("ext.json");
    let ext = |jobs: &str| {
        let o = with_config(
            "verify-extension",
            "z2_t_volume.json",
            &["--radius", "1", "--jobs", jobs, "--out", out.to_str().unwrap()],
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(&out).unwrap()
    };
    assert_eq!(ext("1"), ext("3"));
}
