use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relent"))
        .args(args)
        .env_remove("ENTROPY_MAX_DIM")
        .output()
        .expect("binary runs")
}

fn run_with_data(args: &[&str]) -> Output {
    let resolved: Vec<String> = args
        .iter()
        .map(|a| match a.strip_prefix('@') {
            Some(name) => data(name).display().to_string(),
            None => a.to_string(),
        })
        .collect();
    run(&resolved.iter().map(String::as_str).collect::<Vec<_>>())
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn compute_identical_inputs_is_zero() {
    let out = run_with_data(&["compute", "--phi", "fermionic", "--a", "@a_diag.json", "--b", "@a_diag.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    for k in ["direct", "gateaux", "integral"] {
        assert!(v[k]["value"].as_f64().unwrap().abs() <= 1e-12);
    }
}

#[test]
fn compute_fermionic_commuting_pair() {
    let out = run_with_data(&["compute", "--phi", "fermionic", "--a", "@a_diag.json", "--b", "@b_half.json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let direct = v["direct"]["value"].as_f64().unwrap();
    assert!((direct - 0.16456575701010).abs() <= 1e-12);
    assert_eq!(v["agree"], true);
}

#[test]
fn compute_accepts_csv_matrices() {
    let out = run_with_data(&["compute", "--phi", "power2", "--a", "@a_diag.csv", "--b", "@b_half.json", "--format", "csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("quantity,value,reason\ndirect,8.0000000000000016e-2,"), "{text}");
}

#[test]
fn compute_mismatch_is_infinite() {
    let out = run_with_data(&["compute", "--phi", "fermionic", "--a", "@a_mismatch.json", "--b", "@b_kernel.json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    for k in ["direct", "gateaux", "integral"] {
        assert_eq!(v[k]["value"], "inf");
        assert_eq!(v[k]["reason"], "KernelMismatchAtZero");
    }
    assert_eq!(v["case"]["at_zero"]["status"], "EigenvalueWithMismatch");
    assert!(v["theorem4"].is_null() && v["klein_ratio"].is_null());
}

#[test]
fn compute_agreement_uses_complement() {
    let out = run_with_data(&["compute", "--phi", "fermionic", "--a", "@a_agree.json", "--b", "@b_kernel.json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let expect = 0.7 * (0.7f64 / 0.5).ln() + 0.3 * (0.3f64 / 0.5).ln();
    assert!((v["direct"]["value"].as_f64().unwrap() - expect).abs() <= 1e-12);
}

#[test]
fn input_errors_exit_one_and_name_the_field() {
    let out = run_with_data(&["compute", "--phi", "fermionic", "--a", "@bad_im.json", "--b", "@b_half.json"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--a: ") && stderr(&out).contains("im:"), "{}", stderr(&out));

    let out = run_with_data(&["compute", "--phi", "fermionic", "--a", "@c3.json", "--b", "@b_half.json"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--b"), "{}", stderr(&out));

    let out = run_with_data(&["compute", "--phi", "fermionic", "--a", "@out_of_range.json", "--b", "@b_half.json"]);
    assert_eq!(code(&out), 1);

    let out = run_with_data(&["compute", "--phi", "fermionic", "--a", "@missing.json", "--b", "@b_half.json"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--a: cannot read"));

    let out = run_with_data(&["compute", "--phi", "cubic", "--a", "@a_diag.json", "--b", "@b_half.json"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn max_dim_env_caps_inputs() {
    let out = Command::new(env!("CARGO_BIN_EXE_relent"))
        .args(["converge", "--phi", "fermionic", "--ambient", "8", "--seed", "1"])
        .env("ENTROPY_MAX_DIM", "4")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("ENTROPY_MAX_DIM"));
}

#[test]
fn converge_identity_chain_is_constant() {
    let out = run_with_data(&[
        "converge", "--phi", "fermionic", "--a", "@a_diag.json", "--b", "@b_half.json", "--chain-file", "@chain_identity.json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["ranks"], serde_json::json!([2]));
    assert_eq!(v["values"][0]["value"], v["limit_value"]["value"]);
}

#[test]
fn converge_random_ambient_is_monotone() {
    for chain in ["prefix", "random"] {
        let out = run(&["converge", "--phi", "fermionic", "--ambient", "8", "--seed", "11", "--chain", chain]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let v = json(&out);
        let values: Vec<f64> = v["values"].as_array().unwrap().iter().map(|x| x["value"].as_f64().unwrap()).collect();
        assert_eq!(values.len(), 8);
        assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-9));
        assert_eq!(v["passed"], true);
    }
}

#[test]
fn converge_rejects_non_nested_chain() {
    let out = run_with_data(&[
        "converge", "--phi", "fermionic", "--a", "@a_diag.json", "--b", "@b_half.json", "--chain-file", "@chain_not_nested.json",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--chain-file"), "{}", stderr(&out));
}

#[test]
fn converge_writes_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let p = path.display().to_string();
    let out = run(&["converge", "--phi", "bosonic", "--ambient", "4", "--seed", "2", "--format", "csv", "--out", &p]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rank,value,reason");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("1,"));
}

#[test]
fn trials_fermionic_has_no_violations() {
    let out = run(&["trials", "--phi", "fermionic", "--trials", "1000", "--seed", "5", "--dim-a", "4", "--dim-b", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["trials"], 1000);
    assert_eq!(v["violations"], serde_json::json!([]));
}

#[test]
fn trials_counterexample_mode() {
    let out = run(&["trials", "--phi", "quartic", "--trials", "100000", "--seed", "2024", "--counterexample"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["witness"]["magnitude"].as_f64().unwrap() > 1e-6);
    let out = run(&["trials", "--phi", "power2", "--trials", "500", "--seed", "1", "--counterexample"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["inconclusive"], true);
}

#[test]
fn trials_rejects_empty_and_non_monotone_runs() {
    let out = run(&["trials", "--phi", "fermionic", "--trials", "0", "--seed", "1"]);
    assert_eq!(code(&out), 1);
    let out = run(&["trials", "--phi", "quartic", "--trials", "10", "--seed", "1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn repcheck_builtins() {
    let out = run(&["repcheck", "--phi", "fermionic"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["integrability"]["inverse_integral_upper"], "divergent");
    assert!(v["integrability"]["log_integral_upper"].is_f64());
    let out = run(&["repcheck", "--phi", "power2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["consistency"]["max_dev_phi_prime"].as_f64().unwrap(), 0.0);
}

fn spec_file(edit: impl FnOnce(&mut Value)) -> (tempfile::TempDir, String) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.json");
    let mut v: Value = serde_json::from_str(&relent_core::PhiSpec::fermionic().unwrap().to_json().unwrap()).unwrap();
    edit(&mut v);
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    let p = path.display().to_string();
    (dir, p)
}

#[test]
fn repcheck_spec_files() {
    let (_d, ok) = spec_file(|_| {});
    assert_eq!(code(&run(&["repcheck", "--phi-file", &ok])), 0);

    let (_d, negative) = spec_file(|v| v["b"] = serde_json::json!(-1.0));
    let out = run(&["repcheck", "--phi-file", &negative]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("b: must be >= 0"), "{}", stderr(&out));

    let (_d, shifted) = spec_file(|v| v["a"] = serde_json::json!(0.25));
    assert_eq!(code(&run(&["repcheck", "--phi-file", &shifted])), 2);

    let (_d, garbled) = spec_file(|v| *v = serde_json::json!({"name": "fermionic"}));
    assert_eq!(code(&run(&["repcheck", "--phi-file", &garbled])), 1);
}

#[test]
fn tolerances_must_be_positive() {
    let out = run_with_data(&["compute", "--phi", "fermionic", "--a", "@a_diag.json", "--b", "@b_half.json", "--tol-lambda", "0"]);
    assert_ne!(code(&out), 0);
}

#[test]
fn reruns_are_byte_identical() {
    let cases: [&[&str]; 3] = [
        &["trials", "--phi", "bosonic", "--trials", "200", "--seed", "9", "--dim-a", "5", "--dim-b", "2"],
        &["converge", "--phi", "fermionic", "--ambient", "12", "--seed", "4", "--chain", "random"],
        &["trials", "--phi", "quartic", "--trials", "5000", "--seed", "2024", "--counterexample", "--format", "csv"],
    ];
    for args in cases {
        let (x, y) = (run(args), run(args));
        assert!(!x.stdout.is_empty());
        assert_eq!(x.stdout, y.stdout, "{args:?}");
    }
}
