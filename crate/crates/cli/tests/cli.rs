use std::process::{Command, Output};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chandisc")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    format!("{DATA}/{name}")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn identical_states_have_zero_divergence() {
    let out = run(&["divergence", "--rho", &data("mixed.json"), "--sigma", &data("mixed.json")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,alpha,epsilon,value,support_ok"));
    let value: f64 = lines.next().unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert_eq!(value, 0.0);
}

#[test]
fn max_divergence_of_a_pure_state_against_the_mixed_qubit() {
    let out = run(&["divergence", "--rho", &data("ket0.json"), "--sigma", &data("mixed.json"), "--kind", "dmax", "--out", "json"]);
    assert!(out.status.success());
    let row = &json(&out)["divergence"][0];
    assert!((row["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(row["alpha"].is_null());
}

#[test]
fn inline_states_are_accepted() {
    let out = run(&["divergence", "--rho", "[[[1,0],[0,0]],[[0,0],[0,0]]]", "--sigma", &data("mixed.json"), "--out", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!((json(&out)["divergence"][0]["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn identity_against_replacer() {
    let out = run(&["chandiv", "--n", &data("identity.json"), "--m", &data("replacer_mixed.json"), "--restarts", "2", "--out", "json"]);
    assert!(out.status.success());
    let row = &json(&out)["chandiv"][0];
    assert!((row["value"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert_eq!(row["witness_hash"].as_str().unwrap().len(), 16);
}

#[test]
fn glt_row_reports_the_threshold() {
    let out = run(&["verify", "glt", "--d", "54", "--out", "json"]);
    assert!(out.status.success());
    let row = &json(&out)["glt"][0];
    assert_eq!(row["violated"], true);
    assert_eq!(row["minimal_violating_d"], 54);
}

#[test]
fn twomat_suite_passes() {
    let out = run(&["verify", "twomat", "--trials", "30", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["verify", "nonsense"]).status.code(), Some(2));
    let base = ["exponents", "--n", &data("identity.json"), "--m", &data("replacer_mixed.json")];
    for rate in ["--rate=-1", "--rate=0", "--rate=abc"] {
        let out = run(&[&base[..], &[rate]].concat());
        assert_eq!(out.status.code(), Some(2), "{rate}");
    }
    let out = run(&["divergence", "--rho", &data("missing.json"), "--sigma", &data("mixed.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oversized_requests_exit_with_three() {
    let out = run(&["chandiv", "--n", &data("identity.json"), "--m", &data("replacer_mixed.json"), "--nmax", "12", "--restarts", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("resource"));
}

#[test]
fn output_is_reproducible() {
    let args = ["exponents", "--n", &data("amplitude_damping.json"), "--m", &data("replacer_mixed.json"), "--rate", "0.5", "--restarts", "2", "--seed", "3"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
