use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn semirec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semirec")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = semirec(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("semirec-cli-{}-{name}", std::process::id()))
}

#[test]
fn census() {
    let v = json(&["list-examples"]);
    let rows = v["result"].as_array().unwrap();
    assert_eq!(rows.len(), 11);
    let kind = |k: &str| rows.iter().filter(|r| r["kind"] == k).count();
    assert_eq!((kind("example"), kind("anchor")), (8, 3));
    assert!(rows.iter().all(|r| r["claims"].as_u64().unwrap() > 0));
    let csv = String::from_utf8(semirec(&["list-examples", "--format", "csv"]).stdout).unwrap();
    assert_eq!(csv.lines().count(), 12);
    assert!(csv.starts_with("name,kind,generators,depth,slope,claims,discrepancies\n"));
}

#[test]
fn dirac_series_at_zero_vanishes() {
    let v = json(&["series", "poincare", "--example", "eq2-map", "--measure", "dirac:0", "--set", "0,0", "--n", "10"]);
    let sums = v["result"]["partial_sums"].as_array().unwrap();
    assert_eq!(sums.len(), 10);
    assert!(sums.iter().all(|s| s == "0"));
    assert_eq!(v["result"]["trend"], "bounded");
    assert_eq!(v["config"]["command"], "series");
    assert_eq!(v["config"]["n"], 10);
}

#[test]
fn doubling_series_and_plot_file() {
    let plot = scratch("doubling.dat");
    let v = json(&[
        "series", "poincare", "--example", "doubling", "--set", "(0,1/2)", "--n", "8",
        "--plot", plot.to_str().unwrap(),
    ]);
    assert_eq!(v["result"]["partial_sums"][7], "4");
    assert_eq!(v["result"]["trend"], "linear-growth");
    let data = std::fs::read_to_string(&plot).unwrap();
    assert_eq!(data.lines().next(), Some("1 0.5"));
    assert_eq!(data.lines().count(), 8);
    std::fs::remove_file(plot).unwrap();
}

#[test]
fn naive_series_forms() {
    let per_gen = json(&["series", "naive", "--example", "example2", "--set", "[0,1/2]", "--n", "3"]);
    assert_eq!(per_gen["result"]["generators"].as_array().unwrap().len(), 2);
    let seq = json(&["series", "naive", "--example", "example2", "--set", "[0,1/2]", "--sequence", "1,2,1"]);
    assert_eq!(seq["result"]["partial_sums"].as_array().unwrap().len(), 3);
    let chain = json(&["series", "chain-return", "--example", "example2", "--set", "[0,1/2]", "--n", "4"]);
    assert_eq!(chain["result"]["terms"].as_array().unwrap().len(), 4);
}

#[test]
fn exhaustive_lemma() {
    let v = json(&["lemma-l1", "--exhaustive", "4"]);
    assert_eq!(v["result"]["instances"], 50625);
    assert_eq!(v["result"]["failures"], 0);
    assert!(v["result"]["max_n"].as_u64().unwrap() <= 5);
    let w = json(&["lemma-l1", "--images", "2;3;1"]);
    assert_eq!((w["result"]["n"].as_u64(), w["result"]["verified"].as_bool()), (Some(3), Some(true)));
    let c = json(&["lemma-l1", "--example", "example2", "--cover-bins", "4"]);
    assert_eq!(c["result"]["verified"], true);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| semirec(args).status.code();
    assert_eq!(code(&["classify", "--example", "example1", "--x", "0.5", "--eps", "1/10", "--horizon", "5"]), Some(2));
    assert_eq!(code(&["classify", "--example", "nope", "--x", "1/2", "--eps", "1/10", "--horizon", "5"]), Some(2));
    assert_eq!(code(&["no-such-command"]), Some(2));
    assert_eq!(
        code(&["classify", "--example", "example2", "--subject", "chain", "--x", "1/2", "--eps", "1/10", "--horizon", "5", "--mode", "mc"]),
        Some(2)
    );
    assert_eq!(code(&["ulam", "--example", "example2", "--bins", "10"]), Some(2));
    assert_eq!(code(&["lemma-l1", "--exhaustive", "5"]), Some(2));
    assert_eq!(
        code(&["series", "poincare", "--example", "doubling", "--set", "(0,1/2)", "--n", "10", "--set-budget", "4"]),
        Some(3)
    );
    assert_eq!(
        code(&["kappa", "--example", "example-qu", "--x", "1/3", "--set", "[0,1]", "--n", "20", "--bit-cap", "64"]),
        Some(3)
    );
}

#[test]
fn output_is_byte_identical_across_runs_and_workers() {
    let args = [
        "classify", "--example", "example2", "--subject", "semigroup", "--x", "1/3,2/3,5/7", "--eps", "1/64",
        "--horizon", "2000", "--mode", "mc", "--seed", "11", "--samples", "20",
    ];
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_semirec"))
            .args(args)
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let a = run("1");
    assert_eq!(a, run("1"));
    assert_eq!(a, run("4"));
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["config"]["seed"], 11);
    assert_eq!(v["result"]["summary"]["points"], 3);
}

#[test]
fn classify_grid_and_csv() {
    let v = json(&["classify", "--example", "identity", "--grid", "nodes:4", "--eps", "1/16", "--horizon", "10"]);
    assert_eq!(v["result"]["summary"]["recurrent"], 5);
    assert_eq!(v["result"]["summary"]["uniform"], 5);
    let csv = String::from_utf8(
        semirec(&["classify", "--example", "eq2-map", "--x", "0", "--eps", "1/32", "--horizon", "100", "--format", "csv"])
            .stdout,
    )
    .unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!((row[0], row[1], row[4]), ("0", "7", "true"));
}

#[test]
fn ulam_components_and_matrix_market() {
    let mm = scratch("e2.mtx");
    let v = json(&["ulam", "--example", "example2", "--bins", "16", "--matrix-market", mm.to_str().unwrap()]);
    let comps = v["result"]["components"].as_array().unwrap();
    assert_eq!(comps.len(), 2);
    assert_eq!(comps[0]["hull"], serde_json::json!(["0", "1/2"]));
    assert_eq!(comps[1]["hull"], serde_json::json!(["1/2", "1"]));
    assert!(comps.iter().all(|c| c["uniform_deviation"].as_f64().unwrap() < 1e-9));
    assert_eq!(v["result"]["stochastic"], true);
    assert!(std::fs::read_to_string(&mm).unwrap().starts_with("%%MatrixMarket"));
    std::fs::remove_file(mm).unwrap();
}

#[test]
fn kappa_forms() {
    let v = json(&["kappa", "--example", "example-qu", "--x", "0", "--eps", "1/4", "--n", "5"]);
    assert_eq!(v["result"]["rows"][4]["kappa"], "1/32");
    let csv = String::from_utf8(
        semirec(&["kappa", "--example", "example-qu", "--x", "1", "--set", "{1}", "--n", "3", "--format", "csv"]).stdout,
    )
    .unwrap();
    assert_eq!(csv, "n,count,total,kappa\n1,2,2,1\n2,4,4,1\n3,8,8,1\n");
    let mc = json(&["kappa", "--example", "example-qu", "--x", "1", "--set", "{1}", "--n", "3", "--mode", "mc", "--seed", "1", "--samples", "50"]);
    assert_eq!(mc["result"]["estimate"], "1");
}

#[test]
fn radius_function() {
    let v = json(&["r-function", "--example", "example1", "--x", "1/4"]);
    let lo: semirec::geometry::Rational = v["result"]["lower"].as_str().unwrap().parse().unwrap();
    let hi: semirec::geometry::Rational = v["result"]["upper"].as_str().unwrap().parse().unwrap();
    let twelfth = semirec::geometry::q(1, 12);
    assert!(lo <= twelfth && twelfth <= hi);
}

#[test]
fn rebased_generators_load_as_map_file() {
    let v = json(&["rebase", "--example", "example2", "--words", "1,1;1,2;2,1;2,2"]);
    assert_eq!(v["result"]["p"], serde_json::json!(["1/4", "1/4", "1/4", "1/4"]));
    let file = scratch("rebased.json");
    std::fs::write(&file, serde_json::to_string(&v["result"]).unwrap()).unwrap();
    let w = json(&["classify", "--map-file", file.to_str().unwrap(), "--subject", "chain", "--x", "1/3", "--eps", "1/16", "--horizon", "6"]);
    let direct = json(&["classify", "--example", "example2", "--subject", "chain", "--x", "1/3", "--eps", "1/16", "--horizon", "12"]);
    let even: Vec<u64> = direct["result"]["verdicts"][0]["return_times"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t.as_u64().unwrap())
        .filter(|t| t % 2 == 0)
        .map(|t| t / 2)
        .collect();
    let rebased: Vec<u64> =
        w["result"]["verdicts"][0]["return_times"].as_array().unwrap().iter().map(|t| t.as_u64().unwrap()).collect();
    assert_eq!(rebased, even);
    std::fs::remove_file(file).unwrap();
}

#[test]
fn single_map_file() {
    let file = scratch("half.json");
    std::fs::write(
        &file,
        r#"{"label":"half","pieces":[{"domain":{"lo":"0","hi":"1"},"coeffs":["0","1/2"]}]}"#,
    )
    .unwrap();
    let v = json(&["classify", "--map-file", file.to_str().unwrap(), "--x", "0,1", "--eps", "1/8", "--horizon", "20"]);
    assert_eq!(v["result"]["verdicts"][0]["recurrent"]["status"], "certified");
    assert_eq!(v["result"]["verdicts"][1]["recurrent"]["status"], "none-within-horizon");
    std::fs::write(&file, r#"{"pieces":[{"domain":{"lo":"0","hi":"1/2"},"coeffs":["0","1"]}]}"#).unwrap();
    let out = semirec(&["classify", "--map-file", file.to_str().unwrap(), "--x", "0", "--eps", "1/8", "--horizon", "5"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(file).unwrap();
}

#[test]
fn manifest_runs() {
    let v = json(&["manifest", "example-qu", "--run"]);
    let results = v["result"]["results"].as_array().unwrap();
    assert!(!results.is_empty() && results.iter().all(|r| r["passed"] == true));
}

#[test]
fn single_acceptance_criterion() {
    let out = semirec(&["acceptance", "--criterion", "11"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("PASS [11]"));
    assert_eq!(semirec(&["acceptance", "--criterion", "12"]).status.code(), Some(2));
}
