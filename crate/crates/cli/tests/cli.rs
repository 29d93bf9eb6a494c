//! End-to-end tests of the `bilevel` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use bilevel_cli::format::{parse_instance, serialize_instance, Problem};
use bilevel_core::rational::parse_pq;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn bilevel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bilevel")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

const FIXTURES: &[&str] = &[
    "worked_example_certain.json",
    "worked_example_two_scenarios.json",
    "fractional_gap.json",
    "random_seed1_n6_disjoint_two_scenarios.json",
    "vertex_cover_c4.json",
];

fn temp_file(name: &str, text: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn fixtures_round_trip_byte_for_byte() {
    for name in FIXTURES {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let problem = parse_instance(&text).unwrap();
        assert_eq!(serialize_instance(&problem), text, "{name}");
        assert_eq!(parse_instance(&serialize_instance(&problem)).unwrap(), problem, "{name}");
    }
}

#[test]
fn certain_fixture_has_the_expected_shape() {
    let text = std::fs::read_to_string(fixture("worked_example_certain.json")).unwrap();
    let Problem::Selection { instance, .. } = parse_instance(&text).unwrap() else { panic!() };
    assert_eq!((instance.n(), instance.capacity()), (8, 5));
}

#[test]
fn certain_fixture_solves_to_minus_four() {
    let out = bilevel(&["solve", fixture("worked_example_certain.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["value"], "-4/1");
    assert_eq!(v["solution"]["leader"], serde_json::json!([1, 2, 3]));
    assert_eq!(v["algorithm"], "bsp");
    assert!(v["runtime_ms"].is_number());
}

#[test]
fn two_scenario_fixture_with_disjoint_algorithm() {
    let out =
        bilevel(&["solve", "--algorithm", "disjoint", fixture("worked_example_two_scenarios.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["value"], "-2/1");
}

#[test]
fn plf_dump_lists_the_fractional_optimum() {
    let out = bilevel(&["plf-dump", fixture("fractional_gap.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "3/2 -1/2"), "{text}");
    for line in text.lines() {
        let parts: Vec<&str> = line.split(' ').collect();
        assert_eq!(parts.len(), 2);
        assert!(parts.iter().all(|p| parse_pq(p).is_ok()));
    }
}

#[test]
fn text_output_is_line_oriented() {
    let out = bilevel(&["solve", "--format", "text", fixture("fractional_gap.json").to_str().unwrap()]);
    let text = stdout(&out);
    assert!(text.contains("value: -1/2\n"), "{text}");
    assert!(text.contains("solution.leader_amount: 3/2\n"), "{text}");
}

#[test]
fn oversized_capacity_is_a_validation_error() {
    let text = std::fs::read_to_string(fixture("worked_example_certain.json")).unwrap();
    let path = temp_file("oversized.json", &text.replace("\"capacity\": 5", "\"capacity\": 9"));
    let out = bilevel(&["solve", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("capacity exceeds universe"), "{}", stderr(&out));
}

#[test]
fn every_violation_is_listed() {
    let text = std::fs::read_to_string(fixture("worked_example_certain.json")).unwrap();
    let broken = text.replace("\"capacity\": 5", "\"capacity\": 9").replace("\"-3/1\"", "\"0.5\"");
    let out = bilevel(&["solve", temp_file("broken.json", &broken).to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let err = stderr(&out);
    assert!(err.contains("capacity exceeds universe") && err.contains("rational-format"), "{err}");
}

#[test]
fn exact_halves_parse_but_decimals_do_not() {
    let text = std::fs::read_to_string(fixture("worked_example_certain.json")).unwrap();
    let halves = text.replacen("\"-1/1\"", "\"1/2\"", 1);
    assert_eq!(code(&bilevel(&["solve", temp_file("halves.json", &halves).to_str().unwrap()])), 0);
    let decimal = text.replacen("\"-1/1\"", "\"0.5\"", 1);
    assert_eq!(code(&bilevel(&["solve", temp_file("decimal.json", &decimal).to_str().unwrap()])), 3);
}

#[test]
fn syntax_errors_exit_with_validation_code() {
    let out = bilevel(&["solve", temp_file("syntax.json", "{ \"schema_version\": 1,").to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));
}

#[test]
fn unknown_pairing_lists_valid_pairs() {
    let out =
        bilevel(&["solve", "--algorithm", "continuous-interval", fixture("fractional_gap.json").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("valid pairings"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&bilevel(&["solve"])), 1);
    assert_eq!(code(&bilevel(&["frobnicate"])), 1);
    assert_eq!(code(&bilevel(&["--help"])), 0);
}

#[test]
fn infeasible_leader_exits_with_two() {
    // b = 5 but only four follower items: an empty leader set is infeasible.
    let out = bilevel(&["adversary", fixture("worked_example_certain.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn enumeration_budget_exits_with_four() {
    let out = bilevel(&["exact", "--budget", "2", fixture("vertex_cover_c4.json").to_str().unwrap()]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    assert!(stderr(&out).contains("budget"));
}

#[test]
fn exact_and_approx_on_the_vertex_cover_instance() {
    let path = fixture("vertex_cover_c4.json");
    let exact = json(&bilevel(&["exact", path.to_str().unwrap()]));
    assert_eq!(exact["value"], "6/1");
    let xp = json(&bilevel(&["exact", "--algorithm", "prefix-xp", path.to_str().unwrap()]));
    assert_eq!(xp["value"], "6/1");
    let approx = bilevel(&["approx", path.to_str().unwrap()]);
    assert_eq!(code(&approx), 0);
    let value = parse_pq(json(&approx)["value"].as_str().unwrap()).unwrap();
    assert!(value >= parse_pq("6").unwrap() && value <= parse_pq("12").unwrap());
}

#[test]
fn adversary_replays_the_fractional_example() {
    let path = fixture("fractional_gap.json");
    let v = json(&bilevel(&["adversary", "--amount", "3/2", path.to_str().unwrap()]));
    assert_eq!(v["value"], "-1/2");
    for amount in ["0", "1", "2", "3"] {
        assert_eq!(json(&bilevel(&["adversary", "--amount", amount, path.to_str().unwrap()]))["value"], "0/1");
    }
    assert_eq!(code(&bilevel(&["adversary", "--amount", "0.5", path.to_str().unwrap()])), 1);
}

#[test]
fn generation_is_deterministic_and_matches_the_golden_file() {
    let args = ["generate", "--seed", "1", "--n", "6", "--disjoint", "--set-size", "2"];
    let a = stdout(&bilevel(&args));
    let b = stdout(&bilevel(&args));
    assert_eq!(a, b);
    assert_eq!(a, std::fs::read_to_string(fixture("random_seed1_n6_disjoint_two_scenarios.json")).unwrap());
    let vc = stdout(&bilevel(&["generate", "--kind", "vertex-cover", "--graph", "C4"]));
    assert_eq!(vc, std::fs::read_to_string(fixture("vertex_cover_c4.json")).unwrap());
}

#[test]
fn generated_instances_of_every_kind_solve() {
    for (kind, family) in
        [("bsp", "discrete"), ("rbsp", "interval"), ("rcbsp", "du"), ("rcbsp", "interval"), ("rbckp", "du")]
    {
        let text = stdout(&bilevel(&["generate", "--kind", kind, "--uncertainty", family, "--seed", "4", "--n", "5"]));
        let path = temp_file(&format!("gen_{kind}_{family}.json"), &text);
        let out = bilevel(&["solve", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{kind}/{family}: {}", stderr(&out));
        if kind == "rcbsp" || kind == "rbckp" {
            assert_eq!(code(&bilevel(&["plf-dump", path.to_str().unwrap()])), 0);
        }
    }
}

#[test]
fn outputs_are_identical_across_runs() {
    for name in FIXTURES {
        let path = fixture(name);
        let mut a = json(&bilevel(&["solve", path.to_str().unwrap()]));
        let mut b = json(&bilevel(&["solve", path.to_str().unwrap()]));
        a["runtime_ms"] = Value::Null;
        b["runtime_ms"] = Value::Null;
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn oracle_check_for_the_approximation() {
    let out = bilevel(&["oracle-check", "--seed", "7", "--trials", "50", "--algorithm", "approx2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["mismatches"], 0);
    let ratio = parse_pq(v["max_ratio"].as_str().unwrap()).unwrap();
    assert!(ratio <= parse_pq("2").unwrap());
}

#[test]
fn oracle_check_for_every_algorithm() {
    for alg in [
        "bsp",
        "disjoint",
        "enum",
        "prefix-xp",
        "continuous-discrete",
        "continuous-interval",
        "continuous-du",
        "rbckp-du",
    ] {
        let out = bilevel(&["oracle-check", "--seed", "3", "--trials", "15", "--algorithm", alg, "--format", "text"]);
        assert_eq!(code(&out), 0, "{alg}: {}", stderr(&out));
        assert!(stdout(&out).contains("mismatches: 0"));
    }
}

#[test]
fn oracle_budget_is_enforced() {
    let out = bilevel(&["oracle-check", "--seed", "3", "--trials", "5", "--algorithm", "enum", "--budget", "1"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}
