use std::io::Write;
use std::process::{Command, Output};

use cel::kripke::{satisfies, ContextEnv, Pointed};
use cel::prove::Verdict;
use cel::syntax::parse_formula;

fn cel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cel"))
        .args(args)
        .env_remove("CEL_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const INTROSPECTION: &str = "K{i,1.1} a -> K{i,1.1} K{i,1.1} a";
const CROSS_12: &str = "(K{i,1.2} a)^ci -> (K{i,1.2} K{i,1.2} a)^cj";

#[test]
fn prove_valid_exits_zero() {
    let o = cel(&["prove", INTROSPECTION]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("valid"));
}

#[test]
fn prove_invalid_prints_a_reloadable_counter_model() {
    let o = cel(&["--format", "json", "prove", CROSS_12]);
    assert_eq!(code(&o), 1);
    let v: Verdict = serde_json::from_str(&stdout(&o)).unwrap();
    let Verdict::Invalid { model, world } = &v else {
        panic!("{v:?}")
    };
    let f = parse_formula(CROSS_12).unwrap();
    assert!(!satisfies(model, world, &ContextEnv::fresh(), &f).unwrap());
    let again: Verdict = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
}

#[test]
fn malformed_input_is_a_usage_error() {
    let o = cel(&["parse", "K{"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("error:"));
    let o = cel(&["prove"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("error:"));
    let o = cel(&["--default-variant", "3.1", "parse", "p"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn default_variant_fills_untagged_operators() {
    let o = cel(&["parse", "K_i a"]);
    assert!(stdout(&o).starts_with("K{i,1.1} a\n"));
    let o = cel(&["--default-variant", "2.2", "parse", "K{i} a"]);
    assert!(stdout(&o).starts_with("K{i,2.2} a\n"));
    let o = cel(&["--format", "json", "parse", "(p)^ci"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ast"]["op"], "rel");
    assert_eq!(v["info"]["is_el"], false);
}

#[test]
fn eval_reads_model_and_env_files() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    std::fs::write(
        &model,
        r#"{"worlds":["w1","w2"],"agents":{"i":[["w1","w2"]],"j":[["w1"],["w2"]]},"valuation":{"p":["w1"]}}"#,
    )
    .unwrap();
    let env = dir.path().join("env.json");
    std::fs::File::create(&env)
        .unwrap()
        .write_all(br#"{"ci":"p"}"#)
        .unwrap();
    let m = model.to_str().unwrap();
    let e = env.to_str().unwrap();
    let o = cel(&["eval", "--model", m, "--world", "w1", "K{j} p"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "true"));
    let o = cel(&["eval", "--model", m, "--world", "w1", "K{i} p"]);
    assert_eq!((code(&o), stdout(&o).trim()), (1, "false"));
    // Relative to ci = p, knowing p is trivial for i.
    let o = cel(&[
        "eval",
        "--model",
        m,
        "--world",
        "w1",
        "--env",
        e,
        "(K{i,1.2} p)^ci",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = cel(&["eval", "--model", m, "--world", "w9", "p"]);
    assert_eq!(code(&o), 2);
    let o = cel(&[
        "--format", "dot", "eval", "--model", m, "--world", "w1", "p",
    ]);
    assert!(stdout(&o).starts_with("graph model {"));
}

#[test]
fn reduce_traces_to_plain_logic() {
    let o = cel(&["--format", "json", "reduce", "(K{i,1.2} a)^ci"]);
    assert_eq!(code(&o), 0);
    let trace: cel::reduce::ReductionTrace = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(trace.steps.len(), 2);
    assert!(trace.result.is_el());
}

#[test]
fn dialogue_reports_winner_and_budget() {
    let o = cel(&["dialogue", "(K{i,2.2} a)^ci -> (K{i,2.2} K{i,2.2} a)^cj"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).trim_end().ends_with("P wins the play"));
    let o = cel(&["dialogue", CROSS_12]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).trim_end().ends_with("O wins the play"));
    let o = cel(&["dialogue", "--budget", "2", INTROSPECTION]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).starts_with("error:"));
    let o = Command::new(env!("CARGO_BIN_EXE_cel"))
        .args(["dialogue", INTROSPECTION])
        .env("CEL_BUDGET", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn bundled_plays_replay() {
    let o = cel(&["--format", "json", "replay", "--list"]);
    let names: Vec<(String, String)> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(names.len(), 11);
    for (name, _) in names {
        let o = cel(&["replay", "--builtin", &name]);
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
    }
    let o = cel(&["replay", "--builtin", "nope"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn replay_rejects_illegal_scripts_and_flags_wrong_winners() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("play.json");
    let thesis = r#"{"actor":"P","kind":"thesis","label":"1","payload":"K{i,1.1} a -> a"}"#;
    std::fs::write(
        &path,
        format!(r#"{{"title":"t","winner":"O","moves":[{thesis}]}}"#),
    )
    .unwrap();
    let o = cel(&["replay", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    std::fs::write(&path, r#"{"moves":[]}"#).unwrap();
    let o = cel(&["replay", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn oracle_finds_or_rules_out_counter_models() {
    let o = cel(&[
        "--format",
        "json",
        "oracle",
        "--max-worlds",
        "2",
        "a -> K{i} a",
    ]);
    assert_eq!(code(&o), 1);
    let p: Pointed = serde_json::from_str(&stdout(&o)).unwrap();
    let f = parse_formula("a -> K{i,1.1} a").unwrap();
    assert!(!satisfies(&p.model, &p.world, &ContextEnv::fresh(), &f).unwrap());
    let o = cel(&["oracle", "--max-worlds", "3", INTROSPECTION]);
    assert_eq!(code(&o), 0);
    let o = cel(&[
        "oracle",
        "--max-worlds",
        "3",
        "--budget",
        "5",
        INTROSPECTION,
    ]);
    assert_eq!(code(&o), 3);
    let o = cel(&["oracle", "--max-worlds", "0", INTROSPECTION]);
    assert_eq!(code(&o), 2);
}

#[test]
fn presets_drive_the_environment() {
    let o = cel(&["prove", "--preset", "sceptic", "(K{j} p)^ci <-> K{j} p"]);
    assert_eq!(code(&o), 0);
    let o = cel(&[
        "prove",
        "--preset",
        "contextualist",
        "(K{i} a)^ci -> (K{i} K{i} a)^cj",
    ]);
    assert_eq!(code(&o), 1);
    let o = cel(&[
        "prove",
        "--preset",
        "anti-sceptic",
        "--anti",
        "true",
        "--scep",
        "p & q",
        "(K{j} p)^ci",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("does not imply"));
    let o = cel(&[
        "prove",
        "--env",
        r#"{"ci":"true"}"#,
        "(K{j,1.1} p)^ci <-> K{j,1.1} p",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn dot_only_where_a_model_exists() {
    let o = cel(&["--format", "dot", "prove", "a -> K{i} a"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("graph model {"));
    let o = cel(&["--format", "dot", "reduce", "p"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn suite_agrees() {
    let o = cel(&["suite"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = cel(&["--format", "json", "suite"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["agree"] == true));
}
