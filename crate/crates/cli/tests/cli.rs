use std::path::PathBuf;
use std::process::{Command, Output};

use homlab::decon::{validate, Deconstruction};
use homlab::relstruct::Structure;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn homlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homlab"))
        .args(args)
        .env_remove("HOMLAB_GUARD")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn triangle_does_not_map_to_an_edge() {
    let o = homlab(&["hom", "--from", &data("k3.json"), "--to", &data("k2.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "no homomorphism");

    let o = homlab(&["hom", "--from", &data("k2.json"), "--to", &data("k3.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1 -> 1\n2 -> 2\n");
}

#[test]
fn pebbles_for_the_triangle() {
    let o = homlab(&["game", "min-pebbles", "--in", &data("k3.json"), "--max", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn width_of_the_edge_over_itself() {
    let o = homlab(&["decon", "width", "--in", &data("self_k2.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2");
}

#[test]
fn game_exit_codes_follow_the_winner() {
    let args = |v: &'static str| ["game", "wins", "--a", "K3", "--b", "K2", "--v", v];
    let run = |v| {
        let mut a = args(v).map(String::from);
        a[3] = data("k3.json");
        a[5] = data("k2.json");
        homlab(&a.iter().map(String::as_str).collect::<Vec<_>>())
    };
    assert_eq!(run("1,1").status.code(), Some(0));
    let lost = run("1,1,1");
    assert_eq!(lost.status.code(), Some(1));
    assert!(stdout(&lost).contains("spoiler"));
}

#[test]
fn outputs_are_deterministic_and_reparse() {
    let args = ["core", "--in", &data("k3.json")];
    let first = homlab(&args);
    let second = homlab(&args);
    assert_eq!(first.stdout, second.stdout);
    let s = Structure::from_json(&stdout(&first)).unwrap();
    assert!(s.validate().is_empty());
    assert_eq!(s.len(), 3);

    let o = homlab(&["decon", "build-td", "--tree", &data("t22.txt"), "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let d = Deconstruction::from_json(&stdout(&o)).unwrap();
    assert!(validate(&d).is_empty());
}

#[test]
fn invariants_of_a_path() {
    let o = homlab(&["--json", "invariants", "--in", &data("p4.txt")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tree_depth"], 2);
    assert_eq!(v["treewidth"], 1);
    assert_eq!(v["pathwidth"], 1);
}

#[test]
fn reductions_solve_and_trace() {
    let o = homlab(&["reduce", "decon", "--decon", &data("self_k2.json"), "--target", &data("k2_star.json"), "--solve"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "homomorphism");

    let o = homlab(&["reduce", "incidence", "--from", &data("k3.json"), "--to", &data("k2.json"), "--solve"]);
    assert_eq!(o.status.code(), Some(1));

    let f = "(exists x (not (atom E x x)))";
    let o = homlab(&["reduce", "mc", "--in", &data("k2.json"), "--formula", f, "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["input_digest"].as_str().unwrap().len(), 64);
    let target = Structure::from_json(&v["output"]["target"].to_string()).unwrap();
    assert!(target.validate().is_empty());
}

#[test]
fn model_checking_exit_codes() {
    let o = homlab(&["mc", "--in", &data("k2.json"), "--formula", "(exists x (atom E x x))"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "false");
}

#[test]
fn guards_and_usage_errors_exit_with_two() {
    let o = homlab(&["--guard", "pebbles=1", "game", "wins", "--a", &data("k3.json"), "--b", &data("k2.json"), "--v", "1,1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("guard exceeded"), "{err}");

    let o = Command::new(env!("CARGO_BIN_EXE_homlab"))
        .args(["game", "wins", "--a", &data("k3.json"), "--b", &data("k2.json"), "--v", "1,1"])
        .env("HOMLAB_GUARD", "pebbles=1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(homlab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(homlab(&["hom", "--from", &data("missing.json"), "--to", &data("k2.json")]).status.code(), Some(2));
}

#[test]
fn generated_graphs_round_trip_through_invariants() {
    let o = homlab(&["--json", "generate", "grid", "3"]);
    let g = Structure::from_json(&stdout(&o)).unwrap();
    assert_eq!(g.len(), 9);
}
