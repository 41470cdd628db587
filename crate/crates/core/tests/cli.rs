//! End-to-end tests of the `causal` binary and the bundled model corpus.

mod common;

use std::process::{Command, Output};

use causal_core::distribution::mutual_information;
use causal_core::format;
use causal_core::graph::VertexSet;
use causal_core::intervention::InterventionSpec;

use common::model_path;

fn causal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_causal"))
        .args(args)
        .output()
        .expect("spawn causal binary")
}

fn stdout_of(args: &[&str]) -> String {
    let out = causal(args);
    assert!(
        out.status.success(),
        "`causal {}` failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn path_arg(name: &str) -> String {
    model_path(name).to_string_lossy().into_owned()
}

const CORPUS: [&str; 7] = [
    "chain.model",
    "fork.model",
    "collider.model",
    "sixnode.model",
    "comm_identity.model",
    "comm_noisy.model",
    "feedback3.model",
];

#[test]
fn corpus_loads_validates_and_round_trips_byte_identically() {
    for name in CORPUS {
        let path = model_path(name);
        let text = std::fs::read_to_string(&path).unwrap();
        let doc = format::parse(&text).unwrap();
        assert!(doc.validate().is_empty(), "{name} has violations");
        let loaded = format::load_str(&text).unwrap();
        assert_eq!(
            format::serialize(&loaded),
            text,
            "{name} is not in canonical form"
        );
    }
}

#[test]
fn validate_reports_ok_for_corpus() {
    for name in CORPUS {
        let out = stdout_of(&["validate", &path_arg(name)]);
        assert!(out.starts_with("ok: "), "unexpected output: {out}");
    }
}

#[test]
fn validate_rejects_denormalized_file_with_exit_2() {
    let dir = std::env::temp_dir().join("causal-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.model");
    std::fs::write(
        &bad,
        "model bad\nkind cpt\n\nvar X 2\n\ncpt X\n  () = 0.5 0.4\n",
    )
    .unwrap();
    let out = causal(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("invalid"), "got: {text}");
    assert!(text.contains("sums to"), "got: {text}");
}

#[test]
fn intervene_on_sixnode_matches_library() {
    let out = stdout_of(&[
        "intervene",
        &path_arg("sixnode.model"),
        "--do",
        "X3=0",
        "--on",
        "X6",
    ]);
    let model = format::load_path(model_path("sixnode.model"))
        .unwrap()
        .model
        .to_cpt()
        .unwrap();
    let expect = model
        .interventional_marginal(
            &InterventionSpec::new([(2, 0)]).unwrap(),
            &VertexSet::singleton(5),
        )
        .unwrap();
    assert!(out.contains("P(X6 | do(X3=0))"), "header missing: {out}");
    for (line, want) in out.lines().skip(1).zip(expect.probs()) {
        let got: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
        assert!((got - want).abs() < 1e-11, "line `{line}` vs {want}");
    }
}

#[test]
fn fork_directed_information_equals_mutual_information() {
    // In the fork there is no directed path between the endpoints, so the
    // directed information from X to Z is exactly their mutual information.
    let out = stdout_of(&["di", &path_arg("fork.model"), "--from", "X", "--to", "Z"]);
    let model = format::load_path(model_path("fork.model"))
        .unwrap()
        .model
        .to_cpt()
        .unwrap();
    let mi = mutual_information(
        &model.joint().unwrap(),
        &VertexSet::singleton(1),
        &VertexSet::singleton(2),
    )
    .unwrap()
    .bits()
    .unwrap();
    let shown: f64 = out
        .split_whitespace()
        .rev()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((shown - mi).abs() < 1e-11, "cli {shown} vs lib {mi}");
    assert!(out.starts_with("I(X -> Z) ="), "got: {out}");
}

#[test]
fn condition_on_impossible_value_exits_2() {
    let out = causal(&["condition", &path_arg("chain.model"), "--given", "X=7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn condition_on_zero_mass_evidence_exits_2() {
    // In comm_identity, W and Wt are perfectly correlated: W=0, Wt=1 has
    // probability zero under any conditioning order.
    let out = causal(&[
        "condition",
        &path_arg("comm_identity.model"),
        "--given",
        "W=0,Wt=1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("probability zero"),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn usage_errors_exit_1() {
    let out = causal(&["marginal", &path_arg("chain.model"), "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(1));
    let out = causal(&["not-a-command"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_output_is_machine_readable() {
    let out = stdout_of(&["--json", "joint", &path_arg("chain.model")]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["command"], "joint");
    assert_eq!(v["scope"][0]["name"], "X");
    assert_eq!(v["probs"].as_array().unwrap().len(), 8);

    let out = stdout_of(&[
        "--json",
        "backdoor",
        &path_arg("fork.model"),
        "--cause",
        "X",
        "--effect",
        "Z",
        "--adjust",
        "Y",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["information_ok"], true);
    assert_eq!(v["graphical_ok"], true);
    assert!(v["cdi_bits"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn backdoor_empty_adjustment_shows_confounding() {
    let out = stdout_of(&[
        "backdoor",
        &path_arg("fork.model"),
        "--cause",
        "X",
        "--effect",
        "Z",
    ]);
    assert!(out.contains("information_ok = false"), "got: {out}");
    assert!(out.contains("graphical_ok = false"), "got: {out}");
}

#[test]
fn findbackdoor_puts_the_confounder_first() {
    let out = stdout_of(&[
        "findbackdoor",
        &path_arg("fork.model"),
        "--cause",
        "X",
        "--effect",
        "Z",
    ]);
    assert_eq!(out.lines().next(), Some("{Y}"));
}

#[test]
fn chainrule_terms_add_up() {
    let out = stdout_of(&[
        "--json",
        "chainrule",
        &path_arg("sixnode.model"),
        "--from",
        "X1,X5",
        "--to",
        "X3",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let mi = v["mi_term"].as_f64().unwrap();
    let cdi = v["cdi_term"].as_f64().unwrap();
    let total = v["total"].as_f64().unwrap();
    assert!((mi + cdi - total).abs() <= 1e-9);
    assert!(total > 0.0);
}

#[test]
fn dot_draws_surgery_for_interventions() {
    let out = stdout_of(&["dot", &path_arg("sixnode.model"), "--do", "X3=0"]);
    assert!(out.starts_with("digraph model {"));
    assert!(out.contains("shape=box"));
    assert!(out.contains("[label=\"0\", shape=none]"));
    assert!(!out.contains("v0 -> v2"), "incoming edge survived surgery");
    // Plain output has no surgery markers and both edges into X3.
    let plain = stdout_of(&["dot", &path_arg("sixnode.model")]);
    assert!(plain.contains("v0 -> v2;"));
    assert!(!plain.contains("shape=box"));
}

#[test]
fn dot_writes_to_file() {
    let dir = std::env::temp_dir().join("causal-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let target = dir.join("graph.dot");
    let _ = std::fs::remove_file(&target);
    stdout_of(&[
        "dot",
        &path_arg("chain.model"),
        "--out",
        target.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("digraph model {"));
}

#[test]
fn sampling_is_deterministic_and_needs_a_functional_model() {
    let a = stdout_of(&[
        "sample",
        &path_arg("comm_noisy.model"),
        "--seed",
        "11",
        "--count",
        "5",
    ]);
    let b = stdout_of(&[
        "sample",
        &path_arg("comm_noisy.model"),
        "--seed",
        "11",
        "--count",
        "5",
    ]);
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 5);
    assert!(a.lines().all(|l| l.starts_with("W=")));

    let out = causal(&["sample", &path_arg("chain.model"), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn canonical_reports_identities_for_all_three_structures() {
    for (file, kind) in [
        ("chain.model", "chain"),
        ("fork.model", "fork"),
        ("collider.model", "collider"),
    ] {
        let out = stdout_of(&["canonical", &path_arg(file), "--kind", kind]);
        assert!(out.contains("all identities hold: true"), "{kind}: {out}");
    }
    // Mismatched wiring is a query error.
    let out = causal(&["canonical", &path_arg("chain.model"), "--kind", "fork"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn marginal_and_condition_agree_with_library() {
    let out = stdout_of(&["marginal", &path_arg("comm_identity.model"), "--on", "W,Wt"]);
    // Perfect channel: the diagonal carries all the mass.
    assert!(out.contains("W=0 Wt=0  0.250000000000"), "got: {out}");
    assert!(out.contains("W=1 Wt=1  0.750000000000"), "got: {out}");
    assert!(out.contains("W=0 Wt=1  0"), "got: {out}");

    let out = stdout_of(&["condition", &path_arg("chain.model"), "--given", "Y=1"]);
    assert!(out.starts_with("# P(X, Z | Y=1)"), "got: {out}");
}

#[test]
fn feedback_model_supports_directed_information_queries() {
    // I(Y-block -> X-block) over the feedback rounds is finite and
    // nonnegative; the reverse direction through the memoryless channel
    // stays positive too.
    let out = stdout_of(&[
        "di",
        &path_arg("feedback3.model"),
        "--from",
        "Y1,Y2",
        "--to",
        "X1,X2",
    ]);
    let bits: f64 = out
        .split_whitespace()
        .rev()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(bits >= 0.0);
}
