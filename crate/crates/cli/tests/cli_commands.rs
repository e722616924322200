//! End-to-end checks of the installed command grammar, output shapes, and
//! exit codes.

use std::process::{Command, Output};

fn qtg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn games_list_names_all_builtins() {
    let v = stdout_json(&qtg(&["games", "list"]));
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(names, vec!["chicken", "pd2", "pd3", "hawk_dove"]);
}

#[test]
fn games_show_round_trips_through_load() {
    let out = qtg(&["games", "show", "--game", "pd3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let game = qtg_core::game::load_game(text.trim()).unwrap();
    assert_eq!(game.players(), 3);
    assert_eq!(game.name(), "pd3");
}

#[test]
fn correlated_chicken_referee() {
    let v = stdout_json(&qtg(&[
        "classical",
        "correlated",
        "--game",
        "chicken",
        "--dist",
        "0.3333333,0.3333333,0.3333334,0",
    ]));
    assert_eq!(v["equilibrium"], serde_json::Value::Bool(true));
    let payoffs = v["payoffs"].as_array().unwrap();
    assert!((payoffs[0].as_f64().unwrap() - 5.0 / 3.0).abs() < 1e-5);
    assert!((payoffs[1].as_f64().unwrap() - 5.0 / 3.0).abs() < 1e-5);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn quantum_play_spec_example() {
    let v = stdout_json(&qtg(&[
        "quantum",
        "play",
        "--protocol",
        "ewl2",
        "--game",
        "pd2",
        "--s1",
        "named:quantumLong",
        "--s2",
        "named:quantumLong",
    ]));
    let dist = v["distribution"].as_array().unwrap();
    assert!((dist[0].as_f64().unwrap() - 1.0).abs() < 1e-9);
    for d in &dist[1..] {
        assert!(d.as_f64().unwrap().abs() < 1e-9);
    }
    let payoffs = v["payoffs"].as_array().unwrap();
    assert!((payoffs[0].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert!((payoffs[1].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn pure_and_mixed_nash_chicken() {
    let v = stdout_json(&qtg(&["classical", "pure-nash", "--game", "chicken"]));
    assert_eq!(
        v["equilibria"],
        serde_json::json!([["long", "short"], ["short", "long"]])
    );
    let v = stdout_json(&qtg(&["classical", "mixed-nash", "--game", "chicken"]));
    assert_eq!(v["solution"]["p_long"], serde_json::json!([0.5, 0.5]));
    assert_eq!(v["solution"]["payoffs"], serde_json::json!([1.0, 1.0]));
    assert_eq!(v["degenerate"], serde_json::Value::Bool(false));
}

#[test]
fn dominant_strategy_lookup() {
    let v = stdout_json(&qtg(&["classical", "dominant", "--game", "pd2", "--player", "1"]));
    assert_eq!(v["dominant"], serde_json::json!("short"));
    let v = stdout_json(&qtg(&["classical", "dominant", "--game", "chicken", "--player", "2"]));
    assert_eq!(v["dominant"], serde_json::Value::Null);
}

#[test]
fn hawk_dove_selector() {
    let v = stdout_json(&qtg(&["games", "show", "--game", "hawk_dove:v=4,c=3"]));
    assert_eq!(v["payoffs"]["00"], serde_json::json!([2.0, 2.0]));
    assert_eq!(v["payoffs"]["11"], serde_json::json!([0.5, 0.5]));
    let out = qtg(&["games", "show", "--game", "hawk_dove"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn du_play_reads_shipped_game_files() {
    let path = format!("{}/../../games/pd_4.json", env!("CARGO_MANIFEST_DIR"));
    let v = stdout_json(&qtg(&[
        "quantum",
        "play",
        "--protocol",
        "du",
        "--game",
        &format!("@{path}"),
        "--strategies",
        "du:theta=pi,phi=0;du:theta=pi,phi=0;du:theta=pi,phi=0;du:theta=pi,phi=0",
    ]));
    // Even player count defaults to the all-ones start, landing on all-Long.
    let dist = v["distribution"].as_array().unwrap();
    assert!((dist[0].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let payoffs = v["payoffs"].as_array().unwrap();
    assert!((payoffs[0].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn sweep_grid_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("grid.csv");
    let v = stdout_json(&qtg(&[
        "sweep",
        "grid",
        "--protocol",
        "du",
        "--game",
        "pd3",
        "--vary",
        "1",
        "--others",
        "du:theta=pi,phi=0;du:theta=pi,phi=0",
        "--theta-points",
        "5",
        "--phi-points",
        "3",
        "--init",
        "0",
        "--out",
        csv_path.to_str().unwrap(),
    ]));
    assert_eq!(v["rows"], serde_json::json!(15));
    assert!((v["payoff"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert!(text.starts_with("theta,phi,payoff\n"));
    assert_eq!(text.lines().count(), 16);
}

#[test]
fn mixed_theta_sweep_argmaxes() {
    let v = stdout_json(&qtg(&[
        "sweep", "mixed-theta", "--game", "pd2", "--vary", "1", "--points", "5",
    ]));
    assert_eq!(v["argmax"][0]["value"], serde_json::json!(0.0));
    assert!((v["payoff"].as_f64().unwrap() - 2.5).abs() < 1e-9);
    let v = stdout_json(&qtg(&[
        "sweep", "mixed-theta", "--game", "pd2", "--vary", "2", "--points", "5",
    ]));
    assert!((v["argmax"][0]["value"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn flatness_spread_is_tiny_at_equilibrium() {
    let v = stdout_json(&qtg(&[
        "flatness", "--game", "pd2", "--vary", "2", "--theta", "pi", "--points", "9",
    ]));
    assert!(v["spread"].as_f64().unwrap() <= 1e-9);
    assert!((v["max"].as_f64().unwrap() - 2.5).abs() < 1e-9);
}

#[test]
fn quantum_mixed_equilibrium() {
    let m1 = r#"[{"weight":0.5,"strategy":{"form":"named","name":"long"}},{"weight":0.5,"strategy":{"form":"named","name":"quantumLong1"}}]"#;
    let m2 = r#"[{"weight":0.5,"strategy":{"form":"named","name":"short"}},{"weight":0.5,"strategy":{"form":"named","name":"quantumShort"}}]"#;
    let v = stdout_json(&qtg(&[
        "quantum", "mixed", "--game", "pd2", "--m1", m1, "--m2", m2,
    ]));
    let dist = v["distribution"].as_array().unwrap();
    assert!(dist[0].as_f64().unwrap().abs() < 1e-9);
    assert!((dist[1].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((dist[2].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((v["payoffs"][0].as_f64().unwrap() - 2.5).abs() < 1e-9);
}

#[test]
fn compile_verify_and_emit() {
    let dir = tempfile::tempdir().unwrap();
    let circ_path = dir.path().join("circuit.json");
    let v = stdout_json(&qtg(&[
        "compile",
        "--players",
        "4",
        "--strategies",
        "du:theta=pi,phi=0;du:theta=pi,phi=0;du:theta=pi,phi=0;du:theta=pi,phi=0",
        "--verify",
        "--emit",
        circ_path.to_str().unwrap(),
    ]));
    assert_eq!(v["qubits"], serde_json::json!(4));
    assert_eq!(v["entangling_gates"], serde_json::json!(10));
    assert!(v["verify_max_deviation"].as_f64().unwrap() <= 1e-9);
    let circuit =
        qtg_core::compile::Circuit::from_json(&std::fs::read_to_string(&circ_path).unwrap())
            .unwrap();
    assert_eq!(circuit.qubits(), 4);
}

#[test]
fn seeded_outputs_are_reproducible() {
    let args = [
        "quantum",
        "play",
        "--protocol",
        "ewl2",
        "--game",
        "chicken",
        "--s1",
        "ewl:theta=pi/2,phi=pi/4",
        "--s2",
        "named:long",
        "--shots",
        "200",
        "--seed",
        "9",
    ];
    let a = qtg(&args);
    let b = qtg(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    let counts: u64 = v["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_u64().unwrap())
        .sum();
    assert_eq!(counts, 200);

    let noise = ["compile", "--players", "3", "--noise", "p=0.02,trials=100", "--seed", "5"];
    let a = qtg(&noise);
    let b = qtg(&noise);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_cap_env_is_accepted() {
    let out = Command::new(env!("CARGO_BIN_EXE_qtg"))
        .env("QTG_THREADS", "1")
        .args(["sweep", "mixed-theta", "--game", "pd2", "--vary", "1", "--points", "5"])
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn exit_codes() {
    assert_eq!(qtg(&["warp"]).status.code(), Some(2));
    assert_eq!(
        qtg(&["classical", "correlated", "--game", "chicken", "--dist", "0.5,0.5,0.5,0"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        qtg(&["quantum", "play", "--protocol", "ewl2", "--game", "pd2", "--s1", "named:long"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        qtg(&["games", "show", "--game", "@missing_game_file.json"]).status.code(),
        Some(4)
    );
    let err = qtg(&["classical", "mixed-nash", "--game", "pd3"]);
    assert_eq!(err.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&err.stderr).starts_with("error: "));
}
