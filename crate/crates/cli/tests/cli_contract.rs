//! Exit codes, file round-trips, and reproducibility of the `entkit`
//! binary itself.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use tempfile::tempdir;

use entkit::tol::Tolerances;
use entkit_cli::io::{parse_state_file, render_state_file, StateFile};

fn entkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn generate_then_analyze_bell() {
    let dir = tempdir().unwrap();
    let state = dir.path().join("bell.json");
    let out = entkit(&["generate", "bell", "--out", state.to_str().unwrap()]);
    assert!(out.status.success());

    let report = dir.path().join("report.json");
    let out = entkit(&[
        "--json",
        report.to_str().unwrap(),
        "analyze",
        state.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("overall: Distillable"), "{text}");
    assert!(text.contains("NPT"), "{text}");

    let json: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(json["report"]["overall"], "Distillable");
    let witness = json["report"]["ppt"]["min_eigenvalue"].as_f64().unwrap();
    assert!((witness + 0.5).abs() < 1e-9);
    assert!(json["input_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn malformed_input_exits_2_without_report() {
    let dir = tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, b"{ this is not json").unwrap();
    let report = dir.path().join("report.json");
    let out = entkit(&[
        "--json",
        report.to_str().unwrap(),
        "analyze",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!report.exists());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("parse error"), "{err}");
}

#[test]
fn invalid_density_matrix_exits_2() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("not_a_state.json");
    fs::write(
        &path,
        r#"{"schema_version":1,"dA":2,"dB":1,"matrix":[[[1.5,0.0],[0.0,0.0]],[[0.0,0.0],[-0.5,0.0]]]}"#,
    )
    .unwrap();
    let out = entkit(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tensor_power_cap_exits_3() {
    let dir = tempdir().unwrap();
    let tiles = dir.path().join("tiles.json");
    assert!(
        entkit(&["generate", "tiles", "--out", tiles.to_str().unwrap()])
            .status
            .success()
    );
    let out = entkit(&[
        "ef",
        tiles.to_str().unwrap(),
        "--tensor-n",
        "3",
        "--restarts",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("cap"), "{err}");
}

#[test]
fn search_caps_exit_3() {
    let out = entkit(&["search", "--dims", "5x2", "--rank", "2", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn mixture_amplitude_parsing() {
    // Accepts complex amplitude syntax and normalizes.
    let out = entkit(&[
        "generate",
        "mixture",
        "--p",
        "0.5",
        "--psi",
        "0.6, 0, 0.3i, 0.8-0.1i",
    ]);
    assert!(out.status.success());
    let file = parse_state_file(stdout_of(&out).as_bytes()).unwrap();
    let state = file.into_state(&Tolerances::default()).unwrap();
    assert_eq!(state.dims(), (2, 2));

    let out = entkit(&["generate", "mixture", "--p", "0.5", "--psi", "1,2,nope,4"]);
    assert_eq!(out.status.code(), Some(2));

    let out = entkit(&["generate", "mixture", "--p", "0.5", "--psi", "1,2,3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_stdout_is_a_valid_state_file() {
    for kind in ["bell", "product", "tiles", "random", "random-separable"] {
        let out = entkit(&["generate", kind, "--seed", "5"]);
        assert!(out.status.success(), "{kind}");
        let file = parse_state_file(stdout_of(&out).as_bytes()).unwrap();
        assert!(file.into_state(&Tolerances::default()).is_ok(), "{kind}");
    }

    // Explicit dimensions carry through.
    let out = entkit(&["generate", "product", "--dims", "3x2"]);
    let file = parse_state_file(stdout_of(&out).as_bytes()).unwrap();
    let state = file.into_state(&Tolerances::default()).unwrap();
    assert_eq!(state.dims(), (3, 2));

    let out = entkit(&[
        "generate", "random", "--dims", "4x4", "--rank", "2", "--seed", "8",
    ]);
    let file = parse_state_file(stdout_of(&out).as_bytes()).unwrap();
    let state = file.into_state(&Tolerances::default()).unwrap();
    assert_eq!(state.dims(), (4, 4));
    assert_eq!(state.rank(1e-10), 2);

    let out = entkit(&["generate", "random", "--dims", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn search_writes_summary_and_histogram() {
    let dir = tempdir().unwrap();
    let out_dir = dir.path().join("results");
    let out = entkit(&[
        "--seed",
        "9",
        "search",
        "--dims",
        "2x2",
        "--rank",
        "2",
        "--trials",
        "200",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out_dir.join("summary.json").exists());
    assert!(out_dir.join("participation_histogram.json").exists());

    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["report"]["trials"], 200);
    assert_eq!(summary["report"]["candidates"], 0);
}

fn run_twice_and_compare(args: &[&str]) {
    let first = entkit(args);
    let second = entkit(args);
    assert!(first.status.success(), "{args:?}");
    assert_eq!(first.stdout, second.stdout, "stdout differs for {args:?}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    run_twice_and_compare(&[
        "generate", "random", "--dims", "3x3", "--rank", "4", "--seed", "99",
    ]);
    run_twice_and_compare(&[
        "generate",
        "random-separable",
        "--dims",
        "2x3",
        "--terms",
        "5",
        "--seed",
        "123",
    ]);
    run_twice_and_compare(&["generate", "mixture", "--p", "0.25", "--psi", "1,0,0,1"]);
}

fn read_dir_sorted(path: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(path)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn json_reports_are_reproducible() {
    let dir = tempdir().unwrap();
    let state = dir.path().join("state.json");
    assert!(entkit(&[
        "--seed",
        "7",
        "generate",
        "random",
        "--dims",
        "2x2",
        "--rank",
        "3",
        "--out",
        state.to_str().unwrap(),
    ])
    .status
    .success());

    // Ensemble size below the rank is a parameter error.
    let out = entkit(&["ef", state.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let mut outputs = Vec::new();
    for run in 0..2 {
        let report = dir.path().join(format!("ef_{run}.json"));
        let out = entkit(&[
            "--seed",
            "11",
            "--json",
            report.to_str().unwrap(),
            "ef",
            state.to_str().unwrap(),
            "--restarts",
            "4",
        ]);
        assert!(out.status.success());
        outputs.push((out.stdout, fs::read(&report).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);

    // Two-qubit inputs carry the concurrence-oracle comparison in the report.
    let ef_json: serde_json::Value = serde_json::from_slice(&outputs[0].1).unwrap();
    let oracle = ef_json["report"]["oracle_2q_bits"]
        .as_f64()
        .expect("oracle column");
    let value = ef_json["report"]["value_bits"].as_f64().unwrap();
    assert!(
        (value - oracle).abs() < 1e-3,
        "value {value} vs oracle {oracle}"
    );
    assert_eq!(ef_json["report"]["upper_bound"], true);

    // Search: stdout, summary, histogram, and survivor files all identical.
    let mut search_outputs = Vec::new();
    for run in 0..2 {
        let out_dir = dir.path().join(format!("search_{run}"));
        let out = entkit(&[
            "--seed",
            "13",
            "search",
            "--dims",
            "2x3",
            "--rank",
            "2",
            "--trials",
            "300",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let names = read_dir_sorted(&out_dir);
        let contents: Vec<Vec<u8>> = names
            .iter()
            .map(|n| fs::read(out_dir.join(n)).unwrap())
            .collect();
        search_outputs.push((out.stdout, names, contents));
    }
    assert_eq!(search_outputs[0], search_outputs[1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn state_files_roundtrip_through_disk(
        da in 2usize..=3,
        db in 2usize..=3,
        rank_sel in 1usize..=9,
        seed in any::<u64>(),
    ) {
        let rank = 1 + rank_sel % (da * db);
        let state = entkit::BipartiteState::random(da, db, rank, seed).unwrap();
        let file = StateFile::from_state(&state, None);
        let rendered = render_state_file(&file);

        let dir = tempdir().unwrap();
        let path = dir.path().join("state.json");
        fs::write(&path, &rendered).unwrap();
        let reparsed = parse_state_file(&fs::read(&path).unwrap()).unwrap();
        prop_assert_eq!(render_state_file(&reparsed), rendered);

        let back = reparsed.into_state(&Tolerances::default()).unwrap();
        prop_assert!(back.rho().max_abs_diff(state.rho()) == 0.0);
    }
}
