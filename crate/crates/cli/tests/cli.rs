use std::process::{Command, Output};

use serde_json::Value;

fn isopar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isopar"))
        .args(args)
        .env_remove("ISOPAR_THREADS")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn clifford_build_writes_the_sp2_system() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sys.json");
    let out = isopar(&[
        "clifford",
        "build",
        "--m",
        "4",
        "--k",
        "2",
        "--signs",
        "++",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let mats = doc["system"]["matrices"].as_array().unwrap();
    assert_eq!(mats.len(), 5);
    assert!(mats.iter().all(|p| p.as_array().unwrap().len() == 16));
    assert_eq!(doc["trace_invariant"]["q"].as_f64().unwrap().abs(), 2.0);
    assert_eq!(doc["verification"]["pass"], true);
    assert_eq!(doc["multiplicities"]["m1"], 4);
    assert_eq!(doc["multiplicities"]["m2"], 3);

    let verify = isopar(&["clifford", "verify", path.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(0));
    assert_eq!(report(&verify)["verification"]["pass"], true);
}

#[test]
fn mixed_signs_give_q_zero() {
    let out = isopar(&["clifford", "build", "--m", "4", "--k", "2", "--signs", "+-"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["trace_invariant"]["q"].as_f64().unwrap(), 0.0);
}

#[test]
fn degenerate_multiplicity_is_an_input_error() {
    let out = isopar(&["clifford", "build", "--m", "3", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("m2 = l - m - 1 = 0"), "{msg}");
}

#[test]
fn verify_flags_a_corrupted_system() {
    let out = isopar(&["clifford", "build", "--m", "2", "--k", "2"]);
    let mut doc = report(&out);
    doc["system"]["matrices"][1][0][1] = Value::from(0.5);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, doc["system"].to_string()).unwrap();
    let verify = isopar(&["clifford", "verify", path.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(1));
    assert_eq!(report(&verify)["verification"]["pass"], false);
}

#[test]
fn verify_rejects_unreadable_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.json");
    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(
        isopar(&["clifford", "verify", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        isopar(&["clifford", "verify", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn cm_passes_for_built_in_cases() {
    for args in [
        vec!["cm", "--case", "so5-real"],
        vec!["cm", "--case", "so5-complex"],
        vec!["cm", "--case", "fkm", "--m", "2", "--k", "2"],
    ] {
        let out = isopar(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let r = report(&out);
        assert_eq!(r["pass"], true);
        assert!(r["max_grad_residual"].as_f64().unwrap() < 1e-8);
    }
}

#[test]
fn cm_below_roundoff_fails_with_exit_one() {
    let out = isopar(&[
        "cm", "--case", "fkm", "--m", "4", "--k", "2", "--tol", "1e-15",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["pass"], false);
}

#[test]
fn willmore_check_on_sp2_family() {
    let out = isopar(&[
        "check", "willmore", "--case", "fkm", "--m", "4", "--k", "2", "--focal", "+",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["verdict"], "WILLMORE");
    assert_eq!(r["match"], true);
    let points = r["per_point"].as_array().unwrap();
    assert_eq!(points.len(), 20);
    assert!(points
        .iter()
        .all(|p| p["willmore_max"].as_f64().unwrap() < 1e-7));
}

#[test]
fn einstein_check_on_sp2_family() {
    let out = isopar(&[
        "check", "einstein", "--case", "fkm", "--m", "4", "--k", "2", "--signs", "++", "--focal",
        "+",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["verdict"], "EINSTEIN");
    assert_eq!(r["expected"], "EINSTEIN");
    assert!(r["aggregate"]["max_einstein_defect"].as_f64().unwrap() < 1e-9);
    assert_eq!(r["case"]["key"], "fkm-4-2-q2");
}

#[test]
fn complex_minus_has_the_y12_witness() {
    let out = isopar(&["check", "einstein", "--case", "so5-complex", "--focal", "-"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["verdict"], "NOT-EINSTEIN");
    let low = &r["aggregate"]["witness"]["low"];
    assert_eq!(low["coordinate"], "Y12");
    assert!(low["value"].as_f64().unwrap().abs() < 1e-9);
    assert!(r["aggregate"]["witness"]["high"]["value"].as_f64().unwrap() > 0.5);
    assert!(r["aggregate"]["max_closed_form_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn special_point_checks() {
    let out = isopar(&[
        "check",
        "condition-a",
        "--case",
        "fkm",
        "--m",
        "7",
        "--k",
        "2",
        "--focal",
        "+",
        "--samples",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["verdict"], "HOLDS");
    let out = isopar(&[
        "check",
        "span",
        "--case",
        "fkm-ext",
        "--focal",
        "+",
        "--samples",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["verdict"], "DEFICIENT");
    assert_eq!(r["aggregate"]["dim"], 22);
}

#[test]
fn unreferenced_verdicts_exit_zero_with_null_expectation() {
    let out = isopar(&[
        "check",
        "einstein",
        "--case",
        "fkm",
        "--m",
        "3",
        "--k",
        "2",
        "--focal",
        "+",
        "--samples",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["expected"], Value::Null);
    assert_eq!(r["match"], Value::Null);
}

#[test]
fn invalid_requests_exit_two() {
    for args in [
        vec!["check", "span", "--case", "so5-real", "--focal", "+"],
        vec![
            "check", "span", "--case", "fkm", "--m", "2", "--k", "2", "--focal", "-",
        ],
        vec!["check", "einstein", "--case", "so5-real", "--focal", "0"],
        vec!["check", "einstein", "--case", "fkm", "--focal", "+"],
        vec![
            "check", "einstein", "--case", "so5-real", "--m", "2", "--focal", "+",
        ],
        vec![
            "check", "einstein", "--case", "fkm", "--m", "4", "--k", "2", "--signs", "+",
            "--focal", "+",
        ],
        vec!["cm", "--case", "nonsense"],
        vec![
            "cm",
            "--case",
            "fkm",
            "--m",
            "2",
            "--k",
            "2",
            "--samples",
            "0",
        ],
        vec!["table", "--samples", "0"],
        vec!["frobnicate"],
    ] {
        assert_eq!(isopar(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let args = [
        "check",
        "blocks",
        "--case",
        "so5-real",
        "--focal",
        "+",
        "--samples",
        "5",
    ];
    let stdout = isopar(&args).stdout;
    let mut with_file = args.to_vec();
    with_file.extend(["--output", path.to_str().unwrap()]);
    assert_eq!(isopar(&with_file).status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}

#[test]
fn thread_count_does_not_change_the_report() {
    let args = [
        "check",
        "einstein",
        "--case",
        "fkm",
        "--m",
        "5",
        "--k",
        "1",
        "--focal",
        "-",
        "--samples",
        "6",
    ];
    let base = isopar(&args).stdout;
    let threaded = Command::new(env!("CARGO_BIN_EXE_isopar"))
        .args(args)
        .env("ISOPAR_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(threaded.stdout, base);
    let bad = Command::new(env!("CARGO_BIN_EXE_isopar"))
        .args(args)
        .env("ISOPAR_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn text_table_lists_every_row() {
    let out = isopar(&["table", "--text", "--samples", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 26);
    assert!(text.contains("so5-real     (2,2)    -   EINSTEIN"));
    assert!(text.ends_with("all rows match the reference verdicts\n"));
}
