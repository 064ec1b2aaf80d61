mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{fixture, fixture_path};
use pmilift::momlift::{assemble_l, assemble_ln, LiftedLMI};
use pmilift::ratlift::assemble_lqmod;

fn pmilift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmilift")).args(args).output().expect("binary runs")
}

fn fx(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn lift_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.json");
    let o = pmilift(&["lift", &fx("ex2_3"), "--mode", "sos", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "2 pencils (3×3, 4×4), 6 free lifting variables");

    let o = pmilift(&["lift", &fx("ex4_4"), "--mode", "qmod", "--d", "2", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("4 pencils (2×2, 6×6, 3×3, 3×3)"), "{}", stdout(&o));
}

#[test]
fn lift_round_trip() {
    let cases: Vec<(&str, LiftedLMI)> = vec![
        ("ex2_3", assemble_l(&fixture("ex2_3").matpoly().unwrap()).unwrap()),
        ("ex2_5", assemble_l(&fixture("ex2_5").matpoly().unwrap()).unwrap()),
        ("ex4_4", { let p = fixture("ex4_4"); assemble_lqmod(&p.g, &p.domain, 2).unwrap() }),
        ("ex4_5", { let p = fixture("ex4_5"); assemble_lqmod(&p.g, &p.domain, 2).unwrap() }),
        ("q_conclusion", { let p = fixture("q_conclusion"); assemble_ln(&p.matpoly().unwrap(), &p.domain, 1).unwrap() }),
    ];
    for (name, built) in cases {
        let o = pmilift(&["lift", &fx(name)]);
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
        let text = stdout(&o);
        let parsed = LiftedLMI::from_json(&text).unwrap();
        assert_eq!(parsed, built, "{name}");
        assert_eq!(parsed.to_json(), text.trim_end(), "{name}: serialization is canonical");
    }
}

#[test]
fn lifted_file_feeds_member() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ex2_5.json");
    assert_eq!(code(&pmilift(&["lift", &fx("ex2_5"), "--out", path_str(&out)])), 0);
    let o = pmilift(&["member", &fx("ex2_5"), "0,0", "--lifted", path_str(&out)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("lifted: In"), "{}", stdout(&o));
}

#[test]
fn qmod_degree_from_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.txt");
    let o = pmilift(&["certify", &fx("ex4_4"), "--kind", "qmod", "--t", "2", "--out", path_str(&cert)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = pmilift(&["lift", &fx("ex4_4"), "--mode", "qmod", "--cert", path_str(&cert), "--out", path_str(&dir.path().join("l.json"))]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("4 pencils"));
}

#[test]
fn parse_and_construction_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n":1,"m":2,"numerator":[{"exp":[0],"mat":[[1,2],[3,1]]}],"domain":[]}"#).unwrap();
    let o = pmilift(&["lift", path_str(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("numerator[0].mat[0][1]"), "{}", stderr(&o));

    assert_eq!(code(&pmilift(&["lift", path_str(&dir.path().join("missing.json"))])), 2);
    assert_eq!(code(&pmilift(&["lift"])), 2);
    assert_eq!(code(&pmilift(&["lift", &fx("q_conclusion"), "--mode", "sos"])), 3);
    assert_eq!(code(&pmilift(&["lift", &fx("ex2_3"), "--mode", "qmod"])), 2);
}

#[test]
fn certify_exit_codes() {
    let o = pmilift(&["certify", &fx("ex2_5"), "--kind", "uniform-sos-concave"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("feasible"));
    assert_eq!(code(&pmilift(&["certify", &fx("ex2_3"), "--kind", "uniform-sos-concave"])), 1);
    assert_eq!(code(&pmilift(&["certify", &fx("q_conclusion"), "--kind", "uniform-sos-concave"])), 1);
    let o = pmilift(&["certify", &fx("ex4_5"), "--kind", "qmod", "--t", "2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("infeasible-by-degree"));
}

#[test]
fn member_verdicts() {
    let o = pmilift(&["member", &fx("ex2_3"), "0,0,0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("direct: In (margin 5.86e-1) lifted: In"), "{}", stdout(&o));
    let o = pmilift(&["member", &fx("ex2_3"), "2,0,0"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.starts_with("direct: Out") && s.contains("lifted: Out"), "{s}");
    assert_eq!(code(&pmilift(&["member", &fx("ex2_3"), "1,x,0"])), 2);
    assert_eq!(code(&pmilift(&["member", &fx("ex2_3"), "1,0"])), 2);
}

#[test]
fn verify_is_deterministic() {
    let a = pmilift(&["verify", &fx("ex2_5"), "--count", "2000", "--seed", "42"]);
    assert_eq!(code(&a), 0);
    assert!(stdout(&a).starts_with("2000 sampled, 0 disagreements"), "{}", stdout(&a));
    let b = pmilift(&["verify", &fx("ex2_5"), "--count", "2000", "--seed", "42"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn verify_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let o = pmilift(&["verify", &fx("q_conclusion"), "--count", "200", "--out", path_str(&csv)]);
    assert_eq!(code(&o), 0, "relaxation slack is not a hard disagreement");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 201);
}

#[test]
fn optimize_against_grid() {
    let o = pmilift(&["optimize", &fx("ex2_5"), "--c", "1,0", "--check", "1e-3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("value "));
    assert_eq!(code(&pmilift(&["optimize", &fx("ex2_5"), "--c", "1"])), 2);
}

#[test]
fn trace_point_cloud() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let o = pmilift(&["trace", &fx("ex4_5"), "--grid", "200", "--out", path_str(&csv)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,class,margin"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.iter().any(|r| r.contains(",boundary,")));
    assert!(rows.iter().any(|r| r.contains(",in,")));
}
