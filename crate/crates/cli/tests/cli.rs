use std::path::Path;
use std::process::{Command, Output};

use mcdsqs::model::{CertifiedDesign, ClaimedKind, DesignInstance};
use mcdsqs::serial::{read_certificate, write_certificate};

fn mcdsqs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcdsqs")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fano() -> CertifiedDesign {
    let lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
    let d = DesignInstance::steiner(7, 2, 3, lines.iter().map(|l| l.to_vec()).collect());
    CertifiedDesign::new(d, ClaimedKind::STS)
}

#[test]
fn build_verify_code_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("m20.design");
    let code = dir.path().join("m20.code");
    let o = mcdsqs(&["build", "--recipe", "mcdsqs20", "-o", path(&design)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = mcdsqs(&["verify", path(&design), "--kind", "mcdsqs"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS"));
    let o = mcdsqs(&["code", path(&design), "-o", path(&code)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("(20, 285, 6; 4)_11"));
    let text = std::fs::read_to_string(&code).unwrap();
    assert_eq!(text.lines().next(), Some("20 4 11 6"));
    assert_eq!(text.lines().count(), 286);
}

#[test]
fn dense_code_export() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("m26.design");
    let code = dir.path().join("m26.dense");
    assert_eq!(mcdsqs(&["data", "export", "mcdsqs_26", "-o", path(&design)]).status.code(), Some(0));
    let o = mcdsqs(&["code", path(&design), "-o", path(&code), "--format", "dense"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&code).unwrap();
    assert_eq!(text.lines().count(), 650);
    assert!(text.lines().all(|l| l.split(' ').count() == 26 && l.split(' ').filter(|s| *s != "0").count() == 4));
}

#[test]
fn fano_is_not_six_colourable() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("fano.design");
    write_certificate(&f, &fano()).unwrap();
    let o = mcdsqs(&["chroma", path(&f), "--max", "6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("UNSAT"));
    let o = mcdsqs(&["chroma", path(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("chromatic index: 7"));
}

#[test]
fn verification_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.design");
    let mut cert = fano();
    cert.design.blocks.pop();
    write_certificate(&f, &cert).unwrap();
    let o = mcdsqs(&["verify", path(&f)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn usage_and_ingredient_errors_exit_two() {
    assert_eq!(mcdsqs(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mcdsqs(&["data", "export", "nope"]).status.code(), Some(2));
    assert_eq!(mcdsqs(&["build", "--recipe", "no-such-recipe", "-o", "/dev/null"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let recipe = dir.path().join("r.json");
    std::fs::write(
        &recipe,
        r#"{"name":"q","output_kind":"gcDCQS","build":{"op":"quadruple_rsqs","rsqs2":"missing.design","ing":"dataset:rdcqs_8_4_2"}}"#,
    )
    .unwrap();
    let o = mcdsqs(&["build", "--recipe", path(&recipe), "-o", path(&dir.path().join("o"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn export_import_preserves_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("r.design");
    assert_eq!(mcdsqs(&["data", "export", "rdcqs_8_4_2", "-o", path(&f)]).status.code(), Some(0));
    let back = read_certificate(&f).unwrap();
    let orig = mcdsqs::data::load_dataset("rdcqs_8_4_2").unwrap();
    assert_eq!(back.design.blocks, orig.design.blocks);
    assert_eq!(mcdsqs(&["verify", path(&f)]).status.code(), Some(0));
}

#[test]
fn derive_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("r.design");
    assert_eq!(mcdsqs(&["data", "export", "mcdsqs_26", "-o", path(&f)]).status.code(), Some(0));
    let o = mcdsqs(&["derive", path(&f), "--point", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("colouring: 13 classes"));
    let o = mcdsqs(&["field", "2", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("GF(4)"));
    assert_eq!(mcdsqs(&["field", "6", "1"]).status.code(), Some(2));
}

#[test]
fn gated_recipes_without_valid_ingredients_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("fan", r#"{"op":"inflate_fan","fg":"dataset:rdcqs_8_4_2","ings":{},"fdgdds":{}}"#),
        ("quad", r#"{"op":"quadruple_rsqs","rsqs2":"dataset:rdcqs_8_4_2","ing":"dataset:rdcqs_8_4_2"}"#),
    ];
    for (name, build) in cases {
        let recipe = dir.path().join(format!("{name}.json"));
        let text = format!(r#"{{"name":"{name}","output_kind":"gcDCQS","build":{build}}}"#);
        std::fs::write(&recipe, text).unwrap();
        let out = dir.path().join(format!("{name}.design"));
        let o = mcdsqs(&["build", "--recipe", path(&recipe), "-o", path(&out)]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!out.exists());
    }
}
