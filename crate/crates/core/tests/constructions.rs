mod common;

use std::collections::BTreeMap;
use std::path::Path;

use common::{fan4, rsqs4};
use mcdsqs::algebra::{moebius_rds, trivial_rds};
use mcdsqs::constructions::{
    as_rdsqs, designate_hole, fill_c1dcqs, fill_gcdcqs, inflate_c1, inflate_fan, inflate_rds, quadruple_delta,
    quadruple_rsqs, ConstructOptions,
};
use mcdsqs::data::load_dataset;
use mcdsqs::exec::Exec;
use mcdsqs::model::{ClaimedKind, Mode};
use mcdsqs::recipes::{builtin, builtin_names, run_recipe};
use mcdsqs::serial::to_json;
use mcdsqs::verify::{chromatic_profile, verify_certificate};
use mcdsqs::Error;

fn opts() -> ConstructOptions {
    ConstructOptions::default()
}

#[test]
fn mcdsqs20_pipeline() {
    let c1 = load_dataset("c1dcqs_2_9_2").unwrap();
    let r4 = as_rdsqs(&trivial_rds(3), &opts()).unwrap();
    let out = fill_c1dcqs(&c1, &r4, &opts()).unwrap();
    assert_eq!(out.claimed_kind, ClaimedKind::McDSQS);
    assert_eq!(out.design.blocks.len(), 285);
    for c in out.derived_colorings.values() {
        assert_eq!(c.classes.len(), 10);
    }
}

#[test]
fn rdsqs34_pipeline() {
    let cq = load_dataset("rdcqs_8_4_2").unwrap();
    let r10 = as_rdsqs(&moebius_rds(3).unwrap(), &opts()).unwrap();
    let holed = designate_hole(&r10, &[8, 9], &opts()).unwrap();
    let out = fill_gcdcqs(&cq, &r10, &holed, &opts()).unwrap();
    assert_eq!(out.claimed_kind, ClaimedKind::RDSQS);
    assert_eq!(out.design.blocks.len(), 1496);
    assert_eq!(chromatic_profile(33).unwrap(), 16);
    for c in out.derived_colorings.values() {
        assert_eq!(c.classes.len(), 16);
        assert!(c.classes.iter().all(|k| k.scope.mode == Mode::Pc));
    }
}

#[test]
fn inflate_rds_degenerate_identity() {
    let cq = load_dataset("rdcqs_8_4_2").unwrap();
    let out = inflate_rds(&trivial_rds(4), &cq, None, &opts()).unwrap();
    assert_eq!(out.design.blocks.len(), cq.design.blocks.len());
    assert_eq!(out.design.v, cq.design.v);
}

#[test]
fn inflate_c1_degenerate_identity() {
    let c1 = load_dataset("c1dcqs_2_9_2").unwrap();
    let c2 = load_dataset("c2dcqs_2_9_2").unwrap();
    let out = inflate_c1(&trivial_rds(9), &c1, &c2, None, &opts()).unwrap();
    assert_eq!(out.claimed_kind, ClaimedKind::C1DCQS);
    assert_eq!(out.design.blocks.len(), c1.design.blocks.len());
}

#[test]
fn fill_rejects_wrong_kind() {
    let cq = load_dataset("rdcqs_8_4_2").unwrap();
    let c1 = load_dataset("c1dcqs_2_9_2").unwrap();
    let r4 = as_rdsqs(&trivial_rds(3), &opts()).unwrap();
    assert!(matches!(fill_c1dcqs(&cq, &r4, &opts()), Err(Error::Precondition(_))));
    assert!(matches!(fill_gcdcqs(&c1, &r4, &r4, &opts()), Err(Error::Precondition(_))));
}

#[test]
fn mcdsqs164_pipeline() {
    let rds = moebius_rds(9).unwrap();
    let c1 = load_dataset("c1dcqs_2_9_2").unwrap();
    let c2 = load_dataset("c2dcqs_2_9_2").unwrap();
    let gdd = load_dataset("rdgdd_3_4_10_2").unwrap();
    let big = inflate_c1(&rds, &c1, &c2, Some(&gdd), &opts()).unwrap();
    assert_eq!(big.design.blocks.len(), 180_360);
    let r4 = as_rdsqs(&trivial_rds(3), &opts()).unwrap();
    let out = fill_c1dcqs(&big, &r4, &opts()).unwrap();
    assert_eq!(out.design.blocks.len(), 180_441);
}

#[test]
fn rsqs_fixture_certifies() {
    let r = verify_certificate(&rsqs4());
    assert!(r.pass, "{}", r.render());
    let f = verify_certificate(&fan4());
    assert!(f.pass, "{}", f.render());
}

#[test]
fn quadruple_on_single_block_reproduces_ingredient() {
    let cq = load_dataset("rdcqs_8_4_2").unwrap();
    let out = quadruple_rsqs(&rsqs4(), &cq, None, &opts()).unwrap();
    assert_eq!(out.claimed_kind, ClaimedKind::RDCQS);
    assert_eq!(out.design.blocks.len(), 1376);
    assert_eq!(quadruple_delta(8, 2).unwrap(), 4);
}

#[test]
fn fan_on_single_block_reproduces_ingredient() {
    let cq = load_dataset("rdcqs_8_4_2").unwrap();
    let ings = BTreeMap::from([(4, cq.clone())]);
    let out = inflate_fan(&fan4(), &ings, &BTreeMap::new(), &opts()).unwrap();
    assert_eq!(out.design.blocks.len(), 1376);
    assert_eq!(out.design.v, 34);
}

#[test]
fn gated_constructions_reject_missing_or_invalid_ingredients() {
    let cq = load_dataset("rdcqs_8_4_2").unwrap();
    let c1 = load_dataset("c1dcqs_2_9_2").unwrap();
    assert!(matches!(inflate_fan(&fan4(), &BTreeMap::new(), &BTreeMap::new(), &opts()), Err(Error::Precondition(_))));
    let wrong = BTreeMap::from([(4, c1.clone())]);
    assert!(matches!(inflate_fan(&fan4(), &wrong, &BTreeMap::new(), &opts()), Err(Error::Precondition(_))));
    let mut bad = rsqs4();
    bad.families[3].clear();
    assert!(matches!(quadruple_rsqs(&bad, &cq, None, &opts()), Err(Error::Precondition(_))));
    assert!(matches!(quadruple_rsqs(&rsqs4(), &c1, None, &opts()), Err(Error::Precondition(_))));
    assert!(matches!(quadruple_rsqs(&cq, &cq, None, &opts()), Err(Error::Precondition(_))));
    let mut fan_bad = fan4();
    fan_bad.families = vec![vec![], vec![0]];
    let ings = BTreeMap::from([(4, cq.clone())]);
    assert!(matches!(inflate_fan(&fan_bad, &ings, &BTreeMap::new(), &opts()), Err(Error::Precondition(_))));
}

#[test]
fn rsqs_checker_flags_triple_occurrence_outside_special_system() {
    let mut c = rsqs4();
    c.families[3].clear();
    let r = verify_certificate(&c);
    assert!(r.has_code("rsqs-multiplicity"), "{}", r.render());
}

#[test]
fn fill_c1_rejects_group_count() {
    let cq = load_dataset("rdcqs_8_4_2").unwrap();
    let mut fake = cq.clone();
    fake.claimed_kind = ClaimedKind::C1DCQS;
    let r4 = as_rdsqs(&trivial_rds(3), &opts()).unwrap();
    let o = ConstructOptions { check_ingredients: false, ..opts() };
    assert!(matches!(fill_c1dcqs(&fake, &r4, &o), Err(Error::Precondition(_))));
}

#[test]
fn fill_gcdcqs_rejects_unsupported_stem() {
    let c1 = load_dataset("c1dcqs_2_9_2").unwrap();
    let mut fake = c1.clone();
    fake.claimed_kind = ClaimedKind::GcDCQS;
    fake.design.stem = Some(vec![]);
    let o = ConstructOptions { check_ingredients: false, ..opts() };
    let r4 = as_rdsqs(&trivial_rds(3), &opts()).unwrap();
    assert!(fill_gcdcqs(&fake, &r4, &r4, &o).is_err());
}

#[test]
fn non_resolvable_rds_is_rejected() {
    let c1 = load_dataset("c1dcqs_2_9_2").unwrap();
    let c2 = load_dataset("c2dcqs_2_9_2").unwrap();
    let mut rds = trivial_rds(9);
    rds.derived_colorings.clear();
    rds.generators.clear();
    assert!(matches!(inflate_c1(&rds, &c1, &c2, None, &opts()), Err(Error::Precondition(_))));
}

#[test]
fn builtin_recipes_build() {
    for name in builtin_names() {
        let r = builtin(name).unwrap();
        let out = run_recipe(&r, Path::new("."), &opts()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(out.report.as_ref().is_some_and(|r| r.pass), "{name}");
    }
}

#[test]
fn outputs_are_deterministic() {
    let r = builtin("rdsqs34").unwrap();
    let a = run_recipe(&r, Path::new("."), &opts()).unwrap();
    let seq = ConstructOptions { exec: Exec::Sequential, ..opts() };
    let b = run_recipe(&r, Path::new("."), &seq).unwrap();
    assert_eq!(to_json(&a).unwrap(), to_json(&b).unwrap());
}
