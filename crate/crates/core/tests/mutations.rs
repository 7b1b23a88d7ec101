//! Single corruptions of an ingredient must never yield a passing output.

mod common;

use common::{effective_mutants, rejected, MUTANTS};
use mcdsqs::algebra::{moebius_rds, trivial_rds};
use mcdsqs::constructions::{as_rdsqs, designate_hole, fill_c1dcqs, fill_gcdcqs, inflate_c1, ConstructOptions};
use mcdsqs::data::load_dataset;
use mcdsqs::model::CertifiedDesign;
use mcdsqs::Result;

fn checked() -> ConstructOptions {
    ConstructOptions::default()
}

fn unchecked() -> ConstructOptions {
    ConstructOptions { check_ingredients: false, ..ConstructOptions::default() }
}

fn run_all(
    cert: &CertifiedDesign,
    seed: u64,
    both: bool,
    f: impl Fn(&CertifiedDesign, &ConstructOptions) -> Result<CertifiedDesign>,
) {
    let mutants = effective_mutants(cert, seed);
    assert_eq!(mutants.len(), MUTANTS, "not enough effective mutants");
    for (i, m) in mutants.iter().enumerate() {
        rejected(f(m, &checked()), true).unwrap_or_else(|e| panic!("mutant {i}, checked: {e}"));
        if both {
            rejected(f(m, &unchecked()), false).unwrap_or_else(|e| panic!("mutant {i}, unchecked: {e}"));
        }
    }
}

#[test]
fn mcdsqs20_rejects_mutated_candelabra() {
    let c1 = load_dataset("c1dcqs_2_9_2").unwrap();
    let r4 = as_rdsqs(&trivial_rds(3), &checked()).unwrap();
    run_all(&c1, 20, true, |m, o| fill_c1dcqs(m, &r4, o));
}

#[test]
fn rdsqs34_rejects_mutated_ingredients() {
    let cq = load_dataset("rdcqs_8_4_2").unwrap();
    let r10 = as_rdsqs(&moebius_rds(3).unwrap(), &checked()).unwrap();
    let holed = designate_hole(&r10, &[8, 9], &checked()).unwrap();
    run_all(&cq, 34, true, |m, o| fill_gcdcqs(m, &r10, &holed, o));
    run_all(&holed, 35, true, |m, o| fill_gcdcqs(&cq, &r10, m, o));
    run_all(&r10, 36, true, |m, o| fill_gcdcqs(&cq, m, &holed, o));
}

#[test]
fn inflate_c1_rejects_mutated_ingredients() {
    let c1 = load_dataset("c1dcqs_2_9_2").unwrap();
    let c2 = load_dataset("c2dcqs_2_9_2").unwrap();
    let rds = trivial_rds(9);
    run_all(&c1, 1, true, |m, o| inflate_c1(&rds, m, &c2, None, o));
    // The degenerate master design has no block avoiding η, so c2 is only checked.
    run_all(&c2, 2, false, |m, o| inflate_c1(&rds, &c1, m, None, o));
}
