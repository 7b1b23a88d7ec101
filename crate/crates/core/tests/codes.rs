use std::path::Path;

use mcdsqs::codes::{
    anticode_bound_check, emit_code, from_text, min_distance_buckets, min_distance_full, to_text, verify_code,
    Codeword, CwCode,
};
use mcdsqs::constructions::ConstructOptions;
use mcdsqs::data::load_dataset;
use mcdsqs::exec::Exec;
use mcdsqs::model::CertifiedDesign;
use mcdsqs::recipes::{builtin, run_recipe};
use mcdsqs::verify::complete_colorings;

fn recipe(name: &str) -> CertifiedDesign {
    run_recipe(&builtin(name).unwrap(), Path::new("."), &ConstructOptions::default()).unwrap()
}

/// Emits, verifies, checks q and the code-anticode equality.
fn check(cert: &CertifiedDesign, q: u32) -> CwCode {
    let code = emit_code(cert).unwrap();
    let n = cert.design.v;
    assert_eq!(code.q, q, "n = {n}");
    assert_eq!(code.codewords.len() as u128 * 4, mcdsqs::model::binom(n as u64, 3));
    let r = verify_code(&code);
    assert!(r.pass, "{}", r.render());
    assert_eq!(r.statistics["min_distance"], 6);
    assert!(anticode_bound_check(n, 4, 3, q, code.codewords.len() as u64).unwrap().perfect());
    code
}

#[test]
fn alphabet_sizes() {
    check(&recipe("rdsqs10"), 5);
    check(&recipe("mcdsqs20"), 11);
    check(&load_dataset("mcdsqs_26").unwrap(), 14);
    check(&load_dataset("mcdsqs_32").unwrap(), 17);
    check(&recipe("rdsqs34"), 17);
}

#[test]
fn bucket_method_matches_full_scan_on_rdsqs34() {
    let code = emit_code(&recipe("rdsqs34")).unwrap();
    let full = min_distance_full(&code.codewords, Exec::Auto).unwrap();
    let bucket = min_distance_buckets(&code.codewords, Exec::Auto).unwrap();
    assert_eq!(full.0, bucket.0);
}

#[test]
fn shared_pairs_get_distinct_symbols() {
    let cert = load_dataset("mcdsqs_26").unwrap();
    let code = emit_code(&cert).unwrap();
    let cols = complete_colorings(&cert).unwrap();
    let d = &cert.design;
    let class_of = |x: u32, b: u32| cols[&x].classes.iter().position(|c| c.blocks.contains(&b)).unwrap();
    let mut pairs = 0;
    for i in 0..d.blocks.len() {
        for j in i + 1..d.blocks.len() {
            let shared: Vec<u32> = d.blocks[i].iter().copied().filter(|p| d.blocks[j].contains(p)).collect();
            if shared.len() == 2 {
                pairs += 1;
                for &x in &shared {
                    assert_ne!(class_of(x, i as u32), class_of(x, j as u32));
                    let sym = |c: &Codeword| c.symbols[c.support.iter().position(|&p| p == x).unwrap()];
                    assert_ne!(sym(&code.codewords[i]), sym(&code.codewords[j]));
                }
            }
        }
    }
    assert!(pairs > 0);
}

#[test]
fn distance_five_counterexample_fails() {
    let w = |s: [u32; 4], y: [u32; 4]| Codeword { support: s.to_vec(), symbols: y.to_vec() };
    let mut code = emit_code(&recipe("rdsqs10")).unwrap();
    let a = code.codewords[0].clone();
    let other =
        code.codewords.iter().position(|c| c.support.iter().filter(|p| a.support.contains(p)).count() == 2).unwrap();
    let shared: Vec<u32> = a.support.iter().copied().filter(|p| code.codewords[other].support.contains(p)).collect();
    let pos_a = a.support.iter().position(|&p| p == shared[0]).unwrap();
    let pos_b = code.codewords[other].support.iter().position(|&p| p == shared[0]).unwrap();
    code.codewords[other].symbols[pos_b] = a.symbols[pos_a];
    let r = verify_code(&code);
    assert!(!r.pass);
    assert!(r.has_code("code-distance"));
    assert!(r.first_witness().unwrap().witness.contains("distance 5"));
    let tiny = CwCode {
        n: 6,
        w: 4,
        q: 3,
        d: 6,
        codewords: vec![w([0, 1, 2, 3], [1, 1, 1, 1]), w([0, 1, 4, 5], [1, 2, 1, 1])],
    };
    assert!(!verify_code(&tiny).pass);
}

#[test]
fn text_export_round_trips() {
    let code = emit_code(&recipe("mcdsqs20")).unwrap();
    let text = to_text(&code);
    assert!(text.starts_with("20 4 11 6\n"));
    assert_eq!(from_text(&text).unwrap(), code);
}

#[test]
fn anticode_examples() {
    let b = anticode_bound_check(20, 4, 3, 11, 285).unwrap();
    assert_eq!(b.product, 285 * 17 * 10u128.pow(4));
    assert_eq!(b.space, 4845 * 10u128.pow(4));
    assert!(b.perfect());
    assert!(!anticode_bound_check(20, 4, 3, 11, 284).unwrap().perfect());
    assert!(anticode_bound_check(34, 4, 3, 17, 1496).unwrap().perfect());
}
