//! Acceptance run: one PASS/FAIL line per criterion; exits non-zero on any failure.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{effective_mutants, rejected, rsqs4, MUTANTS};
use mcdsqs::algebra::{moebius_rds, trivial_rds};
use mcdsqs::codes::{anticode_bound_check, emit_code, min_distance_buckets, min_distance_full, verify_code, Codeword};
use mcdsqs::constructions::{
    as_rdsqs, designate_hole, fill_c1dcqs, fill_gcdcqs, inflate_c1, inflate_fan, quadruple_rsqs, ConstructOptions,
};
use mcdsqs::data::load_dataset;
use mcdsqs::exec::Exec;
use mcdsqs::model::{CertifiedDesign, ClaimedKind, DesignInstance, Ground, Mode};
use mcdsqs::resolver::{min_coloring, ColoringOutcome, ResolverOptions};
use mcdsqs::verify::{check_rsqs2star, verify_certificate};
use mcdsqs::Error;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Runtime limit for each dataset criterion.
const DATASET_LIMIT: Duration = Duration::from_secs(5);
/// Runtime limit for the order-20 pipeline.
const MCDSQS20_LIMIT: Duration = Duration::from_secs(5);
/// Runtime limit for the order-34 pipeline.
const RDSQS34_LIMIT: Duration = Duration::from_secs(10);
/// Runtime limit for the order-164 pipeline.
const MCDSQS164_LIMIT: Duration = Duration::from_secs(600);
/// Runtime limit for all five code checks together.
const CODES_LIMIT: Duration = Duration::from_secs(120);
/// Runtime limit for the resolver confirmations.
const RESOLVER_LIMIT: Duration = Duration::from_secs(60);
/// Codewords drawn for the sampled exhaustive scan at order 164.
const SUBSAMPLE: usize = 2000;
/// Largest order that gets a full pairwise distance scan.
const FULL_SCAN_MAX_N: u32 = 34;
/// Required minimum distance of every emitted code.
const CODE_DISTANCE: u32 = 6;

type Outcome = Result<(), String>;

/// Name, runtime limit and check of one criterion.
type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn certified(cert: &CertifiedDesign, what: &str) -> Outcome {
    let r = verify_certificate(cert);
    ensure(r.pass, || format!("{what}: {}", r.render()))
}

fn opts() -> ConstructOptions {
    ConstructOptions::default()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn classes_per_point(cert: &CertifiedDesign) -> Vec<usize> {
    let mut n: Vec<usize> = cert.derived_colorings.values().map(|c| c.classes.len()).collect();
    n.dedup();
    n
}

fn criterion_1() -> Outcome {
    let cq = load_dataset("rdcqs_8_4_2").map_err(err)?;
    certified(&cq, "rdcqs_8_4_2")?;
    ensure(cq.claimed_kind == ClaimedKind::RDCQS, || format!("claimed {}", cq.claimed_kind))?;
    ensure(cq.design.blocks.len() == 1376, || format!("{} blocks", cq.design.blocks.len()))?;
    let d = &cq.design;
    let stem = d.stem.clone().unwrap_or_default();
    ensure(stem.len() == 2, || format!("stem of size {}", stem.len()))?;
    let groups = d.groups.clone().unwrap_or_default();
    for x in 0..d.v {
        let c = cq.derived_colorings.get(&x).ok_or_else(|| format!("no colouring at {x}"))?;
        let triples = d.blocks_through(x).len();
        if stem.contains(&x) {
            ensure(c.classes.len() == 16 && c.classes.iter().all(|k| k.scope.mode == Mode::Pc), || {
                format!("stem point {x}: {} classes", c.classes.len())
            })?;
            ensure(triples == 128, || format!("stem point {x}: {triples} triples"))?;
        } else {
            let gi = groups.iter().position(|g| g.contains(&x)).ok_or_else(|| format!("{x} in no group"))?;
            let restricted =
                c.classes.iter().filter(|k| k.scope.ground == Ground::minus_group_and_stem(gi as u32)).count();
            ensure(c.classes.len() == 16 && restricted == 4, || {
                format!("group point {x}: {} classes, {restricted} restricted", c.classes.len())
            })?;
            ensure(triples == 164, || format!("group point {x}: {triples} triples"))?;
        }
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    for (id, blocks, classes) in [("mcdsqs_26", 650, 13), ("mcdsqs_32", 1240, 16)] {
        let c = load_dataset(id).map_err(err)?;
        certified(&c, id)?;
        ensure(c.claimed_kind == ClaimedKind::McDSQS, || format!("{id}: claimed {}", c.claimed_kind))?;
        ensure(c.design.blocks.len() == blocks, || format!("{id}: {} blocks", c.design.blocks.len()))?;
        ensure(c.derived_colorings.len() as u32 == c.design.v, || format!("{id}: missing points"))?;
        ensure(classes_per_point(&c) == [classes], || format!("{id}: class counts {:?}", classes_per_point(&c)))?;
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let c1 = load_dataset("c1dcqs_2_9_2").map_err(err)?;
    certified(&c1, "c1dcqs_2_9_2")?;
    let g = c1.special_group.ok_or("c1dcqs_2_9_2 has no special group")?;
    let groups = c1.design.groups.clone().unwrap_or_default();
    ensure(groups.get(g as usize) == Some(&vec![0, 9]), || format!("special group {:?}", groups.get(g as usize)))?;
    let c2 = load_dataset("c2dcqs_2_9_2").map_err(err)?;
    certified(&c2, "c2dcqs_2_9_2")?;
    let gdd = load_dataset("rdgdd_3_4_10_2").map_err(err)?;
    certified(&gdd, "rdgdd_3_4_10_2")?;
    ensure(gdd.claimed_kind == ClaimedKind::RDGDD34, || format!("claimed {}", gdd.claimed_kind))?;
    for (x, c) in &gdd.derived_colorings {
        ensure(c.classes.len() == 8 && c.classes.iter().all(|k| k.scope.mode == Mode::Pc), || {
            format!("rdgdd point {x}: {} classes", c.classes.len())
        })?;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let c1 = load_dataset("c1dcqs_2_9_2").map_err(err)?;
    let r4 = as_rdsqs(&trivial_rds(3), &opts()).map_err(err)?;
    let out = fill_c1dcqs(&c1, &r4, &opts()).map_err(err)?;
    certified(&out, "mcDSQS(20)")?;
    ensure(out.claimed_kind == ClaimedKind::McDSQS, || format!("claimed {}", out.claimed_kind))?;
    ensure(out.design.v == 20 && out.design.blocks.len() == 285, || format!("{} blocks", out.design.blocks.len()))?;
    ensure(classes_per_point(&out) == [10], || format!("class counts {:?}", classes_per_point(&out)))
}

fn criterion_5() -> Outcome {
    let cq = load_dataset("rdcqs_8_4_2").map_err(err)?;
    let r10 = as_rdsqs(&moebius_rds(3).map_err(err)?, &opts()).map_err(err)?;
    let holed = designate_hole(&r10, &[8, 9], &opts()).map_err(err)?;
    let out = fill_gcdcqs(&cq, &r10, &holed, &opts()).map_err(err)?;
    certified(&out, "RDSQS(34)")?;
    ensure(out.claimed_kind == ClaimedKind::RDSQS, || format!("claimed {}", out.claimed_kind))?;
    ensure(out.design.blocks.len() == 1496, || format!("{} blocks", out.design.blocks.len()))?;
    for (x, c) in &out.derived_colorings {
        ensure(c.classes.len() == 16 && c.classes.iter().all(|k| k.scope.mode == Mode::Pc), || {
            format!("point {x}: {} classes", c.classes.len())
        })?;
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let rds = moebius_rds(9).map_err(err)?;
    certified(&rds, "RDS(3,10,82)")?;
    ensure(rds.design.v == 82 && rds.design.blocks.len() == 738, || format!("{} blocks", rds.design.blocks.len()))?;
    ensure(rds.derived_colorings.len() == 82, || format!("{} resolved points", rds.derived_colorings.len()))?;
    ensure(classes_per_point(&rds) == [10], || format!("class counts {:?}", classes_per_point(&rds)))?;
    let c1 = load_dataset("c1dcqs_2_9_2").map_err(err)?;
    let c2 = load_dataset("c2dcqs_2_9_2").map_err(err)?;
    let gdd = load_dataset("rdgdd_3_4_10_2").map_err(err)?;
    let big = inflate_c1(&rds, &c1, &c2, Some(&gdd), &opts()).map_err(err)?;
    ensure(big.report.as_ref().is_some_and(|r| r.pass), || "inflated design not certified".into())?;
    ensure(big.claimed_kind == ClaimedKind::C1DCQS, || format!("claimed {}", big.claimed_kind))?;
    ensure(big.design.blocks.len() == 180_360, || format!("{} blocks", big.design.blocks.len()))?;
    let r4 = as_rdsqs(&trivial_rds(3), &opts()).map_err(err)?;
    let out = fill_c1dcqs(&big, &r4, &opts()).map_err(err)?;
    certified(&out, "mcDSQS(164)")?;
    ensure(out.claimed_kind == ClaimedKind::McDSQS, || format!("claimed {}", out.claimed_kind))?;
    ensure(out.design.blocks.len() == 180_441, || format!("{} blocks", out.design.blocks.len()))?;
    ensure(classes_per_point(&out) == [82], || format!("class counts {:?}", classes_per_point(&out)))
}

fn code_designs() -> Result<Vec<(CertifiedDesign, u32)>, String> {
    let run = |name: &str| {
        let r = mcdsqs::recipes::builtin(name).map_err(err)?;
        mcdsqs::recipes::run_recipe(&r, std::path::Path::new("."), &opts()).map_err(err)
    };
    Ok(vec![
        (run("mcdsqs20")?, 11),
        (load_dataset("mcdsqs_26").map_err(err)?, 14),
        (load_dataset("mcdsqs_32").map_err(err)?, 17),
        (run("rdsqs34")?, 17),
        (run("mcdsqs164")?, 83),
    ])
}

fn criterion_7() -> Outcome {
    for (cert, q) in code_designs()? {
        let v = cert.design.v;
        let code = emit_code(&cert).map_err(err)?;
        ensure(code.q == q, || format!("order {v}: q = {}, expected {q}", code.q))?;
        ensure(code.d == CODE_DISTANCE, || format!("order {v}: d = {}", code.d))?;
        let r = verify_code(&code);
        ensure(r.pass, || format!("order {v}: {}", r.render()))?;
        if v <= FULL_SCAN_MAX_N {
            let (d, _, _) = min_distance_full(&code.codewords, Exec::Auto).ok_or("empty code")?;
            ensure(d == CODE_DISTANCE, || format!("order {v}: full scan gives {d}"))?;
        } else {
            let (d, _, _) = min_distance_buckets(&code.codewords, Exec::Auto).ok_or("empty code")?;
            ensure(d == CODE_DISTANCE, || format!("order {v}: bucket scan gives {d}"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(u64::from(v));
            let picked: Vec<Codeword> = sample(&mut rng, code.codewords.len(), SUBSAMPLE)
                .into_iter()
                .map(|i| code.codewords[i].clone())
                .collect();
            let (d, _, _) = min_distance_full(&picked, Exec::Auto).ok_or("empty sample")?;
            ensure(d >= CODE_DISTANCE, || format!("order {v}: subsample scan gives {d}"))?;
        }
        let b = anticode_bound_check(code.n, code.w, 3, code.q, code.codewords.len() as u64).map_err(err)?;
        ensure(b.perfect(), || format!("order {v}: {} vs {}", b.product, b.space))?;
    }
    Ok(())
}

fn steiner_triples(v: u32, blocks: Vec<Vec<u32>>) -> DesignInstance {
    DesignInstance::steiner(v, 2, 3, blocks)
}

fn cyclic(v: u32, bases: &[[u32; 3]]) -> DesignInstance {
    let mut blocks = Vec::new();
    for base in bases {
        for i in 0..v {
            let mut b: Vec<u32> = base.iter().map(|x| (x + i) % v).collect();
            b.sort_unstable();
            blocks.push(b);
        }
    }
    blocks.sort();
    steiner_triples(v, blocks)
}

fn affine_plane_3() -> DesignInstance {
    let pt = |x: u32, y: u32| 3 * x + y;
    let mut lines = std::collections::BTreeSet::new();
    for (dx, dy) in [(0, 1), (1, 0), (1, 1), (1, 2)] {
        for x in 0..3 {
            for y in 0..3 {
                let mut l: Vec<u32> = (0..3).map(|k| pt((x + k * dx) % 3, (y + k * dy) % 3)).collect();
                l.sort_unstable();
                lines.insert(l);
            }
        }
    }
    steiner_triples(9, lines.into_iter().collect())
}

fn criterion_8() -> Outcome {
    let ro = ResolverOptions::default();
    let unsat = |d: &DesignInstance, r| matches!(min_coloring(d, r, &ro), Ok(ColoringOutcome::Unsat { .. }));
    let colored = |d: &DesignInstance, r| match min_coloring(d, r, &ro) {
        Ok(ColoringOutcome::Colored(c)) => Some(c),
        _ => None,
    };
    let fano = cyclic(7, &[[0, 1, 3]]);
    ensure(unsat(&fano, 6), || "Fano plane coloured with 6".into())?;
    ensure(colored(&fano, 7).is_some_and(|c| c.classes.len() == 7), || "Fano plane not coloured with 7".into())?;
    let sts13 = cyclic(13, &[[0, 1, 4], [0, 2, 7]]);
    ensure(sts13.blocks.len() == 26, || "cyclic STS(13) malformed".into())?;
    ensure(unsat(&sts13, 7), || "cyclic STS(13) coloured with 7".into())?;
    let ag = affine_plane_3();
    let c = colored(&ag, 4).ok_or("AG(2,3) not coloured with 4")?;
    ensure(c.classes.len() == 4 && c.classes.iter().all(|k| k.blocks.len() == 3), || {
        "AG(2,3) colouring is not a resolution".into()
    })
}

fn mutation_suite(
    cert: &CertifiedDesign,
    seed: u64,
    both: bool,
    f: impl Fn(&CertifiedDesign, &ConstructOptions) -> mcdsqs::Result<CertifiedDesign>,
) -> Outcome {
    let mutants = effective_mutants(cert, seed);
    ensure(mutants.len() == MUTANTS, || format!("only {} effective mutants", mutants.len()))?;
    let unchecked = ConstructOptions { check_ingredients: false, ..opts() };
    for (i, m) in mutants.iter().enumerate() {
        rejected(f(m, &opts()), true).map_err(|e| format!("mutant {i} (seed {seed}), checked: {e}"))?;
        if both {
            rejected(f(m, &unchecked), false).map_err(|e| format!("mutant {i} (seed {seed}), unchecked: {e}"))?;
        }
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    let c1 = load_dataset("c1dcqs_2_9_2").map_err(err)?;
    let c2 = load_dataset("c2dcqs_2_9_2").map_err(err)?;
    let r4 = as_rdsqs(&trivial_rds(3), &opts()).map_err(err)?;
    mutation_suite(&c1, 20, true, |m, o| fill_c1dcqs(m, &r4, o))?;
    let cq = load_dataset("rdcqs_8_4_2").map_err(err)?;
    let r10 = as_rdsqs(&moebius_rds(3).map_err(err)?, &opts()).map_err(err)?;
    let holed = designate_hole(&r10, &[8, 9], &opts()).map_err(err)?;
    mutation_suite(&cq, 34, true, |m, o| fill_gcdcqs(m, &r10, &holed, o))?;
    mutation_suite(&holed, 35, true, |m, o| fill_gcdcqs(&cq, &r10, m, o))?;
    mutation_suite(&r10, 36, true, |m, o| fill_gcdcqs(&cq, m, &holed, o))?;
    let rds = trivial_rds(9);
    mutation_suite(&c1, 1, true, |m, o| inflate_c1(&rds, m, &c2, None, o))?;
    mutation_suite(&c2, 2, false, |m, o| inflate_c1(&rds, &c1, m, None, o))
}

fn precondition<T>(r: mcdsqs::Result<T>, what: &str) -> Outcome {
    match r {
        Err(Error::Precondition(_)) => Ok(()),
        Err(e) => Err(format!("{what}: unexpected error {e}")),
        Ok(_) => Err(format!("{what}: accepted")),
    }
}

fn criterion_10() -> Outcome {
    let cq = load_dataset("rdcqs_8_4_2").map_err(err)?;
    let c1 = load_dataset("c1dcqs_2_9_2").map_err(err)?;
    let fixture = rsqs4();
    let r = check_rsqs2star(&fixture);
    ensure(r.pass, || format!("2-RSQS* fixture: {}", r.render()))?;
    certified(&fixture, "2-RSQS* fixture")?;
    let mut bad = rsqs4();
    bad.families[3].clear();
    ensure(!check_rsqs2star(&bad).pass, || "broken 2-RSQS* fixture passes the checker".into())?;
    precondition(quadruple_rsqs(&bad, &cq, None, &opts()), "quadruple_rsqs with broken 2-RSQS*")?;
    precondition(quadruple_rsqs(&fixture, &c1, None, &opts()), "quadruple_rsqs with wrong ingredient")?;
    precondition(quadruple_rsqs(&cq, &cq, None, &opts()), "quadruple_rsqs with non-RSQS base")?;
    let fan = common::fan4();
    let none = BTreeMap::new();
    precondition(inflate_fan(&fan, &none, &none, &opts()), "inflate_fan without ingredients")?;
    precondition(inflate_fan(&fan, &BTreeMap::from([(4, c1)]), &none, &opts()), "inflate_fan with wrong ingredient")?;
    let out = quadruple_rsqs(&fixture, &cq, None, &opts()).map_err(err)?;
    certified(&out, "quadruple_rsqs on the fixture")
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("dataset rdcqs_8_4_2", Some(DATASET_LIMIT), criterion_1),
        ("datasets mcdsqs_26 and mcdsqs_32", Some(2 * DATASET_LIMIT), criterion_2),
        ("datasets c1dcqs, c2dcqs and rdgdd", Some(DATASET_LIMIT), criterion_3),
        ("pipeline mcdsqs20", Some(MCDSQS20_LIMIT), criterion_4),
        ("pipeline rdsqs34", Some(RDSQS34_LIMIT), criterion_5),
        ("pipeline mcdsqs164", Some(MCDSQS164_LIMIT), criterion_6),
        ("codes and code-anticode equality", Some(CODES_LIMIT), criterion_7),
        ("resolver confirmations", Some(RESOLVER_LIMIT), criterion_8),
        ("mutation robustness", None, criterion_9),
        ("ingredient-gated paths", None, criterion_10),
    ];
    let total = criteria.len();
    let mut failed = Vec::new();
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let mut outcome = run();
        let elapsed = t.elapsed();
        if let (Ok(()), Some(l)) = (&outcome, limit) {
            if elapsed > l {
                outcome = Err(format!("took {elapsed:.2?}, limit {l:?}"));
            }
        }
        let budget = limit.map_or(String::new(), |l| format!(" / {l:?}"));
        match &outcome {
            Ok(()) => println!("[PASS] {:>2} {name} ({elapsed:.2?}{budget})", i + 1),
            Err(e) => {
                println!("[FAIL] {:>2} {name} ({elapsed:.2?}{budget}): {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", total);
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
