//! Fixtures and mutation helpers shared by the integration tests.
#![allow(dead_code)]

use mcdsqs::model::{CertifiedDesign, ClaimedKind, DesignInstance, Point, Structure};
use mcdsqs::verify::verify_certificate;
use mcdsqs::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MUTANTS: usize = 100;

/// 2-RSQS*(4): one block, three identical systems, one common class.
pub fn rsqs4() -> CertifiedDesign {
    let d = DesignInstance::steiner(4, 3, 4, vec![vec![0, 1, 2, 3]]);
    let mut c = CertifiedDesign::new(d, ClaimedKind::Rsqs2Star);
    c.families = vec![vec![0], vec![0], vec![0], vec![0]];
    c.provenance = "synthetic 2-RSQS*(4)".into();
    c
}

/// 1-fan design on four singleton groups with a single fan block.
pub fn fan4() -> CertifiedDesign {
    let mut d = DesignInstance::steiner(4, 3, 4, vec![vec![0, 1, 2, 3]]);
    d.kind = Structure::Fan1;
    d.groups = Some((0..4).map(|p| vec![p]).collect());
    let mut c = CertifiedDesign::new(d, ClaimedKind::FG1);
    c.families = vec![vec![0], vec![]];
    c
}

/// Moves one block between two classes of a stored colouring, or replaces
/// one point of one block.
pub fn mutate(cert: &CertifiedDesign, rng: &mut ChaCha8Rng) -> CertifiedDesign {
    let mut m = cert.clone();
    m.report = None;
    if rng.gen_bool(0.5) && !m.derived_colorings.is_empty() {
        let keys: Vec<Point> = m.derived_colorings.keys().copied().collect();
        let x = keys[rng.gen_range(0..keys.len())];
        let col = m.derived_colorings.get_mut(&x).unwrap();
        let n = col.classes.len();
        if n >= 2 {
            let from = rng.gen_range(0..n);
            let to = (from + rng.gen_range(1..n)) % n;
            if !col.classes[from].blocks.is_empty() {
                let i = rng.gen_range(0..col.classes[from].blocks.len());
                let b = col.classes[from].blocks.remove(i);
                col.classes[to].blocks.push(b);
                col.classes[to].blocks.sort_unstable();
                return m;
            }
        }
    }
    let d = &mut m.design;
    let b = rng.gen_range(0..d.blocks.len());
    let pos = rng.gen_range(0..d.blocks[b].len());
    let p = loop {
        let p = rng.gen_range(0..d.v);
        if !d.blocks[b].contains(&p) {
            break p;
        }
    };
    d.blocks[b][pos] = p;
    d.blocks[b].sort_unstable();
    m
}

/// `MUTANTS` mutants that fail their own certification.
pub fn effective_mutants(cert: &CertifiedDesign, seed: u64) -> Vec<CertifiedDesign> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..20 * MUTANTS {
        if out.len() == MUTANTS {
            break;
        }
        let m = mutate(cert, &mut rng);
        if !verify_certificate(&m).pass {
            out.push(m);
        }
    }
    out
}

/// A mutant's pipeline run must fail: with checked ingredients by a
/// precondition error, otherwise by any structural or certification error.
pub fn rejected(r: Result<CertifiedDesign>, checked: bool) -> std::result::Result<(), String> {
    match r {
        Ok(c) => Err(format!("silent pass as {}", c.claimed_kind)),
        Err(Error::Precondition(_)) => Ok(()),
        Err(Error::Certification(_) | Error::InvalidDesign(_) | Error::UnknownPoint { .. }) if !checked => Ok(()),
        Err(e) => Err(format!("unexpected error: {e}")),
    }
}
