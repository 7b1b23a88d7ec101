//! Filling the holes `G ∪ S` of a candelabra system with small SQSs.

use crate::error::{Error, Result};
use crate::exec;
use crate::model::{CertifiedDesign, ClaimedKind, ColorClass, Coloring, CountParams, Ground, Point, Structure};
use crate::verify::chromatic_profile;

use super::{
    class, finish, mode_for, on_ground, split, stem_group_ground, Assembly, ConstructOptions, Ingredient, Output,
};

/// Maps the filler onto `group ∪ stem`: hole points (or the last `|stem|`
/// points when there is no hole) go to the stem in order, the rest to the
/// group members in order.
fn filler_map(filler: &Ingredient, group: &[Point], stem: &[Point]) -> Result<Vec<Point>> {
    let d = filler.design();
    if d.v as usize != group.len() + stem.len() {
        return Err(Error::Precondition(format!(
            "{} has {} points, the hole G ∪ S has {}",
            filler.name,
            d.v,
            group.len() + stem.len()
        )));
    }
    let hole: Vec<Point> = match d.hole.as_deref() {
        Some(h) if !h.is_empty() => h.to_vec(),
        _ => (d.v - stem.len() as u32..d.v).collect(),
    };
    if hole.len() != stem.len() {
        return Err(Error::Precondition(format!(
            "{}: hole of size {}, stem of size {}",
            filler.name,
            hole.len(),
            stem.len()
        )));
    }
    let mut map = vec![0; d.v as usize];
    let mut gi = group.iter();
    for p in 0..d.v {
        map[p as usize] = match hole.iter().position(|&h| h == p) {
            Some(j) => stem[j],
            None => *gi.next().expect("sizes checked"),
        };
    }
    Ok(map)
}

fn identity_spec(ing: &Ingredient) -> (usize, Vec<Point>, Vec<Point>) {
    (0, (0..ing.design().v).collect(), Vec::new())
}

/// Fills a gcDCQS(gⁿ:s) (s ∈ {0, 2}) with an mcDSQS(g+s) on the least group
/// and a gcDSQS(g+s, s) with hole S on every other group, giving an
/// mcDSQS(gn+s), or an RDSQS when gn+s ≡ 4 (mod 6).
pub fn fill_gcdcqs(
    cqs: &CertifiedDesign,
    filler_full: &CertifiedDesign,
    filler_holed: &CertifiedDesign,
    opts: &ConstructOptions,
) -> Result<CertifiedDesign> {
    let cq = Ingredient::new("gcDCQS", cqs, &[ClaimedKind::GcDCQS, ClaimedKind::RDCQS], opts)?;
    let (g, n, s) = cq.group_type()?;
    if s != 0 && s != 2 {
        return Err(Error::Unsupported(format!("hole filling is implemented for stems of size 0 and 2, found {s}")));
    }
    let holed_kinds: &[ClaimedKind] =
        if s == 0 { &[ClaimedKind::GcDSQS, ClaimedKind::McDSQS, ClaimedKind::RDSQS] } else { &[ClaimedKind::GcDSQS] };
    let full = Ingredient::new("full filler", filler_full, &[ClaimedKind::McDSQS, ClaimedKind::RDSQS], opts)?;
    let holed = Ingredient::new("holed filler", filler_holed, holed_kinds, opts)?;
    let v = g * n + s;
    if !matches!(v % 6, 2 | 4) {
        return Err(Error::Precondition(format!("gn + s = {v} is not ≡ 2 or 4 (mod 6)")));
    }
    let groups = cq.groups().to_vec();
    let stem = cq.stem().to_vec();
    let g0 = (0..n as usize).min_by_key(|&t| {
        let mut m = groups[t].clone();
        m.sort_unstable();
        m
    });
    let g0 = g0.expect("at least one group") as u32;
    let mut specs = vec![identity_spec(&cq)];
    for (t, grp) in groups.iter().enumerate() {
        let (idx, f) = if t as u32 == g0 { (1, &full) } else { (2, &holed) };
        specs.push((idx, filler_map(f, grp, &stem)?, Vec::new()));
    }
    let mut asm = Assembly::new(vec![&cq, &full, &holed]);
    asm.place_all(specs, opts.exec);
    let mode = mode_for(v - 1);
    let chi = chromatic_profile(g + s - 1)? as usize;
    let half = g as usize / 2;
    let colorings: Vec<Result<Coloring>> = exec::map_range(opts.exec, v as usize, |x| {
        let x = x as Point;
        let ground = Ground::minus_point(x);
        let mut classes = Vec::new();
        let base = &asm.placements[0];
        match cq.group_of[x as usize] {
            Some(t) => {
                let (other, restricted) = split(cq.coloring(x), &stem_group_ground(t));
                let pl = &asm.placements[1 + t as usize];
                let filler = asm.ing_of(pl);
                let fp = pl.local(x)?;
                let q: Vec<&[u32]> = filler.coloring(fp).classes.iter().map(|c| c.blocks.as_slice()).collect();
                if q.len() != restricted.len() {
                    return Err(Error::Precondition(format!(
                        "class-index misalignment at point {x}: {} restricted classes against {} filler classes",
                        restricted.len(),
                        q.len()
                    )));
                }
                for (r, qj) in restricted.iter().zip(&q) {
                    classes.push(class(base.global(r).chain(pl.global(qj)).collect(), mode, ground.clone()));
                }
                for o in other {
                    classes.push(class(base.global(o).collect(), mode, ground.clone()));
                }
            }
            None => {
                let col = cq.coloring(x);
                let mut extra: Option<Vec<Vec<u32>>> = None;
                for t in 0..n {
                    let p = on_ground(col, &stem_group_ground(t));
                    cq.expect(x, &format!("Kirkman-frame group-{t}"), p.len(), half)?;
                    let pl = &asm.placements[1 + t as usize];
                    let filler = asm.ing_of(pl);
                    let fp = pl.local(x)?;
                    let fcol = filler.coloring(fp);
                    let (paired, rest): (Vec<&[u32]>, Vec<&[u32]>) = if t == g0 {
                        filler.expect(fp, "total", fcol.classes.len(), chi)?;
                        let all: Vec<&[u32]> = fcol.classes.iter().map(|c| c.blocks.as_slice()).collect();
                        (all[..half].to_vec(), all[half..].to_vec())
                    } else {
                        let (f, r) = split(fcol, &Ground::minus_hole());
                        if f.len() != half {
                            return Err(Error::Precondition(format!(
                                "class-index misalignment: holed filler at stem point {x} has {} unrestricted classes, expected {half}",
                                f.len()
                            )));
                        }
                        (f, r)
                    };
                    for (pj, qj) in p.iter().zip(&paired) {
                        classes.push(class(base.global(pj).chain(pl.global(qj)).collect(), mode, ground.clone()));
                    }
                    let acc = extra.get_or_insert_with(|| vec![Vec::new(); rest.len()]);
                    if acc.len() != rest.len() {
                        return Err(Error::Precondition(format!(
                            "class-index misalignment at stem point {x}: fillers leave {} and {} hole classes",
                            acc.len(),
                            rest.len()
                        )));
                    }
                    for (a, r) in acc.iter_mut().zip(&rest) {
                        a.extend(pl.global(r));
                    }
                }
                for blocks in extra.unwrap_or_default() {
                    classes.push(class(blocks, mode, ground.clone()));
                }
            }
        }
        Ok(Coloring { classes })
    });
    let colorings = colorings.into_iter().collect::<Result<Vec<_>>>()?;
    let claimed = if v % 6 == 4 { ClaimedKind::RDSQS } else { ClaimedKind::McDSQS };
    let out = Output {
        v,
        kind: Structure::Steiner,
        stem: None,
        groups: None,
        labels: cq.design().labels.clone(),
        claimed,
        special: None,
        provenance: format!("fill_gcdcqs({}; {}; {})", cqs.provenance, filler_full.provenance, filler_holed.provenance),
        count: CountParams::Steiner { t: 3, k: 4, v },
    };
    finish(asm.blocks, colorings, out, opts)
}

/// Fills every `G ∪ S` of a ¹cDCQS(gⁿ:2) (n ≡ 0 mod 3) with an RDSQS(g+2),
/// giving an mcDSQS(gn+2).
pub fn fill_c1dcqs(c1: &CertifiedDesign, filler: &CertifiedDesign, opts: &ConstructOptions) -> Result<CertifiedDesign> {
    let cq = Ingredient::new("¹cDCQS", c1, &[ClaimedKind::C1DCQS], opts)?;
    let f = Ingredient::new("RDSQS filler", filler, &[ClaimedKind::RDSQS], opts)?;
    let (g, n, s) = cq.group_type()?;
    if n % 3 != 0 {
        return Err(Error::Precondition(format!("the number of groups must be ≡ 0 (mod 3), found {n}")));
    }
    if s != 2 {
        return Err(Error::Precondition(format!("a ¹cDCQS has a stem of size 2, found {s}")));
    }
    let special = cq.special_group()?;
    let v = g * n + 2;
    let stem = cq.stem().to_vec();
    let mut specs = vec![identity_spec(&cq)];
    for grp in cq.groups() {
        specs.push((1, filler_map(&f, grp, &stem)?, Vec::new()));
    }
    let mut asm = Assembly::new(vec![&cq, &f]);
    asm.place_all(specs, opts.exec);
    let mode = mode_for(v - 1);
    let half = g as usize / 2;
    let colorings: Vec<Result<Coloring>> = exec::map_range(opts.exec, v as usize, |x| {
        let x = x as Point;
        let ground = Ground::minus_point(x);
        let base = &asm.placements[0];
        let mut classes: Vec<ColorClass> = Vec::new();
        match cq.group_of[x as usize] {
            Some(t) => {
                let (other, restricted) = split(cq.coloring(x), &stem_group_ground(t));
                cq.expect(x, "restricted", restricted.len(), half + 1)?;
                let pl = &asm.placements[1 + t as usize];
                let fp = pl.local(x)?;
                let q = &f.coloring(fp).classes;
                f.expect(fp, "parallel", q.len(), half)?;
                for (j, r) in restricted.iter().enumerate() {
                    let blocks = match q.get(j) {
                        Some(qj) => base.global(r).chain(pl.global(&qj.blocks)).collect(),
                        None => base.global(r).collect(),
                    };
                    classes.push(class(blocks, mode, ground.clone()));
                }
                for o in other {
                    classes.push(class(base.global(o).collect(), mode, ground.clone()));
                }
            }
            None => {
                let col = cq.coloring(x);
                let mut star = None;
                for t in 0..n {
                    let p = on_ground(col, &stem_group_ground(t));
                    let want = half + usize::from(t == special);
                    cq.expect(x, &format!("group-{t}"), p.len(), want)?;
                    let pl = &asm.placements[1 + t as usize];
                    let fp = pl.local(x)?;
                    let q = &f.coloring(fp).classes;
                    f.expect(fp, "parallel", q.len(), half)?;
                    for (pj, qj) in p.iter().zip(q) {
                        classes.push(class(
                            base.global(pj).chain(pl.global(&qj.blocks)).collect(),
                            mode,
                            ground.clone(),
                        ));
                    }
                    if t == special {
                        star = Some(base.global(p[half]).collect());
                    }
                }
                classes.extend(star.map(|b| class(b, mode, ground.clone())));
            }
        }
        Ok(Coloring { classes })
    });
    let colorings = colorings.into_iter().collect::<Result<Vec<_>>>()?;
    let out = Output {
        v,
        kind: Structure::Steiner,
        stem: None,
        groups: None,
        labels: cq.design().labels.clone(),
        claimed: ClaimedKind::McDSQS,
        special: None,
        provenance: format!("fill_c1dcqs({}; {})", c1.provenance, filler.provenance),
        count: CountParams::Steiner { t: 3, k: 4, v },
    };
    finish(asm.blocks, colorings, out, opts)
}
