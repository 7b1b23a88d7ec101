//! Inflating a 2-RSQS*(v) by a gcDCQS(m⁴:s) on the special blocks and an
//! RDTD(3,4,m) on the others.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exec;
use crate::model::{CertifiedDesign, ClaimedKind, Coloring, CountParams, Ground, Mode, Point, Structure};

use super::{
    check_residue, class, finish, grid_map, mode_for, on_ground, split, stem_group_ground, stem_labels, Assembly,
    ConstructOptions, Ingredient, Output,
};

/// Number of hole-scoped classes at a group point of a gcDCQS(m⁴:s).
pub fn quadruple_delta(m: u32, s: u32) -> Result<u32> {
    if !m.is_multiple_of(2) {
        return Err(Error::Precondition(format!("group size m = {m} must be even")));
    }
    match (4 * m + s) % 6 {
        2 => Ok((m + s) / 2),
        4 if m + s >= 2 => Ok((m + s) / 2 - 1),
        _ => Err(Error::Precondition(format!("4m + s = {} is not ≡ 2 or 4 (mod 6)", 4 * m + s))),
    }
}

/// gcDCQS(m^v:s) from a 2-RSQS*(v), a gcDCQS(m⁴:s) and, when the underlying
/// SQS has blocks outside the special system, an RDTD(3,4,m).
pub fn quadruple_rsqs(
    rsqs2: &CertifiedDesign,
    ing: &CertifiedDesign,
    rdtd: Option<&CertifiedDesign>,
    opts: &ConstructOptions,
) -> Result<CertifiedDesign> {
    let base = Ingredient::new("2-RSQS*", rsqs2, &[ClaimedKind::Rsqs2Star], opts)?;
    let d = base.design();
    let v = d.v;
    if v % 12 != 4 {
        return Err(Error::Precondition(format!("a 2-RSQS*(v) needs v ≡ 4 (mod 12), found {v}")));
    }
    let kk = ((v - 1) / 3) as usize;
    let systems_n = (v - 1) as usize;
    if rsqs2.families.len() != systems_n + kk {
        return Err(Error::Precondition(format!(
            "2-RSQS*({v}) must list {systems_n} systems and {kk} common classes, found {} families",
            rsqs2.families.len()
        )));
    }
    let systems = &rsqs2.families[..systems_n];
    let pcs = &rsqs2.families[systems_n..];
    let cq = Ingredient::new("gcDCQS", ing, &[ClaimedKind::GcDCQS, ClaimedKind::RDCQS], opts)?;
    let (m, n4, s) = cq.group_type()?;
    if n4 != 4 {
        return Err(Error::Precondition(format!("the gcDCQS ingredient has {n4} groups, expected 4")));
    }
    let total = m * v + s;
    check_residue("quadruple_rsqs", &[4 * m + s, total])?;
    let delta = quadruple_delta(m, s)? as usize;
    let half = m as usize / 2;

    let nb = d.blocks.len();
    let mut special = vec![false; nb];
    for &b in pcs.iter().flatten() {
        special[b as usize] = true;
    }
    // Systems containing each non-special block, in system order.
    let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); nb];
    for (sys, fam) in systems.iter().enumerate() {
        for &b in fam {
            if !special[b as usize] {
                occurrences[b as usize].push(sys);
            }
        }
    }
    if let Some(b) = (0..nb).find(|&b| !special[b] && occurrences[b].len() != 2) {
        return Err(Error::Precondition(format!(
            "block {} occurs {} times outside the special system, expected 2",
            d.show_block(&d.blocks[b]),
            occurrences[b].len()
        )));
    }
    let td = match rdtd {
        Some(c) => {
            let t = Ingredient::new("RDTD", c, &[ClaimedKind::RDTD34], opts)?;
            if t.group_type()? != (m, 4, 0) {
                return Err(Error::Precondition(format!("the RDTD must be of type {m}^4")));
            }
            Some(t)
        }
        None if special.iter().all(|&x| x) => None,
        None => {
            return Err(Error::Precondition("an RDTD(3,4,m) is required for blocks outside the special system".into()))
        }
    };

    let mut ings = vec![&cq];
    ings.extend(td.as_ref());
    let mut asm = Assembly::new(ings);
    let stem_base = v * m;
    let mut specs = Vec::with_capacity(nb);
    for (b, blk) in d.blocks.iter().enumerate() {
        let ix = usize::from(!special[b]);
        let map = grid_map(asm.ings[ix], blk, m, stem_base)?;
        specs.push((ix, map, blk.clone()));
    }
    asm.place_all(specs, opts.exec);
    // Placement through x of each block; placement index equals block index.
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); v as usize];
    for (b, blk) in d.blocks.iter().enumerate() {
        for &x in blk {
            through[x as usize].push(b);
        }
    }
    let mode = mode_for(total - 1);
    let colorings: Vec<Result<Coloring>> = exec::map_range(opts.exec, total as usize, |p| {
        let p = p as Point;
        let mut classes = Vec::new();
        if p < stem_base {
            let x = p / m;
            let ground = Ground::minus_point(p);
            let mut restricted: Vec<Vec<u32>> = vec![Vec::new(); delta];
            let mut full_at: BTreeMap<usize, Vec<&[u32]>> = BTreeMap::new();
            for (k, pk) in pcs.iter().enumerate() {
                let Some(&b) = pk.iter().find(|&&b| d.blocks[b as usize].contains(&x)) else {
                    return Err(Error::Precondition(format!("P_{} misses point {x}", k + 1)));
                };
                let pl = &asm.placements[b as usize];
                let lp = pl.local(p)?;
                let t = cq.group_index(lp)?;
                let (f, r) = split(cq.coloring(lp), &stem_group_ground(t));
                cq.expect(lp, "unrestricted", f.len(), 3 * half)?;
                cq.expect(lp, "restricted", r.len(), delta)?;
                for (a, rj) in restricted.iter_mut().zip(&r) {
                    a.extend(pl.global(rj));
                }
                full_at.insert(k, f);
            }
            for (k, pk) in pcs.iter().enumerate() {
                for l in 0..3 {
                    let sys = 3 * k + l;
                    let pb = pk.iter().copied().find(|&b| d.blocks[b as usize].contains(&x)).expect("checked above");
                    let cpl = &asm.placements[pb as usize];
                    let mut acc: Vec<Vec<u32>> =
                        (0..half).map(|r| cpl.global(full_at[&k][half * l + r]).collect()).collect();
                    for &b in &through[x as usize] {
                        if special[b] || !systems[sys].contains(&(b as u32)) {
                            continue;
                        }
                        let occ = occurrences[b].iter().position(|&o| o == sys).expect("block listed in system");
                        let pl = &asm.placements[b];
                        let t = td.as_ref().expect("RDTD present for non-special blocks");
                        let lp = pl.local(p)?;
                        let gi = t.group_index(lp)?;
                        let c = on_ground(t.coloring(lp), &Ground::minus_group(gi));
                        t.expect(lp, "resolution", c.len(), m as usize)?;
                        for (r, a) in acc.iter_mut().enumerate() {
                            a.extend(pl.global(c[r + occ * half]));
                        }
                    }
                    classes.extend(acc.into_iter().map(|blocks| class(blocks, mode, ground.clone())));
                }
            }
            classes.extend(restricted.into_iter().map(|blocks| class(blocks, mode, Ground::minus_group_and_stem(x))));
        } else {
            let mut merged: BTreeMap<(Point, usize), Vec<u32>> = BTreeMap::new();
            for b in (0..nb).filter(|&b| special[b]) {
                let pl = &asm.placements[b];
                let lp = pl.local(p)?;
                for (t, &y) in pl.assign.iter().enumerate() {
                    let c = on_ground(cq.coloring(lp), &stem_group_ground(t as u32));
                    cq.expect(lp, &format!("group-{t}"), c.len(), half)?;
                    for (j, cj) in c.iter().enumerate() {
                        merged.entry((y, j)).or_default().extend(pl.global(cj));
                    }
                }
            }
            for ((y, _), blocks) in merged {
                classes.push(class(blocks, Mode::Pc, Ground::minus_group_and_stem(y)));
            }
        }
        Ok(Coloring { classes })
    });
    let colorings = colorings.into_iter().collect::<Result<Vec<_>>>()?;
    let groups = (0..v).map(|x| (x * m..x * m + m).collect()).collect();
    let claimed = if total % 6 == 4 { ing.claimed_kind } else { ClaimedKind::GcDCQS };
    let out = Output {
        v: total,
        kind: Structure::Cqs,
        stem: Some((stem_base..total).collect()),
        groups: Some(groups),
        labels: stem_labels(&cq, stem_base),
        claimed,
        special: None,
        provenance: format!(
            "quadruple_rsqs({}; {}{})",
            rsqs2.provenance,
            ing.provenance,
            rdtd.map_or(String::new(), |c| format!("; {}", c.provenance))
        ),
        count: CountParams::Cqs { g: m, n: v, s },
    };
    finish(asm.blocks, colorings, out, opts)
}
