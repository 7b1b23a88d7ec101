//! Inflating a 1-fan design: candelabra ingredients on the 2-design layer,
//! FDGDDs on the top layer.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::exec;
use crate::model::{CertifiedDesign, ClaimedKind, Coloring, CountParams, Ground, Mode, Point, Structure};

use super::{
    check_residue, class, finish, grid_map, mode_for, on_ground, split, stem_group_ground, stem_labels, Assembly,
    ConstructOptions, Ingredient, Output,
};

/// gcDCQS((mg)ⁿ:s) from a 1-FG(3,(K₁,K),gn) of type gⁿ, a gcDCQS(m^{k₁}:s)
/// for every fan block size k₁ and an FDGDD(3,4,k{m}) for every top block
/// size k.
pub fn inflate_fan(
    fg: &CertifiedDesign,
    ings: &BTreeMap<u32, CertifiedDesign>,
    fdgdds: &BTreeMap<u32, CertifiedDesign>,
    opts: &ConstructOptions,
) -> Result<CertifiedDesign> {
    let fan = Ingredient::new("1-fan design", fg, &[ClaimedKind::FG1], opts)?;
    let d = fan.design();
    let (g, n, _) = fan.group_type()?;
    let [fan_blocks, top_blocks] = fg.families.as_slice() else {
        return Err(Error::Precondition("the 1-fan design must list its families [B, T]".into()));
    };
    let size = |b: u32| d.blocks[b as usize].len() as u32;
    // Ingredient slots: fan block sizes first, then top block sizes.
    let mut loaded: Vec<Ingredient> = Vec::new();
    let mut slot: HashMap<(bool, u32), usize> = HashMap::new();
    let mut m_s: Option<(u32, u32)> = None;
    let mut fan_sizes: Vec<u32> = fan_blocks.iter().map(|&b| size(b)).collect();
    fan_sizes.sort_unstable();
    fan_sizes.dedup();
    for &k1 in &fan_sizes {
        let c = ings
            .get(&k1)
            .ok_or_else(|| Error::Precondition(format!("no gcDCQS ingredient for fan block size {k1}")))?;
        let ing = Ingredient::new("gcDCQS", c, &[ClaimedKind::GcDCQS, ClaimedKind::RDCQS], opts)?;
        let (m, gn, s) = ing.group_type()?;
        if gn != k1 {
            return Err(Error::Precondition(format!("gcDCQS for size {k1} has {gn} groups")));
        }
        if *m_s.get_or_insert((m, s)) != (m, s) {
            return Err(Error::Precondition("gcDCQS ingredients differ in group or stem size".into()));
        }
        slot.insert((true, k1), loaded.len());
        loaded.push(ing);
    }
    let Some((m, s)) = m_s else {
        return Err(Error::Precondition("the 1-fan design has no fan blocks".into()));
    };
    let mut top_sizes: Vec<u32> = top_blocks.iter().map(|&b| size(b)).collect();
    top_sizes.sort_unstable();
    top_sizes.dedup();
    for &k in &top_sizes {
        let c =
            fdgdds.get(&k).ok_or_else(|| Error::Precondition(format!("no FDGDD ingredient for top block size {k}")))?;
        let ing = Ingredient::new("FDGDD", c, &[ClaimedKind::FDGDD34], opts)?;
        if ing.group_type()? != (m, k, 0) {
            return Err(Error::Precondition(format!("FDGDD for size {k} is not of type {m}^{k}")));
        }
        slot.insert((false, k), loaded.len());
        loaded.push(ing);
    }
    let total = m * g * n + s;
    if opts.weaken {
        if total % 6 != 2 || !fan_sizes.iter().any(|k1| (m * k1 + s) % 6 == 2) {
            return Err(Error::Precondition(format!(
                "weakened condition needs mgn+s ≡ 2 (mod 6) and some mk₁+s ≡ 2 (mod 6); mgn+s = {total}"
            )));
        }
    } else {
        let mut orders = vec![total];
        orders.extend(fan_sizes.iter().map(|k1| m * k1 + s));
        check_residue("inflate_fan", &orders)?;
    }
    let fan_slots: Vec<usize> = (0..loaded.len()).filter(|&i| i < fan_sizes.len()).collect();
    let mut asm = Assembly::new(loaded.iter().collect());
    let mut specs = Vec::new();
    for (is_fan, family) in [(true, fan_blocks), (false, top_blocks)] {
        for &b in family {
            let assign = d.blocks[b as usize].clone();
            let ing = slot[&(is_fan, assign.len() as u32)];
            let map = grid_map(&loaded[ing], &assign, m, g * n * m)?;
            specs.push((ing, map, assign));
        }
    }
    asm.place_all(specs, opts.exec);
    let is_fan_pl = |pl: usize| fan_slots.contains(&asm.placements[pl].ing);
    // Placements through each master point.
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); d.v as usize];
    for (i, pl) in asm.placements.iter().enumerate() {
        for &x in &pl.assign {
            through[x as usize].push(i);
        }
    }
    let group_of = &fan.group_of;
    let v = total;
    let mode = mode_for(v - 1);
    let half = m as usize / 2;
    let colorings: Vec<Result<Coloring>> = exec::map_range(opts.exec, v as usize, |p| {
        let p = p as Point;
        let mut classes = Vec::new();
        if p < g * n * m {
            let (x, gx) = (p / m, group_of[(p / m) as usize].expect("fan points are grouped"));
            let mut restricted: Option<Vec<Vec<u32>>> = None;
            let mut by_y: BTreeMap<Point, Vec<Vec<u32>>> = BTreeMap::new();
            for &pi in &through[x as usize] {
                let pl = &asm.placements[pi];
                let ing = asm.ing_of(pl);
                let lp = pl.local(p)?;
                let t = ing.group_index(lp)?;
                if is_fan_pl(pi) {
                    let (f, r) = split(ing.coloring(lp), &stem_group_ground(t));
                    let ys: Vec<Point> = pl.assign.iter().copied().filter(|&y| y != x).collect();
                    ing.expect(lp, "unrestricted", f.len(), ys.len() * half)?;
                    for (yi, &y) in ys.iter().enumerate() {
                        let e = by_y.entry(y).or_insert_with(|| vec![Vec::new(); half]);
                        for (j, a) in e.iter_mut().enumerate() {
                            a.extend(pl.global(f[yi * half + j]));
                        }
                    }
                    let acc = restricted.get_or_insert_with(|| vec![Vec::new(); r.len()]);
                    ing.expect(lp, "restricted", r.len(), acc.len())?;
                    for (a, rj) in acc.iter_mut().zip(&r) {
                        a.extend(pl.global(rj));
                    }
                } else {
                    let col = ing.coloring(lp);
                    for (u, &y) in pl.assign.iter().enumerate() {
                        if y == x {
                            continue;
                        }
                        let c = on_ground(col, &Ground::minus_groups(vec![t, u as u32]));
                        ing.expect(lp, &format!("frame group-{u}"), c.len(), half)?;
                        let e = by_y.entry(y).or_insert_with(|| vec![Vec::new(); half]);
                        for (a, cj) in e.iter_mut().zip(&c) {
                            a.extend(pl.global(cj));
                        }
                    }
                }
            }
            for (y, cls) in by_y {
                let ground = if group_of[y as usize] == Some(gx) {
                    Ground::minus_group_and_stem(gx)
                } else {
                    Ground::minus_point(p)
                };
                classes.extend(cls.into_iter().map(|b| class(b, mode, ground.clone())));
            }
            classes.extend(
                restricted.unwrap_or_default().into_iter().map(|b| class(b, mode, Ground::minus_group_and_stem(gx))),
            );
        } else {
            // F^{y,j}: union over the fan blocks through y, grouped by y.
            let mut merged: BTreeMap<(Point, usize), Vec<u32>> = BTreeMap::new();
            for (pi, pl) in asm.placements.iter().enumerate() {
                if !is_fan_pl(pi) {
                    continue;
                }
                let ing = asm.ing_of(pl);
                let lp = pl.local(p)?;
                for (t, &y) in pl.assign.iter().enumerate() {
                    for (j, cj) in on_ground(ing.coloring(lp), &stem_group_ground(t as u32)).iter().enumerate() {
                        merged.entry((y, j)).or_default().extend(pl.global(cj));
                    }
                }
            }
            for ((y, _), b) in merged {
                classes.push(class(b, Mode::Pc, Ground::minus_group_and_stem(group_of[y as usize].expect("grouped"))));
            }
        }
        Ok(Coloring { classes })
    });
    let colorings = colorings.into_iter().collect::<Result<Vec<_>>>()?;
    let gs = d.groups.as_ref().expect("grouped");
    let groups = gs.iter().map(|grp| grp.iter().flat_map(|&x| (0..m).map(move |i| x * m + i)).collect()).collect();
    let claimed = if total % 6 == 4 { loaded[0].cert.claimed_kind } else { ClaimedKind::GcDCQS };
    let out = Output {
        v,
        kind: Structure::Cqs,
        stem: Some((g * n * m..v).collect()),
        groups: Some(groups),
        labels: stem_labels(&loaded[0], g * n * m),
        claimed,
        special: None,
        provenance: format!("inflate_fan({})", fg.provenance),
        count: CountParams::Cqs { g: m * g, n, s },
    };
    finish(asm.blocks, colorings, out, opts)
}
