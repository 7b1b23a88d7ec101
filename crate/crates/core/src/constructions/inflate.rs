//! Inflating an RDS(3, k+1, n+1) by candelabra ingredients on the blocks
//! through ∞ and RDGDDs on the remaining blocks.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exec;
use crate::model::{CertifiedDesign, ClaimedKind, ColorClass, Coloring, CountParams, Ground, Mode, Point, Structure};

use super::{
    check_residue, class, finish, grid_map, mode_for, on_ground, split, stem_group_ground, stem_labels, Assembly,
    ConstructOptions, Ingredient, Output, Placement,
};

/// The RDS split at ∞ into fan blocks `B_∞` and the rest `T`.
struct FanLayout<'a> {
    rds: &'a Ingredient<'a>,
    inf: Point,
    n: u32,
    k: u32,
    /// Placement index of every RDS block.
    placement_of: Vec<usize>,
}

impl<'a> FanLayout<'a> {
    fn new(rds: &'a Ingredient<'a>) -> Result<Self> {
        let d = rds.design();
        let &[size] = d.block_sizes.as_slice() else {
            return Err(Error::Precondition(format!("RDS has block sizes {:?}", d.block_sizes)));
        };
        let inf = d.labels.get("inf").copied().unwrap_or(d.v - 1);
        Ok(Self { rds, inf, n: d.v - 1, k: size - 1, placement_of: vec![usize::MAX; d.blocks.len()] })
    }

    /// Index in `I_n` of an RDS point other than ∞.
    fn idx(&self, p: Point) -> Point {
        if p > self.inf {
            p - 1
        } else {
            p
        }
    }

    fn rds_point(&self, x: Point) -> Point {
        if x >= self.inf {
            x + 1
        } else {
            x
        }
    }

    fn is_fan(&self, b: u32) -> bool {
        self.rds.design().blocks[b as usize].contains(&self.inf)
    }

    /// Points of block `b` in `I_n`, without ∞.
    fn points(&self, b: u32) -> Vec<Point> {
        self.rds.design().blocks[b as usize].iter().filter(|&&p| p != self.inf).map(|&p| self.idx(p)).collect()
    }
}

fn output_shape(n: u32, m: u32, s: u32) -> (Option<Vec<Point>>, Option<Vec<Vec<Point>>>) {
    let stem = (n * m..n * m + s).collect();
    let groups = (0..n).map(|x| (x * m..x * m + m).collect()).collect();
    (Some(stem), Some(groups))
}

/// Colouring at the group point `(x, i)`: for every class `B_x(h)` of the
/// RDS resolution at x, the full classes of the ingredient on `M_∞(h)` are
/// joined index-wise with the RDGDD classes of the other blocks; the
/// restricted classes are joined over all h.
fn group_point_coloring(asm: &Assembly, lay: &FanLayout, m: u32, x: Point, i: u32, mode: Mode) -> Result<Coloring> {
    let out = x * m + i;
    let rx = lay.rds_point(x);
    let rcol = lay.rds.coloring(rx);
    let mut full: Vec<ColorClass> = Vec::new();
    let mut restricted: Option<Vec<Vec<u32>>> = None;
    let rd = lay.rds.design();
    for (h, rc) in rcol.classes.iter().enumerate() {
        let fans: Vec<u32> = rc.blocks.iter().copied().filter(|&b| lay.is_fan(b)).collect();
        let &[mb] = fans.as_slice() else {
            return Err(Error::Precondition(format!(
                "RDS colouring at point {}: class {h} has {} blocks through ∞, expected 1",
                rd.point_name(rx),
                fans.len()
            )));
        };
        let pl = &asm.placements[lay.placement_of[mb as usize]];
        let ing = asm.ing_of(pl);
        let lp = pl.local(out)?;
        let (f, r) = split(ing.coloring(lp), &stem_group_ground(ing.group_index(lp)?));
        ing.expect(lp, "unrestricted", f.len(), (m * (lay.k - 1) / 2) as usize)?;
        let others: Vec<(&Placement, &Coloring)> = rc
            .blocks
            .iter()
            .filter(|&&b| b != mb)
            .map(|&b| {
                let plb = &asm.placements[lay.placement_of[b as usize]];
                let lb = plb.local(out)?;
                let ingb = asm.ing_of(plb);
                let col = ingb.coloring(lb);
                ingb.expect(lb, "parallel", col.classes.len(), f.len())?;
                Ok((plb, col))
            })
            .collect::<Result<_>>()?;
        for (j, fj) in f.iter().enumerate() {
            let mut blocks: Vec<u32> = pl.global(fj).collect();
            for (plb, col) in &others {
                blocks.extend(plb.global(&col.classes[j].blocks));
            }
            full.push(class(blocks, mode, Ground::minus_point(out)));
        }
        let acc = restricted.get_or_insert_with(|| vec![Vec::new(); r.len()]);
        ing.expect(lp, "restricted", r.len(), acc.len())?;
        for (a, rj) in acc.iter_mut().zip(&r) {
            a.extend(pl.global(rj));
        }
    }
    full.extend(restricted.unwrap_or_default().into_iter().map(|b| class(b, mode, Ground::minus_group_and_stem(x))));
    Ok(Coloring { classes: full })
}

fn place(
    lay: &mut FanLayout,
    asm: &mut Assembly,
    m: u32,
    fan_spec: impl Fn(&[Point]) -> Result<(usize, Vec<Point>)>,
    rdgdd: Option<usize>,
    opts: &ConstructOptions,
) -> Result<()> {
    let nb = lay.rds.design().blocks.len();
    let mut specs = Vec::with_capacity(nb);
    for b in 0..nb as u32 {
        let pts = lay.points(b);
        let (ing, assign) = if lay.is_fan(b) {
            fan_spec(&pts)?
        } else {
            let r = rdgdd
                .ok_or_else(|| Error::Precondition("the RDS has blocks avoiding ∞ but no RDGDD was supplied".into()))?;
            (r, pts)
        };
        let map = grid_map(asm.ings[ing], &assign, m, lay.n * m)?;
        lay.placement_of[b as usize] = specs.len();
        specs.push((ing, map, assign));
    }
    asm.place_all(specs, opts.exec);
    Ok(())
}

fn load_rdgdd<'a>(
    rdgdd: Option<&'a CertifiedDesign>,
    m: u32,
    k: u32,
    opts: &ConstructOptions,
) -> Result<Option<Ingredient<'a>>> {
    rdgdd
        .map(|c| {
            let ing = Ingredient::new("RDGDD", c, &[ClaimedKind::RDGDD34], opts)?;
            let (gm, gn, gs) = ing.group_type()?;
            if (gm, gn, gs) != (m, k + 1, 0) {
                return Err(Error::Precondition(format!("RDGDD has type {gm}^{gn}, expected {m}^{}", k + 1)));
            }
            Ok(ing)
        })
        .transpose()
}

/// gcDCQS(mⁿ:s) from an RDS(3, k+1, n+1), a gcDCQS(mᵏ:s) and an
/// RDGDD(3,4,(k+1){m}). The RDGDD may be omitted when every block meets ∞.
pub fn inflate_rds(
    rds: &CertifiedDesign,
    ing: &CertifiedDesign,
    rdgdd: Option<&CertifiedDesign>,
    opts: &ConstructOptions,
) -> Result<CertifiedDesign> {
    let rdsi = Ingredient::new("RDS", rds, &[ClaimedKind::RDS], opts)?;
    let cq = Ingredient::new("gcDCQS", ing, &[ClaimedKind::GcDCQS, ClaimedKind::RDCQS], opts)?;
    let (m, k, s) = cq.group_type()?;
    let mut lay = FanLayout::new(&rdsi)?;
    if lay.k != k {
        return Err(Error::Precondition(format!("RDS blocks have size {}, the ingredient has {k} groups", lay.k + 1)));
    }
    let n = lay.n;
    check_residue("inflate_rds", &[m * n + s, m * k + s])?;
    let rg = load_rdgdd(rdgdd, m, k, opts)?;
    let mut ings: Vec<&Ingredient> = vec![&cq];
    if let Some(r) = &rg {
        ings.push(r);
    }
    let mut asm = Assembly::new(ings);
    let rg_idx = rg.as_ref().map(|_| 1);
    place(&mut lay, &mut asm, m, |pts| Ok((0, pts.to_vec())), rg_idx, opts)?;
    let v = n * m + s;
    let mode = mode_for(v - 1);
    let half = m as usize / 2;
    let fan_pl: Vec<&Placement> = asm.placements.iter().filter(|p| p.ing == 0).collect();
    let colorings: Vec<Result<Coloring>> = exec::map_range(opts.exec, v as usize, |p| {
        let p = p as Point;
        if p < n * m {
            return group_point_coloring(&asm, &lay, m, p / m, p % m, mode);
        }
        let mut acc: BTreeMap<Point, Vec<Vec<u32>>> = BTreeMap::new();
        for pl in &fan_pl {
            let lp = pl.local(p)?;
            for (t, &y) in pl.assign.iter().enumerate() {
                let c = on_ground(cq.coloring(lp), &stem_group_ground(t as u32));
                cq.expect(lp, &format!("group-{t}"), c.len(), half)?;
                let e = acc.entry(y).or_insert_with(|| vec![Vec::new(); half]);
                for (a, cj) in e.iter_mut().zip(&c) {
                    a.extend(pl.global(cj));
                }
            }
        }
        let classes = acc
            .into_iter()
            .flat_map(|(y, cls)| cls.into_iter().map(move |b| class(b, Mode::Pc, Ground::minus_group_and_stem(y))))
            .collect();
        Ok(Coloring { classes })
    });
    let colorings = colorings.into_iter().collect::<Result<Vec<_>>>()?;
    let (stem, groups) = output_shape(n, m, s);
    let out = Output {
        v,
        kind: Structure::Cqs,
        stem,
        groups,
        labels: stem_labels(&cq, n * m),
        claimed: ing.claimed_kind,
        special: None,
        provenance: format!(
            "inflate_rds({}; {}; {})",
            rds.provenance,
            ing.provenance,
            rdgdd.map_or("-", |r| r.provenance.as_str())
        ),
        count: CountParams::Cqs { g: m, n, s },
    };
    finish(asm.blocks, colorings, out, opts)
}

/// ¹cDCQS(mⁿ:2) from an RDS(3, k+1, n+1), a ¹cDCQS(mᵏ:2) on the fan blocks
/// through η, a ²cDCQS(mᵏ:2) on the other fan blocks and an
/// RDGDD(3,4,(k+1){m}) on the blocks avoiding ∞.
pub fn inflate_c1(
    rds: &CertifiedDesign,
    c1: &CertifiedDesign,
    c2: &CertifiedDesign,
    rdgdd: Option<&CertifiedDesign>,
    opts: &ConstructOptions,
) -> Result<CertifiedDesign> {
    let rdsi = Ingredient::new("RDS", rds, &[ClaimedKind::RDS], opts)?;
    let one = Ingredient::new("¹cDCQS", c1, &[ClaimedKind::C1DCQS], opts)?;
    let two = Ingredient::new("²cDCQS", c2, &[ClaimedKind::C2DCQS], opts)?;
    let (m, k, s) = one.group_type()?;
    if two.group_type()? != (m, k, s) {
        return Err(Error::Precondition("¹cDCQS and ²cDCQS have different types".into()));
    }
    if m % 6 != 2 || s != 2 {
        return Err(Error::Precondition(format!("needs m ≡ 2 (mod 6) and a stem of size 2, found m = {m}, s = {s}")));
    }
    let special = one.special_group()?;
    let mut lay = FanLayout::new(&rdsi)?;
    if lay.k != k {
        return Err(Error::Precondition(format!(
            "RDS blocks have size {}, the ingredients have {k} groups",
            lay.k + 1
        )));
    }
    let n = lay.n;
    let eta = opts.eta.unwrap_or(0);
    if eta >= n {
        return Err(Error::Precondition(format!("η = {eta} is not a point of I_{n}")));
    }
    let rg = load_rdgdd(rdgdd, m, k, opts)?;
    let mut ings: Vec<&Ingredient> = vec![&one, &two];
    if let Some(r) = &rg {
        ings.push(r);
    }
    let mut asm = Assembly::new(ings);
    let rg_idx = rg.as_ref().map(|_| 2);
    // Through η the special group of the ¹cDCQS is aligned to {η} × I_m.
    let fan_spec = |pts: &[Point]| -> Result<(usize, Vec<Point>)> {
        if !pts.contains(&eta) {
            return Ok((1, pts.to_vec()));
        }
        let mut rest = pts.iter().copied().filter(|&p| p != eta);
        let assign = (0..k).map(|t| if t == special { eta } else { rest.next().expect("k points") }).collect();
        Ok((0, assign))
    };
    place(&mut lay, &mut asm, m, fan_spec, rg_idx, opts)?;
    let v = n * m + s;
    let mode = mode_for(v - 1);
    let half = m as usize / 2;
    let rd = rdsi.design();
    // Resolution of B_∞: the RDS colouring at ∞.
    let resolution: Vec<Vec<u32>> = rdsi.coloring(lay.inf).classes.iter().map(|c| c.blocks.clone()).collect();
    let colorings: Vec<Result<Coloring>> = exec::map_range(opts.exec, v as usize, |p| {
        let p = p as Point;
        if p < n * m {
            return group_point_coloring(&asm, &lay, m, p / m, p % m, mode);
        }
        let mut by_y: BTreeMap<Point, Vec<Vec<u32>>> = BTreeMap::new();
        let mut eta_classes: Vec<Vec<u32>> = vec![Vec::new(); half + 1];
        for (h, rc) in resolution.iter().enumerate() {
            let Some(&cb) = rc.iter().find(|&&b| rd.blocks[b as usize].contains(&lay.rds_point(eta))) else {
                return Err(Error::Precondition(format!("class {h} of the RDS resolution at ∞ misses η")));
            };
            let pc = &asm.placements[lay.placement_of[cb as usize]];
            let lc = pc.local(p)?;
            let ccol = one.coloring(lc);
            let others: Vec<(&Placement, Vec<&[u32]>)> = rc
                .iter()
                .filter(|&&b| b != cb)
                .map(|&b| {
                    let pl = &asm.placements[lay.placement_of[b as usize]];
                    let lb = pl.local(p)?;
                    let cls = on_ground(two.coloring(lb), &Ground::minus_stem());
                    two.expect(lb, "parallel", cls.len(), half * (k as usize - 1))?;
                    Ok((pl, cls))
                })
                .collect::<Result<_>>()?;
            let mut f_index = 0;
            for (t, &y) in pc.assign.iter().enumerate() {
                let cls = on_ground(ccol, &stem_group_ground(t as u32));
                if y == eta {
                    one.expect(lc, "special-group", cls.len(), half + 1)?;
                    for (a, c) in eta_classes.iter_mut().zip(&cls) {
                        a.extend(pc.global(c));
                    }
                    continue;
                }
                one.expect(lc, &format!("group-{t}"), cls.len(), half)?;
                let e = by_y.entry(y).or_default();
                for c in cls {
                    let mut blocks: Vec<u32> = pc.global(c).collect();
                    for (pl, oc) in &others {
                        blocks.extend(pl.global(oc[f_index]));
                    }
                    f_index += 1;
                    e.push(blocks);
                }
            }
        }
        by_y.insert(eta, eta_classes);
        let classes = by_y
            .into_iter()
            .flat_map(|(y, cls)| cls.into_iter().map(move |b| class(b, Mode::Ppc, Ground::minus_group_and_stem(y))))
            .collect();
        Ok(Coloring { classes })
    });
    let colorings = colorings.into_iter().collect::<Result<Vec<_>>>()?;
    let (stem, groups) = output_shape(n, m, s);
    let out = Output {
        v,
        kind: Structure::Cqs,
        stem,
        groups,
        labels: stem_labels(&one, n * m),
        claimed: ClaimedKind::C1DCQS,
        special: Some(eta),
        provenance: format!(
            "inflate_c1({}; {}; {}; {}; eta={eta})",
            rds.provenance,
            c1.provenance,
            c2.provenance,
            rdgdd.map_or("-", |r| r.provenance.as_str())
        ),
        count: CountParams::Cqs { g: m, n, s },
    };
    finish(asm.blocks, colorings, out, opts)
}
