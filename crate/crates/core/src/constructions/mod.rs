//! Recursive constructions. Each combinator takes certified ingredients,
//! places copies of them on the blocks of a master design, assembles the
//! derived colourings by class unions, and re-verifies the result before
//! returning it.

mod fan;
mod fill;
mod inflate;
mod quadruple;

use std::collections::BTreeMap;

pub use fan::inflate_fan;
pub use fill::{fill_c1dcqs, fill_gcdcqs};
pub use inflate::{inflate_c1, inflate_rds};
pub use quadruple::{quadruple_delta, quadruple_rsqs};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::model::{
    expected_block_count, Block, CertifiedDesign, ClaimedKind, ClassScope, ColorClass, Coloring, CountParams,
    DesignInstance, Ground, Mode, Point, Structure,
};
use crate::verify::{chromatic_profile, complete_colorings, verify_certificate_with};

/// Knobs shared by every construction.
#[derive(Clone, Copy, Debug)]
pub struct ConstructOptions {
    /// Verify every ingredient before use; failures become precondition errors.
    pub check_ingredients: bool,
    pub exec: Exec,
    /// Accept the relaxed congruence of fan inflation (some, not every, fan block size).
    pub weaken: bool,
    /// Fixed point η of `inflate_c1`; defaults to 0.
    pub eta: Option<Point>,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        Self { check_ingredients: true, exec: Exec::Auto, weaken: false, eta: None }
    }
}

/// A checked ingredient with its colourings expanded to every point.
pub(crate) struct Ingredient<'a> {
    pub name: &'static str,
    pub cert: &'a CertifiedDesign,
    pub colorings: Vec<Coloring>,
    pub group_of: Vec<Option<u32>>,
}

impl<'a> Ingredient<'a> {
    pub fn new(
        name: &'static str,
        cert: &'a CertifiedDesign,
        kinds: &[ClaimedKind],
        opts: &ConstructOptions,
    ) -> Result<Self> {
        if !kinds.contains(&cert.claimed_kind) {
            let want: Vec<String> = kinds.iter().map(|k| k.name()).collect();
            return Err(Error::Precondition(format!(
                "{name}: expected {}, found {}",
                want.join(" or "),
                cert.claimed_kind
            )));
        }
        if opts.check_ingredients {
            let report = verify_certificate_with(cert, opts.exec);
            if !report.pass {
                return Err(Error::Precondition(format!(
                    "{name} ({}) fails certification: {}",
                    cert.claimed_kind,
                    report.render()
                )));
            }
        }
        let d = &cert.design;
        let colorings = if cert.claimed_kind.has_point_colorings() {
            let mut all = complete_colorings(cert).map_err(|e| Error::Precondition(format!("{name}: {e}")))?;
            (0..d.v)
                .map(|p| {
                    all.remove(&p).ok_or_else(|| {
                        Error::Precondition(format!("{name}: no colouring at point {}", d.point_name(p)))
                    })
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(Self { name, cert, colorings, group_of: d.group_of() })
    }

    pub fn design(&self) -> &DesignInstance {
        &self.cert.design
    }

    pub fn coloring(&self, p: Point) -> &Coloring {
        &self.colorings[p as usize]
    }

    pub fn groups(&self) -> &[Vec<Point>] {
        self.design().groups.as_deref().unwrap_or(&[])
    }

    pub fn stem(&self) -> &[Point] {
        self.design().stem.as_deref().unwrap_or(&[])
    }

    /// `(g, n, s)`: uniform group size, number of groups, stem size.
    pub fn group_type(&self) -> Result<(u32, u32, u32)> {
        let gs = self.groups();
        let g = gs.first().map_or(0, Vec::len);
        if g == 0 || gs.iter().any(|x| x.len() != g) {
            return Err(Error::Precondition(format!("{}: groups are missing or not of one size", self.name)));
        }
        Ok((g as u32, gs.len() as u32, self.stem().len() as u32))
    }

    pub fn group_index(&self, p: Point) -> Result<u32> {
        self.group_of[p as usize]
            .ok_or_else(|| Error::Precondition(format!("{}: point {p} lies in no group", self.name)))
    }

    /// Special group of a c1DCQS: declared, or read off a stem colouring.
    pub fn special_group(&self) -> Result<u32> {
        if let Some(h) = self.cert.special_group {
            return Ok(h);
        }
        let (g, n, _) = self.group_type()?;
        let &a = self.stem().first().ok_or_else(|| Error::Precondition(format!("{}: empty stem", self.name)))?;
        (0..n)
            .find(|&t| on_ground(self.coloring(a), &stem_group_ground(t)).len() == g as usize / 2 + 1)
            .ok_or_else(|| Error::Precondition(format!("{}: no special group", self.name)))
    }

    pub fn expect(&self, p: Point, what: &str, found: usize, want: usize) -> Result<()> {
        if found == want {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "{} at point {}: expected {want} {what} classes, found {found}",
                self.name,
                self.design().point_name(p)
            )))
        }
    }
}

/// Ground `X ∖ (G_t ∪ S)` as written by stem colourings.
pub(crate) fn stem_group_ground(t: u32) -> Ground {
    Ground::minus_group_and_stem(t)
}

/// Blocks of the classes scoped exactly to `ground`, in order.
pub(crate) fn on_ground<'c>(col: &'c Coloring, ground: &Ground) -> Vec<&'c [u32]> {
    col.classes.iter().filter(|c| &c.scope.ground == ground).map(|c| c.blocks.as_slice()).collect()
}

/// Splits a colouring into `(other, restricted)` classes by ground.
pub(crate) fn split<'c>(col: &'c Coloring, restricted: &Ground) -> (Vec<&'c [u32]>, Vec<&'c [u32]>) {
    let mut other = Vec::new();
    let mut rest = Vec::new();
    for c in &col.classes {
        if &c.scope.ground == restricted {
            rest.push(c.blocks.as_slice());
        } else {
            other.push(c.blocks.as_slice());
        }
    }
    (other, rest)
}

/// One copy of an ingredient inside the output.
pub(crate) struct Placement {
    pub ing: usize,
    pub offset: u32,
    /// Master-design point carried by each ingredient group.
    pub assign: Vec<Point>,
    inv: Vec<(Point, Point)>,
}

impl Placement {
    /// Ingredient point sitting at output point `out`.
    pub fn local(&self, out: Point) -> Result<Point> {
        self.inv
            .binary_search_by_key(&out, |&(o, _)| o)
            .map(|i| self.inv[i].1)
            .map_err(|_| Error::Precondition(format!("point {out} is not covered by the placed copy")))
    }

    pub fn global<'b>(&self, blocks: &'b [u32]) -> impl Iterator<Item = u32> + 'b {
        let offset = self.offset;
        blocks.iter().map(move |&b| offset + b)
    }
}

/// Output blocks accumulated from placed ingredient copies.
pub(crate) struct Assembly<'a> {
    pub ings: Vec<&'a Ingredient<'a>>,
    pub placements: Vec<Placement>,
    pub blocks: Vec<Block>,
}

impl<'a> Assembly<'a> {
    pub fn new(ings: Vec<&'a Ingredient<'a>>) -> Self {
        Self { ings, placements: Vec::new(), blocks: Vec::new() }
    }

    /// Places copies `(ingredient, point map, assign)`, mapping blocks in parallel.
    pub fn place_all(&mut self, specs: Vec<(usize, Vec<Point>, Vec<Point>)>, mode: Exec) {
        let ings = &self.ings;
        let mapped: Vec<Vec<Block>> = exec::map_slice(mode, &specs, |(ing, map, _)| {
            ings[*ing]
                .design()
                .blocks
                .iter()
                .map(|b| {
                    let mut nb: Block = b.iter().map(|&p| map[p as usize]).collect();
                    nb.sort_unstable();
                    nb
                })
                .collect()
        });
        for ((ing, map, assign), blocks) in specs.into_iter().zip(mapped) {
            let mut inv: Vec<(Point, Point)> = map.iter().enumerate().map(|(i, &o)| (o, i as Point)).collect();
            inv.sort_unstable();
            self.placements.push(Placement { ing, offset: self.blocks.len() as u32, assign, inv });
            self.blocks.extend(blocks);
        }
    }

    pub fn ing_of(&self, pl: &Placement) -> &Ingredient<'a> {
        self.ings[pl.ing]
    }
}

/// Maps a grouped ingredient onto `assign × I_m ∪ S`: member `i` of group
/// `t` goes to `assign[t]·m + i`, stem point `j` to `stem_base + j`.
pub(crate) fn grid_map(ing: &Ingredient, assign: &[Point], m: u32, stem_base: Point) -> Result<Vec<Point>> {
    let d = ing.design();
    let mut map = vec![Point::MAX; d.v as usize];
    if assign.len() != ing.groups().len() {
        return Err(Error::Precondition(format!(
            "{}: {} groups placed on a block of size {}",
            ing.name,
            ing.groups().len(),
            assign.len()
        )));
    }
    for (t, g) in ing.groups().iter().enumerate() {
        if g.len() != m as usize {
            return Err(Error::Precondition(format!("{}: group {t} has size {}, expected {m}", ing.name, g.len())));
        }
        for (i, &p) in g.iter().enumerate() {
            map[p as usize] = assign[t] * m + i as u32;
        }
    }
    for (j, &p) in ing.stem().iter().enumerate() {
        map[p as usize] = stem_base + j as u32;
    }
    if map.contains(&Point::MAX) {
        return Err(Error::Precondition(format!("{}: stem and groups do not cover the points", ing.name)));
    }
    Ok(map)
}

/// Scope mode for classes of a derived design on `v′` points.
pub(crate) fn mode_for(derived_v: u32) -> Mode {
    if derived_v % 6 == 3 {
        Mode::Pc
    } else {
        Mode::Ppc
    }
}

pub(crate) fn class(blocks: Vec<u32>, mode: Mode, ground: Ground) -> ColorClass {
    ColorClass { blocks, scope: ClassScope { mode, ground } }
}

/// Shape of an assembled output, before canonical sorting.
pub(crate) struct Output {
    pub v: u32,
    pub kind: Structure,
    pub stem: Option<Vec<Point>>,
    pub groups: Option<Vec<Vec<Point>>>,
    pub labels: BTreeMap<String, Point>,
    pub claimed: ClaimedKind,
    pub special: Option<u32>,
    pub provenance: String,
    pub count: CountParams,
}

/// Sorts blocks canonically, remaps colourings, checks the block count
/// identity and certifies the result.
pub(crate) fn finish(
    blocks: Vec<Block>,
    colorings: Vec<Coloring>,
    out: Output,
    opts: &ConstructOptions,
) -> Result<CertifiedDesign> {
    let mut order: Vec<u32> = (0..blocks.len() as u32).collect();
    order.sort_by(|&a, &b| blocks[a as usize].cmp(&blocks[b as usize]));
    if let Some(w) = order.windows(2).find(|w| blocks[w[0] as usize] == blocks[w[1] as usize]) {
        return Err(Error::Certification(format!("assembled design repeats block {:?}", blocks[w[0] as usize])));
    }
    let mut new_index = vec![0u32; blocks.len()];
    for (new, &old) in order.iter().enumerate() {
        new_index[old as usize] = new as u32;
    }
    let mut blocks = blocks;
    let mut sorted: Vec<Block> = order.iter().map(|&i| std::mem::take(&mut blocks[i as usize])).collect();
    sorted.shrink_to_fit();
    let colorings: Vec<Coloring> = exec::map_slice(opts.exec, &colorings, |c| Coloring {
        classes: c
            .classes
            .iter()
            .map(|cl| {
                let mut bs: Vec<u32> = cl.blocks.iter().map(|&b| new_index[b as usize]).collect();
                bs.sort_unstable();
                ColorClass { blocks: bs, scope: cl.scope.clone() }
            })
            .collect(),
    });
    let expected = expected_block_count(out.count)?;
    if sorted.len() as u64 != expected {
        return Err(Error::Certification(format!(
            "assembled {} blocks, the block count identity requires {expected}",
            sorted.len()
        )));
    }
    let design = DesignInstance {
        v: out.v,
        t: 3,
        block_sizes: vec![4],
        kind: out.kind,
        stem: out.stem,
        groups: out.groups,
        hole: None,
        blocks: sorted,
        labels: out.labels,
    };
    design.validate()?;
    let mut cert = CertifiedDesign::new(design, out.claimed);
    cert.derived_colorings = colorings.into_iter().enumerate().map(|(p, c)| (p as Point, c)).collect();
    cert.special_group = out.special;
    cert.provenance = out.provenance;
    certify(cert, opts)
}

/// Verifies `cert` and attaches the report, or fails with it.
pub(crate) fn certify(mut cert: CertifiedDesign, opts: &ConstructOptions) -> Result<CertifiedDesign> {
    let report = verify_certificate_with(&cert, opts.exec);
    if !report.pass {
        return Err(Error::Certification(format!("{} output: {}", cert.claimed_kind, report.render())));
    }
    cert.report = Some(report);
    Ok(cert)
}

/// Relabels stem labels of an ingredient onto `stem_base + j`.
pub(crate) fn stem_labels(ing: &Ingredient, stem_base: Point) -> BTreeMap<String, Point> {
    let d = ing.design();
    ing.stem()
        .iter()
        .enumerate()
        .filter_map(|(j, &p)| d.labels.iter().find(|(_, &q)| q == p).map(|(k, _)| (k.clone(), stem_base + j as u32)))
        .collect()
}

pub(crate) fn check_residue(what: &str, values: &[u32]) -> Result<u32> {
    let r = values[0] % 6;
    if !matches!(r, 2 | 4) || values.iter().any(|v| v % 6 != r) {
        return Err(Error::Precondition(format!("{what}: orders {values:?} must all be ≡ 2 or all ≡ 4 (mod 6)")));
    }
    Ok(r)
}

/// Reads an SQS with minimum colourable derived designs as a gcDSQS(v, h)
/// with the given hole (h ≤ 2). At each hole point the required number of
/// classes avoiding the hole are rescoped to `X ∖ H`.
pub fn designate_hole(cert: &CertifiedDesign, hole: &[Point], opts: &ConstructOptions) -> Result<CertifiedDesign> {
    if !matches!(cert.claimed_kind, ClaimedKind::McDSQS | ClaimedKind::RDSQS) {
        return Err(Error::Precondition(format!(
            "a hole can only be designated in an mcDSQS or RDSQS, found {}",
            cert.claimed_kind
        )));
    }
    let d = &cert.design;
    let mut h: Vec<Point> = hole.to_vec();
    h.sort_unstable();
    h.dedup();
    if h.len() != hole.len() || h.len() > 2 || h.iter().any(|&p| p >= d.v) {
        return Err(Error::Precondition(format!("hole {hole:?} must be at most two distinct points of the design")));
    }
    let mut colorings = complete_colorings(cert)?;
    let hv = h.len() as u32;
    if hv > 0 {
        let r = chromatic_profile(d.v - 1)? as i64;
        let s = r - ((d.v - hv) / 2) as i64;
        for &x in &h {
            let col =
                colorings.get_mut(&x).ok_or_else(|| Error::Precondition(format!("no colouring at hole point {x}")))?;
            let mut keep = Vec::new();
            let mut moved = Vec::new();
            for c in std::mem::take(&mut col.classes) {
                let avoids = c.blocks.iter().all(|&b| d.blocks[b as usize].iter().all(|p| *p == x || !h.contains(p)));
                if avoids && (moved.len() as i64) < s {
                    moved.push(ColorClass {
                        blocks: c.blocks,
                        scope: ClassScope { mode: c.scope.mode, ground: Ground::minus_hole() },
                    });
                } else {
                    keep.push(c);
                }
            }
            if (moved.len() as i64) < s {
                return Err(Error::Precondition(format!("hole point {x}: fewer than {s} classes avoid the hole")));
            }
            keep.extend(moved);
            col.classes = keep;
        }
    }
    let mut out = CertifiedDesign::new(
        DesignInstance { kind: Structure::IncompleteSQS, hole: Some(h), ..d.clone() },
        ClaimedKind::GcDSQS,
    );
    out.derived_colorings = colorings;
    out.provenance = format!("{} with hole {:?}", cert.provenance, hole);
    certify(out, opts)
}

/// Reads an RDS(3, 4, v) as an RDSQS(v).
pub fn as_rdsqs(cert: &CertifiedDesign, opts: &ConstructOptions) -> Result<CertifiedDesign> {
    if cert.design.block_sizes != [4] || !matches!(cert.claimed_kind, ClaimedKind::RDS | ClaimedKind::RDSQS) {
        return Err(Error::Precondition(format!(
            "an RDSQS needs an RDS with blocks of size 4, found {} with sizes {:?}",
            cert.claimed_kind, cert.design.block_sizes
        )));
    }
    let mut out = cert.clone();
    out.claimed_kind = ClaimedKind::RDSQS;
    out.report = None;
    out.derived_colorings = complete_colorings(cert)?;
    certify(out, opts)
}
