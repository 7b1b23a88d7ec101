//! Permutations of the point universe, orbit expansion of base blocks, and
//! transport of colourings along automorphisms.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::model::{Block, ClassScope, ColorClass, Coloring, DesignInstance, Ground, Point};

/// A bijection on `0..v`, stored in one-line image form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Perm {
    images: Vec<Point>,
}

impl Perm {
    pub fn identity(v: u32) -> Self {
        Self { images: (0..v).collect() }
    }

    pub fn from_images(images: Vec<Point>) -> Result<Self> {
        let v = images.len();
        let mut seen = vec![false; v];
        for &p in &images {
            if p as usize >= v || std::mem::replace(&mut seen[p as usize], true) {
                return Err(Error::BadPermutation(format!("{images:?}")));
            }
        }
        Ok(Self { images })
    }

    /// Builds a permutation of `0..v` from disjoint cycles.
    pub fn from_cycles(v: u32, cycles: &[Vec<Point>]) -> Result<Self> {
        let mut images: Vec<Point> = (0..v).collect();
        let mut moved = vec![false; v as usize];
        for c in cycles {
            for (i, &p) in c.iter().enumerate() {
                if p >= v {
                    return Err(Error::UnknownPoint { point: p, v });
                }
                if std::mem::replace(&mut moved[p as usize], true) {
                    return Err(Error::BadPermutation(format!("point {p} appears in two cycles")));
                }
                images[p as usize] = c[(i + 1) % c.len()];
            }
        }
        Self::from_images(images)
    }

    /// Parses cycle notation `(0,1,2)(a,b)` or one-line form `[1,2,0]`.
    /// Point tokens may be integers or keys of `labels`.
    pub fn parse(s: &str, v: u32, labels: &BTreeMap<String, Point>) -> Result<Self> {
        let s = s.trim();
        let token = |t: &str| -> Result<Point> {
            let t = t.trim();
            if let Some(&p) = labels.get(t) {
                return Ok(p);
            }
            t.parse::<Point>().map_err(|_| Error::Parse(format!("bad point `{t}` in permutation")))
        };
        if let Some(body) = s.strip_prefix('[') {
            let body = body.strip_suffix(']').ok_or_else(|| Error::Parse(format!("unterminated image list `{s}`")))?;
            let images = body.split(',').filter(|t| !t.trim().is_empty()).map(token).collect::<Result<Vec<_>>>()?;
            if images.len() != v as usize {
                return Err(Error::BadPermutation(format!("image list has {} entries, expected {v}", images.len())));
            }
            return Self::from_images(images);
        }
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest.strip_prefix('(').ok_or_else(|| Error::Parse(format!("expected `(` in `{s}`")))?;
            let close = open.find(')').ok_or_else(|| Error::Parse(format!("unterminated cycle in `{s}`")))?;
            let body = &open[..close];
            let cycle = body.split(',').filter(|t| !t.trim().is_empty()).map(token).collect::<Result<Vec<_>>>()?;
            cycles.push(cycle);
            rest = open[close + 1..].trim_start();
        }
        Self::from_cycles(v, &cycles)
    }

    pub fn degree(&self) -> u32 {
        self.images.len() as u32
    }

    pub fn images(&self) -> &[Point] {
        &self.images
    }

    pub fn apply(&self, p: Point) -> Point {
        self.images[p as usize]
    }

    /// Image of a block, re-sorted.
    pub fn apply_block(&self, b: &[Point]) -> Block {
        let mut out: Block = b.iter().map(|&p| self.apply(p)).collect();
        out.sort_unstable();
        out
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm { images: self.images.iter().map(|&p| other.apply(p)).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.images.len()];
        for (i, &p) in self.images.iter().enumerate() {
            inv[p as usize] = i as Point;
        }
        Perm { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i as Point == p)
    }

    /// Nontrivial cycles in order of their least element.
    pub fn cycles(&self) -> Vec<Vec<Point>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut c = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                c.push(p as Point);
                p = self.images[p] as usize;
            }
            out.push(c);
        }
        out
    }

    /// Cycle notation using `name` for points; the identity prints as `()`.
    pub fn to_cycle_string_with(&self, name: impl Fn(Point) -> String) -> String {
        let cs = self.cycles();
        if cs.is_empty() {
            return "()".into();
        }
        cs.iter().map(|c| format!("({})", c.iter().map(|&p| name(p)).collect::<Vec<_>>().join(","))).collect()
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_string_with(|p| p.to_string()))
    }
}

pub const DEFAULT_ORDER_BOUND: usize = 256;

/// Group generated by explicit permutations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermGroup {
    pub generators: Vec<Perm>,
    pub order_bound: Option<usize>,
}

impl PermGroup {
    pub fn new(generators: Vec<Perm>) -> Self {
        Self { generators, order_bound: None }
    }

    /// All group elements by breadth-first closure, identity first.
    pub fn elements(&self, v: u32) -> Result<Vec<Perm>> {
        let bound = self.order_bound.unwrap_or(DEFAULT_ORDER_BOUND);
        let id = Perm::identity(v);
        let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(g) = queue.pop_front() {
            for s in &self.generators {
                if s.degree() != v {
                    return Err(Error::BadPermutation(format!("generator of degree {} on {v} points", s.degree())));
                }
                let h = g.then(s);
                if seen.insert(h.clone()) {
                    if out.len() >= bound {
                        return Err(Error::CapExceeded(bound));
                    }
                    out.push(h.clone());
                    queue.push_back(h);
                }
            }
        }
        Ok(out)
    }

    pub fn order(&self, v: u32) -> Result<usize> {
        Ok(self.elements(v)?.len())
    }
}

/// Output of [`expand_orbits`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitExpansion {
    /// Union of all orbits, sorted and duplicate-free.
    pub blocks: Vec<Block>,
    /// Orbit length of each base block, in input order.
    pub orbit_lengths: Vec<usize>,
}

fn orbit_of(block: &[Point], gens: &[Perm]) -> Vec<Block> {
    let start: Block = {
        let mut b = block.to_vec();
        b.sort_unstable();
        b
    };
    let mut seen: HashSet<Block> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(b) = queue.pop_front() {
        for g in gens {
            let img = g.apply_block(&b);
            if seen.insert(img.clone()) {
                queue.push_back(img);
            }
        }
    }
    let mut out: Vec<Block> = seen.into_iter().collect();
    out.sort();
    out
}

/// Union of the orbits of `base` under the group generated by `group`.
pub fn expand_orbits(v: u32, base: &[Block], group: &PermGroup, mode: Exec) -> Result<OrbitExpansion> {
    for b in base {
        if let Some(&p) = b.iter().find(|&&p| p >= v) {
            return Err(Error::UnknownPoint { point: p, v });
        }
    }
    for g in &group.generators {
        if g.degree() != v {
            return Err(Error::BadPermutation(format!("generator of degree {} on {v} points", g.degree())));
        }
    }
    let orbits = exec::map_slice(mode, base, |b| orbit_of(b, &group.generators));
    let orbit_lengths = orbits.iter().map(Vec::len).collect();
    let mut blocks: Vec<Block> = orbits.into_iter().flatten().collect();
    blocks.sort();
    blocks.dedup();
    Ok(OrbitExpansion { blocks, orbit_lengths })
}

/// Outcome of [`check_automorphism`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismCheck {
    pub is_automorphism: bool,
    pub witness: Option<String>,
}

impl AutomorphismCheck {
    fn fail(w: String) -> Self {
        Self { is_automorphism: false, witness: Some(w) }
    }
}

/// Image index of every group under `sigma`, if `sigma` permutes the groups.
pub fn group_images(design: &DesignInstance, sigma: &Perm) -> std::result::Result<Vec<u32>, String> {
    let group_of = design.group_of();
    let mut out = Vec::new();
    for (i, g) in design.groups.iter().flatten().enumerate() {
        let mut target = None;
        for &p in g {
            let img = group_of[sigma.apply(p) as usize];
            match (target, img) {
                (_, None) => return Err(format!("group {i} point {p} maps outside the groups")),
                (None, Some(t)) => target = Some(t),
                (Some(t), Some(u)) if t != u => return Err(format!("group {i} is split by the permutation")),
                _ => {}
            }
        }
        out.push(target.unwrap_or(i as u32));
    }
    Ok(out)
}

/// True iff `sigma` maps the block set onto itself and preserves the stem,
/// the hole, and the group partition.
pub fn check_automorphism(design: &DesignInstance, sigma: &Perm) -> AutomorphismCheck {
    if sigma.degree() != design.v {
        return AutomorphismCheck::fail(format!("degree {} differs from v = {}", sigma.degree(), design.v));
    }
    let index = design.block_index();
    for b in &design.blocks {
        let img = sigma.apply_block(b);
        if !index.contains_key(img.as_slice()) {
            return AutomorphismCheck::fail(format!(
                "block {} maps to {}, which is not a block",
                design.show_block(b),
                design.show_block(&img)
            ));
        }
    }
    for (what, set) in [("stem", &design.stem), ("hole", &design.hole)] {
        if let Some(s) = set {
            if let Some(&p) = s.iter().find(|&&p| !s.contains(&sigma.apply(p))) {
                return AutomorphismCheck::fail(format!(
                    "{what} point {} maps to {}",
                    design.point_name(p),
                    design.point_name(sigma.apply(p))
                ));
            }
        }
    }
    if let Err(w) = group_images(design, sigma) {
        return AutomorphismCheck::fail(w);
    }
    AutomorphismCheck { is_automorphism: true, witness: None }
}

fn transport_ground(g: &Ground, sigma: &Perm, group_img: &[u32]) -> Ground {
    Ground {
        points: g.points.iter().map(|&p| sigma.apply(p)).collect(),
        groups: g.groups.iter().map(|&i| group_img[i as usize]).collect(),
        stem: g.stem,
        hole: g.hole,
    }
    .normalized()
}

/// Moves a colouring of the derived design at `x` to one at `sigma(x)`.
/// Block indices refer to `design.blocks`; `index` is its block index map.
pub(crate) fn transport_with_index(
    coloring: &Coloring,
    sigma: &Perm,
    design: &DesignInstance,
    index: &HashMap<&[Point], u32>,
    group_img: &[u32],
) -> Result<Coloring> {
    let mut classes = Vec::with_capacity(coloring.classes.len());
    for c in &coloring.classes {
        let mut blocks = Vec::with_capacity(c.blocks.len());
        for &bi in &c.blocks {
            let b = design
                .blocks
                .get(bi as usize)
                .ok_or_else(|| Error::InvalidDesign(format!("class references block {bi}")))?;
            let img = sigma.apply_block(b);
            let j = index
                .get(img.as_slice())
                .ok_or_else(|| Error::NotAutomorphism(format!("image {} is not a block", design.show_block(&img))))?;
            blocks.push(*j);
        }
        classes.push(ColorClass {
            blocks,
            scope: ClassScope { mode: c.scope.mode, ground: transport_ground(&c.scope.ground, sigma, group_img) },
        });
    }
    Ok(Coloring { classes })
}

/// Transports a colouring at `x` along the automorphism `sigma`; the result
/// is a colouring at `sigma(x)`.
pub fn transport_coloring(coloring: &Coloring, sigma: &Perm, design: &DesignInstance) -> Result<Coloring> {
    let check = check_automorphism(design, sigma);
    if !check.is_automorphism {
        return Err(Error::NotAutomorphism(check.witness.unwrap_or_default()));
    }
    let group_img = group_images(design, sigma).map_err(Error::NotAutomorphism)?;
    transport_with_index(coloring, sigma, design, &design.block_index(), &group_img)
}

/// Extends colourings stored at orbit representatives to every point they
/// reach under `generators`, breadth-first in point order. Points for which
/// `skip` returns true are never filled by transport.
pub fn complete_by_transport(
    design: &DesignInstance,
    stored: &BTreeMap<Point, Coloring>,
    generators: &[Perm],
    skip: impl Fn(Point) -> bool,
) -> Result<BTreeMap<Point, Coloring>> {
    let mut out = stored.clone();
    if generators.is_empty() {
        return Ok(out);
    }
    let index = design.block_index();
    let mut imgs = Vec::with_capacity(generators.len());
    for g in generators {
        let check = check_automorphism(design, g);
        if !check.is_automorphism {
            return Err(Error::NotAutomorphism(format!("{g}: {}", check.witness.unwrap_or_default())));
        }
        imgs.push(group_images(design, g).map_err(Error::NotAutomorphism)?);
    }
    let mut queue: VecDeque<Point> = stored.keys().copied().collect();
    while let Some(x) = queue.pop_front() {
        for (g, gi) in generators.iter().zip(&imgs) {
            let y = g.apply(x);
            if out.contains_key(&y) || skip(y) {
                continue;
            }
            let c = transport_with_index(&out[&x], g, design, &index, gi)?;
            out.insert(y, c);
            queue.push_back(y);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_cycles() {
        let labels = BTreeMap::from([("a".to_string(), 4), ("b".to_string(), 5)]);
        let p = Perm::parse("(0,1,2,3)(a,b)", 6, &labels).unwrap();
        assert_eq!(p.images(), &[1, 2, 3, 0, 5, 4]);
        assert_eq!(p.to_string(), "(0,1,2,3)(4,5)");
        let q = Perm::parse("[1,2,3,0,5,4]", 6, &labels).unwrap();
        assert_eq!(p, q);
        assert!(Perm::parse("(0,1)(1,2)", 3, &labels).is_err());
        assert!(Perm::from_images(vec![0, 0]).is_err());
        assert!(p.then(&p.inverse()).is_identity());
    }

    #[test]
    fn group_closure() {
        let g = PermGroup::new(vec![Perm::from_cycles(6, &[vec![0, 1, 2, 3, 4, 5]]).unwrap()]);
        assert_eq!(g.order(6).unwrap(), 6);
        let mut capped = g.clone();
        capped.order_bound = Some(3);
        assert!(matches!(capped.elements(6), Err(Error::CapExceeded(3))));
    }

    #[test]
    fn identity_group_keeps_base() {
        let base = vec![vec![0, 1, 2], vec![1, 2, 3]];
        let e = expand_orbits(4, &base, &PermGroup::new(vec![]), Exec::Auto).unwrap();
        assert_eq!(e.blocks, base);
        assert_eq!(e.orbit_lengths, vec![1, 1]);
    }
}
