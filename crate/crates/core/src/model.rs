//! Shared data model: designs, colour classes, certificates.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitset::PointSet;
use crate::error::{Error, Result};
use crate::group::Perm;
use crate::verify::VerifyReport;

pub type Point = u32;
/// A block is a strictly increasing list of points.
pub type Block = Vec<Point>;

/// Structural tag of a [`DesignInstance`]; it decides which t-subsets the
/// covering condition excludes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Structure {
    Steiner,
    #[serde(rename = "GDD")]
    Gdd,
    #[serde(rename = "TD")]
    Td,
    #[serde(rename = "CQS")]
    Cqs,
    IncompleteSTS,
    IncompleteSQS,
    Fan1,
}

impl Structure {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "steiner" => Structure::Steiner,
            "gdd" => Structure::Gdd,
            "td" => Structure::Td,
            "cqs" => Structure::Cqs,
            "incompletests" | "incomplete-sts" => Structure::IncompleteSTS,
            "incompletesqs" | "incomplete-sqs" => Structure::IncompleteSQS,
            "fan1" | "1-fan" => Structure::Fan1,
            _ => return Err(Error::Parse(format!("unknown structure `{s}`"))),
        })
    }
}

/// Point universe `0..v`, optional stem/groups/hole, and a block list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignInstance {
    pub v: u32,
    pub t: u32,
    pub block_sizes: Vec<u32>,
    pub kind: Structure,
    #[serde(default)]
    pub stem: Option<Vec<Point>>,
    #[serde(default)]
    pub groups: Option<Vec<Vec<Point>>>,
    #[serde(default)]
    pub hole: Option<Vec<Point>>,
    pub blocks: Vec<Block>,
    /// Display names for points, e.g. `"a" -> 32`.
    #[serde(default)]
    pub labels: BTreeMap<String, Point>,
}

impl DesignInstance {
    pub fn steiner(v: u32, t: u32, k: u32, blocks: Vec<Block>) -> Self {
        Self {
            v,
            t,
            block_sizes: vec![k],
            kind: Structure::Steiner,
            stem: None,
            groups: None,
            hole: None,
            blocks,
            labels: BTreeMap::new(),
        }
    }

    /// Checks the structural invariants: block sizes and ranges, sortedness,
    /// no duplicate blocks, and consistency of stem/groups/hole.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDesign(m));
        if self.v == 0 {
            return bad("empty point universe".into());
        }
        for b in &self.blocks {
            if !self.block_sizes.contains(&(b.len() as u32)) {
                return bad(format!("block {} has size outside {:?}", self.show_block(b), self.block_sizes));
            }
            if b.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("block {:?} is not strictly sorted", b));
            }
            if let Some(&p) = b.iter().find(|&&p| p >= self.v) {
                return Err(Error::UnknownPoint { point: p, v: self.v });
            }
        }
        let mut sorted: Vec<&Block> = self.blocks.iter().collect();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return bad(format!("duplicate block {}", self.show_block(w[0])));
        }
        let mut seen = PointSet::with_capacity(self.v as usize);
        let mut claim = |p: Point, what: &str| -> Result<()> {
            if p >= self.v {
                return Err(Error::UnknownPoint { point: p, v: self.v });
            }
            if !seen.insert(p) {
                return Err(Error::InvalidDesign(format!("point {p} appears twice in {what}")));
            }
            Ok(())
        };
        for &p in self.stem.iter().flatten() {
            claim(p, "stem/groups")?;
        }
        for g in self.groups.iter().flatten() {
            for &p in g {
                claim(p, "stem/groups")?;
            }
        }
        if self.groups.is_some() && seen.len() != self.v as usize {
            return bad("stem and groups do not partition the points".into());
        }
        if let Some(h) = &self.hole {
            let mut hs = PointSet::with_capacity(self.v as usize);
            for &p in h {
                if p >= self.v {
                    return Err(Error::UnknownPoint { point: p, v: self.v });
                }
                if !hs.insert(p) {
                    return bad(format!("point {p} repeated in hole"));
                }
            }
        }
        Ok(())
    }

    /// Group index of every point (`None` for stem points or when ungrouped).
    pub fn group_of(&self) -> Vec<Option<u32>> {
        let mut out = vec![None; self.v as usize];
        for (i, g) in self.groups.iter().flatten().enumerate() {
            for &p in g {
                out[p as usize] = Some(i as u32);
            }
        }
        out
    }

    pub fn stem_set(&self) -> PointSet {
        PointSet::from_points(self.v as usize, self.stem.iter().flatten().copied())
    }

    pub fn hole_set(&self) -> PointSet {
        PointSet::from_points(self.v as usize, self.hole.iter().flatten().copied())
    }

    pub fn is_stem(&self, p: Point) -> bool {
        self.stem.as_ref().is_some_and(|s| s.contains(&p))
    }

    pub fn num_groups(&self) -> usize {
        self.groups.as_ref().map_or(0, Vec::len)
    }

    /// Map from block to its index in `blocks`.
    pub fn block_index(&self) -> HashMap<&[Point], u32> {
        self.blocks.iter().enumerate().map(|(i, b)| (b.as_slice(), i as u32)).collect()
    }

    /// Indices of the blocks through `x`, in block-list order.
    pub fn blocks_through(&self, x: Point) -> Vec<u32> {
        self.blocks.iter().enumerate().filter(|(_, b)| b.binary_search(&x).is_ok()).map(|(i, _)| i as u32).collect()
    }

    /// Point → indices of the blocks containing it, for every point at once.
    pub fn incidence(&self) -> Vec<Vec<u32>> {
        let mut inc = vec![Vec::new(); self.v as usize];
        for (i, b) in self.blocks.iter().enumerate() {
            for &p in b {
                inc[p as usize].push(i as u32);
            }
        }
        inc
    }

    pub fn point_name(&self, p: Point) -> String {
        self.labels.iter().find(|(_, &q)| q == p).map_or_else(|| p.to_string(), |(k, _)| k.clone())
    }

    pub fn show_block(&self, b: &[Point]) -> String {
        let parts: Vec<String> = b.iter().map(|&p| self.point_name(p)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Whether a colour class must merely be pairwise disjoint or must also
/// partition its ground set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "PPC")]
    Ppc,
    #[serde(rename = "PC")]
    Pc,
}

/// Symbolic ground set: all points minus the listed points, groups, and
/// optionally the stem and the hole. Kept symbolic so colourings can be moved
/// along automorphisms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ground {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Point>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<u32>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub stem: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub hole: bool,
}

impl Ground {
    pub fn all() -> Self {
        Self::default()
    }
    pub fn minus_point(x: Point) -> Self {
        Self { points: vec![x], ..Self::default() }
    }
    pub fn minus_group(g: u32) -> Self {
        Self { groups: vec![g], ..Self::default() }
    }
    pub fn minus_groups(mut gs: Vec<u32>) -> Self {
        gs.sort_unstable();
        gs.dedup();
        Self { groups: gs, ..Self::default() }
    }
    pub fn minus_group_and_stem(g: u32) -> Self {
        Self { groups: vec![g], stem: true, ..Self::default() }
    }
    pub fn minus_stem() -> Self {
        Self { stem: true, ..Self::default() }
    }
    pub fn minus_hole() -> Self {
        Self { hole: true, ..Self::default() }
    }
    pub fn minus_point_and_hole(x: Point) -> Self {
        Self { points: vec![x], hole: true, ..Self::default() }
    }

    pub fn normalized(mut self) -> Self {
        self.points.sort_unstable();
        self.points.dedup();
        self.groups.sort_unstable();
        self.groups.dedup();
        self
    }

    /// The concrete point set this descriptor denotes in `design`.
    pub fn resolve(&self, design: &DesignInstance) -> Result<PointSet> {
        let mut s = PointSet::full(design.v as usize);
        for &p in &self.points {
            if p >= design.v {
                return Err(Error::UnknownPoint { point: p, v: design.v });
            }
            s.remove(p);
        }
        let groups = design.groups.as_deref().unwrap_or(&[]);
        for &g in &self.groups {
            let members = groups
                .get(g as usize)
                .ok_or_else(|| Error::InvalidDesign(format!("scope names group {g}, design has {}", groups.len())))?;
            for &p in members {
                s.remove(p);
            }
        }
        if self.stem {
            for &p in design.stem.iter().flatten() {
                s.remove(p);
            }
        }
        if self.hole {
            for &p in design.hole.iter().flatten() {
                s.remove(p);
            }
        }
        Ok(s)
    }
}

impl fmt::Display for Ground {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.points.is_empty() {
            let ps: Vec<String> = self.points.iter().map(ToString::to_string).collect();
            parts.push(format!("{{{}}}", ps.join(",")));
        }
        parts.extend(self.groups.iter().map(|g| format!("G{g}")));
        if self.stem {
            parts.push("S".into());
        }
        if self.hole {
            parts.push("H".into());
        }
        if parts.is_empty() {
            write!(f, "X")
        } else {
            write!(f, "X\\({})", parts.join("∪"))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassScope {
    pub mode: Mode,
    pub ground: Ground,
}

impl ClassScope {
    pub fn ppc(ground: Ground) -> Self {
        Self { mode: Mode::Ppc, ground }
    }
    pub fn pc(ground: Ground) -> Self {
        Self { mode: Mode::Pc, ground }
    }
}

/// One colour class: block indices plus the scope it claims.
///
/// For per-point colourings of a t = 3 design the indices point into the
/// parent design's block list and the class consists of the residues
/// `B \ {x}`; for resolutions of a t = 2 design they index its own blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorClass {
    pub blocks: Vec<u32>,
    pub scope: ClassScope,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub classes: Vec<ColorClass>,
}

impl Coloring {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.classes.iter().map(|c| c.blocks.len()).sum()
    }

    /// Number of classes whose ground is not the default for this colouring.
    pub fn restricted_count(&self, full: &Ground) -> usize {
        self.classes.iter().filter(|c| &c.scope.ground != full).count()
    }
}

/// Claimed kind of a certificate; selects the profile checks in `verify`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClaimedKind {
    SQS,
    #[serde(rename = "mcDSQS")]
    McDSQS,
    RDSQS,
    #[serde(rename = "gcDSQS")]
    GcDSQS,
    STS,
    #[serde(rename = "mcSTS")]
    McSTS,
    KTS,
    #[serde(rename = "KTS_vh")]
    KTSvh,
    #[serde(rename = "gcSTS")]
    GcSTS,
    #[serde(rename = "gcGDD")]
    GcGDD,
    RGDD,
    KF,
    #[serde(rename = "gcDCQS")]
    GcDCQS,
    RDCQS,
    #[serde(rename = "c1DCQS")]
    C1DCQS,
    #[serde(rename = "c2DCQS")]
    C2DCQS,
    RDGDD34,
    FDGDD34,
    RDTD34,
    RDS,
    #[serde(rename = "RSQS2star")]
    Rsqs2Star,
    FG1,
}

impl ClaimedKind {
    pub const ALL: [ClaimedKind; 22] = [
        ClaimedKind::SQS,
        ClaimedKind::McDSQS,
        ClaimedKind::RDSQS,
        ClaimedKind::GcDSQS,
        ClaimedKind::STS,
        ClaimedKind::McSTS,
        ClaimedKind::KTS,
        ClaimedKind::KTSvh,
        ClaimedKind::GcSTS,
        ClaimedKind::GcGDD,
        ClaimedKind::RGDD,
        ClaimedKind::KF,
        ClaimedKind::GcDCQS,
        ClaimedKind::RDCQS,
        ClaimedKind::C1DCQS,
        ClaimedKind::C2DCQS,
        ClaimedKind::RDGDD34,
        ClaimedKind::FDGDD34,
        ClaimedKind::RDTD34,
        ClaimedKind::RDS,
        ClaimedKind::Rsqs2Star,
        ClaimedKind::FG1,
    ];

    pub fn name(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
    }

    /// Case-insensitive parse of the serialized tag.
    pub fn parse(s: &str) -> Result<Self> {
        let wanted = s.to_ascii_lowercase().replace(['-', '_'], "");
        Self::ALL
            .into_iter()
            .find(|k| k.name().to_ascii_lowercase().replace(['-', '_'], "") == wanted)
            .ok_or_else(|| Error::Parse(format!("unknown kind `{s}`")))
    }

    /// Kinds whose certificate carries one colouring per point of a t = 3 design.
    pub fn has_point_colorings(self) -> bool {
        use ClaimedKind::*;
        matches!(self, McDSQS | RDSQS | GcDSQS | GcDCQS | RDCQS | C1DCQS | C2DCQS | RDGDD34 | FDGDD34 | RDTD34 | RDS)
    }

    /// Kinds certified by a single resolution of a t = 2 design.
    pub fn has_resolution(self) -> bool {
        use ClaimedKind::*;
        matches!(self, McSTS | KTS | KTSvh | GcSTS | GcGDD | RGDD | KF)
    }
}

impl fmt::Display for ClaimedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A design together with the colourings that certify its claimed kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedDesign {
    pub design: DesignInstance,
    pub claimed_kind: ClaimedKind,
    /// Point → colouring of the derived design at that point.
    #[serde(default)]
    pub derived_colorings: BTreeMap<Point, Coloring>,
    /// Resolution of the design itself (t = 2 kinds).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Coloring>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special_group: Option<u32>,
    /// Automorphisms that carry stored colourings to the missing points.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<Perm>,
    /// Auxiliary block families as index lists into `design.blocks`
    /// (the S(2,4,v) systems of a 2-RSQS*, the two layers of a 1-fan design).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub families: Vec<Vec<u32>>,
    #[serde(default)]
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<VerifyReport>,
}

impl CertifiedDesign {
    pub fn new(design: DesignInstance, claimed_kind: ClaimedKind) -> Self {
        Self {
            design,
            claimed_kind,
            derived_colorings: BTreeMap::new(),
            resolution: None,
            special_group: None,
            generators: Vec::new(),
            families: Vec::new(),
            provenance: String::new(),
            report: None,
        }
    }

    pub fn coloring_at(&self, x: Point) -> Option<&Coloring> {
        self.derived_colorings.get(&x)
    }
}

/// Maps kept points onto `0..keep.len()` in increasing order.
fn relabel_map(v: u32, keep: &[Point]) -> Vec<Option<Point>> {
    let mut map = vec![None; v as usize];
    for (i, &p) in keep.iter().enumerate() {
        map[p as usize] = Some(i as Point);
    }
    map
}

/// Derived design at `x`: residues `B \ {x}` of the blocks through `x`,
/// relabelled onto `0..v'` (the surviving points in increasing order).
pub fn derive_at(design: &DesignInstance, x: Point) -> Result<DesignInstance> {
    if x >= design.v {
        return Err(Error::UnknownPoint { point: x, v: design.v });
    }
    if design.t != 3 {
        return Err(Error::Strength { expected: 3, found: design.t });
    }
    let group_of = design.group_of();
    // Points that survive, plus the structure of the derived design.
    let (removed, kind, hole, groups_removed): (PointSet, Structure, Option<Vec<Point>>, Option<u32>) = match design
        .kind
    {
        Structure::Steiner => (PointSet::from_points(design.v as usize, [x]), Structure::Steiner, None, None),
        Structure::IncompleteSQS => {
            let h = design.hole.clone().unwrap_or_default();
            if h.contains(&x) {
                let rest: Vec<Point> = h.into_iter().filter(|&p| p != x).collect();
                (PointSet::from_points(design.v as usize, [x]), Structure::IncompleteSTS, Some(rest), None)
            } else {
                (PointSet::from_points(design.v as usize, [x]), Structure::Steiner, None, None)
            }
        }
        Structure::Cqs => {
            if design.is_stem(x) {
                (design.stem_set(), Structure::Gdd, None, None)
            } else {
                let g = group_of[x as usize].ok_or_else(|| Error::InvalidDesign(format!("point {x} has no group")))?;
                let groups = design.groups.as_ref().expect("grouped");
                let hole: Vec<Point> = groups[g as usize]
                    .iter()
                    .chain(design.stem.iter().flatten())
                    .copied()
                    .filter(|&p| p != x)
                    .collect();
                (PointSet::from_points(design.v as usize, [x]), Structure::IncompleteSTS, Some(hole), None)
            }
        }
        Structure::Gdd | Structure::Td => {
            let g = group_of[x as usize].ok_or_else(|| Error::InvalidDesign(format!("point {x} has no group")))?;
            let groups = design.groups.as_ref().expect("grouped");
            (
                PointSet::from_points(design.v as usize, groups[g as usize].iter().copied()),
                Structure::Gdd,
                None,
                Some(g),
            )
        }
        Structure::IncompleteSTS | Structure::Fan1 => {
            return Err(Error::Unsupported(format!("derived design of a {:?}", design.kind)))
        }
    };
    let keep: Vec<Point> = (0..design.v).filter(|&p| !removed.contains(p)).collect();
    let map = relabel_map(design.v, &keep);
    let relabel = |p: Point| map[p as usize].expect("kept point");
    let mut blocks: Vec<Block> = design
        .blocks
        .iter()
        .filter(|b| b.binary_search(&x).is_ok())
        .map(|b| b.iter().filter(|&&p| p != x).map(|&p| relabel(p)).collect())
        .collect();
    blocks.sort();
    let groups = match design.kind {
        Structure::Cqs if design.is_stem(x) => {
            design.groups.as_ref().map(|gs| gs.iter().map(|g| g.iter().map(|&p| relabel(p)).collect()).collect())
        }
        Structure::Gdd | Structure::Td => design.groups.as_ref().map(|gs| {
            gs.iter()
                .enumerate()
                .filter(|(i, _)| Some(*i as u32) != groups_removed)
                .map(|(_, g)| g.iter().map(|&p| relabel(p)).collect())
                .collect()
        }),
        _ => None,
    };
    let labels = design.labels.iter().filter_map(|(k, &p)| map[p as usize].map(|q| (k.clone(), q))).collect();
    Ok(DesignInstance {
        v: keep.len() as u32,
        t: 2,
        block_sizes: design.block_sizes.iter().map(|k| k - 1).collect(),
        kind,
        stem: None,
        groups,
        hole: hole.map(|h| {
            let mut h: Vec<Point> = h.into_iter().map(relabel).collect();
            h.sort_unstable();
            h
        }),
        blocks,
        labels,
    })
}

/// Parameters for [`expected_block_count`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountParams {
    /// S(t,k,v).
    Steiner { t: u32, k: u32, v: u32 },
    /// CQS(g^n : s).
    Cqs { g: u32, n: u32, s: u32 },
    /// GDD(2,3) of type g^n.
    Gdd23 { g: u32, n: u32 },
    /// GDD(3,4) of type g^n.
    Gdd34 { g: u32, n: u32 },
    /// STS(v) with a hole of size h.
    IncompleteSts { v: u32, h: u32 },
    /// SQS(v) with a hole of size h.
    IncompleteSqs { v: u32, h: u32 },
}

pub fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Exact block count forced by the covering condition.
pub fn expected_block_count(params: CountParams) -> Result<u64> {
    let b = |n: u32, k: u32| binom(n as u64, k as u64) as i128;
    let (num, den): (i128, i128) = match params {
        CountParams::Steiner { t, k, v } => (b(v, t), b(k, t)),
        CountParams::Cqs { g, n, s } => (b(g * n + s, 3) - n as i128 * b(g + s, 3) + (n as i128 - 1) * b(s, 3), 4),
        CountParams::Gdd23 { g, n } => (b(n, 2) * (g as i128).pow(2), 3),
        CountParams::Gdd34 { g, n } => (b(n, 3) * (g as i128).pow(3), 4),
        CountParams::IncompleteSts { v, h } => (b(v, 2) - b(h, 2), 3),
        CountParams::IncompleteSqs { v, h } => (b(v, 3) - b(h, 3), 4),
    };
    if den == 0 || num < 0 || num % den != 0 {
        return Err(Error::NonIntegral(format!("{params:?}")));
    }
    Ok((num / den) as u64)
}

/// Result of [`canonicalize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub design: DesignInstance,
    pub duplicates_removed: usize,
}

/// Sorts points within blocks and blocks lexicographically, dropping repeats.
pub fn canonicalize(design: &DesignInstance) -> Canonical {
    let mut out = design.clone();
    for b in &mut out.blocks {
        b.sort_unstable();
    }
    out.blocks.sort();
    let before = out.blocks.len();
    out.blocks.dedup();
    let duplicates_removed = before - out.blocks.len();
    if let Some(s) = &mut out.stem {
        s.sort_unstable();
    }
    if let Some(h) = &mut out.hole {
        h.sort_unstable();
    }
    if let Some(gs) = &mut out.groups {
        for g in gs.iter_mut() {
            g.sort_unstable();
        }
    }
    Canonical { design: out, duplicates_removed }
}
