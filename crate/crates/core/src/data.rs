//! Embedded designs given as base blocks, a generating group and
//! representative colourings, materialized into verified certificates.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::group::{expand_orbits, Perm, PermGroup};
use crate::model::{
    Block, CertifiedDesign, ClaimedKind, ClassScope, ColorClass, Coloring, DesignInstance, Ground, Mode, Point,
    Structure,
};
use crate::verify::{complete_colorings, verify_certificate};

struct Source {
    id: &'static str,
    text: &'static str,
}

const SOURCES: [Source; 6] = [
    Source { id: "rdcqs_8_4_2", text: include_str!("../data/rdcqs_8_4_2.txt") },
    Source { id: "c1dcqs_2_9_2", text: include_str!("../data/c1dcqs_2_9_2.txt") },
    Source { id: "c2dcqs_2_9_2", text: include_str!("../data/c2dcqs_2_9_2.txt") },
    Source { id: "rdgdd_3_4_10_2", text: include_str!("../data/rdgdd_3_4_10_2.txt") },
    Source { id: "mcdsqs_26", text: include_str!("../data/mcdsqs_26.txt") },
    Source { id: "mcdsqs_32", text: include_str!("../data/mcdsqs_32.txt") },
];

/// Placeholder id: the mcDSQS(20) is produced by the `mcdsqs20` recipe.
pub const SQS20_NOTE: &str = "sqs20_cyclic_note";

/// Ground-set tag of a listed class, before it is tied to a concrete point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScopeTag {
    /// `X-x`
    MinusPoint,
    /// `X-G`
    MinusGroup,
    /// `X-S`
    MinusStem,
    /// `X-GS`
    MinusGroupAndStem,
    /// `X-GS~`: the group is left implicit and assigned by matching.
    MinusSomeGroupAndStem,
    /// `X-H`
    MinusHole,
    /// `X`
    All,
}

impl ScopeTag {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "X-x" => ScopeTag::MinusPoint,
            "X-G" => ScopeTag::MinusGroup,
            "X-S" => ScopeTag::MinusStem,
            "X-GS" => ScopeTag::MinusGroupAndStem,
            "X-GS~" => ScopeTag::MinusSomeGroupAndStem,
            "X-H" => ScopeTag::MinusHole,
            "X" => ScopeTag::All,
            _ => return Err(Error::Parse(format!("unknown scope tag `{s}`"))),
        })
    }
}

/// One listed class: residues `B \ {x}` of the blocks through x.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListedClass {
    pub mode: Mode,
    pub tag: ScopeTag,
    pub residues: Vec<Block>,
}

/// A parsed dataset, before orbit expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetEntry {
    pub id: String,
    pub description: String,
    pub claimed_kind: ClaimedKind,
    pub structure: Structure,
    pub v: u32,
    pub labels: BTreeMap<String, Point>,
    pub stem: Option<Vec<Point>>,
    pub groups: Option<Vec<Vec<Point>>>,
    pub generators: Vec<Perm>,
    /// Base blocks with their expected orbit length (`None`: full orbit).
    pub base_blocks: Vec<(Block, Option<usize>)>,
    pub special: Option<Vec<Point>>,
    pub representative_colorings: Vec<(Point, Vec<ListedClass>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetInfo {
    pub id: String,
    pub claim: String,
    pub v: u32,
    pub description: String,
}

fn parse_point(tok: &str, labels: &BTreeMap<String, Point>) -> Result<Point> {
    let tok = tok.trim();
    match labels.get(tok) {
        Some(&p) => Ok(p),
        None => tok.parse().map_err(|_| Error::Parse(format!("bad point `{tok}`"))),
    }
}

/// Splits `_{0, 1, 2} {3, 4, 5}` into (marker, points) pairs.
fn parse_blocks(s: &str, labels: &BTreeMap<String, Point>) -> Result<Vec<(String, Block)>> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let open = rest.find('{').ok_or_else(|| Error::Parse(format!("expected `{{` in `{rest}`")))?;
        let marker = rest[..open].trim().to_string();
        let close = rest.find('}').ok_or_else(|| Error::Parse(format!("unclosed block in `{rest}`")))?;
        let mut b: Block = rest[open + 1..close].split(',').map(|t| parse_point(t, labels)).collect::<Result<_>>()?;
        b.sort_unstable();
        out.push((marker, b));
        rest = rest[close + 1..].trim_start();
    }
    Ok(out)
}

/// Parses the line-oriented dataset format.
pub fn parse_entry(text: &str) -> Result<DatasetEntry> {
    let mut id = None;
    let mut claim = None;
    let mut structure = None;
    let mut v = None;
    let mut labels = BTreeMap::new();
    let mut stem_toks: Option<Vec<String>> = None;
    let mut group_toks: Vec<Vec<String>> = Vec::new();
    let mut gen_strs: Vec<String> = Vec::new();
    let mut shorts: Vec<(String, usize)> = Vec::new();
    let mut special_toks: Option<Vec<String>> = None;
    let mut description = Vec::new();
    let mut base_lines: Vec<String> = Vec::new();
    let mut colorings: Vec<(String, Vec<String>)> = Vec::new();
    let mut section: Option<&str> = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(c) = line.strip_prefix('#') {
            description.push(c.trim().to_string());
            continue;
        }
        if line.is_empty() {
            continue;
        }
        if line == "end" {
            section = None;
            continue;
        }
        match section {
            Some("base") => {
                base_lines.push(line.to_string());
                continue;
            }
            Some(_) => {
                colorings.last_mut().expect("open colouring").1.push(line.to_string());
                continue;
            }
            None => {}
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let toks = || rest.split_whitespace().map(str::to_string).collect::<Vec<_>>();
        let bad = |m: &str| Error::Parse(format!("line {}: {m}", ln + 1));
        match key {
            "id" => id = Some(rest.trim().to_string()),
            "claim" => claim = Some(ClaimedKind::parse(rest.trim())?),
            "structure" => structure = Some(Structure::parse(rest.trim())?),
            "points" => v = Some(rest.trim().parse::<u32>().map_err(|_| bad("bad point count"))?),
            "label" => {
                let t = toks();
                let [name, p] = t.as_slice() else { return Err(bad("label needs a name and a point")) };
                labels.insert(name.clone(), p.parse().map_err(|_| bad("bad label point"))?);
            }
            "stem" => stem_toks = Some(toks()),
            "group" => group_toks.push(toks()),
            "generator" => gen_strs.push(rest.trim().to_string()),
            "short" => {
                let t = toks();
                let [m, n] = t.as_slice() else { return Err(bad("short needs a marker and a length")) };
                shorts.push((m.clone(), n.parse().map_err(|_| bad("bad orbit length"))?));
            }
            "special" => special_toks = Some(toks()),
            "base" => section = Some("base"),
            "coloring" => {
                colorings.push((rest.trim().to_string(), Vec::new()));
                section = Some("coloring");
            }
            _ => return Err(bad(&format!("unknown key `{key}`"))),
        }
    }
    let missing = |what: &str| Error::Parse(format!("missing `{what}`"));
    let v = v.ok_or_else(|| missing("points"))?;
    let pt = |t: &String| parse_point(t, &labels);
    let stem = stem_toks.map(|ts| ts.iter().map(pt).collect::<Result<Vec<_>>>()).transpose()?;
    let groups: Vec<Vec<Point>> =
        group_toks.iter().map(|g| g.iter().map(pt).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    let special = special_toks.map(|ts| ts.iter().map(pt).collect::<Result<Vec<_>>>()).transpose()?;
    let generators = gen_strs.iter().map(|g| Perm::parse(g, v, &labels)).collect::<Result<Vec<_>>>()?;
    let mut base_blocks = Vec::new();
    for (marker, b) in parse_blocks(&base_lines.join(" "), &labels)? {
        let expected = if marker.is_empty() {
            None
        } else {
            let n = shorts
                .iter()
                .find(|(m, _)| *m == marker)
                .ok_or_else(|| Error::Parse(format!("undeclared orbit marker `{marker}`")))?;
            Some(n.1)
        };
        base_blocks.push((b, expected));
    }
    let mut representative_colorings = Vec::new();
    for (at, lines) in colorings {
        let x = parse_point(&at, &labels)?;
        let mut classes = Vec::new();
        for l in lines {
            let (head, body) = l.split_once(':').ok_or_else(|| Error::Parse(format!("class line without `:`: {l}")))?;
            let mut h = head.split_whitespace();
            let mode = match h.next() {
                Some("pc") => Mode::Pc,
                Some("ppc") => Mode::Ppc,
                m => return Err(Error::Parse(format!("bad class mode {m:?}"))),
            };
            let tag = ScopeTag::parse(h.next().unwrap_or(""))?;
            let residues = parse_blocks(body, &labels)?.into_iter().map(|(_, b)| b).collect();
            classes.push(ListedClass { mode, tag, residues });
        }
        representative_colorings.push((x, classes));
    }
    Ok(DatasetEntry {
        id: id.ok_or_else(|| missing("id"))?,
        description: description.join(" "),
        claimed_kind: claim.ok_or_else(|| missing("claim"))?,
        structure: structure.ok_or_else(|| missing("structure"))?,
        v,
        labels,
        stem,
        groups: (!groups.is_empty()).then_some(groups),
        generators,
        base_blocks,
        special,
        representative_colorings,
    })
}

/// Assigns each `X-GS~` class at a stem point to a group it avoids, with
/// `g/2` classes per group and one extra on the special group. Augmenting
/// paths, classes in listed order, groups in index order.
fn match_groups(classes: &[PointsOf], groups: &[Vec<Point>], special: Option<u32>) -> Result<Vec<u32>> {
    let cap: Vec<usize> =
        groups.iter().enumerate().map(|(i, g)| g.len() / 2 + usize::from(special == Some(i as u32))).collect();
    let allowed: Vec<Vec<u32>> = classes
        .iter()
        .map(|pts| (0..groups.len() as u32).filter(|&i| groups[i as usize].iter().all(|p| !pts.contains(p))).collect())
        .collect();
    let mut owner: Vec<Vec<usize>> = vec![Vec::new(); groups.len()];
    let mut assign: Vec<Option<u32>> = vec![None; classes.len()];
    fn augment(
        c: usize,
        allowed: &[Vec<u32>],
        cap: &[usize],
        owner: &mut [Vec<usize>],
        assign: &mut [Option<u32>],
        seen: &mut [bool],
    ) -> bool {
        for &g in &allowed[c] {
            let gi = g as usize;
            if seen[gi] {
                continue;
            }
            seen[gi] = true;
            if owner[gi].len() < cap[gi] {
                owner[gi].push(c);
                assign[c] = Some(g);
                return true;
            }
            for k in 0..owner[gi].len() {
                let other = owner[gi][k];
                if augment(other, allowed, cap, owner, assign, seen) {
                    owner[gi][k] = c;
                    assign[c] = Some(g);
                    return true;
                }
            }
        }
        false
    }
    for c in 0..classes.len() {
        let mut seen = vec![false; groups.len()];
        if !augment(c, &allowed, &cap, &mut owner, &mut assign, &mut seen) {
            return Err(Error::Parse(format!("class {c} cannot be matched to a missing group")));
        }
    }
    Ok(assign.into_iter().map(|a| a.expect("matched")).collect())
}

type PointsOf = Vec<Point>;

fn resolve_class_grounds(
    design: &DesignInstance,
    x: Point,
    classes: &[ListedClass],
    special: Option<u32>,
) -> Result<Vec<Ground>> {
    let group_of = design.group_of();
    let groups = design.groups.clone().unwrap_or_default();
    let own_group = || group_of[x as usize].ok_or_else(|| Error::Parse(format!("point {x} has no group")));
    let missing_groups = |c: &ListedClass| -> Vec<u32> {
        (0..groups.len() as u32)
            .filter(|&i| groups[i as usize].iter().all(|p| c.residues.iter().all(|b| !b.contains(p))))
            .collect()
    };
    let tilde: Vec<usize> = (0..classes.len())
        .filter(|&i| classes[i].tag == ScopeTag::MinusSomeGroupAndStem && group_of[x as usize].is_none())
        .collect();
    let matched = if tilde.is_empty() {
        Vec::new()
    } else {
        let pts: Vec<PointsOf> =
            tilde.iter().map(|&i| classes[i].residues.iter().flatten().copied().collect()).collect();
        match_groups(&pts, &groups, special)?
    };
    let mut out = Vec::with_capacity(classes.len());
    for (i, c) in classes.iter().enumerate() {
        let g = match c.tag {
            ScopeTag::MinusPoint => Ground::minus_point(x),
            ScopeTag::MinusGroup => Ground::minus_group(own_group()?),
            ScopeTag::MinusStem => Ground::minus_stem(),
            ScopeTag::MinusHole => Ground::minus_hole(),
            ScopeTag::All => Ground::all(),
            ScopeTag::MinusGroupAndStem | ScopeTag::MinusSomeGroupAndStem => match group_of[x as usize] {
                Some(gx) => Ground::minus_group_and_stem(gx),
                None if c.tag == ScopeTag::MinusSomeGroupAndStem => {
                    let k = tilde.iter().position(|&t| t == i).expect("tilde class");
                    Ground::minus_group_and_stem(matched[k])
                }
                None => match missing_groups(c).as_slice() {
                    [g] => Ground::minus_group_and_stem(*g),
                    gs => {
                        return Err(Error::Parse(format!(
                            "class {i} at {} avoids {} groups; tag it X-GS~",
                            design.point_name(x),
                            gs.len()
                        )))
                    }
                },
            },
        };
        out.push(g);
    }
    Ok(out)
}

/// Expands orbits, checks the declared orbit lengths, attaches the listed
/// colourings and transports them to every point, then certifies.
pub fn materialize(entry: &DatasetEntry) -> Result<CertifiedDesign> {
    materialize_with(entry, Exec::Auto)
}

pub fn materialize_with(entry: &DatasetEntry, mode: Exec) -> Result<CertifiedDesign> {
    let group = PermGroup::new(entry.generators.clone());
    let order = group.order(entry.v)?;
    let base: Vec<Block> = entry.base_blocks.iter().map(|(b, _)| b.clone()).collect();
    let exp = expand_orbits(entry.v, &base, &group, mode)?;
    for ((b, expected), &found) in entry.base_blocks.iter().zip(&exp.orbit_lengths) {
        let want = expected.unwrap_or(order);
        if found != want {
            return Err(Error::Certification(format!(
                "{}: base block {b:?} has orbit length {found}, listed as {want}",
                entry.id
            )));
        }
    }
    let k = base.first().map_or(4, |b| b.len() as u32);
    let design = DesignInstance {
        v: entry.v,
        t: 3,
        block_sizes: vec![k],
        kind: entry.structure,
        stem: entry.stem.clone(),
        groups: entry.groups.clone(),
        hole: None,
        blocks: exp.blocks,
        labels: entry.labels.clone(),
    };
    design.validate()?;
    let special = match &entry.special {
        Some(pts) => {
            let group_of = design.group_of();
            let g = pts.first().and_then(|&p| group_of[p as usize]);
            match g {
                Some(g) if pts.iter().all(|&p| group_of[p as usize] == Some(g)) => Some(g),
                _ => return Err(Error::Parse(format!("{}: special points do not form a group", entry.id))),
            }
        }
        None => None,
    };
    let index = design.block_index();
    let mut stored = BTreeMap::new();
    for (x, classes) in &entry.representative_colorings {
        let grounds = resolve_class_grounds(&design, *x, classes, special)?;
        let mut out = Vec::with_capacity(classes.len());
        for (c, ground) in classes.iter().zip(grounds) {
            let mut blocks = Vec::with_capacity(c.residues.len());
            for r in &c.residues {
                let mut b = r.clone();
                b.push(*x);
                b.sort_unstable();
                let i = index.get(b.as_slice()).ok_or_else(|| {
                    Error::Certification(format!(
                        "{}: residue {} at {} is not from a block",
                        entry.id,
                        design.show_block(r),
                        design.point_name(*x)
                    ))
                })?;
                blocks.push(*i);
            }
            out.push(ColorClass { blocks, scope: ClassScope { mode: c.mode, ground } });
        }
        stored.insert(*x, Coloring { classes: out });
    }
    let mut cert = CertifiedDesign::new(design, entry.claimed_kind);
    cert.derived_colorings = stored;
    cert.generators = entry.generators.clone();
    cert.special_group = special;
    cert.provenance = format!("dataset:{}", entry.id);
    cert.derived_colorings = complete_colorings(&cert)?;
    let report = verify_certificate(&cert);
    if !report.pass {
        return Err(Error::Certification(format!("{}: {}", entry.id, report.render())));
    }
    cert.report = Some(report);
    Ok(cert)
}

/// Ids of the embedded datasets plus the note entry.
pub fn dataset_ids() -> Vec<&'static str> {
    SOURCES.iter().map(|s| s.id).chain([SQS20_NOTE]).collect()
}

pub fn list_datasets() -> Vec<DatasetInfo> {
    let mut out: Vec<DatasetInfo> = SOURCES
        .iter()
        .filter_map(|s| parse_entry(s.text).ok())
        .map(|e| DatasetInfo { id: e.id, claim: e.claimed_kind.name(), v: e.v, description: e.description })
        .collect();
    out.push(DatasetInfo {
        id: SQS20_NOTE.into(),
        claim: ClaimedKind::McDSQS.name(),
        v: 20,
        description: "not embedded; build it with the `mcdsqs20` recipe".into(),
    });
    out
}

/// The parsed entry for `id`, without orbit expansion.
pub fn dataset_entry(id: &str) -> Result<DatasetEntry> {
    if id == SQS20_NOTE {
        return Err(Error::Unsupported("the mcDSQS(20) is not embedded; use the `mcdsqs20` recipe".into()));
    }
    let s = SOURCES.iter().find(|s| s.id == id).ok_or_else(|| Error::UnknownDataset(id.to_string()))?;
    parse_entry(s.text)
}

type Cached = std::result::Result<CertifiedDesign, String>;

fn cache() -> &'static [OnceLock<Cached>; 6] {
    static CACHE: OnceLock<[OnceLock<Cached>; 6]> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Materialized, verified certificate for `id`, memoized per process.
pub fn load_dataset(id: &str) -> Result<CertifiedDesign> {
    if id == SQS20_NOTE {
        return Err(Error::Unsupported("the mcDSQS(20) is not embedded; use the `mcdsqs20` recipe".into()));
    }
    let i = SOURCES.iter().position(|s| s.id == id).ok_or_else(|| Error::UnknownDataset(id.to_string()))?;
    let cell = &cache()[i];
    let r = cell.get_or_init(|| parse_entry(SOURCES[i].text).and_then(|e| materialize(&e)).map_err(|e| e.to_string()));
    r.clone().map_err(Error::Certification)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_tokens() {
        let labels = BTreeMap::from([("a".to_string(), 9)]);
        let b = parse_blocks("_{0, 3, 1} {2, a, 4} __{5, 6, 7}", &labels).unwrap();
        assert_eq!(b[0], ("_".to_string(), vec![0, 1, 3]));
        assert_eq!(b[1], (String::new(), vec![2, 4, 9]));
        assert_eq!(b[2].0, "__");
    }

    #[test]
    fn unknown_and_note_ids() {
        assert!(matches!(load_dataset("nope"), Err(Error::UnknownDataset(_))));
        assert!(matches!(load_dataset(SQS20_NOTE), Err(Error::Unsupported(_))));
    }
}
