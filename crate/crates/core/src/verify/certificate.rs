use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::group::complete_by_transport;
use crate::model::{CertifiedDesign, ClaimedKind, Coloring, DesignInstance, Ground, Mode, Point, Structure};

use super::class::{check_point_coloring, check_resolution};
use super::coverage::verify_coverage_with;
use super::{chromatic_profile, VerifyReport};

/// One line of a colouring profile: `count` classes scoped to `ground`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Requirement {
    pub ground: Ground,
    pub count: usize,
    /// Classes must be full parallel classes of the ground.
    pub pc: bool,
    /// The ground is a proper restriction of the design's point set.
    pub restricted: bool,
}

/// Expected shape of a colouring, compared order-insensitively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringProfile {
    /// Total class count.
    pub r: usize,
    /// Number of classes with a restricted ground.
    pub s: usize,
    pub requirements: Vec<Requirement>,
    /// Every class must partition its ground, whatever mode it declares.
    pub all_pc: bool,
}

impl ColoringProfile {
    fn new(requirements: Vec<Requirement>, all_pc: bool) -> Self {
        let requirements: Vec<Requirement> = requirements.into_iter().filter(|r| r.count > 0).collect();
        Self {
            r: requirements.iter().map(|q| q.count).sum(),
            s: requirements.iter().filter(|q| q.restricted).map(|q| q.count).sum(),
            requirements,
            all_pc,
        }
    }
}

/// Profile of a good colouring of an incomplete STS(v, h): `r = χ′(v)` classes,
/// `s = r − (v−h)/2` of them restricted to the complement of the hole.
pub fn gcsts_profile(v: u32, h: u32, full: Ground, restricted: Ground) -> Result<ColoringProfile> {
    let r = chromatic_profile(v)? as i64;
    if !(v - h).is_multiple_of(2) {
        return Err(Error::Precondition(format!("STS({v},{h}) has odd v − h")));
    }
    let s = r - ((v - h) / 2) as i64;
    if s < 0 {
        return Err(Error::Precondition(format!("STS({v},{h}) gives a negative restricted count")));
    }
    let all_pc = v % 6 == 3;
    Ok(ColoringProfile::new(
        vec![
            Requirement { ground: full, count: (r - s) as usize, pc: all_pc, restricted: false },
            Requirement { ground: restricted, count: s as usize, pc: all_pc, restricted: true },
        ],
        all_pc,
    ))
}

fn mcsts_profile(v: u32, full: Ground) -> Result<ColoringProfile> {
    let r = chromatic_profile(v)? as usize;
    let all_pc = v % 6 == 3;
    Ok(ColoringProfile::new(vec![Requirement { ground: full, count: r, pc: all_pc, restricted: false }], all_pc))
}

fn resolvable_profile(count: usize, ground: Ground) -> ColoringProfile {
    ColoringProfile::new(vec![Requirement { ground, count, pc: true, restricted: false }], true)
}

/// Kirkman-frame profile: `per` parallel classes missing each listed group.
pub fn kf_profile(groups: impl IntoIterator<Item = Vec<u32>>, per: usize, stem: bool, pc: bool) -> ColoringProfile {
    let reqs = groups
        .into_iter()
        .map(|gs| Requirement {
            ground: Ground { groups: gs, stem, ..Ground::default() }.normalized(),
            count: per,
            pc,
            restricted: true,
        })
        .collect();
    ColoringProfile::new(reqs, pc)
}

fn gcgdd_profile(n: usize, g: usize, special: u32, stem: bool) -> ColoringProfile {
    let reqs = (0..n as u32)
        .map(|i| Requirement {
            ground: Ground { groups: vec![i], stem, ..Ground::default() },
            count: g / 2 + usize::from(i == special),
            pc: false,
            restricted: true,
        })
        .collect();
    ColoringProfile::new(reqs, false)
}

/// Uniform group size, group count and stem size of a grouped design.
fn group_type(d: &DesignInstance) -> Result<(usize, usize, usize)> {
    let groups = d.groups.as_ref().ok_or_else(|| Error::InvalidDesign("design has no groups".into()))?;
    let g = groups.first().map_or(0, Vec::len);
    if groups.iter().any(|x| x.len() != g) || g == 0 {
        return Err(Error::InvalidDesign("groups are not all of one size".into()));
    }
    Ok((g, groups.len(), d.stem.as_ref().map_or(0, Vec::len)))
}

fn expected_structure(kind: ClaimedKind) -> (&'static [Structure], u32) {
    use ClaimedKind::*;
    match kind {
        SQS | McDSQS | RDSQS | RDS | Rsqs2Star => (&[Structure::Steiner], 3),
        GcDSQS => (&[Structure::IncompleteSQS], 3),
        GcDCQS | RDCQS | C1DCQS | C2DCQS => (&[Structure::Cqs], 3),
        RDGDD34 | FDGDD34 | RDTD34 => (&[Structure::Gdd, Structure::Td], 3),
        STS | McSTS | KTS => (&[Structure::Steiner], 2),
        KTSvh | GcSTS => (&[Structure::IncompleteSTS], 2),
        GcGDD | RGDD | KF => (&[Structure::Gdd], 2),
        FG1 => (&[Structure::Fan1], 3),
    }
}

/// Profile required of the colouring at `x`. `special` names the special
/// group for the stem colourings of a c1DCQS.
pub fn point_profile(cert: &CertifiedDesign, x: Point, special: Option<u32>) -> Result<ColoringProfile> {
    use ClaimedKind::*;
    let d = &cert.design;
    let v = d.v;
    match cert.claimed_kind {
        McDSQS => mcsts_profile(v - 1, Ground::minus_point(x)),
        RDSQS => {
            if v % 6 != 4 {
                return Err(Error::Precondition(format!("RDSQS needs v ≡ 4 (mod 6), got {v}")));
            }
            Ok(resolvable_profile((v as usize - 2) / 2, Ground::minus_point(x)))
        }
        GcDSQS => {
            let hole = d.hole.clone().unwrap_or_default();
            if hole.contains(&x) {
                gcsts_profile(v - 1, hole.len() as u32 - 1, Ground::minus_point(x), Ground::minus_hole())
            } else {
                mcsts_profile(v - 1, Ground::minus_point(x))
            }
        }
        RDS => {
            let k = d.block_sizes.first().copied().unwrap_or(0);
            if k < 3 || !(v - 2).is_multiple_of(k - 2) {
                return Err(Error::Precondition(format!("S(3,{k},{v}) cannot have resolvable derived designs")));
            }
            Ok(resolvable_profile(((v - 2) / (k - 2)) as usize, Ground::minus_point(x)))
        }
        GcDCQS | RDCQS | C1DCQS | C2DCQS => {
            let (g, n, s) = group_type(d)?;
            let group_of = d.group_of();
            match group_of[x as usize] {
                Some(gi) => gcsts_profile(
                    (g * n + s - 1) as u32,
                    (g + s - 1) as u32,
                    Ground::minus_point(x),
                    Ground::minus_group_and_stem(gi),
                ),
                None => match cert.claimed_kind {
                    C1DCQS => {
                        let h = special.ok_or_else(|| Error::Precondition("special group not determined".into()))?;
                        Ok(gcgdd_profile(n, g, h, true))
                    }
                    C2DCQS => Ok(resolvable_profile(g * (n - 1) / 2, Ground::minus_stem())),
                    _ => Ok(kf_profile((0..n as u32).map(|i| vec![i]), g / 2, true, true)),
                },
            }
        }
        RDGDD34 | RDTD34 => {
            let (m, n, _) = group_type(d)?;
            let gi = d.group_of()[x as usize].ok_or_else(|| Error::InvalidDesign(format!("point {x} has no group")))?;
            // The derived design is a GDD of type m^(n-1).
            Ok(resolvable_profile(m * (n - 2) / 2, Ground::minus_group(gi)))
        }
        FDGDD34 => {
            let (m, n, _) = group_type(d)?;
            let gi = d.group_of()[x as usize].ok_or_else(|| Error::InvalidDesign(format!("point {x} has no group")))?;
            Ok(kf_profile((0..n as u32).filter(|&j| j != gi).map(|j| vec![gi, j]), m / 2, false, true))
        }
        k => Err(Error::Unsupported(format!("{k} carries no per-point colourings"))),
    }
}

fn resolution_profile(cert: &CertifiedDesign, special: Option<u32>) -> Result<ColoringProfile> {
    use ClaimedKind::*;
    let d = &cert.design;
    let v = d.v;
    match cert.claimed_kind {
        McSTS => mcsts_profile(v, Ground::all()),
        KTS => {
            if v % 6 != 3 {
                return Err(Error::Precondition(format!("KTS needs v ≡ 3 (mod 6), got {v}")));
            }
            Ok(resolvable_profile((v as usize - 1) / 2, Ground::all()))
        }
        KTSvh => {
            let h = d.hole.as_ref().map_or(0, Vec::len);
            Ok(ColoringProfile::new(
                vec![
                    Requirement { ground: Ground::all(), count: (v as usize - h) / 2, pc: true, restricted: false },
                    Requirement {
                        ground: Ground::minus_hole(),
                        count: h.saturating_sub(1) / 2,
                        pc: true,
                        restricted: true,
                    },
                ],
                true,
            ))
        }
        GcSTS => {
            let h = d.hole.as_ref().map_or(0, Vec::len) as u32;
            gcsts_profile(v, h, Ground::all(), Ground::minus_hole())
        }
        GcGDD => {
            let (g, n, _) = group_type(d)?;
            let h = special.ok_or_else(|| Error::Precondition("special group not determined".into()))?;
            Ok(gcgdd_profile(n, g, h, false))
        }
        RGDD => {
            let (g, n, _) = group_type(d)?;
            Ok(resolvable_profile(g * (n - 1) / 2, Ground::all()))
        }
        KF => {
            let (g, n, _) = group_type(d)?;
            Ok(kf_profile((0..n as u32).map(|i| vec![i]), g / 2, false, true))
        }
        k => Err(Error::Unsupported(format!("{k} carries no resolution"))),
    }
}

/// Special group of a gcGDD-shaped colouring: the one group whose ground
/// carries an extra class.
fn detect_special(coloring: &Coloring, n: usize, g: usize, stem: bool) -> Option<u32> {
    let mut tally = vec![0usize; n];
    for c in &coloring.classes {
        let gr = &c.scope.ground;
        if gr.groups.len() == 1 && gr.points.is_empty() && gr.stem == stem && !gr.hole {
            let i = gr.groups[0] as usize;
            if i < n {
                tally[i] += 1;
            }
        }
    }
    let extra: Vec<usize> = (0..n).filter(|&i| tally[i] == g / 2 + 1).collect();
    (extra.len() == 1).then(|| extra[0] as u32)
}

/// Compares a colouring's classes to a profile. Returns the number of
/// classes inspected.
fn match_profile(
    design: &DesignInstance,
    x: Option<Point>,
    coloring: &Coloring,
    profile: &ColoringProfile,
    report: &mut VerifyReport,
) {
    let at = x.map_or(String::new(), |p| format!("point {}: ", design.point_name(p)));
    let mut tally: HashMap<&Ground, (usize, usize)> = HashMap::new();
    for c in &coloring.classes {
        let e = tally.entry(&c.scope.ground).or_insert((0, 0));
        e.0 += 1;
        if c.scope.mode == Mode::Pc {
            e.1 += 1;
        }
    }
    for req in &profile.requirements {
        let (found, pcs) = tally.remove(&req.ground).unwrap_or((0, 0));
        if found != req.count {
            report.violate(
                "profile-mismatch",
                format!("{at}expected {} classes on {}, found {found}", req.count, req.ground),
            );
        } else if req.pc && pcs != found {
            report.violate(
                "profile-mismatch",
                format!("{at}classes on {} must be parallel classes, {} declared partial", req.ground, found - pcs),
            );
        }
    }
    for (ground, (found, _)) in tally {
        report.violate("profile-mismatch", format!("{at}{found} unexpected classes on {ground}"));
    }
    if coloring.classes.len() != profile.r {
        report.violate(
            "profile-mismatch",
            format!("{at}{} classes, profile needs r = {}", coloring.classes.len(), profile.r),
        );
    }
    if profile.all_pc {
        for (ci, c) in coloring.classes.iter().enumerate() {
            let Ok(ground) = c.scope.ground.resolve(design) else { continue };
            let size: usize = c
                .blocks
                .iter()
                .filter_map(|&b| design.blocks.get(b as usize))
                .map(|b| b.len() - usize::from(x.is_some()))
                .sum();
            if size != ground.len() {
                report.violate("structural-kts", format!("{at}class {ci} does not partition {}", c.scope.ground));
            }
        }
    }
}

/// Colourings at every point reachable from the stored ones by the
/// certificate's generators. Stem colourings of a c1DCQS are never moved.
pub fn complete_colorings(cert: &CertifiedDesign) -> Result<BTreeMap<Point, Coloring>> {
    let d = &cert.design;
    let c1 = cert.claimed_kind == ClaimedKind::C1DCQS;
    complete_by_transport(d, &cert.derived_colorings, &cert.generators, |p| c1 && d.is_stem(p))
}

fn check_structure(cert: &CertifiedDesign, report: &mut VerifyReport) -> bool {
    let d = &cert.design;
    let (structs, t) = expected_structure(cert.claimed_kind);
    let mut ok = true;
    if !structs.contains(&d.kind) || d.t != t {
        report.violate(
            "kind-structure-mismatch",
            format!("{} needs a t = {t} {:?} design, found t = {} {:?}", cert.claimed_kind, structs, d.t, d.kind),
        );
        ok = false;
    }
    let k_expected: Option<u32> = match cert.claimed_kind {
        ClaimedKind::RDS | ClaimedKind::FG1 => None,
        _ if t == 3 => Some(4),
        _ => Some(3),
    };
    if let Some(k) = k_expected {
        if d.block_sizes != [k] {
            report.violate("kind-structure-mismatch", format!("block sizes {:?}, expected [{k}]", d.block_sizes));
            ok = false;
        }
    }
    if matches!(cert.claimed_kind, ClaimedKind::RDTD34) && d.num_groups() != 4 {
        report.violate("kind-structure-mismatch", format!("RDTD needs 4 groups, found {}", d.num_groups()));
        ok = false;
    }
    if let ClaimedKind::GcDCQS | ClaimedKind::RDCQS | ClaimedKind::C1DCQS | ClaimedKind::C2DCQS = cert.claimed_kind {
        match group_type(d) {
            Ok((g, n, s)) => {
                if s == 1 {
                    report.violate("gcdcqs-s1-unspecified", "stem of size 1 has no specified colouring profile");
                    ok = false;
                }
                if g % 2 != 0 {
                    report.violate("kind-structure-mismatch", format!("group size {g} is odd"));
                    ok = false;
                }
                let total = g * n + s;
                match cert.claimed_kind {
                    ClaimedKind::RDCQS if total % 6 != 4 => {
                        report.violate("kind-structure-mismatch", format!("RDCQS needs gn+s ≡ 4 (mod 6), got {total}"));
                        ok = false;
                    }
                    ClaimedKind::C1DCQS | ClaimedKind::C2DCQS if s != 2 => {
                        report.violate(
                            "kind-structure-mismatch",
                            format!("{} needs a stem of size 2", cert.claimed_kind),
                        );
                        ok = false;
                    }
                    _ => {}
                }
            }
            Err(e) => {
                report.violate("kind-structure-mismatch", e.to_string());
                ok = false;
            }
        }
    }
    ok
}

pub fn verify_certificate(cert: &CertifiedDesign) -> VerifyReport {
    verify_certificate_with(cert, Exec::Auto)
}

/// Full certification: structure, coverage, and the colourings the claimed
/// kind requires.
pub fn verify_certificate_with(cert: &CertifiedDesign, mode: Exec) -> VerifyReport {
    let mut report = VerifyReport::new();
    if !check_structure(cert, &mut report) {
        return report;
    }
    let cov = verify_coverage_with(&cert.design, mode);
    let coverage_ok = cov.pass;
    report.merge(cov);
    if !coverage_ok {
        return report;
    }
    let kind = cert.claimed_kind;
    if kind.has_point_colorings() {
        check_point_colorings(cert, mode, &mut report);
    } else if kind.has_resolution() {
        check_resolution_cert(cert, &mut report);
    } else if kind == ClaimedKind::Rsqs2Star {
        report.merge(check_rsqs2star(cert));
    } else if kind == ClaimedKind::FG1 {
        report.merge(check_fan(cert));
    }
    report
}

fn check_point_colorings(cert: &CertifiedDesign, mode: Exec, report: &mut VerifyReport) {
    let d = &cert.design;
    let colorings = match complete_colorings(cert) {
        Ok(c) => c,
        Err(e) => {
            report.violate("not-automorphism", e.to_string());
            return;
        }
    };
    let missing: Vec<Point> = (0..d.v).filter(|p| !colorings.contains_key(p)).collect();
    if !missing.is_empty() {
        let names: Vec<String> = missing.iter().take(12).map(|&p| d.point_name(p)).collect();
        let code = if cert.generators.is_empty() { "missing-coloring" } else { "orbit-uncovered" };
        report.violate(code, format!("{} point(s) without a colouring: {}", missing.len(), names.join(", ")));
        return;
    }
    let mut special = None;
    if cert.claimed_kind == ClaimedKind::C1DCQS {
        let (g, n, _) = match group_type(d) {
            Ok(t) => t,
            Err(e) => {
                report.violate("kind-structure-mismatch", e.to_string());
                return;
            }
        };
        let found: Vec<(Point, Option<u32>)> =
            d.stem.iter().flatten().map(|&a| (a, detect_special(&colorings[&a], n, g, true))).collect();
        for &(a, h) in &found {
            if h.is_none() {
                report.violate(
                    "special-group-mismatch",
                    format!("stem point {}: no unique special group", d.point_name(a)),
                );
            }
        }
        let hs: Vec<u32> = found.iter().filter_map(|&(_, h)| h).collect();
        if hs.windows(2).any(|w| w[0] != w[1]) {
            report.violate("special-group-mismatch", format!("stem colourings disagree on the special group: {hs:?}"));
        }
        if let (Some(&h), Some(declared)) = (hs.first(), cert.special_group) {
            if h != declared {
                report.violate(
                    "special-group-mismatch",
                    format!("declared special group {declared}, colourings use {h}"),
                );
            }
        }
        if !report.pass {
            return;
        }
        special = hs.first().copied();
    }
    let incidence = d.incidence();
    let per_point = exec::map_range(mode, d.v as usize, |x| {
        let x = x as Point;
        let coloring = &colorings[&x];
        let mut r = check_point_coloring(d, x, coloring, &incidence[x as usize]);
        match point_profile(cert, x, special) {
            Ok(profile) => match_profile(d, Some(x), coloring, &profile, &mut r),
            Err(e) => r.violate("profile-arith", e.to_string()),
        }
        r.stat("classes", coloring.classes.len() as u64);
        r
    });
    for r in per_point {
        report.merge(r);
    }
    report.stat("points_checked", d.v as u64);
}

fn check_resolution_cert(cert: &CertifiedDesign, report: &mut VerifyReport) {
    let d = &cert.design;
    let Some(res) = &cert.resolution else {
        report.violate("missing-coloring", "no resolution supplied");
        return;
    };
    report.merge(check_resolution(d, res));
    let special = if cert.claimed_kind == ClaimedKind::GcGDD {
        let Ok((g, n, _)) = group_type(d) else {
            report.violate("kind-structure-mismatch", "groups are not uniform");
            return;
        };
        let h = detect_special(res, n, g, false);
        if h.is_none() {
            report.violate("special-group-mismatch", "no unique special group");
            return;
        }
        if let (Some(h), Some(declared)) = (h, cert.special_group) {
            if h != declared {
                report.violate(
                    "special-group-mismatch",
                    format!("declared special group {declared}, colouring uses {h}"),
                );
            }
        }
        h
    } else {
        None
    };
    match resolution_profile(cert, special) {
        Ok(p) => match_profile(d, None, res, &p, report),
        Err(e) => report.violate("profile-arith", e.to_string()),
    }
    report.stat("classes", res.classes.len() as u64);
}

fn pair_design(v: u32, blocks: Vec<Vec<Point>>) -> DesignInstance {
    let mut d = DesignInstance::steiner(v, 2, 4, blocks);
    d.blocks.sort();
    d
}

/// Checks properties (i)–(iv) of a 2-RSQS*(v). `families` holds the v − 1
/// systems `B_k^l` (k-major, l = 1..3) followed by the (v − 1)/3 common
/// parallel classes `P_k`, all as indices into the underlying SQS.
pub fn check_rsqs2star(cert: &CertifiedDesign) -> VerifyReport {
    let mut report = VerifyReport::new();
    let d = &cert.design;
    let v = d.v;
    if v < 4 || !(v - 1).is_multiple_of(3) {
        report.violate("rsqs-shape", format!("v = {v} is not ≡ 1 (mod 3)"));
        return report;
    }
    let kk = ((v - 1) / 3) as usize;
    let systems_n = (v - 1) as usize;
    if cert.families.len() != systems_n + kk {
        report.violate(
            "rsqs-shape",
            format!(
                "expected {} families ({systems_n} systems + {kk} classes), found {}",
                systems_n + kk,
                cert.families.len()
            ),
        );
        return report;
    }
    let nb = d.blocks.len();
    if cert.families.iter().flatten().any(|&i| i as usize >= nb) {
        report.violate("rsqs-shape", "family references a block outside the SQS");
        return report;
    }
    let blocks_of = |fam: &[u32]| -> Vec<Vec<Point>> { fam.iter().map(|&i| d.blocks[i as usize].clone()).collect() };
    let systems = &cert.families[..systems_n];
    let classes = &cert.families[systems_n..];
    for (i, s) in systems.iter().enumerate() {
        let r = verify_coverage_with(&pair_design(v, blocks_of(s)), Exec::Sequential);
        if !r.pass {
            report.violate(
                "rsqs-system",
                format!(
                    "B_{}^{} is not an S(2,4,{v}): {}",
                    i / 3 + 1,
                    i % 3 + 1,
                    r.first_witness().map_or("", |w| &w.witness)
                ),
            );
        }
    }
    for (k, pk) in classes.iter().enumerate() {
        let mut seen = vec![false; v as usize];
        let mut ok = true;
        for &b in pk {
            for &p in &d.blocks[b as usize] {
                ok &= !std::mem::replace(&mut seen[p as usize], true);
            }
        }
        if !ok || seen.iter().any(|&s| !s) {
            report.violate("rsqs-common-pc", format!("P_{} is not a parallel class", k + 1));
        }
        for l in 0..3 {
            let sys = &systems[3 * k + l];
            if let Some(&b) = pk.iter().find(|b| !sys.contains(b)) {
                report.violate(
                    "rsqs-common-pc",
                    format!(
                        "block {} of P_{} is missing from B_{}^{}",
                        d.show_block(&d.blocks[b as usize]),
                        k + 1,
                        k + 1,
                        l + 1
                    ),
                );
            }
        }
    }
    let special: Vec<u32> = classes.iter().flatten().copied().collect();
    let r = verify_coverage_with(&pair_design(v, blocks_of(&special)), Exec::Sequential);
    if !r.pass {
        report.violate("rsqs-special", "the union of the P_k is not an S(2,4,v)");
    }
    let mut mult = vec![0u32; nb];
    for s in systems {
        for &b in s {
            mult[b as usize] += 1;
        }
    }
    let mut in_special = vec![false; nb];
    for &b in &special {
        in_special[b as usize] = true;
    }
    for (b, &m) in mult.iter().enumerate() {
        if m == 0 {
            report.violate("rsqs-union", format!("block {} lies in no system", d.show_block(&d.blocks[b])));
            continue;
        }
        let want = if in_special[b] { 3 } else { 2 };
        if m != want {
            report.violate(
                "rsqs-multiplicity",
                format!(
                    "block {} occurs {m} times, expected {want} ({})",
                    d.show_block(&d.blocks[b]),
                    if in_special[b] { "special" } else { "outside the special system" }
                ),
            );
        }
    }
    report
}

/// Checks a 1-fan design: `families = [B, T]` split the blocks, `(X, G ∪ B)`
/// is a Steiner 2-system, and `(X, G ∪ B ∪ T)` a Steiner 3-system (the latter
/// by the coverage pass, which treats groups as blocks for this structure).
pub fn check_fan(cert: &CertifiedDesign) -> VerifyReport {
    let mut report = VerifyReport::new();
    let d = &cert.design;
    if cert.families.len() != 2 {
        report.violate("fan-shape", format!("expected families [B, T], found {}", cert.families.len()));
        return report;
    }
    let mut owner = vec![0u8; d.blocks.len()];
    for &b in cert.families.iter().flatten() {
        match owner.get_mut(b as usize) {
            Some(o) => *o += 1,
            None => {
                report.violate("fan-shape", format!("block index {b} out of range"));
                return report;
            }
        }
    }
    if owner.iter().any(|&o| o != 1) {
        report.violate("fan-shape", "B and T do not partition the blocks");
        return report;
    }
    let mut pairs: HashMap<(Point, Point), u32> = HashMap::new();
    let mut add = |b: &[Point]| {
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                *pairs.entry((b[i].min(b[j]), b[i].max(b[j]))).or_insert(0) += 1;
            }
        }
    };
    for g in d.groups.iter().flatten() {
        add(g);
    }
    for &b in &cert.families[0] {
        add(&d.blocks[b as usize]);
    }
    for a in 0..d.v {
        for b in a + 1..d.v {
            let m = pairs.get(&(a, b)).copied().unwrap_or(0);
            if m != 1 {
                report.violate("fan-two-design", format!("pair {{{a}, {b}}} lies in {m} members of G ∪ B"));
            }
        }
    }
    report
}
