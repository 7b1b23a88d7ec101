use crate::bitset::PointSet;
use crate::model::{Block, ClassScope, Coloring, DesignInstance, Mode, Point};

use super::VerifyReport;

/// Checks one class given as explicit point lists: pairwise disjoint, inside
/// the resolved ground, and (for PC scope) covering the ground exactly.
pub fn verify_class(blocks: &[Block], scope: &ClassScope, design: &DesignInstance) -> VerifyReport {
    let mut report = VerifyReport::new();
    match scope.ground.resolve(design) {
        Ok(ground) => {
            let refs: Vec<&[Point]> = blocks.iter().map(Vec::as_slice).collect();
            check_members(design, &refs, scope, &ground, "class", &mut report);
        }
        Err(e) => report.violate("scope-unresolvable", e.to_string()),
    }
    report
}

fn check_members(
    design: &DesignInstance,
    members: &[&[Point]],
    scope: &ClassScope,
    ground: &PointSet,
    label: &str,
    report: &mut VerifyReport,
) {
    let mut owner: Vec<Option<usize>> = vec![None; design.v as usize];
    let mut covered = 0usize;
    for (i, b) in members.iter().enumerate() {
        for &p in b.iter() {
            if p >= design.v || !ground.contains(p) {
                report.violate(
                    "class-outside-ground",
                    format!("{label}: block {} leaves {}", design.show_block(b), scope.ground),
                );
                continue;
            }
            match owner[p as usize] {
                Some(j) => report.violate(
                    "class-overlap",
                    format!(
                        "{label}: blocks {} and {} share {}",
                        design.show_block(members[j]),
                        design.show_block(b),
                        design.point_name(p)
                    ),
                ),
                None => {
                    owner[p as usize] = Some(i);
                    covered += 1;
                }
            }
        }
    }
    if scope.mode == Mode::Pc && covered != ground.len() {
        let missing = ground.iter().find(|&p| owner[p as usize].is_none());
        report.violate(
            "class-not-partition",
            format!(
                "{label}: covers {covered} of {} points of {}{}",
                ground.len(),
                scope.ground,
                missing.map_or(String::new(), |p| format!(", misses {}", design.point_name(p)))
            ),
        );
    }
}

/// Checks a colouring of the derived design at `x`: every class consists of
/// blocks through `x`, the classes partition those blocks, and each class is
/// a valid PPC/PC of its scope after removing `x`.
pub fn check_point_coloring(design: &DesignInstance, x: Point, coloring: &Coloring, through_x: &[u32]) -> VerifyReport {
    let mut report = VerifyReport::new();
    let mut seen = vec![0u8; design.blocks.len()];
    for (ci, class) in coloring.classes.iter().enumerate() {
        let ground = match class.scope.ground.resolve(design) {
            Ok(g) => g,
            Err(e) => {
                report.violate("scope-unresolvable", format!("point {}: class {ci}: {e}", design.point_name(x)));
                continue;
            }
        };
        let mut residues: Vec<Vec<Point>> = Vec::with_capacity(class.blocks.len());
        for &bi in &class.blocks {
            let Some(b) = design.blocks.get(bi as usize) else {
                report.violate(
                    "class-foreign-block",
                    format!("point {}: block index {bi} out of range", design.point_name(x)),
                );
                continue;
            };
            if b.binary_search(&x).is_err() {
                report.violate(
                    "class-foreign-block",
                    format!("point {}: block {} does not contain it", design.point_name(x), design.show_block(b)),
                );
                continue;
            }
            seen[bi as usize] = seen[bi as usize].saturating_add(1);
            residues.push(b.iter().copied().filter(|&p| p != x).collect());
        }
        let refs: Vec<&[Point]> = residues.iter().map(Vec::as_slice).collect();
        let label = format!("point {} class {ci}", design.point_name(x));
        check_members(design, &refs, &class.scope, &ground, &label, &mut report);
    }
    for &bi in through_x {
        match seen[bi as usize] {
            1 => {}
            0 => report.violate(
                "coloring-missing-block",
                format!(
                    "point {}: block {} is in no class",
                    design.point_name(x),
                    design.show_block(&design.blocks[bi as usize])
                ),
            ),
            _ => report.violate(
                "coloring-duplicate-block",
                format!(
                    "point {}: block {} is in several classes",
                    design.point_name(x),
                    design.show_block(&design.blocks[bi as usize])
                ),
            ),
        }
    }
    report
}

/// Checks a resolution of a t = 2 design: classes index the design's own
/// blocks and must partition them.
pub fn check_resolution(design: &DesignInstance, coloring: &Coloring) -> VerifyReport {
    let mut report = VerifyReport::new();
    let mut seen = vec![0u8; design.blocks.len()];
    for (ci, class) in coloring.classes.iter().enumerate() {
        let ground = match class.scope.ground.resolve(design) {
            Ok(g) => g,
            Err(e) => {
                report.violate("scope-unresolvable", format!("class {ci}: {e}"));
                continue;
            }
        };
        let mut members: Vec<&[Point]> = Vec::new();
        for &bi in &class.blocks {
            match design.blocks.get(bi as usize) {
                Some(b) => {
                    seen[bi as usize] = seen[bi as usize].saturating_add(1);
                    members.push(b);
                }
                None => report.violate("class-foreign-block", format!("class {ci}: block index {bi} out of range")),
            }
        }
        check_members(design, &members, &class.scope, &ground, &format!("class {ci}"), &mut report);
    }
    for (bi, &n) in seen.iter().enumerate() {
        match n {
            1 => {}
            0 => report.violate(
                "coloring-missing-block",
                format!("block {} is in no class", design.show_block(&design.blocks[bi])),
            ),
            _ => report.violate(
                "coloring-duplicate-block",
                format!("block {} is in several classes", design.show_block(&design.blocks[bi])),
            ),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Ground;

    #[test]
    fn overlapping_triples_fail() {
        let d = crate::model::DesignInstance::steiner(7, 2, 3, vec![]);
        let r = verify_class(&[vec![0, 1, 2], vec![2, 3, 4]], &ClassScope::ppc(Ground::all()), &d);
        assert!(r.has_code("class-overlap"));
        let ok = verify_class(&[vec![0, 1, 2], vec![3, 4, 5]], &ClassScope::ppc(Ground::all()), &d);
        assert!(ok.pass);
        let pc = verify_class(&[vec![0, 1, 2], vec![3, 4, 5]], &ClassScope::pc(Ground::minus_point(6)), &d);
        assert!(pc.pass);
        let not_pc = verify_class(&[vec![0, 1, 2]], &ClassScope::pc(Ground::minus_point(6)), &d);
        assert!(not_pc.has_code("class-not-partition"));
    }
}
