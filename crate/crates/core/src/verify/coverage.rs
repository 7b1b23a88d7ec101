use std::collections::HashMap;

use crate::exec::{self, Exec};
use crate::model::{binom, DesignInstance, Point, Structure};

use super::VerifyReport;

/// Rank of a strictly increasing t-subset in colex order.
fn rank(pts: &[Point], binoms: &[Vec<u64>]) -> usize {
    pts.iter().enumerate().map(|(i, &p)| binoms[i + 1][p as usize]).sum::<u64>() as usize
}

/// `binoms[k][n] = C(n, k)` for k ≤ t, n ≤ v.
fn binom_table(v: u32, t: u32) -> Vec<Vec<u64>> {
    (0..=t).map(|k| (0..=v).map(|n| binom(n as u64, k as u64) as u64).collect()).collect()
}

fn for_each_subset(block: &[Point], t: usize, f: &mut impl FnMut(&[Point])) {
    let mut idx: Vec<usize> = (0..t).collect();
    let k = block.len();
    if t > k {
        return;
    }
    let mut buf = vec![0; t];
    loop {
        for (b, &i) in buf.iter_mut().zip(&idx) {
            *b = block[i];
        }
        f(&buf);
        let mut i = t;
        while i > 0 && idx[i - 1] == i - 1 + k - t {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        i -= 1;
        idx[i] += 1;
        for j in i + 1..t {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Which t-subsets a design of this structure must leave uncovered.
struct Exclusion {
    kind: Structure,
    group_of: Vec<Option<u32>>,
    in_hole: Vec<bool>,
}

impl Exclusion {
    fn new(d: &DesignInstance) -> Self {
        let hole = d.hole_set();
        Self { kind: d.kind, group_of: d.group_of(), in_hole: (0..d.v).map(|p| hole.contains(p)).collect() }
    }

    fn excluded(&self, pts: &[Point]) -> bool {
        match self.kind {
            Structure::Steiner | Structure::Fan1 => false,
            Structure::Gdd | Structure::Td => {
                let gs: Vec<Option<u32>> = pts.iter().map(|&p| self.group_of[p as usize]).collect();
                (0..gs.len()).any(|i| (i + 1..gs.len()).any(|j| gs[i].is_some() && gs[i] == gs[j]))
            }
            Structure::Cqs => {
                let mut g = None;
                for &p in pts {
                    if let Some(x) = self.group_of[p as usize] {
                        match g {
                            None => g = Some(x),
                            Some(y) if y != x => return false,
                            _ => {}
                        }
                    }
                }
                true
            }
            Structure::IncompleteSTS | Structure::IncompleteSQS => pts.iter().all(|&p| self.in_hole[p as usize]),
        }
    }
}

fn show(design: &DesignInstance, pts: &[Point]) -> String {
    design.show_block(pts)
}

/// Checks that every required t-subset lies in exactly one block and every
/// excluded t-subset in none.
pub fn verify_coverage(design: &DesignInstance) -> VerifyReport {
    verify_coverage_with(design, Exec::Auto)
}

pub fn verify_coverage_with(design: &DesignInstance, mode: Exec) -> VerifyReport {
    let mut report = VerifyReport::new();
    if let Err(e) = design.validate() {
        report.violate("invalid-design", e.to_string());
        return report;
    }
    let t = design.t;
    if !(1..=3).contains(&t) {
        report.violate("unsupported-strength", format!("t = {t}"));
        return report;
    }
    let v = design.v;
    let binoms = binom_table(v, t);
    let total = binom(v as u64, t as u64) as usize;
    let mut mult = vec![0u8; total];
    let mut bump = |s: &[Point]| {
        let r = rank(s, &binoms);
        mult[r] = mult[r].saturating_add(1);
    };
    for b in &design.blocks {
        for_each_subset(b, t as usize, &mut bump);
    }
    if design.kind == Structure::Fan1 {
        for g in design.groups.iter().flatten() {
            let mut g = g.clone();
            g.sort_unstable();
            for_each_subset(&g, t as usize, &mut bump);
        }
    }
    let excl = Exclusion::new(design);
    // Scan t-subsets grouped by their largest element.
    let per_top = exec::map_range(mode, v as usize, |c| {
        let c = c as Point;
        let mut bad: Vec<(&'static str, Vec<Point>, u8)> = Vec::new();
        let mut count = 0u64;
        let mut check = |pts: &[Point]| {
            let m = mult[rank(pts, &binoms)];
            let ex = excl.excluded(pts);
            let code = match (ex, m) {
                (false, 1) | (true, 0) => return,
                (false, 0) => "coverage-missing",
                (false, _) => "coverage-multiple",
                (true, _) => "coverage-excluded",
            };
            count += 1;
            if bad.len() < super::VIOLATION_CAP {
                bad.push((code, pts.to_vec(), m));
            }
        };
        match t {
            1 => check(&[c]),
            2 => (0..c).for_each(|a| check(&[a, c])),
            _ => (0..c).for_each(|b| (0..b).for_each(|a| check(&[a, b, c]))),
        }
        (count, bad)
    });
    for (count, bad) in per_top {
        let recorded = bad.len() as u64;
        for (code, pts, m) in bad {
            report.violate(code, format!("{} covered {m} time(s)", show(design, &pts)));
        }
        report.violation_count += count - recorded;
    }
    report.stat("blocks", design.blocks.len() as u64);
    report.stat("t_subsets", total as u64);
    report
}

/// Dictionary-based multiplicity count, kept as an independent oracle for tests.
pub fn naive_coverage_counts(design: &DesignInstance) -> HashMap<Vec<Point>, u32> {
    let mut m: HashMap<Vec<Point>, u32> = HashMap::new();
    let t = design.t as usize;
    let mut add = |b: &[Point]| {
        let mut b = b.to_vec();
        b.sort_unstable();
        for_each_subset(&b, t, &mut |s| *m.entry(s.to_vec()).or_insert(0) += 1);
    };
    for b in &design.blocks {
        add(b);
    }
    if design.kind == Structure::Fan1 {
        for g in design.groups.iter().flatten() {
            add(g);
        }
    }
    m
}
