//! Exact search on small triple systems: parallel-class enumeration,
//! minimum block colourings, and the affine parallelism shortcut.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::model::{Block, ClassScope, ColorClass, Coloring, DesignInstance, Ground, Point};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);
pub const DEFAULT_CAP: usize = 100_000;
const SPLIT_DEPTH: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverTarget {
    EnumeratePcs,
    PartitionIntoPpcs(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverInstance {
    pub ground: Vec<Point>,
    pub candidate_blocks: Vec<Block>,
    pub target: CoverTarget,
}

impl CoverInstance {
    /// All blocks of `design` over its full point set.
    pub fn of_design(design: &DesignInstance, target: CoverTarget) -> Self {
        Self { ground: (0..design.v).collect(), candidate_blocks: design.blocks.clone(), target }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResolverOptions {
    pub timeout: Duration,
    pub cap: usize,
    pub exec: Exec,
}

impl Default for ResolverOptions {
    fn default() -> Self {
        Self { timeout: DEFAULT_TIMEOUT, cap: DEFAULT_CAP, exec: Exec::Auto }
    }
}

/// Parallel classes found by [`enumerate_parallel_classes`], as indices into
/// the candidate list. `truncated` is set when the cap stopped the search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcEnumeration {
    pub classes: Vec<Vec<u32>>,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringOutcome {
    Colored(Coloring),
    /// The search space was exhausted.
    Unsat {
        nodes: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverOutcome {
    Classes(PcEnumeration),
    Coloring(ColoringOutcome),
}

/// Runs the search named by the instance's target.
pub fn solve(instance: &CoverInstance, opts: &ResolverOptions) -> Result<CoverOutcome> {
    match instance.target {
        CoverTarget::EnumeratePcs => enumerate_parallel_classes(instance, opts.cap).map(CoverOutcome::Classes),
        CoverTarget::PartitionIntoPpcs(r) => {
            let v = instance.ground.iter().max().map_or(0, |&m| m + 1);
            let d = DesignInstance::steiner(v, 2, 3, instance.candidate_blocks.clone());
            min_coloring(&d, r, opts).map(CoverOutcome::Coloring)
        }
    }
}

fn check_candidates(instance: &CoverInstance) -> Result<(usize, Vec<Option<usize>>)> {
    let v = instance.ground.iter().max().map_or(0, |&m| m as usize + 1);
    let mut col = vec![None; v];
    for (i, &p) in instance.ground.iter().enumerate() {
        if col[p as usize].replace(i).is_some() {
            return Err(Error::Precondition(format!("point {p} repeated in ground")));
        }
    }
    for b in &instance.candidate_blocks {
        if let Some(&p) = b.iter().find(|&&p| col.get(p as usize).copied().flatten().is_none()) {
            return Err(Error::Precondition(format!("candidate block {b:?} leaves the ground at {p}")));
        }
    }
    Ok((instance.ground.len(), col))
}

/// All partitions of the ground into candidate blocks, found by exact cover
/// with fewest-candidates-first column choice. Classes come out in
/// lexicographic order of their block indices.
pub fn enumerate_parallel_classes(instance: &CoverInstance, cap: usize) -> Result<PcEnumeration> {
    let (n, col) = check_candidates(instance)?;
    let blocks = &instance.candidate_blocks;
    if let Some(k) = blocks.first().map(Vec::len) {
        // A ground not divisible by a uniform block size has no parallel class.
        if blocks.iter().all(|b| b.len() == k) && k > 0 && n % k != 0 {
            return Ok(PcEnumeration { classes: Vec::new(), truncated: false });
        }
    }
    let cols: Vec<Vec<usize>> = blocks.iter().map(|b| b.iter().map(|&p| col[p as usize].unwrap()).collect()).collect();
    let mut through: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, c) in cols.iter().enumerate() {
        for &j in c {
            through[j].push(i as u32);
        }
    }
    struct Search<'a> {
        cols: &'a [Vec<usize>],
        through: &'a [Vec<u32>],
        covered: Vec<bool>,
        chosen: Vec<u32>,
        out: Vec<Vec<u32>>,
        cap: usize,
        truncated: bool,
    }
    impl Search<'_> {
        fn fits(&self, b: u32) -> bool {
            self.cols[b as usize].iter().all(|&j| !self.covered[j])
        }
        fn run(&mut self) {
            if self.truncated {
                return;
            }
            let mut best: Option<(usize, usize)> = None;
            for j in 0..self.covered.len() {
                if self.covered[j] {
                    continue;
                }
                let c = self.through[j].iter().filter(|&&b| self.fits(b)).count();
                if best.is_none_or(|(bc, _)| c < bc) {
                    best = Some((c, j));
                    if c == 0 {
                        break;
                    }
                }
            }
            let Some((count, j)) = best else {
                if self.out.len() >= self.cap {
                    self.truncated = true;
                    return;
                }
                let mut cls = self.chosen.clone();
                cls.sort_unstable();
                self.out.push(cls);
                return;
            };
            if count == 0 {
                return;
            }
            for idx in 0..self.through[j].len() {
                let b = self.through[j][idx];
                if !self.fits(b) {
                    continue;
                }
                for &c in &self.cols[b as usize] {
                    self.covered[c] = true;
                }
                self.chosen.push(b);
                self.run();
                self.chosen.pop();
                for &c in &self.cols[b as usize] {
                    self.covered[c] = false;
                }
            }
        }
    }
    let mut s = Search {
        cols: &cols,
        through: &through,
        covered: vec![false; n],
        chosen: Vec::new(),
        out: Vec::new(),
        cap,
        truncated: false,
    };
    if n > 0 {
        s.run();
    }
    s.out.sort();
    Ok(PcEnumeration { classes: s.out, truncated: s.truncated })
}

/// Partitions `blocks` into parallel classes of `ground` by closing
/// disjointness under transitivity. Fails when the closure is not itself
/// made of parallel classes.
pub fn parallelism_partition(blocks: &[Block], ground: &[Point]) -> Result<Vec<Vec<u32>>> {
    let v = ground.iter().chain(blocks.iter().flatten()).max().map_or(0, |&m| m as usize + 1);
    let mut in_ground = vec![false; v];
    for &p in ground {
        in_ground[p as usize] = true;
    }
    let mut parent: Vec<usize> = (0..blocks.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let disjoint = |a: &Block, b: &Block| a.iter().all(|p| !b.contains(p));
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            if disjoint(&blocks[i], &blocks[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut classes: Vec<Vec<u32>> = Vec::new();
    let mut slot: Vec<Option<usize>> = vec![None; blocks.len()];
    for i in 0..blocks.len() {
        let r = find(&mut parent, i);
        let s = *slot[r].get_or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[s].push(i as u32);
    }
    for cls in &classes {
        let mut seen = vec![false; v];
        let mut covered = 0;
        for &b in cls {
            for &p in &blocks[b as usize] {
                if !in_ground[p as usize] || std::mem::replace(&mut seen[p as usize], true) {
                    return Err(Error::Precondition("disjointness is not an equivalence on these blocks".into()));
                }
                covered += 1;
            }
        }
        if covered != ground.len() {
            return Err(Error::Precondition("disjointness classes do not cover the ground".into()));
        }
    }
    Ok(classes)
}

/// Builds a colouring of `design` from block-index classes; classes that
/// cover every point are marked as parallel classes.
pub fn classes_to_coloring(design: &DesignInstance, classes: Vec<Vec<u32>>) -> Coloring {
    let classes = classes
        .into_iter()
        .map(|blocks| {
            let size: usize = blocks.iter().map(|&b| design.blocks[b as usize].len()).sum();
            let scope =
                if size == design.v as usize { ClassScope::pc(Ground::all()) } else { ClassScope::ppc(Ground::all()) };
            ColorClass { blocks, scope }
        })
        .collect();
    Coloring { classes }
}

struct ColorSearch<'a> {
    masks: &'a [u128],
    k: usize,
    v: u32,
    color: Vec<u8>,
    used: Vec<u128>,
    uncolored: usize,
    nodes: u64,
    deadline: Instant,
    abort: &'a dyn Fn() -> bool,
    timed_out: bool,
}

const NONE: u8 = u8::MAX;

impl ColorSearch<'_> {
    fn max_used(&self) -> usize {
        self.used.iter().rposition(|&m| m != 0).map_or(0, |i| i + 1)
    }

    /// Upper bound on how many more blocks the colours can still absorb.
    fn capacity_ok(&self, block_size: u32) -> bool {
        let cap: u32 = self.used.iter().map(|m| (self.v - m.count_ones()) / block_size).sum();
        cap as usize >= self.uncolored
    }

    fn run(&mut self, block_size: u32) -> bool {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && (Instant::now() >= self.deadline || (self.abort)()) {
            self.timed_out = true;
        }
        if self.timed_out {
            return false;
        }
        if self.uncolored == 0 {
            return true;
        }
        let limit = (self.max_used() + 1).min(self.k);
        // Most saturated uncoloured block; ties go to the lowest index.
        let mut best: Option<(usize, usize)> = None;
        for b in 0..self.masks.len() {
            if self.color[b] != NONE {
                continue;
            }
            let avail = (0..limit).filter(|&c| self.used[c] & self.masks[b] == 0).count();
            if best.is_none_or(|(a, _)| avail < a) {
                best = Some((avail, b));
                if avail == 0 {
                    return false;
                }
            }
        }
        let (_, b) = best.expect("uncoloured block");
        for c in 0..limit {
            if self.used[c] & self.masks[b] != 0 {
                continue;
            }
            self.color[b] = c as u8;
            self.used[c] |= self.masks[b];
            self.uncolored -= 1;
            if self.capacity_ok(block_size) && self.run(block_size) {
                return true;
            }
            self.uncolored += 1;
            self.used[c] &= !self.masks[b];
            self.color[b] = NONE;
            if self.timed_out {
                return false;
            }
        }
        false
    }
}

enum Decision {
    Found(Vec<u8>),
    Unsat(u64),
    Timeout,
}

fn decide(
    masks: &[u128],
    v: u32,
    k: usize,
    block_size: u32,
    prefix: &[u8],
    deadline: Instant,
    abort: &dyn Fn() -> bool,
) -> Decision {
    let mut s = ColorSearch {
        masks,
        k,
        v,
        color: vec![NONE; masks.len()],
        used: vec![0; k],
        uncolored: masks.len(),
        nodes: 0,
        deadline,
        abort,
        timed_out: false,
    };
    for (b, &c) in prefix.iter().enumerate() {
        if c as usize >= k || s.used[c as usize] & masks[b] != 0 {
            return Decision::Unsat(0);
        }
        s.color[b] = c;
        s.used[c as usize] |= masks[b];
        s.uncolored -= 1;
    }
    if s.run(block_size) {
        Decision::Found(s.color)
    } else if s.timed_out {
        Decision::Timeout
    } else {
        Decision::Unsat(s.nodes)
    }
}

/// Canonical colour prefixes of the first `depth` blocks: colour `i` is
/// used only after colours `0..i`. Listed in sequential search order.
fn prefixes(masks: &[u128], k: usize, depth: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for b in 0..depth.min(masks.len()) {
        let mut next = Vec::new();
        for p in out {
            let limit = (p.iter().map(|&c| c as usize + 1).max().unwrap_or(0) + 1).min(k);
            for c in 0..limit {
                if p.iter().enumerate().any(|(i, &pc)| pc as usize == c && masks[i] & masks[b] != 0) {
                    continue;
                }
                let mut q = p.clone();
                q.push(c as u8);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Colours the blocks of a triple system (or GDD) with at most `r_max`
/// partial parallel classes, or proves that impossible. Deterministic: the
/// parallel mode returns the same colouring as the sequential search.
pub fn min_coloring(sts: &DesignInstance, r_max: u32, opts: &ResolverOptions) -> Result<ColoringOutcome> {
    if sts.v > 128 {
        return Err(Error::Unsupported(format!("resolver handles v ≤ 128, got {}", sts.v)));
    }
    if r_max as usize >= NONE as usize {
        return Err(Error::Unsupported(format!("at most {} colours", NONE - 1)));
    }
    let masks: Vec<u128> = sts.blocks.iter().map(|b| b.iter().fold(0u128, |m, &p| m | 1u128 << p)).collect();
    let k = r_max as usize;
    let block_size = sts.blocks.first().map_or(3, |b| b.len() as u32).max(1);
    let deadline = Instant::now() + opts.timeout;
    if masks.is_empty() {
        return Ok(ColoringOutcome::Colored(Coloring::default()));
    }
    // Replication bound: every block through a point needs its own colour.
    let mut rep = vec![0usize; sts.v as usize];
    for b in &sts.blocks {
        for &p in b {
            rep[p as usize] += 1;
        }
    }
    if rep.iter().any(|&r| r > k) {
        return Ok(ColoringOutcome::Unsat { nodes: 0 });
    }
    // The search is split into subtrees by the colours of the first blocks;
    // both modes visit them in the same order, so results coincide.
    let roots: Vec<(usize, Vec<u8>)> = prefixes(&masks, k, SPLIT_DEPTH).into_iter().enumerate().collect();
    let first_found = AtomicUsize::new(usize::MAX);
    let results = exec::map_slice(opts.exec, &roots, |(i, p)| {
        let abort = || first_found.load(Ordering::Relaxed) < *i;
        let d = decide(&masks, sts.v, k, block_size, p, deadline, &abort);
        if matches!(d, Decision::Found(_)) {
            first_found.fetch_min(*i, Ordering::Relaxed);
        }
        d
    });
    let mut nodes = 0;
    for r in results {
        match r {
            Decision::Found(color) => {
                let mut classes: Vec<Vec<u32>> = vec![Vec::new(); k];
                for (b, &c) in color.iter().enumerate() {
                    classes[c as usize].push(b as u32);
                }
                classes.retain(|c| !c.is_empty());
                return Ok(ColoringOutcome::Colored(classes_to_coloring(sts, classes)));
            }
            Decision::Timeout => return Err(Error::Timeout(opts.timeout)),
            Decision::Unsat(n) => nodes += n,
        }
    }
    Ok(ColoringOutcome::Unsat { nodes })
}

/// Chromatic index by increasing `r` from the replication / packing lower
/// bound until a colouring exists.
pub fn chromatic_index(sts: &DesignInstance, opts: &ResolverOptions) -> Result<(u32, Coloring)> {
    let mut rep = vec![0u32; sts.v as usize];
    for b in &sts.blocks {
        for &p in b {
            rep[p as usize] += 1;
        }
    }
    let k = sts.blocks.first().map_or(3, Vec::len) as u32;
    let per_class = (sts.v / k).max(1);
    let mut r = rep.iter().copied().max().unwrap_or(0).max((sts.blocks.len() as u32).div_ceil(per_class));
    loop {
        if let ColoringOutcome::Colored(c) = min_coloring(sts, r, opts)? {
            return Ok((r, c));
        }
        r += 1;
    }
}
