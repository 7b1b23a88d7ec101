//! Diameter-perfect constant-weight codes read off SQSs whose derived designs
//! carry colourings: the support of a codeword is a block, and the symbol at
//! `x` is one plus the class index of `B ∖ {x}` in the colouring at `x`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::model::{binom, expected_block_count, CertifiedDesign, ClaimedKind, CountParams, Point};
use crate::verify::{complete_colorings, VerifyReport};

/// Codes are scanned pairwise up to this many codewords, by pair buckets beyond.
pub const FULL_SCAN_LIMIT: usize = 2000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codeword {
    /// Sorted support.
    pub support: Vec<Point>,
    /// Symbol at each support coordinate, in `1..q`.
    pub symbols: Vec<u32>,
}

/// An `(n, M, d; w)_q` constant-weight code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CwCode {
    pub n: u32,
    pub w: u32,
    pub q: u32,
    pub d: u32,
    pub codewords: Vec<Codeword>,
}

pub fn emit_code(cert: &CertifiedDesign) -> Result<CwCode> {
    emit_code_with(cert, Exec::Auto)
}

pub fn emit_code_with(cert: &CertifiedDesign, mode: Exec) -> Result<CwCode> {
    if !matches!(cert.claimed_kind, ClaimedKind::McDSQS | ClaimedKind::RDSQS) {
        return Err(Error::Precondition(format!(
            "codes are emitted from an mcDSQS or RDSQS, found {}",
            cert.claimed_kind
        )));
    }
    let d = &cert.design;
    let colorings = complete_colorings(cert)?;
    let nb = d.blocks.len();
    // (block, coordinate position, symbol) per point.
    let entries: Vec<Result<Vec<(u32, usize, u32)>>> = exec::map_range(mode, d.v as usize, |x| {
        let x = x as Point;
        let col = colorings.get(&x).ok_or_else(|| Error::Precondition(format!("no colouring at point {x}")))?;
        let mut out = Vec::new();
        for (j, c) in col.classes.iter().enumerate() {
            for &b in &c.blocks {
                let blk = d
                    .blocks
                    .get(b as usize)
                    .ok_or_else(|| Error::Precondition(format!("class {j} at {x} names missing block {b}")))?;
                let pos = blk.iter().position(|&p| p == x).ok_or_else(|| {
                    Error::Precondition(format!("class {j} at {x} holds block {blk:?} not through {x}"))
                })?;
                out.push((b, pos, j as u32 + 1));
            }
        }
        Ok(out)
    });
    let mut symbols: Vec<Vec<u32>> = d.blocks.iter().map(|b| vec![0; b.len()]).collect();
    for list in entries {
        for (b, pos, s) in list? {
            let slot = &mut symbols[b as usize][pos];
            if *slot != 0 {
                return Err(Error::Precondition(format!("triple {:?} is coloured twice", d.blocks[b as usize])));
            }
            *slot = s;
        }
    }
    let q = 1 + colorings.values().map(|c| c.classes.len() as u32).max().unwrap_or(0);
    let mut codewords = Vec::with_capacity(nb);
    for (b, syms) in symbols.into_iter().enumerate() {
        let blk = &d.blocks[b];
        if let Some(i) = syms.iter().position(|&s| s == 0) {
            let mut t = blk.clone();
            let x = t.remove(i);
            return Err(Error::Precondition(format!("triple {t:?} is missing from the colouring at {x}")));
        }
        codewords.push(Codeword { support: blk.clone(), symbols: syms });
    }
    Ok(CwCode { n: d.v, w: 4, q, d: 6, codewords })
}

/// Hamming distance of two codewords with sorted supports.
pub fn distance(a: &Codeword, b: &Codeword) -> u32 {
    let (mut i, mut j, mut dist) = (0, 0, 0);
    while i < a.support.len() && j < b.support.len() {
        match a.support[i].cmp(&b.support[j]) {
            std::cmp::Ordering::Less => {
                dist += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                dist += 1;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                dist += u32::from(a.symbols[i] != b.symbols[j]);
                i += 1;
                j += 1;
            }
        }
    }
    dist + (a.support.len() - i + b.support.len() - j) as u32
}

/// Least distance over all pairs, with the first pair achieving it.
pub fn min_distance_full(codewords: &[Codeword], mode: Exec) -> Option<(u32, usize, usize)> {
    let per_row = exec::map_range(mode, codewords.len(), |i| {
        ((i + 1)..codewords.len()).map(|j| (distance(&codewords[i], &codewords[j]), i, j)).min()
    });
    per_row.into_iter().flatten().min()
}

/// Least distance over pairs of codewords whose supports share at least two
/// coordinates; all other pairs are at distance at least `2w − 2`.
pub fn min_distance_buckets(codewords: &[Codeword], mode: Exec) -> Option<(u32, usize, usize)> {
    let mut keyed: Vec<(u64, u32)> = Vec::new();
    for (c, cw) in codewords.iter().enumerate() {
        for (i, &x) in cw.support.iter().enumerate() {
            for &y in &cw.support[i + 1..] {
                keyed.push(((x as u64) << 32 | y as u64, c as u32));
            }
        }
    }
    keyed.sort_unstable();
    let mut starts = Vec::new();
    for i in 0..keyed.len() {
        if i == 0 || keyed[i].0 != keyed[i - 1].0 {
            starts.push(i);
        }
    }
    starts.push(keyed.len());
    let per_bucket = exec::map_range(mode, starts.len() - 1, |k| {
        let bucket = &keyed[starts[k]..starts[k + 1]];
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, &(_, a)) in bucket.iter().enumerate() {
            for &(_, b) in &bucket[i + 1..] {
                let cand = (distance(&codewords[a as usize], &codewords[b as usize]), a as usize, b as usize);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
        }
        best
    });
    per_bucket.into_iter().flatten().min()
}

pub fn verify_code(code: &CwCode) -> VerifyReport {
    verify_code_with(code, Exec::Auto)
}

/// Checks weight, alphabet, size and that the minimum distance is exactly `d`.
pub fn verify_code_with(code: &CwCode, mode: Exec) -> VerifyReport {
    let mut report = VerifyReport::new();
    report.stat("codewords", code.codewords.len() as u64);
    let mut shape_ok = true;
    for (c, cw) in code.codewords.iter().enumerate() {
        let sorted = cw.support.windows(2).all(|w| w[0] < w[1]);
        if cw.support.len() != code.w as usize || cw.symbols.len() != cw.support.len() || !sorted {
            report.violate(
                "code-weight",
                format!("codeword {c} has support {:?}, weight {} expected", cw.support, code.w),
            );
            shape_ok = false;
        } else if let Some(&p) = cw.support.iter().find(|&&p| p >= code.n) {
            report.violate("code-length", format!("codeword {c} uses coordinate {p} ≥ n = {}", code.n));
            shape_ok = false;
        }
        if let Some(&s) = cw.symbols.iter().find(|&&s| s == 0 || s >= code.q) {
            report.violate(
                "code-alphabet",
                format!("codeword {c} uses symbol {s} outside 1..{}", code.q.saturating_sub(1)),
            );
        }
    }
    match expected_block_count(CountParams::Steiner { t: 3, k: code.w, v: code.n }) {
        Ok(m) if m == code.codewords.len() as u64 => {}
        Ok(m) => report.violate("code-size", format!("{} codewords, C(n,3)/C(w,3) = {m}", code.codewords.len())),
        Err(e) => report.violate("code-size", e.to_string()),
    }
    if !shape_ok {
        return report;
    }
    let full = code.codewords.len() <= FULL_SCAN_LIMIT;
    report.stat("full_scan", u64::from(full));
    let found =
        if full { min_distance_full(&code.codewords, mode) } else { min_distance_buckets(&code.codewords, mode) };
    match found {
        Some((dist, a, b)) => {
            report.stat("min_distance", dist as u64);
            if dist != code.d {
                let (x, y) = (&code.codewords[a], &code.codewords[b]);
                report.violate(
                    "code-distance",
                    format!(
                        "codewords {:?}|{:?} and {:?}|{:?} are at distance {dist}, d = {}",
                        x.support, x.symbols, y.support, y.symbols, code.d
                    ),
                );
            }
        }
        None => report.violate("code-distance", "no pair of codewords realises the minimum distance"),
    }
    report
}

/// Code-anticode arithmetic in `J_q(n, w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AnticodeBound {
    /// `|A| = C(n−t, w−t)(q−1)^w`.
    pub anticode: u128,
    /// `|J_q(n,w)| = C(n, w)(q−1)^w`.
    pub space: u128,
    /// `|C|·|A|`.
    pub product: u128,
}

impl AnticodeBound {
    pub fn within(&self) -> bool {
        self.product <= self.space
    }

    pub fn perfect(&self) -> bool {
        self.product == self.space
    }
}

pub fn anticode_bound_check(n: u32, w: u32, t: u32, q: u32, code_size: u64) -> Result<AnticodeBound> {
    if !(0 < t && t <= w && w < n && 2 * w - t <= n && q >= 2) {
        return Err(Error::Precondition(format!(
            "need 0 < t ≤ w < n, 2w − t ≤ n and q ≥ 2; got n={n} w={w} t={t} q={q}"
        )));
    }
    let overflow = || Error::Precondition("anticode arithmetic overflows 128 bits".into());
    let pw = ((q - 1) as u128).checked_pow(w).ok_or_else(overflow)?;
    let anticode = binom((n - t) as u64, (w - t) as u64).checked_mul(pw).ok_or_else(overflow)?;
    let space = binom(n as u64, w as u64).checked_mul(pw).ok_or_else(overflow)?;
    let product = (code_size as u128).checked_mul(anticode).ok_or_else(overflow)?;
    Ok(AnticodeBound { anticode, space, product })
}

/// Header `n w q d`, then one `support | symbols` line per codeword.
pub fn to_text(code: &CwCode) -> String {
    let mut s = format!("{} {} {} {}\n", code.n, code.w, code.q, code.d);
    for cw in &code.codewords {
        let sup: Vec<String> = cw.support.iter().map(u32::to_string).collect();
        let sym: Vec<String> = cw.symbols.iter().map(u32::to_string).collect();
        let _ = writeln!(s, "{} | {}", sup.join(" "), sym.join(" "));
    }
    s
}

pub fn from_text(text: &str) -> Result<CwCode> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let nums = |s: &str| -> Result<Vec<u32>> {
        s.split_whitespace().map(|t| t.parse().map_err(|_| Error::Parse(format!("bad number `{t}`")))).collect()
    };
    let head = nums(lines.next().ok_or_else(|| Error::Parse("empty code file".into()))?)?;
    let &[n, w, q, d] = head.as_slice() else {
        return Err(Error::Parse("header must read `n w q d`".into()));
    };
    let codewords = lines
        .map(|l| {
            let (a, b) = l.split_once('|').ok_or_else(|| Error::Parse(format!("missing `|` in `{l}`")))?;
            Ok(Codeword { support: nums(a)?, symbols: nums(b)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CwCode { n, w, q, d, codewords })
}

/// One line per codeword: the full length-`n` vector over `0..q`, space separated.
pub fn to_dense(code: &CwCode) -> String {
    let mut s = String::new();
    for cw in &code.codewords {
        let mut row = vec![0u32; code.n as usize];
        for (&p, &sym) in cw.support.iter().zip(&cw.symbols) {
            row[p as usize] = sym;
        }
        let cells: Vec<String> = row.iter().map(u32::to_string).collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cw(support: [u32; 4], symbols: [u32; 4]) -> Codeword {
        Codeword { support: support.to_vec(), symbols: symbols.to_vec() }
    }

    #[test]
    fn distances() {
        let a = cw([0, 1, 2, 3], [1, 1, 1, 1]);
        assert_eq!(distance(&a, &a), 0);
        assert_eq!(distance(&a, &cw([0, 1, 4, 5], [2, 2, 1, 1])), 6);
        assert_eq!(distance(&a, &cw([0, 1, 4, 5], [1, 2, 1, 1])), 5);
        assert_eq!(distance(&a, &cw([4, 5, 6, 7], [1, 1, 1, 1])), 8);
        assert_eq!(distance(&a, &cw([3, 5, 6, 7], [1, 1, 1, 1])), 6);
    }

    #[test]
    fn bucket_scan_matches_full_scan() {
        let words =
            vec![cw([0, 1, 2, 3], [1, 1, 1, 1]), cw([0, 1, 4, 5], [2, 1, 1, 1]), cw([2, 3, 4, 5], [2, 2, 2, 2])];
        assert_eq!(min_distance_full(&words, Exec::Sequential), min_distance_buckets(&words, Exec::Sequential));
    }

    #[test]
    fn anticode_arithmetic() {
        let b = anticode_bound_check(20, 4, 3, 11, 285).unwrap();
        assert_eq!(b.anticode, 17 * 10u128.pow(4));
        assert!(b.perfect());
        let b = anticode_bound_check(20, 4, 3, 11, 284).unwrap();
        assert!(b.within() && !b.perfect());
        assert!(anticode_bound_check(4, 4, 3, 11, 1).is_err());
    }

    #[test]
    fn text_round_trip() {
        let code = CwCode { n: 4, w: 4, q: 2, d: 6, codewords: vec![cw([0, 1, 2, 3], [1, 1, 1, 1])] };
        assert_eq!(from_text(&to_text(&code)).unwrap(), code);
        assert_eq!(to_dense(&code), "1 1 1 1\n");
    }
}
