use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::model::{
    Block, CertifiedDesign, ClaimedKind, ClassScope, ColorClass, Coloring, DesignInstance, Ground, Point,
};
use crate::resolver::parallelism_partition;

use super::field::{build_field, extend_quadratic, prime_power, Field, QuadraticExtension};

/// Largest q accepted by [`moebius_rds`].
pub const MAX_Q: u32 = 16;

/// The Möbius plane over GF(q): points `GF(q^2) ∪ {∞}` with ∞ at index q²,
/// and circles as the images of `GF(q) ∪ {∞}` under fractional-linear maps.
#[derive(Clone, Debug)]
pub struct MoebiusPlane {
    pub q: u32,
    pub field: QuadraticExtension,
}

impl MoebiusPlane {
    pub fn new(q: u32) -> Result<Self> {
        let (p, n) = prime_power(q).ok_or_else(|| Error::Precondition(format!("{q} is not a prime power")))?;
        Ok(Self { q, field: extend_quadratic(build_field(p, n)?)? })
    }

    pub fn infinity(&self) -> Point {
        self.q * self.q
    }

    pub fn num_points(&self) -> u32 {
        self.q * self.q + 1
    }

    /// Image of `z` under `z ↦ (αz + β)/(γz + δ)`.
    fn apply(&self, [a, b, c, d]: [u32; 4], z: Point) -> Point {
        let f = &self.field;
        let inf = self.infinity();
        if z == inf {
            return if c == 0 { inf } else { f.div(a, c).expect("nonzero") };
        }
        let num = f.add(f.mul(a, z), b);
        let den = f.add(f.mul(c, z), d);
        match f.div(num, den) {
            Some(w) => w,
            None => inf,
        }
    }

    /// All circles, sorted. Maps are normalized to `γ = 0, δ = 1` or
    /// `γ = 1`; the work is split over α.
    pub fn circles(&self, mode: Exec) -> Vec<Block> {
        let f = &self.field;
        let qq = f.order();
        let line: Vec<Point> = (0..self.q).chain([self.infinity()]).collect();
        let per_alpha = exec::map_range(mode, qq as usize, |a| {
            let a = a as u32;
            let mut seen: HashSet<Block> = HashSet::new();
            let mut image = |m: [u32; 4]| {
                let mut b: Block = line.iter().map(|&z| self.apply(m, z)).collect();
                b.sort_unstable();
                seen.insert(b);
            };
            for b in 0..qq {
                if a != 0 {
                    image([a, b, 0, 1]);
                }
                for d in 0..qq {
                    if f.mul(a, d) != b {
                        image([a, b, 1, d]);
                    }
                }
            }
            seen
        });
        let mut all: HashSet<Block> = HashSet::new();
        for s in per_alpha {
            all.extend(s);
        }
        let mut out: Vec<Block> = all.into_iter().collect();
        out.sort();
        out
    }

    /// Cross-ratio `(z1−z3)(z2−z4) / ((z2−z3)(z1−z4))`, with factors
    /// involving ∞ cancelled. `None` when undefined.
    pub fn cross_ratio(&self, z: [Point; 4]) -> Option<u32> {
        let f = &self.field;
        let inf = self.infinity();
        let diff = |i: usize, j: usize| -> Option<u32> {
            if z[i] == inf || z[j] == inf {
                None
            } else {
                Some(f.sub(z[i], z[j]))
            }
        };
        // Each factor is `Some(value)` or `None` for one containing ∞; the
        // ∞ factors pair up between numerator and denominator.
        let num = [diff(0, 2), diff(1, 3)];
        let den = [diff(1, 2), diff(0, 3)];
        let prod = |xs: [Option<u32>; 2]| xs.iter().flatten().fold(1, |acc, &x| f.mul(acc, x));
        if num.iter().filter(|x| x.is_none()).count() != den.iter().filter(|x| x.is_none()).count() {
            return None;
        }
        f.div(prod(num), prod(den))
    }

    /// Whether `z` lies on the circle through `a, b, c`.
    pub fn concyclic(&self, a: Point, b: Point, c: Point, z: Point) -> bool {
        if z == a || z == b || z == c {
            return true;
        }
        self.cross_ratio([a, b, c, z]).is_some_and(|r| self.field.in_base(r))
    }
}

fn derived_resolutions(design: &DesignInstance, mode: Exec) -> Result<Vec<(Point, Coloring)>> {
    let incidence = design.incidence();
    let per_point = exec::map_range(mode, design.v as usize, |x| -> Result<(Point, Coloring)> {
        let x = x as Point;
        let through = &incidence[x as usize];
        let residues: Vec<Block> =
            through.iter().map(|&b| design.blocks[b as usize].iter().copied().filter(|&p| p != x).collect()).collect();
        let ground: Vec<Point> = (0..design.v).filter(|&p| p != x).collect();
        let classes = parallelism_partition(&residues, &ground)?;
        let classes = classes
            .into_iter()
            .map(|c| ColorClass {
                blocks: c.into_iter().map(|i| through[i as usize]).collect(),
                scope: ClassScope::pc(Ground::minus_point(x)),
            })
            .collect();
        Ok((x, Coloring { classes }))
    });
    per_point.into_iter().collect()
}

/// RDS(3, q+1, q²+1) from the Möbius plane, with the affine parallelism of
/// every derived plane as its colouring.
pub fn moebius_rds(q: u32) -> Result<CertifiedDesign> {
    moebius_rds_with(q, Exec::Auto)
}

pub fn moebius_rds_with(q: u32, mode: Exec) -> Result<CertifiedDesign> {
    if q > MAX_Q {
        return Err(Error::Unsupported(format!("Möbius planes are built for q ≤ {MAX_Q}, got {q}")));
    }
    let plane = MoebiusPlane::new(q)?;
    let blocks = plane.circles(mode);
    let mut design = DesignInstance::steiner(plane.num_points(), 3, q + 1, blocks);
    design.labels.insert("inf".into(), plane.infinity());
    let colorings = derived_resolutions(&design, mode)?;
    let mut cert = CertifiedDesign::new(design, ClaimedKind::RDS);
    cert.derived_colorings = colorings.into_iter().collect();
    cert.provenance =
        format!("moebius q={q} base {} extension {}", plane.field.base.modulus_string(), plane.field.modulus_string());
    Ok(cert)
}

/// RDS(3, q+1, q^n+1) for the supported exponents: n = 1 is the single-block
/// design and n = 2 the Möbius plane.
pub fn rds_prime_power(q: u32, n: u32) -> Result<CertifiedDesign> {
    match n {
        1 => Ok(trivial_rds(q)),
        2 => moebius_rds(q),
        _ => Err(Error::Unsupported(format!("RDS(3,{},{q}^{n}+1) is only built for n ≤ 2", q + 1))),
    }
}

/// The single-block S(3, k+1, k+1); each derived design is one block that
/// forms one parallel class.
pub fn trivial_rds(k: u32) -> CertifiedDesign {
    assert!(k >= 2, "trivial RDS needs k ≥ 2");
    let v = k + 1;
    let design = DesignInstance::steiner(v, 3, v, vec![(0..v).collect()]);
    let mut cert = CertifiedDesign::new(design, ClaimedKind::RDS);
    for x in 0..v {
        cert.derived_colorings.insert(
            x,
            Coloring { classes: vec![ColorClass { blocks: vec![0], scope: ClassScope::pc(Ground::minus_point(x)) }] },
        );
    }
    cert.provenance = format!("trivial k={k}");
    cert
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_planes() {
        let p2 = MoebiusPlane::new(2).unwrap();
        assert_eq!(p2.circles(Exec::Sequential).len(), 10);
        let p3 = MoebiusPlane::new(3).unwrap();
        assert_eq!(p3.circles(Exec::Sequential).len(), 30);
        assert!(MoebiusPlane::new(6).is_err());
    }

    #[test]
    fn trivial_designs_shape() {
        let c = trivial_rds(3);
        assert_eq!(c.design.v, 4);
        assert_eq!(c.derived_colorings.len(), 4);
    }
}
