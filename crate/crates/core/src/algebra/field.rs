use crate::error::{Error, Result};

/// Arithmetic on a finite field whose elements are indexed `0..order`,
/// with 0 and 1 at indices 0 and 1.
pub trait Field {
    fn order(&self) -> u32;
    fn add(&self, a: u32, b: u32) -> u32;
    fn neg(&self, a: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
    /// `None` for zero.
    fn inv(&self, a: u32) -> Option<u32>;

    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
    fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|i| self.mul(a, i))
    }
}

/// Largest field order accepted by [`build_field`].
pub const MAX_ORDER: u64 = 1 << 16;
const ADD_TABLE_LIMIT: u32 = 256;

/// Log/antilog tables shared by both field representations.
#[derive(Clone, Debug, PartialEq, Eq)]
struct MulTables {
    exp: Vec<u32>,
    /// `log[0]` is unused.
    log: Vec<u32>,
}

impl MulTables {
    /// Tables for the least primitive element under `mul`.
    fn build(q: u32, mul: impl Fn(u32, u32) -> u32) -> Result<Self> {
        for g in 1..q {
            let mut exp = Vec::with_capacity(q as usize - 1);
            let mut log = vec![u32::MAX; q as usize];
            let mut x = 1;
            let mut ok = true;
            for i in 0..q - 1 {
                if log[x as usize] != u32::MAX {
                    ok = false;
                    break;
                }
                log[x as usize] = i;
                exp.push(x);
                x = mul(x, g);
            }
            if ok && x == 1 {
                return Ok(Self { exp, log });
            }
        }
        Err(Error::Precondition(format!("no primitive element found in a ring of order {q}")))
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.exp.len() as u32;
        self.exp[((self.log[a as usize] + self.log[b as usize]) % n) as usize]
    }

    fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.exp.len() as u32;
        Some(self.exp[((n - self.log[a as usize]) % n) as usize])
    }
}

/// GF(p^n) with elements indexed by `Σ c_i p^i`, the coefficients of the
/// residue polynomial `Σ c_i x^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldTable {
    pub p: u32,
    pub n: u32,
    pub q: u32,
    /// Monic modulus, coefficient of `x^i` at index i (length n + 1).
    pub modulus: Vec<u32>,
    tables: MulTables,
    add_table: Option<Vec<u32>>,
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `(p, n)` with `q = p^n`, or `None` if q is not a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut n = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        n += 1;
    }
    (r == 1).then_some((p, n))
}

fn digits(mut x: u32, p: u32, n: u32) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `a` modulo the monic polynomial `m` over GF(p).
fn poly_rem(mut a: Vec<u32>, m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = a.pop().unwrap();
        if lead != 0 {
            let off = a.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                a[off + i] = (a[off + i] + p - lead * c % p) % p;
            }
        }
    }
    a
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let mut r = poly_rem(prod, m, p);
    r.resize(m.len() - 1, 0);
    r
}

/// Irreducibility by trial division by every monic polynomial of degree
/// 1..=n/2.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let n = poly.len() as u32 - 1;
    for d in 1..=n / 2 {
        for low in 0..p.pow(d) {
            let mut f = digits(low, p, d);
            f.push(1);
            if poly_rem(poly.to_vec(), &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// GF(p^n) modulo the least irreducible monic polynomial of degree n, where
/// `x^n + Σ c_i x^i` is ranked by `Σ c_i p^i`.
pub fn build_field(p: u32, n: u32) -> Result<FieldTable> {
    if !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    if n == 0 || (p as u64).checked_pow(n).is_none_or(|q| q > MAX_ORDER) {
        return Err(Error::Precondition(format!("order {p}^{n} outside 1..={MAX_ORDER}")));
    }
    let q = p.pow(n);
    let modulus = (0..q)
        .map(|low| {
            let mut m = digits(low, p, n);
            m.push(1);
            m
        })
        .find(|m| is_irreducible(m, p))
        .ok_or_else(|| Error::Precondition(format!("no irreducible polynomial of degree {n} over GF({p})")))?;
    let mul = |a: u32, b: u32| undigits(&poly_mulmod(&digits(a, p, n), &digits(b, p, n), &modulus, p), p);
    let tables = MulTables::build(q, mul)?;
    let mut f = FieldTable { p, n, q, modulus, tables, add_table: None };
    if q <= ADD_TABLE_LIMIT {
        let t = (0..q * q).map(|i| f.add_digits(i / q, i % q)).collect();
        f.add_table = Some(t);
    }
    Ok(f)
}

impl FieldTable {
    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let (p, mut scale, mut out) = (self.p, 1, 0);
        for _ in 0..self.n {
            out += (a % p + b % p) % p * scale;
            a /= p;
            b /= p;
            scale *= p;
        }
        out
    }

    /// Coefficient vector of an element.
    pub fn coefficients(&self, a: u32) -> Vec<u32> {
        digits(a, self.p, self.n)
    }

    /// Modulus written as a polynomial, e.g. `x^2 + 1`.
    pub fn modulus_string(&self) -> String {
        poly_string(&self.modulus, "x")
    }

    pub fn primitive_element(&self) -> u32 {
        self.tables.exp.get(1).copied().unwrap_or(1)
    }
}

pub(crate) fn poly_string(coeffs: &[u32], var: &str) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        terms.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}{mono}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

impl Field for FieldTable {
    fn order(&self) -> u32 {
        self.q
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        match &self.add_table {
            Some(t) => t[(a * self.q + b) as usize],
            None => self.add_digits(a, b),
        }
    }
    fn neg(&self, a: u32) -> u32 {
        let d: Vec<u32> = digits(a, self.p, self.n).into_iter().map(|c| (self.p - c) % self.p).collect();
        undigits(&d, self.p)
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.tables.mul(a, b)
    }
    fn inv(&self, a: u32) -> Option<u32> {
        self.tables.inv(a)
    }
}

/// GF(q^2) built over a base field GF(q) as `GF(q)[y]/(y^2 + c1 y + c0)`.
/// The element `a + b·y` has index `a + b·q`, so the base field is exactly
/// the indices below q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticExtension {
    pub base: FieldTable,
    /// `[c0, c1]`.
    pub modulus: [u32; 2],
    tables: MulTables,
    add_table: Vec<u32>,
    neg_table: Vec<u32>,
}

/// Quadratic extension by the least irreducible monic quadratic, ranked by
/// `c0 + c1·q`.
pub fn extend_quadratic(base: FieldTable) -> Result<QuadraticExtension> {
    let q = base.q;
    if (q as u64).pow(2) > MAX_ORDER {
        return Err(Error::Precondition(format!("GF({q}^2) exceeds the supported order")));
    }
    let modulus = (0..q * q)
        .map(|i| [i % q, i / q])
        .find(|&[c0, c1]| (0..q).all(|r| base.add(base.add(base.mul(r, r), base.mul(c1, r)), c0) != 0))
        .ok_or_else(|| Error::Precondition(format!("no irreducible quadratic over GF({q})")))?;
    let [c0, c1] = modulus;
    let mul = |x: u32, z: u32| {
        let (a, b, c, d) = (x % q, x / q, z % q, z / q);
        let bd = base.mul(b, d);
        // y^2 = −c1·y − c0.
        let lo = base.sub(base.mul(a, c), base.mul(bd, c0));
        let hi = base.sub(base.add(base.mul(a, d), base.mul(b, c)), base.mul(bd, c1));
        lo + hi * q
    };
    let tables = MulTables::build(q * q, mul)?;
    let qq = q * q;
    let add_table = (0..qq * qq)
        .map(|i| {
            let (x, z) = (i / qq, i % qq);
            base.add(x % q, z % q) + base.add(x / q, z / q) * q
        })
        .collect();
    let neg_table = (0..qq).map(|x| base.neg(x % q) + base.neg(x / q) * q).collect();
    Ok(QuadraticExtension { base, modulus, tables, add_table, neg_table })
}

impl QuadraticExtension {
    pub fn in_base(&self, a: u32) -> bool {
        a < self.base.q
    }

    pub fn modulus_string(&self) -> String {
        poly_string(&[self.modulus[0], self.modulus[1], 1], "y")
    }
}

impl Field for QuadraticExtension {
    fn order(&self) -> u32 {
        self.base.q * self.base.q
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        self.add_table[(a * self.order() + b) as usize]
    }
    fn neg(&self, a: u32) -> u32 {
        self.neg_table[a as usize]
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.tables.mul(a, b)
    }
    fn inv(&self, a: u32) -> Option<u32> {
        self.tables.inv(a)
    }
}

/// Exhaustive check of the field axioms on all table entries.
pub fn check_field_axioms(f: &impl Field) -> std::result::Result<(), String> {
    let q = f.order();
    for a in 0..q {
        if f.add(a, 0) != a || f.mul(a, 1) != a || f.add(a, f.neg(a)) != 0 {
            return Err(format!("identity or negation fails at {a}"));
        }
        if a != 0 && f.inv(a).is_none_or(|i| f.mul(a, i) != 1) {
            return Err(format!("{a} has no inverse"));
        }
        for b in 0..q {
            if f.add(a, b) != f.add(b, a) || f.mul(a, b) != f.mul(b, a) {
                return Err(format!("commutativity fails at ({a}, {b})"));
            }
            for c in 0..q {
                if f.add(f.add(a, b), c) != f.add(a, f.add(b, c))
                    || f.mul(f.mul(a, b), c) != f.mul(a, f.mul(b, c))
                    || f.mul(a, f.add(b, c)) != f.add(f.mul(a, b), f.mul(a, c))
                {
                    return Err(format!("associativity or distributivity fails at ({a}, {b}, {c})"));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fields() {
        let f2 = build_field(2, 1).unwrap();
        assert_eq!(f2.add(1, 1), 0);
        assert_eq!(f2.mul(1, 1), 1);
        let f9 = build_field(3, 2).unwrap();
        assert_eq!(f9.modulus, vec![1, 0, 1]);
        assert_eq!(f9.modulus_string(), "x^2 + 1");
        check_field_axioms(&f9).unwrap();
        assert!(build_field(4, 1).is_err());
        assert!(build_field(2, 17).is_err());
    }

    #[test]
    fn gf81_modulus_is_least_irreducible_quartic() {
        let f = build_field(3, 4).unwrap();
        // Independent oracle: a quartic is irreducible iff it has no root and
        // no monic quadratic factor; scan candidates in rank order.
        let reducible = |m: &[u32]| {
            let eval = |r: u32| m.iter().rev().fold(0, |acc, &c| (acc * r + c) % 3);
            if (0..3).any(|r| eval(r) == 0) {
                return true;
            }
            (0..9).any(|i| {
                let f = [i % 3, i / 3, 1];
                // Long division by a monic quadratic.
                let mut a = m.to_vec();
                while a.len() > 2 {
                    let lead = a.pop().unwrap();
                    let off = a.len() - 2;
                    a[off] = (a[off] + 3 * 3 - lead * f[0] % 3) % 3;
                    a[off + 1] = (a[off + 1] + 3 * 3 - lead * f[1] % 3) % 3;
                }
                a.iter().all(|&c| c == 0)
            })
        };
        let first = (0..81)
            .map(|low| {
                let mut m = digits(low, 3, 4);
                m.push(1);
                m
            })
            .find(|m| !reducible(m))
            .unwrap();
        assert_eq!(f.modulus, first);
    }

    #[test]
    fn gf81_axioms_and_extension() {
        check_field_axioms(&build_field(3, 4).unwrap()).unwrap();
        let ext = extend_quadratic(build_field(3, 2).unwrap()).unwrap();
        check_field_axioms(&ext).unwrap();
        for a in 0..9 {
            for b in 0..9 {
                assert!(ext.in_base(ext.mul(a, b)));
                assert!(ext.in_base(ext.add(a, b)));
            }
        }
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(16), Some((2, 4)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(7), Some((7, 1)));
    }
}
