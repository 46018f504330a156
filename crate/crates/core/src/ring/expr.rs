//! Compositional construction of finite rings: residue rings, Galois fields,
//! polynomial quotients, trivial extensions, direct products and (upper
//! triangular) matrix rings.

use super::{Elem, FiniteRing, RingError};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A construction recipe for a finite ring.
///
/// Element order within each carrier is fixed by the recipe (residues in
/// ascending order, coefficient tuples low-degree-first, pairs/entries with
/// the leftmost component most significant), so two builds of the same
/// expression produce bit-identical tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RingExpr {
    /// Integers mod n, n >= 2.
    Zmod { n: u32 },
    /// Galois field with p^k elements; `modulus` lists the coefficients of a
    /// monic irreducible polynomial low-degree-first (length k+1). When
    /// omitted, the lexicographically first irreducible polynomial is used.
    Gf {
        p: u32,
        k: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modulus: Option<Vec<u32>>,
    },
    /// base[z]/(m) for a commutative base and monic m, given by base-element
    /// indices low-degree-first.
    Quot { base: Box<RingExpr>, modulus: Vec<usize> },
    /// Trivial extension T(R, R): pairs (r, m) with (r1,m1)(r2,m2) = (r1 r2, r1 m2 + m1 r2).
    TrivialExt { base: Box<RingExpr> },
    /// Direct product with componentwise operations.
    Product { factors: Vec<RingExpr> },
    /// Full dim x dim matrix ring over the base.
    Matrix { base: Box<RingExpr>, dim: u32 },
    /// Upper triangular dim x dim matrices over the base.
    UpperTriangular { base: Box<RingExpr>, dim: u32 },
}

impl RingExpr {
    pub fn display(&self) -> String {
        match self {
            RingExpr::Zmod { n } => format!("Z{n}"),
            RingExpr::Gf { p, k, .. } => format!("GF({p}^{k})"),
            RingExpr::Quot { base, modulus } => {
                format!("{}[{}]/(deg {})", base.display(), quot_var(base), modulus.len() - 1)
            }
            RingExpr::TrivialExt { base } => format!("T({})", base.display()),
            RingExpr::Product { factors } => factors
                .iter()
                .map(|f| f.display())
                .collect::<Vec<_>>()
                .join(" x "),
            RingExpr::Matrix { base, dim } => format!("M{dim}({})", base.display()),
            RingExpr::UpperTriangular { base, dim } => format!("U{dim}({})", base.display()),
        }
    }
}

/// Variable letter for a polynomial quotient, next in z, w, v, u after the
/// letters its base already uses.
fn quot_var(base: &RingExpr) -> char {
    fn depth(e: &RingExpr) -> usize {
        match e {
            RingExpr::Quot { base, .. } => depth(base) + 1,
            _ => 0,
        }
    }
    ['z', 'w', 'v', 'u'][depth(base).min(3)]
}

struct Raw {
    size: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
    neg: Vec<usize>,
    zero: usize,
    one: usize,
    names: Vec<String>,
}

impl Raw {
    fn build(
        size: usize,
        zero: usize,
        one: usize,
        names: Vec<String>,
        add: impl Fn(usize, usize) -> usize,
        mul: impl Fn(usize, usize) -> usize,
        neg: impl Fn(usize) -> usize,
    ) -> Raw {
        let mut at = vec![0usize; size * size];
        let mut mt = vec![0usize; size * size];
        let mut nt = vec![0usize; size];
        for a in 0..size {
            nt[a] = neg(a);
            for b in 0..size {
                at[a * size + b] = add(a, b);
                mt[a * size + b] = mul(a, b);
            }
        }
        Raw { size, add: at, mul: mt, neg: nt, zero, one, names }
    }
}

/// Materializes a ring expression; the result carries validated tables.
pub fn build_ring(expr: &RingExpr) -> Result<Arc<FiniteRing>, RingError> {
    let raw = build_raw(expr)?;
    Ok(Arc::new(FiniteRing::from_tables(
        raw.size,
        raw.add,
        raw.mul,
        raw.neg,
        raw.zero,
        raw.one,
        expr.display(),
        Some(expr.clone()),
        raw.names,
    )?))
}

fn check_size(size: usize) -> Result<(), RingError> {
    if size == 0 || size > crate::MAX_RING_SIZE {
        return Err(RingError::SizeLimit(size, crate::MAX_RING_SIZE));
    }
    Ok(())
}

fn build_raw(expr: &RingExpr) -> Result<Raw, RingError> {
    match expr {
        RingExpr::Zmod { n } => build_zmod(*n),
        RingExpr::Gf { p, k, modulus } => build_gf(*p, *k, modulus.as_deref()),
        RingExpr::Quot { base, modulus } => build_quot(base, modulus),
        RingExpr::TrivialExt { base } => build_trivial_ext(base),
        RingExpr::Product { factors } => build_product(factors),
        RingExpr::Matrix { base, dim } => build_matrix(base, *dim, false),
        RingExpr::UpperTriangular { base, dim } => build_matrix(base, *dim, true),
    }
}

fn build_zmod(n: u32) -> Result<Raw, RingError> {
    if n < 2 {
        return Err(RingError::BadExpr(format!("Zmod needs n >= 2, got {n}")));
    }
    let n = n as usize;
    check_size(n)?;
    Ok(Raw::build(
        n,
        0,
        1,
        (0..n).map(|i| i.to_string()).collect(),
        |a, b| (a + b) % n,
        |a, b| (a * b) % n,
        |a| (n - a) % n,
    ))
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

// --- dense polynomial helpers over Z_p (coefficients low-degree-first) ---

fn poly_trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_mul_zp(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_trim(out)
}

/// Remainder of a by monic b.
fn poly_rem_zp(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = poly_trim(a.to_vec());
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        for i in 0..=db {
            let idx = i + shift;
            r[idx] = (r[idx] + p - (lead * b[i]) % p % p) % p;
        }
        r = poly_trim(r);
    }
    r
}

fn poly_is_irreducible_zp(m: &[u32], p: u32) -> bool {
    let k = m.len() - 1;
    if k == 0 {
        return false;
    }
    // trial division by all monic polynomials of degree 1..=k/2
    for d in 1..=k / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut t = idx;
            for _ in 0..d {
                g.push((t % p as u64) as u32);
                t /= p as u64;
            }
            g.push(1);
            if poly_rem_zp(m, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn default_gf_modulus(p: u32, k: u32) -> Vec<u32> {
    // lexicographically first monic irreducible of degree k (low coefficients vary fastest)
    let count = (p as u64).pow(k);
    for idx in 0..count {
        let mut m = Vec::with_capacity(k as usize + 1);
        let mut t = idx;
        for _ in 0..k {
            m.push((t % p as u64) as u32);
            t /= p as u64;
        }
        m.push(1);
        if poly_is_irreducible_zp(&m, p) {
            return m;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over Z_p")
}

fn gf_name(coeffs: &[u32], var: char) -> String {
    let mut parts = Vec::new();
    for (j, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let v = match j {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{j}"),
        };
        let part = match (c, j) {
            (_, 0) => c.to_string(),
            (1, _) => v,
            _ => format!("{c}{v}"),
        };
        parts.push(part);
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

fn build_gf(p: u32, k: u32, modulus: Option<&[u32]>) -> Result<Raw, RingError> {
    if !is_prime(p) {
        return Err(RingError::BadExpr(format!("{p} is not prime")));
    }
    if k == 0 {
        return Err(RingError::BadExpr("Galois field needs k >= 1".into()));
    }
    let size = (p as u64).checked_pow(k).ok_or(RingError::SizeLimit(usize::MAX, crate::MAX_RING_SIZE))?;
    check_size(size as usize)?;
    let size = size as usize;
    let m: Vec<u32> = match modulus {
        Some(m) => {
            let m: Vec<u32> = m.iter().map(|c| c % p).collect();
            if m.len() != k as usize + 1 || *m.last().unwrap() != 1 {
                return Err(RingError::BadExpr("modulus must be monic of degree k".into()));
            }
            if !poly_is_irreducible_zp(&m, p) {
                return Err(RingError::BadExpr("modulus is reducible over Z_p".into()));
            }
            m
        }
        None => default_gf_modulus(p, k),
    };
    let k = k as usize;
    let decode = |i: usize| -> Vec<u32> {
        let mut t = i;
        (0..k)
            .map(|_| {
                let c = (t % p as usize) as u32;
                t /= p as usize;
                c
            })
            .collect()
    };
    let encode = |c: &[u32]| -> usize {
        c.iter().rev().fold(0usize, |acc, &x| acc * p as usize + x as usize)
    };
    let names = (0..size).map(|i| gf_name(&decode(i), 'a')).collect();
    Ok(Raw::build(
        size,
        0,
        1,
        names,
        |a, b| {
            let (ca, cb) = (decode(a), decode(b));
            let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
            encode(&sum)
        },
        |a, b| {
            let prod = poly_mul_zp(&decode(a), &decode(b), p);
            let mut red = poly_rem_zp(&prod, &m, p);
            red.resize(k, 0);
            encode(&red)
        },
        |a| {
            let c: Vec<u32> = decode(a).iter().map(|x| (p - x) % p).collect();
            encode(&c)
        },
    ))
}

fn build_quot(base_expr: &RingExpr, modulus: &[usize]) -> Result<Raw, RingError> {
    let base = build_ring(base_expr)?;
    if !base.is_commutative() {
        return Err(RingError::BadExpr("quotient requires a commutative base ring".into()));
    }
    if modulus.len() < 2 {
        return Err(RingError::BadExpr("quotient modulus must have degree >= 1".into()));
    }
    if modulus.iter().any(|&c| c >= base.size()) {
        return Err(RingError::BadExpr("modulus coefficient out of range".into()));
    }
    if *modulus.last().unwrap() != base.one().0 {
        return Err(RingError::BadExpr("quotient modulus must be monic".into()));
    }
    let d = modulus.len() - 1;
    let bs = base.size();
    let size = bs.checked_pow(d as u32).ok_or(RingError::SizeLimit(usize::MAX, crate::MAX_RING_SIZE))?;
    check_size(size)?;
    let m: Vec<Elem> = modulus.iter().map(|&c| Elem(c)).collect();
    let decode = |i: usize| -> Vec<Elem> {
        let mut t = i;
        (0..d)
            .map(|_| {
                let c = Elem(t % bs);
                t /= bs;
                c
            })
            .collect()
    };
    let encode = |c: &[Elem]| -> usize { c.iter().rev().fold(0usize, |acc, e| acc * bs + e.0) };
    let var = quot_var(base_expr);
    let names = (0..size)
        .map(|i| {
            let coeffs = decode(i);
            let mut parts = Vec::new();
            for (j, &c) in coeffs.iter().enumerate().rev() {
                if c == base.zero() {
                    continue;
                }
                let cn = base.name(c);
                let v = match j {
                    0 => String::new(),
                    1 => var.to_string(),
                    _ => format!("{var}^{j}"),
                };
                let part = if j == 0 {
                    cn.to_string()
                } else if c == base.one() {
                    v
                } else if cn.chars().all(|ch| ch.is_ascii_alphanumeric()) {
                    format!("{cn}*{v}")
                } else {
                    format!("({cn})*{v}")
                };
                parts.push(part);
            }
            if parts.is_empty() {
                "0".into()
            } else {
                parts.join("+")
            }
        })
        .collect();
    // reduction of a degree <= 2d-2 coefficient vector by the monic modulus
    let reduce = |mut v: Vec<Elem>| -> Vec<Elem> {
        while v.len() > d {
            let lead = *v.last().unwrap();
            let shift = v.len() - 1 - d;
            for i in 0..=d {
                let t = base.mul(lead, m[i]);
                v[i + shift] = base.sub(v[i + shift], t);
            }
            v.pop();
        }
        v.resize(d, base.zero());
        v
    };
    Ok(Raw::build(
        size,
        0,
        encode(&{
            let mut one = vec![base.zero(); d];
            one[0] = base.one();
            one
        }),
        names,
        |a, b| {
            let (ca, cb) = (decode(a), decode(b));
            let sum: Vec<Elem> = ca.iter().zip(&cb).map(|(x, y)| base.add(*x, *y)).collect();
            encode(&sum)
        },
        |a, b| {
            let (ca, cb) = (decode(a), decode(b));
            let mut prod = vec![base.zero(); 2 * d - 1];
            for (i, &x) in ca.iter().enumerate() {
                for (j, &y) in cb.iter().enumerate() {
                    prod[i + j] = base.add(prod[i + j], base.mul(x, y));
                }
            }
            encode(&reduce(prod))
        },
        |a| {
            let c: Vec<Elem> = decode(a).iter().map(|x| base.neg(*x)).collect();
            encode(&c)
        },
    ))
}

fn build_trivial_ext(base_expr: &RingExpr) -> Result<Raw, RingError> {
    let base = build_ring(base_expr)?;
    let bs = base.size();
    let size = bs.checked_mul(bs).ok_or(RingError::SizeLimit(usize::MAX, crate::MAX_RING_SIZE))?;
    check_size(size)?;
    // pair (r, m) at index r*|B| + m
    let dec = |i: usize| (Elem(i / bs), Elem(i % bs));
    let enc = |r: Elem, m: Elem| r.0 * bs + m.0;
    let names = (0..size)
        .map(|i| {
            let (r, m) = dec(i);
            format!("({},{})", base.name(r), base.name(m))
        })
        .collect();
    Ok(Raw::build(
        size,
        0,
        enc(base.one(), base.zero()),
        names,
        |a, b| {
            let ((r1, m1), (r2, m2)) = (dec(a), dec(b));
            enc(base.add(r1, r2), base.add(m1, m2))
        },
        |a, b| {
            let ((r1, m1), (r2, m2)) = (dec(a), dec(b));
            enc(base.mul(r1, r2), base.add(base.mul(r1, m2), base.mul(m1, r2)))
        },
        |a| {
            let (r, m) = dec(a);
            enc(base.neg(r), base.neg(m))
        },
    ))
}

fn build_product(factor_exprs: &[RingExpr]) -> Result<Raw, RingError> {
    if factor_exprs.is_empty() {
        return Err(RingError::BadExpr("product needs at least one factor".into()));
    }
    let factors: Vec<Arc<FiniteRing>> =
        factor_exprs.iter().map(build_ring).collect::<Result<_, _>>()?;
    let mut size = 1usize;
    for f in &factors {
        size = size.checked_mul(f.size()).ok_or(RingError::SizeLimit(usize::MAX, crate::MAX_RING_SIZE))?;
    }
    check_size(size)?;
    // leftmost factor most significant
    let dec = |mut i: usize| -> Vec<Elem> {
        let mut out = vec![Elem(0); factors.len()];
        for (k, f) in factors.iter().enumerate().rev() {
            out[k] = Elem(i % f.size());
            i /= f.size();
        }
        out
    };
    let enc = |xs: &[Elem]| -> usize {
        xs.iter().zip(&factors).fold(0usize, |acc, (x, f)| acc * f.size() + x.0)
    };
    let names = (0..size)
        .map(|i| {
            let xs = dec(i);
            let inner: Vec<&str> = xs.iter().zip(&factors).map(|(x, f)| f.name(*x)).collect();
            format!("({})", inner.join(","))
        })
        .collect();
    let zip = |a: usize, b: usize, op: &dyn Fn(&FiniteRing, Elem, Elem) -> Elem| {
        let (xa, xb) = (dec(a), dec(b));
        let out: Vec<Elem> = xa
            .iter()
            .zip(&xb)
            .zip(&factors)
            .map(|((x, y), f)| op(f, *x, *y))
            .collect();
        enc(&out)
    };
    Ok(Raw::build(
        size,
        0,
        enc(&factors.iter().map(|f| f.one()).collect::<Vec<_>>()),
        names,
        |a, b| zip(a, b, &|f, x, y| f.add(x, y)),
        |a, b| zip(a, b, &|f, x, y| f.mul(x, y)),
        |a| {
            let out: Vec<Elem> = dec(a).iter().zip(&factors).map(|(x, f)| f.neg(*x)).collect();
            enc(&out)
        },
    ))
}

fn build_matrix(base_expr: &RingExpr, dim: u32, upper: bool) -> Result<Raw, RingError> {
    if dim == 0 {
        return Err(RingError::BadExpr("matrix dimension must be >= 1".into()));
    }
    let base = build_ring(base_expr)?;
    let dim = dim as usize;
    // stored positions, row-major; for the upper triangular ring only r <= c
    let positions: Vec<(usize, usize)> = (0..dim)
        .flat_map(|r| (0..dim).map(move |c| (r, c)))
        .filter(|&(r, c)| !upper || r <= c)
        .collect();
    let bs = base.size();
    let mut size = 1usize;
    for _ in &positions {
        size = size.checked_mul(bs).ok_or(RingError::SizeLimit(usize::MAX, crate::MAX_RING_SIZE))?;
    }
    check_size(size)?;
    let pos_index: Vec<Option<usize>> = (0..dim * dim)
        .map(|rc| positions.iter().position(|&(r, c)| r * dim + c == rc))
        .collect();
    // entry at positions[0] is least significant
    let dec = |mut i: usize| -> Vec<Elem> {
        positions
            .iter()
            .map(|_| {
                let e = Elem(i % bs);
                i /= bs;
                e
            })
            .collect()
    };
    let enc = |xs: &[Elem]| -> usize { xs.iter().rev().fold(0usize, |acc, e| acc * bs + e.0) };
    let get = |xs: &[Elem], r: usize, c: usize| -> Elem {
        match pos_index[r * dim + c] {
            Some(k) => xs[k],
            None => base.zero(),
        }
    };
    let names = (0..size)
        .map(|i| {
            let xs = dec(i);
            let rows: Vec<String> = (0..dim)
                .map(|r| {
                    (0..dim)
                        .map(|c| base.name(get(&xs, r, c)).to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            format!("[{}]", rows.join(";"))
        })
        .collect();
    let one = {
        let xs: Vec<Elem> = positions
            .iter()
            .map(|&(r, c)| if r == c { base.one() } else { base.zero() })
            .collect();
        enc(&xs)
    };
    Ok(Raw::build(
        size,
        0,
        one,
        names,
        |a, b| {
            let (xa, xb) = (dec(a), dec(b));
            let out: Vec<Elem> = xa.iter().zip(&xb).map(|(x, y)| base.add(*x, *y)).collect();
            enc(&out)
        },
        |a, b| {
            let (xa, xb) = (dec(a), dec(b));
            let out: Vec<Elem> = positions
                .iter()
                .map(|&(r, c)| {
                    let mut acc = base.zero();
                    for t in 0..dim {
                        acc = base.add(acc, base.mul(get(&xa, r, t), get(&xb, t, c)));
                    }
                    acc
                })
                .collect();
            enc(&out)
        },
        |a| {
            let out: Vec<Elem> = dec(a).iter().map(|x| base.neg(*x)).collect();
            enc(&out)
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_arithmetic() {
        let f4 = build_ring(&RingExpr::Gf { p: 2, k: 2, modulus: Some(vec![1, 1, 1]) }).unwrap();
        assert_eq!(f4.size(), 4);
        let a = f4.element_by_name("a").unwrap();
        let a2 = f4.mul(a, a);
        assert_eq!(f4.name(a2), "a+1"); // a^2 = a + 1
        assert_eq!(f4.mul(a2, a), f4.one()); // a^3 = 1
        assert_eq!(f4.units().len(), 3);
    }

    #[test]
    fn gf_rejects_bad_input() {
        assert!(build_ring(&RingExpr::Gf { p: 4, k: 1, modulus: None }).is_err());
        // x^2 + 1 = (x+1)^2 over Z2
        assert!(build_ring(&RingExpr::Gf { p: 2, k: 2, modulus: Some(vec![1, 0, 1]) }).is_err());
    }

    #[test]
    fn default_modulus_is_irreducible() {
        for (p, k) in [(2u32, 2u32), (2, 3), (3, 2), (5, 2)] {
            let r = build_ring(&RingExpr::Gf { p, k, modulus: None }).unwrap();
            assert_eq!(r.size(), (p as usize).pow(k));
            // field: every nonzero element is a unit
            assert_eq!(r.units().len(), r.size() - 1);
        }
    }

    #[test]
    fn trivial_ext_z5_matches_matrix_construction() {
        // independent oracle: 2x2 upper triangular constant-diagonal matrices
        // over Z5 with entries (a, b) standing for [[a, b], [0, a]]
        let t = build_ring(&RingExpr::TrivialExt { base: Box::new(RingExpr::Zmod { n: 5 }) }).unwrap();
        assert_eq!(t.size(), 25);
        let enc = |a: usize, b: usize| Elem(a * 5 + b);
        for a1 in 0..5usize {
            for b1 in 0..5usize {
                for a2 in 0..5usize {
                    for b2 in 0..5usize {
                        let prod = t.mul(enc(a1, b1), enc(a2, b2));
                        let expect = enc((a1 * a2) % 5, (a1 * b2 + b1 * a2) % 5);
                        assert_eq!(prod, expect);
                        let sum = t.add(enc(a1, b1), enc(a2, b2));
                        assert_eq!(sum, enc((a1 + a2) % 5, (b1 + b2) % 5));
                    }
                }
            }
        }
        assert!(t.is_commutative());
        assert_eq!(t.center().len(), 25);
        // nilpotents are the zero-diagonal pairs
        assert_eq!(t.nilpotents().indices(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn f4z2_nilpotents_are_multiples_of_z() {
        let r = build_ring(&RingExpr::Quot {
            base: Box::new(RingExpr::Gf { p: 2, k: 2, modulus: Some(vec![1, 1, 1]) }),
            modulus: vec![0, 0, 1],
        })
        .unwrap();
        assert_eq!(r.size(), 16);
        let z = r.element_by_name("z").unwrap();
        let nil = r.nilpotents();
        assert_eq!(nil.len(), 4);
        assert!(nil.contains(z));
        assert_eq!(r.ideal_generated_by(&[z]).indices(), nil.indices());
        assert_eq!(r.prime_radical().indices(), nil.indices());
    }

    #[test]
    fn matrix_ring_m2z2() {
        let m = build_ring(&RingExpr::Matrix { base: Box::new(RingExpr::Zmod { n: 2 }), dim: 2 }).unwrap();
        assert_eq!(m.size(), 16);
        assert!(!m.is_commutative());
        // simple ring: prime radical is zero
        assert_eq!(m.prime_radical().len(), 1);
        // E12 * E12 = 0
        let e12 = m.element_by_name("[0,1;0,0]").unwrap();
        assert_eq!(m.mul(e12, e12), m.zero());
        assert!(m.nilpotents().contains(e12));
    }

    #[test]
    fn upper_triangular_u2z2() {
        let u = build_ring(&RingExpr::UpperTriangular { base: Box::new(RingExpr::Zmod { n: 2 }), dim: 2 }).unwrap();
        assert_eq!(u.size(), 8);
        assert!(!u.is_commutative());
        let e12 = u.element_by_name("[0,1;0,0]").unwrap();
        let e11 = u.element_by_name("[1,0;0,0]").unwrap();
        assert_eq!(u.mul(e12, e11), u.zero());
        assert_ne!(u.mul(e11, e12), u.zero());
        assert_eq!(u.nilpotents().indices(), vec![u.zero().0, e12.0]);
    }

    #[test]
    fn product_ring_componentwise() {
        let p = build_ring(&RingExpr::Product {
            factors: vec![RingExpr::Zmod { n: 2 }, RingExpr::Zmod { n: 3 }],
        })
        .unwrap();
        assert_eq!(p.size(), 6);
        assert!(p.is_commutative());
        assert_eq!(p.nilpotents().len(), 1);
    }

    #[test]
    fn build_is_deterministic() {
        let e = RingExpr::Quot {
            base: Box::new(RingExpr::Gf { p: 2, k: 2, modulus: None }),
            modulus: vec![0, 0, 1],
        };
        let r1 = build_ring(&e).unwrap();
        let r2 = build_ring(&e).unwrap();
        assert_eq!(r1.digest(), r2.digest());
    }

    #[test]
    fn quot_rejects_noncommutative_base() {
        let e = RingExpr::Quot {
            base: Box::new(RingExpr::Matrix { base: Box::new(RingExpr::Zmod { n: 2 }), dim: 2 }),
            modulus: vec![0, 1],
        };
        assert!(build_ring(&e).is_err());
    }

    #[test]
    fn expr_json_round_trip() {
        let e = RingExpr::TrivialExt { base: Box::new(RingExpr::Zmod { n: 5 }) };
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"kind":"trivial_ext","base":{"kind":"zmod","n":5}}"#);
        let back: RingExpr = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
