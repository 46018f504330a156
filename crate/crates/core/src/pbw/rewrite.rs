//! Normalization by term rewriting: formal sum/product trees over
//! coefficients and generators are flattened to words and reduced to the
//! standard-monomial normal form by the two local rules
//!
//!   x_i r   -> sigma_i(r) x_i + delta_i(r)
//!   x_j x_i -> d_{i,j} x_i x_j + r_0 + sum_l r_l x_l      (j > i)
//!
//! Every step strictly decreases the deg-lex multiset measure, so the loop
//! terminates; a step counter guards against regressions.

use super::{MultiIndex, PbwError, PbwPoly, PbwPresentation};
use crate::ring::Elem;

/// A formal expression tree over ring coefficients and the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PbwExpr {
    Coeff(Elem),
    Gen(usize),
    Sum(Vec<PbwExpr>),
    Prod(Vec<PbwExpr>),
    Pow(Box<PbwExpr>, u32),
}

impl PbwExpr {
    pub fn mul(parts: Vec<PbwExpr>) -> PbwExpr {
        PbwExpr::Prod(parts)
    }

    pub fn monomial(alpha: &MultiIndex) -> PbwExpr {
        let mut parts = Vec::new();
        for (i, &e) in alpha.0.iter().enumerate() {
            for _ in 0..e {
                parts.push(PbwExpr::Gen(i));
            }
        }
        PbwExpr::Prod(parts)
    }

    pub fn from_poly(p: &PbwPoly) -> PbwExpr {
        let mut parts = Vec::new();
        for (alpha, c) in p.iter() {
            parts.push(PbwExpr::Prod(vec![PbwExpr::Coeff(c), PbwExpr::monomial(alpha)]));
        }
        PbwExpr::Sum(parts)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Atom {
    C(Elem),
    G(usize),
}

const EXPANSION_CAP: usize = 100_000;
const STEP_CAP: u64 = 5_000_000;

/// Distributes products over sums, yielding the bag of words to rewrite.
fn expand(expr: &PbwExpr, out: &mut Vec<Vec<Atom>>) -> Result<(), PbwError> {
    match expr {
        PbwExpr::Coeff(c) => out.push(vec![Atom::C(*c)]),
        PbwExpr::Gen(i) => out.push(vec![Atom::G(*i)]),
        PbwExpr::Sum(parts) => {
            for p in parts {
                expand(p, out)?;
                if out.len() > EXPANSION_CAP {
                    return Err(PbwError::ExplosionGuard("expression expansion too large".into()));
                }
            }
        }
        PbwExpr::Prod(parts) => {
            let mut acc: Vec<Vec<Atom>> = vec![vec![]];
            for p in parts {
                let mut sub = Vec::new();
                expand(p, &mut sub)?;
                let mut next = Vec::with_capacity(acc.len() * sub.len());
                for w in &acc {
                    for s in &sub {
                        let mut joined = w.clone();
                        joined.extend_from_slice(s);
                        next.push(joined);
                    }
                }
                if next.len() > EXPANSION_CAP {
                    return Err(PbwError::ExplosionGuard("expression expansion too large".into()));
                }
                acc = next;
            }
            out.extend(acc);
        }
        PbwExpr::Pow(base, k) => {
            let parts = vec![(**base).clone(); *k as usize];
            expand(&PbwExpr::Prod(parts), out)?;
        }
    }
    Ok(())
}

/// Rewrites the expression to its unique normal form in the standard basis.
pub fn normalize(pres: &PbwPresentation, expr: &PbwExpr) -> Result<PbwPoly, PbwError> {
    let ring = pres.ring();
    let zero = ring.zero();
    let mut words = Vec::new();
    expand(expr, &mut words)?;
    let mut result = PbwPoly::zero();
    let mut steps = 0u64;
    let mut stack = words;
    while let Some(word) = stack.pop() {
        steps += 1;
        if steps > STEP_CAP {
            return Err(PbwError::StepLimit(STEP_CAP));
        }
        // find the leftmost reducible adjacent pair
        let mut redex = None;
        for i in 0..word.len().saturating_sub(1) {
            match (word[i], word[i + 1]) {
                (Atom::C(_), Atom::C(_)) => {
                    redex = Some(i);
                    break;
                }
                (Atom::G(_), Atom::C(_)) => {
                    redex = Some(i);
                    break;
                }
                (Atom::G(j), Atom::G(k)) if j > k => {
                    redex = Some(i);
                    break;
                }
                _ => {}
            }
        }
        // a zero factor annihilates the whole word
        if word.iter().any(|a| *a == Atom::C(zero)) {
            continue;
        }
        let Some(i) = redex else {
            // normal form: leading coefficients (already collapsed) then
            // nondecreasing generators
            let mut coeff = ring.one();
            let mut alpha = MultiIndex::zero(pres.generators());
            for a in &word {
                match a {
                    Atom::C(c) => coeff = ring.mul(coeff, *c),
                    Atom::G(g) => alpha.0[*g] += 1,
                }
            }
            if coeff != zero {
                result = pres.add(&result, &pres.monomial(alpha, coeff));
            }
            continue;
        };
        let splice = |mid: Vec<Atom>| -> Vec<Atom> {
            let mut w = Vec::with_capacity(word.len() + mid.len());
            w.extend_from_slice(&word[..i]);
            w.extend(mid);
            w.extend_from_slice(&word[i + 2..]);
            w
        };
        match (word[i], word[i + 1]) {
            (Atom::C(a), Atom::C(b)) => {
                let ab = ring.mul(a, b);
                if ab != zero {
                    stack.push(splice(vec![Atom::C(ab)]));
                }
            }
            (Atom::G(g), Atom::C(r)) => {
                let s = pres.sigma().get(g).apply(r);
                if s != zero {
                    stack.push(splice(vec![Atom::C(s), Atom::G(g)]));
                }
                let d = pres.delta().get(g).apply(r);
                if d != zero {
                    stack.push(splice(vec![Atom::C(d)]));
                }
            }
            (Atom::G(j), Atom::G(k)) => {
                debug_assert!(j > k);
                let d = pres.d_of(k, j);
                stack.push(splice(vec![Atom::C(d), Atom::G(k), Atom::G(j)]));
                let rc = pres.r_of(k, j);
                if rc[0] != zero {
                    stack.push(splice(vec![Atom::C(rc[0])]));
                }
                for (l, &c) in rc.iter().enumerate().skip(1) {
                    if c != zero {
                        stack.push(splice(vec![Atom::C(c), Atom::G(l - 1)]));
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    Ok(result)
}

/// Parses a surface expression like "x*z + 1" or "z*x1^2*x2" against a
/// presentation. Generators are x (n = 1) or x1..xn; coefficients are element
/// names, #<index>, or integers (k meaning the k-fold sum of 1).
pub fn parse_expr(pres: &PbwPresentation, input: &str) -> Result<PbwExpr, PbwError> {
    let mut p = Parser { pres, chars: input.chars().collect(), pos: 0 };
    let e = p.parse_sum()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(PbwError::Parse(format!("trailing input at byte {}", p.pos)));
    }
    Ok(e)
}

struct Parser<'a> {
    pres: &'a PbwPresentation,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn parse_sum(&mut self) -> Result<PbwExpr, PbwError> {
        let mut parts = vec![self.parse_product()?];
        while let Some(c) = self.peek() {
            if c == '+' {
                self.pos += 1;
                parts.push(self.parse_product()?);
            } else if c == '-' {
                self.pos += 1;
                let ring = self.pres.ring();
                let minus_one = ring.neg(ring.one());
                let t = self.parse_product()?;
                parts.push(PbwExpr::Prod(vec![PbwExpr::Coeff(minus_one), t]));
            } else {
                break;
            }
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { PbwExpr::Sum(parts) })
    }

    fn parse_product(&mut self) -> Result<PbwExpr, PbwError> {
        let mut parts = vec![self.parse_power()?];
        while let Some(c) = self.peek() {
            if c == '*' {
                self.pos += 1;
                parts.push(self.parse_power()?);
            } else {
                break;
            }
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { PbwExpr::Prod(parts) })
    }

    fn parse_power(&mut self) -> Result<PbwExpr, PbwError> {
        let base = self.parse_atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(PbwError::Parse("expected exponent after ^".into()));
            }
            let k: u32 = self.chars[start..self.pos]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| PbwError::Parse("bad exponent".into()))?;
            return Ok(PbwExpr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<PbwExpr, PbwError> {
        let ring = self.pres.ring();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.parse_sum()?;
                if self.peek() != Some(')') {
                    return Err(PbwError::Parse("expected )".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some('#') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let idx: usize = self.chars[start..self.pos]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| PbwError::Parse("bad element index".into()))?;
                if idx >= ring.size() {
                    return Err(PbwError::Parse(format!("element index {idx} out of range")));
                }
                Ok(PbwExpr::Coeff(Elem(idx)))
            }
            Some(c) if c.is_ascii_alphanumeric() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let tok: String = self.chars[start..self.pos].iter().collect();
                // generator?
                let n = self.pres.generators();
                if tok == "x" && n == 1 {
                    return Ok(PbwExpr::Gen(0));
                }
                if let Some(rest) = tok.strip_prefix('x') {
                    if let Ok(i) = rest.parse::<usize>() {
                        if i >= 1 && i <= n {
                            return Ok(PbwExpr::Gen(i - 1));
                        }
                    }
                }
                // named element?
                if let Some(e) = ring.element_by_name(&tok) {
                    return Ok(PbwExpr::Coeff(e));
                }
                // integer literal: k-fold sum of 1
                if let Ok(k) = tok.parse::<u64>() {
                    let mut acc = ring.zero();
                    for _ in 0..k {
                        acc = ring.add(acc, ring.one());
                    }
                    return Ok(PbwExpr::Coeff(acc));
                }
                Err(PbwError::Parse(format!("unknown token '{tok}'")))
            }
            other => Err(PbwError::Parse(format!("unexpected input {other:?}"))),
        }
    }
}
