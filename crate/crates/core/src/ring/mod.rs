//! Finite rings as explicit operation tables, plus the distinguished subsets
//! used throughout: nilpotents N(R), prime radical, upper nilradical,
//! idempotents, units, regular elements and the center.

mod expr;

pub use expr::{build_ring, RingExpr};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::sync::OnceLock;
use thiserror::Error;

/// An element of a specific [`FiniteRing`], identified by its carrier index.
///
/// Only meaningful relative to the ring that produced it.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub usize);

impl Elem {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Error, Clone)]
pub enum RingError {
    #[error("ring axiom violated: {axiom} (witness: {witness})")]
    Axiom { axiom: &'static str, witness: String },
    #[error("carrier of {0} elements exceeds the {1}-element limit")]
    SizeLimit(usize, usize),
    #[error("malformed ring expression: {0}")]
    BadExpr(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

/// A subset of a ring's carrier, kept both as a sorted list and a membership
/// table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElemSet {
    members: Vec<Elem>,
    bits: Vec<bool>,
}

impl ElemSet {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        let members = bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| Elem(i))
            .collect();
        ElemSet { members, bits }
    }

    pub fn from_members(size: usize, members: impl IntoIterator<Item = Elem>) -> Self {
        let mut bits = vec![false; size];
        for e in members {
            bits[e.0] = true;
        }
        Self::from_bits(bits)
    }

    pub fn empty(size: usize) -> Self {
        ElemSet { members: Vec::new(), bits: vec![false; size] }
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.bits[e.0]
    }

    pub fn insert(&mut self, e: Elem) -> bool {
        if self.bits[e.0] {
            return false;
        }
        self.bits[e.0] = true;
        let pos = self.members.partition_point(|m| *m < e);
        self.members.insert(pos, e);
        true
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        self.members.iter().copied()
    }

    pub fn members(&self) -> &[Elem] {
        &self.members
    }

    pub fn is_subset_of(&self, other: &ElemSet) -> bool {
        self.members.iter().all(|e| other.contains(*e))
    }

    pub fn indices(&self) -> Vec<usize> {
        self.members.iter().map(|e| e.0).collect()
    }
}

#[derive(Default)]
struct SubsetCache {
    nilpotents: OnceLock<ElemSet>,
    prime_radical: OnceLock<ElemSet>,
    upper_nilradical: OnceLock<Result<ElemSet, RingError>>,
    idempotents: OnceLock<ElemSet>,
    units: OnceLock<ElemSet>,
    regular: OnceLock<ElemSet>,
    center: OnceLock<ElemSet>,
    commutative: OnceLock<bool>,
}

/// A finite associative unital ring given by full operation tables.
///
/// Construction validates every axiom by exhaustive table scan, so any value
/// of this type is a genuine ring. Tables and caches are immutable after
/// construction; the ring is freely shareable across threads.
pub struct FiniteRing {
    size: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
    neg: Vec<usize>,
    zero: Elem,
    one: Elem,
    provenance: String,
    expr: Option<RingExpr>,
    names: Vec<String>,
    digest: String,
    cache: SubsetCache,
}

impl std::fmt::Debug for FiniteRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteRing({}, |R|={})", self.provenance, self.size)
    }
}

impl FiniteRing {
    /// Builds a ring from raw tables, checking the abelian-group, monoid and
    /// distributivity axioms exhaustively.
    pub fn from_tables(
        size: usize,
        add: Vec<usize>,
        mul: Vec<usize>,
        neg: Vec<usize>,
        zero: usize,
        one: usize,
        provenance: String,
        expr: Option<RingExpr>,
        names: Vec<String>,
    ) -> Result<Self, RingError> {
        if size == 0 {
            return Err(RingError::BadExpr("empty carrier".into()));
        }
        if size > crate::MAX_RING_SIZE {
            return Err(RingError::SizeLimit(size, crate::MAX_RING_SIZE));
        }
        if add.len() != size * size || mul.len() != size * size || neg.len() != size {
            return Err(RingError::BadExpr("table dimensions do not match carrier".into()));
        }
        if add.iter().chain(mul.iter()).chain(neg.iter()).any(|&v| v >= size) {
            return Err(RingError::BadExpr("table entry out of range".into()));
        }
        if zero >= size || one >= size {
            return Err(RingError::BadExpr("zero/one index out of range".into()));
        }
        if names.len() != size {
            return Err(RingError::BadExpr("name table does not match carrier".into()));
        }
        let digest = table_digest(size, &add, &mul, &neg, zero, one);
        let ring = FiniteRing {
            size,
            add,
            mul,
            neg,
            zero: Elem(zero),
            one: Elem(one),
            provenance,
            expr,
            names,
            digest,
            cache: SubsetCache::default(),
        };
        ring.check_axioms()?;
        Ok(ring)
    }

    fn check_axioms(&self) -> Result<(), RingError> {
        let n = self.size;
        let wit = |items: &[Elem]| -> String {
            items.iter().map(|e| self.name(*e)).collect::<Vec<_>>().join(", ")
        };
        for a in self.elements() {
            if self.add(self.zero, a) != a {
                return Err(RingError::Axiom { axiom: "0 + a = a", witness: wit(&[a]) });
            }
            if self.add(a, self.neg(a)) != self.zero {
                return Err(RingError::Axiom { axiom: "a + (-a) = 0", witness: wit(&[a]) });
            }
            if self.mul(self.one, a) != a || self.mul(a, self.one) != a {
                return Err(RingError::Axiom { axiom: "1 is a two-sided identity", witness: wit(&[a]) });
            }
        }
        for a in self.elements() {
            for b in self.elements() {
                if self.add(a, b) != self.add(b, a) {
                    return Err(RingError::Axiom { axiom: "a + b = b + a", witness: wit(&[a, b]) });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (a, b, c) = (Elem(a), Elem(b), Elem(c));
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                        return Err(RingError::Axiom { axiom: "(a+b)+c = a+(b+c)", witness: wit(&[a, b, c]) });
                    }
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(RingError::Axiom { axiom: "(ab)c = a(bc)", witness: wit(&[a, b, c]) });
                    }
                    if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)) {
                        return Err(RingError::Axiom { axiom: "a(b+c) = ab+ac", witness: wit(&[a, b, c]) });
                    }
                    if self.mul(self.add(a, b), c) != self.add(self.mul(a, c), self.mul(b, c)) {
                        return Err(RingError::Axiom { axiom: "(a+b)c = ac+bc", witness: wit(&[a, b, c]) });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn zero(&self) -> Elem {
        self.zero
    }

    pub fn one(&self) -> Elem {
        self.one
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn expr(&self) -> Option<&RingExpr> {
        self.expr.as_ref()
    }

    /// Content hash of the operation tables; equal digests mean bit-identical rings.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.size).map(Elem)
    }

    pub fn name(&self, a: Elem) -> &str {
        &self.names[a.0]
    }

    /// Looks an element up by its printable name.
    pub fn element_by_name(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.add[a.0 * self.size + b.0])
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.mul[a.0 * self.size + b.0])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.0])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn is_zero(&self, a: Elem) -> bool {
        a == self.zero
    }

    /// a·r·b
    #[inline]
    pub fn mul3(&self, a: Elem, r: Elem, b: Elem) -> Elem {
        self.mul(self.mul(a, r), b)
    }

    pub fn pow(&self, a: Elem, k: usize) -> Elem {
        let mut acc = self.one;
        for _ in 0..k {
            acc = self.mul(acc, a);
        }
        acc
    }

    /// Nilpotency by walking the power sequence; on a finite carrier the
    /// sequence cycles within |R| steps, so a^k = 0 forces k <= |R|.
    pub fn is_nilpotent(&self, a: Elem) -> bool {
        let mut p = a;
        for _ in 0..self.size {
            if p == self.zero {
                return true;
            }
            p = self.mul(p, a);
        }
        false
    }

    /// Least k >= 1 with a^k = 0, if any.
    pub fn nilpotency_index(&self, a: Elem) -> Option<usize> {
        let mut p = a;
        for k in 1..=self.size {
            if p == self.zero {
                return Some(k);
            }
            p = self.mul(p, a);
        }
        None
    }

    pub fn inverse(&self, a: Elem) -> Option<Elem> {
        self.elements().find(|&b| self.mul(a, b) == self.one && self.mul(b, a) == self.one)
    }

    pub fn is_commutative(&self) -> bool {
        *self.cache.commutative.get_or_init(|| {
            self.elements().all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
        })
    }

    /// N(R): elements with a^k = 0 for some k >= 1.
    pub fn nilpotents(&self) -> &ElemSet {
        self.cache.nilpotents.get_or_init(|| {
            ElemSet::from_bits(self.elements().map(|a| self.is_nilpotent(a)).collect())
        })
    }

    /// Prime radical via the strongly-nilpotent characterization: the least
    /// set W with 0 in W such that a joins W whenever every nonzero element
    /// of aRa already lies in W.
    pub fn prime_radical(&self) -> &ElemSet {
        self.cache.prime_radical.get_or_init(|| {
            let mut w = vec![false; self.size];
            loop {
                let mut grew = false;
                for a in self.elements() {
                    if w[a.0] {
                        continue;
                    }
                    let all_in = self.elements().all(|r| {
                        let t = self.mul3(a, r, a);
                        t == self.zero || w[t.0]
                    });
                    if all_in {
                        w[a.0] = true;
                        grew = true;
                    }
                }
                if !grew {
                    break;
                }
            }
            ElemSet::from_bits(w)
        })
    }

    /// Upper nilradical as {a : the two-sided ideal generated by a is nil}.
    ///
    /// In a finite ring this set equals the sum of all nil ideals; the method
    /// re-asserts that the computed set is an ideal and nil, and reports an
    /// internal inconsistency otherwise (a bug signal, not bad input).
    pub fn upper_nilradical(&self) -> Result<&ElemSet, RingError> {
        let r = self.cache.upper_nilradical.get_or_init(|| {
            let nil = self.nilpotents();
            let mut bits = vec![false; self.size];
            for a in self.elements() {
                let ideal = self.ideal_generated_by(&[a]);
                if ideal.is_subset_of(nil) {
                    bits[a.0] = true;
                }
            }
            let u = ElemSet::from_bits(bits);
            for a in u.iter() {
                for b in u.iter() {
                    if !u.contains(self.add(a, b)) {
                        return Err(RingError::Inconsistency(format!(
                            "upper nilradical not closed under +: {} + {}",
                            self.name(a),
                            self.name(b)
                        )));
                    }
                }
                if !u.contains(self.neg(a)) {
                    return Err(RingError::Inconsistency(format!(
                        "upper nilradical not closed under negation: {}",
                        self.name(a)
                    )));
                }
                for r in self.elements() {
                    if !u.contains(self.mul(r, a)) || !u.contains(self.mul(a, r)) {
                        return Err(RingError::Inconsistency(format!(
                            "upper nilradical not an ideal at {} (multiplier {})",
                            self.name(a),
                            self.name(r)
                        )));
                    }
                }
                if !nil.contains(a) {
                    return Err(RingError::Inconsistency(format!(
                        "upper nilradical contains non-nilpotent {}",
                        self.name(a)
                    )));
                }
            }
            Ok(u)
        });
        r.as_ref().map_err(|e| e.clone())
    }

    /// Smallest subset containing `gens` and closed under addition, negation
    /// and multiplication by arbitrary ring elements on either side.
    pub fn ideal_generated_by(&self, gens: &[Elem]) -> ElemSet {
        let mut set = ElemSet::empty(self.size);
        set.insert(self.zero);
        for g in gens {
            set.insert(*g);
        }
        loop {
            let snapshot: Vec<Elem> = set.members().to_vec();
            let mut grew = false;
            for &x in &snapshot {
                if set.insert(self.neg(x)) {
                    grew = true;
                }
                for &y in &snapshot {
                    if set.insert(self.add(x, y)) {
                        grew = true;
                    }
                }
                for r in self.elements() {
                    if set.insert(self.mul(r, x)) {
                        grew = true;
                    }
                    if set.insert(self.mul(x, r)) {
                        grew = true;
                    }
                }
            }
            if !grew {
                return set;
            }
        }
    }

    pub fn idempotents(&self) -> &ElemSet {
        self.cache.idempotents.get_or_init(|| {
            ElemSet::from_bits(self.elements().map(|a| self.mul(a, a) == a).collect())
        })
    }

    pub fn units(&self) -> &ElemSet {
        self.cache.units.get_or_init(|| {
            ElemSet::from_bits(self.elements().map(|a| self.inverse(a).is_some()).collect())
        })
    }

    /// Elements that are neither left nor right zero divisors.
    pub fn regular_elements(&self) -> &ElemSet {
        self.cache.regular.get_or_init(|| {
            ElemSet::from_bits(
                self.elements()
                    .map(|a| {
                        self.elements().all(|b| {
                            b == self.zero
                                || (self.mul(a, b) != self.zero && self.mul(b, a) != self.zero)
                        })
                    })
                    .collect(),
            )
        })
    }

    pub fn center(&self) -> &ElemSet {
        self.cache.center.get_or_init(|| {
            ElemSet::from_bits(
                self.elements()
                    .map(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
                    .collect(),
            )
        })
    }

    /// Central units; on a finite carrier these are exactly the central
    /// regular elements.
    pub fn central_units(&self) -> ElemSet {
        let units = self.units();
        let center = self.center();
        ElemSet::from_members(
            self.size,
            self.elements().filter(|e| units.contains(*e) && center.contains(*e)),
        )
    }

    /// A small set generating (R, +): used to cut middle-element quantifiers,
    /// since r -> f·(r x^gamma)·g is additive in r.
    pub fn additive_generators(&self) -> Vec<Elem> {
        let mut gens: Vec<Elem> = Vec::new();
        let mut span = ElemSet::empty(self.size);
        span.insert(self.zero);
        for a in self.elements() {
            if span.contains(a) {
                continue;
            }
            gens.push(a);
            // close span under addition with the new generator
            loop {
                let snapshot: Vec<Elem> = span.members().to_vec();
                let mut grew = false;
                for &x in &snapshot {
                    if span.insert(self.add(x, a)) {
                        grew = true;
                    }
                    for &y in &snapshot {
                        if span.insert(self.add(x, y)) {
                            grew = true;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            if span.len() == self.size {
                break;
            }
        }
        gens
    }
}

fn table_digest(size: usize, add: &[usize], mul: &[usize], neg: &[usize], zero: usize, one: usize) -> String {
    let mut h = Sha256::new();
    let mut push = |v: usize| h.update((v as u64).to_le_bytes());
    push(size);
    push(zero);
    push(one);
    for &v in add.iter().chain(mul.iter()).chain(neg.iter()) {
        push(v);
    }
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::expr::build_ring;

    fn zmod(n: u32) -> std::sync::Arc<FiniteRing> {
        build_ring(&RingExpr::Zmod { n }).unwrap()
    }

    #[test]
    fn zmod4_basics() {
        let r = zmod(4);
        assert_eq!(r.size(), 4);
        assert_eq!(r.mul(Elem(2), Elem(2)), Elem(0));
        assert_eq!(r.add(Elem(3), Elem(2)), Elem(1));
        assert_eq!(r.nilpotents().indices(), vec![0, 2]);
        assert_eq!(r.idempotents().indices(), vec![0, 1]);
        assert!(r.is_commutative());
    }

    #[test]
    fn zmod8_prime_radical_is_even_residues() {
        let r = zmod(8);
        assert_eq!(r.prime_radical().indices(), vec![0, 2, 4, 6]);
        assert_eq!(r.upper_nilradical().unwrap().indices(), vec![0, 2, 4, 6]);
    }

    #[test]
    fn zmod12_upper_nilradical() {
        let r = zmod(12);
        assert_eq!(r.upper_nilradical().unwrap().indices(), vec![0, 6]);
        assert_eq!(r.nilpotents().indices(), vec![0, 6]);
    }

    #[test]
    fn zmod6_ideal_generated_by_two() {
        let r = zmod(6);
        let i = r.ideal_generated_by(&[Elem(2)]);
        assert_eq!(i.indices(), vec![0, 2, 4]);
        // idempotent and monotone
        let again = r.ideal_generated_by(&i.members().to_vec());
        assert_eq!(again.indices(), i.indices());
        let bigger = r.ideal_generated_by(&[Elem(2), Elem(3)]);
        assert!(i.is_subset_of(&bigger));
    }

    #[test]
    fn radical_chain_nesting() {
        for n in [4u32, 6, 8, 9, 12, 16] {
            let r = zmod(n);
            let nil = r.nilpotents();
            let upper = r.upper_nilradical().unwrap();
            let prime = r.prime_radical();
            assert!(prime.is_subset_of(upper), "Z{n}");
            assert!(upper.is_subset_of(nil), "Z{n}");
            // commutative: all three coincide
            assert_eq!(prime.indices(), nil.indices(), "Z{n}");
        }
    }

    #[test]
    fn regular_equals_units_on_finite_rings() {
        for n in [4u32, 5, 6, 12] {
            let r = zmod(n);
            assert_eq!(r.units().indices(), r.regular_elements().indices());
        }
    }

    #[test]
    fn additive_generators_span() {
        let r = build_ring(&RingExpr::Quot {
            base: Box::new(RingExpr::Gf { p: 2, k: 2, modulus: None }),
            modulus: vec![0, 0, 1],
        })
        .unwrap();
        let gens = r.additive_generators();
        assert_eq!(gens.len(), 4); // F4[z]/(z^2) has 2-rank 4
    }

    #[test]
    fn bad_tables_rejected() {
        // "multiplication" that is not associative
        let res = FiniteRing::from_tables(
            2,
            vec![0, 1, 1, 0],
            vec![0, 0, 1, 1], // a*b = a, not associative with identity demands
            vec![0, 1],
            0,
            1,
            "bogus".into(),
            None,
            vec!["0".into(), "1".into()],
        );
        assert!(res.is_err());
    }
}
