//! Skew PBW extensions A = sigma(R)<x_1..x_n> materialized over the
//! standard-monomial basis: presentation data, deg-lex polynomials, the
//! structured product driven by the commutation identities, coefficientwise
//! extended maps, and empirical consistency validation.
//!
//! Two independent product routes exist on purpose: [`PbwPresentation::mul`]
//! peels generators recursively, while [`rewrite::normalize`] runs a leftmost
//! term-rewriting loop; validation cross-checks them against each other.

pub mod bounded;
pub mod rewrite;

use crate::morphism::{DerivationFamily, EndoFamily, MapError};
use crate::ring::{Elem, FiniteRing, RingError};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PbwError {
    #[error("presentation mismatch: {0}")]
    Mismatch(String),
    #[error("associativity violated: {0}")]
    Associativity(String),
    #[error("normalize/mul disagreement: {0}")]
    RouteDisagreement(String),
    #[error("extension hypothesis fails: {equation} (witness: {witness})")]
    Hypothesis { equation: String, witness: String },
    #[error("search space explosion: {0}")]
    ExplosionGuard(String),
    #[error("rewriting step limit {0} exceeded")]
    StepLimit(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Map(#[from] MapError),
    #[error("{0}")]
    Ring(#[from] RingError),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

/// Exponent vector alpha of a standard monomial x^alpha.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Largest generator index with a positive exponent.
    pub fn top(&self) -> Option<usize> {
        self.0.iter().rposition(|&e| e > 0)
    }

    pub fn minus_unit(&self, i: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[i] -= 1;
        MultiIndex(v)
    }
}

/// Deg-lex with x_1 < x_2 < ... < x_n: compare total degree, then exponents
/// from the dominant (largest-index) variable down.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A left-coefficient polynomial: finitely supported map from multi-indices
/// to nonzero coefficients, kept in deg-lex order.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PbwPoly {
    terms: BTreeMap<MultiIndex, Elem>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    alpha: Vec<u32>,
    coeff: usize,
}

impl PbwPoly {
    pub fn zero() -> Self {
        PbwPoly { terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant(ring: &FiniteRing, r: Elem) -> Self {
        let mut p = PbwPoly::zero();
        if r != ring.zero() {
            p.terms.insert(MultiIndex::zero(0), r);
        }
        p
    }

    pub fn term(ring: &FiniteRing, alpha: MultiIndex, r: Elem) -> Self {
        let mut p = PbwPoly::zero();
        if r != ring.zero() {
            p.terms.insert(alpha, r);
        }
        p
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|a| a.degree()).max()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Option<Elem> {
        self.terms.get(alpha).copied()
    }

    /// Terms in ascending deg-lex order.
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, Elem)> {
        self.terms.iter().map(|(a, c)| (a, *c))
    }

    pub fn leading(&self) -> Option<(&MultiIndex, Elem)> {
        self.terms.iter().next_back().map(|(a, c)| (a, *c))
    }

    /// The deg-lex minimal term.
    pub fn trailing(&self) -> Option<(&MultiIndex, Elem)> {
        self.terms.iter().next().map(|(a, c)| (a, *c))
    }

    pub fn coefficients(&self) -> impl Iterator<Item = Elem> + '_ {
        self.terms.values().copied()
    }

    fn insert_add(&mut self, ring: &FiniteRing, alpha: MultiIndex, c: Elem) {
        if c == ring.zero() {
            return;
        }
        match self.terms.remove(&alpha) {
            None => {
                self.terms.insert(alpha, c);
            }
            Some(prev) => {
                let s = ring.add(prev, c);
                if s != ring.zero() {
                    self.terms.insert(alpha, s);
                }
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(a, c)| TermJson { alpha: a.0.clone(), coeff: c.0 })
            .collect();
        serde_json::to_value(terms).unwrap()
    }

    pub fn from_json(ring: &FiniteRing, n: usize, v: &serde_json::Value) -> Result<Self, PbwError> {
        let terms: Vec<TermJson> =
            serde_json::from_value(v.clone()).map_err(|e| PbwError::Parse(e.to_string()))?;
        let mut p = PbwPoly::zero();
        for t in terms {
            if t.alpha.len() != n {
                return Err(PbwError::Parse(format!(
                    "alpha has {} entries, presentation has {n} generators",
                    t.alpha.len()
                )));
            }
            if t.coeff >= ring.size() {
                return Err(PbwError::Parse(format!("coefficient index {} out of range", t.coeff)));
            }
            p.insert_add(ring, MultiIndex(t.alpha), Elem(t.coeff));
        }
        Ok(p)
    }

    /// Renders terms in descending deg-lex order, e.g. "z*x^2 + x + 1".
    pub fn render(&self, ring: &FiniteRing, n: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mono = |a: &MultiIndex| -> String {
            let parts: Vec<String> = a
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let var = if n == 1 { "x".to_string() } else { format!("x{}", i + 1) };
                    if e == 1 {
                        var
                    } else {
                        format!("{var}^{e}")
                    }
                })
                .collect();
            parts.join("*")
        };
        let mut out = Vec::new();
        for (a, c) in self.terms.iter().rev() {
            let m = mono(a);
            let cn = ring.name(c.0.into());
            let cn = if cn.contains('+') { format!("({cn})") } else { cn.to_string() };
            let part = if m.is_empty() {
                cn
            } else if c.0 == ring.one().0 {
                m
            } else {
                format!("{cn}*{m}")
            };
            out.push(part);
        }
        out.join(" + ")
    }
}

impl From<usize> for Elem {
    fn from(v: usize) -> Self {
        Elem(v)
    }
}

/// Structural flags recomputed from the raw presentation data.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresFlags {
    pub quasi_commutative: bool,
    pub bijective: bool,
    pub derivation_type: bool,
    pub endomorphism_type: bool,
}

/// The data of A = sigma(R)<x_1..x_n>: coefficient ring, injective
/// endomorphism family, paired derivations, the d_{i,j} constants for the
/// generator swap rule x_j x_i -> d_{i,j} x_i x_j + r_0 + sum r_l x_l, and
/// the r-constant tuples.
pub struct PbwPresentation {
    ring: Arc<FiniteRing>,
    n: usize,
    sigma: EndoFamily,
    delta: DerivationFamily,
    d: Vec<Elem>,
    r_consts: Vec<Vec<Elem>>,
    digest: String,
    mono_coeff_cache: Mutex<HashMap<(MultiIndex, Elem), PbwPoly>>,
    mono_gen_cache: Mutex<HashMap<(MultiIndex, usize), PbwPoly>>,
}

impl std::fmt::Debug for PbwPresentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PbwPresentation(over {}, n={})", self.ring.provenance(), self.n)
    }
}

fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl PbwPresentation {
    /// Validates component invariants (injective sigmas, paired derivations,
    /// nonzero d constants, table dimensions). Empirical consistency of the
    /// rewriting system is a separate step, [`PbwPresentation::validate`].
    pub fn new(
        ring: Arc<FiniteRing>,
        sigma: EndoFamily,
        delta: DerivationFamily,
        d: Vec<Elem>,
        r_consts: Vec<Vec<Elem>>,
    ) -> Result<Self, PbwError> {
        let n = sigma.len();
        if sigma.ring().digest() != ring.digest() {
            return Err(PbwError::Mismatch("family does not act on the coefficient ring".into()));
        }
        if !sigma.all_injective() {
            return Err(PbwError::Mismatch("every sigma_i must be injective".into()));
        }
        if delta.len() != n {
            return Err(PbwError::Mismatch("derivation family length differs from n".into()));
        }
        let pairs = n * n.saturating_sub(1) / 2;
        if d.len() != pairs || r_consts.len() != pairs {
            return Err(PbwError::Mismatch(format!(
                "expected {pairs} d/r entries for n = {n}"
            )));
        }
        if d.iter().any(|&c| c == ring.zero()) {
            return Err(PbwError::Mismatch("every d_ij must be nonzero".into()));
        }
        if r_consts.iter().any(|r| r.len() != n + 1) {
            return Err(PbwError::Mismatch("each r tuple must have n+1 entries".into()));
        }
        let digest = {
            use sha2::{Digest, Sha256};
            let mut h = Sha256::new();
            h.update(ring.digest().as_bytes());
            h.update((n as u64).to_le_bytes());
            for m in sigma.maps() {
                for &v in m.table() {
                    h.update((v as u64).to_le_bytes());
                }
            }
            for dl in delta.deltas() {
                for &v in dl.table() {
                    h.update((v as u64).to_le_bytes());
                }
            }
            for &e in &d {
                h.update((e.0 as u64).to_le_bytes());
            }
            for r in &r_consts {
                for &e in r {
                    h.update((e.0 as u64).to_le_bytes());
                }
            }
            hex::encode(h.finalize())
        };
        Ok(PbwPresentation {
            ring,
            n,
            sigma,
            delta,
            d,
            r_consts,
            digest,
            mono_coeff_cache: Mutex::new(HashMap::new()),
            mono_gen_cache: Mutex::new(HashMap::new()),
        })
    }

    /// Commutative polynomial presentation: sigma = id, delta = 0, d = 1.
    pub fn commutative(ring: Arc<FiniteRing>, n: usize) -> Result<Self, PbwError> {
        let id = crate::morphism::RingMap::identity(ring.clone());
        let sigma = EndoFamily::new(ring.clone(), vec![id; n])?;
        let delta = DerivationFamily::zero(&sigma);
        let pairs = n * n.saturating_sub(1) / 2;
        let d = vec![ring.one(); pairs];
        let r = vec![vec![ring.zero(); n + 1]; pairs];
        Self::new(ring, sigma, delta, d, r)
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn generators(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> &EndoFamily {
        &self.sigma
    }

    pub fn delta(&self) -> &DerivationFamily {
        &self.delta
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn d_of(&self, i: usize, j: usize) -> Elem {
        self.d[tri_index(self.n, i, j)]
    }

    pub fn r_of(&self, i: usize, j: usize) -> &[Elem] {
        &self.r_consts[tri_index(self.n, i, j)]
    }

    /// Flags are always recomputed from the raw data, never trusted from input.
    pub fn classify(&self) -> PresFlags {
        let endomorphism_type = self.delta.all_zero();
        let derivation_type = self.sigma.maps().iter().all(|s| s.is_identity());
        let r_zero = self
            .r_consts
            .iter()
            .all(|r| r.iter().all(|&c| c == self.ring.zero()));
        let quasi_commutative = endomorphism_type && r_zero;
        let units = self.ring.units();
        let bijective = self.sigma.maps().iter().all(|s| s.is_bijective())
            && self.d.iter().all(|&c| units.contains(c));
        PresFlags { quasi_commutative, bijective, derivation_type, endomorphism_type }
    }

    fn check_poly(&self, f: &PbwPoly) -> Result<(), PbwError> {
        for (a, c) in f.iter() {
            if a.len() != self.n && !(a.is_empty() && f.num_terms() <= 1) {
                return Err(PbwError::Mismatch(format!(
                    "polynomial has {}-variable terms, presentation has {}",
                    a.len(),
                    self.n
                )));
            }
            if c.0 >= self.ring.size() {
                return Err(PbwError::Mismatch("coefficient outside the carrier".into()));
            }
        }
        Ok(())
    }

    pub fn constant(&self, r: Elem) -> PbwPoly {
        PbwPoly::term(&self.ring, MultiIndex::zero(self.n), r)
    }

    pub fn monomial(&self, alpha: MultiIndex, r: Elem) -> PbwPoly {
        PbwPoly::term(&self.ring, alpha, r)
    }

    pub fn one(&self) -> PbwPoly {
        self.constant(self.ring.one())
    }

    pub fn add(&self, f: &PbwPoly, g: &PbwPoly) -> PbwPoly {
        let mut out = f.clone();
        self.add_assign(&mut out, g);
        out
    }

    pub fn add_assign(&self, acc: &mut PbwPoly, g: &PbwPoly) {
        for (a, c) in g.iter() {
            acc.insert_add(&self.ring, a.clone(), c);
        }
    }

    pub fn neg(&self, f: &PbwPoly) -> PbwPoly {
        let mut out = PbwPoly::zero();
        for (a, c) in f.iter() {
            out.insert_add(&self.ring, a.clone(), self.ring.neg(c));
        }
        out
    }

    pub fn sub(&self, f: &PbwPoly, g: &PbwPoly) -> PbwPoly {
        self.add(f, &self.neg(g))
    }

    pub fn scale_left(&self, c: Elem, f: &PbwPoly) -> PbwPoly {
        let mut out = PbwPoly::zero();
        for (a, x) in f.iter() {
            out.insert_add(&self.ring, a.clone(), self.ring.mul(c, x));
        }
        out
    }

    /// x^alpha * r, by peeling the dominant generator:
    /// x^alpha r = x^(alpha - e_k)(sigma_k(r) x_k + delta_k(r)).
    pub fn mono_times_coeff(&self, alpha: &MultiIndex, r: Elem) -> PbwPoly {
        if r == self.ring.zero() {
            return PbwPoly::zero();
        }
        if alpha.is_zero() {
            return self.constant(r);
        }
        let key = (alpha.clone(), r);
        if let Some(hit) = self.mono_coeff_cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let k = alpha.top().unwrap();
        let rest = alpha.minus_unit(k);
        let twisted = self.mono_times_coeff(&rest, self.sigma.get(k).apply(r));
        let mut out = self.poly_times_gen(&twisted, k);
        let dr = self.delta.get(k).apply(r);
        if dr != self.ring.zero() {
            self.add_assign(&mut out, &self.mono_times_coeff(&rest, dr));
        }
        self.mono_coeff_cache.lock().unwrap().insert(key, out.clone());
        out
    }

    /// x^gamma * x_k, applying the swap rule while any generator above k
    /// stands in the way.
    pub fn mono_times_gen(&self, gamma: &MultiIndex, k: usize) -> PbwPoly {
        let j = match gamma.top() {
            None => return self.monomial(MultiIndex::unit(self.n, k), self.ring.one()),
            Some(j) => j,
        };
        if j <= k {
            let mut a = gamma.clone();
            a.0[k] += 1;
            return self.monomial(a, self.ring.one());
        }
        let key = (gamma.clone(), k);
        if let Some(hit) = self.mono_gen_cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        // x^gamma x_k = x^(gamma - e_j) (x_j x_k)
        //             = x^(gamma - e_j) (d_{k,j} x_k x_j + r_0 + sum_l r_l x_l)
        let rest = gamma.minus_unit(j);
        let d = self.d_of(k, j);
        let rc = self.r_of(k, j).to_vec();
        let head = self.mono_times_coeff(&rest, d);
        let head = self.poly_times_gen(&head, k);
        let mut out = self.poly_times_gen(&head, j);
        if rc[0] != self.ring.zero() {
            self.add_assign(&mut out, &self.mono_times_coeff(&rest, rc[0]));
        }
        for (l, &c) in rc.iter().enumerate().skip(1) {
            if c != self.ring.zero() {
                let t = self.mono_times_coeff(&rest, c);
                self.add_assign(&mut out, &self.poly_times_gen(&t, l - 1));
            }
        }
        self.mono_gen_cache.lock().unwrap().insert(key, out.clone());
        out
    }

    pub fn poly_times_gen(&self, f: &PbwPoly, k: usize) -> PbwPoly {
        let mut out = PbwPoly::zero();
        for (gamma, c) in f.iter() {
            let t = self.mono_times_gen(gamma, k);
            self.add_assign(&mut out, &self.scale_left(c, &t));
        }
        out
    }

    /// The product in A, term by term: a x^alpha * b x^beta expands through
    /// x^alpha b and then right-multiplication by the generators of x^beta.
    pub fn mul(&self, f: &PbwPoly, g: &PbwPoly) -> Result<PbwPoly, PbwError> {
        self.check_poly(f)?;
        self.check_poly(g)?;
        let mut out = PbwPoly::zero();
        for (alpha, a) in f.iter() {
            for (beta, b) in g.iter() {
                let mut part = self.mono_times_coeff(alpha, b);
                for i in 0..self.n {
                    for _ in 0..beta.0[i] {
                        part = self.poly_times_gen(&part, i);
                    }
                }
                self.add_assign(&mut out, &self.scale_left(a, &part));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, f: &PbwPoly, k: u32) -> Result<PbwPoly, PbwError> {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(&acc, f)?;
        }
        Ok(acc)
    }
}

/// The decomposition x^alpha r = sigma^alpha(r) x^alpha + p with deg p < |alpha|.
#[derive(Clone, Debug)]
pub struct CommuteTrace {
    pub twisted: Elem,
    pub tail: PbwPoly,
}

/// The decomposition x^alpha x^beta = d x^(alpha+beta) + p with d left
/// invertible and deg p < |alpha + beta|.
#[derive(Clone, Debug)]
pub struct MonoTrace {
    pub lead: Elem,
    pub tail: PbwPoly,
}

impl PbwPresentation {
    /// Computes sigma^alpha(r) and the lower-degree remainder of x^alpha r,
    /// cross-checking the twisted coefficient against direct composition of
    /// the family powers and the whole identity against the rewriting route.
    pub fn commute_past(&self, alpha: &MultiIndex, r: Elem) -> Result<CommuteTrace, PbwError> {
        let full = self.mono_times_coeff(alpha, r);
        if r == self.ring.zero() {
            return Ok(CommuteTrace { twisted: self.ring.zero(), tail: PbwPoly::zero() });
        }
        let twisted = full.coeff(alpha).unwrap_or(self.ring.zero());
        let alpha_exp: Vec<usize> = alpha.0.iter().map(|&e| e as usize).collect();
        let direct = crate::morphism::MonoidClosure::apply_alpha(&self.sigma, &alpha_exp, r);
        if twisted != direct {
            return Err(PbwError::Inconsistency(format!(
                "leading coefficient of x^alpha r differs from sigma^alpha(r): {} vs {}",
                self.ring.name(twisted),
                self.ring.name(direct)
            )));
        }
        if twisted == self.ring.zero() {
            return Err(PbwError::Inconsistency(
                "sigma^alpha(r) = 0 for nonzero r contradicts injectivity".into(),
            ));
        }
        let tail = self.sub(&full, &self.monomial(alpha.clone(), twisted));
        if let Some(d) = tail.degree() {
            if d >= alpha.degree() {
                return Err(PbwError::Inconsistency(format!(
                    "remainder degree {d} not below |alpha| = {}",
                    alpha.degree()
                )));
            }
        }
        // rewriting route must agree
        let expr = rewrite::PbwExpr::mul(vec![
            rewrite::PbwExpr::monomial(alpha),
            rewrite::PbwExpr::Coeff(r),
        ]);
        let via_rewrite = rewrite::normalize(self, &expr)?;
        if via_rewrite != full {
            return Err(PbwError::RouteDisagreement(format!(
                "x^alpha r: mul gives {} but normalize gives {}",
                full.render(&self.ring, self.n),
                via_rewrite.render(&self.ring, self.n)
            )));
        }
        Ok(CommuteTrace { twisted, tail })
    }

    /// Computes d_{alpha,beta} and the remainder of x^alpha x^beta, checking
    /// left invertibility (a unit, on a finite carrier) and the degree bound,
    /// and cross-checking against the rewriting route.
    pub fn monomial_product(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Result<MonoTrace, PbwError> {
        let fa = self.monomial(alpha.clone(), self.ring.one());
        let fb = self.monomial(beta.clone(), self.ring.one());
        let full = self.mul(&fa, &fb)?;
        let total = alpha.plus(beta);
        let lead = full.coeff(&total).unwrap_or(self.ring.zero());
        if !self.ring.units().contains(lead) {
            return Err(PbwError::Inconsistency(format!(
                "d_alpha,beta = {} is not left invertible",
                self.ring.name(lead)
            )));
        }
        let tail = self.sub(&full, &self.monomial(total.clone(), lead));
        if let Some(d) = tail.degree() {
            if d >= total.degree() {
                return Err(PbwError::Inconsistency(format!(
                    "remainder degree {d} not below |alpha+beta| = {}",
                    total.degree()
                )));
            }
        }
        let expr = rewrite::PbwExpr::mul(vec![
            rewrite::PbwExpr::monomial(alpha),
            rewrite::PbwExpr::monomial(beta),
        ]);
        let via_rewrite = rewrite::normalize(self, &expr)?;
        if via_rewrite != full {
            return Err(PbwError::RouteDisagreement(
                "x^alpha x^beta differs between mul and normalize".into(),
            ));
        }
        Ok(MonoTrace { lead, tail })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BarKind {
    Sigma,
    Delta,
}

/// Coefficientwise application of sigma_k (resp. delta_k) to polynomials of A.
#[derive(Clone)]
pub struct ExtendedMap {
    pres: Arc<PbwPresentation>,
    pub kind: BarKind,
    pub k: usize,
}

impl ExtendedMap {
    pub fn apply(&self, f: &PbwPoly) -> PbwPoly {
        let ring = self.pres.ring();
        let mut out = PbwPoly::zero();
        for (a, c) in f.iter() {
            let img = match self.kind {
                BarKind::Sigma => self.pres.sigma().get(self.k).apply(c),
                BarKind::Delta => self.pres.delta().get(self.k).apply(c),
            };
            out.insert_add(ring, a.clone(), img);
        }
        out
    }

    /// Coefficientwise application of an arbitrary image table (used for
    /// composed closure maps sigma^alpha).
    pub fn apply_table(pres: &PbwPresentation, table: &[usize], f: &PbwPoly) -> PbwPoly {
        let ring = pres.ring();
        let mut out = PbwPoly::zero();
        for (a, c) in f.iter() {
            out.insert_add(ring, a.clone(), Elem(table[c.0]));
        }
        out
    }
}

/// Sampling parameters for the extended-map homomorphism test.
#[derive(Copy, Clone, Debug)]
pub struct ExtendOptions {
    pub random_pairs: usize,
    pub degree: u32,
    pub seed: u64,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        ExtendOptions { random_pairs: 1000, degree: 3, seed: 0 }
    }
}

fn check_extension_hypotheses(pres: &PbwPresentation) -> Result<(), PbwError> {
    let ring = pres.ring();
    let n = pres.generators();
    for i in 0..n {
        for j in 0..n {
            for a in ring.elements() {
                let sd = pres.sigma().get(i).apply(pres.delta().get(j).apply(a));
                let ds = pres.delta().get(j).apply(pres.sigma().get(i).apply(a));
                if sd != ds {
                    return Err(PbwError::Hypothesis {
                        equation: format!("sigma_{} delta_{} = delta_{} sigma_{}", i + 1, j + 1, j + 1, i + 1),
                        witness: format!("at {}", ring.name(a)),
                    });
                }
                let dd = pres.delta().get(i).apply(pres.delta().get(j).apply(a));
                let dd2 = pres.delta().get(j).apply(pres.delta().get(i).apply(a));
                if dd != dd2 {
                    return Err(PbwError::Hypothesis {
                        equation: format!("delta_{} delta_{} = delta_{} delta_{}", i + 1, j + 1, j + 1, i + 1),
                        witness: format!("at {}", ring.name(a)),
                    });
                }
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in (i + 1)..n {
                let d = pres.d_of(i, j);
                if pres.delta().get(k).apply(d) != ring.zero() {
                    return Err(PbwError::Hypothesis {
                        equation: format!("delta_{}(d_{},{}) = 0", k + 1, i + 1, j + 1),
                        witness: format!("delta of {}", ring.name(d)),
                    });
                }
                for (l, &rc) in pres.r_of(i, j).iter().enumerate() {
                    if pres.delta().get(k).apply(rc) != ring.zero() {
                        return Err(PbwError::Hypothesis {
                            equation: format!("delta_{}(r_{}^({},{})) = 0", k + 1, l, i + 1, j + 1),
                            witness: format!("delta of {}", ring.name(rc)),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

fn random_poly(pres: &PbwPresentation, rng: &mut ChaCha8Rng, degree: u32, max_terms: usize) -> PbwPoly {
    let monos = bounded::monomials_up_to(pres.generators(), degree);
    let ring = pres.ring();
    let mut p = PbwPoly::zero();
    let terms = rng.random_range(1..=max_terms);
    for _ in 0..terms {
        let m = monos[rng.random_range(0..monos.len())].clone();
        let c = Elem(rng.random_range(0..ring.size()));
        p.insert_add(ring, m, c);
    }
    p
}

fn sample_pairs_check(
    pres: &Arc<PbwPresentation>,
    map: &ExtendedMap,
    opts: &ExtendOptions,
) -> Result<(), PbwError> {
    let ring = pres.ring().clone();
    let n = pres.generators();
    // exhaustive at degree <= 1
    let mut small = Vec::new();
    for r in ring.elements() {
        small.push(pres.constant(r));
        for i in 0..n {
            small.push(pres.monomial(MultiIndex::unit(n, i), r));
        }
    }
    let failure = |f: &PbwPoly, g: &PbwPoly| -> PbwError {
        let eq = match map.kind {
            BarKind::Sigma => "sigma_bar(fg) = sigma_bar(f) sigma_bar(g)",
            BarKind::Delta => "delta_bar(fg) = sigma_bar(f) delta_bar(g) + delta_bar(f) g",
        };
        PbwError::Hypothesis {
            equation: eq.to_string(),
            witness: format!("f = {}, g = {}", f.render(&ring, n), g.render(&ring, n)),
        }
    };
    let sigma_bar = ExtendedMap { pres: pres.clone(), kind: BarKind::Sigma, k: map.k };
    let check_pair = |f: &PbwPoly, g: &PbwPoly| -> Result<bool, PbwError> {
        let fg = pres.mul(f, g)?;
        match map.kind {
            BarKind::Sigma => Ok(map.apply(&fg) == pres.mul(&map.apply(f), &map.apply(g))?),
            BarKind::Delta => {
                let lhs = map.apply(&fg);
                let rhs = pres.add(
                    &pres.mul(&sigma_bar.apply(f), &map.apply(g))?,
                    &pres.mul(&map.apply(f), g)?,
                );
                Ok(lhs == rhs)
            }
        }
    };
    for f in &small {
        for g in &small {
            if !check_pair(f, g)? {
                return Err(failure(f, g));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5ba2_e_u64 ^ (map.k as u64) << 8);
    for _ in 0..opts.random_pairs {
        let f = random_poly(pres, &mut rng, opts.degree, 3);
        let g = random_poly(pres, &mut rng, opts.degree, 3);
        if !check_pair(&f, &g)? {
            return Err(failure(&f, &g));
        }
    }
    Ok(())
}

/// Builds sigma_bar_k after verifying the commuting/annihilation hypothesis
/// bundle exhaustively on R and the homomorphism law on a polynomial sample.
pub fn extend_sigma(
    pres: &Arc<PbwPresentation>,
    k: usize,
    opts: &ExtendOptions,
) -> Result<ExtendedMap, PbwError> {
    check_extension_hypotheses(pres)?;
    let map = ExtendedMap { pres: pres.clone(), kind: BarKind::Sigma, k };
    sample_pairs_check(pres, &map, opts)?;
    Ok(map)
}

/// Builds delta_bar_k under the same hypothesis bundle, verifying the twisted
/// Leibniz law on the sample.
pub fn extend_delta(
    pres: &Arc<PbwPresentation>,
    k: usize,
    opts: &ExtendOptions,
) -> Result<ExtendedMap, PbwError> {
    check_extension_hypotheses(pres)?;
    let map = ExtendedMap { pres: pres.clone(), kind: BarKind::Delta, k };
    sample_pairs_check(pres, &map, opts)?;
    Ok(map)
}

/// Parameters for the empirical consistency test.
#[derive(Copy, Clone, Debug)]
pub struct ValidateOptions {
    pub random_triples: usize,
    pub degree: u32,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { random_triples: 10_000, degree: 3, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub exhaustive_triples: u64,
    pub random_triples: u64,
    pub degree: u32,
    pub route_cross_checks: u64,
}

impl PbwPresentation {
    /// Empirical consistency: associativity of the product on all triples of
    /// coefficient-times-degree<=1 monomials, plus seeded random triples up
    /// to `degree`, with normalize/mul cross-checks along the way.
    pub fn validate(&self, opts: &ValidateOptions) -> Result<ConsistencyReport, PbwError> {
        let ring = &self.ring;
        let n = self.n;
        let mut basis = Vec::new();
        for r in ring.elements() {
            if r == ring.zero() {
                continue;
            }
            basis.push(self.constant(r));
            for i in 0..n {
                basis.push(self.monomial(MultiIndex::unit(n, i), r));
            }
        }
        let mut exhaustive = 0u64;
        for f in &basis {
            for g in &basis {
                let fg = self.mul(f, g)?;
                for h in &basis {
                    exhaustive += 1;
                    let left = self.mul(&fg, h)?;
                    let right = self.mul(f, &self.mul(g, h)?)?;
                    if left != right {
                        return Err(PbwError::Associativity(format!(
                            "(f g) h != f (g h) for f = {}, g = {}, h = {}",
                            f.render(ring, n),
                            g.render(ring, n),
                            h.render(ring, n)
                        )));
                    }
                }
            }
        }
        // identity on the basis sample
        let one = self.one();
        for f in &basis {
            if self.mul(f, &one)? != *f || self.mul(&one, f)? != *f {
                return Err(PbwError::Associativity(format!(
                    "1 is not an identity at {}",
                    f.render(ring, n)
                )));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xa550c);
        let mut cross = 0u64;
        for t in 0..opts.random_triples {
            let f = random_poly(self, &mut rng, opts.degree, 3);
            let g = random_poly(self, &mut rng, opts.degree, 3);
            let h = random_poly(self, &mut rng, opts.degree, 3);
            let left = self.mul(&self.mul(&f, &g)?, &h)?;
            let right = self.mul(&f, &self.mul(&g, &h)?)?;
            if left != right {
                return Err(PbwError::Associativity(format!(
                    "(f g) h != f (g h) for random triple #{t}: f = {}, g = {}, h = {}",
                    f.render(ring, n),
                    g.render(ring, n),
                    h.render(ring, n)
                )));
            }
            // every 16th triple, cross-check the product against the rewriter
            if t % 16 == 0 {
                cross += 1;
                let expr = rewrite::PbwExpr::mul(vec![
                    rewrite::PbwExpr::from_poly(&f),
                    rewrite::PbwExpr::from_poly(&g),
                ]);
                let via_rewrite = rewrite::normalize(self, &expr)?;
                if via_rewrite != self.mul(&f, &g)? {
                    return Err(PbwError::RouteDisagreement(format!(
                        "mul and normalize disagree on f = {}, g = {}",
                        f.render(ring, n),
                        g.render(ring, n)
                    )));
                }
            }
        }
        Ok(ConsistencyReport {
            exhaustive_triples: exhaustive,
            random_triples: opts.random_triples as u64,
            degree: opts.degree,
            route_cross_checks: cross,
        })
    }
}

#[cfg(test)]
mod tests;
