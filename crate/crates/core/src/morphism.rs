//! Ring endomorphisms and sigma-derivations as validated image tables, the
//! composition closure of a family (the exact quantifier domain for "for all
//! alpha in N^n"), and the compatibility / rigidity deciders built on it.

use crate::report::{BoundsRecord, PropertyId, PropertyReport, Side, Verdict, Witness};
use crate::ring::{Elem, FiniteRing, RingError};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("table length {0} does not match carrier size {1}")]
    BadLength(usize, usize),
    #[error("not a ring endomorphism: {0}")]
    NotEndomorphism(String),
    #[error("not a sigma-derivation: {0}")]
    NotDerivation(String),
    #[error("family is empty")]
    EmptyFamily,
    #[error("derivation count {0} does not match endomorphism count {1}")]
    FamilyMismatch(usize, usize),
    #[error("composition closure exceeded {0} maps")]
    ClosureExplosion(usize),
    #[error("{0}")]
    Ring(#[from] RingError),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

/// One axiom violation found while validating a map table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapViolation {
    pub axiom: String,
    pub witness: Vec<usize>,
    pub rendered: String,
}

/// Validation outcome for a would-be endomorphism or derivation table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapReport {
    pub valid: bool,
    pub injective: bool,
    pub violations: Vec<MapViolation>,
}

/// Checks additivity, multiplicativity and unitality of `table` exhaustively;
/// every violated axiom is reported with a witness pair.
pub fn check_endomorphism(ring: &FiniteRing, table: &[usize]) -> MapReport {
    let mut violations = Vec::new();
    if table.len() != ring.size() || table.iter().any(|&v| v >= ring.size()) {
        return MapReport {
            valid: false,
            injective: false,
            violations: vec![MapViolation {
                axiom: "table indexes the carrier".into(),
                witness: vec![],
                rendered: format!("length {} for carrier {}", table.len(), ring.size()),
            }],
        };
    }
    let f = |a: Elem| Elem(table[a.0]);
    for a in ring.elements() {
        for b in ring.elements() {
            if f(ring.add(a, b)) != ring.add(f(a), f(b)) {
                violations.push(MapViolation {
                    axiom: "f(a+b) = f(a)+f(b)".into(),
                    witness: vec![a.0, b.0],
                    rendered: format!("a = {}, b = {}", ring.name(a), ring.name(b)),
                });
            }
            if f(ring.mul(a, b)) != ring.mul(f(a), f(b)) {
                violations.push(MapViolation {
                    axiom: "f(ab) = f(a)f(b)".into(),
                    witness: vec![a.0, b.0],
                    rendered: format!("a = {}, b = {}", ring.name(a), ring.name(b)),
                });
            }
            if violations.len() > 16 {
                break;
            }
        }
        if violations.len() > 16 {
            break;
        }
    }
    if f(ring.one()) != ring.one() {
        violations.push(MapViolation {
            axiom: "f(1) = 1".into(),
            witness: vec![ring.one().0],
            rendered: format!("f(1) = {}", ring.name(f(ring.one()))),
        });
    }
    let mut seen = vec![false; ring.size()];
    let mut injective = true;
    for &v in table {
        if seen[v] {
            injective = false;
        }
        seen[v] = true;
    }
    MapReport { valid: violations.is_empty(), injective, violations }
}

/// Checks additivity and the twisted Leibniz rule d(ab) = sigma(a)d(b) + d(a)b.
/// d(1) = 0 is forced by the Leibniz rule and reported explicitly when violated.
pub fn check_sigma_derivation(ring: &FiniteRing, sigma: &RingMap, table: &[usize]) -> MapReport {
    let mut violations = Vec::new();
    if table.len() != ring.size() || table.iter().any(|&v| v >= ring.size()) {
        return MapReport {
            valid: false,
            injective: false,
            violations: vec![MapViolation {
                axiom: "table indexes the carrier".into(),
                witness: vec![],
                rendered: format!("length {} for carrier {}", table.len(), ring.size()),
            }],
        };
    }
    let d = |a: Elem| Elem(table[a.0]);
    if d(ring.one()) != ring.zero() {
        violations.push(MapViolation {
            axiom: "d(1) = 0".into(),
            witness: vec![ring.one().0, ring.one().0],
            rendered: format!("d(1) = {}", ring.name(d(ring.one()))),
        });
    }
    for a in ring.elements() {
        for b in ring.elements() {
            if d(ring.add(a, b)) != ring.add(d(a), d(b)) {
                violations.push(MapViolation {
                    axiom: "d(a+b) = d(a)+d(b)".into(),
                    witness: vec![a.0, b.0],
                    rendered: format!("a = {}, b = {}", ring.name(a), ring.name(b)),
                });
            }
            let lhs = d(ring.mul(a, b));
            let rhs = ring.add(ring.mul(sigma.apply(a), d(b)), ring.mul(d(a), b));
            if lhs != rhs {
                violations.push(MapViolation {
                    axiom: "d(ab) = sigma(a)d(b) + d(a)b".into(),
                    witness: vec![a.0, b.0],
                    rendered: format!("a = {}, b = {}", ring.name(a), ring.name(b)),
                });
            }
            if violations.len() > 16 {
                break;
            }
        }
        if violations.len() > 16 {
            break;
        }
    }
    MapReport { valid: violations.is_empty(), injective: false, violations }
}

/// A validated unital ring endomorphism of one fixed finite ring.
#[derive(Clone)]
pub struct RingMap {
    ring: Arc<FiniteRing>,
    table: Vec<usize>,
    injective: bool,
}

impl std::fmt::Debug for RingMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RingMap({:?})", self.table)
    }
}

impl PartialEq for RingMap {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table && self.ring.digest() == other.ring.digest()
    }
}

impl RingMap {
    pub fn endomorphism(ring: Arc<FiniteRing>, table: Vec<usize>) -> Result<Self, MapError> {
        let report = check_endomorphism(&ring, &table);
        if !report.valid {
            return Err(MapError::NotEndomorphism(
                report.violations.first().map(|v| format!("{}: {}", v.axiom, v.rendered)).unwrap_or_default(),
            ));
        }
        Ok(RingMap { ring, table, injective: report.injective })
    }

    pub fn identity(ring: Arc<FiniteRing>) -> Self {
        let table = (0..ring.size()).collect();
        RingMap { ring, table, injective: true }
    }

    /// Builds f from images of carrier generators by evaluating every
    /// element's defining polynomial expression; only meaningful for carriers
    /// whose construction is generated by the listed elements.
    pub fn from_generator_images(
        ring: Arc<FiniteRing>,
        gens: &[(Elem, Elem)],
    ) -> Result<Self, MapError> {
        // closure of {0,1, gens} under + and * determines the map on the span
        let mut table: Vec<Option<Elem>> = vec![None; ring.size()];
        table[ring.zero().0] = Some(ring.zero());
        table[ring.one().0] = Some(ring.one());
        for (g, img) in gens {
            table[g.0] = Some(*img);
        }
        loop {
            let mut grew = false;
            let known: Vec<(Elem, Elem)> = table
                .iter()
                .enumerate()
                .filter_map(|(i, v)| v.map(|w| (Elem(i), w)))
                .collect();
            for &(x, fx) in &known {
                for &(y, fy) in &known {
                    for (src, dst) in [
                        (ring.add(x, y), ring.add(fx, fy)),
                        (ring.mul(x, y), ring.mul(fx, fy)),
                    ] {
                        match table[src.0] {
                            None => {
                                table[src.0] = Some(dst);
                                grew = true;
                            }
                            Some(prev) if prev != dst => {
                                return Err(MapError::NotEndomorphism(format!(
                                    "generator images are inconsistent at {}",
                                    ring.name(src)
                                )))
                            }
                            _ => {}
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let table: Vec<usize> = table
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.map(|e| e.0).ok_or_else(|| {
                    MapError::NotEndomorphism(format!(
                        "generators do not span the carrier (element {i} unreached)"
                    ))
                })
            })
            .collect::<Result<_, _>>()?;
        Self::endomorphism(ring, table)
    }

    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        Elem(self.table[a.0])
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn is_injective(&self) -> bool {
        self.injective
    }

    pub fn is_bijective(&self) -> bool {
        // injective self-map of a finite set
        self.injective
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// self after other: (self . other)(x) = self(other(x)).
    pub fn compose(&self, other: &RingMap) -> RingMap {
        let table = other.table.iter().map(|&x| self.table[x]).collect();
        RingMap {
            ring: self.ring.clone(),
            table,
            injective: self.injective && other.injective,
        }
    }

    /// Single-map compatibility: ab = 0 iff a f(b) = 0 for all a, b.
    pub fn is_compatible_map(&self) -> bool {
        let r = &self.ring;
        r.elements().all(|a| {
            r.elements().all(|b| {
                (r.mul(a, b) == r.zero()) == (r.mul(a, self.apply(b)) == r.zero())
            })
        })
    }
}

/// A validated sigma-derivation table paired with its twisting endomorphism.
#[derive(Clone, Debug)]
pub struct SigmaDerivation {
    sigma: RingMap,
    table: Vec<usize>,
}

impl SigmaDerivation {
    pub fn new(ring: Arc<FiniteRing>, sigma: RingMap, table: Vec<usize>) -> Result<Self, MapError> {
        let report = check_sigma_derivation(&ring, &sigma, &table);
        if !report.valid {
            return Err(MapError::NotDerivation(
                report.violations.first().map(|v| format!("{}: {}", v.axiom, v.rendered)).unwrap_or_default(),
            ));
        }
        Ok(SigmaDerivation { sigma, table })
    }

    pub fn zero(ring: Arc<FiniteRing>, sigma: RingMap) -> Self {
        let table = vec![ring.zero().0; ring.size()];
        SigmaDerivation { sigma, table }
    }

    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        Elem(self.table[a.0])
    }

    pub fn sigma(&self) -> &RingMap {
        &self.sigma
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        let z = self.sigma.ring().zero().0;
        self.table.iter().all(|&v| v == z)
    }
}

/// An ordered family Sigma = {sigma_1, ..., sigma_n}.
#[derive(Clone, Debug)]
pub struct EndoFamily {
    ring: Arc<FiniteRing>,
    sigmas: Vec<RingMap>,
}

impl EndoFamily {
    pub fn new(ring: Arc<FiniteRing>, sigmas: Vec<RingMap>) -> Result<Self, MapError> {
        if sigmas.is_empty() {
            return Err(MapError::EmptyFamily);
        }
        for s in &sigmas {
            if s.ring().digest() != ring.digest() {
                return Err(MapError::Inconsistency("family maps live on different rings".into()));
            }
        }
        Ok(EndoFamily { ring, sigmas })
    }

    pub fn identity(ring: Arc<FiniteRing>) -> Self {
        let id = RingMap::identity(ring.clone());
        EndoFamily { ring, sigmas: vec![id] }
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    pub fn maps(&self) -> &[RingMap] {
        &self.sigmas
    }

    pub fn get(&self, i: usize) -> &RingMap {
        &self.sigmas[i]
    }

    pub fn all_injective(&self) -> bool {
        self.sigmas.iter().all(|s| s.is_injective())
    }

    pub fn closure(&self) -> Result<MonoidClosure, MapError> {
        MonoidClosure::compute(self)
    }
}

/// Derivations delta_1..delta_n paired index-wise with an [`EndoFamily`].
#[derive(Clone, Debug)]
pub struct DerivationFamily {
    deltas: Vec<SigmaDerivation>,
}

impl DerivationFamily {
    pub fn new(family: &EndoFamily, deltas: Vec<SigmaDerivation>) -> Result<Self, MapError> {
        if deltas.len() != family.len() {
            return Err(MapError::FamilyMismatch(deltas.len(), family.len()));
        }
        for (i, d) in deltas.iter().enumerate() {
            if d.sigma().table() != family.get(i).table() {
                return Err(MapError::Inconsistency(format!(
                    "delta_{} is not paired with sigma_{}",
                    i + 1,
                    i + 1
                )));
            }
        }
        Ok(DerivationFamily { deltas })
    }

    pub fn zero(family: &EndoFamily) -> Self {
        let deltas = family
            .maps()
            .iter()
            .map(|s| SigmaDerivation::zero(family.ring().clone(), s.clone()))
            .collect();
        DerivationFamily { deltas }
    }

    pub fn deltas(&self) -> &[SigmaDerivation] {
        &self.deltas
    }

    pub fn get(&self, i: usize) -> &SigmaDerivation {
        &self.deltas[i]
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn all_zero(&self) -> bool {
        self.deltas.iter().all(|d| d.is_zero())
    }
}

/// One map in a composition closure: its table, a witness word over the
/// generators (empty = identity) and whether some word of length >= 1
/// realizes it.
#[derive(Clone, Debug)]
pub struct ClosureMap {
    pub table: Vec<usize>,
    pub word: Vec<usize>,
    pub nonzero_word: bool,
}

impl ClosureMap {
    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        Elem(self.table[a.0])
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &v)| i == v)
    }
}

const CLOSURE_CAP: usize = 65536;

/// The finite monoid of self-maps generated by a family under composition.
///
/// Every composed power sigma^alpha equals a stored map, so quantifying over
/// the stored maps realizes "for all alpha in N^n" exactly; the nonzero-word
/// flag realizes "alpha != 0" (a map equal to the identity but reachable by a
/// nonzero word is quantified over).
#[derive(Clone, Debug)]
pub struct MonoidClosure {
    maps: Vec<ClosureMap>,
}

impl MonoidClosure {
    pub fn compute(family: &EndoFamily) -> Result<Self, MapError> {
        let n = family.ring().size();
        let id: Vec<usize> = (0..n).collect();
        let mut maps = vec![ClosureMap { table: id.clone(), word: vec![], nonzero_word: false }];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(id, 0);
        // BFS over left composition by generators: word g . w
        let mut head = 0;
        while head < maps.len() {
            let current = maps[head].clone();
            for (gi, g) in family.maps().iter().enumerate() {
                let composed: Vec<usize> = current.table.iter().map(|&x| g.table()[x]).collect();
                match index.get(&composed) {
                    Some(&k) => maps[k].nonzero_word = true,
                    None => {
                        if maps.len() >= CLOSURE_CAP {
                            return Err(MapError::ClosureExplosion(CLOSURE_CAP));
                        }
                        let mut word = vec![gi];
                        word.extend_from_slice(&current.word);
                        index.insert(composed.clone(), maps.len());
                        maps.push(ClosureMap { table: composed, word, nonzero_word: true });
                    }
                }
            }
            head += 1;
        }
        Ok(MonoidClosure { maps })
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// All maps, identity first; the quantifier domain for alpha in N^n.
    pub fn maps(&self) -> &[ClosureMap] {
        &self.maps
    }

    /// Maps realizable by a word of length >= 1; the domain for alpha != 0.
    pub fn nonzero_maps(&self) -> impl Iterator<Item = &ClosureMap> {
        self.maps.iter().filter(|m| m.nonzero_word)
    }

    pub fn find(&self, table: &[usize]) -> Option<usize> {
        self.maps.iter().position(|m| m.table == table)
    }

    /// Closure property: the composite of any two stored maps is stored.
    pub fn is_monoid(&self) -> bool {
        self.maps.iter().all(|f| {
            self.maps.iter().all(|g| {
                let composed: Vec<usize> = g.table.iter().map(|&x| f.table[x]).collect();
                self.find(&composed).is_some()
            })
        })
    }

    /// Applies sigma^alpha for an explicit exponent vector, composing family
    /// generators in the order sigma_1^{a1} . ... . sigma_n^{an}.
    pub fn apply_alpha(family: &EndoFamily, alpha: &[usize], x: Elem) -> Elem {
        let mut v = x;
        // rightmost factor acts first
        for i in (0..family.len()).rev() {
            for _ in 0..alpha[i] {
                v = family.get(i).apply(v);
            }
        }
        v
    }
}

/// A letter in a mixed composition word.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Letter {
    Sigma(usize),
    Delta(usize),
}

/// One map in the mixed sigma/delta word closure.
#[derive(Clone, Debug)]
pub struct MixedMap {
    pub table: Vec<usize>,
    pub word: Vec<Letter>,
    pub has_delta: bool,
    pub nonzero_word: bool,
}

impl MixedMap {
    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        Elem(self.table[a.0])
    }
}

/// Closure of all composition words over Sigma and Delta, to a fixpoint on
/// function tables. Delta-style quantifiers range over the maps realizable
/// with at least one delta letter.
#[derive(Clone, Debug)]
pub struct MixedClosure {
    maps: Vec<MixedMap>,
}

impl MixedClosure {
    pub fn compute(family: &EndoFamily, deltas: &DerivationFamily) -> Result<Self, MapError> {
        let n = family.ring().size();
        let id: Vec<usize> = (0..n).collect();
        let mut maps =
            vec![MixedMap { table: id.clone(), word: vec![], has_delta: false, nonzero_word: false }];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(id, 0);
        let letters: Vec<(Letter, Vec<usize>)> = family
            .maps()
            .iter()
            .enumerate()
            .map(|(i, s)| (Letter::Sigma(i), s.table().to_vec()))
            .chain(
                deltas
                    .deltas()
                    .iter()
                    .enumerate()
                    .map(|(i, d)| (Letter::Delta(i), d.table().to_vec())),
            )
            .collect();
        let mut head = 0;
        while head < maps.len() {
            let current = maps[head].clone();
            for (letter, table) in &letters {
                let composed: Vec<usize> = current.table.iter().map(|&x| table[x]).collect();
                let has_delta = current.has_delta || matches!(letter, Letter::Delta(_));
                match index.get(&composed) {
                    Some(&k) => {
                        maps[k].nonzero_word = true;
                        if has_delta && !maps[k].has_delta {
                            maps[k].has_delta = true;
                        }
                    }
                    None => {
                        if maps.len() >= CLOSURE_CAP {
                            return Err(MapError::ClosureExplosion(CLOSURE_CAP));
                        }
                        let mut word = vec![*letter];
                        word.extend_from_slice(&current.word);
                        index.insert(composed.clone(), maps.len());
                        maps.push(MixedMap { table: composed, word, has_delta, nonzero_word: true });
                    }
                }
            }
            head += 1;
        }
        Ok(MixedClosure { maps })
    }

    pub fn maps(&self) -> &[MixedMap] {
        &self.maps
    }

    pub fn delta_maps(&self) -> impl Iterator<Item = &MixedMap> {
        self.maps.iter().filter(|m| m.has_delta)
    }
}

fn word_string(word: &[usize]) -> String {
    if word.is_empty() {
        "id".into()
    } else {
        word.iter().map(|i| format!("s{}", i + 1)).collect::<Vec<_>>().join(".")
    }
}

fn report(
    property: PropertyId,
    subject: &str,
    verdict: Verdict,
    count: u64,
) -> PropertyReport {
    PropertyReport::new(property, subject, verdict, count)
}

/// Sigma-compatibility: ab = 0 iff a sigma^alpha(b) = 0 over the whole
/// closure monoid, cross-asserted against the per-generator criterion
/// (the two must agree; disagreement signals a decider bug).
pub fn decide_sigma_compatible(
    ring: &FiniteRing,
    family: &EndoFamily,
) -> Result<PropertyReport, MapError> {
    let closure = family.closure()?;
    let zero = ring.zero();
    let mut count = 0u64;
    let mut verdict = Verdict::Holds;
    'outer: for m in closure.maps() {
        for a in ring.elements() {
            for b in ring.elements() {
                count += 1;
                let plain = ring.mul(a, b) == zero;
                let twisted = ring.mul(a, m.apply(b)) == zero;
                if plain != twisted {
                    let eq = if plain {
                        "ab = 0 but a.sigma(b) != 0"
                    } else {
                        "a.sigma(b) = 0 but ab != 0"
                    };
                    verdict = Verdict::Fails {
                        witness: Witness::new(eq)
                            .item("a", a.0, ring.name(a))
                            .item("b", b.0, ring.name(b))
                            .word("sigma", m.word.clone())
                            .detail(format!("sigma = {}", word_string(&m.word))),
                    };
                    break 'outer;
                }
            }
        }
    }
    // independent criterion: compatible iff every generator is compatible
    let per_generator = family.maps().iter().all(|s| s.is_compatible_map());
    if per_generator != verdict.holds() {
        return Err(MapError::Inconsistency(format!(
            "closure criterion says {} but per-generator criterion says {}",
            verdict.holds(),
            per_generator
        )));
    }
    Ok(report(PropertyId::SigmaCompatible, ring.provenance(), verdict, count))
}

/// Delta-compatibility: ab = 0 implies a w(b) = 0 for every mixed word w
/// containing at least one delta (pure delta powers included).
pub fn decide_delta_compatible(
    ring: &FiniteRing,
    family: &EndoFamily,
    deltas: &DerivationFamily,
) -> Result<PropertyReport, MapError> {
    let mixed = MixedClosure::compute(family, deltas)?;
    let zero = ring.zero();
    let mut count = 0u64;
    for m in mixed.delta_maps() {
        for a in ring.elements() {
            for b in ring.elements() {
                count += 1;
                if ring.mul(a, b) == zero && ring.mul(a, m.apply(b)) != zero {
                    let w: Vec<usize> = m
                        .word
                        .iter()
                        .map(|l| match l {
                            Letter::Sigma(i) => *i,
                            Letter::Delta(i) => *i,
                        })
                        .collect();
                    let rendered: Vec<String> = m
                        .word
                        .iter()
                        .map(|l| match l {
                            Letter::Sigma(i) => format!("s{}", i + 1),
                            Letter::Delta(i) => format!("d{}", i + 1),
                        })
                        .collect();
                    return Ok(report(
                        PropertyId::DeltaCompatible,
                        ring.provenance(),
                        Verdict::Fails {
                            witness: Witness::new("ab = 0 but a.delta(b) != 0")
                                .item("a", a.0, ring.name(a))
                                .item("b", b.0, ring.name(b))
                                .word("delta_word", w)
                                .detail(format!("word = {}", rendered.join("."))),
                        },
                        count,
                    ));
                }
            }
        }
    }
    Ok(report(PropertyId::DeltaCompatible, ring.provenance(), Verdict::Holds, count))
}

/// Weak sigma-compatibility: ab in N(R) iff a sigma^alpha(b) in N(R).
pub fn decide_weak_sigma_compatible(
    ring: &FiniteRing,
    family: &EndoFamily,
) -> Result<PropertyReport, MapError> {
    let closure = family.closure()?;
    let nil = ring.nilpotents();
    let mut count = 0u64;
    for m in closure.maps() {
        for a in ring.elements() {
            for b in ring.elements() {
                count += 1;
                let plain = nil.contains(ring.mul(a, b));
                let twisted = nil.contains(ring.mul(a, m.apply(b)));
                if plain != twisted {
                    let eq = if plain {
                        "ab in N(R) but a.sigma(b) not in N(R)"
                    } else {
                        "a.sigma(b) in N(R) but ab not in N(R)"
                    };
                    return Ok(report(
                        PropertyId::WeakSigmaCompatible,
                        ring.provenance(),
                        Verdict::Fails {
                            witness: Witness::new(eq)
                                .item("a", a.0, ring.name(a))
                                .item("b", b.0, ring.name(b))
                                .word("sigma", m.word.clone()),
                        },
                        count,
                    ));
                }
            }
        }
    }
    Ok(report(PropertyId::WeakSigmaCompatible, ring.provenance(), Verdict::Holds, count))
}

/// Weak delta-compatibility: ab in N(R) implies a w(b) in N(R) for every
/// delta-containing word w.
pub fn decide_weak_delta_compatible(
    ring: &FiniteRing,
    family: &EndoFamily,
    deltas: &DerivationFamily,
) -> Result<PropertyReport, MapError> {
    let mixed = MixedClosure::compute(family, deltas)?;
    let nil = ring.nilpotents();
    let mut count = 0u64;
    for m in mixed.delta_maps() {
        for a in ring.elements() {
            for b in ring.elements() {
                count += 1;
                if nil.contains(ring.mul(a, b)) && !nil.contains(ring.mul(a, m.apply(b))) {
                    return Ok(report(
                        PropertyId::WeakDeltaCompatible,
                        ring.provenance(),
                        Verdict::Fails {
                            witness: Witness::new("ab in N(R) but a.delta(b) not in N(R)")
                                .item("a", a.0, ring.name(a))
                                .item("b", b.0, ring.name(b)),
                        },
                        count,
                    ));
                }
            }
        }
    }
    Ok(report(PropertyId::WeakDeltaCompatible, ring.provenance(), Verdict::Holds, count))
}

/// Rigidity: a sigma^alpha(a) = 0 implies a = 0, alpha ranging over all of
/// N^n including zero.
pub fn decide_sigma_rigid(
    ring: &FiniteRing,
    family: &EndoFamily,
) -> Result<PropertyReport, MapError> {
    let closure = family.closure()?;
    let zero = ring.zero();
    let mut count = 0u64;
    for m in closure.maps() {
        for a in ring.elements() {
            if a == zero {
                continue;
            }
            count += 1;
            if ring.mul(a, m.apply(a)) == zero {
                return Ok(report(
                    PropertyId::SigmaRigid,
                    ring.provenance(),
                    Verdict::Fails {
                        witness: Witness::new("a.sigma(a) = 0 with a != 0")
                            .item("a", a.0, ring.name(a))
                            .word("sigma", m.word.clone()),
                    },
                    count,
                ));
            }
        }
    }
    Ok(report(PropertyId::SigmaRigid, ring.provenance(), Verdict::Holds, count))
}

/// Skew reversibility of a single endomorphism: right means ab = 0 forces
/// b sigma(a) = 0; left is the mirror image.
pub fn decide_skew_reversible(
    ring: &FiniteRing,
    sigma: &RingMap,
    side: Side,
) -> PropertyReport {
    let zero = ring.zero();
    let mut count = 0u64;
    for a in ring.elements() {
        for b in ring.elements() {
            if ring.mul(a, b) != zero {
                continue;
            }
            count += 1;
            let ok = match side {
                Side::Right => ring.mul(b, sigma.apply(a)) == zero,
                Side::Left => ring.mul(sigma.apply(b), a) == zero,
            };
            if !ok {
                let eq = match side {
                    Side::Right => "ab = 0 but b.sigma(a) != 0",
                    Side::Left => "ab = 0 but sigma(b).a != 0",
                };
                return report(
                    PropertyId::Reversible,
                    ring.provenance(),
                    Verdict::Fails {
                        witness: Witness::new(eq)
                            .item("a", a.0, ring.name(a))
                            .item("b", b.0, ring.name(b)),
                    },
                    count,
                );
            }
        }
    }
    report(PropertyId::Reversible, ring.provenance(), Verdict::Holds, count)
}

/// Bounds record for deciders that are exact; kept for report symmetry.
pub fn exact_bounds() -> BoundsRecord {
    BoundsRecord {
        degree: 0,
        nilpotency_bound: 0,
        middle_degree: 0,
        term_cap: 0,
        seed: 0,
        exhaustive: true,
        candidates: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_ring, RingExpr};

    fn f4z2() -> Arc<FiniteRing> {
        build_ring(&RingExpr::Quot {
            base: Box::new(RingExpr::Gf { p: 2, k: 2, modulus: Some(vec![1, 1, 1]) }),
            modulus: vec![0, 0, 1],
        })
        .unwrap()
    }

    /// sigma_{i,j}: a -> a^i, z -> a^j z on F4[z]/(z^2).
    fn sigma_ij(ring: &Arc<FiniteRing>, i: u32, j: u32) -> RingMap {
        let a = ring.element_by_name("a").unwrap();
        let z = ring.element_by_name("z").unwrap();
        let ai = ring.pow(a, i as usize);
        let ajz = ring.mul(ring.pow(a, j as usize), z);
        RingMap::from_generator_images(ring.clone(), &[(a, ai), (z, ajz)]).unwrap()
    }

    #[test]
    fn identity_is_valid_and_injective() {
        let r = build_ring(&RingExpr::Zmod { n: 4 }).unwrap();
        let rep = check_endomorphism(&r, &[0, 1, 2, 3]);
        assert!(rep.valid && rep.injective);
    }

    #[test]
    fn six_maps_are_endomorphisms() {
        let r = f4z2();
        for i in 1..=2 {
            for j in 0..=2 {
                let m = sigma_ij(&r, i, j);
                assert!(m.is_injective(), "sigma_{i}{j}");
            }
        }
    }

    #[test]
    fn six_map_closure_is_the_family_with_identity_sigma_10() {
        let r = f4z2();
        let maps: Vec<RingMap> =
            (1..=2).flat_map(|i| (0..=2).map(move |j| (i, j))).map(|(i, j)| sigma_ij(&r, i, j)).collect();
        let fam = EndoFamily::new(r.clone(), maps.clone()).unwrap();
        let closure = fam.closure().unwrap();
        assert_eq!(closure.len(), 6);
        assert!(closure.is_monoid());
        // identity = sigma_{1,0} is a generator, hence nonzero-word realizable
        let id_idx = closure.find(&(0..r.size()).collect::<Vec<_>>()).unwrap();
        assert!(closure.maps()[id_idx].nonzero_word);
        assert!(maps[0].is_identity());
        // every generator's table is in the closure
        for m in &maps {
            assert!(closure.find(m.table()).is_some());
        }
    }

    #[test]
    fn s2_family_composition_facts() {
        let r = build_ring(&RingExpr::TrivialExt { base: Box::new(RingExpr::Zmod { n: 5 }) }).unwrap();
        let bs = 5;
        let dec = |i: usize| (i / bs, i % bs);
        let enc = |r_: usize, m: usize| r_ * bs + m;
        let sigma2: Vec<usize> = (0..25).map(|i| { let (a, b) = dec(i); enc(a, (5 - b) % 5) }).collect();
        let sigma3: Vec<usize> = (0..25).map(|i| { let (a, _) = dec(i); enc(a, 0) }).collect();
        let s2 = RingMap::endomorphism(r.clone(), sigma2).unwrap();
        let s3 = RingMap::endomorphism(r.clone(), sigma3).unwrap();
        assert_eq!(s2.compose(&s3).table(), s3.compose(&s2).table());
        assert_eq!(s2.compose(&s3).table(), s3.table());
        assert!(s2.compose(&s2).is_identity());
        let fam = EndoFamily::new(r.clone(), vec![RingMap::identity(r.clone()), s2, s3]).unwrap();
        let closure = fam.closure().unwrap();
        assert_eq!(closure.len(), 3);
        assert!(closure.is_monoid());
    }

    #[test]
    fn compatibility_fails_on_s2_with_sigma3() {
        let r = build_ring(&RingExpr::TrivialExt { base: Box::new(RingExpr::Zmod { n: 5 }) }).unwrap();
        let sigma3: Vec<usize> = (0..25).map(|i| (i / 5) * 5).collect();
        let s3 = RingMap::endomorphism(r.clone(), sigma3).unwrap();
        let fam = EndoFamily::new(r.clone(), vec![s3]).unwrap();
        let rep = decide_sigma_compatible(&r, &fam).unwrap();
        assert!(rep.verdict.fails());
        // the paper's pair A = (1,1), B = (0,1) is itself a violation
        let a = Elem(1 * 5 + 1);
        let b = Elem(0 * 5 + 1);
        let s3b = Elem((b.0 / 5) * 5);
        assert_eq!(r.mul(a, s3b), r.zero());
        assert_ne!(r.mul(a, b), r.zero());
    }

    #[test]
    fn six_map_family_is_compatible() {
        let r = f4z2();
        let maps: Vec<RingMap> =
            (1..=2).flat_map(|i| (0..=2).map(move |j| (i, j))).map(|(i, j)| sigma_ij(&r, i, j)).collect();
        let fam = EndoFamily::new(r.clone(), maps).unwrap();
        assert!(decide_sigma_compatible(&r, &fam).unwrap().verdict.holds());
        assert!(decide_weak_sigma_compatible(&r, &fam).unwrap().verdict.holds());
    }

    #[test]
    fn derivation_validation() {
        let r = build_ring(&RingExpr::Quot { base: Box::new(RingExpr::Zmod { n: 2 }), modulus: vec![0, 0, 1] }).unwrap();
        let id = RingMap::identity(r.clone());
        // formal d/dz: 0,1,z,1+z -> 0,0,1,1
        let z = r.element_by_name("z").unwrap();
        let one = r.one();
        let table: Vec<usize> = r
            .elements()
            .map(|e| {
                if e == z { one.0 } else if e == r.add(one, z) { one.0 } else { r.zero().0 }
            })
            .collect();
        let d = SigmaDerivation::new(r.clone(), id.clone(), table).unwrap();
        assert!(!d.is_zero());
        // delta(a) = 2a over Z4 is rejected: delta(1) = 2 != 0
        let r4 = build_ring(&RingExpr::Zmod { n: 4 }).unwrap();
        let id4 = RingMap::identity(r4.clone());
        let rep = check_sigma_derivation(&r4, &id4, &[0, 2, 0, 2]);
        assert!(!rep.valid);
        assert!(rep.violations.iter().any(|v| v.axiom == "d(1) = 0"));
    }

    #[test]
    fn ddz_not_delta_compatible_in_char2() {
        let r = build_ring(&RingExpr::Quot { base: Box::new(RingExpr::Zmod { n: 2 }), modulus: vec![0, 0, 1] }).unwrap();
        let id = RingMap::identity(r.clone());
        let z = r.element_by_name("z").unwrap();
        let one = r.one();
        let table: Vec<usize> = r
            .elements()
            .map(|e| if e == z || e == r.add(one, z) { one.0 } else { r.zero().0 })
            .collect();
        let d = SigmaDerivation::new(r.clone(), id.clone(), table).unwrap();
        let fam = EndoFamily::new(r.clone(), vec![id]).unwrap();
        let deltas = DerivationFamily::new(&fam, vec![d]).unwrap();
        let rep = decide_delta_compatible(&r, &fam, &deltas).unwrap();
        assert!(rep.verdict.fails());
        // zero family is always delta-compatible
        let zero = DerivationFamily::zero(&fam);
        assert!(decide_delta_compatible(&r, &fam, &zero).unwrap().verdict.holds());
    }

    #[test]
    fn rigidity_examples() {
        let f4 = build_ring(&RingExpr::Gf { p: 2, k: 2, modulus: Some(vec![1, 1, 1]) }).unwrap();
        let frob: Vec<usize> = f4.elements().map(|e| f4.mul(e, e).0).collect();
        let fam = EndoFamily::new(f4.clone(), vec![RingMap::endomorphism(f4.clone(), frob).unwrap()]).unwrap();
        assert!(decide_sigma_rigid(&f4, &fam).unwrap().verdict.holds());

        let z4 = build_ring(&RingExpr::Zmod { n: 4 }).unwrap();
        let fam = EndoFamily::identity(z4.clone());
        let rep = decide_sigma_rigid(&z4, &fam).unwrap();
        match &rep.verdict {
            Verdict::Fails { witness } => assert_eq!(witness.items[0].index, 2),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn skew_reversible_on_commutative_identity() {
        let z4 = build_ring(&RingExpr::Zmod { n: 4 }).unwrap();
        let id = RingMap::identity(z4.clone());
        assert!(decide_skew_reversible(&z4, &id, Side::Right).verdict.holds());
        assert!(decide_skew_reversible(&z4, &id, Side::Left).verdict.holds());
    }

    #[test]
    fn closure_maps_preserve_nilpotents() {
        let r = f4z2();
        let maps: Vec<RingMap> =
            (1..=2).flat_map(|i| (0..=2).map(move |j| (i, j))).map(|(i, j)| sigma_ij(&r, i, j)).collect();
        let fam = EndoFamily::new(r.clone(), maps).unwrap();
        let closure = fam.closure().unwrap();
        let nil = r.nilpotents();
        for m in closure.maps() {
            for a in nil.iter() {
                assert!(nil.contains(m.apply(a)));
            }
        }
    }

    #[test]
    fn generator_images_reject_inconsistent_data() {
        let r = f4z2();
        let a = r.element_by_name("a").unwrap();
        let z = r.element_by_name("z").unwrap();
        // a -> z is not multiplicative (a^3 = 1 but z^3 = 0)
        assert!(RingMap::from_generator_images(r.clone(), &[(a, z), (z, z)]).is_err());
    }
}
