//! Bounded counterexample searches over A: nilpotency within an exponent
//! bound, the coefficient-nilpotency containment N(A) <= N(R)A, the (SQA1)
//! annihilator condition, and A-level (skew) reflexive / RNP properties.
//!
//! These are semi-decisions: N(A) and "fAg = 0" quantify over an infinite
//! ring, so verdicts are either definitive failures (for searches whose hits
//! re-check exactly), unconfirmed candidates, or bounded passes carrying the
//! search parameters.

use super::{ExtendedMap, MultiIndex, PbwError, PbwPoly, PbwPresentation};
use crate::report::{BoundsRecord, PropertyId, PropertyReport, Verdict, Witness};
use crate::ring::Elem;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// All exponent vectors with |alpha| <= degree, in ascending deg-lex order.
pub fn monomials_up_to(n: usize, degree: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = MultiIndex::zero(n);
    fn rec(out: &mut Vec<MultiIndex>, cur: &mut MultiIndex, pos: usize, left: u32) {
        if pos == cur.0.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.0[pos] = e;
            rec(out, cur, pos + 1, left - e);
        }
        cur.0[pos] = 0;
    }
    rec(&mut out, &mut cur, 0, degree);
    out.sort();
    out.dedup();
    out
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum NilpotencyVerdict {
    Nilpotent(u32),
    NotWithin(u32),
}

/// Semi-decision for f in N(A): walks powers up to the bound.
pub fn is_nilpotent_bounded(
    pres: &PbwPresentation,
    f: &PbwPoly,
    bound: u32,
) -> Result<NilpotencyVerdict, PbwError> {
    let mut g = f.clone();
    for k in 1..=bound {
        if g.is_zero() {
            return Ok(NilpotencyVerdict::Nilpotent(k));
        }
        g = pres.mul(&g, f)?;
    }
    Ok(NilpotencyVerdict::NotWithin(bound))
}

/// Search-space parameters for the bounded checks.
#[derive(Copy, Clone, Debug)]
pub struct BoundedOptions {
    /// Maximum polynomial degree D.
    pub degree: u32,
    /// Nilpotency exponent bound E.
    pub nilpotency: u32,
    /// Middle-factor degree bound for fAg-style quantifiers.
    pub middle_degree: u32,
    /// Maximum number of monomials in a candidate support (single-polynomial
    /// searches).
    pub term_cap: u32,
    /// Support cap for the pair searches, whose cost is quadratic.
    pub pair_term_cap: u32,
    /// Maximum candidates enumerated per side before switching to sampling.
    pub list_budget: u64,
    /// Maximum (f, g) pairs tested.
    pub pair_budget: u64,
    pub seed: u64,
}

impl Default for BoundedOptions {
    fn default() -> Self {
        BoundedOptions {
            degree: 2,
            nilpotency: 8,
            middle_degree: 2,
            term_cap: 3,
            pair_term_cap: 2,
            list_budget: 500_000,
            pair_budget: 20_000,
            seed: 0,
        }
    }
}

impl BoundedOptions {
    fn record(&self, exhaustive: bool, candidates: u64) -> BoundsRecord {
        BoundsRecord {
            degree: self.degree,
            nilpotency_bound: self.nilpotency,
            middle_degree: self.middle_degree,
            term_cap: self.term_cap,
            seed: self.seed,
            exhaustive,
            candidates,
        }
    }
}

struct CandidateSet {
    polys: Vec<PbwPoly>,
    exhaustive: bool,
}

/// Enumerates nonzero polynomials with support size up to the term cap.
/// Full coefficient enumeration only for carriers of at most 16 elements
/// and supports of at most 3 terms; larger spaces are sampled under the
/// recorded seed.
fn candidates(
    pres: &PbwPresentation,
    degree: u32,
    term_cap: u32,
    opts: &BoundedOptions,
    filter: impl Fn(&PbwPoly) -> bool,
) -> CandidateSet {
    let ring = pres.ring();
    let monos = monomials_up_to(pres.generators(), degree);
    let nonzero: Vec<Elem> = ring.elements().filter(|&e| e != ring.zero()).collect();
    let term_cap = term_cap.min(monos.len() as u32).max(1) as usize;
    // size of the full space
    let mut total: u128 = 0;
    let combo_count = |k: usize| -> u128 {
        // C(monos.len(), k)
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * (monos.len() - i) as u128 / (i + 1) as u128;
        }
        c
    };
    for k in 1..=term_cap {
        total += combo_count(k) * (nonzero.len() as u128).pow(k as u32);
    }
    let full = ring.size() <= 16 && term_cap <= 3 && total <= opts.list_budget as u128;
    let mut polys = Vec::new();
    if full {
        let mut combo: Vec<usize> = Vec::new();
        for k in 1..=term_cap {
            combo.clear();
            combo.extend(0..k);
            loop {
                // odometer over nonzero coefficient assignments
                let mut assign = vec![0usize; k];
                loop {
                    let mut p = PbwPoly::zero();
                    for (slot, &mi) in combo.iter().enumerate() {
                        p = pres.add(&p, &pres.monomial(monos[mi].clone(), nonzero[assign[slot]]));
                    }
                    if !p.is_zero() && filter(&p) {
                        polys.push(p);
                    }
                    // advance assignment
                    let mut carry = 0;
                    loop {
                        if carry == k {
                            break;
                        }
                        assign[carry] += 1;
                        if assign[carry] < nonzero.len() {
                            break;
                        }
                        assign[carry] = 0;
                        carry += 1;
                    }
                    if carry == k {
                        break;
                    }
                }
                // advance combination
                let mut i = k;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if combo[i] < monos.len() - (k - i) {
                        combo[i] += 1;
                        for j in i + 1..k {
                            combo[j] = combo[j - 1] + 1;
                        }
                        break;
                    }
                    if i == 0 {
                        combo.clear();
                        break;
                    }
                }
                if combo.is_empty() {
                    break;
                }
            }
        }
        CandidateSet { polys, exhaustive: true }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xcad1da7e);
        let draws = opts.list_budget.min(50_000);
        for _ in 0..draws {
            let k = rng.random_range(1..=term_cap);
            let mut p = PbwPoly::zero();
            for _ in 0..k {
                let m = monos[rng.random_range(0..monos.len())].clone();
                let c = nonzero[rng.random_range(0..nonzero.len())];
                p = pres.add(&p, &pres.monomial(m, c));
            }
            if !p.is_zero() && filter(&p) {
                polys.push(p);
            }
        }
        CandidateSet { polys, exhaustive: false }
    }
}

/// Quick necessary condition for nilpotency within the bound: the deg-lex
/// extreme terms of f^k carry the twisted products c sigma^mu(c) ...
/// interleaved with left-invertible d constants (the extreme monomial pair of
/// a product is unique because the order respects addition), so when all d
/// are central units a never-vanishing chain at either end rules nilpotency
/// out. Returns false when f cannot be nilpotent within the bound.
#[derive(Copy, Clone)]
struct PruneContext {
    d_central_units: bool,
    endomorphism_type: bool,
}

impl PruneContext {
    fn new(pres: &PbwPresentation) -> Self {
        let ring = pres.ring();
        let units = ring.units();
        let center = ring.center();
        let n = pres.generators();
        let d_central_units = (0..n).all(|i| {
            ((i + 1)..n).all(|j| {
                let d = pres.d_of(i, j);
                units.contains(d) && center.contains(d)
            })
        });
        PruneContext { d_central_units, endomorphism_type: pres.classify().endomorphism_type }
    }
}

fn nilpotency_prune(pres: &PbwPresentation, f: &PbwPoly, bound: u32, ctx: PruneContext) -> bool {
    if !ctx.d_central_units {
        return true; // no pruning justified
    }
    let ring = pres.ring();
    let chain_vanishes = |mu: &MultiIndex, c: Elem| -> bool {
        let exp: Vec<usize> = mu.0.iter().map(|&e| e as usize).collect();
        let mut acc = c;
        let mut img = c;
        for _ in 1..bound {
            img = crate::morphism::MonoidClosure::apply_alpha(pres.sigma(), &exp, img);
            acc = ring.mul(acc, img);
            if acc == ring.zero() {
                return true;
            }
        }
        false
    };
    let Some((alpha, a)) = f.leading() else {
        return true; // zero polynomial
    };
    if !chain_vanishes(alpha, a) {
        return false;
    }
    // trailing term: only sound when delta = 0, since derivations push
    // products below the trailing monomial pair
    if ctx.endomorphism_type {
        let (mu, c) = f.trailing().unwrap();
        if !chain_vanishes(mu, c) {
            return false;
        }
    }
    true
}

/// Coefficient-nilpotency containment: hunts a polynomial, nilpotent within
/// the bound, with some coefficient outside N(R). A hit is a definitive
/// counterexample (the nilpotency re-checks exactly); none found is a
/// bounded pass.
pub fn check_skew_cn_bounded(
    pres: &PbwPresentation,
    opts: &BoundedOptions,
) -> Result<PropertyReport, PbwError> {
    let ring = pres.ring();
    let nil = ring.nilpotents();
    let subject = format!("A over {}", ring.provenance());
    let set = candidates(pres, opts.degree, opts.term_cap, opts, |p| {
        p.coefficients().any(|c| !nil.contains(c))
    });
    let ctx = PruneContext::new(pres);
    let mut tested = 0u64;
    for f in &set.polys {
        tested += 1;
        if !nilpotency_prune(pres, f, opts.nilpotency, ctx) {
            continue;
        }
        if let NilpotencyVerdict::Nilpotent(k) = is_nilpotent_bounded(pres, f, opts.nilpotency)? {
            let bad = f.coefficients().find(|c| !nil.contains(*c)).unwrap();
            return Ok(PropertyReport::new(
                PropertyId::Rnp,
                subject,
                Verdict::Fails {
                    witness: Witness::new("f^k = 0 with a coefficient outside N(R)")
                        .item("coefficient", bad.0, ring.name(bad))
                        .detail(format!(
                            "f = {}, f^{k} = 0",
                            f.render(ring, pres.generators())
                        )),
                },
                tested,
            ));
        }
    }
    Ok(PropertyReport::new(
        PropertyId::Rnp,
        subject,
        Verdict::BoundedPass { bounds: opts.record(set.exhaustive, tested) },
        tested,
    ))
}

/// Middle factors for bounded fAg = 0: coefficients range over an additive
/// generating set of R (the map r -> f (r x^gamma) g is additive in r), and
/// exponents over |gamma| <= middle_degree.
fn middle_factors(pres: &PbwPresentation, middle_degree: u32) -> Vec<PbwPoly> {
    let gens = pres.ring().additive_generators();
    let monos = monomials_up_to(pres.generators(), middle_degree);
    let mut out = Vec::new();
    for m in &monos {
        for &u in &gens {
            out.push(pres.monomial(m.clone(), u));
        }
    }
    out
}

fn bounded_two_sided_zero(
    pres: &PbwPresentation,
    f: &PbwPoly,
    middles: &[PbwPoly],
    g: &PbwPoly,
) -> Result<bool, PbwError> {
    if !pres.mul(&pres.mul(f, &pres.one())?, g)?.is_zero() {
        return Ok(false);
    }
    for h in middles {
        if !pres.mul(&pres.mul(f, h)?, g)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

struct PairIter {
    len_f: usize,
    len_g: usize,
    exhaustive: bool,
    budget: u64,
    rng: ChaCha8Rng,
    cursor: u64,
}

impl PairIter {
    fn new(len_f: usize, len_g: usize, budget: u64, seed: u64) -> Self {
        let total = (len_f as u64).saturating_mul(len_g as u64);
        PairIter {
            len_f,
            len_g,
            exhaustive: total <= budget,
            budget,
            rng: ChaCha8Rng::seed_from_u64(seed ^ 0x9a125),
            cursor: 0,
        }
    }
}

impl Iterator for PairIter {
    type Item = (usize, usize);

    fn next(&mut self) -> Option<(usize, usize)> {
        if self.len_f == 0 || self.len_g == 0 || self.cursor >= self.budget {
            return None;
        }
        if self.exhaustive {
            let total = (self.len_f * self.len_g) as u64;
            if self.cursor >= total {
                return None;
            }
            let i = (self.cursor / self.len_g as u64) as usize;
            let j = (self.cursor % self.len_g as u64) as usize;
            self.cursor += 1;
            Some((i, j))
        } else {
            self.cursor += 1;
            Some((
                self.rng.random_range(0..self.len_f),
                self.rng.random_range(0..self.len_g),
            ))
        }
    }
}

/// (SQA1) within bounds: pairs f, g with f h g = 0 for every middle factor of
/// degree <= middle_degree must satisfy a_i R b_j = 0 for all coefficient
/// pairs. Violations are unconfirmed candidates (the middle degree is
/// bounded); none found is a bounded pass.
pub fn check_sqa1_bounded(
    pres: &PbwPresentation,
    fg_degree: u32,
    opts: &BoundedOptions,
) -> Result<PropertyReport, PbwError> {
    let ring = pres.ring();
    let subject = format!("A over {}", ring.provenance());
    let mut o = *opts;
    o.degree = fg_degree;
    let set = candidates(pres, fg_degree, o.pair_term_cap, &o, |_| true);
    let middles = middle_factors(pres, opts.middle_degree);
    let mut pairs_tested = 0u64;
    let exhaustive;
    {
        let it = PairIter::new(set.polys.len(), set.polys.len(), opts.pair_budget, opts.seed);
        exhaustive = set.exhaustive && it.exhaustive;
        for (i, j) in it {
            let (f, g) = (&set.polys[i], &set.polys[j]);
            // fast requirement: f g = 0 (the middle factor 1)
            if !pres.mul(f, g)?.is_zero() {
                continue;
            }
            pairs_tested += 1;
            if !bounded_two_sided_zero(pres, f, &middles, g)? {
                continue;
            }
            for (_, a) in f.iter() {
                for (_, b) in g.iter() {
                    if let Some(r) = ring.elements().find(|&r| ring.mul3(a, r, b) != ring.zero()) {
                        return Ok(PropertyReport::new(
                            PropertyId::Reflexive,
                            subject,
                            Verdict::Candidate {
                                witness: Witness::new("f A g = 0 (bounded) but a_i r b_j != 0")
                                    .item("a_i", a.0, ring.name(a))
                                    .item("b_j", b.0, ring.name(b))
                                    .item("r", r.0, ring.name(r))
                                    .detail(format!(
                                        "f = {}, g = {}",
                                        f.render(ring, pres.generators()),
                                        g.render(ring, pres.generators())
                                    )),
                                bounds: o.record(exhaustive, pairs_tested),
                            },
                            pairs_tested,
                        ));
                    }
                }
            }
        }
    }
    Ok(PropertyReport::new(
        PropertyId::Reflexive,
        subject,
        Verdict::BoundedPass { bounds: o.record(exhaustive, pairs_tested) },
        pairs_tested,
    ))
}

/// Which A-level property a bounded search targets.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum AProperty {
    Reflexive,
    Rnp,
    SigmaBarSkewRnpRight,
}

impl AProperty {
    fn property_id(self) -> PropertyId {
        match self {
            AProperty::Reflexive => PropertyId::Reflexive,
            AProperty::Rnp => PropertyId::Rnp,
            AProperty::SigmaBarSkewRnpRight => PropertyId::SigmaSkewRnpRight,
        }
    }
}

/// Counterexample search for A-level (skew) reflexive / RNP properties:
/// pairs with bounded fAg = 0 whose conclusion product is visibly nonzero
/// are reported as candidates with a full transcript.
pub fn check_a_property_bounded(
    pres: &std::sync::Arc<PbwPresentation>,
    prop: AProperty,
    opts: &BoundedOptions,
) -> Result<PropertyReport, PbwError> {
    let ring = pres.ring().clone();
    let subject = format!("A over {}", ring.provenance());
    let needs_nilpotent = matches!(prop, AProperty::Rnp | AProperty::SigmaBarSkewRnpRight);
    let ctx = PruneContext::new(pres);
    let raw = candidates(pres, opts.degree, opts.pair_term_cap, opts, |_| true);
    let mut polys = Vec::new();
    if needs_nilpotent {
        for f in raw.polys {
            if !nilpotency_prune(pres, &f, opts.nilpotency, ctx) {
                continue;
            }
            if matches!(
                is_nilpotent_bounded(pres, &f, opts.nilpotency)?,
                NilpotencyVerdict::Nilpotent(_)
            ) {
                polys.push(f);
            }
        }
    } else {
        polys = raw.polys;
    }
    let middles = middle_factors(pres, opts.middle_degree);
    let closure = if prop == AProperty::SigmaBarSkewRnpRight {
        Some(pres.sigma().closure()?)
    } else {
        None
    };
    let mut pairs_tested = 0u64;
    let it = PairIter::new(polys.len(), polys.len(), opts.pair_budget, opts.seed ^ 0xa1e);
    let exhaustive = raw.exhaustive && it.exhaustive;
    for (i, j) in it {
        let (f, g) = (&polys[i], &polys[j]);
        if !pres.mul(f, g)?.is_zero() {
            continue;
        }
        pairs_tested += 1;
        if !bounded_two_sided_zero(pres, f, &middles, g)? {
            continue;
        }
        // conclusion side
        let images: Vec<(String, PbwPoly)> = match prop {
            AProperty::Reflexive | AProperty::Rnp => vec![(String::from("id"), f.clone())],
            AProperty::SigmaBarSkewRnpRight => closure
                .as_ref()
                .unwrap()
                .nonzero_maps()
                .map(|m| {
                    (
                        format!("word {:?}", m.word),
                        ExtendedMap::apply_table(pres, &m.table, f),
                    )
                })
                .collect(),
        };
        for (label, img) in &images {
            for h in std::iter::once(&pres.one()).chain(middles.iter()) {
                let t = pres.mul(&pres.mul(g, h)?, img)?;
                if !t.is_zero() {
                    return Ok(PropertyReport::new(
                        prop.property_id(),
                        subject,
                        Verdict::Candidate {
                            witness: Witness::new("f A g = 0 (bounded) but g h sigma_bar(f) != 0")
                                .detail(format!(
                                    "f = {}, g = {}, h = {}, map = {label}, product = {}",
                                    f.render(&ring, pres.generators()),
                                    g.render(&ring, pres.generators()),
                                    h.render(&ring, pres.generators()),
                                    t.render(&ring, pres.generators())
                                )),
                            bounds: opts.record(exhaustive, pairs_tested),
                        },
                        pairs_tested,
                    ));
                }
            }
        }
    }
    Ok(PropertyReport::new(
        prop.property_id(),
        subject,
        Verdict::BoundedPass { bounds: opts.record(exhaustive, pairs_tested) },
        pairs_tested,
    ))
}
