//! Ore localization S^-1 R at a multiplicative set of central regular
//! elements, the induced endomorphism family, and localization of a PBW
//! presentation.
//!
//! On a finite carrier every regular element is already a unit, so S^-1 R is
//! isomorphic to R through the canonical map. The generic pair-quotient
//! construction is kept as an independent code path anyway: agreement between
//! the two representations is a genuine correctness check, and every report
//! states the degeneracy.

use crate::morphism::{check_endomorphism, DerivationFamily, EndoFamily, MapError, RingMap};
use crate::pbw::{PbwError, PbwPresentation};
use crate::property::{decide_skew, LabError};
use crate::report::{PropertyId, PropertyReport};
use crate::ring::{Elem, ElemSet, FiniteRing, RingError};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LocalizationError {
    #[error("invalid multiplicative set: {0}")]
    InvalidSet(String),
    #[error("family is not stable on S: {0}")]
    Unstable(String),
    #[error("{0}")]
    Ring(#[from] RingError),
    #[error("{0}")]
    Map(#[from] MapError),
    #[error("{0}")]
    Pbw(#[from] PbwError),
    #[error("{0}")]
    Lab(#[from] LabError),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub const DEGENERACY_NOTE: &str =
    "finite carrier: every regular element is a unit, so S^-1 R is isomorphic to R via the canonical map";

/// Outcome of validating a would-be denominator set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultSetReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

/// Confirms 1 in S, multiplicative closure, centrality and regularity;
/// violations carry the offending elements.
pub fn validate_mult_set(ring: &FiniteRing, set: &[Elem]) -> MultSetReport {
    let mut violations = Vec::new();
    let s = ElemSet::from_members(ring.size(), set.iter().copied());
    if s.is_empty() {
        violations.push("S is empty".to_string());
    }
    if !s.contains(ring.one()) {
        violations.push("1 is not in S".to_string());
    }
    for a in s.iter() {
        for b in s.iter() {
            let ab = ring.mul(a, b);
            if !s.contains(ab) {
                violations.push(format!(
                    "S not multiplicatively closed: {} * {} = {} is outside",
                    ring.name(a),
                    ring.name(b),
                    ring.name(ab)
                ));
            }
        }
    }
    let center = ring.center();
    let regular = ring.regular_elements();
    for a in s.iter() {
        if !center.contains(a) {
            violations.push(format!("{} is not central", ring.name(a)));
        }
        if !regular.contains(a) {
            let b = ring
                .elements()
                .find(|&b| b != ring.zero() && (ring.mul(a, b) == ring.zero() || ring.mul(b, a) == ring.zero()));
            violations.push(format!(
                "{} is not regular (annihilates {})",
                ring.name(a),
                b.map(|b| ring.name(b).to_string()).unwrap_or_default()
            ));
        }
        if violations.len() > 8 {
            break;
        }
    }
    MultSetReport { valid: violations.is_empty(), violations }
}

/// S^-1 R as explicit equivalence classes of pairs (s, r) meaning s^-1 r,
/// under (s, r) ~ (s', r') iff r s' = r' s.
pub struct LocalRing {
    base: Arc<FiniteRing>,
    set: Vec<Elem>,
    ring: Arc<FiniteRing>,
    /// base element index -> class index of (1, r)
    canonical: Vec<usize>,
    /// class index -> base element r s^-1 (inverse of the canonical map)
    canonical_inv: Vec<usize>,
    /// class index -> representative pair (s, r)
    reps: Vec<(Elem, Elem)>,
}

impl LocalRing {
    pub fn base(&self) -> &Arc<FiniteRing> {
        &self.base
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn denominators(&self) -> &[Elem] {
        &self.set
    }

    pub fn canonical(&self, r: Elem) -> Elem {
        Elem(self.canonical[r.0])
    }

    pub fn canonical_inverse(&self, c: Elem) -> Elem {
        Elem(self.canonical_inv[c.0])
    }

    pub fn representative(&self, c: Elem) -> (Elem, Elem) {
        self.reps[c.0]
    }

    /// Pushes a base self-map through the isomorphism; requires stability of
    /// S under the map so denominators stay denominators.
    pub fn induce_map(&self, map: &RingMap) -> Result<RingMap, LocalizationError> {
        for &s in &self.set {
            if !self.set.contains(&map.apply(s)) {
                return Err(LocalizationError::Unstable(format!(
                    "sigma({}) = {} is outside S",
                    self.base.name(s),
                    self.base.name(map.apply(s))
                )));
            }
        }
        // sigma_S(s^-1 r) = sigma(s)^-1 sigma(r), computed on representatives
        let table: Vec<usize> = (0..self.ring.size())
            .map(|c| {
                let (s, r) = self.reps[c];
                self.class_of(map.apply(s), map.apply(r))
            })
            .collect();
        let report = check_endomorphism(&self.ring, &table);
        if !report.valid {
            return Err(LocalizationError::Inconsistency(
                "induced map is not an endomorphism of S^-1 R".into(),
            ));
        }
        Ok(RingMap::endomorphism(self.ring.clone(), table)?)
    }

    /// Induces the whole family, gating on sigma^alpha(S) <= S over the
    /// composition closure.
    pub fn induce_family(&self, family: &EndoFamily) -> Result<EndoFamily, LocalizationError> {
        let closure = family.closure()?;
        for m in closure.maps() {
            for &s in &self.set {
                if !self.set.contains(&m.apply(s)) {
                    return Err(LocalizationError::Unstable(format!(
                        "closure map (word {:?}) moves {} outside S",
                        m.word,
                        self.base.name(s)
                    )));
                }
            }
        }
        let maps: Vec<RingMap> = family
            .maps()
            .iter()
            .map(|m| self.induce_map(m))
            .collect::<Result<_, _>>()?;
        Ok(EndoFamily::new(self.ring.clone(), maps)?)
    }

    fn class_of(&self, s: Elem, r: Elem) -> usize {
        self.reps
            .iter()
            .position(|&(s2, r2)| self.base.mul(r, s2) == self.base.mul(r2, s))
            .expect("pair belongs to some class")
    }
}

/// Builds S^-1 R by the pair-quotient construction, verifies the equivalence
/// is a congruence exhaustively, and asserts the canonical map r -> r/1 is a
/// ring isomorphism.
pub fn localize(base: &Arc<FiniteRing>, set: &[Elem]) -> Result<LocalRing, LocalizationError> {
    let report = validate_mult_set(base, set);
    if !report.valid {
        return Err(LocalizationError::InvalidSet(report.violations.join("; ")));
    }
    let mut s: Vec<Elem> = set.to_vec();
    s.sort();
    s.dedup();
    // pairs in lexicographic (s, r) order; first of each class is the rep
    let mut reps: Vec<(Elem, Elem)> = Vec::new();
    let class_of_pair = |reps: &[(Elem, Elem)], den: Elem, num: Elem| -> Option<usize> {
        reps.iter()
            .position(|&(s2, r2)| base.mul(num, s2) == base.mul(r2, den))
    };
    let mut pair_class = std::collections::HashMap::new();
    for &den in &s {
        for num in base.elements() {
            let c = match class_of_pair(&reps, den, num) {
                Some(c) => c,
                None => {
                    reps.push((den, num));
                    reps.len() - 1
                }
            };
            pair_class.insert((den, num), c);
        }
    }
    let classes = reps.len();
    let class = |den: Elem, num: Elem| -> usize { pair_class[&(den, num)] };
    // operations on representatives
    let add_pair = |p: (Elem, Elem), q: (Elem, Elem)| -> (Elem, Elem) {
        (base.mul(p.0, q.0), base.add(base.mul(p.1, q.0), base.mul(q.1, p.0)))
    };
    let mul_pair = |p: (Elem, Elem), q: (Elem, Elem)| -> (Elem, Elem) {
        (base.mul(p.0, q.0), base.mul(p.1, q.1))
    };
    // congruence: operations on arbitrary pair choices land in the same class
    for &p1 in pair_class.keys() {
        let r1 = reps[class(p1.0, p1.1)];
        for &p2 in pair_class.keys() {
            let r2 = reps[class(p2.0, p2.1)];
            let via_pairs = add_pair(p1, p2);
            let via_reps = add_pair(r1, r2);
            if class(via_pairs.0, via_pairs.1) != class(via_reps.0, via_reps.1) {
                return Err(LocalizationError::Inconsistency(
                    "addition is not well-defined on classes".into(),
                ));
            }
            let via_pairs = mul_pair(p1, p2);
            let via_reps = mul_pair(r1, r2);
            if class(via_pairs.0, via_pairs.1) != class(via_reps.0, via_reps.1) {
                return Err(LocalizationError::Inconsistency(
                    "multiplication is not well-defined on classes".into(),
                ));
            }
        }
    }
    let one = base.one();
    let names: Vec<String> = reps
        .iter()
        .map(|&(den, num)| format!("{}/{}", base.name(num), base.name(den)))
        .collect();
    let mut add_t = vec![0usize; classes * classes];
    let mut mul_t = vec![0usize; classes * classes];
    let mut neg_t = vec![0usize; classes];
    for (i, &p) in reps.iter().enumerate() {
        neg_t[i] = class(p.0, base.neg(p.1));
        for (j, &q) in reps.iter().enumerate() {
            let a = add_pair(p, q);
            add_t[i * classes + j] = class(a.0, a.1);
            let m = mul_pair(p, q);
            mul_t[i * classes + j] = class(m.0, m.1);
        }
    }
    let ring = Arc::new(FiniteRing::from_tables(
        classes,
        add_t,
        mul_t,
        neg_t,
        class(one, base.zero()),
        class(one, one),
        format!("S^-1({})", base.provenance()),
        None,
        names,
    )?);
    // canonical map r -> r/1 must be a ring isomorphism on a finite base
    let canonical: Vec<usize> = base.elements().map(|r| class(one, r)).collect();
    for a in base.elements() {
        for b in base.elements() {
            if Elem(canonical[base.add(a, b).0]) != ring.add(Elem(canonical[a.0]), Elem(canonical[b.0]))
                || Elem(canonical[base.mul(a, b).0])
                    != ring.mul(Elem(canonical[a.0]), Elem(canonical[b.0]))
            {
                return Err(LocalizationError::Inconsistency(
                    "canonical map is not a ring homomorphism".into(),
                ));
            }
        }
    }
    let mut canonical_inv = vec![usize::MAX; classes];
    for (r, &c) in canonical.iter().enumerate() {
        if canonical_inv[c] != usize::MAX {
            return Err(LocalizationError::Inconsistency("canonical map is not injective".into()));
        }
        canonical_inv[c] = r;
    }
    if canonical_inv.iter().any(|&v| v == usize::MAX) {
        return Err(LocalizationError::Inconsistency(
            "canonical map is not surjective: some class has no integral representative".into(),
        ));
    }
    Ok(LocalRing { base: base.clone(), set: s, ring, canonical, canonical_inv, reps })
}

/// S^-1 A: the presentation transported over the canonical isomorphism, with
/// x_i' = x_i / 1 and constants pushed through. Requires sigma_i(S) = S for
/// every generator.
pub fn localize_pbw(
    pres: &Arc<PbwPresentation>,
    set: &[Elem],
) -> Result<(LocalRing, Arc<PbwPresentation>), LocalizationError> {
    let base = pres.ring();
    let local = localize(base, set)?;
    for (i, m) in pres.sigma().maps().iter().enumerate() {
        let image: Vec<Elem> = local.set.iter().map(|&s| m.apply(s)).collect();
        let mut sorted = image.clone();
        sorted.sort();
        sorted.dedup();
        if sorted != local.set {
            return Err(LocalizationError::Unstable(format!(
                "sigma_{} does not map S onto S",
                i + 1
            )));
        }
    }
    let n = pres.generators();
    let lring = local.ring().clone();
    let conj_table = |f: &dyn Fn(Elem) -> Elem| -> Vec<usize> {
        (0..lring.size())
            .map(|c| local.canonical(f(local.canonical_inverse(Elem(c)))).0)
            .collect()
    };
    let mut sigmas = Vec::with_capacity(n);
    let mut deltas = Vec::with_capacity(n);
    for i in 0..n {
        let sm = pres.sigma().get(i).clone();
        let table = conj_table(&|x| sm.apply(x));
        sigmas.push(RingMap::endomorphism(lring.clone(), table)?);
    }
    let sigma = EndoFamily::new(lring.clone(), sigmas)?;
    for i in 0..n {
        let dm = pres.delta().get(i).clone();
        let table = conj_table(&|x| dm.apply(x));
        deltas.push(crate::morphism::SigmaDerivation::new(
            lring.clone(),
            sigma.get(i).clone(),
            table,
        )?);
    }
    let delta = DerivationFamily::new(&sigma, deltas)?;
    let pairs = n * n.saturating_sub(1) / 2;
    let mut d = Vec::with_capacity(pairs);
    let mut rc = Vec::with_capacity(pairs);
    for i in 0..n {
        for j in (i + 1)..n {
            d.push(local.canonical(pres.d_of(i, j)));
            rc.push(pres.r_of(i, j).iter().map(|&e| local.canonical(e)).collect());
        }
    }
    let localized = Arc::new(PbwPresentation::new(lring, sigma, delta, d, rc)?);
    Ok((local, localized))
}

/// Outcome of the RNP transfer check between R and S^-1 R.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferReport {
    pub base: PropertyReport,
    pub localized: PropertyReport,
    pub agree: bool,
    pub note: String,
}

/// Decides right Sigma-skew RNP on both sides of the localization and
/// compares; the verdicts must match (a mismatch falsifies the
/// implementation, not the theorem).
pub fn check_rnp_transfer(
    ring: &Arc<FiniteRing>,
    set: &[Elem],
    family: &EndoFamily,
) -> Result<TransferReport, LocalizationError> {
    let local = localize(ring, set)?;
    let induced = local.induce_family(family)?;
    let base_rep = decide_skew(ring, family, None, PropertyId::SigmaSkewRnpRight)?;
    let local_rep = decide_skew(local.ring(), &induced, None, PropertyId::SigmaSkewRnpRight)?;
    let agree = base_rep.verdict.holds() == local_rep.verdict.holds();
    Ok(TransferReport {
        base: base_rep,
        localized: local_rep,
        agree,
        note: DEGENERACY_NOTE.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::property::decide;
    use crate::report::ALL_PROPERTIES;
    use crate::ring::{build_ring, RingExpr};

    fn f4z2() -> Arc<FiniteRing> {
        build_ring(&RingExpr::Quot {
            base: Box::new(RingExpr::Gf { p: 2, k: 2, modulus: Some(vec![1, 1, 1]) }),
            modulus: vec![0, 0, 1],
        })
        .unwrap()
    }

    #[test]
    fn trivial_set_is_valid() {
        let r = build_ring(&RingExpr::Zmod { n: 4 }).unwrap();
        let rep = validate_mult_set(&r, &[r.one()]);
        assert!(rep.valid);
    }

    #[test]
    fn nilpotent_denominator_rejected() {
        let r = f4z2();
        let z = r.element_by_name("z").unwrap();
        let rep = validate_mult_set(&r, &[r.one(), z]);
        assert!(!rep.valid);
        assert!(rep.violations.iter().any(|v| v.contains("not regular")));
    }

    #[test]
    fn localize_at_field_units() {
        let r = build_ring(&RingExpr::Zmod { n: 5 }).unwrap();
        let units: Vec<Elem> = r.units().iter().collect();
        let local = localize(&r, &units).unwrap();
        assert_eq!(local.ring().size(), 5);
    }

    #[test]
    fn localize_f4z2_at_powers_of_a() {
        let r = f4z2();
        let a = r.element_by_name("a").unwrap();
        let a2 = r.mul(a, a);
        let local = localize(&r, &[r.one(), a, a2]).unwrap();
        assert_eq!(local.ring().size(), 16);
        // canonical transport preserves every classical verdict
        for p in ALL_PROPERTIES.iter().filter(|p| p.is_classical()) {
            let v1 = decide(&r, *p).unwrap().verdict.holds();
            let v2 = decide(local.ring(), *p).unwrap().verdict.holds();
            assert_eq!(v1, v2, "{p}");
        }
    }

    #[test]
    fn localize_trivial_ext_at_central_units() {
        let r = build_ring(&RingExpr::TrivialExt { base: Box::new(RingExpr::Zmod { n: 5 }) }).unwrap();
        let cu: Vec<Elem> = r.central_units().iter().collect();
        let local = localize(&r, &cu).unwrap();
        assert_eq!(local.ring().size(), 25);
    }

    #[test]
    fn induced_family_requires_stability() {
        // swap on Z2 x Z3 components cannot exist; use a stable family instead
        let r = f4z2();
        let a = r.element_by_name("a").unwrap();
        let z = r.element_by_name("z").unwrap();
        let sigma = RingMap::from_generator_images(
            r.clone(),
            &[(a, r.mul(a, a)), (z, r.mul(a, z))],
        )
        .unwrap();
        let fam = EndoFamily::new(r.clone(), vec![sigma]).unwrap();
        let a2 = r.mul(a, a);
        let local = localize(&r, &[r.one(), a, a2]).unwrap();
        let induced = local.induce_family(&fam).unwrap();
        assert_eq!(induced.len(), 1);
        // a set the map moves out: {1, z+1}? sigma(z+1) = az+1 which is not in it
        let zp1 = r.add(z, r.one());
        let rep = validate_mult_set(&r, &[r.one(), zp1, r.mul(zp1, zp1)]);
        if rep.valid {
            let local2 = localize(&r, &[r.one(), zp1, r.mul(zp1, zp1)]).unwrap();
            assert!(matches!(
                local2.induce_family(&fam),
                Err(LocalizationError::Unstable(_))
            ));
        }
    }

    #[test]
    fn rnp_transfer_agrees_on_f4z2() {
        let r = f4z2();
        let a = r.element_by_name("a").unwrap();
        let z = r.element_by_name("z").unwrap();
        let maps: Vec<RingMap> = (1..=2)
            .flat_map(|i| (0..=2).map(move |j| (i, j)))
            .map(|(i, j)| {
                RingMap::from_generator_images(
                    r.clone(),
                    &[(a, r.pow(a, i)), (z, r.mul(r.pow(a, j), z))],
                )
                .unwrap()
            })
            .collect();
        let fam = EndoFamily::new(r.clone(), maps).unwrap();
        let a2 = r.mul(a, a);
        let rep = check_rnp_transfer(&r, &[r.one(), a, a2], &fam).unwrap();
        assert!(rep.agree);
        assert!(rep.base.verdict.holds());
        assert!(rep.localized.verdict.holds());
    }
}
