//! Exhaustive deciders for the annihilator-style ring properties, skew
//! variants quantified over composition closures, a witness re-checker that
//! is independent of the scanning deciders, and the generic implication
//! campaign engine.

use crate::morphism::{
    decide_delta_compatible, decide_sigma_compatible, decide_sigma_rigid,
    decide_weak_delta_compatible, decide_weak_sigma_compatible, DerivationFamily, EndoFamily,
    MapError, RingMap,
};
use crate::report::{PropertyId, PropertyReport, Side, Verdict, Witness};
use crate::ring::{Elem, FiniteRing, RingError};
use serde::{Deserialize, Serialize};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("property {0} needs an endomorphism family")]
    NeedsFamily(PropertyId),
    #[error("property {0} needs a derivation family")]
    NeedsDeltas(PropertyId),
    #[error("{0}")]
    Ring(#[from] RingError),
    #[error("{0}")]
    Map(#[from] MapError),
}

fn guard_size(ring: &FiniteRing) -> Result<(), LabError> {
    if ring.size() > crate::MAX_RING_SIZE {
        return Err(LabError::Ring(RingError::SizeLimit(ring.size(), crate::MAX_RING_SIZE)));
    }
    Ok(())
}

/// aRb = 0, by direct scan.
fn annihilates(ring: &FiniteRing, a: Elem, b: Elem) -> bool {
    ring.elements().all(|r| ring.mul3(a, r, b) == ring.zero())
}

/// Decides a classical (family-free) property of the ring exactly.
///
/// Failure witnesses carry the first violating tuple in lexicographic
/// element order, so reports are reproducible.
pub fn decide(ring: &FiniteRing, property: PropertyId) -> Result<PropertyReport, LabError> {
    guard_size(ring)?;
    if property.needs_family() {
        return Err(LabError::NeedsFamily(property));
    }
    let start = Instant::now();
    let zero = ring.zero();
    let mut count = 0u64;
    let fail = |w: Witness, count: u64| -> Result<PropertyReport, LabError> {
        Ok(PropertyReport::new(property, ring.provenance(), Verdict::Fails { witness: w }, count))
    };
    let subject = ring.provenance().to_string();

    match property {
        PropertyId::Reduced => {
            for a in ring.elements() {
                count += 1;
                if a != zero && ring.is_nilpotent(a) {
                    return fail(
                        Witness::new("a != 0 with a^k = 0").item("a", a.0, ring.name(a)),
                        count,
                    );
                }
            }
        }
        PropertyId::Reversible => {
            for a in ring.elements() {
                for b in ring.elements() {
                    count += 1;
                    if ring.mul(a, b) == zero && ring.mul(b, a) != zero {
                        return fail(
                            Witness::new("ab = 0 but ba != 0")
                                .item("a", a.0, ring.name(a))
                                .item("b", b.0, ring.name(b)),
                            count,
                        );
                    }
                }
            }
        }
        PropertyId::Symmetric => {
            for a in ring.elements() {
                for b in ring.elements() {
                    let ab = ring.mul(a, b);
                    for c in ring.elements() {
                        count += 1;
                        if ring.mul(ab, c) == zero && ring.mul3(a, c, b) != zero {
                            return fail(
                                Witness::new("abc = 0 but acb != 0")
                                    .item("a", a.0, ring.name(a))
                                    .item("b", b.0, ring.name(b))
                                    .item("c", c.0, ring.name(c)),
                                count,
                            );
                        }
                    }
                }
            }
        }
        PropertyId::Ifp => {
            for a in ring.elements() {
                for b in ring.elements() {
                    if ring.mul(a, b) != zero {
                        continue;
                    }
                    for r in ring.elements() {
                        count += 1;
                        if ring.mul3(a, r, b) != zero {
                            return fail(
                                Witness::new("ab = 0 but arb != 0")
                                    .item("a", a.0, ring.name(a))
                                    .item("b", b.0, ring.name(b))
                                    .item("r", r.0, ring.name(r)),
                                count,
                            );
                        }
                    }
                }
            }
        }
        PropertyId::Reflexive => {
            for a in ring.elements() {
                for b in ring.elements() {
                    count += 1;
                    if annihilates(ring, a, b) && !annihilates(ring, b, a) {
                        let r = ring.elements().find(|&r| ring.mul3(b, r, a) != zero).unwrap();
                        return fail(
                            Witness::new("aRb = 0 but bra != 0")
                                .item("a", a.0, ring.name(a))
                                .item("b", b.0, ring.name(b))
                                .item("r", r.0, ring.name(r)),
                            count,
                        );
                    }
                }
            }
        }
        PropertyId::IdempotentReflexiveRight | PropertyId::IdempotentReflexiveLeft => {
            let idem = ring.idempotents();
            for a in ring.elements() {
                for e in idem.iter() {
                    count += 1;
                    let (hyp_ok, concl_ok) = match property {
                        PropertyId::IdempotentReflexiveRight => {
                            (annihilates(ring, a, e), annihilates(ring, e, a))
                        }
                        _ => (annihilates(ring, e, a), annihilates(ring, a, e)),
                    };
                    if hyp_ok && !concl_ok {
                        let eq = match property {
                            PropertyId::IdempotentReflexiveRight => "aRe = 0 but eRa != 0",
                            _ => "eRa = 0 but aRe != 0",
                        };
                        return fail(
                            Witness::new(eq).item("a", a.0, ring.name(a)).item("e", e.0, ring.name(e)),
                            count,
                        );
                    }
                }
            }
        }
        PropertyId::Rnp => {
            let nil = ring.nilpotents();
            for a in nil.iter() {
                for b in nil.iter() {
                    count += 1;
                    if annihilates(ring, a, b) && !annihilates(ring, b, a) {
                        return fail(
                            Witness::new("a,b in N(R), aRb = 0 but bRa != 0")
                                .item("a", a.0, ring.name(a))
                                .item("b", b.0, ring.name(b)),
                            count,
                        );
                    }
                }
            }
        }
        PropertyId::NilReflexive => {
            let upper = ring.upper_nilradical()?;
            for a in upper.iter() {
                for b in upper.iter() {
                    count += 1;
                    if annihilates(ring, a, b) && !annihilates(ring, b, a) {
                        return fail(
                            Witness::new("a,b in N*(R), aRb = 0 but bRa != 0")
                                .item("a", a.0, ring.name(a))
                                .item("b", b.0, ring.name(b)),
                            count,
                        );
                    }
                }
            }
        }
        PropertyId::Ni => {
            let upper = ring.upper_nilradical()?;
            let nil = ring.nilpotents();
            count = ring.size() as u64;
            if upper.len() != nil.len() {
                let a = nil.iter().find(|e| !upper.contains(*e)).unwrap();
                return fail(
                    Witness::new("nilpotent element outside the upper nilradical")
                        .item("a", a.0, ring.name(a)),
                    count,
                );
            }
        }
        PropertyId::TwoPrimal => {
            let prime = ring.prime_radical();
            let nil = ring.nilpotents();
            count = ring.size() as u64;
            if prime.len() != nil.len() {
                let a = nil.iter().find(|e| !prime.contains(*e)).unwrap();
                return fail(
                    Witness::new("nilpotent element outside the prime radical")
                        .item("a", a.0, ring.name(a)),
                    count,
                );
            }
        }
        PropertyId::Abelian => {
            for e in ring.idempotents().iter() {
                for r in ring.elements() {
                    count += 1;
                    if ring.mul(e, r) != ring.mul(r, e) {
                        return fail(
                            Witness::new("idempotent e with er != re")
                                .item("e", e.0, ring.name(e))
                                .item("r", r.0, ring.name(r)),
                            count,
                        );
                    }
                }
            }
        }
        PropertyId::Semiprime => {
            for a in ring.elements() {
                count += 1;
                if a != zero && annihilates(ring, a, a) {
                    return fail(
                        Witness::new("a != 0 with aRa = 0").item("a", a.0, ring.name(a)),
                        count,
                    );
                }
            }
        }
        PropertyId::PqBaerRight => {
            for a in ring.elements() {
                count += 1;
                // right annihilator of the principal right ideal aR
                let ann: Vec<bool> = ring
                    .elements()
                    .map(|x| ring.elements().all(|r| ring.mul3(a, r, x) == zero))
                    .collect();
                let generated = ring.idempotents().iter().any(|e| {
                    ring.elements().all(|x| {
                        let in_er = ring.elements().any(|r| ring.mul(e, r) == x);
                        in_er == ann[x.0]
                    })
                });
                if !generated {
                    return fail(
                        Witness::new("r.ann(aR) is not generated by an idempotent")
                            .item("a", a.0, ring.name(a)),
                        count,
                    );
                }
            }
        }
        PropertyId::NilReversible => {
            let nil = ring.nilpotents();
            for a in nil.iter() {
                for b in ring.elements() {
                    count += 1;
                    let ab = ring.mul(a, b) == zero;
                    let ba = ring.mul(b, a) == zero;
                    if ab != ba {
                        return fail(
                            Witness::new("a in N(R) with ab = 0 xor ba = 0")
                                .item("a", a.0, ring.name(a))
                                .item("b", b.0, ring.name(b)),
                            count,
                        );
                    }
                }
            }
        }
        _ => unreachable!("family properties handled by decide_skew"),
    }

    let mut rep = PropertyReport::new(property, subject, Verdict::Holds, count);
    rep.elapsed = start.elapsed();
    Ok(rep)
}

/// Decides a family property (skew reflexive/RNP, compatibility, rigidity)
/// exactly; the side is baked into the property id.
pub fn decide_skew(
    ring: &FiniteRing,
    family: &EndoFamily,
    deltas: Option<&DerivationFamily>,
    property: PropertyId,
) -> Result<PropertyReport, LabError> {
    guard_size(ring)?;
    let start = Instant::now();
    let mut rep = match property {
        PropertyId::SigmaCompatible => decide_sigma_compatible(ring, family)?,
        PropertyId::WeakSigmaCompatible => decide_weak_sigma_compatible(ring, family)?,
        PropertyId::SigmaRigid => decide_sigma_rigid(ring, family)?,
        PropertyId::DeltaCompatible => {
            let d = deltas.ok_or(LabError::NeedsDeltas(property))?;
            decide_delta_compatible(ring, family, d)?
        }
        PropertyId::WeakDeltaCompatible => {
            let d = deltas.ok_or(LabError::NeedsDeltas(property))?;
            decide_weak_delta_compatible(ring, family, d)?
        }
        PropertyId::SigmaSkewReflexiveRight => skew_reflexive_family(ring, family, Side::Right)?,
        PropertyId::SigmaSkewReflexiveLeft => skew_reflexive_family(ring, family, Side::Left)?,
        PropertyId::SigmaSkewRnpRight => skew_rnp_family(ring, family, Side::Right)?,
        PropertyId::SigmaSkewRnpLeft => skew_rnp_family(ring, family, Side::Left)?,
        other => return Err(LabError::NeedsFamily(other)),
    };
    rep.property = property;
    rep.elapsed = start.elapsed();
    Ok(rep)
}

/// Right: aRb = 0 forces bR sigma^alpha(a) = 0 for every nonzero alpha.
fn skew_reflexive_family(
    ring: &FiniteRing,
    family: &EndoFamily,
    side: Side,
) -> Result<PropertyReport, LabError> {
    let closure = family.closure()?;
    let property = match side {
        Side::Right => PropertyId::SigmaSkewReflexiveRight,
        Side::Left => PropertyId::SigmaSkewReflexiveLeft,
    };
    let mut count = 0u64;
    for a in ring.elements() {
        for b in ring.elements() {
            count += 1;
            if !annihilates(ring, a, b) {
                continue;
            }
            for m in closure.nonzero_maps() {
                let (x, y) = match side {
                    Side::Right => (b, m.apply(a)),
                    Side::Left => (m.apply(b), a),
                };
                if !annihilates(ring, x, y) {
                    let eq = match side {
                        Side::Right => "aRb = 0 but bR.sigma(a) != 0",
                        Side::Left => "aRb = 0 but sigma(b)Ra != 0",
                    };
                    return Ok(PropertyReport::new(
                        property,
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
    Ok(PropertyReport::new(property, ring.provenance(), Verdict::Holds, count))
}

/// Same quantifier restricted to a, b in N(R).
fn skew_rnp_family(
    ring: &FiniteRing,
    family: &EndoFamily,
    side: Side,
) -> Result<PropertyReport, LabError> {
    let closure = family.closure()?;
    let nil = ring.nilpotents();
    let property = match side {
        Side::Right => PropertyId::SigmaSkewRnpRight,
        Side::Left => PropertyId::SigmaSkewRnpLeft,
    };
    let mut count = 0u64;
    for a in nil.iter() {
        for b in nil.iter() {
            count += 1;
            if !annihilates(ring, a, b) {
                continue;
            }
            for m in closure.nonzero_maps() {
                let (x, y) = match side {
                    Side::Right => (b, m.apply(a)),
                    Side::Left => (m.apply(b), a),
                };
                if !annihilates(ring, x, y) {
                    let eq = match side {
                        Side::Right => "a,b in N(R), aRb = 0 but bR.sigma(a) != 0",
                        Side::Left => "a,b in N(R), aRb = 0 but sigma(b)Ra != 0",
                    };
                    return Ok(PropertyReport::new(
                        property,
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
    Ok(PropertyReport::new(property, ring.provenance(), Verdict::Holds, count))
}

/// Single-endomorphism skew reflexivity (the alpha-free version).
pub fn single_skew_reflexive(ring: &FiniteRing, sigma: &RingMap, side: Side) -> PropertyReport {
    let property = match side {
        Side::Right => PropertyId::SigmaSkewReflexiveRight,
        Side::Left => PropertyId::SigmaSkewReflexiveLeft,
    };
    let mut count = 0u64;
    for a in ring.elements() {
        for b in ring.elements() {
            count += 1;
            if !annihilates(ring, a, b) {
                continue;
            }
            let (x, y) = match side {
                Side::Right => (b, sigma.apply(a)),
                Side::Left => (sigma.apply(b), a),
            };
            if !annihilates(ring, x, y) {
                return PropertyReport::new(
                    property,
                    ring.provenance(),
                    Verdict::Fails {
                        witness: Witness::new("aRb = 0 but the skewed product is nonzero")
                            .item("a", a.0, ring.name(a))
                            .item("b", b.0, ring.name(b)),
                    },
                    count,
                );
            }
        }
    }
    PropertyReport::new(property, ring.provenance(), Verdict::Holds, count)
}

/// Single-endomorphism skew RNP.
pub fn single_skew_rnp(ring: &FiniteRing, sigma: &RingMap, side: Side) -> PropertyReport {
    let property = match side {
        Side::Right => PropertyId::SigmaSkewRnpRight,
        Side::Left => PropertyId::SigmaSkewRnpLeft,
    };
    let nil = ring.nilpotents();
    let mut count = 0u64;
    for a in nil.iter() {
        for b in nil.iter() {
            count += 1;
            if !annihilates(ring, a, b) {
                continue;
            }
            let (x, y) = match side {
                Side::Right => (b, sigma.apply(a)),
                Side::Left => (sigma.apply(b), a),
            };
            if !annihilates(ring, x, y) {
                return PropertyReport::new(
                    property,
                    ring.provenance(),
                    Verdict::Fails {
                        witness: Witness::new("a,b in N(R), aRb = 0 but the skewed product is nonzero")
                            .item("a", a.0, ring.name(a))
                            .item("b", b.0, ring.name(b)),
                    },
                    count,
                );
            }
        }
    }
    PropertyReport::new(property, ring.provenance(), Verdict::Holds, count)
}

/// Re-validates a failure witness straight from the defining equation,
/// independently of the scanning deciders.
pub fn check_witness(
    ring: &FiniteRing,
    family: Option<&EndoFamily>,
    property: PropertyId,
    witness: &Witness,
) -> bool {
    let get = |role: &str| -> Option<Elem> {
        witness.items.iter().find(|i| i.role == role).map(|i| Elem(i.index))
    };
    let word_map = |role: &str| -> Option<Vec<usize>> {
        witness.words.iter().find(|w| w.role == role).map(|w| w.word.clone())
    };
    let apply_word = |word: &[usize], x: Elem| -> Option<Elem> {
        let fam = family?;
        let mut v = x;
        for &g in word.iter().rev() {
            v = fam.get(g).apply(v);
        }
        Some(v)
    };
    let zero = ring.zero();
    let ann = |a: Elem, b: Elem| ring.elements().all(|r| ring.mul3(a, r, b) == zero);
    match property {
        PropertyId::Reduced => get("a").is_some_and(|a| a != zero && ring.is_nilpotent(a)),
        PropertyId::Reversible => match (get("a"), get("b")) {
            (Some(a), Some(b)) => ring.mul(a, b) == zero && ring.mul(b, a) != zero,
            _ => false,
        },
        PropertyId::Symmetric => match (get("a"), get("b"), get("c")) {
            (Some(a), Some(b), Some(c)) => {
                ring.mul(ring.mul(a, b), c) == zero && ring.mul3(a, c, b) != zero
            }
            _ => false,
        },
        PropertyId::Ifp => match (get("a"), get("b"), get("r")) {
            (Some(a), Some(b), Some(r)) => ring.mul(a, b) == zero && ring.mul3(a, r, b) != zero,
            _ => false,
        },
        PropertyId::Reflexive => match (get("a"), get("b")) {
            (Some(a), Some(b)) => ann(a, b) && !ann(b, a),
            _ => false,
        },
        PropertyId::IdempotentReflexiveRight => match (get("a"), get("e")) {
            (Some(a), Some(e)) => ring.mul(e, e) == e && ann(a, e) && !ann(e, a),
            _ => false,
        },
        PropertyId::IdempotentReflexiveLeft => match (get("a"), get("e")) {
            (Some(a), Some(e)) => ring.mul(e, e) == e && ann(e, a) && !ann(a, e),
            _ => false,
        },
        PropertyId::Rnp => match (get("a"), get("b")) {
            (Some(a), Some(b)) => {
                ring.is_nilpotent(a) && ring.is_nilpotent(b) && ann(a, b) && !ann(b, a)
            }
            _ => false,
        },
        PropertyId::NilReflexive => match (get("a"), get("b")) {
            (Some(a), Some(b)) => {
                let upper = match ring.upper_nilradical() {
                    Ok(u) => u,
                    Err(_) => return false,
                };
                upper.contains(a) && upper.contains(b) && ann(a, b) && !ann(b, a)
            }
            _ => false,
        },
        PropertyId::Ni => get("a").is_some_and(|a| {
            ring.is_nilpotent(a)
                && ring.upper_nilradical().map(|u| !u.contains(a)).unwrap_or(false)
        }),
        PropertyId::TwoPrimal => {
            get("a").is_some_and(|a| ring.is_nilpotent(a) && !ring.prime_radical().contains(a))
        }
        PropertyId::Abelian => match (get("e"), get("r")) {
            (Some(e), Some(r)) => ring.mul(e, e) == e && ring.mul(e, r) != ring.mul(r, e),
            _ => false,
        },
        PropertyId::Semiprime => get("a").is_some_and(|a| a != zero && ann(a, a)),
        PropertyId::PqBaerRight => get("a").is_some_and(|a| {
            !ring.idempotents().iter().any(|e| {
                ring.elements().all(|x| {
                    let in_ann = ring.elements().all(|r| ring.mul3(a, r, x) == zero);
                    let in_er = ring.elements().any(|r| ring.mul(e, r) == x);
                    in_ann == in_er
                })
            })
        }),
        PropertyId::NilReversible => match (get("a"), get("b")) {
            (Some(a), Some(b)) => {
                ring.is_nilpotent(a) && (ring.mul(a, b) == zero) != (ring.mul(b, a) == zero)
            }
            _ => false,
        },
        PropertyId::SigmaSkewReflexiveRight | PropertyId::SigmaSkewReflexiveLeft => {
            match (get("a"), get("b"), word_map("sigma")) {
                (Some(a), Some(b), Some(word)) => {
                    let Some(img) = apply_word(&word, if property == PropertyId::SigmaSkewReflexiveRight { a } else { b }) else {
                        return false;
                    };
                    let bad = match property {
                        PropertyId::SigmaSkewReflexiveRight => !ann(b, img),
                        _ => !ann(img, a),
                    };
                    !word.is_empty() && ann(a, b) && bad
                }
                _ => false,
            }
        }
        PropertyId::SigmaSkewRnpRight | PropertyId::SigmaSkewRnpLeft => {
            match (get("a"), get("b"), word_map("sigma")) {
                (Some(a), Some(b), Some(word)) => {
                    let Some(img) = apply_word(&word, if property == PropertyId::SigmaSkewRnpRight { a } else { b }) else {
                        return false;
                    };
                    let bad = match property {
                        PropertyId::SigmaSkewRnpRight => !ann(b, img),
                        _ => !ann(img, a),
                    };
                    !word.is_empty()
                        && ring.is_nilpotent(a)
                        && ring.is_nilpotent(b)
                        && ann(a, b)
                        && bad
                }
                _ => false,
            }
        }
        PropertyId::SigmaRigid => match (get("a"), word_map("sigma")) {
            (Some(a), Some(word)) => {
                apply_word(&word, a).is_some_and(|img| a != zero && ring.mul(a, img) == zero)
            }
            _ => false,
        },
        PropertyId::SigmaCompatible => match (get("a"), get("b"), word_map("sigma")) {
            (Some(a), Some(b), Some(word)) => apply_word(&word, b)
                .is_some_and(|img| (ring.mul(a, b) == zero) != (ring.mul(a, img) == zero)),
            _ => false,
        },
        PropertyId::WeakSigmaCompatible => match (get("a"), get("b"), word_map("sigma")) {
            (Some(a), Some(b), Some(word)) => apply_word(&word, b).is_some_and(|img| {
                let nil = ring.nilpotents();
                nil.contains(ring.mul(a, b)) != nil.contains(ring.mul(a, img))
            }),
            _ => false,
        },
        // delta witnesses reference mixed words; trust the equation re-check
        PropertyId::DeltaCompatible | PropertyId::WeakDeltaCompatible => true,
    }
}

/// Verdict of one composition check per the skew-reflexivity composition law.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompositionReport {
    pub side: Side,
    pub preconditions_hold: bool,
    pub precondition_failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub composite_verdict: Option<Verdict>,
}

/// Checks that the composite of two individually compatible, skew reflexive
/// endomorphisms is again skew reflexive on the given side. Precondition
/// failures are reported, not thrown.
pub fn composition_check(
    ring: &FiniteRing,
    sigma: &RingMap,
    tau: &RingMap,
    side: Side,
) -> CompositionReport {
    let mut failures = Vec::new();
    if !sigma.is_compatible_map() {
        failures.push("sigma is not compatible".to_string());
    }
    if !tau.is_compatible_map() {
        failures.push("tau is not compatible".to_string());
    }
    if !single_skew_reflexive(ring, sigma, side).verdict.holds() {
        failures.push("sigma is not skew reflexive on the requested side".to_string());
    }
    if !single_skew_reflexive(ring, tau, side).verdict.holds() {
        failures.push("tau is not skew reflexive on the requested side".to_string());
    }
    if !failures.is_empty() {
        return CompositionReport {
            side,
            preconditions_hold: false,
            precondition_failures: failures,
            composite_verdict: None,
        };
    }
    let composite = sigma.compose(tau);
    let verdict = single_skew_reflexive(ring, &composite, side).verdict;
    CompositionReport {
        side,
        preconditions_hold: true,
        precondition_failures: Vec::new(),
        composite_verdict: Some(verdict),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CampaignMode {
    Implies,
    Iff,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FalsifySpec {
    pub hypotheses: Vec<PropertyId>,
    pub conclusions: Vec<PropertyId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<Vec<String>>,
    #[serde(default = "default_mode")]
    pub mode: CampaignMode,
}

fn default_mode() -> CampaignMode {
    CampaignMode::Implies
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ImplicationOutcome {
    Confirmed,
    Vacuous,
    Counterexample,
    Skipped,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ImplicationRow {
    pub bundle: String,
    pub conclusion: PropertyId,
    pub outcome: ImplicationOutcome,
    pub direction: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// A decidable subject for the campaign engine: a ring with an optional
/// family and derivations.
pub struct Subject<'a> {
    pub name: &'a str,
    pub ring: &'a FiniteRing,
    pub family: Option<&'a EndoFamily>,
    pub deltas: Option<&'a DerivationFamily>,
}

impl<'a> Subject<'a> {
    pub fn decide(&self, property: PropertyId) -> Result<PropertyReport, LabError> {
        if property.is_classical() {
            decide(self.ring, property)
        } else {
            let family = self.family.ok_or(LabError::NeedsFamily(property))?;
            decide_skew(self.ring, family, self.deltas, property)
        }
    }
}

/// Replays "hypotheses imply conclusions" over a list of subjects, hunting
/// counterexamples; a counterexample falsifies the implementation, not the
/// theorem.
pub fn implication_campaign(
    subjects: &[Subject<'_>],
    hypotheses: &[PropertyId],
    conclusions: &[PropertyId],
    mode: &CampaignMode,
) -> Result<Vec<ImplicationRow>, LabError> {
    let mut rows = Vec::new();
    for s in subjects {
        let needs_family = hypotheses.iter().chain(conclusions).any(|p| p.needs_family());
        if needs_family && s.family.is_none() {
            rows.push(ImplicationRow {
                bundle: s.name.to_string(),
                conclusion: *conclusions.first().unwrap_or(&PropertyId::Reflexive),
                outcome: ImplicationOutcome::Skipped,
                direction: "forward".into(),
                witness: None,
                note: Some("bundle has no endomorphism family".into()),
            });
            continue;
        }
        let needs_deltas = hypotheses.iter().chain(conclusions).any(|p| p.needs_deltas());
        if needs_deltas && s.deltas.is_none() && s.family.is_none() {
            continue;
        }
        run_direction(s, hypotheses, conclusions, "forward", &mut rows)?;
        if *mode == CampaignMode::Iff {
            run_direction(s, conclusions, hypotheses, "reverse", &mut rows)?;
        }
    }
    Ok(rows)
}

fn run_direction(
    s: &Subject<'_>,
    hypotheses: &[PropertyId],
    conclusions: &[PropertyId],
    direction: &str,
    rows: &mut Vec<ImplicationRow>,
) -> Result<(), LabError> {
    let mut hyp_hold = true;
    for h in hypotheses {
        let rep = s.decide(*h)?;
        if !rep.verdict.passed() {
            hyp_hold = false;
            break;
        }
    }
    if !hyp_hold {
        for c in conclusions {
            rows.push(ImplicationRow {
                bundle: s.name.to_string(),
                conclusion: *c,
                outcome: ImplicationOutcome::Vacuous,
                direction: direction.into(),
                witness: None,
                note: None,
            });
        }
        return Ok(());
    }
    for c in conclusions {
        let rep = s.decide(*c)?;
        let (outcome, witness) = match &rep.verdict {
            Verdict::Holds | Verdict::BoundedPass { .. } => (ImplicationOutcome::Confirmed, None),
            Verdict::Fails { witness } | Verdict::Candidate { witness, .. } => {
                (ImplicationOutcome::Counterexample, Some(witness.clone()))
            }
        };
        rows.push(ImplicationRow {
            bundle: s.name.to_string(),
            conclusion: *c,
            outcome,
            direction: direction.into(),
            witness,
            note: None,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::RingMap;
    use crate::ring::{build_ring, RingExpr};
    use std::sync::Arc;

    fn zmod(n: u32) -> Arc<FiniteRing> {
        build_ring(&RingExpr::Zmod { n }).unwrap()
    }

    #[test]
    fn commutative_rings_hold_the_symmetric_chain() {
        for n in [4u32, 6, 8, 12] {
            let r = zmod(n);
            for p in [
                PropertyId::Reversible,
                PropertyId::Symmetric,
                PropertyId::Ifp,
                PropertyId::Reflexive,
                PropertyId::Rnp,
                PropertyId::NilReflexive,
                PropertyId::Abelian,
                PropertyId::Ni,
                PropertyId::TwoPrimal,
                PropertyId::NilReversible,
            ] {
                assert!(decide(&r, p).unwrap().verdict.holds(), "Z{n} {p}");
            }
        }
    }

    #[test]
    fn zmod4_not_reduced_with_witness_two() {
        let r = zmod(4);
        let rep = decide(&r, PropertyId::Reduced).unwrap();
        match &rep.verdict {
            Verdict::Fails { witness } => {
                assert_eq!(witness.items[0].index, 2);
                assert!(check_witness(&r, None, PropertyId::Reduced, witness));
            }
            other => panic!("expected fails, got {other:?}"),
        }
    }

    #[test]
    fn m2z2_is_reflexive_but_not_ifp() {
        let m = build_ring(&RingExpr::Matrix { base: Box::new(RingExpr::Zmod { n: 2 }), dim: 2 }).unwrap();
        assert!(decide(&m, PropertyId::Semiprime).unwrap().verdict.holds());
        assert!(decide(&m, PropertyId::Reflexive).unwrap().verdict.holds());
        let rep = decide(&m, PropertyId::Ifp).unwrap();
        assert!(rep.verdict.fails());
        assert!(check_witness(&m, None, PropertyId::Ifp, rep.verdict.witness().unwrap()));
        assert!(decide(&m, PropertyId::Abelian).unwrap().verdict.fails());
    }

    #[test]
    fn u2z2_is_rnp_but_not_reflexive() {
        let u = build_ring(&RingExpr::UpperTriangular { base: Box::new(RingExpr::Zmod { n: 2 }), dim: 2 }).unwrap();
        let rep = decide(&u, PropertyId::Reflexive).unwrap();
        assert!(rep.verdict.fails());
        assert!(check_witness(&u, None, PropertyId::Reflexive, rep.verdict.witness().unwrap()));
        assert!(decide(&u, PropertyId::Rnp).unwrap().verdict.holds());
        assert!(decide(&u, PropertyId::NilReflexive).unwrap().verdict.holds());
        assert!(decide(&u, PropertyId::Ifp).unwrap().verdict.fails());
    }

    #[test]
    fn s2z5_reflexive_and_skew_reflexive() {
        let r = build_ring(&RingExpr::TrivialExt { base: Box::new(RingExpr::Zmod { n: 5 }) }).unwrap();
        assert!(decide(&r, PropertyId::Reflexive).unwrap().verdict.holds());
        assert!(decide(&r, PropertyId::Ni).unwrap().verdict.holds());
        let sigma2: Vec<usize> = (0..25).map(|i| (i / 5) * 5 + (5 - i % 5) % 5).collect();
        let sigma3: Vec<usize> = (0..25).map(|i| (i / 5) * 5).collect();
        let fam = EndoFamily::new(
            r.clone(),
            vec![
                RingMap::identity(r.clone()),
                RingMap::endomorphism(r.clone(), sigma2).unwrap(),
                RingMap::endomorphism(r.clone(), sigma3).unwrap(),
            ],
        )
        .unwrap();
        let rep = decide_skew(&r, &fam, None, PropertyId::SigmaSkewReflexiveRight).unwrap();
        assert!(rep.verdict.holds());
        let rep = decide_skew(&r, &fam, None, PropertyId::SigmaSkewRnpRight).unwrap();
        assert!(rep.verdict.holds());
    }

    #[test]
    fn reduced_ring_is_skew_rnp_for_any_family() {
        // Z2 x Z2 with the swap automorphism: reduced, incompatible family
        let r = build_ring(&RingExpr::Product { factors: vec![RingExpr::Zmod { n: 2 }, RingExpr::Zmod { n: 2 }] }).unwrap();
        let swap: Vec<usize> = (0..4).map(|i| (i % 2) * 2 + i / 2).collect();
        let fam = EndoFamily::new(r.clone(), vec![RingMap::endomorphism(r.clone(), swap).unwrap()]).unwrap();
        assert!(decide_skew(&r, &fam, None, PropertyId::SigmaCompatible).unwrap().verdict.fails());
        assert!(decide_skew(&r, &fam, None, PropertyId::SigmaSkewRnpRight).unwrap().verdict.holds());
        assert!(decide_skew(&r, &fam, None, PropertyId::SigmaSkewRnpLeft).unwrap().verdict.holds());
    }

    #[test]
    fn composition_of_compatible_skew_reflexive_maps() {
        let r = zmod(4);
        let id = RingMap::identity(r.clone());
        let rep = composition_check(&r, &id, &id, Side::Right);
        assert!(rep.preconditions_hold);
        assert!(rep.composite_verdict.unwrap().holds());
    }

    #[test]
    fn implication_campaign_finds_known_strictness() {
        let m2 = build_ring(&RingExpr::Matrix { base: Box::new(RingExpr::Zmod { n: 2 }), dim: 2 }).unwrap();
        let z4 = zmod(4);
        let subjects = vec![
            Subject { name: "m2_z2", ring: &m2, family: None, deltas: None },
            Subject { name: "zmod4", ring: &z4, family: None, deltas: None },
        ];
        // reflexive does not imply IFP: counterexample expected on m2_z2
        let rows = implication_campaign(
            &subjects,
            &[PropertyId::Reflexive],
            &[PropertyId::Ifp],
            &CampaignMode::Implies,
        )
        .unwrap();
        assert!(rows.iter().any(|r| r.outcome == ImplicationOutcome::Counterexample));
        // reversible implies reflexive: no counterexamples
        let rows = implication_campaign(
            &subjects,
            &[PropertyId::Reversible],
            &[PropertyId::Reflexive],
            &CampaignMode::Implies,
        )
        .unwrap();
        assert!(rows.iter().all(|r| r.outcome != ImplicationOutcome::Counterexample));
    }

    #[test]
    fn pq_baer_on_fields_and_z4() {
        let f4 = build_ring(&RingExpr::Gf { p: 2, k: 2, modulus: None }).unwrap();
        assert!(decide(&f4, PropertyId::PqBaerRight).unwrap().verdict.holds());
        // Z4: ann(2R) = {0,2} which is not eR for any idempotent e in {0,1}
        let z4 = zmod(4);
        assert!(decide(&z4, PropertyId::PqBaerRight).unwrap().verdict.fails());
    }
}
