use super::bounded::{
    check_a_property_bounded, check_skew_cn_bounded, check_sqa1_bounded, is_nilpotent_bounded,
    monomials_up_to, AProperty, BoundedOptions, NilpotencyVerdict,
};
use super::rewrite::{normalize, parse_expr, PbwExpr};
use super::*;
use crate::report::Verdict;
use crate::morphism::{DerivationFamily, EndoFamily, RingMap, SigmaDerivation};
use crate::ring::{build_ring, RingExpr};

fn f2z2() -> Arc<FiniteRing> {
    build_ring(&RingExpr::Quot { base: Box::new(RingExpr::Zmod { n: 2 }), modulus: vec![0, 0, 1] })
        .unwrap()
}

fn f4z2() -> Arc<FiniteRing> {
    build_ring(&RingExpr::Quot {
        base: Box::new(RingExpr::Gf { p: 2, k: 2, modulus: Some(vec![1, 1, 1]) }),
        modulus: vec![0, 0, 1],
    })
    .unwrap()
}

fn sigma_ij(ring: &Arc<FiniteRing>, i: u32, j: u32) -> RingMap {
    let a = ring.element_by_name("a").unwrap();
    let z = ring.element_by_name("z").unwrap();
    let ai = ring.pow(a, i as usize);
    let ajz = ring.mul(ring.pow(a, j as usize), z);
    RingMap::from_generator_images(ring.clone(), &[(a, ai), (z, ajz)]).unwrap()
}

/// n = 1, sigma = id, delta = d/dz over F2[z]/(z^2).
fn pres_d_char2() -> Arc<PbwPresentation> {
    let r = f2z2();
    let id = RingMap::identity(r.clone());
    let z = r.element_by_name("z").unwrap();
    let one = r.one();
    let table: Vec<usize> = r
        .elements()
        .map(|e| if e == z || e == r.add(one, z) { one.0 } else { r.zero().0 })
        .collect();
    let d = SigmaDerivation::new(r.clone(), id.clone(), table).unwrap();
    let sigma = EndoFamily::new(r.clone(), vec![id]).unwrap();
    let delta = DerivationFamily::new(&sigma, vec![d]).unwrap();
    Arc::new(PbwPresentation::new(r, sigma, delta, vec![], vec![]).unwrap())
}

/// n = 3 with the commuting maps z -> z, az, a^2 z; commuting generators.
fn pres_f4z2_triple() -> Arc<PbwPresentation> {
    let r = f4z2();
    let maps = vec![sigma_ij(&r, 1, 0), sigma_ij(&r, 1, 1), sigma_ij(&r, 1, 2)];
    let sigma = EndoFamily::new(r.clone(), maps).unwrap();
    let delta = DerivationFamily::zero(&sigma);
    let d = vec![r.one(); 3];
    let rc = vec![vec![r.zero(); 4]; 3];
    Arc::new(PbwPresentation::new(r, sigma, delta, d, rc).unwrap())
}

/// Quantum plane flavor: x2 x1 = 2 x1 x2 over F5.
fn pres_quantum_plane() -> Arc<PbwPresentation> {
    let r = build_ring(&RingExpr::Zmod { n: 5 }).unwrap();
    let id = RingMap::identity(r.clone());
    let sigma = EndoFamily::new(r.clone(), vec![id.clone(), id]).unwrap();
    let delta = DerivationFamily::zero(&sigma);
    Arc::new(PbwPresentation::new(r.clone(), sigma, delta, vec![Elem(2)], vec![vec![r.zero(); 3]]).unwrap())
}

fn pres_zmod4_poly() -> Arc<PbwPresentation> {
    let r = build_ring(&RingExpr::Zmod { n: 4 }).unwrap();
    Arc::new(PbwPresentation::commutative(r, 2).unwrap())
}

/// F4 with the Frobenius: x a = a^2 x.
fn pres_f4_frobenius() -> Arc<PbwPresentation> {
    let r = build_ring(&RingExpr::Gf { p: 2, k: 2, modulus: Some(vec![1, 1, 1]) }).unwrap();
    let frob: Vec<usize> = r.elements().map(|e| r.mul(e, e).0).collect();
    let sigma = EndoFamily::new(r.clone(), vec![RingMap::endomorphism(r.clone(), frob).unwrap()]).unwrap();
    let delta = DerivationFamily::zero(&sigma);
    Arc::new(PbwPresentation::new(r, sigma, delta, vec![], vec![]).unwrap())
}

/// The six-map family with commuting generators and d = 1: the maps do not
/// commute, so this data fails the empirical consistency test.
fn pres_f4z2_six_inconsistent() -> Arc<PbwPresentation> {
    let r = f4z2();
    let maps: Vec<RingMap> =
        (1..=2).flat_map(|i| (0..=2).map(move |j| (i, j))).map(|(i, j)| sigma_ij(&r, i, j)).collect();
    let sigma = EndoFamily::new(r.clone(), maps).unwrap();
    let delta = DerivationFamily::zero(&sigma);
    let pairs = 15;
    let d = vec![r.one(); pairs];
    let rc = vec![vec![r.zero(); 7]; pairs];
    Arc::new(PbwPresentation::new(r, sigma, delta, d, rc).unwrap())
}

#[test]
fn normalize_single_sigma_rule() {
    let p = pres_f4_frobenius();
    let r = p.ring();
    let a = r.element_by_name("a").unwrap();
    let e = parse_expr(&p, "x*a").unwrap();
    let nf = normalize(&p, &e).unwrap();
    // x a = a^2 x
    let expected = p.monomial(MultiIndex::unit(1, 0), r.mul(a, a));
    assert_eq!(nf, expected);
}

#[test]
fn normalize_derivation_rule_and_char2_cancellation() {
    let p = pres_d_char2();
    let e = parse_expr(&p, "x*z").unwrap();
    let nf = normalize(&p, &e).unwrap();
    assert_eq!(nf.render(p.ring(), 1), "z*x + 1");
    // x^2 z = z x^2 + 2 x = z x^2 in characteristic 2
    let e = parse_expr(&p, "x^2*z").unwrap();
    let nf = normalize(&p, &e).unwrap();
    assert_eq!(nf.render(p.ring(), 1), "z*x^2");
}

#[test]
fn mul_zero_and_one() {
    let p = pres_quantum_plane();
    let f = p.monomial(MultiIndex(vec![1, 2]), Elem(3));
    assert!(p.mul(&f, &PbwPoly::zero()).unwrap().is_zero());
    assert_eq!(p.mul(&f, &p.one()).unwrap(), f);
    assert_eq!(p.mul(&p.one(), &f).unwrap(), f);
}

#[test]
fn quantum_plane_swap_constant() {
    let p = pres_quantum_plane();
    // x2 * x1 = 2 x1 x2
    let y = p.monomial(MultiIndex(vec![0, 1]), Elem(1));
    let x = p.monomial(MultiIndex(vec![1, 0]), Elem(1));
    let prod = p.mul(&y, &x).unwrap();
    assert_eq!(prod, p.monomial(MultiIndex(vec![1, 1]), Elem(2)));
    let trace = p.monomial_product(&MultiIndex(vec![0, 1]), &MultiIndex(vec![1, 0])).unwrap();
    assert_eq!(trace.lead, Elem(2));
    assert!(trace.tail.is_zero());
}

#[test]
fn twisted_coefficient_product() {
    let p = pres_f4_frobenius();
    let r = p.ring();
    let a = r.element_by_name("a").unwrap();
    let b = r.element_by_name("a+1").unwrap();
    // (a x)(b x) = a sigma(b) x^2
    let f = p.monomial(MultiIndex::unit(1, 0), a);
    let g = p.monomial(MultiIndex::unit(1, 0), b);
    let prod = p.mul(&f, &g).unwrap();
    let expected = p.monomial(MultiIndex(vec![2]), r.mul(a, r.mul(b, b)));
    assert_eq!(prod, expected);
}

#[test]
fn commute_past_identities() {
    let p = pres_d_char2();
    let r = p.ring();
    let z = r.element_by_name("z").unwrap();
    // alpha = 0
    let t = p.commute_past(&MultiIndex(vec![0]), z).unwrap();
    assert_eq!(t.twisted, z);
    assert!(t.tail.is_zero());
    // x z = z x + 1
    let t = p.commute_past(&MultiIndex(vec![1]), z).unwrap();
    assert_eq!(t.twisted, z);
    assert_eq!(t.tail, p.one());
}

#[test]
fn quasi_commutative_remainders_vanish() {
    for p in [pres_f4z2_triple(), pres_quantum_plane(), pres_zmod4_poly()] {
        assert!(p.classify().quasi_commutative);
        for alpha in monomials_up_to(p.generators(), 4) {
            for r in p.ring().elements() {
                if r == p.ring().zero() {
                    continue;
                }
                let t = p.commute_past(&alpha, r).unwrap();
                assert!(t.tail.is_zero(), "alpha = {alpha:?}, r = {}", p.ring().name(r));
            }
        }
    }
}

#[test]
fn monomial_product_trivial_cases() {
    let p = pres_zmod4_poly();
    let t = p.monomial_product(&MultiIndex(vec![0, 0]), &MultiIndex(vec![2, 1])).unwrap();
    assert_eq!(t.lead, p.ring().one());
    assert!(t.tail.is_zero());
    let t = p.monomial_product(&MultiIndex(vec![1, 2]), &MultiIndex(vec![2, 0])).unwrap();
    assert_eq!(t.lead, p.ring().one());
    assert!(t.tail.is_zero());
}

#[test]
fn classification_flags() {
    let qp = pres_quantum_plane().classify();
    assert!(qp.quasi_commutative && qp.endomorphism_type && qp.bijective && qp.derivation_type);
    let dz = pres_d_char2().classify();
    assert!(dz.derivation_type && !dz.endomorphism_type && !dz.quasi_commutative);
    let fr = pres_f4_frobenius().classify();
    assert!(fr.endomorphism_type && !fr.derivation_type && fr.bijective);
    let tri = pres_f4z2_triple().classify();
    assert!(tri.quasi_commutative && tri.endomorphism_type && tri.bijective);
}

#[test]
fn validation_passes_on_consistent_presentations() {
    let opts = ValidateOptions { random_triples: 200, degree: 3, seed: 7 };
    for p in [
        pres_d_char2(),
        pres_quantum_plane(),
        pres_zmod4_poly(),
        pres_f4_frobenius(),
        pres_f4z2_triple(),
    ] {
        let rep = p.validate(&opts).unwrap();
        assert!(rep.exhaustive_triples > 0);
    }
}

#[test]
fn validation_catches_inconsistent_six_map_presentation() {
    let p = pres_f4z2_six_inconsistent();
    let opts = ValidateOptions { random_triples: 50, degree: 2, seed: 0 };
    match p.validate(&opts) {
        Err(PbwError::Associativity(_)) | Err(PbwError::RouteDisagreement(_)) => {}
        other => panic!("expected an associativity violation, got {other:?}"),
    }
}

#[test]
fn nilpotency_bounded_examples() {
    let p = pres_f4z2_triple();
    let r = p.ring();
    let z = r.element_by_name("z").unwrap();
    // constant z
    let f = p.constant(z);
    assert_eq!(is_nilpotent_bounded(&p, &f, 8).unwrap(), NilpotencyVerdict::Nilpotent(2));
    // z x_2 with sigma_2(z) = a z: (z x_2)^2 = z sigma(z) x^2 = a z^2 x^2 = 0
    let f = p.monomial(MultiIndex::unit(3, 1), z);
    assert_eq!(is_nilpotent_bounded(&p, &f, 8).unwrap(), NilpotencyVerdict::Nilpotent(2));
    // a bare generator is never nilpotent
    let f = p.monomial(MultiIndex::unit(3, 0), r.one());
    assert_eq!(is_nilpotent_bounded(&p, &f, 8).unwrap(), NilpotencyVerdict::NotWithin(8));
}

#[test]
fn skew_cn_bounded_passes() {
    let opts = BoundedOptions { term_cap: 2, ..Default::default() };
    let rep = check_skew_cn_bounded(&pres_f4z2_triple(), &opts).unwrap();
    assert!(matches!(rep.verdict, Verdict::BoundedPass { .. }), "{:?}", rep.verdict);
    let rep = check_skew_cn_bounded(&pres_zmod4_poly(), &opts).unwrap();
    assert!(matches!(rep.verdict, Verdict::BoundedPass { .. }));
}

#[test]
fn derivation_type_char2_is_not_cn() {
    // z x^2 + x squares to zero although 1 is not nilpotent in R:
    // the d/dz extension genuinely violates N(A) <= N(R)A
    let p = pres_d_char2();
    let r = p.ring();
    let z = r.element_by_name("z").unwrap();
    let f = p.add(
        &p.monomial(MultiIndex(vec![2]), z),
        &p.monomial(MultiIndex(vec![1]), r.one()),
    );
    assert_eq!(is_nilpotent_bounded(&p, &f, 4).unwrap(), NilpotencyVerdict::Nilpotent(2));
    let rep = check_skew_cn_bounded(&p, &BoundedOptions::default()).unwrap();
    assert!(rep.verdict.fails(), "{:?}", rep.verdict);
}

#[test]
fn sqa1_bounded_no_candidates_on_rigid_and_f4z2() {
    let opts = BoundedOptions { term_cap: 2, ..Default::default() };
    let rep = check_sqa1_bounded(&pres_f4_frobenius(), 1, &opts).unwrap();
    assert!(matches!(rep.verdict, Verdict::BoundedPass { .. }));
    let rep = check_sqa1_bounded(&pres_f4z2_triple(), 1, &opts).unwrap();
    assert!(matches!(rep.verdict, Verdict::BoundedPass { .. }));
}

#[test]
fn a_level_bounded_checks_pass() {
    let opts = BoundedOptions { term_cap: 2, pair_budget: 2000, ..Default::default() };
    let rep = check_a_property_bounded(&pres_f4_frobenius(), AProperty::Reflexive, &opts).unwrap();
    assert!(matches!(rep.verdict, Verdict::BoundedPass { .. }));
    let rep = check_a_property_bounded(&pres_f4z2_triple(), AProperty::Rnp, &opts).unwrap();
    assert!(matches!(rep.verdict, Verdict::BoundedPass { .. }));
    let rep =
        check_a_property_bounded(&pres_f4z2_triple(), AProperty::SigmaBarSkewRnpRight, &opts).unwrap();
    assert!(matches!(rep.verdict, Verdict::BoundedPass { .. }));
}

#[test]
fn extended_maps_on_catalog_presentations() {
    let opts = ExtendOptions { random_pairs: 100, degree: 3, seed: 1 };
    for p in [pres_f4z2_triple(), pres_quantum_plane(), pres_f4_frobenius()] {
        for k in 0..p.generators() {
            let m = extend_sigma(&p, k, &opts).unwrap();
            // restricted to degree 0, sigma_bar_k is sigma_k
            for r in p.ring().elements() {
                let img = m.apply(&p.constant(r));
                assert_eq!(img, p.constant(p.sigma().get(k).apply(r)));
            }
        }
    }
    // derivation-type: delta_bar satisfies the twisted Leibniz law
    let p = pres_d_char2();
    extend_sigma(&p, 0, &opts).unwrap();
    extend_delta(&p, 0, &opts).unwrap();
}

#[test]
fn extension_refused_when_delta_hits_d_constant() {
    // n = 2 over F2[z]/(z^2): delta_1 = d/dz, d_{1,2} = z so delta_1(d_{1,2}) = 1
    let r = f2z2();
    let id = RingMap::identity(r.clone());
    let z = r.element_by_name("z").unwrap();
    let one = r.one();
    let table: Vec<usize> = r
        .elements()
        .map(|e| if e == z || e == r.add(one, z) { one.0 } else { r.zero().0 })
        .collect();
    let ddz = SigmaDerivation::new(r.clone(), id.clone(), table).unwrap();
    let sigma = EndoFamily::new(r.clone(), vec![id.clone(), id.clone()]).unwrap();
    let delta =
        DerivationFamily::new(&sigma, vec![ddz, SigmaDerivation::zero(r.clone(), id)]).unwrap();
    let p = Arc::new(
        PbwPresentation::new(r.clone(), sigma, delta, vec![z], vec![vec![r.zero(); 3]]).unwrap(),
    );
    match extend_sigma(&p, 0, &ExtendOptions::default()) {
        Err(PbwError::Hypothesis { equation, .. }) => {
            assert!(equation.contains("delta_1(d_1,2)"), "{equation}");
        }
        Ok(_) => panic!("expected hypothesis refusal, got success"),
        Err(other) => panic!("expected hypothesis refusal, got {other:?}"),
    }
}

#[test]
fn left_freeness_surrogate_low_degree() {
    // distinct coefficient tuples yield distinct normal forms
    let p = pres_d_char2();
    let r = p.ring();
    let mut seen = std::collections::HashSet::new();
    for c0 in r.elements() {
        for c1 in r.elements() {
            for c2 in r.elements() {
                let e = PbwExpr::Sum(vec![
                    PbwExpr::Coeff(c0),
                    PbwExpr::Prod(vec![PbwExpr::Coeff(c1), PbwExpr::Gen(0)]),
                    PbwExpr::Prod(vec![PbwExpr::Coeff(c2), PbwExpr::Gen(0), PbwExpr::Gen(0)]),
                ]);
                let nf = normalize(&p, &e).unwrap();
                let key = format!("{nf:?}");
                assert!(seen.insert(key), "collision at ({c0:?},{c1:?},{c2:?})");
            }
        }
    }
}

#[test]
fn normalize_invariant_under_reassociation() {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    let p = pres_f4z2_triple();
    let r = p.ring();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        // random flat word of atoms
        let len = rng.random_range(2..6);
        let atoms: Vec<PbwExpr> = (0..len)
            .map(|_| {
                if rng.random_range(0..2) == 0 {
                    PbwExpr::Coeff(Elem(rng.random_range(0..r.size())))
                } else {
                    PbwExpr::Gen(rng.random_range(0..p.generators()))
                }
            })
            .collect();
        let flat = PbwExpr::Prod(atoms.clone());
        // random re-association as a nested binary tree
        fn nest(rng: &mut rand_chacha::ChaCha8Rng, atoms: &[PbwExpr]) -> PbwExpr {
            if atoms.len() == 1 {
                return atoms[0].clone();
            }
            let split = rng.random_range(1..atoms.len());
            PbwExpr::Prod(vec![nest(rng, &atoms[..split]), nest(rng, &atoms[split..])])
        }
        let nested = nest(&mut rng, &atoms);
        assert_eq!(normalize(&p, &flat).unwrap(), normalize(&p, &nested).unwrap());
    }
}

#[test]
fn poly_json_round_trip() {
    let p = pres_quantum_plane();
    let f = p.add(
        &p.monomial(MultiIndex(vec![1, 2]), Elem(3)),
        &p.monomial(MultiIndex(vec![0, 0]), Elem(4)),
    );
    let v = f.to_json();
    let back = PbwPoly::from_json(p.ring(), 2, &v).unwrap();
    assert_eq!(f, back);
}

#[test]
fn deg_lex_order_is_graded() {
    let a = MultiIndex(vec![0, 1]);
    let b = MultiIndex(vec![1, 0]);
    assert!(a > b); // x2 dominates x1
    let c = MultiIndex(vec![2, 0]);
    assert!(c > a); // degree first
    let monos = monomials_up_to(2, 2);
    assert_eq!(monos.len(), 6);
    assert!(monos.windows(2).all(|w| w[0] < w[1]));
}
