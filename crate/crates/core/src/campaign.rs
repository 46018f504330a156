//! The fixed theorem-replay suite over the catalog and the free-form
//! falsification campaign. Every row is one (check, bundle) pair; any
//! counterexample or unconfirmed candidate fails the run, because the
//! underlying statements are theorems and a violation indicates an
//! implementation bug.

use crate::catalog::Bundle;
use crate::localization::{check_rnp_transfer, localize, localize_pbw, validate_mult_set, LocalizationError, DEGENERACY_NOTE};
use crate::morphism::{MapError, MixedClosure};
use crate::pbw::bounded::{check_a_property_bounded, check_skew_cn_bounded, check_sqa1_bounded, AProperty, BoundedOptions};
use crate::pbw::{extend_sigma, ExtendOptions, PbwError, ValidateOptions};
use crate::property::{
    composition_check, decide, decide_skew, implication_campaign, single_skew_reflexive,
    single_skew_rnp, CampaignMode, FalsifySpec, ImplicationOutcome, LabError, Subject,
};
use crate::report::{PropertyId, Side, Verdict};
use crate::ring::{Elem, RingError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("{0}")]
    Lab(#[from] LabError),
    #[error("{0}")]
    Pbw(#[from] PbwError),
    #[error("{0}")]
    Map(#[from] MapError),
    #[error("{0}")]
    Ring(#[from] RingError),
    #[error("{0}")]
    Localization(#[from] LocalizationError),
    #[error("unknown bundle {0}")]
    UnknownBundle(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Pass,
    BoundedPass,
    Vacuous,
    Skipped,
    Counterexample,
    Candidate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CampaignRow {
    pub section: String,
    pub check: String,
    pub bundle: String,
    pub status: RowStatus,
    pub detail: String,
}

fn row(section: &str, check: &str, bundle: &str, status: RowStatus, detail: impl Into<String>) -> CampaignRow {
    CampaignRow {
        section: section.into(),
        check: check.into(),
        bundle: bundle.into(),
        status,
        detail: detail.into(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CampaignReport {
    pub tool_version: String,
    pub seed: u64,
    pub degree: u32,
    pub nilpotency_bound: u32,
    pub middle_degree: u32,
    pub counterexamples: u64,
    pub candidates: u64,
    pub rows: Vec<CampaignRow>,
}

impl CampaignReport {
    pub fn ok(&self) -> bool {
        self.counterexamples == 0 && self.candidates == 0
    }

    /// Deterministic pretty JSON: fixed field order, rows sorted, no floats.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,check,bundle,status,detail\n");
        for r in &self.rows {
            let esc = |s: &str| {
                if s.contains(',') || s.contains('"') || s.contains('\n') {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.to_string()
                }
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                esc(&r.section),
                esc(&r.check),
                esc(&r.bundle),
                serde_json::to_value(r.status).unwrap().as_str().unwrap(),
                esc(&r.detail)
            ));
        }
        out
    }
}

#[derive(Copy, Clone, Debug)]
pub struct CampaignOptions {
    pub seed: u64,
    pub bounds: BoundedOptions,
    pub validate_triples: usize,
    pub extend_pairs: usize,
    pub jobs: usize,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        CampaignOptions {
            seed: 0,
            bounds: BoundedOptions::default(),
            validate_triples: 10_000,
            extend_pairs: 1000,
            jobs: 1,
        }
    }
}

fn verdict_rows(
    section: &str,
    check: &str,
    bundle: &str,
    verdict: &Verdict,
    expect_holds: bool,
) -> CampaignRow {
    let status = match (verdict, expect_holds) {
        (Verdict::Holds, true) => RowStatus::Pass,
        (Verdict::BoundedPass { .. }, true) => RowStatus::BoundedPass,
        (Verdict::Fails { .. }, false) => RowStatus::Pass,
        (Verdict::Candidate { .. }, _) => RowStatus::Candidate,
        (Verdict::Fails { witness }, true) => {
            return row(
                section,
                check,
                bundle,
                RowStatus::Counterexample,
                format!("{}: {}", witness.equation, serde_json::to_string(&witness.items).unwrap()),
            )
        }
        (Verdict::Holds | Verdict::BoundedPass { .. }, false) => {
            return row(section, check, bundle, RowStatus::Counterexample, "expected failure but the property holds")
        }
    };
    let detail = match verdict {
        Verdict::Fails { witness } => format!("fails as expected: {}", witness.equation),
        Verdict::BoundedPass { bounds } => format!(
            "bounded pass at degree {} / exponent {} / middle {} ({} candidates{})",
            bounds.degree,
            bounds.nilpotency_bound,
            bounds.middle_degree,
            bounds.candidates,
            if bounds.exhaustive { "" } else { ", sampled" }
        ),
        _ => String::new(),
    };
    row(section, check, bundle, status, detail)
}

/// True when the bundle's family is Sigma-compatible (exact check).
fn is_compatible(b: &Bundle) -> Result<bool, CampaignError> {
    match &b.sigma {
        None => Ok(false),
        Some(fam) => Ok(decide_skew(&b.ring, fam, b.delta.as_ref(), PropertyId::SigmaCompatible)?
            .verdict
            .holds()),
    }
}

fn is_sd_compatible(b: &Bundle) -> Result<bool, CampaignError> {
    match (&b.sigma, &b.delta) {
        (Some(fam), Some(del)) => {
            let s = decide_skew(&b.ring, fam, Some(del), PropertyId::SigmaCompatible)?.verdict.holds();
            let d = decide_skew(&b.ring, fam, Some(del), PropertyId::DeltaCompatible)?.verdict.holds();
            Ok(s && d)
        }
        _ => Ok(false),
    }
}

// ---- section 1: the trivial-extension example over Z_p surrogates ----

fn section_example_s2(bundles: &[Bundle]) -> Result<Vec<CampaignRow>, CampaignError> {
    const SEC: &str = "example_s2";
    let mut rows = Vec::new();
    for b in bundles.iter().filter(|b| b.name.starts_with("s2_z") && b.name.len() == 5) {
        let fam = b.sigma.as_ref().expect("s2 bundles carry sigma");
        let (s2, s3) = (fam.get(1), fam.get(2));
        let c23 = s2.compose(s3);
        let c32 = s3.compose(s2);
        let compose_ok = c23.table() == s3.table() && c32.table() == s3.table();
        rows.push(row(
            SEC,
            "sigma2.sigma3 = sigma3.sigma2 = sigma3",
            &b.name,
            if compose_ok { RowStatus::Pass } else { RowStatus::Counterexample },
            "",
        ));
        let closure = fam.closure()?;
        rows.push(row(
            SEC,
            "closure is a monoid of 3 maps",
            &b.name,
            if closure.len() == 3 && closure.is_monoid() {
                RowStatus::Pass
            } else {
                RowStatus::Counterexample
            },
            format!("{} maps", closure.len()),
        ));
        let rep = decide_skew(&b.ring, fam, None, PropertyId::SigmaSkewReflexiveRight)?;
        rows.push(verdict_rows(SEC, "right sigma-skew reflexive", &b.name, &rep.verdict, true));
        let rep = decide(&b.ring, PropertyId::Reflexive)?;
        rows.push(verdict_rows(SEC, "reflexive", &b.name, &rep.verdict, true));
        // compatibility fails; the recorded witness pair A = (1,1), B = (0,1)
        // must itself re-check as a violation of a sigma_3(b) = 0 iff ab = 0
        let rep = decide_skew(&b.ring, fam, None, PropertyId::SigmaCompatible)?;
        rows.push(verdict_rows(SEC, "sigma-compatible fails", &b.name, &rep.verdict, false));
        let p = (b.ring.size() as f64).sqrt() as usize;
        let a = Elem(p + 1); // (1, 1)
        let bb = Elem(1); // (0, 1)
        let s3b = s3.apply(bb);
        let paper_pair_violates =
            b.ring.mul(a, s3b) == b.ring.zero() && b.ring.mul(a, bb) != b.ring.zero();
        rows.push(row(
            SEC,
            "text witness pair violates compatibility",
            &b.name,
            if paper_pair_violates { RowStatus::Pass } else { RowStatus::Counterexample },
            format!("A = {}, B = {}", b.ring.name(a), b.ring.name(bb)),
        ));
        // N(S2) is the zero-diagonal set
        let nil_ok = b.ring.nilpotents().indices() == (0..p).collect::<Vec<_>>();
        rows.push(row(
            SEC,
            "nilpotents are the zero-diagonal pairs",
            &b.name,
            if nil_ok { RowStatus::Pass } else { RowStatus::Counterexample },
            format!("{} elements", b.ring.nilpotents().len()),
        ));
        let rep = decide_skew(&b.ring, fam, None, PropertyId::SigmaSkewRnpRight)?;
        rows.push(verdict_rows(SEC, "right sigma-skew RNP", &b.name, &rep.verdict, true));
    }
    Ok(rows)
}

// ---- section 2: F4[z]/(z^2) with the six maps ----

fn section_example_f4z2(bundles: &[Bundle], opts: &CampaignOptions) -> Result<Vec<CampaignRow>, CampaignError> {
    const SEC: &str = "example_f4z2";
    let mut rows = Vec::new();
    let Some(b) = bundles.iter().find(|b| b.name == "f4_z2_sigma6") else {
        return Ok(rows);
    };
    let fam = b.sigma.as_ref().unwrap();
    for (i, m) in fam.maps().iter().enumerate() {
        let rep = crate::morphism::check_endomorphism(&b.ring, m.table());
        rows.push(row(
            SEC,
            &format!("map {} is a valid endomorphism", i + 1),
            &b.name,
            if rep.valid && rep.injective { RowStatus::Pass } else { RowStatus::Counterexample },
            "",
        ));
    }
    let closure = fam.closure()?;
    let id_table: Vec<usize> = (0..b.ring.size()).collect();
    let id_is_generator = fam.get(0).table() == id_table.as_slice();
    rows.push(row(
        SEC,
        "closure has exactly 6 maps with identity = sigma_{1,0}",
        &b.name,
        if closure.len() == 6 && id_is_generator && closure.is_monoid() {
            RowStatus::Pass
        } else {
            RowStatus::Counterexample
        },
        format!("{} maps", closure.len()),
    ));
    let z = b.ring.element_by_name("z").unwrap();
    let nil = b.ring.nilpotents();
    let nil_ok = nil.len() == 4 && nil.indices() == b.ring.ideal_generated_by(&[z]).indices();
    rows.push(row(
        SEC,
        "nilpotents = the four multiples of z",
        &b.name,
        if nil_ok { RowStatus::Pass } else { RowStatus::Counterexample },
        "",
    ));
    let rep = decide_skew(&b.ring, fam, None, PropertyId::SigmaSkewRnpRight)?;
    rows.push(verdict_rows(SEC, "right sigma-skew RNP", &b.name, &rep.verdict, true));
    let rep = decide_skew(&b.ring, fam, None, PropertyId::SigmaCompatible)?;
    rows.push(verdict_rows(SEC, "sigma-compatible", &b.name, &rep.verdict, true));
    let pres = b.presentation.as_ref().unwrap();
    let rep = check_skew_cn_bounded(pres, &opts.bounds)?;
    rows.push(verdict_rows(SEC, "sigma-skew CN (bounded)", &b.name, &rep.verdict, true));
    Ok(rows)
}

// ---- section 3: compatibility lemma suites ----

fn section_lemmas(bundles: &[Bundle]) -> Result<Vec<CampaignRow>, CampaignError> {
    let rows: Vec<Vec<CampaignRow>> = bundles
        .par_iter()
        .map(|b| lemma_rows_for(b))
        .collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn lemma_rows_for(b: &Bundle) -> Result<Vec<CampaignRow>, CampaignError> {
    const SEC: &str = "lemma_suites";
    let mut rows = Vec::new();
    let Some(fam) = &b.sigma else { return Ok(rows) };
    if !is_compatible(b)? {
        rows.push(row(SEC, "compatibility lemmas", &b.name, RowStatus::Vacuous, "family is not sigma-compatible"));
        return Ok(rows);
    }
    let ring = &b.ring;
    let zero = ring.zero();
    let closure = fam.closure()?;
    // (1) ab = 0 forces a sigma(b) = sigma(a) b = 0; (2) sigma(a) b = 0 forces ab = 0
    let mut part12_ok = true;
    'p12: for a in ring.elements() {
        for bb in ring.elements() {
            let ab = ring.mul(a, bb) == zero;
            for m in closure.maps() {
                if ab && (ring.mul(a, m.apply(bb)) != zero || ring.mul(m.apply(a), bb) != zero) {
                    part12_ok = false;
                    break 'p12;
                }
                if !ab && ring.mul(m.apply(a), bb) == zero {
                    part12_ok = false;
                    break 'p12;
                }
            }
        }
    }
    rows.push(row(
        SEC,
        "annihilation transfers across sigma words",
        &b.name,
        if part12_ok { RowStatus::Pass } else { RowStatus::Counterexample },
        "",
    ));
    // (3) with deltas, when (Sigma, Delta)-compatible
    if let Some(del) = &b.delta {
        if is_sd_compatible(b)? {
            let mixed = MixedClosure::compute(fam, del)?;
            let mut part3_ok = true;
            'p3: for a in ring.elements() {
                for bb in ring.elements() {
                    if ring.mul(a, bb) != zero {
                        continue;
                    }
                    for s in closure.maps() {
                        for d in mixed.delta_maps() {
                            if ring.mul(s.apply(a), d.apply(bb)) != zero
                                || ring.mul(d.apply(a), s.apply(bb)) != zero
                            {
                                part3_ok = false;
                                break 'p3;
                            }
                        }
                    }
                }
            }
            rows.push(row(
                SEC,
                "mixed sigma/delta annihilation",
                &b.name,
                if part3_ok { RowStatus::Pass } else { RowStatus::Counterexample },
                "",
            ));
        }
    }
    // six-way nilpotent membership agreement
    let nil = ring.nilpotents();
    let mut six_ok = true;
    'six: for a in ring.elements() {
        for bb in ring.elements() {
            let base = nil.contains(ring.mul(a, bb));
            for m in closure.maps() {
                let checks = [
                    nil.contains(ring.mul(a, m.apply(bb))),
                    nil.contains(ring.mul(m.apply(bb), a)),
                    nil.contains(ring.mul(m.apply(a), bb)),
                    nil.contains(ring.mul(bb, m.apply(a))),
                ];
                if checks.iter().any(|&c| c != base) {
                    six_ok = false;
                    break 'six;
                }
            }
            for m1 in closure.maps() {
                for m2 in closure.maps() {
                    if nil.contains(ring.mul(m1.apply(a), m2.apply(bb))) != base {
                        six_ok = false;
                        break 'six;
                    }
                }
            }
        }
    }
    rows.push(row(
        SEC,
        "six-way nilpotent membership equivalence",
        &b.name,
        if six_ok { RowStatus::Pass } else { RowStatus::Counterexample },
        "",
    ));
    Ok(rows)
}

// ---- section 4: ring-level propositions ----

fn section_propositions(bundles: &[Bundle]) -> Result<Vec<CampaignRow>, CampaignError> {
    let rows: Vec<Vec<CampaignRow>> = bundles
        .par_iter()
        .map(proposition_rows_for)
        .collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn proposition_rows_for(b: &Bundle) -> Result<Vec<CampaignRow>, CampaignError> {
    const SEC: &str = "propositions";
    let mut rows = Vec::new();
    let Some(fam) = &b.sigma else { return Ok(rows) };
    let ring = &b.ring;
    let compatible = is_compatible(b)?;

    // composition of compatible skew reflexive endomorphisms
    for side in [Side::Right, Side::Left] {
        let mut checked = 0;
        let mut skipped = 0;
        let mut bad = None;
        for s in fam.maps() {
            for t in fam.maps() {
                let rep = composition_check(ring, s, t, side);
                if !rep.preconditions_hold {
                    skipped += 1;
                    continue;
                }
                checked += 1;
                if !rep.composite_verdict.as_ref().unwrap().holds() {
                    bad = Some(rep);
                }
            }
        }
        let name = format!("composition preserves {:?}-skew reflexivity", side).to_lowercase();
        rows.push(match bad {
            Some(_) => row(SEC, &name, &b.name, RowStatus::Counterexample, "composite lost the property"),
            None if checked == 0 => row(SEC, &name, &b.name, RowStatus::Vacuous, format!("{skipped} pairs failed preconditions")),
            None => row(SEC, &name, &b.name, RowStatus::Pass, format!("{checked} pairs checked, {skipped} skipped")),
        });
    }

    if compatible {
        // family skew reflexive iff every generator skew reflexive
        for (side, fam_prop) in [
            (Side::Right, PropertyId::SigmaSkewReflexiveRight),
            (Side::Left, PropertyId::SigmaSkewReflexiveLeft),
        ] {
            let family_holds = decide_skew(ring, fam, None, fam_prop)?.verdict.holds();
            let each = fam.maps().iter().all(|m| single_skew_reflexive(ring, m, side).verdict.holds());
            rows.push(row(
                SEC,
                &format!("family {:?}-skew reflexive iff each generator is", side).to_lowercase(),
                &b.name,
                if family_holds == each { RowStatus::Pass } else { RowStatus::Counterexample },
                format!("family: {family_holds}, generators: {each}"),
            ));
        }
        // family skew RNP iff every generator skew RNP
        for (side, fam_prop) in [
            (Side::Right, PropertyId::SigmaSkewRnpRight),
            (Side::Left, PropertyId::SigmaSkewRnpLeft),
        ] {
            let family_holds = decide_skew(ring, fam, None, fam_prop)?.verdict.holds();
            let each = fam.maps().iter().all(|m| single_skew_rnp(ring, m, side).verdict.holds());
            rows.push(row(
                SEC,
                &format!("family {:?}-skew RNP iff each generator is", side).to_lowercase(),
                &b.name,
                if family_holds == each { RowStatus::Pass } else { RowStatus::Counterexample },
                format!("family: {family_holds}, generators: {each}"),
            ));
        }
        // compatible semiprime rings are skew reflexive on both sides
        if decide(ring, PropertyId::Semiprime)?.verdict.holds() {
            let right = decide_skew(ring, fam, None, PropertyId::SigmaSkewReflexiveRight)?.verdict.holds();
            let left = decide_skew(ring, fam, None, PropertyId::SigmaSkewReflexiveLeft)?.verdict.holds();
            rows.push(row(
                SEC,
                "compatible semiprime implies sigma-skew reflexive",
                &b.name,
                if right && left { RowStatus::Pass } else { RowStatus::Counterexample },
                "",
            ));
        } else {
            rows.push(row(SEC, "compatible semiprime implies sigma-skew reflexive", &b.name, RowStatus::Vacuous, "not semiprime"));
        }
        // RNP iff right skew RNP iff left skew RNP
        let rnp = decide(ring, PropertyId::Rnp)?.verdict.holds();
        let right = decide_skew(ring, fam, None, PropertyId::SigmaSkewRnpRight)?.verdict.holds();
        let left = decide_skew(ring, fam, None, PropertyId::SigmaSkewRnpLeft)?.verdict.holds();
        rows.push(row(
            SEC,
            "RNP iff right iff left sigma-skew RNP",
            &b.name,
            if rnp == right && right == left { RowStatus::Pass } else { RowStatus::Counterexample },
            format!("rnp: {rnp}, right: {right}, left: {left}"),
        ));
        // reflexive iff right iff left sigma-skew reflexive
        let refl = decide(ring, PropertyId::Reflexive)?.verdict.holds();
        let right = decide_skew(ring, fam, None, PropertyId::SigmaSkewReflexiveRight)?.verdict.holds();
        let left = decide_skew(ring, fam, None, PropertyId::SigmaSkewReflexiveLeft)?.verdict.holds();
        rows.push(row(
            SEC,
            "reflexive iff right iff left sigma-skew reflexive",
            &b.name,
            if refl == right && right == left { RowStatus::Pass } else { RowStatus::Counterexample },
            format!("reflexive: {refl}, right: {right}, left: {left}"),
        ));
        // nil-reversible and compatible implies sigma-skew RNP
        if decide(ring, PropertyId::NilReversible)?.verdict.holds() {
            let ok = decide_skew(ring, fam, None, PropertyId::SigmaSkewRnpRight)?.verdict.holds()
                && decide_skew(ring, fam, None, PropertyId::SigmaSkewRnpLeft)?.verdict.holds();
            rows.push(row(
                SEC,
                "nil-reversible and compatible implies sigma-skew RNP",
                &b.name,
                if ok { RowStatus::Pass } else { RowStatus::Counterexample },
                "",
            ));
        } else {
            rows.push(row(SEC, "nil-reversible and compatible implies sigma-skew RNP", &b.name, RowStatus::Vacuous, "not nil-reversible"));
        }
    }

    // rigid families force reduced + reflexive + skew RNP
    let rigid = decide_skew(ring, fam, None, PropertyId::SigmaRigid)?.verdict.holds();
    if rigid {
        let ok = decide(ring, PropertyId::Reduced)?.verdict.holds()
            && decide(ring, PropertyId::Reflexive)?.verdict.holds()
            && decide_skew(ring, fam, None, PropertyId::SigmaSkewRnpRight)?.verdict.holds()
            && decide_skew(ring, fam, None, PropertyId::SigmaSkewRnpLeft)?.verdict.holds();
        rows.push(row(
            SEC,
            "sigma-rigid implies reduced, reflexive and sigma-skew RNP",
            &b.name,
            if ok { RowStatus::Pass } else { RowStatus::Counterexample },
            "",
        ));
    } else {
        rows.push(row(SEC, "sigma-rigid implies reduced, reflexive and sigma-skew RNP", &b.name, RowStatus::Vacuous, "family is not rigid"));
    }
    Ok(rows)
}

// ---- section 5: the classical implication lattice ----

const LATTICE: &[(&str, &[PropertyId], &[PropertyId])] = &[
    ("reduced => symmetric", &[PropertyId::Reduced], &[PropertyId::Symmetric]),
    ("symmetric => reversible", &[PropertyId::Symmetric], &[PropertyId::Reversible]),
    ("reversible => reflexive and IFP", &[PropertyId::Reversible], &[PropertyId::Reflexive, PropertyId::Ifp]),
    ("reflexive and IFP => reversible", &[PropertyId::Reflexive, PropertyId::Ifp], &[PropertyId::Reversible]),
    ("reflexive => RNP", &[PropertyId::Reflexive], &[PropertyId::Rnp]),
    ("RNP => nil-reflexive", &[PropertyId::Rnp], &[PropertyId::NilReflexive]),
    ("2-primal => NI", &[PropertyId::TwoPrimal], &[PropertyId::Ni]),
    ("IFP => abelian", &[PropertyId::Ifp], &[PropertyId::Abelian]),
    ("reversible => reflexive (via semiprime route)", &[PropertyId::Semiprime], &[PropertyId::Reflexive]),
];

fn section_lattice(bundles: &[Bundle]) -> Result<Vec<CampaignRow>, CampaignError> {
    const SEC: &str = "implication_lattice";
    let subjects: Vec<Subject<'_>> = bundles.iter().map(|b| b.subject()).collect();
    let mut rows = Vec::new();
    for (name, hyps, concls) in LATTICE {
        let result = implication_campaign(&subjects, hyps, concls, &CampaignMode::Implies)?;
        for r in result {
            let status = match r.outcome {
                ImplicationOutcome::Confirmed => RowStatus::Pass,
                ImplicationOutcome::Vacuous => RowStatus::Vacuous,
                ImplicationOutcome::Counterexample => RowStatus::Counterexample,
                ImplicationOutcome::Skipped => RowStatus::Skipped,
            };
            rows.push(row(SEC, name, &r.bundle, status, r.witness.map(|w| w.equation).unwrap_or_default()));
        }
    }
    // strictness: some catalog ring separates reflexive from IFP
    let separator = bundles.iter().find_map(|b| {
        let refl = decide(&b.ring, PropertyId::Reflexive).ok()?.verdict.holds();
        let ifp = decide(&b.ring, PropertyId::Ifp).ok()?.verdict.holds();
        (refl != ifp).then(|| b.name.clone())
    });
    rows.push(match separator {
        Some(name) => row(SEC, "a catalog ring separates reflexive from IFP", &name, RowStatus::Pass, ""),
        None => row(SEC, "a catalog ring separates reflexive from IFP", "-", RowStatus::Counterexample, "no separating ring found"),
    });
    Ok(rows)
}

// ---- section 6: presentation validation, commutation identities, extensions ----

fn section_pbw(bundles: &[Bundle], opts: &CampaignOptions) -> Result<Vec<CampaignRow>, CampaignError> {
    let rows: Vec<Vec<CampaignRow>> = bundles
        .par_iter()
        .map(|b| pbw_rows_for(b, opts))
        .collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn pbw_rows_for(b: &Bundle, opts: &CampaignOptions) -> Result<Vec<CampaignRow>, CampaignError> {
    const SEC: &str = "pbw_engine";
    let mut rows = Vec::new();
    let Some(pres) = &b.presentation else { return Ok(rows) };
    let vopts = ValidateOptions { random_triples: opts.validate_triples, degree: 3, seed: opts.seed };
    match pres.validate(&vopts) {
        Ok(rep) => rows.push(row(
            SEC,
            "associativity and route agreement",
            &b.name,
            RowStatus::Pass,
            format!("{} exhaustive + {} random triples, {} cross-checks", rep.exhaustive_triples, rep.random_triples, rep.route_cross_checks),
        )),
        Err(e) => rows.push(row(SEC, "associativity and route agreement", &b.name, RowStatus::Counterexample, e.to_string())),
    }
    // commutation identities x^alpha r = sigma^alpha(r) x^alpha + p, |alpha| <= 4
    let monos = crate::pbw::bounded::monomials_up_to(pres.generators(), 4);
    let qc = pres.classify().quasi_commutative;
    let mut checked = 0u64;
    let mut tails_zero = true;
    for alpha in &monos {
        for r in pres.ring().elements() {
            if r == pres.ring().zero() {
                continue;
            }
            let trace = pres.commute_past(alpha, r)?;
            checked += 1;
            if !trace.tail.is_zero() {
                tails_zero = false;
            }
        }
    }
    let qc_consistent = !qc || tails_zero;
    rows.push(row(
        SEC,
        "commutation identities to degree 4",
        &b.name,
        if qc_consistent { RowStatus::Pass } else { RowStatus::Counterexample },
        format!("{checked} identities checked; remainders {}", if tails_zero { "all zero" } else { "nonzero (as expected off quasi-commutative data)" }),
    ));
    // extended maps under the commuting/annihilation hypothesis bundle
    let eopts = ExtendOptions { random_pairs: opts.extend_pairs, degree: 3, seed: opts.seed };
    let mut all_ok = true;
    let mut refused: Option<String> = None;
    for k in 0..pres.generators() {
        match extend_sigma(pres, k, &eopts) {
            Ok(map) => {
                // restricted to degree zero the extension is sigma_k itself
                for r in pres.ring().elements() {
                    if map.apply(&pres.constant(r)) != pres.constant(pres.sigma().get(k).apply(r)) {
                        all_ok = false;
                    }
                }
            }
            Err(PbwError::Hypothesis { equation, .. }) => refused = Some(equation),
            Err(e) => return Err(e.into()),
        }
    }
    rows.push(match refused {
        Some(eq) => row(SEC, "coefficientwise sigma extensions", &b.name, RowStatus::Skipped, format!("refused: {eq}")),
        None => row(
            SEC,
            "coefficientwise sigma extensions",
            &b.name,
            if all_ok { RowStatus::Pass } else { RowStatus::Counterexample },
            format!("{} generators extended", pres.generators()),
        ),
    });
    Ok(rows)
}

// ---- section 7: bounded A-level theorems ----

fn section_bounded(bundles: &[Bundle], opts: &CampaignOptions) -> Result<Vec<CampaignRow>, CampaignError> {
    let rows: Vec<Vec<CampaignRow>> = bundles
        .par_iter()
        .map(|b| bounded_rows_for(b, opts))
        .collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn bounded_rows_for(b: &Bundle, opts: &CampaignOptions) -> Result<Vec<CampaignRow>, CampaignError> {
    const SEC: &str = "bounded_theorems";
    let mut rows = Vec::new();
    let Some(pres) = &b.presentation else { return Ok(rows) };
    let ring = &b.ring;
    let mut bopts = opts.bounds;
    bopts.seed = opts.seed;
    // (SQA1) at degree 1 pairs
    let sqa1 = check_sqa1_bounded(pres, 1, &bopts)?;
    rows.push(verdict_rows(SEC, "(SQA1) condition (bounded)", &b.name, &sqa1.verdict, true));
    let sqa1_clean = sqa1.verdict.passed();
    let flags = pres.classify();
    let pres_fam = pres.sigma();
    let pres_del = pres.delta();
    // coefficient nilpotency N(A) <= N(R)A: guaranteed over weak
    // (Sigma, Delta)-compatible NI coefficients; elsewhere the search verdict
    // is informative and a verified hit is a genuine non-CN witness
    let cn = check_skew_cn_bounded(pres, &bopts)?;
    let cn_guaranteed = decide(ring, PropertyId::Ni)?.verdict.holds()
        && decide_skew(ring, pres_fam, Some(pres_del), PropertyId::WeakSigmaCompatible)?.verdict.holds()
        && decide_skew(ring, pres_fam, Some(pres_del), PropertyId::WeakDeltaCompatible)?.verdict.holds();
    rows.push(match (&cn.verdict, cn_guaranteed) {
        (Verdict::Fails { witness }, false) => row(
            SEC,
            "sigma-skew CN (bounded)",
            &b.name,
            RowStatus::Pass,
            format!(
                "not sigma-skew CN; verified witness: {}",
                witness.detail.clone().unwrap_or_default()
            ),
        ),
        (v, _) => verdict_rows(SEC, "sigma-skew CN (bounded)", &b.name, v, true),
    });
    let cn_clean = cn.verdict.passed();
    let s_compat = decide_skew(ring, pres_fam, Some(pres_del), PropertyId::SigmaCompatible)?.verdict.holds();
    let d_compat = decide_skew(ring, pres_fam, Some(pres_del), PropertyId::DeltaCompatible)?.verdict.holds();
    // quasi-commutative over a skew-reflexive SQA1 ring: A is reflexive (bounded)
    {
        let check = "quasi-commutative over skew-reflexive SQA1 ring: A reflexive (bounded)";
        let skew_refl = decide_skew(ring, pres_fam, None, PropertyId::SigmaSkewReflexiveRight)?.verdict.holds()
            && decide_skew(ring, pres_fam, None, PropertyId::SigmaSkewReflexiveLeft)?.verdict.holds();
        if flags.quasi_commutative && skew_refl && sqa1_clean {
            let rep = check_a_property_bounded(pres, AProperty::Reflexive, &bopts)?;
            rows.push(verdict_rows(SEC, check, &b.name, &rep.verdict, true));
        } else {
            rows.push(row(SEC, check, &b.name, RowStatus::Vacuous, "hypotheses not met"));
        }
    }
    // rigid family: A reflexive (bounded)
    {
        let check = "sigma-rigid: A reflexive (bounded)";
        if decide_skew(ring, pres_fam, None, PropertyId::SigmaRigid)?.verdict.holds() {
            let rep = check_a_property_bounded(pres, AProperty::Reflexive, &bopts)?;
            rows.push(verdict_rows(SEC, check, &b.name, &rep.verdict, true));
        } else {
            rows.push(row(SEC, check, &b.name, RowStatus::Vacuous, "family is not rigid"));
        }
    }
    // transfer theorem: R right skew RNP iff A right skew RNP (bounded A side)
    {
        let check = "R right sigma-skew RNP iff A right sigma-bar-skew RNP (bounded)";
        let hypotheses = s_compat
            && d_compat
            && cn_clean
            && sqa1_clean
            && crate::pbw::extend_sigma(pres, 0, &ExtendOptions { random_pairs: 32, degree: 2, seed: opts.seed }).is_ok();
        if hypotheses {
            let r_side = decide_skew(ring, pres_fam, None, PropertyId::SigmaSkewRnpRight)?.verdict.holds();
            if r_side {
                let rep = check_a_property_bounded(pres, AProperty::SigmaBarSkewRnpRight, &bopts)?;
                rows.push(verdict_rows(SEC, check, &b.name, &rep.verdict, true));
            } else {
                rows.push(row(
                    SEC,
                    check,
                    &b.name,
                    RowStatus::Skipped,
                    "R side fails; the bounded A side cannot certify the matching failure",
                ));
            }
        } else {
            rows.push(row(SEC, check, &b.name, RowStatus::Vacuous, "hypotheses not met"));
        }
    }
    // over a compatible NI coefficient ring, A nil-reflexive iff A RNP:
    // under NI the two bounded searches coincide on N(A); run the RNP search
    {
        let check = "NI coefficients: A RNP (bounded; nil-reflexive equivalent under NI)";
        let ni = decide(ring, PropertyId::Ni)?.verdict.holds();
        if ni && s_compat && d_compat {
            let rep = check_a_property_bounded(pres, AProperty::Rnp, &bopts)?;
            rows.push(verdict_rows(SEC, check, &b.name, &rep.verdict, true));
        } else {
            rows.push(row(SEC, check, &b.name, RowStatus::Vacuous, "hypotheses not met"));
        }
    }
    Ok(rows)
}

// ---- section 8: localization ----

fn section_localization(bundles: &[Bundle]) -> Result<Vec<CampaignRow>, CampaignError> {
    let rows: Vec<Vec<CampaignRow>> = bundles
        .par_iter()
        .map(localization_rows_for)
        .collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn localization_rows_for(b: &Bundle) -> Result<Vec<CampaignRow>, CampaignError> {
    const SEC: &str = "localization";
    let mut rows = Vec::new();
    let set = b.denominators();
    let report = validate_mult_set(&b.ring, &set);
    if !report.valid {
        rows.push(row(SEC, "central units form a denominator set", &b.name, RowStatus::Counterexample, report.violations.join("; ")));
        return Ok(rows);
    }
    let local = localize(&b.ring, &set)?;
    rows.push(row(
        SEC,
        "pair-quotient and canonical representations agree",
        &b.name,
        RowStatus::Pass,
        format!("{} classes; {}", local.ring().size(), DEGENERACY_NOTE),
    ));
    // transported classical verdicts agree
    let mut all_agree = true;
    for p in crate::report::ALL_PROPERTIES.iter().filter(|p| p.is_classical()) {
        let v1 = decide(&b.ring, *p)?.verdict.holds();
        let v2 = decide(local.ring(), *p)?.verdict.holds();
        if v1 != v2 {
            all_agree = false;
        }
    }
    rows.push(row(
        SEC,
        "transported classical verdicts agree",
        &b.name,
        if all_agree { RowStatus::Pass } else { RowStatus::Counterexample },
        "",
    ));
    if let Some(fam) = &b.sigma {
        match check_rnp_transfer(&b.ring, &set, fam) {
            Ok(rep) => rows.push(row(
                SEC,
                "right skew RNP transfers across localization",
                &b.name,
                if rep.agree { RowStatus::Pass } else { RowStatus::Counterexample },
                format!("base: {}, localized: {}", rep.base.verdict.holds(), rep.localized.verdict.holds()),
            )),
            Err(LocalizationError::Unstable(why)) => {
                rows.push(row(SEC, "right skew RNP transfers across localization", &b.name, RowStatus::Vacuous, why))
            }
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(pres) = &b.presentation {
        match localize_pbw(pres, &set) {
            Ok((_, localized)) => {
                let same_flags = localized.classify() == pres.classify();
                let vopts = ValidateOptions { random_triples: 200, degree: 2, seed: 0 };
                let valid = localized.validate(&vopts).is_ok();
                rows.push(row(
                    SEC,
                    "localized presentation validates with preserved flags",
                    &b.name,
                    if same_flags && valid { RowStatus::Pass } else { RowStatus::Counterexample },
                    "",
                ));
            }
            Err(LocalizationError::Unstable(why)) => {
                rows.push(row(SEC, "localized presentation validates with preserved flags", &b.name, RowStatus::Vacuous, why))
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(rows)
}

fn finish(
    mut rows: Vec<CampaignRow>,
    opts: &CampaignOptions,
) -> CampaignReport {
    rows.sort_by(|a, b| {
        (&a.section, &a.check, &a.bundle).cmp(&(&b.section, &b.check, &b.bundle))
    });
    let counterexamples = rows.iter().filter(|r| r.status == RowStatus::Counterexample).count() as u64;
    let candidates = rows.iter().filter(|r| r.status == RowStatus::Candidate).count() as u64;
    CampaignReport {
        tool_version: crate::TOOL_VERSION.to_string(),
        seed: opts.seed,
        degree: opts.bounds.degree,
        nilpotency_bound: opts.bounds.nilpotency,
        middle_degree: opts.bounds.middle_degree,
        counterexamples,
        candidates,
        rows,
    }
}

fn in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    pool.install(f)
}

/// Replays the whole suite over the catalog.
pub fn paper_campaign(bundles: &[Bundle], opts: &CampaignOptions) -> Result<CampaignReport, CampaignError> {
    in_pool(opts.jobs, || {
        let mut rows = Vec::new();
        rows.extend(section_example_s2(bundles)?);
        rows.extend(section_example_f4z2(bundles, opts)?);
        rows.extend(section_lemmas(bundles)?);
        rows.extend(section_propositions(bundles)?);
        rows.extend(section_lattice(bundles)?);
        rows.extend(section_pbw(bundles, opts)?);
        rows.extend(section_bounded(bundles, opts)?);
        rows.extend(section_localization(bundles)?);
        Ok(finish(rows, opts))
    })
}

/// Runs one user-specified implication over the catalog.
pub fn falsify_campaign(
    bundles: &[Bundle],
    spec: &FalsifySpec,
    opts: &CampaignOptions,
) -> Result<CampaignReport, CampaignError> {
    let selected: Vec<&Bundle> = match &spec.catalog {
        None => bundles.iter().collect(),
        Some(names) => {
            let mut out = Vec::new();
            for n in names {
                out.push(
                    crate::catalog::find_bundle(bundles, n)
                        .ok_or_else(|| CampaignError::UnknownBundle(n.clone()))?,
                );
            }
            out
        }
    };
    let subjects: Vec<Subject<'_>> = selected.iter().map(|b| b.subject()).collect();
    let result = implication_campaign(&subjects, &spec.hypotheses, &spec.conclusions, &spec.mode)?;
    let hyp_names: Vec<String> = spec.hypotheses.iter().map(|p| p.name()).collect();
    let rows = result
        .into_iter()
        .map(|r| {
            let status = match r.outcome {
                ImplicationOutcome::Confirmed => RowStatus::Pass,
                ImplicationOutcome::Vacuous => RowStatus::Vacuous,
                ImplicationOutcome::Counterexample => RowStatus::Counterexample,
                ImplicationOutcome::Skipped => RowStatus::Skipped,
            };
            row(
                "falsify",
                &format!("{} => {} [{}]", hyp_names.join(" & "), r.conclusion.name(), r.direction),
                &r.bundle,
                status,
                r.witness.map(|w| w.equation).unwrap_or_default(),
            )
        })
        .collect();
    Ok(finish(rows, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_catalog;

    #[test]
    fn falsify_reversible_implies_reflexive() {
        let cat = builtin_catalog();
        let spec = FalsifySpec {
            hypotheses: vec![PropertyId::Reversible],
            conclusions: vec![PropertyId::Reflexive],
            catalog: None,
            mode: CampaignMode::Implies,
        };
        let rep = falsify_campaign(&cat, &spec, &CampaignOptions::default()).unwrap();
        assert!(rep.ok(), "{}", rep.to_json());
    }

    #[test]
    fn falsify_reflexive_implies_ifp_finds_counterexample() {
        let cat = builtin_catalog();
        let spec = FalsifySpec {
            hypotheses: vec![PropertyId::Reflexive],
            conclusions: vec![PropertyId::Ifp],
            catalog: None,
            mode: CampaignMode::Implies,
        };
        let rep = falsify_campaign(&cat, &spec, &CampaignOptions::default()).unwrap();
        assert!(!rep.ok());
        assert!(rep.rows.iter().any(|r| r.status == RowStatus::Counterexample && r.bundle == "m2_z2"));
    }

    #[test]
    fn falsify_on_named_subset() {
        let cat = builtin_catalog();
        let spec = FalsifySpec {
            hypotheses: vec![PropertyId::SigmaCompatible],
            conclusions: vec![PropertyId::SigmaSkewRnpRight],
            catalog: Some(vec!["f4_z2_sigma6".into(), "zmod4".into()]),
            mode: CampaignMode::Implies,
        };
        let rep = falsify_campaign(&cat, &spec, &CampaignOptions::default()).unwrap();
        assert!(rep.ok(), "{}", rep.to_json());
    }
}
