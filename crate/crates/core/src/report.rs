//! Verdict, witness and report types shared by every decider.
//!
//! Reports serialize to JSON with a fixed field order and no floats, so
//! identical inputs (and seed) produce byte-identical output.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::time::Duration;

/// Every ring / family property the workbench can decide.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyId {
    Reduced,
    Reversible,
    Symmetric,
    Ifp,
    Reflexive,
    IdempotentReflexiveRight,
    IdempotentReflexiveLeft,
    Rnp,
    NilReflexive,
    Ni,
    TwoPrimal,
    Abelian,
    Semiprime,
    PqBaerRight,
    NilReversible,
    SigmaSkewReflexiveRight,
    SigmaSkewReflexiveLeft,
    SigmaSkewRnpRight,
    SigmaSkewRnpLeft,
    SigmaRigid,
    SigmaCompatible,
    DeltaCompatible,
    WeakSigmaCompatible,
    WeakDeltaCompatible,
}

pub const ALL_PROPERTIES: [PropertyId; 24] = [
    PropertyId::Reduced,
    PropertyId::Reversible,
    PropertyId::Symmetric,
    PropertyId::Ifp,
    PropertyId::Reflexive,
    PropertyId::IdempotentReflexiveRight,
    PropertyId::IdempotentReflexiveLeft,
    PropertyId::Rnp,
    PropertyId::NilReflexive,
    PropertyId::Ni,
    PropertyId::TwoPrimal,
    PropertyId::Abelian,
    PropertyId::Semiprime,
    PropertyId::PqBaerRight,
    PropertyId::NilReversible,
    PropertyId::SigmaSkewReflexiveRight,
    PropertyId::SigmaSkewReflexiveLeft,
    PropertyId::SigmaSkewRnpRight,
    PropertyId::SigmaSkewRnpLeft,
    PropertyId::SigmaRigid,
    PropertyId::SigmaCompatible,
    PropertyId::DeltaCompatible,
    PropertyId::WeakSigmaCompatible,
    PropertyId::WeakDeltaCompatible,
];

impl PropertyId {
    /// Properties of the bare ring, decidable without an endomorphism family.
    pub fn is_classical(self) -> bool {
        !self.needs_family()
    }

    pub fn needs_family(self) -> bool {
        matches!(
            self,
            PropertyId::SigmaSkewReflexiveRight
                | PropertyId::SigmaSkewReflexiveLeft
                | PropertyId::SigmaSkewRnpRight
                | PropertyId::SigmaSkewRnpLeft
                | PropertyId::SigmaRigid
                | PropertyId::SigmaCompatible
                | PropertyId::DeltaCompatible
                | PropertyId::WeakSigmaCompatible
                | PropertyId::WeakDeltaCompatible
        )
    }

    pub fn needs_deltas(self) -> bool {
        matches!(self, PropertyId::DeltaCompatible | PropertyId::WeakDeltaCompatible)
    }

    pub fn name(self) -> String {
        serde_json::to_value(self).unwrap().as_str().unwrap().to_string()
    }

    pub fn parse(s: &str) -> Option<PropertyId> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).ok()
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Right,
    Left,
}

/// One element of a counterexample, with its printable name for the report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessItem {
    pub role: String,
    pub index: usize,
    pub name: String,
}

/// A composition word over family generators appearing in a counterexample;
/// the empty word is the identity map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessWord {
    pub role: String,
    pub word: Vec<usize>,
}

/// A counterexample that re-checks against the raw definition in O(1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Which defining equation failed, e.g. "ab = 0 but a sigma(b) != 0".
    pub equation: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub items: Vec<WitnessItem>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub words: Vec<WitnessWord>,
    /// Free-form payload for non-element data (polynomials, transcripts).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Witness {
    pub fn new(equation: impl Into<String>) -> Self {
        Witness { equation: equation.into(), items: Vec::new(), words: Vec::new(), detail: None }
    }

    pub fn item(mut self, role: &str, index: usize, name: &str) -> Self {
        self.items.push(WitnessItem { role: role.into(), index, name: name.into() });
        self
    }

    pub fn word(mut self, role: &str, word: Vec<usize>) -> Self {
        self.words.push(WitnessWord { role: role.into(), word });
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

/// Parameters of a semi-decision, recorded alongside every bounded verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsRecord {
    pub degree: u32,
    pub nilpotency_bound: u32,
    pub middle_degree: u32,
    pub term_cap: u32,
    pub seed: u64,
    /// False when the candidate space was subsampled under a budget.
    pub exhaustive: bool,
    pub candidates: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// The property holds exactly.
    Holds,
    /// Definitive failure with a re-checkable witness.
    Fails { witness: Witness },
    /// Semi-decision: no violation found within the recorded bounds.
    BoundedPass { bounds: BoundsRecord },
    /// Bounded search produced an unconfirmed violation; the transcript is
    /// the debugging artifact.
    Candidate { witness: Witness, bounds: BoundsRecord },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }

    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Holds | Verdict::BoundedPass { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Fails { witness } | Verdict::Candidate { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

/// The outcome of one (ring, family, property) query.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: PropertyId,
    pub subject: String,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub quantifier_count: u64,
    /// Wall time; excluded from serialized reports to keep them byte-stable.
    #[serde(skip, default)]
    pub elapsed: Duration,
}

impl PropertyReport {
    pub fn new(property: PropertyId, subject: impl Into<String>, verdict: Verdict, count: u64) -> Self {
        PropertyReport {
            property,
            subject: subject.into(),
            verdict,
            quantifier_count: count,
            elapsed: Duration::ZERO,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn property_names_round_trip() {
        for p in ALL_PROPERTIES {
            assert_eq!(PropertyId::parse(&p.name()), Some(p));
        }
        assert_eq!(PropertyId::parse("sigma_skew_rnp_right"), Some(PropertyId::SigmaSkewRnpRight));
        assert_eq!(PropertyId::parse("nope"), None);
    }

    #[test]
    fn verdict_json_shape() {
        let v = Verdict::Fails { witness: Witness::new("ab = 0 but ba != 0").item("a", 2, "2") };
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains(r#""kind":"fails""#));
        let r = PropertyReport::new(PropertyId::Reduced, "Z4", Verdict::Holds, 4);
        let s = serde_json::to_string(&r).unwrap();
        assert!(!s.contains("elapsed"));
    }
}
