//! Exact computer algebra on finite rings: construction of coefficient rings,
//! endomorphism/derivation families and their composition closures, exhaustive
//! deciders for annihilator-style ring properties, skew PBW extensions as a
//! rewriting system over the standard-monomial basis, Ore localization at
//! central regular sets, and a campaign runner that replays the whole theorem
//! suite over a catalog of small rings.

pub mod cache;
pub mod campaign;
pub mod catalog;
pub mod localization;
pub mod morphism;
pub mod pbw;
pub mod property;
pub mod report;
pub mod ring;

pub use morphism::{DerivationFamily, EndoFamily, MonoidClosure, RingMap, SigmaDerivation};
pub use pbw::{MultiIndex, PbwPoly, PbwPresentation};
pub use report::{PropertyId, PropertyReport, Side, Verdict, Witness};
pub use ring::{build_ring, Elem, ElemSet, FiniteRing, RingError, RingExpr};

/// Version string stamped into reports and cache digests.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Soft limit on carrier size; quantifier loops are O(|R|^3)-O(|R|^4).
pub const MAX_RING_SIZE: usize = 256;
