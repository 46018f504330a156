//! The bundle catalog: named (ring, Sigma, Delta, presentation, mult-set)
//! packages with the worked examples preloaded, plus JSON loaders for user
//! catalogs (*.bundle.json).

use crate::morphism::{DerivationFamily, EndoFamily, RingMap, SigmaDerivation};
use crate::pbw::PbwPresentation;
use crate::property::Subject;
use crate::ring::{build_ring, Elem, FiniteRing, RingExpr};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("bundle {name}: {message}")]
    Bundle { name: String, message: String },
    #[error("duplicate bundle name {0}")]
    Duplicate(String),
    #[error("io error reading {0}: {1}")]
    Io(String, String),
    #[error("parse error in {0}: {1}")]
    Parse(String, String),
}

/// A validated catalog entry.
#[derive(Clone)]
pub struct Bundle {
    pub name: String,
    pub expr: RingExpr,
    pub ring: Arc<FiniteRing>,
    pub sigma: Option<EndoFamily>,
    /// Always present when sigma is (zero-filled if unspecified).
    pub delta: Option<DerivationFamily>,
    pub presentation: Option<Arc<PbwPresentation>>,
    pub mult_set: Option<Vec<Elem>>,
    pub notes: Vec<String>,
}

impl Bundle {
    pub fn subject(&self) -> Subject<'_> {
        Subject {
            name: &self.name,
            ring: &self.ring,
            family: self.sigma.as_ref(),
            deltas: self.delta.as_ref(),
        }
    }

    /// Denominator set for localization checks: the declared one, else the
    /// central units.
    pub fn denominators(&self) -> Vec<Elem> {
        match &self.mult_set {
            Some(s) => s.clone(),
            None => self.ring.central_units().iter().collect(),
        }
    }
}

// ---- built-in constructions ----

fn identity_family(ring: &Arc<FiniteRing>, n: usize) -> EndoFamily {
    let id = RingMap::identity(ring.clone());
    EndoFamily::new(ring.clone(), vec![id; n]).unwrap()
}

fn frobenius(ring: &Arc<FiniteRing>, p: usize) -> RingMap {
    let table: Vec<usize> = ring.elements().map(|e| ring.pow(e, p).0).collect();
    RingMap::endomorphism(ring.clone(), table).unwrap()
}

/// sigma_2 (b -> -b) and sigma_3 (b -> 0) on T(Z_p, Z_p) in the (r, m)
/// pair encoding.
fn trivial_ext_sigmas(ring: &Arc<FiniteRing>, p: usize) -> (RingMap, RingMap) {
    let enc = |r: usize, m: usize| r * p + m;
    let sigma2: Vec<usize> = (0..p * p).map(|i| enc(i / p, (p - i % p) % p)).collect();
    let sigma3: Vec<usize> = (0..p * p).map(|i| enc(i / p, 0)).collect();
    (
        RingMap::endomorphism(ring.clone(), sigma2).unwrap(),
        RingMap::endomorphism(ring.clone(), sigma3).unwrap(),
    )
}

/// d/dz on base[z]/(z^2) built from the coefficient decomposition the
/// carrier construction guarantees: index = c0 + |B| * c1.
fn ddz(ring: &Arc<FiniteRing>, base_size: usize) -> SigmaDerivation {
    let table: Vec<usize> = (0..ring.size()).map(|i| i / base_size).collect();
    let id = RingMap::identity(ring.clone());
    SigmaDerivation::new(ring.clone(), id, table).expect("d/dz is an id-derivation")
}

fn sigma_ij(ring: &Arc<FiniteRing>, i: u32, j: u32) -> RingMap {
    let a = ring.element_by_name("a").expect("F4 generator");
    let z = ring.element_by_name("z").expect("z generator");
    let ai = ring.pow(a, i as usize);
    let ajz = ring.mul(ring.pow(a, j as usize), z);
    RingMap::from_generator_images(ring.clone(), &[(a, ai), (z, ajz)])
        .expect("sigma_{i,j} is an endomorphism")
}

fn zmod_bundle(n: u32) -> Bundle {
    let expr = RingExpr::Zmod { n };
    let ring = build_ring(&expr).unwrap();
    let sigma = identity_family(&ring, 1);
    let delta = DerivationFamily::zero(&sigma);
    Bundle {
        name: format!("zmod{n}"),
        expr,
        ring,
        sigma: Some(sigma),
        delta: Some(delta),
        presentation: None,
        mult_set: None,
        notes: vec![],
    }
}

fn s2_bundle(p: u32) -> Bundle {
    let expr = RingExpr::TrivialExt { base: Box::new(RingExpr::Zmod { n: p }) };
    let ring = build_ring(&expr).unwrap();
    let (s2, s3) = trivial_ext_sigmas(&ring, p as usize);
    let sigma =
        EndoFamily::new(ring.clone(), vec![RingMap::identity(ring.clone()), s2, s3]).unwrap();
    let delta = DerivationFamily::zero(&sigma);
    Bundle {
        name: format!("s2_z{p}"),
        expr,
        ring,
        sigma: Some(sigma),
        delta: Some(delta),
        presentation: None,
        mult_set: None,
        notes: vec![format!(
            "finite surrogate of S_2(Z) over Z_{p}; the arguments only use that Z is a domain"
        )],
    }
}

fn f4_expr() -> RingExpr {
    RingExpr::Gf { p: 2, k: 2, modulus: Some(vec![1, 1, 1]) }
}

fn f4z2_expr() -> RingExpr {
    RingExpr::Quot { base: Box::new(f4_expr()), modulus: vec![0, 0, 1] }
}

/// Every built-in bundle, in a fixed deterministic order.
pub fn builtin_catalog() -> Vec<Bundle> {
    let mut out = Vec::new();

    out.push(zmod_bundle(4));
    out.push(zmod_bundle(6));
    out.push(zmod_bundle(8));
    out.push(zmod_bundle(12));

    // plain commutative polynomial presentation over Z4, two generators
    {
        let expr = RingExpr::Zmod { n: 4 };
        let ring = build_ring(&expr).unwrap();
        let pres = Arc::new(PbwPresentation::commutative(ring.clone(), 2).unwrap());
        let sigma = identity_family(&ring, 2);
        let delta = DerivationFamily::zero(&sigma);
        out.push(Bundle {
            name: "zmod4_poly".into(),
            expr,
            ring,
            sigma: Some(sigma),
            delta: Some(delta),
            presentation: Some(pres),
            mult_set: None,
            notes: vec![],
        });
    }

    // finite fields with the Frobenius
    for (name, expr, p) in [
        ("f4_frobenius", f4_expr(), 2usize),
        ("f8_frobenius", RingExpr::Gf { p: 2, k: 3, modulus: Some(vec![1, 1, 0, 1]) }, 2),
        ("f9_frobenius", RingExpr::Gf { p: 3, k: 2, modulus: Some(vec![1, 0, 1]) }, 3),
    ] {
        let ring = build_ring(&expr).unwrap();
        let frob = frobenius(&ring, p);
        let sigma = EndoFamily::new(ring.clone(), vec![frob]).unwrap();
        let delta = DerivationFamily::zero(&sigma);
        let presentation = if name == "f4_frobenius" {
            Some(Arc::new(
                PbwPresentation::new(
                    ring.clone(),
                    sigma.clone(),
                    DerivationFamily::zero(&sigma),
                    vec![],
                    vec![],
                )
                .unwrap(),
            ))
        } else {
            None
        };
        out.push(Bundle {
            name: name.into(),
            expr,
            ring,
            sigma: Some(sigma),
            delta: Some(delta),
            presentation,
            mult_set: None,
            notes: vec![],
        });
    }

    // F2[z]/(z^2) with the formal derivative: derivation-type Ore extension
    {
        let expr = RingExpr::Quot { base: Box::new(RingExpr::Zmod { n: 2 }), modulus: vec![0, 0, 1] };
        let ring = build_ring(&expr).unwrap();
        let id = RingMap::identity(ring.clone());
        let sigma = EndoFamily::new(ring.clone(), vec![id]).unwrap();
        let d = ddz(&ring, 2);
        let delta = DerivationFamily::new(&sigma, vec![d]).unwrap();
        let pres = Arc::new(
            PbwPresentation::new(ring.clone(), sigma.clone(), delta.clone(), vec![], vec![])
                .unwrap(),
        );
        out.push(Bundle {
            name: "d_char2".into(),
            expr,
            ring,
            sigma: Some(sigma),
            delta: Some(delta),
            presentation: Some(pres),
            mult_set: None,
            notes: vec![],
        });
    }

    // F4[z]/(z^2) with the six maps sigma_{i,j}: a -> a^i, z -> a^j z
    {
        let expr = f4z2_expr();
        let ring = build_ring(&expr).unwrap();
        let maps: Vec<RingMap> = (1..=2)
            .flat_map(|i| (0..=2).map(move |j| (i, j)))
            .map(|(i, j)| sigma_ij(&ring, i, j))
            .collect();
        let sigma = EndoFamily::new(ring.clone(), maps).unwrap();
        let delta = DerivationFamily::zero(&sigma);
        // presentation uses the commuting subfamily {sigma_{1,0..2}}: the six
        // maps do not commute pairwise, so commuting generators with d = 1
        // cannot present a consistent extension over all six
        let tri = vec![sigma_ij(&ring, 1, 0), sigma_ij(&ring, 1, 1), sigma_ij(&ring, 1, 2)];
        let tri_fam = EndoFamily::new(ring.clone(), tri).unwrap();
        let tri_delta = DerivationFamily::zero(&tri_fam);
        let pres = Arc::new(
            PbwPresentation::new(
                ring.clone(),
                tri_fam,
                tri_delta,
                vec![ring.one(); 3],
                vec![vec![ring.zero(); 4]; 3],
            )
            .unwrap(),
        );
        out.push(Bundle {
            name: "f4_z2_sigma6".into(),
            expr,
            ring,
            sigma: Some(sigma),
            delta: Some(delta),
            presentation: Some(pres),
            mult_set: None,
            notes: vec![
                "source text defines the maps 'for all a in Z_3' while the carrier is F_4; read as F_4".into(),
                "presentation restricted to the commuting subfamily sigma_{1,j}; the full six-generator data with commuting x's and d = 1 fails the consistency test".into(),
            ],
        });
    }

    out.push(s2_bundle(3));
    out.push(s2_bundle(5));
    out.push(s2_bundle(7));

    // S2(Z5) with sigma_2 alone: compatible, carries a skew polynomial presentation
    {
        let expr = RingExpr::TrivialExt { base: Box::new(RingExpr::Zmod { n: 5 }) };
        let ring = build_ring(&expr).unwrap();
        let (s2, _) = trivial_ext_sigmas(&ring, 5);
        let sigma = EndoFamily::new(ring.clone(), vec![s2]).unwrap();
        let delta = DerivationFamily::zero(&sigma);
        let pres = Arc::new(
            PbwPresentation::new(ring.clone(), sigma.clone(), delta.clone(), vec![], vec![])
                .unwrap(),
        );
        out.push(Bundle {
            name: "s2_z5_sigma2".into(),
            expr,
            ring,
            sigma: Some(sigma),
            delta: Some(delta),
            presentation: Some(pres),
            mult_set: None,
            notes: vec![],
        });
    }

    // quantum plane flavor over F5: x2 x1 = 2 x1 x2
    {
        let expr = RingExpr::Zmod { n: 5 };
        let ring = build_ring(&expr).unwrap();
        let sigma = identity_family(&ring, 2);
        let delta = DerivationFamily::zero(&sigma);
        let pres = Arc::new(
            PbwPresentation::new(
                ring.clone(),
                sigma.clone(),
                delta.clone(),
                vec![Elem(2)],
                vec![vec![ring.zero(); 3]],
            )
            .unwrap(),
        );
        out.push(Bundle {
            name: "quantum_plane_f5".into(),
            expr,
            ring,
            sigma: Some(sigma),
            delta: Some(delta),
            presentation: Some(pres),
            mult_set: None,
            notes: vec![],
        });
    }

    // noncommutative separators
    for (name, expr) in [
        ("m2_z2", RingExpr::Matrix { base: Box::new(RingExpr::Zmod { n: 2 }), dim: 2 }),
        ("u2_z2", RingExpr::UpperTriangular { base: Box::new(RingExpr::Zmod { n: 2 }), dim: 2 }),
    ] {
        let ring = build_ring(&expr).unwrap();
        let sigma = identity_family(&ring, 1);
        let delta = DerivationFamily::zero(&sigma);
        out.push(Bundle {
            name: name.into(),
            expr,
            ring,
            sigma: Some(sigma),
            delta: Some(delta),
            presentation: None,
            mult_set: None,
            notes: vec![],
        });
    }

    // Z2 x Z2 with the swap: reduced ring, incompatible family
    {
        let expr = RingExpr::Product { factors: vec![RingExpr::Zmod { n: 2 }, RingExpr::Zmod { n: 2 }] };
        let ring = build_ring(&expr).unwrap();
        let swap: Vec<usize> = (0..4).map(|i| (i % 2) * 2 + i / 2).collect();
        let sigma =
            EndoFamily::new(ring.clone(), vec![RingMap::endomorphism(ring.clone(), swap).unwrap()])
                .unwrap();
        let delta = DerivationFamily::zero(&sigma);
        out.push(Bundle {
            name: "z2xz2_swap".into(),
            expr,
            ring,
            sigma: Some(sigma),
            delta: Some(delta),
            presentation: None,
            mult_set: None,
            notes: vec![],
        });
    }

    // trivial extension of Z4: non-reduced, NI, bigger nilpotent set
    {
        let expr = RingExpr::TrivialExt { base: Box::new(RingExpr::Zmod { n: 4 }) };
        let ring = build_ring(&expr).unwrap();
        let sigma = identity_family(&ring, 1);
        let delta = DerivationFamily::zero(&sigma);
        out.push(Bundle {
            name: "t2_z4".into(),
            expr,
            ring,
            sigma: Some(sigma),
            delta: Some(delta),
            presentation: None,
            mult_set: None,
            notes: vec![],
        });
    }

    out
}

// ---- JSON bundle files ----

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapSpec {
    /// The literal string "identity".
    Named(String),
    /// Explicit image table, one entry per carrier element.
    Table { table: Vec<usize> },
    /// Images of carrier generators by element name, expanded at load.
    Images { images: BTreeMap<String, usize> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaSpec {
    /// The literal string "zero".
    Named(String),
    Table { table: Vec<usize> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MultSetSpec {
    /// "units" or "central-units".
    Named(String),
    Indices(Vec<usize>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresentationSpec {
    pub sigma: Vec<MapSpec>,
    #[serde(default)]
    pub delta: Option<Vec<DeltaSpec>>,
    /// d_{i,j} for i < j in row-major triangular order.
    #[serde(default)]
    pub d: Vec<usize>,
    /// r^{(i,j)} tuples (n+1 entries each) in the same order; zero if absent.
    #[serde(default)]
    pub r_consts: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BundleSpec {
    pub name: String,
    pub ring: RingExpr,
    #[serde(default)]
    pub sigma: Option<Vec<MapSpec>>,
    #[serde(default)]
    pub delta: Option<Vec<DeltaSpec>>,
    #[serde(default)]
    pub presentation: Option<PresentationSpec>,
    #[serde(default)]
    pub mult_set: Option<MultSetSpec>,
    #[serde(default)]
    pub notes: Vec<String>,
}

fn resolve_map(
    ring: &Arc<FiniteRing>,
    spec: &MapSpec,
    ctx: &str,
) -> Result<RingMap, CatalogError> {
    let err = |m: String| CatalogError::Bundle { name: ctx.to_string(), message: m };
    match spec {
        MapSpec::Named(s) if s == "identity" => Ok(RingMap::identity(ring.clone())),
        MapSpec::Named(s) => Err(err(format!("unknown map name '{s}'"))),
        MapSpec::Table { table } => {
            RingMap::endomorphism(ring.clone(), table.clone()).map_err(|e| err(e.to_string()))
        }
        MapSpec::Images { images } => {
            let pairs: Vec<(Elem, Elem)> = images
                .iter()
                .map(|(name, &img)| {
                    let g = ring
                        .element_by_name(name)
                        .ok_or_else(|| err(format!("no element named '{name}'")))?;
                    if img >= ring.size() {
                        return Err(err(format!("image index {img} out of range")));
                    }
                    Ok((g, Elem(img)))
                })
                .collect::<Result<_, _>>()?;
            RingMap::from_generator_images(ring.clone(), &pairs).map_err(|e| err(e.to_string()))
        }
    }
}

fn resolve_delta(
    ring: &Arc<FiniteRing>,
    sigma: &RingMap,
    spec: &DeltaSpec,
    ctx: &str,
) -> Result<SigmaDerivation, CatalogError> {
    let err = |m: String| CatalogError::Bundle { name: ctx.to_string(), message: m };
    match spec {
        DeltaSpec::Named(s) if s == "zero" => Ok(SigmaDerivation::zero(ring.clone(), sigma.clone())),
        DeltaSpec::Named(s) => Err(err(format!("unknown derivation name '{s}'"))),
        DeltaSpec::Table { table } => {
            SigmaDerivation::new(ring.clone(), sigma.clone(), table.clone())
                .map_err(|e| err(e.to_string()))
        }
    }
}

/// Validates and materializes one bundle spec.
pub fn resolve_bundle(spec: &BundleSpec) -> Result<Bundle, CatalogError> {
    let name = spec.name.clone();
    let err = |m: String| CatalogError::Bundle { name: name.clone(), message: m };
    let ring = build_ring(&spec.ring).map_err(|e| err(e.to_string()))?;
    let sigma = match &spec.sigma {
        None => None,
        Some(list) => {
            let maps: Vec<RingMap> = list
                .iter()
                .map(|m| resolve_map(&ring, m, &name))
                .collect::<Result<_, _>>()?;
            Some(EndoFamily::new(ring.clone(), maps).map_err(|e| err(e.to_string()))?)
        }
    };
    let delta = match (&sigma, &spec.delta) {
        (None, Some(_)) => {
            return Err(err("delta requires sigma".into()));
        }
        (None, None) => None,
        (Some(fam), None) => Some(DerivationFamily::zero(fam)),
        (Some(fam), Some(list)) => {
            if list.len() != fam.len() {
                return Err(err("delta count differs from sigma count".into()));
            }
            let ds: Vec<SigmaDerivation> = list
                .iter()
                .enumerate()
                .map(|(i, d)| resolve_delta(&ring, fam.get(i), d, &name))
                .collect::<Result<_, _>>()?;
            Some(DerivationFamily::new(fam, ds).map_err(|e| err(e.to_string()))?)
        }
    };
    let presentation = match &spec.presentation {
        None => None,
        Some(p) => {
            let n = p.sigma.len();
            let maps: Vec<RingMap> = p
                .sigma
                .iter()
                .map(|m| resolve_map(&ring, m, &name))
                .collect::<Result<_, _>>()?;
            let fam = EndoFamily::new(ring.clone(), maps).map_err(|e| err(e.to_string()))?;
            let deltas = match &p.delta {
                None => DerivationFamily::zero(&fam),
                Some(list) => {
                    if list.len() != n {
                        return Err(err("presentation delta count differs from n".into()));
                    }
                    let ds: Vec<SigmaDerivation> = list
                        .iter()
                        .enumerate()
                        .map(|(i, d)| resolve_delta(&ring, fam.get(i), d, &name))
                        .collect::<Result<_, _>>()?;
                    DerivationFamily::new(&fam, ds).map_err(|e| err(e.to_string()))?
                }
            };
            let pairs = n * n.saturating_sub(1) / 2;
            let d: Vec<Elem> = if p.d.is_empty() && pairs == 0 {
                vec![]
            } else {
                if p.d.len() != pairs {
                    return Err(err(format!("expected {pairs} d constants")));
                }
                p.d.iter().map(|&i| Elem(i)).collect()
            };
            let rc: Vec<Vec<Elem>> = match &p.r_consts {
                None => vec![vec![ring.zero(); n + 1]; pairs],
                Some(rows) => {
                    if rows.len() != pairs {
                        return Err(err(format!("expected {pairs} r tuples")));
                    }
                    rows.iter().map(|row| row.iter().map(|&i| Elem(i)).collect()).collect()
                }
            };
            Some(Arc::new(
                PbwPresentation::new(ring.clone(), fam, deltas, d, rc)
                    .map_err(|e| err(e.to_string()))?,
            ))
        }
    };
    let mult_set = match &spec.mult_set {
        None => None,
        Some(MultSetSpec::Named(s)) if s == "units" => Some(ring.units().iter().collect()),
        Some(MultSetSpec::Named(s)) if s == "central-units" => {
            Some(ring.central_units().iter().collect())
        }
        Some(MultSetSpec::Named(s)) => return Err(err(format!("unknown mult set '{s}'"))),
        Some(MultSetSpec::Indices(idx)) => {
            if idx.iter().any(|&i| i >= ring.size()) {
                return Err(err("mult set index out of range".into()));
            }
            Some(idx.iter().map(|&i| Elem(i)).collect())
        }
    };
    Ok(Bundle {
        name,
        expr: spec.ring.clone(),
        ring,
        sigma,
        delta,
        presentation,
        mult_set,
        notes: spec.notes.clone(),
    })
}

/// Loads every *.bundle.json in a directory, sorted by file name.
pub fn load_catalog_dir(dir: &Path) -> Result<Vec<Bundle>, CatalogError> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| CatalogError::Io(dir.display().to_string(), e.to_string()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.file_name().and_then(|f| f.to_str()).is_some_and(|f| f.ends_with(".bundle.json")))
        .collect();
    files.sort();
    let mut out = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(&f)
            .map_err(|e| CatalogError::Io(f.display().to_string(), e.to_string()))?;
        let spec: BundleSpec = serde_json::from_str(&text)
            .map_err(|e| CatalogError::Parse(f.display().to_string(), e.to_string()))?;
        out.push(resolve_bundle(&spec)?);
    }
    Ok(out)
}

/// Built-ins plus an optional user directory; duplicate names are rejected.
pub fn catalog(extra_dir: Option<&Path>) -> Result<Vec<Bundle>, CatalogError> {
    let mut bundles = builtin_catalog();
    if let Some(dir) = extra_dir {
        for b in load_catalog_dir(dir)? {
            if bundles.iter().any(|x| x.name == b.name) {
                return Err(CatalogError::Duplicate(b.name));
            }
            bundles.push(b);
        }
    }
    Ok(bundles)
}

pub fn find_bundle<'a>(bundles: &'a [Bundle], name: &str) -> Option<&'a Bundle> {
    bundles.iter().find(|b| b.name == name).or_else(|| {
        let hits: Vec<&Bundle> = bundles.iter().filter(|b| b.name.starts_with(name)).collect();
        if hits.len() == 1 {
            Some(hits[0])
        } else {
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load_and_are_unique() {
        let cat = builtin_catalog();
        assert!(cat.len() >= 16);
        let mut names: Vec<&str> = cat.iter().map(|b| b.name.as_str()).collect();
        names.sort();
        let before = names.len();
        names.dedup();
        assert_eq!(before, names.len());
        for b in &cat {
            assert!(b.ring.size() <= 64, "{} has {} elements", b.name, b.ring.size());
            if b.sigma.is_some() {
                assert!(b.delta.is_some());
            }
        }
    }

    #[test]
    fn six_map_bundle_shape() {
        let cat = builtin_catalog();
        let b = find_bundle(&cat, "f4_z2_sigma6").unwrap();
        assert_eq!(b.ring.size(), 16);
        assert_eq!(b.sigma.as_ref().unwrap().len(), 6);
        assert_eq!(b.presentation.as_ref().unwrap().generators(), 3);
        assert!(!b.notes.is_empty());
    }

    #[test]
    fn bundle_spec_round_trip() {
        let spec: BundleSpec = serde_json::from_str(
            r#"{
                "name": "test_f4",
                "ring": {"kind": "gf", "p": 2, "k": 2, "modulus": [1, 1, 1]},
                "sigma": [{"images": {"a": 3}}],
                "mult_set": "units"
            }"#,
        )
        .unwrap();
        let b = resolve_bundle(&spec).unwrap();
        assert_eq!(b.ring.size(), 4);
        // a -> a+1 = a^2 is the Frobenius
        let fam = b.sigma.as_ref().unwrap();
        let a = b.ring.element_by_name("a").unwrap();
        assert_eq!(fam.get(0).apply(a), b.ring.mul(a, a));
        assert_eq!(b.mult_set.as_ref().unwrap().len(), 3);
    }

    #[test]
    fn catalog_dir_loading() {
        let dir = tempdir();
        std::fs::write(
            dir.join("extra.bundle.json"),
            r#"{"name": "extra_z9", "ring": {"kind": "zmod", "n": 9}, "sigma": ["identity"]}"#,
        )
        .unwrap();
        let cat = catalog(Some(&dir)).unwrap();
        assert!(find_bundle(&cat, "extra_z9").is_some());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    fn tempdir() -> std::path::PathBuf {
        let d = std::env::temp_dir().join(format!("skewpbw-cat-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn prefix_lookup() {
        let cat = builtin_catalog();
        assert!(find_bundle(&cat, "f4_z2").is_some());
        assert_eq!(find_bundle(&cat, "s2_z5").unwrap().name, "s2_z5");
        assert!(find_bundle(&cat, "zmod").is_none()); // ambiguous
    }
}
