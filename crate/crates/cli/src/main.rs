//! skewpbw: build finite rings, decide ring/family properties, normalize and
//! multiply in skew PBW extensions, localize, and replay the fixed theorem
//! campaign over the catalog.
//!
//! Exit codes: 0 all checks hold or pass within bounds, 1 a definitive
//! failure or counterexample was found, 2 malformed input.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use skewpbw_core::cache::{input_digest, Cache};
use skewpbw_core::campaign::{falsify_campaign, paper_campaign, CampaignOptions, CampaignReport};
use skewpbw_core::catalog::{catalog, find_bundle, Bundle};
use skewpbw_core::localization::{check_rnp_transfer, localize, localize_pbw, validate_mult_set};
use skewpbw_core::morphism::{check_endomorphism, check_sigma_derivation, RingMap};
use skewpbw_core::pbw::bounded::{is_nilpotent_bounded, BoundedOptions, NilpotencyVerdict};
use skewpbw_core::pbw::rewrite::{normalize, parse_expr};
use skewpbw_core::pbw::PbwPoly;
use skewpbw_core::property::FalsifySpec;
use skewpbw_core::report::{PropertyId, PropertyReport, ALL_PROPERTIES};
use skewpbw_core::ring::{build_ring, Elem, FiniteRing, RingExpr};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "skewpbw", version, about)]
struct Cli {
    /// Worker threads for campaigns.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed for every sampled search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Bounded-check parameters D,E,DMID (degree, nilpotency, middle degree).
    #[arg(long, global = true, default_value = "2,8,2")]
    bounds: String,
    /// Support-size cap for bounded candidate enumeration.
    #[arg(long, global = true, default_value_t = 3)]
    term_cap: u32,
    /// Pair budget for quadratic bounded searches.
    #[arg(long, global = true, default_value_t = 20000)]
    pair_budget: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Bypass the result cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Result cache directory.
    #[arg(long, global = true, default_value = ".skewpbw-cache")]
    cache_dir: PathBuf,
    /// Extra catalog directory of *.bundle.json files.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Construct rings and print their data and distinguished subsets.
    Ring {
        #[command(subcommand)]
        cmd: RingCmd,
    },
    /// Decide ring / family properties for a catalog bundle.
    Props {
        #[command(subcommand)]
        cmd: PropsCmd,
    },
    /// Validate endomorphism / derivation tables and composition closures.
    Endo {
        #[command(subcommand)]
        cmd: EndoCmd,
    },
    /// Normal forms, products and bounded checks in the skew PBW extension.
    Pbw {
        #[command(subcommand)]
        cmd: PbwCmd,
    },
    /// Ore localization at central regular sets.
    Localize {
        #[command(subcommand)]
        cmd: LocalizeCmd,
    },
    /// Theorem-replay campaigns over the catalog.
    Campaign {
        #[command(subcommand)]
        cmd: CampaignCmd,
    },
    /// Inspect the content-addressed result cache.
    Cache {
        #[command(subcommand)]
        cmd: CacheCmd,
    },
}

#[derive(Subcommand)]
enum RingCmd {
    /// Build a ring and print a summary.
    Build { spec: String },
    /// Print size, commutativity and construction data.
    Info { spec: String },
    /// Print N(R), the prime radical, the upper nilradical, idempotents,
    /// units, regular elements and the center.
    Subsets { spec: String },
}

#[derive(Subcommand)]
enum PropsCmd {
    /// Decide the listed properties.
    Check { bundle: String, properties: Vec<String> },
    /// Decide every applicable property.
    All { bundle: String },
}

#[derive(Subcommand)]
enum EndoCmd {
    /// Validate an endomorphism table against a ring.
    Check {
        spec: String,
        /// JSON array of image indices.
        #[arg(long)]
        table: String,
        /// Validate as a sigma-derivation instead, with sigma given as a
        /// JSON table (defaults to the identity).
        #[arg(long)]
        derivation: bool,
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Print the composition closure of the bundle's family.
    Closure { bundle: String },
}

#[derive(Subcommand)]
enum PbwCmd {
    /// Rewrite an expression like "x*z + 1" to its normal form.
    Normalize { bundle: String, expr: String },
    /// Multiply two polynomials given as JSON term lists.
    Mul { bundle: String, f: String, g: String },
    /// Recompute the structural flags of the presentation.
    Classify { bundle: String },
    /// Bounded nilpotency test for a polynomial.
    Nilpotent {
        bundle: String,
        f: String,
        #[arg(long, default_value_t = 8)]
        bound: u32,
    },
}

#[derive(Subcommand)]
enum LocalizeCmd {
    /// Validate the denominator set and build S^-1 R.
    Check {
        bundle: String,
        #[arg(long)]
        set: Option<String>,
    },
    /// Localize the bundle's presentation.
    Pbw {
        bundle: String,
        #[arg(long)]
        set: Option<String>,
    },
    /// Check the skew-RNP transfer between R and S^-1 R.
    Transfer {
        bundle: String,
        #[arg(long)]
        set: Option<String>,
    },
}

#[derive(Subcommand)]
enum CampaignCmd {
    /// Replay the fixed suite; exit 1 on any counterexample.
    Paper,
    /// Hunt counterexamples to "hypotheses imply conclusions" over the
    /// catalog. Takes inline JSON or @file.
    Falsify { spec: String },
}

#[derive(Subcommand)]
enum CacheCmd {
    /// Print a stored run record.
    Get { digest: String },
    /// List cache entries.
    Stats,
    /// Remove every entry.
    Clear,
}

#[derive(Args)]
struct Empty {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn parse_bounds(cli: &Cli) -> Result<BoundedOptions> {
    let parts: Vec<&str> = cli.bounds.split(',').collect();
    if parts.len() != 3 {
        bail!("--bounds expects D,E,DMID");
    }
    let nums: Vec<u32> = parts
        .iter()
        .map(|p| p.trim().parse::<u32>().context("bounds must be integers"))
        .collect::<Result<_>>()?;
    Ok(BoundedOptions {
        degree: nums[0],
        nilpotency: nums[1],
        middle_degree: nums[2],
        term_cap: cli.term_cap,
        pair_budget: cli.pair_budget,
        seed: cli.seed,
        ..Default::default()
    })
}

/// Resolves a ring spec: inline JSON, a shorthand like zmod:4 / gf:2:2 /
/// s2:5, or a (prefix of a) catalog bundle name.
fn resolve_ring(spec: &str, bundles: &[Bundle]) -> Result<Arc<FiniteRing>> {
    let spec = spec.trim();
    if spec.starts_with('{') {
        let expr: RingExpr = serde_json::from_str(spec).context("malformed ring expression")?;
        return Ok(build_ring(&expr)?);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["zmod", n] => {
            let n: u32 = n.parse().context("zmod:<n>")?;
            return Ok(build_ring(&RingExpr::Zmod { n })?);
        }
        ["gf", p, k] => {
            let p: u32 = p.parse().context("gf:<p>:<k>")?;
            let k: u32 = k.parse().context("gf:<p>:<k>")?;
            return Ok(build_ring(&RingExpr::Gf { p, k, modulus: None })?);
        }
        ["s2", p] => {
            let p: u32 = p.parse().context("s2:<p>")?;
            return Ok(build_ring(&RingExpr::TrivialExt { base: Box::new(RingExpr::Zmod { n: p }) })?);
        }
        _ => {}
    }
    if let Some(b) = find_bundle(bundles, spec) {
        return Ok(b.ring.clone());
    }
    bail!("cannot resolve ring spec '{spec}' (try zmod:4, gf:2:2, s2:5, JSON, or a bundle name)")
}

fn get_bundle<'a>(bundles: &'a [Bundle], name: &str) -> Result<&'a Bundle> {
    find_bundle(bundles, name).ok_or_else(|| anyhow!("unknown bundle '{name}'"))
}

fn subsets_json(ring: &FiniteRing) -> Result<serde_json::Value> {
    let named = |idx: Vec<usize>| -> serde_json::Value {
        serde_json::json!({
            "indices": idx.clone(),
            "names": idx.iter().map(|&i| ring.name(Elem(i)).to_string()).collect::<Vec<_>>(),
        })
    };
    Ok(serde_json::json!({
        "nilpotents": named(ring.nilpotents().indices()),
        "prime_radical": named(ring.prime_radical().indices()),
        "upper_nilradical": named(ring.upper_nilradical()?.indices()),
        "idempotents": named(ring.idempotents().indices()),
        "units": named(ring.units().indices()),
        "regular_elements": named(ring.regular_elements().indices()),
        "center": named(ring.center().indices()),
    }))
}

fn ring_info_json(ring: &FiniteRing) -> serde_json::Value {
    serde_json::json!({
        "provenance": ring.provenance(),
        "size": ring.size(),
        "commutative": ring.is_commutative(),
        "zero": ring.zero().0,
        "one": ring.one().0,
        "digest": ring.digest(),
        "elements": (0..ring.size()).map(|i| ring.name(Elem(i)).to_string()).collect::<Vec<_>>(),
    })
}

fn parse_poly(bundle: &Bundle, text: &str) -> Result<PbwPoly> {
    let pres = bundle
        .presentation
        .as_ref()
        .ok_or_else(|| anyhow!("bundle '{}' has no presentation", bundle.name))?;
    let v: serde_json::Value = serde_json::from_str(text).context("polynomial must be JSON")?;
    Ok(PbwPoly::from_json(&bundle.ring, pres.generators(), &v)?)
}

fn mult_set(bundle: &Bundle, set: &Option<String>) -> Result<Vec<Elem>> {
    match set.as_deref() {
        None | Some("central-units") => Ok(bundle.denominators()),
        Some("units") => Ok(bundle.ring.units().iter().collect()),
        Some(text) => {
            let idx: Vec<usize> = serde_json::from_str(text)
                .context("--set expects 'units', 'central-units' or a JSON index list")?;
            if idx.iter().any(|&i| i >= bundle.ring.size()) {
                bail!("mult set index out of range");
            }
            Ok(idx.into_iter().map(Elem).collect())
        }
    }
}

fn print_report(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn props_exit(reports: &[PropertyReport]) -> ExitCode {
    if reports.iter().all(|r| r.verdict.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn campaign_output(rep: &CampaignReport, format: Format) -> ExitCode {
    match format {
        Format::Json => println!("{}", rep.to_json()),
        Format::Csv => print!("{}", rep.to_csv()),
    }
    if rep.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let bounds = parse_bounds(&cli)?;
    let bundles = catalog(cli.catalog.as_deref())?;
    let cache = Cache::new(&cli.cache_dir, !cli.no_cache);
    let opts = CampaignOptions {
        seed: cli.seed,
        bounds,
        validate_triples: 10_000,
        extend_pairs: 1000,
        jobs: cli.jobs,
    };

    match &cli.command {
        Command::Ring { cmd } => {
            let (spec, which) = match cmd {
                RingCmd::Build { spec } => (spec, "build"),
                RingCmd::Info { spec } => (spec, "info"),
                RingCmd::Subsets { spec } => (spec, "subsets"),
            };
            let ring = resolve_ring(spec, &bundles)?;
            let mut out = ring_info_json(&ring);
            if which == "subsets" {
                out["subsets"] = subsets_json(&ring)?;
            }
            print_report(&out);
            Ok(ExitCode::SUCCESS)
        }
        Command::Props { cmd } => {
            let (bundle_name, props) = match cmd {
                PropsCmd::Check { bundle, properties } => {
                    if properties.is_empty() {
                        bail!("props check needs at least one property name");
                    }
                    let props: Vec<PropertyId> = properties
                        .iter()
                        .map(|p| {
                            PropertyId::parse(p).ok_or_else(|| anyhow!("unknown property '{p}'"))
                        })
                        .collect::<Result<_>>()?;
                    (bundle, props)
                }
                PropsCmd::All { bundle } => (bundle, ALL_PROPERTIES.to_vec()),
            };
            let b = get_bundle(&bundles, bundle_name)?;
            let applicable: Vec<PropertyId> = props
                .into_iter()
                .filter(|p| {
                    p.is_classical() || (b.sigma.is_some() && (!p.needs_deltas() || b.delta.is_some()))
                })
                .collect();
            let canonical = serde_json::json!({
                "ring": b.ring.digest(),
                "sigma": b.sigma.as_ref().map(|f| f.maps().iter().map(|m| m.table().to_vec()).collect::<Vec<_>>()),
                "delta": b.delta.as_ref().map(|d| d.deltas().iter().map(|m| m.table().to_vec()).collect::<Vec<_>>()),
                "properties": applicable.iter().map(|p| p.name()).collect::<Vec<_>>(),
                "bounds": [bounds.degree, bounds.nilpotency, bounds.middle_degree, bounds.term_cap],
            });
            let digest = input_digest("props", &canonical, cli.seed);
            if let Some(hit) = cache.get(&digest) {
                eprintln!("(served from cache {digest})");
                print_report(&hit.report);
                let reports: Vec<PropertyReport> = serde_json::from_value(hit.report["reports"].clone())?;
                return Ok(props_exit(&reports));
            }
            let subject = b.subject();
            let reports: Vec<PropertyReport> = applicable
                .iter()
                .map(|p| subject.decide(*p))
                .collect::<std::result::Result<_, _>>()?;
            let out = serde_json::json!({
                "bundle": b.name,
                "digest": digest,
                "reports": reports,
                "all_passed": reports.iter().all(|r| r.verdict.passed()),
            });
            cache.put(&cache.record("props", &canonical, cli.seed, out.clone()))?;
            print_report(&out);
            Ok(props_exit(&reports))
        }
        Command::Endo { cmd } => match cmd {
            EndoCmd::Check { spec, table, derivation, sigma } => {
                let ring = resolve_ring(spec, &bundles)?;
                let table: Vec<usize> = serde_json::from_str(table).context("--table must be a JSON array")?;
                let report = if *derivation {
                    let sigma_map = match sigma {
                        None => RingMap::identity(ring.clone()),
                        Some(s) => {
                            let st: Vec<usize> = serde_json::from_str(s).context("--sigma must be a JSON array")?;
                            RingMap::endomorphism(ring.clone(), st)
                                .map_err(|e| anyhow!("sigma is invalid: {e}"))?
                        }
                    };
                    check_sigma_derivation(&ring, &sigma_map, &table)
                } else {
                    check_endomorphism(&ring, &table)
                };
                print_report(&serde_json::to_value(&report)?);
                Ok(if report.valid { ExitCode::SUCCESS } else { ExitCode::from(1) })
            }
            EndoCmd::Closure { bundle } => {
                let b = get_bundle(&bundles, bundle)?;
                let fam = b.sigma.as_ref().ok_or_else(|| anyhow!("bundle has no family"))?;
                let closure = fam.closure()?;
                let out = serde_json::json!({
                    "bundle": b.name,
                    "generators": fam.len(),
                    "closure_size": closure.len(),
                    "is_monoid": closure.is_monoid(),
                    "maps": closure.maps().iter().map(|m| serde_json::json!({
                        "word": m.word,
                        "nonzero_word": m.nonzero_word,
                        "identity": m.is_identity(),
                    })).collect::<Vec<_>>(),
                });
                print_report(&out);
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Pbw { cmd } => match cmd {
            PbwCmd::Normalize { bundle, expr } => {
                let b = get_bundle(&bundles, bundle)?;
                let pres = b
                    .presentation
                    .as_ref()
                    .ok_or_else(|| anyhow!("bundle '{}' has no presentation", b.name))?;
                let tree = parse_expr(pres, expr)?;
                let nf = normalize(pres, &tree)?;
                let out = serde_json::json!({
                    "bundle": b.name,
                    "input": expr,
                    "normal_form": nf.render(&b.ring, pres.generators()),
                    "terms": nf.to_json(),
                });
                print_report(&out);
                Ok(ExitCode::SUCCESS)
            }
            PbwCmd::Mul { bundle, f, g } => {
                let b = get_bundle(&bundles, bundle)?;
                let pres = b.presentation.as_ref().ok_or_else(|| anyhow!("no presentation"))?;
                let (pf, pg) = (parse_poly(b, f)?, parse_poly(b, g)?);
                let prod = pres.mul(&pf, &pg)?;
                let out = serde_json::json!({
                    "bundle": b.name,
                    "product": prod.render(&b.ring, pres.generators()),
                    "terms": prod.to_json(),
                });
                print_report(&out);
                Ok(ExitCode::SUCCESS)
            }
            PbwCmd::Classify { bundle } => {
                let b = get_bundle(&bundles, bundle)?;
                let pres = b.presentation.as_ref().ok_or_else(|| anyhow!("no presentation"))?;
                let out = serde_json::json!({
                    "bundle": b.name,
                    "generators": pres.generators(),
                    "flags": pres.classify(),
                });
                print_report(&out);
                Ok(ExitCode::SUCCESS)
            }
            PbwCmd::Nilpotent { bundle, f, bound } => {
                let b = get_bundle(&bundles, bundle)?;
                let pres = b.presentation.as_ref().ok_or_else(|| anyhow!("no presentation"))?;
                let pf = parse_poly(b, f)?;
                let verdict = is_nilpotent_bounded(pres, &pf, *bound)?;
                let out = match verdict {
                    NilpotencyVerdict::Nilpotent(k) => serde_json::json!({
                        "bundle": b.name, "nilpotent": true, "exponent": k,
                    }),
                    NilpotencyVerdict::NotWithin(e) => serde_json::json!({
                        "bundle": b.name, "nilpotent": false, "within": e,
                    }),
                };
                print_report(&out);
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Localize { cmd } => match cmd {
            LocalizeCmd::Check { bundle, set } => {
                let b = get_bundle(&bundles, bundle)?;
                let s = mult_set(b, set)?;
                let validation = validate_mult_set(&b.ring, &s);
                if !validation.valid {
                    print_report(&serde_json::to_value(&validation)?);
                    return Ok(ExitCode::from(1));
                }
                let local = localize(&b.ring, &s)?;
                let out = serde_json::json!({
                    "bundle": b.name,
                    "set_size": s.len(),
                    "classes": local.ring().size(),
                    "canonical_iso": true,
                    "note": skewpbw_core::localization::DEGENERACY_NOTE,
                });
                print_report(&out);
                Ok(ExitCode::SUCCESS)
            }
            LocalizeCmd::Pbw { bundle, set } => {
                let b = get_bundle(&bundles, bundle)?;
                let pres = b.presentation.as_ref().ok_or_else(|| anyhow!("no presentation"))?;
                let s = mult_set(b, set)?;
                let (local, localized) = localize_pbw(pres, &s)?;
                let out = serde_json::json!({
                    "bundle": b.name,
                    "classes": local.ring().size(),
                    "flags": localized.classify(),
                    "flags_preserved": localized.classify() == pres.classify(),
                    "note": skewpbw_core::localization::DEGENERACY_NOTE,
                });
                print_report(&out);
                Ok(ExitCode::SUCCESS)
            }
            LocalizeCmd::Transfer { bundle, set } => {
                let b = get_bundle(&bundles, bundle)?;
                let fam = b.sigma.as_ref().ok_or_else(|| anyhow!("bundle has no family"))?;
                let s = mult_set(b, set)?;
                let rep = check_rnp_transfer(&b.ring, &s, fam)?;
                print_report(&serde_json::to_value(&rep)?);
                Ok(if rep.agree { ExitCode::SUCCESS } else { ExitCode::from(1) })
            }
        },
        Command::Campaign { cmd } => match cmd {
            CampaignCmd::Paper => {
                let canonical = serde_json::json!({
                    "rings": bundles.iter().map(|b| b.ring.digest()).collect::<Vec<_>>(),
                    "bounds": [bounds.degree, bounds.nilpotency, bounds.middle_degree, bounds.term_cap],
                });
                let digest = input_digest("campaign-paper", &canonical, cli.seed);
                if let Some(hit) = cache.get(&digest) {
                    eprintln!("(served from cache {digest})");
                    let rep: CampaignReport = serde_json::from_value(hit.report)?;
                    return Ok(campaign_output(&rep, cli.format));
                }
                let rep = paper_campaign(&bundles, &opts)?;
                cache.put(&cache.record("campaign-paper", &canonical, cli.seed, serde_json::to_value(&rep)?))?;
                Ok(campaign_output(&rep, cli.format))
            }
            CampaignCmd::Falsify { spec } => {
                let text = match spec.strip_prefix('@') {
                    Some(path) => std::fs::read_to_string(path)
                        .with_context(|| format!("reading falsify spec {path}"))?,
                    None => spec.clone(),
                };
                let spec: FalsifySpec =
                    serde_json::from_str(&text).context("malformed falsify spec")?;
                let rep = falsify_campaign(&bundles, &spec, &opts)?;
                Ok(campaign_output(&rep, cli.format))
            }
        },
        Command::Cache { cmd } => match cmd {
            CacheCmd::Get { digest } => match cache.get(digest) {
                Some(rec) => {
                    print_report(&serde_json::to_value(&rec)?);
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    eprintln!("no cache entry {digest}");
                    Ok(ExitCode::from(1))
                }
            },
            CacheCmd::Stats => {
                let entries = cache.entries();
                print_report(&serde_json::json!({
                    "dir": cache.dir().display().to_string(),
                    "entries": entries.len(),
                    "digests": entries,
                }));
                Ok(ExitCode::SUCCESS)
            }
            CacheCmd::Clear => {
                let removed = cache.clear()?;
                print_report(&serde_json::json!({ "removed": removed }));
                Ok(ExitCode::SUCCESS)
            }
        },
    }
}
