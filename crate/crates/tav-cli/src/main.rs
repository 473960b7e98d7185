//! `tav` — twisted Alexander vanishing toolkit command line.
//!
//! Subcommands: knot-info, classify, poly, tav-order, verify.
//! Every flag has an environment-variable mirror with the `TAV_` prefix
//! (e.g. `--knots` / `TAV_KNOTS`). Exit codes: 0 success/definitive,
//! 2 indefinitive ("> max-order"), 64 usage, 65 data, 70 internal.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tav_core::catalog::{load_default, Catalog, CatalogGroup};
use tav_core::cert::{file_sha256, verify_certificate, CertError, TavCertificate};
use tav_core::det::EngineMode;
use tav_core::epi::{enumerate_homs, reduce_by_conjugation};
use tav_core::fox::{
    classical_alexander, twisted_alexander, Representation, TwistedResult, TwistedSetup,
};
use tav_core::knot::{load_knot_table, KnotEntry};
use tav_core::search::{classify_catalog, tav_scan, ScanConfig, ScanResult, VerdictCache};
use tav_core::word::Word;

const EXIT_OK: u8 = 0;
const EXIT_INDEFINITIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_INTERNAL: u8 = 70;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Screen,
    Certify,
}

impl From<ModeArg> for EngineMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Screen => EngineMode::Screen,
            ModeArg::Certify => EngineMode::Certify,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Structured,
}

#[derive(Args)]
struct Common {
    /// Knot table (JSONL)
    #[arg(long, global = true, env = "TAV_KNOTS", default_value = "data/knots.jsonl")]
    knots: PathBuf,
    /// Group catalog (JSONL)
    #[arg(long, global = true, env = "TAV_CATALOG", default_value = "data/groups.jsonl")]
    catalog: PathBuf,
    /// Verdict cache directory (no caching when absent)
    #[arg(long, global = true, env = "TAV_CACHE")]
    cache: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "TAV_THREADS")]
    threads: Option<usize>,
    /// Engine mode: screen (modular pruning, exact escalation) or certify
    #[arg(long, global = true, env = "TAV_MODE", value_enum, default_value = "screen")]
    mode: ModeArg,
    /// Output format
    #[arg(long, global = true, env = "TAV_FORMAT", value_enum, default_value = "text")]
    format: FormatArg,
    /// Seed for the NonZero re-certification sample (recorded in output)
    #[arg(long, global = true, env = "TAV_SEED", default_value_t = 7)]
    seed: u64,
}

#[derive(Parser)]
#[command(name = "tav", version, about = "twisted Alexander vanishing toolkit")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a knot's presentation and classical Alexander polynomial
    KnotInfo { name: String },
    /// Run the TAV classifier on one group or an order range
    Classify {
        /// Group id or name (e.g. o24_3, S4, D15)
        group: Option<String>,
        /// Order range, e.g. 1..23 (inclusive)
        #[arg(long)]
        order: Option<String>,
    },
    /// Twisted Alexander verdict for explicit homs or all epimorphism orbits
    Poly {
        knot: String,
        /// Group id or name
        group: String,
        /// Hom spec: "x1=e17,x2=e5" (element indices) or
        /// "x1=g2*g4*g5*g6,..." (words in the catalog generators)
        #[arg(long, conflicts_with = "all_orbits")]
        hom: Option<String>,
        /// Check every epimorphism orbit instead
        #[arg(long)]
        all_orbits: bool,
    },
    /// Compute the TAV order of a knot up to --max-order
    TavOrder {
        knot: String,
        #[arg(long, env = "TAV_MAX_ORDER", default_value_t = 30)]
        max_order: usize,
    },
    /// Re-verify a stored certificate (exact recomputation)
    Verify { certificate: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap's own help/version output exits 0
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(EXIT_USAGE);
            }
            print!("{e}");
            return ExitCode::from(EXIT_OK);
        }
    };
    if let Some(n) = cli.common.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized; --threads ignored");
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    msg: String,
}

fn data_err(msg: impl std::fmt::Display) -> CliError {
    CliError {
        code: EXIT_DATA,
        msg: msg.to_string(),
    }
}

fn usage_err(msg: impl std::fmt::Display) -> CliError {
    CliError {
        code: EXIT_USAGE,
        msg: msg.to_string(),
    }
}

fn internal_err(msg: impl std::fmt::Display) -> CliError {
    CliError {
        code: EXIT_INTERNAL,
        msg: msg.to_string(),
    }
}

fn load_inputs(c: &Common) -> Result<(std::collections::HashMap<String, KnotEntry>, Catalog), CliError> {
    let knots = load_knot_table(&c.knots).map_err(data_err)?;
    let catalog = load_default(&c.catalog).map_err(data_err)?;
    Ok((knots, catalog))
}

fn find_group<'a>(catalog: &'a Catalog, key: &str) -> Result<&'a CatalogGroup, CliError> {
    catalog
        .groups
        .iter()
        .find(|g| g.id == key || g.name == key)
        .ok_or_else(|| data_err(format!("group {key:?} not in catalog")))
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.cmd {
        Cmd::KnotInfo { name } => cmd_knot_info(&cli.common, name),
        Cmd::Classify { group, order } => cmd_classify(&cli.common, group.as_deref(), order.as_deref()),
        Cmd::Poly {
            knot,
            group,
            hom,
            all_orbits,
        } => cmd_poly(&cli.common, knot, group, hom.as_deref(), *all_orbits),
        Cmd::TavOrder { knot, max_order } => cmd_tav_order(&cli.common, knot, *max_order),
        Cmd::Verify { certificate } => cmd_verify(&cli.common, certificate),
    }
}

// ---------------------------------------------------------------------------

fn fmt_word(w: &Word) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter()
        .map(|&x| {
            if x > 0 {
                format!("x{x}")
            } else {
                format!("x{}^-1", -x)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_knot_info(c: &Common, name: &str) -> Result<u8, CliError> {
    let knots = load_knot_table(&c.knots).map_err(data_err)?;
    let entry = knots
        .get(name)
        .ok_or_else(|| data_err(format!("knot {name:?} not in table")))?;
    let pres = entry.presentation();
    let delta = classical_alexander(pres).map_err(internal_err)?;
    if c.format == FormatArg::Structured {
        let out = serde_json::json!({
            "name": name,
            "generators": pres.generators,
            "relators": pres.relators,
            "meridian": pres.meridian,
            "longitude": pres.longitude,
            "phi": pres.phi,
            "source": pres.source,
            "alexander": delta.to_string(),
        });
        println!("{}", serde_json::to_string(&out).unwrap());
    } else {
        println!("knot {name}");
        println!("  generators: {}", pres.generators);
        for (i, r) in pres.relators.iter().enumerate() {
            println!("  relator {}: {}", i + 1, fmt_word(r));
        }
        println!("  meridian: {}", fmt_word(&pres.meridian));
        if let Some(l) = &pres.longitude {
            println!("  longitude: {}", fmt_word(l));
        }
        println!("  phi: {:?}", pres.phi);
        println!("  Alexander polynomial: {delta}");
    }
    Ok(EXIT_OK)
}

fn parse_range(s: &str) -> Result<(usize, usize), CliError> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| usage_err(format!("bad order range {s:?}; expected LO..HI")))?;
    let lo = lo.parse().map_err(|_| usage_err("bad range start"))?;
    let hi = hi.parse().map_err(|_| usage_err("bad range end"))?;
    Ok((lo, hi))
}

fn cmd_classify(c: &Common, group: Option<&str>, order: Option<&str>) -> Result<u8, CliError> {
    let catalog = load_default(&c.catalog).map_err(data_err)?;
    let rows = match (group, order) {
        (Some(key), None) => {
            let g = find_group(&catalog, key)?;
            classify_catalog(&catalog, g.order..=g.order)
                .into_iter()
                .filter(|r| r.id == g.id)
                .collect()
        }
        (None, Some(r)) => {
            let (lo, hi) = parse_range(r)?;
            classify_catalog(&catalog, lo..=hi)
        }
        _ => return Err(usage_err("give exactly one of GROUP or --order LO..HI")),
    };
    if c.format == FormatArg::Structured {
        println!("{}", serde_json::to_string(&rows).unwrap());
    } else {
        for r in &rows {
            let status = if r.verdict.is_tav {
                "TAV".to_string()
            } else {
                format!("not TAV ({})", r.rejected.as_deref().unwrap_or("?"))
            };
            println!("{} {} (order {}): {}", r.id, r.name, r.order, status);
        }
        let tav = rows.iter().filter(|r| r.verdict.is_tav).count();
        println!("{} groups, {} TAV", rows.len(), tav);
    }
    Ok(EXIT_OK)
}

/// Parse "x1=e17,x2=g2*g4" into one image element index per generator:
/// `e<i>` is an element index, `g<i>[^exp]` products are words in the
/// catalog group's generators.
fn parse_hom_spec(
    spec: &str,
    gens: usize,
    group: &tav_core::group::FiniteGroup,
) -> Result<Vec<usize>, CliError> {
    let mut images: Vec<Option<usize>> = vec![None; gens];
    for part in spec.split(',') {
        let (lhs, rhs) = part
            .trim()
            .split_once('=')
            .ok_or_else(|| usage_err(format!("bad hom assignment {part:?}")))?;
        let gen: usize = lhs
            .trim()
            .strip_prefix('x')
            .and_then(|s| s.parse().ok())
            .filter(|&i| i >= 1 && i <= gens)
            .ok_or_else(|| usage_err(format!("bad generator {lhs:?} (want x1..x{gens})")))?;
        let rhs = rhs.trim();
        let element = if let Some(idx) = rhs.strip_prefix('e').and_then(|s| s.parse::<usize>().ok())
        {
            if idx >= group.order() {
                return Err(usage_err(format!(
                    "element index e{idx} out of range (order {})",
                    group.order()
                )));
            }
            idx
        } else {
            parse_generator_word(rhs, group)?
        };
        images[gen - 1] = Some(element);
    }
    images
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| usage_err(format!("generator x{} unassigned", i + 1))))
        .collect()
}

/// "g2*g4*g5^-1" → element index, multiplying the group's stored generators.
fn parse_generator_word(
    s: &str,
    group: &tav_core::group::FiniteGroup,
) -> Result<usize, CliError> {
    let ngens = group.gens.len();
    let mut acc = group.identity();
    for factor in s.split('*') {
        let factor = factor.trim();
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (
                b,
                e.parse::<i64>()
                    .map_err(|_| usage_err(format!("bad exponent in {factor:?}")))?,
            ),
            None => (factor, 1),
        };
        let gi: usize = base
            .strip_prefix('g')
            .and_then(|x| x.parse::<usize>().ok())
            .filter(|&i| i >= 1 && i <= ngens)
            .ok_or_else(|| {
                usage_err(format!("bad factor {factor:?} (want g1..g{ngens})"))
            })?;
        let g = group
            .index_of(&group.gens[gi - 1])
            .expect("generator is an element");
        let g = if exp < 0 { group.inv(g) } else { g };
        for _ in 0..exp.unsigned_abs() {
            acc = group.mul(acc, g);
        }
    }
    Ok(acc)
}

fn verdict_json(images: &[usize], result: &TwistedResult) -> serde_json::Value {
    match result {
        TwistedResult::Zero { evidence } => serde_json::json!({
            "images": images, "verdict": "zero", "evidence": evidence,
        }),
        TwistedResult::NonZero { verdict, poly, pair } => serde_json::json!({
            "images": images, "verdict": "nonzero",
            "witness": verdict,
            "poly": poly.as_ref().map(|u| u.poly.to_string()),
            "pair": pair.as_ref().map(|(n, d)| [n.to_string(), d.to_string()]),
        }),
    }
}

fn print_verdict_text(images: &[usize], result: &TwistedResult) {
    match result {
        TwistedResult::Zero { evidence } => println!(
            "images {images:?}: ZERO (span {}, {} exact evaluation points)",
            evidence.span,
            evidence.points.len()
        ),
        TwistedResult::NonZero { poly, .. } => match poly {
            Some(u) => println!("images {images:?}: nonzero, Delta = {}", u.poly),
            None => println!("images {images:?}: nonzero (screened witness)"),
        },
    }
}

fn cmd_poly(
    c: &Common,
    knot: &str,
    group_key: &str,
    hom: Option<&str>,
    all_orbits: bool,
) -> Result<u8, CliError> {
    let (knots, catalog) = load_inputs(c)?;
    let entry = knots
        .get(knot)
        .ok_or_else(|| data_err(format!("knot {knot:?} not in table")))?;
    let cg = find_group(&catalog, group_key)?;
    let mode: EngineMode = c.mode.into();
    let mut outputs = Vec::new();
    if let Some(spec) = hom {
        // an explicit hom spec selects the presentation it was written for:
        // the one whose generator count matches the assignment count
        let assignments = spec.split(',').count();
        let pres = [&entry.reduced, &entry.wirtinger]
            .into_iter()
            .flatten()
            .find(|p| p.generators == assignments)
            .unwrap_or_else(|| entry.presentation());
        let images = parse_hom_spec(spec, pres.generators, &cg.group)?;
        let setup = TwistedSetup::new(pres, &cg.group, &images, Representation::Regular)
            .map_err(|e| data_err(format!("invalid hom: {e}")))?;
        let surjective = cg.group.subgroup_closure(&images).len() == cg.group.order();
        let result = twisted_alexander(&setup, mode).map_err(internal_err)?;
        if c.format == FormatArg::Structured {
            let mut v = verdict_json(&images, &result);
            v["surjective"] = serde_json::json!(surjective);
            outputs.push(v);
        } else {
            println!("hom is {}", if surjective { "surjective" } else { "NOT surjective" });
            print_verdict_text(&images, &result);
        }
    } else if all_orbits {
        let pres = entry.presentation();
        let epis = enumerate_homs(pres, &cg.group, true);
        let orbits = reduce_by_conjugation(&epis, &cg.group).map_err(internal_err)?;
        if orbits.is_empty() {
            println!("no epimorphisms {knot} -> {}", cg.name);
            return Ok(EXIT_OK);
        }
        for orbit in &orbits {
            let setup =
                TwistedSetup::new(pres, &cg.group, &orbit.rep.images, Representation::Regular)
                    .map_err(internal_err)?;
            let result = twisted_alexander(&setup, mode).map_err(internal_err)?;
            if c.format == FormatArg::Structured {
                let mut v = verdict_json(&orbit.rep.images, &result);
                v["orbit_size"] = serde_json::json!(orbit.size);
                outputs.push(v);
            } else {
                print_verdict_text(&orbit.rep.images, &result);
            }
        }
    } else {
        return Err(usage_err("give --hom SPEC or --all-orbits"));
    }
    if c.format == FormatArg::Structured {
        println!("{}", serde_json::to_string(&outputs).unwrap());
    }
    Ok(EXIT_OK)
}

fn cmd_tav_order(c: &Common, knot: &str, max_order: usize) -> Result<u8, CliError> {
    let (knots, catalog) = load_inputs(c)?;
    let entry = knots
        .get(knot)
        .ok_or_else(|| data_err(format!("knot {knot:?} not in table")))?;
    let cfg = ScanConfig {
        max_order,
        mode: c.mode.into(),
        seed: c.seed,
        knots_sha256: file_sha256(&c.knots).map_err(data_err)?,
        catalog_sha256: file_sha256(&c.catalog).map_err(data_err)?,
    };
    let mut cache = match &c.cache {
        Some(dir) => Some(VerdictCache::open(dir).map_err(data_err)?),
        None => None,
    };
    if let Some(cache) = &cache {
        for w in &cache.warnings {
            eprintln!("warning: {w}");
        }
    }
    let report = tav_scan(knot, entry.presentation(), &catalog, &cfg, cache.as_mut())
        .map_err(internal_err)?;
    if c.format == FormatArg::Structured {
        println!("{}", serde_json::to_string(&report).unwrap());
    } else {
        let qualified = if report.incomplete_orders.is_empty() {
            ""
        } else {
            " (assuming catalog completeness: no completeness metadata for some orders)"
        };
        match &report.result {
            ScanResult::Order(m) => {
                let cert = report.certificate.as_ref().expect("order result has certificate");
                println!("O({knot}) = {m}{qualified}");
                println!(
                    "  certificate: group {} (order {}), images {:?}",
                    cert.group_id, cert.group_order, cert.hom_images
                );
            }
            ScanResult::GreaterThan(m) => println!("O({knot}) > {m}{qualified}"),
        }
        if !report.incomplete_orders.is_empty() {
            println!("  orders without completeness metadata: {:?}", report.incomplete_orders);
        }
        for g in &report.groups {
            match &g.rejected {
                Some(reason) => println!("  {} (order {}): skipped — {}", g.id, g.order, reason),
                None => println!(
                    "  {} (order {}): {} epimorphisms, {} orbits checked",
                    g.id,
                    g.order,
                    g.epimorphisms,
                    g.orbits.len()
                ),
            }
        }
        println!(
            "  mode {:?}, seed {}, {} NonZero screens re-certified, toolkit {}",
            report.mode, report.seed, report.recertified_nonzero, report.toolkit_version
        );
    }
    Ok(if report.definitive() {
        EXIT_OK
    } else {
        EXIT_INDEFINITIVE
    })
}

fn cmd_verify(c: &Common, path: &PathBuf) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(path).map_err(data_err)?;
    let cert: TavCertificate = serde_json::from_str(&text).map_err(data_err)?;
    let (knots, catalog) = load_inputs(c)?;
    let entry = knots
        .get(&cert.knot)
        .ok_or_else(|| data_err(format!("knot {:?} not in table", cert.knot)))?;
    let cg = find_group(&catalog, &cert.group_id)?;
    let knots_hash = file_sha256(&c.knots).map_err(data_err)?;
    let catalog_hash = file_sha256(&c.catalog).map_err(data_err)?;
    match verify_certificate(
        &cert,
        entry.presentation(),
        &cg.group,
        Some(&knots_hash),
        Some(&catalog_hash),
    ) {
        Ok(()) => {
            println!(
                "ok: certificate for {} on {} (order {}) re-verified exactly",
                cert.knot, cert.group_id, cert.group_order
            );
            Ok(EXIT_OK)
        }
        Err(e @ CertError::Provenance { .. }) => Err(data_err(format!("refused: {e}"))),
        Err(e) => Err(data_err(format!("mismatch: {e}"))),
    }
}
