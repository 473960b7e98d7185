//! TAV-order search: walk the catalog in increasing group order, prune with
//! the classifier, enumerate epimorphism orbits, screen then certify, and
//! stop at the first certified vanishing. Verdicts are cached by content
//! hash; the certificate of a hit is machine-checkable.

use std::collections::HashMap;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Catalog, CatalogGroup};
use crate::cert::{build_certificate, content_hash, CertError, TavCertificate};
use crate::det::EngineMode;
use crate::epi::{enumerate_homs, reduce_by_conjugation, EpiError, HomOrbit};
use crate::fox::{twisted_alexander, FoxError, Representation, TwistedSetup};
use crate::group::{classify_tav, TavVerdict};
use crate::knot::KnotPresentation;
use crate::TOOLKIT_VERSION;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("knot {0:?} is not in the knot table")]
    KnotNotFound(String),
    #[error(transparent)]
    Fox(#[from] FoxError),
    #[error(transparent)]
    Epi(#[from] EpiError),
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error("cache i/o: {0}")]
    CacheIo(#[from] std::io::Error),
    #[error("engine inconsistency: screened NonZero re-certified as Zero for orbit {0:?}")]
    ScreenDisagreement(Vec<usize>),
}

/// Why the classifier skipped a group without any knot computation.
pub fn rejection_reason(v: &TavVerdict) -> Option<String> {
    if v.is_tav {
        None
    } else if !v.normally_single_generated {
        Some("not normally generated by a single element".into())
    } else {
        Some("commutator is a p-group".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitVerdict {
    Zero,
    NonZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitOutcome {
    pub rep_images: Vec<usize>,
    pub orbit_size: usize,
    pub verdict: OrbitVerdict,
    pub from_cache: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub id: String,
    pub name: String,
    pub order: usize,
    /// None when the classifier admitted the group.
    pub rejected: Option<String>,
    pub epimorphisms: usize,
    pub orbits: Vec<OrbitOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "order")]
pub enum ScanResult {
    /// O(K) = m, certified.
    Order(usize),
    /// No vanishing found at or below max_order.
    GreaterThan(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TavReport {
    pub knot: String,
    pub max_order: usize,
    pub mode: EngineMode,
    pub seed: u64,
    pub result: ScanResult,
    pub certificate: Option<TavCertificate>,
    pub groups: Vec<GroupSummary>,
    /// Orders in range with no catalog completeness declaration; when
    /// non-empty the result is qualified ("assuming catalog completeness").
    pub incomplete_orders: Vec<usize>,
    /// How many screened NonZero verdicts were re-certified exactly.
    pub recertified_nonzero: usize,
    pub toolkit_version: String,
}

impl TavReport {
    pub fn definitive(&self) -> bool {
        matches!(self.result, ScanResult::Order(_))
    }
}

pub struct ScanConfig {
    pub max_order: usize,
    pub mode: EngineMode,
    pub seed: u64,
    /// Provenance hashes recorded into certificates.
    pub knots_sha256: String,
    pub catalog_sha256: String,
}

/// Fraction (percent) of screened NonZero verdicts re-certified exactly
/// before a lower-bound claim is issued.
pub const RECHECK_PERCENT: usize = 5;

// ---------------------------------------------------------------------------
// verdict cache

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheRecord {
    /// content hash of (presentation, group, orbit representative)
    pub key: String,
    pub knot: String,
    pub group_id: String,
    pub orbit_rep: Vec<usize>,
    pub verdict: OrbitVerdict,
    pub mode: EngineMode,
    pub toolkit_version: String,
}

/// Append-only verdict cache: one self-describing JSON record per line.
/// Records from other toolkit versions and corrupt lines are ignored (with a
/// warning collected for the caller).
pub struct VerdictCache {
    path: PathBuf,
    map: HashMap<String, CacheRecord>,
    pub warnings: Vec<String>,
}

impl VerdictCache {
    pub fn open(dir: &Path) -> Result<Self, std::io::Error> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join("verdicts.jsonl");
        let mut map = HashMap::new();
        let mut warnings = Vec::new();
        if path.exists() {
            for (i, line) in std::fs::read_to_string(&path)?.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<CacheRecord>(line) {
                    Ok(r) if r.toolkit_version == TOOLKIT_VERSION => {
                        map.insert(r.key.clone(), r);
                    }
                    Ok(r) => warnings.push(format!(
                        "cache line {}: version {} != {}; ignored",
                        i + 1,
                        r.toolkit_version,
                        TOOLKIT_VERSION
                    )),
                    Err(e) => warnings.push(format!("cache line {}: corrupt ({e}); ignored", i + 1)),
                }
            }
        }
        Ok(VerdictCache {
            path,
            map,
            warnings,
        })
    }

    pub fn lookup(&self, key: &str) -> Option<&CacheRecord> {
        self.map.get(key)
    }

    /// Append one record; the whole file is rewritten to a temp file and
    /// atomically renamed so concurrent readers never see a torn line.
    pub fn store(&mut self, record: CacheRecord) -> Result<(), std::io::Error> {
        self.map.insert(record.key.clone(), record);
        let tmp = self.path.with_extension("jsonl.tmp");
        let mut body = String::new();
        let mut records: Vec<&CacheRecord> = self.map.values().collect();
        records.sort_by(|a, b| a.key.cmp(&b.key));
        for r in records {
            body.push_str(&serde_json::to_string(r).expect("cache record serializes"));
            body.push('\n');
        }
        std::fs::write(&tmp, body)?;
        std::fs::rename(&tmp, &self.path)?;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// scan

/// Deterministic LCG for the 5% re-certification sample (seeded, recorded).
fn lcg_indices(seed: u64, population: usize, sample: usize) -> Vec<usize> {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut picked = std::collections::BTreeSet::new();
    while picked.len() < sample.min(population) {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        picked.insert((state >> 33) as usize % population);
    }
    picked.into_iter().collect()
}

struct OrbitJob<'a> {
    group: &'a CatalogGroup,
    orbit: HomOrbit,
}

/// Compute the TAV order of a knot presentation against a catalog.
pub fn tav_scan(
    knot_name: &str,
    pres: &KnotPresentation,
    catalog: &Catalog,
    cfg: &ScanConfig,
    mut cache: Option<&mut VerdictCache>,
) -> Result<TavReport, SearchError> {
    let incomplete_orders = catalog.incomplete_orders_up_to(cfg.max_order);
    let mut summaries: Vec<GroupSummary> = Vec::new();
    let mut certificate = None;
    let mut result = ScanResult::GreaterThan(cfg.max_order);
    // screened-NonZero jobs kept for the exact re-check sample
    let mut screened: Vec<OrbitJob> = Vec::new();

    'orders: for order in 1..=cfg.max_order {
        for cg in catalog.groups_of_order(order) {
            let verdict = classify_tav(&cg.group);
            let rejected = rejection_reason(&verdict);
            let mut summary = GroupSummary {
                id: cg.id.clone(),
                name: cg.name.clone(),
                order,
                rejected: rejected.clone(),
                epimorphisms: 0,
                orbits: Vec::new(),
            };
            if rejected.is_some() {
                summaries.push(summary);
                continue;
            }
            let epis = enumerate_homs(pres, &cg.group, true);
            summary.epimorphisms = epis.len();
            let orbits = reduce_by_conjugation(&epis, &cg.group)?;
            for orbit in orbits {
                let key = content_hash(pres, &cg.group, &orbit.rep.images);
                let (verdict, from_cache) = match cache.as_deref().and_then(|c| c.lookup(&key)) {
                    Some(hit) => (hit.verdict.clone(), true),
                    None => {
                        let setup = TwistedSetup::new(
                            pres,
                            &cg.group,
                            &orbit.rep.images,
                            Representation::Regular,
                        )?;
                        let screened_zero = match cfg.mode {
                            EngineMode::Screen => {
                                twisted_alexander(&setup, EngineMode::Screen)?.is_zero()
                            }
                            EngineMode::Certify => true, // go straight to exact
                        };
                        let v = if screened_zero {
                            // escalate every screened zero to an exact verdict
                            let exact = twisted_alexander(&setup, EngineMode::Certify)?;
                            if exact.is_zero() {
                                certificate = Some(build_certificate(
                                    knot_name,
                                    &cg.id,
                                    &setup,
                                    &exact,
                                    &cfg.knots_sha256,
                                    &cfg.catalog_sha256,
                                )?);
                                OrbitVerdict::Zero
                            } else {
                                OrbitVerdict::NonZero
                            }
                        } else {
                            screened.push(OrbitJob {
                                group: cg,
                                orbit: orbit.clone(),
                            });
                            OrbitVerdict::NonZero
                        };
                        if let Some(c) = cache.as_deref_mut() {
                            c.store(CacheRecord {
                                key,
                                knot: knot_name.to_string(),
                                group_id: cg.id.clone(),
                                orbit_rep: orbit.rep.images.clone(),
                                verdict: v.clone(),
                                mode: cfg.mode,
                                toolkit_version: TOOLKIT_VERSION.to_string(),
                            })?;
                        }
                        (v, false)
                    }
                };
                let is_zero = verdict == OrbitVerdict::Zero;
                summary.orbits.push(OrbitOutcome {
                    rep_images: orbit.rep.images.clone(),
                    orbit_size: orbit.size,
                    verdict,
                    from_cache,
                });
                if is_zero {
                    // a cached Zero still needs a fresh certificate
                    if certificate.is_none() {
                        let setup = TwistedSetup::new(
                            pres,
                            &cg.group,
                            &orbit.rep.images,
                            Representation::Regular,
                        )?;
                        let exact = twisted_alexander(&setup, EngineMode::Certify)?;
                        certificate = Some(build_certificate(
                            knot_name,
                            &cg.id,
                            &setup,
                            &exact,
                            &cfg.knots_sha256,
                            &cfg.catalog_sha256,
                        )?);
                    }
                    result = ScanResult::Order(order);
                    summaries.push(summary);
                    break 'orders;
                }
            }
            summaries.push(summary);
        }
    }

    // before claiming a lower bound, exactly re-certify a seeded sample of
    // the screened NonZero verdicts (screen NonZeros are already sound; this
    // is a cross-check of the modular engine against the exact one)
    let mut recertified = 0;
    if matches!(result, ScanResult::GreaterThan(_)) && !screened.is_empty() {
        let sample = (screened.len() * RECHECK_PERCENT).div_ceil(100);
        for i in lcg_indices(cfg.seed, screened.len(), sample) {
            let job = &screened[i];
            let setup = TwistedSetup::new(
                pres,
                &job.group.group,
                &job.orbit.rep.images,
                Representation::Regular,
            )?;
            if twisted_alexander(&setup, EngineMode::Certify)?.is_zero() {
                return Err(SearchError::ScreenDisagreement(job.orbit.rep.images.clone()));
            }
            recertified += 1;
        }
    }

    Ok(TavReport {
        knot: knot_name.to_string(),
        max_order: cfg.max_order,
        mode: cfg.mode,
        seed: cfg.seed,
        result,
        certificate,
        groups: summaries,
        incomplete_orders,
        recertified_nonzero: recertified,
        toolkit_version: TOOLKIT_VERSION.to_string(),
    })
}

// ---------------------------------------------------------------------------
// catalog-wide classification

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyRow {
    pub id: String,
    pub name: String,
    pub order: usize,
    pub verdict: TavVerdict,
    pub rejected: Option<String>,
}

/// Classifier verdict for every catalog group in the order range.
pub fn classify_catalog(catalog: &Catalog, orders: RangeInclusive<usize>) -> Vec<ClassifyRow> {
    catalog
        .groups
        .iter()
        .filter(|g| orders.contains(&g.order))
        .map(|g| {
            let verdict = classify_tav(&g.group);
            let rejected = rejection_reason(&verdict);
            ClassifyRow {
                id: g.id.clone(),
                name: g.name.clone(),
                order: g.order,
                verdict,
                rejected,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_default;
    use crate::knot::{diagrams, wirtinger_from_pd};
    use std::path::PathBuf;

    fn bundled_catalog() -> Catalog {
        let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/groups.jsonl");
        load_default(&p).unwrap()
    }

    fn config(max_order: usize) -> ScanConfig {
        ScanConfig {
            max_order,
            mode: EngineMode::Screen,
            seed: 7,
            knots_sha256: "test".into(),
            catalog_sha256: "test".into(),
        }
    }

    #[test]
    fn classify_small_orders_no_tav() {
        let cat = bundled_catalog();
        let rows = classify_catalog(&cat, 1..=23);
        assert_eq!(rows.len(), 59);
        assert!(rows.iter().all(|r| !r.verdict.is_tav));
        // of the 25 non-abelian groups below order 24, exactly the 12
        // normally-single-generated ones are rejected for a p-group
        // commutator; the rest fail normal single generation first
        let nonabelian: Vec<_> = rows
            .iter()
            .filter(|r| r.verdict.commutator_order > 1)
            .collect();
        assert_eq!(nonabelian.len(), 25);
        let mut pgroup_rejected: Vec<&str> = nonabelian
            .iter()
            .filter(|r| r.rejected.as_deref() == Some("commutator is a p-group"))
            .map(|r| r.name.as_str())
            .collect();
        pgroup_rejected.sort_unstable();
        assert_eq!(
            pgroup_rejected,
            [
                "A4", "D11", "D3", "D5", "D7", "D9", "Dic3", "Dic5", "F20", "Z3xS3",
                "Z3xZ3sZ2", "Z7sZ3"
            ]
        );
    }

    #[test]
    fn order_24_has_tav_group() {
        let cat = bundled_catalog();
        let rows = classify_catalog(&cat, 24..=24);
        assert_eq!(rows.len(), 15);
        assert!(rows.iter().any(|r| r.verdict.is_tav));
    }

    #[test]
    fn scan_below_24_rejects_everything_without_computing() {
        let cat = bundled_catalog();
        let pres = wirtinger_from_pd(&diagrams::trefoil()).unwrap();
        let report = tav_scan("3_1", &pres, &cat, &config(23), None).unwrap();
        assert_eq!(report.result, ScanResult::GreaterThan(23));
        assert!(report.groups.iter().all(|g| g.rejected.is_some()));
        assert!(report.groups.iter().all(|g| g.orbits.is_empty()));
        assert!(report.certificate.is_none());
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("tav-cache-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let mut cache = VerdictCache::open(&dir).unwrap();
        let rec = CacheRecord {
            key: "k1".into(),
            knot: "3_1".into(),
            group_id: "o6_2".into(),
            orbit_rep: vec![1, 2, 3],
            verdict: OrbitVerdict::NonZero,
            mode: EngineMode::Screen,
            toolkit_version: TOOLKIT_VERSION.into(),
        };
        cache.store(rec.clone()).unwrap();
        let reopened = VerdictCache::open(&dir).unwrap();
        assert_eq!(reopened.lookup("k1").unwrap().orbit_rep, vec![1, 2, 3]);
        assert!(reopened.warnings.is_empty());
        // corrupt line is ignored with a warning
        std::fs::write(
            dir.join("verdicts.jsonl"),
            format!("{}\nnot json\n", serde_json::to_string(&rec).unwrap()),
        )
        .unwrap();
        let reopened = VerdictCache::open(&dir).unwrap();
        assert!(reopened.lookup("k1").is_some());
        assert_eq!(reopened.warnings.len(), 1);
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn report_json_round_trip() {
        let cat = bundled_catalog();
        let pres = wirtinger_from_pd(&diagrams::trefoil()).unwrap();
        let report = tav_scan("3_1", &pres, &cat, &config(23), None).unwrap();
        let s = serde_json::to_string(&report).unwrap();
        let back: TavReport = serde_json::from_str(&s).unwrap();
        assert_eq!(report, back);
    }

    #[test]
    fn incomplete_orders_flagged() {
        let cat = bundled_catalog();
        let pres = wirtinger_from_pd(&diagrams::trefoil()).unwrap();
        let report = tav_scan("3_1", &pres, &cat, &config(23), None).unwrap();
        assert!(report.incomplete_orders.is_empty());
    }
}
