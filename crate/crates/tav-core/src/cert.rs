//! Machine-checkable vanishing certificates. A certificate records the exact
//! integer evaluations that back a verdict; verification rebuilds the Wada
//! numerator from the presentation, group, and hom, recomputes every recorded
//! evaluation, and recomputes the span so the point grid cannot be shrunk.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::det::{self, DetEvidence, EngineMode};
use crate::fox::{Representation, TwistedResult, TwistedSetup};
use crate::group::FiniteGroup;
use crate::knot::KnotPresentation;
use crate::TOOLKIT_VERSION;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CertVerdict {
    /// All recorded evaluations are zero; with points covering the span this
    /// proves the determinant vanishes identically.
    Zero { evaluations: Vec<String> },
    /// A single nonzero exact evaluation witnesses non-vanishing.
    NonZero { point: i64, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TavCertificate {
    pub knot: String,
    pub group_id: String,
    pub group_order: usize,
    pub hom_images: Vec<usize>,
    pub verdict: CertVerdict,
    pub evidence: DetEvidence,
    /// sha256 over the canonical (presentation, group elements, hom) triple
    pub content_hash: String,
    /// sha256 of the knot table and catalog files the run used
    pub knots_sha256: String,
    pub catalog_sha256: String,
    pub timestamp_unix: u64,
    pub toolkit_version: String,
}

#[derive(Debug, Error)]
pub enum CertError {
    #[error("certificate provenance mismatch: {field} hash differs (certificate {expected}, current {actual})")]
    Provenance {
        field: &'static str,
        expected: String,
        actual: String,
    },
    #[error("recorded evaluation at t={point} is {recorded} but recomputation gives {recomputed}")]
    Mismatch {
        point: i64,
        recorded: String,
        recomputed: String,
    },
    #[error("certificate is malformed: {0}")]
    Malformed(String),
    #[error("zero certificate carries screen-mode provenance")]
    ScreenOnlyZero,
    #[error(transparent)]
    Fox(#[from] crate::fox::FoxError),
    #[error(transparent)]
    Det(#[from] crate::det::DetError),
}

/// Content hash of the (presentation, group, hom) triple. Group content is
/// its generator permutations plus the full element list, so two different
/// realizations of abstractly equal groups hash differently (by design: a
/// certificate pins the concrete computation).
pub fn content_hash(pres: &KnotPresentation, group: &FiniteGroup, images: &[usize]) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(pres).expect("presentation serializes"));
    for e in &group.elements {
        h.update(b"|");
        for &x in &e.image {
            h.update(x.to_le_bytes());
        }
    }
    h.update(b"#");
    for &i in images {
        h.update((i as u64).to_le_bytes());
    }
    hex(&h.finalize())
}

pub fn file_sha256(path: &std::path::Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex(&Sha256::digest(&bytes)))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Build a certificate from a certify-mode twisted Alexander result.
/// Screen-mode Zero results are refused: certificates are exact by contract.
pub fn build_certificate(
    knot: &str,
    group_id: &str,
    setup: &TwistedSetup,
    result: &TwistedResult,
    knots_sha256: &str,
    catalog_sha256: &str,
) -> Result<TavCertificate, CertError> {
    let (verdict, evidence) = match result {
        TwistedResult::Zero { evidence } => {
            if evidence.mode != EngineMode::Certify {
                return Err(CertError::ScreenOnlyZero);
            }
            (
                CertVerdict::Zero {
                    evaluations: evidence.points.iter().map(|_| "0".to_string()).collect(),
                },
                evidence.clone(),
            )
        }
        TwistedResult::NonZero { verdict, .. } => match verdict {
            crate::det::DetVerdict::NonZero {
                point,
                prime: None,
                value: Some(value),
                evidence,
            } => (
                CertVerdict::NonZero {
                    point: *point,
                    value: value.clone(),
                },
                evidence.clone(),
            ),
            _ => {
                return Err(CertError::Malformed(
                    "nonzero result lacks an exact witness evaluation; rerun in certify mode"
                        .into(),
                ))
            }
        },
    };
    Ok(TavCertificate {
        knot: knot.to_string(),
        group_id: group_id.to_string(),
        group_order: setup.group.order(),
        hom_images: setup.images.to_vec(),
        verdict,
        evidence,
        content_hash: content_hash(setup.pres, setup.group, setup.images),
        knots_sha256: knots_sha256.to_string(),
        catalog_sha256: catalog_sha256.to_string(),
        timestamp_unix: now_unix(),
        toolkit_version: TOOLKIT_VERSION.to_string(),
    })
}

/// Re-verify a certificate against the current presentation and group.
/// `current_knots_sha256` / `current_catalog_sha256`, when given, must match
/// the recorded provenance before any computation happens.
pub fn verify_certificate(
    cert: &TavCertificate,
    pres: &KnotPresentation,
    group: &FiniteGroup,
    current_knots_sha256: Option<&str>,
    current_catalog_sha256: Option<&str>,
) -> Result<(), CertError> {
    if let Some(actual) = current_knots_sha256 {
        if actual != cert.knots_sha256 {
            return Err(CertError::Provenance {
                field: "knot table",
                expected: cert.knots_sha256.clone(),
                actual: actual.to_string(),
            });
        }
    }
    if let Some(actual) = current_catalog_sha256 {
        if actual != cert.catalog_sha256 {
            return Err(CertError::Provenance {
                field: "catalog",
                expected: cert.catalog_sha256.clone(),
                actual: actual.to_string(),
            });
        }
    }
    let actual_content = content_hash(pres, group, &cert.hom_images);
    if actual_content != cert.content_hash {
        return Err(CertError::Provenance {
            field: "content",
            expected: cert.content_hash.clone(),
            actual: actual_content,
        });
    }
    let setup = TwistedSetup::new(pres, group, &cert.hom_images, Representation::Regular)?;
    let (numerator, _) = crate::fox::wada_matrix(&setup);
    match &cert.verdict {
        CertVerdict::Zero { evaluations } => {
            if cert.evidence.mode != EngineMode::Certify {
                return Err(CertError::ScreenOnlyZero);
            }
            // the recorded grid must cover the recomputed span, else the
            // all-zero evaluations do not prove identical vanishing
            let span = det::span_bound(&numerator).unwrap_or(0);
            if (cert.evidence.points.len() as i64) < span + 1 {
                return Err(CertError::Malformed(format!(
                    "{} recorded points cannot certify a span-{span} determinant",
                    cert.evidence.points.len()
                )));
            }
            if evaluations.len() != cert.evidence.points.len() {
                return Err(CertError::Malformed(
                    "evaluation count differs from point count".into(),
                ));
            }
            let values = det::eval_cleared_det(&numerator, &cert.evidence.points)?;
            for ((&point, recorded), recomputed) in
                cert.evidence.points.iter().zip(evaluations).zip(&values)
            {
                if recorded != &recomputed.to_string() {
                    return Err(CertError::Mismatch {
                        point,
                        recorded: recorded.clone(),
                        recomputed: recomputed.to_string(),
                    });
                }
                if !recomputed.is_zero() {
                    return Err(CertError::Mismatch {
                        point,
                        recorded: recorded.clone(),
                        recomputed: recomputed.to_string(),
                    });
                }
            }
            Ok(())
        }
        CertVerdict::NonZero { point, value } => {
            let recomputed: BigInt = det::eval_cleared_det(&numerator, &[*point])?
                .pop()
                .expect("one point evaluated");
            if recomputed.to_string() != *value || recomputed.is_zero() {
                return Err(CertError::Mismatch {
                    point: *point,
                    recorded: value.clone(),
                    recomputed: recomputed.to_string(),
                });
            }
            Ok(())
        }
    }
}
