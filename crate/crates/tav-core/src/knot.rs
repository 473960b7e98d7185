//! Knot group presentations: Wirtinger presentations and longitudes from PD
//! codes, abelianization degrees, connected sums, cables, and the bundled
//! knot table.
//!
//! PD convention: each crossing is a 4-tuple [a, p, c, q] of edge labels.
//! Edges are numbered 1..2n consecutively along an orientation of the knot.
//! The understrand enters at edge `a` and leaves at edge `c` (c = a+1 mod
//! 2n); `p` and `q` are the overstrand edges, and the crossing is positive
//! when q = p+1 (the overstrand runs p -> q), negative when p = q+1. The
//! convention is pinned by an invariant: the trefoil's classical Alexander
//! polynomial must come out t^2 - t + 1 up to units.

use crate::word::{self, Word};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub type Crossing = [u32; 4];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PDCode(pub Vec<Crossing>);

#[derive(Debug, thiserror::Error)]
pub enum KnotError {
    #[error("malformed PD code: {0}")]
    MalformedPD(String),
    #[error("PD code encodes a multi-component link")]
    MultiComponentLink,
    #[error("abelianization quotient is not Z (not a knot-group presentation)")]
    NotCyclicAbelianization,
    #[error("presentation is not deficiency one ({gens} generators, {rels} relators)")]
    NotDeficiencyOne { gens: usize, rels: usize },
    #[error("presentation invariant violated: {0}")]
    BadPresentation(String),
    #[error("cable parameters are not coprime")]
    NotCoprime,
    #[error("cable construction requires a longitude")]
    MissingLongitude,
    #[error("knot table parse error: {0}")]
    ParseError(String),
    #[error("unknown knot name {0:?}")]
    UnknownKnot(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceTag {
    Wirtinger,
    Reduced,
    Composite,
}

/// Deficiency-one knot group presentation with distinguished meridian,
/// optional longitude, and abelianization degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotPresentation {
    pub generators: usize,
    pub relators: Vec<Word>,
    pub meridian: Word,
    pub longitude: Option<Word>,
    /// phi(x_i) for each generator: the abelianization degree.
    pub phi: Vec<i64>,
    pub source: SourceTag,
}

impl KnotPresentation {
    /// Checks every KnotPresentation invariant.
    pub fn validate(&self) -> Result<(), KnotError> {
        if self.relators.len() + 1 != self.generators {
            return Err(KnotError::NotDeficiencyOne {
                gens: self.generators,
                rels: self.relators.len(),
            });
        }
        if self.phi.len() != self.generators {
            return Err(KnotError::BadPresentation("phi length mismatch".into()));
        }
        let max_ok = |w: &Word| word::max_gen(w) as usize <= self.generators;
        for r in &self.relators {
            if !max_ok(r) {
                return Err(KnotError::BadPresentation("relator letter out of range".into()));
            }
            if word::phi_of(r, &self.phi) != 0 {
                return Err(KnotError::BadPresentation(format!(
                    "phi(relator) != 0 for {r:?}"
                )));
            }
        }
        if !max_ok(&self.meridian) || word::phi_of(&self.meridian, &self.phi) != 1 {
            return Err(KnotError::BadPresentation("phi(meridian) != 1".into()));
        }
        if let Some(l) = &self.longitude {
            if !max_ok(l) || word::phi_of(l, &self.phi) != 0 {
                return Err(KnotError::BadPresentation("phi(longitude) != 0".into()));
            }
        }
        Ok(())
    }
}

/// Sign and over-strand orientation of one crossing: (sign, over-in edge).
fn pd_sign(tup: &Crossing, n2: u32) -> Result<(i8, u32), KnotError> {
    let [_, p, _, q] = *tup;
    let succ = |x: u32| x % n2 + 1;
    if succ(p) == q {
        Ok((1, p))
    } else if succ(q) == p {
        Ok((-1, q))
    } else {
        Err(KnotError::MalformedPD(format!(
            "over edges {p},{q} not consecutive"
        )))
    }
}

fn pd_writhe(pd: &PDCode) -> Result<i64, KnotError> {
    let n2 = 2 * pd.0.len() as u32;
    let mut w = 0i64;
    for tup in &pd.0 {
        w += pd_sign(tup, n2)?.0 as i64;
    }
    Ok(w)
}

/// Arc index (0-based) for each edge 1..2n. Arcs break at under-in edges.
fn pd_arcs(pd: &PDCode) -> Result<Vec<usize>, KnotError> {
    let n = pd.0.len();
    let n2 = 2 * n as u32;
    // label sanity: every edge label 1..2n appears exactly twice
    let mut count = vec![0u8; n2 as usize + 1];
    for tup in &pd.0 {
        for &e in tup {
            if e == 0 || e > n2 {
                return Err(KnotError::MalformedPD(format!("edge label {e} out of range")));
            }
            count[e as usize] += 1;
        }
    }
    if count[1..].iter().any(|&c| c != 2) {
        return Err(KnotError::MalformedPD(
            "an edge label does not appear exactly twice".into(),
        ));
    }
    let under_in: std::collections::HashSet<u32> = pd.0.iter().map(|t| t[0]).collect();
    if under_in.len() != n {
        return Err(KnotError::MultiComponentLink);
    }
    // under-out must be under-in + 1 (single component numbered along the knot)
    for tup in &pd.0 {
        if tup[0] % n2 + 1 != tup[2] {
            return Err(KnotError::MultiComponentLink);
        }
    }
    let mut arc_of = vec![usize::MAX; n2 as usize + 1];
    let mut cur: i64 = -1;
    for e in 1..=n2 {
        if under_in.contains(&(if e == 1 { n2 } else { e - 1 })) || cur == -1 {
            cur += 1;
        }
        arc_of[e as usize] = cur as usize;
    }
    // if edge 1 is mid-arc, its arc wraps: merge the last arc into arc 0
    let wraps = !under_in.contains(&n2);
    if wraps && n > 0 {
        let last = arc_of[n2 as usize];
        for a in arc_of.iter_mut() {
            if *a == last {
                *a = 0;
            }
        }
        cur -= 1;
    }
    if (cur + 1) as usize != n {
        return Err(KnotError::MalformedPD("arc count mismatch".into()));
    }
    Ok(arc_of)
}

/// Wirtinger presentation: one generator per arc, one conjugation relator
/// per crossing with the last relator (crossings sorted) dropped to reach
/// deficiency one. Meridian is x_1; phi is identically 1.
pub fn wirtinger_from_pd(pd: &PDCode) -> Result<KnotPresentation, KnotError> {
    let n = pd.0.len();
    if n == 0 {
        return Ok(KnotPresentation {
            generators: 1,
            relators: vec![],
            meridian: vec![1],
            longitude: Some(vec![]),
            phi: vec![1],
            source: SourceTag::Wirtinger,
        });
    }
    let n2 = 2 * n as u32;
    let arc = pd_arcs(pd)?;
    let mut sorted = pd.0.clone();
    sorted.sort_unstable();
    let mut relators = Vec::with_capacity(n);
    for tup in &sorted {
        let [a, _, c, _] = *tup;
        let (sign, oin) = pd_sign(tup, n2)?;
        let xo = arc[oin as usize] as i32 + 1;
        let xa = arc[a as usize] as i32 + 1;
        let xc = arc[c as usize] as i32 + 1;
        relators.push(if sign > 0 {
            vec![xo, xa, -xo, -xc]
        } else {
            vec![-xo, xa, xo, -xc]
        });
    }
    relators.pop(); // deterministic: drop the last crossing's relator
    let pres = KnotPresentation {
        generators: n,
        relators,
        meridian: vec![1],
        longitude: Some(longitude_from_pd(pd)?),
        phi: vec![1; n],
        source: SourceTag::Wirtinger,
    };
    pres.validate()?;
    Ok(pres)
}

/// Longitude word: the over-arc generator (signed by crossing sign) at each
/// undercrossing along the knot, times meridian^(-writhe) so phi = 0.
pub fn longitude_from_pd(pd: &PDCode) -> Result<Word, KnotError> {
    let n = pd.0.len();
    if n == 0 {
        return Ok(vec![]);
    }
    let n2 = 2 * n as u32;
    let arc = pd_arcs(pd)?;
    let by_under: HashMap<u32, &Crossing> = pd.0.iter().map(|t| (t[0], t)).collect();
    let mut w: Word = Vec::new();
    for e in 1..=n2 {
        if let Some(tup) = by_under.get(&e) {
            let (sign, oin) = pd_sign(tup, n2)?;
            w.push(sign as i32 * (arc[oin as usize] as i32 + 1));
        }
    }
    let writhe = pd_writhe(pd)?;
    let meridian = arc[1] as i32 + 1;
    for _ in 0..writhe.abs() {
        w.push(if writhe > 0 { -meridian } else { meridian });
    }
    Ok(word::free_reduce(&w))
}

/// Abelianization degrees from the relator exponent-sum matrix via integer
/// row reduction: the quotient must be Z; phi is normalized to gcd 1 and
/// phi(meridian) = +1.
pub fn abelianization_degrees(
    generators: usize,
    relators: &[Word],
    meridian: &Word,
) -> Result<Vec<i64>, KnotError> {
    if relators.is_empty() {
        if generators != 1 {
            return Err(KnotError::NotCyclicAbelianization);
        }
        return Ok(vec![1]);
    }
    let mut m: Vec<Vec<i64>> = relators
        .iter()
        .map(|r| {
            (1..=generators as u32)
                .map(|g| word::exponent_sum(r, g))
                .collect()
        })
        .collect();
    // Smith-style reduction tracking column operations to read off both the
    // nullspace (phi direction) and the torsion diagonal.
    let rows = m.len();
    let cols = generators;
    let mut colops: Vec<Vec<i64>> = (0..cols)
        .map(|i| (0..cols).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut rank = 0usize;
    let mut diag = Vec::new();
    for _ in 0..cols.min(rows) {
        // find pivot: nonzero entry of minimal absolute value in remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in rank..rows {
            for j in rank..cols {
                if m[i][j] != 0
                    && pivot.map_or(true, |(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let (pi, pj) = match pivot {
            Some(p) => p,
            None => break,
        };
        m.swap(rank, pi);
        for row in m.iter_mut() {
            row.swap(rank, pj);
        }
        colops.swap(rank, pj);
        // clear the pivot row and column by repeated division
        loop {
            let mut clean = true;
            for i in rank + 1..rows {
                if m[i][rank] != 0 {
                    let q = div_round(m[i][rank], m[rank][rank]);
                    for j in rank..cols {
                        m[i][j] -= q * m[rank][j];
                    }
                    if m[i][rank] != 0 {
                        m.swap(rank, i);
                        clean = false;
                    }
                }
            }
            for j in rank + 1..cols {
                if m[rank][j] != 0 {
                    let q = div_round(m[rank][j], m[rank][rank]);
                    for row in m.iter_mut() {
                        row[j] -= q * row[rank];
                    }
                    for k in 0..cols {
                        colops[j][k] -= q * colops[rank][k];
                    }
                    if m[rank][j] != 0 {
                        for row in m.iter_mut() {
                            row.swap(rank, j);
                        }
                        colops.swap(rank, j);
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        diag.push(m[rank][rank].abs());
        rank += 1;
    }
    // knot group: rank must be n-1 and all invariant factors 1 (quotient Z)
    if rank != generators - 1 || diag.iter().any(|&d| d != 1) {
        return Err(KnotError::NotCyclicAbelianization);
    }
    // phi spans the kernel of the exponent matrix: the last column-op row
    let mut phi: Vec<i64> = colops[cols - 1].clone();
    let g = phi.iter().fold(0i64, |a, &b| gcd(a, b.abs()));
    if g > 1 {
        phi.iter_mut().for_each(|v| *v /= g);
    }
    let m_phi = word::phi_of(meridian, &phi);
    if m_phi.abs() != 1 {
        return Err(KnotError::NotCyclicAbelianization);
    }
    if m_phi < 0 {
        phi.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(phi)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Rounded division used by the reduction (minimizes remainders).
fn div_round(a: i64, b: i64) -> i64 {
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + r.signum() * b.signum()
    } else {
        q
    }
}

/// Connected sum at the presentation level: disjoint generators, all
/// relators, plus the glue relator meridian1 * meridian2^{-1}.
pub fn connected_sum(p1: &KnotPresentation, p2: &KnotPresentation) -> KnotPresentation {
    let offset = p1.generators as i32;
    let shift = |w: &Word| -> Word {
        w.iter()
            .map(|&x| if x > 0 { x + offset } else { x - offset })
            .collect()
    };
    let mut relators = p1.relators.clone();
    relators.extend(p2.relators.iter().map(|r| shift(r)));
    let m2 = shift(&p2.meridian);
    relators.push(word::concat(&[&p1.meridian, &word::inverse(&m2)]));
    let mut phi = p1.phi.clone();
    phi.extend_from_slice(&p2.phi);
    let longitude = match (&p1.longitude, &p2.longitude) {
        (Some(l1), Some(l2)) => Some(word::concat(&[l1, &shift(l2)])),
        _ => None,
    };
    let out = KnotPresentation {
        generators: p1.generators + p2.generators,
        relators,
        meridian: p1.meridian.clone(),
        longitude,
        phi,
        source: SourceTag::Composite,
    };
    debug_assert!(out.validate().is_ok());
    out
}

/// (p, q)-cable presentation: one new generator l' with the relator
/// l^p m^q l'^{-p}; the cable meridian is m^a l'^b with a·p + b·q = 1
/// (extended gcd, minimal |a|). Abelianization degrees are recomputed.
pub fn cable(
    base: &KnotPresentation,
    cable_p: i64,
    cable_q: i64,
) -> Result<KnotPresentation, KnotError> {
    let longitude = base.longitude.as_ref().ok_or(KnotError::MissingLongitude)?;
    if cable_p <= 0 || gcd(cable_p, cable_q) != 1 {
        return Err(KnotError::NotCoprime);
    }
    let lp = base.generators as i32 + 1; // the new generator l'
    let mut relators = base.relators.clone();
    let mut glue: Word = Vec::new();
    for _ in 0..cable_p {
        glue.extend_from_slice(longitude);
    }
    for _ in 0..cable_q.abs() {
        glue.extend(base.meridian.iter().map(|&x| if cable_q > 0 { x } else { -x }));
    }
    for _ in 0..cable_p {
        glue.push(-lp);
    }
    relators.push(word::free_reduce(&glue));
    // cable meridian m' = m^a l'^b with a p + b q = 1, minimal |a|
    let (mut a, mut b) = ext_gcd(cable_p, cable_q);
    // shift a by multiples of q toward minimal |a| (deterministic)
    while (a - cable_q).abs() < a.abs() {
        a -= cable_q;
        b += cable_p;
    }
    while (a + cable_q).abs() < a.abs() {
        a += cable_q;
        b -= cable_p;
    }
    let mut meridian: Word = Vec::new();
    for _ in 0..a.abs() {
        meridian.extend(base.meridian.iter().map(|&x| if a > 0 { x } else { -x }));
    }
    for _ in 0..b.abs() {
        meridian.push(if b > 0 { lp } else { -lp });
    }
    let meridian = word::free_reduce(&meridian);
    let generators = base.generators + 1;
    let phi = abelianization_degrees(generators, &relators, &meridian)?;
    // cable longitude: l^p m^{pq} has phi 0... kept out of scope (satellite
    // longitudes are not needed by any consumer); omit rather than guess.
    let out = KnotPresentation {
        generators,
        relators,
        meridian,
        longitude: None,
        phi,
        source: SourceTag::Composite,
    };
    out.validate()?;
    Ok(out)
}

/// Extended gcd for coprime (p, q): returns (a, b) with a p + b q = 1.
fn ext_gcd(p: i64, q: i64) -> (i64, i64) {
    if q == 0 {
        return (1, 0);
    }
    let (a1, b1) = ext_gcd(q, p.rem_euclid(q));
    (b1, a1 - (p.div_euclid(q)) * b1)
}

/// One record of the bundled knot table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KnotRecord {
    pub name: String,
    pub pd: Option<Vec<Crossing>>,
    /// Reduced (Tietze-simplified) presentation, when bundled.
    pub presentation: Option<ReducedPresentation>,
    /// Expected classical Alexander coefficients, lowest degree first
    /// (cross-checked at load against the Wirtinger computation elsewhere).
    pub alexander: Option<Vec<i64>>,
    pub provenance: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReducedPresentation {
    pub generators: usize,
    pub relators: Vec<Word>,
    pub meridian: Word,
    pub longitude: Option<Word>,
    pub phi: Vec<i64>,
}

/// A loaded knot: the raw record plus validated presentations.
#[derive(Clone, Debug)]
pub struct KnotEntry {
    pub record: KnotRecord,
    /// Wirtinger presentation derived from the PD code (when present).
    pub wirtinger: Option<KnotPresentation>,
    /// Bundled reduced presentation (validated), when present.
    pub reduced: Option<KnotPresentation>,
}

impl KnotEntry {
    /// The presentation used for invariant computations: the reduced one
    /// when bundled (smaller matrices), otherwise Wirtinger.
    pub fn presentation(&self) -> &KnotPresentation {
        self.reduced
            .as_ref()
            .or(self.wirtinger.as_ref())
            .expect("table entries always have at least one presentation")
    }
}

/// Load the knot table: one JSON record per line.
pub fn load_knot_table(path: &std::path::Path) -> Result<HashMap<String, KnotEntry>, KnotError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| KnotError::ParseError(format!("{}: {e}", path.display())))?;
    let mut out = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: KnotRecord = serde_json::from_str(line)
            .map_err(|e| KnotError::ParseError(format!("line {}: {e}", lineno + 1)))?;
        let wirtinger = match &record.pd {
            Some(pd) => Some(wirtinger_from_pd(&PDCode(pd.clone()))?),
            None => None,
        };
        let reduced = match &record.presentation {
            Some(rp) => {
                let pres = KnotPresentation {
                    generators: rp.generators,
                    relators: rp.relators.clone(),
                    meridian: rp.meridian.clone(),
                    longitude: rp.longitude.clone(),
                    phi: rp.phi.clone(),
                    source: SourceTag::Reduced,
                };
                pres.validate()?;
                // cross-check the bundled phi against recomputation
                let phi = abelianization_degrees(rp.generators, &rp.relators, &rp.meridian)?;
                if phi != rp.phi {
                    return Err(KnotError::ParseError(format!(
                        "{}: bundled phi disagrees with abelianization",
                        record.name
                    )));
                }
                Some(pres)
            }
            None => None,
        };
        if wirtinger.is_none() && reduced.is_none() {
            return Err(KnotError::ParseError(format!(
                "{}: record has neither PD code nor presentation",
                record.name
            )));
        }
        out.insert(
            record.name.clone(),
            KnotEntry {
                record,
                wirtinger,
                reduced,
            },
        );
    }
    Ok(out)
}

/// Standard small diagrams used across tests.
pub mod diagrams {
    use super::PDCode;

    /// Left-handed trefoil (writhe -3).
    pub fn trefoil() -> PDCode {
        PDCode(vec![[1, 5, 2, 4], [3, 1, 4, 6], [5, 3, 6, 2]])
    }

    /// Figure-eight knot (writhe 0).
    pub fn figure_eight() -> PDCode {
        PDCode(vec![[4, 2, 5, 1], [8, 6, 1, 5], [6, 3, 7, 4], [2, 7, 3, 8]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trefoil_wirtinger_shape() {
        let p = wirtinger_from_pd(&diagrams::trefoil()).unwrap();
        assert_eq!(p.generators, 3);
        assert_eq!(p.relators.len(), 2);
        assert!(p.relators.iter().all(|r| r.len() == 4));
        assert_eq!(p.phi, vec![1, 1, 1]);
        p.validate().unwrap();
    }

    #[test]
    fn unknot_wirtinger() {
        let p = wirtinger_from_pd(&PDCode(vec![])).unwrap();
        assert_eq!(p.generators, 1);
        assert!(p.relators.is_empty());
        assert_eq!(p.longitude, Some(vec![]));
    }

    #[test]
    fn longitude_phi_zero() {
        for pd in [diagrams::trefoil(), diagrams::figure_eight()] {
            let p = wirtinger_from_pd(&pd).unwrap();
            let l = p.longitude.clone().unwrap();
            assert_eq!(word::phi_of(&l, &p.phi), 0);
        }
        // writhe: trefoil -3 (cancelled in the longitude), figure-eight 0
        assert_eq!(pd_writhe(&diagrams::trefoil()).unwrap(), -3);
        assert_eq!(pd_writhe(&diagrams::figure_eight()).unwrap(), 0);
    }

    #[test]
    fn malformed_pd_rejected() {
        let bad = PDCode(vec![[1, 2, 3, 4], [1, 2, 3, 4]]);
        assert!(wirtinger_from_pd(&bad).is_err());
        let out_of_range = PDCode(vec![[1, 9, 2, 4]]);
        assert!(wirtinger_from_pd(&out_of_range).is_err());
    }

    #[test]
    fn abelianization_reduced_trefoil() {
        // <a, b | a^2 b^-3>, meridian a b^-1 -> phi(a)=3, phi(b)=2
        let phi =
            abelianization_degrees(2, &[vec![1, 1, -2, -2, -2]], &vec![1, -2]).unwrap();
        assert_eq!(phi, vec![3, 2]);
    }

    #[test]
    fn abelianization_wirtinger_all_ones() {
        let p = wirtinger_from_pd(&diagrams::trefoil()).unwrap();
        let phi = abelianization_degrees(p.generators, &p.relators, &p.meridian).unwrap();
        assert_eq!(phi, vec![1, 1, 1]);
    }

    #[test]
    fn abelianization_torsion_rejected() {
        // <a, b | a^2, b^2> has quotient Z2 x Z2
        assert!(matches!(
            abelianization_degrees(2, &[vec![1, 1], vec![2, 2]], &vec![1]),
            Err(KnotError::NotCyclicAbelianization)
        ));
    }

    #[test]
    fn connected_sum_shape() {
        let t = wirtinger_from_pd(&diagrams::trefoil()).unwrap();
        let f = wirtinger_from_pd(&diagrams::figure_eight()).unwrap();
        let s = connected_sum(&t, &f);
        assert_eq!(s.generators, 7);
        assert_eq!(s.relators.len(), 6);
        s.validate().unwrap();
        assert_eq!(s.source, SourceTag::Composite);
    }

    #[test]
    fn cable_shape() {
        let t = wirtinger_from_pd(&diagrams::trefoil()).unwrap();
        let c = cable(&t, 2, 3).unwrap();
        assert_eq!(c.generators, 4);
        assert_eq!(c.relators.len(), 3);
        c.validate().unwrap();
        // phi: new meridian has phi 1; old meridian maps to degree 2 = p
        assert_eq!(word::phi_of(&t.meridian, &c.phi[..3].to_vec()), 2);
        assert!(matches!(cable(&t, 2, 4), Err(KnotError::NotCoprime)));
        let mut no_l = t.clone();
        no_l.longitude = None;
        assert!(matches!(cable(&no_l, 2, 3), Err(KnotError::MissingLongitude)));
    }
}
