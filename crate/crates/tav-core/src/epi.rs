//! Homomorphism and epimorphism enumeration from knot group presentations
//! into finite groups: conjugacy-class restriction and relation propagation
//! for Wirtinger presentations, prefix-pruned backtracking otherwise, and
//! reduction to inner-automorphism orbit representatives.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::FiniteGroup;
use crate::knot::{KnotPresentation, SourceTag};
use crate::word::Word;

/// A homomorphism from a knot presentation into a finite group, given by the
/// element index of each generator's image. Always relator-validated at
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupHom {
    pub images: Vec<usize>,
    /// Cached: the images generate the whole group.
    pub surjective: bool,
}

#[derive(Debug, Error)]
pub enum EpiError {
    #[error("hom set is not closed under conjugation: conjugate of {member:?} by element {by} is absent")]
    NotClosedUnderAction { member: Vec<usize>, by: usize },
}

/// Checks that `images` satisfies every relator of `p` in `g`.
pub fn satisfies_relators(p: &KnotPresentation, g: &FiniteGroup, images: &[usize]) -> bool {
    p.relators
        .iter()
        .all(|r| g.eval_word(r, images) == g.identity())
}

fn make_hom(p: &KnotPresentation, g: &FiniteGroup, images: Vec<usize>) -> GroupHom {
    debug_assert!(satisfies_relators(p, g, &images));
    let surjective = g.subgroup_closure(&images).len() == g.order();
    GroupHom { images, surjective }
}

/// A Wirtinger relator `x_o^e x_a x_o^-e x_c^-1` (e = ±1): knowing any two of
/// (o, a, c) determines the third.
struct ConjRelator {
    over: usize,
    arg: usize,
    out: usize,
    sign: i32,
}

fn parse_conj_relator(r: &Word) -> Option<ConjRelator> {
    if r.len() != 4 {
        return None;
    }
    let (o, a, oi, c) = (r[0], r[1], r[2], r[3]);
    if a > 0 && c < 0 && o == -oi && o != 0 {
        Some(ConjRelator {
            over: (o.unsigned_abs() - 1) as usize,
            arg: (a - 1) as usize,
            out: (-c - 1) as usize,
            sign: o.signum(),
        })
    } else {
        None
    }
}

/// Propagate Wirtinger relators over a partial assignment. Returns false on a
/// contradiction.
fn propagate(g: &FiniteGroup, rels: &[ConjRelator], assign: &mut [Option<usize>]) -> bool {
    loop {
        let mut changed = false;
        for r in rels {
            let fo = match assign[r.over] {
                Some(v) => v,
                None => continue,
            };
            let conj_by = if r.sign > 0 { g.inv(fo) } else { fo };
            match (assign[r.arg], assign[r.out]) {
                (Some(fa), None) => {
                    assign[r.out] = Some(g.conjugate(fa, conj_by));
                    changed = true;
                }
                (None, Some(fc)) => {
                    assign[r.arg] = Some(g.conjugate(fc, g.inv(conj_by)));
                    changed = true;
                }
                (Some(fa), Some(fc)) => {
                    if g.conjugate(fa, conj_by) != fc {
                        return false;
                    }
                }
                (None, None) => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

fn wirtinger_search(
    p: &KnotPresentation,
    g: &FiniteGroup,
    rels: &[ConjRelator],
    surjective_only: bool,
) -> Vec<GroupHom> {
    // Classes ordered by size then by minimal element; all generator images of
    // a single hom lie in one class, so classes partition the hom set.
    let mut classes = g.conjugacy_classes();
    classes.sort_by_key(|c| (c.len(), c[0]));
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    for class in classes {
        let rep = class[0];
        if surjective_only && g.normal_closure(rep).len() != g.order() {
            continue;
        }
        let in_class: Vec<bool> = {
            let mut v = vec![false; g.order()];
            for &x in &class {
                v[x] = true;
            }
            v
        };
        // Pin the first generator to the class representative; the full hom
        // set in this class is recovered below by conjugating the pinned ones.
        let mut assign: Vec<Option<usize>> = vec![None; p.generators];
        assign[0] = Some(rep);
        let mut pinned: Vec<Vec<usize>> = Vec::new();
        backtrack_class(g, rels, &class, &in_class, &mut assign, &mut pinned);
        for images in pinned {
            if !satisfies_relators(p, g, &images) {
                continue;
            }
            for y in 0..g.order() {
                let conj: Vec<usize> = images.iter().map(|&x| g.conjugate(x, y)).collect();
                out.insert(conj);
            }
        }
    }
    out.into_iter()
        .map(|images| make_hom(p, g, images))
        .filter(|h| !surjective_only || h.surjective)
        .collect()
}

fn backtrack_class(
    g: &FiniteGroup,
    rels: &[ConjRelator],
    class: &[usize],
    in_class: &[bool],
    assign: &mut Vec<Option<usize>>,
    out: &mut Vec<Vec<usize>>,
) {
    let saved = assign.clone();
    if !propagate(g, rels, assign) {
        *assign = saved;
        return;
    }
    if assign.iter().any(|a| matches!(a, Some(v) if !in_class[*v])) {
        *assign = saved;
        return;
    }
    match assign.iter().position(|a| a.is_none()) {
        None => out.push(assign.iter().map(|a| a.unwrap()).collect()),
        Some(i) => {
            for &x in class {
                assign[i] = Some(x);
                backtrack_class(g, rels, class, in_class, assign, out);
                assign[i] = None;
            }
        }
    }
    *assign = saved;
}

fn backtrack_general(
    p: &KnotPresentation,
    g: &FiniteGroup,
    rels_by_maxgen: &[Vec<&Word>],
    images: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let k = images.len();
    if k == p.generators {
        out.push(images.clone());
        return;
    }
    'cand: for x in 0..g.order() {
        images.push(x);
        for r in &rels_by_maxgen[k + 1] {
            if g.eval_word(r, images) != g.identity() {
                images.pop();
                continue 'cand;
            }
        }
        backtrack_general(p, g, rels_by_maxgen, images, out);
        images.pop();
    }
}

/// Complete, duplicate-free, deterministically ordered list of homomorphisms
/// from `p` into `g`, filtered to epimorphisms when `surjective_only`.
pub fn enumerate_homs(
    p: &KnotPresentation,
    g: &FiniteGroup,
    surjective_only: bool,
) -> Vec<GroupHom> {
    let conj_rels: Option<Vec<ConjRelator>> = if p.source == SourceTag::Wirtinger {
        p.relators.iter().map(parse_conj_relator).collect()
    } else {
        None
    };
    if let Some(rels) = conj_rels {
        return wirtinger_search(p, g, &rels, surjective_only);
    }
    // General presentations: plain backtracking, pruned by every relator whose
    // generators are already assigned.
    let mut rels_by_maxgen: Vec<Vec<&Word>> = vec![Vec::new(); p.generators + 1];
    for r in &p.relators {
        let m = crate::word::max_gen(r) as usize;
        rels_by_maxgen[m.max(1)].push(r);
    }
    let mut images = Vec::new();
    let mut raw = Vec::new();
    backtrack_general(p, g, &rels_by_maxgen, &mut images, &mut raw);
    raw.sort();
    raw.into_iter()
        .map(|v| make_hom(p, g, v))
        .filter(|h| !surjective_only || h.surjective)
        .collect()
}

/// One inner-automorphism orbit of homomorphisms: the lexicographically
/// smallest member and the orbit size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomOrbit {
    pub rep: GroupHom,
    pub size: usize,
}

/// Reduce a conjugation-closed hom list to orbit representatives, sorted by
/// representative. Errors if some conjugate is missing from the input.
pub fn reduce_by_conjugation(
    homs: &[GroupHom],
    g: &FiniteGroup,
) -> Result<Vec<HomOrbit>, EpiError> {
    let index: BTreeSet<&[usize]> = homs.iter().map(|h| h.images.as_slice()).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut orbits = Vec::new();
    for h in homs {
        if seen.contains(&h.images) {
            continue;
        }
        let mut orbit: BTreeSet<Vec<usize>> = BTreeSet::new();
        for y in 0..g.order() {
            let conj: Vec<usize> = h.images.iter().map(|&x| g.conjugate(x, y)).collect();
            if !index.contains(conj.as_slice()) {
                return Err(EpiError::NotClosedUnderAction {
                    member: h.images.clone(),
                    by: y,
                });
            }
            orbit.insert(conj);
        }
        let rep_images = orbit.iter().next().unwrap().clone();
        let size = orbit.len();
        seen.extend(orbit);
        orbits.push(HomOrbit {
            rep: GroupHom {
                images: rep_images,
                surjective: h.surjective,
            },
            size,
        });
    }
    orbits.sort_by(|a, b| a.rep.images.cmp(&b.rep.images));
    Ok(orbits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::{cable, diagrams, wirtinger_from_pd, KnotPresentation};

    fn reduced_trefoil() -> KnotPresentation {
        KnotPresentation {
            generators: 2,
            relators: vec![vec![1, 2, 1, -2, -1, -2]],
            meridian: vec![1],
            longitude: None,
            phi: vec![1, 1],
            source: SourceTag::Reduced,
        }
    }

    #[test]
    fn trefoil_s3_six_epimorphisms() {
        let g = FiniteGroup::symmetric(3);
        // independent oracle: brute force over all 36 assignments of the
        // two-generator reduced presentation
        let p2 = reduced_trefoil();
        let mut oracle = 0;
        for a in 0..6 {
            for b in 0..6 {
                let images = [a, b];
                if satisfies_relators(&p2, &g, &images)
                    && g.subgroup_closure(&images).len() == 6
                {
                    oracle += 1;
                }
            }
        }
        assert_eq!(oracle, 6);
        // both search paths agree with it
        assert_eq!(enumerate_homs(&p2, &g, true).len(), 6);
        let pw = wirtinger_from_pd(&diagrams::trefoil()).unwrap();
        let epis = enumerate_homs(&pw, &g, true);
        assert_eq!(epis.len(), 6);
        for h in &epis {
            assert!(satisfies_relators(&pw, &g, &h.images));
            assert!(h.surjective);
        }
    }

    #[test]
    fn homs_to_cyclic_count_n() {
        // any knot has exactly n homs to Z_n (through abelianization), with
        // euler-phi(n) of them surjective
        let g = FiniteGroup::cyclic(6);
        let p = wirtinger_from_pd(&diagrams::figure_eight()).unwrap();
        let homs = enumerate_homs(&p, &g, false);
        assert_eq!(homs.len(), 6);
        assert_eq!(homs.iter().filter(|h| h.surjective).count(), 2);
        // images of each hom are all equal (generators conjugate, group abelian)
        for h in &homs {
            assert!(h.images.iter().all(|&x| x == h.images[0]));
        }
    }

    #[test]
    fn conjugation_orbits() {
        let g = FiniteGroup::symmetric(3);
        let pw = wirtinger_from_pd(&diagrams::trefoil()).unwrap();
        let epis = enumerate_homs(&pw, &g, true);
        let orbits = reduce_by_conjugation(&epis, &g).unwrap();
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].size, 6);
        assert!(epis.iter().all(|h| orbits[0].rep.images <= h.images));
    }

    #[test]
    fn abelian_orbits_are_singletons() {
        let g = FiniteGroup::cyclic(6);
        let p = wirtinger_from_pd(&diagrams::trefoil()).unwrap();
        let homs = enumerate_homs(&p, &g, false);
        let orbits = reduce_by_conjugation(&homs, &g).unwrap();
        assert_eq!(orbits.len(), homs.len());
        assert!(orbits.iter().all(|o| o.size == 1));
    }

    #[test]
    fn not_closed_reported() {
        let g = FiniteGroup::symmetric(3);
        let pw = wirtinger_from_pd(&diagrams::trefoil()).unwrap();
        let mut epis = enumerate_homs(&pw, &g, true);
        epis.pop();
        assert!(matches!(
            reduce_by_conjugation(&epis, &g),
            Err(EpiError::NotClosedUnderAction { .. })
        ));
    }

    #[test]
    fn cable_images_are_cyclic() {
        // every hom from the (6,1)-cable of the trefoil to S3 has cyclic image
        let base = wirtinger_from_pd(&diagrams::trefoil()).unwrap();
        let c = cable(&base, 6, 1).unwrap();
        let g = FiniteGroup::symmetric(3);
        let homs = enumerate_homs(&c, &g, false);
        assert!(!homs.is_empty());
        for h in &homs {
            let img = g.subgroup_closure(&h.images);
            let cyclic = img.iter().any(|&x| g.element_order(x) == img.len());
            assert!(cyclic, "non-cyclic image {:?}", h.images);
        }
    }
}
