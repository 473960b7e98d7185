//! Finite permutation groups: closure from generators, structural queries
//! (conjugacy classes, normal closures, commutator subgroup), and the TAV
//! classifier: a finite group is TAV iff it is normally generated by a
//! single element and its commutator subgroup is not a p-group.

use crate::perm::Permutation;
use crate::word::Word;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Hard ceiling on constructed group orders (configurable per call).
pub const DEFAULT_ORDER_BOUND: usize = 10_000;
/// Witness search enumerates subgroups of commutators up to this order.
pub const WITNESS_SUBGROUP_BOUND: usize = 200;

#[derive(Debug, thiserror::Error)]
pub enum GroupError {
    #[error("group order exceeds the bound {0}")]
    OrderBoundExceeded(usize),
    #[error("generator degree mismatch")]
    DegreeMismatch,
}

/// Finite group: the full element list (deterministic breadth-first closure
/// order, identity first) plus an index for constant-time multiplication.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    pub degree: usize,
    pub gens: Vec<Permutation>,
    pub elements: Vec<Permutation>,
    index: HashMap<Vec<u32>, usize>,
    /// multiplication table, built when the order is small enough
    table: Option<Vec<u32>>,
}

impl FiniteGroup {
    /// Closure of the generators under composition; deterministic BFS order.
    pub fn from_generators(
        degree: usize,
        gens: Vec<Permutation>,
        bound: usize,
    ) -> Result<Self, GroupError> {
        if gens.iter().any(|g| g.degree() != degree) {
            return Err(GroupError::DegreeMismatch);
        }
        let id = Permutation::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id.image.clone(), 0usize);
        let mut head = 0;
        while head < elements.len() {
            let cur = elements[head].clone();
            head += 1;
            for g in &gens {
                let nxt = cur.then(g);
                if !index.contains_key(&nxt.image) {
                    if elements.len() >= bound {
                        return Err(GroupError::OrderBoundExceeded(bound));
                    }
                    index.insert(nxt.image.clone(), elements.len());
                    elements.push(nxt);
                }
            }
        }
        let order = elements.len();
        let table = (order <= 1024).then(|| {
            let mut t = vec![0u32; order * order];
            for i in 0..order {
                for j in 0..order {
                    let p = elements[i].then(&elements[j]);
                    t[i * order + j] = index[&p.image] as u32;
                }
            }
            t
        });
        Ok(FiniteGroup {
            degree,
            gens,
            elements,
            index,
            table,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(&p.image).copied()
    }

    /// Product of element indices (apply i, then j).
    pub fn mul(&self, i: usize, j: usize) -> usize {
        match &self.table {
            Some(t) => t[i * self.order() + j] as u32 as usize,
            None => self.index[&self.elements[i].then(&self.elements[j]).image],
        }
    }

    pub fn inv(&self, i: usize) -> usize {
        self.index[&self.elements[i].inverse().image]
    }

    pub fn conjugate(&self, g: usize, by: usize) -> usize {
        self.mul(self.inv(by), self.mul(g, by))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, g);
            n += 1;
        }
        n
    }

    /// Evaluate a word against images of the (1-based) word generators.
    pub fn eval_word(&self, w: &Word, images: &[usize]) -> usize {
        let mut acc = 0usize;
        for &x in w {
            let g = images[(x.unsigned_abs() - 1) as usize];
            let g = if x > 0 { g } else { self.inv(g) };
            acc = self.mul(acc, g);
        }
        acc
    }

    /// Subgroup generated by the given element indices, as a sorted list.
    pub fn subgroup_closure(&self, seeds: &[usize]) -> Vec<usize> {
        let mut inset = vec![false; self.order()];
        inset[0] = true;
        let mut members = vec![0usize];
        let mut head = 0;
        while head < members.len() {
            let cur = members[head];
            head += 1;
            for &s in seeds {
                let nxt = self.mul(cur, s);
                if !inset[nxt] {
                    inset[nxt] = true;
                    members.push(nxt);
                }
            }
        }
        members.sort_unstable();
        members
    }

    /// Smallest normal subgroup containing `seed`.
    pub fn normal_closure(&self, seed: usize) -> Vec<usize> {
        let conjugates: Vec<usize> = (0..self.order())
            .map(|h| self.conjugate(seed, h))
            .collect();
        let mut uniq = conjugates;
        uniq.sort_unstable();
        uniq.dedup();
        self.subgroup_closure(&uniq)
    }

    /// Conjugacy classes, each sorted, ordered by minimal member index.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut assigned = vec![false; n];
        let mut classes = Vec::new();
        for g in 0..n {
            if assigned[g] {
                continue;
            }
            let mut class: Vec<usize> = (0..n).map(|h| self.conjugate(g, h)).collect();
            class.sort_unstable();
            class.dedup();
            for &x in &class {
                assigned[x] = true;
            }
            classes.push(class);
        }
        classes
    }

    /// Closure of all commutators [g, h] = g⁻¹h⁻¹gh.
    pub fn commutator_subgroup(&self) -> Vec<usize> {
        let n = self.order();
        let mut seeds = Vec::new();
        let mut seen = vec![false; n];
        for g in 0..n {
            for h in 0..n {
                let c = self.mul(
                    self.inv(g),
                    self.mul(self.inv(h), self.mul(g, h)),
                );
                if !seen[c] {
                    seen[c] = true;
                    seeds.push(c);
                }
            }
        }
        self.subgroup_closure(&seeds)
    }

    /// Symmetric group S_n on n points with standard generators
    /// (transposition, n-cycle).
    pub fn symmetric(n: usize) -> Self {
        assert!(n >= 1);
        if n == 1 {
            return Self::from_generators(1, vec![], 2).unwrap();
        }
        let transposition = Permutation::from_cycles(n, &[&[0, 1]]);
        let cycle = Permutation::from_cycles(n, &[&(0..n as u32).collect::<Vec<_>>()]);
        Self::from_generators(n, vec![transposition, cycle], DEFAULT_ORDER_BOUND)
            .expect("symmetric group within bound")
    }

    /// Cyclic group Z_n acting on n points.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let cycle = Permutation::from_cycles(n, &[&(0..n as u32).collect::<Vec<_>>()]);
        Self::from_generators(n, vec![cycle], DEFAULT_ORDER_BOUND).expect("cyclic group")
    }

    /// Right-multiplication action of element g on the element list:
    /// result[i] = index of elements[i] · g. This is the permutation behind
    /// the regular representation ρ(g).
    pub fn right_action(&self, g: usize) -> Vec<usize> {
        (0..self.order()).map(|i| self.mul(i, g)).collect()
    }
}

/// p-group test on an order. The trivial group counts as a p-group by
/// convention (no distinguished prime).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsPGroup {
    No,
    Yes { prime: Option<u64> },
}

pub fn is_p_group(order: u64) -> IsPGroup {
    assert!(order >= 1);
    if order == 1 {
        return IsPGroup::Yes { prime: None };
    }
    let p = smallest_prime_factor(order);
    let mut m = order;
    while m % p == 0 {
        m /= p;
    }
    if m == 1 {
        IsPGroup::Yes { prime: Some(p) }
    } else {
        IsPGroup::No
    }
}

pub fn smallest_prime_factor(n: u64) -> u64 {
    debug_assert!(n >= 2);
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

fn prime_factorization(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    while n > 1 {
        let p = smallest_prime_factor(n);
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        out.push((p, e));
    }
    out
}

/// The two shapes of a minimal non-prime-power subgroup (Gruenberg).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessCase {
    CyclicPq,
    NonabelianPnQ,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TavVerdict {
    pub normally_single_generated: bool,
    /// An element whose normal closure is the whole group, when one exists.
    pub nsg_witness: Option<usize>,
    pub commutator_order: u64,
    pub commutator_is_p_group: bool,
    pub commutator_prime: Option<u64>,
    pub is_tav: bool,
    /// Minimal non-prime-power subgroup of the commutator subgroup, present
    /// whenever the commutator subgroup is not a p-group.
    pub witness_subgroup: Option<(Vec<usize>, WitnessCase)>,
}

#[derive(Debug, thiserror::Error)]
pub enum WitnessError {
    #[error("input order is a prime power")]
    PrimePowerInput,
    #[error("subgroup order {0} exceeds the witness search bound")]
    BoundExceeded(usize),
}

/// A minimal subgroup of H (given as element indices in G) whose order is
/// not a prime power. Every non-prime-power group contains a 2-generated
/// non-prime-power subgroup (pick elements of coprime prime-power orders),
/// so enumerating subgroups generated by at most two elements and taking
/// the smallest non-prime-power order yields a minimal one. Ties break by
/// smallest generator indices.
pub fn minimal_nonprimepower_subgroup(
    g: &FiniteGroup,
    h: &[usize],
) -> Result<(Vec<usize>, WitnessCase), WitnessError> {
    if !matches!(is_p_group(h.len() as u64), IsPGroup::No) {
        return Err(WitnessError::PrimePowerInput);
    }
    if h.len() > WITNESS_SUBGROUP_BOUND {
        return Err(WitnessError::BoundExceeded(h.len()));
    }
    let inset: std::collections::HashSet<usize> = h.iter().copied().collect();
    let mut best: Option<Vec<usize>> = None;
    let consider = |sub: Vec<usize>, best: &mut Option<Vec<usize>>| {
        if matches!(is_p_group(sub.len() as u64), IsPGroup::No)
            && best.as_ref().map_or(true, |b| sub.len() < b.len())
        {
            *best = Some(sub);
        }
    };
    for (i, &a) in h.iter().enumerate() {
        let sub = g.subgroup_closure(&[a]);
        debug_assert!(sub.iter().all(|x| inset.contains(x)));
        consider(sub, &mut best);
        for &b in &h[i + 1..] {
            let sub = g.subgroup_closure(&[a, b]);
            consider(sub, &mut best);
        }
    }
    let sub = best.expect("non-prime-power input has a 2-generated witness");
    let order = sub.len() as u64;
    let factors = prime_factorization(order);
    let cyclic = sub.iter().any(|&x| g.element_order(x) == sub.len());
    let case = if cyclic && factors.len() == 2 && factors.iter().all(|&(_, e)| e == 1) {
        WitnessCase::CyclicPq
    } else {
        debug_assert!(factors.len() == 2 && factors.iter().any(|&(_, e)| e == 1));
        WitnessCase::NonabelianPnQ
    };
    Ok((sub, case))
}

/// Theorem-4.1 classifier: TAV iff normally generated by one element and
/// the commutator subgroup is not a p-group.
pub fn classify_tav(g: &FiniteGroup) -> TavVerdict {
    // normal closure is a class function: test one representative per class
    let mut nsg_witness = None;
    for class in g.conjugacy_classes() {
        let rep = class[0];
        if g.normal_closure(rep).len() == g.order() {
            nsg_witness = Some(rep);
            break;
        }
    }
    let normally_single_generated = nsg_witness.is_some();
    if normally_single_generated {
        // consistency: the abelianization G/[G,G] must then be cyclic
        debug_assert!(abelianization_is_cyclic(g));
    }
    let commutator = g.commutator_subgroup();
    let commutator_order = commutator.len() as u64;
    let pg = is_p_group(commutator_order);
    let (commutator_is_p_group, commutator_prime) = match pg {
        IsPGroup::Yes { prime } => (true, prime),
        IsPGroup::No => (false, None),
    };
    let witness_subgroup = if !commutator_is_p_group {
        Some(
            minimal_nonprimepower_subgroup(g, &commutator)
                .expect("commutator order is not a prime power"),
        )
    } else {
        None
    };
    TavVerdict {
        normally_single_generated,
        nsg_witness,
        commutator_order,
        commutator_is_p_group,
        commutator_prime,
        is_tav: normally_single_generated && !commutator_is_p_group,
        witness_subgroup,
    }
}

fn abelianization_is_cyclic(g: &FiniteGroup) -> bool {
    let commutator = g.commutator_subgroup();
    (0..g.order()).any(|x| {
        let mut seeds = commutator.clone();
        seeds.push(x);
        g.subgroup_closure(&seeds).len() == g.order()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::group::FiniteGroup;

    fn s_n(n: usize) -> FiniteGroup {
        FiniteGroup::symmetric(n)
    }

    fn z_n(n: usize) -> FiniteGroup {
        FiniteGroup::cyclic(n)
    }

    #[test]
    fn closure_examples() {
        assert_eq!(s_n(3).order(), 6);
        assert_eq!(z_n(4).order(), 4);
        assert_eq!(s_n(4).order(), 24);
    }

    #[test]
    fn order_bound_enforced() {
        let transposition = Permutation::from_cycles(8, &[&[0, 1]]);
        let cycle = Permutation::from_cycles(8, &[&(0..8).collect::<Vec<_>>()]);
        let r = FiniteGroup::from_generators(8, vec![transposition, cycle], 10_000);
        assert!(matches!(r, Err(GroupError::OrderBoundExceeded(_))));
    }

    #[test]
    fn conjugacy_class_sizes() {
        let mut sizes: Vec<usize> = s_n(3).conjugacy_classes().iter().map(|c| c.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3]);

        let z4_sizes: Vec<usize> = z_n(4).conjugacy_classes().iter().map(|c| c.len()).collect();
        assert_eq!(z4_sizes, vec![1, 1, 1, 1]);

        let mut s4_sizes: Vec<usize> =
            s_n(4).conjugacy_classes().iter().map(|c| c.len()).collect();
        s4_sizes.sort_unstable();
        assert_eq!(s4_sizes, vec![1, 3, 6, 6, 8]);
    }

    #[test]
    fn normal_closures_in_s4() {
        let g = s_n(4);
        let transposition = g
            .index_of(&Permutation::from_cycles(4, &[&[0, 1]]))
            .unwrap();
        assert_eq!(g.normal_closure(transposition).len(), 24);
        let double = g
            .index_of(&Permutation::from_cycles(4, &[&[0, 1], &[2, 3]]))
            .unwrap();
        assert_eq!(g.normal_closure(double).len(), 4);
        assert_eq!(g.normal_closure(g.identity()).len(), 1);
    }

    #[test]
    fn commutator_subgroups() {
        assert_eq!(s_n(4).commutator_subgroup().len(), 12); // A4
        assert_eq!(z_n(6).commutator_subgroup().len(), 1);
        // A4: commutator is V4
        let g = s_n(4);
        let a4 = g.commutator_subgroup();
        let gens: Vec<Permutation> = a4.iter().map(|&i| g.elements[i].clone()).collect();
        let a4g = FiniteGroup::from_generators(4, gens, 10_000).unwrap();
        assert_eq!(a4g.commutator_subgroup().len(), 4);
    }

    #[test]
    fn p_group_convention() {
        assert_eq!(is_p_group(8), IsPGroup::Yes { prime: Some(2) });
        assert_eq!(is_p_group(12), IsPGroup::No);
        assert_eq!(is_p_group(1), IsPGroup::Yes { prime: None });
    }

    #[test]
    fn classify_s4_is_tav() {
        let v = classify_tav(&s_n(4));
        assert!(v.normally_single_generated);
        assert_eq!(v.commutator_order, 12);
        assert!(!v.commutator_is_p_group);
        assert!(v.is_tav);
        let (sub, case) = v.witness_subgroup.unwrap();
        assert_eq!(sub.len(), 12);
        assert_eq!(case, WitnessCase::NonabelianPnQ);
    }

    #[test]
    fn classify_a4_not_tav() {
        let g = s_n(4);
        let a4 = g.commutator_subgroup();
        let gens: Vec<Permutation> = a4.iter().map(|&i| g.elements[i].clone()).collect();
        let a4g = FiniteGroup::from_generators(4, gens, 10_000).unwrap();
        let v = classify_tav(&a4g);
        assert!(!v.is_tav);
        assert!(v.commutator_is_p_group);
        assert_eq!(v.commutator_prime, Some(2));
    }

    #[test]
    fn classify_d15_is_tav() {
        let rot = Permutation::from_cycles(15, &[&(0..15).collect::<Vec<_>>()]);
        let refl = Permutation::new((0..15u32).map(|i| (15 - i) % 15).collect()).unwrap();
        let d15 = FiniteGroup::from_generators(15, vec![rot, refl], 10_000).unwrap();
        assert_eq!(d15.order(), 30);
        let v = classify_tav(&d15);
        assert!(v.is_tav);
        let (sub, case) = v.witness_subgroup.unwrap();
        assert_eq!(sub.len(), 15);
        assert_eq!(case, WitnessCase::CyclicPq);
    }

    #[test]
    fn abelian_groups_never_tav() {
        for n in 1..12 {
            let v = classify_tav(&z_n(n.max(1)));
            assert!(!v.is_tav, "Z{n} misclassified");
            assert!(v.commutator_is_p_group);
        }
    }

    #[test]
    fn witness_in_z30() {
        let z30 = z_n(30);
        let all: Vec<usize> = (0..30).collect();
        let (sub, case) = minimal_nonprimepower_subgroup(&z30, &all).unwrap();
        assert_eq!(sub.len(), 6); // smallest of {6, 10, 15}
        assert_eq!(case, WitnessCase::CyclicPq);
    }

    #[test]
    fn right_action_is_homomorphism() {
        let g = s_n(3);
        for a in 0..g.order() {
            for b in 0..g.order() {
                let ab = g.right_action(g.mul(a, b));
                let ra = g.right_action(a);
                let rb = g.right_action(b);
                // row convention: M(ab)[i] = rb[ra[i]]
                let composed: Vec<usize> = (0..g.order()).map(|i| rb[ra[i]]).collect();
                assert_eq!(ab, composed);
            }
        }
    }
}
