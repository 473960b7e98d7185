//! Todd–Coxeter coset enumeration (HLT strategy) for finitely presented
//! groups. Deterministic: relator tables are processed in presentation
//! order and the lowest-numbered live coset is filled first, so the
//! resulting permutation action is reproducible.

use crate::group::{FiniteGroup, GroupError};
use crate::perm::Permutation;
use crate::word::Word;
use serde::{Deserialize, Serialize};

/// Finitely presented group: generator count and relator words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub generators: usize,
    pub relators: Vec<Word>,
}

impl GroupPresentation {
    pub fn validate(&self) -> Result<(), CosetError> {
        for r in &self.relators {
            for &x in r {
                let g = x.unsigned_abs() as usize;
                if x == 0 || g > self.generators {
                    return Err(CosetError::BadLetter(x));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CosetError {
    #[error("relator letter {0} does not index a generator")]
    BadLetter(i32),
    #[error("coset table bound of {0} rows exceeded (group may be infinite or too large)")]
    EnumerationBoundExceeded(usize),
    #[error(transparent)]
    Group(#[from] GroupError),
}

pub const DEFAULT_COSET_BOUND: usize = 1_000_000;

const UNDEF: u32 = u32::MAX;

struct Table {
    ngens: usize,
    /// rows[coset][col], col = 2*(gen-1) (+1 for inverse)
    rows: Vec<Vec<u32>>,
    /// union-find for coincidences; rep is the smallest live coset
    parent: Vec<u32>,
    queue: std::collections::VecDeque<(u32, u32)>,
    bound: usize,
}

fn col_of(letter: i32) -> usize {
    let g = (letter.unsigned_abs() - 1) as usize;
    2 * g + usize::from(letter < 0)
}

fn inv_col(col: usize) -> usize {
    col ^ 1
}

impl Table {
    fn new(ngens: usize, bound: usize) -> Self {
        Table {
            ngens,
            rows: vec![vec![UNDEF; 2 * ngens]],
            parent: vec![0],
            queue: Default::default(),
            bound,
        }
    }

    fn find(&mut self, mut c: u32) -> u32 {
        while self.parent[c as usize] != c {
            let p = self.parent[c as usize];
            self.parent[c as usize] = self.parent[p as usize];
            c = self.parent[c as usize];
        }
        c
    }

    fn define(&mut self, a: u32, col: usize) -> Result<u32, CosetError> {
        if self.rows.len() >= self.bound {
            return Err(CosetError::EnumerationBoundExceeded(self.bound));
        }
        let b = self.rows.len() as u32;
        self.rows.push(vec![UNDEF; 2 * self.ngens]);
        self.parent.push(b);
        self.rows[a as usize][col] = b;
        self.rows[b as usize][inv_col(col)] = a;
        Ok(b)
    }

    /// Record a·col = b, queueing a coincidence if it contradicts the table.
    fn deduce(&mut self, a: u32, col: usize, b: u32) {
        for (x, c, y) in [(a, col, b), (b, inv_col(col), a)] {
            let cur = self.rows[x as usize][c];
            if cur == UNDEF {
                self.rows[x as usize][c] = y;
            } else if cur != y {
                self.queue.push_back((cur, y));
            }
        }
    }

    fn process_coincidences(&mut self) {
        while let Some((a, b)) = self.queue.pop_front() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            let (keep, drop) = if a < b { (a, b) } else { (b, a) };
            self.parent[drop as usize] = keep;
            for col in 0..2 * self.ngens {
                let v = self.rows[drop as usize][col];
                if v == UNDEF {
                    continue;
                }
                let v = self.find(v);
                let cur = self.rows[keep as usize][col];
                if cur == UNDEF {
                    self.rows[keep as usize][col] = v;
                    // fix the reverse edge of v
                    let back = self.rows[v as usize][inv_col(col)];
                    if back == UNDEF {
                        self.rows[v as usize][inv_col(col)] = keep;
                    } else if self.find(back) != keep {
                        self.queue.push_back((back, keep));
                    }
                } else if self.find(cur) != v {
                    self.queue.push_back((cur, v));
                }
            }
        }
    }

    fn is_live(&mut self, c: u32) -> bool {
        self.find(c) == c
    }

    /// Scan `word` from coset `start`, defining cosets to fill every gap
    /// (HLT scan-and-fill), then close with a deduction.
    fn scan_and_fill(&mut self, start: u32, word: &Word) -> Result<(), CosetError> {
        if word.is_empty() {
            return Ok(());
        }
        loop {
            let start = self.find(start);
            // forward pass
            let mut f = start;
            let mut i = 0;
            while i < word.len() {
                let next = self.rows[f as usize][col_of(word[i])];
                if next == UNDEF {
                    break;
                }
                f = self.find(next);
                i += 1;
            }
            if i == word.len() {
                if f != start {
                    self.queue.push_back((f, start));
                    self.process_coincidences();
                }
                return Ok(());
            }
            // backward pass
            let mut b = start;
            let mut j = word.len();
            while j > i {
                let prev = self.rows[b as usize][inv_col(col_of(word[j - 1]))];
                if prev == UNDEF {
                    break;
                }
                b = self.find(prev);
                j -= 1;
            }
            if j == i + 1 {
                // single gap: deduction closes the cycle
                self.deduce(f, col_of(word[i]), b);
                self.process_coincidences();
                return Ok(());
            }
            if j == i {
                // word traced fully around: forward and backward met
                if f != b {
                    self.queue.push_back((f, b));
                    self.process_coincidences();
                }
                return Ok(());
            }
            // fill one gap position and rescan
            self.define(f, col_of(word[i]))?;
        }
    }
}

/// Result of an enumeration: the permutation action of each presentation
/// generator on the (compacted) coset set.
pub struct CosetAction {
    pub cosets: usize,
    pub gen_perms: Vec<Permutation>,
}

/// Enumerate cosets of the subgroup generated by `subgroup_gens` (words in
/// the presentation generators). With the empty subgroup this produces the
/// regular action: the group order equals the coset count.
pub fn coset_enumeration(
    p: &GroupPresentation,
    subgroup_gens: &[Word],
    bound: usize,
) -> Result<CosetAction, CosetError> {
    p.validate()?;
    let mut t = Table::new(p.generators.max(1), bound);
    for w in subgroup_gens {
        t.scan_and_fill(0, w)?;
    }
    let mut k = 0u32;
    while (k as usize) < t.rows.len() {
        if t.is_live(k) {
            for ri in 0..p.relators.len() {
                let r = p.relators[ri].clone();
                t.scan_and_fill(k, &r)?;
                if !t.is_live(k) {
                    break;
                }
            }
            // make sure every image of this coset is defined so the final
            // table is complete even when no relator mentions a generator
            if t.is_live(k) {
                for col in 0..2 * p.generators.max(1) {
                    if t.rows[k as usize][col] == UNDEF {
                        t.define(k, col)?;
                    }
                }
            }
        }
        k += 1;
    }
    // compact live cosets in increasing order
    let live: Vec<u32> = (0..t.rows.len() as u32).filter(|&c| t.find(c) == c).collect();
    let renum: std::collections::HashMap<u32, u32> = live
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i as u32))
        .collect();
    let n = live.len();
    let mut gen_perms = Vec::with_capacity(p.generators);
    for g in 0..p.generators {
        let mut image = vec![0u32; n];
        for (i, &c) in live.iter().enumerate() {
            let v = t.rows[c as usize][2 * g];
            assert!(v != UNDEF, "incomplete table after enumeration");
            image[i] = renum[&t.find(v)];
        }
        gen_perms.push(Permutation::new(image).expect("coset action is a permutation"));
    }
    Ok(CosetAction {
        cosets: n,
        gen_perms,
    })
}

/// Convert a presentation to a concrete permutation group via the regular
/// action (trivial-subgroup enumeration).
pub fn group_from_presentation(
    p: &GroupPresentation,
    coset_bound: usize,
    order_bound: usize,
) -> Result<FiniteGroup, CosetError> {
    let action = coset_enumeration(p, &[], coset_bound)?;
    let g = FiniteGroup::from_generators(action.cosets, action.gen_perms, order_bound)?;
    // regular action: the permutation group order equals the coset count
    assert_eq!(g.order(), action.cosets, "regular action order mismatch");
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_five() {
        let p = GroupPresentation {
            generators: 1,
            relators: vec![vec![1, 1, 1, 1, 1]],
        };
        let g = group_from_presentation(&p, DEFAULT_COSET_BOUND, 10_000).unwrap();
        assert_eq!(g.order(), 5);
        assert_eq!(g.element_order(g.index_of(&g.gens[0].clone()).unwrap()), 5);
    }

    #[test]
    fn s3_presentation() {
        // <a, b | a^2, b^3, (ab)^2>
        let p = GroupPresentation {
            generators: 2,
            relators: vec![vec![1, 1], vec![2, 2, 2], vec![1, 2, 1, 2]],
        };
        let g = group_from_presentation(&p, DEFAULT_COSET_BOUND, 10_000).unwrap();
        assert_eq!(g.order(), 6);
        // nonabelian of order 6
        let a = g.index_of(&g.gens[0].clone()).unwrap();
        let b = g.index_of(&g.gens[1].clone()).unwrap();
        assert_ne!(g.mul(a, b), g.mul(b, a));
    }

    #[test]
    fn nontrivial_subgroup_cosets() {
        // S3 over <a>: 3 cosets
        let p = GroupPresentation {
            generators: 2,
            relators: vec![vec![1, 1], vec![2, 2, 2], vec![1, 2, 1, 2]],
        };
        let action = coset_enumeration(&p, &[vec![1]], DEFAULT_COSET_BOUND).unwrap();
        assert_eq!(action.cosets, 3);
    }

    #[test]
    fn quaternion_group() {
        // <a, b | a^4, a^2 b^-2, b^-1 a b a>
        let p = GroupPresentation {
            generators: 2,
            relators: vec![vec![1, 1, 1, 1], vec![1, 1, -2, -2], vec![-2, 1, 2, 1]],
        };
        let g = group_from_presentation(&p, DEFAULT_COSET_BOUND, 10_000).unwrap();
        assert_eq!(g.order(), 8);
        // Q8 has a unique element of order 2
        let count = (0..8).filter(|&i| g.element_order(i) == 2).count();
        assert_eq!(count, 1);
    }

    #[test]
    fn bound_exceeded_reported() {
        // free group on 2 generators: infinite
        let p = GroupPresentation {
            generators: 2,
            relators: vec![],
        };
        let r = coset_enumeration(&p, &[], 500);
        assert!(matches!(r, Err(CosetError::EnumerationBoundExceeded(500))));
    }
}
