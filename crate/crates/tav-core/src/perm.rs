//! Permutations on {0, …, d−1}. The product `a.then(b)` applies `a` first:
//! (a·b)(x) = b(a(x)). This right-action convention matches the regular
//! representation ρ(h): e_g ↦ e_{gh} used by the fox module.

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    pub image: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            image: (0..degree as u32).collect(),
        }
    }

    /// Validates bijectivity.
    pub fn new(image: Vec<u32>) -> Result<Self, PermError> {
        let d = image.len();
        let mut seen = vec![false; d];
        for &v in &image {
            let v = v as usize;
            if v >= d || seen[v] {
                return Err(PermError::NotBijective);
            }
            seen[v] = true;
        }
        Ok(Permutation { image })
    }

    /// From disjoint cycles over 0-based points (fixed points omitted).
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Self {
        let mut image: Vec<u32> = (0..degree as u32).collect();
        for cyc in cycles {
            for i in 0..cyc.len() {
                image[cyc[i] as usize] = cyc[(i + 1) % cyc.len()];
            }
        }
        Permutation::new(image).expect("cycles must be disjoint and in range")
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.image[x as usize]
    }

    /// a.then(b): apply a, then b.
    pub fn then(&self, b: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), b.degree());
        Permutation {
            image: self.image.iter().map(|&x| b.image[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0u32; self.degree()];
        for (i, &v) in self.image.iter().enumerate() {
            image[v as usize] = i as u32;
        }
        Permutation { image }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// Cycle lengths of the decomposition (including fixed points).
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for s in 0..d {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut x = s as u32;
            while !seen[x as usize] {
                seen[x as usize] = true;
                x = self.image[x as usize];
                len += 1;
            }
            out.push(len);
        }
        out
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PermError {
    #[error("image is not a bijection of the point set")]
    NotBijective,
}
