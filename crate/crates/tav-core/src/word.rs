//! Words in a free group: sequences of signed 1-based generator indices.
//! `3` means x3, `-3` means x3^{-1}.

pub type Word = Vec<i32>;

/// Free reduction: cancel adjacent x x^{-1} pairs.
pub fn free_reduce(w: &[i32]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &x in w {
        debug_assert!(x != 0, "letter 0 is invalid");
        if out.last().map_or(false, |&y| y == -x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn inverse(w: &[i32]) -> Word {
    w.iter().rev().map(|&x| -x).collect()
}

pub fn concat(ws: &[&[i32]]) -> Word {
    free_reduce(&ws.concat())
}

/// Exponent-sum image under a degree map phi (1-based generators).
pub fn phi_of(w: &[i32], phi: &[i64]) -> i64 {
    w.iter()
        .map(|&x| {
            let d = phi[(x.unsigned_abs() - 1) as usize];
            if x > 0 {
                d
            } else {
                -d
            }
        })
        .sum()
}

/// Raw exponent sum of a single generator in a word.
pub fn exponent_sum(w: &[i32], gen: u32) -> i64 {
    w.iter()
        .map(|&x| {
            if x.unsigned_abs() == gen {
                if x > 0 {
                    1
                } else {
                    -1
                }
            } else {
                0
            }
        })
        .sum()
}

/// Largest generator index mentioned (0 if empty).
pub fn max_gen(w: &[i32]) -> u32 {
    w.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_cancels() {
        assert_eq!(free_reduce(&[1, 2, -2, -1, 3]), vec![3]);
        assert_eq!(free_reduce(&[1, -1]), Vec::<i32>::new());
        assert_eq!(concat(&[&[1, 2], &[-2, 3]]), vec![1, 3]);
    }

    #[test]
    fn inverse_concat_is_identity() {
        let w = vec![1, -2, 3, 3];
        assert!(concat(&[&w, &inverse(&w)]).is_empty());
    }

    #[test]
    fn phi_sums() {
        let phi = vec![3, 2];
        assert_eq!(phi_of(&[1, -2], &phi), 1);
        assert_eq!(exponent_sum(&[1, 1, -2, -1], 1), 1);
    }
}
