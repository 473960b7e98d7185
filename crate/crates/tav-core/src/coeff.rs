//! Coefficient rings for Laurent polynomials and determinant kernels.
//!
//! Everything is generic over [`Coeff`], an exact commutative ring. Two
//! rings are provided: arbitrary-precision integers (`BigInt`) for all
//! certified arithmetic, and the word-size prime fields [`Fp`] used only by
//! the probabilistic screening path.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

/// An exact commutative ring with the operations the polynomial and
/// determinant code needs. No rounding ever occurs in any implementation.
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Eq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Ring image of a machine integer.
    fn from_i64(v: i64) -> Self;

    /// Exact division: returns `q` with `self = q * d`, or None when `d`
    /// does not divide `self`. Fraction-free elimination only divides when
    /// divisibility is guaranteed and unwraps the result.
    fn exact_div(&self, d: &Self) -> Option<Self>;
}

impl Coeff for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }

    fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = num_integer::Integer::div_rem(self, d);
        r.is_zero().then_some(q)
    }
}

/// Two fixed word-size primes near 2^61 used by the screening engine.
/// Recorded in certificates whenever screening participated in a run.
pub const SCREEN_PRIMES: [u64; 2] = [2305843009213693951, 2305843009213693921];

/// Element of the prime field Z/p for a word-size prime `p`.
///
/// The modulus travels with the value; mixing moduli is a programming error
/// and panics. Arithmetic goes through `u128` so it is exact for any p < 2^63.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    pub value: u64,
    pub prime: u64,
}

impl Fp {
    pub fn new(value: i64, prime: u64) -> Self {
        let v = value.rem_euclid(prime as i64) as u64;
        Fp { value: v, prime }
    }

    pub fn from_bigint(v: &BigInt, prime: u64) -> Self {
        let p = BigInt::from(prime);
        let mut r = v % &p;
        if r.is_negative() {
            r += &p;
        }
        let digits = r.to_u64_digits().1;
        Fp {
            value: digits.first().copied().unwrap_or(0),
            prime,
        }
    }

    fn check(self, other: Self) -> u64 {
        assert_eq!(self.prime, other.prime, "mixed moduli");
        self.prime
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp {
            value: 1,
            prime: self.prime,
        };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat (p prime).
    pub fn inv(self) -> Self {
        assert!(self.value != 0, "inverse of zero");
        self.pow(self.prime - 2)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        let p = self.check(rhs);
        let s = self.value as u128 + rhs.value as u128;
        Fp {
            value: (s % p as u128) as u64,
            prime: p,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        let p = self.check(rhs);
        let s = self.value as u128 + (p - rhs.value) as u128;
        Fp {
            value: (s % p as u128) as u64,
            prime: p,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        let p = self.check(rhs);
        let s = self.value as u128 * rhs.value as u128;
        Fp {
            value: (s % p as u128) as u64,
            prime: p,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            value: if self.value == 0 {
                0
            } else {
                self.prime - self.value
            },
            prime: self.prime,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fp_field_axioms_spot() {
        for p in SCREEN_PRIMES {
            let a = Fp::new(123456789, p);
            let b = Fp::new(-987654321, p);
            assert_eq!(a * b * a.inv(), b);
            assert_eq!(a + (-a), Fp::new(0, p));
            assert_eq!((a - b) + b, a);
            assert_eq!(a.pow(p - 1), Fp::new(1, p));
        }
    }

    #[test]
    fn bigint_exact_div() {
        let a = BigInt::from(-42);
        let b = BigInt::from(7);
        assert_eq!(a.exact_div(&b), Some(BigInt::from(-6)));
        assert_eq!(BigInt::from(5).exact_div(&BigInt::from(2)), None);
    }

    #[test]
    fn screen_primes_are_prime() {
        // Miller-Rabin with deterministic witnesses valid below 3.3e24.
        for p in SCREEN_PRIMES {
            assert!(is_prime_u64(p), "{p} not prime");
        }
    }

    fn is_prime_u64(n: u64) -> bool {
        let (mut d, mut s) = (n - 1, 0u32);
        while d % 2 == 0 {
            d /= 2;
            s += 1;
        }
        'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            if a % n == 0 {
                continue;
            }
            let mut x = Fp::new(a as i64, n).pow(d).value;
            if x == 1 || x == n - 1 {
                continue;
            }
            for _ in 0..s - 1 {
                x = ((x as u128 * x as u128) % n as u128) as u64;
                if x == n - 1 {
                    continue 'witness;
                }
            }
            return false;
        }
        true
    }
}
