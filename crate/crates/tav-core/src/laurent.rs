//! Laurent polynomials in one variable `t` over an exact coefficient ring,
//! unit-normal forms, and dense matrices of them.

use crate::coeff::{Coeff, Fp};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Laurent polynomial: a finite map exponent -> nonzero coefficient.
/// The zero polynomial has an empty map. All arithmetic is exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly<C: Coeff> {
    terms: BTreeMap<i64, C>,
}

/// Canonical representative modulo multiplication by units ±t^k:
/// `sign * t^shift * poly` reproduces the input, `poly` has minimum
/// exponent 0 and positive leading coefficient. Two Laurent polynomials are
/// equal up to units iff their `poly` fields are identical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitNormalForm {
    pub poly: LaurentPoly<BigInt>,
    pub shift: i64,
    pub sign: i8,
}

impl<C: Coeff> Default for LaurentPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> LaurentPoly<C> {
    pub fn zero() -> Self {
        LaurentPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(0, C::one())
    }

    pub fn monomial(exp: i64, coeff: C) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPoly { terms }
    }

    /// Build from (exponent, coefficient) pairs; repeated exponents are summed.
    pub fn from_terms(pairs: impl IntoIterator<Item = (i64, C)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in pairs {
            p.add_term(e, c);
        }
        p
    }

    /// Integer-coefficient convenience: coefficients listed from `lowest_exp`.
    pub fn from_coeffs(lowest_exp: i64, coeffs: &[i64]) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (lowest_exp + i as i64, C::from_i64(c))),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: i64) -> C {
        self.terms.get(&exp).cloned().unwrap_or_else(C::zero)
    }

    /// Minimum exponent; None for the zero polynomial.
    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Maximum exponent; None for the zero polynomial.
    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add_term(&mut self, exp: i64, coeff: C) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&exp) {
            None => {
                self.terms.insert(exp, coeff);
            }
            Some(old) => {
                let s = old + coeff;
                if !s.is_zero() {
                    self.terms.insert(exp, s);
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e, -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn mul_monomial(&self, exp: i64, coeff: &C) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e + exp, c.clone() * coeff.clone()))
                .collect(),
        }
    }

    /// Exact division; returns None if `d` does not divide `self` in C[t^±1].
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = Self::zero();
        let d_max = d.max_exp().unwrap();
        let d_lead = d.terms.get(&d_max).unwrap().clone();
        // any quotient term below this exponent cannot occur in an exact
        // division (guards against descending forever on non-divisible input)
        let e_floor = match self.min_exp() {
            Some(m) => m - d.min_exp().unwrap(),
            None => 0,
        };
        while !rem.is_zero() {
            let r_max = rem.max_exp().unwrap();
            if r_max - d_max < e_floor {
                return None;
            }
            // leading coefficient must divide exactly for an integral quotient
            let r_lead = rem.terms.get(&r_max).unwrap().clone();
            let q = r_lead.exact_div(&d_lead)?;
            let e = r_max - d_max;
            quot.add_term(e, q.clone());
            rem = rem.sub(&d.mul_monomial(e, &q));
            if let Some(m) = rem.max_exp() {
                if m >= r_max {
                    return None; // no progress: not divisible
                }
            }
        }
        Some(quot)
    }
}

impl LaurentPoly<BigInt> {
    /// Exact evaluation over the rationals (`x` nonzero if negative
    /// exponents are present, enforced by the caller via [`lp_eval`]).
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (&e, c) in &self.terms {
            acc += BigRational::from(c.clone()) * pow_rational(x, e);
        }
        acc
    }

    /// Exact evaluation at an integer point (requires min exponent >= 0).
    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        assert!(
            self.min_exp().map_or(true, |m| m >= 0),
            "integer evaluation needs nonnegative exponents"
        );
        // Horner over the dense range
        let (lo, hi) = match (self.min_exp(), self.max_exp()) {
            (Some(l), Some(h)) => (l, h),
            _ => return BigInt::zero(),
        };
        let mut acc = BigInt::zero();
        for e in (lo..=hi).rev() {
            acc = acc * x + self.coeff(e);
        }
        acc * x.pow(lo as u32)
    }

    /// Evaluation in Z/p at the residue of an integer point.
    pub fn eval_fp(&self, x: Fp) -> Fp {
        let p = x.prime;
        let mut acc = Fp::new(0, p);
        for (&e, c) in &self.terms {
            let xe = if e >= 0 {
                x.pow(e as u64)
            } else {
                x.inv().pow((-e) as u64)
            };
            acc = acc + Fp::from_bigint(c, p) * xe;
        }
        acc
    }

    /// Unit-normal form: factor out ±t^k so the minimum exponent is 0 and
    /// the leading (highest-degree) coefficient is positive.
    pub fn unit_normalize(&self) -> UnitNormalForm {
        if self.is_zero() {
            return UnitNormalForm {
                poly: Self::zero(),
                shift: 0,
                sign: 1,
            };
        }
        let shift = self.min_exp().unwrap();
        let lead = self.terms.get(&self.max_exp().unwrap()).unwrap();
        let sign: i8 = if lead.is_negative() { -1 } else { 1 };
        let mut poly = LaurentPoly::zero();
        for (&e, c) in &self.terms {
            let c = if sign < 0 { -c.clone() } else { c.clone() };
            poly.add_term(e - shift, c);
        }
        UnitNormalForm { poly, shift, sign }
    }
}

fn pow_rational(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        x.pow(e as i32)
    } else {
        assert!(!x.is_zero(), "zero raised to negative exponent");
        x.pow(e as i32)
    }
}

/// Exact evaluation entry point per the module contract: rejects x = 0
/// when negative exponents are present.
pub fn lp_eval(p: &LaurentPoly<BigInt>, x: &BigRational) -> Result<BigRational, EvalError> {
    if x.is_zero() && p.min_exp().map_or(false, |m| m < 0) {
        return Err(EvalError::ZeroAtNegativeExponent);
    }
    Ok(p.eval_rational(x))
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("evaluation at 0 with negative exponents present")]
    ZeroAtNegativeExponent,
}

impl fmt::Display for LaurentPoly<BigInt> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, c) in self.terms.iter().rev() {
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_mag = mag.is_one();
            if !unit_mag || e == 0 {
                write!(f, "{mag}")?;
            }
            match e {
                0 => {}
                1 => write!(f, "{}t", if unit_mag { "" } else { "*" })?,
                _ => write!(f, "{}t^{}", if unit_mag { "" } else { "*" }, e)?,
            }
        }
        Ok(())
    }
}

/// Dense matrix over Laurent polynomials (houses Alexander/Wada matrices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix<C: Coeff> {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<LaurentPoly<C>>,
}

impl<C: Coeff> PolyMatrix<C> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: vec![LaurentPoly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = LaurentPoly::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<LaurentPoly<C>>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        PolyMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &LaurentPoly<C> {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut LaurentPoly<C> {
        &mut self.entries[i * self.cols + j]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[LaurentPoly<C>] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    type P = LaurentPoly<BigInt>;

    #[test]
    fn mul_difference_of_squares() {
        let a = P::from_coeffs(0, &[-1, 1]); // t - 1
        let b = P::from_coeffs(0, &[1, 1]); // t + 1
        assert_eq!(a.mul(&b), P::from_coeffs(0, &[-1, 0, 1]));
    }

    #[test]
    fn mul_by_zero_absorbs() {
        let p = P::from_coeffs(-2, &[3, 0, -1, 7]);
        assert!(p.mul(&P::zero()).is_zero());
    }

    #[test]
    fn unit_shift_mul() {
        // (t^2 - t + 1) * t^-1 = t - 1 + t^-1
        let p = P::from_coeffs(0, &[1, -1, 1]);
        let u = P::monomial(-1, BigInt::from(1));
        assert_eq!(p.mul(&u), P::from_coeffs(-1, &[1, -1, 1]));
    }

    #[test]
    fn unit_normalize_examples() {
        // -t^-3 (t^2 - 3t + 1)
        let p = P::from_coeffs(-3, &[-1, 3, -1]);
        let n = p.unit_normalize();
        assert_eq!(n.poly, P::from_coeffs(0, &[1, -3, 1]));
        assert_eq!((n.shift, n.sign), (-3, -1));

        let z = P::zero().unit_normalize();
        assert_eq!((z.poly.is_zero(), z.shift, z.sign), (true, 0, 1));

        let m = P::monomial(4, BigInt::from(5)).unit_normalize();
        assert_eq!(m.poly, P::from_coeffs(0, &[5]));
        assert_eq!((m.shift, m.sign), (4, 1));
    }

    #[test]
    fn unit_normalize_constant_on_unit_orbit() {
        let p = P::from_coeffs(0, &[2, 0, -3, 5]);
        let base = p.unit_normalize().poly;
        for k in -5..=5 {
            for sign in [1i64, -1] {
                let q = p.mul_monomial(k, &BigInt::from(sign));
                assert_eq!(q.unit_normalize().poly, base);
            }
        }
    }

    #[test]
    fn eval_examples() {
        let p = P::from_coeffs(0, &[1, -1, 1]);
        assert_eq!(
            lp_eval(&p, &BigRational::from(BigInt::from(1))).unwrap(),
            BigRational::from(BigInt::from(1))
        );
        let q = P::from_coeffs(0, &[1, -3, 1]);
        assert_eq!(
            lp_eval(&q, &BigRational::from(BigInt::from(1))).unwrap(),
            BigRational::from(BigInt::from(-1))
        );
        // t - 1 + t^-1 at 2 -> 3/2
        let r = P::from_coeffs(-1, &[1, -1, 1]);
        let v = lp_eval(&r, &BigRational::from(BigInt::from(2))).unwrap();
        assert_eq!(
            v,
            BigRational::new(BigInt::from(3), BigInt::from(2))
        );
        assert_eq!(
            lp_eval(&r, &BigRational::zero()),
            Err(EvalError::ZeroAtNegativeExponent)
        );
    }

    #[test]
    fn eval_int_matches_rational() {
        let p = P::from_coeffs(0, &[7, 0, -2, 1, 5]);
        for x in 2..6i64 {
            let xi = BigInt::from(x);
            let r = p.eval_rational(&BigRational::from(xi.clone()));
            assert_eq!(r.denom().to_i64().unwrap(), 1);
            assert_eq!(r.numer(), &p.eval_int(&xi));
        }
    }

    #[test]
    fn div_exact_roundtrip() {
        let a = P::from_coeffs(-1, &[2, -3, 1, 4]);
        let b = P::from_coeffs(0, &[-1, 0, 2]);
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        let c = P::from_coeffs(0, &[1, 1]);
        assert!(prod.div_exact(&c).is_none());
    }
}
