use std::fmt;

use serde::{Deserialize, Serialize};

use super::mat::FpMat;
use super::scalar::{add_mod, check_prime, inv_mod, mul_mod, neg_mod, reduce_i64, sub_mod};
use crate::error::Result;

/// Polynomial over F_p with ascending coefficients and no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpPoly {
    p: u32,
    coeffs: Vec<u32>,
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "X")?,
                (1, c) => write!(f, "{c}X")?,
                (i, 1) => write!(f, "X^{i}")?,
                (i, c) => write!(f, "{c}X^{i}")?,
            }
        }
        Ok(())
    }
}

impl FpPoly {
    pub fn new(p: u32, mut coeffs: Vec<u32>) -> Self {
        coeffs.iter_mut().for_each(|c| *c %= p);
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { p, coeffs }
    }

    pub fn from_i64(p: u64, coeffs: &[i64]) -> Result<Self> {
        let p = check_prime(p)?;
        Ok(Self::new(p, coeffs.iter().map(|&c| reduce_i64(c, p)).collect()))
    }

    pub fn zero(p: u32) -> Self {
        FpPoly { p, coeffs: vec![] }
    }

    pub fn one(p: u32) -> Self {
        Self::new(p, vec![1])
    }

    pub fn x(p: u32) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn constant(p: u32, c: u32) -> Self {
        Self::new(p, vec![c])
    }

    /// `X^k`
    pub fn monomial(p: u32, k: usize) -> Self {
        let mut c = vec![0; k + 1];
        c[k] = 1;
        Self::new(p, c)
    }

    /// `X^n - 1`
    pub fn x_pow_minus_one(p: u32, n: usize) -> Self {
        let mut c = vec![0; n + 1];
        c[n] = 1;
        c[0] = neg_mod(1, p);
        Self::new(p, c)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.leading(), self.p);
        self.scale(inv)
    }

    pub fn scale(&self, s: u32) -> Self {
        Self::new(self.p, self.coeffs.iter().map(|&c| mul_mod(c, s, self.p)).collect())
    }

    pub fn add(&self, other: &FpPoly) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(self.p, (0..n).map(|i| add_mod(self.coeff(i), other.coeff(i), self.p)).collect())
    }

    pub fn sub(&self, other: &FpPoly) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(self.p, (0..n).map(|i| sub_mod(self.coeff(i), other.coeff(i), self.p)).collect())
    }

    pub fn mul(&self, other: &FpPoly) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p as u64;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u64 * b as u64) % p;
            }
        }
        Self::new(self.p, out.into_iter().map(|x| x as u32).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.p), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder; `divisor` must be nonzero.
    pub fn div_rem(&self, divisor: &FpPoly) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let p = self.p;
        let dd = divisor.coeffs.len() - 1;
        let inv = inv_mod(divisor.leading(), p);
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(p), self.clone());
        }
        let mut quot = vec![0u32; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = mul_mod(rem[i], inv, p);
            if c == 0 {
                continue;
            }
            quot[i - dd] = c;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                let k = i - dd + j;
                rem[k] = sub_mod(rem[k], mul_mod(c, d, p), p);
            }
        }
        (Self::new(p, quot), Self::new(p, rem))
    }

    pub fn rem(&self, divisor: &FpPoly) -> Self {
        self.div_rem(divisor).1
    }

    pub fn divides(&self, other: &FpPoly) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(&self, other: &FpPoly) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Monic lcm.
    pub fn lcm(&self, other: &FpPoly) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let g = self.gcd(other);
        self.div_rem(&g).0.mul(other).monic()
    }

    /// `self(inner(X))`
    pub fn compose(&self, inner: &FpPoly) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(self.p), |acc, &c| acc.mul(inner).add(&Self::constant(self.p, c)))
    }

    /// `f(m)` by Horner.
    pub fn eval_mat(&self, m: &FpMat) -> Result<FpMat> {
        let n = m.rows();
        let mut acc = FpMat::zeros(self.p, n, n);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(m)?.add(&FpMat::identity(self.p, n).scale(c))?;
        }
        Ok(acc)
    }

    /// Every polynomial of degree at most `max_deg` (`p^(max_deg+1)` of them).
    pub fn enumerate_up_to(p: u32, max_deg: usize) -> Vec<FpPoly> {
        let mut out = vec![vec![]];
        for _ in 0..=max_deg {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u32>| (0..p).map(move |x| [v.clone(), vec![x]].concat()))
                .collect();
        }
        out.into_iter().map(|c| Self::new(p, c)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let p = 2;
        let f = FpPoly::new(p, vec![1, 1, 1]);
        let g = FpPoly::new(p, vec![1, 1]);
        assert_eq!(f.mul(&g), FpPoly::new(p, vec![1, 0, 0, 1]));
        let (q, r) = FpPoly::x_pow_minus_one(p, 3).div_rem(&f);
        assert_eq!(q, g);
        assert!(r.is_zero());
        assert_eq!(f.gcd(&g), FpPoly::one(p));
        assert_eq!(FpPoly::x_pow_minus_one(p, 2).gcd(&g), g);
        assert_eq!(f.lcm(&g).degree(), Some(3));
        assert_eq!(format!("{}", f), "X^2 + X + 1");
    }

    #[test]
    fn compose_with_power() {
        let p = 3;
        let f = FpPoly::x_pow_minus_one(p, 1);
        assert_eq!(f.compose(&FpPoly::monomial(p, 4)), FpPoly::x_pow_minus_one(p, 4));
    }

    #[test]
    fn eval_companion_annihilates() {
        let f = FpPoly::new(5, vec![2, 0, 3, 1]);
        let c = FpMat::companion(5, f.coeffs());
        assert!(f.eval_mat(&c).unwrap().is_zero());
    }

    #[test]
    fn enumeration_count() {
        assert_eq!(FpPoly::enumerate_up_to(3, 1).len(), 9);
    }
}
