use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted for prime fields.
pub const MAX_PRIME: u64 = 1 << 31;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn check_prime(p: u64) -> Result<u32> {
    if p < MAX_PRIME && is_prime(p) {
        Ok(p as u32)
    } else {
        Err(Error::NotPrime(p))
    }
}

#[inline]
pub fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    let s = a as u64 + b as u64;
    (if s >= p as u64 { s - p as u64 } else { s }) as u32
}

#[inline]
pub fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        (a as u64 + p as u64 - b as u64) as u32
    }
}

#[inline]
pub fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
pub fn neg_mod(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

pub fn pow_mod(mut base: u32, mut exp: u64, p: u32) -> u32 {
    let mut acc = 1 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue; `p` must be prime.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p), "inverse of zero");
    pow_mod(a, p as u64 - 2, p)
}

/// Reduces a signed integer into `[0, p)`.
pub fn reduce_i64(x: i64, p: u32) -> u32 {
    x.rem_euclid(p as i64) as u32
}

/// An element of the prime field F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpScalar {
    value: u32,
    p: u32,
}

impl FpScalar {
    pub fn new(value: i64, p: u64) -> Result<Self> {
        let p = check_prime(p)?;
        Ok(FpScalar { value: reduce_i64(value, p), p })
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn inv(self) -> Option<Self> {
        (self.value != 0).then(|| FpScalar { value: inv_mod(self.value, self.p), p: self.p })
    }
}

impl std::ops::Add for FpScalar {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        FpScalar { value: add_mod(self.value, other.value, self.p), p: self.p }
    }
}

impl std::ops::Mul for FpScalar {
    type Output = Self;

    fn mul(self, other: Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        FpScalar { value: mul_mod(self.value, other.value, self.p), p: self.p }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(3) && is_prime(2_147_483_647));
        assert!(!is_prime(1) && !is_prime(9) && !is_prime(2_147_483_649));
        assert!(check_prime(4).is_err());
        assert!(check_prime(1 << 31).is_err());
    }

    #[test]
    fn field_ops() {
        let p = 7;
        for a in 1..p {
            assert_eq!(mul_mod(a, inv_mod(a, p), p), 1);
        }
        assert_eq!(reduce_i64(-1, 5), 4);
        let x = FpScalar::new(-3, 7).unwrap();
        assert_eq!(x.value(), 4);
        assert_eq!((x * x.inv().unwrap()).value(), 1);
        assert!(FpScalar::new(0, 7).unwrap().inv().is_none());
    }

    #[test]
    fn large_prime_no_overflow() {
        let p = 2_147_483_647;
        let a = p - 1;
        assert_eq!(mul_mod(a, a, p), 1);
        assert_eq!(add_mod(a, a, p), p - 2);
    }
}
