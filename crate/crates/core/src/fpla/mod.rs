//! Exact linear algebra over the prime field F_p.
//!
//! Dense matrices ([`FpMat`]) back finite-dimensional operators and oracle
//! windows; sparse vectors ([`SparseVec`]) and the incremental
//! [`SparseEchelon`] back the growth engines, where rows live in
//! infinite-dimensional sequence spaces but always have finite support.

mod mat;
mod poly;
pub mod scalar;
mod sparse;

pub use mat::FpMat;
pub use poly::FpPoly;
pub use scalar::{check_prime, is_prime, FpScalar};
pub use sparse::{FpVec, Functional, IndexTag, SparseEchelon, SparseVec};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use scalar::{inv_mod, mul_mod, neg_mod, sub_mod};

const KRYLOV_SEED: u64 = 0x6b72_796c_6f76;

pub fn rref_rank(m: &FpMat) -> (usize, FpMat) {
    m.rref_rank()
}

pub fn kernel_basis(m: &FpMat) -> FpMat {
    m.kernel_basis()
}

pub fn stable_kernel_image(m: &FpMat) -> Result<(FpMat, FpMat)> {
    m.stable_kernel_image()
}

/// Monic generator of `{f : f(m) v = 0}`.
pub fn local_annihilator(m: &FpMat, v: &[u32]) -> FpPoly {
    let p = m.p();
    let n = m.rows();
    // (vector, combination of Krylov powers, pivot column)
    let mut basis: Vec<(Vec<u32>, Vec<u32>, usize)> = Vec::new();
    let mut w = v.to_vec();
    for j in 0..=n {
        let mut vec = w.clone();
        let mut combo = vec![0u32; n + 1];
        combo[j] = 1;
        for (bv, bc, pc) in &basis {
            let c = vec[*pc];
            if c == 0 {
                continue;
            }
            for (x, &y) in vec.iter_mut().zip(bv) {
                *x = sub_mod(*x, mul_mod(c, y, p), p);
            }
            for (x, &y) in combo.iter_mut().zip(bc) {
                *x = sub_mod(*x, mul_mod(c, y, p), p);
            }
        }
        match vec.iter().position(|&x| x != 0) {
            None => return FpPoly::new(p, combo[..=j].to_vec()),
            Some(pc) => {
                let inv = inv_mod(vec[pc], p);
                vec.iter_mut().for_each(|x| *x = mul_mod(*x, inv, p));
                combo.iter_mut().for_each(|x| *x = mul_mod(*x, inv, p));
                basis.push((vec, combo, pc));
            }
        }
        w = m.mul_vec(&w);
    }
    unreachable!("n + 1 Krylov vectors in dimension n are dependent")
}

/// Minimal polynomial of a square matrix.
///
/// Starts from the annihilator of a pseudo-random vector (fixed seed), then
/// takes the lcm with the annihilator of every basis vector that the current
/// candidate fails to kill. The result is checked to annihilate `m`.
pub fn min_poly(m: &FpMat) -> Result<FpPoly> {
    if !m.is_square() {
        return Err(Error::Dimension("minimal polynomial of a non-square matrix".into()));
    }
    let p = m.p();
    let n = m.rows();
    if n == 0 {
        return Ok(FpPoly::one(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(KRYLOV_SEED);
    let v: Vec<u32> = (0..n).map(|_| rng.gen_range(0..p)).collect();
    let mut f = local_annihilator(m, &v);
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        if dense_poly_apply(&f, m, &e).iter().any(|&x| x != 0) {
            f = f.lcm(&local_annihilator(m, &e));
        }
    }
    assert!(f.eval_mat(m)?.is_zero(), "minimal polynomial candidate does not annihilate");
    Ok(f)
}

/// Characteristic polynomial `det(X I - m)` by Bareiss elimination over F_p[X].
pub fn char_poly(m: &FpMat) -> Result<FpPoly> {
    if !m.is_square() {
        return Err(Error::Dimension("characteristic polynomial of a non-square matrix".into()));
    }
    let p = m.p();
    let n = m.rows();
    let mut a: Vec<Vec<FpPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = FpPoly::constant(p, neg_mod(m.get(i, j), p));
                    if i == j {
                        c.add(&FpPoly::x(p))
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    // Bareiss elimination over F_p[X]: exact divisions only.
    let mut sign = 1u32;
    let mut prev = FpPoly::one(p);
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(s) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return Ok(FpPoly::zero(p));
            };
            a.swap(k, s);
            sign = neg_mod(sign, p);
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero());
                a[i][j] = q;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(if n == 0 { FpPoly::one(p) } else { a[n - 1][n - 1].scale(sign) })
}

fn dense_poly_apply(f: &FpPoly, m: &FpMat, v: &[u32]) -> Vec<u32> {
    let p = m.p();
    let mut acc = vec![0u32; v.len()];
    for &c in f.coeffs().iter().rev() {
        acc = m.mul_vec(&acc);
        for (a, &x) in acc.iter_mut().zip(v) {
            *a = scalar::add_mod(*a, mul_mod(c, x, p), p);
        }
    }
    acc
}

/// `f(m) v` by Horner evaluation; `v` must be supported on `0..dim`.
pub fn poly_apply(f: &FpPoly, m: &FpMat, v: &FpVec) -> Result<FpVec> {
    if f.p() != m.p() || v.p() != m.p() {
        return Err(Error::PrimeMismatch { expected: m.p(), found: v.p() });
    }
    if !m.is_square() {
        return Err(Error::Dimension("poly_apply needs a square matrix".into()));
    }
    let n = m.rows();
    if v.min_index().is_some_and(|i| i < 0) || v.max_index().is_some_and(|i| i as usize >= n) {
        return Err(Error::Dimension(format!("vector support outside 0..{n}")));
    }
    Ok(SparseVec::from_dense(m.p(), &dense_poly_apply(f, m, &v.to_dense(n))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_poly_examples() {
        let c = FpMat::companion(2, &[1, 1, 1]);
        assert_eq!(min_poly(&c).unwrap(), FpPoly::new(2, vec![1, 1, 1]));
        assert_eq!(min_poly(&FpMat::nilpotent_block(3, 3)).unwrap(), FpPoly::monomial(3, 3));
        assert_eq!(min_poly(&FpMat::identity(3, 4)).unwrap(), FpPoly::new(3, vec![2, 1]));
    }

    #[test]
    fn min_poly_of_block_diag_is_lcm() {
        let p = 3;
        let f = FpPoly::new(p, vec![1, 0, 1]);
        let g = FpPoly::new(p, vec![2, 1]);
        let m = FpMat::block_diag(&[
            FpMat::companion(p, f.coeffs()),
            FpMat::companion(p, g.coeffs()),
            FpMat::companion(p, f.coeffs()),
        ]);
        assert_eq!(min_poly(&m).unwrap(), f.lcm(&g));
    }

    #[test]
    fn char_poly_examples() {
        let f = FpPoly::new(5, vec![3, 1, 4, 1]);
        assert_eq!(char_poly(&FpMat::companion(5, f.coeffs())).unwrap(), f);
        assert_eq!(char_poly(&FpMat::identity(2, 3)).unwrap(), FpPoly::new(2, vec![1, 1]).pow(3));
    }

    #[test]
    fn poly_apply_examples() {
        let p = 2;
        let m = FpMat::companion(p, &[1, 1, 1]);
        let e0 = SparseVec::unit(p, IndexTag::Nat, 0);
        assert_eq!(poly_apply(&FpPoly::one(p), &m, &e0).unwrap(), e0);
        assert_eq!(poly_apply(&FpPoly::x(p), &FpMat::identity(p, 2), &e0).unwrap(), e0);
        // m e0 = e1, m^2 e0 = e0 + e1; X^2 + 1 gives e1.
        let f = FpPoly::new(p, vec![1, 0, 1]);
        assert_eq!(poly_apply(&f, &m, &e0).unwrap(), SparseVec::unit(p, IndexTag::Nat, 1));
        assert!(poly_apply(&f, &m, &SparseVec::unit(p, IndexTag::Nat, 2)).is_err());
    }
}
