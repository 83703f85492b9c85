//! Seeded random generators for operators, functionals and integer
//! endomorphisms, shared by the verification suites, the CLI and the tests.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fpla::{FpMat, FpPoly, Functional, IndexTag, SparseVec};
use crate::intlat::{FgEndo, FgGroup, IntMat};
use crate::operators::{OperatorDesc, RepeatRule};

pub type ZooRng = ChaCha8Rng;

pub fn rng(seed: u64) -> ZooRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const SMALL_PRIMES: [u32; 3] = [2, 3, 5];

pub fn random_prime(rng: &mut ZooRng) -> u32 {
    *SMALL_PRIMES.choose(rng).expect("nonempty")
}

pub fn random_matrix(rng: &mut ZooRng, p: u32, d: usize) -> FpMat {
    let data = (0..d * d).map(|_| rng.gen_range(0..p)).collect();
    FpMat::from_residues(p, d, d, data)
}

pub fn random_invertible(rng: &mut ZooRng, p: u32, d: usize) -> FpMat {
    loop {
        let m = random_matrix(rng, p, d);
        if m.inverse().is_some() {
            return m;
        }
    }
}

/// Monic polynomial of the given degree.
pub fn random_monic(rng: &mut ZooRng, p: u32, deg: usize) -> FpPoly {
    let mut c: Vec<u32> = (0..deg).map(|_| rng.gen_range(0..p)).collect();
    c.push(1);
    FpPoly::new(p, c)
}

pub fn random_poly(rng: &mut ZooRng, p: u32, max_deg: usize) -> FpPoly {
    let deg = rng.gen_range(0..=max_deg);
    let c: Vec<u32> = (0..=deg).map(|_| rng.gen_range(0..p)).collect();
    FpPoly::new(p, c)
}

fn random_block_diag(rng: &mut ZooRng, p: u32) -> OperatorDesc {
    let count = rng.gen_range(1..=3);
    let blocks = (0..count)
        .map(|_| {
            let deg = rng.gen_range(1..=3);
            random_monic(rng, p, deg)
        })
        .collect();
    let repeat = if rng.gen_bool(0.5) { RepeatRule::RepeatLast } else { RepeatRule::GrowLinear };
    OperatorDesc::BlockDiag { p, blocks, repeat }
}

/// A shift or block operator on `F_p^(ℕ)`.
fn random_nat_sequence_op(rng: &mut ZooRng, p: u32) -> OperatorDesc {
    match rng.gen_range(0..3) {
        0 => OperatorDesc::right_shift(p),
        1 => OperatorDesc::left_shift(p),
        _ => random_block_diag(rng, p),
    }
}

/// Operator of one of the base kinds (no combinators).
pub fn random_base_op(rng: &mut ZooRng, p: u32) -> OperatorDesc {
    match rng.gen_range(0..5) {
        0 => {
            let d = rng.gen_range(1..=5);
            OperatorDesc::FiniteDim(random_matrix(rng, p, d))
        }
        1 => OperatorDesc::right_shift(p),
        2 => OperatorDesc::left_shift(p),
        3 => OperatorDesc::TwoSidedShift { p, inverse: rng.gen_bool(0.5) },
        _ => random_block_diag(rng, p),
    }
}

/// Any `F_p` operator kind, including direct sums, polynomials and powers.
pub fn random_sequence_op(rng: &mut ZooRng, p: u32) -> OperatorDesc {
    match rng.gen_range(0..8) {
        0..=4 => random_base_op(rng, p),
        5 => {
            let k = rng.gen_range(2..=3);
            if rng.gen_bool(0.25) {
                let parts = (0..k).map(|_| OperatorDesc::TwoSidedShift { p, inverse: rng.gen_bool(0.5) }).collect();
                OperatorDesc::DirectSum(parts)
            } else {
                OperatorDesc::DirectSum((0..k).map(|_| random_nat_sequence_op(rng, p)).collect())
            }
        }
        6 => OperatorDesc::poly_of(random_poly(rng, p, 2), random_base_op(rng, p)),
        _ => OperatorDesc::power(rng.gen_range(1..=3), random_base_op(rng, p)),
    }
}

/// Any zoo member: `F_p` kinds, integer endomorphisms and the divisible case.
pub fn random_zoo_op(rng: &mut ZooRng) -> OperatorDesc {
    match rng.gen_range(0..10) {
        0 => OperatorDesc::IntEndo(random_int_endo(rng, 2, 12)),
        1 => OperatorDesc::DivisibleTrivial,
        _ => {
            let p = random_prime(rng);
            random_sequence_op(rng, p)
        }
    }
}

/// `1..=max_rows` random functionals supported where the operator lives:
/// `0..min(dim, 6)` on finite or `ℕ`-indexed spaces, `-3..3` on `ℤ`.
pub fn random_rows(rng: &mut ZooRng, op: &OperatorDesc, max_rows: usize) -> Vec<Functional> {
    let p = op.p().expect("F_p operator");
    let tag = op.index_tag();
    let (lo, hi) = match tag {
        IndexTag::Nat => (0i64, op.finite_dim().map_or(6, |d| d.min(6)) as i64),
        IndexTag::Int => (-3, 3),
    };
    let count = rng.gen_range(1..=max_rows);
    (0..count)
        .map(|_| loop {
            let mut a = SparseVec::zero(p, tag);
            for i in lo..hi {
                if rng.gen_bool(0.4) {
                    a.set(i, rng.gen_range(1..p));
                }
            }
            if !a.is_zero() {
                break a;
            }
        })
        .collect()
}

/// A random compatible endomorphism of a finitely generated group with
/// `free_rank ≤ max_free` and torsion moduli at most `max_exp`.
pub fn random_int_endo(rng: &mut ZooRng, max_free: usize, max_exp: u64) -> FgEndo {
    let r = rng.gen_range(0..=max_free);
    let t = rng.gen_range(if r == 0 { 1 } else { 0 }..=2);
    let torsion: Vec<u64> = (0..t).map(|_| rng.gen_range(2..=max_exp)).collect();
    let g = FgGroup::from_u64(r, &torsion).expect("valid moduli");
    random_endo_on(rng, &g)
}

/// Random compatible endomorphism: entries are chosen as multiples of the
/// smallest step allowed by `d_i | M_ij d_j`.
pub fn random_endo_on(rng: &mut ZooRng, g: &FgGroup) -> FgEndo {
    let k = g.dim();
    let r = g.free_rank();
    let d: Vec<i64> = g.torsion().iter().map(|x| x.to_i64().expect("small modulus")).collect();
    let mut rows = vec![vec![BigInt::from(0); k]; k];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = match (i < r, j < r) {
                (true, true) => BigInt::from(rng.gen_range(-3i64..=3)),
                // torsion never maps into free coordinates
                (true, false) => BigInt::from(0),
                (false, true) => BigInt::from(rng.gen_range(0..d[i - r])),
                (false, false) => {
                    let (di, dj) = (d[i - r], d[j - r]);
                    let step = di / num_integer::gcd(di, dj);
                    BigInt::from(step * rng.gen_range(0..(di / step).max(1)))
                }
            };
        }
    }
    FgEndo::new(g.clone(), IntMat::from_rows(rows, k)).expect("compatible by construction")
}
