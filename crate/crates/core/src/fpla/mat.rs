use std::fmt;

use serde::{Deserialize, Serialize};

use super::scalar::{add_mod, check_prime, inv_mod, mul_mod, neg_mod, reduce_i64, sub_mod};
use crate::error::{Error, Result};

/// Dense matrix over F_p, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpMat {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FpMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpMat(p={}, {}x{}) [", self.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "{:?}", self.row(r))?;
            if r + 1 < self.rows {
                write!(f, ", ")?;
            }
        }
        write!(f, "]")
    }
}

impl FpMat {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        FpMat { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1 % p);
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing every entry mod `p`.
    pub fn from_rows(p: u64, rows: &[Vec<i64>]) -> Result<Self> {
        let p = check_prime(p)?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        let data = rows.iter().flatten().map(|&x| reduce_i64(x, p)).collect();
        Ok(FpMat { p, rows: rows.len(), cols, data })
    }

    /// Builds from already-reduced residues. Panics if the length is wrong.
    pub fn from_residues(p: u32, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count does not match shape");
        assert!(data.iter().all(|&x| x < p), "unreduced entry");
        FpMat { p, rows, cols, data }
    }

    /// Companion matrix of a monic polynomial given by ascending coefficients
    /// (leading 1 included). Column convention: `e_j -> e_{j+1}`, last column
    /// holds the negated low coefficients.
    pub fn companion(p: u32, monic: &[u32]) -> Self {
        let d = monic.len() - 1;
        let mut m = Self::zeros(p, d, d);
        for (j, &c) in monic[..d].iter().enumerate() {
            if j + 1 < d {
                m.set(j + 1, j, 1);
            }
            m.set(j, d - 1, neg_mod(c, p));
        }
        m
    }

    /// Nilpotent Jordan block: `e_j -> e_{j+1}`, last basis vector to zero.
    pub fn nilpotent_block(p: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for j in 0..n.saturating_sub(1) {
            m.set(j + 1, j, 1);
        }
        m
    }

    pub fn block_diag(blocks: &[FpMat]) -> Self {
        let p = blocks[0].p;
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(p, n, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(r0 + i, c0 + j, b.get(i, j));
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(v < self.p);
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &FpMat) -> Result<Self> {
        if self.cols != other.rows || self.p != other.p {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.p as u64;
        let mut out = Self::zeros(self.p, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                for (c, slot) in acc.iter_mut().enumerate() {
                    *slot = (*slot + a * other.get(k, c) as u64) % p;
                }
            }
            for (c, &v) in acc.iter().enumerate() {
                out.set(r, c, v as u32);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &FpMat) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols || self.p != other.p {
            return Err(Error::Dimension("matrix sum of different shapes".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| add_mod(a, b, self.p)).collect();
        Ok(FpMat { data, ..*self })
    }

    pub fn scale(&self, s: u32) -> Self {
        let data = self.data.iter().map(|&a| mul_mod(a, s, self.p)).collect();
        FpMat { data, ..*self }
    }

    /// Matrix-vector product with a dense column vector.
    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.p as u64;
        (0..self.rows)
            .map(|r| {
                let s = self.row(r).iter().zip(v).fold(0u64, |s, (&a, &b)| (s + a as u64 * b as u64) % p);
                s as u32
            })
            .collect()
    }

    /// Row-vector product `a * self`.
    pub fn vec_mul(&self, a: &[u32]) -> Vec<u32> {
        assert_eq!(a.len(), self.rows);
        let p = self.p as u64;
        let mut out = vec![0u64; self.cols];
        for (r, &ar) in a.iter().enumerate() {
            if ar == 0 {
                continue;
            }
            for (c, o) in out.iter_mut().enumerate() {
                *o = (*o + ar as u64 * self.get(r, c) as u64) % p;
            }
        }
        out.into_iter().map(|x| x as u32).collect()
    }

    pub fn pow(&self, mut k: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("power of a non-square matrix".into()));
        }
        let mut acc = Self::identity(self.p, self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(self.p, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1 % self.p);
        }
        let (rank, e) = aug.rref_rank();
        if rank < n || (0..n).any(|i| e.get(i, i) != 1) {
            return None;
        }
        let mut inv = Self::zeros(self.p, n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, e.get(r, n + c));
            }
        }
        Some(inv)
    }

    /// Rank and reduced row-echelon basis of the row space.
    ///
    /// The returned matrix has exactly `rank` rows, each with a leading 1 and
    /// zeros in every other pivot column, so equal row spaces give equal output.
    pub fn rref_rank(&self) -> (usize, FpMat) {
        if self.p == 2 {
            self.rref_gf2()
        } else {
            self.rref_generic()
        }
    }

    pub fn rank(&self) -> usize {
        self.rref_rank().0
    }

    fn rref_generic(&self) -> (usize, FpMat) {
        let p = self.p;
        let mut a = self.row_vecs();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(piv) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
            a.swap(rank, piv);
            let inv = inv_mod(a[rank][c], p);
            if inv != 1 {
                a[rank].iter_mut().for_each(|x| *x = mul_mod(*x, inv, p));
            }
            let pivot_row = a[rank].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r == rank || row[c] == 0 {
                    continue;
                }
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x = sub_mod(*x, mul_mod(f, y, p), p);
                }
            }
            rank += 1;
            if rank == a.len() {
                break;
            }
        }
        a.truncate(rank);
        let data = a.into_iter().flatten().collect();
        (rank, FpMat { p, rows: rank, cols: self.cols, data })
    }

    fn rref_gf2(&self) -> (usize, FpMat) {
        let mut rows: Vec<BitRow> = (0..self.rows).map(|r| BitRow::from_residues(self.row(r))).collect();
        let rank = BitRow::eliminate(&mut rows, self.cols);
        rows.truncate(rank);
        let data = rows.iter().flat_map(|r| r.to_residues(self.cols)).collect();
        (rank, FpMat { p: 2, rows: rank, cols: self.cols, data })
    }

    /// Rows spanning the right null space `{x : self * x = 0}`.
    pub fn kernel_basis(&self) -> FpMat {
        let (rank, e) = self.rref_rank();
        let p = self.p;
        let mut pivots = Vec::with_capacity(rank);
        for r in 0..rank {
            pivots.push((0..self.cols).find(|&c| e.get(r, c) != 0).expect("nonzero echelon row"));
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Self::zeros(p, free.len(), self.cols);
        for (i, &f) in free.iter().enumerate() {
            k.set(i, f, 1 % p);
            for (r, &pc) in pivots.iter().enumerate() {
                k.set(i, pc, neg_mod(e.get(r, f), p));
            }
        }
        k.rref_rank().1
    }

    /// Column space basis, returned as RREF rows.
    pub fn column_space(&self) -> FpMat {
        self.transpose().rref_rank().1
    }

    /// Whether every row of `other` lies in the row space of `self`.
    pub fn row_space_contains(&self, other: &FpMat) -> bool {
        let (r1, _) = self.rref_rank();
        let mut stacked = self.row_vecs();
        stacked.extend(other.row_vecs());
        let all = FpMat {
            p: self.p,
            rows: stacked.len(),
            cols: self.cols,
            data: stacked.into_iter().flatten().collect(),
        };
        all.rank() == r1
    }

    /// Stacks the rows of `other` under `self`.
    pub fn vstack(&self, other: &FpMat) -> Result<Self> {
        if self.cols != other.cols || self.p != other.p {
            return Err(Error::Dimension("vstack of incompatible matrices".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FpMat { p: self.p, rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Stable kernel and stable image: `ker m^d` and `im m^d` for `d = dim`.
    /// Both returned as RREF row bases.
    pub fn stable_kernel_image(&self) -> Result<(FpMat, FpMat)> {
        let md = self.pow(self.rows as u64)?;
        Ok((md.kernel_basis(), md.column_space()))
    }
}

/// A GF(2) row packed into 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BitRow(pub(crate) Vec<u64>);

impl BitRow {
    fn from_residues(row: &[u32]) -> Self {
        let mut words = vec![0u64; row.len().div_ceil(64)];
        for (i, &x) in row.iter().enumerate() {
            if x & 1 == 1 {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        BitRow(words)
    }

    fn to_residues(&self, cols: usize) -> Vec<u32> {
        (0..cols).map(|i| self.bit(i) as u32).collect()
    }

    #[inline]
    fn bit(&self, i: usize) -> bool {
        (self.0[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    fn xor_from(&mut self, other: &BitRow, start_word: usize) {
        for (a, b) in self.0[start_word..].iter_mut().zip(&other.0[start_word..]) {
            *a ^= b;
        }
    }

    /// Gauss-Jordan over GF(2); returns the rank, leaving RREF rows on top.
    fn eliminate(rows: &mut [BitRow], cols: usize) -> usize {
        let mut rank = 0;
        for c in 0..cols {
            if rank == rows.len() {
                break;
            }
            let Some(piv) = (rank..rows.len()).find(|&r| rows[r].bit(c)) else { continue };
            rows.swap(rank, piv);
            let pivot = rows[rank].clone();
            let w = c / 64;
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.bit(c) {
                    row.xor_from(&pivot, w);
                }
            }
            rank += 1;
        }
        rank
    }
}
