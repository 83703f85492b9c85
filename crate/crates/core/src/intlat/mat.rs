use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense integer matrix with arbitrary-precision entries.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMat{:?}", self.data.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
    }
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![vec![BigInt::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    pub fn diag(d: &[i64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m.data[i][i] = BigInt::from(x);
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged integer matrix".into()));
        }
        Ok(IntMat {
            rows: rows.len(),
            cols,
            data: rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
        })
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged integer matrix");
        IntMat { rows: rows.len(), cols, data: rows }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r][c]
    }
    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r][c] = v;
    }
    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r]
    }
    pub fn row_vecs(&self) -> &[Vec<BigInt>] {
        &self.data
    }
    pub fn into_rows(self) -> Vec<Vec<BigInt>> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c][r] = self.data[r][c].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[r][k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r][c] += a * &other.data[k][c];
                }
            }
        }
        Ok(out)
    }

    /// Column-vector product `self * x`.
    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.cols);
        self.data.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().flatten().all(Zero::is_zero)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                let Some(s) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else { return Ok(BigInt::zero()) };
                a.swap(k, s);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(if n == 0 { BigInt::one() } else { sign * &a[n - 1][n - 1] })
    }
}

/// Row-style Hermite normal form of the lattice spanned by the rows.
///
/// Output rows are nonzero, pivots strictly increase to the right, each pivot
/// is positive, and entries above a pivot lie in `[0, pivot)`. Two generator
/// sets of the same lattice produce identical output.
pub fn hnf_rows(rows: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let n = a.len();
    let mut r = 0;
    for c in 0..cols {
        if r == n {
            break;
        }
        for i in r + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let (x, y) = (a[r][c].clone(), a[i][c].clone());
            let eg = x.extended_gcd(&y);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let (xg, yg) = (&x / &g, &y / &g);
            let new_r: Vec<BigInt> = a[r].iter().zip(&a[i]).map(|(u, v)| &s * u + &t * v).collect();
            let new_i: Vec<BigInt> = a[r].iter().zip(&a[i]).map(|(u, v)| &xg * v - &yg * u).collect();
            a[r] = new_r;
            a[i] = new_i;
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            a[r].iter_mut().for_each(|x| *x = -x.clone());
        }
        let piv = a[r][c].clone();
        for i in 0..r {
            let q = a[i][c].div_floor(&piv);
            if !q.is_zero() {
                let pr = a[r].clone();
                for (u, v) in a[i].iter_mut().zip(&pr) {
                    *u -= &q * v;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// Column-style Hermite normal form: the columns of the result form the
/// canonical basis of the lattice spanned by the columns of `m`.
pub fn hnf(m: &IntMat) -> IntMat {
    let t = m.transpose();
    let rows = hnf_rows(t.row_vecs(), t.cols());
    IntMat::from_rows(rows, t.cols()).transpose()
}

/// Smith normal form: returns `(d, U, V)` with `U * m * V = diag(d)`,
/// `d_i | d_{i+1}`, `d_i >= 0`, and `U`, `V` unimodular. The list `d` has
/// length `min(rows, cols)`.
pub fn snf(m: &IntMat) -> (Vec<BigInt>, IntMat, IntMat) {
    let w = snf_full(m);
    (w.d, w.u, w.v)
}

pub(crate) struct SnfResult {
    pub d: Vec<BigInt>,
    pub u: IntMat,
    pub v: IntMat,
    pub v_inv: IntMat,
}

pub(crate) fn snf_full(m: &IntMat) -> SnfResult {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.data.clone();
    let mut u = IntMat::identity(rows).data;
    let mut v = IntMat::identity(cols).data;
    let mut vi = IntMat::identity(cols).data;

    fn row_addmul(a: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
        let s = a[src].clone();
        for (x, y) in a[dst].iter_mut().zip(&s) {
            *x += q * y;
        }
    }
    fn col_addmul(a: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
        for row in a.iter_mut() {
            let y = row[src].clone();
            row[dst] += q * y;
        }
    }
    fn col_swap(a: &mut [Vec<BigInt>], i: usize, j: usize) {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }

    let t_max = rows.min(cols);
    for t in 0..t_max {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            a.swap(t, bi);
            u.swap(t, bi);
            col_swap(&mut a, t, bj);
            col_swap(&mut v, t, bj);
            vi.swap(t, bj);

            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = -a[i][t].div_floor(&a[t][t]);
                row_addmul(&mut a, i, t, &q);
                row_addmul(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = -a[t][j].div_floor(&a[t][t]);
                col_addmul(&mut a, j, t, &q);
                col_addmul(&mut v, j, t, &q);
                // inverse of (col_j += q col_t) is row_t -= q row_j on V^-1
                row_addmul(&mut vi, t, j, &-q.clone());
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: the pivot must divide the whole trailing block
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    row_addmul(&mut a, t, i, &one);
                    row_addmul(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            a[t].iter_mut().for_each(|x| *x = -x.clone());
            u[t].iter_mut().for_each(|x| *x = -x.clone());
        }
    }
    let d = (0..t_max).map(|i| a[i][i].clone()).collect();
    SnfResult {
        d,
        u: IntMat::from_rows(u, rows),
        v: IntMat::from_rows(v, cols),
        v_inv: IntMat::from_rows(vi, cols),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMat {
        IntMat::from_i64(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_examples() {
        assert_eq!(hnf(&IntMat::diag(&[2, 3])), IntMat::diag(&[2, 3]));
        assert_eq!(hnf(&IntMat::identity(3)), IntMat::identity(3));
        // Columns (2,0) and (1,1): index-2 lattice {x + y even}.
        let h = hnf(&mat(&[&[2, 1], &[0, 1]]));
        assert_eq!(h.det().unwrap().abs(), BigInt::from(2));
        // Both generator sets lie in each other's lattice: check by HNF of the union.
        let union = mat(&[&[2, 1, h.get(0, 0).try_into().unwrap(), h.get(0, 1).try_into().unwrap()], &[0, 1, h.get(1, 0).try_into().unwrap(), h.get(1, 1).try_into().unwrap()]]);
        assert_eq!(hnf(&union), h);
    }

    #[test]
    fn snf_examples() {
        let (d, u, v) = snf(&IntMat::diag(&[6, 4]));
        assert_eq!(d, ints(&[2, 12]));
        let prod = u.mul(&IntMat::diag(&[6, 4])).unwrap().mul(&v).unwrap();
        assert_eq!(prod, IntMat::diag(&[2, 12]));

        let (d, _, _) = snf(&IntMat::identity(3));
        assert_eq!(d, ints(&[1, 1, 1]));

        let m = mat(&[&[2, 4], &[6, 8]]);
        let (d, u, v) = snf(&m);
        assert_eq!(d, ints(&[2, 4]));
        assert_eq!(u.mul(&m).unwrap().mul(&v).unwrap(), IntMat::diag(&[2, 4]));
        assert_eq!(u.det().unwrap().abs(), BigInt::one());
        assert_eq!(v.det().unwrap().abs(), BigInt::one());
    }

    #[test]
    fn snf_tracks_v_inverse() {
        let m = mat(&[&[3, 5, 7], &[2, 9, 4]]);
        let r = snf_full(&m);
        assert_eq!(r.v.mul(&r.v_inv).unwrap(), IntMat::identity(3));
        let prod = r.u.mul(&m).unwrap().mul(&r.v).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                let expect = if i == j { r.d[i].clone() } else { BigInt::zero() };
                assert_eq!(prod.get(i, j), &expect);
            }
        }
    }

    #[test]
    fn det_small() {
        assert_eq!(mat(&[&[2, 1], &[7, 4]]).det().unwrap(), BigInt::from(1));
        assert_eq!(mat(&[&[0, 1], &[1, 0]]).det().unwrap(), BigInt::from(-1));
    }
}
