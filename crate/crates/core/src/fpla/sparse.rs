use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::scalar::{add_mod, inv_mod, mul_mod, neg_mod, reduce_i64, sub_mod};
use crate::error::{Error, Result};

/// Whether coordinates are indexed by ℕ or by ℤ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexTag {
    Nat,
    Int,
}

impl IndexTag {
    pub fn name(self) -> &'static str {
        match self {
            IndexTag::Nat => "natural",
            IndexTag::Int => "integer",
        }
    }
}

/// Finitely supported vector in F_p^(ℕ) or F_p^(ℤ).
///
/// The same type carries row functionals: a functional `a` evaluates on `v`
/// as `Σ a_i v_i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseVec {
    p: u32,
    tag: IndexTag,
    entries: BTreeMap<i64, u32>,
}

pub type FpVec = SparseVec;
pub type Functional = SparseVec;

impl fmt::Debug for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}e{k}")?;
        }
        write!(f, "]_{}", self.p)
    }
}

impl SparseVec {
    pub fn zero(p: u32, tag: IndexTag) -> Self {
        SparseVec { p, tag, entries: BTreeMap::new() }
    }

    /// Canonical basis vector `e_i`.
    pub fn unit(p: u32, tag: IndexTag, i: i64) -> Self {
        let mut v = Self::zero(p, tag);
        v.set(i, 1);
        v
    }

    /// Builds from `(index, value)` pairs; repeated indices accumulate.
    pub fn from_pairs(p: u32, tag: IndexTag, pairs: &[(i64, i64)]) -> Result<Self> {
        let mut v = Self::zero(p, tag);
        for &(i, x) in pairs {
            if tag == IndexTag::Nat && i < 0 {
                return Err(Error::IndexTag { expected: "natural", found: "integer" });
            }
            v.add_at(i, reduce_i64(x, p));
        }
        Ok(v)
    }

    pub fn from_dense(p: u32, dense: &[u32]) -> Self {
        let mut v = Self::zero(p, IndexTag::Nat);
        for (i, &x) in dense.iter().enumerate() {
            v.set(i as i64, x % p);
        }
        v
    }

    pub fn to_dense(&self, len: usize) -> Vec<u32> {
        let mut out = vec![0; len];
        for (&i, &x) in &self.entries {
            assert!(i >= 0 && (i as usize) < len, "index {i} outside dense window {len}");
            out[i as usize] = x;
        }
        out
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn tag(&self) -> IndexTag {
        self.tag
    }

    pub fn with_tag(mut self, tag: IndexTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: i64) -> u32 {
        self.entries.get(&i).copied().unwrap_or(0)
    }

    pub fn set(&mut self, i: i64, x: u32) {
        if x == 0 {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, x);
        }
    }

    pub fn add_at(&mut self, i: i64, x: u32) {
        let cur = self.get(i);
        self.set(i, add_mod(cur, x, self.p));
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.entries.iter().map(|(&i, &x)| (i, x))
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.entries.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.entries.keys().next_back().copied()
    }

    pub fn pairs(&self) -> Vec<(i64, u32)> {
        self.iter().collect()
    }

    pub fn scale(&self, s: u32) -> Self {
        let mut out = Self::zero(self.p, self.tag);
        if !s.is_multiple_of(self.p) {
            for (i, x) in self.iter() {
                out.entries.insert(i, mul_mod(x, s, self.p));
            }
        }
        out
    }

    pub fn add(&self, other: &SparseVec) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &SparseVec) {
        self.axpy(1, other);
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: u32, other: &SparseVec) {
        if s == 0 {
            return;
        }
        for (i, x) in other.iter() {
            self.add_at(i, mul_mod(s, x, self.p));
        }
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.entries.values_mut().for_each(|x| *x = neg_mod(*x, self.p));
        out
    }

    /// Pairing `Σ self_i other_i`.
    pub fn dot(&self, other: &SparseVec) -> u32 {
        let (small, large) = if self.support_len() <= other.support_len() { (self, other) } else { (other, self) };
        small.iter().fold(0, |acc, (i, x)| add_mod(acc, mul_mod(x, large.get(i), self.p), self.p))
    }

    /// Moves every index by `delta`, dropping coordinates that leave ℕ.
    pub fn shifted(&self, delta: i64) -> Self {
        let mut out = Self::zero(self.p, self.tag);
        for (i, x) in self.iter() {
            let j = i + delta;
            if self.tag == IndexTag::Int || j >= 0 {
                out.entries.insert(j, x);
            }
        }
        out
    }
}

/// Incrementally maintained reduced row-echelon basis of sparse vectors.
///
/// Pivot of a row is its smallest index; every stored row has coefficient 1
/// at its pivot and 0 at all other pivots, so the stored set is canonical for
/// the span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseEchelon {
    p: u32,
    rows: BTreeMap<i64, SparseVec>,
}

impl SparseEchelon {
    pub fn new(p: u32) -> Self {
        SparseEchelon { p, rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec> {
        self.rows.values()
    }

    /// Reduces `v` against the basis; zero iff `v` lies in the span.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        let hits: Vec<i64> = v.iter().map(|(i, _)| i).filter(|i| self.rows.contains_key(i)).collect();
        for i in hits {
            let c = v.get(i);
            if c != 0 {
                v.axpy(neg_mod(c, self.p), &self.rows[&i]);
            }
        }
        v
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns true when the rank grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(v);
        let Some(piv) = r.min_index() else { return false };
        let r = r.scale(inv_mod(r.get(piv), self.p));
        for row in self.rows.values_mut() {
            let c = row.get(piv);
            if c != 0 {
                let mut updated = row.clone();
                updated.axpy(sub_mod(0, c, self.p), &r);
                *row = updated;
            }
        }
        self.rows.insert(piv, r);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifting_respects_tag() {
        let v = SparseVec::from_pairs(2, IndexTag::Nat, &[(0, 1), (3, 1)]).unwrap();
        assert_eq!(v.shifted(-1).pairs(), vec![(2, 1)]);
        let w = v.clone().with_tag(IndexTag::Int).shifted(-1);
        assert_eq!(w.pairs(), vec![(-1, 1), (2, 1)]);
        assert!(SparseVec::from_pairs(2, IndexTag::Nat, &[(-1, 1)]).is_err());
    }

    #[test]
    fn echelon_is_canonical() {
        let p = 3;
        let a = SparseVec::from_pairs(p, IndexTag::Nat, &[(0, 1), (2, 2)]).unwrap();
        let b = SparseVec::from_pairs(p, IndexTag::Nat, &[(0, 2), (1, 1)]).unwrap();
        let mut e1 = SparseEchelon::new(p);
        assert!(e1.insert(&a));
        assert!(e1.insert(&b));
        assert!(!e1.insert(&a.add(&b)));
        let mut e2 = SparseEchelon::new(p);
        e2.insert(&a.add(&b));
        e2.insert(&b.scale(2));
        assert_eq!(e1, e2);
        assert_eq!(e1.rank(), 2);
    }
}
