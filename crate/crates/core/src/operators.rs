//! Finite descriptions of endomorphisms: matrices, Bernoulli shifts,
//! companion-block modules, direct sums, polynomials and powers of operators,
//! and integer endomorphisms of finitely generated groups.
//!
//! Sequence-space operators act on finitely supported vectors with
//! [`apply`](OperatorDesc::apply) and on finitely supported row functionals
//! with [`pullback`](OperatorDesc::pullback) (`a ↦ a ∘ φ`). Every kind here
//! sends finitely supported functionals to finitely supported functionals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpla::{check_prime, FpMat, FpPoly, FpVec, Functional, IndexTag, SparseVec};
use crate::intlat::{FgEndo, FgGroup, IntMat};

/// How a [`OperatorDesc::BlockDiag`] continues past its explicit block list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepeatRule {
    /// Every later block repeats the last listed polynomial.
    RepeatLast,
    /// Block `len - 1 + m` is `f(X^(m+1))` for the last listed `f`, so degrees
    /// grow linearly (`f = X - 1` yields the blocks `X^n - 1`).
    GrowLinear,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
pub enum OperatorDesc {
    FiniteDim(FpMat),
    /// `e_i ↦ e_{i+1}` on `F_p^(ℕ)`.
    RightShift { p: u32 },
    /// `e_0 ↦ 0`, `e_i ↦ e_{i-1}` on `F_p^(ℕ)`.
    LeftShift { p: u32 },
    /// `e_i ↦ e_{i+1}` on `F_p^(ℤ)`, or `e_i ↦ e_{i-1}` when `inverse`.
    TwoSidedShift { p: u32, inverse: bool },
    /// `⊕_n F_p[X]/(f_n)` with multiplication by `X`.
    BlockDiag { p: u32, blocks: Vec<FpPoly>, repeat: RepeatRule },
    /// Coordinates interleave: global index `i` is local index `i div k` of part `i mod k`.
    DirectSum(Vec<OperatorDesc>),
    PolyOf(FpPoly, Box<OperatorDesc>),
    Power(u32, Box<OperatorDesc>),
    IntEndo(FgEndo),
    /// Any endomorphism of a divisible group (its only cofinite subgroup is itself).
    DivisibleTrivial,
}

impl OperatorDesc {
    pub fn right_shift(p: u32) -> Self {
        OperatorDesc::RightShift { p }
    }
    pub fn left_shift(p: u32) -> Self {
        OperatorDesc::LeftShift { p }
    }
    pub fn two_sided_shift(p: u32) -> Self {
        OperatorDesc::TwoSidedShift { p, inverse: false }
    }
    pub fn poly_of(f: FpPoly, inner: OperatorDesc) -> Self {
        OperatorDesc::PolyOf(f, Box::new(inner))
    }
    pub fn power(k: u32, inner: OperatorDesc) -> Self {
        OperatorDesc::Power(k, Box::new(inner))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            OperatorDesc::FiniteDim(_) => "finite_dim",
            OperatorDesc::RightShift { .. } => "right_shift",
            OperatorDesc::LeftShift { .. } => "left_shift",
            OperatorDesc::TwoSidedShift { .. } => "two_sided_shift",
            OperatorDesc::BlockDiag { .. } => "block_diag",
            OperatorDesc::DirectSum(_) => "direct_sum",
            OperatorDesc::PolyOf(..) => "poly_of",
            OperatorDesc::Power(..) => "power",
            OperatorDesc::IntEndo(_) => "int_endo",
            OperatorDesc::DivisibleTrivial => "divisible_trivial",
        }
    }

    /// Prime of the underlying F_p-space; `None` for integer and divisible kinds.
    pub fn p(&self) -> Option<u32> {
        match self {
            OperatorDesc::FiniteDim(m) => Some(m.p()),
            OperatorDesc::RightShift { p }
            | OperatorDesc::LeftShift { p }
            | OperatorDesc::TwoSidedShift { p, .. }
            | OperatorDesc::BlockDiag { p, .. } => Some(*p),
            OperatorDesc::DirectSum(parts) => parts.first().and_then(OperatorDesc::p),
            OperatorDesc::PolyOf(_, inner) | OperatorDesc::Power(_, inner) => inner.p(),
            OperatorDesc::IntEndo(_) | OperatorDesc::DivisibleTrivial => None,
        }
    }

    /// Whether the operator acts on an F_p sequence space.
    pub fn is_sequence_kind(&self) -> bool {
        self.p().is_some()
    }

    pub fn index_tag(&self) -> IndexTag {
        match self {
            OperatorDesc::TwoSidedShift { .. } => IndexTag::Int,
            OperatorDesc::DirectSum(parts) => parts.first().map_or(IndexTag::Nat, OperatorDesc::index_tag),
            OperatorDesc::PolyOf(_, inner) | OperatorDesc::Power(_, inner) => inner.index_tag(),
            _ => IndexTag::Nat,
        }
    }

    /// Finite dimension of the ambient space, when there is one.
    pub fn finite_dim(&self) -> Option<usize> {
        match self {
            OperatorDesc::FiniteDim(m) => Some(m.rows()),
            OperatorDesc::PolyOf(_, inner) | OperatorDesc::Power(_, inner) => inner.finite_dim(),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidOperator(msg));
        match self {
            OperatorDesc::FiniteDim(m) => {
                if !m.is_square() {
                    return bad(format!("finite_dim matrix must be square, got {}x{}", m.rows(), m.cols()));
                }
            }
            OperatorDesc::RightShift { p } | OperatorDesc::LeftShift { p } | OperatorDesc::TwoSidedShift { p, .. } => {
                check_prime(*p as u64)?;
            }
            OperatorDesc::BlockDiag { p, blocks, .. } => {
                check_prime(*p as u64)?;
                if blocks.is_empty() {
                    return bad("block_diag needs at least one block".into());
                }
                for (i, f) in blocks.iter().enumerate() {
                    if f.p() != *p {
                        return Err(Error::PrimeMismatch { expected: *p, found: f.p() });
                    }
                    if !f.is_monic() || f.degree().unwrap_or(0) < 1 {
                        return bad(format!("block {i} ({f}) must be monic of degree at least 1"));
                    }
                }
            }
            OperatorDesc::DirectSum(parts) => {
                let Some(first) = parts.first() else { return bad("direct_sum needs at least one part".into()) };
                for (i, part) in parts.iter().enumerate() {
                    part.validate()?;
                    if !part.is_sequence_kind() {
                        return bad(format!("direct_sum part {i} ({}) is not an F_p operator", part.kind_name()));
                    }
                    if part.p() != first.p() {
                        return Err(Error::PrimeMismatch {
                            expected: first.p().unwrap_or(0),
                            found: part.p().unwrap_or(0),
                        });
                    }
                    if part.index_tag() != first.index_tag() {
                        return bad(format!("direct_sum part {i} mixes natural and integer indices"));
                    }
                }
            }
            OperatorDesc::PolyOf(f, inner) => {
                inner.validate()?;
                let Some(p) = inner.p() else {
                    return bad(format!("poly_of needs an F_p operator, got {}", inner.kind_name()));
                };
                if f.p() != p {
                    return Err(Error::PrimeMismatch { expected: p, found: f.p() });
                }
            }
            OperatorDesc::Power(k, inner) => {
                if *k < 1 {
                    return bad("power exponent must be at least 1".into());
                }
                inner.validate()?;
                if !inner.is_sequence_kind() {
                    return bad(format!("power needs an F_p operator, got {}", inner.kind_name()));
                }
            }
            OperatorDesc::IntEndo(e) => {
                FgEndo::new(e.group().clone(), e.matrix().clone())?;
            }
            OperatorDesc::DivisibleTrivial => {}
        }
        Ok(())
    }

    fn check_vec(&self, v: &SparseVec) -> Result<u32> {
        let p = self.p().ok_or_else(|| Error::Unsupported(format!("{} does not act on F_p vectors", self.kind_name())))?;
        if v.p() != p {
            return Err(Error::PrimeMismatch { expected: p, found: v.p() });
        }
        if v.tag() != self.index_tag() {
            return Err(Error::IndexTag { expected: self.index_tag().name(), found: v.tag().name() });
        }
        Ok(p)
    }

    /// Forward action on a finitely supported vector.
    pub fn apply(&self, v: &FpVec) -> Result<FpVec> {
        let p = self.check_vec(v)?;
        match self {
            OperatorDesc::FiniteDim(m) => {
                let dense = dense_in_window(v, m.rows())?;
                Ok(SparseVec::from_dense(p, &m.mul_vec(&dense)))
            }
            OperatorDesc::RightShift { .. } => Ok(v.shifted(1)),
            OperatorDesc::LeftShift { .. } => Ok(v.shifted(-1)),
            OperatorDesc::TwoSidedShift { inverse, .. } => Ok(v.shifted(if *inverse { -1 } else { 1 })),
            OperatorDesc::BlockDiag { blocks, repeat, .. } => {
                let layout = BlockLayout { blocks, repeat: *repeat };
                let mut out = SparseVec::zero(p, IndexTag::Nat);
                for (i, x) in v.iter() {
                    let (start, f) = layout.locate(i);
                    let d = f.degree().unwrap();
                    let j = (i - start) as usize;
                    if j + 1 < d {
                        out.add_at(i + 1, x);
                    } else {
                        for (k, &c) in f.coeffs()[..d].iter().enumerate() {
                            out.add_at(start + k as i64, crate::fpla::scalar::mul_mod(x, crate::fpla::scalar::neg_mod(c, p), p));
                        }
                    }
                }
                Ok(out)
            }
            OperatorDesc::DirectSum(parts) => {
                let locals = split_direct(v, parts.len());
                let images = parts.iter().zip(&locals).map(|(op, lv)| op.apply(lv)).collect::<Result<Vec<_>>>()?;
                Ok(merge_direct(p, v.tag(), &images))
            }
            OperatorDesc::PolyOf(f, inner) => {
                let mut acc = SparseVec::zero(p, v.tag());
                for &c in f.coeffs().iter().rev() {
                    acc = inner.apply(&acc)?;
                    acc.axpy(c, v);
                }
                Ok(acc)
            }
            OperatorDesc::Power(k, inner) => (0..*k).try_fold(v.clone(), |acc, _| inner.apply(&acc)),
            OperatorDesc::IntEndo(_) | OperatorDesc::DivisibleTrivial => unreachable!("rejected by check_vec"),
        }
    }

    /// Pullback of a row functional: returns `a ∘ φ`.
    pub fn pullback(&self, a: &Functional) -> Result<Functional> {
        let p = self.check_vec(a)?;
        match self {
            OperatorDesc::FiniteDim(m) => {
                let dense = dense_in_window(a, m.rows())?;
                Ok(SparseVec::from_dense(p, &m.vec_mul(&dense)))
            }
            OperatorDesc::RightShift { .. } => Ok(a.shifted(-1)),
            OperatorDesc::LeftShift { .. } => Ok(a.shifted(1)),
            OperatorDesc::TwoSidedShift { inverse, .. } => Ok(a.shifted(if *inverse { 1 } else { -1 })),
            OperatorDesc::BlockDiag { blocks, repeat, .. } => {
                let layout = BlockLayout { blocks, repeat: *repeat };
                let mut out = SparseVec::zero(p, IndexTag::Nat);
                let mut seen = std::collections::BTreeSet::new();
                for (i, _) in a.iter() {
                    let (start, f) = layout.locate(i);
                    if !seen.insert(start) {
                        continue;
                    }
                    let d = f.degree().unwrap();
                    // (a∘φ)(e_{start+j}) = a_{start+j+1} for j < d-1,
                    // and -Σ_k f_k a_{start+k} for j = d-1.
                    for j in 0..d - 1 {
                        out.add_at(start + j as i64, a.get(start + j as i64 + 1));
                    }
                    let mut last = 0;
                    for (k, &c) in f.coeffs()[..d].iter().enumerate() {
                        let t = crate::fpla::scalar::mul_mod(c, a.get(start + k as i64), p);
                        last = crate::fpla::scalar::sub_mod(last, t, p);
                    }
                    out.add_at(start + d as i64 - 1, last);
                }
                Ok(out)
            }
            OperatorDesc::DirectSum(parts) => {
                let locals = split_direct(a, parts.len());
                let images = parts.iter().zip(&locals).map(|(op, la)| op.pullback(la)).collect::<Result<Vec<_>>>()?;
                Ok(merge_direct(p, a.tag(), &images))
            }
            OperatorDesc::PolyOf(f, inner) => {
                let mut acc = SparseVec::zero(p, a.tag());
                for &c in f.coeffs().iter().rev() {
                    acc = inner.pullback(&acc)?;
                    acc.axpy(c, a);
                }
                Ok(acc)
            }
            OperatorDesc::Power(k, inner) => (0..*k).try_fold(a.clone(), |acc, _| inner.pullback(&acc)),
            OperatorDesc::IntEndo(_) | OperatorDesc::DivisibleTrivial => unreachable!("rejected by check_vec"),
        }
    }

    /// The `d × d` compression of the operator to coordinates `0..d`.
    ///
    /// Coordinates leaving the window are dropped, so truncation does not
    /// commute with [`apply`](Self::apply) in general; use it for oracle
    /// windows only.
    pub fn truncate(&self, d: usize) -> Result<FpMat> {
        let p = self
            .p()
            .ok_or_else(|| Error::Unsupported(format!("{} has no sequence structure to truncate", self.kind_name())))?;
        if d == 0 {
            return Err(Error::Dimension("truncation window must be at least 1".into()));
        }
        let tag = self.index_tag();
        let limit = self.finite_dim().map_or(d, |n| n.min(d));
        let mut m = FpMat::zeros(p, d, d);
        for j in 0..limit {
            let img = self.apply(&SparseVec::unit(p, tag, j as i64))?;
            for (i, x) in img.iter() {
                if (0..d as i64).contains(&i) {
                    m.set(i as usize, j, x);
                }
            }
        }
        Ok(m)
    }

    /// Inverse operator, for the kinds that have one in closed form.
    pub fn inverse(&self) -> Result<OperatorDesc> {
        match self {
            OperatorDesc::TwoSidedShift { p, inverse } => Ok(OperatorDesc::TwoSidedShift { p: *p, inverse: !inverse }),
            OperatorDesc::FiniteDim(m) => m.inverse().map(OperatorDesc::FiniteDim).ok_or(Error::NotInvertible),
            _ => Err(Error::NotInvertible),
        }
    }

    /// Block polynomial `f_n` of a block-diagonal operator.
    pub fn block_poly(&self, n: usize) -> Option<FpPoly> {
        match self {
            OperatorDesc::BlockDiag { blocks, repeat, .. } => Some(BlockLayout { blocks, repeat: *repeat }.poly(n)),
            _ => None,
        }
    }

    /// Start index and polynomial of block `n` of a block-diagonal operator.
    pub fn block_span(&self, n: usize) -> Option<(i64, FpPoly)> {
        match self {
            OperatorDesc::BlockDiag { blocks, repeat, .. } => {
                let layout = BlockLayout { blocks, repeat: *repeat };
                let start: usize = (0..n).map(|m| layout.poly(m).degree().unwrap()).sum();
                Some((start as i64, layout.poly(n)))
            }
            _ => None,
        }
    }
}

fn dense_in_window(v: &SparseVec, n: usize) -> Result<Vec<u32>> {
    if v.min_index().is_some_and(|i| i < 0) || v.max_index().is_some_and(|i| i as usize >= n) {
        return Err(Error::Dimension(format!("vector support {:?} outside 0..{n}", v)));
    }
    Ok(v.to_dense(n))
}

struct BlockLayout<'a> {
    blocks: &'a [FpPoly],
    repeat: RepeatRule,
}

impl BlockLayout<'_> {
    fn poly(&self, n: usize) -> FpPoly {
        let len = self.blocks.len();
        if n < len {
            return self.blocks[n].clone();
        }
        let last = &self.blocks[len - 1];
        match self.repeat {
            RepeatRule::RepeatLast => last.clone(),
            RepeatRule::GrowLinear => last.compose(&FpPoly::monomial(last.p(), n - len + 2)),
        }
    }

    /// Start index and polynomial of the block containing coordinate `i`.
    fn locate(&self, i: i64) -> (i64, FpPoly) {
        let mut start = 0i64;
        let mut n = 0;
        loop {
            let f = self.poly(n);
            let d = f.degree().unwrap() as i64;
            if i < start + d {
                return (start, f);
            }
            start += d;
            n += 1;
        }
    }
}

/// Splits a direct-sum vector into its `k` local parts.
pub fn split_direct(v: &SparseVec, k: usize) -> Vec<SparseVec> {
    let mut parts = vec![SparseVec::zero(v.p(), v.tag()); k];
    let k = k as i64;
    for (i, x) in v.iter() {
        parts[i.rem_euclid(k) as usize].set(i.div_euclid(k), x);
    }
    parts
}

/// Inverse of [`split_direct`].
pub fn merge_direct(p: u32, tag: IndexTag, parts: &[SparseVec]) -> SparseVec {
    let k = parts.len() as i64;
    let mut out = SparseVec::zero(p, tag);
    for (b, part) in parts.iter().enumerate() {
        for (i, x) in part.iter() {
            out.set(i * k + b as i64, x);
        }
    }
    out
}

/// Global index of local coordinate `i` of part `part` in a `k`-fold direct sum.
pub fn direct_index(k: usize, part: usize, i: i64) -> i64 {
    i * k as i64 + part as i64
}

// ---------------------------------------------------------------------------
// JSON descriptor schema

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum OperatorJson {
    FiniteDim {
        p: u64,
        matrix: Vec<Vec<i64>>,
    },
    RightShift {
        p: u64,
    },
    LeftShift {
        p: u64,
    },
    TwoSidedShift {
        p: u64,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        inverse: bool,
    },
    BlockDiag {
        p: u64,
        blocks: Vec<Vec<i64>>,
        repeat: RepeatRule,
    },
    DirectSum {
        parts: Vec<OperatorJson>,
    },
    PolyOf {
        poly: Vec<i64>,
        inner: Box<OperatorJson>,
    },
    Power {
        k: u32,
        inner: Box<OperatorJson>,
    },
    IntEndo {
        free_rank: usize,
        torsion: Vec<u64>,
        matrix: Vec<Vec<i64>>,
    },
    DivisibleTrivial,
}

impl TryFrom<OperatorJson> for OperatorDesc {
    type Error = Error;

    fn try_from(j: OperatorJson) -> Result<Self> {
        let op = match j {
            OperatorJson::FiniteDim { p, matrix } => OperatorDesc::FiniteDim(FpMat::from_rows(p, &matrix)?),
            OperatorJson::RightShift { p } => OperatorDesc::RightShift { p: check_prime(p)? },
            OperatorJson::LeftShift { p } => OperatorDesc::LeftShift { p: check_prime(p)? },
            OperatorJson::TwoSidedShift { p, inverse } => OperatorDesc::TwoSidedShift { p: check_prime(p)?, inverse },
            OperatorJson::BlockDiag { p, blocks, repeat } => {
                let blocks = blocks.iter().map(|b| FpPoly::from_i64(p, b)).collect::<Result<Vec<_>>>()?;
                OperatorDesc::BlockDiag { p: check_prime(p)?, blocks, repeat }
            }
            OperatorJson::DirectSum { parts } => {
                OperatorDesc::DirectSum(parts.into_iter().map(OperatorDesc::try_from).collect::<Result<_>>()?)
            }
            OperatorJson::PolyOf { poly, inner } => {
                let inner = OperatorDesc::try_from(*inner)?;
                let p = inner.p().ok_or_else(|| Error::InvalidOperator("poly_of needs an F_p operator".into()))?;
                OperatorDesc::PolyOf(FpPoly::from_i64(p as u64, &poly)?, Box::new(inner))
            }
            OperatorJson::Power { k, inner } => OperatorDesc::Power(k, Box::new(OperatorDesc::try_from(*inner)?)),
            OperatorJson::IntEndo { free_rank, torsion, matrix } => {
                let g = FgGroup::from_u64(free_rank, &torsion)?;
                OperatorDesc::IntEndo(FgEndo::new(g, IntMat::from_i64(&matrix)?)?)
            }
            OperatorJson::DivisibleTrivial => OperatorDesc::DivisibleTrivial,
        };
        op.validate()?;
        Ok(op)
    }
}

impl From<OperatorDesc> for OperatorJson {
    fn from(op: OperatorDesc) -> Self {
        let poly = |f: &FpPoly| f.coeffs().iter().map(|&c| c as i64).collect::<Vec<_>>();
        match op {
            OperatorDesc::FiniteDim(m) => OperatorJson::FiniteDim {
                p: m.p() as u64,
                matrix: m.row_vecs().into_iter().map(|r| r.into_iter().map(i64::from).collect()).collect(),
            },
            OperatorDesc::RightShift { p } => OperatorJson::RightShift { p: p as u64 },
            OperatorDesc::LeftShift { p } => OperatorJson::LeftShift { p: p as u64 },
            OperatorDesc::TwoSidedShift { p, inverse } => OperatorJson::TwoSidedShift { p: p as u64, inverse },
            OperatorDesc::BlockDiag { p, blocks, repeat } => {
                OperatorJson::BlockDiag { p: p as u64, blocks: blocks.iter().map(poly).collect(), repeat }
            }
            OperatorDesc::DirectSum(parts) => OperatorJson::DirectSum { parts: parts.into_iter().map(Into::into).collect() },
            OperatorDesc::PolyOf(f, inner) => OperatorJson::PolyOf { poly: poly(&f), inner: Box::new((*inner).into()) },
            OperatorDesc::Power(k, inner) => OperatorJson::Power { k, inner: Box::new((*inner).into()) },
            OperatorDesc::IntEndo(e) => {
                use num_traits::ToPrimitive;
                let g = e.group();
                OperatorJson::IntEndo {
                    free_rank: g.free_rank(),
                    torsion: g.torsion().iter().map(|d| d.to_u64().expect("modulus fits u64")).collect(),
                    matrix: e
                        .matrix()
                        .row_vecs()
                        .iter()
                        .map(|r| r.iter().map(|x| x.to_i64().expect("entry fits i64")).collect())
                        .collect(),
                }
            }
            OperatorDesc::DivisibleTrivial => OperatorJson::DivisibleTrivial,
        }
    }
}

impl OperatorDesc {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidOperator(e.to_string()))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("operator serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(p: u32, tag: IndexTag, i: i64) -> SparseVec {
        SparseVec::unit(p, tag, i)
    }

    #[test]
    fn shift_actions() {
        let n = IndexTag::Nat;
        assert_eq!(OperatorDesc::right_shift(2).apply(&e(2, n, 0)).unwrap(), e(2, n, 1));
        assert!(OperatorDesc::left_shift(2).apply(&e(2, n, 0)).unwrap().is_zero());
        let z = IndexTag::Int;
        assert_eq!(OperatorDesc::two_sided_shift(2).apply(&e(2, z, -1)).unwrap(), e(2, z, 0));
        assert!(matches!(OperatorDesc::two_sided_shift(2).apply(&e(2, n, 0)), Err(Error::IndexTag { .. })));
    }

    #[test]
    fn shift_pullbacks() {
        let n = IndexTag::Nat;
        assert_eq!(OperatorDesc::left_shift(2).pullback(&e(2, n, 0)).unwrap(), e(2, n, 1));
        assert!(OperatorDesc::right_shift(2).pullback(&e(2, n, 0)).unwrap().is_zero());
        let m = FpMat::from_rows(3, &[vec![1, 2], vec![0, 1]]).unwrap();
        let a = SparseVec::from_pairs(3, n, &[(0, 1), (1, 1)]).unwrap();
        let got = OperatorDesc::FiniteDim(m.clone()).pullback(&a).unwrap();
        assert_eq!(got, SparseVec::from_dense(3, &m.vec_mul(&[1, 1])));
    }

    #[test]
    fn validation() {
        assert!(OperatorDesc::left_shift(2).validate().is_ok());
        let mixed = OperatorDesc::DirectSum(vec![OperatorDesc::left_shift(2), OperatorDesc::left_shift(3)]);
        assert!(matches!(mixed.validate(), Err(Error::PrimeMismatch { .. })));
        let json = r#"{"kind":"int_endo","free_rank":0,"torsion":[4,2],"matrix":[[0,1],[0,0]]}"#;
        assert!(matches!(OperatorDesc::from_json_str(json), Err(Error::InvalidOperator(_))));
        let not_monic = OperatorDesc::BlockDiag {
            p: 3,
            blocks: vec![FpPoly::new(3, vec![1, 2])],
            repeat: RepeatRule::RepeatLast,
        };
        assert!(not_monic.validate().is_err());
        assert!(OperatorDesc::power(0, OperatorDesc::left_shift(2)).validate().is_err());
    }

    #[test]
    fn truncation() {
        let sub = FpMat::nilpotent_block(2, 3);
        assert_eq!(OperatorDesc::right_shift(2).truncate(3).unwrap(), sub);
        assert_eq!(OperatorDesc::left_shift(2).truncate(3).unwrap(), sub.transpose());
        let bd = OperatorDesc::BlockDiag {
            p: 2,
            blocks: vec![FpPoly::new(2, vec![1, 1, 1])],
            repeat: RepeatRule::RepeatLast,
        };
        assert_eq!(bd.truncate(2).unwrap(), FpMat::companion(2, &[1, 1, 1]));
        assert!(OperatorDesc::DivisibleTrivial.truncate(2).is_err());
    }

    #[test]
    fn grow_linear_blocks() {
        let bd = OperatorDesc::BlockDiag {
            p: 2,
            blocks: vec![FpPoly::x_pow_minus_one(2, 1)],
            repeat: RepeatRule::GrowLinear,
        };
        for n in 0..6 {
            assert_eq!(bd.block_poly(n).unwrap(), FpPoly::x_pow_minus_one(2, n + 1));
        }
        assert_eq!(bd.block_span(3).unwrap().0, 1 + 2 + 3);
    }

    #[test]
    fn json_schema_roundtrip() {
        let cases = [
            r#"{"p":2,"kind":"left_shift"}"#,
            r#"{"kind":"finite_dim","p":3,"matrix":[[1,2],[0,1]]}"#,
            r#"{"kind":"block_diag","p":2,"blocks":[[1,1,1]],"repeat":"grow_linear"}"#,
            r#"{"kind":"direct_sum","parts":[{"kind":"left_shift","p":2},{"kind":"right_shift","p":2}]}"#,
            r#"{"kind":"int_endo","free_rank":2,"torsion":[4,2],"matrix":[[1,0,0,0],[0,1,0,0],[0,0,1,2],[0,0,1,1]]}"#,
            r#"{"kind":"poly_of","poly":[1,1],"inner":{"kind":"left_shift","p":2}}"#,
            r#"{"kind":"power","k":2,"inner":{"kind":"two_sided_shift","p":5}}"#,
            r#"{"kind":"divisible_trivial"}"#,
        ];
        for c in cases {
            let op = OperatorDesc::from_json_str(c).unwrap();
            let back = OperatorDesc::from_json_str(&op.to_json_value().to_string()).unwrap();
            assert_eq!(op, back, "{c}");
        }
    }
}
