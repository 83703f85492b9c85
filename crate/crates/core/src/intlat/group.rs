use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::mat::{hnf_rows, snf_full, IntMat};
use crate::error::{Error, Result};
use crate::fpla::{check_prime, FpMat};

/// A finitely generated abelian group presented as `ℤ^r ⊕ ℤ/d_1 ⊕ … ⊕ ℤ/d_s`.
///
/// The moduli are kept in the order given (so `ℤ/4 ⊕ ℤ/2` stays as written);
/// [`FgGroup::invariant_factors`] recovers the canonical divisibility chain.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FgGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl fmt::Debug for FgGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl FgGroup {
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self> {
        if let Some(d) = torsion.iter().find(|d| **d < BigInt::from(2)) {
            return Err(Error::InvalidSubgroup(format!("torsion modulus {d} must be at least 2")));
        }
        Ok(FgGroup { free_rank, torsion })
    }

    pub fn from_u64(free_rank: usize, torsion: &[u64]) -> Result<Self> {
        Self::new(free_rank, torsion.iter().map(|&d| BigInt::from(d)).collect())
    }

    /// `ℤ^r`
    pub fn free(r: usize) -> Self {
        FgGroup { free_rank: r, torsion: vec![] }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    /// Number of coordinates of the presentation lattice.
    pub fn dim(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    /// Modulus of coordinate `i`: 0 for free coordinates.
    pub fn modulus(&self, i: usize) -> BigInt {
        if i < self.free_rank {
            BigInt::zero()
        } else {
            self.torsion[i - self.free_rank].clone()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.iter().product())
    }

    /// Canonical invariant factors `d_1 | d_2 | …` (each at least 2).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let d = snf_full(&IntMat::from_rows(self.relation_rows_torsion(), self.torsion.len())).d;
        d.into_iter().filter(|x| *x > BigInt::one()).collect()
    }

    fn relation_rows_torsion(&self) -> Vec<Vec<BigInt>> {
        let s = self.torsion.len();
        (0..s)
            .map(|i| {
                let mut row = vec![BigInt::zero(); s];
                row[i] = self.torsion[i].clone();
                row
            })
            .collect()
    }

    /// Generators `d_i e_{r+i}` of the relation lattice.
    pub fn relation_rows(&self) -> Vec<Vec<BigInt>> {
        let k = self.dim();
        (0..self.torsion.len())
            .map(|i| {
                let mut row = vec![BigInt::zero(); k];
                row[self.free_rank + i] = self.torsion[i].clone();
                row
            })
            .collect()
    }

    /// Reduces torsion coordinates into `[0, d_i)`.
    pub fn normalize(&self, x: &[BigInt]) -> Vec<BigInt> {
        x.iter().enumerate().map(|(i, v)| if i < self.free_rank { v.clone() } else { v.mod_floor(&self.modulus(i)) }).collect()
    }

    /// Dimension of `G/pG` over F_p.
    pub fn mod_p_dim(&self, p: u32) -> usize {
        let p = BigInt::from(p);
        self.free_rank + self.torsion.iter().filter(|d| (*d % &p).is_zero()).count()
    }
}

/// A subgroup of an [`FgGroup`], stored as the lattice `L ⊆ ℤ^k` with
/// `R ⊆ L`, where `R` is the relation lattice. Rows hold the HNF basis.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSub {
    ambient: FgGroup,
    basis: Vec<Vec<BigInt>>,
}

impl fmt::Debug for LatticeSub {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self.basis.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        write!(f, "LatticeSub({:?}, {:?})", self.ambient, rows)
    }
}

impl LatticeSub {
    /// Subgroup generated by `gens` (each a coordinate vector of length `k`).
    pub fn from_generators(ambient: &FgGroup, gens: &[Vec<BigInt>]) -> Result<Self> {
        let k = ambient.dim();
        if gens.iter().any(|g| g.len() != k) {
            return Err(Error::Dimension(format!("generator length must be {k}")));
        }
        let mut rows = gens.to_vec();
        rows.extend(ambient.relation_rows());
        Ok(LatticeSub { ambient: ambient.clone(), basis: hnf_rows(&rows, k) })
    }

    pub fn from_i64(ambient: &FgGroup, gens: &[Vec<i64>]) -> Result<Self> {
        let g: Vec<Vec<BigInt>> = gens.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_generators(ambient, &g)
    }

    pub fn whole(ambient: &FgGroup) -> Self {
        LatticeSub { ambient: ambient.clone(), basis: IntMat::identity(ambient.dim()).into_rows() }
    }

    pub fn trivial(ambient: &FgGroup) -> Self {
        Self::from_generators(ambient, &[]).expect("empty generator list")
    }

    /// `m G` (the image of multiplication by `m`).
    pub fn multiples(ambient: &FgGroup, m: i64) -> Self {
        let k = ambient.dim();
        let gens: Vec<Vec<BigInt>> = (0..k)
            .map(|i| {
                let mut r = vec![BigInt::zero(); k];
                r[i] = BigInt::from(m);
                r
            })
            .collect();
        Self::from_generators(ambient, &gens).expect("well-formed generators")
    }

    pub fn ambient(&self) -> &FgGroup {
        &self.ambient
    }

    /// HNF basis rows (canonical).
    pub fn basis_rows(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// HNF basis as columns of an integer matrix.
    pub fn basis_columns(&self) -> IntMat {
        IntMat::from_rows(self.basis.clone(), self.ambient.dim()).transpose()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// `[G : N]`, or `None` when the index is infinite.
    pub fn index(&self) -> Option<BigInt> {
        if self.basis.len() < self.ambient.dim() {
            return None;
        }
        Some(self.basis.iter().enumerate().map(|(i, r)| r[i].clone()).product())
    }

    pub fn has_finite_index(&self) -> bool {
        self.basis.len() == self.ambient.dim()
    }

    /// Order of the subgroup when it is finite.
    pub fn order(&self) -> Option<BigInt> {
        let g = self.ambient.order()?;
        Some(g / self.index()?)
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        let mut x = x.to_vec();
        for row in &self.basis {
            let c = row.iter().position(|v| !v.is_zero()).expect("nonzero HNF row");
            if x[..c].iter().any(|v| !v.is_zero()) {
                return false;
            }
            let (q, r) = x[c].div_rem(&row[c]);
            if !r.is_zero() {
                return false;
            }
            for (a, b) in x.iter_mut().zip(row) {
                *a -= &q * b;
            }
        }
        x.iter().all(Zero::is_zero)
    }

    pub fn contains_sub(&self, other: &LatticeSub) -> bool {
        other.basis.iter().all(|r| self.contains(r))
    }

    /// Lattice intersection, computed from the kernel of `[A A; B 0]`.
    pub fn intersect(&self, other: &LatticeSub) -> Result<LatticeSub> {
        self.same_ambient(other)?;
        let k = self.ambient.dim();
        let mut stacked = Vec::new();
        for a in &self.basis {
            stacked.push(a.iter().chain(a.iter()).cloned().collect::<Vec<_>>());
        }
        for b in &other.basis {
            stacked.push(b.iter().cloned().chain(std::iter::repeat_n(BigInt::zero(), k)).collect());
        }
        Ok(LatticeSub { ambient: self.ambient.clone(), basis: lower_block(&stacked, k) })
    }

    /// Subgroup sum `N + M`.
    pub fn sum(&self, other: &LatticeSub) -> Result<LatticeSub> {
        self.same_ambient(other)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Ok(LatticeSub { ambient: self.ambient.clone(), basis: hnf_rows(&rows, self.ambient.dim()) })
    }

    fn same_ambient(&self, other: &LatticeSub) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::InvalidSubgroup("subgroups of different groups".into()));
        }
        Ok(())
    }
}

/// HNF of `rows` (width `2k`) and return the second block of the rows whose
/// first block vanishes, i.e. a basis of `{y : (0, y) ∈ lattice}`.
fn lower_block(rows: &[Vec<BigInt>], k: usize) -> Vec<Vec<BigInt>> {
    hnf_rows(rows, 2 * k)
        .into_iter()
        .filter(|r| r[..k].iter().all(Zero::is_zero))
        .map(|r| r[k..].to_vec())
        .collect()
}

/// Endomorphism of an [`FgGroup`] acting on coordinate columns: `x ↦ M x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FgEndo {
    group: FgGroup,
    matrix: IntMat,
}

impl FgEndo {
    /// Validates the compatibility condition `d_i | M_ij d_j` (with `d = 0` on
    /// free coordinates, so torsion never maps into free coordinates).
    pub fn new(group: FgGroup, matrix: IntMat) -> Result<Self> {
        let k = group.dim();
        if matrix.rows() != k || matrix.cols() != k {
            return Err(Error::Dimension(format!("endomorphism matrix must be {k}x{k}")));
        }
        for i in 0..k {
            for j in 0..k {
                let lhs = matrix.get(i, j) * group.modulus(j);
                let di = group.modulus(i);
                let ok = if di.is_zero() { lhs.is_zero() } else { (&lhs % &di).is_zero() };
                if !ok {
                    return Err(Error::Incompatible(format!(
                        "entry ({i},{j}) = {}: {} does not divide {}·{}",
                        matrix.get(i, j),
                        di,
                        matrix.get(i, j),
                        group.modulus(j)
                    )));
                }
            }
        }
        Ok(FgEndo { group, matrix })
    }

    pub fn identity(group: &FgGroup) -> Self {
        FgEndo { group: group.clone(), matrix: IntMat::identity(group.dim()) }
    }

    /// Multiplication by `m`.
    pub fn multiplication(group: &FgGroup, m: i64) -> Self {
        let k = group.dim();
        FgEndo { group: group.clone(), matrix: IntMat::diag(&vec![m; k]) }
    }

    pub fn group(&self) -> &FgGroup {
        &self.group
    }

    pub fn matrix(&self) -> &IntMat {
        &self.matrix
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.group.normalize(&self.matrix.mul_vec(x))
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &FgEndo) -> Result<FgEndo> {
        if self.group != other.group {
            return Err(Error::Dimension("composition across different groups".into()));
        }
        Ok(FgEndo { group: self.group.clone(), matrix: self.matrix.mul(&other.matrix)? })
    }

    pub fn pow(&self, k: u32) -> FgEndo {
        (0..k).fold(FgEndo::identity(&self.group), |acc, _| acc.compose(self).expect("same group"))
    }

    /// Whether `φ(H) ⊆ H`.
    pub fn is_invariant(&self, h: &LatticeSub) -> bool {
        h.basis_rows().iter().all(|r| h.contains(&self.matrix.mul_vec(r)))
    }

    /// Image subgroup `φ(H)`.
    pub fn image(&self, h: &LatticeSub) -> LatticeSub {
        let gens: Vec<Vec<BigInt>> = h.basis_rows().iter().map(|r| self.matrix.mul_vec(r)).collect();
        LatticeSub::from_generators(&self.group, &gens).expect("same ambient")
    }

    /// `φ⁻¹ N = {x : M x ∈ N}`, from the kernel of `[Mᵀ I; B 0]`.
    pub fn preimage(&self, n: &LatticeSub) -> Result<LatticeSub> {
        if n.ambient() != &self.group {
            return Err(Error::InvalidSubgroup("subgroup of a different group".into()));
        }
        let k = self.group.dim();
        let mut stacked = Vec::with_capacity(k + n.rank());
        for i in 0..k {
            let mut row: Vec<BigInt> = (0..k).map(|r| self.matrix.get(r, i).clone()).collect();
            row.extend((0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            stacked.push(row);
        }
        for b in n.basis_rows() {
            stacked.push(b.iter().cloned().chain(std::iter::repeat_n(BigInt::zero(), k)).collect());
        }
        Ok(LatticeSub { ambient: self.group.clone(), basis: lower_block(&stacked, k) })
    }

    /// Induced endomorphism on `G/H` for a φ-invariant `H`, together with the
    /// coordinate projection `G → G/H`.
    pub fn quotient(&self, h: &LatticeSub) -> Result<(FgEndo, QuotientMap)> {
        if !self.is_invariant(h) {
            return Err(Error::InvalidSubgroup("quotient by a non-invariant subgroup".into()));
        }
        let k = self.group.dim();
        let b = IntMat::from_rows(h.basis_rows().to_vec(), k);
        let s = snf_full(&b);
        // y = x V puts the relations of G/H on the diagonal.
        let mut d: Vec<BigInt> = s.d.clone();
        d.resize(k, BigInt::zero());
        let free: Vec<usize> = (0..k).filter(|&i| d[i].is_zero()).collect();
        let tors: Vec<usize> = (0..k).filter(|&i| d[i] > BigInt::one()).collect();
        let keep: Vec<usize> = free.iter().chain(&tors).copied().collect();
        let group = FgGroup::new(free.len(), tors.iter().map(|&i| d[i].clone()).collect())?;
        // column action in y coordinates: Vᵀ M V⁻ᵀ
        let full = s.v.transpose().mul(&self.matrix)?.mul(&s.v_inv.transpose())?;
        let mut m = IntMat::zeros(keep.len(), keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (bb, &j) in keep.iter().enumerate() {
                let v = full.get(i, j).clone();
                let md = group.modulus(a);
                m.set(a, bb, if md.is_zero() { v } else { v.mod_floor(&md) });
            }
        }
        let endo = FgEndo::new(group.clone(), m)?;
        Ok((endo, QuotientMap { v: s.v, keep, target: group }))
    }
}

/// Coordinate projection `G → G/H` produced by [`FgEndo::quotient`].
#[derive(Clone, Debug)]
pub struct QuotientMap {
    v: IntMat,
    keep: Vec<usize>,
    target: FgGroup,
}

impl QuotientMap {
    pub fn target(&self) -> &FgGroup {
        &self.target
    }

    pub fn project(&self, x: &[BigInt]) -> Vec<BigInt> {
        // row vector x V
        let y = self.v.transpose().mul_vec(x);
        self.target.normalize(&self.keep.iter().map(|&i| y[i].clone()).collect::<Vec<_>>())
    }

    /// Image of a subgroup of `G` in `G/H`.
    pub fn project_sub(&self, n: &LatticeSub) -> LatticeSub {
        let gens: Vec<Vec<BigInt>> = n.basis_rows().iter().map(|r| self.project(r)).collect();
        LatticeSub::from_generators(&self.target, &gens).expect("projected generators")
    }
}

/// Matrix of the induced map on `G/pG ≅ F_p^k`.
///
/// Surviving coordinates are the free ones and the torsion ones with `p | d_i`.
pub fn reduce_mod_p(phi: &FgEndo, p: u64) -> Result<FpMat> {
    let p = check_prime(p)?;
    let g = phi.group();
    let pb = BigInt::from(p);
    let keep: Vec<usize> = (0..g.dim()).filter(|&i| i < g.free_rank() || (g.modulus(i) % &pb).is_zero()).collect();
    let mut m = FpMat::zeros(p, keep.len(), keep.len());
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            let v = phi.matrix().get(i, j).mod_floor(&pb).to_u32().expect("residue fits");
            m.set(a, b, v);
        }
    }
    Ok(m)
}

/// Group descriptors accepted by [`narrow_test`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupDescriptor {
    FinitelyGenerated { free_rank: usize, torsion: Vec<u64> },
    Divisible,
    /// `F_p^(ℕ)` or `F_p^(ℤ)`: infinite direct sum of copies of `ℤ/p`.
    SequenceSpace { p: u64 },
    Other { description: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NarrowVerdict {
    pub narrow: bool,
    pub reason: String,
}

/// Decides narrowness by whether `G/pG` is finite for every prime `p`.
pub fn narrow_test(g: &GroupDescriptor) -> Result<NarrowVerdict> {
    match g {
        GroupDescriptor::FinitelyGenerated { free_rank, torsion } => {
            FgGroup::from_u64(*free_rank, torsion)?;
            Ok(NarrowVerdict {
                narrow: true,
                reason: format!("finitely generated: G/pG has rank at most {} for every prime p", free_rank + torsion.len()),
            })
        }
        GroupDescriptor::Divisible => Ok(NarrowVerdict { narrow: true, reason: "divisible: G/pG = 0 for every prime p".into() }),
        GroupDescriptor::SequenceSpace { p } => {
            check_prime(*p)?;
            Ok(NarrowVerdict { narrow: false, reason: format!("G/{p}G = G is an infinite elementary {p}-group") })
        }
        GroupDescriptor::Other { description } => Err(Error::Undecidable(description.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn index_examples() {
        let z2 = FgGroup::free(2);
        assert_eq!(LatticeSub::whole(&z2).index(), Some(BigInt::one()));
        let n = LatticeSub::from_i64(&z2, &[vec![2, 0], vec![0, 3]]).unwrap();
        assert_eq!(n.index(), Some(BigInt::from(6)));

        let g = FgGroup::from_u64(0, &[4, 2]).unwrap();
        let n = LatticeSub::from_i64(&g, &[vec![2, 0], vec![0, 1]]).unwrap();
        assert_eq!(n.index(), Some(BigInt::from(2)));
        // brute force: 4 of the 8 elements lie in N
        let members = (0..4).flat_map(|a| (0..2).map(move |b| v(&[a, b]))).filter(|x| n.contains(x)).count();
        assert_eq!(members, 4);

        assert_eq!(LatticeSub::from_i64(&z2, &[vec![1, 1]]).unwrap().index(), None);
    }

    #[test]
    fn preimage_examples() {
        let z = FgGroup::free(1);
        let n3 = LatticeSub::multiples(&z, 3);
        assert_eq!(FgEndo::identity(&z).preimage(&n3).unwrap(), n3);
        assert_eq!(FgEndo::multiplication(&z, 2).preimage(&n3).unwrap(), n3);

        let z2 = FgGroup::free(2);
        let shear = FgEndo::new(z2.clone(), IntMat::from_i64(&[vec![1, 1], vec![0, 1]]).unwrap()).unwrap();
        let two = LatticeSub::multiples(&z2, 2);
        let pre = shear.preimage(&two).unwrap();
        assert_eq!(pre, two);
        for a in 0..4 {
            for b in 0..4 {
                let x = v(&[a, b]);
                assert_eq!(pre.contains(&x), two.contains(&shear.apply(&x)));
            }
        }
    }

    #[test]
    fn intersection_examples() {
        let z = FgGroup::free(1);
        let six = LatticeSub::multiples(&z, 2).intersect(&LatticeSub::multiples(&z, 3)).unwrap();
        assert_eq!(six, LatticeSub::multiples(&z, 6));
        assert_eq!(six.intersect(&LatticeSub::whole(&z)).unwrap(), six);

        let z2 = FgGroup::free(2);
        let a = LatticeSub::multiples(&z2, 2);
        let b = LatticeSub::from_i64(&z2, &[vec![1, 1], vec![0, 2]]).unwrap();
        let c = a.intersect(&b).unwrap();
        assert_eq!(c.index(), Some(BigInt::from(4)));
        for x in 0..4 {
            for y in 0..4 {
                let e = v(&[x, y]);
                assert_eq!(c.contains(&e), a.contains(&e) && b.contains(&e));
            }
        }
    }

    #[test]
    fn compatibility() {
        let g = FgGroup::from_u64(0, &[4, 2]).unwrap();
        assert!(FgEndo::new(g.clone(), IntMat::from_i64(&[vec![0, 1], vec![0, 0]]).unwrap()).is_err());
        assert!(FgEndo::new(g.clone(), IntMat::from_i64(&[vec![1, 2], vec![0, 1]]).unwrap()).is_ok());
        // torsion cannot land in a free coordinate
        let h = FgGroup::from_u64(1, &[3]).unwrap();
        assert!(FgEndo::new(h.clone(), IntMat::from_i64(&[vec![1, 1], vec![0, 1]]).unwrap()).is_err());
        assert!(FgEndo::new(h, IntMat::from_i64(&[vec![1, 0], vec![1, 1]]).unwrap()).is_ok());
    }

    #[test]
    fn reduction_mod_p() {
        let z = FgGroup::free(1);
        assert!(reduce_mod_p(&FgEndo::multiplication(&z, 5), 5).unwrap().is_zero());
        let g = FgGroup::from_u64(2, &[3, 5]).unwrap();
        assert_eq!(reduce_mod_p(&FgEndo::identity(&g), 3).unwrap(), FpMat::identity(3, 3));
        let h = FgGroup::from_u64(0, &[4, 2]).unwrap();
        let phi = FgEndo::new(h, IntMat::from_i64(&[vec![1, 2], vec![0, 1]]).unwrap()).unwrap();
        let m = reduce_mod_p(&phi, 2).unwrap();
        assert_eq!(m, FpMat::from_rows(2, &[vec![1, 0], vec![0, 1]]).unwrap());
    }

    #[test]
    fn invariant_factors_of_presentation() {
        let g = FgGroup::from_u64(0, &[4, 6]).unwrap();
        assert_eq!(g.invariant_factors(), v(&[2, 12]));
    }

    #[test]
    fn narrow() {
        let fg = narrow_test(&GroupDescriptor::FinitelyGenerated { free_rank: 2, torsion: vec![] }).unwrap();
        assert!(fg.narrow);
        assert!(narrow_test(&GroupDescriptor::Divisible).unwrap().narrow);
        assert!(!narrow_test(&GroupDescriptor::SequenceSpace { p: 2 }).unwrap().narrow);
        assert!(matches!(
            narrow_test(&GroupDescriptor::Other { description: "Q^N".into() }),
            Err(Error::Undecidable(_))
        ));
    }

    #[test]
    fn quotient_by_invariant_subgroup() {
        // G = Z/8, φ = ·3, H = <4>; G/H = Z/4 with induced ·3.
        let g = FgGroup::from_u64(0, &[8]).unwrap();
        let phi = FgEndo::multiplication(&g, 3);
        let h = LatticeSub::from_i64(&g, &[vec![4]]).unwrap();
        let (q, map) = phi.quotient(&h).unwrap();
        assert_eq!(q.group().order(), Some(BigInt::from(4)));
        for x in 0..8 {
            let img = map.project(&phi.apply(&v(&[x])));
            assert_eq!(img, q.apply(&map.project(&v(&[x]))));
        }
    }
}
