//! Brute-force references on tiny instances: explicit element sets for finite
//! groups and dense truncations for sequence-space operators.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_bigint::{BigInt, BigUint};

use crate::duality::FiniteAbGroup;
use crate::error::{Error, Result};
use crate::fpla::{FpMat, Functional, SparseVec};
use crate::intlat::{FgEndo, IntMat, LatticeSub};
use crate::operators::OperatorDesc;

/// Largest group order the oracle will enumerate.
pub const MAX_ORDER: u64 = 512;
/// Largest truncation window for [`truncated_shift_probe`].
pub const MAX_WINDOW: usize = 64;

/// A finite abelian group with its elements listed in mixed-radix order.
#[derive(Clone, Debug)]
pub struct ExplicitGroup {
    group: FiniteAbGroup,
    elements: Vec<Vec<u64>>,
}

impl ExplicitGroup {
    pub fn new(group: &FiniteAbGroup) -> Result<Self> {
        if group.order() > MAX_ORDER {
            return Err(Error::OracleBound(format!("group order {} exceeds {MAX_ORDER}", group.order())));
        }
        Ok(ExplicitGroup { group: group.clone(), elements: group.elements() })
    }

    pub fn group(&self) -> &FiniteAbGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &[u64] {
        &self.elements[i]
    }

    pub fn index_of(&self, x: &[u64]) -> usize {
        x.iter().zip(self.group.factors()).fold(0, |acc, (&a, &d)| acc * d as usize + (a % d) as usize)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let s: Vec<u64> = self.elements[a].iter().zip(&self.elements[b]).map(|(x, y)| x + y).collect();
        self.index_of(&s)
    }

    /// Element set of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut seen: BTreeSet<usize> = BTreeSet::from([0]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.add(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// `x ↦ M x` with `(Mx)_i = Σ_j M_ij x_j mod d_i`.
    pub fn apply(&self, m: &[Vec<u64>], x: usize) -> usize {
        let x = &self.elements[x];
        let y: Vec<u64> = m
            .iter()
            .zip(self.group.factors())
            .map(|(row, &d)| row.iter().zip(x).fold(0u64, |acc, (&a, &b)| (acc + a % d * (b % d)) % d))
            .collect();
        self.index_of(&y)
    }
}

/// A subgroup found by enumeration: its elements and a generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitSubgroup {
    pub elements: BTreeSet<usize>,
    pub generators: Vec<Vec<u64>>,
}

/// Every subgroup of `g`, by closing the trivial subgroup under adjoining
/// one element at a time.
pub fn enumerate_subgroups(g: &FiniteAbGroup) -> Result<Vec<ExplicitSubgroup>> {
    let eg = ExplicitGroup::new(g)?;
    let mut found: Vec<ExplicitSubgroup> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let trivial = eg.closure(&[]);
    seen.insert(trivial.iter().copied().collect());
    found.push(ExplicitSubgroup { elements: trivial, generators: Vec::new() });
    let mut next = 0;
    while next < found.len() {
        let current = found[next].clone();
        next += 1;
        for x in 0..eg.order() {
            if current.elements.contains(&x) {
                continue;
            }
            let mut gens: Vec<usize> = current.generators.iter().map(|g| eg.index_of(g)).collect();
            gens.push(x);
            let closed = eg.closure(&gens);
            if seen.insert(closed.iter().copied().collect()) {
                let generators = gens.iter().map(|&i| eg.element(i).to_vec()).collect();
                found.push(ExplicitSubgroup { elements: closed, generators });
            }
        }
    }
    Ok(found)
}

/// Every compatible endomorphism matrix (entries `M_ij < d_i`,
/// `d_i | M_ij d_j`); when there are more than `cap`, an evenly spaced sample
/// of `cap` of them.
pub fn enumerate_endomorphisms(g: &FiniteAbGroup, cap: usize) -> Vec<Vec<Vec<u64>>> {
    let d = g.factors();
    let s = d.len();
    let choices: Vec<Vec<u64>> = (0..s * s)
        .map(|k| {
            let (i, j) = (k / s, k % s);
            (0..d[i]).filter(|&m| (m * d[j]).is_multiple_of(d[i])).collect()
        })
        .collect();
    let total: u128 = choices.iter().map(|c| c.len() as u128).product();
    let count = total.min(cap.max(1) as u128);
    let mut out = Vec::new();
    for sample in 0..count {
        let idx = sample * total / count;
        let mut rem = idx;
        let mut m = vec![vec![0u64; s]; s];
        for k in (0..s * s).rev() {
            let c = &choices[k];
            m[k / s][k % s] = c[(rem % c.len() as u128) as usize];
            rem /= c.len() as u128;
        }
        out.push(m);
    }
    out
}

/// Converts an explicit subgroup to the lattice representation.
pub fn to_lattice(g: &FiniteAbGroup, h: &ExplicitSubgroup) -> Result<LatticeSub> {
    let gens: Vec<Vec<BigInt>> = h.generators.iter().map(|x| x.iter().map(|&a| BigInt::from(a)).collect()).collect();
    LatticeSub::from_generators(&g.to_fg(), &gens)
}

/// Converts a matrix to an [`FgEndo`] on the group.
pub fn to_endo(g: &FiniteAbGroup, m: &[Vec<u64>]) -> Result<FgEndo> {
    let rows: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&a| BigInt::from(a)).collect()).collect();
    FgEndo::new(g.to_fg(), IntMat::from_rows(rows, m.len()))
}

/// Element set of `{x : M x ∈ s}`.
pub fn preimage_set(eg: &ExplicitGroup, m: &[Vec<u64>], s: &BTreeSet<usize>) -> BTreeSet<usize> {
    (0..eg.order()).filter(|&x| s.contains(&eg.apply(m, x))).collect()
}

/// `|C_n(φ, N)|` for `n = 1..=n_max`, intersecting preimage element sets literally.
pub fn brute_cotrajectory(g: &FiniteAbGroup, m: &[Vec<u64>], n_gens: &[Vec<u64>], n_max: usize) -> Result<Vec<u64>> {
    let eg = ExplicitGroup::new(g)?;
    let gens: Vec<usize> = n_gens.iter().map(|x| eg.index_of(x)).collect();
    let n = eg.closure(&gens);
    let mut out = Vec::with_capacity(n_max);
    let mut b = n.clone();
    for step in 0..n_max {
        if step > 0 {
            let pre = preimage_set(&eg, m, &b);
            b = n.intersection(&pre).copied().collect();
        }
        out.push(eg.order() as u64 / b.len() as u64);
    }
    Ok(out)
}

/// `|T_n(φ, F)|` for `n = 1..=n_max` by explicit closure.
pub fn brute_trajectory(g: &FiniteAbGroup, m: &[Vec<u64>], f_gens: &[Vec<u64>], n_max: usize) -> Result<Vec<u64>> {
    let eg = ExplicitGroup::new(g)?;
    let mut frontier: Vec<usize> = f_gens.iter().map(|x| eg.index_of(x)).collect();
    let mut all = Vec::new();
    let mut out = Vec::with_capacity(n_max);
    for step in 0..n_max {
        if step > 0 {
            frontier = frontier.iter().map(|&x| eg.apply(m, x)).collect();
        }
        all.extend(frontier.iter().copied());
        out.push(eg.closure(&all).len() as u64);
    }
    Ok(out)
}

/// `|C_n(φ, ker rows)|` computed in a dense window of `d` coordinates.
///
/// The window is `0..d` on `ℕ`-indexed spaces and `-(d/2)..d-d/2` on
/// `ℤ`-indexed ones. Every row and every pullback up to step `n_max` must be
/// supported inside the window; otherwise truncation would not commute with
/// the operator and the call fails.
pub fn truncated_shift_probe(op: &OperatorDesc, rows: &[Functional], d: usize, n_max: usize) -> Result<Vec<BigUint>> {
    if d == 0 || d > MAX_WINDOW {
        return Err(Error::OracleBound(format!("window {d} outside 1..={MAX_WINDOW}")));
    }
    let p = op.p().ok_or_else(|| Error::Unsupported(format!("{} is not a sequence-space operator", op.kind_name())))?;
    let tag = op.index_tag();
    let lo: i64 = match tag {
        crate::fpla::IndexTag::Nat => 0,
        crate::fpla::IndexTag::Int => -((d / 2) as i64),
    };
    let hi = lo + d as i64;
    let inside = |a: &SparseVec| a.iter().all(|(i, _)| (lo..hi).contains(&i));
    let mut frontier = rows.to_vec();
    for step in 0..n_max {
        if step > 0 {
            frontier = frontier.iter().map(|a| op.pullback(a)).collect::<Result<_>>()?;
        }
        if !frontier.iter().all(inside) {
            return Err(Error::OracleBound(format!("pullback at step {} leaves the window {lo}..{hi}", step + 1)));
        }
    }
    if op.finite_dim().is_some_and(|n| (hi as usize) > n) {
        return Err(Error::OracleBound("window exceeds the operator dimension".into()));
    }
    // T[i][j] = coefficient of e_{lo+i} in φ(e_{lo+j}).
    let mut t = FpMat::zeros(p, d, d);
    for j in 0..d {
        let img = op.apply(&SparseVec::unit(p, tag, lo + j as i64))?;
        for (i, x) in img.iter() {
            if (lo..hi).contains(&i) {
                t.set((i - lo) as usize, j, x);
            }
        }
    }
    let mut stacked: Vec<Vec<u32>> = rows.iter().map(|a| (lo..hi).map(|i| a.get(i)).collect()).collect();
    let mut current = stacked.clone();
    let mut out = Vec::with_capacity(n_max);
    for step in 0..n_max {
        if step > 0 {
            current = current.iter().map(|a| t.vec_mul(a)).collect();
            stacked.extend(current.iter().cloned());
        }
        let data: Vec<u32> = stacked.iter().flatten().copied().collect();
        let rank = FpMat::from_residues(p, stacked.len(), d, data).rank();
        out.push(BigUint::from(p).pow(rank as u32));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{cotrajectory_orders, CofiniteSubgroup};
    use crate::fpla::IndexTag;

    fn g(f: &[u64]) -> FiniteAbGroup {
        FiniteAbGroup::new(f).unwrap()
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(enumerate_subgroups(&g(&[5])).unwrap().len(), 2);
        assert_eq!(enumerate_subgroups(&g(&[2, 2])).unwrap().len(), 5);
        assert_eq!(enumerate_subgroups(&g(&[4, 2])).unwrap().len(), 8);
        assert_eq!(enumerate_subgroups(&g(&[2, 2, 2])).unwrap().len(), 16);
        assert_eq!(enumerate_subgroups(&g(&[8])).unwrap().len(), 4);
        assert!(matches!(enumerate_subgroups(&g(&[32, 32])), Err(Error::OracleBound(_))));
    }

    #[test]
    fn endomorphism_counts() {
        assert_eq!(enumerate_endomorphisms(&g(&[4, 2]), 1000).len(), 32);
        assert_eq!(enumerate_endomorphisms(&g(&[9, 3]), 1000).len(), 243);
        assert_eq!(enumerate_endomorphisms(&g(&[2, 2, 2]), 1000).len(), 512);
        assert_eq!(enumerate_endomorphisms(&g(&[2, 2, 2]), 100).len(), 100);
    }

    #[test]
    fn cotrajectory_examples() {
        let z8 = g(&[8]);
        // φ⁻¹⟨4⟩ = ⟨2⟩ ⊇ ⟨4⟩, so B_n = ⟨4⟩ for every n.
        assert_eq!(brute_cotrajectory(&z8, &[vec![2]], &[vec![4]], 4).unwrap(), vec![4, 4, 4, 4]);
        assert_eq!(brute_cotrajectory(&z8, &[vec![1]], &[vec![2]], 3).unwrap(), vec![2, 2, 2]);
        // (x, y) ↦ (y, 0) on Z/2 ⊕ Z/2 with N = {(0, *)}: B_2 = N ∩ {(x, 0)} = 0.
        let g22 = g(&[2, 2]);
        assert_eq!(brute_cotrajectory(&g22, &[vec![0, 1], vec![0, 0]], &[vec![0, 1]], 3).unwrap(), vec![2, 4, 4]);
    }

    #[test]
    fn trajectory_example() {
        let g22 = g(&[2, 2]);
        assert_eq!(brute_trajectory(&g22, &[vec![0, 0], vec![1, 0]], &[vec![1, 0]], 3).unwrap(), vec![2, 4, 4]);
    }

    #[test]
    fn truncated_probe_examples() {
        let e0 = vec![SparseVec::unit(2, IndexTag::Nat, 0)];
        let left = truncated_shift_probe(&OperatorDesc::left_shift(2), &e0, 16, 8).unwrap();
        assert_eq!(left, (1..=8).map(|k| BigUint::from(1u32 << k)).collect::<Vec<_>>());
        let right = truncated_shift_probe(&OperatorDesc::right_shift(2), &e0, 8, 6).unwrap();
        assert_eq!(right, vec![BigUint::from(2u32); 6]);
        assert!(matches!(
            truncated_shift_probe(&OperatorDesc::left_shift(2), &e0, 4, 8),
            Err(Error::OracleBound(_))
        ));
        let op = OperatorDesc::two_sided_shift(3);
        let rows = vec![SparseVec::unit(3, IndexTag::Int, 0)];
        let probe = truncated_shift_probe(&op, &rows, 20, 6).unwrap();
        assert_eq!(probe, cotrajectory_orders(&op, &CofiniteSubgroup::FpKernel(rows), 6).unwrap());
    }
}
