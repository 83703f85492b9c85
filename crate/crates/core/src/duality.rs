//! Pontryagin duality for finite abelian groups and for the sequence-space
//! operators.
//!
//! A finite group `⊕ ℤ/d_i` is identified with its dual through the pairing
//! `⟨x, y⟩ = Σ x_i y_i / d_i mod 1`. Under this identification annihilators
//! and adjoints are explicit subgroups and matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::engine::{cotrajectory_orders, trajectory_orders_with, CofiniteSubgroup};
use crate::error::{Error, Result};
use crate::fpla::{FpMat, FpVec, Functional, SparseVec};
use crate::intlat::{hnf_rows, FgEndo, FgGroup, IntMat, LatticeSub};
use crate::operators::{merge_direct, split_direct, OperatorDesc};

/// `⊕ ℤ/d_i` with explicit moduli.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbGroup {
    factors: Vec<u64>,
}

impl FiniteAbGroup {
    pub fn new(factors: &[u64]) -> Result<Self> {
        if factors.iter().any(|&d| d < 2) {
            return Err(Error::InvalidSubgroup("cyclic factors must have order at least 2".into()));
        }
        Ok(FiniteAbGroup { factors: factors.to_vec() })
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    /// Least common multiple of the factors.
    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1, |a, &d| a.lcm(&d))
    }

    pub fn to_fg(&self) -> FgGroup {
        FgGroup::from_u64(0, &self.factors).expect("factors checked at construction")
    }

    pub fn from_fg(g: &FgGroup) -> Result<Self> {
        if g.free_rank() > 0 {
            return Err(Error::Unsupported("group has a free part".into()));
        }
        let factors: Option<Vec<u64>> = g.torsion().iter().map(ToPrimitive::to_u64).collect();
        Self::new(&factors.ok_or_else(|| Error::Unsupported("factor exceeds 64 bits".into()))?)
    }

    /// Every element as a coordinate tuple, in lexicographic order.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &d in &self.factors {
            out = out.into_iter().flat_map(|x| (0..d).map(move |a| [x.clone(), vec![a]].concat())).collect();
        }
        out
    }

    /// `⟨x, y⟩` as a reduced fraction `(num, den)` in `[0, 1)`.
    pub fn pairing(&self, x: &[u64], y: &[u64]) -> (u64, u64) {
        let l = self.exponent() as u128;
        let mut num = 0u128;
        for ((&a, &b), &d) in x.iter().zip(y).zip(&self.factors) {
            num = (num + (a as u128 % d as u128) * (b as u128 % d as u128) % d as u128 * (l / d as u128)) % l;
        }
        let g = num.gcd(&l);
        ((num / g) as u64, (l / g) as u64)
    }
}

/// `H⊥ = {y : ⟨h, y⟩ = 0 for all h ∈ H}` for a subgroup of a finite group.
///
/// With `L` the exponent, `y ∈ H⊥` iff `Σ_i h_i (L/d_i) y_i ≡ 0 mod L` for
/// every generator `h`, so `H⊥` is the kernel of an integer map modulo `L`,
/// read off a Hermite form.
pub fn annihilator(h: &LatticeSub) -> Result<LatticeSub> {
    let g = FiniteAbGroup::from_fg(h.ambient())?;
    let s = g.factors.len();
    let l = BigInt::from(g.exponent());
    let gens = h.basis_rows();
    let m = gens.len();
    let mut rows = Vec::with_capacity(s + m);
    for i in 0..s {
        let scale = &l / BigInt::from(g.factors[i]);
        let mut row: Vec<BigInt> = gens.iter().map(|hv| &hv[i] * &scale).collect();
        row.extend((0..s).map(|j| BigInt::from((i == j) as u8)));
        rows.push(row);
    }
    for r in 0..m {
        let mut row = vec![BigInt::zero(); m + s];
        row[r] = l.clone();
        rows.push(row);
    }
    let kernel: Vec<Vec<BigInt>> = hnf_rows(&rows, m + s)
        .into_iter()
        .filter(|r| r[..m].iter().all(Zero::is_zero))
        .map(|r| r[m..].to_vec())
        .collect();
    LatticeSub::from_generators(h.ambient(), &kernel)
}

/// The adjoint `φ*` with `⟨φx, y⟩ = ⟨x, φ*y⟩`: `M*_ji = M_ij d_j / d_i mod d_j`.
pub fn adjoint(phi: &FgEndo) -> Result<FgEndo> {
    let g = FiniteAbGroup::from_fg(phi.group())?;
    let s = g.factors.len();
    let mut m = IntMat::zeros(s, s);
    for i in 0..s {
        for j in 0..s {
            let di = BigInt::from(g.factors[i]);
            let dj = BigInt::from(g.factors[j]);
            let num = phi.matrix().get(i, j) * &dj;
            if !(&num % &di).is_zero() {
                return Err(Error::Incompatible(format!("entry ({i},{j}) violates the compatibility condition")));
            }
            m.set(j, i, (num / di).mod_floor(&dj));
        }
    }
    FgEndo::new(phi.group().clone(), m)
}

/// `φ⁻ⁿ H` by repeated preimages.
pub fn preimage_iter(phi: &FgEndo, h: &LatticeSub, n: u32) -> Result<LatticeSub> {
    (0..n).try_fold(h.clone(), |acc, _| phi.preimage(&acc))
}

/// `φⁿ H` by repeated images.
pub fn image_iter(phi: &FgEndo, h: &LatticeSub, n: u32) -> LatticeSub {
    (0..n).fold(h.clone(), |acc, _| phi.image(&acc))
}

/// Outcome of [`check_perp_identity`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerpCheck {
    /// `(φ⁻ⁿH)⊥ = (φ*)ⁿ H⊥`.
    pub identity: bool,
    /// `H` is φ-invariant iff `H⊥` is φ*-invariant.
    pub invariance: bool,
}

impl PerpCheck {
    pub fn holds(&self) -> bool {
        self.identity && self.invariance
    }
}

pub fn check_perp_identity(phi: &FgEndo, h: &LatticeSub, n: u32) -> Result<PerpCheck> {
    let adj = adjoint(phi)?;
    let h_perp = annihilator(h)?;
    let lhs = annihilator(&preimage_iter(phi, h, n)?)?;
    let rhs = image_iter(&adj, &h_perp, n);
    Ok(PerpCheck { identity: lhs == rhs, invariance: phi.is_invariant(h) == adj.is_invariant(&h_perp) })
}

/// The dual of a Bernoulli shift, as the shift acting on functionals.
pub fn dual_of_shift(op: &OperatorDesc) -> Result<OperatorDesc> {
    match op {
        OperatorDesc::RightShift { p } => Ok(OperatorDesc::LeftShift { p: *p }),
        OperatorDesc::LeftShift { p } => Ok(OperatorDesc::RightShift { p: *p }),
        OperatorDesc::TwoSidedShift { p, inverse } => Ok(OperatorDesc::TwoSidedShift { p: *p, inverse: !inverse }),
        other => Err(Error::Unsupported(format!("{} is not a shift", other.kind_name()))),
    }
}

type Action = Box<dyn Fn(&FpVec) -> Result<FpVec>>;

/// The dual action `a ↦ a ∘ φ` on finitely supported functionals, built from
/// the structure of the description rather than from
/// [`OperatorDesc::pullback`].
pub fn dual_action(op: &OperatorDesc) -> Result<Action> {
    match op {
        OperatorDesc::RightShift { .. } | OperatorDesc::LeftShift { .. } | OperatorDesc::TwoSidedShift { .. } => {
            let dual = dual_of_shift(op)?;
            Ok(Box::new(move |a| dual.apply(a)))
        }
        OperatorDesc::FiniteDim(m) => {
            let t = m.transpose();
            Ok(Box::new(move |a| {
                let dense = window(a, t.cols())?;
                Ok(SparseVec::from_dense(t.p(), &t.mul_vec(&dense)).with_tag(a.tag()))
            }))
        }
        OperatorDesc::BlockDiag { p, .. } => {
            let op = op.clone();
            let p = *p;
            Ok(Box::new(move |a| {
                let mut out = SparseVec::zero(p, a.tag());
                let mut blocks: Vec<usize> = Vec::new();
                let mut n = 0usize;
                let hi = a.max_index().unwrap_or(-1);
                loop {
                    let (start, _) = op.block_span(n).expect("block operator");
                    if start > hi {
                        break;
                    }
                    blocks.push(n);
                    n += 1;
                }
                for n in blocks {
                    let (start, f) = op.block_span(n).expect("block operator");
                    let d = f.degree().expect("nonzero block");
                    let local: Vec<u32> = (0..d).map(|i| a.get(start + i as i64)).collect();
                    if local.iter().all(|&x| x == 0) {
                        continue;
                    }
                    let comp = FpMat::companion(p, f.coeffs());
                    let img = comp.vec_mul(&local);
                    for (i, x) in img.into_iter().enumerate() {
                        if x != 0 {
                            out.set(start + i as i64, x);
                        }
                    }
                }
                Ok(out)
            }))
        }
        OperatorDesc::DirectSum(parts) => {
            let k = parts.len();
            let p = op.p().ok_or(Error::Unsupported("direct sum without a prime".into()))?;
            let acts: Vec<Action> = parts.iter().map(dual_action).collect::<Result<_>>()?;
            Ok(Box::new(move |a| {
                let locals = split_direct(a, k);
                let imgs: Vec<FpVec> = acts.iter().zip(&locals).map(|(f, v)| f(v)).collect::<Result<_>>()?;
                Ok(merge_direct(p, a.tag(), &imgs))
            }))
        }
        OperatorDesc::PolyOf(f, inner) => {
            let inner = dual_action(inner)?;
            let f = f.clone();
            Ok(Box::new(move |a| {
                // Horner on the dual operator: f(φ)* = f(φ*).
                let mut acc = SparseVec::zero(a.p(), a.tag());
                for &c in f.coeffs().iter().rev() {
                    acc = inner(&acc)?;
                    acc.axpy(c, a);
                }
                Ok(acc)
            }))
        }
        OperatorDesc::Power(k, inner) => {
            let inner = dual_action(inner)?;
            let k = *k;
            Ok(Box::new(move |a| (0..k).try_fold(a.clone(), |acc, _| inner(&acc))))
        }
        other => Err(Error::Unsupported(format!("{} has no sequence-space dual", other.kind_name()))),
    }
}

fn window(a: &FpVec, n: usize) -> Result<Vec<u32>> {
    if a.min_index().is_some_and(|i| i < 0) || a.max_index().is_some_and(|i| i as usize >= n) {
        return Err(Error::Dimension(format!("functional support outside 0..{n}")));
    }
    Ok(a.to_dense(n))
}

/// Per-step log orders of both sides of the duality identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityComparison {
    pub cotrajectory: Vec<u64>,
    pub dual_trajectory: Vec<u64>,
}

impl DualityComparison {
    pub fn agrees(&self) -> bool {
        self.cotrajectory == self.dual_trajectory
    }
}

/// `log_p |C_n(φ, ker rows)|` against `log_p |T_n(φ*, span rows)|` for `n ≤ n_max`.
pub fn compare_duality(op: &OperatorDesc, rows: &[Functional], n_max: usize) -> Result<DualityComparison> {
    if rows.is_empty() {
        return Err(Error::InvalidSubgroup("duality check needs at least one functional".into()));
    }
    let p = op.p().ok_or_else(|| Error::Unsupported(format!("{} is not a sequence-space operator", op.kind_name())))?;
    let cot = cotrajectory_orders(op, &CofiniteSubgroup::FpKernel(rows.to_vec()), n_max)?;
    let act = dual_action(op)?;
    let traj = trajectory_orders_with(p, act.as_ref(), rows, n_max)?;
    let logs = |v: Vec<num_bigint::BigUint>| -> Vec<u64> {
        v.iter().map(|c| crate::engine::log_p_exact(c, p).expect("orders are powers of p")).collect()
    };
    Ok(DualityComparison { cotrajectory: logs(cot), dual_trajectory: logs(traj) })
}

pub fn check_duality_theorem(op: &OperatorDesc, rows: &[Functional], n_max: usize) -> Result<bool> {
    compare_duality(op, rows, n_max).map(|c| c.agrees())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpla::{FpPoly, IndexTag};
    use crate::operators::RepeatRule;

    fn elems(h: &LatticeSub) -> Vec<Vec<u64>> {
        let g = FiniteAbGroup::from_fg(h.ambient()).unwrap();
        g.elements()
            .into_iter()
            .filter(|x| h.contains(&x.iter().map(|&a| BigInt::from(a)).collect::<Vec<_>>()))
            .collect()
    }

    #[test]
    fn pairing_values() {
        let g = FiniteAbGroup::new(&[4, 2]).unwrap();
        assert_eq!(g.pairing(&[1, 1], &[1, 1]), (3, 4));
        assert_eq!(g.pairing(&[2, 0], &[2, 1]), (0, 1));
        assert_eq!(g.exponent(), 4);
        assert_eq!(g.elements().len(), 8);
    }

    #[test]
    fn annihilator_examples() {
        let g = FiniteAbGroup::new(&[4]).unwrap();
        let fg = g.to_fg();
        let h = LatticeSub::from_i64(&fg, &[vec![2]]).unwrap();
        assert_eq!(elems(&annihilator(&h).unwrap()), vec![vec![0], vec![2]]);
        assert_eq!(annihilator(&LatticeSub::trivial(&fg)).unwrap(), LatticeSub::whole(&fg));
        assert_eq!(annihilator(&LatticeSub::whole(&fg)).unwrap(), LatticeSub::trivial(&fg));
    }

    #[test]
    fn annihilator_matches_pairing_table() {
        let g = FiniteAbGroup::new(&[4, 2, 6]).unwrap();
        let fg = g.to_fg();
        let all = g.elements();
        for gen in all.iter().step_by(5) {
            let h = LatticeSub::from_generators(&fg, &[gen.iter().map(|&a| BigInt::from(a)).collect()]).unwrap();
            let hs = elems(&h);
            let expected: Vec<Vec<u64>> =
                all.iter().filter(|y| hs.iter().all(|x| g.pairing(x, y).0 == 0)).cloned().collect();
            let perp = annihilator(&h).unwrap();
            assert_eq!(elems(&perp), expected);
            assert_eq!(annihilator(&perp).unwrap(), h);
        }
    }

    #[test]
    fn adjoint_example() {
        let g = FiniteAbGroup::new(&[2, 4]).unwrap();
        let phi = FgEndo::new(g.to_fg(), IntMat::from_i64(&[vec![0, 1], vec![0, 0]]).unwrap()).unwrap();
        let adj = adjoint(&phi).unwrap();
        assert_eq!(adj.matrix(), &IntMat::from_i64(&[vec![0, 0], vec![2, 0]]).unwrap());
        let els = g.elements();
        let big = |x: &Vec<u64>| x.iter().map(|&a| BigInt::from(a)).collect::<Vec<_>>();
        let small = |x: Vec<BigInt>| x.iter().map(|a| a.to_u64().unwrap()).collect::<Vec<_>>();
        for x in &els {
            for y in &els {
                let lhs = g.pairing(&small(phi.apply(&big(x))), y);
                let rhs = g.pairing(x, &small(adj.apply(&big(y))));
                assert_eq!(lhs, rhs);
            }
        }
        assert_eq!(adjoint(&adj).unwrap(), phi);
    }

    #[test]
    fn perp_example_z8() {
        let g = FgGroup::from_u64(0, &[8]).unwrap();
        let phi = FgEndo::multiplication(&g, 2);
        let h = LatticeSub::from_i64(&g, &[vec![4]]).unwrap();
        assert_eq!(phi.preimage(&h).unwrap(), LatticeSub::from_i64(&g, &[vec![2]]).unwrap());
        assert!(check_perp_identity(&phi, &h, 1).unwrap().holds());
        assert!(check_perp_identity(&phi, &h, 0).unwrap().holds());
    }

    #[test]
    fn shift_duals() {
        assert_eq!(dual_of_shift(&OperatorDesc::right_shift(2)).unwrap(), OperatorDesc::left_shift(2));
        assert_eq!(dual_of_shift(&OperatorDesc::left_shift(2)).unwrap(), OperatorDesc::right_shift(2));
        assert_eq!(
            dual_of_shift(&OperatorDesc::two_sided_shift(3)).unwrap(),
            OperatorDesc::TwoSidedShift { p: 3, inverse: true }
        );
        assert!(dual_of_shift(&OperatorDesc::DivisibleTrivial).is_err());
    }

    #[test]
    fn duality_examples() {
        let e0 = vec![SparseVec::unit(2, IndexTag::Nat, 0)];
        let c = compare_duality(&OperatorDesc::left_shift(2), &e0, 32).unwrap();
        assert!(c.agrees());
        assert_eq!(c.cotrajectory, (1..=32).collect::<Vec<u64>>());
        let c = compare_duality(&OperatorDesc::right_shift(2), &e0, 10).unwrap();
        assert_eq!(c.dual_trajectory, vec![1; 10]);
        assert!(c.agrees());
    }

    #[test]
    fn dual_action_matches_pullback() {
        let p = 3;
        let ops = vec![
            OperatorDesc::BlockDiag {
                p,
                blocks: vec![FpPoly::from_i64(3, &[1, 1, 1]).unwrap(), FpPoly::from_i64(3, &[-1, 1]).unwrap()],
                repeat: RepeatRule::GrowLinear,
            },
            OperatorDesc::poly_of(FpPoly::from_i64(3, &[2, 0, 1]).unwrap(), OperatorDesc::left_shift(3)),
            OperatorDesc::DirectSum(vec![OperatorDesc::right_shift(3), OperatorDesc::power(2, OperatorDesc::left_shift(3))]),
        ];
        let a = SparseVec::from_pairs(p, IndexTag::Nat, &[(0, 1), (3, 2), (7, 1)]).unwrap();
        for op in ops {
            let act = dual_action(&op).unwrap();
            assert_eq!(act(&a).unwrap(), op.pullback(&a).unwrap(), "{op:?}");
        }
    }
}
