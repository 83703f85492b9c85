//! Growth engines.
//!
//! The cotrajectory engine follows `B_1 = N`, `B_{n+1} = N ∩ φ⁻¹ B_n` and
//! records `c_n = [G : B_n]`; the trajectory engine follows
//! `T_n = F + φF + … + φ^{n-1}F` and records `|T_n|`. Both chains are run
//! under one stabilization protocol (see [`EngineConfig`]).

mod trace;

pub use trace::{big_to_json, EntropyValue, GrowthTrace};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fpla::{FpVec, Functional, IndexTag, SparseEchelon};
use crate::intlat::{FgEndo, FgGroup, LatticeSub};
use crate::operators::{split_direct, OperatorDesc};

/// A finite-index subgroup `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CofiniteSubgroup {
    /// `N = ⋂ ker a_i` for finitely supported functionals `a_i`.
    FpKernel(Vec<Functional>),
    /// Finite-index subgroup of a finitely generated group.
    Lattice(LatticeSub),
    /// `N = G`.
    Whole,
}

/// A finite subgroup `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteSubgroup {
    FpSpan(Vec<FpVec>),
    /// Subgroup of the torsion part of a finitely generated group.
    Elements { group: FgGroup, generators: Vec<Vec<BigInt>> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub max_steps: usize,
    /// Consecutive equal ratios required by the window rule; `None` picks
    /// `max(8, 2·(support extent + row count))`.
    pub window: Option<usize>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { max_steps: 512, window: None }
    }
}

/// Per-subgroup entropy `H*(φ, N)` or `H(φ, F)` with its trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupEntropy {
    pub value: EntropyValue,
    pub trace: GrowthTrace,
    /// True when the value is proven (fixpoint or class-specific bound),
    /// false when it rests on the window rule.
    pub exact: bool,
}

impl SubgroupEntropy {
    pub fn to_json(&self) -> Value {
        json!({"value": self.value.to_json(), "exact": self.exact, "trace": self.trace.to_json()})
    }
}

/// One step of a growth chain: the new order, its log base `p` when known,
/// and whether the chain just repeated itself.
struct StepOutcome {
    order: BigUint,
    log: Option<u64>,
    fixpoint: bool,
}

trait Chain {
    fn p(&self) -> Option<u32>;
    fn advance(&mut self) -> Result<StepOutcome>;
}

fn drive(chain: &mut dyn Chain, config: &EngineConfig, window: usize, exact_bound: Option<usize>) -> Result<SubgroupEntropy> {
    let mut trace = GrowthTrace::new(chain.p());
    let first = chain.advance()?;
    trace.push(first.order, first.log);
    let mut run_start = 1usize;
    let mut run_len = 0usize;
    for n in 2..=config.max_steps.max(2) {
        let out = chain.advance()?;
        let alpha = trace.push(out.order, out.log).expect("alpha defined from n = 2");
        if out.fixpoint {
            trace.stabilized = true;
            trace.n_stab = Some(n - 1);
            trace.alpha_final = Some(BigUint::one());
            trace.exact = true;
            return Ok(SubgroupEntropy { value: EntropyValue::Zero, trace, exact: true });
        }
        if n >= 3 && trace.alpha[trace.alpha.len() - 2] == alpha {
            run_len += 1;
        } else {
            run_start = n - 1;
            run_len = 1;
        }
        let proven = exact_bound.is_some_and(|b| n > b);
        // A reachable proven bound overrides the window rule.
        let heuristic = exact_bound.is_none_or(|b| b >= config.max_steps) && run_len >= window;
        if proven || heuristic {
            trace.stabilized = true;
            trace.n_stab = Some(run_start);
            trace.alpha_final = Some(alpha.clone());
            trace.exact = proven;
            return Ok(SubgroupEntropy { value: EntropyValue::log(alpha), trace, exact: proven });
        }
    }
    Err(Error::Inconclusive { steps: trace.len(), trace: Box::new(trace) })
}

fn default_window(config: &EngineConfig, rows: &[FpVec]) -> usize {
    config.window.unwrap_or_else(|| {
        let extent = support_extent(rows);
        8usize.max(2 * (extent + rows.len()))
    })
}

/// Width of the combined support (`max - min + 1`), 0 for empty rows.
fn support_extent(rows: &[FpVec]) -> usize {
    let lo = rows.iter().filter_map(FpVec::min_index).min();
    let hi = rows.iter().filter_map(FpVec::max_index).max();
    match (lo, hi) {
        (Some(lo), Some(hi)) => (hi - lo + 1) as usize,
        _ => 0,
    }
}

/// Step after which the ratio sequence is provably constant, for the classes
/// where it is known.
///
/// * pure shifts: rows span `Σ_j t^j a_i(t)` in `F_p[t]` (or its Laurent
///   analogue); increments are constant once `n` exceeds the support extent
///   plus the row count;
/// * finite-dimensional and block-diagonal operators: the rows live in a
///   finite invariant subspace, so the chain is stationary within its dimension;
/// * direct sums: when every row sits in a single summand the chain splits, so
///   the maximum of the summand bounds applies.
fn stabilization_bound(op: &OperatorDesc, rows: &[FpVec]) -> Option<usize> {
    let rows: Vec<&FpVec> = rows.iter().filter(|r| !r.is_zero()).collect();
    if rows.is_empty() {
        return Some(1);
    }
    match op {
        OperatorDesc::RightShift { .. } | OperatorDesc::LeftShift { .. } | OperatorDesc::TwoSidedShift { .. } => {
            let owned: Vec<FpVec> = rows.iter().map(|r| (*r).clone()).collect();
            let hi = owned.iter().filter_map(FpVec::max_index).max().unwrap();
            let extent = match op.index_tag() {
                IndexTag::Nat => hi as usize + 1,
                IndexTag::Int => support_extent(&owned),
            };
            Some(extent + rows.len() + 1)
        }
        OperatorDesc::FiniteDim(m) => Some(m.rows() + 1),
        OperatorDesc::BlockDiag { .. } => {
            let mut touched = std::collections::BTreeSet::new();
            for r in &rows {
                for (i, _) in r.iter() {
                    touched.insert(block_of(op, i));
                }
            }
            let dim: usize = touched.iter().map(|&b| op.block_poly(b).unwrap().degree().unwrap()).sum();
            Some(dim + 1)
        }
        OperatorDesc::DirectSum(parts) => {
            let k = parts.len();
            let mut per_part: Vec<Vec<FpVec>> = vec![Vec::new(); k];
            for r in &rows {
                let locals = split_direct(r, k);
                let nonzero: Vec<usize> = (0..k).filter(|&b| !locals[b].is_zero()).collect();
                if nonzero.len() != 1 {
                    return None;
                }
                per_part[nonzero[0]].push(locals[nonzero[0]].clone());
            }
            parts
                .iter()
                .zip(&per_part)
                .map(|(part, local)| if local.is_empty() { Some(1) } else { stabilization_bound(part, local) })
                .try_fold(1, |acc, b| b.map(|b| acc.max(b)))
        }
        OperatorDesc::PolyOf(_, inner) | OperatorDesc::Power(_, inner) => match inner.as_ref() {
            OperatorDesc::FiniteDim(_) | OperatorDesc::BlockDiag { .. } => {
                stabilization_bound(inner, &rows.iter().map(|r| (*r).clone()).collect::<Vec<_>>())
            }
            _ => None,
        },
        OperatorDesc::IntEndo(_) | OperatorDesc::DivisibleTrivial => None,
    }
}

fn block_of(op: &OperatorDesc, i: i64) -> usize {
    let mut n = 0;
    loop {
        let (start, f) = op.block_span(n).unwrap();
        if i < start + f.degree().unwrap() as i64 {
            return n;
        }
        n += 1;
    }
}

fn p_power(p: u32, k: usize) -> BigUint {
    BigUint::from(p).pow(k as u32)
}

// ---------------------------------------------------------------------------
// Cotrajectory

/// Canonical state of the cotrajectory chain `B_n(φ, N)`.
pub enum CotrajState<'a> {
    Fp {
        op: &'a OperatorDesc,
        p: u32,
        /// `a_i ∘ φ^(n-1)` for every defining row.
        frontier: Vec<Functional>,
        span: SparseEchelon,
        n: usize,
    },
    Lattice {
        phi: &'a FgEndo,
        n_sub: LatticeSub,
        current: Option<LatticeSub>,
    },
    Whole,
}

impl<'a> CotrajState<'a> {
    pub fn new(op: &'a OperatorDesc, n: &CofiniteSubgroup) -> Result<Self> {
        match n {
            CofiniteSubgroup::Whole => Ok(CotrajState::Whole),
            CofiniteSubgroup::FpKernel(rows) => {
                let p = op.p().ok_or_else(|| {
                    Error::Unsupported(format!("kernel subgroups need an F_p operator, got {}", op.kind_name()))
                })?;
                for r in rows {
                    if r.p() != p {
                        return Err(Error::PrimeMismatch { expected: p, found: r.p() });
                    }
                    if r.tag() != op.index_tag() {
                        return Err(Error::IndexTag { expected: op.index_tag().name(), found: r.tag().name() });
                    }
                }
                Ok(CotrajState::Fp { op, p, frontier: rows.clone(), span: SparseEchelon::new(p), n: 0 })
            }
            CofiniteSubgroup::Lattice(sub) => {
                let OperatorDesc::IntEndo(phi) = op else {
                    return Err(Error::Unsupported(format!("lattice subgroups need int_endo, got {}", op.kind_name())));
                };
                if sub.ambient() != phi.group() {
                    return Err(Error::InvalidSubgroup("subgroup of a different group".into()));
                }
                if !sub.has_finite_index() {
                    return Err(Error::InvalidSubgroup("subgroup does not have finite index".into()));
                }
                Ok(CotrajState::Lattice { phi, n_sub: sub.clone(), current: None })
            }
        }
    }

    /// Canonical rows of the annihilator of `B_n` (F_p case).
    pub fn span(&self) -> Option<&SparseEchelon> {
        match self {
            CotrajState::Fp { span, .. } => Some(span),
            _ => None,
        }
    }

    /// Current `B_n` (lattice case).
    pub fn lattice(&self) -> Option<&LatticeSub> {
        match self {
            CotrajState::Lattice { current, .. } => current.as_ref(),
            _ => None,
        }
    }

    /// Moves from `B_n` to `B_{n+1}` (the first call produces `B_1 = N`).
    pub fn step(&mut self) -> Result<(BigUint, Option<u64>, bool)> {
        let out = self.advance()?;
        Ok((out.order, out.log, out.fixpoint))
    }
}

impl Chain for CotrajState<'_> {
    fn p(&self) -> Option<u32> {
        match self {
            CotrajState::Fp { p, .. } => Some(*p),
            _ => None,
        }
    }

    fn advance(&mut self) -> Result<StepOutcome> {
        match self {
            CotrajState::Whole => Ok(StepOutcome { order: BigUint::one(), log: None, fixpoint: true }),
            CotrajState::Fp { op, p, frontier, span, n } => {
                if *n > 0 {
                    *frontier = frontier.iter().map(|a| op.pullback(a)).collect::<Result<_>>()?;
                }
                *n += 1;
                let mut grew = false;
                for a in frontier.iter() {
                    grew |= span.insert(a);
                }
                let r = span.rank();
                Ok(StepOutcome { order: p_power(*p, r), log: Some(r as u64), fixpoint: *n > 1 && !grew })
            }
            CotrajState::Lattice { phi, n_sub, current } => {
                let next = match current.as_ref() {
                    None => n_sub.clone(),
                    Some(b) => n_sub.intersect(&phi.preimage(b)?)?,
                };
                let fixpoint = current.as_ref() == Some(&next);
                let order = next.index().expect("finite index").to_biguint().expect("positive index");
                *current = Some(next);
                Ok(StepOutcome { order, log: None, fixpoint })
            }
        }
    }
}

/// `H*(φ, N)`: the growth rate of `|C_n(φ, N)|`.
pub fn hstar(op: &OperatorDesc, n: &CofiniteSubgroup, config: &EngineConfig) -> Result<SubgroupEntropy> {
    let mut state = CotrajState::new(op, n)?;
    let (window, bound) = match n {
        CofiniteSubgroup::FpKernel(rows) => (default_window(config, rows), stabilization_bound(op, rows)),
        _ => (config.window.unwrap_or(8), None),
    };
    drive(&mut state, config, window, bound)
}

/// `|C_1|, …, |C_{n_max}|`.
pub fn cotrajectory_orders(op: &OperatorDesc, n: &CofiniteSubgroup, n_max: usize) -> Result<Vec<BigUint>> {
    let mut state = CotrajState::new(op, n)?;
    (0..n_max).map(|_| state.advance().map(|o| o.order)).collect()
}

/// One cotrajectory step in the public `(op, N, state) -> state` shape.
pub fn cotraj_step(state: &mut CotrajState<'_>) -> Result<BigUint> {
    state.advance().map(|o| o.order)
}

/// Defining rows of `B_k(φ, N)` for a kernel subgroup: `a_i ∘ φ^j`, `j < k`.
pub fn b_k_rows(op: &OperatorDesc, rows: &[Functional], k: usize) -> Result<Vec<Functional>> {
    let mut out = Vec::new();
    let mut frontier = rows.to_vec();
    for j in 0..k {
        if j > 0 {
            frontier = frontier.iter().map(|a| op.pullback(a)).collect::<Result<_>>()?;
        }
        out.extend(frontier.iter().cloned());
    }
    Ok(out)
}

/// `B_k(φ, N)` for either subgroup representation.
pub fn b_k(op: &OperatorDesc, n: &CofiniteSubgroup, k: usize) -> Result<CofiniteSubgroup> {
    match n {
        CofiniteSubgroup::Whole => Ok(CofiniteSubgroup::Whole),
        CofiniteSubgroup::FpKernel(rows) => Ok(CofiniteSubgroup::FpKernel(b_k_rows(op, rows, k)?)),
        CofiniteSubgroup::Lattice(_) => {
            let mut state = CotrajState::new(op, n)?;
            for _ in 0..k {
                state.advance()?;
            }
            Ok(CofiniteSubgroup::Lattice(state.lattice().expect("lattice state").clone()))
        }
    }
}

// ---------------------------------------------------------------------------
// Trajectory

struct TrajFp<'a> {
    act: &'a dyn Fn(&FpVec) -> Result<FpVec>,
    p: u32,
    frontier: Vec<FpVec>,
    span: SparseEchelon,
    n: usize,
}

impl Chain for TrajFp<'_> {
    fn p(&self) -> Option<u32> {
        Some(self.p)
    }

    fn advance(&mut self) -> Result<StepOutcome> {
        if self.n > 0 {
            self.frontier = self.frontier.iter().map(|v| (self.act)(v)).collect::<Result<_>>()?;
        }
        self.n += 1;
        let mut grew = false;
        for v in &self.frontier {
            grew |= self.span.insert(v);
        }
        let r = self.span.rank();
        Ok(StepOutcome { order: p_power(self.p, r), log: Some(r as u64), fixpoint: self.n > 1 && !grew })
    }
}

struct TrajLattice {
    phi: FgEndo,
    frontier: Vec<Vec<BigInt>>,
    gens: Vec<Vec<BigInt>>,
    current: Option<LatticeSub>,
}

impl Chain for TrajLattice {
    fn p(&self) -> Option<u32> {
        None
    }

    fn advance(&mut self) -> Result<StepOutcome> {
        if self.current.is_some() {
            self.frontier = self.frontier.iter().map(|x| self.phi.apply(x)).collect();
        }
        self.gens.extend(self.frontier.iter().cloned());
        let next = LatticeSub::from_generators(self.phi.group(), &self.gens)?;
        let fixpoint = self.current.as_ref() == Some(&next);
        let order = next.order().expect("finite group").to_biguint().expect("positive order");
        self.current = Some(next);
        Ok(StepOutcome { order, log: None, fixpoint })
    }
}

/// Restricts an endomorphism to the torsion coordinates (which it preserves).
fn torsion_part(phi: &FgEndo) -> Result<FgEndo> {
    let g = phi.group();
    let r = g.free_rank();
    let s = g.torsion().len();
    let tg = FgGroup::new(0, g.torsion().to_vec())?;
    let rows: Vec<Vec<BigInt>> = (0..s).map(|i| (0..s).map(|j| phi.matrix().get(r + i, r + j).clone()).collect()).collect();
    FgEndo::new(tg, crate::intlat::IntMat::from_rows(rows, s))
}

fn traj_chain<'a>(
    op: &'a OperatorDesc,
    f: &FiniteSubgroup,
    act: &'a dyn Fn(&FpVec) -> Result<FpVec>,
) -> Result<Box<dyn Chain + 'a>> {
    match f {
        FiniteSubgroup::FpSpan(gens) => {
            let p = op.p().ok_or_else(|| Error::Unsupported(format!("{} does not act on F_p vectors", op.kind_name())))?;
            Ok(Box::new(TrajFp { act, p, frontier: gens.clone(), span: SparseEchelon::new(p), n: 0 }))
        }
        FiniteSubgroup::Elements { group, generators } => {
            let OperatorDesc::IntEndo(phi) = op else {
                return Err(Error::Unsupported(format!("element subgroups need int_endo, got {}", op.kind_name())));
            };
            if group != phi.group() {
                return Err(Error::InvalidSubgroup("subgroup of a different group".into()));
            }
            let r = group.free_rank();
            if generators.iter().any(|g| g.len() != group.dim() || g[..r].iter().any(|x| !!x.is_zero())) {
                return Err(Error::InvalidSubgroup("generators must be torsion elements".into()));
            }
            let tphi = torsion_part(phi)?;
            let gens: Vec<Vec<BigInt>> = generators.iter().map(|g| g[r..].to_vec()).collect();
            Ok(Box::new(TrajLattice { phi: tphi, frontier: gens, gens: Vec::new(), current: None }))
        }
    }
}

/// `H(φ, F)`: the growth rate of `|T_n(φ, F)|`.
pub fn h(op: &OperatorDesc, f: &FiniteSubgroup, config: &EngineConfig) -> Result<SubgroupEntropy> {
    let act = |v: &FpVec| op.apply(v);
    let mut chain = traj_chain(op, f, &act)?;
    let (window, bound) = match f {
        FiniteSubgroup::FpSpan(gens) => (default_window(config, gens), stabilization_bound(&forward_twin(op), gens)),
        FiniteSubgroup::Elements { .. } => (config.window.unwrap_or(8), None),
    };
    drive(chain.as_mut(), config, window, bound)
}

/// Trajectory growth under an arbitrary F_p-linear action (used for the
/// dual action `a ↦ a ∘ φ` on functionals). Only the window rule applies.
pub fn h_with_action(
    p: u32,
    act: &dyn Fn(&FpVec) -> Result<FpVec>,
    gens: &[FpVec],
    config: &EngineConfig,
) -> Result<SubgroupEntropy> {
    let mut chain = TrajFp { act, p, frontier: gens.to_vec(), span: SparseEchelon::new(p), n: 0 };
    drive(&mut chain, config, default_window(config, gens), None)
}

/// `|T_1|, …, |T_{n_max}|` under an arbitrary linear action.
pub fn trajectory_orders_with(
    p: u32,
    act: &dyn Fn(&FpVec) -> Result<FpVec>,
    gens: &[FpVec],
    n_max: usize,
) -> Result<Vec<BigUint>> {
    let mut chain = TrajFp { act, p, frontier: gens.to_vec(), span: SparseEchelon::new(p), n: 0 };
    (0..n_max).map(|_| chain.advance().map(|o| o.order)).collect()
}

/// `|T_1|, …, |T_{n_max}|`.
pub fn trajectory_orders(op: &OperatorDesc, f: &FiniteSubgroup, n_max: usize) -> Result<Vec<BigUint>> {
    let act = |v: &FpVec| op.apply(v);
    let mut chain = traj_chain(op, f, &act)?;
    (0..n_max).map(|_| chain.advance().map(|o| o.order)).collect()
}

/// For bounds on the trajectory side the forward action of a shift is the
/// pullback action of the opposite shift, so the same bound applies with the
/// shift direction swapped.
fn forward_twin(op: &OperatorDesc) -> OperatorDesc {
    match op {
        OperatorDesc::RightShift { p } => OperatorDesc::LeftShift { p: *p },
        OperatorDesc::LeftShift { p } => OperatorDesc::RightShift { p: *p },
        OperatorDesc::DirectSum(parts) => OperatorDesc::DirectSum(parts.iter().map(forward_twin).collect()),
        other => other.clone(),
    }
}

// ---------------------------------------------------------------------------
// Families and identities

/// Lower bound on `ent*(φ)` from a finite family of cofinite subgroups.
pub fn sup_over_family(op: &OperatorDesc, family: &[CofiniteSubgroup], config: &EngineConfig) -> Result<EntropyValue> {
    if family.is_empty() {
        return Err(Error::InvalidSubgroup("empty subgroup family".into()));
    }
    let mut best = BigUint::one();
    for (i, n) in family.iter().enumerate() {
        let r = hstar(op, n, config).map_err(|e| match e {
            Error::Inconclusive { steps, trace } => Error::FamilyMember { index: i, steps, trace },
            other => other,
        })?;
        let a = r.value.alpha().expect("finite per-subgroup value");
        if a > best {
            best = a;
        }
    }
    Ok(EntropyValue::LowerBound(best))
}

/// `|C_{nk}(φ, N)| = |C_n(φ^k, B_k(φ, N))|`.
pub fn check_power_identity(op: &OperatorDesc, n_sub: &CofiniteSubgroup, k: u32, n: usize) -> Result<bool> {
    let lhs = cotrajectory_orders(op, n_sub, n * k as usize)?;
    let bk = b_k(op, n_sub, k as usize)?;
    let power = power_of(op, k)?;
    let rhs = cotrajectory_orders(&power, &bk, n)?;
    Ok(lhs[n * k as usize - 1] == rhs[n - 1])
}

fn power_of(op: &OperatorDesc, k: u32) -> Result<OperatorDesc> {
    match op {
        OperatorDesc::IntEndo(phi) => Ok(OperatorDesc::IntEndo(phi.pow(k))),
        other => Ok(OperatorDesc::power(k, other.clone())),
    }
}

/// `|C_n(φ, N)| = |C_n(φ⁻¹, N)|` for an invertible operator.
pub fn check_inverse_identity(op: &OperatorDesc, n_sub: &CofiniteSubgroup, n: usize) -> Result<bool> {
    let inv = op.inverse()?;
    let a = cotrajectory_orders(op, n_sub, n)?;
    let b = cotrajectory_orders(&inv, n_sub, n)?;
    Ok(a == b)
}

/// Exponent helper for reports: `log_p c` when `c` is a power of `p`.
pub fn log_p_exact(c: &BigUint, p: u32) -> Option<u64> {
    let mut c = c.clone();
    let pb = BigUint::from(p);
    let mut k = 0;
    while c > BigUint::one() {
        let (q, r) = num_integer::Integer::div_rem(&c, &pb);
        if r != BigUint::from(0u32) {
            return None;
        }
        c = q;
        k += 1;
    }
    (c.to_u64() == Some(1)).then_some(k)
}
