//! Seeded property suites over the operator zoo and small finite groups.
//! The CLI `verify` command and the acceptance tests both run these.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rand::Rng;
use serde_json::{json, Value};

use crate::classify::{classify_ent_star, consistency_probe, mod_p_certificates, verify_certificate};
use crate::duality::{adjoint, annihilator, compare_duality, dual_of_shift, FiniteAbGroup};
use crate::engine::{
    check_inverse_identity, check_power_identity, cotrajectory_orders, h, hstar, CofiniteSubgroup, EngineConfig,
    EntropyValue, FiniteSubgroup, GrowthTrace,
};
use crate::error::Error;
use crate::fpla::{Functional, SparseEchelon};
use crate::intlat::{FgEndo, FgGroup, LatticeSub};
use crate::operators::{merge_direct, OperatorDesc};
use crate::oracle::{
    brute_cotrajectory, enumerate_endomorphisms, enumerate_subgroups, preimage_set, to_endo, to_lattice,
    ExplicitGroup, ExplicitSubgroup,
};
use crate::zoo::{self, ZooRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Duality,
    Dichotomy,
    Addition,
    GrowthLaws,
    Perp,
    Monotonicity,
    Narrow,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Duality, Suite::Dichotomy, Suite::Addition, Suite::GrowthLaws, Suite::Perp, Suite::Monotonicity, Suite::Narrow];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Duality => "duality",
            Suite::Dichotomy => "dichotomy",
            Suite::Addition => "addition",
            Suite::GrowthLaws => "growth-laws",
            Suite::Perp => "perp",
            Suite::Monotonicity => "monotonicity",
            Suite::Narrow => "narrow",
        }
    }

    pub fn default_budget(self) -> usize {
        match self {
            Suite::Duality => 200,
            Suite::Dichotomy => 100,
            Suite::Addition => 60,
            Suite::GrowthLaws => 1000,
            Suite::Perp => 512,
            Suite::Monotonicity => 200,
            Suite::Narrow => 100,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown suite {s:?}")))
    }
}

/// Pass/fail counts for one property, keeping the smallest failing instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyResult {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
    pub counterexample: Option<String>,
}

impl PropertyResult {
    fn new(name: &str) -> Self {
        PropertyResult { name: name.to_string(), checked: 0, failed: 0, counterexample: None }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            let d = describe();
            if self.counterexample.as_ref().is_none_or(|c| d.len() < c.len()) {
                self.counterexample = Some(d);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0 && self.checked > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub budget: usize,
    pub properties: Vec<PropertyResult>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::passed)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "seed": self.seed,
            "budget": self.budget,
            "passed": self.passed(),
            "properties": self.properties.iter().map(|p| json!({
                "name": p.name,
                "checked": p.checked,
                "failed": p.failed,
                "counterexample": p.counterexample,
            })).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

pub fn run_suite(suite: Suite, seed: u64, budget: usize) -> SuiteReport {
    let mut rng = zoo::rng(seed);
    let (properties, notes) = match suite {
        Suite::Duality => duality_suite(&mut rng, budget),
        Suite::Dichotomy => dichotomy_suite(&mut rng, budget),
        Suite::Addition => addition_suite(&mut rng, budget),
        Suite::GrowthLaws => growth_suite(&mut rng, budget),
        Suite::Perp => perp_suite(budget),
        Suite::Monotonicity => monotonicity_suite(&mut rng, budget),
        Suite::Narrow => narrow_suite(&mut rng, budget),
    };
    SuiteReport { suite, seed, budget, properties, notes }
}

type SuiteOutput = (Vec<PropertyResult>, Vec<String>);

fn op_json(op: &OperatorDesc) -> String {
    op.to_json_value().to_string()
}

fn rows_json(rows: &[Functional]) -> String {
    format!("{:?}", rows.iter().map(|r| r.pairs()).collect::<Vec<_>>())
}

fn kernel(rows: &[Functional]) -> CofiniteSubgroup {
    CofiniteSubgroup::FpKernel(rows.to_vec())
}

// ---------------------------------------------------------------------------

/// Number of steps compared by the duality property.
pub const DUALITY_STEPS: usize = 32;

fn duality_suite(rng: &mut ZooRng, budget: usize) -> SuiteOutput {
    let mut identity = PropertyResult::new("cotrajectory_equals_dual_trajectory");
    for _ in 0..budget {
        let p = zoo::random_prime(rng);
        let op = zoo::random_sequence_op(rng, p);
        let rows = zoo::random_rows(rng, &op, 3);
        let outcome = compare_duality(&op, &rows, DUALITY_STEPS);
        identity.record(outcome.as_ref().is_ok_and(|c| c.agrees()), || {
            format!("op={} rows={} outcome={:?}", op_json(&op), rows_json(&rows), outcome)
        });
    }

    let mut table = PropertyResult::new("dual_shift_table");
    for p in zoo::SMALL_PRIMES {
        let cases = [
            (OperatorDesc::right_shift(p), OperatorDesc::left_shift(p)),
            (OperatorDesc::left_shift(p), OperatorDesc::right_shift(p)),
            (OperatorDesc::two_sided_shift(p), OperatorDesc::TwoSidedShift { p, inverse: true }),
        ];
        for (op, dual) in cases {
            table.record(dual_of_shift(&op).ok() == Some(dual.clone()), || format!("{} -> {}", op_json(&op), op_json(&dual)));
        }
    }

    let mut involution = PropertyResult::new("adjoint_involution_and_reversal");
    for _ in 0..budget.div_ceil(4) {
        let phi = zoo::random_int_endo(rng, 0, 12);
        let psi = zoo::random_endo_on(rng, phi.group());
        let ok = (|| -> crate::error::Result<bool> {
            let a = adjoint(&phi)?;
            let back = adjoint(&a)?;
            let lhs = adjoint(&phi.compose(&psi)?)?;
            let rhs = adjoint(&psi)?.compose(&a)?;
            Ok(same_endo(&back, &phi) && same_endo(&lhs, &rhs))
        })();
        involution.record(ok.unwrap_or(false), || format!("phi={:?} psi={:?}", phi, psi));
    }
    (vec![identity, table, involution], Vec::new())
}

/// Equality of induced maps (matrices may differ by multiples of the moduli).
pub fn same_endo(a: &FgEndo, b: &FgEndo) -> bool {
    let k = a.group().dim();
    a.group() == b.group()
        && (0..k).all(|j| {
            let e: Vec<BigInt> = (0..k).map(|i| BigInt::from((i == j) as u8)).collect();
            a.apply(&e) == b.apply(&e)
        })
}

// ---------------------------------------------------------------------------

fn dichotomy_suite(rng: &mut ZooRng, budget: usize) -> SuiteOutput {
    let mut dichotomous = PropertyResult::new("classifier_is_dichotomous");
    let mut certified = PropertyResult::new("certificate_verifies");
    let mut consistent = PropertyResult::new("probe_consistent");
    let mut mod_p = PropertyResult::new("mod_p_route_agrees");
    let mut ent_implies = PropertyResult::new("positive_ent_implies_infinite");
    let mut inconclusive = 0;
    for _ in 0..budget {
        let op = zoo::random_zoo_op(rng);
        let desc = op_json(&op);
        let classified = classify_ent_star(&op);
        let Ok((value, cert)) = classified else {
            dichotomous.record(false, || format!("op={desc} error={:?}", classified.err()));
            continue;
        };
        dichotomous.record(matches!(value, EntropyValue::Zero | EntropyValue::Infinite), || format!("op={desc} value={value}"));
        certified.record(verify_certificate(&cert, &op), || format!("op={desc} cert={}", cert.to_json()));
        match consistency_probe(&op, 6) {
            Ok(r) => {
                inconclusive += r.inconclusive;
                consistent.record(r.consistent(), || format!("op={desc} contradictions={:?}", r.contradictions));
            }
            Err(e) => consistent.record(false, || format!("op={desc} error={e}")),
        }
        if let OperatorDesc::IntEndo(phi) = &op {
            let ok = mod_p_certificates(phi, &[2, 3, 5, 7])
                .is_ok_and(|cs| cs.iter().all(|c| verify_certificate(c, &op)))
                && value == EntropyValue::Zero;
            mod_p.record(ok, || format!("op={desc}"));
        }
        if op.p().is_some() {
            // ent(φ) > 0 shows up as a trajectory with a proven ratio above 1.
            let gens = zoo::random_rows(rng, &op, 2);
            if let Ok(r) = h(&op, &FiniteSubgroup::FpSpan(gens.clone()), &EngineConfig::default()) {
                if r.exact && !r.value.is_zero() {
                    ent_implies.record(value == EntropyValue::Infinite, || format!("op={desc} F={}", rows_json(&gens)));
                }
            }
        }
    }
    let notes = vec![format!("{inconclusive} probe members were inconclusive and reported, not counted as contradictions")];
    (vec![dichotomous, certified, consistent, mod_p, ent_implies], notes)
}

// ---------------------------------------------------------------------------

fn addition_suite(rng: &mut ZooRng, budget: usize) -> SuiteOutput {
    let mut classes = PropertyResult::new("classification_adds_on_direct_sums");
    let mut orders = PropertyResult::new("cotrajectory_orders_multiply");
    let mut finite = PropertyResult::new("finite_groups_zero_plus_zero");
    let mut quotient = PropertyResult::new("quotient_orders_bounded");
    for _ in 0..budget {
        let p = zoo::random_prime(rng);
        let a = zoo::random_base_op(rng, p);
        let b = zoo::random_base_op(rng, p);
        if a.index_tag() != b.index_tag() || a.finite_dim().is_some() || b.finite_dim().is_some() {
            // direct sums interleave coordinates, so both parts need the same unbounded index set
            continue;
        }
        let sum = OperatorDesc::DirectSum(vec![a.clone(), b.clone()]);
        let desc = op_json(&sum);
        let (va, vb, vs) = match (classify_ent_star(&a), classify_ent_star(&b), classify_ent_star(&sum)) {
            (Ok(x), Ok(y), Ok(z)) => (x.0, y.0, z.0),
            _ => {
                classes.record(false, || format!("op={desc} classification error"));
                continue;
            }
        };
        let expected = if va.is_zero() && vb.is_zero() { EntropyValue::Zero } else { EntropyValue::Infinite };
        classes.record(vs == expected, || format!("op={desc} parts=({va}, {vb}) sum={vs}"));

        let ra = zoo::random_rows(rng, &a, 2);
        let rb = zoo::random_rows(rng, &b, 2);
        let tag = a.index_tag();
        let zero = crate::fpla::SparseVec::zero(p, tag);
        let mut rows: Vec<Functional> = ra.iter().map(|r| merge_direct(p, tag, &[r.clone(), zero.clone()])).collect();
        rows.extend(rb.iter().map(|r| merge_direct(p, tag, &[zero.clone(), r.clone()])));
        let n = 12;
        let ok = match (
            cotrajectory_orders(&a, &kernel(&ra), n),
            cotrajectory_orders(&b, &kernel(&rb), n),
            cotrajectory_orders(&sum, &kernel(&rows), n),
        ) {
            (Ok(x), Ok(y), Ok(z)) => x.iter().zip(&y).map(|(u, v)| u * v).collect::<Vec<_>>() == z,
            _ => false,
        };
        orders.record(ok, || format!("op={desc} N1={} N2={}", rows_json(&ra), rows_json(&rb)));
    }

    for _ in 0..budget.div_ceil(2) {
        let phi = zoo::random_int_endo(rng, 0, 12);
        let g = phi.group().clone();
        let desc = format!("{:?}", phi);
        // φ(G) is always invariant.
        let h_sub = phi.image(&LatticeSub::whole(&g));
        let Ok((bar, proj)) = phi.quotient(&h_sub) else {
            finite.record(false, || format!("phi={desc} quotient failed"));
            continue;
        };
        let whole = classify_ent_star(&OperatorDesc::IntEndo(phi.clone())).map(|x| x.0);
        let parts = classify_ent_star(&OperatorDesc::IntEndo(bar.clone())).map(|x| x.0);
        finite.record(
            whole.as_ref().is_ok_and(|v| v.is_zero()) && parts.as_ref().is_ok_and(|v| v.is_zero()),
            || format!("phi={desc}"),
        );
        let m = rng.gen_range(2..=6);
        let Ok(n_sub) = h_sub.sum(&LatticeSub::multiples(&g, m)) else { continue };
        let n_bar = proj.project_sub(&n_sub);
        let big = cotrajectory_orders(&OperatorDesc::IntEndo(phi.clone()), &CofiniteSubgroup::Lattice(n_sub), 6);
        let small = cotrajectory_orders(&OperatorDesc::IntEndo(bar), &CofiniteSubgroup::Lattice(n_bar), 6);
        let ok = match (big, small) {
            (Ok(x), Ok(y)) => x.iter().zip(&y).all(|(u, v)| v <= u),
            _ => false,
        };
        quotient.record(ok, || format!("phi={desc} m={m}"));
    }
    (vec![classes, orders, finite, quotient], Vec::new())
}

// ---------------------------------------------------------------------------

/// Extra steps computed past stabilization when checking the geometric tail.
const TAIL_STEPS: usize = 8;

fn tail_holds(op: &OperatorDesc, n: &CofiniteSubgroup, trace: &GrowthTrace) -> bool {
    let (Some(ns), Some(alpha)) = (trace.n_stab, trace.alpha_final.as_ref()) else { return true };
    let Ok(orders) = cotrajectory_orders(op, n, trace.len() + TAIL_STEPS) else { return false };
    let mut expect = orders[ns - 1].clone();
    for c in &orders[ns - 1..] {
        if c != &expect {
            return false;
        }
        expect *= alpha;
    }
    true
}

fn growth_suite(rng: &mut ZooRng, budget: usize) -> SuiteOutput {
    let mut laws = PropertyResult::new("trace_laws");
    let mut tail = PropertyResult::new("geometric_tail_exact");
    let mut heuristic = PropertyResult::new("geometric_tail_window");
    let mut power = PropertyResult::new("power_identity");
    let mut inverse = PropertyResult::new("inverse_identity");
    let mut anti = PropertyResult::new("anti_monotonicity");
    let mut invariant = PropertyResult::new("invariant_subgroup_vanishes");
    let mut inconclusive = 0;
    let config = EngineConfig::default();
    for run in 0..budget {
        let (op, n) = if run % 5 == 4 {
            let phi = zoo::random_int_endo(rng, 2, 12);
            let m = rng.gen_range(2..=6);
            let g = phi.group().clone();
            (OperatorDesc::IntEndo(phi), CofiniteSubgroup::Lattice(LatticeSub::multiples(&g, m)))
        } else {
            let p = zoo::random_prime(rng);
            let op = zoo::random_sequence_op(rng, p);
            let rows = zoo::random_rows(rng, &op, 3);
            (op, kernel(&rows))
        };
        let desc = || format!("op={} N={:?}", op_json(&op), n);
        let trace = match hstar(&op, &n, &config) {
            Ok(r) => {
                let ok = tail_holds(&op, &n, &r.trace);
                if r.exact {
                    tail.record(ok, desc);
                } else {
                    heuristic.record(ok, desc);
                }
                r.trace
            }
            Err(Error::Inconclusive { trace, .. }) => {
                inconclusive += 1;
                *trace
            }
            Err(e) => {
                laws.record(false, || format!("{} error={e}", desc()));
                continue;
            }
        };
        let v = trace.law_violations();
        laws.record(v.is_empty(), || format!("{} violations={v:?}", desc()));
    }

    for _ in 0..budget.div_ceil(10) {
        let p = zoo::random_prime(rng);
        let op = match rng.gen_range(0..4) {
            0 => OperatorDesc::right_shift(p),
            1 => OperatorDesc::left_shift(p),
            2 => OperatorDesc::TwoSidedShift { p, inverse: rng.gen_bool(0.5) },
            _ => {
                let d = rng.gen_range(1..=5);
                OperatorDesc::FiniteDim(zoo::random_matrix(rng, p, d))
            }
        };
        let rows = zoo::random_rows(rng, &op, 3);
        let n = kernel(&rows);
        for k in 1..=4 {
            for m in 1..=8 {
                power.record(check_power_identity(&op, &n, k, m).unwrap_or(false), || {
                    format!("op={} N={} k={k} n={m}", op_json(&op), rows_json(&rows))
                });
            }
        }
        let inv_op = match &op {
            OperatorDesc::TwoSidedShift { .. } => op.clone(),
            _ => {
                let d = rng.gen_range(1..=5);
                OperatorDesc::FiniteDim(zoo::random_invertible(rng, p, d))
            }
        };
        let inv_rows = zoo::random_rows(rng, &inv_op, 3);
        for m in 1..=8 {
            inverse.record(check_inverse_identity(&inv_op, &kernel(&inv_rows), m).unwrap_or(false), || {
                format!("op={} N={} n={m}", op_json(&inv_op), rows_json(&inv_rows))
            });
        }
    }

    for _ in 0..budget.div_ceil(5) {
        let p = zoo::random_prime(rng);
        let op = zoo::random_sequence_op(rng, p);
        let big = zoo::random_rows(rng, &op, 4);
        let cut = rng.gen_range(1..=big.len());
        let small = &big[..cut];
        // ker(big) ≤ ker(small)
        let ok = match (cotrajectory_orders(&op, &kernel(&big), 16), cotrajectory_orders(&op, &kernel(small), 16)) {
            (Ok(x), Ok(y)) => x.iter().zip(&y).all(|(u, v)| u >= v),
            _ => false,
        };
        anti.record(ok, || format!("op={} N={} M={}", op_json(&op), rows_json(&big), rows_json(small)));

        if let Some(rows) = invariant_rows(&op, &big) {
            let r = hstar(&op, &kernel(&rows), &config);
            invariant.record(
                r.as_ref().is_ok_and(|r| r.value.is_zero() && r.trace.n_stab == Some(1)),
                || format!("op={} N={}", op_json(&op), rows_json(&rows)),
            );
        }
    }
    let notes = vec![format!("{inconclusive} engine runs were inconclusive; their partial traces were still checked")];
    (vec![laws, tail, heuristic, power, inverse, anti, invariant], notes)
}

/// Rows spanning the smallest pullback-closed space containing `rows`, when
/// that closure is reached within 32 steps; its kernel is φ-invariant.
pub fn invariant_rows(op: &OperatorDesc, rows: &[Functional]) -> Option<Vec<Functional>> {
    let p = op.p()?;
    let mut span = SparseEchelon::new(p);
    let mut frontier = rows.to_vec();
    for _ in 0..32 {
        let mut grew = false;
        for a in &frontier {
            grew |= span.insert(a);
        }
        if !grew {
            return Some(span.rows().cloned().collect());
        }
        frontier = frontier.iter().map(|a| op.pullback(a)).collect::<crate::error::Result<_>>().ok()?;
    }
    None
}

// ---------------------------------------------------------------------------

/// Groups checked exhaustively by the perp and monotonicity suites.
pub fn small_groups() -> Vec<FiniteAbGroup> {
    [vec![8], vec![4, 2], vec![2, 2, 2], vec![9, 3]]
        .iter()
        .map(|f| FiniteAbGroup::new(f).expect("valid factors"))
        .collect()
}

/// Largest `n` in `(φ⁻ⁿH)⊥ = (φ*)ⁿ H⊥`.
pub const PERP_MAX_N: u32 = 3;

fn perp_suite(cap: usize) -> SuiteOutput {
    let mut identity = PropertyResult::new("perp_identity");
    let mut invariance = PropertyResult::new("invariance_transfers");
    let mut orders = PropertyResult::new("annihilator_order_and_involution");
    let mut table = PropertyResult::new("annihilator_matches_pairing_table");
    let mut lattice_ops = PropertyResult::new("sum_intersection_duality");
    let mut oracle = PropertyResult::new("preimage_matches_oracle");
    let mut notes = Vec::new();
    for g in small_groups() {
        let eg = ExplicitGroup::new(&g).expect("small group");
        let subs = enumerate_subgroups(&g).expect("small group");
        let lattices: Vec<LatticeSub> = subs.iter().map(|s| to_lattice(&g, s).expect("subgroup")).collect();
        let perps: Vec<LatticeSub> = lattices.iter().map(|l| annihilator(l).expect("finite group")).collect();
        let order = g.order();
        for (i, (s, l)) in subs.iter().zip(&lattices).enumerate() {
            let perp = &perps[i];
            let perp_order = perp.order().and_then(|o| u64::try_from(o).ok()).unwrap_or(0);
            let ok = perp_order * s.elements.len() as u64 == order && annihilator(perp).ok().as_ref() == Some(l);
            orders.record(ok, || format!("G={:?} H={:?}", g.factors(), s.generators));
            let expected: Vec<usize> = (0..eg.order())
                .filter(|&y| s.elements.iter().all(|&x| g.pairing(eg.element(x), eg.element(y)).0 == 0))
                .collect();
            table.record(explicit_elements(&eg, perp) == expected, || format!("G={:?} H={:?}", g.factors(), s.generators));
        }
        for i in 0..lattices.len() {
            for j in 0..lattices.len() {
                let (a, b) = (&lattices[i], &lattices[j]);
                let ok = (|| -> crate::error::Result<bool> {
                    Ok(annihilator(&a.sum(b)?)? == perps[i].intersect(&perps[j])?
                        && annihilator(&a.intersect(b)?)? == perps[i].sum(&perps[j])?)
                })();
                lattice_ops.record(ok.unwrap_or(false), || format!("G={:?} H1={:?} H2={:?}", g.factors(), a, b));
            }
        }
        let endos = enumerate_endomorphisms(&g, cap);
        notes.push(format!("G = {:?}: {} subgroups, {} endomorphisms", g.factors(), subs.len(), endos.len()));
        for m in &endos {
            let phi = to_endo(&g, m).expect("compatible by enumeration");
            let adj = adjoint(&phi).expect("finite group");
            for (i, (s, l)) in subs.iter().zip(&lattices).enumerate() {
                let desc = || format!("G={:?} phi={m:?} H={:?}", g.factors(), s.generators);
                invariance.record(phi.is_invariant(l) == adj.is_invariant(&perps[i]), desc);
                let mut pre = l.clone();
                let mut img = perps[i].clone();
                let mut pre_set: std::collections::BTreeSet<usize> = s.elements.clone();
                for n in 1..=PERP_MAX_N {
                    pre = phi.preimage(&pre).expect("same group");
                    img = adj.image(&img);
                    pre_set = preimage_set(&eg, m, &pre_set);
                    let ok = annihilator(&pre).is_ok_and(|x| x == img);
                    identity.record(ok, || format!("{} n={n}", desc()));
                    oracle.record(explicit_elements(&eg, &pre) == pre_set.iter().copied().collect::<Vec<_>>(), || {
                        format!("{} n={n}", desc())
                    });
                }
            }
        }
    }
    (vec![identity, invariance, orders, table, lattice_ops, oracle], notes)
}

/// Element indices of a lattice subgroup of a small finite group.
pub fn explicit_elements(eg: &ExplicitGroup, l: &LatticeSub) -> Vec<usize> {
    (0..eg.order())
        .filter(|&x| l.contains(&eg.element(x).iter().map(|&a| BigInt::from(a)).collect::<Vec<_>>()))
        .collect()
}

// ---------------------------------------------------------------------------

fn monotonicity_suite(rng: &mut ZooRng, budget: usize) -> SuiteOutput {
    let mut exhaustive = PropertyResult::new("anti_monotonicity_exhaustive");
    let mut invariant = PropertyResult::new("invariant_subgroup_constant_exhaustive");
    let mut engine = PropertyResult::new("engine_matches_oracle");
    let mut random = PropertyResult::new("anti_monotonicity_fp_kernels");
    let steps = 4;
    for g in small_groups() {
        let eg = ExplicitGroup::new(&g).expect("small group");
        let subs = enumerate_subgroups(&g).expect("small group");
        let lattices: Vec<LatticeSub> = subs.iter().map(|s| to_lattice(&g, s).expect("subgroup")).collect();
        // A few dozen endomorphisms per group keep the pairwise check small.
        for m in enumerate_endomorphisms(&g, 24) {
            let phi = to_endo(&g, &m).expect("compatible");
            let op = OperatorDesc::IntEndo(phi.clone());
            let brute: Vec<Vec<u64>> =
                subs.iter().map(|s| brute_cotrajectory(&g, &m, &s.generators, steps).expect("small group")).collect();
            for (i, s) in subs.iter().enumerate() {
                let desc = || format!("G={:?} phi={m:?} N={:?}", g.factors(), s.generators);
                let via_engine = cotrajectory_orders(&op, &CofiniteSubgroup::Lattice(lattices[i].clone()), steps);
                let as_u64: Option<Vec<u64>> =
                    via_engine.ok().map(|v| v.iter().map(|c| u64::try_from(c).unwrap_or(0)).collect());
                engine.record(as_u64.as_ref() == Some(&brute[i]), desc);
                if phi.is_invariant(&lattices[i]) {
                    let index = (eg.order() / s.elements.len()) as u64;
                    invariant.record(brute[i].iter().all(|&c| c == index), desc);
                }
                for (j, t) in subs.iter().enumerate() {
                    if is_subset(s, t) {
                        exhaustive.record(brute[i].iter().zip(&brute[j]).all(|(a, b)| a >= b), || {
                            format!("{} M={:?}", desc(), t.generators)
                        });
                    }
                }
            }
        }
    }
    let config = EngineConfig::default();
    for _ in 0..budget {
        let p = zoo::random_prime(rng);
        let op = zoo::random_sequence_op(rng, p);
        let big = zoo::random_rows(rng, &op, 4);
        let cut = rng.gen_range(1..=big.len());
        let small = big[..cut].to_vec();
        let orders_ok = match (cotrajectory_orders(&op, &kernel(&big), 16), cotrajectory_orders(&op, &kernel(&small), 16)) {
            (Ok(x), Ok(y)) => x.iter().zip(&y).all(|(u, v)| u >= v),
            _ => false,
        };
        let h_ok = match (hstar(&op, &kernel(&big), &config), hstar(&op, &kernel(&small), &config)) {
            (Ok(x), Ok(y)) => x.value.alpha() >= y.value.alpha(),
            _ => true,
        };
        random.record(orders_ok && h_ok, || format!("op={} N={} M={}", op_json(&op), rows_json(&big), rows_json(&small)));
    }
    (vec![exhaustive, invariant, engine, random], Vec::new())
}

fn is_subset(a: &ExplicitSubgroup, b: &ExplicitSubgroup) -> bool {
    a.elements.is_subset(&b.elements)
}

// ---------------------------------------------------------------------------

/// Step budget within which narrow instances must reach their fixpoint.
pub const NARROW_MAX_STEPS: usize = 64;

fn random_cofinite(rng: &mut ZooRng, g: &FgGroup) -> LatticeSub {
    let k = g.dim();
    let mut gens: Vec<Vec<BigInt>> = (0..k)
        .map(|i| {
            let mut v = vec![BigInt::from(0); k];
            v[i] = BigInt::from(rng.gen_range(1..=6));
            v
        })
        .collect();
    gens.push((0..k).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect());
    LatticeSub::from_generators(g, &gens).expect("well-formed generators")
}

fn narrow_suite(rng: &mut ZooRng, budget: usize) -> SuiteOutput {
    let mut fixpoint = PropertyResult::new("fixpoint_within_budget");
    let mut oracle = PropertyResult::new("oracle_agreement");
    let config = EngineConfig { max_steps: NARROW_MAX_STEPS, window: Some(NARROW_MAX_STEPS + 1) };
    for run in 0..budget {
        // Every other instance is a finite group small enough for the oracle.
        let phi = if run % 2 == 0 {
            let factors: Vec<u64> = loop {
                let t = rng.gen_range(1..=2);
                let f: Vec<u64> = (0..t).map(|_| rng.gen_range(2..=36)).collect();
                if f.iter().product::<u64>() <= 512 {
                    break f;
                }
            };
            zoo::random_endo_on(rng, &FgGroup::from_u64(0, &factors).expect("valid moduli"))
        } else {
            zoo::random_int_endo(rng, 4, 36)
        };
        let g = phi.group().clone();
        let n_sub = random_cofinite(rng, &g);
        let op = OperatorDesc::IntEndo(phi.clone());
        let desc = || format!("phi={:?} N={:?}", phi, n_sub);
        let r = hstar(&op, &CofiniteSubgroup::Lattice(n_sub.clone()), &config);
        fixpoint.record(r.as_ref().is_ok_and(|r| r.value == EntropyValue::Zero && r.exact), || {
            format!("{} outcome={:?}", desc(), r.as_ref().map(|r| r.value.clone()).map_err(|e| e.to_string()))
        });
        if let Ok(fg) = FiniteAbGroup::from_fg(&g) {
            if fg.order() <= crate::oracle::MAX_ORDER {
                let m: Vec<Vec<u64>> = (0..g.dim())
                    .map(|i| {
                        (0..g.dim())
                            .map(|j| {
                                let d = BigInt::from(fg.factors()[i]);
                                u64::try_from(num_integer::Integer::mod_floor(phi.matrix().get(i, j), &d)).expect("residue")
                            })
                            .collect()
                    })
                    .collect();
                let gens: Vec<Vec<u64>> = n_sub
                    .basis_rows()
                    .iter()
                    .zip(0..)
                    .map(|(r, _)| {
                        r.iter()
                            .zip(fg.factors())
                            .map(|(x, &d)| u64::try_from(num_integer::Integer::mod_floor(x, &BigInt::from(d))).expect("residue"))
                            .collect()
                    })
                    .collect();
                let steps = 8;
                let brute = brute_cotrajectory(&fg, &m, &gens, steps);
                let engine = cotrajectory_orders(&op, &CofiniteSubgroup::Lattice(n_sub.clone()), steps);
                let ok = match (brute, engine) {
                    (Ok(b), Ok(e)) => b.iter().map(|&x| BigUint::from(x)).collect::<Vec<_>>() == e,
                    _ => false,
                };
                oracle.record(ok, desc);
            }
        }
    }
    (vec![fixpoint, oracle], Vec::new())
}

/// `true` iff every element of the list is `1`.
pub fn all_one(xs: &[BigUint]) -> bool {
    xs.iter().all(One::is_one)
}
