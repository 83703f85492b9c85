//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::Rng;

use entstar_core::classify::{classify_ent_star, consistency_probe, verify_certificate, Certificate};
use entstar_core::duality::compare_duality;
use entstar_core::engine::{
    check_inverse_identity, check_power_identity, cotrajectory_orders, h, hstar, log_p_exact, sup_over_family,
    trajectory_orders,
};
use entstar_core::suites::{run_suite, Suite, SuiteReport, DUALITY_STEPS, NARROW_MAX_STEPS, PERP_MAX_N};
use entstar_core::{
    zoo, CofiniteSubgroup, EngineConfig, EntropyValue, FiniteSubgroup, FpPoly, Functional, IndexTag, OperatorDesc,
    RepeatRule, SparseVec,
};

const PRIMES: [u32; 3] = [2, 3, 5];
const SEED: u64 = 0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn unit(p: u32, i: i64) -> Functional {
    SparseVec::unit(p, IndexTag::Nat, i)
}

fn kernel(rows: Vec<Functional>) -> CofiniteSubgroup {
    CofiniteSubgroup::FpKernel(rows)
}

fn logs(orders: &[BigUint], p: u32) -> Vec<usize> {
    orders.iter().map(|c| log_p_exact(c, p).expect("power of p") as usize).collect()
}

fn suite_line(report: &SuiteReport) -> String {
    report
        .properties
        .iter()
        .map(|p| format!("{} {}/{}", p.name, p.checked - p.failed, p.checked))
        .collect::<Vec<_>>()
        .join(", ")
}

fn suite_failures(report: &SuiteReport) -> String {
    report
        .properties
        .iter()
        .filter(|p| !p.passed())
        .map(|p| format!("{} failed {}/{}: {}", p.name, p.failed, p.checked, p.counterexample.as_deref().unwrap_or("no cases")))
        .collect::<Vec<_>>()
        .join("; ")
}

fn one_second(t: Duration) -> bool {
    t < Duration::from_secs(1)
}

// 1. H*(left shift, ker e_0*) = log p, exact.
fn criterion_1() -> Outcome {
    let mut worst = Duration::ZERO;
    for p in PRIMES {
        let op = OperatorDesc::left_shift(p);
        let n = kernel(vec![unit(p, 0)]);
        let start = Instant::now();
        let r = hstar(&op, &n, &EngineConfig::default()).map_err(|e| format!("p={p}: {e}"))?;
        let t = start.elapsed();
        worst = worst.max(t);
        ensure(r.value == EntropyValue::Log(p.into()), || format!("p={p}: value {}", r.value))?;
        ensure(r.exact && r.trace.alpha_final == Some(p.into()), || format!("p={p}: not exact or alpha_final wrong"))?;
        ensure(one_second(t), || format!("p={p}: took {t:?}"))?;
        let expected = common::shift_cotrajectory_logs(&[common::dense(40, 0, &[(0, 1)])], 0, 1, true, p as u64, 20);
        let got = logs(&cotrajectory_orders(&op, &n, 20).map_err(|e| e.to_string())?, p);
        ensure(got == expected, || format!("p={p}: orders {got:?} vs oracle {expected:?}"))?;
    }
    Ok(format!("log p exact for p in {PRIMES:?}, orders match dense oracle, slowest {worst:?}"))
}

// 2. ent(right shift, <e_0>) = log p and ent(left shift, <e_0>) = 0.
fn criterion_2() -> Outcome {
    let mut worst = Duration::ZERO;
    for p in PRIMES {
        let f = FiniteSubgroup::FpSpan(vec![unit(p, 0)]);
        for (op, expected, delta) in [
            (OperatorDesc::right_shift(p), EntropyValue::Log(p.into()), 1),
            (OperatorDesc::left_shift(p), EntropyValue::Zero, -1),
        ] {
            let start = Instant::now();
            let r = h(&op, &f, &EngineConfig::default()).map_err(|e| format!("p={p}: {e}"))?;
            let t = start.elapsed();
            worst = worst.max(t);
            ensure(r.value == expected && r.exact, || format!("p={p} {}: {} exact={}", op.kind_name(), r.value, r.exact))?;
            ensure(one_second(t), || format!("p={p}: took {t:?}"))?;
            // vectors move the opposite way to functionals
            let oracle = common::shift_cotrajectory_logs(&[common::dense(40, 0, &[(0, 1)])], 0, delta, true, p as u64, 16);
            let got = logs(&trajectory_orders(&op, &f, 16).map_err(|e| e.to_string())?, p);
            ensure(got == oracle, || format!("p={p} {}: {got:?} vs oracle {oracle:?}", op.kind_name()))?;
        }
    }
    Ok(format!("right shift log p, left shift 0, exact, trajectories match oracle, slowest {worst:?}"))
}

fn grow_linear(p: u32) -> OperatorDesc {
    OperatorDesc::BlockDiag { p, blocks: vec![FpPoly::new(p, vec![p - 1, 1])], repeat: RepeatRule::GrowLinear }
}

fn expect_class(op: &OperatorDesc, value: EntropyValue) -> Result<(), String> {
    let (v, cert) = classify_ent_star(op).map_err(|e| format!("{}: {e}", op.to_json_value()))?;
    ensure(v == value, || format!("{}: classified {v}", op.to_json_value()))?;
    ensure(verify_certificate(&cert, op), || format!("{}: certificate rejected", op.to_json_value()))
}

// 3. Dichotomy classifier verdicts and certificates.
fn criterion_3() -> Outcome {
    let mut infinite = 0;
    for p in PRIMES {
        for op in [
            OperatorDesc::right_shift(p),
            OperatorDesc::left_shift(p),
            OperatorDesc::two_sided_shift(p),
            OperatorDesc::TwoSidedShift { p, inverse: true },
            grow_linear(p),
        ] {
            expect_class(&op, EntropyValue::Infinite)?;
            infinite += 1;
        }
    }
    let mut rng = zoo::rng(SEED);
    let mut zero = 0;
    expect_class(&OperatorDesc::DivisibleTrivial, EntropyValue::Zero)?;
    zero += 1;
    for _ in 0..25 {
        let p = zoo::random_prime(&mut rng);
        let d = rng.gen_range(1..=6);
        let blocks = (0..rng.gen_range(1..=3))
            .map(|_| {
                let deg = rng.gen_range(1..=3);
                zoo::random_monic(&mut rng, p, deg)
            })
            .collect();
        for op in [
            OperatorDesc::FiniteDim(zoo::random_matrix(&mut rng, p, d)),
            OperatorDesc::IntEndo(zoo::random_int_endo(&mut rng, 3, 36)),
            OperatorDesc::BlockDiag { p, blocks, repeat: RepeatRule::RepeatLast },
        ] {
            expect_class(&op, EntropyValue::Zero)?;
            zero += 1;
        }
    }
    let mut inconclusive = 0;
    for _ in 0..100 {
        let op = zoo::random_zoo_op(&mut rng);
        let (v, cert) = classify_ent_star(&op).map_err(|e| format!("{}: {e}", op.to_json_value()))?;
        ensure(matches!(v, EntropyValue::Zero | EntropyValue::Infinite), || format!("{}: {v}", op.to_json_value()))?;
        ensure(verify_certificate(&cert, &op), || format!("{}: certificate rejected", op.to_json_value()))?;
        let report = consistency_probe(&op, 6).map_err(|e| e.to_string())?;
        ensure(report.contradictions.is_empty(), || format!("{}: {:?}", op.to_json_value(), report.contradictions))?;
        inconclusive += report.inconclusive;
    }
    Ok(format!(
        "{infinite} infinite and {zero} zero verdicts certified; 100 zoo operators, 0 contradictions ({inconclusive} inconclusive probe members)"
    ))
}

// 4. Cotrajectory equals dual trajectory for n <= 32.
fn criterion_4() -> Outcome {
    let mut rng = zoo::rng(SEED);
    let mut kinds = std::collections::BTreeSet::new();
    let mut oracle_checked = 0;
    let pairs = 240;
    for _ in 0..pairs {
        let p = zoo::random_prime(&mut rng);
        let op = zoo::random_sequence_op(&mut rng, p);
        let rows = zoo::random_rows(&mut rng, &op, 3);
        kinds.insert(op.kind_name());
        let c = compare_duality(&op, &rows, DUALITY_STEPS).map_err(|e| format!("{}: {e}", op.to_json_value()))?;
        ensure(c.agrees() && c.cotrajectory.len() == DUALITY_STEPS, || format!("{}: {c:?}", op.to_json_value()))?;
        // Independent check for the one-sided shifts with a dense window.
        let delta = match op {
            OperatorDesc::RightShift { .. } => -1,
            OperatorDesc::LeftShift { .. } => 1,
            _ => continue,
        };
        let dense: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| common::dense(48, 0, &r.iter().map(|(i, x)| (i, x as u64)).collect::<Vec<_>>()))
            .collect();
        let oracle = common::shift_cotrajectory_logs(&dense, 0, delta, true, p as u64, DUALITY_STEPS);
        let got: Vec<usize> = c.cotrajectory.iter().map(|&x| x as usize).collect();
        ensure(got == oracle, || format!("{}: {got:?} vs dense oracle {oracle:?}", op.to_json_value()))?;
        oracle_checked += 1;
    }
    let all = ["finite_dim", "right_shift", "left_shift", "two_sided_shift", "block_diag", "direct_sum", "poly_of", "power"];
    ensure(all.iter().all(|k| kinds.contains(k)), || format!("kinds covered: {kinds:?}"))?;
    Ok(format!("{pairs} pairs over {} kinds agree for n <= {DUALITY_STEPS}; {oracle_checked} also match the dense oracle", kinds.len()))
}

// 5. Exhaustive perp identity on four small groups.
fn criterion_5() -> Outcome {
    let start = Instant::now();
    let report = run_suite(Suite::Perp, SEED, 512);
    let t = start.elapsed();
    ensure(report.passed(), || suite_failures(&report))?;
    ensure(t < Duration::from_secs(60), || format!("took {t:?}"))?;
    let checked = report.property("perp_identity").map_or(0, |p| p.checked);
    Ok(format!("{checked} identity checks for n <= {PERP_MAX_N}, zero failures, {t:?} [{}]", report.notes.join("; ")))
}

// 6. Growth laws on at least 1000 engine runs.
fn criterion_6() -> Outcome {
    let report = run_suite(Suite::GrowthLaws, SEED, 1000);
    ensure(report.passed(), || suite_failures(&report))?;
    let runs = report.property("trace_laws").map_or(0, |p| p.checked);
    ensure(runs >= 1000, || format!("only {runs} runs"))?;
    let tails: usize = ["geometric_tail_exact", "geometric_tail_window"]
        .iter()
        .filter_map(|n| report.property(n))
        .map(|p| p.checked)
        .sum();
    Ok(format!("{runs} runs, divisibility and subadditivity clean, {tails} geometric tails verified"))
}

// 7. Anti-monotonicity and invariant vanishing.
fn criterion_7() -> Outcome {
    let report = run_suite(Suite::Monotonicity, SEED, 200);
    ensure(report.passed(), || suite_failures(&report))?;
    let random = report.property("anti_monotonicity_fp_kernels").map_or(0, |p| p.checked);
    ensure(random >= 200, || format!("only {random} random nestings"))?;
    let growth = run_suite(Suite::GrowthLaws, SEED, 200);
    let vanish = growth.property("invariant_subgroup_vanishes").ok_or("missing property")?;
    ensure(vanish.passed(), || format!("{vanish:?}"))?;
    Ok(format!("{}; engine invariant kernels vanish {}/{}", suite_line(&report), vanish.checked, vanish.checked))
}

// 8. Power and inverse identities.
fn criterion_8() -> Outcome {
    let mut rng = zoo::rng(SEED);
    let mut ops = Vec::new();
    for p in PRIMES {
        ops.extend([
            OperatorDesc::right_shift(p),
            OperatorDesc::left_shift(p),
            OperatorDesc::two_sided_shift(p),
            OperatorDesc::TwoSidedShift { p, inverse: true },
        ]);
        for _ in 0..8 {
            let d = rng.gen_range(1..=6);
            ops.push(OperatorDesc::FiniteDim(zoo::random_matrix(&mut rng, p, d)));
        }
    }
    let (mut power, mut inverse) = (0, 0);
    for op in &ops {
        for _ in 0..3 {
            let rows = zoo::random_rows(&mut rng, op, 3);
            let n = kernel(rows.clone());
            for k in 1..=4 {
                for m in 1..=8 {
                    let ok = check_power_identity(op, &n, k, m).map_err(|e| e.to_string())?;
                    ensure(ok, || format!("power k={k} n={m} {} {rows:?}", op.to_json_value()))?;
                    power += 1;
                }
            }
        }
    }
    // The inverse identity needs automorphisms: two-sided shifts and invertible matrices.
    for p in PRIMES {
        let mut autos = vec![OperatorDesc::two_sided_shift(p), OperatorDesc::TwoSidedShift { p, inverse: true }];
        for _ in 0..8 {
            let d = rng.gen_range(1..=6);
            autos.push(OperatorDesc::FiniteDim(zoo::random_invertible(&mut rng, p, d)));
        }
        for op in &autos {
            for _ in 0..3 {
                let rows = zoo::random_rows(&mut rng, op, 3);
                for m in 1..=8 {
                    let ok = check_inverse_identity(op, &kernel(rows.clone()), m).map_err(|e| e.to_string())?;
                    ensure(ok, || format!("inverse n={m} {} {rows:?}", op.to_json_value()))?;
                    inverse += 1;
                }
            }
        }
    }
    Ok(format!("{power} power checks (k <= 4, n <= 8) and {inverse} inverse checks (n <= 8), zero failures"))
}

// 9. Narrow stabilization.
fn criterion_9() -> Outcome {
    let report = run_suite(Suite::Narrow, SEED, 100);
    ensure(report.passed(), || suite_failures(&report))?;
    let fix = report.property("fixpoint_within_budget").map_or(0, |p| p.checked);
    ensure(fix == 100, || format!("{fix} instances"))?;
    let oracle = report.property("oracle_agreement").map_or(0, |p| p.checked);
    Ok(format!("{fix} instances reach the fixpoint within {NARROW_MAX_STEPS} steps, {oracle} finite instances match the oracle"))
}

// 10. Direct sums of left shifts give unbounded lower bounds.
fn criterion_10() -> Outcome {
    let mut shown = Vec::new();
    for p in PRIMES {
        let mut previous = BigUint::from(1u32);
        for k in 1..=6usize {
            let op = OperatorDesc::DirectSum(vec![OperatorDesc::left_shift(p); k]);
            // e_0* of every summand sits at global index = summand number
            let all = kernel((0..k as i64).map(|i| unit(p, i)).collect());
            let mut family: Vec<CofiniteSubgroup> = (0..k as i64).map(|i| kernel(vec![unit(p, i)])).collect();
            family.push(all.clone());
            let bound = sup_over_family(&op, &family, &EngineConfig::default()).map_err(|e| e.to_string())?;
            let expected = BigUint::from(p).pow(k as u32);
            ensure(bound == EntropyValue::LowerBound(expected.clone()), || format!("p={p} k={k}: {bound}"))?;
            ensure(expected > previous, || format!("p={p} k={k}: bound did not grow"))?;
            previous = expected;
            let rows: Vec<Vec<u64>> = (0..k as i64).map(|i| common::dense(64, 0, &[(i, 1)])).collect();
            let oracle = common::shift_cotrajectory_logs(&rows, 0, k as i64, true, p as u64, 8);
            let got = logs(&cotrajectory_orders(&op, &all, 8).map_err(|e| e.to_string())?, p);
            ensure(got == oracle, || format!("p={p} k={k}: {got:?} vs oracle {oracle:?}"))?;
        }
        shown.push(format!("p={p}: log {p}^1..log {p}^6"));
    }
    Ok(format!("lower bounds k log p for k <= 6 ({})", shown.join(", ")))
}

// 11. Inverse limits: finite quotients are all zero, the limit is infinite.
fn criterion_11() -> Outcome {
    let mut rng = zoo::rng(SEED);
    let mut quotients = 0;
    for p in PRIMES {
        let full = OperatorDesc::right_shift(p);
        let (v, cert) = classify_ent_star(&full).map_err(|e| e.to_string())?;
        ensure(v == EntropyValue::Infinite && verify_certificate(&cert, &full), || format!("p={p}: full shift {v}"))?;
        ensure(matches!(cert, Certificate::NonAlgebraic { .. }), || format!("p={p}: {}", cert.kind_name()))?;
        for i in 1..=12 {
            // G/H_i keeps coordinates 0..i; the induced map is the truncated shift
            let bar = OperatorDesc::FiniteDim(full.truncate(i).map_err(|e| e.to_string())?);
            expect_class(&bar, EntropyValue::Zero)?;
            let mut subgroups: Vec<Vec<Functional>> = (0..i as i64).map(|j| vec![unit(p, j)]).collect();
            subgroups.push(zoo::random_rows(&mut rng, &bar, 3));
            for rows in subgroups {
                let r = hstar(&bar, &kernel(rows.clone()), &EngineConfig::default()).map_err(|e| e.to_string())?;
                ensure(r.value.is_zero() && r.exact, || format!("p={p} i={i} {rows:?}: {}", r.value))?;
            }
            quotients += 1;
        }
    }
    Ok(format!("{quotients} truncated quotients classify 0 with every tested H* = 0; the full right shift classifies infinite"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("H*(left shift, ker e0*) = log p", criterion_1),
        ("ent of one-sided shifts on <e0>", criterion_2),
        ("dichotomy classifier", criterion_3),
        ("duality identity", criterion_4),
        ("perp identity, exhaustive", criterion_5),
        ("growth laws", criterion_6),
        ("anti-monotonicity and invariant vanishing", criterion_7),
        ("power and inverse identities", criterion_8),
        ("narrow stabilization", criterion_9),
        ("direct-sum lower bounds", criterion_10),
        ("no continuity for inverse limits", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("acceptance {:>2} PASS  {name}: {detail} ({t:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("acceptance {:>2} FAIL  {name}: {why} ({t:.2?})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
