//! The zero-or-infinity classifier for `ent*`, with certificates that can be
//! re-checked independently of the classifier.
//!
//! Over `F_p` an operator has `ent* = 0` exactly when some nonzero polynomial
//! annihilates it. Algebraic certificates carry that polynomial; non-algebraic
//! certificates carry, for a list of probe polynomials `f`, a vector `v_f` with
//! `f(φ) v_f ≠ 0` together with the structural reason this holds for every
//! nonzero `f`.

use serde::{Deserialize, Serialize};

use crate::engine::{hstar, CofiniteSubgroup, EngineConfig, EntropyValue};
use crate::error::{Error, Result};
use crate::fpla::{min_poly, FpMat, FpPoly, FpVec, IndexTag, SparseVec};
use crate::intlat::{narrow_test, reduce_mod_p, FgEndo, GroupDescriptor, LatticeSub};
use crate::operators::{direct_index, OperatorDesc, RepeatRule};

/// Largest degree of the probe polynomials stored in a non-algebraic witness.
const PROBE_DEGREE: usize = 2;
/// Cap on the number of probes per witness.
const MAX_PROBES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `f(φ) = 0` (on `G/pG` for integer endomorphisms).
    Algebraic { p: u32, f: FpPoly },
    NonAlgebraic { p: u32, witness: Witness },
    Narrow { reason: String },
    Divisible,
    /// `φ^s = φ^t` with `s < t`.
    QuasiPeriodic { s: u64, t: u64 },
}

/// One probe: `f(φ) v ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    pub f: FpPoly,
    /// Support of `v` as `(index, value)` pairs.
    pub v: Vec<(i64, u32)>,
    /// Support of `f(φ) v`.
    pub image: Vec<(i64, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Witness {
    /// Shifts: `f(β) e_0` is the coefficient vector of `f` (right and two-sided
    /// shifts) and `f(λ) e_{deg f}` is its reversal (left shift), so no nonzero
    /// `f` kills the operator.
    ShiftCoefficients { probes: Vec<Probe> },
    /// Block modules `⊕ F_p[X]/(f_n)` with unbounded `deg f_n`: an annihilator
    /// would be divisible by every `f_n`. Each probe uses the generator of a
    /// block whose degree exceeds `deg f`.
    UnboundedBlocks { probes: Vec<Probe> },
    /// `g(φ)` with `g` nonconstant (or `φ^k`, `k ≥ 1`) over a non-algebraic
    /// `φ`: `h(g(φ)) = (h∘g)(φ)` and `h∘g ≠ 0`.
    Composed { inner: Box<Witness> },
    /// A non-algebraic summand of a direct sum.
    Summand { index: usize, inner: Box<Witness> },
}

impl Certificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificates serialize")
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Certificate::Algebraic { .. } => "algebraic",
            Certificate::NonAlgebraic { .. } => "non_algebraic",
            Certificate::Narrow { .. } => "narrow",
            Certificate::Divisible => "divisible",
            Certificate::QuasiPeriodic { .. } => "quasi_periodic",
        }
    }
}

/// Decides `ent*(φ) ∈ {0, ∞}` and returns a certificate.
pub fn classify_ent_star(op: &OperatorDesc) -> Result<(EntropyValue, Certificate)> {
    op.validate()?;
    match op {
        OperatorDesc::DivisibleTrivial => Ok((EntropyValue::Zero, Certificate::Divisible)),
        OperatorDesc::IntEndo(phi) => {
            let g = phi.group();
            let torsion = g.torsion().iter().map(|d| d.try_into().map_err(|_| Error::Unsupported("torsion modulus too large".into())));
            let desc = GroupDescriptor::FinitelyGenerated { free_rank: g.free_rank(), torsion: torsion.collect::<Result<_>>()? };
            let verdict = narrow_test(&desc)?;
            Ok((EntropyValue::Zero, Certificate::Narrow { reason: verdict.reason }))
        }
        _ => {
            let p = op.p().expect("validated F_p operator");
            Ok(match classify_fp(op)? {
                Algebraicity::Algebraic(f) => (EntropyValue::Zero, Certificate::Algebraic { p, f }),
                Algebraicity::NotAlgebraic(w) => (EntropyValue::Infinite, Certificate::NonAlgebraic { p, witness: w }),
            })
        }
    }
}

enum Algebraicity {
    Algebraic(FpPoly),
    NotAlgebraic(Witness),
}

fn classify_fp(op: &OperatorDesc) -> Result<Algebraicity> {
    let p = op.p().expect("F_p operator");
    Ok(match op {
        OperatorDesc::FiniteDim(m) => Algebraicity::Algebraic(min_poly(m)?),
        OperatorDesc::RightShift { .. } | OperatorDesc::LeftShift { .. } | OperatorDesc::TwoSidedShift { .. } => {
            Algebraicity::NotAlgebraic(Witness::ShiftCoefficients { probes: shift_probes(op)? })
        }
        OperatorDesc::BlockDiag { blocks, repeat: RepeatRule::RepeatLast, .. } => {
            Algebraicity::Algebraic(blocks.iter().fold(FpPoly::one(p), |acc, f| acc.lcm(f)))
        }
        OperatorDesc::BlockDiag { repeat: RepeatRule::GrowLinear, .. } => {
            Algebraicity::NotAlgebraic(Witness::UnboundedBlocks { probes: block_probes(op)? })
        }
        OperatorDesc::DirectSum(parts) => {
            let mut f = FpPoly::one(p);
            for (index, part) in parts.iter().enumerate() {
                match classify_fp(part)? {
                    Algebraicity::Algebraic(g) => f = f.lcm(&g),
                    Algebraicity::NotAlgebraic(w) => {
                        return Ok(Algebraicity::NotAlgebraic(Witness::Summand { index, inner: Box::new(w) }))
                    }
                }
            }
            Algebraicity::Algebraic(f)
        }
        OperatorDesc::PolyOf(g, inner) => {
            if g.degree().unwrap_or(0) == 0 {
                // g(φ) = c·id.
                return Ok(Algebraicity::Algebraic(FpPoly::x(p).sub(&FpPoly::constant(p, g.coeff(0)))));
            }
            match classify_fp(inner)? {
                Algebraicity::Algebraic(f) => Algebraicity::Algebraic(pushforward_annihilator(&f, g)?),
                Algebraicity::NotAlgebraic(w) => Algebraicity::NotAlgebraic(Witness::Composed { inner: Box::new(w) }),
            }
        }
        OperatorDesc::Power(k, inner) => match classify_fp(inner)? {
            Algebraicity::Algebraic(f) => Algebraicity::Algebraic(pushforward_annihilator(&f, &FpPoly::monomial(p, *k as usize))?),
            Algebraicity::NotAlgebraic(w) => Algebraicity::NotAlgebraic(Witness::Composed { inner: Box::new(w) }),
        },
        OperatorDesc::IntEndo(_) | OperatorDesc::DivisibleTrivial => {
            return Err(Error::Unsupported(format!("{} is not an F_p operator", op.kind_name())))
        }
    })
}

/// Annihilator of `g(φ)` from an annihilator `f` of `φ`: the minimal
/// polynomial `h` of multiplication by `g` on `F_p[X]/(f)`, so `f | h∘g`.
fn pushforward_annihilator(f: &FpPoly, g: &FpPoly) -> Result<FpPoly> {
    let p = f.p();
    let companion = FpMat::companion(p, f.monic().coeffs());
    min_poly(&g.eval_mat(&companion)?)
}

fn nonzero_probe_polys(p: u32) -> Vec<FpPoly> {
    FpPoly::enumerate_up_to(p, PROBE_DEGREE).into_iter().filter(|f| !f.is_zero()).take(MAX_PROBES).collect()
}

/// `f(φ) v` by Horner's rule on the forward action.
fn poly_action(op: &OperatorDesc, f: &FpPoly, v: &FpVec) -> Result<FpVec> {
    let mut acc = SparseVec::zero(v.p(), v.tag());
    for &c in f.coeffs().iter().rev() {
        acc = op.apply(&acc)?;
        acc.axpy(c, v);
    }
    Ok(acc)
}

fn shift_probe_vector(op: &OperatorDesc, f: &FpPoly) -> FpVec {
    let p = f.p();
    match op {
        OperatorDesc::LeftShift { .. } => SparseVec::unit(p, IndexTag::Nat, f.degree().unwrap_or(0) as i64),
        _ => SparseVec::unit(p, op.index_tag(), 0),
    }
}

/// The image `f(φ) v` predicted from the coefficients of `f` alone.
fn shift_expected_image(op: &OperatorDesc, f: &FpPoly) -> Vec<(i64, u32)> {
    let d = f.degree().unwrap_or(0) as i64;
    let coeffs = f.coeffs().iter().enumerate().filter(|(_, &c)| c != 0);
    let mut out: Vec<(i64, u32)> = match op {
        OperatorDesc::LeftShift { .. } => coeffs.map(|(k, &c)| (d - k as i64, c)).collect(),
        OperatorDesc::TwoSidedShift { inverse: true, .. } => coeffs.map(|(k, &c)| (-(k as i64), c)).collect(),
        _ => coeffs.map(|(k, &c)| (k as i64, c)).collect(),
    };
    out.sort();
    out
}

fn shift_probes(op: &OperatorDesc) -> Result<Vec<Probe>> {
    let p = op.p().expect("shift");
    nonzero_probe_polys(p)
        .into_iter()
        .map(|f| {
            let v = shift_probe_vector(op, &f);
            let image = poly_action(op, &f, &v)?.pairs();
            Ok(Probe { f, v: v.pairs(), image })
        })
        .collect()
}

/// First block whose degree exceeds `deg`, if it appears within `limit` blocks.
fn block_exceeding(op: &OperatorDesc, deg: usize, limit: usize) -> Option<usize> {
    (0..limit).find(|&n| op.block_poly(n).and_then(|f| f.degree()).is_some_and(|d| d > deg))
}

fn block_probes(op: &OperatorDesc) -> Result<Vec<Probe>> {
    let p = op.p().expect("block operator");
    let limit = block_limit(op);
    nonzero_probe_polys(p)
        .into_iter()
        .map(|f| {
            let n = block_exceeding(op, f.degree().unwrap_or(0), limit)
                .ok_or_else(|| Error::Unsupported("block degrees do not grow".into()))?;
            let (start, _) = op.block_span(n).expect("block operator");
            let v = SparseVec::unit(p, IndexTag::Nat, start);
            let image = poly_action(op, &f, &v)?.pairs();
            Ok(Probe { f, v: v.pairs(), image })
        })
        .collect()
}

fn block_limit(op: &OperatorDesc) -> usize {
    match op {
        OperatorDesc::BlockDiag { blocks, .. } => blocks.len() + PROBE_DEGREE + 2,
        _ => 0,
    }
}

/// Re-checks a certificate against an operator without calling the classifier.
pub fn verify_certificate(cert: &Certificate, op: &OperatorDesc) -> bool {
    if op.validate().is_err() {
        return false;
    }
    match cert {
        Certificate::Divisible => matches!(op, OperatorDesc::DivisibleTrivial),
        Certificate::Narrow { .. } => match op {
            OperatorDesc::IntEndo(phi) => {
                let g = phi.group();
                let torsion: Option<Vec<u64>> = g.torsion().iter().map(|d| d.try_into().ok()).collect();
                torsion.is_some_and(|torsion| {
                    narrow_test(&GroupDescriptor::FinitelyGenerated { free_rank: g.free_rank(), torsion })
                        .is_ok_and(|v| v.narrow)
                })
            }
            OperatorDesc::DivisibleTrivial => true,
            _ => false,
        },
        Certificate::Algebraic { p, f } => op.p().map_or(matches!(op, OperatorDesc::IntEndo(_)), |q| q == *p)
            && !f.is_zero()
            && f.p() == *p
            && annihilates(op, f).unwrap_or(false),
        Certificate::QuasiPeriodic { s, t } => s < t && quasi_periodic_holds(op, *s, *t).unwrap_or(false),
        Certificate::NonAlgebraic { p, witness } => op.p() == Some(*p) && verify_witness(op, witness).unwrap_or(false),
    }
}

/// Whether `f(φ) = 0`, decided on the structure of the description.
fn annihilates(op: &OperatorDesc, f: &FpPoly) -> Result<bool> {
    let p = f.p();
    if f.is_zero() {
        return Ok(true);
    }
    Ok(match op {
        OperatorDesc::FiniteDim(m) => f.eval_mat(m)?.is_zero(),
        // F_p[X]/(g) is killed by f iff g | f.
        OperatorDesc::BlockDiag { blocks, repeat: RepeatRule::RepeatLast, .. } => blocks.iter().all(|g| g.divides(f)),
        OperatorDesc::BlockDiag { repeat: RepeatRule::GrowLinear, .. } => false,
        OperatorDesc::DirectSum(parts) => {
            for part in parts {
                if !annihilates(part, f)? {
                    return Ok(false);
                }
            }
            true
        }
        OperatorDesc::PolyOf(g, inner) => annihilates(inner, &f.compose(g))?,
        OperatorDesc::Power(k, inner) => annihilates(inner, &f.compose(&FpPoly::monomial(p, *k as usize)))?,
        OperatorDesc::IntEndo(phi) => f.eval_mat(&reduce_mod_p(phi, p as u64)?)?.is_zero(),
        OperatorDesc::DivisibleTrivial => true,
        OperatorDesc::RightShift { .. } | OperatorDesc::LeftShift { .. } | OperatorDesc::TwoSidedShift { .. } => false,
    })
}

fn verify_witness(op: &OperatorDesc, w: &Witness) -> Result<bool> {
    match (w, op) {
        (
            Witness::ShiftCoefficients { probes },
            OperatorDesc::RightShift { .. } | OperatorDesc::LeftShift { .. } | OperatorDesc::TwoSidedShift { .. },
        ) => {
            if probes.is_empty() {
                return Ok(false);
            }
            for pr in probes {
                let v = shift_probe_vector(op, &pr.f);
                let image = poly_action(op, &pr.f, &v)?.pairs();
                if pr.f.is_zero() || v.pairs() != pr.v || image != pr.image || image != shift_expected_image(op, &pr.f) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        (Witness::UnboundedBlocks { probes }, OperatorDesc::BlockDiag { blocks, repeat: RepeatRule::GrowLinear, p }) => {
            // Block len-1+m is f(X^(m+1)): degrees grow without bound iff the last block is nonconstant.
            if probes.is_empty() || blocks.last().and_then(|f| f.degree()).unwrap_or(0) == 0 {
                return Ok(false);
            }
            for pr in probes {
                let Ok(v) = SparseVec::from_pairs(*p, IndexTag::Nat, &pr.v.iter().map(|&(i, x)| (i, x as i64)).collect::<Vec<_>>())
                else {
                    return Ok(false);
                };
                let Some(start) = v.min_index().filter(|_| v.support_len() == 1) else { return Ok(false) };
                let n = (0..block_limit(op)).find(|&n| op.block_span(n).is_some_and(|(s, _)| s == start));
                let Some(n) = n else { return Ok(false) };
                let deg_block = op.block_poly(n).and_then(|f| f.degree()).unwrap_or(0);
                let image = poly_action(op, &pr.f, &v)?;
                if pr.f.is_zero() || deg_block <= pr.f.degree().unwrap_or(0) || image.is_zero() || image.pairs() != pr.image {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        (Witness::Composed { inner }, OperatorDesc::PolyOf(g, inner_op)) => {
            Ok(g.degree().unwrap_or(0) >= 1 && verify_witness(inner_op, inner)?)
        }
        (Witness::Composed { inner }, OperatorDesc::Power(k, inner_op)) => Ok(*k >= 1 && verify_witness(inner_op, inner)?),
        (Witness::Summand { index, inner }, OperatorDesc::DirectSum(parts)) => match parts.get(*index) {
            Some(part) => verify_witness(part, inner),
            None => Ok(false),
        },
        _ => Ok(false),
    }
}

fn quasi_periodic_holds(op: &OperatorDesc, s: u64, t: u64) -> Result<bool> {
    let m = match op {
        OperatorDesc::FiniteDim(m) => m.clone(),
        OperatorDesc::BlockDiag { p, blocks, repeat: RepeatRule::RepeatLast } => {
            // Later blocks repeat the last one, so the listed blocks determine every power.
            FpMat::block_diag(&blocks.iter().map(|f| FpMat::companion(*p, f.coeffs())).collect::<Vec<_>>())
        }
        OperatorDesc::IntEndo(phi) => return Ok(int_powers_agree(phi, s, t)),
        _ => return Ok(false),
    };
    Ok(m.pow(s)? == m.pow(t)?)
}

fn int_powers_agree(phi: &FgEndo, s: u64, t: u64) -> bool {
    let (Ok(s), Ok(t)) = (u32::try_from(s), u32::try_from(t)) else { return false };
    let (a, b) = (phi.pow(s), phi.pow(t));
    let g = phi.group();
    let k = g.dim();
    (0..k).all(|j| {
        let e: Vec<_> = (0..k).map(|i| num_bigint::BigInt::from((i == j) as u8)).collect();
        g.normalize(&a.apply(&e)) == g.normalize(&b.apply(&e))
    })
}

/// Least `(s, t)`, `s < t`, with `m^s = m^t`, by Brent's cycle detection on
/// the power sequence `I, m, m², …`.
pub fn quasi_periodic(m: &FpMat) -> Result<(u64, u64)> {
    if !m.is_square() {
        return Err(Error::Dimension("quasi_periodic needs a square matrix".into()));
    }
    let step = |x: &FpMat| x.mul(m).expect("square");
    let id = FpMat::identity(m.p(), m.rows());
    let mut power = 1u64;
    let mut lam = 1u64;
    let mut tortoise = id.clone();
    let mut hare = step(&id);
    while tortoise != hare {
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        hare = step(&hare);
        lam += 1;
    }
    let mut tortoise = id.clone();
    let mut hare = m.pow(lam)?;
    let mut mu = 0u64;
    while tortoise != hare {
        tortoise = step(&tortoise);
        hare = step(&hare);
        mu += 1;
    }
    Ok((mu, mu + lam))
}

/// Mod-`p` algebraicity certificates for an integer endomorphism: `f_p` with
/// `f_p(φ)(G) ⊆ pG`, one per prime.
pub fn mod_p_certificates(phi: &FgEndo, primes: &[u32]) -> Result<Vec<Certificate>> {
    primes
        .iter()
        .map(|&p| {
            let m = reduce_mod_p(phi, p as u64)?;
            let f = if m.rows() == 0 { FpPoly::one(p) } else { min_poly(&m)? };
            Ok(Certificate::Algebraic { p, f })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeMember {
    pub label: String,
    pub value: Option<EntropyValue>,
    pub exact: bool,
}

/// Cross-check of the classifier against the engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub classification: EntropyValue,
    pub certificate_verified: bool,
    pub members: Vec<ProbeMember>,
    /// Largest per-subgroup value reached (`LowerBound`).
    pub lower_bound: EntropyValue,
    pub inconclusive: usize,
    pub contradictions: Vec<String>,
    pub note: Option<String>,
}

impl ProbeReport {
    pub fn consistent(&self) -> bool {
        self.certificate_verified && self.contradictions.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "classification": self.classification.to_json(),
            "certificate_verified": self.certificate_verified,
            "members": self.members.iter().map(|m| serde_json::json!({
                "subgroup": m.label,
                "value": m.value.as_ref().map(EntropyValue::to_json),
                "exact": m.exact,
            })).collect::<Vec<_>>(),
            "lower_bound": self.lower_bound.to_json(),
            "inconclusive": self.inconclusive,
            "contradictions": self.contradictions,
            "note": self.note,
        })
    }
}

/// Deterministic subgroup family used by [`consistency_probe`].
pub fn probe_family(op: &OperatorDesc, budget: usize) -> Vec<(String, CofiniteSubgroup)> {
    let budget = budget.max(1);
    let mut out = Vec::new();
    match op {
        OperatorDesc::DivisibleTrivial => out.push(("G".to_string(), CofiniteSubgroup::Whole)),
        OperatorDesc::IntEndo(phi) => {
            let g = phi.group();
            for m in 2..(2 + budget as i64) {
                out.push((format!("{m}G"), CofiniteSubgroup::Lattice(LatticeSub::multiples(g, m))));
            }
        }
        OperatorDesc::DirectSum(parts) => {
            let p = op.p().expect("F_p operator");
            let tag = op.index_tag();
            let k = parts.len();
            // N_j = kernel of the first coordinate functional of each of the first j summands.
            for j in 1..=k.min(budget) {
                let rows = (0..j).map(|b| SparseVec::unit(p, tag, direct_index(k, b, 0))).collect();
                out.push((format!("block kernels 0..{j}"), CofiniteSubgroup::FpKernel(rows)));
            }
            for i in 0..budget.saturating_sub(k) {
                out.push((format!("ker e_{i}*"), CofiniteSubgroup::FpKernel(vec![SparseVec::unit(p, tag, i as i64)])));
            }
        }
        _ => {
            let p = op.p().expect("F_p operator");
            let tag = op.index_tag();
            let dim = op.finite_dim().unwrap_or(usize::MAX);
            let count = budget.min(dim);
            for i in 0..count {
                out.push((format!("ker e_{i}*"), CofiniteSubgroup::FpKernel(vec![SparseVec::unit(p, tag, i as i64)])));
            }
            if count >= 2 {
                let rows = vec![SparseVec::unit(p, tag, 0), SparseVec::unit(p, tag, count as i64 - 1)];
                out.push((format!("ker e_0* ∩ ker e_{}*", count - 1), CofiniteSubgroup::FpKernel(rows)));
            }
        }
    }
    out
}

/// Runs the engine on [`probe_family`] and checks it against the classifier.
pub fn consistency_probe(op: &OperatorDesc, budget: usize) -> Result<ProbeReport> {
    let (classification, cert) = classify_ent_star(op)?;
    let certificate_verified = verify_certificate(&cert, op);
    let config = EngineConfig::default();
    let mut members = Vec::new();
    let mut contradictions = Vec::new();
    let mut inconclusive = 0;
    let mut best = num_bigint::BigUint::from(1u32);
    for (label, n) in probe_family(op, budget) {
        match hstar(op, &n, &config) {
            Ok(r) => {
                let alpha = r.value.alpha().expect("per-subgroup value");
                if classification.is_zero() && !r.value.is_zero() {
                    contradictions.push(format!("classifier says zero but H* = {} on {label}", r.value));
                }
                if classification.is_zero() && !r.exact {
                    contradictions.push(format!("classifier says zero but {label} did not reach a fixpoint"));
                }
                if let Some(v) = r.trace.law_violations().first() {
                    contradictions.push(format!("growth law violated on {label}: {v}"));
                }
                best = best.max(alpha);
                members.push(ProbeMember { label, value: Some(r.value), exact: r.exact });
            }
            Err(Error::Inconclusive { .. }) => {
                inconclusive += 1;
                members.push(ProbeMember { label, value: None, exact: false });
            }
            Err(e) => return Err(e),
        }
    }
    let note = (classification == EntropyValue::Infinite).then(|| {
        "ent* is infinite by certificate; a finite family only yields a lower bound".to_string()
    });
    Ok(ProbeReport {
        classification,
        certificate_verified,
        members,
        lower_bound: EntropyValue::LowerBound(best),
        inconclusive,
        contradictions,
        note,
    })
}
