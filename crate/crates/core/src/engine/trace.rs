use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

/// Exact integers go to JSON as numbers when they fit in `u64`, else as strings.
pub fn big_to_json(x: &BigUint) -> Value {
    match x.to_u64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

/// Order sequence `c_n = |C_n|` (or `|T_n|`) with stabilization metadata.
///
/// `orders[n-1]` holds `c_n`; `alpha[n-2]` holds `α_n = c_n / c_{n-1}` for `n ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthTrace {
    pub p: Option<u32>,
    pub orders: Vec<BigUint>,
    pub log_p: Option<Vec<u64>>,
    pub alpha: Vec<BigUint>,
    pub stabilized: bool,
    pub n_stab: Option<usize>,
    pub alpha_final: Option<BigUint>,
    pub exact: bool,
}

impl GrowthTrace {
    pub(crate) fn new(p: Option<u32>) -> Self {
        GrowthTrace {
            p,
            orders: Vec::new(),
            log_p: p.map(|_| Vec::new()),
            alpha: Vec::new(),
            stabilized: false,
            n_stab: None,
            alpha_final: None,
            exact: false,
        }
    }

    /// Records `c_{n+1}` and returns `α_{n+1}`; panics if `c_n ∤ c_{n+1}` or
    /// `α_{n+1} ∤ α_n`, both of which hold for every chain the engines build.
    pub(crate) fn push(&mut self, order: BigUint, log: Option<u64>) -> Option<BigUint> {
        if let (Some(logs), Some(l)) = (self.log_p.as_mut(), log) {
            logs.push(l);
        }
        let alpha = self.orders.last().map(|prev| {
            let (q, r) = order.div_rem(prev);
            assert!(r.is_zero(), "growth law violated: c_n = {prev} does not divide c_(n+1) = {order}");
            q
        });
        if let (Some(a), Some(prev_a)) = (alpha.as_ref(), self.alpha.last()) {
            assert!(
                (prev_a % a).is_zero(),
                "growth law violated: alpha_(n+1) = {a} does not divide alpha_n = {prev_a}"
            );
        }
        self.orders.push(order);
        if let Some(a) = &alpha {
            self.alpha.push(a.clone());
        }
        alpha
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    /// `c_n`, 1-based.
    pub fn c(&self, n: usize) -> &BigUint {
        &self.orders[n - 1]
    }

    /// Leading constant `a_0 = c_{n_stab}` of the geometric tail.
    pub fn a0(&self) -> Option<&BigUint> {
        self.n_stab.map(|n| self.c(n))
    }

    /// Checks every growth law on the recorded prefix and returns the violations.
    ///
    /// Laws: `c_n | c_{n+1}`; `α_{n+1} | α_n`; `c_{n+m} ≤ c_n c_m`; and, once
    /// stabilized, `c_n = a_0 α^(n - n_stab)`.
    pub fn law_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let c = &self.orders;
        for n in 1..c.len() {
            if !(&c[n] % &c[n - 1]).is_zero() {
                out.push(format!("c_{} does not divide c_{}", n, n + 1));
            }
        }
        for n in 1..self.alpha.len() {
            if !(&self.alpha[n - 1] % &self.alpha[n]).is_zero() {
                out.push(format!("alpha_{} does not divide alpha_{}", n + 2, n + 1));
            }
        }
        for n in 1..=c.len() {
            for m in 1..=c.len() - n {
                if c[n + m - 1] > &c[n - 1] * &c[m - 1] {
                    out.push(format!("subadditivity fails at n={n}, m={m}"));
                }
            }
        }
        if let (true, Some(ns), Some(a)) = (self.stabilized, self.n_stab, self.alpha_final.as_ref()) {
            let a0 = self.c(ns).clone();
            let mut expect = a0;
            for n in ns..=c.len() {
                if self.c(n) != &expect {
                    out.push(format!("geometric tail fails at n={n}"));
                    break;
                }
                expect *= a;
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "alpha": self.alpha.iter().map(big_to_json).collect::<Vec<_>>(),
            "stabilized": self.stabilized,
            "n_stab": self.n_stab,
            "alpha_final": self.alpha_final.as_ref().map(big_to_json),
            "exact": self.exact,
        });
        match &self.log_p {
            Some(logs) => v["c_log_p"] = json!(logs),
            None => v["c"] = json!(self.orders.iter().map(big_to_json).collect::<Vec<_>>()),
        }
        if let Some(p) = self.p {
            v["p"] = json!(p);
        }
        v
    }
}

impl Serialize for GrowthTrace {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// Symbolic entropy value: logarithms are always of explicit integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EntropyValue {
    Zero,
    /// `log α` with `α ≥ 2`.
    Log(BigUint),
    Infinite,
    /// The supremum is at least `log α`; `α = 1` records a zero bound.
    LowerBound(BigUint),
}

impl EntropyValue {
    /// `log α`, normalizing `α = 1` to [`EntropyValue::Zero`].
    pub fn log(alpha: BigUint) -> Self {
        if alpha.is_one() {
            EntropyValue::Zero
        } else {
            EntropyValue::Log(alpha)
        }
    }

    /// Base of the logarithm for finite values and bounds (`1` for zero).
    pub fn alpha(&self) -> Option<BigUint> {
        match self {
            EntropyValue::Zero => Some(BigUint::one()),
            EntropyValue::Log(a) | EntropyValue::LowerBound(a) => Some(a.clone()),
            EntropyValue::Infinite => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, EntropyValue::Zero)
    }

    pub fn to_json(&self) -> Value {
        match self {
            EntropyValue::Zero => json!({"value": "zero", "display": self.to_string()}),
            EntropyValue::Log(a) => json!({"value": "log", "alpha": big_to_json(a), "display": self.to_string()}),
            EntropyValue::Infinite => json!({"value": "infinite", "display": self.to_string()}),
            EntropyValue::LowerBound(a) => {
                json!({"value": "lower_bound", "alpha": big_to_json(a), "display": self.to_string()})
            }
        }
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntropyValue::Zero => write!(f, "0"),
            EntropyValue::Log(a) => write!(f, "log {a}"),
            EntropyValue::Infinite => write!(f, "infinity"),
            EntropyValue::LowerBound(a) if a.is_one() => write!(f, ">= 0"),
            EntropyValue::LowerBound(a) => write!(f, ">= log {a}"),
        }
    }
}

impl Serialize for EntropyValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laws_on_a_geometric_trace() {
        let mut t = GrowthTrace::new(Some(2));
        for n in 1..=6u32 {
            t.push(BigUint::from(2u32).pow(n), Some(n as u64));
        }
        t.stabilized = true;
        t.n_stab = Some(1);
        t.alpha_final = Some(BigUint::from(2u32));
        assert!(t.law_violations().is_empty());
        let j = t.to_json();
        assert_eq!(j["c_log_p"], json!([1, 2, 3, 4, 5, 6]));
        assert_eq!(j["alpha_final"], json!(2));
    }

    #[test]
    #[should_panic(expected = "does not divide")]
    fn increasing_alpha_is_rejected() {
        let mut t = GrowthTrace::new(None);
        t.push(BigUint::from(2u32), None);
        t.push(BigUint::from(4u32), None);
        t.push(BigUint::from(16u32), None);
    }

    #[test]
    fn display() {
        assert_eq!(EntropyValue::log(BigUint::from(8u32)).to_string(), "log 8");
        assert_eq!(EntropyValue::log(BigUint::one()), EntropyValue::Zero);
        assert_eq!(EntropyValue::LowerBound(BigUint::one()).to_string(), ">= 0");
    }
}
