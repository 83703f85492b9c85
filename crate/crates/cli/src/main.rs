use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use entstar_core::classify::{classify_ent_star, consistency_probe, verify_certificate, Certificate};
use entstar_core::engine::{h, hstar, sup_over_family};
use entstar_core::suites::{run_suite, Suite};
use entstar_core::{
    CofiniteSubgroup, EngineConfig, Error, FgEndo, FgGroup, FiniteSubgroup, LatticeSub, OperatorDesc,
    SparseVec,
};

const SCHEMA_VERSION: u32 = 1;

const EXIT_MALFORMED: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "entstar", version, about = "Exact algebraic entropy and adjoint algebraic entropy")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Include wall-clock timing (makes reports non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Hstar,
    H,
}

#[derive(clap::Args, Debug)]
struct OpArgs {
    /// Operator descriptor: inline JSON, a path to a JSON file, or a shorthand
    /// (right_shift, left_shift, two_sided_shift, divisible_trivial, multiplication).
    #[arg(long)]
    op: String,
    /// Prime used by shorthand operators.
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Factor used by the `multiplication` shorthand (on ℤ).
    #[arg(long, default_value_t = 2)]
    factor: i64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-subgroup entropy H*(φ, N) or H(φ, F).
    Compute {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long, value_enum, default_value_t = Mode::Hstar)]
        mode: Mode,
        /// Cofinite subgroup N (hstar mode); repeatable.
        #[arg(long)]
        subgroup: Vec<String>,
        /// Finite subgroup F (h mode); repeatable. `e<i>` is the span of a unit vector.
        #[arg(long = "finite-subgroup")]
        finite_subgroup: Vec<String>,
        #[arg(long, default_value_t = 512)]
        max_steps: usize,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Decide ent* ∈ {0, ∞} with a certificate.
    Classify {
        #[command(flatten)]
        op: OpArgs,
        /// Also run the finite-family consistency probe with this many members.
        #[arg(long)]
        probe: Option<usize>,
    },
    /// Run a seeded property suite, or check a certificate.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyTarget {
    Duality(SuiteArgs),
    Dichotomy(SuiteArgs),
    Addition(SuiteArgs),
    GrowthLaws(SuiteArgs),
    Perp(SuiteArgs),
    Monotonicity(SuiteArgs),
    Narrow(SuiteArgs),
    /// Check a certificate (JSON, inline or file) against an operator.
    Certificate {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long)]
        certificate: String,
    },
}

#[derive(clap::Args, Debug)]
struct SuiteArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    budget: Option<usize>,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Malformed(anyhow::Error),
    Inconclusive(Value),
    VerifyFailed(Value),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Malformed(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let command = command_echo();
    let outcome = run(&cli.command);
    let (code, results) = match outcome {
        Ok(v) => (0, v),
        Err(Failure::Malformed(e)) => {
            eprintln!("error: {e:#}");
            (EXIT_MALFORMED, json!({"error": format!("{e:#}")}))
        }
        Err(Failure::Inconclusive(v)) => {
            eprintln!("inconclusive");
            (EXIT_INCONCLUSIVE, v)
        }
        Err(Failure::VerifyFailed(v)) => {
            eprintln!("verification failed");
            (EXIT_VERIFY_FAILED, v)
        }
    };
    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "input_digest": input_digest(&cli.command),
        "exit_code": code,
        "results": results,
    });
    if cli.timing {
        report["timing_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
        Format::Text => print_text(&report),
    }
    ExitCode::from(code)
}

fn command_echo() -> Vec<String> {
    std::env::args().skip(1).filter(|a| a != "--timing").collect()
}

fn input_digest(cmd: &Command) -> String {
    let mut hasher = Sha256::new();
    let mut feed = |s: &str| {
        let text = load_text(s).unwrap_or_else(|_| s.to_string());
        hasher.update(text.as_bytes());
        hasher.update([0u8]);
    };
    match cmd {
        Command::Compute { op, subgroup, finite_subgroup, mode, max_steps, window } => {
            feed(&op.op);
            feed(&format!("{} {} {mode:?} {max_steps} {window:?}", op.p, op.factor));
            subgroup.iter().chain(finite_subgroup).for_each(|s| feed(s));
        }
        Command::Classify { op, probe } => {
            feed(&op.op);
            feed(&format!("{} {} {probe:?}", op.p, op.factor));
        }
        Command::Verify { target: VerifyTarget::Certificate { op, certificate } } => {
            feed(&op.op);
            feed(&format!("{} {}", op.p, op.factor));
            feed(certificate);
        }
        Command::Verify { target } => feed(&format!("{target:?}")),
    }
    hex::encode(hasher.finalize())
}

/// Inline JSON stays as is; anything naming an existing file is read from disk.
fn load_text(s: &str) -> anyhow::Result<String> {
    let t = s.trim_start();
    if !t.starts_with('{') && !t.starts_with('[') && Path::new(s).is_file() {
        return std::fs::read_to_string(s).with_context(|| format!("reading {s}"));
    }
    Ok(s.to_string())
}

fn parse_op(args: &OpArgs) -> anyhow::Result<OperatorDesc> {
    let text = load_text(&args.op)?;
    let p = args.p;
    let op = match text.trim() {
        "right_shift" => OperatorDesc::right_shift(p),
        "left_shift" => OperatorDesc::left_shift(p),
        "two_sided_shift" => OperatorDesc::two_sided_shift(p),
        "divisible_trivial" => OperatorDesc::DivisibleTrivial,
        "multiplication" => OperatorDesc::IntEndo(FgEndo::multiplication(&FgGroup::free(1), args.factor)),
        t => OperatorDesc::from_json_str(t)?,
    };
    op.validate()?;
    Ok(op)
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SubgroupJson {
    /// Common kernel of row functionals given as `[index, value]` pairs.
    Kernel { rows: Vec<Vec<(i64, i64)>> },
    Lattice { generators: Vec<Vec<i64>> },
    Whole,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FiniteSubgroupJson {
    Span { vectors: Vec<Vec<(i64, i64)>> },
    Elements { generators: Vec<Vec<i64>> },
}

fn sparse(op: &OperatorDesc, pairs: &[(i64, i64)]) -> anyhow::Result<SparseVec> {
    let p = op.p().ok_or_else(|| anyhow!("{} is not an F_p operator", op.kind_name()))?;
    Ok(SparseVec::from_pairs(p, op.index_tag(), pairs)?)
}

fn int_group(op: &OperatorDesc) -> anyhow::Result<&FgGroup> {
    match op {
        OperatorDesc::IntEndo(phi) => Ok(phi.group()),
        _ => bail!("lattice subgroups need an int_endo operator"),
    }
}

fn parse_subgroup(op: &OperatorDesc, s: &str) -> anyhow::Result<CofiniteSubgroup> {
    let text = load_text(s)?;
    let j: SubgroupJson = serde_json::from_str(&text).with_context(|| format!("subgroup {s}"))?;
    Ok(match j {
        SubgroupJson::Kernel { rows } => {
            CofiniteSubgroup::FpKernel(rows.iter().map(|r| sparse(op, r)).collect::<anyhow::Result<_>>()?)
        }
        SubgroupJson::Lattice { generators } => {
            let l = LatticeSub::from_i64(int_group(op)?, &generators)?;
            if !l.has_finite_index() {
                bail!("lattice subgroup must have finite index");
            }
            CofiniteSubgroup::Lattice(l)
        }
        SubgroupJson::Whole => CofiniteSubgroup::Whole,
    })
}

fn parse_finite_subgroup(op: &OperatorDesc, s: &str) -> anyhow::Result<FiniteSubgroup> {
    if let Some(i) = s.strip_prefix('e').and_then(|i| i.parse::<i64>().ok()) {
        let p = op.p().ok_or_else(|| anyhow!("`e{i}` needs an F_p operator"))?;
        return Ok(FiniteSubgroup::FpSpan(vec![SparseVec::unit(p, op.index_tag(), i)]));
    }
    let text = load_text(s)?;
    let j: FiniteSubgroupJson = serde_json::from_str(&text).with_context(|| format!("finite subgroup {s}"))?;
    Ok(match j {
        FiniteSubgroupJson::Span { vectors } => {
            FiniteSubgroup::FpSpan(vectors.iter().map(|r| sparse(op, r)).collect::<anyhow::Result<_>>()?)
        }
        FiniteSubgroupJson::Elements { generators } => FiniteSubgroup::Elements {
            group: int_group(op)?.clone(),
            generators: generators.iter().map(|g| g.iter().map(|&x| x.into()).collect()).collect(),
        },
    })
}

/// Engine errors: inconclusive runs keep their trace, everything else is bad input.
fn engine_failure(e: Error, partial: Vec<Value>) -> Failure {
    match e {
        Error::Inconclusive { steps, trace } | Error::FamilyMember { steps, trace, .. } => Failure::Inconclusive(json!({
            "status": "inconclusive",
            "steps": steps,
            "trace": trace.to_json(),
            "completed": partial,
        })),
        e => Failure::Malformed(e.into()),
    }
}

fn run(cmd: &Command) -> Result<Value, Failure> {
    match cmd {
        Command::Compute { op, mode, subgroup, finite_subgroup, max_steps, window } => {
            let op = parse_op(op)?;
            let config = EngineConfig { max_steps: *max_steps, window: *window };
            let mut out = Vec::new();
            match mode {
                Mode::Hstar => {
                    let subs = if subgroup.is_empty() {
                        return Err(anyhow!("--subgroup is required in hstar mode").into());
                    } else {
                        subgroup.iter().map(|s| parse_subgroup(&op, s)).collect::<anyhow::Result<Vec<_>>>()?
                    };
                    for (s, n) in subgroup.iter().zip(&subs) {
                        match hstar(&op, n, &config) {
                            Ok(r) => out.push(json!({"subgroup": s, "entropy": r.to_json()})),
                            Err(e) => return Err(engine_failure(e, out)),
                        }
                    }
                    let mut res = json!({"mode": "hstar", "operator": op.to_json_value(), "subgroups": out});
                    if subs.len() > 1 {
                        let sup = sup_over_family(&op, &subs, &config).map_err(|e| engine_failure(e, Vec::new()))?;
                        res["family_lower_bound"] = sup.to_json();
                    }
                    Ok(res)
                }
                Mode::H => {
                    if finite_subgroup.is_empty() {
                        return Err(anyhow!("--finite-subgroup is required in h mode").into());
                    }
                    let subs =
                        finite_subgroup.iter().map(|s| parse_finite_subgroup(&op, s)).collect::<anyhow::Result<Vec<_>>>()?;
                    for (s, f) in finite_subgroup.iter().zip(&subs) {
                        match h(&op, f, &config) {
                            Ok(r) => out.push(json!({"subgroup": s, "entropy": r.to_json()})),
                            Err(e) => return Err(engine_failure(e, out)),
                        }
                    }
                    Ok(json!({"mode": "h", "operator": op.to_json_value(), "subgroups": out}))
                }
            }
        }
        Command::Classify { op, probe } => {
            let op = parse_op(op)?;
            let (value, cert) = classify_ent_star(&op).map_err(|e| engine_failure(e, Vec::new()))?;
            let verified = verify_certificate(&cert, &op);
            let mut res = json!({
                "operator": op.to_json_value(),
                "ent_star": value.to_json(),
                "certificate": cert.to_json(),
                "certificate_verified": verified,
            });
            if let Some(budget) = probe {
                let r = consistency_probe(&op, *budget).map_err(|e| engine_failure(e, Vec::new()))?;
                res["probe"] = r.to_json();
            }
            if !verified {
                return Err(Failure::VerifyFailed(res));
            }
            Ok(res)
        }
        Command::Verify { target } => match target {
            VerifyTarget::Certificate { op, certificate } => {
                let op = parse_op(op)?;
                let text = load_text(certificate)?;
                let cert: Certificate = serde_json::from_str(&text).context("certificate")?;
                let ok = verify_certificate(&cert, &op);
                let res = json!({"operator": op.to_json_value(), "certificate": cert.to_json(), "verified": ok});
                if ok {
                    Ok(res)
                } else {
                    Err(Failure::VerifyFailed(res))
                }
            }
            other => {
                let (suite, args) = match other {
                    VerifyTarget::Duality(a) => (Suite::Duality, a),
                    VerifyTarget::Dichotomy(a) => (Suite::Dichotomy, a),
                    VerifyTarget::Addition(a) => (Suite::Addition, a),
                    VerifyTarget::GrowthLaws(a) => (Suite::GrowthLaws, a),
                    VerifyTarget::Perp(a) => (Suite::Perp, a),
                    VerifyTarget::Monotonicity(a) => (Suite::Monotonicity, a),
                    VerifyTarget::Narrow(a) => (Suite::Narrow, a),
                    VerifyTarget::Certificate { .. } => unreachable!(),
                };
                let report = run_suite(suite, args.seed, args.budget.unwrap_or(suite.default_budget()));
                if report.passed() {
                    Ok(report.to_json())
                } else {
                    Err(Failure::VerifyFailed(report.to_json()))
                }
            }
        },
    }
}

fn print_text(report: &Value) {
    println!("entstar {} (schema {})", report["version"].as_str().unwrap_or("?"), report["schema_version"]);
    println!("input digest: {}", report["input_digest"].as_str().unwrap_or(""));
    let r = &report["results"];
    if let Some(e) = r.get("error") {
        println!("error: {}", e.as_str().unwrap_or(""));
    }
    if let Some(subs) = r.get("subgroups").and_then(Value::as_array) {
        for s in subs {
            let e = &s["entropy"];
            println!(
                "{}: {} ({}), n_stab = {}",
                s["subgroup"].as_str().unwrap_or(""),
                e["value"]["display"].as_str().unwrap_or(""),
                if e["exact"].as_bool() == Some(true) { "exact" } else { "window rule" },
                e["trace"]["n_stab"]
            );
        }
    }
    if let Some(b) = r.get("family_lower_bound") {
        println!("family lower bound: {}", b["display"].as_str().unwrap_or(""));
    }
    if let Some(v) = r.get("ent_star") {
        println!("ent* = {}", v["display"].as_str().unwrap_or(""));
        println!("certificate: {}", r["certificate"]["kind"].as_str().unwrap_or(""));
        println!("certificate verified: {}", r["certificate_verified"]);
    }
    if let Some(v) = r.get("verified") {
        println!("certificate verified: {v}");
    }
    if r.get("status").and_then(Value::as_str) == Some("inconclusive") {
        println!("inconclusive after {} steps", r["steps"]);
    }
    if let Some(props) = r.get("properties").and_then(Value::as_array) {
        println!("suite {} (seed {}, budget {})", r["suite"].as_str().unwrap_or(""), r["seed"], r["budget"]);
        for p in props {
            let failed = p["failed"].as_u64().unwrap_or(0);
            println!(
                "  {} {}: {}/{} passed",
                if failed == 0 { "ok  " } else { "FAIL" },
                p["name"].as_str().unwrap_or(""),
                p["checked"].as_u64().unwrap_or(0) - failed,
                p["checked"]
            );
            if let Some(c) = p["counterexample"].as_str() {
                println!("       counterexample: {c}");
            }
        }
        for n in r["notes"].as_array().into_iter().flatten() {
            println!("  note: {}", n.as_str().unwrap_or(""));
        }
    }
    println!("exit code: {}", report["exit_code"]);
}
