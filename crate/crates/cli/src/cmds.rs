//! Command implementations. Each builds a JSON artifact embedding the
//! resolved configuration and input hashes, prints a short human summary
//! on stdout, and maps its verdict onto the exit-code contract.

use serde_json::{json, Value};
use std::path::Path;

use fcone_core::boundarycert::{self, CertError, SymmetricFn};
use fcone_core::curves;
use fcone_core::fnef::{self, CyclicFn};
use fcone_core::groundset;
use fcone_core::lift;
use fcone_core::picard::DivisorClass;
use fcone_core::rational::{as_i64, format_rat, int, parse_rat, Rat};
use fcone_core::ratlp::{Feasibility, LpOutcome, RationalSystem, Rel, VarKind};
use fcone_core::strongf::{
    self, ray_index_values, verify_all_supports, SearchOptions, StrongFError, SymmetrizedOutcome,
};
use fcone_core::acceptance;
use num::{One, Signed};

use crate::artifact::{self, HashedInput};
use crate::{CmdResult, Failure, Outcome};

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// A JSON value that is either a machine integer or a `"p/q"` string.
fn rat_of_value(v: &Value) -> Result<Rat, Failure> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(int)
            .ok_or_else(|| usage(format!("number {n} is not a machine integer"))),
        Value::String(s) => parse_rat(s).map_err(|e| usage(e.to_string())),
        other => Err(usage(format!("expected an integer or \"p/q\" string, got {other}"))),
    }
}

fn rats_of_values(vs: &[Value]) -> Result<Vec<Rat>, Failure> {
    vs.iter().map(rat_of_value).collect()
}

fn rat_json(r: &Rat) -> Value {
    Value::String(format_rat(r))
}

fn rats_json(rs: &[Rat]) -> Value {
    Value::Array(rs.iter().map(rat_json).collect())
}

fn mask_members(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

fn strongf_failure(e: StrongFError) -> Failure {
    match e {
        StrongFError::BudgetExceeded(msg) => Failure::Budget(msg.to_string()),
        other => usage(other.to_string()),
    }
}

// ---------------------------------------------------------------------------
// fnef check

/// Parses a function file: a bare array of n values, or an object
/// `{ "modulus": m, "values": [...] }`; values are integers or `"p/q"`.
fn parse_fn_file(bytes: &[u8], modulus: i64) -> Result<Vec<Rat>, Failure> {
    let v: Value =
        serde_json::from_slice(bytes).map_err(|e| usage(format!("function file: {e}")))?;
    let values = match &v {
        Value::Array(a) => rats_of_values(a)?,
        Value::Object(o) => {
            if let Some(m) = o.get("modulus") {
                if m.as_i64() != Some(modulus) {
                    return Err(usage(format!(
                        "file modulus {m} does not match --modulus {modulus}"
                    )));
                }
            }
            let vals = o
                .get("values")
                .and_then(Value::as_array)
                .ok_or_else(|| usage("function file object needs a \"values\" array"))?;
            rats_of_values(vals)?
        }
        _ => return Err(usage("function file must be an array or an object")),
    };
    if values.len() != modulus as usize {
        return Err(usage(format!(
            "function file has {} values, expected {modulus}",
            values.len()
        )));
    }
    Ok(values)
}

/// Clears denominators by the least common multiple. Bracket signs are
/// invariant under positive scaling, so the check is unaffected; the
/// factor is recorded in the artifact.
fn integer_table(values: &[Rat]) -> Result<(Vec<i64>, i64), Failure> {
    use num::Integer;
    let mut denom = num::BigInt::one();
    for v in values {
        denom = denom.lcm(v.denom());
    }
    let scale = Rat::from_integer(denom);
    let table = values
        .iter()
        .map(|v| {
            as_i64(&(v * &scale))
                .ok_or_else(|| usage(format!("value {} does not scale into machine range", format_rat(v))))
        })
        .collect::<Result<Vec<i64>, Failure>>()?;
    let k = as_i64(&scale).ok_or_else(|| usage("common denominator exceeds machine range"))?;
    Ok((table, k))
}

pub fn fnef_check(modulus: i64, function: &str, out: Option<&Path>) -> CmdResult {
    let mut inputs: Vec<HashedInput> = Vec::new();
    let (f, scaled_by) = match function {
        "standard" => (fnef::standard_a_fn(modulus).map_err(|e| usage(e.to_string()))?, 1),
        "total" => (fnef::total_t(modulus).map_err(|e| usage(e.to_string()))?, 1),
        path => {
            let input = artifact::read_input("fn", Path::new(path))?;
            let values = parse_fn_file(&input.bytes, modulus)?;
            inputs.push(input);
            let (table, k) = integer_table(&values)?;
            (CyclicFn::new(modulus, table).map_err(|e| usage(e.to_string()))?, k)
        }
    };
    let violation = fnef::first_bracket_violation(&f);
    let report = json!({
        "modulus": modulus,
        "scaled_by": scaled_by,
        "fnef": violation.is_none(),
        "violation": violation.map(|(x, y, z)| json!({
            "x": x, "y": y, "z": z, "bracket": fnef::bracket(&f, x, y, z),
        })),
    });
    let config = json!({ "modulus": modulus, "fn": function });
    artifact::write(out, &artifact::envelope("fnef check", config, &inputs, report))?;
    match violation {
        None => {
            println!("fnef check: modulus {modulus}, {function}: every bracket is nonnegative");
            Ok(Outcome::Success)
        }
        Some((x, y, z)) => {
            println!(
                "fnef check: modulus {modulus}, {function}: bracket({x}, {y}, {z}) = {} < 0",
                fnef::bracket(&f, x, y, z)
            );
            Ok(Outcome::Refuted)
        }
    }
}

// ---------------------------------------------------------------------------
// lift

pub fn lift(
    n: usize,
    divisor: &Path,
    primes: Option<&[i64]>,
    multiplier: Option<i64>,
    out: Option<&Path>,
) -> CmdResult {
    let input = artifact::read_input("divisor", divisor)?;
    let d: DivisorClass =
        serde_json::from_slice(&input.bytes).map_err(|e| usage(format!("divisor file: {e}")))?;
    if d.n() != n {
        return Err(usage(format!("divisor has n = {}, flag says n = {n}", d.n())));
    }
    if n < 4 {
        return Err(usage("lifting needs at least four markings"));
    }
    let expected = lift::first_primes(n - 1);
    if let Some(given) = primes {
        if given != expected {
            return Err(usage(format!(
                "only the first n-1 primes are supported; expected {expected:?}, got {given:?}"
            )));
        }
    }
    let config = json!({
        "n": n,
        "primes": expected,
        "multiplier": multiplier,
    });
    let lifted = match multiplier {
        Some(c) => lift::lift_with_multiplier(&d, c),
        None => lift::lift(&d),
    };
    let l = match lifted {
        Ok(l) => l,
        Err(lift::LiftError::NotFnef([x, y, z])) => {
            let report = json!({
                "fnef": false,
                "violation": {
                    "x": mask_members(x), "y": mask_members(y), "z": mask_members(z),
                },
            });
            artifact::write(out, &artifact::envelope("lift", config, &[input], report))?;
            println!("lift: divisor is not F-nef; violated on a four-part partition");
            return Ok(Outcome::Refuted);
        }
        Err(e) => return Err(usage(e.to_string())),
    };
    let report_checks = lift::verify_lift(&d, &l).map_err(|e| usage(e.to_string()))?;
    let sig = groundset::sigma(n).map_err(|e| usage(e.to_string()))?;
    let a_table: Vec<Value> = sig
        .subsets()
        .iter()
        .map(|s| {
            json!({
                "subset": s.members(),
                "A": l.weights().subset_sum(s.mask()),
            })
        })
        .collect();
    let report = json!({
        "c": l.multiplier(),
        "N": l.weights().modulus(),
        "A": a_table,
        "weights": l.weights().weights(),
        "verified": report_checks.all_ok(),
        "checks": {
            "fnef": report_checks.fnef,
            "class_match": report_checks.class_match,
            "curve_identities": report_checks.curve_identities,
            "st_vanishing": report_checks.st_vanishing,
            "dominated": report_checks.dominated,
        },
    });
    let verified = report_checks.all_ok();
    artifact::write(out, &artifact::envelope("lift", config, &[input], report))?;
    println!(
        "lift: n = {n}, N = {}, c = {}, verified = {verified}",
        l.weights().modulus(),
        l.multiplier()
    );
    if verified {
        Ok(Outcome::Success)
    } else {
        Ok(Outcome::Refuted)
    }
}

// ---------------------------------------------------------------------------
// certify

/// Parses a size-profile file: a bare array of n+1 values or an object
/// `{ "n": n, "values": [...] }`.
fn parse_profile_file(bytes: &[u8], n: u32) -> Result<Vec<Rat>, Failure> {
    let v: Value =
        serde_json::from_slice(bytes).map_err(|e| usage(format!("profile file: {e}")))?;
    let values = match &v {
        Value::Array(a) => rats_of_values(a)?,
        Value::Object(o) => {
            if let Some(m) = o.get("n") {
                if m.as_u64() != Some(n as u64) {
                    return Err(usage(format!("file n = {m} does not match --n {n}")));
                }
            }
            let vals = o
                .get("values")
                .and_then(Value::as_array)
                .ok_or_else(|| usage("profile file object needs a \"values\" array"))?;
            rats_of_values(vals)?
        }
        _ => return Err(usage("profile file must be an array or an object")),
    };
    Ok(values)
}

/// The lexicographically first type triple with a negative bracket.
fn first_type_violation(f: &SymmetricFn) -> Option<(u32, u32, u32)> {
    let n = f.n();
    for a in 1..n {
        for b in a..n {
            for c in b..n {
                if a + b + c <= n && f.bracket_type(a, b, c).is_negative() {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

pub fn certify(n: u32, file: &Path, strict_only: bool, out: Option<&Path>) -> CmdResult {
    let input = artifact::read_input("symmetric-fn", file)?;
    let values = parse_profile_file(&input.bytes, n)?;
    let f = SymmetricFn::new(n, values).map_err(|e| usage(e.to_string()))?;
    let config = json!({ "n": n, "strict_only": strict_only });
    if let Some((a, b, c)) = first_type_violation(&f) {
        let report = json!({
            "fnef_symmetric": false,
            "violation": { "a": a, "b": b, "c": c, "bracket": rat_json(&f.bracket_type(a, b, c)) },
        });
        artifact::write(out, &artifact::envelope("certify", config, &[input], report))?;
        println!("certify: profile is not F-nef; type ({a}, {b}, {c}) pairs negatively");
        return Ok(Outcome::Refuted);
    }
    let mut certified: Vec<Value> = Vec::new();
    for parts in groundset::partitions(n) {
        if parts.len() < 2 {
            continue;
        }
        let strict = parts.windows(2).all(|w| w[0] != w[1]);
        if strict_only && !strict {
            continue;
        }
        match boundarycert::certificate_for_partition(&f, &parts) {
            Ok((w, route)) => certified.push(json!({
                "parts": parts,
                "route": format!("{route:?}"),
                "weights": serde_json::to_value(&w).expect("weight serialization"),
            })),
            Err(CertError::NotCertifiable(p)) => {
                let report = json!({
                    "fnef_symmetric": true,
                    "certified": false,
                    "failed_partition": p,
                    "partitions": certified,
                });
                artifact::write(out, &artifact::envelope("certify", config, &[input], report))?;
                println!("certify: no certificate for partition {p:?}");
                return Ok(Outcome::Refuted);
            }
            Err(e) => return Err(usage(e.to_string())),
        }
    }
    let count = certified.len();
    let report = json!({
        "fnef_symmetric": true,
        "certified": true,
        "count": count,
        "partitions": certified,
    });
    artifact::write(out, &artifact::envelope("certify", config, &[input], report))?;
    println!(
        "certify: n = {n}, {count} {}partitions certified",
        if strict_only { "strict " } else { "" }
    );
    Ok(Outcome::Success)
}

// ---------------------------------------------------------------------------
// strongf verify

pub fn strongf_verify(
    n: usize,
    checkpoint: Option<&Path>,
    threads: usize,
    node_budget: Option<u64>,
    batch: usize,
    sample_stride: u64,
    out: Option<&Path>,
) -> CmdResult {
    if threads > 1 {
        eprintln!("note: the search kernel is sequential; --threads {threads} is recorded only");
    }
    let opts = SearchOptions {
        node_budget,
        checkpoint: checkpoint.map(Path::to_path_buf),
        checkpoint_batch: batch,
        sample_stride,
    };
    let report = verify_all_supports(n, &opts).map_err(strongf_failure)?;
    let config = json!({
        "n": n,
        "checkpoint": checkpoint.map(|p| p.display().to_string()),
        "threads": threads,
        "node_budget": node_budget,
        "checkpoint_batch": batch,
        "sample_stride": sample_stride,
    });
    let report_json = serde_json::to_value(&report).expect("report serialization");
    artifact::write(out, &artifact::envelope("strongf verify", config, &[], report_json))?;
    println!(
        "strongf verify: n = {n}, visited = {}, pruned = {}, critical = {}, failures = {}, resumed = {}{}",
        report.nodes_visited,
        report.pruned,
        report.critical,
        report.failures.len(),
        report.resumed,
        if report.budget_exhausted { " (budget exhausted, checkpoint resumable)" } else { "" },
    );
    if !report.failures.is_empty() {
        Ok(Outcome::Refuted)
    } else if report.budget_exhausted {
        Err(Failure::Budget(format!(
            "stopped after {} fresh nodes; rerun with the same checkpoint to resume",
            report.nodes_visited
        )))
    } else {
        Ok(Outcome::Success)
    }
}

// ---------------------------------------------------------------------------
// pbd rays / biplane

pub fn pbd_rays(n: usize, max_rays: usize, out: Option<&Path>) -> CmdResult {
    let opts = fcone_core::ratlp::DdOptions { max_rays };
    let rays = strongf::pbd_extremal_rays(n, &opts).map_err(strongf_failure)?;
    let mut all_indices: std::collections::BTreeSet<i64> = std::collections::BTreeSet::new();
    let mut ray_reports: Vec<Value> = Vec::new();
    for ray in &rays {
        let attainable = ray_index_values(n, ray).map_err(strongf_failure)?;
        all_indices.extend(attainable.iter().copied());
        let degrees: Vec<Value> = (1..n).map(|i| rat_json(&ray.degree(i))).collect();
        ray_reports.push(json!({
            "design": serde_json::to_value(ray).expect("design serialization"),
            "index": rat_json(ray.index()),
            "attainable_indices": attainable,
            "degrees": degrees,
            "effective": ray.is_effective(),
        }));
    }
    let (lo, hi) = (all_indices.iter().next().copied(), all_indices.iter().last().copied());
    let report = json!({
        "orbit_count": rays.len(),
        "index_min": lo,
        "index_max": hi,
        "rays": ray_reports,
    });
    let config = json!({ "n": n, "max_rays": max_rays });
    artifact::write(out, &artifact::envelope("pbd rays", config, &[], report))?;
    println!(
        "pbd rays: n = {n}: {} extremal ray orbits, index range {}..{}",
        rays.len(),
        lo.map_or("-".into(), |v| v.to_string()),
        hi.map_or("-".into(), |v| v.to_string()),
    );
    Ok(Outcome::Success)
}

pub fn pbd_biplane(separate: bool, out: Option<&Path>) -> CmdResult {
    let b = curves::paley_biplane();
    let n = b.n();
    let degrees: Vec<Value> = (1..n).map(|i| rat_json(&b.degree(i))).collect();
    let mut report = json!({
        "design": serde_json::to_value(&b).expect("design serialization"),
        "index": rat_json(b.index()),
        "degrees": degrees,
        "effective": b.is_effective(),
    });
    println!(
        "pbd biplane: n = {n}, index = {}, degrees all {}, effective = {}",
        format_rat(b.index()),
        format_rat(&b.degree(1)),
        b.is_effective()
    );
    let config = json!({ "separate": separate });
    if separate {
        let class = b.class();
        let group = curves::paley_symmetries();
        match strongf::fcone_member_invariant(&class, &group) {
            Ok(SymmetrizedOutcome::Separated { divisor }) => {
                let check = strongf::witness_pair_check(&class, &divisor)
                    .map_err(strongf_failure)?;
                if !check {
                    return Err(usage("separating functional failed the witness pair check"));
                }
                report["separation"] = json!({
                    "route": "automorphism-invariant subspace",
                    "separator": serde_json::to_value(&divisor).expect("divisor serialization"),
                    "witness_pair_check": true,
                });
                println!("pbd biplane: separated from the F-curve cone; witness verified");
            }
            Ok(SymmetrizedOutcome::Inconclusive) => {
                return Err(Failure::Budget(
                    "invariant-subspace separation was inconclusive".into(),
                ))
            }
            Err(e) => return Err(strongf_failure(e)),
        }
    }
    artifact::write(out, &artifact::envelope("pbd biplane", config, &[], report))?;
    Ok(Outcome::Success)
}

// ---------------------------------------------------------------------------
// lp solve

#[derive(serde::Deserialize)]
struct SystemFile {
    vars: Vec<String>,
    rows: Vec<RowFile>,
    #[serde(default)]
    objective: Option<ObjectiveFile>,
}

#[derive(serde::Deserialize)]
struct RowFile {
    coeffs: Vec<Value>,
    rel: String,
    rhs: Value,
}

#[derive(serde::Deserialize)]
struct ObjectiveFile {
    sense: String,
    coeffs: Vec<Value>,
}

pub fn lp_solve(system: &Path, out: Option<&Path>) -> CmdResult {
    let input = artifact::read_input("system", system)?;
    let file: SystemFile =
        serde_json::from_slice(&input.bytes).map_err(|e| usage(format!("system file: {e}")))?;
    let kinds = file
        .vars
        .iter()
        .map(|k| match k.as_str() {
            "nonneg" => Ok(VarKind::NonNeg),
            "free" => Ok(VarKind::Free),
            other => Err(usage(format!("unknown variable kind {other:?}"))),
        })
        .collect::<Result<Vec<VarKind>, Failure>>()?;
    let mut sys = RationalSystem::new(kinds);
    for row in &file.rows {
        let rel = match row.rel.as_str() {
            "eq" => Rel::Eq,
            "ge" => Rel::Ge,
            "le" => Rel::Le,
            other => return Err(usage(format!("unknown relation {other:?}"))),
        };
        sys.push_row(rats_of_values(&row.coeffs)?, rel, rat_of_value(&row.rhs)?)
            .map_err(|e| usage(e.to_string()))?;
    }
    let config = json!({ "objective": file.objective.is_some() });
    let (report, outcome) = match &file.objective {
        None => match sys.feasible().map_err(|e| usage(e.to_string()))? {
            Feasibility::Feasible(x) => (
                json!({ "status": "feasible", "point": rats_json(&x) }),
                Outcome::Success,
            ),
            Feasibility::Infeasible(lam) => (
                json!({ "status": "infeasible", "farkas": rats_json(&lam) }),
                Outcome::Refuted,
            ),
        },
        Some(objf) => {
            let obj = rats_of_values(&objf.coeffs)?;
            let solved = match objf.sense.as_str() {
                "min" => sys.minimize(&obj),
                "max" => sys.maximize(&obj),
                other => return Err(usage(format!("unknown sense {other:?}"))),
            }
            .map_err(|e| usage(e.to_string()))?;
            match solved {
                LpOutcome::Optimal { point, value } => (
                    json!({
                        "status": "optimal",
                        "point": rats_json(&point),
                        "value": rat_json(&value),
                    }),
                    Outcome::Success,
                ),
                LpOutcome::Infeasible { farkas } => (
                    json!({ "status": "infeasible", "farkas": rats_json(&farkas) }),
                    Outcome::Refuted,
                ),
                LpOutcome::Unbounded { point, ray } => (
                    json!({
                        "status": "unbounded",
                        "point": rats_json(&point),
                        "ray": rats_json(&ray),
                    }),
                    Outcome::Success,
                ),
            }
        }
    };
    let status = report["status"].as_str().unwrap_or("?").to_string();
    artifact::write(out, &artifact::envelope("lp solve", config, &[input], report))?;
    println!("lp solve: {status}");
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// repro

pub fn repro(suite: &str, scratch: Option<&Path>, out: Option<&Path>) -> CmdResult {
    if suite != "desk" {
        return Err(usage(format!("unknown suite {suite:?}; available: desk")));
    }
    let default_scratch = std::env::temp_dir().join("fcone-repro");
    let scratch = scratch.unwrap_or(&default_scratch);
    std::fs::create_dir_all(scratch)
        .map_err(|e| usage(format!("cannot create scratch {}: {e}", scratch.display())))?;
    let results = acceptance::run_desk_suite(scratch, |r| {
        println!("[{}] {}. {} — {}", if r.passed { "PASS" } else { "FAIL" }, r.id, r.title, r.detail);
    });
    let all_passed = results.iter().all(|r| r.passed);
    let criteria: Vec<Value> = results
        .iter()
        .map(|r| {
            json!({
                "id": r.id,
                "title": r.title,
                "passed": r.passed,
                "detail": r.detail,
            })
        })
        .collect();
    let report = json!({ "suite": "desk", "all_passed": all_passed, "criteria": criteria });
    let config = json!({ "suite": suite, "seed": acceptance::SUITE_SEED });
    artifact::write(out, &artifact::envelope("repro", config, &[], report))?;
    if all_passed {
        println!("repro: desk suite passed ({} criteria)", results.len());
        Ok(Outcome::Success)
    } else {
        println!("repro: desk suite FAILED");
        Ok(Outcome::Refuted)
    }
}
