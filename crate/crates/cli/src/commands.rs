use std::fs;
use std::path::Path;

use fninf_core::construct::{centralizer_extend, fixed_slope_element, interpolate, transport};
use fninf_core::involutions::{
    conjugacy_invariant, conjugate_involutions, fixed_point_in_half_lattice,
};
use fninf_core::nadic::{decompose_rational, phi_of};
use fninf_core::suites::{run_all, run_suite};
use fninf_core::thompson::{factorize, is_member, mu1, mu2, nu1, nu2};
use fninf_core::words::{exotic_order2_check, theta_word_from, word_eval, ThetaSpec};
use fninf_core::{Error, HalfLineMap, PlMap, Rational, Side, Word};
use serde_json::{json, Value};

use crate::report::{Report, Status};
use crate::{Cli, Command};

/// Bad files or malformed arguments; reported on stderr with exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

struct Outcome {
    status: Status,
    payload: Value,
    summary: String,
    map: Option<PlMap>,
}

impl Outcome {
    fn ok(payload: Value, summary: impl Into<String>) -> Self {
        Outcome {
            status: Status::Ok,
            payload,
            summary: summary.into(),
            map: None,
        }
    }

    fn check(passed: bool, payload: Value, summary: impl Into<String>) -> Self {
        Outcome {
            status: if passed { Status::Ok } else { Status::Fail },
            ..Outcome::ok(payload, summary)
        }
    }

    fn map(map: PlMap) -> Self {
        Outcome {
            summary: map.to_string(),
            payload: map_json(&map),
            map: Some(map),
            status: Status::Ok,
        }
    }
}

fn map_json(map: &PlMap) -> Value {
    serde_json::to_value(map).expect("maps serialize")
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload serializes")
}

fn read_json(path: &Path) -> Result<Value, InputError> {
    let text = fs::read_to_string(path)
        .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| InputError(format!("{} is not valid JSON: {e}", path.display())))
}

/// A bare PL map, or a report whose payload is a map or holds one under
/// `map` or `conjugator`.
fn map_from_value(v: &Value) -> Option<std::result::Result<PlMap, String>> {
    if v.get("breakpoints").is_some() || v.get("pieces").is_some() {
        return Some(serde_json::from_value(v.clone()).map_err(|e| e.to_string()));
    }
    ["payload", "map", "conjugator"]
        .iter()
        .find_map(|key| v.get(*key).and_then(map_from_value))
}

fn load_map(path: &Path) -> Result<PlMap, InputError> {
    let v = read_json(path)?;
    match map_from_value(&v) {
        Some(Ok(map)) => Ok(map),
        Some(Err(e)) => Err(InputError(format!("{}: {e}", path.display()))),
        None => Err(InputError(format!("{} holds no PL map", path.display()))),
    }
}

fn load_right_half(path: &Path, anchor: &Rational) -> Result<HalfLineMap, InputError> {
    let v = read_json(path)?;
    let bad = |e: String| InputError(format!("{}: {e}", path.display()));
    if let Some(obj_anchor) = v.get("anchor") {
        let given: Rational =
            serde_json::from_value(obj_anchor.clone()).map_err(|e| bad(e.to_string()))?;
        if v.get("side")
            .and_then(Value::as_str)
            .is_some_and(|s| s != "right")
        {
            return Err(bad("extension needs a right half-line map".into()));
        }
        let map = match v.get("map").and_then(map_from_value) {
            Some(m) => m.map_err(bad)?,
            None => return Err(bad("missing \"map\"".into())),
        };
        return HalfLineMap::restrict(&map, &given, Side::Right).map_err(|e| bad(e.to_string()));
    }
    let map = load_map(path)?;
    HalfLineMap::restrict(&map, anchor, Side::Right).map_err(|e| bad(e.to_string()))
}

fn parse_pairs(text: &str) -> Result<Vec<(Rational, Rational)>, InputError> {
    let bad = |part: &str| InputError(format!("--pairs: cannot read {part:?} as (x,y)"));
    text.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|part| {
            let inner = part
                .strip_prefix('(')
                .and_then(|p| p.strip_suffix(')'))
                .ok_or_else(|| bad(part))?;
            let (x, y) = inner.split_once(',').ok_or_else(|| bad(part))?;
            let x = x.trim().parse().map_err(|_| bad(part))?;
            let y = y.trim().parse().map_err(|_| bad(part))?;
            Ok((x, y))
        })
        .collect()
}

fn s(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn run(cli: &Cli) -> Result<Report, InputError> {
    let (name, inputs, result) = dispatch(&cli.command)?;
    let report = match result {
        Ok(outcome) => {
            if let (Some(path), Some(map)) = (&cli.out, &outcome.map) {
                let text = serde_json::to_string(map).expect("maps serialize");
                fs::write(path, text + "\n")
                    .map_err(|e| InputError(format!("--out {}: {e}", path.display())))?;
            }
            Report {
                command: name.to_string(),
                inputs,
                status: outcome.status,
                payload: outcome.payload,
                summary: outcome.summary,
                timing_ms: None,
            }
        }
        Err(err) => Report::from_error(name, inputs, &err),
    };
    Ok(report)
}

type Dispatched = (&'static str, Value, std::result::Result<Outcome, Error>);

fn dispatch(cmd: &Command) -> Result<Dispatched, InputError> {
    Ok(match cmd {
        Command::Phi { n, x } => {
            let result = phi_of(x, *n)
                .map(|r| Outcome::ok(json!(r.value), format!("{} mod {}", r.value, r.modulus)));
            ("phi", json!({"n": n, "x": s(x)}), result)
        }
        Command::Decompose { n, t0 } => {
            let result = decompose_rational(t0, *n).map(|d| {
                let summary = format!("{t0} = {} / ({n}^{} ({n}^{} - 1))", d.k, d.t, d.s);
                Outcome::ok(to_json(&d), summary)
            });
            ("decompose", json!({"n": n, "t0": s(t0)}), result)
        }
        Command::Eval { map, x } => {
            let f = load_map(map)?;
            let y = f.eval(x);
            let inputs = json!({"map": map_json(&f), "x": s(x)});
            ("eval", inputs, Ok(Outcome::ok(s(&y), y.to_string())))
        }
        Command::Compose { a, b } => {
            let (fa, fb) = (load_map(a)?, load_map(b)?);
            let inputs = json!({"a": map_json(&fa), "b": map_json(&fb)});
            ("compose", inputs, Ok(Outcome::map(fa.compose(&fb))))
        }
        Command::Invert { map } => {
            let f = load_map(map)?;
            (
                "invert",
                json!({"map": map_json(&f)}),
                Ok(Outcome::map(f.invert())),
            )
        }
        Command::Member { n, map } => {
            let f = load_map(map)?;
            let r = is_member(&f, *n);
            let summary = if r.member {
                format!("member of F_{{{n},inf}}")
            } else {
                r.violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            };
            let outcome = Outcome::check(r.member, to_json(&r), summary);
            ("member", json!({"n": n, "map": map_json(&f)}), Ok(outcome))
        }
        Command::Chars { n, t0, map } => {
            let f = load_map(map)?;
            let result = (|| {
                let (m1, v1) = (mu1(&f, t0, *n)?, nu1(&f, t0, *n)?);
                let (m2, v2) = (mu2(&f, *n)?, nu2(&f, *n)?);
                let summary = format!("mu1={m1} nu1={v1} mu2={m2} nu2={v2}");
                Ok(Outcome::ok(
                    json!({"mu1": m1, "nu1": v1, "mu2": m2, "nu2": v2}),
                    summary,
                ))
            })();
            (
                "chars",
                json!({"n": n, "t0": s(t0), "map": map_json(&f)}),
                result,
            )
        }
        Command::Interpolate { n, pairs } => {
            let parsed = parse_pairs(pairs)?;
            let echo: Vec<Value> = parsed.iter().map(|(x, y)| json!([s(x), s(y)])).collect();
            let result = interpolate(*n, &parsed).map(Outcome::map);
            ("interpolate", json!({"n": n, "pairs": echo}), result)
        }
        Command::Transport { n, k, t1, t2 } => {
            let result = transport(*n, *k, t1, t2).map(|t| Outcome {
                payload: json!({"map": map_json(&t.map), "middle": [s(&t.middle.0), s(&t.middle.1)]}),
                summary: format!("{} (x + {} on [{}, {}])", t.map, t2 - t1, t.middle.0, t.middle.1),
                map: Some(t.map),
                status: Status::Ok,
            });
            (
                "transport",
                json!({"n": n, "k": k, "t1": s(t1), "t2": s(t2)}),
                result,
            )
        }
        Command::FixedSlope { n, t0 } => {
            let result = fixed_slope_element(*n, t0).map(Outcome::map);
            ("fixed-slope", json!({"n": n, "t0": s(t0)}), result)
        }
        Command::Fixpoint { map } => {
            let f = load_map(map)?;
            let result = f
                .unique_fixed_point()
                .map(|t| Outcome::ok(s(&t), t.to_string()));
            ("fixpoint", json!({"map": map_json(&f)}), result)
        }
        Command::Extend { n, h, right } => {
            let hm = load_map(h)?;
            let anchor = hm.unique_fixed_point().unwrap_or_else(|_| Rational::zero());
            let r = load_right_half(right, &anchor)?;
            let inputs = json!({"n": n, "h": map_json(&hm), "right": to_json(&r)});
            (
                "extend",
                inputs,
                centralizer_extend(&r, &hm, *n).map(Outcome::map),
            )
        }
        Command::ConjugateInvolutions { n, k, h, m1, m2 } => {
            let (hm, a, b) = (load_map(h)?, load_map(m1)?, load_map(m2)?);
            let inputs =
                json!({"n": n, "k": k, "h": map_json(&hm), "m1": map_json(&a), "m2": map_json(&b)});
            let result = conjugate_involutions(*n, &hm, &a, &b, *k).map(|c| Outcome {
                summary: format!("g = {}", c.conjugator),
                payload: to_json(&c),
                map: Some(c.conjugator),
                status: Status::Ok,
            });
            ("conjugate-involutions", inputs, result)
        }
        Command::Invariant { n, k, m } => {
            let f = load_map(m)?;
            let result = conjugacy_invariant(*n, *k, &f)
                .map(|r| Outcome::ok(to_json(&r), format!("{} mod {}", r.value, r.modulus)));
            (
                "invariant",
                json!({"n": n, "k": k, "m": map_json(&f)}),
                result,
            )
        }
        Command::HalfLattice { n, m } => {
            let f = load_map(m)?;
            let result = fixed_point_in_half_lattice(*n, &f).map(|r| {
                let passed = r.ok && (!r.n_even || r.in_nadic);
                let summary = format!(
                    "t = {}, in (1/2)Z[1/{n}]: {}, in Z[1/{n}]: {}",
                    r.t, r.ok, r.in_nadic
                );
                Outcome::check(passed, to_json(&r), summary)
            });
            ("half-lattice", json!({"n": n, "m": map_json(&f)}), result)
        }
        Command::WordEval { n, word } => {
            let w: Word = word
                .parse()
                .map_err(|e: Error| InputError(format!("WORD: {e}")))?;
            let outcome = Outcome::map(word_eval(*n, &w));
            (
                "word-eval",
                json!({"n": n, "word": w.to_string()}),
                Ok(outcome),
            )
        }
        Command::Factorize { n, map } => {
            let f = load_map(map)?;
            let result =
                factorize(&f, *n).map(|w| Outcome::ok(json!(w.to_string()), w.to_string()));
            ("factorize", json!({"n": n, "map": map_json(&f)}), result)
        }
        Command::VerifyExotic { n, f1, theta } => {
            let (inputs, spec) = match (f1, theta) {
                (Some(path), _) => {
                    let base = load_map(path)?;
                    (
                        json!({"n": n, "f1": map_json(&base)}),
                        theta_word_from(&base),
                    )
                }
                (None, Some(path)) => {
                    let v = read_json(path)?;
                    let spec: ThetaSpec = serde_json::from_value(v.clone())
                        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
                    (json!({"n": n, "theta": v}), Ok(spec))
                }
                (None, None) => unreachable!("clap requires --f1 or --theta"),
            };
            let result = spec.map(|spec| exotic_outcome(*n, &spec));
            ("verify-exotic", inputs, result)
        }
        Command::Selftest { seed, suite } => {
            let results = match suite {
                Some(id) => vec![run_suite(*id, *seed)],
                None => run_all(*seed),
            };
            let passed = results.iter().all(|r| r.passed);
            let summary = results
                .iter()
                .map(|r| {
                    format!(
                        "{} suite {} ({}): {}",
                        if r.passed { "pass" } else { "FAIL" },
                        r.id,
                        r.name,
                        r.detail
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            let outcome = Outcome::check(passed, json!({"suites": to_json(&results)}), summary);
            (
                "selftest",
                json!({"seed": seed, "suite": suite}),
                Ok(outcome),
            )
        }
    })
}

fn exotic_outcome(n: u32, spec: &ThetaSpec) -> Outcome {
    let report = exotic_order2_check(n, spec);
    let g0 = fninf_core::thompson::generator_g(n, 0);
    let moves_g0 = word_eval(n, &spec.instantiate(n, 0)) != g0;
    let summary = report
        .checks
        .iter()
        .map(|c| {
            format!(
                "{}: {}",
                c.generator,
                if c.equal { "fixed" } else { "MOVED" }
            )
        })
        .collect::<Vec<_>>()
        .join(", ");
    let payload = json!({
        "theta_word": spec.w.to_string(),
        "theta_moves_g0": moves_g0,
        "ok": report.ok,
        "checks": to_json(&report.checks),
    });
    Outcome::check(report.ok, payload, summary)
}
