//! Acceptance criteria 1-9, one pass/fail line each. Suites 1-8 run through
//! the library; criterion 9 drives the `fninf` binary against the fixtures.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use fninf_core::suites::{run_suite, DEFAULT_SEED, SUITE_IDS};
use fninf_core::words::ThetaSpec;
use fninf_core::{PlMap, Word};
use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn fninf(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_fninf"))
        .args(args)
        .current_dir(fixtures())
        .output()
        .expect("fninf runs")
}

fn check_maps(dir: &Path) -> Result<usize, String> {
    let mut count = 0;
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .flatten()
        .map(|e| e.path())
        .collect();
    paths.sort();
    for path in paths {
        let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let map: PlMap =
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let again = serde_json::to_string(&map).unwrap() + "\n";
        if again != text {
            return Err(format!("{} does not round-trip", path.display()));
        }
        count += 1;
    }
    Ok(count)
}

fn check_words(path: &Path) -> Result<usize, String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    for line in text.lines() {
        let w: Word = line.parse().map_err(|e| format!("{line:?}: {e}"))?;
        if w.to_string() != line {
            return Err(format!("word {line:?} prints as {w}"));
        }
    }
    Ok(text.lines().count())
}

fn check_theta(path: &Path) -> Result<usize, String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let spec: ThetaSpec = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    if serde_json::to_string(&spec).unwrap() + "\n" != text {
        return Err("theta spec does not round-trip".into());
    }
    Ok(1)
}

/// Every manifest command reproduces its stored report byte for byte, and
/// every stored report survives a parse/print cycle.
fn check_reports() -> Result<usize, String> {
    let dir = fixtures();
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.join("commands.json")).unwrap()).unwrap();
    let entries = manifest.as_array().ok_or("manifest is not a list")?;
    for entry in entries {
        let name = entry["name"].as_str().unwrap();
        let args: Vec<&str> = entry["args"]
            .as_array()
            .unwrap()
            .iter()
            .map(|a| a.as_str().unwrap())
            .collect();
        let expected = fs::read_to_string(dir.join(format!("reports/{name}.json")))
            .map_err(|e| e.to_string())?;
        let out = fninf(&args);
        let stdout = String::from_utf8(out.stdout).unwrap();
        if stdout != expected {
            return Err(format!("{name}: report differs from the fixture"));
        }
        if out.status.code() != entry["exit"].as_i64().map(|c| c as i32) {
            return Err(format!("{name}: exit code {:?}", out.status.code()));
        }
        let parsed: Value = serde_json::from_str(&stdout).map_err(|e| format!("{name}: {e}"))?;
        if serde_json::to_string_pretty(&parsed).unwrap() + "\n" != stdout {
            return Err(format!("{name}: report does not round-trip"));
        }
    }
    Ok(entries.len())
}

fn check_selftest() -> Result<usize, String> {
    let out = fninf(&["selftest"]);
    let report: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    if out.status.code() != Some(0) || report["status"] != "ok" {
        return Err(format!("selftest exited with {:?}", out.status.code()));
    }
    let suites = report["payload"]["suites"].as_array().map_or(0, Vec::len);
    if suites != 8 {
        return Err(format!("selftest ran {suites} suites"));
    }
    Ok(1)
}

fn cli_criterion() -> Result<usize, String> {
    let dir = fixtures();
    let mut n = check_maps(&dir.join("maps"))?;
    n += check_words(&dir.join("words.txt"))?;
    n += check_theta(&dir.join("theta_a.json"))?;
    n += check_reports()?;
    n += check_selftest()?;
    Ok(n)
}

fn main() -> ExitCode {
    let mut failed = 0;
    for id in SUITE_IDS {
        let r = run_suite(id, DEFAULT_SEED);
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {id} ({}): {verdict}: {} in {:.2?} (limit {:?})",
            r.name, r.detail, r.elapsed, r.limit
        );
        failed += usize::from(!r.passed);
    }
    let start = Instant::now();
    match cli_criterion() {
        Ok(n) => println!(
            "criterion 9 (cli round-trips and selftest): PASS: {n} fixtures in {:.2?}",
            start.elapsed()
        ),
        Err(e) => {
            println!("criterion 9 (cli round-trips and selftest): FAIL: {e}");
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
