use std::process::{Command, Output};

fn fninf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fninf"))
        .args(args)
        .current_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures"))
        .output()
        .expect("fninf runs")
}

#[test]
fn usage_errors_name_the_flag_and_exit_2() {
    let out = fninf(&["transport", "--n", "2", "--k", "3", "--t1", "1/3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--t2"));

    let out = fninf(&["fixed-slope", "--n", "2", "--t0", "0.25"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--t0"));

    let out = fninf(&["interpolate", "--n", "2", "--pairs", "(0,0);(1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--pairs"));
}

#[test]
fn negative_arguments_are_values() {
    let out = fninf(&["eval", "maps/g3_1.json", "-5/2"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["payload"], "-5/2");
}

#[test]
fn text_format_prints_a_summary() {
    let out = fninf(&["--format", "text", "fixed-slope", "--n", "3", "--t0", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "fixed-slope: ok\n(x-2 | 3x-2 on [0,2] | x+2)\n"
    );
}

#[test]
fn reports_and_out_files_feed_later_commands() {
    let dir = std::env::temp_dir().join(format!("fninf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let map = dir.join("g.json");
    let report = dir.join("report.json");
    let out = fninf(&[
        "word-eval",
        "--n",
        "2",
        "g(0)^2",
        "--out",
        map.to_str().unwrap(),
    ]);
    std::fs::write(&report, &out.stdout).unwrap();
    for input in [&map, &report] {
        let out = fninf(&["eval", input.to_str().unwrap(), "1/2"]);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["payload"], "2");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn timing_is_opt_in() {
    let plain = fninf(&["phi", "--n", "5", "7/25"]);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains("timing_ms"));
    let timed = fninf(&["--timing", "phi", "--n", "5", "7/25"]);
    assert!(String::from_utf8_lossy(&timed.stdout).contains("timing_ms"));
}
