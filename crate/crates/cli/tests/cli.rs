//! End-to-end tests against the built binary: the catalog contract, the
//! documented exit codes, and byte-level reproducibility of report files.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const KEYS: [&str; 9] = [
    "fatou1", "baker2", "wander1", "exp03", "exp", "expz", "tan2", "tan05", "smale2",
];

fn td() -> Command {
    Command::new(env!("CARGO_BIN_EXE_td"))
}

fn run(args: &[&str]) -> Output {
    td().args(args).output().expect("spawn td")
}

fn context(args: &[&str], out: &Output) -> String {
    format!(
        "td {:?} -> {:?}\nstdout: {}\nstderr: {}",
        args,
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    )
}

/// Run expecting success; parse the report JSON from stdout (no --out).
fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", context(args, &out));
    serde_json::from_slice(&out.stdout).expect("report JSON on stdout")
}

/// Run expecting success with --out somewhere in the args.
fn run_files(args: &[&str]) {
    let out = run(args);
    assert!(out.status.success(), "{}", context(args, &out));
}

/// Run expecting failure; return (exit code, parsed stderr error object).
fn run_err(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    assert!(!out.status.success(), "{}", context(args, &out));
    let err: Value = serde_json::from_slice(&out.stderr).expect("error JSON on stderr");
    (out.status.code().expect("exit code"), err)
}

#[test]
fn catalog_lists_every_key() {
    let rep = report(&["catalog"]);
    let entries = rep["result"].as_array().expect("catalog array");
    let listed: Vec<&str> =
        entries.iter().map(|e| e["key"].as_str().expect("key")).collect();
    assert_eq!(listed, KEYS);
    for e in entries {
        assert!(e["fn"].as_str().is_some_and(|s| !s.is_empty()));
        assert_ne!(e["class"].as_str(), Some("ambiguous"), "unclassified: {e}");
    }
}

#[test]
fn catalog_keys_run_every_applicable_subcommand() {
    for key in KEYS {
        report(&["orbit", "--catalog", key, "--z0", "0.1,0.2", "--iters", "50"]);
        report(&["classify", "--catalog", key, "--z0", "0.1,0.2", "--budget", "300"]);
        report(&[
            "julia", "--catalog", key, "--box", "-2", "2", "-2", "2", "--px", "32",
            "--iters", "60",
        ]);
        report(&[
            "periodic", "--catalog", key, "--period", "1", "--box", "-2", "2", "-2", "2",
            "--grid", "10",
        ]);
        report(&[
            "newton", "smale", "--catalog", key, "--box", "-2", "2", "-2", "2", "--grid",
            "16", "--iters", "400",
        ]);
    }
    // backward orbits of infinity only exist for maps with poles
    for key in ["baker2", "tan2", "tan05"] {
        report(&[
            "julia", "--catalog", key, "--box", "-2", "2", "-2", "2", "--px", "32",
            "--method", "preimage", "--depth", "2",
        ]);
    }
    // the bouquet map family is exp03's
    report(&["bouquet", "--lambda", "0.3", "--n", "2", "--random", "10", "--depth", "6"]);
}

fn julia_args(prefix: &str) -> Vec<String> {
    [
        "julia", "--catalog", "tan2", "--box", "-3", "3", "-3", "3", "--px", "40",
        "--iters", "80", "--out",
    ]
    .iter()
    .map(|s| s.to_string())
    .chain([prefix.to_string()])
    .collect()
}

fn as_strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

#[test]
fn identical_configs_reproduce_report_files_byte_for_byte() {
    let dir = tempfile::tempdir().expect("tempdir");
    let p1 = dir.path().join("a").join("run");
    let prefix = p1.to_str().expect("utf-8 path");

    run_files(&as_strs(&julia_args(prefix)));
    let json1 = fs::read(p1.with_extension("json")).expect("first json");
    let pgm1 = fs::read(p1.with_extension("pgm")).expect("first pgm");

    // same config, same prefix: every artifact byte must come back
    run_files(&as_strs(&julia_args(prefix)));
    assert_eq!(json1, fs::read(p1.with_extension("json")).expect("second json"));
    assert_eq!(pgm1, fs::read(p1.with_extension("pgm")).expect("second pgm"));

    // thread count must not leak into the artifacts
    let mut with_flag = julia_args(prefix);
    with_flag.splice(0..0, ["--threads".to_string(), "1".to_string()]);
    run_files(&as_strs(&with_flag));
    assert_eq!(pgm1, fs::read(p1.with_extension("pgm")).expect("threads=1 pgm"));

    let out = td()
        .env("TD_THREADS", "3")
        .args(as_strs(&julia_args(prefix)))
        .output()
        .expect("spawn td");
    assert!(out.status.success());
    assert_eq!(json1, fs::read(p1.with_extension("json")).expect("env-threads json"));
    assert_eq!(pgm1, fs::read(p1.with_extension("pgm")).expect("env-threads pgm"));
}

#[test]
fn a_report_config_echo_replays_the_run() {
    let dir = tempfile::tempdir().expect("tempdir");
    let prefix_buf = dir.path().join("run");
    let prefix = prefix_buf.to_str().expect("utf-8 path");

    run_files(&as_strs(&julia_args(prefix)));
    let json_path = prefix_buf.with_extension("json");
    let first = fs::read(&json_path).expect("flags json");
    let pgm = fs::read(prefix_buf.with_extension("pgm")).expect("flags pgm");

    let rep: Value = serde_json::from_slice(&first).expect("report parses");
    let cfg_path = dir.path().join("replay.json");
    fs::write(&cfg_path, serde_json::to_vec(&rep["config"]).expect("config echo"))
        .expect("write config");

    run_files(&["--config", cfg_path.to_str().expect("utf-8 path")]);
    assert_eq!(first, fs::read(&json_path).expect("replayed json"));
    assert_eq!(pgm, fs::read(prefix_buf.with_extension("pgm")).expect("replayed pgm"));
}

#[test]
fn jitter_is_deterministic_in_the_seed() {
    let base = [
        "periodic", "--fn", "z^3 - z", "--period", "1", "--box", "-2", "2", "-2", "2",
        "--grid", "12", "--jitter",
    ];
    let first = report(&base);
    let second = report(&base);
    assert_eq!(first["result"], second["result"]);
    // seed 42 is the default; saying so explicitly must not change anything
    let mut seeded = base.to_vec();
    seeded.extend(["--seed", "42"]);
    assert_eq!(first["result"], report(&seeded)["result"]);
}

#[test]
fn config_errors_exit_1_with_json_on_stderr() {
    let cases: [&[&str]; 6] = [
        &["orbit", "--catalog", "nope", "--z0", "1"],
        &["orbit", "--fn", "exp(", "--z0", "1"],
        &["orbit", "--fn", "exp(z)", "--z0", "one"],
        &["periodic", "--fn", "z^2", "--period", "0", "--box", "-1", "1", "-1", "1"],
        &["julia", "--fn", "exp(z)", "--box", "-1", "1", "-1", "1", "--depth", "3"],
        &["bouquet", "--lambda", "0.9", "--symbols", "0"],
    ];
    for args in cases {
        let (code, err) = run_err(args);
        assert_eq!(code, 1, "td {args:?}");
        assert_eq!(err["error"]["kind"], "config", "td {args:?}: {err}");
        assert!(err["error"]["message"].as_str().is_some_and(|m| !m.is_empty()));
    }
    // clap-level problems (unknown flags, missing requireds) use the same channel
    let (code, err) = run_err(&["orbit", "--z0", "1"]);
    assert_eq!(code, 1);
    assert_eq!(err["error"]["kind"], "config");
    let (code, _) = run_err(&[]);
    assert_eq!(code, 1);
}

#[test]
fn runtime_errors_exit_2_with_json_on_stderr() {
    // 0 is omitted by 0.3*exp(z): its backward orbit is empty
    let (code, err) = run_err(&[
        "julia", "--catalog", "exp03", "--method", "preimage", "--target", "0", "--box",
        "-2", "2", "-2", "2", "--px", "24",
    ]);
    assert_eq!(code, 2);
    assert_eq!(err["error"]["kind"], "runtime");
}

#[test]
fn smale_example_reports_the_two_cycle() {
    let args = ["newton", "smale", "--g", "z^3 - z + 0.7071067811865476"];
    let rep = report(&args);
    let verdict = &rep["result"]["smale"]["verdict"];
    assert_eq!(verdict["kind"], "Obstructed", "verdict: {verdict}");
    let cycle = rep["result"]["obstruction_cycle"].as_array().expect("cycle listed");
    assert_eq!(cycle.len(), 2);

    let out = run(&args);
    let summary = String::from_utf8_lossy(&out.stderr);
    assert!(summary.contains("OBSTRUCTED"), "summary: {summary}");
    assert!(summary.contains("cycle"), "summary: {summary}");
}

#[test]
fn periodic_example_reports_no_fixed_points() {
    let rep = report(&["periodic", "--fn", "exp(z)+z", "--period", "1", "--box", "-50",
        "50", "-50", "50"]);
    let search = &rep["result"]["search"];
    assert_eq!(search["points"].as_array().map(Vec::len), Some(0));
    assert!(search["seeds_tried"].as_u64().expect("seeds") > 0);
    assert_eq!(search["seeds_tried"], search["failed_seeds"]);
}

#[test]
fn bouquet_scatter_lands_inside_the_strip_family() {
    let dir = tempfile::tempdir().expect("tempdir");
    let prefix_buf = dir.path().join("bq");
    let prefix = prefix_buf.to_str().expect("utf-8 path");
    run_files(&[
        "bouquet", "--random", "50", "--depth", "8", "--px", "64", "--out", prefix,
    ]);
    let rep: Value =
        serde_json::from_slice(&fs::read(prefix_buf.with_extension("json")).expect("json"))
            .expect("report parses");
    assert_eq!(rep["result"]["failures"], 0);
    assert_eq!(rep["result"]["records"].as_array().map(Vec::len), Some(50));

    let pgm = fs::read(prefix_buf.with_extension("pgm")).expect("pgm");
    assert!(pgm.starts_with(b"P5\n64 64\n255\n"), "unexpected header");
    // pixel data is the last width*height bytes; endpoint cells are coded 0
    let zeros = pgm[pgm.len() - 64 * 64..].iter().filter(|&&b| b == 0).count();
    assert!(zeros > 0);
}

#[test]
fn out_prefix_writes_into_fresh_directories() {
    let dir = tempfile::tempdir().expect("tempdir");
    let prefix_buf = dir.path().join("deep").join("er").join("run");
    run_files(&[
        "orbit", "--catalog", "exp03", "--z0", "1", "--iters", "40", "--out",
        prefix_buf.to_str().expect("utf-8 path"),
    ]);
    assert!(Path::exists(&prefix_buf.with_extension("json")));
}
