//! Shared plumbing for the CLI integration tests: one manifest row per
//! golden spec (arguments and contracted exit code), and a runner.

// Each test target compiles this module separately and uses a subset of it.
#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

/// (spec file, argv before --spec, expected exit code)
pub const MANIFEST: &[(&str, &[&str], i32)] = &[
    ("check_square_pass.json", &["check"], 0),
    ("check_square_fail.json", &["check"], 1),
    ("jensen_square.json", &["jensen"], 0),
    ("subdivide_square.json", &["certify-subdivision"], 0),
    ("amplify_sinsq.json", &["amplify", "--op", "jensen"], 0),
    ("amplify_power_low.json", &["amplify", "--op", "jensen"], 1),
    (
        "amplify_scaling_quad.json",
        &["amplify", "--op", "scaling"],
        0,
    ),
    (
        "amplify_sweep.json",
        &["amplify", "--op", "jensen", "--emit", "csv"],
        0,
    ),
    ("feasible_p15.json", &["feasible"], 1),
    ("feasible_p2.json", &["feasible"], 0),
    ("feasible_sweep.json", &["feasible", "--emit", "csv"], 0),
    ("validity_p1.json", &["validity"], 1),
    ("validity_quad.json", &["validity"], 0),
    ("dirderiv_square.json", &["dirderiv"], 0),
    ("dirderiv_concave.json", &["dirderiv"], 1),
    ("sublinear_abs.json", &["sublinear"], 0),
    ("support_square.json", &["support"], 0),
    ("support_infeasible.json", &["support"], 1),
    ("harness_square.json", &["harness-e"], 0),
    ("subdiff_abs.json", &["subdiff"], 0),
    (
        "monotone_pair.json",
        &["monotone", "--criterion", "pair"],
        0,
    ),
    (
        "monotone_cyclic_fail.json",
        &["monotone", "--criterion", "cyclic"],
        1,
    ),
    ("reconstruct_square.json", &["reconstruct"], 0),
    ("reconstruct_cycle.json", &["reconstruct"], 1),
    ("missing_grid.json", &["check"], 2),
    ("extra_field.json", &["jensen"], 2),
    ("mixed_mode.json", &["check"], 2),
];

pub fn spec_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/specs")
        .join(name)
}

pub struct RunOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn capture(mut cmd: Command) -> RunOutput {
    let out = cmd.output().expect("binary runs");
    RunOutput {
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
        code: out.status.code().expect("exit code present"),
    }
}

pub fn run(args: &[&str]) -> RunOutput {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_strongconv"));
    cmd.args(args);
    capture(cmd)
}

/// Runs one manifest row: subcommand argv plus `--spec <file>`, with any
/// extra flags appended after the spec path.
pub fn run_spec_with(file: &str, argv: &[&str], extra: &[&str]) -> RunOutput {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_strongconv"));
    cmd.args(argv)
        .arg("--spec")
        .arg(spec_path(file))
        .args(extra);
    capture(cmd)
}

pub fn run_spec(file: &str, argv: &[&str]) -> RunOutput {
    run_spec_with(file, argv, &[])
}
