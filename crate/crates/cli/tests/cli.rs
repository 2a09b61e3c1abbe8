use std::path::PathBuf;
use std::process::Command as Process;

use clap::Parser;
use proptest::prelude::*;
use wffd::bounds::Theorem;
use wffd::fading::DistSpec;
use wffd_cli::args::{
    BoundsArgs, DistArgs, Grid, Method, OracleArgs, SuiteArg, SweepArgs, VerifyArgs,
};
use wffd_cli::output::COLUMNS;
use wffd_cli::{run, Cli, Command};

fn run_args(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("wffd").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn antipodal_bounds_example() {
    let (code, out, _) = run_args(&[
        "bounds",
        "--theorem",
        "antipodal",
        "--power",
        "3",
        "--gain",
        "0.5",
    ]);
    assert_eq!(code, 0);
    let row = out.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(fields[0], "antipodal");
    assert_eq!(
        &fields[5..9],
        ["0.500000", "1.500000", "1.000000", "1.000000"]
    );
}

#[test]
fn fat_tail_moments_example() {
    let spec = r#"{"family":"fat_tail","c":3,"M":4}"#;
    let (code, out, _) = run_args(&["dist", "--spec", spec, "--show-moments"]);
    assert_eq!(code, 0);
    let var: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("variance "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((var - 1.0).abs() <= 1e-9);
}

#[test]
fn malformed_spec_points_at_field() {
    let (code, _, err) = run_args(&["dist", "--spec", r#"{"family":"geometric","q":"half"}"#]);
    assert_eq!(code, 2);
    assert!(err.contains("at `q`"), "{err}");
    let (code, _, err) = run_args(&["dist", "--spec", r#"{"family":"gaussian"}"#]);
    assert_eq!(code, 2);
    assert!(err.contains("at `family`"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run_args(&["bounds", "--power", "1", "--gain", "1"]).0, 2);
    assert_eq!(
        run_args(&[
            "bounds",
            "--theorem",
            "lemma",
            "--power",
            "1",
            "--gain",
            "1"
        ])
        .0,
        2
    );
    assert_eq!(
        run_args(&["bounds", "--theorem", "mode", "--power", "1", "--gain", "1"]).0,
        2
    );
    assert_eq!(
        run_args(&["sweep", "--theorem", "antipodal", "--grid-p", "0:1:3"]).0,
        2
    );
    assert_eq!(
        run_args(&["verify", "--suite", "gap", "--theorem", "ccdp"]).0,
        2
    );
    assert_eq!(run_args(&["frobnicate"]).0, 2);
    let (code, out, _) = run_args(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("bounds"));
}

#[test]
fn precondition_failure_is_an_input_error() {
    let spec = r#"{"family":"geometric","q":0.5}"#;
    let (code, _, err) = run_args(&[
        "bounds",
        "--theorem",
        "narrow",
        "--power",
        "1",
        "--gain",
        "2",
        "--spec",
        spec,
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("continuous"), "{err}");
}

#[test]
fn sweep_writes_fixed_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mode.csv");
    let (code, _, err) = run_args(&[
        "sweep",
        "--theorem",
        "mode",
        "--grid-p",
        "0.1:100:4",
        "--grid-c",
        "0.5,1,2",
        "--spec",
        r#"{"family":"geometric","q":0.75}"#,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, COLUMNS);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 12);
    for r in &rows {
        let inner: f64 = r[5].parse().unwrap();
        let outer: f64 = r[6].parse().unwrap();
        let claimed: f64 = r[7].parse().unwrap();
        let realized: f64 = r[8].parse().unwrap();
        assert!(inner <= outer && realized <= claimed + 1e-9);
        assert_eq!(&r[4], "geometric(q=0.75)");
    }
}

#[test]
fn sweep_output_is_deterministic() {
    let args = [
        "sweep",
        "--theorem",
        "fat_tail",
        "--grid-p",
        "1:1000:5",
        "--grid-c",
        "3:50:5",
    ];
    let a = run_args(&args);
    let b = run_args(&args);
    assert_eq!(a, b);
}

#[test]
fn bounds_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ccdp.json");
    let (code, _, _) = run_args(&[
        "bounds",
        "--theorem",
        "ccdp",
        "--power",
        "3",
        "--gain",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(value[0]["outer_bpcu"], 0.5);
    assert_eq!(value[0]["regime"], 3);
    assert!(value[0]["gap_claimed"].is_null());
    let bad = dir.path().join("out.txt");
    assert_eq!(
        run_args(&[
            "bounds",
            "--theorem",
            "ccdp",
            "--power",
            "3",
            "--gain",
            "3",
            "--out",
            bad.to_str().unwrap()
        ])
        .0,
        2
    );
}

#[test]
fn symmetric_law_above_outer_exits_one() {
    // The exact TIN rate exceeds the antipodal-form outer bound here.
    let spec = r#"{"family":"uniform","lo":-1,"hi":1}"#;
    let (code, out, _) = run_args(&[
        "bounds",
        "--theorem",
        "symmetric_cont",
        "--power",
        "3",
        "--gain",
        "2",
        "--spec",
        spec,
    ]);
    assert_eq!(code, 1);
    let fields: Vec<f64> = out
        .lines()
        .nth(1)
        .unwrap()
        .split_whitespace()
        .skip(5)
        .take(2)
        .map(|f| f.parse().unwrap())
        .collect();
    assert_eq!(fields[1], 0.0);
    assert!(fields[0] > 0.3);
}

#[test]
fn gap_and_monotonicity_suites_pass() {
    for suite in ["gap", "monotonicity", "strong-conditions"] {
        let (code, out, _) = run_args(&["verify", "--suite", suite]);
        assert_eq!(code, 0, "{out}");
    }
}

#[test]
fn full_suite_reports_the_known_sandwich_failures() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("certs.json");
    let (code, _, _) = run_args(&["verify", "--suite", "all", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let certs: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let failed: Vec<&str> = certs
        .iter()
        .filter(|c| c["status"] != "pass")
        .map(|c| c["claim_id"].as_str().unwrap())
        .collect();
    assert_eq!(
        failed,
        [
            "sandwich/strong",
            "sandwich/symmetric_cont",
            "sandwich/fat_tail"
        ]
    );
    assert_eq!(certs.len(), 5 + 7 + 7 + 48);
}

#[test]
fn oracle_command() {
    let (code, out, _) = run_args(&[
        "oracle", "--power", "1", "--gain", "1", "--nx", "3", "--ny", "32", "--steps", "4",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("rate "));
    let (code, _, err) = run_args(&["oracle", "--power", "1", "--gain", "1", "--budget", "10"]);
    assert_eq!(code, 2);
    assert!(err.contains("budget"), "{err}");
}

#[test]
fn monte_carlo_check() {
    let spec = r#"{"family":"geometric","q":0.5}"#;
    let (code, out, _) = run_args(&[
        "dist",
        "--spec",
        spec,
        "--mc-integrand",
        "tin",
        "--params",
        "3,0.5",
        "--seed",
        "4",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("within 3 standard errors: true"));
    assert_eq!(
        run_args(&["dist", "--spec", spec, "--mc-integrand", "nope"]).0,
        2
    );
}

#[test]
fn binary_honours_thread_cap() {
    let bin = env!("CARGO_BIN_EXE_wffd");
    let ok = Process::new(bin)
        .args([
            "bounds",
            "--theorem",
            "antipodal",
            "--power",
            "3",
            "--gain",
            "0.5",
        ])
        .env("WFFD_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Process::new(bin)
        .args([
            "bounds",
            "--theorem",
            "antipodal",
            "--power",
            "3",
            "--gain",
            "0.5",
        ])
        .env("WFFD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, (0.0f64..1.0).prop_map(|x| x * 1e-9)]
}

fn positive() -> impl Strategy<Value = f64> {
    (1e-6f64..1e6).prop_map(|x| x)
}

fn theorem() -> impl Strategy<Value = Theorem> {
    prop::sample::select(Theorem::ALL.to_vec())
}

fn spec() -> impl Strategy<Value = DistSpec> {
    prop_oneof![
        Just(DistSpec::Antipodal {}),
        (0.5f64..0.99).prop_map(|q| DistSpec::Geometric { q }),
        (2.5f64..10.0, 3u32..12).prop_map(|(c, m)| DistSpec::FatTail { c, m }),
        (-2.0f64..2.0, 0.1f64..3.0).prop_map(|(lo, w)| DistSpec::Uniform { lo, hi: lo + w }),
        prop::collection::vec((-3.0f64..3.0, 0.0f64..1.0), 1..4).prop_map(|pts| {
            DistSpec::Discrete {
                points: pts.into_iter().map(|(v, p)| [v, p]).collect(),
            }
        }),
    ]
}

fn grid() -> impl Strategy<Value = Grid> {
    prop_oneof![
        (positive(), 1.0f64..100.0, 1usize..60).prop_map(|(lo, k, n)| Grid::Log {
            lo,
            hi: lo * k,
            n
        }),
        prop::collection::vec(positive(), 1..5).prop_map(Grid::List),
    ]
}

fn out_path() -> impl Strategy<Value = Option<PathBuf>> {
    prop::option::of("[a-z]{1,8}\\.(csv|json)".prop_map(PathBuf::from))
}

fn command() -> impl Strategy<Value = Command> {
    prop_oneof![
        (
            prop::option::of(theorem()),
            finite(),
            finite(),
            prop::option::of(spec()),
            prop_oneof![Just(Method::Closed), Just(Method::Gauss)],
            16usize..512,
            out_path()
        )
            .prop_map(|(theorem, power, gain, spec, method, quad_order, out)| {
                Command::Bounds(BoundsArgs {
                    theorem,
                    power,
                    gain,
                    spec,
                    method,
                    quad_order,
                    out,
                })
            }),
        (
            theorem(),
            prop::option::of(grid()),
            prop::option::of(grid()),
            prop::collection::vec(spec(), 0..3),
            out_path()
        )
            .prop_map(|(theorem, grid_p, grid_c, spec, out)| {
                Command::Sweep(SweepArgs {
                    theorem,
                    grid_p,
                    grid_c,
                    spec,
                    out,
                })
            }),
        (
            prop::sample::select(vec![
                SuiteArg::All,
                SuiteArg::Gap,
                SuiteArg::Sandwich,
                SuiteArg::Monotonicity,
                SuiteArg::StrongConditions
            ]),
            prop::option::of(theorem()),
            out_path()
        )
            .prop_map(|(suite, theorem, out)| Command::Verify(VerifyArgs {
                suite,
                theorem,
                out
            })),
        (
            (finite(), finite(), prop::option::of(spec())),
            (
                2usize..9,
                2usize..5,
                16usize..128,
                1usize..5,
                1usize..20,
                any::<u64>()
            ),
            (
                prop::option::of(positive()),
                prop::option::of(grid()),
                out_path()
            )
        )
            .prop_map(
                |(
                    (power, gain, spec),
                    (nx, ns, ny, u_size, steps, budget),
                    (y_span, monotone, out),
                )| {
                    Command::Oracle(OracleArgs {
                        power,
                        gain,
                        spec,
                        nx,
                        ns,
                        ny,
                        u_size,
                        steps,
                        budget: budget as u128,
                        y_span,
                        monotone,
                        out,
                    })
                }
            ),
        (
            spec(),
            any::<bool>(),
            any::<bool>(),
            prop::option::of("[a-z_]{1,10}"),
            prop::collection::vec(finite(), 0..5),
            1usize..1_000_000,
            any::<u64>()
        )
            .prop_map(
                |(spec, show_moments, canonical, mc_integrand, params, samples, seed)| {
                    Command::Dist(DistArgs {
                        spec,
                        show_moments,
                        canonical,
                        mc_integrand,
                        params,
                        samples,
                        seed,
                    })
                }
            ),
    ]
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(command in command()) {
        let cli = Cli { command };
        let argv = cli.render();
        let parsed = Cli::try_parse_from(&argv).map_err(|e| TestCaseError::fail(format!("{argv:?}: {e}")))?;
        prop_assert_eq!(parsed, cli);
    }
}
