//! Front end of the `wffd` binary: argument parsing, dispatch and output.
//!
//! Exit codes: 0 success, 1 a bound or certificate violates its claim, 2 usage
//! or input error.

pub mod args;
pub mod output;

use std::io::Write;

use clap::Parser;
use serde::Serialize;
use wffd::bounds::{BoundReport, Theorem};
use wffd::fading::{canonicalize, make_antipodal, DistSpec, FadingDistribution};
use wffd::gauss::{expected_r_gamma, optimize_rho};
use wffd::oracle::{
    bruteforce_cost, build_channel, capacity_monotone_in_c_check, default_y_span,
    gp_capacity_bruteforce, mc_expectation_check, Integrand, OracleFamily,
};
use wffd::verify::{
    is_skippable, run_suite, sweep, Certificate, Suite, SweepGrid, GAP_SLACK, ORDER_SLACK,
};

use args::{BoundsArgs, DistArgs, Method, OracleArgs, SuiteArg, SweepArgs, VerifyArgs};
pub use args::{Cli, Command};
use output::{write_records, write_table, Row};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Failure of a command: the message and the exit code to report.
struct Failure(i32, String);

impl From<wffd::Error> for Failure {
    fn from(e: wffd::Error) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure(EXIT_USAGE, e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Caps the global thread pool at `WFFD_THREADS` when set.
pub fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("WFFD_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("WFFD_THREADS={value} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Bounds(a) => bounds(a, out),
        Command::Sweep(a) => sweep_cmd(a, out, err),
        Command::Verify(a) => verify(a, out),
        Command::Oracle(a) => oracle(a, out),
        Command::Dist(a) => dist(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

fn needs_law(t: Theorem) -> bool {
    matches!(
        t,
        Theorem::Mode | Theorem::Strong | Theorem::SymmetricCont | Theorem::Narrow
    )
}

fn violates(r: &BoundReport) -> bool {
    !r.within_claim(GAP_SLACK) || r.inner_bpcu > r.outer_bpcu + ORDER_SLACK
}

fn bounds(a: &BoundsArgs, out: &mut dyn Write) -> Outcome {
    match a.method {
        Method::Closed => bounds_closed(a, out),
        Method::Gauss => bounds_gauss(a, out),
    }
}

fn bounds_closed(a: &BoundsArgs, out: &mut dyn Write) -> Outcome {
    let theorem = a
        .theorem
        .ok_or_else(|| "--theorem is required with --method closed".to_string())?;
    let distributions = match (&a.spec, needs_law(theorem)) {
        (Some(s), true) => vec![s.clone()],
        (None, true) => return Err(format!("`{theorem}` needs --spec").into()),
        (Some(_), false) => {
            return Err(format!("`{theorem}` has a fixed fading law; drop --spec").into())
        }
        (None, false) => vec![],
    };
    let grid = SweepGrid {
        p_values: vec![a.power],
        c_values: vec![a.gain],
        distributions,
    };
    let point = sweep(theorem, &grid)
        .into_iter()
        .next()
        .expect("one grid point");
    let report = point.report?;
    let row = Row::new(point.p, point.c, point.dist_id, &report);
    write_table(out, std::slice::from_ref(&row))?;
    if let Some(path) = &a.out {
        write_records(path, std::slice::from_ref(&row))?;
    }
    Ok(if violates(&report) {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    })
}

#[derive(Serialize)]
struct GaussRow {
    #[serde(rename = "P")]
    p: f64,
    c: f64,
    rho_xs: f64,
    rho_us: f64,
    rho_ux: f64,
    rate_bpcu: f64,
    quad_order: usize,
    hermite_value: f64,
    hermite_check: f64,
    hermite_converged: bool,
    evaluations: u64,
}

fn bounds_gauss(a: &BoundsArgs, out: &mut dyn Write) -> Outcome {
    if a.spec.is_some() || a.theorem.is_some() {
        return Err(
            "--method gauss uses N(0, 1) fading; drop --theorem and --spec"
                .to_string()
                .into(),
        );
    }
    let opt = optimize_rho(a.power, a.gain)?;
    let herm = expected_r_gamma(&opt.rho, a.power, a.gain, a.quad_order)?;
    let row = GaussRow {
        p: a.power,
        c: a.gain,
        rho_xs: opt.rho.rho_xs,
        rho_us: opt.rho.rho_us,
        rho_ux: opt.rho.rho_ux,
        rate_bpcu: opt.rate,
        quad_order: a.quad_order,
        hermite_value: herm.value,
        hermite_check: herm.check,
        hermite_converged: herm.converged,
        evaluations: opt.evaluations,
    };
    writeln!(out, "P = {}, c = {}", row.p, row.c)?;
    writeln!(
        out,
        "rho = (xs {:.6}, us {:.6}, ux {:.6})",
        row.rho_xs, row.rho_us, row.rho_ux
    )?;
    writeln!(
        out,
        "rate {:.6} bpcu after {} evaluations",
        row.rate_bpcu, row.evaluations
    )?;
    writeln!(
        out,
        "Gauss-Hermite order {}: {:.9} (order {}: {:.9}, converged: {})",
        row.quad_order,
        row.hermite_value,
        2 * row.quad_order,
        row.hermite_check,
        row.hermite_converged
    )?;
    if let Some(path) = &a.out {
        write_records(path, &[row])?;
    }
    Ok(EXIT_OK)
}

fn sweep_cmd(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let defaults = SweepGrid::default_for(a.theorem);
    let p_values = a.grid_p.as_ref().map_or(defaults.p_values, |g| g.values());
    let c_values = a.grid_c.as_ref().map_or(defaults.c_values, |g| g.values());
    let distributions = match (a.spec.is_empty(), needs_law(a.theorem)) {
        (true, _) => defaults.distributions,
        (false, true) => a.spec.clone(),
        (false, false) => {
            return Err(format!("`{}` has a fixed fading law; drop --spec", a.theorem).into())
        }
    };
    let grid = SweepGrid::new(p_values, c_values, distributions)?;
    let mut rows = Vec::new();
    let mut skipped = 0usize;
    let mut violations = 0usize;
    for point in sweep(a.theorem, &grid) {
        match point.report {
            Ok(r) => {
                violations += violates(&r) as usize;
                rows.push(Row::new(point.p, point.c, point.dist_id, &r));
            }
            Err(e) if is_skippable(&e) => skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    write_table(out, &rows)?;
    if let Some(path) = &a.out {
        write_records(path, &rows)?;
    }
    writeln!(
        err,
        "{} points evaluated, {skipped} skipped (preconditions), {violations} violating their claim",
        rows.len()
    )?;
    Ok(if violations > 0 {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    })
}

#[derive(Serialize)]
struct CertRow {
    claim_id: String,
    status: String,
    evaluated: usize,
    violations: usize,
    skipped: usize,
    worst_p: Option<f64>,
    worst_c: Option<f64>,
    worst_dist: Option<String>,
    worst_realized: Option<f64>,
    worst_allowed: Option<f64>,
    runtime_secs: f64,
}

impl From<&Certificate> for CertRow {
    fn from(c: &Certificate) -> Self {
        let w = c.worst_case.as_ref();
        CertRow {
            claim_id: c.claim_id.clone(),
            status: if c.passed() { "pass" } else { "fail" }.into(),
            evaluated: c.evaluated,
            violations: c.violations,
            skipped: c.skipped,
            worst_p: w.and_then(|w| w.p),
            worst_c: w.map(|w| w.c),
            worst_dist: w.map(|w| w.dist.clone()),
            worst_realized: w.map(|w| w.realized),
            worst_allowed: w.map(|w| w.allowed),
            runtime_secs: c.runtime_secs,
        }
    }
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    let suites: Vec<Suite> = match a.suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Gap => vec![Suite::Gap],
        SuiteArg::Sandwich => vec![Suite::Sandwich],
        SuiteArg::Monotonicity => vec![Suite::Monotonicity],
        SuiteArg::StrongConditions => vec![Suite::StrongConditions],
    };
    let mut certs = Vec::new();
    for s in suites {
        certs.extend(run_suite(s, a.theorem)?);
    }
    if certs.is_empty() {
        return Err("no certificate applies to this suite and theorem"
            .to_string()
            .into());
    }
    writeln!(
        out,
        "{:<44} {:<6} {:>9} {:>10} {:>8}  worst (realized vs allowed)",
        "claim", "status", "evaluated", "violations", "skipped"
    )?;
    for c in &certs {
        let worst = c.worst_case.as_ref().map_or(String::new(), |w| {
            let p = w.p.map_or(String::new(), |p| format!("P={p:.4} "));
            format!(
                "{:.6} vs {:.6} at {p}c={:.4} {}",
                w.realized, w.allowed, w.c, w.dist
            )
        });
        writeln!(
            out,
            "{:<44} {:<6} {:>9} {:>10} {:>8}  {worst}",
            c.claim_id,
            if c.passed() { "PASS" } else { "FAIL" },
            c.evaluated,
            c.violations,
            c.skipped
        )?;
    }
    let failed = certs.iter().filter(|c| !c.passed()).count();
    writeln!(out, "{} certificates, {failed} failed", certs.len())?;
    if let Some(path) = &a.out {
        match output::format_of(path)? {
            output::Format::Json => write_records(path, &certs)?,
            output::Format::Csv => {
                let rows: Vec<CertRow> = certs.iter().map(CertRow::from).collect();
                write_records(path, &rows)?
            }
        }
    }
    Ok(if failed > 0 { EXIT_VIOLATION } else { EXIT_OK })
}

/// Builds a law and rescales it to unit variance (point masses are kept).
fn canonical_law(spec: &DistSpec) -> Result<FadingDistribution, Failure> {
    let law = spec.build()?;
    if law.variance() == 0.0 {
        return Ok(law);
    }
    Ok(canonicalize(1.0, &law, 0.0, 1.0)?.1)
}

#[derive(Serialize)]
struct OracleRow {
    #[serde(rename = "P")]
    p: f64,
    c: f64,
    dist_id: String,
    nx: usize,
    ns: usize,
    ny: usize,
    u_size: usize,
    rate_bpcu: f64,
    map_index: u64,
    evaluations: u64,
}

fn oracle(a: &OracleArgs, out: &mut dyn Write) -> Outcome {
    let (dist_id, law) = match &a.spec {
        Some(s) => (s.to_string(), canonical_law(s)?),
        None => ("antipodal".to_string(), make_antipodal()),
    };
    let span = a
        .y_span
        .unwrap_or_else(|| default_y_span(a.power, a.gain, &law, a.ns));
    let ch = build_channel(a.power, a.gain, &law, a.nx, a.ns, a.ny, span)?;
    let cost = bruteforce_cost(&ch, a.u_size, a.steps);
    let sol = gp_capacity_bruteforce(&ch, a.u_size, a.steps, a.budget)?;
    writeln!(
        out,
        "P = {}, c = {}, law {dist_id}, |X| = {}, |S| = {}, |Y| = {}, |U| = {}",
        a.power,
        a.gain,
        ch.x_alphabet.len(),
        a.ns,
        a.ny,
        a.u_size
    )?;
    writeln!(
        out,
        "rate {:.6} bpcu ({} evaluations, grid cost {cost})",
        sol.rate, sol.evaluations
    )?;
    for (u, row) in sol.policy.x_map.iter().enumerate() {
        let xs: Vec<String> = row
            .iter()
            .map(|&i| format!("{:.4}", ch.x_alphabet[i]))
            .collect();
        writeln!(out, "  x(u={u}, s) = [{}]", xs.join(", "))?;
    }
    for (s, row) in sol.policy.p_u_given_s.iter().enumerate() {
        let ps: Vec<String> = row.iter().map(|p| format!("{p:.4}")).collect();
        writeln!(out, "  p(u | s={s}) = [{}]", ps.join(", "))?;
    }
    let mut code = EXIT_OK;
    if let Some(grid) = &a.monotone {
        let c_list = grid.values();
        let c_max = c_list.iter().cloned().fold(a.gain, f64::max);
        let family = OracleFamily {
            power: a.power,
            y_span: a
                .y_span
                .unwrap_or_else(|| default_y_span(a.power, c_max, &law, a.ns)),
            fading: law.clone(),
            nx: a.nx,
            ns: a.ns,
            ny: a.ny,
            u_size: a.u_size,
            simplex_steps: a.steps,
            budget: a.budget,
        };
        let report = capacity_monotone_in_c_check(&family, &c_list)?;
        for (c, r) in report.c_values.iter().zip(&report.rates) {
            writeln!(out, "  c = {c}: rate {r:.6}")?;
        }
        writeln!(
            out,
            "monotone within {}: {} ({} increase(s))",
            report.slack,
            report.passed(),
            report.violations.len()
        )?;
        if !report.passed() {
            code = EXIT_VIOLATION;
        }
    }
    if let Some(path) = &a.out {
        let row = OracleRow {
            p: a.power,
            c: a.gain,
            dist_id,
            nx: a.nx,
            ns: a.ns,
            ny: a.ny,
            u_size: a.u_size,
            rate_bpcu: sol.rate,
            map_index: sol.map_index,
            evaluations: sol.evaluations,
        };
        write_records(path, &[row])?;
    }
    Ok(code)
}

fn dist(a: &DistArgs, out: &mut dyn Write) -> Outcome {
    let law = if a.canonical {
        canonical_law(&a.spec)?
    } else {
        a.spec.build()?
    };
    writeln!(out, "law {} ({:?})", a.spec, law.family())?;
    let (lo, hi) = law.support();
    writeln!(out, "support [{lo}, {hi}]")?;
    if let Some(atoms) = law.atoms() {
        writeln!(out, "{} atoms", atoms.len())?;
        for atom in atoms.iter().take(12) {
            writeln!(out, "  {:>14.9}  p = {:.9}", atom.value, atom.prob)?;
        }
        if atoms.len() > 12 {
            writeln!(out, "  ...")?;
        }
    }
    if a.show_moments {
        let m = law.recompute_moments()?;
        writeln!(out, "mean {:.12}", m.mean)?;
        writeln!(out, "second moment {:.12}", m.second_moment)?;
        writeln!(out, "variance {:.12}", m.variance)?;
    }
    let Some(id) = &a.mc_integrand else {
        return Ok(EXIT_OK);
    };
    let integrand = Integrand::from_id(id, &a.params)?;
    let check = mc_expectation_check(&law, &integrand, a.samples, a.seed)?;
    writeln!(
        out,
        "{id}: quadrature {:.9}, Monte Carlo {:.9} ± {:.2e} ({} samples, seed {})",
        check.quad_value, check.mc_mean, check.mc_stderr, check.used, a.seed
    )?;
    let ok = check.within(3.0);
    writeln!(out, "within 3 standard errors: {ok}")?;
    Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
}
