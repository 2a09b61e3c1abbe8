use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wffd::bounds::Theorem;
use wffd::fading::DistSpec;
use wffd::verify::log_spaced;

#[derive(Parser, Debug, Clone, PartialEq)]
#[command(
    name = "wffd",
    version,
    about = "Inner and outer bounds for the WFFD channel (Gaussian channel with a fast-faded known state)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// Evaluate one bound pair at a single (P, c).
    Bounds(BoundsArgs),
    /// Evaluate a bound pair over a (P, c) grid.
    Sweep(SweepArgs),
    /// Run verification suites on the default grids; exit 1 if any certificate fails.
    Verify(VerifyArgs),
    /// Brute-force the discretized Gel'fand–Pinsker functional.
    Oracle(OracleArgs),
    /// Inspect a fading law.
    Dist(DistArgs),
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct BoundsArgs {
    /// Bound pair; required unless `--method gauss`.
    #[arg(long, value_parser = parse_theorem)]
    pub theorem: Option<Theorem>,
    #[arg(long)]
    pub power: f64,
    /// Canonical gain c (the law is rescaled to unit variance).
    #[arg(long)]
    pub gain: f64,
    /// Fading law as JSON, e.g. '{"family":"geometric","q":0.5}'.
    #[arg(long, value_parser = parse_spec)]
    pub spec: Option<DistSpec>,
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    pub method: Method,
    /// Gauss–Hermite order used to cross-check the Gaussian optimum.
    #[arg(long, default_value_t = 64)]
    pub quad_order: usize,
    /// Write results to a `.csv` or `.json` file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Closed-form bound pair of `--theorem`.
    Closed,
    /// Jointly Gaussian signaling with N(0, 1) fading.
    Gauss,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_theorem)]
    pub theorem: Theorem,
    /// `lo:hi:n` (log-spaced) or a comma-separated list; defaults to the theorem's grid.
    #[arg(long)]
    pub grid_p: Option<Grid>,
    #[arg(long)]
    pub grid_c: Option<Grid>,
    /// Fading law as JSON; repeat for several laws. Defaults to the theorem's laws.
    #[arg(long, value_parser = parse_spec)]
    pub spec: Vec<DistSpec>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    /// Restrict the suites to one theorem.
    #[arg(long, value_parser = parse_theorem)]
    pub theorem: Option<Theorem>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteArg {
    All,
    Gap,
    Sandwich,
    Monotonicity,
    StrongConditions,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct OracleArgs {
    #[arg(long)]
    pub power: f64,
    #[arg(long)]
    pub gain: f64,
    /// Discrete fading law as JSON; defaults to antipodal.
    #[arg(long, value_parser = parse_spec)]
    pub spec: Option<DistSpec>,
    #[arg(long, default_value_t = 5)]
    pub nx: usize,
    #[arg(long, default_value_t = 2)]
    pub ns: usize,
    #[arg(long, default_value_t = 64)]
    pub ny: usize,
    #[arg(long, default_value_t = 2)]
    pub u_size: usize,
    /// Resolution of the p(u|s) simplex grid.
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Maximum number of rate evaluations.
    #[arg(long, default_value_t = 1_000_000_000)]
    pub budget: u128,
    /// Half-width of the output grid; defaults to a span covering every noiseless output.
    #[arg(long)]
    pub y_span: Option<f64>,
    /// Also solve at these gains and report increases beyond 2e−2.
    #[arg(long)]
    pub monotone: Option<Grid>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct DistArgs {
    #[arg(long, value_parser = parse_spec)]
    pub spec: DistSpec,
    #[arg(long)]
    pub show_moments: bool,
    /// Rescale to unit variance before reporting.
    #[arg(long)]
    pub canonical: bool,
    /// Compare a registered integrand's quadrature value with Monte Carlo.
    #[arg(long)]
    pub mc_integrand: Option<String>,
    /// Comma-separated integrand parameters.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub params: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// A grid of positive values.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Log { lo: f64, hi: f64, n: usize },
    List(Vec<f64>),
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Log { lo, hi, n } => log_spaced(*lo, *hi, *n),
            Grid::List(v) => v.clone(),
        }
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{t}` is not a number"))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let grid = match parts.as_slice() {
            [lo, hi, n] => {
                let n: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| format!("`{n}` is not a point count"))?;
                let (lo, hi) = (num(lo)?, num(hi)?);
                if n == 0 || !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                    return Err(format!("`{s}` needs 0 < lo ≤ hi and n ≥ 1"));
                }
                Grid::Log { lo, hi, n }
            }
            [list] => Grid::List(list.split(',').map(num).collect::<Result<_, _>>()?),
            _ => {
                return Err(format!(
                    "`{s}` is neither lo:hi:n nor a comma-separated list"
                ))
            }
        };
        if let Grid::List(v) = &grid {
            if let Some(x) = v.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
                return Err(format!("grid value {x} is not positive"));
            }
        }
        Ok(grid)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Log { lo, hi, n } => write!(f, "{lo}:{hi}:{n}"),
            Grid::List(v) => {
                let parts: Vec<String> = v.iter().map(f64::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

fn parse_theorem(s: &str) -> Result<Theorem, String> {
    s.parse().map_err(|e: wffd::Error| e.to_string())
}

fn parse_spec(s: &str) -> Result<DistSpec, String> {
    DistSpec::from_json(s).map_err(|e| e.to_string())
}

impl SuiteArg {
    fn name(self) -> &'static str {
        match self {
            SuiteArg::All => "all",
            SuiteArg::Gap => "gap",
            SuiteArg::Sandwich => "sandwich",
            SuiteArg::Monotonicity => "monotonicity",
            SuiteArg::StrongConditions => "strong-conditions",
        }
    }
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Gauss => "gauss",
        }
    }
}

/// Pushes `--flag=value`; the joined form keeps values such as `-3` from
/// reading as flags.
fn flag(out: &mut Vec<String>, name: &str, value: impl ToString) {
    out.push(format!("--{name}={}", value.to_string()));
}

fn flag_opt<T: ToString>(out: &mut Vec<String>, name: &str, value: &Option<T>) {
    if let Some(v) = value {
        flag(out, name, v.to_string());
    }
}

fn flag_path(out: &mut Vec<String>, value: &Option<PathBuf>) {
    if let Some(p) = value {
        flag(out, "out", p.display());
    }
}

impl Cli {
    /// Argument vector that parses back to `self` (program name first).
    pub fn render(&self) -> Vec<String> {
        let mut out = vec!["wffd".to_string()];
        match &self.command {
            Command::Bounds(a) => {
                out.push("bounds".into());
                flag_opt(&mut out, "theorem", &a.theorem);
                flag(&mut out, "power", a.power);
                flag(&mut out, "gain", a.gain);
                flag_opt(&mut out, "spec", &a.spec.as_ref().map(DistSpec::to_json));
                flag(&mut out, "method", a.method.name());
                flag(&mut out, "quad-order", a.quad_order);
                flag_path(&mut out, &a.out);
            }
            Command::Sweep(a) => {
                out.push("sweep".into());
                flag(&mut out, "theorem", a.theorem);
                flag_opt(&mut out, "grid-p", &a.grid_p);
                flag_opt(&mut out, "grid-c", &a.grid_c);
                for s in &a.spec {
                    flag(&mut out, "spec", s.to_json());
                }
                flag_path(&mut out, &a.out);
            }
            Command::Verify(a) => {
                out.push("verify".into());
                flag(&mut out, "suite", a.suite.name());
                flag_opt(&mut out, "theorem", &a.theorem);
                flag_path(&mut out, &a.out);
            }
            Command::Oracle(a) => {
                out.push("oracle".into());
                flag(&mut out, "power", a.power);
                flag(&mut out, "gain", a.gain);
                flag_opt(&mut out, "spec", &a.spec.as_ref().map(DistSpec::to_json));
                flag(&mut out, "nx", a.nx);
                flag(&mut out, "ns", a.ns);
                flag(&mut out, "ny", a.ny);
                flag(&mut out, "u-size", a.u_size);
                flag(&mut out, "steps", a.steps);
                flag(&mut out, "budget", a.budget);
                flag_opt(&mut out, "y-span", &a.y_span);
                flag_opt(&mut out, "monotone", &a.monotone);
                flag_path(&mut out, &a.out);
            }
            Command::Dist(a) => {
                out.push("dist".into());
                flag(&mut out, "spec", a.spec.to_json());
                if a.show_moments {
                    out.push("--show-moments".into());
                }
                if a.canonical {
                    out.push("--canonical".into());
                }
                flag_opt(&mut out, "mc-integrand", &a.mc_integrand);
                if !a.params.is_empty() {
                    let p: Vec<String> = a.params.iter().map(f64::to_string).collect();
                    flag(&mut out, "params", p.join(","));
                }
                flag(&mut out, "samples", a.samples);
                flag(&mut out, "seed", a.seed);
            }
        }
        out
    }
}
