//! Sweeps that check the gap claims and the monotonicity of every outer bound,
//! and emit pass/fail certificates.
//!
//! Sweeps are deterministic: points are evaluated in parallel but reduced in
//! lexicographic (distribution, P, c) order, so the first of several equal
//! worst cases wins.

mod strong_check;

pub use strong_check::{
    quantization_penalty, recursion_term, strong_condition_check, IndexCheck, StrongCheck,
};

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    ccdp_outer, choose_m_fat, outer_antipodal, outer_fat, outer_mode, outer_narrow, outer_strong,
    outer_symmetric_continuous, report_antipodal, report_ccdp, report_fat, report_mode,
    report_narrow, report_strong, report_symmetric, BoundReport, Theorem,
};
use crate::error::{Error, Result};
use crate::fading::{canonicalize, make_discrete, make_strong_set, DistSpec, FadingDistribution};
use crate::par;

/// Tolerance of the gap comparison.
pub const GAP_SLACK: f64 = 1e-9;
/// Tolerance of the sandwich and monotonicity comparisons.
pub const ORDER_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub p_values: Vec<f64>,
    pub c_values: Vec<f64>,
    /// Ignored by theorems whose fading law is fixed (antipodal, fat tail,
    /// CCDP). For the strong bound a `strong_set` entry is rebuilt at each
    /// grid gain, so only its `M` matters.
    pub distributions: Vec<DistSpec>,
}

pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Gains `2·5^{k/8}`, `k = 1..=8`, spanning `(2, 10]`.
pub fn strong_gains() -> Vec<f64> {
    (1..=8).map(|k| 2.0 * 5f64.powf(k as f64 / 8.0)).collect()
}

impl SweepGrid {
    pub fn new(
        p_values: Vec<f64>,
        c_values: Vec<f64>,
        distributions: Vec<DistSpec>,
    ) -> Result<Self> {
        for (name, v) in [("P", &p_values), ("c", &c_values)] {
            if v.is_empty() {
                return Err(Error::Config(format!("empty {name} grid")));
            }
            if let Some(x) = v.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
                return Err(Error::Config(format!(
                    "{name} grid value {x} is not positive"
                )));
            }
        }
        Ok(SweepGrid {
            p_values,
            c_values,
            distributions,
        })
    }

    /// The default grid of a theorem, cut to its validity region.
    pub fn default_for(theorem: Theorem) -> Self {
        let p = log_spaced(0.01, 1000.0, 50);
        let c = log_spaced(0.01, 100.0, 50);
        let (p_values, c_values, distributions) = match theorem {
            Theorem::Antipodal | Theorem::Ccdp => (p, c, vec![]),
            Theorem::SymmetricCont => (
                p,
                c,
                vec![
                    DistSpec::TruncatedGaussian {
                        center: 0.0,
                        halfwidth: 10.0,
                        sigma: 1.0,
                    },
                    DistSpec::TruncatedGaussian {
                        center: 0.0,
                        halfwidth: 1.0,
                        sigma: 1.0,
                    },
                    DistSpec::Uniform { lo: -1.0, hi: 1.0 },
                ],
            ),
            Theorem::FatTail => (p, c.into_iter().filter(|&c| c > 2.0).collect(), vec![]),
            Theorem::Mode => (
                p,
                c,
                vec![
                    DistSpec::Antipodal {},
                    DistSpec::Geometric { q: 0.5 },
                    DistSpec::Geometric { q: 0.75 },
                    DistSpec::Geometric { q: 0.9 },
                    DistSpec::PointMass { m: 1.0 },
                    DistSpec::Discrete {
                        points: vec![[-1.0, 0.2], [0.5, 0.6], [2.0, 0.2]],
                    },
                ],
            ),
            Theorem::Strong => (
                log_spaced(0.01, 1000.0, 20),
                strong_gains(),
                (3..=8).map(|m| DistSpec::StrongSet { c: 3.0, m }).collect(),
            ),
            Theorem::Narrow => (
                p,
                log_spaced(1.01, 10.0, 30),
                vec![
                    DistSpec::TruncatedGaussian {
                        center: 1.0,
                        halfwidth: 1.0,
                        sigma: 0.2,
                    },
                    DistSpec::TruncatedGaussian {
                        center: 3.0,
                        halfwidth: 3.0,
                        sigma: 0.5,
                    },
                    DistSpec::TruncatedGaussian {
                        center: 2.0,
                        halfwidth: 0.5,
                        sigma: 1.0,
                    },
                    DistSpec::Uniform { lo: 0.8, hi: 1.2 },
                ],
            ),
        };
        SweepGrid {
            p_values,
            c_values,
            distributions,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    /// `None` for checks that do not depend on the power.
    pub p: Option<f64>,
    pub c: f64,
    pub dist: String,
    pub realized: f64,
    pub allowed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim_id: String,
    pub status: Status,
    /// The point with the largest `realized − allowed`.
    pub worst_case: Option<WorstCase>,
    pub evaluated: usize,
    pub violations: usize,
    pub skipped: usize,
    /// Distinct reasons for skipped points, in first-seen order.
    pub skip_reasons: Vec<String>,
    pub runtime_secs: f64,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Equality of everything except the runtime.
    pub fn same_outcome(&self, other: &Certificate) -> bool {
        Certificate {
            runtime_secs: 0.0,
            ..self.clone()
        } == Certificate {
            runtime_secs: 0.0,
            ..other.clone()
        }
    }
}

/// Accumulates points in a fixed order.
struct Tally {
    worst: Option<WorstCase>,
    evaluated: usize,
    violations: usize,
    skipped: usize,
    skip_reasons: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            worst: None,
            evaluated: 0,
            violations: 0,
            skipped: 0,
            skip_reasons: vec![],
        }
    }

    fn point(&mut self, case: WorstCase, violated: bool) {
        self.evaluated += 1;
        if violated {
            self.violations += 1;
        }
        let margin = case.realized - case.allowed;
        if self
            .worst
            .as_ref()
            .is_none_or(|w| margin > w.realized - w.allowed)
        {
            self.worst = Some(case);
        }
    }

    fn skip(&mut self, reason: String) {
        self.skipped += 1;
        if !self.skip_reasons.contains(&reason) {
            self.skip_reasons.push(reason);
        }
    }

    fn finish(self, claim_id: String, started: Instant) -> Certificate {
        Certificate {
            claim_id,
            status: if self.violations == 0 {
                Status::Pass
            } else {
                Status::Fail
            },
            worst_case: self.worst,
            evaluated: self.evaluated,
            violations: self.violations,
            skipped: self.skipped,
            skip_reasons: self.skip_reasons,
            runtime_secs: started.elapsed().as_secs_f64(),
        }
    }
}

/// A fading law in canonical (unit-variance) form, with its display id.
/// Point masses stay as they are.
fn canonical(spec: &DistSpec) -> Result<(String, FadingDistribution)> {
    let fading = spec.build()?;
    if fading.variance() == 0.0 {
        return Ok((spec.to_string(), fading));
    }
    let (_, f) = canonicalize(1.0, &fading, 0.0, 1.0)?;
    Ok((spec.to_string(), f))
}

/// Laws a theorem is swept over; `None` marks a theorem with a fixed law.
fn sweep_laws(
    theorem: Theorem,
    grid: &SweepGrid,
) -> Vec<Option<(String, Result<FadingDistribution>)>> {
    let fixed = matches!(
        theorem,
        Theorem::Antipodal | Theorem::FatTail | Theorem::Ccdp
    );
    if fixed {
        return vec![None];
    }
    grid.distributions
        .iter()
        .map(|spec| match (theorem, spec) {
            // Rebuilt per gain.
            (Theorem::Strong, DistSpec::StrongSet { m, .. }) => {
                Some((format!("strong_set(M={m})"), Err(Error::Degenerate)))
            }
            _ => Some(match canonical(spec) {
                Ok((id, f)) => (id, Ok(f)),
                Err(e) => (spec.to_string(), Err(e)),
            }),
        })
        .collect()
}

fn strong_m(spec: &DistSpec) -> Option<u32> {
    match spec {
        DistSpec::StrongSet { m, .. } => Some(*m),
        _ => None,
    }
}

fn fixed_law_id(theorem: Theorem, p: f64, c: f64) -> String {
    match theorem {
        Theorem::FatTail => match choose_m_fat(p, c) {
            Ok(m) => format!("fat_tail(c={},M={m})", c.floor()),
            Err(_) => "fat_tail".into(),
        },
        Theorem::Ccdp => "ccdp".into(),
        _ => "antipodal".into(),
    }
}

fn gap_report(
    theorem: Theorem,
    p: f64,
    c: f64,
    spec: Option<&DistSpec>,
    law: Option<&Result<FadingDistribution>>,
) -> Result<BoundReport> {
    match theorem {
        Theorem::Antipodal => report_antipodal(p, c),
        Theorem::FatTail => report_fat(p, c),
        Theorem::Strong => match spec.and_then(strong_m) {
            Some(m) => report_strong(p, c, &make_strong_set(c, m)?),
            None => report_strong(p, c, law_of(law)?),
        },
        Theorem::Mode => report_mode(p, c, law_of(law)?, None),
        Theorem::Narrow => report_narrow(p, c, law_of(law)?),
        Theorem::SymmetricCont => report_symmetric(p, c, law_of(law)?),
        Theorem::Ccdp => report_ccdp(p, c),
    }
}

fn law_of(law: Option<&Result<FadingDistribution>>) -> Result<&FadingDistribution> {
    match law {
        Some(Ok(f)) => Ok(f),
        Some(Err(e)) => Err(e.clone()),
        None => Err(Error::Config("missing fading law".into())),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    /// `outer − inner ≤ claim + 1e−9`.
    Gap,
    /// `inner − outer ≤ 1e−12`.
    Sandwich,
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub p: f64,
    pub c: f64,
    pub dist_id: String,
    pub report: Result<BoundReport>,
}

/// Evaluates a theorem's bound pair at every grid point, in (distribution,
/// P, c) order. Laws are rescaled to unit variance; `c` is the canonical gain.
pub fn sweep(theorem: Theorem, grid: &SweepGrid) -> Vec<SweepPoint> {
    let laws = sweep_laws(theorem, grid);
    let mut points = Vec::new();
    for (d, law) in laws.iter().enumerate() {
        for &p in &grid.p_values {
            for &c in &grid.c_values {
                points.push((d, law.as_ref(), p, c));
            }
        }
    }
    par::map_slice(&points, |&(d, law, p, c)| {
        let spec = grid.distributions.get(d);
        let dist_id = match law {
            Some((id, _)) => id.clone(),
            None => fixed_law_id(theorem, p, c),
        };
        let report = gap_report(theorem, p, c, spec, law.map(|(_, l)| l));
        SweepPoint {
            p,
            c,
            dist_id,
            report,
        }
    })
}

/// Errors that mark a point as outside a theorem's hypotheses.
pub fn is_skippable(e: &Error) -> bool {
    matches!(
        e,
        Error::Precondition(_)
            | Error::Domain { .. }
            | Error::Construction { .. }
            | Error::Degenerate
            | Error::SearchExhausted { .. }
    )
}

fn report_sweep(theorem: Theorem, grid: &SweepGrid, side: Side) -> Result<Certificate> {
    let started = Instant::now();
    let mut tally = Tally::new();
    for SweepPoint {
        p,
        c,
        dist_id: id,
        report,
    } in sweep(theorem, grid)
    {
        match report {
            Ok(r) => {
                let (realized, allowed) = match side {
                    Side::Gap => (
                        r.gap_realized_bpcu,
                        r.gap_claimed_bpcu.unwrap_or(f64::INFINITY) + GAP_SLACK,
                    ),
                    Side::Sandwich => (-r.gap_realized_bpcu, ORDER_SLACK),
                };
                let violated = !(realized <= allowed);
                tally.point(
                    WorstCase {
                        p: Some(p),
                        c,
                        dist: id,
                        realized,
                        allowed,
                    },
                    violated,
                );
            }
            Err(e) if is_skippable(&e) => tally.skip(format!("{id}: {e}")),
            Err(e) => return Err(e),
        }
    }
    if tally.evaluated == 0 {
        return Err(Error::Config(format!(
            "no grid point satisfies the preconditions of `{theorem}`"
        )));
    }
    let kind = match side {
        Side::Gap => "gap",
        Side::Sandwich => "sandwich",
    };
    Ok(tally.finish(format!("{kind}/{theorem}"), started))
}

/// Checks `outer − inner ≤ claim + 1e−9` at every applicable grid point.
pub fn gap_suite(theorem: Theorem, grid: &SweepGrid) -> Result<Certificate> {
    if matches!(theorem, Theorem::SymmetricCont | Theorem::Ccdp) {
        return Err(Error::Config(format!("`{theorem}` carries no gap claim")));
    }
    report_sweep(theorem, grid, Side::Gap)
}

/// Checks `inner ≤ outer + 1e−12` at every applicable grid point.
///
/// The inner bound of `symmetric_cont` and `ccdp` is the exact TIN rate of
/// the law (antipodal for `ccdp`), which is achievable for any fading law.
pub fn sandwich_suite(theorem: Theorem, grid: &SweepGrid) -> Result<Certificate> {
    report_sweep(theorem, grid, Side::Sandwich)
}

/// Outer bound evaluated by [`monotonicity_suite`].
fn outer_value(
    theorem: Theorem,
    p: f64,
    c: f64,
    spec: Option<&DistSpec>,
    law: Option<&Result<FadingDistribution>>,
) -> Result<f64> {
    match theorem {
        Theorem::Antipodal => Ok(outer_antipodal(p, c).rate),
        Theorem::SymmetricCont => Ok(outer_symmetric_continuous(p, c)),
        Theorem::Ccdp => Ok(ccdp_outer(p, c).rate),
        Theorem::FatTail => outer_fat(p, c),
        Theorem::Strong => match spec.and_then(strong_m) {
            Some(m) => {
                let f = make_strong_set(c, m)?;
                Ok(outer_strong(p, c, &f, 1.0)?.rate)
            }
            None => Ok(outer_strong(p, c, law_of(law)?, 1.0)?.rate),
        },
        Theorem::Mode => {
            let f = law_of(law)?;
            let m = f
                .mode()
                .ok_or_else(|| Error::Precondition("mode bound needs a discrete law".into()))?
                .value;
            Ok(outer_mode(p, c, f, m)?.rate)
        }
        Theorem::Narrow => {
            let f = law_of(law)?;
            Ok(outer_narrow(p, c, f, f.mean(), 1.0)?.rate)
        }
    }
}

/// Checks that the outer bound never increases along a c-ascending slice.
///
/// Points failing preconditions split a slice; comparisons are made only
/// between consecutive evaluated points.
pub fn monotonicity_suite(theorem: Theorem, grid: &SweepGrid) -> Result<Certificate> {
    let started = Instant::now();
    let mut cs = grid.c_values.clone();
    cs.sort_by(f64::total_cmp);
    cs.dedup();
    let laws = sweep_laws(theorem, grid);
    let mut slices = Vec::new();
    for (d, law) in laws.iter().enumerate() {
        for &p in &grid.p_values {
            slices.push((d, law.as_ref(), p));
        }
    }
    let results = par::map_slice(&slices, |&(d, law, p)| {
        let spec = grid.distributions.get(d);
        cs.iter()
            .map(|&c| outer_value(theorem, p, c, spec, law.map(|(_, l)| l)))
            .collect::<Vec<_>>()
    });
    let mut tally = Tally::new();
    for (&(_, law, p), values) in slices.iter().zip(results) {
        let mut prev: Option<(f64, f64)> = None;
        for (&c, v) in cs.iter().zip(values) {
            let id = match law {
                Some((id, _)) => id.clone(),
                None => fixed_law_id(theorem, p, c),
            };
            match v {
                Ok(v) => {
                    if let Some((_, pv)) = prev {
                        let rise = v - pv;
                        tally.point(
                            WorstCase {
                                p: Some(p),
                                c,
                                dist: id,
                                realized: rise,
                                allowed: ORDER_SLACK,
                            },
                            rise > ORDER_SLACK || !v.is_finite(),
                        );
                    }
                    prev = Some((c, v));
                }
                Err(e) if is_skippable(&e) => {
                    prev = None;
                    tally.skip(format!("{id}: {e}"));
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(tally.finish(format!("monotone/{theorem}"), started))
}

/// Uniform law on `{α₁, cα₁, …, c^{M−1}α₁}` with `α₁ = 1/(c−1)`: the
/// smallest set meeting every strong-fading hypothesis.
pub fn threshold_strong_set(c: f64, m: u32) -> Result<FadingDistribution> {
    let a1 = 1.0 / (c - 1.0);
    let values: Vec<f64> = (0..m).map(|k| a1 * c.powi(k as i32)).collect();
    make_discrete(&values, &vec![1.0 / m as f64; m as usize])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Gap,
    Sandwich,
    Monotonicity,
    StrongConditions,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Gap,
        Suite::Sandwich,
        Suite::Monotonicity,
        Suite::StrongConditions,
    ];
}

/// Runs a suite on the default grids, optionally for one theorem only.
pub fn run_suite(suite: Suite, only: Option<Theorem>) -> Result<Vec<Certificate>> {
    let theorems: Vec<Theorem> = match only {
        Some(t) => vec![t],
        None => Theorem::ALL.to_vec(),
    };
    let mut out = Vec::new();
    match suite {
        Suite::Gap => {
            for t in theorems {
                if !matches!(t, Theorem::SymmetricCont | Theorem::Ccdp) {
                    out.push(gap_suite(t, &SweepGrid::default_for(t))?);
                }
            }
        }
        Suite::Sandwich => {
            for t in theorems {
                out.push(sandwich_suite(t, &SweepGrid::default_for(t))?);
            }
        }
        Suite::Monotonicity => {
            for t in theorems {
                out.push(monotonicity_suite(t, &SweepGrid::default_for(t))?);
            }
        }
        Suite::StrongConditions => {
            if only.is_none_or(|t| t == Theorem::Strong) {
                for c in strong_gains() {
                    for m in 3..=8 {
                        out.push(
                            strong_condition_check(&threshold_strong_set(c, m)?, c)?.certificate,
                        );
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Every suite on the default grids.
pub fn run_all() -> Result<Vec<Certificate>> {
    let mut out = Vec::new();
    for s in Suite::ALL {
        out.extend(run_suite(s, None)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(SweepGrid::new(vec![], vec![1.0], vec![]).is_err());
        assert!(SweepGrid::new(vec![1.0], vec![-1.0], vec![]).is_err());
        let g = log_spaced(0.01, 1000.0, 50);
        assert_eq!((g[0], g[49], g.len()), (0.01, 1000.0, 50));
    }

    #[test]
    fn single_point_grid() {
        let g = SweepGrid::new(vec![3.0], vec![0.5], vec![]).unwrap();
        let cert = gap_suite(Theorem::Antipodal, &g).unwrap();
        assert!(cert.passed());
        let w = cert.worst_case.unwrap();
        assert_eq!((w.p, w.c, w.realized), (Some(3.0), 0.5, 1.0));
    }

    #[test]
    fn antipodal_slice() {
        let g = SweepGrid::new(vec![3.0], vec![0.5, 1.0, 2.0, 4.0], vec![]).unwrap();
        let cert = monotonicity_suite(Theorem::Antipodal, &g).unwrap();
        assert!(cert.passed());
        assert_eq!(cert.evaluated, 3);
    }

    #[test]
    fn claimless_theorems() {
        let g = SweepGrid::default_for(Theorem::Ccdp);
        assert!(matches!(
            gap_suite(Theorem::Ccdp, &g),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn empty_applicable_grid() {
        let g = SweepGrid::new(vec![1.0], vec![0.5, 1.0], vec![]).unwrap();
        assert!(matches!(
            gap_suite(Theorem::FatTail, &g),
            Err(Error::Config(_))
        ));
    }
}
