//! Jointly Gaussian signaling for Gaussian fading `A ~ N(0, 1)`.
//!
//! `X`, `S` and the auxiliary `U` are unit-correlated Gaussians with
//! correlations `ρ = (ρ_XS, ρ_US, ρ_UX)` restricted to the manifold
//! `1 + 2ρ_XSρ_US − ρ_XS² − ρ_US² − ρ_UX² = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::{integrate_split, normal_pdf, HermiteRule, Tolerance};

pub const DEFAULT_QUAD_ORDER: usize = 64;
const MIN_QUAD_ORDER: usize = 16;
const RADICAND_MARGIN: f64 = 1e-6;
const GRID_STEP: f64 = 0.02;
const FINAL_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoPoint {
    pub rho_xs: f64,
    pub rho_us: f64,
    pub rho_ux: f64,
}

impl RhoPoint {
    pub fn manifold_residual(&self) -> f64 {
        let RhoPoint {
            rho_xs: x,
            rho_us: u,
            rho_ux: w,
        } = *self;
        (1.0 + 2.0 * x * u - x * x - u * u - w * w).abs()
    }

    /// `(−ρ_XS, −ρ_US, ρ_UX)`: flips the sign convention of `S` relative to
    /// `θ`, so `R_Γ(ρ, θ) = R_Γ(ρ', −θ)`.
    pub fn reflected(&self) -> RhoPoint {
        RhoPoint {
            rho_xs: -self.rho_xs,
            rho_us: -self.rho_us,
            rho_ux: self.rho_ux,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UxSign {
    Plus,
    Minus,
}

impl UxSign {
    fn value(self) -> f64 {
        match self {
            UxSign::Plus => 1.0,
            UxSign::Minus => -1.0,
        }
    }
}

pub fn rho_from_pair(rho_xs: f64, rho_us: f64, sign: UxSign) -> Result<RhoPoint> {
    if !(rho_xs.abs() < 1.0) {
        return Err(domain("rho_xs", rho_xs, "(−1, 1)"));
    }
    if !(rho_us.abs() < 1.0) {
        return Err(domain("rho_us", rho_us, "(−1, 1)"));
    }
    let d = rho_xs - rho_us;
    let radicand = 1.0 - d * d;
    if !(radicand > 0.0 && radicand < 1.0) {
        return Err(Error::OffManifold { radicand });
    }
    Ok(RhoPoint {
        rho_xs,
        rho_us,
        rho_ux: sign.value() * radicand.sqrt(),
    })
}

/// How the state gain enters `R_Γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RGammaForm {
    /// Interference power `c²θ²`, as the mutual information of
    /// `Y = X + cθS + Z` requires.
    #[default]
    Dimensional,
    /// Interference power `c²` independent of `θ`.
    Literal,
}

/// `R_Γ(ρ, θ)` in bits; `−∞` when a log argument is not positive.
pub fn r_gamma(rho: &RhoPoint, theta: f64, p: f64, c: f64) -> f64 {
    r_gamma_with(rho, theta, p, c, RGammaForm::Dimensional)
}

pub fn r_gamma_with(rho: &RhoPoint, theta: f64, p: f64, c: f64, form: RGammaForm) -> f64 {
    let RhoPoint {
        rho_xs,
        rho_us,
        rho_ux,
    } = *rho;
    let g2 = match form {
        RGammaForm::Dimensional => c * c * theta * theta,
        RGammaForm::Literal => c * c,
    };
    let cross = 2.0 * theta * c * p.sqrt();
    let a1 = (p + g2 + cross * rho_xs + 1.0) * (1.0 - rho_us * rho_us);
    let a2 = p * (1.0 - rho_ux * rho_ux)
        + g2 * (1.0 - rho_us * rho_us)
        + cross * (rho_xs - rho_ux * rho_us)
        + 1.0;
    if !(a1 > 0.0 && a2 > 0.0) {
        return f64::NEG_INFINITY;
    }
    0.5 * (a1 / a2).log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RGammaExpectation {
    pub value: f64,
    /// The same expectation at twice the quadrature order.
    pub check: f64,
    /// `|value − check| ≤ 1e−6·|value|` (plus 1e−12 absolute).
    pub converged: bool,
}

/// `E[R_Γ(ρ, θ)]` for `θ ~ N(0, 1)` by Gauss–Hermite quadrature.
pub fn expected_r_gamma(
    rho: &RhoPoint,
    p: f64,
    c: f64,
    quad_order: usize,
) -> Result<RGammaExpectation> {
    if quad_order < MIN_QUAD_ORDER {
        return Err(domain("quad_order", quad_order as f64, "[16, ∞)"));
    }
    let value = expect_on(&HermiteRule::new(quad_order)?, rho, p, c);
    let check = expect_on(&HermiteRule::new(2 * quad_order)?, rho, p, c);
    let converged = if value.is_finite() {
        (value - check).abs() <= 1e-6 * value.abs() + 1e-12
    } else {
        value == check
    };
    Ok(RGammaExpectation {
        value,
        check,
        converged,
    })
}

fn expect_on(rule: &HermiteRule, rho: &RhoPoint, p: f64, c: f64) -> f64 {
    rule.expect(|t| r_gamma(rho, t, p, c))
}

/// `E[R_Γ(ρ, θ)]` by adaptive quadrature on `|θ| ≤ 12`, split at the vertices
/// of both log arguments.
///
/// Near `|ρ_UX| = 1` the second argument nearly vanishes at its vertex and
/// Gauss–Hermite rules converge slowly; this form does not.
pub fn expected_r_gamma_adaptive(rho: &RhoPoint, p: f64, c: f64) -> Result<f64> {
    const T: f64 = 12.0;
    let RhoPoint {
        rho_xs,
        rho_us,
        rho_ux,
    } = *rho;
    let mut breaks = vec![0.0];
    if c > 0.0 {
        breaks.push(-p.sqrt() * rho_xs / c);
        let k = 1.0 - rho_us * rho_us;
        if k > 0.0 {
            breaks.push(-p.sqrt() * (rho_xs - rho_ux * rho_us) / (c * k));
        }
    }
    breaks.retain(|b| b.abs() < T);
    let tol = Tolerance {
        abs: 1e-11,
        rel: 1e-11,
        ..Tolerance::default()
    };
    let r = integrate_split(
        |t| r_gamma(rho, t, p, c) * normal_pdf(t),
        -T,
        T,
        &breaks,
        tol,
    )?;
    Ok(r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussOptimum {
    pub rho: RhoPoint,
    /// Clamped to be nonnegative.
    pub rate: f64,
    pub evaluations: u64,
}

struct Search {
    p: f64,
    c: f64,
    evaluations: u64,
}

impl Search {
    /// Objective at a grid coordinate, or `None` off the admissible region.
    fn eval(&mut self, xs: f64, us: f64, sign: UxSign) -> Option<(RhoPoint, f64)> {
        if xs * us > 0.0 {
            return None;
        }
        let d = xs - us;
        let radicand = 1.0 - d * d;
        if !(RADICAND_MARGIN..=1.0 - RADICAND_MARGIN).contains(&radicand) {
            return None;
        }
        let rho = rho_from_pair(xs, us, sign).ok()?;
        self.evaluations += 1;
        let v = expected_r_gamma_adaptive(&rho, self.p, self.c).ok()?;
        v.is_finite().then_some((rho, v))
    }
}

fn better(a: &(RhoPoint, f64), b: &Option<(RhoPoint, f64)>) -> bool {
    b.as_ref().is_none_or(|b| a.1 > b.1)
}

/// Best jointly Gaussian rate: a step-0.02 grid over `(ρ_XS, ρ_US)` for both
/// signs of `ρ_UX`, then pattern search down to step 1e−5.
///
/// Only points with `ρ_XSρ_US ≤ 0` are searched; elsewhere the manifold
/// contains correlation triples with no valid covariance. The objective is
/// [`expected_r_gamma_adaptive`].
pub fn optimize_rho(p: f64, c: f64) -> Result<GaussOptimum> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(domain("P", p, "[0, ∞)"));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(domain("c", c, "[0, ∞)"));
    }
    let mut search = Search {
        p,
        c,
        evaluations: 0,
    };
    let n = (2.0 / GRID_STEP).round() as i32;
    let mut best: Option<(RhoPoint, f64)> = None;
    let mut best_sign = UxSign::Plus;
    for sign in [UxSign::Plus, UxSign::Minus] {
        for i in 1..n {
            let xs = -1.0 + i as f64 * GRID_STEP;
            for j in 1..n {
                let us = -1.0 + j as f64 * GRID_STEP;
                if let Some(cand) = search.eval(xs, us, sign) {
                    if better(&cand, &best) {
                        best = Some(cand);
                        best_sign = sign;
                    }
                }
            }
        }
    }
    let (mut rho, mut val) =
        best.ok_or_else(|| Error::Numeric("no admissible correlation point".into()))?;
    let mut step = GRID_STEP / 2.0;
    while step >= FINAL_STEP {
        let mut moved = true;
        while moved {
            moved = false;
            for (dx, du) in [
                (1.0, 0.0),
                (-1.0, 0.0),
                (0.0, 1.0),
                (0.0, -1.0),
                (1.0, 1.0),
                (-1.0, -1.0),
            ] {
                let (xs, us) = (rho.rho_xs + dx * step, rho.rho_us + du * step);
                if let Some((r, v)) = search.eval(xs, us, best_sign) {
                    if v > val {
                        rho = r;
                        val = v;
                        moved = true;
                    }
                }
            }
        }
        step /= 2.0;
    }
    Ok(GaussOptimum {
        rho,
        rate: val.max(0.0),
        evaluations: search.evaluations,
    })
}
