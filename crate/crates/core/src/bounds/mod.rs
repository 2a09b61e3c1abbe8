//! Closed-form inner and outer bounds, regime dispatch and gap constants.

mod antipodal;
mod fat;
mod mode;
mod narrow;
mod strong;

pub use antipodal::{ccdp_outer, inner_antipodal, outer_antipodal, outer_symmetric_continuous};
pub use fat::{
    choose_m_fat, fat_conditions, inner_tin_closed, inner_tin_closed_with, inner_tin_exact,
    outer_fat, FatConditions, TinForm,
};
pub use mode::{
    gap_lem3, gap_terms, inner_mode, inner_superposition_alpha, outer_mode,
    superposition_exact_alpha, GapTerms, Lem3Bounds, ModeInner,
};
pub use narrow::{inner_narrow, narrow_window, outer_narrow, NarrowOuter};
pub use strong::{check_strong_set, g_s, inner_strong, outer_strong, StrongInner};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fading::{make_antipodal, FadingDistribution};

pub(crate) fn half_log2(x: f64) -> f64 {
    0.5 * x.log2()
}

pub(crate) fn clamp0(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

pub(crate) fn check_channel(p: f64, c: f64) -> Result<()> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(domain("P", p, "[0, ∞)"));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(domain("c", c, "[0, ∞)"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    Antipodal,
    Mode,
    Strong,
    SymmetricCont,
    Narrow,
    FatTail,
    Ccdp,
}

impl Theorem {
    pub const ALL: [Theorem; 7] = [
        Theorem::Antipodal,
        Theorem::Mode,
        Theorem::Strong,
        Theorem::SymmetricCont,
        Theorem::Narrow,
        Theorem::FatTail,
        Theorem::Ccdp,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::Antipodal => "antipodal",
            Theorem::Mode => "mode",
            Theorem::Strong => "strong",
            Theorem::SymmetricCont => "symmetric_cont",
            Theorem::Narrow => "narrow",
            Theorem::FatTail => "fat_tail",
            Theorem::Ccdp => "ccdp",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::Config(format!("unknown theorem `{s}`")))
    }
}

/// A rate together with the index (1-based) of the piecewise case that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeRate {
    pub rate: f64,
    pub regime: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub regime: u8,
    pub inner_bpcu: f64,
    pub outer_bpcu: f64,
    /// `None` for reference evaluators that come without an achievability claim.
    pub gap_claimed_bpcu: Option<f64>,
    pub gap_realized_bpcu: f64,
}

impl BoundReport {
    pub fn new(theorem: Theorem, regime: u8, inner: f64, outer: f64, claimed: Option<f64>) -> Self {
        BoundReport {
            theorem,
            regime,
            inner_bpcu: inner,
            outer_bpcu: outer,
            gap_claimed_bpcu: claimed,
            gap_realized_bpcu: outer - inner,
        }
    }

    pub fn within_claim(&self, slack: f64) -> bool {
        self.gap_claimed_bpcu
            .is_none_or(|g| self.gap_realized_bpcu <= g + slack)
    }
}

pub fn report_antipodal(p: f64, c: f64) -> Result<BoundReport> {
    check_channel(p, c)?;
    let outer = outer_antipodal(p, c);
    let inner = inner_antipodal(p, c);
    Ok(BoundReport::new(
        Theorem::Antipodal,
        outer.regime,
        inner.rate,
        outer.rate,
        Some(1.0),
    ))
}

/// Mode bound; `m = None` uses the most likely support point.
pub fn report_mode(
    p: f64,
    c: f64,
    fading: &FadingDistribution,
    m: Option<f64>,
) -> Result<BoundReport> {
    let m = match m {
        Some(m) => m,
        None => {
            fading
                .mode()
                .ok_or_else(|| Error::Precondition("mode bound needs a discrete law".into()))?
                .value
        }
    };
    let outer = outer_mode(p, c, fading, m)?;
    let inner = inner_mode(p, c, fading, m)?;
    let terms = gap_terms(fading, m, c)?;
    Ok(BoundReport::new(
        Theorem::Mode,
        outer.regime,
        inner.rate,
        outer.rate,
        Some(terms.g_m_prime),
    ))
}

pub fn report_strong(p: f64, c: f64, fading: &FadingDistribution) -> Result<BoundReport> {
    let outer = outer_strong(p, c, fading, 1.0)?;
    let inner = inner_strong(p, c, fading)?;
    let claimed = g_s(fading, 1.0)? + 1.0;
    Ok(BoundReport::new(
        Theorem::Strong,
        outer.regime,
        inner.rate,
        outer.rate,
        Some(claimed),
    ))
}

pub fn report_narrow(p: f64, c: f64, fading: &FadingDistribution) -> Result<BoundReport> {
    let m = fading.mean();
    let outer = outer_narrow(p, c, fading, m, 1.0)?;
    let inner = inner_narrow(p, c, fading, m)?;
    Ok(BoundReport::new(
        Theorem::Narrow,
        outer.regime,
        inner,
        outer.rate,
        Some(outer.g_m + 0.5),
    ))
}

/// Fat-tail bound with the law `make_fat_tail(⌊c⌋, M)` and `M` from [`choose_m_fat`].
pub fn report_fat(p: f64, c: f64) -> Result<BoundReport> {
    let m = choose_m_fat(p, c)?;
    let fading = crate::fading::make_fat_tail(c.floor(), m)?;
    let inner = inner_tin_exact(p, c, &fading)?;
    Ok(BoundReport::new(
        Theorem::FatTail,
        1,
        inner,
        outer_fat(p, c)?,
        Some(3.0),
    ))
}

/// Symmetric continuous law: outer bound only, paired with the exact TIN rate.
pub fn report_symmetric(p: f64, c: f64, fading: &FadingDistribution) -> Result<BoundReport> {
    check_channel(p, c)?;
    let inner = inner_tin_exact(p, c, fading)?;
    let outer = outer_antipodal(p, c);
    Ok(BoundReport::new(
        Theorem::SymmetricCont,
        outer.regime,
        inner,
        outer.rate,
        None,
    ))
}

/// CCDP outer bound, paired with the antipodal inner bound for reference.
pub fn report_ccdp(p: f64, c: f64) -> Result<BoundReport> {
    check_channel(p, c)?;
    let outer = ccdp_outer(p, c);
    let inner = inner_tin_exact(p, c, &make_antipodal())?;
    Ok(BoundReport::new(
        Theorem::Ccdp,
        outer.regime,
        inner,
        outer.rate,
        None,
    ))
}

/// Maximizes `f` over `α ∈ [0, 1]`: a 26-point grid, then golden-section search
/// around the best grid point. Returns `(α, f(α))`.
pub(crate) fn maximize_alpha<F: Fn(f64) -> Result<f64>>(f: F) -> Result<(f64, f64)> {
    const N: usize = 25;
    let mut best = (0.0, f(0.0)?);
    for i in 1..=N {
        let a = i as f64 / N as f64;
        let v = f(a)?;
        if v > best.1 {
            best = (a, v);
        }
    }
    let h = 1.0 / N as f64;
    let (mut lo, mut hi) = ((best.0 - h).max(0.0), (best.0 + h).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..30 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    for (a, v) in [(x1, f1), (x2, f2)] {
        if v > best.1 {
            best = (a, v);
        }
    }
    Ok(best)
}
