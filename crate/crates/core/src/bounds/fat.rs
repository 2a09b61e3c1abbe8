use serde::{Deserialize, Serialize};

use super::{check_channel, half_log2};
use crate::error::{domain, Error, Result};
use crate::fading::{fat_tail_mean, FadingDistribution};

const MAX_DEPTH: u32 = 1_000_000;

/// Interference power in the closed-form TIN rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TinForm {
    /// `c²(1+μ_A²)`, the power of `c·A·S` for unit-variance `A`.
    #[default]
    Dimensional,
    /// `c(1+μ_A)`, kept for audit.
    Literal,
}

/// `½E[log₂(1 + P/(1 + c²A²))]`.
pub fn inner_tin_exact(p: f64, c: f64, fading: &FadingDistribution) -> Result<f64> {
    check_channel(p, c)?;
    if p == 0.0 {
        return Ok(0.0);
    }
    fading.expect(|a| half_log2(1.0 + p / (1.0 + c * c * a * a)))
}

pub fn inner_tin_closed(p: f64, c: f64, mu: f64) -> f64 {
    inner_tin_closed_with(p, c, mu, TinForm::Dimensional)
}

pub fn inner_tin_closed_with(p: f64, c: f64, mu: f64, form: TinForm) -> f64 {
    let interference = match form {
        TinForm::Dimensional => c * c * (1.0 + mu * mu),
        TinForm::Literal => c * (1.0 + mu),
    };
    half_log2(1.0 + p / (1.0 + interference))
}

pub fn outer_fat(p: f64, c: f64) -> Result<f64> {
    check_channel(p, c)?;
    if !(c > 2.0) {
        return Err(domain("c", c, "(2, ∞)"));
    }
    Ok(half_log2(1.0 + p / (1.0 + c * c)) + 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FatConditions {
    pub mu: f64,
    pub mean_below_one: bool,
    pub interference_fits: bool,
    pub depth_covers_gain: bool,
}

impl FatConditions {
    pub fn all(&self) -> bool {
        self.mean_below_one && self.interference_fits && self.depth_covers_gain
    }
}

/// The three depth conditions for `make_fat_tail(⌊c⌋, M)`.
pub fn fat_conditions(p: f64, c: f64, m: u32) -> Result<FatConditions> {
    let mu = fat_tail_mean(c.floor(), m)?;
    Ok(FatConditions {
        mu,
        mean_below_one: mu < 1.0,
        interference_fits: c * c * (1.0 + mu * mu) <= (m as f64 - 1.0) * (p + 1.0),
        depth_covers_gain: m as f64 >= 2.0 * c.log2(),
    })
}

/// Smallest `M ≥ 3` meeting every [`fat_conditions`] test.
pub fn choose_m_fat(p: f64, c: f64) -> Result<u32> {
    check_channel(p, c)?;
    if !(c > 2.0) {
        return Err(domain("c", c, "(2, ∞)"));
    }
    for m in 3..=MAX_DEPTH {
        if fat_conditions(p, c, m)?.all() {
            return Ok(m);
        }
    }
    Err(Error::SearchExhausted {
        limit: MAX_DEPTH as u64,
    })
}
