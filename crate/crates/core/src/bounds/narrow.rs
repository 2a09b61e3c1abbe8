use serde::{Deserialize, Serialize};

use super::{check_channel, clamp0, half_log2, maximize_alpha, superposition_exact_alpha};
use crate::error::{domain, Error, Result};
use crate::fading::FadingDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NarrowOuter {
    pub rate: f64,
    pub regime: u8,
    /// `Pr[|A − m| ≤ κ/c]`.
    pub q_m: f64,
    /// `(Q̄_m/2)·log₂(1+μ_A²) + 4`.
    pub g_m: f64,
}

/// `Pr[|A − m| ≤ κ/c]`, in closed form.
pub fn narrow_window(fading: &FadingDistribution, m: f64, c: f64, kappa: f64) -> f64 {
    let r = kappa / c;
    fading.mass_between(m - r, m + r)
}

/// Outer bound for a continuous law concentrated within `κ/c` of `m`.
///
/// The law is treated through its width-`1/c` quantization; the quantization
/// loss is part of the `+4` in `G_m`.
pub fn outer_narrow(
    p: f64,
    c: f64,
    fading: &FadingDistribution,
    m: f64,
    kappa: f64,
) -> Result<NarrowOuter> {
    check_channel(p, c)?;
    if !(c > 1.0) {
        return Err(domain("c", c, "(1, ∞)"));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(domain("kappa", kappa, "(0, ∞)"));
    }
    if fading.is_discrete() {
        return Err(Error::Precondition(
            "narrow fading needs a continuous law".into(),
        ));
    }
    let q = narrow_window(fading, m, c, kappa);
    if q < 0.5 - 1e-12 {
        return Err(Error::Precondition(format!(
            "Pr[|A − {m}| ≤ {}] = {q} is below 1/2",
            kappa / c
        )));
    }
    let qb = clamp0(1.0 - q);
    let mu2 = fading.mean().powi(2);
    let g_m = qb / 2.0 * (1.0 + mu2).log2() + 4.0;
    let t = c * c * (1.0 + mu2);
    let first = half_log2(1.0 + p) + 1.0;
    let (raw, regime) = if qb >= q * t {
        (first, 1)
    } else if q * t <= qb * (p + 1.0) {
        (half_log2(1.0 + p) - qb / 2.0 * t.log2() + g_m, 2)
    } else {
        (q * half_log2(1.0 + p) + g_m, 3)
    };
    let (rate, regime) = if raw <= first {
        (raw, regime)
    } else {
        (first, 1)
    };
    Ok(NarrowOuter {
        rate: clamp0(rate),
        regime,
        q_m: q,
        g_m,
    })
}

/// Best exact superposition rate with the pre-coded layer aimed at `m`.
pub fn inner_narrow(p: f64, c: f64, fading: &FadingDistribution, m: f64) -> Result<f64> {
    Ok(maximize_alpha(|a| superposition_exact_alpha(p, c, fading, m, a))?.1)
}
