use serde::{Deserialize, Serialize};

use super::{check_channel, clamp0, half_log2, RegimeRate};
use crate::error::{domain, Error, Result};
use crate::fading::{same_point, FadingDistribution};
use crate::quad::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeInner {
    pub rate: f64,
    /// Share of the power given to the TIN layer.
    pub alpha: f64,
}

/// Gap constants of the mode, strong and narrow bounds (bits).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapTerms {
    pub g_m_outer: f64,
    pub g_m_prime: f64,
    pub g_m_inner: f64,
    pub g_s: f64,
    pub g_m_narrow: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lem3Bounds {
    pub g_m_bound: f64,
    pub g_m_prime_bound: f64,
    pub g_m_exact: f64,
    pub g_m_prime_exact: f64,
    /// Both exact constants are below their bounds (+1e−9).
    pub within: bool,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(domain("alpha", alpha, "[0, 1]"));
    }
    Ok(())
}

/// `E[f(A) | A ≠ m]`, or `None` when the event is empty.
fn conditional<F: Fn(f64) -> f64>(
    fading: &FadingDistribution,
    m: f64,
    f: F,
) -> Result<Option<f64>> {
    if let Some(atoms) = fading.atoms() {
        let (num, den) = atoms
            .iter()
            .filter(|a| !same_point(a.value, m))
            .fold((0.0, 0.0), |(n, d), a| {
                (n + a.prob * f(a.value), d + a.prob)
            });
        return Ok((den > 0.0).then(|| num / den));
    }
    fading
        .expect_with(f, &[m, 0.0], Tolerance::default())
        .map(Some)
}

fn tin_layer(p: f64, c: f64, fading: &FadingDistribution, alpha: f64) -> Result<f64> {
    if alpha == 0.0 || p == 0.0 {
        return Ok(0.0);
    }
    let q = (1.0 - alpha) * p;
    fading.expect(|a| half_log2(1.0 + alpha * p / (1.0 + c * c * a * a + q)))
}

/// Superposition rate with a TIN layer of power `αP` and a layer of power
/// `ᾱP` pre-coded against `S` as if `A = m`, using the bounded form of the
/// pre-coded layer rate.
pub fn inner_superposition_alpha(
    p: f64,
    c: f64,
    fading: &FadingDistribution,
    m: f64,
    alpha: f64,
) -> Result<f64> {
    check_channel(p, c)?;
    check_alpha(alpha)?;
    let tin = tin_layer(p, c, fading, alpha)?;
    let q_m = fading.prob_at(m);
    let pas = match fading.atoms() {
        Some(atoms) if q_m > 0.0 => {
            let mut penalty = 0.0;
            for a in atoms.iter().filter(|a| !same_point(a.value, m)) {
                if a.value == 0.0 {
                    penalty = f64::INFINITY;
                    break;
                }
                let r = (a.value - m) / a.value;
                penalty += a.prob * half_log2(r * r + 1.0);
            }
            clamp0(q_m * half_log2(1.0 + (1.0 - alpha) * p) - penalty)
        }
        // A continuous law puts no mass on m: the bracket is never positive.
        _ => 0.0,
    };
    Ok(tin + pas)
}

/// Superposition rate with the exact jointly Gaussian pre-coded layer:
/// `U = X₂ + λS`, `λ = Q·c·m/(Q+1)`, `Q = ᾱP`, averaged over `A`.
pub fn superposition_exact_alpha(
    p: f64,
    c: f64,
    fading: &FadingDistribution,
    m: f64,
    alpha: f64,
) -> Result<f64> {
    check_channel(p, c)?;
    check_alpha(alpha)?;
    let tin = tin_layer(p, c, fading, alpha)?;
    let q = (1.0 - alpha) * p;
    if q == 0.0 {
        return Ok(tin);
    }
    let c2 = c * c;
    let layer = fading.expect_with(
        |a| {
            let num = (1.0 + c2 * a * a + q) * (1.0 + q);
            let den = q * c2 * (a - m) * (a - m) + q + c2 * a * a + 1.0;
            half_log2(num / den)
        },
        &[m],
        Tolerance::default(),
    )?;
    Ok(tin + clamp0(layer))
}

/// Superposition with the power split chosen from the mode statistics, or
/// pure TIN when that is better.
pub fn inner_mode(p: f64, c: f64, fading: &FadingDistribution, m: f64) -> Result<ModeInner> {
    check_channel(p, c)?;
    let q = fading.prob_at(m);
    if q < 0.5 - 1e-12 {
        return Err(Error::Precondition(format!("P_A({m}) = {q} is below 1/2")));
    }
    let qb = clamp0(1.0 - q);
    let t = c * c * (1.0 + fading.mean().powi(2));
    let pas_power = if qb == 0.0 {
        p
    } else {
        ((q / qb) * t - 1.0).min(p).max(0.0)
    };
    let alpha = if p > 0.0 { 1.0 - pas_power / p } else { 1.0 };
    let split = inner_superposition_alpha(p, c, fading, m, alpha)?;
    let tin = inner_superposition_alpha(p, c, fading, m, 1.0)?;
    Ok(if split >= tin {
        ModeInner { rate: split, alpha }
    } else {
        ModeInner {
            rate: tin,
            alpha: 1.0,
        }
    })
}

pub fn gap_terms(fading: &FadingDistribution, m: f64, c: f64) -> Result<GapTerms> {
    let mu2 = fading.mean().powi(2);
    let g_m_outer = conditional(fading, m, |a| half_log2((1.0 + mu2) / ((a - m) * (a - m))))?
        .unwrap_or(0.0)
        + 3.0;
    let g_m_prime = conditional(fading, m, |a| {
        half_log2((1.0 + mu2) * (1.0 / (a * a) + 1.0 / ((a - m) * (a - m))))
    })?
    .unwrap_or(0.0)
        + 3.0;
    let g_m_inner = conditional(fading, m, |a| {
        let r = (a - m) / a;
        half_log2(r * r + 1.0)
    })?
    .unwrap_or(0.0)
        + 1.0;
    let q = if fading.is_discrete() {
        fading.prob_at(m)
    } else if c > 0.0 {
        fading.mass_between(m - 1.0 / c, m + 1.0 / c)
    } else {
        1.0
    };
    Ok(GapTerms {
        g_m_outer,
        g_m_prime,
        g_m_inner,
        g_s: half_log2(1.0 + mu2) + 0.5,
        g_m_narrow: clamp0(1.0 - q) / 2.0 * (1.0 + mu2).log2() + 4.0,
    })
}

/// Outer bound for a discrete law whose atom at `m` has mass at least ½.
///
/// The result is capped by the first-regime value, which is an outer bound at
/// any smaller gain and hence, since capacity falls with `c`, at this one.
pub fn outer_mode(p: f64, c: f64, fading: &FadingDistribution, m: f64) -> Result<RegimeRate> {
    check_channel(p, c)?;
    let q = fading.prob_at(m);
    if q < 0.5 - 1e-12 {
        return Err(Error::Precondition(format!("P_A({m}) = {q} is below 1/2")));
    }
    let qb = clamp0(1.0 - q);
    let t = c * c * (1.0 + fading.mean().powi(2));
    let first = half_log2(1.0 + p) + 1.0;
    if qb >= q * t {
        return Ok(RegimeRate {
            rate: clamp0(first),
            regime: 1,
        });
    }
    let g = gap_terms(fading, m, c)?.g_m_outer;
    let (raw, regime) = if q * t <= qb * (p + 1.0) {
        (half_log2(1.0 + p) - qb / 2.0 * t.log2() + g, 2)
    } else {
        (q * half_log2(1.0 + p) + g, 3)
    };
    Ok(if raw <= first {
        RegimeRate {
            rate: clamp0(raw),
            regime,
        }
    } else {
        RegimeRate {
            rate: clamp0(first),
            regime: 1,
        }
    })
}

/// Simplified gap bounds for laws whose support stays `delta` away from 0 and `m`.
pub fn gap_lem3(fading: &FadingDistribution, m: f64, delta: f64) -> Result<Lem3Bounds> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(domain("delta", delta, "(0, ∞)"));
    }
    let atoms = fading
        .atoms()
        .ok_or_else(|| Error::Precondition("needs a discrete law".into()))?;
    let floor = delta * (1.0 - 1e-12);
    for a in atoms.iter().filter(|a| !same_point(a.value, m)) {
        if a.value.abs() < floor || (a.value - m).abs() < floor {
            return Err(Error::Precondition(format!(
                "support point {} is closer than {delta} to 0 or to m = {m}",
                a.value
            )));
        }
    }
    let qb = clamp0(1.0 - fading.prob_at(m));
    let mu2 = fading.mean().powi(2);
    let g_m_bound = qb / 2.0 * ((1.0 + mu2) / (delta * delta)).log2() + 3.0;
    let terms = gap_terms(fading, m, 0.0)?;
    let g_m_prime_bound = g_m_bound + 0.5;
    Ok(Lem3Bounds {
        g_m_bound,
        g_m_prime_bound,
        g_m_exact: terms.g_m_outer,
        g_m_prime_exact: terms.g_m_prime,
        within: terms.g_m_outer <= g_m_bound + 1e-9 && terms.g_m_prime <= g_m_prime_bound + 1e-9,
    })
}
