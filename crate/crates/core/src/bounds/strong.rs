use serde::{Deserialize, Serialize};

use super::{
    check_channel, clamp0, half_log2, inner_superposition_alpha, maximize_alpha, RegimeRate,
};
use crate::error::{domain, Error, Result};
use crate::fading::FadingDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongInner {
    pub rate: f64,
    pub alpha: f64,
}

/// Checks that `fading` is uniform over positive points with
/// `α_{i+1} ≥ κ·c·α_i` and that `c > 2`. Returns the number of points.
pub fn check_strong_set(fading: &FadingDistribution, c: f64, kappa: f64) -> Result<usize> {
    if !(c > 2.0 && c.is_finite()) {
        return Err(domain("c", c, "(2, ∞)"));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(domain("kappa", kappa, "(0, ∞)"));
    }
    let atoms = fading
        .atoms()
        .ok_or_else(|| Error::Precondition("strong fading needs a discrete law".into()))?;
    let m = atoms.len();
    if m < 2 {
        return Err(Error::Precondition(
            "strong fading needs at least two points".into(),
        ));
    }
    let p = 1.0 / m as f64;
    if let Some(i) = atoms.iter().position(|a| (a.prob - p).abs() > 1e-12) {
        return Err(Error::Precondition(format!(
            "point {} has probability {} (uniform needs {p})",
            i + 1,
            atoms[i].prob
        )));
    }
    if atoms[0].value <= 0.0 {
        return Err(Error::Precondition(format!(
            "point 1 is {} (must be positive)",
            atoms[0].value
        )));
    }
    for (i, w) in atoms.windows(2).enumerate() {
        if w[1].value < kappa * c * w[0].value * (1.0 - 1e-12) {
            return Err(Error::Precondition(format!(
                "spacing fails at index {}: {} < {kappa}·{c}·{}",
                i + 1,
                w[1].value,
                w[0].value
            )));
        }
    }
    Ok(m)
}

/// `½log₂(κ(1+μ_A²)) + ½`.
pub fn g_s(fading: &FadingDistribution, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(domain("kappa", kappa, "(0, ∞)"));
    }
    Ok(half_log2(kappa * (1.0 + fading.mean().powi(2))) + 0.5)
}

/// Outer bound for uniform fading over geometrically spaced points.
pub fn outer_strong(p: f64, c: f64, fading: &FadingDistribution, kappa: f64) -> Result<RegimeRate> {
    check_channel(p, c)?;
    let m = check_strong_set(fading, c, kappa)? as f64;
    let g = g_s(fading, kappa)?;
    let t = (1.0 + fading.mean().powi(2)) * c * c;
    let (rate, regime) = if t <= 1.0 {
        (half_log2(1.0 + p) + g, 1)
    } else if t <= (m - 1.0) * (p + 1.0) {
        (half_log2(1.0 + p + t) - (m - 1.0) / m * half_log2(t) + g, 2)
    } else {
        (half_log2(1.0 + p) / m + g, 3)
    };
    Ok(RegimeRate {
        rate: clamp0(rate),
        regime,
    })
}

/// Best superposition rate with the pre-coded layer aimed at `m = μ_A`.
pub fn inner_strong(p: f64, c: f64, fading: &FadingDistribution) -> Result<StrongInner> {
    let mu = fading.mean();
    let (alpha, rate) = maximize_alpha(|a| inner_superposition_alpha(p, c, fading, mu, a))?;
    Ok(StrongInner { rate, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::{make_discrete, make_strong_set};
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_mean_hypothetical() {
        let d = make_discrete(&[-1.0, 1.0], &[0.5, 0.5]).unwrap();
        assert_eq!(g_s(&d, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn middle_regime() {
        let d = make_strong_set(3.0, 3).unwrap();
        let mu = d.mean();
        let t = (1.0 + mu * mu) * 9.0;
        let gs = 0.5 * (1.0 + mu * mu).log2() + 0.5;
        let expect = 0.5 * (101.0 + t).log2() - (2.0 / 3.0) * 0.5 * t.log2() + gs;
        let r = outer_strong(100.0, 3.0, &d, 1.0).unwrap();
        assert_eq!(r.regime, 2);
        assert_abs_diff_eq!(r.rate, expect, epsilon = 1e-13);
    }

    #[test]
    fn small_ratio_envelope_violation() {
        // Two points with ratio 2.5: the ½log₂(1+μ²)+½ value exceeds 3/2.
        let d = make_strong_set(2.5, 2).unwrap();
        let gs = g_s(&d, 1.0).unwrap();
        let mu = d.mean();
        assert_abs_diff_eq!(gs, 0.5 * (1.0 + mu * mu).log2() + 0.5, epsilon = 1e-15);
        assert!(gs > 1.5, "{gs}");
    }

    #[test]
    fn spacing_violation_names_index() {
        let d = make_discrete(&[1.0, 1.5, 4.5], &[1.0 / 3.0; 3]).unwrap();
        match check_strong_set(&d, 3.0, 1.0) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("index 1"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(check_strong_set(&make_strong_set(3.0, 3).unwrap(), 2.0, 1.0).is_err());
    }
}
