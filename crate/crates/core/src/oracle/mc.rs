use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{gap_terms, inner_tin_exact};
use crate::error::{domain, Error, Result};
use crate::fading::{same_point, FadingDistribution};
use crate::gauss::{r_gamma, RhoPoint};
use crate::quad::Tolerance;

const MIN_SAMPLES: usize = 10_000;

/// Functions of the fading whose expectations enter the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum Integrand {
    Constant {
        value: f64,
    },
    /// `½log₂(1 + P/(1 + c²a²))`.
    Tin {
        power: f64,
        gain: f64,
    },
    /// `½log₂((1+μ²)/(a−m)²)`, averaged over `a ≠ m`.
    GmOuter {
        m: f64,
    },
    /// `R_Γ(ρ, a)`.
    RGamma {
        rho: RhoPoint,
        power: f64,
        gain: f64,
    },
}

impl Integrand {
    pub const IDS: [&'static str; 4] = ["constant", "tin", "g_m", "r_gamma"];

    /// Builds an integrand from its id and positional parameters:
    /// `constant v`, `tin P c`, `g_m m`, `r_gamma ρ_XS ρ_US ρ_UX P c`.
    pub fn from_id(id: &str, params: &[f64]) -> Result<Self> {
        let want = |n: usize| {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "integrand `{id}` takes {n} parameters, got {}",
                    params.len()
                )))
            }
        };
        match id {
            "constant" => want(1).map(|_| Integrand::Constant { value: params[0] }),
            "tin" => want(2).map(|_| Integrand::Tin {
                power: params[0],
                gain: params[1],
            }),
            "g_m" => want(1).map(|_| Integrand::GmOuter { m: params[0] }),
            "r_gamma" => want(5).map(|_| Integrand::RGamma {
                rho: RhoPoint {
                    rho_xs: params[0],
                    rho_us: params[1],
                    rho_ux: params[2],
                },
                power: params[3],
                gain: params[4],
            }),
            other => Err(Error::Config(format!(
                "unknown integrand `{other}` (known: {})",
                Self::IDS.join(", ")
            ))),
        }
    }

    /// `None` for samples excluded from the average.
    fn sample_value(&self, a: f64, mu2: f64) -> Option<f64> {
        match *self {
            Integrand::Constant { value } => Some(value),
            Integrand::Tin { power, gain } => {
                Some(0.5 * (1.0 + power / (1.0 + gain * gain * a * a)).log2())
            }
            Integrand::GmOuter { m } => {
                (!same_point(a, m)).then(|| 0.5 * ((1.0 + mu2) / ((a - m) * (a - m))).log2())
            }
            Integrand::RGamma { rho, power, gain } => Some(r_gamma(&rho, a, power, gain)),
        }
    }

    fn quadrature(&self, fading: &FadingDistribution) -> Result<f64> {
        match *self {
            Integrand::Constant { value } => Ok(value),
            Integrand::Tin { power, gain } => inner_tin_exact(power, gain, fading),
            Integrand::GmOuter { m } => Ok(gap_terms(fading, m, 1.0)?.g_m_outer - 3.0),
            Integrand::RGamma { rho, power, gain } => {
                let mut breaks = vec![0.0];
                if gain > 0.0 {
                    let k = 1.0 - rho.rho_us * rho.rho_us;
                    breaks.push(-power.sqrt() * rho.rho_xs / gain);
                    if k > 0.0 {
                        breaks.push(
                            -power.sqrt() * (rho.rho_xs - rho.rho_ux * rho.rho_us) / (gain * k),
                        );
                    }
                }
                fading.expect_with(
                    |a| r_gamma(&rho, a, power, gain),
                    &breaks,
                    Tolerance::default(),
                )
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McCheck {
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub quad_value: f64,
    /// Samples that entered the average.
    pub used: usize,
}

impl McCheck {
    pub fn within(&self, sigmas: f64) -> bool {
        (self.mc_mean - self.quad_value).abs() <= sigmas * self.mc_stderr
    }
}

/// Seeded Monte Carlo estimate of `E[f(A)]` next to its quadrature value.
pub fn mc_expectation_check(
    fading: &FadingDistribution,
    integrand: &Integrand,
    n_samples: usize,
    seed: u64,
) -> Result<McCheck> {
    if n_samples < MIN_SAMPLES {
        return Err(domain("n_samples", n_samples as f64, "[10⁴, ∞)"));
    }
    let mu2 = fading.mean().powi(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Welford: a constant sequence keeps its mean exactly.
    let (mut n, mut mean, mut m2) = (0usize, 0.0f64, 0.0f64);
    for _ in 0..n_samples {
        let a = fading.sample(&mut rng);
        if let Some(v) = integrand.sample_value(a, mu2) {
            if !v.is_finite() {
                return Err(Error::Numeric(format!("integrand is {v} at a = {a}")));
            }
            n += 1;
            let d = v - mean;
            mean += d / n as f64;
            m2 += d * (v - mean);
        }
    }
    if n < 2 {
        return Err(Error::Numeric("fewer than two usable samples".into()));
    }
    Ok(McCheck {
        mc_mean: mean,
        mc_stderr: (m2 / (n - 1) as f64 / n as f64).sqrt(),
        quad_value: integrand.quadrature(fading)?,
        used: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::make_antipodal;

    #[test]
    fn constant_is_exact() {
        let r = mc_expectation_check(
            &make_antipodal(),
            &Integrand::Constant { value: 1.0 },
            10_000,
            0,
        )
        .unwrap();
        assert_eq!(r.mc_mean, 1.0);
        assert_eq!(r.mc_stderr, 0.0);
        assert!(r.within(3.0));
    }

    #[test]
    fn registry() {
        assert!(matches!(
            Integrand::from_id("cauchy", &[]),
            Err(Error::Config(_))
        ));
        assert!(Integrand::from_id("tin", &[1.0]).is_err());
        assert_eq!(
            Integrand::from_id("tin", &[3.0, 0.5]).unwrap(),
            Integrand::Tin {
                power: 3.0,
                gain: 0.5
            }
        );
        assert!(mc_expectation_check(
            &make_antipodal(),
            &Integrand::Constant { value: 1.0 },
            10,
            0
        )
        .is_err());
    }
}
