//! Fading laws for the random gain `A`, their moments and the canonical
//! (unit-variance) rescaling.

mod quantize;
mod spec;

pub use quantize::{quantize_tree, quantize_uniform, QuantizationTree, TreeValues};
pub use spec::DistSpec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::{self, normal_mass, normal_pdf, normal_quantile, Tolerance};

/// Relative tolerance used to decide that two support points coincide.
pub const POINT_TOL: f64 = 1e-12;

const TAIL_MASS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Discrete,
    LogUniform,
    TruncatedDensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

/// Built-in densities for the truncated family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "density", rename_all = "snake_case")]
pub enum Density {
    /// N(center, sigma²) restricted to `[center − halfwidth, center + halfwidth]`.
    Gaussian {
        center: f64,
        halfwidth: f64,
        sigma: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
}

impl Density {
    fn support(&self) -> (f64, f64) {
        match *self {
            Density::Gaussian {
                center, halfwidth, ..
            } => (center - halfwidth, center + halfwidth),
            Density::Uniform { lo, hi } => (lo, hi),
        }
    }

    fn pdf(&self, a: f64) -> f64 {
        let (lo, hi) = self.support();
        if a < lo || a > hi {
            return 0.0;
        }
        match *self {
            Density::Gaussian {
                center,
                halfwidth,
                sigma,
            } => {
                let z = normal_mass(-halfwidth / sigma, halfwidth / sigma);
                normal_pdf((a - center) / sigma) / (sigma * z)
            }
            Density::Uniform { lo, hi } => 1.0 / (hi - lo),
        }
    }

    /// Mass and first partial moment on `[a, b]`, in closed form.
    fn mass_and_partial_mean(&self, a: f64, b: f64) -> (f64, f64) {
        let (lo, hi) = self.support();
        let (a, b) = (a.max(lo), b.min(hi));
        if b <= a {
            return (0.0, 0.0);
        }
        match *self {
            Density::Gaussian {
                center,
                halfwidth,
                sigma,
            } => {
                let z = normal_mass(-halfwidth / sigma, halfwidth / sigma);
                let (u, v) = ((a - center) / sigma, (b - center) / sigma);
                let mass = normal_mass(u, v) / z;
                let pm = center * mass + sigma * (normal_pdf(u) - normal_pdf(v)) / z;
                (mass, pm)
            }
            Density::Uniform { lo, hi } => {
                let w = hi - lo;
                ((b - a) / w, (b * b - a * a) / (2.0 * w))
            }
        }
    }

    fn scaled(&self, k: f64) -> Density {
        match *self {
            Density::Gaussian {
                center,
                halfwidth,
                sigma,
            } => Density::Gaussian {
                center: center * k,
                halfwidth: halfwidth * k,
                sigma: sigma * k,
            },
            Density::Uniform { lo, hi } => Density::Uniform {
                lo: lo * k,
                hi: hi * k,
            },
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        match *self {
            Density::Gaussian {
                center,
                halfwidth,
                sigma,
            } => {
                let h = halfwidth / sigma;
                let lo_tail = normal_mass(f64::NEG_INFINITY, -h);
                let z = normal_mass(-h, h);
                let x = normal_quantile(lo_tail + p * z).clamp(-h, h);
                center + sigma * x
            }
            Density::Uniform { lo, hi } => lo + p * (hi - lo),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Law {
    Discrete(Vec<Atom>),
    /// Density ∝ 1/a on `[e^ln_lo, e^ln_hi]`; kept in log coordinates so very
    /// deep supports (κc^−M below f64 range) stay usable.
    LogUniform {
        ln_lo: f64,
        ln_hi: f64,
    },
    Truncated(Density),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FadingDistribution {
    law: Law,
    moments: Moments,
}

fn moment_tol() -> Tolerance {
    Tolerance {
        abs: 1e-13,
        rel: 1e-14,
        ..Tolerance::default()
    }
}

fn discrete_moments(atoms: &[Atom]) -> Moments {
    let mean: f64 = atoms.iter().map(|a| a.prob * a.value).sum();
    let second_moment: f64 = atoms.iter().map(|a| a.prob * a.value * a.value).sum();
    let variance: f64 = atoms
        .iter()
        .map(|a| a.prob * (a.value - mean) * (a.value - mean))
        .sum();
    Moments {
        mean,
        second_moment,
        variance,
    }
}

impl FadingDistribution {
    fn from_law(law: Law) -> Result<Self> {
        let mut out = FadingDistribution {
            law,
            moments: Moments {
                mean: 0.0,
                second_moment: 0.0,
                variance: 0.0,
            },
        };
        out.moments = out.recompute_moments()?;
        Ok(out)
    }

    /// Moments from their definition (exact sums or quadrature), ignoring the cache.
    pub fn recompute_moments(&self) -> Result<Moments> {
        if let Law::Discrete(atoms) = &self.law {
            return Ok(discrete_moments(atoms));
        }
        let tol = moment_tol();
        let mean = self.expect_with(|a| a, &[], tol)?;
        let second_moment = self.expect_with(|a| a * a, &[], tol)?;
        let variance = self.expect_with(|a| (a - mean) * (a - mean), &[mean], tol)?;
        if !(mean.is_finite() && second_moment.is_finite() && variance.is_finite()) {
            return Err(Error::Numeric(format!(
                "moments are not finite: mean {mean}, E[A²] {second_moment}"
            )));
        }
        Ok(Moments {
            mean,
            second_moment,
            variance,
        })
    }

    pub fn family(&self) -> Family {
        match self.law {
            Law::Discrete(_) => Family::Discrete,
            Law::LogUniform { .. } => Family::LogUniform,
            Law::Truncated(_) => Family::TruncatedDensity,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.law, Law::Discrete(_))
    }

    /// Support points sorted by value (discrete laws only).
    pub fn atoms(&self) -> Option<&[Atom]> {
        match &self.law {
            Law::Discrete(a) => Some(a),
            _ => None,
        }
    }

    pub fn density(&self) -> Option<Density> {
        match self.law {
            Law::Truncated(d) => Some(d),
            _ => None,
        }
    }

    /// `(ln lo, ln hi)` for log-uniform laws.
    pub fn log_support(&self) -> Option<(f64, f64)> {
        match self.law {
            Law::LogUniform { ln_lo, ln_hi } => Some((ln_lo, ln_hi)),
            _ => None,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match &self.law {
            Law::Discrete(atoms) => (atoms[0].value, atoms[atoms.len() - 1].value),
            Law::LogUniform { ln_lo, ln_hi } => (ln_lo.exp(), ln_hi.exp()),
            Law::Truncated(d) => d.support(),
        }
    }

    pub fn moments(&self) -> Moments {
        self.moments
    }

    pub fn mean(&self) -> f64 {
        self.moments.mean
    }

    pub fn second_moment(&self) -> f64 {
        self.moments.second_moment
    }

    pub fn variance(&self) -> f64 {
        self.moments.variance
    }

    pub fn is_canonical(&self) -> bool {
        (self.moments.variance - 1.0).abs() <= 1e-9
    }

    /// `P_A(m)`: the atom mass at `m` (zero for continuous laws).
    pub fn prob_at(&self, m: f64) -> f64 {
        match &self.law {
            Law::Discrete(atoms) => atoms
                .iter()
                .filter(|a| same_point(a.value, m))
                .map(|a| a.prob)
                .sum(),
            _ => 0.0,
        }
    }

    /// Most likely support point; ties go to the larger value.
    pub fn mode(&self) -> Option<Atom> {
        self.atoms()?
            .iter()
            .copied()
            .fold(None, |best: Option<Atom>, a| match best {
                Some(b) if b.prob > a.prob => Some(b),
                _ => Some(a),
            })
    }

    /// Probability of the closed interval `[a, b]`.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        self.mass_and_partial_mean(a, b).0
    }

    /// `(P[a ≤ A ≤ b], E[A·1{a ≤ A ≤ b}])`, in closed form for every family.
    pub fn mass_and_partial_mean(&self, a: f64, b: f64) -> (f64, f64) {
        match &self.law {
            Law::Discrete(atoms) => atoms
                .iter()
                .filter(|x| x.value >= a && x.value <= b)
                .fold((0.0, 0.0), |(m, pm), x| (m + x.prob, pm + x.prob * x.value)),
            Law::LogUniform { ln_lo, ln_hi } => {
                let la = if a > 0.0 { a.ln().max(*ln_lo) } else { *ln_lo };
                let lb = if b > 0.0 {
                    b.ln().min(*ln_hi)
                } else {
                    return (0.0, 0.0);
                };
                if lb <= la {
                    return (0.0, 0.0);
                }
                let l = ln_hi - ln_lo;
                ((lb - la) / l, (lb.exp() - la.exp()) / l)
            }
            Law::Truncated(d) => d.mass_and_partial_mean(a, b),
        }
    }

    /// `E[f(A)]`: exact for discrete laws, adaptive quadrature otherwise.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        self.expect_with(f, &[], Tolerance::default())
    }

    /// As [`expect`](Self::expect), splitting the integration range at `breaks`
    /// (points where `f` may be singular).
    pub fn expect_with<F: Fn(f64) -> f64>(
        &self,
        f: F,
        breaks: &[f64],
        tol: Tolerance,
    ) -> Result<f64> {
        match &self.law {
            Law::Discrete(atoms) => Ok(atoms.iter().map(|a| a.prob * f(a.value)).sum()),
            Law::LogUniform { ln_lo, ln_hi } => {
                let l = ln_hi - ln_lo;
                let lb: Vec<f64> = breaks
                    .iter()
                    .filter(|&&x| x > 0.0)
                    .map(|x| x.ln())
                    .collect();
                let r = quad::integrate_split(|u: f64| f(u.exp()), *ln_lo, *ln_hi, &lb, tol)?;
                Ok(r.value / l)
            }
            Law::Truncated(d) => {
                let (lo, hi) = d.support();
                let mut b = breaks.to_vec();
                if let Density::Gaussian { center, .. } = d {
                    b.push(*center);
                }
                let r = quad::integrate_split(|a| f(a) * d.pdf(a), lo, hi, &b, tol)?;
                Ok(r.value)
            }
        }
    }

    /// Law of `k·A` for `k > 0`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(domain("scale", k, "(0, ∞)"));
        }
        let law = match &self.law {
            Law::Discrete(atoms) => {
                let atoms: Vec<Atom> = atoms
                    .iter()
                    .map(|a| Atom {
                        value: a.value * k,
                        prob: a.prob,
                    })
                    .collect();
                return Ok(FadingDistribution {
                    moments: discrete_moments(&atoms),
                    law: Law::Discrete(atoms),
                });
            }
            Law::LogUniform { ln_lo, ln_hi } => Law::LogUniform {
                ln_lo: ln_lo + k.ln(),
                ln_hi: ln_hi + k.ln(),
            },
            Law::Truncated(d) => Law::Truncated(d.scaled(k)),
        };
        let m = self.moments;
        Ok(FadingDistribution {
            law,
            moments: Moments {
                mean: m.mean * k,
                second_moment: m.second_moment * k * k,
                variance: m.variance * k * k,
            },
        })
    }

    /// Draws one sample by inversion of a uniform variate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        match &self.law {
            Law::Discrete(atoms) => {
                let mut acc = 0.0;
                for a in atoms {
                    acc += a.prob;
                    if u < acc {
                        return a.value;
                    }
                }
                atoms[atoms.len() - 1].value
            }
            Law::LogUniform { ln_lo, ln_hi } => (ln_lo + u * (ln_hi - ln_lo)).exp(),
            Law::Truncated(d) => d.quantile(u),
        }
    }
}

pub fn same_point(a: f64, m: f64) -> bool {
    (a - m).abs() <= POINT_TOL * m.abs().max(1.0)
}

/// Transmit power and state gain of a channel in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub power: f64,
    pub gain: f64,
    pub canonical: bool,
}

impl ChannelParams {
    pub fn new(power: f64, gain: f64) -> Result<Self> {
        if !(power >= 0.0 && power.is_finite()) {
            return Err(domain("power", power, "[0, ∞)"));
        }
        if !(gain > 0.0 && gain.is_finite()) {
            return Err(domain("gain", gain, "(0, ∞)"));
        }
        Ok(ChannelParams {
            power,
            gain,
            canonical: true,
        })
    }
}

pub fn make_discrete(values: &[f64], probs: &[f64]) -> Result<FadingDistribution> {
    if values.is_empty() {
        return Err(Error::EmptySupport);
    }
    if values.len() != probs.len() {
        return Err(Error::Config(format!(
            "{} values but {} probabilities",
            values.len(),
            probs.len()
        )));
    }
    for (index, (&v, &p)) in values.iter().zip(probs).enumerate() {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::BadProbability { index, prob: p });
        }
        if !v.is_finite() {
            return Err(domain("support value", v, "finite reals"));
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidSimplex { sum });
    }
    let mut atoms: Vec<Atom> = values
        .iter()
        .zip(probs)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&value, &prob)| Atom { value, prob })
        .collect();
    atoms.sort_by(|a, b| a.value.total_cmp(&b.value));
    atoms.dedup_by(|next, kept| {
        if next.value == kept.value {
            kept.prob += next.prob;
            true
        } else {
            false
        }
    });
    if atoms.is_empty() {
        return Err(Error::EmptySupport);
    }
    FadingDistribution::from_law(Law::Discrete(atoms))
}

pub fn make_antipodal() -> FadingDistribution {
    make_discrete(&[-1.0, 1.0], &[0.5, 0.5]).expect("antipodal law is valid")
}

pub fn make_point_mass(m: f64) -> Result<FadingDistribution> {
    make_discrete(&[m], &[1.0])
}

/// Unit-variance geometric law on `{0, Δ, 2Δ, …}` with `P[A = kΔ] = (1−q)^k q`,
/// truncated once the remaining tail is below 1e−12 (the tail is folded into the
/// last point).
pub fn make_geometric(q: f64) -> Result<FadingDistribution> {
    if !(0.5..1.0).contains(&q) {
        return Err(domain("q", q, "[0.5, 1)"));
    }
    let qbar = 1.0 - q;
    let step = q / qbar.sqrt();
    let mut k_max = 0usize;
    while qbar.powi(k_max as i32 + 1) >= TAIL_MASS {
        k_max += 1;
    }
    let values: Vec<f64> = (0..=k_max).map(|k| k as f64 * step).collect();
    let mut probs: Vec<f64> = (0..=k_max).map(|k| qbar.powi(k as i32) * q).collect();
    probs[k_max] = qbar.powi(k_max as i32);
    // Exact in real arithmetic; trim rounding so the simplex check is tight.
    let sum: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= sum);
    make_discrete(&values, &probs)
}

/// Uniform law on `{Δ, cΔ, …, c^(M−1)Δ}` with Δ chosen for unit variance.
pub fn make_strong_set(c: f64, m: u32) -> Result<FadingDistribution> {
    if !(c > 1.0 && c.is_finite()) {
        return Err(domain("c", c, "(1, ∞)"));
    }
    if m < 2 {
        return Err(domain("M", m as f64, "integers ≥ 2"));
    }
    let mf = m as f64;
    let v = (1.0 - c.powi(2 * m as i32)) / (1.0 - c * c) / mf
        - ((1.0 - c.powi(m as i32)) / (1.0 - c) / mf).powi(2);
    if !(v > 0.0) {
        return Err(Error::Construction { radicand: v });
    }
    let step = v.sqrt().recip();
    let values: Vec<f64> = (0..m).map(|i| step * c.powi(i as i32)).collect();
    let probs = vec![1.0 / mf; m as usize];
    make_discrete(&values, &probs)
}

/// Scale κ of the unit-variance log-uniform law on `[κc^−M, κ]`.
pub fn fat_tail_kappa(c: f64, m: u32) -> Result<f64> {
    if !(c > 1.0 && c.is_finite()) {
        return Err(domain("c", c, "(1, ∞)"));
    }
    if m < 2 {
        return Err(domain("M", m as f64, "integers ≥ 2"));
    }
    let l = m as f64 * c.ln();
    // Numerator and denominator divided by c^M so large M does not overflow.
    let one_minus = -(-l).exp_m1();
    let one_minus_sq = -(-2.0 * l).exp_m1();
    let radicand = 2.0 * l * one_minus_sq - 4.0 * one_minus * one_minus;
    if !(radicand > 0.0) {
        return Err(Error::Construction { radicand });
    }
    Ok(2.0 * l / radicand.sqrt())
}

/// Mean of the unit-variance log-uniform law with parameters `(c, M)`.
pub fn fat_tail_mean(c: f64, m: u32) -> Result<f64> {
    let kappa = fat_tail_kappa(c, m)?;
    let l = m as f64 * c.ln();
    Ok(kappa * -(-l).exp_m1() / l)
}

pub fn make_fat_tail(c: f64, m: u32) -> Result<FadingDistribution> {
    let kappa = fat_tail_kappa(c, m)?;
    let ln_hi = kappa.ln();
    make_log_uniform_ln(ln_hi - m as f64 * c.ln(), ln_hi)
}

pub fn make_log_uniform(lo: f64, hi: f64) -> Result<FadingDistribution> {
    if !(lo > 0.0 && lo.is_finite()) {
        return Err(domain("lo", lo, "(0, ∞)"));
    }
    make_log_uniform_ln(lo.ln(), hi.ln())
}

pub fn make_log_uniform_ln(ln_lo: f64, ln_hi: f64) -> Result<FadingDistribution> {
    if !(ln_lo.is_finite() && ln_hi.is_finite() && ln_hi > ln_lo) {
        return Err(Error::Config(format!(
            "log-uniform support needs 0 < lo < hi (got ln lo = {ln_lo}, ln hi = {ln_hi})"
        )));
    }
    FadingDistribution::from_law(Law::LogUniform { ln_lo, ln_hi })
}

pub fn make_truncated_gaussian(
    center: f64,
    halfwidth: f64,
    sigma: f64,
) -> Result<FadingDistribution> {
    if !center.is_finite() {
        return Err(domain("center", center, "finite reals"));
    }
    if !(halfwidth > 0.0 && halfwidth.is_finite()) {
        return Err(domain("halfwidth", halfwidth, "(0, ∞)"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(domain("sigma", sigma, "(0, ∞)"));
    }
    FadingDistribution::from_law(Law::Truncated(Density::Gaussian {
        center,
        halfwidth,
        sigma,
    }))
}

pub fn make_uniform(lo: f64, hi: f64) -> Result<FadingDistribution> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::Config(format!(
            "uniform support needs lo < hi (got [{lo}, {hi}])"
        )));
    }
    FadingDistribution::from_law(Law::Truncated(Density::Uniform { lo, hi }))
}

/// N(0, 1) truncated at ±10σ; the Gaussian fading of the jointly Gaussian scheme.
pub fn make_standard_normal() -> FadingDistribution {
    make_truncated_gaussian(0.0, 10.0, 1.0).expect("valid parameters")
}

/// Rescales a raw channel to canonical form.
///
/// Returns the canonical gain `|gain_raw|·σ_A·σ_S` and the fading `A/σ_A`.
/// The fading mean is kept; only scale changes.
pub fn canonicalize(
    gain_raw: f64,
    fading: &FadingDistribution,
    state_mean: f64,
    state_var: f64,
) -> Result<(f64, FadingDistribution)> {
    if !(state_var > 0.0 && state_var.is_finite()) {
        return Err(domain("state variance", state_var, "(0, ∞)"));
    }
    if !state_mean.is_finite() {
        return Err(domain("state mean", state_mean, "finite reals"));
    }
    if !gain_raw.is_finite() {
        return Err(domain("gain", gain_raw, "finite reals"));
    }
    let var = fading.variance();
    if !(var > 0.0) {
        return Err(Error::Degenerate);
    }
    let sigma_a = var.sqrt();
    let gain = gain_raw.abs() * sigma_a * state_var.sqrt();
    if (var - 1.0).abs() <= 1e-12 {
        return Ok((gain, fading.clone()));
    }
    Ok((gain, fading.scaled(sigma_a.recip())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    #[test]
    fn antipodal_is_canonical() {
        let a = make_antipodal();
        assert_eq!(a.atoms().unwrap().len(), 2);
        assert_eq!(a.mean(), 0.0);
        assert_eq!(a.variance(), 1.0);
        assert_eq!(a.second_moment(), 1.0);
        assert_eq!(a.prob_at(1.0), 0.5);
        assert_eq!(make_discrete(&[1.0, -1.0], &[0.5, 0.5]).unwrap(), a);
    }

    #[test]
    fn geometric_half() {
        let g = make_geometric(0.5).unwrap();
        let atoms = g.atoms().unwrap();
        assert_abs_diff_eq!(atoms[1].value, 0.5 / 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(atoms[0].prob, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(atoms[1].prob, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(g.variance(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn geometric_range() {
        assert!(make_geometric(0.4).is_err());
        assert!(make_geometric(1.0).is_err());
        let g = make_geometric(0.999).unwrap();
        assert!(g.atoms().unwrap().len() <= 6);
        assert_abs_diff_eq!(g.variance(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn strong_set_two_points() {
        let s = make_strong_set(2.0, 2).unwrap();
        let atoms = s.atoms().unwrap();
        assert_abs_diff_eq!(atoms[0].value, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(atoms[1].value, 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.mean(), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.second_moment(), 10.0, epsilon = 1e-13);
        assert_abs_diff_eq!(s.variance(), 1.0, epsilon = 1e-13);
        assert!(make_strong_set(1.0, 3).is_err());
    }

    #[test]
    fn log_uniform_one_to_e() {
        let d = make_log_uniform(1.0, E).unwrap();
        assert_abs_diff_eq!(d.mean(), E - 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.second_moment(), (E * E - 1.0) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn fat_tail_unit_variance() {
        let d = make_fat_tail(3.0, 4).unwrap();
        assert_abs_diff_eq!(d.variance(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(d.mean(), fat_tail_mean(3.0, 4).unwrap(), epsilon = 1e-12);
        assert!(make_fat_tail(2.0, 10).unwrap().mean() < 1.0);
    }

    #[test]
    fn fat_tail_small_radicand_reported() {
        match fat_tail_kappa(1.0 + 1e-12, 2) {
            Err(Error::Construction { radicand }) => assert!(radicand <= 0.0),
            Ok(k) => assert!(k.is_finite()),
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn truncated_gaussian_window() {
        let d = make_truncated_gaussian(0.0, 0.1, 0.05).unwrap();
        assert_abs_diff_eq!(
            d.mass_between(d.mean() - 0.1, d.mean() + 0.1),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(d.mean(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn point_mass_moments() {
        let d = make_point_mass(1.0).unwrap();
        assert_eq!((d.mean(), d.variance()), (1.0, 0.0));
    }

    #[test]
    fn canonicalize_example() {
        let d = make_discrete(&[-3.0, 3.0], &[0.5, 0.5]).unwrap();
        let (c, a) = canonicalize(-2.0, &d, 7.0, 0.25).unwrap();
        assert_abs_diff_eq!(c, 3.0, epsilon = 1e-15);
        assert_eq!(a, make_antipodal());
        let (c1, a1) = canonicalize(1.5, &make_antipodal(), 0.0, 1.0).unwrap();
        assert_eq!((c1, a1), (1.5, make_antipodal()));
        assert_eq!(
            canonicalize(1.0, &make_point_mass(2.0).unwrap(), 0.0, 1.0),
            Err(Error::Degenerate)
        );
    }

    #[test]
    fn invalid_simplex() {
        assert!(matches!(
            make_discrete(&[0.0, 1.0], &[0.5, 0.6]),
            Err(Error::InvalidSimplex { .. })
        ));
        assert_eq!(make_discrete(&[], &[]), Err(Error::EmptySupport));
    }
}
