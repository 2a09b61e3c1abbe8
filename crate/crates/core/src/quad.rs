//! Numerical integration: adaptive Gauss–Kronrod on finite intervals and
//! Gauss–Hermite expectations under the standard normal law.

use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::num::NonZeroUsize;

use gauss_quad::GaussHermite;
use libm::{erf, erfc};
use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let pts: &[f64] = if x == 0.0 {
            &[c][..]
        } else {
            &[c - h * x, c + h * x][..]
        };
        for &t in pts {
            let y = f(t);
            if !y.is_finite() {
                return Err(Error::Numeric(format!(
                    "integrand is {y} at x = {t} on [{a}, {b}]"
                )));
            }
            kronrod += w * y;
            if i % 2 == 1 {
                gauss += WG[i / 2] * y;
            }
        }
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).abs()))
}

/// Adaptive G7/K15 quadrature with global error control.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Numeric(format!("bad interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evals: 0,
        });
    }
    let (value, error) = gk15(&f, a, b)?;
    let mut evals = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    while total_err > tol.abs.max(tol.rel * total.abs()) {
        if heap.len() >= tol.max_intervals {
            return Err(Error::Numeric(format!(
                "no convergence on [{a}, {b}]: estimate {total}, error {total_err} after {evals} evaluations"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel collapsed to adjacent floats; keep it and stop refining.
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid)?;
        let (v2, e2) = gk15(&f, mid, worst.b)?;
        evals += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed drift from the running updates.
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Integral {
        value,
        error,
        evals,
    })
}

/// Integrates over `[a, b]` split at the given interior points (e.g. where the
/// integrand has a log singularity).
pub fn integrate_split<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Integral> {
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    edges.extend(inner);
    edges.push(b);
    let mut out = Integral {
        value: 0.0,
        error: 0.0,
        evals: 0,
    };
    for w in edges.windows(2) {
        let part = integrate(&f, w[0], w[1], tol)?;
        out.value += part.value;
        out.error += part.error;
        out.evals += part.evals;
    }
    Ok(out)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// `Φ(v) − Φ(u)` without cancellation in either tail.
pub fn normal_mass(u: f64, v: f64) -> f64 {
    if u >= v {
        return 0.0;
    }
    if u > 0.0 {
        0.5 * (erfc(u * FRAC_1_SQRT_2) - erfc(v * FRAC_1_SQRT_2))
    } else if v < 0.0 {
        0.5 * (erfc(-v * FRAC_1_SQRT_2) - erfc(-u * FRAC_1_SQRT_2))
    } else {
        0.5 * (erf(v * FRAC_1_SQRT_2) - erf(u * FRAC_1_SQRT_2))
    }
}

pub fn normal_quantile(p: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// Gauss–Hermite rule rescaled for expectations under N(0, 1).
#[derive(Debug, Clone)]
pub struct HermiteRule {
    nodes: Vec<(f64, f64)>,
}

impl HermiteRule {
    pub fn new(order: usize) -> Result<Self> {
        let n = NonZeroUsize::new(order)
            .ok_or_else(|| crate::error::domain("quad_order", 0.0, "[1, ∞)"))?;
        let rule = GaussHermite::new(n);
        let scale = PI.sqrt().recip();
        let nodes = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (SQRT_2 * x, w * scale))
            .collect();
        Ok(HermiteRule { nodes })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().map(|&(x, w)| w * f(x)).sum()
    }
}
