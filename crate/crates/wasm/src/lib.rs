//! Browser demo: three operations returning JSON, callable natively and,
//! through `wasm-bindgen`, from `www/index.html`.

use serde::Serialize;
use wasm_bindgen::prelude::*;
use wffd::bounds::{inner_tin_closed, Theorem};
use wffd::fading::{canonicalize, quantize_uniform, DistSpec, FadingDistribution};
use wffd::gauss::optimize_rho;
use wffd::verify::{log_spaced, sweep, SweepGrid};

const MAX_POINTS: usize = 400;
const HISTOGRAM_BINS: usize = 80;

#[derive(Debug, Serialize)]
pub struct BoundCurve {
    pub theorem: String,
    pub power: f64,
    pub dist_id: Option<String>,
    pub c: Vec<f64>,
    /// `None` where the point falls outside the bound's hypotheses.
    pub inner: Vec<Option<f64>>,
    pub outer: Vec<Option<f64>>,
    pub regime: Vec<Option<u8>>,
}

/// Inner and outer bound of `theorem` at power `p` over `n` log-spaced gains.
pub fn bound_curve(
    theorem: &str,
    p: f64,
    c_lo: f64,
    c_hi: f64,
    n: usize,
    spec: &str,
) -> Result<String, String> {
    let theorem: Theorem = theorem.parse().map_err(|e: wffd::Error| e.to_string())?;
    if !(p >= 0.0 && p.is_finite()) {
        return Err(format!("P = {p} must be a nonnegative number"));
    }
    if !(c_lo > 0.0 && c_hi > c_lo && c_hi.is_finite()) {
        return Err(format!(
            "gain range [{c_lo}, {c_hi}] must satisfy 0 < lo < hi"
        ));
    }
    if !(2..=MAX_POINTS).contains(&n) {
        return Err(format!("point count {n} must lie in 2..={MAX_POINTS}"));
    }
    let spec = spec.trim();
    let distributions = if spec.is_empty() {
        SweepGrid::default_for(theorem)
            .distributions
            .into_iter()
            .take(1)
            .collect()
    } else {
        vec![DistSpec::from_json(spec).map_err(|e| e.to_string())?]
    };
    let grid = SweepGrid {
        p_values: vec![p],
        c_values: log_spaced(c_lo, c_hi, n),
        distributions,
    };
    let points = sweep(theorem, &grid);
    let fixed = matches!(
        theorem,
        Theorem::Antipodal | Theorem::FatTail | Theorem::Ccdp
    );
    let curve = BoundCurve {
        theorem: theorem.to_string(),
        power: p,
        dist_id: (!fixed)
            .then(|| points.first().map(|pt| pt.dist_id.clone()))
            .flatten(),
        c: points.iter().map(|pt| pt.c).collect(),
        inner: points
            .iter()
            .map(|pt| pt.report.as_ref().ok().map(|r| r.inner_bpcu))
            .collect(),
        outer: points
            .iter()
            .map(|pt| pt.report.as_ref().ok().map(|r| r.outer_bpcu))
            .collect(),
        regime: points
            .iter()
            .map(|pt| pt.report.as_ref().ok().map(|r| r.regime))
            .collect(),
    };
    serde_json::to_string(&curve).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct QuantizeView {
    pub dist_id: String,
    pub mean: f64,
    pub variance: f64,
    /// Bin edges and probability per bin of the unit-variance law.
    pub edges: Vec<f64>,
    pub mass: Vec<f64>,
    /// `[value, probability]` of the quantized law.
    pub atoms: Vec<[f64; 2]>,
    pub quantized_mean: f64,
}

fn unit_variance(spec: &DistSpec) -> Result<FadingDistribution, String> {
    let law = spec.build().map_err(|e| e.to_string())?;
    if law.variance() == 0.0 {
        return Ok(law);
    }
    canonicalize(1.0, &law, 0.0, 1.0)
        .map(|(_, f)| f)
        .map_err(|e| e.to_string())
}

/// A continuous law (rescaled to unit variance) next to its step-`step`
/// quantization.
pub fn quantize_view(spec: &str, step: f64) -> Result<String, String> {
    let spec = DistSpec::from_json(spec).map_err(|e| e.to_string())?;
    let law = unit_variance(&spec)?;
    if law.is_discrete() {
        return Err("pick a continuous law; discrete laws are already quantized".into());
    }
    let q = quantize_uniform(&law, step).map_err(|e| e.to_string())?;
    let (lo, hi) = law.support();
    let width = (hi - lo) / HISTOGRAM_BINS as f64;
    let edges: Vec<f64> = (0..=HISTOGRAM_BINS)
        .map(|i| lo + i as f64 * width)
        .collect();
    let mass = edges
        .windows(2)
        .map(|w| law.mass_between(w[0], w[1]))
        .collect();
    let view = QuantizeView {
        dist_id: spec.to_string(),
        mean: law.mean(),
        variance: law.variance(),
        edges,
        mass,
        atoms: q
            .atoms()
            .unwrap_or(&[])
            .iter()
            .map(|a| [a.value, a.prob])
            .collect(),
        quantized_mean: q.mean(),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct GaussView {
    pub power: f64,
    pub gain: f64,
    pub rho_xs: f64,
    pub rho_us: f64,
    pub rho_ux: f64,
    pub rate: f64,
    /// `½log₂(1+P)`, the rate without interference.
    pub no_state: f64,
    /// Treating `cAS` as Gaussian noise, `A ~ N(0, 1)`.
    pub tin_closed: f64,
    pub evaluations: u64,
}

/// Best jointly Gaussian scheme for `N(0, 1)` fading.
pub fn gauss_optimum(p: f64, c: f64) -> Result<String, String> {
    let opt = optimize_rho(p, c).map_err(|e| e.to_string())?;
    let view = GaussView {
        power: p,
        gain: c,
        rho_xs: opt.rho.rho_xs,
        rho_us: opt.rho.rho_us,
        rho_ux: opt.rho.rho_ux,
        rate: opt.rate,
        no_state: 0.5 * (1.0 + p).log2(),
        tin_closed: inner_tin_closed(p, c, 0.0),
        evaluations: opt.evaluations,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = boundCurve)]
pub fn bound_curve_js(
    theorem: &str,
    p: f64,
    c_lo: f64,
    c_hi: f64,
    n: usize,
    spec: &str,
) -> Result<String, JsValue> {
    bound_curve(theorem, p, c_lo, c_hi, n, spec).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = quantizeView)]
pub fn quantize_view_js(spec: &str, step: f64) -> Result<String, JsValue> {
    quantize_view(spec, step).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = gaussOptimum)]
pub fn gauss_optimum_js(p: f64, c: f64) -> Result<String, JsValue> {
    gauss_optimum(p, c).map_err(|e| JsValue::from_str(&e))
}
