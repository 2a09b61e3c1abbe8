//! Numeric side conditions of the strong-fading converse.
//!
//! The converse chains per-step bounds on conditional differential entropies.
//! For jointly Gaussian terms the entropy difference is half the log of a
//! variance ratio, so each step reduces to a comparison of variances: step
//! `i` holds when
//!
//! ```text
//! ½log₂(2(c²S_i + 2)/(c²S_{i−1} + 2)) ≥ ½log₂(c²/2),   S_i = Σ_{j≤i} Δ_j²,
//! ```
//!
//! with `Δ_i = α_{i+1} − α₁`, i.e. `4(c²S_i + 2) ≥ c²(c²S_{i−1} + 2)`. All
//! quantities are in bits.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{Certificate, Status, WorstCase};
use crate::error::{domain, Error, Result};
use crate::fading::FadingDistribution;

const SPACING_TOL: f64 = 1e-12;
const MARGIN_TOL: f64 = 1e-9;

/// `½log₂(c²·step² + 2)`.
pub fn quantization_penalty(c: f64, step: f64) -> f64 {
    0.5 * (c * c * step * step + 2.0).log2()
}

/// `½log₂(2(c²S_i + 2)/(c²S_{i−1} + 2))` for 1-based `i`.
pub fn recursion_term(deltas: &[f64], c: f64, i: usize) -> Result<f64> {
    if i == 0 || i > deltas.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: deltas.len(),
        });
    }
    if let Some(&d) = deltas.iter().find(|d| !(**d > 0.0)) {
        return Err(domain("delta", d, "(0, ∞)"));
    }
    let c2 = c * c;
    let s_prev: f64 = deltas[..i - 1].iter().map(|d| d * d).sum();
    let s_i = s_prev + deltas[i - 1] * deltas[i - 1];
    Ok(0.5 * (2.0 * (c2 * s_i + 2.0) / (c2 * s_prev + 2.0)).log2())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexCheck {
    /// 1-based; compares `α_i` with `α_{i+1}`.
    pub index: usize,
    pub spacing_ok: bool,
    pub recursion: f64,
    pub required: f64,
    pub pass: bool,
}

impl IndexCheck {
    pub fn margin(&self) -> f64 {
        self.recursion - self.required
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongCheck {
    pub certificate: Certificate,
    pub indices: Vec<IndexCheck>,
    /// `α₁ − 1/(c−1)`; informational only.
    pub threshold_margin: f64,
}

/// Per-index spacing `α_{i+1} ≥ c·α_i` and entropy-step inequalities of a
/// uniform discrete law.
pub fn strong_condition_check(fading: &FadingDistribution, c: f64) -> Result<StrongCheck> {
    let started = Instant::now();
    if !(c > 2.0 && c.is_finite()) {
        return Err(domain("c", c, "(2, ∞)"));
    }
    let atoms = fading
        .atoms()
        .ok_or_else(|| Error::Precondition("strong fading needs a discrete law".into()))?;
    if atoms.len() < 2 {
        return Err(Error::Precondition(
            "strong fading needs at least two points".into(),
        ));
    }
    let p0 = atoms[0].prob;
    if let Some(i) = atoms.iter().position(|a| (a.prob - p0).abs() > 1e-12) {
        return Err(Error::Precondition(format!(
            "strong fading must be uniform (index {i})"
        )));
    }
    let alpha: Vec<f64> = atoms.iter().map(|a| a.value).collect();
    if !(alpha[0] > 0.0) {
        return Err(Error::Precondition(
            "strong fading needs positive support".into(),
        ));
    }
    let deltas: Vec<f64> = alpha[1..].iter().map(|a| a - alpha[0]).collect();
    let required = 0.5 * (c * c / 2.0).log2();
    let mut indices = Vec::with_capacity(deltas.len());
    for i in 1..=deltas.len() {
        let spacing_ok = alpha[i] - c * alpha[i - 1] >= -SPACING_TOL * c * alpha[i - 1];
        let recursion = recursion_term(&deltas, c, i)?;
        indices.push(IndexCheck {
            index: i,
            spacing_ok,
            recursion,
            required,
            pass: spacing_ok && recursion - required >= -MARGIN_TOL,
        });
    }
    let violations = indices.iter().filter(|x| !x.pass).count();
    let worst = indices
        .iter()
        .filter(|x| !x.spacing_ok)
        .chain(indices.iter().filter(|x| x.spacing_ok))
        .reduce(|a, b| {
            let key = |x: &IndexCheck| (x.spacing_ok, x.margin());
            if key(b) < key(a) {
                b
            } else {
                a
            }
        })
        .expect("at least one index");
    let m = alpha.len();
    let certificate = Certificate {
        claim_id: format!("strong_condition/c={c},M={m}"),
        status: if violations == 0 {
            Status::Pass
        } else {
            Status::Fail
        },
        worst_case: Some(WorstCase {
            p: None,
            c,
            dist: format!("uniform(M={m},a1={:.6}) index {}", alpha[0], worst.index),
            realized: worst.required,
            allowed: worst.recursion + MARGIN_TOL,
        }),
        evaluated: indices.len(),
        violations,
        skipped: 0,
        skip_reasons: vec![],
        runtime_secs: started.elapsed().as_secs_f64(),
    };
    Ok(StrongCheck {
        certificate,
        indices,
        threshold_margin: alpha[0] - 1.0 / (c - 1.0),
    })
}
