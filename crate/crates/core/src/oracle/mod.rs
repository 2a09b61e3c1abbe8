//! Brute-force Gel'fand–Pinsker oracle on small discretized alphabets, plus
//! Monte Carlo checks of the expectations used by the bounds.
//!
//! The solver returns the best policy it finds. That is a certified lower
//! bound on the capacity of the discretized channel, not the capacity itself.

mod mc;

pub use mc::{mc_expectation_check, Integrand, McCheck};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fading::FadingDistribution;
use crate::par;
use crate::quad::{normal_mass, normal_pdf, normal_quantile};

const MAX_FADING_POINTS: usize = 8;
const MAX_U: usize = 4;
const COVERAGE: f64 = 1.0 - 1e-6;
const FINAL_DELTA: f64 = 1e-4;
const REFINED_MAPS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteGpChannel {
    pub x_alphabet: Vec<f64>,
    pub s_alphabet: Vec<f64>,
    pub s_prior: Vec<f64>,
    pub a_alphabet: Vec<f64>,
    pub a_prior: Vec<f64>,
    pub y_grid: Vec<f64>,
    pub power_limit: f64,
    /// `p(y | x, s, a)` at `((x·|S| + s)·|A| + a)·|Y| + y`.
    transition: Vec<f64>,
}

impl DiscreteGpChannel {
    pub fn transition(&self, x: usize, s: usize, a: usize) -> &[f64] {
        let (ns, na, ny) = (
            self.s_alphabet.len(),
            self.a_alphabet.len(),
            self.y_grid.len(),
        );
        let start = ((x * ns + s) * na + a) * ny;
        &self.transition[start..start + ny]
    }
}

/// `ns` equiprobable cells of `N(0, 1)`, each represented by its conditional mean.
pub fn gaussian_cells(ns: usize) -> Vec<f64> {
    let edge = |k: usize| match k {
        0 => f64::NEG_INFINITY,
        k if k == ns => f64::INFINITY,
        k => normal_quantile(k as f64 / ns as f64),
    };
    (0..ns)
        .map(|k| {
            let (lo, hi) = (edge(k), edge(k + 1));
            let dens = |x: f64| if x.is_finite() { normal_pdf(x) } else { 0.0 };
            (dens(lo) - dens(hi)) * ns as f64
        })
        .collect()
}

/// A `y_span` comfortably covering every noiseless output.
pub fn default_y_span(p: f64, c: f64, fading: &FadingDistribution, ns: usize) -> f64 {
    let amax = fading
        .atoms()
        .map(|a| a.iter().map(|a| a.value.abs()).fold(0.0, f64::max))
        .unwrap_or(0.0);
    let smax = gaussian_cells(ns.max(1))
        .iter()
        .map(|s| s.abs())
        .fold(0.0, f64::max);
    p.sqrt() + c * amax * smax + 6.0
}

pub fn build_channel(
    p: f64,
    c: f64,
    fading: &FadingDistribution,
    nx: usize,
    ns: usize,
    ny: usize,
    y_span: f64,
) -> Result<DiscreteGpChannel> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(domain("P", p, "[0, ∞)"));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(domain("c", c, "[0, ∞)"));
    }
    if nx < 2 {
        return Err(domain("nx", nx as f64, "integers ≥ 2"));
    }
    if ns < 2 {
        return Err(domain("ns", ns as f64, "integers ≥ 2"));
    }
    if ny < 16 {
        return Err(domain("ny", ny as f64, "integers ≥ 16"));
    }
    if !(y_span > 0.0 && y_span.is_finite()) {
        return Err(domain("y_span", y_span, "(0, ∞)"));
    }
    let atoms = fading
        .atoms()
        .ok_or_else(|| Error::Precondition("the oracle needs a discrete fading law".into()))?;
    if atoms.len() > MAX_FADING_POINTS {
        return Err(Error::Precondition(format!(
            "the oracle takes at most {MAX_FADING_POINTS} fading points, got {}",
            atoms.len()
        )));
    }
    let amp = p.sqrt();
    let x_alphabet: Vec<f64> = if amp == 0.0 {
        vec![0.0]
    } else {
        (0..nx)
            .map(|i| -amp + 2.0 * amp * i as f64 / (nx - 1) as f64)
            .collect()
    };
    let s_alphabet = gaussian_cells(ns);
    let s_prior = vec![1.0 / ns as f64; ns];
    let a_alphabet: Vec<f64> = atoms.iter().map(|a| a.value).collect();
    let a_prior: Vec<f64> = atoms.iter().map(|a| a.prob).collect();

    let width = 2.0 * y_span / ny as f64;
    let y_grid: Vec<f64> = (0..ny)
        .map(|j| -y_span + (j as f64 + 0.5) * width)
        .collect();
    let edge = |j: usize| match j {
        0 => f64::NEG_INFINITY,
        j if j == ny => f64::INFINITY,
        j => -y_span + j as f64 * width,
    };

    let mut transition = Vec::with_capacity(x_alphabet.len() * ns * a_alphabet.len() * ny);
    for &x in &x_alphabet {
        for &s in &s_alphabet {
            for &a in &a_alphabet {
                let mean = x + c * a * s;
                let inside = normal_mass(-y_span - mean, y_span - mean);
                if inside < COVERAGE {
                    return Err(Error::Coverage {
                        mass: inside,
                        x,
                        s,
                        a,
                    });
                }
                let row: Vec<f64> = (0..ny)
                    .map(|j| normal_mass(edge(j) - mean, edge(j + 1) - mean))
                    .collect();
                let total: f64 = row.iter().sum();
                transition.extend(row.into_iter().map(|v| v / total));
            }
        }
    }
    Ok(DiscreteGpChannel {
        x_alphabet,
        s_alphabet,
        s_prior,
        a_alphabet,
        a_prior,
        y_grid,
        power_limit: p,
        transition,
    })
}

/// A deterministic encoder `x(u, s)` with a randomized auxiliary `p(u | s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpPolicy {
    /// `x_map[u][s]` indexes the input alphabet.
    pub x_map: Vec<Vec<usize>>,
    /// `p_u_given_s[s][u]`.
    pub p_u_given_s: Vec<Vec<f64>>,
}

impl GpPolicy {
    fn from_index(index: u64, nx: usize, nu: usize, ns: usize) -> Vec<Vec<usize>> {
        let mut k = index;
        let mut map = vec![vec![0; ns]; nu];
        for row in map.iter_mut() {
            for x in row.iter_mut() {
                *x = (k % nx as u64) as usize;
                k /= nx as u64;
            }
        }
        map
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpSolution {
    pub u_size: usize,
    pub policy: GpPolicy,
    /// Index of `x_map` in the enumeration order (digits base `|X|`).
    pub map_index: u64,
    /// `I(U; Y, A) − I(U; S)` in bits.
    pub rate: f64,
    pub evaluations: u64,
}

/// `I(U; Y, A) − I(U; S)` for a policy, in bits.
///
/// `U` is independent of `A`, so the first term equals `I(U; Y | A)`.
pub fn policy_rate(ch: &DiscreteGpChannel, policy: &GpPolicy) -> f64 {
    let nu = policy.x_map.len();
    let ns = ch.s_alphabet.len();
    let ny = ch.y_grid.len();
    let p_u: Vec<f64> = (0..nu)
        .map(|u| {
            (0..ns)
                .map(|s| ch.s_prior[s] * policy.p_u_given_s[s][u])
                .sum()
        })
        .collect();
    let mut i_us = 0.0;
    for s in 0..ns {
        for u in 0..nu {
            let w = policy.p_u_given_s[s][u];
            if w > 0.0 {
                i_us += ch.s_prior[s] * w * (w / p_u[u]).log2();
            }
        }
    }
    let mut i_uy = 0.0;
    let mut q = vec![0.0; nu * ny];
    let mut mix = vec![0.0; ny];
    for (a, &pa) in ch.a_prior.iter().enumerate() {
        q.iter_mut().for_each(|v| *v = 0.0);
        mix.iter_mut().for_each(|v| *v = 0.0);
        for u in 0..nu {
            if p_u[u] == 0.0 {
                continue;
            }
            for s in 0..ns {
                let w = ch.s_prior[s] * policy.p_u_given_s[s][u] / p_u[u];
                if w == 0.0 {
                    continue;
                }
                let row = ch.transition(policy.x_map[u][s], s, a);
                for y in 0..ny {
                    q[u * ny + y] += w * row[y];
                }
            }
            for y in 0..ny {
                mix[y] += p_u[u] * q[u * ny + y];
            }
        }
        for u in 0..nu {
            if p_u[u] == 0.0 {
                continue;
            }
            let d: f64 = (0..ny)
                .map(|y| {
                    let v = q[u * ny + y];
                    if v > 0.0 {
                        v * (v / mix[y]).log2()
                    } else {
                        0.0
                    }
                })
                .sum();
            i_uy += pa * p_u[u] * d;
        }
    }
    i_uy - i_us
}

/// Recomputes the rate of a solution from the full joint law of `(U, S, A, Y)`.
pub fn rate_from_joint(ch: &DiscreteGpChannel, policy: &GpPolicy) -> f64 {
    let (nu, ns, na, ny) = (
        policy.x_map.len(),
        ch.s_alphabet.len(),
        ch.a_alphabet.len(),
        ch.y_grid.len(),
    );
    let idx = |u: usize, s: usize, a: usize, y: usize| ((u * ns + s) * na + a) * ny + y;
    let mut joint = vec![0.0; nu * ns * na * ny];
    for u in 0..nu {
        for s in 0..ns {
            for a in 0..na {
                let w = ch.s_prior[s] * policy.p_u_given_s[s][u] * ch.a_prior[a];
                let row = ch.transition(policy.x_map[u][s], s, a);
                for y in 0..ny {
                    joint[idx(u, s, a, y)] = w * row[y];
                }
            }
        }
    }
    let mut p_u = vec![0.0; nu];
    let mut p_us = vec![0.0; nu * ns];
    let mut p_s = vec![0.0; ns];
    let mut p_uay = vec![0.0; nu * na * ny];
    let mut p_ay = vec![0.0; na * ny];
    for u in 0..nu {
        for s in 0..ns {
            for a in 0..na {
                for y in 0..ny {
                    let v = joint[idx(u, s, a, y)];
                    p_u[u] += v;
                    p_us[u * ns + s] += v;
                    p_s[s] += v;
                    p_uay[(u * na + a) * ny + y] += v;
                    p_ay[a * ny + y] += v;
                }
            }
        }
    }
    let mut i_uya = 0.0;
    for u in 0..nu {
        for ay in 0..na * ny {
            let v = p_uay[u * na * ny + ay];
            if v > 0.0 {
                i_uya += v * (v / (p_u[u] * p_ay[ay])).log2();
            }
        }
    }
    let mut i_us = 0.0;
    for u in 0..nu {
        for s in 0..ns {
            let v = p_us[u * ns + s];
            if v > 0.0 {
                i_us += v * (v / (p_u[u] * p_s[s])).log2();
            }
        }
    }
    i_uya - i_us
}

/// All compositions of `steps` into `parts` nonnegative parts, as probabilities.
fn simplex_grid(parts: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(parts: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(parts - 1, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(parts, steps, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|v| v.into_iter().map(|k| k as f64 / steps as f64).collect())
        .collect()
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of rate evaluations the exhaustive stage would need.
pub fn bruteforce_cost(ch: &DiscreteGpChannel, u_size: usize, simplex_steps: usize) -> u128 {
    let nx = ch.x_alphabet.len() as u128;
    let ns = ch.s_alphabet.len() as u32;
    let nu = u_size as u128;
    let row = binomial(simplex_steps as u128 + nu - 1, nu - 1);
    nu.saturating_pow(ns)
        .saturating_mul(nx.saturating_pow(u_size as u32 * ns))
        .saturating_mul(row.saturating_pow(ns))
}

#[derive(Debug, Clone)]
struct Candidate {
    rate: f64,
    map_index: u64,
    p_u_given_s: Vec<Vec<f64>>,
    evaluations: u64,
}

/// Ranks by rate, then by the smaller map index.
fn beats(a: &Candidate, b: &Candidate) -> bool {
    a.rate > b.rate || (a.rate == b.rate && a.map_index < b.map_index)
}

fn grid_stage(ch: &DiscreteGpChannel, map_index: u64, nu: usize, rows: &[Vec<f64>]) -> Candidate {
    let ns = ch.s_alphabet.len();
    let x_map = GpPolicy::from_index(map_index, ch.x_alphabet.len(), nu, ns);
    let mut policy = GpPolicy {
        x_map,
        p_u_given_s: vec![rows[0].clone(); ns],
    };
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    let mut choice = vec![0usize; ns];
    let mut evaluations = 0;
    loop {
        for (s, &k) in choice.iter().enumerate() {
            policy.p_u_given_s[s].clone_from(&rows[k]);
        }
        let r = policy_rate(ch, &policy);
        evaluations += 1;
        if best.as_ref().is_none_or(|b| r > b.0) {
            best = Some((r, policy.p_u_given_s.clone()));
        }
        let mut s = 0;
        while s < ns {
            choice[s] += 1;
            if choice[s] < rows.len() {
                break;
            }
            choice[s] = 0;
            s += 1;
        }
        if s == ns {
            break;
        }
    }
    let (rate, p_u_given_s) = best.expect("grid is nonempty");
    Candidate {
        rate,
        map_index,
        p_u_given_s,
        evaluations,
    }
}

/// Coordinate ascent on `p(u | s)`: moves mass `δ` between two entries of one
/// row while that helps, halving `δ` down to 1e−4.
fn refine(ch: &DiscreteGpChannel, nu: usize, start: &Candidate, steps: usize) -> Candidate {
    let ns = ch.s_alphabet.len();
    let mut policy = GpPolicy {
        x_map: GpPolicy::from_index(start.map_index, ch.x_alphabet.len(), nu, ns),
        p_u_given_s: start.p_u_given_s.clone(),
    };
    let mut rate = start.rate;
    let mut evaluations = start.evaluations;
    let mut delta = 0.5 / steps as f64;
    while delta >= FINAL_DELTA {
        let mut improved = true;
        while improved {
            improved = false;
            for s in 0..ns {
                for i in 0..nu {
                    for j in 0..nu {
                        if i == j || policy.p_u_given_s[s][i] < delta {
                            continue;
                        }
                        let (old_i, old_j) = (policy.p_u_given_s[s][i], policy.p_u_given_s[s][j]);
                        policy.p_u_given_s[s][i] = old_i - delta;
                        policy.p_u_given_s[s][j] = old_j + delta;
                        let r = policy_rate(ch, &policy);
                        evaluations += 1;
                        if r > rate + 1e-15 {
                            rate = r;
                            improved = true;
                        } else {
                            policy.p_u_given_s[s][i] = old_i;
                            policy.p_u_given_s[s][j] = old_j;
                        }
                    }
                }
            }
        }
        delta /= 2.0;
    }
    Candidate {
        rate,
        map_index: start.map_index,
        p_u_given_s: policy.p_u_given_s,
        evaluations,
    }
}

/// Exhaustive search over deterministic maps `x(u, s)` and a simplex grid of
/// `p(u | s)`, followed by coordinate ascent on the best few maps.
pub fn gp_capacity_bruteforce(
    ch: &DiscreteGpChannel,
    u_size: usize,
    simplex_steps: usize,
    budget: u128,
) -> Result<GpSolution> {
    if !(1..=MAX_U).contains(&u_size) {
        return Err(domain("u_size", u_size as f64, "1..=4"));
    }
    if simplex_steps == 0 {
        return Err(domain("simplex_steps", 0.0, "integers ≥ 1"));
    }
    let needed = bruteforce_cost(ch, u_size, simplex_steps);
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    let ns = ch.s_alphabet.len() as u32;
    let maps = (ch.x_alphabet.len() as u64).pow(u_size as u32 * ns);
    let rows = simplex_grid(u_size, simplex_steps);
    let mut stage: Vec<Candidate> = par::map_range(maps, |k| grid_stage(ch, k, u_size, &rows));
    let grid_evals: u64 = stage.iter().map(|c| c.evaluations).sum();
    stage.sort_by(|a, b| {
        b.rate
            .total_cmp(&a.rate)
            .then(a.map_index.cmp(&b.map_index))
    });
    stage.truncate(REFINED_MAPS);
    let refined: Vec<Candidate> = par::map_slice(&stage, |c| {
        refine(
            ch,
            u_size,
            &Candidate {
                evaluations: 0,
                ..c.clone()
            },
            simplex_steps,
        )
    });
    let refine_evals: u64 = refined.iter().map(|c| c.evaluations).sum();
    let best = refined
        .into_iter()
        .reduce(|a, b| if beats(&b, &a) { b } else { a })
        .expect("at least one map");
    Ok(GpSolution {
        u_size,
        policy: GpPolicy {
            x_map: GpPolicy::from_index(best.map_index, ch.x_alphabet.len(), u_size, ns as usize),
            p_u_given_s: best.p_u_given_s,
        },
        map_index: best.map_index,
        rate: best.rate,
        evaluations: grid_evals + refine_evals,
    })
}

/// Settings shared by every channel in a monotonicity check.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleFamily {
    pub power: f64,
    pub fading: FadingDistribution,
    pub nx: usize,
    pub ns: usize,
    pub ny: usize,
    pub y_span: f64,
    pub u_size: usize,
    pub simplex_steps: usize,
    pub budget: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub c_values: Vec<f64>,
    pub rates: Vec<f64>,
    /// Indices `i` with `rate[i+1] > rate[i] + slack`.
    pub violations: Vec<usize>,
    pub slack: f64,
}

impl MonotoneReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Solves the oracle along `c_list`; increases beyond 2e−2 are reported.
pub fn capacity_monotone_in_c_check(
    family: &OracleFamily,
    c_list: &[f64],
) -> Result<MonotoneReport> {
    const SLACK: f64 = 2e-2;
    let mut rates = Vec::with_capacity(c_list.len());
    for &c in c_list {
        let ch = build_channel(
            family.power,
            c,
            &family.fading,
            family.nx,
            family.ns,
            family.ny,
            family.y_span,
        )?;
        rates.push(
            gp_capacity_bruteforce(&ch, family.u_size, family.simplex_steps, family.budget)?.rate,
        );
    }
    let violations = rates
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0] + SLACK)
        .map(|(i, _)| i)
        .collect();
    Ok(MonotoneReport {
        c_values: c_list.to_vec(),
        rates,
        violations,
        slack: SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::make_antipodal;
    use approx::assert_abs_diff_eq;

    #[test]
    fn alphabets() {
        let ch = build_channel(1.0, 1.0, &make_antipodal(), 3, 2, 16, 8.0).unwrap();
        assert_eq!(ch.x_alphabet, vec![-1.0, 0.0, 1.0]);
        assert_abs_diff_eq!(
            ch.s_alphabet[0],
            -(2.0 / std::f64::consts::PI).sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            ch.s_alphabet[1],
            (2.0 / std::f64::consts::PI).sqrt(),
            epsilon = 1e-12
        );
        for x in 0..3 {
            for s in 0..2 {
                for a in 0..2 {
                    let t: f64 = ch.transition(x, s, a).iter().sum();
                    assert_abs_diff_eq!(t, 1.0, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn coverage_error() {
        assert!(matches!(
            build_channel(1.0, 1.0, &make_antipodal(), 3, 2, 16, 2.0),
            Err(Error::Coverage { .. })
        ));
    }

    #[test]
    fn simplex_counts() {
        assert_eq!(simplex_grid(2, 4).len(), 5);
        assert_eq!(simplex_grid(3, 4).len(), 15);
        assert!(simplex_grid(3, 4)
            .iter()
            .all(|r| (r.iter().sum::<f64>() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn zero_power_zero_rate() {
        let ch = build_channel(0.0, 1.0, &make_antipodal(), 3, 2, 16, 8.0).unwrap();
        let sol = gp_capacity_bruteforce(&ch, 2, 4, 1 << 40).unwrap();
        assert!(sol.rate.abs() < 1e-12, "{}", sol.rate);
    }

    #[test]
    fn budget_is_enforced() {
        let ch = build_channel(1.0, 1.0, &make_antipodal(), 5, 2, 16, 8.0).unwrap();
        assert!(matches!(
            gp_capacity_bruteforce(&ch, 4, 10, 1000),
            Err(Error::Budget { .. })
        ));
    }
}
