use serde::{Deserialize, Serialize};

use super::{fat_tail_kappa, make_discrete, Atom, FadingDistribution};
use crate::error::{domain, Error, Result};

const MIN_CELL_MASS: f64 = 1e-14;
const MAX_CELLS: f64 = 1e7;
const MAX_TREE_NODES: u64 = 1 << 22;

/// Uniform quantization with disjoint width-`step` cells centred at `μ_A + k·step`.
/// Each cell maps to its conditional mean; cells below 1e−14 mass are dropped.
pub fn quantize_uniform(fading: &FadingDistribution, step: f64) -> Result<FadingDistribution> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(domain("step", step, "(0, ∞)"));
    }
    if fading.is_discrete() {
        return Err(Error::Precondition(
            "uniform quantization needs a continuous fading law".into(),
        ));
    }
    let mu = fading.mean();
    let (lo, hi) = fading.support();
    let k_lo = ((lo - mu) / step - 0.5).floor();
    let k_hi = ((hi - mu) / step + 0.5).ceil();
    if k_hi - k_lo > MAX_CELLS {
        return Err(Error::Config(format!(
            "step {step} gives {} cells over [{lo}, {hi}]",
            k_hi - k_lo
        )));
    }
    let mut values = Vec::new();
    let mut probs = Vec::new();
    let mut k = k_lo;
    while k <= k_hi {
        let a = mu + (k - 0.5) * step;
        let b = mu + (k + 0.5) * step;
        let (mass, partial) = fading.mass_and_partial_mean(a, b);
        if mass >= MIN_CELL_MASS {
            values.push((partial / mass).clamp(a.max(lo), b.min(hi)));
            probs.push(mass);
        }
        k += 1.0;
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    make_discrete(&values, &probs)
}

/// How fine-cell values are assigned inside each coarse interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeValues {
    /// Every node in `I_k` takes `E[A | A ∈ I_k]`.
    #[default]
    CoarseMean,
    /// Each node takes the conditional mean of its own equal-probability cell.
    CellMean,
}

/// Coarse/fine quantization tree of the fat-tail law.
///
/// Level `k` (1-based) covers `I_k = [κ/c^k, κ/c^(k−1))` and holds
/// `(c−1)c^(k−1)` nodes. Nodes are numbered heap-style: level `k` uses
/// indices `c^(k−1) .. c^k − 1` and the parent of node `j` is `j / c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationTree {
    pub branching: u32,
    pub depth: u32,
    pub kappa: f64,
    pub values: TreeValues,
    pub levels: Vec<Vec<Atom>>,
}

pub fn quantize_tree(c: u32, m: u32) -> Result<QuantizationTree> {
    quantize_tree_with(c, m, TreeValues::CoarseMean)
}

pub fn quantize_tree_with(c: u32, m: u32, values: TreeValues) -> Result<QuantizationTree> {
    if c < 2 {
        return Err(domain("c", c as f64, "integers ≥ 2"));
    }
    if m < 2 {
        return Err(domain("M", m as f64, "integers ≥ 2"));
    }
    let nodes = (c as u64).checked_pow(m).filter(|&n| n <= MAX_TREE_NODES);
    if nodes.is_none() {
        return Err(Error::Config(format!(
            "tree with c = {c}, M = {m} is too large"
        )));
    }
    let cf = c as f64;
    let kappa = fat_tail_kappa(cf, m)?;
    let ln_c = cf.ln();
    let ln_kappa = kappa.ln();
    let mut levels = Vec::with_capacity(m as usize);
    for k in 1..=m {
        let count = (c - 1) as usize * (c as usize).pow(k - 1);
        let prob = 1.0 / (m as f64 * count as f64);
        let level = match values {
            TreeValues::CoarseMean => {
                let value = kappa * (cf - 1.0) / (cf.powi(k as i32) * ln_c);
                vec![Atom { value, prob }; count]
            }
            TreeValues::CellMean => {
                let width = ln_c / count as f64;
                let base = ln_kappa - k as f64 * ln_c;
                (0..count)
                    .map(|j| {
                        let u0 = base + j as f64 * width;
                        let value = u0.exp() * width.exp_m1() / width;
                        Atom { value, prob }
                    })
                    .collect()
            }
        };
        levels.push(level);
    }
    Ok(QuantizationTree {
        branching: c,
        depth: m,
        kappa,
        values,
        levels,
    })
}

impl QuantizationTree {
    /// Node by heap index (`1 ≤ index < c^M`).
    pub fn node(&self, index: u64) -> Option<Atom> {
        let c = self.branching as u64;
        let mut first = 1u64;
        for level in &self.levels {
            let next = first * c;
            if index >= first && index < next {
                return level.get((index - first) as usize).copied();
            }
            first = next;
        }
        None
    }

    pub fn level_mass(&self, k: usize) -> f64 {
        self.levels[k - 1].iter().map(|a| a.prob).sum()
    }

    /// Number of root-to-leaf paths, `c^M − c^(M−1)`.
    pub fn path_count(&self) -> usize {
        self.levels.last().map_or(0, Vec::len)
    }

    /// Root-to-leaf value sequences, one per leaf in index order.
    pub fn paths(&self) -> Vec<Vec<f64>> {
        let c = self.branching as u64;
        let m = self.depth as usize;
        let first_leaf = c.pow(self.depth - 1);
        (0..self.path_count() as u64)
            .map(|offset| {
                let mut path = vec![0.0; m];
                let mut j = first_leaf + offset;
                for slot in path.iter_mut().rev() {
                    *slot = self.node(j).expect("ancestor exists").value;
                    j /= c;
                }
                path
            })
            .collect()
    }

    /// All nodes as one discrete law (equal values are merged).
    pub fn flatten(&self) -> Result<FadingDistribution> {
        let (values, probs): (Vec<f64>, Vec<f64>) = self
            .levels
            .iter()
            .flatten()
            .map(|a| (a.value, a.prob))
            .unzip();
        make_discrete(&values, &probs)
    }

    /// Law of a uniformly chosen entry of a uniformly chosen path.
    pub fn path_mixture(&self) -> Result<FadingDistribution> {
        let paths = self.paths();
        let w = 1.0 / (paths.len() as f64 * self.depth as f64);
        let values: Vec<f64> = paths.into_iter().flatten().collect();
        let probs = vec![w; values.len()];
        make_discrete(&values, &probs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::{make_fat_tail, make_truncated_gaussian, make_uniform};
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform_unit_interval() {
        let d = make_uniform(0.0, 1.0).unwrap();
        let q = quantize_uniform(&d, 0.5).unwrap();
        let atoms = q.atoms().unwrap();
        let expect = [(0.125, 0.25), (0.5, 0.5), (0.875, 0.25)];
        assert_eq!(atoms.len(), 3);
        for (a, (v, p)) in atoms.iter().zip(expect) {
            assert_abs_diff_eq!(a.value, v, epsilon = 1e-15);
            assert_abs_diff_eq!(a.prob, p, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(q.mean(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rejects_discrete_input() {
        assert!(quantize_uniform(&crate::fading::make_antipodal(), 0.1).is_err());
    }

    #[test]
    fn gaussian_mean_kept() {
        let d = make_truncated_gaussian(1.0, 1.0, 0.2).unwrap();
        for step in [1e-3, 0.01, 0.3, 1.0] {
            let q = quantize_uniform(&d, step).unwrap();
            assert_abs_diff_eq!(q.mean(), d.mean(), epsilon = 1e-9);
        }
    }

    #[test]
    fn tree_two_by_two() {
        let t = quantize_tree(2, 2).unwrap();
        let ln2 = 2f64.ln();
        assert_eq!(t.levels[0].len(), 1);
        assert_eq!(t.levels[1].len(), 2);
        assert_abs_diff_eq!(t.levels[0][0].value, t.kappa / 2.0 / ln2, epsilon = 1e-14);
        assert_abs_diff_eq!(t.levels[0][0].prob, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t.levels[1][0].value, t.kappa / 4.0 / ln2, epsilon = 1e-14);
        assert_abs_diff_eq!(t.levels[1][1].prob, 0.25, epsilon = 1e-15);
        let paths = t.paths();
        assert_eq!(paths.len(), 2);
        for p in paths {
            assert_eq!(p.len(), 2);
            assert_abs_diff_eq!(p[0] / p[1], 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn coarse_values_match_log_uniform_cells() {
        let t = quantize_tree(3, 4).unwrap();
        let d = make_fat_tail(3.0, 4).unwrap();
        for k in 1..=4 {
            let a = t.kappa / 3f64.powi(k);
            let (mass, pm) = d.mass_and_partial_mean(a, 3.0 * a);
            assert_abs_diff_eq!(mass, 0.25, epsilon = 1e-12);
            assert_abs_diff_eq!(
                t.levels[k as usize - 1][0].value,
                pm / mass,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn tree_three_by_three_paths() {
        let t = quantize_tree(3, 3).unwrap();
        assert_eq!(t.paths().len(), 18);
        assert!(t.node(27).is_none());
        assert!(t.node(26).is_some());
        assert!(quantize_tree(1, 3).is_err());
        assert!(quantize_tree(3, 1).is_err());
    }
}
