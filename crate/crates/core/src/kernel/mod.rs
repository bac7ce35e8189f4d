//! Optimal kernels for the weighted exponential inequality
//!
//! ```text
//! Σ_i (p_i/g_i)·exp{ Σ_{j<i} (log(g_i/g_j)·k_j^i + ψ(k_j^i)/L)·p_j } ≤ 1/(p_1 g_1 + … + p_m g_m)
//! ```
//!
//! subject to `k_j^i ≥ 0` and the row budgets `Σ_{j<i} k_j^i p_j ≤ 1`.
//! Each row is an independent separable convex program; [`solver`] solves it
//! exactly by a closed form or multiplier bisection, [`brute`] minimises it
//! by nested line search without using that structure, and [`search`] scans
//! grids of systems for violations and brackets the critical constant.

pub mod brute;
pub mod search;
pub mod solver;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use brute::brute_force_row_min;
pub use search::{
    critical_l, critical_l_with, search_counterexample, worst_violation, Counterexample, GridSpec,
};
pub use solver::{
    lemma_lhs, optimal_row, reduced_lhs, row_objective, solve_kernel, verify_lemma,
    verify_lemma_brute, KernelAssignment, LemmaReport, OptimalRow,
};

/// Probability-weighted atoms `(p_i, g_i)` with `g` sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSystem {
    p: Vec<f64>,
    g: Vec<f64>,
}

impl AtomSystem {
    /// Builds a system, sorting the pairs so that `g_1 ≥ … ≥ g_m`.
    pub fn new(p: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidSystem("no atoms".into()));
        }
        if p.len() != g.len() {
            return Err(Error::LengthMismatch {
                what: "g",
                expected: p.len(),
                got: g.len(),
            });
        }
        if let Some((j, &x)) = p.iter().enumerate().find(|(_, &x)| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidSystem(format!("p[{j}] = {x} is not positive")));
        }
        if let Some((j, &x)) = g.iter().enumerate().find(|(_, &x)| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidSystem(format!("g[{j}] = {x} is not positive")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSystem(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let mut pairs: Vec<(f64, f64)> = p.into_iter().zip(g).collect();
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1));
        let (p, g) = pairs.into_iter().unzip();
        Ok(Self { p, g })
    }

    /// Grid cells are built from normalised shares and sorted log-values.
    pub(crate) fn new_unchecked(p: Vec<f64>, g: Vec<f64>) -> Self {
        debug_assert!(g.windows(2).all(|w| w[0] >= w[1]));
        Self { p, g }
    }

    /// Two atoms with `g = (e^t, 1)`.
    pub fn two_point(p1: f64, log_ratio: f64) -> Result<Self> {
        Self::new(vec![p1, 1.0 - p1], vec![log_ratio.exp(), 1.0])
    }

    /// Random system: `p` from a flat Dirichlet, consecutive log-gaps of `g`
    /// i.i.d. uniform on `[0, 2]`, smallest `g` equal to 1.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        assert!(m >= 1, "at least one atom");
        let raw: Vec<f64> = (0..m)
            .map(|_| {
                let e: f64 = Exp1.sample(rng);
                e.max(f64::MIN_POSITIVE)
            })
            .collect();
        let total: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let gap = Uniform::new_inclusive(0.0, 2.0).expect("valid range");
        let mut log_g = vec![0.0; m];
        for j in (0..m.saturating_sub(1)).rev() {
            log_g[j] = log_g[j + 1] + gap.sample(rng);
        }
        let g = log_g.into_iter().map(f64::exp).collect();
        Self { p, g }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    /// `log(g_j / g_i)`, nonnegative for `j < i`.
    pub fn log_ratio(&self, j: usize, i: usize) -> f64 {
        (self.g[j] / self.g[i]).ln()
    }

    /// `1 / Σ p_i g_i`, the right-hand side of the inequality.
    pub fn rhs(&self) -> f64 {
        1.0 / self.p.iter().zip(&self.g).map(|(p, g)| p * g).sum::<f64>()
    }

    /// Same probabilities, every `g` multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            p: self.p.clone(),
            g: self.g.iter().map(|g| g * c).collect(),
        }
    }
}
