//! `m(A, x) = inf { m(ν, x) : ν(A) = 1 }` by conditional gradient.
//!
//! Each `d_i` is linear in ν and ψ is convex, so the objective is convex on
//! the simplex over `A`. The solver is the pairwise variant of Frank–Wolfe:
//! mass moves from the worst support point to the best vertex with an exact
//! line search, and the linearisation gap `⟨∇f(ν), ν − e_best⟩`, which
//! bounds `f(ν) − m(A, x)`, is the stopping certificate.

use serde::{Deserialize, Serialize};

use super::space::{FiniteProductSpace, MeasureOnSubset, Subset};
use crate::error::{Error, Result};
use crate::scalar::{psi_prime_raw, psi_raw};

pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimized {
    /// `m(ν, x)` at the returned measure; never below the infimum.
    pub value: f64,
    pub nu: MeasureOnSubset,
    /// Certified bound on `value − m(A, x)`.
    pub gap: f64,
    pub iterations: usize,
    /// Whether `gap ≤ gap_tol` was reached within the iteration budget.
    pub converged: bool,
}

impl Minimized {
    pub fn lower_bound(&self) -> f64 {
        (self.value - self.gap).max(0.0)
    }
}

pub fn minimize_m(
    space: &FiniteProductSpace,
    x: &[usize],
    a: &Subset,
    gap_tol: f64,
) -> Result<Minimized> {
    minimize_m_with(space, x, a, gap_tol, DEFAULT_MAX_ITER)
}

/// Working state: atoms of every support point, and off-diagonal marginals.
struct State<'a> {
    mu: &'a [f64],
    x: &'a [usize],
    points: Vec<Vec<usize>>,
    weights: Vec<f64>,
    q: Vec<Vec<f64>>,
}

impl State<'_> {
    fn objective(&self) -> f64 {
        self.q
            .iter()
            .map(|row| {
                row.iter()
                    .zip(self.mu)
                    .map(|(q, m)| psi_raw(q / m) * m)
                    .sum::<f64>()
            })
            .sum()
    }

    fn gradient(&self, s: usize) -> f64 {
        self.points[s]
            .iter()
            .enumerate()
            .filter(|(i, &w)| w != self.x[*i])
            .map(|(i, &w)| psi_prime_raw(self.q[i][w] / self.mu[w]))
            .sum()
    }

    /// Derivative of the objective along `e_to − e_from` after moving `step`.
    fn directional(&self, to: usize, from: usize, step: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.x.len() {
            let (wt, wf) = (self.points[to][i], self.points[from][i]);
            if wt == wf {
                continue;
            }
            if wt != self.x[i] {
                total += psi_prime_raw((self.q[i][wt] + step) / self.mu[wt]);
            }
            if wf != self.x[i] {
                total -= psi_prime_raw((self.q[i][wf] - step).max(0.0) / self.mu[wf]);
            }
        }
        total
    }

    fn shift(&mut self, to: usize, from: usize, step: f64) {
        for i in 0..self.x.len() {
            let (wt, wf) = (self.points[to][i], self.points[from][i]);
            if wt == wf {
                continue;
            }
            if wt != self.x[i] {
                self.q[i][wt] += step;
            }
            if wf != self.x[i] {
                self.q[i][wf] = (self.q[i][wf] - step).max(0.0);
            }
        }
        self.weights[to] += step;
        self.weights[from] -= step;
        if self.weights[from] < 1e-300 {
            self.weights[from] = 0.0;
        }
    }
}

/// [`minimize_m`] with an explicit iteration budget. Running out of budget
/// is not an error: the result carries the best value and its gap.
pub fn minimize_m_with(
    space: &FiniteProductSpace,
    x: &[usize],
    a: &Subset,
    gap_tol: f64,
    max_iter: usize,
) -> Result<Minimized> {
    space.check_point(x)?;
    if gap_tol.is_nan() || gap_tol <= 0.0 {
        return Err(Error::Domain {
            name: "gap_tol",
            value: gap_tol,
            expected: "gap_tol > 0",
        });
    }
    let x_index = space.index(x)?;
    if a.contains(x_index) {
        return Ok(Minimized {
            value: 0.0,
            nu: MeasureOnSubset::point_mass(x_index),
            gap: 0.0,
            iterations: 0,
            converged: true,
        });
    }

    let points: Vec<Vec<usize>> = a.indices().iter().map(|&y| space.point(y)).collect();
    let size = points.len();
    let mut state = State {
        mu: space.mu(),
        x,
        points,
        weights: vec![1.0 / size as f64; size],
        q: vec![vec![0.0; space.atom_count()]; space.n()],
    };
    for s in 0..size {
        for (i, &xi) in x.iter().enumerate() {
            let w = state.points[s][i];
            if w != xi {
                state.q[i][w] += state.weights[s];
            }
        }
    }

    let mut iterations = 0;
    let mut gap;
    loop {
        let grads: Vec<f64> = (0..size).map(|s| state.gradient(s)).collect();
        let best = (0..size)
            .min_by(|&u, &v| grads[u].total_cmp(&grads[v]))
            .expect("nonempty subset");
        let worst = (0..size)
            .filter(|&s| state.weights[s] > 0.0)
            .max_by(|&u, &v| grads[u].total_cmp(&grads[v]))
            .expect("measure has support");
        let inner: f64 = grads.iter().zip(&state.weights).map(|(g, w)| g * w).sum();
        gap = (inner - grads[best]).max(0.0);
        if gap <= gap_tol || iterations >= max_iter || best == worst {
            break;
        }
        iterations += 1;

        let cap = state.weights[worst];
        let step = if state.directional(best, worst, cap) <= 0.0 {
            cap
        } else {
            // The directional derivative is nondecreasing along the segment.
            let (mut lo, mut hi) = (0.0, cap);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if state.directional(best, worst, mid) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-17 {
                    break;
                }
            }
            0.5 * (lo + hi)
        };
        if step <= 0.0 {
            break;
        }
        state.shift(best, worst, step);
    }

    let value = state.objective();
    let converged = gap <= gap_tol;
    let nu = MeasureOnSubset::from_parts(a.indices().to_vec(), state.weights);
    Ok(Minimized {
        value,
        nu,
        gap,
        iterations,
        converged,
    })
}
