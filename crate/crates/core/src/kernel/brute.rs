//! Structure-free row minimisation used to cross-check the solver.
//!
//! Coordinates are eliminated one at a time: the value of the remaining
//! budget is a convex function of the budget, so each level is a
//! one-dimensional convex problem handled by golden-section search. Cost is
//! exponential in the row length; intended for rows of at most three
//! entries.

use super::AtomSystem;
use crate::numeric::golden_min;
use crate::scalar::psi_raw;

/// Minimises row `i` (0-based) by nested line search.
/// Returns the minimiser and the minimum exponent.
pub fn brute_force_row_min(system: &AtomSystem, l: f64, i: usize) -> (Vec<f64>, f64) {
    let p = &system.p()[..i];
    let a: Vec<f64> = (0..i).map(|j| system.log_ratio(j, i)).collect();
    let mut k = vec![0.0; i];
    let value = nested(&a, p, l, 0, 1.0, &mut k);
    (k, value)
}

fn term(a: f64, p: f64, l: f64, k: f64) -> f64 {
    (-a * k + psi_raw(k) / l) * p
}

fn nested(a: &[f64], p: &[f64], l: f64, j: usize, budget: f64, k: &mut [f64]) -> f64 {
    if j == a.len() {
        return 0.0;
    }
    let budget = budget.max(0.0);
    let upper = budget / p[j];
    let tol = 1e-12 * upper.max(1.0);
    if j + 1 == a.len() {
        let (x, v) = golden_min(|x| term(a[j], p[j], l, x), 0.0, upper, tol);
        k[j] = x;
        return v;
    }
    let mut scratch = k.to_vec();
    let (x, v) = golden_min(
        |x| term(a[j], p[j], l, x) + nested(a, p, l, j + 1, budget - x * p[j], &mut scratch),
        0.0,
        upper,
        tol,
    );
    k[j] = x;
    let rest = nested(a, p, l, j + 1, budget - x * p[j], k);
    v.min(term(a[j], p[j], l, x) + rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::solver::{optimal_row, row_objective};

    #[test]
    fn matches_closed_form_and_saturated_rows() {
        for (p1, t) in [(0.5, 0.5), (0.9, 1.2), (0.01, 0.93), (0.3, 2.9)] {
            let s = AtomSystem::two_point(p1, t).unwrap();
            let (k, v) = brute_force_row_min(&s, 1.12, 1);
            let exact = optimal_row(&s, 1.12, 1).unwrap();
            let ev = row_objective(&s, 1.12, 1, &exact.k).unwrap();
            assert!((v - ev).abs() < 1e-12, "p1={p1} t={t}: {v} vs {ev}");
            assert!((row_objective(&s, 1.12, 1, &k).unwrap() - v).abs() < 1e-14);
        }
    }

    #[test]
    fn two_dimensional_row() {
        let s = AtomSystem::new(vec![0.3, 0.3, 0.4], vec![(1.5f64).exp(), (0.4f64).exp(), 1.0])
            .unwrap();
        let (k, v) = brute_force_row_min(&s, 1.12, 2);
        let exact = optimal_row(&s, 1.12, 2).unwrap();
        let ev = row_objective(&s, 1.12, 2, &exact.k).unwrap();
        assert!((v - ev).abs() < 1e-10, "{v} vs {ev}");
        assert!(k[0] * 0.3 + k[1] * 0.3 <= 1.0 + 1e-9);
    }
}
