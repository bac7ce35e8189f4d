//! Exact row minimisation.
//!
//! For row `i` write `a_j = log(g_j/g_i) ≥ 0`. The row objective is
//! `Σ_j p_j·(ψ(k_j)/L − a_j k_j)`, separable and convex, with the single
//! coupling constraint `Σ_j p_j k_j ≤ 1`. Stationarity with multiplier
//! `λ ≥ 0` reads `ψ′(k_j) = L·(a_j − λ)`, so
//!
//! * `k_j = 0` when `a_j ≤ λ`,
//! * `k_j = 2L(a_j − λ)` while that stays below 2,
//! * any `k_j ≥ 2` when `a_j − λ = 1/L` (ψ is linear there),
//! * no finite minimiser when `a_j − λ > 1/L`.
//!
//! With `λ = 0` feasible the closed form applies. Otherwise the budget
//! binds and `λ` solves `Σ_j p_j clamp(2L(a_j − λ), 0, 2) = 1`; if that sum
//! is already below 1 at the smallest admissible multiplier
//! `λ₀ = a_max − 1/L`, the remaining budget goes to the first coordinate
//! with the largest ratio.

use serde::{Deserialize, Serialize};

use super::brute::brute_force_row_min;
use super::AtomSystem;
use crate::error::{Error, Result};
use crate::scalar::{psi_raw, INEQUALITY_SLACK};

/// Slack with which both closed-form conditions must hold strictly.
const BRANCH_SLACK: f64 = 1e-12;
const MAX_BISECTION: usize = 200;
/// Tolerance for calling a row budget saturated.
pub const BUDGET_TOL: f64 = 1e-9;

fn check_l(l: f64) -> Result<()> {
    if l.is_finite() && l > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "L",
            value: l,
            expected: "finite L > 0",
        })
    }
}

fn check_row(system: &AtomSystem, i: usize) -> Result<()> {
    if i < system.len() {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "i",
            value: i as f64,
            expected: "row index below the atom count",
        })
    }
}

/// Exponent of row `i` (0-based) at kernel `k`:
/// `Σ_{j<i} (log(g_i/g_j)·k_j + ψ(k_j)/L)·p_j`.
pub fn row_objective(system: &AtomSystem, l: f64, i: usize, k: &[f64]) -> Result<f64> {
    check_l(l)?;
    check_row(system, i)?;
    if k.len() != i {
        return Err(Error::LengthMismatch {
            what: "kernel row",
            expected: i,
            got: k.len(),
        });
    }
    if let Some(&bad) = k.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::Domain {
            name: "k",
            value: bad,
            expected: "finite and nonnegative",
        });
    }
    Ok(row_objective_raw(system, l, i, k))
}

pub(crate) fn row_objective_raw(system: &AtomSystem, l: f64, i: usize, k: &[f64]) -> f64 {
    let p = system.p();
    k.iter()
        .enumerate()
        .map(|(j, &kj)| (-system.log_ratio(j, i) * kj + psi_raw(kj) / l) * p[j])
        .sum()
}

/// Minimiser of one row together with the multiplier that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalRow {
    pub k: Vec<f64>,
    pub multiplier: f64,
    pub saturated: bool,
}

/// Minimises row `i` (0-based) over `k ≥ 0, Σ k_j p_j ≤ 1`, choosing among
/// minimisers the one with the largest budget use.
pub fn optimal_row(system: &AtomSystem, l: f64, i: usize) -> Result<OptimalRow> {
    check_l(l)?;
    check_row(system, i)?;
    if i == 0 {
        return Ok(OptimalRow {
            k: Vec::new(),
            multiplier: 0.0,
            saturated: false,
        });
    }
    let p = &system.p()[..i];
    let a: Vec<f64> = (0..i).map(|j| system.log_ratio(j, i)).collect();
    let inv_l = 1.0 / l;
    // First index attaining the largest ratio.
    let (top, a_max) = a
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (j, x)| if x > acc.1 { (j, x) } else { acc });

    let unconstrained: f64 = a.iter().zip(p).map(|(aj, pj)| 2.0 * l * aj * pj).sum();
    if a_max < inv_l - BRANCH_SLACK && unconstrained < 1.0 - BRANCH_SLACK {
        return Ok(OptimalRow {
            k: a.iter().map(|aj| 2.0 * l * aj).collect(),
            multiplier: 0.0,
            saturated: false,
        });
    }

    let clamp_at = |lambda: f64| -> Vec<f64> {
        a.iter()
            .map(|aj| (2.0 * l * (aj - lambda)).clamp(0.0, 2.0))
            .collect()
    };
    let budget = |k: &[f64]| -> f64 { k.iter().zip(p).map(|(kj, pj)| kj * pj).sum() };

    let lambda0 = (a_max - inv_l).max(0.0);
    let has_flat = a_max >= inv_l - BRANCH_SLACK;
    let mut k0 = clamp_at(lambda0);
    if has_flat {
        for (kj, aj) in k0.iter_mut().zip(&a) {
            if *aj - lambda0 >= inv_l - BRANCH_SLACK {
                *kj = 2.0;
            }
        }
    }
    let used = budget(&k0);
    if used <= 1.0 {
        if has_flat {
            k0[top] += (1.0 - used) / p[top];
        }
        return Ok(OptimalRow {
            k: k0,
            multiplier: lambda0,
            saturated: true,
        });
    }

    // Σ p_j clamp(2L(a_j − λ), 0, 2) is continuous and nonincreasing in λ,
    // above 1 at λ₀ and 0 at a_max.
    let (mut lo, mut hi) = (lambda0, a_max);
    let mut iterations = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if iterations == MAX_BISECTION {
            return Err(Error::BisectionFailed {
                row: i + 1,
                iterations,
            });
        }
        if budget(&clamp_at(mid)) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let mut lambda = 0.5 * (lo + hi);

    // The budget is affine in λ on the current active set; solve it there.
    let (mut interior_mass, mut interior_moment, mut capped) = (0.0, 0.0, 0.0);
    for (aj, pj) in a.iter().zip(p) {
        let raw = 2.0 * l * (aj - lambda);
        if raw >= 2.0 {
            capped += 2.0 * pj;
        } else if raw > 0.0 {
            interior_mass += pj;
            interior_moment += 2.0 * l * aj * pj;
        }
    }
    if interior_mass > 0.0 {
        let exact = (interior_moment + capped - 1.0) / (2.0 * l * interior_mass);
        if (exact - lambda).abs() <= 1e-9 * lambda.abs().max(1.0) {
            lambda = exact.max(lambda0);
        }
    }
    Ok(OptimalRow {
        k: clamp_at(lambda),
        multiplier: lambda,
        saturated: true,
    })
}

/// Optimal kernel for every row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelAssignment {
    pub l: f64,
    /// `entries[i][j]` for `j < i`, 0-based.
    pub entries: Vec<Vec<f64>>,
    pub multipliers: Vec<f64>,
    pub budget_saturated: Vec<bool>,
}

impl KernelAssignment {
    pub fn row_budget(&self, system: &AtomSystem, i: usize) -> f64 {
        self.entries[i]
            .iter()
            .zip(system.p())
            .map(|(k, p)| k * p)
            .fold(0.0, |acc, x| acc + x)
    }
}

pub fn solve_kernel(system: &AtomSystem, l: f64) -> Result<KernelAssignment> {
    let m = system.len();
    let mut out = KernelAssignment {
        l,
        entries: Vec::with_capacity(m),
        multipliers: Vec::with_capacity(m),
        budget_saturated: Vec::with_capacity(m),
    };
    for i in 0..m {
        let row = optimal_row(system, l, i)?;
        out.entries.push(row.k);
        out.multipliers.push(row.multiplier);
        out.budget_saturated.push(row.saturated);
    }
    Ok(out)
}

fn lhs_from_exponents(system: &AtomSystem, exponents: impl Iterator<Item = f64>) -> f64 {
    system
        .p()
        .iter()
        .zip(system.g())
        .zip(exponents)
        .map(|((p, g), e)| p / g * e.exp())
        .sum()
}

/// Left side of the kernel inequality at the optimal kernel.
pub fn lemma_lhs(system: &AtomSystem, l: f64) -> Result<f64> {
    let mut exponents = Vec::with_capacity(system.len());
    for i in 0..system.len() {
        let row = optimal_row(system, l, i)?;
        exponents.push(row_objective_raw(system, l, i, &row.k));
    }
    Ok(lhs_from_exponents(system, exponents.into_iter()))
}

/// Outcome of checking the kernel inequality for one system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`; negative means the inequality fails.
    pub margin: f64,
    pub pass: bool,
}

impl LemmaReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            lhs,
            rhs,
            margin,
            pass: margin >= -INEQUALITY_SLACK * rhs,
        }
    }

    /// `(lhs − rhs)/rhs`, positive for a violation.
    pub fn relative_violation(&self) -> f64 {
        -self.margin / self.rhs
    }
}

pub fn verify_lemma(system: &AtomSystem, l: f64) -> Result<LemmaReport> {
    Ok(LemmaReport::new(lemma_lhs(system, l)?, system.rhs()))
}

/// As [`verify_lemma`], with every row minimised by [`brute_force_row_min`]
/// so that no part of the structured solver is involved.
pub fn verify_lemma_brute(system: &AtomSystem, l: f64) -> Result<LemmaReport> {
    check_l(l)?;
    let exponents: Vec<f64> = (0..system.len())
        .map(|i| brute_force_row_min(system, l, i).1)
        .collect();
    Ok(LemmaReport::new(
        lhs_from_exponents(system, exponents.into_iter()),
        system.rhs(),
    ))
}

/// Closed-form left side `Σ_i (p_i/g_i)·exp{−L Σ_{j<i} log²(g_j/g_i)·p_j}`.
///
/// Valid only where every row is unsaturated; otherwise reports the first
/// offending row (1-based).
pub fn reduced_lhs(system: &AtomSystem, l: f64) -> Result<f64> {
    check_l(l)?;
    let p = system.p();
    let tol = 1e-12;
    let mut exponents = Vec::with_capacity(system.len());
    for i in 0..system.len() {
        let top = system.log_ratio(0, i);
        if top > 1.0 / l + tol {
            return Err(Error::ReducedPrecondition {
                row: i + 1,
                reason: format!("log(g_1/g_i) = {top} exceeds 1/L = {}", 1.0 / l),
            });
        }
        let (mut budget, mut exponent) = (0.0, 0.0);
        for (j, pj) in p.iter().enumerate().take(i) {
            let a = system.log_ratio(j, i);
            budget += 2.0 * l * a * pj;
            exponent -= l * a * a * pj;
        }
        if budget > 1.0 + tol {
            return Err(Error::ReducedPrecondition {
                row: i + 1,
                reason: format!("closed-form budget {budget} exceeds 1"),
            });
        }
        exponents.push(exponent);
    }
    Ok(lhs_from_exponents(system, exponents.into_iter()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_half() -> AtomSystem {
        AtomSystem::two_point(0.5, 0.5).unwrap()
    }

    #[test]
    fn empty_row_objective_is_zero() {
        assert_eq!(row_objective(&half_half(), 1.12, 0, &[]).unwrap(), 0.0);
    }

    #[test]
    fn row_objective_example() {
        let v = row_objective(&half_half(), 1.12, 1, &[1.12]).unwrap();
        let oracle = (-0.5 * 1.12 + 0.3136 / 1.12) * 0.5;
        assert!((v - oracle).abs() < 1e-15);
        assert!((v + 0.14).abs() < 1e-12);
    }

    #[test]
    fn row_objective_rejects_bad_kernels() {
        let s = half_half();
        assert!(matches!(
            row_objective(&s, 1.12, 1, &[]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(row_objective(&s, 1.12, 1, &[-1.0]).is_err());
        assert!(row_objective(&s, 1.12, 2, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn equal_g_has_zero_objective_and_kernel() {
        let s = AtomSystem::new(vec![0.2, 0.3, 0.5], vec![2.0; 3]).unwrap();
        assert_eq!(row_objective(&s, 1.12, 2, &[0.0, 0.0]).unwrap(), 0.0);
        for i in 0..3 {
            let row = optimal_row(&s, 1.12, i).unwrap();
            assert!(row.k.iter().all(|&k| k == 0.0));
            assert!(!row.saturated);
        }
    }

    #[test]
    fn closed_form_example() {
        let row = optimal_row(&half_half(), 1.12, 1).unwrap();
        assert!((row.k[0] - 1.12).abs() < 1e-15);
        assert_eq!(row.multiplier, 0.0);
        assert!(!row.saturated);
    }

    #[test]
    fn saturated_example() {
        let s = AtomSystem::two_point(0.9, 1.2).unwrap();
        let row = optimal_row(&s, 1.12, 1).unwrap();
        assert!(row.saturated);
        assert!((row.k[0] * 0.9 - 1.0).abs() < 1e-12);
        // The oracle: a 1e-5 grid over the feasible interval [0, 1/0.9].
        let step = 1e-5;
        let mut best = f64::INFINITY;
        let mut k = 0.0;
        while k <= 1.0 / 0.9 {
            best = best.min(row_objective(&s, 1.12, 1, &[k]).unwrap());
            k += step;
        }
        let ours = row_objective(&s, 1.12, 1, &row.k).unwrap();
        assert!(ours <= best + 1e-12);
    }

    #[test]
    fn surplus_goes_to_first_top_coordinate() {
        // Three equal top atoms far above the last one: λ₀ > 0, tied flat
        // coordinates, small budget use at λ₀ — surplus lands on j = 0.
        let s = AtomSystem::new(vec![0.1, 0.1, 0.1, 0.7], vec![10.0, 10.0, 10.0, 1.0]).unwrap();
        let row = optimal_row(&s, 1.12, 3).unwrap();
        assert!(row.saturated);
        assert!((row.multiplier - (10f64.ln() - 1.0 / 1.12)).abs() < 1e-12);
        assert_eq!(row.k[1], 2.0);
        assert_eq!(row.k[2], 2.0);
        assert!((row.k[0] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn lemma_lhs_examples() {
        let one = AtomSystem::new(vec![1.0], vec![3.0]).unwrap();
        assert!((lemma_lhs(&one, 1.12).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let flat = AtomSystem::new(vec![0.3, 0.7], vec![2.5, 2.5]).unwrap();
        assert!((lemma_lhs(&flat, 1.12).unwrap() - 0.4).abs() < 1e-15);
        let s = half_half();
        let lhs = lemma_lhs(&s, 1.12).unwrap();
        let oracle = 0.5 * (-0.5f64).exp() + 0.5 * (-1.12 * 0.25 * 0.5f64).exp();
        assert!((lhs - oracle).abs() < 1e-14);
        assert!((lhs - 0.7380).abs() < 1e-4);
        assert!((s.rhs() - 0.7551).abs() < 5e-5);
    }

    #[test]
    fn verify_lemma_examples() {
        let one = AtomSystem::new(vec![1.0], vec![3.0]).unwrap();
        let r = verify_lemma(&one, 1.12).unwrap();
        assert!(r.pass);
        assert!(r.margin.abs() < 1e-12);
        assert!(verify_lemma(&half_half(), 1.12).unwrap().pass);
    }

    #[test]
    fn reduced_matches_and_reports_offending_row() {
        let s = half_half();
        let red = reduced_lhs(&s, 1.12).unwrap();
        let full = lemma_lhs(&s, 1.12).unwrap();
        assert!((red - full).abs() <= 1e-12 * full);
        let bad = AtomSystem::new(vec![0.2, 0.3, 0.5], vec![(3.0f64).exp(), 1.5, 1.0]).unwrap();
        match reduced_lhs(&bad, 1.12) {
            Err(Error::ReducedPrecondition { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected precondition error, got {other:?}"),
        }
    }

    #[test]
    fn kernel_assignment_invariants() {
        let s = AtomSystem::new(
            vec![0.1, 0.2, 0.3, 0.4],
            vec![(2.5f64).exp(), (1.0f64).exp(), (0.3f64).exp(), 1.0],
        )
        .unwrap();
        let ka = solve_kernel(&s, 1.12).unwrap();
        for i in 0..s.len() {
            assert!(ka.entries[i].iter().all(|&k| k >= 0.0));
            let b = ka.row_budget(&s, i);
            assert!(b <= 1.0 + BUDGET_TOL);
            assert_eq!(ka.budget_saturated[i], (b - 1.0).abs() <= BUDGET_TOL);
            if !ka.budget_saturated[i] {
                assert_eq!(ka.multipliers[i], 0.0);
            }
        }
    }
}
