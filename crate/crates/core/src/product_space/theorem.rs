//! Checks of `Σ_x P(x)·exp(m(A,x)/L) ≤ 1/P(A)` on finite product spaces.
//!
//! Distances enter through upper approximations (a feasible measure's
//! value), so a pass is always sound. Reports also carry the sum with the
//! certified lower bounds, bracketing the exact left side.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distance::point_mass_distance;
use super::minimize::{minimize_m_with, DEFAULT_MAX_ITER};
use super::space::{FiniteProductSpace, Subset};
use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::scalar::INEQUALITY_SLACK;

/// Largest `|Ω|^n` accepted by the all-subsets sweep (subsets are `u32` masks).
pub const MAX_SWEEP_POINTS: usize = 27;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Options {
    pub gap_tol: f64,
    pub max_iter: usize,
    pub override_guard: bool,
    /// Rounds of tenfold gap tightening attempted before a failure is
    /// reported.
    pub refinements: usize,
}

impl Default for Theorem1Options {
    fn default() -> Self {
        Self {
            gap_tol: 1e-6,
            max_iter: DEFAULT_MAX_ITER,
            override_guard: false,
            refinements: 3,
        }
    }
}

impl Theorem1Options {
    pub fn with_gap(gap_tol: f64) -> Self {
        Self {
            gap_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub l: f64,
    pub subset: String,
    pub prob_a: f64,
    /// `Σ_x P(x)·exp(m̂/L)` with the upper approximations m̂.
    pub lhs_upper: f64,
    /// Same sum with `m̂ − gap`.
    pub lhs_lower: f64,
    pub rhs: f64,
    pub max_gap: f64,
    /// Points whose minimisation ran out of iterations.
    pub unconverged: usize,
    pub pass: bool,
}

fn check_l(l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "L",
            value: l,
            expected: "finite L > 0",
        })
    }
}

fn passes(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + INEQUALITY_SLACK)
}

pub fn verify_theorem1(
    space: &FiniteProductSpace,
    a: &Subset,
    l: f64,
    gap_tol: f64,
) -> Result<Theorem1Report> {
    verify_theorem1_with(space, a, l, &Theorem1Options::with_gap(gap_tol))
}

pub fn verify_theorem1_with(
    space: &FiniteProductSpace,
    a: &Subset,
    l: f64,
    opts: &Theorem1Options,
) -> Result<Theorem1Report> {
    check_l(l)?;
    let count = space.check_enumeration(opts.override_guard)?;
    let mut gap_tol = opts.gap_tol;
    let mut report = theorem1_once(space, a, l, gap_tol, opts.max_iter, count)?;
    for _ in 0..opts.refinements {
        if report.pass {
            break;
        }
        gap_tol /= 10.0;
        report = theorem1_once(space, a, l, gap_tol, opts.max_iter * 10, count)?;
    }
    Ok(report)
}

fn theorem1_once(
    space: &FiniteProductSpace,
    a: &Subset,
    l: f64,
    gap_tol: f64,
    max_iter: usize,
    count: usize,
) -> Result<Theorem1Report> {
    let terms = (0..count)
        .into_par_iter()
        .map(|idx| {
            let x = space.point(idx);
            let px = space.prob(&x);
            let r = minimize_m_with(space, &x, a, gap_tol, max_iter)?;
            Ok((
                px * (r.value / l).exp(),
                px * (r.lower_bound() / l).exp(),
                r.gap,
                !r.converged,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let upper: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let lower: Vec<f64> = terms.iter().map(|t| t.1).collect();
    let lhs_upper = pairwise_sum(&upper);
    let prob_a = space.subset_prob(a);
    let rhs = 1.0 / prob_a;
    Ok(Theorem1Report {
        l,
        subset: a.to_text(),
        prob_a,
        lhs_upper,
        lhs_lower: pairwise_sum(&lower),
        rhs,
        max_gap: terms.iter().map(|t| t.2).fold(0.0, f64::max),
        unconverged: terms.iter().filter(|t| t.3).count(),
        pass: passes(lhs_upper, rhs),
    })
}

/// Summary of checking every nonempty `A ⊆ Ω^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub l: f64,
    pub atom_count: usize,
    pub n: usize,
    pub subsets: u64,
    /// Subsets settled by the point-mass bound alone.
    pub screened: u64,
    /// Full reports for the subsets the bound did not settle.
    pub solved: Vec<Theorem1Report>,
    pub failures: Vec<Theorem1Report>,
    /// Largest `lhs/rhs` seen (upper approximations).
    pub worst_ratio: f64,
    pub worst_subset: String,
    pub pass: bool,
}

/// Checks every nonempty subset.
///
/// Each subset is first screened with `m̂(A,x) = min_{y∈A} m(δ_y, x)`, an
/// upper bound of `m(A, x)`; subsets that fail the screen are re-checked
/// with [`verify_theorem1_with`]. Subsets are visited depth-first so the
/// per-point minima are updated incrementally.
pub fn verify_theorem1_all_subsets(
    space: &FiniteProductSpace,
    l: f64,
    opts: &Theorem1Options,
) -> Result<SweepReport> {
    check_l(l)?;
    let count = space.check_enumeration(opts.override_guard)?;
    if count > MAX_SWEEP_POINTS {
        return Err(Error::EnumerationGuard {
            count: count as u128,
            limit: MAX_SWEEP_POINTS as u128,
        });
    }
    let points: Vec<Vec<usize>> = (0..count).map(|i| space.point(i)).collect();
    let probs: Vec<f64> = points.iter().map(|x| space.prob(x)).collect();
    // weight[y][x] = P(x)·exp(m(δ_y, x)/L); min over y ∈ A gives the screened term.
    let weight: Vec<Vec<f64>> = points
        .iter()
        .map(|y| {
            points
                .iter()
                .zip(&probs)
                .map(|(x, px)| px * (point_mass_distance(space, x, y) / l).exp())
                .collect()
        })
        .collect();

    // Split on the first `prefix` elements for parallelism.
    let prefix = count.min(8);
    let partials: Vec<Screen> = (0..1u32 << prefix)
        .into_par_iter()
        .map(|head| {
            let mut screen = Screen::new(count);
            let mut mins = vec![f64::INFINITY; count];
            let mut prob_a = 0.0;
            let mut mask = 0u32;
            for e in 0..prefix {
                if head >> e & 1 == 1 {
                    mask |= 1 << e;
                    prob_a += probs[e];
                    for (m, w) in mins.iter_mut().zip(&weight[e]) {
                        *m = m.min(*w);
                    }
                }
            }
            let mut stack = vec![0.0; (count - prefix + 1) * count];
            stack[..count].copy_from_slice(&mins);
            let sum: f64 = if mask == 0 { 0.0 } else { mins.iter().sum() };
            screen.descend(prefix, 0, mask, prob_a, sum, &weight, &probs, &mut stack);
            screen
        })
        .collect();

    let mut subsets = 0u64;
    let mut unresolved = Vec::new();
    let mut worst = (f64::NEG_INFINITY, 0u32);
    for part in partials {
        subsets += part.visited;
        unresolved.extend(part.unresolved);
        if part.worst.0 > worst.0 || (part.worst.0 == worst.0 && part.worst.1 < worst.1) {
            worst = part.worst;
        }
    }
    unresolved.sort_unstable();
    let screened = subsets - unresolved.len() as u64;

    let mut solved = Vec::with_capacity(unresolved.len());
    for &mask in &unresolved {
        let a = Subset::from_mask(space, u64::from(mask))?;
        solved.push(verify_theorem1_with(space, &a, l, opts)?);
    }
    // Screened subsets bound their ratio by the screen; unresolved ones use
    // the solver's value instead.
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut worst_subset = String::new();
    if worst.1 != 0 && !unresolved.contains(&worst.1) {
        worst_ratio = worst.0;
        worst_subset = Subset::from_mask(space, u64::from(worst.1))?.to_text();
    }
    for r in &solved {
        let ratio = r.lhs_upper / r.rhs;
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_subset = r.subset.clone();
        }
    }
    let failures: Vec<Theorem1Report> = solved.iter().filter(|r| !r.pass).cloned().collect();
    Ok(SweepReport {
        l,
        atom_count: space.atom_count(),
        n: space.n(),
        subsets,
        screened,
        pass: failures.is_empty(),
        solved,
        failures,
        worst_ratio,
        worst_subset,
    })
}

struct Screen {
    count: usize,
    visited: u64,
    unresolved: Vec<u32>,
    /// Largest screened ratio among subsets that passed the screen.
    worst: (f64, u32),
}

impl Screen {
    fn new(count: usize) -> Self {
        Self {
            count,
            visited: 0,
            unresolved: Vec::new(),
            worst: (f64::NEG_INFINITY, 0),
        }
    }

    /// `stack[depth*count..]` holds the current per-point minima.
    #[allow(clippy::too_many_arguments)]
    fn descend(
        &mut self,
        element: usize,
        depth: usize,
        mask: u32,
        prob_a: f64,
        sum: f64,
        weight: &[Vec<f64>],
        probs: &[f64],
        stack: &mut [f64],
    ) {
        let count = self.count;
        if element == count {
            if mask != 0 {
                self.visited += 1;
                let ratio = sum * prob_a;
                if passes(sum, 1.0 / prob_a) {
                    if ratio > self.worst.0 {
                        self.worst = (ratio, mask);
                    }
                } else {
                    self.unresolved.push(mask);
                }
            }
            return;
        }
        self.descend(element + 1, depth, mask, prob_a, sum, weight, probs, stack);

        let (head, tail) = stack.split_at_mut((depth + 1) * count);
        let current = &head[depth * count..];
        let next = &mut tail[..count];
        let mut new_sum = 0.0;
        for ((slot, &m), &w) in next.iter_mut().zip(current).zip(&weight[element]) {
            *slot = m.min(w);
            new_sum += *slot;
        }
        self.descend(
            element + 1,
            depth + 1,
            mask | 1 << element,
            prob_a + probs[element],
            new_sum,
            weight,
            probs,
            stack,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_space_is_equality() {
        let s = FiniteProductSpace::new(vec![0.7, 0.2, 0.1], 2).unwrap();
        let a = Subset::full(&s).unwrap();
        let r = verify_theorem1(&s, &a, 1.12, 1e-6).unwrap();
        assert!((r.lhs_upper - 1.0).abs() < 1e-12);
        assert!((r.rhs - 1.0).abs() < 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn single_coordinate_example() {
        let s = FiniteProductSpace::uniform(2, 1).unwrap();
        let a = Subset::new(&s, vec![0]).unwrap();
        let r = verify_theorem1(&s, &a, 1.12, 1e-6).unwrap();
        let oracle = 0.5 + 0.5 * (0.5f64 / 1.12).exp();
        assert!((r.lhs_upper - oracle).abs() < 1e-12);
        assert!((r.lhs_upper - 1.281).abs() < 1e-3);
        assert_eq!(r.rhs, 2.0);
        assert!(r.pass);
    }

    #[test]
    fn guard_rejects_large_spaces() {
        let s = FiniteProductSpace::uniform(2, 21).unwrap();
        let a = Subset::new(&s, vec![0]).unwrap();
        assert!(matches!(
            verify_theorem1(&s, &a, 1.12, 1e-6),
            Err(Error::EnumerationGuard { .. })
        ));
        let s = FiniteProductSpace::uniform(2, 5).unwrap();
        assert!(verify_theorem1_all_subsets(&s, 1.12, &Theorem1Options::default()).is_err());
    }

    #[test]
    fn sweep_counts_every_subset() {
        let s = FiniteProductSpace::uniform(2, 2).unwrap();
        let r = verify_theorem1_all_subsets(&s, 1.12, &Theorem1Options::default()).unwrap();
        assert_eq!(r.subsets, 15);
        assert!(r.pass);
        assert!((r.worst_ratio - 1.0).abs() < 1e-12);
    }
}
