//! Grid scans for violations of the kernel inequality and bisection for the
//! smallest constant at which a grid shows none.
//!
//! Every cell is checked with [`verify_lemma_brute`], never with the
//! structured solver.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::solver::{verify_lemma_brute, LemmaReport};
use super::AtomSystem;
use crate::error::{Error, Result};
use crate::numeric::{linspace, logspace};

/// Grid over systems.
///
/// Probabilities are log-spaced on `[p_min, 1 − p_min]` (violations near the
/// critical constant live at very small `p_1`); log-ratios are the
/// `ratio_points` values `max_log_ratio·k/ratio_points`, `k = 1..`.
/// For `m > 2` each of the first `m − 1` atoms takes a stick-breaking
/// fraction from the probability axis and each consecutive gap
/// `log(g_j/g_{j+1})` a value from the ratio axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub p_points: usize,
    pub ratio_points: usize,
    pub p_min: f64,
    pub max_log_ratio: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            p_points: 200,
            ratio_points: 200,
            p_min: 1e-4,
            max_log_ratio: 3.0,
        }
    }
}

impl GridSpec {
    pub fn square(points: usize) -> Self {
        Self {
            p_points: points,
            ratio_points: points,
            ..Self::default()
        }
    }

    /// A grid containing every point of `self`.
    pub fn refined(&self) -> Self {
        Self {
            p_points: 2 * self.p_points - 1,
            ratio_points: 2 * self.ratio_points,
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        if self.p_points < 2 || self.ratio_points < 1 {
            return Err(Error::Domain {
                name: "grid",
                value: self.p_points.min(self.ratio_points) as f64,
                expected: "at least 2 probability and 1 ratio points",
            });
        }
        if !(self.p_min > 0.0 && self.p_min < 0.5) {
            return Err(Error::Domain {
                name: "p_min",
                value: self.p_min,
                expected: "0 < p_min < 0.5",
            });
        }
        if !(self.max_log_ratio > 0.0 && self.max_log_ratio.is_finite()) {
            return Err(Error::Domain {
                name: "max_log_ratio",
                value: self.max_log_ratio,
                expected: "positive",
            });
        }
        Ok(())
    }

    fn p_axis(&self) -> Vec<f64> {
        logspace(self.p_min, 1.0 - self.p_min, self.p_points)
    }

    fn ratio_axis(&self) -> Vec<f64> {
        linspace(0.0, self.max_log_ratio, self.ratio_points + 1)
            .into_iter()
            .skip(1)
            .collect()
    }
}

struct Cells {
    m: usize,
    p_axis: Vec<f64>,
    ratio_axis: Vec<f64>,
}

impl Cells {
    fn new(m: usize, grid: &GridSpec) -> Result<Self> {
        if m < 2 {
            return Err(Error::Domain {
                name: "m",
                value: m as f64,
                expected: "m >= 2",
            });
        }
        grid.validate()?;
        Ok(Self {
            m,
            p_axis: grid.p_axis(),
            ratio_axis: grid.ratio_axis(),
        })
    }

    fn count(&self) -> u64 {
        let per = (self.p_axis.len() * self.ratio_axis.len()) as u64;
        per.pow((self.m - 1) as u32)
    }

    /// Mixed-radix decoding, probability indices most significant, so cell
    /// order is lexicographic in `(p indices, ratio indices)`.
    fn system(&self, mut cell: u64) -> AtomSystem {
        let d = self.m - 1;
        let (np, nr) = (self.p_axis.len() as u64, self.ratio_axis.len() as u64);
        let mut ratio_idx = vec![0usize; d];
        for slot in ratio_idx.iter_mut().rev() {
            *slot = (cell % nr) as usize;
            cell /= nr;
        }
        let mut p_idx = vec![0usize; d];
        for slot in p_idx.iter_mut().rev() {
            *slot = (cell % np) as usize;
            cell /= np;
        }
        let mut p = Vec::with_capacity(self.m);
        let mut rest = 1.0;
        for &ix in &p_idx {
            let share = rest * self.p_axis[ix];
            p.push(share);
            rest -= share;
        }
        p.push(rest);
        let mut log_g = vec![0.0; self.m];
        for j in (0..d).rev() {
            log_g[j] = log_g[j + 1] + self.ratio_axis[ratio_idx[j]];
        }
        let g = log_g.into_iter().map(f64::exp).collect();
        AtomSystem::new_unchecked(p, g)
    }
}

/// A system on which the kernel inequality fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub system: AtomSystem,
    pub report: LemmaReport,
    /// Lexicographic grid index of the cell.
    pub cell: u64,
}

impl Counterexample {
    /// `(lhs − rhs)/rhs`.
    pub fn relative_violation(&self) -> f64 {
        self.report.relative_violation()
    }
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

/// First violating cell in lexicographic grid order, if any.
pub fn search_counterexample(m: usize, l: f64, grid: &GridSpec) -> Result<Option<Counterexample>> {
    check_l(l)?;
    let cells = Cells::new(m, grid)?;
    let found = (0..cells.count()).into_par_iter().find_map_first(|cell| {
        let system = cells.system(cell);
        let report = verify_lemma_brute(&system, l).ok()?;
        (!report.pass).then_some(Counterexample {
            system,
            report,
            cell,
        })
    });
    Ok(found)
}

/// The cell with the largest relative violation (ties to the lowest index),
/// whether or not it actually violates.
pub fn worst_violation(m: usize, l: f64, grid: &GridSpec) -> Result<Counterexample> {
    check_l(l)?;
    let cells = Cells::new(m, grid)?;
    let best = (0..cells.count())
        .into_par_iter()
        .map(|cell| {
            let system = cells.system(cell);
            let report = verify_lemma_brute(&system, l).expect("L validated");
            Counterexample {
                system,
                report,
                cell,
            }
        })
        .reduce_with(|a, b| {
            let (va, vb) = (a.relative_violation(), b.relative_violation());
            if vb > va || (vb == va && b.cell < a.cell) {
                b
            } else {
                a
            }
        });
    Ok(best.expect("grid has at least one cell"))
}

/// Bracket `[lower, upper]` of width at most 1e-3 around the smallest
/// constant for which the grid shows no violation, bisecting from
/// `[1.0, 1.2]`.
pub fn critical_l(m: usize, grid: &GridSpec) -> Result<(f64, f64)> {
    critical_l_with(m, grid, 1.0, 1.2, 1e-3)
}

/// [`critical_l`] with an explicit starting bracket and target width.
/// `lower` must show a violation and `upper` must not.
pub fn critical_l_with(
    m: usize,
    grid: &GridSpec,
    lower: f64,
    upper: f64,
    width: f64,
) -> Result<(f64, f64)> {
    if !(lower < upper && width > 0.0) {
        return Err(Error::Bracket(format!(
            "need lower < upper and width > 0, got [{lower}, {upper}] / {width}"
        )));
    }
    let feasible = |l: f64| -> Result<bool> { Ok(search_counterexample(m, l, grid)?.is_none()) };
    if feasible(lower)? {
        return Err(Error::Bracket(format!("no violation at lower end L = {lower}")));
    }
    if !feasible(upper)? {
        return Err(Error::Bracket(format!("violation at upper end L = {upper}")));
    }
    let (mut lo, mut hi) = (lower, upper);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}
