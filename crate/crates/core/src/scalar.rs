//! Scalar building blocks: the penalty ψ, its derivative, the function
//! φ(p, t) whose bound on `[0,1] × [0,1/L]` pins the constant 1.12, and the
//! critical constants derived from them.

use rayon::prelude::*;

use crate::error::{finite, Error, Result};
use crate::numeric::{bisect, golden_min, linspace};
use crate::DEFAULT_L;

/// Relative slack allowed when checking an inequality `lhs <= rhs`.
pub const INEQUALITY_SLACK: f64 = 1e-9;

/// Absolute tolerance for quantities pinned at 1.
pub const UNIT_TOL: f64 = 1e-12;

/// Minimum per-axis resolution accepted by [`phi_max`].
pub const MIN_PHI_GRID: usize = 1000;

/// ψ evaluated at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiValue {
    pub x: f64,
    pub value: f64,
}

impl PsiValue {
    pub fn at(x: f64) -> Result<Self> {
        Ok(Self { x, value: psi(x)? })
    }
}

/// ψ(x) = x²/4 for x ≤ 2 and x − 1 for x ≥ 2.
pub fn psi(x: f64) -> Result<f64> {
    finite("x", x).map(psi_raw)
}

/// ψ′(x) = x/2 for x ≤ 2 and 1 beyond; never exceeds 1.
pub fn psi_prime(x: f64) -> Result<f64> {
    finite("x", x).map(psi_prime_raw)
}

#[inline]
pub(crate) fn psi_raw(x: f64) -> f64 {
    if x <= 2.0 {
        0.25 * x * x
    } else {
        x - 1.0
    }
}

#[inline]
pub(crate) fn psi_prime_raw(x: f64) -> f64 {
    if x <= 2.0 {
        0.5 * x
    } else {
        1.0
    }
}

/// A point of the φ landscape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiPoint {
    pub p: f64,
    pub t: f64,
    pub l: f64,
    pub value: f64,
}

/// φ(p, t) = (p·eᵗ + 1 − p)·exp{−(L/2)·p·(t² + 2t)}.
pub fn phi(p: f64, t: f64, l: f64) -> Result<f64> {
    finite("p", p)?;
    finite("t", t)?;
    finite("L", l)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain {
            name: "p",
            value: p,
            expected: "0 <= p <= 1",
        });
    }
    if t < 0.0 {
        return Err(Error::Domain {
            name: "t",
            value: t,
            expected: "t >= 0",
        });
    }
    if l < 1.0 {
        return Err(Error::Domain {
            name: "L",
            value: l,
            expected: "L >= 1",
        });
    }
    Ok(phi_raw(p, t, l))
}

#[inline]
fn phi_raw(p: f64, t: f64, l: f64) -> f64 {
    // p·expm1(t) + 1 keeps φ(p, 0) and φ(0, t) exactly 1.
    (p * t.exp_m1() + 1.0) * (-0.5 * l * p * (t * t + 2.0 * t)).exp()
}

/// Supremum of φ over `[0,1] × [0,1/L]`.
///
/// Evaluates a `grid × grid` lattice, then polishes around the best cell
/// with alternating golden-section line searches. The refinement never
/// assumes where the maximiser lies.
pub fn phi_max(l: f64, grid: usize) -> Result<PhiPoint> {
    finite("L", l)?;
    if l < 1.0 {
        return Err(Error::Domain {
            name: "L",
            value: l,
            expected: "L >= 1",
        });
    }
    if grid < MIN_PHI_GRID {
        return Err(Error::Domain {
            name: "grid",
            value: grid as f64,
            expected: "at least 1000 points per axis",
        });
    }
    let t_max = 1.0 / l;
    let ps = linspace(0.0, 1.0, grid);
    let ts = linspace(0.0, t_max, grid);

    // Row maxima in parallel, reduced in index order so ties resolve to the
    // smallest (p, t) index regardless of scheduling.
    let rows: Vec<(usize, f64)> = ps
        .par_iter()
        .map(|&p| {
            let mut best = (0usize, f64::NEG_INFINITY);
            for (j, &t) in ts.iter().enumerate() {
                let v = phi_raw(p, t, l);
                if v > best.1 {
                    best = (j, v);
                }
            }
            best
        })
        .collect();
    let (bi, (bj, mut best_value)) = rows
        .iter()
        .copied()
        .enumerate()
        .fold((0, (0, f64::NEG_INFINITY)), |acc, (i, r)| {
            if r.1 > acc.1 .1 {
                (i, r)
            } else {
                acc
            }
        });
    let mut p = ps[bi];
    let mut t = ts[bj];

    let dp = 1.0 / (grid - 1) as f64;
    let dt = t_max / (grid - 1) as f64;
    let (p_lo, p_hi) = ((p - dp).max(0.0), (p + dp).min(1.0));
    let (t_lo, t_hi) = ((t - dt).max(0.0), (t + dt).min(t_max));
    for _ in 0..30 {
        let (np, nv) = golden_min(|q| -phi_raw(q, t, l), p_lo, p_hi, 1e-14);
        if -nv > best_value {
            p = np;
            best_value = -nv;
        }
        let (nt, nv) = golden_min(|s| -phi_raw(p, s, l), t_lo, t_hi, 1e-14);
        if -nv > best_value {
            t = nt;
            best_value = -nv;
        }
    }
    Ok(PhiPoint {
        p,
        t,
        l,
        value: best_value,
    })
}

/// e^{1/L} − 1 − (1/2)(1/L + 2): the slope of φ(·, 1/L) at p = 0.
///
/// The kernel argument closes exactly when this is negative.
pub fn boundary_condition(l: f64) -> f64 {
    let s = 1.0 / l;
    s.exp_m1() - 0.5 * (s + 2.0)
}

/// Root of [`boundary_condition`] on `[1.0, 1.2]` to absolute tolerance 1e-9.
///
/// Fails if the condition is not strictly negative at L = 1.12.
pub fn critical_l_boundary() -> Result<f64> {
    let at_default = boundary_condition(DEFAULT_L);
    if at_default >= 0.0 {
        return Err(Error::Bracket(format!(
            "boundary condition at L = {DEFAULT_L} is {at_default}, expected negative"
        )));
    }
    let (lo, hi) = bisect(boundary_condition, 1.0, 1.2, 1e-10, 200)
        .ok_or_else(|| Error::Bracket("no sign change on [1.0, 1.2]".into()))?;
    Ok(0.5 * (lo + hi))
}

/// Whether u·v ≤ u² + ψ(v) for 0 ≤ u ≤ 1, v ≥ 0.
pub fn uv_inequality_check(u: f64, v: f64) -> Result<bool> {
    finite("u", u)?;
    finite("v", v)?;
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain {
            name: "u",
            value: u,
            expected: "0 <= u <= 1",
        });
    }
    if v < 0.0 {
        return Err(Error::Domain {
            name: "v",
            value: v,
            expected: "v >= 0",
        });
    }
    let rhs = u * u + psi_raw(v);
    Ok(u * v <= rhs * (1.0 + INEQUALITY_SLACK))
}
