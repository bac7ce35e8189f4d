//! Small one-dimensional numerical helpers shared across modules.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// Returns the final bracket `(lo, hi)` with `f(lo)` and `f(hi)` of opposite
/// sign (or zero), once `hi - lo <= tol` or after `max_iter` halvings.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> Option<(f64, f64)> {
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some((lo, lo));
    }
    if f_hi == 0.0 {
        return Some((hi, hi));
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    let lo_positive = f_lo > 0.0;
    for _ in 0..max_iter {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some((mid, mid));
        }
        if (f_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo, hi))
}

/// Golden-section minimisation of a unimodal `f` on `[a, b]`.
///
/// Endpoints are always evaluated as well, so minima sitting on the boundary
/// are found exactly. Returns `(argmin, min)`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let f_a = f(lo);
    let f_b = f(hi);
    let mut best = if f_a <= f_b { (lo, f_a) } else { (hi, f_b) };
    if hi - lo <= tol {
        return best;
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // Enough halvings for any interval we meet (lengths up to ~1e8).
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    for cand in [(x1, f1), (x2, f2)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}

/// Pairwise (cascade) summation; error grows as O(log n) instead of O(n).
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `count` points evenly spaced on `[lo, hi]` (both ends included).
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            // The fraction i/(count-1) is formed first so that a grid with
            // 2*count-1 points contains this one exactly.
            let last = (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i + 1 == count {
                        hi
                    } else {
                        lo + (hi - lo) * (i as f64 / last)
                    }
                })
                .collect()
        }
    }
}

/// `count` points evenly spaced in log scale on `[lo, hi]`, `lo > 0`.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    linspace(a, b, count)
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                x.exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let (lo, hi) = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12, 200).unwrap();
        assert!((0.5 * (lo + hi) - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn bisect_rejects_same_sign() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-9, 100).is_none());
    }

    #[test]
    fn golden_interior_and_boundary() {
        let (x, fx) = golden_min(|x| (x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8 && fx < 1e-15);
        let (x, _) = golden_min(|x| -x, 0.0, 5.0, 1e-10);
        assert_eq!(x, 5.0);
    }

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
    }

    #[test]
    fn spaced_grids_hit_endpoints() {
        let g = logspace(1e-4, 0.9999, 7);
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[6], 0.9999);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(linspace(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
