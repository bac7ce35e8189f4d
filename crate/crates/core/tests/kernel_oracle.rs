use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use talagrand_kit::kernel::{
    lemma_lhs, optimal_row, row_objective, solve_kernel, verify_lemma, AtomSystem,
};
use talagrand_kit::numeric::golden_min;
use talagrand_kit::run::random_systems;
use talagrand_kit::DEFAULT_L as L;

/// Row minimum over budget shares `s_j = k_j p_j`: a 1e-3 grid on the
/// first share, polished by golden-section search within one cell, with
/// an inner golden-section search on the second share.
fn grid_oracle(s: &AtomSystem, l: f64, i: usize) -> f64 {
    let p = s.p();
    let obj = |k: &[f64]| row_objective(s, l, i, k).unwrap();
    let outer = |s0: f64| -> f64 {
        match i {
            1 => obj(&[s0 / p[0]]),
            2 => {
                let inner = |s1: f64| obj(&[s0 / p[0], s1 / p[1]]);
                golden_min(inner, 0.0, (1.0 - s0).max(0.0), 1e-12).1
            }
            _ => unreachable!(),
        }
    };
    let (best_t, _) = (0..=1000)
        .map(|t| (t, outer(t as f64 * 1e-3)))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let centre = best_t as f64 * 1e-3;
    golden_min(outer, (centre - 1e-3).max(0.0), (centre + 1e-3).min(1.0), 1e-13).1
}

#[test]
fn optimal_rows_match_grid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let m = rng.random_range(2..=3);
        let s = AtomSystem::random(m, &mut rng);
        for i in 1..m {
            let row = optimal_row(&s, L, i).unwrap();
            let ours = row_objective(&s, L, i, &row.k).unwrap();
            let oracle = grid_oracle(&s, L, i);
            assert!(ours <= oracle + 1e-9, "{s:?} row {i}: {ours} > {oracle}");
            assert!(oracle - ours <= 1e-5, "{s:?} row {i}: oracle {oracle}, ours {ours}");
        }
    }
}

#[test]
fn feasible_perturbations_do_not_improve_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for s in random_systems(6, 300, 4) {
        let p = s.p().to_vec();
        for i in 1..s.len() {
            let row = optimal_row(&s, L, i).unwrap();
            let base = row_objective(&s, L, i, &row.k).unwrap();
            for _ in 0..20 {
                let k: Vec<f64> = row
                    .k
                    .iter()
                    .map(|v| (v + rng.random_range(-1e-4..1e-4)).max(0.0))
                    .collect();
                let used: f64 = k.iter().zip(&p).map(|(a, b)| a * b).sum();
                if used > 1.0 {
                    continue;
                }
                let v = row_objective(&s, L, i, &k).unwrap();
                assert!(v >= base - 1e-12, "{s:?} row {i}: {v} < {base}");
            }
        }
    }
}

#[test]
fn kernels_respect_budget_and_sign() {
    for s in random_systems(8, 2000, 5) {
        let k = solve_kernel(&s, L).unwrap();
        for i in 0..s.len() {
            assert!(k.entries[i].iter().all(|v| *v >= 0.0 && v.is_finite()));
            assert!(k.row_budget(&s, i) <= 1.0 + 1e-9);
            if k.budget_saturated[i] {
                assert!((k.row_budget(&s, i) - 1.0).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn lhs_is_nonincreasing_in_l() {
    for s in random_systems(8, 1000, 6) {
        let mut prev = f64::INFINITY;
        for l in [1.0, 1.12, 1.3, 1.6, 2.0, 4.0] {
            let v = lemma_lhs(&s, l).unwrap();
            assert!(v <= prev * (1.0 + 1e-12));
            prev = v;
        }
    }
}

#[test]
fn pass_flag_agrees_with_margin() {
    for s in random_systems(8, 1000, 7) {
        for l in [0.8, 1.0, 1.12] {
            let r = verify_lemma(&s, l).unwrap();
            assert_eq!(r.pass, r.lhs <= r.rhs * (1.0 + 1e-9));
            assert_eq!(r.margin, r.rhs - r.lhs);
        }
    }
}

proptest! {
    #[test]
    fn scaling_g_leaves_kernel_unchanged(seed in 0u64..10_000, c in 1e-3f64..1e3) {
        let s = random_systems(8, 1, seed).pop().unwrap();
        let a = solve_kernel(&s, L).unwrap();
        let b = solve_kernel(&s.scaled(c), L).unwrap();
        for (x, y) in a.entries.iter().flatten().zip(b.entries.iter().flatten()) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
        let ra = verify_lemma(&s, L).unwrap();
        let rb = verify_lemma(&s.scaled(c), L).unwrap();
        prop_assert!((ra.lhs / ra.rhs - rb.lhs / rb.rhs).abs() <= 1e-12);
    }

    #[test]
    fn equal_g_gives_zero_margin(p in proptest::collection::vec(0.01f64..1.0, 1..8), g in 0.1f64..10.0) {
        let total: f64 = p.iter().sum();
        let p: Vec<f64> = p.iter().map(|v| v / total).collect();
        let s = AtomSystem::new(p.clone(), vec![g; p.len()]).unwrap();
        let r = verify_lemma(&s, L).unwrap();
        prop_assert!(r.margin.abs() <= 1e-12 * r.rhs);
    }
}
