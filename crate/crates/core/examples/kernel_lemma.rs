//! Optimal kernels for the weighted exponential inequality.
//!
//! Solves one hand-picked system row by row, then checks a batch of random
//! systems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use talagrand_kit::kernel::{solve_kernel, verify_lemma, AtomSystem};
use talagrand_kit::DEFAULT_L;

fn main() -> talagrand_kit::Result<()> {
    let system = AtomSystem::new(vec![0.2, 0.3, 0.1, 0.4], vec![6.0, 2.5, 1.8, 1.0])?;
    let kernel = solve_kernel(&system, DEFAULT_L)?;
    for (i, row) in kernel.entries.iter().enumerate() {
        println!(
            "row {}: k = {:?}, multiplier {:.6}, budget {:.6}{}",
            i + 1,
            row.iter().map(|k| format!("{k:.5}")).collect::<Vec<_>>(),
            kernel.multipliers[i],
            kernel.row_budget(&system, i),
            if kernel.budget_saturated[i] { " (saturated)" } else { "" }
        );
    }
    let report = verify_lemma(&system, DEFAULT_L)?;
    println!("lhs {:.9} <= rhs {:.9}: {}", report.lhs, report.rhs, report.pass);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let m = rng.random_range(2..=8);
        let s = AtomSystem::random(m, &mut rng);
        let r = verify_lemma(&s, DEFAULT_L)?;
        assert!(r.pass, "violation on {s:?}");
        worst = worst.min(r.margin / r.rhs);
    }
    println!("10000 random systems pass; smallest relative margin {worst:.3e}");
    Ok(())
}
