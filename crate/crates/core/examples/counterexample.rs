//! Grid search for two-atom systems violating the kernel inequality at a
//! constant below 1.12, on successively refined grids.
//!
//! `cargo run --example counterexample -- 1.07`

use talagrand_kit::kernel::{search_counterexample, worst_violation, GridSpec};

fn main() -> talagrand_kit::Result<()> {
    let l: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1.07);
    let mut grid = GridSpec::default();
    for _ in 0..3 {
        let first = search_counterexample(2, l, &grid)?;
        let worst = worst_violation(2, l, &grid)?;
        println!(
            "{}x{} grid: {}; worst relative violation {:.4e} at p1 = {:.4e}, log(g1/g2) = {:.4}",
            grid.p_points,
            grid.ratio_points,
            if first.is_some() { "violation found" } else { "no violation" },
            worst.relative_violation(),
            worst.system.p()[0],
            worst.system.log_ratio(0, 1),
        );
        grid = grid.refined();
    }
    Ok(())
}
