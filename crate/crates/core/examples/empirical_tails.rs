//! Monte Carlo frequencies of both tails of the empirical-process supremum
//! against 2e^{-u}.

use talagrand_kit::empirical::{check_tails, FunctionClass, TailParams};
use talagrand_kit::product_space::FiniteProductSpace;

fn main() -> talagrand_kit::Result<()> {
    let space = FiniteProductSpace::new(vec![0.1, 0.9], 50)?;
    let class = FunctionClass::singleton_indicators(2)?;
    let t = check_tails(&space, &class, &TailParams::default())?;
    println!(
        "median {} ({}), sigma^2 = {:.4}",
        t.median_estimate,
        if t.median_exact { "exact" } else { "sampled" },
        t.sigma2
    );
    println!("{:>5} {:>9} {:>10} {:>10} {:>10} {:>10}", "u", "dev", "upper", "lower", "CP upper", "bound");
    for k in 0..t.u_grid.len() {
        println!(
            "{:>5} {:>9.4} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            t.u_grid[k],
            t.deviation[k],
            t.empirical_upper[k],
            t.empirical_lower[k],
            t.upper_limit_upper[k].max(t.upper_limit_lower[k]),
            t.bound[k]
        );
    }
    println!("all within bound: {}", t.all_pass);
    Ok(())
}
