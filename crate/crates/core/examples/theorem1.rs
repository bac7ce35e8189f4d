//! The distance functional m(A, x) on a small product space, and the
//! exhaustive check of ∫ exp(m(A,x)/L) dP ≤ 1/P(A) over every subset.

use talagrand_kit::product_space::{
    minimize_m, verify_theorem1_all_subsets, verify_theorem1_with, FiniteProductSpace, Subset,
    Theorem1Options,
};
use talagrand_kit::DEFAULT_L;

fn main() -> talagrand_kit::Result<()> {
    let space = FiniteProductSpace::new(vec![0.7, 0.2, 0.1], 2)?;
    let a = Subset::parse(&space, "0,4,8")?;
    for xi in [1usize, 5, 7] {
        let x = space.point(xi);
        let m = minimize_m(&space, &x, &a, 1e-9)?;
        println!(
            "x = {x:?}: m(A, x) = {:.9} (gap {:.1e}, {} iterations), nu = {}",
            m.value,
            m.gap,
            m.iterations,
            m.nu.to_text()
        );
    }
    let opts = Theorem1Options::default();
    let one = verify_theorem1_with(&space, &a, DEFAULT_L, &opts)?;
    println!(
        "A = {{{}}}: lhs {:.9} <= 1/P(A) = {:.9}: {}",
        one.subset, one.lhs_upper, one.rhs, one.pass
    );

    let sweep = verify_theorem1_all_subsets(&space, DEFAULT_L, &opts)?;
    println!(
        "all {} subsets: {} screened by point masses, {} solved, worst ratio {:.12} at {{{}}}, pass {}",
        sweep.subsets,
        sweep.screened,
        sweep.solved.len(),
        sweep.worst_ratio,
        sweep.worst_subset,
        sweep.pass
    );
    Ok(())
}
