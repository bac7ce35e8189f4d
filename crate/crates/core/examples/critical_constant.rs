//! Bracket the smallest constant for which no grid system violates the
//! kernel inequality, for two and three atoms.

use talagrand_kit::kernel::{critical_l, GridSpec};
use talagrand_kit::scalar::critical_l_boundary;

fn main() -> talagrand_kit::Result<()> {
    let (lo, hi) = critical_l(2, &GridSpec::default())?;
    println!("m = 2: [{lo:.6}, {hi:.6}]");
    let (lo3, hi3) = critical_l(3, &GridSpec::square(24))?;
    println!("m = 3 (24x24 per gap): [{lo3:.6}, {hi3:.6}]");
    println!("scalar boundary root: {:.10}", critical_l_boundary()?);
    Ok(())
}
