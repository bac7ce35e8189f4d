//! Scan the maximum of φ(p, t) over a range of constants L.
//!
//! `cargo run --example phi_scan -- 1.05 1.1 1.12 1.2`

use talagrand_kit::scalar::{boundary_condition, critical_l_boundary, phi_max};

fn main() -> talagrand_kit::Result<()> {
    let mut ls: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if ls.is_empty() {
        ls = vec![1.0, 1.05, 1.1, 1.12, 1.2, 1.5];
    }
    println!("{:>6} {:>18} {:>12} {:>12} {:>12}", "L", "phi_max", "p*", "t*", "boundary");
    for l in ls {
        let pt = phi_max(l, 2000)?;
        println!(
            "{l:>6.3} {:>18.12} {:>12.4e} {:>12.4e} {:>12.4e}",
            pt.value,
            pt.p,
            pt.t,
            boundary_condition(l)
        );
    }
    println!("boundary condition changes sign at L = {:.10}", critical_l_boundary()?);
    Ok(())
}
