//! Coordinate densities `d_i` and the functional
//! `m(ν, x) = Σ_i Σ_ω ψ(d_i(ω))·μ(ω)`.
//!
//! `d_i` is the μ-density of the law of `y_i` under ν restricted to
//! `{y : y_i ≠ x_i}`, so `d_i(x_i) = 0` and `Σ_ω d_i(ω)μ(ω) = ν(y_i ≠ x_i)`.

use serde::{Deserialize, Serialize};

use super::space::{FiniteProductSpace, MeasureOnSubset};
use crate::error::{Error, Result};
use crate::scalar::psi_raw;

/// `d[i][ω]` for coordinate `i` and atom `ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateDensities {
    pub d: Vec<Vec<f64>>,
}

fn check_support(space: &FiniteProductSpace, nu: &MeasureOnSubset) -> Result<()> {
    let count = space.point_count();
    match nu.support().iter().find(|&&y| y as u128 >= count) {
        Some(&bad) => Err(Error::InvalidSpace(format!(
            "measure charges point {bad} outside the space"
        ))),
        None => Ok(()),
    }
}

/// ν-marginal masses off the diagonal: `q[i][ω] = ν(y_i = ω)` for
/// `ω ≠ x_i`, zero at `x_i`.
pub(crate) fn off_diagonal_marginals(
    space: &FiniteProductSpace,
    x: &[usize],
    nu: &MeasureOnSubset,
) -> Vec<Vec<f64>> {
    let mut q = vec![vec![0.0; space.atom_count()]; space.n()];
    for (&y, &w) in nu.support().iter().zip(nu.weights()) {
        for (i, &yi) in space.point(y).iter().enumerate() {
            if yi != x[i] {
                q[i][yi] += w;
            }
        }
    }
    q
}

pub fn densities(
    space: &FiniteProductSpace,
    x: &[usize],
    nu: &MeasureOnSubset,
) -> Result<CoordinateDensities> {
    space.check_point(x)?;
    check_support(space, nu)?;
    let mu = space.mu();
    let d = off_diagonal_marginals(space, x, nu)
        .into_iter()
        .map(|row| row.iter().zip(mu).map(|(q, m)| q / m).collect())
        .collect();
    Ok(CoordinateDensities { d })
}

pub fn m_nu(space: &FiniteProductSpace, x: &[usize], nu: &MeasureOnSubset) -> Result<f64> {
    let dens = densities(space, x, nu)?;
    Ok(densities_cost(space, &dens))
}

pub(crate) fn densities_cost(space: &FiniteProductSpace, dens: &CoordinateDensities) -> f64 {
    let mu = space.mu();
    dens.d
        .iter()
        .map(|row| row.iter().zip(mu).map(|(d, m)| psi_raw(*d) * m).sum::<f64>())
        .sum()
}

/// `m(δ_y, x) = Σ_{i: y_i ≠ x_i} μ(y_i)·ψ(1/μ(y_i))`.
pub fn point_mass_distance(space: &FiniteProductSpace, x: &[usize], y: &[usize]) -> f64 {
    let mu = space.mu();
    x.iter()
        .zip(y)
        .filter(|(a, b)| a != b)
        .map(|(_, &b)| mu[b] * psi_raw(1.0 / mu[b]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product_space::space::Subset;

    #[test]
    fn point_mass_at_x_has_zero_densities() {
        let s = FiniteProductSpace::new(vec![0.7, 0.2, 0.1], 2).unwrap();
        let x = vec![1, 2];
        let nu = MeasureOnSubset::point_mass(s.index(&x).unwrap());
        let d = densities(&s, &x, &nu).unwrap();
        assert!(d.d.iter().flatten().all(|&v| v == 0.0));
        assert_eq!(m_nu(&s, &x, &nu).unwrap(), 0.0);
    }

    #[test]
    fn single_coordinate_example() {
        let s = FiniteProductSpace::uniform(2, 1).unwrap();
        let nu = MeasureOnSubset::point_mass(0);
        let d = densities(&s, &[1], &nu).unwrap();
        assert_eq!(d.d, vec![vec![2.0, 0.0]]);
        assert_eq!(m_nu(&s, &[1], &nu).unwrap(), 0.5);
    }

    #[test]
    fn two_coordinates_add() {
        let s = FiniteProductSpace::uniform(2, 2).unwrap();
        let nu = MeasureOnSubset::point_mass(s.index(&[0, 0]).unwrap());
        assert_eq!(m_nu(&s, &[1, 1], &nu).unwrap(), 1.0);
    }

    #[test]
    fn uniform_measure_on_line() {
        let s = FiniteProductSpace::new(vec![0.5, 0.3, 0.2], 1).unwrap();
        let a = Subset::new(&s, vec![0, 1, 2]).unwrap();
        let nu = MeasureOnSubset::uniform(&a);
        let d = densities(&s, &[1], &nu).unwrap();
        let third = 1.0 / 3.0;
        let expected = [third / 0.5, 0.0, third / 0.2];
        for (got, want) in d.d[0].iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
        let mass: f64 = d.d[0].iter().zip(s.mu()).map(|(d, m)| d * m).sum();
        assert!(mass <= 1.0);
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let s = FiniteProductSpace::uniform(2, 2).unwrap();
        let nu = MeasureOnSubset::point_mass(0);
        assert!(densities(&s, &[0], &nu).is_err());
        assert!(densities(&s, &[0, 0], &MeasureOnSubset::point_mass(9)).is_err());
    }
}
