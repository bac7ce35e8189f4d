use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// Default cap on `|Ω|^n` for anything that enumerates the whole space.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

/// A point of Ω^n as atom indices, one per coordinate.
pub type Point = Vec<usize>;

/// `Ω = {0, …, |Ω|−1}` with base measure μ, raised to the power `n`.
///
/// Points are numbered lexicographically with coordinate 0 most
/// significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteProductSpace {
    mu: Vec<f64>,
    n: usize,
}

impl FiniteProductSpace {
    pub fn new(mu: Vec<f64>, n: usize) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::InvalidSpace("no atoms".into()));
        }
        if n == 0 {
            return Err(Error::InvalidSpace("n must be positive".into()));
        }
        if let Some((w, &m)) = mu.iter().enumerate().find(|(_, &m)| !(m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidSpace(format!("mu[{w}] = {m} is not positive")));
        }
        let total: f64 = mu.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpace(format!("mu sums to {total}, expected 1")));
        }
        Ok(Self { mu, n })
    }

    pub fn uniform(atom_count: usize, n: usize) -> Result<Self> {
        Self::new(vec![1.0 / atom_count as f64; atom_count], n)
    }

    pub fn atom_count(&self) -> usize {
        self.mu.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// `|Ω|^n`, saturating.
    pub fn point_count(&self) -> u128 {
        (self.mu.len() as u128).saturating_pow(self.n as u32)
    }

    /// Errors unless `|Ω|^n ≤ ENUMERATION_LIMIT` or the guard is overridden.
    pub fn check_enumeration(&self, override_guard: bool) -> Result<usize> {
        let count = self.point_count();
        if !override_guard && count > ENUMERATION_LIMIT {
            return Err(Error::EnumerationGuard {
                count,
                limit: ENUMERATION_LIMIT,
            });
        }
        usize::try_from(count).map_err(|_| Error::EnumerationGuard {
            count,
            limit: usize::MAX as u128,
        })
    }

    pub fn point(&self, mut index: usize) -> Point {
        let k = self.atom_count();
        let mut x = vec![0; self.n];
        for slot in x.iter_mut().rev() {
            *slot = index % k;
            index /= k;
        }
        x
    }

    pub fn index(&self, x: &[usize]) -> Result<usize> {
        self.check_point(x)?;
        Ok(x.iter().fold(0, |acc, &w| acc * self.atom_count() + w))
    }

    pub fn check_point(&self, x: &[usize]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                what: "point",
                expected: self.n,
                got: x.len(),
            });
        }
        if let Some(&w) = x.iter().find(|&&w| w >= self.atom_count()) {
            return Err(Error::InvalidSpace(format!("atom index {w} out of range")));
        }
        Ok(())
    }

    /// Product measure `P(x) = Π_i μ(x_i)`.
    pub fn prob(&self, x: &[usize]) -> f64 {
        x.iter().map(|&w| self.mu[w]).product()
    }

    /// `P(A)`.
    pub fn subset_prob(&self, a: &Subset) -> f64 {
        let probs: Vec<f64> = a.indices().iter().map(|&y| self.prob(&self.point(y))).collect();
        pairwise_sum(&probs)
    }
}

/// A nonempty set of points, stored as sorted point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subset {
    indices: Vec<usize>,
}

impl Subset {
    pub fn new(space: &FiniteProductSpace, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::InvalidSpace("subset must be nonempty".into()));
        }
        let count = space.point_count();
        if let Some(&bad) = indices.iter().find(|&&y| y as u128 >= count) {
            return Err(Error::InvalidSpace(format!("point index {bad} out of range")));
        }
        Ok(Self { indices })
    }

    pub fn from_points(space: &FiniteProductSpace, points: &[Point]) -> Result<Self> {
        let indices = points
            .iter()
            .map(|x| space.index(x))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, indices)
    }

    /// Members are the set bits of `mask`.
    pub fn from_mask(space: &FiniteProductSpace, mask: u64) -> Result<Self> {
        Self::new(space, (0..64).filter(|b| mask >> b & 1 == 1).collect())
    }

    pub fn full(space: &FiniteProductSpace) -> Result<Self> {
        let count = space.check_enumeration(false)?;
        Self::new(space, (0..count).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Comma-separated point indices, e.g. `0,3,5`.
    pub fn to_text(&self) -> String {
        self.indices
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse(space: &FiniteProductSpace, text: &str) -> Result<Self> {
        let indices = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidSpace(format!("bad point index `{s}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, indices)
    }
}

/// A probability measure ν supported on a subset: `weights[k]` is the mass
/// of point `support[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureOnSubset {
    support: Vec<usize>,
    weights: Vec<f64>,
}

impl MeasureOnSubset {
    pub fn new(a: &Subset, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != a.len() {
            return Err(Error::LengthMismatch {
                what: "measure weights",
                expected: a.len(),
                got: weights.len(),
            });
        }
        if let Some(&w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidSpace(format!("weight {w} is negative")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpace(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self {
            support: a.indices().to_vec(),
            weights,
        })
    }

    pub fn uniform(a: &Subset) -> Self {
        let w = 1.0 / a.len() as f64;
        Self {
            support: a.indices().to_vec(),
            weights: vec![w; a.len()],
        }
    }

    /// Unit mass at `index`, supported on the singleton.
    pub fn point_mass(index: usize) -> Self {
        Self {
            support: vec![index],
            weights: vec![1.0],
        }
    }

    pub(crate) fn from_parts(support: Vec<usize>, weights: Vec<f64>) -> Self {
        Self { support, weights }
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass_of(&self, index: usize) -> f64 {
        self.support
            .iter()
            .position(|&y| y == index)
            .map_or(0.0, |k| self.weights[k])
    }

    /// `index:weight` pairs, comma-separated, e.g. `0:0.5,3:0.5`.
    pub fn to_text(&self) -> String {
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(y, w)| format!("{y}:{w}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_spaces() {
        assert!(FiniteProductSpace::new(vec![], 1).is_err());
        assert!(FiniteProductSpace::new(vec![0.5, 0.5], 0).is_err());
        assert!(FiniteProductSpace::new(vec![0.6, 0.5], 1).is_err());
        assert!(FiniteProductSpace::new(vec![1.0, 0.0], 1).is_err());
    }

    #[test]
    fn point_indexing_round_trips() {
        let s = FiniteProductSpace::new(vec![0.7, 0.2, 0.1], 3).unwrap();
        assert_eq!(s.point_count(), 27);
        for idx in 0..27 {
            assert_eq!(s.index(&s.point(idx)).unwrap(), idx);
        }
        assert_eq!(s.point(5), vec![0, 1, 2]);
        assert!((s.prob(&[0, 1, 2]) - 0.014).abs() < 1e-15);
        assert!(s.index(&[0, 3, 0]).is_err());
        assert!(s.index(&[0, 0]).is_err());
    }

    #[test]
    fn enumeration_guard() {
        let s = FiniteProductSpace::uniform(2, 21).unwrap();
        assert!(matches!(
            s.check_enumeration(false),
            Err(Error::EnumerationGuard { .. })
        ));
        assert_eq!(s.check_enumeration(true).unwrap(), 1 << 21);
    }

    #[test]
    fn subsets_and_measures() {
        let s = FiniteProductSpace::uniform(2, 2).unwrap();
        let a = Subset::new(&s, vec![3, 0, 3]).unwrap();
        assert_eq!(a.indices(), &[0, 3]);
        assert_eq!(a.to_text(), "0,3");
        assert_eq!(Subset::parse(&s, "3, 0").unwrap(), a);
        assert!(Subset::new(&s, vec![]).is_err());
        assert!(Subset::new(&s, vec![4]).is_err());
        assert_eq!(Subset::from_mask(&s, 0b1001).unwrap(), a);
        assert!((s.subset_prob(&a) - 0.5).abs() < 1e-15);
        let nu = MeasureOnSubset::uniform(&a);
        assert_eq!(nu.to_text(), "0:0.5,3:0.5");
        assert!(MeasureOnSubset::new(&a, vec![0.5, 0.6]).is_err());
        assert!(MeasureOnSubset::new(&a, vec![1.5, -0.5]).is_err());
        assert_eq!(nu.mass_of(3), 0.5);
        assert_eq!(nu.mass_of(1), 0.0);
    }
}
