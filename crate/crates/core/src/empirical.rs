//! The empirical-process supremum
//! `Z(x) = max_{f∈F} Σ_i (μf − f(x_i))` over a finite class of `[0,1]`-valued
//! functions, the uniform second moment `σ² = n·max_f μf²`, and Monte Carlo
//! checks of the two-sided tail bound
//! `P(Z ≥ M + 2max(Lu, σ√(Lu))) ≤ 2e^{−u}` (and its mirror below `M`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{Error, Result};
use crate::product_space::{FiniteProductSpace, ENUMERATION_LIMIT};
use crate::DEFAULT_L;

/// Trials per independently seeded sampling stream.
pub const STREAM_LEN: usize = 4096;
pub const MIN_MEDIAN_TRIALS: usize = 1_000;
pub const MIN_TAIL_TRIALS: usize = 10_000;

/// A finite class `F` of functions `Ω → [0,1]`, each given by its values on
/// the atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionClass {
    functions: Vec<Vec<f64>>,
}

impl FunctionClass {
    pub fn new(functions: Vec<Vec<f64>>) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::InvalidSpace("function class is empty".into()));
        }
        let width = functions[0].len();
        for f in &functions {
            if f.len() != width {
                return Err(Error::LengthMismatch {
                    what: "function values",
                    expected: width,
                    got: f.len(),
                });
            }
            if let Some(&v) = f.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::Domain {
                    name: "f",
                    value: v,
                    expected: "values in [0, 1]",
                });
            }
        }
        Ok(Self { functions })
    }

    pub fn constant(atom_count: usize, c: f64) -> Result<Self> {
        Self::new(vec![vec![c; atom_count]])
    }

    /// `{1_{atom}}`.
    pub fn indicator(atom_count: usize, atom: usize) -> Result<Self> {
        if atom >= atom_count {
            return Err(Error::InvalidSpace(format!("atom {atom} out of range")));
        }
        let mut f = vec![0.0; atom_count];
        f[atom] = 1.0;
        Self::new(vec![f])
    }

    /// Indicators of every single atom.
    pub fn singleton_indicators(atom_count: usize) -> Result<Self> {
        Self::new(
            (0..atom_count)
                .map(|w| (0..atom_count).map(|v| if v == w { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    pub fn functions(&self) -> &[Vec<f64>] {
        &self.functions
    }

    pub fn with(mut self, f: Vec<f64>) -> Result<Self> {
        self.functions.push(f);
        Self::new(self.functions)
    }

    fn check_space(&self, space: &FiniteProductSpace) -> Result<()> {
        let width = self.functions[0].len();
        if width != space.atom_count() {
            return Err(Error::LengthMismatch {
                what: "function values per atom",
                expected: space.atom_count(),
                got: width,
            });
        }
        Ok(())
    }

    fn means(&self, space: &FiniteProductSpace) -> Vec<f64> {
        self.functions
            .iter()
            .map(|f| f.iter().zip(space.mu()).map(|(v, m)| v * m).sum())
            .collect()
    }

    /// `Z` from atom counts: `Σ_i f(x_i) = Σ_ω count_ω·f(ω)`.
    fn z_from_counts(&self, means: &[f64], counts: &[u32], n: usize) -> f64 {
        self.functions
            .iter()
            .zip(means)
            .map(|(f, mf)| {
                let hits: f64 = f.iter().zip(counts).map(|(v, &c)| v * f64::from(c)).sum();
                n as f64 * mf - hits
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `Z(x) = max_f Σ_i (μf − f(x_i))`.
pub fn z_statistic(space: &FiniteProductSpace, class: &FunctionClass, x: &[usize]) -> Result<f64> {
    class.check_space(space)?;
    space.check_point(x)?;
    let means = class.means(space);
    Ok(class
        .functions
        .iter()
        .zip(&means)
        .map(|(f, mf)| x.iter().map(|&w| mf - f[w]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `σ² = n·max_f Σ_ω f(ω)²μ(ω)`.
pub fn sigma2(space: &FiniteProductSpace, class: &FunctionClass, n: usize) -> Result<f64> {
    class.check_space(space)?;
    let best = class
        .functions
        .iter()
        .map(|f| f.iter().zip(space.mu()).map(|(v, m)| v * v * m).sum::<f64>())
        .fold(0.0, f64::max);
    Ok(n as f64 * best)
}

/// `trials` seeded draws of `Z` under `μ^n`.
///
/// Trials are split into streams of [`STREAM_LEN`]; stream `s` uses ChaCha8
/// keyed by `seed` on stream number `s`, and coordinates are drawn by
/// inverse CDF. Results do not depend on the thread count.
pub fn sample_z(
    space: &FiniteProductSpace,
    class: &FunctionClass,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    class.check_space(space)?;
    let means = class.means(space);
    let mut cdf: Vec<f64> = space
        .mu()
        .iter()
        .scan(0.0, |acc, m| {
            *acc += m;
            Some(*acc)
        })
        .collect();
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    let n = space.n();
    let streams = trials.div_ceil(STREAM_LEN);
    let chunks: Vec<Vec<f64>> = (0..streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let len = STREAM_LEN.min(trials - s * STREAM_LEN);
            let mut counts = vec![0u32; cdf.len()];
            (0..len)
                .map(|_| {
                    counts.iter_mut().for_each(|c| *c = 0);
                    for _ in 0..n {
                        let u: f64 = rng.random();
                        let atom = cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1);
                        counts[atom] += 1;
                    }
                    class.z_from_counts(&means, &counts, n)
                })
                .collect()
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedianEstimate {
    pub value: f64,
    /// True when computed from the exact distribution by enumeration.
    pub exact: bool,
}

/// Smallest `M` with `P(Z ≤ M) ≥ 1/2`: exact by enumeration when
/// `|Ω|^n ≤ 10⁶`, otherwise the lower sample median of seeded draws.
pub fn estimate_median(
    space: &FiniteProductSpace,
    class: &FunctionClass,
    trials: usize,
    seed: u64,
) -> Result<MedianEstimate> {
    if trials < MIN_MEDIAN_TRIALS {
        return Err(Error::Domain {
            name: "trials",
            value: trials as f64,
            expected: "at least 1000",
        });
    }
    if space.point_count() <= ENUMERATION_LIMIT {
        return exact_median(space, class);
    }
    let samples = sample_z(space, class, trials, seed)?;
    Ok(sample_median(samples))
}

fn sample_median(mut samples: Vec<f64>) -> MedianEstimate {
    samples.sort_by(f64::total_cmp);
    let idx = samples.len().div_ceil(2) - 1;
    MedianEstimate {
        value: samples[idx],
        exact: false,
    }
}

/// Exact law of `Z` by enumeration, as `(value, probability)` sorted by value.
pub fn exact_distribution(
    space: &FiniteProductSpace,
    class: &FunctionClass,
) -> Result<Vec<(f64, f64)>> {
    let count = space.check_enumeration(false)?;
    class.check_space(space)?;
    let mut law = (0..count)
        .into_par_iter()
        .map(|idx| {
            let x = space.point(idx);
            Ok((z_statistic(space, class, &x)?, space.prob(&x)))
        })
        .collect::<Result<Vec<_>>>()?;
    law.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(law)
}

fn exact_median(space: &FiniteProductSpace, class: &FunctionClass) -> Result<MedianEstimate> {
    let law = exact_distribution(space, class)?;
    let mut cumulative = 0.0;
    for &(z, p) in &law {
        cumulative += p;
        if cumulative >= 0.5 - 1e-12 {
            return Ok(MedianEstimate {
                value: z,
                exact: true,
            });
        }
    }
    Ok(MedianEstimate {
        value: law.last().map_or(0.0, |l| l.0),
        exact: true,
    })
}

/// One-sided exact (Clopper–Pearson) upper confidence limit for a binomial
/// proportion with `successes` out of `trials`.
pub fn clopper_pearson_upper(successes: u64, trials: u64, confidence: f64) -> f64 {
    if trials == 0 || successes >= trials {
        return 1.0;
    }
    Beta::new((successes + 1) as f64, (trials - successes) as f64)
        .map(|b| b.inverse_cdf(confidence))
        .unwrap_or(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailParams {
    pub l: f64,
    pub u_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub confidence: f64,
}

impl Default for TailParams {
    fn default() -> Self {
        Self {
            l: DEFAULT_L,
            u_grid: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            trials: 100_000,
            seed: 42,
            confidence: 0.95,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub l: f64,
    pub u_grid: Vec<f64>,
    /// `2·max(Lu, σ√(Lu))` per u.
    pub deviation: Vec<f64>,
    pub upper_count: Vec<u64>,
    pub lower_count: Vec<u64>,
    pub empirical_upper: Vec<f64>,
    pub empirical_lower: Vec<f64>,
    pub upper_limit_upper: Vec<f64>,
    pub upper_limit_lower: Vec<f64>,
    /// `2e^{−u}`.
    pub bound: Vec<f64>,
    pub pass: Vec<bool>,
    pub median_estimate: f64,
    pub median_exact: bool,
    pub sigma2: f64,
    pub trials: usize,
    pub seed: u64,
    pub confidence: f64,
    pub all_pass: bool,
}

/// Monte Carlo frequencies of both deviations against `2e^{−u}`.
///
/// A `u` passes when both point estimates are at most the bound; the
/// Clopper–Pearson limits are reported alongside.
pub fn check_tails(
    space: &FiniteProductSpace,
    class: &FunctionClass,
    params: &TailParams,
) -> Result<TailReport> {
    if !(params.l > 0.0 && params.l.is_finite()) {
        return Err(Error::Domain {
            name: "L",
            value: params.l,
            expected: "finite L > 0",
        });
    }
    if params.trials < MIN_TAIL_TRIALS {
        return Err(Error::Domain {
            name: "trials",
            value: params.trials as f64,
            expected: "at least 10000",
        });
    }
    if let Some(&u) = params.u_grid.iter().find(|u| !(**u > 0.0 && u.is_finite())) {
        return Err(Error::Domain {
            name: "u",
            value: u,
            expected: "positive",
        });
    }
    if !(params.confidence > 0.0 && params.confidence < 1.0) {
        return Err(Error::Domain {
            name: "confidence",
            value: params.confidence,
            expected: "0 < confidence < 1",
        });
    }
    let sigma2 = sigma2(space, class, space.n())?;
    let samples = sample_z(space, class, params.trials, params.seed)?;
    let median = if space.point_count() <= ENUMERATION_LIMIT {
        exact_median(space, class)?
    } else {
        sample_median(samples.clone())
    };
    let sigma = sigma2.sqrt();
    let total = params.trials as u64;
    let mut report = TailReport {
        l: params.l,
        u_grid: params.u_grid.clone(),
        deviation: Vec::new(),
        upper_count: Vec::new(),
        lower_count: Vec::new(),
        empirical_upper: Vec::new(),
        empirical_lower: Vec::new(),
        upper_limit_upper: Vec::new(),
        upper_limit_lower: Vec::new(),
        bound: Vec::new(),
        pass: Vec::new(),
        median_estimate: median.value,
        median_exact: median.exact,
        sigma2,
        trials: params.trials,
        seed: params.seed,
        confidence: params.confidence,
        all_pass: true,
    };
    for &u in &params.u_grid {
        let lu = params.l * u;
        let dev = 2.0 * lu.max(sigma * lu.sqrt());
        let up = samples.iter().filter(|&&z| z >= median.value + dev).count() as u64;
        let down = samples.iter().filter(|&&z| z <= median.value - dev).count() as u64;
        let (fu, fd) = (up as f64 / total as f64, down as f64 / total as f64);
        let bound = 2.0 * (-u).exp();
        let ok = fu <= bound && fd <= bound;
        report.deviation.push(dev);
        report.upper_count.push(up);
        report.lower_count.push(down);
        report.empirical_upper.push(fu);
        report.empirical_lower.push(fd);
        report
            .upper_limit_upper
            .push(clopper_pearson_upper(up, total, params.confidence));
        report
            .upper_limit_lower
            .push(clopper_pearson_upper(down, total, params.confidence));
        report.bound.push(bound);
        report.pass.push(ok);
        report.all_pass &= ok;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coin(n: usize) -> FiniteProductSpace {
        FiniteProductSpace::uniform(2, n).unwrap()
    }

    #[test]
    fn class_validation() {
        assert!(FunctionClass::new(vec![]).is_err());
        assert!(FunctionClass::new(vec![vec![0.5, 1.5]]).is_err());
        assert!(FunctionClass::new(vec![vec![0.5, 0.5], vec![0.5]]).is_err());
        let s = coin(2);
        let wrong = FunctionClass::constant(3, 0.5).unwrap();
        assert!(z_statistic(&s, &wrong, &[0, 1]).is_err());
    }

    #[test]
    fn z_examples() {
        let s = coin(2);
        let zero = FunctionClass::constant(2, 0.0).unwrap();
        let half = FunctionClass::constant(2, 0.7).unwrap();
        for idx in 0..4 {
            let x = s.point(idx);
            assert_eq!(z_statistic(&s, &zero, &x).unwrap(), 0.0);
            assert!(z_statistic(&s, &half, &x).unwrap().abs() < 1e-15);
        }
        let ind = FunctionClass::indicator(2, 0).unwrap();
        assert_eq!(z_statistic(&s, &ind, &[1, 1]).unwrap(), 1.0);
    }

    #[test]
    fn sigma2_examples() {
        let s = coin(10);
        assert_eq!(sigma2(&s, &FunctionClass::constant(2, 0.0).unwrap(), 10).unwrap(), 0.0);
        assert_eq!(sigma2(&s, &FunctionClass::constant(2, 1.0).unwrap(), 10).unwrap(), 10.0);
        let ind = FunctionClass::indicator(2, 0).unwrap();
        assert_eq!(sigma2(&s, &ind, 4).unwrap(), 2.0);
    }

    #[test]
    fn exact_median_is_a_median() {
        let s = FiniteProductSpace::new(vec![0.3, 0.7], 9).unwrap();
        let class = FunctionClass::singleton_indicators(2).unwrap();
        let m = estimate_median(&s, &class, 1000, 1).unwrap();
        assert!(m.exact);
        let law = exact_distribution(&s, &class).unwrap();
        let below: f64 = law.iter().filter(|z| z.0 <= m.value + 1e-12).map(|z| z.1).sum();
        let above: f64 = law.iter().filter(|z| z.0 >= m.value - 1e-12).map(|z| z.1).sum();
        assert!(below >= 0.5 - 1e-12 && above >= 0.5 - 1e-12);
        assert!(estimate_median(&s, &class, 10, 1).is_err());
    }

    #[test]
    fn sample_median_agrees_with_exact() {
        let s = FiniteProductSpace::new(vec![0.3, 0.7], 12).unwrap();
        let class = FunctionClass::indicator(2, 0).unwrap();
        let exact = exact_median(&s, &class).unwrap();
        let sampled = sample_median(sample_z(&s, &class, 20_000, 9).unwrap());
        // One atom of the law of Z is a unit step here.
        assert!((exact.value - sampled.value).abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn sampling_is_deterministic_and_stream_split() {
        let s = coin(5);
        let class = FunctionClass::indicator(2, 0).unwrap();
        let a = sample_z(&s, &class, 10_000, 3).unwrap();
        let b = sample_z(&s, &class, 10_000, 3).unwrap();
        assert_eq!(a, b);
        let c = sample_z(&s, &class, 10_000, 4).unwrap();
        assert_ne!(a, c);
        // A shorter run is a prefix of a longer one.
        let short = sample_z(&s, &class, 5_000, 3).unwrap();
        assert_eq!(&a[..5_000], &short[..]);
    }

    #[test]
    fn clopper_pearson_limits() {
        assert_eq!(clopper_pearson_upper(10, 10, 0.95), 1.0);
        let zero = clopper_pearson_upper(0, 100, 0.95);
        assert!((zero - (1.0 - 0.05f64.powf(0.01))).abs() < 1e-10);
        let mid = clopper_pearson_upper(50, 100, 0.95);
        assert!(mid > 0.5 && mid < 0.6);
    }

    #[test]
    fn degenerate_class_never_deviates() {
        let s = coin(20);
        let zero = FunctionClass::constant(2, 0.0).unwrap();
        let params = TailParams {
            trials: 10_000,
            ..TailParams::default()
        };
        let r = check_tails(&s, &zero, &params).unwrap();
        assert!(r.all_pass);
        assert!(r.upper_count.iter().all(|&c| c == 0));
        assert!(r.lower_count.iter().all(|&c| c == 0));
        for (b, u) in r.bound.iter().zip(&r.u_grid) {
            assert_eq!(*b, 2.0 * (-u).exp());
        }
    }

    #[test]
    fn tail_parameters_validated() {
        let s = coin(3);
        let class = FunctionClass::indicator(2, 0).unwrap();
        let bad = TailParams {
            trials: 100,
            ..TailParams::default()
        };
        assert!(check_tails(&s, &class, &bad).is_err());
        let bad = TailParams {
            u_grid: vec![-1.0],
            ..TailParams::default()
        };
        assert!(check_tails(&s, &class, &bad).is_err());
    }
}
