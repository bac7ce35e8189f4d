//! Run configuration: the command, its parameters, the defaults table and
//! validation into a fully resolved job.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::empirical::{FunctionClass, TailParams, MIN_TAIL_TRIALS};
use crate::error::{Error, Result};
use crate::kernel::GridSpec;
use crate::product_space::{FiniteProductSpace, Theorem1Options};
use crate::scalar::MIN_PHI_GRID;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "TALAGRAND_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyLemma,
    SearchCounterexample,
    CriticalL,
    VerifyTheorem1,
    SimulateEmpirical,
    PhiScan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyLemma => "verify-lemma",
            Command::SearchCounterexample => "search-counterexample",
            Command::CriticalL => "critical-l",
            Command::VerifyTheorem1 => "verify-theorem1",
            Command::SimulateEmpirical => "simulate-empirical",
            Command::PhiScan => "phi-scan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

/// Function class used by `simulate-empirical`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ClassKind {
    /// `{1_{ω₁}}`.
    Indicator,
    /// Indicators of every atom.
    Singletons,
}

/// `P×R` grid size, written `200x200` or `200` for a square grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSize {
    pub p: usize,
    pub r: usize,
}

impl FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad grid size `{s}`: {e}"))
        };
        match s.split_once(['x', 'X']) {
            Some((a, b)) => Ok(Self {
                p: parse(a)?,
                r: parse(b)?,
            }),
            None => {
                let v = parse(s)?;
                Ok(Self { p: v, r: v })
            }
        }
    }
}

/// Command parameters. Unset fields take the command's default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub override_enumeration_guard: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),*) => {
        Params { $($field: $top.$field.or($base.$field)),* }
    };
}

impl Params {
    /// Field-wise overlay: values set in `top` win.
    pub fn overlay(self, top: Params) -> Params {
        overlay!(
            self, top, l, m, n, atoms, trials, seed, u_grid, l_grid, grid, gap_tol, confidence,
            class, override_enumeration_guard, out, format
        )
    }
}

/// A command with its parameters, as accepted from a JSON config file and
/// echoed (fully resolved) in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub params: Params,
}

/// Single source for every default.
///
/// | parameter     | default                          |
/// |---------------|----------------------------------|
/// | `L`           | 1.12                             |
/// | `gap_tol`     | 1e-6                             |
/// | `trials`      | 100 000                          |
/// | `confidence`  | 0.95                             |
/// | `seed`        | 42                               |
/// | `m`           | 8 (verify-lemma), 2 (searches)   |
/// | `n`           | 2 (verify-theorem1), 20 (simulate-empirical) |
/// | `atoms`       | 0.5,0.5                          |
/// | `u_grid`      | 0.25,0.5,1,2,4                   |
/// | `l_grid`      | 1.05,1.1,1.12,1.5,2              |
/// | `grid`        | 200x200 (searches), 2000 (phi-scan) |
/// | `class`       | indicator                        |
pub struct Defaults;

impl Defaults {
    pub const L: f64 = crate::DEFAULT_L;
    pub const GAP_TOL: f64 = 1e-6;
    pub const TRIALS: usize = 100_000;
    pub const CONFIDENCE: f64 = 0.95;
    pub const SEED: u64 = 42;
    pub const ATOMS: [f64; 2] = [0.5, 0.5];
    pub const U_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
    pub const L_GRID: [f64; 5] = [1.05, 1.1, 1.12, 1.5, 2.0];
    pub const SEARCH_GRID: usize = 200;
    pub const PHI_GRID: usize = 2000;

    pub fn m(command: Command) -> usize {
        match command {
            Command::VerifyLemma => 8,
            _ => 2,
        }
    }

    pub fn n(command: Command) -> usize {
        match command {
            Command::SimulateEmpirical => 20,
            _ => 2,
        }
    }

    pub fn grid(command: Command) -> GridSize {
        let v = match command {
            Command::PhiScan => Self::PHI_GRID,
            _ => Self::SEARCH_GRID,
        };
        GridSize { p: v, r: v }
    }
}

/// A validated job, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    VerifyLemma {
        l: f64,
        max_m: usize,
        systems: usize,
        seed: u64,
    },
    SearchCounterexample {
        l: f64,
        m: usize,
        grid: GridSpec,
    },
    CriticalL {
        m: usize,
        grid: GridSpec,
    },
    VerifyTheorem1 {
        space: FiniteProductSpace,
        l: f64,
        options: Theorem1Options,
    },
    SimulateEmpirical {
        space: FiniteProductSpace,
        class: FunctionClass,
        params: TailParams,
    },
    PhiScan {
        l_grid: Vec<f64>,
        grid: usize,
    },
}

fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn positive_l(field: &str, l: f64) -> Result<f64> {
    if l.is_finite() && l > 0.0 {
        Ok(l)
    } else {
        Err(invalid(field, format!("{l} is not a positive finite constant")))
    }
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            params: Params::default(),
        }
    }

    /// Every parameter the command uses, with defaults filled in. Output
    /// location and format are kept only if they were given.
    pub fn resolved(&self) -> RunConfig {
        let c = self.command;
        let p = &self.params;
        let mut out = Params {
            out: p.out.clone(),
            format: p.format,
            ..Params::default()
        };
        let l = Some(p.l.unwrap_or(Defaults::L));
        let grid = Some(p.grid.unwrap_or(Defaults::grid(c)));
        match c {
            Command::VerifyLemma => {
                out.l = l;
                out.m = Some(p.m.unwrap_or(Defaults::m(c)));
                out.trials = Some(p.trials.unwrap_or(Defaults::TRIALS));
                out.seed = Some(p.seed.unwrap_or(Defaults::SEED));
            }
            Command::SearchCounterexample => {
                out.l = l;
                out.m = Some(p.m.unwrap_or(Defaults::m(c)));
                out.grid = grid;
            }
            Command::CriticalL => {
                out.m = Some(p.m.unwrap_or(Defaults::m(c)));
                out.grid = grid;
            }
            Command::VerifyTheorem1 => {
                out.l = l;
                out.n = Some(p.n.unwrap_or(Defaults::n(c)));
                out.atoms = Some(p.atoms.clone().unwrap_or(Defaults::ATOMS.to_vec()));
                out.gap_tol = Some(p.gap_tol.unwrap_or(Defaults::GAP_TOL));
                out.override_enumeration_guard = Some(p.override_enumeration_guard.unwrap_or(false));
            }
            Command::SimulateEmpirical => {
                out.l = l;
                out.n = Some(p.n.unwrap_or(Defaults::n(c)));
                out.atoms = Some(p.atoms.clone().unwrap_or(Defaults::ATOMS.to_vec()));
                out.trials = Some(p.trials.unwrap_or(Defaults::TRIALS));
                out.seed = Some(p.seed.unwrap_or(Defaults::SEED));
                out.u_grid = Some(p.u_grid.clone().unwrap_or(Defaults::U_GRID.to_vec()));
                out.confidence = Some(p.confidence.unwrap_or(Defaults::CONFIDENCE));
                out.class = Some(p.class.unwrap_or(ClassKind::Indicator));
            }
            Command::PhiScan => {
                out.l_grid = Some(p.l_grid.clone().unwrap_or(Defaults::L_GRID.to_vec()));
                out.grid = grid;
            }
        }
        RunConfig {
            command: c,
            params: out,
        }
    }

    /// Validates every parameter against the target operation's
    /// preconditions; no computation happens here.
    pub fn job(&self) -> Result<Job> {
        let r = self.resolved();
        let p = &r.params;
        let c = r.command;
        let m_at_least_2 = |m: usize| {
            if m >= 2 {
                Ok(m)
            } else {
                Err(invalid("m", format!("{m} < 2")))
            }
        };
        let search_grid = |g: GridSize| -> Result<GridSpec> {
            if g.p < 2 || g.r < 1 {
                return Err(invalid("grid", "need at least 2x1 cells"));
            }
            Ok(GridSpec {
                p_points: g.p,
                ratio_points: g.r,
                ..GridSpec::default()
            })
        };
        let space = || -> Result<FiniteProductSpace> {
            let atoms = p.atoms.clone().expect("resolved");
            let n = p.n.expect("resolved");
            FiniteProductSpace::new(atoms, n).map_err(|e| invalid("atoms", e.to_string()))
        };
        Ok(match c {
            Command::VerifyLemma => {
                let max_m = m_at_least_2(p.m.expect("resolved"))?;
                let systems = p.trials.expect("resolved");
                if systems == 0 {
                    return Err(invalid("trials", "need at least one system"));
                }
                Job::VerifyLemma {
                    l: positive_l("L", p.l.expect("resolved"))?,
                    max_m,
                    systems,
                    seed: p.seed.expect("resolved"),
                }
            }
            Command::SearchCounterexample => {
                let m = m_at_least_2(p.m.expect("resolved"))?;
                let grid = search_grid(p.grid.expect("resolved"))?;
                if m > 3 {
                    return Err(invalid("m", "grid search supports m <= 3"));
                }
                Job::SearchCounterexample {
                    l: positive_l("L", p.l.expect("resolved"))?,
                    m,
                    grid,
                }
            }
            Command::CriticalL => {
                let m = m_at_least_2(p.m.expect("resolved"))?;
                if m > 3 {
                    return Err(invalid("m", "grid search supports m <= 3"));
                }
                Job::CriticalL {
                    m,
                    grid: search_grid(p.grid.expect("resolved"))?,
                }
            }
            Command::VerifyTheorem1 => {
                let space = space()?;
                let gap_tol = p.gap_tol.expect("resolved");
                if !(gap_tol > 0.0 && gap_tol.is_finite()) {
                    return Err(invalid("gap_tol", format!("{gap_tol} is not positive")));
                }
                let override_guard = p.override_enumeration_guard.expect("resolved");
                let points = space.point_count();
                if points > crate::product_space::theorem::MAX_SWEEP_POINTS as u128 {
                    return Err(invalid(
                        "n",
                        format!("{points} points; the all-subsets sweep handles at most 27"),
                    ));
                }
                Job::VerifyTheorem1 {
                    space,
                    l: positive_l("L", p.l.expect("resolved"))?,
                    options: Theorem1Options {
                        gap_tol,
                        override_guard,
                        ..Theorem1Options::default()
                    },
                }
            }
            Command::SimulateEmpirical => {
                let space = space()?;
                let class = match p.class.expect("resolved") {
                    ClassKind::Indicator => FunctionClass::indicator(space.atom_count(), 0),
                    ClassKind::Singletons => FunctionClass::singleton_indicators(space.atom_count()),
                }
                .map_err(|e| invalid("class", e.to_string()))?;
                let trials = p.trials.expect("resolved");
                if trials < MIN_TAIL_TRIALS {
                    return Err(invalid("trials", format!("{trials} < {MIN_TAIL_TRIALS}")));
                }
                let u_grid = p.u_grid.clone().expect("resolved");
                if u_grid.is_empty() || u_grid.iter().any(|u| !(*u > 0.0 && u.is_finite())) {
                    return Err(invalid("u_grid", "need positive finite values"));
                }
                let confidence = p.confidence.expect("resolved");
                if !(confidence > 0.0 && confidence < 1.0) {
                    return Err(invalid("confidence", format!("{confidence} not in (0, 1)")));
                }
                Job::SimulateEmpirical {
                    space,
                    class,
                    params: TailParams {
                        l: positive_l("L", p.l.expect("resolved"))?,
                        u_grid,
                        trials,
                        seed: p.seed.expect("resolved"),
                        confidence,
                    },
                }
            }
            Command::PhiScan => {
                let l_grid = p.l_grid.clone().expect("resolved");
                if l_grid.is_empty() {
                    return Err(invalid("l_grid", "empty"));
                }
                if let Some(l) = l_grid.iter().find(|l| !(**l >= 1.0 && l.is_finite())) {
                    return Err(invalid("l_grid", format!("{l} < 1")));
                }
                let grid = p.grid.expect("resolved");
                if grid.p.min(grid.r) < MIN_PHI_GRID {
                    return Err(invalid("grid", format!("phi-scan needs >= {MIN_PHI_GRID} per axis")));
                }
                Job::PhiScan {
                    l_grid,
                    grid: grid.p.min(grid.r),
                }
            }
        })
    }

    /// Reads a config file. Accepts either a config document or a full
    /// report, in which case the echoed config is used.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| invalid("config", e.to_string()))?;
        let inner = match value.get("config") {
            Some(c) if value.get("items").is_some() => c.clone(),
            _ => value,
        };
        serde_json::from_value(inner).map_err(|e| invalid("config", e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes_parse() {
        assert_eq!("200x100".parse::<GridSize>().unwrap(), GridSize { p: 200, r: 100 });
        assert_eq!("50".parse::<GridSize>().unwrap(), GridSize { p: 50, r: 50 });
        assert!("ax3".parse::<GridSize>().is_err());
    }

    #[test]
    fn overlay_prefers_top() {
        let base = Params {
            l: Some(1.5),
            seed: Some(1),
            ..Params::default()
        };
        let top = Params {
            seed: Some(9),
            ..Params::default()
        };
        let merged = base.overlay(top);
        assert_eq!(merged.l, Some(1.5));
        assert_eq!(merged.seed, Some(9));
    }

    #[test]
    fn resolution_fills_defaults_once() {
        let cfg = RunConfig::new(Command::SimulateEmpirical).resolved();
        assert_eq!(cfg.params.l, Some(1.12));
        assert_eq!(cfg.params.trials, Some(100_000));
        assert_eq!(cfg.params.confidence, Some(0.95));
        assert_eq!(cfg.resolved(), cfg);
        assert!(cfg.params.gap_tol.is_none());
    }

    #[test]
    fn validation_names_the_field() {
        let mut cfg = RunConfig::new(Command::VerifyLemma);
        cfg.params.l = Some(-1.0);
        match cfg.job() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "L"),
            other => panic!("{other:?}"),
        }
        let mut cfg = RunConfig::new(Command::VerifyTheorem1);
        cfg.params.atoms = Some(vec![0.6, 0.6]);
        assert!(matches!(cfg.job(), Err(Error::Config { field, .. }) if field == "atoms"));
        let mut cfg = RunConfig::new(Command::PhiScan);
        cfg.params.grid = Some(GridSize { p: 10, r: 10 });
        assert!(matches!(cfg.job(), Err(Error::Config { field, .. }) if field == "grid"));
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = RunConfig::new(Command::CriticalL).resolved();
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"critical-l\""));
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
        assert!(RunConfig::from_json("{\"command\":\"nope\"}").is_err());
        assert!(RunConfig::from_json("{\"command\":\"phi-scan\",\"params\":{\"bogus\":1}}").is_err());
    }
}
