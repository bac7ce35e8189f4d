//! Run configuration, dispatch and report emission.

pub mod config;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{ClassKind, Command, Defaults, Format, GridSize, Job, Params, RunConfig, OUT_DIR_ENV};
pub use report::{csv_columns, emit_csv, emit_json, write_csv, ReportItem, RunReport};

use crate::error::Result;
use crate::kernel::{self, AtomSystem, Counterexample};
use crate::product_space::{self, FiniteProductSpace};
use crate::{empirical, scalar};

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Validates `config`, runs it and builds the report.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let job = config.job()?;
    let start = Instant::now();
    let (summary, items, pass) = match job {
        Job::VerifyLemma {
            l,
            max_m,
            systems,
            seed,
        } => verify_lemma(l, max_m, systems, seed)?,
        Job::SearchCounterexample { l, m, grid } => {
            let found = kernel::search_counterexample(m, l, &grid)?;
            let worst = kernel::worst_violation(m, l, &grid)?;
            let mut summary = IndexMap::new();
            summary.insert("cells".into(), cells(m, &grid));
            summary.insert("worst_relative_violation".into(), worst.relative_violation());
            let mut items = Vec::new();
            let pass = found.is_none();
            if let Some(c) = &found {
                items.push(counterexample_item("first_violation", m, c));
            }
            items.push(counterexample_item("worst", m, &worst));
            (summary, items, pass)
        }
        Job::CriticalL { m, grid } => {
            let (lower, upper) = kernel::critical_l(m, &grid)?;
            let item = ReportItem::new(format!("m={m}"), true)
                .value("m", m as f64)
                .value("lower", lower)
                .value("upper", upper)
                .value("width", upper - lower);
            (IndexMap::new(), vec![item], true)
        }
        Job::VerifyTheorem1 { space, l, options } => {
            let sweep = product_space::verify_theorem1_all_subsets(&space, l, &options)?;
            let mut summary = IndexMap::new();
            summary.insert("subsets".into(), sweep.subsets as f64);
            summary.insert("screened".into(), sweep.screened as f64);
            summary.insert("solved".into(), sweep.solved.len() as f64);
            summary.insert("failures".into(), sweep.failures.len() as f64);
            summary.insert("worst_ratio".into(), sweep.worst_ratio);
            let mut items: Vec<ReportItem> = sweep
                .solved
                .iter()
                .map(|r| theorem1_item(&space, r))
                .collect();
            items.push(
                ReportItem::new("worst", sweep.pass)
                    .value("size", sweep.worst_subset.split(',').count() as f64)
                    .note("subset", sweep.worst_subset.clone()),
            );
            (summary, items, sweep.pass)
        }
        Job::SimulateEmpirical {
            space,
            class,
            params,
        } => {
            let t = empirical::check_tails(&space, &class, &params)?;
            let mut summary = IndexMap::new();
            summary.insert("median".into(), t.median_estimate);
            summary.insert("median_exact".into(), f64::from(u8::from(t.median_exact)));
            summary.insert("sigma2".into(), t.sigma2);
            let items = (0..t.u_grid.len())
                .map(|k| {
                    ReportItem::new(format!("u={}", t.u_grid[k]), t.pass[k])
                        .value("u", t.u_grid[k])
                        .value("deviation", t.deviation[k])
                        .value("empirical_upper", t.empirical_upper[k])
                        .value("empirical_lower", t.empirical_lower[k])
                        .value("bound", t.bound[k])
                        .value("upper_limit_upper", t.upper_limit_upper[k])
                        .value("upper_limit_lower", t.upper_limit_lower[k])
                        .value("upper_count", t.upper_count[k] as f64)
                        .value("lower_count", t.lower_count[k] as f64)
                })
                .collect();
            (summary, items, t.all_pass)
        }
        Job::PhiScan { l_grid, grid } => {
            let points = l_grid
                .iter()
                .map(|&l| scalar::phi_max(l, grid))
                .collect::<Result<Vec<_>>>()?;
            let items: Vec<ReportItem> = points
                .iter()
                .map(|pt| {
                    ReportItem::new(format!("L={}", pt.l), pt.value <= 1.0 + scalar::UNIT_TOL)
                        .value("L", pt.l)
                        .value("phi_max", pt.value)
                        .value("p_star", pt.p)
                        .value("t_star", pt.t)
                })
                .collect();
            // Only constants at or above the stated one are claims; smaller
            // ones are informational.
            let pass = points
                .iter()
                .zip(&items)
                .all(|(pt, item)| pt.l < crate::DEFAULT_L || item.pass);
            (IndexMap::new(), items, pass)
        }
    };
    Ok(RunReport {
        config: config.resolved(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        duration_secs: start.elapsed().as_secs_f64(),
        summary,
        items,
        pass,
    })
}

fn cells(m: usize, grid: &kernel::GridSpec) -> f64 {
    let per = (grid.p_points as f64) * (grid.ratio_points as f64);
    per.powi(m as i32 - 1)
}

fn counterexample_item(label: &str, m: usize, c: &Counterexample) -> ReportItem {
    let s = &c.system;
    ReportItem::new(label, c.report.pass)
        .value("m", m as f64)
        .value("p1", s.p()[0])
        .value("log_ratio", s.log_ratio(0, s.len() - 1))
        .value("lhs", c.report.lhs)
        .value("rhs", c.report.rhs)
        .value("margin", c.report.margin)
        .value("relative_violation", c.relative_violation())
        .value("cell", c.cell as f64)
        .note("p", join(s.p()))
        .note("g", join(s.g()))
}

fn theorem1_item(space: &FiniteProductSpace, r: &product_space::Theorem1Report) -> ReportItem {
    let size = if r.subset.is_empty() {
        0
    } else {
        r.subset.split(',').count()
    };
    ReportItem::new(format!("A={}", r.subset), r.pass)
        .value("size", size as f64)
        .value("prob_a", r.prob_a)
        .value("lhs_upper", r.lhs_upper)
        .value("lhs_lower", r.lhs_lower)
        .value("rhs", r.rhs)
        .value("max_gap", r.max_gap)
        .value("unconverged", r.unconverged as f64)
        .note("subset", r.subset.clone())
        .note("atoms", join(space.mu()))
}

/// Random systems for the lemma sweep: `m` uniform on `{2, …, max_m}`,
/// then [`AtomSystem::random`], all drawn from one seeded stream.
pub fn random_systems(max_m: usize, count: usize, seed: u64) -> Vec<AtomSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let m = rng.random_range(2..=max_m);
            AtomSystem::random(m, &mut rng)
        })
        .collect()
}

type Outcome = (IndexMap<String, f64>, Vec<ReportItem>, bool);

fn verify_lemma(l: f64, max_m: usize, count: usize, seed: u64) -> Result<Outcome> {
    let systems = random_systems(max_m, count, seed);
    let reports = systems
        .par_iter()
        .map(|s| kernel::verify_lemma(s, l))
        .collect::<Result<Vec<_>>>()?;
    let item = |k: usize, label: String| {
        let (s, r) = (&systems[k], &reports[k]);
        ReportItem::new(label, r.pass)
            .value("m", s.len() as f64)
            .value("lhs", r.lhs)
            .value("rhs", r.rhs)
            .value("margin", r.margin)
            .value("relative_margin", r.margin / r.rhs)
            .value("index", k as f64)
            .note("p", join(s.p()))
            .note("g", join(s.g()))
    };
    let failures: Vec<usize> = (0..count).filter(|&k| !reports[k].pass).collect();
    let worst = (0..count)
        .min_by(|&a, &b| {
            let ra = reports[a].margin / reports[a].rhs;
            let rb = reports[b].margin / reports[b].rhs;
            ra.total_cmp(&rb)
        })
        .expect("count > 0");
    let mut items: Vec<ReportItem> = failures.iter().map(|&k| item(k, format!("system {k}"))).collect();
    items.push(item(worst, "worst".into()));
    let mut summary = IndexMap::new();
    summary.insert("systems".into(), count as f64);
    summary.insert("failures".into(), failures.len() as f64);
    summary.insert(
        "min_relative_margin".into(),
        reports[worst].margin / reports[worst].rhs,
    );
    Ok((summary, items, failures.is_empty()))
}

/// Where a report goes: `--out`, else `$TALAGRAND_OUT_DIR/<command>.<ext>`,
/// else standard output.
pub fn output_path(config: &RunConfig) -> Option<PathBuf> {
    if let Some(p) = &config.params.out {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_ENV)?;
    let ext = match config.params.format.unwrap_or(Format::Json) {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    Some(PathBuf::from(dir).join(format!("{}.{ext}", config.command.name())))
}

/// Runs `config` and writes the report in the requested format.
pub fn run_and_emit(config: &RunConfig) -> Result<(RunReport, Option<PathBuf>)> {
    let report = run(config)?;
    let format = config.params.format.unwrap_or(Format::Json);
    let path = output_path(config);
    match (&path, format) {
        (Some(p), Format::Json) => emit_json(&report, p)?,
        (Some(p), Format::Csv) => emit_csv(&report, p)?,
        (None, Format::Json) => println!("{}", report.to_json()?),
        (None, Format::Csv) => write_csv(&report, std::io::stdout().lock())?,
    }
    Ok((report, path))
}
