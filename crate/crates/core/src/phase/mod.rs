//! Solution counts across activity grids, tabular output, and the theorem
//! verification harness.

mod verify;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use verify::{verify_theorem, Check, TheoremArgs, TheoremReport, THEOREM_IDS};

use crate::error::{Error, Result};
use crate::model::{ActivityGraph, ModelParams};
use crate::recursion::{AgmPattern, WeaklyPeriodicPattern};
use crate::solvers::{
    i3_branch, i4_branch, solve_i3_with, solve_i4, solve_i4_with, solve_ti, solve_wp, Branch,
    Scenario, Solution, SolutionReport,
};

/// Solutions of one scenario at one activity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub scenario: Scenario,
    pub k: u32,
    pub lambda: f64,
    pub solution_count: usize,
    pub critical_flag: bool,
    pub solutions: Vec<Solution>,
}

impl From<SolutionReport> for PhasePoint {
    fn from(r: SolutionReport) -> Self {
        Self {
            scenario: r.scenario,
            k: r.k,
            lambda: r.lambda,
            solution_count: r.solutions.len(),
            critical_flag: r.critical,
            solutions: r.solutions,
        }
    }
}

/// A scenario with its activity-independent data precomputed.
enum Prepared {
    Ti(ActivityGraph),
    I3 {
        m: u32,
        branch: Option<Branch>,
    },
    I4 {
        pattern: AgmPattern,
        branch: Option<Branch>,
    },
    I4Closed(AgmPattern),
    Wp(WeaklyPeriodicPattern),
}

fn has_closed_form(p: &AgmPattern) -> bool {
    matches!(
        (p.k(), p.m().max(p.r()), p.m().min(p.r())),
        (3, 1, 0) | (4, 1, 0) | (4, 1, 1) | (4, 2, 0)
    )
}

impl Prepared {
    fn new(scenario: Scenario, k: u32) -> Result<Self> {
        scenario.validate(k)?;
        Ok(match scenario {
            Scenario::TiWand => Prepared::Ti(ActivityGraph::wand()),
            Scenario::TiHinge => Prepared::Ti(ActivityGraph::hinge()),
            Scenario::I3 { m } => Prepared::I3 {
                m,
                branch: i3_branch(k, m)?,
            },
            Scenario::I4 { m, r } => {
                let pattern = AgmPattern::new(k, m, r)?;
                if has_closed_form(&pattern) {
                    Prepared::I4Closed(pattern)
                } else {
                    Prepared::I4 {
                        branch: i4_branch(&pattern),
                        pattern,
                    }
                }
            }
            Scenario::Wp { i } => Prepared::Wp(WeaklyPeriodicPattern::new(k, i)?),
        })
    }

    fn solve(&self, params: &ModelParams) -> Result<SolutionReport> {
        match self {
            Prepared::Ti(g) => solve_ti(g, params),
            Prepared::I3 { m, branch } => solve_i3_with(params, *m, branch.as_ref()),
            Prepared::I4 { pattern, branch } => solve_i4_with(params, pattern, branch.as_ref()),
            Prepared::I4Closed(p) => solve_i4(params, p),
            Prepared::Wp(p) => solve_wp(params, p),
        }
    }
}

/// One [`PhasePoint`] per grid value, in grid order.
pub fn sweep(scenario: Scenario, k: u32, grid: &[f64]) -> Result<Vec<PhasePoint>> {
    if let Some(bad) = grid.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "grid value {bad} is not positive"
        )));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("grid must be sorted".into()));
    }
    let prepared = Prepared::new(scenario, k)?;
    grid.par_iter()
        .map(|&lambda| {
            let params = ModelParams::new(k, lambda)?;
            prepared.solve(&params).map(PhasePoint::from)
        })
        .collect()
}

/// Critical activities advertised for a scenario, smallest first.
pub fn advertised_critical(scenario: Scenario, k: u32) -> Result<Vec<f64>> {
    let params = ModelParams::new(k, 1.0)?;
    let mut v = Prepared::new(scenario, k)?.solve(&params)?.critical_lambdas;
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

/// Points per decade of the default grid.
pub const POINTS_PER_DECADE: usize = 256;

/// Log-spaced grid over `[lo, hi]` with `POINTS_PER_DECADE` points per decade,
/// plus `c (1 - 1e-6)`, `c` and `c (1 + 1e-6)` for every `c` in `critical`.
pub fn grid_with_critical(lo: f64, hi: f64, critical: &[f64]) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = ((decades * POINTS_PER_DECADE as f64).round() as usize).max(1) + 1;
    let mut g: Vec<f64> = (0..n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / (n - 1) as f64))
        .collect();
    // Drop grid points that would fall inside a critical band by rounding.
    g.retain(|l| critical.iter().all(|c| (l - c).abs() > 1e-9 * c));
    for &c in critical {
        g.extend([c * (1.0 - 1e-6), c, c * (1.0 + 1e-6)]);
    }
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// `[c/10, 10c]` around the smallest advertised critical activity `c`.
pub fn default_grid(scenario: Scenario, k: u32) -> Result<Vec<f64>> {
    let crit = advertised_critical(scenario, k)?;
    let c = *crit.first().ok_or_else(|| {
        Error::InvalidParameter(format!("{scenario} has no critical activity for k={k}"))
    })?;
    Ok(grid_with_critical(c / 10.0, c * 10.0, &crit))
}

/// Schema tag on the first line of every CSV file.
pub const CSV_SCHEMA: &str = "hctree-phase/1";
pub const CSV_COLUMNS: &str = "scenario,k,m,r,lambda,count,critical_flag,z1,z2,t1,t2,residual";

/// Twelve significant digits.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

/// One row per solution, preceded by a schema comment and the header.
pub fn write_csv<W: Write>(points: &[PhasePoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "# schema: {CSV_SCHEMA}")?;
    writeln!(out, "{CSV_COLUMNS}")?;
    for p in points {
        let (m, r) = p
            .scenario
            .pattern(p.k)
            .map_or((String::new(), String::new()), |(m, r)| {
                (m.to_string(), r.to_string())
            });
        for s in &p.solutions {
            let [z1, z2, t1, t2] = s.fields.as_array();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                p.scenario,
                p.k,
                m,
                r,
                fmt12(p.lambda),
                p.solution_count,
                p.critical_flag,
                fmt12(z1),
                fmt12(z2),
                fmt12(t1),
                fmt12(t2),
                fmt12(s.residual)
            )?;
        }
    }
    Ok(())
}

/// Pairs of neighbouring grid points whose counts differ, as
/// `(lambda_a, lambda_b, count_a, count_b)`.
pub fn count_changes(points: &[PhasePoint]) -> Vec<(f64, f64, usize, usize)> {
    points
        .windows(2)
        .filter(|w| w[0].solution_count != w[1].solution_count)
        .map(|w| {
            (
                w[0].lambda,
                w[1].lambda,
                w[0].solution_count,
                w[1].solution_count,
            )
        })
        .collect()
}
