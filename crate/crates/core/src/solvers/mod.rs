//! Fixed-point solvers for the translation-invariant, `I3`, `I4` and weakly
//! periodic systems, plus exact polynomial tools.

mod branch;
pub mod cubic;
mod i3;
mod i4;
pub mod multistart;
pub mod poly;
pub mod roots;
mod ti;
mod wp;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use branch::{Branch, BranchPoint};
pub use cubic::{solve_cubic, solve_cubic_poly, CubicRoots, RealRoot};
pub(crate) use i3::solve_i3_with;
pub use i3::{i3_branch, i3_critical_lambda, solve_i3};
pub(crate) use i4::solve_i4_with;
pub use i4::{
    fold_curve_k4, fold_maximum_k4, i4_branch, quartic_k4, reciprocal_cubic_k3, reciprocal_pair_k4,
    solve_i4, solve_i4_generic, FoldMaximum, QuarticAnalysis, K3_RECIPROCAL_FOLD, K4_QUARTIC_FOLD,
};
pub use poly::{
    count_positive_roots, sturm_count, verify_r_factorization, IntPolynomial, RFactorizationReport,
    RootCount,
};
pub use ti::{
    critical_lambda, critical_lambda_exact, hinge_lambda_of_t, lambda_of_t, solve_symmetric,
    solve_ti, ti_pair_from_t,
};
pub use wp::solve_wp;

use crate::error::{Error, Result};
use crate::model::{ActivityGraph, GraphPreset, ModelParams};
use crate::recursion::{
    i3_map, i4_map, rel_defect, ti_map, weakly_periodic_map, AgmPattern, FieldVector4,
    FieldVector8, WeaklyPeriodicPattern,
};

/// Every reported solution satisfies its recursion to this relative residual.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Candidates closer than this (relative, componentwise) are the same solution.
pub const DEDUP_TOL: f64 = 1e-8;
/// `|lambda - lambda_cr| <= CRITICAL_REL_TOL * lambda_cr` counts as critical.
pub const CRITICAL_REL_TOL: f64 = 1e-12;

/// Which system of fixed-point equations is being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    TiWand,
    TiHinge,
    I3 { m: u32 },
    I4 { m: u32, r: u32 },
    Wp { i: u32 },
}

impl Scenario {
    pub fn ti(preset: GraphPreset) -> Self {
        match preset {
            GraphPreset::Wand => Scenario::TiWand,
            GraphPreset::Hinge => Scenario::TiHinge,
        }
    }

    /// Short tag used in CSV output.
    pub fn tag(&self) -> &'static str {
        match self {
            Scenario::TiWand => "ti-wand",
            Scenario::TiHinge => "ti-hinge",
            Scenario::I3 { .. } => "i3",
            Scenario::I4 { .. } => "i4",
            Scenario::Wp { .. } => "wp",
        }
    }

    pub fn graph(&self) -> ActivityGraph {
        match self {
            Scenario::TiHinge => ActivityGraph::hinge(),
            _ => ActivityGraph::wand(),
        }
    }

    /// `(m, r)` of the two-class pattern behind this scenario, if any.
    pub fn pattern(&self, k: u32) -> Option<(u32, u32)> {
        match *self {
            Scenario::TiWand | Scenario::TiHinge => None,
            Scenario::I3 { m } => Some((m, m)),
            Scenario::I4 { m, r } => Some((m, r)),
            Scenario::Wp { i } => Some((k.saturating_sub(i), i.saturating_sub(1))),
        }
    }

    /// Relative fixed-point defect of `fields` under this scenario's map.
    pub fn residual(&self, params: &ModelParams, fields: &FieldVector4) -> Result<f64> {
        let k = params.k();
        Ok(match *self {
            Scenario::TiWand | Scenario::TiHinge => {
                let img = ti_map(&self.graph(), params, &fields.z)?;
                let own = rel_defect(&img.as_array(), &fields.z.as_array());
                own.max(rel_defect(&fields.t.as_array(), &fields.z.as_array()))
            }
            Scenario::I3 { m } => {
                let img = i3_map(params, m, &fields.z);
                rel_defect(&img.as_array(), &fields.z.as_array())
            }
            Scenario::I4 { m, r } => {
                let p = AgmPattern::new(k, m, r)?;
                let (z, t) = i4_map(params, &p, fields.z.z1, fields.t.z1);
                rel_defect(&[z, t], &[fields.z.z1, fields.t.z1])
            }
            Scenario::Wp { i } => {
                let p = WeaklyPeriodicPattern::new(k, i)?;
                let v = FieldVector8::from_agm(*fields);
                let img = weakly_periodic_map(params, &p, &v);
                rel_defect(&img.as_array(), &v.as_array())
            }
        })
    }

    pub fn validate(&self, k: u32) -> Result<()> {
        match *self {
            Scenario::TiWand | Scenario::TiHinge => Ok(()),
            Scenario::I3 { m } => AgmPattern::new(k, m, m).map(|_| ()),
            Scenario::I4 { m, r } => AgmPattern::new(k, m, r).map(|_| ()),
            Scenario::Wp { i } => WeaklyPeriodicPattern::new(k, i).map(|_| ()),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::TiWand => f.write_str("TI-wand"),
            Scenario::TiHinge => f.write_str("TI-hinge"),
            Scenario::I3 { m } => write!(f, "I3({m})"),
            Scenario::I4 { m, r } => write!(f, "I4({m},{r})"),
            Scenario::Wp { i } => write!(f, "WP({i})"),
        }
    }
}

/// Classification of a fixed point by the measure it defines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolutionLabel {
    #[serde(rename = "TI_symmetric")]
    TiSymmetric,
    #[serde(rename = "TI_asymmetric")]
    TiAsymmetric,
    #[serde(rename = "AGM_I3")]
    AgmI3,
    #[serde(rename = "AGM_I4")]
    AgmI4,
    Periodic,
    WeaklyPeriodic,
}

impl SolutionLabel {
    pub fn is_translation_invariant(self) -> bool {
        matches!(
            self,
            SolutionLabel::TiSymmetric | SolutionLabel::TiAsymmetric
        )
    }
}

/// One verified fixed point, embedded as `(z1, z2, t1, t2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub fields: FieldVector4,
    pub residual: f64,
    pub label: SolutionLabel,
    /// Index of the spin- or class-swapped partner within the same report.
    pub pairing: Option<usize>,
}

/// All fixed points found for one scenario at one `(k, lambda)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub scenario: Scenario,
    pub graph: String,
    pub k: u32,
    pub lambda: f64,
    /// `lambda` lies within `CRITICAL_REL_TOL` of one of `critical_lambdas`;
    /// merged solutions are reported once.
    pub critical: bool,
    pub critical_lambdas: Vec<f64>,
    pub solutions: Vec<Solution>,
}

impl SolutionReport {
    pub fn count(&self) -> usize {
        self.solutions.len()
    }

    pub fn max_residual(&self) -> f64 {
        self.solutions
            .iter()
            .map(|s| s.residual)
            .fold(0.0, f64::max)
    }

    pub fn asymmetric(&self) -> impl Iterator<Item = &Solution> {
        self.solutions
            .iter()
            .filter(|s| s.label != SolutionLabel::TiSymmetric)
    }
}

pub(crate) fn is_critical(lambda: f64, critical: &[f64]) -> bool {
    critical
        .iter()
        .any(|&c| (lambda - c).abs() <= CRITICAL_REL_TOL * c)
}

pub(crate) fn same_fields(a: &FieldVector4, b: &FieldVector4) -> bool {
    rel_defect(&a.as_array(), &b.as_array()) <= DEDUP_TOL
}

/// Collects candidate fixed points, verifies residuals and removes duplicates.
pub(crate) struct ReportBuilder {
    scenario: Scenario,
    params: ModelParams,
    solutions: Vec<Solution>,
}

impl ReportBuilder {
    pub fn new(scenario: Scenario, params: ModelParams) -> Self {
        Self {
            scenario,
            params,
            solutions: Vec::new(),
        }
    }

    /// Adds a candidate unless it duplicates an earlier one. Returns its index.
    pub fn push(&mut self, fields: FieldVector4, label: SolutionLabel) -> Result<Option<usize>> {
        if !fields.is_valid() {
            return Ok(None);
        }
        if let Some(i) = self
            .solutions
            .iter()
            .position(|s| same_fields(&s.fields, &fields))
        {
            return Ok(Some(i));
        }
        let residual = self.scenario.residual(&self.params, &fields)?;
        if residual > RESIDUAL_TOL {
            return Err(Error::NotFixedPoint {
                residual,
                threshold: RESIDUAL_TOL,
            });
        }
        self.solutions.push(Solution {
            fields,
            residual,
            label,
            pairing: None,
        });
        Ok(Some(self.solutions.len() - 1))
    }

    pub fn pair(&mut self, a: Option<usize>, b: Option<usize>) {
        if let (Some(a), Some(b)) = (a, b) {
            if a != b {
                self.solutions[a].pairing = Some(b);
                self.solutions[b].pairing = Some(a);
            }
        }
    }

    pub fn finish(self, critical_lambdas: Vec<f64>) -> SolutionReport {
        let lambda = self.params.lambda();
        SolutionReport {
            scenario: self.scenario,
            graph: self.scenario.graph().name().to_string(),
            k: self.params.k(),
            lambda,
            critical: is_critical(lambda, &critical_lambdas),
            critical_lambdas,
            solutions: self.solutions,
        }
    }
}

/// Solves any scenario at `params`.
pub fn solve(scenario: Scenario, params: &ModelParams) -> Result<SolutionReport> {
    scenario.validate(params.k())?;
    match scenario {
        Scenario::TiWand => solve_ti(&ActivityGraph::wand(), params),
        Scenario::TiHinge => solve_ti(&ActivityGraph::hinge(), params),
        Scenario::I3 { m } => solve_i3(params, m),
        Scenario::I4 { m, r } => solve_i4(params, &AgmPattern::new(params.k(), m, r)?),
        Scenario::Wp { i } => solve_wp(params, &WeaklyPeriodicPattern::new(params.k(), i)?),
    }
}
