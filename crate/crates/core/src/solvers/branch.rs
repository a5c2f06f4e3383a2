use std::fmt;
use std::sync::{Arc, OnceLock};

use super::roots::{extrema_on_grid, log_grid, roots_on_sampled};
use super::CRITICAL_REL_TOL;
use crate::recursion::FieldVector4;

/// A point on a solution branch: the fields and the activity at which they
/// are a fixed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub u: f64,
    pub fields: FieldVector4,
    pub lambda: f64,
}

type Eval = Arc<dyn Fn(f64) -> Option<BranchPoint> + Send + Sync>;

/// A one-parameter curve of asymmetric fixed points, independent of `lambda`.
///
/// Points are parameterized by a signed log-offset `u` from the point where
/// the branch meets the symmetric solution. Solving at a given activity is a
/// scalar root search for `ln lambda(u) = ln lambda` over a cached grid.
#[derive(Clone)]
pub struct Branch {
    eval: Eval,
    segments: Vec<(Vec<f64>, Vec<f64>)>,
    crossing_lambda: f64,
    folds: Arc<OnceLock<Vec<(BranchPoint, bool)>>>,
}

impl fmt::Debug for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Branch")
            .field("segments", &self.segments.len())
            .field("crossing_lambda", &self.crossing_lambda)
            .finish()
    }
}

/// Largest `|u|` reached from `u = 0` while `ln lambda(u)` stays within a few
/// rounding errors of `ln_cross`.
fn flat_radius(grid: &[f64], vals: &[f64], ln_cross: f64) -> f64 {
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[a].abs().total_cmp(&grid[b].abs()));
    let mut radius = 0.0;
    for i in order {
        if (vals[i] - ln_cross).abs() > 4.0 * CRITICAL_REL_TOL {
            break;
        }
        radius = grid[i].abs();
    }
    radius
}

/// Grid points per side of the branch.
pub(crate) const BRANCH_POINTS: usize = 5000;
/// Smallest and largest `|u|` sampled.
pub(crate) const BRANCH_U_MIN: f64 = 1e-9;
pub(crate) const BRANCH_U_MAX: f64 = 23.0;

impl Branch {
    /// `sides` selects the `u > 0` and/or `u < 0` halves.
    pub(crate) fn new<F>(eval: F, positive: bool, negative: bool, crossing_lambda: f64) -> Self
    where
        F: Fn(f64) -> Option<BranchPoint> + Send + Sync + 'static,
    {
        let eval: Eval = Arc::new(eval);
        let offsets = log_grid(BRANCH_U_MIN, BRANCH_U_MAX, BRANCH_POINTS);
        let mut segments = Vec::new();
        let mut sample = |grid: Vec<f64>| {
            let vals = grid
                .iter()
                .map(|&u| eval(u).map_or(f64::NAN, |p| p.lambda.ln()))
                .collect();
            segments.push((grid, vals));
        };
        if negative {
            sample(offsets.iter().rev().map(|u| -u).collect());
        }
        if positive {
            sample(offsets.clone());
        }
        Self {
            eval,
            segments,
            crossing_lambda,
            folds: Arc::default(),
        }
    }

    pub fn at(&self, u: f64) -> Option<BranchPoint> {
        (self.eval)(u)
    }

    /// Activity at which the branch meets the symmetric solution.
    pub fn crossing_lambda(&self) -> f64 {
        self.crossing_lambda
    }

    /// Every branch point whose activity equals `lambda`.
    ///
    /// At the crossing activity itself, points in the stretch next to `u = 0`
    /// where `lambda(u)` is numerically indistinguishable from the crossing
    /// value are the symmetric solution and are dropped.
    pub fn solve(&self, lambda: f64) -> Vec<BranchPoint> {
        let target = lambda.ln();
        let ln_cross = self.crossing_lambda.ln();
        let at_crossing = (target - ln_cross).abs() <= CRITICAL_REL_TOL;
        let f = |u: f64| (self.eval)(u).map_or(f64::NAN, |p| p.lambda.ln() - target);
        let mut out = Vec::new();
        for (grid, vals) in &self.segments {
            let flat = if at_crossing {
                flat_radius(grid, vals, ln_cross)
            } else {
                0.0
            };
            let shifted: Vec<f64> = vals.iter().map(|v| v - target).collect();
            for u in roots_on_sampled(f, grid, &shifted, 1e-13) {
                if u.abs() > flat {
                    out.extend(self.at(u));
                }
            }
        }
        out
    }

    /// Local extrema of `lambda` along the branch (fold points), as
    /// `(point, is_max)`.
    pub fn folds(&self) -> Vec<(BranchPoint, bool)> {
        self.folds
            .get_or_init(|| {
                let f = |u: f64| (self.eval)(u).map_or(f64::NAN, |p| p.lambda.ln());
                self.segments
                    .iter()
                    .flat_map(|(grid, _)| extrema_on_grid(f, grid))
                    .filter_map(|(u, _, is_max)| self.at(u).map(|p| (p, is_max)))
                    .collect()
            })
            .clone()
    }

    /// Fold activities followed by the crossing activity.
    pub fn critical_lambdas(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.folds().into_iter().map(|(p, _)| p.lambda).collect();
        v.push(self.crossing_lambda);
        v
    }
}
