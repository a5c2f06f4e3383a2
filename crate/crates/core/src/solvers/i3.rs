//! Fixed points on the invariant set `I3 = {t = swap(z)}` of the two-class map
//! with `m = r`.
//!
//! Dividing the two equations gives `z1/z2 = ((1+z1)/(1+z2))^n` with
//! `n = 2m - k`. Besides the diagonal this defines one curve, symmetric under
//! swapping `z1` and `z2`, which meets the diagonal at `s = 1/(n-1)`. Every
//! point on it is a fixed point for exactly one activity.

use super::branch::{Branch, BranchPoint};
use super::roots::{bisect, expand_down};
use super::{ReportBuilder, Scenario, SolutionLabel, SolutionReport};
use crate::error::{Error, Result};
use crate::model::{ActivityGraph, ModelParams};
use crate::recursion::{ipow, sym_ratio, AgmPattern, BoundaryField, FieldVector4};
use crate::solvers::solve_symmetric;

pub(crate) fn binomial(n: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Complete homogeneous symmetric polynomial of degree `d` in two variables.
pub(crate) fn h2(d: u32, a: f64, b: f64) -> f64 {
    (0..=d).map(|i| ipow(a, i) * ipow(b, d - i)).sum()
}

/// Off-diagonal factor of `z1 (1+z2)^n - z2 (1+z1)^n`, increasing in each argument.
fn w3(n: u32, z1: f64, z2: f64) -> f64 {
    let s: f64 = (2..=n).map(|j| binomial(n, j) * h2(j - 2, z1, z2)).sum();
    z1 * z2 * s - 1.0
}

/// Activity at which `(z1, z2)` is an `I3` fixed point, assuming it lies on the curve.
fn lambda_at(k: u32, m: u32, f: &BoundaryField) -> f64 {
    let den = f.z1 + f.z2;
    let (r1, r2) = ((1.0 + f.z1) / den, (1.0 + f.z2) / den);
    f.z1 / (ipow(r1, m) * ipow(r2, k - m))
}

/// The off-diagonal curve for `(k, m)`, or `None` when `2m - k < 2` and no
/// such curve exists. Points have `z2 > s > z1`; swapped points are omitted.
pub fn i3_branch(k: u32, m: u32) -> Result<Option<Branch>> {
    let p = AgmPattern::new(k, m, m)?;
    let n = p.n_i3();
    if n < 2 {
        return Ok(None);
    }
    let n = n as u32;
    let s = 1.0 / (n as f64 - 1.0);
    let eval = move |u: f64| -> Option<BranchPoint> {
        if u <= 0.0 {
            return None;
        }
        let z2 = s * u.exp();
        let g = |z1: f64| w3(n, z1, z2);
        let lo = expand_down(g, s, -1.0)?;
        let z1 = bisect(g, lo, s)?;
        let f = BoundaryField { z1, z2 };
        Some(BranchPoint {
            u,
            fields: FieldVector4::from_i3(f),
            lambda: lambda_at(k, m, &f),
        })
    };
    let crossing = s / ipow(sym_ratio(s), k);
    Ok(Some(Branch::new(eval, true, false, crossing)))
}

/// Activities at which the `I3` solution count changes: folds of the curve and
/// the activity where it meets the symmetric solution.
pub fn i3_critical_lambda(k: u32, m: u32) -> Result<Vec<f64>> {
    Ok(i3_branch(k, m)?.map_or_else(Vec::new, |b| b.critical_lambdas()))
}

pub fn solve_i3(params: &ModelParams, m: u32) -> Result<SolutionReport> {
    let k = params.k();
    let branch = i3_branch(k, m)?;
    solve_i3_with(params, m, branch.as_ref())
}

pub(crate) fn solve_i3_with(
    params: &ModelParams,
    m: u32,
    branch: Option<&Branch>,
) -> Result<SolutionReport> {
    let k = params.k();
    if m > k {
        return Err(Error::InvalidParameter(format!("m = {m} exceeds k = {k}")));
    }
    let mut b = ReportBuilder::new(Scenario::I3 { m }, *params);
    let z = solve_symmetric(&ActivityGraph::wand(), params)?;
    b.push(
        FieldVector4::from_i3(BoundaryField::symmetric(z)),
        SolutionLabel::TiSymmetric,
    )?;
    let label = if m == k {
        SolutionLabel::TiAsymmetric
    } else {
        SolutionLabel::AgmI3
    };
    let mut critical = Vec::new();
    if let Some(branch) = branch {
        for pt in branch.solve(params.lambda()) {
            let a = b.push(pt.fields, label)?;
            let c = b.push(FieldVector4::from_i3(pt.fields.z.swapped()), label)?;
            b.pair(a, c);
        }
        critical = branch.critical_lambdas();
    }
    Ok(b.finish(critical))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::critical_lambda;

    fn p(k: u32, lambda: f64) -> ModelParams {
        ModelParams::new(k, lambda).unwrap()
    }

    #[test]
    fn curve_meets_diagonal_at_s() {
        for n in 2..9 {
            let s = 1.0 / (n as f64 - 1.0);
            assert!(w3(n, s, s).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn n_two_curve_is_reciprocal() {
        let br = i3_branch(4, 3).unwrap().unwrap();
        let pt = br.at(1.3).unwrap();
        assert!((pt.fields.z.z1 * pt.fields.z.z2 - 1.0).abs() < 1e-14);
        assert!((br.crossing_lambda() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn k4_m3_counts() {
        assert_eq!(solve_i3(&p(4, 0.5), 3).unwrap().count(), 1);
        let r = solve_i3(&p(4, 625.0 / 324.0), 3).unwrap();
        assert_eq!(r.count(), 3);
        assert!(r.max_residual() < 1e-10);
        let asym: Vec<_> = r.asymmetric().collect();
        let hit = asym
            .iter()
            .any(|s| (s.fields.z.z1 - 0.5).abs() < 1e-9 && (s.fields.z.z2 - 2.0).abs() < 1e-9);
        assert!(hit);
        let at = solve_i3(&p(4, 1.0), 3).unwrap();
        assert!(at.critical);
        assert_eq!(at.count(), 1);
    }

    #[test]
    fn short_patterns_are_symmetric_only() {
        assert!(i3_branch(4, 2).unwrap().is_none());
        assert_eq!(solve_i3(&p(5, 10.0), 2).unwrap().count(), 1);
    }

    #[test]
    fn full_pattern_reproduces_ti() {
        let k = 4;
        let crit = critical_lambda(&ActivityGraph::wand(), k).unwrap();
        let br = i3_branch(k, k).unwrap().unwrap();
        assert!((br.crossing_lambda() - crit).abs() < 1e-15);
        let r = solve_i3(&p(k, 1.0 / 40.0), k).unwrap();
        assert_eq!(r.count(), 3);
        assert_eq!(r.solutions[1].label, SolutionLabel::TiAsymmetric);
    }
}
