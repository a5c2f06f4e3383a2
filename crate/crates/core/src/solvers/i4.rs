//! Fixed points on `I4 = {z1 = z2 = z, t1 = t2 = t}` of the two-class map.
//!
//! Writing `Q(x) = (1+x)/(2x)`, the system is `z = lambda Q(z)^m Q(t)^(k-m)`,
//! `t = lambda Q(t)^r Q(z)^(k-r)`. Its quotient reduces to `g(z) = g(t)` with
//! `g(x) = x^(1-N) (1+x)^N` and `N = k - m - r`. For `N >= 2`, `g` has a single
//! minimum at `x0 = N - 1`, so off the diagonal each `z` has exactly one
//! partner `t` on the other side of `x0` and the asymmetric solutions form a
//! single curve.

use super::branch::{Branch, BranchPoint};
use super::cubic::{solve_cubic, CubicRoots};
use super::i3::{binomial, h2};
use super::roots::{bisect, expand_down, expand_up, golden_min};
use super::{is_critical, ReportBuilder, Scenario, SolutionLabel, SolutionReport};
use crate::error::Result;
use crate::model::{ActivityGraph, ModelParams};
use crate::recursion::{ipow, sym_ratio, AgmPattern, FieldVector4};
use crate::solvers::solve_symmetric;
use serde::{Deserialize, Serialize};

/// Off-diagonal factor of `g(z) - g(t)` after clearing denominators.
fn w4(n: u32, z: f64, t: f64) -> f64 {
    let p = z * t;
    let tail: f64 = (0..=n - 2)
        .map(|j| binomial(n, j) * ipow(p, j) * h2(n - 2 - j, z, t))
        .sum();
    ipow(p, n - 1) - tail
}

fn lambda_on_curve(k: u32, m: u32, z: f64, t: f64) -> f64 {
    z / (ipow(sym_ratio(z), m) * ipow(sym_ratio(t), k - m))
}

/// The curve of asymmetric `I4` fixed points, or `None` when `m + r >= k - 1`.
/// The parameter is `u = ln(z / x0)`; both signs are sampled.
pub fn i4_branch(pattern: &AgmPattern) -> Option<Branch> {
    let n = -pattern.n_i4();
    if n < 2 {
        return None;
    }
    let n = n as u32;
    let (k, m) = (pattern.k(), pattern.m());
    let x0 = n as f64 - 1.0;
    let eval = move |u: f64| -> Option<BranchPoint> {
        if u == 0.0 {
            return None;
        }
        let z = x0 * u.exp();
        let g = |t: f64| w4(n, z, t);
        let t = if u < 0.0 {
            let hi = expand_up(g, x0, 1.0)?;
            bisect(g, x0, hi)?
        } else {
            let lo = expand_down(g, x0, -1.0)?;
            bisect(g, lo, x0)?
        };
        Some(BranchPoint {
            u,
            fields: FieldVector4::from_i4(z, t),
            lambda: lambda_on_curve(k, m, z, t),
        })
    };
    let crossing = x0 / ipow(sym_ratio(x0), k);
    Some(Branch::new(eval, true, true, crossing))
}

fn label_of(pattern: &AgmPattern) -> SolutionLabel {
    if pattern.m() == 0 && pattern.r() == 0 {
        SolutionLabel::Periodic
    } else {
        SolutionLabel::AgmI4
    }
}

fn start(params: &ModelParams, pattern: &AgmPattern) -> Result<ReportBuilder> {
    let mut b = ReportBuilder::new(
        Scenario::I4 {
            m: pattern.m(),
            r: pattern.r(),
        },
        *params,
    );
    let z = solve_symmetric(&ActivityGraph::wand(), params)?;
    b.push(FieldVector4::from_i4(z, z), SolutionLabel::TiSymmetric)?;
    Ok(b)
}

/// Pushes asymmetric candidates, pairing `(z, t)` with `(t, z)` when `m = r`.
fn push_all(b: &mut ReportBuilder, pattern: &AgmPattern, points: &[(f64, f64)]) -> Result<()> {
    let label = label_of(pattern);
    let mut idx = Vec::new();
    for &(z, t) in points {
        idx.push((z, t, b.push(FieldVector4::from_i4(z, t), label)?));
    }
    if pattern.m() == pattern.r() {
        for &(z, t, i) in &idx {
            if let Some(&(_, _, j)) = idx
                .iter()
                .find(|&&(z2, t2, _)| (z2 - t).abs() <= 1e-8 * t && (t2 - z).abs() <= 1e-8 * z)
            {
                b.pair(i, j);
            }
        }
    }
    Ok(())
}

/// Candidate `(z, t)` points with the critical activities of their family.
type Points = (Vec<(f64, f64)>, Vec<f64>);

/// All `I4` fixed points of `pattern` at `params`. The four small cases with
/// closed forms use them; everything else goes through [`i4_branch`].
pub fn solve_i4(params: &ModelParams, pattern: &AgmPattern) -> Result<SolutionReport> {
    let (k, m, r) = (pattern.k(), pattern.m(), pattern.r());
    let lam = params.lambda();
    let special: Option<Points> = match (k, m.max(r), m.min(r)) {
        (3, 1, 0) => Some(k3_pattern10_points(lam)?),
        (4, 1, 0) => Some(k4_pattern10_points(lam)?),
        (4, 1, 1) => Some(k4_pattern11_points(lam)),
        (4, 2, 0) => Some(k4_pattern20_points(lam)),
        _ => None,
    };
    match special {
        Some((mut points, critical)) => {
            // Closed forms are written for m >= r; the mirrored pattern
            // exchanges the two classes.
            if m < r {
                points = points.into_iter().map(|(z, t)| (t, z)).collect();
            }
            let mut b = start(params, pattern)?;
            push_all(&mut b, pattern, &points)?;
            Ok(b.finish(critical))
        }
        None => solve_i4_with(params, pattern, i4_branch(pattern).as_ref()),
    }
}

/// Solves through the branch curve even where a closed form exists.
pub fn solve_i4_generic(params: &ModelParams, pattern: &AgmPattern) -> Result<SolutionReport> {
    solve_i4_with(params, pattern, i4_branch(pattern).as_ref())
}

pub(crate) fn solve_i4_with(
    params: &ModelParams,
    pattern: &AgmPattern,
    branch: Option<&Branch>,
) -> Result<SolutionReport> {
    let mut b = start(params, pattern)?;
    let Some(branch) = branch else {
        return Ok(b.finish(Vec::new()));
    };
    let points: Vec<(f64, f64)> = branch
        .solve(params.lambda())
        .iter()
        .map(|p| (p.fields.z.z1, p.fields.t.z1))
        .collect();
    push_all(&mut b, pattern, &points)?;
    Ok(b.finish(branch.critical_lambdas()))
}

/// `z^3 + (3 - 8/lambda) z^2 + 3z + 1`, whose positive roots give the
/// asymmetric solutions `(z, 1/z)` for `k = 3`, `(m, r) = (1, 0)`.
pub fn reciprocal_cubic_k3(lambda: f64) -> Result<CubicRoots> {
    solve_cubic(1.0, 3.0 - 8.0 / lambda, 3.0, 1.0)
}

pub const K3_RECIPROCAL_FOLD: f64 = 32.0 / 27.0;

fn k3_pattern10_points(lam: f64) -> Result<Points> {
    let critical = vec![K3_RECIPROCAL_FOLD, 1.0];
    let cubic = reciprocal_cubic_k3(lam)?;
    let mut zs = cubic.positive();
    if is_critical(lam, &[K3_RECIPROCAL_FOLD]) && !cubic.roots.iter().any(|r| r.multiplicity > 1) {
        // Inside the tolerance band the rounded discriminant may have either
        // sign; use the repeated root of the depressed cubic directly.
        let (p, q) = cubic.depressed;
        zs = vec![-3.0 * q / (2.0 * p) + (8.0 / lam - 3.0) / 3.0];
    }
    Ok((zs.into_iter().map(|z| (z, 1.0 / z)).collect(), critical))
}

/// `lambda_3(z) = (24z + 8 + 8 sqrt(4z^3 + 9z^2 + 6z + 1)) z^2 / (1+z)^4`: the
/// activity at which `(z, lambda Q(z)^4)` is an asymmetric fixed point for
/// `k = 4`, `(m, r) = (1, 0)`.
pub fn fold_curve_k4(z: f64) -> f64 {
    let s = (((4.0 * z + 9.0) * z + 6.0) * z + 1.0).sqrt();
    (24.0 * z + 8.0 + 8.0 * s) * z * z / ipow(1.0 + z, 4)
}

/// Maximum of [`fold_curve_k4`], located through the cubic
/// `z^3 - 16z^2 + 41z + 10` on the interval where squaring the stationarity
/// condition is valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMaximum {
    pub maximizer: f64,
    pub lambda: f64,
    pub cubic_roots: Vec<f64>,
    pub bracket: (f64, f64),
    /// Maximizer found by golden-section search, for comparison.
    pub golden_maximizer: f64,
}

pub fn fold_maximum_k4() -> Result<FoldMaximum> {
    let roots = solve_cubic(1.0, -16.0, 41.0, 10.0)?.values();
    let bracket = ((7.0 + 73f64.sqrt()) / 6.0, (9.0 + 97f64.sqrt()) / 4.0);
    let maximizer = roots
        .iter()
        .copied()
        .find(|&z| z >= bracket.0 && z <= bracket.1)
        .ok_or_else(|| crate::Error::Polynomial("no stationary point in bracket".into()))?;
    let (golden_maximizer, _) = golden_min(|z| -fold_curve_k4(z), 1.0, 10.0);
    Ok(FoldMaximum {
        maximizer,
        lambda: fold_curve_k4(maximizer),
        cubic_roots: roots,
        bracket,
        golden_maximizer,
    })
}

fn k4_pattern10_points(lam: f64) -> Result<Points> {
    let crit = fold_maximum_k4()?;
    let critical = vec![crit.lambda, 512.0 / 81.0];
    let t_of = |z: f64| lam * ipow(sym_ratio(z), 4);
    let zs = if is_critical(lam, &[crit.lambda]) {
        vec![crit.maximizer]
    } else if lam < crit.lambda {
        let f = |z: f64| fold_curve_k4(z).ln() - lam.ln();
        let lo = expand_down(f, crit.maximizer, -1.0);
        let hi = expand_up(f, crit.maximizer, -1.0);
        [
            lo.and_then(|lo| bisect(f, lo, crit.maximizer)),
            hi.and_then(|hi| bisect(f, crit.maximizer, hi)),
        ]
        .into_iter()
        .flatten()
        .collect()
    } else {
        Vec::new()
    };
    Ok((zs.into_iter().map(|z| (z, t_of(z))).collect(), critical))
}

/// Roots `(2 - sqrt(l) -/+ 2 sqrt(1 - sqrt(l))) / sqrt(l)` for `k = 4`,
/// `(m, r) = (1, 1)`; real only for `lambda <= 1`.
pub fn reciprocal_pair_k4(lambda: f64) -> Option<(f64, f64)> {
    let s = lambda.sqrt();
    let d = 1.0 - s;
    (d >= 0.0).then(|| {
        let root = 2.0 * d.sqrt();
        ((2.0 - s - root) / s, (2.0 - s + root) / s)
    })
}

fn k4_pattern11_points(lam: f64) -> Points {
    let pts = match reciprocal_pair_k4(lam) {
        Some((a, b)) if !is_critical(lam, &[1.0]) => vec![(a, b), (b, a)],
        _ => Vec::new(),
    };
    (pts, vec![1.0])
}

/// Analysis of `x^4 - 2a x^3 + 1` with `x = z^(1/4)`, `a = lambda^(-1/4)` for
/// `k = 4`, `(m, r) = (2, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarticAnalysis {
    pub a: f64,
    pub x_min: f64,
    pub f_min: f64,
    /// Positive roots in `x`.
    pub roots: Vec<f64>,
}

pub const K4_QUARTIC_FOLD: f64 = 27.0 / 16.0;

pub fn quartic_k4(lambda: f64) -> QuarticAnalysis {
    let a = lambda.powf(-0.25);
    let f = |x: f64| ((x - 2.0 * a) * x * x) * x + 1.0;
    let x_min = 1.5 * a;
    let f_min = 1.0 - 27.0 * ipow(a, 4) / 16.0;
    let roots = if is_critical(lambda, &[K4_QUARTIC_FOLD]) {
        vec![x_min]
    } else if f_min < 0.0 {
        let hi = expand_up(f, 2.0 * x_min.max(1.0), 1.0).unwrap_or(4.0 * a);
        [bisect(f, 0.0, x_min), bisect(f, x_min, hi)]
            .into_iter()
            .flatten()
            .collect()
    } else {
        Vec::new()
    };
    QuarticAnalysis {
        a,
        x_min,
        f_min,
        roots,
    }
}

fn k4_pattern20_points(lam: f64) -> Points {
    let q = quartic_k4(lam);
    let pts = q
        .roots
        .iter()
        .map(|&x| {
            let z = ipow(x, 4);
            (z, 1.0 / z)
        })
        .collect();
    (pts, vec![K4_QUARTIC_FOLD, 1.0])
}
