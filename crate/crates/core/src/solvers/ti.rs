//! Translation-invariant fixed points for the wand and hinge graphs.
//!
//! Asymmetric solutions `(x, y)` are parameterized by `t = (1+x)/(1+y) != 1`:
//! then `y = 1 / (t + t^2 + ... + t^{k-1})`, `x = t^k y` for both graphs, and
//! the activity is an explicit function `lambda(t)` that is symmetric under
//! `t -> 1/t`, decreasing on `(0, 1)` and increasing on `(1, inf)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::roots::{bisect, expand_down, expand_up};
use super::{is_critical, ReportBuilder, Scenario, SolutionLabel, SolutionReport};
use crate::error::{Error, Result};
use crate::model::{ActivityGraph, GraphPreset, ModelParams};
use crate::recursion::{ipow, BoundaryField, FieldVector4};

fn preset_of(graph: &ActivityGraph) -> Result<GraphPreset> {
    graph
        .preset_tag()
        .ok_or_else(|| Error::UnsupportedGraph(graph.name().to_string()))
}

/// Closed-form critical activity as an exact rational:
/// `2^k / ((k-1) k^k)` for wand, `(k+1)^k / ((k-1) k^k)` for hinge.
pub fn critical_lambda_exact(graph: &ActivityGraph, k: u32) -> Result<BigRational> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be >= 2, got {k}")));
    }
    let base: BigInt = match preset_of(graph)? {
        GraphPreset::Wand => 2.into(),
        GraphPreset::Hinge => (k + 1).into(),
    };
    let kk = BigInt::from(k);
    let num = num_traits::pow(base, k as usize);
    let den = BigInt::from(k - 1) * num_traits::pow(kk, k as usize);
    Ok(BigRational::new(num, den))
}

pub fn critical_lambda(graph: &ActivityGraph, k: u32) -> Result<f64> {
    critical_lambda_exact(graph, k)?
        .to_f64()
        .ok_or_else(|| Error::InvalidParameter("critical activity not representable".into()))
}

/// Ratio `r(z)` with `z = lambda r(z)^k` for symmetric fields.
fn symmetric_ratio(preset: GraphPreset, z: f64) -> f64 {
    match preset {
        GraphPreset::Wand => (1.0 + z) / (2.0 * z),
        GraphPreset::Hinge => (1.0 + z) / (1.0 + 2.0 * z),
    }
}

/// Unique positive `z` with `z = lambda r(z)^k` (`r(z) = (1+z)/(2z)` for wand,
/// `(1+z)/(1+2z)` for hinge). `z / r(z)^k` is strictly increasing, so plain
/// bisection on a log-expanded bracket finds it.
pub fn solve_symmetric(graph: &ActivityGraph, params: &ModelParams) -> Result<f64> {
    let preset = preset_of(graph)?;
    let (k, lam) = (params.k(), params.lambda());
    let f = |z: f64| z.ln() - lam.ln() - k as f64 * symmetric_ratio(preset, z).ln();
    let hi = expand_up(f, 1.0, 1.0).ok_or(Error::InvalidParameter("no upper bracket".into()))?;
    let lo = expand_down(f, 1.0, -1.0).ok_or(Error::InvalidParameter("no lower bracket".into()))?;
    let z = bisect(f, lo, hi).ok_or(Error::InvalidParameter("bisection failed".into()))?;
    // Polish against the untransformed equation.
    let g = |z: f64| z - lam * ipow(symmetric_ratio(preset, z), k);
    let candidates = [z, z * (1.0 - f64::EPSILON), z * (1.0 + f64::EPSILON)];
    Ok(candidates
        .into_iter()
        .min_by(|a, b| g(*a).abs().total_cmp(&g(*b).abs()))
        .unwrap())
}

fn power_sum(t: f64, from: u32, to: u32) -> f64 {
    (from..=to).map(|i| ipow(t, i)).sum()
}

/// Wand activity along the asymmetric branch:
/// `(t^k + 1)^k / ((t + ... + t^{k-1}) (1 + ... + t^{k-1})^k)`.
pub fn lambda_of_t(t: f64, k: u32) -> f64 {
    let s1 = power_sum(t, 1, k - 1);
    let s0 = power_sum(t, 0, k - 1);
    ipow((ipow(t, k) + 1.0) / s0, k) / s1
}

/// Hinge activity along the asymmetric branch:
/// `(1 + ... + t^k)^k / ((t + ... + t^{k-1}) (1 + ... + t^{k-1})^k)`.
pub fn hinge_lambda_of_t(t: f64, k: u32) -> f64 {
    let s1 = power_sum(t, 1, k - 1);
    let s0 = power_sum(t, 0, k - 1);
    ipow(power_sum(t, 0, k) / s0, k) / s1
}

/// The asymmetric pair `(x, y)` belonging to branch parameter `t`.
pub fn ti_pair_from_t(t: f64, k: u32) -> (f64, f64) {
    let y = 1.0 / power_sum(t, 1, k - 1);
    (ipow(t, k) * y, y)
}

/// All translation-invariant fixed points for the wand or hinge graph.
///
/// Below or at the critical activity only the symmetric solution exists; above
/// it the pair `(x, y)`, `(y, x)` from the unique `t > 1` on the branch is added.
pub fn solve_ti(graph: &ActivityGraph, params: &ModelParams) -> Result<SolutionReport> {
    let preset = preset_of(graph)?;
    let (k, lam) = (params.k(), params.lambda());
    let crit = critical_lambda(graph, k)?;
    let mut b = ReportBuilder::new(Scenario::ti(preset), *params);

    let z = solve_symmetric(graph, params)?;
    b.push(
        FieldVector4::from_ti(BoundaryField::symmetric(z)),
        SolutionLabel::TiSymmetric,
    )?;

    if lam > crit && !is_critical(lam, &[crit]) {
        let curve = |t: f64| match preset {
            GraphPreset::Wand => lambda_of_t(t, k),
            GraphPreset::Hinge => hinge_lambda_of_t(t, k),
        };
        let g = |t: f64| curve(t).ln() - lam.ln();
        let hi = expand_up(g, 2.0, 1.0).ok_or(Error::InvalidParameter("no t bracket".into()))?;
        let t = bisect(g, 1.0, hi).ok_or(Error::InvalidParameter("t bisection failed".into()))?;
        let (x, y) = ti_pair_from_t(t, k);
        let a = b.push(
            FieldVector4::from_ti(BoundaryField { z1: x, z2: y }),
            SolutionLabel::TiAsymmetric,
        )?;
        let c = b.push(
            FieldVector4::from_ti(BoundaryField { z1: y, z2: x }),
            SolutionLabel::TiAsymmetric,
        )?;
        b.pair(a, c);
    }
    Ok(b.finish(vec![crit]))
}
