//! Independent fixed-point search by multistart Newton in log coordinates.
//!
//! This does not use any of the curve parameterizations of the other solvers,
//! which makes it a cross-check for them. It can miss solutions outside the
//! seeded window, so it is a verification aid and not a solver of record.

use super::roots::newton2;
use super::{solve_symmetric, DEDUP_TOL};
use crate::error::Result;
use crate::model::{ActivityGraph, ModelParams};
use crate::recursion::{i3_map, i4_map, rel_defect, ti_map, AgmPattern, BoundaryField};

/// Seeds per axis and half-width of the seeded window in `ln` units around the
/// symmetric solution.
const SEEDS: usize = 20;
const WINDOW: f64 = 12.0;

fn scan<G: Fn([f64; 2]) -> Option<[f64; 2]>>(map: G, center: f64) -> Vec<[f64; 2]> {
    let g = |v: [f64; 2]| {
        let p = [v[0].exp(), v[1].exp()];
        match map(p) {
            Some(img) if img[0] > 0.0 && img[1] > 0.0 => [img[0].ln() - v[0], img[1].ln() - v[1]],
            _ => [f64::NAN, f64::NAN],
        }
    };
    let c = center.ln();
    let axis: Vec<f64> = (0..SEEDS)
        .map(|i| c - WINDOW + 2.0 * WINDOW * i as f64 / (SEEDS - 1) as f64)
        .collect();
    let mut found: Vec<[f64; 2]> = Vec::new();
    for &a in &axis {
        for &b in &axis {
            if let Some(v) = newton2(g, [a, b], 1e-13) {
                let p = [v[0].exp(), v[1].exp()];
                if !found.iter().any(|q| rel_defect(q, &p) <= 1e3 * DEDUP_TOL) {
                    found.push(p);
                }
            }
        }
    }
    found.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    found
}

/// Translation-invariant solutions `(z1, z2)`.
pub fn scan_ti(graph: &ActivityGraph, params: &ModelParams) -> Result<Vec<BoundaryField>> {
    let center = solve_symmetric(graph, params)?;
    let map = |p: [f64; 2]| {
        ti_map(graph, params, &BoundaryField { z1: p[0], z2: p[1] })
            .ok()
            .map(|f| f.as_array())
    };
    Ok(scan(map, center)
        .into_iter()
        .map(|p| BoundaryField { z1: p[0], z2: p[1] })
        .collect())
}

/// `I3` solutions `(z1, z2)` for pattern `(m, m)`.
pub fn scan_i3(params: &ModelParams, m: u32) -> Result<Vec<BoundaryField>> {
    let center = solve_symmetric(&ActivityGraph::wand(), params)?;
    let map =
        |p: [f64; 2]| Some(i3_map(params, m, &BoundaryField { z1: p[0], z2: p[1] }).as_array());
    Ok(scan(map, center)
        .into_iter()
        .map(|p| BoundaryField { z1: p[0], z2: p[1] })
        .collect())
}

/// `I4` solutions `(z, t)`.
pub fn scan_i4(params: &ModelParams, pattern: &AgmPattern) -> Result<Vec<(f64, f64)>> {
    let center = solve_symmetric(&ActivityGraph::wand(), params)?;
    let map = |p: [f64; 2]| {
        let (z, t) = i4_map(params, pattern, p[0], p[1]);
        Some([z, t])
    };
    Ok(scan(map, center)
        .into_iter()
        .map(|p| (p[0], p[1]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_reciprocal_pair_k4() {
        let params = ModelParams::new(4, 0.64).unwrap();
        let found = scan_i4(&params, &AgmPattern::new(4, 1, 1).unwrap()).unwrap();
        assert_eq!(found.len(), 3);
    }

    #[test]
    fn finds_ti_triple() {
        let params = ModelParams::new(3, 1.0).unwrap();
        assert_eq!(scan_ti(&ActivityGraph::wand(), &params).unwrap().len(), 3);
        let below = ModelParams::new(3, 0.1).unwrap();
        assert_eq!(scan_ti(&ActivityGraph::wand(), &below).unwrap().len(), 1);
    }
}
