//! Weakly periodic fixed points restricted to the two-class embedding
//! `q = t`, `p = z`, on which the weakly periodic map for `|A| = i` coincides
//! with the two-class map of pattern `(k - i, i - 1)`.

use super::{solve_i3, solve_i4, solve_ti, ReportBuilder, Scenario, SolutionLabel, SolutionReport};
use crate::error::Result;
use crate::model::{ActivityGraph, ModelParams};
use crate::recursion::WeaklyPeriodicPattern;

/// Translation-invariant solutions plus every embedded `I4` (and, when the
/// embedded pattern has `m = r`, `I3`) solution, verified against the weakly
/// periodic map itself.
pub fn solve_wp(params: &ModelParams, pattern: &WeaklyPeriodicPattern) -> Result<SolutionReport> {
    let agm = pattern.agm_embedding();
    let mut b = ReportBuilder::new(Scenario::Wp { i: pattern.i() }, *params);
    let mut critical = Vec::new();

    let mut reports = vec![
        solve_ti(&ActivityGraph::wand(), params)?,
        solve_i4(params, &agm)?,
    ];
    if agm.m() == agm.r() {
        reports.push(solve_i3(params, agm.m())?);
    }
    for rep in reports {
        critical.extend(rep.critical_lambdas.iter().copied());
        let base = rep.solutions.len();
        let mut idx = Vec::with_capacity(base);
        for s in &rep.solutions {
            let label = if s.label.is_translation_invariant() {
                s.label
            } else {
                SolutionLabel::WeaklyPeriodic
            };
            idx.push(b.push(s.fields, label)?);
        }
        for (i, s) in rep.solutions.iter().enumerate() {
            if let Some(j) = s.pairing {
                b.pair(idx[i], idx[j]);
            }
        }
    }
    critical.sort_by(f64::total_cmp);
    critical.dedup();
    Ok(b.finish(critical))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::critical_lambda;

    #[test]
    fn embedding_yields_translation_invariant_solutions() {
        let k = 4;
        let crit = critical_lambda(&ActivityGraph::wand(), k).unwrap();
        for i in 1..=k {
            let pat = WeaklyPeriodicPattern::new(k, i).unwrap();
            let below = solve_wp(&ModelParams::new(k, crit * 0.5).unwrap(), &pat).unwrap();
            assert_eq!(below.count(), 1);
            let above = solve_wp(&ModelParams::new(k, crit * 2.0).unwrap(), &pat).unwrap();
            assert_eq!(above.count(), 3);
            assert!(above
                .solutions
                .iter()
                .all(|s| s.label.is_translation_invariant()));
            assert!(above.max_residual() < 1e-10);
        }
    }
}
