//! Exact finite-volume measures by exhaustive enumeration.
//!
//! For a volume `V_n` with primed boundary fields `z'` on the outer sphere
//! `W_n`, a configuration `s` has weight
//! `lambda^(occupied vertices inside V_(n-1)) * prod_(x in W_n) w_x(s(x))`
//! with `w_x = (1, z'_1x, z'_2x)`: an occupied boundary vertex contributes
//! `lambda * z'/lambda`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActivityGraph, Configuration, FieldAssignment, FiniteVolume, RootDegree, Spin};
use crate::recursion::{generic_step, BoundaryField};
use crate::solvers::roots::CompensatedSum;

/// Default cap on `3^|V|`.
pub const DEFAULT_BUDGET: u128 = 43_046_721; // 3^16

fn check_budget(volume: &FiniteVolume, budget: u128) -> Result<()> {
    let required = u32::try_from(volume.len())
        .ok()
        .and_then(|n| 3u128.checked_pow(n))
        .unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded {
            vertices: volume.len(),
            required,
            budget,
        });
    }
    Ok(())
}

/// All admissible configurations of a volume, in lexicographic order of the
/// breadth-first vertex sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    configurations: Vec<Configuration>,
}

impl Enumeration {
    pub fn count(&self) -> usize {
        self.configurations.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Configuration> {
        self.configurations.iter()
    }

    pub fn into_vec(self) -> Vec<Configuration> {
        self.configurations
    }
}

impl IntoIterator for Enumeration {
    type Item = Configuration;
    type IntoIter = std::vec::IntoIter<Configuration>;
    fn into_iter(self) -> Self::IntoIter {
        self.configurations.into_iter()
    }
}

fn extend(
    graph: &ActivityGraph,
    volume: &FiniteVolume,
    spins: &mut Vec<Spin>,
    out: &mut Vec<Configuration>,
) {
    let v = spins.len();
    if v == volume.len() {
        out.push(Configuration::new(spins.clone()).expect("spins are in range"));
        return;
    }
    let parent = spins[volume.parent(v).expect("non-root vertex")];
    for s in 0..3 {
        if graph.allows(parent, s) {
            spins.push(s);
            extend(graph, volume, spins, out);
            spins.pop();
        }
    }
}

/// Exhaustive depth-first enumeration, partitioned by the root spin.
pub fn enumerate_admissible(graph: &ActivityGraph, volume: &FiniteVolume) -> Result<Enumeration> {
    enumerate_admissible_within(graph, volume, DEFAULT_BUDGET)
}

pub fn enumerate_admissible_within(
    graph: &ActivityGraph,
    volume: &FiniteVolume,
    budget: u128,
) -> Result<Enumeration> {
    check_budget(volume, budget)?;
    let parts: Vec<Vec<Configuration>> = (0..3u8)
        .into_par_iter()
        .map(|root| {
            let mut out = Vec::new();
            let mut spins = vec![root];
            extend(graph, volume, &mut spins, &mut out);
            out
        })
        .collect();
    Ok(Enumeration {
        configurations: parts.into_iter().flatten().collect(),
    })
}

/// Number of admissible configurations by dynamic programming over the tree;
/// no enumeration budget applies.
pub fn count_admissible(graph: &ActivityGraph, volume: &FiniteVolume) -> u128 {
    let mut counts = vec![[1u128; 3]; volume.len()];
    for v in (0..volume.len()).rev() {
        let mut c = [1u128; 3];
        for child in volume.children(v) {
            for (s, cs) in c.iter_mut().enumerate() {
                let sub: u128 = (0..3)
                    .filter(|&j| graph.allows(s as Spin, j as Spin))
                    .map(|j| counts[child][j])
                    .sum();
                *cs *= sub;
            }
        }
        counts[v] = c;
    }
    counts[0].iter().sum()
}

/// The probability measure on admissible configurations of a finite volume.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasure {
    pub volume: FiniteVolume,
    pub graph: ActivityGraph,
    pub lambda: f64,
    /// Primed fields on `W_n`, in vertex order.
    pub boundary_fields: Vec<BoundaryField>,
    pub configurations: Vec<Configuration>,
    pub probabilities: Vec<f64>,
    pub partition: f64,
}

impl FiniteMeasure {
    pub fn len(&self) -> usize {
        self.configurations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configurations.is_empty()
    }

    pub fn total_probability(&self) -> f64 {
        let mut acc = CompensatedSum::default();
        for &p in &self.probabilities {
            acc.add(p);
        }
        acc.value()
    }

    pub fn probability_of(&self, config: &Configuration) -> f64 {
        self.configurations
            .iter()
            .position(|c| c == config)
            .map_or(0.0, |i| self.probabilities[i])
    }

    /// Marginal law of the first `len` vertices (a prefix in breadth-first order).
    fn prefix_marginal(&self, len: usize) -> HashMap<Vec<Spin>, f64> {
        let mut acc: HashMap<Vec<Spin>, CompensatedSum> = HashMap::new();
        for (c, &p) in self.configurations.iter().zip(&self.probabilities) {
            acc.entry(c.spins()[..len].to_vec()).or_default().add(p);
        }
        acc.into_iter().map(|(k, v)| (k, v.value())).collect()
    }
}

/// Weight of one configuration; see the module documentation.
fn weight(volume: &FiniteVolume, lambda: f64, boundary: &[BoundaryField], spins: &[Spin]) -> f64 {
    let b = volume.boundary();
    let inner_occupied = spins[..b.start].iter().filter(|&&s| s != 0).count() as i32;
    let mut w = lambda.powi(inner_occupied);
    for (f, &s) in boundary.iter().zip(&spins[b]) {
        w *= f.weights()[s as usize];
    }
    w
}

pub fn finite_measure(
    graph: &ActivityGraph,
    volume: &FiniteVolume,
    lambda: f64,
    boundary_fields: &[BoundaryField],
) -> Result<FiniteMeasure> {
    finite_measure_within(graph, volume, lambda, boundary_fields, DEFAULT_BUDGET)
}

pub fn finite_measure_within(
    graph: &ActivityGraph,
    volume: &FiniteVolume,
    lambda: f64,
    boundary_fields: &[BoundaryField],
    budget: u128,
) -> Result<FiniteMeasure> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let nb = volume.boundary().len();
    if boundary_fields.len() != nb {
        return Err(Error::InvalidParameter(format!(
            "{} boundary fields for a sphere of {nb} vertices",
            boundary_fields.len()
        )));
    }
    if let Some(f) = boundary_fields.iter().find(|f| !f.is_valid()) {
        return Err(Error::InvalidParameter(format!(
            "boundary field {f:?} is not positive"
        )));
    }
    let configurations = enumerate_admissible_within(graph, volume, budget)?.into_vec();
    let weights: Vec<f64> = configurations
        .iter()
        .map(|c| weight(volume, lambda, boundary_fields, c.spins()))
        .collect();
    let mut z = CompensatedSum::default();
    for &w in &weights {
        z.add(w);
    }
    let partition = z.value();
    let probabilities = weights.iter().map(|w| w / partition).collect();
    Ok(FiniteMeasure {
        volume: volume.clone(),
        graph: *graph,
        lambda,
        boundary_fields: boundary_fields.to_vec(),
        configurations,
        probabilities,
        partition,
    })
}

/// Probabilities of states `0, 1, 2` at `vertex`.
pub fn exact_marginal(measure: &FiniteMeasure, vertex: usize) -> Result<[f64; 3]> {
    if vertex >= measure.volume.len() {
        return Err(Error::UnknownVertex {
            vertex,
            size: measure.volume.len(),
        });
    }
    let mut acc: [CompensatedSum; 3] = Default::default();
    for (c, &p) in measure.configurations.iter().zip(&measure.probabilities) {
        acc[c.spins()[vertex] as usize].add(p);
    }
    Ok(acc.map(|a| a.value()))
}

/// Largest absolute difference between the `V_(n-1)` marginal of `mu_n` and
/// `mu_(n-1)`, where `fields` holds a field for every vertex of `V_n`:
/// `mu_n` uses those on `W_n` and `mu_(n-1)` those on `W_(n-1)`.
pub fn check_consistency(
    graph: &ActivityGraph,
    volume: &FiniteVolume,
    lambda: f64,
    fields: &[BoundaryField],
) -> Result<f64> {
    check_consistency_within(graph, volume, lambda, fields, DEFAULT_BUDGET)
}

pub fn check_consistency_within(
    graph: &ActivityGraph,
    volume: &FiniteVolume,
    lambda: f64,
    fields: &[BoundaryField],
    budget: u128,
) -> Result<f64> {
    if fields.len() != volume.len() {
        return Err(Error::InvalidParameter(format!(
            "{} fields for a volume of {} vertices",
            fields.len(),
            volume.len()
        )));
    }
    let small = volume.shrink()?;
    let big = finite_measure_within(graph, volume, lambda, &fields[volume.boundary()], budget)?;
    let little = finite_measure_within(graph, &small, lambda, &fields[small.boundary()], budget)?;
    let mut marg = big.prefix_marginal(small.len());
    let mut defect = 0.0f64;
    for (c, &p) in little.configurations.iter().zip(&little.probabilities) {
        let q = marg.remove(c.spins()).unwrap_or(0.0);
        defect = defect.max((q - p).abs());
    }
    // Mass of mu_n on prefixes that mu_(n-1) does not support.
    for q in marg.into_values() {
        defect = defect.max(q.abs());
    }
    Ok(defect)
}

/// Fills every vertex above `W_n` by one recursion step from its children,
/// starting from `boundary` on `W_n`. Fields built this way are consistent
/// for any positive boundary.
pub fn propagate_fields(
    graph: &ActivityGraph,
    volume: &FiniteVolume,
    lambda: f64,
    boundary: &[BoundaryField],
) -> Result<Vec<BoundaryField>> {
    let b = volume.boundary();
    if boundary.len() != b.len() {
        return Err(Error::InvalidParameter(format!(
            "{} boundary fields for a sphere of {} vertices",
            boundary.len(),
            b.len()
        )));
    }
    let mut fields = vec![BoundaryField::symmetric(1.0); volume.len()];
    fields[b.clone()].copy_from_slice(boundary);
    for v in (0..b.start).rev() {
        fields[v] = generic_step(graph, lambda, &fields[volume.children(v)])?;
    }
    Ok(fields)
}

/// Fields of `assignment` on every vertex. On a full-tree root, which has
/// `k + 1` children rather than `k`, the root field is recomputed from its
/// children so that a fixed point of the `k`-child recursion stays consistent.
pub fn assignment_fields(
    graph: &ActivityGraph,
    volume: &FiniteVolume,
    lambda: f64,
    assignment: &FieldAssignment,
) -> Result<Vec<BoundaryField>> {
    let mut fields = assignment.fields_on(volume)?;
    if volume.root_degree() == RootDegree::Full && volume.n() >= 1 {
        fields[0] = generic_step(graph, lambda, &fields[volume.children(0)])?;
    }
    Ok(fields)
}

/// Schema tag of the regression fixture file.
pub const FIXTURE_SCHEMA: &str = "hctree-oracle-fixture/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureFile {
    pub schema: String,
    pub entries: Vec<FixtureEntry>,
}

/// Exact results for a uniform boundary field on one volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub graph: String,
    pub k: u32,
    pub n: u32,
    pub root: RootDegree,
    pub lambda: f64,
    pub field: BoundaryField,
    pub admissible_count: u64,
    pub partition: f64,
    pub marginals: Vec<[f64; 3]>,
}

pub fn fixture_entry(
    graph: &ActivityGraph,
    volume: &FiniteVolume,
    lambda: f64,
    field: BoundaryField,
) -> Result<FixtureEntry> {
    let boundary = vec![field; volume.boundary().len()];
    let m = finite_measure(graph, volume, lambda, &boundary)?;
    let marginals = (0..volume.len())
        .map(|v| exact_marginal(&m, v))
        .collect::<Result<_>>()?;
    Ok(FixtureEntry {
        graph: graph.name().to_string(),
        k: volume.k(),
        n: volume.n(),
        root: volume.root_degree(),
        lambda,
        field,
        admissible_count: m.len() as u64,
        partition: m.partition,
        marginals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vol(k: u32, n: u32, root: RootDegree) -> FiniteVolume {
        FiniteVolume::new(k, n, root).unwrap()
    }

    #[test]
    fn small_counts() {
        let w = ActivityGraph::wand();
        let h = ActivityGraph::hinge();
        let v0 = vol(2, 0, RootDegree::Half);
        assert_eq!(enumerate_admissible(&w, &v0).unwrap().count(), 3);
        let v1 = vol(2, 1, RootDegree::Half);
        let cw = enumerate_admissible(&w, &v1).unwrap().count();
        let ch = enumerate_admissible(&h, &v1).unwrap().count();
        assert_eq!(cw, 12);
        assert!(ch > cw);
        for v in [v1, vol(2, 2, RootDegree::Full), vol(3, 2, RootDegree::Half)] {
            assert_eq!(
                enumerate_admissible(&h, &v).unwrap().count() as u128,
                count_admissible(&h, &v)
            );
        }
    }

    #[test]
    fn budget_is_enforced() {
        let v = vol(2, 4, RootDegree::Half);
        let err = enumerate_admissible_within(&ActivityGraph::wand(), &v, 1000).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { vertices: 31, .. }));
    }

    #[test]
    fn single_vertex_measures() {
        let w = ActivityGraph::wand();
        let v0 = vol(2, 0, RootDegree::Half);
        let m = finite_measure(&w, &v0, 1.0, &[BoundaryField::symmetric(1.0)]).unwrap();
        for p in exact_marginal(&m, 0).unwrap() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        let m = finite_measure(&w, &v0, 2.0, &[BoundaryField::symmetric(2.0)]).unwrap();
        let p = exact_marginal(&m, 0).unwrap();
        assert!((p[0] - 0.2).abs() < 1e-15 && (p[1] - 0.4).abs() < 1e-15);
        assert!(matches!(
            exact_marginal(&m, 1),
            Err(Error::UnknownVertex { .. })
        ));
    }

    #[test]
    fn unit_weights_count_configurations() {
        let h = ActivityGraph::hinge();
        let v = vol(2, 2, RootDegree::Half);
        let m = finite_measure(&h, &v, 1.0, &vec![BoundaryField::symmetric(1.0); 4]).unwrap();
        assert_eq!(m.partition, m.len() as f64);
        assert!((m.total_probability() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn propagated_fields_are_consistent() {
        let w = ActivityGraph::wand();
        let v = vol(2, 2, RootDegree::Full);
        let boundary: Vec<_> = (0..6)
            .map(|i| BoundaryField::new(0.3 + i as f64, 2.0 / (1.0 + i as f64)).unwrap())
            .collect();
        let f = propagate_fields(&w, &v, 0.7, &boundary).unwrap();
        assert!(check_consistency(&w, &v, 0.7, &f).unwrap() < 1e-14);
        let mut bad = f.clone();
        bad[1] = bad[1].scaled(1.5);
        assert!(check_consistency(&w, &v, 0.7, &bad).unwrap() > 1e-4);
    }
}
