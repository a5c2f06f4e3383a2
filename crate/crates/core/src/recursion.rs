//! Boundary-law maps in normalized coordinates (`z0 = 1`).
//!
//! Every map here is a pure function of its inputs. Field components are the
//! primed fields `z'_i = lambda * z_i / z_0`, so each map is a direct
//! transcription of the compatibility recursion for the corresponding
//! field pattern. Integer powers go through [`ipow`] (binary exponentiation).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActivityGraph, ModelParams};

/// `x^n` by repeated squaring.
#[inline]
pub fn ipow(mut x: f64, mut n: u32) -> f64 {
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= x;
        }
        x *= x;
        n >>= 1;
    }
    acc
}

/// Largest relative component difference `|a_i - b_i| / |b_i|`.
pub fn rel_defect(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// Normalized occupied-state weights `(z1, z2)` of one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryField {
    pub z1: f64,
    pub z2: f64,
}

impl BoundaryField {
    pub fn new(z1: f64, z2: f64) -> Result<Self> {
        let f = Self { z1, z2 };
        if !f.is_valid() {
            return Err(Error::InvalidParameter(format!(
                "boundary field ({z1}, {z2}) must be positive and finite"
            )));
        }
        Ok(f)
    }

    pub fn symmetric(z: f64) -> Self {
        Self { z1: z, z2: z }
    }

    pub fn is_valid(&self) -> bool {
        self.z1.is_finite() && self.z2.is_finite() && self.z1 > 0.0 && self.z2 > 0.0
    }

    pub fn swapped(&self) -> Self {
        Self {
            z1: self.z2,
            z2: self.z1,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            z1: self.z1 * s,
            z2: self.z2 * s,
        }
    }

    /// Weight vector `(1, z1, z2)` indexed by spin.
    pub fn weights(&self) -> [f64; 3] {
        [1.0, self.z1, self.z2]
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.z1, self.z2]
    }

    /// Wand ratios `((1+z1)/(z1+z2), (1+z2)/(z1+z2))`.
    #[inline]
    fn wand_ratios(&self) -> (f64, f64) {
        let s = self.z1 + self.z2;
        ((1.0 + self.z1) / s, (1.0 + self.z2) / s)
    }
}

impl fmt::Display for BoundaryField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.z1, self.z2)
    }
}

/// Child-class counts `M = [[m, k-m], [r, k-r]]` of the two-class half-tree
/// assignment: a `z` vertex has `m` children of class `z`, a `t` vertex has
/// `r` children of class `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AgmPattern {
    k: u32,
    m: u32,
    r: u32,
}

impl AgmPattern {
    pub fn new(k: u32, m: u32, r: u32) -> Result<Self> {
        if k < 1 || m > k || r > k {
            return Err(Error::InvalidParameter(format!(
                "pattern requires 0 <= m, r <= k, got k={k}, m={m}, r={r}"
            )));
        }
        Ok(Self { k, m, r })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// `2m - k`, the exponent index on `I3`.
    pub fn n_i3(&self) -> i64 {
        2 * self.m as i64 - self.k as i64
    }

    /// `m + r - k`, the exponent index on `I4`.
    pub fn n_i4(&self) -> i64 {
        self.m as i64 + self.r as i64 - self.k as i64
    }

    /// The pattern obtained by exchanging the roles of `z` and `t`.
    pub fn swapped(&self) -> Self {
        Self {
            k: self.k,
            m: self.r,
            r: self.m,
        }
    }
}

/// Index-two weakly periodic pattern, identified by `i = |A|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeaklyPeriodicPattern {
    k: u32,
    i: u32,
}

impl WeaklyPeriodicPattern {
    /// `i = k + 1` (A equal to all generators) is plain periodicity and is rejected.
    pub fn new(k: u32, i: u32) -> Result<Self> {
        if i < 1 || i > k {
            return Err(Error::InvalidParameter(format!(
                "weakly periodic pattern requires 1 <= i <= k, got k={k}, i={i}"
            )));
        }
        Ok(Self { k, i })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    /// The two-class pattern `(m, r) = (k - i, i - 1)` it reduces to when `z = p`, `q = t`.
    pub fn agm_embedding(&self) -> AgmPattern {
        AgmPattern {
            k: self.k,
            m: self.k - self.i,
            r: self.i - 1,
        }
    }
}

/// Two fields `(z, t)` of the two-class assignment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldVector4 {
    pub z: BoundaryField,
    pub t: BoundaryField,
}

impl FieldVector4 {
    pub fn new(z1: f64, z2: f64, t1: f64, t2: f64) -> Self {
        Self {
            z: BoundaryField { z1, z2 },
            t: BoundaryField { z1: t1, z2: t2 },
        }
    }

    /// Translation-invariant field embedded as `z = t`.
    pub fn from_ti(f: BoundaryField) -> Self {
        Self { z: f, t: f }
    }

    /// `I3` point `(z1, z2, z2, z1)`.
    pub fn from_i3(f: BoundaryField) -> Self {
        Self {
            z: f,
            t: f.swapped(),
        }
    }

    /// `I4` point `(z, z, t, t)`.
    pub fn from_i4(z: f64, t: f64) -> Self {
        Self::new(z, z, t, t)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.z.z1, self.z.z2, self.t.z1, self.t.z2]
    }

    pub fn is_valid(&self) -> bool {
        self.z.is_valid() && self.t.is_valid()
    }

    /// Swaps spins 1 <-> 2 in both fields.
    pub fn spin_swapped(&self) -> Self {
        Self {
            z: self.z.swapped(),
            t: self.t.swapped(),
        }
    }

    /// Exchanges the two classes.
    pub fn class_swapped(&self) -> Self {
        Self {
            z: self.t,
            t: self.z,
        }
    }
}

/// Four fields `(z, t, q, p)` of the weakly periodic assignment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldVector8 {
    pub z: BoundaryField,
    pub t: BoundaryField,
    pub q: BoundaryField,
    pub p: BoundaryField,
}

impl FieldVector8 {
    /// The `I3`-type point `z = p`, `q = t`.
    pub fn from_agm(v: FieldVector4) -> Self {
        Self {
            z: v.z,
            t: v.t,
            q: v.t,
            p: v.z,
        }
    }

    pub fn as_array(&self) -> [f64; 8] {
        [
            self.z.z1, self.z.z2, self.t.z1, self.t.z2, self.q.z1, self.q.z2, self.p.z1, self.p.z2,
        ]
    }
}

/// Invariant subsets of the two-class map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InvariantSet {
    I1,
    I2,
    I3,
    I4,
}

/// One step of the general recursion at a vertex whose children carry `child_fields`.
pub fn generic_step(
    graph: &ActivityGraph,
    lambda: f64,
    child_fields: &[BoundaryField],
) -> Result<BoundaryField> {
    let mut out = [lambda, lambda];
    for y in child_fields {
        let w = y.weights();
        let row = |i: u8| {
            (0..3u8)
                .map(|j| graph.a(i, j) as f64 * w[j as usize])
                .sum::<f64>()
        };
        let den = row(0);
        if den <= 0.0 || !den.is_finite() {
            return Err(Error::SingularField);
        }
        out[0] *= row(1) / den;
        out[1] *= row(2) / den;
    }
    Ok(BoundaryField {
        z1: out[0],
        z2: out[1],
    })
}

/// Translation-invariant map: `generic_step` with `k` identical children.
pub fn ti_map(
    graph: &ActivityGraph,
    params: &ModelParams,
    field: &BoundaryField,
) -> Result<BoundaryField> {
    let one = generic_step(graph, 1.0, std::slice::from_ref(field))?;
    let k = params.k();
    Ok(BoundaryField {
        z1: params.lambda() * ipow(one.z1, k),
        z2: params.lambda() * ipow(one.z2, k),
    })
}

/// Two-class map on the wand graph.
pub fn agm_map(params: &ModelParams, pattern: &AgmPattern, fields: &FieldVector4) -> FieldVector4 {
    let lam = params.lambda();
    let (k, m, r) = (pattern.k, pattern.m, pattern.r);
    let (a1, a2) = fields.z.wand_ratios();
    let (b1, b2) = fields.t.wand_ratios();
    FieldVector4::new(
        lam * ipow(a1, m) * ipow(b1, k - m),
        lam * ipow(a2, m) * ipow(b2, k - m),
        lam * ipow(b1, r) * ipow(a1, k - r),
        lam * ipow(b2, r) * ipow(a2, k - r),
    )
}

/// Two-class map restricted to `I3` (`t = swap(z)`). Well defined for any `m`;
/// callers decide whether `m = r` holds.
pub fn i3_map(params: &ModelParams, m: u32, field: &BoundaryField) -> BoundaryField {
    let k = params.k();
    let (a1, a2) = field.wand_ratios();
    BoundaryField {
        z1: params.lambda() * ipow(a1, m) * ipow(a2, k - m),
        z2: params.lambda() * ipow(a2, m) * ipow(a1, k - m),
    }
}

/// `(1 + x) / (2x)`, the wand ratio of a symmetric field.
#[inline]
pub fn sym_ratio(x: f64) -> f64 {
    (1.0 + x) / (2.0 * x)
}

/// Two-class map restricted to `I4` (`z1 = z2 = z`, `t1 = t2 = t`).
pub fn i4_map(params: &ModelParams, pattern: &AgmPattern, z: f64, t: f64) -> (f64, f64) {
    let lam = params.lambda();
    let (k, m, r) = (pattern.k, pattern.m, pattern.r);
    let (qz, qt) = (sym_ratio(z), sym_ratio(t));
    (
        lam * ipow(qz, m) * ipow(qt, k - m),
        lam * ipow(qt, r) * ipow(qz, k - r),
    )
}

/// Weakly periodic map on the wand graph for `|A| = i`.
pub fn weakly_periodic_map(
    params: &ModelParams,
    pattern: &WeaklyPeriodicPattern,
    fields: &FieldVector8,
) -> FieldVector8 {
    let lam = params.lambda();
    let (k, i) = (pattern.k, pattern.i);
    let (z1, z2) = fields.z.wand_ratios();
    let (t1, t2) = fields.t.wand_ratios();
    let (q1, q2) = fields.q.wand_ratios();
    let (p1, p2) = fields.p.wand_ratios();
    let f = |a: f64, ea: u32, b: f64, eb: u32| lam * ipow(a, ea) * ipow(b, eb);
    FieldVector8 {
        z: BoundaryField {
            z1: f(z1, k - i, q1, i),
            z2: f(z2, k - i, q2, i),
        },
        t: BoundaryField {
            z1: f(z1, k + 1 - i, q1, i - 1),
            z2: f(z2, k + 1 - i, q2, i - 1),
        },
        q: BoundaryField {
            z1: f(p1, k + 1 - i, t1, i - 1),
            z2: f(p2, k + 1 - i, t2, i - 1),
        },
        p: BoundaryField {
            z1: f(p1, k - i, t1, i),
            z2: f(p2, k - i, t2, i),
        },
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Labels of every invariant set whose defining equalities hold within `tolerance`.
///
/// `I3` membership here is purely geometric; the `m = r` requirement is checked
/// by whoever classifies a solution.
pub fn invariant_set_of(fields: &FieldVector4, tolerance: f64) -> BTreeSet<InvariantSet> {
    let [z1, z2, t1, t2] = fields.as_array();
    let c = |a, b| close(a, b, tolerance);
    let mut out = BTreeSet::new();
    if c(z1, z2) && c(z1, t1) && c(z1, t2) {
        out.insert(InvariantSet::I1);
    }
    if c(z1, t1) && c(z2, t2) {
        out.insert(InvariantSet::I2);
    }
    if c(z1, t2) && c(z2, t1) {
        out.insert(InvariantSet::I3);
    }
    if c(z1, z2) && c(t1, t2) {
        out.insert(InvariantSet::I4);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: u32, lambda: f64) -> ModelParams {
        ModelParams::new(k, lambda).unwrap()
    }

    #[test]
    fn ipow_matches_repeated_multiplication() {
        for n in 0..20 {
            let direct = (0..n).fold(1.0, |acc, _| acc * 1.37);
            assert!((ipow(1.37, n) - direct).abs() <= 1e-13 * direct);
        }
        assert_eq!(ipow(0.5, 0), 1.0);
    }

    #[test]
    fn generic_step_examples() {
        let wand = ActivityGraph::wand();
        let one = BoundaryField::symmetric(1.0);
        let out = generic_step(&wand, 1.0, &[one, one]).unwrap();
        assert_eq!(out, one);

        let empty = generic_step(&wand, 2.5, &[]).unwrap();
        assert_eq!(empty, BoundaryField::symmetric(2.5));

        // Hinge with symmetric children: lambda ((1+z)/(1+2z))^k in both components.
        let hinge = ActivityGraph::hinge();
        let (lam, z) = (1.7, 0.6);
        let out = generic_step(&hinge, lam, &[BoundaryField::symmetric(z); 3]).unwrap();
        let expected = lam * ((1.0 + z) / (1.0 + 2.0 * z)).powi(3);
        assert!((out.z1 - expected).abs() < 1e-15 * expected);
        assert!((out.z2 - expected).abs() < 1e-15 * expected);
    }

    #[test]
    fn singular_denominator_is_reported() {
        // a00 = a01 = a02 = 0: spin 0 isolated from everything.
        let g = ActivityGraph::custom([[0, 0, 0], [0, 1, 1], [0, 1, 1]]).unwrap();
        assert_eq!(
            generic_step(&g, 1.0, &[BoundaryField::symmetric(1.0)]),
            Err(Error::SingularField)
        );
    }

    #[test]
    fn ti_map_is_generic_step_with_k_children() {
        let f = BoundaryField::new(0.3, 2.2).unwrap();
        for g in [ActivityGraph::wand(), ActivityGraph::hinge()] {
            let p = params(4, 0.9);
            let a = ti_map(&g, &p, &f).unwrap();
            let b = generic_step(&g, 0.9, &[f; 4]).unwrap();
            assert!(rel_defect(&a.as_array(), &b.as_array()) < 1e-14);
        }
        let p = params(2, 1.0);
        let one = BoundaryField::symmetric(1.0);
        assert_eq!(ti_map(&ActivityGraph::wand(), &p, &one).unwrap(), one);
    }

    #[test]
    fn i3_fixed_points_from_closed_forms() {
        let one = BoundaryField::symmetric(1.0);
        assert_eq!(i3_map(&params(4, 1.0), 3, &one), one);
        // lambda(z2) = (z2^2+1)^4 / (z2^2 (z2+1)^4) at z2 = 2 is 625/324.
        let lam = 625.0 / 324.0;
        let p = BoundaryField::new(0.5, 2.0).unwrap();
        let img = i3_map(&params(4, lam), 3, &p);
        assert!(rel_defect(&img.as_array(), &p.as_array()) < 1e-10);
        let swapped = i3_map(&params(4, lam), 3, &p.swapped());
        assert!(rel_defect(&swapped.as_array(), &p.swapped().as_array()) < 1e-10);
    }

    #[test]
    fn i4_closed_form_fixed_points() {
        let p = AgmPattern::new(3, 1, 0).unwrap();
        let (z, t) = i4_map(&params(3, 32.0 / 27.0), &p, 2.0, 0.5);
        assert!(rel_defect(&[z, t], &[2.0, 0.5]) < 1e-12);

        let p = AgmPattern::new(4, 2, 0).unwrap();
        let (z, t) = i4_map(&params(4, 27.0 / 16.0), &p, 3.0, 1.0 / 3.0);
        assert!(rel_defect(&[z, t], &[3.0, 1.0 / 3.0]) < 1e-12);
    }

    #[test]
    fn agm_special_patterns() {
        let v = FieldVector4::new(0.7, 1.9, 2.4, 0.35);
        let p = params(4, 1.3);
        // m = r = 0: each class is driven only by the other one.
        let out = agm_map(&p, &AgmPattern::new(4, 0, 0).unwrap(), &v);
        let (b1, b2) = v.t.wand_ratios();
        let (a1, a2) = v.z.wand_ratios();
        let expected = [
            1.3 * b1.powi(4),
            1.3 * b2.powi(4),
            1.3 * a1.powi(4),
            1.3 * a2.powi(4),
        ];
        assert!(rel_defect(&out.as_array(), &expected) < 1e-14);

        // m = k: the z equations decouple into the TI system.
        let out = agm_map(&p, &AgmPattern::new(4, 4, 1).unwrap(), &v);
        let ti = ti_map(&ActivityGraph::wand(), &p, &v.z).unwrap();
        assert!(rel_defect(&[out.z.z1, out.z.z2], &ti.as_array()) < 1e-14);
    }

    #[test]
    fn invariant_set_examples() {
        use InvariantSet::*;
        let all: BTreeSet<_> = [I1, I2, I3, I4].into();
        assert_eq!(
            invariant_set_of(&FieldVector4::new(1.0, 1.0, 1.0, 1.0), 1e-12),
            all
        );
        assert_eq!(
            invariant_set_of(&FieldVector4::new(2.0, 0.5, 0.5, 2.0), 1e-12),
            [I3].into()
        );
        assert_eq!(
            invariant_set_of(&FieldVector4::new(2.0, 2.0, 3.0, 3.0), 1e-12),
            [I4].into()
        );
        assert!(invariant_set_of(&FieldVector4::new(1.0, 2.0, 3.0, 4.0), 1e-12).is_empty());
    }

    #[test]
    fn pattern_validation() {
        assert!(AgmPattern::new(4, 5, 0).is_err());
        assert!(AgmPattern::new(4, 0, 5).is_err());
        let p = AgmPattern::new(5, 3, 1).unwrap();
        assert_eq!(p.n_i3(), 1);
        assert_eq!(p.n_i4(), -1);
        assert_eq!(p.swapped(), AgmPattern::new(5, 1, 3).unwrap());
        assert!(WeaklyPeriodicPattern::new(4, 0).is_err());
        assert!(WeaklyPeriodicPattern::new(4, 5).is_err());
        assert_eq!(
            WeaklyPeriodicPattern::new(4, 1).unwrap().agm_embedding(),
            AgmPattern::new(4, 3, 0).unwrap()
        );
    }
}
