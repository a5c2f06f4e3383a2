//! Invariants checked on random inputs.

use hctree::oracle::{check_consistency, finite_measure, propagate_fields};
use hctree::phase::sweep;
use hctree::recursion::{agm_map, generic_step, i4_map, ti_map, weakly_periodic_map};
use hctree::solvers::{critical_lambda, solve, solve_cubic, IntPolynomial, Scenario};
use hctree::{
    ActivityGraph, AgmPattern, BoundaryField, FieldVector4, FieldVector8, FiniteVolume,
    ModelParams, RootDegree, WeaklyPeriodicPattern,
};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = BoundaryField> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| BoundaryField {
        z1: a.exp(),
        z2: b.exp(),
    })
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= tol * y.abs().max(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_class_map_is_the_general_step(
        k in 2u32..7, mr in (0u32..7, 0u32..7), z in field(), t in field(), ln_lam in -3.0f64..3.0
    ) {
        let (m, r) = (mr.0 % (k + 1), mr.1 % (k + 1));
        let lam = ln_lam.exp();
        let params = ModelParams::new(k, lam).unwrap();
        let wand = ActivityGraph::wand();
        let img = agm_map(&params, &AgmPattern::new(k, m, r).unwrap(), &FieldVector4 { z, t });
        let mut zc = vec![z; m as usize];
        zc.extend(std::iter::repeat(t).take((k - m) as usize));
        let mut tc = vec![t; r as usize];
        tc.extend(std::iter::repeat(z).take((k - r) as usize));
        let z_new = generic_step(&wand, lam, &zc).unwrap();
        let t_new = generic_step(&wand, lam, &tc).unwrap();
        prop_assert!(close(&img.as_array(), &[z_new.z1, z_new.z2, t_new.z1, t_new.z2], 1e-12));
    }

    #[test]
    fn full_pattern_is_translation_invariant(k in 2u32..8, z in field(), ln_lam in -3.0f64..3.0) {
        let params = ModelParams::new(k, ln_lam.exp()).unwrap();
        let img = agm_map(&params, &AgmPattern::new(k, k, k).unwrap(), &FieldVector4::from_ti(z));
        let ti = ti_map(&ActivityGraph::wand(), &params, &z).unwrap();
        prop_assert!(close(&img.z.as_array(), &ti.as_array(), 1e-12));
        prop_assert!(close(&img.t.as_array(), &ti.as_array(), 1e-12));
    }

    #[test]
    fn class_swap_symmetry(k in 2u32..7, mr in (0u32..7, 0u32..7), z in field(), t in field()) {
        let (m, r) = (mr.0 % (k + 1), mr.1 % (k + 1));
        let params = ModelParams::new(k, 1.3).unwrap();
        let p = AgmPattern::new(k, m, r).unwrap();
        let v = FieldVector4 { z, t };
        let a = agm_map(&params, &p, &v).class_swapped();
        let b = agm_map(&params, &p.swapped(), &v.class_swapped());
        prop_assert!(close(&a.as_array(), &b.as_array(), 1e-12));
    }

    #[test]
    fn i4_restriction(k in 2u32..7, mr in (0u32..7, 0u32..7), z in -3.0f64..3.0, t in -3.0f64..3.0) {
        let (m, r) = (mr.0 % (k + 1), mr.1 % (k + 1));
        let (z, t) = (z.exp(), t.exp());
        let params = ModelParams::new(k, 0.7).unwrap();
        let p = AgmPattern::new(k, m, r).unwrap();
        let full = agm_map(&params, &p, &FieldVector4::from_i4(z, t));
        let (zi, ti) = i4_map(&params, &p, z, t);
        prop_assert!(close(&full.as_array(), &[zi, zi, ti, ti], 1e-12));
    }

    #[test]
    fn weakly_periodic_embedding(k in 3u32..6, i in 1u32..6, z in field(), ln_lam in -3.0f64..3.0) {
        let i = 1 + (i - 1) % k;
        let params = ModelParams::new(k, ln_lam.exp()).unwrap();
        let wp = WeaklyPeriodicPattern::new(k, i).unwrap();
        let v = FieldVector4::from_i3(z);
        let lhs = weakly_periodic_map(&params, &wp, &FieldVector8::from_agm(v));
        let rhs = FieldVector8::from_agm(agm_map(&params, &AgmPattern::new(k, k - i, i - 1).unwrap(), &v));
        prop_assert!(close(&lhs.as_array(), &rhs.as_array(), 1e-12));
    }

    #[test]
    fn propagated_fields_are_consistent(
        n in 1u32..3, half in any::<bool>(), hinge in any::<bool>(), seed_fields in prop::collection::vec(field(), 9)
    ) {
        let root = if half { RootDegree::Half } else { RootDegree::Full };
        let graph = if hinge { ActivityGraph::hinge() } else { ActivityGraph::wand() };
        let volume = FiniteVolume::new(2, n, root).unwrap();
        let b = volume.boundary();
        let boundary: Vec<_> = seed_fields.iter().cycle().take(b.len()).copied().collect();
        let fields = propagate_fields(&graph, &volume, 0.8, &boundary).unwrap();
        prop_assert!(check_consistency(&graph, &volume, 0.8, &fields).unwrap() <= 1e-12);
    }

    #[test]
    fn measure_is_normalized(n in 0u32..3, f in field(), ln_lam in -2.0f64..2.0) {
        let volume = FiniteVolume::new(2, n, RootDegree::Full).unwrap();
        let boundary = vec![f; volume.boundary().len()];
        let m = finite_measure(&ActivityGraph::hinge(), &volume, ln_lam.exp(), &boundary).unwrap();
        prop_assert!((m.total_probability() - 1.0).abs() <= 1e-12);
        prop_assert!(m.partition > 0.0);
    }

    #[test]
    fn ti_count_steps_once(k in 2u32..9, hinge in any::<bool>(), ln_ratio in -4.0f64..4.0) {
        prop_assume!(ln_ratio.abs() > 1e-3);
        let scenario = if hinge { Scenario::TiHinge } else { Scenario::TiWand };
        let c = critical_lambda(&scenario.graph(), k).unwrap();
        let rep = solve(scenario, &ModelParams::new(k, c * ln_ratio.exp()).unwrap()).unwrap();
        prop_assert_eq!(rep.count(), if ln_ratio < 0.0 { 1 } else { 3 });
        prop_assert!(rep.max_residual() <= 1e-10);
    }

    #[test]
    fn sweep_solutions_reverify(ln_lam in prop::collection::vec(-4.0f64..4.0, 1..6), case in 0usize..5) {
        let (scenario, k) = [
            (Scenario::I4 { m: 1, r: 0 }, 3),
            (Scenario::I4 { m: 0, r: 1 }, 4),
            (Scenario::I4 { m: 1, r: 1 }, 4),
            (Scenario::I4 { m: 0, r: 0 }, 5),
            (Scenario::I3 { m: 3 }, 4),
        ][case];
        let mut grid: Vec<f64> = ln_lam.iter().map(|l| l.exp()).collect();
        grid.sort_by(f64::total_cmp);
        for p in sweep(scenario, k, &grid).unwrap() {
            prop_assert_eq!(p.solution_count, p.solutions.len());
            for s in &p.solutions {
                let params = ModelParams::new(k, p.lambda).unwrap();
                prop_assert!(scenario.residual(&params, &s.fields).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn cubic_recovers_roots(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0) {
        let mut want = [a, b, c];
        want.sort_by(f64::total_cmp);
        prop_assume!(want[1] - want[0] > 1e-2 && want[2] - want[1] > 1e-2);
        let roots = solve_cubic(1.0, -(a + b + c), a * b + a * c + b * c, -a * b * c).unwrap();
        let mut got = roots.values();
        got.sort_by(f64::total_cmp);
        prop_assert_eq!(got.len(), 3);
        for (g, w) in got.iter().zip(want) {
            prop_assert!((g - w).abs() <= 1e-9 * w.abs().max(1.0));
        }
    }

    #[test]
    fn polynomial_division(p in prop::collection::vec(-50i64..50, 1..10), d in prop::collection::vec(-9i64..9, 0..4)) {
        let p = IntPolynomial::from_i64(&p);
        let mut dc = d.clone();
        dc.push(1);
        let d = IntPolynomial::from_i64(&dc);
        let (q, r) = p.div_rem(&d).unwrap();
        prop_assert_eq!(&(&(&q * &d) + &r), &p);
        prop_assert!(r.degree().map_or(true, |rd| rd < d.degree().unwrap()));
    }
}
