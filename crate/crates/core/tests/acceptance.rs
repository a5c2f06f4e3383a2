//! Acceptance run: one PASS/FAIL line per criterion, with its runtime limit.
//! Exits non-zero when any criterion fails.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hctree::oracle::{assignment_fields, check_consistency, exact_marginal, finite_measure};
use hctree::phase::{grid_with_critical, sweep};
use hctree::recursion::{agm_map, generic_step, ti_map, weakly_periodic_map};
use hctree::sampler::sample;
use hctree::solvers::{
    critical_lambda, critical_lambda_exact, fold_maximum_k4, hinge_lambda_of_t, lambda_of_t,
    quartic_k4, reciprocal_cubic_k3, reciprocal_pair_k4, solve, verify_r_factorization, Scenario,
    SolutionLabel,
};
use hctree::{
    ActivityGraph, AgmPattern, BoundaryField, FieldAssignment, FieldVector4, FieldVector8,
    FiniteVolume, ModelParams, RootDegree, WeaklyPeriodicPattern,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn i4_residual(k: u32, m: u32, r: u32, lam: f64, z: f64, t: f64) -> Result<f64, String> {
    Scenario::I4 { m, r }
        .residual(
            &ModelParams::new(k, lam).map_err(e)?,
            &FieldVector4::from_i4(z, t),
        )
        .map_err(e)
}

fn critical_values() -> Outcome {
    let mut worst = 0.0f64;
    for k in 2..=10u32 {
        let kk = BigRational::from_integer(k.into());
        let denom = (&kk - BigRational::one()) * num_traits::pow(kk.clone(), k as usize);
        let wand = num_traits::pow(BigRational::from_integer(2.into()), k as usize) / &denom;
        let hinge = num_traits::pow(&kk + BigRational::one(), k as usize) / &denom;
        ensure(
            critical_lambda_exact(&ActivityGraph::wand(), k).map_err(e)? == wand,
            format!("wand k={k}"),
        )?;
        ensure(
            critical_lambda_exact(&ActivityGraph::hinge(), k).map_err(e)? == hinge,
            format!("hinge k={k}"),
        )?;
        let (w, h) = (wand.to_f64().unwrap(), hinge.to_f64().unwrap());
        let dev = rel(lambda_of_t(1.0, k), w)
            .max(rel(hinge_lambda_of_t(1.0, k), h))
            .max(rel(
                critical_lambda(&ActivityGraph::wand(), k).map_err(e)?,
                w,
            ))
            .max(rel(
                critical_lambda(&ActivityGraph::hinge(), k).map_err(e)?,
                h,
            ));
        worst = worst.max(dev);
    }
    ensure(
        worst <= 1e-13,
        format!("lambda(1) relative deviation {worst:.2e}"),
    )?;
    Ok(format!(
        "k=2..10 exact; lambda(t=1) relative deviation {worst:.1e}"
    ))
}

fn ti_counts() -> Outcome {
    let mut points = 0;
    let mut worst = 0.0f64;
    for scenario in [Scenario::TiWand, Scenario::TiHinge] {
        for k in 2..=5u32 {
            let c = critical_lambda(&scenario.graph(), k).map_err(e)?;
            let grid = grid_with_critical(c / 10.0, c * 10.0, &[c]);
            for p in sweep(scenario, k, &grid).map_err(e)? {
                let want = if p.lambda <= c { 1 } else { 3 };
                ensure(
                    p.solution_count == want,
                    format!(
                        "{scenario} k={k} lambda={:.12e}: {} solutions",
                        p.lambda, p.solution_count
                    ),
                )?;
                for s in p
                    .solutions
                    .iter()
                    .filter(|s| s.label == SolutionLabel::TiAsymmetric)
                {
                    worst = worst.max(s.residual);
                }
                points += 1;
            }
        }
    }
    ensure(worst <= 1e-10, format!("asymmetric residual {worst:.2e}"))?;
    Ok(format!(
        "{points} activities, 1 below and 3 above; max residual {worst:.1e}"
    ))
}

fn fixtures() -> Outcome {
    // Reciprocal I3 solutions at k = 4, m = 3.
    let crit = hctree::solvers::i3_critical_lambda(4, 3).map_err(e)?;
    ensure(
        crit.iter().any(|c| (c - 1.0).abs() <= 1e-12),
        format!("I3 critical list {crit:?}"),
    )?;
    let mut prod = 0.0f64;
    for lam in [1.01, 1.5, 2.0, 5.0, 20.0] {
        let rep = solve(Scenario::I3 { m: 3 }, &ModelParams::new(4, lam).map_err(e)?).map_err(e)?;
        ensure(
            rep.count() == 3,
            format!("I3 k=4 m=3 lambda={lam}: {}", rep.count()),
        )?;
        for s in rep.asymmetric() {
            prod = prod.max((s.fields.z.z1 * s.fields.z.z2 - 1.0).abs());
        }
    }
    ensure(prod <= 1e-10, format!("|z1 z2 - 1| = {prod:.2e}"))?;

    // k = 3, (1,0): tangent point and the symmetric functions of the cubic.
    let r2 = i4_residual(3, 1, 0, 32.0 / 27.0, 2.0, 0.5)?;
    ensure(r2 <= 1e-10, format!("(2, 1/2) residual {r2:.2e}"))?;
    let mut vieta = 0.0f64;
    for lam in [0.25, 0.5, 0.9, 1.1, 32.0 / 27.0, 2.0, 4.0] {
        let c = reciprocal_cubic_k3(lam).map_err(e)?;
        let v: Vec<f64> = c
            .roots
            .iter()
            .flat_map(|r| std::iter::repeat(r.value).take(r.multiplicity as usize))
            .collect();
        if v.len() == 3 {
            vieta = vieta
                .max((v[0] + v[1] + v[2] - (8.0 / lam - 3.0)).abs())
                .max((v[0] * v[1] + v[0] * v[2] + v[1] * v[2] - 3.0).abs())
                .max((v[0] * v[1] * v[2] + 1.0).abs());
        }
    }
    ensure(vieta <= 1e-9, format!("Vieta deviation {vieta:.2e}"))?;

    // k = 4, (1,0): the fold.
    let f = fold_maximum_k4().map_err(e)?;
    ensure(
        (f.lambda - 6.913562404).abs() <= 1e-6,
        format!("fold activity {}", f.lambda),
    )?;
    ensure(
        (f.maximizer - 3.510929776).abs() <= 1e-6,
        format!("maximizer {}", f.maximizer),
    )?;
    let mut roots = f.cubic_roots.clone();
    roots.sort_by(f64::total_cmp);
    ensure(
        roots.len() == 3,
        "stationarity cubic should have three real roots",
    )?;
    let printed = [-0.224040245, 3.510929776, 12.71311048];
    let (mut abs_dev, mut rel_dev) = (0.0f64, 0.0f64);
    for (r, p) in roots.iter().zip(printed) {
        abs_dev = abs_dev.max((r - p).abs());
        rel_dev = rel_dev.max(rel(*r, p));
    }
    // The printed middle root ends in ...776 where the root is ...7599; the
    // comparison is relative (ten significant figures).
    ensure(
        rel_dev <= 1e-8,
        format!("cubic roots relative deviation {rel_dev:.2e}"),
    )?;

    // k = 4, (1,1): reciprocal pair below 1.
    let (mut res4, mut prod4) = (0.0f64, 0.0f64);
    for i in 1..=20 {
        let lam = i as f64 / 21.0;
        let (a, b) = reciprocal_pair_k4(lam).ok_or("no pair below 1")?;
        res4 = res4
            .max(i4_residual(4, 1, 1, lam, a, b)?)
            .max(i4_residual(4, 1, 1, lam, b, a)?);
        prod4 = prod4.max((a * b - 1.0).abs());
    }
    ensure(
        res4 <= 1e-10 && prod4 <= 1e-10,
        format!("pair residual {res4:.2e}, product {prod4:.2e}"),
    )?;

    // k = 4, (2,0): tangent point and the quartic minimum.
    let r5 = i4_residual(4, 2, 0, 27.0 / 16.0, 3.0, 1.0 / 3.0)?;
    ensure(r5 <= 1e-10, format!("(3, 1/3) residual {r5:.2e}"))?;
    let mut quartic = 0.0f64;
    for lam in [0.1, 0.5, 1.0, 27.0 / 16.0, 3.0, 10.0] {
        let q = quartic_k4(lam);
        let f = |x: f64| x.powi(4) - 2.0 * q.a * x.powi(3) + 1.0;
        quartic = quartic
            .max((q.x_min - 1.5 * q.a).abs())
            .max((f(q.x_min) - (1.0 - 27.0 * q.a.powi(4) / 16.0)).abs())
            .max((q.f_min - f(q.x_min)).abs());
    }
    ensure(
        quartic <= 1e-12,
        format!("quartic minimum deviation {quartic:.2e}"),
    )?;
    Ok(format!(
        "z1z2-1 {prod:.1e}; Vieta {vieta:.1e}; fold {:.10} at {:.10} (roots abs {abs_dev:.1e}, rel {rel_dev:.1e}); \
         pair {res4:.1e}; quartic {quartic:.1e}",
        f.lambda, f.maximizer
    ))
}

fn r_polynomials() -> Outcome {
    for k in 2..=16 {
        let rep = verify_r_factorization(k).map_err(e)?;
        ensure(rep.passed, format!("k={k}: {:?}", rep.violations))?;
    }
    Ok("k=2..16: low coefficients vanish, higher positive, quotient by (t-1)^4 nonnegative".into())
}

fn oracle_equivalence() -> Outcome {
    let mut checked = 0;
    let mut worst = 0.0f64;
    let k = 2;
    let mut check = |graph: &ActivityGraph,
                     scenario: Scenario,
                     lam: f64,
                     root: RootDegree,
                     n: u32|
     -> Result<(), String> {
        let volume = FiniteVolume::new(k, n, root).map_err(e)?;
        let rep = solve(scenario, &ModelParams::new(k, lam).map_err(e)?).map_err(e)?;
        for s in &rep.solutions {
            let assignment = match scenario.pattern(k) {
                None => FieldAssignment::Uniform(s.fields.z),
                Some((m, r)) => FieldAssignment::TwoClass {
                    pattern: AgmPattern::new(k, m, r).map_err(e)?,
                    z: s.fields.z,
                    t: s.fields.t,
                },
            };
            let fields = assignment_fields(graph, &volume, lam, &assignment).map_err(e)?;
            let d = check_consistency(graph, &volume, lam, &fields).map_err(e)?;
            ensure(
                d <= 1e-10,
                format!(
                    "{scenario} {} n={n} {root:?} lambda={lam}: defect {d:.2e}",
                    graph.name()
                ),
            )?;
            worst = worst.max(d);
            checked += 1;
        }
        Ok(())
    };
    for n in 1..=2 {
        for root in [RootDegree::Half, RootDegree::Full] {
            for lam in [0.3, 1.0, 2.0, 3.0] {
                check(&ActivityGraph::wand(), Scenario::TiWand, lam, root, n)?;
                check(&ActivityGraph::hinge(), Scenario::TiHinge, lam, root, n)?;
                for m in 0..=2 {
                    // A full root has k + 1 children, so mixed patterns need a half tree.
                    if root == RootDegree::Half || m == 0 || m == k {
                        check(&ActivityGraph::wand(), Scenario::I3 { m }, lam, root, n)?;
                    }
                    for r in 0..=2 {
                        if root == RootDegree::Half || m == 0 || m == k {
                            check(&ActivityGraph::wand(), Scenario::I4 { m, r }, lam, root, n)?;
                        }
                    }
                }
            }
        }
    }
    // The k = 4 reciprocal I3 pair on the largest volume within budget.
    let wand = ActivityGraph::wand();
    let volume = FiniteVolume::new(4, 1, RootDegree::Half).map_err(e)?;
    let rep = solve(Scenario::I3 { m: 3 }, &ModelParams::new(4, 2.0).map_err(e)?).map_err(e)?;
    for s in &rep.solutions {
        let a = FieldAssignment::TwoClass {
            pattern: AgmPattern::new(4, 3, 3).map_err(e)?,
            z: s.fields.z,
            t: s.fields.t,
        };
        let d = check_consistency(
            &wand,
            &volume,
            2.0,
            &assignment_fields(&wand, &volume, 2.0, &a).map_err(e)?,
        )
        .map_err(e)?;
        ensure(d <= 1e-10, format!("I3(3) k=4: defect {d:.2e}"))?;
        worst = worst.max(d);
        checked += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut detected = 0;
    for trial in 0..100 {
        let graph = if trial % 2 == 0 {
            ActivityGraph::wand()
        } else {
            ActivityGraph::hinge()
        };
        let root = if trial % 4 < 2 {
            RootDegree::Half
        } else {
            RootDegree::Full
        };
        let volume = FiniteVolume::new(2, 1 + (trial % 8 >= 4) as u32, root).map_err(e)?;
        let lam = rng.gen_range(-2.0f64..2.0).exp();
        let fields: Vec<BoundaryField> = (0..volume.len())
            .map(|_| BoundaryField {
                z1: rng.gen_range(-2.0f64..2.0).exp(),
                z2: rng.gen_range(-2.0f64..2.0).exp(),
            })
            .collect();
        if check_consistency(&graph, &volume, lam, &fields).map_err(e)? > 1e-4 {
            detected += 1;
        }
    }
    ensure(
        detected >= 99,
        format!("only {detected}/100 random fields flagged"),
    )?;
    Ok(format!(
        "{checked} fixed points, max defect {worst:.1e}; {detected}/100 random fields flagged"
    ))
}

fn coincidences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut dev = |a: &[f64], b: &[f64]| {
        for (x, y) in a.iter().zip(b) {
            worst = worst.max(rel(*x, *y));
        }
    };
    for k in 3..=5u32 {
        for i in 1..=k {
            let wp = WeaklyPeriodicPattern::new(k, i).map_err(e)?;
            let agm = AgmPattern::new(k, k - i, i - 1).map_err(e)?;
            for _ in 0..100 {
                let params = ModelParams::new(k, rng.gen_range(-3.0f64..3.0).exp()).map_err(e)?;
                let f = BoundaryField {
                    z1: rng.gen_range(-3.0f64..3.0).exp(),
                    z2: rng.gen_range(-3.0f64..3.0).exp(),
                };
                let v = FieldVector4::from_i3(f);
                let lhs = weakly_periodic_map(&params, &wp, &FieldVector8::from_agm(v));
                let rhs = FieldVector8::from_agm(agm_map(&params, &agm, &v));
                dev(&lhs.as_array(), &rhs.as_array());
            }
        }
        let wand = ActivityGraph::wand();
        for _ in 0..100 {
            let lam = rng.gen_range(-3.0f64..3.0).exp();
            let params = ModelParams::new(k, lam).map_err(e)?;
            let z = BoundaryField {
                z1: rng.gen_range(-3.0f64..3.0).exp(),
                z2: rng.gen_range(-3.0f64..3.0).exp(),
            };
            let t = BoundaryField {
                z1: rng.gen_range(-3.0f64..3.0).exp(),
                z2: rng.gen_range(-3.0f64..3.0).exp(),
            };
            // m = r = 0: every child belongs to the other class.
            let img = agm_map(
                &params,
                &AgmPattern::new(k, 0, 0).map_err(e)?,
                &FieldVector4 { z, t },
            );
            let zp = generic_step(&wand, lam, &vec![t; k as usize]).map_err(e)?;
            let tp = generic_step(&wand, lam, &vec![z; k as usize]).map_err(e)?;
            dev(&img.as_array(), &[zp.z1, zp.z2, tp.z1, tp.z2]);
            // m = k: the translation-invariant system.
            let img = agm_map(
                &params,
                &AgmPattern::new(k, k, k).map_err(e)?,
                &FieldVector4::from_ti(z),
            );
            let ti = ti_map(&wand, &params, &z).map_err(e)?;
            dev(&img.z.as_array(), &ti.as_array());
        }
    }
    ensure(worst <= 1e-12, format!("relative error {worst:.2e}"))?;
    Ok(format!(
        "weakly periodic, period-two and translation-invariant reductions agree to {worst:.1e}"
    ))
}

fn sampler_exactness() -> Outcome {
    let wand = ActivityGraph::wand();
    let volume = FiniteVolume::new(2, 2, RootDegree::Full).map_err(e)?;
    let lam = 1.0;
    let rep = solve(Scenario::TiWand, &ModelParams::new(2, lam).map_err(e)?).map_err(e)?;
    let z = rep.solutions[0].fields.z;
    let fields = assignment_fields(&wand, &volume, lam, &FieldAssignment::Uniform(z)).map_err(e)?;
    let measure = finite_measure(&wand, &volume, lam, &fields[volume.boundary()]).map_err(e)?;
    let n = 100_000usize;
    let batch = sample(&wand, &volume, lam, &fields, 11, n).map_err(e)?;
    let mut worst_sigma = 0.0f64;
    for v in 0..volume.len() {
        let exact = exact_marginal(&measure, v).map_err(e)?;
        for s in 0..3 {
            let p = exact[s];
            let sd = (p * (1.0 - p) / n as f64).sqrt().max(1e-12);
            worst_sigma = worst_sigma.max((batch.empirical_marginals[v][s] - p).abs() / sd);
        }
    }
    ensure(
        worst_sigma <= 4.0,
        format!("marginal off by {worst_sigma:.2} sigma"),
    )?;
    let mut bad = 0usize;
    let mut drawn = 0usize;
    for chunk in 0..10u64 {
        let b = sample(&wand, &volume, lam, &fields, 1000 + chunk, 100_000).map_err(e)?;
        for c in &b.configurations {
            if !volume.is_admissible(&wand, c).map_err(e)? {
                bad += 1;
            }
        }
        drawn += b.count;
    }
    ensure(bad == 0, format!("{bad} inadmissible samples"))?;
    Ok(format!(
        "worst marginal {worst_sigma:.2} sigma over {n} samples; {bad} inadmissible in {drawn}"
    ))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 7] = [
        ("critical values, closed form", 1, critical_values),
        ("translation-invariant counts", 10, ti_counts),
        ("two-class fixtures", 5, fixtures),
        ("R-polynomial factorization", 5, r_polynomials),
        ("finite-volume consistency", 60, oracle_equivalence),
        ("coincidence identities", 5, coincidences),
        ("sampler exactness", 30, sampler_exactness),
    ];
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(*limit);
        let (verdict, detail) = match (&result, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("over the {limit} s limit; {d}")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if verdict == "FAIL" {
            failures += 1;
        }
        println!(
            "criterion {}: {verdict} [{name}] ({:.2} s of {limit} s) {detail}",
            i + 1,
            took.as_secs_f64()
        );
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
