//! Real roots of cubics via Cardano's formula, with Newton polishing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicRoots {
    /// Distinct real roots in increasing order.
    pub roots: Vec<RealRoot>,
    /// Coefficients `(p, q)` of the depressed cubic `y^3 + p y + q`.
    pub depressed: (f64, f64),
    /// `(q/2)^2 + (p/3)^3`: negative for three simple real roots, zero for a
    /// repeated root, positive for one real root.
    pub discriminant: f64,
}

impl CubicRoots {
    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    pub fn positive(&self) -> Vec<f64> {
        self.roots
            .iter()
            .map(|r| r.value)
            .filter(|&v| v > 0.0)
            .collect()
    }
}

const DISC_REL_TOL: f64 = 1e-12;

fn horner(c: [f64; 4], x: f64) -> (f64, f64) {
    let [a, b, cc, d] = c;
    let v = ((a * x + b) * x + cc) * x + d;
    let dv = (3.0 * a * x + 2.0 * b) * x + cc;
    (v, dv)
}

fn polish(c: [f64; 4], mut x: f64) -> f64 {
    for _ in 0..8 {
        let (v, dv) = horner(c, x);
        if dv == 0.0 || !v.is_finite() {
            break;
        }
        let next = x - v / dv;
        if !next.is_finite() || horner(c, next).0.abs() >= v.abs() {
            break;
        }
        x = next;
    }
    x
}

/// Real roots of `a x^3 + b x^2 + c x + d` with `a != 0`.
pub fn solve_cubic(a: f64, b: f64, c: f64, d: f64) -> Result<CubicRoots> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::Polynomial("leading coefficient is zero".into()));
    }
    if ![b, c, d].iter().all(|v| v.is_finite()) {
        return Err(Error::Polynomial("non-finite coefficient".into()));
    }
    let (b1, c1, d1) = (b / a, c / a, d / a);
    let shift = -b1 / 3.0;
    let p = c1 - b1 * b1 / 3.0;
    let q = 2.0 * b1 * b1 * b1 / 27.0 - b1 * c1 / 3.0 + d1;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let scale = (q / 2.0).powi(2).max((p / 3.0).abs().powi(3));

    let unit = 1.0 + b1 * b1 + c1.abs();
    let triple = p.abs() <= 1e-12 * unit && q.abs() <= 1e-12 * unit.powf(1.5);

    let mut ys: Vec<(f64, u8)> = if triple {
        vec![(0.0, 3)]
    } else if disc.abs() <= DISC_REL_TOL * scale {
        vec![(3.0 * q / p, 1), (-3.0 * q / (2.0 * p), 2)]
    } else if disc < 0.0 {
        let rho = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * rho)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|j| {
                let y = rho * (theta - 2.0 * std::f64::consts::PI * j as f64 / 3.0).cos();
                (y, 1)
            })
            .collect()
    } else {
        let sq = disc.sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        vec![(u + v, 1)]
    };

    let coeffs = [1.0, b1, c1, d1];
    let mut roots: Vec<RealRoot> = ys
        .drain(..)
        .map(|(y, mult)| {
            let x = y + shift;
            let value = if mult == 1 { polish(coeffs, x) } else { x };
            RealRoot {
                value,
                multiplicity: mult,
            }
        })
        .collect();
    roots.sort_by(|x, y| x.value.total_cmp(&y.value));

    let size = 1.0 + b1.abs() + c1.abs() + d1.abs();
    for r in &roots {
        let x = r.value;
        let mag = 1.0 + x.abs().powi(3) + b1.abs() * x * x + c1.abs() * x.abs() + d1.abs();
        // Repeated roots are only accurate to the square root of the precision.
        let tol = if r.multiplicity == 1 { 1e-9 } else { 1e-6 };
        if horner(coeffs, x).0.abs() > tol * mag.max(size) {
            return Err(Error::Polynomial(format!("root {x} failed verification")));
        }
    }
    Ok(CubicRoots {
        roots,
        depressed: (p, q),
        discriminant: disc,
    })
}

/// Same as [`solve_cubic`] with coefficients in ascending order of degree.
pub fn solve_cubic_poly(coeffs: &[f64]) -> Result<CubicRoots> {
    match *coeffs {
        [d, c, b, a] => solve_cubic(a, b, c, d),
        _ => Err(Error::Polynomial(format!(
            "expected 4 coefficients, got {}",
            coeffs.len()
        ))),
    }
}
