//! Scalar and planar root finding used by the fixed-point solvers.

/// Bisection on a bracket `[lo, hi]` with `f(lo)` and `f(hi)` of opposite sign
/// (a zero at an endpoint is returned directly).
///
/// Midpoints are geometric while the bracket is positive and spans more than
/// a factor of four, so brackets over many decades converge quickly.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..400 {
        let mid = if lo > 0.0 && hi > 4.0 * lo {
            (lo * hi).sqrt()
        } else {
            lo + 0.5 * (hi - lo)
        };
        if mid <= lo.min(hi) || mid >= hi.max(lo) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(if flo.abs() <= f(hi).abs() { lo } else { hi })
}

/// Expands `hi` by doubling until `f(hi)` has the sign of `target_sign`.
pub fn expand_up<F: FnMut(f64) -> f64>(mut f: F, start: f64, target_sign: f64) -> Option<f64> {
    let mut hi = start;
    for _ in 0..2100 {
        let v = f(hi);
        if v.is_finite() && v.signum() == target_sign {
            return Some(hi);
        }
        hi *= 2.0;
        if !hi.is_finite() {
            return None;
        }
    }
    None
}

/// Shrinks `lo` by halving until `f(lo)` has the sign of `target_sign`.
pub fn expand_down<F: FnMut(f64) -> f64>(mut f: F, start: f64, target_sign: f64) -> Option<f64> {
    let mut lo = start;
    for _ in 0..2100 {
        let v = f(lo);
        if v.is_finite() && v.signum() == target_sign {
            return Some(lo);
        }
        lo *= 0.5;
        if lo == 0.0 {
            return None;
        }
    }
    None
}

/// Golden-section search for a local minimum of `f` on `[a, b]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Every root of `f` visible on `grid` (sorted ascending).
///
/// Sign changes between neighbours are bisected. Interior local extrema of
/// `|f|` without a sign change are refined by golden section; a refined
/// extremum that crosses zero yields two roots, and one that touches zero
/// within `touch_tol` yields one (double) root.
pub fn roots_on_grid<F: Fn(f64) -> f64>(f: F, grid: &[f64], touch_tol: f64) -> Vec<f64> {
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    roots_on_sampled(f, grid, &vals, touch_tol)
}

/// [`roots_on_grid`] with the grid values already computed (`vals[i] = f(grid[i])`).
pub fn roots_on_sampled<F: Fn(f64) -> f64>(
    f: F,
    grid: &[f64],
    vals: &[f64],
    touch_tol: f64,
) -> Vec<f64> {
    let mut roots = Vec::new();
    for i in 0..grid.len().saturating_sub(1) {
        let (a, b) = (vals[i], vals[i + 1]);
        if !(a.is_finite() && b.is_finite()) {
            continue;
        }
        if a == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if a.signum() != b.signum() && b != 0.0 {
            if let Some(r) = bisect(&f, grid[i], grid[i + 1]) {
                roots.push(r);
            }
        }
    }
    if let (Some(&last), Some(&x)) = (vals.last(), grid.last()) {
        if last == 0.0 {
            roots.push(x);
        }
    }
    for i in 1..grid.len().saturating_sub(1) {
        let (a, b, c) = (vals[i - 1], vals[i], vals[i + 1]);
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            continue;
        }
        let same_sign = a.signum() == b.signum() && b.signum() == c.signum() && b != 0.0;
        if !same_sign || !(b.abs() <= a.abs() && b.abs() <= c.abs()) {
            continue;
        }
        // A smooth dip to zero between samples has depth comparable to the
        // neighbouring differences; rounding noise on a plateau does not.
        if b.abs() > 4.0 * ((a - b).abs() + (c - b).abs()) {
            continue;
        }
        let s = b.signum();
        let (xm, fm) = golden_min(|x| s * f(x), grid[i - 1], grid[i + 1]);
        if fm < 0.0 {
            roots.extend(bisect(&f, grid[i - 1], xm));
            roots.extend(bisect(&f, xm, grid[i + 1]));
        } else if fm <= touch_tol {
            roots.push(xm);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(b.abs()));
    roots
}

/// Interior local extrema of `f` sampled on `grid`, refined by golden section.
/// Returns `(x, f(x), is_max)` triples.
pub fn extrema_on_grid<F: Fn(f64) -> f64>(f: F, grid: &[f64]) -> Vec<(f64, f64, bool)> {
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 1..grid.len().saturating_sub(1) {
        let (a, b, c) = (vals[i - 1], vals[i], vals[i + 1]);
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            continue;
        }
        if b >= a && b > c || b > a && b >= c {
            let (x, v) = golden_min(|x| -f(x), grid[i - 1], grid[i + 1]);
            out.push((x, -v, true));
        } else if b <= a && b < c || b < a && b <= c {
            let (x, v) = golden_min(&f, grid[i - 1], grid[i + 1]);
            out.push((x, v, false));
        }
    }
    out
}

/// Damped Newton on a planar system `g(u) = 0` with a central-difference Jacobian.
///
/// Returns the converged point when `max |g| <= tol`.
pub fn newton2<G: Fn([f64; 2]) -> [f64; 2]>(g: G, start: [f64; 2], tol: f64) -> Option<[f64; 2]> {
    let norm = |v: [f64; 2]| v[0].abs().max(v[1].abs());
    let mut u = start;
    let mut gu = g(u);
    if !norm(gu).is_finite() {
        return None;
    }
    for _ in 0..100 {
        if norm(gu) <= tol {
            return Some(u);
        }
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let h = 1e-6 * u[j].abs().max(1.0);
            let mut up = u;
            let mut dn = u;
            up[j] += h;
            dn[j] -= h;
            let (gp, gd) = (g(up), g(dn));
            for i in 0..2 {
                jac[i][j] = (gp[i] - gd[i]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let step = [
            (jac[1][1] * gu[0] - jac[0][1] * gu[1]) / det,
            (jac[0][0] * gu[1] - jac[1][0] * gu[0]) / det,
        ];
        let mut damping = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let cand = [u[0] - damping * step[0], u[1] - damping * step[1]];
            let gc = g(cand);
            if norm(gc).is_finite() && norm(gc) < norm(gu) {
                u = cand;
                gu = gc;
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (norm(gu) <= tol).then_some(u)
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Running Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 4.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        assert!(bisect(|x| x * x + 1.0, 0.0, 4.0).is_none());
        let r = bisect(|x: f64| x.ln() - 30.0, 1.0, 1e20).unwrap();
        assert!((r.ln() - 30.0).abs() < 1e-13);
    }

    #[test]
    fn grid_roots_include_tangencies() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 10.0).collect();
        // Two roots 4.0001 and 4.0003 inside one grid cell.
        let f = |x: f64| (x - 4.0001) * (x - 4.0003);
        let r = roots_on_grid(f, &grid, 1e-14);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 4.0001).abs() < 1e-12 && (r[1] - 4.0003).abs() < 1e-12);
        // Simple roots.
        let r = roots_on_grid(|x| (x - 1.23) * (x - 7.7), &grid, 1e-14);
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn golden_section_minimum() {
        let (x, v) = golden_min(|x| (x - 0.3).powi(2) + 1.0, -2.0, 5.0);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn newton_planar() {
        let g = |u: [f64; 2]| [u[0] * u[0] + u[1] * u[1] - 4.0, u[0] - u[1]];
        let r = newton2(g, [1.0, 0.5], 1e-14).unwrap();
        assert!((r[0] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_is_accurate() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }
}
