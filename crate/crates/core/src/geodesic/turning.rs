use crate::kerr::KerrParams;

use super::{radial_potential, radial_potential_derivative};

/// A zero of `R` or `Θ`. `critical` marks a double root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoint {
    pub value: f64,
    pub critical: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TurningPoints {
    /// Zeros of `R` in `(r₊, ∞)`, ascending.
    pub radial: Vec<TurningPoint>,
    /// Zeros of `Θ` in `(0, π)`, ascending.
    pub polar: Vec<TurningPoint>,
}

const GRID_POINTS: usize = 600;

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Log-spaced grid over `(r₊, r_hi]` clustered toward the horizon.
fn radial_grid(r_plus: f64, r_hi: f64) -> Vec<f64> {
    let lo = (r_plus * 1e-12).max(1e-14);
    let span = r_hi - r_plus;
    let (l0, l1) = (lo.ln(), span.ln());
    (0..GRID_POINTS)
        .map(|i| r_plus + (l0 + (l1 - l0) * i as f64 / (GRID_POINTS - 1) as f64).exp())
        .collect()
}

/// Zeros of the radial potential in `(r₊, ∞)`.
pub fn radial_roots(lambda: f64, eta: f64, params: &KerrParams) -> Vec<TurningPoint> {
    let a = params.a();
    let k = eta + (lambda - a).powi(2);
    let r_plus = params.horizon();
    let c0 = (a * a - a * lambda).abs();
    let r_hi = (2.0 * (k.abs().sqrt() + c0.sqrt()) + 10.0).max(4.0 * r_plus);

    let f = |r: f64| radial_potential(r, lambda, eta, params);
    let df = |r: f64| radial_potential_derivative(r, lambda, eta, params);

    // Insert the extrema of R so it is monotone between consecutive nodes.
    let grid = radial_grid(r_plus, r_hi);
    let mut nodes = Vec::with_capacity(grid.len() + 4);
    let mut extrema = Vec::new();
    nodes.push(grid[0]);
    for w in grid.windows(2) {
        let (d0, d1) = (df(w[0]), df(w[1]));
        if d0 == 0.0 {
            extrema.push(w[0]);
        } else if (d0 < 0.0) != (d1 < 0.0) && d1 != 0.0 {
            let x = bisect(df, w[0], w[1]);
            extrema.push(x);
            nodes.push(x);
        }
        nodes.push(w[1]);
    }

    let scale = |r: f64| {
        let p = r * r + a * a - a * lambda;
        (p * p).max((k * params.delta(r)).abs()).max(1.0)
    };
    let values: Vec<f64> = nodes
        .iter()
        .map(|&r| {
            let v = f(r);
            if extrema.contains(&r) && v.abs() <= 1e-12 * scale(r) {
                0.0
            } else {
                v
            }
        })
        .collect();

    let mut roots = Vec::new();
    for i in 0..nodes.len() {
        if values[i] == 0.0 && extrema.contains(&nodes[i]) {
            roots.push(TurningPoint { value: nodes[i], critical: true });
            continue;
        }
        if i + 1 < nodes.len() && values[i] != 0.0 && values[i + 1] != 0.0 && (values[i] < 0.0) != (values[i + 1] < 0.0) {
            roots.push(TurningPoint { value: bisect(f, nodes[i], nodes[i + 1]), critical: false });
        }
    }
    roots
}

/// Zeros of the polar potential in `(0, π)`.
///
/// With `u = cos²θ`, `Θ(θ) sin²θ = 0` is the quadratic
/// `a²u² − (a² − η − λ²)u − η = 0` restricted to `u ∈ [0, 1)`.
pub fn polar_roots(lambda: f64, eta: f64, params: &KerrParams) -> Vec<TurningPoint> {
    let a2 = params.a().powi(2);
    let b = -(a2 - eta - lambda * lambda);
    let mut us: Vec<(f64, bool)> = Vec::new();
    if a2 == 0.0 {
        let denom = eta + lambda * lambda;
        if denom != 0.0 {
            us.push((eta / denom, eta == 0.0));
        }
    } else {
        let disc = b * b + 4.0 * a2 * eta;
        let tol = 1e-12 * (b * b).max(1.0);
        if disc.abs() <= tol {
            us.push((-b / (2.0 * a2), true));
        } else if disc > 0.0 {
            let sq = disc.sqrt();
            // Stable pair of roots.
            let q = -0.5 * (b + b.signum() * sq);
            let (u1, u2) = if q != 0.0 { (q / a2, -eta / q) } else { (0.0, 0.0) };
            us.push((u1, false));
            us.push((u2, false));
        }
    }

    let mut out = Vec::new();
    for (u, double) in us {
        if !(0.0..1.0).contains(&u) && u.abs() > 1e-15 {
            continue;
        }
        if u.abs() <= 1e-15 {
            // u = 0 is a double root in θ at the equator.
            out.push(TurningPoint { value: std::f64::consts::FRAC_PI_2, critical: true });
        } else {
            let t = u.sqrt().acos();
            out.push(TurningPoint { value: t, critical: double });
            out.push(TurningPoint { value: std::f64::consts::PI - t, critical: double });
        }
    }
    out.sort_by(|x, y| x.value.total_cmp(&y.value));
    out.dedup_by(|x, y| (x.value - y.value).abs() < 1e-14);
    out
}

pub fn turning_points(lambda: f64, eta: f64, params: &KerrParams) -> TurningPoints {
    TurningPoints {
        radial: radial_roots(lambda, eta, params),
        polar: polar_roots(lambda, eta, params),
    }
}

#[cfg(test)]
mod tests {
    use super::super::polar_potential;
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn eta_on_curve_for_lambda(lambda: f64, a: f64) -> f64 {
        // Independent bisection on λ(r_c) = λ over the prograde/retrograde range.
        let lam = |r: f64| ((1.0 + r) * a * a + r * r * (r - 3.0)) / (a * (1.0 - r));
        let r1 = 2.0 + 2.0 * ((2.0 / 3.0) * (-a).acos()).cos();
        let r2 = 2.0 + 2.0 * ((2.0 / 3.0) * a.acos()).cos();
        let r = bisect(|r| lam(r) - lambda, r1, r2);
        r.powi(3) * (4.0 * a * a - r * (r - 3.0).powi(2)) / (a * a * (r - 1.0).powi(2))
    }

    #[test]
    fn no_radial_roots_below_curve() {
        let p = KerrParams::new(0.97).unwrap();
        let eta_c = eta_on_curve_for_lambda(-0.6, 0.97);
        assert!(radial_roots(-0.6, eta_c - 1.0, &p).is_empty());
        let roots = radial_roots(-0.6, eta_c + 1.0, &p);
        assert_eq!(roots.len(), 2);
        assert!(roots[0].value < roots[1].value);
        for r in &roots {
            assert!(!r.critical);
            assert!(radial_potential(r.value, -0.6, eta_c + 1.0, &p).abs() < 1e-9);
        }
    }

    #[test]
    fn critical_radial_root_flagged() {
        let p = KerrParams::new(1.0).unwrap();
        let roots = radial_roots(-2.0, 27.0, &p);
        assert_eq!(roots.len(), 1);
        assert!(roots[0].critical);
        assert!((roots[0].value - 3.0).abs() < 1e-7);
    }

    #[test]
    fn equatorial_critical_polar_root() {
        let p = KerrParams::new(0.97).unwrap();
        // |λ| > a: Θ = cos²θ(a² − λ²/sin²θ) ≤ 0 with its only zero at the equator.
        let roots = polar_roots(1.5, 0.0, &p);
        assert_eq!(roots.len(), 1);
        assert!((roots[0].value - FRAC_PI_2).abs() < 1e-15);
        assert!(roots[0].critical);
        // |λ| < a adds two simple zeros where sin²θ = λ²/a².
        let roots = polar_roots(-0.6, 0.0, &p);
        assert_eq!(roots.len(), 3);
        assert!(roots[1].critical);
        assert!((roots[0].value.sin() - 0.6 / 0.97).abs() < 1e-12);
    }

    #[test]
    fn polar_roots_are_zeros() {
        let p = KerrParams::new(0.8).unwrap();
        for &(lam, eta) in &[(0.3, 2.0), (-1.5, 4.0), (0.2, -0.1), (0.0, 1.0)] {
            for t in polar_roots(lam, eta, &p) {
                assert!(polar_potential(t.value, lam, eta, &p).abs() < 1e-10, "{lam} {eta} {t:?}");
            }
        }
        // Vortical band: two zeros in the northern hemisphere, two in the southern.
        assert_eq!(polar_roots(0.2, -0.1, &p).len(), 4);
    }

    #[test]
    fn sigma_theta_point_is_double_root() {
        let a: f64 = 0.97;
        let p = KerrParams::new(a).unwrap();
        let th = 0.7_f64;
        let roots = polar_roots(a * th.sin().powi(2), -a * a * th.cos().powi(4), &p);
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.critical));
        assert!((roots[0].value - th).abs() < 1e-6);
    }
}
