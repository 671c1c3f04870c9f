//! Kerr spacetime in Boyer–Lindquist coordinates.
//!
//! Geometric units throughout: lengths in GM/c², times in GM/c³, spin
//! `a = Jc/(GM²)` dimensionless.

use crate::error::{KerrError, Result};

/// Default distance from the poles used wherever `1/sin θ` appears.
pub const POLE_GUARD: f64 = 1e-9;

/// Black-hole parameters. Only the dimensionless spin is free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrParams {
    a: f64,
}

impl KerrParams {
    pub fn new(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) || a.is_nan() {
            return Err(KerrError::InvalidSpin(a));
        }
        Ok(Self { a })
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Outer horizon radius `r₊`.
    pub fn horizon(&self) -> f64 {
        horizon_radius_unchecked(self.a)
    }

    /// `Δ(r) = r² − 2r + a²`.
    #[inline]
    pub fn delta(&self, r: f64) -> f64 {
        r * r - 2.0 * r + self.a * self.a
    }
}

#[inline]
fn horizon_radius_unchecked(a: f64) -> f64 {
    1.0 + (1.0 - a * a).max(0.0).sqrt()
}

/// Outer root of `Δ(r) = 0`.
pub fn horizon_radius(a: f64) -> Result<f64> {
    KerrParams::new(a).map(|p| p.horizon())
}

/// The four scalar functions that build the metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricScalars {
    pub rho2: f64,
    pub delta: f64,
    pub a_big: f64,
    pub omega: f64,
}

/// A point of the exterior manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BLPoint {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl BLPoint {
    pub fn new(t: f64, r: f64, theta: f64, phi: f64) -> Self {
        Self { t, r, theta, phi }
    }
}

/// Clamp θ into `[guard, π − guard]`.
#[inline]
pub fn guard_theta(theta: f64, guard: f64) -> f64 {
    theta.clamp(guard, std::f64::consts::PI - guard)
}

/// Metric scalars without domain checks; used on hot paths.
#[inline]
pub(crate) fn scalars_raw(r: f64, theta: f64, a: f64) -> MetricScalars {
    let (s, c) = theta.sin_cos();
    let a2 = a * a;
    let rho2 = r * r + a2 * c * c;
    let delta = r * r - 2.0 * r + a2;
    let ra2 = r * r + a2;
    let a_big = ra2 * ra2 - a2 * delta * s * s;
    MetricScalars {
        rho2,
        delta,
        a_big,
        omega: 2.0 * r * a / a_big,
    }
}

pub fn metric_scalars(r: f64, theta: f64, params: &KerrParams) -> Result<MetricScalars> {
    let rp = params.horizon();
    if !(r > rp) || !r.is_finite() {
        return Err(KerrError::Domain(format!(
            "r = {r} is not outside the horizon r+ = {rp}"
        )));
    }
    let theta = guard_theta(theta, POLE_GUARD);
    Ok(scalars_raw(r, theta, params.a()))
}

/// Covariant components of the metric at (r, θ):
/// `(g_tt, g_tφ, g_φφ, g_rr, g_θθ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovariantMetric {
    pub g_tt: f64,
    pub g_tphi: f64,
    pub g_phiphi: f64,
    pub g_rr: f64,
    pub g_thth: f64,
}

impl CovariantMetric {
    pub fn at(r: f64, theta: f64, params: &KerrParams) -> Self {
        let a = params.a();
        let m = scalars_raw(r, theta, a);
        let s2 = theta.sin().powi(2);
        Self {
            g_tt: -(1.0 - 2.0 * r / m.rho2),
            g_tphi: -2.0 * a * r * s2 / m.rho2,
            g_phiphi: m.a_big * s2 / m.rho2,
            g_rr: m.rho2 / m.delta,
            g_thth: m.rho2,
        }
    }

    /// `g(u, v)` for vectors given as `[t, r, θ, φ]` components.
    pub fn dot(&self, u: &[f64; 4], v: &[f64; 4]) -> f64 {
        self.g_tt * u[0] * v[0]
            + self.g_tphi * (u[0] * v[3] + u[3] * v[0])
            + self.g_phiphi * u[3] * v[3]
            + self.g_rr * u[1] * v[1]
            + self.g_thth * u[2] * v[2]
    }

    /// Lower an index: `v_μ = g_μν v^ν`.
    pub fn lower(&self, v: &[f64; 4]) -> [f64; 4] {
        [
            self.g_tt * v[0] + self.g_tphi * v[3],
            self.g_rr * v[1],
            self.g_thth * v[2],
            self.g_tphi * v[0] + self.g_phiphi * v[3],
        ]
    }
}

/// Map to the Cartesian coordinates in which `r = const` surfaces are
/// confocal spheroids.
pub fn to_cartesian(point: &BLPoint, params: &KerrParams) -> (f64, f64, f64) {
    let a = params.a();
    let rho = (point.r * point.r + a * a).sqrt();
    let (st, ct) = point.theta.sin_cos();
    let (sp, cp) = point.phi.sin_cos();
    (rho * st * cp, rho * st * sp, point.r * ct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn bisect_delta_root(a: f64) -> f64 {
        // Outer root of Δ lies in [1, 2]; Δ(2) ≥ 0 and Δ(1) = a² − 1 ≤ 0.
        let d = |r: f64| r * r - 2.0 * r + a * a;
        let (mut lo, mut hi) = (1.0, 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if d(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn horizon_examples() {
        assert_eq!(horizon_radius(0.0).unwrap(), 2.0);
        assert_eq!(horizon_radius(1.0).unwrap(), 1.0);
        let r = horizon_radius(0.97).unwrap();
        assert!((r - bisect_delta_root(0.97)).abs() < 1e-12);
        assert!((r - 1.243_10).abs() < 1e-5);
        assert!(matches!(horizon_radius(1.01), Err(KerrError::InvalidSpin(_))));
        assert!(horizon_radius(-0.1).is_err());
        assert!(horizon_radius(f64::NAN).is_err());
    }

    #[test]
    fn horizon_decreasing_in_spin() {
        let mut prev = horizon_radius(0.0).unwrap();
        for k in 1..=100 {
            let r = horizon_radius(k as f64 / 100.0).unwrap();
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn delta_vanishes_on_horizon() {
        for k in 0..=20 {
            let p = KerrParams::new(k as f64 / 20.0).unwrap();
            assert!(p.delta(p.horizon()).abs() < 1e-14);
            assert!(p.delta(p.horizon() + 1e-6) > 0.0);
        }
    }

    #[test]
    fn scalars_schwarzschild() {
        let p = KerrParams::new(0.0).unwrap();
        let m = metric_scalars(3.0, FRAC_PI_2, &p).unwrap();
        assert!((m.rho2 - 9.0).abs() < 1e-14);
        assert!((m.delta - 3.0).abs() < 1e-14);
        assert!((m.a_big - 81.0).abs() < 1e-12);
        assert_eq!(m.omega, 0.0);
    }

    #[test]
    fn scalars_reject_horizon() {
        let p = KerrParams::new(1.0).unwrap();
        assert!(matches!(metric_scalars(1.0, 1.0, &p), Err(KerrError::Domain(_))));
        assert!(metric_scalars(0.5, 1.0, &p).is_err());
    }

    #[test]
    fn equatorial_rho_is_r() {
        for &a in &[0.1, 0.5, 0.99] {
            let p = KerrParams::new(a).unwrap();
            let m = metric_scalars(4.2, FRAC_PI_2, &p).unwrap();
            assert!((m.rho2 - 4.2 * 4.2).abs() < 1e-12);
        }
    }

    #[test]
    fn cartesian_examples() {
        let p = KerrParams::new(0.5).unwrap();
        let (x, y, z) = to_cartesian(&BLPoint::new(0.0, 4.0, 0.0, 1.3), &p);
        assert!(x.abs() < 1e-15 && y.abs() < 1e-15 && (z - 4.0).abs() < 1e-15);
        let p0 = KerrParams::new(0.0).unwrap();
        let (x, y, z) = to_cartesian(&BLPoint::new(0.0, 4.0, FRAC_PI_2, 0.0), &p0);
        assert!((x - 4.0).abs() < 1e-15 && y.abs() < 1e-15 && z.abs() < 1e-15);
        let p1 = KerrParams::new(1.0).unwrap();
        let (x, _, _) = to_cartesian(&BLPoint::new(0.0, 4.0, FRAC_PI_2, 0.0), &p1);
        assert!((x - 17f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn metric_lower_matches_dot() {
        let p = KerrParams::new(0.8).unwrap();
        let g = CovariantMetric::at(3.3, 1.1, &p);
        let u = [1.0, 0.2, -0.3, 0.05];
        let v = [0.4, -1.0, 0.7, 0.2];
        let lu = g.lower(&u);
        let via_lower: f64 = (0..4).map(|i| lu[i] * v[i]).sum();
        assert!((via_lower - g.dot(&u, &v)).abs() < 1e-14);
    }

    proptest::proptest! {
        #[test]
        fn spheroid_identity(a in 0.0f64..=1.0, r in 2.0f64..50.0, th in 0.01f64..3.13, ph in 0.0f64..std::f64::consts::TAU) {
            let p = KerrParams::new(a).unwrap();
            let (x, y, z) = to_cartesian(&BLPoint::new(0.0, r, th, ph), &p);
            let lhs = (x * x + y * y) / (r * r + a * a) + z * z / (r * r);
            proptest::prop_assert!((lhs - 1.0).abs() < 1e-12);
        }

        #[test]
        fn delta_positive_outside(a in 0.0f64..=1.0, dr in 1e-6f64..100.0) {
            let p = KerrParams::new(a).unwrap();
            proptest::prop_assert!(p.delta(p.horizon() + dr) > 0.0);
        }
    }
}
