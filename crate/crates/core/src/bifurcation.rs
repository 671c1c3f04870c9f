//! Bifurcation set in the plane of first integrals `(λ, η)`.
//!
//! `Σ⁽ʳ⁾` collects the values where `R` has a double root (spherical photon
//! orbits), `Σ₀⁽ᶿ⁾` and `Σ±⁽ᶿ⁾` those where `Θ` does. Crossing any of these
//! curves changes the number of turning points of a ray.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use crate::error::{KerrError, Result};
use crate::geodesic::{radial_potential, radial_roots};
use crate::kerr::KerrParams;

/// Smallest spin accepted by the `Σ⁽ʳ⁾` parametrization, which divides by `a`.
pub const MIN_SPIN: f64 = 1e-3;

/// Radii of the prograde (`r₁`) and retrograde (`r₂`) equatorial circular
/// photon orbits.
pub fn photon_ring_radii(params: &KerrParams) -> (f64, f64) {
    let a = params.a();
    // 2 + 2cos(⅔ arccos(∓a)); with arccos(−a) = π − arccos(a) the prograde
    // root expands to 2 − cos t + √3 sin t, which is exact at a = 1.
    let t = (2.0 / 3.0) * a.acos();
    let (s, c) = t.sin_cos();
    let r1 = 2.0 - c + 3f64.sqrt() * s;
    let r2 = 2.0 + 2.0 * c;
    (r1, r2)
}

/// `λ` on `Σ⁽ʳ⁾` as a function of the orbit radius. No range checks.
#[inline]
pub fn critical_lambda(r_c: f64, a: f64) -> f64 {
    ((1.0 + r_c) * a * a + r_c * r_c * (r_c - 3.0)) / (a * (1.0 - r_c))
}

/// `η` on `Σ⁽ʳ⁾` as a function of the orbit radius. No range checks.
#[inline]
pub fn critical_eta(r_c: f64, a: f64) -> f64 {
    r_c.powi(3) * (4.0 * a * a - r_c * (r_c - 3.0).powi(2)) / (a * a * (r_c - 1.0).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalBranch {
    SigmaR,
    SigmaTheta0,
    SigmaThetaPlus,
    SigmaThetaMinus,
}

impl CriticalBranch {
    pub fn label(self) -> &'static str {
        match self {
            CriticalBranch::SigmaR => "sigma_r",
            CriticalBranch::SigmaTheta0 => "sigma_theta_0",
            CriticalBranch::SigmaThetaPlus => "sigma_theta_plus",
            CriticalBranch::SigmaThetaMinus => "sigma_theta_minus",
        }
    }
}

/// A point on one of the bifurcation curves. `coordinate` is `r_c` on
/// `Σ⁽ʳ⁾` and `θ_c` on the polar branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalCurvePoint {
    pub coordinate: f64,
    pub lambda: f64,
    pub eta: f64,
    pub branch: CriticalBranch,
}

fn require_spin(params: &KerrParams) -> Result<()> {
    if params.a() < MIN_SPIN {
        return Err(KerrError::SpinTooSmall(params.a(), MIN_SPIN));
    }
    Ok(())
}

/// Point of `Σ⁽ʳ⁾` for a spherical orbit of radius `r_c ∈ [r₁, r₂]`.
pub fn sigma_r(r_c: f64, params: &KerrParams) -> Result<CriticalCurvePoint> {
    if params.a() == 0.0 {
        return Err(KerrError::SpinTooSmall(0.0, MIN_SPIN));
    }
    let (r1, r2) = photon_ring_radii(params);
    let slack = 1e-12 * r2;
    if !(r_c >= r1 - slack && r_c <= r2 + slack) || (r_c - 1.0).abs() < 1e-12 {
        return Err(KerrError::Domain(format!(
            "orbit radius {r_c} outside [{r1}, {r2}] or singular"
        )));
    }
    let a = params.a();
    Ok(CriticalCurvePoint {
        coordinate: r_c,
        lambda: critical_lambda(r_c, a),
        eta: critical_eta(r_c, a),
        branch: CriticalBranch::SigmaR,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarSign {
    Plus,
    Minus,
}

/// Point of `Σ±⁽ᶿ⁾`; at `θ_c = π/2` it lies on `Σ₀⁽ᶿ⁾` and is tagged so.
/// `θ_c ∈ {0, π}` returns the axis point `(0, −a²)` where the two branches meet.
pub fn sigma_theta(theta_c: f64, sign: PolarSign, params: &KerrParams) -> Result<CriticalCurvePoint> {
    if !(0.0..=PI).contains(&theta_c) {
        return Err(KerrError::Domain(format!("theta_c = {theta_c} outside [0, pi]")));
    }
    let a = params.a();
    let (s, c) = theta_c.sin_cos();
    let (lambda, branch) = match sign {
        PolarSign::Plus => (a * s * s, CriticalBranch::SigmaThetaPlus),
        PolarSign::Minus => (-a * s * s, CriticalBranch::SigmaThetaMinus),
    };
    let branch = if theta_c == FRAC_PI_2 { CriticalBranch::SigmaTheta0 } else { branch };
    Ok(CriticalCurvePoint {
        coordinate: theta_c,
        lambda,
        eta: -a * a * c.powi(4),
        branch,
    })
}

/// Whether `Θ(θ) ≥ 0` somewhere on `(0, π)`.
///
/// For `|λ| < a` the maximum of `Θ − η` is `(a − |λ|)²`, reached where
/// `sin²θ = |λ|/a`; otherwise it is `0` at the equator.
pub fn polar_feasible(lambda: f64, eta: f64, params: &KerrParams) -> bool {
    let a = params.a();
    let best = if lambda.abs() < a { (a - lambda.abs()).powi(2) } else { 0.0 };
    eta + best >= 0.0
}

/// Polar angle where `Θ` is largest for the given integrals.
pub fn polar_best_angle(lambda: f64, params: &KerrParams) -> f64 {
    let a = params.a();
    if lambda.abs() < a && a > 0.0 {
        (lambda.abs() / a).sqrt().asin()
    } else {
        FRAC_PI_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    HorizonInfinity,
    HorizonHorizon,
    InfinityInfinity,
    SphericalCritical,
    Forbidden,
}

impl TrajectoryKind {
    pub fn label(self) -> &'static str {
        match self {
            TrajectoryKind::HorizonInfinity => "horizon/infinity",
            TrajectoryKind::HorizonHorizon => "horizon/horizon",
            TrajectoryKind::InfinityInfinity => "infinity/infinity",
            TrajectoryKind::SphericalCritical => "spherical/critical",
            TrajectoryKind::Forbidden => "forbidden",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryClass {
    pub kind: TrajectoryKind,
    /// `η < 0`: the ray never crosses the equatorial plane.
    pub vortical: bool,
}

/// Tolerance on `|η − η(r_c(λ))|` for membership of `Σ⁽ʳ⁾`.
pub const ON_CURVE_TOL: f64 = 1e-10;

/// Orbit radius on `Σ⁽ʳ⁾` carrying the given `λ`, if any.
pub fn critical_radius_for_lambda(lambda: f64, params: &KerrParams) -> Option<f64> {
    let a = params.a();
    if a < MIN_SPIN {
        return None;
    }
    let (r1, r2) = photon_ring_radii(params);
    // λ(r_c) decreases on [r₁, r₂]; nudge off r = 1 at extremal spin.
    let lo = if (r1 - 1.0).abs() < 1e-9 { r1 + 1e-9 } else { r1 };
    let g = |r: f64| critical_lambda(r, a) - lambda;
    let (glo, ghi) = (g(lo), g(r2));
    if glo.is_nan() || ghi.is_nan() || (glo < 0.0) == (ghi < 0.0) {
        if glo == 0.0 {
            return Some(lo);
        }
        if ghi == 0.0 {
            return Some(r2);
        }
        return None;
    }
    let (mut x0, mut x1) = (lo, r2);
    for _ in 0..200 {
        let mid = 0.5 * (x0 + x1);
        if mid <= x0 || mid >= x1 {
            break;
        }
        if (g(mid) < 0.0) == (glo < 0.0) {
            x0 = mid;
        } else {
            x1 = mid;
        }
    }
    let mut r = 0.5 * (x0 + x1);
    // Newton polish.
    for _ in 0..3 {
        let h = 1e-7 * r;
        let d = (g(r + h) - g(r - h)) / (2.0 * h);
        if d != 0.0 {
            let next = r - g(r) / d;
            if next > lo && next < r2 {
                r = next;
            }
        }
    }
    Some(r)
}

/// Classify the ray with integrals `(λ, η)` that starts at `r_start`.
pub fn classify(lambda: f64, eta: f64, r_start: f64, params: &KerrParams) -> TrajectoryClass {
    let vortical = eta < 0.0;
    let forbidden = TrajectoryClass { kind: TrajectoryKind::Forbidden, vortical };
    if !polar_feasible(lambda, eta, params) || !(r_start > params.horizon()) {
        return forbidden;
    }
    if let Some(r_c) = critical_radius_for_lambda(lambda, params) {
        if (eta - critical_eta(r_c, params.a())).abs() < ON_CURVE_TOL {
            return TrajectoryClass { kind: TrajectoryKind::SphericalCritical, vortical };
        }
    }
    if radial_potential(r_start, lambda, eta, params) < 0.0 {
        return forbidden;
    }
    let roots = radial_roots(lambda, eta, params);
    if roots.iter().any(|t| t.critical) {
        return TrajectoryClass { kind: TrajectoryKind::SphericalCritical, vortical };
    }
    let kind = match roots.as_slice() {
        [] => TrajectoryKind::HorizonInfinity,
        [inner, .., outer] => {
            if r_start <= inner.value {
                TrajectoryKind::HorizonHorizon
            } else if r_start >= outer.value {
                TrajectoryKind::InfinityInfinity
            } else {
                TrajectoryKind::Forbidden
            }
        }
        // An odd count cannot occur since R(r₊) ≥ 0 and R(∞) = +∞; a lone
        // root means R touches zero at r₊ itself.
        [_] => TrajectoryKind::InfinityInfinity,
    };
    TrajectoryClass { kind, vortical }
}

/// Closed-form separatrix rate `Z`, taken positive.
///
/// On the critical level `R(r) = (r − r_c)² (r² + 2r_c r − 3r_c² + Z²)` with
/// `Z² = 4r_c ((r_c − 1)³ + 1 − a²)/(r_c − 1)²`.
pub fn separatrix_z(r_c: f64, params: &KerrParams) -> Result<f64> {
    let a = params.a();
    let radicand = (r_c - 1.0).powi(3) + 1.0 - a * a;
    if r_c <= 0.0 || radicand < 0.0 || (r_c - 1.0).abs() < 1e-12 {
        return Err(KerrError::Domain(format!("separatrix rate undefined at r_c = {r_c}")));
    }
    Ok(2.0 * r_c.sqrt() * radicand.sqrt() / (r_c - 1.0).abs())
}

/// Radius along the separatrix that starts at `r0` and tends to `r_c` as
/// `σ → +∞`.
pub fn separatrix_r(sigma: f64, r0: f64, r_c: f64, params: &KerrParams) -> Result<f64> {
    require_spin(params)?;
    let (r1, r2) = photon_ring_radii(params);
    if r_c < r1 - 1e-12 || r_c > r2 + 1e-12 {
        return Err(KerrError::Domain(format!("orbit radius {r_c} outside [{r1}, {r2}]")));
    }
    let z = separatrix_z(r_c, params)?;
    let x0 = r0 - r_c;
    if x0 == 0.0 {
        return Ok(r_c);
    }
    let s0_sq = z * z + (r0 + r_c).powi(2) - 4.0 * r_c * r_c;
    if s0_sq < 0.0 || r0 <= params.horizon() {
        return Err(KerrError::Domain(format!("no separatrix through r0 = {r0}")));
    }
    let s0 = s0_sq.sqrt();
    let (ch, sh) = ((z * sigma).cosh(), (z * sigma).sinh());
    let denom = (z * z + 2.0 * r_c * x0) * ch + z * s0 * sh - 2.0 * r_c * x0;
    Ok(r_c + z * z * x0 / denom)
}

/// One row of a separatrix table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparatrixSample {
    pub sigma: f64,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Tabulate the separatrix `r(σ)` on `[0, sigma_max]` together with `θ(σ)`
/// and `φ(σ)`. The ray starts on the equator moving toward the north pole
/// (`dθ/dσ = −√η` when η > 0), with `φ(0) = 0`.
pub fn separatrix_table(
    r0: f64,
    r_c: f64,
    sigma_max: f64,
    n: usize,
    params: &KerrParams,
) -> Result<Vec<SeparatrixSample>> {
    let crit = sigma_r(r_c, params)?;
    let a = params.a();
    let (lam, eta) = (crit.lambda, crit.eta);
    let n = n.max(2);
    let h = sigma_max / (n - 1) as f64;

    // θ obeys d²θ/dσ² = ½ Θ'(θ); φ is a quadrature. Classical RK4 with the
    // closed-form r(σ).
    let theta_rate = |th: f64| crate::geodesic::polar_potential_derivative(th, lam, eta, params) * 0.5;
    let phi_rate = |r: f64, th: f64| {
        let delta = params.delta(r);
        a / delta * (r * r + a * a - a * lam) - a + lam / th.sin().powi(2)
    };
    let mut theta = FRAC_PI_2;
    let eta = if eta.abs() < 1e-9 { 0.0 } else { eta };
    let mut p_theta = if eta > 0.0 { -eta.sqrt() } else { 0.0 };
    let mut phi = 0.0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let sigma = i as f64 * h;
        let r = separatrix_r(sigma, r0, r_c, params)?;
        out.push(SeparatrixSample { sigma, r, theta, phi });
        if i + 1 == n {
            break;
        }
        let r_mid = separatrix_r(sigma + 0.5 * h, r0, r_c, params)?;
        let r_end = separatrix_r(sigma + h, r0, r_c, params)?;
        let (t1, p1, f1) = (p_theta, theta_rate(theta), phi_rate(r, theta));
        let th2 = theta + 0.5 * h * t1;
        let (t2, p2, f2) = (p_theta + 0.5 * h * p1, theta_rate(th2), phi_rate(r_mid, th2));
        let th3 = theta + 0.5 * h * t2;
        let (t3, p3, f3) = (p_theta + 0.5 * h * p2, theta_rate(th3), phi_rate(r_mid, th3));
        let th4 = theta + h * t3;
        let (t4, p4, f4) = (p_theta + h * p3, theta_rate(th4), phi_rate(r_end, th4));
        theta += h / 6.0 * (t1 + 2.0 * t2 + 2.0 * t3 + t4);
        p_theta += h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
        phi += h / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
    }
    Ok(out)
}

/// Rectangular window in the `(λ, η)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub n_lambda: usize,
    pub eta_min: f64,
    pub eta_max: f64,
    pub n_eta: usize,
}

impl ScanGrid {
    pub fn lambda_at(&self, i: usize) -> f64 {
        lerp(self.lambda_min, self.lambda_max, i, self.n_lambda)
    }

    pub fn eta_at(&self, j: usize) -> f64 {
        lerp(self.eta_min, self.eta_max, j, self.n_eta)
    }
}

fn lerp(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if n <= 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterCell {
    pub lambda: f64,
    pub eta: f64,
    pub feasible: bool,
}

/// Whether the region `R ≥ 0, Θ ≥ 0` is non-empty for these integrals.
pub fn motion_feasible(lambda: f64, eta: f64, params: &KerrParams) -> bool {
    if !polar_feasible(lambda, eta, params) {
        return false;
    }
    // R is a monic quartic, so it is positive for large enough r.
    let k = eta + (lambda - params.a()).powi(2);
    let r_far = params.horizon() + 2.0 * k.abs().sqrt() + 10.0;
    radial_potential(r_far, lambda, eta, params) >= 0.0
}

/// Feasibility raster over the grid, `λ` varying fastest.
pub fn diagram_scan(params: &KerrParams, grid: &ScanGrid) -> Vec<RasterCell> {
    let mut out = Vec::with_capacity(grid.n_lambda * grid.n_eta);
    for j in 0..grid.n_eta {
        let eta = grid.eta_at(j);
        for i in 0..grid.n_lambda {
            let lambda = grid.lambda_at(i);
            out.push(RasterCell { lambda, eta, feasible: motion_feasible(lambda, eta, params) });
        }
    }
    out
}

/// Uniform samples of `Σ⁽ʳ⁾` in `r_c` over `[r₁, r₂]`.
pub fn sample_sigma_r(params: &KerrParams, n: usize) -> Result<Vec<CriticalCurvePoint>> {
    require_spin(params)?;
    let (r1, r2) = photon_ring_radii(params);
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let mut r = lerp(r1, r2, i, n);
            if (r - 1.0).abs() < 1e-9 {
                r = 1.0 + 1e-9;
            }
            sigma_r(r, params)
        })
        .collect()
}

/// Samples of one polar branch for `θ_c ∈ [0, π/2]`, including the axis
/// point `θ_c = 0`.
pub fn sample_sigma_theta(params: &KerrParams, n: usize, sign: PolarSign) -> Vec<CriticalCurvePoint> {
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let th = lerp(0.0, FRAC_PI_2, i, n);
            let mut p = sigma_theta(th, sign, params).expect("theta in range");
            // Keep the branch tag at the equatorial end; the same point also
            // belongs to Σ₀.
            p.branch = match sign {
                PolarSign::Plus => CriticalBranch::SigmaThetaPlus,
                PolarSign::Minus => CriticalBranch::SigmaThetaMinus,
            };
            p
        })
        .collect()
}

/// The line `η = 0` over `[lambda_min, lambda_max]`.
pub fn sample_sigma_theta0(lambda_min: f64, lambda_max: f64, n: usize) -> Vec<CriticalCurvePoint> {
    let n = n.max(2);
    (0..n)
        .map(|i| CriticalCurvePoint {
            coordinate: FRAC_PI_2,
            lambda: lerp(lambda_min, lambda_max, i, n),
            eta: 0.0,
            branch: CriticalBranch::SigmaTheta0,
        })
        .collect()
}

pub fn write_curve_csv<W: Write>(out: &mut W, points: &[CriticalCurvePoint]) -> std::io::Result<()> {
    writeln!(out, "r_c,lambda,eta,branch")?;
    for p in points {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{}", p.coordinate, p.lambda, p.eta, p.branch.label())?;
    }
    Ok(())
}

pub fn write_raster_csv<W: Write>(out: &mut W, cells: &[RasterCell]) -> std::io::Result<()> {
    writeln!(out, "lambda,eta,feasible")?;
    for c in cells {
        writeln!(out, "{:.16e},{:.16e},{}", c.lambda, c.eta, u8::from(c.feasible))?;
    }
    Ok(())
}

pub fn write_separatrix_csv<W: Write>(out: &mut W, rows: &[SeparatrixSample]) -> std::io::Result<()> {
    writeln!(out, "sigma,r,theta,phi")?;
    for s in rows {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", s.sigma, s.r, s.theta, s.phi)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::{polar_potential, polar_potential_derivative, radial_potential_derivative};

    fn p(a: f64) -> KerrParams {
        KerrParams::new(a).unwrap()
    }

    #[test]
    fn ring_radii_limits() {
        let (r1, r2) = photon_ring_radii(&p(0.0));
        assert!((r1 - 3.0).abs() < 1e-14 && (r2 - 3.0).abs() < 1e-14);
        let (r1, r2) = photon_ring_radii(&p(1.0));
        assert!((r1 - 1.0).abs() < 1e-14 && (r2 - 4.0).abs() < 1e-14);
        // Equatorial circular photon orbits solve r (r − 3)² = 4a².
        for a in [0.1, 0.5, 0.97] {
            let (r1, r2) = photon_ring_radii(&p(a));
            for r in [r1, r2] {
                assert!((r * (r - 3.0).powi(2) - 4.0 * a * a).abs() < 1e-12);
            }
            assert!(r1 < 3.0 && r2 > 3.0);
        }
    }

    #[test]
    fn sigma_r_double_root() {
        let params = p(1.0);
        let c = sigma_r(3.0, &params).unwrap();
        assert!((c.lambda + 2.0).abs() < 1e-14 && (c.eta - 27.0).abs() < 1e-12);
        assert!(radial_potential(3.0, c.lambda, c.eta, &params).abs() < 1e-10);
        assert!(radial_potential_derivative(3.0, c.lambda, c.eta, &params).abs() < 1e-10);
    }

    #[test]
    fn delta_points_have_zero_eta() {
        let params = p(0.97);
        let (r1, r2) = photon_ring_radii(&params);
        let d1 = sigma_r(r1, &params).unwrap();
        let d2 = sigma_r(r2, &params).unwrap();
        assert!(d1.eta.abs() < 1e-10 && d2.eta.abs() < 1e-10);
        // dφ/dσ on the equatorial circles: prograde at δ₁, retrograde at δ₂.
        let a = params.a();
        let rate = |r: f64, lam: f64| a / params.delta(r) * (r * r + a * a - a * lam) - a + lam;
        assert!(rate(r1, d1.lambda) > 0.0);
        assert!(rate(r2, d2.lambda) < 0.0);
    }

    #[test]
    fn sigma_r_errors() {
        assert!(matches!(sigma_r(3.0, &p(0.0)), Err(KerrError::SpinTooSmall(..))));
        assert!(matches!(sigma_r(5.0, &p(0.5)), Err(KerrError::Domain(_))));
    }

    #[test]
    fn sigma_theta_examples() {
        let params = p(0.97);
        let q = sigma_theta(FRAC_PI_2, PolarSign::Plus, &params).unwrap();
        assert!((q.lambda - 0.97).abs() < 1e-15 && q.eta.abs() < 1e-30);
        assert_eq!(q.branch, CriticalBranch::SigmaTheta0);
        for s in [PolarSign::Plus, PolarSign::Minus] {
            for th in [0.0, PI] {
                let q = sigma_theta(th, s, &params).unwrap();
                assert!(q.lambda.abs() < 1e-15 && (q.eta + 0.97 * 0.97).abs() < 1e-15);
            }
        }
        let q = sigma_theta(PI / 4.0, PolarSign::Minus, &params).unwrap();
        assert!((q.lambda + 0.485).abs() < 1e-12 && (q.eta + 0.235_225).abs() < 1e-12);
        let th = PI / 4.0;
        assert!(polar_potential(th, q.lambda, q.eta, &params).abs() < 1e-12);
        assert!(polar_potential_derivative(th, q.lambda, q.eta, &params).abs() < 1e-12);
    }

    #[test]
    fn classify_examples() {
        let params = p(0.97);
        let r_c = critical_radius_for_lambda(-0.6, &params).unwrap();
        let eta_c = critical_eta(r_c, 0.97);
        let below = classify(-0.6, eta_c - 2.0, 10.0, &params);
        assert_eq!(below.kind, TrajectoryKind::HorizonInfinity);
        let above_in = classify(-0.6, eta_c + 2.0, params.horizon() + 0.01, &params);
        assert_eq!(above_in.kind, TrajectoryKind::HorizonHorizon);
        let above_out = classify(-0.6, eta_c + 2.0, 50.0, &params);
        assert_eq!(above_out.kind, TrajectoryKind::InfinityInfinity);
        let between = classify(-0.6, eta_c + 2.0, r_c, &params);
        assert_eq!(between.kind, TrajectoryKind::Forbidden);
        let on = classify(-0.6, eta_c, 10.0, &params);
        assert_eq!(on.kind, TrajectoryKind::SphericalCritical);
        assert!(!on.vortical);
    }

    #[test]
    fn spurious_branch_is_forbidden() {
        let a: f64 = 0.97;
        let params = p(a);
        for &rc in &[1.5, 2.5, 3.5] {
            let lam = (a * a + rc * rc) / a;
            let eta = -rc.powi(4) / a.powi(2);
            assert!(radial_potential(rc, lam, eta, &params).abs() < 1e-9);
            assert!(radial_potential_derivative(rc, lam, eta, &params).abs() < 1e-9);
            assert_eq!(classify(lam, eta, 10.0, &params).kind, TrajectoryKind::Forbidden);
        }
    }

    #[test]
    fn vortical_flag() {
        let params = p(0.9);
        let c = classify(0.1, -0.2, 5.0, &params);
        assert!(c.vortical);
        assert_ne!(c.kind, TrajectoryKind::Forbidden);
        assert!(!classify(0.1, 0.2, 5.0, &params).vortical);
    }

    #[test]
    fn z_squared_matches_factorization() {
        // Z² = 4r_c² − (η + (λ − a)²)/r_c from matching the quartic's r coefficient.
        let params = p(0.97);
        for &rc in &[1.5, 2.0, 2.7, 3.5] {
            let c = sigma_r(rc, &params).unwrap();
            let z = separatrix_z(rc, &params).unwrap();
            let k = c.eta + (c.lambda - 0.97f64).powi(2);
            assert!((z * z - (4.0 * rc * rc - k / rc)).abs() < 1e-10 * z * z);
        }
    }

    #[test]
    fn squared_closed_form_equals_potential() {
        let params = p(0.97);
        for &rc in &[1.4, 2.2, 3.1] {
            let c = sigma_r(rc, &params).unwrap();
            let z = separatrix_z(rc, &params).unwrap();
            for &r in &[1.5, 2.0, 4.0, 10.0, 30.0] {
                let lhs = (r - rc).powi(2) * (r * r + 2.0 * rc * r - 3.0 * rc * rc + z * z);
                let rr = radial_potential(r, c.lambda, c.eta, &params);
                assert!((lhs - rr).abs() < 1e-9 * rr.abs().max(1.0), "{rc} {r}");
            }
        }
    }

    #[test]
    fn separatrix_endpoints() {
        let params = p(0.97);
        let rc = 2.5;
        assert!((separatrix_r(0.0, 10.0, rc, &params).unwrap() - 10.0).abs() < 1e-13);
        let mut prev = 10.0;
        for k in 1..60 {
            let r = separatrix_r(k as f64 * 0.1, 10.0, rc, &params).unwrap();
            assert!(r < prev && r > rc);
            prev = r;
        }
        assert!((separatrix_r(40.0, 10.0, rc, &params).unwrap() - rc).abs() < 1e-12);
        assert_eq!(separatrix_r(3.0, rc, rc, &params).unwrap(), rc);
    }

    #[test]
    fn raster_examples() {
        let params = p(0.97);
        assert!(!motion_feasible(0.0, -0.97 * 0.97 - 0.1, &params));
        assert!(motion_feasible(3.0, 0.5, &params));
        let grid = ScanGrid { lambda_min: -1.0, lambda_max: 1.0, n_lambda: 3, eta_min: -1.0, eta_max: 1.0, n_eta: 3 };
        let cells = diagram_scan(&params, &grid);
        assert_eq!(cells.len(), 9);
        assert!(cells.iter().filter(|c| c.eta > 0.0).all(|c| c.feasible));
    }

    #[test]
    fn polar_feasibility_matches_brute_force() {
        let params = p(0.8);
        for i in 0..25 {
            for j in 0..25 {
                let lam = -1.2 + 2.4 * i as f64 / 24.0;
                let eta = -0.8 + 1.0 * j as f64 / 24.0;
                let brute = (1..4000).any(|k| polar_potential(PI * k as f64 / 4000.0, lam, eta, &params) >= -1e-9);
                let fast = polar_feasible(lam, eta, &params);
                if brute != fast {
                    // Only tolerate disagreement right at the boundary curve.
                    let best = if lam.abs() < 0.8 { (0.8 - lam.abs()).powi(2) } else { 0.0 };
                    assert!((eta + best).abs() < 1e-3, "{lam} {eta}");
                }
            }
        }
    }

    #[test]
    fn separatrix_table_equatorial_delta_point() {
        let params = p(0.97);
        let (r1, r2) = photon_ring_radii(&params);
        for (rc, sign) in [(r1, 1.0), (r2, -1.0)] {
            let rows = separatrix_table(10.0, rc, 5.0, 200, &params).unwrap();
            for w in rows.windows(2) {
                assert!((w[1].phi - w[0].phi) * sign > 0.0);
                assert!((w[1].theta - FRAC_PI_2).abs() < 1e-12);
            }
        }
        let flat = separatrix_table(2.0, 2.0, 1.0, 5, &params).unwrap();
        assert!(flat.iter().all(|s| s.r == 2.0));
    }
}
