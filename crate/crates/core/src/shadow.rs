//! The shadow boundary on the observer's sky and the map between sky
//! directions and rays.
//!
//! A sky direction is a unit vector `N = (sin α cos β, sin α sin β, cos α)`
//! on the frame legs `(e_θ, e_φ, e_r)`. Since `e_r` points toward decreasing
//! `r`, `α = 0` looks straight at the hole.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use crate::bifurcation::{critical_eta, critical_lambda, critical_radius_for_lambda, photon_ring_radii, separatrix_z, MIN_SPIN};
use crate::error::{KerrError, Result};
use crate::geodesic::{ConservedSet, PhaseState};
use crate::kerr::{BLPoint, CovariantMetric, KerrParams};
use crate::observer::{tetrad, ObserverSpec, Tetrad};

/// Slack allowed on `arccos` arguments and on `Θ*` before an error is raised.
pub const ANGLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionAngles {
    pub alpha: f64,
    pub beta: f64,
}

impl DirectionAngles {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    /// `(N₁, N₂, N₃)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (sa, ca) = self.alpha.sin_cos();
        let (sb, cb) = self.beta.sin_cos();
        [sa * cb, sa * sb, ca]
    }
}

/// Stereographic image `(X, Y)` of a sky direction.
pub fn stereographic(angles: DirectionAngles) -> Result<(f64, f64)> {
    if !(angles.alpha < PI) {
        return Err(KerrError::ProjectionPole);
    }
    let k = 2.0 * (0.5 * angles.alpha).tan();
    let (sb, cb) = angles.beta.sin_cos();
    Ok((k * sb, k * cb))
}

/// Inverse of [`stereographic`]; `β ∈ [0, 2π)`.
pub fn inverse_stereographic(x: f64, y: f64) -> DirectionAngles {
    let alpha = 2.0 * (0.5 * x.hypot(y)).atan();
    let mut beta = x.atan2(y);
    if beta < 0.0 {
        beta += TAU;
    }
    DirectionAngles { alpha, beta }
}

/// Everything about an observer that ray construction needs, computed once.
#[derive(Debug, Clone, Copy)]
pub struct ObserverFrame {
    pub obs: ObserverSpec,
    pub params: KerrParams,
    pub tetrad: Tetrad,
    metric: CovariantMetric,
    rho0: f64,
    sqrt_delta0: f64,
}

impl ObserverFrame {
    pub fn new(obs: &ObserverSpec, params: &KerrParams) -> Result<Self> {
        let tetrad = tetrad(obs, params)?;
        let sc = obs.scalars(params);
        Ok(Self {
            obs: *obs,
            params: *params,
            tetrad,
            metric: CovariantMetric::at(obs.r0, obs.theta0, params),
            rho0: sc.rho0,
            sqrt_delta0: sc.delta0.sqrt(),
        })
    }

    /// Null ray arriving at the observer from sky direction `angles`,
    /// normalized to `E = 1`.
    ///
    /// Rays with `E ≤ 0` (possible only inside the ergosphere) cannot be
    /// rescaled to unit energy and are reported as [`KerrError::DegenerateRay`];
    /// such rays never reach infinity.
    pub fn ray(&self, angles: DirectionAngles) -> Result<(PhaseState, ConservedSet)> {
        let n = angles.unit_vector();
        let t = &self.tetrad;
        let mut w = [0.0; 4];
        for k in 0..4 {
            w[k] = -t.e_t[k] + n[0] * t.e_theta[k] + n[1] * t.e_phi[k] + n[2] * t.e_r[k];
        }
        let p = self.metric.lower(&w);
        // `w` is past-directed, so its E is negative for physical rays; the
        // scale W = 1/E₁ flips it to the future-directed momentum with E = 1.
        let e1 = -p[0];
        if !(e1 < 0.0) {
            return Err(KerrError::DegenerateRay);
        }
        let scale = 1.0 / e1;
        let (p_r, p_theta, lambda) = (p[1] * scale, p[2] * scale, p[3] * scale);
        let a = self.params.a();
        let (s, c) = self.obs.theta0.sin_cos();
        let eta = p_theta * p_theta - c * c * (a * a - lambda * lambda / (s * s));
        let point = BLPoint::new(0.0, self.obs.r0, self.obs.theta0, self.obs.phi0);
        Ok((PhaseState::new(point, p_r, p_theta), ConservedSet::from_lambda_eta(lambda, eta, &self.params)))
    }

    /// Sky direction of a ray located at the observer.
    pub fn angles(&self, state: &PhaseState, c: &ConservedSet) -> Result<DirectionAngles> {
        let t = &self.tetrad;
        let local_energy = t.u0 * (c.energy - self.obs.omega * c.angular_momentum);
        if !(local_energy.abs() > 1e-300) || !local_energy.is_finite() {
            return Err(KerrError::DegenerateRay);
        }
        let n3 = self.sqrt_delta0 * state.p_r / (self.rho0 * local_energy);
        let n1 = state.p_theta / (self.rho0 * local_energy);
        let n2 = (c.energy * t.e_phi[0] - c.angular_momentum * t.e_phi[3]) / local_energy;
        let alpha = n1.hypot(n2).atan2(n3);
        let mut beta = n2.atan2(n1);
        if beta < 0.0 {
            beta += TAU;
        }
        Ok(DirectionAngles { alpha, beta })
    }
}

/// Phase state and integrals of the ray seen in direction `angles`.
pub fn ray_from_angles(
    angles: DirectionAngles,
    obs: &ObserverSpec,
    params: &KerrParams,
) -> Result<(PhaseState, ConservedSet)> {
    ObserverFrame::new(obs, params)?.ray(angles)
}

/// Sky direction of a ray at the observer's position.
pub fn angles_from_ray(
    state: &PhaseState,
    c: &ConservedSet,
    obs: &ObserverSpec,
    params: &KerrParams,
) -> Result<DirectionAngles> {
    ObserverFrame::new(obs, params)?.angles(state, c)
}

/// `Θ*(r_c) = Θ(θ₀)` evaluated on the critical integrals.
pub fn theta_star(r_c: f64, theta0: f64, params: &KerrParams) -> f64 {
    let a = params.a();
    let lam = critical_lambda(r_c, a);
    let (s, c) = theta0.sin_cos();
    critical_eta(r_c, a) + c * c * (a * a - lam * lam / (s * s))
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bounds `r₁* < r₂*` of the orbit radii whose rays reach the observer's
/// latitude.
pub fn theta_star_roots(obs: &ObserverSpec, params: &KerrParams) -> Result<(f64, f64)> {
    if params.a() < MIN_SPIN {
        return Err(KerrError::SpinTooSmall(params.a(), MIN_SPIN));
    }
    let (r1, r2) = photon_ring_radii(params);
    let lo = if (r1 - 1.0).abs() < 1e-9 { 1.0 + 1e-9 } else { r1 };
    if obs.theta0.cos().abs() < 1e-15 {
        return Ok((lo, r2));
    }
    // Θ* is positive at the polar orbit (λ = 0) and non-positive at r₁, r₂.
    let mid = critical_radius_for_lambda(0.0, params)
        .ok_or_else(|| KerrError::Domain("no polar spherical orbit".into()))?;
    let f = |r: f64| theta_star(r, obs.theta0, params);
    let root_lo = if f(lo) >= 0.0 { lo } else { bisect(f, lo, mid) };
    let root_hi = if f(r2) >= 0.0 { r2 } else { bisect(f, mid, r2) };
    Ok((root_lo, root_hi))
}

fn clamp_unit(x: f64, what: &str) -> Result<f64> {
    if x.abs() > 1.0 + ANGLE_SLACK || x.is_nan() {
        return Err(KerrError::Domain(format!("{what} argument {x} outside [-1, 1]")));
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// `(B_α, B_β)` for the separatrix ray of the spherical orbit `r_c`.
///
/// The `B_α` numerator keeps the sign of `r₀ − r_c`, so `α = B_α` on both
/// sides of `r₀`. `B_β ∈ [−π/2, π/2]`, with `±π/2` where `Θ* = 0`.
pub fn boundary_angles(r_c: f64, obs: &ObserverSpec, params: &KerrParams) -> Result<(f64, f64)> {
    let u0 = crate::observer::u_time_component(obs, params)?;
    boundary_angles_with(r_c, obs, params, u0)
}

fn boundary_angles_with(r_c: f64, obs: &ObserverSpec, params: &KerrParams, u0: f64) -> Result<(f64, f64)> {
    let a = params.a();
    if a < MIN_SPIN {
        return Err(KerrError::SpinTooSmall(a, MIN_SPIN));
    }
    let sc = obs.scalars(params);
    let (r0, w) = (obs.r0, obs.omega);
    let (rho0, s) = (sc.rho0, sc.sin_theta0);
    let sq0 = sc.delta0.sqrt();
    let lam = critical_lambda(r_c, a);
    let z = separatrix_z(r_c, params)?;

    let quad = (r0 * r0 + 2.0 * r_c * r0 - 3.0 * r_c * r_c + z * z).max(0.0);
    let cos_arg = (r0 - r_c) * quad.sqrt() / (rho0 * u0 * (1.0 - lam * w) * sq0);
    let b_alpha = clamp_unit(cos_arg, "B_alpha")?.acos();

    let ts = theta_star(r_c, obs.theta0, params);
    let scale = 1.0 + lam * lam / (s * s) + a * a;
    if ts < -ANGLE_SLACK * scale {
        return Err(KerrError::Domain(format!("Theta* = {ts} < 0 at r_c = {r_c}")));
    }
    let s2 = s * s;
    let num = u0
        * (rho0 * rho0 * (lam - w * (r0 * r0 + a * a) * s2)
            + 2.0 * r0 * (1.0 - a * w * s2) * (a * s2 - lam));
    let den = rho0 * s * sq0 * ts.max(0.0).sqrt();
    let b_beta = num.atan2(den);
    Ok((b_alpha, b_beta))
}

/// Which clause of the boundary description produced a sample: `Outer`
/// for `r_c ≤ r₀` (the ray leaves the observer outward), `Inner` for
/// `r_c > r₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShadowCase {
    Outer,
    Inner,
}

impl ShadowCase {
    pub fn tag(self) -> u8 {
        match self {
            ShadowCase::Outer => 1,
            ShadowCase::Inner => 2,
        }
    }
}

/// Observer position relative to `[r₁*, r₂*]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShadowRegime {
    /// `r₀ > r₂*`.
    Outside,
    /// `r₀ < r₁*`.
    Inside,
    /// `r₁* ≤ r₀ ≤ r₂*`.
    Between,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowSample {
    pub r_c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub x: f64,
    pub y: f64,
    pub case: ShadowCase,
}

/// Closed boundary curve: the `β = π + B_β` branch with `r_c` increasing,
/// followed by the `β = 2π − B_β` branch with `r_c` decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowCurve {
    pub samples: Vec<ShadowSample>,
    pub regime: ShadowRegime,
    pub r1_star: f64,
    pub r2_star: f64,
}

impl ShadowCurve {
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.x, s.y)).collect()
    }
}

/// Sample the boundary with `n_samples` orbit radii per branch,
/// cosine-spaced toward `r₁*` and `r₂*`.
pub fn shadow_curve(obs: &ObserverSpec, params: &KerrParams, n_samples: usize) -> Result<ShadowCurve> {
    let (r1s, r2s) = theta_star_roots(obs, params)?;
    let u0 = crate::observer::u_time_component(obs, params)?;
    let n = n_samples.max(2);
    let mut radii: Vec<f64> = (0..n)
        .map(|i| {
            let t = 0.5 * (1.0 - (PI * i as f64 / (n - 1) as f64).cos());
            r1s + (r2s - r1s) * t
        })
        .collect();
    radii[0] = r1s;
    radii[n - 1] = r2s;
    let regime = if obs.r0 > r2s {
        ShadowRegime::Outside
    } else if obs.r0 < r1s {
        ShadowRegime::Inside
    } else {
        ShadowRegime::Between
    };
    if regime == ShadowRegime::Between && !radii.contains(&obs.r0) {
        // Sample the seam where the two clauses meet.
        let k = radii.partition_point(|&r| r < obs.r0);
        radii.insert(k, obs.r0);
    }

    let mut per_radius = Vec::with_capacity(radii.len());
    for &r_c in &radii {
        let (ba, bb) = boundary_angles_with(r_c, obs, params, u0)?;
        let case = if r_c <= obs.r0 { ShadowCase::Outer } else { ShadowCase::Inner };
        per_radius.push((r_c, ba, bb, case));
    }

    let mut samples = Vec::with_capacity(2 * per_radius.len());
    let push = |samples: &mut Vec<ShadowSample>, r_c: f64, alpha: f64, beta: f64, case| -> Result<()> {
        let beta = beta.rem_euclid(TAU);
        let (x, y) = stereographic(DirectionAngles { alpha, beta })?;
        samples.push(ShadowSample { r_c, alpha, beta, x, y, case });
        Ok(())
    };
    for &(r_c, ba, bb, case) in &per_radius {
        push(&mut samples, r_c, ba, PI + bb, case)?;
    }
    for &(r_c, ba, bb, case) in per_radius.iter().rev() {
        push(&mut samples, r_c, ba, TAU - bb, case)?;
    }
    Ok(ShadowCurve { samples, regime, r1_star: r1s, r2_star: r2s })
}

/// `(sin α, sin β)` of the boundary for a Carter observer, in the
/// simplified closed form valid for `r₀ > r₁`.
pub fn carter_boundary_sines(r_c: f64, r0: f64, theta0: f64, params: &KerrParams) -> (f64, f64) {
    let a = params.a();
    let (dc, d0) = (params.delta(r_c), params.delta(r0));
    let sin_alpha = 2.0 * dc.sqrt() * d0.sqrt() / (dc + d0 - (r0 - r_c).powi(2) / r_c);
    let sin_beta = (a * a * theta0.cos().powi(2) * (r_c - 1.0) - r_c * (r_c * r_c - 3.0 * r_c + 2.0 * a * a))
        / (2.0 * a * r_c * dc.sqrt());
    (sin_alpha, sin_beta)
}

/// Write the curve as CSV preceded by a `#` line describing the observer.
pub fn write_shadow_csv<W: Write>(
    out: &mut W,
    curve: &ShadowCurve,
    obs: &ObserverSpec,
    params: &KerrParams,
) -> std::io::Result<()> {
    writeln!(
        out,
        "# a={:.16e} r0={:.16e} theta0={:.16e} omega={:.16e} phi0={:.16e} r1_star={:.16e} r2_star={:.16e}",
        params.a(),
        obs.r0,
        obs.theta0,
        obs.omega,
        obs.phi0,
        curve.r1_star,
        curve.r2_star
    )?;
    writeln!(out, "r_c,alpha,beta,X,Y,case")?;
    for s in &curve.samples {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            s.r_c,
            s.alpha,
            s.beta,
            s.x,
            s.y,
            s.case.tag()
        )?;
    }
    Ok(())
}
