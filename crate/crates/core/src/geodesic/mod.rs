//! Null geodesics: Hamiltonian, first integrals, separated potentials and
//! the equations of motion.
//!
//! The reduced system has two degrees of freedom `(r, θ)` with momenta
//! `(p_r, p_θ)`; `p_t = −E` and `p_φ = L` are cyclic and live in
//! [`ConservedSet`].

mod integrator;
mod turning;

pub use integrator::{
    integrate, integrate_endpoint, Direction, IntegratorControls, TerminationReason, Trajectory,
    TrajectoryEnd, TrajectorySample,
};
pub use turning::{polar_roots, radial_roots, turning_points, TurningPoint, TurningPoints};

use std::io::Write;

use crate::kerr::{BLPoint, KerrParams};

/// Position and non-cyclic momenta of a ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub point: BLPoint,
    pub p_r: f64,
    pub p_theta: f64,
}

impl PhaseState {
    pub fn new(point: BLPoint, p_r: f64, p_theta: f64) -> Self {
        Self { point, p_r, p_theta }
    }
}

/// First integrals carried by a ray.
///
/// `eta` is the constant that enters `R(r)` and `Θ(θ)`; the Carter value is
/// `F = η E² + (L − aE)²`, which reduces to `Q + (L − aE)²` with `Q = η` at
/// the `E = 1` normalization used everywhere in this crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedSet {
    pub energy: f64,
    pub angular_momentum: f64,
    pub lambda: f64,
    pub eta: f64,
    pub q: f64,
    pub carter: f64,
}

impl ConservedSet {
    /// Integrals for a ray with unit energy.
    pub fn from_lambda_eta(lambda: f64, eta: f64, params: &KerrParams) -> Self {
        Self::with_energy(1.0, lambda, eta, params)
    }

    pub fn with_energy(energy: f64, lambda: f64, eta: f64, params: &KerrParams) -> Self {
        let a = params.a();
        let l = lambda * energy;
        let q = eta * energy * energy;
        Self {
            energy,
            angular_momentum: l,
            lambda,
            eta,
            q,
            carter: q + (l - a * energy).powi(2),
        }
    }
}

/// Separated pieces of `2ρ²H`: radial part `Δ p_r² − P²/Δ` and polar part
/// `p_θ² + (L/sin θ − aE sin θ)²`.
#[inline]
fn separated_parts(r: f64, theta: f64, p_r: f64, p_theta: f64, c: &ConservedSet, a: f64) -> (f64, f64) {
    let delta = r * r - 2.0 * r + a * a;
    let big_p = (r * r + a * a) * c.energy - a * c.angular_momentum;
    let s = theta.sin();
    let ang = c.angular_momentum / s - a * c.energy * s;
    (delta * p_r * p_r - big_p * big_p / delta, p_theta * p_theta + ang * ang)
}

/// `H = ½ g^{ij} p_i p_j`; vanishes on null rays.
pub fn hamiltonian(state: &PhaseState, c: &ConservedSet, params: &KerrParams) -> f64 {
    let a = params.a();
    let (r, th) = (state.point.r, state.point.theta);
    let (fr, fth) = separated_parts(r, th, state.p_r, state.p_theta, c, a);
    let rho2 = r * r + a * a * th.cos().powi(2);
    (fr + fth) / (2.0 * rho2)
}

/// Carter integral `F = p_θ² + (aE sin θ − L/sin θ)² − 2a²H cos²θ`.
pub fn carter_integral(state: &PhaseState, c: &ConservedSet, params: &KerrParams) -> f64 {
    let a = params.a();
    let th = state.point.theta;
    let (s, co) = th.sin_cos();
    let h = hamiltonian(state, c, params);
    let ang = a * c.energy * s - c.angular_momentum / s;
    state.p_theta * state.p_theta + ang * ang - 2.0 * a * a * h * co * co
}

/// `R(r) = (r² + a² − aλ)² − (η + (λ − a)²) Δ(r)`.
pub fn radial_potential(r: f64, lambda: f64, eta: f64, params: &KerrParams) -> f64 {
    let a = params.a();
    let p = r * r + a * a - a * lambda;
    p * p - (eta + (lambda - a).powi(2)) * params.delta(r)
}

/// `dR/dr = 4r(r² + a² − aλ) − (η + (λ − a)²)(2r − 2)`.
pub fn radial_potential_derivative(r: f64, lambda: f64, eta: f64, params: &KerrParams) -> f64 {
    let a = params.a();
    4.0 * r * (r * r + a * a - a * lambda) - (eta + (lambda - a).powi(2)) * (2.0 * r - 2.0)
}

/// `Θ(θ) = η + cos²θ (a² − λ²/sin²θ)`.
pub fn polar_potential(theta: f64, lambda: f64, eta: f64, params: &KerrParams) -> f64 {
    let a = params.a();
    let (s, c) = theta.sin_cos();
    eta + c * c * (a * a - lambda * lambda / (s * s))
}

/// `dΘ/dθ = −2a² sin θ cos θ + 2λ² cos θ / sin³θ`.
pub fn polar_potential_derivative(theta: f64, lambda: f64, _eta: f64, params: &KerrParams) -> f64 {
    let a = params.a();
    let (s, c) = theta.sin_cos();
    -2.0 * a * a * s * c + 2.0 * lambda * lambda * c / s.powi(3)
}

/// Rates of change with respect to the affine parameter τ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDerivative {
    pub dt: f64,
    pub dr: f64,
    pub dtheta: f64,
    pub dphi: f64,
    pub dp_r: f64,
    pub dp_theta: f64,
}

/// Hamilton's equations for `(r, θ, p_r, p_θ)` together with the
/// quadratures for `φ` and `t`.
pub fn equations_of_motion(state: &PhaseState, c: &ConservedSet, params: &KerrParams) -> PhaseDerivative {
    eom_raw(
        state.point.r,
        state.point.theta,
        state.p_r,
        state.p_theta,
        c,
        params.a(),
    )
}

#[inline]
pub(crate) fn eom_raw(r: f64, theta: f64, p_r: f64, p_theta: f64, c: &ConservedSet, a: f64) -> PhaseDerivative {
    let e = c.energy;
    let l = c.angular_momentum;
    let a2 = a * a;
    let (s, co) = theta.sin_cos();
    let s2 = s * s;
    let rho2 = r * r + a2 * co * co;
    let delta = r * r - 2.0 * r + a2;
    let ra2 = r * r + a2;
    let big_p = ra2 * e - a * l;

    let fr = delta * p_r * p_r - big_p * big_p / delta;
    let ang = l / s - a * e * s;
    let fth = p_theta * p_theta + ang * ang;
    let h = (fr + fth) / (2.0 * rho2);

    let d_delta = 2.0 * r - 2.0;
    let dfr = d_delta * p_r * p_r - (2.0 * big_p * 2.0 * r * e * delta - big_p * big_p * d_delta) / (delta * delta);
    let dfth = 2.0 * ang * (-l * co / s2 - a * e * co);
    let drho2_dr = 2.0 * r;
    let drho2_dth = -2.0 * a2 * s * co;

    let dh_dr = dfr / (2.0 * rho2) - h * drho2_dr / rho2;
    let dh_dth = dfth / (2.0 * rho2) - h * drho2_dth / rho2;

    PhaseDerivative {
        dt: ra2 / (delta * rho2) * big_p + a / rho2 * (l - a * e * s2),
        dr: delta * p_r / rho2,
        dtheta: p_theta / rho2,
        dphi: a / (delta * rho2) * big_p - a * e / rho2 + l / (rho2 * s2),
        dp_r: -dh_dr,
        dp_theta: -dh_dth,
    }
}

/// Build a null phase state at `(r, θ)` from `(λ, η)` with unit energy and
/// the requested signs of `dr/dτ` and `dθ/dτ`. Returns `None` outside the
/// region of possible motion.
pub fn state_from_integrals(
    r: f64,
    theta: f64,
    lambda: f64,
    eta: f64,
    radial_sign: f64,
    polar_sign: f64,
    params: &KerrParams,
) -> Option<(PhaseState, ConservedSet)> {
    let rr = radial_potential(r, lambda, eta, params);
    let tt = polar_potential(theta, lambda, eta, params);
    if rr < 0.0 || tt < 0.0 {
        return None;
    }
    let delta = params.delta(r);
    if delta <= 0.0 {
        return None;
    }
    let c = ConservedSet::from_lambda_eta(lambda, eta, params);
    let state = PhaseState::new(
        BLPoint::new(0.0, r, theta, 0.0),
        radial_sign.signum() * rr.sqrt() / delta,
        polar_sign.signum() * tt.sqrt(),
    );
    Some((state, c))
}

/// Write samples as CSV: `sigma,tau,t,r,theta,phi,p_r,p_theta`.
pub fn write_trajectory_csv<W: Write>(out: &mut W, samples: &[TrajectorySample]) -> std::io::Result<()> {
    writeln!(out, "sigma,tau,t,r,theta,phi,p_r,p_theta")?;
    for s in samples {
        let p = &s.state.point;
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.sigma, s.tau, p.t, p.r, p.theta, p.phi, s.state.p_r, s.state.p_theta
        )?;
    }
    Ok(())
}
