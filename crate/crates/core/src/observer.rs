//! Stationary observers: worldlines `r = r₀, θ = θ₀, φ = Ωt + φ₀`.

use crate::error::{KerrError, Result};
use crate::kerr::{scalars_raw, CovariantMetric, KerrParams};

/// Distance from `Ω±` inside which an angular velocity is rejected.
pub const OMEGA_MARGIN: f64 = 1e-12;

/// A validated stationary observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverSpec {
    pub r0: f64,
    pub theta0: f64,
    pub omega: f64,
    pub phi0: f64,
}

/// Metric scalars at the observer's position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverScalars {
    pub rho0: f64,
    pub delta0: f64,
    pub a0: f64,
    pub omega0: f64,
    pub sin_theta0: f64,
}

fn check_position(r0: f64, theta0: f64, params: &KerrParams) -> Result<()> {
    if !(r0 > params.horizon()) || !r0.is_finite() {
        return Err(KerrError::Domain(format!(
            "observer radius r0 = {r0} must exceed the horizon r+ = {}",
            params.horizon()
        )));
    }
    if !(theta0 > 0.0 && theta0 < std::f64::consts::PI) {
        return Err(KerrError::Domain(format!("observer angle theta0 = {theta0} must lie in (0, pi)")));
    }
    Ok(())
}

impl ObserverSpec {
    pub fn new(r0: f64, theta0: f64, omega: f64, phi0: f64, params: &KerrParams) -> Result<Self> {
        check_position(r0, theta0, params)?;
        let (lower, upper) = omega_bounds(r0, theta0, params)?;
        if !(omega > lower + OMEGA_MARGIN && omega < upper - OMEGA_MARGIN) {
            return Err(KerrError::TimelikeViolation { omega, lower, upper });
        }
        let obs = Self { r0, theta0, omega, phi0 };
        // The bounds are the zeros of the radicand; this only guards roundoff.
        u_time_component(&obs, params)?;
        Ok(obs)
    }

    pub fn scalars(&self, params: &KerrParams) -> ObserverScalars {
        let m = scalars_raw(self.r0, self.theta0, params.a());
        ObserverScalars {
            rho0: m.rho2.sqrt(),
            delta0: m.delta,
            a0: m.a_big,
            omega0: m.omega,
            sin_theta0: self.theta0.sin(),
        }
    }
}

/// Admissible angular velocities `(Ω₋, Ω₊)` at `(r₀, θ₀)`.
pub fn omega_bounds(r0: f64, theta0: f64, params: &KerrParams) -> Result<(f64, f64)> {
    check_position(r0, theta0, params)?;
    let a = params.a();
    let sq = params.delta(r0).sqrt();
    let s = theta0.sin();
    let base = r0 * r0 + a * a;
    let plus = (a + sq / s) / (base + a * sq * s);
    let minus = (a - sq / s) / (base - a * sq * s);
    Ok((minus, plus))
}

/// `u₀ = dt/dτ` of the observer's four-velocity.
pub fn u_time_component(obs: &ObserverSpec, params: &KerrParams) -> Result<f64> {
    let a = params.a();
    let m = scalars_raw(obs.r0, obs.theta0, a);
    let s2 = obs.theta0.sin().powi(2);
    let w = obs.omega;
    let radicand = m.delta - a * a * s2 + w * (4.0 * a * obs.r0 - m.a_big * w) * s2;
    if !(radicand > 0.0) {
        let (lower, upper) = omega_bounds(obs.r0, obs.theta0, params)?;
        return Err(KerrError::TimelikeViolation { omega: w, lower, upper });
    }
    Ok(m.rho2.sqrt() / radicand.sqrt())
}

/// Orthonormal frame carried by the observer. Each leg is stored as
/// coordinate components `[t, r, θ, φ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tetrad {
    pub e_t: [f64; 4],
    pub e_r: [f64; 4],
    pub e_theta: [f64; 4],
    pub e_phi: [f64; 4],
    pub u0: f64,
}

impl Tetrad {
    /// Legs in the order `(t, r, θ, φ)`.
    pub fn legs(&self) -> [[f64; 4]; 4] {
        [self.e_t, self.e_r, self.e_theta, self.e_phi]
    }

    /// Matrix `g(e_a, e_b)`.
    pub fn gram(&self, obs: &ObserverSpec, params: &KerrParams) -> [[f64; 4]; 4] {
        let g = CovariantMetric::at(obs.r0, obs.theta0, params);
        let legs = self.legs();
        let mut out = [[0.0; 4]; 4];
        for (i, u) in legs.iter().enumerate() {
            for (j, v) in legs.iter().enumerate() {
                out[i][j] = g.dot(u, v);
            }
        }
        out
    }
}

/// Frame with `e_t = u`, `e_r`, `e_θ` pointing toward decreasing `r` and `θ`,
/// and `e_φ` completing it.
pub fn tetrad(obs: &ObserverSpec, params: &KerrParams) -> Result<Tetrad> {
    let a = params.a();
    let u0 = u_time_component(obs, params)?;
    let sc = obs.scalars(params);
    let (rho, s, w) = (sc.rho0, sc.sin_theta0, obs.omega);
    let rho2 = rho * rho;
    let sq = sc.delta0.sqrt();
    let k = u0 / (s * sq);
    Ok(Tetrad {
        e_t: [u0, 0.0, 0.0, u0 * w],
        e_r: [0.0, -sq / rho, 0.0, 0.0],
        e_theta: [0.0, 0.0, -1.0 / rho, 0.0],
        e_phi: [
            k * sc.a0 * s * s / rho2 * (w - sc.omega0),
            0.0,
            0.0,
            k * (1.0 - 2.0 * obs.r0 * (1.0 - a * w * s * s) / rho2),
        ],
        u0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObserverKind {
    /// Zero angular momentum: `Ω = ω₀`.
    Zamo,
    /// `Ω = 0`; only outside the ergosphere.
    Static,
    /// `Ω = a/(r₀² + a²)`.
    Carter,
}

impl ObserverKind {
    pub fn label(self) -> &'static str {
        match self {
            ObserverKind::Zamo => "zamo",
            ObserverKind::Static => "static",
            ObserverKind::Carter => "carter",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "zamo" => Some(ObserverKind::Zamo),
            "static" => Some(ObserverKind::Static),
            "carter" => Some(ObserverKind::Carter),
            _ => None,
        }
    }
}

pub fn named_observer(kind: ObserverKind, r0: f64, theta0: f64, params: &KerrParams) -> Result<ObserverSpec> {
    check_position(r0, theta0, params)?;
    let a = params.a();
    let omega = match kind {
        ObserverKind::Zamo => scalars_raw(r0, theta0, a).omega,
        ObserverKind::Static => {
            if !(r0 * r0 - 2.0 * r0 + a * a * theta0.cos().powi(2) > 0.0) {
                return Err(KerrError::ErgosphereViolation { r0, theta0 });
            }
            0.0
        }
        ObserverKind::Carter => a / (r0 * r0 + a * a),
    };
    ObserverSpec::new(r0, theta0, omega, 0.0, params)
}
