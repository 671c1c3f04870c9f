use crate::error::{KerrError, Result};
use crate::kerr::{BLPoint, KerrParams};

use super::{eom_raw, ConservedSet, PhaseState};

/// Sense in which the integration parameter advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    /// Same vector field, negated parameter (`τ → −τ`).
    Backward,
}

impl Direction {
    #[inline]
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorControls {
    pub rtol: f64,
    pub atol: f64,
    /// Escape radius.
    pub r_max: f64,
    /// Relative horizon shell: stop once `r ≤ r₊(1 + horizon_shell)`.
    pub horizon_shell: f64,
    pub max_steps: usize,
    /// Cap on |σ| before a ray is declared trapped.
    pub sigma_budget: f64,
    pub initial_step: f64,
    pub min_step: f64,
    /// Fraction of the remaining distance to the horizon a single step may cover.
    pub horizon_clamp: f64,
    /// Stop with `HorizonReached` as soon as an inward-moving ray provably
    /// has no radial turning point left between it and the horizon.
    pub early_capture: bool,
    pub direction: Direction,
}

impl Default for IntegratorControls {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            r_max: 1000.0,
            horizon_shell: 1e-6,
            max_steps: 1_000_000,
            sigma_budget: 1000.0,
            initial_step: 1e-3,
            min_step: 1e-15,
            horizon_clamp: 0.5,
            early_capture: false,
            direction: Direction::Forward,
        }
    }
}

impl IntegratorControls {
    pub fn backward(mut self) -> Self {
        self.direction = Direction::Backward;
        self
    }

    pub fn forward(mut self) -> Self {
        self.direction = Direction::Forward;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    HorizonReached,
    Escaped,
    MaxSteps,
    /// The σ budget ran out with the ray still between horizon and escape
    /// radius, e.g. on or near a spherical orbit.
    TurningBounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    /// Mino-type time, `dτ = ρ²/E dσ`.
    pub sigma: f64,
    pub tau: f64,
    pub state: PhaseState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub reason: TerminationReason,
}

/// Final state of an integration without the sample history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryEnd {
    pub last: TrajectorySample,
    pub reason: TerminationReason,
    pub steps: usize,
}

// Dormand–Prince 5(4).
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// State layout: `[t, r, θ, φ, p_r, p_θ, τ]`.
const N: usize = 7;
type Vector = [f64; N];

struct System<'a> {
    c: &'a ConservedSet,
    a: f64,
    sign: f64,
}

impl System<'_> {
    /// Derivative with respect to σ, `d/dσ = (ρ²/E) d/dτ`, times the direction sign.
    #[inline]
    fn rhs(&self, y: &Vector) -> Vector {
        let d = eom_raw(y[1], y[2], y[4], y[5], self.c, self.a);
        let rho2 = y[1] * y[1] + self.a * self.a * y[2].cos().powi(2);
        let k = self.sign * rho2 / self.c.energy;
        [d.dt * k, d.dr * k, d.dtheta * k, d.dphi * k, d.dp_r * k, d.dp_theta * k, k]
    }
}

#[inline]
fn axpy(y: &Vector, terms: &[(f64, &Vector)]) -> Vector {
    let mut out = *y;
    for (coef, k) in terms {
        for i in 0..N {
            out[i] += coef * k[i];
        }
    }
    out
}

/// Pull `p_r` back onto the null cone when the correction is tiny.
///
/// Near the horizon `H` carries a `1/Δ` amplification of any error in
/// `p_r`; re-solving `H = 0` for `|p_r|` keeps the constraint at roundoff.
#[inline]
fn project_null(y: &mut Vector, c: &ConservedSet, a: f64) {
    let (r, th, p_r) = (y[1], y[2], y[4]);
    let delta = r * r - 2.0 * r + a * a;
    if delta <= 0.0 || p_r == 0.0 {
        return;
    }
    let big_p = (r * r + a * a) * c.energy - a * c.angular_momentum;
    let s = th.sin();
    let ang = c.angular_momentum / s - a * c.energy * s;
    let f_theta = y[5] * y[5] + ang * ang;
    let radicand = big_p * big_p - f_theta * delta;
    if radicand <= 0.0 {
        return;
    }
    let projected = p_r.signum() * radicand.sqrt() / delta;
    if (projected - p_r).abs() <= 1e-6 * p_r.abs() {
        y[4] = projected;
    }
}

/// Sufficient condition for `R > 0` on `(r₊, r]`.
///
/// With `R = P² − KΔ`, `P = (r² + a²)E − aL` increasing in `r` and
/// `0 < Δ ≤ Δ(r)` on the interval, `KΔ(r) < min P²` rules out any zero.
#[inline]
fn captured(r: f64, c: &ConservedSet, a: f64, r_plus: f64) -> bool {
    let e = c.energy;
    let l = c.angular_momentum;
    let k = c.carter;
    let delta = r * r - 2.0 * r + a * a;
    if k < 0.0 {
        return true;
    }
    let p_lo = (r_plus * r_plus + a * a) * e - a * l;
    let p_hi = (r * r + a * a) * e - a * l;
    let min_p2 = if p_lo > 0.0 || p_hi < 0.0 { p_lo.abs().min(p_hi.abs()).powi(2) } else { 0.0 };
    k * delta < min_p2
}

fn to_sample(sigma: f64, y: &Vector) -> TrajectorySample {
    TrajectorySample {
        sigma,
        tau: y[6],
        state: PhaseState {
            point: BLPoint::new(y[0], y[1], y[2], y[3]),
            p_r: y[4],
            p_theta: y[5],
        },
    }
}

/// Core loop; `record` sees every accepted sample including the first.
fn run<F: FnMut(&TrajectorySample)>(
    initial: &PhaseState,
    c: &ConservedSet,
    params: &KerrParams,
    controls: &IntegratorControls,
    mut record: F,
) -> Result<TrajectoryEnd> {
    let a = params.a();
    let sign = controls.direction.sign();
    let sys = System { c, a, sign };
    let r_plus = params.horizon();
    let r_stop = r_plus * (1.0 + controls.horizon_shell);

    let p = initial.point;
    let mut y: Vector = [p.t, p.r, p.theta, p.phi, initial.p_r, initial.p_theta, 0.0];
    let mut sigma = 0.0_f64;
    let mut sample = to_sample(sigma, &y);
    record(&sample);

    let classify = |r: f64| -> Option<TerminationReason> {
        if r <= r_stop {
            Some(TerminationReason::HorizonReached)
        } else if r >= controls.r_max {
            Some(TerminationReason::Escaped)
        } else {
            None
        }
    };
    if let Some(reason) = classify(y[1]) {
        return Ok(TrajectoryEnd { last: sample, reason, steps: 0 });
    }

    let mut h = controls.initial_step;
    let mut k1 = sys.rhs(&y);
    let mut steps = 0usize;
    while steps < controls.max_steps {
        if sigma.abs() >= controls.sigma_budget {
            return Ok(TrajectoryEnd { last: sample, reason: TerminationReason::TurningBounded, steps });
        }
        // Keep inward steps from jumping across the horizon.
        if k1[1] < 0.0 {
            let limit = controls.horizon_clamp * (y[1] - r_plus) / -k1[1];
            if h > limit {
                h = limit.max(controls.min_step);
            }
        }

        let k2 = sys.rhs(&axpy(&y, &[(h * A21, &k1)]));
        let k3 = sys.rhs(&axpy(&y, &[(h * A31, &k1), (h * A32, &k2)]));
        let k4 = sys.rhs(&axpy(&y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]));
        let k5 = sys.rhs(&axpy(&y, &[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]));
        let k6 = sys.rhs(&axpy(
            &y,
            &[(h * A61, &k1), (h * A62, &k2), (h * A63, &k3), (h * A64, &k4), (h * A65, &k5)],
        ));
        let y_new = axpy(&y, &[(h * B1, &k1), (h * B3, &k3), (h * B4, &k4), (h * B5, &k5), (h * B6, &k6)]);
        let k7 = sys.rhs(&y_new);

        // t and τ are quadratures that never feed back and diverge at the
        // horizon; they are carried along but do not steer the step size.
        let mut err = 0.0_f64;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = controls.atol + controls.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / scale).abs());
        }
        let valid = err.is_finite() && y_new[1] > r_plus && y_new.iter().all(|v| v.is_finite());

        if valid && err <= 1.0 {
            steps += 1;
            sigma += h * sign;
            y = y_new;
            project_null(&mut y, c, a);
            sample = to_sample(sigma, &y);
            record(&sample);
            if let Some(reason) = classify(y[1]) {
                return Ok(TrajectoryEnd { last: sample, reason, steps });
            }
            if controls.early_capture && y[4] * sign < 0.0 && captured(y[1], c, a, r_plus) {
                return Ok(TrajectoryEnd { last: sample, reason: TerminationReason::HorizonReached, steps });
            }
            k1 = if y == y_new { k7 } else { sys.rhs(&y) };
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            let factor = if valid { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h *= factor;
            if h < controls.min_step {
                return Err(KerrError::StepFailure { sigma, step: h });
            }
        }
    }
    Ok(TrajectoryEnd { last: sample, reason: TerminationReason::MaxSteps, steps })
}

/// Integrate a ray in Mino time σ with adaptive Dormand–Prince steps and
/// return every accepted sample.
///
/// The initial state should lie on the null cone; nothing here enforces it
/// beyond the horizon-side projection of `p_r`.
pub fn integrate(
    initial: &PhaseState,
    c: &ConservedSet,
    params: &KerrParams,
    controls: &IntegratorControls,
) -> Result<Trajectory> {
    let mut samples = Vec::new();
    let end = run(initial, c, params, controls, |s| samples.push(*s))?;
    Ok(Trajectory { samples, reason: end.reason })
}

/// Like [`integrate`] but keeps only the final sample.
pub fn integrate_endpoint(
    initial: &PhaseState,
    c: &ConservedSet,
    params: &KerrParams,
    controls: &IntegratorControls,
) -> Result<TrajectoryEnd> {
    run(initial, c, params, controls, |_| {})
}

#[cfg(test)]
mod tests {
    use super::super::{carter_integral, hamiltonian, state_from_integrals};
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn radial_schwarzschild_infall() {
        let p = KerrParams::new(0.0).unwrap();
        let (s, c) = state_from_integrals(10.0, FRAC_PI_2, 0.0, 0.0, -1.0, 1.0, &p).unwrap();
        let traj = integrate(&s, &c, &p, &IntegratorControls::default()).unwrap();
        assert_eq!(traj.reason, TerminationReason::HorizonReached);
        let last = traj.samples.last().unwrap();
        assert!(last.state.point.r <= 2.0 * (1.0 + 1e-6));
        assert!(last.state.point.r > 2.0);
        for s in &traj.samples {
            assert_eq!(s.state.point.phi, 0.0);
        }
    }

    #[test]
    fn samples_strictly_ordered_both_directions() {
        let p = KerrParams::new(0.5).unwrap();
        let (s, c) = state_from_integrals(6.0, 1.0, 1.0, 5.0, 1.0, 1.0, &p).unwrap();
        for dir in [Direction::Forward, Direction::Backward] {
            let ctl = IntegratorControls { direction: dir, ..Default::default() };
            let traj = integrate(&s, &c, &p, &ctl).unwrap();
            let sign = if dir == Direction::Forward { 1.0 } else { -1.0 };
            for w in traj.samples.windows(2) {
                assert!((w[1].sigma - w[0].sigma) * sign > 0.0);
                assert!((w[1].tau - w[0].tau) * sign > 0.0);
            }
        }
    }

    #[test]
    fn horizon_infinity_below_critical_curve() {
        let p = KerrParams::new(0.97).unwrap();
        let (s, c) = state_from_integrals(5.0, FRAC_PI_2, -0.6, 1.0, 1.0, 1.0, &p).unwrap();
        let fwd = integrate_endpoint(&s, &c, &p, &IntegratorControls::default()).unwrap();
        let bwd = integrate_endpoint(&s, &c, &p, &IntegratorControls::default().backward()).unwrap();
        assert_eq!(fwd.reason, TerminationReason::Escaped);
        assert_eq!(bwd.reason, TerminationReason::HorizonReached);
    }

    #[test]
    fn null_constraint_and_carter_hold_to_horizon() {
        let p = KerrParams::new(0.98).unwrap();
        let (s, c) = state_from_integrals(8.0, 1.0, 1.5, 6.0, -1.0, 1.0, &p).unwrap();
        let f0 = carter_integral(&s, &c, &p);
        let traj = integrate(&s, &c, &p, &IntegratorControls::default()).unwrap();
        for smp in &traj.samples {
            assert!(hamiltonian(&smp.state, &c, &p).abs() < 1e-8);
            assert!((carter_integral(&smp.state, &c, &p) - f0).abs() < 1e-8 * f0.abs().max(1.0));
        }
    }

    #[test]
    fn time_runs_forward_along_rays() {
        let p = KerrParams::new(0.9).unwrap();
        let (s, c) = state_from_integrals(6.0, 1.3, -2.0, 8.0, 1.0, -1.0, &p).unwrap();
        let traj = integrate(&s, &c, &p, &IntegratorControls::default()).unwrap();
        for w in traj.samples.windows(2) {
            assert!(w[1].state.point.t > w[0].state.point.t);
        }
    }

    #[test]
    fn step_budget_exhaustion_is_reported() {
        let p = KerrParams::new(0.5).unwrap();
        let (s, c) = state_from_integrals(6.0, 1.0, 1.0, 5.0, 1.0, 1.0, &p).unwrap();
        let ctl = IntegratorControls { max_steps: 3, ..Default::default() };
        let end = integrate_endpoint(&s, &c, &p, &ctl).unwrap();
        assert_eq!(end.reason, TerminationReason::MaxSteps);
        assert_eq!(end.steps, 3);
    }

    #[test]
    fn impossible_tolerance_fails() {
        let p = KerrParams::new(0.5).unwrap();
        let (s, c) = state_from_integrals(6.0, 1.0, 1.0, 5.0, 1.0, 1.0, &p).unwrap();
        let ctl = IntegratorControls { rtol: 0.0, atol: 1e-300, min_step: 1e-6, ..Default::default() };
        assert!(matches!(integrate(&s, &c, &p, &ctl), Err(KerrError::StepFailure { .. })));
    }

    #[test]
    fn early_capture_never_changes_the_outcome() {
        let p = KerrParams::new(0.9).unwrap();
        let full = IntegratorControls::default();
        let quick = IntegratorControls { early_capture: true, ..full };
        let mut shortcuts = 0;
        for i in 0..15 {
            for j in 0..15 {
                let lam = -6.0 + 12.0 * i as f64 / 14.0;
                let eta = -0.5 + 30.0 * j as f64 / 14.0;
                for (r0, sr) in [(6.0, -1.0), (2.5, -1.0), (2.5, 1.0)] {
                    let Some((s, c)) = state_from_integrals(r0, 1.3, lam, eta, sr, 1.0, &p) else { continue };
                    let a = integrate_endpoint(&s, &c, &p, &full).unwrap();
                    let b = integrate_endpoint(&s, &c, &p, &quick).unwrap();
                    assert_eq!(a.reason, b.reason, "{lam} {eta} {r0} {sr}");
                    if b.steps < a.steps {
                        shortcuts += 1;
                    }
                }
            }
        }
        assert!(shortcuts > 20);
    }
}
