//! Classical oscillator under the one-dimensional deformed bracket
//! `{q, p} = 1 − l²p²` with `H = ½p² + ½ω²q²` (unit mass).
//!
//! The equations of motion are
//!
//! ```text
//! dq/dt =  p − l²p³
//! dp/dt = −ω²q + ω²l²q p²
//! ```
//!
//! Both share the factor `1 − l²p²`, so `p² + ω²q²` is conserved and the
//! phase-space orbits are the undeformed ellipses. Only the speed along the
//! orbit changes, which shows up as a longer period and odd harmonics.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::params::{Regime, SnyderParams};

/// Conservation tolerance advertised for RK4 at `dt = T_eff / 1000`.
pub const CONSERVATION_TOL: f64 = 1e-9;

/// Steps per period below which integration is refused.
pub const MIN_STEPS_PER_PERIOD: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseState {
    pub q: f64,
    pub p: f64,
}

impl PhaseState {
    pub const fn new(q: f64, p: f64) -> Self {
        PhaseState { q, p }
    }

    /// `(q, p) = (1, 0)`, the normalization the closed form is built on.
    pub const fn unit_amplitude() -> Self {
        PhaseState { q: 1.0, p: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectorySource {
    Integrated,
    ClosedForm,
}

impl std::fmt::Display for TrajectorySource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrajectorySource::Integrated => f.write_str("integrated"),
            TrajectorySource::ClosedForm => f.write_str("closed_form"),
        }
    }
}

/// Uniformly sampled phase-space path, sample `k` at `t0 + k·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    t0: f64,
    dt: f64,
    samples: Vec<PhaseState>,
    params: SnyderParams,
    source: TrajectorySource,
    max_drift: f64,
}

impl Trajectory {
    pub fn new(
        params: SnyderParams,
        t0: f64,
        dt: f64,
        samples: Vec<PhaseState>,
        source: TrajectorySource,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidWindow("trajectory has no samples".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) || !t0.is_finite() {
            return Err(Error::InvalidWindow(format!("time step {dt} must be > 0")));
        }
        let reference = orbit_invariant(&samples[0], &params);
        let max_drift = samples
            .iter()
            .map(|s| (orbit_invariant(s, &params) - reference).abs())
            .fold(0.0, f64::max);
        Ok(Trajectory {
            t0,
            dt,
            samples,
            params,
            source,
            max_drift,
        })
    }

    /// Builds a trajectory from explicitly timed rows, e.g. read back from
    /// CSV. Spacing must be uniform to a relative `1e-9` of the step.
    pub fn from_timed_samples(
        params: SnyderParams,
        rows: &[(f64, PhaseState)],
        source: TrajectorySource,
    ) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InvalidWindow(
                "need at least two timed samples".into(),
            ));
        }
        let t0 = rows[0].0;
        let dt = (rows[rows.len() - 1].0 - t0) / (rows.len() - 1) as f64;
        for (k, (t, _)) in rows.iter().enumerate() {
            let expected = t0 + k as f64 * dt;
            if (t - expected).abs() > 1e-9 * dt.abs().max(f64::MIN_POSITIVE) {
                return Err(Error::NonUniformSampling { row: k });
            }
        }
        let samples = rows.iter().map(|(_, s)| *s).collect();
        Trajectory::new(params, t0, dt, samples, source)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[PhaseState] {
        &self.samples
    }

    pub fn params(&self) -> &SnyderParams {
        &self.params
    }

    pub fn source(&self) -> TrajectorySource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, index: usize) -> f64 {
        self.t0 + index as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.samples.len() - 1)
    }

    /// Largest `|I(t) − I(t0)|` with `I = p² + ω²q²`.
    pub fn max_drift(&self) -> f64 {
        self.max_drift
    }

    pub fn conserves_orbit(&self) -> bool {
        self.max_drift <= CONSERVATION_TOL
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, PhaseState)> + '_ {
        self.samples
            .iter()
            .enumerate()
            .map(|(k, s)| (self.time(k), *s))
    }

    /// Cubic Hermite interpolation using the exact vector field as slopes.
    /// Times outside the sampled span are clamped to the nearest interval.
    pub fn state_at(&self, t: f64) -> PhaseState {
        if self.samples.len() == 1 {
            return self.samples[0];
        }
        let last = self.samples.len() - 2;
        let k = (((t - self.t0) / self.dt).floor().max(0.0) as usize).min(last);
        self.interpolate_interval(k, t)
    }

    fn interpolate_interval(&self, k: usize, t: f64) -> PhaseState {
        let a = self.samples[k];
        let b = self.samples[k + 1];
        let da = vector_field(&self.params, &a);
        let db = vector_field(&self.params, &b);
        let u = (t - self.time(k)) / self.dt;
        PhaseState {
            q: hermite(a.q, b.q, da.0, db.0, self.dt, u),
            p: hermite(a.p, b.p, da.1, db.1, self.dt, u),
        }
    }
}

fn hermite(y0: f64, y1: f64, dy0: f64, dy1: f64, h: f64, u: f64) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    h00 * y0 + h10 * h * dy0 + h01 * y1 + h11 * h * dy1
}

/// `(dq/dt, dp/dt)` of the deformed oscillator.
pub fn vector_field(params: &SnyderParams, state: &PhaseState) -> (f64, f64) {
    let l2 = params.l() * params.l();
    let w2 = params.omega() * params.omega();
    let PhaseState { q, p } = *state;
    (p - l2 * p * p * p, -w2 * q + w2 * l2 * q * p * p)
}

/// `p² + ω²q²`; equals `ω²` on the unit-amplitude orbit.
pub fn orbit_invariant(state: &PhaseState, params: &SnyderParams) -> f64 {
    let w = params.omega();
    state.p * state.p + w * w * state.q * state.q
}

/// `½p² + ½ω²q²`.
pub fn hamiltonian(state: &PhaseState, params: &SnyderParams) -> f64 {
    0.5 * orbit_invariant(state, params)
}

/// `1 − l²ω²`, computed as a product so it stays accurate near the cutoff.
fn frequency_factor(params: &SnyderParams) -> f64 {
    let x = params.l_omega();
    (1.0 - x) * (1.0 + x)
}

/// `T_eff = 2π / (ω√(1 − l²ω²))`.
pub fn effective_period(params: &SnyderParams) -> Result<f64> {
    params.require_oscillatory()?;
    Ok(2.0 * PI / effective_frequency(params)?)
}

/// `Ω = ω√(1 − l²ω²)`.
pub fn effective_frequency(params: &SnyderParams) -> Result<f64> {
    params.require_oscillatory()?;
    Ok(params.omega() * frequency_factor(params).sqrt())
}

/// Phase constant `d` with `q(0) = 1`.
///
/// At `t = 0` the tangent argument has to sit where the tangent diverges and
/// the amplitude saturates, `d·√(1 − l²ω²) = π/2`.
pub fn solve_phase_constant(params: &SnyderParams) -> Result<f64> {
    params.require_oscillatory()?;
    Ok(FRAC_PI_2 / frequency_factor(params).sqrt())
}

/// The literal tangent expression for `q(t)` on one branch (`branch = ±1`).
/// Singular where the tangent diverges; see [`closed_form_state`] for the
/// stitched, everywhere-smooth form.
pub fn tangent_branch_q(params: &SnyderParams, t: f64, d: f64, branch: f64) -> Result<f64> {
    params.require_oscillatory()?;
    let s = frequency_factor(params);
    let tan = ((params.omega() * t + d) * s.sqrt()).tan();
    Ok(branch.signum() * tan / (1.0 / s + tan * tan).sqrt())
}

/// Closed-form state at time `t`.
///
/// Branches are stitched by taking the sign of `cos θ`,
/// `θ = (ωt + d)√(1 − l²ω²)`, which turns the tangent form into
/// `q = sin θ / √(sin²θ + cos²θ/(1 − l²ω²))` with no singularities.
/// `p = ±ω√(1 − q²)` takes the sign of `dq/dt`; since `1 − l²p² > 0` in the
/// oscillatory regime that is the sign of `cos θ`.
pub fn closed_form_state(params: &SnyderParams, t: f64, d: f64) -> Result<PhaseState> {
    params.require_oscillatory()?;
    let s = frequency_factor(params);
    let theta = (params.omega() * t + d) * s.sqrt();
    let (sin, cos) = theta.sin_cos();
    let denom = sin * sin + cos * cos / s;
    let q = sin / denom.sqrt();
    // 1 − q² written out exactly, avoids cancellation near the turning points
    let one_minus_q2 = cos * cos / (s * denom);
    let p = cos.signum() * params.omega() * one_minus_q2.sqrt();
    Ok(PhaseState { q, p })
}

fn step_count(t_end: f64, dt: f64) -> usize {
    let ratio = t_end / dt;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
        nearest as usize
    } else {
        ratio.floor() as usize
    }
}

fn check_window(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidWindow(format!("dt = {dt} must be > 0")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidWindow(format!("t_end = {t_end} must be > 0")));
    }
    let n = step_count(t_end, dt);
    if n == 0 {
        return Err(Error::InvalidWindow(format!(
            "t_end = {t_end} is shorter than one step dt = {dt}"
        )));
    }
    Ok(n)
}

/// Closed-form samples at `t = k·dt` starting from `(1, 0)`.
pub fn closed_form_trajectory(params: &SnyderParams, t_end: f64, dt: f64) -> Result<Trajectory> {
    let d = solve_phase_constant(params)?;
    let n = check_window(t_end, dt)?;
    let samples = (0..=n)
        .map(|k| closed_form_state(params, k as f64 * dt, d))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(*params, 0.0, dt, samples, TrajectorySource::ClosedForm)
}

fn rk4_step(params: &SnyderParams, s: &PhaseState, dt: f64) -> PhaseState {
    let shifted = |k: (f64, f64), h: f64| PhaseState {
        q: s.q + h * k.0,
        p: s.p + h * k.1,
    };
    let k1 = vector_field(params, s);
    let k2 = vector_field(params, &shifted(k1, 0.5 * dt));
    let k3 = vector_field(params, &shifted(k2, 0.5 * dt));
    let k4 = vector_field(params, &shifted(k3, dt));
    PhaseState {
        q: s.q + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        p: s.p + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    }
}

/// Fixed-step RK4 from `init` at `t = 0` to `t_end`.
///
/// Runs in the cutoff regime too; the resolution limit there uses the bare
/// period `2π/ω` because the effective one is infinite.
pub fn integrate_trajectory(
    params: &SnyderParams,
    init: PhaseState,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let n = check_window(t_end, dt)?;
    let period = match params.regime() {
        Regime::Oscillatory => effective_period(params)?,
        Regime::Cutoff => 2.0 * PI / params.omega(),
    };
    let limit = period / MIN_STEPS_PER_PERIOD;
    if dt > limit {
        return Err(Error::StepTooLarge { dt, limit });
    }
    let mut samples = Vec::with_capacity(n + 1);
    let mut state = init;
    samples.push(state);
    for _ in 0..n {
        state = rk4_step(params, &state, dt);
        samples.push(state);
    }
    Trajectory::new(*params, 0.0, dt, samples, TrajectorySource::Integrated)
}

/// A sign change of `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub time: f64,
    pub rising: bool,
}

/// Zero crossings of `q`, located by bisection on the Hermite interpolant.
pub fn zero_crossings(traj: &Trajectory) -> Vec<Crossing> {
    let s = traj.samples();
    let mut out = Vec::new();
    for k in 0..s.len().saturating_sub(1) {
        let (a, b) = (s[k].q, s[k + 1].q);
        let rising = a < 0.0 && b >= 0.0;
        let falling = a > 0.0 && b <= 0.0;
        if !(rising || falling) {
            continue;
        }
        let (mut lo, mut hi) = (traj.time(k), traj.time(k + 1));
        if b == 0.0 {
            out.push(Crossing { time: hi, rising });
            continue;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let qm = traj.interpolate_interval(k, mid).q;
            if (qm < 0.0) == (a < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(Crossing {
            time: 0.5 * (lo + hi),
            rising,
        });
    }
    out
}

/// Period from the mean zero-crossing spacing (two crossings per period).
pub fn measured_period(traj: &Trajectory) -> Result<f64> {
    let crossings = zero_crossings(traj);
    if crossings.len() < 3 {
        return Err(Error::IncompleteOrbit {
            needed: "one full period (3 zero crossings)".into(),
            found: format!("{} crossings", crossings.len()),
        });
    }
    let first = crossings[0].time;
    let last = crossings[crossings.len() - 1].time;
    Ok(2.0 * (last - first) / (crossings.len() - 1) as f64)
}

/// `∮ p dq` over the first full period, by trapezoids on `p·Δq` between two
/// successive same-direction zero crossings of `q`.
pub fn action_integral(traj: &Trajectory) -> Result<f64> {
    let crossings = zero_crossings(traj);
    if crossings.len() < 3 {
        return Err(Error::IncompleteOrbit {
            needed: "one full period (3 zero crossings)".into(),
            found: format!("{} crossings", crossings.len()),
        });
    }
    let (ta, tb) = (crossings[0].time, crossings[2].time);
    let mut path = vec![traj.state_at(ta)];
    path.extend(
        traj.iter()
            .filter(|(t, _)| *t > ta && *t < tb)
            .map(|(_, s)| s),
    );
    path.push(traj.state_at(tb));
    Ok(path
        .windows(2)
        .map(|w| 0.5 * (w[0].p + w[1].p) * (w[1].q - w[0].q))
        .sum())
}
