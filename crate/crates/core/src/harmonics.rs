//! Harmonic content of the deformed oscillator.
//!
//! Two sources are compared: the first-iterate perturbation series (built
//! from `p₀ = −ω sin ωt`) and Fourier projections of sampled trajectories
//! over an integer number of measured periods.

use std::f64::consts::PI;

use crate::classical::{
    effective_period, integrate_trajectory, measured_period, PhaseState, Trajectory,
};
use crate::error::{Error, Result};
use crate::params::SnyderParams;

/// Minimum number of whole periods an extraction window must contain.
pub const MIN_PERIODS: usize = 4;

/// Settings used by [`compare_harmonics`] for its reference trajectory.
pub const COMPARE_PERIODS: usize = 8;
pub const COMPARE_STEPS_PER_PERIOD: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Q,
    P,
}

impl Component {
    fn of(self, s: &PhaseState) -> f64 {
        match self {
            Component::Q => s.q,
            Component::P => s.p,
        }
    }
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Component::Q => f.write_str("q"),
            Component::P => f.write_str("p"),
        }
    }
}

impl std::str::FromStr for Component {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "q" => Ok(Component::Q),
            "p" => Ok(Component::P),
            other => Err(format!("unknown component `{other}` (expected q or p)")),
        }
    }
}

/// Coefficients of the first-iterate position
/// `q₁ = (1 − ¾l²ω²) cos ωt + (1/12) l²ω² cos 3ωt + q₁⁰`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeQ {
    pub constant: f64,
    pub cos1: f64,
    pub cos3: f64,
}

/// Coefficients of `sin ωt`, `sin 3ωt`, `sin 5ωt` in the first-iterate
/// momentum, taken term by term as printed (mixed powers of ω included).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeP {
    pub sin1: f64,
    pub sin3: f64,
    pub sin5: f64,
}

pub fn perturbative_q_coefficients(params: &SnyderParams) -> PerturbativeQ {
    let e = params.deformation();
    let cos1 = 1.0 - 0.75 * e;
    let cos3 = e / 12.0;
    PerturbativeQ {
        // fixes q₁(0) = 1
        constant: 1.0 - cos1 - cos3,
        cos1,
        cos3,
    }
}

pub fn perturbative_p_coefficients(params: &SnyderParams) -> PerturbativeP {
    let l2 = params.l() * params.l();
    let l4 = l2 * l2;
    let w = params.omega();
    let w2 = w * w;
    let w3 = w2 * w;
    let w5 = w3 * w2;
    PerturbativeP {
        sin1: -1.0 + l2 * w2 - 5.0 / 24.0 * l4 * w5,
        sin3: -l2 * w3 / 9.0 + 11.0 / 144.0 * l4 * w5,
        sin5: -l4 * w5 / 240.0,
    }
}

pub fn perturbative_q1(params: &SnyderParams, t: f64) -> f64 {
    let c = perturbative_q_coefficients(params);
    let wt = params.omega() * t;
    c.cos1 * wt.cos() + c.cos3 * (3.0 * wt).cos() + c.constant
}

pub fn perturbative_p1(params: &SnyderParams, t: f64) -> f64 {
    let c = perturbative_p_coefficients(params);
    let wt = params.omega() * t;
    c.sin1 * wt.sin() + c.sin3 * (3.0 * wt).sin() + c.sin5 * (5.0 * wt).sin()
}

/// Fourier coefficients relative to the measured fundamental, with phases
/// referenced to the first sample: `signal ≈ c₀ + Σ cₖ cos kΩτ + sₖ sin kΩτ`,
/// `τ = t − t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpectrum {
    pub component: Component,
    pub fundamental: f64,
    pub periods: usize,
    pub cos_coeffs: Vec<f64>,
    pub sin_coeffs: Vec<f64>,
    /// RMS of signal minus reconstruction over the window.
    pub residual: f64,
    /// Mean square of the signal over the window.
    pub mean_square: f64,
}

impl HarmonicSpectrum {
    pub fn max_harmonic(&self) -> usize {
        self.cos_coeffs.len() - 1
    }

    /// Amplitude `√(cₖ² + sₖ²)` of harmonic `k`.
    pub fn amplitude(&self, k: usize) -> f64 {
        self.cos_coeffs[k].hypot(self.sin_coeffs[k])
    }

    /// `c₀² + ½ Σ (cₖ² + sₖ²)`, bounded by the mean square (Bessel).
    pub fn parseval_sum(&self) -> f64 {
        let tail: f64 = (1..self.cos_coeffs.len())
            .map(|k| self.cos_coeffs[k].powi(2) + self.sin_coeffs[k].powi(2))
            .sum();
        self.cos_coeffs[0].powi(2) + 0.5 * tail
    }

    /// Value of the truncated series at offset `tau` from the window start.
    pub fn reconstruct(&self, tau: f64) -> f64 {
        let mut value = self.cos_coeffs[0];
        for k in 1..self.cos_coeffs.len() {
            let (s, c) = (k as f64 * self.fundamental * tau).sin_cos();
            value += self.cos_coeffs[k] * c + self.sin_coeffs[k] * s;
        }
        value
    }
}

/// Window of whole periods on the sample grid: `(samples, fractional tail)`.
/// The window is `[t0, t0 + n·dt + tail·dt]`.
fn window_on_grid(length: f64, dt: f64) -> (usize, f64) {
    let steps = length / dt;
    let nearest = steps.round();
    if (steps - nearest).abs() < 1e-6 {
        (nearest as usize, 0.0)
    } else {
        (steps.floor() as usize, steps - steps.floor())
    }
}

/// Trapezoid rule over `[0, n·dt + tail·dt]` for samples `f(k)`, `k ≤ n`,
/// plus a value `f_end` at the window end when `tail > 0`.
fn trapezoid(f: impl Fn(usize) -> f64, n: usize, tail: f64, f_end: f64, dt: f64) -> f64 {
    let mut sum = 0.5 * (f(0) + f(n));
    for k in 1..n {
        sum += f(k);
    }
    sum * dt + 0.5 * tail * dt * (f(n) + f_end)
}

/// Projects one component of `traj` onto harmonics `0..=max_harmonic` of
/// the fundamental measured from the zero crossings of `q`.
///
/// The window spans the largest whole number of measured periods that fits
/// in the trajectory. If that length is not a whole number of steps the
/// last partial interval is closed with an interpolated end value.
pub fn extract_harmonics(
    traj: &Trajectory,
    component: Component,
    max_harmonic: usize,
) -> Result<HarmonicSpectrum> {
    let period = measured_period(traj)?;
    let span = traj.t_end() - traj.t0();
    let periods = (span / period * (1.0 + 1e-9)).floor() as usize;
    if periods < MIN_PERIODS {
        return Err(Error::IncompleteOrbit {
            needed: format!("{MIN_PERIODS} whole periods"),
            found: format!("{periods}"),
        });
    }
    let fundamental = 2.0 * PI / period;
    let length = periods as f64 * period;
    let dt = traj.dt();
    let (n, tail) = window_on_grid(length, dt);
    let n = n.min(traj.len() - 1);
    let samples = traj.samples();
    let signal = |k: usize| component.of(&samples[k]);
    let end_value = if tail > 0.0 {
        component.of(&traj.state_at(traj.t0() + length))
    } else {
        0.0
    };

    let mut cos_coeffs = Vec::with_capacity(max_harmonic + 1);
    let mut sin_coeffs = Vec::with_capacity(max_harmonic + 1);
    for h in 0..=max_harmonic {
        let w = h as f64 * fundamental;
        let phase = |k: usize| w * k as f64 * dt;
        // window end sits on a whole period, so its phase is exactly 0
        let c = trapezoid(|k| signal(k) * phase(k).cos(), n, tail, end_value, dt);
        let s = trapezoid(|k| signal(k) * phase(k).sin(), n, tail, 0.0, dt);
        let norm = if h == 0 { 1.0 / length } else { 2.0 / length };
        cos_coeffs.push(c * norm);
        sin_coeffs.push(s * norm);
    }

    let mean_square = trapezoid(|k| signal(k).powi(2), n, tail, end_value.powi(2), dt) / length;
    let mut spectrum = HarmonicSpectrum {
        component,
        fundamental,
        periods,
        cos_coeffs,
        sin_coeffs,
        residual: 0.0,
        mean_square,
    };
    let residual_sq = trapezoid(
        |k| (signal(k) - spectrum.reconstruct(k as f64 * dt)).powi(2),
        n,
        tail,
        (end_value - spectrum.reconstruct(length)).powi(2),
        dt,
    ) / length;
    spectrum.residual = residual_sq.max(0.0).sqrt();
    Ok(spectrum)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub k: usize,
    pub measured: f64,
    pub perturbative: f64,
    pub abs_dev: f64,
    /// `abs_dev / |perturbative|`; NaN where the series predicts zero.
    pub rel_dev: f64,
}

impl ComparisonRow {
    fn new(k: usize, measured: f64, perturbative: f64) -> Self {
        let abs_dev = (measured - perturbative).abs();
        let rel_dev = if perturbative == 0.0 {
            f64::NAN
        } else {
            abs_dev / perturbative.abs()
        };
        ComparisonRow {
            k,
            measured,
            perturbative,
            abs_dev,
            rel_dev,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicComparison {
    pub params: SnyderParams,
    pub component: Component,
    pub spectrum: HarmonicSpectrum,
    pub rows: Vec<ComparisonRow>,
}

/// Reference trajectory for spectral work: `periods` whole effective periods
/// from `(1, 0)` with the step dividing the period exactly.
pub fn reference_trajectory(
    params: &SnyderParams,
    periods: usize,
    steps_per_period: usize,
) -> Result<Trajectory> {
    let period = effective_period(params)?;
    integrate_trajectory(
        params,
        PhaseState::unit_amplitude(),
        periods as f64 * period,
        period / steps_per_period as f64,
    )
}

/// Integrates one trajectory and tabulates its harmonics against the
/// perturbation series at the same `(l, ω)`.
///
/// For `q` the cosine coefficients are compared (the series is even in
/// `t`), for `p` the sine coefficients.
pub fn compare_harmonics(
    params: &SnyderParams,
    component: Component,
    max_harmonic: usize,
) -> Result<HarmonicComparison> {
    params.require_oscillatory()?;
    let traj = reference_trajectory(params, COMPARE_PERIODS, COMPARE_STEPS_PER_PERIOD)?;
    let spectrum = extract_harmonics(&traj, component, max_harmonic)?;
    let rows = comparison_rows(params, &spectrum);
    Ok(HarmonicComparison {
        params: *params,
        component,
        spectrum,
        rows,
    })
}

/// Tabulates an already extracted spectrum against the perturbation series.
pub fn comparison_rows(params: &SnyderParams, spectrum: &HarmonicSpectrum) -> Vec<ComparisonRow> {
    (0..=spectrum.max_harmonic())
        .map(|k| match spectrum.component {
            Component::Q => {
                let c = perturbative_q_coefficients(params);
                let predicted = match k {
                    0 => c.constant,
                    1 => c.cos1,
                    3 => c.cos3,
                    _ => 0.0,
                };
                ComparisonRow::new(k, spectrum.cos_coeffs[k], predicted)
            }
            Component::P => {
                let c = perturbative_p_coefficients(params);
                let predicted = match k {
                    1 => c.sin1,
                    3 => c.sin3,
                    5 => c.sin5,
                    _ => 0.0,
                };
                ComparisonRow::new(k, spectrum.sin_coeffs[k], predicted)
            }
        })
        .collect()
}
