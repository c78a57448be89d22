//! The five computations behind the subcommands, free of any file handling
//! so that single runs and sweep cells share them.

use std::f64::consts::PI;

use snyder_core::classical::{
    closed_form_trajectory, effective_period, integrate_trajectory, measured_period,
};
use snyder_core::fock::{
    self, backend_difference, diagonalize, paper_spectrum, renormalized_params,
};
use snyder_core::grid::{self, build_grid_hamiltonian, grid_spectrum_with_reference, richardson};
use snyder_core::harmonics::{
    comparison_rows, extract_harmonics, reference_trajectory, ComparisonRow,
};
use snyder_core::{
    Backend, Component, EigenSpectrum, FockMatrix, GridSpec, GridVariant, HarmonicSpectrum,
    PhaseState, Regime, Result, SnyderParams, Trajectory,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateSettings {
    /// Length in periods: effective ones below the cutoff, bare `2π/ω` above.
    pub periods: f64,
    pub steps_per_period: usize,
    /// Overrides `periods` when set.
    pub t_end: Option<f64>,
    /// Overrides `steps_per_period` when set.
    pub dt: Option<f64>,
    /// Demand the closed form; fails in the cutoff regime.
    pub closed_form: bool,
}

impl Default for SimulateSettings {
    fn default() -> Self {
        SimulateSettings {
            periods: 2.0,
            steps_per_period: 1000,
            t_end: None,
            dt: None,
            closed_form: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulateOutcome {
    pub integrated: Trajectory,
    pub closed_form: Option<Trajectory>,
    pub effective_period: Option<f64>,
    pub measured_period: Option<f64>,
    pub max_drift: f64,
    /// Largest `max(|Δq|, |Δp|)` between the two trajectories.
    pub max_discrepancy: Option<f64>,
}

pub fn simulate(params: &SnyderParams, settings: &SimulateSettings) -> Result<SimulateOutcome> {
    if settings.closed_form {
        params.require_oscillatory()?;
    }
    let effective = match params.regime() {
        Regime::Oscillatory => Some(effective_period(params)?),
        Regime::Cutoff => None,
    };
    let period = effective.unwrap_or(2.0 * PI / params.omega());
    let t_end = settings.t_end.unwrap_or(settings.periods * period);
    let dt = settings
        .dt
        .unwrap_or(period / settings.steps_per_period as f64);

    let integrated = integrate_trajectory(params, PhaseState::unit_amplitude(), t_end, dt)?;
    let closed_form = match effective {
        Some(_) => Some(closed_form_trajectory(params, t_end, dt)?),
        None => None,
    };
    let max_discrepancy = closed_form.as_ref().map(|exact| {
        integrated
            .samples()
            .iter()
            .zip(exact.samples())
            .map(|(a, b)| (a.q - b.q).abs().max((a.p - b.p).abs()))
            .fold(0.0, f64::max)
    });
    Ok(SimulateOutcome {
        effective_period: effective,
        measured_period: measured_period(&integrated).ok(),
        max_drift: integrated.max_drift(),
        max_discrepancy,
        closed_form,
        integrated,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierSettings {
    pub periods: usize,
    pub harmonics: usize,
    pub component: Component,
    pub steps_per_period: usize,
}

#[derive(Debug, Clone)]
pub struct FourierOutcome {
    pub spectrum: HarmonicSpectrum,
    pub rows: Vec<ComparisonRow>,
}

impl FourierOutcome {
    /// Coefficient of harmonic `k` in the basis the series uses for this
    /// component: cosines for `q`, sines for `p`.
    pub fn coefficient(&self, k: usize) -> f64 {
        match self.spectrum.component {
            Component::Q => self.spectrum.cos_coeffs[k],
            Component::P => self.spectrum.sin_coeffs[k],
        }
    }

    pub fn third_to_first(&self) -> f64 {
        self.coefficient(3) / self.coefficient(1)
    }
}

pub fn fourier(params: &SnyderParams, settings: &FourierSettings) -> Result<FourierOutcome> {
    params.require_oscillatory()?;
    let traj = reference_trajectory(params, settings.periods, settings.steps_per_period)?;
    let spectrum = extract_harmonics(&traj, settings.component, settings.harmonics.max(3))?;
    let rows = comparison_rows(params, &spectrum);
    Ok(FourierOutcome { spectrum, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockSettings {
    pub dim: usize,
    pub backend: Backend,
    pub levels: usize,
}

impl Default for FockSettings {
    fn default() -> Self {
        FockSettings {
            dim: 64,
            backend: Backend::NormalOrdered,
            levels: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FockOutcome {
    pub matrix: FockMatrix,
    pub spectrum: EigenSpectrum,
    /// `ω̃(n + ½)` for the same levels.
    pub paper: EigenSpectrum,
    /// Max-norm of the difference between the two uncorrected assemblies.
    pub backend_difference: f64,
}

pub fn fock(params: &SnyderParams, settings: &FockSettings) -> Result<FockOutcome> {
    let matrix = fock::build(settings.backend, params, settings.dim)?;
    let spectrum = diagonalize(&matrix, settings.levels)?;
    let paper = paper_spectrum(params, settings.levels.saturating_sub(1));
    let backend_difference = backend_difference(params, settings.dim)?;
    Ok(FockOutcome {
        matrix,
        spectrum,
        paper,
        backend_difference,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSettings {
    pub rho_max: Option<f64>,
    pub points: Option<usize>,
    pub variant: GridVariant,
    pub levels: usize,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            rho_max: None,
            points: None,
            variant: GridVariant::TildeH,
            levels: 6,
        }
    }
}

impl GridSettings {
    /// Unset fields fall back to [`GridSpec::auto`].
    pub fn spec(&self, params: &SnyderParams) -> Result<GridSpec> {
        let auto = GridSpec::auto(params, self.variant)?;
        match (self.rho_max, self.points) {
            (Some(rho_max), Some(points)) => GridSpec::new(rho_max, points, self.variant),
            (Some(rho_max), None) => {
                let step = grid::AUTO_STEP * (params.mass() * params.omega()).sqrt();
                GridSpec::with_step(rho_max, step, self.variant)
            }
            (None, Some(points)) => GridSpec::new(auto.rho_max(), points, self.variant),
            (None, None) => Ok(auto),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridOutcome {
    pub spec: GridSpec,
    pub spectrum: EigenSpectrum,
    /// Richardson combination of this grid and its refinement.
    pub extrapolated: Vec<f64>,
    /// `ω̃(n + ½)`.
    pub reference: Vec<f64>,
    pub bound_states: usize,
}

impl GridOutcome {
    /// `|extrapolated − reference|` per level.
    pub fn deviations(&self) -> Vec<f64> {
        self.extrapolated
            .iter()
            .zip(&self.reference)
            .map(|(e, r)| (e - r).abs())
            .collect()
    }
}

pub fn grid(params: &SnyderParams, settings: &GridSettings) -> Result<GridOutcome> {
    let spec = settings.spec(params)?;
    let op = build_grid_hamiltonian(params, &spec)?;
    let (spectrum, refined) = grid_spectrum_with_reference(&op, settings.levels)?;
    let extrapolated = richardson(&spectrum.eigenvalues, &refined);
    let (_, omega_t) = renormalized_params(params);
    let reference = (0..settings.levels)
        .map(|n| omega_t * (n as f64 + 0.5))
        .collect();
    Ok(GridOutcome {
        spec,
        spectrum,
        extrapolated,
        reference,
        bound_states: op.bound_state_count(),
    })
}
