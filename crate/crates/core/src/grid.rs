//! Position-space oracle for the deformed quantum oscillator.
//!
//! The one-dimensional commutator `[Q, P] = i(1 − l²P²)` is realized on an
//! auxiliary coordinate `ρ` by
//!
//! ```text
//! P = tanh(lρ)/l        (multiplication)
//! Q = i d/dρ
//! ```
//!
//! since `[Q, P] = i sech²(lρ) = i(1 − l²P²)`. The measure in `ρ` is flat, so
//! `H = P²/2m + ½mω²Q²` becomes the symmetric Schrödinger-type operator
//!
//! ```text
//! H = −(mω²/2) d²/dρ² + tanh²(lρ)/(2ml²)
//! ```
//!
//! discretized here with the three-point stencil and Dirichlet ends. The
//! potential saturates at `1/(2ml²)`: only finitely many levels are bound,
//! which is the quantum face of the classical cutoff at `ω = 1/l`.
//!
//! At `l = 0` the potential is taken as its limit `ρ²/2m` and no saturation
//! requirement applies.

use crate::error::{Error, Result};
use crate::linalg::SymTridiagonal;
use crate::params::SnyderParams;
use crate::spectrum::{relative_change, EigenSpectrum};

pub const MIN_POINTS: usize = 101;

/// `tanh(l·ρ_max)` must exceed `1 − SATURATION_TOL`.
pub const SATURATION_TOL: f64 = 1e-10;

/// Relative change under one refinement below which a level is converged.
pub const GRID_CONVERGENCE_TOL: f64 = 1e-4;

/// `l·ρ_max` used by [`GridSpec::auto`]; `atanh(1 − 1e-10) ≈ 11.86`.
pub const AUTO_SATURATION_ARG: f64 = 12.5;

/// Half-width in units of `√(mω)` used by [`GridSpec::auto`] when `l = 0`.
pub const AUTO_UNDEFORMED_HALF_WIDTH: f64 = 12.0;

/// Grid spacing in units of `√(mω)` used by [`GridSpec::auto`].
pub const AUTO_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridVariant {
    /// `P²/2m + ½mω²Q²`.
    PlainH,
    /// Adds the counter term `(l²/2)P²`.
    TildeH,
}

impl std::fmt::Display for GridVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GridVariant::PlainH => f.write_str("plain"),
            GridVariant::TildeH => f.write_str("tilde"),
        }
    }
}

impl std::str::FromStr for GridVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "plain" | "plain-h" => Ok(GridVariant::PlainH),
            "tilde" | "tilde-h" => Ok(GridVariant::TildeH),
            other => Err(format!(
                "unknown grid variant `{other}` (expected plain or tilde)"
            )),
        }
    }
}

/// Uniform grid on `[−ρ_max, ρ_max]`. `points` counts every node including
/// the two Dirichlet boundary nodes; the `points − 2` interior nodes are the
/// unknowns. Odd `points` puts a node at `ρ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    rho_max: f64,
    points: usize,
    variant: GridVariant,
}

impl GridSpec {
    pub fn new(rho_max: f64, points: usize, variant: GridVariant) -> Result<Self> {
        if points < MIN_POINTS || points.is_multiple_of(2) {
            return Err(Error::GridTooCoarse { points });
        }
        if !(rho_max > 0.0 && rho_max.is_finite()) {
            return Err(Error::DomainTooSmall {
                rho_max,
                saturation: f64::NAN,
            });
        }
        Ok(GridSpec {
            rho_max,
            points,
            variant,
        })
    }

    /// A grid that satisfies the saturation requirement with spacing
    /// `AUTO_STEP·√(mω)`.
    pub fn auto(params: &SnyderParams, variant: GridVariant) -> Result<Self> {
        let width = (params.mass() * params.omega()).sqrt();
        let rho_max = if params.l() > 0.0 {
            (AUTO_SATURATION_ARG / params.l()).max(AUTO_UNDEFORMED_HALF_WIDTH * width)
        } else {
            AUTO_UNDEFORMED_HALF_WIDTH * width
        };
        Self::with_step(rho_max, AUTO_STEP * width, variant)
    }

    /// Grid on `[−ρ_max, ρ_max]` with spacing at most `step`.
    pub fn with_step(rho_max: f64, step: f64, variant: GridVariant) -> Result<Self> {
        let half = (rho_max / step).ceil() as usize;
        Self::new(rho_max, (2 * half + 1).max(MIN_POINTS), variant)
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn variant(&self) -> GridVariant {
        self.variant
    }

    pub fn step(&self) -> f64 {
        2.0 * self.rho_max / (self.points - 1) as f64
    }

    /// Same domain, half the spacing.
    pub fn refined(&self) -> Self {
        GridSpec {
            points: 2 * (self.points - 1) + 1,
            ..*self
        }
    }

    /// Same spacing, twice the half-width.
    pub fn widened(&self) -> Self {
        GridSpec {
            rho_max: 2.0 * self.rho_max,
            points: 2 * (self.points - 1) + 1,
            ..*self
        }
    }

    /// Interior node coordinates.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.step();
        (1..self.points - 1).map(move |i| -self.rho_max + i as f64 * h)
    }
}

/// Momentum `P(ρ) = tanh(lρ)/l`, with the `l → 0` limit `ρ`.
pub fn momentum(params: &SnyderParams, rho: f64) -> f64 {
    let l = params.l();
    if l == 0.0 {
        rho
    } else {
        (l * rho).tanh() / l
    }
}

/// Potential part of the grid Hamiltonian at `ρ`.
pub fn potential(params: &SnyderParams, variant: GridVariant, rho: f64) -> f64 {
    let p2 = momentum(params, rho).powi(2);
    let l = params.l();
    match variant {
        GridVariant::PlainH => p2 / (2.0 * params.mass()),
        GridVariant::TildeH => p2 / (2.0 * params.mass()) + 0.5 * l * l * p2,
    }
}

/// `lim_{|ρ|→∞}` of the potential; infinite at `l = 0`.
pub fn saturation_level(params: &SnyderParams, variant: GridVariant) -> f64 {
    let l = params.l();
    if l == 0.0 {
        return f64::INFINITY;
    }
    let plain = 1.0 / (2.0 * params.mass() * l * l);
    match variant {
        GridVariant::PlainH => plain,
        GridVariant::TildeH => plain + 0.5,
    }
}

/// Assembled grid operator.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOperator {
    pub matrix: SymTridiagonal,
    pub spec: GridSpec,
    pub params: SnyderParams,
    /// Potential saturation; levels above it are continuum artifacts.
    pub saturation: f64,
}

impl GridOperator {
    /// Levels strictly below the saturation level.
    pub fn bound_state_count(&self) -> usize {
        if self.saturation.is_finite() {
            self.matrix.count_below(self.saturation)
        } else {
            self.matrix.len()
        }
    }

    /// Lowest `k` eigenvalues of this discretization, no refinement check.
    pub fn lowest_levels(&self, k: usize) -> Result<Vec<f64>> {
        self.matrix.lowest_eigenvalues(k)
    }
}

pub fn build_grid_hamiltonian(params: &SnyderParams, spec: &GridSpec) -> Result<GridOperator> {
    let spec = GridSpec::new(spec.rho_max, spec.points, spec.variant)?;
    let l = params.l();
    if l > 0.0 {
        let saturation = (l * spec.rho_max).tanh();
        if saturation <= 1.0 - SATURATION_TOL {
            return Err(Error::DomainTooSmall {
                rho_max: spec.rho_max,
                saturation,
            });
        }
    }
    let h = spec.step();
    let kinetic = params.mass() * params.omega() * params.omega() / 2.0;
    let diag: Vec<f64> = spec
        .nodes()
        .map(|rho| 2.0 * kinetic / (h * h) + potential(params, spec.variant, rho))
        .collect();
    let off = vec![-kinetic / (h * h); diag.len() - 1];
    Ok(GridOperator {
        matrix: SymTridiagonal::new(diag, off),
        spec,
        params: *params,
        saturation: saturation_level(params, spec.variant),
    })
}

/// Lowest `k` levels with bound-state flags; each level counts as converged
/// when one refinement of the grid moves it by less than
/// [`GRID_CONVERGENCE_TOL`] (relative).
pub fn grid_spectrum(op: &GridOperator, k: usize) -> Result<EigenSpectrum> {
    grid_spectrum_with_reference(op, k).map(|(spectrum, _)| spectrum)
}

/// As [`grid_spectrum`], also returning the levels on the refined grid.
pub fn grid_spectrum_with_reference(
    op: &GridOperator,
    k: usize,
) -> Result<(EigenSpectrum, Vec<f64>)> {
    let eigenvalues = op.lowest_levels(k)?;
    let refined = build_grid_hamiltonian(&op.params, &op.spec.refined())?;
    let reference = refined.lowest_levels(k)?;
    let converged = eigenvalues
        .iter()
        .zip(&reference)
        .map(|(a, b)| relative_change(*a, *b) < GRID_CONVERGENCE_TOL)
        .collect();
    let bound = eigenvalues.iter().map(|e| *e < op.saturation).collect();
    let spectrum = EigenSpectrum {
        eigenvalues,
        converged,
        bound: Some(bound),
        truncation_dim: op.spec.points,
        label: format!("grid-{}", op.spec.variant),
    };
    Ok((spectrum, reference))
}

/// `(4E_{h/2} − E_h)/3` per level.
pub fn richardson(coarse: &[f64], fine: &[f64]) -> Vec<f64> {
    coarse
        .iter()
        .zip(fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect()
}

/// Eigenvalues over a ladder of successively refined grids.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub specs: Vec<GridSpec>,
    /// `levels[r][n]`: level `n` on resolution `r` (coarsest first).
    pub levels: Vec<Vec<f64>>,
    /// Observed order per level from the three finest grids,
    /// `log₂((E_h − E_{h/2}) / (E_{h/2} − E_{h/4}))`.
    pub orders: Vec<f64>,
    /// Richardson extrapolation of the two finest grids, `(4E_{h/2} − E_h)/3`.
    pub extrapolated: Vec<f64>,
}

impl ConvergenceStudy {
    /// Levels on the finest grid.
    pub fn finest(&self) -> &[f64] {
        &self.levels[self.levels.len() - 1]
    }

    /// `|E_r − E_finest|` per resolution and level.
    pub fn errors_vs_finest(&self) -> Vec<Vec<f64>> {
        let finest = self.finest();
        self.levels
            .iter()
            .map(|row| row.iter().zip(finest).map(|(a, b)| (a - b).abs()).collect())
            .collect()
    }

    /// Every observed order lies within `tolerance` of 2.
    pub fn is_second_order(&self, tolerance: f64) -> bool {
        self.orders.iter().all(|p| (p - 2.0).abs() <= tolerance)
    }
}

/// Solves the same problem on each grid of `ladder`, which must hold at
/// least three specs on one domain with each one the refinement of the last.
pub fn convergence_study(
    params: &SnyderParams,
    ladder: &[GridSpec],
    k: usize,
) -> Result<ConvergenceStudy> {
    if ladder.len() < 3 {
        return Err(Error::InvalidLadder(format!(
            "need at least 3 resolutions, got {}",
            ladder.len()
        )));
    }
    for pair in ladder.windows(2) {
        if pair[1] != pair[0].refined() {
            return Err(Error::InvalidLadder(format!(
                "{} points on rho_max = {} is not the refinement of {} points on rho_max = {}",
                pair[1].points, pair[1].rho_max, pair[0].points, pair[0].rho_max
            )));
        }
    }
    let levels = ladder
        .iter()
        .map(|spec| build_grid_hamiltonian(params, spec)?.lowest_levels(k))
        .collect::<Result<Vec<_>>>()?;
    let r = levels.len();
    let (coarse, mid, fine) = (&levels[r - 3], &levels[r - 2], &levels[r - 1]);
    let orders = (0..k)
        .map(|n| ((coarse[n] - mid[n]) / (mid[n] - fine[n])).abs().log2())
        .collect();
    let extrapolated = richardson(mid, fine);
    Ok(ConvergenceStudy {
        specs: ladder.to_vec(),
        levels,
        orders,
        extrapolated,
    })
}

/// `base`, then `count − 1` successive refinements.
pub fn refinement_ladder(base: GridSpec, count: usize) -> Vec<GridSpec> {
    std::iter::successors(Some(base), |s| Some(s.refined()))
        .take(count)
        .collect()
}
