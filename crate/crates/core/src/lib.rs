//! Harmonic oscillator in one-dimensional Snyder space.
//!
//! The deformed bracket `{q, p} = 1 − l²p²` (and its quantum counterpart
//! `[Q, P] = i(1 − l²P²)`) is studied through several independent routes:
//!
//! - [`classical`]: equations of motion, closed-form trajectory, RK4
//!   integration, period, orbit invariant and action.
//! - [`harmonics`]: perturbation series versus Fourier projections of
//!   exact trajectories.
//! - [`fock`]: number-basis Hamiltonians, counter-term renormalization and
//!   truncated diagonalization.
//! - [`grid`]: a representation-faithful finite-difference oracle for the
//!   quantum spectrum.
//!
//! Units: ℏ = 1; classical routines use unit mass.

pub mod classical;
pub mod error;
pub mod fock;
pub mod grid;
pub mod harmonics;
pub mod io;
pub mod linalg;
pub mod params;
pub mod spectrum;

pub use classical::{PhaseState, Trajectory, TrajectorySource};
pub use error::{Error, Result};
pub use fock::{Backend, FockMatrix};
pub use grid::{GridSpec, GridVariant};
pub use harmonics::{Component, HarmonicSpectrum};
pub use params::{Regime, SnyderParams};
pub use spectrum::EigenSpectrum;
