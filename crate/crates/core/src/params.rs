//! Model parameters shared by every part of the crate.
//!
//! Units: ℏ = 1 everywhere. All quantities are plain dimensionless numbers;
//! the classical routines only ever read `l` and `omega` (unit mass).

use crate::error::{Error, Result};

/// Dynamical regime of the deformed classical oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `l·ω < 1`: bounded periodic motion with a real effective frequency.
    Oscillatory,
    /// `l·ω ≥ 1`: the effective frequency `ω√(1 − l²ω²)` is no longer real.
    Cutoff,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Oscillatory => f.write_str("oscillatory"),
            Regime::Cutoff => f.write_str("cutoff"),
        }
    }
}

/// Validated `(l, ω, m)` triple. Immutable once constructed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnyderParams {
    l: f64,
    omega: f64,
    mass: f64,
}

impl SnyderParams {
    pub fn new(l: f64, omega: f64, mass: f64) -> Result<Self> {
        validate(l, omega, mass)
    }

    /// Unit-mass parameters, the classical convention.
    pub fn classical(l: f64, omega: f64) -> Result<Self> {
        validate(l, omega, 1.0)
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn l_omega(&self) -> f64 {
        self.l * self.omega
    }

    /// `l²ω²`, the small parameter of the classical problem.
    pub fn deformation(&self) -> f64 {
        let x = self.l_omega();
        x * x
    }

    /// `l²mω`, the small parameter of the quantum problem.
    pub fn quantum_deformation(&self) -> f64 {
        self.l * self.l * self.mass * self.omega
    }

    pub fn regime(&self) -> Regime {
        classify_regime(self)
    }

    /// Returns an error unless the parameters are in the oscillatory regime.
    pub fn require_oscillatory(&self) -> Result<()> {
        match self.regime() {
            Regime::Oscillatory => Ok(()),
            Regime::Cutoff => Err(Error::CutoffRegime {
                l_omega: self.l_omega(),
            }),
        }
    }

    pub fn with_l(&self, l: f64) -> Result<Self> {
        validate(l, self.omega, self.mass)
    }

    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        validate(self.l, omega, self.mass)
    }
}

pub fn validate(l: f64, omega: f64, mass: f64) -> Result<SnyderParams> {
    if !l.is_finite() {
        return Err(Error::NonFinite("l"));
    }
    if !omega.is_finite() {
        return Err(Error::NonFinite("omega"));
    }
    if !mass.is_finite() {
        return Err(Error::NonFinite("mass"));
    }
    if l < 0.0 {
        return Err(Error::NegativeL(l));
    }
    if omega <= 0.0 {
        return Err(Error::NonPositiveOmega(omega));
    }
    if mass <= 0.0 {
        return Err(Error::NonPositiveMass(mass));
    }
    Ok(SnyderParams { l, omega, mass })
}

/// The boundary `l·ω = 1` belongs to the cutoff regime.
pub fn classify_regime(params: &SnyderParams) -> Regime {
    if params.l_omega() < 1.0 {
        Regime::Oscillatory
    } else {
        Regime::Cutoff
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validate_examples() {
        let p = validate(0.1, 1.0, 1.0).unwrap();
        assert_eq!(p.regime(), Regime::Oscillatory);
        let p = validate(2.0, 1.0, 1.0).unwrap();
        assert_eq!(p.regime(), Regime::Cutoff);
        assert_eq!(validate(0.1, -1.0, 1.0), Err(Error::NonPositiveOmega(-1.0)));
    }

    #[test]
    fn validate_names_offending_field() {
        assert_eq!(validate(-0.1, 1.0, 1.0), Err(Error::NegativeL(-0.1)));
        assert_eq!(validate(0.1, 0.0, 1.0), Err(Error::NonPositiveOmega(0.0)));
        assert_eq!(validate(0.1, 1.0, 0.0), Err(Error::NonPositiveMass(0.0)));
        assert_eq!(validate(f64::NAN, 1.0, 1.0), Err(Error::NonFinite("l")));
        assert_eq!(
            validate(0.1, f64::INFINITY, 1.0),
            Err(Error::NonFinite("omega"))
        );
    }

    #[test]
    fn regime_examples() {
        let fig = SnyderParams::classical(1e-5, 8.5e-4).unwrap();
        assert_eq!(classify_regime(&fig), Regime::Oscillatory);
        let free = SnyderParams::classical(0.0, 5.0).unwrap();
        assert_eq!(classify_regime(&free), Regime::Oscillatory);
        let edge = SnyderParams::classical(1.0, 1.0).unwrap();
        assert_eq!(classify_regime(&edge), Regime::Cutoff);
        assert!(matches!(
            edge.require_oscillatory(),
            Err(Error::CutoffRegime { .. })
        ));
    }

    proptest! {
        #[test]
        fn regime_depends_only_on_product(l in 0.0f64..5.0, omega in 0.01f64..5.0, scale in 0.1f64..10.0) {
            let a = SnyderParams::classical(l, omega).unwrap();
            let b = SnyderParams::classical(l / scale, omega * scale).unwrap();
            // l·ω is preserved up to rounding; stay clear of the boundary.
            prop_assume!((a.l_omega() - 1.0).abs() > 1e-9);
            prop_assert_eq!(a.regime(), b.regime());
        }

        #[test]
        fn validate_is_idempotent(l in 0.0f64..5.0, omega in 0.01f64..5.0, mass in 0.01f64..5.0) {
            let p = validate(l, omega, mass).unwrap();
            let q = validate(p.l(), p.omega(), p.mass()).unwrap();
            prop_assert_eq!(p, q);
        }
    }
}
