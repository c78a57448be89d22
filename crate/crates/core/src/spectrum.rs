/// Ordered eigenvalues of one Hamiltonian realization plus the metadata
/// needed to judge them.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Per eigenvalue: insensitive to truncation/resolution.
    pub converged: Vec<bool>,
    /// Per eigenvalue, grid realizations only: below the potential saturation.
    pub bound: Option<Vec<bool>>,
    /// Fock dimension or grid point count the values were computed at.
    pub truncation_dim: usize,
    /// Backend or grid identifier.
    pub label: String,
}

impl EigenSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn count_converged(&self) -> usize {
        self.converged.iter().filter(|&&c| c).count()
    }

    pub fn count_bound(&self) -> Option<usize> {
        self.bound
            .as_ref()
            .map(|b| b.iter().filter(|&&x| x).count())
    }
}

/// `|a − b| / |b|`, falling back to the absolute difference at `b = 0`.
pub(crate) fn relative_change(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}
