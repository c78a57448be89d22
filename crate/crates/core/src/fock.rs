//! Number-basis realizations of the quantum oscillator.
//!
//! Backends:
//!
//! * `PaperLiteral`: the action of `H` on `|n⟩` with its `l²/(1+l²)`
//!   coefficients, entered entry by entry.
//! * `NormalOrdered`: `H = ω(a†a + ½) + (mω²l²/2)(a†a† − a†a − aa† + aa)`
//!   multiplied out with ordinary ladder matrices. The `mω` inside the
//!   prefactor makes the deformed commutator `1 + (mωl²/2)(a† − a)²` valid
//!   for general `m, ω`; the bare `l²/2` form is its `mω = 1` slice.
//! * `CounterTerm`: `P²/2m + ½mω²X² + (l²/2)P²` with `X`, `P` built from
//!   ladder matrices of the bare `(m, ω)`.
//! * `CounterTermRebased`: the same operator with `X`, `P` built from
//!   ladder matrices of the renormalized `(m̃, ω̃)`; diagonal.
//!
//! Products of ladder matrices are formed at dimension `N + 4` and cropped,
//! so every entry of the `N × N` result is exact.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{check_symmetric, symmetric_eigen, Eigen};
use crate::params::SnyderParams;
use crate::spectrum::{relative_change, EigenSpectrum};

pub const MIN_LADDER_DIM: usize = 2;
pub const MIN_HAMILTONIAN_DIM: usize = 4;
const PAD: usize = 4;

/// Relative change allowed under dimension doubling for a converged level.
pub const TRUNCATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    PaperLiteral,
    NormalOrdered,
    CounterTerm,
    CounterTermRebased,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::PaperLiteral => "paper",
            Backend::NormalOrdered => "normal",
            Backend::CounterTerm => "tilde",
            Backend::CounterTermRebased => "tilde-rebased",
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "paper" | "paper-literal" => Ok(Backend::PaperLiteral),
            "normal" | "normal-ordered" => Ok(Backend::NormalOrdered),
            "tilde" | "counter-term" => Ok(Backend::CounterTerm),
            "tilde-rebased" => Ok(Backend::CounterTermRebased),
            other => Err(format!(
                "unknown backend `{other}` (expected paper, normal, tilde, tilde-rebased)"
            )),
        }
    }
}

/// Truncated Hamiltonian in the number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    pub entries: DMatrix<f64>,
    pub backend: Backend,
    pub params: SnyderParams,
}

impl FockMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let x = nalgebra::DVector::from_column_slice(v);
        (&self.entries * x).iter().copied().collect()
    }

    /// Nonzero entries `(i, j, value)` in row-major order.
    pub fn nonzeros(&self) -> Vec<(usize, usize, f64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = self.entries[(i, j)];
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// Rebuilds the same backend at another dimension.
    pub fn rebuild(&self, dim: usize) -> Result<FockMatrix> {
        build(self.backend, &self.params, dim)
    }
}

fn check_dim(dim: usize, min: usize) -> Result<()> {
    if dim < min {
        Err(Error::DimTooSmall { dim, min })
    } else {
        Ok(())
    }
}

fn raw_ladder(dim: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    let ad = a.transpose();
    (a, ad)
}

/// `(a, a†)` truncated to `dim`: `a|n⟩ = √n|n−1⟩`, `a†|n⟩ = √(n+1)|n+1⟩`.
pub fn ladder_matrices(dim: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_dim(dim, MIN_LADDER_DIM)?;
    Ok(raw_ladder(dim))
}

fn crop(m: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    m.view((0, 0), (dim, dim)).into_owned()
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

/// `X²` and `P²` for ladder operators of an oscillator with `(mass, omega)`:
/// `X = (a + a†)/√(2mω)`, `P = i√(mω/2)(a† − a)`.
pub fn quadratures_squared(mass: f64, omega: f64, dim: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let (a, ad) = raw_ladder(dim + PAD);
    let sum = &a + &ad;
    let diff = &ad - &a;
    let x2 = (&sum * &sum) / (2.0 * mass * omega);
    let p2 = (&diff * &diff) * (-0.5 * mass * omega);
    (crop(&x2, dim), crop(&p2, dim))
}

/// Entries exactly as printed: diagonal `ω{n[1 − r] + ½[1 + r]}` with
/// `r = l²/(1+l²)`, and `ω l²/(2(1+l²)) √(n+1)√(n+2)` at `(n, n+2)`.
pub fn build_hamiltonian_paper(params: &SnyderParams, dim: usize) -> Result<FockMatrix> {
    check_dim(dim, MIN_HAMILTONIAN_DIM)?;
    let w = params.omega();
    let l2 = params.l() * params.l();
    let r = l2 / (1.0 + l2);
    let coupling = l2 / (2.0 * (1.0 + l2));
    let mut h = DMatrix::zeros(dim, dim);
    for n in 0..dim {
        let nf = n as f64;
        h[(n, n)] = w * (nf * (1.0 - r) + 0.5 * (1.0 + r));
        if n + 2 < dim {
            let v = w * coupling * (nf + 1.0).sqrt() * (nf + 2.0).sqrt();
            h[(n, n + 2)] = v;
            h[(n + 2, n)] = v;
        }
    }
    Ok(FockMatrix {
        entries: h,
        backend: Backend::PaperLiteral,
        params: *params,
    })
}

pub fn build_hamiltonian_normal_ordered(params: &SnyderParams, dim: usize) -> Result<FockMatrix> {
    check_dim(dim, MIN_HAMILTONIAN_DIM)?;
    let (w, m, l) = (params.omega(), params.mass(), params.l());
    let (a, ad) = raw_ladder(dim + PAD);
    let identity = DMatrix::<f64>::identity(dim + PAD, dim + PAD);
    let number = DMatrix::from_diagonal(&DVector::from_fn(dim + PAD, |n, _| n as f64));
    let free = (&number + identity * 0.5) * w;
    let quartic = &ad * &ad - &number - &a * &ad + &a * &a;
    let h = free + quartic * (0.5 * w * l * l * m * w);
    Ok(FockMatrix {
        entries: symmetrize(crop(&h, dim)),
        backend: Backend::NormalOrdered,
        params: *params,
    })
}

/// `(m̃, ω̃) = (m/(1 + ml²), ω√(1 + ml²))`.
pub fn renormalized_params(params: &SnyderParams) -> (f64, f64) {
    let shift = 1.0 + params.mass() * params.l() * params.l();
    (params.mass() / shift, params.omega() * shift.sqrt())
}

/// Counter-term Hamiltonian assembled term by term:
/// `P²/2m + ½mω²X² + (l²/2)P²`.
pub fn build_hamiltonian_tilde(params: &SnyderParams, dim: usize) -> Result<FockMatrix> {
    check_dim(dim, MIN_HAMILTONIAN_DIM)?;
    let (w, m, l) = (params.omega(), params.mass(), params.l());
    let (x2, p2) = quadratures_squared(m, w, dim);
    let h = &p2 / (2.0 * m) + &x2 * (0.5 * m * w * w) + &p2 * (0.5 * l * l);
    Ok(FockMatrix {
        entries: symmetrize(h),
        backend: Backend::CounterTerm,
        params: *params,
    })
}

/// The same operator regrouped as `P²/2m̃ + ½m̃ω̃²X²`, still in the bare
/// `(m, ω)` number basis.
pub fn build_hamiltonian_tilde_regrouped(params: &SnyderParams, dim: usize) -> Result<FockMatrix> {
    check_dim(dim, MIN_HAMILTONIAN_DIM)?;
    let (m_t, w_t) = renormalized_params(params);
    let (x2, p2) = quadratures_squared(params.mass(), params.omega(), dim);
    let h = &p2 / (2.0 * m_t) + &x2 * (0.5 * m_t * w_t * w_t);
    Ok(FockMatrix {
        entries: symmetrize(h),
        backend: Backend::CounterTerm,
        params: *params,
    })
}

/// `P²/2m̃ + ½m̃ω̃²X²` with `X`, `P` from ladder operators of `(m̃, ω̃)`.
pub fn build_hamiltonian_tilde_rebased(params: &SnyderParams, dim: usize) -> Result<FockMatrix> {
    check_dim(dim, MIN_HAMILTONIAN_DIM)?;
    let (m_t, w_t) = renormalized_params(params);
    let (x2, p2) = quadratures_squared(m_t, w_t, dim);
    let h = &p2 / (2.0 * m_t) + &x2 * (0.5 * m_t * w_t * w_t);
    Ok(FockMatrix {
        entries: symmetrize(h),
        backend: Backend::CounterTermRebased,
        params: *params,
    })
}

pub fn build(backend: Backend, params: &SnyderParams, dim: usize) -> Result<FockMatrix> {
    match backend {
        Backend::PaperLiteral => build_hamiltonian_paper(params, dim),
        Backend::NormalOrdered => build_hamiltonian_normal_ordered(params, dim),
        Backend::CounterTerm => build_hamiltonian_tilde(params, dim),
        Backend::CounterTermRebased => build_hamiltonian_tilde_rebased(params, dim),
    }
}

/// `ω̃(n + ½)` for `n = 0..=n_max`.
pub fn paper_spectrum(params: &SnyderParams, n_max: usize) -> EigenSpectrum {
    let (_, w_t) = renormalized_params(params);
    EigenSpectrum {
        eigenvalues: (0..=n_max).map(|n| w_t * (n as f64 + 0.5)).collect(),
        converged: vec![true; n_max + 1],
        bound: None,
        truncation_dim: n_max + 1,
        label: "paper-spectrum".into(),
    }
}

/// Max-norm of `PaperLiteral − NormalOrdered` at dimension `dim`.
pub fn backend_difference(params: &SnyderParams, dim: usize) -> Result<f64> {
    let a = build_hamiltonian_paper(params, dim)?;
    let b = build_hamiltonian_normal_ordered(params, dim)?;
    Ok((a.entries - b.entries).amax())
}

/// Lowest `k` eigenvalues. Each is flagged converged when rebuilding the
/// matrix at twice the dimension moves it by less than [`TRUNCATION_TOL`]
/// (relative).
pub fn diagonalize(matrix: &FockMatrix, k: usize) -> Result<EigenSpectrum> {
    let dim = matrix.dim();
    if k > dim {
        return Err(Error::TooManyEigenvalues {
            requested: k,
            size: dim,
        });
    }
    let values = symmetric_eigen(&matrix.entries, false)?.values;
    let doubled = matrix.rebuild(2 * dim)?;
    let reference = symmetric_eigen(&doubled.entries, false)?.values;
    let eigenvalues: Vec<f64> = values[..k].to_vec();
    let converged = eigenvalues
        .iter()
        .zip(&reference)
        .map(|(a, b)| relative_change(*a, *b) < TRUNCATION_TOL)
        .collect();
    Ok(EigenSpectrum {
        eigenvalues,
        converged,
        bound: None,
        truncation_dim: dim,
        label: format!("fock-{}", matrix.backend),
    })
}

/// Full eigendecomposition at the given truncation, no convergence check.
pub fn eigensystem(matrix: &FockMatrix) -> Result<Eigen> {
    check_symmetric(&matrix.entries)?;
    symmetric_eigen(&matrix.entries, true)
}
