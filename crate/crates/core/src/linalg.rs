//! Symmetric eigensolvers.
//!
//! Dense symmetric matrices are reduced to tridiagonal form by Householder
//! reflections and then diagonalized with the implicit QL algorithm
//! (Wilkinson shifts). Large tridiagonal problems where only the lowest few
//! eigenvalues matter go through Sturm-sequence bisection instead, which is
//! `O(n)` per probe and never forms a dense matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Maximum QL sweeps per eigenvalue.
const QL_MAX_ITER: usize = 60;

/// Symmetric tridiagonal matrix: `diag[i]` and `off[i]` at `(i, i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal length");
        SymTridiagonal { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count on the LDLᵀ
    /// pivots of `T − xI`).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut pivot = 1.0;
        for i in 0..self.len() {
            let coupling = if i > 0 {
                self.off[i - 1] * self.off[i - 1]
            } else {
                0.0
            };
            pivot = self.diag[i] - x - if i > 0 { coupling / pivot } else { 0.0 };
            if pivot == 0.0 {
                pivot = -f64::EPSILON * (x.abs() + 1.0);
            }
            if pivot < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Lowest `k` eigenvalues in ascending order by bisection, each bracketed
    /// to within a few ulps.
    pub fn lowest_eigenvalues(&self, k: usize) -> Result<Vec<f64>> {
        if k > self.len() {
            return Err(Error::TooManyEigenvalues {
                requested: k,
                size: self.len(),
            });
        }
        let (lo, hi) = self.gershgorin();
        let span = (hi - lo).max(f64::MIN_POSITIVE);
        let mut out = Vec::with_capacity(k);
        let mut floor = lo - 1e-12 * span;
        for index in 0..k {
            // eigenvalue `index` is the smallest x with count_below(x) > index
            let (mut a, mut b) = (floor, hi + 1e-12 * span);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if self.count_below(mid) > index {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            let value = 0.5 * (a + b);
            out.push(value);
            floor = a;
        }
        Ok(out)
    }

    /// All eigenvalues (ascending) and optionally eigenvectors via implicit QL.
    pub fn eigen(&self, vectors: bool) -> Result<Eigen> {
        let n = self.len();
        let z = if vectors {
            Some(DMatrix::identity(n, n))
        } else {
            None
        };
        ql_implicit(self.diag.clone(), self.off.clone(), z)
    }
}

/// Eigenvalues in ascending order; column `i` of `vectors` belongs to `values[i]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Option<DMatrix<f64>>,
}

/// Exact symmetry check; returns the first offending index pair.
pub fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSymmetric {
            row: a.nrows(),
            col: a.ncols(),
        });
    }
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            if a[(i, j)] != a[(j, i)] {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
/// Returns the tridiagonal matrix and, if requested, the orthogonal `Q`
/// with `A = Q T Qᵀ`.
pub fn tridiagonalize(
    a: &DMatrix<f64>,
    accumulate: bool,
) -> (SymTridiagonal, Option<DMatrix<f64>>) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut q = if accumulate {
        Some(DMatrix::<f64>::identity(n, n))
    } else {
        None
    };
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let alpha_sq: f64 = ((k + 1)..n).map(|i| m[(i, k)] * m[(i, k)]).sum();
        let scale = alpha_sq.sqrt();
        if scale == 0.0 {
            continue;
        }
        let x0 = m[(k + 1, k)];
        let alpha = if x0 > 0.0 { -scale } else { scale };
        // v = x − α e₁, normalized so that H = I − 2vvᵀ
        v.fill(0.0);
        v[k + 1] = x0 - alpha;
        for i in (k + 2)..n {
            v[i] = m[(i, k)];
        }
        let vnorm_sq: f64 = ((k + 1)..n).map(|i| v[i] * v[i]).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let vnorm = vnorm_sq.sqrt();
        for x in &mut v[(k + 1)..n] {
            *x /= vnorm;
        }
        // A ← H A H with p = A v, w = 2(p − (vᵀp) v)
        for i in k..n {
            p[i] = ((k + 1)..n).map(|j| m[(i, j)] * v[j]).sum();
        }
        let vp: f64 = ((k + 1)..n).map(|i| v[i] * p[i]).sum();
        for i in k..n {
            p[i] = 2.0 * (p[i] - vp * v[i]);
        }
        for i in k..n {
            for j in k..n {
                let update = v[i] * p[j] + p[i] * v[j];
                m[(i, j)] -= update;
            }
        }
        if let Some(q) = q.as_mut() {
            // Q ← Q H
            for r in 0..n {
                let dot: f64 = ((k + 1)..n).map(|j| q[(r, j)] * v[j]).sum();
                for j in (k + 1)..n {
                    q[(r, j)] -= 2.0 * dot * v[j];
                }
            }
        }
    }
    let diag = (0..n).map(|i| m[(i, i)]).collect();
    let off = (0..n.saturating_sub(1)).map(|i| m[(i + 1, i)]).collect();
    (SymTridiagonal { diag, off }, q)
}

/// Implicit QL with Wilkinson shifts on `(d, e)`; `e[i]` couples `i, i+1`.
/// Rotations are accumulated into `z` when given.
fn ql_implicit(mut d: Vec<f64>, off: Vec<f64>, mut z: Option<DMatrix<f64>>) -> Result<Eigen> {
    let n = d.len();
    let mut e = off;
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::ConvergenceFailure { iterations: iter });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_mut() {
                    for k in 0..z.nrows() {
                        let zk1 = z[(k, i + 1)];
                        let zk = z[(k, i)];
                        z[(k, i + 1)] = s * zk + c * zk1;
                        z[(k, i)] = c * zk - s * zk1;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    // sort ascending, carrying vectors along
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = z.map(|z| DMatrix::from_fn(z.nrows(), n, |r, c| z[(r, order[c])]));
    Ok(Eigen { values, vectors })
}

/// All eigenvalues (and optionally eigenvectors) of a dense symmetric matrix.
pub fn symmetric_eigen(a: &DMatrix<f64>, vectors: bool) -> Result<Eigen> {
    check_symmetric(a)?;
    let (tri, q) = tridiagonalize(a, vectors);
    let eig = tri.eigen(vectors)?;
    let vectors = match (q, eig.vectors) {
        (Some(q), Some(z)) => Some(q * z),
        _ => None,
    };
    Ok(Eigen {
        values: eig.values,
        vectors,
    })
}
