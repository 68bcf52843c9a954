//! Dense symmetric / SPD matrix primitives.
//!
//! Everything here targets the small dense regime (a few dozen rows at most):
//! a cyclic Jacobi eigensolver with a deterministic ordering and sign
//! convention, eigenvalue-mapped matrix functions (square roots), and the
//! trace-of-square-root and rotation-diagonalization shortcuts that are exact
//! for 2×2 matrices.

use crate::error::{Error, Result};
use crate::Scalar;

/// Max Jacobi sweeps before reporting non-convergence.
const JACOBI_MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius tolerance, relative to the input Frobenius norm.
const JACOBI_TOL: f64 = 1e-14;

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

/// General square dense matrix, row-major. Used for orthogonal frames and
/// products that are not symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F> {
    dim: usize,
    data: Vec<F>,
}

impl<F: Scalar> Matrix<F> {
    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            check_dim(dim, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self {
            dim,
            data: vec![F::zero(); dim * dim],
        };
        for i in 0..dim {
            m.data[i * dim + i] = F::one();
        }
        m
    }

    /// Counter-clockwise 2-D rotation matrix.
    pub fn rotation_2d(theta: F) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            dim: 2,
            data: vec![c, -s, s, c],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.dim + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = Self {
            dim: d,
            data: vec![F::zero(); d * d],
        };
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j];
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let d = self.dim;
        let mut out = Self {
            dim: d,
            data: vec![F::zero(); d * d],
        };
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == F::zero() {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, x: &[F]) -> Result<Vec<F>> {
        check_dim(self.dim, x.len())?;
        let d = self.dim;
        Ok((0..d)
            .map(|i| (0..d).map(|j| self.data[i * d + j] * x[j]).sum())
            .collect())
    }

    /// P · S · Pᵀ, symmetrized.
    pub fn conjugate(&self, s: &SymMatrix<F>) -> Result<SymMatrix<F>> {
        check_dim(self.dim, s.dim)?;
        let ps = self.mul(&s.to_matrix())?;
        let out = ps.mul(&self.transpose())?;
        SymMatrix::from_matrix_symmetrized(&out)
    }

    /// Pᵀ · S · P, symmetrized.
    pub fn conjugate_transpose(&self, s: &SymMatrix<F>) -> Result<SymMatrix<F>> {
        check_dim(self.dim, s.dim)?;
        let ps = self.transpose().mul(&s.to_matrix())?;
        let out = ps.mul(self)?;
        SymMatrix::from_matrix_symmetrized(&out)
    }

    pub fn norm_inf(&self) -> F {
        self.data
            .iter()
            .fold(F::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// ‖PᵀP − I‖∞, zero for an orthogonal matrix.
    pub fn orthogonality_residual(&self) -> F {
        let d = self.dim;
        let mut res = F::zero();
        for i in 0..d {
            for j in 0..d {
                let mut dot = F::zero();
                for k in 0..d {
                    dot += self.data[k * d + i] * self.data[k * d + j];
                }
                let target = if i == j { F::one() } else { F::zero() };
                res = res.max((dot - target).abs());
            }
        }
        res
    }

    pub fn rows(&self) -> Vec<Vec<F>> {
        (0..self.dim)
            .map(|i| self.data[i * self.dim..(i + 1) * self.dim].to_vec())
            .collect()
    }
}

/// Symmetric matrix; entries are symmetrized on construction so that
/// `get(i, j) == get(j, i)` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<F> {
    dim: usize,
    data: Vec<F>,
}

impl<F: Scalar> SymMatrix<F> {
    /// Builds from a full square array, averaging mirrored entries.
    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        Self::from_matrix_symmetrized(&Matrix::from_rows(rows)?)
    }

    pub(crate) fn from_matrix_symmetrized(m: &Matrix<F>) -> Result<Self> {
        let d = m.dim;
        let half = F::c(0.5);
        let mut data = vec![F::zero(); d * d];
        for i in 0..d {
            data[i * d + i] = m.get(i, i);
            for j in (i + 1)..d {
                let v = (m.get(i, j) + m.get(j, i)) * half;
                data[i * d + j] = v;
                data[j * d + i] = v;
            }
        }
        Ok(Self { dim: d, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = vec![F::zero(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = f(i, i);
            for j in (i + 1)..dim {
                let v = f(i, j);
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![F::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { F::one() } else { F::zero() })
    }

    pub fn diagonal(entries: &[F]) -> Self {
        let d = entries.len();
        Self::from_fn(d, |i, j| if i == j { entries[i] } else { F::zero() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i * self.dim + j]
    }

    pub fn to_matrix(&self) -> Matrix<F> {
        Matrix {
            dim: self.dim,
            data: self.data.clone(),
        }
    }

    pub fn rows(&self) -> Vec<Vec<F>> {
        (0..self.dim)
            .map(|i| self.data[i * self.dim..(i + 1) * self.dim].to_vec())
            .collect()
    }

    pub fn trace(&self) -> F {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, c: F) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-F::one()))
    }

    pub fn apply(&self, x: &[F]) -> Result<Vec<F>> {
        self.to_matrix().apply(x)
    }

    /// self · inner · self (symmetric for symmetric factors).
    pub fn sandwich(&self, inner: &Self) -> Result<Self> {
        check_dim(self.dim, inner.dim)?;
        let m = self.to_matrix();
        let prod = m.mul(&inner.to_matrix())?.mul(&m)?;
        Self::from_matrix_symmetrized(&prod)
    }

    pub fn norm_inf(&self) -> F {
        self.data
            .iter()
            .fold(F::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn norm_frobenius(&self) -> F {
        self.data.iter().map(|&v| v * v).sum::<F>().sqrt()
    }

    /// tr(X · V · Y) by direct triple product, no intermediate matrices.
    pub fn triple_trace(x: &Self, v: &Self, y: &Self) -> Result<F> {
        check_dim(x.dim, v.dim)?;
        check_dim(x.dim, y.dim)?;
        let d = x.dim;
        let mut acc = F::zero();
        for i in 0..d {
            for j in 0..d {
                let xij = x.get(i, j);
                if xij == F::zero() {
                    continue;
                }
                for k in 0..d {
                    acc += xij * v.get(j, k) * y.get(k, i);
                }
            }
        }
        Ok(acc)
    }

    /// Cyclic Jacobi eigendecomposition. Eigenvalues descending, eigenvector
    /// sign fixed so the first nonzero entry of each column is positive.
    pub fn eigendecompose(&self) -> Result<EigenPair<F>> {
        sym_eig(self)
    }
}

/// Orthogonal eigendecomposition `P diag(λ) Pᵀ` with λ sorted descending.
#[derive(Debug, Clone)]
pub struct EigenPair<F> {
    p: Matrix<F>,
    lambda: Vec<F>,
}

impl<F: Scalar> EigenPair<F> {
    pub fn new(p: Matrix<F>, lambda: Vec<F>) -> Result<Self> {
        check_dim(p.dim(), lambda.len())?;
        Ok(Self { p, lambda })
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn p(&self) -> &Matrix<F> {
        &self.p
    }

    pub fn lambda(&self) -> &[F] {
        &self.lambda
    }

    pub fn eigenvector(&self, col: usize) -> Vec<F> {
        (0..self.dim()).map(|i| self.p.get(i, col)).collect()
    }

    /// P · diag(λ) · Pᵀ.
    pub fn reconstruct(&self) -> SymMatrix<F> {
        self.map_eigenvalues(|l| l)
    }

    /// P · diag(f(λ)) · Pᵀ.
    pub fn map_eigenvalues(&self, f: impl Fn(F) -> F) -> SymMatrix<F> {
        let d = self.dim();
        let fl: Vec<F> = self.lambda.iter().map(|&l| f(l)).collect();
        SymMatrix::from_fn(d, |i, j| {
            (0..d)
                .map(|k| self.p.get(i, k) * fl[k] * self.p.get(j, k))
                .sum()
        })
    }
}

/// Cyclic Jacobi symmetric eigensolver.
///
/// Deterministic: the sweep order, the sort (descending, stable) and the sign
/// convention are all fixed, so bit-identical input gives bit-identical
/// output.
pub fn sym_eig<F: Scalar>(m: &SymMatrix<F>) -> Result<EigenPair<F>> {
    let d = m.dim;
    let tol = F::c(JACOBI_TOL) * m.norm_frobenius();
    let mut a = m.data.clone();
    let mut p = Matrix::identity(d);

    let off = |a: &[F]| -> F {
        let mut s = F::zero();
        for i in 0..d {
            for j in (i + 1)..d {
                s += a[i * d + j] * a[i * d + j];
            }
        }
        (s + s).sqrt()
    };

    let mut converged = off(&a) <= tol;
    let mut sweeps = 0;
    while !converged {
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNonConvergence {
                sweeps: JACOBI_MAX_SWEEPS,
            });
        }
        for pi in 0..d.saturating_sub(1) {
            for qi in (pi + 1)..d {
                let apq = a[pi * d + qi];
                if apq == F::zero() {
                    continue;
                }
                let app = a[pi * d + pi];
                let aqq = a[qi * d + qi];
                let tau = (aqq - app) / (F::c(2.0) * apq);
                let t = if tau >= F::zero() {
                    F::one() / (tau + (F::one() + tau * tau).sqrt())
                } else {
                    -F::one() / (-tau + (F::one() + tau * tau).sqrt())
                };
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = t * c;

                // Rotate rows/columns pi and qi of A.
                for k in 0..d {
                    let akp = a[k * d + pi];
                    let akq = a[k * d + qi];
                    a[k * d + pi] = c * akp - s * akq;
                    a[k * d + qi] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[pi * d + k];
                    let aqk = a[qi * d + k];
                    a[pi * d + k] = c * apk - s * aqk;
                    a[qi * d + k] = s * apk + c * aqk;
                }
                a[pi * d + qi] = F::zero();
                a[qi * d + pi] = F::zero();

                // Accumulate the rotation into P.
                for k in 0..d {
                    let vkp = p.get(k, pi);
                    let vkq = p.get(k, qi);
                    p.set(k, pi, c * vkp - s * vkq);
                    p.set(k, qi, s * vkp + c * vkq);
                }
            }
        }
        sweeps += 1;
        converged = off(&a) <= tol;
    }

    let mut lambda: Vec<F> = (0..d).map(|i| a[i * d + i]).collect();
    // Stable descending sort so repeated eigenvalues keep sweep order.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| lambda[j].partial_cmp(&lambda[i]).expect("eigenvalue NaN"));

    let mut sorted_p = Matrix::identity(d);
    let sorted_lambda: Vec<F> = order.iter().map(|&k| lambda[k]).collect();
    for (col, &k) in order.iter().enumerate() {
        let mut sign = F::one();
        for row in 0..d {
            let v = p.get(row, k);
            if v != F::zero() {
                if v < F::zero() {
                    sign = -F::one();
                }
                break;
            }
        }
        for row in 0..d {
            sorted_p.set(row, col, sign * p.get(row, k));
        }
    }
    lambda = sorted_lambda;
    EigenPair::new(sorted_p, lambda)
}

/// Symmetric positive definite matrix. Positive definiteness is checked at
/// construction (eigendecomposition is computed up front and kept).
#[derive(Debug, Clone)]
pub struct SpdMatrix<F> {
    sym: SymMatrix<F>,
    eig: EigenPair<F>,
}

/// `eps_pd` boundary: eigenvalues at or below this count as non-positive.
pub fn eps_pd<F: Scalar>(max_abs_eigenvalue: F) -> F {
    F::c(1e-12) * max_abs_eigenvalue.max(F::one())
}

impl<F: Scalar> SpdMatrix<F> {
    pub fn new(sym: SymMatrix<F>) -> Result<Self> {
        let eig = sym_eig(&sym)?;
        let max_abs = eig
            .lambda()
            .iter()
            .fold(F::zero(), |acc, &l| acc.max(l.abs()));
        let tol = eps_pd(max_abs);
        let min = eig.lambda()[eig.dim() - 1];
        if min <= tol {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min.as_f64(),
                tolerance: tol.as_f64(),
            });
        }
        Ok(Self { sym, eig })
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        Self::new(SymMatrix::from_rows(rows)?)
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(SymMatrix::identity(dim)).expect("identity is SPD")
    }

    pub fn diagonal(entries: &[F]) -> Result<Self> {
        Self::new(SymMatrix::diagonal(entries))
    }

    /// Internal: build from an eigenpair whose eigenvalues are already known
    /// to be positive (e.g. a mapped decomposition). Re-sorts descending.
    fn from_eig(p: &Matrix<F>, lambda: &[F]) -> Self {
        let d = lambda.len();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| lambda[j].partial_cmp(&lambda[i]).expect("eigenvalue NaN"));
        let mut sp = Matrix::identity(d);
        for (col, &k) in order.iter().enumerate() {
            for row in 0..d {
                sp.set(row, col, p.get(row, k));
            }
        }
        let sl: Vec<F> = order.iter().map(|&k| lambda[k]).collect();
        let eig = EigenPair::new(sp, sl).expect("square");
        let sym = eig.reconstruct();
        Self { sym, eig }
    }

    pub fn dim(&self) -> usize {
        self.sym.dim
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.sym.get(i, j)
    }

    pub fn sym(&self) -> &SymMatrix<F> {
        &self.sym
    }

    pub fn eig(&self) -> &EigenPair<F> {
        &self.eig
    }

    pub fn trace(&self) -> F {
        self.sym.trace()
    }

    pub fn det(&self) -> F {
        self.eig
            .lambda()
            .iter()
            .fold(F::one(), |acc, &l| acc * l)
    }

    pub fn condition_number(&self) -> F {
        self.eig.lambda()[0] / self.eig.lambda()[self.dim() - 1]
    }

    /// Principal square root `P diag(√λ) Pᵀ`.
    pub fn sqrt(&self) -> Self {
        let mapped: Vec<F> = self.eig.lambda().iter().map(|&l| l.sqrt()).collect();
        Self::from_eig(self.eig.p(), &mapped)
    }

    /// Inverse square root; warns via `log` when the matrix is
    /// ill-conditioned (condition number above 1e12).
    pub fn inv_sqrt(&self) -> Self {
        let cond = self.condition_number();
        if cond > F::c(1e12) {
            log::warn!(
                "inverse square root of ill-conditioned matrix (condition number {:e})",
                cond.as_f64()
            );
        }
        let mapped: Vec<F> = self
            .eig
            .lambda()
            .iter()
            .map(|&l| F::one() / l.sqrt())
            .collect();
        Self::from_eig(self.eig.p(), &mapped)
    }

    pub fn inverse(&self) -> Self {
        let mapped: Vec<F> = self
            .eig
            .lambda()
            .iter()
            .map(|&l| F::one() / l)
            .collect();
        Self::from_eig(self.eig.p(), &mapped)
    }
}

/// tr M^{1/2} for a 2×2 positive semidefinite matrix without any
/// eigendecomposition, via the 2×2 trace identity
/// `(tr M^{1/2})² = tr M + 2 √(det M)`.
///
/// Slightly negative determinants (roundoff) are clamped to zero.
pub fn trace_sqrt_2x2<F: Scalar>(m: &SymMatrix<F>) -> Result<F> {
    check_dim(2, m.dim)?;
    let t = m.trace();
    let det = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(0, 1);
    let det = det.max(F::zero());
    let inner = (t + F::c(2.0) * det.sqrt()).max(F::zero());
    Ok(inner.sqrt())
}

/// Diagonalizes a symmetric 2×2 matrix by a rotation `R(θ)` with
/// `θ ∈ (−π/4, π/4]`, `θ = 0` when the off-diagonal entry vanishes.
///
/// Returns `(θ, pair)` where `pair` holds `P = R(θ)` and the diagonal
/// entries of `R(θ)ᵀ M R(θ)` in rotation order (not sorted).
pub fn rotation_diagonalize_2x2<F: Scalar>(m: &SymMatrix<F>) -> Result<(F, EigenPair<F>)> {
    check_dim(2, m.dim)?;
    let v11 = m.get(0, 0);
    let v22 = m.get(1, 1);
    let v12 = m.get(0, 1);
    let theta = if v12 == F::zero() {
        F::zero()
    } else if v11 == v22 {
        F::c(std::f64::consts::FRAC_PI_4)
    } else {
        // cot 2θ = (v11 − v22) / (2 v12), branch with 2θ ∈ (−π/2, π/2)
        (F::c(2.0) * v12 / (v11 - v22)).atan() * F::c(0.5)
    };
    let r = Matrix::rotation_2d(theta);
    let diag = r.conjugate_transpose(m)?;
    let lambda = vec![diag.get(0, 0), diag.get(1, 1)];
    Ok((theta, EigenPair::new(r, lambda)?))
}
