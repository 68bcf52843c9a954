//! The manifold of Gaussian measures under the quadratic transport distance.
//!
//! A point is `Gaussian { mean, cov }`. The geometry lives on the covariance
//! factor: tangent vectors are symmetric displacement-coefficient matrices
//! `S` (the linear map `x ↦ S x`), the geodesic from base `V` in direction
//! `S` is `t ↦ (E + tS) V (E + tS)`, and the metric is `g(X, Y) = tr X V Y`.
//! Mean variation is a plain Euclidean translation and is kept out of the
//! tangent type; use [`translate`].

use crate::error::{Error, Result};
use crate::linalg::{eps_pd, sym_eig, trace_sqrt_2x2, EigenPair, Matrix, SpdMatrix, SymMatrix};
use crate::Scalar;

/// A Gaussian measure `N(mean, cov)`; the manifold point.
#[derive(Debug, Clone)]
pub struct Gaussian<F> {
    mean: Vec<F>,
    cov: SpdMatrix<F>,
}

impl<F: Scalar> Gaussian<F> {
    pub fn new(mean: Vec<F>, cov: SpdMatrix<F>) -> Result<Self> {
        if mean.len() != cov.dim() {
            return Err(Error::Dimension {
                expected: cov.dim(),
                found: mean.len(),
            });
        }
        Ok(Self { mean, cov })
    }

    /// Mean-zero Gaussian `N(V)`.
    pub fn centered(cov: SpdMatrix<F>) -> Self {
        let mean = vec![F::zero(); cov.dim()];
        Self { mean, cov }
    }

    /// Standard Gaussian `N(0, I_d)`.
    pub fn standard(dim: usize) -> Self {
        Self::centered(SpdMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.cov.dim()
    }

    pub fn mean(&self) -> &[F] {
        &self.mean
    }

    pub fn cov(&self) -> &SpdMatrix<F> {
        &self.cov
    }
}

/// Tangent vector at some base point: the symmetric displacement coefficient
/// `S` of the map `x ↦ S x`.
#[derive(Debug, Clone)]
pub struct Tangent<F> {
    coeff: SymMatrix<F>,
}

impl<F: Scalar> Tangent<F> {
    pub fn new(coeff: SymMatrix<F>) -> Self {
        Self { coeff }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            coeff: SymMatrix::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.coeff.dim()
    }

    pub fn coeff(&self) -> &SymMatrix<F> {
        &self.coeff
    }

    pub fn scale(&self, c: F) -> Self {
        Self {
            coeff: self.coeff.scale(c),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            coeff: self.coeff.add(&other.coeff)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            coeff: self.coeff.sub(&other.coeff)?,
        })
    }
}

/// Affine map `x ↦ linear · x + shift`. Produced by [`optimal_map`], where
/// the linear part is the SPD transport matrix `W` and the map sends
/// `x ↦ W (x − m) + n`.
#[derive(Debug, Clone)]
pub struct AffineMap<F> {
    pub linear: SymMatrix<F>,
    pub shift: Vec<F>,
}

impl<F: Scalar> AffineMap<F> {
    pub fn apply(&self, x: &[F]) -> Result<Vec<F>> {
        let lx = self.linear.apply(x)?;
        Ok(lx.iter().zip(&self.shift).map(|(&a, &b)| a + b).collect())
    }
}

fn check_same_dim<F: Scalar>(a: &Gaussian<F>, b: &Gaussian<F>) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// tr (U^{1/2} V U^{1/2})^{1/2}, the coupling term of the closed-form
/// distance. Uses the 2×2 trace shortcut when d = 2.
fn coupling_trace<F: Scalar>(v: &SpdMatrix<F>, u: &SpdMatrix<F>) -> Result<F> {
    let su = u.sqrt();
    let prod = su.sym().sandwich(v.sym())?;
    if v.dim() == 2 {
        trace_sqrt_2x2(&prod)
    } else {
        let eig = sym_eig(&prod)?;
        Ok(eig
            .lambda()
            .iter()
            .map(|&l| l.max(F::zero()).sqrt())
            .sum())
    }
}

/// Squared quadratic transport distance between two Gaussians:
/// `|m − n|² + tr V + tr U − 2 tr (U^{1/2} V U^{1/2})^{1/2}`.
pub fn w2_distance_sq<F: Scalar>(a: &Gaussian<F>, b: &Gaussian<F>) -> Result<F> {
    check_same_dim(a, b)?;
    let mean_sq: F = a
        .mean
        .iter()
        .zip(&b.mean)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum();
    let t = coupling_trace(a.cov(), b.cov())?;
    let d2 = mean_sq + a.cov.trace() + b.cov.trace() - F::c(2.0) * t;
    Ok(d2.max(F::zero()))
}

/// Quadratic transport distance `W₂(a, b)`.
pub fn w2_distance<F: Scalar>(a: &Gaussian<F>, b: &Gaussian<F>) -> Result<F> {
    Ok(w2_distance_sq(a, b)?.sqrt())
}

/// The transport matrix `W = U^{1/2} (U^{1/2} V U^{1/2})^{−1/2} U^{1/2}`
/// pushing `N(V)` to `N(U)`.
pub(crate) fn transport_matrix<F: Scalar>(v: &SpdMatrix<F>, u: &SpdMatrix<F>) -> Result<SymMatrix<F>> {
    let su = u.sqrt();
    let mid = SpdMatrix::new(su.sym().sandwich(v.sym())?)?;
    let mid_inv_sqrt = mid.inv_sqrt();
    su.sym().sandwich(mid_inv_sqrt.sym())
}

/// Squared distance between mean-zero Gaussians computed through the
/// transport displacement, `tr (W − E) V (W − E)`.
///
/// Algebraically equal to the trace formula, but free of the large-trace
/// cancellation, so it stays accurate when the two covariances are close.
/// The curvature estimator depends on this.
pub fn w2_distance_sq_displacement<F: Scalar>(v: &SpdMatrix<F>, u: &SpdMatrix<F>) -> Result<F> {
    if v.dim() != u.dim() {
        return Err(Error::Dimension {
            expected: v.dim(),
            found: u.dim(),
        });
    }
    let w = transport_matrix(v, u)?;
    let s = w.sub(&SymMatrix::identity(v.dim()))?;
    SymMatrix::triple_trace(&s, v.sym(), &s)
}

/// The optimal transport map from `a` to `b`: the affine map
/// `x ↦ W (x − m) + n` with `W` the transport matrix.
pub fn optimal_map<F: Scalar>(a: &Gaussian<F>, b: &Gaussian<F>) -> Result<AffineMap<F>> {
    check_same_dim(a, b)?;
    let w = transport_matrix(a.cov(), b.cov())?;
    let wm = w.apply(&a.mean)?;
    let shift: Vec<F> = b.mean.iter().zip(&wm).map(|(&n, &p)| n - p).collect();
    Ok(AffineMap { linear: w, shift })
}

/// Constant-speed geodesic point `γ(t)` between `a` and `b`:
/// mean `(1−t)m + tn`, covariance `((1−t)E + tW) V ((1−t)E + tW)`.
///
/// Extrapolation outside `[0, 1]` is rejected; use [`exp_map`] for that.
pub fn geodesic<F: Scalar>(a: &Gaussian<F>, b: &Gaussian<F>, t: F) -> Result<Gaussian<F>> {
    check_same_dim(a, b)?;
    if t < F::zero() || t > F::one() {
        return Err(Error::Domain(format!(
            "geodesic parameter t = {} outside [0, 1]",
            t.as_f64()
        )));
    }
    let w = transport_matrix(a.cov(), b.cov())?;
    let one_minus = F::one() - t;
    let mix = SymMatrix::identity(a.dim())
        .scale(one_minus)
        .add(&w.scale(t))?;
    let cov = SpdMatrix::new(mix.sandwich(a.cov().sym())?)?;
    let mean: Vec<F> = a
        .mean
        .iter()
        .zip(&b.mean)
        .map(|(&m, &n)| one_minus * m + t * n)
        .collect();
    Gaussian::new(mean, cov)
}

/// Riemannian metric at `base`: `g(X, Y) = tr X V Y`.
pub fn metric<F: Scalar>(base: &Gaussian<F>, x: &Tangent<F>, y: &Tangent<F>) -> Result<F> {
    if x.dim() != base.dim() || y.dim() != base.dim() {
        return Err(Error::Dimension {
            expected: base.dim(),
            found: if x.dim() != base.dim() { x.dim() } else { y.dim() },
        });
    }
    SymMatrix::triple_trace(x.coeff(), base.cov().sym(), y.coeff())
}

/// Metric on bare covariance matrices; convenience for tangent work at `N(V)`.
pub fn metric_at<F: Scalar>(v: &SpdMatrix<F>, x: &Tangent<F>, y: &Tangent<F>) -> Result<F> {
    SymMatrix::triple_trace(x.coeff(), v.sym(), y.coeff())
}

/// Exponential map: `exp_base(t · S) = N(mean, (E + tS) V (E + tS))`.
///
/// Fails with a domain error when `E + tS` leaves the positive definite
/// cone (the boundary of the star-shaped domain of the exponential).
pub fn exp_map<F: Scalar>(base: &Gaussian<F>, s: &Tangent<F>, t: F) -> Result<Gaussian<F>> {
    if s.dim() != base.dim() {
        return Err(Error::Dimension {
            expected: base.dim(),
            found: s.dim(),
        });
    }
    let mix = SymMatrix::identity(base.dim()).add(&s.coeff().scale(t))?;
    let eig = sym_eig(&mix)?;
    let max_abs = eig
        .lambda()
        .iter()
        .fold(F::zero(), |acc, &l| acc.max(l.abs()));
    if eig.lambda()[base.dim() - 1] <= eps_pd(max_abs) {
        return Err(Error::Domain(
            "exp-map outside PD domain: E + tS is not positive definite".into(),
        ));
    }
    let cov = SpdMatrix::new(mix.sandwich(base.cov().sym())?)?;
    Gaussian::new(base.mean.clone(), cov)
}

/// Logarithm map: the displacement coefficient `S = W − E` with `W` the
/// transport matrix from `base` to `target`.
///
/// Requires equal means: mean variation is a Euclidean translation, handled
/// separately by [`translate`].
pub fn log_map<F: Scalar>(base: &Gaussian<F>, target: &Gaussian<F>) -> Result<Tangent<F>> {
    check_same_dim(base, target)?;
    if base.mean != target.mean {
        return Err(Error::UnequalMeans);
    }
    let w = transport_matrix(base.cov(), target.cov())?;
    Ok(Tangent::new(w.sub(&SymMatrix::identity(base.dim()))?))
}

/// Which member of the normalized tangent family a [`FrameVector`] is.
/// Indices are 0-based and ordered `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    /// `e₊ = P (E₁₁ + E_dd) Pᵀ / √(λ₁ + λ_d)`
    EPlus,
    /// `e_ij = P (E_ii − E_jj) Pᵀ / √(λ_i + λ_j)`
    EDiag(usize, usize),
    /// `f_ij = P (E_ij + E_ji) Pᵀ / √(λ_i + λ_j)`
    FOff(usize, usize),
}

impl FrameKind {
    /// 1-based display form matching the usual subscript notation.
    pub fn label(&self) -> String {
        match self {
            FrameKind::EPlus => "e+".into(),
            FrameKind::EDiag(i, j) => format!("e{}{}", i + 1, j + 1),
            FrameKind::FOff(i, j) => format!("f{}{}", i + 1, j + 1),
        }
    }
}

/// A unit-norm tangent vector of the family `{e₊, e_ij, f_ij}` at the base
/// `N(P diag(λ) Pᵀ)`, carrying its frame.
///
/// The family has `1 + d(d−1)` members; it is *not* an orthonormal basis of
/// the full tangent space (its size differs from `d(d+1)/2` for `d ≥ 3` and
/// e.g. `e₊` is not orthogonal to `e_1j`). It is exactly the family the
/// curvature case table is phrased in.
#[derive(Debug, Clone)]
pub struct FrameVector<F> {
    kind: FrameKind,
    frame: EigenPair<F>,
    tangent: Tangent<F>,
}

impl<F: Scalar> FrameVector<F> {
    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    pub fn frame_p(&self) -> &Matrix<F> {
        self.frame.p()
    }

    pub fn frame_lambda(&self) -> &[F] {
        self.frame.lambda()
    }

    pub fn as_tangent(&self) -> &Tangent<F> {
        &self.tangent
    }
}

fn frame_vector<F: Scalar>(eig: &EigenPair<F>, kind: FrameKind) -> Result<FrameVector<F>> {
    let d = eig.dim();
    let lam = eig.lambda();
    let (raw, norm) = match kind {
        FrameKind::EPlus => {
            let m = SymMatrix::from_fn(d, |i, j| {
                if i == j && (i == 0 || i == d - 1) {
                    F::one()
                } else {
                    F::zero()
                }
            });
            (m, lam[0] + lam[d - 1])
        }
        FrameKind::EDiag(i, j) => {
            let m = SymMatrix::from_fn(d, |a, b| {
                if a == b && a == i {
                    F::one()
                } else if a == b && a == j {
                    -F::one()
                } else {
                    F::zero()
                }
            });
            (m, lam[i] + lam[j])
        }
        FrameKind::FOff(i, j) => {
            let m = SymMatrix::from_fn(d, |a, b| {
                if (a, b) == (i, j) || (a, b) == (j, i) {
                    F::one()
                } else {
                    F::zero()
                }
            });
            (m, lam[i] + lam[j])
        }
    };
    let conj = eig.p().conjugate(&raw)?;
    let tangent = Tangent::new(conj.scale(F::one() / norm.sqrt()));
    Ok(FrameVector {
        kind,
        frame: eig.clone(),
        tangent,
    })
}

/// The full normalized family `{e₊} ∪ {e_ij} ∪ {f_ij}` (`i < j`) at the base
/// determined by `base_eig`. Order: `e₊`, then all `e_ij`, then all `f_ij`,
/// lexicographically.
pub fn frame<F: Scalar>(base_eig: &EigenPair<F>) -> Result<Vec<FrameVector<F>>> {
    let d = base_eig.dim();
    if d < 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: d,
        });
    }
    let mut out = Vec::with_capacity(1 + d * (d - 1));
    out.push(frame_vector(base_eig, FrameKind::EPlus)?);
    for i in 0..d {
        for j in (i + 1)..d {
            out.push(frame_vector(base_eig, FrameKind::EDiag(i, j))?);
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            out.push(frame_vector(base_eig, FrameKind::FOff(i, j))?);
        }
    }
    Ok(out)
}

/// A single named frame vector at the base determined by `base_eig`.
pub fn frame_vector_at<F: Scalar>(base_eig: &EigenPair<F>, kind: FrameKind) -> Result<FrameVector<F>> {
    let d = base_eig.dim();
    if d < 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: d,
        });
    }
    let check = |i: usize, j: usize| -> Result<()> {
        if i < j && j < d {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "frame indices ({}, {}) invalid for dimension {d}",
                i + 1,
                j + 1
            )))
        }
    };
    match kind {
        FrameKind::EPlus => {}
        FrameKind::EDiag(i, j) | FrameKind::FOff(i, j) => check(i, j)?,
    }
    frame_vector(base_eig, kind)
}

/// Coordinates of a Gaussian inside the flat family of covariances
/// diagonalized by `p`: the mean together with the standard deviations
/// `s_i = √λ_i` read off the diagonal of `Pᵀ V P`.
///
/// Within one family the transport distance is the Euclidean distance of
/// these coordinates.
pub fn flat_coordinates<F: Scalar>(p: &Matrix<F>, g: &Gaussian<F>) -> Result<(Vec<F>, Vec<F>)> {
    if p.dim() != g.dim() {
        return Err(Error::Dimension {
            expected: g.dim(),
            found: p.dim(),
        });
    }
    let tol = F::c(1e-10) * g.cov().sym().norm_inf().max(F::one());
    let ortho = p.orthogonality_residual();
    if ortho > F::c(1e-10) {
        return Err(Error::NotInFamily {
            residual: ortho.as_f64(),
        });
    }
    let diag = p.conjugate_transpose(g.cov().sym())?;
    let d = g.dim();
    let mut off = F::zero();
    for i in 0..d {
        for j in (i + 1)..d {
            off = off.max(diag.get(i, j).abs());
        }
    }
    if off > tol {
        return Err(Error::NotInFamily {
            residual: off.as_f64(),
        });
    }
    let s: Vec<F> = (0..d).map(|i| diag.get(i, i).max(F::zero()).sqrt()).collect();
    Ok((g.mean.to_vec(), s))
}

/// Shifts the mean by `v`; covariance unchanged. `W₂(g, translate(g, v)) = |v|`.
pub fn translate<F: Scalar>(g: &Gaussian<F>, v: &[F]) -> Result<Gaussian<F>> {
    if v.len() != g.dim() {
        return Err(Error::Dimension {
            expected: g.dim(),
            found: v.len(),
        });
    }
    let mean: Vec<F> = g.mean.iter().zip(v).map(|(&m, &x)| m + x).collect();
    Gaussian::new(mean, g.cov.clone())
}

/// `N(0, R(θ) diag(α², β²) R(θ)ᵀ)` — the 2-D Gaussian with principal
/// standard deviations `(α, β)` at axis angle `θ`.
pub fn ellipse_gaussian<F: Scalar>(alpha: F, beta: F, theta: F) -> Result<Gaussian<F>> {
    if alpha <= F::zero() || beta <= F::zero() {
        return Err(Error::Domain("ellipse axes must be positive".into()));
    }
    let r = Matrix::rotation_2d(theta);
    let diag = SymMatrix::diagonal(&[alpha * alpha, beta * beta]);
    let cov = SpdMatrix::new(r.conjugate(&diag)?)?;
    Ok(Gaussian::centered(cov))
}

/// Principal axis parameters `(α, β, θ)` of a 2-D covariance, with
/// `θ ∈ (−π/4, π/4]` from the rotation diagonalization.
pub fn ellipse_parameters<F: Scalar>(cov: &SpdMatrix<F>) -> Result<(F, F, F)> {
    let (theta, pair) = crate::linalg::rotation_diagonalize_2x2(cov.sym())?;
    let a = pair.lambda()[0].max(F::zero()).sqrt();
    let b = pair.lambda()[1].max(F::zero()).sqrt();
    Ok((a, b, theta))
}
