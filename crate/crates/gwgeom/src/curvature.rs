//! Sectional curvature: the closed-form case table, the 2-D cross-check
//! against Otto's formal formula, a numerical estimator based on geodesic
//! circle lengths, and the angle between rotated flat families.
//!
//! The closed forms cover every unordered pair drawn from the tangent family
//! `{e₊, e_ij, f_ij}` at a base `N(P diag(λ) Pᵀ)` (see
//! [`crate::geometry::frame`]). The estimator is fully independent of those
//! formulas: it measures the length of small geodesic circles and reads the
//! curvature off the defect `L(r) = 2πr (1 − K r²/6 + o(r²))`.

use crate::error::{Error, Result};
use crate::geometry::{
    ellipse_gaussian, w2_distance_sq_displacement, FrameKind, FrameVector, Gaussian, Tangent,
};
use crate::linalg::{sym_eig, EigenPair, Matrix, SpdMatrix, SymMatrix};
use crate::Scalar;

/// The ten curvature cases, keyed by the kinds and index overlap of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    /// (e₊, e_ij): flat.
    Case1,
    /// (e₊, f_1d): flat.
    Case2,
    /// (e₊, f_ij) with i = 1 or j = d.
    Case3,
    /// (e₊, f_kl) with 1 < k < l < d: flat.
    Case4,
    /// (e_ij, e_kl): flat.
    Case5,
    /// (e_ij, f_kl), disjoint index sets: flat.
    Case6,
    /// (e_ik, f_ij), exactly one shared index.
    Case7,
    /// (e_ij, f_ij), same index pair.
    Case8,
    /// (f_ij, f_kl), disjoint index sets: flat.
    Case9,
    /// (f_ij, f_ik), exactly one shared index.
    Case10,
}

impl CaseId {
    pub fn index(&self) -> u8 {
        match self {
            CaseId::Case1 => 1,
            CaseId::Case2 => 2,
            CaseId::Case3 => 3,
            CaseId::Case4 => 4,
            CaseId::Case5 => 5,
            CaseId::Case6 => 6,
            CaseId::Case7 => 7,
            CaseId::Case8 => 8,
            CaseId::Case9 => 9,
            CaseId::Case10 => 10,
        }
    }

    /// Whether the closed form for this case is identically zero.
    pub fn is_flat(&self) -> bool {
        matches!(
            self,
            CaseId::Case1
                | CaseId::Case2
                | CaseId::Case4
                | CaseId::Case5
                | CaseId::Case6
                | CaseId::Case9
        )
    }
}

fn overlap(a: (usize, usize), b: (usize, usize)) -> Vec<usize> {
    let mut common = Vec::new();
    for x in [a.0, a.1] {
        if x == b.0 || x == b.1 {
            common.push(x);
        }
    }
    common
}

/// Classifies an unordered pair of frame-vector kinds into its curvature
/// case. Total over all distinct supported pairs; `(e₊, e₊)` and identical
/// vectors are rejected.
pub fn classify_kinds(dim: usize, a: FrameKind, b: FrameKind) -> Result<CaseId> {
    use FrameKind::*;
    // Normalize order: EPlus first, then EDiag, then FOff.
    let rank = |k: &FrameKind| match k {
        EPlus => 0,
        EDiag(..) => 1,
        FOff(..) => 2,
    };
    let (a, b) = if rank(&a) <= rank(&b) { (a, b) } else { (b, a) };
    if a == b {
        return Err(Error::UnsupportedPair(format!(
            "identical vectors ({}, {})",
            a.label(),
            b.label()
        )));
    }
    match (a, b) {
        (EPlus, EPlus) => Err(Error::UnsupportedPair("(e+, e+)".into())),
        (EPlus, EDiag(..)) => Ok(CaseId::Case1),
        (EPlus, FOff(i, j)) => {
            if (i, j) == (0, dim - 1) {
                Ok(CaseId::Case2)
            } else if i == 0 || j == dim - 1 {
                Ok(CaseId::Case3)
            } else {
                Ok(CaseId::Case4)
            }
        }
        (EDiag(..), EDiag(..)) => Ok(CaseId::Case5),
        (EDiag(i, j), FOff(k, l)) => match overlap((i, j), (k, l)).len() {
            0 => Ok(CaseId::Case6),
            1 => Ok(CaseId::Case7),
            _ => Ok(CaseId::Case8),
        },
        (FOff(i, j), FOff(k, l)) => match overlap((i, j), (k, l)).len() {
            0 => Ok(CaseId::Case9),
            1 => Ok(CaseId::Case10),
            _ => unreachable!("full overlap means identical f-vectors"),
        },
        _ => unreachable!("pairs are rank-ordered"),
    }
}

/// A classified pair of frame vectors sharing a frame.
#[derive(Debug, Clone)]
pub struct CurvaturePair<F> {
    a: FrameVector<F>,
    b: FrameVector<F>,
    case_id: CaseId,
}

impl<F: Scalar> CurvaturePair<F> {
    pub fn new(a: FrameVector<F>, b: FrameVector<F>) -> Result<Self> {
        if a.frame_p() != b.frame_p() || a.frame_lambda() != b.frame_lambda() {
            return Err(Error::UnsupportedPair(
                "frame vectors belong to different frames".into(),
            ));
        }
        let case_id = classify_kinds(a.frame_lambda().len(), a.kind(), b.kind())?;
        Ok(Self { a, b, case_id })
    }

    pub fn case_id(&self) -> CaseId {
        self.case_id
    }

    pub fn a(&self) -> &FrameVector<F> {
        &self.a
    }

    pub fn b(&self) -> &FrameVector<F> {
        &self.b
    }
}

/// Classifies a pair of frame vectors (must share a frame).
pub fn classify_pair<F: Scalar>(a: &FrameVector<F>, b: &FrameVector<F>) -> Result<CaseId> {
    CurvaturePair::new(a.clone(), b.clone()).map(|p| p.case_id)
}

/// 12 λᵢ λⱼ / (λᵢ + λⱼ)³ — shared verbatim with [`otto_curvature_2d`] so the
/// two are arithmetically identical.
fn curvature_same_pair<F: Scalar>(li: F, lj: F) -> F {
    let s = li + lj;
    F::c(12.0) * li * lj / (s * s * s)
}

/// Closed-form sectional curvature for a pair of frame-vector kinds at the
/// eigenvalue list `lambda` (order as given; position 1 and d are the first
/// and last entries).
pub fn sectional_curvature_kinds<F: Scalar>(
    lambda: &[F],
    a: FrameKind,
    b: FrameKind,
) -> Result<F> {
    let d = lambda.len();
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
    let check_kind = |k: FrameKind| match k {
        FrameKind::EPlus => Ok(()),
        FrameKind::EDiag(i, j) | FrameKind::FOff(i, j) => check(i, j),
    };
    check_kind(a)?;
    check_kind(b)?;

    let case = classify_kinds(d, a, b)?;
    let three = F::c(3.0);
    let k = match case {
        CaseId::Case1
        | CaseId::Case2
        | CaseId::Case4
        | CaseId::Case5
        | CaseId::Case6
        | CaseId::Case9 => F::zero(),
        CaseId::Case3 => {
            let (i, j) = match (a, b) {
                (FrameKind::FOff(i, j), _) | (_, FrameKind::FOff(i, j)) => (i, j),
                _ => unreachable!(),
            };
            let (li, lj) = (lambda[i], lambda[j]);
            let s = li + lj;
            three * li * lj / (s * s * (lambda[0] + lambda[d - 1]))
        }
        CaseId::Case7 => {
            // e carries {s, t}, f carries {s, u}; shared index s.
            let (e, f) = match (a, b) {
                (FrameKind::EDiag(p, q), FrameKind::FOff(r, w))
                | (FrameKind::FOff(r, w), FrameKind::EDiag(p, q)) => ((p, q), (r, w)),
                _ => unreachable!(),
            };
            let shared = overlap(e, f)[0];
            let t = if e.0 == shared { e.1 } else { e.0 };
            let u = if f.0 == shared { f.1 } else { f.0 };
            let (ls, lt, lu) = (lambda[shared], lambda[t], lambda[u]);
            let su = ls + lu;
            three * ls * lu / (su * su * (ls + lt))
        }
        CaseId::Case8 => {
            let (i, j) = match a {
                FrameKind::FOff(i, j) | FrameKind::EDiag(i, j) => (i, j),
                _ => unreachable!(),
            };
            curvature_same_pair(lambda[i], lambda[j])
        }
        CaseId::Case10 => {
            let (f1, f2) = match (a, b) {
                (FrameKind::FOff(p, q), FrameKind::FOff(r, w)) => ((p, q), (r, w)),
                _ => unreachable!(),
            };
            let shared = overlap(f1, f2)[0];
            let j = if f1.0 == shared { f1.1 } else { f1.0 };
            let k = if f2.0 == shared { f2.1 } else { f2.0 };
            let (ls, lj, lk) = (lambda[shared], lambda[j], lambda[k]);
            three * lj * lk / ((ls + lj) * (lj + lk) * (lk + ls))
        }
    };
    Ok(k)
}

/// Closed-form sectional curvature of a classified pair. Always ≥ 0.
pub fn sectional_curvature<F: Scalar>(pair: &CurvaturePair<F>) -> Result<F> {
    sectional_curvature_kinds(pair.a.frame_lambda(), pair.a.kind(), pair.b.kind())
}

/// Sectional curvature of the 2-D plane `(e₁₂, f₁₂)` written in the principal
/// standard deviations: `K = 12 α² β² / (α² + β²)³`.
///
/// Shares its arithmetic with the same-index-pair case of
/// [`sectional_curvature`], so the two agree bit for bit at `λ = (α², β²)`.
pub fn otto_curvature_2d<F: Scalar>(alpha: F, beta: F) -> Result<F> {
    if alpha <= F::zero() || beta <= F::zero() {
        return Err(Error::Domain("axes must be positive".into()));
    }
    Ok(curvature_same_pair(alpha * alpha, beta * beta))
}

/// A geodesic circle of radius `r` in the plane spanned by the g-orthonormal
/// tangents `a`, `b` at the base `N(V)`, with `n_theta` quadrature nodes for
/// its length.
#[derive(Debug, Clone)]
pub struct CircleSpec<F> {
    base: SpdMatrix<F>,
    a: Tangent<F>,
    b: Tangent<F>,
    r: F,
    n_theta: usize,
}

const ORTHONORMALITY_TOL: f64 = 1e-10;
const MIN_THETA_NODES: usize = 256;

fn orthonormality_residual<F: Scalar>(
    base: &SpdMatrix<F>,
    a: &Tangent<F>,
    b: &Tangent<F>,
) -> Result<F> {
    let gaa = crate::geometry::metric_at(base, a, a)?;
    let gbb = crate::geometry::metric_at(base, b, b)?;
    let gab = crate::geometry::metric_at(base, a, b)?;
    Ok((gaa - F::one())
        .abs()
        .max((gbb - F::one()).abs())
        .max(gab.abs()))
}

impl<F: Scalar> CircleSpec<F> {
    pub fn new(
        base_eig: &EigenPair<F>,
        a: Tangent<F>,
        b: Tangent<F>,
        r: F,
        n_theta: usize,
    ) -> Result<Self> {
        let base = SpdMatrix::new(base_eig.reconstruct())?;
        if r < F::zero() {
            return Err(Error::Domain("circle radius must be nonnegative".into()));
        }
        if n_theta < MIN_THETA_NODES {
            return Err(Error::Domain(format!(
                "n_theta = {n_theta} below the minimum of {MIN_THETA_NODES}"
            )));
        }
        let resid = orthonormality_residual(&base, &a, &b)?;
        if resid > F::c(ORTHONORMALITY_TOL) {
            return Err(Error::NotOrthonormal {
                residual: resid.as_f64(),
            });
        }
        Ok(Self {
            base,
            a,
            b,
            r,
            n_theta,
        })
    }

    pub fn r(&self) -> F {
        self.r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }
}

/// Largest safe circle radius for the plane `(a, b)`: the positive
/// definiteness bound of `E + r(cosθ·A + sinθ·B)` minimized over a θ grid,
/// times a safety factor 1/2.
pub fn max_circle_radius<F: Scalar>(a: &Tangent<F>, b: &Tangent<F>) -> Result<F> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let nodes = 64;
    let two_pi = F::c(std::f64::consts::TAU);
    let mut most_negative = F::zero();
    for k in 0..nodes {
        let theta = two_pi * F::c(k as f64) / F::c(nodes as f64);
        let (s, c) = theta.sin_cos();
        let mix = a.coeff().scale(c).add(&b.coeff().scale(s))?;
        let eig = sym_eig(&mix)?;
        let min = eig.lambda()[mix.dim() - 1];
        most_negative = most_negative.min(min);
    }
    if most_negative >= F::zero() {
        return Ok(F::infinity());
    }
    Ok(F::c(0.5) / (-most_negative))
}

/// `E + r (cosθ A + sinθ B)`, checked positive definite.
fn mixing_matrix<F: Scalar>(spec: &CircleSpec<F>, theta: F) -> Result<SymMatrix<F>> {
    let (s, c) = theta.sin_cos();
    let dir = spec.a.coeff().scale(c).add(&spec.b.coeff().scale(s))?;
    let mix = SymMatrix::identity(spec.base.dim()).add(&dir.scale(spec.r))?;
    let eig = sym_eig(&mix)?;
    if eig.lambda()[mix.dim() - 1] <= F::zero() {
        return Err(Error::RadiusTooLarge {
            max_admissible: max_circle_radius(&spec.a, &spec.b)?.as_f64(),
        });
    }
    Ok(mix)
}

/// Covariance of the circle point at angle θ:
/// `X(θ) = [E + r(cosθ A + sinθ B)] V [E + r(cosθ A + sinθ B)]`.
pub fn circle_covariance<F: Scalar>(spec: &CircleSpec<F>, theta: F) -> Result<SpdMatrix<F>> {
    let mix = mixing_matrix(spec, theta)?;
    SpdMatrix::new(mix.sandwich(spec.base.sym())?)
}

/// Default finite-difference step for [`circle_speed`]: scales with the
/// radius so the relative truncation bias `(h/r)²/4` is constant along a
/// radius ladder, floored at 1e−4 radians.
pub fn default_fd_step<F: Scalar>(r: F) -> F {
    F::c(1e-4).max(F::c(0.02) * r)
}

/// Speed of the circle curve at θ₀: central second difference of the squared
/// distance, `√[(W₂²(X(θ₀), X(θ₀+h)) + W₂²(X(θ₀), X(θ₀−h))) / 2h²]`.
///
/// The squared distances are evaluated through the transport displacement
/// (not the trace formula), which keeps them accurate for the nearly equal
/// covariances this sees.
pub fn circle_speed<F: Scalar>(spec: &CircleSpec<F>, theta0: F, h: F) -> Result<F> {
    if h <= F::zero() {
        return Err(Error::Domain("finite-difference step must be positive".into()));
    }
    if spec.r == F::zero() {
        return Ok(F::zero());
    }
    let x0 = circle_covariance(spec, theta0)?;
    let xp = circle_covariance(spec, theta0 + h)?;
    let xm = circle_covariance(spec, theta0 - h)?;
    let dp = w2_distance_sq_displacement(&x0, &xp)?;
    let dm = w2_distance_sq_displacement(&x0, &xm)?;
    let speed_sq = (dp + dm) / (F::c(2.0) * h * h);
    Ok(speed_sq.max(F::zero()).sqrt())
}

/// Length of the geodesic circle: trapezoid quadrature of [`circle_speed`]
/// over a uniform periodic θ grid.
pub fn circle_length<F: Scalar>(spec: &CircleSpec<F>) -> Result<F> {
    let n = spec.n_theta;
    let two_pi = F::c(std::f64::consts::TAU);
    let h = default_fd_step(spec.r);
    let mut acc = F::zero();
    for k in 0..n {
        let theta = two_pi * F::c(k as f64) / F::c(n as f64);
        acc += circle_speed(spec, theta, h)?;
    }
    Ok(acc * two_pi / F::c(n as f64))
}

/// Tuning knobs for [`estimate_curvature_with`].
#[derive(Debug, Clone)]
pub struct EstimatorParams<F> {
    /// Largest radius of the ladder `{r₀, r₀/2, r₀/4}`; `None` picks
    /// `0.08 ×` the admissible radius bound.
    pub r0: Option<F>,
    /// Quadrature nodes per circle.
    pub n_theta: usize,
    /// Finite-difference step; `None` scales with each radius.
    pub fd_step: Option<F>,
}

impl<F> Default for EstimatorParams<F> {
    fn default() -> Self {
        Self {
            r0: None,
            n_theta: MIN_THETA_NODES,
            fd_step: None,
        }
    }
}

/// Curvature read off one circle length: `K̂(r) = 6 (1 − L(r)/2πr) / r²`.
fn curvature_from_length<F: Scalar>(r: F, length: F) -> F {
    let two_pi = F::c(std::f64::consts::TAU);
    F::c(6.0) * (F::one() - length / (two_pi * r)) / (r * r)
}

/// Numerical sectional curvature of the plane spanned by the g-orthonormal
/// pair `(a, b)` at the base `N(P diag(λ) Pᵀ)`, with default parameters.
///
/// Independent of the closed-form case table: measures geodesic-circle
/// lengths at the radius ladder `{r₀, r₀/2, r₀/4}` and extrapolates the
/// `o(r²)` defect away (two Richardson levels in `r²`).
pub fn estimate_curvature<F: Scalar>(
    base_eig: &EigenPair<F>,
    a: &Tangent<F>,
    b: &Tangent<F>,
) -> Result<F> {
    estimate_curvature_with(base_eig, a, b, &EstimatorParams::default())
}

/// [`estimate_curvature`] with explicit parameters.
pub fn estimate_curvature_with<F: Scalar>(
    base_eig: &EigenPair<F>,
    a: &Tangent<F>,
    b: &Tangent<F>,
    params: &EstimatorParams<F>,
) -> Result<F> {
    let bound = max_circle_radius(a, b)?;
    let r0 = match params.r0 {
        Some(r) => {
            if r <= F::zero() || r > bound {
                return Err(Error::RadiusTooLarge {
                    max_admissible: bound.as_f64(),
                });
            }
            r
        }
        None => {
            if !bound.is_finite() {
                F::c(0.05)
            } else {
                F::c(0.08) * bound
            }
        }
    };

    let mut estimates = [F::zero(); 3];
    for (level, slot) in estimates.iter_mut().enumerate() {
        let r = r0 / F::c(f64::from(1u32 << level));
        let spec = CircleSpec::new(base_eig, a.clone(), b.clone(), r, params.n_theta)?;
        let length = match params.fd_step {
            Some(h) => {
                let n = spec.n_theta;
                let two_pi = F::c(std::f64::consts::TAU);
                let mut acc = F::zero();
                for k in 0..n {
                    let theta = two_pi * F::c(k as f64) / F::c(n as f64);
                    acc += circle_speed(&spec, theta, h)?;
                }
                acc * two_pi / F::c(n as f64)
            }
            None => circle_length(&spec)?,
        };
        *slot = curvature_from_length(r, length);
    }

    // Richardson extrapolation in r²: halving r divides the leading error
    // term by 4.
    let [k1, k2, k3] = estimates;
    let k12 = k2 + (k2 - k1) / F::c(3.0);
    let k23 = k3 + (k3 - k2) / F::c(3.0);
    Ok(k23 + (k23 - k12) / F::c(15.0))
}

/// Orthonormalizes a pair of tangents in the g-inner product at the base
/// `N(V)` (Gram–Schmidt). The output spans the same plane.
pub fn gram_schmidt_pair<F: Scalar>(
    base_eig: &EigenPair<F>,
    a: &Tangent<F>,
    b: &Tangent<F>,
) -> Result<(Tangent<F>, Tangent<F>)> {
    let base = SpdMatrix::new(base_eig.reconstruct())?;
    let gaa = crate::geometry::metric_at(&base, a, a)?;
    let gbb = crate::geometry::metric_at(&base, b, b)?;
    let gab = crate::geometry::metric_at(&base, a, b)?;
    if gaa <= F::zero() || gbb <= F::zero() {
        return Err(Error::DependentTangents);
    }
    let gram_det_normalized = (gaa * gbb - gab * gab) / (gaa * gbb);
    if gram_det_normalized <= F::c(1e-12) {
        return Err(Error::DependentTangents);
    }
    let u = a.scale(F::one() / gaa.sqrt());
    let proj = crate::geometry::metric_at(&base, &u, b)?;
    let w = b.sub(&u.scale(proj))?;
    let gww = crate::geometry::metric_at(&base, &w, &w)?;
    Ok((u, w.scale(F::one() / gww.sqrt())))
}

const QUARTER_PI: f64 = std::f64::consts::FRAC_PI_4;

fn check_family_angle<F: Scalar>(theta: F) -> Result<()> {
    if theta > -F::c(QUARTER_PI) && theta <= F::c(QUARTER_PI) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "family angle {} outside (-π/4, π/4]",
            theta.as_f64()
        )))
    }
}

/// Angle between the flat 2-D families at axis angles θ and φ, measured
/// between their tangent planes at the common nearest isotropic point:
/// `2 |θ − φ|`.
pub fn angle_between_families<F: Scalar>(theta: F, phi: F) -> Result<F> {
    check_family_angle(theta)?;
    check_family_angle(phi)?;
    Ok(F::c(2.0) * (theta - phi).abs())
}

/// Numerical companion of [`angle_between_families`]: evaluates the metric
/// inner product of the two families' normal directions at the isotropic
/// point with standard deviation `(α + β)/2` and takes the arccosine.
/// Requires `α > β` so the normal directions are nonzero.
pub fn angle_between_families_numeric<F: Scalar>(
    alpha: F,
    beta: F,
    theta: F,
    phi: F,
) -> Result<F> {
    check_family_angle(theta)?;
    check_family_angle(phi)?;
    if !(alpha > beta && beta > F::zero()) {
        return Err(Error::Domain("requires α > β > 0".into()));
    }
    let sigma = (alpha + beta) * F::c(0.5);
    let rho = SpdMatrix::new(SymMatrix::identity(2).scale(sigma * sigma))?;
    let c = (alpha - beta) / (alpha + beta);
    let direction = |ang: F| -> Result<SymMatrix<F>> {
        let r = Matrix::rotation_2d(ang);
        r.conjugate(&SymMatrix::diagonal(&[c, -c]))
    };
    let xt = direction(theta)?;
    let xp = direction(phi)?;
    let num = SymMatrix::triple_trace(&xt, rho.sym(), &xp)?;
    let gtt = SymMatrix::triple_trace(&xt, rho.sym(), &xt)?;
    let gpp = SymMatrix::triple_trace(&xp, rho.sym(), &xp)?;
    // When the two norms are bit-identical, divide by the shared value so the
    // θ = φ case gives a ratio of exactly 1 (acos is ill-conditioned at 1).
    let ratio = if gtt == gpp {
        num / gtt
    } else {
        num / (gtt.sqrt() * gpp.sqrt())
    };
    Ok(ratio.max(-F::one()).min(F::one()).acos())
}

/// Nearest isotropic Gaussian to the 2-D Gaussian with principal standard
/// deviations `(α, β)` (any axis angle θ): `ρ = N(((α+β)/2)² I)` together
/// with the distance `(α − β)/√2`.
pub fn projection_to_umbilic<F: Scalar>(
    alpha: F,
    beta: F,
    theta: F,
) -> Result<(Gaussian<F>, F)> {
    if !(alpha >= beta && beta > F::zero()) {
        return Err(Error::Domain("requires α ≥ β > 0".into()));
    }
    let sigma = (alpha + beta) * F::c(0.5);
    let rho = ellipse_gaussian(sigma, sigma, theta)?;
    let dist = (alpha - beta) / F::c(2.0).sqrt();
    Ok((rho, dist))
}
