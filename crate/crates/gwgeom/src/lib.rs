//! Wasserstein geometry of Gaussian measures.
//!
//! A Gaussian measure `N(m, V)` is a point of a finite-dimensional manifold
//! carrying the quadratic optimal-transport distance. This crate implements
//! that geometry in closed form — distance, optimal affine maps, geodesics,
//! the Riemannian metric with its symmetric-matrix tangent identification,
//! exponential/logarithm maps, and sectional curvature — together with two
//! independent numerical cross-checks: a geodesic-circle curvature estimator
//! and an exact discrete optimal-transport solver.
//!
//! Tangent convention: a tangent vector at `N(V)` is a symmetric matrix `S`
//! acting as the displacement coefficient of the linear map `x ↦ S x`, so the
//! geodesic from `V` in direction `S` is `t ↦ (E + tS) V (E + tS)` and the
//! metric `g(X, Y) = tr X V Y` gives squared geodesic speed directly.
//!
//! All core types are generic over the scalar; `f64` aliases live at the
//! crate root (`SymMatrix64`, `Gaussian64`, ...).

pub mod curvature;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod oracle;

pub use error::{Error, Result};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Scalar type the library is generic over. Implemented for `f32` and `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` constant (tolerances, literals).
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("constant not representable in scalar type")
    }

    /// Conversion to `f64` for diagnostics.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

pub type Matrix64 = linalg::Matrix<f64>;
pub type SymMatrix64 = linalg::SymMatrix<f64>;
pub type SpdMatrix64 = linalg::SpdMatrix<f64>;
pub type EigenPair64 = linalg::EigenPair<f64>;
pub type Gaussian64 = geometry::Gaussian<f64>;
pub type Tangent64 = geometry::Tangent<f64>;
pub type AffineMap64 = geometry::AffineMap<f64>;
pub type FrameVector64 = geometry::FrameVector<f64>;
pub type DiscreteMeasure64 = oracle::DiscreteMeasure<f64>;
pub type TransportPlan64 = oracle::TransportPlan<f64>;
