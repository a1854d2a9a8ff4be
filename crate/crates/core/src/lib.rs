//! Numerical laboratory for isoparametric hypersurfaces with four principal
//! curvatures in spheres.
//!
//! The crate builds symmetric Clifford systems, the quartic Cartan–Münzner
//! polynomials attached to them (and to the adjoint orbits of `so(5, R)` and
//! `so(5, C)`), extracts frames and fundamental forms of the focal
//! submanifolds by exact polarization, and evaluates the curvature
//! quantities that decide whether a focal submanifold is Einstein or
//! Willmore.
//!
//! All numerical code is generic over [`Real`]; the `*64` aliases at the
//! crate root fix the scalar to `f64`, which is what the tolerances in the
//! test suites are calibrated for. Clifford systems are assembled exactly in
//! `i32` and cast afterwards.

pub mod clifford;
pub mod curvature;
pub mod error;
pub mod fkm;
pub mod homogeneous;
pub mod linalg;
pub mod quartic;
pub mod random;

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

pub use error::{Error, Result};

/// Real scalar used throughout the numerical modules.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type QuarticForm64 = quartic::QuarticForm<f64>;
pub type FocalFrame64 = quartic::FocalFrame<f64>;
pub type CliffordSystem64 = clifford::CliffordSystem<f64>;
/// Clifford system with exact integer entries, as produced by the builder.
pub type ExactCliffordSystem = clifford::CliffordSystem<i32>;
pub type FkmContext64 = fkm::FkmContext<f64>;
pub type ShapeOperatorSet64 = curvature::ShapeOperatorSet<f64>;
pub type CurvatureReport64 = curvature::CurvatureReport<f64>;
