//! Real scalar types the matrix code is generic over.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// A real floating point type usable as the base field of the complex
/// matrices in this crate.
///
/// Tolerances in the public API are given as `f64` and converted with
/// [`Scalar::of`]; the per-type thresholds below scale with the precision.
pub trait Scalar: RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {
    /// Relative threshold (times the operator norm) an eigenvalue must exceed
    /// for a matrix to be accepted as positive definite.
    const PD_EPS: f64;
    /// Relative slack (times the operator norm) tolerated below zero for a
    /// matrix to be accepted as positive semidefinite.
    const PSD_EPS: f64;
    /// Largest condition number accepted at API entry points.
    const MAX_CONDITION: f64;

    /// Converts an `f64` constant into this type.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable in scalar type")
    }

    /// Converts to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }
}

impl Scalar for f64 {
    const PD_EPS: f64 = 1e-12;
    const PSD_EPS: f64 = 1e-10;
    const MAX_CONDITION: f64 = 1e12;
}

impl Scalar for f32 {
    const PD_EPS: f64 = 1e-6;
    const PSD_EPS: f64 = 1e-5;
    const MAX_CONDITION: f64 = 1e6;
}
