//! Matrix means on positive definite matrices and numerical checkers for
//! their order relations.

pub mod error;
pub mod linalg;
pub mod majorization;
pub mod means;
pub mod scalar;
pub mod search;
pub mod twobytwo;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type HermitianMatrix64 = linalg::HermitianMatrix<f64>;
pub type PsdMatrix64 = linalg::PsdMatrix<f64>;
pub type PdMatrix64 = linalg::PdMatrix<f64>;
pub type HermitianMatrix32 = linalg::HermitianMatrix<f32>;
pub type PsdMatrix32 = linalg::PsdMatrix<f32>;
pub type PdMatrix32 = linalg::PdMatrix<f32>;
