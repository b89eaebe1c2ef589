//! Singular values and unitarily invariant norms.

use crate::error::{Error, Result};
use crate::linalg::hermitian::CMatrix;
use crate::scalar::Scalar;

/// Singular values of a square matrix, sorted descending.
pub fn singular_values<T: Scalar>(m: &CMatrix<T>) -> Vec<T> {
    let mut s: Vec<T> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

pub fn op_norm<T: Scalar>(m: &CMatrix<T>) -> T {
    singular_values(m).first().copied().unwrap_or_else(T::zero)
}

/// Sum of the `j` largest singular values, `1 <= j <= n`.
pub fn ky_fan_norm<T: Scalar>(m: &CMatrix<T>, j: usize) -> Result<T> {
    let s = singular_values(m);
    if j == 0 || j > s.len() {
        return Err(Error::Shape(format!("Ky Fan index {j} outside 1..={}", s.len())));
    }
    Ok(s[..j].iter().fold(T::zero(), |a, &b| a + b))
}

/// All Ky Fan norms `j = 1..=n` at once.
pub fn ky_fan_norms<T: Scalar>(m: &CMatrix<T>) -> Vec<T> {
    singular_values(m)
        .into_iter()
        .scan(T::zero(), |acc, s| {
            *acc += s;
            Some(*acc)
        })
        .collect()
}

/// Schatten `p`-norm for `p >= 1`; `p = ∞` gives the operator norm.
pub fn schatten_norm<T: Scalar>(m: &CMatrix<T>, p: f64) -> Result<T> {
    if !(p >= 1.0) {
        return Err(Error::Range(format!("Schatten exponent {p} must be >= 1")));
    }
    if p.is_infinite() {
        return Ok(op_norm(m));
    }
    let s = singular_values(m);
    let top = s.first().copied().unwrap_or_else(T::zero);
    if top == T::zero() {
        return Ok(T::zero());
    }
    let pp = T::of(p);
    let sum = s.iter().fold(T::zero(), |a, &v| a + (v / top).powf(pp));
    Ok(top * sum.powf(T::one() / pp))
}

/// Unitarily invariant norm selector used by the checkers.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NormKind {
    KyFan { j: usize },
    Schatten { p: f64 },
    Operator,
}

impl NormKind {
    pub fn eval<T: Scalar>(&self, m: &CMatrix<T>) -> Result<T> {
        match *self {
            NormKind::KyFan { j } => ky_fan_norm(m, j),
            NormKind::Schatten { p } => schatten_norm(m, p),
            NormKind::Operator => Ok(op_norm(m)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            NormKind::KyFan { j } => format!("kyfan{j}"),
            NormKind::Schatten { p } if p.is_infinite() => "schatten-inf".into(),
            NormKind::Schatten { p } => format!("schatten{p}"),
            NormKind::Operator => "op".into(),
        }
    }
}
