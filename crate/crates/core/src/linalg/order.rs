//! Löwner order predicates.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::HermitianMatrix;
use crate::scalar::Scalar;

/// Outcome of an `A <= B` test: `margin` is `λ_min(B - A)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoewnerVerdict {
    pub holds: bool,
    pub margin: f64,
    /// `‖B - A‖` used to scale the tolerance.
    pub scale: f64,
}

/// Tests `A <= B`, accepting `λ_min(B - A) >= -tol (1 + ‖B - A‖)`.
pub fn loewner_leq<T: Scalar>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>, tol: f64) -> Result<LoewnerVerdict> {
    let diff = b.sub(a)?;
    let e = diff.eig()?;
    let margin = e.min().as_f64();
    let scale = e.max().abs().max(e.min().abs()).as_f64();
    Ok(LoewnerVerdict { holds: margin >= -tol * (1.0 + scale), margin, scale })
}

/// Relation of two Hermitian matrices in the Löwner order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoewnerRelation {
    Equal,
    Less,
    Greater,
    Incomparable,
}

/// Classifies `a` against `b`, returning the relation and both signed margins
/// `(λ_min(b - a), λ_min(a - b))`.
pub fn loewner_compare<T: Scalar>(
    a: &HermitianMatrix<T>,
    b: &HermitianMatrix<T>,
    tol: f64,
) -> Result<(LoewnerRelation, f64, f64)> {
    let diff = b.sub(a)?;
    let e = diff.eig()?;
    let up = e.min().as_f64();
    let down = -e.max().as_f64();
    let scale = 1.0 + e.max().abs().max(e.min().abs()).as_f64();
    let leq = up >= -tol * scale;
    let geq = down >= -tol * scale;
    let rel = match (leq, geq) {
        (true, true) => LoewnerRelation::Equal,
        (true, false) => LoewnerRelation::Less,
        (false, true) => LoewnerRelation::Greater,
        (false, false) => LoewnerRelation::Incomparable,
    };
    Ok((rel, up, down))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_below_twice_identity() {
        let i = HermitianMatrix::<f64>::identity(3);
        let v = loewner_leq(&i, &i.scale(2.0), 1e-12).unwrap();
        assert!(v.holds);
        assert!((v.margin - 1.0).abs() < 1e-14);
    }

    #[test]
    fn incomparable_diagonals() {
        let a = HermitianMatrix::from_diagonal(&[1.0, 3.0]).unwrap();
        let b = HermitianMatrix::from_diagonal(&[2.0, 2.0]).unwrap();
        let v = loewner_leq(&a, &b, 1e-12).unwrap();
        assert!(!v.holds);
        assert!((v.margin + 1.0).abs() < 1e-14);
        let (rel, _, _) = loewner_compare(&a, &b, 1e-12).unwrap();
        assert_eq!(rel, LoewnerRelation::Incomparable);
    }

    #[test]
    fn compare_directions() {
        let a = HermitianMatrix::from_diagonal(&[1.0, 1.0]).unwrap();
        let b = HermitianMatrix::from_diagonal(&[2.0, 1.5]).unwrap();
        assert_eq!(loewner_compare(&a, &b, 1e-12).unwrap().0, LoewnerRelation::Less);
        assert_eq!(loewner_compare(&b, &a, 1e-12).unwrap().0, LoewnerRelation::Greater);
        assert_eq!(loewner_compare(&a, &a, 1e-12).unwrap().0, LoewnerRelation::Equal);
    }
}
