//! Input generators shared by the checkers.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::Result;
use crate::linalg::{
    random_pd, random_unitary, CMatrix, HermitianMatrix, MatrixJson, PdMatrix, PsdMatrix, SpectrumSpec,
};

pub type Rng64 = rand_chacha::ChaCha8Rng;

pub fn pd_pair(rng: &mut Rng64, n: usize) -> (PdMatrix<f64>, PdMatrix<f64>) {
    let a = random_pd(n, SpectrumSpec::default(), rng);
    let b = random_pd(n, SpectrumSpec::default(), rng);
    (a, b)
}

/// `U diag(values) U*`.
pub fn with_basis(u: &CMatrix<f64>, values: &[f64]) -> Result<HermitianMatrix<f64>> {
    HermitianMatrix::from_diagonal(values)?.adjoint_congruence(&u.adjoint())
}

pub fn log_uniform(rng: &mut Rng64, n: usize, spread: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-spread..=spread).exp()).collect()
}

/// Jointly diagonalizable pair: returns the joint eigenvalues and the matrices.
pub struct CommutingPair {
    pub a_diag: Vec<f64>,
    pub b_diag: Vec<f64>,
    pub u: CMatrix<f64>,
    pub a: PdMatrix<f64>,
    pub b: PdMatrix<f64>,
}

pub fn commuting_pair(rng: &mut Rng64, n: usize) -> Result<CommutingPair> {
    let u = random_unitary(n, rng);
    let a_diag = log_uniform(rng, n, 1.0);
    let b_diag = log_uniform(rng, n, 1.0);
    let a = PdMatrix::new(with_basis(&u, &a_diag)?)?;
    let b = PdMatrix::new(with_basis(&u, &b_diag)?)?;
    Ok(CommutingPair { a_diag, b_diag, u, a, b })
}

/// PSD matrix of random rank in `1..=n` (full rank half the time).
pub fn psd_maybe_singular(rng: &mut Rng64, n: usize) -> Result<PsdMatrix<f64>> {
    let u = random_unitary(n, rng);
    let mut values = log_uniform(rng, n, 1.0);
    if n > 1 && rng.random_bool(0.5) {
        let zeros = rng.random_range(1..n);
        for v in values.iter_mut().take(zeros) {
            *v = 0.0;
        }
    }
    PsdMatrix::new(with_basis(&u, &values)?)
}

pub fn inputs(named: &[(&str, &CMatrix<f64>)]) -> BTreeMap<String, MatrixJson> {
    named.iter().map(|(k, m)| (k.to_string(), MatrixJson::from_matrix(m))).collect()
}

pub fn params(named: &[(&str, f64)]) -> BTreeMap<String, f64> {
    named.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// `‖X - Y‖ / ‖Y‖`, with the denominator floored at the smallest normal.
pub fn rel_dist(x: &HermitianMatrix<f64>, y: &HermitianMatrix<f64>) -> Result<f64> {
    Ok(x.distance(y)? / y.op_norm()?.max(f64::MIN_POSITIVE))
}
