//! Reproducible random test matrices.
//!
//! All generators take the caller's RNG; [`trial_rng`] derives an independent
//! stream per `(base_seed, trial)` so parallel runs match serial ones.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::hermitian::{cplx, CMatrix};
use crate::linalg::{HermitianMatrix, PdMatrix, PsdMatrix};
use crate::scalar::Scalar;

/// Eigenvalues are drawn log-uniformly from `[e^{-log_spread}, e^{log_spread}]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSpec {
    pub log_spread: f64,
}

impl Default for SpectrumSpec {
    fn default() -> Self {
        Self { log_spread: 1.0 }
    }
}

/// Mixes a base seed and trial index into a per-trial seed.
pub fn derive_seed(base_seed: u64, trial: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base_seed ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn trial_rng(base_seed: u64, trial: u64) -> ChaCha8Rng {
    seeded_rng(derive_seed(base_seed, trial))
}

fn gaussian<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::of(rng.sample::<f64, _>(StandardNormal))
}

/// Complex Gaussian matrix with independent standard normal parts.
pub fn complex_gaussian<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    DMatrix::from_fn(n, n, |_, _| Complex::new(gaussian::<T, R>(rng), gaussian::<T, R>(rng)))
}

/// Approximately Haar unitary from the QR factorization of a complex
/// Gaussian matrix, with the phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    let z = complex_gaussian::<T, R>(n, rng);
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for i in 0..n {
        let d = r[(i, i)];
        let modulus = (d.re * d.re + d.im * d.im).sqrt();
        if modulus > T::zero() {
            let phase = d / cplx(modulus);
            for row in 0..n {
                q[(row, i)] *= phase;
            }
        }
    }
    q
}

/// Hermitian `(Z + Z*) / 2 · scale` with `Z` complex Gaussian.
pub fn random_hermitian<T: Scalar, R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> HermitianMatrix<T> {
    let z = complex_gaussian::<T, R>(n, rng) * cplx(T::of(scale));
    HermitianMatrix::symmetrized(z)
}

fn with_spectrum<T: Scalar>(u: &CMatrix<T>, values: &[T]) -> HermitianMatrix<T> {
    let n = values.len();
    let mut scaled = u.clone();
    for j in 0..n {
        for i in 0..n {
            scaled[(i, j)] *= cplx(values[j]);
        }
    }
    HermitianMatrix::symmetrized(scaled * u.adjoint())
}

/// Random positive definite matrix `U diag(e^{u_i}) U*`, `u_i ~ U[-c, c]`.
pub fn random_pd<T: Scalar, R: Rng + ?Sized>(n: usize, spec: SpectrumSpec, rng: &mut R) -> PdMatrix<T> {
    let u = random_unitary::<T, R>(n, rng);
    let c = spec.log_spread.abs();
    let values: Vec<T> = (0..n)
        .map(|_| {
            let x = if c > 0.0 { rng.random_range(-c..=c) } else { 0.0 };
            T::of(x.exp())
        })
        .collect();
    PdMatrix::new(with_spectrum(&u, &values)).expect("log-uniform spectrum is positive")
}

/// Pair with `0 <= B <= A`: `B = A^{1/2} C A^{1/2}` for a random `0 <= C <= I`.
pub fn random_ordered_pair<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    spec: SpectrumSpec,
    rng: &mut R,
) -> (PdMatrix<T>, PsdMatrix<T>) {
    let a = random_pd::<T, R>(n, spec, rng);
    let v = random_unitary::<T, R>(n, rng);
    let values: Vec<T> = (0..n).map(|_| T::of(rng.random::<f64>())).collect();
    let c = with_spectrum(&v, &values);
    let root = a.sqrt().expect("sqrt of PD");
    let b = PsdMatrix::clamped(c.congruence(root.hermitian()).expect("same dimension"))
        .expect("eigensolver on bounded input");
    (a, b)
}
