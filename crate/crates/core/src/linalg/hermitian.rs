//! Hermitian, positive semidefinite and positive definite matrix types with
//! eigendecomposition-based functional calculus.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense complex matrix.
pub type CMatrix<T> = DMatrix<Complex<T>>;

const EIG_MAX_ITER: usize = 10_000;

#[inline]
pub(crate) fn cplx<T: Scalar>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Spectral norm of a general square matrix.
pub(crate) fn spectral_norm<T: Scalar>(m: &CMatrix<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    m.clone().singular_values().iter().copied().fold(T::zero(), |a, b| if b > a { b } else { a })
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T: Scalar> {
    m: CMatrix<T>,
}

impl<T: Scalar> HermitianMatrix<T> {
    /// Builds a Hermitian matrix from `m`, symmetrizing it as `(m + m*) / 2`.
    pub fn from_matrix(m: CMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Shape(format!("expected a square matrix, got {}x{}", m.nrows(), m.ncols())));
        }
        if m.nrows() == 0 {
            return Err(Error::Shape("matrix dimension must be at least 1".into()));
        }
        Ok(Self::symmetrized(m))
    }

    pub(crate) fn symmetrized(m: CMatrix<T>) -> Self {
        let half = cplx(T::of(0.5));
        let adj = m.adjoint();
        Self { m: (m + adj) * half }
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[T]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Shape("matrix dimension must be at least 1".into()));
        }
        let n = diag.len();
        Ok(Self {
            m: CMatrix::from_fn(n, n, |i, j| if i == j { cplx(diag[i]) } else { Complex::new(T::zero(), T::zero()) }),
        })
    }

    /// Real symmetric matrix from row-major entries.
    pub fn from_real_rows(n: usize, rows: &[T]) -> Result<Self> {
        if rows.len() != n * n {
            return Err(Error::Shape(format!("expected {} entries, got {}", n * n, rows.len())));
        }
        Self::from_matrix(CMatrix::from_fn(n, n, |i, j| cplx(rows[i * n + j])))
    }

    pub fn identity(n: usize) -> Self {
        Self { m: CMatrix::identity(n, n) }
    }

    pub fn zeros(n: usize) -> Self {
        Self { m: CMatrix::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.m
    }

    /// Largest deviation `|M - M*|` in operator norm.
    pub fn hermitian_residual(&self) -> T {
        spectral_norm(&(&self.m - self.m.adjoint()))
    }

    pub fn eig(&self) -> Result<EigenSystem<T>> {
        EigenSystem::of(self)
    }

    /// Operator norm, computed as the largest absolute eigenvalue.
    pub fn op_norm(&self) -> Result<T> {
        let e = self.eig()?;
        Ok(e.values.iter().fold(T::zero(), |a, &v| {
            let v = v.abs();
            if v > a {
                v
            } else {
                a
            }
        }))
    }

    pub fn trace(&self) -> T {
        self.m.trace().re
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self { m: &self.m + &other.m })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self { m: &self.m - &other.m })
    }

    pub fn scale(&self, s: T) -> Self {
        Self { m: &self.m * cplx(s) }
    }

    /// `X M X` for Hermitian `X`, which is again Hermitian.
    pub fn congruence(&self, x: &HermitianMatrix<T>) -> Result<Self> {
        self.check_dim(x)?;
        Ok(Self::symmetrized(&x.m * &self.m * &x.m))
    }

    /// `W* M W` for an arbitrary square `W`.
    pub fn adjoint_congruence(&self, w: &CMatrix<T>) -> Result<Self> {
        if w.nrows() != self.dim() || w.ncols() != self.dim() {
            return Err(Error::Shape("congruence factor has the wrong dimension".into()));
        }
        Ok(Self::symmetrized(w.adjoint() * &self.m * w))
    }

    /// Operator norm of the difference to `other`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.sub(other)?.op_norm()
    }

    pub(crate) fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!("dimensions {} and {} differ", self.dim(), other.dim())));
        }
        Ok(())
    }
}

/// Unitary eigenvectors (as columns) and real eigenvalues sorted descending.
#[derive(Clone, Debug)]
pub struct EigenSystem<T: Scalar> {
    pub vectors: CMatrix<T>,
    pub values: Vec<T>,
}

impl<T: Scalar> EigenSystem<T> {
    fn of(h: &HermitianMatrix<T>) -> Result<Self> {
        let n = h.dim();
        let se = SymmetricEigen::try_new(h.m.clone(), T::default_epsilon(), EIG_MAX_ITER)
            .ok_or(Error::ConvergenceFailure { dim: n })?;
        if se.eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::ConvergenceFailure { dim: n });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| se.eigenvalues[b].partial_cmp(&se.eigenvalues[a]).unwrap_or(std::cmp::Ordering::Equal));
        let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
        let sys = Self { vectors, values };
        debug_assert!(
            sys.unitarity_residual() <= T::of(1e-10).max(T::of(T::PD_EPS * 1e3)),
            "eigenvector matrix not unitary"
        );
        debug_assert!(
            sys.reconstruction_residual(h)
                <= T::of(1e-10).max(T::of(T::PD_EPS * 1e3)) * (T::one() + h.op_norm_from(&sys)),
            "eigendecomposition does not reconstruct its input"
        );
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max(&self) -> T {
        self.values[0]
    }

    pub fn min(&self) -> T {
        self.values[self.values.len() - 1]
    }

    /// `U diag(f(λ)) U*`.
    pub fn compose<F: Fn(T) -> T>(&self, f: F) -> HermitianMatrix<T> {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let fv = cplx(f(v));
            for i in 0..n {
                scaled[(i, j)] *= fv;
            }
        }
        HermitianMatrix::symmetrized(scaled * self.vectors.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianMatrix<T> {
        self.compose(|v| v)
    }

    pub fn unitarity_residual(&self) -> T {
        let n = self.dim();
        spectral_norm(&(self.vectors.adjoint() * &self.vectors - CMatrix::<T>::identity(n, n)))
    }

    pub fn reconstruction_residual(&self, h: &HermitianMatrix<T>) -> T {
        spectral_norm(&(self.reconstruct().m - &h.m))
    }
}

impl<T: Scalar> HermitianMatrix<T> {
    fn op_norm_from(&self, e: &EigenSystem<T>) -> T {
        e.max().abs().max(e.min().abs())
    }
}

/// Positive semidefinite matrix together with its (clamped) eigensystem.
#[derive(Clone, Debug)]
pub struct PsdMatrix<T: Scalar> {
    herm: HermitianMatrix<T>,
    eig: EigenSystem<T>,
}

impl<T: Scalar> PsdMatrix<T> {
    /// Accepts `h` when its smallest eigenvalue is at least `-PSD_EPS * ‖h‖`.
    /// Slightly negative eigenvalues are clamped to zero.
    pub fn new(h: HermitianMatrix<T>) -> Result<Self> {
        let eig = h.eig()?;
        let norm = eig.max().abs().max(eig.min().abs());
        if eig.min() < -T::of(T::PSD_EPS) * norm {
            return Err(Error::NotPositiveSemidefinite { min_eig: eig.min().as_f64() });
        }
        Ok(Self::from_parts(h, eig))
    }

    /// Eigenvalues below the eigensolver noise floor `4 n ε ‖M‖` are set to zero,
    /// so that fractional powers of a rank-deficient matrix stay rank-deficient.
    pub(crate) fn from_parts(herm: HermitianMatrix<T>, eig: EigenSystem<T>) -> Self {
        let norm = eig.max().abs().max(eig.min().abs());
        Self::from_parts_with_scale(herm, eig, norm)
    }

    /// As `from_parts`, with the noise floor taken relative to `scale`, the
    /// magnitude of the data the matrix was computed from.
    fn from_parts_with_scale(herm: HermitianMatrix<T>, mut eig: EigenSystem<T>, scale: T) -> Self {
        let n = T::of(eig.values.len() as f64);
        let floor = T::of(4.0) * n * T::default_epsilon() * scale;
        for v in eig.values.iter_mut() {
            if *v <= floor {
                *v = T::zero();
            }
        }
        Self { herm, eig }
    }

    /// Accepts any Hermitian input, clamping negative eigenvalues to zero.
    pub(crate) fn clamped(h: HermitianMatrix<T>) -> Result<Self> {
        let eig = h.eig()?;
        Ok(Self::from_parts(h, eig))
    }

    pub fn from_diagonal(diag: &[T]) -> Result<Self> {
        Self::new(HermitianMatrix::from_diagonal(diag)?)
    }

    pub fn hermitian(&self) -> &HermitianMatrix<T> {
        &self.herm
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        self.herm.matrix()
    }

    pub fn dim(&self) -> usize {
        self.herm.dim()
    }

    pub fn eigen(&self) -> &EigenSystem<T> {
        &self.eig
    }

    /// Eigenvalues sorted descending, clamped at zero.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eig.values
    }

    pub fn op_norm(&self) -> T {
        self.eig.max()
    }

    pub fn trace(&self) -> T {
        self.eig.values.iter().fold(T::zero(), |a, &b| a + b)
    }

    pub fn det(&self) -> T {
        self.eig.values.iter().fold(T::one(), |a, &b| a * b)
    }

    /// Functional calculus `U diag(f(λ)) U*`; fails when `f` leaves the reals.
    pub fn apply_fn<F: Fn(T) -> T>(&self, f: F) -> Result<HermitianMatrix<T>> {
        for &v in &self.eig.values {
            let fv = f(v);
            if !fv.is_finite() {
                return Err(Error::Domain(format!("function not finite at eigenvalue {v}")));
            }
        }
        Ok(self.eig.compose(f))
    }

    /// Fractional power with the convention `0^a = 0` for `a > 0` and
    /// `M^0 = I`. Negative powers require positive definiteness.
    pub fn power(&self, a: T) -> Result<PsdMatrix<T>> {
        if a == T::zero() {
            return Ok(Self::identity(self.dim()));
        }
        if a < T::zero() && self.eig.min() <= T::zero() {
            return Err(Error::Domain("negative power of a singular matrix".into()));
        }
        let values: Vec<T> =
            self.eig.values.iter().map(|&v| if v == T::zero() { T::zero() } else { v.powf(a) }).collect();
        self.with_values(values)
    }

    pub fn sqrt(&self) -> Result<PsdMatrix<T>> {
        self.power(T::of(0.5))
    }

    pub fn identity(n: usize) -> Self {
        let eig = EigenSystem { vectors: CMatrix::identity(n, n), values: vec![T::one(); n] };
        Self { herm: HermitianMatrix::identity(n), eig }
    }

    fn with_values(&self, values: Vec<T>) -> Result<PsdMatrix<T>> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("matrix function overflowed".into()));
        }
        let mut sorted: Vec<(usize, T)> = values.into_iter().enumerate().collect();
        sorted.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        let n = self.dim();
        let vectors = CMatrix::from_fn(n, n, |r, c| self.eig.vectors[(r, sorted[c].0)]);
        let eig = EigenSystem { vectors, values: sorted.into_iter().map(|(_, v)| v).collect() };
        let herm = eig.reconstruct();
        Ok(Self { herm, eig })
    }

    pub fn scale(&self, s: T) -> Result<PsdMatrix<T>> {
        if s < T::zero() {
            return Err(Error::Domain("negative scaling of a PSD matrix".into()));
        }
        let values = self.eig.values.iter().map(|&v| v * s).collect();
        self.with_values(values)
    }

    /// Promotes to a positive definite matrix if the PD threshold is met.
    pub fn to_pd(&self) -> Result<PdMatrix<T>> {
        PdMatrix::from_psd(self.clone())
    }

    /// `X M X` with `X` Hermitian, clamped back to PSD. Eigenvalues within
    /// rounding of `‖X‖² ‖M‖` are treated as zero.
    pub fn congruence(&self, x: &HermitianMatrix<T>) -> Result<PsdMatrix<T>> {
        let h = self.herm.congruence(x)?;
        let xn = x.op_norm()?;
        let eig = h.eig()?;
        let scale = xn * xn * self.op_norm();
        Ok(PsdMatrix::from_parts_with_scale(h, eig, scale))
    }
}

/// Positive definite matrix with certified smallest eigenvalue.
#[derive(Clone, Debug)]
pub struct PdMatrix<T: Scalar> {
    psd: PsdMatrix<T>,
}

impl<T: Scalar> PdMatrix<T> {
    /// Accepts `h` when its smallest eigenvalue exceeds `PD_EPS * ‖h‖`.
    pub fn new(h: HermitianMatrix<T>) -> Result<Self> {
        let eig = h.eig()?;
        Self::from_psd(PsdMatrix { herm: h, eig })
    }

    fn from_psd(psd: PsdMatrix<T>) -> Result<Self> {
        let threshold = T::of(T::PD_EPS) * psd.eig.max().abs();
        if !(psd.eig.min() > threshold) {
            return Err(Error::NotPositiveDefinite { min_eig: psd.eig.min().as_f64(), threshold: threshold.as_f64() });
        }
        Ok(Self { psd })
    }

    pub fn from_diagonal(diag: &[T]) -> Result<Self> {
        Self::new(HermitianMatrix::from_diagonal(diag)?)
    }

    pub fn from_real_rows(n: usize, rows: &[T]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_rows(n, rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self { psd: PsdMatrix::identity(n) }
    }

    pub fn as_psd(&self) -> &PsdMatrix<T> {
        &self.psd
    }

    pub fn into_psd(self) -> PsdMatrix<T> {
        self.psd
    }

    pub fn hermitian(&self) -> &HermitianMatrix<T> {
        &self.psd.herm
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        self.psd.matrix()
    }

    pub fn dim(&self) -> usize {
        self.psd.dim()
    }

    pub fn eigen(&self) -> &EigenSystem<T> {
        &self.psd.eig
    }

    pub fn eigenvalues(&self) -> &[T] {
        self.psd.eigenvalues()
    }

    pub fn min_eig(&self) -> T {
        self.psd.eig.min()
    }

    pub fn op_norm(&self) -> T {
        self.psd.op_norm()
    }

    pub fn det(&self) -> T {
        self.psd.det()
    }

    pub fn condition_number(&self) -> T {
        self.psd.eig.max() / self.psd.eig.min()
    }

    /// Rejects inputs whose condition number exceeds `MAX_CONDITION`.
    pub fn ensure_conditioned(&self) -> Result<()> {
        let cond = self.condition_number().as_f64();
        if !(cond <= T::MAX_CONDITION) {
            return Err(Error::Conditioning { cond, limit: T::MAX_CONDITION });
        }
        Ok(())
    }

    pub fn power(&self, a: T) -> Result<PdMatrix<T>> {
        let p = self.psd.power(a)?;
        PdMatrix::from_psd(p)
    }

    pub fn inverse(&self) -> Result<PdMatrix<T>> {
        self.power(-T::one())
    }

    pub fn sqrt(&self) -> Result<PdMatrix<T>> {
        self.power(T::of(0.5))
    }

    pub fn logm(&self) -> HermitianMatrix<T> {
        self.psd.eig.compose(|v| v.ln())
    }

    pub fn scale(&self, s: T) -> Result<PdMatrix<T>> {
        PdMatrix::from_psd(self.psd.scale(s)?)
    }

    pub fn apply_fn<F: Fn(T) -> T>(&self, f: F) -> Result<HermitianMatrix<T>> {
        self.psd.apply_fn(f)
    }

    /// `X M X` with `X` positive definite.
    pub fn congruence(&self, x: &PdMatrix<T>) -> Result<PdMatrix<T>> {
        PdMatrix::new(self.hermitian().congruence(x.hermitian())?)
    }
}

/// Matrix exponential of a Hermitian matrix.
pub fn expm<T: Scalar>(h: &HermitianMatrix<T>) -> Result<PdMatrix<T>> {
    let e = h.eig()?;
    let psd = PsdMatrix::from_parts(e.compose(|v| v.exp()), {
        let mut ex = e.clone();
        ex.values = e.values.iter().map(|v| v.exp()).collect();
        ex
    });
    if psd.eig.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("matrix exponential overflowed".into()));
    }
    PdMatrix::from_psd(psd)
}

/// Matrix logarithm of a positive definite matrix.
pub fn logm<T: Scalar>(m: &PdMatrix<T>) -> HermitianMatrix<T> {
    m.logm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn a14() -> HermitianMatrix<f64> {
        HermitianMatrix::from_real_rows(2, &[5.0, 3.0, 3.0, 5.0]).unwrap()
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let e = HermitianMatrix::<f64>::identity(3).eig().unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        let e = HermitianMatrix::from_diagonal(&[1.0, 4.0]).unwrap().eig().unwrap();
        assert_relative_eq!(e.values[0], 4.0, epsilon = 1e-14);
        assert_relative_eq!(e.values[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_of_family_point() {
        let e = a14().eig().unwrap();
        assert_relative_eq!(e.values[0], 8.0, epsilon = 1e-12);
        assert_relative_eq!(e.values[1], 2.0, epsilon = 1e-12);
        assert!(e.unitarity_residual() < 1e-12);
    }

    #[test]
    fn symmetrizes_on_construction() {
        let m = CMatrix::from_fn(2, 2, |i, j| Complex::new((i * 2 + j) as f64, (i as f64) - (j as f64)));
        let h = HermitianMatrix::from_matrix(m).unwrap();
        assert!(h.hermitian_residual() < 1e-15);
    }

    #[test]
    fn rejects_empty_and_rectangular() {
        assert!(HermitianMatrix::<f64>::from_matrix(CMatrix::zeros(0, 0)).is_err());
        assert!(HermitianMatrix::<f64>::from_matrix(CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn sqrt_of_diagonal() {
        let m = PsdMatrix::from_diagonal(&[4.0, 1.0]).unwrap();
        let s = m.apply_fn(|v: f64| v.sqrt()).unwrap();
        let expected = HermitianMatrix::from_diagonal(&[2.0, 1.0]).unwrap();
        assert!(s.distance(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn projection_powers_are_idempotent() {
        let p = HermitianMatrix::from_real_rows(2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let p = PsdMatrix::new(p).unwrap();
        for t in [0.1, 0.5, 1.7] {
            let pt = p.power(t).unwrap();
            assert!(pt.hermitian().distance(p.hermitian()).unwrap() < 1e-14);
        }
    }

    #[test]
    fn squaring_family_point() {
        // A_{1,4}^2 = A_{2,32}
        let sq = PsdMatrix::new(a14()).unwrap().apply_fn(|v| v * v).unwrap();
        let expected = HermitianMatrix::from_real_rows(2, &[34.0, 30.0, 30.0, 34.0]).unwrap();
        assert!(sq.distance(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn power_of_diagonal_and_expm_zero() {
        let m = PdMatrix::from_diagonal(&[9.0, 4.0]).unwrap();
        let r = m.power(0.5).unwrap();
        let expected = HermitianMatrix::from_diagonal(&[3.0, 2.0]).unwrap();
        assert!(r.hermitian().distance(&expected).unwrap() < 1e-14);
        let e = expm(&HermitianMatrix::<f64>::zeros(3)).unwrap();
        assert!(e.hermitian().distance(&HermitianMatrix::identity(3)).unwrap() < 1e-15);
    }

    #[test]
    fn log_of_singular_is_domain_error() {
        let p = PsdMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(p.apply_fn(|v: f64| v.ln()), Err(Error::Domain(_))));
        assert!(matches!(p.power(-0.5), Err(Error::Domain(_))));
        assert!(PdMatrix::new(p.hermitian().clone()).is_err());
    }

    #[test]
    fn zero_power_of_singular_is_identity() {
        let p = PsdMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let i = p.power(0.0).unwrap();
        assert!(i.hermitian().distance(&HermitianMatrix::identity(2)).unwrap() < 1e-15);
    }

    #[test]
    fn pd_threshold_is_relative() {
        assert!(PdMatrix::from_diagonal(&[1.0, 1e-13]).is_err());
        assert!(PdMatrix::from_diagonal(&[1.0, 1e-11]).is_ok());
        assert!(PsdMatrix::from_diagonal(&[1.0, -1e-3]).is_err());
    }

    #[test]
    fn conditioning_guard() {
        // The PD threshold and the conditioning limit coincide, so anything
        // past the limit is already refused at construction.
        let m = PdMatrix::from_diagonal(&[1.0, 2e-12]).unwrap();
        assert!(m.ensure_conditioned().is_ok());
        assert!(matches!(PdMatrix::from_diagonal(&[1.0, 5e-13]), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn works_in_single_precision() {
        let m = PdMatrix::<f32>::from_real_rows(2, &[5.0, 3.0, 3.0, 5.0]).unwrap();
        let r = m.sqrt().unwrap();
        let back = r.power(2.0).unwrap();
        assert!(back.hermitian().distance(m.hermitian()).unwrap() < 1e-4);
    }
}
