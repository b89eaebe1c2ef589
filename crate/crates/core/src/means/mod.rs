//! Binary matrix means: weighted geometric, the `F_{k,t,L}` spectral family,
//! and alternative means `f(A^{-1} # B) A f(A^{-1} # B)`.

mod spec;

pub use spec::{ah_threshold, natural_l, MeanSpec, ScalarMonotoneFn};

use nalgebra::Schur;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{cplx, loewner_leq, CMatrix, HermitianMatrix, PdMatrix, PsdMatrix};
use crate::scalar::Scalar;

/// `root · (inv_root · B · inv_root)^t · root`, i.e. `M #_t B` for `M = root²`.
fn geom_from_roots<T: Scalar>(
    root: &HermitianMatrix<T>,
    inv_root: &HermitianMatrix<T>,
    b: &PsdMatrix<T>,
    t: T,
) -> Result<PsdMatrix<T>> {
    let inner = b.congruence(inv_root)?;
    inner.power(t)?.congruence(root)
}

/// Weighted geometric mean `A #_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}`.
pub fn geom_mean<T: Scalar>(a: &PdMatrix<T>, b: &PsdMatrix<T>, t: T) -> Result<PsdMatrix<T>> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!("dimensions {} and {} differ", a.dim(), b.dim())));
    }
    a.ensure_conditioned()?;
    let half = T::of(0.5);
    let root = a.power(half)?;
    let inv_root = a.power(-half)?;
    geom_from_roots(root.hermitian(), inv_root.hermitian(), b, t)
}

/// `G = (A^{-1} #_k B)^t`.
pub fn g_factor<T: Scalar>(k: T, t: T, a: &PdMatrix<T>, b: &PsdMatrix<T>) -> Result<PsdMatrix<T>> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!("dimensions {} and {} differ", a.dim(), b.dim())));
    }
    let half = T::of(0.5);
    // A^{-1} has square root A^{-1/2} and inverse square root A^{1/2}.
    let root = a.power(-half)?;
    let inv_root = a.power(half)?;
    geom_from_roots(root.hermitian(), inv_root.hermitian(), b, k)?.power(t)
}

/// `F_{k,t,L}(A, B) = G A^L G` with `G = (A^{-1} #_k B)^t`.
pub fn fktl<T: Scalar>(k: T, t: T, l: T, a: &PdMatrix<T>, b: &PsdMatrix<T>) -> Result<PsdMatrix<T>> {
    a.ensure_conditioned()?;
    let g = g_factor(k, t, a, b)?;
    a.as_psd().power(l)?.congruence(g.hermitian())
}

/// `F_{k,t}(A, B)`, the jointly homogeneous member `L = 1 + 2t - 4kt`.
pub fn fkt<T: Scalar>(k: T, t: T, a: &PdMatrix<T>, b: &PsdMatrix<T>) -> Result<PsdMatrix<T>> {
    let l = T::one() + T::of(2.0) * t - T::of(4.0) * k * t;
    fktl(k, t, l, a, b)
}

/// Alternative mean `f(A^{-1} # B) A f(A^{-1} # B)`.
pub fn alternative_mean<T: Scalar>(f: &ScalarMonotoneFn, a: &PdMatrix<T>, b: &PsdMatrix<T>) -> Result<PsdMatrix<T>> {
    f.validate()?;
    a.ensure_conditioned()?;
    let m = g_factor(T::of(0.5), T::one(), a, b)?;
    for &v in m.eigenvalues() {
        f.eval(v)?;
    }
    let fm = m.apply_fn(|v| f.eval_unchecked(v))?;
    a.as_psd().congruence(&fm)
}

/// Evaluates the mean selected by `spec`.
pub fn mean_apply<T: Scalar>(spec: &MeanSpec, a: &PdMatrix<T>, b: &PsdMatrix<T>) -> Result<PsdMatrix<T>> {
    spec.validate()?;
    match *spec {
        MeanSpec::Geom { t } => geom_mean(a, b, T::of(t)),
        MeanSpec::Wasserstein { t } => alternative_mean(&ScalarMonotoneFn::Affine { t }, a, b),
        MeanSpec::Alternative { f } => alternative_mean(&f, a, b),
        _ => {
            let (k, t, l) = spec.ktl().expect("F-family member");
            fktl(T::of(k), T::of(t), T::of(l), a, b)
        }
    }
}

/// The same mean evaluated at `(A, B + εI)`, a cross-check for singular `B`.
pub fn mean_apply_perturbed<T: Scalar>(
    spec: &MeanSpec,
    a: &PdMatrix<T>,
    b: &PsdMatrix<T>,
    eps: T,
) -> Result<PsdMatrix<T>> {
    let shifted = b.hermitian().add(&HermitianMatrix::identity(b.dim()).scale(eps))?;
    mean_apply(spec, a, &PsdMatrix::new(shifted)?)
}

/// Scalar value of the mean at positive reals `a`, `b >= 0`.
pub fn scalar_mean(spec: &MeanSpec, a: f64, b: f64) -> Result<f64> {
    spec.validate()?;
    if !(a > 0.0) || !(b >= 0.0) {
        return Err(Error::Domain(format!("scalar mean needs a > 0, b >= 0; got {a}, {b}")));
    }
    let pow = |x: f64, e: f64| if x == 0.0 && e > 0.0 { 0.0 } else { x.powf(e) };
    match *spec {
        MeanSpec::Wasserstein { t } => {
            let f = ScalarMonotoneFn::Affine { t };
            Ok(a * f.eval((b / a).sqrt())?.powi(2))
        }
        MeanSpec::Alternative { f } => Ok(a * f.eval((b / a).sqrt())?.powi(2)),
        _ => {
            let (wa, wb) = spec.separate_homogeneity().expect("homogeneous member");
            Ok(pow(a, wa) * pow(b, wb))
        }
    }
}

/// Exact value for a commuting pair given by its joint eigenvalues.
pub fn commuting_mean(spec: &MeanSpec, a_diag: &[f64], b_diag: &[f64]) -> Result<PsdMatrix<f64>> {
    if a_diag.len() != b_diag.len() {
        return Err(Error::Shape("diagonals differ in length".into()));
    }
    let vals = a_diag.iter().zip(b_diag).map(|(&a, &b)| scalar_mean(spec, a, b)).collect::<Result<Vec<_>>>()?;
    PsdMatrix::from_diagonal(&vals)
}

/// `F_{1-k,t,L}(B, A) = G^{-1} B^L G^{-1}` with `L = 1 + 2t - 4kt` taken from `F_{k,t}(A, B)`.
pub fn dual_mean<T: Scalar>(k: T, t: T, a: &PdMatrix<T>, b: &PdMatrix<T>) -> Result<PsdMatrix<T>> {
    let l = T::one() + T::of(2.0) * t - T::of(4.0) * k * t;
    fktl(T::one() - k, t, l, b, a.as_psd())
}

/// `‖A^{-L} # F_{k,t}(A, B) - (A^{-1} #_k B)^t‖_op`.
pub fn riccati_residual<T: Scalar>(k: T, t: T, a: &PdMatrix<T>, b: &PdMatrix<T>) -> Result<T> {
    let l = T::one() + T::of(2.0) * t - T::of(4.0) * k * t;
    let f = fkt(k, t, a, b.as_psd())?;
    let g = g_factor(k, t, a, b.as_psd())?;
    let lhs = geom_mean(&a.power(-l)?, &f, T::of(0.5))?;
    lhs.hermitian().distance(g.hermitian())
}

/// Harmonic-type bounds on `F_{k,t}(A, B)`.
#[derive(Clone, Debug)]
pub struct HarmonicBounds<T: Scalar> {
    /// `2((1-k)A + kB^{-1})^{-t} - A^{-L}`.
    pub lower: HermitianMatrix<T>,
    /// `[2((1-k)A^{-1} + kB)^{-t} - A^L]^{-1}`, present when applicable.
    pub upper: Option<HermitianMatrix<T>>,
    pub applicable: bool,
    /// Smallest eigenvalue of `2((1-k)A^{-1} + kB)^{-t} - A^L`.
    pub applicability_margin: T,
}

pub fn harmonic_bounds<T: Scalar>(k: T, t: T, a: &PdMatrix<T>, b: &PdMatrix<T>) -> Result<HarmonicBounds<T>> {
    let one = T::one();
    let two = T::of(2.0);
    let l = one + two * t - T::of(4.0) * k * t;
    let a_inv = a.inverse()?;
    let b_inv = b.inverse()?;
    let arith = |x: &PdMatrix<T>, y: &PdMatrix<T>| -> Result<PdMatrix<T>> {
        PdMatrix::new(x.hermitian().scale(one - k).add(&y.hermitian().scale(k))?)
    };
    let lower = arith(a, &b_inv)?.power(-t)?.hermitian().scale(two).sub(a.power(-l)?.hermitian())?;
    let m = arith(&a_inv, b)?.power(-t)?.hermitian().scale(two).sub(a.power(l)?.hermitian())?;
    let e = m.eig()?;
    let norm = e.max().abs().max(e.min().abs());
    let applicable = e.min() > T::of(T::PD_EPS) * norm;
    let upper = if applicable { Some(e.compose(|v| one / v)) } else { None };
    Ok(HarmonicBounds { lower, upper, applicable, applicability_margin: e.min() })
}

impl<T: Scalar> HarmonicBounds<T> {
    /// Worst Löwner margin of `lower <= F <= upper`, or `None` when not applicable.
    pub fn sandwich_margin(&self, f: &HermitianMatrix<T>, tol: f64) -> Result<Option<(bool, f64)>> {
        let Some(upper) = &self.upper else { return Ok(None) };
        let lo = loewner_leq(&self.lower, f, tol)?;
        let hi = loewner_leq(f, upper, tol)?;
        let scale = (1.0 + lo.scale).max(1.0 + hi.scale);
        Ok(Some((lo.holds && hi.holds, lo.margin.min(hi.margin) / scale)))
    }
}

/// The unitary of the positive similarity between `A^L # B^L` and
/// `F~^{1/2} U F_{k,t}(A, B)^{1/2}`, where `F~ = F_{1-k,t,L}(B, A)` carries the
/// exponent `L = 1 + 2t - 4kt` of `F_{k,t}(A, B)`.
#[derive(Clone, Debug)]
pub struct SimilarityWitness<T: Scalar> {
    pub u: CMatrix<T>,
    pub spectra_match: bool,
    /// Largest relative eigenvalue discrepancy after sorting.
    pub spectral_rel_err: f64,
    pub unitarity_residual: f64,
}

/// Eigenvalues of a general square matrix via complex Schur form, sorted by real part descending.
pub fn general_eigenvalues<T: Scalar>(m: &CMatrix<T>) -> Result<Vec<Complex<T>>> {
    let n = m.nrows();
    let schur = Schur::try_new(m.clone(), T::default_epsilon(), 10_000).ok_or(Error::ConvergenceFailure { dim: n })?;
    let (_, tri) = schur.unpack();
    let mut ev: Vec<Complex<T>> = (0..n).map(|i| tri[(i, i)]).collect();
    ev.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap_or(std::cmp::Ordering::Equal));
    Ok(ev)
}

pub const SIMILARITY_TOL: f64 = 1e-8;

pub fn positive_similarity_witness<T: Scalar>(
    k: T,
    t: T,
    a: &PdMatrix<T>,
    b: &PdMatrix<T>,
) -> Result<SimilarityWitness<T>> {
    let one = T::one();
    let half = T::of(0.5);
    let l = one + T::of(2.0) * t - T::of(4.0) * k * t;
    let f = fkt(k, t, a, b.as_psd())?.to_pd()?;
    let f_tilde = dual_mean(k, t, a, b)?.to_pd()?;
    let g = g_factor(k, t, a, b.as_psd())?.to_pd()?;
    let f_half = f.sqrt()?;
    let ft_half = f_tilde.sqrt()?;
    let v1 = f_half.matrix() * g.inverse()?.matrix() * a.power(-l * half)?.matrix();
    let v2 = ft_half.matrix() * g.matrix() * b.power(-l * half)?.matrix();
    let b_mh = b.power(-l * half)?;
    let core = a.power(l)?.congruence(&b_mh)?.sqrt()?;
    let u0 = core.matrix() * b.power(l * half)?.matrix() * a.power(-l * half)?.matrix();
    let u = &v2 * u0 * v1.adjoint();

    let z = ft_half.matrix() * &u * f_half.matrix();
    let z_ev = general_eigenvalues(&z)?;
    let target = geom_mean(&a.power(l)?, b.power(l)?.as_psd(), half)?;
    let rel = z_ev
        .iter()
        .zip(target.eigenvalues())
        .map(|(z, &lam)| {
            let d = *z - cplx(lam);
            (d.re * d.re + d.im * d.im).sqrt().as_f64() / lam.as_f64()
        })
        .fold(0.0f64, f64::max);
    let n = a.dim();
    let unitarity = crate::linalg::spectral_norm(&(u.adjoint() * &u - CMatrix::<T>::identity(n, n))).as_f64();
    Ok(SimilarityWitness {
        u,
        spectra_match: rel <= SIMILARITY_TOL,
        spectral_rel_err: rel,
        unitarity_residual: unitarity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_pd, seeded_rng, SpectrumSpec};
    use approx::assert_relative_eq;

    fn pd(rows: &[f64], n: usize) -> PdMatrix<f64> {
        PdMatrix::from_real_rows(n, rows).unwrap()
    }

    fn close(a: &HermitianMatrix<f64>, b: &HermitianMatrix<f64>) -> f64 {
        a.distance(b).unwrap() / (1.0 + b.op_norm().unwrap())
    }

    #[test]
    fn commuting_geometric_mean() {
        let a = PdMatrix::from_diagonal(&[4.0, 1.0]).unwrap();
        let b = PsdMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
        let m = geom_mean(&a, &b, 0.5).unwrap();
        let expect = HermitianMatrix::from_diagonal(&[2.0, 2.0]).unwrap();
        assert!(close(m.hermitian(), &expect) < 1e-14);
    }

    #[test]
    fn geom_endpoints_and_idempotence() {
        let mut rng = seeded_rng(3);
        let a = random_pd::<f64, _>(4, SpectrumSpec::default(), &mut rng);
        let b = random_pd::<f64, _>(4, SpectrumSpec::default(), &mut rng);
        assert!(close(geom_mean(&a, b.as_psd(), 0.0).unwrap().hermitian(), a.hermitian()) < 1e-13);
        assert!(close(geom_mean(&a, b.as_psd(), 1.0).unwrap().hermitian(), b.hermitian()) < 1e-12);
        assert!(close(geom_mean(&a, a.as_psd(), 0.37).unwrap().hermitian(), a.hermitian()) < 1e-12);
        let ab = geom_mean(&a, b.as_psd(), 0.3).unwrap();
        let ba = geom_mean(&b, a.as_psd(), 0.7).unwrap();
        assert!(close(ab.hermitian(), ba.hermitian()) < 1e-11);
    }

    #[test]
    fn family_geometric_mean_with_projection() {
        // A_{x,y} #_k diag(1,0) = (4xy/(x+y))^{1-k} diag(1,0).
        let (x, y, k): (f64, f64, f64) = (1.0, 4.0, 0.3);
        let a = pd(&[x + y, y - x, y - x, x + y], 2);
        let b = PsdMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let m = geom_mean(&a, &b, k).unwrap();
        let c = (4.0 * x * y / (x + y)).powf(1.0 - k);
        let expect = HermitianMatrix::from_diagonal(&[c, 0.0]).unwrap();
        assert!(close(m.hermitian(), &expect) < 1e-13);
    }

    #[test]
    fn fkt_projection_example() {
        // F_{k,t}(2I, diag(1,0)) = 2^{L + 2t(k-1)} diag(1,0), norm 2^{1-2kt}.
        for &(k, t) in &[(0.25, 0.25), (0.5, 0.5), (0.8, 0.3)] {
            let a = PdMatrix::from_diagonal(&[2.0, 2.0]).unwrap();
            let b = PsdMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
            let f = fkt(k, t, &a, &b).unwrap();
            let l: f64 = natural_l(k, t);
            let c = 2f64.powf(l + 2.0 * t * (k - 1.0));
            let expect = HermitianMatrix::from_diagonal(&[c, 0.0]).unwrap();
            assert!(close(f.hermitian(), &expect) < 1e-13);
            assert_relative_eq!(f.op_norm(), 2f64.powf(1.0 - 2.0 * k * t), max_relative = 1e-13);
        }
    }

    #[test]
    fn named_members_agree_with_family() {
        let mut rng = seeded_rng(11);
        let a = random_pd::<f64, _>(3, SpectrumSpec::default(), &mut rng);
        let b = random_pd::<f64, _>(3, SpectrumSpec::default(), &mut rng);
        let nat = mean_apply(&MeanSpec::Natural { t: 0.3 }, &a, b.as_psd()).unwrap();
        let f = mean_apply(&MeanSpec::Fkt { k: 0.5, t: 0.3 }, &a, b.as_psd()).unwrap();
        assert!(close(nat.hermitian(), f.hermitian()) < 1e-10);
        let alt = mean_apply(&MeanSpec::Alternative { f: ScalarMonotoneFn::Power { t: 0.3 } }, &a, b.as_psd()).unwrap();
        assert!(close(nat.hermitian(), alt.hermitian()) < 1e-10);
        let tl = mean_apply(&MeanSpec::Tilde { k: 0.7 }, &a, b.as_psd()).unwrap();
        let f = mean_apply(&MeanSpec::Fkt { k: 0.7, t: 0.5 }, &a, b.as_psd()).unwrap();
        assert!(close(tl.hermitian(), f.hermitian()) < 1e-10);
    }

    #[test]
    fn wasserstein_closed_form() {
        // (1-t)^2 A + t^2 B + t(1-t)[(AB)^{1/2} + (BA)^{1/2}],
        // (AB)^{1/2} = A^{1/2} (A^{1/2} B A^{1/2})^{1/2} A^{-1/2}.
        let mut rng = seeded_rng(5);
        let a = random_pd::<f64, _>(3, SpectrumSpec::default(), &mut rng);
        let b = random_pd::<f64, _>(3, SpectrumSpec::default(), &mut rng);
        let t = 0.35;
        let ah = a.sqrt().unwrap();
        let ahi = ah.inverse().unwrap();
        let inner = b.congruence(&ah).unwrap().sqrt().unwrap();
        let ab_root = ah.matrix() * inner.matrix() * ahi.matrix();
        let sum = &ab_root + ab_root.adjoint();
        let oracle = a.matrix() * cplx((1.0 - t) * (1.0 - t)) + b.matrix() * cplx(t * t) + sum * cplx(t * (1.0 - t));
        let w = mean_apply(&MeanSpec::Wasserstein { t }, &a, b.as_psd()).unwrap();
        let diff = crate::linalg::spectral_norm(&(w.matrix() - oracle));
        assert!(diff < 1e-11 * (1.0 + w.op_norm()));
    }

    #[test]
    fn scalar_and_commuting_oracles() {
        let spec = MeanSpec::Fkt { k: 0.3, t: 0.6 };
        let a = [4.0, 1.0, 2.5];
        let b = [9.0, 16.0, 0.5];
        let exact = commuting_mean(&spec, &a, &b).unwrap();
        let am = PdMatrix::from_diagonal(&a).unwrap();
        let bm = PsdMatrix::from_diagonal(&b).unwrap();
        let f = mean_apply(&spec, &am, &bm).unwrap();
        assert!(close(f.hermitian(), exact.hermitian()) < 1e-13);
        assert_relative_eq!(scalar_mean(&MeanSpec::Geom { t: 0.5 }, 4.0, 9.0).unwrap(), 6.0, epsilon = 1e-14);
    }

    #[test]
    fn perturbation_cross_check_singular_b() {
        let a = pd(&[5.0, 3.0, 3.0, 5.0], 2);
        let b = PsdMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let cases = [
            (MeanSpec::Fkt { k: 0.3, t: 0.4 }, 0.12),
            (MeanSpec::Tilde { k: 0.8 }, 0.4),
            (MeanSpec::Wasserstein { t: 0.5 }, 0.5),
        ];
        for (spec, order) in cases {
            let direct = mean_apply(&spec, &a, &b).unwrap();
            let pert = mean_apply_perturbed(&spec, &a, &b, 1e-8).unwrap();
            // Agreement is only to order ε^{kt}; the gap must shrink with ε.
            let coarse = mean_apply_perturbed(&spec, &a, &b, 1e-4).unwrap();
            let d_fine = close(direct.hermitian(), pert.hermitian());
            let d_coarse = close(direct.hermitian(), coarse.hermitian());
            assert!(d_fine < 5.0 * 1e-8f64.powf(order) && d_fine < d_coarse, "{spec:?} {d_fine} {d_coarse}");
        }
    }

    #[test]
    fn riccati_identity_pair() {
        let a = pd(&[3.0, 1.0, 1.0, 2.0], 2);
        assert!(riccati_residual(0.3, 0.7, &a, &a).unwrap() < 1e-12);
        let b = pd(&[1.0 + 1e-3, 0.0, 0.0, 1e-3], 2);
        let a14 = pd(&[5.0, 3.0, 3.0, 5.0], 2);
        assert!(riccati_residual(0.4, 0.6, &a14, &b).unwrap() < 1e-8);
    }

    #[test]
    fn harmonic_bounds_identity() {
        let i = PdMatrix::<f64>::identity(3);
        let h = harmonic_bounds(0.3, 0.4, &i, &i).unwrap();
        assert!(h.applicable);
        assert!(close(&h.lower, i.hermitian()) < 1e-14);
        assert!(close(h.upper.as_ref().unwrap(), i.hermitian()) < 1e-14);
    }

    #[test]
    fn similarity_commuting_and_equal() {
        let a = PdMatrix::from_diagonal(&[4.0, 1.0]).unwrap();
        let b = PdMatrix::from_diagonal(&[9.0, 16.0]).unwrap();
        let w = positive_similarity_witness(1.0 / 3.0, 1.0 / 3.0, &a, &b).unwrap();
        assert!(w.spectra_match, "{}", w.spectral_rel_err);
        assert!(w.unitarity_residual < 1e-10);
        let w = positive_similarity_witness(0.2, 0.9, &a, &a).unwrap();
        assert!(w.spectra_match && w.unitarity_residual < 1e-10);
    }

    #[test]
    fn schur_eigenvalues_of_nonnormal() {
        let m = CMatrix::<f64>::from_row_slice(2, 2, &[cplx(2.0), cplx(5.0), cplx(0.0), cplx(3.0)]);
        let ev = general_eigenvalues(&m).unwrap();
        assert_relative_eq!(ev[0].re, 3.0, epsilon = 1e-13);
        assert_relative_eq!(ev[1].re, 2.0, epsilon = 1e-13);
        assert!(ev[0].im.abs() < 1e-13);
    }

    #[test]
    fn f32_mean() {
        let a = PdMatrix::<f32>::from_diagonal(&[4.0, 1.0]).unwrap();
        let b = PsdMatrix::<f32>::from_diagonal(&[1.0, 4.0]).unwrap();
        let m = fkt(0.5f32, 0.5, &a, &b).unwrap();
        assert!((m.eigenvalues()[0] - 2.0).abs() < 1e-5);
    }
}
