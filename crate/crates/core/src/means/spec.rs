//! Parameterization of the supported binary means.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Catalog of normalized positive operator monotone functions on `[0, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScalarMonotoneFn {
    /// `x^t`, `t ∈ (0, 1)`.
    Power {
        t: f64,
    },
    /// `1 - t + t x`, `t ∈ (0, 1)`.
    Affine {
        t: f64,
    },
    Identity,
    One,
}

impl ScalarMonotoneFn {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ScalarMonotoneFn::Power { t } | ScalarMonotoneFn::Affine { t } => {
                if !(t > 0.0 && t < 1.0) {
                    return Err(Error::Catalog(format!("parameter t = {t} must lie in (0, 1)")));
                }
                Ok(())
            }
            ScalarMonotoneFn::Identity | ScalarMonotoneFn::One => Ok(()),
        }
    }

    /// Evaluates `f(x)`; negative arguments are a domain error.
    pub fn eval<T: Scalar>(&self, x: T) -> Result<T> {
        if x < T::zero() || !x.is_finite() {
            return Err(Error::Domain(format!("{} evaluated at {x}", self.label())));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked<T: Scalar>(&self, x: T) -> T {
        match *self {
            ScalarMonotoneFn::Power { t } => {
                if x == T::zero() {
                    T::zero()
                } else {
                    x.powf(T::of(t))
                }
            }
            ScalarMonotoneFn::Affine { t } => T::one() - T::of(t) + T::of(t) * x,
            ScalarMonotoneFn::Identity => x,
            ScalarMonotoneFn::One => T::one(),
        }
    }

    /// Identity and the constant one are the trivial members.
    pub fn is_trivial(&self) -> bool {
        matches!(self, ScalarMonotoneFn::Identity | ScalarMonotoneFn::One)
    }

    /// Sanity check that `f` is nondecreasing on a grid of `[0, upper]`.
    pub fn is_nondecreasing_on_grid(&self, upper: f64, points: usize) -> bool {
        let pts = points.max(2);
        let mut prev = self.eval_unchecked(0.0f64);
        (1..pts).all(|i| {
            let x = upper * i as f64 / (pts - 1) as f64;
            let v = self.eval_unchecked(x);
            let ok = v >= prev - 1e-15 * prev.abs().max(1.0);
            prev = v;
            ok
        })
    }

    /// Checks `self <= other` pointwise on a grid of `[0, upper]`.
    pub fn dominated_by_on_grid(&self, other: &ScalarMonotoneFn, upper: f64, points: usize) -> bool {
        let pts = points.max(2);
        (0..pts).all(|i| {
            let x = upper * i as f64 / (pts - 1) as f64;
            let a: f64 = self.eval_unchecked(x);
            let b: f64 = other.eval_unchecked(x);
            a <= b + 1e-12 * b.abs().max(1.0)
        })
    }

    pub fn label(&self) -> String {
        match self {
            ScalarMonotoneFn::Power { t } => format!("power({t})"),
            ScalarMonotoneFn::Affine { t } => format!("affine({t})"),
            ScalarMonotoneFn::Identity => "identity".into(),
            ScalarMonotoneFn::One => "one".into(),
        }
    }
}

/// A member of the supported family of binary means.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeanSpec {
    /// `A #_t B`.
    Geom { t: f64 },
    /// `A ♮_t B = F_{1/2, t}(A, B)`.
    Natural { t: f64 },
    /// `A ♮~_k B = F_{k, 1/2}(A, B)`.
    Tilde { k: f64 },
    /// `F_{k,t}` with `L = 1 + 2t - 4kt`.
    Fkt { k: f64, t: f64 },
    /// `F_{k,t,L}` with free `L > 0`.
    Fktl { k: f64, t: f64, l: f64 },
    /// `A ◊_t B`, the alternative mean of `x ↦ 1 - t + t x`.
    Wasserstein { t: f64 },
    /// `f(A^{-1} # B) A f(A^{-1} # B)`.
    Alternative { f: ScalarMonotoneFn },
}

fn unit_open(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Spec(format!("{name} = {v} must lie in (0, 1)")))
    }
}

fn unit_closed(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Spec(format!("{name} = {v} must lie in [0, 1]")))
    }
}

impl MeanSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MeanSpec::Geom { t } | MeanSpec::Natural { t } => unit_closed("t", t),
            MeanSpec::Wasserstein { t } => unit_open("t", t),
            MeanSpec::Tilde { k } => unit_open("k", k),
            MeanSpec::Fkt { k, t } => {
                unit_open("k", k)?;
                unit_closed("t", t)
            }
            MeanSpec::Fktl { k, t, l } => {
                unit_open("k", k)?;
                unit_closed("t", t)?;
                if l > 0.0 && l.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Spec(format!("L = {l} must be positive")))
                }
            }
            MeanSpec::Alternative { f } => f.validate().map_err(|e| Error::Spec(e.to_string())),
        }
    }

    /// `(k, t, L)` for members of the `F_{k,t,L}` family.
    pub fn ktl(&self) -> Option<(f64, f64, f64)> {
        match *self {
            MeanSpec::Natural { t } => Some((0.5, t, 1.0)),
            MeanSpec::Tilde { k } => Some((k, 0.5, 2.0 * (1.0 - k))),
            MeanSpec::Fkt { k, t } => Some((k, t, natural_l(k, t))),
            MeanSpec::Fktl { k, t, l } => Some((k, t, l)),
            _ => None,
        }
    }

    /// `F(λA, λB) = λ F(A, B)` for every `λ > 0`.
    pub fn is_jointly_homogeneous(&self) -> bool {
        match *self {
            MeanSpec::Fktl { k, t, l } => (-2.0 * t + 4.0 * k * t + l - 1.0).abs() <= 1e-12,
            _ => true,
        }
    }

    /// Exponents `(a, b)` with `F(λA, μB) = λ^a μ^b F(A, B)`, when separately homogeneous.
    pub fn separate_homogeneity(&self) -> Option<(f64, f64)> {
        if let MeanSpec::Geom { t } = *self {
            return Some((1.0 - t, t));
        }
        let (k, t, l) = self.ktl()?;
        Some((l - 2.0 * t * (1.0 - k), 2.0 * k * t))
    }

    pub fn label(&self) -> String {
        match self {
            MeanSpec::Geom { t } => format!("geom(t={t})"),
            MeanSpec::Natural { t } => format!("natural(t={t})"),
            MeanSpec::Tilde { k } => format!("tilde(k={k})"),
            MeanSpec::Fkt { k, t } => format!("fkt(k={k},t={t})"),
            MeanSpec::Fktl { k, t, l } => format!("fktl(k={k},t={t},L={l})"),
            MeanSpec::Wasserstein { t } => format!("wasserstein(t={t})"),
            MeanSpec::Alternative { f } => format!("alternative({})", f.label()),
        }
    }
}

/// `L = 1 + 2t - 4kt`, the exponent making `F_{k,t,L}` jointly homogeneous.
pub fn natural_l(k: f64, t: f64) -> f64 {
    1.0 + 2.0 * t - 4.0 * k * t
}

/// Ando–Hiai threshold `2ktL / (1 - 2kt)`.
pub fn ah_threshold(k: f64, t: f64) -> f64 {
    2.0 * k * t * natural_l(k, t) / (1.0 - 2.0 * k * t)
}
