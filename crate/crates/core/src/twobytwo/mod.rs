//! Closed-form analysis of the family `A_{x,y} = [[x+y, y-x], [y-x, x+y]]`
//! paired with the projection `B = diag(1, 0)`.
//!
//! With `u = ln 2x`, `v = ln 2y`, `m = (u+v)/2` and `d = (v-u)/2`, every quantity
//! below is written through `ln cosh`, which keeps `y` down to `1e-6` and far
//! beyond in range.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{PdMatrix, PsdMatrix};
use crate::means::{natural_l, ScalarMonotoneFn};
use crate::scalar::Scalar;

/// `ln cosh z`, accurate for small and large `|z|`.
pub fn lncosh(z: f64) -> f64 {
    let a = z.abs();
    if a < 1.0 {
        let s = (0.5 * a).sinh();
        (2.0 * s * s).ln_1p()
    } else {
        a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyPoint {
    pub x: f64,
    pub y: f64,
}

impl FamilyPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(Error::Domain(format!("family point needs x, y > 0; got ({x}, {y})")));
        }
        Ok(Self { x, y })
    }

    /// `(m, d)` log coordinates.
    fn md(&self) -> (f64, f64) {
        let u = (2.0 * self.x).ln();
        let v = (2.0 * self.y).ln();
        (0.5 * (u + v), 0.5 * (v - u))
    }

    /// `A_{x,y}^q = A_{(2x)^q/2, (2y)^q/2}`.
    pub fn power(&self, q: f64) -> FamilyPoint {
        FamilyPoint { x: (2.0 * self.x).powf(q) / 2.0, y: (2.0 * self.y).powf(q) / 2.0 }
    }

    pub fn matrix<T: Scalar>(&self) -> Result<PdMatrix<T>> {
        let (x, y) = (T::of(self.x), T::of(self.y));
        PdMatrix::from_real_rows(2, &[x + y, y - x, y - x, x + y])
    }
}

/// The projection `diag(1, 0)`.
pub fn projection<T: Scalar>() -> PsdMatrix<T> {
    PsdMatrix::from_diagonal(&[T::one(), T::zero()]).expect("diagonal projection is PSD")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiParams {
    pub k: f64,
    pub t: f64,
    pub l: f64,
}

impl PhiParams {
    /// Jointly homogeneous choice `L = 1 + 2t - 4kt`.
    pub fn new(k: f64, t: f64) -> Self {
        Self { k, t, l: natural_l(k, t) }
    }

    pub fn with_l(k: f64, t: f64, l: f64) -> Self {
        Self { k, t, l }
    }

    /// `c = 2t(1-k)`, the exponent of `x + y` in the denominator of `φ`.
    fn c(&self) -> f64 {
        2.0 * self.t * (1.0 - self.k)
    }
}

/// `ln φ_{k,t,L}(x, y)` with `φ = ((2x)^L + (2y)^L) / (2 (x+y)^{2t(1-k)})`.
pub fn log_phi(p: &PhiParams, pt: &FamilyPoint) -> f64 {
    let (m, d) = pt.md();
    let c = p.c();
    p.l * m + lncosh(p.l * d) - c * (m + lncosh(d))
}

/// `φ_{k,t,L}(x, y) = ‖F_{k,t,L}(A_{x,y}, B)‖`.
pub fn phi_value(p: &PhiParams, pt: &FamilyPoint) -> f64 {
    log_phi(p, pt).exp()
}

/// `h_{x,y}(L) = ln(((2x)^L + (2y)^L) / (2 (x+y)^{L/2})) - (L/4) ln(4xy)`.
pub fn h_value(x: f64, y: f64, l: f64) -> Result<f64> {
    let (_, d) = FamilyPoint::new(x, y)?.md();
    Ok(lncosh(l * d) - 0.5 * l * lncosh(d))
}

/// `h'_{x,y}(0) = (1/4) ln(4xy / (x+y)^2)`.
pub fn h_derivative_at_zero(x: f64, y: f64) -> Result<f64> {
    let (_, d) = FamilyPoint::new(x, y)?.md();
    Ok(-0.5 * lncosh(d))
}

pub const LXY_MAX_ITER: usize = 200;
pub const LXY_TOL: f64 = 1e-12;

/// The unique root `L_{x,y} ∈ (0, 1)` of `h_{x,y}`; `h < 0` on `(0, L_{x,y})`.
pub fn find_lxy(x: f64, y: f64, tol: f64) -> Result<f64> {
    let (_, d) = FamilyPoint::new(x, y)?.md();
    if d == 0.0 {
        return Err(Error::Degenerate(format!("x = y = {x}: h vanishes identically")));
    }
    // h is convex with h(0) = 0, h'(0) < 0 and h(1) > 0, so the sign of h
    // on (0, 1) brackets the root.
    let h = |l: f64| lncosh(l * d) - 0.5 * l * lncosh(d);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..LXY_MAX_ITER {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `g(q) = q ln φ(x, y) - ln φ((2x)^q/2, (2y)^q/2)`; negative values are
/// violations of the Ando–Hiai norm inequality at exponent `q`.
pub fn g_value(p: &PhiParams, pt: &FamilyPoint, q: f64) -> f64 {
    // A^q scales (m, d) to (qm, qd), so the m-terms cancel.
    let (_, d) = pt.md();
    let c = p.c();
    q * (lncosh(p.l * d) - c * lncosh(d)) - (lncosh(q * p.l * d) - c * lncosh(q * d))
}

/// A concrete failure of the Ando–Hiai inequality for `~♮_k`, `k > 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TildeWitness {
    pub k: f64,
    pub point: FamilyPoint,
    pub l: f64,
    pub lxy: f64,
    pub q_star: f64,
    /// `-g(q*) > 0`.
    pub margin: f64,
}

pub fn tilde_params(k: f64) -> PhiParams {
    PhiParams::with_l(k, 0.5, 2.0 * (1.0 - k))
}

/// Largest `q` on the grid `1/2, 1/4, …` with `g(q) < 0` for `~♮_k` at `(x, y)`.
pub fn tilde_counterexample(k: f64, x: f64, y: f64) -> Result<TildeWitness> {
    let point = FamilyPoint::new(x, y)?;
    let l = 2.0 * (1.0 - k);
    if !(k > 0.0 && k < 1.0) || l >= 1.0 {
        return Err(Error::Range(format!("k = {k} gives L = {l}, outside (0, 1)")));
    }
    let lxy = find_lxy(x, y, LXY_TOL)?;
    if l >= lxy {
        return Err(Error::Range(format!("L = {l} is not below L_xy = {lxy}; increase k")));
    }
    let p = tilde_params(k);
    let mut q = 0.5;
    for _ in 0..60 {
        let g = g_value(&p, &point, q);
        if g < 0.0 {
            return Ok(TildeWitness { k, point, l, lxy, q_star: q, margin: -g });
        }
        q *= 0.5;
    }
    Err(Error::Range(format!("no negative g on the dyadic grid for k = {k}, ({x}, {y})")))
}

/// Default scan grid `1e-1 … 1e-6`, six points per decade.
pub fn default_y_grid() -> Vec<f64> {
    (0..=30).map(|i| 10f64.powf(-1.0 - i as f64 / 6.0)).collect()
}

/// A family point where a norm inequality fails.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanWitness {
    pub point: FamilyPoint,
    pub q: f64,
    /// Left-hand norm, e.g. `‖F(A^q, B^q)‖`.
    pub lhs: f64,
    /// Right-hand bound, e.g. `‖F(A, B)‖^q`.
    pub rhs: f64,
    /// `1 - lhs / rhs`, negative at a witness.
    pub margin: f64,
}

fn witness(point: FamilyPoint, q: f64, log_lhs: f64, log_rhs: f64) -> ScanWitness {
    ScanWitness { point, q, lhs: log_lhs.exp(), rhs: log_rhs.exp(), margin: -(log_lhs - log_rhs).exp_m1() }
}

/// Searches `x = 1`, `y ∈ y_grid` for a failure of `φ(A^q) <= φ(A)^q` for `F_{k,t}`.
/// Applies to `q > 1` when `t(1-k) < 1/2` and to `q < 1` when `t(1-k) > 1/2`.
pub fn necessity_scan(k: f64, t: f64, q: f64, y_grid: &[f64]) -> Result<Option<ScanWitness>> {
    let w = t * (1.0 - k);
    if q == 1.0 || (w - 0.5).abs() < 1e-15 {
        return Ok(None);
    }
    if (w < 0.5 && q < 1.0) || (w > 0.5 && q > 1.0) {
        return Ok(None);
    }
    let p = PhiParams::new(k, t);
    for &y in y_grid {
        let pt = FamilyPoint::new(1.0, y)?;
        let lhs = log_phi(&p, &pt.power(q));
        let rhs = q * log_phi(&p, &pt);
        if lhs > rhs {
            return Ok(Some(witness(pt, q, lhs, rhs)));
        }
    }
    Ok(None)
}

/// `α = rt / (s(1-t) + rt)`.
pub fn two_variable_weight(t: f64, r: f64, s: f64) -> f64 {
    r * t / (s * (1.0 - t) + r * t)
}

/// `ln ‖A_{x,y}^r ♮_α B^s‖ - (r(1-α) + sα) ln ‖A_{x,y} ♮_t B‖`; positive values violate
/// the two-variable inequality. `B^s = B` for the projection.
pub fn two_variable_log_gap(t: f64, r: f64, s: f64, pt: &FamilyPoint) -> f64 {
    let alpha = two_variable_weight(t, r, s);
    let lhs = log_phi(&PhiParams::new(0.5, alpha), &pt.power(r));
    let rhs = (r * (1.0 - alpha) + s * alpha) * log_phi(&PhiParams::new(0.5, t), pt);
    lhs - rhs
}

/// Scans `x = 1`, `y ∈ y_grid` for a failure of the two-variable inequality for `♮_t`.
pub fn two_variable_scan(t: f64, r: f64, s: f64, y_grid: &[f64]) -> Result<Option<ScanWitness>> {
    let alpha = two_variable_weight(t, r, s);
    let expo = r * (1.0 - alpha) + s * alpha;
    for &y in y_grid {
        let pt = FamilyPoint::new(1.0, y)?;
        let lhs = log_phi(&PhiParams::new(0.5, alpha), &pt.power(r));
        let rhs = expo * log_phi(&PhiParams::new(0.5, t), &pt);
        if lhs > rhs {
            return Ok(Some(witness(pt, r, lhs, rhs)));
        }
    }
    Ok(None)
}

/// `φ_f(x, y) = ‖diag(α, β) A_{x,y} diag(α, β)‖` with `α = f(1/√(x+y))`, `β = f(0)`.
pub fn alt_phi(f: &ScalarMonotoneFn, pt: &FamilyPoint) -> f64 {
    let s = pt.x + pt.y;
    let a: f64 = f.eval_unchecked(1.0 / s.sqrt());
    let b: f64 = f.eval_unchecked(0.0);
    let a11 = a * a * s;
    let a22 = b * b * s;
    let a12 = a * b * (pt.y - pt.x);
    let mean = 0.5 * (a11 + a22);
    let half = 0.5 * (a11 - a22);
    mean + half.hypot(a12)
}

/// Scans `x = 1`, `y ∈ y_grid` for `φ_f(A^q) > φ_f(A)^q`.
pub fn alt_necessity_scan(f: &ScalarMonotoneFn, q: f64, y_grid: &[f64]) -> Result<Option<ScanWitness>> {
    f.validate()?;
    if q == 1.0 {
        return Ok(None);
    }
    for &y in y_grid {
        let pt = FamilyPoint::new(1.0, y)?;
        let lhs = alt_phi(f, &pt.power(q)).ln();
        let rhs = q * alt_phi(f, &pt).ln();
        if lhs > rhs + 1e-14 * rhs.abs().max(1.0) {
            return Ok(Some(witness(pt, q, lhs, rhs)));
        }
    }
    Ok(None)
}
