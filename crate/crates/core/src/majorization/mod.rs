//! Spectra, compound matrices and (weak) log-majorization.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{singular_values, CMatrix, HermitianMatrix, PsdMatrix};
use crate::scalar::Scalar;

/// Largest compound dimension `C(n, j)` accepted.
pub const COMPOUND_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    Eigen,
    Singular,
}

/// Eigenvalues or singular values sorted descending.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T: Scalar> {
    values: Vec<T>,
    kind: SpectrumKind,
}

impl<T: Scalar> Spectrum<T> {
    pub fn eigen(m: &PsdMatrix<T>) -> Self {
        Self { values: m.eigenvalues().to_vec(), kind: SpectrumKind::Eigen }
    }

    pub fn singular(m: &CMatrix<T>) -> Self {
        Self { values: singular_values(m), kind: SpectrumKind::Singular }
    }

    pub fn from_values(mut values: Vec<T>, kind: SpectrumKind) -> Result<Self> {
        if kind == SpectrumKind::Singular && values.iter().any(|&v| v < T::zero()) {
            return Err(Error::Domain("singular values must be nonnegative".into()));
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Ok(Self { values, kind })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `Π_{i<=k} v_i` for `k = 1..=n`.
    pub fn partial_products(&self) -> Vec<T> {
        self.values
            .iter()
            .scan(T::one(), |acc, &v| {
                *acc *= v;
                Some(*acc)
            })
            .collect()
    }
}

/// Outcome of comparing leading products of two spectra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MajorizationVerdict {
    pub weak_holds: bool,
    pub strong_holds: bool,
    /// Leading products of the left and right spectra.
    pub partial_products: (Vec<f64>, Vec<f64>),
    /// `min_k (1 - P_A(k) / P_B(k))`; negative means a product of the left side is larger.
    pub worst_margin: f64,
    pub det_rel_err: f64,
}

/// Compares leading products: `P_A(k) <= (1 + k·tol) P_B(k)` for every `k`,
/// plus `|det A - det B| <= n·tol·max(det A, det B)` for the strong relation.
/// Products at or below `floor[k]` count as zero, and zero compares below anything.
pub fn majorize_products(pa: &[f64], pb: &[f64], tol: f64, floor: &[f64]) -> MajorizationVerdict {
    let n = pa.len().min(pb.len());
    let fl = |k: usize| floor.get(k).copied().unwrap_or(0.0);
    let mut weak = true;
    let mut worst = if n == 0 { 0.0 } else { f64::INFINITY };
    for k in 0..n {
        let (a, b, z) = (pa[k], pb[k], fl(k));
        let margin = if a <= z {
            1.0
        } else if b <= z {
            -1.0 - a
        } else {
            1.0 - a / b
        };
        worst = worst.min(margin);
        if !(a <= z || a <= (1.0 + tol * (k + 1) as f64) * b) {
            weak = false;
        }
    }
    let last = n.saturating_sub(1);
    let (da, db) = (pa.get(last).copied().unwrap_or(1.0), pb.get(last).copied().unwrap_or(1.0));
    let (za, zb) = (da <= fl(last), db <= fl(last));
    let det_rel_err = if za && zb { 0.0 } else { (da - db).abs() / da.abs().max(db.abs()) };
    let strong = weak && if za || zb { za && zb } else { det_rel_err <= tol * n as f64 };
    MajorizationVerdict {
        weak_holds: weak,
        strong_holds: strong,
        partial_products: (pa.to_vec(), pb.to_vec()),
        worst_margin: worst,
        det_rel_err,
    }
}

/// Zero threshold for the `k`-th leading product: one factor at the PSD
/// resolution `psd_eps · top`, the others at most `top`.
fn product_floors(top: f64, n: usize, psd_eps: f64) -> Vec<f64> {
    (1..=n).map(|k| psd_eps * top.powi(k as i32)).collect()
}

fn to_f64<T: Scalar>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.as_f64()).collect()
}

/// `A ≺_{w(log)} B` and `A ≺_{(log)} B` through sorted eigenvalue products.
pub fn log_majorize<T: Scalar>(a: &PsdMatrix<T>, b: &PsdMatrix<T>, tol: f64) -> Result<MajorizationVerdict> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!("dimensions {} and {} differ", a.dim(), b.dim())));
    }
    let pa = to_f64(&Spectrum::eigen(a).partial_products());
    let pb = to_f64(&Spectrum::eigen(b).partial_products());
    let top = a.op_norm().as_f64().max(b.op_norm().as_f64());
    Ok(majorize_products(&pa, &pb, tol, &product_floors(top, a.dim(), T::PSD_EPS)))
}

/// The same verdict, with each leading product computed as `λ_1(C_k(·))`.
pub fn log_majorize_compound<T: Scalar>(a: &PsdMatrix<T>, b: &PsdMatrix<T>, tol: f64) -> Result<MajorizationVerdict> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!("dimensions {} and {} differ", a.dim(), b.dim())));
    }
    let pa = to_f64(&compound_partial_products(a)?);
    let pb = to_f64(&compound_partial_products(b)?);
    let top = a.op_norm().as_f64().max(b.op_norm().as_f64());
    Ok(majorize_products(&pa, &pb, tol, &product_floors(top, a.dim(), T::PSD_EPS)))
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    usize::try_from(acc).unwrap_or(usize::MAX)
}

/// `j`-th compound: all `j × j` minors, rows and columns indexed by
/// lexicographically ordered index subsets.
pub fn compound<T: Scalar>(m: &CMatrix<T>, j: usize) -> Result<CMatrix<T>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Shape("compound of a non-square matrix".into()));
    }
    if j == 0 || j > n {
        return Err(Error::Shape(format!("compound index {j} outside 1..={n}")));
    }
    let size = binomial(n, j);
    if size > COMPOUND_LIMIT {
        return Err(Error::Size(format!("C({n}, {j}) = {size} exceeds {COMPOUND_LIMIT}")));
    }
    let subsets: Vec<Vec<usize>> = (0..n).combinations(j).collect();
    let mut out = CMatrix::<T>::zeros(size, size);
    for (r, rows) in subsets.iter().enumerate() {
        for (c, cols) in subsets.iter().enumerate() {
            let sub = CMatrix::<T>::from_fn(j, j, |a, b| m[(rows[a], cols[b])]);
            out[(r, c)] = sub.determinant();
        }
    }
    Ok(out)
}

/// `λ_1(C_k(A))` for `k = 1..=n`.
pub fn compound_partial_products<T: Scalar>(a: &PsdMatrix<T>) -> Result<Vec<T>> {
    (1..=a.dim())
        .map(|k| {
            let c = compound(a.matrix(), k)?;
            let e = HermitianMatrix::from_matrix(c)?.eig()?;
            Ok(e.max().max(T::zero()))
        })
        .collect()
}

/// Largest relative gap between the direct and compound routes to the
/// leading products of `a`.
pub fn route_disagreement<T: Scalar>(a: &PsdMatrix<T>) -> Result<f64> {
    let direct = to_f64(&Spectrum::eigen(a).partial_products());
    let via = to_f64(&compound_partial_products(a)?);
    let scale = direct.iter().map(|v| v.abs()).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    Ok(direct.iter().zip(&via).map(|(d, v)| (d - v).abs() / d.abs().max(1e-300).max(scale * 1e-14)).fold(0.0, f64::max))
}

/// Index-wise singular value dominance `s_j(A) <= (1 + tol) s_j(B)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DominanceVerdict {
    pub per_index: Vec<bool>,
    /// `min_j (s_j(B) - s_j(A)) / (1 + s_1(B))`.
    pub worst_margin: f64,
    /// Weak log-majorization of the singular values, implied when every index dominates.
    pub weak_log: bool,
}

impl DominanceVerdict {
    pub fn all(&self) -> bool {
        self.per_index.iter().all(|&b| b)
    }
}

pub fn singular_dominance<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>, tol: f64) -> Result<DominanceVerdict> {
    if a.shape() != b.shape() {
        return Err(Error::Shape("matrices differ in shape".into()));
    }
    let sa = Spectrum::singular(a);
    let sb = Spectrum::singular(b);
    let va = to_f64(sa.values());
    let vb = to_f64(sb.values());
    let s1 = vb.first().copied().unwrap_or(0.0);
    let per_index: Vec<bool> = va.iter().zip(&vb).map(|(x, y)| *x <= (1.0 + tol) * y).collect();
    let worst_margin = va.iter().zip(&vb).map(|(x, y)| (y - x) / (1.0 + s1)).fold(f64::INFINITY, f64::min);
    let n = va.len();
    let weak = majorize_products(
        &to_f64(&sa.partial_products()),
        &to_f64(&sb.partial_products()),
        tol,
        &product_floors(va.first().copied().unwrap_or(0.0).max(s1), n, T::PSD_EPS),
    )
    .weak_holds;
    Ok(DominanceVerdict { per_index, worst_margin: if n == 0 { 0.0 } else { worst_margin }, weak_log: weak })
}
