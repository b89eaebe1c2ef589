//! Ando–Hiai type implications in homogeneity-normalized norm form, the
//! auxiliary inequalities behind them, and the 2×2 necessity scans.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{random_ordered_pair, MatrixJson, PdMatrix, PsdMatrix, SpectrumSpec};
use crate::means::{ah_threshold, fkt, mean_apply, natural_l, MeanSpec, ScalarMonotoneFn};
use crate::twobytwo::{
    alt_phi, log_phi, projection, two_variable_log_gap, two_variable_weight, FamilyPoint, PhiParams,
};

use super::report::{params_of, report_from_measurements, CheckReport, Measured, TrialCheck, TrialOutcome};
use super::sample::{inputs, params, pd_pair, Rng64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Normalization {
    #[default]
    ByOpNorm,
}

/// One Ando–Hiai question: does `F(A,B) <= I` imply `F(A^q, B^q) <= I`,
/// or, with `(r, s)`, `A^r ♮_α B^s <= I` for `α = rt / (s(1-t) + rt)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AhQuery {
    pub spec: MeanSpec,
    pub q: f64,
    pub rs: Option<(f64, f64)>,
    #[serde(default)]
    pub normalization: Normalization,
}

impl AhQuery {
    pub fn new(spec: MeanSpec, q: f64) -> Result<Self> {
        let query = Self { spec, q, rs: None, normalization: Normalization::ByOpNorm };
        query.validate()?;
        Ok(query)
    }

    pub fn two_variable(t: f64, r: f64, s: f64) -> Result<Self> {
        let query =
            Self { spec: MeanSpec::Natural { t }, q: r, rs: Some((r, s)), normalization: Normalization::ByOpNorm };
        query.validate()?;
        Ok(query)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if !(self.q > 0.0 && self.q.is_finite()) {
            return Err(Error::Spec(format!("exponent q = {} must be positive", self.q)));
        }
        if !self.spec.is_jointly_homogeneous() {
            return Err(Error::Spec(format!(
                "{} is not jointly homogeneous, so the norm form is not equivalent",
                self.spec.label()
            )));
        }
        if let Some((r, s)) = self.rs {
            let MeanSpec::Natural { t } = self.spec else {
                return Err(Error::Spec("the two-variable form is defined for the natural mean only".into()));
            };
            if !(r > 0.0 && s > 0.0 && t > 0.0 && t < 1.0) {
                return Err(Error::Spec(format!(
                    "two-variable form needs r, s > 0 and t in (0, 1); got r = {r}, s = {s}, t = {t}"
                )));
            }
            let alpha = two_variable_weight(t, r, s);
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::Spec(format!("derived weight {alpha} is outside (0, 1)")));
            }
        }
        Ok(())
    }

    /// Normalized margin `1 - ‖lhs‖ / ‖F(A,B)‖^w` where `w` is `q`, or
    /// `r(1-α) + sα` in the two-variable form.
    pub fn measure(&self, a: &PdMatrix<f64>, b: &PsdMatrix<f64>) -> Result<Measured> {
        let base = mean_apply(&self.spec, a, b)?.op_norm();
        let (lhs, expo) = match self.rs {
            None => {
                let aq = a.power(self.q)?;
                let bq = b.power(self.q)?;
                (mean_apply(&self.spec, &aq, &bq)?.op_norm(), self.q)
            }
            Some((r, s)) => {
                let MeanSpec::Natural { t } = self.spec else { unreachable!("validated") };
                let alpha = two_variable_weight(t, r, s);
                let ar = a.power(r)?;
                let bs = b.power(s)?;
                let v = mean_apply(&MeanSpec::Natural { t: alpha }, &ar, &bs)?.op_norm();
                (v, r * (1.0 - alpha) + s * alpha)
            }
        };
        if !(base > 0.0) {
            return Err(Error::Degenerate("mean vanishes; the norm form is undefined".into()));
        }
        let ratio = (lhs.ln() - expo * base.ln()).exp();
        Ok(Measured::new(1.0 - ratio, ratio, 1.0))
    }

    fn params(&self) -> BTreeMap<String, Value> {
        let mut p =
            params_of(&[("mean", serde_json::to_value(self.spec).unwrap_or(Value::Null)), ("q", Value::from(self.q))]);
        if let Some((r, s)) = self.rs {
            p.insert("r".into(), Value::from(r));
            p.insert("s".into(), Value::from(s));
            p.remove("q");
        }
        p
    }
}

/// Where the pairs for an Ando–Hiai run come from.
#[derive(Clone, Debug)]
pub enum AhInputs {
    Random,
    /// `A_{x,y}` with the projection `diag(1, 0)`.
    Family(FamilyPoint),
    Fixed {
        a: PdMatrix<f64>,
        b: PsdMatrix<f64>,
    },
}

pub struct AhCheck {
    pub query: AhQuery,
    pub inputs: AhInputs,
}

impl AhCheck {
    pub fn new(query: AhQuery, inputs: AhInputs) -> Result<Self> {
        query.validate()?;
        Ok(Self { query, inputs })
    }
}

impl TrialCheck for AhCheck {
    fn name(&self) -> String {
        if self.query.rs.is_some() {
            "two-var-ah".into()
        } else {
            "ah".into()
        }
    }

    fn params(&self) -> BTreeMap<String, Value> {
        let mut p = self.query.params();
        match &self.inputs {
            AhInputs::Random => {}
            AhInputs::Family(pt) => {
                p.insert("family".into(), Value::from("2x2"));
                p.insert("x".into(), Value::from(pt.x));
                p.insert("y".into(), Value::from(pt.y));
            }
            AhInputs::Fixed { .. } => {
                p.insert("inputs".into(), Value::from("files"));
            }
        }
        p
    }

    fn run_trial(&self, rng: &mut Rng64, n: usize) -> Result<TrialOutcome> {
        let (a, b) = match &self.inputs {
            AhInputs::Random => {
                let (a, b) = pd_pair(rng, n);
                (a, b.into_psd())
            }
            AhInputs::Family(pt) => (pt.matrix()?, projection()),
            AhInputs::Fixed { a, b } => (a.clone(), b.clone()),
        };
        let m = self.query.measure(&a, &b)?;
        let mut pm = params(&[("q", self.query.q)]);
        if let Some((r, s)) = self.query.rs {
            pm = params(&[("r", r), ("s", s)]);
        }
        Ok(TrialOutcome { measured: vec![m], inputs: inputs(&[("A", a.matrix()), ("B", b.matrix())]), params: pm })
    }
}

/// `F_{k,t}(A,B) < I ⇒ B^{1/x} <= A^{-L}` with `1/x = 2ktL / (1-2kt)`.
pub struct EqSeeCheck {
    pub k: f64,
    pub t: f64,
}

pub const PREMISE_DELTA: f64 = 1e-6;

impl EqSeeCheck {
    pub fn new(k: f64, t: f64) -> Result<Self> {
        if !(k > 0.0 && k <= 0.5 && t > 0.0 && t <= 0.5) {
            return Err(Error::Spec(format!("k, t must lie in (0, 1/2]; got k = {k}, t = {t}")));
        }
        Ok(Self { k, t })
    }
}

impl TrialCheck for EqSeeCheck {
    fn name(&self) -> String {
        "eq-see".into()
    }

    fn params(&self) -> BTreeMap<String, Value> {
        params_of(&[("k", Value::from(self.k)), ("t", Value::from(self.t)), ("delta", Value::from(PREMISE_DELTA))])
    }

    fn run_trial(&self, rng: &mut Rng64, n: usize) -> Result<TrialOutcome> {
        let (k, t) = (self.k, self.t);
        let (a0, b0) = pd_pair(rng, n);
        let c = fkt(k, t, &a0, b0.as_psd())?.op_norm() * (1.0 + PREMISE_DELTA);
        let a = a0.scale(1.0 / c)?;
        let b = b0.scale(1.0 / c)?;
        let lhs = b.power(ah_threshold(k, t))?;
        let rhs = a.power(-natural_l(k, t))?;
        let gap = rhs.hermitian().sub(lhs.hermitian())?.eig()?.min();
        Ok(TrialOutcome {
            measured: vec![Measured::new(gap / rhs.op_norm(), lhs.op_norm(), rhs.op_norm())],
            inputs: inputs(&[("A", a0.matrix()), ("B", b0.matrix())]),
            params: params(&[("k", k), ("t", t)]),
        })
    }
}

/// `A^{1-α+r} >= [A^{r/2} (A^{-α/2} B^p A^{-α/2})^s A^{r/2}]^{(1-α+r)/((p-α)s+r)}` for `0 <= B <= A`.
pub struct GrandFurutaCheck;

/// Both sides of the grand Furuta inequality.
pub fn grand_furuta_sides(
    a: &PdMatrix<f64>,
    b: &PsdMatrix<f64>,
    p: f64,
    s: f64,
    alpha: f64,
    r: f64,
) -> Result<(PsdMatrix<f64>, PsdMatrix<f64>)> {
    let lhs = a.as_psd().power(1.0 - alpha + r)?;
    let inner = b.power(p)?.congruence(a.power(-alpha / 2.0)?.hermitian())?;
    let outer = inner.power(s)?.congruence(a.power(r / 2.0)?.hermitian())?;
    let rhs = outer.power((1.0 - alpha + r) / ((p - alpha) * s + r))?;
    Ok((lhs, rhs))
}

impl TrialCheck for GrandFurutaCheck {
    fn name(&self) -> String {
        "grand-furuta".into()
    }

    fn params(&self) -> BTreeMap<String, Value> {
        params_of(&[("sampling", Value::from("p,s in [1,3], alpha in [0,1], r in [alpha, alpha+2]"))])
    }

    fn run_trial(&self, rng: &mut Rng64, n: usize) -> Result<TrialOutcome> {
        let (a, b) = random_ordered_pair::<f64, _>(n, SpectrumSpec::default(), rng);
        let p = rng.random_range(1.0..=3.0);
        let s = rng.random_range(1.0..=3.0);
        let alpha = rng.random_range(0.0..=1.0);
        let r = alpha + rng.random_range(0.0..=2.0);
        let (lhs, rhs) = grand_furuta_sides(&a, &b, p, s, alpha, r)?;
        let gap = lhs.hermitian().sub(rhs.hermitian())?.eig()?.min();
        Ok(TrialOutcome {
            measured: vec![Measured::new(gap / lhs.op_norm(), rhs.op_norm(), lhs.op_norm())],
            inputs: inputs(&[("A", a.matrix()), ("B", b.matrix())]),
            params: params(&[("p", p), ("s", s), ("alpha", alpha), ("r", r)]),
        })
    }
}

fn family_inputs(pt: &FamilyPoint) -> Result<BTreeMap<String, MatrixJson>> {
    let a: PdMatrix<f64> = pt.matrix()?;
    let b: PsdMatrix<f64> = projection();
    Ok(inputs(&[("A", a.matrix()), ("B", b.matrix())]))
}

/// Scans `x = 1`, `y ∈ grid`: the first point with `log_lhs > log_rhs` wins,
/// otherwise the point of smallest margin is reported.
fn scan(grid: &[f64], eval: impl Fn(&FamilyPoint) -> (f64, f64)) -> Result<(FamilyPoint, Measured)> {
    let mut best: Option<(FamilyPoint, Measured)> = None;
    for &y in grid {
        let pt = FamilyPoint::new(1.0, y)?;
        let (ll, lr) = eval(&pt);
        let m = Measured::new(-(ll - lr).exp_m1(), ll.exp(), lr.exp());
        if ll > lr {
            return Ok((pt, m));
        }
        if best.as_ref().is_none_or(|(_, b)| m.margin < b.margin) {
            best = Some((pt, m));
        }
    }
    best.ok_or_else(|| Error::Range("empty scan grid".into()))
}

fn scan_report(
    check: &str,
    mut base: BTreeMap<String, Value>,
    tol: f64,
    qs: &[f64],
    grid: &[f64],
    eval: impl Fn(f64, &FamilyPoint) -> (f64, f64),
) -> Result<CheckReport> {
    let mut items = Vec::with_capacity(qs.len());
    for &q in qs {
        let (pt, m) = scan(grid, |pt| eval(q, pt))?;
        items.push((
            TrialOutcome {
                measured: vec![m],
                inputs: family_inputs(&pt)?,
                params: params(&[("q", q), ("x", pt.x), ("y", pt.y)]),
            },
            2,
        ));
    }
    base.insert("qs".into(), Value::from(qs.to_vec()));
    base.insert("yGrid".into(), Value::from(vec![grid[0], grid[grid.len() - 1]]));
    Ok(report_from_measurements(check.into(), base, tol, items))
}

/// `‖F_{k,t}(A^q, B^q)‖ <= ‖F_{k,t}(A, B)‖^q` on the 2×2 family; witnesses are violations.
pub fn fkt_necessity_report(k: f64, t: f64, qs: &[f64], grid: &[f64], tol: f64) -> Result<CheckReport> {
    let p = PhiParams::new(k, t);
    scan_report("ah-necessity", params_of(&[("k", Value::from(k)), ("t", Value::from(t))]), tol, qs, grid, |q, pt| {
        (log_phi(&p, &pt.power(q)), q * log_phi(&p, pt))
    })
}

/// Two-variable inequality for `♮_t` at exponents `(r, s)` on the 2×2 family.
pub fn two_variable_necessity_report(t: f64, r: f64, s: f64, grid: &[f64], tol: f64) -> Result<CheckReport> {
    let mut rep = scan_report(
        "two-var-ah-necessity",
        params_of(&[("t", Value::from(t)), ("s", Value::from(s))]),
        tol,
        &[r],
        grid,
        |r, pt| (two_variable_log_gap(t, r, s, pt), 0.0),
    )?;
    for v in &mut rep.violations {
        if let Some(q) = v.params.remove("q") {
            v.params.insert("r".into(), q);
        }
    }
    Ok(rep)
}

/// `‖A^q σ̂_f B^q‖ <= ‖A σ̂_f B‖^q` on the 2×2 family through `φ_f`.
pub fn alt_necessity_report(f: &ScalarMonotoneFn, qs: &[f64], grid: &[f64], tol: f64) -> Result<CheckReport> {
    f.validate()?;
    if f.is_trivial() {
        return Err(Error::Catalog(format!("{} is trivial; the necessity scan needs a non-trivial f", f.label())));
    }
    scan_report(
        "alternative-ah-necessity",
        params_of(&[("f", serde_json::to_value(f).unwrap_or(Value::Null))]),
        tol,
        qs,
        grid,
        |q, pt| (alt_phi(f, &pt.power(q)).ln(), q * alt_phi(f, pt).ln()),
    )
}

/// Normalized margin of `‖A^q F B^q‖ <= ‖F(A,B)‖^q` on one family point, through matrices.
pub fn family_margin_matrix(spec: &MeanSpec, q: f64, pt: &FamilyPoint) -> Result<f64> {
    let query = AhQuery::new(*spec, q)?;
    Ok(query.measure(&pt.matrix()?, &projection())?.margin)
}
