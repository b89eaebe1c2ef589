//! Lie–Trotter limits and the unitarily invariant norm inequalities built on them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{
    expm, ky_fan_norms, random_hermitian, random_unitary, HermitianMatrix, NormKind, PdMatrix, PsdMatrix,
};
use crate::means::{ah_threshold, fkt};

use super::logmaj::{fkt_power, log_euclid, sandwich};
use super::report::{params_of, Measured, TrialCheck, TrialOutcome};
use super::sample::{inputs, params, pd_pair, with_basis, Rng64};

/// `‖pA‖, ‖pB‖` above this make `e^{pA}` worse conditioned than the PD guard allows.
pub const LIE_TROTTER_EXP_LIMIT: f64 = 13.0;

pub const RATIO_BAND: (f64, f64) = (1.5, 2.5);

pub const COMMUTING_TOL: f64 = 1e-10;

pub fn default_p_grid() -> Vec<f64> {
    vec![1e-1, 5e-2, 2.5e-2, 1.25e-2]
}

/// Convergence table of `F_{k,t}(e^{pA}, e^{pB})^{1/p} → exp((1-2kt)A + 2ktB)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LieTrotterTable {
    pub p: Vec<f64>,
    pub error: Vec<f64>,
    /// `e(p_i) / e(p_{i+1})` for consecutive grid points.
    pub ratio: Vec<f64>,
}

impl LieTrotterTable {
    /// Worst distance of the ratios from the band, negative when outside.
    pub fn band_margin(&self) -> f64 {
        self.ratio.iter().map(|r| (r - RATIO_BAND.0).min(RATIO_BAND.1 - r)).fold(f64::INFINITY, f64::min)
    }

    /// `min_i (e(p_i) - e(p_{i+1})) / e(p_i)`; negative when the tail is not decreasing.
    pub fn monotone_margin(&self) -> f64 {
        self.error.windows(2).map(|w| (w[0] - w[1]) / w[0].max(f64::MIN_POSITIVE)).fold(f64::INFINITY, f64::min)
    }
}

pub fn lie_trotter_error(
    k: f64,
    t: f64,
    a: &HermitianMatrix<f64>,
    b: &HermitianMatrix<f64>,
    limit: &PdMatrix<f64>,
    p: f64,
) -> Result<f64> {
    let na = a.op_norm()? * p;
    let nb = b.op_norm()? * p;
    if na.max(nb) > LIE_TROTTER_EXP_LIMIT {
        return Err(Error::Conditioning { cond: (2.0 * na.max(nb)).exp(), limit: 1e12 });
    }
    let ea = expm(&a.scale(p))?;
    let eb = expm(&b.scale(p))?;
    let x = fkt(k, t, &ea, eb.as_psd())?.power(1.0 / p)?;
    x.hermitian().distance(limit.hermitian())
}

pub fn lie_trotter_table(
    k: f64,
    t: f64,
    a: &HermitianMatrix<f64>,
    b: &HermitianMatrix<f64>,
    p_grid: &[f64],
) -> Result<LieTrotterTable> {
    if p_grid.is_empty() || p_grid.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::Range("p grid must be nonempty and positive".into()));
    }
    let w = 2.0 * k * t;
    let limit = expm(&a.scale(1.0 - w).add(&b.scale(w))?)?;
    let error = p_grid.iter().map(|&p| lie_trotter_error(k, t, a, b, &limit, p)).collect::<Result<Vec<_>>>()?;
    let ratio = error.windows(2).map(|e| e[0] / e[1]).collect();
    Ok(LieTrotterTable { p: p_grid.to_vec(), error, ratio })
}

/// Random Hermitian pairs for the ratio band and tail monotonicity, plus a
/// commuting pair per trial for exactness.
pub struct LieTrotterCheck {
    pub k: f64,
    pub t: f64,
    pub p_grid: Vec<f64>,
}

impl TrialCheck for LieTrotterCheck {
    fn name(&self) -> String {
        "lie-trotter".into()
    }

    fn params(&self) -> BTreeMap<String, Value> {
        params_of(&[
            ("k", Value::from(self.k)),
            ("t", Value::from(self.t)),
            ("pGrid", Value::from(self.p_grid.clone())),
        ])
    }

    fn components(&self) -> Vec<String> {
        vec!["ratio".into(), "monotone".into(), "commuting".into()]
    }

    fn tolerance(&self, component: usize, base: f64) -> f64 {
        if component == 2 {
            COMMUTING_TOL
        } else {
            base
        }
    }

    fn run_trial(&self, rng: &mut Rng64, n: usize) -> Result<TrialOutcome> {
        let a = random_hermitian::<f64, _>(n, 0.5, rng);
        let b = random_hermitian::<f64, _>(n, 0.5, rng);
        let table = lie_trotter_table(self.k, self.t, &a, &b, &self.p_grid)?;
        let u = random_unitary::<f64, _>(n, rng);
        let da: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(rng, -1.0..=1.0)).collect();
        let db: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(rng, -1.0..=1.0)).collect();
        let ca = with_basis(&u, &da)?;
        let cb = with_basis(&u, &db)?;
        let exact = lie_trotter_table(self.k, self.t, &ca, &cb, &self.p_grid)?;
        let worst_exact = exact.error.iter().copied().fold(0.0, f64::max);
        let worst_ratio = table.ratio.iter().copied().fold(f64::NAN, |m, r| {
            if m.is_nan() || (r - 2.0).abs() > (m - 2.0).abs() {
                r
            } else {
                m
            }
        });
        Ok(TrialOutcome {
            measured: vec![
                Measured::new(table.band_margin(), worst_ratio, RATIO_BAND.1),
                Measured::new(table.monotone_margin(), table.error[table.error.len() - 1], table.error[0]),
                Measured::residual(worst_exact),
            ],
            inputs: inputs(&[
                ("A", a.matrix()),
                ("B", b.matrix()),
                ("commutingA", ca.matrix()),
                ("commutingB", cb.matrix()),
            ]),
            params: params(&[("k", self.k), ("t", self.t)]),
        })
    }
}

fn norm_values(m: &PsdMatrix<f64>, norms: &Option<Vec<NormKind>>) -> Result<Vec<f64>> {
    match norms {
        None => Ok(ky_fan_norms(m.matrix())),
        Some(list) => list.iter().map(|nk| nk.eval(m.matrix())).collect(),
    }
}

/// `p_i = θ p_{i-1}` with `θ = 2ktL/(1-2kt)`: the norms of
/// `F_{k,t}(A^{p_i}, B^{p_i})^{1/p_i}` decrease toward the log-Euclidean limit.
pub struct NormSequenceCheck {
    pub k: f64,
    pub t: f64,
    pub p0: f64,
    pub m: usize,
    /// `None` checks every Ky Fan norm.
    pub norms: Option<Vec<NormKind>>,
}

impl NormSequenceCheck {
    pub fn new(k: f64, t: f64, p0: f64, m: usize, norms: Option<Vec<NormKind>>) -> Result<Self> {
        if !(k > 0.0 && k <= 0.5 && t > 0.0 && t <= 0.5) {
            return Err(Error::Spec(format!("k, t must lie in (0, 1/2]; got k = {k}, t = {t}")));
        }
        if !(p0 > 0.0) {
            return Err(Error::Spec(format!("p0 = {p0} must be positive")));
        }
        Ok(Self { k, t, p0, m, norms })
    }

    pub fn exponents(&self) -> Vec<f64> {
        let theta = ah_threshold(self.k, self.t);
        (0..=self.m).map(|i| self.p0 * theta.powi(i as i32)).collect()
    }

    /// Norm values per step (rows) and the limit row.
    pub fn sequence(&self, a: &PdMatrix<f64>, b: &PdMatrix<f64>) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let rows = self
            .exponents()
            .iter()
            .map(|&p| norm_values(&fkt_power(self.k, self.t, a, b, p)?, &self.norms))
            .collect::<Result<Vec<_>>>()?;
        let limit = norm_values(&log_euclid(a, b, 2.0 * self.k * self.t)?, &self.norms)?;
        Ok((rows, limit))
    }
}

impl TrialCheck for NormSequenceCheck {
    fn name(&self) -> String {
        "norms".into()
    }

    fn params(&self) -> BTreeMap<String, Value> {
        let norms = match &self.norms {
            None => Value::from("ky-fan"),
            Some(list) => Value::from(list.iter().map(NormKind::label).collect::<Vec<_>>()),
        };
        params_of(&[
            ("k", Value::from(self.k)),
            ("t", Value::from(self.t)),
            ("p0", Value::from(self.p0)),
            ("m", Value::from(self.m)),
            ("norms", norms),
        ])
    }

    fn components(&self) -> Vec<String> {
        vec!["monotone".into(), "limit".into()]
    }

    fn run_trial(&self, rng: &mut Rng64, n: usize) -> Result<TrialOutcome> {
        let (a, b) = pd_pair(rng, n);
        let (rows, limit) = self.sequence(&a, &b)?;
        let mut step = f64::INFINITY;
        for w in rows.windows(2) {
            for (x, y) in w[0].iter().zip(&w[1]) {
                step = step.min((x - y) / x);
            }
        }
        let last = &rows[rows.len() - 1];
        let lower = last.iter().zip(&limit).map(|(x, l)| (x - l) / l).fold(f64::INFINITY, f64::min);
        Ok(TrialOutcome {
            measured: vec![
                Measured::new(if step.is_finite() { step } else { 0.0 }, rows[0][0], last[0]),
                Measured::new(lower, limit[0], last[0]),
            ],
            inputs: inputs(&[("A", a.matrix()), ("B", b.matrix())]),
            params: params(&[("k", self.k), ("t", self.t), ("p0", self.p0), ("m", self.m as f64)]),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UabVariant {
    Natural,
    Tilde,
}

/// The four-member norm chain refining the Gan–Tam inequalities.
pub struct UabCheck {
    pub t: f64,
    pub p: f64,
    pub variant: UabVariant,
}

impl UabCheck {
    pub fn new(t: f64, p: f64, variant: UabVariant) -> Result<Self> {
        if !(t > 0.0 && t < 1.0 && p > 0.0) {
            return Err(Error::Spec(format!("need t in (0, 1) and p > 0; got t = {t}, p = {p}")));
        }
        Ok(Self { t, p, variant })
    }

    pub fn members(&self, a: &PdMatrix<f64>, b: &PdMatrix<f64>) -> Result<Vec<(String, PsdMatrix<f64>)>> {
        let (t, p) = (self.t, self.p);
        let first = sandwich(a, (1.0 - t) * p / 2.0, b, p * t, 1.0 / p)?;
        let narrow = sandwich(a, p / 2.0, b, p * t / (1.0 - t), (1.0 - t) / p)?;
        let wide = sandwich(a, (1.0 - t) * p / (2.0 * t), b, p, t / p)?;
        let middle = match self.variant {
            UabVariant::Natural => fkt_power(0.5, t, a, b, p)?,
            UabVariant::Tilde if t <= 0.5 => fkt_power(t, 0.5, a, b, p)?,
            UabVariant::Tilde => fkt_power(1.0 - t, 0.5, b, a, p)?,
        };
        Ok(if t <= 0.5 {
            vec![("first".into(), first), ("narrow".into(), narrow), ("mean".into(), middle), ("wide".into(), wide)]
        } else {
            vec![("first".into(), first), ("wide".into(), wide), ("mean".into(), middle), ("narrow".into(), narrow)]
        })
    }
}

impl TrialCheck for UabCheck {
    fn name(&self) -> String {
        match self.variant {
            UabVariant::Natural => "uab".into(),
            UabVariant::Tilde => "uab-tilde".into(),
        }
    }

    fn params(&self) -> BTreeMap<String, Value> {
        params_of(&[("t", Value::from(self.t)), ("p", Value::from(self.p))])
    }

    fn components(&self) -> Vec<String> {
        let names: [&str; 4] =
            if self.t <= 0.5 { ["first", "narrow", "mean", "wide"] } else { ["first", "wide", "mean", "narrow"] };
        names.windows(2).map(|w| format!("{}<{}", w[0], w[1])).collect()
    }

    fn run_trial(&self, rng: &mut Rng64, n: usize) -> Result<TrialOutcome> {
        let (a, b) = pd_pair(rng, n);
        let members = self.members(&a, &b)?;
        let norms = members.iter().map(|(_, m)| ky_fan_norms(m.matrix())).collect::<Vec<_>>();
        let measured = norms
            .windows(2)
            .map(|w| {
                let margin = w[0].iter().zip(&w[1]).map(|(x, y)| (y - x) / y).fold(f64::INFINITY, f64::min);
                Measured::new(margin, w[0][0], w[1][0])
            })
            .collect();
        Ok(TrialOutcome {
            measured,
            inputs: inputs(&[("A", a.matrix()), ("B", b.matrix())]),
            params: params(&[("t", self.t), ("p", self.p)]),
        })
    }
}
