//! Singular value dominance between alternative means.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{random_pd, singular_values, SpectrumSpec};
use crate::majorization::singular_dominance;
use crate::means::{alternative_mean, g_factor, ScalarMonotoneFn};

use super::report::{params_of, Measured, TrialCheck, TrialOutcome};
use super::sample::{inputs, params, psd_maybe_singular, Rng64};

pub const DOMINANCE_GRID: usize = 2001;

/// `s_j(A σ̂_f B) <= s_j(A σ̂_g B)` for all `j`, and the implied weak log-majorization.
pub struct AltDominanceCheck {
    pub f: ScalarMonotoneFn,
    pub g: ScalarMonotoneFn,
}

impl AltDominanceCheck {
    pub fn new(f: ScalarMonotoneFn, g: ScalarMonotoneFn) -> Result<Self> {
        f.validate()?;
        g.validate()?;
        Ok(Self { f, g })
    }

    /// `f = x^t` against `g = 1 - t + tx`.
    pub fn power_vs_affine(t: f64) -> Result<Self> {
        Self::new(ScalarMonotoneFn::Power { t }, ScalarMonotoneFn::Affine { t })
    }
}

/// `min_k (1 - P_x(k) / P_y(k)) / k` over leading products of sorted values;
/// products below `floor · top^k` count as zero.
fn weak_log_margin(x: &[f64], y: &[f64]) -> f64 {
    let top = x.first().copied().unwrap_or(0.0).max(y.first().copied().unwrap_or(0.0));
    let (mut px, mut py) = (1.0, 1.0);
    let mut margin = f64::INFINITY;
    for (k, (a, b)) in x.iter().zip(y).enumerate() {
        px *= a;
        py *= b;
        let zero = 1e-10 * top.powi(k as i32 + 1);
        let m = if px <= zero {
            1.0
        } else if py <= zero {
            -1.0
        } else {
            (1.0 - px / py) / (k + 1) as f64
        };
        margin = margin.min(m);
    }
    margin
}

impl TrialCheck for AltDominanceCheck {
    fn name(&self) -> String {
        "alternative".into()
    }

    fn params(&self) -> BTreeMap<String, Value> {
        params_of(&[
            ("f", serde_json::to_value(self.f).unwrap_or(Value::Null)),
            ("g", serde_json::to_value(self.g).unwrap_or(Value::Null)),
        ])
    }

    fn components(&self) -> Vec<String> {
        vec!["singular-values".into(), "weak-log".into()]
    }

    fn run_trial(&self, rng: &mut Rng64, n: usize) -> Result<TrialOutcome> {
        let a = random_pd::<f64, _>(n, SpectrumSpec::default(), rng);
        let b = psd_maybe_singular(rng, n)?;
        let upper = g_factor(0.5, 1.0, &a, &b)?.op_norm();
        if !self.f.dominated_by_on_grid(&self.g, upper.max(1e-12), DOMINANCE_GRID) {
            return Err(Error::Catalog(format!("{} <= {} fails on [0, {upper:.3e}]", self.f.label(), self.g.label())));
        }
        let mf = alternative_mean(&self.f, &a, &b)?;
        let mg = alternative_mean(&self.g, &a, &b)?;
        let sf = singular_values(mf.matrix());
        let sg = singular_values(mg.matrix());
        let s1 = sg[0].max(f64::MIN_POSITIVE);
        let margin = sf.iter().zip(&sg).map(|(x, y)| (y - x) / s1).fold(f64::INFINITY, f64::min);
        let verdict = singular_dominance(mf.matrix(), mg.matrix(), 1e-9)?;
        let weak = weak_log_margin(&sf, &sg);
        let weak = if verdict.all() && !verdict.weak_log { weak.min(-1.0) } else { weak };
        Ok(TrialOutcome {
            measured: vec![Measured::new(margin, sf[0], sg[0]), Measured::new(weak, sf[0], sg[0])],
            inputs: inputs(&[("A", a.matrix()), ("B", b.matrix())]),
            params: params(&[("rankB", b.eigenvalues().iter().filter(|&&v| v > 0.0).count() as f64)]),
        })
    }
}
