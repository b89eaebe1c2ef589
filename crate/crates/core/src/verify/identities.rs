//! Algebraic identities of `F_{k,t}`: the basic properties, the Riccati
//! characterization, positive similarity, and the spectral and determinant identities.

use std::collections::BTreeMap;

use rand::Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{random_unitary, PdMatrix, PsdMatrix};
use crate::means::{
    dual_mean, fkt, g_factor, geom_mean, harmonic_bounds, natural_l, positive_similarity_witness, SIMILARITY_TOL,
};

use super::report::{Measured, TrialCheck, TrialOutcome};
use super::sample::{commuting_pair, inputs, params, pd_pair, rel_dist, with_basis, Rng64};

/// `(k, t)` either fixed or drawn per trial from `[0.05, 0.95]²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KtChoice(pub Option<(f64, f64)>);

impl KtChoice {
    pub fn fixed(k: f64, t: f64) -> Result<Self> {
        if !(k > 0.0 && k < 1.0 && t > 0.0 && t < 1.0) {
            return Err(Error::Spec(format!("k, t must lie in (0, 1); got k = {k}, t = {t}")));
        }
        Ok(Self(Some((k, t))))
    }

    pub fn sampled() -> Self {
        Self(None)
    }

    fn draw(&self, rng: &mut Rng64) -> (f64, f64) {
        match self.0 {
            Some(kt) => kt,
            None => (rng.random_range(0.05..0.95), rng.random_range(0.05..0.95)),
        }
    }

    fn params(&self) -> BTreeMap<String, Value> {
        match self.0 {
            Some((k, t)) => [("k".to_string(), Value::from(k)), ("t".to_string(), Value::from(t))].into(),
            None => [("kt".to_string(), Value::from("sampled"))].into(),
        }
    }
}

fn pd_inputs(a: &PdMatrix<f64>, b: &PdMatrix<f64>) -> BTreeMap<String, crate::linalg::MatrixJson> {
    inputs(&[("A", a.matrix()), ("B", b.matrix())])
}

/// Properties (1)-(7) of `F_{k,t}`, one component each.
pub struct Prop22Check {
    pub kt: KtChoice,
}

impl TrialCheck for Prop22Check {
    fn name(&self) -> String {
        "prop22".into()
    }

    fn params(&self) -> BTreeMap<String, Value> {
        self.kt.params()
    }

    fn components(&self) -> Vec<String> {
        ["commuting", "homogeneity", "unitary-congruence", "self-duality", "riccati-pair", "factorization", "sandwich"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    fn run_trial(&self, rng: &mut Rng64, n: usize) -> Result<TrialOutcome> {
        let (k, t) = self.kt.draw(rng);
        let l = natural_l(k, t);
        let w = 2.0 * k * t;

        let cp = commuting_pair(rng, n)?;
        let f_comm = fkt(k, t, &cp.a, cp.b.as_psd())?;
        let expect: Vec<f64> = cp.a_diag.iter().zip(&cp.b_diag).map(|(a, b)| a.powf(1.0 - w) * b.powf(w)).collect();
        let commuting = rel_dist(f_comm.hermitian(), &with_basis(&cp.u, &expect)?)?;

        let (a, b) = pd_pair(rng, n);
        let f = fkt(k, t, &a, b.as_psd())?;

        let (lam, mu) = (3.0, 5.0);
        let scaled = fkt(k, t, &a.scale(lam)?, &b.as_psd().scale(mu)?)?;
        let homogeneity = rel_dist(scaled.hermitian(), &f.hermitian().scale(lam.powf(1.0 - w) * mu.powf(w)))?;

        let u = random_unitary(n, rng);
        let au = PdMatrix::new(a.hermitian().adjoint_congruence(&u)?)?;
        let bu = PdMatrix::new(b.hermitian().adjoint_congruence(&u)?)?;
        let unitary = rel_dist(fkt(k, t, &au, bu.as_psd())?.hermitian(), &f.hermitian().adjoint_congruence(&u)?)?;

        let f_inv = fkt(k, t, &a.inverse()?, b.inverse()?.as_psd())?;
        let self_duality = rel_dist(f_inv.hermitian(), f.to_pd()?.inverse()?.hermitian())?;

        let g = g_factor(k, t, &a, b.as_psd())?;
        let f_dual = dual_mean(k, t, &a, &b)?;
        let lhs1 = geom_mean(&a.power(-l)?, &f, 0.5)?;
        let lhs2 = geom_mean(&f_dual.to_pd()?.inverse()?, b.power(l)?.as_psd(), 0.5)?;
        let riccati_pair = rel_dist(lhs1.hermitian(), g.hermitian())?.max(rel_dist(lhs2.hermitian(), g.hermitian())?);

        let g_inv = g.to_pd()?.inverse()?;
        let via_g = b.as_psd().power(l)?.congruence(g_inv.hermitian())?;
        let via_g_f = a.as_psd().power(l)?.congruence(g.hermitian())?;
        let factorization =
            rel_dist(via_g.hermitian(), f_dual.hermitian())?.max(rel_dist(via_g_f.hermitian(), f.hermitian())?);

        let bounds = harmonic_bounds(k, t, &a, &b)?;
        let sandwich = match bounds.sandwich_margin(f.hermitian(), 0.0)? {
            Some((_, m)) => Measured::new(m, bounds.applicability_margin, 0.0),
            None => Measured::new(1.0, bounds.applicability_margin, 0.0),
        };

        Ok(TrialOutcome {
            measured: vec![
                Measured::residual(commuting),
                Measured::residual(homogeneity),
                Measured::residual(unitary),
                Measured::residual(self_duality),
                Measured::residual(riccati_pair),
                Measured::residual(factorization),
                sandwich,
            ],
            inputs: pd_inputs(&a, &b),
            params: params(&[("k", k), ("t", t)]),
        })
    }
}

/// `‖A^{-L} # F_{k,t}(A,B) - G‖ / max(1, ‖G‖)`.
pub struct RiccatiCheck {
    pub kt: KtChoice,
}

impl TrialCheck for RiccatiCheck {
    fn name(&self) -> String {
        "riccati".into()
    }

    fn params(&self) -> BTreeMap<String, Value> {
        self.kt.params()
    }

    fn run_trial(&self, rng: &mut Rng64, n: usize) -> Result<TrialOutcome> {
        let (k, t) = self.kt.draw(rng);
        let (a, b) = pd_pair(rng, n);
        let r = crate::means::riccati_residual(k, t, &a, &b)?;
        let scale = g_factor(k, t, &a, b.as_psd())?.op_norm().max(1.0);
        Ok(TrialOutcome {
            measured: vec![Measured::residual(r / scale)],
            inputs: pd_inputs(&a, &b),
            params: params(&[("k", k), ("t", t)]),
        })
    }
}

/// Spectra of `A^L # B^L` and `F~^{1/2} U F^{1/2}`, and unitarity of `U`.
pub struct SimilarityCheck {
    pub kt: KtChoice,
}

pub const UNITARITY_TOL: f64 = 1e-10;

impl TrialCheck for SimilarityCheck {
    fn name(&self) -> String {
        "similarity".into()
    }

    fn params(&self) -> BTreeMap<String, Value> {
        self.kt.params()
    }

    fn components(&self) -> Vec<String> {
        vec!["spectra".into(), "unitarity".into()]
    }

    fn tolerance(&self, component: usize, _base: f64) -> f64 {
        if component == 0 {
            SIMILARITY_TOL
        } else {
            UNITARITY_TOL
        }
    }

    fn run_trial(&self, rng: &mut Rng64, n: usize) -> Result<TrialOutcome> {
        let (k, t) = self.kt.draw(rng);
        let (a, b) = pd_pair(rng, n);
        let w = positive_similarity_witness(k, t, &a, &b)?;
        Ok(TrialOutcome {
            measured: vec![Measured::residual(w.spectral_rel_err), Measured::residual(w.unitarity_residual)],
            inputs: pd_inputs(&a, &b),
            params: params(&[("k", k), ("t", t)]),
        })
    }
}

/// Eigenvalues of `(A ♮ B)²` against those of `AB`, relative.
pub struct SpectralCheck;

impl TrialCheck for SpectralCheck {
    fn name(&self) -> String {
        "spectral".into()
    }

    fn params(&self) -> BTreeMap<String, Value> {
        BTreeMap::new()
    }

    fn run_trial(&self, rng: &mut Rng64, n: usize) -> Result<TrialOutcome> {
        let (a, b) = pd_pair(rng, n);
        let nat = fkt(0.5, 0.5, &a, b.as_psd())?;
        // AB is similar to A^{1/2} B A^{1/2}.
        let ab = b.as_psd().congruence(a.sqrt()?.hermitian())?;
        let err =
            nat.eigenvalues().iter().zip(ab.eigenvalues()).map(|(x, y)| (x * x - y).abs() / y).fold(0.0, f64::max);
        Ok(TrialOutcome { measured: vec![Measured::residual(err)], inputs: pd_inputs(&a, &b), params: BTreeMap::new() })
    }
}

/// `det F_{k,t}(A,B)` against `(det A)^{2t(k-1)+L} (det B)^{2kt}`, relative, in log form.
pub struct DeterminantCheck {
    pub kt: KtChoice,
}

impl TrialCheck for DeterminantCheck {
    fn name(&self) -> String {
        "determinant".into()
    }

    fn params(&self) -> BTreeMap<String, Value> {
        self.kt.params()
    }

    fn run_trial(&self, rng: &mut Rng64, n: usize) -> Result<TrialOutcome> {
        let (k, t) = self.kt.draw(rng);
        let (a, b) = pd_pair(rng, n);
        let f = fkt(k, t, &a, b.as_psd())?;
        let ln_det = |v: &[f64]| v.iter().map(|x| x.ln()).sum::<f64>();
        let lhs = ln_det(f.eigenvalues());
        let rhs =
            (2.0 * t * (k - 1.0) + natural_l(k, t)) * ln_det(a.eigenvalues()) + 2.0 * k * t * ln_det(b.eigenvalues());
        let err = (lhs - rhs).exp_m1().abs();
        Ok(TrialOutcome {
            measured: vec![Measured::residual(err)],
            inputs: pd_inputs(&a, &b),
            params: params(&[("k", k), ("t", t)]),
        })
    }
}

/// Transposition defect `‖A ⊛ B - B ⊛' A‖ / ‖A ⊛ B‖` for a mean and its transpose.
pub fn transposition_defect(
    forward: impl Fn(&PdMatrix<f64>, &PdMatrix<f64>) -> Result<PsdMatrix<f64>>,
    backward: impl Fn(&PdMatrix<f64>, &PdMatrix<f64>) -> Result<PsdMatrix<f64>>,
    a: &PdMatrix<f64>,
    b: &PdMatrix<f64>,
) -> Result<f64> {
    rel_dist(backward(b, a)?.hermitian(), forward(a, b)?.hermitian())
}
