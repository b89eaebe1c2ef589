//! Log-majorization theorems and chains, checked link by link through both
//! the sorted-eigenvalue and compound-matrix routes.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{expm, PdMatrix, PsdMatrix};
use crate::majorization::{log_majorize, log_majorize_compound, route_disagreement, MajorizationVerdict};
use crate::means::{ah_threshold, fktl, natural_l};

use super::report::{params_of, Measured, TrialCheck, TrialOutcome};
use super::sample::{inputs, params, pd_pair, Rng64};

/// Agreement required between the two routes to the leading products.
pub const ROUTE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogMajTheorem {
    #[serde(rename = "lmF")]
    Lmf,
    #[serde(rename = "ah")]
    Ah,
    #[serde(rename = "kah")]
    Kah,
    #[serde(rename = "lgF")]
    Lgf,
    #[serde(rename = "lmiF-chain")]
    LmiChain,
    #[serde(rename = "GT36-refinement")]
    Gt36Refinement,
    #[serde(rename = "tilde-chain")]
    TildeChain,
}

impl LogMajTheorem {
    pub const ALL: [LogMajTheorem; 7] = [
        LogMajTheorem::Lmf,
        LogMajTheorem::Ah,
        LogMajTheorem::Kah,
        LogMajTheorem::Lgf,
        LogMajTheorem::LmiChain,
        LogMajTheorem::Gt36Refinement,
        LogMajTheorem::TildeChain,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            LogMajTheorem::Lmf => "lmF",
            LogMajTheorem::Ah => "ah",
            LogMajTheorem::Kah => "kah",
            LogMajTheorem::Lgf => "lgF",
            LogMajTheorem::LmiChain => "lmiF-chain",
            LogMajTheorem::Gt36Refinement => "GT36-refinement",
            LogMajTheorem::TildeChain => "tilde-chain",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Spec(format!("unknown log-majorization theorem {s:?}")))
    }
}

impl fmt::Display for LogMajTheorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `(A^x B^y A^x)^outer`.
pub fn sandwich(a: &PdMatrix<f64>, x: f64, b: &PdMatrix<f64>, y: f64, outer: f64) -> Result<PsdMatrix<f64>> {
    b.as_psd().power(y)?.congruence(a.power(x)?.hermitian())?.power(outer)
}

/// `exp((1-w) log A + w log B)`.
pub fn log_euclid(a: &PdMatrix<f64>, b: &PdMatrix<f64>, w: f64) -> Result<PsdMatrix<f64>> {
    let h = a.logm().scale(1.0 - w).add(&b.logm().scale(w))?;
    Ok(expm(&h)?.into_psd())
}

/// `F_{k,t,L}(A^p, B^p)^{1/p}`.
pub fn fktl_power(k: f64, t: f64, l: f64, a: &PdMatrix<f64>, b: &PdMatrix<f64>, p: f64) -> Result<PsdMatrix<f64>> {
    fktl(k, t, l, &a.power(p)?, &b.as_psd().power(p)?)?.power(1.0 / p)
}

pub fn fkt_power(k: f64, t: f64, a: &PdMatrix<f64>, b: &PdMatrix<f64>, p: f64) -> Result<PsdMatrix<f64>> {
    fktl_power(k, t, natural_l(k, t), a, b, p)
}

/// Members of a relation, and the links `(lhs, rhs)` claimed between them.
pub struct Chain {
    pub members: Vec<(String, PsdMatrix<f64>)>,
    pub links: Vec<(usize, usize)>,
}

impl Chain {
    fn consecutive(members: Vec<(String, PsdMatrix<f64>)>) -> Self {
        let links = (1..members.len()).map(|i| (i - 1, i)).collect();
        Self { members, links }
    }

    pub fn link_names(&self) -> Vec<String> {
        self.links.iter().map(|&(i, j)| format!("{}<{}", self.members[i].0, self.members[j].0)).collect()
    }
}

fn geom_weighted(a: &PdMatrix<f64>, b: &PdMatrix<f64>, w: f64) -> Result<PsdMatrix<f64>> {
    crate::means::geom_mean(a, b.as_psd(), w)
}

/// The six-member chain for `k, t <= 1/2`, written with `w = 2kt`.
/// `middle` is the fifth member.
fn lower_chain(
    a: &PdMatrix<f64>,
    b: &PdMatrix<f64>,
    w: f64,
    p: f64,
    middle: PsdMatrix<f64>,
) -> Result<Vec<(String, PsdMatrix<f64>)>> {
    Ok(vec![
        ("geom".into(), geom_weighted(a, b, w)?),
        ("log-euclid".into(), log_euclid(a, b, w)?),
        ("sandwich-a".into(), sandwich(a, (1.0 - w) * p / 2.0, b, w * p, 1.0 / p)?),
        ("sandwich-b".into(), sandwich(a, p / 2.0, b, w * p / (1.0 - w), (1.0 - w) / p)?),
        ("mean".into(), middle),
        ("sandwich-c".into(), sandwich(a, (1.0 - w) * p / (2.0 * w), b, p, w / p)?),
    ])
}

/// The six-member chain for `k, t >= 1/2`, written with `c = (1-k)(1-t)`.
fn upper_chain(
    a: &PdMatrix<f64>,
    b: &PdMatrix<f64>,
    c: f64,
    p: f64,
    middle: PsdMatrix<f64>,
) -> Result<Vec<(String, PsdMatrix<f64>)>> {
    let w = 1.0 - 2.0 * c;
    Ok(vec![
        ("geom".into(), geom_weighted(b, a, 2.0 * c)?),
        ("log-euclid".into(), log_euclid(a, b, w)?),
        ("sandwich-a".into(), sandwich(a, c * p, b, w * p, 1.0 / p)?),
        ("sandwich-b".into(), sandwich(a, c * p / w, b, p, w / p)?),
        ("mean".into(), middle),
        ("sandwich-c".into(), sandwich(a, p / 2.0, b, w * p / (2.0 * c), 2.0 * c / p)?),
    ])
}

/// A parameter point for one of the log-majorization theorems.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogMajCheck {
    pub theorem: LogMajTheorem,
    pub k: f64,
    pub t: f64,
    pub p: f64,
    pub q: f64,
}

fn in_half(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 0.5 {
        Ok(())
    } else {
        Err(Error::Spec(format!("{name} = {v} must lie in (0, 1/2]")))
    }
}

fn in_open(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Spec(format!("{name} = {v} must lie in (0, 1)")))
    }
}

impl LogMajCheck {
    /// Largest `q / p` the theorem allows, when it has a `q`.
    pub fn q_ratio(theorem: LogMajTheorem, k: f64, t: f64) -> Option<f64> {
        match theorem {
            LogMajTheorem::Lmf => Some(ah_threshold(k, t)),
            LogMajTheorem::Ah => Some((t / (1.0 - t)).min((1.0 - t) / t)),
            LogMajTheorem::Kah => Some(2.0 * k),
            _ => None,
        }
    }

    /// Validates the theorem's parameter region. `q = None` selects the largest allowed `q`.
    /// Parameters a theorem does not use are ignored (`k` for `ah` and the ♮ chain, `t` for the ~♮ ones).
    pub fn new(theorem: LogMajTheorem, k: f64, t: f64, p: f64, q: Option<f64>) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Spec(format!("p = {p} must be positive")));
        }
        let (k, t) = match theorem {
            LogMajTheorem::Lmf | LogMajTheorem::Lgf => {
                in_half("k", k)?;
                in_half("t", t)?;
                (k, t)
            }
            LogMajTheorem::Ah | LogMajTheorem::Gt36Refinement => {
                in_open("t", t)?;
                (0.5, t)
            }
            LogMajTheorem::Kah => {
                in_half("k", k)?;
                (k, 0.5)
            }
            LogMajTheorem::TildeChain => {
                in_open("k", k)?;
                (k, 0.5)
            }
            LogMajTheorem::LmiChain => {
                in_open("k", k)?;
                in_open("t", t)?;
                let low = k <= 0.5 && t <= 0.5;
                let high = k >= 0.5 && t >= 0.5;
                if !(low || high) {
                    return Err(Error::Spec(format!(
                        "the chain needs k, t <= 1/2 or k, t >= 1/2; got k = {k}, t = {t}"
                    )));
                }
                (k, t)
            }
        };
        let q = match (Self::q_ratio(theorem, k, t), q) {
            (Some(ratio), None) => ratio * p,
            (Some(ratio), Some(q)) => {
                if !(q > 0.0 && q <= ratio * p * (1.0 + 1e-12)) {
                    return Err(Error::Spec(format!("q = {q} must lie in (0, {}] for {theorem}", ratio * p)));
                }
                q
            }
            (None, _) => p,
        };
        Ok(Self { theorem, k, t, p, q })
    }

    pub fn chain(&self, a: &PdMatrix<f64>, b: &PdMatrix<f64>) -> Result<Chain> {
        let (k, t, p, q) = (self.k, self.t, self.p, self.q);
        match self.theorem {
            LogMajTheorem::Lmf | LogMajTheorem::Ah | LogMajTheorem::Kah => Ok(Chain::consecutive(vec![
                ("mean^q".into(), fkt_power(k, t, a, b, q)?),
                ("mean^p".into(), fkt_power(k, t, a, b, p)?),
            ])),
            LogMajTheorem::Lgf => Ok(Chain::consecutive(vec![
                ("log-euclid".into(), log_euclid(a, b, 2.0 * k * t)?),
                ("mean^p".into(), fkt_power(k, t, a, b, p)?),
            ])),
            LogMajTheorem::LmiChain => {
                if k <= 0.5 && t <= 0.5 {
                    Ok(Chain::consecutive(lower_chain(a, b, 2.0 * k * t, p, fkt_power(k, t, a, b, p)?)?))
                } else {
                    let c = (1.0 - k) * (1.0 - t);
                    Ok(Chain::consecutive(upper_chain(a, b, c, p, fkt_power(1.0 - k, 1.0 - t, b, a, p)?)?))
                }
            }
            LogMajTheorem::Gt36Refinement => {
                let middle = fkt_power(0.5, t, a, b, p)?;
                if t <= 0.5 {
                    Ok(Chain::consecutive(lower_chain(a, b, t, p, middle)?))
                } else {
                    Ok(Chain::consecutive(upper_chain(a, b, (1.0 - t) / 2.0, p, middle)?))
                }
            }
            LogMajTheorem::TildeChain => {
                if k <= 0.5 {
                    let mut members = lower_chain(a, b, k, p, fkt_power(k, 0.5, a, b, p)?)?;
                    members.drain(..3);
                    Ok(Chain::consecutive(members))
                } else {
                    let c = (1.0 - k) / 2.0;
                    let mut members = upper_chain(a, b, c, p, fkt_power(1.0 - k, 0.5, b, a, p)?)?;
                    members.drain(..3);
                    members.push(("tilde".into(), fkt_power(k, 0.5, a, b, p)?));
                    let mut chain = Chain::consecutive(members);
                    // keep the literal upper link tilde < sandwich-c; the literal lower link fails
                    chain.links = vec![(0, 1), (1, 2), (3, 2)];
                    Ok(chain)
                }
            }
        }
    }

    fn template_names(&self) -> Vec<String> {
        let n = 3;
        let a = PdMatrix::from_diagonal(&vec![1.0; n]).expect("identity");
        let mut names = self.chain(&a, &a).expect("identity inputs").link_names();
        names.push("routes".into());
        names
    }
}

/// `min_k (1 - P_A(k)/P_B(k)) / k`, together with `max_k P_A(k)/P_B(k)`.
fn product_margin(v: &MajorizationVerdict) -> (f64, f64) {
    let (pa, pb) = &v.partial_products;
    let mut margin = f64::INFINITY;
    let mut worst_ratio: f64 = 0.0;
    for (i, (a, b)) in pa.iter().zip(pb).enumerate() {
        let ratio = a / b;
        worst_ratio = worst_ratio.max(ratio);
        margin = margin.min((1.0 - ratio) / (i + 1) as f64);
    }
    (margin, worst_ratio)
}

/// Margin of a strong log-majorization link through both routes:
/// leading products per index, then the determinant equality.
pub fn link_measure(x: &PsdMatrix<f64>, y: &PsdMatrix<f64>, tol: f64) -> Result<Measured> {
    let direct = log_majorize(x, y, tol)?;
    let compound = log_majorize_compound(x, y, tol)?;
    let (m1, r1) = product_margin(&direct);
    let (m2, r2) = product_margin(&compound);
    let margin = m1.min(m2).min(-direct.det_rel_err).min(-compound.det_rel_err);
    Ok(Measured::new(margin, r1.max(r2), 1.0))
}

impl TrialCheck for LogMajCheck {
    fn name(&self) -> String {
        format!("log-maj/{}", self.theorem)
    }

    fn params(&self) -> BTreeMap<String, Value> {
        params_of(&[
            ("k", Value::from(self.k)),
            ("t", Value::from(self.t)),
            ("p", Value::from(self.p)),
            ("q", Value::from(self.q)),
        ])
    }

    fn components(&self) -> Vec<String> {
        self.template_names()
    }

    fn tolerance(&self, component: usize, base: f64) -> f64 {
        if component + 1 == self.components().len() {
            ROUTE_TOL
        } else {
            base
        }
    }

    fn run_trial(&self, rng: &mut Rng64, n: usize) -> Result<TrialOutcome> {
        let (a, b) = pd_pair(rng, n);
        let chain = self.chain(&a, &b)?;
        let mut measured = chain
            .links
            .iter()
            .map(|&(i, j)| link_measure(&chain.members[i].1, &chain.members[j].1, 0.0))
            .collect::<Result<Vec<_>>>()?;
        let mut routes: f64 = 0.0;
        for (_, m) in &chain.members {
            routes = routes.max(route_disagreement(m)?);
        }
        measured.push(Measured::residual(routes));
        Ok(TrialOutcome {
            measured,
            inputs: inputs(&[("A", a.matrix()), ("B", b.matrix())]),
            params: params(&[("k", self.k), ("t", self.t), ("p", self.p), ("q", self.q)]),
        })
    }
}

/// Representative parameter points covering every theorem and both chain regimes.
pub fn default_points() -> Vec<LogMajCheck> {
    let pts: [(LogMajTheorem, f64, f64, f64); 11] = [
        (LogMajTheorem::Lmf, 0.3, 0.4, 1.5),
        (LogMajTheorem::Ah, 0.5, 0.3, 1.5),
        (LogMajTheorem::Ah, 0.5, 0.7, 1.5),
        (LogMajTheorem::Kah, 0.35, 0.5, 1.5),
        (LogMajTheorem::Lgf, 0.3, 0.4, 1.2),
        (LogMajTheorem::LmiChain, 0.3, 0.4, 1.5),
        (LogMajTheorem::LmiChain, 0.7, 0.6, 1.3),
        (LogMajTheorem::Gt36Refinement, 0.5, 0.3, 1.5),
        (LogMajTheorem::Gt36Refinement, 0.5, 0.7, 1.5),
        (LogMajTheorem::TildeChain, 0.3, 0.5, 1.5),
        (LogMajTheorem::TildeChain, 0.7, 0.5, 1.5),
    ];
    pts.iter().map(|&(th, k, t, p)| LogMajCheck::new(th, k, t, p, None).expect("valid default point")).collect()
}
