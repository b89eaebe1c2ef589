//! Randomized campaigns over the open problems: seeded trials, a mix of
//! sampling strategies, margin histograms, re-verification and local refinement.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    derive_seed, loewner_compare, random_hermitian, random_pd, random_unitary, seeded_rng, HermitianMatrix,
    LoewnerRelation, MatrixJson, PdMatrix, PsdMatrix, SpectrumSpec,
};
use crate::majorization::log_majorize;
use crate::means::{mean_apply, MeanSpec};
use crate::twobytwo::FamilyPoint;
use crate::verify::{run_indexed, AhQuery, Measured, ViolationRecord, DEFAULT_TOL};

pub const SCHEMA_VERSION: u32 = 1;

/// Strategy weights: random pairs, near-commuting pairs, pairs near the 2×2 family.
pub const STRATEGY_WEIGHTS: [f64; 3] = [0.5, 0.3, 0.2];

pub const NEAR_COMMUTING_EPS: f64 = 1e-3;

/// A trial is a violation when its margin falls below `-VIOLATION_FACTOR · tol`.
pub const VIOLATION_FACTOR: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CampaignTarget {
    /// `♮_t` with `min{t/(1-t), (1-t)/t} < q < 1`.
    AhGapNaturalT,
    /// Two-variable implication for `♮_t` with `r, s ∈ (0, 1]`.
    TwoVarAh,
    /// `~♮_k` with `k <= 1/2` and `2k < q < 1`.
    TildeGapSmallK,
    /// Löwner relation between `A ♮_t B` and `A ~♮_k B`.
    OrderNaturalVsTilde,
}

/// The inequality evaluated per trial, independent of any box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Objective {
    AhNatural,
    TwoVariable,
    AhTilde,
    Order,
}

impl CampaignTarget {
    pub fn objective(&self) -> Objective {
        match self {
            CampaignTarget::AhGapNaturalT => Objective::AhNatural,
            CampaignTarget::TwoVarAh => Objective::TwoVariable,
            CampaignTarget::TildeGapSmallK => Objective::AhTilde,
            CampaignTarget::OrderNaturalVsTilde => Objective::Order,
        }
    }
}

impl Objective {
    /// Continuous parameters the objective reads.
    pub fn parameters(&self) -> &'static [&'static str] {
        match self {
            Objective::AhNatural => &["t", "q"],
            Objective::TwoVariable => &["t", "r", "s"],
            Objective::AhTilde => &["k", "q"],
            Objective::Order => &["k", "t"],
        }
    }

    fn valid(&self, p: &BTreeMap<String, f64>) -> bool {
        let unit = |name: &str| p.get(name).is_some_and(|&v| v > 0.0 && v < 1.0);
        let pos = |name: &str| p.get(name).is_some_and(|&v| v > 0.0 && v.is_finite());
        match self {
            Objective::AhNatural => unit("t") && pos("q"),
            Objective::TwoVariable => unit("t") && pos("r") && pos("s"),
            Objective::AhTilde => unit("k") && pos("q"),
            Objective::Order => unit("k") && unit("t"),
        }
    }

    /// Signed margin; negative means the conjectured relation fails on this input.
    /// For the order objective it is the larger of the two Löwner margins
    /// relative to `‖A ~♮_k B‖`, so it is negative exactly for incomparable pairs.
    pub fn evaluate(&self, p: &BTreeMap<String, f64>, a: &PdMatrix<f64>, b: &PsdMatrix<f64>) -> Result<Evaluation> {
        if !self.valid(p) {
            return Err(Error::Range(format!("parameters {p:?} are outside the domain of {self:?}")));
        }
        let get = |name: &str| p[name];
        let ah =
            |query: AhQuery| -> Result<Evaluation> { Ok(Evaluation { measured: query.measure(a, b)?, order: None }) };
        match self {
            Objective::AhNatural => ah(AhQuery::new(MeanSpec::Natural { t: get("t") }, get("q"))?),
            Objective::TwoVariable => ah(AhQuery::two_variable(get("t"), get("r"), get("s"))?),
            Objective::AhTilde => ah(AhQuery::new(MeanSpec::Tilde { k: get("k") }, get("q"))?),
            Objective::Order => {
                let nat = mean_apply(&MeanSpec::Natural { t: get("t") }, a, b)?;
                let til = mean_apply(&MeanSpec::Tilde { k: get("k") }, a, b)?;
                let (rel, up, down) = loewner_compare(nat.hermitian(), til.hermitian(), DEFAULT_TOL)?;
                let scale = til.op_norm().max(nat.op_norm()).max(f64::MIN_POSITIVE);
                let margin = up.max(down) / scale;
                let tilde_below = log_majorize(&til, &nat, DEFAULT_TOL)?.weak_holds;
                let natural_below = log_majorize(&nat, &til, DEFAULT_TOL)?.weak_holds;
                Ok(Evaluation {
                    measured: Measured::new(margin, up / scale, down / scale),
                    order: Some(OrderObservation {
                        relation: rel,
                        tilde_below_log: tilde_below,
                        natural_below_log: natural_below,
                    }),
                })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderObservation {
    pub relation: LoewnerRelation,
    pub tilde_below_log: bool,
    pub natural_below_log: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub measured: Measured,
    pub order: Option<OrderObservation>,
}

/// Closed parameter ranges; absent ranges take the target's default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamBox {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<[usize; 2]>,
}

impl ParamBox {
    pub fn range(&self, name: &str) -> Option<[f64; 2]> {
        match name {
            "k" => self.k,
            "t" => self.t,
            "q" => self.q,
            "r" => self.r,
            "s" => self.s,
            _ => None,
        }
    }

    pub fn dims(&self) -> [usize; 2] {
        self.n.unwrap_or([2, 6])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Campaign {
    pub schema_version: u32,
    pub target: CampaignTarget,
    #[serde(rename = "box")]
    pub param_box: ParamBox,
    pub budget: usize,
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn check_range(name: &str, r: Option<[f64; 2]>, lo: f64, hi: f64, closed_hi: bool) -> Result<[f64; 2]> {
    let [a, b] = r.ok_or_else(|| Error::Campaign(format!("box is missing the range for {name}")))?;
    let hi_ok = if closed_hi { b <= hi } else { b < hi };
    if !(a.is_finite() && b.is_finite() && a <= b && a > lo && hi_ok) {
        return Err(Error::Campaign(format!(
            "{name} range [{a}, {b}] must lie in ({lo}, {hi}{}",
            if closed_hi { "]" } else { ")" }
        )));
    }
    Ok([a, b])
}

/// `max` of `min{t/(1-t), (1-t)/t}` over `[t0, t1]`; the function peaks at `t = 1/2`.
fn natural_threshold_max([t0, t1]: [f64; 2]) -> f64 {
    let f = |t: f64| (t / (1.0 - t)).min((1.0 - t) / t);
    if t0 <= 0.5 && 0.5 <= t1 {
        1.0
    } else {
        f(t0).max(f(t1))
    }
}

impl Campaign {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Campaign(format!(
                "schemaVersion {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.budget == 0 {
            return Err(Error::Campaign("budget must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Campaign(format!("tol = {} must be positive", self.tol)));
        }
        let [n0, n1] = self.param_box.dims();
        if !(2 <= n0 && n0 <= n1 && n1 <= 6) {
            return Err(Error::Campaign(format!("n range [{n0}, {n1}] must lie in [2, 6]")));
        }
        let b = &self.param_box;
        match self.target {
            CampaignTarget::AhGapNaturalT => {
                let t = check_range("t", b.t, 0.0, 1.0, false)?;
                let q = check_range("q", b.q, 0.0, 1.0, false)?;
                let floor = natural_threshold_max(t);
                if q[0] <= floor {
                    return Err(Error::Campaign(format!(
                        "q range starts at {} but the proven region reaches q = {floor:.6} on this t range",
                        q[0]
                    )));
                }
            }
            CampaignTarget::TwoVarAh => {
                check_range("t", b.t, 0.0, 1.0, false)?;
                check_range("r", b.r, 0.0, 1.0, true)?;
                check_range("s", b.s, 0.0, 1.0, true)?;
            }
            CampaignTarget::TildeGapSmallK => {
                let k = check_range("k", b.k, 0.0, 0.5, true)?;
                let q = check_range("q", b.q, 0.0, 1.0, false)?;
                if q[0] < 2.0 * k[1] {
                    return Err(Error::Campaign(format!("q range must start at or above 2·k_max = {}", 2.0 * k[1])));
                }
            }
            CampaignTarget::OrderNaturalVsTilde => {
                check_range("t", b.t, 0.0, 1.0, false)?;
                if b.k.is_some() {
                    check_range("k", b.k, 0.0, 1.0, false)?;
                }
            }
        }
        Ok(())
    }

    fn sample_params(&self, rng: &mut impl Rng) -> BTreeMap<String, f64> {
        let mut p = BTreeMap::new();
        for &name in self.target.objective().parameters() {
            let v = match self.param_box.range(name) {
                Some([lo, hi]) if hi > lo => rng.random_range(lo..=hi),
                Some([lo, _]) => lo,
                // the order target ties k to t when no k range is given
                None => f64::NAN,
            };
            p.insert(name.to_string(), v);
        }
        if self.target == CampaignTarget::OrderNaturalVsTilde && p["k"].is_nan() {
            p.insert("k".into(), p["t"]);
        }
        p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Random,
    NearCommuting,
    FamilyAdjacent,
}

impl Strategy {
    fn pick(u: f64) -> Self {
        if u < STRATEGY_WEIGHTS[0] {
            Strategy::Random
        } else if u < STRATEGY_WEIGHTS[0] + STRATEGY_WEIGHTS[1] {
            Strategy::NearCommuting
        } else {
            Strategy::FamilyAdjacent
        }
    }

    fn code(&self) -> f64 {
        match self {
            Strategy::Random => 0.0,
            Strategy::NearCommuting => 1.0,
            Strategy::FamilyAdjacent => 2.0,
        }
    }
}

fn with_basis(u: &crate::linalg::CMatrix<f64>, values: &[f64]) -> Result<HermitianMatrix<f64>> {
    HermitianMatrix::from_diagonal(values)?.adjoint_congruence(&u.adjoint())
}

fn sample_pair(strategy: Strategy, n: usize, rng: &mut impl Rng) -> Result<(PdMatrix<f64>, PsdMatrix<f64>)> {
    let spread = SpectrumSpec::default();
    match strategy {
        Strategy::Random => Ok((random_pd(n, spread, rng), random_pd(n, spread, rng).into_psd())),
        Strategy::NearCommuting => {
            let u = random_unitary(n, rng);
            let da: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0f64).exp()).collect();
            let db: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0f64).exp()).collect();
            let a = PdMatrix::new(with_basis(&u, &da)?)?;
            let noise = random_hermitian::<f64, _>(n, 1.0, rng);
            let noise = noise.scale(NEAR_COMMUTING_EPS / noise.op_norm()?.max(f64::MIN_POSITIVE));
            let b = PdMatrix::new(with_basis(&u, &db)?.add(&noise)?)?;
            Ok((a, b.into_psd()))
        }
        Strategy::FamilyAdjacent => {
            let y = 10f64.powf(rng.random_range(-4.0..=2.0));
            let a0: PdMatrix<f64> = FamilyPoint::new(1.0, y)?.matrix()?;
            let noise = random_hermitian::<f64, _>(2, 1.0, rng);
            let noise = noise.scale(NEAR_COMMUTING_EPS * a0.min_eig() / noise.op_norm()?.max(f64::MIN_POSITIVE));
            let a = PdMatrix::new(a0.hermitian().add(&noise)?)?;
            let delta = 10f64.powf(rng.random_range(-8.0..=-2.0));
            let tilt = rng.random_range(-NEAR_COMMUTING_EPS..=NEAR_COMMUTING_EPS);
            let (c, s) = (tilt.cos(), tilt.sin());
            let rot = crate::linalg::CMatrix::<f64>::from_row_slice(2, 2, &[c.into(), (-s).into(), s.into(), c.into()]);
            let b = PsdMatrix::new(with_basis(&rot, &[1.0, delta])?)?;
            Ok((a, b))
        }
    }
}

/// Labelled margin counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub range: String,
    pub count: usize,
}

const BIN_EDGES: [f64; 7] = [-1e-3, -1e-6, -1e-9, 0.0, 1e-9, 1e-6, 1e-3];

fn bin_labels() -> Vec<String> {
    let mut labels = vec![format!("(-inf, {:e})", BIN_EDGES[0])];
    for w in BIN_EDGES.windows(2) {
        labels.push(format!("[{:e}, {:e})", w[0], w[1]));
    }
    labels.push(format!("[{:e}, inf)", BIN_EDGES[BIN_EDGES.len() - 1]));
    labels
}

pub fn histogram(margins: &[f64]) -> Vec<HistogramBin> {
    let mut counts = vec![0usize; BIN_EDGES.len() + 1];
    for &m in margins {
        let idx = BIN_EDGES.iter().position(|&e| m < e).unwrap_or(BIN_EDGES.len());
        counts[idx] += 1;
    }
    bin_labels().into_iter().zip(counts).map(|(range, count)| HistogramBin { range, count }).collect()
}

/// Frequencies of the Löwner relation and of the log-majorization direction.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderCounts {
    pub natural_below_tilde: usize,
    pub natural_above_tilde: usize,
    pub equal: usize,
    pub incomparable: usize,
    pub tilde_log_below_natural: usize,
    pub natural_log_below_tilde: usize,
    pub log_incomparable: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CampaignResult {
    pub schema_version: u32,
    pub target: CampaignTarget,
    pub budget: usize,
    pub trials_run: usize,
    pub completed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
    /// Smallest margin observed.
    pub best_margin: f64,
    /// The trial that achieved `best_margin`.
    pub closest: Option<ViolationRecord>,
    pub violations: Vec<ViolationRecord>,
    pub histogram: Vec<HistogramBin>,
    pub strategies: BTreeMap<Strategy, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<OrderCounts>,
}

impl CampaignResult {
    pub fn found_violation(&self) -> bool {
        !self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        let verdict = if self.found_violation() {
            format!("violation found ({} records)", self.violations.len())
        } else {
            "no violation found".to_string()
        };
        format!(
            "{:?}: {} of {} trials, best margin {:+.3e}, {verdict}{}",
            self.target,
            self.trials_run,
            self.budget,
            self.best_margin,
            if self.completed { "" } else { " (aborted)" }
        )
    }
}

struct TrialResult {
    record: ViolationRecord,
    strategy: Strategy,
    order: Option<OrderObservation>,
}

fn record_for(
    seed: u64,
    trial: u64,
    a: &PdMatrix<f64>,
    b: &PsdMatrix<f64>,
    params: BTreeMap<String, f64>,
    m: &Measured,
) -> ViolationRecord {
    let inputs = [
        ("A".to_string(), MatrixJson::from_matrix(a.matrix())),
        ("B".to_string(), MatrixJson::from_matrix(b.matrix())),
    ]
    .into();
    ViolationRecord { seed, trial, n: a.dim(), inputs, params, lhs: m.lhs, rhs: m.rhs, margin: m.margin }
}

fn run_trial(c: &Campaign, trial: u64) -> Result<TrialResult> {
    let seed = derive_seed(c.base_seed, trial);
    let mut rng = seeded_rng(seed);
    let strategy = Strategy::pick(rng.random::<f64>());
    let [n0, n1] = c.param_box.dims();
    let n = if strategy == Strategy::FamilyAdjacent { 2 } else { rng.random_range(n0..=n1) };
    let mut params = c.sample_params(&mut rng);
    let (a, b) = sample_pair(strategy, n, &mut rng)?;
    let eval = c.target.objective().evaluate(&params, &a, &b)?;
    params.insert("strategy".into(), strategy.code());
    Ok(TrialResult { record: record_for(seed, trial, &a, &b, params, &eval.measured), strategy, order: eval.order })
}

/// Runs every trial of a campaign (in parallel, merged in trial order) and
/// persists the result when the campaign names an output path.
pub fn run_campaign(c: &Campaign) -> Result<CampaignResult> {
    run_campaign_with_jobs(c, None)
}

pub fn run_campaign_with_jobs(c: &Campaign, jobs: Option<usize>) -> Result<CampaignResult> {
    c.validate()?;
    let outcomes = run_indexed(c.budget, jobs, |trial| Ok(run_trial(c, trial)))?;
    let threshold = -VIOLATION_FACTOR * c.tol;
    let mut margins = Vec::with_capacity(c.budget);
    let mut violations = Vec::new();
    let mut closest: Option<ViolationRecord> = None;
    let mut strategies = BTreeMap::new();
    let mut order = (c.target == CampaignTarget::OrderNaturalVsTilde).then(OrderCounts::default);
    let mut aborted = None;
    for outcome in outcomes {
        let tr = match outcome {
            Ok(tr) => tr,
            Err(e) => {
                aborted = Some(format!("trial {} failed: {e}", margins.len()));
                break;
            }
        };
        let m = tr.record.margin;
        margins.push(m);
        *strategies.entry(tr.strategy).or_insert(0) += 1;
        if let (Some(counts), Some(o)) = (order.as_mut(), tr.order) {
            match o.relation {
                LoewnerRelation::Less => counts.natural_below_tilde += 1,
                LoewnerRelation::Greater => counts.natural_above_tilde += 1,
                LoewnerRelation::Equal => counts.equal += 1,
                LoewnerRelation::Incomparable => counts.incomparable += 1,
            }
            match (o.tilde_below_log, o.natural_below_log) {
                (true, false) => counts.tilde_log_below_natural += 1,
                (false, true) => counts.natural_log_below_tilde += 1,
                (true, true) => {
                    counts.tilde_log_below_natural += 1;
                    counts.natural_log_below_tilde += 1;
                }
                (false, false) => counts.log_incomparable += 1,
            }
        }
        if closest.as_ref().is_none_or(|b| m < b.margin) {
            closest = Some(tr.record.clone());
        }
        if m < threshold {
            violations.push(tr.record);
        }
    }
    let result = CampaignResult {
        schema_version: SCHEMA_VERSION,
        target: c.target,
        budget: c.budget,
        trials_run: margins.len(),
        completed: aborted.is_none(),
        aborted,
        best_margin: margins.iter().copied().fold(f64::INFINITY, f64::min),
        closest,
        violations,
        histogram: histogram(&margins),
        strategies,
        order,
    };
    if let Some(path) = &c.output_path {
        write_json(path, &result)?;
    }
    Ok(result)
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn record_inputs(v: &ViolationRecord) -> Result<(PdMatrix<f64>, PsdMatrix<f64>)> {
    let get = |name: &str| {
        v.inputs
            .get(name)
            .ok_or_else(|| Error::Campaign(format!("record has no input {name}")))
            .and_then(|m| HermitianMatrix::from_matrix(m.to_matrix::<f64>()?))
    };
    Ok((PdMatrix::new(get("A")?)?, PsdMatrix::new(get("B")?)?))
}

/// Recomputes a record's margin from its stored inputs and parameters.
pub fn reverify(objective: Objective, v: &ViolationRecord) -> Result<Measured> {
    let (a, b) = record_inputs(v)?;
    Ok(objective.evaluate(&v.params, &a, &b)?.measured)
}

/// Coordinate descent over the record's continuous parameters and a seeded
/// matrix perturbation, accepting only strictly smaller margins. Parameters
/// stay inside `param_box` when one is given.
pub fn refine_witness(
    objective: Objective,
    param_box: Option<&ParamBox>,
    v: &ViolationRecord,
    steps: usize,
) -> Result<ViolationRecord> {
    if steps == 0 {
        return Ok(v.clone());
    }
    let (mut a, b) = record_inputs(v)?;
    let mut params = v.params.clone();
    let mut best = objective.evaluate(&params, &a, &b)?.measured;
    let mut scale: BTreeMap<&str, f64> = objective
        .parameters()
        .iter()
        .map(|&name| {
            let width = param_box.and_then(|bx| bx.range(name)).map(|[lo, hi]| hi - lo).unwrap_or(0.0);
            (name, if width > 0.0 { 0.25 * width } else { 0.05 * params.get(name).copied().unwrap_or(1.0).abs() })
        })
        .collect();
    let mut perturb = 1e-2;
    let clamp = |name: &str, x: f64| match param_box.and_then(|bx| bx.range(name)) {
        Some([lo, hi]) => x.clamp(lo, hi),
        None => x,
    };
    // without a k range the order target ties k to t
    let tied = objective == Objective::Order && param_box.is_some_and(|bx| bx.k.is_none());
    for step in 0..steps {
        for &name in objective.parameters() {
            if tied && name == "k" {
                continue;
            }
            let h = scale[name];
            let mut improved = false;
            for dir in [1.0, -1.0] {
                let mut trial = params.clone();
                let x = clamp(name, params[name] + dir * h);
                if x == params[name] {
                    continue;
                }
                trial.insert(name.to_string(), x);
                if tied {
                    trial.insert("k".into(), trial["t"]);
                }
                if let Ok(e) = objective.evaluate(&trial, &a, &b) {
                    if e.measured.margin < best.margin {
                        best = e.measured;
                        params = trial;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                scale.insert(name, h * 0.5);
            }
        }
        let mut rng = seeded_rng(derive_seed(v.seed, step as u64));
        let n = a.dim();
        let noise = random_hermitian::<f64, _>(n, 1.0, &mut rng);
        let noise = noise.scale(perturb * a.min_eig() / noise.op_norm()?.max(f64::MIN_POSITIVE));
        if let Ok(candidate) = a.hermitian().add(&noise).and_then(PdMatrix::new) {
            match objective.evaluate(&params, &candidate, &b) {
                Ok(e) if e.measured.margin < best.margin => {
                    best = e.measured;
                    a = candidate;
                }
                _ => perturb *= 0.5,
            }
        }
    }
    let mut out = record_for(v.seed, v.trial, &a, &b, params, &best);
    out.n = v.n;
    Ok(out)
}
