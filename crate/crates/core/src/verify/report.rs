//! Reports, violation records and the parallel trial engine shared by all checkers.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{derive_seed, seeded_rng, MatrixJson};

/// Default relative tolerance on margins.
pub const DEFAULT_TOL: f64 = 1e-9;

/// One discovered violation, replayable from `seed` and `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub seed: u64,
    pub trial: u64,
    pub n: usize,
    pub inputs: BTreeMap<String, MatrixJson>,
    pub params: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Outcome of one named check over a batch of trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub check: String,
    pub params: Value,
    pub trials: usize,
    pub worst_margin: f64,
    pub violations: Vec<ViolationRecord>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn tolerance(&self) -> f64 {
        self.params.get("tol").and_then(Value::as_f64).unwrap_or(DEFAULT_TOL)
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{:<40} trials {:>6}  worst margin {:>+.3e}  violations {}",
            self.check,
            self.trials,
            self.worst_margin,
            self.violations.len()
        )
    }
}

/// One measured inequality inside a trial. `margin < -tol` is a violation.
#[derive(Clone, Debug, PartialEq)]
pub struct Measured {
    pub margin: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl Measured {
    pub fn new(margin: f64, lhs: f64, rhs: f64) -> Self {
        Self { margin, lhs, rhs }
    }

    /// Residual-style measurement: margin `-residual`.
    pub fn residual(r: f64) -> Self {
        Self { margin: -r, lhs: r, rhs: 0.0 }
    }
}

/// Everything a trial produced: one measurement per component plus the
/// inputs and sampled parameters needed to reproduce it.
#[derive(Clone, Debug, Default)]
pub struct TrialOutcome {
    pub measured: Vec<Measured>,
    pub inputs: BTreeMap<String, MatrixJson>,
    pub params: BTreeMap<String, f64>,
}

/// Settings shared by every checker run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunSettings {
    pub trials: usize,
    pub seed: u64,
    /// Dimensions cycled over the trials.
    pub dims: Vec<usize>,
    pub tol: f64,
    /// Worker cap; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self { trials: 500, seed: 0, dims: (2..=6).collect(), tol: DEFAULT_TOL, jobs: None }
    }
}

impl RunSettings {
    pub fn dim_for(&self, trial: u64) -> usize {
        if self.dims.is_empty() {
            2
        } else {
            self.dims[(trial % self.dims.len() as u64) as usize]
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_dims(mut self, dims: Vec<usize>) -> Self {
        self.dims = dims;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// A randomized inequality check. Trials must depend only on `(seed, n)`.
pub trait TrialCheck: Sync {
    fn name(&self) -> String;

    fn params(&self) -> BTreeMap<String, Value>;

    /// Names of the measured components; one report is produced per component.
    fn components(&self) -> Vec<String> {
        vec![String::new()]
    }

    /// Tolerance for component `i` given the run tolerance.
    fn tolerance(&self, _component: usize, base: f64) -> f64 {
        base
    }

    fn run_trial(&self, rng: &mut ChaCha8Rng, n: usize) -> Result<TrialOutcome>;
}

fn with_pool<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::Campaign(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Runs `trials` indexed jobs in parallel and returns results in index order.
pub fn run_indexed<R: Send>(
    trials: usize,
    jobs: Option<usize>,
    f: impl Fn(u64) -> Result<R> + Sync + Send,
) -> Result<Vec<R>> {
    with_pool(jobs, || (0..trials as u64).into_par_iter().map(&f).collect::<Result<Vec<R>>>())?
}

pub fn component_name(check_name: &str, names: &[String], i: usize) -> String {
    if names.len() == 1 && names[0].is_empty() {
        check_name.to_string()
    } else {
        format!("{check_name}/{}", names[i])
    }
}

/// Runs a check and returns one report per component.
pub fn run_check<C: TrialCheck + ?Sized>(check: &C, settings: &RunSettings) -> Result<Vec<CheckReport>> {
    let start = Instant::now();
    let names = check.components();
    let outcomes = run_indexed(settings.trials, settings.jobs, |trial| {
        let seed = derive_seed(settings.seed, trial);
        let n = settings.dim_for(trial);
        let mut rng = seeded_rng(seed);
        let out = check.run_trial(&mut rng, n)?;
        if out.measured.len() != names.len() {
            return Err(Error::Spec(format!(
                "{} produced {} measurements for {} components",
                check.name(),
                out.measured.len(),
                names.len()
            )));
        }
        Ok((trial, seed, n, out))
    })?;
    let elapsed = start.elapsed();
    let mut base_params = check.params();
    let mut reports = Vec::with_capacity(names.len());
    for (i, _) in names.iter().enumerate() {
        let tol = check.tolerance(i, settings.tol);
        base_params.insert("tol".into(), Value::from(tol));
        base_params.insert("seed".into(), Value::from(settings.seed));
        let mut worst = f64::INFINITY;
        let mut violations = Vec::new();
        for (trial, seed, n, out) in &outcomes {
            let m = &out.measured[i];
            let margin = if m.margin.is_nan() { f64::NEG_INFINITY } else { m.margin };
            worst = worst.min(margin);
            if margin < -tol {
                violations.push(ViolationRecord {
                    seed: *seed,
                    trial: *trial,
                    n: *n,
                    inputs: out.inputs.clone(),
                    params: out.params.clone(),
                    lhs: m.lhs,
                    rhs: m.rhs,
                    margin: m.margin,
                });
            }
        }
        reports.push(CheckReport {
            check: component_name(&check.name(), &names, i),
            params: Value::Object(base_params.clone().into_iter().collect()),
            trials: outcomes.len(),
            worst_margin: if outcomes.is_empty() { 0.0 } else { worst },
            violations,
            elapsed,
        });
    }
    Ok(reports)
}

/// Runs a single-component check.
pub fn run_single<C: TrialCheck + ?Sized>(check: &C, settings: &RunSettings) -> Result<CheckReport> {
    run_check(check, settings)?.into_iter().next().ok_or_else(|| Error::Spec("check has no components".into()))
}

/// Re-runs the trial behind `record` and returns its measurements.
pub fn replay<C: TrialCheck + ?Sized>(check: &C, record: &ViolationRecord) -> Result<Vec<Measured>> {
    let mut rng = seeded_rng(record.seed);
    Ok(check.run_trial(&mut rng, record.n)?.measured)
}

/// A report built from deterministic measurements (no random trials).
pub fn report_from_measurements(
    check: String,
    params: BTreeMap<String, Value>,
    tol: f64,
    items: Vec<(TrialOutcome, usize)>,
) -> CheckReport {
    let mut params = params;
    params.insert("tol".into(), Value::from(tol));
    let mut worst = f64::INFINITY;
    let mut violations = Vec::new();
    for (trial, (out, n)) in items.iter().enumerate() {
        for m in &out.measured {
            worst = worst.min(m.margin);
            if m.margin < -tol {
                violations.push(ViolationRecord {
                    seed: 0,
                    trial: trial as u64,
                    n: *n,
                    inputs: out.inputs.clone(),
                    params: out.params.clone(),
                    lhs: m.lhs,
                    rhs: m.rhs,
                    margin: m.margin,
                });
            }
        }
    }
    CheckReport {
        check,
        params: Value::Object(params.into_iter().collect()),
        trials: items.len(),
        worst_margin: if items.is_empty() { 0.0 } else { worst },
        violations,
        elapsed: Duration::ZERO,
    }
}

/// `{"name": value}` helper for parameter maps.
pub fn params_of(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}
