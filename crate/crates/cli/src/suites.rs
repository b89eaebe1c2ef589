//! Turns a suite name and its flags into checker runs.

use mml_core::linalg::{HermitianMatrix, MatrixJson, PdMatrix, PsdMatrix};
use mml_core::means::{ah_threshold, MeanSpec, ScalarMonotoneFn};
use mml_core::twobytwo::{default_y_grid, FamilyPoint};
use mml_core::verify::{
    alt_necessity_report, default_points, fkt_necessity_report, run_check, two_variable_necessity_report, AhCheck,
    AhInputs, AhQuery, AltDominanceCheck, CheckReport, DeterminantCheck, EqSeeCheck, GrandFurutaCheck, KtChoice,
    LieTrotterCheck, LogMajCheck, LogMajTheorem, NormSequenceCheck, Prop22Check, RiccatiCheck, RunSettings,
    SimilarityCheck, SpectralCheck, TrialCheck, UabCheck, UabVariant, DEFAULT_TOL,
};

use crate::config::{Family, Flags, MeanKind, QArg, Suite};
use crate::error::{config_error, CliResult};

pub const DEFAULT_TRIALS: usize = 500;

/// One unit of work: a randomized check or an already computed report.
pub enum Job {
    Trials(Box<dyn TrialCheck>, RunSettings),
    Fixed(CheckReport),
}

impl Job {
    pub fn run(self) -> CliResult<Vec<CheckReport>> {
        match self {
            Job::Trials(check, settings) => Ok(run_check(check.as_ref(), &settings)?),
            Job::Fixed(report) => Ok(vec![report]),
        }
    }
}

const GENERAL: [&str; 7] = ["n", "trials", "seed", "tol", "format", "out", "jobs"];

fn set_flags(f: &Flags) -> Vec<&'static str> {
    let mut v = Vec::new();
    let mut push = |on: bool, name| {
        if on {
            v.push(name)
        }
    };
    push(f.k.is_some(), "k");
    push(f.t.is_some(), "t");
    push(f.l.is_some(), "l");
    push(f.q.is_some(), "q");
    push(f.r.is_some(), "r");
    push(f.s.is_some(), "s");
    push(f.mean.is_some(), "mean");
    push(f.a_file.is_some(), "a-file");
    push(f.b_file.is_some(), "b-file");
    push(f.family.is_some(), "family");
    push(f.x.is_some(), "x");
    push(f.y.is_some(), "y");
    push(f.p.is_some(), "p");
    push(f.m.is_some(), "m");
    push(f.theorem.is_some(), "theorem");
    v
}

fn only(f: &Flags, what: &str, allowed: &[&str]) -> CliResult<()> {
    for name in set_flags(f) {
        if !allowed.contains(&name) && !GENERAL.contains(&name) {
            return config_error(format!("--{name} is not used by {what}"));
        }
    }
    Ok(())
}

/// Settings from the general flags with a suite-specific default dimension list.
pub fn settings(f: &Flags, default_dims: &[usize]) -> CliResult<RunSettings> {
    let trials = f.trials.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return config_error("--trials must be at least 1");
    }
    let dims = match f.n {
        Some(n) if (2..=6).contains(&n) => vec![n],
        Some(n) => return config_error(format!("--n {n} is outside 2..=6")),
        None => default_dims.to_vec(),
    };
    let tol = f.tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return config_error(format!("--tol {tol} must be positive"));
    }
    if f.jobs == Some(0) {
        return config_error("--jobs must be at least 1");
    }
    Ok(RunSettings { trials, seed: f.seed, dims, tol, jobs: f.jobs })
}

const ALL_DIMS: [usize; 5] = [2, 3, 4, 5, 6];

fn kt_choice(f: &Flags) -> CliResult<KtChoice> {
    match (f.k, f.t) {
        (Some(k), Some(t)) => Ok(KtChoice::fixed(k, t)?),
        (None, None) => Ok(KtChoice::sampled()),
        _ => config_error("--k and --t must be given together"),
    }
}

fn trials(check: impl TrialCheck + 'static, s: &RunSettings) -> Job {
    Job::Trials(Box::new(check), s.clone())
}

pub fn build(suite: Suite, f: &Flags) -> CliResult<Vec<Job>> {
    match suite {
        Suite::Prop22 => {
            only(f, "prop22", &["k", "t"])?;
            Ok(vec![trials(Prop22Check { kt: kt_choice(f)? }, &settings(f, &ALL_DIMS)?)])
        }
        Suite::Riccati => {
            only(f, "riccati", &["k", "t"])?;
            let s = settings(f, &ALL_DIMS)?;
            let points = match (f.k, f.t) {
                (None, None) => vec![(0.25, 0.25), (0.5, 0.5), (0.3, 0.7), (0.8, 0.2), (0.9, 0.9)],
                _ => vec![kt_choice(f)?.0.expect("fixed")],
            };
            points.into_iter().map(|(k, t)| Ok(trials(RiccatiCheck { kt: KtChoice::fixed(k, t)? }, &s))).collect()
        }
        Suite::Similarity => {
            only(f, "similarity", &["k", "t"])?;
            let s = settings(f, &ALL_DIMS)?;
            Ok(vec![trials(SimilarityCheck { kt: kt_choice(f)? }, &s), trials(SpectralCheck, &s)])
        }
        Suite::Ah => ah_jobs(f),
        Suite::TwoVarAh => two_var_jobs(f),
        Suite::GrandFuruta => {
            only(f, "grand-furuta", &[])?;
            Ok(vec![trials(GrandFurutaCheck, &settings(f, &ALL_DIMS)?)])
        }
        Suite::EqSee => {
            only(f, "eq-see", &["k", "t"])?;
            let check = EqSeeCheck::new(f.k.unwrap_or(0.25), f.t.unwrap_or(0.25))?;
            Ok(vec![trials(check, &settings(f, &ALL_DIMS)?)])
        }
        Suite::LogMaj => log_maj_jobs(f),
        Suite::LieTrotter => {
            only(f, "lie-trotter", &["k", "t", "p"])?;
            let p_grid = match f.p {
                Some(p) if p > 0.0 => (0..4).map(|i| p / 2f64.powi(i)).collect(),
                Some(p) => return config_error(format!("--p {p} must be positive")),
                None => mml_core::verify::default_p_grid(),
            };
            let (k, t) = (f.k.unwrap_or(0.25), f.t.unwrap_or(0.5));
            if !(k > 0.0 && k < 1.0 && t > 0.0 && t < 1.0) {
                return config_error(format!("k, t must lie in (0, 1); got k = {k}, t = {t}"));
            }
            Ok(vec![trials(LieTrotterCheck { k, t, p_grid }, &settings(f, &[3])?)])
        }
        Suite::Norms => {
            only(f, "norms", &["k", "t", "p", "m"])?;
            let s = settings(f, &ALL_DIMS)?;
            let seq = NormSequenceCheck::new(
                f.k.unwrap_or(0.25),
                f.t.unwrap_or(0.25),
                f.p.unwrap_or(2.0),
                f.m.unwrap_or(6),
                None,
            )?;
            let mut jobs = vec![trials(seq, &s)];
            let ts = f.t.map(|t| vec![t]).unwrap_or_else(|| vec![0.3, 0.7]);
            for t in ts {
                for variant in [UabVariant::Natural, UabVariant::Tilde] {
                    jobs.push(trials(UabCheck::new(t, 1.5, variant)?, &s));
                }
            }
            Ok(jobs)
        }
        Suite::Alternative => {
            only(f, "alternative", &["t"])?;
            let s = settings(f, &ALL_DIMS)?;
            let ts = f.t.map(|t| vec![t]).unwrap_or_else(|| (1..=9).map(|i| i as f64 / 10.0).collect());
            ts.into_iter().map(|t| Ok(trials(AltDominanceCheck::power_vs_affine(t)?, &s))).collect()
        }
        Suite::All => {
            only(f, "all", &[])?;
            let mut jobs = Vec::new();
            for suite in [
                Suite::Prop22,
                Suite::Riccati,
                Suite::Similarity,
                Suite::Ah,
                Suite::TwoVarAh,
                Suite::GrandFuruta,
                Suite::EqSee,
                Suite::LogMaj,
                Suite::LieTrotter,
                Suite::Norms,
                Suite::Alternative,
            ] {
                jobs.extend(build(suite, f)?);
            }
            Ok(jobs)
        }
    }
}

fn mean_spec(f: &Flags) -> CliResult<Option<MeanSpec>> {
    let need = |v: Option<f64>, name: &str, kind: &str| match v {
        Some(v) => Ok(v),
        None => config_error(format!("--mean {kind} needs --{name}")),
    };
    let forbid = |present: bool, name: &str, kind: &str| {
        if present {
            config_error(format!("--{name} is not a parameter of --mean {kind}"))
        } else {
            Ok(())
        }
    };
    let spec = match f.mean {
        None => {
            forbid(f.l.is_some(), "l", "fkt")?;
            match (f.k, f.t) {
                (None, None) => return Ok(None),
                (Some(k), Some(t)) => MeanSpec::Fkt { k, t },
                _ => return config_error("--k and --t must be given together"),
            }
        }
        Some(MeanKind::Fkt) => {
            forbid(f.l.is_some(), "l", "fkt")?;
            MeanSpec::Fkt { k: need(f.k, "k", "fkt")?, t: need(f.t, "t", "fkt")? }
        }
        Some(MeanKind::Fktl) => {
            MeanSpec::Fktl { k: need(f.k, "k", "fktl")?, t: need(f.t, "t", "fktl")?, l: need(f.l, "l", "fktl")? }
        }
        Some(MeanKind::Tilde) => {
            forbid(f.t.is_some() || f.l.is_some(), "t/--l", "tilde")?;
            MeanSpec::Tilde { k: need(f.k, "k", "tilde")? }
        }
        Some(kind) => {
            let name = match kind {
                MeanKind::Geom => "geom",
                MeanKind::Natural => "natural",
                MeanKind::Wasserstein => "wasserstein",
                MeanKind::AltPower => "alt-power",
                _ => "alt-affine",
            };
            forbid(f.k.is_some() || f.l.is_some(), "k/--l", name)?;
            // ♮ without --t runs the t = 1/2 family of exponents
            let t = match (kind, f.t) {
                (MeanKind::Natural, None) => 0.5,
                _ => need(f.t, "t", name)?,
            };
            match kind {
                MeanKind::Geom => MeanSpec::Geom { t },
                MeanKind::Natural => MeanSpec::Natural { t },
                MeanKind::Wasserstein => MeanSpec::Wasserstein { t },
                MeanKind::AltPower => MeanSpec::Alternative { f: ScalarMonotoneFn::Power { t } },
                _ => MeanSpec::Alternative { f: ScalarMonotoneFn::Affine { t } },
            }
        }
    };
    spec.validate()?;
    Ok(Some(spec))
}

/// The proven Ando–Hiai exponent for `spec`, where one is known.
pub fn auto_q(spec: &MeanSpec) -> CliResult<f64> {
    match *spec {
        MeanSpec::Natural { t } => Ok((t / (1.0 - t)).min((1.0 - t) / t)),
        MeanSpec::Fkt { k, t } if k <= 0.5 && t <= 0.5 => Ok(ah_threshold(k, t)),
        MeanSpec::Tilde { k } if k <= 0.5 => Ok(2.0 * k),
        _ => config_error(format!("--q auto has no proven threshold for {}; pass a number", spec.label())),
    }
}

fn read_pair(f: &Flags) -> CliResult<Option<(PdMatrix<f64>, PsdMatrix<f64>)>> {
    match (&f.a_file, &f.b_file) {
        (None, None) => Ok(None),
        (Some(a), Some(b)) => {
            let read = |p| -> CliResult<HermitianMatrix<f64>> {
                Ok(HermitianMatrix::from_matrix(MatrixJson::read(p)?.to_matrix()?)?)
            };
            let a = PdMatrix::new(read(a)?)?;
            let b = PsdMatrix::new(read(b)?)?;
            if a.dim() != b.dim() {
                return config_error(format!("matrix files have dimensions {} and {}", a.dim(), b.dim()));
            }
            Ok(Some((a, b)))
        }
        _ => config_error("--a-file and --b-file must be given together"),
    }
}

/// Inputs from files, the 2×2 family, or random sampling, with matching settings.
fn ah_inputs(f: &Flags, s: RunSettings) -> CliResult<(AhInputs, RunSettings)> {
    let files = read_pair(f)?;
    if f.family.is_none() && (f.x.is_some() || f.y.is_some()) {
        return config_error("--x/--y need --family 2x2");
    }
    match (files, f.family) {
        (Some(_), Some(_)) => config_error("--family and matrix files are exclusive"),
        (Some((a, b)), None) => {
            if f.n.is_some_and(|n| n != a.dim()) {
                return config_error("--n disagrees with the matrix files");
            }
            let s = RunSettings { dims: vec![a.dim()], ..s };
            Ok((AhInputs::Fixed { a, b }, s))
        }
        (None, Some(Family::Point)) => {
            if f.n.is_some_and(|n| n != 2) {
                return config_error("--family 2x2 is two-dimensional");
            }
            let pt = FamilyPoint::new(f.x.unwrap_or(1.0), f.y.unwrap_or(4.0))?;
            Ok((AhInputs::Family(pt), RunSettings { dims: vec![2], ..s }))
        }
        (None, Some(Family::Scan)) => unreachable!("scans are handled by the caller"),
        (None, None) => Ok((AhInputs::Random, s)),
    }
}

fn q_value(f: &Flags, spec: &MeanSpec) -> CliResult<f64> {
    match f.q.unwrap_or(QArg::Auto) {
        QArg::Auto => auto_q(spec),
        QArg::Value(q) if q > 0.0 && q.is_finite() => Ok(q),
        QArg::Value(q) => config_error(format!("--q {q} must be positive")),
    }
}

fn ah_jobs(f: &Flags) -> CliResult<Vec<Job>> {
    only(f, "ah", &["k", "t", "l", "q", "mean", "a-file", "b-file", "family", "x", "y"])?;
    let s = settings(f, &ALL_DIMS)?;
    let spec = mean_spec(f)?;
    if f.family == Some(Family::Scan) {
        if f.x.is_some() || f.y.is_some() {
            return config_error("--family 2x2-scan fixes x = 1 and scans y");
        }
        let spec = spec.unwrap_or(MeanSpec::Natural { t: 0.5 });
        let q = match f.q {
            Some(QArg::Value(q)) if q > 0.0 => q,
            _ => return config_error("--family 2x2-scan needs a numeric --q"),
        };
        let grid = default_y_grid();
        let report = match spec {
            MeanSpec::Alternative { f: func } => alt_necessity_report(&func, &[q], &grid, s.tol)?,
            MeanSpec::Wasserstein { t } => alt_necessity_report(&ScalarMonotoneFn::Affine { t }, &[q], &grid, s.tol)?,
            MeanSpec::Natural { .. } | MeanSpec::Tilde { .. } | MeanSpec::Fkt { .. } => {
                let (k, t, _) = spec.ktl().expect("F-family member");
                fkt_necessity_report(k, t, &[q], &grid, s.tol)?
            }
            _ => return config_error(format!("no 2x2 scan for {}", spec.label())),
        };
        return Ok(vec![Job::Fixed(report)]);
    }
    let (inputs, s) = ah_inputs(f, s)?;
    let queries: Vec<AhQuery> = match spec {
        Some(spec @ MeanSpec::Natural { .. }) if f.t.is_none() && f.q.is_none() => {
            (1..=10).map(|i| AhQuery::new(spec, i as f64 / 10.0)).collect::<Result<_, _>>()?
        }
        Some(spec) => vec![AhQuery::new(spec, q_value(f, &spec)?)?],
        None => {
            let mut v = Vec::new();
            for k in [0.1, 0.3, 0.5] {
                for t in [0.1, 0.3, 0.5] {
                    let spec = MeanSpec::Fkt { k, t };
                    v.push(AhQuery::new(spec, q_value(f, &spec)?)?);
                }
            }
            v
        }
    };
    queries.into_iter().map(|q| Ok(trials(AhCheck::new(q, inputs.clone())?, &s))).collect()
}

fn two_var_jobs(f: &Flags) -> CliResult<Vec<Job>> {
    only(f, "two-var-ah", &["t", "r", "s", "a-file", "b-file", "family", "x", "y"])?;
    let s = settings(f, &ALL_DIMS)?;
    let (t, r, sv) = (f.t.unwrap_or(0.5), f.r.unwrap_or(0.7), f.s.unwrap_or(0.4));
    if f.family == Some(Family::Scan) {
        if f.x.is_some() || f.y.is_some() {
            return config_error("--family 2x2-scan fixes x = 1 and scans y");
        }
        let report = two_variable_necessity_report(t, r, sv, &default_y_grid(), s.tol)?;
        return Ok(vec![Job::Fixed(report)]);
    }
    let (inputs, s) = ah_inputs(f, s)?;
    Ok(vec![trials(AhCheck::new(AhQuery::two_variable(t, r, sv)?, inputs)?, &s)])
}

fn log_maj_jobs(f: &Flags) -> CliResult<Vec<Job>> {
    only(f, "log-maj", &["theorem", "k", "t", "p", "q"])?;
    let s = settings(f, &[2, 3, 4, 5])?;
    let Some(name) = &f.theorem else {
        if f.k.is_some() || f.t.is_some() || f.p.is_some() || f.q.is_some() {
            return config_error("--k/--t/--p/--q need --theorem");
        }
        let mut jobs: Vec<Job> = default_points().into_iter().map(|c| trials(c, &s)).collect();
        jobs.push(trials(DeterminantCheck { kt: KtChoice::sampled() }, &s));
        return Ok(jobs);
    };
    let theorem = LogMajTheorem::parse(name)?;
    let q = match f.q {
        None | Some(QArg::Auto) => None,
        Some(QArg::Value(q)) => Some(q),
    };
    let check = LogMajCheck::new(theorem, f.k.unwrap_or(0.3), f.t.unwrap_or(0.4), f.p.unwrap_or(1.5), q)?;
    Ok(vec![trials(check, &s)])
}
