//! `mml sweep`: one check over a Cartesian parameter grid.

use mml_core::twobytwo::h_value;
use mml_core::verify::DEFAULT_TOL;

use crate::config::{Flags, GridAxis, Suite, SweepCheck};
use crate::error::{config_error, CliResult};
use crate::output::finish;
use crate::suites::build;

pub const MAX_POINTS: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub values: Vec<f64>,
    pub trials: usize,
    pub worst_margin: f64,
    pub violations: usize,
}

pub fn grid_points(axes: &[GridAxis]) -> CliResult<Vec<Vec<f64>>> {
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.name == a.name) {
            return config_error(format!("grid axis {} is given twice", a.name));
        }
        if a.values.is_empty() {
            return config_error(format!("grid axis {} is empty", a.name));
        }
    }
    let total = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.values.len())).unwrap_or(usize::MAX);
    if total > MAX_POINTS {
        return config_error(format!("grid has {total} points; the limit is {MAX_POINTS}"));
    }
    let mut points = vec![Vec::new()];
    for a in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                a.values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

fn row(check: SweepCheck, flags: &Flags, axes: &[GridAxis], values: Vec<f64>) -> CliResult<Row> {
    let mut f = flags.clone();
    for (a, &v) in axes.iter().zip(&values) {
        f.set(&a.name, v);
    }
    if check == SweepCheck::HValue {
        let (Some(x), Some(y), Some(l)) = (f.x, f.y, f.l) else {
            return config_error("h-value needs x, y and l (as flags or grid axes)");
        };
        let h = h_value(x, y, l)?;
        let tol = f.tol.unwrap_or(DEFAULT_TOL);
        return Ok(Row { values, trials: 1, worst_margin: h, violations: usize::from(h < -tol) });
    }
    let suite = match check {
        SweepCheck::Ah => Suite::Ah,
        SweepCheck::TwoVarAh => Suite::TwoVarAh,
        SweepCheck::EqSee => Suite::EqSee,
        SweepCheck::Alternative => Suite::Alternative,
        SweepCheck::HValue => unreachable!(),
    };
    let mut out = Row { values, trials: 0, worst_margin: f64::INFINITY, violations: 0 };
    for job in build(suite, &f)? {
        for r in job.run()? {
            out.trials += r.trials;
            out.worst_margin = out.worst_margin.min(r.worst_margin);
            out.violations += r.violations.len();
        }
    }
    Ok(out)
}

pub fn run(check: SweepCheck, axes: &[GridAxis], flags: &Flags) -> CliResult<Vec<Row>> {
    grid_points(axes)?.into_iter().map(|values| row(check, flags, axes, values)).collect()
}

pub fn rows_csv(axes: &[GridAxis], rows: &[Row]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = axes.iter().map(|a| a.name.as_str()).collect();
    header.extend(["trials", "worstMargin", "violations"]);
    w.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.values.iter().map(f64::to_string).collect();
        rec.extend([r.trials.to_string(), format!("{:e}", r.worst_margin), r.violations.to_string()]);
        w.write_record(&rec)?;
    }
    finish(w)
}

pub fn rows_json(axes: &[GridAxis], rows: &[Row]) -> serde_json::Value {
    let items = rows
        .iter()
        .map(|r| {
            let mut o = serde_json::Map::new();
            for (a, v) in axes.iter().zip(&r.values) {
                o.insert(a.name.clone(), (*v).into());
            }
            o.insert("trials".into(), r.trials.into());
            o.insert("worstMargin".into(), r.worst_margin.into());
            o.insert("violations".into(), r.violations.into());
            serde_json::Value::Object(o)
        })
        .collect();
    serde_json::Value::Array(items)
}
