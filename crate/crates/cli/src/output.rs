//! Report serialization and the human-readable summary.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use mml_core::verify::CheckReport;
use serde_json::Value;

use crate::error::CliResult;

pub fn json_text<T: serde::Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

/// `check, <param columns...>, trials, worstMargin, violations`, params
/// taken as the sorted union of every report's keys.
pub fn reports_csv(reports: &[CheckReport]) -> CliResult<String> {
    let keys: BTreeSet<&str> =
        reports.iter().filter_map(|r| r.params.as_object()).flat_map(|o| o.keys().map(String::as_str)).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["check"];
    header.extend(keys.iter().copied());
    header.extend(["trials", "worstMargin", "violations"]);
    w.write_record(&header)?;
    for r in reports {
        let mut row = vec![r.check.clone()];
        row.extend(keys.iter().map(|k| r.params.get(*k).map(cell).unwrap_or_default()));
        row.extend([r.trials.to_string(), format!("{:e}", r.worst_margin), r.violations.len().to_string()]);
        w.write_record(&row)?;
    }
    finish(w)
}

pub fn finish(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w.into_inner().map_err(|e| crate::error::CliError(format!("csv error: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Summary line with the scalar parameters that distinguish reports of one check.
pub fn summary(r: &CheckReport) -> String {
    let mut extra = Vec::new();
    if let Some(o) = r.params.as_object() {
        for (k, v) in o {
            if k == "tol" || k == "seed" {
                continue;
            }
            match v {
                Value::Number(n) => extra.push(format!("{k}={n}")),
                Value::Object(m) => {
                    extra.extend(m.iter().filter(|(_, x)| x.is_number()).map(|(mk, x)| format!("{mk}={x}")))
                }
                _ => {}
            }
        }
    }
    if extra.is_empty() {
        r.summary_line()
    } else {
        format!("{}  [{}]", r.summary_line(), extra.join(" "))
    }
}

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Summary lines go to stdout unless stdout carries the report itself.
pub fn say(line: &str, report_on_stdout: bool) {
    if report_on_stdout {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}
