use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use mml_core::search::{run_campaign_with_jobs, Campaign};

mod config;
mod error;
mod output;
mod suites;
mod sweep;

use config::{Command, Flags, Format, GridAxis, RunConfig, Suite, SweepCheck};
use error::{CliError, CliResult};
use output::{emit, json_text, reports_csv, say};

const CLEAN: u8 = 0;
const VIOLATIONS: u8 = 1;
const CONFIG_ERROR: u8 = 2;

fn verify(suite: Suite, flags: &Flags) -> CliResult<u8> {
    let jobs = suites::build(suite, flags)?;
    let mut reports = Vec::new();
    for job in jobs {
        reports.extend(job.run()?);
    }
    let text = match flags.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&reports)?,
        Format::Csv => reports_csv(&reports)?,
    };
    let on_stdout = flags.out.is_none();
    for r in &reports {
        say(&output::summary(r), on_stdout);
    }
    let dirty = reports.iter().filter(|r| !r.is_clean()).count();
    say(&format!("{} reports, {dirty} with violations", reports.len()), on_stdout);
    emit(&text, flags.out.as_deref())?;
    Ok(if dirty == 0 { CLEAN } else { VIOLATIONS })
}

fn sweep(check: SweepCheck, grid: &[GridAxis], flags: &Flags) -> CliResult<u8> {
    let rows = sweep::run(check, grid, flags)?;
    let text = match flags.format.unwrap_or(Format::Csv) {
        Format::Csv => sweep::rows_csv(grid, &rows)?,
        Format::Json => json_text(&sweep::rows_json(grid, &rows))?,
    };
    let dirty = rows.iter().filter(|r| r.violations > 0).count();
    say(&format!("{} grid points, {dirty} with violations", rows.len()), flags.out.is_none());
    emit(&text, flags.out.as_deref())?;
    Ok(if dirty == 0 { CLEAN } else { VIOLATIONS })
}

fn search(file: &Path, out: Option<&Path>, jobs: Option<usize>) -> CliResult<u8> {
    let text = std::fs::read_to_string(file).map_err(|e| CliError(format!("cannot read {}: {e}", file.display())))?;
    let mut campaign: Campaign = serde_json::from_str(&text).map_err(|e| CliError(format!("invalid campaign: {e}")))?;
    if let Some(out) = out {
        campaign.output_path = Some(out.to_path_buf());
    }
    if jobs == Some(0) {
        return error::config_error("--jobs must be at least 1");
    }
    let on_stdout = campaign.output_path.is_none();
    let result = run_campaign_with_jobs(&campaign, jobs)?;
    if on_stdout {
        emit(&json_text(&result)?, None)?;
    }
    say(&result.summary(), on_stdout);
    if let Some(reason) = &result.aborted {
        say(reason, on_stdout);
        return Ok(CONFIG_ERROR);
    }
    Ok(CLEAN)
}

fn run(config: &RunConfig) -> CliResult<u8> {
    match &config.command {
        Command::Verify { suite, flags } => verify(*suite, flags),
        Command::Sweep { check, grid, flags } => sweep(*check, grid, flags),
        Command::Search { file, out, jobs } => search(file, out.as_deref(), *jobs),
    }
}

fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { CONFIG_ERROR } else { CLEAN });
        }
    };
    match run(&config) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CONFIG_ERROR)
        }
    }
}
