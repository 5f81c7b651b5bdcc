//! The three subcommands. Each returns its report text and whether every
//! check passed; writing happens once, in `main`.

use serde::Serialize;

use weyl_core::checks::{group_suite, harmonic_suite, CheckOptions, CheckRow, CHECK_HEADER};
use weyl_core::counterexamples::{divergence_sweep, summarize_sweep, write_sweep_csv, CounterexampleSpec};
use weyl_core::group::GroupTag;

use crate::config::RunConfig;
use crate::CliError;

/// CSV body plus one JSON object per line.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub csv: String,
    pub jsonl: String,
    pub pass: bool,
}

#[derive(Serialize)]
struct CheckJson<'a> {
    check: &'a str,
    group: &'a str,
    metric: &'a str,
    value: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SweepJson {
    group: &'static str,
    alpha: f64,
    p_prime: f64,
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "R")]
    r: f64,
    points: usize,
    predicted_slope: f64,
    fitted_slope: f64,
    increment_slope: f64,
    verdict: String,
    pass: bool,
}

fn groups(cfg: &RunConfig) -> Vec<GroupTag> {
    match cfg.group {
        Some(g) => vec![g],
        None => GroupTag::ALL.to_vec(),
    }
}

fn options(cfg: &RunConfig, tag: GroupTag) -> Result<CheckOptions, CliError> {
    Ok(CheckOptions {
        seed: cfg.seed,
        tolerance: cfg.tolerance,
        trials: cfg.trials,
        function: cfg.function,
        resolution: Some(cfg.grid.resolution(tag)?),
        rep_counts: cfg.grid.rep_counts(),
    })
}

fn check_report(rows: &[CheckRow]) -> Result<Report, CliError> {
    let mut csv = format!("{CHECK_HEADER}\n");
    let mut jsonl = String::new();
    for r in rows {
        csv.push_str(&r.csv_row());
        csv.push('\n');
        let j = CheckJson {
            check: &r.check,
            group: r.group.name(),
            metric: &r.metric,
            value: r.value,
            tolerance: r.tolerance,
            pass: r.pass,
        };
        jsonl.push_str(&serde_json::to_string(&j).map_err(|e| CliError::Io(e.to_string()))?);
        jsonl.push('\n');
    }
    Ok(Report {
        csv,
        jsonl,
        pass: rows.iter().all(|r| r.pass),
    })
}

/// Group laws, inverse, left invariance and the modular function.
pub fn cmd_verify_group(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut rows = Vec::new();
    for tag in groups(cfg) {
        rows.extend(group_suite(tag, &options(cfg, tag)?)?);
    }
    check_report(&rows)
}

/// Representations, Plancherel, inversion, Wigner and Weyl identities.
pub fn cmd_verify_harmonic(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut rows = Vec::new();
    for tag in groups(cfg) {
        rows.extend(harmonic_suite(tag, &options(cfg, tag)?)?);
    }
    check_report(&rows)
}

/// Truncated lower-bound sweep of the counterexample for one group.
pub fn cmd_sweep_divergence(cfg: &RunConfig) -> Result<Report, CliError> {
    let tag = cfg.group.unwrap_or(GroupTag::Affine);
    let alpha = cfg.alpha.ok_or_else(|| CliError::Config("sweep-divergence needs --alpha".into()))?;
    let p = cfg.p.ok_or_else(|| CliError::Config("sweep-divergence needs --p".into()))?;
    let spec = CounterexampleSpec { tag, alpha, p, l: cfg.l, r: cfg.r };
    spec.validate().map_err(|e| {
        CliError::Config(format!("{e}; the {tag} counterexample needs {}", spec.divergence_window()))
    })?;
    let records = divergence_sweep(&spec, cfg.decades, cfg.per_decade)?;
    let summary = summarize_sweep(&records)?;
    let mut buf = Vec::new();
    write_sweep_csv(&records, Some(&summary), &mut buf)?;
    let used = records[0].spec;
    let json = SweepJson {
        group: tag.name(),
        alpha,
        p_prime: used.p_prime(),
        l: used.l,
        r: used.r,
        points: records.len(),
        predicted_slope: summary.predicted_slope,
        fitted_slope: summary.fitted_slope,
        increment_slope: summary.increment_slope,
        verdict: summary.verdict.to_string(),
        pass: summary.pass,
    };
    Ok(Report {
        csv: String::from_utf8(buf).map_err(|e| CliError::Io(e.to_string()))?,
        jsonl: serde_json::to_string(&json).map_err(|e| CliError::Io(e.to_string()))? + "\n",
        pass: summary.pass,
    })
}
