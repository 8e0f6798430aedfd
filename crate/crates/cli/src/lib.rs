//! Batch runner: loads case files, evaluates them and writes JSON-lines
//! reports plus a summary table.

pub mod casefile;
pub mod generate;
pub mod report;

use std::io::Write;

use rayon::prelude::*;

pub use casefile::{CaseFile, CaseKind, CaseSpec};
pub use report::{evaluate, CaseReport, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Case(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] csm_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;

/// Evaluates every case on up to `jobs` threads; reports keep case order.
pub fn run_cases(file: &CaseFile, jobs: usize) -> Result<Vec<CaseReport>> {
    let cases = file.load()?;
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(pool.install(|| cases.par_iter().map(evaluate).collect()))
}

pub fn exit_code(reports: &[CaseReport]) -> i32 {
    if reports.iter().any(|r| r.outcome.is_hard_failure()) {
        EXIT_FAILURE
    } else {
        EXIT_OK
    }
}

pub fn write_jsonl<W: Write>(out: &mut W, reports: &[CaseReport]) -> std::io::Result<()> {
    for r in reports {
        writeln!(out, "{}", r.to_json_line())?;
    }
    Ok(())
}

pub fn summary_table(reports: &[CaseReport]) -> String {
    let header = ["case", "kind", "tag", "outcome", "detail"];
    let rows: Vec<[String; 5]> = reports
        .iter()
        .map(|r| {
            let outcome = serde_json::to_value(r.outcome).expect("outcomes serialize");
            let mut detail = r.detail.clone();
            if !r.mismatches.is_empty() {
                detail = format!("{detail}; {}", r.mismatches.join("; "));
            }
            [r.case_id.clone(), r.kind.to_string(), r.tag.clone(), outcome.as_str().unwrap_or("").to_string(), detail]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = vec![line(header.to_vec())];
    out.extend(rows.iter().map(|r| line(r.iter().map(String::as_str).collect())));
    let passed = reports.iter().filter(|r| r.outcome == Outcome::Pass).count();
    out.push(format!("{passed}/{} cases passed", reports.len()));
    out.join("\n") + "\n"
}
