//! Persistence of per-prime results as a headered CSV.
//!
//! The schema is fixed: one row per prime, strictly ascending, LF line
//! endings, no quoting (every field is numeric). `log_ratio` carries 12
//! significant digits in scientific notation and is empty exactly when
//! delta = 0; the three `*_ok` flags serialize as 1/0. The writer is
//! deterministic byte-for-byte so that identical configurations produce
//! identical files regardless of worker count.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::counting::{check_cz_bound, check_prop42, check_thm48, CountingError, PrimeRecord};

pub const RESULTS_HEADER: &str =
    "p,phi_p1,d_p1,sigma_p1,f_any,f_pr_rppr,delta,log_ratio,model_variance,cz_ok,prop42_ok,thm48_ok";

#[derive(Debug, Error)]
pub enum ResultsError {
    #[error("cannot access results file: {0}")]
    Io(#[from] io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// The persisted form of a [`PrimeRecord`] plus its per-prime bound flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub p: u64,
    pub phi_p1: u64,
    pub d_p1: u64,
    pub sigma_p1: u64,
    pub f_any: u64,
    pub f_pr_rppr: u64,
    pub delta: i64,
    pub log_ratio: Option<f64>,
    pub model_variance: u64,
    /// |F_pr_rppr − φ(p-1)²/(p-1)| within the proved bound.
    pub cz_ok: bool,
    /// All per-divisor and aggregate bounds within their proved limits.
    pub prop42_ok: bool,
    /// |F(p) − (p-1)| within the positive-density bound (may be false).
    pub thm48_ok: bool,
}

impl ResultRow {
    /// Evaluate the bound checks and flatten a record into its row.
    ///
    /// `prop42_ok` covers every theorem-backed instance; the degenerate
    /// aggregate bound at p = 3 is excluded (see
    /// [`crate::counting::BoundReport::theorem_backed`]).
    pub fn from_record(record: &PrimeRecord) -> Result<Self, CountingError> {
        let cz_ok = check_cz_bound(record).satisfied;
        let prop42_ok =
            check_prop42(record)?.iter().all(|r| r.satisfied || !r.theorem_backed());
        let thm48_ok = check_thm48(record).satisfied;
        Ok(ResultRow {
            p: record.p,
            phi_p1: record.phi_p1,
            d_p1: record.d_p1,
            sigma_p1: record.sigma_p1,
            f_any: record.f_any,
            f_pr_rppr: record.f_pr_rppr,
            delta: record.delta,
            log_ratio: record.log_ratio,
            model_variance: record.model_variance,
            cz_ok,
            prop42_ok,
            thm48_ok,
        })
    }
}

/// Canonical rendering of the log-ratio field: 12 significant digits,
/// empty for the delta = 0 case.
pub fn format_log_ratio(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.11e}"),
        None => String::new(),
    }
}

/// Render rows to the canonical CSV text.
pub fn format_results(rows: &[ResultRow]) -> String {
    let mut text = String::with_capacity(64 * (rows.len() + 1));
    text.push_str(RESULTS_HEADER);
    text.push('\n');
    for r in rows {
        let flags = [r.cz_ok, r.prop42_ok, r.thm48_ok].map(|b| u8::from(b));
        writeln!(
            text,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.p,
            r.phi_p1,
            r.d_p1,
            r.sigma_p1,
            r.f_any,
            r.f_pr_rppr,
            r.delta,
            format_log_ratio(r.log_ratio),
            r.model_variance,
            flags[0],
            flags[1],
            flags[2],
        )
        .expect("writing to String cannot fail");
    }
    text
}

/// Write rows to `path`, creating parent directories as needed.
pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<(), ResultsError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, format_results(rows))?;
    Ok(())
}

/// Parse the canonical CSV text back into rows, validating the header, the
/// field count and types of every line, and the ascending-prime invariant.
pub fn parse_results(text: &str) -> Result<Vec<ResultRow>, ResultsError> {
    let fail = |line: usize, message: String| ResultsError::Parse { line, message };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == RESULTS_HEADER => {}
        Some((_, header)) => {
            return Err(fail(1, format!("unexpected header: {header:?}")));
        }
        None => return Err(fail(1, "empty file".into())),
    }

    let mut rows = Vec::new();
    for (index, line) in lines {
        let line_no = index + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(fail(line_no, format!("expected 12 fields, found {}", fields.len())));
        }
        let uint = |i: usize, name: &str| -> Result<u64, ResultsError> {
            fields[i]
                .parse::<u64>()
                .map_err(|e| fail(line_no, format!("bad {name} {:?}: {e}", fields[i])))
        };
        let flag = |i: usize, name: &str| -> Result<bool, ResultsError> {
            match fields[i] {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(fail(line_no, format!("bad {name} {other:?}: expected 0 or 1"))),
            }
        };
        let log_ratio = if fields[7].is_empty() {
            None
        } else {
            Some(
                fields[7]
                    .parse::<f64>()
                    .map_err(|e| fail(line_no, format!("bad log_ratio {:?}: {e}", fields[7])))?,
            )
        };
        // the field is empty exactly for the delta = 0 rows
        if (fields[6] == "0") != log_ratio.is_none() {
            return Err(fail(
                line_no,
                format!("log_ratio {:?} inconsistent with delta {:?}", fields[7], fields[6]),
            ));
        }
        let row = ResultRow {
            p: uint(0, "p")?,
            phi_p1: uint(1, "phi_p1")?,
            d_p1: uint(2, "d_p1")?,
            sigma_p1: uint(3, "sigma_p1")?,
            f_any: uint(4, "f_any")?,
            f_pr_rppr: uint(5, "f_pr_rppr")?,
            delta: fields[6]
                .parse::<i64>()
                .map_err(|e| fail(line_no, format!("bad delta {:?}: {e}", fields[6])))?,
            log_ratio,
            model_variance: uint(8, "model_variance")?,
            cz_ok: flag(9, "cz_ok")?,
            prop42_ok: flag(10, "prop42_ok")?,
            thm48_ok: flag(11, "thm48_ok")?,
        };
        if let Some(previous) = rows.last().map(|r: &ResultRow| r.p) {
            if row.p <= previous {
                return Err(fail(
                    line_no,
                    format!("primes must be strictly ascending: {} after {previous}", row.p),
                ));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Read and parse a results file.
pub fn read_results(path: &Path) -> Result<Vec<ResultRow>, ResultsError> {
    parse_results(&fs::read_to_string(path)?)
}
