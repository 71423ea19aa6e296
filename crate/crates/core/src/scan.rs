//! Consecutive-difference scan `d_n = |γ_n| - |γ_{n-1}|` against
//! `1/sqrt(2n - 1)`, with CSV and JSON reports.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::log_coefficients;
use crate::error::{Error, Result};
use crate::zoo::{realize, FamilySpec};

/// Slack allowed on the proved `n = 3, 4` bounds.
pub const GUARD_TOL: f64 = 1e-9;

pub const DEFAULT_N_MAX: usize = 8;

/// `1/sqrt(2n - 1)`
pub fn difference_bound(n: usize) -> f64 {
    1.0 / ((2 * n - 1) as f64).sqrt()
}

pub fn function_id(index: usize) -> String {
    format!("f{index:04}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub function_id: String,
    pub spec: FamilySpec,
    pub n: usize,
    pub abs_gamma_prev: f64,
    pub abs_gamma: f64,
    pub d_n: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub function_id: String,
    pub spec: FamilySpec,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScanOutput {
    pub records: Vec<ScanRecord>,
    pub skipped: Vec<Skipped>,
}

fn scan_one(index: usize, spec: &FamilySpec, n_max: usize, order: usize) -> Result<Vec<ScanRecord>> {
    let f = realize(spec, order)?;
    let gamma = log_coefficients(&f, n_max)?;
    Ok((2..=n_max)
        .map(|n| {
            let abs_gamma_prev = gamma.get(n - 1).norm();
            let abs_gamma = gamma.get(n).norm();
            let d_n = abs_gamma - abs_gamma_prev;
            let bound = difference_bound(n);
            ScanRecord {
                function_id: function_id(index),
                spec: spec.clone(),
                n,
                abs_gamma_prev,
                abs_gamma,
                d_n,
                bound,
                slack: bound - d_n,
            }
        })
        .collect())
}

/// One record per `(function, n)` for `n = 2..=n_max`, ordered by corpus
/// index then `n`. Functions that fail to realize are listed as skipped.
pub fn scan(corpus: &[FamilySpec], n_max: usize, order: usize) -> Result<ScanOutput> {
    if n_max < 2 {
        return Err(Error::InvalidParameter(format!("nmax must be at least 2, got {n_max}")));
    }
    if order < n_max + 1 {
        return Err(Error::InsufficientOrder {
            op: "scan",
            needed: n_max + 1,
            got: order,
        });
    }
    let results: Vec<_> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, spec)| scan_one(i, spec, n_max, order))
        .collect();

    let mut out = ScanOutput::default();
    for (i, (spec, r)) in corpus.iter().zip(results).enumerate() {
        match r {
            Ok(rows) => out.records.extend(rows),
            Err(e) => out.skipped.push(Skipped {
                function_id: function_id(i),
                spec: spec.clone(),
                reason: e.to_string(),
            }),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuardSummary {
    pub max_d3: Option<f64>,
    pub max_d4: Option<f64>,
    /// Records breaking the proved `n = 3, 4` bounds by more than `GUARD_TOL`.
    pub violations: Vec<ScanRecord>,
    pub min_slack_by_n: BTreeMap<usize, f64>,
}

impl GuardSummary {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `d_3 <= 1/sqrt(5)` and `d_4 <= 1/sqrt(7)`; larger `n` are only
/// summarized.
pub fn theorem_guard(records: &[ScanRecord]) -> GuardSummary {
    let max_of = |n: usize| {
        records
            .iter()
            .filter(|r| r.n == n)
            .map(|r| r.d_n)
            .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))))
    };
    let violations = records
        .iter()
        .filter(|r| (r.n == 3 || r.n == 4) && r.d_n > r.bound + GUARD_TOL)
        .cloned()
        .collect();
    let mut min_slack_by_n = BTreeMap::new();
    for r in records {
        let e = min_slack_by_n.entry(r.n).or_insert(f64::INFINITY);
        *e = f64::min(*e, r.slack);
    }
    GuardSummary {
        max_d3: max_of(3),
        max_d4: max_of(4),
        violations,
        min_slack_by_n,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

pub const CSV_HEADER: [&str; 8] = [
    "function_id",
    "family",
    "n",
    "abs_gamma_prev",
    "abs_gamma",
    "d_n",
    "bound",
    "slack",
];

#[derive(Serialize)]
struct CsvRow<'a> {
    function_id: &'a str,
    family: &'a str,
    n: usize,
    abs_gamma_prev: f64,
    abs_gamma: f64,
    d_n: f64,
    bound: f64,
    slack: f64,
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("report: {e}"))
}

/// Renders records in scan order; floats use shortest round-trip decimals.
pub fn report(records: &[ScanRecord], format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(CSV_HEADER).map_err(io_err)?;
            for r in records {
                w.serialize(CsvRow {
                    function_id: &r.function_id,
                    family: r.spec.family.as_str(),
                    n: r.n,
                    abs_gamma_prev: r.abs_gamma_prev,
                    abs_gamma: r.abs_gamma,
                    d_n: r.d_n,
                    bound: r.bound,
                    slack: r.slack,
                })
                .map_err(io_err)?;
            }
            w.into_inner().map_err(io_err)
        }
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(records).map_err(io_err)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}
