//! Worst cases over a grid of `(n, d)` cells with every applicable bound
//! checked, and the JSON / CSV reports built from them.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::worst::{worst_case, Mode, WorstCaseCell, WorstCaseOptions};
use crate::algorithm::Strategy;
use crate::analysis::Counterexample;
use crate::bounds::{
    competitive_check, zc_upper_d, zc_upper_n, zd_upper, zu_upper_d, zu_upper_n_floor, SLACK,
    ZC_CONSTANT, ZC_CONSTANT_STATED,
};
use crate::error::{Error, Result};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;
/// Largest `n` accepted by [`verify_grid`].
pub const MAX_GRID_N: usize = 20;
pub const CSV_HEADER: [&str; 7] = [
    "algorithm",
    "n",
    "d",
    "worst_tests",
    "bound_name",
    "bound_value",
    "pass",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub bound_name: String,
    pub value: f64,
    pub pass: bool,
    /// False for bounds that are only reported.
    pub asserted: bool,
}

impl BoundCheck {
    fn upper(name: &str, value: f64, worst: usize) -> Self {
        BoundCheck {
            bound_name: name.to_string(),
            value,
            pass: worst as f64 <= value + SLACK,
            asserted: true,
        }
    }
}

/// The bounds that apply to `algorithm` at `(n, d)`, checked against an
/// exhaustive worst case.
pub fn bound_checks(algorithm: &str, n: usize, d: usize, worst: usize) -> Vec<BoundCheck> {
    let (nu, du) = (n as u64, d as u64);
    let mut out = Vec::new();
    match algorithm {
        "individual" => out.push(BoundCheck::upper("individual_n", n as f64, worst)),
        "zd" => {
            if let Some(v) = zd_upper(nu, du) {
                out.push(BoundCheck::upper("zd", v, worst));
            }
        }
        "zu" => {
            // exact integer comparison, no slack
            let floor = zu_upper_n_floor(nu);
            out.push(BoundCheck {
                bound_name: "zu_n".into(),
                value: floor as f64,
                pass: worst as u64 <= floor,
                asserted: true,
            });
            if let Some(v) = zu_upper_d(nu, du) {
                out.push(BoundCheck::upper("zu_d", v, worst));
            }
        }
        "zc" => {
            out.push(BoundCheck::upper("zc_n", zc_upper_n(nu), worst));
            if d >= 1 {
                if let Some(v) = zc_upper_d(nu, du, ZC_CONSTANT) {
                    out.push(BoundCheck::upper("zc_d", v, worst));
                }
                if let Some(v) = zc_upper_d(nu, du, ZC_CONSTANT_STATED) {
                    let mut c = BoundCheck::upper("zc_d_stated", v, worst);
                    c.asserted = false;
                    out.push(c);
                }
            }
            if let Some(v) = competitive_check(nu, du, worst as u64) {
                let name = match v.case {
                    crate::bounds::CompetitiveCase::NoDefectives => "competitive_no_defectives",
                    crate::bounds::CompetitiveCase::Dense => "competitive_dense",
                    crate::bounds::CompetitiveCase::Sparse => "competitive_sparse",
                };
                out.push(BoundCheck {
                    bound_name: name.into(),
                    value: v.limit,
                    pass: v.pass,
                    asserted: v.asserted,
                });
            }
        }
        _ => {}
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridViolation {
    pub algorithm: String,
    pub n: usize,
    pub d: usize,
    pub check: String,
    pub observed: f64,
    pub limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub schema_version: u32,
    pub n_max: usize,
    pub cells: Vec<WorstCaseCell>,
    pub violations: Vec<GridViolation>,
    /// Analysis counterexamples, lifted out of the cells.
    pub counterexamples: Vec<Counterexample>,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))
    }

    /// One row per (cell, bound); cells without bounds get one row with
    /// empty bound columns.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Internal(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER).map_err(io)?;
        for c in &self.cells {
            let head = [
                c.algorithm.clone(),
                c.n.to_string(),
                c.d.to_string(),
                c.worst_tests.to_string(),
            ];
            if c.bound_values.is_empty() {
                w.write_record(head.iter().map(String::as_str).chain(["", "", ""]))
                    .map_err(io)?;
            }
            for b in &c.bound_values {
                let tail = [
                    b.bound_name.clone(),
                    b.value.to_string(),
                    b.pass.to_string(),
                ];
                w.write_record(head.iter().chain(&tail)).map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::Internal(e.to_string()))
    }
}

/// Exhaustive worst cases for every `n ≤ n_max`, `0 ≤ d ≤ n`. Violations
/// are collected, not short-circuited; a correctness failure is an error.
pub fn verify_grid(
    n_max: usize,
    strategies: &[&dyn Strategy],
    options: WorstCaseOptions,
) -> Result<GridReport> {
    if n_max > MAX_GRID_N {
        return Err(Error::LimitExceeded(format!(
            "n_max = {n_max} exceeds {MAX_GRID_N} for exhaustive verification"
        )));
    }
    let mut report = GridReport {
        schema_version: SCHEMA_VERSION,
        n_max,
        cells: Vec::new(),
        violations: Vec::new(),
        counterexamples: Vec::new(),
    };
    for s in strategies {
        for n in 0..=n_max {
            for d in 0..=n {
                let mut cell = worst_case(*s, n, d, Mode::Exhaustive, options)?;
                for b in cell.bound_values.iter().filter(|b| b.asserted && !b.pass) {
                    report.violations.push(GridViolation {
                        algorithm: cell.algorithm.clone(),
                        n,
                        d,
                        check: b.bound_name.clone(),
                        observed: cell.worst_tests as f64,
                        limit: Some(b.value),
                    });
                }
                if let Some(a) = cell.analysis.as_mut() {
                    if a.violating_runs > 0 {
                        report.violations.push(GridViolation {
                            algorithm: cell.algorithm.clone(),
                            n,
                            d,
                            check: "analysis".into(),
                            observed: a.violating_runs as f64,
                            limit: None,
                        });
                    }
                    report.counterexamples.append(&mut a.counterexamples);
                }
                report.cells.push(cell);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithm::Algorithm;
    use crate::upzigzag::UpZigZag;

    #[test]
    fn small_grid_is_clean_and_deterministic() {
        let algs: Vec<&dyn Strategy> = Algorithm::ALL.iter().map(|a| a as &dyn Strategy).collect();
        let a = verify_grid(7, &algs, Default::default()).unwrap();
        assert!(a.passed(), "{:?}", a.violations);
        assert_eq!(a.cells.len(), 4 * (1..=8).sum::<usize>());
        let b = verify_grid(7, &algs, Default::default()).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn csv_layout() {
        let algs: [&dyn Strategy; 1] = [&Algorithm::Zu];
        let r = verify_grid(3, &algs, Default::default()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("algorithm,n,d,worst_tests,bound_name,bound_value,pass")
        );
        assert_eq!(lines.next(), Some("zu,0,0,0,zu_n,0,true"));
        assert!(text.contains("zu,3,3,"));
    }

    fn shrunk(k: u32) -> usize {
        if k == 0 {
            1
        } else {
            (crate::splitseq::a_seq(k) - 1).max(1)
        }
    }

    #[test]
    fn shrunk_schedule_is_flagged() {
        let zu = UpZigZag::with_schedule(shrunk);
        let algs: [&dyn Strategy; 1] = [&zu];
        let opts = WorstCaseOptions {
            analyze: false,
            ..Default::default()
        };
        let r = verify_grid(12, &algs, opts).unwrap();
        assert!(
            r.violations.iter().any(|v| v.check == "zu_n"),
            "{:?}",
            r.violations
        );
    }

    #[test]
    fn n_max_is_capped() {
        let algs: [&dyn Strategy; 1] = [&Algorithm::Zd];
        assert!(matches!(
            verify_grid(21, &algs, Default::default()),
            Err(Error::LimitExceeded(_))
        ));
    }
}
