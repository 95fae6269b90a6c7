//! Benchmark rows in the published table layout, written as CSV.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::instance::{ClassTag, Instance};
use crate::search::{Report, Termination};

pub const CSV_HEADER: &str = "Name,|D|,α,opt,%-LB,Pair,SEC,2mat,PEC,Nodes,Time";
const TIMEOUT: &str = "TIMEOUT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub name: String,
    pub depots: usize,
    /// Class II only.
    pub alpha: Option<u32>,
    /// `None` when the solve hit a limit before proving optimality.
    pub opt: Option<f64>,
    /// `100 · root LB / best upper bound`.
    pub pct_lb: f64,
    pub pair: usize,
    pub sec: usize,
    pub two_mat: usize,
    pub pec: usize,
    pub nodes: usize,
    pub time_seconds: f64,
}

impl BenchRow {
    pub fn from_report(inst: &Instance, report: &Report) -> Self {
        let s = &report.stats;
        let pct_lb = if report.ub.is_finite() && report.ub.abs() > 0.0 {
            100.0 * report.root_lb / report.ub
        } else {
            100.0
        };
        BenchRow {
            name: report.name.clone(),
            depots: inst.n_depots(),
            alpha: match inst.class() {
                ClassTag::I => None,
                ClassTag::II => inst.alpha(),
            },
            opt: (report.termination == Termination::Optimal).then_some(report.ub),
            pct_lb,
            pair: s.pair,
            sec: s.sec,
            two_mat: s.two_mat,
            pec: s.pec,
            nodes: s.nodes,
            time_seconds: s.time_seconds,
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{:.2},{},{},{},{},{},{:.2}",
            quote(&self.name),
            self.depots,
            self.alpha.map(|a| a.to_string()).unwrap_or_default(),
            self.opt.map_or(TIMEOUT.to_string(), |v| format!("{v:.4}")),
            self.pct_lb,
            self.pair,
            self.sec,
            self.two_mat,
            self.pec,
            self.nodes,
            self.time_seconds,
        )
    }
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Averages of `%-LB`, `Nodes` and `Time` over rows solved to optimality.
pub fn averages_csv(rows: &[BenchRow]) -> String {
    let solved: Vec<&BenchRow> = rows.iter().filter(|r| r.opt.is_some()).collect();
    if solved.is_empty() {
        return "Averages,,,,,,,,,,".to_string();
    }
    let k = solved.len() as f64;
    let avg = |f: fn(&BenchRow) -> f64| solved.iter().map(|r| f(r)).sum::<f64>() / k;
    format!(
        "Averages,,,,{:.2},,,,,{:.2},{:.2}",
        avg(|r| r.pct_lb),
        avg(|r| r.nodes as f64),
        avg(|r| r.time_seconds)
    )
}

/// Header, one line per row, then the averages line.
pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    writeln!(out, "{CSV_HEADER}").unwrap();
    for r in rows {
        writeln!(out, "{}", r.to_csv()).unwrap();
    }
    writeln!(out, "{}", averages_csv(rows)).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(name: &str, opt: Option<f64>, pct: f64, nodes: usize, time: f64) -> BenchRow {
        BenchRow {
            name: name.into(),
            depots: 3,
            alpha: None,
            opt,
            pct_lb: pct,
            pair: 1,
            sec: 2,
            two_mat: 0,
            pec: 4,
            nodes,
            time_seconds: time,
        }
    }

    #[test]
    fn layout_and_averages() {
        let rows = vec![
            row("a", Some(10.0), 100.0, 0, 1.0),
            row("b", Some(20.0), 98.0, 4, 3.0),
            row("c", None, 90.0, 100, 60.0),
        ];
        let csv = to_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "a,3,,10.0000,100.00,1,2,0,4,0,1.00");
        assert!(lines[3].contains(",TIMEOUT,"));
        assert_eq!(lines[4], "Averages,,,,99.00,,,,,2.00,2.00");
        for l in &lines {
            assert_eq!(l.split(',').count(), 11);
        }
    }

    #[test]
    fn names_with_commas_are_quoted() {
        assert_eq!(quote("a,b"), "\"a,b\"");
        assert_eq!(quote("plain"), "plain");
    }
}
