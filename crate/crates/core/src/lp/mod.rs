//! Linear programming: a model container and a bounded-variable simplex
//! engine that re-solves warm after rows are added or bounds tightened.

mod simplex;

use std::fmt::Write;

use thiserror::Error;

use crate::instance::{Column, Instance};

pub use simplex::{Limits, Simplex};

/// Primal feasibility tolerance used to accept a solution.
pub const FEAS_TOL: f64 = 1e-6;
/// Reduced-cost (optimality) tolerance.
pub const OPT_TOL: f64 = 1e-7;

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("row references unknown column {0}")]
    UnknownColumn(usize),
    #[error("coefficient for column {0} is not finite")]
    NonFinite(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// A sparse linear constraint `Σ coef·x  (sense)  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coefs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn new(mut coefs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Self {
        coefs.sort_by_key(|&(c, _)| c);
        // merge duplicates, drop zeros
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coefs.len());
        for (c, v) in coefs {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|&(_, v)| v != 0.0);
        Row {
            coefs: merged,
            sense,
            rhs,
        }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coefs.iter().map(|&(c, v)| v * x[c]).sum()
    }

    /// Amount by which `x` violates the row (zero or negative when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let a = self.activity(x);
        match self.sense {
            Sense::Le => a - self.rhs,
            Sense::Ge => self.rhs - a,
            Sense::Eq => (a - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnSpec {
    pub objective: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

/// Status of one variable (structural column or row logical) in a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
}

/// Basis description: one status per column, then one per row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Basis {
    pub columns: Vec<VarStatus>,
    pub rows: Vec<VarStatus>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: Status,
    /// Objective at the final basis. Under [`Status::IterationLimit`] this is
    /// still a valid lower bound when the basis was dual feasible.
    pub objective: f64,
    pub primal: Vec<f64>,
    pub basis: Basis,
    pub iterations: usize,
}

/// Minimization LP with bounded columns and sparse rows.
#[derive(Debug, Clone, Default)]
pub struct LpModel {
    columns: Vec<ColumnSpec>,
    rows: Vec<Row>,
    hint: Option<Basis>,
}

impl LpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_column(&mut self, objective: f64, lower: f64, upper: f64) -> usize {
        self.columns.push(ColumnSpec {
            objective,
            lower,
            upper,
        });
        self.columns.len() - 1
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn hint(&self) -> Option<&Basis> {
        self.hint.as_ref()
    }

    pub fn set_hint(&mut self, basis: Option<Basis>) {
        self.hint = basis;
    }

    fn check_row(&self, row: &Row) -> Result<(), LpError> {
        for &(c, v) in &row.coefs {
            if c >= self.columns.len() {
                return Err(LpError::UnknownColumn(c));
            }
            if !v.is_finite() {
                return Err(LpError::NonFinite(c));
            }
        }
        Ok(())
    }

    pub fn add_row(&mut self, row: Row) -> Result<usize, LpError> {
        self.check_row(&row)?;
        self.rows.push(row);
        Ok(self.rows.len() - 1)
    }

    pub fn add_rows(&mut self, rows: impl IntoIterator<Item = Row>) -> Result<(), LpError> {
        for r in rows {
            self.add_row(r)?;
        }
        Ok(())
    }

    /// Deletes the rows at the given indices; later rows shift down. The
    /// basis hint, if any, is dropped.
    pub fn remove_rows(&mut self, rows: &[usize]) {
        let mut drop = vec![false; self.rows.len()];
        for &i in rows {
            drop[i] = true;
        }
        let mut k = 0;
        self.rows.retain(|_| {
            k += 1;
            !drop[k - 1]
        });
        self.hint = None;
    }

    pub fn set_bound(&mut self, column: usize, side: Side, value: f64) -> Result<(), LpError> {
        let spec = self
            .columns
            .get_mut(column)
            .ok_or(LpError::UnknownColumn(column))?;
        match side {
            Side::Lower => spec.lower = value,
            Side::Upper => spec.upper = value,
        }
        Ok(())
    }

    /// Largest row or bound violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self
            .rows
            .iter()
            .map(|r| r.violation(x))
            .fold(0.0f64, f64::max);
        let bounds = self
            .columns
            .iter()
            .zip(x)
            .map(|(c, &v)| (c.lower - v).max(v - c.upper))
            .fold(0.0f64, f64::max);
        rows.max(bounds)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.columns.iter().zip(x).map(|(c, v)| c.objective * v).sum()
    }

    /// Dump in CPLEX LP text format, for cross-checking with other solvers.
    pub fn to_lp_format(&self, names: Option<&dyn Fn(usize) -> String>) -> String {
        let name = |c: usize| names.map_or_else(|| format!("c{c}"), |f| f(c));
        let term = |v: f64, c: usize| {
            let sign = if v < 0.0 { "-" } else { "+" };
            format!("{sign} {} {}", v.abs(), name(c))
        };
        let mut s = String::from("Minimize\n obj:");
        for (c, spec) in self.columns.iter().enumerate() {
            if spec.objective != 0.0 {
                let _ = write!(s, " {}", term(spec.objective, c));
            }
        }
        s.push_str("\nSubject To\n");
        for (i, r) in self.rows.iter().enumerate() {
            let _ = write!(s, " r{i}:");
            if r.coefs.is_empty() {
                let _ = write!(s, " 0 {}", name(0));
            }
            for &(c, v) in &r.coefs {
                let _ = write!(s, " {}", term(v, c));
            }
            let _ = writeln!(s, " {} {}", r.sense.symbol(), r.rhs);
        }
        s.push_str("Bounds\n");
        for (c, spec) in self.columns.iter().enumerate() {
            if spec.lower == spec.upper {
                let _ = writeln!(s, " {} = {}", name(c), spec.lower);
            } else {
                let lo = if spec.lower.is_finite() {
                    spec.lower.to_string()
                } else {
                    "-inf".into()
                };
                let hi = if spec.upper.is_finite() {
                    spec.upper.to_string()
                } else {
                    "+inf".into()
                };
                let _ = writeln!(s, " {lo} <= {} <= {hi}", name(c));
            }
        }
        s.push_str("End\n");
        s
    }
}

/// Solves `model` from scratch, or warm from `hint` (falling back to the
/// model's stored hint).
pub fn solve(model: &LpModel, hint: Option<&Basis>) -> LpSolution {
    let hint = hint.or(model.hint.as_ref());
    let mut spx = Simplex::new(model.clone());
    if let Some(b) = hint {
        spx.load_basis(b);
    }
    spx.solve(&Limits::default());
    spx.solution()
}

/// Root relaxation: routing plus assignment cost, degree rows, assignment
/// rows, `x_dj ≤ 2 y_jj`, and the depot arc fixings as bounds.
/// Integrality is dropped.
pub fn build_root_lp(inst: &Instance) -> LpModel {
    let l = inst.layout();
    let mut model = LpModel::new();
    for (idx, c) in inst.objective().into_iter().enumerate() {
        let (lo, hi) = match l.column(idx) {
            Column::Edge(_, b) if l.is_depot(b) => (0.0, 2.0),
            Column::Edge(..) => (0.0, 1.0),
            Column::Arc(i, j) if l.is_depot(i) => {
                let v = if i == j { 1.0 } else { 0.0 };
                (v, v)
            }
            Column::Arc(..) => (0.0, 1.0),
        };
        model.add_column(c, lo, hi);
    }
    for t in l.customers() {
        let mut coefs: Vec<(usize, f64)> = l.incident_edges(t).map(|(_, c)| (c, 1.0)).collect();
        coefs.push((l.arc(t, t).unwrap(), -2.0));
        model.rows.push(Row::new(coefs, Sense::Eq, 0.0));
    }
    for t in l.customers() {
        let coefs = (0..l.n_vertices())
            .map(|j| (l.arc(t, j).unwrap(), 1.0))
            .collect();
        model.rows.push(Row::new(coefs, Sense::Eq, 1.0));
    }
    for d in l.depots() {
        for t in l.customers() {
            let coefs = vec![(l.edge(d, t).unwrap(), 1.0), (l.arc(t, t).unwrap(), -2.0)];
            model.rows.push(Row::new(coefs, Sense::Le, 0.0));
        }
    }
    model
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_lp_shape() {
        let inst = Instance::from_matrices(
            "z",
            4,
            2,
            vec![vec![1.0; 6]; 6],
            vec![vec![1.0; 6]; 6],
        )
        .unwrap();
        let m = build_root_lp(&inst);
        assert_eq!(m.n_columns(), 48);
        assert_eq!(m.rows().iter().filter(|r| r.sense == Sense::Eq).count(), 8);
        assert_eq!(m.rows().iter().filter(|r| r.sense == Sense::Le).count(), 8);
        let fixed = m.columns().iter().filter(|c| c.lower == c.upper).count();
        // n depot self-loops plus n·u depot→customer arcs
        assert_eq!(fixed, 2 + 8);
    }

    #[test]
    fn row_normalization() {
        let r = Row::new(vec![(3, 1.0), (1, 2.0), (3, 1.0), (2, 0.0)], Sense::Le, 1.0);
        assert_eq!(r.coefs, vec![(1, 2.0), (3, 2.0)]);
    }

    #[test]
    fn unknown_columns_are_rejected() {
        let mut m = LpModel::new();
        m.add_column(1.0, 0.0, 1.0);
        assert_eq!(
            m.add_row(Row::new(vec![(5, 1.0)], Sense::Le, 1.0)),
            Err(LpError::UnknownColumn(5))
        );
        assert_eq!(m.set_bound(9, Side::Lower, 0.0), Err(LpError::UnknownColumn(9)));
    }

    #[test]
    fn lp_format_dump() {
        let mut m = LpModel::new();
        m.add_column(1.0, 0.0, 10.0);
        m.add_column(-2.0, 0.0, 1.0);
        m.add_row(Row::new(vec![(0, 1.0), (1, -1.0)], Sense::Ge, 1.0))
            .unwrap();
        let s = m.to_lp_format(None);
        assert!(s.contains("obj: + 1 c0 - 2 c1"), "{s}");
        assert!(s.contains("r0: + 1 c0 - 1 c1 >= 1"), "{s}");
        assert!(s.contains("0 <= c0 <= 10"), "{s}");
    }
}
