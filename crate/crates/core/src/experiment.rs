//! Error measurements of the floating-point constructions against the oracle.

use serde::Serialize;

use crate::assembler::{build, Strategy};
use crate::error::Result;
use crate::eval::Evaluator;
use crate::oracle::{matrix_error, oracle_build, value_error};
use crate::par::{self, Execution};
use crate::presets::Preset;
use crate::scalar::{fmt_real, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixRow {
    pub preset: String,
    pub method: String,
    pub rows: usize,
    pub cols: usize,
    /// Column-sum norm of the difference to the exact matrix.
    pub error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValueRow {
    pub preset: String,
    pub method: String,
    pub function: usize,
    pub x: f64,
    pub value: f64,
    pub exact: Option<f64>,
    pub abs_error: Option<f64>,
    pub rel_error: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub matrices: Vec<MatrixRow>,
    pub values: Vec<ValueRow>,
}

impl Report {
    pub fn worst_matrix_error(&self, method: Strategy) -> Option<f64> {
        self.matrices
            .iter()
            .filter(|r| r.method == method.name())
            .filter_map(|r| r.error)
            .reduce(f64::max)
    }

    pub fn worst_relative_error(&self, method: Strategy) -> Option<f64> {
        self.values
            .iter()
            .filter(|r| r.method == method.name())
            .filter_map(|r| r.rel_error)
            .reduce(f64::max)
    }

    /// Two CSV tables separated by a blank line.
    pub fn to_csv(&self) -> Result<String> {
        let opt = |v: Option<f64>| v.map(fmt_real).unwrap_or_default();
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(["preset", "method", "rows", "cols", "matrix_error"])
            .map_err(io_err)?;
        for r in &self.matrices {
            w.write_record([
                r.preset.clone(),
                r.method.clone(),
                r.rows.to_string(),
                r.cols.to_string(),
                opt(r.error),
            ])
            .map_err(io_err)?;
        }
        let mut out = String::from_utf8(w.into_inner().map_err(|e| io_err(e.into_error()))?).unwrap_or_default();
        out.push('\n');
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(["preset", "method", "function", "x", "value", "exact", "abs_error", "rel_error"])
            .map_err(io_err)?;
        for r in &self.values {
            w.write_record([
                r.preset.clone(),
                r.method.clone(),
                r.function.to_string(),
                fmt_real(r.x),
                fmt_real(r.value),
                opt(r.exact),
                opt(r.abs_error),
                opt(r.rel_error),
            ])
            .map_err(io_err)?;
        }
        out.push_str(&String::from_utf8(w.into_inner().map_err(|e| io_err(e.into_error()))?).unwrap_or_default());
        Ok(out)
    }
}

fn io_err(e: impl std::fmt::Display) -> crate::error::Error {
    crate::error::Error::Input(e.to_string())
}

/// Runs every method on every preset. Presets are processed in parallel;
/// the rows come back in preset order, then method order.
pub fn run(presets: &[Preset], methods: &[Strategy], oracle: bool, exec: Execution) -> Result<Report> {
    let parts = par::map(exec, presets, |p| run_one(p, methods, oracle, exec));
    let mut report = Report::default();
    for part in parts {
        let part = part?;
        report.matrices.extend(part.matrices);
        report.values.extend(part.values);
    }
    Ok(report)
}

fn run_one(p: &Preset, methods: &[Strategy], oracle: bool, exec: Execution) -> Result<Report> {
    let exact = if oracle {
        let b = oracle_build(&p.space, Strategy::Rki)?;
        let ev = Evaluator::new(&b)?;
        let values = p
            .points
            .iter()
            .map(|&x| Ok(ev.eval(x)?.get(p.function)))
            .collect::<Result<Vec<Rational>>>()?;
        Some((b, values))
    } else {
        None
    };
    let per_method = par::map(exec, methods, |&m| -> Result<Report> {
        let b = build::<f64>(&p.space, m)?;
        let mut rep = Report::default();
        let exact_m = match (&exact, m) {
            (Some(_), Strategy::Rde | Strategy::Mixed) => Some(oracle_build(&p.space, m)?.matrix().clone()),
            (Some((e, _)), _) => Some(e.matrix().clone()),
            (None, _) => None,
        };
        rep.matrices.push(MatrixRow {
            preset: p.name.clone(),
            method: m.name().into(),
            rows: b.matrix().rows(),
            cols: b.matrix().cols(),
            error: exact_m.map(|e| matrix_error(b.matrix(), &e)).transpose()?,
        });
        let ev = Evaluator::new(&b)?;
        for (idx, &x) in p.points.iter().enumerate() {
            let value = ev.eval(x)?.get(p.function);
            let ex = exact.as_ref().map(|(_, v)| &v[idx]);
            let err = ex.map(|e| value_error(value, e));
            rep.values.push(ValueRow {
                preset: p.name.clone(),
                method: m.name().into(),
                function: p.function,
                x,
                value,
                exact: ex.map(|e| e.to_f64()),
                abs_error: err.map(|e| e.absolute),
                rel_error: err.map(|e| e.relative),
            });
        }
        Ok(rep)
    });
    let mut report = Report::default();
    for part in per_method {
        let part = part?;
        report.matrices.extend(part.matrices);
        report.values.extend(part.values);
    }
    Ok(report)
}
