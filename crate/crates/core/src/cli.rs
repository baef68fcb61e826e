//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 for invalid input (unreadable or invalid
//! space, point out of range, bad options), 2 for failures while computing.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::assembler::{build, RepMatrixBundle, Strategy};
use crate::error::{Error, Result};
use crate::eval::{eval_grid, greville, uniform_grid, Evaluator};
use crate::experiment;
use crate::oracle::{fraction_json, oracle_build_matrix};
use crate::par::Execution;
use crate::presets;
use crate::scalar::fmt_real;
use crate::spaces::{validate_space, MDSpace, SpaceDescription};

#[derive(Debug, Parser)]
#[command(name = "mdbspline", version, about = "Multi-degree B-spline bases through representation matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a space description and print its dimension and partitions.
    Validate {
        #[command(flatten)]
        source: SpaceSource,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Build the representation matrix of a space.
    Matrix {
        #[command(flatten)]
        source: SpaceSource,
        #[arg(long, value_enum, default_value_t = Method::Rki)]
        method: Method,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit the exact matrix as fractions (JSON) instead.
        #[arg(long)]
        exact: bool,
    },
    /// Evaluate the basis, a spline or the Greville abscissae.
    Eval {
        #[command(flatten)]
        source: SpaceSource,
        #[arg(long, value_enum, default_value_t = Method::Rki)]
        method: Method,
        /// Comma separated evaluation points.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "grid")]
        points: Vec<f64>,
        /// Number of equally spaced points over the whole interval.
        #[arg(long)]
        grid: Option<usize>,
        /// Report only this (1-based) function.
        #[arg(long)]
        function: Option<usize>,
        /// Print full-length basis rows instead of nonzero windows.
        #[arg(long)]
        full: bool,
        /// File with spline coefficients (JSON array or whitespace/comma separated).
        #[arg(long)]
        coeffs: Option<PathBuf>,
        /// Print the Greville abscissae.
        #[arg(long)]
        greville: bool,
    },
    /// Measure errors against the exact oracle on named test spaces.
    Experiment {
        /// Preset names, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        preset: Vec<String>,
        /// Methods, comma separated (`greville` is the stable join method).
        #[arg(long, value_delimiter = ',', default_value = "greville,derivative")]
        methods: Vec<String>,
        /// Compare with exact rational results.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run on the calling thread only.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SpaceSource {
    /// JSON space description.
    #[arg(long)]
    space: Option<PathBuf>,
    /// Named test space (single members of `table7` are `table7-k5` ... `table7-k19`).
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Rki,
    Rde,
    Mixed,
    Derivative,
}

impl From<Method> for Strategy {
    fn from(m: Method) -> Self {
        match m {
            Method::Rki => Strategy::Rki,
            Method::Rde => Strategy::Rde,
            Method::Mixed => Strategy::Mixed,
            Method::Derivative => Strategy::Derivative,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn read_space(path: &Path) -> Result<MDSpace> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    parse_space(&text).map_err(|e| match e {
        Error::Input(m) => Error::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Parses and validates a JSON space description.
pub fn parse_space(text: &str) -> Result<MDSpace> {
    let desc: SpaceDescription = serde_json::from_str(text)
        .map_err(|e| Error::Input(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    validate_space(&desc)
}

fn resolve(source: &SpaceSource) -> Result<(MDSpace, Option<presets::Preset>)> {
    match (&source.space, &source.preset) {
        (Some(p), _) => Ok((read_space(p)?, None)),
        (None, Some(name)) => {
            let mut found = presets::lookup(name)?;
            if found.len() != 1 {
                return Err(Error::Input(format!(
                    "preset `{name}` names a family; use it with the experiment command"
                )));
            }
            let p = found.remove(0);
            Ok((p.space.clone(), Some(p)))
        }
        (None, None) => Err(Error::Input("no space given".into())),
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Input(format!("{}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::Input(format!("writing output: {e}"))),
    }
}

fn raw(v: f64) -> Box<RawValue> {
    let s = if v.is_finite() { fmt_real(v) } else { "null".into() };
    RawValue::from_string(s).expect("formatted reals are valid JSON")
}

fn raw_vec(v: &[f64]) -> Vec<Box<RawValue>> {
    v.iter().map(|&x| raw(x)).collect()
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Validate { source, json } => cmd_validate(&source, json, out),
        Command::Matrix {
            source,
            method,
            format,
            out: path,
            exact,
        } => cmd_matrix(&source, method.into(), format, path.as_deref(), exact, out),
        Command::Eval {
            source,
            method,
            points,
            grid,
            function,
            full,
            coeffs,
            greville,
        } => {
            let opts = EvalOptions {
                points,
                grid,
                function,
                full,
                coeffs,
                greville,
            };
            cmd_eval(&source, method.into(), &opts, out)
        }
        Command::Experiment {
            preset,
            methods,
            oracle,
            format,
            out: path,
            sequential,
        } => {
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            cmd_experiment(&preset, &methods, oracle, format, path.as_deref(), exec, out)
        }
    }
}

#[derive(Serialize)]
struct ValidationReport {
    dimension: usize,
    c0_dimension: usize,
    associated_c0: SpaceDescription,
    s: Vec<Box<RawValue>>,
    t: Vec<Box<RawValue>>,
    sections: Vec<(usize, usize, i64)>,
    join_order: Vec<(usize, i64)>,
}

fn cmd_validate(source: &SpaceSource, json: bool, out: &mut dyn Write) -> Result<()> {
    let (space, _) = resolve(source)?;
    let c0 = space.associated_c0();
    let part = space.extended_partitions()?;
    let dec = space.section_decomposition();
    if json {
        let report = ValidationReport {
            dimension: space.dim(),
            c0_dimension: c0.dim(),
            associated_c0: c0.description(),
            s: raw_vec(&part.s),
            t: raw_vec(&part.t),
            sections: dec.sections.iter().map(|s| (s.first, s.last, s.degree)).collect(),
            join_order: dec.join_order.clone(),
        };
        let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Input(e.to_string()))?;
        return emit(out, None, &format!("{text}\n"));
    }
    let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut text = format!("valid space\nK={}, K0={}\n", space.dim(), c0.dim());
    text += &format!("s: {}\nt: {}\n", list(&part.s), list(&part.t));
    for s in &dec.sections {
        text += &format!("section: intervals {}..={} degree {}\n", s.first, s.last, s.degree);
    }
    for (b, k) in &dec.join_order {
        text += &format!("join: x_{b} = {} with C^{k}\n", space.point(*b));
    }
    emit(out, None, &text)
}

#[derive(Serialize)]
struct MatrixJson<'a> {
    strategy: &'a str,
    rows: usize,
    cols: usize,
    reference: SpaceDescription,
    matrix: Vec<Vec<Box<RawValue>>>,
}

/// Matrix as CSV with `#` metadata lines.
pub fn matrix_csv(b: &RepMatrixBundle<f64>) -> Result<String> {
    let m = b.matrix();
    let reference = serde_json::to_string(&b.reference().description()).map_err(|e| Error::Input(e.to_string()))?;
    let mut head = format!(
        "# strategy={}\n# rows={} cols={}\n# reference={reference}\n",
        b.strategy,
        m.rows(),
        m.cols()
    );
    let mut w = csv::Writer::from_writer(vec![]);
    for i in 0..m.rows() {
        w.write_record(m.row(i).iter().map(|&v| fmt_real(v)))
            .map_err(|e| Error::Input(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Error::Input(e.to_string()))?;
    head.push_str(&String::from_utf8_lossy(&body));
    Ok(head)
}

/// Reads back a matrix written by [`matrix_csv`].
pub fn parse_matrix_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| Error::Input(e.to_string()))?;
            rec.iter()
                .map(|f| f.trim().parse::<f64>().map_err(|e| Error::Input(format!("`{f}`: {e}"))))
                .collect()
        })
        .collect()
}

fn cmd_matrix(
    source: &SpaceSource,
    strategy: Strategy,
    format: Format,
    path: Option<&Path>,
    exact: bool,
    out: &mut dyn Write,
) -> Result<()> {
    let (space, _) = resolve(source)?;
    if exact {
        let m = oracle_build_matrix(&space, strategy)?;
        let text = serde_json::to_string_pretty(&fraction_json(&m)).map_err(|e| Error::Input(e.to_string()))?;
        return emit(out, path, &format!("{text}\n"));
    }
    let b = build::<f64>(&space, strategy)?;
    let text = match format {
        Format::Csv => matrix_csv(&b)?,
        Format::Json => {
            let m = b.matrix();
            let doc = MatrixJson {
                strategy: b.strategy.name(),
                rows: m.rows(),
                cols: m.cols(),
                reference: b.reference().description(),
                matrix: (0..m.rows()).map(|i| raw_vec(m.row(i))).collect(),
            };
            serde_json::to_string_pretty(&doc).map_err(|e| Error::Input(e.to_string()))? + "\n"
        }
    };
    emit(out, path, &text)
}

struct EvalOptions {
    points: Vec<f64>,
    grid: Option<usize>,
    function: Option<usize>,
    full: bool,
    coeffs: Option<PathBuf>,
    greville: bool,
}

fn read_coeffs(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    if let Ok(v) = serde_json::from_str::<Vec<f64>>(&text) {
        return Ok(v);
    }
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| Error::Input(format!("coefficient `{s}`: {e}"))))
        .collect()
}

fn cmd_eval(source: &SpaceSource, strategy: Strategy, o: &EvalOptions, out: &mut dyn Write) -> Result<()> {
    let (space, _) = resolve(source)?;
    if o.greville && strategy == Strategy::Derivative {
        return Err(Error::Input(
            "the derivative method keeps no derivative levels; use --greville with rki, rde or mixed".into(),
        ));
    }
    let b = build::<f64>(&space, strategy)?;
    let k = b.dim();
    let mut text = String::new();
    if o.greville {
        text += "greville\n";
        for v in greville(&b)? {
            text += &format!("{}\n", fmt_real(v));
        }
    }
    let points = match o.grid {
        Some(n) => uniform_grid(space.a, space.b, n),
        None => o.points.clone(),
    };
    if points.is_empty() {
        if !o.greville {
            return Err(Error::Input("give --points, --grid or --greville".into()));
        }
        return emit(out, None, &text);
    }
    if let Some(f) = o.function {
        if f == 0 || f > k {
            return Err(Error::Input(format!("function index {f} outside 1..={k}")));
        }
    }
    let coeffs = o.coeffs.as_deref().map(read_coeffs).transpose()?;
    if let Some(c) = &coeffs {
        if c.len() != k {
            return Err(Error::Input(format!("{} coefficients for dimension {k}", c.len())));
        }
    }
    let windows = eval_grid(&b, &points, Execution::Parallel)?;
    if o.greville {
        text.push('\n');
    }
    let mut w = csv::Writer::from_writer(vec![]);
    let mut header = vec!["x".to_string()];
    match (o.function, o.full) {
        (Some(f), _) => header.push(format!("N{f}")),
        (None, true) => header.extend((1..=k).map(|i| format!("N{i}"))),
        (None, false) => header.extend(["first_index".into(), "values".into()]),
    }
    if coeffs.is_some() {
        header.push("spline".into());
    }
    w.write_record(&header).map_err(|e| Error::Input(e.to_string()))?;
    let ev = Evaluator::new(&b)?;
    for (x, win) in points.iter().zip(&windows) {
        let mut rec = vec![fmt_real(*x)];
        match (o.function, o.full) {
            (Some(f), _) => rec.push(fmt_real(win.get(f))),
            (None, true) => rec.extend(win.scatter(k).into_iter().map(fmt_real)),
            (None, false) => {
                rec.push(win.first_index.to_string());
                rec.push(win.values.iter().map(|&v| fmt_real(v)).collect::<Vec<_>>().join(" "));
            }
        }
        if let Some(c) = &coeffs {
            rec.push(fmt_real(ev.eval_spline(c, *x)?));
        }
        w.write_record(&rec).map_err(|e| Error::Input(e.to_string()))?;
    }
    text += &String::from_utf8_lossy(&w.into_inner().map_err(|e| Error::Input(e.to_string()))?);
    emit(out, None, &text)
}

fn cmd_experiment(
    names: &[String],
    methods: &[String],
    oracle: bool,
    format: Format,
    path: Option<&Path>,
    exec: Execution,
    out: &mut dyn Write,
) -> Result<()> {
    let mut list = Vec::new();
    for n in names {
        list.extend(presets::lookup(n.trim())?);
    }
    let methods = methods
        .iter()
        .map(|m| m.trim().parse::<Strategy>())
        .collect::<Result<Vec<_>>>()?;
    let report = experiment::run(&list, &methods, oracle, exec)?;
    let text = match format {
        Format::Csv => report.to_csv()?,
        Format::Json => serde_json::to_string_pretty(&report).map_err(|e| Error::Input(e.to_string()))? + "\n",
    };
    emit(out, path, &text)
}
