use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use scq_core::ode::StepControl;
use scq_core::spps;
use serde::Serialize;
use serde_json::{json, Value};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Numerical tolerances in force for a run; echoed in every JSON document.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub spps_tail: f64,
    pub spps_intervals: usize,
    pub spps_degree: usize,
    pub ode_rtol: f64,
    pub ode_atol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_eps: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        let step = StepControl::<f64>::default();
        Self {
            spps_tail: spps::TAIL_TOLERANCE,
            spps_intervals: spps::DEFAULT_INTERVALS,
            spps_degree: spps::DEFAULT_DEGREE,
            ode_rtol: step.rtol,
            ode_atol: step.atol,
            boundary_eps: None,
        }
    }
}

pub enum Output {
    Json(Value),
    Csv { header: Vec<&'static str>, rows: Vec<Vec<String>> },
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(scq_core::Error),
    Io(io::Error),
}

impl From<scq_core::Error> for Failure {
    fn from(e: scq_core::Error) -> Self {
        Failure::Numeric(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Numeric(scq_core::Error::Domain(_)) => 2,
            Failure::Numeric(_) | Failure::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Numeric(e) => e.kind(),
            Failure::Io(_) => "io",
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Numeric(e) => e.to_string(),
            Failure::Io(e) => e.to_string(),
        }
    }

    pub fn to_json(&self, tol: &Tolerances) -> Value {
        document(tol, json!({ "error": { "kind": self.kind(), "message": self.message() } }))
    }
}

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Merges `body` (an object) under the version and tolerance header.
pub fn document(tol: &Tolerances, body: Value) -> Value {
    let mut doc = json!({ "tool_version": TOOL_VERSION, "tolerances": tol });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    doc
}

/// Writes the result; a reader that closes the pipe early is not an error.
pub fn write(output: &Output, path: Option<&Path>) -> Result<(), Failure> {
    match write_to(output, path) {
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => r,
    }
}

fn write_to(output: &Output, path: Option<&Path>) -> Result<(), Failure> {
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    };
    match output {
        Output::Json(v) => {
            serde_json::to_writer_pretty(&mut sink, v).map_err(io::Error::from)?;
            writeln!(sink)?;
        }
        Output::Csv { header, rows } => {
            let mut w = csv::Writer::from_writer(&mut sink);
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
    }
    sink.flush()?;
    Ok(())
}

/// Shortest round-trip form, in exponent notation for very small or large magnitudes.
pub fn num(x: f64) -> String {
    if x != 0.0 && x.is_finite() && !(1e-5..1e16).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
