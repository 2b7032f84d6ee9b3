//! One CSV row per run.

use std::fmt;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

pub const HEADER: [&str; 16] = [
    "method",
    "D",
    "d",
    "norm",
    "N",
    "L",
    "seed",
    "build_ms",
    "sample_ms",
    "transform_ms",
    "solve_ms",
    "cg_iterations",
    "kappa_estimate",
    "mean_l2_coeff_error",
    "linf_error",
    "status",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Fct,
    Dct,
    Rlsi,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Fct => "fct",
            Method::Dct => "dct",
            Method::Rlsi => "rlsi",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Ok,
    OomBudget,
    NoConverge,
    CondFail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::OomBudget => "oom_budget",
            Status::NoConverge => "no_converge",
            Status::CondFail => "cond_fail",
        }
    }

    /// Process exit code for a run ending in this status.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::OomBudget => 3,
            Status::CondFail => 4,
            Status::NoConverge => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Timings {
    pub build_ms: f64,
    pub sample_ms: f64,
    pub transform_ms: f64,
    pub solve_ms: f64,
}

impl Timings {
    pub fn from_seconds(t: &fct_core::pipeline::PhaseTimings) -> Self {
        Timings {
            build_ms: t.build * 1e3,
            sample_ms: t.sample * 1e3,
            transform_ms: t.transform * 1e3,
            solve_ms: t.solve * 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub method: Method,
    pub dim: usize,
    pub degree: u32,
    pub norm: String,
    pub n: usize,
    /// Number of grids; empty for the baselines.
    pub blocks: Option<usize>,
    pub seed: u64,
    pub timings: Option<Timings>,
    pub cg_iterations: Option<usize>,
    pub kappa_estimate: Option<f64>,
    pub mean_l2_coeff_error: Option<f64>,
    pub linf_error: Option<f64>,
    pub status: Status,
}

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn opt_sci(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v:e}"))
}

fn ms(v: f64) -> String {
    format!("{v:.3}")
}

impl RunRecord {
    pub fn fields(&self) -> [String; 16] {
        let ok = self.status == Status::Ok;
        let t = self.timings.as_ref();
        [
            self.method.to_string(),
            self.dim.to_string(),
            self.degree.to_string(),
            self.norm.clone(),
            self.n.to_string(),
            opt(self.blocks),
            self.seed.to_string(),
            t.map_or_else(String::new, |t| ms(t.build_ms)),
            t.map_or_else(String::new, |t| ms(t.sample_ms)),
            t.map_or_else(String::new, |t| ms(t.transform_ms)),
            t.map_or_else(String::new, |t| ms(t.solve_ms)),
            opt(self.cg_iterations),
            opt_sci(self.kappa_estimate.filter(|k| k.is_finite())),
            opt_sci(self.mean_l2_coeff_error.filter(|_| ok)),
            opt_sci(self.linf_error.filter(|_| ok)),
            self.status.as_str().to_string(),
        ]
    }
}

/// Writes the header and all rows as CSV.
pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the CSV to `path` atomically, or to standard output when `path`
/// is `None` or `-`.
pub fn emit(records: &[RunRecord], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            let mut buf = Vec::new();
            write_csv(records, &mut buf)?;
            crate::atomic_write(p, &buf)
        }
        _ => write_csv(records, std::io::stdout().lock()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(status: Status) -> RunRecord {
        RunRecord {
            method: Method::Fct,
            dim: 10,
            degree: 3,
            norm: "1".into(),
            n: 286,
            blocks: Some(30),
            seed: 1,
            timings: Some(Timings {
                build_ms: 1.0,
                sample_ms: 2.0,
                transform_ms: 3.0,
                solve_ms: 4.0,
            }),
            cg_iterations: Some(12),
            kappa_estimate: Some(3.5),
            mean_l2_coeff_error: Some(1e-9),
            linf_error: None,
            status,
        }
    }

    #[test]
    fn header_and_row() {
        let mut buf = Vec::new();
        write_csv(&[record(Status::Ok)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), HEADER.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "fct,10,3,1,286,30,1,1.000,2.000,3.000,4.000,12,3.5e0,1e-9,,ok"
        );
    }

    #[test]
    fn failed_runs_leave_error_fields_empty() {
        let f = record(Status::NoConverge).fields();
        assert_eq!(f[13], "");
        assert_eq!(f[14], "");
        assert_eq!(f[15], "no_converge");
        assert_eq!(Status::OomBudget.exit_code(), 3);
    }
}
