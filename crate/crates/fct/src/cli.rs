//! Command-line interface. Every run prints one CSV row; see
//! [`crate::record::HEADER`] for the columns.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fct_core::chebgrid::{oscillatory_function, runge_function};
use fct_core::{IndexSet, Norm};

use crate::error::{Error, Result};
use crate::record::{emit, Method, RunRecord, Status};
use crate::runner::{obtain_system, run_fct, run_problem, GridMode, Problem, Provenance, RunOptions};
use crate::suites::{run_suite, Suite};
use crate::textio;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 6;

#[derive(Debug, Parser)]
#[command(name = "fct", version, about = "Fast Chebyshev Transform experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover a random polynomial with known coefficients.
    Recover(RecoverArgs),
    /// Approximate a test function over a sweep of Euclidean degrees.
    Approximate(ApproximateArgs),
    /// Run a benchmark suite.
    Bench(BenchArgs),
    /// Build a stacked aliasing system and store it in the cache.
    Precompute(PrecomputeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Fct,
    Dct,
    Rlsi,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Fct => Method::Fct,
            MethodArg::Dct => Method::Dct,
            MethodArg::Rlsi => Method::Rlsi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FunctionArg {
    Runge,
    Oscillatory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    #[value(name = "scaling-d3")]
    ScalingD3,
    #[value(name = "scaling-d6")]
    ScalingD6,
    #[value(name = "sparse-d100")]
    SparseD100,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::ScalingD3 => Suite::ScalingD3,
            SuiteArg::ScalingD6 => Suite::ScalingD6,
            SuiteArg::SparseD100 => Suite::SparseD100,
        }
    }
}

fn parse_norm(s: &str) -> std::result::Result<Norm, String> {
    Norm::parse(s).ok_or_else(|| format!("norm must be 1, 2 or inf, not `{s}`"))
}

/// How the coefficient set is specified.
#[derive(Debug, Clone, Args)]
pub struct SetArgs {
    #[arg(long, required_unless_present = "indices_file")]
    pub dim: Option<usize>,
    #[arg(long, required_unless_present = "indices_file")]
    pub degree: Option<u32>,
    /// 1 (total degree), 2 (Euclidean) or inf (max degree).
    #[arg(long, default_value = "1", value_parser = parse_norm, conflicts_with = "num_coeffs")]
    pub norm: Norm,
    /// Draw this many random members of the max-degree box instead of the
    /// whole set.
    #[arg(long, conflicts_with = "indices_file")]
    pub num_coeffs: Option<usize>,
    /// Read the coefficient set from a file.
    #[arg(long, conflicts_with_all = ["dim", "degree"])]
    pub indices_file: Option<PathBuf>,
}

impl SetArgs {
    fn problem(&self, seed: u64) -> Result<Problem> {
        if let Some(path) = &self.indices_file {
            let set = textio::load_index_set(path)?;
            return Ok(Problem::on_set(Arc::new(set), seed));
        }
        let (dim, degree) = (self.dim.unwrap_or(0), self.degree.unwrap_or(0));
        match self.num_coeffs {
            Some(count) => Problem::sparse(dim, degree, count, seed),
            None => Problem::dense(dim, degree, self.norm, seed),
        }
    }
}

/// L-grid selection and caching.
#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Number of grids (default 3 D); with --kappa, the minimum number.
    #[arg(short = 'L', long = "grids")]
    pub grids: Option<usize>,
    /// Add grids until the condition number is at most this.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// With --kappa, give up after this many grids (default 10 D).
    #[arg(long, requires = "kappa")]
    pub max_grids: Option<usize>,
    /// Cache directory for precomputed systems; FCT_CACHE_DIR overrides it.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub no_cache: bool,
}

impl GridArgs {
    fn mode(&self) -> Result<GridMode> {
        if let Some(l) = self.grids {
            if l == 0 {
                return Err(Error::Usage("-L must be at least 1".into()));
            }
        }
        match self.kappa {
            Some(k) if !(k > 1.0) => Err(Error::Usage("--kappa must exceed 1".into())),
            Some(kappa_max) => Ok(GridMode::Adaptive {
                kappa_max,
                min_blocks: self.grids,
                max_blocks: self.max_grids,
            }),
            None => Ok(GridMode::Fixed(self.grids)),
        }
    }

    fn cache_dir(&self) -> Option<PathBuf> {
        if self.no_cache {
            return None;
        }
        std::env::var_os("FCT_CACHE_DIR")
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .or_else(|| self.cache_dir.clone())
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Relative normal-equations residual at which CG stops.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Memory budget in MiB; runs that would exceed it report oom_budget.
    #[arg(long, default_value_t = 4096)]
    pub budget_mb: u64,
    /// Worker threads for per-grid sampling and transforms.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// CSV output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    fn options(&self, default_tol: f64) -> Result<RunOptions> {
        let tol = self.tol.unwrap_or(default_tol);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::Usage("--tol must lie in (0, 1)".into()));
        }
        if self.threads == 0 {
            return Err(Error::Usage("--threads must be at least 1".into()));
        }
        Ok(RunOptions {
            tol,
            seed: self.seed,
            budget_bytes: Some(self.budget_mb.saturating_mul(1 << 20)),
            threads: self.threads,
            ..RunOptions::default()
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct RecoverArgs {
    #[arg(long, value_enum, default_value = "fct")]
    pub method: MethodArg,
    #[command(flatten)]
    pub set: SetArgs,
    #[command(flatten)]
    pub grids: GridArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// RLSI oversampling factor C.
    #[arg(long, default_value_t = 1.2)]
    pub oversampling: f64,
    /// Also write the recovered expansion to this file.
    #[arg(long)]
    pub save_coeffs: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ApproximateArgs {
    #[arg(long, value_enum)]
    pub function: FunctionArg,
    #[arg(long)]
    pub dim: usize,
    /// Degree sweep `start:end:step` (inclusive), or a single degree.
    #[arg(long)]
    pub euclidean_degree: String,
    #[command(flatten)]
    pub grids: GridArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Random points for the maximum error.
    #[arg(long, default_value_t = 5000)]
    pub points: usize,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: SuiteArg,
    /// Comma-separated methods; the suite's default set when absent.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub methods: Vec<MethodArg>,
    /// Seeds per case, starting at --seed.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// Include the N >= 1e6 sparse runs.
    #[arg(long)]
    pub huge: bool,
    #[command(flatten)]
    pub grids: GridArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PrecomputeArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[command(flatten)]
    pub grids: GridArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 4096)]
    pub budget_mb: u64,
}

/// Parses a sweep `a:b:step`, `a:b` or `a`.
pub fn parse_sweep(s: &str) -> Result<Vec<u32>> {
    let bad = || Error::Usage(format!("degree sweep must be `start:end:step`, not `{s}`"));
    let parts: Vec<u32> = s
        .split(':')
        .map(|p| p.trim().parse::<u32>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (start, end, step) = match parts[..] {
        [a] => (a, a, 1),
        [a, b] => (a, b, 1),
        [a, b, c] => (a, b, c),
        _ => return Err(bad()),
    };
    if step == 0 || end < start {
        return Err(bad());
    }
    Ok((start..=end).step_by(step as usize).collect())
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Recover(a) => recover(a),
        Command::Approximate(a) => approximate(a),
        Command::Bench(a) => bench(a),
        Command::Precompute(a) => precompute(a),
    }
}

fn first_failure(rows: &[RunRecord]) -> i32 {
    rows.iter()
        .map(|r| r.status)
        .find(|&s| s != Status::Ok)
        .map_or(0, Status::exit_code)
}

fn recover(a: RecoverArgs) -> Result<i32> {
    let mut opts = a.common.options(1e-3)?;
    opts.grids = a.grids.mode()?;
    opts.cache_dir = a.grids.cache_dir();
    if !(a.oversampling >= 1.0) {
        return Err(Error::Usage("--oversampling must be at least 1".into()));
    }
    opts.oversampling = a.oversampling;
    if let Some(k) = a.grids.kappa {
        opts.rlsi_kappa_max = k;
    }
    let problem = a.set.problem(opts.seed)?;
    let result = run_problem(a.method.into(), &problem, &opts)?;
    if let (Some(path), Some(e)) = (&a.save_coeffs, &result.expansion) {
        textio::save_expansion(e, path)?;
    }
    let rows = [result.record];
    emit(&rows, a.common.out.as_deref())?;
    Ok(first_failure(&rows))
}

fn approximate(a: ApproximateArgs) -> Result<i32> {
    // the accuracy sweep is meant to show the approximation error, so CG is
    // driven far below it unless asked otherwise
    let mut opts = a.common.options(1e-12)?;
    opts.grids = a.grids.mode()?;
    opts.cache_dir = a.grids.cache_dir();
    opts.error_points = a.points;
    if a.dim == 0 {
        return Err(Error::Usage("--dim must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for degree in parse_sweep(&a.euclidean_degree)? {
        let set = Arc::new(IndexSet::enumerate(a.dim, degree, Norm::Two)?);
        let result = match a.function {
            FunctionArg::Runge => run_fct(&runge_function(a.dim), &set, None, &opts)?,
            FunctionArg::Oscillatory => run_fct(&oscillatory_function(a.dim), &set, None, &opts)?,
        };
        rows.push(result.record);
    }
    emit(&rows, a.common.out.as_deref())?;
    Ok(first_failure(&rows))
}

fn bench(a: BenchArgs) -> Result<i32> {
    let suite = Suite::from(a.suite);
    let mut opts = a.common.options(1e-3)?;
    opts.grids = a.grids.mode()?;
    opts.cache_dir = a.grids.cache_dir();
    let methods: Vec<Method> = if a.methods.is_empty() {
        suite.default_methods().to_vec()
    } else {
        a.methods.iter().map(|&m| m.into()).collect()
    };
    let rows = run_suite(suite, &methods, a.seeds, a.huge, &opts, |r| {
        eprintln!(
            "{} {} D={} N={} {}",
            suite,
            r.method,
            r.dim,
            r.n,
            r.status.as_str()
        )
    })?;
    emit(&rows, a.common.out.as_deref())?;
    Ok(0)
}

fn precompute(a: PrecomputeArgs) -> Result<i32> {
    let Some(dir) = a.grids.cache_dir() else {
        return Err(Error::Usage(
            "precompute needs --cache-dir or FCT_CACHE_DIR".into(),
        ));
    };
    let opts = RunOptions {
        grids: a.grids.mode()?,
        seed: a.seed,
        budget_bytes: Some(a.budget_mb.saturating_mul(1 << 20)),
        ..RunOptions::default()
    };
    let problem = a.set.problem(a.seed)?;
    let build = opts.build_options(problem.set.dim());
    let (sys, provenance) = obtain_system(&problem.set, &build, a.seed, Some(&dir))?;
    let (action, path) = match &provenance {
        Provenance::CacheHit(p) => ("already cached", p),
        Provenance::Stored(p) => ("stored", p),
        Provenance::Built => unreachable!("a cache directory was given"),
    };
    let kappa = sys
        .kappa()
        .map_or_else(|| "not estimated".to_string(), |k| format!("{k:e}"));
    println!("{action}: {}", path.display());
    println!(
        "N={} L={} rows={} nnz={} kappa={}",
        problem.set.len(),
        sys.num_blocks(),
        sys.total_rows(),
        sys.nnz(),
        kappa
    );
    Ok(0)
}

/// Exit code for an error that aborted a command.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::Cache(_) | Error::Csv(_) => EXIT_IO,
        Error::Core(_) | Error::Format(_) | Error::Usage(_) => EXIT_USAGE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweeps() {
        assert_eq!(parse_sweep("2:10:4").unwrap(), vec![2, 6, 10]);
        assert_eq!(parse_sweep("4:4:1").unwrap(), vec![4]);
        assert_eq!(parse_sweep("7").unwrap(), vec![7]);
        assert_eq!(parse_sweep("2:50:4").unwrap().last(), Some(&50));
        for bad in ["", "a:b", "5:1:1", "1:5:0", "1:2:3:4"] {
            assert!(parse_sweep(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn flag_conflicts_are_usage_errors() {
        for argv in [
            &["fct", "recover", "--dim", "3"][..],
            &["fct", "recover", "--dim", "3", "--degree", "2", "--indices-file", "x"],
            &["fct", "recover", "--dim", "3", "--degree", "2", "--num-coeffs", "4", "--norm", "2"],
            &["fct", "recover", "--dim", "3", "--degree", "2", "--method", "svd"],
            &["fct", "bench", "--suite", "scaling-d9"],
        ] {
            let err = Cli::try_parse_from(argv).unwrap_err();
            assert_eq!(err.exit_code(), EXIT_USAGE, "{argv:?}");
        }
        let cli = Cli::try_parse_from(["fct", "recover", "--dim", "3", "--degree", "2", "-L", "9"]).unwrap();
        let Command::Recover(a) = cli.command else { panic!() };
        assert_eq!(a.grids.mode().unwrap(), GridMode::Fixed(Some(9)));
    }
}
