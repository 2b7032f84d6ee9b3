//! Runs one method on one problem and turns the outcome into a [`RunRecord`].

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use fct_core::chebgrid::{random_expansion, sparse_support_function};
use fct_core::pipeline::{
    dct_interpolate, error_report, fct_solve, grid_spectrum, rlsi_approximate, PhaseTimings,
    RlsiOptions,
};
use fct_core::rng::STREAM_TRUTH;
use fct_core::{
    build_system, BuildMode, BuildOptions, CgOptions, ChebExpansion, Clock, ExpansionFunction,
    FctError, GridSpec, IndexSet, Norm, RngStream, StackedSystem, TargetFunction,
};

use crate::cache::{self, KeyMode};
use crate::error::Result;
use crate::record::{Method, RunRecord, Status, Timings};

/// Wall clock measured from its creation.
#[derive(Debug, Clone, Copy)]
pub struct StdClock {
    start: Instant,
}

impl StdClock {
    pub fn new() -> Self {
        StdClock {
            start: Instant::now(),
        }
    }
}

impl Default for StdClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for StdClock {
    fn now(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

/// A polynomial with known coefficients to recover.
#[derive(Debug, Clone)]
pub struct Problem {
    pub set: Arc<IndexSet>,
    pub truth: ChebExpansion,
    pub target: ExpansionFunction,
}

impl Problem {
    /// Uniform random coefficients on `set`.
    pub fn on_set(set: Arc<IndexSet>, seed: u64) -> Self {
        let mut rng = RngStream::with_stream(seed, STREAM_TRUTH);
        let truth = random_expansion(set.clone(), &mut rng);
        Problem {
            set,
            target: ExpansionFunction::new(truth.clone()),
            truth,
        }
    }

    pub fn dense(dim: usize, degree: u32, norm: Norm, seed: u64) -> Result<Self> {
        let set = IndexSet::enumerate(dim, degree, norm)?;
        Ok(Self::on_set(Arc::new(set), seed))
    }

    /// `count` random members of the max-degree box.
    pub fn sparse(dim: usize, degree: u32, count: usize, seed: u64) -> Result<Self> {
        let (target, truth) = sparse_support_function(dim, degree, count, seed)?;
        Ok(Problem {
            set: truth.index_set().clone(),
            truth,
            target,
        })
    }
}

/// How the FCT L-grid is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridMode {
    /// `blocks` grids, or `3 D` when `None`.
    Fixed(Option<usize>),
    /// Grids are added until `kappa <= kappa_max`, starting from `min_blocks`
    /// and giving up after `max_blocks` (default `10 D`).
    Adaptive {
        kappa_max: f64,
        min_blocks: Option<usize>,
        max_blocks: Option<usize>,
    },
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub grids: GridMode,
    pub tol: f64,
    pub seed: u64,
    pub budget_bytes: Option<u64>,
    pub cache_dir: Option<PathBuf>,
    pub threads: usize,
    /// RLSI oversampling factor.
    pub oversampling: f64,
    /// RLSI redraw threshold.
    pub rlsi_kappa_max: f64,
    /// Random points for the sampled max-error, 0 to skip it.
    pub error_points: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            grids: GridMode::Fixed(None),
            tol: 1e-3,
            seed: 1,
            budget_bytes: Some(4096 << 20),
            cache_dir: None,
            threads: 1,
            oversampling: 1.2,
            rlsi_kappa_max: 1e4,
            error_points: 0,
        }
    }
}

impl RunOptions {
    pub fn build_options(&self, dim: usize) -> BuildOptions {
        let mut opts = match self.grids {
            GridMode::Fixed(None) => BuildOptions::fixed_default(dim),
            GridMode::Fixed(Some(l)) => BuildOptions::fixed(l),
            GridMode::Adaptive {
                kappa_max,
                min_blocks,
                max_blocks,
            } => {
                let mut o = BuildOptions::adaptive(dim, min_blocks.unwrap_or(1));
                if let BuildMode::Adaptive {
                    kappa_max: k,
                    min_blocks: lo,
                    max_blocks: hi,
                } = &mut o.mode
                {
                    *k = kappa_max;
                    if let Some(m) = max_blocks {
                        *hi = m.max(*lo);
                    }
                }
                o
            }
        };
        opts.budget_bytes = self.budget_bytes;
        opts.condition.seed = self.seed;
        opts
    }

    fn cg(&self) -> CgOptions {
        CgOptions {
            tol: self.tol,
            ..CgOptions::default()
        }
    }
}

pub fn key_mode(opts: &BuildOptions) -> KeyMode {
    match opts.mode {
        BuildMode::Fixed { blocks } => KeyMode::Fixed(blocks),
        BuildMode::Adaptive {
            kappa_max,
            min_blocks,
            ..
        } => KeyMode::Adaptive {
            kappa_max,
            min_blocks,
        },
    }
}

/// Where a system came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Built,
    /// Loaded from this cache file.
    CacheHit(PathBuf),
    /// Built and written to this cache file.
    Stored(PathBuf),
}

/// Loads the system for `(set, seed, opts)` from `cache_dir` if a valid file
/// exists, otherwise builds it and, with a cache directory, stores it.
/// Unusable cache files are reported on stderr and replaced.
pub fn obtain_system(
    set: &IndexSet,
    opts: &BuildOptions,
    seed: u64,
    cache_dir: Option<&Path>,
) -> Result<(StackedSystem, Provenance)> {
    let Some(dir) = cache_dir else {
        return Ok((build_system(set, opts, seed)?, Provenance::Built));
    };
    let name = cache::cache_file_name(set, seed, key_mode(opts));
    let path = dir.join(&name);
    if path.exists() {
        match cache::load(&path, set, seed) {
            Ok(sys) => {
                eprintln!("cache hit: {}", path.display());
                return Ok((sys, Provenance::CacheHit(path)));
            }
            Err(e) => eprintln!("ignoring {}: {e}; rebuilding", path.display()),
        }
    }
    let sys = build_system(set, opts, seed)?;
    let stored = cache::store(dir, &name, &sys, set)?;
    Ok((sys, Provenance::Stored(stored)))
}

/// DCT output of one grid with its sampling and transform seconds.
type GridSpectrum = (Vec<f64>, f64, f64);

/// Stacked DCT outputs of `f` over all grids, with summed sampling and
/// transform seconds. Grids are split into contiguous chunks across
/// `threads` workers; the result does not depend on the thread count.
pub fn stacked_spectrum<F: TargetFunction + Sync>(
    f: &F,
    grids: &[GridSpec],
    threads: usize,
    clock: &StdClock,
) -> fct_core::Result<(Vec<f64>, f64, f64)> {
    let threads = threads.clamp(1, grids.len().max(1));
    let chunk = grids.len().div_ceil(threads).max(1);
    let parts: Vec<fct_core::Result<Vec<GridSpectrum>>> = if threads == 1 {
        vec![grids.iter().map(|g| grid_spectrum(f, g, clock)).collect()]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = grids
                .chunks(chunk)
                .map(|part| s.spawn(move || part.iter().map(|g| grid_spectrum(f, g, clock)).collect()))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("spectrum worker panicked"))
                .collect()
        })
    };
    let mut rhs = Vec::new();
    let (mut sample, mut transform) = (0.0, 0.0);
    for part in parts {
        for (values, ts, tt) in part? {
            rhs.extend_from_slice(&values);
            sample += ts;
            transform += tt;
        }
    }
    Ok((rhs, sample, transform))
}

/// Outcome of one run: its CSV row and, when it produced one, the
/// recovered expansion.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub record: RunRecord,
    pub expansion: Option<ChebExpansion>,
    pub provenance: Option<Provenance>,
}

/// Failure statuses that become CSV rows instead of errors.
fn failure_status(e: &FctError) -> Option<Status> {
    match e.root() {
        FctError::Budget { .. } => Some(Status::OomBudget),
        FctError::Conditioning { .. } | FctError::RetryExhausted { .. } => Some(Status::CondFail),
        FctError::Breakdown { .. } => Some(Status::NoConverge),
        _ => None,
    }
}

fn kappa_of(e: &FctError) -> Option<f64> {
    match e.root() {
        FctError::Conditioning { kappa, .. } => Some(*kappa),
        FctError::RetryExhausted { last_kappa, .. } => Some(*last_kappa),
        _ => None,
    }
}

/// FCT on a generic target; `truth` enables the coefficient error.
pub fn run_fct<F: TargetFunction + Sync>(
    f: &F,
    set: &Arc<IndexSet>,
    truth: Option<&ChebExpansion>,
    opts: &RunOptions,
) -> Result<RunResult> {
    let clock = StdClock::new();
    let build = opts.build_options(set.dim());
    let mut record = blank_record(Method::Fct, set, opts.seed);
    let t0 = clock.now();
    let (system, provenance) = match obtain_system(set, &build, opts.seed, opts.cache_dir.as_deref()) {
        Ok(v) => v,
        Err(crate::Error::Core(e)) => return fail(record, &e),
        Err(e) => return Err(e),
    };
    let build_s = clock.now() - t0;
    record.blocks = Some(system.num_blocks());
    record.kappa_estimate = system.kappa();
    let outcome = stacked_spectrum(f, &system.lgrid().grids, opts.threads, &clock).and_then(
        |(rhs, sample, transform)| {
            let timings = PhaseTimings {
                build: build_s,
                sample,
                transform,
                solve: 0.0,
            };
            fct_solve(&system, set.clone(), &rhs, &opts.cg(), timings, &clock)
        },
    );
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => return fail(record, &e),
    };
    record.timings = Some(Timings::from_seconds(&outcome.timings));
    record.cg_iterations = Some(outcome.report.iterations);
    if !outcome.report.converged {
        record.status = Status::NoConverge;
    }
    let target: Option<&dyn TargetFunction> = (opts.error_points > 0).then_some(f as _);
    finish(record, outcome.expansion, truth, target, opts, Some(provenance))
}

/// Full-tensor DCT interpolation at the set's degree.
pub fn run_dct<F: TargetFunction + Sync>(
    f: &F,
    set: &Arc<IndexSet>,
    truth: Option<&ChebExpansion>,
    opts: &RunOptions,
) -> Result<RunResult> {
    let clock = StdClock::new();
    let record = blank_record(Method::Dct, set, opts.seed);
    match dct_interpolate(f, set.degree(), opts.budget_bytes, &clock) {
        Ok((expansion, timings)) => {
            let mut record = record;
            record.timings = Some(Timings::from_seconds(&timings));
            let target: Option<&dyn TargetFunction> = (opts.error_points > 0).then_some(f as _);
            finish(record, expansion, truth, target, opts, None)
        }
        Err(e) => fail(record, &e),
    }
}

/// Randomized least-squares interpolation on `ceil(C N)` grid nodes.
pub fn run_rlsi<F: TargetFunction + Sync>(
    f: &F,
    set: &Arc<IndexSet>,
    truth: Option<&ChebExpansion>,
    opts: &RunOptions,
) -> Result<RunResult> {
    let clock = StdClock::new();
    let mut record = blank_record(Method::Rlsi, set, opts.seed);
    let rlsi = RlsiOptions {
        oversampling: opts.oversampling,
        kappa_max: opts.rlsi_kappa_max,
        cg: opts.cg(),
        seed: opts.seed,
        budget_bytes: opts.budget_bytes,
        ..RlsiOptions::default()
    };
    match rlsi_approximate(f, set.clone(), &rlsi, &clock) {
        Ok(out) => {
            record.timings = Some(Timings::from_seconds(&out.timings));
            record.cg_iterations = Some(out.report.iterations);
            record.kappa_estimate = out.kappa;
            if !out.report.converged {
                record.status = Status::NoConverge;
            }
            let target: Option<&dyn TargetFunction> = (opts.error_points > 0).then_some(f as _);
            finish(record, out.expansion, truth, target, opts, None)
        }
        Err(e) => fail(record, &e),
    }
}

/// Runs `method` on a problem with known coefficients.
pub fn run_problem(method: Method, problem: &Problem, opts: &RunOptions) -> Result<RunResult> {
    let (f, set, truth) = (&problem.target, &problem.set, Some(&problem.truth));
    match method {
        Method::Fct => run_fct(f, set, truth, opts),
        Method::Dct => run_dct(f, set, truth, opts),
        Method::Rlsi => run_rlsi(f, set, truth, opts),
    }
}

fn blank_record(method: Method, set: &IndexSet, seed: u64) -> RunRecord {
    RunRecord {
        method,
        dim: set.dim(),
        degree: set.degree(),
        norm: set.norm().to_string(),
        n: set.len(),
        blocks: None,
        seed,
        timings: None,
        cg_iterations: None,
        kappa_estimate: None,
        mean_l2_coeff_error: None,
        linf_error: None,
        status: Status::Ok,
    }
}

fn fail(mut record: RunRecord, e: &FctError) -> Result<RunResult> {
    let Some(status) = failure_status(e) else {
        return Err(e.clone().into());
    };
    record.status = status;
    if record.kappa_estimate.is_none() {
        record.kappa_estimate = kappa_of(e);
    }
    Ok(RunResult {
        record,
        expansion: None,
        provenance: None,
    })
}

fn finish(
    mut record: RunRecord,
    expansion: ChebExpansion,
    truth: Option<&ChebExpansion>,
    target: Option<&dyn TargetFunction>,
    opts: &RunOptions,
    provenance: Option<Provenance>,
) -> Result<RunResult> {
    if truth.is_some() || target.is_some() {
        let report = error_report(&expansion, truth, target, opts.error_points, opts.seed)?;
        record.mean_l2_coeff_error = report.mean_l2_coeff_error;
        record.linf_error = report.linf_sample_error;
    }
    Ok(RunResult {
        record,
        expansion: Some(expansion),
        provenance,
    })
}
