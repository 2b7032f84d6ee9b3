//! The end-to-end transform, the full-tensor DCT and randomized least-squares
//! baselines, and error metrics.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::chebgrid::{
    chebyshev_values, evaluate_expansion, sample_on_grid, ChebExpansion, GridSpec, TargetFunction,
};
use crate::clock::Clock;
use crate::condition::{estimate_condition, ConditionOptions};
use crate::error::{FctError, Phase, Result};
use crate::lgrid::{build_system, BuildOptions, CompressedSystem, StackedSystem};
use crate::multiindex::{graded_cmp, IndexSet, Norm};
use crate::rng::{RngStream, STREAM_ERROR_POINTS, STREAM_RLSI};
use crate::solver::{solve_normal_cg_timed, CgOptions, CgReport, DenseMatrix};
use crate::transform::{dct_in_place, dct_in_place_with, GridPlans};

/// Wall-clock seconds spent in each phase.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub build: f64,
    pub sample: f64,
    pub transform: f64,
    pub solve: f64,
}

#[derive(Debug, Clone)]
pub struct FctConfig {
    pub index_set: Arc<IndexSet>,
    pub build: BuildOptions,
    pub cg: CgOptions,
    pub seed: u64,
}

impl FctConfig {
    /// `3 D` fixed grids and a CG tolerance of `1e-3`.
    pub fn new(index_set: Arc<IndexSet>, seed: u64) -> Self {
        let dim = index_set.dim();
        FctConfig {
            index_set,
            build: BuildOptions::fixed_default(dim),
            cg: CgOptions::default(),
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FctOutcome {
    pub expansion: ChebExpansion,
    pub report: CgReport,
    pub timings: PhaseTimings,
    pub kappa: Option<f64>,
    pub num_blocks: usize,
    pub total_samples: usize,
}

/// Builds the L-grid for `cfg` and recovers the coefficients of `f`.
pub fn fct_approximate<F: TargetFunction + ?Sized>(
    f: &F,
    cfg: &FctConfig,
    clock: &dyn Clock,
) -> Result<FctOutcome> {
    let t0 = clock.now();
    let system =
        build_system(&cfg.index_set, &cfg.build, cfg.seed).map_err(|e| e.in_phase(Phase::Build))?;
    let build = clock.now() - t0;
    let mut out = fct_with_system(f, &system, cfg.index_set.clone(), &cfg.cg, clock)?;
    out.timings.build = build;
    Ok(out)
}

/// Samples `f` on one grid and returns its aliased spectrum, with the
/// seconds spent sampling and transforming.
pub fn grid_spectrum<F: TargetFunction + ?Sized>(
    f: &F,
    grid: &GridSpec,
    clock: &dyn Clock,
) -> Result<(Vec<f64>, f64, f64)> {
    let t0 = clock.now();
    let sample = sample_on_grid(f, grid).map_err(|e| e.in_phase(Phase::Sample))?;
    let t1 = clock.now();
    let mut values = sample.values;
    let order: Vec<usize> = (0..grid.dim()).collect();
    dct_in_place(grid, &mut values, &order).map_err(|e| e.in_phase(Phase::Transform))?;
    let t2 = clock.now();
    Ok((values, t1 - t0, t2 - t1))
}

/// Recovers the coefficients of `f` on a prebuilt system.
pub fn fct_with_system<F: TargetFunction + ?Sized>(
    f: &F,
    system: &StackedSystem,
    index_set: Arc<IndexSet>,
    cg: &CgOptions,
    clock: &dyn Clock,
) -> Result<FctOutcome> {
    let mut rhs = Vec::with_capacity(system.total_rows());
    let mut timings = PhaseTimings::default();
    for grid in &system.lgrid().grids {
        let (values, ts, tt) = grid_spectrum(f, grid, clock)?;
        rhs.extend_from_slice(&values);
        timings.sample += ts;
        timings.transform += tt;
    }
    fct_solve(system, index_set, &rhs, cg, timings, clock)
}

/// Least-squares solve against a stacked right-hand side.
pub fn fct_solve(
    system: &StackedSystem,
    index_set: Arc<IndexSet>,
    rhs: &[f64],
    cg: &CgOptions,
    mut timings: PhaseTimings,
    clock: &dyn Clock,
) -> Result<FctOutcome> {
    if index_set.len() != crate::solver::LinearOperator::n_cols(system) {
        return Err(FctError::LengthMismatch {
            expected: crate::solver::LinearOperator::n_cols(system),
            found: index_set.len(),
        }
        .in_phase(Phase::Solve));
    }
    if rhs.len() != system.total_rows() {
        return Err(FctError::LengthMismatch {
            expected: system.total_rows(),
            found: rhs.len(),
        }
        .in_phase(Phase::Solve));
    }
    let t0 = clock.now();
    let reduced = CompressedSystem::new(system).map_err(|e| e.in_phase(Phase::Solve))?;
    let (kept, dropped_sq) = reduced.gather(rhs);
    let (coefs, mut report) =
        solve_normal_cg_timed(&reduced, &kept, cg, clock).map_err(|e| e.in_phase(Phase::Solve))?;
    for h in &mut report.residual_history {
        *h = libm::sqrt(*h * *h + dropped_sq);
    }
    report.wall_time = clock.now() - t0;
    timings.solve = report.wall_time;
    Ok(FctOutcome {
        expansion: ChebExpansion::new(index_set, coefs).map_err(|e| e.in_phase(Phase::Solve))?,
        report,
        timings,
        kappa: system.kappa(),
        num_blocks: system.num_blocks(),
        total_samples: system.lgrid().total_samples(),
    })
}

/// Estimated peak bytes of [`dct_interpolate`] in `dim` dimensions at
/// max-degree `degree`, or `None` if the count overflows.
///
/// Per grid point: the sample buffer, the coefficient vector, the flat index
/// set (`4 D` bytes), a sort permutation while the index set is built, and the
/// scratch of the grid sampler.
pub fn dct_memory_estimate(dim: usize, degree: u32) -> Option<u128> {
    let points = (0..dim).try_fold(1u128, |acc, _| acc.checked_mul(u128::from(degree) + 1))?;
    let per_point = 8 + 8 + 8 + 8 + 4 * dim as u128;
    points.checked_mul(per_point)
}

/// Interpolates `f` on the full tensor grid with `degree + 1` points per
/// dimension; the result is exact for polynomials of max-degree `<= degree`.
pub fn dct_interpolate<F: TargetFunction + ?Sized>(
    f: &F,
    degree: u32,
    budget_bytes: Option<u64>,
    clock: &dyn Clock,
) -> Result<(ChebExpansion, PhaseTimings)> {
    let dim = f.dim();
    let required = dct_memory_estimate(dim, degree).unwrap_or(u128::MAX);
    if let Some(limit) = budget_bytes {
        if required > u128::from(limit) {
            return Err(FctError::Budget {
                required_bytes: required,
                budget_bytes: limit,
            }
            .in_phase(Phase::Build));
        }
    }
    let t0 = clock.now();
    let p = degree as usize + 1;
    let grid = GridSpec::uniform(dim, p).map_err(|e| e.in_phase(Phase::Build))?;
    let set = IndexSet::enumerate_with_limit(dim, degree, Norm::Max, u128::MAX)
        .map_err(|e| e.in_phase(Phase::Build))?;
    let t1 = clock.now();
    let sample = sample_on_grid(f, &grid).map_err(|e| e.in_phase(Phase::Sample))?;
    let t2 = clock.now();
    let mut values = sample.values;
    let plans = GridPlans::new(&grid);
    let order: Vec<usize> = (0..dim).collect();
    dct_in_place_with(&plans, &grid, &mut values, &order)
        .map_err(|e| e.in_phase(Phase::Transform))?;
    let strides = grid.strides();
    let coefficients: Vec<f64> = set
        .iter()
        .map(|m| {
            let mut row = 0;
            let mut scale = 1.0;
            for (i, &v) in m.iter().enumerate() {
                row += v as usize * strides[i];
                if v != 0 {
                    scale *= 2.0;
                }
            }
            values[row] * scale
        })
        .collect();
    drop(values);
    let t3 = clock.now();
    let expansion =
        ChebExpansion::new(Arc::new(set), coefficients).map_err(|e| e.in_phase(Phase::Transform))?;
    let timings = PhaseTimings {
        build: t1 - t0,
        sample: t2 - t1,
        transform: t3 - t2,
        solve: 0.0,
    };
    Ok((expansion, timings))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlsiOptions {
    /// Oversampling factor: `ceil(C N)` points.
    pub oversampling: f64,
    pub kappa_max: f64,
    pub cg: CgOptions,
    pub seed: u64,
    pub budget_bytes: Option<u64>,
    pub max_attempts: usize,
    /// Condition estimation is skipped above this many unknowns.
    pub condition: ConditionOptions,
}

impl Default for RlsiOptions {
    fn default() -> Self {
        RlsiOptions {
            oversampling: 1.2,
            kappa_max: 1e4,
            cg: CgOptions::default(),
            seed: 0,
            budget_bytes: Some(4 << 30),
            max_attempts: 5,
            condition: ConditionOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RlsiOutcome {
    pub expansion: ChebExpansion,
    pub report: CgReport,
    pub timings: PhaseTimings,
    pub kappa: Option<f64>,
    pub attempts: usize,
    pub points: usize,
}

/// Estimated bytes of the dense least-squares matrix and its sample points.
pub fn rlsi_memory_estimate(n: usize, dim: usize, oversampling: f64) -> u128 {
    let m = libm::ceil(oversampling * n as f64) as u128;
    m * n as u128 * 8 + m * dim as u128 * 8 + m * 8
}

/// `count` distinct nodes of the `(degree + 1)^dim` tensor grid, as
/// per-dimension node indices.
fn draw_grid_nodes(dim: usize, degree: u32, count: usize, rng: &mut RngStream) -> Vec<Vec<u32>> {
    let base = u64::from(degree) + 1;
    let total = (0..dim).try_fold(1u64, |acc, _| acc.checked_mul(base));
    let decode = |mut linear: u64| {
        let mut idx = alloc::vec![0u32; dim];
        for slot in idx.iter_mut().rev() {
            *slot = (linear % base) as u32;
            linear /= base;
        }
        idx
    };
    match total {
        Some(total) => {
            let mut chosen = BTreeSet::new();
            let mut out = Vec::with_capacity(count);
            for j in (total - count as u64)..total {
                let t = rng.range_inclusive(0, j);
                let pick = if chosen.insert(t) {
                    t
                } else {
                    chosen.insert(j);
                    j
                };
                out.push(decode(pick));
            }
            out
        }
        None => {
            let mut seen = BTreeSet::new();
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let idx: Vec<u32> = (0..dim)
                    .map(|_| rng.range_inclusive(0, u64::from(degree)) as u32)
                    .collect();
                if seen.insert(idx.clone()) {
                    out.push(idx);
                }
            }
            out
        }
    }
}

/// Randomized least-squares interpolation: fits the coefficients on `set` to
/// `ceil(C N)` distinct random nodes of the full `(d + 1)`-point tensor grid.
pub fn rlsi_approximate<F: TargetFunction + ?Sized>(
    f: &F,
    set: Arc<IndexSet>,
    opts: &RlsiOptions,
    clock: &dyn Clock,
) -> Result<RlsiOutcome> {
    let n = set.len();
    let dim = set.dim();
    if f.dim() != dim {
        return Err(FctError::DimensionMismatch {
            expected: dim,
            found: f.dim(),
        });
    }
    let degree = set.degree();
    let m = libm::ceil(opts.oversampling * n as f64) as usize;
    let available = (0..dim).try_fold(1u128, |acc, _| acc.checked_mul(u128::from(degree) + 1));
    if let Some(avail) = available {
        if m as u128 > avail {
            return Err(FctError::Infeasible {
                requested: m as u128,
                available: avail,
            }
            .in_phase(Phase::Build));
        }
    }
    if let Some(limit) = opts.budget_bytes {
        let required = rlsi_memory_estimate(n, dim, opts.oversampling);
        if required > u128::from(limit) {
            return Err(FctError::Budget {
                required_bytes: required,
                budget_bytes: limit,
            }
            .in_phase(Phase::Build));
        }
    }
    let p = degree as usize + 1;
    let nodes = crate::chebgrid::chebyshev_points(p);
    let max_deg: Vec<usize> = set.max_exponents().iter().map(|&v| v as usize).collect();
    let mut rng = RngStream::with_stream(opts.seed, STREAM_RLSI);
    let mut timings = PhaseTimings::default();
    let mut last_kappa = f64::INFINITY;
    let mut table = Vec::new();
    for attempt in 1..=opts.max_attempts.max(1) {
        let t0 = clock.now();
        let picks = draw_grid_nodes(dim, degree, m, &mut rng);
        // T_j(x) for every node value, j up to the largest exponent
        let top = max_deg.iter().copied().max().unwrap_or(0);
        let mut node_table = alloc::vec![0.0; p * (top + 1)];
        for (k, &x) in nodes.iter().enumerate() {
            chebyshev_values(x, top, &mut table);
            node_table[k * (top + 1)..(k + 1) * (top + 1)].copy_from_slice(&table);
        }
        let mut data = Vec::with_capacity(m * n);
        for pt in &picks {
            for col in set.iter() {
                let mut v = 1.0;
                for (i, &e) in col.iter().enumerate() {
                    if e != 0 {
                        v *= node_table[pt[i] as usize * (top + 1) + e as usize];
                    }
                }
                data.push(v);
            }
        }
        let b = DenseMatrix::new(m, n, data)?;
        let kappa = if n <= opts.condition.dense_limit {
            Some(estimate_condition(&b, &opts.condition).kappa)
        } else {
            None
        };
        let t1 = clock.now();
        timings.build += t1 - t0;
        if let Some(k) = kappa {
            last_kappa = k;
            if !(k <= opts.kappa_max) {
                continue;
            }
        }
        let mut values = Vec::with_capacity(m);
        let mut x = alloc::vec![0.0; dim];
        for pt in &picks {
            for (xi, &k) in x.iter_mut().zip(pt) {
                *xi = nodes[k as usize];
            }
            let v = f.eval(&x);
            if !v.is_finite() {
                return Err(FctError::NonFinite {
                    point: x.clone(),
                    value: v,
                }
                .in_phase(Phase::Sample));
            }
            values.push(v);
        }
        timings.sample += clock.now() - t1;
        let (coefs, report) = solve_normal_cg_timed(&b, &values, &opts.cg, clock)
            .map_err(|e| e.in_phase(Phase::Solve))?;
        timings.solve = report.wall_time;
        return Ok(RlsiOutcome {
            expansion: ChebExpansion::new(set, coefs)?,
            report,
            timings,
            kappa,
            attempts: attempt,
            points: m,
        });
    }
    Err(FctError::RetryExhausted {
        attempts: opts.max_attempts.max(1),
        last_kappa,
    }
    .in_phase(Phase::Build))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorReport {
    /// `||c - c_true||_2 / N` over the union of both supports, `N` the
    /// number of true coefficients.
    pub mean_l2_coeff_error: Option<f64>,
    /// Largest `|f(x) - p(x)|` over the random points.
    pub linf_sample_error: Option<f64>,
    pub points: usize,
}

/// `||a - b||_2` with missing coefficients treated as zero.
pub fn coefficient_distance(a: &ChebExpansion, b: &ChebExpansion) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(FctError::DimensionMismatch {
            expected: b.dim(),
            found: a.dim(),
        });
    }
    if Arc::ptr_eq(a.index_set(), b.index_set()) || a.index_set() == b.index_set() {
        let s: f64 = a
            .coefficients()
            .iter()
            .zip(b.coefficients())
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        return Ok(libm::sqrt(s));
    }
    let (sa, sb) = (a.index_set(), b.index_set());
    let (ca, cb) = (a.coefficients(), b.coefficients());
    let (mut i, mut j) = (0, 0);
    let mut s = 0.0;
    while i < sa.len() || j < sb.len() {
        let ord = if i == sa.len() {
            core::cmp::Ordering::Greater
        } else if j == sb.len() {
            core::cmp::Ordering::Less
        } else {
            graded_cmp(sa.get(i), sb.get(j))
        };
        let d = match ord {
            core::cmp::Ordering::Less => {
                i += 1;
                ca[i - 1]
            }
            core::cmp::Ordering::Greater => {
                j += 1;
                cb[j - 1]
            }
            core::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
                ca[i - 1] - cb[j - 1]
            }
        };
        s += d * d;
    }
    Ok(libm::sqrt(s))
}

/// Coefficient error against a known expansion and/or sampled error against
/// the target function at `points` uniform random points.
pub fn error_report(
    e: &ChebExpansion,
    truth: Option<&ChebExpansion>,
    f: Option<&dyn TargetFunction>,
    points: usize,
    seed: u64,
) -> Result<ErrorReport> {
    if truth.is_none() && f.is_none() {
        return Err(FctError::InvalidArgument(
            "error report needs a ground truth or a target function".into(),
        ));
    }
    let mean_l2_coeff_error = match truth {
        Some(t) => Some(coefficient_distance(e, t)? / t.len().max(1) as f64),
        None => None,
    };
    let linf_sample_error = match f {
        Some(f) if points > 0 => {
            let dim = e.dim();
            let mut rng = RngStream::with_stream(seed, STREAM_ERROR_POINTS);
            let xs: Vec<f64> = (0..points * dim).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let approx = evaluate_expansion(e, &xs)?;
            let mut worst = 0.0f64;
            for (x, p) in xs.chunks_exact(dim).zip(approx) {
                let v = f.eval(x);
                let d = (v - p).abs();
                if !d.is_finite() {
                    return Err(FctError::NonFinite {
                        point: x.to_vec(),
                        value: v,
                    });
                }
                worst = worst.max(d);
            }
            Some(worst)
        }
        _ => None,
    };
    Ok(ErrorReport {
        mean_l2_coeff_error,
        linf_sample_error,
        points: if f.is_some() { points } else { 0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebgrid::{random_expansion, sparse_support_function, ExpansionFunction};
    use crate::clock::NoClock;
    use alloc::vec;

    struct Constant(usize);
    impl TargetFunction for Constant {
        fn dim(&self) -> usize {
            self.0
        }
        fn eval(&self, _: &[f64]) -> f64 {
            1.0
        }
    }

    #[test]
    fn constant_function() {
        let set = Arc::new(IndexSet::enumerate(3, 3, Norm::One).unwrap());
        let out = fct_approximate(&Constant(3), &FctConfig::new(set, 1), &NoClock).unwrap();
        let c = out.expansion.coefficients();
        assert!((c[0] - 1.0).abs() < 1e-3);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-3));
        assert_eq!(out.num_blocks, 9);
    }

    #[test]
    fn sparse_round_trip() {
        let (f, truth) = sparse_support_function(10, 5, 200, 4).unwrap();
        let sys = build_system(truth.index_set(), &BuildOptions::fixed(30), 4).unwrap();
        let cg = CgOptions {
            tol: 1e-12,
            ..CgOptions::default()
        };
        let out = fct_with_system(&f, &sys, truth.index_set().clone(), &cg, &NoClock).unwrap();
        // A column whose odd exponent falls on a single-point dimension in
        // every grid is invisible (T_odd(0) = 0); those coefficients stay 0.
        // Every covered coefficient must come back exactly.
        let norms = crate::solver::LinearOperator::column_sq_norms(&sys);
        let mut covered = 0;
        for ((&n, &c), &t) in norms
            .iter()
            .zip(out.expansion.coefficients())
            .zip(truth.coefficients())
        {
            if n > 0.0 {
                covered += 1;
                assert!((c - t).abs() < 1e-8, "{c} vs {t}");
            } else {
                assert_eq!(c, 0.0);
            }
        }
        assert!(covered > 0);
    }

    #[test]
    fn dct_interpolate_examples() {
        let set = Arc::new(IndexSet::from_indices(2, 3, Norm::Max, [[3u32, 0]].iter()).unwrap());
        let t3 = ExpansionFunction::new(ChebExpansion::new(set, vec![1.0]).unwrap());
        let (e, _) = dct_interpolate(&t3, 3, None, &NoClock).unwrap();
        for (m, &c) in e.index_set().iter().zip(e.coefficients()) {
            let want = if m == [3, 0] { 1.0 } else { 0.0 };
            assert!((c - want).abs() < 1e-13, "{m:?}: {c}");
        }

        let mut rng = RngStream::new(3);
        let full = Arc::new(IndexSet::enumerate(2, 6, Norm::Max).unwrap());
        let truth = random_expansion(full, &mut rng);
        let (e, _) =
            dct_interpolate(&ExpansionFunction::new(truth.clone()), 6, None, &NoClock).unwrap();
        assert!(coefficient_distance(&e, &truth).unwrap() < 1e-12);

        assert!(matches!(
            dct_interpolate(&Constant(25), 3, Some(4 << 30), &NoClock)
                .unwrap_err()
                .root(),
            FctError::Budget { .. }
        ));
    }

    #[test]
    fn rlsi_examples() {
        use core::cell::RefCell;
        struct Recording(RefCell<Vec<f64>>);
        impl TargetFunction for Recording {
            fn dim(&self) -> usize {
                2
            }
            fn eval(&self, x: &[f64]) -> f64 {
                let v = x[0] + 2.0 * x[1];
                self.0.borrow_mut().push(v);
                v
            }
        }
        let opts = RlsiOptions {
            cg: CgOptions {
                tol: 1e-12,
                ..CgOptions::default()
            },
            ..RlsiOptions::default()
        };
        // one column: the least-squares fit of a constant is the sample mean
        let zero = Arc::new(IndexSet::from_indices(2, 3, Norm::One, [[0u32, 0]].iter()).unwrap());
        let f = Recording(RefCell::new(Vec::new()));
        let out = rlsi_approximate(&f, zero, &opts, &NoClock).unwrap();
        assert_eq!(out.points, 2);
        let seen = f.0.borrow();
        let mean = seen.iter().sum::<f64>() / seen.len() as f64;
        assert!((out.expansion.coefficients()[0] - mean).abs() < 1e-14);

        let mut rng = RngStream::new(5);
        let set = Arc::new(IndexSet::enumerate(5, 3, Norm::One).unwrap());
        let truth = random_expansion(set.clone(), &mut rng);
        let opts = RlsiOptions {
            cg: CgOptions {
                tol: 1e-10,
                ..CgOptions::default()
            },
            seed: 2,
            ..RlsiOptions::default()
        };
        let out = rlsi_approximate(&ExpansionFunction::new(truth.clone()), set, &opts, &NoClock)
            .unwrap();
        assert_eq!(out.points, 68);
        let err = coefficient_distance(&out.expansion, &truth).unwrap();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn error_report_definitions() {
        let set = Arc::new(IndexSet::enumerate(2, 2, Norm::One).unwrap());
        let truth = ChebExpansion::new(set.clone(), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let rep = error_report(&truth, Some(&truth), None, 0, 0).unwrap();
        assert_eq!(rep.mean_l2_coeff_error, Some(0.0));
        let off = ChebExpansion::new(set.clone(), vec![1.0, 2.0, 3.5, 4.0, 5.0, 6.0]).unwrap();
        let rep = error_report(&off, Some(&truth), None, 0, 0).unwrap();
        assert!((rep.mean_l2_coeff_error.unwrap() - 0.5 / 6.0).abs() < 1e-15);

        // union support: a coefficient missing from one side counts in full
        let small = Arc::new(IndexSet::enumerate(2, 1, Norm::One).unwrap());
        let part = ChebExpansion::new(small, vec![1.0, 2.0, 3.0]).unwrap();
        let d = coefficient_distance(&part, &truth).unwrap();
        assert!((d - libm::sqrt(16.0 + 25.0 + 36.0)).abs() < 1e-12);

        let f = ExpansionFunction::new(truth.clone());
        let rep = error_report(&truth, None, Some(&f), 100, 1).unwrap();
        assert!(rep.linf_sample_error.unwrap() < 1e-13);
        assert_eq!(rep.points, 100);
        assert!(error_report(&truth, None, None, 10, 0).is_err());
    }
}
