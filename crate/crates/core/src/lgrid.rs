//! Randomized L-grids and the stacked aliasing system built on them.

use alloc::vec::Vec;

use crate::aliasing::{assemble_block, AliasingMatrix};
use crate::chebgrid::GridSpec;
use crate::condition::{estimate_condition, ConditionEstimate, ConditionOptions};
use crate::error::{FctError, Result};
use crate::multiindex::IndexSet;
use crate::rng::{RngStream, STREAM_LGRID};
use crate::solver::LinearOperator;

/// Bytes per stored aliasing entry (column, row, value).
const ENTRY_BYTES: u128 = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct LGridSpec {
    pub grids: Vec<GridSpec>,
    pub seed: u64,
    pub target_n: usize,
    pub degree_cap: u32,
}

impl LGridSpec {
    pub fn len(&self) -> usize {
        self.grids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grids.is_empty()
    }

    /// Total number of function samples over all grids.
    pub fn total_samples(&self) -> usize {
        self.grids.iter().map(GridSpec::total_points).sum()
    }
}

/// Draws per-dimension point counts for one grid: dimensions are visited in
/// random order, each gets a count uniform in `1..=degree + 1`, and once the
/// running product exceeds `n` every remaining dimension gets a single point.
pub fn select_sampling_rates(
    n: usize,
    dim: usize,
    degree: u32,
    rng: &mut RngStream,
) -> Result<GridSpec> {
    if dim == 0 || n == 0 {
        return Err(FctError::InvalidArgument(
            "sampling rates need N >= 1 and D >= 1".into(),
        ));
    }
    let mut order: Vec<usize> = (0..dim).collect();
    rng.shuffle(&mut order);
    let mut counts = alloc::vec![1usize; dim];
    let mut product: u128 = 1;
    for &i in &order {
        let p = rng.range_inclusive(1, u64::from(degree) + 1) as usize;
        counts[i] = p;
        product *= p as u128;
        if product > n as u128 {
            break;
        }
    }
    GridSpec::new(counts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuildMode {
    /// Exactly this many grids.
    Fixed { blocks: usize },
    /// Add grids until the system has full column rank with condition
    /// number at most `kappa_max`.
    Adaptive {
        kappa_max: f64,
        min_blocks: usize,
        max_blocks: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub mode: BuildMode,
    pub condition: ConditionOptions,
    /// In fixed mode, also estimate the condition number when the dense
    /// estimator applies.
    pub estimate_kappa: bool,
    /// Upper bound on the bytes of aliasing entries.
    pub budget_bytes: Option<u64>,
}

impl BuildOptions {
    /// `3 D` fixed grids.
    pub fn fixed_default(dim: usize) -> Self {
        Self::fixed(3 * dim)
    }

    pub fn fixed(blocks: usize) -> Self {
        BuildOptions {
            mode: BuildMode::Fixed { blocks },
            condition: ConditionOptions::default(),
            estimate_kappa: true,
            budget_bytes: None,
        }
    }

    /// Condition-gated construction with `kappa_max = 1e4`, at least
    /// `min_blocks` and at most `10 D` grids.
    pub fn adaptive(dim: usize, min_blocks: usize) -> Self {
        BuildOptions {
            mode: BuildMode::Adaptive {
                kappa_max: 1e4,
                min_blocks: min_blocks.max(1),
                max_blocks: (10 * dim).max(min_blocks.max(1)),
            },
            condition: ConditionOptions::default(),
            estimate_kappa: true,
            budget_bytes: None,
        }
    }
}

/// Aliasing matrices of every grid of an L-grid, stacked vertically.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedSystem {
    lgrid: LGridSpec,
    blocks: Vec<AliasingMatrix>,
    row_offsets: Vec<usize>,
    n_cols: usize,
    kappa: Option<f64>,
}

impl StackedSystem {
    /// Reassembles a system from stored parts, validating their shapes.
    pub fn from_parts(
        lgrid: LGridSpec,
        blocks: Vec<AliasingMatrix>,
        n_cols: usize,
        kappa: Option<f64>,
    ) -> Result<Self> {
        if blocks.len() != lgrid.grids.len() || blocks.is_empty() {
            return Err(FctError::InvalidArgument(
                "one aliasing block per grid is required".into(),
            ));
        }
        let mut row_offsets = alloc::vec![0usize];
        for (b, g) in blocks.iter().zip(&lgrid.grids) {
            if b.n_cols() != n_cols || b.n_rows() != g.total_points() {
                return Err(FctError::InvalidArgument(
                    "aliasing block shape does not match its grid".into(),
                ));
            }
            row_offsets.push(row_offsets.last().unwrap() + b.n_rows());
        }
        Ok(StackedSystem {
            lgrid,
            blocks,
            row_offsets,
            n_cols,
            kappa,
        })
    }

    pub fn lgrid(&self) -> &LGridSpec {
        &self.lgrid
    }

    pub fn blocks(&self) -> &[AliasingMatrix] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Cumulative row offsets; block `l` owns rows `offsets[l]..offsets[l + 1]`.
    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn total_rows(&self) -> usize {
        *self.row_offsets.last().unwrap()
    }

    pub fn nnz(&self) -> usize {
        self.blocks.iter().map(AliasingMatrix::nnz).sum()
    }

    /// Condition number recorded at build time, if it was estimated.
    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    pub fn set_kappa(&mut self, kappa: Option<f64>) {
        self.kappa = kappa;
    }

    /// Number of distinct nonzero rows, an upper bound on the rank.
    pub fn nonzero_rows(&self) -> usize {
        let mut count = 0;
        let mut seen = Vec::new();
        for b in &self.blocks {
            seen.clear();
            seen.extend(b.entries().map(|(_, r, _)| r));
            seen.sort_unstable();
            seen.dedup();
            count += seen.len();
        }
        count
    }

    pub fn estimate_condition(&self, opts: &ConditionOptions) -> ConditionEstimate {
        if self.n_cols > opts.dense_limit {
            // the iterative path only applies the operator; skip the empty rows
            if let Ok(reduced) = CompressedSystem::new(self) {
                return estimate_condition(&reduced, opts);
            }
        }
        estimate_condition(self, opts)
    }

    fn push(&mut self, grid: GridSpec, block: AliasingMatrix) {
        self.row_offsets
            .push(self.total_rows() + block.n_rows());
        self.lgrid.grids.push(grid);
        self.blocks.push(block);
    }
}

impl LinearOperator for StackedSystem {
    fn n_rows(&self) -> usize {
        self.total_rows()
    }

    fn n_cols(&self) -> usize {
        self.n_cols
    }

    fn apply(&self, c: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (l, b) in self.blocks.iter().enumerate() {
            let rows = &mut out[self.row_offsets[l]..self.row_offsets[l + 1]];
            b.apply_add(c, rows);
        }
    }

    fn apply_adjoint(&self, r: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (l, b) in self.blocks.iter().enumerate() {
            b.apply_adjoint_add(&r[self.row_offsets[l]..self.row_offsets[l + 1]], out);
        }
    }

    fn column_sq_norms(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.n_cols];
        for b in &self.blocks {
            b.column_sq_norms_add(&mut out);
        }
        out
    }

    fn gram(&self) -> Vec<f64> {
        let n = self.n_cols;
        let mut g = alloc::vec![0.0; n * n];
        let mut by_row: Vec<(usize, usize, f64)> = Vec::new();
        for b in &self.blocks {
            by_row.clear();
            by_row.extend(b.entries().map(|(c, r, v)| (r, c, v)));
            by_row.sort_unstable_by_key(|e| (e.0, e.1));
            let mut start = 0;
            while start < by_row.len() {
                let mut end = start + 1;
                while end < by_row.len() && by_row[end].0 == by_row[start].0 {
                    end += 1;
                }
                for &(_, i, vi) in &by_row[start..end] {
                    for &(_, j, vj) in &by_row[start..end] {
                        g[i * n + j] += vi * vj;
                    }
                }
                start = end;
            }
        }
        g
    }
}

/// A stacked system restricted to its structurally nonzero rows.
///
/// Most rows of a stacked aliasing matrix are empty, and they contribute a
/// constant to the residual but nothing to `A^T A` or `A^T b`. Dropping them
/// leaves the least-squares solution and the normal-equations residual
/// unchanged while shrinking every CG vector to at most `nnz` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedSystem {
    n_cols: usize,
    /// Row of the full system for each kept row.
    kept: Vec<usize>,
    cols: Vec<u32>,
    rows: Vec<u32>,
    values: Vec<f64>,
}

impl CompressedSystem {
    pub fn new(system: &StackedSystem) -> Result<Self> {
        let nnz = system.nnz();
        if nnz > u32::MAX as usize || system.n_cols > u32::MAX as usize {
            return Err(FctError::Overflow("compressed system indices"));
        }
        let mut out = CompressedSystem {
            n_cols: system.n_cols,
            kept: Vec::new(),
            cols: Vec::with_capacity(nnz),
            rows: Vec::with_capacity(nnz),
            values: Vec::with_capacity(nnz),
        };
        let mut by_row: Vec<(usize, usize, f64)> = Vec::new();
        for (l, b) in system.blocks.iter().enumerate() {
            by_row.clear();
            by_row.extend(b.entries().map(|(c, r, v)| (r, c, v)));
            by_row.sort_unstable_by_key(|e| e.0);
            let offset = system.row_offsets[l];
            for &(r, c, v) in &by_row {
                if out.kept.last() != Some(&(offset + r)) {
                    out.kept.push(offset + r);
                }
                out.rows.push((out.kept.len() - 1) as u32);
                out.cols.push(c as u32);
                out.values.push(v);
            }
        }
        Ok(out)
    }

    /// Rows of the full system that were kept, in order.
    pub fn kept_rows(&self) -> &[usize] {
        &self.kept
    }

    /// The kept entries of a full right-hand side, and the squared norm of
    /// the dropped ones.
    pub fn gather(&self, rhs: &[f64]) -> (Vec<f64>, f64) {
        let kept: Vec<f64> = self.kept.iter().map(|&r| rhs[r]).collect();
        let total: f64 = rhs.iter().map(|v| v * v).sum();
        let part: f64 = kept.iter().map(|v| v * v).sum();
        (kept, (total - part).max(0.0))
    }
}

impl LinearOperator for CompressedSystem {
    fn n_rows(&self) -> usize {
        self.kept.len()
    }

    fn n_cols(&self) -> usize {
        self.n_cols
    }

    fn apply(&self, c: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for ((&col, &row), &v) in self.cols.iter().zip(&self.rows).zip(&self.values) {
            out[row as usize] += v * c[col as usize];
        }
    }

    fn apply_adjoint(&self, r: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for ((&col, &row), &v) in self.cols.iter().zip(&self.rows).zip(&self.values) {
            out[col as usize] += v * r[row as usize];
        }
    }

    fn column_sq_norms(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.n_cols];
        for (&col, &v) in self.cols.iter().zip(&self.values) {
            out[col as usize] += v * v;
        }
        out
    }
}

fn check_budget(blocks: usize, n_cols: usize, budget: Option<u64>) -> Result<()> {
    if let Some(limit) = budget {
        let required = blocks as u128 * n_cols as u128 * ENTRY_BYTES;
        if required > u128::from(limit) {
            return Err(FctError::Budget {
                required_bytes: required,
                budget_bytes: limit,
            });
        }
    }
    Ok(())
}

/// Draws the L-grid for `set` from `seed` and assembles its stacked aliasing
/// matrix. The result depends only on `(set, seed, opts.mode)`.
pub fn build_system(set: &IndexSet, opts: &BuildOptions, seed: u64) -> Result<StackedSystem> {
    let n = set.len();
    if n == 0 {
        return Err(FctError::InvalidArgument("index set is empty".into()));
    }
    let dim = set.dim();
    let degree = set.degree();
    let mut rng = RngStream::with_stream(seed, STREAM_LGRID);
    let mut system = StackedSystem {
        lgrid: LGridSpec {
            grids: Vec::new(),
            seed,
            target_n: n,
            degree_cap: degree,
        },
        blocks: Vec::new(),
        row_offsets: alloc::vec![0],
        n_cols: n,
        kappa: None,
    };
    let mut add_block = |system: &mut StackedSystem| -> Result<()> {
        check_budget(system.num_blocks() + 1, n, opts.budget_bytes)?;
        let grid = select_sampling_rates(n, dim, degree, &mut rng)?;
        let block = assemble_block(&grid, set)?;
        system.push(grid, block);
        Ok(())
    };
    match opts.mode {
        BuildMode::Fixed { blocks } => {
            if blocks == 0 {
                return Err(FctError::InvalidArgument(
                    "an L-grid needs at least one grid".into(),
                ));
            }
            check_budget(blocks, n, opts.budget_bytes)?;
            for _ in 0..blocks {
                add_block(&mut system)?;
            }
            if opts.estimate_kappa && n <= opts.condition.dense_limit {
                system.kappa = Some(system.estimate_condition(&opts.condition).kappa);
            }
            Ok(system)
        }
        BuildMode::Adaptive {
            kappa_max,
            min_blocks,
            max_blocks,
        } => {
            if !(kappa_max > 1.0) || min_blocks == 0 || max_blocks < min_blocks {
                return Err(FctError::InvalidArgument(
                    "adaptive build needs kappa_max > 1 and 1 <= min_blocks <= max_blocks".into(),
                ));
            }
            let mut last = f64::INFINITY;
            let mut deficient = true;
            while system.num_blocks() < max_blocks {
                add_block(&mut system)?;
                if system.num_blocks() < min_blocks {
                    continue;
                }
                // cheap necessary conditions before the eigenvalue estimate
                let covered = system.column_sq_norms().iter().all(|&v| v > 0.0);
                if !covered || system.nonzero_rows() < n {
                    continue;
                }
                let est = system.estimate_condition(&opts.condition);
                last = est.kappa;
                deficient = est.rank_deficient;
                if !est.rank_deficient && est.kappa <= kappa_max {
                    system.kappa = Some(est.kappa);
                    return Ok(system);
                }
            }
            if last.is_infinite() && !deficient {
                deficient = true;
            }
            Err(FctError::Conditioning {
                blocks: system.num_blocks(),
                kappa: last,
                rank_deficient: deficient,
            })
        }
    }
}
