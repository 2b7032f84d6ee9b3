//! First-kind Chebyshev grids, target functions and Chebyshev expansions.
//!
//! A grid parameter `P` always means `P` points
//! `x_k = cos((k + 1/2) pi / P)`, `k = 0..P`. Tensor-grid samples are stored
//! row-major with the last dimension fastest; the DCT and the aliasing
//! matrices use the same layout.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{FctError, Result};
use crate::multiindex::{IndexSet, Norm};
use crate::rng::RngStream;

/// Per-dimension point counts of one tensor-product grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridSpec {
    counts: Vec<usize>,
    total: usize,
}

impl GridSpec {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(FctError::InvalidArgument(
                "grid needs at least one dimension".into(),
            ));
        }
        if counts.contains(&0) {
            return Err(FctError::InvalidArgument(
                "every grid dimension needs at least one point".into(),
            ));
        }
        let total = counts
            .iter()
            .try_fold(1usize, |acc, &p| acc.checked_mul(p))
            .ok_or(FctError::Overflow("grid size"))?;
        Ok(GridSpec { counts, total })
    }

    /// `points` per dimension in `dim` dimensions.
    pub fn uniform(dim: usize, points: usize) -> Result<Self> {
        Self::new(alloc::vec![points; dim])
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total_points(&self) -> usize {
        self.total
    }

    /// Row-major strides (last dimension has stride 1).
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = alloc::vec![1usize; self.counts.len()];
        for i in (0..self.counts.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.counts[i + 1];
        }
        strides
    }
}

/// The `points` first-kind Chebyshev nodes in decreasing order.
///
/// Evaluated as `sin((P - 1 - 2k) pi / 2P)`, which equals `cos((k + 1/2) pi / P)`
/// and keeps the nodes exactly antisymmetric with an exact zero in the middle.
pub fn chebyshev_points(points: usize) -> Vec<f64> {
    let p = points as f64;
    (0..points)
        .map(|k| libm::sin((p - 1.0 - 2.0 * k as f64) * PI / (2.0 * p)))
        .collect()
}

/// `T_0(x) .. T_degree(x)` by the three-term recurrence.
pub fn chebyshev_values(x: f64, degree: usize, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if degree >= 1 {
        out.push(x);
    }
    for n in 2..=degree {
        let next = 2.0 * x * out[n - 1] - out[n - 2];
        out.push(next);
    }
}

/// Function values on a tensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleVector {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

/// A real function on `[-1, 1]^D` to be approximated.
pub trait TargetFunction {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> f64;

    /// Values on every node of `grid`, row-major. The default evaluates
    /// point by point; implementors may override with a faster exact path.
    fn sample_grid(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        sample_pointwise(self, grid)
    }
}

impl<T: TargetFunction + ?Sized> TargetFunction for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
    fn sample_grid(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        (**self).sample_grid(grid)
    }
}

/// Point-by-point grid sampling, reporting the first non-finite value.
pub fn sample_pointwise<F: TargetFunction + ?Sized>(f: &F, grid: &GridSpec) -> Result<Vec<f64>> {
    let nodes: Vec<Vec<f64>> = grid.counts().iter().map(|&p| chebyshev_points(p)).collect();
    let dim = grid.dim();
    let mut idx = alloc::vec![0usize; dim];
    let mut x: Vec<f64> = nodes.iter().map(|n| n[0]).collect();
    let mut values = Vec::with_capacity(grid.total_points());
    for _ in 0..grid.total_points() {
        let v = f.eval(&x);
        if !v.is_finite() {
            return Err(FctError::NonFinite {
                point: x.clone(),
                value: v,
            });
        }
        values.push(v);
        // advance the row-major counter
        for i in (0..dim).rev() {
            idx[i] += 1;
            if idx[i] < grid.counts()[i] {
                x[i] = nodes[i][idx[i]];
                break;
            }
            idx[i] = 0;
            x[i] = nodes[i][0];
        }
    }
    Ok(values)
}

/// Samples `f` on every node of `grid`.
pub fn sample_on_grid<F: TargetFunction + ?Sized>(f: &F, grid: &GridSpec) -> Result<SampleVector> {
    if f.dim() != grid.dim() {
        return Err(FctError::DimensionMismatch {
            expected: grid.dim(),
            found: f.dim(),
        });
    }
    let values = f.sample_grid(grid)?;
    if values.len() != grid.total_points() {
        return Err(FctError::LengthMismatch {
            expected: grid.total_points(),
            found: values.len(),
        });
    }
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(FctError::NonFinite {
            point: grid_point(grid, k),
            value: values[k],
        });
    }
    Ok(SampleVector {
        grid: grid.clone(),
        values,
    })
}

/// Coordinates of the node with row-major position `linear`.
pub fn grid_point(grid: &GridSpec, mut linear: usize) -> Vec<f64> {
    let mut x = alloc::vec![0.0; grid.dim()];
    for i in (0..grid.dim()).rev() {
        let p = grid.counts()[i];
        let k = linear % p;
        linear /= p;
        let pf = p as f64;
        x[i] = libm::sin((pf - 1.0 - 2.0 * k as f64) * PI / (2.0 * pf));
    }
    x
}

/// Chebyshev coefficients aligned with an index set.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebExpansion {
    index_set: Arc<IndexSet>,
    coefficients: Vec<f64>,
}

impl ChebExpansion {
    pub fn new(index_set: Arc<IndexSet>, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != index_set.len() {
            return Err(FctError::LengthMismatch {
                expected: index_set.len(),
                found: coefficients.len(),
            });
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(FctError::InvalidArgument(
                "expansion coefficients must be finite".into(),
            ));
        }
        Ok(ChebExpansion {
            index_set,
            coefficients,
        })
    }

    pub fn zeros(index_set: Arc<IndexSet>) -> Self {
        let n = index_set.len();
        ChebExpansion {
            index_set,
            coefficients: alloc::vec![0.0; n],
        }
    }

    pub fn index_set(&self) -> &Arc<IndexSet> {
        &self.index_set
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn dim(&self) -> usize {
        self.index_set.dim()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Coefficient of `n`, zero when `n` is outside the support.
    pub fn coefficient(&self, n: &[u32]) -> Result<f64> {
        Ok(self
            .index_set
            .position_of(n)?
            .map_or(0.0, |i| self.coefficients[i]))
    }

    /// `p(x)` at one point of `[-1, 1]^D`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let mut ev = Evaluator::new(self);
        ev.eval(x)
    }
}

/// Reusable per-dimension recurrence tables for repeated point evaluation.
struct Evaluator<'a> {
    expansion: &'a ChebExpansion,
    max_deg: Vec<usize>,
    offsets: Vec<usize>,
    table: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    fn new(expansion: &'a ChebExpansion) -> Self {
        let max_deg: Vec<usize> = expansion
            .index_set
            .max_exponents()
            .into_iter()
            .map(|d| d as usize)
            .collect();
        let mut offsets = Vec::with_capacity(max_deg.len());
        let mut acc = 0;
        for &d in &max_deg {
            offsets.push(acc);
            acc += d + 1;
        }
        Evaluator {
            expansion,
            max_deg,
            offsets,
            table: alloc::vec![0.0; acc],
            scratch: Vec::new(),
        }
    }

    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        let dim = self.expansion.dim();
        if x.len() != dim {
            return Err(FctError::DimensionMismatch {
                expected: dim,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !(-1.0..=1.0).contains(v)) {
            return Err(FctError::OutOfDomain { point: x.to_vec() });
        }
        for i in 0..dim {
            chebyshev_values(x[i], self.max_deg[i], &mut self.scratch);
            let o = self.offsets[i];
            self.table[o..o + self.scratch.len()].copy_from_slice(&self.scratch);
        }
        let mut sum = 0.0;
        for (m, &c) in self
            .expansion
            .index_set
            .iter()
            .zip(&self.expansion.coefficients)
        {
            let mut term = c;
            for (i, &e) in m.iter().enumerate() {
                if e != 0 {
                    term *= self.table[self.offsets[i] + e as usize];
                }
            }
            sum += term;
        }
        Ok(sum)
    }
}

/// `p(x)` at each point of a flat row-major `M x D` point array.
pub fn evaluate_expansion(e: &ChebExpansion, points: &[f64]) -> Result<Vec<f64>> {
    let dim = e.dim();
    if points.len() % dim != 0 {
        return Err(FctError::LengthMismatch {
            expected: (points.len() / dim + 1) * dim,
            found: points.len(),
        });
    }
    let mut ev = Evaluator::new(e);
    points.chunks_exact(dim).map(|x| ev.eval(x)).collect()
}

/// Values of an expansion on every node of a tensor grid, computed by sum
/// factorization instead of point-by-point evaluation.
///
/// Dimensions with a single node (`x = 0`) are folded into the coefficients
/// first, using `T_m(0) = cos(m pi / 2)`. The remaining terms are sorted into
/// a trie over the resolved dimensions and contracted one dimension at a time,
/// so the work is governed by the number of distinct exponent prefixes rather
/// than `|support| * grid size`.
pub fn expansion_on_grid(e: &ChebExpansion, grid: &GridSpec) -> Result<Vec<f64>> {
    let dim = e.dim();
    if grid.dim() != dim {
        return Err(FctError::DimensionMismatch {
            expected: dim,
            found: grid.dim(),
        });
    }
    let active: Vec<usize> = (0..dim).filter(|&i| grid.counts()[i] > 1).collect();
    let r = active.len();

    // Fold single-node dimensions and project onto the active ones.
    let mut keys: Vec<u32> = Vec::with_capacity(e.len() * r);
    let mut coefs: Vec<f64> = Vec::with_capacity(e.len());
    'terms: for (m, &c) in e.index_set.iter().zip(&e.coefficients) {
        let mut c = c;
        for i in 0..dim {
            if grid.counts()[i] == 1 {
                let v = m[i];
                if v % 2 == 1 {
                    continue 'terms;
                }
                if v % 4 == 2 {
                    c = -c;
                }
            }
        }
        keys.extend(active.iter().map(|&i| m[i]));
        coefs.push(c);
    }
    if r == 0 {
        return Ok(alloc::vec![coefs.iter().sum(); 1]);
    }
    let mut order: Vec<usize> = (0..coefs.len()).collect();
    order.sort_unstable_by(|&a, &b| keys[a * r..(a + 1) * r].cmp(&keys[b * r..(b + 1) * r]));
    let mut sorted_keys: Vec<u32> = Vec::with_capacity(keys.len());
    let mut sorted_coefs: Vec<f64> = Vec::with_capacity(coefs.len());
    for &t in &order {
        let key = &keys[t * r..(t + 1) * r];
        let n = sorted_coefs.len();
        if n > 0 && &sorted_keys[(n - 1) * r..n * r] == key {
            sorted_coefs[n - 1] += coefs[t];
        } else {
            sorted_keys.extend_from_slice(key);
            sorted_coefs.push(coefs[t]);
        }
    }

    // T_m(x_k) tables for each active dimension.
    let counts: Vec<usize> = active.iter().map(|&i| grid.counts()[i]).collect();
    let mut max_deg = alloc::vec![0usize; r];
    for key in sorted_keys.chunks_exact(r) {
        for (d, &v) in max_deg.iter_mut().zip(key) {
            *d = (*d).max(v as usize);
        }
    }
    let mut tables: Vec<Vec<f64>> = Vec::with_capacity(r);
    let mut col = Vec::new();
    for j in 0..r {
        let nodes = chebyshev_points(counts[j]);
        let mut t = alloc::vec![0.0; (max_deg[j] + 1) * counts[j]];
        for (k, &x) in nodes.iter().enumerate() {
            chebyshev_values(x, max_deg[j], &mut col);
            for (m, &v) in col.iter().enumerate() {
                t[m * counts[j] + k] = v;
            }
        }
        tables.push(t);
    }
    // sizes[j] = number of nodes in active dims j..r
    let mut sizes = alloc::vec![1usize; r + 1];
    for j in (0..r).rev() {
        sizes[j] = sizes[j + 1] * counts[j];
    }
    let mut out = alloc::vec![0.0; sizes[0]];
    let mut scratch: Vec<Vec<f64>> = (1..=r).map(|j| alloc::vec![0.0; sizes[j]]).collect();
    let trie = GridTrie {
        keys: &sorted_keys,
        coefs: &sorted_coefs,
        width: r,
        counts: &counts,
        tables: &tables,
        sizes: &sizes,
    };
    trie.contract(0, 0, sorted_coefs.len(), &mut out, &mut scratch);
    Ok(out)
}

struct GridTrie<'a> {
    keys: &'a [u32],
    coefs: &'a [f64],
    width: usize,
    counts: &'a [usize],
    tables: &'a [Vec<f64>],
    sizes: &'a [usize],
}

impl GridTrie<'_> {
    /// Adds into `out` (length `sizes[level]`) the grid values of terms
    /// `lo..hi`, which share their first `level` exponents.
    fn contract(
        &self,
        level: usize,
        lo: usize,
        hi: usize,
        out: &mut [f64],
        scratch: &mut [Vec<f64>],
    ) {
        if level == self.width {
            out[0] += self.coefs[lo..hi].iter().sum::<f64>();
            return;
        }
        let (child, deeper) = scratch.split_first_mut().expect("scratch per level");
        let p = self.counts[level];
        let inner = self.sizes[level + 1];
        let mut start = lo;
        while start < hi {
            let m = self.keys[start * self.width + level];
            let mut end = start + 1;
            while end < hi && self.keys[end * self.width + level] == m {
                end += 1;
            }
            child.iter_mut().for_each(|v| *v = 0.0);
            self.contract(level + 1, start, end, child, deeper);
            let row = &self.tables[level][m as usize * p..(m as usize + 1) * p];
            for (k, &t) in row.iter().enumerate() {
                if t == 0.0 {
                    continue;
                }
                let dst = &mut out[k * inner..(k + 1) * inner];
                for (d, &g) in dst.iter_mut().zip(child.iter()) {
                    *d += t * g;
                }
            }
            start = end;
        }
    }
}

/// Runge-type function `1 / (1 + 10 ||x||^2)`.
#[derive(Debug, Clone, Copy)]
pub struct RungeFunction {
    dim: usize,
}

pub fn runge_function(dim: usize) -> RungeFunction {
    RungeFunction { dim }
}

impl TargetFunction for RungeFunction {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        1.0 / (1.0 + 10.0 * r2)
    }
}

/// `sin(3 cos(3 exp(||x||^2))) + exp(sin(3 sum(x)))`.
#[derive(Debug, Clone, Copy)]
pub struct OscillatoryFunction {
    dim: usize,
}

pub fn oscillatory_function(dim: usize) -> OscillatoryFunction {
    OscillatoryFunction { dim }
}

impl TargetFunction for OscillatoryFunction {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let s: f64 = x.iter().sum();
        libm::sin(3.0 * libm::cos(3.0 * libm::exp(r2))) + libm::exp(libm::sin(3.0 * s))
    }
}

/// A target defined by a known Chebyshev expansion.
#[derive(Debug, Clone)]
pub struct ExpansionFunction {
    expansion: ChebExpansion,
}

impl ExpansionFunction {
    pub fn new(expansion: ChebExpansion) -> Self {
        ExpansionFunction { expansion }
    }

    pub fn expansion(&self) -> &ChebExpansion {
        &self.expansion
    }
}

impl TargetFunction for ExpansionFunction {
    fn dim(&self) -> usize {
        self.expansion.dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.expansion.eval(x).unwrap_or(f64::NAN)
    }
    fn sample_grid(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        expansion_on_grid(&self.expansion, grid)
    }
}

/// Coefficients drawn uniformly from `[-1, 1]` for every member of `set`.
pub fn random_expansion(set: Arc<IndexSet>, rng: &mut RngStream) -> ChebExpansion {
    let coefficients = (0..set.len()).map(|_| rng.uniform(-1.0, 1.0)).collect();
    ChebExpansion {
        index_set: set,
        coefficients,
    }
}

/// Sparse-support family: `count` distinct multi-indices drawn uniformly from
/// the max-degree box `{0..=degree}^dim`, each with a coefficient uniform in
/// `[-1, 1]`. Returns the target together with its ground-truth expansion.
pub fn sparse_support_function(
    dim: usize,
    degree: u32,
    count: usize,
    seed: u64,
) -> Result<(ExpansionFunction, ChebExpansion)> {
    if dim == 0 {
        return Err(FctError::InvalidArgument("dimension must be at least 1".into()));
    }
    let base = u128::from(degree) + 1;
    let available = (0..dim).try_fold(1u128, |acc, _| acc.checked_mul(base));
    if let Some(avail) = available {
        if count as u128 > avail {
            return Err(FctError::Infeasible {
                requested: count as u128,
                available: avail,
            });
        }
    }
    let mut rng = RngStream::with_stream(seed, crate::rng::STREAM_TRUTH);
    let mut drawn: Vec<(Vec<u32>, f64)> = Vec::with_capacity(count);
    match available.and_then(|a| u64::try_from(a).ok()) {
        Some(total) => {
            // Floyd's algorithm over row-major linear positions in the box.
            let mut chosen = BTreeSet::new();
            for j in (total - count as u64)..total {
                let t = rng.range_inclusive(0, j);
                let pick = if chosen.insert(t) { t } else {
                    chosen.insert(j);
                    j
                };
                let mut idx = alloc::vec![0u32; dim];
                let mut rest = pick;
                for slot in idx.iter_mut().rev() {
                    *slot = (rest % (u64::from(degree) + 1)) as u32;
                    rest /= u64::from(degree) + 1;
                }
                drawn.push((idx, 0.0));
            }
        }
        None => {
            let mut seen = BTreeSet::new();
            while drawn.len() < count {
                let idx: Vec<u32> = (0..dim)
                    .map(|_| rng.range_inclusive(0, u64::from(degree)) as u32)
                    .collect();
                if seen.insert(idx.clone()) {
                    drawn.push((idx, 0.0));
                }
            }
        }
    }
    for d in drawn.iter_mut() {
        d.1 = rng.uniform(-1.0, 1.0);
    }
    drawn.sort_by(|a, b| crate::multiindex::graded_cmp(&a.0, &b.0));
    let set = IndexSet::from_indices(dim, degree, Norm::Max, drawn.iter().map(|d| &d.0))?;
    let coefficients: Vec<f64> = drawn.iter().map(|d| d.1).collect();
    let expansion = ChebExpansion::new(Arc::new(set), coefficients)?;
    Ok((ExpansionFunction::new(expansion.clone()), expansion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    struct Product;
    impl TargetFunction for Product {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, x: &[f64]) -> f64 {
            x[0] * x[1]
        }
    }

    struct Ident;
    impl TargetFunction for Ident {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, x: &[f64]) -> f64 {
            x[0]
        }
    }

    struct Constant(usize);
    impl TargetFunction for Constant {
        fn dim(&self) -> usize {
            self.0
        }
        fn eval(&self, _: &[f64]) -> f64 {
            1.0
        }
    }

    struct Pole;
    impl TargetFunction for Pole {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, x: &[f64]) -> f64 {
            1.0 / x[0]
        }
    }

    #[test]
    fn points_examples() {
        let p1 = chebyshev_points(1);
        assert_eq!(p1, vec![0.0]);
        let p2 = chebyshev_points(2);
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!((p2[0] - h).abs() < 1e-15 && (p2[1] + h).abs() < 1e-15);
        let p4 = chebyshev_points(4);
        for k in 0..4 {
            assert_eq!(p4[k], -p4[3 - k]);
            assert!(p4[k] > -1.0 && p4[k] < 1.0);
            let direct = libm::cos((k as f64 + 0.5) * PI / 4.0);
            assert!((p4[k] - direct).abs() < 1e-15);
        }
        assert!(p4.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn sampling_examples() {
        let g = GridSpec::new(vec![3, 2]).unwrap();
        let s = sample_on_grid(&Constant(2), &g).unwrap();
        assert_eq!(s.values, vec![1.0; 6]);

        let h = core::f64::consts::FRAC_1_SQRT_2;
        let s = sample_on_grid(&Ident, &GridSpec::new(vec![2]).unwrap()).unwrap();
        assert!((s.values[0] - h).abs() < 1e-15 && (s.values[1] + h).abs() < 1e-15);

        let s = sample_on_grid(&Product, &GridSpec::new(vec![2, 2]).unwrap()).unwrap();
        let want = [0.5, -0.5, -0.5, 0.5];
        for (a, b) in s.values.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn sampling_rejects_non_finite_and_wrong_dim() {
        let err = sample_on_grid(&Pole, &GridSpec::new(vec![3]).unwrap()).unwrap_err();
        match err {
            FctError::NonFinite { point, .. } => assert_eq!(point, vec![0.0]),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            sample_on_grid(&Ident, &GridSpec::new(vec![2, 2]).unwrap()),
            Err(FctError::DimensionMismatch { .. })
        ));
    }

    fn expansion(dim: usize, members: &[&[u32]], coefs: &[f64]) -> ChebExpansion {
        let degree = members.iter().flat_map(|m| m.iter()).copied().max().unwrap_or(0);
        let pairs: Vec<(Vec<u32>, f64)> = members
            .iter()
            .map(|m| m.to_vec())
            .zip(coefs.iter().copied())
            .collect();
        let mut sorted = pairs.clone();
        sorted.sort_by(|a, b| crate::multiindex::graded_cmp(&a.0, &b.0));
        let set =
            IndexSet::from_indices(dim, degree, Norm::Max, sorted.iter().map(|p| &p.0)).unwrap();
        ChebExpansion::new(Arc::new(set), sorted.iter().map(|p| p.1).collect()).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let e = expansion(3, &[&[0, 0, 0]], &[1.0]);
        assert_eq!(e.eval(&[0.3, -0.9, 1.0]).unwrap(), 1.0);
        let e = expansion(1, &[&[2]], &[1.0]);
        assert!((e.eval(&[0.5]).unwrap() + 0.5).abs() < 1e-15);
        let e = expansion(2, &[&[1, 1]], &[2.0]);
        assert!((e.eval(&[0.3, -0.4]).unwrap() + 0.24).abs() < 1e-15);
        assert!(matches!(
            e.eval(&[1.5, 0.0]),
            Err(FctError::OutOfDomain { .. })
        ));
        let many = evaluate_expansion(&e, &[0.3, -0.4, 1.0, 1.0]).unwrap();
        assert_eq!(many.len(), 2);
        assert!((many[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn degree_one_products_are_exact() {
        let e = expansion(4, &[&[1, 1, 1, 1]], &[1.0]);
        let x = [0.3, -0.7, 0.11, 0.9];
        let want: f64 = x.iter().product();
        assert!((e.eval(&x).unwrap() - want).abs() <= 1e-15);
    }

    #[test]
    fn families() {
        let f1 = runge_function(3);
        assert_eq!(f1.eval(&[0.0, 0.0, 0.0]), 1.0);
        assert!((runge_function(1).eval(&[1.0]) - 1.0 / 11.0).abs() < 1e-16);
        assert!((runge_function(2).eval(&[1.0, 1.0]) - 1.0 / 21.0).abs() < 1e-16);

        let f2 = oscillatory_function(4);
        let origin = libm::sin(3.0 * libm::cos(3.0)) + 1.0;
        assert!((f2.eval(&[0.0; 4]) - origin).abs() < 1e-15);
        let e = core::f64::consts::E;
        let one = libm::sin(3.0 * libm::cos(3.0 * e)) + libm::exp(libm::sin(3.0));
        assert!((oscillatory_function(1).eval(&[1.0]) - one).abs() < 1e-14);
    }

    #[test]
    fn sparse_support_examples() {
        let (_, e) = sparse_support_function(1, 0, 1, 9).unwrap();
        assert_eq!(e.len(), 1);
        assert!(e.coefficients()[0].abs() <= 1.0);

        let (_, a) = sparse_support_function(3, 4, 20, 5).unwrap();
        let (_, b) = sparse_support_function(3, 4, 20, 5).unwrap();
        assert_eq!(a, b);
        let (_, c) = sparse_support_function(3, 4, 20, 6).unwrap();
        assert_ne!(a, c);

        assert!(matches!(
            sparse_support_function(2, 1, 5, 0),
            Err(FctError::Infeasible { .. })
        ));
        // exhausting the box is allowed
        let (_, all) = sparse_support_function(2, 1, 4, 0).unwrap();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn sparse_support_high_dimension() {
        let (_, e) = sparse_support_function(100, 5, 10_000, 7).unwrap();
        assert_eq!(e.len(), 10_000);
        assert!(e.index_set().as_flat().iter().all(|&v| v <= 5));
        assert!(e.coefficients().iter().all(|c| (-1.0..=1.0).contains(c)));
    }

    #[test]
    fn grid_fast_path_matches_pointwise() {
        let mut rng = RngStream::new(3);
        for dim in 1..=4 {
            let set = Arc::new(IndexSet::enumerate(dim, 5, Norm::One).unwrap());
            let e = random_expansion(set, &mut rng);
            let f = ExpansionFunction::new(e.clone());
            for trial in 0..5 {
                let counts: Vec<usize> = (0..dim).map(|i| 1 + (i * 3 + trial * 2) % 6).collect();
                let g = GridSpec::new(counts).unwrap();
                let fast = f.sample_grid(&g).unwrap();
                let slow = sample_pointwise(&f, &g).unwrap();
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn layout_is_consistent_under_dimension_permutation() {
        // Swapping the two axes of the grid and of the function must
        // transpose the row-major sample array.
        struct Skew;
        impl TargetFunction for Skew {
            fn dim(&self) -> usize {
                2
            }
            fn eval(&self, x: &[f64]) -> f64 {
                x[0] + 10.0 * x[1] * x[1]
            }
        }
        struct SkewT;
        impl TargetFunction for SkewT {
            fn dim(&self) -> usize {
                2
            }
            fn eval(&self, x: &[f64]) -> f64 {
                x[1] + 10.0 * x[0] * x[0]
            }
        }
        let a = sample_on_grid(&Skew, &GridSpec::new(vec![3, 5]).unwrap()).unwrap();
        let b = sample_on_grid(&SkewT, &GridSpec::new(vec![5, 3]).unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..5 {
                assert_eq!(a.values[i * 5 + j], b.values[j * 3 + i]);
            }
        }
    }
}
