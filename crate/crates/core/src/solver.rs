//! Linear operators and conjugate gradients on the normal equations.

use alloc::vec::Vec;

use crate::clock::{Clock, NoClock};
use crate::error::{FctError, Result};

/// A real matrix available only through products with it and its transpose.
pub trait LinearOperator {
    fn n_rows(&self) -> usize;

    fn n_cols(&self) -> usize;

    /// `out = A c`.
    fn apply(&self, c: &[f64], out: &mut [f64]);

    /// `out = A^T r`.
    fn apply_adjoint(&self, r: &[f64], out: &mut [f64]);

    /// `||A e_j||^2` for every column.
    fn column_sq_norms(&self) -> Vec<f64> {
        let n = self.n_cols();
        let mut e = alloc::vec![0.0; n];
        let mut col = alloc::vec![0.0; self.n_rows()];
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            out.push(dot(&col, &col));
            e[j] = 0.0;
        }
        out
    }

    /// Dense `A^T A`, row-major `n_cols x n_cols`.
    fn gram(&self) -> Vec<f64> {
        let n = self.n_cols();
        let mut g = alloc::vec![0.0; n * n];
        let mut e = alloc::vec![0.0; n];
        let mut col = alloc::vec![0.0; self.n_rows()];
        let mut row = alloc::vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            self.apply_adjoint(&col, &mut row);
            for i in 0..n {
                g[i * n + j] = row[i];
            }
            e[j] = 0.0;
        }
        g
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn n_rows(&self) -> usize {
        (**self).n_rows()
    }
    fn n_cols(&self) -> usize {
        (**self).n_cols()
    }
    fn apply(&self, c: &[f64], out: &mut [f64]) {
        (**self).apply(c, out)
    }
    fn apply_adjoint(&self, r: &[f64], out: &mut [f64]) {
        (**self).apply_adjoint(r, out)
    }
    fn column_sq_norms(&self) -> Vec<f64> {
        (**self).column_sq_norms()
    }
    fn gram(&self) -> Vec<f64> {
        (**self).gram()
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(FctError::LengthMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

impl LinearOperator for DenseMatrix {
    fn n_rows(&self) -> usize {
        self.rows
    }
    fn n_cols(&self) -> usize {
        self.cols
    }
    fn apply(&self, c: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), c);
        }
    }
    fn apply_adjoint(&self, r: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, &ri) in r.iter().enumerate() {
            if ri != 0.0 {
                for (o, &a) in out.iter_mut().zip(self.row(i)) {
                    *o += a * ri;
                }
            }
        }
    }
    fn column_sq_norms(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.cols];
        for i in 0..self.rows {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * a;
            }
        }
        out
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Target for `||A^T (b - A c)|| / ||A^T b||`.
    pub tol: f64,
    /// Iteration cap; `None` means ten times the number of unknowns.
    pub max_iter: Option<usize>,
    /// Scale by `diag(A^T A)^{-1}`.
    pub jacobi: bool,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions {
            tol: 1e-3,
            max_iter: None,
            jacobi: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    /// `||A^T (b - A c)|| / ||A^T b||` at the returned iterate.
    pub relative_residual: f64,
    pub converged: bool,
    /// Seconds, as measured by the supplied clock.
    pub wall_time: f64,
    /// `||b - A c_k||` for `k = 0..=iterations`.
    pub residual_history: Vec<f64>,
    /// Columns of `A` that are identically zero; nonzero means the
    /// least-squares solution is not unique and those coefficients stay 0.
    pub zero_columns: usize,
}

/// Solves `min ||A c - b||` by conjugate gradients on `A^T A c = A^T b`,
/// starting from `c = 0`.
pub fn solve_normal_cg<A: LinearOperator + ?Sized>(
    a: &A,
    b: &[f64],
    opts: &CgOptions,
) -> Result<(Vec<f64>, CgReport)> {
    solve_normal_cg_timed(a, b, opts, &NoClock)
}

pub fn solve_normal_cg_timed<A: LinearOperator + ?Sized>(
    a: &A,
    b: &[f64],
    opts: &CgOptions,
    clock: &dyn Clock,
) -> Result<(Vec<f64>, CgReport)> {
    let start = clock.now();
    let (m, n) = (a.n_rows(), a.n_cols());
    if b.len() != m {
        return Err(FctError::LengthMismatch {
            expected: m,
            found: b.len(),
        });
    }
    if !(opts.tol > 0.0) {
        return Err(FctError::InvalidArgument(
            "CG tolerance must be positive".into(),
        ));
    }
    let max_iter = opts.max_iter.unwrap_or(10 * n.max(1));
    let col_norms = a.column_sq_norms();
    let zero_columns = col_norms.iter().filter(|&&v| v == 0.0).count();
    let inv_diag: Vec<f64> = col_norms
        .iter()
        .map(|&v| if opts.jacobi && v > 0.0 { 1.0 / v } else if v > 0.0 { 1.0 } else { 0.0 })
        .collect();

    let mut x = alloc::vec![0.0; n];
    let mut s = b.to_vec(); // b - A x
    let mut r = alloc::vec![0.0; n]; // A^T s
    a.apply_adjoint(&s, &mut r);
    let rhs_norm = norm(&r);
    let mut history = alloc::vec![norm(&s)];
    let finish = |x: Vec<f64>, iterations, rel, converged, history| {
        let report = CgReport {
            iterations,
            relative_residual: rel,
            converged,
            wall_time: clock.now() - start,
            residual_history: history,
            zero_columns,
        };
        Ok((x, report))
    };
    if rhs_norm == 0.0 {
        return finish(x, 0, 0.0, true, history);
    }
    if !rhs_norm.is_finite() {
        return Err(FctError::Breakdown { iteration: 0 });
    }

    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = alloc::vec![0.0; m];
    let mut rel = 1.0;
    let mut it = 0;
    while it < max_iter {
        it += 1;
        a.apply(&p, &mut q);
        let qq = dot(&q, &q);
        if !qq.is_finite() || !rz.is_finite() {
            return Err(FctError::Breakdown { iteration: it });
        }
        if qq == 0.0 {
            // search direction in the null space: no further progress possible
            it -= 1;
            break;
        }
        let alpha = rz / qq;
        for (xi, pi) in x.iter_mut().zip(&p) {
            *xi += alpha * pi;
        }
        for (si, qi) in s.iter_mut().zip(&q) {
            *si -= alpha * qi;
        }
        a.apply_adjoint(&s, &mut r);
        rel = norm(&r) / rhs_norm;
        if !rel.is_finite() {
            return Err(FctError::Breakdown { iteration: it });
        }
        if rel <= opts.tol {
            // confirm against the true residual before stopping
            a.apply(&x, &mut q);
            for ((si, bi), qi) in s.iter_mut().zip(b).zip(&q) {
                *si = bi - qi;
            }
            a.apply_adjoint(&s, &mut r);
            rel = norm(&r) / rhs_norm;
            history.push(norm(&s));
            if rel <= opts.tol {
                return finish(x, it, rel, true, history);
            }
        } else {
            history.push(norm(&s));
        }
        for ((zi, ri), di) in z.iter_mut().zip(&r).zip(&inv_diag) {
            *zi = ri * di;
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    finish(x, it, rel, false, history)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use alloc::vec;

    fn random_dense(rows: usize, cols: usize, rng: &mut RngStream) -> DenseMatrix {
        let data = (0..rows * cols).map(|_| rng.uniform(-1.0, 1.0)).collect();
        DenseMatrix::new(rows, cols, data).unwrap()
    }

    #[test]
    fn single_column_is_exact_in_one_step() {
        let a = DenseMatrix::new(3, 1, vec![0.0, 0.5, 0.0]).unwrap();
        let (x, rep) = solve_normal_cg(&a, &[0.0, 1.0, 0.0], &CgOptions::default()).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-15);
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
    }

    #[test]
    fn recovers_random_least_squares_solution() {
        let mut rng = RngStream::new(4);
        let a = random_dense(40, 12, &mut rng);
        let c: Vec<f64> = (0..12).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let mut b = vec![0.0; 40];
        a.apply(&c, &mut b);
        for jacobi in [false, true] {
            let opts = CgOptions {
                tol: 1e-13,
                jacobi,
                ..CgOptions::default()
            };
            let (x, rep) = solve_normal_cg(&a, &b, &opts).unwrap();
            assert!(rep.converged);
            for (u, v) in x.iter().zip(&c) {
                assert!((u - v).abs() < 1e-10);
            }
            for w in rep.residual_history.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-10) + 1e-14);
            }
        }
    }

    #[test]
    fn zero_rhs_and_zero_columns() {
        let a = DenseMatrix::new(2, 2, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let (x, rep) = solve_normal_cg(&a, &[0.0, 0.0], &CgOptions::default()).unwrap();
        assert_eq!(x, vec![0.0, 0.0]);
        assert_eq!(rep.iterations, 0);
        let (x, rep) = solve_normal_cg(&a, &[1.0, 3.0], &CgOptions::default()).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-14);
        assert_eq!(x[1], 0.0);
        assert_eq!(rep.zero_columns, 1);
    }

    #[test]
    fn breakdown_on_nan() {
        let a = DenseMatrix::new(1, 1, vec![1.0]).unwrap();
        assert!(matches!(
            solve_normal_cg(&a, &[f64::NAN], &CgOptions::default()),
            Err(FctError::Breakdown { .. })
        ));
    }

    #[test]
    fn default_gram_matches_dense() {
        let mut rng = RngStream::new(5);
        let a = random_dense(6, 4, &mut rng);
        let g = a.gram();
        for i in 0..4 {
            for j in 0..4 {
                let want: f64 = (0..6).map(|r| a.row(r)[i] * a.row(r)[j]).sum();
                assert!((g[i * 4 + j] - want).abs() < 1e-14);
            }
        }
    }
}
