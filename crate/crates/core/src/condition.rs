//! Extreme singular values and the condition number of a linear operator.
//!
//! Small problems form `A^T A` densely and use a symmetric eigensolver; larger
//! ones run power iteration for `sigma_max` and inverse iteration (inner CG
//! solves with `A^T A`) for `sigma_min`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::rng::RngStream;
use crate::solver::{dot, norm, LinearOperator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionOptions {
    /// Use the dense path up to this many columns.
    pub dense_limit: usize,
    /// Relative change in the eigenvalue estimates that stops the iterations.
    pub tol: f64,
    pub max_iter: usize,
    /// Seed of the random start vectors.
    pub seed: u64,
}

impl Default for ConditionOptions {
    fn default() -> Self {
        ConditionOptions {
            dense_limit: 2000,
            tol: 1e-6,
            max_iter: 300,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionEstimate {
    pub sigma_max: f64,
    pub sigma_min: f64,
    /// `sigma_max / sigma_min`, infinite when the operator looks rank deficient.
    pub kappa: f64,
    pub rank_deficient: bool,
    /// Whether the dense eigensolver produced the estimate.
    pub dense: bool,
}

impl ConditionEstimate {
    fn from_parts(sigma_max: f64, sigma_min: f64, rank_deficient: bool, dense: bool) -> Self {
        let kappa = if rank_deficient || sigma_min <= 0.0 {
            f64::INFINITY
        } else {
            sigma_max / sigma_min
        };
        ConditionEstimate {
            sigma_max,
            sigma_min: if rank_deficient { 0.0 } else { sigma_min },
            kappa,
            rank_deficient: rank_deficient || sigma_min <= 0.0,
            dense,
        }
    }
}

pub fn estimate_condition<A: LinearOperator + ?Sized>(
    a: &A,
    opts: &ConditionOptions,
) -> ConditionEstimate {
    let n = a.n_cols();
    if n == 0 {
        return ConditionEstimate::from_parts(0.0, 0.0, true, true);
    }
    if a.column_sq_norms().contains(&0.0) {
        let s = if n <= opts.dense_limit {
            dense_extremes(a).0
        } else {
            power_iteration(a, opts)
        };
        return ConditionEstimate::from_parts(s, 0.0, true, n <= opts.dense_limit);
    }
    if n <= opts.dense_limit {
        let (smax, smin, deficient) = dense_extremes(a);
        ConditionEstimate::from_parts(smax, smin, deficient, true)
    } else {
        let smax = power_iteration(a, opts);
        match inverse_iteration(a, opts) {
            Some(smin) => ConditionEstimate::from_parts(smax, smin, false, false),
            None => ConditionEstimate::from_parts(smax, 0.0, true, false),
        }
    }
}

/// `(sigma_max, sigma_min, rank_deficient)` from the eigenvalues of `A^T A`.
/// Eigenvalues below `n eps lambda_max` cannot be told apart from zero.
fn dense_extremes<A: LinearOperator + ?Sized>(a: &A) -> (f64, f64, bool) {
    let n = a.n_cols();
    let g = DMatrix::from_row_slice(n, n, &a.gram());
    let eig = SymmetricEigen::new(g).eigenvalues;
    let lmax = eig.iter().copied().fold(0.0f64, f64::max);
    let lmin = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let floor = n as f64 * f64::EPSILON * lmax;
    let deficient = lmax <= 0.0 || lmin <= floor;
    (libm::sqrt(lmax.max(0.0)), libm::sqrt(lmin.max(0.0)), deficient)
}

fn random_unit(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = RngStream::new(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let s = norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    v
}

struct Gram<'a, A: ?Sized> {
    a: &'a A,
    tmp: Vec<f64>,
}

impl<A: LinearOperator + ?Sized> Gram<'_, A> {
    fn apply(&mut self, x: &[f64], out: &mut [f64]) {
        self.a.apply(x, &mut self.tmp);
        self.a.apply_adjoint(&self.tmp, out);
    }
}

fn power_iteration<A: LinearOperator + ?Sized>(a: &A, opts: &ConditionOptions) -> f64 {
    let n = a.n_cols();
    let mut gram = Gram {
        a,
        tmp: alloc::vec![0.0; a.n_rows()],
    };
    let mut v = random_unit(n, opts.seed);
    let mut w = alloc::vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..opts.max_iter {
        gram.apply(&v, &mut w);
        let next = dot(&v, &w);
        let s = norm(&w);
        if s == 0.0 {
            return 0.0;
        }
        v.iter_mut().zip(&w).for_each(|(x, y)| *x = y / s);
        let done = (next - lambda).abs() <= opts.tol * next;
        lambda = next;
        if done {
            break;
        }
    }
    libm::sqrt(lambda.max(0.0))
}

/// Smallest singular value, or `None` when the inner solves stagnate.
///
/// The inner solves are preconditioned with `diag(A^T A)`: the smallest
/// singular values of aliasing systems come from weakly sampled columns,
/// which is exactly what the diagonal rescales. Each solve starts from
/// `v / lambda`, the exact answer once `v` is an eigenvector.
fn inverse_iteration<A: LinearOperator + ?Sized>(a: &A, opts: &ConditionOptions) -> Option<f64> {
    let n = a.n_cols();
    let inv_diag: Vec<f64> = a.column_sq_norms().iter().map(|&d| 1.0 / d).collect();
    let mut gram = Gram {
        a,
        tmp: alloc::vec![0.0; a.n_rows()],
    };
    let mut v = random_unit(n, opts.seed ^ 0x9e37_79b9);
    let mut w = alloc::vec![0.0; n];
    let mut gv = alloc::vec![0.0; n];
    let mut lambda = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let guess = if lambda.is_finite() { 1.0 / lambda } else { 0.0 };
        w.iter_mut().zip(&v).for_each(|(wi, vi)| *wi = vi * guess);
        if !spd_cg(&mut gram, &inv_diag, &v, &mut w, 1e-10, 20 * n.max(50)) {
            return None;
        }
        let s = norm(&w);
        if !s.is_finite() || s == 0.0 {
            return None;
        }
        v.iter_mut().zip(&w).for_each(|(x, y)| *x = y / s);
        gram.apply(&v, &mut gv);
        let next = dot(&v, &gv);
        let done = (next - lambda).abs() <= opts.tol * next;
        lambda = next;
        if done {
            break;
        }
    }
    if lambda > 0.0 {
        Some(libm::sqrt(lambda))
    } else {
        None
    }
}

/// Iterations without a new smallest residual after which a solve counts
/// as stagnated.
const STAGNATION: usize = 500;

/// Preconditioned CG for `G x = b` from the initial `x`; returns whether
/// the relative residual met `tol`.
fn spd_cg<A: LinearOperator + ?Sized>(
    g: &mut Gram<'_, A>,
    inv_diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> bool {
    let bn = norm(b);
    if bn == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return true;
    }
    let mut q = alloc::vec![0.0; b.len()];
    g.apply(x, &mut q);
    let mut r: Vec<f64> = b.iter().zip(&q).map(|(bi, qi)| bi - qi).collect();
    let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut best = norm(&r);
    let mut since_best = 0;
    for _ in 0..max_iter {
        if best <= tol * bn {
            return true;
        }
        g.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return false;
        }
        let alpha = rz / pq;
        x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
        r.iter_mut().zip(&q).for_each(|(ri, qi)| *ri -= alpha * qi);
        let rn = norm(&r);
        if rn < best {
            best = rn;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best > STAGNATION {
                return false;
            }
        }
        z.iter_mut()
            .zip(&r)
            .zip(inv_diag)
            .for_each(|((zi, ri), di)| *zi = ri * di);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    best <= tol * bn
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::DenseMatrix;
    use alloc::vec;

    fn diag(values: &[f64]) -> DenseMatrix {
        let n = values.len();
        let mut data = vec![0.0; n * n];
        for (i, &v) in values.iter().enumerate() {
            data[i * n + i] = v;
        }
        DenseMatrix::new(n, n, data).unwrap()
    }

    #[test]
    fn diagonal_block() {
        let a = diag(&[1.0, 0.5, 0.5, 0.5]);
        let e = estimate_condition(&a, &ConditionOptions::default());
        assert!(e.dense);
        assert!((e.kappa - 2.0).abs() < 1e-12);
        let it = estimate_condition(
            &a,
            &ConditionOptions {
                dense_limit: 0,
                ..ConditionOptions::default()
            },
        );
        assert!(!it.dense);
        assert!((it.kappa - 2.0).abs() < 0.1, "{}", it.kappa);
    }

    #[test]
    fn zero_column_is_rank_deficient() {
        let a = diag(&[1.0, 0.0]);
        for limit in [0, 10] {
            let e = estimate_condition(
                &a,
                &ConditionOptions {
                    dense_limit: limit,
                    ..ConditionOptions::default()
                },
            );
            assert!(e.rank_deficient && e.kappa.is_infinite());
        }
    }

    #[test]
    fn dependent_columns_are_rank_deficient() {
        let a = DenseMatrix::new(3, 2, vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0]).unwrap();
        let e = estimate_condition(&a, &ConditionOptions::default());
        assert!(e.rank_deficient);
    }

    #[test]
    fn iterative_agrees_with_dense() {
        let mut rng = RngStream::new(8);
        let data = (0..60 * 15).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let a = DenseMatrix::new(60, 15, data).unwrap();
        let dense = estimate_condition(&a, &ConditionOptions::default());
        let iter = estimate_condition(
            &a,
            &ConditionOptions {
                dense_limit: 0,
                ..ConditionOptions::default()
            },
        );
        assert!((iter.kappa / dense.kappa - 1.0).abs() < 0.05);
    }
}
