//! Aliasing of Chebyshev polynomials on first-kind grids.
//!
//! On a `P`-point grid, `(1/P) sum_k cos(n theta_k) cos(m theta_k)` is
//! `delta(P, m + n) / 2 + delta(P, m - n) / 2`, so every high frequency `m`
//! lands on at most one grid frequency `n < P`. In `D` dimensions the weights
//! multiply, which makes each column of an aliasing matrix hold at most one
//! nonzero.

use alloc::vec::Vec;

use crate::chebgrid::GridSpec;
use crate::error::{FctError, Result};
use crate::multiindex::IndexSet;

/// The aliasing kernel: `1` if `ell = 0 (mod 4P)`, `-1` if `ell = 2P (mod 4P)`,
/// otherwise `0`.
pub fn delta(points: usize, ell: i64) -> i32 {
    debug_assert!(points >= 1);
    let period = 4 * points as i64;
    let r = ell.rem_euclid(period);
    if r == 0 {
        1
    } else if r == period / 2 {
        -1
    } else {
        0
    }
}

/// Entry `(n, m)` of the one-dimensional aliasing matrix on `points` nodes.
pub fn alias_entry_1d(points: usize, n: usize, m: usize) -> f64 {
    let (n, m) = (n as i64, m as i64);
    0.5 * f64::from(delta(points, m + n)) + 0.5 * f64::from(delta(points, m - n))
}

/// The single grid frequency a degree is aliased onto.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasTerm {
    pub row_freq: usize,
    pub weight: f64,
}

/// Folds degree `m` onto a `points`-node grid. Returns `None` when
/// `T_m` vanishes on every node (`m = P mod 2P`).
pub fn fold_frequency(points: usize, m: u64) -> Option<AliasTerm> {
    let p = points as u64;
    let period = 2 * p;
    let r = m % period;
    let sign = if (m / period) % 2 == 0 { 1.0 } else { -1.0 };
    if r == 0 {
        Some(AliasTerm {
            row_freq: 0,
            weight: sign,
        })
    } else if r < p {
        Some(AliasTerm {
            row_freq: r as usize,
            weight: 0.5 * sign,
        })
    } else if r == p {
        None
    } else {
        Some(AliasTerm {
            row_freq: (period - r) as usize,
            weight: -0.5 * sign,
        })
    }
}

/// Sparse aliasing matrix of one grid: at most one nonzero per column,
/// stored column-sorted for the columns that have one.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasingMatrix {
    n_rows: usize,
    n_cols: usize,
    cols: Vec<usize>,
    rows: Vec<usize>,
    values: Vec<f64>,
}

impl AliasingMatrix {
    /// Builds a matrix from `(col, row, value)` triples. Columns must be
    /// strictly increasing, rows in range and values nonzero.
    pub fn from_entries(
        n_rows: usize,
        n_cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut m = AliasingMatrix {
            n_rows,
            n_cols,
            cols: Vec::new(),
            rows: Vec::new(),
            values: Vec::new(),
        };
        for (c, r, v) in entries {
            if c >= n_cols || r >= n_rows {
                return Err(FctError::InvalidArgument(alloc::format!(
                    "entry ({r}, {c}) outside a {n_rows} x {n_cols} matrix"
                )));
            }
            if m.cols.last().is_some_and(|&last| last >= c) {
                return Err(FctError::InvalidArgument(
                    "aliasing entries must have strictly increasing columns".into(),
                ));
            }
            if v == 0.0 || !v.is_finite() {
                return Err(FctError::InvalidArgument(
                    "aliasing entries must be finite and nonzero".into(),
                ));
            }
            m.cols.push(c);
            m.rows.push(r);
            m.values.push(v);
        }
        Ok(m)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// `(col, row, value)` for every stored nonzero, by increasing column.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.cols
            .iter()
            .zip(&self.rows)
            .zip(&self.values)
            .map(|((&c, &r), &v)| (c, r, v))
    }

    /// The nonzero of column `col`, if any.
    pub fn column(&self, col: usize) -> Option<(usize, f64)> {
        self.cols
            .binary_search(&col)
            .ok()
            .map(|i| (self.rows[i], self.values[i]))
    }

    /// `out += A c`.
    pub fn apply_add(&self, c: &[f64], out: &mut [f64]) {
        for ((&col, &row), &v) in self.cols.iter().zip(&self.rows).zip(&self.values) {
            out[row] += v * c[col];
        }
    }

    /// `out += A^T r`.
    pub fn apply_adjoint_add(&self, r: &[f64], out: &mut [f64]) {
        for ((&col, &row), &v) in self.cols.iter().zip(&self.rows).zip(&self.values) {
            out[col] += v * r[row];
        }
    }

    /// Adds the squared column norms into `out`.
    pub fn column_sq_norms_add(&self, out: &mut [f64]) {
        for (&col, &v) in self.cols.iter().zip(&self.values) {
            out[col] += v * v;
        }
    }

    /// Bytes held by the entry arrays.
    pub fn heap_bytes(&self) -> usize {
        self.nnz() * (2 * core::mem::size_of::<usize>() + core::mem::size_of::<f64>())
    }
}

/// Aliasing matrix of `grid` for the coefficients in `set`.
pub fn assemble_block(grid: &GridSpec, set: &IndexSet) -> Result<AliasingMatrix> {
    let dim = set.dim();
    if grid.dim() != dim {
        return Err(FctError::DimensionMismatch {
            expected: dim,
            found: grid.dim(),
        });
    }
    let counts = grid.counts();
    let strides = grid.strides();
    let mut cols = Vec::new();
    let mut rows = Vec::new();
    let mut values = Vec::new();
    'columns: for (col, m) in set.iter().enumerate() {
        let mut row = 0usize;
        let mut value = 1.0;
        for i in 0..dim {
            match fold_frequency(counts[i], u64::from(m[i])) {
                Some(t) => {
                    row += t.row_freq * strides[i];
                    value *= t.weight;
                }
                None => continue 'columns,
            }
        }
        cols.push(col);
        rows.push(row);
        values.push(value);
    }
    Ok(AliasingMatrix {
        n_rows: grid.total_points(),
        n_cols: set.len(),
        cols,
        rows,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::Norm;
    use alloc::vec;
    use core::f64::consts::PI;

    fn quadrature(points: usize, n: usize, m: usize) -> f64 {
        let p = points as f64;
        (0..points)
            .map(|k| {
                let t = (k as f64 + 0.5) * PI / p;
                libm::cos(n as f64 * t) * libm::cos(m as f64 * t)
            })
            .sum::<f64>()
            / p
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(4, 0), 1);
        assert_eq!(delta(4, 8), -1);
        assert_eq!(delta(4, -16), 1);
        assert_eq!(delta(4, -8), -1);
        assert_eq!(delta(4, 3), 0);
        assert_eq!(delta(1, 2), -1);
        assert_eq!(delta(1, 1), 0);
    }

    #[test]
    fn entry_examples() {
        assert_eq!(alias_entry_1d(4, 0, 0), 1.0);
        assert_eq!(alias_entry_1d(4, 0, 8), -1.0);
        assert_eq!(alias_entry_1d(4, 1, 7), -0.5);
        assert!((quadrature(4, 0, 8) + 1.0).abs() < 1e-14);
        assert!((quadrature(4, 1, 7) + 0.5).abs() < 1e-14);
    }

    #[test]
    fn fold_examples() {
        assert_eq!(
            fold_frequency(4, 7),
            Some(AliasTerm {
                row_freq: 1,
                weight: -0.5
            })
        );
        assert_eq!(
            fold_frequency(4, 2),
            Some(AliasTerm {
                row_freq: 2,
                weight: 0.5
            })
        );
        assert_eq!(fold_frequency(4, 4), None);
        // a single node at x = 0 reproduces T_m(0)
        for m in 0..12u64 {
            let t0 = libm::cos(m as f64 * PI / 2.0);
            let got = fold_frequency(1, m).map_or(0.0, |t| t.weight);
            assert!((got - t0).abs() < 1e-14, "m = {m}");
        }
    }

    #[test]
    fn fold_agrees_with_scan() {
        for p in 1..=32usize {
            for m in 0..=10 * p {
                let scan: Vec<(usize, f64)> = (0..p)
                    .map(|n| (n, alias_entry_1d(p, n, m)))
                    .filter(|&(_, v)| v != 0.0)
                    .collect();
                assert!(scan.len() <= 1);
                let fold = fold_frequency(p, m as u64).map(|t| (t.row_freq, t.weight));
                assert_eq!(fold, scan.first().copied(), "P = {p}, m = {m}");
            }
        }
    }

    #[test]
    fn block_examples() {
        let set = IndexSet::enumerate(1, 3, Norm::One).unwrap();
        let a = assemble_block(&GridSpec::new(vec![4]).unwrap(), &set).unwrap();
        let got: Vec<_> = a.entries().collect();
        assert_eq!(
            got,
            vec![(0, 0, 1.0), (1, 1, 0.5), (2, 2, 0.5), (3, 3, 0.5)]
        );

        let zero = IndexSet::enumerate(2, 0, Norm::One).unwrap();
        let a = assemble_block(&GridSpec::new(vec![1, 1]).unwrap(), &zero).unwrap();
        assert_eq!(a.entries().collect::<Vec<_>>(), vec![(0, 0, 1.0)]);

        let one = IndexSet::from_indices(2, 7, Norm::Max, [[7u32, 2]].iter()).unwrap();
        let a = assemble_block(&GridSpec::new(vec![4, 4]).unwrap(), &one).unwrap();
        assert_eq!(a.entries().collect::<Vec<_>>(), vec![(0, 4 + 2, -0.25)]);
        assert_eq!(a.n_rows(), 16);
    }

    #[test]
    fn empty_fold_column_is_zero() {
        let set = IndexSet::enumerate(1, 5, Norm::One).unwrap();
        let a = assemble_block(&GridSpec::new(vec![4]).unwrap(), &set).unwrap();
        assert_eq!(a.column(4), None);
        assert_eq!(a.nnz(), 5);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(AliasingMatrix::from_entries(2, 2, [(0, 2, 1.0)]).is_err());
        assert!(AliasingMatrix::from_entries(2, 2, [(1, 0, 1.0), (0, 0, 1.0)]).is_err());
        assert!(AliasingMatrix::from_entries(2, 2, [(0, 0, 0.0)]).is_err());
    }
}
