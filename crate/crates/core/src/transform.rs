//! Forward DCT-II quadrature on tensor grids of arbitrary per-dimension size.
//!
//! One dimension: `out[n] = (1/P) sum_k cos(n (k + 1/2) pi / P) x[k]`.
//! Multi-dimensional transforms apply this along every axis of the row-major
//! sample array.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::chebgrid::{GridSpec, SampleVector};
use crate::error::{FctError, Result};
use crate::fft::{Complex, FftPlan};

/// Sizes up to this use a precomputed cosine table instead of the FFT.
pub const DIRECT_THRESHOLD: usize = 32;

/// Aliased grid spectrum, laid out like the samples it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVector {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

/// `cos(j pi / 2P)` for `j < 4P`.
fn quarter_wave(points: usize) -> Vec<f64> {
    let four_p = 4 * points;
    (0..four_p)
        .map(|j| libm::cos(j as f64 * PI / (2 * points) as f64))
        .collect()
}

enum Method {
    Trivial,
    Table(Vec<f64>),
    Fft {
        plan: FftPlan,
        twiddles: Vec<Complex>,
    },
}

/// A reusable one-dimensional DCT-II for a fixed length.
pub struct DctPlan {
    points: usize,
    method: Method,
}

impl DctPlan {
    pub fn new(points: usize) -> Self {
        assert!(points >= 1, "DCT length must be positive");
        let method = if points == 1 {
            Method::Trivial
        } else if points <= DIRECT_THRESHOLD {
            let wave = quarter_wave(points);
            let four_p = 4 * points;
            let mut table = alloc::vec![0.0; points * points];
            for n in 0..points {
                for k in 0..points {
                    table[n * points + k] = wave[(2 * k + 1) * n % four_p];
                }
            }
            Method::Table(table)
        } else {
            let twiddles = (0..points)
                .map(|n| Complex::cis(-PI * n as f64 / (2 * points) as f64))
                .collect();
            Method::Fft {
                plan: FftPlan::new(points),
                twiddles,
            }
        };
        DctPlan { points, method }
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Transforms `data` in place.
    pub fn apply(&self, data: &mut [f64], work: &mut DctWork) {
        let p = self.points;
        debug_assert_eq!(data.len(), p);
        let scale = 1.0 / p as f64;
        match &self.method {
            Method::Trivial => {}
            Method::Table(table) => {
                work.real.clear();
                work.real.extend_from_slice(data);
                for (n, out) in data.iter_mut().enumerate() {
                    let row = &table[n * p..(n + 1) * p];
                    let s: f64 = row.iter().zip(&work.real).map(|(c, x)| c * x).sum();
                    *out = s * scale;
                }
            }
            Method::Fft { plan, twiddles } => {
                // even-odd reordering turns the DCT-II into one length-P FFT
                work.complex.clear();
                work.complex.resize(p, Complex::ZERO);
                for k in 0..p.div_ceil(2) {
                    work.complex[k] = Complex::new(data[2 * k], 0.0);
                }
                for k in 0..p / 2 {
                    work.complex[p - 1 - k] = Complex::new(data[2 * k + 1], 0.0);
                }
                plan.forward(&mut work.complex, &mut work.scratch);
                for n in 0..p {
                    data[n] = (twiddles[n] * work.complex[n]).re * scale;
                }
            }
        }
    }
}

/// Scratch buffers shared across DCT applications.
#[derive(Default)]
pub struct DctWork {
    real: Vec<f64>,
    complex: Vec<Complex>,
    scratch: Vec<Complex>,
}

impl DctWork {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Fast one-dimensional forward DCT.
pub fn dct_forward_1d(values: &[f64]) -> Vec<f64> {
    let mut out = values.to_vec();
    if !out.is_empty() {
        DctPlan::new(out.len()).apply(&mut out, &mut DctWork::new());
    }
    out
}

/// Reference `O(P^2)` forward DCT. Angles are reduced exactly modulo `2 pi`
/// before calling `cos`.
pub fn dct_direct_1d(values: &[f64]) -> Vec<f64> {
    let p = values.len();
    if p == 0 {
        return Vec::new();
    }
    let wave = quarter_wave(p);
    (0..p)
        .map(|n| {
            values
                .iter()
                .enumerate()
                .map(|(k, &x)| wave[(2 * k + 1) * n % (4 * p)] * x)
                .sum::<f64>()
                / p as f64
        })
        .collect()
}

/// Plans for every distinct size of a grid, indexed by dimension.
pub struct GridPlans {
    counts: Vec<usize>,
    plans: Vec<Option<DctPlan>>,
    index: Vec<usize>,
}

impl GridPlans {
    pub fn new(grid: &GridSpec) -> Self {
        let mut sizes: Vec<usize> = Vec::new();
        let mut plans = Vec::new();
        let mut index = Vec::with_capacity(grid.dim());
        for &p in grid.counts() {
            match sizes.iter().position(|&s| s == p) {
                Some(i) => index.push(i),
                None => {
                    sizes.push(p);
                    plans.push(if p > 1 { Some(DctPlan::new(p)) } else { None });
                    index.push(sizes.len() - 1);
                }
            }
        }
        GridPlans {
            counts: grid.counts().to_vec(),
            plans,
            index,
        }
    }
}

/// Transforms a row-major buffer in place along the dimensions in `order`.
pub fn dct_in_place(grid: &GridSpec, values: &mut [f64], order: &[usize]) -> Result<()> {
    dct_in_place_with(&GridPlans::new(grid), grid, values, order)
}

pub fn dct_in_place_with(
    plans: &GridPlans,
    grid: &GridSpec,
    values: &mut [f64],
    order: &[usize],
) -> Result<()> {
    if values.len() != grid.total_points() {
        return Err(FctError::LengthMismatch {
            expected: grid.total_points(),
            found: values.len(),
        });
    }
    if plans.counts != grid.counts() {
        return Err(FctError::InvalidArgument(
            "DCT plans were built for a different grid".into(),
        ));
    }
    let strides = grid.strides();
    let mut work = DctWork::new();
    let mut pencil = Vec::new();
    for &dim in order {
        if dim >= grid.dim() {
            return Err(FctError::DimensionMismatch {
                expected: grid.dim(),
                found: dim + 1,
            });
        }
        let Some(plan) = &plans.plans[plans.index[dim]] else {
            continue;
        };
        let p = grid.counts()[dim];
        let stride = strides[dim];
        let block = p * stride;
        pencil.resize(p, 0.0);
        for base in (0..values.len()).step_by(block) {
            for inner in 0..stride {
                let start = base + inner;
                for k in 0..p {
                    pencil[k] = values[start + k * stride];
                }
                plan.apply(&mut pencil, &mut work);
                for k in 0..p {
                    values[start + k * stride] = pencil[k];
                }
            }
        }
    }
    Ok(())
}

/// Multi-dimensional forward DCT of a grid sample.
pub fn dct_forward(sample: &SampleVector) -> Result<SpectralVector> {
    let mut values = sample.values.clone();
    let order: Vec<usize> = (0..sample.grid.dim()).collect();
    dct_in_place(&sample.grid, &mut values, &order)?;
    Ok(SpectralVector {
        grid: sample.grid.clone(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use alloc::vec;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn one_dimensional_examples() {
        for p in [1, 2, 3, 7, 33, 64, 100] {
            let out = dct_forward_1d(&vec![1.0; p]);
            assert!((out[0] - 1.0).abs() < 1e-14);
            assert!(out[1..].iter().all(|v| v.abs() < 1e-14), "P = {p}");
        }
        let theta: Vec<f64> = (0..4).map(|k| (k as f64 + 0.5) * PI / 4.0).collect();
        let x: Vec<f64> = theta.iter().map(|&t| libm::cos(2.0 * t)).collect();
        assert!(close(&dct_forward_1d(&x), &[0.0, 0.0, 0.5, 0.0], 1e-15));
        assert_eq!(dct_forward_1d(&[3.5]), vec![3.5]);
    }

    #[test]
    fn fast_matches_direct() {
        let mut rng = RngStream::new(1);
        for p in (1..=70).chain([127, 128, 255, 256]) {
            let x: Vec<f64> = (0..p).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let fast = dct_forward_1d(&x);
            let slow = dct_direct_1d(&x);
            let scale = slow.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let err = fast
                .iter()
                .zip(&slow)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(err <= 1e-13 * scale, "P = {p}: {err}");
        }
    }

    #[test]
    fn multi_dimensional_examples() {
        let g = GridSpec::new(vec![3, 3]).unwrap();
        let s = SampleVector {
            grid: g.clone(),
            values: vec![2.5; 9],
        };
        let f = dct_forward(&s).unwrap();
        assert!((f.values[0] - 2.5).abs() < 1e-15);
        assert!(f.values[1..].iter().all(|v| v.abs() < 1e-15));

        // T_1(x1) T_2(x2) on a 4 x 4 grid
        let g = GridSpec::new(vec![4, 4]).unwrap();
        let x = crate::chebgrid::chebyshev_points(4);
        let mut values = vec![];
        for &a in &x {
            for &b in &x {
                values.push(a * (2.0 * b * b - 1.0));
            }
        }
        let f = dct_forward(&SampleVector { grid: g, values }).unwrap();
        for (i, v) in f.values.iter().enumerate() {
            let want = if i == 4 + 2 { 0.25 } else { 0.0 };
            assert!((v - want).abs() < 1e-15, "{i}: {v}");
        }
    }

    #[test]
    fn separable_and_order_independent() {
        let mut rng = RngStream::new(2);
        let (p1, p2, p3) = (5, 40, 3);
        let u: Vec<f64> = (0..p1).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let v: Vec<f64> = (0..p2).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let g = GridSpec::new(vec![p1, p2]).unwrap();
        let values: Vec<f64> = u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        let f = dct_forward(&SampleVector { grid: g, values }).unwrap();
        let (du, dv) = (dct_forward_1d(&u), dct_forward_1d(&v));
        for i in 0..p1 {
            for j in 0..p2 {
                assert!((f.values[i * p2 + j] - du[i] * dv[j]).abs() < 1e-14);
            }
        }

        let g = GridSpec::new(vec![p1, p2, p3]).unwrap();
        let x: Vec<f64> = (0..g.total_points()).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let mut a = x.clone();
        let mut b = x;
        dct_in_place(&g, &mut a, &[0, 1, 2]).unwrap();
        dct_in_place(&g, &mut b, &[2, 0, 1]).unwrap();
        assert!(close(&a, &b, 1e-14));
    }

    #[test]
    fn rejects_wrong_length() {
        let g = GridSpec::new(vec![2, 2]).unwrap();
        assert!(matches!(
            dct_in_place(&g, &mut [0.0; 3], &[0, 1]),
            Err(FctError::LengthMismatch { .. })
        ));
    }
}
