//! Minimal complex FFT for arbitrary lengths: iterative radix-2 for powers of
//! two, Bluestein's chirp-z reduction otherwise.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    /// `exp(i angle)`.
    pub fn cis(angle: f64) -> Self {
        let (s, c) = libm::sincos(angle);
        Complex { re: c, im: s }
    }

    pub fn conj(self) -> Self {
        Complex {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn scale(self, s: f64) -> Self {
        Complex {
            re: self.re * s,
            im: self.im * s,
        }
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        Complex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

/// Twiddles `exp(-2 pi i j / n)` for `j < n/2`.
fn twiddles(n: usize) -> Vec<Complex> {
    (0..n / 2)
        .map(|j| Complex::cis(-2.0 * PI * j as f64 / n as f64))
        .collect()
}

struct Radix2 {
    n: usize,
    twiddles: Vec<Complex>,
}

impl Radix2 {
    fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        Radix2 {
            n,
            twiddles: twiddles(n),
        }
    }

    /// In-place forward transform (`sign = -1` in the exponent).
    fn forward(&self, data: &mut [Complex]) {
        let n = self.n;
        debug_assert_eq!(data.len(), n);
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let step = n / len;
            for start in (0..n).step_by(len) {
                for j in 0..len / 2 {
                    let w = self.twiddles[j * step];
                    let a = data[start + j];
                    let b = data[start + j + len / 2] * w;
                    data[start + j] = a + b;
                    data[start + j + len / 2] = a - b;
                }
            }
            len <<= 1;
        }
    }

    fn inverse(&self, data: &mut [Complex]) {
        for v in data.iter_mut() {
            *v = v.conj();
        }
        self.forward(data);
        let s = 1.0 / self.n as f64;
        for v in data.iter_mut() {
            *v = v.conj().scale(s);
        }
    }
}

enum Kind {
    Radix2(Radix2),
    Bluestein {
        inner: Radix2,
        chirp: Vec<Complex>,
        filter: Vec<Complex>,
    },
}

/// A forward FFT plan of fixed length.
pub(crate) struct FftPlan {
    n: usize,
    kind: Kind,
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        if n.is_power_of_two() {
            return FftPlan {
                n,
                kind: Kind::Radix2(Radix2::new(n)),
            };
        }
        let m = (2 * n - 1).next_power_of_two();
        let inner = Radix2::new(m);
        // chirp_j = exp(-i pi j^2 / n), with j^2 reduced mod 2n first
        let chirp: Vec<Complex> = (0..n)
            .map(|j| {
                let q = (j as u128 * j as u128 % (2 * n as u128)) as f64;
                Complex::cis(-PI * q / n as f64)
            })
            .collect();
        let mut filter = alloc::vec![Complex::ZERO; m];
        filter[0] = chirp[0].conj();
        for j in 1..n {
            filter[j] = chirp[j].conj();
            filter[m - j] = chirp[j].conj();
        }
        inner.forward(&mut filter);
        FftPlan {
            n,
            kind: Kind::Bluestein {
                inner,
                chirp,
                filter,
            },
        }
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.n
    }

    /// Forward transform of `data` (length `n`), using `scratch` as work space.
    pub fn forward(&self, data: &mut [Complex], scratch: &mut Vec<Complex>) {
        match &self.kind {
            Kind::Radix2(p) => p.forward(data),
            Kind::Bluestein {
                inner,
                chirp,
                filter,
            } => {
                scratch.clear();
                scratch.resize(inner.n, Complex::ZERO);
                for j in 0..self.n {
                    scratch[j] = data[j] * chirp[j];
                }
                inner.forward(scratch);
                for (s, &f) in scratch.iter_mut().zip(filter) {
                    *s = *s * f;
                }
                inner.inverse(scratch);
                for k in 0..self.n {
                    data[k] = scratch[k] * chirp[k];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn naive(x: &[Complex]) -> Vec<Complex> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex::ZERO, |acc, (j, &v)| {
                    let e = (j * k % n) as f64;
                    acc + v * Complex::cis(-2.0 * PI * e / n as f64)
                })
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        let mut rng = RngStream::new(11);
        let mut scratch = Vec::new();
        for n in 1..=40 {
            let x: Vec<Complex> = (0..n)
                .map(|_| Complex::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
                .collect();
            let want = naive(&x);
            let mut got = x.clone();
            let plan = FftPlan::new(n);
            assert_eq!(plan.len(), n);
            plan.forward(&mut got, &mut scratch);
            for (a, b) in got.iter().zip(&want) {
                assert!((a.re - b.re).abs() < 1e-12 && (a.im - b.im).abs() < 1e-12, "n = {n}");
            }
        }
    }
}
