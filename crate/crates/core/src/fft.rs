//! Complex FFTs: an iterative radix-2 transform for power-of-two lengths and
//! a Bluestein chirp-z fallback for arbitrary lengths.
//!
//! The radix-2 path is all the circulant-embedding machinery needs (embedding
//! lengths are rounded up to powers of two); Bluestein covers the n-point
//! diagonalization of the circulant preconditioner, where n is the matrix
//! dimension and arbitrary.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Smallest power of two >= `n` (n >= 1).
pub fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Precomputed radix-2 FFT of a fixed power-of-two length.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    /// exp(-2*pi*i*k/len) for k in 0..len/2
    twiddles: Vec<Complex64>,
    bitrev: Vec<u32>,
}

impl FftPlan {
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "FftPlan length must be a power of two");
        let half = len / 2;
        let twiddles = (0..half)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / len as f64))
            .collect();
        let bits = len.trailing_zeros();
        let bitrev = (0..len as u32)
            .map(|i| {
                if bits == 0 {
                    0
                } else {
                    i.reverse_bits() >> (32 - bits)
                }
            })
            .collect();
        Self {
            len,
            twiddles,
            bitrev,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.process(data, false);
    }

    /// Inverse transform, scaled by 1/len.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.process(data, true);
        let scale = 1.0 / self.len as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn process(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.len;
        assert_eq!(data.len(), n, "FftPlan length mismatch");
        if n <= 1 {
            return;
        }
        for i in 0..n {
            let j = self.bitrev[i] as usize;
            if i < j {
                data.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            let mut start = 0;
            while start < n {
                for j in 0..half {
                    let mut w = self.twiddles[j * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + j];
                    let b = data[start + j + half] * w;
                    data[start + j] = a + b;
                    data[start + j + half] = a - b;
                }
                start += size;
            }
            size *= 2;
        }
    }
}

/// DFT of arbitrary length: radix-2 when possible, Bluestein otherwise.
#[derive(Debug, Clone)]
pub struct Dft {
    n: usize,
    kind: DftKind,
}

#[derive(Debug, Clone)]
enum DftKind {
    Pow2(FftPlan),
    Bluestein {
        plan: FftPlan,
        /// chirp[j] = exp(-i*pi*j^2/n)
        chirp: Vec<Complex64>,
        /// FFT of the circularized conjugate chirp kernel.
        kernel_spectrum: Vec<Complex64>,
    },
}

impl Dft {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        if n.is_power_of_two() {
            return Self {
                n,
                kind: DftKind::Pow2(FftPlan::new(n)),
            };
        }
        let l = next_pow2(2 * n - 1);
        let plan = FftPlan::new(l);
        // j^2 mod 2n keeps the phase argument exact for large j.
        let chirp: Vec<Complex64> = (0..n)
            .map(|j| {
                let q = ((j as u128 * j as u128) % (2 * n as u128)) as f64;
                Complex64::from_polar(1.0, -PI * q / n as f64)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); l];
        kernel[0] = chirp[0].conj();
        for j in 1..n {
            let c = chirp[j].conj();
            kernel[j] = c;
            kernel[l - j] = c;
        }
        plan.forward(&mut kernel);
        Self {
            n,
            kind: DftKind::Bluestein {
                plan,
                chirp,
                kernel_spectrum: kernel,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n, "Dft length mismatch");
        match &self.kind {
            DftKind::Pow2(plan) => {
                let mut data = x.to_vec();
                plan.forward(&mut data);
                data
            }
            DftKind::Bluestein {
                plan,
                chirp,
                kernel_spectrum,
            } => {
                let l = plan.len();
                let mut a = vec![Complex64::new(0.0, 0.0); l];
                for j in 0..self.n {
                    a[j] = x[j] * chirp[j];
                }
                plan.forward(&mut a);
                for (ai, ki) in a.iter_mut().zip(kernel_spectrum.iter()) {
                    *ai *= ki;
                }
                plan.inverse(&mut a);
                (0..self.n).map(|k| chirp[k] * a[k]).collect()
            }
        }
    }

    /// Inverse DFT, scaled by 1/n.
    pub fn inverse(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n, "Dft length mismatch");
        let conj: Vec<Complex64> = x.iter().map(|v| v.conj()).collect();
        let scale = 1.0 / self.n as f64;
        self.forward(&conj)
            .into_iter()
            .map(|v| v.conj() * scale)
            .collect()
    }
}
