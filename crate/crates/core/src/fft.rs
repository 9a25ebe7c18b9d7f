//! Iterative radix-2 FFT with unitary (1/sqrt(N)) scaling in both directions.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{check_len, PhyError, Result};

#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Fft {
    pub fn new(n: usize) -> Result<Self> {
        if !n.is_power_of_two() || n < 2 {
            return Err(PhyError::InvalidParameter {
                name: "fft size",
                reason: format!("must be a power of two >= 2, got {n}"),
            });
        }
        let twiddles = (0..n / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| i.reverse_bits() >> (usize::BITS - bits))
            .collect();
        Ok(Self {
            n,
            twiddles,
            bitrev,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.transform(x, false)
    }

    pub fn inverse(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.transform(x, true)
    }

    fn transform(&self, x: &[Complex64], inverse: bool) -> Result<Vec<Complex64>> {
        check_len("fft input", self.n, x.len())?;
        let n = self.n;
        let mut buf: Vec<Complex64> = self.bitrev.iter().map(|&i| x[i]).collect();

        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let u = buf[start + k];
                    let t = w * buf[start + k + half];
                    buf[start + k] = u + t;
                    buf[start + k + half] = u - t;
                }
            }
            len <<= 1;
        }

        let norm = 1.0 / (n as f64).sqrt();
        for v in &mut buf {
            *v *= norm;
        }
        Ok(buf)
    }
}

fn fft_256() -> &'static Fft {
    static PLAN: OnceLock<Fft> = OnceLock::new();
    PLAN.get_or_init(|| Fft::new(256).expect("256 is a power of two"))
}

pub fn fft256(x: &[Complex64]) -> Result<Vec<Complex64>> {
    fft_256().forward(x)
}

pub fn ifft256(x: &[Complex64]) -> Result<Vec<Complex64>> {
    fft_256().inverse(x)
}
