//! Fixed-WiMAX subcarrier allocation, OFDM modulation and cyclic prefix.
//!
//! Subcarriers are addressed by frequency offset -128..=127; FFT bin `b`
//! carries offset `b` for `b < 128` and `b - 256` otherwise. Pilots sit at
//! offsets +-13, +-38, +-63, +-88. DC, the 28 lowest offsets (-128..=-101)
//! and the 27 highest (101..=127) are null. The remaining 192 offsets carry
//! data in ascending frequency order.

use num_complex::Complex64;

use crate::error::{check_len, PhyError, Result};
pub use crate::fft::{fft256, ifft256};

pub const N_FFT: usize = 256;
pub const N_DATA: usize = 192;
pub const N_PILOT: usize = 8;
pub const N_NULL: usize = 56;
/// Pilot subcarrier offsets in ascending order.
pub const PILOT_OFFSETS: [i32; N_PILOT] = [-88, -63, -38, -13, 13, 38, 63, 88];
const LOWEST_USED: i32 = -100;
const HIGHEST_USED: i32 = 100;

/// Default ratio of sampling rate to nominal channel bandwidth.
pub const DEFAULT_SAMPLING_FACTOR: f64 = 8.0 / 7.0;

/// Cyclic-prefix duration as a fraction of the useful symbol time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CpRatio {
    G1_32,
    G1_16,
    G1_8,
    G1_4,
}

impl CpRatio {
    pub const ALL: [CpRatio; 4] = [CpRatio::G1_32, CpRatio::G1_16, CpRatio::G1_8, CpRatio::G1_4];

    pub fn denominator(self) -> usize {
        match self {
            CpRatio::G1_32 => 32,
            CpRatio::G1_16 => 16,
            CpRatio::G1_8 => 8,
            CpRatio::G1_4 => 4,
        }
    }

    pub fn cp_len(self) -> usize {
        N_FFT / self.denominator()
    }

    pub fn as_f64(self) -> f64 {
        1.0 / self.denominator() as f64
    }
}

impl std::fmt::Display for CpRatio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "1/{}", self.denominator())
    }
}

impl std::str::FromStr for CpRatio {
    type Err = PhyError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let found = match s {
            "1/32" | "0.03125" => Some(CpRatio::G1_32),
            "1/16" | "0.0625" => Some(CpRatio::G1_16),
            "1/8" | "0.125" => Some(CpRatio::G1_8),
            "1/4" | "0.25" => Some(CpRatio::G1_4),
            _ => None,
        };
        found.ok_or_else(|| PhyError::InvalidParameter {
            name: "cp",
            reason: format!("unsupported ratio {s:?}; expected one of 1/32, 1/16, 1/8, 1/4"),
        })
    }
}

pub fn offset_to_bin(offset: i32) -> usize {
    offset.rem_euclid(N_FFT as i32) as usize
}

pub fn bin_to_offset(bin: usize) -> i32 {
    if bin < N_FFT / 2 {
        bin as i32
    } else {
        bin as i32 - N_FFT as i32
    }
}

/// Symbol layout and timing for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmParams {
    pub cp: CpRatio,
    /// Samples per second.
    pub sample_rate: f64,
    pub data_idx: Vec<usize>,
    pub pilot_idx: Vec<usize>,
    pub null_idx: Vec<usize>,
}

impl OfdmParams {
    /// Layout with the sampling rate derived as `8/7 * bandwidth_hz`.
    pub fn new(cp: CpRatio, bandwidth_hz: f64) -> Result<Self> {
        Self::with_sampling_factor(cp, bandwidth_hz, DEFAULT_SAMPLING_FACTOR)
    }

    pub fn with_sampling_factor(cp: CpRatio, bandwidth_hz: f64, factor: f64) -> Result<Self> {
        let sample_rate = bandwidth_hz * factor;
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(PhyError::InvalidParameter {
                name: "bandwidth_hz",
                reason: format!("sampling rate must be positive, got {sample_rate}"),
            });
        }
        let pilot_idx: Vec<usize> = PILOT_OFFSETS.iter().map(|&o| offset_to_bin(o)).collect();
        let data_idx: Vec<usize> = (LOWEST_USED..=HIGHEST_USED)
            .filter(|o| *o != 0 && !PILOT_OFFSETS.contains(o))
            .map(offset_to_bin)
            .collect();
        let mut null_idx: Vec<usize> = (0..N_FFT)
            .filter(|b| {
                let o = bin_to_offset(*b);
                o == 0 || !(LOWEST_USED..=HIGHEST_USED).contains(&o)
            })
            .collect();
        null_idx.sort_unstable();
        Ok(Self {
            cp,
            sample_rate,
            data_idx,
            pilot_idx,
            null_idx,
        })
    }

    pub fn cp_len(&self) -> usize {
        self.cp.cp_len()
    }

    /// Time-domain samples per OFDM symbol including the prefix.
    pub fn symbol_len(&self) -> usize {
        N_FFT + self.cp_len()
    }

    /// Places data and pilot values into a frequency-domain symbol.
    pub fn assemble(&self, data: &[Complex64], pilots: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len("assemble data symbols", N_DATA, data.len())?;
        check_len("assemble pilot symbols", N_PILOT, pilots.len())?;
        let mut freq = vec![Complex64::new(0.0, 0.0); N_FFT];
        for (&b, &v) in self.data_idx.iter().zip(data) {
            freq[b] = v;
        }
        for (&b, &v) in self.pilot_idx.iter().zip(pilots) {
            freq[b] = v;
        }
        Ok(freq)
    }

    /// Splits a frequency-domain symbol into `(data, pilots)`.
    pub fn disassemble(&self, freq: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        check_len("disassemble symbol", N_FFT, freq.len())?;
        Ok((
            self.data_idx.iter().map(|&b| freq[b]).collect(),
            self.pilot_idx.iter().map(|&b| freq[b]).collect(),
        ))
    }

    /// Copies the last `cp_len` samples in front of the symbol.
    pub fn add_cp(&self, time: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len("add_cp symbol", N_FFT, time.len())?;
        let cp = self.cp_len();
        let mut out = Vec::with_capacity(N_FFT + cp);
        out.extend_from_slice(&time[N_FFT - cp..]);
        out.extend_from_slice(time);
        Ok(out)
    }

    pub fn remove_cp(&self, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len("remove_cp symbol", self.symbol_len(), samples.len())?;
        Ok(samples[self.cp_len()..].to_vec())
    }

    /// Frequency-domain symbol to prefixed time samples.
    pub fn modulate(&self, freq: &[Complex64]) -> Result<Vec<Complex64>> {
        self.add_cp(&ifft256(freq)?)
    }

    /// Prefixed time samples to a frequency-domain symbol.
    pub fn demodulate(&self, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        fft256(&self.remove_cp(samples)?)
    }
}
